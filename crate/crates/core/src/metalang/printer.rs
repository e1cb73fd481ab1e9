//! Canonical text form: single space after commas and around comparators and
//! `Agg`, nothing else.

use std::fmt::{self, Display, Formatter, Write};

use super::ast::*;

pub fn pretty_print(q: &QueryAst) -> String {
    q.to_string()
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Number(n) => write!(f, "{n}"),
            Expr::Param(p) => f.write_str(p),
            Expr::Paren(inner) => write!(f, "({inner})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
        }
    }
}

impl Display for ObjectItem {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(&self.object)?;
        if let Some(par) = &self.par {
            write!(f, ".{par}")?;
        }
        if let Some(agg) = self.agg {
            write!(f, " Agg {}", agg.keyword())?;
        }
        Ok(())
    }
}

impl Display for Predicate {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.attribute, self.comparator, self.rhs)
    }
}

fn comma_list<T: Display>(f: &mut Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{item}")?;
    }
    Ok(())
}

impl Display for QueryAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())?;
        f.write_char('(')?;
        match self {
            QueryAst::Select(items) | QueryAst::Question { items, .. } | QueryAst::SetOp { items, .. } => {
                comma_list(f, items)?
            }
            QueryAst::Cons { object, predicates } => {
                f.write_str(object)?;
                for p in predicates {
                    write!(f, ", {p}")?;
                }
            }
            QueryAst::Semant { object, term } => write!(f, "{object}.{term}")?,
            QueryAst::Profile(entries) => {
                for (i, e) in entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}.{}", e.object, e.weight)?;
                }
            }
        }
        f.write_char(')')
    }
}
