use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Named numeric values substituted for parameters in predicate expressions.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AggKind {
    Sum,
    Count,
    Avg,
}

impl AggKind {
    pub const ALL: [AggKind; 3] = [AggKind::Sum, AggKind::Count, AggKind::Avg];

    pub fn keyword(self) -> &'static str {
        match self {
            AggKind::Sum => "SUM",
            AggKind::Count => "COUNT",
            AggKind::Avg => "AVG",
        }
    }

    pub fn from_keyword(s: &str) -> Option<AggKind> {
        AggKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

/// The six comparison signs shared by predicates and catalog constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = "<>")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl Comparator {
    pub const ALL: [Comparator; 6] =
        [Comparator::Eq, Comparator::Ne, Comparator::Lt, Comparator::Le, Comparator::Gt, Comparator::Ge];

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "=",
            Comparator::Ne => "<>",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Comparator> {
        Comparator::ALL.into_iter().find(|c| c.symbol() == s)
    }

    /// Applies the comparison to an already-computed ordering of `lhs` vs `rhs`.
    pub fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Comparator::Eq => ord == Equal,
            Comparator::Ne => ord != Equal,
            Comparator::Lt => ord == Less,
            Comparator::Le => ord != Greater,
            Comparator::Gt => ord == Greater,
            Comparator::Ge => ord != Less,
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub const ALL: [ArithOp; 4] = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div];

    pub fn symbol(self) -> char {
        match self {
            ArithOp::Add => '+',
            ArithOp::Sub => '-',
            ArithOp::Mul => '*',
            ArithOp::Div => '/',
        }
    }

    pub fn from_symbol(c: char) -> Option<ArithOp> {
        ArithOp::ALL.into_iter().find(|op| op.symbol() == c)
    }

    /// Binding strength; `*` and `/` bind tighter than `+` and `-`.
    pub fn precedence(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 1,
            ArithOp::Mul | ArithOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    UnboundParameter(String),
    DivisionByZero,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::UnboundParameter(name) => write!(f, "unbound parameter `{name}`"),
            ExprError::DivisionByZero => f.write_str("division by zero"),
        }
    }
}

impl std::error::Error for ExprError {}

/// Arithmetic over numbers and parameters. Parentheses are kept as explicit
/// nodes so printing reproduces the source structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Number(u64),
    Param(String),
    Paren(Box<Expr>),
    Binary { op: ArithOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

impl Expr {
    pub fn binary(op: ArithOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn paren(inner: Expr) -> Expr {
        Expr::Paren(Box::new(inner))
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<f64, ExprError> {
        match self {
            Expr::Number(n) => Ok(*n as f64),
            Expr::Param(name) => bindings.get(name).copied().ok_or_else(|| ExprError::UnboundParameter(name.clone())),
            Expr::Paren(inner) => inner.eval(bindings),
            Expr::Binary { op, lhs, rhs } => {
                let l = lhs.eval(bindings)?;
                let r = rhs.eval(bindings)?;
                match op {
                    ArithOp::Add => Ok(l + r),
                    ArithOp::Sub => Ok(l - r),
                    ArithOp::Mul => Ok(l * r),
                    ArithOp::Div if r == 0.0 => Err(ExprError::DivisionByZero),
                    ArithOp::Div => Ok(l / r),
                }
            }
        }
    }

    /// Parameter names in left-to-right order.
    pub fn params(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Number(_) => {}
            Expr::Param(p) => out.push(p),
            Expr::Paren(inner) => inner.collect_params(out),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_params(out);
                rhs.collect_params(out);
            }
        }
    }
}

/// One `object[.par] [Agg KIND]` argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectItem {
    pub object: String,
    pub par: Option<String>,
    pub agg: Option<AggKind>,
}

impl ObjectItem {
    pub fn new(object: impl Into<String>) -> ObjectItem {
        ObjectItem { object: object.into(), par: None, agg: None }
    }

    pub fn with_par(object: impl Into<String>, par: impl Into<String>) -> ObjectItem {
        ObjectItem { object: object.into(), par: Some(par.into()), agg: None }
    }

    pub fn agg(mut self, kind: AggKind) -> ObjectItem {
        self.agg = Some(kind);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub attribute: String,
    pub comparator: Comparator,
    pub rhs: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuestionKind {
    Who,
    Where,
    What,
    Which,
    How,
}

impl QuestionKind {
    pub const ALL: [QuestionKind; 5] =
        [QuestionKind::Who, QuestionKind::Where, QuestionKind::What, QuestionKind::Which, QuestionKind::How];

    pub fn keyword(self) -> &'static str {
        match self {
            QuestionKind::Who => "who",
            QuestionKind::Where => "where",
            QuestionKind::What => "what",
            QuestionKind::Which => "which",
            QuestionKind::How => "how",
        }
    }

    /// Catalog role tag an entity must carry for this question in a
    /// role-tagged catalog.
    pub fn role(self) -> &'static str {
        match self {
            QuestionKind::Who => "agent",
            QuestionKind::Where => "location",
            QuestionKind::What => "subject",
            QuestionKind::Which => "selector",
            QuestionKind::How => "measure",
        }
    }

    /// `what` and `which` take one or two items; the others any number.
    pub fn max_items(self) -> Option<usize> {
        match self {
            QuestionKind::What | QuestionKind::Which => Some(2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetOpKind {
    Union,
    Inters,
    Differ,
}

impl SetOpKind {
    pub const ALL: [SetOpKind; 3] = [SetOpKind::Union, SetOpKind::Inters, SetOpKind::Differ];

    pub fn keyword(self) -> &'static str {
        match self {
            SetOpKind::Union => "Union",
            SetOpKind::Inters => "Inters",
            SetOpKind::Differ => "Differ",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileEntry {
    pub object: String,
    pub weight: u64,
}

/// A parsed query: exactly one operator form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAst {
    Select(Vec<ObjectItem>),
    Question { kind: QuestionKind, items: Vec<ObjectItem> },
    Cons { object: String, predicates: Vec<Predicate> },
    Semant { object: String, term: String },
    Profile(Vec<ProfileEntry>),
    SetOp { kind: SetOpKind, items: Vec<ObjectItem> },
}

impl QueryAst {
    /// The leading keyword of the canonical form.
    pub fn keyword(&self) -> &'static str {
        match self {
            QueryAst::Select(_) => "Se",
            QueryAst::Question { kind, .. } => kind.keyword(),
            QueryAst::Cons { .. } => "Cons",
            QueryAst::Semant { .. } => "Semant",
            QueryAst::Profile(_) => "profile",
            QueryAst::SetOp { kind, .. } => kind.keyword(),
        }
    }
}
