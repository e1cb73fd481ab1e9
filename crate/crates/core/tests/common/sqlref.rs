//! A small reference SQL interpreter for the statements the translator
//! emits: SELECT lists with SUM/COUNT/AVG, WHERE conjunctions of numeric
//! comparisons, GROUP BY, and UNION [ALL] / INTERSECT / EXCEPT chains.
//!
//! It shares no code with the crate: tables are read from a directory of
//! comma-separated files with a naive line splitter and typed on their own.

use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Null,
    Num(f64),
    Text(String),
}

impl Cell {
    fn rank(&self) -> u8 {
        match self {
            Cell::Null => 0,
            Cell::Num(_) => 1,
            Cell::Text(_) => 2,
        }
    }

    pub fn total_cmp(&self, other: &Cell) -> std::cmp::Ordering {
        match (self, other) {
            (Cell::Num(a), Cell::Num(b)) => a.total_cmp(b),
            (Cell::Text(a), Cell::Text(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn sort_rows(rows: &mut [Vec<Cell>]) {
    rows.sort_by(|a, b| {
        for (x, y) in a.iter().zip(b) {
            let o = x.total_cmp(y);
            if o.is_ne() {
                return o;
            }
        }
        a.len().cmp(&b.len())
    });
}

fn dedup(rows: Vec<Vec<Cell>>) -> Vec<Vec<Cell>> {
    let mut out: Vec<Vec<Cell>> = Vec::new();
    for r in rows {
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Loads every `*.csv` in `dir` as a table named after the file stem.
pub fn load_dir(dir: &Path) -> BTreeMap<String, Table> {
    let mut tables = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let columns: Vec<String> = lines.next().unwrap().split(',').map(str::to_string).collect();
        let raw: Vec<Vec<&str>> = lines.filter(|l| !l.is_empty()).map(|l| l.split(',').collect()).collect();
        let numeric: Vec<bool> = (0..columns.len())
            .map(|i| {
                let cells: Vec<&str> = raw.iter().map(|r| r[i]).filter(|c| !c.is_empty()).collect();
                !cells.is_empty() && cells.iter().all(|c| c.parse::<f64>().is_ok())
            })
            .collect();
        let rows = raw
            .iter()
            .map(|r| {
                r.iter()
                    .zip(&numeric)
                    .map(|(c, &n)| match (c.is_empty(), n) {
                        (true, _) => Cell::Null,
                        (false, true) => Cell::Num(c.parse().unwrap()),
                        (false, false) => Cell::Text(c.to_string()),
                    })
                    .collect()
            })
            .collect();
        let name = path.file_stem().unwrap().to_str().unwrap().to_string();
        tables.insert(name, Table { columns, rows });
    }
    tables
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Sym(String),
}

fn lex(sql: &str) -> Vec<Tok> {
    let chars: Vec<char> = sql.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == ' ' {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Word(chars[s..i].iter().collect()));
        } else if c.is_ascii_digit() {
            let s = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            out.push(Tok::Num(chars[s..i].iter().collect::<String>().parse().unwrap()));
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            if ["<>", "<=", ">="].contains(&two.as_str()) {
                out.push(Tok::Sym(two));
                i += 2;
            } else {
                assert!("(),*<>=+-/".contains(c), "unexpected character {c:?} in {sql}");
                out.push(Tok::Sym(c.to_string()));
                i += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
enum Item {
    Star,
    Col(String),
    Agg(String, Option<String>),
}

#[derive(Debug, Clone)]
enum Ex {
    Num(f64),
    Neg(Box<Ex>),
    Bin(char, Box<Ex>, Box<Ex>),
}

impl Ex {
    fn eval(&self) -> f64 {
        match self {
            Ex::Num(n) => *n,
            Ex::Neg(e) => -e.eval(),
            Ex::Bin(op, a, b) => {
                let (a, b) = (a.eval(), b.eval());
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => a / b,
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Select {
    items: Vec<Item>,
    table: String,
    conds: Vec<(String, String, Ex)>,
    group: Vec<String>,
}

struct P {
    toks: Vec<Tok>,
    pos: usize,
}

impl P {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }
    fn word(&mut self) -> String {
        match self.next() {
            Tok::Word(w) => w,
            t => panic!("expected word, got {t:?}"),
        }
    }
    fn kw(&mut self, k: &str) {
        assert_eq!(self.word(), k);
    }
    fn sym(&mut self, s: &str) {
        assert_eq!(self.next(), Tok::Sym(s.into()));
    }
    fn at_word(&self, k: &str) -> bool {
        self.peek() == Some(&Tok::Word(k.into()))
    }
    fn at_sym(&self, s: &str) -> bool {
        self.peek() == Some(&Tok::Sym(s.into()))
    }

    fn select(&mut self) -> Select {
        self.kw("SELECT");
        let mut items = vec![self.item()];
        while self.at_sym(",") {
            self.next();
            items.push(self.item());
        }
        self.kw("FROM");
        let table = self.word();
        let mut conds = Vec::new();
        if self.at_word("WHERE") {
            self.next();
            loop {
                let col = self.word();
                let op = match self.next() {
                    Tok::Sym(s) => s,
                    t => panic!("expected comparator, got {t:?}"),
                };
                conds.push((col, op, self.expr()));
                if !self.at_word("AND") {
                    break;
                }
                self.next();
            }
        }
        let mut group = Vec::new();
        if self.at_word("GROUP") {
            self.next();
            self.kw("BY");
            group.push(self.word());
            while self.at_sym(",") {
                self.next();
                group.push(self.word());
            }
        }
        Select { items, table, conds, group }
    }

    fn item(&mut self) -> Item {
        if self.at_sym("*") {
            self.next();
            return Item::Star;
        }
        let w = self.word();
        if ["SUM", "COUNT", "AVG"].contains(&w.as_str()) && self.at_sym("(") {
            self.next();
            let arg = if self.at_sym("*") {
                self.next();
                None
            } else {
                Some(self.word())
            };
            self.sym(")");
            Item::Agg(w, arg)
        } else {
            Item::Col(w)
        }
    }

    fn expr(&mut self) -> Ex {
        let mut lhs = self.term();
        while self.at_sym("+") || self.at_sym("-") {
            let op = if self.at_sym("+") { '+' } else { '-' };
            self.next();
            lhs = Ex::Bin(op, Box::new(lhs), Box::new(self.term()));
        }
        lhs
    }

    fn term(&mut self) -> Ex {
        let mut lhs = self.atom();
        while self.at_sym("*") || self.at_sym("/") {
            let op = if self.at_sym("*") { '*' } else { '/' };
            self.next();
            lhs = Ex::Bin(op, Box::new(lhs), Box::new(self.atom()));
        }
        lhs
    }

    fn atom(&mut self) -> Ex {
        match self.next() {
            Tok::Num(n) => Ex::Num(n),
            Tok::Sym(s) if s == "-" => Ex::Neg(Box::new(self.atom())),
            Tok::Sym(s) if s == "(" => {
                let e = self.expr();
                self.sym(")");
                e
            }
            t => panic!("unexpected {t:?} in expression"),
        }
    }
}

fn col(t: &Table, name: &str) -> usize {
    t.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn holds(cell: &Cell, op: &str, rhs: f64) -> bool {
    let Cell::Num(x) = cell else { return false };
    match op {
        "=" => *x == rhs,
        "<>" => *x != rhs,
        "<" => *x < rhs,
        "<=" => *x <= rhs,
        ">" => *x > rhs,
        ">=" => *x >= rhs,
        _ => panic!("bad comparator {op}"),
    }
}

fn agg(kind: &str, rows: &[&Vec<Cell>], i: Option<usize>) -> Cell {
    let Some(i) = i else { return Cell::Num(rows.len() as f64) };
    let vals: Vec<&Cell> = rows.iter().map(|r| &r[i]).filter(|c| **c != Cell::Null).collect();
    match kind {
        "COUNT" => Cell::Num(vals.len() as f64),
        _ if vals.is_empty() => Cell::Null,
        _ => {
            let sum: f64 =
                vals.iter().map(|c| if let Cell::Num(x) = c { *x } else { panic!("non-numeric aggregate") }).sum();
            if kind == "SUM" {
                Cell::Num(sum)
            } else {
                Cell::Num(sum / vals.len() as f64)
            }
        }
    }
}

fn item_name(item: &Item) -> String {
    match item {
        Item::Star => "*".into(),
        Item::Col(c) => c.clone(),
        Item::Agg(k, Some(c)) => format!("{k}({c})"),
        Item::Agg(k, None) => format!("{k}(*)"),
    }
}

fn eval_select(s: &Select, tables: &BTreeMap<String, Table>) -> Table {
    let t = &tables[&s.table];
    let rows: Vec<&Vec<Cell>> =
        t.rows.iter().filter(|r| s.conds.iter().all(|(c, op, e)| holds(&r[col(t, c)], op, e.eval()))).collect();
    let columns: Vec<String> = s
        .items
        .iter()
        .flat_map(|i| match i {
            Item::Star => t.columns.clone(),
            other => vec![item_name(other)],
        })
        .collect();
    let has_agg = s.items.iter().any(|i| matches!(i, Item::Agg(..)));
    if !has_agg {
        let out = rows
            .iter()
            .map(|r| {
                s.items
                    .iter()
                    .flat_map(|i| match i {
                        Item::Star => (*r).clone(),
                        Item::Col(c) => vec![r[col(t, c)].clone()],
                        Item::Agg(..) => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        return Table { columns, rows: out };
    }
    let mut groups: Vec<(Vec<Cell>, Vec<&Vec<Cell>>)> = Vec::new();
    if s.group.is_empty() {
        groups.push((Vec::new(), rows));
    } else {
        for r in rows {
            let key: Vec<Cell> = s.group.iter().map(|g| r[col(t, g)].clone()).collect();
            match groups.iter_mut().find(|(k, _)| *k == key) {
                Some((_, members)) => members.push(r),
                None => groups.push((key, vec![r])),
            }
        }
    }
    let out = groups
        .iter()
        .map(|(_, members)| {
            s.items
                .iter()
                .map(|i| match i {
                    Item::Col(c) => members[0][col(t, c)].clone(),
                    Item::Agg(k, arg) => agg(k, members, arg.as_ref().map(|a| col(t, a))),
                    Item::Star => panic!("* with aggregates"),
                })
                .collect()
        })
        .collect();
    Table { columns, rows: out }
}

/// Evaluates `sql` over `tables`. Chains of set operators apply left to
/// right.
pub fn eval(sql: &str, tables: &BTreeMap<String, Table>) -> Table {
    let mut p = P { toks: lex(sql), pos: 0 };
    let mut acc = eval_select(&p.select(), tables);
    while let Some(tok) = p.peek().cloned() {
        let Tok::Word(op) = tok else { panic!("trailing {tok:?}") };
        p.next();
        let all = op == "UNION" && p.at_word("ALL");
        if all {
            p.next();
        }
        let rhs = eval_select(&p.select(), tables);
        assert_eq!(acc.columns.len(), rhs.columns.len(), "set operand widths differ in {sql}");
        acc.rows = match (op.as_str(), all) {
            ("UNION", true) => acc.rows.into_iter().chain(rhs.rows).collect(),
            ("UNION", false) => dedup(acc.rows.into_iter().chain(rhs.rows).collect()),
            ("INTERSECT", _) => dedup(acc.rows.into_iter().filter(|r| rhs.rows.contains(r)).collect()),
            ("EXCEPT", _) => dedup(acc.rows.into_iter().filter(|r| !rhs.rows.contains(r)).collect()),
            _ => panic!("unknown set operator {op}"),
        };
    }
    acc
}

/// Whether `sql` parses under this interpreter's grammar.
pub fn parses(sql: &str) -> bool {
    std::panic::catch_unwind(|| {
        let mut p = P { toks: lex(sql), pos: 0 };
        p.select();
        while let Some(Tok::Word(op)) = p.peek().cloned() {
            p.next();
            if op == "UNION" && p.at_word("ALL") {
                p.next();
            }
            p.select();
        }
        p.pos == p.toks.len()
    })
    .unwrap_or(false)
}
