//! Recursive-descent parser for the query metalanguage.
//!
//! Grammar accepted (keywords case-sensitive):
//!
//! ```text
//! query     := select | question | cons | semant | profile | setop
//! select    := "Se" "(" seitem { "," seitem } ")"
//! seitem    := ident [ "." ident ] [ "Agg" ( "SUM" | "COUNT" | "AVG" ) ]
//! question  := ( "who" | "where" | "how" ) "(" item { "," item } ")"
//!            | ( "what" | "which" ) "(" item [ "," item ] ")"
//! item      := ident [ "." ident ]
//! cons      := "Cons" "(" ident { "," predicate } ")"
//! predicate := ident comparator expr
//! semant    := "Semant" "(" ident "." ident ")"
//! profile   := "profile" "(" ident [ "." number ] { "," ident [ "." number ] } ")"
//! setop     := ( "Union" | "Inters" ) "(" item "," item { "," item } ")"
//!            | "Differ" "(" item "," item ")"
//! expr      := term { ( "+" | "-" ) term }
//! term      := factor { ( "*" | "/" ) factor }
//! factor    := "(" expr ")" | number | ident
//! ```

use super::ast::*;
use super::lexer::{tokenize, Token, TokenKind};
use super::SyntaxError;

/// Weight assigned to a `profile` entry written without one.
pub const DEFAULT_PROFILE_WEIGHT: u64 = 1;

pub fn parse(text: &str) -> Result<QueryAst, SyntaxError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens: &tokens, pos: 0, end: text.len() };
    let query = parser.query()?;
    if let Some(tok) = parser.peek() {
        return Err(SyntaxError::Parse {
            expected: "end of input".into(),
            found: describe(tok),
            offset: tok.span.start,
        });
    }
    Ok(query)
}

fn describe(tok: &Token) -> String {
    format!("`{}`", tok.text)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.span.start)
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError::Parse {
            expected: expected.to_string(),
            found: self.peek().map_or_else(|| "end of input".to_string(), describe),
            offset: self.offset(),
        })
    }

    fn next_if(&mut self, kind: TokenKind, text: Option<&str>) -> Option<&'t Token> {
        let tok = self.peek()?;
        if tok.kind == kind && text.is_none_or(|t| tok.text == t) {
            self.pos += 1;
            Some(tok)
        } else {
            None
        }
    }

    fn expect(&mut self, kind: TokenKind, text: &str) -> Result<&'t Token, SyntaxError> {
        match self.next_if(kind, Some(text)) {
            Some(tok) => Ok(tok),
            None => self.unexpected(&format!("`{text}`")),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.next_if(TokenKind::Ident, None) {
            Some(tok) => Ok(tok.text.clone()),
            None => self.unexpected(what),
        }
    }

    fn number(&mut self) -> Result<u64, SyntaxError> {
        let offset = self.offset();
        match self.next_if(TokenKind::Number, None) {
            Some(tok) => tok.text.parse().map_err(|_| SyntaxError::Parse {
                expected: "a number that fits in 64 bits".into(),
                found: describe(tok),
                offset,
            }),
            None => self.unexpected("a number"),
        }
    }

    fn query(&mut self) -> Result<QueryAst, SyntaxError> {
        // `Agg` is a keyword but cannot start a query.
        let Some(kw) = self.peek().filter(|t| t.kind == TokenKind::Keyword && t.text != "Agg") else {
            return self.unexpected("an operator keyword");
        };
        self.pos += 1;
        let keyword = kw.text.as_str();
        let open = self.expect(TokenKind::LParen, "(")?;
        if self.next_if(TokenKind::RParen, None).is_some() {
            return Err(SyntaxError::EmptyArgList { operator: keyword.to_string(), offset: open.span.start });
        }
        let query = match keyword {
            "Se" => QueryAst::Select(self.items(true, None, 1)?),
            "Cons" => self.cons()?,
            "Semant" => {
                let object = self.ident("an object name")?;
                self.expect(TokenKind::Dot, ".")?;
                let term = self.ident("a term")?;
                QueryAst::Semant { object, term }
            }
            "profile" => QueryAst::Profile(self.profile_entries()?),
            "Union" => QueryAst::SetOp { kind: SetOpKind::Union, items: self.items(false, None, 2)? },
            "Inters" => QueryAst::SetOp { kind: SetOpKind::Inters, items: self.items(false, None, 2)? },
            "Differ" => QueryAst::SetOp { kind: SetOpKind::Differ, items: self.items(false, Some(2), 2)? },
            other => {
                let kind = QuestionKind::ALL
                    .into_iter()
                    .find(|k| k.keyword() == other)
                    .expect("remaining operator keywords are questions");
                QueryAst::Question { kind, items: self.items(false, kind.max_items(), 1)? }
            }
        };
        self.expect(TokenKind::RParen, ")")?;
        Ok(query)
    }

    fn items(&mut self, allow_agg: bool, max: Option<usize>, min: usize) -> Result<Vec<ObjectItem>, SyntaxError> {
        let mut items = vec![self.item(allow_agg)?];
        loop {
            if max.is_some_and(|m| items.len() >= m) {
                break;
            }
            if self.next_if(TokenKind::Comma, None).is_none() {
                break;
            }
            items.push(self.item(allow_agg)?);
        }
        if items.len() < min {
            return self.unexpected(&format!("`,` (at least {min} items required)"));
        }
        Ok(items)
    }

    fn item(&mut self, allow_agg: bool) -> Result<ObjectItem, SyntaxError> {
        let object = self.ident("an object name")?;
        let par = match self.next_if(TokenKind::Dot, None) {
            Some(_) => Some(self.ident("an attribute or synonym")?),
            None => None,
        };
        let agg = if allow_agg && self.next_if(TokenKind::Keyword, Some("Agg")).is_some() {
            match self.next_if(TokenKind::AggKind, None) {
                Some(tok) => AggKind::from_keyword(&tok.text),
                None => return self.unexpected("SUM, COUNT or AVG"),
            }
        } else {
            None
        };
        Ok(ObjectItem { object, par, agg })
    }

    fn cons(&mut self) -> Result<QueryAst, SyntaxError> {
        let object = self.ident("an object name")?;
        let mut predicates = Vec::new();
        while self.next_if(TokenKind::Comma, None).is_some() {
            let attribute = self.ident("an attribute name")?;
            let comparator = match self.next_if(TokenKind::Comparator, None) {
                Some(tok) => Comparator::from_symbol(&tok.text).expect("lexer only emits known comparators"),
                None => return self.unexpected("a comparator"),
            };
            let rhs = self.expr()?;
            predicates.push(Predicate { attribute, comparator, rhs });
        }
        Ok(QueryAst::Cons { object, predicates })
    }

    fn profile_entries(&mut self) -> Result<Vec<ProfileEntry>, SyntaxError> {
        let mut entries = Vec::new();
        loop {
            let object = self.ident("an object name")?;
            let weight = match self.next_if(TokenKind::Dot, None) {
                Some(_) => self.number()?,
                None => DEFAULT_PROFILE_WEIGHT,
            };
            entries.push(ProfileEntry { object, weight });
            if self.next_if(TokenKind::Comma, None).is_none() {
                return Ok(entries);
            }
        }
    }

    fn arith(&mut self, ops: [ArithOp; 2]) -> Option<ArithOp> {
        let tok = self.peek()?;
        if tok.kind != TokenKind::ArithOp {
            return None;
        }
        let op = ArithOp::from_symbol(tok.text.chars().next()?)?;
        if ops.contains(&op) {
            self.pos += 1;
            Some(op)
        } else {
            None
        }
    }

    fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.term()?;
        while let Some(op) = self.arith([ArithOp::Add, ArithOp::Sub]) {
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        while let Some(op) = self.arith([ArithOp::Mul, ArithOp::Div]) {
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        if self.next_if(TokenKind::LParen, None).is_some() {
            let inner = self.expr()?;
            self.expect(TokenKind::RParen, ")")?;
            return Ok(Expr::paren(inner));
        }
        if self.peek().is_some_and(|t| t.kind == TokenKind::Number) {
            return self.number().map(Expr::Number);
        }
        match self.next_if(TokenKind::Ident, None) {
            Some(tok) => Ok(Expr::Param(tok.text.clone())),
            None => self.unexpected("a number, parameter or `(`"),
        }
    }
}
