use std::collections::{BTreeMap, BTreeSet};

use super::{AdapterError, Format, SourceDescriptor};
use crate::value::{Column, ColumnType, ResultSet, Value};

/// Shortest word kept by [`build_semantic_net`], in characters.
pub const MIN_TERM_LEN: usize = 3;

fn read_text(src: &SourceDescriptor) -> Result<String, AdapterError> {
    src.require("txt", src.format == Format::Txt)?;
    std::fs::read_to_string(src.path()).map_err(|e| AdapterError::io(src.path(), e))
}

/// Non-empty lines of a text source as a single `content` column.
pub fn read_lines(src: &SourceDescriptor) -> Result<ResultSet, AdapterError> {
    let text = read_text(src)?;
    let mut rs = ResultSet::new(vec![Column::new("content", ColumnType::Text)]);
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        rs.push(vec![Value::text(line)], &src.id);
    }
    Ok(rs)
}

fn contains_word(line: &str, word: &str) -> bool {
    let line = line.to_lowercase();
    let is_word_char = |c: Option<char>| c.is_some_and(char::is_alphanumeric);
    line.match_indices(word).any(|(at, m)| {
        !is_word_char(line[..at].chars().next_back()) && !is_word_char(line[at + m.len()..].chars().next())
    })
}

/// Lines containing `keyword` as a whole word, ignoring case, in file order.
/// Columns are `file`, `line` (1-based) and `snippet` (the trimmed line).
pub fn keyword_search(src: &SourceDescriptor, keyword: &str) -> Result<ResultSet, AdapterError> {
    let text = read_text(src)?;
    let mut rs = ResultSet::new(vec![
        Column::new("file", ColumnType::Text),
        Column::new("line", ColumnType::Number),
        Column::new("snippet", ColumnType::Text),
    ]);
    let word = keyword.trim().to_lowercase();
    if word.is_empty() {
        return Ok(rs);
    }
    for (i, line) in text.lines().enumerate() {
        if contains_word(line, &word) {
            rs.push(
                vec![Value::text(src.location.as_str()), Value::number((i + 1) as f64), Value::text(line.trim())],
                &src.id,
            );
        }
    }
    Ok(rs)
}

/// Undirected, weighted term co-occurrence graph. Sentence-level
/// co-occurrence is a simple stand-in for real text analysis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SemanticNet {
    pub nodes: BTreeSet<String>,
    /// Keyed by the ordered pair `(a, b)` with `a < b`.
    pub edges: BTreeMap<(String, String), u64>,
}

impl SemanticNet {
    fn key(a: &str, b: &str) -> (String, String) {
        if a <= b {
            (a.to_string(), b.to_string())
        } else {
            (b.to_string(), a.to_string())
        }
    }

    /// Weight of the edge between `a` and `b`, 0 when absent.
    pub fn weight(&self, a: &str, b: &str) -> u64 {
        self.edges.get(&Self::key(a, b)).copied().unwrap_or(0)
    }

    /// Neighbors of `term` by descending weight, ties broken by term.
    pub fn neighbors(&self, term: &str) -> Vec<(String, u64)> {
        let term = term.to_lowercase();
        let mut out: Vec<(String, u64)> = self
            .edges
            .iter()
            .filter_map(|((a, b), w)| {
                if *a == term {
                    Some((b.clone(), *w))
                } else if *b == term {
                    Some((a.clone(), *w))
                } else {
                    None
                }
            })
            .collect();
        out.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
        out
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Adds one sentence: every pair of distinct qualifying words gains 1.
    pub fn add_sentence(&mut self, sentence: &str) {
        let terms: BTreeSet<String> = sentence
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| w.chars().count() >= MIN_TERM_LEN)
            .map(str::to_lowercase)
            .collect();
        let terms: Vec<String> = terms.into_iter().collect();
        for (i, a) in terms.iter().enumerate() {
            for b in &terms[i + 1..] {
                *self.edges.entry((a.clone(), b.clone())).or_insert(0) += 1;
            }
        }
        self.nodes.extend(terms);
    }

    pub fn from_text(text: &str) -> SemanticNet {
        let mut net = SemanticNet::default();
        for sentence in text.split(['.', '!', '?']) {
            net.add_sentence(sentence);
        }
        net
    }
}

/// Builds the co-occurrence net of a text source, one window per sentence.
/// Sentences end at `.`, `!` or `?`.
pub fn build_semantic_net(src: &SourceDescriptor) -> Result<SemanticNet, AdapterError> {
    Ok(SemanticNet::from_text(&read_text(src)?))
}
