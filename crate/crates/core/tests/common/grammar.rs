//! Random sentences of the query metalanguage, produced token by token from
//! the grammar with random whitespace between tokens.

use rand::seq::SliceRandom;
use rand::Rng;

const RESERVED: [&str; 16] = [
    "where", "who", "how", "Se", "what", "which", "Semant", "Cons", "profile", "Union", "Inters", "Differ", "Agg",
    "SUM", "COUNT", "AVG",
];
const COMPARATORS: [&str; 6] = ["=", "<>", "<", "<=", ">", ">="];

pub fn ident<R: Rng>(rng: &mut R) -> String {
    const HEAD: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
    const TAIL: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_";
    loop {
        let mut s = String::new();
        s.push(*HEAD.choose(rng).unwrap() as char);
        for _ in 0..rng.gen_range(0..7) {
            s.push(*TAIL.choose(rng).unwrap() as char);
        }
        if !RESERVED.contains(&s.as_str()) {
            return s;
        }
    }
}

fn number<R: Rng>(rng: &mut R) -> String {
    match rng.gen_range(0..10) {
        0 => format!("0{}", rng.gen_range(0..100)),
        1 => rng.gen_range(0..=u64::MAX).to_string(),
        _ => rng.gen_range(0..1000).to_string(),
    }
}

fn object<R: Rng>(rng: &mut R, out: &mut Vec<String>) {
    out.push(ident(rng));
    if rng.gen_bool(0.5) {
        out.push(".".into());
        out.push(ident(rng));
    }
}

fn seitem<R: Rng>(rng: &mut R, out: &mut Vec<String>) {
    object(rng, out);
    if rng.gen_bool(0.4) {
        out.push("Agg".into());
        out.push(["SUM", "COUNT", "AVG"].choose(rng).unwrap().to_string());
    }
}

fn expr<R: Rng>(rng: &mut R, depth: u32, out: &mut Vec<String>) {
    term(rng, depth, out);
    for _ in 0..rng.gen_range(0..3) {
        out.push(["+", "-"].choose(rng).unwrap().to_string());
        term(rng, depth, out);
    }
}

fn term<R: Rng>(rng: &mut R, depth: u32, out: &mut Vec<String>) {
    factor(rng, depth, out);
    for _ in 0..rng.gen_range(0..3) {
        out.push(["*", "/"].choose(rng).unwrap().to_string());
        factor(rng, depth, out);
    }
}

fn factor<R: Rng>(rng: &mut R, depth: u32, out: &mut Vec<String>) {
    match rng.gen_range(0..3) {
        0 if depth > 0 => {
            out.push("(".into());
            expr(rng, depth - 1, out);
            out.push(")".into());
        }
        1 => out.push(ident(rng)),
        _ => out.push(number(rng)),
    }
}

fn list<R: Rng>(rng: &mut R, out: &mut Vec<String>, n: usize, mut item: impl FnMut(&mut R, &mut Vec<String>)) {
    for i in 0..n {
        if i > 0 {
            out.push(",".into());
        }
        item(rng, out);
    }
}

/// Tokens of one random sentence.
pub fn sentence_tokens<R: Rng>(rng: &mut R) -> Vec<String> {
    let mut out = Vec::new();
    match rng.gen_range(0..6) {
        0 => {
            out.extend(["Se".to_string(), "(".into()]);
            let n = rng.gen_range(1..5);
            list(rng, &mut out, n, seitem);
        }
        1 => {
            let kw = *["who", "where", "what", "which", "how"].choose(rng).unwrap();
            out.extend([kw.to_string(), "(".into()]);
            let n = if matches!(kw, "what" | "which") { rng.gen_range(1..3) } else { rng.gen_range(1..5) };
            list(rng, &mut out, n, object);
        }
        2 => {
            out.extend(["Cons".to_string(), "(".into(), ident(rng)]);
            for _ in 0..rng.gen_range(0..4) {
                out.extend([",".to_string(), ident(rng), COMPARATORS.choose(rng).unwrap().to_string()]);
                expr(rng, 3, &mut out);
            }
        }
        3 => out.extend(["Semant".to_string(), "(".into(), ident(rng), ".".into(), ident(rng)]),
        4 => {
            out.extend(["profile".to_string(), "(".into()]);
            let n = rng.gen_range(1..5);
            list(rng, &mut out, n, |rng, out| {
                out.push(ident(rng));
                if rng.gen_bool(0.5) {
                    out.push(".".into());
                    out.push(number(rng));
                }
            });
        }
        _ => {
            let kw = *["Union", "Inters", "Differ"].choose(rng).unwrap();
            out.extend([kw.to_string(), "(".into()]);
            let n = if kw == "Differ" { 2 } else { rng.gen_range(2..5) };
            list(rng, &mut out, n, object);
        }
    }
    out.push(")".into());
    out
}

fn wordlike(tok: &str) -> bool {
    tok.bytes().next().is_some_and(|b| b.is_ascii_alphanumeric())
}

/// Joins tokens with random whitespace; adjacent words always get at least
/// one separator.
pub fn render<R: Rng>(rng: &mut R, tokens: &[String]) -> String {
    let mut s = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        if i > 0 {
            let gap = *["", "", " ", " ", "  ", "\n", "\t ", "\r\n"].choose(rng).unwrap();
            let gap = if gap.is_empty() && wordlike(&tokens[i - 1]) && wordlike(tok) { " " } else { gap };
            s.push_str(gap);
        }
        s.push_str(tok);
    }
    s
}

pub fn sentence<R: Rng>(rng: &mut R) -> String {
    let tokens = sentence_tokens(rng);
    render(rng, &tokens)
}
