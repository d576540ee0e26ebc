//! The line-oriented grammar text format.
//!
//! ```text
//! S -> <CP_matrix, CP_matrix>
//! TP -> <NP_SUBJ TBAR, TBAR NP_SUBJ>
//! VP -> < VBAR, VBAR >
//! V -> <'rofxew', 'tuvrol'>
//! T -> <'\u2205_T_pres', '\u2205_T_pres'>
//! ```
//!
//! Terminals are single-quoted and cannot contain quotes. The null symbol is
//! written as the escape `\u2205`; any `\uXXXX` escape is accepted on input.
//! A rule may wrap onto following lines while its angle bracket is open.

use super::{GrammarError, Symbol, SyncGrammar, SyncRule, NULL_SYMBOL};

pub fn parse_grammar_text(text: &str) -> Result<SyncGrammar, GrammarError> {
    let mut rules = Vec::new();
    let mut pending: Option<(usize, String)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        let (start, joined) = match pending.take() {
            Some((start, mut acc)) => {
                if !line.is_empty() {
                    acc.push(' ');
                    acc.push_str(line);
                }
                (start, acc)
            }
            None if line.is_empty() => continue,
            None => (line_no, line.to_string()),
        };
        if bracket_open(&joined) {
            pending = Some((start, joined));
            continue;
        }
        rules.push(parse_rule(&joined).map_err(|message| GrammarError::Syntax { line: start, message })?);
    }
    if let Some((start, _)) = pending {
        return Err(GrammarError::Syntax {
            line: start,
            message: "unterminated rule".into(),
        });
    }
    SyncGrammar::new(rules)
}

pub fn serialize_grammar(g: &SyncGrammar) -> String {
    let mut out = String::new();
    for r in g.rules() {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

pub(super) fn format_side(side: &[Symbol]) -> String {
    side.iter()
        .map(|s| match s {
            Symbol::Nonterminal(n) => n.clone(),
            Symbol::Terminal(t) => format!("'{}'", escape(t)),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn escape(t: &str) -> String {
    t.replace(NULL_SYMBOL, "\\u2205")
}

fn unescape(t: &str) -> Result<String, String> {
    let mut out = String::with_capacity(t.len());
    let mut chars = t.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('u') => {
                let hex: String = chars.by_ref().take(4).collect();
                let cp = u32::from_str_radix(&hex, 16)
                    .ok()
                    .filter(|_| hex.len() == 4)
                    .and_then(char::from_u32)
                    .ok_or_else(|| format!("bad escape \\u{hex}"))?;
                out.push(cp);
            }
            other => return Err(format!("bad escape \\{}", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

/// True while a `<` opened outside quotes has not been closed.
fn bracket_open(s: &str) -> bool {
    let Some((_, rhs)) = s.split_once("->") else {
        return false;
    };
    let mut depth = 0i32;
    let mut quoted = false;
    for c in rhs.chars() {
        match c {
            '\'' => quoted = !quoted,
            '<' if !quoted => depth += 1,
            '>' if !quoted => depth -= 1,
            _ => {}
        }
    }
    depth > 0 || quoted
}

#[derive(Debug, PartialEq)]
enum Token {
    Bare(String),
    Quoted(String),
    Comma,
}

fn parse_rule(line: &str) -> Result<SyncRule, String> {
    let (lhs, rhs) = line.split_once("->").ok_or_else(|| "expected `->`".to_string())?;
    let lhs = lhs.trim();
    if lhs.is_empty() {
        return Err("missing left-hand side".into());
    }
    let rhs = rhs.trim();
    let inner = rhs
        .strip_prefix('<')
        .and_then(|r| r.strip_suffix('>'))
        .ok_or_else(|| "right-hand side must be `<side, side>`".to_string())?;
    let padded = inner.starts_with(' ');

    let tokens = tokenize(inner)?;
    let mut sides: Vec<Vec<Symbol>> = vec![Vec::new()];
    for tok in tokens {
        match tok {
            Token::Comma => sides.push(Vec::new()),
            Token::Quoted(t) => sides.last_mut().unwrap().push(Symbol::Terminal(unescape(&t)?)),
            Token::Bare(n) => sides
                .last_mut()
                .unwrap()
                .push(Symbol::nonterminal(n).map_err(|e| e.to_string())?),
        }
    }
    if sides.len() != 2 {
        return Err(format!("expected two sides, found {}", sides.len()));
    }
    let tgt = sides.pop().unwrap();
    let src = sides.pop().unwrap();
    SyncRule::new(lhs, src, tgt)
        .map(|r| r.with_padding(padded))
        .map_err(|e| e.to_string())
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            ',' => {
                chars.next();
                out.push(Token::Comma);
            }
            '\'' => {
                chars.next();
                let mut t = String::new();
                loop {
                    match chars.next() {
                        Some('\'') => break,
                        Some(c) => t.push(c),
                        None => return Err("unterminated terminal".into()),
                    }
                }
                out.push(Token::Quoted(t));
            }
            _ => {
                let mut t = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == ',' || c == '\'' {
                        break;
                    }
                    t.push(c);
                    chars.next();
                }
                out.push(Token::Bare(t));
            }
        }
    }
    Ok(out)
}
