//! ASCII syntax for words, presentations and move lists.
//!
//! Free generators are `a`..`r` (inverses `A`..`R`); finite factors are
//! `s1`, `s2^2`, ... with 1-based factor numbering. `1` denotes the identity.
//! An optional integer power `^n` may follow any letter.

use super::{Automorphism, GroupPresentation, Move, ReducedWord};
use crate::error::{Error, Result};

const FREE_LETTERS: &[u8] = b"abcdefghijklmnopqr";

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
}

impl Cursor {
    fn new(src: &str, line: usize, col0: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
            col0,
        }
    }

    fn col(&self) -> usize {
        self.col0 + self.pos + 1
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.col(), msg)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace() || c == '.' || c == '*') {
            self.pos += 1;
        }
    }

    fn number(&mut self) -> Result<i64> {
        let start = self.pos;
        let mut neg = false;
        if self.peek() == Some('-') {
            neg = true;
            self.pos += 1;
        } else if self.peek() == Some('+') {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.err("expected an integer"));
        }
        let s: String = self.chars[digits_start..self.pos].iter().collect();
        let v: i64 = s.parse().map_err(|_| self.err("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn optional_power(&mut self) -> Result<i64> {
        if self.peek() == Some('^') {
            self.pos += 1;
            self.number()
        } else {
            Ok(1)
        }
    }
}

fn parse_word_at(p: &GroupPresentation, src: &str, line: usize, col0: usize) -> Result<ReducedWord> {
    let mut cur = Cursor::new(src, line, col0);
    let mut raw: Vec<(u32, i64)> = Vec::new();
    loop {
        cur.skip_ws();
        let Some(c) = cur.peek() else { break };
        let col = cur.col();
        if c == '1' {
            cur.pos += 1;
            continue;
        }
        if c == 's' {
            cur.pos += 1;
            let k = cur.number().map_err(|_| Error::parse(line, col, "expected factor number after 's'"))?;
            if k < 1 || k as usize > p.finite_orders.len() {
                return Err(Error::parse(
                    line,
                    col,
                    format!("finite factor s{k} not in presentation"),
                ));
            }
            let e = cur.optional_power()?;
            raw.push((p.finite_factor_index(k as usize - 1), e));
            continue;
        }
        let lower = c.to_ascii_lowercase();
        if let Some(i) = FREE_LETTERS.iter().position(|&b| b as char == lower) {
            if i >= p.free_rank {
                return Err(Error::parse(
                    line,
                    col,
                    format!("generator '{c}' exceeds free rank {}", p.free_rank),
                ));
            }
            cur.pos += 1;
            let e = cur.optional_power()?;
            let sign = if c.is_ascii_uppercase() { -1 } else { 1 };
            raw.push((i as u32, sign * e));
            continue;
        }
        return Err(Error::parse(line, col, format!("unexpected character '{c}'")));
    }
    p.reduce_powers(&raw)
}

pub fn parse_word(p: &GroupPresentation, src: &str) -> Result<ReducedWord> {
    parse_word_at(p, src, 1, 0)
}

/// One word per nonblank line; `#` starts a comment.
pub fn parse_words(p: &GroupPresentation, text: &str) -> Result<Vec<ReducedWord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_word_at(p, body, i + 1, 0)?);
    }
    Ok(out)
}

pub fn format_word(p: &GroupPresentation, w: &ReducedWord) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut s = String::with_capacity(w.len());
    for l in w.letters() {
        if p.is_free_factor(l.factor) {
            let c = FREE_LETTERS[l.factor as usize] as char;
            s.push(if l.exp < 0 { c.to_ascii_uppercase() } else { c });
        } else {
            let k = l.factor as usize - p.free_rank + 1;
            if !s.is_empty() && !s.ends_with(' ') {
                s.push(' ');
            }
            if l.exp == 1 {
                s.push_str(&format!("s{k} "));
            } else {
                s.push_str(&format!("s{k}^{} ", l.exp));
            }
        }
    }
    s.trim_end().to_string()
}

fn factor_name(p: &GroupPresentation, f: u32) -> String {
    if p.is_free_factor(f) {
        (FREE_LETTERS[f as usize] as char).to_string()
    } else {
        format!("s{}", f as usize - p.free_rank + 1)
    }
}

/// Parses a factor token: a lowercase free generator or `sK`.
fn parse_factor_token(
    p: &GroupPresentation,
    tok: &str,
    line: usize,
    col: usize,
) -> Result<(u32, bool)> {
    if let Some(rest) = tok.strip_prefix('s') {
        let k: usize = rest
            .parse()
            .map_err(|_| Error::parse(line, col, format!("bad factor token '{tok}'")))?;
        if k < 1 || k > p.finite_orders.len() {
            return Err(Error::parse(line, col, format!("factor '{tok}' not in presentation")));
        }
        return Ok((p.finite_factor_index(k - 1), false));
    }
    let mut cs = tok.chars();
    let (Some(c), None) = (cs.next(), cs.next()) else {
        return Err(Error::parse(line, col, format!("bad generator token '{tok}'")));
    };
    let lower = c.to_ascii_lowercase();
    match FREE_LETTERS.iter().position(|&b| b as char == lower) {
        Some(i) if i < p.free_rank => Ok((i as u32, c.is_ascii_uppercase())),
        _ => Err(Error::parse(line, col, format!("unknown generator '{tok}'"))),
    }
}

/// Parses a move list, one move per line.
pub fn parse_automorphism(p: &GroupPresentation, text: &str) -> Result<Automorphism> {
    let mut moves = Vec::new();
    for (li, raw_line) in text.lines().enumerate() {
        let line = li + 1;
        let body = raw_line.split('#').next().unwrap_or("");
        let trimmed = body.trim_start();
        let indent = body.len() - trimmed.len();
        let trimmed = trimmed.trim_end();
        if trimmed.is_empty() || trimmed == "id" {
            continue;
        }
        let op = trimmed.split_whitespace().next().unwrap_or(trimmed);
        let rest_col = indent + op.len() + 1;
        let args: Vec<(usize, &str)> = {
            let mut v = Vec::new();
            let mut offset = indent + op.len();
            let tail = &body[offset..];
            let mut scan = tail;
            while let Some(start) = scan.find(|c: char| !c.is_whitespace()) {
                let s = &scan[start..];
                let end = s.find(char::is_whitespace).unwrap_or(s.len());
                v.push((offset + start + 1, &s[..end]));
                offset += start + end;
                scan = &s[end..];
            }
            v
        };
        let need = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::parse(
                    line,
                    rest_col,
                    format!("'{op}' takes {n} argument(s), got {}", args.len()),
                ))
            }
        };
        let free_gen = |i: usize| -> Result<u32> {
            let (col, tok) = args[i];
            let (f, inv) = parse_factor_token(p, tok, line, col)?;
            if inv || !p.is_free_factor(f) {
                return Err(Error::parse(line, col, format!("expected a free generator, got '{tok}'")));
            }
            Ok(f)
        };
        let mv = match op {
            "inv" => {
                need(1)?;
                Move::Invert(free_gen(0)?)
            }
            "swap" => {
                need(2)?;
                Move::Swap(free_gen(0)?, free_gen(1)?)
            }
            "rmul" | "lmul" => {
                need(2)?;
                let target = free_gen(0)?;
                let (col, tok) = args[1];
                let (by, inverse) = parse_factor_token(p, tok, line, col)?;
                if !p.is_free_factor(by) {
                    return Err(Error::parse(line, col, "multiplier must be a free generator"));
                }
                if op == "rmul" {
                    Move::RightMul { target, by, inverse }
                } else {
                    Move::LeftMul { target, by, inverse }
                }
            }
            "conj" => {
                if args.is_empty() {
                    return Err(Error::parse(line, rest_col, "'conj' needs a factor and a word"));
                }
                let (col, tok) = args[0];
                let (factor, inv) = parse_factor_token(p, tok, line, col)?;
                if inv {
                    return Err(Error::parse(line, col, "factor must be named positively"));
                }
                let wcol = args.get(1).map(|a| a.0 - 1).unwrap_or(body.len());
                let word = parse_word_at(p, &body[wcol.min(body.len())..], line, wcol)?;
                Move::ConjugateFactor { factor, word }
            }
            "perm" => {
                need(2)?;
                let (c0, t0) = args[0];
                let (c1, t1) = args[1];
                let (k, _) = parse_factor_token(p, t0, line, c0)?;
                let (l, _) = parse_factor_token(p, t1, line, c1)?;
                Move::PermuteFactors(k, l)
            }
            "inner" => {
                let wcol = args.first().map(|a| a.0 - 1).unwrap_or(body.len());
                let word = parse_word_at(p, &body[wcol.min(body.len())..], line, wcol)?;
                Move::Inner(word)
            }
            other => {
                return Err(Error::parse(line, indent + 1, format!("unknown move '{other}'")));
            }
        };
        mv.validate(p)
            .map_err(|e| Error::parse(line, indent + 1, e.to_string()))?;
        moves.push(mv);
    }
    Ok(Automorphism::from_moves(moves))
}

/// Several automorphisms separated by lines holding only `---`; parse
/// errors report lines of the whole text.
pub fn parse_automorphism_list(p: &GroupPresentation, text: &str) -> Result<Vec<Automorphism>> {
    let mut out = Vec::new();
    let mut block = String::new();
    let mut first_line = 0;
    let flush = |block: &mut String, first_line: usize, out: &mut Vec<Automorphism>| -> Result<()> {
        if !block.trim().is_empty() {
            let phi = parse_automorphism(p, block).map_err(|e| match e {
                Error::Parse { line, column, message } => Error::Parse {
                    line: line + first_line,
                    column,
                    message,
                },
                e => e,
            })?;
            out.push(phi);
        }
        block.clear();
        Ok(())
    };
    for (i, line) in text.lines().enumerate() {
        if line.trim() == "---" {
            flush(&mut block, first_line, &mut out)?;
            first_line = i + 1;
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    flush(&mut block, first_line, &mut out)?;
    Ok(out)
}

pub fn format_automorphism(p: &GroupPresentation, phi: &Automorphism) -> String {
    let letter = |f: u32, inv: bool| {
        let n = factor_name(p, f);
        if inv {
            n.to_ascii_uppercase()
        } else {
            n
        }
    };
    let mut out = String::new();
    for m in &phi.moves {
        let line = match m {
            Move::Invert(i) => format!("inv {}", factor_name(p, *i)),
            Move::Swap(i, j) => format!("swap {} {}", factor_name(p, *i), factor_name(p, *j)),
            Move::RightMul { target, by, inverse } => {
                format!("rmul {} {}", factor_name(p, *target), letter(*by, *inverse))
            }
            Move::LeftMul { target, by, inverse } => {
                format!("lmul {} {}", factor_name(p, *target), letter(*by, *inverse))
            }
            Move::ConjugateFactor { factor, word } => {
                format!("conj {} {}", factor_name(p, *factor), format_word(p, word))
            }
            Move::PermuteFactors(k, l) => {
                format!("perm {} {}", factor_name(p, *k), factor_name(p, *l))
            }
            Move::Inner(w) => format!("inner {}", format_word(p, w)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    if out.is_empty() {
        out.push_str("id\n");
    }
    out
}

impl GroupPresentation {
    /// Accepts TOML (`free_rank = 2` / `finite_orders = [2, 3]`, `;` may
    /// separate entries) or product shorthand such as `F2`, `Z2*Z3`, `Z*Z/3`.
    pub fn from_spec(spec: &str) -> Result<GroupPresentation> {
        let s = spec.trim();
        if s.contains('=') {
            let text = s.replace(';', "\n");
            let p: GroupPresentation = toml::from_str(&text).map_err(|e| {
                let (line, column) = e
                    .span()
                    .map(|sp| line_col(&text, sp.start))
                    .unwrap_or((1, 1));
                Error::Parse {
                    line,
                    column,
                    message: e.message().to_string(),
                }
            })?;
            p.validate()?;
            return Ok(p);
        }
        let mut free_rank = 0usize;
        let mut orders = Vec::new();
        let mut col = 1usize;
        for part in s.split('*') {
            let t = part.trim();
            let here = col + (part.len() - part.trim_start().len());
            col += part.len() + 1;
            if let Some(n) = t.strip_prefix('F') {
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::parse(1, here, format!("bad rank in '{t}'")))?;
                free_rank += n;
            } else if let Some(rest) = t.strip_prefix('Z') {
                let rest = rest.trim_start_matches('/');
                if rest.is_empty() {
                    free_rank += 1;
                } else {
                    let m: u32 = rest
                        .parse()
                        .map_err(|_| Error::parse(1, here, format!("bad order in '{t}'")))?;
                    orders.push(m);
                }
            } else {
                return Err(Error::parse(1, here, format!("unrecognized factor '{t}'")));
            }
        }
        GroupPresentation::new(free_rank, orders)
    }

    pub fn to_toml(&self) -> String {
        let orders: Vec<String> = self.finite_orders.iter().map(|m| m.to_string()).collect();
        format!(
            "free_rank = {}\nfinite_orders = [{}]\n",
            self.free_rank,
            orders.join(", ")
        )
    }

    pub fn short_name(&self) -> String {
        let mut parts = Vec::new();
        if self.free_rank > 0 {
            parts.push(format!("F{}", self.free_rank));
        }
        for m in &self.finite_orders {
            parts.push(format!("Z{m}"));
        }
        parts.join("*")
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let mut line = 1;
    let mut col = 1;
    for (i, c) in text.char_indices() {
        if i >= offset {
            break;
        }
        if c == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_roundtrip() {
        let p = GroupPresentation::new(2, vec![2, 3]).unwrap();
        let w = parse_word(&p, "aB s1 b s2^2 A").unwrap();
        let s = format_word(&p, &w);
        assert_eq!(parse_word(&p, &s).unwrap(), w);
        assert_eq!(format_word(&p, &ReducedWord::identity()), "1");
        assert!(parse_word(&p, "1").unwrap().is_identity());
        assert!(parse_word(&p, "").unwrap().is_identity());
    }

    #[test]
    fn powers_and_negative_exponents() {
        let p = GroupPresentation::new(1, vec![3]).unwrap();
        assert_eq!(
            parse_word(&p, "a^3").unwrap(),
            parse_word(&p, "aaa").unwrap()
        );
        assert_eq!(
            parse_word(&p, "s1^-1").unwrap(),
            parse_word(&p, "s1^2").unwrap()
        );
        assert!(parse_word(&p, "a s1^3").unwrap() == parse_word(&p, "a").unwrap());
    }

    #[test]
    fn parse_errors_carry_position() {
        let p = GroupPresentation::free(2);
        match parse_word(&p, "ab c") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 4)),
            other => panic!("{other:?}"),
        }
        match parse_words(&p, "ab\n\naB?") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 3)),
            other => panic!("{other:?}"),
        }
        assert!(parse_word(&p, "s1").is_err());
    }

    #[test]
    fn move_list_roundtrip() {
        let p = GroupPresentation::new(2, vec![3, 3]).unwrap();
        let text = "rmul a B\nlmul b a # twist\ninv a\nswap a b\nconj s1 a s2\nperm s1 s2\ninner abA\n";
        let phi = parse_automorphism(&p, text).unwrap();
        assert_eq!(phi.moves.len(), 7);
        let again = parse_automorphism(&p, &format_automorphism(&p, &phi)).unwrap();
        assert_eq!(again, phi);
        assert!(parse_automorphism(&p, "id\n").unwrap().moves.is_empty());
    }

    #[test]
    fn move_list_errors() {
        let p = GroupPresentation::free(2);
        match parse_automorphism(&p, "inv a\nfrob a") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 1)),
            other => panic!("{other:?}"),
        }
        match parse_automorphism(&p, "rmul a c") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (1, 8)),
            other => panic!("{other:?}"),
        }
        assert!(parse_automorphism(&p, "rmul a a").is_err());
    }

    #[test]
    fn presentation_specs() {
        let p = GroupPresentation::from_spec("free_rank = 2\nfinite_orders = [2, 3]").unwrap();
        assert_eq!(p, GroupPresentation::new(2, vec![2, 3]).unwrap());
        let q = GroupPresentation::from_spec("free_rank = 1; finite_orders = [3]").unwrap();
        assert_eq!(q.finite_orders, vec![3]);
        assert_eq!(GroupPresentation::from_spec("F2").unwrap(), GroupPresentation::free(2));
        let r = GroupPresentation::from_spec("Z2*Z/3").unwrap();
        assert_eq!(r, GroupPresentation::new(0, vec![2, 3]).unwrap());
        assert_eq!(GroupPresentation::from_spec("Z*Z").unwrap(), GroupPresentation::free(2));
        assert!(GroupPresentation::from_spec("free_rank = 0").is_err());
        assert!(GroupPresentation::from_spec("Q8").is_err());
        assert_eq!(
            GroupPresentation::from_spec(&p.to_toml()).unwrap(),
            p
        );
    }

    #[test]
    fn automorphism_lists() {
        let p = GroupPresentation::free(2);
        let v = parse_automorphism_list(&p, "id\n---\nswap a b\ninv a\n---\n\n").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[1].moves.len(), 2);
        let e = parse_automorphism_list(&p, "id\n---\nswap a b\nfrob a\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
    }
}
