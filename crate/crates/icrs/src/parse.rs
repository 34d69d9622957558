//! Parsing the concrete syntax: terms, meta-terms, and rule files.
//!
//! Grammar, whitespace insensitive, `#` starting a comment that runs to the
//! end of the line:
//!
//! ```text
//! term  ::=  '[' name ']' term          abstraction
//!         |  'mu' name '.' term         cyclic binder
//!         |  name                       variable, back-reference or constant
//!         |  name '(' term ',' ... ')'  function or meta-variable application
//! ```
//!
//! A name starting with an upper-case letter is a meta-variable. Every other
//! name resolves against the enclosing binders first, innermost out, and
//! against the signature second, so binders may shadow symbols. The reserved
//! constants are written `⊤` and `_|_`; the spelling `⊥` is accepted on
//! input as an alias for `_|_`.
//!
//! Rule files are line oriented. A line `sig f/2 g/1 a/0` declares symbols,
//! a line `name: LHS -> RHS` declares a rule, and both may be mixed as long
//! as symbols are declared before their first use. Meta-variable arities are
//! inferred from the way they are applied and must be consistent within one
//! rule.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::rules::{Rule, RuleSystem};
use crate::signature::Signature;
use crate::term::{MetaName, Term};

/// A syntax or resolution error with its one-based source location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn fail<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, msg: msg.into() })
}

/// Parses a plain term: meta-variables are rejected, everything else as in
/// the module grammar. The result is well formed over `sig` by construction.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    parse_entire(text, sig, false)
}

/// Parses a rule-side term, where meta-variables are allowed.
pub fn parse_meta_term(text: &str, sig: &Signature) -> Result<Term, ParseError> {
    parse_entire(text, sig, true)
}

/// Parses a rule file: `sig` declarations plus `name: LHS -> RHS` lines.
/// The returned system is syntactically sound; semantic rule conditions
/// are the business of its `validate` and the analyses.
pub fn parse_rules(text: &str) -> Result<RuleSystem, ParseError> {
    let mut sig = Signature::new();
    let mut rules = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let stripped = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let body = stripped.trim();
        if body.is_empty() {
            continue;
        }
        if body == "sig" || body.starts_with("sig ") || body.starts_with("sig\t") {
            parse_sig_line(stripped, line_no, &mut sig)?;
            continue;
        }
        let Some(ci) = stripped.find(':') else {
            return fail(line_no, 1, "expected `sig name/arity ...` or `name: lhs -> rhs`");
        };
        let name = stripped[..ci].trim();
        if name.is_empty() || !name.chars().all(|c| is_ident_char(c) || c == '-') {
            return fail(line_no, 1, format!("invalid rule name `{}`", name));
        }
        if !seen.insert(name.to_string()) {
            return fail(line_no, 1, format!("duplicate rule name `{}`", name));
        }
        let rest_col = stripped[..ci + 1].chars().count() + 1;
        let toks = lex(&stripped[ci + 1..], line_no, rest_col)?;
        let end = (line_no, stripped.chars().count() + 1);
        let mut p = Parser::new(toks, end, &sig, true);
        let lhs = p.parse_term()?;
        p.expect(&Tok::Arrow)?;
        let rhs = p.parse_term()?;
        p.expect_end()?;
        rules.push(Rule::new(name, lhs, rhs));
    }
    Ok(RuleSystem::new(sig, rules))
}

fn parse_sig_line(
    line: &str,
    line_no: usize,
    sig: &mut Signature,
) -> Result<(), ParseError> {
    for (col, word) in words_with_columns(line).skip(1) {
        let Some((name, arity_text)) = word.split_once('/') else {
            return fail(line_no, col, format!("expected `name/arity`, found `{}`", word));
        };
        if name.is_empty() || name == "mu" || !name.chars().all(is_ident_char) {
            return fail(line_no, col, format!("invalid symbol name `{}`", name));
        }
        let arity: usize = match arity_text.parse() {
            Ok(n) => n,
            Err(_) => {
                return fail(line_no, col, format!("invalid arity `{}`", arity_text));
            }
        };
        if let Err(e) = sig.declare(name, arity) {
            return fail(line_no, col, e.to_string());
        }
    }
    Ok(())
}

/// Whitespace-separated words of a line, each with its one-based column.
fn words_with_columns(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut col = 1usize;
    std::iter::from_fn(move || {
        let trimmed = rest.trim_start();
        col += rest.chars().count() - trimmed.chars().count();
        if trimmed.is_empty() {
            return None;
        }
        let len = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let word = &trimmed[..len];
        let start = col;
        col += word.chars().count();
        rest = &trimmed[len..];
        Some((start, word))
    })
}

fn parse_entire(text: &str, sig: &Signature, allow_meta: bool) -> Result<Term, ParseError> {
    let toks = lex(text, 1, 1)?;
    let end = end_position(text);
    let mut p = Parser::new(toks, end, sig, allow_meta);
    let t = p.parse_term()?;
    p.expect_end()?;
    Ok(t)
}

fn end_position(text: &str) -> (usize, usize) {
    let line = 1 + text.chars().filter(|&c| c == '\n').count();
    let col = 1 + text.chars().rev().take_while(|&c| c != '\n').count();
    (line, col)
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Arrow,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Ident(s) => s.as_str(),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Arrow => "->",
        };
        write!(f, "{}", s)
    }
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, start_line: usize, start_col: usize) -> Result<Vec<Lexeme>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = start_line;
    let mut col = start_col;
    while i < chars.len() {
        let c = chars[i];
        let here = (line, col);
        let mut push = |tok: Tok| out.push(Lexeme { tok, line: here.0, col: here.1 });
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            _ if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => push(Tok::LParen),
            ')' => push(Tok::RParen),
            '[' => push(Tok::LBracket),
            ']' => push(Tok::RBracket),
            ',' => push(Tok::Comma),
            '.' => push(Tok::Dot),
            ':' => push(Tok::Colon),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    push(Tok::Arrow);
                    i += 1;
                    col += 1;
                } else {
                    return fail(line, col, "expected `->`");
                }
            }
            '⊤' => push(Tok::Ident("⊤".to_string())),
            '⊥' => push(Tok::Ident("_|_".to_string())),
            '_' if chars[i..].starts_with(&['_', '|', '_'])
                && chars.get(i + 3).map_or(true, |&c| !is_ident_char(c)) =>
            {
                push(Tok::Ident("_|_".to_string()));
                i += 2;
                col += 2;
            }
            _ if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Lexeme { tok: Tok::Ident(word), line: here.0, col: here.1 });
                continue;
            }
            _ => return fail(line, col, format!("unexpected character `{}`", c)),
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

/// An enclosing binder while parsing. A `mu` entry stays unguarded until
/// the parse crosses an abstraction body or an argument list, after which
/// back-references to it denote a productive cycle.
enum Entry {
    Abs(String),
    Mu { name: String, unguarded: bool },
}

struct Parser<'a> {
    toks: Vec<Lexeme>,
    i: usize,
    end: (usize, usize),
    sig: &'a Signature,
    allow_meta: bool,
    scope: Vec<Entry>,
    metas: BTreeMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn new(toks: Vec<Lexeme>, end: (usize, usize), sig: &'a Signature, allow_meta: bool) -> Self {
        Parser { toks, i: 0, end, sig, allow_meta, scope: Vec::new(), metas: BTreeMap::new() }
    }

    fn peek(&self) -> Option<&Lexeme> {
        self.toks.get(self.i)
    }

    fn here(&self) -> (usize, usize) {
        match self.peek() {
            Some(lx) => (lx.line, lx.col),
            None => self.end,
        }
    }

    fn advance(&mut self) -> Lexeme {
        let lx = self.toks[self.i].clone();
        self.i += 1;
        lx
    }

    fn expect(&mut self, want: &Tok) -> Result<(), ParseError> {
        let (line, col) = self.here();
        match self.peek() {
            Some(lx) if lx.tok == *want => {
                self.i += 1;
                Ok(())
            }
            Some(lx) => fail(line, col, format!("expected `{}`, found `{}`", want, lx.tok)),
            None => fail(line, col, format!("expected `{}`, found end of input", want)),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(lx) => {
                fail(lx.line, lx.col, format!("expected end of input, found `{}`", lx.tok))
            }
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<(String, usize, usize), ParseError> {
        let (line, col) = self.here();
        match self.peek() {
            Some(Lexeme { tok: Tok::Ident(_), .. }) => {
                let lx = self.advance();
                match lx.tok {
                    Tok::Ident(s) => Ok((s, line, col)),
                    _ => unreachable!(),
                }
            }
            Some(lx) => fail(line, col, format!("expected {}, found `{}`", what, lx.tok)),
            None => fail(line, col, format!("expected {}, found end of input", what)),
        }
    }

    /// Marks every enclosing `mu` binder as guarded for the duration of a
    /// subparse that crosses a proper node, returning the saved flags.
    fn clear_guards(&mut self) -> Vec<bool> {
        let mut saved = Vec::new();
        for e in &mut self.scope {
            if let Entry::Mu { unguarded, .. } = e {
                saved.push(*unguarded);
                *unguarded = false;
            }
        }
        saved
    }

    fn restore_guards(&mut self, saved: Vec<bool>) {
        let mut it = saved.into_iter();
        for e in &mut self.scope {
            if let Entry::Mu { unguarded, .. } = e {
                *unguarded = it.next().expect("binder count unchanged");
            }
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        match self.peek() {
            Some(Lexeme { tok: Tok::LBracket, .. }) => {
                self.advance();
                let (name, nl, nc) = self.expect_ident("a binder name")?;
                if name == "mu" {
                    return fail(nl, nc, "`mu` is a keyword and cannot bind a variable");
                }
                self.expect(&Tok::RBracket)?;
                let saved = self.clear_guards();
                self.scope.push(Entry::Abs(name.clone()));
                let body = self.parse_term();
                self.scope.pop();
                self.restore_guards(saved);
                Ok(Term::abs(&name, body?))
            }
            Some(Lexeme { tok: Tok::Ident(s), .. }) if s == "mu" => {
                self.advance();
                let (name, nl, nc) = self.expect_ident("a binder name")?;
                if name == "mu" {
                    return fail(nl, nc, "`mu` is a keyword and cannot bind a variable");
                }
                self.expect(&Tok::Dot)?;
                self.scope.push(Entry::Mu { name: name.clone(), unguarded: true });
                let body = self.parse_term();
                self.scope.pop();
                Ok(Term::rec(&name, body?))
            }
            Some(Lexeme { tok: Tok::Ident(_), .. }) => {
                let (name, _, _) = self.expect_ident("a term")?;
                let mut had_args = false;
                let mut args = Vec::new();
                if matches!(self.peek(), Some(Lexeme { tok: Tok::LParen, .. })) {
                    had_args = true;
                    self.advance();
                    let saved = self.clear_guards();
                    let parsed = self.parse_args();
                    self.restore_guards(saved);
                    args = parsed?;
                }
                self.resolve(name, args, had_args, line, col)
            }
            Some(lx) => fail(line, col, format!("expected a term, found `{}`", lx.tok)),
            None => fail(line, col, "expected a term, found end of input"),
        }
    }

    fn parse_args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = Vec::new();
        if matches!(self.peek(), Some(Lexeme { tok: Tok::RParen, .. })) {
            self.advance();
            return Ok(args);
        }
        loop {
            args.push(self.parse_term()?);
            let (line, col) = self.here();
            match self.peek() {
                Some(Lexeme { tok: Tok::Comma, .. }) => {
                    self.advance();
                }
                Some(Lexeme { tok: Tok::RParen, .. }) => {
                    self.advance();
                    return Ok(args);
                }
                Some(lx) => {
                    return fail(line, col, format!("expected `,` or `)`, found `{}`", lx.tok));
                }
                None => return fail(line, col, "expected `,` or `)`, found end of input"),
            }
        }
    }

    fn resolve(
        &mut self,
        name: String,
        args: Vec<Term>,
        had_args: bool,
        line: usize,
        col: usize,
    ) -> Result<Term, ParseError> {
        let mut abs_idx = 0;
        let mut mu_idx = 0;
        for e in self.scope.iter().rev() {
            match e {
                Entry::Abs(n) => {
                    if *n == name {
                        if had_args {
                            return fail(
                                line,
                                col,
                                format!("bound variable `{}` does not take arguments", name),
                            );
                        }
                        return Ok(Term::var(abs_idx));
                    }
                    abs_idx += 1;
                }
                Entry::Mu { name: n, unguarded } => {
                    if *n == name {
                        if had_args {
                            return fail(
                                line,
                                col,
                                format!("back-reference `{}` does not take arguments", name),
                            );
                        }
                        if *unguarded {
                            return fail(
                                line,
                                col,
                                format!(
                                    "unguarded recursion: `{}` refers back to its binder \
                                     without an intervening node",
                                    name
                                ),
                            );
                        }
                        return Ok(Term::recref(mu_idx));
                    }
                    mu_idx += 1;
                }
            }
        }
        if name.chars().next().is_some_and(char::is_uppercase) {
            if !self.allow_meta {
                return fail(
                    line,
                    col,
                    format!("meta-variable `{}` is not allowed in a plain term", name),
                );
            }
            if let Some(&first) = self.metas.get(&name) {
                if first != args.len() {
                    return fail(
                        line,
                        col,
                        format!(
                            "meta-variable `{}` used with arities {} and {}",
                            name,
                            first,
                            args.len()
                        ),
                    );
                }
            } else {
                self.metas.insert(name.clone(), args.len());
            }
            return Ok(Term::meta(MetaName::new(&name), args));
        }
        match self.sig.lookup(&name) {
            Some(id) => {
                let want = self.sig.arity(id);
                if want != args.len() {
                    return fail(
                        line,
                        col,
                        format!(
                            "symbol `{}` expects {} argument(s), found {}",
                            name,
                            want,
                            args.len()
                        ),
                    );
                }
                Ok(Term::fun(id, args))
            }
            None => fail(line, col, format!("unknown symbol `{}`", name)),
        }
    }
}
