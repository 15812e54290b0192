//! Set-expression language: parsing with positioned diagnostics, printing, evaluation.
//!
//! ```text
//! up(p=4, rpos={0,1}, rneg={}, except={0,3}, window=3)
//! ap(p=3, r=1)
//! blocks(s=1, b=2, len=const(0), t=0, n0=0, mirror)
//! fin({1, 5, -7})
//! union(e1, e2, ...)        intersection(e1, e2, ...)
//! translate(e, g=5)         minkowski(f={0,1}, e)
//! complement(e)             Z        empty
//! ```

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Int;
use crate::symbolic::{Direction, LenLaw, Periodic, SymbolicSet};

/// Byte range of a node in the source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Up { p: u64, rpos: Vec<u64>, rneg: Vec<u64>, except: Option<(Vec<Int>, u64)> },
    Ap { p: u64, r: u64 },
    Blocks { s: u64, b: u64, len: LenLaw, t: Int, n0: u32, mirror: bool, side: Direction },
    Fin(Vec<Int>),
    Union(Vec<SetExpr>),
    Intersection(Vec<SetExpr>),
    Translate(Box<SetExpr>, Int),
    Minkowski(Vec<Int>, Box<SetExpr>),
    Complement(Box<SetExpr>),
    Integers,
    Empty,
}

/// A parsed expression; equality ignores spans.
#[derive(Clone, Debug)]
pub struct SetExpr {
    pub kind: ExprKind,
    pub span: Span,
}

impl PartialEq for SetExpr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for SetExpr {}

/// A parse or validation failure at a source position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl From<Diagnostic> for Error {
    fn from(d: Diagnostic) -> Error {
        Error::Parse(d.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(Int),
    Punct(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Num(n) => write!(f, "'{n}'"),
            Tok::Punct(c) => write!(f, "'{c}'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

fn position(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn diag(src: &str, offset: usize, message: impl Into<String>, expected: &[&str]) -> Diagnostic {
    let (line, column) = position(src, offset);
    Diagnostic { line, column, message: message.into(), expected: expected.iter().map(|s| s.to_string()).collect() }
}

fn lex(src: &str) -> std::result::Result<Vec<(Tok, Span)>, Diagnostic> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(src[start..i].to_string()), Span { start, end: i }));
        } else if c.is_ascii_digit() || (c == '-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n: Int = src[start..i].parse().map_err(|_| diag(src, start, "integer out of range", &[]))?;
            out.push((Tok::Num(n), Span { start, end: i }));
        } else if "(){},=".contains(c) {
            out.push((Tok::Punct(c), Span { start: i, end: i + 1 }));
            i += 1;
        } else {
            return Err(diag(src, i, format!("unexpected character '{c}'"), &[]));
        }
    }
    out.push((Tok::End, Span { start: src.len(), end: src.len() }));
    Ok(out)
}

type PResult<T> = std::result::Result<T, Diagnostic>;

/// Keyword arguments collected for one constructor, with the span of each value.
struct Args {
    items: Vec<(String, Value, Span)>,
}

#[derive(Clone, Debug)]
enum Value {
    Num(Int),
    Set(Vec<Int>),
    Word(String),
    Len(LenLaw),
    Flag,
    Expr(SetExpr),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }
    fn span(&self) -> Span {
        self.toks[self.pos].1
    }
    fn bump(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }
    fn err<T>(&self, message: impl Into<String>, expected: &[&str]) -> PResult<T> {
        Err(diag(self.src, self.span().start, message, expected))
    }
    fn expect(&mut self, c: char) -> PResult<Span> {
        if *self.peek() == Tok::Punct(c) {
            Ok(self.bump().1)
        } else {
            let found = self.peek().clone();
            self.err(format!("unexpected {found}"), &[&format!("'{c}'")])
        }
    }
    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn int_set(&mut self) -> PResult<Vec<Int>> {
        self.expect('{')?;
        let mut v = Vec::new();
        if self.eat('}') {
            return Ok(v);
        }
        loop {
            match self.bump() {
                (Tok::Num(n), _) => v.push(n),
                (t, s) => return Err(diag(self.src, s.start, format!("unexpected {t}"), &["integer"])),
            }
            if self.eat('}') {
                break;
            }
            self.expect(',')?;
        }
        v.sort_unstable();
        v.dedup();
        Ok(v)
    }

    fn expr(&mut self) -> PResult<SetExpr> {
        let (tok, span) = self.bump();
        let name = match tok {
            Tok::Ident(name) => name,
            t => return Err(diag(self.src, span.start, format!("unexpected {t}"), &["set expression"])),
        };
        match name.as_str() {
            "Z" => return Ok(SetExpr { kind: ExprKind::Integers, span }),
            "empty" => return Ok(SetExpr { kind: ExprKind::Empty, span }),
            _ => {}
        }
        let known = ["up", "ap", "blocks", "fin", "union", "intersection", "translate", "minkowski", "complement"];
        if !known.contains(&name.as_str()) {
            return Err(diag(self.src, span.start, format!("unknown constructor '{name}'"), &known));
        }
        self.expect('(')?;
        let kind = match name.as_str() {
            "fin" => {
                let v = self.int_set()?;
                ExprKind::Fin(v)
            }
            "union" | "intersection" => {
                let mut items = vec![self.expr()?];
                while self.eat(',') {
                    items.push(self.expr()?);
                }
                if name == "union" {
                    ExprKind::Union(items)
                } else {
                    ExprKind::Intersection(items)
                }
            }
            "complement" => ExprKind::Complement(Box::new(self.expr()?)),
            _ => {
                let args = self.args()?;
                self.build(&name, args, span)?
            }
        };
        let close = self.expect(')')?;
        Ok(SetExpr { kind, span: Span { start: span.start, end: close.end } })
    }

    /// `key=value` pairs, bare flags, and nested expressions in any order.
    fn args(&mut self) -> PResult<Args> {
        let mut items = Vec::new();
        if *self.peek() == Tok::Punct(')') {
            return Ok(Args { items });
        }
        loop {
            let start = self.span();
            let is_key = matches!(self.peek(), Tok::Ident(_)) && self.toks[self.pos + 1].0 == Tok::Punct('=');
            if is_key {
                let Tok::Ident(key) = self.bump().0 else { unreachable!("checked above") };
                self.bump();
                let vspan = self.span();
                let value = match self.peek().clone() {
                    Tok::Num(n) => {
                        self.bump();
                        Value::Num(n)
                    }
                    Tok::Punct('{') => Value::Set(self.int_set()?),
                    Tok::Ident(w) if w == "const" => {
                        self.bump();
                        self.expect('(')?;
                        let c = match self.bump() {
                            (Tok::Num(c), _) if c >= 0 => c as u64,
                            (t, s) => return Err(diag(self.src, s.start, format!("unexpected {t}"), &["nonnegative integer"])),
                        };
                        self.expect(')')?;
                        Value::Len(LenLaw::Const(c))
                    }
                    Tok::Ident(w) if w == "linear" => {
                        self.bump();
                        Value::Len(LenLaw::Linear)
                    }
                    Tok::Ident(w) if key == "side" || w == "true" || w == "false" => {
                        self.bump();
                        Value::Word(w)
                    }
                    _ => return self.err(format!("unexpected {} as value of '{key}'", self.peek()), &["integer", "{...}"]),
                };
                items.push((key, value, Span { start: vspan.start, end: self.toks[self.pos - 1].1.end }));
            } else if matches!(self.peek(), Tok::Ident(w) if w == "mirror") {
                self.bump();
                items.push(("mirror".into(), Value::Flag, start));
            } else if *self.peek() == Tok::Punct('{') {
                let v = self.int_set()?;
                items.push(("".into(), Value::Set(v), start));
            } else if matches!(self.peek(), Tok::Num(_)) {
                let Tok::Num(n) = self.bump().0 else { unreachable!("checked above") };
                items.push(("".into(), Value::Num(n), start));
            } else {
                let e = self.expr()?;
                let s = e.span;
                items.push(("".into(), Value::Expr(e), s));
            }
            if !self.eat(',') {
                break;
            }
        }
        if *self.peek() != Tok::Punct(')') {
            return self.err(format!("unexpected {}", self.peek()), &["','", "')'"]);
        }
        Ok(Args { items })
    }

    fn build(&self, name: &str, args: Args, at: Span) -> PResult<ExprKind> {
        let src = self.src;
        let allowed: &[&str] = match name {
            "up" => &["p", "rpos", "rneg", "except", "window"],
            "ap" => &["p", "r"],
            "blocks" => &["s", "b", "len", "t", "n0", "mirror", "side"],
            "translate" => &["g"],
            "minkowski" => &["f"],
            _ => &[],
        };
        let mut keyed = std::collections::BTreeMap::new();
        let mut positional = Vec::new();
        for (k, v, s) in args.items {
            if k.is_empty() {
                positional.push((v, s));
            } else if !allowed.contains(&k.as_str()) {
                return Err(diag(src, s.start, format!("'{name}' has no argument '{k}'"), allowed));
            } else if keyed.insert(k.clone(), (v, s)).is_some() {
                return Err(diag(src, s.start, format!("argument '{k}' given twice"), &[]));
            }
        }
        let num = |k: &str, keyed: &std::collections::BTreeMap<String, (Value, Span)>| -> PResult<Option<(Int, Span)>> {
            match keyed.get(k) {
                None => Ok(None),
                Some((Value::Num(n), s)) => Ok(Some((*n, *s))),
                Some((_, s)) => Err(diag(src, s.start, format!("'{k}' must be an integer"), &["integer"])),
            }
        };
        let required = |k: &str, keyed: &std::collections::BTreeMap<String, (Value, Span)>| -> PResult<(Int, Span)> {
            num(k, keyed)?.ok_or_else(|| diag(src, at.start, format!("'{name}' needs argument '{k}'"), &[k]))
        };
        let set = |k: &str, keyed: &std::collections::BTreeMap<String, (Value, Span)>| -> PResult<Option<(Vec<Int>, Span)>> {
            match keyed.get(k) {
                None => Ok(None),
                Some((Value::Set(v), s)) => Ok(Some((v.clone(), *s))),
                Some((_, s)) => Err(diag(src, s.start, format!("'{k}' must be a set {{...}}"), &["{...}"])),
            }
        };
        let at_least = |v: Int, min: Int, k: &str, s: Span| -> PResult<()> {
            if v < min {
                Err(diag(src, s.start, format!("{k} must be ≥ {min}"), &[]))
            } else {
                Ok(())
            }
        };
        let residues = |v: &[Int], p: Int, k: &str, s: Span| -> PResult<Vec<u64>> {
            match v.iter().find(|&&r| r < 0 || r >= p) {
                Some(r) => Err(diag(src, s.start, format!("{k} residue {r} must lie in 0..{p}"), &[])),
                None => Ok(v.iter().map(|&r| r as u64).collect()),
            }
        };
        let no_positional = |positional: &[(Value, Span)]| -> PResult<()> {
            match positional.first() {
                Some((_, s)) => Err(diag(src, s.start, format!("'{name}' takes keyword arguments only"), allowed)),
                None => Ok(()),
            }
        };
        match name {
            "up" => {
                no_positional(&positional)?;
                let (p, ps) = required("p", &keyed)?;
                at_least(p, 1, "p", ps)?;
                let (rpos, rs) = set("rpos", &keyed)?.unwrap_or_default();
                let rpos = residues(&rpos, p, "rpos", rs)?;
                let rneg = match set("rneg", &keyed)? {
                    Some((v, s)) => residues(&v, p, "rneg", s)?,
                    None => rpos.clone(),
                };
                let except = match (set("except", &keyed)?, num("window", &keyed)?) {
                    (None, None) => None,
                    (Some((e, _)), Some((w, ws))) => {
                        at_least(w, 0, "window", ws)?;
                        if let Some(x) = e.iter().find(|x| x.abs() > w) {
                            return Err(diag(src, ws.start, format!("except member {x} lies outside window {w}"), &[]));
                        }
                        Some((e, w as u64))
                    }
                    (Some((_, s)), None) | (None, Some((_, s))) => {
                        return Err(diag(src, s.start, "'except' and 'window' go together", &["except", "window"]))
                    }
                };
                Ok(ExprKind::Up { p: p as u64, rpos, rneg, except })
            }
            "ap" => {
                no_positional(&positional)?;
                let (p, ps) = required("p", &keyed)?;
                at_least(p, 1, "p", ps)?;
                let (r, rs) = required("r", &keyed)?;
                if r < 0 || r >= p {
                    return Err(diag(src, rs.start, format!("r must lie in 0..{p}"), &[]));
                }
                Ok(ExprKind::Ap { p: p as u64, r: r as u64 })
            }
            "blocks" => {
                no_positional(&positional)?;
                let (s, ss) = required("s", &keyed)?;
                at_least(s, 1, "s", ss)?;
                let (b, bs) = required("b", &keyed)?;
                at_least(b, 2, "b", bs)?;
                let len = match keyed.get("len") {
                    Some((Value::Len(l), _)) => *l,
                    Some((_, s)) => return Err(diag(src, s.start, "len must be const(c) or linear", &["const(c)", "linear"])),
                    None => return Err(diag(src, at.start, "'blocks' needs argument 'len'", &["len"])),
                };
                let t = num("t", &keyed)?.map_or(0, |(t, _)| t);
                let n0 = match num("n0", &keyed)? {
                    Some((n, s)) if !(0..=u32::MAX as Int).contains(&n) => {
                        return Err(diag(src, s.start, "n0 must be ≥ 0", &[]))
                    }
                    Some((n, _)) => n as u32,
                    None => 0,
                };
                let mirror = match keyed.get("mirror") {
                    None => false,
                    Some((Value::Flag, _)) => true,
                    Some((Value::Word(w), _)) if w == "true" || w == "false" => w == "true",
                    Some((_, s)) => return Err(diag(src, s.start, "mirror takes no value", &["mirror"])),
                };
                let side = match keyed.get("side") {
                    None => Direction::Pos,
                    Some((Value::Word(w), _)) if w == "pos" => Direction::Pos,
                    Some((Value::Word(w), _)) if w == "neg" => Direction::Neg,
                    Some((_, s)) => return Err(diag(src, s.start, "side must be pos or neg", &["pos", "neg"])),
                };
                if mirror && side == Direction::Neg {
                    return Err(diag(src, at.start, "mirror already covers both sides", &[]));
                }
                Ok(ExprKind::Blocks { s: s as u64, b: b as u64, len, t, n0, mirror, side })
            }
            "translate" => {
                let mut e = None;
                let mut g = num("g", &keyed)?.map(|(g, _)| g);
                for (v, s) in positional {
                    match v {
                        Value::Expr(x) if e.is_none() => e = Some(x),
                        Value::Num(n) if g.is_none() => g = Some(n),
                        _ => return Err(diag(src, s.start, "translate takes one expression and g", &["translate(e, g=<int>)"])),
                    }
                }
                let e = e.ok_or_else(|| diag(src, at.start, "translate needs an expression", &["set expression"]))?;
                let g = g.ok_or_else(|| diag(src, at.start, "translate needs g", &["g"]))?;
                Ok(ExprKind::Translate(Box::new(e), g))
            }
            "minkowski" => {
                let mut e = None;
                let mut f = set("f", &keyed)?.map(|(f, _)| f);
                for (v, s) in positional {
                    match v {
                        Value::Expr(x) if e.is_none() => e = Some(x),
                        Value::Set(x) if f.is_none() => f = Some(x),
                        _ => return Err(diag(src, s.start, "minkowski takes f and one expression", &["minkowski(f={...}, e)"])),
                    }
                }
                let e = e.ok_or_else(|| diag(src, at.start, "minkowski needs an expression", &["set expression"]))?;
                let f = f.ok_or_else(|| diag(src, at.start, "minkowski needs f", &["f"]))?;
                if f.is_empty() {
                    return Err(diag(src, at.start, "f must be nonempty", &[]));
                }
                Ok(ExprKind::Minkowski(f, Box::new(e)))
            }
            _ => unreachable!("constructor names checked by the caller"),
        }
    }
}

/// Parses one set expression.
pub fn parse_set_expr(text: &str) -> std::result::Result<SetExpr, Diagnostic> {
    let toks = lex(text)?;
    let mut p = Parser { src: text, toks, pos: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        let t = p.peek().clone();
        return p.err(format!("unexpected {t} after the expression"), &["end of input"]);
    }
    Ok(e)
}

/// Parses and evaluates in one step.
pub fn parse_set(text: &str) -> Result<SymbolicSet> {
    parse_set_expr(text)?.eval()
}

/// Parses a finite list such as `{0,1,2}` or `0,1,2`.
pub fn parse_int_list(text: &str) -> std::result::Result<Vec<Int>, Diagnostic> {
    let t = text.trim();
    let wrapped = if t.starts_with('{') { t.to_string() } else { format!("{{{t}}}") };
    let offset = if t.starts_with('{') { 0 } else { 1 };
    let toks = lex(&wrapped).map_err(|mut d| {
        d.column = d.column.saturating_sub(offset).max(1);
        d
    })?;
    let mut p = Parser { src: &wrapped, toks, pos: 0 };
    let v = p.int_set()?;
    if *p.peek() != Tok::End {
        return p.err("unexpected input after the list", &["end of input"]);
    }
    Ok(v)
}

fn write_set(f: &mut fmt::Formatter<'_>, v: impl IntoIterator<Item = impl fmt::Display>) -> fmt::Result {
    let items: Vec<String> = v.into_iter().map(|x| x.to_string()).collect();
    write!(f, "{{{}}}", items.join(","))
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[SetExpr]) -> fmt::Result {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{e}")?;
    }
    Ok(())
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Up { p, rpos, rneg, except } => {
                write!(f, "up(p={p}, rpos=")?;
                write_set(f, rpos)?;
                f.write_str(", rneg=")?;
                write_set(f, rneg)?;
                if let Some((e, w)) = except {
                    f.write_str(", except=")?;
                    write_set(f, e)?;
                    write!(f, ", window={w}")?;
                }
                f.write_str(")")
            }
            ExprKind::Ap { p, r } => write!(f, "ap(p={p}, r={r})"),
            ExprKind::Blocks { s, b, len, t, n0, mirror, side } => {
                let len = match len {
                    LenLaw::Const(c) => format!("const({c})"),
                    LenLaw::Linear => "linear".into(),
                };
                write!(f, "blocks(s={s}, b={b}, len={len}, t={t}, n0={n0}")?;
                if *mirror {
                    f.write_str(", mirror")?;
                }
                if *side == Direction::Neg {
                    f.write_str(", side=neg")?;
                }
                f.write_str(")")
            }
            ExprKind::Fin(v) => {
                f.write_str("fin(")?;
                write_set(f, v)?;
                f.write_str(")")
            }
            ExprKind::Union(items) => {
                f.write_str("union(")?;
                write_list(f, items)?;
                f.write_str(")")
            }
            ExprKind::Intersection(items) => {
                f.write_str("intersection(")?;
                write_list(f, items)?;
                f.write_str(")")
            }
            ExprKind::Translate(e, g) => write!(f, "translate({e}, g={g})"),
            ExprKind::Minkowski(fs, e) => {
                f.write_str("minkowski(f=")?;
                write_set(f, fs)?;
                write!(f, ", {e})")
            }
            ExprKind::Complement(e) => write!(f, "complement({e})"),
            ExprKind::Integers => f.write_str("Z"),
            ExprKind::Empty => f.write_str("empty"),
        }
    }
}

impl SetExpr {
    pub fn eval(&self) -> Result<SymbolicSet> {
        Ok(match &self.kind {
            ExprKind::Up { p, rpos, rneg, except } => {
                let base = match except {
                    None => Periodic::new(*p, rpos, rneg)?,
                    Some((e, w)) => Periodic::with_window(*p, rpos, rneg, *w, &e.iter().copied().collect())?,
                };
                SymbolicSet::from(base)
            }
            ExprKind::Ap { p, r } => SymbolicSet::progression(*p, *r)?,
            ExprKind::Blocks { s, b, len, t, n0, mirror, side } => match side {
                Direction::Pos => SymbolicSet::blocks(*s, *b, *len, *t, *n0, *mirror)?,
                Direction::Neg => SymbolicSet::block_family(*s, *b, *len, *t, *n0, Direction::Neg)?,
            },
            ExprKind::Fin(v) => SymbolicSet::finite(v.iter().copied()),
            ExprKind::Union(items) => {
                let sets = items.iter().map(SetExpr::eval).collect::<Result<Vec<_>>>()?;
                SymbolicSet::union_all(&sets)
            }
            ExprKind::Intersection(items) => {
                let mut acc = SymbolicSet::integers();
                for e in items {
                    acc = acc.intersection(&e.eval()?);
                }
                acc
            }
            ExprKind::Translate(e, g) => e.eval()?.translate(*g),
            ExprKind::Minkowski(fs, e) => SymbolicSet::minkowski_finite(fs, &e.eval()?),
            ExprKind::Complement(e) => e.eval()?.complement(),
            ExprKind::Integers => SymbolicSet::integers(),
            ExprKind::Empty => SymbolicSet::empty(),
        })
    }
}
