use std::fmt;

use num::{BigInt, One, Zero};

use super::ast::*;
use crate::exactla::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: expected {}, found {}",
            self.line,
            self.col,
            self.expected.join(" or "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

const SYMBOLS: [&str; 14] = [
    "->", "{", "}", ":", ";", ",", "=", "+", "-", "*", "/", "(", ")", "⊗",
];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                {
                    let ch = chars[i];
                    bump(&mut i, &mut line, &mut col, ch);
                }
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                s.push(chars[i]);
                {
                    let ch = chars[i];
                    bump(&mut i, &mut line, &mut col, ch);
                }
            }
            // component suffix `x.0`
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                s.push('.');
                bump(&mut i, &mut line, &mut col, '.');
                while i < chars.len() && chars[i].is_ascii_digit() {
                    s.push(chars[i]);
                    {
                        let ch = chars[i];
                        bump(&mut i, &mut line, &mut col, ch);
                    }
                }
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                {
                    let ch = chars[i];
                    bump(&mut i, &mut line, &mut col, ch);
                }
            }
            out.push((Tok::Int(s.parse().unwrap()), pos));
            continue;
        }
        if c == '@' {
            bump(&mut i, &mut line, &mut col, c);
            out.push((Tok::Sym("⊗"), pos));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                for ch in s.chars() {
                    bump(&mut i, &mut line, &mut col, ch);
                }
                out.push((Tok::Sym(s), pos));
            }
            None => {
                return Err(ParseError {
                    line,
                    col,
                    found: format!("`{c}`"),
                    expected: vec!["a token".into()],
                });
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let p = self.pos();
        Err(ParseError {
            line: p.line,
            col: p.col,
            found: self.peek().to_string(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.is_sym(s) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.at += 1;
            Ok(())
        } else {
            self.fail(&[&format!("`{s}`")])
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.at += 1;
                Ok(s)
            }
            _ => self.fail(&["a name"]),
        }
    }

    fn nat(&mut self) -> PResult<BigInt> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.at += 1;
                Ok(n)
            }
            _ => self.fail(&["an integer"]),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = self.is_sym("-");
        if neg {
            self.at += 1;
        }
        let p = self.pos();
        let n = self.nat()?;
        let v: i64 = n.try_into().map_err(|_| ParseError {
            line: p.line,
            col: p.col,
            found: "an oversized integer".into(),
            expected: vec!["a 64-bit integer".into()],
        })?;
        Ok(if neg { -v } else { v })
    }

    /// `INT ["/" INT]`
    fn coeff(&mut self) -> PResult<Q> {
        let num = self.nat()?;
        if self.is_sym("/") {
            self.at += 1;
            let p = self.pos();
            let den = self.nat()?;
            if den.is_zero() {
                return Err(ParseError {
                    line: p.line,
                    col: p.col,
                    found: "`0`".into(),
                    expected: vec!["a nonzero denominator".into()],
                });
            }
            return Ok(Q::new(num, den));
        }
        Ok(Q::from_integer(num))
    }

    /// Sign before a term: leading sign optional, later ones required.
    fn sign(&mut self, first: bool) -> PResult<Option<bool>> {
        if self.is_sym("+") {
            self.at += 1;
            return Ok(Some(false));
        }
        if self.is_sym("-") {
            self.at += 1;
            return Ok(Some(true));
        }
        Ok(if first { Some(false) } else { None })
    }

    fn factors(&mut self) -> PResult<Vec<String>> {
        let mut f = vec![self.ident()?];
        while self.is_sym("*") {
            self.at += 1;
            f.push(self.ident()?);
        }
        Ok(f)
    }

    fn poly(&mut self) -> PResult<Vec<Term>> {
        let mut terms = Vec::new();
        let mut first = true;
        while let Some(neg) = self.sign(first)? {
            first = false;
            let pos = self.pos();
            let (mut coeff, factors) = match self.peek() {
                Tok::Int(_) => {
                    let c = self.coeff()?;
                    if self.is_sym("*") {
                        self.at += 1;
                        (c, self.factors()?)
                    } else {
                        (c, vec![])
                    }
                }
                Tok::Ident(_) => (Q::one(), self.factors()?),
                _ => return self.fail(&["a coefficient", "a generator name"]),
            };
            if neg {
                coeff = -coeff;
            }
            terms.push(Term {
                coeff,
                factors,
                pos,
            });
        }
        Ok(terms)
    }

    fn mod_terms(&mut self) -> PResult<Vec<ModTerm>> {
        let mut terms = Vec::new();
        if matches!(self.peek(), Tok::Int(n) if n.is_zero())
            && matches!(self.toks[self.at + 1].0, Tok::Sym(";"))
        {
            self.at += 1;
            return Ok(terms);
        }
        let mut first = true;
        while let Some(neg) = self.sign(first)? {
            first = false;
            let pos = self.pos();
            let mut coeff = Q::one();
            if matches!(self.peek(), Tok::Int(_)) {
                coeff = self.coeff()?;
                self.sym("*")?;
            }
            let mut factors = self.factors()?;
            let vec = if self.is_sym("⊗") {
                self.at += 1;
                self.ident()?
            } else if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                return self.fail(&["`⊗`"]);
            };
            if neg {
                coeff = -coeff;
            }
            terms.push(ModTerm {
                coeff,
                factors,
                vec,
                pos,
            });
        }
        Ok(terms)
    }

    fn var_decl(&mut self, kw: &str) -> PResult<VarDecl> {
        let pos = self.pos();
        self.kw(kw)?;
        let name = self.ident()?;
        self.sym(":")?;
        self.kw("deg")?;
        let degree = self.int()?;
        self.sym(",")?;
        let grading = if self.is_kw("adams") {
            self.at += 1;
            Grading::Adams(self.int()?)
        } else if self.is_kw("rep") {
            self.at += 1;
            Grading::Rep(self.label()?)
        } else {
            return self.fail(&["`adams`", "`rep`"]);
        };
        self.sym(";")?;
        Ok(VarDecl {
            name,
            degree,
            grading,
            pos,
        })
    }

    /// `sym(a)[det(b)]` or `w(n)`, kept as normalized text.
    fn label(&mut self) -> PResult<String> {
        let head = self.ident()?;
        let mut s = String::new();
        let part = |p: &mut Parser, h: &str, s: &mut String| -> PResult<()> {
            p.sym("(")?;
            let n = p.int()?;
            p.sym(")")?;
            s.push_str(&format!("{h}({n})"));
            Ok(())
        };
        match head.as_str() {
            "w" => part(self, "w", &mut s)?,
            "sym" => {
                part(self, "sym", &mut s)?;
                if self.is_kw("det") {
                    self.at += 1;
                    part(self, "det", &mut s)?;
                }
            }
            "det" => part(self, "det", &mut s)?,
            _ => {
                self.at -= 1;
                return self.fail(&["`sym`", "`det`", "`w`"]);
            }
        }
        Ok(s)
    }

    fn entry(&mut self, kind: EntryKind) -> PResult<Entry> {
        let pos = self.pos();
        self.at += 1;
        let name = self.ident()?;
        self.sym("=")?;
        let terms = self.mod_terms()?;
        self.sym(";")?;
        Ok(Entry {
            kind,
            name,
            terms,
            pos,
        })
    }

    fn cdga(&mut self) -> PResult<CdgaDecl> {
        let pos = self.pos();
        self.kw("cdga")?;
        let name = self.ident()?;
        self.sym("{")?;
        let mut gens = Vec::new();
        let mut diffs = Vec::new();
        loop {
            if self.is_kw("gen") && diffs.is_empty() {
                gens.push(self.var_decl("gen")?);
            } else if self.is_kw("d") {
                let pos = self.pos();
                self.at += 1;
                let name = self.ident()?;
                self.sym("=")?;
                let poly = self.poly()?;
                if poly.is_empty() {
                    return self.fail(&["a polynomial"]);
                }
                self.sym(";")?;
                diffs.push(DiffDecl { name, poly, pos });
            } else if self.is_sym("}") {
                self.at += 1;
                break;
            } else if diffs.is_empty() {
                return self.fail(&["`gen`", "`d`", "`}`"]);
            } else {
                return self.fail(&["`d`", "`}`"]);
            }
        }
        Ok(CdgaDecl {
            name,
            gens,
            diffs,
            pos,
        })
    }

    fn module(&mut self) -> PResult<ModuleDecl> {
        let pos = self.pos();
        self.kw("module")?;
        let name = self.ident()?;
        self.kw("over")?;
        let over = self.ident()?;
        self.sym("{")?;
        let mut vecs = Vec::new();
        let mut entries = Vec::new();
        loop {
            if self.is_kw("vec") && entries.is_empty() {
                vecs.push(self.var_decl("vec")?);
            } else if self.is_kw("dM") {
                entries.push(self.entry(EntryKind::Dm)?);
            } else if self.is_kw("G") {
                entries.push(self.entry(EntryKind::Conn)?);
            } else if self.is_sym("}") {
                self.at += 1;
                break;
            } else {
                return self.fail(&["`vec`", "`dM`", "`G`", "`}`"]);
            }
        }
        Ok(ModuleDecl {
            name,
            over,
            vecs,
            entries,
            pos,
        })
    }

    fn map(&mut self) -> PResult<MapDecl> {
        let pos = self.pos();
        self.kw("map")?;
        let name = self.ident()?;
        self.sym(":")?;
        let source = self.ident()?;
        self.sym("->")?;
        let target = self.ident()?;
        self.sym("{")?;
        let mut entries = Vec::new();
        while self.is_kw("f") {
            entries.push(self.entry(EntryKind::Map)?);
        }
        if !self.is_sym("}") {
            return self.fail(&["`f`", "`}`"]);
        }
        self.at += 1;
        Ok(MapDecl {
            name,
            source,
            target,
            entries,
            pos,
        })
    }

    fn file(&mut self) -> PResult<SourceFile> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::Ident(k) => match k.as_str() {
                    "group" => {
                        self.at += 1;
                        let pos = self.pos();
                        let name = self.ident()?;
                        if name != "Gm" && name != "GL2" {
                            self.at -= 1;
                            return self.fail(&["`Gm`", "`GL2`"]);
                        }
                        if self.is_sym(";") {
                            self.at += 1;
                        }
                        items.push(Item::Group { name, pos });
                    }
                    "window" => {
                        self.at += 1;
                        let n_min = self.int()?;
                        self.sym(":")?;
                        let n_max = self.int()?;
                        self.sym(",")?;
                        let r_min = self.int()?;
                        self.sym(":")?;
                        let r_max = self.int()?;
                        self.sym(";")?;
                        items.push(Item::Window {
                            n_min,
                            n_max,
                            r_min,
                            r_max,
                        });
                    }
                    "cutoff" => {
                        self.at += 1;
                        let c = self.int()?;
                        self.sym(";")?;
                        items.push(Item::Cutoff(c));
                    }
                    "cdga" => items.push(Item::Cdga(self.cdga()?)),
                    "module" => items.push(Item::Module(self.module()?)),
                    "map" => items.push(Item::Map(self.map()?)),
                    _ => {
                        return self.fail(&[
                            "`group`", "`window`", "`cutoff`", "`cdga`", "`module`", "`map`",
                        ])
                    }
                },
                _ => {
                    return self.fail(&[
                        "`group`", "`window`", "`cutoff`", "`cdga`", "`module`", "`map`",
                    ])
                }
            }
        }
        Ok(SourceFile { items })
    }
}

pub fn parse(text: &str) -> Result<SourceFile, ParseError> {
    let toks = lex(text)?;
    Parser { toks, at: 0 }.file()
}
