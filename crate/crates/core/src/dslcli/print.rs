use std::fmt::Write;

use num::{One, Signed, Zero};

use super::ast::*;
use crate::exactla::{fmt_q, Q};

fn signed_terms<T>(terms: &[T], part: impl Fn(&T) -> (Q, String)) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (i, t) in terms.iter().enumerate() {
        let (c, body) = part(t);
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => s.push('-'),
            (0, false) => {}
            (_, true) => s.push_str(" - "),
            (_, false) => s.push_str(" + "),
        }
        let a = c.abs();
        if body.is_empty() {
            s.push_str(&fmt_q(&a));
        } else if a.is_one() {
            s.push_str(&body);
        } else {
            let _ = write!(s, "{}*{}", fmt_q(&a), body);
        }
    }
    s
}

pub fn print_poly(terms: &[Term]) -> String {
    signed_terms(terms, |t| (t.coeff.clone(), t.factors.join("*")))
}

pub fn print_mod_terms(terms: &[ModTerm]) -> String {
    signed_terms(terms, |t| {
        let body = if t.factors.is_empty() {
            t.vec.clone()
        } else {
            format!("{} ⊗ {}", t.factors.join("*"), t.vec)
        };
        // a zero coefficient must keep its body to re-parse as the same term
        if t.coeff.is_zero() {
            (Q::one(), format!("0*{body}"))
        } else {
            (t.coeff.clone(), body)
        }
    })
}

fn var(kw: &str, v: &VarDecl) -> String {
    let g = match &v.grading {
        Grading::Adams(r) => format!("adams {r}"),
        Grading::Rep(l) => format!("rep {l}"),
    };
    format!("  {kw} {} : deg {}, {g};\n", v.name, v.degree)
}

fn entry(e: &Entry) -> String {
    let kw = match e.kind {
        EntryKind::Dm => "dM",
        EntryKind::Conn => "G",
        EntryKind::Map => "f",
    };
    format!("  {kw} {} = {};\n", e.name, print_mod_terms(&e.terms))
}

/// Canonical text of a source file.
pub fn print(f: &SourceFile) -> String {
    let mut s = String::new();
    for (i, item) in f.items.iter().enumerate() {
        if i > 0 && matches!(item, Item::Cdga(_) | Item::Module(_) | Item::Map(_)) {
            s.push('\n');
        }
        match item {
            Item::Group { name, .. } => {
                let _ = writeln!(s, "group {name}");
            }
            Item::Window {
                n_min,
                n_max,
                r_min,
                r_max,
            } => {
                let _ = writeln!(s, "window {n_min}:{n_max},{r_min}:{r_max};");
            }
            Item::Cutoff(c) => {
                let _ = writeln!(s, "cutoff {c};");
            }
            Item::Cdga(c) => {
                let _ = writeln!(s, "cdga {} {{", c.name);
                for g in &c.gens {
                    s.push_str(&var("gen", g));
                }
                for d in &c.diffs {
                    let _ = writeln!(s, "  d {} = {};", d.name, print_poly(&d.poly));
                }
                s.push_str("}\n");
            }
            Item::Module(m) => {
                let _ = writeln!(s, "module {} over {} {{", m.name, m.over);
                for v in &m.vecs {
                    s.push_str(&var("vec", v));
                }
                for e in &m.entries {
                    s.push_str(&entry(e));
                }
                s.push_str("}\n");
            }
            Item::Map(m) => {
                let _ = writeln!(s, "map {} : {} -> {} {{", m.name, m.source, m.target);
                for e in &m.entries {
                    s.push_str(&entry(e));
                }
                s.push_str("}\n");
            }
        }
    }
    s
}
