use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use super::ast::*;
use super::DslError;
use crate::cdgacore::{BasisRef, FreeCdgaPresentation, LevelwiseCdga, Poly, Window};
use crate::cellconn::{Carrier, Connection, ConnectionMorphism, ModElem};
use crate::exactla::Q;
use crate::repsemi::{GroupKind, IrrLabel};

pub const DEFAULT_WINDOW: Window = Window::new(0, 4, 0, 4);
pub const DEFAULT_CUTOFF: i64 = 3;

/// A module with names resolved; the coefficients still need a base
/// expansion to become a [`Connection`].
#[derive(Debug, Clone)]
pub struct ModuleSpec {
    pub name: String,
    pub over: String,
    pub vecs: Vec<(String, i64, IrrLabel)>,
    /// `D` of each highest-weight vector: (coefficient, atoms, carrier index).
    pub images: Vec<Vec<(Q, Vec<usize>, usize)>>,
}

#[derive(Debug, Clone)]
pub struct MapSpec {
    pub name: String,
    pub source: String,
    pub target: String,
    /// Image of every source basis vector, same term shape as modules.
    pub images: Vec<Vec<(Q, Vec<usize>, usize)>>,
}

#[derive(Debug, Clone)]
pub struct Document {
    pub group: GroupKind,
    pub window: Window,
    pub cutoff: i64,
    pub cdgas: Vec<(String, FreeCdgaPresentation)>,
    pub modules: Vec<ModuleSpec>,
    pub maps: Vec<MapSpec>,
}

fn name_err(pos: Pos, msg: String) -> DslError {
    DslError::Name {
        line: pos.line,
        col: pos.col,
        msg,
    }
}

fn degree_err(pos: Pos, msg: String) -> DslError {
    DslError::DegreeMismatch {
        line: pos.line,
        col: pos.col,
        msg,
    }
}

fn label_of(group: GroupKind, v: &VarDecl) -> Result<IrrLabel, DslError> {
    match (&v.grading, group) {
        (Grading::Adams(r), GroupKind::Gm) => Ok(IrrLabel::Gm { weight: -r }),
        (Grading::Rep(l), GroupKind::GL2) => {
            let label: IrrLabel = l
                .parse()
                .map_err(|e| degree_err(v.pos, format!("{}: {e}", v.name)))?;
            if label.group() != GroupKind::GL2 {
                return Err(degree_err(
                    v.pos,
                    format!("{}: {l} is not a GL2 label", v.name),
                ));
            }
            Ok(label)
        }
        (Grading::Adams(_), GroupKind::GL2) => Err(degree_err(
            v.pos,
            format!("{}: GL2 files grade by `rep`, not `adams`", v.name),
        )),
        (Grading::Rep(_), GroupKind::Gm) => Err(degree_err(
            v.pos,
            format!("{}: Gm files grade by `adams`, not `rep`", v.name),
        )),
    }
}

fn monomial(
    alg: &crate::cdgacore::FreeAlgebra,
    factors: &[String],
    pos: Pos,
) -> Result<Vec<usize>, DslError> {
    factors
        .iter()
        .map(|f| {
            alg.atom_index(f)
                .ok_or_else(|| name_err(pos, format!("unknown generator `{f}`")))
        })
        .collect()
}

fn cdga(group: GroupKind, c: &CdgaDecl) -> Result<FreeCdgaPresentation, DslError> {
    let mut p = FreeCdgaPresentation::new(group);
    for g in &c.gens {
        let label = label_of(group, g)?;
        if g.degree < 1 {
            return Err(degree_err(
                g.pos,
                format!("{}: generators need degree >= 1", g.name),
            ));
        }
        if p.generator_index(&g.name).is_some() {
            return Err(name_err(g.pos, format!("duplicate generator `{}`", g.name)));
        }
        p.add_generator(&g.name, g.degree, label)?;
    }
    let alg = p.algebra();
    let mut seen = Vec::new();
    for d in &c.diffs {
        if p.generator_index(&d.name).is_none() {
            return Err(name_err(d.pos, format!("unknown generator `{}`", d.name)));
        }
        if seen.contains(&d.name) {
            return Err(name_err(
                d.pos,
                format!("second differential for `{}`", d.name),
            ));
        }
        seen.push(d.name.clone());
        let mut poly = Poly::new();
        for t in &d.poly {
            let mut acc = alg.constant(t.coeff.clone());
            for i in monomial(&alg, &t.factors, t.pos)? {
                acc = alg.mul(&acc, &alg.atom_poly(i));
            }
            crate::cdgacore::poly_add(&mut poly, &acc, &Q::from_integer(1.into()));
        }
        p.set_differential(&d.name, poly)?;
    }
    Ok(p)
}

fn carrier_index(
    names: &[String],
    vecs: &[(String, i64, IrrLabel)],
    v: &str,
    pos: Pos,
) -> Result<usize, DslError> {
    // a bare name of a non-line vector means its highest-weight component
    let full = match vecs.iter().find(|x| x.0 == v) {
        Some(x) if x.2.dim() > 1 => format!("{v}.0"),
        _ => v.to_string(),
    };
    names
        .iter()
        .position(|n| *n == full)
        .ok_or_else(|| name_err(pos, format!("unknown vector `{v}`")))
}

fn terms(
    alg: &crate::cdgacore::FreeAlgebra,
    names: &[String],
    vecs: &[(String, i64, IrrLabel)],
    ts: &[ModTerm],
    need_factor: bool,
    allow_factor: bool,
) -> Result<Vec<(Q, Vec<usize>, usize)>, DslError> {
    let mut out = Vec::new();
    for t in ts {
        if need_factor && t.factors.is_empty() {
            return Err(degree_err(
                t.pos,
                format!(
                    "connection term on `{}` needs a coefficient in the augmentation ideal",
                    t.vec
                ),
            ));
        }
        if !allow_factor && !t.factors.is_empty() {
            return Err(degree_err(t.pos, "`dM` takes scalar coefficients".into()));
        }
        out.push((
            t.coeff.clone(),
            monomial(alg, &t.factors, t.pos)?,
            carrier_index(names, vecs, &t.vec, t.pos)?,
        ));
    }
    Ok(out)
}

fn vec_specs(group: GroupKind, vecs: &[VarDecl]) -> Result<Vec<(String, i64, IrrLabel)>, DslError> {
    let mut out: Vec<(String, i64, IrrLabel)> = Vec::new();
    for v in vecs {
        if out.iter().any(|x| x.0 == v.name) {
            return Err(name_err(v.pos, format!("duplicate vector `{}`", v.name)));
        }
        out.push((v.name.clone(), v.degree, label_of(group, v)?));
    }
    Ok(out)
}

pub fn elaborate(f: &SourceFile) -> Result<Document, DslError> {
    let mut group = None;
    let mut window = DEFAULT_WINDOW;
    let mut cutoff = DEFAULT_CUTOFF;
    let mut doc_cdgas: Vec<(String, FreeCdgaPresentation)> = Vec::new();
    let mut modules: Vec<ModuleSpec> = Vec::new();
    let mut maps = Vec::new();
    for item in &f.items {
        match item {
            Item::Group { name, pos } => {
                let g = if name == "GL2" {
                    GroupKind::GL2
                } else {
                    GroupKind::Gm
                };
                if group.is_some_and(|h| h != g) {
                    return Err(degree_err(*pos, "a file declares a single group".into()));
                }
                group = Some(g);
            }
            Item::Window {
                n_min,
                n_max,
                r_min,
                r_max,
            } => window = Window::new(*n_min, *n_max, *r_min, *r_max),
            Item::Cutoff(c) => cutoff = *c,
            Item::Cdga(c) => {
                let g = *group.get_or_insert(GroupKind::Gm);
                if doc_cdgas.iter().any(|(n, _)| *n == c.name) {
                    return Err(name_err(c.pos, format!("duplicate cdga `{}`", c.name)));
                }
                doc_cdgas.push((c.name.clone(), cdga(g, c)?));
            }
            Item::Module(m) => {
                let g = *group.get_or_insert(GroupKind::Gm);
                let base = doc_cdgas
                    .iter()
                    .find(|(n, _)| *n == m.over)
                    .ok_or_else(|| {
                        name_err(
                            m.pos,
                            format!("module `{}` over undeclared cdga `{}`", m.name, m.over),
                        )
                    })?;
                if modules.iter().any(|x| x.name == m.name) {
                    return Err(name_err(m.pos, format!("duplicate module `{}`", m.name)));
                }
                let alg = base.1.algebra();
                let vecs = vec_specs(g, &m.vecs)?;
                let names = Carrier::from_vectors(g, &vecs).names;
                let mut images = vec![Vec::new(); vecs.len()];
                for e in &m.entries {
                    let k = vecs
                        .iter()
                        .position(|v| v.0 == e.name)
                        .ok_or_else(|| name_err(e.pos, format!("unknown vector `{}`", e.name)))?;
                    let t = match e.kind {
                        EntryKind::Dm => terms(&alg, &names, &vecs, &e.terms, false, false)?,
                        _ => terms(&alg, &names, &vecs, &e.terms, true, true)?,
                    };
                    images[k].extend(t);
                }
                modules.push(ModuleSpec {
                    name: m.name.clone(),
                    over: m.over.clone(),
                    vecs,
                    images,
                });
            }
            Item::Map(m) => {
                let find = |n: &str| {
                    modules
                        .iter()
                        .find(|x| x.name == n)
                        .ok_or_else(|| name_err(m.pos, format!("unknown module `{n}`")))
                };
                let (s, t) = (find(&m.source)?, find(&m.target)?);
                if s.over != t.over {
                    return Err(name_err(
                        m.pos,
                        format!("`{}` and `{}` live over different cdgas", s.name, t.name),
                    ));
                }
                let alg = doc_cdgas
                    .iter()
                    .find(|(n, _)| *n == s.over)
                    .unwrap()
                    .1
                    .algebra();
                let g = group.unwrap_or(GroupKind::Gm);
                let snames = Carrier::from_vectors(g, &s.vecs).names;
                let tnames = Carrier::from_vectors(g, &t.vecs).names;
                let mut images = vec![Vec::new(); snames.len()];
                for e in &m.entries {
                    let j = snames.iter().position(|n| *n == e.name).ok_or_else(|| {
                        name_err(
                            e.pos,
                            format!("unknown vector `{}` of `{}`", e.name, s.name),
                        )
                    })?;
                    images[j].extend(terms(&alg, &tnames, &t.vecs, &e.terms, false, true)?);
                }
                maps.push(MapSpec {
                    name: m.name.clone(),
                    source: s.name.clone(),
                    target: t.name.clone(),
                    images,
                });
            }
        }
    }
    Ok(Document {
        group: group.unwrap_or(GroupKind::Gm),
        window,
        cutoff,
        cdgas: doc_cdgas,
        modules,
        maps,
    })
}

fn to_mod_elem(base: &LevelwiseCdga, ts: &[(Q, Vec<usize>, usize)]) -> Result<ModElem, DslError> {
    let free = base
        .free
        .as_ref()
        .expect("modules are built over free expansions");
    let mut out = ModElem::new();
    let alg = &free.algebra;
    for (c, atoms, k) in ts {
        let mut p = alg.constant(c.clone());
        for &i in atoms {
            p = alg.mul(&p, &alg.atom_poly(i));
        }
        for (m, s) in p {
            let b: BasisRef = free.locate(&m).ok_or_else(|| {
                DslError::Window(format!(
                    "coefficient {} is outside the window",
                    alg.mono_name(&m)
                ))
            })?;
            *out.entry((b, *k)).or_insert_with(Q::zero) += s;
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

impl Document {
    pub fn cdga(&self, name: &str) -> Option<&FreeCdgaPresentation> {
        self.cdgas.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }

    pub fn module(&self, name: &str) -> Option<&ModuleSpec> {
        self.modules.iter().find(|m| m.name == name)
    }

    pub fn map(&self, name: &str) -> Option<&MapSpec> {
        self.maps.iter().find(|m| m.name == name)
    }
}

impl ModuleSpec {
    pub fn build(&self, base: Arc<LevelwiseCdga>) -> Result<Connection, DslError> {
        let images = self
            .images
            .iter()
            .map(|t| to_mod_elem(&base, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Connection::from_highest_weight(base, &self.vecs, &images))
    }
}

impl MapSpec {
    pub fn build(
        &self,
        source: Connection,
        target: Connection,
    ) -> Result<ConnectionMorphism, DslError> {
        let images = self
            .images
            .iter()
            .map(|t| to_mod_elem(&source.base, t))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ConnectionMorphism::from_full(source, target, images))
    }
}

/// Expanded bases shared by the modules of a document.
pub fn expand_bases(
    doc: &Document,
    window: Window,
) -> Result<BTreeMap<String, Arc<LevelwiseCdga>>, DslError> {
    let mut out = BTreeMap::new();
    for (n, p) in &doc.cdgas {
        out.insert(
            n.clone(),
            Arc::new(crate::cdgacore::expand_free(p, window)?),
        );
    }
    Ok(out)
}
