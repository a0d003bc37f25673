use std::collections::BTreeMap;

use num::{One, Zero};
use serde::Serialize;

use super::free::{FreeAlgebra, FreeCdgaPresentation, Monomial, Poly};
use super::{Bidegree, CdgaError, Window};
use crate::exactla::{sign, zero_vec, RationalMatrix, Vector, Q};
use crate::repsemi::{GroupKind, RepSpace, TorusWeight};

/// A basis vector of a levelwise cdga: index `idx` in the component at `bd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisRef {
    pub bd: Bidegree,
    pub idx: usize,
}

impl BasisRef {
    pub fn new(bd: Bidegree, idx: usize) -> Self {
        BasisRef { bd, idx }
    }
}

/// Sparse element; may mix bidegrees (useful for reporting corrupted data).
pub type Elem = BTreeMap<BasisRef, Q>;

pub fn elem_add(acc: &mut Elem, e: &Elem, s: &Q) {
    if s.is_zero() {
        return;
    }
    for (k, c) in e {
        let v = acc.entry(*k).or_insert_with(Q::zero);
        *v += c * s;
        if v.is_zero() {
            acc.remove(k);
        }
    }
}

pub fn elem_scaled(e: &Elem, s: &Q) -> Elem {
    let mut out = Elem::new();
    elem_add(&mut out, e, s);
    out
}

/// One bigraded piece: named basis vectors carrying the group action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub names: Vec<String>,
    pub space: RepSpace,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.names.len()
    }
}

/// Monomial bookkeeping kept when the algebra was expanded from a free presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeData {
    pub presentation: FreeCdgaPresentation,
    pub algebra: FreeAlgebra,
    pub monomials: BTreeMap<Bidegree, Vec<Monomial>>,
}

impl FreeData {
    pub fn locate(&self, m: &Monomial) -> Option<BasisRef> {
        let bd = self.algebra.mono_bidegree(m);
        let idx = self.monomials.get(&bd)?.iter().position(|x| x == m)?;
        Some(BasisRef { bd, idx })
    }
}

/// A cdga over `G` stored on a finite window of bidegrees.
///
/// The differential is known on sources of degree `< window.n_max`; a
/// product is known whenever the expected target bidegree lies in the
/// window. Asking for anything else fails with `WindowTooSmall`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelwiseCdga {
    pub group: GroupKind,
    pub window: Window,
    pub components: BTreeMap<Bidegree, Component>,
    pub diff: BTreeMap<BasisRef, Elem>,
    pub products: BTreeMap<(BasisRef, BasisRef), Elem>,
    pub unit: Option<BasisRef>,
    /// All components with `n` below this value are known to vanish,
    /// including those outside the window.
    pub zero_below: Option<i64>,
    pub free: Option<FreeData>,
}

impl LevelwiseCdga {
    /// The ground field `Q` in bidegree (0,0).
    pub fn unit_algebra(group: GroupKind, window: Window) -> Self {
        let p = FreeCdgaPresentation::new(group);
        expand_free(&p, window).expect("the ground field fits any window")
    }

    pub fn component(&self, bd: Bidegree) -> Option<&Component> {
        self.components.get(&bd)
    }

    pub fn dim(&self, bd: Bidegree) -> usize {
        self.components.get(&bd).map_or(0, |c| c.dim())
    }

    pub fn refs(&self, bd: Bidegree) -> impl Iterator<Item = BasisRef> {
        (0..self.dim(bd)).map(move |idx| BasisRef { bd, idx })
    }

    pub fn all_refs(&self) -> Vec<BasisRef> {
        self.components
            .keys()
            .flat_map(|&bd| self.refs(bd))
            .collect()
    }

    pub fn name(&self, b: BasisRef) -> &str {
        self.components
            .get(&b.bd)
            .and_then(|c| c.names.get(b.idx))
            .map_or("?", |s| s)
    }

    /// Torus weight of a basis vector; `None` for a dangling reference.
    pub fn weight_opt(&self, b: BasisRef) -> Option<TorusWeight> {
        self.components
            .get(&b.bd)
            .and_then(|c| c.space.weights.get(b.idx))
            .copied()
    }

    pub fn weight(&self, b: BasisRef) -> TorusWeight {
        self.components[&b.bd].space.weights[b.idx]
    }

    pub fn elem_to_string(&self, e: &Elem) -> String {
        if e.is_empty() {
            return "0".into();
        }
        e.iter()
            .map(|(b, c)| {
                let n = self.name(*b);
                if c.is_one() {
                    n.to_string()
                } else {
                    format!("{}*{}", crate::exactla::fmt_q(c), n)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn space(&self, bd: Bidegree) -> RepSpace {
        self.components
            .get(&bd)
            .map_or_else(|| RepSpace::new(self.group, vec![]), |c| c.space.clone())
    }

    pub fn diff_defined(&self, bd: Bidegree) -> bool {
        bd.n < self.window.n_max && self.window.contains(bd)
    }

    pub fn diff_of(&self, b: BasisRef) -> Result<Elem, CdgaError> {
        if !self.diff_defined(b.bd) {
            return Err(CdgaError::WindowTooSmall(format!(
                "differential out of {} not stored",
                b.bd
            )));
        }
        Ok(self.diff.get(&b).cloned().unwrap_or_default())
    }

    pub fn apply_d(&self, e: &Elem) -> Result<Elem, CdgaError> {
        let mut out = Elem::new();
        for (b, c) in e {
            elem_add(&mut out, &self.diff_of(*b)?, c);
        }
        Ok(out)
    }

    pub fn product(&self, a: BasisRef, b: BasisRef) -> Result<Elem, CdgaError> {
        let t = a.bd + b.bd;
        if !self.window.contains(t) {
            return Err(CdgaError::WindowTooSmall(format!("product lands in {t}")));
        }
        Ok(self.products.get(&(a, b)).cloned().unwrap_or_default())
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Result<Elem, CdgaError> {
        let mut out = Elem::new();
        for (a, ca) in x {
            for (b, cb) in y {
                elem_add(&mut out, &self.product(*a, *b)?, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn basis_elem(b: BasisRef) -> Elem {
        Elem::from([(b, Q::one())])
    }

    pub fn unit_elem(&self) -> Elem {
        self.unit.map(Self::basis_elem).unwrap_or_default()
    }

    /// Dense matrix of `d: A(n,r) -> A(n+1,r)`.
    pub fn diff_matrix(&self, bd: Bidegree) -> Result<RationalMatrix, CdgaError> {
        let tgt = bd.shift(1, 0);
        let mut m = RationalMatrix::zeros(self.dim(tgt), self.dim(bd));
        if self.dim(bd) == 0 {
            return Ok(m);
        }
        for b in self.refs(bd) {
            for (t, c) in self.diff_of(b)? {
                if t.bd == tgt {
                    m[(t.idx, b.idx)] = c;
                }
            }
        }
        Ok(m)
    }

    pub fn to_vec(&self, bd: Bidegree, e: &Elem) -> Vector {
        let mut v = zero_vec(self.dim(bd));
        for (b, c) in e {
            if b.bd == bd {
                v[b.idx] = c.clone();
            }
        }
        v
    }

    pub fn from_vec(&self, bd: Bidegree, v: &[Q]) -> Elem {
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (BasisRef { bd, idx: i }, c.clone()))
            .collect()
    }

    fn apply_op(&self, e: &Elem, raise: bool) -> Elem {
        let mut out = Elem::new();
        for (b, c) in e {
            let Some(comp) = self.components.get(&b.bd) else {
                continue;
            };
            let m = if raise {
                &comp.space.raise
            } else {
                &comp.space.lower
            };
            for i in 0..m.rows() {
                let x = &m[(i, b.idx)];
                if !x.is_zero() {
                    elem_add(
                        &mut out,
                        &Self::basis_elem(BasisRef { bd: b.bd, idx: i }),
                        &(x * c),
                    );
                }
            }
        }
        out
    }

    pub fn raise_elem(&self, e: &Elem) -> Elem {
        self.apply_op(e, true)
    }

    pub fn lower_elem(&self, e: &Elem) -> Elem {
        self.apply_op(e, false)
    }

    /// Converts a polynomial of the underlying free algebra into an element.
    pub fn poly_to_elem(&self, p: &Poly) -> Result<Elem, CdgaError> {
        let free = self
            .free
            .as_ref()
            .ok_or_else(|| CdgaError::WindowTooSmall("not a free expansion".into()))?;
        let mut out = Elem::new();
        for (m, c) in p {
            let b = free.locate(m).ok_or_else(|| {
                CdgaError::WindowTooSmall(format!(
                    "monomial {} outside the window",
                    free.algebra.mono_name(m)
                ))
            })?;
            elem_add(&mut out, &Self::basis_elem(b), c);
        }
        Ok(out)
    }

    /// Basis refs of the augmentation ideal: everything except the unit.
    pub fn augmentation_refs(&self) -> Vec<BasisRef> {
        self.all_refs()
            .into_iter()
            .filter(|&b| Some(b) != self.unit)
            .collect()
    }
}

/// Expands a free presentation on a window. The differential is stored on
/// sources of degree `< window.n_max`.
pub fn expand_free(p: &FreeCdgaPresentation, window: Window) -> Result<LevelwiseCdga, CdgaError> {
    for g in &p.generators {
        if g.degree < 1 {
            return Err(CdgaError::InvalidGenerator(g.name.clone()));
        }
    }
    let alg = p.algebra();
    let monomials = alg.enumerate(&window);
    let raise_img = alg.raise_images();
    let lower_img = alg.lower_images();
    let atom_d = p.atom_differentials();
    let free = FreeData {
        presentation: p.clone(),
        algebra: alg.clone(),
        monomials,
    };
    let locate = |m: &Monomial| {
        free.locate(m).ok_or_else(|| {
            let bd = alg.mono_bidegree(m);
            CdgaError::WindowTooSmall(format!(
                "{} in {bd} is outside the window {window}",
                alg.mono_name(m)
            ))
        })
    };
    let poly_elem = |poly: &Poly| -> Result<Elem, CdgaError> {
        let mut e = Elem::new();
        for (m, c) in poly {
            e.insert(locate(m)?, c.clone());
        }
        Ok(e)
    };

    let mut components = BTreeMap::new();
    for (&bd, monos) in &free.monomials {
        let weights = monos.iter().map(|m| alg.mono_weight(m)).collect();
        let mut space = RepSpace::new(p.group, weights);
        if p.group.has_lie_action() {
            for (j, m) in monos.iter().enumerate() {
                let mp = Poly::from([(m.clone(), Q::one())]);
                for (img, dst) in [
                    (&raise_img, &mut space.raise),
                    (&lower_img, &mut space.lower),
                ] {
                    for (t, c) in alg.derivation(&mp, img, false) {
                        let b = locate(&t)?;
                        dst[(b.idx, j)] = c;
                    }
                }
            }
        }
        let names = monos.iter().map(|m| alg.mono_name(m)).collect();
        components.insert(bd, Component { names, space });
    }

    let mut diff = BTreeMap::new();
    let mut products = BTreeMap::new();
    for (&bd, monos) in &free.monomials {
        for (i, m) in monos.iter().enumerate() {
            let b = BasisRef { bd, idx: i };
            let mp = Poly::from([(m.clone(), Q::one())]);
            if bd.n < window.n_max {
                let dm = poly_elem(&alg.derivation(&mp, &atom_d, true))?;
                if !dm.is_empty() {
                    diff.insert(b, dm);
                }
            }
            for (&bd2, monos2) in &free.monomials {
                if !window.contains(bd + bd2) {
                    continue;
                }
                for (j, m2) in monos2.iter().enumerate() {
                    if let Some((neg, prod)) = alg.mul_mono(m, m2) {
                        let c = if neg { -Q::one() } else { Q::one() };
                        products.insert(
                            (b, BasisRef { bd: bd2, idx: j }),
                            Elem::from([(locate(&prod)?, c)]),
                        );
                    }
                }
            }
        }
    }
    let unit = free.locate(&alg.one());
    Ok(LevelwiseCdga {
        group: p.group,
        window,
        components,
        diff,
        products,
        unit,
        zero_below: Some(0),
        free: Some(free),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    DifferentialDegree,
    DifferentialAdams,
    DSquared,
    Leibniz,
    GradedCommutativity,
    Associativity,
    Unit,
    ProductDegree,
    AdamsAdditivity,
    Equivariance,
    TrivialSummand,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CdgaReport {
    pub violations: Vec<Violation>,
}

impl CdgaReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, witness: String) {
        self.violations.push(Violation { kind, witness });
    }
}

/// Checks every cdga axiom that the window allows one to evaluate.
pub fn check_cdga(a: &LevelwiseCdga) -> CdgaReport {
    use ViolationKind::*;
    let mut rep = CdgaReport::default();
    let refs = a.all_refs();
    let gl2 = a.group.has_lie_action();
    let nm = |b: BasisRef| a.name(b).to_string();

    // Unit and trivial summand.
    match a.unit {
        Some(u) if u.bd == Bidegree::zero() && a.weight(u) == TorusWeight(0, 0) => {
            if !a.diff_of(u).map(|d| d.is_empty()).unwrap_or(true) {
                rep.push(Unit, "d(1) != 0".into());
            }
            for &b in &refs {
                let e = LevelwiseCdga::basis_elem(b);
                for (l, r) in [(u, b), (b, u)] {
                    if let Ok(p) = a.product(l, r) {
                        if p != e {
                            rep.push(Unit, format!("{} * {} != {}", nm(l), nm(r), nm(b)));
                        }
                    }
                }
            }
        }
        _ => rep.push(
            TrivialSummand,
            "no trivial unit vector in bidegree (0,0)".into(),
        ),
    }

    // Differential: bidegree, equivariance, d^2.
    for &b in &refs {
        let Ok(db) = a.diff_of(b) else { continue };
        let w = a.weight(b);
        for t in db.keys() {
            if t.bd.n != b.bd.n + 1 {
                rep.push(
                    DifferentialDegree,
                    format!("d({}) has a term {} in {}", nm(b), nm(*t), t.bd),
                );
            }
            if t.bd.r != b.bd.r {
                rep.push(
                    DifferentialAdams,
                    format!(
                        "d({}) has a term {} in Adams degree {}",
                        nm(b),
                        nm(*t),
                        t.bd.r
                    ),
                );
            }
            if a.weight_opt(*t) != Some(w) {
                rep.push(
                    Equivariance,
                    format!("d({}) does not preserve the weight {w}", nm(b)),
                );
            }
        }
        if gl2 {
            for raise in [true, false] {
                let op = |e: &Elem| {
                    if raise {
                        a.raise_elem(e)
                    } else {
                        a.lower_elem(e)
                    }
                };
                let lhs = a.apply_d(&op(&LevelwiseCdga::basis_elem(b)));
                if let Ok(lhs) = lhs {
                    if lhs != op(&db) {
                        let which = if raise { "e" } else { "f" };
                        rep.push(
                            Equivariance,
                            format!("d does not commute with {which} on {}", nm(b)),
                        );
                    }
                }
            }
        }
        if let Ok(ddb) = a.apply_d(&db) {
            if !ddb.is_empty() {
                rep.push(
                    DSquared,
                    format!("d(d({})) = {}", nm(b), a.elem_to_string(&ddb)),
                );
            }
        }
    }

    // Products.
    for &x in &refs {
        for &y in &refs {
            let Ok(xy) = a.product(x, y) else { continue };
            let t = x.bd + y.bd;
            for k in xy.keys() {
                if k.bd.n != t.n {
                    rep.push(
                        ProductDegree,
                        format!("{} * {} has a term in {}", nm(x), nm(y), k.bd),
                    );
                }
                if k.bd.r != t.r {
                    rep.push(
                        AdamsAdditivity,
                        format!(
                            "{} * {} has a term in Adams degree {}",
                            nm(x),
                            nm(y),
                            k.bd.r
                        ),
                    );
                }
                if a.weight_opt(*k) != Some(a.weight(x) + a.weight(y)) {
                    rep.push(
                        Equivariance,
                        format!("{} * {} does not add weights", nm(x), nm(y)),
                    );
                }
            }
            if gl2 {
                for raise in [true, false] {
                    let op = |e: &Elem| {
                        if raise {
                            a.raise_elem(e)
                        } else {
                            a.lower_elem(e)
                        }
                    };
                    let ex = op(&LevelwiseCdga::basis_elem(x));
                    let ey = op(&LevelwiseCdga::basis_elem(y));
                    if let (Ok(l), Ok(r2)) = (
                        a.mul(&ex, &LevelwiseCdga::basis_elem(y)),
                        a.mul(&LevelwiseCdga::basis_elem(x), &ey),
                    ) {
                        let mut rhs = l;
                        elem_add(&mut rhs, &r2, &Q::one());
                        if op(&xy) != rhs {
                            rep.push(
                                Equivariance,
                                format!("product {} * {} is not equivariant", nm(x), nm(y)),
                            );
                        }
                    }
                }
            }
            if x < y {
                if let Ok(yx) = a.product(y, x) {
                    if elem_scaled(&yx, &sign(x.bd.n * y.bd.n)) != xy {
                        rep.push(GradedCommutativity, format!("({}, {})", nm(x), nm(y)));
                    }
                }
            }
            // Leibniz.
            if let (Ok(dx), Ok(dy), Ok(dxy)) = (a.diff_of(x), a.diff_of(y), a.apply_d(&xy)) {
                let lhs = a.mul(&dx, &LevelwiseCdga::basis_elem(y));
                let rhs = a.mul(&LevelwiseCdga::basis_elem(x), &dy);
                if let (Ok(mut l), Ok(r)) = (lhs, rhs) {
                    elem_add(&mut l, &r, &sign(x.bd.n));
                    if l != dxy {
                        rep.push(Leibniz, format!("({}, {})", nm(x), nm(y)));
                    }
                }
            }
        }
    }

    // Associativity on triples avoiding the unit.
    let ia: Vec<BasisRef> = a.augmentation_refs();
    for &x in &ia {
        for &y in &ia {
            let Ok(xy) = a.product(x, y) else { continue };
            for &z in &ia {
                if !a.window.contains(x.bd + y.bd + z.bd) {
                    continue;
                }
                let (Ok(yz), Ok(l)) = (a.product(y, z), a.mul(&xy, &LevelwiseCdga::basis_elem(z)))
                else {
                    continue;
                };
                let Ok(r) = a.mul(&LevelwiseCdga::basis_elem(x), &yz) else {
                    continue;
                };
                if l != r {
                    rep.push(Associativity, format!("({}, {}, {})", nm(x), nm(y), nm(z)));
                }
            }
        }
    }
    rep
}
