//! Finite cell modules over a cdga `A`, stored as flat nilpotent
//! connections `Γ: M → IA ⊗ M` on a graded `G`-representation `M`.
//!
//! An element of `A ⊗ M` is a `ModElem`: coefficients on pairs (basis
//! vector of `A`, basis index of the carrier). The twisted differential is
//! `d_Γ(a ⊗ m) = da ⊗ m + (-1)^{|a|} a · D(m)` with `D = d_M + Γ`.

mod ops;

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::barhopf::BarError;
use crate::cdgacore::{BasisRef, CdgaError, Elem, LevelwiseCdga};
use crate::exactla::{sign, RationalMatrix, Q};
use crate::repsemi::{check_equivariant, GroupKind, IrrLabel, RepSpace, TorusWeight};

pub use ops::*;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CellError {
    #[error("connections live over different base algebras")]
    BaseMismatch,
    #[error("connection is not flat: {0}")]
    NotFlat(String),
    #[error("subspace is not closed under the differential: {0}")]
    NotClosed(String),
    #[error("not a morphism of connections: {0}")]
    InvalidMorphism(String),
    #[error("base algebra is not connected; replace it by a minimal model first")]
    BaseNotConnected,
    #[error("not a complex: {0}")]
    NotAComplex(String),
    #[error("term {0} of the complex is not in the heart")]
    NotInHeart(usize),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("invalid carrier: {0}")]
    BadCarrier(String),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
    #[error(transparent)]
    Bar(#[from] BarError),
}

/// `Σ c · a ⊗ m_i`.
pub type ModElem = BTreeMap<(BasisRef, usize), Q>;

pub fn me_add(acc: &mut ModElem, x: &ModElem, s: &Q) {
    for (k, c) in x {
        let e = acc.entry(*k).or_insert_with(Q::zero);
        *e += c * s;
        if e.is_zero() {
            acc.remove(k);
        }
    }
}

fn me_add_term(acc: &mut ModElem, k: (BasisRef, usize), c: Q) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(k).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&k);
    }
}

/// `a · x` for `a ∈ A` and `x ∈ A ⊗ M`.
pub fn me_left_mul(base: &LevelwiseCdga, a: &Elem, x: &ModElem) -> Result<ModElem, CdgaError> {
    let mut out = ModElem::new();
    for (&ar, ca) in a {
        for (&(b, j), cb) in x {
            for (t, c) in base.product(ar, b)? {
                me_add_term(&mut out, (t, j), c * ca * cb);
            }
        }
    }
    Ok(out)
}

/// Graded carrier: a `G`-representation in a weight basis with a
/// cohomological degree per basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Carrier {
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    pub space: RepSpace,
}

impl Carrier {
    pub fn empty(group: GroupKind) -> Self {
        Carrier {
            names: vec![],
            degrees: vec![],
            space: RepSpace::new(group, vec![]),
        }
    }

    /// One irreducible per entry; basis vectors `v` or `v.i`.
    pub fn from_vectors(group: GroupKind, vecs: &[(String, i64, IrrLabel)]) -> Self {
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (name, deg, label) in vecs {
            let d = label.dim();
            for i in 0..d {
                names.push(if d == 1 {
                    name.clone()
                } else {
                    format!("{name}.{i}")
                });
                degrees.push(*deg);
            }
        }
        let labels: Vec<IrrLabel> = vecs.iter().map(|v| v.2).collect();
        Carrier {
            names,
            degrees,
            space: RepSpace::from_labels(group, &labels),
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn group(&self) -> GroupKind {
        self.space.group
    }

    pub fn weight(&self, i: usize) -> TorusWeight {
        self.space.weights[i]
    }

    pub fn adams(&self, i: usize) -> i64 {
        self.weight(i).adams()
    }

    pub fn indices_of_degree(&self, n: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == n).collect()
    }

    pub fn distinct_degrees(&self) -> Vec<i64> {
        let mut d = self.degrees.clone();
        d.sort();
        d.dedup();
        d
    }

    pub fn direct_sum(&self, o: &Carrier) -> Carrier {
        let mut names = self.names.clone();
        names.extend(o.names.iter().cloned());
        let mut degrees = self.degrees.clone();
        degrees.extend(o.degrees.iter().copied());
        Carrier {
            names,
            degrees,
            space: self.space.direct_sum(&o.space),
        }
    }
}

/// A finite cell module over `base`.
#[derive(Debug, Clone)]
pub struct Connection {
    pub base: Arc<LevelwiseCdga>,
    pub carrier: Carrier,
    /// `d_M`, degree +1, `dm[(i, j)]` the coefficient of `m_i` in `d_M m_j`.
    pub dm: RationalMatrix,
    /// `Γ(m_j)`, terms with `a` in the augmentation ideal.
    pub gamma: Vec<ModElem>,
}

impl PartialEq for Connection {
    fn eq(&self, o: &Self) -> bool {
        same_base(&self.base, &o.base)
            && self.carrier == o.carrier
            && self.dm == o.dm
            && self.gamma == o.gamma
    }
}

pub fn same_base(a: &Arc<LevelwiseCdga>, b: &Arc<LevelwiseCdga>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn unit_ref(base: &LevelwiseCdga) -> BasisRef {
    base.unit.expect("base algebra has a unit")
}

impl Connection {
    /// Splits the full `D = d_M + Γ` into its unit and augmentation parts.
    pub fn from_full(base: Arc<LevelwiseCdga>, carrier: Carrier, d: Vec<ModElem>) -> Self {
        let n = carrier.dim();
        let u = unit_ref(&base);
        let mut dm = RationalMatrix::zeros(n, n);
        let mut gamma = Vec::with_capacity(n);
        for (j, x) in d.into_iter().enumerate() {
            let mut g = ModElem::new();
            for ((a, i), c) in x {
                if a == u {
                    dm[(i, j)] = c;
                } else {
                    g.insert((a, i), c);
                }
            }
            gamma.push(g);
        }
        Connection {
            base,
            carrier,
            dm,
            gamma,
        }
    }

    /// `Γ = 0`, `d_M = 0`.
    pub fn free(base: Arc<LevelwiseCdga>, carrier: Carrier) -> Self {
        let n = carrier.dim();
        Connection {
            base,
            carrier,
            dm: RationalMatrix::zeros(n, n),
            gamma: vec![ModElem::new(); n],
        }
    }

    /// `A` itself: one trivial vector in degree 0.
    pub fn unit(base: Arc<LevelwiseCdga>) -> Self {
        let g = base.group;
        Self::free(
            base,
            Carrier::from_vectors(g, &[("1".into(), 0, g.trivial())]),
        )
    }

    pub fn zero(base: Arc<LevelwiseCdga>) -> Self {
        let g = base.group;
        Self::free(base, Carrier::empty(g))
    }

    /// `A ⊗ V[-n]` for a single irreducible `V`.
    pub fn line(base: Arc<LevelwiseCdga>, name: &str, degree: i64, label: IrrLabel) -> Self {
        let g = base.group;
        Self::free(
            base,
            Carrier::from_vectors(g, &[(name.into(), degree, label)]),
        )
    }

    /// From the images `D(v.0)` of the highest-weight vector of each
    /// irreducible in `vecs`; the other images follow by lowering.
    pub fn from_highest_weight(
        base: Arc<LevelwiseCdga>,
        vecs: &[(String, i64, IrrLabel)],
        images: &[ModElem],
    ) -> Self {
        let carrier = Carrier::from_vectors(base.group, vecs);
        let mut d = Vec::new();
        for ((_, _, label), img) in vecs.iter().zip(images) {
            let mut cur = img.clone();
            for j in 0..label.dim() {
                if j > 0 {
                    cur = lower_me(&base, &carrier, &cur);
                }
                let s = label.lowering_scale(j).recip();
                d.push(cur.iter().map(|(k, c)| (*k, c * &s)).collect());
            }
        }
        Self::from_full(base, carrier, d)
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn group(&self) -> GroupKind {
        self.base.group
    }

    /// `D(m_j)` including the `1 ⊗ d_M m_j` part.
    pub fn d_full(&self, j: usize) -> ModElem {
        let u = unit_ref(&self.base);
        let mut out = self.gamma[j].clone();
        for i in 0..self.dim() {
            let c = &self.dm[(i, j)];
            if !c.is_zero() {
                out.insert((u, i), c.clone());
            }
        }
        out
    }

    pub fn basis_elem(&self, j: usize) -> ModElem {
        [((unit_ref(&self.base), j), Q::one())]
            .into_iter()
            .collect()
    }

    /// The twisted differential on `A ⊗ M`.
    pub fn apply_twisted(&self, x: &ModElem) -> Result<ModElem, CdgaError> {
        let mut out = ModElem::new();
        for (&(a, j), c) in x {
            for (t, ct) in self.base.diff_of(a)? {
                me_add_term(&mut out, (t, j), ct * c);
            }
            let s = sign(a.bd.n) * c;
            let prod = me_left_mul(&self.base, &LevelwiseCdga::basis_elem(a), &self.d_full(j))?;
            me_add(&mut out, &prod, &s);
        }
        Ok(out)
    }

    pub fn elem_to_string(&self, x: &ModElem) -> String {
        if x.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = x
            .iter()
            .map(|(&(a, i), c)| {
                format!(
                    "{}*{}⊗{}",
                    crate::exactla::fmt_q(c),
                    self.base.name(a),
                    self.carrier.names[i]
                )
            })
            .collect();
        parts.join(" + ")
    }

    /// Printed flatness: `d_M² = 0` and `dΓ + Γ² = 0` on each basis vector.
    pub fn flatness_printed(&self) -> Result<Vec<String>, CdgaError> {
        let mut bad = Vec::new();
        let dm2 = &self.dm * &self.dm;
        let u = unit_ref(&self.base);
        for j in 0..self.dim() {
            if (0..self.dim()).any(|i| !dm2[(i, j)].is_zero()) {
                bad.push(format!("d_M² {} ≠ 0", self.carrier.names[j]));
            }
            let mut x = ModElem::new();
            for (&(a, k), c) in &self.gamma[j] {
                // (d_A ⊗ 1) Γ
                for (t, ct) in self.base.diff_of(a)? {
                    me_add_term(&mut x, (t, k), ct * c);
                }
                // (σ ⊗ d_M) Γ and Γ², with σ(a) = (-1)^{|a|} a
                let s = sign(a.bd.n) * c;
                let mut dk = ModElem::new();
                for i in 0..self.dim() {
                    if !self.dm[(i, k)].is_zero() {
                        dk.insert((u, i), self.dm[(i, k)].clone());
                    }
                }
                me_add(&mut dk, &self.gamma[k], &Q::one());
                me_add(
                    &mut x,
                    &me_left_mul(&self.base, &LevelwiseCdga::basis_elem(a), &dk)?,
                    &s,
                );
            }
            // Γ ∘ d_M
            for i in 0..self.dim() {
                let c = &self.dm[(i, j)];
                if !c.is_zero() {
                    me_add(&mut x, &self.gamma[i], c);
                }
            }
            if !x.is_empty() {
                bad.push(format!(
                    "(dΓ + Γ²)({}) = {}",
                    self.carrier.names[j],
                    self.elem_to_string(&x)
                ));
            }
        }
        Ok(bad)
    }

    /// `d_Γ² = 0` on every `a ⊗ m` whose image is computable in the window.
    pub fn flatness_window(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for a in self.base.all_refs() {
            for j in 0..self.dim() {
                let x: ModElem = [((a, j), Q::one())].into_iter().collect();
                let Ok(y) = self.apply_twisted(&x) else {
                    continue;
                };
                let Ok(z) = self.apply_twisted(&y) else {
                    continue;
                };
                if !z.is_empty() {
                    bad.push(format!(
                        "d_Γ²({}⊗{}) = {}",
                        self.base.name(a),
                        self.carrier.names[j],
                        self.elem_to_string(&z)
                    ));
                }
            }
        }
        bad
    }

    /// Stages of the filtration `Γ(M_n) ⊂ IA ⊗ M_{n-1}`, if it exhausts `M`.
    pub fn nilpotence_filtration(&self) -> Option<Vec<Vec<usize>>> {
        let mut level = vec![usize::MAX; self.dim()];
        let mut stages = Vec::new();
        loop {
            let next: Vec<usize> = (0..self.dim())
                .filter(|&j| level[j] == usize::MAX)
                .filter(|&j| self.gamma[j].keys().all(|&(_, k)| level[k] != usize::MAX))
                .collect();
            if next.is_empty() {
                break;
            }
            for &j in &next {
                level[j] = stages.len();
            }
            stages.push(next);
        }
        level.iter().all(|&l| l != usize::MAX).then_some(stages)
    }

    pub fn check(&self) -> ConnectionReport {
        let mut r = ConnectionReport::default();
        let n = self.dim();
        for j in 0..n {
            for i in 0..n {
                if !self.dm[(i, j)].is_zero()
                    && self.carrier.degrees[i] != self.carrier.degrees[j] + 1
                {
                    r.degrees_ok = false;
                    r.witnesses.push(format!(
                        "d_M {} → {} has wrong degree",
                        self.carrier.names[j], self.carrier.names[i]
                    ));
                }
            }
            for &(a, k) in self.gamma[j].keys() {
                if a.bd.n + self.carrier.degrees[k] != self.carrier.degrees[j] + 1 {
                    r.degrees_ok = false;
                    r.witnesses.push(format!(
                        "Γ {} has a term of wrong degree",
                        self.carrier.names[j]
                    ));
                }
                match self.base.weight_opt(a) {
                    Some(wa) if wa + self.carrier.weight(k) == self.carrier.weight(j) => {}
                    Some(wa) if (wa + self.carrier.weight(k)).adams() != self.carrier.adams(j) => {
                        r.adams_preserving = false;
                        r.witnesses.push(format!(
                            "Γ {} has the term {}⊗{} of Adams degree {} instead of {}",
                            self.carrier.names[j],
                            self.base.name(a),
                            self.carrier.names[k],
                            (wa + self.carrier.weight(k)).adams(),
                            self.carrier.adams(j)
                        ));
                    }
                    _ => {
                        r.equivariant = false;
                        r.witnesses.push(format!(
                            "Γ {} does not preserve weights",
                            self.carrier.names[j]
                        ));
                    }
                }
            }
        }
        if let Err(e) = check_equivariant(&self.carrier.space, &self.carrier.space, &self.dm) {
            r.equivariant = false;
            r.witnesses.push(format!("d_M: {e}"));
        }
        if self.group().has_lie_action() {
            for (raise, what) in [(true, "e"), (false, "f")] {
                let op = if raise {
                    &self.carrier.space.raise
                } else {
                    &self.carrier.space.lower
                };
                for j in 0..n {
                    let lhs = op_me(&self.base, &self.carrier, &self.gamma[j], raise);
                    let mut rhs = ModElem::new();
                    for i in 0..n {
                        let c = &op[(i, j)];
                        if !c.is_zero() {
                            me_add(&mut rhs, &self.gamma[i], c);
                        }
                    }
                    if lhs != rhs {
                        r.equivariant = false;
                        r.witnesses.push(format!(
                            "Γ does not commute with {what} on {}",
                            self.carrier.names[j]
                        ));
                    }
                }
            }
        }
        r.adams_lower_bound = self
            .gamma
            .iter()
            .all(|g| g.keys().all(|(a, _)| a.bd.r >= 1));
        r.nilpotent = self.nilpotence_filtration().is_some();
        if !r.nilpotent {
            r.witnesses.push("Γ is not nilpotent".into());
        }
        match self.flatness_printed() {
            Ok(bad) => {
                r.flat_printed = bad.is_empty();
                r.witnesses.extend(bad);
            }
            Err(e) => {
                r.flat_printed = false;
                r.witnesses.push(format!("flatness: {e}"));
            }
        }
        let bad = self.flatness_window();
        r.flat_window = bad.is_empty();
        r.witnesses.extend(bad);
        r
    }

    pub fn require_flat(&self) -> Result<(), CellError> {
        let bad = self.flatness_printed()?;
        if bad.is_empty() {
            Ok(())
        } else {
            Err(CellError::NotFlat(bad.join("; ")))
        }
    }
}

/// Applies `e` or `f` to `A ⊗ M` as a derivation.
fn op_me(base: &LevelwiseCdga, carrier: &Carrier, x: &ModElem, raise: bool) -> ModElem {
    let op = if raise {
        &carrier.space.raise
    } else {
        &carrier.space.lower
    };
    let mut out = ModElem::new();
    for (&(a, j), c) in x {
        let single = LevelwiseCdga::basis_elem(a);
        let img = if raise {
            base.raise_elem(&single)
        } else {
            base.lower_elem(&single)
        };
        for (t, ct) in img {
            me_add_term(&mut out, (t, j), ct * c);
        }
        for i in 0..carrier.dim() {
            let ci = &op[(i, j)];
            if !ci.is_zero() {
                me_add_term(&mut out, (a, i), ci * c);
            }
        }
    }
    out
}

fn lower_me(base: &LevelwiseCdga, carrier: &Carrier, x: &ModElem) -> ModElem {
    op_me(base, carrier, x, false)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectionReport {
    pub flat_printed: bool,
    pub flat_window: bool,
    pub nilpotent: bool,
    pub adams_lower_bound: bool,
    pub equivariant: bool,
    pub adams_preserving: bool,
    pub degrees_ok: bool,
    pub witnesses: Vec<String>,
}

impl Default for ConnectionReport {
    fn default() -> Self {
        ConnectionReport {
            flat_printed: true,
            flat_window: true,
            nilpotent: true,
            adams_lower_bound: true,
            equivariant: true,
            adams_preserving: true,
            degrees_ok: true,
            witnesses: vec![],
        }
    }
}

impl ConnectionReport {
    pub fn ok(&self) -> bool {
        self.flat_printed
            && self.flat_window
            && self.nilpotent
            && self.equivariant
            && self.adams_preserving
            && self.degrees_ok
    }
}

/// `f = f_0 + f^+: M → A ⊗ N` of degree 0.
#[derive(Debug, Clone)]
pub struct ConnectionMorphism {
    pub source: Connection,
    pub target: Connection,
    pub f0: RationalMatrix,
    pub fplus: Vec<ModElem>,
}

impl ConnectionMorphism {
    pub fn from_full(source: Connection, target: Connection, images: Vec<ModElem>) -> Self {
        let u = unit_ref(&source.base);
        let mut f0 = RationalMatrix::zeros(target.dim(), source.dim());
        let mut fplus = Vec::new();
        for (j, x) in images.into_iter().enumerate() {
            let mut g = ModElem::new();
            for ((a, i), c) in x {
                if a == u {
                    f0[(i, j)] = c;
                } else {
                    g.insert((a, i), c);
                }
            }
            fplus.push(g);
        }
        ConnectionMorphism {
            source,
            target,
            f0,
            fplus,
        }
    }

    pub fn from_matrix(source: Connection, target: Connection, f0: RationalMatrix) -> Self {
        let n = source.dim();
        ConnectionMorphism {
            source,
            target,
            f0,
            fplus: vec![ModElem::new(); n],
        }
    }

    pub fn identity(c: &Connection) -> Self {
        Self::from_matrix(c.clone(), c.clone(), RationalMatrix::identity(c.dim()))
    }

    pub fn zero(source: &Connection, target: &Connection) -> Self {
        Self::from_matrix(
            source.clone(),
            target.clone(),
            RationalMatrix::zeros(target.dim(), source.dim()),
        )
    }

    pub fn full(&self, j: usize) -> ModElem {
        let u = unit_ref(&self.source.base);
        let mut out = self.fplus[j].clone();
        for i in 0..self.target.dim() {
            let c = &self.f0[(i, j)];
            if !c.is_zero() {
                out.insert((u, i), c.clone());
            }
        }
        out
    }

    /// `A`-linear extension to `A ⊗ M → A ⊗ N`.
    pub fn apply(&self, x: &ModElem) -> Result<ModElem, CdgaError> {
        let mut out = ModElem::new();
        for (&(a, j), c) in x {
            let p = me_left_mul(
                &self.target.base,
                &LevelwiseCdga::basis_elem(a),
                &self.full(j),
            )?;
            me_add(&mut out, &p, c);
        }
        Ok(out)
    }

    /// Degree, weight and the chain condition `d_{Γ_N} f = f d_{Γ_M}`.
    pub fn check(&self) -> Result<(), CellError> {
        if !same_base(&self.source.base, &self.target.base) {
            return Err(CellError::BaseMismatch);
        }
        let (s, t) = (&self.source.carrier, &self.target.carrier);
        for j in 0..s.dim() {
            for (&(a, i), _) in &self.full(j) {
                if a.bd.n + t.degrees[i] != s.degrees[j]
                    || self.source.base.weight(a) + t.weight(i) != s.weight(j)
                {
                    return Err(CellError::InvalidMorphism(format!(
                        "{} ↦ term in {} has wrong bidegree",
                        s.names[j], t.names[i]
                    )));
                }
            }
            let lhs = self.target.apply_twisted(&self.full(j))?;
            let rhs = self.apply(&self.source.d_full(j))?;
            if lhs != rhs {
                return Err(CellError::InvalidMorphism(format!(
                    "chain condition fails on {}",
                    s.names[j]
                )));
            }
        }
        Ok(())
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &ConnectionMorphism) -> Result<ConnectionMorphism, CellError> {
        let mut imgs = Vec::new();
        for j in 0..g.source.dim() {
            imgs.push(self.apply(&g.full(j))?);
        }
        Ok(Self::from_full(g.source.clone(), self.target.clone(), imgs))
    }

    pub fn is_zero(&self) -> bool {
        self.f0.is_zero() && self.fplus.iter().all(|x| x.is_empty())
    }
}

/// `M ⊗ M'` with `D(m ⊗ m') = D(m) ⊗ m' + (-1)^{|m|} m ⊗ D(m')`.
pub fn tensor(c1: &Connection, c2: &Connection) -> Result<Connection, CellError> {
    if !same_base(&c1.base, &c2.base) {
        return Err(CellError::BaseMismatch);
    }
    let (n1, n2) = (c1.dim(), c2.dim());
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            names.push(format!("{}⊗{}", c1.carrier.names[i], c2.carrier.names[j]));
            degrees.push(c1.carrier.degrees[i] + c2.carrier.degrees[j]);
        }
    }
    let carrier = Carrier {
        names,
        degrees,
        space: c1.carrier.space.tensor(&c2.carrier.space),
    };
    let mut d = Vec::new();
    for i in 0..n1 {
        let d1 = c1.d_full(i);
        let deg1 = c1.carrier.degrees[i];
        for j in 0..n2 {
            let mut x = ModElem::new();
            for (&(a, k), c) in &d1 {
                me_add_term(&mut x, (a, k * n2 + j), c.clone());
            }
            for (&(a, l), c) in &c2.d_full(j) {
                me_add_term(&mut x, (a, i * n2 + l), sign(deg1 * (1 + a.bd.n)) * c);
            }
            d.push(x);
        }
    }
    let out = Connection::from_full(c1.base.clone(), carrier, d);
    out.require_flat()?;
    Ok(out)
}

/// `M^∨` with the sign fixed by requiring evaluation `M^∨ ⊗ M → A` to be a
/// morphism: `D^∨(μ_i) = -Σ (-1)^{|m_i|(1+|a|)} c · a ⊗ μ_j` for each term
/// `c · a ⊗ m_i` of `D(m_j)`.
pub fn dual(c: &Connection) -> Result<Connection, CellError> {
    let n = c.dim();
    let carrier = Carrier {
        names: c.carrier.names.iter().map(|s| format!("{s}*")).collect(),
        degrees: c.carrier.degrees.iter().map(|d| -d).collect(),
        space: c.carrier.space.dual(),
    };
    let mut d = vec![ModElem::new(); n];
    for j in 0..n {
        for (&(a, i), x) in &c.d_full(j) {
            let s = -sign(c.carrier.degrees[i] * (1 + a.bd.n));
            me_add_term(&mut d[i], (a, j), s * x);
        }
    }
    let out = Connection::from_full(c.base.clone(), carrier, d);
    out.require_flat()?;
    Ok(out)
}

/// `M[k]`: degrees lowered by `k`; for odd `k` every term `a ⊗ m` of `D`
/// is multiplied by `-(-1)^{|a|}`.
pub fn shift(c: &Connection, k: i64) -> Connection {
    let mut out = c.clone();
    for d in &mut out.carrier.degrees {
        *d -= k;
    }
    if k.rem_euclid(2) == 1 {
        out.dm = out.dm.scale(&-Q::one());
        for g in &mut out.gamma {
            for ((a, _), x) in g.iter_mut() {
                *x = -sign(a.bd.n) * &*x;
            }
        }
    }
    out
}

pub fn direct_sum(c1: &Connection, c2: &Connection) -> Result<Connection, CellError> {
    if !same_base(&c1.base, &c2.base) {
        return Err(CellError::BaseMismatch);
    }
    let n1 = c1.dim();
    let carrier = c1.carrier.direct_sum(&c2.carrier);
    let mut d: Vec<ModElem> = (0..n1).map(|j| c1.d_full(j)).collect();
    for j in 0..c2.dim() {
        d.push(
            c2.d_full(j)
                .into_iter()
                .map(|((a, i), x)| ((a, i + n1), x))
                .collect(),
        );
    }
    Ok(Connection::from_full(c1.base.clone(), carrier, d))
}
