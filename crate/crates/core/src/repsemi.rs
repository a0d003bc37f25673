//! Rational representations of `G_m` and `GL_2` with the scalar central
//! cocharacter.
//!
//! Every space in this crate is carried in a basis of torus weight vectors.
//! For `GL_2` a vector `X^{a-i} Y^i ⊗ det^b` of `Sym^a ⊗ det^b` has torus
//! weight `(a - i + b, i + b)`; for `G_m` the weight `n` is stored as `(n, 0)`.
//! The Adams degree is minus the central weight, i.e. `-(w.0 + w.1)` in both
//! cases. Equivariance under `GL_2` is tested with the raising operator
//! `e = X ∂/∂Y` and lowering operator `f = Y ∂/∂X`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{One, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exactla::{
    is_zero_vec, kernel_basis, q, solve, span_basis, unit_vec, zero_vec, RationalMatrix, Vector, Q,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("bad representation label `{0}`")]
    BadLabel(String),
    #[error("label {label} does not belong to group {group}")]
    WrongGroup { label: String, group: GroupKind },
    #[error("map is not equivariant: {0}")]
    NotEquivariant(String),
    #[error("subspace is not stable under the group action")]
    NotStable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GroupKind {
    Gm,
    GL2,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Gm => write!(f, "Gm"),
            GroupKind::GL2 => write!(f, "GL2"),
        }
    }
}

impl GroupKind {
    pub fn trivial(self) -> IrrLabel {
        match self {
            GroupKind::Gm => IrrLabel::Gm { weight: 0 },
            GroupKind::GL2 => IrrLabel::GL2 { sym: 0, det: 0 },
        }
    }

    /// The fixed faithful representation; it sits in Adams degree 1.
    pub fn faithful(self) -> IrrLabel {
        match self {
            GroupKind::Gm => IrrLabel::Gm { weight: -1 },
            GroupKind::GL2 => IrrLabel::GL2 { sym: 1, det: -1 },
        }
    }

    pub fn has_lie_action(self) -> bool {
        matches!(self, GroupKind::GL2)
    }

    /// Whether a torus weight is the highest weight of some irreducible.
    pub fn is_dominant(self, w: TorusWeight) -> bool {
        match self {
            GroupKind::Gm => w.1 == 0,
            GroupKind::GL2 => w.0 >= w.1,
        }
    }

    /// The irreducible with highest weight `w`.
    pub fn label_of_highest(self, w: TorusWeight) -> Option<IrrLabel> {
        if !self.is_dominant(w) {
            return None;
        }
        Some(match self {
            GroupKind::Gm => IrrLabel::Gm { weight: w.0 },
            GroupKind::GL2 => IrrLabel::GL2 {
                sym: (w.0 - w.1) as u32,
                det: w.1,
            },
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TorusWeight(pub i64, pub i64);

impl TorusWeight {
    pub fn adams(self) -> i64 {
        -(self.0 + self.1)
    }

    pub fn neg(self) -> TorusWeight {
        TorusWeight(-self.0, -self.1)
    }

    pub fn raised(self) -> TorusWeight {
        TorusWeight(self.0 + 1, self.1 - 1)
    }
}

impl std::ops::Add for TorusWeight {
    type Output = TorusWeight;
    fn add(self, o: TorusWeight) -> TorusWeight {
        TorusWeight(self.0 + o.0, self.1 + o.1)
    }
}

impl std::iter::Sum for TorusWeight {
    fn sum<I: Iterator<Item = TorusWeight>>(iter: I) -> TorusWeight {
        iter.fold(TorusWeight::default(), |a, b| a + b)
    }
}

impl fmt::Display for TorusWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

/// An irreducible representation label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrLabel {
    /// The character `λ ↦ λ^weight` of `G_m`.
    Gm { weight: i64 },
    /// `Sym^sym(std) ⊗ det^det`.
    GL2 { sym: u32, det: i64 },
}

impl IrrLabel {
    pub fn group(self) -> GroupKind {
        match self {
            IrrLabel::Gm { .. } => GroupKind::Gm,
            IrrLabel::GL2 { .. } => GroupKind::GL2,
        }
    }

    pub fn dim(self) -> usize {
        match self {
            IrrLabel::Gm { .. } => 1,
            IrrLabel::GL2 { sym, .. } => sym as usize + 1,
        }
    }

    pub fn central_weight(self) -> i64 {
        match self {
            IrrLabel::Gm { weight } => weight,
            IrrLabel::GL2 { sym, det } => sym as i64 + 2 * det,
        }
    }

    pub fn adams(self) -> i64 {
        -self.central_weight()
    }

    pub fn dual(self) -> IrrLabel {
        match self {
            IrrLabel::Gm { weight } => IrrLabel::Gm { weight: -weight },
            IrrLabel::GL2 { sym, det } => IrrLabel::GL2 {
                sym,
                det: -(sym as i64) - det,
            },
        }
    }

    pub fn is_trivial(self) -> bool {
        self == self.group().trivial()
    }

    /// Torus weight of the `i`-th monomial basis vector `X^{a-i} Y^i`.
    pub fn component_weight(self, i: usize) -> TorusWeight {
        match self {
            IrrLabel::Gm { weight } => TorusWeight(weight, 0),
            IrrLabel::GL2 { sym, det } => {
                let i = i as i64;
                TorusWeight(sym as i64 - i + det, i + det)
            }
        }
    }

    pub fn highest_weight(self) -> TorusWeight {
        self.component_weight(0)
    }

    pub fn weights(self) -> Vec<TorusWeight> {
        (0..self.dim()).map(|i| self.component_weight(i)).collect()
    }

    /// Raising operator on the monomial basis: `e(v_i) = i v_{i-1}`.
    pub fn raise_matrix(self) -> RationalMatrix {
        let n = self.dim();
        let mut m = RationalMatrix::zeros(n, n);
        for i in 1..n {
            m[(i - 1, i)] = q(i as i64);
        }
        m
    }

    /// Lowering operator on the monomial basis: `f(v_i) = (a - i) v_{i+1}`.
    pub fn lower_matrix(self) -> RationalMatrix {
        let n = self.dim();
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            m[(i + 1, i)] = q((n - 1 - i) as i64);
        }
        m
    }

    /// `a! / (a - j)!`: the scalar with `f^j(v_0) = c_j v_j`.
    pub fn lowering_scale(self, j: usize) -> Q {
        let a = self.dim() as i64 - 1;
        (0..j as i64).fold(Q::one(), |acc, t| acc * q(a - t))
    }
}

pub fn adams_of(label: IrrLabel) -> i64 {
    label.adams()
}

pub fn dual(label: IrrLabel) -> IrrLabel {
    label.dual()
}

impl fmt::Display for IrrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrLabel::Gm { weight } => write!(f, "w({weight})"),
            IrrLabel::GL2 { sym, det } => write!(f, "sym({sym})det({det})"),
        }
    }
}

impl Serialize for IrrLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_paren_int(s: &str, head: &str) -> Option<(i64, usize)> {
    let rest = s.strip_prefix(head)?.strip_prefix('(')?;
    let close = rest.find(')')?;
    let n = rest[..close].trim().parse().ok()?;
    Some((n, head.len() + close + 2))
}

impl FromStr for IrrLabel {
    type Err = RepError;
    fn from_str(s: &str) -> Result<Self, RepError> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || RepError::BadLabel(s.to_string());
        if let Some((n, used)) = parse_paren_int(&t, "w") {
            if used == t.len() {
                return Ok(IrrLabel::Gm { weight: n });
            }
        }
        let (a, used) = parse_paren_int(&t, "sym").ok_or_else(bad)?;
        let (b, used2) = parse_paren_int(&t[used..], "det").ok_or_else(bad)?;
        if used + used2 != t.len() || a < 0 {
            return Err(bad());
        }
        Ok(IrrLabel::GL2 {
            sym: a as u32,
            det: b,
        })
    }
}

/// A finite direct sum of irreducibles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SemisimpleObject {
    mult: BTreeMap<IrrLabel, usize>,
}

impl Serialize for SemisimpleObject {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(self.mult.len()))?;
        for (k, v) in &self.mult {
            m.serialize_entry(&k.to_string(), v)?;
        }
        m.end()
    }
}

impl SemisimpleObject {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(label: IrrLabel, mult: usize) -> Self {
        let mut s = Self::zero();
        s.add_label(label, mult);
        s
    }

    pub fn from_labels(labels: &[IrrLabel]) -> Self {
        let mut s = Self::zero();
        for &l in labels {
            s.add_label(l, 1);
        }
        s
    }

    pub fn add_label(&mut self, label: IrrLabel, mult: usize) {
        if mult > 0 {
            *self.mult.entry(label).or_insert(0) += mult;
        }
    }

    pub fn multiplicity(&self, label: IrrLabel) -> usize {
        self.mult.get(&label).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (IrrLabel, usize)> + '_ {
        self.mult.iter().map(|(&l, &m)| (l, m))
    }

    pub fn labels(&self) -> Vec<IrrLabel> {
        self.mult.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.mult.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.mult.iter().map(|(l, m)| l.dim() * m).sum()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut s = self.clone();
        for (l, m) in other.iter() {
            s.add_label(l, m);
        }
        s
    }

    pub fn dual(&self) -> Self {
        let mut s = Self::zero();
        for (l, m) in self.iter() {
            s.add_label(l.dual(), m);
        }
        s
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut s = Self::zero();
        for (x, mx) in self.iter() {
            for (y, my) in other.iter() {
                for (l, ml) in tensor_labels(x, y).iter() {
                    s.add_label(l, mx * my * ml);
                }
            }
        }
        s
    }

    pub fn weights(&self) -> Vec<TorusWeight> {
        self.iter()
            .flat_map(|(l, m)| std::iter::repeat(l.weights()).take(m).flatten())
            .collect()
    }

    /// Decomposes a torus character into irreducibles by peeling off
    /// highest weights. Returns `None` if the character is not the
    /// character of a representation.
    pub fn from_character(group: GroupKind, weights: &[TorusWeight]) -> Option<Self> {
        let mut count: BTreeMap<TorusWeight, i64> = BTreeMap::new();
        for &w in weights {
            *count.entry(w).or_insert(0) += 1;
        }
        let mut out = Self::zero();
        loop {
            count.retain(|_, c| *c != 0);
            if count.values().any(|&c| c < 0) {
                return None;
            }
            // Highest weight: maximal first coordinate within the largest central weight class.
            let Some((&top, &m)) = count.iter().max_by_key(|(w, _)| (w.0 + w.1, w.0)) else {
                return Some(out);
            };
            let label = group.label_of_highest(top)?;
            for w in label.weights() {
                *count.entry(w).or_insert(0) -= m;
            }
            out.add_label(label, m as usize);
        }
    }

    /// Minimal and maximal Adams degree of the object.
    pub fn adams_range(&self) -> Option<(i64, i64)> {
        let a: Vec<i64> = self.mult.keys().map(|l| l.adams()).collect();
        Some((*a.iter().min()?, *a.iter().max()?))
    }
}

fn tensor_labels(x: IrrLabel, y: IrrLabel) -> SemisimpleObject {
    match (x, y) {
        (IrrLabel::Gm { weight: a }, IrrLabel::Gm { weight: b }) => {
            SemisimpleObject::single(IrrLabel::Gm { weight: a + b }, 1)
        }
        (IrrLabel::GL2 { sym: a, det: bx }, IrrLabel::GL2 { sym: b, det: by }) => {
            let mut s = SemisimpleObject::zero();
            for k in 0..=a.min(b) {
                s.add_label(
                    IrrLabel::GL2 {
                        sym: a + b - 2 * k,
                        det: k as i64 + bx + by,
                    },
                    1,
                );
            }
            s
        }
        _ => panic!("tensor of labels from different groups"),
    }
}

pub fn hom_dim(x: &SemisimpleObject, y: &SemisimpleObject) -> usize {
    x.iter().map(|(l, m)| m * y.multiplicity(l)).sum()
}

pub fn invariants_dim(x: &SemisimpleObject) -> usize {
    x.iter()
        .filter(|(l, _)| l.is_trivial())
        .map(|(_, m)| m)
        .sum()
}

/// A weight basis with the `gl_2` raising and lowering operators.
/// For `G_m` both operators are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepSpace {
    pub group: GroupKind,
    pub weights: Vec<TorusWeight>,
    pub raise: RationalMatrix,
    pub lower: RationalMatrix,
}

impl RepSpace {
    pub fn new(group: GroupKind, weights: Vec<TorusWeight>) -> Self {
        let n = weights.len();
        RepSpace {
            group,
            weights,
            raise: RationalMatrix::zeros(n, n),
            lower: RationalMatrix::zeros(n, n),
        }
    }

    /// Direct sum of irreducibles, each in its monomial basis.
    pub fn from_labels(group: GroupKind, labels: &[IrrLabel]) -> Self {
        let mut s = RepSpace::new(group, vec![]);
        for &l in labels {
            s = s.direct_sum(&RepSpace {
                group,
                weights: l.weights(),
                raise: l.raise_matrix(),
                lower: l.lower_matrix(),
            });
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn direct_sum(&self, other: &RepSpace) -> RepSpace {
        let n = self.dim() + other.dim();
        let mut raise = RationalMatrix::zeros(n, n);
        let mut lower = RationalMatrix::zeros(n, n);
        let off = self.dim();
        for (src, dst_off) in [(self, 0), (other, off)] {
            for r in 0..src.dim() {
                for c in 0..src.dim() {
                    raise[(r + dst_off, c + dst_off)] = src.raise[(r, c)].clone();
                    lower[(r + dst_off, c + dst_off)] = src.lower[(r, c)].clone();
                }
            }
        }
        let mut weights = self.weights.clone();
        weights.extend(other.weights.iter().copied());
        RepSpace {
            group: self.group,
            weights,
            raise,
            lower,
        }
    }

    pub fn object(&self) -> SemisimpleObject {
        SemisimpleObject::from_character(self.group, &self.weights)
            .expect("weight basis of a representation has a valid character")
    }

    pub fn indices_of_weight(&self, w: TorusWeight) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weights[i] == w).collect()
    }

    pub fn distinct_weights(&self) -> Vec<TorusWeight> {
        let mut ws = self.weights.clone();
        ws.sort();
        ws.dedup();
        ws
    }

    /// Weight of a vector if it is a (nonzero) weight vector.
    pub fn weight_of(&self, v: &[Q]) -> Option<TorusWeight> {
        let mut w = None;
        for (i, x) in v.iter().enumerate() {
            if !x.is_zero() {
                match w {
                    None => w = Some(self.weights[i]),
                    Some(w0) if w0 != self.weights[i] => return None,
                    _ => {}
                }
            }
        }
        w
    }

    /// Highest-weight vectors of weight `w` inside `span(sub)` (or the whole
    /// space when `sub` is `None`), as full-length vectors.
    pub fn highest_weight_vectors(&self, w: TorusWeight, sub: Option<&[Vector]>) -> Vec<Vector> {
        if !self.group.is_dominant(w) {
            return vec![];
        }
        let n = self.dim();
        let candidates: Vec<Vector> = match sub {
            None => self
                .indices_of_weight(w)
                .into_iter()
                .map(|i| unit_vec(n, i))
                .collect(),
            Some(vs) => {
                let pieces: Vec<Vector> = vs.iter().map(|v| self.project_weight(v, w)).collect();
                span_basis(n, &pieces)
            }
        };
        if candidates.is_empty() {
            return vec![];
        }
        if !self.group.has_lie_action() {
            return candidates;
        }
        let images: Vec<Vector> = candidates.iter().map(|c| self.raise.apply(c)).collect();
        let m = RationalMatrix::from_columns(n, &images);
        kernel_basis(&m)
            .into_iter()
            .map(|k| {
                let mut v = zero_vec(n);
                for (c, x) in candidates.iter().zip(&k) {
                    crate::exactla::axpy(&mut v, x, c);
                }
                v
            })
            .filter(|v| !is_zero_vec(v))
            .collect()
    }

    pub fn project_weight(&self, v: &[Q], w: TorusWeight) -> Vector {
        v.iter()
            .enumerate()
            .map(|(i, x)| {
                if self.weights[i] == w {
                    x.clone()
                } else {
                    Q::zero()
                }
            })
            .collect()
    }

    /// Irreducible string generated by a highest-weight vector, normalized
    /// so that it matches the monomial basis of the label.
    pub fn lowering_string(&self, hw: &[Q], label: IrrLabel) -> Vec<Vector> {
        let mut out = vec![hw.to_vec()];
        let mut cur = hw.to_vec();
        for j in 1..label.dim() {
            cur = self.lower.apply(&cur);
            let s = label.lowering_scale(j).recip();
            out.push(cur.iter().map(|x| x * &s).collect());
        }
        out
    }

    /// Decomposes the subspace spanned by `sub` (the whole space if `None`)
    /// into irreducible strings. Deterministic: highest weights in
    /// increasing order, highest-weight bases by leftmost pivots.
    pub fn decompose(&self, sub: Option<&[Vector]>) -> Vec<(IrrLabel, Vec<Vector>)> {
        let mut out = Vec::new();
        let ws: Vec<TorusWeight> = match sub {
            None => self.distinct_weights(),
            Some(vs) => {
                let mut ws: Vec<TorusWeight> = vs
                    .iter()
                    .flat_map(|v| {
                        v.iter()
                            .enumerate()
                            .filter(|(_, x)| !x.is_zero())
                            .map(|(i, _)| self.weights[i])
                    })
                    .collect();
                ws.sort();
                ws.dedup();
                ws
            }
        };
        for w in ws {
            let Some(label) = self.group.label_of_highest(w) else {
                continue;
            };
            for hw in self.highest_weight_vectors(w, sub) {
                out.push((label, self.lowering_string(&hw, label)));
            }
        }
        out
    }

    /// Dominant weights occurring in the space, ascending.
    pub fn dominant_weights(&self) -> Vec<TorusWeight> {
        self.distinct_weights()
            .into_iter()
            .filter(|&w| self.group.is_dominant(w))
            .collect()
    }

    /// Complement of the stable subspace `sub` inside the stable subspace
    /// `total` (whole space if `None`), as irreducible strings. Highest-weight
    /// representatives come from `subquotient_basis` per dominant weight.
    pub fn subquotient(
        &self,
        sub: &[Vector],
        total: Option<&[Vector]>,
    ) -> Vec<(IrrLabel, Vec<Vector>)> {
        let n = self.dim();
        let mut out = Vec::new();
        for w in self.dominant_weights() {
            let label = self.group.label_of_highest(w).unwrap();
            let z = self.highest_weight_vectors(w, total);
            if z.is_empty() {
                continue;
            }
            let b = if sub.is_empty() {
                vec![]
            } else {
                self.highest_weight_vectors(w, Some(sub))
            };
            let reps =
                crate::exactla::subquotient_basis(n, &b, &z).expect("stable subspaces are nested");
            for hw in reps {
                out.push((label, self.lowering_string(&hw, label)));
            }
        }
        out
    }

    /// Restricts the action to a stable subspace with the given basis.
    pub fn restrict(&self, basis: &[Vector]) -> Result<RepSpace, RepError> {
        let n = self.dim();
        let mut weights = Vec::with_capacity(basis.len());
        for b in basis {
            weights.push(self.weight_of(b).ok_or(RepError::NotStable)?);
        }
        let k = basis.len();
        let mut raise = RationalMatrix::zeros(k, k);
        let mut lower = RationalMatrix::zeros(k, k);
        for (j, b) in basis.iter().enumerate() {
            for (op, dst) in [(&self.raise, &mut raise), (&self.lower, &mut lower)] {
                let img = op.apply(b);
                let coords = solve(n, basis, &img).ok_or(RepError::NotStable)?;
                for (i, c) in coords.into_iter().enumerate() {
                    dst[(i, j)] = c;
                }
            }
        }
        Ok(RepSpace {
            group: self.group,
            weights,
            raise,
            lower,
        })
    }

    pub fn dual(&self) -> RepSpace {
        // Contragredient: e acts by -e^T.
        RepSpace {
            group: self.group,
            weights: self.weights.iter().map(|w| w.neg()).collect(),
            raise: self.raise.transpose().scale(&-Q::one()),
            lower: self.lower.transpose().scale(&-Q::one()),
        }
    }

    /// Tensor product in the basis `u_i ⊗ v_j`, index `i * other.dim() + j`.
    pub fn tensor(&self, other: &RepSpace) -> RepSpace {
        let (n, m) = (self.dim(), other.dim());
        let mut weights = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                weights.push(self.weights[i] + other.weights[j]);
            }
        }
        let kron = |a: &RationalMatrix, b: &RationalMatrix| {
            let mut out = RationalMatrix::zeros(n * m, n * m);
            for i in 0..n {
                for j in 0..m {
                    for k in 0..n {
                        if !a[(k, i)].is_zero() {
                            out[(k * m + j, i * m + j)] += a[(k, i)].clone();
                        }
                    }
                    for l in 0..m {
                        if !b[(l, j)].is_zero() {
                            out[(i * m + l, i * m + j)] += b[(l, j)].clone();
                        }
                    }
                }
            }
            out
        };
        RepSpace {
            group: self.group,
            weights,
            raise: kron(&self.raise, &other.raise),
            lower: kron(&self.lower, &other.lower),
        }
    }
}

/// Checks that `m: src -> tgt` preserves torus weights and commutes with
/// `e` and `f`.
pub fn check_equivariant(
    src: &RepSpace,
    tgt: &RepSpace,
    m: &RationalMatrix,
) -> Result<(), RepError> {
    if m.rows() != tgt.dim() || m.cols() != src.dim() {
        return Err(RepError::NotEquivariant("shape mismatch".into()));
    }
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if !m[(r, c)].is_zero() && tgt.weights[r] != src.weights[c] {
                return Err(RepError::NotEquivariant(format!(
                    "entry ({r},{c}) maps weight {} to {}",
                    src.weights[c], tgt.weights[r]
                )));
            }
        }
    }
    if src.group.has_lie_action() {
        if &tgt.raise * m != m * &src.raise {
            return Err(RepError::NotEquivariant("does not commute with e".into()));
        }
        if &tgt.lower * m != m * &src.lower {
            return Err(RepError::NotEquivariant("does not commute with f".into()));
        }
    }
    Ok(())
}

/// A `G`-map recorded by its Schur blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivariantMap {
    pub source: SemisimpleObject,
    pub target: SemisimpleObject,
    /// `mult_target(l) x mult_source(l)` matrix per label present on both sides.
    pub blocks: BTreeMap<IrrLabel, RationalMatrix>,
}

impl EquivariantMap {
    /// Reads off the Schur blocks of a weight-basis matrix.
    pub fn from_matrix(
        src: &RepSpace,
        tgt: &RepSpace,
        m: &RationalMatrix,
    ) -> Result<Self, RepError> {
        check_equivariant(src, tgt, m)?;
        let source = src.object();
        let target = tgt.object();
        let mut blocks = BTreeMap::new();
        for (label, _) in source.iter() {
            if target.multiplicity(label) == 0 {
                continue;
            }
            let w = label.highest_weight();
            let hs = src.highest_weight_vectors(w, None);
            let ht = tgt.highest_weight_vectors(w, None);
            let mut block = RationalMatrix::zeros(ht.len(), hs.len());
            for (j, v) in hs.iter().enumerate() {
                let img = m.apply(v);
                let coords = solve(tgt.dim(), &ht, &img).ok_or_else(|| {
                    RepError::NotEquivariant(
                        "image of a highest-weight vector is not highest-weight".into(),
                    )
                })?;
                for (i, c) in coords.into_iter().enumerate() {
                    block[(i, j)] = c;
                }
            }
            blocks.insert(label, block);
        }
        Ok(EquivariantMap {
            source,
            target,
            blocks,
        })
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|(l, b)| l.dim() * b.rank()).sum()
    }
}

/// One summand of a tensor product decomposition.
#[derive(Debug, Clone)]
pub struct TensorSummand {
    pub label: IrrLabel,
    /// `dim(x)·dim(y) x dim(label)`.
    pub inclusion: RationalMatrix,
    /// `dim(label) x dim(x)·dim(y)`.
    pub projection: RationalMatrix,
}

#[derive(Debug, Clone)]
pub struct TensorDecomposition {
    pub summands: Vec<TensorSummand>,
}

impl TensorDecomposition {
    pub fn object(&self) -> SemisimpleObject {
        SemisimpleObject::from_labels(&self.summands.iter().map(|s| s.label).collect::<Vec<_>>())
    }
}

/// Clebsch–Gordan decomposition of `x ⊗ y` with explicit intertwiners in
/// the basis `u_i ⊗ v_j`. Each summand's highest-weight vector has
/// coefficient 1 on its first nonzero basis vector.
pub fn tensor_decompose(x: IrrLabel, y: IrrLabel) -> TensorDecomposition {
    let group = x.group();
    assert_eq!(group, y.group(), "labels from different groups");
    let sx = RepSpace::from_labels(group, &[x]);
    let sy = RepSpace::from_labels(group, &[y]);
    let t = sx.tensor(&sy);
    let n = t.dim();
    let mut labels: Vec<IrrLabel> = tensor_labels(x, y).labels();
    // Largest summand first.
    labels.sort_by_key(|l| std::cmp::Reverse(l.dim()));
    let mut incs = Vec::new();
    for &label in &labels {
        let hws = t.highest_weight_vectors(label.highest_weight(), None);
        assert_eq!(
            hws.len(),
            1,
            "Clebsch–Gordan summands are multiplicity free"
        );
        let mut hw = hws.into_iter().next().unwrap();
        let lead = hw.iter().find(|c| !c.is_zero()).unwrap().clone();
        for c in hw.iter_mut() {
            *c = &*c / &lead;
        }
        incs.push(t.lowering_string(&hw, label));
    }
    let all: Vec<Vector> = incs.iter().flatten().cloned().collect();
    let p = RationalMatrix::from_columns(n, &all)
        .inverse()
        .expect("Clebsch–Gordan strings form a basis");
    let mut summands = Vec::new();
    let mut offset = 0;
    for (label, cols) in labels.into_iter().zip(incs) {
        let k = cols.len();
        summands.push(TensorSummand {
            label,
            inclusion: RationalMatrix::from_columns(n, &cols),
            projection: p.select_rows(&(offset..offset + k).collect::<Vec<_>>()),
        });
        offset += k;
    }
    TensorDecomposition { summands }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gl2(a: u32, b: i64) -> IrrLabel {
        IrrLabel::GL2 { sym: a, det: b }
    }

    fn gm(n: i64) -> IrrLabel {
        IrrLabel::Gm { weight: n }
    }

    /// Brute-force torus character of a tensor product of two labels.
    fn brute_character(x: IrrLabel, y: IrrLabel) -> Vec<TorusWeight> {
        let mut ws = vec![];
        for a in x.weights() {
            for b in y.weights() {
                ws.push(a + b);
            }
        }
        ws.sort();
        ws
    }

    #[test]
    fn adams_examples() {
        assert_eq!(adams_of(gm(-1)), 1);
        assert_eq!(adams_of(gm(0)), 0);
        assert_eq!(adams_of(gl2(1, -1)), 1);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual(gm(2)), gm(-2));
        assert_eq!(dual(gl2(0, 0)), gl2(0, 0));
        assert_eq!(dual(gl2(1, 0)), gl2(1, -1));
        // character check on the torus: weights of the dual are negated weights
        let mut neg: Vec<TorusWeight> = gl2(1, 0).weights().into_iter().map(|w| w.neg()).collect();
        neg.sort();
        let mut d = gl2(1, -1).weights();
        d.sort();
        assert_eq!(neg, d);
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(
            tensor_decompose(gm(1), gm(-1)).object(),
            SemisimpleObject::single(gm(0), 1)
        );
        let d = tensor_decompose(gl2(1, 0), gl2(1, 0));
        assert_eq!(
            d.object(),
            SemisimpleObject::from_labels(&[gl2(2, 0), gl2(0, 1)])
        );
        let d = tensor_decompose(gl2(2, 0), gl2(1, 0));
        assert_eq!(
            d.object(),
            SemisimpleObject::from_labels(&[gl2(3, 0), gl2(1, 1)])
        );
    }

    #[test]
    fn tensor_matches_brute_character() {
        for a in 0..=4 {
            for b in 0..=4 {
                for (dx, dy) in [(0, 0), (-1, 2), (1, -3)] {
                    let (x, y) = (gl2(a, dx), gl2(b, dy));
                    let obj = tensor_decompose(x, y).object();
                    let mut ws = obj.weights();
                    ws.sort();
                    assert_eq!(ws, brute_character(x, y));
                    assert_eq!(obj.dim(), x.dim() * y.dim());
                    for (l, _) in obj.iter() {
                        assert_eq!(l.adams(), x.adams() + y.adams());
                    }
                }
            }
        }
    }

    #[test]
    fn intertwiners_are_complementary_idempotents() {
        for a in 0..=3 {
            for b in 0..=3 {
                let (x, y) = (gl2(a, 0), gl2(b, -1));
                let dec = tensor_decompose(x, y);
                let n = x.dim() * y.dim();
                let mut sum = RationalMatrix::zeros(n, n);
                let t = RepSpace::from_labels(GroupKind::GL2, &[x])
                    .tensor(&RepSpace::from_labels(GroupKind::GL2, &[y]));
                for (j, sj) in dec.summands.iter().enumerate() {
                    let irr = RepSpace::from_labels(GroupKind::GL2, &[sj.label]);
                    check_equivariant(&irr, &t, &sj.inclusion).unwrap();
                    check_equivariant(&t, &irr, &sj.projection).unwrap();
                    for (k, sk) in dec.summands.iter().enumerate() {
                        let prod = &sk.projection * &sj.inclusion;
                        if j == k {
                            assert_eq!(prod, RationalMatrix::identity(sj.label.dim()));
                        } else {
                            assert!(prod.is_zero());
                        }
                    }
                    sum = sum.add(&(&sj.inclusion * &sj.projection));
                    // leading coefficient of the highest-weight vector is 1
                    let hw = sj.inclusion.column(0);
                    assert!(hw.iter().find(|c| !c.is_zero()).unwrap().is_one());
                }
                assert_eq!(sum, RationalMatrix::identity(n));
            }
        }
    }

    #[test]
    fn hom_and_invariants() {
        let q1 = SemisimpleObject::single(gm(0), 1);
        assert_eq!(hom_dim(&q1, &q1), 1);
        assert_eq!(
            hom_dim(
                &SemisimpleObject::single(gm(1), 1),
                &SemisimpleObject::single(gm(2), 1)
            ),
            0
        );
        assert_eq!(
            hom_dim(
                &SemisimpleObject::single(gm(1), 2),
                &SemisimpleObject::single(gm(1), 3)
            ),
            6
        );
        assert_eq!(
            invariants_dim(&SemisimpleObject::from_labels(&[gm(0), gm(1)])),
            1
        );
        assert_eq!(
            invariants_dim(&SemisimpleObject::from_labels(&[gm(1), gm(-1)])),
            0
        );
        let t = tensor_decompose(gl2(1, 0), gl2(1, -1)).object();
        assert_eq!(invariants_dim(&t), 1);
    }

    #[test]
    fn hom_equals_invariants_of_dual_tensor() {
        let objs = [
            SemisimpleObject::from_labels(&[gl2(1, 0), gl2(0, 1), gl2(2, -1)]),
            SemisimpleObject::from_labels(&[gl2(1, 0), gl2(1, 0), gl2(0, 0)]),
            SemisimpleObject::from_labels(&[gl2(2, -1), gl2(3, 0)]),
        ];
        for x in &objs {
            for y in &objs {
                assert_eq!(hom_dim(x, y), invariants_dim(&x.dual().tensor(y)));
            }
        }
    }

    #[test]
    fn label_syntax() {
        assert_eq!("w(-1)".parse::<IrrLabel>().unwrap(), gm(-1));
        assert_eq!("sym(2)det(-1)".parse::<IrrLabel>().unwrap(), gl2(2, -1));
        assert_eq!(gl2(2, -1).to_string(), "sym(2)det(-1)");
        assert!("sym(-1)det(0)".parse::<IrrLabel>().is_err());
        assert!("foo".parse::<IrrLabel>().is_err());
    }

    #[test]
    fn character_decomposition() {
        let labels = [gl2(2, 0), gl2(0, 1), gl2(1, -1)];
        let s = RepSpace::from_labels(GroupKind::GL2, &labels);
        assert_eq!(s.object(), SemisimpleObject::from_labels(&labels));
        let dec = s.decompose(None);
        assert_eq!(dec.len(), 3);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn dual_is_involution(a in 0u32..6, b in -5i64..5, n in -5i64..5) {
                prop_assert_eq!(gl2(a, b).dual().dual(), gl2(a, b));
                prop_assert_eq!(gm(n).dual().dual(), gm(n));
            }
        }
    }
}
