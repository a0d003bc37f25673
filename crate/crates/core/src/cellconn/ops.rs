use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;

use super::*;
use crate::barhopf::{sullivan_cdga, CoLieData};
use crate::cdgacore::{connectivity, expand_free, Bidegree, CdgaMorphism, Window};
use crate::exactla::{
    image_basis, kernel_basis, left_inverse, span_basis, unit_vec, zero_vec, Vector,
};
use crate::repsemi::SemisimpleObject;

/// Groups `Σ c · a ⊗ v` by `a` into vectors of the carrier.
fn by_base(x: &ModElem, dim: usize) -> BTreeMap<BasisRef, Vector> {
    let mut out: BTreeMap<BasisRef, Vector> = BTreeMap::new();
    for (&(a, i), c) in x {
        out.entry(a).or_insert_with(|| zero_vec(dim))[i] += c;
    }
    out
}

fn combine(c: &Connection, v: &[Q]) -> ModElem {
    let mut out = ModElem::new();
    for (k, x) in v.iter().enumerate() {
        if !x.is_zero() {
            me_add(&mut out, &c.d_full(k), x);
        }
    }
    out
}

fn homogeneous(c: &Connection, v: &[Q]) -> Result<(i64, TorusWeight), CellError> {
    let mut it = v
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, _)| (c.carrier.degrees[i], c.carrier.weight(i)));
    let first = it
        .next()
        .ok_or_else(|| CellError::BadCarrier("zero basis vector".into()))?;
    if it.any(|x| x != first) {
        return Err(CellError::BadCarrier(
            "basis vector is not homogeneous".into(),
        ));
    }
    Ok(first)
}

fn vector_name(c: &Connection, v: &[Q]) -> String {
    let nz: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
    if nz.len() == 1 && v[nz[0]].is_one() {
        return c.carrier.names[nz[0]].clone();
    }
    let parts: Vec<String> = nz
        .iter()
        .map(|&i| format!("{}*{}", crate::exactla::fmt_q(&v[i]), c.carrier.names[i]))
        .collect();
    format!("({})", parts.join("+"))
}

/// The sub-connection on `span(basis)` with its inclusion.
pub fn subconnection(
    c: &Connection,
    basis: &[Vector],
) -> Result<(Connection, ConnectionMorphism), CellError> {
    let n = c.dim();
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    for v in basis {
        let (d, _) = homogeneous(c, v)?;
        names.push(vector_name(c, v));
        degrees.push(d);
    }
    let space = c
        .carrier
        .space
        .restrict(basis)
        .map_err(|e| CellError::NotClosed(e.to_string()))?;
    let carrier = Carrier {
        names,
        degrees,
        space,
    };
    let l = if basis.is_empty() {
        RationalMatrix::zeros(0, n)
    } else {
        left_inverse(n, basis).map_err(|e| CellError::BadCarrier(e.to_string()))?
    };
    let mut d = Vec::new();
    for v in basis {
        let mut x = ModElem::new();
        for (a, w) in by_base(&combine(c, v), n) {
            let coords = l.apply(&w);
            let back = RationalMatrix::from_columns(n, basis).apply(&coords);
            if back != w {
                return Err(CellError::NotClosed(format!(
                    "D{} leaves the subspace",
                    vector_name(c, v)
                )));
            }
            for (i, y) in coords.into_iter().enumerate() {
                if !y.is_zero() {
                    x.insert((a, i), y);
                }
            }
        }
        d.push(x);
    }
    let sub = Connection::from_full(c.base.clone(), carrier, d);
    let incl = ConnectionMorphism::from_matrix(
        sub.clone(),
        c.clone(),
        RationalMatrix::from_columns(n, basis),
    );
    Ok((sub, incl))
}

/// The quotient by a closed `span(sub)`, on the equivariant complement
/// `complement`, with the projection.
pub fn quotient(
    c: &Connection,
    sub: &[Vector],
    complement: &[Vector],
) -> Result<(Connection, ConnectionMorphism), CellError> {
    let n = c.dim();
    let mut all = sub.to_vec();
    all.extend(complement.iter().cloned());
    let l = left_inverse(n, &all).map_err(|e| CellError::BadCarrier(e.to_string()))?;
    let k = sub.len();
    let proj = |w: &[Q]| -> Vector { l.apply(w)[k..].to_vec() };
    let mut names = Vec::new();
    let mut degrees = Vec::new();
    for v in complement {
        names.push(vector_name(c, v));
        degrees.push(homogeneous(c, v)?.0);
    }
    let space = c
        .carrier
        .space
        .restrict(complement)
        .map_err(|e| CellError::NotClosed(e.to_string()))?;
    let carrier = Carrier {
        names,
        degrees,
        space,
    };
    let mut d = Vec::new();
    for v in complement {
        let mut x = ModElem::new();
        for (a, w) in by_base(&combine(c, v), n) {
            for (i, y) in proj(&w).into_iter().enumerate() {
                if !y.is_zero() {
                    x.insert((a, i), y);
                }
            }
        }
        d.push(x);
    }
    let q = Connection::from_full(c.base.clone(), carrier, d);
    let mut f0 = RationalMatrix::zeros(complement.len(), n);
    for j in 0..n {
        for (i, y) in proj(&unit_vec(n, j)).into_iter().enumerate() {
            f0[(i, j)] = y;
        }
    }
    let p = ConnectionMorphism::from_matrix(c.clone(), q.clone(), f0);
    p.check()?;
    Ok((q, p))
}

#[derive(Debug, Clone)]
pub struct WeightPiece {
    pub n: i64,
    pub w: Connection,
    pub gr: Connection,
    pub inclusion: ConnectionMorphism,
    pub projection: ConnectionMorphism,
}

fn coordinate_vectors(n: usize, idx: &[usize]) -> Vec<Vector> {
    idx.iter().map(|&i| unit_vec(n, i)).collect()
}

/// `W_n`, spanned by carrier vectors of Adams degree `≤ n`, and
/// `gr_n = W_n / W_{n-1}`.
pub fn weight_filtration(c: &Connection, n: i64) -> Result<WeightPiece, CellError> {
    let dim = c.dim();
    let idx: Vec<usize> = (0..dim).filter(|&i| c.carrier.adams(i) <= n).collect();
    let (w, inclusion) = subconnection(c, &coordinate_vectors(dim, &idx))?;
    let lower: Vec<usize> = (0..idx.len()).filter(|&i| w.carrier.adams(i) < n).collect();
    let top: Vec<usize> = (0..idx.len())
        .filter(|&i| w.carrier.adams(i) == n)
        .collect();
    let (gr, projection) = quotient(
        &w,
        &coordinate_vectors(idx.len(), &lower),
        &coordinate_vectors(idx.len(), &top),
    )?;
    Ok(WeightPiece {
        n,
        w,
        gr,
        inclusion,
        projection,
    })
}

/// `dim gr^W_n` for every `n` that occurs.
pub fn weight_dims(c: &Connection) -> BTreeMap<i64, usize> {
    let mut out = BTreeMap::new();
    for i in 0..c.dim() {
        *out.entry(c.carrier.adams(i)).or_insert(0) += 1;
    }
    out
}

/// `q(M) = M ⊗_A Q`: the carrier with `d_M`.
#[derive(Debug, Clone)]
pub struct QComplex {
    pub carrier: Carrier,
    pub dm: RationalMatrix,
}

pub fn q(c: &Connection) -> QComplex {
    QComplex {
        carrier: c.carrier.clone(),
        dm: c.dm.clone(),
    }
}

impl QComplex {
    fn cycles_boundaries(&self, n: i64) -> (Vec<Vector>, Vec<Vector>) {
        let dim = self.carrier.dim();
        let idx = self.carrier.indices_of_degree(n);
        let embed = |k: Vector, idx: &[usize]| -> Vector {
            let mut v = zero_vec(dim);
            for (x, &i) in k.into_iter().zip(idx) {
                v[i] = x;
            }
            v
        };
        let cycles = if idx.is_empty() {
            vec![]
        } else {
            kernel_basis(&self.dm.select_columns(&idx))
                .into_iter()
                .map(|k| embed(k, &idx))
                .collect()
        };
        let prev = self.carrier.indices_of_degree(n - 1);
        let boundaries = if prev.is_empty() {
            vec![]
        } else {
            image_basis(&self.dm.select_columns(&prev))
        };
        (cycles, boundaries)
    }

    pub fn cohomology(&self, n: i64) -> SemisimpleObject {
        let (z, b) = self.cycles_boundaries(n);
        if z.is_empty() {
            return SemisimpleObject::zero();
        }
        let labels: Vec<IrrLabel> = self
            .carrier
            .space
            .subquotient(&b, Some(&z))
            .into_iter()
            .map(|(l, _)| l)
            .collect();
        SemisimpleObject::from_labels(&labels)
    }

    /// Nonzero cohomology by degree.
    pub fn cohomology_table(&self) -> BTreeMap<i64, SemisimpleObject> {
        self.carrier
            .distinct_degrees()
            .into_iter()
            .map(|n| (n, self.cohomology(n)))
            .filter(|(_, h)| !h.is_zero())
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology_table().is_empty()
    }
}

pub fn heart_test(c: &Connection) -> bool {
    q(c).cohomology_table().keys().all(|&n| n == 0)
}

/// `τ^{≤0}M`: degree `< 0` vectors and the `d_M`-cycles of degree 0.
pub fn truncate_le0(c: &Connection) -> Result<(Connection, ConnectionMorphism), CellError> {
    if !connectivity(&c.base).connected {
        return Err(CellError::BaseNotConnected);
    }
    let dim = c.dim();
    let mut basis: Vec<Vector> = (0..dim)
        .filter(|&i| c.carrier.degrees[i] < 0)
        .map(|i| unit_vec(dim, i))
        .collect();
    let (z, _) = q(c).cycles_boundaries(0);
    if !z.is_empty() {
        for (_, s) in c.carrier.space.decompose(Some(&z)) {
            basis.extend(s);
        }
    }
    subconnection(c, &basis)
}

/// `N ⊕ M[1]` with `D(m[1]) = f(m) - (shifted D_M)(m)`.
pub fn cone(f: &ConnectionMorphism) -> Result<Connection, CellError> {
    f.check()?;
    let (m, n) = (&f.source, &f.target);
    let off = n.dim();
    let ms = shift(m, 1);
    let mut carrier = n.carrier.clone();
    let shifted = Carrier {
        names: m.carrier.names.iter().map(|s| format!("{s}[1]")).collect(),
        degrees: ms.carrier.degrees.clone(),
        space: ms.carrier.space.clone(),
    };
    carrier = carrier.direct_sum(&shifted);
    let mut d: Vec<ModElem> = (0..n.dim()).map(|j| n.d_full(j)).collect();
    for j in 0..m.dim() {
        let mut x = f.full(j);
        for ((a, i), c) in ms.d_full(j) {
            x.insert((a, i + off), c);
        }
        d.push(x);
    }
    let out = Connection::from_full(n.base.clone(), carrier, d);
    out.require_flat()?;
    Ok(out)
}

pub fn quasi_iso_test(f: &ConnectionMorphism) -> Result<bool, CellError> {
    Ok(q(&cone(f)?).is_acyclic())
}

/// `φ_*`: the same carrier with `Γ_B = (φ ⊗ id) Γ`.
pub fn base_change(phi: &CdgaMorphism, c: &Connection) -> Result<Connection, CellError> {
    if !same_base(&phi.source, &c.base) {
        return Err(CellError::BaseMismatch);
    }
    let bad = phi.check();
    if !bad.is_empty() {
        return Err(CdgaError::NotCdgaMap(bad.join("; ")).into());
    }
    let mut d = Vec::new();
    for j in 0..c.dim() {
        let mut x = ModElem::new();
        for (&(a, i), y) in &c.d_full(j) {
            for (t, z) in phi.apply(&LevelwiseCdga::basis_elem(a)) {
                me_add(&mut x, &[((t, i), z)].into_iter().collect(), y);
            }
        }
        d.push(x);
    }
    let out = Connection::from_full(phi.target.clone(), c.carrier.clone(), d);
    out.require_flat()?;
    Ok(out)
}

/// Realization of a complex `M^p → M^{p+1} → …` of heart objects, with
/// `M^p` placed at `p = start + i`: `⊕ M^p[-p]` with differential the
/// shifted `D` plus `δ̃(m) = Σ (-1)^{(p+1)|a|} c · a ⊗ m'` for each term of `δ^p(m)`.
pub fn rho(
    terms: &[Connection],
    deltas: &[ConnectionMorphism],
    start: i64,
) -> Result<Connection, CellError> {
    if terms.is_empty() {
        return Err(CellError::NotAComplex("no terms".into()));
    }
    if deltas.len() + 1 != terms.len() {
        return Err(CellError::NotAComplex(
            "need one map between consecutive terms".into(),
        ));
    }
    for (i, t) in terms.iter().enumerate() {
        if !heart_test(t) {
            return Err(CellError::NotInHeart(i));
        }
    }
    for (i, dl) in deltas.iter().enumerate() {
        if dl.source != terms[i] || dl.target != terms[i + 1] {
            return Err(CellError::NotAComplex(format!(
                "map {i} has the wrong source or target"
            )));
        }
        dl.check()?;
        if i + 1 < deltas.len() && !deltas[i + 1].after(dl)?.is_zero() {
            return Err(CellError::NotAComplex(format!(
                "maps {i} and {} do not compose to zero",
                i + 1
            )));
        }
    }
    let base = terms[0].base.clone();
    let mut carrier = Carrier::empty(base.group);
    let mut offsets = Vec::new();
    let mut d = Vec::new();
    let mut shifted = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        let p = start + i as i64;
        let s = shift(t, -p);
        offsets.push(carrier.dim());
        let renamed = Carrier {
            names: t
                .carrier
                .names
                .iter()
                .map(|x| format!("{x}[{}]", -p))
                .collect(),
            ..s.carrier.clone()
        };
        carrier = carrier.direct_sum(&renamed);
        shifted.push(s);
    }
    for (i, s) in shifted.iter().enumerate() {
        let p = start + i as i64;
        for j in 0..s.dim() {
            let mut x: ModElem = s
                .d_full(j)
                .into_iter()
                .map(|((a, k), c)| ((a, k + offsets[i]), c))
                .collect();
            if let Some(dl) = deltas.get(i) {
                for ((a, k), c) in dl.full(j) {
                    me_add(
                        &mut x,
                        &[((a, k + offsets[i + 1]), sign((p + 1) * a.bd.n) * c)]
                            .into_iter()
                            .collect(),
                        &Q::one(),
                    );
                }
            }
            d.push(x);
        }
    }
    let out = Connection::from_full(base, carrier, d);
    out.require_flat()?;
    Ok(out)
}

/// `Hom_A(A ⊗ M, A ⊗ N) ≅ A ⊗ (M^∨ ⊗ N)` as a connection.
pub fn hom_complex(m: &Connection, n: &Connection) -> Result<Connection, CellError> {
    tensor(&dual(m)?, n)
}

/// Basis `a ⊗ h_j` of `A ⊗ H` in degree `deg` and torus weight `w`.
fn twisted_basis(
    h: &Connection,
    w: TorusWeight,
    deg: i64,
    adams_connected: bool,
) -> Result<Vec<(BasisRef, usize)>, CellError> {
    let base = &h.base;
    let mut out = Vec::new();
    for j in 0..h.dim() {
        let wa = TorusWeight(w.0 - h.carrier.weight(j).0, w.1 - h.carrier.weight(j).1);
        let bd = Bidegree::new(deg - h.carrier.degrees[j], wa.adams());
        if base.window.contains(bd) {
            out.extend(
                base.refs(bd)
                    .filter(|&a| base.weight(a) == wa)
                    .map(|a| (a, j)),
            );
            continue;
        }
        let below = bd.n
            < base
                .zero_below
                .unwrap_or(base.window.n_min)
                .max(base.window.n_min.min(0));
        let neg_adams = bd.r < 0 && adams_connected && base.window.r_min <= 0;
        if !(below || neg_adams || bd.n < 0) {
            return Err(CellError::WindowTooSmall(format!(
                "needs the base algebra at {bd}, window is {}",
                base.window
            )));
        }
    }
    Ok(out)
}

fn twisted_matrix(
    h: &Connection,
    src: &[(BasisRef, usize)],
    tgt: &[(BasisRef, usize)],
) -> Result<RationalMatrix, CellError> {
    let index: BTreeMap<(BasisRef, usize), usize> =
        tgt.iter().enumerate().map(|(i, k)| (*k, i)).collect();
    let mut m = RationalMatrix::zeros(tgt.len(), src.len());
    for (j, &k) in src.iter().enumerate() {
        let x: ModElem = [(k, Q::one())].into_iter().collect();
        let y = h
            .apply_twisted(&x)
            .map_err(|e| CellError::WindowTooSmall(e.to_string()))?;
        for (t, c) in y {
            let i = *index.get(&t).ok_or_else(|| {
                CellError::WindowTooSmall("twisted differential leaves the window".into())
            })?;
            m[(i, j)] = c;
        }
    }
    Ok(m)
}

/// `dim H^k(A ⊗ H)` at one torus weight.
fn twisted_h_dim(h: &Connection, w: TorusWeight, k: i64) -> Result<usize, CellError> {
    let ac = connectivity(&h.base).adams_connected;
    let c0 = twisted_basis(h, w, k - 1, ac)?;
    let c1 = twisted_basis(h, w, k, ac)?;
    let c2 = twisted_basis(h, w, k + 1, ac)?;
    if c1.is_empty() {
        return Ok(0);
    }
    let out = twisted_matrix(h, &c1, &c2)?.rank();
    let inc = if c0.is_empty() {
        0
    } else {
        twisted_matrix(h, &c0, &c1)?.rank()
    };
    Ok(c1.len() - out - inc)
}

/// `dim Hom_G(Q, H^k(A ⊗ H))`.
pub fn invariant_cohomology(h: &Connection, k: i64) -> Result<usize, CellError> {
    let zero = twisted_h_dim(h, TorusWeight(0, 0), k)?;
    if h.group().has_lie_action() {
        Ok(zero - twisted_h_dim(h, TorusWeight(1, -1), k)?)
    } else {
        Ok(zero)
    }
}

/// `dim Hom(M, N[k])` in the homotopy category of cell modules.
pub fn hom_groups(m: &Connection, n: &Connection, k: i64) -> Result<usize, CellError> {
    invariant_cohomology(&hom_complex(m, n)?, k)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtResult {
    pub degree: i64,
    pub dim: usize,
    pub coefficients: SemisimpleObject,
}

/// `Ext^k_γ(V, W) = H^k(∧(γ[-1]) ⊗ V^∨ ⊗ W)^G`.
pub fn ext(
    g: &CoLieData,
    v: &SemisimpleObject,
    w: &SemisimpleObject,
    k: i64,
    adams_max: i64,
) -> Result<ExtResult, CellError> {
    let coeff = v.dual().tensor(w);
    let min_adams = coeff.iter().map(|(l, _)| l.adams()).min().unwrap_or(0);
    if -min_adams > adams_max || -min_adams > g.cutoff {
        return Err(CellError::WindowTooSmall(format!(
            "coefficients reach Adams degree {min_adams}, need γ through Adams {}",
            -min_adams
        )));
    }
    let s = sullivan_cdga(g)?;
    let base = Arc::new(expand_free(
        &s,
        Window::new(0, k + 2, 0, adams_max.min(g.cutoff)),
    )?);
    let mut vecs = Vec::new();
    for (l, mult) in coeff.iter() {
        for i in 0..mult {
            vecs.push((format!("{l}#{i}"), 0, l));
        }
    }
    let carrier = Carrier::from_vectors(base.group, &vecs);
    let h = Connection::free(base, carrier);
    Ok(ExtResult {
        degree: k,
        dim: invariant_cohomology(&h, k)?,
        coefficients: coeff,
    })
}

/// Span of the given vectors as a weight basis, for callers building
/// sub-connections from arbitrary spanning sets.
pub fn weight_basis(c: &Connection, vecs: &[Vector]) -> Vec<Vector> {
    let span = span_basis(c.dim(), vecs);
    if span.is_empty() {
        return vec![];
    }
    c.carrier
        .space
        .decompose(Some(&span))
        .into_iter()
        .flat_map(|(_, s)| s)
        .collect()
}
