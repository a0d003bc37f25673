use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::levelwise::{elem_add, BasisRef, Elem, LevelwiseCdga};
use super::{Bidegree, CdgaError};
use crate::exactla::{image_basis, kernel_basis, solve, RationalMatrix, Vector, Q};
use crate::repsemi::{IrrLabel, SemisimpleObject, TorusWeight};

/// `H^n<r>` with representatives grouped into irreducible strings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyGroup {
    pub bd: Bidegree,
    pub object: SemisimpleObject,
    pub strings: Vec<(IrrLabel, Vec<Vector>)>,
    /// All representatives, string by string.
    pub reps: Vec<Vector>,
    pub cycles: Vec<Vector>,
    pub boundaries: Vec<Vector>,
    pub space_dim: usize,
}

impl CohomologyGroup {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of a cycle in the representative basis.
    pub fn coords(&self, z: &[Q]) -> Option<Vector> {
        let mut cols = self.reps.clone();
        cols.extend(self.boundaries.iter().cloned());
        let x = solve(self.space_dim, &cols, z)?;
        Some(x[..self.reps.len()].to_vec())
    }

    /// Highest-weight representatives, one per irreducible summand.
    pub fn highest_weight_reps(&self) -> Vec<(IrrLabel, Vector)> {
        self.strings
            .iter()
            .map(|(l, s)| (*l, s[0].clone()))
            .collect()
    }
}

fn incoming_known(a: &LevelwiseCdga, bd: Bidegree) -> bool {
    let prev = bd.shift(-1, 0);
    a.diff_defined(prev) || a.zero_below.is_some_and(|z| prev.n < z)
}

/// Cohomology at one bidegree, computed on highest-weight vectors per label.
pub fn cohomology(a: &LevelwiseCdga, bd: Bidegree) -> Result<CohomologyGroup, CdgaError> {
    if !a.window.contains(bd) {
        return Err(CdgaError::OutOfWindow(bd));
    }
    let dim = a.dim(bd);
    if dim > 0 && (!a.diff_defined(bd) || !incoming_known(a, bd)) {
        return Err(CdgaError::OutOfWindow(bd));
    }
    let space = a.space(bd);
    let cycles = if dim == 0 {
        vec![]
    } else {
        kernel_basis(&a.diff_matrix(bd)?)
    };
    let prev = bd.shift(-1, 0);
    let boundaries = if dim == 0 || !a.diff_defined(prev) || a.dim(prev) == 0 {
        vec![]
    } else {
        image_basis(&a.diff_matrix(prev)?)
    };
    let strings = space.subquotient(&boundaries, Some(&cycles));
    let reps: Vec<Vector> = strings
        .iter()
        .flat_map(|(_, s)| s.iter().cloned())
        .collect();
    let labels: Vec<IrrLabel> = strings.iter().map(|(l, _)| *l).collect();
    debug_assert_eq!(reps.len() + boundaries.len(), cycles.len());
    Ok(CohomologyGroup {
        bd,
        object: SemisimpleObject::from_labels(&labels),
        strings,
        reps,
        cycles,
        boundaries,
        space_dim: dim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub adams_connected: bool,
    pub connected: bool,
    pub cohomologically_connected: bool,
    /// True when part of the relevant range (negative degrees) is not
    /// visible in the window, so the flags hold only on the window.
    pub window_qualified: bool,
}

fn is_trivial_line(a: &LevelwiseCdga, dims: usize, unit_in: bool) -> bool {
    dims == 1 && unit_in && a.unit.is_some_and(|u| a.weight(u) == TorusWeight(0, 0))
}

/// Connectivity predicates evaluated on the window.
pub fn connectivity(a: &LevelwiseCdga) -> ConnectivityReport {
    let w = a.window;
    let unit_at = |pred: &dyn Fn(Bidegree) -> bool| a.unit.is_some_and(|u| pred(u.bd));

    let neg_adams_zero = a.components.iter().all(|(bd, c)| bd.r >= 0 || c.dim() == 0);
    let adams0: usize = a
        .components
        .iter()
        .filter(|(bd, _)| bd.r == 0)
        .map(|(_, c)| c.dim())
        .sum();
    let adams_connected = neg_adams_zero && is_trivial_line(a, adams0, unit_at(&|bd| bd.r == 0));

    let neg_deg_zero = a.components.iter().all(|(bd, c)| bd.n >= 0 || c.dim() == 0);
    let deg0: usize = a
        .components
        .iter()
        .filter(|(bd, _)| bd.n == 0)
        .map(|(_, c)| c.dim())
        .sum();
    let connected = neg_deg_zero && is_trivial_line(a, deg0, unit_at(&|bd| bd.n == 0));

    let mut coh = true;
    let mut h0 = SemisimpleObject::zero();
    let mut unknown = false;
    for bd in w.bidegrees() {
        if bd.n > 0 {
            continue;
        }
        match cohomology(a, bd) {
            Ok(h) if bd.n < 0 => coh &= h.dim() == 0,
            Ok(h) => h0 = h0.direct_sum(&h.object),
            Err(_) => unknown = true,
        }
    }
    coh &= h0 == SemisimpleObject::single(a.group.trivial(), 1);
    let cohomologically_connected = coh || connected;
    let negative_degrees_known = w.n_min < 0 || a.zero_below.is_some_and(|z| z <= 0);
    ConnectivityReport {
        adams_connected,
        connected,
        cohomologically_connected,
        window_qualified: unknown || w.r_min >= 0 || !negative_degrees_known,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndecomposableSpace {
    pub object: SemisimpleObject,
    pub strings: Vec<(IrrLabel, Vec<Vector>)>,
}

/// `QA = IA / (IA · IA)` per bidegree on the window (nonzero pieces only).
pub fn indecomposables(
    a: &LevelwiseCdga,
) -> Result<BTreeMap<Bidegree, IndecomposableSpace>, CdgaError> {
    if !connectivity(a).connected {
        return Err(CdgaError::NotConnected);
    }
    let ia = a.augmentation_refs();
    let mut out = BTreeMap::new();
    for &bd in a.components.keys() {
        if bd == Bidegree::zero() {
            continue;
        }
        let mut dec: Vec<Vector> = Vec::new();
        for &x in &ia {
            for &y in &ia {
                if x.bd + y.bd != bd {
                    continue;
                }
                let p = a.product(x, y)?;
                if !p.is_empty() {
                    dec.push(a.to_vec(bd, &p));
                }
            }
        }
        let space = a.space(bd);
        let strings = space.subquotient(&dec, None);
        if strings.is_empty() {
            continue;
        }
        let labels: Vec<IrrLabel> = strings.iter().map(|(l, _)| *l).collect();
        out.insert(
            bd,
            IndecomposableSpace {
                object: SemisimpleObject::from_labels(&labels),
                strings,
            },
        );
    }
    Ok(out)
}

/// A map of levelwise cdgas given on basis vectors.
#[derive(Debug, Clone)]
pub struct CdgaMorphism {
    pub source: Arc<LevelwiseCdga>,
    pub target: Arc<LevelwiseCdga>,
    pub images: BTreeMap<BasisRef, Elem>,
}

impl CdgaMorphism {
    pub fn identity(a: Arc<LevelwiseCdga>) -> Self {
        let images = a
            .all_refs()
            .into_iter()
            .map(|b| (b, LevelwiseCdga::basis_elem(b)))
            .collect();
        CdgaMorphism {
            source: a.clone(),
            target: a,
            images,
        }
    }

    /// The augmentation onto the ground field.
    pub fn augmentation(a: Arc<LevelwiseCdga>) -> Self {
        let q = Arc::new(LevelwiseCdga::unit_algebra(a.group, a.window));
        let mut images = BTreeMap::new();
        if let (Some(u), Some(v)) = (a.unit, q.unit) {
            images.insert(u, LevelwiseCdga::basis_elem(v));
        }
        CdgaMorphism {
            source: a,
            target: q,
            images,
        }
    }

    /// Extends images of the atoms of a free source multiplicatively.
    pub fn from_atom_images(
        source: Arc<LevelwiseCdga>,
        target: Arc<LevelwiseCdga>,
        atom_images: &[Elem],
    ) -> Result<Self, CdgaError> {
        let free = source
            .free
            .as_ref()
            .ok_or_else(|| CdgaError::NotCdgaMap("source is not free".into()))?;
        let mut images = BTreeMap::new();
        for (bd, monos) in &free.monomials {
            for (i, m) in monos.iter().enumerate() {
                let mut img = target.unit_elem();
                for (k, &e) in m.iter().enumerate() {
                    for _ in 0..e {
                        img = target.mul(&img, &atom_images[k])?;
                    }
                }
                images.insert(BasisRef { bd: *bd, idx: i }, img);
            }
        }
        Ok(CdgaMorphism {
            source,
            target,
            images,
        })
    }

    /// Like `from_atom_images`, from images of the highest-weight atom of
    /// each generator; the remaining atoms are obtained by lowering.
    pub fn from_generator_images(
        source: Arc<LevelwiseCdga>,
        target: Arc<LevelwiseCdga>,
        gen_images: &[Elem],
    ) -> Result<Self, CdgaError> {
        let free = source
            .free
            .as_ref()
            .ok_or_else(|| CdgaError::NotCdgaMap("source is not free".into()))?;
        let mut atom_images = Vec::new();
        for (g, gen) in free.presentation.generators.iter().enumerate() {
            let mut cur = gen_images[g].clone();
            for j in 0..gen.label.dim() {
                if j > 0 {
                    cur = target.lower_elem(&cur);
                }
                let mut scaled = Elem::new();
                elem_add(&mut scaled, &cur, &gen.label.lowering_scale(j).recip());
                atom_images.push(scaled);
            }
        }
        Self::from_atom_images(source, target, &atom_images)
    }

    pub fn apply(&self, e: &Elem) -> Elem {
        let mut out = Elem::new();
        for (b, c) in e {
            if let Some(img) = self.images.get(b) {
                elem_add(&mut out, img, c);
            }
        }
        out
    }

    /// Checks bidegree and weight preservation, compatibility with `d`,
    /// products and units wherever the windows allow.
    pub fn check(&self) -> Vec<String> {
        let (s, t) = (&*self.source, &*self.target);
        let mut out = Vec::new();
        let refs = s.all_refs();
        for &b in &refs {
            let img = self.apply(&LevelwiseCdga::basis_elem(b));
            for k in img.keys() {
                if k.bd != b.bd || t.weight_opt(*k) != Some(s.weight(b)) {
                    out.push(format!(
                        "image of {} leaves its bidegree or weight",
                        s.name(b)
                    ));
                }
            }
            if let (Ok(db), Ok(dimg)) = (s.diff_of(b), t.apply_d(&img)) {
                if self.apply(&db) != dimg {
                    out.push(format!("does not commute with d on {}", s.name(b)));
                }
            }
        }
        if let Some(u) = s.unit {
            if self.apply(&LevelwiseCdga::basis_elem(u)) != t.unit_elem() {
                out.push("not unital".into());
            }
        }
        for &x in &refs {
            for &y in &refs {
                let Ok(xy) = s.product(x, y) else { continue };
                let fx = self.apply(&LevelwiseCdga::basis_elem(x));
                let fy = self.apply(&LevelwiseCdga::basis_elem(y));
                if let Ok(p) = t.mul(&fx, &fy) {
                    if p != self.apply(&xy) {
                        out.push(format!(
                            "not multiplicative on ({}, {})",
                            s.name(x),
                            s.name(y)
                        ));
                    }
                }
            }
        }
        out
    }

    /// Matrix of `H(f)` at a bidegree in the representative bases.
    pub fn cohomology_map(
        &self,
        bd: Bidegree,
    ) -> Result<(CohomologyGroup, CohomologyGroup, RationalMatrix), CdgaError> {
        let hs = cohomology(&self.source, bd)?;
        let ht = cohomology(&self.target, bd)?;
        let mut m = RationalMatrix::zeros(ht.dim(), hs.dim());
        for (j, rep) in hs.reps.iter().enumerate() {
            let img = self.apply(&self.source.from_vec(bd, rep));
            let v = self.target.to_vec(bd, &img);
            let c = ht.coords(&v).ok_or_else(|| {
                CdgaError::NotCdgaMap(format!("image of a cycle in {bd} is not a cycle"))
            })?;
            for (i, x) in c.into_iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok((hs, ht, m))
    }

    pub fn is_iso_on_cohomology(&self, bd: Bidegree) -> Result<bool, CdgaError> {
        let (hs, ht, m) = self.cohomology_map(bd)?;
        Ok(hs.dim() == ht.dim() && m.rank() == hs.dim())
    }

    pub fn is_injective_on_cohomology(&self, bd: Bidegree) -> Result<bool, CdgaError> {
        let (hs, _, m) = self.cohomology_map(bd)?;
        Ok(m.rank() == hs.dim())
    }
}
