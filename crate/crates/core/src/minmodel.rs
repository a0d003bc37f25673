//! n-minimal models by double induction on Adams degree and cohomological
//! degree, minimality and generalized nilpotence, and quasi-isomorphism
//! comparison on a window.

use std::collections::BTreeSet;
use std::sync::Arc;

use num::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cdgacore::{
    cohomology, connectivity, expand_free, Bidegree, CdgaError, CdgaMorphism, Elem, FreeAlgebra,
    FreeCdgaPresentation, LevelwiseCdga, Poly, Window,
};
use crate::exactla::{kernel_basis, solve, span_basis, RationalMatrix, Vector};
use crate::repsemi::IrrLabel;

pub const DEFAULT_STAGE_BUDGET: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("algebra is not cohomologically connected on the window")]
    NotCohConnected,
    #[error("algebra is not Adams connected on the window")]
    NotAdamsConnected,
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("stage budget of {budget} exceeded in Adams degree {adams}")]
    NonTermination { adams: i64, budget: usize },
    #[error("cohomology in degree 1, Adams {0} cannot be killed without degree-0 generators")]
    KernelInDegreeOne(i64),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
}

/// What one stage adjoined.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub adams: i64,
    pub degree: i64,
    /// `"cokernel"` for new cohomology classes, `"kernel"` for killers.
    pub kind: &'static str,
    pub generators: Vec<String>,
    pub labels: Vec<IrrLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageCheck {
    pub degree: i64,
    pub adams: i64,
    /// `"iso"` or `"injective"`.
    pub requirement: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct MinimalModelResult {
    pub n: i64,
    pub adams_max: i64,
    pub model: FreeCdgaPresentation,
    /// Image in `A` of the highest-weight atom of each generator.
    pub images: Vec<Elem>,
    pub log: Vec<Stage>,
    pub checks: Vec<StageCheck>,
    pub window_qualified: bool,
}

impl MinimalModelResult {
    pub fn verified(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// Expands the model on the window of `a` restricted to degrees
    /// `0..=n+1` and returns the comparison map into `a`.
    pub fn morphism(&self, a: Arc<LevelwiseCdga>) -> Result<CdgaMorphism, CdgaError> {
        let w = Window::new(0, (self.n + 2).min(a.window.n_max), 0, self.adams_max);
        let m = Arc::new(expand_free(&self.model, w)?);
        CdgaMorphism::from_generator_images(m, a, &self.images)
    }
}

struct Builder<'a> {
    a: &'a LevelwiseCdga,
    a_arc: Arc<LevelwiseCdga>,
    n: i64,
    model: FreeCdgaPresentation,
    images: Vec<Elem>,
    log: Vec<Stage>,
}

impl Builder<'_> {
    fn morphism(&self, adams: i64) -> Result<CdgaMorphism, CdgaError> {
        let m = Arc::new(expand_free(
            &self.model,
            Window::new(0, self.n + 2, 0, adams),
        )?);
        CdgaMorphism::from_generator_images(m, self.a_arc.clone(), &self.images)
    }

    /// A generator name: the name of the generator of a free `A` whose
    /// highest-weight atom is the image, otherwise `e{adams}_{degree}_{k}`.
    fn name_for(&self, image: &Elem, label: IrrLabel, adams: i64, degree: i64) -> String {
        if let (Some(free), Some((b, c))) = (&self.a.free, image.iter().next()) {
            if image.len() == 1 && c.is_one() {
                let mono = &free.monomials[&b.bd][b.idx];
                if FreeAlgebra::word_length(mono) == 1 {
                    let atom = &free.algebra.atoms[mono.iter().position(|&e| e == 1).unwrap()];
                    let gen = &free.presentation.generators[atom.generator];
                    if atom.component == 0
                        && gen.label == label
                        && self.model.generator_index(&gen.name).is_none()
                    {
                        return gen.name.clone();
                    }
                }
            }
        }
        let mut k = 0;
        loop {
            let name = format!("e{adams}_{degree}_{k}");
            if self.model.generator_index(&name).is_none() {
                return name;
            }
            k += 1;
        }
    }

    fn adjoin(
        &mut self,
        degree: i64,
        label: IrrLabel,
        d: Poly,
        image: Elem,
        adams: i64,
    ) -> Result<String, CdgaError> {
        // A single-term image is normalized to coefficient 1.
        let (d, image) = match image.iter().next() {
            Some((_, c)) if image.len() == 1 && !c.is_one() => {
                let s = c.recip();
                (
                    d.into_iter().map(|(m, x)| (m, x * &s)).collect(),
                    crate::cdgacore::elem_scaled(&image, &s),
                )
            }
            _ => (d, image),
        };
        let name = self.name_for(&image, label, adams, degree);
        self.model.add_generator(&name, degree, label)?;
        // Differentials of existing generators were padded; pad the new one.
        let len = self.model.algebra().len();
        let d: Poly = d
            .into_iter()
            .map(|(mut m, c)| {
                m.resize(len, 0);
                (m, c)
            })
            .collect();
        self.model.set_differential(&name, d)?;
        self.images.push(image);
        Ok(name)
    }

    /// Adds closed generators realizing the cokernel of `H^i(f)<m>`.
    fn cokernel(&mut self, f: &CdgaMorphism, bd: Bidegree) -> Result<bool, ModelError> {
        let ha = cohomology(self.a, bd)?;
        if ha.dim() == 0 {
            return Ok(false);
        }
        let hm = cohomology(&f.source, bd)?;
        let mut sub: Vec<Vector> = hm
            .reps
            .iter()
            .map(|z| self.a.to_vec(bd, &f.apply(&f.source.from_vec(bd, z))))
            .collect();
        sub.extend(ha.boundaries.iter().cloned());
        let sub = span_basis(ha.space_dim, &sub);
        let strings = self.a.space(bd).subquotient(&sub, Some(&ha.cycles));
        if strings.is_empty() {
            return Ok(false);
        }
        let mut stage = Stage {
            adams: bd.r,
            degree: bd.n,
            kind: "cokernel",
            generators: vec![],
            labels: vec![],
        };
        for (label, vs) in strings {
            let image = self.a.from_vec(bd, &vs[0]);
            let name = self.adjoin(bd.n, label, Poly::new(), image, bd.r)?;
            stage.generators.push(name);
            stage.labels.push(label);
        }
        self.log.push(stage);
        Ok(true)
    }

    /// Adds generators of degree `i-1` killing the kernel of `H^i(f)<m>`.
    fn kernel(&mut self, f: &CdgaMorphism, bd: Bidegree) -> Result<bool, ModelError> {
        let hm = cohomology(&f.source, bd)?;
        if hm.dim() == 0 {
            return Ok(false);
        }
        let ha = cohomology(self.a, bd)?;
        let src = &f.source;
        // Cocycles of M whose image is a coboundary in A.
        let imgs: Vec<Vector> = hm
            .cycles
            .iter()
            .map(|z| self.a.to_vec(bd, &f.apply(&src.from_vec(bd, z))))
            .collect();
        let mut cols = imgs.clone();
        cols.extend(ha.boundaries.iter().cloned());
        let rel = kernel_basis(&RationalMatrix::from_columns(ha.space_dim, &cols));
        let k: Vec<Vector> = rel
            .iter()
            .map(|c| {
                let mut v = crate::exactla::zero_vec(hm.space_dim);
                for (z, x) in hm.cycles.iter().zip(c) {
                    crate::exactla::axpy(&mut v, x, z);
                }
                v
            })
            .collect();
        let k = span_basis(hm.space_dim, &k);
        let strings = src.space(bd).subquotient(&hm.boundaries, Some(&k));
        if strings.is_empty() {
            return Ok(false);
        }
        if bd.n <= 1 {
            return Err(ModelError::KernelInDegreeOne(bd.r));
        }
        let below = bd.shift(-1, 0);
        let da = self.a.diff_matrix(below)?;
        let space = self.a.space(below);
        let free = src.free.as_ref().expect("model is free");
        let mut stage = Stage {
            adams: bd.r,
            degree: below.n,
            kind: "kernel",
            generators: vec![],
            labels: vec![],
        };
        for (label, vs) in strings {
            let z = &vs[0];
            let target = self.a.to_vec(bd, &f.apply(&src.from_vec(bd, z)));
            let hw = space.highest_weight_vectors(label.highest_weight(), None);
            let images: Vec<Vector> = hw.iter().map(|v| da.apply(v)).collect();
            let coef = solve(da.rows(), &images, &target).ok_or_else(|| {
                ModelError::Cdga(CdgaError::NotCdgaMap(format!(
                    "no highest-weight primitive in {below}"
                )))
            })?;
            let mut a = crate::exactla::zero_vec(space.dim());
            for (v, c) in hw.iter().zip(&coef) {
                crate::exactla::axpy(&mut a, c, v);
            }
            let mut d = Poly::new();
            for (mono, c) in free.monomials[&bd].iter().zip(z) {
                if !c.is_zero() {
                    d.insert(mono.clone(), c.clone());
                }
            }
            let name = self.adjoin(below.n, label, d, self.a.from_vec(below, &a), bd.r)?;
            stage.generators.push(name);
            stage.labels.push(label);
        }
        self.log.push(stage);
        Ok(true)
    }
}

/// The `n`-minimal model `A{n}` through Adams degree `adams_max`.
pub fn minimal_model(
    a: Arc<LevelwiseCdga>,
    n: i64,
    adams_max: i64,
) -> Result<MinimalModelResult, ModelError> {
    minimal_model_with_budget(a, n, adams_max, DEFAULT_STAGE_BUDGET)
}

pub fn minimal_model_with_budget(
    a: Arc<LevelwiseCdga>,
    n: i64,
    adams_max: i64,
    budget: usize,
) -> Result<MinimalModelResult, ModelError> {
    let conn = connectivity(&a);
    if !conn.adams_connected {
        return Err(ModelError::NotAdamsConnected);
    }
    if !conn.cohomologically_connected {
        return Err(ModelError::NotCohConnected);
    }
    if a.window.n_max < n + 2
        || a.window.r_max < adams_max
        || a.window.n_min > 0
        || a.window.r_min > 1
    {
        return Err(ModelError::WindowTooSmall(format!(
            "a {n}-minimal model through Adams {adams_max} needs degrees 0..{} and Adams 1..{adams_max}, window is {}",
            n + 2,
            a.window
        )));
    }
    let mut b = Builder {
        a: &a,
        a_arc: a.clone(),
        n,
        model: FreeCdgaPresentation::new(a.group),
        images: vec![],
        log: vec![],
    };
    for m in 1..=adams_max {
        let mut stages = 0;
        loop {
            stages += 1;
            if stages > budget {
                return Err(ModelError::NonTermination { adams: m, budget });
            }
            let f = b.morphism(m)?;
            let mut changed = false;
            for i in 1..=n {
                changed |= b.cokernel(&f, Bidegree::new(i, m))?;
            }
            if changed {
                continue;
            }
            for i in 2..=n + 1 {
                changed |= b.kernel(&f, Bidegree::new(i, m))?;
            }
            if !changed {
                break;
            }
        }
    }
    let mut checks = Vec::new();
    for m in 1..=adams_max {
        let f = b.morphism(m)?;
        for i in 1..=n + 1 {
            let bd = Bidegree::new(i, m);
            let (requirement, holds) = if i <= n {
                ("iso", f.is_iso_on_cohomology(bd)?)
            } else {
                ("injective", f.is_injective_on_cohomology(bd)?)
            };
            checks.push(StageCheck {
                degree: i,
                adams: m,
                requirement,
                holds,
            });
        }
    }
    Ok(MinimalModelResult {
        n,
        adams_max,
        model: b.model,
        images: b.images,
        log: b.log,
        checks,
        window_qualified: conn.window_qualified,
    })
}

/// `d(V) ⊆ (I)²`: no generator has a linear term in its differential.
pub fn is_minimal(p: &FreeCdgaPresentation) -> bool {
    p.differentials
        .iter()
        .all(|d| d.keys().all(|m| FreeAlgebra::word_length(m) != 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NilpotenceReport {
    /// Generators entering at each filtration stage.
    pub filtration: Vec<Vec<String>>,
    pub exhausted: bool,
    /// Minimal, and `A^q<r> = 0` unless `2r >= q` on the window.
    pub shortcut: bool,
}

/// The generator filtration: stage `k+1` adds every generator whose
/// differential lies in the subalgebra generated by stages `≤ k`.
pub fn nilpotence(p: &FreeCdgaPresentation, window: Window) -> NilpotenceReport {
    let gens: Vec<usize> = (0..p.generators.len())
        .filter(|&g| {
            let gen = &p.generators[g];
            gen.degree <= window.n_max && gen.adams() <= window.r_max
        })
        .collect();
    let alg = p.algebra();
    let atom_gen: Vec<usize> = alg.atoms.iter().map(|a| a.generator).collect();
    let mut done: BTreeSet<usize> = BTreeSet::new();
    let mut filtration = Vec::new();
    loop {
        let stage: Vec<usize> = gens
            .iter()
            .copied()
            .filter(|g| !done.contains(g))
            .filter(|&g| {
                p.differentials[g].keys().all(|m| {
                    m.iter()
                        .enumerate()
                        .all(|(i, &e)| e == 0 || done.contains(&atom_gen[i]))
                })
            })
            .collect();
        if stage.is_empty() {
            break;
        }
        filtration.push(
            stage
                .iter()
                .map(|&g| p.generators[g].name.clone())
                .collect(),
        );
        done.extend(stage);
    }
    let exhausted = done.len() == gens.len();
    let shortcut = is_minimal(p) && {
        let w = Window::new(0, window.n_max, 0, window.r_max);
        alg.enumerate(&w)
            .iter()
            .all(|(bd, ms)| ms.is_empty() || 2 * bd.r >= bd.n)
    };
    NilpotenceReport {
        filtration,
        exhausted,
        shortcut,
    }
}

pub fn is_generalized_nilpotent(p: &FreeCdgaPresentation, window: Window) -> bool {
    nilpotence(p, window).exhausted
}

/// True iff `H(f)` is an isomorphism at every bidegree of `window` below
/// its top cohomological degree.
pub fn compare_quasi_iso(f: &CdgaMorphism, window: Window) -> Result<bool, ModelError> {
    for side in [&f.source, &f.target] {
        let w = side.window;
        if w.n_max < window.n_max || w.r_min > window.r_min || w.r_max < window.r_max {
            return Err(ModelError::WindowTooSmall(format!(
                "comparison on {window} needs it inside {w}"
            )));
        }
    }
    for n in window.n_min..window.n_max {
        for r in window.r_min..=window.r_max {
            let bd = Bidegree::new(n, r);
            match f.is_iso_on_cohomology(bd) {
                Ok(true) => {}
                Ok(false) => return Ok(false),
                Err(CdgaError::OutOfWindow(_)) | Err(CdgaError::WindowTooSmall(_)) => {
                    return Err(ModelError::WindowTooSmall(format!(
                        "cohomology at {bd} is not determined"
                    )))
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(true)
}
