//! The reduced bar construction of an Adams-connected cdga, the Hopf
//! algebra `χ_A = H⁰(B̄(A))`, its co-Lie algebra of indecomposables `γ_A`
//! and the Sullivan algebra `∧(γ_A[-1])`.
//!
//! Bar words are sequences of non-unit basis vectors of `A`. A word
//! `[a_1|…|a_k]` has bar degree `Σ (deg a_i - 1)`; the shifted degree of an
//! entry is `deg a_i - 1` and all Koszul signs below use shifted degrees
//! unless stated otherwise.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{One, Zero};
use thiserror::Error;

use crate::cdgacore::{
    connectivity, BasisRef, CdgaError, Elem, FreeCdgaPresentation, LevelwiseCdga, Poly,
};
use crate::exactla::{
    axpy, image_basis, kernel_basis, left_inverse, sign, span_basis, zero_vec, RationalMatrix,
    Vector, Q,
};
use crate::repsemi::{GroupKind, IrrLabel, RepSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarError {
    #[error("algebra is not Adams connected on the window")]
    NotAdamsConnected,
    #[error("algebra is not connected on the window; pass a minimal model instead")]
    NotConnected,
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error(
        "bar differential does not square to zero in Adams degree {adams}, bar degree {degree}"
    )]
    DSquared { adams: i64, degree: i64 },
    #[error("cobracket violates co-Jacobi: {0}")]
    CoJacobiViolation(String),
    #[error(transparent)]
    Cdga(#[from] CdgaError),
}

/// `[a_1|…|a_k]` with entries in the augmentation ideal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BarWord {
    pub entries: Vec<BasisRef>,
}

impl BarWord {
    pub fn new(entries: Vec<BasisRef>) -> Self {
        BarWord { entries }
    }

    pub fn empty() -> Self {
        BarWord { entries: vec![] }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bar_degree(&self) -> i64 {
        self.entries.iter().map(|b| b.bd.n - 1).sum()
    }

    pub fn adams(&self) -> i64 {
        self.entries.iter().map(|b| b.bd.r).sum()
    }

    fn shifted(&self) -> i64 {
        self.bar_degree()
    }

    pub fn display(&self, a: &LevelwiseCdga) -> String {
        let names: Vec<&str> = self.entries.iter().map(|&b| a.name(b)).collect();
        format!("[{}]", names.join("|"))
    }

    pub fn names(&self, a: &LevelwiseCdga) -> Vec<String> {
        self.entries
            .iter()
            .map(|&b| a.name(b).to_string())
            .collect()
    }
}

impl fmt::Display for BarWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|b| format!("{}#{}", b.bd, b.idx))
            .collect();
        write!(f, "[{}]", parts.join("|"))
    }
}

pub type WordComb = BTreeMap<BarWord, Q>;
pub type PairComb = BTreeMap<(BarWord, BarWord), Q>;

fn add_to<K: Ord + Clone>(acc: &mut BTreeMap<K, Q>, k: K, c: Q) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(k.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        acc.remove(&k);
    }
}

/// Shuffle product with Koszul signs in the shifted degrees.
pub fn shuffle(u: &BarWord, v: &BarWord) -> WordComb {
    let mut out = WordComb::new();
    let (p, q) = (u.len(), v.len());
    // Choose the positions occupied by u's entries.
    let mut pos = Vec::with_capacity(p);
    fn rec(
        start: usize,
        total: usize,
        need: usize,
        pos: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if need == 0 {
            f(pos);
            return;
        }
        for i in start..=total - need {
            pos.push(i);
            rec(i + 1, total, need - 1, pos, f);
            pos.pop();
        }
    }
    let mut emit = |ps: &[usize]| {
        let mut entries = Vec::with_capacity(p + q);
        let (mut i, mut j) = (0, 0);
        let mut exp = 0i64;
        for k in 0..p + q {
            if i < p && ps[i] == k {
                entries.push(u.entries[i]);
                i += 1;
            } else {
                // v_j moves left past u_i..u_{p-1}
                let sv = v.entries[j].bd.n - 1;
                let su: i64 = u.entries[i..].iter().map(|b| b.bd.n - 1).sum();
                exp += sv * su;
                entries.push(v.entries[j]);
                j += 1;
            }
        }
        add_to(&mut out, BarWord::new(entries), sign(exp));
    };
    rec(0, p + q, p, &mut pos, &mut emit);
    out
}

pub fn shuffle_comb(x: &WordComb, y: &WordComb) -> WordComb {
    let mut out = WordComb::new();
    for (u, cu) in x {
        for (v, cv) in y {
            for (w, c) in shuffle(u, v) {
                add_to(&mut out, w, c * cu * cv);
            }
        }
    }
    out
}

/// Sign rule for deconcatenation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoproductSign {
    /// `(-1)^{i (deg a_{i+1} + … + deg a_n)}` with unshifted degrees.
    Printed,
    /// Plain deconcatenation: no sign, since no entries are permuted.
    Shifted,
}

pub fn coproduct(w: &BarWord, conv: CoproductSign) -> PairComb {
    let mut out = PairComb::new();
    let n = w.len();
    for i in 0..=n {
        let s = match conv {
            CoproductSign::Shifted => Q::one(),
            CoproductSign::Printed => {
                let tail: i64 = w.entries[i..].iter().map(|b| b.bd.n).sum();
                sign(i as i64 * tail)
            }
        };
        let l = BarWord::new(w.entries[..i].to_vec());
        let r = BarWord::new(w.entries[i..].to_vec());
        add_to(&mut out, (l, r), s);
    }
    out
}

pub fn coproduct_comb(x: &WordComb, conv: CoproductSign) -> PairComb {
    let mut out = PairComb::new();
    for (w, c) in x {
        for (k, s) in coproduct(w, conv) {
            add_to(&mut out, k, s * c);
        }
    }
    out
}

/// `ι[a_1|…|a_n] = (-1)^m [a_n|…|a_1]`, `m = Σ_{i<j} deg a_i deg a_j`.
pub fn involution(w: &BarWord) -> (Q, BarWord) {
    let mut m = 0i64;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            m += w.entries[i].bd.n * w.entries[j].bd.n;
        }
    }
    let mut e = w.entries.clone();
    e.reverse();
    (sign(m), BarWord::new(e))
}

/// Antipode of the shuffle Hopf algebra: `(-1)^n` times the Koszul sign of
/// reversing the shifted degrees.
pub fn antipode(w: &BarWord) -> (Q, BarWord) {
    let mut m = w.len() as i64;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            m += (w.entries[i].bd.n - 1) * (w.entries[j].bd.n - 1);
        }
    }
    let mut e = w.entries.clone();
    e.reverse();
    (sign(m), BarWord::new(e))
}

pub fn antipode_comb(x: &WordComb) -> WordComb {
    let mut out = WordComb::new();
    for (w, c) in x {
        let (s, v) = antipode(w);
        add_to(&mut out, v, s * c);
    }
    out
}

pub fn involution_comb(x: &WordComb) -> WordComb {
    let mut out = WordComb::new();
    for (w, c) in x {
        let (s, v) = involution(w);
        add_to(&mut out, v, s * c);
    }
    out
}

/// Product on `B̄ ⊗ B̄` with the Koszul sign in bar degrees.
pub fn pair_product(x: &PairComb, y: &PairComb) -> PairComb {
    let mut out = PairComb::new();
    for ((a, b), c1) in x {
        for ((c, d), c2) in y {
            let s = sign(b.shifted() * c.shifted()) * c1 * c2;
            for (l, cl) in shuffle(a, c) {
                for (r, cr) in shuffle(b, d) {
                    add_to(&mut out, (l.clone(), r), &s * &cl * cr);
                }
            }
        }
    }
    out
}

/// Total differential:
/// `d[a_1|…|a_k] = Σ_i (-1)^{ε_i} [..|d a_i|..] + Σ_i (-1)^{ε_{i+1}} [..|a_i a_{i+1}|..]`
/// where `ε_i` is the shifted degree of `a_1 … a_{i-1}`.
pub fn bar_differential(a: &LevelwiseCdga, w: &BarWord) -> Result<WordComb, CdgaError> {
    let mut out = WordComb::new();
    let mut eps = 0i64;
    let k = w.len();
    for i in 0..k {
        let ai = w.entries[i];
        for (t, c) in a.diff_of(ai)? {
            let mut e = w.entries.clone();
            e[i] = t;
            add_to(&mut out, BarWord::new(e), sign(eps) * c);
        }
        eps += ai.bd.n - 1;
        if i + 1 < k {
            for (t, c) in a.product(ai, w.entries[i + 1])? {
                if Some(t) == a.unit {
                    continue;
                }
                let mut e = w.entries[..i].to_vec();
                e.push(t);
                e.extend_from_slice(&w.entries[i + 2..]);
                add_to(&mut out, BarWord::new(e), sign(eps) * c);
            }
        }
    }
    Ok(out)
}

/// The Adams-degree-`r` part of `B̄(A)` in bar degrees `lo..=hi+1`, with
/// the differential out of degrees `lo..=hi`.
#[derive(Debug, Clone)]
pub struct BarSlice {
    pub adams: i64,
    pub lo: i64,
    pub hi: i64,
    pub words: BTreeMap<i64, Vec<BarWord>>,
    index: BTreeMap<i64, HashMap<BarWord, usize>>,
    pub diff: BTreeMap<i64, RationalMatrix>,
    pub spaces: BTreeMap<i64, RepSpace>,
}

impl BarSlice {
    pub fn words_at(&self, b: i64) -> &[BarWord] {
        self.words.get(&b).map_or(&[], |v| v.as_slice())
    }

    pub fn dim(&self, b: i64) -> usize {
        self.words_at(b).len()
    }

    pub fn position(&self, b: i64, w: &BarWord) -> Option<usize> {
        self.index.get(&b)?.get(w).copied()
    }

    pub fn to_vec(&self, b: i64, x: &WordComb) -> Vector {
        let mut v = zero_vec(self.dim(b));
        for (w, c) in x {
            if let Some(i) = self.position(b, w) {
                v[i] += c;
            }
        }
        v
    }

    pub fn from_vec(&self, b: i64, v: &[Q]) -> WordComb {
        self.words_at(b)
            .iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, c)| (w.clone(), c.clone()))
            .collect()
    }

    /// `d ∘ d = 0` on every consecutive pair of stored differentials.
    pub fn d_squared_ok(&self) -> Result<(), BarError> {
        for b in self.lo..self.hi {
            if let (Some(d0), Some(d1)) = (self.diff.get(&b), self.diff.get(&(b + 1))) {
                if d0.cols() > 0 && d1.rows() > 0 && !(d1 * d0).is_zero() {
                    return Err(BarError::DSquared {
                        adams: self.adams,
                        degree: b,
                    });
                }
            }
        }
        Ok(())
    }

    /// Cocycles, coboundaries and irreducible strings of representatives
    /// at a bar degree strictly inside `lo < b <= hi`.
    pub fn cohomology(&self, b: i64) -> (Vec<(IrrLabel, Vec<Vector>)>, Vec<Vector>, Vec<Vector>) {
        assert!(
            self.lo < b && b <= self.hi,
            "bar degree {b} not interior to the slice"
        );
        let n = self.dim(b);
        if n == 0 {
            return (vec![], vec![], vec![]);
        }
        let cycles = kernel_basis(&self.diff[&b]);
        let boundaries = if self.dim(b - 1) == 0 {
            vec![]
        } else {
            image_basis(&self.diff[&(b - 1)])
        };
        let strings = self.spaces[&b].subquotient(&boundaries, Some(&cycles));
        (strings, cycles, boundaries)
    }
}

fn entry_candidates(a: &LevelwiseCdga, r: i64) -> Vec<BasisRef> {
    a.augmentation_refs()
        .into_iter()
        .filter(|b| b.bd.r >= 1 && b.bd.r <= r)
        .collect()
}

/// Enumerates the bar slice and its differentials and verifies `d² = 0`.
pub fn bar_slice(a: &LevelwiseCdga, r: i64, lo: i64, hi: i64) -> Result<BarSlice, BarError> {
    let conn = connectivity(a);
    if !conn.adams_connected {
        return Err(BarError::NotAdamsConnected);
    }
    let cands = entry_candidates(a, r);
    let min_shift = cands.iter().map(|b| b.bd.n - 1).min().unwrap_or(0);
    let need_n = hi + 2 + (r - 1).max(0) * (-min_shift).max(0);
    let lower_known = a.zero_below.is_some_and(|z| z >= a.window.n_min);
    if a.window.n_max < need_n || a.window.r_max < r || !lower_known {
        return Err(BarError::WindowTooSmall(format!(
            "bar slice in Adams degree {r}, bar degrees {lo}..{hi} needs degrees 0..{need_n} and Adams 0..{r}, window is {}",
            a.window
        )));
    }
    let mut words: BTreeMap<i64, Vec<BarWord>> = (lo..=hi + 1).map(|b| (b, vec![])).collect();
    let mut cur = Vec::new();
    fn rec(
        cands: &[BasisRef],
        rem: i64,
        deg: i64,
        min_shift: i64,
        range: (i64, i64),
        cur: &mut Vec<BasisRef>,
        out: &mut BTreeMap<i64, Vec<BarWord>>,
    ) {
        if rem == 0 {
            if (range.0..=range.1).contains(&deg) {
                out.get_mut(&deg).unwrap().push(BarWord::new(cur.clone()));
            }
            return;
        }
        // Every remaining entry has Adams >= 1, so at most `rem` more entries.
        if deg + rem * min_shift.min(0) > range.1 {
            return;
        }
        for &c in cands {
            if c.bd.r <= rem {
                cur.push(c);
                rec(
                    cands,
                    rem - c.bd.r,
                    deg + c.bd.n - 1,
                    min_shift,
                    range,
                    cur,
                    out,
                );
                cur.pop();
            }
        }
    }
    rec(&cands, r, 0, min_shift, (lo, hi + 1), &mut cur, &mut words);
    let index: BTreeMap<i64, HashMap<BarWord, usize>> = words
        .iter()
        .map(|(&b, ws)| {
            (
                b,
                ws.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect(),
            )
        })
        .collect();

    let mut spaces = BTreeMap::new();
    for (&b, ws) in &words {
        let weights = ws
            .iter()
            .map(|w| w.entries.iter().map(|&e| a.weight(e)).sum())
            .collect();
        let mut space = RepSpace::new(a.group, weights);
        if a.group.has_lie_action() {
            for (j, w) in ws.iter().enumerate() {
                for (raise, dst) in [(true, &mut space.raise), (false, &mut space.lower)] {
                    for (i, &e) in w.entries.iter().enumerate() {
                        let single = LevelwiseCdga::basis_elem(e);
                        let img = if raise {
                            a.raise_elem(&single)
                        } else {
                            a.lower_elem(&single)
                        };
                        for (t, c) in img {
                            let mut ent = w.entries.clone();
                            ent[i] = t;
                            let k = index[&b][&BarWord::new(ent)];
                            dst[(k, j)] += c;
                        }
                    }
                }
            }
        }
        spaces.insert(b, space);
    }

    let mut diff = BTreeMap::new();
    for b in lo..=hi {
        let src = &words[&b];
        let mut m = RationalMatrix::zeros(words[&(b + 1)].len(), src.len());
        for (j, w) in src.iter().enumerate() {
            for (t, c) in bar_differential(a, w)? {
                let i = *index[&(b + 1)].get(&t).ok_or_else(|| {
                    BarError::WindowTooSmall(format!(
                        "bar differential leaves the enumerated words at {}",
                        t.display(a)
                    ))
                })?;
                m[(i, j)] = c;
            }
        }
        diff.insert(b, m);
    }
    let slice = BarSlice {
        adams: r,
        lo,
        hi,
        words,
        index,
        diff,
        spaces,
    };
    slice.d_squared_ok()?;
    Ok(slice)
}

/// `χ_A` in one Adams degree: the bar-degree-0 cohomology of the slice.
#[derive(Debug, Clone)]
pub struct ChiPiece {
    pub adams: i64,
    pub slice: BarSlice,
    pub strings: Vec<(IrrLabel, Vec<Vector>)>,
    pub reps: Vec<Vector>,
    pub cycles: Vec<Vector>,
    pub boundaries: Vec<Vector>,
    /// `dim χ_r x #words`: coordinates of a cocycle in the representative basis.
    pub coord: RationalMatrix,
}

impl ChiPiece {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn words(&self) -> &[BarWord] {
        self.slice.words_at(0)
    }

    pub fn rep_comb(&self, i: usize) -> WordComb {
        self.slice.from_vec(0, &self.reps[i])
    }

    pub fn coords(&self, x: &WordComb) -> Vector {
        self.coord.apply(&self.slice.to_vec(0, x))
    }

    fn coord_column(&self, w: &BarWord) -> Option<Vector> {
        self.slice.position(0, w).map(|i| self.coord.column(i))
    }
}

fn coord_functional(n: usize, lead: &[Vector], tail: &[Vector]) -> RationalMatrix {
    // Rows of the left inverse of [lead | tail] belonging to `tail`.
    let mut cols = lead.to_vec();
    cols.extend(tail.iter().cloned());
    if cols.is_empty() {
        return RationalMatrix::zeros(0, n);
    }
    let l = left_inverse(n, &cols).expect("basis vectors are independent");
    l.select_rows(&(lead.len()..cols.len()).collect::<Vec<_>>())
}

/// Truncation of the Hopf algebra `χ_A` to Adams degrees `0..=cutoff`.
#[derive(Debug, Clone)]
pub struct HopfTruncation {
    pub group: GroupKind,
    pub cutoff: i64,
    pub pieces: Vec<ChiPiece>,
    pub convention: CoproductSign,
}

/// Computes `χ_A` through Adams degree `cutoff`.
pub fn chi(a: &LevelwiseCdga, cutoff: i64) -> Result<HopfTruncation, BarError> {
    let conn = connectivity(a);
    if !conn.adams_connected {
        return Err(BarError::NotAdamsConnected);
    }
    if !conn.connected {
        return Err(BarError::NotConnected);
    }
    let mut pieces = Vec::new();
    for r in 0..=cutoff {
        let slice = bar_slice(a, r, -1, 0)?;
        let (strings, cycles, boundaries) = slice.cohomology(0);
        let reps: Vec<Vector> = strings
            .iter()
            .flat_map(|(_, s)| s.iter().cloned())
            .collect();
        let coord = {
            let mut all = reps.clone();
            all.extend(boundaries.iter().cloned());
            if all.is_empty() {
                RationalMatrix::zeros(0, slice.dim(0))
            } else {
                let l = left_inverse(slice.dim(0), &all).expect("independent");
                l.select_rows(&(0..reps.len()).collect::<Vec<_>>())
            }
        };
        pieces.push(ChiPiece {
            adams: r,
            slice,
            strings,
            reps,
            cycles,
            boundaries,
            coord,
        });
    }
    Ok(HopfTruncation {
        group: a.group,
        cutoff,
        pieces,
        convention: CoproductSign::Shifted,
    })
}

impl HopfTruncation {
    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.dim()).collect()
    }

    pub fn piece(&self, r: i64) -> &ChiPiece {
        &self.pieces[r as usize]
    }

    fn product_with(
        &self,
        s: i64,
        t: i64,
        reps_s: &[WordComb],
        reps_t: &[WordComb],
    ) -> RationalMatrix {
        let target = self.piece(s + t);
        let (ds, dt) = (reps_s.len(), reps_t.len());
        let mut m = RationalMatrix::zeros(target.dim(), ds * dt);
        for i in 0..ds {
            for j in 0..dt {
                let v = target.coords(&shuffle_comb(&reps_s[i], &reps_t[j]));
                for (k, x) in v.into_iter().enumerate() {
                    m[(k, i * dt + j)] = x;
                }
            }
        }
        m
    }

    fn reps(&self, r: i64) -> Vec<WordComb> {
        let p = self.piece(r);
        (0..p.dim()).map(|i| p.rep_comb(i)).collect()
    }

    /// Alternate representatives: each representative plus every coboundary.
    fn alt_reps(&self, r: i64) -> Vec<WordComb> {
        let p = self.piece(r);
        p.reps
            .iter()
            .map(|v| {
                let mut v = v.clone();
                for b in &p.boundaries {
                    axpy(&mut v, &Q::one(), b);
                }
                p.slice.from_vec(0, &v)
            })
            .collect()
    }

    /// `χ_s ⊗ χ_t → χ_{s+t}`; column `i * dim χ_t + j`.
    pub fn product_matrix(&self, s: i64, t: i64) -> RationalMatrix {
        self.product_with(s, t, &self.reps(s), &self.reps(t))
    }

    /// Coordinates of an element of `B̄_s ⊗ B̄_t` (bar degree 0 parts) in `χ_s ⊗ χ_t`.
    fn pair_coords(&self, s: i64, t: i64, x: &PairComb) -> Vector {
        let (ps, pt) = (self.piece(s), self.piece(t));
        let dt = pt.dim();
        let mut v = zero_vec(ps.dim() * dt);
        for ((u, w), c) in x {
            if u.adams() != s || w.adams() != t {
                continue;
            }
            let (Some(cu), Some(cw)) = (ps.coord_column(u), pt.coord_column(w)) else {
                continue;
            };
            for (i, xu) in cu.iter().enumerate() {
                if xu.is_zero() {
                    continue;
                }
                for (j, xw) in cw.iter().enumerate() {
                    v[i * dt + j] += c * xu * xw;
                }
            }
        }
        v
    }

    fn coproduct_with(&self, s: i64, t: i64, reps: &[WordComb]) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(self.piece(s).dim() * self.piece(t).dim(), reps.len());
        for (k, x) in reps.iter().enumerate() {
            let v = self.pair_coords(s, t, &coproduct_comb(x, self.convention));
            for (i, y) in v.into_iter().enumerate() {
                m[(i, k)] = y;
            }
        }
        m
    }

    /// `χ_{s+t} → χ_s ⊗ χ_t`; row `i * dim χ_t + j`.
    pub fn coproduct_matrix(&self, s: i64, t: i64) -> RationalMatrix {
        self.coproduct_with(s, t, &self.reps(s + t))
    }

    /// Matrix of the involution `ι` on `χ_r`, if it preserves cocycles.
    pub fn involution_matrix(&self, r: i64) -> Option<RationalMatrix> {
        self.endo_matrix(r, involution_comb)
    }

    /// Matrix of the antipode on `χ_r`.
    pub fn antipode_matrix(&self, r: i64) -> RationalMatrix {
        self.endo_matrix(r, antipode_comb)
            .expect("the antipode is a chain map")
    }

    fn endo_matrix(&self, r: i64, f: fn(&WordComb) -> WordComb) -> Option<RationalMatrix> {
        let p = self.piece(r);
        let mut m = RationalMatrix::zeros(p.dim(), p.dim());
        for (k, x) in self.reps(r).iter().enumerate() {
            let y = f(x);
            let v = p.slice.to_vec(0, &y);
            if !p.slice.diff[&0].apply(&v).iter().all(|c| c.is_zero()) {
                return None;
            }
            for (i, c) in p.coord.apply(&v).into_iter().enumerate() {
                m[(i, k)] = c;
            }
        }
        Some(m)
    }

    /// Chain-level checks on representatives: commutativity, unit, counit,
    /// coassociativity, compatibility of product and coproduct, and
    /// independence of the induced structure from the chosen representatives.
    pub fn verify(&self) -> Vec<String> {
        let mut out = Vec::new();
        let c = self.cutoff;
        for s in 0..=c {
            for t in 0..=c - s {
                let (rs, rt) = (self.reps(s), self.reps(t));
                for (i, x) in rs.iter().enumerate() {
                    for (j, y) in rt.iter().enumerate() {
                        if shuffle_comb(x, y) != shuffle_comb(y, x) {
                            out.push(format!("product not commutative on χ{s}[{i}] χ{t}[{j}]"));
                        }
                        let lhs = coproduct_comb(&shuffle_comb(x, y), self.convention);
                        let rhs = pair_product(
                            &coproduct_comb(x, self.convention),
                            &coproduct_comb(y, self.convention),
                        );
                        if lhs != rhs {
                            out.push(format!(
                                "coproduct not multiplicative on χ{s}[{i}] χ{t}[{j}]"
                            ));
                        }
                    }
                }
                if self.product_matrix(s, t)
                    != self.product_with(s, t, &self.alt_reps(s), &self.alt_reps(t))
                {
                    out.push(format!("product χ{s} ⊗ χ{t} depends on representatives"));
                }
                if self.coproduct_matrix(s, t) != self.coproduct_with(s, t, &self.alt_reps(s + t)) {
                    out.push(format!(
                        "coproduct into χ{s} ⊗ χ{t} depends on representatives"
                    ));
                }
            }
            for (i, x) in self.reps(s).iter().enumerate() {
                // counit: the (empty, x) and (x, empty) components return x.
                let d = coproduct_comb(x, self.convention);
                let left: WordComb = d
                    .iter()
                    .filter(|((u, _), _)| u.is_empty())
                    .map(|((_, v), c)| (v.clone(), c.clone()))
                    .collect();
                let right: WordComb = d
                    .iter()
                    .filter(|((_, v), _)| v.is_empty())
                    .map(|((u, _), c)| (u.clone(), c.clone()))
                    .collect();
                if &left != x || &right != x {
                    out.push(format!("counit fails on χ{s}[{i}]"));
                }
                let mut l3: BTreeMap<(BarWord, BarWord, BarWord), Q> = BTreeMap::new();
                let mut r3: BTreeMap<(BarWord, BarWord, BarWord), Q> = BTreeMap::new();
                for ((u, v), c1) in &d {
                    for ((u1, u2), c2) in coproduct(u, self.convention) {
                        add_to(&mut l3, (u1, u2, v.clone()), c1 * c2);
                    }
                    for ((v1, v2), c2) in coproduct(v, self.convention) {
                        add_to(&mut r3, (u.clone(), v1, v2), c1 * c2);
                    }
                }
                if l3 != r3 {
                    out.push(format!("coproduct not coassociative on χ{s}[{i}]"));
                }
            }
        }
        out
    }
}

/// One Adams degree of `γ_A = I/I²`.
#[derive(Debug, Clone)]
pub struct GammaPiece {
    pub adams: i64,
    pub strings: Vec<(IrrLabel, Vec<Vector>)>,
    pub reps: Vec<Vector>,
    /// Basis of the shuffle-decomposable cocycles.
    pub decomposables: Vec<Vector>,
    /// `dim γ_r x #words`: γ-coordinates, vanishing on decomposables and coboundaries.
    pub coord: RationalMatrix,
    pub words: Vec<BarWord>,
}

impl GammaPiece {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn labels(&self) -> Vec<IrrLabel> {
        self.strings.iter().map(|(l, _)| *l).collect()
    }
}

/// `γ_A` with its cobracket, through Adams degree `cutoff`.
#[derive(Debug, Clone)]
pub struct CoLieData {
    pub group: GroupKind,
    pub cutoff: i64,
    /// Indexed by Adams degree; the Adams-0 piece is always zero.
    pub pieces: Vec<GammaPiece>,
    /// Per Adams degree `r`: rows indexed by blocks `(s, t)` with
    /// `s + t = r`, `s` ascending, entry `i * dim γ_t + j` inside a block.
    pub cobracket: BTreeMap<i64, RationalMatrix>,
}

impl CoLieData {
    pub fn dims(&self) -> Vec<usize> {
        self.pieces.iter().map(|p| p.dim()).collect()
    }

    pub fn piece(&self, r: i64) -> &GammaPiece {
        &self.pieces[r as usize]
    }

    /// Block layout of `⊕_{s+t=r} γ_s ⊗ γ_t`: `(s, t, offset)`.
    pub fn blocks(&self, r: i64) -> Vec<(i64, i64, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        for s in 1..r {
            let t = r - s;
            out.push((s, t, off));
            off += self.piece(s).dim() * self.piece(t).dim();
        }
        out
    }

    /// Global index of `(r, i)` in the list of all basis vectors of `γ`.
    fn global_offsets(&self) -> Vec<usize> {
        let mut offs = Vec::new();
        let mut acc = 0;
        for p in &self.pieces {
            offs.push(acc);
            acc += p.dim();
        }
        offs
    }

    /// The length-one part of each representative, as an element of `A`,
    /// for the highest-weight vector of every summand (Sullivan generator order).
    pub fn length_one_images(&self, a: &LevelwiseCdga) -> Vec<Elem> {
        let mut out = Vec::new();
        for p in &self.pieces {
            for (_, string) in &p.strings {
                let mut e = Elem::new();
                for (w, c) in p.words.iter().zip(&string[0]) {
                    if w.len() == 1 && !c.is_zero() {
                        crate::cdgacore::elem_add(
                            &mut e,
                            &LevelwiseCdga::basis_elem(w.entries[0]),
                            c,
                        );
                    }
                }
                let _ = a;
                out.push(e);
            }
        }
        out
    }

    /// Co-antisymmetry: the cobracket is anti-invariant under the twist.
    pub fn is_coantisymmetric(&self) -> bool {
        self.cobracket.iter().all(|(&r, m)| {
            let tw = self.twist_matrix(r);
            &tw * m == m.scale(&-Q::one())
        })
    }

    fn twist_matrix(&self, r: i64) -> RationalMatrix {
        let blocks = self.blocks(r);
        let n: usize = blocks
            .iter()
            .map(|&(s, t, _)| self.piece(s).dim() * self.piece(t).dim())
            .sum();
        let mut m = RationalMatrix::zeros(n, n);
        let off_of = |s: i64| blocks.iter().find(|b| b.0 == s).map(|b| b.2).unwrap();
        for &(s, t, off) in &blocks {
            let (ds, dt) = (self.piece(s).dim(), self.piece(t).dim());
            let off2 = off_of(t);
            for i in 0..ds {
                for j in 0..dt {
                    m[(off2 + j * ds + i, off + i * dt + j)] = Q::one();
                }
            }
        }
        m
    }
}

/// `γ_A = I/I²` with the cobracket `Δ̄ - τΔ̄` descended to the quotient.
pub fn gamma(chi: &HopfTruncation) -> CoLieData {
    let mut pieces = Vec::new();
    for r in 0..=chi.cutoff {
        let p = chi.piece(r);
        let words = p.words().to_vec();
        let n = words.len();
        if r == 0 {
            pieces.push(GammaPiece {
                adams: 0,
                strings: vec![],
                reps: vec![],
                decomposables: vec![],
                coord: RationalMatrix::zeros(0, n),
                words,
            });
            continue;
        }
        let mut dec = Vec::new();
        for s in 1..r {
            let t = r - s;
            for x in chi.reps(s) {
                for y in chi.reps(t) {
                    dec.push(p.slice.to_vec(0, &shuffle_comb(&x, &y)));
                }
            }
        }
        let decomposables = span_basis(n, &dec);
        let mut sub = decomposables.clone();
        sub.extend(p.boundaries.iter().cloned());
        let sub = span_basis(n, &sub);
        let strings = if n == 0 {
            vec![]
        } else {
            p.slice.spaces[&0].subquotient(&sub, Some(&p.cycles))
        };
        let reps: Vec<Vector> = strings
            .iter()
            .flat_map(|(_, s)| s.iter().cloned())
            .collect();
        let coord = coord_functional(n, &sub, &reps);
        pieces.push(GammaPiece {
            adams: r,
            strings,
            reps,
            decomposables,
            coord,
            words,
        });
    }
    let mut g = CoLieData {
        group: chi.group,
        cutoff: chi.cutoff,
        pieces,
        cobracket: BTreeMap::new(),
    };
    for r in 1..=chi.cutoff {
        let blocks = g.blocks(r);
        let rows: usize = blocks
            .iter()
            .map(|&(s, t, _)| g.piece(s).dim() * g.piece(t).dim())
            .sum();
        let p = chi.piece(r);
        let mut m = RationalMatrix::zeros(rows, g.piece(r).dim());
        for (k, rep) in g.piece(r).reps.iter().enumerate() {
            let delta = coproduct_comb(&p.slice.from_vec(0, rep), chi.convention);
            for &(s, t, off) in &blocks {
                let (gs, gt) = (g.piece(s), g.piece(t));
                let dt = gt.dim();
                for ((u, w), c) in &delta {
                    if u.adams() != s || w.adams() != t {
                        continue;
                    }
                    let (Some(iu), Some(iw)) = (
                        gs.words.iter().position(|x| x == u),
                        gt.words.iter().position(|x| x == w),
                    ) else {
                        continue;
                    };
                    for i in 0..gs.dim() {
                        let cu = &gs.coord[(i, iu)];
                        if cu.is_zero() {
                            continue;
                        }
                        for j in 0..dt {
                            m[(off + i * dt + j, k)] += c * cu * &gt.coord[(j, iw)];
                        }
                    }
                }
            }
        }
        // Δ̄ - τΔ̄ (bar degree 0, so the twist carries no sign).
        let tw = g.twist_matrix(r);
        let cob = m.sub(&(&tw * &m));
        g.cobracket.insert(r, cob);
    }
    g
}

/// `∧(γ[-1])`: one degree-1 generator per irreducible summand of `γ`, with
/// `d g = -Σ_{i<j} C_ij g_i g_j` where `C` is the cobracket of `g`.
pub fn sullivan_cdga(g: &CoLieData) -> Result<FreeCdgaPresentation, BarError> {
    let mut p = FreeCdgaPresentation::new(g.group);
    for piece in &g.pieces {
        for (k, (label, _)) in piece.strings.iter().enumerate() {
            p.add_generator(&format!("g{}_{}", piece.adams, k), 1, *label)?;
        }
    }
    let alg = p.algebra();
    let offs = g.global_offsets();
    let half = Q::new(1.into(), 2.into());
    let mut gen = 0;
    for piece in &g.pieces {
        let r = piece.adams;
        let mut col = 0;
        for (_, string) in &piece.strings {
            let mut d = Poly::new();
            if let Some(m) = g.cobracket.get(&r) {
                for (s, t, off) in g.blocks(r) {
                    let dt = g.piece(t).dim();
                    for i in 0..g.piece(s).dim() {
                        for j in 0..dt {
                            let c = &m[(off + i * dt + j, col)];
                            if c.is_zero() {
                                continue;
                            }
                            let term = alg.mul(
                                &alg.atom_poly(offs[s as usize] + i),
                                &alg.atom_poly(offs[t as usize] + j),
                            );
                            crate::cdgacore::poly_add(&mut d, &term, &(-(c * &half)));
                        }
                    }
                }
            }
            p.differentials[gen] = d;
            gen += 1;
            col += string.len();
        }
    }
    // co-Jacobi is d² = 0 on generators.
    let atom_d = p.atom_differentials();
    for (i, dpoly) in atom_d.iter().enumerate() {
        let dd = p.d(dpoly);
        if !dd.is_empty() {
            return Err(BarError::CoJacobiViolation(format!(
                "d(d({})) = {}",
                alg.atoms[i].name,
                alg.poly_to_string(&dd)
            )));
        }
    }
    Ok(p)
}

/// `χ` and `γ` through Adams degree `cutoff`.
pub fn gamma_of(a: &LevelwiseCdga, cutoff: i64) -> Result<(HopfTruncation, CoLieData), BarError> {
    let c = chi(a, cutoff)?;
    let g = gamma(&c);
    Ok((c, g))
}
