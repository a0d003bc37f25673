use std::collections::BTreeMap;

use num::{One, Signed, Zero};

use super::{Bidegree, CdgaError, Window};
use crate::exactla::{fmt_q, Q};
use crate::repsemi::{GroupKind, IrrLabel, TorusWeight};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub label: IrrLabel,
}

impl Generator {
    pub fn adams(&self) -> i64 {
        self.label.adams()
    }
}

/// One weight vector of a generator: `x.i` is the `i`-th monomial basis
/// vector of the generator's irreducible, written `x` when it is a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub generator: usize,
    pub component: usize,
    pub name: String,
    pub degree: i64,
    pub weight: TorusWeight,
}

impl Atom {
    pub fn adams(&self) -> i64 {
        self.weight.adams()
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// Exponent vector over the atoms.
pub type Monomial = Vec<u32>;
pub type Poly = BTreeMap<Monomial, Q>;

pub fn poly_add(acc: &mut Poly, p: &Poly, s: &Q) {
    for (m, c) in p {
        let e = acc.entry(m.clone()).or_insert_with(Q::zero);
        *e += c * s;
        if e.is_zero() {
            acc.remove(m);
        }
    }
}

/// The free graded-commutative algebra on a list of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeAlgebra {
    pub group: GroupKind,
    pub atoms: Vec<Atom>,
}

impl FreeAlgebra {
    pub fn new(group: GroupKind, generators: &[Generator]) -> Self {
        let mut atoms = Vec::new();
        for (g, gen) in generators.iter().enumerate() {
            let dim = gen.label.dim();
            for i in 0..dim {
                let name = if dim == 1 {
                    gen.name.clone()
                } else {
                    format!("{}.{i}", gen.name)
                };
                atoms.push(Atom {
                    generator: g,
                    component: i,
                    name,
                    degree: gen.degree,
                    weight: gen.label.component_weight(i),
                });
            }
        }
        FreeAlgebra { group, atoms }
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn one(&self) -> Monomial {
        vec![0; self.atoms.len()]
    }

    pub fn atom_mono(&self, i: usize) -> Monomial {
        let mut m = self.one();
        m[i] = 1;
        m
    }

    pub fn atom_poly(&self, i: usize) -> Poly {
        Poly::from([(self.atom_mono(i), Q::one())])
    }

    pub fn constant(&self, c: Q) -> Poly {
        if c.is_zero() {
            Poly::new()
        } else {
            Poly::from([(self.one(), c)])
        }
    }

    pub fn atom_index(&self, name: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a.name == name)
    }

    pub fn mono_degree(&self, m: &[u32]) -> i64 {
        m.iter()
            .zip(&self.atoms)
            .map(|(&e, a)| e as i64 * a.degree)
            .sum()
    }

    pub fn mono_weight(&self, m: &[u32]) -> TorusWeight {
        m.iter()
            .zip(&self.atoms)
            .map(|(&e, a)| TorusWeight(a.weight.0 * e as i64, a.weight.1 * e as i64))
            .sum()
    }

    pub fn mono_bidegree(&self, m: &[u32]) -> Bidegree {
        Bidegree::new(self.mono_degree(m), self.mono_weight(m).adams())
    }

    pub fn word_length(m: &[u32]) -> u32 {
        m.iter().sum()
    }

    /// Product of monomials with its Koszul sign, `None` if an odd atom repeats.
    pub fn mul_mono(&self, a: &[u32], b: &[u32]) -> Option<(bool, Monomial)> {
        let mut neg = false;
        let mut odd_after = 0u32; // odd atoms of `a` with index > current
        for i in (0..self.atoms.len()).rev() {
            if self.atoms[i].is_odd() {
                if a[i] > 0 && b[i] > 0 {
                    return None;
                }
                if b[i] > 0 && odd_after % 2 == 1 {
                    neg = !neg;
                }
                odd_after += a[i];
            }
        }
        Some((neg, a.iter().zip(b).map(|(x, y)| x + y).collect()))
    }

    pub fn mul(&self, p: &Poly, q: &Poly) -> Poly {
        let mut out = Poly::new();
        for (ma, ca) in p {
            for (mb, cb) in q {
                if let Some((neg, m)) = self.mul_mono(ma, mb) {
                    let c = ca * cb;
                    let e = out.entry(m.clone()).or_insert_with(Q::zero);
                    if neg {
                        *e -= c;
                    } else {
                        *e += c;
                    }
                    if e.is_zero() {
                        out.remove(&m);
                    }
                }
            }
        }
        out
    }

    /// Extends atom images to a derivation; `odd` selects the Koszul sign
    /// rule of a degree-one derivation.
    pub fn derivation(&self, p: &Poly, images: &[Poly], odd: bool) -> Poly {
        let mut out = Poly::new();
        for (m, c) in p {
            for i in 0..self.atoms.len() {
                let e = m[i];
                if e == 0 || images[i].is_empty() {
                    continue;
                }
                let mut left = self.one();
                left[..i].copy_from_slice(&m[..i]);
                let mut right = self.one();
                right[i + 1..].copy_from_slice(&m[i + 1..]);
                let mut mid = self.one();
                mid[i] = e - 1;
                let mid = Poly::from([(mid, Q::from_integer(e.into()))]);
                let term = self.mul(
                    &self.mul(
                        &Poly::from([(left.clone(), c.clone())]),
                        &self.mul(&mid, &images[i]),
                    ),
                    &Poly::from([(right, Q::one())]),
                );
                let s = if odd && self.mono_degree(&left) % 2 != 0 {
                    -Q::one()
                } else {
                    Q::one()
                };
                poly_add(&mut out, &term, &s);
            }
        }
        out
    }

    /// `e(x.i) = i x.(i-1)`.
    pub fn raise_images(&self) -> Vec<Poly> {
        self.atoms
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if a.component == 0 {
                    Poly::new()
                } else {
                    Poly::from([(
                        self.atom_mono(k - 1),
                        Q::from_integer((a.component as i64).into()),
                    )])
                }
            })
            .collect()
    }

    /// `f(x.i) = (a - i) x.(i+1)` for `x` in `Sym^a`.
    pub fn lower_images(&self) -> Vec<Poly> {
        self.atoms
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let next = self.atoms.get(k + 1).filter(|b| b.generator == a.generator);
                match next {
                    None => Poly::new(),
                    Some(_) => {
                        let top = self
                            .atoms
                            .iter()
                            .filter(|b| b.generator == a.generator)
                            .count()
                            - 1;
                        Poly::from([(
                            self.atom_mono(k + 1),
                            Q::from_integer(((top - a.component) as i64).into()),
                        )])
                    }
                }
            })
            .collect()
    }

    pub fn raise(&self, p: &Poly) -> Poly {
        self.derivation(p, &self.raise_images(), false)
    }

    pub fn lower(&self, p: &Poly) -> Poly {
        self.derivation(p, &self.lower_images(), false)
    }

    pub fn mono_name(&self, m: &[u32]) -> String {
        let parts: Vec<String> = m
            .iter()
            .zip(&self.atoms)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, a)| {
                if e == 1 {
                    a.name.clone()
                } else {
                    format!("{}^{e}", a.name)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Terms in descending monomial order, e.g. `x*y - 1/2*z`.
    pub fn poly_to_string(&self, p: &Poly) -> String {
        if p.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in p.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let is_one = m.iter().all(|&e| e == 0);
            if is_one {
                s.push_str(&fmt_q(&a));
            } else {
                if !a.is_one() {
                    s.push_str(&fmt_q(&a));
                    s.push('*');
                }
                s.push_str(&self.mono_name(m));
            }
        }
        s
    }

    /// All monomials with bidegree in the window, grouped by bidegree and
    /// sorted in descending lexicographic order of exponent vectors.
    pub fn enumerate(&self, window: &Window) -> BTreeMap<Bidegree, Vec<Monomial>> {
        let mut out: BTreeMap<Bidegree, Vec<Monomial>> = BTreeMap::new();
        let mut cur = self.one();
        self.enum_rec(0, 0, window, &mut cur, &mut out);
        for v in out.values_mut() {
            v.sort_by(|a, b| b.cmp(a));
        }
        out
    }

    fn enum_rec(
        &self,
        i: usize,
        deg: i64,
        w: &Window,
        cur: &mut Monomial,
        out: &mut BTreeMap<Bidegree, Vec<Monomial>>,
    ) {
        if i == self.atoms.len() {
            let bd = self.mono_bidegree(cur);
            if w.contains(bd) {
                out.entry(bd).or_default().push(cur.clone());
            }
            return;
        }
        let a = &self.atoms[i];
        let max_e = if a.is_odd() {
            1
        } else {
            ((w.n_max - deg).max(0) / a.degree) as u32
        };
        for e in 0..=max_e {
            if deg + e as i64 * a.degree > w.n_max {
                break;
            }
            cur[i] = e;
            self.enum_rec(i + 1, deg + e as i64 * a.degree, w, cur, out);
        }
        cur[i] = 0;
    }
}

/// A free graded-commutative algebra on generators in positive degrees with
/// a differential. For a generator with a `GL_2` label of dimension > 1 the
/// stored differential is the image of its highest-weight atom `x.0`; the
/// images of the other atoms follow by lowering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeCdgaPresentation {
    pub group: GroupKind,
    pub generators: Vec<Generator>,
    pub differentials: Vec<Poly>,
}

impl FreeCdgaPresentation {
    pub fn new(group: GroupKind) -> Self {
        FreeCdgaPresentation {
            group,
            generators: vec![],
            differentials: vec![],
        }
    }

    pub fn add_generator(
        &mut self,
        name: &str,
        degree: i64,
        label: IrrLabel,
    ) -> Result<usize, CdgaError> {
        if degree < 1 {
            return Err(CdgaError::InvalidGenerator(name.into()));
        }
        if self.generators.iter().any(|g| g.name == name) {
            return Err(CdgaError::DuplicateGenerator(name.into()));
        }
        if label.group() != self.group {
            return Err(crate::repsemi::RepError::WrongGroup {
                label: label.to_string(),
                group: self.group,
            }
            .into());
        }
        self.generators.push(Generator {
            name: name.into(),
            degree,
            label,
        });
        // Existing polynomials gain a new trailing exponent slot per atom.
        let extra = label.dim();
        for p in &mut self.differentials {
            *p = p
                .iter()
                .map(|(m, c)| {
                    let mut m = m.clone();
                    m.extend(std::iter::repeat(0).take(extra));
                    (m, c.clone())
                })
                .collect();
        }
        self.differentials.push(Poly::new());
        Ok(self.generators.len() - 1)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    /// Sets the differential of a generator (of its highest-weight atom).
    pub fn set_differential(&mut self, name: &str, poly: Poly) -> Result<(), CdgaError> {
        let g = self
            .generator_index(name)
            .ok_or_else(|| CdgaError::UnknownGenerator(name.into()))?;
        self.differentials[g] = poly;
        Ok(())
    }

    pub fn algebra(&self) -> FreeAlgebra {
        FreeAlgebra::new(self.group, &self.generators)
    }

    /// Differentials of all atoms.
    pub fn atom_differentials(&self) -> Vec<Poly> {
        let alg = self.algebra();
        let mut out = Vec::with_capacity(alg.len());
        for (g, gen) in self.generators.iter().enumerate() {
            let mut cur = self.differentials[g].clone();
            for j in 0..gen.label.dim() {
                if j > 0 {
                    cur = alg.lower(&cur);
                }
                let s = gen.label.lowering_scale(j).recip();
                out.push(cur.iter().map(|(m, c)| (m.clone(), c * &s)).collect());
            }
        }
        out
    }

    pub fn d(&self, p: &Poly) -> Poly {
        self.algebra()
            .derivation(p, &self.atom_differentials(), true)
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn max_generator_degree(&self) -> i64 {
        self.generators.iter().map(|g| g.degree).max().unwrap_or(0)
    }
}
