#![allow(dead_code)]

use dga_core::cdgacore::{Bidegree, FreeCdgaPresentation, LevelwiseCdga, Poly, Window};
use dga_core::exactla::q;
use dga_core::repsemi::{GroupKind, IrrLabel};

pub fn gm_label(adams: i64) -> IrrLabel {
    IrrLabel::Gm { weight: -adams }
}

pub fn gm_pres(gens: &[(&str, i64, i64)]) -> FreeCdgaPresentation {
    let mut p = FreeCdgaPresentation::new(GroupKind::Gm);
    for &(name, n, r) in gens {
        p.add_generator(name, n, gm_label(r)).unwrap();
    }
    p
}

/// `c` times the product of the named atoms.
pub fn term(p: &FreeCdgaPresentation, c: i64, names: &[&str]) -> Poly {
    let alg = p.algebra();
    let mut acc = alg.constant(q(c));
    for n in names {
        acc = alg.mul(&acc, &alg.atom_poly(alg.atom_index(n).unwrap()));
    }
    acc
}

pub fn heisenberg() -> FreeCdgaPresentation {
    let mut p = gm_pres(&[("x", 1, 1), ("y", 1, 1), ("z", 1, 2)]);
    let d = term(&p, 1, &["x", "y"]);
    p.set_differential("z", d).unwrap();
    p
}

pub fn gl2_ext() -> FreeCdgaPresentation {
    let mut p = FreeCdgaPresentation::new(GroupKind::GL2);
    p.add_generator("x", 1, IrrLabel::GL2 { sym: 1, det: -1 })
        .unwrap();
    p
}

pub fn w(n: i64, r: i64) -> Window {
    Window::new(0, n, 0, r)
}

pub fn expand(p: &FreeCdgaPresentation, n: i64, r: i64) -> LevelwiseCdga {
    dga_core::cdgacore::expand_free(p, w(n, r)).unwrap()
}

/// Cohomology dimension from ranks of the stored differentials.
pub fn rank_h(a: &LevelwiseCdga, bd: Bidegree) -> usize {
    let out = a.diff_matrix(bd).unwrap().rank();
    let inc = if bd.n > 0 {
        a.diff_matrix(bd.shift(-1, 0)).unwrap().rank()
    } else {
        0
    };
    a.dim(bd) - out - inc
}

/// Number of generators per degree of a polynomial algebra with the given
/// Hilbert series `dims[0..]` (`dims[0] = 1`).
pub fn poly_generators(dims: &[usize]) -> Vec<i64> {
    let n = dims.len();
    let mut g = vec![0i64; n];
    for r in 1..n {
        // series of Π_{s<r} (1 - t^s)^{-g_s} at t^r
        let mut ser = vec![0i64; n];
        ser[0] = 1;
        for s in 1..r {
            for _ in 0..g[s] {
                for k in s..n {
                    ser[k] += ser[k - s];
                }
            }
        }
        g[r] = dims[r] as i64 - ser[r];
    }
    g
}
