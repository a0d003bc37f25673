mod common;

use std::sync::Arc;

use common::*;
use dga_core::barhopf::{gamma_of, sullivan_cdga};
use dga_core::cdgacore::{
    expand_free, Bidegree, CdgaMorphism, Elem, FreeCdgaPresentation, LevelwiseCdga, Window,
};
use dga_core::minmodel::*;
use dga_core::repsemi::{GroupKind, IrrLabel};

fn acyclic_pair() -> FreeCdgaPresentation {
    let mut p = gm_pres(&[("x", 1, 1), ("u", 1, 2), ("w", 2, 2)]);
    let d = term(&p, 1, &["w"]);
    p.set_differential("u", d).unwrap();
    p
}

fn gl2_sym() -> FreeCdgaPresentation {
    let mut p = FreeCdgaPresentation::new(GroupKind::GL2);
    p.add_generator("u", 2, IrrLabel::GL2 { sym: 1, det: -1 })
        .unwrap();
    p
}

fn samples() -> Vec<(&'static str, FreeCdgaPresentation)> {
    vec![
        ("ext1", gm_pres(&[("x", 1, 1)])),
        ("ext2", gm_pres(&[("x", 1, 1), ("y", 1, 1)])),
        ("heisenberg", heisenberg()),
        ("acyclic", acyclic_pair()),
        ("gl2_ext", gl2_ext()),
        ("gl2_sym", gl2_sym()),
        (
            "ext_poly",
            gm_pres(&[("x", 1, 1), ("y", 1, 1), ("w", 2, 2)]),
        ),
    ]
}

fn model_of(p: &FreeCdgaPresentation, r: i64) -> (Arc<LevelwiseCdga>, MinimalModelResult) {
    let a = Arc::new(expand(p, 3, r));
    let m = minimal_model(a.clone(), 1, r).unwrap();
    (a, m)
}

fn names(p: &FreeCdgaPresentation) -> Vec<&str> {
    p.generators.iter().map(|g| g.name.as_str()).collect()
}

fn bigraded_dims(p: &FreeCdgaPresentation, n: i64, r: i64) -> Vec<usize> {
    let a = expand(p, n, r);
    w(n, r).bidegrees().map(|bd| a.dim(bd)).collect()
}

#[test]
fn exterior_is_its_own_model() {
    let (_, m) = model_of(&gm_pres(&[("x", 1, 1)]), 3);
    assert_eq!(names(&m.model), ["x"]);
    assert!(m.model.differentials[0].is_empty());
    assert!(m.verified());
}

#[test]
fn heisenberg_is_its_own_model() {
    let (a, m) = model_of(&heisenberg(), 3);
    assert_eq!(names(&m.model), ["x", "y", "z"]);
    assert_eq!(m.model.differentials[2], term(&m.model, 1, &["x", "y"]));
    assert!(is_minimal(&m.model));
    let f = m.morphism(a).unwrap();
    assert!(f.check().is_empty());
}

#[test]
fn acyclic_pair_contributes_nothing() {
    let (a, m) = model_of(&acyclic_pair(), 3);
    assert_eq!(names(&m.model), ["x"]);
    let f = m.morphism(a).unwrap();
    assert!(compare_quasi_iso(&f, Window::new(0, 2, 0, 3)).unwrap());
}

#[test]
fn model_cohomology_matches_by_rank() {
    for (name, p) in samples() {
        let (a, m) = model_of(&p, 3);
        assert!(m.verified(), "{name}: {:?}", m.checks);
        assert!(is_minimal(&m.model), "{name}");
        let mexp = expand_free(&m.model, w(3, 3)).unwrap();
        for r in 0..=3 {
            assert_eq!(
                rank_h(&mexp, Bidegree::new(1, r)),
                rank_h(&a, Bidegree::new(1, r)),
                "{name} H1<{r}>"
            );
            assert!(
                rank_h(&mexp, Bidegree::new(2, r)) <= rank_h(&a, Bidegree::new(2, r)),
                "{name} H2<{r}>"
            );
        }
    }
}

/// Images in the model of each Sullivan generator, matching images in `A`.
fn matching_images(
    s: &LevelwiseCdga,
    m: &LevelwiseCdga,
    phi: &CdgaMorphism,
    psi_gen: &[Elem],
) -> Option<Vec<Elem>> {
    let free = s.free.as_ref().unwrap();
    let mut out = Vec::new();
    for (g, gen) in free.presentation.generators.iter().enumerate() {
        let bd = Bidegree::new(1, gen.adams());
        let cols: Vec<_> = (0..m.dim(bd))
            .map(|i| {
                let e = Elem::from([(
                    dga_core::cdgacore::BasisRef::new(bd, i),
                    dga_core::exactla::q(1),
                )]);
                phi.target.to_vec(bd, &phi.apply(&e))
            })
            .collect();
        let target = phi.target.to_vec(bd, &psi_gen[g]);
        let c = dga_core::exactla::solve(target.len(), &cols, &target)?;
        out.push(m.from_vec(bd, &c));
    }
    Some(out)
}

#[test]
fn one_minimal_model_agrees_with_sullivan_algebra_of_gamma() {
    let r = 3;
    for (name, p) in samples() {
        let (a, m) = model_of(&p, r);
        let (_, g) = gamma_of(&a, r).unwrap();
        let s = sullivan_cdga(&g).unwrap();
        assert_eq!(
            bigraded_dims(&s, 3, r),
            bigraded_dims(&m.model, 3, r),
            "{name}"
        );
        let sexp = Arc::new(expand_free(&s, w(3, r)).unwrap());
        let phi = m.morphism(a.clone()).unwrap();
        let psi = g.length_one_images(&a);
        let imgs = matching_images(&sexp, &phi.source, &phi, &psi).expect(name);
        let k = CdgaMorphism::from_generator_images(sexp, phi.source.clone(), &imgs).unwrap();
        assert!(k.check().is_empty(), "{name}");
        assert!(
            compare_quasi_iso(&k, Window::new(0, 2, 0, r)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn model_of_model_has_same_dims() {
    for (name, p) in samples() {
        let (_, m) = model_of(&p, 3);
        let (_, m2) = model_of(&m.model, 3);
        assert_eq!(
            bigraded_dims(&m.model, 3, 3),
            bigraded_dims(&m2.model, 3, 3),
            "{name}"
        );
    }
}

#[test]
fn chi_is_a_quasi_isomorphism_invariant() {
    for (name, p) in samples() {
        let (a, m) = model_of(&p, 3);
        let mexp = expand_free(&m.model, w(2, 3)).unwrap();
        let (ca, _) = gamma_of(&a, 3).unwrap();
        let (cm, _) = gamma_of(&mexp, 3).unwrap();
        assert_eq!(ca.dims(), cm.dims(), "{name}");
    }
}

#[test]
fn minimality_predicate() {
    assert!(is_minimal(&heisenberg()));
    assert!(!is_minimal(&acyclic_pair()));
    assert!(is_minimal(&gm_pres(&[("x", 1, 1), ("y", 1, 1)])));
}

#[test]
fn generalized_nilpotence() {
    let win = w(3, 3);
    assert!(is_generalized_nilpotent(
        &gm_pres(&[("x", 1, 1), ("y", 1, 1)]),
        win
    ));
    let rep = nilpotence(&heisenberg(), win);
    assert_eq!(
        rep.filtration,
        vec![vec!["x".to_string(), "y".into()], vec!["z".into()]]
    );
    assert!(rep.exhausted && rep.shortcut);
    let mut p = gm_pres(&[("u", 1, 0), ("v", 1, 0)]);
    let uv = term(&p, 1, &["u", "v"]);
    p.set_differential("u", uv.clone()).unwrap();
    p.set_differential("v", uv).unwrap();
    assert!(!is_generalized_nilpotent(&p, win));
}

#[test]
fn quasi_iso_comparison() {
    let a = Arc::new(expand(&gm_pres(&[("x", 1, 1)]), 3, 2));
    let id = CdgaMorphism::identity(a.clone());
    assert!(compare_quasi_iso(&id, Window::new(0, 3, 0, 2)).unwrap());
    let zero = CdgaMorphism::from_atom_images(a.clone(), a.clone(), &[Elem::new()]).unwrap();
    assert!(!compare_quasi_iso(&zero, Window::new(0, 3, 0, 2)).unwrap());
    assert!(matches!(
        compare_quasi_iso(&id, Window::new(0, 4, 0, 2)),
        Err(ModelError::WindowTooSmall(_))
    ));
}

#[test]
fn minimal_model_errors() {
    let a = Arc::new(expand(&heisenberg(), 2, 2));
    assert!(matches!(
        minimal_model(a, 1, 2),
        Err(ModelError::WindowTooSmall(_))
    ));
    let a = Arc::new(expand(&heisenberg(), 3, 3));
    assert!(matches!(
        minimal_model_with_budget(a, 1, 3, 0),
        Err(ModelError::NonTermination { .. })
    ));
}

#[test]
fn two_minimal_model_of_polynomial_generator() {
    let a = Arc::new(expand(&gl2_sym(), 4, 2));
    let m1 = minimal_model(a.clone(), 1, 2).unwrap();
    assert!(m1.model.is_empty());
    let m2 = minimal_model(a, 2, 2).unwrap();
    assert_eq!(names(&m2.model), ["u"]);
    assert!(m2.verified());
}
