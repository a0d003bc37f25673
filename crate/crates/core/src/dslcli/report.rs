//! JSON payloads of the subcommands. Every map is built in a fixed order so
//! the output is byte-stable.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use super::{expand_bases, Document, DslError};
use crate::barhopf::{bar_slice, gamma_of, sullivan_cdga};
use crate::cdgacore::{
    check_cdga, cohomology as cdga_cohomology, connectivity, expand_free, LevelwiseCdga, Window,
};
use crate::cellconn::{ext, heart_test, q, quasi_iso_test, truncate_le0, weight_dims, Connection};
use crate::minmodel::minimal_model;
use crate::repsemi::SemisimpleObject;

/// A payload and whether it records a mathematical violation.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub json: Value,
    pub violation: bool,
}

impl Outcome {
    fn ok(json: Value) -> Self {
        Outcome {
            json,
            violation: false,
        }
    }
}

fn cdga_named<'a>(
    doc: &'a Document,
    name: Option<&str>,
) -> Result<(&'a str, &'a crate::cdgacore::FreeCdgaPresentation), DslError> {
    match name {
        Some(n) => doc
            .cdgas
            .iter()
            .find(|(m, _)| m == n)
            .map(|(m, p)| (m.as_str(), p))
            .ok_or_else(|| DslError::Usage(format!("no cdga named `{n}`"))),
        None => doc
            .cdgas
            .first()
            .map(|(n, p)| (n.as_str(), p))
            .ok_or_else(|| DslError::Usage("the file declares no cdga".into())),
    }
}

fn expand(
    doc: &Document,
    name: Option<&str>,
    w: Window,
) -> Result<(String, Arc<LevelwiseCdga>), DslError> {
    let (n, p) = cdga_named(doc, name)?;
    Ok((n.to_string(), Arc::new(expand_free(p, w)?)))
}

fn object(o: &SemisimpleObject) -> Value {
    serde_json::to_value(o).expect("serializable")
}

fn q_table(c: &Connection) -> Value {
    let mut m = Map::new();
    for (n, o) in q(c).cohomology_table() {
        m.insert(n.to_string(), json!(o.dim()));
    }
    Value::Object(m)
}

pub fn check(doc: &Document) -> Result<Outcome, DslError> {
    let mut cdgas = Map::new();
    let mut violation = false;
    for (name, p) in &doc.cdgas {
        let a = expand_free(p, doc.window)?;
        let rep = check_cdga(&a);
        violation |= !rep.ok();
        cdgas.insert(
            name.clone(),
            json!({ "ok": rep.ok(), "violations": rep.violations }),
        );
    }
    let (modules, bad) = module_reports(doc, None, |c| {
        let r = c.check();
        (serde_json::to_value(&r).expect("serializable"), !r.ok())
    })?;
    Ok(Outcome {
        json: json!({ "cdgas": cdgas, "modules": modules }),
        violation: violation || bad,
    })
}

fn cohomology_maps(a: &LevelwiseCdga, w: Window) -> Result<(Value, Value), DslError> {
    let mut dims: BTreeMap<i64, Map<String, Value>> = BTreeMap::new();
    let mut objs: BTreeMap<i64, Map<String, Value>> = BTreeMap::new();
    for bd in w.bidegrees() {
        let h = cdga_cohomology(a, bd)?;
        if h.object.is_zero() {
            continue;
        }
        dims.entry(bd.n)
            .or_default()
            .insert(bd.r.to_string(), json!(h.object.dim()));
        objs.entry(bd.n)
            .or_default()
            .insert(bd.r.to_string(), object(&h.object));
    }
    let wrap = |m: BTreeMap<i64, Map<String, Value>>| {
        Value::Object(
            m.into_iter()
                .map(|(k, v)| (k.to_string(), Value::Object(v)))
                .collect(),
        )
    };
    Ok((wrap(dims), wrap(objs)))
}

pub fn cohomology(doc: &Document, name: Option<&str>, w: Window) -> Result<Outcome, DslError> {
    let ew = Window::new(w.n_min.min(0), w.n_max + 1, w.r_min.min(0), w.r_max);
    let (n, a) = expand(doc, name, ew)?;
    let (dims, objs) = cohomology_maps(&a, w)?;
    Ok(Outcome::ok(
        json!({ "cdga": n, "window": w.to_string(), "cohomology": dims, "objects": objs }),
    ))
}

pub fn bar(doc: &Document, name: Option<&str>, r_max: i64) -> Result<Outcome, DslError> {
    let (n, a) = expand(doc, name, Window::new(0, 3, 0, r_max))?;
    let mut slices = Map::new();
    let mut violation = false;
    for r in 1..=r_max {
        let s = bar_slice(&a, r, -1, 1)?;
        let ok = s.d_squared_ok().is_ok();
        violation |= !ok;
        let dims: Map<String, Value> = (-1..=1).map(|b| (b.to_string(), json!(s.dim(b)))).collect();
        let h: Map<String, Value> = (0..=0)
            .map(|b| {
                (
                    b.to_string(),
                    json!(s.cohomology(b).0.iter().map(|x| x.1.len()).sum::<usize>()),
                )
            })
            .collect();
        slices.insert(
            r.to_string(),
            json!({ "dims": dims, "d_squared_zero": ok, "cohomology": h }),
        );
    }
    let (chi, _) = gamma_of(&a, r_max)?;
    let failures = chi.verify();
    violation |= !failures.is_empty();
    let dims: Map<String, Value> = chi
        .dims()
        .iter()
        .enumerate()
        .map(|(r, d)| (r.to_string(), json!(d)))
        .collect();
    Ok(Outcome {
        json: json!({ "cdga": n, "adams_max": r_max, "slices": slices, "chi": dims, "hopf_failures": failures }),
        violation,
    })
}

pub fn gamma(doc: &Document, name: Option<&str>, r_max: i64) -> Result<Outcome, DslError> {
    let (n, a) = expand(doc, name, Window::new(0, 2, 0, r_max))?;
    Ok(Outcome::ok(gamma_payload(&n, &a, r_max)?))
}

fn gamma_payload(n: &str, a: &LevelwiseCdga, r_max: i64) -> Result<Value, DslError> {
    let (chi, g) = gamma_of(a, r_max)?;
    let num = |v: Vec<usize>, from: usize| -> Map<String, Value> {
        v.into_iter()
            .enumerate()
            .skip(from)
            .map(|(r, d)| (r.to_string(), json!(d)))
            .collect()
    };
    let labels: Map<String, Value> = g
        .pieces
        .iter()
        .skip(1)
        .map(|p| {
            (
                p.adams.to_string(),
                json!(p.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>()),
            )
        })
        .collect();
    let s = sullivan_cdga(&g)?;
    let alg = s.algebra();
    let gens: Vec<Value> = s
        .generators
        .iter()
        .zip(&s.differentials)
        .map(|(gen, d)| json!({ "name": gen.name, "label": gen.label.to_string(), "d": alg.poly_to_string(d) }))
        .collect();
    Ok(json!({
        "cdga": n,
        "adams_max": r_max,
        "gamma": num(g.dims(), 1),
        "chi": num(chi.dims(), 0),
        "labels": labels,
        "co_antisymmetric": g.is_coantisymmetric(),
        "sullivan": gens,
    }))
}

pub fn minimal(
    doc: &Document,
    name: Option<&str>,
    n: i64,
    r_max: i64,
) -> Result<Outcome, DslError> {
    let (cn, a) = expand(doc, name, Window::new(0, n + 2, 0, r_max))?;
    let m = minimal_model(a.clone(), n, r_max)?;
    let alg = m.model.algebra();
    let gens: Vec<Value> = m
        .model
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            json!({
                "name": g.name,
                "degree": g.degree,
                "adams": g.adams(),
                "label": g.label.to_string(),
                "d": alg.poly_to_string(&m.model.differentials[i]),
                "image": a.elem_to_string(&m.images[i]),
            })
        })
        .collect();
    let stages: Vec<Value> = m
        .log
        .iter()
        .map(|s| json!({ "adams": s.adams, "degree": s.degree, "kind": s.kind, "generators": s.generators }))
        .collect();
    let verified = m.verified();
    Ok(Outcome {
        json: json!({
            "cdga": cn,
            "n": n,
            "adams_max": r_max,
            "generators": gens,
            "stages": stages,
            "verified": verified,
            "window_qualified": m.window_qualified,
        }),
        violation: !verified,
    })
}

fn module_reports(
    doc: &Document,
    only: Option<&str>,
    mut f: impl FnMut(&Connection) -> (Value, bool),
) -> Result<(Value, bool), DslError> {
    if let Some(m) = only {
        if doc.module(m).is_none() {
            return Err(DslError::Usage(format!("no module named `{m}`")));
        }
    }
    let bases = expand_bases(doc, doc.window)?;
    let mut out = Map::new();
    let mut bad = false;
    for spec in doc
        .modules
        .iter()
        .filter(|m| only.is_none_or(|o| o == m.name))
    {
        let c = spec.build(bases[&spec.over].clone())?;
        let (v, b) = f(&c);
        bad |= b;
        out.insert(spec.name.clone(), v);
    }
    Ok((Value::Object(out), bad))
}

pub fn module_check(doc: &Document, only: Option<&str>) -> Result<Outcome, DslError> {
    let (json, violation) = module_reports(doc, only, |c| {
        let r = c.check();
        (serde_json::to_value(&r).expect("serializable"), !r.ok())
    })?;
    Ok(Outcome {
        json: json!({ "modules": json }),
        violation,
    })
}

pub fn module_heart(doc: &Document, only: Option<&str>) -> Result<Outcome, DslError> {
    let (json, _) = module_reports(doc, only, |c| {
        (json!({ "heart": heart_test(c), "q": q_table(c) }), false)
    })?;
    Ok(Outcome::ok(json!({ "modules": json })))
}

pub fn module_truncate(doc: &Document, only: Option<&str>) -> Result<Outcome, DslError> {
    let mut err = None;
    let res = module_reports(doc, only, |c| match truncate_le0(c) {
        Ok((t, _)) => (
            json!({ "dim": t.dim(), "vectors": t.carrier.names, "q": q_table(&t) }),
            false,
        ),
        Err(e) => {
            err = Some(e);
            (Value::Null, false)
        }
    });
    let (json, _) = res?;
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(Outcome::ok(json!({ "modules": json })))
}

pub fn module_qiso(doc: &Document, map: &str) -> Result<Outcome, DslError> {
    let spec = doc
        .map(map)
        .ok_or_else(|| DslError::Usage(format!("no map named `{map}`")))?;
    let bases = expand_bases(doc, doc.window)?;
    let build = |n: &str| {
        let m = doc.module(n).expect("elaborated");
        m.build(bases[&m.over].clone())
    };
    let f = spec.build(build(&spec.source)?, build(&spec.target)?)?;
    let problems = f.check().err().map(|e| e.to_string());
    let qiso = match &problems {
        None => Some(quasi_iso_test(&f)?),
        Some(_) => None,
    };
    Ok(Outcome {
        json: json!({ "map": map, "morphism": problems.is_none(), "problem": problems, "quasi_iso": qiso }),
        violation: problems.is_some(),
    })
}

pub fn module_ext(
    doc: &Document,
    name: Option<&str>,
    v: &SemisimpleObject,
    w: &SemisimpleObject,
    k: i64,
    r_max: i64,
) -> Result<Outcome, DslError> {
    let (n, a) = expand(doc, name, Window::new(0, 2, 0, r_max))?;
    let (_, g) = gamma_of(&a, r_max)?;
    let e = ext(&g, v, w, k, r_max)?;
    Ok(Outcome::ok(
        json!({ "cdga": n, "v": object(v), "w": object(w), "k": k, "dim": e.dim, "coefficients": object(&e.coefficients) }),
    ))
}

/// Everything `report` prints for one file.
pub fn file_report(doc: &Document) -> Result<Outcome, DslError> {
    let mut cdgas = Map::new();
    let mut violation = false;
    for (name, p) in &doc.cdgas {
        let w = doc.window;
        let a = expand_free(p, w)?;
        let rep = check_cdga(&a);
        violation |= !rep.ok();
        let mut entry = Map::new();
        entry.insert(
            "check".into(),
            json!({ "ok": rep.ok(), "violations": rep.violations }),
        );
        if rep.ok() {
            let hw = Window::new(0, w.n_max - 1, 0, w.r_max);
            entry.insert("cohomology".into(), cohomology_maps(&a, hw)?.0);
            let conn = connectivity(&a);
            entry.insert(
                "connected".into(),
                json!(conn.connected && conn.adams_connected),
            );
            if conn.connected && conn.adams_connected {
                let c = doc.cutoff;
                let small = expand_free(p, Window::new(0, 2, 0, c))?;
                entry.insert("gamma".into(), gamma_payload(name, &small, c)?);
                let mw = Arc::new(expand_free(p, Window::new(0, 3, 0, c))?);
                let m = minimal_model(mw, 1, c)?;
                violation |= !m.verified();
                let gens: Vec<String> = m
                    .model
                    .generators
                    .iter()
                    .map(|g| format!("{} : {}, {}", g.name, g.degree, g.label))
                    .collect();
                entry.insert(
                    "minimal_1".into(),
                    json!({ "generators": gens, "verified": m.verified() }),
                );
            }
        }
        cdgas.insert(name.clone(), Value::Object(entry));
    }
    let (modules, bad) = module_reports(doc, None, |c| {
        let r = c.check();
        let mut m = Map::new();
        m.insert(
            "check".into(),
            serde_json::to_value(&r).expect("serializable"),
        );
        m.insert("heart".into(), json!(heart_test(c)));
        m.insert("q".into(), q_table(c));
        let wd: Map<String, Value> = weight_dims(c)
            .into_iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect();
        m.insert("weights".into(), Value::Object(wd));
        (Value::Object(m), !r.ok())
    })?;
    let mut maps = Map::new();
    for spec in &doc.maps {
        let o = module_qiso(doc, &spec.name)?;
        violation |= o.violation;
        maps.insert(spec.name.clone(), o.json);
    }
    Ok(Outcome {
        json: json!({ "group": doc.group.to_string(), "window": doc.window.to_string(), "cutoff": doc.cutoff, "cdgas": cdgas, "modules": modules, "maps": maps }),
        violation: violation || bad,
    })
}
