//! Acceptance criteria, each checked exactly (no tolerances) against
//! oracles written in the test code. Prints one line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::*;
use credalk_core::cli::json::{parse_vector, parse_witness};
use credalk_core::credal::{
    check_consistency, lower_expectation, upper_expectation, CheckStatus, Condition, CredalCollection, CredalSet,
    InclusionDirection, PermutationPolicy,
};
use credalk_core::exactq::{ratio, QMatrix, QVector, Rational};
use credalk_core::joint::{
    build_joint, lemma_suite, preimage_set, verify_representation, JointOutcome, Lemma, LemmaStatus,
};
use credalk_core::polytope::{self, HRep, Polytope};
use credalk_core::spaces::{IndexTuple, MeasureVector, ProcessSpace};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn instances() -> Vec<Instance> {
    (0..20)
        .map(|seed| {
            let mut r = rng(1000 + seed);
            let k = if seed % 3 == 2 { 3 } else { 2 };
            random_instance(&mut r, k)
        })
        .collect()
}

fn criterion1(insts: &[Instance]) -> Check {
    let dir = ok(tempfile::tempdir())?;
    for (i, inst) in insts.iter().enumerate() {
        let path = write_model(dir.path(), &format!("m{i}.json"), &inst.json);
        let out = credalk(&["validate", path.to_str().unwrap()]);
        ensure!(out.status.code() == Some(0), "instance {i}: validate exited {:?}", out.status.code());
        let model = inst.model();
        let joint = ok(ok(build_joint(&model.collection, model.finite_cap))?.into_joint())?;
        let p = joint.polytope().ok_or("polytope mode expected")?;
        ensure!(ok(polytope::is_subset(&inst.p0, p))?.holds(), "instance {i}: P0 not inside P");
        let rep = ok(verify_representation(&model.collection, &joint))?;
        ensure!(rep.passed(), "instance {i}: representation check failed");
        for (t, vs) in &inst.images {
            let push = ok(joint.pushforward(t))?;
            let v = ok(Polytope::from_vertices(vs[0].dim(), vs.clone()))?;
            ensure!(
                ok(polytope::equals(push.as_polytope().unwrap(), &v))?,
                "instance {i}: pushforward differs for {}",
                inst.space.tuple_display(t)
            );
        }
    }
    Ok(format!("{} random families reproduced", insts.len()))
}

fn criterion2(insts: &[Instance]) -> Check {
    for (i, inst) in insts.iter().enumerate() {
        let model = inst.model();
        let joint = ok(ok(build_joint(&model.collection, model.finite_cap))?.into_joint())?;
        let full = ok(preimage_set(&model.collection, &inst.space.full_tuple()))?;
        ensure!(ok(polytope::equals(joint.polytope().unwrap(), &full))?, "instance {i}: P differs from the full-tuple preimage");
    }
    Ok(format!("{} instances", insts.len()))
}

fn criterion3(insts: &[Instance]) -> Check {
    let mut strict = 0;
    for (i, inst) in insts.iter().enumerate() {
        let model = inst.model();
        let joint = ok(ok(build_joint(&model.collection, model.finite_cap))?.into_joint())?;
        let rep = ok(lemma_suite(&model.collection, &joint))?;
        for r in &rep.records {
            ensure!(r.status == LemmaStatus::Holds, "instance {i}: {} does not hold", r.lemma.as_str());
        }
        strict += rep.for_lemma(Lemma::Monotonicity).filter(|r| r.strict == Some(true)).count();
    }
    ensure!(strict > 0, "no strict monotonicity observed");
    Ok(format!("{strict} strict monotonicity records"))
}

/// Drops one vertex of one credal set so that marginal consistency fails.
fn mutate(inst: &Instance) -> Option<(Vec<(IndexTuple, Vec<QVector>)>, String)> {
    for (ti, (_, vs)) in inst.images.iter().enumerate() {
        if vs.len() < 2 {
            continue;
        }
        for drop in 0..vs.len() {
            let mut sets = inst.images.clone();
            sets[ti].1.remove(drop);
            let json = model_json(&inst.space, &sets);
            let model = credalk_core::cli::parse_model(&json).ok()?;
            let r = check_consistency(&model.collection).ok()?;
            if r.for_condition(Condition::C2).any(|x| x.status == CheckStatus::Fail) {
                return Some((sets, json));
            }
        }
    }
    None
}

fn criterion4(insts: &[Instance]) -> Check {
    let dir = ok(tempfile::tempdir())?;
    let mut checked = 0;
    for (i, inst) in insts.iter().enumerate().take(8) {
        let Some((sets, json)) = mutate(inst) else { continue };
        let path = write_model(dir.path(), &format!("bad{i}.json"), &json);
        let out = credalk(&["validate", "--json", path.to_str().unwrap()]);
        ensure!(out.status.code() == Some(1), "instance {i}: validate exited {:?}", out.status.code());
        let doc: Value = ok(serde_json::from_slice(&out.stdout))?;
        let ny = inst.space.outcomes();
        let verts = |labels: &Value| -> Vec<QVector> {
            let names: Vec<&str> = labels.as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
            let t = inst.space.tuple(&names).unwrap();
            sets.iter().find(|(u, _)| *u == t).unwrap().1.clone()
        };
        let mut failures = 0;
        for rec in doc["consistency"]["records"].as_array().unwrap() {
            if rec["status"] != "fail" {
                continue;
            }
            failures += 1;
            ensure!(rec["condition"] == "C2", "instance {i}: unexpected failing condition");
            let w = ok(parse_witness(&rec["witness"]))?;
            let comparison: Vec<QVector> = ok(rec["comparison"].as_array().unwrap().iter().map(parse_vector).collect())?;
            ensure!(w.verify_against(&comparison), "instance {i}: witness fails against the reported set");
            let src_names: Vec<&str> = rec["source"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
            let tgt_names: Vec<&str> = rec["target"].as_array().unwrap().iter().map(|s| s.as_str().unwrap()).collect();
            let alpha = inst.space.tuple(&src_names).unwrap();
            let beta = inst.space.tuple(&tgt_names).unwrap();
            let image: Vec<QVector> = verts(&rec["source"])
                .iter()
                .map(|v| marginal(v, alpha.positions(), beta.positions(), ny))
                .collect();
            let target = verts(&rec["target"]);
            let (inside, outside) = if rec["direction"] == InclusionDirection::ImageInTarget.as_str() {
                (image, target)
            } else {
                (target, image)
            };
            ensure!(w.verify_against(&outside), "instance {i}: witness fails against recomputed generators");
            let hull = ok(Polytope::from_vertices(inside[0].dim(), inside))?;
            ensure!(ok(polytope::contains_point(&hull, w.point()))?, "instance {i}: witness point not in the other set");
        }
        ensure!(failures > 0, "instance {i}: no failing record in the report");
        checked += 1;
    }
    ensure!(checked >= 3, "only {checked} mutations produced a failure");
    Ok(format!("{checked} mutated families rejected with verified witnesses"))
}

fn criterion5() -> Check {
    let labels = ["a", "b", "c"];
    let space = ok(ProcessSpace::from_labels(&labels, &["0", "1"]))?;
    let cases = [
        vec![QVector::new(vec![ratio(1, 2), ratio(1, 2)]); 3],
        vec![
            QVector::new(vec![ratio(1, 3), ratio(2, 3)]),
            QVector::new(vec![ratio(1, 2), ratio(1, 2)]),
            QVector::new(vec![ratio(1, 4), ratio(3, 4)]),
        ],
    ];
    for factors in &cases {
        let mut coll = CredalCollection::new(space.clone(), PermutationPolicy::Synthesized);
        for t in space.canonical_tuples() {
            let fs: Vec<QVector> = t.positions().iter().map(|&p| factors[p].clone()).collect();
            ok(coll.insert(ok(CredalSet::from_vertices(&space, t.clone(), vec![product(&fs)]))?))?;
        }
        let joint = ok(ok(build_joint(&coll, 10_000))?.into_joint())?;
        let expected = product(factors);
        ensure!(ok(joint.singleton())? == Some(expected.clone()), "P is not the product measure");
        for n in 1..=3 {
            for t in all_tuples(3, n) {
                let fs: Vec<QVector> = t.positions().iter().map(|&p| factors[p].clone()).collect();
                let push = ok(joint.pushforward(&t))?;
                let v = ok(push.as_polytope().unwrap().vertices())?.to_vec();
                ensure!(v == vec![product(&fs)], "pushforward to {} is not the product", space.tuple_display(&t));
            }
        }
    }
    Ok("uniform and non-uniform products recovered, all 15 pushforwards exact".into())
}

fn all_tuples(k: usize, n: usize) -> Vec<IndexTuple> {
    fn go(k: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexTuple>) {
        if cur.len() == n {
            out.push(IndexTuple::new(cur.clone(), k).unwrap());
            return;
        }
        for i in 0..k {
            if !cur.contains(&i) {
                cur.push(i);
                go(k, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(k, n, &mut Vec::new(), &mut out);
    out
}

fn criterion6() -> Check {
    let out = credalk(&["build", &data("inconsistent.json")]);
    ensure!(out.status.code() == Some(1), "build exited {:?}", out.status.code());
    let doc: Value = ok(serde_json::from_slice(&out.stdout))?;
    ensure!(doc["joint"]["empty"] == true, "joint not reported empty");
    let tuples = &doc["joint"]["offending_tuples"];
    ensure!(*tuples == serde_json::json!([["a"], ["a", "b"]]), "offending tuples {tuples}");
    for d in doc["joint"]["diagnosis"].as_array().unwrap() {
        ensure!(d["certificate_verified"] == true, "certificate not verified by the tool");
        // y ≥ 0 on inequalities, yᵀA = 0, yᵀb < 0
        let rows = d["farkas_rows"].as_array().unwrap();
        let dim = rows[0]["coeffs"].as_array().unwrap().len();
        let mut combo = QVector::zeros(dim);
        let mut rhs = Rational::from_integer(0.into());
        for r in rows {
            let y = credalk_core::cli::json::parse_rational_value(&r["multiplier"]).map_err(|e| e.to_string())?;
            ensure!(r["sense"] != "<=" || y >= Rational::from_integer(0.into()), "negative multiplier");
            combo = combo.add(&ok(parse_vector(&r["coeffs"]))?.scale(&y));
            rhs += y * ok(credalk_core::cli::json::parse_rational_value(&r["rhs"]))?;
        }
        ensure!(combo.is_zero() && rhs < Rational::from_integer(0.into()), "Farkas combination does not certify emptiness");
    }
    Ok("offending tuples (a) and (a,b), certificate checked independently".into())
}

fn random_h_rows(r: &mut rand_chacha::ChaCha8Rng, dim: usize) -> Vec<(QVector, Rational)> {
    let centre = composition(r, dim, 6);
    (0..r.gen_range(1..=3))
        .map(|_| {
            let g: QVector = (0..dim).map(|_| Rational::from_integer(r.gen_range(-3i64..=3).into())).collect();
            let rhs = g.dot(&centre) + ratio(r.gen_range(0..4), 4);
            (g, rhs)
        })
        .collect()
}

fn criterion7() -> Check {
    let mut r = rng(7);
    let space = ok(ProcessSpace::from_labels(&["a", "b"], &["0", "1"]))?;
    let tuples = [ok(space.tuple(&["a"]))?, ok(space.tuple(&["a", "b"]))?];
    let (mut nv, mut nh) = (0, 0);
    for trial in 0..50 {
        let t = tuples[trial % 2].clone();
        let dim = space.product_dim(t.len());
        let (set, brute) = if trial % 4 < 2 {
            nv += 1;
            let n = r.gen_range(1..=6);
            let pts = random_simplex_points(&mut r, dim, n);
            (ok(CredalSet::from_vertices(&space, t, pts.clone()))?, pts)
        } else {
            nh += 1;
            let rows = random_h_rows(&mut r, dim);
            let a: Vec<QVector> = rows.iter().map(|(g, _)| g.clone()).collect();
            let b: Vec<Rational> = rows.iter().map(|(_, c)| c.clone()).collect();
            let h = ok(HRep::new(ok(QMatrix::from_rows(dim, a))?, QVector::new(b), QMatrix::zeros(0, dim), QVector::zeros(0)))?;
            (ok(CredalSet::from_constraints(&space, t, h))?, simplex_slice_vertices(&rows, dim))
        };
        ensure!(!brute.is_empty(), "trial {trial}: oracle found no vertices");
        let f: QVector = (0..dim).map(|_| ratio(r.gen_range(-9..=9), r.gen_range(1..=5))).collect();
        let lo = brute.iter().map(|v| f.dot(v)).min().unwrap();
        let hi = brute.iter().map(|v| f.dot(v)).max().unwrap();
        ensure!(ok(lower_expectation(&set, &f))? == lo, "trial {trial}: lower expectation differs");
        ensure!(ok(upper_expectation(&set, &f))? == hi, "trial {trial}: upper expectation differs");
    }
    Ok(format!("50 pairs ({nv} vertex-given, {nh} constraint-given)"))
}

fn satisfies(h: &HRep, x: &[Rational]) -> bool {
    (0..h.ineq.rows()).all(|i| polytope_dot(h.ineq.row(i), x) <= h.ineq_rhs[i])
        && (0..h.eq.rows()).all(|i| polytope_dot(h.eq.row(i), x) == h.eq_rhs[i])
}

fn polytope_dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn criterion8() -> Check {
    let mut r = rng(8);
    let mut separations = 0;
    for trial in 0..30 {
        let dim = r.gen_range(2..=5);
        let n = r.gen_range(dim + 1..=dim + 5);
        let pts: Vec<QVector> = (0..n)
            .map(|_| (0..dim).map(|_| Rational::from_integer(r.gen_range(-5i64..=5).into())).collect())
            .collect();
        let h0 = ok(Polytope::from_vertices(dim, pts.clone()))?.hrep().clone();
        let p = Polytope::from_hrep(h0.clone());
        let verts = ok(p.vertices())?.to_vec();
        let h1 = ok(Polytope::from_vertices(dim, verts.clone()))?.hrep().clone();
        let q = Polytope::from_hrep(h1.clone());
        ensure!(ok(polytope::equals(&p, &q))?, "trial {trial}: round trip changed the set");
        ensure!(verts.iter().all(|v| pts.contains(v)), "trial {trial}: vertex not among the generators");
        ensure!(pts.iter().all(|x| satisfies(&h0, x) && satisfies(&h1, x)), "trial {trial}: generator violates a facet");
        for _ in 0..5 {
            let x: QVector = (0..dim).map(|_| ratio(r.gen_range(-16..=16), 2)).collect();
            if satisfies(&h1, &x) {
                continue;
            }
            let cert = ok(polytope::separate(&p, &x))?;
            ensure!(cert.verify_against(&pts), "trial {trial}: separation certificate fails");
            let gx = cert.functional.dot(&x);
            let best = pts.iter().map(|v| cert.functional.dot(v)).max().unwrap();
            ensure!(gx - best == cert.gap, "trial {trial}: gap is not the exact margin");
            separations += 1;
        }
    }
    ensure!(separations >= 30, "only {separations} outside points drawn");
    Ok(format!("30 round trips, {separations} separations verified"))
}

fn criterion9() -> Check {
    let mut r = rng(9);
    let space = ok(ProcessSpace::from_labels(&["a", "b"], &["0", "1"]))?;
    let (ta, tb, tab) = (ok(space.tuple(&["a"]))?, ok(space.tuple(&["b"]))?, ok(space.tuple(&["a", "b"]))?);
    let (mut empty, mut pass, mut fail) = (0, 0, 0);
    for trial in 0..40 {
        let joints: Vec<QVector> = distinct(&mut r, 4, 2);
        let mut marg = |pos: usize| -> Vec<QVector> {
            let mut m: Vec<QVector> = joints.iter().map(|j| marginal(j, &[0, 1], &[pos], 2)).collect();
            if m[0] == m[1] || r.gen_bool(0.3) {
                m[1] = loop {
                    let c = composition(&mut r, 2, 4);
                    if c != m[0] {
                        break c;
                    }
                };
            }
            m.shuffle(&mut r);
            m
        };
        let (mut va, vb) = (marg(0), marg(1));
        if trial % 5 == 4 {
            // no member of V_a is a marginal of a supplied joint
            let own: Vec<QVector> = joints.iter().map(|j| marginal(j, &[0, 1], &[0], 2)).collect();
            va = loop {
                let c = distinct(&mut r, 2, 2);
                if c.iter().all(|m| !own.contains(m)) {
                    break c;
                }
            };
        }
        let mut coll = CredalCollection::new(space.clone(), PermutationPolicy::Synthesized);
        for (t, ms) in [(&ta, &va), (&tb, &vb), (&tab, &joints)] {
            let members = ms.iter().map(|m| MeasureVector::new(m.clone()).unwrap()).collect();
            ok(coll.insert(ok(CredalSet::finite(&space, t.clone(), members))?))?;
        }
        // exhaustive selection: the (a,b) member fixes p, the others must match its marginals
        let mut oracle: BTreeSet<Vec<Rational>> = BTreeSet::new();
        for ia in 0..2 {
            for ib in 0..2 {
                for j in &joints {
                    if marginal(j, &[0, 1], &[0], 2) == va[ia] && marginal(j, &[0, 1], &[1], 2) == vb[ib] {
                        oracle.insert(j.to_vec());
                    }
                }
            }
        }
        match ok(build_joint(&coll, 100))? {
            JointOutcome::Empty(d) => {
                ensure!(oracle.is_empty(), "trial {trial}: reported empty, oracle has {} points", oracle.len());
                ensure!(d.iter().all(|x| x.verify()), "trial {trial}: empty certificate fails");
                empty += 1;
            }
            JointOutcome::Joint(joint) => {
                let mut got = BTreeSet::new();
                for c in joint.cells() {
                    let v = ok(c.region.polytope.vertices())?;
                    ensure!(v.len() == 1, "trial {trial}: cell is not a single point");
                    got.insert(v[0].to_vec());
                }
                ensure!(got == oracle, "trial {trial}: joint points differ from the oracle");
                let image = |pos: usize| -> BTreeSet<Vec<Rational>> {
                    oracle.iter().map(|p| marginal(p, &[0, 1], &[pos], 2).to_vec()).collect()
                };
                let as_set = |ms: &[QVector]| -> BTreeSet<Vec<Rational>> { ms.iter().map(|m| m.to_vec()).collect() };
                let expect_pass = image(0) == as_set(&va) && image(1) == as_set(&vb) && oracle == as_set(&joints);
                let rep = ok(verify_representation(&coll, &joint))?;
                ensure!(rep.passed() == expect_pass, "trial {trial}: representation verdict differs from the oracle");
                ensure!(ok(rep.verify_certificates(&coll, &joint))?, "trial {trial}: representation witness fails");
                if expect_pass {
                    pass += 1;
                } else {
                    fail += 1;
                }
            }
        }
    }
    ensure!(empty > 0 && pass > 0 && fail > 0, "trials not varied: {empty} empty, {pass} pass, {fail} fail");
    Ok(format!("40 trials: {pass} represented, {fail} not represented, {empty} empty"))
}

fn distinct(r: &mut rand_chacha::ChaCha8Rng, dim: usize, n: usize) -> Vec<QVector> {
    let mut out: Vec<QVector> = Vec::new();
    while out.len() < n {
        let c = composition(r, dim, 4);
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

fn main() {
    let start = Instant::now();
    let insts = instances();
    let results: Vec<(usize, std::thread::Result<Check>)> = std::thread::scope(|s| {
        let insts = &insts;
        let jobs: Vec<(usize, Box<dyn FnOnce() -> Check + Send + '_>)> = vec![
            (1, Box::new(move || criterion1(insts))),
            (2, Box::new(move || criterion2(insts))),
            (3, Box::new(move || criterion3(insts))),
            (4, Box::new(move || criterion4(insts))),
            (5, Box::new(criterion5)),
            (6, Box::new(criterion6)),
            (7, Box::new(criterion7)),
            (8, Box::new(criterion8)),
            (9, Box::new(criterion9)),
        ];
        let handles: Vec<_> = jobs.into_iter().map(|(n, f)| (n, s.spawn(f))).collect();
        handles.into_iter().map(|(n, h)| (n, h.join())).collect()
    });
    let mut failed = 0;
    for (n, r) in results {
        match r {
            Ok(Ok(msg)) => println!("criterion {n}: PASS ({msg})"),
            Ok(Err(msg)) => {
                failed += 1;
                println!("criterion {n}: FAIL ({msg})");
            }
            Err(_) => {
                failed += 1;
                println!("criterion {n}: FAIL (panicked)");
            }
        }
    }
    println!("acceptance: {} of 9 criteria passed in {:.1?}", 9 - failed, start.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
