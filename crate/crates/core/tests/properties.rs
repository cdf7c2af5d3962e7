mod common;

use common::*;
use credalk_core::credal::{CredalCollection, CredalSet, PermutationPolicy};
use credalk_core::exactq::{lp_solve, ratio, Direction, LpOutcome, LpProblem, QMatrix, QVector, Rational, Sense, VarBound};
use credalk_core::joint::{build_joint, verify_representation};
use credalk_core::polytope::{self, Polytope};
use credalk_core::spaces::{IndexTuple, Permutation, ProcessSpace};
use proptest::prelude::*;

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

fn brute_max(rows: &[(QVector, Rational)], c: &QVector, n: usize) -> Option<Rational> {
    let mut all: Vec<(QVector, Rational)> = (0..n).map(|i| (QVector::unit(n, i).neg(), q(0))).collect();
    all.extend(rows.iter().cloned());
    let mut best: Option<Rational> = None;
    let m = all.len();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n {
            continue;
        }
        let pick: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let a = pick.iter().map(|&i| all[i].0.to_vec()).collect();
        let b = pick.iter().map(|&i| all[i].1.clone()).collect();
        if let Some(x) = solve_square(a, b) {
            let x = QVector::new(x);
            if all.iter().all(|(r, rhs)| &r.dot(&x) <= rhs) {
                let v = c.dot(&x);
                if best.as_ref().map_or(true, |b| v > *b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

fn small_lp() -> impl Strategy<Value = (usize, Vec<Vec<i64>>, Vec<i64>, Vec<i64>)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(prop::collection::vec(-3i64..=3, n), 1..=3),
            prop::collection::vec(0i64..=6, 3),
            prop::collection::vec(-4i64..=4, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lp_optimum_matches_vertex_enumeration((n, a, b, c) in small_lp()) {
        // A x <= b with b >= 0 and a box x_i <= 4: feasible and bounded
        let mut rows: Vec<(QVector, Rational)> = a.iter().zip(&b).map(|(r, &rhs)| (QVector::from_i64(r), q(rhs))).collect();
        rows.extend((0..n).map(|i| (QVector::unit(n, i), q(4))));
        let m = QMatrix::from_rows(n, rows.iter().map(|r| r.0.clone()).collect()).unwrap();
        let rhs = QVector::new(rows.iter().map(|r| r.1.clone()).collect());
        let obj = QVector::from_i64(&c);
        let p = LpProblem::new(obj.clone(), m, rhs, vec![Sense::Le; rows.len()], vec![VarBound::NonNegative; n], Direction::Maximize).unwrap();
        let out = lp_solve(&p).unwrap();
        prop_assert!(out.verify(&p));
        prop_assert_eq!(out.optimal_value().cloned(), brute_max(&rows, &obj, n));
    }

    #[test]
    fn infeasible_lp_has_verified_certificate((n, a, b, _c) in small_lp()) {
        let mut rows: Vec<QVector> = a.iter().map(|r| QVector::from_i64(r)).collect();
        let mut rhs: Vec<Rational> = b[..a.len()].iter().map(|&x| q(x)).collect();
        let mut senses = vec![Sense::Le; rows.len()];
        rows.extend((0..n).map(|i| QVector::unit(n, i)));
        rhs.extend((0..n).map(|_| q(1)));
        senses.extend(vec![Sense::Le; n]);
        rows.push(QVector::new(vec![q(1); n]));
        rhs.push(q(n as i64 + 1));
        senses.push(Sense::Ge);
        let k = rows.len();
        let p = LpProblem::feasibility(QMatrix::from_rows(n, rows).unwrap(), QVector::new(rhs), senses, vec![VarBound::NonNegative; n]).unwrap();
        prop_assert_eq!(k, p.num_rows());
        match lp_solve(&p).unwrap() {
            LpOutcome::Infeasible(cert) => prop_assert!(cert.verify(&p)),
            other => prop_assert!(false, "expected infeasible, got {:?}", other),
        }
    }

    #[test]
    fn images_compose(seed in 0u64..1000) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 3);
        let space = &inst.space;
        let alpha = space.full_tuple();
        let pa = polytope::linear_image(&space.phi_matrix(&alpha).unwrap(), &inst.p0).unwrap();
        for pi in Permutation::all(2) {
            for (x, y) in [(0, 1), (0, 2), (1, 2)] {
                let beta = IndexTuple::new(vec![x, y], 3).unwrap().permuted(&pi).unwrap();
                let via = polytope::linear_image(&space.restriction_matrix(&alpha, &beta).unwrap(), &pa).unwrap();
                let direct = polytope::linear_image(&space.phi_matrix(&beta).unwrap(), &inst.p0).unwrap();
                prop_assert!(polytope::equals(&via, &direct).unwrap());
                // and against the hand-written marginal on the vertices of the image of P0
                let by_hand: Vec<QVector> = inst.p0.vertices().unwrap().iter().map(|v| marginal(v, &[0, 1, 2], beta.positions(), 2)).collect();
                let hand = Polytope::from_vertices(4, by_hand).unwrap();
                prop_assert!(polytope::equals(&hand, &direct).unwrap());
            }
        }
    }

    #[test]
    fn joint_shrinks_when_sets_are_added(seed in 0u64..1000, keep in 1usize..6) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, 3);
        let space = inst.space.clone();
        let build = |sets: &[(IndexTuple, Vec<QVector>)]| {
            let mut c = CredalCollection::new(space.clone(), PermutationPolicy::Synthesized);
            for (t, vs) in sets {
                c.insert(CredalSet::from_vertices(&space, t.clone(), vs.clone()).unwrap()).unwrap();
            }
            build_joint(&c, 100).unwrap().into_joint().unwrap()
        };
        let fewer = build(&inst.images[..keep]);
        let more = build(&inst.images[..keep + 1]);
        prop_assert!(polytope::is_subset(more.polytope().unwrap(), fewer.polytope().unwrap()).unwrap().holds());
        prop_assert!(polytope::is_subset(&inst.p0, more.polytope().unwrap()).unwrap().holds());
    }

    #[test]
    fn images_of_one_joint_are_represented(seed in 0u64..1000, k in 1usize..=3) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r, k);
        let model = inst.model();
        let joint = build_joint(&model.collection, model.finite_cap).unwrap().into_joint().unwrap();
        let rep = verify_representation(&model.collection, &joint).unwrap();
        prop_assert!(rep.passed());
    }

    #[test]
    fn shrinking_a_target_is_caught(seed in 0u64..1000) {
        // V_(a) strictly inside the image of the full set
        let space = ProcessSpace::from_labels(&["a", "b"], &["0", "1"]).unwrap();
        let mut r = rng(seed);
        let pts = random_simplex_points(&mut r, 4, 4);
        let p0 = Polytope::from_points_reduced(4, pts.clone()).unwrap();
        let a = space.tuple(&["a"]).unwrap();
        let img = polytope::linear_image(&space.phi_matrix(&a).unwrap(), &p0).unwrap();
        let iv = img.vertices().unwrap().to_vec();
        prop_assume!(iv.len() == 2);
        let mid = iv[0].add(&iv[1]).scale(&ratio(1, 2));
        let mut c = CredalCollection::new(space.clone(), PermutationPolicy::Synthesized);
        c.insert(CredalSet::from_vertices(&space, space.full_tuple(), pts).unwrap()).unwrap();
        c.insert(CredalSet::from_vertices(&space, a.clone(), vec![iv[0].clone(), mid]).unwrap()).unwrap();
        let joint = build_joint(&c, 100).unwrap().into_joint().unwrap();
        let rep = verify_representation(&c, &joint).unwrap();
        prop_assert!(!rep.record(&space.full_tuple()).unwrap().passed());
        prop_assert!(rep.verify_certificates(&c, &joint).unwrap());
    }
}
