use hadamard6::classify::{canonical_condition, contraction_precheck, identity_scan, is_hadamard};
use hadamard6::dilation::{build_solb, circle_roots, dilate, Outcome, Step};
use hadamard6::known::example_quadruple;
use hadamard6::oracle::{completion_recheck, match_theta_sets, poly_roots};
use hadamard6::{Error, Quadruple, Tolerances};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn admissible_seeds(seed: u64, count: usize) -> Vec<Quadruple> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q = Quadruple::from_turns([rng.gen(), rng.gen(), rng.gen(), rng.gen()]);
        if canonical_condition(&q, tol.orth).passes
            && contraction_precheck(&q.seed_matrix(), tol.orth).passes
        {
            out.push(q);
        }
    }
    out
}

#[test]
fn outputs_satisfy_identities_and_contain_seed() {
    let tol = Tolerances::default();
    let mut matrices = 0;
    for q in admissible_seeds(11, 40) {
        let report = dilate(&q, &tol);
        for found in &report.matrices {
            matrices += 1;
            let h = found.matrix;
            assert!(is_hadamard(&h, 1e-8).is_hadamard);
            assert!(h.is_dephased(1e-12));
            assert!(
                h.submatrix3([0, 1, 2], [0, 1, 2])
                    .max_abs_diff(&q.seed_matrix())
                    < 1e-15
            );
            let scan = identity_scan(&h);
            assert!(scan.max_residual < 1e-7, "{scan:?}");
            assert!(scan.max_abs_haagerup <= 8.0 + 1e-7);
            assert!(scan.max_abs_im_haagerup < 1e-7);
            assert!(completion_recheck(&h, tol.root).unwrap() < 1e-9);
        }
    }
    assert!(matrices > 0);
}

#[test]
fn circle_and_polynomial_roots_agree() {
    let tol = Tolerances::default();
    for q in admissible_seeds(5, 50) {
        match (circle_roots(&q, &tol), poly_roots(&q, &tol)) {
            (Ok(a), Ok(b)) => {
                let a: Vec<f64> = a.iter().map(|r| r.angle()).collect();
                let b: Vec<f64> = b.iter().map(|r| r.angle()).collect();
                let worst = match_theta_sets(&a, &b);
                assert!(
                    worst.is_some_and(|w| w < 1e-7),
                    "{:?}: {a:?} vs {b:?}",
                    q.turns()
                );
            }
            (Err(Error::DegenerateFamily { .. }), Err(Error::DegenerateFamily { .. })) => {}
            (a, b) => panic!("{:?}: {a:?} vs {b:?}", q.turns()),
        }
    }
}

#[test]
fn contraction_failures_yield_nothing() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = 0;
    while seen < 20 {
        // entries clustered near 1 make E*E nearly rank one
        let q = Quadruple::from_turns(std::array::from_fn(|_| rng.gen_range(-0.02..0.02)));
        if !canonical_condition(&q, tol.orth).passes {
            continue;
        }
        seen += 1;
        let report = dilate(&q, &tol);
        assert_eq!(report.outcome, Outcome::Rejected);
        assert!(report.matrices.is_empty());
        assert_eq!(report.diagnostics.last().unwrap().step, Step::Contraction);
    }
}

#[test]
fn dilation_is_deterministic() {
    let tol = Tolerances::default();
    let q = example_quadruple();
    assert_eq!(dilate(&q, &tol), dilate(&q, &tol));
}

#[test]
fn example_seed_typically_gives_two_candidates() {
    let tol = Tolerances::default();
    let q = example_quadruple();
    assert_eq!(build_solb(&q, &tol).unwrap().sextuples.len(), 2);
    let report = dilate(&q, &tol);
    assert_eq!(report.outcome, Outcome::Found);
    for found in &report.matrices {
        assert!(found.hadamard_residual < 1e-8);
        assert!(!found.k63.any());
        assert!(!found.s6_equivalent);
    }
}
