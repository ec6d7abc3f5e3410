//! Property tests for the numerical invariants that hold across the
//! whole state-space machinery, not just at hand-picked points.

use proptest::prelude::*;

use gptkit::bloch::{equator_state, local_action, two_gbit_bloch};
use gptkit::composite::product_state;
use gptkit::groups::seeded_rng;
use gptkit::hermitian;
use gptkit::lp::{solve, LpProblem, LpStatus, Relation};
use gptkit::{evaluate_effect, mix, StateSpaceDescriptor, StateVector};

fn ball_state(b: &[f64]) -> StateVector {
    StateVector::from_probabilities(&b.iter().map(|x| (1.0 + x) / 2.0).collect::<Vec<_>>())
}

proptest! {
    // mix is associative under reweighting: nested mixes equal the direct
    // three-term convex combination
    #[test]
    fn mix_reweighting_associativity(
        pa in proptest::collection::vec(0.0f64..1.0, 3),
        pb in proptest::collection::vec(0.0f64..1.0, 3),
        pc in proptest::collection::vec(0.0f64..1.0, 3),
        q in 0.0f64..1.0,
        r in 0.0f64..1.0,
    ) {
        let a = StateVector::from_probabilities(&pa);
        let b = StateVector::from_probabilities(&pb);
        let c = StateVector::from_probabilities(&pc);
        let nested = mix(&mix(&a, &b, q).unwrap(), &c, r).unwrap();
        let direct = a.coords() * (r * q) + b.coords() * (r * (1.0 - q)) + c.coords() * (1.0 - r);
        prop_assert!((nested.coords() - direct).amax() < 1e-12);
    }

    // distinguishing measurements found for antipodal pure ball states
    // always satisfy the delta condition and global effect bounds
    #[test]
    fn ball_distinguishing_is_certified(seed in 0u64..500) {
        let space = StateSpaceDescriptor::ball(3);
        let mut rng = seeded_rng(seed, 0x50);
        let psi = space.sample_pure(&mut rng);
        let bloch: Vec<f64> = psi.fiducial().iter().map(|p| 2.0 * p - 1.0).collect();
        let anti = ball_state(&bloch.iter().map(|x| -x).collect::<Vec<_>>());
        let m = gptkit::lp::find_distinguishing_measurement(&[psi.clone(), anti.clone()], &space)
            .unwrap()
            .found()
            .cloned()
            .unwrap();
        prop_assert!((evaluate_effect(&m.effects()[0], &psi).unwrap() - 1.0).abs() < 1e-9);
        prop_assert!(evaluate_effect(&m.effects()[0], &anti).unwrap().abs() < 1e-9);
        for _ in 0..20 {
            let probe = space.sample_pure(&mut rng);
            for e in m.effects() {
                let p = evaluate_effect(e, &probe).unwrap();
                prop_assert!((-1e-9..=1.0 + 1e-9).contains(&p));
            }
        }
    }

    // two-gbit local actions commute with the Kronecker action in the
    // standard representation
    #[test]
    fn local_action_matches_kronecker(
        u in 0.0f64..std::f64::consts::PI,
        v in 0.0f64..std::f64::consts::TAU,
        seed in 0u64..1000,
    ) {
        let mut rng = seeded_rng(seed, 0xB1);
        let ua = hermitian::haar_su2(&mut rng);
        let ub = hermitian::haar_su2(&mut rng);
        let ga = hermitian::su2_to_so3(&ua).unwrap();
        let gb = hermitian::su2_to_so3(&ub).unwrap();
        let state = equator_state(u, v);

        let via_bloch = local_action(&ga, &gb, &state).unwrap();

        let ta = hermitian::qubit_rep_matrix(&ua).unwrap();
        let tb = hermitian::qubit_rep_matrix(&ub).unwrap();
        let moved = state.to_joint_state().apply(&ta.kron(&tb)).unwrap();
        let via_kron = two_gbit_bloch(&moved).unwrap();

        prop_assert!(via_bloch.distance(&via_kron) < 1e-12);
    }

    // strong duality on random feasible LPs: max c.x (Ax <= b, x >= 0)
    // equals min b.y (A'y >= c, y >= 0)
    #[test]
    fn lp_strong_duality(seed in 0u64..100) {
        let mut rng = seeded_rng(seed, 0xD0);
        use rand::RngExt;
        let n = 3 + (seed % 3) as usize;
        let m = 3 + (seed % 4) as usize;
        let a: Vec<Vec<f64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random::<f64>()).collect())
            .collect();
        let b: Vec<f64> = (0..m).map(|_| 0.5 + rng.random::<f64>()).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();

        let mut primal = LpProblem::maximize(n, c.clone());
        for v in 0..n {
            primal.set_bounds(v, 0.0, f64::INFINITY);
        }
        for (row, bound) in a.iter().zip(&b) {
            primal.constrain(row.clone(), Relation::Le, *bound);
        }
        let p = solve(&primal, 1e-9).unwrap();
        prop_assert_eq!(p.status, LpStatus::Optimal);

        let mut dual = LpProblem::maximize(m, b.iter().map(|x| -x).collect());
        for v in 0..m {
            dual.set_bounds(v, 0.0, f64::INFINITY);
        }
        for j in 0..n {
            let col: Vec<f64> = (0..m).map(|i| a[i][j]).collect();
            dual.constrain(col, Relation::Ge, c[j]);
        }
        let d = solve(&dual, 1e-9).unwrap();
        prop_assert_eq!(d.status, LpStatus::Optimal);

        let primal_value = p.value.unwrap();
        let dual_value = -d.value.unwrap();
        prop_assert!((primal_value - dual_value).abs() < 1e-7,
            "primal {} vs dual {}", primal_value, dual_value);
    }

    // product states factorize through reduction for arbitrary ball dims
    #[test]
    fn product_reduction_round_trip(
        ba in proptest::collection::vec(-1.0f64..1.0, 3),
        bb in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        let norm_a: f64 = ba.iter().map(|x| x * x).sum::<f64>().sqrt();
        let norm_b: f64 = bb.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm_a > 1e-3 && norm_b > 1e-3);
        let a = ball_state(&ba.iter().map(|x| x / norm_a.max(1.0)).collect::<Vec<_>>());
        let b = ball_state(&bb.iter().map(|x| x / norm_b.max(1.0)).collect::<Vec<_>>());
        let ab = product_state(&a, &b);
        let ra = gptkit::composite::reduce(&ab, gptkit::composite::Subsystem::A, 3, 3).unwrap();
        let rb = gptkit::composite::reduce(&ab, gptkit::composite::Subsystem::B, 3, 3).unwrap();
        prop_assert!(ra.distance(&a) < 1e-12);
        prop_assert!(rb.distance(&b) < 1e-12);
    }
}

#[test]
fn measurement_sums_stay_unit_across_instances() {
    // every distinguishing measurement produced for the built-in spaces
    // sums to the unit effect within 1e-12
    let mut rng = seeded_rng(77, 0x5);
    for name in ["classical:3", "classical:4", "quantum:2", "boxworld"] {
        let inst = gptkit::instances::by_name(name).unwrap();
        let pool = match inst.space.vertices() {
            Some(v) => v.to_vec(),
            None => inst.space.pure_candidates(8, &mut rng),
        };
        let cert = gptkit::lp::capacity(&inst.space, 6, &pool).unwrap();
        assert!(
            cert.measurement.completeness_residual() < 1e-12,
            "{name}: residual {}",
            cert.measurement.completeness_residual()
        );
    }
}

#[test]
fn effect_bounds_hold_on_thousand_sampled_pures() {
    // every built-in instance: sampled allowed effects evaluate within
    // [-tol, 1+tol] on a thousand sampled pure states
    let tol = 1e-9;
    for name in gptkit::instances::catalog_names() {
        let inst = gptkit::instances::by_name(name).unwrap();
        let mut rng = seeded_rng(13, 0xE0);
        let effects: Vec<_> = (0..16)
            .map(|_| inst.space.sample_effect(&mut rng).unwrap())
            .collect();
        for _ in 0..1000 {
            let psi = inst.space.sample_pure(&mut rng);
            for e in &effects {
                let p = evaluate_effect(e, &psi).unwrap();
                assert!(
                    (-tol..=1.0 + tol).contains(&p),
                    "{name}: effect value {p}"
                );
            }
        }
    }
}

#[test]
fn reduction_routes_agree_on_thousand_random_joints() {
    use gptkit::composite::{reduce, reduce_via_unit_contraction, Subsystem};
    let mut rng = seeded_rng(14, 0xE1);
    let ball = StateSpaceDescriptor::ball(3);
    for _ in 0..1000 {
        use rand::RngExt;
        let u: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let v: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let q: f64 = rng.random();
        let joint = gptkit::mix(
            &equator_state(u, v).to_joint_state(),
            &product_state(&ball.sample_pure(&mut rng), &ball.sample_pure(&mut rng)),
            q,
        )
        .unwrap();
        for side in [Subsystem::A, Subsystem::B] {
            let r1 = reduce(&joint, side, 3, 3).unwrap();
            let r2 = reduce_via_unit_contraction(&joint, side, 3, 3).unwrap();
            assert!(r1.distance(&r2) < 1e-12);
        }
    }
}

#[test]
fn su2_so3_surjective_at_sampled_resolution() {
    // a thousand Haar rotations each admit an axis-angle preimage whose
    // image reproduces the rotation
    let mut rng = seeded_rng(15, 0xE2);
    for _ in 0..1000 {
        let r = gptkit::LinearMap::new(gptkit::groups::haar_rotation(3, &mut rng));
        let lifted = hermitian::so3_to_su2(&r).unwrap();
        let back = hermitian::su2_to_so3(&lifted).unwrap();
        let residual = (r.matrix() - back.matrix()).amax();
        assert!(residual < 1e-9, "lift residual {residual}");
    }
}

#[test]
fn tensor_power_three_on_products() {
    // 𝓛⊗3[φ⊗φ⊗φ] = |φ⟩⟨φ|⊗3
    let phi = ball_state(&[0.6, 0.0, 0.8]);
    let pair = product_state(&phi, &phi);
    let triple = product_state(&pair, &phi);
    let rho3 = hermitian::l_map_tensor(&triple, 3).unwrap();
    let single = hermitian::l_map_tensor(&product_state(&phi, &phi), 2).unwrap();
    let rho1 = {
        let mut coords = vec![0.0; 4];
        coords[0] = 1.0;
        for (i, p) in phi.fiducial().iter().enumerate() {
            coords[i + 1] = *p;
        }
        hermitian::l_map_tensor(
            &StateVector::new(nalgebra::DVector::from_row_slice(&coords)).unwrap(),
            1,
        )
        .unwrap()
    };
    let expected = single.kronecker(&rho1);
    assert!((rho3 - expected).camax() < 1e-12);
}

#[test]
fn pair_covariance_through_local_unitaries() {
    // the Eq.-37 commuting square for two gbits
    let mut rng = seeded_rng(16, 0xE3);
    for k in 0..50 {
        let ua = hermitian::haar_su2(&mut rng);
        let ub = hermitian::haar_su2(&mut rng);
        let u = std::f64::consts::PI * (k as f64) / 50.0;
        let state = equator_state(u, 0.3).to_joint_state();
        let residual = hermitian::covariance_residual_pair(&ua, &ub, &state).unwrap();
        assert!(residual < 1e-12, "residual {residual}");
    }
}

#[test]
fn orbit_rank_seed_stable_across_grid() {
    use gptkit::groups::{orbit_span_rank, SeedMatrixClass};
    let cases = [
        (3usize, SeedMatrixClass::RotationLike, 16usize, 2usize),
        (3, SeedMatrixClass::ReflectionLike, 16, 2),
        (3, SeedMatrixClass::Vector, 16, 2),
        (5, SeedMatrixClass::Generic, 40, 16),
        (7, SeedMatrixClass::Generic, 60, 36),
    ];
    for (d2, class, samples, expected) in cases {
        for seed in [11u64, 22, 33, 44, 55] {
            let report = orbit_span_rank(d2, class, samples, seed).unwrap();
            assert_eq!(
                report.rank, expected,
                "d2={d2} class={:?} seed={seed}",
                class
            );
            assert!(!report.ambiguous);
        }
    }
}

#[test]
fn qubit_pair_sampled_pures_are_members() {
    // the two-qubit joint set matches the density-matrix picture on
    // sampled states: all Haar pures are members with unit purity
    let space = StateSpaceDescriptor::qubit_pair();
    let mut rng = seeded_rng(17, 0xE4);
    for _ in 0..200 {
        let psi = space.sample_pure(&mut rng);
        assert!(space.is_member(&psi, 1e-9).unwrap());
        assert!(space.is_pure(&psi, 1e-7).unwrap());
        // rank-one effects evaluate within [0,1] on sampled members
        let e = space.sample_effect(&mut rng).unwrap();
        let probe = space.sample_pure(&mut rng);
        let p = evaluate_effect(&e, &probe).unwrap();
        assert!((-1e-9..=1.0 + 1e-9).contains(&p));
    }
}

#[test]
fn entanglement_witness_direction_finds_negative_eigenvalue() {
    // deliberately crafted non-member: C = +identity correlation matrix;
    // its Hermitian image has a negative eigenvalue, which is exactly the
    // negative-probability witness of the associated rank-one effect
    let bad = gptkit::bloch::TwoGbitBloch::new(
        nalgebra::Vector3::zeros(),
        nalgebra::Vector3::zeros(),
        nalgebra::Matrix3::identity(),
    );
    let rho = hermitian::two_gbit_hermitian(&bad);
    let min = hermitian::min_eigenvalue(&rho);
    assert!(min < -0.4, "expected a clearly negative eigenvalue, got {min}");
    let space = StateSpaceDescriptor::qubit_pair();
    assert!(!space.is_member(&bad.to_joint_state(), 1e-9).unwrap());
}

#[test]
fn covariance_check_named_ops() {
    let mut rng = seeded_rng(18, 0xE5);
    let u = hermitian::haar_su2(&mut rng);
    let psi = ball_state(&[1.0, 0.0, 0.0]);
    assert!(hermitian::covariance_check(&u, &psi).unwrap());
    assert!(gptkit::bloch::pure_norm_check(&equator_state(0.4, 0.9), 1e-12));
    assert!(!gptkit::bloch::pure_norm_check(
        &gptkit::bloch::TwoGbitBloch::new(
            nalgebra::Vector3::zeros(),
            nalgebra::Vector3::zeros(),
            nalgebra::Matrix3::zeros()
        ),
        1e-12
    ));
}

#[test]
fn capacity_certificates_return_pure_states() {
    // distinguishable families come back as pure states (vertex-list
    // spaces enumerate vertices; sampled spaces certify purity)
    let mut rng = seeded_rng(19, 0xE6);
    for name in ["classical:4", "quantum:2", "ball:3", "boxworld"] {
        let inst = gptkit::instances::by_name(name).unwrap();
        let mut pool = match inst.space.vertices() {
            Some(v) => v.to_vec(),
            None => inst.space.pure_candidates(16, &mut rng),
        };
        if name == "ball:3" {
            pool.push(ball_state(&[0.0, 0.0, 1.0]));
            pool.push(ball_state(&[0.0, 0.0, -1.0]));
        }
        if name == "quantum:2" {
            pool.push(ball_state(&[0.0, 0.0, 1.0]));
            pool.push(ball_state(&[0.0, 0.0, -1.0]));
        }
        let cert = gptkit::lp::capacity(&inst.space, 6, &pool).unwrap();
        for s in &cert.states {
            assert!(
                inst.space.is_pure(s, 1e-7).unwrap(),
                "{name}: certificate state not pure"
            );
        }
    }
}

#[test]
fn three_gbit_recursive_pairing() {
    // composites extend recursively: reduce (AB)C back to AB and to C
    let a = ball_state(&[1.0, 0.0, 0.0]);
    let b = ball_state(&[0.0, 1.0, 0.0]);
    let c = ball_state(&[0.0, 0.0, 1.0]);
    let ab = product_state(&a, &b);
    let abc = product_state(&ab, &c);
    assert_eq!(abc.len(), 64);
    let back_ab =
        gptkit::composite::reduce(&abc, gptkit::composite::Subsystem::A, 15, 3).unwrap();
    let back_c =
        gptkit::composite::reduce(&abc, gptkit::composite::Subsystem::B, 15, 3).unwrap();
    assert!(back_ab.distance(&ab) < 1e-12);
    assert!(back_c.distance(&c) < 1e-12);
    // the three-factor Hermitian image is the triple product state
    let rho = hermitian::l_map_tensor(&abc, 3).unwrap();
    assert!((rho.trace().re - 1.0).abs() < 1e-12);
    let eigs = hermitian::hermitian_eigenvalues(&rho);
    assert!(eigs[7] - 1.0 < 1e-12 && eigs[..7].iter().all(|e| e.abs() < 1e-12));
}
