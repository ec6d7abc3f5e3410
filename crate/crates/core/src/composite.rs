//! Composites under local tomography: joint states on the tensor-product
//! space, product states/effects/transformations, reduced states, and the
//! no-signaling bookkeeping for correlation tables.
//!
//! Joint coordinates use the plain Kronecker layout: component `(i, j)`
//! of `ψ_A ⊗ ψ_B` sits at index `i(d_B+1) + j`, so index `(0,0)` is the
//! redundant unit, `(i,0)` the A-marginals, `(0,j)` the B-marginals and
//! `(i,j)` the joint fiducial probabilities.

use nalgebra::DVector;

use crate::error::{Error, Result};

use crate::space::{CompositeRule, SpaceRep, StateSpaceDescriptor, TheoryInstance};
use crate::state::{evaluate_effect, Effect, StateVector};

/// Kronecker product of two states.
pub fn product_state(a: &StateVector, b: &StateVector) -> StateVector {
    let na = a.len();
    let nb = b.len();
    let mut coords = DVector::zeros(na * nb);
    for i in 0..na {
        for j in 0..nb {
            coords[i * nb + j] = a.coords()[i] * b.coords()[j];
        }
    }
    StateVector::new(coords).expect("product of normalized states is normalized")
}

/// Kronecker product of two effects.
pub fn product_effect(ea: &Effect, eb: &Effect) -> Effect {
    let na = ea.len();
    let nb = eb.len();
    let mut dual = DVector::zeros(na * nb);
    for i in 0..na {
        for j in 0..nb {
            dual[i * nb + j] = ea.dual()[i] * eb.dual()[j];
        }
    }
    Effect::new(dual)
}

/// `p(x,y) = (Ω_x ⊗ Ω_y)(ψ_AB)`.
pub fn joint_probability(ex: &Effect, ey: &Effect, psi_ab: &StateVector) -> Result<f64> {
    let expected = ex.len() * ey.len();
    if psi_ab.len() != expected {
        return Err(Error::Dimension {
            expected,
            found: psi_ab.len(),
        });
    }
    evaluate_effect(&product_effect(ex, ey), psi_ab)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state by component extraction (the `(i,0)` / `(0,j)` slices).
pub fn reduce(psi_ab: &StateVector, which: Subsystem, dim_a: usize, dim_b: usize) -> Result<StateVector> {
    let wa = dim_a + 1;
    let wb = dim_b + 1;
    if psi_ab.len() != wa * wb {
        return Err(Error::Dimension {
            expected: wa * wb,
            found: psi_ab.len(),
        });
    }
    let coords = psi_ab.coords();
    let out = match which {
        Subsystem::A => DVector::from_fn(wa, |i, _| coords[i * wb]),
        Subsystem::B => DVector::from_fn(wb, |j, _| coords[j]),
    };
    StateVector::new(out)
}

/// Reduced state by contracting the other side with the unit effect:
/// `Ω_A(ψ_A) = (Ω_A ⊗ 1)(ψ_AB)` applied to the coordinate functionals.
/// Exists as an independent route for cross-checking [`reduce`].
pub fn reduce_via_unit_contraction(
    psi_ab: &StateVector,
    which: Subsystem,
    dim_a: usize,
    dim_b: usize,
) -> Result<StateVector> {
    let wa = dim_a + 1;
    let wb = dim_b + 1;
    if psi_ab.len() != wa * wb {
        return Err(Error::Dimension {
            expected: wa * wb,
            found: psi_ab.len(),
        });
    }
    let out = match which {
        Subsystem::A => {
            let unit_b = Effect::unit(dim_b);
            DVector::from_fn(wa, |i, _| {
                let coord_effect = Effect::fiducial(dim_a, i); // i = 0 is the unit row
                let e = if i == 0 {
                    Effect::unit(dim_a)
                } else {
                    coord_effect
                };
                joint_probability(&e, &unit_b, psi_ab).expect("dims checked")
            })
        }
        Subsystem::B => {
            let unit_a = Effect::unit(dim_a);
            DVector::from_fn(wb, |j, _| {
                let e = if j == 0 {
                    Effect::unit(dim_b)
                } else {
                    Effect::fiducial(dim_b, j)
                };
                joint_probability(&unit_a, &e, psi_ab).expect("dims checked")
            })
        }
    };
    StateVector::new(out)
}

/// The local-tomography dimension constraint `(d_AB+1) = (d_A+1)(d_B+1)`.
pub fn local_tomography_dim_check(dim_a: usize, dim_b: usize, dim_ab: usize) -> bool {
    (dim_ab + 1) == (dim_a + 1) * (dim_b + 1)
}

// ---------------------------------------------------------------------------
// Composite spaces
// ---------------------------------------------------------------------------

/// A bipartite composite: the part descriptors, the joint space over the
/// `(d_A+1)(d_B+1)`-dimensional tensor space, and the rule that produced
/// it.
#[derive(Debug, Clone)]
pub struct CompositeSpace {
    pub part_a: StateSpaceDescriptor,
    pub part_b: StateSpaceDescriptor,
    pub joint: StateSpaceDescriptor,
    pub rule: CompositeRule,
}

impl CompositeSpace {
    pub fn joint_dim(&self) -> usize {
        (self.part_a.dim() + 1) * (self.part_b.dim() + 1) - 1
    }

    /// Membership of a joint-space candidate.
    pub fn is_member(&self, psi_ab: &StateVector, tol: f64) -> Result<bool> {
        if psi_ab.len() != self.joint_dim() + 1 {
            return Err(Error::Dimension {
                expected: self.joint_dim() + 1,
                found: psi_ab.len(),
            });
        }
        self.joint.is_member(psi_ab, tol)
    }

    /// Both reductions of a joint member must live in the part spaces.
    pub fn reductions_are_members(&self, psi_ab: &StateVector, tol: f64) -> Result<bool> {
        let a = reduce(psi_ab, Subsystem::A, self.part_a.dim(), self.part_b.dim())?;
        let b = reduce(psi_ab, Subsystem::B, self.part_a.dim(), self.part_b.dim())?;
        Ok(self.part_a.is_member(&a, tol)? && self.part_b.is_member(&b, tol)?)
    }
}

/// Builds the composite of two instances following their composite rule.
/// Mixed rules fall back to the minimal (product-hull) composite; for
/// non-polytopic parts the minimal composite carries a deterministic
/// sample of product generators rather than an exact description.
pub fn compose(a: &TheoryInstance, b: &TheoryInstance) -> Result<CompositeSpace> {
    let rule = if a.composite_rule == b.composite_rule {
        a.composite_rule
    } else {
        CompositeRule::LocalTomographyMin
    };
    let joint = match rule {
        CompositeRule::Classical => {
            let va = a
                .space
                .vertices()
                .ok_or_else(|| Error::domain("classical composite needs vertex lists"))?;
            let vb = b
                .space
                .vertices()
                .ok_or_else(|| Error::domain("classical composite needs vertex lists"))?;
            let products: Vec<StateVector> = va
                .iter()
                .flat_map(|x| vb.iter().map(move |y| product_state(x, y)))
                .collect();
            StateSpaceDescriptor::vertex_list(products)?
        }
        CompositeRule::Quantum => {
            let ok = matches!(a.space.rep(), SpaceRep::PsdConeSlice { capacity: 2 })
                && matches!(b.space.rep(), SpaceRep::PsdConeSlice { capacity: 2 });
            if !ok {
                return Err(Error::UnsupportedRepresentation(
                    "quantum composites are implemented for capacity-2 parts".into(),
                ));
            }
            StateSpaceDescriptor::qubit_pair()
        }
        CompositeRule::LocalTomographyMax => {
            // implemented for the boxworld pair scenario
            let square_parts = a.space.dim() == 2 && b.space.dim() == 2;
            if !square_parts {
                return Err(Error::UnsupportedRepresentation(
                    "the maximal composite is implemented for boxworld squares".into(),
                ));
            }
            StateSpaceDescriptor::vertex_list(crate::instances::no_signaling_vertices()?)?
        }
        CompositeRule::LocalTomographyMin => {
            let products = match (a.space.vertices(), b.space.vertices()) {
                (Some(va), Some(vb)) => va
                    .iter()
                    .flat_map(|x| vb.iter().map(move |y| product_state(x, y)))
                    .collect(),
                _ => {
                    let mut rng = crate::groups::seeded_rng(a.group.sampler_seed, 101);
                    let pa = a.space.pure_candidates(24, &mut rng);
                    let pb = b.space.pure_candidates(24, &mut rng);
                    pa.iter()
                        .flat_map(|x| pb.iter().map(move |y| product_state(x, y)))
                        .collect()
                }
            };
            StateSpaceDescriptor::vertex_list(products)?
        }
    };
    Ok(CompositeSpace {
        part_a: a.space.clone(),
        part_b: b.space.clone(),
        joint,
        rule,
    })
}

// ---------------------------------------------------------------------------
// No-signaling on correlation tables
// ---------------------------------------------------------------------------

/// Per-setting outcome tables for binary fiducial measurements:
/// `tables[i·n_y + j] = [p(x,y), p(x,ȳ), p(x̄,y), p(x̄,ȳ)]`.
#[derive(Debug, Clone)]
pub struct CorrelationTable {
    pub n_x: usize,
    pub n_y: usize,
    pub tables: Vec<[f64; 4]>,
}

/// A no-signaling violation witness: the marginal of setting `i` on one
/// side changes between the other side's settings `j1` and `j2`.
#[derive(Debug, Clone, PartialEq)]
pub struct NsWitness {
    pub side: Subsystem,
    pub setting: usize,
    pub other_settings: (usize, usize),
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct NsCheck {
    pub ok: bool,
    pub max_violation: f64,
    pub witness: Option<NsWitness>,
}

impl CorrelationTable {
    /// Derives the outcome tables from a joint state in tensor
    /// coordinates. The construction uses the state's single marginal
    /// components, so the result is no-signaling by construction; the
    /// interesting checks on states are membership ones.
    pub fn from_state(psi_ab: &StateVector, dim_a: usize, dim_b: usize) -> Result<Self> {
        let wa = dim_a + 1;
        let wb = dim_b + 1;
        if psi_ab.len() != wa * wb {
            return Err(Error::Dimension {
                expected: wa * wb,
                found: psi_ab.len(),
            });
        }
        let c = psi_ab.coords();
        let mut tables = Vec::with_capacity(dim_a * dim_b);
        for i in 1..wa {
            for j in 1..wb {
                let p_xy = c[i * wb + j];
                let p_x = c[i * wb];
                let p_y = c[j];
                tables.push([p_xy, p_x - p_xy, p_y - p_xy, 1.0 - p_x - p_y + p_xy]);
            }
        }
        Ok(CorrelationTable {
            n_x: dim_a,
            n_y: dim_b,
            tables,
        })
    }

    fn table(&self, i: usize, j: usize) -> &[f64; 4] {
        &self.tables[i * self.n_y + j]
    }

    /// Checks `p(xᵢ) = p(xᵢ,yⱼ) + p(xᵢ,ȳⱼ)` independence across `j` and the
    /// symmetric condition, plus validity of each outcome table. Returns
    /// the largest marginal gap with a witness pair when it exceeds `tol`.
    pub fn check_no_signaling(&self, tol: f64) -> NsCheck {
        let mut max_violation: f64 = 0.0;
        let mut witness = None;
        for (t, table) in self.tables.iter().enumerate() {
            let sum: f64 = table.iter().sum();
            let bad = table.iter().map(|p| (-p).max(0.0)).fold(0.0f64, f64::max);
            let inconsistency = bad.max((sum - 1.0).abs());
            if inconsistency > max_violation {
                max_violation = inconsistency;
                witness = Some(NsWitness {
                    side: Subsystem::A,
                    setting: t / self.n_y,
                    other_settings: (t % self.n_y, t % self.n_y),
                    gap: inconsistency,
                });
            }
        }
        for i in 0..self.n_x {
            for j1 in 0..self.n_y {
                for j2 in (j1 + 1)..self.n_y {
                    let m1 = self.table(i, j1)[0] + self.table(i, j1)[1];
                    let m2 = self.table(i, j2)[0] + self.table(i, j2)[1];
                    let gap = (m1 - m2).abs();
                    if gap > max_violation {
                        max_violation = gap;
                        witness = Some(NsWitness {
                            side: Subsystem::A,
                            setting: i,
                            other_settings: (j1, j2),
                            gap,
                        });
                    }
                }
            }
        }
        for j in 0..self.n_y {
            for i1 in 0..self.n_x {
                for i2 in (i1 + 1)..self.n_x {
                    let m1 = self.table(i1, j)[0] + self.table(i1, j)[2];
                    let m2 = self.table(i2, j)[0] + self.table(i2, j)[2];
                    let gap = (m1 - m2).abs();
                    if gap > max_violation {
                        max_violation = gap;
                        witness = Some(NsWitness {
                            side: Subsystem::B,
                            setting: j,
                            other_settings: (i1, i2),
                            gap,
                        });
                    }
                }
            }
        }
        let ok = max_violation <= tol;
        NsCheck {
            ok,
            max_violation,
            witness: if ok { None } else { witness },
        }
    }
}

/// No-signaling check of a joint state: derives the correlation tables and
/// checks their consistency (structural for tensor-representation states;
/// the table route exists so deliberately signaling data can be examined
/// with the same machinery).
pub fn check_no_signaling(
    psi_ab: &StateVector,
    composite: &CompositeSpace,
    tol: f64,
) -> Result<NsCheck> {
    let table = CorrelationTable::from_state(psi_ab, composite.part_a.dim(), composite.part_b.dim())?;
    Ok(table.check_no_signaling(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{equator_state, two_gbit_bloch};
    use crate::groups::seeded_rng;
    use crate::instances;
    use crate::space::ball_effect;
    use nalgebra::Vector3;

    const TOL: f64 = 1e-12;

    fn ball_state(b: &[f64]) -> StateVector {
        StateVector::from_probabilities(&b.iter().map(|x| (1.0 + x) / 2.0).collect::<Vec<_>>())
    }

    #[test]
    fn product_state_basics() {
        let a = ball_state(&[0.0, 0.0, 1.0]);
        let b = ball_state(&[1.0, 0.0, 0.0]);
        let ab = product_state(&a, &b);
        assert_eq!(ab.coords()[0], 1.0);
        let ra = reduce(&ab, Subsystem::A, 3, 3).unwrap();
        let rb = reduce(&ab, Subsystem::B, 3, 3).unwrap();
        assert!(ra.distance(&a) < TOL);
        assert!(rb.distance(&b) < TOL);
    }

    #[test]
    fn product_bloch_is_rank_one() {
        let a = ball_state(&[0.0, 0.0, 1.0]);
        let b = ball_state(&[0.6, 0.0, 0.8]);
        let ab = product_state(&a, &b);
        let bloch = two_gbit_bloch(&ab).unwrap();
        let expected = crate::bloch::product_bloch(
            &Vector3::new(0.0, 0.0, 1.0),
            &Vector3::new(0.6, 0.0, 0.8),
        );
        assert!(bloch.distance(&expected) < TOL);
    }

    #[test]
    fn joint_probability_unit_and_factorization() {
        let a = ball_state(&[0.3, 0.2, 0.1]);
        let b = ball_state(&[0.0, 0.5, 0.0]);
        let ab = product_state(&a, &b);
        let unit = Effect::unit(3);
        assert!((joint_probability(&unit, &unit, &ab).unwrap() - 1.0).abs() < TOL);

        let ea = ball_effect(&nalgebra::DVector::from_row_slice(&[0.0, 0.0, 1.0]));
        let eb = ball_effect(&nalgebra::DVector::from_row_slice(&[1.0, 0.0, 0.0]));
        let joint = joint_probability(&ea, &eb, &ab).unwrap();
        let pa = evaluate_effect(&ea, &a).unwrap();
        let pb = evaluate_effect(&eb, &b).unwrap();
        assert!((joint - pa * pb).abs() < TOL);
    }

    #[test]
    fn eq24_closed_form_matches_tensor_effect() {
        let state = equator_state(1.1, 0.7);
        let joint = state.to_joint_state();
        let phi_a = Vector3::new(0.48, 0.6, 0.64).normalize();
        let phi_b = Vector3::new(-0.8, 0.0, 0.6).normalize();
        let ea = ball_effect(&nalgebra::DVector::from_row_slice(phi_a.as_slice()));
        let eb = ball_effect(&nalgebra::DVector::from_row_slice(phi_b.as_slice()));
        let via_tensor = joint_probability(&ea, &eb, &joint).unwrap();
        let closed = (1.0
            + phi_a.dot(&state.alpha)
            + phi_b.dot(&state.beta)
            + (phi_a.transpose() * state.corr * phi_b)[0])
            / 4.0;
        assert!((via_tensor - closed).abs() < TOL);
    }

    #[test]
    fn reduction_routes_agree_on_random_joints() {
        let mut rng = seeded_rng(31, 4);
        for _ in 0..200 {
            // random mixture of products and equator states
            let u: f64 = rand::RngExt::random::<f64>(&mut rng) * std::f64::consts::PI;
            let v: f64 = rand::RngExt::random::<f64>(&mut rng) * std::f64::consts::TAU;
            let q: f64 = rand::RngExt::random(&mut rng);
            let eq = equator_state(u, v).to_joint_state();
            let a = StateSpaceDescriptor::ball(3).sample_pure(&mut rng);
            let b = StateSpaceDescriptor::ball(3).sample_pure(&mut rng);
            let prod = product_state(&a, &b);
            let mixed = crate::state::mix(&eq, &prod, q).unwrap();
            for side in [Subsystem::A, Subsystem::B] {
                let r1 = reduce(&mixed, side, 3, 3).unwrap();
                let r2 = reduce_via_unit_contraction(&mixed, side, 3, 3).unwrap();
                assert!(r1.distance(&r2) < 1e-12);
            }
        }
    }

    #[test]
    fn equator_reduction_is_on_axis() {
        // ψ(u,v) reduces to Bloch (cos u, 0, 0) on both sides
        let u = 0.8;
        let joint = equator_state(u, 1.9).to_joint_state();
        let ra = reduce(&joint, Subsystem::A, 3, 3).unwrap();
        let expected = ball_state(&[u.cos(), 0.0, 0.0]);
        assert!(ra.distance(&expected) < TOL);
    }

    #[test]
    fn dim_check_examples() {
        assert!(local_tomography_dim_check(3, 3, 15));
        assert!(local_tomography_dim_check(1, 1, 3));
        assert!(!local_tomography_dim_check(3, 3, 16));
    }

    #[test]
    fn product_transformations_commute_with_reduction() {
        let mut rng = seeded_rng(37, 5);
        let ball = instances::ball_gbit(3).unwrap();
        for _ in 0..20 {
            let ta = ball.sample_transformation(&mut rng).unwrap();
            let tb = ball.sample_transformation(&mut rng).unwrap();
            let a = ball.space.sample_pure(&mut rng);
            let b = ball.space.sample_pure(&mut rng);
            let ab = product_state(&a, &b);
            let moved = ab.apply(&ta.kron(&tb)).unwrap();
            let ra = reduce(&moved, Subsystem::A, 3, 3).unwrap();
            let expected = a.apply(&ta).unwrap();
            assert!(ra.distance(&expected) < 1e-12);
        }
    }

    #[test]
    fn classical_composite_membership() {
        let c2 = instances::classical(2).unwrap();
        let c3 = instances::classical(3).unwrap();
        let comp = compose(&c2, &c3).unwrap();
        assert_eq!(comp.joint_dim(), 5);
        let a = c2.space.vertices().unwrap()[0].clone();
        let b = c3.space.vertices().unwrap()[2].clone();
        let ab = product_state(&a, &b);
        assert!(comp.is_member(&ab, 1e-9).unwrap());
        assert!(comp.reductions_are_members(&ab, 1e-9).unwrap());
    }

    #[test]
    fn qubit_pair_membership() {
        let q = instances::quantum(2).unwrap();
        let comp = compose(&q, &q).unwrap();
        // for c = 2 the generalized-Pauli fiducials are the ball fiducials
        let a = ball_state(&[0.0, 0.0, 1.0]);
        let b = ball_state(&[1.0, 0.0, 0.0]);
        let ab = product_state(&a, &b);
        assert!(comp.is_member(&ab, 1e-9).unwrap());

        // the maximally entangled equator state is a member
        let ent = equator_state(std::f64::consts::FRAC_PI_2, 0.0).to_joint_state();
        assert!(comp.is_member(&ent, 1e-9).unwrap());

        // C = +diag(1,1,1) is not quantum (the Hermitian image has a
        // negative eigenvalue)
        let bad = crate::bloch::TwoGbitBloch::new(
            Vector3::zeros(),
            Vector3::zeros(),
            nalgebra::Matrix3::identity(),
        )
        .to_joint_state();
        assert!(!comp.is_member(&bad, 1e-9).unwrap());
    }

    #[test]
    fn boxworld_composite_contains_pr_box() {
        let bw = instances::boxworld_gbit().unwrap();
        let comp = compose(&bw, &bw).unwrap();
        let pr = instances::no_signaling_vertices()
            .unwrap()
            .into_iter()
            .find(|v| v.coords().iter().skip(1).any(|x| (x - 0.5).abs() < 1e-12))
            .unwrap();
        assert!(comp.is_member(&pr, 1e-9).unwrap());
        assert!(comp.reductions_are_members(&pr, 1e-9).unwrap());
    }

    #[test]
    fn no_signaling_of_states_and_tables() {
        let a = ball_state(&[0.3, 0.0, 0.2]);
        let b = ball_state(&[0.0, 0.9, 0.0]);
        let ball = instances::ball_gbit(3).unwrap();
        let comp = compose(&ball, &ball).unwrap();
        let check = check_no_signaling(&product_state(&a, &b), &comp, 1e-9).unwrap();
        assert!(check.ok);
        assert!(check.max_violation < TOL);

        // PR vertex passes through the boxworld composite
        let bw = instances::boxworld_gbit().unwrap();
        let comp_bw = compose(&bw, &bw).unwrap();
        for v in instances::no_signaling_vertices().unwrap() {
            let check = check_no_signaling(&v, &comp_bw, 1e-9).unwrap();
            assert!(check.ok);
        }

        // a deliberately signaling table: A's first marginal depends on
        // B's setting (p(x1) = 1 under y1, p(x1) = 0 under y2)
        let table = CorrelationTable {
            n_x: 2,
            n_y: 2,
            tables: vec![
                [1.0, 0.0, 0.0, 0.0], // (x1, y1): p(x1) = 1
                [0.0, 0.0, 1.0, 0.0], // (x1, y2): p(x1) = 0
                [0.5, 0.0, 0.5, 0.0],
                [0.5, 0.0, 0.0, 0.5],
            ],
        };
        let check = table.check_no_signaling(1e-9);
        assert!(!check.ok);
        let w = check.witness.unwrap();
        assert_eq!(w.side, Subsystem::A);
        assert_eq!(w.setting, 0);
        assert!((w.gap - 1.0).abs() < TOL);
    }
}
