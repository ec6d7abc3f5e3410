//! Convex-geometry tasks backed by the simplex engine: distinguishing
//! measurements (`Ω_a(ψ_b) = δ_ab`), capacity certificates, tight effects
//! and relative-interior tests.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::hermitian::{self, QuantumRep};
use crate::lp::simplex::{solve, LpProblem, LpStatus, Relation};
use crate::space::{ball_effect, SpaceRep, StateSpaceDescriptor};
use crate::state::{evaluate_effect, Effect, Measurement, StateVector};

/// Outcome of a distinguishing-measurement search. `Infeasible` is a
/// result, not an error: it certifies that no such measurement exists
/// (exactly for polytopes and quantum spaces, by the antipodality
/// criterion for balls).
#[derive(Debug, Clone)]
pub enum Distinguishing {
    Found(Measurement),
    Infeasible,
}

impl Distinguishing {
    pub fn found(&self) -> Option<&Measurement> {
        match self {
            Distinguishing::Found(m) => Some(m),
            Distinguishing::Infeasible => None,
        }
    }
}

/// Searches for a measurement with `Ω_a(ψ_b) = δ_ab` whose effects are
/// valid on the whole space.
pub fn find_distinguishing_measurement(
    states: &[StateVector],
    space: &StateSpaceDescriptor,
) -> Result<Distinguishing> {
    let n = states.len();
    if n == 0 {
        return Err(Error::domain("no states to distinguish"));
    }
    let dim = space.dim();
    for s in states {
        if s.len() != dim + 1 {
            return Err(Error::Dimension {
                expected: dim + 1,
                found: s.len(),
            });
        }
    }
    if n == 1 {
        return Ok(Distinguishing::Found(Measurement::new(vec![
            Effect::unit(dim),
        ])?));
    }
    match space.rep() {
        SpaceRep::VertexList(vertices) => distinguish_polytope(states, vertices, dim),
        SpaceRep::Ball => {
            if n > 2 {
                return Ok(Distinguishing::Infeasible);
            }
            let b1 = states[0].fiducial().map(|p| 2.0 * p - 1.0);
            let b2 = states[1].fiducial().map(|p| 2.0 * p - 1.0);
            let pure = (b1.norm() - 1.0).abs() < 1e-7 && (b2.norm() - 1.0).abs() < 1e-7;
            let antipodal = (b1.dot(&b2) + 1.0).abs() < 1e-7;
            if pure && antipodal {
                let omega = ball_effect(&b1);
                let complement = omega.complement();
                Ok(Distinguishing::Found(Measurement::new(vec![
                    omega, complement,
                ])?))
            } else {
                Ok(Distinguishing::Infeasible)
            }
        }
        SpaceRep::PsdConeSlice { capacity } => distinguish_quantum(states, *capacity),
        SpaceRep::QubitPairTensor => distinguish_qubit_pair(states),
    }
}

// Same support-orthogonality criterion as the single quantum case, with
// the density matrices read through the two-qubit tensor representation.
fn distinguish_qubit_pair(states: &[StateVector]) -> Result<Distinguishing> {
    let n = states.len();
    if n > 4 {
        return Ok(Distinguishing::Infeasible);
    }
    let rhos: Vec<_> = states
        .iter()
        .map(|s| hermitian::l_map_tensor(s, 2))
        .collect::<Result<_>>()?;
    let projectors: Vec<_> = rhos
        .iter()
        .map(|r| hermitian::support_projector(r, 1e-9))
        .collect();
    for a in 0..n {
        for b in (a + 1)..n {
            if (&projectors[a] * &projectors[b]).trace().re.abs() > 1e-7 {
                return Ok(Distinguishing::Infeasible);
            }
        }
    }
    let mut ms = projectors;
    let total = ms
        .iter()
        .fold(hermitian::CMatrix::zeros(4, 4), |acc, p| acc + p);
    let remainder = hermitian::identity_c(4) - total;
    if let Some(last) = ms.last_mut() {
        *last += remainder;
    }
    let effects: Vec<Effect> = ms
        .iter()
        .map(hermitian::two_qubit_effect_dual)
        .collect::<Result<_>>()?;
    Ok(Distinguishing::Found(Measurement::new(effects)?))
}

// LP feasibility over stacked effect vectors for a polytope.
fn distinguish_polytope(
    states: &[StateVector],
    vertices: &[StateVector],
    dim: usize,
) -> Result<Distinguishing> {
    let n = states.len();
    let width = dim + 1;
    let n_vars = n * width;
    let mut p = LpProblem::feasibility(n_vars);
    // δ conditions
    for (a, _) in states.iter().enumerate() {
        for (b, psi) in states.iter().enumerate() {
            let mut coeffs = vec![0.0; n_vars];
            for k in 0..width {
                coeffs[a * width + k] = psi.coords()[k];
            }
            let rhs = if a == b { 1.0 } else { 0.0 };
            p.constrain(coeffs, Relation::Eq, rhs);
        }
    }
    // nonnegativity on every vertex (the unit-sum row makes <= 1 implicit)
    for a in 0..n {
        for v in vertices {
            let mut coeffs = vec![0.0; n_vars];
            for k in 0..width {
                coeffs[a * width + k] = v.coords()[k];
            }
            p.constrain(coeffs, Relation::Ge, 0.0);
        }
    }
    // effects sum to the unit effect
    for k in 0..width {
        let mut coeffs = vec![0.0; n_vars];
        for a in 0..n {
            coeffs[a * width + k] = 1.0;
        }
        let rhs = if k == 0 { 1.0 } else { 0.0 };
        p.constrain(coeffs, Relation::Eq, rhs);
    }
    let r = solve(&p, 1e-9)?;
    match r.status {
        LpStatus::Optimal => {
            let x = r.point.expect("optimal point");
            let effects: Vec<Effect> = (0..n)
                .map(|a| Effect::new(DVector::from_row_slice(&x[a * width..(a + 1) * width])))
                .collect();
            Ok(Distinguishing::Found(Measurement::new(effects)?))
        }
        _ => Ok(Distinguishing::Infeasible),
    }
}

// Quantum states are distinguishable iff their supports are pairwise
// orthogonal; the support projectors then form the measurement.
fn distinguish_quantum(states: &[StateVector], capacity: usize) -> Result<Distinguishing> {
    let rep = QuantumRep::new(capacity)?;
    let n = states.len();
    if n > capacity {
        return Ok(Distinguishing::Infeasible);
    }
    let rhos: Vec<_> = states
        .iter()
        .map(|s| rep.to_matrix(s))
        .collect::<Result<_>>()?;
    let projectors: Vec<_> = rhos
        .iter()
        .map(|r| hermitian::support_projector(r, 1e-9))
        .collect();
    for a in 0..n {
        for b in (a + 1)..n {
            let overlap = (&projectors[a] * &projectors[b]).trace().re;
            if overlap.abs() > 1e-7 {
                return Ok(Distinguishing::Infeasible);
            }
        }
    }
    // absorb the orthogonal remainder into the last effect
    let mut ms = projectors;
    let total = ms
        .iter()
        .fold(hermitian::CMatrix::zeros(capacity, capacity), |acc, p| acc + p);
    let remainder = hermitian::identity_c(capacity) - total;
    if let Some(last) = ms.last_mut() {
        *last += remainder;
    }
    let effects: Vec<Effect> = ms
        .iter()
        .map(|m| rep.effect_dual(m))
        .collect::<Result<_>>()?;
    Ok(Distinguishing::Found(Measurement::new(effects)?))
}

/// Maximal distinguishable family found within a candidate pool, with the
/// measurement certifying it.
#[derive(Debug, Clone)]
pub struct CapacityCertificate {
    pub states: Vec<StateVector>,
    pub measurement: Measurement,
    pub value: usize,
    /// True when exhaustive backtracking over the pool proved that no
    /// family of size `value + 1` exists (a pool-relative upper bound).
    pub pool_exhausted_at_next: bool,
}

impl CapacityCertificate {
    /// Largest deviation from `Ω_a(ψ_b) = δ_ab` over the certified family.
    pub fn delta_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, e) in self.measurement.effects().iter().enumerate() {
            for (b, s) in self.states.iter().enumerate() {
                let p = evaluate_effect(e, s).unwrap_or(f64::NAN);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((p - target).abs());
            }
        }
        worst
    }
}

const POOL_CAP: usize = 64;
const SUBSET_CAP: usize = 8;

/// Greedy-plus-backtracking search for the largest distinguishable family
/// among the candidates, `value ≤ max_c ≤ 8`. Distinguishability of a
/// subset is monotone under restriction, which makes the pruning exact;
/// the result is the true maximum over the (capped) pool.
pub fn capacity(
    space: &StateSpaceDescriptor,
    max_c: usize,
    candidate_pures: &[StateVector],
) -> Result<CapacityCertificate> {
    if candidate_pures.is_empty() {
        return Err(Error::domain("empty candidate pool"));
    }
    if max_c > SUBSET_CAP {
        return Err(Error::domain(format!(
            "capacity search capped at families of size {SUBSET_CAP}"
        )));
    }
    let pool: Vec<StateVector> = candidate_pures.iter().take(POOL_CAP).cloned().collect();
    let search_limit = max_c.min(pool.len());

    let mut best: Vec<usize> = vec![0];
    let mut best_measurement = match find_distinguishing_measurement(&[pool[0].clone()], space)? {
        Distinguishing::Found(m) => m,
        Distinguishing::Infeasible => unreachable!("single state is always distinguishable"),
    };
    let mut exhausted_next = false;
    for target in 2..=search_limit {
        match search_subset(space, &pool, target)? {
            Some((subset, m)) => {
                best = subset;
                best_measurement = m;
            }
            None => {
                exhausted_next = true;
                break;
            }
        }
    }
    if best.len() == search_limit {
        // the search stopped at the cap; a (k+1)-family is ruled out only
        // in the vacuous case where the whole pool is already in use
        exhausted_next = best.len() == pool.len();
    }
    Ok(CapacityCertificate {
        states: best.iter().map(|&i| pool[i].clone()).collect(),
        measurement: best_measurement,
        value: best.len(),
        pool_exhausted_at_next: exhausted_next,
    })
}

// Exhaustive backtracking for one subset size; feasibility pruning keeps
// this fast because infeasible prefixes are abandoned immediately.
fn search_subset(
    space: &StateSpaceDescriptor,
    pool: &[StateVector],
    target: usize,
) -> Result<Option<(Vec<usize>, Measurement)>> {
    fn recurse(
        space: &StateSpaceDescriptor,
        pool: &[StateVector],
        target: usize,
        current: &mut Vec<usize>,
        start: usize,
    ) -> Result<Option<(Vec<usize>, Measurement)>> {
        if current.len() == target {
            let states: Vec<StateVector> = current.iter().map(|&i| pool[i].clone()).collect();
            return Ok(match find_distinguishing_measurement(&states, space)? {
                Distinguishing::Found(m) => Some((current.clone(), m)),
                Distinguishing::Infeasible => None,
            });
        }
        for i in start..pool.len() {
            current.push(i);
            let states: Vec<StateVector> = current.iter().map(|&j| pool[j].clone()).collect();
            let feasible = matches!(
                find_distinguishing_measurement(&states, space)?,
                Distinguishing::Found(_)
            );
            if feasible {
                if let Some(hit) = recurse(space, pool, target, current, i + 1)? {
                    current.pop();
                    return Ok(Some(hit));
                }
            }
            current.pop();
        }
        Ok(None)
    }
    recurse(space, pool, target, &mut Vec::new(), 0)
}

/// A tight effect for `psi`: `Ω(ψ) = 1` with `min_space Ω = 0`. Returns
/// `None` when no valid functional can peak at `psi` (interior states).
pub fn find_tight_effect(
    space: &StateSpaceDescriptor,
    psi: &StateVector,
) -> Result<Option<Effect>> {
    match space.rep() {
        SpaceRep::VertexList(vertices) => {
            let width = space.dim() + 1;
            for zero_at in vertices {
                let mut p = LpProblem::feasibility(width);
                p.constrain(psi.coords().as_slice().to_vec(), Relation::Eq, 1.0);
                p.constrain(zero_at.coords().as_slice().to_vec(), Relation::Eq, 0.0);
                for v in vertices {
                    let coeffs = v.coords().as_slice().to_vec();
                    p.constrain(coeffs.clone(), Relation::Ge, 0.0);
                    p.constrain(coeffs, Relation::Le, 1.0);
                }
                let r = solve(&p, 1e-9)?;
                if r.status == LpStatus::Optimal {
                    return Ok(Some(Effect::new(DVector::from_row_slice(
                        &r.point.expect("optimal point"),
                    ))));
                }
            }
            Ok(None)
        }
        SpaceRep::Ball => {
            let b = psi.fiducial().map(|p| 2.0 * p - 1.0);
            if (b.norm() - 1.0).abs() < 1e-7 {
                Ok(Some(ball_effect(&b)))
            } else {
                Ok(None)
            }
        }
        SpaceRep::PsdConeSlice { capacity } => {
            let rep = QuantumRep::new(*capacity)?;
            let rho = rep.to_matrix(psi)?;
            if hermitian::min_eigenvalue(&rho) > 1e-9 {
                return Ok(None); // full rank: no tight effect peaks here
            }
            let support = hermitian::support_projector(&rho, 1e-9);
            Ok(Some(rep.effect_dual(&support)?))
        }
        SpaceRep::QubitPairTensor => {
            let rho = hermitian::l_map_tensor(psi, 2)?;
            if hermitian::min_eigenvalue(&rho) > 1e-9 {
                return Ok(None);
            }
            let support = hermitian::support_projector(&rho, 1e-9);
            Ok(Some(hermitian::two_qubit_effect_dual(&support)?))
        }
    }
}

/// Relative-interior test; see [`crate::space::is_completely_mixed_in`].
pub fn is_completely_mixed(space: &StateSpaceDescriptor, psi: &StateVector) -> Result<bool> {
    crate::space::is_completely_mixed_in(space, psi)
}
