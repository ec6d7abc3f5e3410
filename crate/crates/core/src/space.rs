//! State-space descriptors, membership oracles, pure-state sources,
//! effect policies and the theory-instance bundle that ties them to a
//! transformation group.

use nalgebra::DVector;
use rand::{Rng, RngExt};

use crate::error::{Error, Result};
use crate::groups::{self, GroupKind, GroupSpec, NamedGroup};
use crate::hermitian::{self, QuantumRep};
use crate::lp::{solve, LpProblem, LpStatus, Relation};
use crate::state::{Effect, LinearMap, StateVector};

/// Geometric representation of a state space.
#[derive(Debug, Clone)]
pub enum SpaceRep {
    /// Convex hull of a finite pure-state set.
    VertexList(Vec<StateVector>),
    /// Unit ball in Bloch coordinates; pure states are the unit sphere.
    Ball,
    /// Quantum states of capacity `c` as the slice of the psd cone with
    /// unit trace, in generalized-Pauli fiducial coordinates.
    PsdConeSlice { capacity: usize },
    /// Two-qubit density matrices in the 16-component tensor
    /// representation of a gbit pair.
    QubitPairTensor,
}

#[derive(Debug, Clone)]
pub struct StateSpaceDescriptor {
    dim: usize,
    rep: SpaceRep,
    fiducial_labels: Vec<String>,
}

impl StateSpaceDescriptor {
    pub fn vertex_list(vertices: Vec<StateVector>) -> Result<Self> {
        let first = vertices
            .first()
            .ok_or_else(|| Error::domain("vertex list must be non-empty"))?;
        let dim = first.dim();
        if vertices.iter().any(|v| v.dim() != dim) {
            return Err(Error::domain("vertex dimensions disagree"));
        }
        let fiducial_labels = (1..=dim).map(|i| format!("x{i}")).collect();
        Ok(StateSpaceDescriptor {
            dim,
            rep: SpaceRep::VertexList(vertices),
            fiducial_labels,
        })
    }

    pub fn ball(d2: usize) -> Self {
        StateSpaceDescriptor {
            dim: d2,
            rep: SpaceRep::Ball,
            fiducial_labels: (1..=d2).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn qubit_pair() -> Self {
        StateSpaceDescriptor {
            dim: 15,
            rep: SpaceRep::QubitPairTensor,
            fiducial_labels: (1..=15).map(|i| format!("t{i}")).collect(),
        }
    }

    pub fn quantum(capacity: usize) -> Result<Self> {
        let rep = QuantumRep::new(capacity)?;
        let dim = rep.dim();
        Ok(StateSpaceDescriptor {
            dim,
            rep: SpaceRep::PsdConeSlice { capacity },
            fiducial_labels: (1..=dim).map(|i| format!("pauli{i}")).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &SpaceRep {
        &self.rep
    }

    pub fn fiducial_labels(&self) -> &[String] {
        &self.fiducial_labels
    }

    pub fn vertices(&self) -> Option<&[StateVector]> {
        match &self.rep {
            SpaceRep::VertexList(v) => Some(v),
            _ => None,
        }
    }

    /// Convex membership oracle.
    pub fn is_member(&self, psi: &StateVector, tol: f64) -> Result<bool> {
        if psi.len() != self.dim + 1 {
            return Err(Error::Dimension {
                expected: self.dim + 1,
                found: psi.len(),
            });
        }
        match &self.rep {
            SpaceRep::VertexList(vertices) => {
                crate::polytope::in_convex_hull(
                    psi.coords(),
                    &vertices.iter().map(|v| v.coords().clone()).collect::<Vec<_>>(),
                    tol,
                )
            }
            SpaceRep::Ball => Ok(bloch_norm(psi) <= 1.0 + tol),
            SpaceRep::PsdConeSlice { capacity } => {
                let rep = QuantumRep::new(*capacity)?;
                let rho = rep.to_matrix(psi)?;
                Ok(hermitian::min_eigenvalue(&rho) >= -tol)
            }
            SpaceRep::QubitPairTensor => {
                let rho = hermitian::l_map_tensor(psi, 2)?;
                Ok(hermitian::min_eigenvalue(&rho) >= -tol)
            }
        }
    }

    /// Whether a state is pure (an extreme point), up to tolerance.
    pub fn is_pure(&self, psi: &StateVector, tol: f64) -> Result<bool> {
        match &self.rep {
            SpaceRep::VertexList(vertices) => {
                Ok(vertices.iter().any(|v| v.distance(psi) < tol.max(1e-9)))
            }
            SpaceRep::Ball => Ok((bloch_norm(psi) - 1.0).abs() <= tol),
            SpaceRep::PsdConeSlice { capacity } => {
                let rep = QuantumRep::new(*capacity)?;
                let rho = rep.to_matrix(psi)?;
                let purity = (&rho * &rho).trace().re;
                Ok((purity - 1.0).abs() <= tol.max(1e-9))
            }
            SpaceRep::QubitPairTensor => {
                let rho = hermitian::l_map_tensor(psi, 2)?;
                let purity = (&rho * &rho).trace().re;
                Ok((purity - 1.0).abs() <= tol.max(1e-9))
            }
        }
    }

    /// A pure state drawn from the seeded source: vertex-list spaces pick
    /// uniformly among vertices, balls sample the unit sphere, quantum
    /// spaces sample Haar state vectors.
    pub fn sample_pure<R: Rng>(&self, rng: &mut R) -> StateVector {
        match &self.rep {
            SpaceRep::VertexList(vertices) => {
                let i = rng.random_range(0..vertices.len());
                vertices[i].clone()
            }
            SpaceRep::Ball => {
                let v = groups::sample_unit_vector(self.dim, rng);
                let probs: Vec<f64> = v.iter().map(|x| (1.0 + x) / 2.0).collect();
                StateVector::from_probabilities(&probs)
            }
            SpaceRep::PsdConeSlice { capacity } => {
                let rep = QuantumRep::new(*capacity).expect("validated capacity");
                let cdim = *capacity;
                let mut re = Vec::with_capacity(cdim);
                let mut im = Vec::with_capacity(cdim);
                for _ in 0..cdim {
                    re.push(groups::gauss(rng));
                    im.push(groups::gauss(rng));
                }
                let norm: f64 = re
                    .iter()
                    .zip(&im)
                    .map(|(a, b)| a * a + b * b)
                    .sum::<f64>()
                    .sqrt();
                let mut rho = hermitian::CMatrix::zeros(cdim, cdim);
                for i in 0..cdim {
                    for j in 0..cdim {
                        let vi = nalgebra::Complex::new(re[i] / norm, im[i] / norm);
                        let vj = nalgebra::Complex::new(re[j] / norm, im[j] / norm);
                        rho[(i, j)] = vi * vj.conj();
                    }
                }
                rep.from_matrix(&rho).expect("valid density matrix")
            }
            SpaceRep::QubitPairTensor => hermitian::sample_two_qubit_pure(rng),
        }
    }

    /// Pure candidates for capacity searches: full enumeration for vertex
    /// lists, `n` samples otherwise.
    pub fn pure_candidates<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<StateVector> {
        match &self.rep {
            SpaceRep::VertexList(vertices) => vertices.clone(),
            _ => (0..n).map(|_| self.sample_pure(rng)).collect(),
        }
    }

    /// Closed-form maximally mixed state where the symmetry forces it:
    /// uniform weights on vertices for the built-in vertex lists, the
    /// Bloch origin for balls, `𝕀/c` for quantum spaces.
    pub fn maximally_mixed_closed_form(&self) -> StateVector {
        match &self.rep {
            SpaceRep::VertexList(vertices) => {
                let mut acc = DVector::zeros(self.dim + 1);
                for v in vertices {
                    acc += v.coords();
                }
                acc /= vertices.len() as f64;
                acc[0] = 1.0;
                StateVector::new(acc).expect("normalized average")
            }
            SpaceRep::Ball => {
                StateVector::from_probabilities(&vec![0.5; self.dim])
            }
            SpaceRep::PsdConeSlice { .. } => {
                // traceless basis operators all have expectation zero
                StateVector::from_probabilities(&vec![0.5; self.dim])
            }
            SpaceRep::QubitPairTensor => {
                let mu = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
                crate::composite::product_state(&mu, &mu)
            }
        }
    }

    /// Whether an effect takes values in `[-tol, 1+tol]` on the whole
    /// space: exact vertex check for polytopes, closed forms for balls and
    /// quantum spaces.
    pub fn effect_within_bounds(&self, e: &Effect, tol: f64) -> Result<bool> {
        if e.len() != self.dim + 1 {
            return Err(Error::Dimension {
                expected: self.dim + 1,
                found: e.len(),
            });
        }
        match &self.rep {
            SpaceRep::VertexList(vertices) => {
                for v in vertices {
                    let p = e.dual().dot(v.coords());
                    if !(-tol..=1.0 + tol).contains(&p) {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            SpaceRep::Ball => {
                // Ω(ψ) = e₀ + Σᵢ eᵢ (1+ψ̂ᵢ)/2 ranges over base ± |w|/2
                let e0 = e.dual()[0];
                let w = e.dual().rows(1, self.dim).into_owned();
                let base = e0 + w.iter().sum::<f64>() / 2.0;
                let radius = w.norm() / 2.0;
                Ok(base - radius >= -tol && base + radius <= 1.0 + tol)
            }
            SpaceRep::PsdConeSlice { capacity } => {
                let rep = QuantumRep::new(*capacity)?;
                let m = rep.operator_from_dual(e)?;
                let eigs = hermitian::hermitian_eigenvalues(&m);
                Ok(eigs[0] >= -tol && eigs[eigs.len() - 1] <= 1.0 + tol)
            }
            SpaceRep::QubitPairTensor => {
                let m = hermitian::two_qubit_operator_from_dual(e)?;
                let eigs = hermitian::hermitian_eigenvalues(&m);
                Ok(eigs[0] >= -tol && eigs[eigs.len() - 1] <= 1.0 + tol)
            }
        }
    }

    /// A valid effect sampled from the extreme family of the space: a
    /// face-supported functional for polytopes (random tight effect on a
    /// random vertex), the Eq.-13 family for balls, a random projector
    /// effect for quantum spaces.
    pub fn sample_effect<R: Rng>(&self, rng: &mut R) -> Result<Effect> {
        match &self.rep {
            SpaceRep::VertexList(_) => {
                // random convex mixture of the always-valid generators:
                // zero, unit, single fiducial reads and their complements
                let pick = |rng: &mut R, dim: usize| -> Effect {
                    match rng.random_range(0..4) {
                        0 => Effect::zero(dim),
                        1 => Effect::unit(dim),
                        2 => Effect::fiducial(dim, rng.random_range(1..=dim)),
                        _ => Effect::fiducial(dim, rng.random_range(1..=dim)).complement(),
                    }
                };
                let a = pick(rng, self.dim);
                let b = pick(rng, self.dim);
                let q: f64 = rng.random::<f64>();
                let dual = a.dual() * q + b.dual() * (1.0 - q);
                Ok(Effect::new(dual))
            }
            SpaceRep::Ball => {
                let axis = groups::sample_unit_vector(self.dim, rng);
                Ok(ball_effect(&axis))
            }
            SpaceRep::PsdConeSlice { capacity } => {
                let rep = QuantumRep::new(*capacity)?;
                let psi = self.sample_pure(rng);
                let rho = rep.to_matrix(&psi)?;
                rep.effect_dual(&rho)
            }
            SpaceRep::QubitPairTensor => {
                let psi = self.sample_pure(rng);
                let rho = hermitian::l_map_tensor(&psi, 2)?;
                hermitian::two_qubit_effect_dual(&rho)
            }
        }
    }
}

/// Norm of the Bloch image `ψ̂ᵢ = 2pᵢ − 1` of a ball-space state.
pub fn bloch_norm(psi: &StateVector) -> f64 {
    psi.fiducial().iter().map(|p| {
        let x = 2.0 * p - 1.0;
        x * x
    }).sum::<f64>().sqrt()
}

/// The Eq.-13 tight effect of a ball space for a unit Bloch axis:
/// `Ω(ψ) = (1 + ν̂ᵀψ̂)/2`.
pub fn ball_effect(axis: &DVector<f64>) -> Effect {
    let d = axis.len();
    let mut dual = DVector::zeros(d + 1);
    dual[0] = (1.0 - axis.iter().sum::<f64>()) / 2.0;
    for i in 0..d {
        dual[i + 1] = axis[i];
    }
    Effect::new(dual)
}

/// Which effects a theory admits as measurement outcomes.
#[derive(Debug, Clone)]
pub enum EffectPolicy {
    AllEffects,
    GeneratedByLocalProducts,
    ExplicitList(Vec<Effect>),
}

/// How joint state spaces are formed for this theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositeRule {
    LocalTomographyMax,
    LocalTomographyMin,
    Quantum,
    Classical,
}

/// A named convex state space with its effect policy and transformation
/// group.
#[derive(Debug, Clone)]
pub struct TheoryInstance {
    pub name: String,
    pub space: StateSpaceDescriptor,
    pub effect_policy: EffectPolicy,
    pub group: GroupSpec,
    pub composite_rule: CompositeRule,
}

impl TheoryInstance {
    /// A transformation in standard-representation coordinates, drawn
    /// uniformly (finite groups) or Haar-sampled (named groups).
    pub fn sample_transformation<R: Rng>(&self, rng: &mut R) -> Result<LinearMap> {
        match &self.group.kind {
            GroupKind::FiniteList(els) => {
                let i = rng.random_range(0..els.len());
                Ok(els[i].clone())
            }
            GroupKind::Generated { generators, cap } => {
                let els = groups::close_group(generators, *cap)?;
                let i = rng.random_range(0..els.len());
                Ok(els[i].clone())
            }
            GroupKind::Named(named) => named_standard_rep_sample(named, self.space.dim(), rng),
        }
    }

    /// The maximally mixed state of the instance (closed form).
    pub fn maximally_mixed(&self) -> StateVector {
        self.space.maximally_mixed_closed_form()
    }
}

/// Lifts a Bloch-acting orthogonal matrix to standard-representation
/// coordinates: `p ↦ ½(1 − Σⱼ Rᵢⱼ) + Σⱼ Rᵢⱼ pⱼ`.
pub fn bloch_to_standard_rep(r: &nalgebra::DMatrix<f64>) -> LinearMap {
    let d = r.nrows();
    let mut m = nalgebra::DMatrix::zeros(d + 1, d + 1);
    m[(0, 0)] = 1.0;
    for i in 0..d {
        let row_sum: f64 = (0..d).map(|j| r[(i, j)]).sum();
        m[(i + 1, 0)] = (1.0 - row_sum) / 2.0;
        for j in 0..d {
            m[(i + 1, j + 1)] = r[(i, j)];
        }
    }
    LinearMap::new(m)
}

fn named_standard_rep_sample<R: Rng>(
    named: &NamedGroup,
    dim: usize,
    rng: &mut R,
) -> Result<LinearMap> {
    match named {
        NamedGroup::SpecialOrthogonal(n) => {
            if *n != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: *n,
                });
            }
            Ok(bloch_to_standard_rep(&groups::haar_rotation(*n, rng)))
        }
        NamedGroup::Orthogonal(n) => {
            if *n != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: *n,
                });
            }
            Ok(bloch_to_standard_rep(&groups::haar_orthogonal(*n, rng)))
        }
        NamedGroup::SuConjugation(cdim) => {
            let rep = QuantumRep::new(*cdim)?;
            if rep.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: rep.dim(),
                });
            }
            let u = hermitian::haar_su(*cdim, rng);
            rep.rep_matrix(&u)
        }
        NamedGroup::Su3Block => Err(Error::domain(
            "the SU(3) block representation is not an instance group",
        )),
    }
}

// ---------------------------------------------------------------------------
// Relative-interior test (used by the lp task module and audits)
// ---------------------------------------------------------------------------

/// True iff the state lies in the relative interior of the space. For
/// polytopes this is the LP test `max t s.t. ψ = Σλᵥv, Σλ = 1, λᵥ ≥ t`
/// with a strictly positive optimum; balls and quantum slices use strict
/// margins on the norm and the spectrum.
pub fn is_completely_mixed_in(space: &StateSpaceDescriptor, psi: &StateVector) -> Result<bool> {
    let margin = 1e-9;
    match space.rep() {
        SpaceRep::VertexList(vertices) => {
            let n = vertices.len();
            // variables: λ_1..λ_n, t; maximize t
            let mut objective = vec![0.0; n + 1];
            objective[n] = 1.0;
            let mut p = LpProblem::maximize(n + 1, objective);
            for v in 0..n {
                p.set_bounds(v, 0.0, 1.0);
            }
            p.set_bounds(n, -1.0, 1.0);
            for row in 0..psi.len() {
                let mut coeffs: Vec<f64> = vertices.iter().map(|g| g.coords()[row]).collect();
                coeffs.push(0.0);
                p.constrain(coeffs, Relation::Eq, psi.coords()[row]);
            }
            let mut sum_row = vec![1.0; n];
            sum_row.push(0.0);
            p.constrain(sum_row, Relation::Eq, 1.0);
            for v in 0..n {
                let mut coeffs = vec![0.0; n + 1];
                coeffs[v] = 1.0;
                coeffs[n] = -1.0;
                p.constrain(coeffs, Relation::Ge, 0.0);
            }
            let r = solve(&p, 1e-9)?;
            match r.status {
                LpStatus::Optimal => Ok(r.value.unwrap_or(0.0) > margin),
                _ => Ok(false),
            }
        }
        SpaceRep::Ball => Ok(bloch_norm(psi) < 1.0 - margin),
        SpaceRep::PsdConeSlice { capacity } => {
            let rep = QuantumRep::new(*capacity)?;
            let rho = rep.to_matrix(psi)?;
            Ok(hermitian::min_eigenvalue(&rho) > margin)
        }
        SpaceRep::QubitPairTensor => {
            let rho = hermitian::l_map_tensor(psi, 2)?;
            Ok(hermitian::min_eigenvalue(&rho) > margin)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::seeded_rng;

    fn classical_vertices(c: usize) -> Vec<StateVector> {
        (0..c)
            .map(|b| {
                let probs: Vec<f64> =
                    (1..c).map(|i| if i == b { 1.0 } else { 0.0 }).collect();
                StateVector::from_probabilities(&probs)
            })
            .collect()
    }

    #[test]
    fn classical_membership() {
        let space = StateSpaceDescriptor::vertex_list(classical_vertices(3)).unwrap();
        // p(1) = 0.2, p(2) = 0.3, p(3) = 0.5 implicit
        let psi = StateVector::from_probabilities(&[0.2, 0.3]);
        assert!(space.is_member(&psi, 1e-9).unwrap());
        let outside = StateVector::from_probabilities(&[0.8, 0.5]);
        assert!(!space.is_member(&outside, 1e-9).unwrap());
    }

    #[test]
    fn ball_membership() {
        let space = StateSpaceDescriptor::ball(3);
        let inside = StateVector::from_probabilities(&[0.7, 0.5, 0.5]);
        assert!(space.is_member(&inside, 1e-9).unwrap());
        // ψ̂ = (1.01, 0, 0)
        let outside = StateVector::from_probabilities(&[(1.0 + 1.01) / 2.0, 0.5, 0.5]);
        assert!(!space.is_member(&outside, 1e-9).unwrap());
    }

    #[test]
    fn quantum_membership_of_pure_state() {
        // ψ̂ = (0.6, 0, 0.8): eigenvalues of ½(𝕀 + 0.6σ¹ + 0.8σ³) are {0,1}
        let space = StateSpaceDescriptor::quantum(2).unwrap();
        let psi = StateVector::from_probabilities(&[0.8, 0.5, 0.9]);
        assert!(space.is_member(&psi, 1e-9).unwrap());
        assert!(space.is_pure(&psi, 1e-9).unwrap());
        // and scaling the Bloch vector out of the ball leaves the cone
        let bad = StateVector::from_probabilities(&[0.9, 0.5, 1.0]);
        assert!(!space.is_member(&bad, 1e-9).unwrap());
    }

    #[test]
    fn sampled_pures_are_members() {
        let mut rng = seeded_rng(42, 3);
        for space in [
            StateSpaceDescriptor::ball(3),
            StateSpaceDescriptor::ball(5),
            StateSpaceDescriptor::quantum(2).unwrap(),
            StateSpaceDescriptor::quantum(3).unwrap(),
        ] {
            for _ in 0..25 {
                let psi = space.sample_pure(&mut rng);
                assert!(space.is_member(&psi, 1e-9).unwrap());
                assert!(space.is_pure(&psi, 1e-7).unwrap());
            }
        }
    }

    #[test]
    fn effect_bounds_by_rep() {
        let ball = StateSpaceDescriptor::ball(3);
        let good = ball_effect(&DVector::from_row_slice(&[0.0, 0.0, 1.0]));
        assert!(ball.effect_within_bounds(&good, 1e-9).unwrap());
        let mut bad_dual = DVector::zeros(4);
        bad_dual[1] = 2.0;
        assert!(!ball
            .effect_within_bounds(&Effect::new(bad_dual), 1e-9)
            .unwrap());

        let quantum = StateSpaceDescriptor::quantum(2).unwrap();
        assert!(quantum.effect_within_bounds(&good, 1e-9).unwrap());
    }

    #[test]
    fn completely_mixed_cases() {
        let ball = StateSpaceDescriptor::ball(3);
        let center = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
        let surface = StateVector::from_probabilities(&[1.0, 0.5, 0.5]);
        assert!(is_completely_mixed_in(&ball, &center).unwrap());
        assert!(!is_completely_mixed_in(&ball, &surface).unwrap());

        let simplex = StateSpaceDescriptor::vertex_list(classical_vertices(3)).unwrap();
        // (0.5, 0.5, 0): on the boundary, p(3) = 0
        let boundary = StateVector::from_probabilities(&[0.5, 0.5]);
        assert!(!is_completely_mixed_in(&simplex, &boundary).unwrap());
        let interior = StateVector::from_probabilities(&[0.4, 0.3]);
        assert!(is_completely_mixed_in(&simplex, &interior).unwrap());
    }

    #[test]
    fn maximally_mixed_closed_forms() {
        let simplex = StateSpaceDescriptor::vertex_list(classical_vertices(4)).unwrap();
        let mu = simplex.maximally_mixed_closed_form();
        for i in 1..=3 {
            assert!((mu.coords()[i] - 0.25).abs() < 1e-12);
        }
        let ball = StateSpaceDescriptor::ball(3);
        assert!(bloch_norm(&ball.maximally_mixed_closed_form()) < 1e-12);
    }
}
