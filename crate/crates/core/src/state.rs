//! Core value types: states, effects, measurements and linear maps.
//!
//! A state is a point of a convex state space written in the redundant
//! coordinate form `(1, p(x_1), ..., p(x_d))`: the first component is
//! pinned to one so that effects and transformations act linearly and
//! composites can use the plain tensor-product formalism.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Default tolerance for membership and feasibility decisions.
pub const TOL_MEMBERSHIP: f64 = 1e-9;
/// Tolerance for pure linear-algebra identities.
pub const TOL_LINALG: f64 = 1e-12;

/// A normalized state in the redundant-coordinate representation.
///
/// Invariant: `coords[0] == 1` exactly. The remaining entries are the
/// fiducial outcome probabilities (all in `[0,1]` in the standard
/// representation of the built-in spaces).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    coords: DVector<f64>,
}

impl StateVector {
    /// Builds a state from its full coordinate vector; rejects vectors whose
    /// leading component is not exactly one.
    pub fn new(coords: DVector<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("state vector must be non-empty"));
        }
        if coords[0] != 1.0 {
            return Err(Error::domain(format!(
                "state vector must have leading component 1, found {}",
                coords[0]
            )));
        }
        Ok(StateVector { coords })
    }

    /// Builds the state `(1, p_1, ..., p_d)` from the fiducial probabilities.
    pub fn from_probabilities(probs: &[f64]) -> Self {
        let mut coords = DVector::zeros(probs.len() + 1);
        coords[0] = 1.0;
        for (i, p) in probs.iter().enumerate() {
            coords[i + 1] = *p;
        }
        StateVector { coords }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    /// Number of fiducial probabilities (the affine dimension upper bound).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Full ambient length `d + 1`.
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The fiducial probability block `coords[1..]`.
    pub fn fiducial(&self) -> DVector<f64> {
        self.coords.rows(1, self.coords.len() - 1).into_owned()
    }

    /// Applies a linear map, re-pinning the leading component when the image
    /// deviates by floating-point noise only.
    pub fn apply(&self, map: &LinearMap) -> Result<StateVector> {
        if map.matrix().ncols() != self.len() {
            return Err(Error::Dimension {
                expected: map.matrix().ncols(),
                found: self.len(),
            });
        }
        let mut out = map.matrix() * &self.coords;
        if (out[0] - 1.0).abs() > 1e-7 {
            return Err(Error::domain(format!(
                "map does not preserve normalization: image leading component {}",
                out[0]
            )));
        }
        out[0] = 1.0;
        StateVector::new(out)
    }

    /// Euclidean distance between coordinate vectors.
    pub fn distance(&self, other: &StateVector) -> f64 {
        (&self.coords - &other.coords).norm()
    }
}

/// A linear functional returning outcome probabilities on a state space.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    dual: DVector<f64>,
}

impl Effect {
    pub fn new(dual: DVector<f64>) -> Self {
        Effect { dual }
    }

    /// The unit effect `(1, 0, ..., 0)`: evaluates to one on every state.
    pub fn unit(dim: usize) -> Self {
        let mut dual = DVector::zeros(dim + 1);
        dual[0] = 1.0;
        Effect { dual }
    }

    /// The zero effect.
    pub fn zero(dim: usize) -> Self {
        Effect {
            dual: DVector::zeros(dim + 1),
        }
    }

    /// The effect reading the `i`-th fiducial probability (1-based index
    /// into the coordinate vector).
    pub fn fiducial(dim: usize, i: usize) -> Self {
        let mut dual = DVector::zeros(dim + 1);
        dual[i] = 1.0;
        Effect { dual }
    }

    pub fn dual(&self) -> &DVector<f64> {
        &self.dual
    }

    pub fn len(&self) -> usize {
        self.dual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dual.is_empty()
    }

    /// Complement `1 - Ω`.
    pub fn complement(&self) -> Effect {
        let mut dual = -self.dual.clone();
        dual[0] += 1.0;
        Effect { dual }
    }

    /// Pointwise sum of two effects.
    pub fn sum(&self, other: &Effect) -> Effect {
        Effect {
            dual: &self.dual + &other.dual,
        }
    }
}

/// Evaluates an effect on a state: the probability of the associated
/// measurement outcome. Out-of-range values are returned as-is; they signal
/// an invariant violation upstream, not a condition to clamp away.
pub fn evaluate_effect(e: &Effect, psi: &StateVector) -> Result<f64> {
    if e.len() != psi.len() {
        return Err(Error::Dimension {
            expected: e.len(),
            found: psi.len(),
        });
    }
    Ok(e.dual().dot(psi.coords()))
}

/// An ordered collection of effects summing to the unit effect.
#[derive(Debug, Clone)]
pub struct Measurement {
    effects: Vec<Effect>,
}

impl Measurement {
    pub fn new(effects: Vec<Effect>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::domain("measurement needs at least one effect"));
        }
        let dim = effects[0].len();
        if effects.iter().any(|e| e.len() != dim) {
            return Err(Error::domain("measurement effects have mixed dimensions"));
        }
        Ok(Measurement { effects })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }

    /// Max-norm deviation of the effect sum from the unit effect.
    pub fn completeness_residual(&self) -> f64 {
        let dim = self.effects[0].len() - 1;
        let mut total = Effect::zero(dim);
        for e in &self.effects {
            total = total.sum(e);
        }
        let unit = Effect::unit(dim);
        (total.dual() - unit.dual()).amax()
    }

    /// Outcome distribution on a state.
    pub fn probabilities(&self, psi: &StateVector) -> Result<Vec<f64>> {
        self.effects
            .iter()
            .map(|e| evaluate_effect(e, psi))
            .collect()
    }
}

/// A real matrix acting on state coordinates (square for transformations,
/// rectangular for equivalence maps between spaces).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    matrix: DMatrix<f64>,
}

impl LinearMap {
    pub fn new(matrix: DMatrix<f64>) -> Self {
        LinearMap { matrix }
    }

    pub fn identity(n: usize) -> Self {
        LinearMap {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Kronecker product, matching the tensor layout of composite states.
    pub fn kron(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        LinearMap {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// Max-norm residual of `MᵀM - I`; zero for orthogonal matrices.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.matrix.nrows();
        let gram = self.matrix.transpose() * &self.matrix;
        (gram - DMatrix::identity(n, n)).amax()
    }
}

/// Convex combination `q ψ₁ + (1-q) ψ₂`.
pub fn mix(psi1: &StateVector, psi2: &StateVector, q: f64) -> Result<StateVector> {
    if psi1.len() != psi2.len() {
        return Err(Error::Dimension {
            expected: psi1.len(),
            found: psi2.len(),
        });
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!("mixing weight {q} outside [0,1]")));
    }
    let coords = psi1.coords() * q + psi2.coords() * (1.0 - q);
    // q·1 + (1-q)·1 = 1 up to rounding; re-pin exactly.
    let mut coords = coords;
    coords[0] = 1.0;
    StateVector::new(coords)
}
