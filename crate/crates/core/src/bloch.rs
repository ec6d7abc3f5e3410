//! Bloch representations: centered affine coordinates in which the
//! maximally mixed state sits at the origin. For a single gbit this is the
//! familiar vector `ψ̂ⁱ = 2(p(xᵢ) − μⁱ)`; for two gbits the triple
//! `[α, β, C]` with the correlation matrix
//! `Cⁱʲ = 4p(xᵢ,yⱼ) − 2p(xᵢ) − 2p(yⱼ) + 1`.

use nalgebra::{DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::state::{LinearMap, StateVector};

/// Bloch coordinates of a gbit state (length `d₂`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    v: DVector<f64>,
}

impl BlochVector {
    pub fn new(v: DVector<f64>) -> Self {
        BlochVector { v }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        BlochVector {
            v: DVector::from_row_slice(v),
        }
    }

    pub fn zero(d2: usize) -> Self {
        BlochVector {
            v: DVector::zeros(d2),
        }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.v
    }

    pub fn norm(&self) -> f64 {
        self.v.norm()
    }

    pub fn dim(&self) -> usize {
        self.v.len()
    }
}

/// Bloch representation of a gbit state relative to the maximally mixed
/// state `mu`: `ψ̂ⁱ = 2(p(xᵢ) − μⁱ)`.
pub fn to_bloch(psi: &StateVector, mu: &StateVector) -> Result<BlochVector> {
    if psi.len() != mu.len() {
        return Err(Error::Dimension {
            expected: mu.len(),
            found: psi.len(),
        });
    }
    let v = (psi.fiducial() - mu.fiducial()) * 2.0;
    Ok(BlochVector { v })
}

/// Inverse of [`to_bloch`]: `p(xᵢ) = μⁱ + ψ̂ⁱ/2`.
pub fn from_bloch(b: &BlochVector, mu: &StateVector) -> Result<StateVector> {
    if b.dim() + 1 != mu.len() {
        return Err(Error::Dimension {
            expected: mu.len(),
            found: b.dim() + 1,
        });
    }
    let probs: Vec<f64> = mu
        .fiducial()
        .iter()
        .zip(b.v.iter())
        .map(|(m, x)| m + x / 2.0)
        .collect();
    Ok(StateVector::from_probabilities(&probs))
}

/// The `[α, β, C]` representation of a bipartite gbit state.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoGbitBloch {
    pub alpha: Vector3<f64>,
    pub beta: Vector3<f64>,
    pub corr: Matrix3<f64>,
}

impl TwoGbitBloch {
    pub fn new(alpha: Vector3<f64>, beta: Vector3<f64>, corr: Matrix3<f64>) -> Self {
        TwoGbitBloch { alpha, beta, corr }
    }

    /// `|α|² + |β|² + tr(CᵀC)`: equals 3 exactly on pure states.
    pub fn norm_squared(&self) -> f64 {
        self.alpha.norm_squared() + self.beta.norm_squared() + self.corr.norm_squared()
    }

    /// All entries of `α`, `β`, `C` must lie in `[-1, 1]`.
    pub fn entry_bound_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in self.alpha.iter().chain(self.beta.iter()).chain(self.corr.iter()) {
            worst = worst.max(x.abs() - 1.0);
        }
        worst.max(0.0)
    }

    /// Joint state in the standard tensor representation (16 coordinates,
    /// index `(i,j) → 4i + j`): inverts the defining relations, using
    /// `p(xᵢ,yⱼ) = (1 + αᵢ + βⱼ + Cⁱʲ)/4`.
    pub fn to_joint_state(&self) -> StateVector {
        let mut coords = DVector::zeros(16);
        coords[0] = 1.0;
        for i in 0..3 {
            coords[(i + 1) * 4] = (1.0 + self.alpha[i]) / 2.0;
            coords[i + 1] = (1.0 + self.beta[i]) / 2.0;
        }
        for i in 0..3 {
            for j in 0..3 {
                coords[(i + 1) * 4 + (j + 1)] =
                    (1.0 + self.alpha[i] + self.beta[j] + self.corr[(i, j)]) / 4.0;
            }
        }
        StateVector::new(coords).expect("leading component is 1 by construction")
    }

    /// Euclidean distance in `[α, β, C]` coordinates.
    pub fn distance(&self, other: &TwoGbitBloch) -> f64 {
        ((self.alpha - other.alpha).norm_squared()
            + (self.beta - other.beta).norm_squared()
            + (self.corr - other.corr).norm_squared())
        .sqrt()
    }
}

/// Extracts `[α, β, C]` from a two-gbit joint state in the standard tensor
/// representation: `αⁱ = 2p(xᵢ) − 1`, `βʲ = 2p(yⱼ) − 1`,
/// `Cⁱʲ = 4p(xᵢ,yⱼ) − 2p(xᵢ) − 2p(yⱼ) + 1`.
pub fn two_gbit_bloch(psi_ab: &StateVector) -> Result<TwoGbitBloch> {
    if psi_ab.len() != 16 {
        return Err(Error::Dimension {
            expected: 16,
            found: psi_ab.len(),
        });
    }
    let c = psi_ab.coords();
    let mut alpha = Vector3::zeros();
    let mut beta = Vector3::zeros();
    let mut corr = Matrix3::zeros();
    for i in 0..3 {
        alpha[i] = 2.0 * c[(i + 1) * 4] - 1.0;
        beta[i] = 2.0 * c[i + 1] - 1.0;
    }
    for i in 0..3 {
        for j in 0..3 {
            let p_xy = c[(i + 1) * 4 + (j + 1)];
            let p_x = c[(i + 1) * 4];
            let p_y = c[j + 1];
            corr[(i, j)] = 4.0 * p_xy - 2.0 * p_x - 2.0 * p_y + 1.0;
        }
    }
    Ok(TwoGbitBloch { alpha, beta, corr })
}

/// Whether `|α|² + |β|² + tr(CᵀC)` sits within `tol` of 3, the value every
/// pure two-gbit state attains.
pub fn pure_norm_check(b: &TwoGbitBloch, tol: f64) -> bool {
    (b.norm_squared() - 3.0).abs() <= tol
}

/// The correlation entry computed from the four joint outcome
/// probabilities of one setting pair:
/// `C = p(x,y) − p(x,ȳ) − p(x̄,y) + p(x̄,ȳ)`.
pub fn correlation_from_outcomes(p_xy: f64, p_x: f64, p_y: f64) -> f64 {
    let p_x_noty = p_x - p_xy;
    let p_notx_y = p_y - p_xy;
    let p_notx_noty = 1.0 - p_x - p_y + p_xy;
    p_xy - p_x_noty - p_notx_y + p_notx_noty
}

/// Bloch form of a product state: `[â, b̂, â b̂ᵀ]` (rank-one correlation).
pub fn product_bloch(a: &Vector3<f64>, b: &Vector3<f64>) -> TwoGbitBloch {
    TwoGbitBloch {
        alpha: *a,
        beta: *b,
        corr: a * b.transpose(),
    }
}

/// The pure two-gbit family on the equator ball, in polar coordinates
/// `u ∈ [0, π)`, `v ∈ [0, 2π)`:
/// `α = β = (cos u, 0, 0)` and
/// `C = [[1,0,0],[0, sin u cos v, sin u sin v],[0, sin u sin v, −sin u cos v]]`.
pub fn equator_state(u: f64, v: f64) -> TwoGbitBloch {
    let a = Vector3::new(u.cos(), 0.0, 0.0);
    let corr = Matrix3::new(
        1.0,
        0.0,
        0.0,
        0.0,
        u.sin() * v.cos(),
        u.sin() * v.sin(),
        0.0,
        u.sin() * v.sin(),
        -u.sin() * v.cos(),
    );
    TwoGbitBloch {
        alpha: a,
        beta: a,
        corr,
    }
}

/// The equivalence map `τ ⊗ 1` with `τ(α₁,α₂,α₃) = (α₁,α₂,−α₃)`: a
/// reflection on the first factor ("partial transposition"). Negates the
/// third entry of `α` and the third row of `C`.
pub fn partial_transpose_equivalence(b: &TwoGbitBloch) -> TwoGbitBloch {
    let mut alpha = b.alpha;
    alpha[2] = -alpha[2];
    let mut corr = b.corr;
    for j in 0..3 {
        corr[(2, j)] = -corr[(2, j)];
    }
    TwoGbitBloch {
        alpha,
        beta: b.beta,
        corr,
    }
}

fn matrix3_from_map(map: &LinearMap) -> Result<Matrix3<f64>> {
    let m = map.matrix();
    if m.nrows() != 3 || m.ncols() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            found: m.nrows().max(m.ncols()),
        });
    }
    Ok(Matrix3::from_iterator(m.iter().copied()))
}

/// Local reversible transformations in the two-gbit Bloch representation:
/// `[Ĝ_A α, Ĝ_B β, Ĝ_A C Ĝ_Bᵀ]`. Inputs must be orthogonal 3×3 matrices.
pub fn local_action(ga: &LinearMap, gb: &LinearMap, b: &TwoGbitBloch) -> Result<TwoGbitBloch> {
    let tol = 1e-9;
    if ga.orthogonality_residual() > tol || gb.orthogonality_residual() > tol {
        return Err(Error::domain("local action requires orthogonal matrices"));
    }
    let ma = matrix3_from_map(ga)?;
    let mb = matrix3_from_map(gb)?;
    Ok(TwoGbitBloch {
        alpha: ma * b.alpha,
        beta: mb * b.beta,
        corr: ma * b.corr * mb.transpose(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    const TOL: f64 = 1e-12;

    #[test]
    fn maximally_mixed_maps_to_zero() {
        let mu = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
        let b = to_bloch(&mu, &mu).unwrap();
        assert!(b.norm() < TOL);
    }

    #[test]
    fn pole_bloch_coords() {
        let psi = StateVector::from_probabilities(&[1.0, 0.5, 0.5]);
        let mu = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
        let b = to_bloch(&psi, &mu).unwrap();
        assert_eq!(b.coords().as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn bloch_round_trip() {
        let mu = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
        let psi = StateVector::from_probabilities(&[0.9, 0.3, 0.4]);
        let back = from_bloch(&to_bloch(&psi, &mu).unwrap(), &mu).unwrap();
        assert!(back.distance(&psi) < TOL);
    }

    #[test]
    fn product_of_poles() {
        let z = Vector3::new(0.0, 0.0, 1.0);
        let b = product_bloch(&z, &z);
        assert_eq!(b.alpha, z);
        assert_eq!(b.beta, z);
        assert_eq!(b.corr, z * z.transpose());
        // rank-one correlation
        assert!((b.corr.rank(1e-12)) == 1);
    }

    #[test]
    fn joint_state_round_trip() {
        let b = equator_state(0.7, 1.3);
        let back = two_gbit_bloch(&b.to_joint_state()).unwrap();
        assert!(b.distance(&back) < TOL);
    }

    #[test]
    fn equator_at_zero_is_product_pole() {
        let b = equator_state(0.0, 0.0);
        let x = Vector3::new(1.0, 0.0, 0.0);
        let prod = product_bloch(&x, &x);
        assert!(b.distance(&prod) < TOL);
    }

    #[test]
    fn equator_at_half_pi() {
        let b = equator_state(FRAC_PI_2, 0.0);
        assert!(b.alpha.norm() < TOL);
        assert!(b.beta.norm() < TOL);
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!((b.corr - expected).norm() < TOL);
    }

    #[test]
    fn pure_norm_identity_on_equator_family() {
        // cos²u + cos²u + (1 + 2 sin²u) = 3 for all u, v.
        for k in 0..64 {
            let u = PI * (k as f64) / 64.0;
            let v = 2.0 * PI * ((k * 7 % 64) as f64) / 64.0;
            let b = equator_state(u, v);
            assert!((b.norm_squared() - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn norm_fails_for_maximally_mixed() {
        let b = TwoGbitBloch::new(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros());
        assert!((b.norm_squared() - 3.0).abs() > 1.0);
    }

    #[test]
    fn correlation_two_forms_agree() {
        let b = equator_state(1.1, 0.4);
        let joint = b.to_joint_state();
        let c = joint.coords();
        for i in 0..3 {
            for j in 0..3 {
                let p_xy = c[(i + 1) * 4 + (j + 1)];
                let p_x = c[(i + 1) * 4];
                let p_y = c[j + 1];
                let alt = correlation_from_outcomes(p_xy, p_x, p_y);
                assert!((alt - b.corr[(i, j)]).abs() < TOL);
            }
        }
    }

    #[test]
    fn partial_transpose_involution_and_equator_swap() {
        let plus = |v: f64| {
            // rotation-branch equator state: C lower block [[cos v, sin v], [-sin v, cos v]]
            let corr = Matrix3::new(1.0, 0.0, 0.0, 0.0, v.cos(), v.sin(), 0.0, -v.sin(), v.cos());
            TwoGbitBloch::new(Vector3::zeros(), Vector3::zeros(), corr)
        };
        let minus = |v: f64| {
            let corr = Matrix3::new(1.0, 0.0, 0.0, 0.0, v.cos(), v.sin(), 0.0, v.sin(), -v.cos());
            TwoGbitBloch::new(Vector3::zeros(), Vector3::zeros(), corr)
        };
        for k in 0..8 {
            let v = 2.0 * PI * (k as f64) / 8.0;
            let mapped = partial_transpose_equivalence(&plus(v));
            assert!(mapped.distance(&minus(v)) < TOL);
            let twice = partial_transpose_equivalence(&partial_transpose_equivalence(&plus(v)));
            assert!(twice.distance(&plus(v)) < TOL);
        }
    }

    #[test]
    fn partial_transpose_preserves_equatorial_products() {
        // product states with α₃ = 0 stay products with the same factors
        let a = Vector3::new(0.6, 0.8, 0.0);
        let b = Vector3::new(0.0, 1.0, 0.0);
        let mapped = partial_transpose_equivalence(&product_bloch(&a, &b));
        assert!(mapped.distance(&product_bloch(&a, &b)) < TOL);
    }

    #[test]
    fn local_action_identity_and_norm() {
        let id = LinearMap::identity(3);
        let b = equator_state(0.9, 2.0);
        let out = local_action(&id, &id, &b).unwrap();
        assert!(out.distance(&b) < TOL);

        // a rotation about z on one side preserves the norm identity
        let theta: f64 = 0.77;
        let rot = LinearMap::new(nalgebra::DMatrix::from_row_slice(
            3,
            3,
            &[
                theta.cos(),
                -theta.sin(),
                0.0,
                theta.sin(),
                theta.cos(),
                0.0,
                0.0,
                0.0,
                1.0,
            ],
        ));
        let out = local_action(&rot, &id, &b).unwrap();
        assert!((out.norm_squared() - b.norm_squared()).abs() < TOL);
    }

    #[test]
    fn local_action_rejects_non_orthogonal() {
        let bad = LinearMap::new(nalgebra::DMatrix::from_diagonal(
            &nalgebra::DVector::from_row_slice(&[1.0, 2.0, 1.0]),
        ));
        let id = LinearMap::identity(3);
        let b = equator_state(0.3, 0.0);
        assert!(local_action(&bad, &id, &b).is_err());
    }
}
