//! Hermitian representation of gbit states and its quantum machinery:
//! the map `𝓛[ψ] = ψ⁰(𝕀−σ¹−σ²−σ³)/2 + Σᵢ ψⁱσⁱ`, its tensor powers, the
//! SU(2)↔SO(3) covariance, and the generalized-Pauli representation used
//! by quantum state spaces with capacity up to four.
//!
//! Complex arithmetic is confined to this module; everything else in the
//! crate works with real coordinate vectors.

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, RngExt};

use crate::bloch::{two_gbit_bloch, TwoGbitBloch};
use crate::error::{Error, Result};
use crate::state::{Effect, LinearMap, StateVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Pauli matrices in the order `(σ¹, σ², σ³)`.
pub fn pauli(i: usize) -> CMatrix {
    match i {
        1 => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        2 => CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        3 => CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        _ => panic!("pauli index must be 1..=3"),
    }
}

pub fn identity_c(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Hermiticity residual `max |X - X†|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).camax()
}

/// A Hermitian matrix with validated symmetry.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    entries: CMatrix,
}

impl HermitianMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::Dimension {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        if hermiticity_residual(&entries) > 1e-12 {
            return Err(Error::domain("matrix is not Hermitian"));
        }
        // Symmetrize away representation noise.
        let sym = (&entries + entries.adjoint()) * c(0.5, 0.0);
        Ok(HermitianMatrix { entries: sym })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Real eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.entries)
    }
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Projector onto the span of eigenvectors with eigenvalue above `tol`.
pub fn support_projector(m: &CMatrix, tol: f64) -> CMatrix {
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let n = sym.nrows();
    let eig = sym.symmetric_eigen();
    let mut proj = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > tol {
            let v = eig.eigenvectors.column(k);
            proj += v * v.adjoint();
        }
    }
    proj
}

/// A special-unitary matrix (`U†U = 𝕀`, `det U = 1`, both within 1e−12).
#[derive(Debug, Clone)]
pub struct SpecialUnitary {
    entries: CMatrix,
}

impl SpecialUnitary {
    pub fn new(entries: CMatrix) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() {
            return Err(Error::Dimension {
                expected: n,
                found: entries.ncols(),
            });
        }
        let unitarity = (entries.adjoint() * &entries - identity_c(n)).camax();
        if unitarity > 1e-12 {
            return Err(Error::domain(format!(
                "matrix is not unitary (residual {unitarity:e})"
            )));
        }
        let det = entries.determinant();
        if (det - c(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::domain(format!("determinant {det} is not 1")));
        }
        Ok(SpecialUnitary { entries })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn conjugate(&self, x: &CMatrix) -> CMatrix {
        &self.entries * x * self.entries.adjoint()
    }
}

// ---------------------------------------------------------------------------
// The map 𝓛 and its tensor powers
// ---------------------------------------------------------------------------

/// 𝓛 applied to the coordinate basis vectors of ℝ⁴:
/// `𝓛[e₀] = (𝕀−σ¹−σ²−σ³)/2` and `𝓛[eᵢ] = σⁱ`.
fn l_basis() -> [CMatrix; 4] {
    let mut e0 = identity_c(2);
    for i in 1..=3 {
        e0 -= pauli(i);
    }
    e0 *= c(0.5, 0.0);
    [e0, pauli(1), pauli(2), pauli(3)]
}

/// The Hermitian representation of a gbit state (Eq. form
/// `𝓛[ψ] = ψ⁰(𝕀−σ¹−σ²−σ³)/2 + Σᵢψⁱσⁱ`, equivalently `½(𝕀 + Σᵢψ̂ⁱσⁱ)`).
pub fn l_map(psi: &StateVector) -> Result<CMatrix> {
    if psi.len() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: psi.len(),
        });
    }
    let basis = l_basis();
    let mut out = CMatrix::zeros(2, 2);
    for k in 0..4 {
        out += &basis[k] * c(psi.coords()[k], 0.0);
    }
    Ok(out)
}

/// `𝓛` from Bloch coordinates: `½(𝕀 + Σᵢ ψ̂ⁱ σⁱ)`.
pub fn l_map_bloch(bloch: &[f64; 3]) -> CMatrix {
    let mut out = identity_c(2);
    for i in 0..3 {
        out += pauli(i + 1) * c(bloch[i], 0.0);
    }
    out * c(0.5, 0.0)
}

/// Factor-wise tensor power `𝓛⊗m` applied to an m-gbit joint state in the
/// standard tensor representation (`4^m` coordinates, m ≤ 3).
pub fn l_map_tensor(psi: &StateVector, m: usize) -> Result<CMatrix> {
    if m == 0 || m > 3 {
        return Err(Error::domain("tensor power must have 1 <= m <= 3"));
    }
    let expected = 4usize.pow(m as u32);
    if psi.len() != expected {
        return Err(Error::Dimension {
            expected,
            found: psi.len(),
        });
    }
    let basis = l_basis();
    let dim = 1usize << m;
    let mut out = CMatrix::zeros(dim, dim);
    for idx in 0..expected {
        let coeff = psi.coords()[idx];
        if coeff == 0.0 {
            continue;
        }
        // digits of idx base 4, most significant = first factor
        let mut digits = [0usize; 3];
        let mut rest = idx;
        for d in (0..m).rev() {
            digits[d] = rest % 4;
            rest /= 4;
        }
        let mut term = basis[digits[0]].clone();
        for &dg in digits.iter().take(m).skip(1) {
            term = term.kronecker(&basis[dg]);
        }
        out += term * c(coeff, 0.0);
    }
    Ok(out)
}

/// Eq.-36 expansion of the two-gbit Hermitian representation from `[α,β,C]`:
/// `¼[𝕀⊗𝕀 + Σαⁱσⁱ⊗𝕀 + Σβʲ𝕀⊗σʲ + ΣCⁱʲσⁱ⊗σʲ]`.
pub fn two_gbit_hermitian(b: &TwoGbitBloch) -> CMatrix {
    let id = identity_c(2);
    let mut out = id.kronecker(&id);
    for i in 0..3 {
        out += pauli(i + 1).kronecker(&id) * c(b.alpha[i], 0.0);
        out += id.kronecker(&pauli(i + 1)) * c(b.beta[i], 0.0);
    }
    for i in 0..3 {
        for j in 0..3 {
            out += pauli(i + 1).kronecker(&pauli(j + 1)) * c(b.corr[(i, j)], 0.0);
        }
    }
    out * c(0.25, 0.0)
}

/// Both sides of the isometry identity
/// `tr(𝓛⊗²[ψ] 𝓛⊗²[ψ′]) = ¼ + ¼(αᵀα′ + βᵀβ′ + tr(CᵀC′))`.
pub fn isometry_check(psi: &StateVector, psi2: &StateVector) -> Result<(f64, f64)> {
    let rho = l_map_tensor(psi, 2)?;
    let rho2 = l_map_tensor(psi2, 2)?;
    let lhs = (&rho * &rho2).trace().re;
    let a = two_gbit_bloch(psi)?;
    let b = two_gbit_bloch(psi2)?;
    let inner =
        a.alpha.dot(&b.alpha) + a.beta.dot(&b.beta) + (a.corr.transpose() * b.corr).trace();
    Ok((lhs, 0.25 + 0.25 * inner))
}

// ---------------------------------------------------------------------------
// SU(2) <-> SO(3)
// ---------------------------------------------------------------------------

/// The rotation covering a special unitary: `Ĝʲⁱ = ½ tr(σʲ U σⁱ U†)`.
/// The result acts on Bloch coordinates and lies in SO(3).
pub fn su2_to_so3(u: &SpecialUnitary) -> Result<LinearMap> {
    if u.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: u.dim(),
        });
    }
    let mut g = DMatrix::zeros(3, 3);
    for i in 1..=3 {
        let conj = u.conjugate(&pauli(i));
        for j in 1..=3 {
            g[(j - 1, i - 1)] = 0.5 * (pauli(j) * &conj).trace().re;
        }
    }
    Ok(LinearMap::new(g))
}

/// Axis-angle lift SO(3) → SU(2); `su2_to_so3` of the result recovers the
/// input rotation.
pub fn so3_to_su2(r: &LinearMap) -> Result<SpecialUnitary> {
    let m = r.matrix();
    if m.nrows() != 3 || m.ncols() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            found: m.nrows(),
        });
    }
    if r.orthogonality_residual() > 1e-9 || m.determinant() < 0.0 {
        return Err(Error::domain("input is not a rotation matrix"));
    }
    let cos_theta = ((m.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    let axis = if theta < 1e-12 {
        [0.0, 0.0, 1.0]
    } else if (std::f64::consts::PI - theta).abs() < 1e-6 {
        // near θ = π the antisymmetric part degenerates; use (R + I)/2 = nnᵀ
        let b = (m + DMatrix::identity(3, 3)) * 0.5;
        let k = (0..3)
            .max_by(|&a, &bb| b[(a, a)].partial_cmp(&b[(bb, bb)]).unwrap())
            .unwrap();
        let col = b.column(k);
        let n = col.norm();
        [col[0] / n, col[1] / n, col[2] / n]
    } else {
        let raw = [
            m[(2, 1)] - m[(1, 2)],
            m[(0, 2)] - m[(2, 0)],
            m[(1, 0)] - m[(0, 1)],
        ];
        let n = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]).sqrt();
        [raw[0] / n, raw[1] / n, raw[2] / n]
    };
    let half = theta / 2.0;
    let mut u = identity_c(2) * c(half.cos(), 0.0);
    for i in 0..3 {
        u += pauli(i + 1) * c(0.0, -half.sin() * axis[i]);
    }
    SpecialUnitary::new(u)
}

/// Verifies the commuting square `𝓛[G(ψ)] = U 𝓛[ψ] U†` for a gbit state;
/// returns the max-norm residual.
pub fn covariance_residual(u: &SpecialUnitary, psi: &StateVector) -> Result<f64> {
    let g = su2_to_so3(u)?;
    let bloch: Vec<f64> = psi.fiducial().iter().map(|p| 2.0 * p - 1.0).collect();
    let rotated = g.matrix() * DVector::from_row_slice(&bloch);
    let lhs = l_map_bloch(&[rotated[0], rotated[1], rotated[2]]);
    let rhs = u.conjugate(&l_map(psi)?);
    Ok((lhs - rhs).camax())
}

/// Boolean form of [`covariance_residual`] at the library's linear-algebra
/// tolerance.
pub fn covariance_check(u: &SpecialUnitary, psi: &StateVector) -> Result<bool> {
    Ok(covariance_residual(u, psi)? <= 1e-12)
}

/// Two-gbit version: local unitaries against the Kronecker action in the
/// standard representation; returns the max-norm residual.
pub fn covariance_residual_pair(
    ua: &SpecialUnitary,
    ub: &SpecialUnitary,
    psi_ab: &StateVector,
) -> Result<f64> {
    let ta = qubit_rep_matrix(ua)?;
    let tb = qubit_rep_matrix(ub)?;
    let moved = psi_ab.apply(&ta.kron(&tb))?;
    let lhs = l_map_tensor(&moved, 2)?;
    let w = ua.entries().kronecker(ub.entries());
    let rhs = &w * l_map_tensor(psi_ab, 2)? * w.adjoint();
    Ok((lhs - rhs).camax())
}

// ---------------------------------------------------------------------------
// Standard-representation matrices of unitary conjugations
// ---------------------------------------------------------------------------

// Inverse of 𝓛 as fiducial-effect evaluations: ψ₀ = tr X, ψᵢ = tr(X Pᵢ)
// with Pᵢ = (𝕀+σⁱ)/2.
fn l_inv_qubit(x: &CMatrix) -> [f64; 4] {
    let mut out = [0.0; 4];
    out[0] = x.trace().re;
    for i in 1..=3 {
        let p = (identity_c(2) + pauli(i)) * c(0.5, 0.0);
        out[i] = (x * p).trace().re;
    }
    out
}

/// The real 4×4 matrix implementing `ρ ↦ UρU†` on standard-representation
/// coordinates of a single gbit.
pub fn qubit_rep_matrix(u: &SpecialUnitary) -> Result<LinearMap> {
    if u.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: u.dim(),
        });
    }
    let basis = l_basis();
    let mut m = DMatrix::zeros(4, 4);
    for (k, bk) in basis.iter().enumerate() {
        let img = l_inv_qubit(&u.conjugate(bk));
        for r in 0..4 {
            m[(r, k)] = img[r];
        }
    }
    Ok(LinearMap::new(m))
}

/// The real 16×16 matrix implementing `ρ ↦ WρW†` (W a two-qubit unitary)
/// on the standard tensor representation of two gbits.
pub fn two_qubit_rep_matrix(w: &CMatrix) -> Result<LinearMap> {
    if w.nrows() != 4 || w.ncols() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: w.nrows(),
        });
    }
    let unitarity = (w.adjoint() * w - identity_c(4)).camax();
    if unitarity > 1e-10 {
        return Err(Error::domain("two-qubit map must be unitary"));
    }
    let basis = l_basis();
    // projectors P_k with P_0 = 𝕀 for the inverse evaluations
    let mut projs = vec![identity_c(2)];
    for i in 1..=3 {
        projs.push((identity_c(2) + pauli(i)) * c(0.5, 0.0));
    }
    let mut m = DMatrix::zeros(16, 16);
    for k in 0..4 {
        for l in 0..4 {
            let img = w * basis[k].kronecker(&basis[l]) * w.adjoint();
            for a in 0..4 {
                for b in 0..4 {
                    m[(a * 4 + b, k * 4 + l)] = (&img * projs[a].kronecker(&projs[b])).trace().re;
                }
            }
        }
    }
    Ok(LinearMap::new(m))
}

/// Tensor-representation coordinates of a two-qubit density matrix:
/// `ψ(k,l) = tr(ρ (P_k ⊗ P_l))` with `P_0 = 𝕀`, `P_i = (𝕀+σⁱ)/2`.
pub fn two_qubit_state_from_density(rho: &CMatrix) -> Result<StateVector> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho.nrows(),
        });
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("density matrix has trace {trace}")));
    }
    let mut projs = vec![identity_c(2)];
    for i in 1..=3 {
        projs.push((identity_c(2) + pauli(i)) * c(0.5, 0.0));
    }
    let mut coords = DVector::zeros(16);
    for k in 0..4 {
        for l in 0..4 {
            coords[k * 4 + l] = (rho * projs[k].kronecker(&projs[l])).trace().re;
        }
    }
    coords[0] = 1.0;
    StateVector::new(coords)
}

/// Effect dual in two-qubit tensor coordinates for an operator
/// `0 ≤ M ≤ 𝕀`: `Ω(ψ) = tr(M ρ(ψ)) = Σ ψ(k,l) tr(M (L_k ⊗ L_l))`.
pub fn two_qubit_effect_dual(m: &CMatrix) -> Result<Effect> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: m.nrows(),
        });
    }
    let basis = l_basis();
    let mut dual = DVector::zeros(16);
    for k in 0..4 {
        for l in 0..4 {
            dual[k * 4 + l] = (m * basis[k].kronecker(&basis[l])).trace().re;
        }
    }
    Ok(Effect::new(dual))
}

/// Inverse of [`two_qubit_effect_dual`]: reconstructs the operator from a
/// tensor-coordinate dual, `M = Σ e(k,l) P_k ⊗ P_l`.
pub fn two_qubit_operator_from_dual(e: &Effect) -> Result<CMatrix> {
    if e.len() != 16 {
        return Err(Error::Dimension {
            expected: 16,
            found: e.len(),
        });
    }
    let mut projs = vec![identity_c(2)];
    for i in 1..=3 {
        projs.push((identity_c(2) + pauli(i)) * c(0.5, 0.0));
    }
    let mut m = CMatrix::zeros(4, 4);
    for k in 0..4 {
        for l in 0..4 {
            let coeff = e.dual()[k * 4 + l];
            if coeff != 0.0 {
                m += projs[k].kronecker(&projs[l]) * c(coeff, 0.0);
            }
        }
    }
    Ok(m)
}

/// A Haar-random two-qubit pure state in tensor coordinates.
pub fn sample_two_qubit_pure<R: Rng>(rng: &mut R) -> StateVector {
    let mut v = CMatrix::zeros(4, 1);
    loop {
        for i in 0..4 {
            v[(i, 0)] = c(gauss(rng), gauss(rng));
        }
        let n = v.norm();
        if n > 1e-6 {
            v /= c(n, 0.0);
            break;
        }
    }
    let rho = &v * v.adjoint();
    two_qubit_state_from_density(&rho).expect("projector is a valid state")
}

// ---------------------------------------------------------------------------
// Generalized Pauli representation for quantum state spaces, c <= 4
// ---------------------------------------------------------------------------

/// The generalized-Pauli (Gell-Mann style) representation of a quantum
/// state space with capacity `c`. Fiducial probabilities are
/// `p_k = (1 + tr(ρ B_k))/2` where the basis operators `B_k` are rescaled
/// to unit spectral radius so every `p_k` is an honest probability.
pub struct QuantumRep {
    capacity: usize,
    basis: Vec<CMatrix>,
    /// `tr(B_k²)` for each basis operator.
    norms: Vec<f64>,
}

impl QuantumRep {
    pub fn new(capacity: usize) -> Result<Self> {
        if !(2..=4).contains(&capacity) {
            return Err(Error::domain(format!(
                "quantum capacity {capacity} outside supported range 2..=4"
            )));
        }
        let basis = gell_mann_basis(capacity);
        let norms = basis.iter().map(|b| (b * b).trace().re).collect();
        Ok(QuantumRep {
            capacity,
            basis,
            norms,
        })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Dimension of the state space, `c² − 1`.
    pub fn dim(&self) -> usize {
        self.capacity * self.capacity - 1
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Density-matrix image of a standard-representation state.
    pub fn to_matrix(&self, psi: &StateVector) -> Result<CMatrix> {
        if psi.len() != self.dim() + 1 {
            return Err(Error::Dimension {
                expected: self.dim() + 1,
                found: psi.len(),
            });
        }
        let cdim = self.capacity;
        let mut rho = identity_c(cdim) * c(psi.coords()[0] / cdim as f64, 0.0);
        for (k, bk) in self.basis.iter().enumerate() {
            let coeff = (2.0 * psi.coords()[k + 1] - psi.coords()[0]) / self.norms[k];
            rho += bk * c(coeff, 0.0);
        }
        Ok(rho)
    }

    /// Standard-representation coordinates of a unit-trace density matrix.
    pub fn from_matrix(&self, rho: &CMatrix) -> Result<StateVector> {
        if rho.nrows() != self.capacity {
            return Err(Error::Dimension {
                expected: self.capacity,
                found: rho.nrows(),
            });
        }
        let trace = rho.trace().re;
        if (trace - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("density matrix has trace {trace}")));
        }
        let probs: Vec<f64> = self
            .basis
            .iter()
            .map(|b| ((rho * b).trace().re + 1.0) / 2.0)
            .collect();
        Ok(StateVector::from_probabilities(&probs))
    }

    /// Effect dual of a measurement operator `0 ≤ M ≤ 𝕀`:
    /// `Ω(ψ) = tr(M ρ(ψ))` as a linear functional on the coordinates.
    pub fn effect_dual(&self, m: &CMatrix) -> Result<Effect> {
        if m.nrows() != self.capacity {
            return Err(Error::Dimension {
                expected: self.capacity,
                found: m.nrows(),
            });
        }
        let mut dual = DVector::zeros(self.dim() + 1);
        let tr_m = m.trace().re / self.capacity as f64;
        let mut zero_part = tr_m;
        for (k, bk) in self.basis.iter().enumerate() {
            let overlap = (m * bk).trace().re / self.norms[k];
            dual[k + 1] = 2.0 * overlap;
            zero_part -= overlap;
        }
        dual[0] = zero_part;
        Ok(Effect::new(dual))
    }

    /// Inverse of [`Self::effect_dual`]: the measurement operator whose
    /// trace functional matches the given dual vector,
    /// `M = (e₀ + Σₖ eₖ/2)𝕀 + Σₖ (eₖ/2) Bₖ`.
    pub fn operator_from_dual(&self, e: &Effect) -> Result<CMatrix> {
        if e.len() != self.dim() + 1 {
            return Err(Error::Dimension {
                expected: self.dim() + 1,
                found: e.len(),
            });
        }
        let half_sum: f64 = (1..e.len()).map(|k| e.dual()[k] / 2.0).sum();
        let mut m = identity_c(self.capacity) * c(e.dual()[0] + half_sum, 0.0);
        for (k, bk) in self.basis.iter().enumerate() {
            m += bk * c(e.dual()[k + 1] / 2.0, 0.0);
        }
        Ok(m)
    }

    /// Standard-representation matrix of the conjugation `ρ ↦ UρU†`.
    pub fn rep_matrix(&self, u: &CMatrix) -> Result<LinearMap> {
        if u.nrows() != self.capacity {
            return Err(Error::Dimension {
                expected: self.capacity,
                found: u.nrows(),
            });
        }
        let n = self.dim() + 1;
        let mut m = DMatrix::zeros(n, n);
        // columns: images of the coordinate basis vectors under the
        // linear extension of ψ ↦ from_matrix(U to_matrix(ψ) U†)
        let cdim = self.capacity as f64;
        let mut l_cols: Vec<CMatrix> = Vec::with_capacity(n);
        let mut e0 = identity_c(self.capacity) * c(1.0 / cdim, 0.0);
        for (k, bk) in self.basis.iter().enumerate() {
            e0 -= bk * c(1.0 / self.norms[k], 0.0);
        }
        l_cols.push(e0);
        for (k, bk) in self.basis.iter().enumerate() {
            l_cols.push(bk * c(2.0 / self.norms[k], 0.0));
        }
        for (col, lx) in l_cols.iter().enumerate() {
            let img = u * lx * u.adjoint();
            let trace = img.trace().re;
            m[(0, col)] = trace;
            for (k, bk) in self.basis.iter().enumerate() {
                m[(k + 1, col)] = ((&img * bk).trace().re + trace) / 2.0;
            }
        }
        Ok(LinearMap::new(m))
    }
}

/// Generalized Gell-Mann basis for `c × c` Hermitian traceless operators,
/// rescaled so each element has spectral radius one. Ordering: symmetric
/// pair operators, antisymmetric pair operators, then diagonal operators;
/// for `c = 2` this is exactly `(σ¹, σ², σ³)`.
pub fn gell_mann_basis(cdim: usize) -> Vec<CMatrix> {
    let mut basis = Vec::with_capacity(cdim * cdim - 1);
    for j in 0..cdim {
        for k in (j + 1)..cdim {
            let mut m = CMatrix::zeros(cdim, cdim);
            m[(j, k)] = c(1.0, 0.0);
            m[(k, j)] = c(1.0, 0.0);
            basis.push(m);
        }
    }
    for j in 0..cdim {
        for k in (j + 1)..cdim {
            let mut m = CMatrix::zeros(cdim, cdim);
            m[(j, k)] = c(0.0, -1.0);
            m[(k, j)] = c(0.0, 1.0);
            basis.push(m);
        }
    }
    for l in 1..cdim {
        let mut m = CMatrix::zeros(cdim, cdim);
        for j in 0..l {
            m[(j, j)] = c(1.0 / l as f64, 0.0);
        }
        m[(l, l)] = c(-1.0, 0.0);
        basis.push(m);
    }
    basis
}

// ---------------------------------------------------------------------------
// Haar sampling
// ---------------------------------------------------------------------------

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Haar-distributed SU(2) element via the unit-quaternion parametrization.
pub fn haar_su2<R: Rng>(rng: &mut R) -> SpecialUnitary {
    loop {
        let x: [f64; 4] = [gauss(rng), gauss(rng), gauss(rng), gauss(rng)];
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let q: Vec<f64> = x.iter().map(|v| v / norm).collect();
        let mut u = identity_c(2) * c(q[0], 0.0);
        for i in 0..3 {
            u += pauli(i + 1) * c(0.0, -q[i + 1]);
        }
        return SpecialUnitary::new(u).expect("quaternion parametrization is special unitary");
    }
}

/// Haar-distributed SU(n) element: complex Ginibre matrix, QR with phase
/// fixing, then determinant normalization.
pub fn haar_su<R: Rng>(n: usize, rng: &mut R) -> CMatrix {
    let z = CMatrix::from_fn(n, n, |_, _| c(gauss(rng), gauss(rng)) * c(0.5f64.sqrt(), 0.0));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 1e-300 {
            rjj / c(rjj.norm(), 0.0)
        } else {
            c(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    let det = q.determinant();
    let angle = det.arg();
    let fix = C64::from_polar(1.0, -angle / n as f64);
    q * fix
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::equator_state;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    fn qubit_state(bloch: [f64; 3]) -> StateVector {
        StateVector::from_probabilities(&[
            (1.0 + bloch[0]) / 2.0,
            (1.0 + bloch[1]) / 2.0,
            (1.0 + bloch[2]) / 2.0,
        ])
    }

    #[test]
    fn l_map_of_maximally_mixed_is_half_identity() {
        let mu = qubit_state([0.0, 0.0, 0.0]);
        let rho = l_map(&mu).unwrap();
        assert!((rho - identity_c(2) * c(0.5, 0.0)).camax() < TOL);
    }

    #[test]
    fn l_map_of_z_pole_is_projector() {
        let up = qubit_state([0.0, 0.0, 1.0]);
        let rho = l_map(&up).unwrap();
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        assert!((rho - expected).camax() < TOL);
    }

    #[test]
    fn pure_states_map_to_rank_one_projectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let v = [gauss(&mut rng), gauss(&mut rng), gauss(&mut rng)];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            let bloch = [v[0] / n, v[1] / n, v[2] / n];
            let rho = l_map_bloch(&bloch);
            let eigs = hermitian_eigenvalues(&rho);
            assert!(eigs[0].abs() < 1e-12);
            assert!((eigs[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quantum_rep_matches_l_map_for_qubit() {
        let rep = QuantumRep::new(2).unwrap();
        let psi = qubit_state([0.6, 0.0, 0.8]);
        let a = rep.to_matrix(&psi).unwrap();
        let b = l_map(&psi).unwrap();
        assert!((a - b).camax() < TOL);
    }

    #[test]
    fn quantum_rep_round_trip_c3() {
        let rep = QuantumRep::new(3).unwrap();
        // a valid qutrit state: diag(0.5, 0.3, 0.2)
        let mut rho = CMatrix::zeros(3, 3);
        rho[(0, 0)] = c(0.5, 0.0);
        rho[(1, 1)] = c(0.3, 0.0);
        rho[(2, 2)] = c(0.2, 0.0);
        let psi = rep.from_matrix(&rho).unwrap();
        let back = rep.to_matrix(&psi).unwrap();
        assert!((back - rho).camax() < TOL);
        // all fiducial probabilities are honest probabilities
        for k in 1..psi.len() {
            assert!((-1e-12..=1.0 + 1e-12).contains(&psi.coords()[k]));
        }
    }

    #[test]
    fn gell_mann_unit_spectral_radius() {
        for cdim in 2..=4 {
            for b in gell_mann_basis(cdim) {
                assert!(hermiticity_residual(&b) < TOL);
                assert!(b.trace().norm() < TOL);
                let eigs = hermitian_eigenvalues(&b);
                let radius = eigs
                    .iter()
                    .map(|e| e.abs())
                    .fold(0.0f64, f64::max);
                assert!((radius - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_state_tensor_image() {
        // 𝓛⊗2[φ⊗φ] = |φ⟩⟨φ| ⊗ |φ⟩⟨φ| for a pure product
        let phi = qubit_state([0.0, 0.0, 1.0]);
        let joint_coords: Vec<f64> = {
            let a = phi.coords();
            let mut v = Vec::with_capacity(16);
            for i in 0..4 {
                for j in 0..4 {
                    v.push(a[i] * a[j]);
                }
            }
            v
        };
        let joint = StateVector::new(DVector::from_row_slice(&joint_coords)).unwrap();
        let rho = l_map_tensor(&joint, 2).unwrap();
        let single = l_map(&phi).unwrap();
        assert!((rho - single.kronecker(&single)).camax() < TOL);
    }

    #[test]
    fn eq36_matches_factorwise() {
        let b = equator_state(0.8, 1.9);
        let via_tensor = l_map_tensor(&b.to_joint_state(), 2).unwrap();
        let via_eq36 = two_gbit_hermitian(&b);
        assert!((via_tensor - via_eq36).camax() < TOL);
    }

    #[test]
    fn equator_image_is_rank_one_schmidt_projector() {
        // The equator family maps onto the Schmidt projectors
        // cos(u/2)|++⟩ ± sin(u/2)|−−⟩; with the Pauli conventions fixed
        // above, the +-branch sits at v = π and the −-branch at v = 0.
        let schmidt = |theta: f64| {
            let s = 0.5f64.sqrt();
            let plus = [c(s, 0.0), c(s, 0.0)];
            let minus = [c(-s, 0.0), c(s, 0.0)];
            let mut vec4 = [c(0.0, 0.0); 4];
            for i in 0..2 {
                for j in 0..2 {
                    vec4[i * 2 + j] = plus[i] * plus[j] * c(theta.cos(), 0.0)
                        + minus[i] * minus[j] * c(theta.sin(), 0.0);
                }
            }
            let v = CMatrix::from_row_slice(4, 1, &vec4);
            &v * v.adjoint()
        };
        let u = 0.9f64;
        for (v_angle, theta) in [(std::f64::consts::PI, u / 2.0), (0.0, -u / 2.0)] {
            let rho = two_gbit_hermitian(&equator_state(u, v_angle));
            let eigs = hermitian_eigenvalues(&rho);
            assert!(eigs[..3].iter().all(|e| e.abs() < 1e-12));
            assert!((eigs[3] - 1.0).abs() < 1e-12);
            assert!((rho - schmidt(theta)).camax() < 1e-12);
        }
    }

    #[test]
    fn isometry_identity_examples() {
        // pure product with itself: 1; pure vs maximally mixed: 1/4
        let pole = equator_state(0.0, 0.0);
        let (lhs, rhs) = isometry_check(&pole.to_joint_state(), &pole.to_joint_state()).unwrap();
        assert!((lhs - 1.0).abs() < TOL);
        assert!((rhs - 1.0).abs() < TOL);

        let mixed = TwoGbitBloch::new(
            nalgebra::Vector3::zeros(),
            nalgebra::Vector3::zeros(),
            nalgebra::Matrix3::zeros(),
        );
        let (lhs, rhs) = isometry_check(&pole.to_joint_state(), &mixed.to_joint_state()).unwrap();
        assert!((lhs - 0.25).abs() < TOL);
        assert!((rhs - 0.25).abs() < TOL);
    }

    #[test]
    fn su2_to_so3_identity_and_z_rotation() {
        let id = SpecialUnitary::new(identity_c(2)).unwrap();
        let g = su2_to_so3(&id).unwrap();
        assert!(g.matrix().is_identity(1e-12));

        // U = exp(-iθσ³/2) covers the rotation by θ about ẑ
        let theta = std::f64::consts::PI / 3.0;
        let u = SpecialUnitary::new(
            identity_c(2) * c((theta / 2.0).cos(), 0.0)
                + pauli(3) * c(0.0, -(theta / 2.0).sin()),
        )
        .unwrap();
        let g = su2_to_so3(&u).unwrap();
        let expected = DMatrix::from_row_slice(
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
        );
        assert!((g.matrix() - expected).amax() < 1e-12);
    }

    #[test]
    fn su2_to_so3_output_is_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let u = haar_su2(&mut rng);
            let g = su2_to_so3(&u).unwrap();
            assert!(g.orthogonality_residual() < 1e-12);
            assert!((g.matrix().determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn so3_lift_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let u = haar_su2(&mut rng);
            let g = su2_to_so3(&u).unwrap();
            let lifted = so3_to_su2(&g).unwrap();
            let g2 = su2_to_so3(&lifted).unwrap();
            assert!((g.matrix() - g2.matrix()).amax() < 1e-9);
        }
    }

    #[test]
    fn covariance_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let u = haar_su2(&mut rng);
            let psi = qubit_state([1.0, 0.0, 0.0]);
            assert!(covariance_residual(&u, &psi).unwrap() < 1e-12);
        }
    }

    #[test]
    fn haar_su_is_special_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=4 {
            let u = haar_su(n, &mut rng);
            assert!((u.adjoint() * &u - identity_c(n)).camax() < 1e-12);
            assert!((u.determinant() - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn qubit_rep_matrix_moves_states_correctly() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let u = haar_su2(&mut rng);
        let t = qubit_rep_matrix(&u).unwrap();
        let psi = qubit_state([0.3, 0.4, 0.5]);
        let moved = psi.apply(&t).unwrap();
        let lhs = l_map(&moved).unwrap();
        let rhs = u.conjugate(&l_map(&psi).unwrap());
        assert!((lhs - rhs).camax() < 1e-12);
    }
}
