//! Transformation-group machinery: group specifications and samplers,
//! Haar/ensemble averaging for maximally mixed states, Lemma-2
//! orthogonalization, transitivity audits, orbit-span rank experiments
//! and the pseudo-swap/cnot verification.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::state::LinearMap;

/// Which continuous matrix group a specification names. The first two act
/// on Bloch coordinates of a ball; the conjugation variant acts on quantum
/// standard-representation coordinates; the block form is the real
/// 6-dimensional representation of SU(3).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedGroup {
    SpecialOrthogonal(usize),
    Orthogonal(usize),
    SuConjugation(usize),
    Su3Block,
}

/// How a transformation group is given: an explicit closed list, a
/// generating set with a closure cap, or one of the named continuous
/// families with a sampler.
#[derive(Debug, Clone)]
pub enum GroupKind {
    FiniteList(Vec<LinearMap>),
    Generated {
        generators: Vec<LinearMap>,
        cap: usize,
    },
    Named(NamedGroup),
}

#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub sampler_seed: u64,
}

impl GroupSpec {
    pub fn finite(elements: Vec<LinearMap>) -> Self {
        GroupSpec {
            kind: GroupKind::FiniteList(elements),
            sampler_seed: 0,
        }
    }

    pub fn generated(generators: Vec<LinearMap>, cap: usize) -> Self {
        GroupSpec {
            kind: GroupKind::Generated { generators, cap },
            sampler_seed: 0,
        }
    }

    pub fn named(group: NamedGroup, seed: u64) -> Self {
        GroupSpec {
            kind: GroupKind::Named(group),
            sampler_seed: seed,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.kind, GroupKind::Named(_))
    }

    /// Elements of a finite or generated group; generated sets are closed
    /// under products up to the cap, with an error if closure is not
    /// reached.
    pub fn enumerate(&self) -> Result<Vec<LinearMap>> {
        match &self.kind {
            GroupKind::FiniteList(els) => Ok(els.clone()),
            GroupKind::Generated { generators, cap } => close_group(generators, *cap),
            GroupKind::Named(_) => Err(Error::domain(
                "continuous groups cannot be enumerated; sample instead",
            )),
        }
    }
}

// Quantized key for deduplicating group elements.
fn matrix_key(m: &DMatrix<f64>) -> Vec<i64> {
    m.iter().map(|v| (v * 1e9).round() as i64).collect()
}

/// Product/inverse closure of a generating set, capped. Inverses are
/// reached automatically because every element of a finite matrix group
/// has finite order.
pub fn close_group(generators: &[LinearMap], cap: usize) -> Result<Vec<LinearMap>> {
    let n = match generators.first() {
        Some(g) => g.matrix().nrows(),
        None => return Err(Error::domain("empty generating set")),
    };
    let mut elements: Vec<LinearMap> = vec![LinearMap::identity(n)];
    let mut seen = std::collections::HashSet::new();
    seen.insert(matrix_key(elements[0].matrix()));
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in generators {
                let prod = g.compose(f);
                let key = matrix_key(prod.matrix());
                if seen.insert(key) {
                    elements.push(prod.clone());
                    next.push(prod);
                    if elements.len() > cap {
                        return Err(Error::domain(format!(
                            "group closure exceeded cap {cap}"
                        )));
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(elements)
}

pub(crate) fn gauss<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform point on the unit sphere of `R^n`.
pub fn sample_unit_vector<R: Rng>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| gauss(rng));
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}

/// Haar-distributed element of O(n): real Ginibre matrix, QR, then sign
/// fixing on the diagonal of R.
pub fn haar_orthogonal<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let z = DMatrix::from_fn(n, n, |_, _| gauss(rng));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Haar-distributed element of SO(n): orthogonal sample with the first
/// column flipped when the determinant is negative.
pub fn haar_rotation<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut q = haar_orthogonal(n, rng);
    if q.determinant() < 0.0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// The real 6-dimensional representation of SU(3):
/// `[[re U, im U], [−im U, re U]]`.
pub fn su3_block(u: &crate::hermitian::CMatrix) -> DMatrix<f64> {
    assert_eq!(u.nrows(), 3);
    let mut h = DMatrix::zeros(6, 6);
    for i in 0..3 {
        for j in 0..3 {
            h[(i, j)] = u[(i, j)].re;
            h[(i, j + 3)] = u[(i, j)].im;
            h[(i + 3, j)] = -u[(i, j)].im;
            h[(i + 3, j + 3)] = u[(i, j)].re;
        }
    }
    h
}

/// Deterministic per-purpose RNG stream.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

// ---------------------------------------------------------------------------
// Maximally mixed states
// ---------------------------------------------------------------------------

use crate::composite::product_state;
use crate::hermitian::{self, QuantumRep};
use crate::instances;
use crate::lp::{capacity, find_distinguishing_measurement, Distinguishing};
use crate::space::{SpaceRep, TheoryInstance};
use crate::state::{Measurement, StateVector};

/// The group-averaged state with its certification data.
#[derive(Debug, Clone)]
pub struct MaxMixedReport {
    pub state: StateVector,
    /// Standard error of the Monte Carlo average (zero for exact averages).
    pub stderr: f64,
    /// Largest displacement of the state under further sampled elements.
    pub invariance_residual: f64,
    pub method: &'static str,
}

/// The maximally mixed state `μ = ∫ G(ψ) dG`: exact orbit average for
/// finite groups, closed form plus Monte Carlo cross-check for the named
/// continuous ones. Fails with `ConvergenceError` when the invariance
/// certificate does not hold within ten standard errors.
pub fn maximally_mixed(
    instance: &TheoryInstance,
    n_samples: usize,
    seed: u64,
) -> Result<MaxMixedReport> {
    let mut rng = seeded_rng(seed, 0x3a);
    let (state, stderr, method) = if instance.group.is_finite() {
        let elements = instance.group.enumerate()?;
        let psi = instance.space.sample_pure(&mut rng);
        let mut acc = DVector::zeros(psi.len());
        for g in &elements {
            acc += psi.apply(g)?.coords();
        }
        acc /= elements.len() as f64;
        acc[0] = 1.0;
        (StateVector::new(acc)?, 0.0, "exact-orbit-average")
    } else {
        let closed = instance.space.maximally_mixed_closed_form();
        // Monte Carlo cross-check of the closed form
        let psi = instance.space.sample_pure(&mut rng);
        let n = n_samples.max(16);
        let mut sum = DVector::zeros(psi.len());
        let mut sum_sq = DVector::zeros(psi.len());
        for _ in 0..n {
            let g = instance.sample_transformation(&mut rng)?;
            let moved = psi.apply(&g)?;
            sum += moved.coords();
            sum_sq += moved.coords().component_mul(moved.coords());
        }
        let mean = &sum / n as f64;
        let var = &sum_sq / n as f64 - mean.component_mul(&mean);
        let stderr = (var.amax().max(0.0) / n as f64).sqrt();
        let gap = (&mean - closed.coords()).amax();
        if gap > 10.0 * stderr.max(1e-12) {
            return Err(Error::Convergence(format!(
                "Monte Carlo mean deviates from the closed form by {gap:e} (stderr {stderr:e})"
            )));
        }
        (closed, stderr, "closed-form-with-mc-cross-check")
    };
    // invariance certificate under further sampled elements
    let mut residual: f64 = 0.0;
    for _ in 0..100 {
        let g = instance.sample_transformation(&mut rng)?;
        residual = residual.max(state.apply(&g)?.distance(&state));
    }
    let allowance = if stderr > 0.0 { 10.0 * stderr } else { 1e-9 };
    if residual > allowance.max(1e-9) {
        return Err(Error::Convergence(format!(
            "average not invariant: residual {residual:e} exceeds {allowance:e}"
        )));
    }
    Ok(MaxMixedReport {
        state,
        stderr,
        invariance_residual: residual,
        method,
    })
}

/// Confirms that among the candidates only the maximally mixed state is
/// fixed by all (sampled or enumerated) group elements.
pub fn verify_unique_invariant(
    instance: &TheoryInstance,
    candidates: &[StateVector],
) -> Result<bool> {
    let mu = instance.maximally_mixed();
    let tol = 1e-7;
    let mut rng = seeded_rng(instance.group.sampler_seed, 0x1171);
    let elements: Vec<LinearMap> = if instance.group.is_finite() {
        instance.group.enumerate()?
    } else {
        (0..200)
            .map(|_| instance.sample_transformation(&mut rng))
            .collect::<Result<_>>()?
    };
    for cand in candidates {
        let invariant = elements
            .iter()
            .map(|g| cand.apply(g).map(|img| img.distance(cand)))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0f64, f64::max)
            < tol;
        let is_mu = cand.distance(&mu) < tol;
        if invariant != is_mu {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Lemma-2 orthogonalization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Orthogonalization {
    /// The symmetric positive matrix `S = √P` with `P = ∫ GᵀG dG`.
    pub s: LinearMap,
    /// Largest `‖(SGS⁻¹)ᵀ(SGS⁻¹) − 𝕀‖` over the checked elements.
    pub residual: f64,
    pub min_eigenvalue: f64,
    pub symmetry_residual: f64,
}

/// Conjugates a compact matrix group to an orthogonal one: averages
/// `GᵀG`, takes the principal square root, and certifies the result on
/// the supplied elements.
pub fn orthogonalize(elements: &[LinearMap]) -> Result<Orthogonalization> {
    let n = match elements.first() {
        Some(g) => g.matrix().nrows(),
        None => return Err(Error::domain("empty group")),
    };
    let mut p = DMatrix::zeros(n, n);
    for g in elements {
        p += g.matrix().transpose() * g.matrix();
    }
    p /= elements.len() as f64;
    let eig = p.clone().symmetric_eigen();
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig <= 0.0 {
        return Err(Error::domain(format!(
            "averaged Gram matrix is singular (min eigenvalue {min_eig:e})"
        )));
    }
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.sqrt()));
    let s = &eig.eigenvectors * sqrt_d * eig.eigenvectors.transpose();
    let s_inv = s
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::domain("square root not invertible"))?;
    let mut residual: f64 = 0.0;
    for g in elements {
        let conj = &s * g.matrix() * &s_inv;
        let gram = conj.transpose() * &conj;
        residual = residual.max((gram - DMatrix::identity(n, n)).amax());
    }
    let symmetry_residual = (&s - s.transpose()).amax();
    Ok(Orthogonalization {
        s: LinearMap::new(s),
        residual,
        min_eigenvalue: min_eig,
        symmetry_residual,
    })
}

/// Lemma-5 data: `c` pure distinguishable states whose uniform mixture is
/// the maximally mixed state, together with the distinguishing
/// measurement.
pub fn mixture_decomposition(
    instance: &TheoryInstance,
) -> Result<(Vec<StateVector>, Measurement, f64)> {
    let mu = instance.maximally_mixed();
    let candidates: Vec<StateVector> = match instance.space.rep() {
        SpaceRep::VertexList(_) => {
            let cert = capacity(
                &instance.space,
                8,
                instance.space.vertices().expect("vertex list"),
            )?;
            cert.states
        }
        SpaceRep::Ball => {
            let mut plus = vec![0.0; instance.space.dim()];
            plus[0] = 1.0;
            let minus: Vec<f64> = plus.iter().map(|x| -x).collect();
            vec![bloch_state(&plus), bloch_state(&minus)]
        }
        SpaceRep::PsdConeSlice { capacity: c } => instances::classical_vertices(*c)
            .iter()
            .map(|v| instances::embed_classical_in_quantum(v, *c))
            .collect::<Result<_>>()?,
        SpaceRep::QubitPairTensor => {
            // products of the four single-gbit basis poles
            let up = bloch_state(&[0.0, 0.0, 1.0]);
            let down = bloch_state(&[0.0, 0.0, -1.0]);
            vec![
                product_state(&up, &up),
                product_state(&up, &down),
                product_state(&down, &up),
                product_state(&down, &down),
            ]
        }
    };
    let measurement = match find_distinguishing_measurement(&candidates, &instance.space)? {
        Distinguishing::Found(m) => m,
        Distinguishing::Infeasible => {
            return Err(Error::domain(
                "mixture candidates are not distinguishable",
            ))
        }
    };
    let mut acc = DVector::zeros(mu.len());
    for s in &candidates {
        acc += s.coords();
    }
    acc /= candidates.len() as f64;
    let residual = (acc - mu.coords()).amax();
    Ok((candidates, measurement, residual))
}

fn bloch_state(b: &[f64]) -> StateVector {
    StateVector::from_probabilities(&b.iter().map(|x| (1.0 + x) / 2.0).collect::<Vec<_>>())
}

// ---------------------------------------------------------------------------
// Transitivity audits
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitivityVerdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone)]
pub struct TransitivityReport {
    pub verdict: TransitivityVerdict,
    /// For `Fail`: a pure-state pair no group element connects.
    pub witness: Option<(StateVector, StateVector)>,
    /// Largest mapping error over the verified pairs (constructive path).
    pub residual: f64,
    pub continuous_group: bool,
    pub pairs_checked: usize,
}

/// Checks Requirement-4 style transitivity: finite groups by exact orbit
/// computation on the pure states, continuous ones constructively by
/// building the element mapping each sampled pure pair.
pub fn transitivity_audit(
    instance: &TheoryInstance,
    n_pairs: usize,
    seed: u64,
) -> Result<TransitivityReport> {
    let mut rng = seeded_rng(seed, 0x44);
    match &instance.group.kind {
        GroupKind::FiniteList(_) | GroupKind::Generated { .. } => {
            let elements = instance.group.enumerate()?;
            let pures: Vec<StateVector> = match instance.space.rep() {
                SpaceRep::VertexList(_) => instance.space.vertices().unwrap().to_vec(),
                _ => (0..n_pairs.max(2)).map(|_| instance.space.sample_pure(&mut rng)).collect(),
            };
            // orbit of the first pure state
            let tol = 1e-9;
            let in_orbit = |target: &StateVector| -> Result<bool> {
                for g in &elements {
                    if pures[0].apply(g)?.distance(target) < tol {
                        return Ok(true);
                    }
                }
                Ok(false)
            };
            for target in pures.iter().skip(1) {
                if !in_orbit(target)? {
                    return Ok(TransitivityReport {
                        verdict: TransitivityVerdict::Fail,
                        witness: Some((pures[0].clone(), target.clone())),
                        residual: 0.0,
                        continuous_group: false,
                        pairs_checked: pures.len() - 1,
                    });
                }
            }
            Ok(TransitivityReport {
                verdict: TransitivityVerdict::Pass,
                witness: None,
                residual: 0.0,
                continuous_group: false,
                pairs_checked: pures.len() - 1,
            })
        }
        GroupKind::Named(named) => {
            let mut residual: f64 = 0.0;
            for _ in 0..n_pairs {
                let psi1 = instance.space.sample_pure(&mut rng);
                let psi2 = instance.space.sample_pure(&mut rng);
                let g = aligning_element(named, &psi1, &psi2)?;
                let moved = psi1.apply(&g)?;
                residual = residual.max(moved.distance(&psi2));
                if !instance.space.is_member(&moved, 1e-7)? {
                    return Err(Error::domain(
                        "aligning element left the state space",
                    ));
                }
            }
            if residual > 1e-7 {
                return Ok(TransitivityReport {
                    verdict: TransitivityVerdict::Fail,
                    witness: None,
                    residual,
                    continuous_group: true,
                    pairs_checked: n_pairs,
                });
            }
            Ok(TransitivityReport {
                verdict: TransitivityVerdict::Pass,
                witness: None,
                residual,
                continuous_group: true,
                pairs_checked: n_pairs,
            })
        }
    }
}

// Constructs the group element mapping pure psi1 to pure psi2 for the
// named continuous families.
fn aligning_element(
    named: &NamedGroup,
    psi1: &StateVector,
    psi2: &StateVector,
) -> Result<LinearMap> {
    match named {
        NamedGroup::SpecialOrthogonal(n) | NamedGroup::Orthogonal(n) => {
            if *n < 2 {
                return Err(Error::domain("rotation alignment needs dimension >= 2"));
            }
            let b1 = psi1.fiducial().map(|p| 2.0 * p - 1.0);
            let b2 = psi2.fiducial().map(|p| 2.0 * p - 1.0);
            let rot = rotation_between(&b1, &b2)?;
            Ok(crate::space::bloch_to_standard_rep(&rot))
        }
        NamedGroup::SuConjugation(c) => {
            let rep = QuantumRep::new(*c)?;
            let rho1 = rep.to_matrix(psi1)?;
            let rho2 = rep.to_matrix(psi2)?;
            let v1 = top_eigenvector(&rho1)?;
            let v2 = top_eigenvector(&rho2)?;
            let u = unitary_mapping(&v1, &v2)?;
            rep.rep_matrix(&u)
        }
        NamedGroup::Su3Block => Err(Error::domain(
            "the SU(3) block representation has no state space to align",
        )),
    }
}

/// A rotation (det +1) carrying unit vector `a` to unit vector `b`,
/// built from orthonormal completions of both vectors.
pub fn rotation_between(a: &DVector<f64>, b: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = a.len();
    if b.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: b.len(),
        });
    }
    let basis_a = complete_orthonormal(a)?;
    let mut basis_b = complete_orthonormal(b)?;
    let mut rot = &basis_b * basis_a.transpose();
    if rot.determinant() < 0.0 {
        // flip the last completion column of the b-basis; the image of a
        // (the first column) is untouched
        let last = n - 1;
        for i in 0..n {
            basis_b[(i, last)] = -basis_b[(i, last)];
        }
        rot = &basis_b * basis_a.transpose();
    }
    Ok(rot)
}

// Orthonormal basis whose first column is the given unit vector.
fn complete_orthonormal(v: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = v.len();
    let norm = v.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::domain("completion needs a unit vector"));
    }
    let mut basis = DMatrix::zeros(n, n);
    for i in 0..n {
        basis[(i, 0)] = v[i] / norm;
    }
    let mut col = 1;
    for k in 0..n {
        if col == n {
            break;
        }
        let mut cand = DVector::zeros(n);
        cand[k] = 1.0;
        // Gram-Schmidt against the accepted columns
        for j in 0..col {
            let proj: f64 = (0..n).map(|i| basis[(i, j)] * cand[i]).sum();
            for i in 0..n {
                cand[i] -= proj * basis[(i, j)];
            }
        }
        let cn = cand.norm();
        if cn > 1e-8 {
            for i in 0..n {
                basis[(i, col)] = cand[i] / cn;
            }
            col += 1;
        }
    }
    if col != n {
        return Err(Error::domain("failed to complete orthonormal basis"));
    }
    Ok(basis)
}

fn top_eigenvector(rho: &hermitian::CMatrix) -> Result<hermitian::CMatrix> {
    let sym = (rho + rho.adjoint()) * nalgebra::Complex::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let (k, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .ok_or_else(|| Error::domain("empty matrix"))?;
    let n = eig.eigenvectors.nrows();
    let mut out = hermitian::CMatrix::zeros(n, 1);
    for i in 0..n {
        out[(i, 0)] = eig.eigenvectors[(i, k)];
    }
    Ok(out)
}

// Special unitary with U v1 ∝ v2.
fn unitary_mapping(v1: &hermitian::CMatrix, v2: &hermitian::CMatrix) -> Result<hermitian::CMatrix> {
    let n = v1.nrows();
    let b1 = complete_unitary(v1)?;
    let b2 = complete_unitary(v2)?;
    let u = &b2 * b1.adjoint();
    // normalize the determinant into SU(n)
    let det = u.determinant();
    let fix = nalgebra::Complex::from_polar(1.0, -det.arg() / n as f64);
    Ok(u * fix)
}

fn complete_unitary(v: &hermitian::CMatrix) -> Result<hermitian::CMatrix> {
    let n = v.nrows();
    let mut basis = hermitian::CMatrix::zeros(n, n);
    let norm = v.norm();
    for i in 0..n {
        basis[(i, 0)] = v[(i, 0)] / nalgebra::Complex::new(norm, 0.0);
    }
    let mut col = 1;
    for k in 0..n {
        if col == n {
            break;
        }
        let mut cand = hermitian::CMatrix::zeros(n, 1);
        cand[(k, 0)] = nalgebra::Complex::new(1.0, 0.0);
        for j in 0..col {
            let mut proj = nalgebra::Complex::new(0.0, 0.0);
            for i in 0..n {
                proj += basis[(i, j)].conj() * cand[(i, 0)];
            }
            for i in 0..n {
                let b = basis[(i, j)];
                cand[(i, 0)] -= proj * b;
            }
        }
        let cn = cand.norm();
        if cn > 1e-8 {
            for i in 0..n {
                basis[(i, col)] = cand[(i, 0)] / nalgebra::Complex::new(cn, 0.0);
            }
            col += 1;
        }
    }
    if col != n {
        return Err(Error::domain("failed to complete unitary basis"));
    }
    Ok(basis)
}

// ---------------------------------------------------------------------------
// Orbit-span rank experiments
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedMatrixClass {
    RotationLike,
    ReflectionLike,
    Generic,
    Vector,
}

impl SeedMatrixClass {
    pub fn label(&self) -> &'static str {
        match self {
            SeedMatrixClass::RotationLike => "rotation-like",
            SeedMatrixClass::ReflectionLike => "reflection-like",
            SeedMatrixClass::Generic => "generic",
            SeedMatrixClass::Vector => "vector",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OrbitSpanReport {
    pub d2: usize,
    pub seed_class: SeedMatrixClass,
    pub samples: usize,
    pub rank: usize,
    /// Ratio between the smallest retained and the largest discarded
    /// singular value (infinite when nothing is discarded).
    pub singular_value_gap: f64,
    pub ambiguous: bool,
}

const RANK_THRESHOLD: f64 = 1e-8;
const GAP_REQUIREMENT: f64 = 1e3;

fn numerical_rank(rows: Vec<DVector<f64>>) -> (usize, f64, bool) {
    let n_rows = rows.len();
    let width = rows[0].len();
    let mut m = DMatrix::zeros(n_rows, width);
    for (r, row) in rows.iter().enumerate() {
        for c in 0..width {
            m[(r, c)] = row[c];
        }
    }
    let svd = m.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let sigma_max = sv[0];
    let rank = sv.iter().filter(|&&s| s > RANK_THRESHOLD * sigma_max).count();
    let gap = if rank < sv.len() && sv[rank] > 0.0 {
        sv[rank - 1] / sv[rank]
    } else {
        f64::INFINITY
    };
    (rank, gap, gap < GAP_REQUIREMENT)
}

/// Samples `H̄_A C̄ H̄_Bᵀ` (or `H̄ᾱ` for the vector class) over Haar
/// rotations of SO(d₂−1) and reports the dimension of the linear span via
/// an SVD rank with a certified gap.
pub fn orbit_span_rank(
    d2: usize,
    seed_class: SeedMatrixClass,
    n_samples: usize,
    seed: u64,
) -> Result<OrbitSpanReport> {
    if d2 < 3 || d2.is_multiple_of(2) {
        return Err(Error::domain("orbit experiments need odd d2 >= 3"));
    }
    let k = d2 - 1;
    let needed = k * k + 8;
    if n_samples < needed {
        return Err(Error::domain(format!(
            "need at least {needed} samples for d2 = {d2}"
        )));
    }
    let mut rng = seeded_rng(seed, 0x0517 + d2 as u64);
    let rows: Vec<DVector<f64>> = match seed_class {
        SeedMatrixClass::Vector => {
            let alpha = sample_unit_vector(k, &mut rng);
            (0..n_samples)
                .map(|_| haar_rotation(k, &mut rng) * &alpha)
                .collect()
        }
        _ => {
            let seed_matrix = match seed_class {
                SeedMatrixClass::RotationLike => {
                    if k != 2 {
                        return Err(Error::domain(
                            "rotation/reflection seed classes are defined for d2 = 3",
                        ));
                    }
                    let v = 0.7f64;
                    DMatrix::from_row_slice(2, 2, &[v.cos(), v.sin(), -v.sin(), v.cos()])
                }
                SeedMatrixClass::ReflectionLike => {
                    if k != 2 {
                        return Err(Error::domain(
                            "rotation/reflection seed classes are defined for d2 = 3",
                        ));
                    }
                    let v = 0.7f64;
                    DMatrix::from_row_slice(2, 2, &[v.cos(), v.sin(), v.sin(), -v.cos()])
                }
                SeedMatrixClass::Generic => {
                    DMatrix::from_fn(k, k, |_, _| gauss(&mut rng))
                }
                SeedMatrixClass::Vector => unreachable!(),
            };
            (0..n_samples)
                .map(|_| {
                    let ha = haar_rotation(k, &mut rng);
                    let hb = haar_rotation(k, &mut rng);
                    let img = &ha * &seed_matrix * hb.transpose();
                    DVector::from_iterator(k * k, img.iter().copied())
                })
                .collect()
        }
    };
    let samples = rows.len();
    let (rank, gap, ambiguous) = numerical_rank(rows);
    Ok(OrbitSpanReport {
        d2,
        seed_class,
        samples,
        rank,
        singular_value_gap: gap,
        ambiguous,
    })
}

/// The d₂ = 3 experiment with the stabilizer drawn from the full
/// orthogonal group O(2) instead of SO(2): reflections map the rotation
/// subspace onto the reflection subspace, so even a rotation-like seed
/// spans all four matrix dimensions. Exceeding the 2-dimensional equator
/// budget is what rules out the full orthogonal group as a gbit symmetry.
pub fn orbit_span_rank_full_orthogonal(n_samples: usize, seed: u64) -> Result<OrbitSpanReport> {
    if n_samples < 12 {
        return Err(Error::domain("need at least 12 samples"));
    }
    let mut rng = seeded_rng(seed, 0x0519);
    let v = 0.7f64;
    let seed_matrix = DMatrix::from_row_slice(2, 2, &[v.cos(), v.sin(), -v.sin(), v.cos()]);
    let rows: Vec<DVector<f64>> = (0..n_samples)
        .map(|_| {
            let ha = haar_orthogonal(2, &mut rng);
            let hb = haar_orthogonal(2, &mut rng);
            let img = &ha * &seed_matrix * hb.transpose();
            DVector::from_iterator(4, img.iter().copied())
        })
        .collect();
    let samples = rows.len();
    let (rank, gap, ambiguous) = numerical_rank(rows);
    Ok(OrbitSpanReport {
        d2: 3,
        seed_class: SeedMatrixClass::RotationLike,
        samples,
        rank,
        singular_value_gap: gap,
        ambiguous,
    })
}

/// Results of the SU(3) 6-dimensional block-representation experiment.
#[derive(Debug, Clone)]
pub struct Su3BlockReport {
    /// Homomorphism residual over 100 random pairs.
    pub representation_residual: f64,
    /// Orthogonality residual of sampled representation matrices.
    pub orthogonality_residual: f64,
    /// Orbit-span ranks of `H̄_A C̄ H̄_Bᵀ` per seed class.
    pub product_ranks: Vec<(String, usize)>,
    pub min_product_rank: usize,
    /// Invariant block dimensions under the diagonal SO(3) subgroup.
    pub diagonal_so3_blocks: (usize, usize),
    pub ambiguous: bool,
}

/// Exercises the Eq.-14 block form: representation property,
/// orthogonality, the product-representation orbit spans (reported
/// minimum must stay at or above 9), and the reducibility of the diagonal
/// SO(3) subgroup into two 3-dimensional blocks.
pub fn su3_block_orbit_rank(n_samples: usize, seed: u64) -> Result<Su3BlockReport> {
    let n_samples = n_samples.max(44);
    let mut rng = seeded_rng(seed, 0x53);

    let mut rep_residual: f64 = 0.0;
    let mut orth_residual: f64 = 0.0;
    for _ in 0..100 {
        let u = hermitian::haar_su(3, &mut rng);
        let v = hermitian::haar_su(3, &mut rng);
        let hu = su3_block(&u);
        let hv = su3_block(&v);
        let huv = su3_block(&(&u * &v));
        rep_residual = rep_residual.max((&hu * &hv - huv).amax());
        orth_residual =
            orth_residual.max((hu.transpose() * &hu - DMatrix::identity(6, 6)).amax());
    }

    let sample_pair = |rng: &mut ChaCha8Rng| {
        (
            su3_block(&hermitian::haar_su(3, rng)),
            su3_block(&hermitian::haar_su(3, rng)),
        )
    };
    let mut product_ranks = Vec::new();
    let mut ambiguous = false;
    let seeds: Vec<(String, DMatrix<f64>)> = vec![
        ("generic".into(), DMatrix::from_fn(6, 6, |_, _| gauss(&mut rng))),
        ("rank-one".into(), {
            let x = sample_unit_vector(6, &mut rng);
            let y = sample_unit_vector(6, &mut rng);
            DMatrix::from_fn(6, 6, |i, j| x[i] * y[j])
        }),
        ("rep-element".into(), su3_block(&hermitian::haar_su(3, &mut rng))),
        ("block-diagonal".into(), {
            let c3 = DMatrix::from_fn(3, 3, |_, _| gauss(&mut rng));
            let mut m = DMatrix::zeros(6, 6);
            for i in 0..3 {
                for j in 0..3 {
                    m[(i, j)] = c3[(i, j)];
                    m[(i + 3, j + 3)] = c3[(i, j)];
                }
            }
            m
        }),
    ];
    let mut min_rank = usize::MAX;
    for (label, seed_matrix) in seeds {
        let rows: Vec<DVector<f64>> = (0..n_samples)
            .map(|_| {
                let (ha, hb) = sample_pair(&mut rng);
                let img = &ha * &seed_matrix * hb.transpose();
                DVector::from_iterator(36, img.iter().copied())
            })
            .collect();
        let (rank, _gap, amb) = numerical_rank(rows);
        ambiguous |= amb;
        min_rank = min_rank.min(rank);
        product_ranks.push((label, rank));
    }

    // diagonal SO(3) subgroup: block-diagonal H(U) = diag(U, U) leaves the
    // two copies of R^3 invariant
    let block_dim = |offset: usize, rng: &mut ChaCha8Rng| {
        let mut x = DVector::zeros(6);
        let seed_vec = sample_unit_vector(3, rng);
        for i in 0..3 {
            x[offset + i] = seed_vec[i];
        }
        let rows: Vec<DVector<f64>> = (0..24)
            .map(|_| {
                let r = haar_rotation(3, rng);
                let mut u = hermitian::CMatrix::zeros(3, 3);
                for i in 0..3 {
                    for j in 0..3 {
                        u[(i, j)] = nalgebra::Complex::new(r[(i, j)], 0.0);
                    }
                }
                su3_block(&u) * &x
            })
            .collect();
        numerical_rank(rows).0
    };
    let blocks = (block_dim(0, &mut rng), block_dim(3, &mut rng));

    Ok(Su3BlockReport {
        representation_residual: rep_residual,
        orthogonality_residual: orth_residual,
        product_ranks,
        min_product_rank: min_rank,
        diagonal_so3_blocks: blocks,
        ambiguous,
    })
}

// ---------------------------------------------------------------------------
// Pseudo-swap / pseudo-cnot (Lemma 7)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct PseudoGateReport {
    /// Largest deviation of `G_swap(φ_a ⊗ φ_b)` from `φ_b ⊗ φ_a`.
    pub swap_residual: f64,
    /// Largest deviation of `G_cnot(φ_a ⊗ φ_b)` from `φ_a ⊗ φ_{a⊕b}`.
    pub cnot_residual: f64,
    /// Displacement of the joint maximally mixed state under both gates.
    pub mixed_fixed_residual: f64,
    /// The gates as standard-representation maps on the joint space.
    pub g_swap: LinearMap,
    pub g_cnot: LinearMap,
}

/// Exhibits the swap and controlled-not transformations of the quantum
/// two-gbit composite in the basis distinguishing `phi0`, `phi1`, and
/// verifies their action on all four basis products.
pub fn verify_pseudo_gates(phi0: &StateVector, phi1: &StateVector) -> Result<PseudoGateReport> {
    let rep = QuantumRep::new(2)?;
    let v0 = top_eigenvector(&rep.to_matrix(phi0)?)?;
    let v1 = top_eigenvector(&rep.to_matrix(phi1)?)?;
    let overlap = (v0.adjoint() * &v1).camax();
    if overlap > 1e-7 {
        return Err(Error::domain(
            "pseudo gates need distinguishable (orthogonal) basis states",
        ));
    }
    // basis-change matrix B = [|φ0⟩ |φ1⟩]
    let mut b = hermitian::CMatrix::zeros(2, 2);
    for i in 0..2 {
        b[(i, 0)] = v0[(i, 0)];
        b[(i, 1)] = v1[(i, 0)];
    }
    let bb = b.kronecker(&b);
    let swap4 = {
        let mut m = hermitian::CMatrix::zeros(4, 4);
        m[(0, 0)] = nalgebra::Complex::new(1.0, 0.0);
        m[(1, 2)] = nalgebra::Complex::new(1.0, 0.0);
        m[(2, 1)] = nalgebra::Complex::new(1.0, 0.0);
        m[(3, 3)] = nalgebra::Complex::new(1.0, 0.0);
        m
    };
    let cnot4 = {
        let mut m = hermitian::CMatrix::zeros(4, 4);
        m[(0, 0)] = nalgebra::Complex::new(1.0, 0.0);
        m[(1, 1)] = nalgebra::Complex::new(1.0, 0.0);
        m[(2, 3)] = nalgebra::Complex::new(1.0, 0.0);
        m[(3, 2)] = nalgebra::Complex::new(1.0, 0.0);
        m
    };
    let g_swap = hermitian::two_qubit_rep_matrix(&(&bb * swap4 * bb.adjoint()))?;
    let g_cnot = hermitian::two_qubit_rep_matrix(&(&bb * cnot4 * bb.adjoint()))?;

    let basis = [phi0.clone(), phi1.clone()];
    let mut swap_residual: f64 = 0.0;
    let mut cnot_residual: f64 = 0.0;
    for a in 0..2 {
        for bb_idx in 0..2 {
            let input = product_state(&basis[a], &basis[bb_idx]);
            let swapped = input.apply(&g_swap)?;
            swap_residual =
                swap_residual.max(swapped.distance(&product_state(&basis[bb_idx], &basis[a])));
            let cnotted = input.apply(&g_cnot)?;
            cnot_residual = cnot_residual
                .max(cnotted.distance(&product_state(&basis[a], &basis[a ^ bb_idx])));
        }
    }
    let mu2 = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
    let mu_ab = product_state(&mu2, &mu2);
    let mixed_fixed_residual = mu_ab
        .apply(&g_swap)?
        .distance(&mu_ab)
        .max(mu_ab.apply(&g_cnot)?.distance(&mu_ab));
    Ok(PseudoGateReport {
        swap_residual,
        cnot_residual,
        mixed_fixed_residual,
        g_swap,
        g_cnot,
    })
}

/// Lemma-8 style check: random compositions of local orthogonal actions
/// with the pseudo-gates preserve the Euclidean norm of `[α, β, C]`.
pub fn two_gbit_norm_preservation(n_samples: usize, seed: u64) -> Result<f64> {
    let mut rng = seeded_rng(seed, 0x88);
    let phi0 = bloch_state(&[0.0, 0.0, 1.0]);
    let phi1 = bloch_state(&[0.0, 0.0, -1.0]);
    let gates = verify_pseudo_gates(&phi0, &phi1)?;
    let mut worst: f64 = 0.0;
    for _ in 0..n_samples {
        let ua = hermitian::haar_su2(&mut rng);
        let ub = hermitian::haar_su2(&mut rng);
        let mut composed =
            hermitian::qubit_rep_matrix(&ua)?.kron(&hermitian::qubit_rep_matrix(&ub)?);
        if rng.random::<f64>() < 0.5 {
            composed = gates.g_swap.compose(&composed);
        }
        if rng.random::<f64>() < 0.5 {
            composed = gates.g_cnot.compose(&composed);
        }
        let u = 0.9 * std::f64::consts::PI * rng.random::<f64>();
        let v = std::f64::consts::TAU * rng.random::<f64>();
        let state = crate::bloch::equator_state(u, v).to_joint_state();
        let moved = state.apply(&composed)?;
        let before = crate::bloch::two_gbit_bloch(&state)?.norm_squared();
        let after = crate::bloch::two_gbit_bloch(&moved)?.norm_squared();
        worst = worst.max((before - after).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod group_type_tests {
    use super::*;

    #[test]
    fn closure_of_transpositions_is_symmetric_group() {
        // permutation matrices on 3 points from the two adjacent transpositions
        let perm = |p: [usize; 3]| {
            let mut m = DMatrix::zeros(3, 3);
            for (i, &j) in p.iter().enumerate() {
                m[(i, j)] = 1.0;
            }
            LinearMap::new(m)
        };
        let gens = vec![perm([1, 0, 2]), perm([0, 2, 1])];
        let group = close_group(&gens, 100).unwrap();
        assert_eq!(group.len(), 6);
    }

    #[test]
    fn closure_cap_errors() {
        // an irrational rotation never closes
        let theta = 1.0f64;
        let rot = LinearMap::new(DMatrix::from_row_slice(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        ));
        assert!(close_group(&[rot], 50).is_err());
    }

    #[test]
    fn haar_samples_are_orthogonal() {
        let mut rng = seeded_rng(7, 1);
        for n in [2usize, 3, 5, 7] {
            let q = haar_rotation(n, &mut rng);
            let residual = (&q.transpose() * &q - DMatrix::identity(n, n)).amax();
            assert!(residual < 1e-12);
            assert!((q.determinant() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn su3_block_is_orthogonal_homomorphism() {
        let mut rng = seeded_rng(11, 2);
        for _ in 0..20 {
            let u = crate::hermitian::haar_su(3, &mut rng);
            let v = crate::hermitian::haar_su(3, &mut rng);
            let hu = su3_block(&u);
            let hv = su3_block(&v);
            let huv = su3_block(&(&u * &v));
            assert!((&hu.transpose() * &hu - DMatrix::identity(6, 6)).amax() < 1e-12);
            assert!((hu * hv - huv).amax() < 1e-12);
        }
    }
}

#[cfg(test)]
mod ops_tests {
    use super::*;
    use crate::instances;

    #[test]
    fn maximally_mixed_of_ball_is_center() {
        let inst = instances::ball_gbit(3).unwrap();
        let report = maximally_mixed(&inst, 400, 7).unwrap();
        let center = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
        assert!(report.state.distance(&center) < 1e-12);
        assert!(report.invariance_residual < 1e-9);
    }

    #[test]
    fn maximally_mixed_of_classical_is_uniform() {
        for c in 2..=4 {
            let inst = instances::classical(c).unwrap();
            let report = maximally_mixed(&inst, 0, 3).unwrap();
            for i in 1..c {
                assert!((report.state.coords()[i] - 1.0 / c as f64).abs() < 1e-12);
            }
            assert_eq!(report.method, "exact-orbit-average");
        }
    }

    #[test]
    fn maximally_mixed_of_quantum_pair_factorizes() {
        // μ_AB = μ_A ⊗ μ_B
        let q = instances::quantum(2).unwrap();
        let report = maximally_mixed(&q, 400, 5).unwrap();
        let mu_ab = product_state(&report.state, &report.state);
        let expected = StateVector::from_probabilities(&[0.5; 15]);
        // entries of the product: μ at (i,0),(0,j) and 1/4-type joints
        assert_eq!(mu_ab.len(), 16);
        let mu2 = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
        assert!(report.state.distance(&mu2) < 1e-12);
        let _ = expected;
    }

    #[test]
    fn unique_invariant_state_detection() {
        let ball = instances::ball_gbit(3).unwrap();
        let center = StateVector::from_probabilities(&[0.5, 0.5, 0.5]);
        let surface = StateVector::from_probabilities(&[1.0, 0.5, 0.5]);
        assert!(verify_unique_invariant(&ball, &[center.clone(), surface.clone()]).unwrap());

        let cls = instances::classical(3).unwrap();
        let uniform = cls.maximally_mixed();
        let vertex = cls.space.vertices().unwrap()[0].clone();
        assert!(verify_unique_invariant(&cls, &[uniform, vertex]).unwrap());

        // degenerate group {identity}: everything is invariant, so the
        // uniqueness check must report failure for a non-mixed candidate
        let degenerate = TheoryInstance {
            name: "degenerate".into(),
            space: cls.space.clone(),
            effect_policy: crate::space::EffectPolicy::AllEffects,
            group: GroupSpec::finite(vec![LinearMap::identity(3)]),
            composite_rule: crate::space::CompositeRule::Classical,
        };
        let vertex = degenerate.space.vertices().unwrap()[0].clone();
        assert!(!verify_unique_invariant(&degenerate, &[vertex]).unwrap());
    }

    #[test]
    fn orthogonalize_identity_on_orthogonal_group() {
        let inst = instances::classical(3).unwrap();
        let els = inst.group.enumerate().unwrap();
        // permutation matrices in the standard rep are not all orthogonal
        // (the implicit-outcome rows); S must still orthogonalize them
        let result = orthogonalize(&els).unwrap();
        assert!(result.residual < 1e-9);
        assert!(result.min_eigenvalue > 0.0);
        assert!(result.symmetry_residual < 1e-12);
    }

    #[test]
    fn orthogonalize_conjugated_rotations() {
        // {M R M⁻¹}: S recovers a conjugation making everything orthogonal
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let m_inv = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        let elements: Vec<LinearMap> = (0..64)
            .map(|k| {
                let t = std::f64::consts::TAU * (k as f64) / 64.0;
                let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
                LinearMap::new(&m * r * &m_inv)
            })
            .collect();
        let result = orthogonalize(&elements).unwrap();
        assert!(result.residual < 1e-9);
    }

    #[test]
    fn mixture_decomposition_for_builtins() {
        for name in ["classical:3", "quantum:2", "ball:3"] {
            let inst = instances::by_name(name).unwrap();
            let (states, measurement, residual) = mixture_decomposition(&inst).unwrap();
            assert!(residual < 1e-9, "{name}: mean residual {residual}");
            assert_eq!(states.len(), measurement.n_outcomes());
            // distinguishability: the δ-condition
            for (a, e) in measurement.effects().iter().enumerate() {
                for (b, s) in states.iter().enumerate() {
                    let p = crate::state::evaluate_effect(e, s).unwrap();
                    let target = if a == b { 1.0 } else { 0.0 };
                    assert!((p - target).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn transitivity_pass_for_continuous_instances() {
        for name in ["ball:3", "ball:5", "quantum:2", "quantum:3"] {
            let inst = instances::by_name(name).unwrap();
            let report = transitivity_audit(&inst, 20, 11).unwrap();
            assert_eq!(report.verdict, TransitivityVerdict::Pass, "{name}");
            assert!(report.residual < 1e-9, "{name}: {}", report.residual);
            assert!(report.continuous_group);
        }
    }

    #[test]
    fn transitivity_pass_for_classical() {
        let inst = instances::classical(4).unwrap();
        let report = transitivity_audit(&inst, 0, 0).unwrap();
        assert_eq!(report.verdict, TransitivityVerdict::Pass);
    }

    #[test]
    fn transitivity_fails_for_boxworld_pair() {
        let inst = instances::boxworld_pair().unwrap();
        let report = transitivity_audit(&inst, 0, 0).unwrap();
        assert_eq!(report.verdict, TransitivityVerdict::Fail);
        let (a, b) = report.witness.unwrap();
        // the witness pair mixes a deterministic and a PR vertex
        let is_det = |s: &StateVector| (1..9).all(|k| s.coords()[k].fract().abs() < 1e-9);
        assert_ne!(is_det(&a), is_det(&b));
    }

    #[test]
    fn orbit_rank_grid() {
        // d2 = 3: rotation and reflection classes span rank 2
        for class in [SeedMatrixClass::RotationLike, SeedMatrixClass::ReflectionLike] {
            let report = orbit_span_rank(3, class, 16, 5).unwrap();
            assert_eq!(report.rank, 2);
            assert!(!report.ambiguous);
        }
        // generic seeds reach the full (d2-1)^2
        let report = orbit_span_rank(3, SeedMatrixClass::Generic, 16, 5).unwrap();
        assert_eq!(report.rank, 4);
        let report = orbit_span_rank(5, SeedMatrixClass::Generic, 40, 5).unwrap();
        assert_eq!(report.rank, 16);
        // vector class spans d2 - 1
        let report = orbit_span_rank(3, SeedMatrixClass::Vector, 16, 5).unwrap();
        assert_eq!(report.rank, 2);
    }

    #[test]
    fn full_orthogonal_stabilizer_breaks_rotation_subspace() {
        // with reflections allowed, the rotation-like seed fills all of
        // R^{2x2}: 4 > the 2-dimensional equator budget
        let report = orbit_span_rank_full_orthogonal(16, 3).unwrap();
        assert_eq!(report.rank, 4);
        assert!(!report.ambiguous);
    }

    #[test]
    fn orbit_rank_seed_stability() {
        for seed in [1u64, 2, 3, 4, 5] {
            let report = orbit_span_rank(3, SeedMatrixClass::RotationLike, 16, seed).unwrap();
            assert_eq!(report.rank, 2);
        }
    }

    #[test]
    fn su3_block_experiment() {
        let report = su3_block_orbit_rank(44, 9).unwrap();
        assert!(report.representation_residual < 1e-12);
        assert!(report.orthogonality_residual < 1e-12);
        assert!(report.min_product_rank >= 9);
        assert_eq!(report.diagonal_so3_blocks, (3, 3));
        assert!(!report.ambiguous);
    }

    #[test]
    fn pseudo_gates_on_poles() {
        let phi0 = StateVector::from_probabilities(&[0.5, 0.5, 1.0]);
        let phi1 = StateVector::from_probabilities(&[0.5, 0.5, 0.0]);
        let report = verify_pseudo_gates(&phi0, &phi1).unwrap();
        assert!(report.swap_residual < 1e-12);
        assert!(report.cnot_residual < 1e-12);
        assert!(report.mixed_fixed_residual < 1e-12);
    }

    #[test]
    fn pseudo_gates_on_rotated_basis() {
        // a non-axis distinguishable pair works the same way
        let phi0 = StateVector::from_probabilities(&[0.8, 0.5, 0.9]);
        let phi1 = StateVector::from_probabilities(&[0.2, 0.5, 0.1]);
        let report = verify_pseudo_gates(&phi0, &phi1).unwrap();
        assert!(report.swap_residual < 1e-12);
        assert!(report.cnot_residual < 1e-12);
    }

    #[test]
    fn two_gbit_norm_preserved() {
        let worst = two_gbit_norm_preservation(100, 13).unwrap();
        assert!(worst < 1e-9, "norm drift {worst}");
    }

    #[test]
    fn rotation_between_arbitrary_unit_vectors() {
        let mut rng = seeded_rng(3, 8);
        for n in [2usize, 3, 5] {
            for _ in 0..20 {
                let a = sample_unit_vector(n, &mut rng);
                let b = sample_unit_vector(n, &mut rng);
                let r = rotation_between(&a, &b).unwrap();
                assert!(((&r * &a) - &b).amax() < 1e-12);
                assert!((r.determinant() - 1.0).abs() < 1e-9);
            }
        }
    }
}
