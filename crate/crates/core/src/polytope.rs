//! Small dense polytope utilities: vertex enumeration by basis
//! inspection and LP-backed extreme-point certification. Sized for the
//! desk-scale polytopes that appear here (no-signaling correlations,
//! effect polytopes of low-dimensional state spaces).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::lp::{solve, LpProblem, LpStatus, Relation};

/// A halfspace `a·x ≤ b`.
#[derive(Debug, Clone)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Halfspace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Self {
        Halfspace { normal, offset }
    }
}

/// Enumerates the vertices of the bounded polytope `{x : aᵢ·x ≤ bᵢ}` by
/// solving every n×n subsystem of tight constraints and keeping the
/// feasible, deduplicated solutions. Exponential in the dimension; fine
/// for n ≤ 9 and a few dozen halfspaces.
pub fn enumerate_vertices(halfspaces: &[Halfspace], dim: usize, tol: f64) -> Result<Vec<DVector<f64>>> {
    let m = halfspaces.len();
    if m < dim {
        return Err(Error::domain(
            "not enough halfspaces for a bounded polytope",
        ));
    }
    for h in halfspaces {
        if h.normal.len() != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: h.normal.len(),
            });
        }
    }
    let mut vertices: Vec<DVector<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        // solve the tight system for this subset
        let mut a = DMatrix::zeros(dim, dim);
        let mut b = DVector::zeros(dim);
        for (row, &i) in subset.iter().enumerate() {
            for c in 0..dim {
                a[(row, c)] = halfspaces[i].normal[c];
            }
            b[row] = halfspaces[i].offset;
        }
        if let Some(x) = a.lu().solve(&b) {
            if x.iter().all(|v| v.is_finite() && v.abs() < 1e9) {
                let feasible = halfspaces.iter().all(|h| {
                    let lhs: f64 = h.normal.iter().zip(x.iter()).map(|(a, v)| a * v).sum();
                    lhs <= h.offset + tol
                });
                if feasible && !vertices.iter().any(|v| (v - &x).amax() < 10.0 * tol.max(1e-9)) {
                    vertices.push(x);
                }
            }
        }
        // next combination
        let mut k = dim;
        loop {
            if k == 0 {
                return Ok(vertices);
            }
            k -= 1;
            if subset[k] != k + m - dim {
                subset[k] += 1;
                for j in (k + 1)..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// LP check that `point` lies in the convex hull of `generators`.
pub fn in_convex_hull(point: &DVector<f64>, generators: &[DVector<f64>], tol: f64) -> Result<bool> {
    let n = generators.len();
    if n == 0 {
        return Ok(false);
    }
    let dim = point.len();
    let mut p = LpProblem::feasibility(n);
    for v in 0..n {
        p.set_bounds(v, 0.0, 1.0);
    }
    for row in 0..dim {
        let coeffs: Vec<f64> = generators.iter().map(|g| g[row]).collect();
        p.constrain(coeffs, Relation::Eq, point[row]);
    }
    p.constrain(vec![1.0; n], Relation::Eq, 1.0);
    Ok(solve(&p, tol)?.status == LpStatus::Optimal)
}

/// Certifies that every listed point is extreme: none is a convex
/// combination of the others.
pub fn all_extreme(points: &[DVector<f64>], tol: f64) -> Result<bool> {
    for (i, pt) in points.iter().enumerate() {
        let others: Vec<DVector<f64>> = points
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        if others.is_empty() {
            continue;
        }
        if in_convex_hull(pt, &others, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}
