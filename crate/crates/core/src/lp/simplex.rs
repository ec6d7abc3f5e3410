//! Dense two-phase simplex for the small feasibility and optimization
//! problems that back membership, distinguishability and capacity checks.
//!
//! Problem sizes stay in the hundreds of variables, so a full-tableau
//! method with Bland's pivoting rule (termination guarantee, no cycling)
//! is both simple and fast enough.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// `maximize objective·x` subject to row constraints and per-variable bounds.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<(Vec<f64>, Relation, f64)>,
    /// Per-variable `[lo, hi]`; use `f64::NEG_INFINITY` / `f64::INFINITY`
    /// for free directions.
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    /// Problem with all variables free and a zero objective (feasibility).
    pub fn feasibility(n_vars: usize) -> Self {
        LpProblem {
            n_vars,
            objective: vec![0.0; n_vars],
            constraints: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n_vars],
        }
    }

    pub fn maximize(n_vars: usize, objective: Vec<f64>) -> Self {
        LpProblem {
            n_vars,
            objective,
            constraints: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); n_vars],
        }
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.n_vars);
        self.constraints.push((coeffs, rel, rhs));
    }

    pub fn set_bounds(&mut self, var: usize, lo: f64, hi: f64) {
        self.bounds[var] = (lo, hi);
    }

    /// Largest constraint/bound violation of a candidate point.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (coeffs, rel, rhs) in &self.constraints {
            let lhs: f64 = coeffs.iter().zip(x).map(|(c, v)| c * v).sum();
            let gap = match rel {
                Relation::Le => lhs - rhs,
                Relation::Ge => rhs - lhs,
                Relation::Eq => (lhs - rhs).abs(),
            };
            worst = worst.max(gap);
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_finite() {
                worst = worst.max(lo - x[j]);
            }
            if hi.is_finite() {
                worst = worst.max(x[j] - hi);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpResult {
    pub status: LpStatus,
    pub point: Option<Vec<f64>>,
    pub value: Option<f64>,
}

impl LpResult {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

// How an original variable was rewritten into nonnegative standard-form ones.
enum VarSubst {
    // x = lo + u
    Shifted { u: usize, lo: f64 },
    // x = hi - u
    Mirrored { u: usize, hi: f64 },
    // x = u_plus - u_minus
    Split { u_plus: usize, u_minus: usize },
}

struct Tableau {
    // rows = B⁻¹ A, one per constraint; rhs kept separately.
    rows: DMatrix<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    n_cols: usize,
}

const PIVOT_EPS: f64 = 1e-10;

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[(row, col)];
        for c in 0..self.n_cols {
            self.rows[(row, c)] /= piv;
        }
        self.rhs[row] /= piv;
        for r in 0..self.rows.nrows() {
            if r == row {
                continue;
            }
            let factor = self.rows[(r, col)];
            if factor == 0.0 {
                continue;
            }
            for c in 0..self.n_cols {
                let delta = factor * self.rows[(row, c)];
                self.rows[(r, c)] -= delta;
            }
            self.rhs[r] -= factor * self.rhs[row];
        }
        self.basis[row] = col;
    }

    // Reduced costs c - c_B·(B⁻¹A) for the given cost vector.
    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut reduced = costs.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = costs[b];
            if cb == 0.0 {
                continue;
            }
            for c in 0..self.n_cols {
                reduced[c] -= cb * self.rows[(r, c)];
            }
        }
        reduced
    }

    fn objective_value(&self, costs: &[f64]) -> f64 {
        self.basis
            .iter()
            .enumerate()
            .map(|(r, &b)| costs[b] * self.rhs[r])
            .sum()
    }
}

enum SimplexOutcome {
    Optimal,
    Unbounded,
}

// Minimizes costs·x with Bland's rule; `allowed` masks columns that may enter.
fn run_simplex(
    tab: &mut Tableau,
    costs: &[f64],
    allowed: &[bool],
    max_iters: usize,
) -> Result<SimplexOutcome> {
    for _ in 0..max_iters {
        let reduced = tab.reduced_costs(costs);
        // Bland: smallest-index improving column.
        let entering = (0..tab.n_cols)
            .find(|&j| allowed[j] && !tab.basis.contains(&j) && reduced[j] < -PIVOT_EPS);
        let Some(col) = entering else {
            return Ok(SimplexOutcome::Optimal);
        };
        // Ratio test, Bland tie-break on basis variable index.
        let mut best: Option<(f64, usize, usize)> = None; // (ratio, basis var, row)
        for r in 0..tab.rows.nrows() {
            let a = tab.rows[(r, col)];
            if a > PIVOT_EPS {
                let ratio = tab.rhs[r] / a;
                match best {
                    None => best = Some((ratio, tab.basis[r], r)),
                    Some((br, bv, _)) => {
                        if ratio < br - 1e-12 || (ratio < br + 1e-12 && tab.basis[r] < bv) {
                            best = Some((ratio, tab.basis[r], r));
                        }
                    }
                }
            }
        }
        match best {
            Some((_, _, row)) => tab.pivot(row, col),
            None => return Ok(SimplexOutcome::Unbounded),
        }
    }
    Err(Error::Solver(format!(
        "simplex exceeded {max_iters} iterations"
    )))
}

/// Solves the LP. `tol` governs the feasibility certificate on the returned
/// point and the phase-1 infeasibility threshold.
pub fn solve(p: &LpProblem, tol: f64) -> Result<LpResult> {
    if p.objective.len() != p.n_vars || p.bounds.len() != p.n_vars {
        return Err(Error::Dimension {
            expected: p.n_vars,
            found: p.objective.len().min(p.bounds.len()),
        });
    }

    // Substitute original variables by nonnegative ones.
    let mut substs = Vec::with_capacity(p.n_vars);
    let mut n_u = 0usize;
    let mut extra_rows: Vec<(usize, f64)> = Vec::new(); // u_j <= cap
    for &(lo, hi) in &p.bounds {
        if lo.is_finite() {
            let u = n_u;
            n_u += 1;
            if hi.is_finite() {
                if hi < lo {
                    return Ok(LpResult {
                        status: LpStatus::Infeasible,
                        point: None,
                        value: None,
                    });
                }
                extra_rows.push((u, hi - lo));
            }
            substs.push(VarSubst::Shifted { u, lo });
        } else if hi.is_finite() {
            let u = n_u;
            n_u += 1;
            substs.push(VarSubst::Mirrored { u, hi });
        } else {
            let u_plus = n_u;
            let u_minus = n_u + 1;
            n_u += 2;
            substs.push(VarSubst::Split { u_plus, u_minus });
        }
    }

    // Rewrite rows in u-space with nonnegative rhs.
    struct Row {
        coeffs: Vec<f64>,
        rel: Relation,
        rhs: f64,
    }
    let mut rows: Vec<Row> = Vec::with_capacity(p.constraints.len() + extra_rows.len());
    for (coeffs, rel, rhs) in &p.constraints {
        if coeffs.len() != p.n_vars {
            return Err(Error::Dimension {
                expected: p.n_vars,
                found: coeffs.len(),
            });
        }
        let mut u_coeffs = vec![0.0; n_u];
        let mut u_rhs = *rhs;
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match substs[j] {
                VarSubst::Shifted { u, lo } => {
                    u_coeffs[u] += c;
                    u_rhs -= c * lo;
                }
                VarSubst::Mirrored { u, hi } => {
                    u_coeffs[u] -= c;
                    u_rhs -= c * hi;
                }
                VarSubst::Split { u_plus, u_minus } => {
                    u_coeffs[u_plus] += c;
                    u_coeffs[u_minus] -= c;
                }
            }
        }
        let mut rel = *rel;
        if u_rhs < 0.0 {
            for c in u_coeffs.iter_mut() {
                *c = -*c;
            }
            u_rhs = -u_rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push(Row {
            coeffs: u_coeffs,
            rel,
            rhs: u_rhs,
        });
    }
    for (u, cap) in extra_rows {
        let mut u_coeffs = vec![0.0; n_u];
        u_coeffs[u] = 1.0;
        rows.push(Row {
            coeffs: u_coeffs,
            rel: Relation::Le,
            rhs: cap,
        });
    }

    // Count slack and artificial columns.
    let m = rows.len();
    let mut n_slack = 0usize;
    let mut n_artificial = 0usize;
    for row in &rows {
        match row.rel {
            Relation::Le => n_slack += 1,
            Relation::Ge => {
                n_slack += 1;
                n_artificial += 1;
            }
            Relation::Eq => n_artificial += 1,
        }
    }
    let n_cols = n_u + n_slack + n_artificial;

    let mut mat = DMatrix::zeros(m, n_cols);
    let mut rhs = vec![0.0; m];
    let mut basis = vec![0usize; m];
    let mut slack_idx = n_u;
    let mut art_idx = n_u + n_slack;
    for (r, row) in rows.iter().enumerate() {
        for (j, &c) in row.coeffs.iter().enumerate() {
            mat[(r, j)] = c;
        }
        rhs[r] = row.rhs;
        match row.rel {
            Relation::Le => {
                mat[(r, slack_idx)] = 1.0;
                basis[r] = slack_idx;
                slack_idx += 1;
            }
            Relation::Ge => {
                mat[(r, slack_idx)] = -1.0;
                slack_idx += 1;
                mat[(r, art_idx)] = 1.0;
                basis[r] = art_idx;
                art_idx += 1;
            }
            Relation::Eq => {
                mat[(r, art_idx)] = 1.0;
                basis[r] = art_idx;
                art_idx += 1;
            }
        }
    }

    let mut tab = Tableau {
        rows: mat,
        rhs,
        basis,
        n_cols,
    };
    let max_iters = 20_000 + 200 * (m + n_cols);

    // Phase 1: drive the artificial variables to zero.
    if n_artificial > 0 {
        let mut phase1_costs = vec![0.0; n_cols];
        for c in (n_u + n_slack)..n_cols {
            phase1_costs[c] = 1.0;
        }
        let allowed = vec![true; n_cols];
        match run_simplex(&mut tab, &phase1_costs, &allowed, max_iters)? {
            SimplexOutcome::Optimal => {}
            SimplexOutcome::Unbounded => {
                return Err(Error::Solver("phase-1 objective unbounded".into()))
            }
        }
        if tab.objective_value(&phase1_costs) > tol.max(1e-9) {
            return Ok(LpResult {
                status: LpStatus::Infeasible,
                point: None,
                value: None,
            });
        }
        // Pivot leftover artificials out of the basis where possible.
        for r in 0..m {
            if tab.basis[r] >= n_u + n_slack {
                if let Some(col) =
                    (0..n_u + n_slack).find(|&j| tab.rows[(r, j)].abs() > 1e-8)
                {
                    tab.pivot(r, col);
                }
            }
        }
    }

    // Phase 2: minimize the negated original objective over real columns.
    let mut phase2_costs = vec![0.0; n_cols];
    for (j, subst) in substs.iter().enumerate() {
        let c = p.objective[j];
        if c == 0.0 {
            continue;
        }
        match *subst {
            VarSubst::Shifted { u, .. } => phase2_costs[u] -= c,
            VarSubst::Mirrored { u, .. } => phase2_costs[u] += c,
            VarSubst::Split { u_plus, u_minus } => {
                phase2_costs[u_plus] -= c;
                phase2_costs[u_minus] += c;
            }
        }
    }
    let mut allowed = vec![true; n_cols];
    for a in allowed.iter_mut().skip(n_u + n_slack) {
        *a = false;
    }
    match run_simplex(&mut tab, &phase2_costs, &allowed, max_iters)? {
        SimplexOutcome::Unbounded => {
            return Ok(LpResult {
                status: LpStatus::Unbounded,
                point: None,
                value: None,
            })
        }
        SimplexOutcome::Optimal => {}
    }

    // Recover the original variables.
    let mut u_values = vec![0.0; n_cols];
    for (r, &b) in tab.basis.iter().enumerate() {
        u_values[b] = tab.rhs[r];
    }
    let mut x = vec![0.0; p.n_vars];
    for (j, subst) in substs.iter().enumerate() {
        x[j] = match *subst {
            VarSubst::Shifted { u, lo } => lo + u_values[u],
            VarSubst::Mirrored { u, hi } => hi - u_values[u],
            VarSubst::Split { u_plus, u_minus } => u_values[u_plus] - u_values[u_minus],
        };
    }
    let value: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    let violation = p.violation(&x);
    if violation > tol.max(1e-7) {
        return Err(Error::Solver(format!(
            "optimal point violates constraints by {violation:e}"
        )));
    }
    Ok(LpResult {
        status: LpStatus::Optimal,
        point: Some(x),
        value: Some(value),
    })
}
