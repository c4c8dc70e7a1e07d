//! Dense two-phase simplex with Bland's rule.
//!
//! Solves `maximize c.x subject to A x {<=,=} b, x >= 0` with all
//! right-hand sides non-negative. Less-than rows get slack variables and
//! start basic; equality rows get artificials that phase 1 drives to
//! zero. Bland's rule (lowest eligible index enters, lowest-index basic
//! variable leaves on ratio ties) keeps the pivot sequence deterministic
//! and cycle-free.

/// Pivot eligibility threshold.
const EPS: f64 = 1e-9;
/// Phase-1 residual below which the program counts as feasible.
const FEAS_EPS: f64 = 1e-7;
/// Hard cap on pivots; exceeding it means numerical trouble, not size.
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintOp {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexOutcome {
    Optimal { value: f64, solution: Vec<f64> },
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone)]
struct Row {
    coeffs: Vec<(usize, f64)>,
    op: ConstraintOp,
    rhs: f64,
}

/// A linear program in standard maximization form.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> LinearProgram {
        LinearProgram {
            n_vars,
            objective: vec![0.0; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn set_objective(&mut self, coeffs: &[(usize, f64)]) {
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        for &(v, c) in coeffs {
            assert!(v < self.n_vars);
            self.objective[v] += c;
        }
    }

    pub fn add_le(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.push_row(coeffs, ConstraintOp::Le, rhs);
    }

    pub fn add_eq(&mut self, coeffs: Vec<(usize, f64)>, rhs: f64) {
        self.push_row(coeffs, ConstraintOp::Eq, rhs);
    }

    fn push_row(&mut self, coeffs: Vec<(usize, f64)>, op: ConstraintOp, rhs: f64) {
        assert!(rhs >= 0.0, "rows must have non-negative right-hand sides");
        debug_assert!(coeffs.iter().all(|&(v, _)| v < self.n_vars));
        self.rows.push(Row { coeffs, op, rhs });
    }

    pub fn maximize(&self) -> SimplexOutcome {
        Tableau::build(self).solve(&self.objective)
    }
}

struct Tableau {
    width: usize,
    nv: usize,
    art_start: usize,
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    n_art: usize,
}

enum PivotRun {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n_le = lp.rows.iter().filter(|r| r.op == ConstraintOp::Le).count();
        let n_eq = lp.rows.len() - n_le;
        let nv = lp.n_vars;
        let art_start = nv + n_le;
        let width = nv + n_le + n_eq + 1;
        let mut rows = Vec::with_capacity(lp.rows.len());
        let mut basis = Vec::with_capacity(lp.rows.len());
        let mut next_slack = nv;
        let mut next_art = art_start;
        for row in &lp.rows {
            let mut t = vec![0.0; width];
            for &(v, c) in &row.coeffs {
                t[v] += c;
            }
            t[width - 1] = row.rhs;
            match row.op {
                ConstraintOp::Le => {
                    t[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                ConstraintOp::Eq => {
                    t[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(t);
        }
        Tableau {
            width,
            nv,
            art_start,
            rows,
            obj: vec![0.0; width],
            basis,
            n_art: n_eq,
        }
    }

    fn solve(mut self, objective: &[f64]) -> SimplexOutcome {
        if self.n_art > 0 {
            // phase 1: maximize minus the artificial sum
            self.obj.iter_mut().for_each(|c| *c = 0.0);
            for j in self.art_start..self.width - 1 {
                self.obj[j] = 1.0;
            }
            let art_rows: Vec<usize> = (0..self.rows.len())
                .filter(|&r| self.basis[r] >= self.art_start)
                .collect();
            for &r in &art_rows {
                for j in 0..self.width {
                    self.obj[j] -= self.rows[r][j];
                }
            }
            match self.pivot_until_done(self.width - 1) {
                PivotRun::Unbounded => unreachable!("phase 1 objective is bounded"),
                PivotRun::Optimal => {}
            }
            if self.obj[self.width - 1] < -FEAS_EPS {
                return SimplexOutcome::Infeasible;
            }
            self.expel_artificials();
        }

        // phase 2 objective row, priced out against the current basis
        self.obj.iter_mut().for_each(|c| *c = 0.0);
        for (j, &c) in objective.iter().enumerate() {
            self.obj[j] = -c;
        }
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            let cb = if b < self.nv { objective[b] } else { 0.0 };
            if cb != 0.0 {
                for j in 0..self.width {
                    self.obj[j] += cb * self.rows[r][j];
                }
            }
        }
        match self.pivot_until_done(self.art_start) {
            PivotRun::Unbounded => SimplexOutcome::Unbounded,
            PivotRun::Optimal => {
                let mut solution = vec![0.0; self.nv];
                for r in 0..self.rows.len() {
                    if self.basis[r] < self.nv {
                        solution[self.basis[r]] = self.rows[r][self.width - 1].max(0.0);
                    }
                }
                SimplexOutcome::Optimal {
                    value: self.obj[self.width - 1],
                    solution,
                }
            }
        }
    }

    /// Runs Bland pivots until optimal or unbounded, considering entering
    /// columns below `col_limit` only.
    fn pivot_until_done(&mut self, col_limit: usize) -> PivotRun {
        for _ in 0..MAX_PIVOTS {
            let Some(entering) = (0..col_limit).find(|&j| self.obj[j] < -EPS) else {
                return PivotRun::Optimal;
            };
            let Some(leaving) = self.ratio_test(entering) else {
                return PivotRun::Unbounded;
            };
            self.pivot(leaving, entering);
        }
        panic!("simplex failed to converge within {MAX_PIVOTS} pivots");
    }

    fn ratio_test(&self, entering: usize) -> Option<usize> {
        let rhs = self.width - 1;
        let mut best: Option<(f64, usize, usize)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            let a = row[entering];
            if a > EPS {
                let ratio = row[rhs] / a;
                let candidate = (ratio, self.basis[r], r);
                best = Some(match best {
                    None => candidate,
                    Some(cur) => {
                        // ties on the ratio break toward the lowest basic
                        // variable index, per Bland
                        if ratio < cur.0 - EPS || (ratio < cur.0 + EPS && candidate.1 < cur.1) {
                            candidate
                        } else {
                            cur
                        }
                    }
                });
            }
        }
        best.map(|(_, _, r)| r)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let pivot = self.rows[r][c];
        let inv = 1.0 / pivot;
        for v in self.rows[r].iter_mut() {
            *v *= inv;
        }
        self.rows[r][c] = 1.0;
        for r2 in 0..self.rows.len() {
            if r2 != r {
                let factor = self.rows[r2][c];
                if factor != 0.0 {
                    for j in 0..self.width {
                        self.rows[r2][j] -= factor * self.rows[r][j];
                    }
                    self.rows[r2][c] = 0.0;
                }
            }
        }
        let factor = self.obj[c];
        if factor != 0.0 {
            for j in 0..self.width {
                self.obj[j] -= factor * self.rows[r][j];
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// After phase 1, pivots artificials out of the basis where possible;
    /// rows with no eligible pivot are redundant and stay inert.
    fn expel_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.basis[r] >= self.art_start {
                if let Some(c) = (0..self.art_start).find(|&j| self.rows[r][j].abs() > EPS) {
                    self.pivot(r, c);
                }
            }
        }
    }
}
