//! Exact two-phase primal simplex over the rationals.
//!
//! Dense tableau, Bland's lowest-index rule throughout (no cycling, fully
//! deterministic). Small and exact rather than fast: the LPs here have a few
//! dozen rows. All variables are implicitly nonnegative; upper bounds are
//! ordinary rows.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    /// Sparse coefficients over structural variables.
    pub coeffs: Vec<(usize, Rat)>,
    pub rel: Relation,
    pub rhs: Rat,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Minimization objective over structural variables.
    pub objective: Vec<Rat>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct SimplexSolution {
    pub values: Vec<Rat>,
    pub objective: Rat,
}

struct Tableau {
    // a[i] has one entry per column, rhs kept separately; all rhs >= 0.
    a: Vec<Vec<Rat>>,
    b: Vec<Rat>,
    basis: Vec<usize>,
    cols: usize,
    structural: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let pivot = self.a[row][col].clone();
        debug_assert!(pivot.is_positive());
        for x in self.a[row].iter_mut() {
            *x /= &pivot;
        }
        self.b[row] /= &pivot;
        for i in 0..self.a.len() {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            // a[i][col] is zeroed up front, so skip j == col below.
            let factor = std::mem::replace(&mut self.a[i][col], Rat::zero());
            for j in 0..self.cols {
                if j != col && !self.a[row][j].is_zero() {
                    let delta = &self.a[row][j] * &factor;
                    self.a[i][j] -= delta;
                }
            }
            let delta = &self.b[row] * &factor;
            self.b[i] -= delta;
        }
        self.basis[row] = col;
    }

    /// Reduced-cost row for the given full-length cost vector.
    fn reduced_costs(&self, cost: &[Rat]) -> (Vec<Rat>, Rat) {
        let mut z = cost.to_vec();
        let mut value = Rat::zero();
        for (i, &bv) in self.basis.iter().enumerate() {
            if cost[bv].is_zero() {
                continue;
            }
            let cb = cost[bv].clone();
            for j in 0..self.cols {
                if !self.a[i][j].is_zero() {
                    let delta = &self.a[i][j] * &cb;
                    z[j] -= delta;
                }
            }
            value += &cb * &self.b[i];
        }
        (z, value)
    }

    /// Runs Bland's rule to optimality for the given cost vector.
    /// Columns >= `col_limit` are barred from entering.
    fn optimize(&mut self, cost: &[Rat], col_limit: usize) -> Result<Rat> {
        let (mut z, mut value) = self.reduced_costs(cost);
        let mut iterations = 0usize;
        let cap = 50_000 + 200 * self.cols * (self.a.len() + 1);
        loop {
            iterations += 1;
            if iterations > cap {
                return Err(Error::Invariant(
                    "simplex iteration cap exceeded (cycling?)".into(),
                ));
            }
            // Bland: entering = lowest-index column with negative reduced cost.
            let Some(col) = (0..col_limit).find(|&j| z[j].is_negative()) else {
                return Ok(value);
            };
            // Ratio test; ties resolved by smallest basis variable index.
            let mut best: Option<(Rat, usize)> = None;
            for i in 0..self.a.len() {
                if self.a[i][col].is_positive() {
                    let ratio = &self.b[i] / &self.a[i][col];
                    best = Some(match best {
                        None => (ratio, i),
                        Some((r, bi)) => {
                            if ratio < r || (ratio == r && self.basis[i] < self.basis[bi]) {
                                (ratio, i)
                            } else {
                                (r, bi)
                            }
                        }
                    });
                }
            }
            let Some((_, row)) = best else {
                return Err(Error::Lp("unbounded linear program".into()));
            };
            self.pivot(row, col);
            // Update the cost row by the same elimination.
            // z[col] is zeroed up front, so skip j == col below.
            let factor = std::mem::replace(&mut z[col], Rat::zero());
            if !factor.is_zero() {
                for j in 0..self.cols {
                    if j != col && !self.a[row][j].is_zero() {
                        let delta = &self.a[row][j] * &factor;
                        z[j] -= delta;
                    }
                }
                value += &self.b[row] * &factor;
            }
        }
    }
}

/// Solves the LP exactly. Errors on infeasible or unbounded input.
pub fn solve(lp: &LinearProgram) -> Result<SimplexSolution> {
    let m = lp.constraints.len();
    let n = lp.num_vars;
    // Column layout: structural | slack+surplus | artificial.
    let mut num_slack = 0;
    for c in &lp.constraints {
        match c.rel {
            Relation::Le | Relation::Ge => num_slack += 1,
            Relation::Eq => {}
        }
    }
    let first_artificial = n + num_slack;
    let cols = first_artificial + m; // at most one artificial per row
    let mut a = vec![vec![Rat::zero(); cols]; m];
    let mut b = vec![Rat::zero(); m];
    let mut basis = vec![usize::MAX; m];
    let mut slack_at = n;
    let mut artificial_at = first_artificial;
    let mut num_artificial = 0;

    for (i, cst) in lp.constraints.iter().enumerate() {
        let flip = cst.rhs.is_negative();
        for (j, coef) in &cst.coeffs {
            debug_assert!(*j < n);
            let val = if flip { -coef.clone() } else { coef.clone() };
            a[i][*j] += val; // accumulate duplicate indices defensively
        }
        b[i] = if flip { -cst.rhs.clone() } else { cst.rhs.clone() };
        let rel = match (cst.rel, flip) {
            (Relation::Le, false) | (Relation::Ge, true) => Relation::Le,
            (Relation::Ge, false) | (Relation::Le, true) => Relation::Ge,
            (Relation::Eq, _) => Relation::Eq,
        };
        match rel {
            Relation::Le => {
                a[i][slack_at] = Rat::one();
                basis[i] = slack_at;
                slack_at += 1;
            }
            Relation::Ge => {
                a[i][slack_at] = -Rat::one();
                slack_at += 1;
                a[i][artificial_at] = Rat::one();
                basis[i] = artificial_at;
                artificial_at += 1;
                num_artificial += 1;
            }
            Relation::Eq => {
                a[i][artificial_at] = Rat::one();
                basis[i] = artificial_at;
                artificial_at += 1;
                num_artificial += 1;
            }
        }
    }

    let mut t = Tableau {
        a,
        b,
        basis,
        cols,
        structural: n,
    };

    if num_artificial > 0 {
        let mut phase1 = vec![Rat::zero(); cols];
        for c in phase1.iter_mut().skip(first_artificial) {
            *c = Rat::one();
        }
        let value = t.optimize(&phase1, cols)?;
        if !value.is_zero() {
            return Err(Error::Lp("infeasible linear program".into()));
        }
        // Pivot out any artificials still basic at zero; drop redundant rows.
        let mut drop_rows = Vec::new();
        for i in 0..t.a.len() {
            if t.basis[i] >= first_artificial {
                debug_assert!(t.b[i].is_zero());
                if let Some(col) = (0..first_artificial).find(|&j| !t.a[i][j].is_zero()) {
                    // Pivot element may be negative; normalize sign first.
                    if t.a[i][col].is_negative() {
                        for x in t.a[i].iter_mut() {
                            *x = -std::mem::take(x);
                        }
                        t.b[i] = -std::mem::take(&mut t.b[i]);
                    }
                    t.pivot(i, col);
                } else {
                    drop_rows.push(i);
                }
            }
        }
        for &i in drop_rows.iter().rev() {
            t.a.remove(i);
            t.b.remove(i);
            t.basis.remove(i);
        }
    }

    let mut cost = vec![Rat::zero(); cols];
    cost[..n].clone_from_slice(&lp.objective);
    let objective = t.optimize(&cost, first_artificial)?;

    let mut values = vec![Rat::zero(); n];
    for (i, &bv) in t.basis.iter().enumerate() {
        if bv < n {
            values[bv] = t.b[i].clone();
        }
    }
    let _ = t.structural;
    Ok(SimplexSolution { values, objective })
}
