//! Dense two-phase simplex with Bland's rule, sized for eigenstep polytopes.

use crate::error::{FrameError, Result};

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Infeasible,
    Unbounded,
}

pub(crate) struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let factor = r[col];
            if factor != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · z` over the current basis, never entering columns
    /// where `allowed` is false.
    fn optimize(&mut self, cost: &[f64], allowed: &[bool]) -> std::result::Result<(), LpStatus> {
        let max_iter = 50_000;
        for _ in 0..max_iter {
            let entering = (0..self.width).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - self
                        .basis
                        .iter()
                        .enumerate()
                        .map(|(i, &b)| cost[b] * self.rows[i][j])
                        .sum::<f64>();
                reduced > 1e-11
            });
            let Some(col) = entering else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14
                                || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(LpStatus::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpStatus::Unbounded)
    }
}

/// Maximizes `c · x` subject to `A x <= b`, `x >= 0`.
pub(crate) fn maximize(
    c: &[f64],
    a: &[Vec<f64>],
    b: &[f64],
) -> std::result::Result<LpSolution, LpStatus> {
    let n = c.len();
    let m = a.len();
    let artificial: Vec<usize> = (0..m).filter(|&i| b[i] < 0.0).collect();
    let width = n + m + artificial.len();
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width + 1];
        for j in 0..n {
            row[j] = sign * a[i][j];
        }
        row[n + i] = sign;
        row[width] = sign * b[i];
        if let Some(pos) = artificial.iter().position(|&r| r == i) {
            row[n + m + pos] = 1.0;
            basis.push(n + m + pos);
        } else {
            basis.push(n + i);
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, width };

    if !artificial.is_empty() {
        let mut phase1 = vec![0.0; width];
        for j in n + m..width {
            phase1[j] = -1.0;
        }
        let allowed = vec![true; width];
        t.optimize(&phase1, &allowed).map_err(|_| LpStatus::Infeasible)?;
        let infeasibility: f64 = t
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bcol)| bcol >= n + m)
            .map(|(i, _)| t.rhs(i))
            .sum();
        let scale = b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        if infeasibility > 1e-9 * scale {
            return Err(LpStatus::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + m {
                match (0..n + m).find(|&j| t.rows[i][j].abs() > 1e-9) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(c);
    let allowed: Vec<bool> = (0..width).map(|j| j < n + m).collect();
    t.optimize(&cost, &allowed)?;

    let mut x = vec![0.0; n];
    for (i, &bcol) in t.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = t.rhs(i).max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution { x, objective })
}

/// Point maximizing the smallest slack of `A x <= b`, with `x >= 0` unless
/// `free_sign` is set. Returns the point and its minimum slack.
pub(crate) fn max_min_slack(a: &[Vec<f64>], b: &[f64], free_sign: bool) -> Result<(Vec<f64>, f64)> {
    let n = a.first().map_or(0, Vec::len);
    let cols = if free_sign { 2 * n } else { n };
    // Variables: x (or x+ and x-), then t.
    let mut rows: Vec<Vec<f64>> = a
        .iter()
        .map(|row| {
            let mut out = Vec::with_capacity(cols + 1);
            out.extend_from_slice(row);
            if free_sign {
                out.extend(row.iter().map(|v| -v));
            }
            out.push(1.0);
            out
        })
        .collect();
    let mut rhs = b.to_vec();
    // Cap t so the program stays bounded even without constraints on it.
    let mut cap = vec![0.0; cols + 1];
    cap[cols] = 1.0;
    rows.push(cap);
    rhs.push(b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs())) * 1e3);
    let mut c = vec![0.0; cols + 1];
    c[cols] = 1.0;
    let sol = maximize(&c, &rows, &rhs).map_err(|status| match status {
        LpStatus::Infeasible => FrameError::Infeasible,
        LpStatus::Unbounded => FrameError::LinearProgram("unbounded slack program".into()),
    })?;
    let x: Vec<f64> = if free_sign {
        (0..n).map(|j| sol.x[j] - sol.x[n + j]).collect()
    } else {
        sol.x[..n].to_vec()
    };
    Ok((x, sol.objective))
}
