//! Eigenstep tables: the spectra of the partial frame operators.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::frame::{
    group_multiplicities, hermitian_eig, partial_frame_operator, Frame, Spectrum,
};

/// Row `k` (1-based, `k = 1..=N`) holds `min(k, d)` values, nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenstepTable {
    d: usize,
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl EigenstepTable {
    pub fn new(d: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if d == 0 || n == 0 {
            return Err(FrameError::DimensionMismatch(
                "eigenstep table needs d >= 1 and at least one row".into(),
            ));
        }
        for (i, row) in rows.iter().enumerate() {
            let want = (i + 1).min(d);
            if row.len() != want {
                return Err(FrameError::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    want
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(FrameError::InvalidInput {
                    what: "eigenstep table",
                    reason: format!("row {} has a non-finite entry", i + 1),
                });
            }
        }
        Ok(Self { d, n, rows })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Row `k`, 1-based.
    pub fn row(&self, k: usize) -> &[f64] {
        &self.rows[k - 1]
    }

    /// `μ_{k,j}`, 1-based; zero beyond the stored entries of a row.
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.rows[k - 1].get(j - 1).copied().unwrap_or(0.0)
    }

    /// Row `k` padded with zeros to length `d`.
    pub fn padded_row(&self, k: usize) -> Vec<f64> {
        let mut row = vec![0.0; self.d];
        if k > 0 {
            row[..self.rows[k - 1].len()].copy_from_slice(&self.rows[k - 1]);
        }
        row
    }

    pub fn top_row(&self) -> &[f64] {
        &self.rows[self.n - 1]
    }

    /// Largest entrywise difference; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.d != other.d || self.n != other.n {
            return f64::INFINITY;
        }
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Descending eigenvalues of every partial frame operator, truncated to `min(k, d)`.
pub fn compute_eigensteps(f: &Frame) -> EigenstepTable {
    let d = f.d();
    let rows = (1..=f.n())
        .map(|k| {
            let s = partial_frame_operator(f, k).expect("k within 1..=N");
            let mut values = hermitian_eig(&s).values;
            values.truncate(k.min(d));
            values
        })
        .collect();
    EigenstepTable { d, n: f.n(), rows }
}

/// A table cell `(k, j)`, both 1-based.
pub type Cell = (usize, usize);

/// `upper >= lower`, where a missing `lower` means zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Relation {
    pub upper: Cell,
    pub lower: Option<Cell>,
}

/// Every interlacing relation between consecutive rows plus nonnegativity
/// of every cell.
pub(crate) fn table_relations(d: usize, n: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    for k in 2..=n {
        let len_k = k.min(d);
        let len_prev = (k - 1).min(d);
        for j in 1..=len_prev {
            out.push(Relation {
                upper: (k, j),
                lower: Some((k - 1, j)),
            });
            if j < len_k {
                out.push(Relation {
                    upper: (k - 1, j),
                    lower: Some((k, j + 1)),
                });
            }
        }
    }
    for k in 1..=n {
        for j in 1..=k.min(d) {
            out.push(Relation {
                upper: (k, j),
                lower: None,
            });
        }
    }
    out
}

/// Cells inside the upside-down triangles pinned by repeated values of the
/// top row, which is itself excluded.
pub(crate) fn forced_triangle_cells(top: &[f64], n: usize) -> Vec<Cell> {
    let mut cells = Vec::new();
    let mut start = 1;
    for m in group_multiplicities(top) {
        for t in 1..m {
            if t >= n {
                break;
            }
            for jj in start..=(start + m - 1 - t) {
                cells.push((n - t, jj));
            }
        }
        start += m;
    }
    cells
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    Shape { reason: String },
    TopRow { j: usize },
    RowSum { k: usize },
    Interlacing { upper: Cell, lower: Cell },
    Nonnegative { cell: Cell },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: Constraint,
    /// Signed slack; negative for a broken inequality, the residual for a
    /// broken equality.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenstepValidation {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Checks interlacing, row sums against `r_ordered` (column order),
/// nonnegativity and top row `= λ`, each within absolute `tol`.
pub fn validate_eigensteps(
    table: &EigenstepTable,
    lambda: &Spectrum,
    r_ordered: &[f64],
    tol: f64,
) -> EigenstepValidation {
    let mut violations = Vec::new();
    let shape_error = if lambda.len() != table.d {
        Some(format!("λ has {} entries, table d = {}", lambda.len(), table.d))
    } else if r_ordered.len() != table.n {
        Some(format!("r has {} entries, table N = {}", r_ordered.len(), table.n))
    } else {
        None
    };
    if let Some(reason) = shape_error {
        violations.push(Violation {
            constraint: Constraint::Shape { reason },
            slack: f64::NAN,
        });
        return EigenstepValidation {
            valid: false,
            violations,
        };
    }

    let top = table.padded_row(table.n);
    for (j, (&mu, &l)) in top.iter().zip(lambda.values()).enumerate() {
        if (mu - l).abs() > tol {
            violations.push(Violation {
                constraint: Constraint::TopRow { j: j + 1 },
                slack: mu - l,
            });
        }
    }
    let mut partial = 0.0;
    for k in 1..=table.n {
        partial += r_ordered[k - 1];
        let sum: f64 = table.row(k).iter().sum();
        if (sum - partial).abs() > tol {
            violations.push(Violation {
                constraint: Constraint::RowSum { k },
                slack: sum - partial,
            });
        }
    }
    for rel in table_relations(table.d, table.n) {
        let upper = table.get(rel.upper.0, rel.upper.1);
        let slack = upper - rel.lower.map_or(0.0, |(k, j)| table.get(k, j));
        if slack < -tol {
            let constraint = match rel.lower {
                Some(lower) => Constraint::Interlacing {
                    upper: rel.upper,
                    lower,
                },
                None => Constraint::Nonnegative { cell: rel.upper },
            };
            violations.push(Violation { constraint, slack });
        }
    }
    EigenstepValidation {
        valid: violations.is_empty(),
        violations,
    }
}

/// Smallest slack over the relations that are not pinned by the top row,
/// i.e. relations where at least one side is outside the forced triangles
/// and the top row.
pub(crate) fn min_unforced_slack(table: &EigenstepTable) -> (f64, Option<Relation>) {
    let forced = forced_triangle_cells(table.top_row(), table.n);
    let pinned = |c: Cell| c.0 == table.n || forced.contains(&c);
    let mut worst = (f64::INFINITY, None);
    for rel in table_relations(table.d, table.n) {
        let both_pinned = pinned(rel.upper) && rel.lower.is_some_and(pinned);
        if both_pinned {
            continue;
        }
        let slack = table.get(rel.upper.0, rel.upper.1)
            - rel.lower.map_or(0.0, |(k, j)| table.get(k, j));
        if slack < worst.0 {
            worst = (slack, Some(rel));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{norms_of, spectrum_of};
    use crate::rng::rng_from_seed;

    fn example_frame() -> Frame {
        Frame::from_real_rows(&[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]]).unwrap()
    }

    fn example_table() -> EigenstepTable {
        EigenstepTable::new(
            2,
            vec![vec![1.0], vec![2.0, 0.0], vec![2.0, 1.0], vec![2.0, 2.0]],
        )
        .unwrap()
    }

    #[test]
    fn worked_example_eigensteps() {
        let t = compute_eigensteps(&example_frame());
        assert!(t.max_abs_diff(&example_table()) < 1e-12);
        let rev = compute_eigensteps(&example_frame().reversed());
        assert!(rev.max_abs_diff(&example_table()) < 1e-12);
    }

    #[test]
    fn orthonormal_basis_eigensteps() {
        let t = compute_eigensteps(&Frame::identity(3));
        let want =
            EigenstepTable::new(3, vec![vec![1.0], vec![1.0, 1.0], vec![1.0, 1.0, 1.0]]).unwrap();
        assert!(t.max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn table_shape_is_checked() {
        assert!(EigenstepTable::new(2, vec![vec![1.0], vec![1.0]]).is_err());
        assert!(EigenstepTable::new(2, vec![]).is_err());
    }

    #[test]
    fn validation_examples() {
        let lambda = Spectrum::new(vec![2.0, 2.0]).unwrap();
        let r = [1.0; 4];
        assert!(validate_eigensteps(&example_table(), &lambda, &r, 1e-8).valid);

        let mut rows = example_table().rows().to_vec();
        rows[1][1] = 0.5;
        let bad = EigenstepTable::new(2, rows).unwrap();
        let v = validate_eigensteps(&bad, &lambda, &r, 1e-8);
        assert!(!v.valid);
        assert!(v
            .violations
            .iter()
            .any(|x| x.constraint == Constraint::RowSum { k: 2 } && (x.slack - 0.5).abs() < 1e-12));

        let mut rows = example_table().rows().to_vec();
        rows[2][1] = 2.5;
        let bad = EigenstepTable::new(2, rows).unwrap();
        let v = validate_eigensteps(&bad, &lambda, &r, 1e-8);
        assert!(v.violations.iter().any(|x| x.constraint
            == Constraint::Interlacing {
                upper: (4, 2),
                lower: (3, 2)
            }));

        let v = validate_eigensteps(&example_table(), &lambda, &r[..3], 1e-8);
        assert!(matches!(v.violations[0].constraint, Constraint::Shape { .. }));
    }

    #[test]
    fn forced_triangles() {
        assert_eq!(forced_triangle_cells(&[2.0, 2.0], 4), vec![(3, 1)]);
        assert_eq!(
            forced_triangle_cells(&[1.0, 1.0, 1.0], 5),
            vec![(4, 1), (4, 2), (3, 1)]
        );
        assert_eq!(
            forced_triangle_cells(&[3.0, 1.0, 1.0], 4),
            vec![(3, 2)]
        );
        assert!(forced_triangle_cells(&[3.0, 2.0, 1.0], 4).is_empty());
    }

    #[test]
    fn computed_tables_validate() {
        let mut rng = rng_from_seed(9);
        for (d, n) in [(1usize, 3usize), (2, 2), (2, 5), (3, 6), (4, 8)] {
            let f = Frame::new(crate::frame::complex_gaussian(&mut rng, d, n)).unwrap();
            let t = compute_eigensteps(&f);
            let v = validate_eigensteps(&t, &spectrum_of(&f).unwrap(), &norms_of(&f), 1e-8);
            assert!(v.valid, "{:?}", v.violations);
        }
    }
}
