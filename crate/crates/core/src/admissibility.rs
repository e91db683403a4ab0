//! Classification of `(λ, r)` pairs: emptiness, admissibility, smoothness
//! and dimension counts.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::frame::{NormVector, Spectrum};

/// Largest `N` accepted by the partition search.
pub const MAX_PARTITION_N: usize = 24;
/// Relative tolerance for sum equalities and partial-sum inequalities.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityVerdict {
    pub admissible: bool,
    pub strong: bool,
    /// First `k` (1-based) where a partial-sum inequality fails, or where it
    /// holds with equality when the pair is admissible but not strong. A pure
    /// total-sum mismatch reports `N`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failing_index: Option<usize>,
    /// `Σr − Σλ` when the totals differ beyond tolerance.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sum_mismatch: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceKind {
    Empty,
    SingularVariety,
    SmoothManifold,
}

/// A proper split of the data: `r_I` is `λ_J`-admissible and the
/// complements are admissible for each other. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionWitness {
    #[serde(rename = "I")]
    pub norm_indices: Vec<usize>,
    #[serde(rename = "J")]
    pub spectrum_indices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceClassification {
    pub kind: SpaceKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<PartitionWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub dim_frame_space: i64,
    pub dim_quotient: i64,
    pub dim_polytope: i64,
}

fn sum_tol(lambda: &[f64]) -> f64 {
    SUM_TOL * lambda.iter().sum::<f64>().max(1.0)
}

/// Admissibility of raw sorted lists. `r` is padded with zeros when shorter
/// than `λ`.
pub(crate) fn admissibility_of(lambda: &[f64], r: &[f64]) -> AdmissibilityVerdict {
    let d = lambda.len();
    let tol = sum_tol(lambda);
    let total_l: f64 = lambda.iter().sum();
    let total_r: f64 = r.iter().sum();
    let mismatch = total_r - total_l;
    let sums_match = mismatch.abs() <= tol;

    let mut first_violation = None;
    let mut first_equality = None;
    let (mut pl, mut pr) = (0.0, 0.0);
    for k in 0..d {
        pl += lambda[k];
        pr += r.get(k).copied().unwrap_or(0.0);
        if pr > pl + tol {
            first_violation.get_or_insert(k + 1);
        } else if pr >= pl - tol {
            first_equality.get_or_insert(k + 1);
        }
    }
    let admissible = sums_match && first_violation.is_none();
    let strong = admissible && first_equality.is_none();
    let failing_index = if strong {
        None
    } else if !admissible {
        first_violation.or(Some(r.len().max(d)))
    } else {
        first_equality
    };
    AdmissibilityVerdict {
        admissible,
        strong,
        failing_index,
        sum_mismatch: (!sums_match).then_some(mismatch),
    }
}

/// Checks `Σr = Σλ` and the partial-sum inequalities `Σ_{i≤k} r_i ≤ Σ_{i≤k} λ_i`.
pub fn check_admissible(lambda: &Spectrum, r: &NormVector) -> AdmissibilityVerdict {
    admissibility_of(lambda.values(), r.values())
}

fn check_search_size(r: &NormVector) -> Result<()> {
    if r.len() > MAX_PARTITION_N {
        return Err(FrameError::SearchTooLarge(format!(
            "partition search supports N <= {MAX_PARTITION_N}, got {}",
            r.len()
        )));
    }
    Ok(())
}

/// Depth-first walk over subsets of `values` whose sum hits `target`, in
/// lexicographic order of index lists. Stops when `visit` returns `Some`.
struct SubsetSearch<'a> {
    values: &'a [f64],
    suffix: Vec<f64>,
    target: f64,
    tol: f64,
}

impl<'a> SubsetSearch<'a> {
    fn new(values: &'a [f64], target: f64, tol: f64) -> Self {
        let mut suffix = vec![0.0; values.len() + 1];
        for i in (0..values.len()).rev() {
            suffix[i] = suffix[i + 1] + values[i];
        }
        Self {
            values,
            suffix,
            target,
            tol,
        }
    }

    fn run<T>(&self, visit: &mut impl FnMut(&[usize]) -> Option<T>) -> Option<T> {
        let mut stack = Vec::new();
        self.descend(0, 0.0, &mut stack, visit)
    }

    fn descend<T>(
        &self,
        from: usize,
        sum: f64,
        stack: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]) -> Option<T>,
    ) -> Option<T> {
        for i in from..self.values.len() {
            let s = sum + self.values[i];
            if s > self.target + self.tol {
                // Later entries are no larger, but still positive; keep scanning.
                continue;
            }
            if s + self.suffix[i + 1] < self.target - self.tol {
                // Even taking everything after i falls short, and later
                // starting points only have less available.
                break;
            }
            stack.push(i);
            if (s - self.target).abs() <= self.tol && stack.len() < self.values.len() {
                if let Some(found) = visit(stack) {
                    return Some(found);
                }
            }
            if let Some(found) = self.descend(i + 1, s, stack, visit) {
                return Some(found);
            }
            stack.pop();
        }
        None
    }
}

fn complement(indices: &[usize], n: usize) -> Vec<usize> {
    (0..n).filter(|i| !indices.contains(i)).collect()
}

fn pick(values: &[f64], indices: &[usize]) -> Vec<f64> {
    indices.iter().map(|&i| values[i]).collect()
}

/// Lexicographically smallest witness `(J, then I)`, if any.
pub fn partition_witness(lambda: &Spectrum, r: &NormVector) -> Result<Option<PartitionWitness>> {
    check_search_size(r)?;
    let lam = lambda.values();
    let rv = r.values();
    let (d, n) = (lam.len(), rv.len());
    if d < 2 {
        return Ok(None);
    }
    let tol = sum_tol(lam);
    let mut j_sets = Vec::new();
    // Every nonempty proper J, lexicographic. d <= N <= 24 keeps this bounded.
    lex_subsets(d, &mut Vec::new(), 0, &mut j_sets);
    for j_set in j_sets {
        let lam_in = pick(lam, &j_set);
        let lam_out = pick(lam, &complement(&j_set, d));
        let target: f64 = lam_in.iter().sum();
        let search = SubsetSearch::new(rv, target, tol);
        let found = search.run(&mut |i_set: &[usize]| {
            let r_in = pick(rv, i_set);
            let r_out = pick(rv, &complement(i_set, n));
            let ok = admissibility_of(&lam_in, &r_in).admissible
                && admissibility_of(&lam_out, &r_out).admissible;
            ok.then(|| i_set.to_vec())
        });
        if let Some(i_set) = found {
            return Ok(Some(PartitionWitness {
                norm_indices: i_set.iter().map(|i| i + 1).collect(),
                spectrum_indices: j_set.iter().map(|j| j + 1).collect(),
            }));
        }
    }
    Ok(None)
}

fn lex_subsets(n: usize, stack: &mut Vec<usize>, from: usize, out: &mut Vec<Vec<usize>>) {
    for i in from..n {
        stack.push(i);
        if stack.len() < n {
            out.push(stack.clone());
        }
        lex_subsets(n, stack, i + 1, out);
        stack.pop();
    }
}

/// Empty, singular variety (with a witness) or smooth manifold.
pub fn classify_space(lambda: &Spectrum, r: &NormVector) -> Result<SpaceClassification> {
    check_search_size(r)?;
    if !check_admissible(lambda, r).admissible {
        return Ok(SpaceClassification {
            kind: SpaceKind::Empty,
            witness: None,
        });
    }
    Ok(match partition_witness(lambda, r)? {
        Some(w) => SpaceClassification {
            kind: SpaceKind::SingularVariety,
            witness: Some(w),
        },
        None => SpaceClassification {
            kind: SpaceKind::SmoothManifold,
            witness: None,
        },
    })
}

/// Dimension counts from `d`, `N` and the multiplicities of `λ`.
pub(crate) fn dimensions_from(d: usize, n: usize, multiplicities: &[usize]) -> DimensionReport {
    let (d, n) = (d as i64, n as i64);
    let ksq: i64 = multiplicities.iter().map(|&k| (k * k) as i64).sum();
    let dim_quotient = 2 * n * (d - 1) + 2 - d * d - ksq;
    DimensionReport {
        dim_frame_space: 2 * d * n - n + 1 - ksq,
        dim_quotient,
        dim_polytope: dim_quotient / 2,
    }
}

/// Real dimensions of the frame space, its quotient by `U(d)` and the eigenstep polytope.
pub fn frame_space_dimensions(lambda: &Spectrum, r: &NormVector) -> Result<DimensionReport> {
    let verdict = check_admissible(lambda, r);
    if !verdict.strong {
        return Err(FrameError::Precondition(format!(
            "r is not strongly λ-admissible (index {})",
            verdict.failing_index.unwrap_or(0)
        )));
    }
    Ok(dimensions_from(lambda.len(), r.len(), &lambda.multiplicities()))
}
