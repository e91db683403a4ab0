//! Spark, full-spark tests and Plücker coordinates.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::exec::{map_indexed, Execution};
use crate::frame::{singular_values, CMatrix, Frame, C64};

pub const DEFAULT_SPARK_TOL: f64 = 1e-9;
/// Largest number of `d x d` minors enumerated.
pub const MAX_MINORS: u128 = 10_000_000;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparkReport {
    pub spark: usize,
    /// 1-based indices of a minimal dependent subset; absent for full spark.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<usize>>,
    pub min_abs_minor: f64,
    pub tol_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PluckerProduct {
    /// Product of all coordinates; may over- or underflow, see `log_modulus`.
    pub product: C64,
    /// Natural log of `|product|`; `-inf` when some coordinate vanishes.
    pub log_modulus: f64,
    pub min_modulus: f64,
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Lexicographic `k`-subsets of `0..n`.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Self {
            n,
            current: (k <= n).then(|| (0..k).collect()),
        }
    }

    /// Starts at the subset of lexicographic rank `rank`.
    fn from_rank(n: usize, k: usize, mut rank: u128) -> Self {
        let mut out = Vec::with_capacity(k);
        let mut next = 0;
        for slot in 0..k {
            let mut c = next;
            loop {
                let after = binomial(n - c - 1, k - slot - 1);
                if rank < after {
                    break;
                }
                rank -= after;
                c += 1;
            }
            out.push(c);
            next = c + 1;
        }
        Self {
            n,
            current: Some(out),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut c = out.clone();
        let mut i = k;
        let advanced = loop {
            if i == 0 {
                break false;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for t in i + 1..k {
                    c[t] = c[t - 1] + 1;
                }
                break true;
            }
        };
        self.current = advanced.then_some(c);
        Some(out)
    }
}

fn check_minor_count(f: &Frame) -> Result<u128> {
    let count = binomial(f.n(), f.d());
    if count > MAX_MINORS {
        return Err(FrameError::SearchTooLarge(format!(
            "C({}, {}) = {count} minors exceeds {MAX_MINORS}",
            f.n(),
            f.d()
        )));
    }
    Ok(count)
}

fn submatrix(f: &Frame, cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(f.d(), cols.len(), |i, j| f.matrix()[(i, cols[j])])
}

fn minor(f: &Frame, cols: &[usize]) -> C64 {
    submatrix(f, cols).lu().determinant()
}

/// Smallest minor modulus, and the first subset (lexicographically) whose
/// minor modulus is at most `threshold`.
fn scan_minors(f: &Frame, threshold: f64, mode: Execution) -> Result<(f64, Option<Vec<usize>>)> {
    let total = check_minor_count(f)?;
    let (n, d) = (f.n(), f.d());
    let chunks = total.div_ceil(CHUNK as u128) as usize;
    let partial = map_indexed(mode, chunks, |c| {
        let start = c as u128 * CHUNK as u128;
        let len = (total - start).min(CHUNK as u128) as usize;
        let mut best = f64::INFINITY;
        let mut first = None;
        for cols in Combinations::from_rank(n, d, start).take(len) {
            let m = minor(f, &cols).norm();
            best = best.min(m);
            if first.is_none() && m <= threshold {
                first = Some(cols);
            }
        }
        (best, first)
    });
    let min = partial.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let first = partial.into_iter().find_map(|p| p.1);
    Ok((min, first))
}

fn one_based(v: Vec<usize>) -> Vec<usize> {
    v.into_iter().map(|i| i + 1).collect()
}

/// Size of the smallest column subset with smallest singular value at most
/// `tol · σ_max(F)`; `d + 1` when every `d x d` minor exceeds `tol · σ_max^d`.
pub fn spark(f: &Frame, tol: f64) -> Result<SparkReport> {
    spark_with(f, tol, Execution::default())
}

pub fn spark_with(f: &Frame, tol: f64, mode: Execution) -> Result<SparkReport> {
    let (n, d) = (f.n(), f.d());
    if n < d {
        return Err(FrameError::Precondition(format!(
            "spark needs N >= d, got N = {n}, d = {d}"
        )));
    }
    let sigma_max = singular_values(f.matrix()).first().copied().unwrap_or(0.0);
    let tol_used = tol * sigma_max.powi(d as i32);
    let (min_abs_minor, first_small) = scan_minors(f, tol_used, mode)?;
    if min_abs_minor > tol_used {
        return Ok(SparkReport {
            spark: d + 1,
            witness: None,
            min_abs_minor,
            tol_used,
        });
    }
    let rank_gate = tol * sigma_max;
    for m in 1..d {
        for cols in Combinations::new(n, m) {
            let s = singular_values(&submatrix(f, &cols));
            if s.last().copied().unwrap_or(0.0) <= rank_gate {
                return Ok(SparkReport {
                    spark: m,
                    witness: Some(one_based(cols)),
                    min_abs_minor,
                    tol_used,
                });
            }
        }
    }
    Ok(SparkReport {
        spark: d,
        witness: first_small.map(one_based),
        min_abs_minor,
        tol_used,
    })
}

/// Every `d x d` minor has modulus above `tol · σ_max(F)^d`.
pub fn is_full_spark(f: &Frame, tol: f64) -> Result<bool> {
    if f.n() < f.d() {
        return Ok(false);
    }
    let sigma_max = singular_values(f.matrix()).first().copied().unwrap_or(0.0);
    let tol_used = tol * sigma_max.powi(f.d() as i32);
    let (min, _) = scan_minors(f, tol_used, Execution::default())?;
    Ok(min > tol_used)
}

/// All `d x d` minors, keyed by 1-based column sets in lexicographic order.
pub fn plucker_coordinates(f: &Frame) -> Result<Vec<(Vec<usize>, C64)>> {
    check_minor_count(f)?;
    Ok(Combinations::new(f.n(), f.d())
        .map(|cols| {
            let m = minor(f, &cols);
            (one_based(cols), m)
        })
        .collect())
}

/// Product of all Plücker coordinates, accumulated as log-modulus plus phase.
pub fn plucker_product(f: &Frame) -> Result<PluckerProduct> {
    let coords = plucker_coordinates(f)?;
    let mut log_modulus = 0.0;
    let mut phase = C64::new(1.0, 0.0);
    let mut min_modulus = f64::INFINITY;
    for (_, c) in &coords {
        let m = c.norm();
        min_modulus = min_modulus.min(m);
        if m == 0.0 {
            log_modulus = f64::NEG_INFINITY;
        } else {
            log_modulus += m.ln();
            phase *= c / m;
        }
    }
    let product = if log_modulus == f64::NEG_INFINITY {
        C64::new(0.0, 0.0)
    } else {
        phase * log_modulus.exp()
    };
    Ok(PluckerProduct {
        product,
        log_modulus,
        min_modulus,
    })
}
