//! Orthodecomposability, stabilizers, momentum-map rank and the singular cone.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::frame::{frobenius, singular_values, spectrum_of, CMatrix, Frame, TangentMatrix, C64};

pub const DEFAULT_ODF_TOL: f64 = 1e-9;
pub const DEFAULT_CONE_TOL: f64 = 1e-8;
/// Relative singular-value threshold for every rank and nullity here.
pub const RANK_TOL: f64 = 1e-8;

/// Column groups spanning mutually orthogonal subspaces. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdfPartition {
    pub parts: Vec<Vec<usize>>,
    pub subspace_dims: Vec<usize>,
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    let s = m.singular_values();
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > RANK_TOL * max).count()
}

fn complex_rank(m: &CMatrix) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&max) if max > 0.0 => s.iter().filter(|&&v| v > RANK_TOL * max).count(),
        _ => 0,
    }
}

fn columns(f: &Frame, ids: &[usize]) -> CMatrix {
    CMatrix::from_fn(f.d(), ids.len(), |i, j| f.matrix()[(i, ids[j])])
}

fn connected(f: &Frame, i: usize, j: usize, tol: f64) -> bool {
    let (a, b) = (f.matrix().column(i), f.matrix().column(j));
    a.dotc(&b).norm() > tol * a.norm() * b.norm()
}

/// Finest splitting of the columns into mutually orthogonal groups: the
/// connected components of the graph joining columns with
/// `|⟨f_i, f_j⟩| > tol ‖f_i‖ ‖f_j‖`. `None` when there is a single group.
pub fn is_orthodecomposable(f: &Frame, tol: f64) -> Result<Option<OdfPartition>> {
    spectrum_of(f)?;
    let n = f.n();
    let mut component = vec![usize::MAX; n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for root in 0..n {
        if component[root] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut members = vec![root];
        component[root] = id;
        let mut cursor = 0;
        while cursor < members.len() {
            let i = members[cursor];
            for j in 0..n {
                if component[j] == usize::MAX && connected(f, i, j, tol) {
                    component[j] = id;
                    members.push(j);
                }
            }
            cursor += 1;
        }
        members.sort_unstable();
        parts.push(members);
    }
    if parts.len() < 2 {
        return Ok(None);
    }
    let subspace_dims = parts.iter().map(|p| complex_rank(&columns(f, p))).collect();
    Ok(Some(OdfPartition {
        parts: parts
            .into_iter()
            .map(|p| p.into_iter().map(|i| i + 1).collect())
            .collect(),
        subspace_dims,
    }))
}

/// Real coordinates of a complex matrix: real parts then imaginary parts.
fn realify(m: &CMatrix) -> Vec<f64> {
    m.iter().map(|z| z.re).chain(m.iter().map(|z| z.im)).collect()
}

/// Basis of skew-Hermitian `d x d` matrices (`d²` real directions).
fn skew_hermitian_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for p in 0..d {
        let mut m = CMatrix::zeros(d, d);
        m[(p, p)] = C64::new(0.0, 1.0);
        out.push(m);
    }
    for p in 0..d {
        for q in p + 1..d {
            let mut re = CMatrix::zeros(d, d);
            re[(p, q)] = C64::new(1.0, 0.0);
            re[(q, p)] = C64::new(-1.0, 0.0);
            out.push(re);
            let mut im = CMatrix::zeros(d, d);
            im[(p, q)] = C64::new(0.0, 1.0);
            im[(q, p)] = C64::new(0.0, 1.0);
            out.push(im);
        }
    }
    out
}

/// Real dimension of `{(ξ, θ) : ξ f_j = i θ_j f_j (j < N), ξ f_N = 0}` with
/// `ξ` skew-Hermitian.
pub fn stabilizer_dimension(f: &Frame) -> usize {
    let (d, n) = (f.d(), f.n());
    let mut cols: Vec<Vec<f64>> = skew_hermitian_basis(d)
        .iter()
        .map(|xi| realify(&(xi * f.matrix())))
        .collect();
    for j in 0..n.saturating_sub(1) {
        let mut m = CMatrix::zeros(d, n);
        m.set_column(j, &(f.matrix().column(j) * C64::new(0.0, -1.0)));
        cols.push(realify(&m));
    }
    let unknowns = cols.len();
    let system = DMatrix::from_fn(2 * d * n, unknowns, |i, j| cols[j][i]);
    unknowns - numerical_rank(&system)
}

/// Real coordinates of a Hermitian matrix: diagonal, then upper real and
/// imaginary parts.
fn hermitian_coords(h: &CMatrix) -> Vec<f64> {
    let d = h.nrows();
    let mut out: Vec<f64> = (0..d).map(|p| h[(p, p)].re).collect();
    for p in 0..d {
        for q in p + 1..d {
            out.push(h[(p, q)].re);
            out.push(h[(p, q)].im);
        }
    }
    out
}

/// Rank of `X ↦ (−FX* − XF*, (2 Re⟨f_j, x_j⟩)_{j<N})`, a real-linear map
/// from `2dN` to `d² + N − 1` dimensions.
pub fn momentum_jacobian_rank(f: &Frame) -> usize {
    let (d, n) = (f.d(), f.n());
    let fm = f.matrix();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(2 * d * n);
    for unit in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
        for j in 0..n {
            for p in 0..d {
                let mut x = CMatrix::zeros(d, n);
                x[(p, j)] = unit;
                let h = -(fm * x.adjoint()) - &x * fm.adjoint();
                let mut v = hermitian_coords(&h);
                for jj in 0..n.saturating_sub(1) {
                    let inner = fm.column(jj).dotc(&x.column(jj));
                    v.push(2.0 * inner.re);
                }
                cols.push(v);
            }
        }
    }
    let rows = d * d + n - 1;
    let m = DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i]);
    numerical_rank(&m)
}

fn check_partition(f: &Frame, partition: &OdfPartition) -> Result<Vec<Vec<usize>>> {
    let n = f.n();
    let mut seen = vec![false; n];
    let mut parts = Vec::with_capacity(partition.parts.len());
    for part in &partition.parts {
        let mut zero_based = Vec::with_capacity(part.len());
        for &i in part {
            if i == 0 || i > n || seen[i - 1] {
                return Err(FrameError::InvalidPartition(format!(
                    "index {i} is out of range or repeated"
                )));
            }
            seen[i - 1] = true;
            zero_based.push(i - 1);
        }
        parts.push(zero_based);
    }
    if seen.iter().any(|s| !s) {
        return Err(FrameError::InvalidPartition("parts do not cover every column".into()));
    }
    for (a, pa) in parts.iter().enumerate() {
        for pb in &parts[a + 1..] {
            for &i in pa {
                for &j in pb {
                    if connected(f, i, j, RANK_TOL) {
                        return Err(FrameError::InvalidPartition(format!(
                            "columns {} and {} are in different parts but not orthogonal",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
    }
    Ok(parts)
}

/// Orthogonal projector onto the span of the given columns.
fn span_projector(f: &Frame, ids: &[usize]) -> CMatrix {
    let block = columns(f, ids);
    let svd = block.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let s = &svd.singular_values;
    let max = s.iter().copied().fold(0.0, f64::max);
    let mut p = CMatrix::zeros(f.d(), f.d());
    for (i, &sv) in s.iter().enumerate() {
        if sv > RANK_TOL * max {
            let c = u.column(i);
            p += c.clone() * c.adjoint();
        }
    }
    p
}

/// Whether `X` lies in the tangent cone at the orthodecomposable frame `F`:
/// `FX* = 0`, `⟨f_j, x_j⟩ = 0` for `j < N`, and for every part `k`
/// `Σ_{m≠k} (‖X^{km}‖² − ‖X^{mk}‖²) = 0`, where `X^{km}` is the component
/// of the columns of part `m` in the span of part `k`.
pub fn cone_membership(f: &Frame, partition: &OdfPartition, x: &TangentMatrix, tol: f64) -> Result<bool> {
    if x.shape() != (f.d(), f.n()) {
        return Err(FrameError::DimensionMismatch(format!(
            "tangent is {:?}, frame is {}x{}",
            x.shape(),
            f.d(),
            f.n()
        )));
    }
    let parts = check_partition(f, partition)?;
    let xm = x.matrix();
    let x_norm = frobenius(xm);
    let linear_scale = frobenius(f.matrix()) * x_norm;
    if frobenius(&(f.matrix() * xm.adjoint())) > tol * linear_scale {
        return Ok(false);
    }
    for j in 0..f.n().saturating_sub(1) {
        if f.matrix().column(j).dotc(&xm.column(j)).norm() > tol * linear_scale {
            return Ok(false);
        }
    }
    let projectors: Vec<CMatrix> = parts.iter().map(|p| span_projector(f, p)).collect();
    // block_norm[k][m] = ‖X^{km}‖².
    let block_norm: Vec<Vec<f64>> = projectors
        .iter()
        .map(|pk| {
            parts
                .iter()
                .map(|pm| {
                    pm.iter()
                        .map(|&j| (pk * xm.column(j)).norm_squared())
                        .sum()
                })
                .collect()
        })
        .collect();
    let quad_scale = x_norm * x_norm;
    for k in 0..parts.len() {
        let q: f64 = (0..parts.len())
            .filter(|&m| m != k)
            .map(|m| block_norm[k][m] - block_norm[m][k])
            .sum();
        if q.abs() > tol * quad_scale {
            return Ok(false);
        }
    }
    Ok(true)
}
