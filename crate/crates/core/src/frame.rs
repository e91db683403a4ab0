//! Dense complex frames and the operators built from them.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, FrameError, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Entrywise tolerance for the Hermitian check.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative tolerance under which two eigenvalues count as equal.
pub const MULTIPLICITY_TOL: f64 = 1e-8;
/// Smallest eigenvalue of `FF*`, relative to the largest, for `F` to count as spanning.
pub const SPAN_TOL: f64 = 1e-10;

/// Two spectral values are grouped when `|a - b| <= 1e-8 * max(1, |a|)`.
pub fn values_tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= MULTIPLICITY_TOL * a.abs().max(1.0)
}

/// A `d x N` complex matrix whose columns are the frame vectors, in order.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    entries: CMatrix,
}

impl Frame {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(invalid("frame", "dimensions must be positive"));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("frame", "entries must be finite"));
        }
        Ok(Self { entries })
    }

    /// Builds a frame from row-major complex entries.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let d = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(FrameError::DimensionMismatch(format!(
                "row {} has {} entries, expected {}",
                i + 1,
                row.len(),
                n
            )));
        }
        Self::new(CMatrix::from_fn(d, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_columns(columns: &[DVector<C64>]) -> Result<Self> {
        if columns.is_empty() {
            return Err(invalid("frame", "no columns"));
        }
        let d = columns[0].len();
        if columns.iter().any(|c| c.len() != d) {
            return Err(FrameError::DimensionMismatch(
                "columns have different lengths".into(),
            ));
        }
        Self::new(CMatrix::from_columns(columns))
    }

    pub fn identity(d: usize) -> Self {
        Self {
            entries: CMatrix::identity(d, d),
        }
    }

    /// Ambient dimension.
    pub fn d(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of frame vectors.
    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    /// Column `i` (zero-based).
    pub fn column(&self, i: usize) -> DVector<C64> {
        self.entries.column(i).into_owned()
    }

    /// Frame with columns in reverse order.
    pub fn reversed(&self) -> Self {
        let n = self.n();
        Self {
            entries: CMatrix::from_fn(self.d(), n, |i, j| self.entries[(i, n - 1 - j)]),
        }
    }

    /// `A F` for a `d x d` matrix `A`.
    pub fn left_mul(&self, a: &CMatrix) -> Result<Self> {
        if a.ncols() != self.d() || a.nrows() != self.d() {
            return Err(FrameError::DimensionMismatch(format!(
                "left factor is {}x{}, frame has d = {}",
                a.nrows(),
                a.ncols(),
                self.d()
            )));
        }
        Ok(Self {
            entries: a * &self.entries,
        })
    }

    /// Multiplies column `i` by `phases[i]`.
    pub fn scale_columns(&self, phases: &[C64]) -> Result<Self> {
        if phases.len() != self.n() {
            return Err(FrameError::DimensionMismatch(format!(
                "{} column factors for {} columns",
                phases.len(),
                self.n()
            )));
        }
        let mut entries = self.entries.clone();
        for (j, &p) in phases.iter().enumerate() {
            entries.column_mut(j).iter_mut().for_each(|z| *z *= p);
        }
        Ok(Self { entries })
    }

    /// Has rank `d`.
    pub fn spans(&self) -> bool {
        spectrum_values(self).is_some_and(|v| is_spanning(&v))
    }
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(FrameError::DimensionMismatch(format!(
                "operator is {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = max_asymmetry(&entries);
        if asym > HERMITIAN_TOL {
            return Err(FrameError::NotHermitian(asym));
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_trusted(mut entries: CMatrix) -> Self {
        symmetrize(&mut entries);
        Self { entries }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }
}

fn max_asymmetry(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn symmetrize(m: &mut CMatrix) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)].im = 0.0;
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
}

/// A frame spectrum: strictly positive, nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_sorted_positive("spectrum", &values)?;
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Block sizes of tied values, in order.
    pub fn multiplicities(&self) -> Vec<usize> {
        group_multiplicities(&self.values)
    }

    /// Sum of squared multiplicities.
    pub fn multiplicity_square_sum(&self) -> usize {
        self.multiplicities().iter().map(|k| k * k).sum()
    }
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = FrameError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Self {
        s.values
    }
}

/// Squared column norms, sorted nonincreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct NormVector {
    values: Vec<f64>,
}

impl NormVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_sorted_positive("norm vector", &values)?;
        Ok(Self { values })
    }

    /// Sorts a list of positive norms into canonical order.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for NormVector {
    type Error = FrameError;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<NormVector> for Vec<f64> {
    fn from(s: NormVector) -> Self {
        s.values
    }
}

fn check_sorted_positive(what: &'static str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid(what, "must be nonempty"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(invalid(what, format!("entries must be positive and finite, got {v}")));
    }
    if let Some(w) = values.windows(2).position(|w| w[1] > w[0]) {
        return Err(invalid(
            what,
            format!("must be nonincreasing (entry {} < entry {})", w + 1, w + 2),
        ));
    }
    Ok(())
}

pub(crate) fn group_multiplicities(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values_tied(values[i], values[j]) {
            j += 1;
        }
        out.push(j - i);
        i = j;
    }
    out
}

/// An element of the tangent space `T_F C^{d x N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentMatrix {
    entries: CMatrix,
}

impl TangentMatrix {
    pub fn new(entries: CMatrix) -> Self {
        Self { entries }
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        Self {
            entries: CMatrix::zeros(d, n),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn shape(&self) -> (usize, usize) {
        self.entries.shape()
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            entries: &self.entries * c,
        }
    }
}

/// Eigen-decomposition of a Hermitian operator, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
///
/// Each eigenvector is rotated so that its largest-modulus entry is real and
/// positive, which makes the output reproducible.
pub fn hermitian_eig(h: &HermitianOperator) -> HermitianEigen {
    let n = h.n();
    let eig = nalgebra::SymmetricEigen::new(h.matrix().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        fix_phase(&mut v);
        vectors.set_column(dst, &v);
    }
    HermitianEigen { values, vectors }
}

/// Rotates `v` so its largest-modulus entry is real positive.
pub fn fix_phase(v: &mut DVector<C64>) {
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mod * (1.0 + 1e-12) {
            best = i;
            best_mod = m;
        }
    }
    if best_mod > 0.0 {
        let phase = v[best].conj() / best_mod;
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// `FF*`.
pub fn frame_operator(f: &Frame) -> HermitianOperator {
    let m = f.matrix();
    HermitianOperator::from_trusted(m * m.adjoint())
}

/// `S_k = f_1 f_1* + … + f_k f_k*` for `1 <= k <= N`.
pub fn partial_frame_operator(f: &Frame, k: usize) -> Result<HermitianOperator> {
    if k == 0 || k > f.n() {
        return Err(FrameError::IndexOutOfRange(format!(
            "k = {k} not in 1..={}",
            f.n()
        )));
    }
    let cols = f.matrix().columns(0, k);
    Ok(HermitianOperator::from_trusted(cols.clone() * cols.adjoint()))
}

/// `F*F`.
pub fn gram_matrix(f: &Frame) -> HermitianOperator {
    let m = f.matrix();
    HermitianOperator::from_trusted(m.adjoint() * m)
}

/// Squared column norms in column order.
pub fn norms_of(f: &Frame) -> Vec<f64> {
    f.matrix()
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum())
        .collect()
}

fn spectrum_values(f: &Frame) -> Option<Vec<f64>> {
    let v = hermitian_eig(&frame_operator(f)).values;
    Some(v)
}

fn is_spanning(values: &[f64]) -> bool {
    let max = values.first().copied().unwrap_or(0.0);
    let min = values.last().copied().unwrap_or(0.0);
    max > 0.0 && min > SPAN_TOL * max
}

/// Descending eigenvalues of `FF*`; fails when `F` does not span.
pub fn spectrum_of(f: &Frame) -> Result<Spectrum> {
    let values = spectrum_values(f).unwrap_or_default();
    if !is_spanning(&values) {
        return Err(FrameError::NotAFrame(values.last().copied().unwrap_or(0.0)));
    }
    Spectrum::new(values)
}

/// `ω(X, Y) = -Im tr(Y* X)`.
pub fn symplectic_pairing(x: &TangentMatrix, y: &TangentMatrix) -> Result<f64> {
    if x.shape() != y.shape() {
        return Err(FrameError::DimensionMismatch(format!(
            "{:?} vs {:?}",
            x.shape(),
            y.shape()
        )));
    }
    // tr(Y* X) = sum_ij conj(Y_ij) X_ij
    let s: C64 = x
        .matrix()
        .iter()
        .zip(y.matrix().iter())
        .map(|(a, b)| b.conj() * a)
        .sum();
    Ok(-s.im)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular values of a complex matrix, descending.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Standard complex Gaussian matrix (entries with `E|z|^2 = 1`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian with `R` given a
/// positive real diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let z = complex_gaussian(rng, n, n);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let rjj = r[(j, j)];
        let m = rjj.norm();
        if m > 0.0 {
            let phase = rjj / m;
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}

/// Uniform random unit complex number.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar(1.0, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn example_frame() -> Frame {
        Frame::from_real_rows(&[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]]).unwrap()
    }

    fn random_hermitian(seed: u64, n: usize) -> HermitianOperator {
        let mut rng = rng_from_seed(seed);
        let z = complex_gaussian(&mut rng, n, n);
        HermitianOperator::from_trusted(&z + z.adjoint())
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn eig_of_identity_and_diagonal() {
        let e = hermitian_eig(&HermitianOperator::new(CMatrix::identity(3, 3)).unwrap());
        assert_eq!(e.values.len(), 3);
        for v in &e.values {
            assert_close(*v, 1.0, 1e-14);
        }
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(2.0, 0.0);
        let e = hermitian_eig(&HermitianOperator::new(m).unwrap());
        assert_close(e.values[0], 2.0, 1e-14);
        assert_close(e.values[1], 0.0, 1e-14);
        assert_close(e.vectors[(0, 0)].re, 1.0, 1e-14);
        assert_close(e.vectors[(1, 1)].norm(), 1.0, 1e-14);
    }

    #[test]
    fn eig_of_example_partial_operator() {
        let s2 = partial_frame_operator(&example_frame(), 2).unwrap();
        let e = hermitian_eig(&s2);
        assert_close(e.values[0], 2.0, 1e-14);
        assert_close(e.values[1], 0.0, 1e-14);
    }

    #[test]
    fn eig_reconstruction_up_to_64() {
        for (seed, n) in [(1u64, 1usize), (2, 2), (3, 5), (4, 17), (5, 40), (6, 64)] {
            let h = random_hermitian(seed, n);
            let e = hermitian_eig(&h);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            let d = CMatrix::from_diagonal(&DVector::from_iterator(
                n,
                e.values.iter().map(|&v| C64::new(v, 0.0)),
            ));
            let rec = &e.vectors * d * e.vectors.adjoint();
            let rel = frobenius(&(h.matrix() - rec)) / frobenius(h.matrix());
            assert!(rel <= 1e-10, "n = {n}: residual {rel:e}");
            let gram = e.vectors.adjoint() * &e.vectors;
            let orth = frobenius(&(gram - CMatrix::identity(n, n)));
            assert!(orth <= 1e-12 * (n as f64).max(1.0), "n = {n}: orthonormality {orth:e}");
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(FrameError::NotHermitian(_))
        ));
    }

    #[test]
    fn frame_operator_examples() {
        let s = frame_operator(&example_frame());
        assert_eq!(s.matrix(), &CMatrix::from_diagonal_element(2, 2, C64::new(2.0, 0.0)));
        let id = frame_operator(&Frame::identity(3));
        assert_eq!(id.matrix(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn unit_norm_frame_trace() {
        let mut rng = rng_from_seed(11);
        let mut z = complex_gaussian(&mut rng, 2, 5);
        for mut c in z.column_iter_mut() {
            let n = c.norm();
            c /= C64::new(n, 0.0);
        }
        let f = Frame::new(z).unwrap();
        assert_close(frame_operator(&f).trace(), 5.0, 1e-12);
    }

    #[test]
    fn partial_operators() {
        let f = example_frame();
        let s1 = partial_frame_operator(&f, 1).unwrap();
        let s3 = partial_frame_operator(&f, 3).unwrap();
        let diag = |a: f64, b: f64| {
            CMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(a, 0.0), C64::new(b, 0.0)]))
        };
        assert_eq!(s1.matrix(), &diag(1.0, 0.0));
        assert_eq!(s3.matrix(), &diag(2.0, 1.0));
        assert_eq!(
            partial_frame_operator(&f, 4).unwrap(),
            frame_operator(&f)
        );
        assert!(partial_frame_operator(&f, 0).is_err());
        assert!(partial_frame_operator(&f, 5).is_err());
    }

    #[test]
    fn gram_of_worked_example() {
        let g = gram_matrix(&example_frame());
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let expected = CMatrix::from_row_slice(
            4,
            4,
            &[
                one, one, zero, zero, one, one, zero, zero, zero, zero, one, one, zero, zero, one,
                one,
            ],
        );
        assert_eq!(g.matrix(), &expected);
        assert_eq!(gram_matrix(&Frame::identity(3)).matrix(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn gram_and_frame_operator_share_spectrum() {
        let mut rng = rng_from_seed(5);
        let f = Frame::new(complex_gaussian(&mut rng, 3, 7)).unwrap();
        let a = hermitian_eig(&frame_operator(&f)).values;
        let b = hermitian_eig(&gram_matrix(&f)).values;
        for (x, y) in a.iter().zip(&b) {
            assert_close(*x, *y, 1e-9);
        }
        for y in &b[3..] {
            assert_close(*y, 0.0, 1e-9);
        }
        assert_close(frame_operator(&f).trace(), gram_matrix(&f).trace(), 1e-12);
    }

    #[test]
    fn norms_examples() {
        assert_eq!(norms_of(&example_frame()), vec![1.0; 4]);
        let z = Frame::from_real_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(norms_of(&z), vec![1.0, 0.0]);
        let scaled = Frame::new(example_frame().matrix() * C64::new(2.0, 0.0)).unwrap();
        assert_eq!(norms_of(&scaled), vec![4.0; 4]);
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum_of(&example_frame()).unwrap();
        assert_close(s.values()[0], 2.0, 1e-12);
        assert_close(s.values()[1], 2.0, 1e-12);
        assert_eq!(s.multiplicities(), vec![2]);
        let s = spectrum_of(&Frame::identity(4)).unwrap();
        assert!(s.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let deficient = Frame::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(spectrum_of(&deficient), Err(FrameError::NotAFrame(_))));
    }

    #[test]
    fn spectrum_and_norm_validation() {
        assert!(Spectrum::new(vec![1.0, 2.0]).is_err());
        assert!(Spectrum::new(vec![1.0, 0.0]).is_err());
        assert!(NormVector::new(vec![]).is_err());
        let r = NormVector::from_unsorted(vec![0.5, 2.0, 0.5]).unwrap();
        assert_eq!(r.values(), &[2.0, 0.5, 0.5]);
        let s = Spectrum::new(vec![3.0, 3.0 - 1e-12, 1.0, 1.0, 1.0, 0.5]).unwrap();
        assert_eq!(s.multiplicities(), vec![2, 3, 1]);
        assert_eq!(s.multiplicity_square_sum(), 14);
    }

    #[test]
    fn pairing_examples() {
        let mut e11 = CMatrix::zeros(2, 3);
        e11[(0, 0)] = C64::new(1.0, 0.0);
        let x = TangentMatrix::new(e11.clone());
        let y = TangentMatrix::new(e11 * C64::i());
        assert_close(symplectic_pairing(&x, &y).unwrap(), 1.0, 1e-15);
        assert_eq!(symplectic_pairing(&x, &x).unwrap(), 0.0);
        assert!(symplectic_pairing(&x, &TangentMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn pairing_against_complex_structure() {
        // ω(X, iX) = tr(X*X) under ω(X, Y) = -Im tr(Y* X).
        let mut rng = rng_from_seed(21);
        for _ in 0..20 {
            let x = TangentMatrix::new(complex_gaussian(&mut rng, 3, 4));
            let ix = x.scale(C64::i());
            let norm2 = frobenius(x.matrix()).powi(2);
            assert_close(symplectic_pairing(&x, &ix).unwrap() - norm2, 0.0, 1e-10);
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = rng_from_seed(3);
        let u = haar_unitary(&mut rng, 4);
        let err = frobenius(&(u.adjoint() * &u - CMatrix::identity(4, 4)));
        assert!(err < 1e-13);
    }
}
