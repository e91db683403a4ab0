//! Circle actions on frames indexed by eigenstep positions, and their
//! momentum values.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::frame::{
    frobenius, hermitian_eig, partial_frame_operator, symplectic_pairing, CMatrix, Frame,
    TangentMatrix, C64,
};

/// Minimum gap between `μ_{k,j}` and its neighbours in the spectrum of `S_k`.
pub const ISOLATION_GAP: f64 = 1e-8;

/// Eigenstep position `(k, j)`, 1-based, with `j <= min(k, d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionIndex {
    pub k: usize,
    pub j: usize,
}

impl ActionIndex {
    pub fn new(k: usize, j: usize) -> Self {
        Self { k, j }
    }

    fn check(self, f: &Frame) -> Result<()> {
        if self.k == 0 || self.k > f.n() || self.j == 0 || self.j > self.k.min(f.d()) {
            return Err(FrameError::IndexOutOfRange(format!(
                "(k={}, j={}) for d = {}, N = {}",
                self.k,
                self.j,
                f.d(),
                f.n()
            )));
        }
        Ok(())
    }
}

/// Angles keyed by action index, each normalized to `[0, 2π)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnglePack {
    angles: BTreeMap<ActionIndex, f64>,
}

impl AnglePack {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, idx: ActionIndex, t: f64) {
        self.angles.insert(idx, t.rem_euclid(TAU));
    }

    pub fn with(mut self, idx: ActionIndex, t: f64) -> Self {
        self.insert(idx, t);
        self
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Entries in ascending `(k, j)` order.
    pub fn iter(&self) -> impl Iterator<Item = (ActionIndex, f64)> + '_ {
        self.angles.iter().map(|(i, t)| (*i, *t))
    }
}

impl FromIterator<(ActionIndex, f64)> for AnglePack {
    fn from_iter<I: IntoIterator<Item = (ActionIndex, f64)>>(iter: I) -> Self {
        let mut pack = Self::new();
        for (i, t) in iter {
            pack.insert(i, t);
        }
        pack
    }
}

/// Unit eigenvector for `μ_{k,j}`, after checking it is isolated.
fn isolated_eigenvector(f: &Frame, idx: ActionIndex) -> Result<DVector<C64>> {
    idx.check(f)?;
    let eig = hermitian_eig(&partial_frame_operator(f, idx.k)?);
    let j = idx.j - 1;
    let v = &eig.values;
    let mut gap = f64::INFINITY;
    if j > 0 {
        gap = gap.min(v[j - 1] - v[j]);
    }
    if j + 1 < v.len() {
        gap = gap.min(v[j] - v[j + 1]);
    }
    if gap <= ISOLATION_GAP {
        return Err(FrameError::DegenerateAction {
            k: idx.k,
            j: idx.j,
            gap,
        });
    }
    Ok(eig.vectors.column(j).into_owned())
}

/// Applies `I + (e^{it} − 1) u u*` to the first `k` columns.
pub fn circle_action(f: &Frame, idx: ActionIndex, t: f64) -> Result<Frame> {
    let u = isolated_eigenvector(f, idx)?;
    let factor = C64::from_polar(1.0, t) - C64::new(1.0, 0.0);
    let mut m = f.matrix().clone();
    for i in 0..idx.k {
        let coeff = u.dotc(&m.column(i)) * factor;
        let mut col = m.column_mut(i);
        col.axpy(coeff, &u, C64::new(1.0, 0.0));
    }
    Frame::new(m)
}

/// Applies every circle action in the pack, in ascending `(k, j)` order.
pub fn torus_action(f: &Frame, pack: &AnglePack) -> Result<Frame> {
    pack.iter()
        .try_fold(f.clone(), |acc, (idx, t)| circle_action(&acc, idx, t))
}

/// `μ_{k,j}(F)`, the `j`-th largest eigenvalue of `S_k`.
pub fn momentum_value(f: &Frame, idx: ActionIndex) -> Result<f64> {
    idx.check(f)?;
    Ok(hermitian_eig(&partial_frame_operator(f, idx.k)?).values[idx.j - 1])
}

/// `i s u u* [f_1 | … | f_k | 0 | … | 0]`.
pub fn infinitesimal_field(f: &Frame, idx: ActionIndex, s: f64) -> Result<TangentMatrix> {
    let u = isolated_eigenvector(f, idx)?;
    let projector = &u * u.adjoint();
    let mut out = CMatrix::zeros(f.d(), f.n());
    let head = f.matrix().columns(0, idx.k);
    out.columns_mut(0, idx.k)
        .copy_from(&(projector * head * C64::new(0.0, s)));
    Ok(TangentMatrix::new(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumCheck {
    /// `(s/2) · dμ_{k,j}(F)[X]`, by central differences.
    pub lhs: f64,
    /// `ω(X, F^s)`.
    pub rhs: f64,
    /// `|lhs − rhs|` relative to `|s| · ‖f_1..f_k‖ · ‖X‖`.
    pub residual: f64,
}

/// Compares the pairing of the momentum derivative with `s` (using
/// `⟨a, b⟩ = ab/2` on the circle's Lie algebra) against the symplectic
/// pairing of `X` with the infinitesimal field `F^s`.
///
/// With `ω(X, Y) = −Im tr(Y* X)`, the two agree as `ω(X, F^s)`; the reverse
/// argument order flips the sign.
pub fn verify_momentum_identity(
    f: &Frame,
    x: &TangentMatrix,
    idx: ActionIndex,
    s: f64,
    h: f64,
) -> Result<MomentumCheck> {
    if x.shape() != (f.d(), f.n()) {
        return Err(FrameError::DimensionMismatch(format!(
            "tangent is {:?}, frame is {}x{}",
            x.shape(),
            f.d(),
            f.n()
        )));
    }
    let field = infinitesimal_field(f, idx, s)?;
    let plus = Frame::new(f.matrix() + x.matrix() * C64::new(h, 0.0))?;
    let minus = Frame::new(f.matrix() - x.matrix() * C64::new(h, 0.0))?;
    isolated_eigenvector(&plus, idx)?;
    isolated_eigenvector(&minus, idx)?;
    let derivative = (momentum_value(&plus, idx)? - momentum_value(&minus, idx)?) / (2.0 * h);
    let lhs = 0.5 * s * derivative;
    let rhs = symplectic_pairing(x, &field)?;
    let head = f.matrix().columns(0, idx.k).into_owned();
    let scale = s.abs() * frobenius(&head) * frobenius(x.matrix());
    let diff = (lhs - rhs).abs();
    let residual = if scale > 0.0 { diff / scale } else { diff };
    Ok(MomentumCheck { lhs, rhs, residual })
}
