//! Frames with prescribed eigensteps, spectrum and norms.

use nalgebra::DVector;
use rand::Rng;

use crate::admissibility::{admissibility_of, check_admissible, PartitionWitness};
use crate::eigensteps::{min_unforced_slack, validate_eigensteps, EigenstepTable};
use crate::error::{FrameError, Result};
use crate::exec::{map_indexed, Execution};
use crate::frame::{
    haar_unitary, hermitian_eig, norms_of, random_phase, spectrum_of, CMatrix, Frame,
    HermitianOperator, NormVector, Spectrum, C64,
};
use crate::polytope::{
    build_system, default_thin, feasible_point, hit_and_run_points, interior_point,
    polytope_system, DEFAULT_BURN_IN,
};
use crate::rng::{child_seed, rng_from_seed, splitmix64};
use crate::torus::{torus_action, ActionIndex, AnglePack};

/// Margin by which unpinned interlacing relations must hold in strict mode.
pub const STRICT_MARGIN: f64 = 1e-10;
/// Tolerance for re-verifying synthesized spectra.
pub const SPECTRUM_TOL: f64 = 1e-8;
/// Tolerance for re-verifying synthesized norms.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Reject tables where an interlacing relation not pinned by the top
    /// row holds with (near) equality.
    #[default]
    Strict,
    /// Accept ties; coincident eigenvalues of consecutive rows are cancelled
    /// before the coefficients are formed.
    AllowTies,
}

/// Randomization and tie handling for [`frame_from_eigensteps`]. Without
/// seeds the output is canonical: every coefficient real and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SynthesisOptions {
    phase_seed: Option<u64>,
    left_unitary_seed: Option<u64>,
    ties: TiePolicy,
}

impl SynthesisOptions {
    pub fn canonical() -> Self {
        Self::default()
    }

    pub fn with_phase_seed(mut self, seed: u64) -> Self {
        self.phase_seed = Some(seed);
        self
    }

    pub fn with_left_unitary_seed(mut self, seed: u64) -> Self {
        self.left_unitary_seed = Some(seed);
        self
    }

    pub fn allow_ties(mut self) -> Self {
        self.ties = TiePolicy::AllowTies;
        self
    }

    pub fn is_canonical(&self) -> bool {
        self.phase_seed.is_none() && self.left_unitary_seed.is_none()
    }

    pub fn phase_seed(&self) -> Option<u64> {
        self.phase_seed
    }

    pub fn left_unitary_seed(&self) -> Option<u64> {
        self.left_unitary_seed
    }

    pub fn ties(&self) -> TiePolicy {
        self.ties
    }
}

/// Squared coefficients of a rank-one update in the eigenbasis of `S`.
///
/// `before` holds the eigenvalues of `S`, `after` those of `S + ff*`, both
/// nonincreasing and of equal length. Values shared by the two lists (within
/// `tie_tol`) are cancelled; the remaining poles carry
/// `w_j = −Π_i (a_j − b_i) / Π_{i≠j} (a_j − a_i)`. Returns `(position in
/// before, weight)` pairs for the remaining poles.
pub fn rank_one_weights(before: &[f64], after: &[f64], tie_tol: f64) -> Vec<(usize, f64)> {
    let (mut i, mut j) = (0, 0);
    let mut keep_a = vec![true; before.len()];
    let mut keep_b = vec![true; after.len()];
    while i < before.len() && j < after.len() {
        if (before[i] - after[j]).abs() <= tie_tol {
            keep_a[i] = false;
            keep_b[j] = false;
            i += 1;
            j += 1;
        } else if before[i] > after[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    let poles: Vec<usize> = (0..before.len()).filter(|&p| keep_a[p]).collect();
    let roots: Vec<f64> = (0..after.len())
        .filter(|&q| keep_b[q])
        .map(|q| after[q])
        .collect();
    poles
        .iter()
        .map(|&p| {
            let a = before[p];
            let num: f64 = roots.iter().map(|b| a - b).product();
            let den: f64 = poles
                .iter()
                .filter(|&&q| q != p)
                .map(|&q| a - before[q])
                .product();
            (p, -num / den)
        })
        .collect()
}

/// Builds a frame whose eigensteps are `table` and whose column norms are
/// `r_ordered`.
///
/// Vector `k+1` is placed in the eigenbasis of `S_k` with the squared
/// coefficients from [`rank_one_weights`] applied to rows `k` and `k+1`
/// (row `k` padded with a zero while `k < d`), then rescaled to norm
/// `√r_{k+1}`.
pub fn frame_from_eigensteps(
    table: &EigenstepTable,
    r_ordered: &[f64],
    opts: SynthesisOptions,
) -> Result<Frame> {
    let (d, n) = (table.d(), table.n());
    if r_ordered.len() != n {
        return Err(FrameError::DimensionMismatch(format!(
            "{} norms for a table with N = {n}",
            r_ordered.len()
        )));
    }
    if let Some(v) = r_ordered.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(FrameError::InvalidInput {
            what: "norms",
            reason: format!("entries must be positive, got {v}"),
        });
    }
    let lambda = Spectrum::new(table.top_row().to_vec()).map_err(|_| {
        FrameError::InconsistentTable("top row must be positive and nonincreasing".into())
    })?;
    let scale = lambda.values()[0].max(1.0);
    let validation = validate_eigensteps(table, &lambda, r_ordered, 1e-8 * scale);
    if !validation.valid {
        let v = &validation.violations[0];
        return Err(FrameError::InconsistentTable(format!(
            "{:?} off by {:e}",
            v.constraint, v.slack
        )));
    }
    if opts.ties == TiePolicy::Strict {
        let (slack, rel) = min_unforced_slack(table);
        if slack <= STRICT_MARGIN * scale {
            let rel = rel.expect("a finite slack comes from a relation");
            return Err(FrameError::DegenerateEigensteps(format!(
                "relation {:?} >= {:?} has slack {slack:e}",
                rel.upper, rel.lower
            )));
        }
    }

    let mut phase_rng = opts.phase_seed.map(rng_from_seed);
    let tie_tol = 1e-9 * scale;
    let clamp_tol = 1e-10 * scale;
    let mut columns: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut operator = CMatrix::zeros(d, d);
    let mut basis = CMatrix::identity(d, d);
    for k in 0..n {
        let m = (k + 1).min(d);
        let before = &table.padded_row(k)[..m];
        let after = &table.padded_row(k + 1)[..m];
        let mut f = DVector::<C64>::zeros(d);
        for (p, w) in rank_one_weights(before, after, tie_tol) {
            if w < -clamp_tol {
                return Err(FrameError::InconsistentTable(format!(
                    "negative weight {w:e} at step {}, position {}",
                    k + 1,
                    p + 1
                )));
            }
            let mut c = C64::new(w.max(0.0).sqrt(), 0.0);
            if let Some(rng) = phase_rng.as_mut() {
                c *= random_phase(rng);
            }
            f.axpy(c, &basis.column(p), C64::new(1.0, 0.0));
        }
        let norm = f.norm();
        if norm == 0.0 {
            return Err(FrameError::InconsistentTable(format!(
                "step {} produces a zero vector",
                k + 1
            )));
        }
        f *= C64::new(r_ordered[k].sqrt() / norm, 0.0);
        operator += &f * f.adjoint();
        columns.push(f);
        if k + 1 < n {
            basis = hermitian_eig(&HermitianOperator::from_trusted(operator.clone())).vectors;
        }
    }
    let mut frame = Frame::from_columns(&columns)?;
    if let Some(seed) = opts.left_unitary_seed {
        let u = haar_unitary(&mut rng_from_seed(seed), d);
        frame = frame.left_mul(&u)?;
    }
    Ok(frame)
}

/// Checks that `f` has spectrum `λ` and column norms `r` (in order).
pub fn verify_membership(f: &Frame, lambda: &Spectrum, r: &[f64]) -> Result<()> {
    let spectrum = spectrum_of(f)?;
    let spec_err = spectrum
        .values()
        .iter()
        .zip(lambda.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if spectrum.len() != lambda.len() || spec_err > SPECTRUM_TOL * lambda.values()[0].max(1.0) {
        return Err(FrameError::Verification(format!(
            "spectrum off by {spec_err:e}"
        )));
    }
    let norms = norms_of(f);
    let norm_err = norms
        .iter()
        .zip(r)
        .map(|(a, b)| (a - b).abs() / b.max(1.0))
        .fold(0.0, f64::max);
    if norms.len() != r.len() || norm_err > NORM_TOL {
        return Err(FrameError::Verification(format!("norms off by {norm_err:e}")));
    }
    Ok(())
}

/// Chain and batch settings for [`random_frame_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub burn_in: usize,
    /// `None` selects ten steps per polytope dimension.
    pub thin: Option<usize>,
    pub execution: Execution,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            burn_in: DEFAULT_BURN_IN,
            thin: None,
            execution: Execution::default(),
        }
    }
}

/// `count` random members of the frame space with spectrum `λ` and norms `r`.
pub fn random_frame(lambda: &Spectrum, r: &NormVector, count: usize, seed: u64) -> Result<Vec<Frame>> {
    random_frame_with(lambda, r, count, seed, SamplerConfig::default())
}

/// Draws eigenstep tables from one hit-and-run chain, synthesizes canonical
/// frames, spins every free eigenstep circle by a uniform angle, mixes with
/// a Haar unitary and multiplies columns by uniform phases. Sample `i` uses
/// randomness derived from `(seed, i)`, so output does not depend on the
/// execution strategy.
pub fn random_frame_with(
    lambda: &Spectrum,
    r: &NormVector,
    count: usize,
    seed: u64,
    config: SamplerConfig,
) -> Result<Vec<Frame>> {
    let verdict = check_admissible(lambda, r);
    if !verdict.strong {
        return Err(FrameError::Precondition(format!(
            "r is not strongly λ-admissible (index {})",
            verdict.failing_index.unwrap_or(0)
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let system = polytope_system(lambda, r)?;
    let start = if system.dim() == 0 {
        Vec::new()
    } else {
        interior_point(&system)?
    };
    let thin = config.thin.unwrap_or_else(|| default_thin(system.dim()));
    let points = hit_and_run_points(&system, &start, count, config.burn_in, thin, splitmix64(seed))?;
    let actions: Vec<ActionIndex> = system
        .free_index_map()
        .iter()
        .map(|&(k, j)| ActionIndex::new(k, j))
        .collect();
    map_indexed(config.execution, count, |i| {
        let mut rng = rng_from_seed(child_seed(seed, i as u64));
        let table = system.table_at(&points[i])?;
        let base = frame_from_eigensteps(&table, r.values(), SynthesisOptions::canonical())?;
        let pack: AnglePack = actions
            .iter()
            .map(|&idx| (idx, rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        let spun = torus_action(&base, &pack)?;
        let mixed = spun.left_mul(&haar_unitary(&mut rng, lambda.len()))?;
        let phases: Vec<C64> = (0..r.len()).map(|_| random_phase(&mut rng)).collect();
        let out = mixed.scale_columns(&phases)?;
        verify_membership(&out, lambda, r.values())?;
        Ok(out)
    })
    .into_iter()
    .collect()
}

fn check_witness(lambda: &Spectrum, r: &NormVector, w: &PartitionWitness) -> Result<(Vec<usize>, Vec<usize>)> {
    let to_zero_based = |ids: &[usize], len: usize, what: &str| -> Result<Vec<usize>> {
        let mut out: Vec<usize> = ids.to_vec();
        out.sort_unstable();
        out.dedup();
        if out.len() != ids.len() || out.iter().any(|&i| i == 0 || i > len) {
            return Err(FrameError::InvalidWitness(format!(
                "{what} must be distinct indices in 1..={len}"
            )));
        }
        if out.is_empty() || out.len() == len {
            return Err(FrameError::InvalidWitness(format!(
                "{what} must be a proper nonempty subset"
            )));
        }
        Ok(out.into_iter().map(|i| i - 1).collect())
    };
    let is = to_zero_based(&w.norm_indices, r.len(), "I")?;
    let js = to_zero_based(&w.spectrum_indices, lambda.len(), "J")?;
    let (inner, outer) = split_data(lambda, r, &is, &js);
    if !admissibility_of(&inner.0, &inner.1).admissible
        || !admissibility_of(&outer.0, &outer.1).admissible
    {
        return Err(FrameError::InvalidWitness(
            "the split data are not admissible on both sides".into(),
        ));
    }
    Ok((is, js))
}

type Data = (Vec<f64>, Vec<f64>);

fn split_data(lambda: &Spectrum, r: &NormVector, is: &[usize], js: &[usize]) -> (Data, Data) {
    let l = lambda.values();
    let rv = r.values();
    let pick = |v: &[f64], idx: &[usize], inside: bool| -> Vec<f64> {
        (0..v.len())
            .filter(|i| idx.contains(i) == inside)
            .map(|i| v[i])
            .collect()
    };
    (
        (pick(l, js, true), pick(rv, is, true)),
        (pick(l, js, false), pick(rv, is, false)),
    )
}

/// A frame with data `(λ, r)` from a feasible point of its eigenstep polytope.
pub(crate) fn block_frame(lambda: &[f64], r: &[f64]) -> Result<Frame> {
    let system = build_system(lambda, r);
    let x = feasible_point(&system)?;
    let table = system.table_at(&x)?;
    frame_from_eigensteps(&table, r, SynthesisOptions::canonical().allow_ties())
}

/// Orthodecomposable member of the frame space: a frame for `(λ_J, r_I)` in
/// the first `|J|` coordinates on columns `I`, and one for the complementary
/// data in the remaining coordinates on the other columns.
pub fn spark_deficient_witness(lambda: &Spectrum, r: &NormVector, witness: &PartitionWitness) -> Result<Frame> {
    let (is, js) = check_witness(lambda, r, witness)?;
    let (inner, outer) = split_data(lambda, r, &is, &js);
    let a = block_frame(&inner.0, &inner.1)?;
    let b = block_frame(&outer.0, &outer.1)?;
    let (d, n) = (lambda.len(), r.len());
    let top = js.len();
    let mut m = CMatrix::zeros(d, n);
    let (mut ia, mut ib) = (0, 0);
    for col in 0..n {
        if is.contains(&col) {
            m.view_mut((0, col), (top, 1)).copy_from(&a.matrix().column(ia));
            ia += 1;
        } else {
            m.view_mut((top, col), (d - top, 1)).copy_from(&b.matrix().column(ib));
            ib += 1;
        }
    }
    let f = Frame::new(m)?;
    verify_membership(&f, lambda, r.values())?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigensteps::compute_eigensteps;
    use crate::frame::{complex_gaussian, frame_operator, partial_frame_operator};
    use crate::rng::rng_from_seed;
    use crate::spark::is_full_spark;

    fn table(d: usize, rows: &[&[f64]]) -> EigenstepTable {
        EigenstepTable::new(d, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    /// Brute-force check of the rank-one coefficient formula: the weights
    /// computed from the spectra of `S` and `S + ff*` must equal
    /// `|⟨u_j, f⟩|²` in the eigenbasis of `S`.
    #[test]
    fn rank_one_formula_oracle() {
        let mut rng = rng_from_seed(2024);
        for _ in 0..1000 {
            let z = complex_gaussian(&mut rng, 3, 3);
            let s = HermitianOperator::from_trusted(&z * z.adjoint());
            let f = complex_gaussian(&mut rng, 3, 1);
            let updated = HermitianOperator::from_trusted(s.matrix() + &f * f.adjoint());
            let before = hermitian_eig(&s);
            let after = hermitian_eig(&updated);
            let weights = rank_one_weights(&before.values, &after.values, 0.0);
            assert_eq!(weights.len(), 3);
            for (p, w) in weights {
                let direct = before.vectors.column(p).dotc(&f.column(0)).norm_sqr();
                assert!((w - direct).abs() <= 1e-9 * direct.max(1.0), "{w} vs {direct}");
            }
        }
    }

    #[test]
    fn strict_mode_rejects_ties() {
        let t = table(2, &[&[1.0], &[2.0, 0.0], &[2.0, 1.0], &[2.0, 2.0]]);
        assert!(matches!(
            frame_from_eigensteps(&t, &[1.0; 4], SynthesisOptions::canonical()),
            Err(FrameError::DegenerateEigensteps(_))
        ));
        // Tied tables are fine when ties are allowed.
        let f = frame_from_eigensteps(&t, &[1.0; 4], SynthesisOptions::canonical().allow_ties()).unwrap();
        assert!(compute_eigensteps(&f).max_abs_diff(&t) <= 1e-8);
        assert!(!is_full_spark(&f, 1e-9).unwrap());
    }

    #[test]
    fn strict_round_trip() {
        let t = table(2, &[&[1.0], &[1.5, 0.5], &[2.0, 1.0], &[2.0, 2.0]]);
        let f = frame_from_eigensteps(&t, &[1.0; 4], SynthesisOptions::canonical()).unwrap();
        assert!(compute_eigensteps(&f).max_abs_diff(&t) <= 1e-8);
        for v in norms_of(&f) {
            assert!((v - 1.0).abs() <= 1e-10);
        }
        // Canonical output has real nonnegative coordinates in the running eigenbases.
        assert!(f.matrix().iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn scalar_case() {
        let t = table(1, &[&[2.0], &[3.0], &[3.5]]);
        let f = frame_from_eigensteps(&t, &[2.0, 1.0, 0.5], SynthesisOptions::canonical()).unwrap();
        for (z, want) in f.matrix().iter().zip([2.0_f64, 1.0, 0.5]) {
            assert!((z.norm() - want.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn inconsistent_tables() {
        let t = table(2, &[&[1.0], &[1.5, 0.5], &[2.0, 1.0], &[2.0, 2.0]]);
        assert!(matches!(
            frame_from_eigensteps(&t, &[1.0, 1.0, 1.0, 2.0], SynthesisOptions::canonical()),
            Err(FrameError::InconsistentTable(_))
        ));
        assert!(frame_from_eigensteps(&t, &[1.0; 3], SynthesisOptions::canonical()).is_err());
    }

    #[test]
    fn seeds_randomize_but_preserve_eigensteps() {
        let t = table(3, &[&[1.0], &[1.6, 0.4], &[2.2, 0.7, 0.1], &[2.5, 1.3, 0.2], &[2.6, 1.9, 0.5]]);
        let r = [1.0; 5];
        let opts = SynthesisOptions::canonical().with_phase_seed(3).with_left_unitary_seed(4);
        assert!(!opts.is_canonical());
        let f = frame_from_eigensteps(&t, &r, opts).unwrap();
        let g = frame_from_eigensteps(&t, &r, opts).unwrap();
        assert_eq!(f, g);
        assert!(compute_eigensteps(&f).max_abs_diff(&t) <= 1e-8);
        let canonical = frame_from_eigensteps(&t, &r, SynthesisOptions::canonical()).unwrap();
        assert_ne!(f, canonical);
        // Same Gram structure only up to unitaries and phases: norms agree.
        for (a, b) in norms_of(&f).iter().zip(norms_of(&canonical)) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn random_frames_are_members_and_deterministic() {
        let l = Spectrum::new(vec![2.5, 2.5]).unwrap();
        let r = NormVector::new(vec![1.0; 5]).unwrap();
        let frames = random_frame(&l, &r, 100, 11).unwrap();
        assert_eq!(frames.len(), 100);
        for f in &frames {
            let s = spectrum_of(f).unwrap();
            assert!(s.values().iter().all(|v| (v - 2.5).abs() <= 1e-8));
            assert!(norms_of(f).iter().all(|v| (v - 1.0).abs() <= 1e-10));
        }
        assert!(random_frame(&l, &r, 0, 11).unwrap().is_empty());
        let again = random_frame(&l, &r, 100, 11).unwrap();
        assert_eq!(frames, again);
        let seq = random_frame_with(
            &l,
            &r,
            100,
            11,
            SamplerConfig {
                execution: Execution::Sequential,
                ..SamplerConfig::default()
            },
        )
        .unwrap();
        assert_eq!(frames, seq);
    }

    #[test]
    fn random_frame_needs_strong_admissibility() {
        let l = Spectrum::new(vec![2.0, 1.0]).unwrap();
        let r = NormVector::new(vec![2.0, 0.5, 0.5]).unwrap();
        assert!(matches!(
            random_frame(&l, &r, 3, 1),
            Err(FrameError::Precondition(_))
        ));
    }

    #[test]
    fn witness_frames() {
        let l = Spectrum::new(vec![2.0, 2.0]).unwrap();
        let r = NormVector::new(vec![1.0; 4]).unwrap();
        let w = PartitionWitness {
            norm_indices: vec![1, 2],
            spectrum_indices: vec![1],
        };
        let f = spark_deficient_witness(&l, &r, &w).unwrap();
        assert!((frame_operator(&f).matrix() - CMatrix::identity(2, 2) * C64::new(2.0, 0.0)).norm() < 1e-10);
        for i in 0..2 {
            assert!(f.matrix()[(1, i)].norm() < 1e-12);
            assert!(f.matrix()[(0, i + 2)].norm() < 1e-12);
        }

        let l = Spectrum::new(vec![2.0, 1.0]).unwrap();
        let r = NormVector::new(vec![2.0, 0.5, 0.5]).unwrap();
        let w = PartitionWitness {
            norm_indices: vec![1],
            spectrum_indices: vec![1],
        };
        let f = spark_deficient_witness(&l, &r, &w).unwrap();
        let c1 = f.column(0);
        for i in 1..3 {
            assert!(c1.dotc(&f.column(i)).norm() < 1e-12);
        }
        // Columns 2 and 3 are parallel.
        let s23 = partial_frame_operator(&Frame::from_columns(&[f.column(1), f.column(2)]).unwrap(), 2).unwrap();
        assert!(hermitian_eig(&s23).values[1].abs() < 1e-12);

        let bad = PartitionWitness {
            norm_indices: vec![2],
            spectrum_indices: vec![1],
        };
        assert!(matches!(
            spark_deficient_witness(&l, &r, &bad),
            Err(FrameError::InvalidWitness(_))
        ));
    }
}
