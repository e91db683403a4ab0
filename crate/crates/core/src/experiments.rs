//! Seeded experiments with machine-readable reports.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::admissibility::{check_admissible, classify_space, frame_space_dimensions, SpaceKind};
use crate::eigensteps::{compute_eigensteps, validate_eigensteps};
use crate::error::Result;
use crate::exec::{map_indexed, Execution};
use crate::frame::{
    complex_gaussian, frame_operator, frobenius, gram_matrix, haar_unitary, hermitian_eig,
    norms_of, partial_frame_operator, random_phase, spectrum_of, Frame, NormVector,
    Spectrum, TangentMatrix, C64,
};
use crate::polytope::{
    default_thin, hit_and_run, interior_point, polytope_system, sample_relative_interior,
    DEFAULT_BURN_IN,
};
use crate::rng::{child_seed, rng_from_seed, SampleRng};
use crate::singularity::{
    is_orthodecomposable, momentum_jacobian_rank, stabilizer_dimension, DEFAULT_ODF_TOL,
};
use crate::spark::{plucker_product, spark_with, DEFAULT_SPARK_TOL};
use crate::synthesis::{frame_from_eigensteps, random_frame_with, SamplerConfig, SynthesisOptions};
use crate::torus::{circle_action, verify_momentum_identity, ActionIndex};

pub const REPORT_FORMAT_VERSION: u32 = 1;
/// Membership tolerance for constructed frames.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Smallest acceptable minor modulus for samples counted as full spark:
/// the spark tolerance times a safety factor of 10³.
pub const FULL_SPARK_MARGIN: f64 = DEFAULT_SPARK_TOL * 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub metric: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub format_version: u32,
    pub name: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    fn new(name: &str, parameters: serde_json::Value, seed: u64) -> Self {
        Self {
            format_version: REPORT_FORMAT_VERSION,
            name: name.to_owned(),
            parameters,
            seed,
            outcomes: Vec::new(),
            wall_time_ms: 0,
        }
    }

    /// Records `value <= tol`.
    fn at_most(&mut self, metric: &str, value: f64, tol: f64) {
        self.push(metric, value, tol, value <= tol);
    }

    fn push(&mut self, metric: &str, value: f64, tol: f64, pass: bool) {
        self.outcomes.push(Outcome {
            metric: metric.to_owned(),
            value,
            tol,
            pass,
        });
    }

    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    pub fn outcome(&self, metric: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.metric == metric)
    }

    /// Same report with the timing zeroed, for reproducibility comparisons.
    pub fn without_timing(mut self) -> Self {
        self.wall_time_ms = 0;
        self
    }
}

/// Largest deviation of spectrum and norms from `(λ, r)`.
pub fn membership_error(f: &Frame, lambda: &Spectrum, r: &[f64]) -> f64 {
    let spectrum = match spectrum_of(f) {
        Ok(s) => s,
        Err(_) => return f64::INFINITY,
    };
    let spectral = spectrum
        .values()
        .iter()
        .zip(lambda.values())
        .map(|(a, b)| (a - b).abs());
    let norms = norms_of(f).into_iter().zip(r).map(|(a, b)| (a - b).abs());
    spectral.chain(norms).fold(0.0, f64::max)
}

/// Random complex Gaussian frame whose partial frame operators all have
/// eigenvalue gaps of at least `1e-3` times the largest eigenvalue.
pub fn random_strict_frame(rng: &mut SampleRng, d: usize, n: usize) -> Frame {
    loop {
        let f = Frame::new(complex_gaussian(rng, d, n)).expect("finite entries");
        let separated = (1..=n).all(|k| {
            let v = hermitian_eig(&partial_frame_operator(&f, k).expect("k in range")).values;
            let scale = v[0].max(1e-300);
            v[..k.min(d)].windows(2).all(|w| w[0] - w[1] >= 1e-3 * scale)
        });
        if separated && spectrum_of(&f).is_ok() {
            return f;
        }
    }
}

fn random_index(rng: &mut SampleRng, d: usize, n: usize) -> ActionIndex {
    let k = rng.random_range(1..=n);
    let j = rng.random_range(1..=k.min(d));
    ActionIndex::new(k, j)
}

fn dist(a: &Frame, b: &Frame) -> f64 {
    frobenius(&(a.matrix() - b.matrix()))
}

/// Worst-case errors of the torus-action invariants over a batch of frames.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TorusErrors {
    pub norms: f64,
    pub frame_operator: f64,
    pub eigensteps: f64,
    pub periodicity: f64,
    pub commutativity: f64,
    pub equivariance: f64,
}

impl TorusErrors {
    fn max(self, o: Self) -> Self {
        Self {
            norms: self.norms.max(o.norms),
            frame_operator: self.frame_operator.max(o.frame_operator),
            eigensteps: self.eigensteps.max(o.eigensteps),
            periodicity: self.periodicity.max(o.periodicity),
            commutativity: self.commutativity.max(o.commutativity),
            equivariance: self.equivariance.max(o.equivariance),
        }
    }
}

fn torus_case(f: &Frame, seed: u64) -> Result<TorusErrors> {
    let mut rng = rng_from_seed(seed);
    let (d, n) = (f.d(), f.n());
    let a = random_index(&mut rng, d, n);
    let mut b = random_index(&mut rng, d, n);
    if n * d > 1 {
        while b == a {
            b = random_index(&mut rng, d, n);
        }
    }
    let (s, t) = (
        rng.random_range(0.0..std::f64::consts::TAU),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    let moved = circle_action(f, a, s)?;
    let norms = norms_of(f)
        .iter()
        .zip(norms_of(&moved))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let frame_operator = frobenius(&(frame_operator(f).matrix() - frame_operator(&moved).matrix()));
    let eigensteps = compute_eigensteps(f).max_abs_diff(&compute_eigensteps(&moved));
    let periodicity = dist(&circle_action(f, a, std::f64::consts::TAU)?, f);
    let ab = circle_action(&circle_action(f, a, s)?, b, t)?;
    let ba = circle_action(&circle_action(f, b, t)?, a, s)?;
    let commutativity = dist(&ab, &ba);
    let u = haar_unitary(&mut rng, d);
    let equivariance = dist(
        &circle_action(&f.left_mul(&u)?, a, s)?,
        &moved.left_mul(&u)?,
    );
    Ok(TorusErrors {
        norms,
        frame_operator,
        eigensteps,
        periodicity,
        commutativity,
        equivariance,
    })
}

/// Runs the torus invariants on every frame with random indices and angles.
pub fn torus_battery(frames: &[Frame], seed: u64, mode: Execution) -> Result<TorusErrors> {
    map_indexed(mode, frames.len(), |i| torus_case(&frames[i], child_seed(seed, i as u64)))
        .into_iter()
        .try_fold(TorusErrors::default(), |acc, e| Ok(acc.max(e?)))
}

/// Largest relative momentum-identity residual over `cases` random strict
/// frames with `d <= 3`, `N <= 6`.
pub fn momentum_battery(cases: usize, seed: u64, h: f64, mode: Execution) -> Result<f64> {
    map_indexed(mode, cases, |i| {
        let mut rng = rng_from_seed(child_seed(seed, i as u64));
        let d = rng.random_range(1..=3);
        let n = rng.random_range(d.max(2)..=6);
        let f = random_strict_frame(&mut rng, d, n);
        let x = TangentMatrix::new(complex_gaussian(&mut rng, d, n));
        let idx = random_index(&mut rng, d, n);
        let s = rng.random_range(-2.0..2.0);
        verify_momentum_identity(&f, &x, idx, s, h).map(|c| c.residual)
    })
    .into_iter()
    .try_fold(0.0_f64, |acc, r| Ok(acc.max(r?)))
}

/// Parameter sets used by the synthesis round-trip battery.
pub fn round_trip_parameter_sets() -> Vec<(Spectrum, NormVector)> {
    let mk = |l: Vec<f64>, r: Vec<f64>| {
        (
            Spectrum::new(l).expect("valid spectrum"),
            NormVector::new(r).expect("valid norms"),
        )
    };
    vec![
        mk(vec![2.0, 2.0], vec![1.0; 4]),
        mk(vec![2.5, 2.5], vec![1.0; 5]),
        mk(vec![5.0 / 3.0; 3], vec![1.0; 5]),
        mk(vec![3.0, 2.0, 1.0], vec![1.5, 1.5, 1.0, 1.0, 1.0]),
        mk(vec![3.0, 2.0, 2.0, 1.0], vec![1.0; 8]),
    ]
}

/// Largest entrywise error of `eigensteps(synthesize(T)) − T` over
/// `per_set` hit-and-run tables from each parameter set.
pub fn synthesis_round_trip(
    sets: &[(Spectrum, NormVector)],
    per_set: usize,
    seed: u64,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (i, (lambda, r)) in sets.iter().enumerate() {
        let system = polytope_system(lambda, r)?;
        let start = interior_point(&system)?;
        let tables = hit_and_run(
            &system,
            &start,
            per_set,
            DEFAULT_BURN_IN,
            default_thin(system.dim()),
            child_seed(seed, i as u64),
        )?;
        for table in &tables {
            let f = frame_from_eigensteps(table, r.values(), SynthesisOptions::canonical())?;
            worst = worst.max(compute_eigensteps(&f).max_abs_diff(table));
        }
    }
    Ok(worst)
}

/// Block-diagonal frame with random blocks, mixed by a unitary and with its
/// columns shuffled; always orthodecomposable.
pub fn random_odf_frame(rng: &mut SampleRng) -> Frame {
    let d = rng.random_range(2..=4);
    let first = rng.random_range(1..d);
    let dims = [first, d - first];
    let mut cols: Vec<nalgebra::DVector<C64>> = Vec::new();
    let mut offset = 0;
    for &bd in &dims {
        let count = bd + rng.random_range(0..=2);
        let block = complex_gaussian(rng, bd, count);
        for c in block.column_iter() {
            let mut v = nalgebra::DVector::zeros(d);
            v.rows_mut(offset, bd).copy_from(&c);
            cols.push(v);
        }
        offset += bd;
    }
    cols.shuffle(rng);
    let u = haar_unitary(rng, d);
    Frame::from_columns(&cols)
        .and_then(|f| f.left_mul(&u))
        .expect("consistent shapes")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OdfBattery {
    pub frames: usize,
    /// Frames where graph criterion, Jacobian deficiency and stabilizer disagree.
    pub disagreements: usize,
    /// Frames where Jacobian rank deficiency differs from the stabilizer dimension.
    pub duality_mismatches: usize,
    /// Constructed witnesses not flagged as orthodecomposable.
    pub missed_witnesses: usize,
}

/// Cross-checks the three orthodecomposability criteria on random frames
/// and constructed witnesses.
pub fn odf_battery(random: usize, witnesses: usize, seed: u64, mode: Execution) -> Result<OdfBattery> {
    let results = map_indexed(mode, random + witnesses, |i| -> Result<(bool, bool, bool)> {
        let mut rng = rng_from_seed(child_seed(seed, i as u64));
        let f = if i < random {
            let d = rng.random_range(1..=4);
            let n = rng.random_range(d..=d + 4);
            Frame::new(complex_gaussian(&mut rng, d, n))?
        } else {
            random_odf_frame(&mut rng)
        };
        let graph = is_orthodecomposable(&f, DEFAULT_ODF_TOL)?.is_some();
        let full_rank = f.d() * f.d() + f.n() - 1;
        let deficiency = full_rank - momentum_jacobian_rank(&f);
        let stabilizer = stabilizer_dimension(&f);
        let agree = graph == (deficiency > 0) && graph == (stabilizer > 0);
        Ok((agree, deficiency == stabilizer, i < random || graph))
    });
    let mut out = OdfBattery {
        frames: random + witnesses,
        ..OdfBattery::default()
    };
    for r in results {
        let (agree, dual, flagged) = r?;
        out.disagreements += usize::from(!agree);
        out.duality_mismatches += usize::from(!dual);
        out.missed_witnesses += usize::from(!flagged);
    }
    Ok(out)
}

/// Test hook for [`run_invariant_suite_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectedFault {
    /// Perturbs the norms fed to the eigenstep validation battery.
    EigenstepNorms,
}

/// Every module invariant at fixed sizes (`d <= 4`, `N <= 8`).
pub fn run_invariant_suite(seed: u64) -> ExperimentReport {
    run_invariant_suite_with(seed, None, Execution::default())
}

pub fn run_invariant_suite_with(
    seed: u64,
    fault: Option<InjectedFault>,
    mode: Execution,
) -> ExperimentReport {
    let start = Instant::now();
    let sizes = [(1usize, 3usize), (2, 4), (2, 5), (3, 5), (3, 6), (4, 8)];
    let mut report = ExperimentReport::new(
        "invariant_suite",
        json!({ "sizes": sizes, "frames_per_size": 4 }),
        seed,
    );
    let frames: Vec<Frame> = (0..sizes.len() * 4)
        .map(|i| {
            let (d, n) = sizes[i / 4];
            random_strict_frame(&mut rng_from_seed(child_seed(seed, i as u64)), d, n)
        })
        .collect();

    let trace = frames
        .iter()
        .map(|f| {
            let t = frame_operator(f).trace();
            (t - norms_of(f).iter().sum::<f64>()).abs() / t.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    report.at_most("trace_identity", trace, 1e-10);

    let gram = frames
        .iter()
        .map(|f| {
            let a = hermitian_eig(&frame_operator(f)).values;
            let b = hermitian_eig(&gram_matrix(f)).values;
            let top = a.iter().zip(&b).map(|(x, y)| (x - y).abs());
            let rest = b[a.len()..].iter().map(|y| y.abs());
            top.chain(rest).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    report.at_most("gram_spectrum", gram, 1e-9);

    let invalid = frames
        .iter()
        .filter(|f| {
            let mut r = norms_of(f);
            if fault == Some(InjectedFault::EigenstepNorms) {
                r[0] *= 1.1;
            }
            let lambda = spectrum_of(f).expect("strict frames span");
            !validate_eigensteps(&compute_eigensteps(f), &lambda, &r, 1e-8).valid
        })
        .count();
    report.at_most("eigenstep_validation_failures", invalid as f64, 0.0);

    let mut rng = rng_from_seed(child_seed(seed, 1_000));
    let mismatches = (0..20)
        .filter(|_| {
            let (lambda, r) = random_pattern(&mut rng, 4, 8);
            let dims = frame_space_dimensions(&lambda, &r);
            let system = polytope_system(&lambda, &r);
            match (dims, system) {
                (Ok(dims), Ok(p)) => {
                    p.dim() as i64 != dims.dim_polytope || 2 * dims.dim_polytope != dims.dim_quotient
                }
                _ => true,
            }
        })
        .count();
    report.at_most("polytope_dimension_mismatches", mismatches as f64, 0.0);

    match synthesis_round_trip(&round_trip_parameter_sets(), 10, child_seed(seed, 2_000)) {
        Ok(err) => report.at_most("synthesis_round_trip", err, 1e-8),
        Err(_) => report.push("synthesis_round_trip", f64::MAX, 1e-8, false),
    }

    match torus_battery(&frames, child_seed(seed, 3_000), mode) {
        Ok(e) => {
            report.at_most("torus_norms", e.norms, 1e-12);
            report.at_most("torus_frame_operator", e.frame_operator, 1e-10);
            report.at_most("torus_eigensteps", e.eigensteps, 1e-8);
            report.at_most("torus_periodicity", e.periodicity, 1e-12);
            report.at_most("torus_commutativity", e.commutativity, 1e-9);
            report.at_most("torus_equivariance", e.equivariance, 1e-10);
        }
        Err(_) => report.push("torus_battery", f64::MAX, 0.0, false),
    }

    match momentum_battery(20, child_seed(seed, 4_000), 1e-5, mode) {
        Ok(r) => report.at_most("momentum_identity", r, 1e-6),
        Err(_) => report.push("momentum_identity", f64::MAX, 1e-6, false),
    }

    let spark_mismatch = frames
        .iter()
        .filter(|f| {
            let report = spark_with(f, DEFAULT_SPARK_TOL, Execution::Sequential);
            let product = plucker_product(f);
            match (report, product) {
                (Ok(s), Ok(p)) => {
                    (s.spark == f.d() + 1) != s.witness.is_none()
                        || (s.min_abs_minor - p.min_modulus).abs() > 1e-12
                }
                _ => true,
            }
        })
        .count();
    report.at_most("spark_consistency_failures", spark_mismatch as f64, 0.0);

    match odf_battery(20, 5, child_seed(seed, 5_000), mode) {
        Ok(b) => {
            report.at_most("odf_disagreements", b.disagreements as f64, 0.0);
            report.at_most("odf_duality_mismatches", b.duality_mismatches as f64, 0.0);
        }
        Err(_) => report.push("odf_battery", f64::MAX, 0.0, false),
    }

    report.wall_time_ms = start.elapsed().as_millis() as u64;
    report
}

/// Random strongly admissible data with a random multiplicity pattern:
/// `λ` takes distinct group values and `r` is constant.
pub fn random_pattern(rng: &mut SampleRng, max_d: usize, max_n: usize) -> (Spectrum, NormVector) {
    let d = rng.random_range(1..=max_d);
    let n = rng.random_range(d + 1..=max_n.max(d + 1));
    let mut values = Vec::with_capacity(d);
    let mut level = rng.random_range(3.0..4.0);
    while values.len() < d {
        let run = rng.random_range(1..=d - values.len());
        values.extend(std::iter::repeat_n(level, run));
        level -= rng.random_range(0.3..0.9);
    }
    let total: f64 = values.iter().sum();
    (
        Spectrum::new(values).expect("positive, nonincreasing"),
        NormVector::new(vec![total / n as f64; n]).expect("positive"),
    )
}

/// Reproduces the three cases of the full-spark trichotomy for `(λ, r)`:
/// empty, entirely spark-deficient, or full spark almost surely.
pub fn run_trichotomy(lambda: &Spectrum, r: &NormVector, samples: usize, seed: u64) -> ExperimentReport {
    run_trichotomy_with(lambda, r, samples, seed, Execution::default())
}

pub fn run_trichotomy_with(
    lambda: &Spectrum,
    r: &NormVector,
    samples: usize,
    seed: u64,
    mode: Execution,
) -> ExperimentReport {
    let start = Instant::now();
    let mut report = ExperimentReport::new(
        "trichotomy",
        json!({ "lambda": lambda.values(), "r": r.values(), "samples": samples }),
        seed,
    );
    let verdict = check_admissible(lambda, r);
    if !verdict.admissible {
        report.push("branch", 1.0, 0.0, true);
        let kind = classify_space(lambda, r).map(|c| c.kind);
        let empty = matches!(kind, Ok(SpaceKind::Empty));
        report.push("classified_empty", f64::from(u8::from(empty)), 0.0, empty);
    } else if !verdict.strong {
        report.push("branch", 2.0, 0.0, true);
        collapsed_branch(&mut report, lambda, r, samples, seed, mode);
    } else {
        report.push("branch", 3.0, 0.0, true);
        generic_branch(&mut report, lambda, r, samples, seed, mode);
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    report
}

struct SampleCheck {
    membership: f64,
    spark: usize,
    min_minor: f64,
    reversed_corner: f64,
}

fn check_sample(f: &Frame, lambda: &Spectrum, r: &NormVector) -> Result<SampleCheck> {
    let report = spark_with(f, DEFAULT_SPARK_TOL, Execution::Sequential)?;
    let d = f.d();
    let reversed = compute_eigensteps(&f.reversed());
    Ok(SampleCheck {
        membership: membership_error(f, lambda, r.values()),
        spark: report.spark,
        min_minor: report.min_abs_minor,
        reversed_corner: reversed.get(d, d).abs(),
    })
}

fn record_failures(report: &mut ExperimentReport, built: usize, samples: usize) {
    report.push(
        "constructed_members",
        built as f64,
        0.0,
        built == samples,
    );
}

/// Members of a space whose eigenstep polytope collapses onto a face: the
/// face's relative interior is sampled, tables are synthesized with ties
/// allowed, and the frames are mixed by random unitaries and phases.
fn collapsed_branch(
    report: &mut ExperimentReport,
    lambda: &Spectrum,
    r: &NormVector,
    samples: usize,
    seed: u64,
    mode: Execution,
) {
    let system = match polytope_system(lambda, r) {
        Ok(p) => p,
        Err(_) => {
            record_failures(report, 0, samples);
            return;
        }
    };
    let tables = match sample_relative_interior(
        &system,
        samples,
        DEFAULT_BURN_IN,
        default_thin(system.dim()),
        seed,
    ) {
        Ok(t) => t,
        Err(_) => {
            record_failures(report, 0, samples);
            return;
        }
    };
    let checks: Vec<Result<SampleCheck>> = map_indexed(mode, samples, |i| {
        let child = child_seed(seed, i as u64);
        let opts = SynthesisOptions::canonical()
            .allow_ties()
            .with_phase_seed(child)
            .with_left_unitary_seed(child.wrapping_add(1));
        let f = frame_from_eigensteps(&tables[i], r.values(), opts)?;
        let mut rng = rng_from_seed(child.wrapping_add(2));
        let phases: Vec<C64> = (0..r.len()).map(|_| random_phase(&mut rng)).collect();
        check_sample(&f.scale_columns(&phases)?, lambda, r)
    });
    let ok: Vec<SampleCheck> = checks.into_iter().filter_map(|c| c.ok()).collect();
    record_failures(report, ok.len(), samples);
    let (d, n) = (lambda.len(), r.len());
    let membership = ok.iter().map(|c| c.membership).fold(0.0, f64::max);
    report.at_most("max_membership_error", membership, MEMBERSHIP_TOL);
    let count = ok.len().max(1) as f64;
    if n > d {
        let deficient = ok.iter().filter(|c| c.spark <= d).count() as f64 / count;
        report.push("spark_deficient_fraction", deficient, 0.0, deficient == 1.0);
        let corner = ok.iter().map(|c| c.reversed_corner).fold(0.0, f64::max);
        report.at_most(
            "max_reversed_corner_eigenstep",
            corner,
            MEMBERSHIP_TOL * lambda.values()[0].max(1.0),
        );
    } else {
        // With N = d every member is a basis.
        let full = ok.iter().filter(|c| c.spark == d + 1).count() as f64 / count;
        report.push("full_spark_fraction", full, 0.0, full == 1.0);
    }
}

fn generic_branch(
    report: &mut ExperimentReport,
    lambda: &Spectrum,
    r: &NormVector,
    samples: usize,
    seed: u64,
    mode: Execution,
) {
    let config = SamplerConfig {
        execution: mode,
        ..SamplerConfig::default()
    };
    let frames = match random_frame_with(lambda, r, samples, seed, config) {
        Ok(f) => f,
        Err(_) => {
            record_failures(report, 0, samples);
            return;
        }
    };
    let checks: Vec<Result<SampleCheck>> =
        map_indexed(mode, frames.len(), |i| check_sample(&frames[i], lambda, r));
    let ok: Vec<SampleCheck> = checks.into_iter().filter_map(|c| c.ok()).collect();
    record_failures(report, ok.len(), samples);
    let d = lambda.len();
    let count = ok.len().max(1) as f64;
    let full = ok.iter().filter(|c| c.spark == d + 1).count() as f64 / count;
    report.push("full_spark_fraction", full, 0.0, full == 1.0);
    let min_minor = ok.iter().map(|c| c.min_minor).fold(f64::MAX, f64::min);
    report.push("min_plucker_modulus", min_minor, FULL_SPARK_MARGIN, min_minor > FULL_SPARK_MARGIN);
    let membership = ok.iter().map(|c| c.membership).fold(0.0, f64::max);
    report.at_most("max_membership_error", membership, MEMBERSHIP_TOL);
}
