//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture` gives a
//! readable summary.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use frametoric::admissibility::{check_admissible, classify_space, frame_space_dimensions, SpaceKind};
use frametoric::eigensteps::compute_eigensteps;
use frametoric::exec::Execution;
use frametoric::experiments::{
    momentum_battery, odf_battery, random_pattern, random_strict_frame, round_trip_parameter_sets,
    run_trichotomy, synthesis_round_trip, torus_battery,
};
use frametoric::frame::{
    complex_gaussian, hermitian_eig, norms_of, spectrum_of, CMatrix, Frame, HermitianOperator,
    NormVector, Spectrum, TangentMatrix, C64,
};
use frametoric::polytope::{default_thin, hit_and_run_points, interior_point, polytope_system, DEFAULT_BURN_IN};
use frametoric::rng::{child_seed, rng_from_seed};
use frametoric::singularity::{
    cone_membership, is_orthodecomposable, momentum_jacobian_rank, stabilizer_dimension,
    DEFAULT_CONE_TOL, DEFAULT_ODF_TOL,
};
use frametoric::spark::{spark, DEFAULT_SPARK_TOL};
use frametoric::stats::{ks_uniform, mean};
use frametoric::synthesis::rank_one_weights;
use frametoric::torus::{verify_momentum_identity, ActionIndex};

struct Criterion {
    id: u8,
    name: &'static str,
    limit: Duration,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn start(id: u8, name: &'static str, limit_secs: u64) -> Self {
        Self {
            id,
            name,
            limit: Duration::from_secs(limit_secs),
            started: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn finish(mut self) {
        let elapsed = self.started.elapsed();
        self.check(
            elapsed < self.limit,
            format!("runtime {elapsed:?} exceeds {:?}", self.limit),
        );
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "{status} criterion {}: {} ({:.3} s){}",
            self.id,
            self.name,
            elapsed.as_secs_f64(),
            if self.failures.is_empty() {
                String::new()
            } else {
                format!(" -- {}", self.failures.join("; "))
            }
        );
        assert!(self.failures.is_empty(), "criterion {} failed: {:?}", self.id, self.failures);
    }
}

fn spectrum(v: &[f64]) -> Spectrum {
    Spectrum::new(v.to_vec()).unwrap()
}

fn norms(v: &[f64]) -> NormVector {
    NormVector::new(v.to_vec()).unwrap()
}

fn funtf(d: usize, n: usize) -> (Spectrum, NormVector) {
    (spectrum(&vec![n as f64 / d as f64; d]), norms(&vec![1.0; n]))
}

#[test]
fn criterion_1_dimension_formulas() {
    let mut c = Criterion::start(1, "dimension formulas", 1);
    for (d, n) in [(2, 4), (2, 5), (3, 5), (3, 7)] {
        let (lambda, r) = funtf(d, n);
        let dims = frame_space_dimensions(&lambda, &r).unwrap();
        let expected = ((d - 1) * (n - d - 1)) as i64;
        c.check(
            dims.dim_polytope == expected,
            format!("FUNTF({d},{n}): {} != {expected}", dims.dim_polytope),
        );
        c.check(
            polytope_system(&lambda, &r).unwrap().dim() as i64 == expected,
            format!("FUNTF({d},{n}) free coordinates"),
        );
    }
    let mut rng = rng_from_seed(11);
    for i in 0..50 {
        let (lambda, r) = random_pattern(&mut rng, 5, 9);
        let dims = frame_space_dimensions(&lambda, &r).unwrap();
        c.check(
            2 * dims.dim_polytope == dims.dim_quotient,
            format!("pattern {i}: {dims:?}"),
        );
        c.check(
            polytope_system(&lambda, &r).unwrap().dim() as i64 == dims.dim_polytope,
            format!("pattern {i}: free coordinates"),
        );
    }
    c.finish();
}

fn example_frame() -> Frame {
    Frame::from_real_rows(&[vec![1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 1.0]]).unwrap()
}

/// `A(λ, θ, φ)`: the tangent directions that rotate each orthogonal pair
/// against itself.
fn cone_matrix(scale: f64, theta: f64, phi: f64) -> TangentMatrix {
    let a = C64::from_polar(scale, theta);
    let b = C64::from_polar(scale, phi);
    let z = C64::new(0.0, 0.0);
    TangentMatrix::new(CMatrix::from_row_slice(2, 4, &[z, z, a, -a, b, -b, z, z]))
}

#[test]
fn criterion_2_worked_example() {
    let mut c = Criterion::start(2, "worked example", 1);
    let f = example_frame();
    let tol = 1e-8;
    let s = spectrum_of(&f).unwrap();
    c.check(
        s.values().iter().all(|v| (v - 2.0).abs() <= tol),
        format!("spectrum {:?}", s.values()),
    );
    c.check(
        norms_of(&f).iter().all(|v| (v - 1.0).abs() <= tol),
        "norms",
    );
    let table = compute_eigensteps(&f);
    let expected: [&[f64]; 4] = [&[1.0], &[2.0, 0.0], &[2.0, 1.0], &[2.0, 2.0]];
    for (k, row) in expected.iter().enumerate() {
        let got = table.row(k + 1);
        c.check(
            got.len() == row.len() && got.iter().zip(*row).all(|(a, b)| (a - b).abs() <= tol),
            format!("eigenstep row {}: {got:?}", k + 1),
        );
    }
    let sp = spark(&f, DEFAULT_SPARK_TOL).unwrap();
    c.check(sp.spark == 2, format!("spark {}", sp.spark));
    let partition = is_orthodecomposable(&f, DEFAULT_ODF_TOL).unwrap();
    c.check(
        partition.as_ref().map(|p| p.parts.clone()) == Some(vec![vec![1, 2], vec![3, 4]]),
        format!("partition {partition:?}"),
    );
    c.check(stabilizer_dimension(&f) == 1, "stabilizer dimension");
    let full = f.d() * f.d() + f.n() - 1;
    c.check(full - momentum_jacobian_rank(&f) == 1, "Jacobian rank deficiency");
    let p = partition.expect("orthodecomposable");
    for (scale, theta, phi) in [(1.0, 0.0, 0.0), (0.25, 1.0, -2.5), (3.0, 2.0, 0.7)] {
        c.check(
            cone_membership(&f, &p, &cone_matrix(scale, theta, phi), DEFAULT_CONE_TOL).unwrap(),
            format!("A({scale},{theta},{phi}) in cone"),
        );
    }
    let x = cone_matrix(1.0, 0.0, 0.0);
    let x_prime = cone_matrix(1.0, 0.0, PI);
    c.check(cone_membership(&f, &p, &x, DEFAULT_CONE_TOL).unwrap(), "X in cone");
    c.check(cone_membership(&f, &p, &x_prime, DEFAULT_CONE_TOL).unwrap(), "X' in cone");
    let diff = TangentMatrix::new(x.matrix() - x_prime.matrix());
    c.check(!cone_membership(&f, &p, &diff, DEFAULT_CONE_TOL).unwrap(), "X - X' not in cone");
    c.finish();
}

#[test]
fn criterion_3_collapsed_branch() {
    let mut c = Criterion::start(3, "trichotomy branch 2", 5);
    let (lambda, r) = (spectrum(&[2.0, 1.0]), norms(&[2.0, 0.5, 0.5]));
    let verdict = check_admissible(&lambda, &r);
    c.check(verdict.admissible && !verdict.strong, format!("{verdict:?}"));
    c.check(
        classify_space(&lambda, &r).unwrap().kind == SpaceKind::SingularVariety,
        "classification",
    );
    let report = run_trichotomy(&lambda, &r, 100, 2024);
    let value = |m: &str| report.outcome(m).map(|o| o.value);
    c.check(value("constructed_members") == Some(100.0), "100 members built");
    c.check(value("spark_deficient_fraction") == Some(1.0), "all spark-deficient");
    c.check(report.passed(), format!("{:?}", report.outcomes));
    c.finish();
}

#[test]
fn criterion_4_generic_branch_full_spark() {
    let mut c = Criterion::start(4, "trichotomy branch 3", 60);
    for (d, n) in [(2, 5), (3, 5)] {
        let (lambda, r) = funtf(d, n);
        let report = run_trichotomy(&lambda, &r, 1000, 7 + d as u64);
        let value = |m: &str| report.outcome(m).map(|o| o.value);
        c.check(value("branch") == Some(3.0), format!("({d},{n}) branch"));
        c.check(value("constructed_members") == Some(1000.0), format!("({d},{n}) members"));
        c.check(value("full_spark_fraction") == Some(1.0), format!("({d},{n}) full spark"));
        let min_minor = value("min_plucker_modulus").unwrap_or(0.0);
        c.check(min_minor > 1e-6, format!("({d},{n}) min minor {min_minor:e}"));
        c.check(report.passed(), format!("({d},{n}) {:?}", report.outcomes));
    }
    c.finish();
}

#[test]
fn criterion_5_torus_invariants() {
    let mut c = Criterion::start(5, "torus-action invariants", 30);
    let frames: Vec<Frame> = (0..100)
        .map(|i| {
            let mut rng = rng_from_seed(child_seed(55, i));
            let d = (i as usize % 3) + 1;
            let n = d + 1 + (i as usize / 3) % (6 - d);
            random_strict_frame(&mut rng, d, n)
        })
        .collect();
    let e = torus_battery(&frames, 56, Execution::default()).unwrap();
    c.check(e.norms <= 1e-12, format!("norms {:e}", e.norms));
    c.check(e.frame_operator <= 1e-10, format!("frame operator {:e}", e.frame_operator));
    c.check(e.eigensteps <= 1e-8, format!("eigensteps {:e}", e.eigensteps));
    c.check(e.periodicity <= 1e-12, format!("periodicity {:e}", e.periodicity));
    c.check(e.commutativity <= 1e-9, format!("commutativity {:e}", e.commutativity));
    c.check(e.equivariance <= 1e-10, format!("equivariance {:e}", e.equivariance));
    c.finish();
}

#[test]
fn criterion_6_momentum_identity() {
    let mut c = Criterion::start(6, "momentum identity", 10);
    let worst = momentum_battery(100, 66, 1e-5, Execution::default()).unwrap();
    c.check(worst <= 1e-6, format!("residual {worst:e}"));
    // The half-angle convention: dropping the factor 1/2 must break the identity.
    let mut rng = rng_from_seed(67);
    let f = random_strict_frame(&mut rng, 2, 4);
    let x = TangentMatrix::new(complex_gaussian(&mut rng, 2, 4));
    let check = verify_momentum_identity(&f, &x, ActionIndex::new(3, 1), 1.3, 1e-5).unwrap();
    let doubled = (2.0 * check.lhs - check.rhs).abs() / check.rhs.abs().max(1e-12);
    c.check(doubled > 0.5, format!("st convention not detected ({doubled:e})"));
    c.finish();
}

#[test]
fn criterion_7_synthesis_round_trip() {
    let mut c = Criterion::start(7, "synthesis round trip", 30);
    let mut rng = rng_from_seed(77);
    let mut worst_weight = 0.0_f64;
    for _ in 0..1000 {
        let z = complex_gaussian(&mut rng, 3, 3);
        let s = &z * z.adjoint();
        let f = complex_gaussian(&mut rng, 3, 1);
        let t = &s + &f * f.adjoint();
        let hermitian = |m: CMatrix| HermitianOperator::new((&m + m.adjoint()) * C64::new(0.5, 0.0)).unwrap();
        let before = hermitian_eig(&hermitian(s));
        let after = hermitian_eig(&hermitian(t));
        for (p, w) in rank_one_weights(&before.values, &after.values, 0.0) {
            let direct = before.vectors.column(p).dotc(&f.column(0)).norm_sqr();
            worst_weight = worst_weight.max((w - direct).abs() / direct.max(1.0));
        }
    }
    c.check(worst_weight <= 1e-9, format!("rank-one oracle {worst_weight:e}"));
    let sets = round_trip_parameter_sets();
    c.check(sets.len() == 5, "five parameter sets");
    let worst = synthesis_round_trip(&sets, 40, 78).unwrap();
    c.check(worst <= 1e-8, format!("round trip {worst:e}"));
    c.finish();
}

#[test]
fn criterion_8_odf_equivalence() {
    let mut c = Criterion::start(8, "orthodecomposability equivalence", 30);
    let b = odf_battery(200, 50, 88, Execution::default()).unwrap();
    c.check(b.frames == 250, "frame count");
    c.check(b.disagreements == 0, format!("{} disagreements", b.disagreements));
    c.check(b.duality_mismatches == 0, format!("{} duality mismatches", b.duality_mismatches));
    c.check(b.missed_witnesses == 0, format!("{} missed witnesses", b.missed_witnesses));
    c.finish();
}

#[test]
fn criterion_9_polytope_sampler() {
    let mut c = Criterion::start(9, "polytope sampler", 20);
    let (lambda, r) = funtf(2, 4);
    let system = polytope_system(&lambda, &r).unwrap();
    c.check(system.dim() == 1, "one free coordinate");
    let start = interior_point(&system).unwrap();
    let points = hit_and_run_points(
        &system,
        &start,
        10_000,
        DEFAULT_BURN_IN,
        default_thin(system.dim()),
        99,
    )
    .unwrap();
    let marginal: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let ks = ks_uniform(&marginal, 1.0, 2.0);
    c.check(ks.p_value > 0.01, format!("KS p = {:.4}", ks.p_value));
    let m = mean(&marginal);
    c.check((m - 1.5).abs() <= 0.02, format!("mean {m:.4}"));
    c.finish();
}
