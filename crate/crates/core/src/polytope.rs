//! The eigenstep polytope as an explicit inequality system, and samplers on it.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::admissibility::check_admissible;
use crate::eigensteps::{forced_triangle_cells, table_relations, Cell, EigenstepTable};
use crate::error::{FrameError, Result};
use crate::frame::{NormVector, Spectrum};
use crate::rng::{rng_from_seed, SampleRng};
use crate::simplex::{max_min_slack, maximize};

/// Minimum slack for a point to count as interior.
pub const INTERIOR_MARGIN: f64 = 1e-10;
pub const DEFAULT_BURN_IN: usize = 1000;

/// Default thinning: ten steps per dimension.
pub fn default_thin(dim: usize) -> usize {
    (10 * dim).max(1)
}

/// `coef · x + constant`.
#[derive(Debug, Clone, PartialEq)]
struct Affine {
    coef: Vec<f64>,
    constant: f64,
}

impl Affine {
    fn constant(n: usize, value: f64) -> Self {
        Self {
            coef: vec![0.0; n],
            constant: value,
        }
    }

    fn variable(n: usize, i: usize) -> Self {
        let mut coef = vec![0.0; n];
        coef[i] = 1.0;
        Self { coef, constant: 0.0 }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.coef.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    fn is_constant(&self) -> bool {
        self.coef.iter().all(|c| *c == 0.0)
    }
}

/// Linear description of the eigenstep polytope in its free coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PolytopeSystem {
    d: usize,
    n: usize,
    free: Vec<Cell>,
    entries: Vec<Vec<Affine>>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    /// Largest violation among constraints that reduced to constants.
    constant_violation: f64,
    tol: f64,
}

impl PolytopeSystem {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of free coordinates.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Table cells used as free coordinates, in coordinate order.
    pub fn free_index_map(&self) -> &[Cell] {
        &self.free
    }

    /// Rows of `A` in `A x <= b`.
    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Cells whose value does not depend on the free coordinates.
    pub fn fixed_values(&self) -> Vec<(Cell, f64)> {
        let mut out = Vec::new();
        for (k, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if e.is_constant() {
                    out.push(((k + 1, j + 1), e.constant));
                }
            }
        }
        out
    }

    /// True when some constraint reduced to an unsatisfiable constant.
    pub fn trivially_infeasible(&self) -> bool {
        self.constant_violation > self.tol
    }

    /// `b - A x` for every inequality.
    pub fn slacks(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| bi - row.iter().zip(x).map(|(c, v)| c * v).sum::<f64>())
            .collect()
    }

    pub fn min_slack(&self, x: &[f64]) -> f64 {
        self.slacks(x).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Table with the free coordinates set to `x`.
    pub fn table_at(&self, x: &[f64]) -> Result<EigenstepTable> {
        if x.len() != self.dim() {
            return Err(FrameError::DimensionMismatch(format!(
                "point has {} coordinates, polytope has {}",
                x.len(),
                self.dim()
            )));
        }
        let rows = self
            .entries
            .iter()
            .map(|row| row.iter().map(|e| e.eval(x)).collect())
            .collect();
        EigenstepTable::new(self.d, rows)
    }

    /// Free coordinates read off a table of matching shape.
    pub fn coordinates_of(&self, table: &EigenstepTable) -> Vec<f64> {
        self.free.iter().map(|&(k, j)| table.get(k, j)).collect()
    }
}

/// Builds the inequality system for `(λ, r)`.
///
/// Top-row cells equal `λ`, cells in the triangles below repeated values of
/// `λ` equal the repeated value, and in each lower row the last remaining
/// cell is solved from the row sum. Everything else is a free coordinate.
pub fn polytope_system(lambda: &Spectrum, r: &NormVector) -> Result<PolytopeSystem> {
    let verdict = check_admissible(lambda, r);
    if !verdict.admissible {
        return Err(FrameError::Precondition(format!(
            "r is not λ-admissible (index {})",
            verdict.failing_index.unwrap_or(0)
        )));
    }
    Ok(build_system(lambda.values(), r.values()))
}

pub(crate) fn build_system(lambda: &[f64], r: &[f64]) -> PolytopeSystem {
    let d = lambda.len();
    let n = r.len();
    let forced = forced_triangle_cells(lambda, n);
    let is_forced = |c: Cell| forced.contains(&c);

    // Free cells: per row, non-forced cells except the last one.
    let mut free = Vec::new();
    for k in 1..n {
        let open: Vec<usize> = (1..=k.min(d)).filter(|&j| !is_forced((k, j))).collect();
        if let Some((_, rest)) = open.split_last() {
            free.extend(rest.iter().map(|&j| (k, j)));
        }
    }
    let dim = free.len();
    let tol = 1e-9 * lambda.iter().sum::<f64>().max(1.0);

    let mut entries: Vec<Vec<Affine>> = Vec::with_capacity(n);
    let mut constant_violation: f64 = 0.0;
    let mut partial = 0.0;
    for k in 1..=n {
        partial += r[k - 1];
        let len = k.min(d);
        if k == n {
            entries.push(lambda.iter().map(|&v| Affine::constant(dim, v)).collect());
            break;
        }
        let mut row: Vec<Option<Affine>> = (1..=len)
            .map(|j| {
                if is_forced((k, j)) {
                    let group_value = lambda[j - 1];
                    Some(Affine::constant(dim, group_value))
                } else {
                    free.iter()
                        .position(|&c| c == (k, j))
                        .map(|i| Affine::variable(dim, i))
                }
            })
            .collect();
        let mut rest = Affine::constant(dim, partial);
        for e in row.iter().flatten() {
            for (c, v) in rest.coef.iter_mut().zip(&e.coef) {
                *c -= v;
            }
            rest.constant -= e.constant;
        }
        match row.iter().position(Option::is_none) {
            Some(slot) => row[slot] = Some(rest),
            None => constant_violation = constant_violation.max(rest.constant.abs()),
        }
        entries.push(row.into_iter().map(|e| e.expect("every cell assigned")).collect());
    }

    let mut a = Vec::new();
    let mut b = Vec::new();
    let zero = Affine::constant(dim, 0.0);
    for rel in table_relations(d, n) {
        let upper = &entries[rel.upper.0 - 1][rel.upper.1 - 1];
        let lower = rel.lower.map_or(&zero, |(k, j)| &entries[k - 1][j - 1]);
        // upper >= lower  <=>  (lower - upper) · x <= upper.c - lower.c
        let coef: Vec<f64> = lower.coef.iter().zip(&upper.coef).map(|(l, u)| l - u).collect();
        let rhs = upper.constant - lower.constant;
        if coef.iter().all(|c| c.abs() <= 1e-14) {
            constant_violation = constant_violation.max(-rhs);
            continue;
        }
        a.push(coef);
        b.push(rhs);
    }
    PolytopeSystem {
        d,
        n,
        free,
        entries,
        a,
        b,
        constant_violation,
        tol,
    }
}

/// Point maximizing the smallest slack; errors when the polytope is empty or
/// has no interior.
pub fn interior_point(p: &PolytopeSystem) -> Result<Vec<f64>> {
    if p.trivially_infeasible() {
        return Err(FrameError::Infeasible);
    }
    if p.dim() == 0 {
        return Err(FrameError::NoInterior("polytope is zero-dimensional".into()));
    }
    let (x, slack) = max_min_slack(&p.a, &p.b, false)?;
    if slack <= INTERIOR_MARGIN {
        return Err(FrameError::NoInterior(format!(
            "largest achievable minimum slack is {slack:e}"
        )));
    }
    Ok(x)
}

/// Some point of the polytope, interior when one exists.
pub fn feasible_point(p: &PolytopeSystem) -> Result<Vec<f64>> {
    if p.trivially_infeasible() {
        return Err(FrameError::Infeasible);
    }
    if p.dim() == 0 {
        return Ok(Vec::new());
    }
    Ok(max_min_slack(&p.a, &p.b, false)?.0)
}

fn random_direction(rng: &mut SampleRng, dim: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return u.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// Hit-and-run chain on `{ y : A y <= b }` started at a strictly feasible point.
fn chain(
    a: &[Vec<f64>],
    b: &[f64],
    start: Vec<f64>,
    count: usize,
    burn_in: usize,
    thin: usize,
    rng: &mut SampleRng,
) -> Vec<Vec<f64>> {
    let dim = start.len();
    let mut x = start;
    let mut step = |x: &mut Vec<f64>| {
        let u = random_direction(rng, dim);
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (row, bi) in a.iter().zip(b) {
            let au: f64 = row.iter().zip(&u).map(|(c, v)| c * v).sum();
            let slack = bi - row.iter().zip(x.iter()).map(|(c, v)| c * v).sum::<f64>();
            if au > 1e-14 {
                hi = hi.min(slack / au);
            } else if au < -1e-14 {
                lo = lo.max(slack / au);
            }
        }
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return;
        }
        let t = rng.random_range(lo..hi);
        for (xi, ui) in x.iter_mut().zip(&u) {
            *xi += t * ui;
        }
    };
    for _ in 0..burn_in {
        step(&mut x);
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..thin.max(1) {
            step(&mut x);
        }
        out.push(x.clone());
    }
    out
}

/// Free-coordinate samples from a hit-and-run chain.
pub fn hit_and_run_points(
    p: &PolytopeSystem,
    start: &[f64],
    count: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if start.len() != p.dim() {
        return Err(FrameError::DimensionMismatch(format!(
            "start has {} coordinates, polytope has {}",
            start.len(),
            p.dim()
        )));
    }
    if p.dim() == 0 {
        return Ok(vec![Vec::new(); count]);
    }
    let slack = p.min_slack(start);
    if !(slack > 0.0) {
        return Err(FrameError::InfeasibleStart(slack));
    }
    let mut rng = rng_from_seed(seed);
    Ok(chain(&p.a, &p.b, start.to_vec(), count, burn_in, thin, &mut rng))
}

/// `count` eigenstep tables from a hit-and-run chain targeting the uniform
/// distribution on the polytope. A zero-dimensional polytope yields copies
/// of its single point.
pub fn hit_and_run(
    p: &PolytopeSystem,
    start: &[f64],
    count: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<Vec<EigenstepTable>> {
    hit_and_run_points(p, start, count, burn_in, thin, seed)?
        .iter()
        .map(|x| p.table_at(x))
        .collect()
}

/// Indices of inequalities that hold with equality on the whole polytope.
pub fn implicit_equalities(p: &PolytopeSystem) -> Result<Vec<usize>> {
    if p.trivially_infeasible() {
        return Err(FrameError::Infeasible);
    }
    let scale = p.b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let mut out = Vec::new();
    for (i, row) in p.a.iter().enumerate() {
        // Largest slack of row i: b_i + max(-a_i · x).
        let c: Vec<f64> = row.iter().map(|v| -v).collect();
        let sol = maximize(&c, &p.a, &p.b).map_err(|_| FrameError::Infeasible)?;
        if p.b[i] + sol.objective <= 1e-9 * scale {
            out.push(i);
        }
    }
    Ok(out)
}

/// Affine parametrization `x = origin + basis · y` of the polytope's affine
/// hull, together with the remaining inequalities in `y`.
struct FaceChart {
    origin: DVector<f64>,
    basis: DMatrix<f64>,
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl FaceChart {
    fn lift(&self, y: &[f64]) -> Vec<f64> {
        let y = DVector::from_column_slice(y);
        (&self.origin + &self.basis * y).iter().copied().collect()
    }
}

fn face_chart(p: &PolytopeSystem) -> Result<FaceChart> {
    let x0 = feasible_point(p)?;
    let equalities = implicit_equalities(p)?;
    let dim = p.dim();
    let basis = if equalities.is_empty() {
        DMatrix::identity(dim, dim)
    } else {
        let e = DMatrix::from_fn(equalities.len(), dim, |i, j| p.a[equalities[i]][j]);
        null_space(&e)
    };
    let origin = DVector::from_column_slice(&x0);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, row) in p.a.iter().enumerate() {
        if equalities.contains(&i) {
            continue;
        }
        let r = DVector::from_column_slice(row);
        let coef: Vec<f64> = (basis.transpose() * &r).iter().copied().collect();
        let rhs = p.b[i] - r.dot(&origin);
        if coef.iter().all(|c| c.abs() <= 1e-12) {
            continue;
        }
        a.push(coef);
        b.push(rhs);
    }
    Ok(FaceChart {
        origin,
        basis,
        a,
        b,
    })
}

/// Orthonormal basis of the null space of `m` (as columns).
fn null_space(m: &DMatrix<f64>) -> DMatrix<f64> {
    let cols = m.ncols();
    // Pad to a square matrix so the SVD exposes every right singular vector.
    let mut padded = DMatrix::zeros(m.nrows().max(cols), cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..cols)
        .filter(|&i| svd.singular_values[i] <= 1e-9 * smax.max(1.0))
        .collect();
    DMatrix::from_fn(cols, keep.len(), |r, c| v_t[(keep[c], r)])
}

/// Samples from the relative interior of the polytope: implicit equalities
/// are detected and the chain runs inside their common affine hull. Works
/// for full-dimensional and collapsed polytopes alike.
pub fn sample_relative_interior(
    p: &PolytopeSystem,
    count: usize,
    burn_in: usize,
    thin: usize,
    seed: u64,
) -> Result<Vec<EigenstepTable>> {
    if p.dim() == 0 {
        if p.trivially_infeasible() {
            return Err(FrameError::Infeasible);
        }
        let t = p.table_at(&[])?;
        return Ok(vec![t; count]);
    }
    let chart = face_chart(p)?;
    let face_dim = chart.basis.ncols();
    let points = if face_dim == 0 || chart.a.is_empty() {
        vec![chart.lift(&vec![0.0; face_dim]); count]
    } else {
        let (y0, slack) = max_min_slack(&chart.a, &chart.b, true)?;
        if slack <= 0.0 {
            return Err(FrameError::NoInterior(format!(
                "relative interior not found (slack {slack:e})"
            )));
        }
        let mut rng = rng_from_seed(seed);
        chain(&chart.a, &chart.b, y0, count, burn_in, thin, &mut rng)
            .iter()
            .map(|y| chart.lift(y))
            .collect()
    };
    points.iter().map(|x| p.table_at(x)).collect()
}

/// Dimension of the polytope's affine hull.
pub fn face_dimension(p: &PolytopeSystem) -> Result<usize> {
    if p.dim() == 0 {
        return Ok(0);
    }
    Ok(face_chart(p)?.basis.ncols())
}
