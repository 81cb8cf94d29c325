//! Deciding whether the torus points of a variety are Zariski dense in it.
//!
//! The pipeline for a hypersurface `g = 0`:
//!
//! 1. `g` must be associate to `g*` up to a unit monomial; otherwise the
//!    variety is not invariant under `z -> 1/conj(z)` and cannot be dense.
//! 2. Plane curves with at most three terms are solved exactly.
//! 3. An odd fiber degree over some coordinate forces a torus point in every
//!    generic torus fiber (the involution on an odd set has a fixed point).
//! 4. Otherwise the fibers over a θ grid are sampled and the roots tracked; a
//!    long enough arc of unit-modulus roots on one branch certifies density.
//!
//! Inputs are assumed irreducible: for reducible curves a dense verdict only
//! speaks for the component carrying the witness.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::laurent::AssociateWitness;
use crate::roots::{circle_deviation, roots, RootSet, DEFAULT_CIRCLE_TOL};
use crate::torus::{solve_trinomial, SolutionKind, TorusSolutionSet};
use crate::tracking::{track_branches_with, Branch, BranchPoint, BranchWitness, TrackOptions};
use crate::{Association, LaurentPoly};

/// Witness points must satisfy `|g| <= WITNESS_RESIDUAL * sum |c|`.
pub const WITNESS_RESIDUAL: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 4096;
pub const DEFAULT_WINDOWS: usize = 32;
const CONFIRM_TRIALS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarietySpec {
    pub n: usize,
    pub generators: Vec<LaurentPoly>,
    /// Base coordinates of the projection used for sampling; defaults to all
    /// but the fiber variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_projection: Option<Vec<usize>>,
}

impl VarietySpec {
    pub fn new(generators: Vec<LaurentPoly>, declared_projection: Option<Vec<usize>>) -> Result<Self, DensityError> {
        let n = generators.first().ok_or(DensityError::NoGenerators)?.nvars();
        if n == 0 {
            return Err(DensityError::NoGenerators);
        }
        for g in &generators {
            if g.nvars() != n {
                return Err(DensityError::VariableCountMismatch);
            }
            if g.is_zero() {
                return Err(DensityError::ZeroGenerator);
            }
        }
        if let Some(proj) = &declared_projection {
            let mut seen = vec![false; n];
            for &k in proj {
                if k >= n || std::mem::replace(&mut seen[k], true) {
                    return Err(DensityError::BadProjection);
                }
            }
            if proj.len() + 1 != n {
                return Err(DensityError::BadProjection);
            }
        }
        Ok(VarietySpec { n, generators, declared_projection })
    }

    pub fn hypersurface(g: LaurentPoly) -> Result<Self, DensityError> {
        Self::new(vec![g], None)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error("no generators")]
    NoGenerators,
    #[error("generators live in different numbers of variables")]
    VariableCountMismatch,
    #[error("a generator is the zero polynomial")]
    ZeroGenerator,
    #[error("declared projection must list n - 1 distinct coordinates")]
    BadProjection,
    #[error("the fiber variable does not occur; the projection is not finite")]
    FiberVariableAbsent,
    #[error("projection degree is only defined for a single generator in 2 variables")]
    NotPlaneCurve,
    #[error("the generator is a nonzero constant, so the variety is empty")]
    EmptyVariety,
}

/// A sampling window: `grid_size` base points within angle `delta` of `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProbe {
    pub u: Vec<f64>,
    pub delta: f64,
    pub grid_size: usize,
    pub tol: f64,
}

impl Default for DensityProbe {
    fn default() -> Self {
        DensityProbe { u: vec![0.0], delta: PI, grid_size: DEFAULT_GRID, tol: DEFAULT_CIRCLE_TOL }
    }
}

impl DensityProbe {
    pub fn full_circle(grid_size: usize, tol: f64) -> Self {
        DensityProbe { u: vec![0.0], delta: PI, grid_size, tol }
    }

    pub fn is_full_circle(&self) -> bool {
        self.delta >= PI
    }

    /// Consecutive clean samples needed on one branch.
    pub fn min_run(&self) -> usize {
        (self.grid_size / 8).max(2)
    }

    /// Sample angles, increasing. A full circle is sampled half-open.
    pub fn thetas(&self) -> Vec<f64> {
        let u = self.u.first().copied().unwrap_or(0.0);
        let n = self.grid_size;
        if self.is_full_circle() {
            (0..n).map(|k| (u + TAU * k as f64 / n as f64).rem_euclid(TAU)).collect::<Vec<_>>()
        } else if n == 1 {
            vec![u]
        } else {
            (0..n).map(|k| u - self.delta + 2.0 * self.delta * k as f64 / (n - 1) as f64).collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Dense,
    NotDense,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    NotSelfStar,
    OddDegree,
    BranchWitness,
    NoBranchFound,
    ExactPointSet,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelfStar {
    Yes,
    No,
    Inconclusive,
}

/// One generator's part of the self-star check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarEntry {
    pub generator: LaurentPoly,
    pub star: LaurentPoly,
    pub association: Association,
    /// A point where the generator vanishes and its star does not, showing the
    /// zero sets differ (needed because non-reduced generators can have
    /// non-associate stars with the same zero set).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separating_point: Option<Vec<Complex64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StarTranscript {
    pub outcome: SelfStar,
    pub entries: Vec<StarEntry>,
}

/// Points `(θ, w)` of a tracked branch; the base point is
/// `z_k = exp(i (θ + phases[k]))` for each base variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcCertificate {
    pub generator: LaurentPoly,
    pub base_vars: Vec<usize>,
    pub fiber_var: usize,
    pub phases: Vec<f64>,
    pub points: Vec<ArcPoint>,
    pub tol: f64,
    /// Number of consecutive samples required; a stand-in for "an open arc".
    pub min_run: usize,
    /// Angular spacing of the grid the points were taken from.
    pub spacing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcPoint {
    pub theta: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateDetail {
    None,
    PointSet { generator: LaurentPoly, solutions: TorusSolutionSet },
    OddDegree { fiber_var: usize, degree: i64, arc: Option<ArcCertificate> },
    Arc(ArcCertificate),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub self_star: StarTranscript,
    pub detail: CertificateDetail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityVerdict {
    pub verdict: Verdict,
    pub reason: Reason,
    pub certificate: Certificate,
    pub probe: DensityProbe,
    /// 1 for a sampled arc on a curve, 0 for a finite point set, absent otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub real_dimension: Option<usize>,
    /// The full sampled fibers behind an arc certificate. Not serialized.
    #[serde(skip)]
    pub witness: Option<BranchWitness>,
}

impl DensityVerdict {
    pub fn self_star(&self) -> SelfStar {
        self.certificate.self_star.outcome
    }

    pub fn arc(&self) -> Option<&ArcCertificate> {
        match &self.certificate.detail {
            CertificateDetail::Arc(a) => Some(a),
            CertificateDetail::OddDegree { arc, .. } => arc.as_ref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecideConfig {
    pub probe: DensityProbe,
    /// Base windows scanned when the full probe finds no long enough arc.
    pub windows: usize,
    pub seed: u64,
}

impl Default for DecideConfig {
    fn default() -> Self {
        DecideConfig { probe: DensityProbe::default(), windows: DEFAULT_WINDOWS, seed: 0 }
    }
}

// ---------------------------------------------------------------------------
// Self-star

pub fn self_star_check(v: &VarietySpec) -> StarTranscript {
    self_star_check_seeded(v, 0)
}

pub fn self_star_check_seeded(v: &VarietySpec, seed: u64) -> StarTranscript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5e1f_57a2);
    let mut entries = Vec::new();
    for g in &v.generators {
        let star = g.star();
        let association = g.associates(&star).expect("generators are nonzero");
        let separating_point = if association.is_associate() { None } else { separating_point(g, &star, &mut rng) };
        entries.push(StarEntry { generator: g.clone(), star, association, separating_point });
    }
    let all_yes = entries.iter().all(|e| e.association.is_associate());
    let outcome = if all_yes {
        SelfStar::Yes
    } else if entries.len() == 1 && entries[0].separating_point.is_some() {
        SelfStar::No
    } else {
        SelfStar::Inconclusive
    };
    StarTranscript { outcome, entries }
}

/// `|q(x)|` relative to the size of its terms at `x`.
fn relative_value(q: &LaurentPoly, x: &[Complex64]) -> f64 {
    let value = q.eval(x).map(|v| v.norm()).unwrap_or(f64::INFINITY);
    let scale: f64 = q
        .to_complex_terms()
        .iter()
        .map(|(e, c)| c.norm() * e.0.iter().zip(x).map(|(&k, z)| z.norm().powi(k as i32)).product::<f64>())
        .sum();
    value / scale.max(f64::MIN_POSITIVE)
}

fn separating_point(g: &LaurentPoly, star: &LaurentPoly, rng: &mut ChaCha8Rng) -> Option<Vec<Complex64>> {
    let n = g.nvars();
    let free = (0..n).rev().find(|&k| g.involves(k))?;
    for _ in 0..CONFIRM_TRIALS {
        let fixed: Vec<Complex64> = (0..n - 1)
            .map(|_| Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..TAU)))
            .collect();
        let Ok(fp) = g.fiber_restrict(&fixed, free) else { continue };
        let Ok(rs) = roots(&fp.coeffs) else { continue };
        for r in &rs.roots {
            let mut x = fixed.clone();
            x.insert(free, r.value);
            if relative_value(g, &x) <= 1e-10 && relative_value(star, &x) > 1e-6 {
                return Some(x);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Degrees

/// Generic fiber size of the projection of a plane curve onto coordinate
/// `coord`, i.e. the exponent span of the other variable.
pub fn projection_degree(v: &VarietySpec, coord: usize) -> Result<i64, DensityError> {
    if v.n != 2 || v.generators.len() != 1 || coord > 1 {
        return Err(DensityError::NotPlaneCurve);
    }
    fiber_degree(&v.generators[0], 1 - coord)
}

/// Exponent span of `fiber` in `g`.
pub fn fiber_degree(g: &LaurentPoly, fiber: usize) -> Result<i64, DensityError> {
    if !g.involves(fiber) {
        return Err(DensityError::FiberVariableAbsent);
    }
    Ok(g.degree_span(fiber))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum OddDegree {
    /// Projecting away `fiber_var` has odd degree `degree`.
    Dense { fiber_var: usize, degree: i64 },
    Inapplicable,
}

/// One-sided: an odd fiber degree over some coordinate projection of a
/// self-star hypersurface implies density. Assumes the self-star check passed.
pub fn odd_degree_criterion(v: &VarietySpec) -> OddDegree {
    if v.generators.len() != 1 {
        return OddDegree::Inapplicable;
    }
    let g = &v.generators[0];
    let candidates: Vec<usize> = match &v.declared_projection {
        Some(base) => (0..v.n).filter(|k| !base.contains(k)).collect(),
        None => (0..v.n).rev().collect(),
    };
    for fiber_var in candidates {
        if let Ok(degree) = fiber_degree(g, fiber_var) {
            if degree % 2 == 1 {
                return OddDegree::Dense { fiber_var, degree };
            }
        }
    }
    OddDegree::Inapplicable
}

// ---------------------------------------------------------------------------
// Sampling

/// Sampling layout for one generator: which variable is solved for and the
/// phase offsets of the base loop `z_k = exp(i (θ + phase_k))`.
#[derive(Debug, Clone, PartialEq)]
struct Layout {
    base_vars: Vec<usize>,
    fiber_var: usize,
    phases: Vec<f64>,
}

impl Layout {
    fn new(v: &VarietySpec, g: &LaurentPoly, preferred_fiber: Option<usize>) -> Result<Self, DensityError> {
        let fiber_var = match (preferred_fiber, &v.declared_projection) {
            (Some(f), _) => f,
            (None, Some(base)) => (0..v.n).find(|k| !base.contains(k)).expect("validated"),
            (None, None) => (0..v.n).rev().find(|&k| g.involves(k)).ok_or(DensityError::EmptyVariety)?,
        };
        if !g.involves(fiber_var) {
            return Err(DensityError::FiberVariableAbsent);
        }
        let base_vars: Vec<usize> = (0..v.n).filter(|&k| k != fiber_var).collect();
        // irrational offsets keep the diagonal loop away from special subtori
        let phases = (0..base_vars.len()).map(|k| (k as f64 * 0.618_033_988_749_895 * TAU).rem_euclid(TAU)).collect();
        Ok(Layout { base_vars, fiber_var, phases })
    }

    fn base_point(&self, theta: f64) -> Vec<Complex64> {
        self.phases.iter().map(|&p| Complex64::from_polar(1.0, theta + p)).collect()
    }

    fn full_point(&self, theta: f64, value: Complex64) -> Vec<Complex64> {
        let mut x = self.base_point(theta);
        x.insert(self.fiber_var, value);
        x
    }
}

fn fiber_roots(g: &LaurentPoly, layout: &Layout, theta: f64) -> RootSet {
    let empty = RootSet { roots: vec![], residual_bound: 0.0, zero_roots: 0 };
    let Ok(fp) = g.fiber_restrict(&layout.base_point(theta), layout.fiber_var) else { return empty };
    roots(&fp.coeffs).unwrap_or(empty)
}

/// Smallest `||w| - 1|` over the roots of each sampled fiber (`None` where the
/// fiber has no roots), on the probe's grid. Uses the same fiber variable as
/// [`decide`].
pub fn fiber_deviation_profile(v: &VarietySpec, probe: &DensityProbe) -> Result<Vec<(f64, Option<f64>)>, DensityError> {
    let g = v.generators.first().ok_or(DensityError::NoGenerators)?;
    let preferred = match odd_degree_criterion(v) {
        OddDegree::Dense { fiber_var, .. } => Some(fiber_var),
        OddDegree::Inapplicable => None,
    };
    let layout = Layout::new(v, g, preferred)?;
    Ok(probe
        .thetas()
        .par_iter()
        .map(|&t| {
            let rs = fiber_roots(g, &layout, t);
            (t, rs.roots.iter().map(|r| circle_deviation(r.value)).reduce(f64::min))
        })
        .collect())
}

struct Pass {
    witness: BranchWitness,
    layout: Layout,
    probe: DensityProbe,
}

fn sample_pass(v: &VarietySpec, g: &LaurentPoly, probe: &DensityProbe, layout: Layout) -> Option<Pass> {
    let thetas = probe.thetas();
    let fibers: Vec<(f64, RootSet)> = thetas.par_iter().map(|&t| (t, fiber_roots(g, &layout, t))).collect();
    let opts = TrackOptions { tol: probe.tol, periodic: probe.is_full_circle(), ..TrackOptions::default() };
    let mut witness = track_branches_with(&fibers, opts).ok()?;
    witness.d = v.n - 1;
    Some(Pass { witness, layout, probe: probe.clone() })
}

fn is_clean(value: Complex64, tol: f64) -> bool {
    // on the circle and below the ambiguity band [tol/10, 10 tol]
    circle_deviation(value) < tol / 10.0
}

/// Longest stretch of consecutive clean points in any branch, as
/// `(branch, start, len)` in point positions.
fn longest_run(w: &BranchWitness, tol: f64) -> Option<(usize, usize, usize)> {
    let n = w.thetas.len();
    let mut best: Option<(usize, usize, usize)> = None;
    for (b, branch) in w.branches.iter().enumerate() {
        let mut start = 0;
        let mut len = 0;
        for (k, p) in branch.points.iter().enumerate() {
            let continues = k > 0 && (branch.points[k - 1].index + 1) % n == p.index;
            if is_clean(p.value, tol) {
                if len > 0 && continues {
                    len += 1;
                } else {
                    start = k;
                    len = 1;
                }
                if best.is_none_or(|(_, _, l)| len > l) {
                    best = Some((b, start, len));
                }
            } else {
                len = 0;
            }
        }
    }
    best
}

/// `d` when the witness holds a clean arc of at least an eighth of its grid
/// (and at least two samples), else 0.
pub fn real_dimension_estimate(witness: &BranchWitness) -> usize {
    let Some(tol) = witness.fibers.first().map(|f| f.tol) else { return 0 };
    let need = (witness.thetas.len() / 8).max(2);
    match longest_run(witness, tol) {
        Some((_, _, len)) if len >= need => witness.d,
        _ => 0,
    }
}

fn arc_from_run(g: &LaurentPoly, pass: &Pass, run: (usize, usize, usize)) -> ArcCertificate {
    let (b, start, len) = run;
    let pts = &pass.witness.branches[b].points[start..start + len];
    let spacing = if pass.probe.is_full_circle() {
        TAU / pass.probe.grid_size as f64
    } else {
        2.0 * pass.probe.delta / (pass.probe.grid_size.max(2) - 1) as f64
    };
    ArcCertificate {
        generator: g.clone(),
        base_vars: pass.layout.base_vars.clone(),
        fiber_var: pass.layout.fiber_var,
        phases: pass.layout.phases.clone(),
        points: pts.iter().map(|p| ArcPoint { theta: p.theta, value: p.value }).collect(),
        tol: pass.probe.tol,
        min_run: pass.probe.min_run(),
        spacing,
    }
}

/// Restricts a full-circle pass to the window of half-width `delta` about `u`,
/// at the same angular spacing.
fn window_of(pass: &Pass, u: f64, delta: f64) -> Pass {
    let n = pass.witness.thetas.len();
    let step = TAU / n as f64;
    let half = (delta / step).floor() as i64;
    let center = (u / step).round() as i64;
    let indices: Vec<usize> = (center - half..=center + half).map(|k| k.rem_euclid(n as i64) as usize).collect();
    let mut position = vec![usize::MAX; n];
    for (pos, &k) in indices.iter().enumerate() {
        position[k] = pos;
    }
    let w = &pass.witness;
    let thetas: Vec<f64> = indices.iter().map(|&k| w.thetas[k]).collect();
    let mut branches = Vec::new();
    for branch in &w.branches {
        let mut current: Vec<BranchPoint> = Vec::new();
        for p in &branch.points {
            let pos = position[p.index];
            if pos == usize::MAX {
                if !current.is_empty() {
                    branches.push(Branch { points: std::mem::take(&mut current) });
                }
                continue;
            }
            if current.last().is_some_and(|q| q.index + 1 != pos) {
                branches.push(Branch { points: std::mem::take(&mut current) });
            }
            current.push(BranchPoint { index: pos, theta: p.theta, value: p.value });
        }
        if !current.is_empty() {
            branches.push(Branch { points: current });
        }
    }
    let witness = BranchWitness {
        thetas,
        fibers: indices.iter().map(|&k| w.fibers[k].clone()).collect(),
        retained: indices.iter().map(|&k| w.retained[k]).collect(),
        branches,
        generic_count: w.generic_count,
        d: w.d,
    };
    // the window spans exactly `2 * half` grid steps
    let probe = DensityProbe { u: vec![u], delta: half as f64 * step, grid_size: indices.len(), tol: pass.probe.tol };
    Pass { witness, layout: pass.layout.clone(), probe }
}

struct Found {
    arc: ArcCertificate,
    witness: BranchWitness,
    probe: DensityProbe,
}

fn search(pass: &Pass, g: &LaurentPoly, windows: usize) -> Option<Found> {
    let tol = pass.probe.tol;
    if let Some(run) = longest_run(&pass.witness, tol) {
        if run.2 >= pass.probe.min_run() {
            return Some(Found { arc: arc_from_run(g, pass, run), witness: pass.witness.clone(), probe: pass.probe.clone() });
        }
    }
    if !pass.probe.is_full_circle() || windows == 0 {
        return None;
    }
    let delta = TAU / windows as f64;
    for k in 0..windows {
        let win = window_of(pass, TAU * k as f64 / windows as f64, delta);
        if let Some(run) = longest_run(&win.witness, tol) {
            if run.2 >= win.probe.min_run() {
                return Some(Found { arc: arc_from_run(g, &win, run), witness: win.witness, probe: win.probe });
            }
        }
    }
    None
}

/// Samples the probe once and looks for an arc. Returns `Dense` with a witness
/// or `Unknown`; never `NotDense`.
pub fn sample_decide(v: &VarietySpec, probe: &DensityProbe) -> Result<DensityVerdict, DensityError> {
    let transcript = self_star_check(v);
    if transcript.outcome != SelfStar::Yes {
        let verdict = if transcript.outcome == SelfStar::No { Verdict::NotDense } else { Verdict::Unknown };
        let reason = if transcript.outcome == SelfStar::No { Reason::NotSelfStar } else { Reason::Inconclusive };
        return Ok(plain(verdict, reason, transcript, probe.clone()));
    }
    let g = &v.generators[0];
    let layout = Layout::new(v, g, None)?;
    Ok(sampled_verdict(v, g, probe, layout, 0, transcript, None))
}

fn plain(verdict: Verdict, reason: Reason, transcript: StarTranscript, probe: DensityProbe) -> DensityVerdict {
    DensityVerdict {
        verdict,
        reason,
        certificate: Certificate { self_star: transcript, detail: CertificateDetail::None },
        probe,
        real_dimension: None,
        witness: None,
    }
}

fn sampled_verdict(
    v: &VarietySpec,
    g: &LaurentPoly,
    probe: &DensityProbe,
    layout: Layout,
    windows: usize,
    transcript: StarTranscript,
    odd: Option<(usize, i64)>,
) -> DensityVerdict {
    let found = sample_pass(v, g, probe, layout).and_then(|pass| search(&pass, g, windows));
    match (found, odd) {
        (Some(f), None) => DensityVerdict {
            verdict: Verdict::Dense,
            reason: Reason::BranchWitness,
            real_dimension: Some(real_dimension_estimate(&f.witness)),
            certificate: Certificate { self_star: transcript, detail: CertificateDetail::Arc(f.arc) },
            probe: f.probe,
            witness: Some(f.witness),
        },
        (None, None) => plain(Verdict::Unknown, Reason::NoBranchFound, transcript, probe.clone()),
        (found, Some((fiber_var, degree))) => {
            let (arc, witness, probe, dim) = match found {
                Some(f) => {
                    let dim = real_dimension_estimate(&f.witness);
                    (Some(f.arc), Some(f.witness), f.probe, Some(dim))
                }
                None => (None, None, probe.clone(), None),
            };
            DensityVerdict {
                verdict: Verdict::Dense,
                reason: Reason::OddDegree,
                real_dimension: dim,
                certificate: Certificate {
                    self_star: transcript,
                    detail: CertificateDetail::OddDegree { fiber_var, degree, arc },
                },
                probe,
                witness,
            }
        }
    }
}

pub fn decide(v: &VarietySpec) -> Result<DensityVerdict, DensityError> {
    decide_with(v, &DecideConfig::default())
}

pub fn decide_with(v: &VarietySpec, config: &DecideConfig) -> Result<DensityVerdict, DensityError> {
    let probe = &config.probe;
    let transcript = self_star_check_seeded(v, config.seed);
    // plane curves with at most three terms are solved exactly, whatever their star
    if v.n == 2 && v.generators.len() == 1 && v.generators[0].len() <= 3 {
        let g = &v.generators[0];
        if let Ok(solutions) = solve_trinomial(g) {
            if solutions.kind != SolutionKind::CosetFamily {
                return Ok(DensityVerdict {
                    verdict: Verdict::NotDense,
                    reason: Reason::ExactPointSet,
                    certificate: Certificate {
                        self_star: transcript,
                        detail: CertificateDetail::PointSet { generator: g.clone(), solutions },
                    },
                    probe: probe.clone(),
                    real_dimension: Some(0),
                    witness: None,
                });
            }
        }
    }
    match transcript.outcome {
        SelfStar::No => return Ok(plain(Verdict::NotDense, Reason::NotSelfStar, transcript, probe.clone())),
        SelfStar::Inconclusive => return Ok(plain(Verdict::Unknown, Reason::Inconclusive, transcript, probe.clone())),
        SelfStar::Yes => {}
    }
    if v.generators.len() != 1 || v.n < 2 {
        return Ok(plain(Verdict::Unknown, Reason::Inconclusive, transcript, probe.clone()));
    }
    let g = &v.generators[0];
    if g.terms().all(|(e, _)| e.is_zero()) {
        return Err(DensityError::EmptyVariety);
    }
    let (odd, preferred) = match odd_degree_criterion(v) {
        OddDegree::Dense { fiber_var, degree } => (Some((fiber_var, degree)), Some(fiber_var)),
        OddDegree::Inapplicable => (None, None),
    };
    let layout = Layout::new(v, g, preferred)?;
    Ok(sampled_verdict(v, g, probe, layout, config.windows, transcript, odd))
}

// ---------------------------------------------------------------------------
// Replay

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReplayError {
    #[error("self-star transcript does not replay: {0}")]
    SelfStar(String),
    #[error("point set does not replay: {0}")]
    PointSet(String),
    #[error("arc point {index} fails: {what}")]
    ArcPoint { index: usize, what: String },
    #[error("arc has {got} points, fewer than the required {need}")]
    ArcTooShort { got: usize, need: usize },
    #[error("odd-degree claim does not hold: {0}")]
    OddDegree(String),
    #[error("verdict {0:?} is not supported by its certificate")]
    Unsupported(Verdict),
}

/// Re-checks every claim in a verdict's certificate from scratch.
pub fn replay(verdict: &DensityVerdict) -> Result<(), ReplayError> {
    let t = &verdict.certificate.self_star;
    replay_star(t)?;
    match (&verdict.verdict, &verdict.certificate.detail) {
        (Verdict::NotDense, CertificateDetail::None) if verdict.reason == Reason::NotSelfStar => {
            if t.outcome != SelfStar::No {
                return Err(ReplayError::SelfStar("expected a failed self-star check".into()));
            }
        }
        (Verdict::NotDense, CertificateDetail::PointSet { generator, solutions }) => {
            if t.entries.first().map(|e| &e.generator) != Some(generator) {
                return Err(ReplayError::PointSet("generator mismatch".into()));
            }
            let again = solve_trinomial(generator).map_err(|e| ReplayError::PointSet(e.to_string()))?;
            if again.kind != solutions.kind || again.points.len() != solutions.points.len() {
                return Err(ReplayError::PointSet("different solution shape".into()));
            }
            for (a, b) in again.points.iter().zip(&solutions.points) {
                if a.distance(b) > 1e-9 || b.residual > 1e-9 {
                    return Err(ReplayError::PointSet("point mismatch".into()));
                }
            }
        }
        (Verdict::Dense, detail) => {
            if t.outcome != SelfStar::Yes {
                return Err(ReplayError::SelfStar("dense verdict without a self-star generator".into()));
            }
            match detail {
                CertificateDetail::Arc(arc) => replay_arc(arc)?,
                CertificateDetail::OddDegree { fiber_var, degree, arc } => {
                    let g = &t.entries[0].generator;
                    let actual = fiber_degree(g, *fiber_var).map_err(|e| ReplayError::OddDegree(e.to_string()))?;
                    if actual != *degree || actual % 2 != 1 {
                        return Err(ReplayError::OddDegree(format!("degree is {actual}")));
                    }
                    if let Some(arc) = arc {
                        replay_arc(arc)?;
                    }
                }
                _ => return Err(ReplayError::Unsupported(Verdict::Dense)),
            }
        }
        (Verdict::Unknown, _) => {}
        (v, _) => return Err(ReplayError::Unsupported(*v)),
    }
    Ok(())
}

fn replay_star(t: &StarTranscript) -> Result<(), ReplayError> {
    for e in &t.entries {
        if e.generator.star() != e.star {
            return Err(ReplayError::SelfStar("recorded star is wrong".into()));
        }
        let again = e.generator.associates(&e.star).map_err(|err| ReplayError::SelfStar(err.to_string()))?;
        if again != e.association {
            return Err(ReplayError::SelfStar("association differs".into()));
        }
        if let Some(w) = again.witness() {
            check_witness(&e.generator, &e.star, w)?;
        }
        if let Some(x) = &e.separating_point {
            if relative_value(&e.generator, x) > 1e-10 || relative_value(&e.star, x) <= 1e-6 {
                return Err(ReplayError::SelfStar("separating point does not separate".into()));
            }
        }
    }
    let expected = if t.entries.iter().all(|e| e.association.is_associate()) {
        SelfStar::Yes
    } else if t.entries.len() == 1 && t.entries[0].separating_point.is_some() {
        SelfStar::No
    } else {
        SelfStar::Inconclusive
    };
    if expected != t.outcome {
        return Err(ReplayError::SelfStar(format!("outcome should be {expected:?}")));
    }
    Ok(())
}

fn check_witness(p: &LaurentPoly, q: &LaurentPoly, w: &AssociateWitness) -> Result<(), ReplayError> {
    if p.shift(&w.shift).scale(&w.scale) != *q {
        return Err(ReplayError::SelfStar("associate witness does not reproduce the star".into()));
    }
    Ok(())
}

fn replay_arc(arc: &ArcCertificate) -> Result<(), ReplayError> {
    if arc.points.len() < arc.min_run {
        return Err(ReplayError::ArcTooShort { got: arc.points.len(), need: arc.min_run });
    }
    let layout = Layout { base_vars: arc.base_vars.clone(), fiber_var: arc.fiber_var, phases: arc.phases.clone() };
    let scale = arc.generator.l1_norm();
    for (index, p) in arc.points.iter().enumerate() {
        let x = layout.full_point(p.theta, p.value);
        let r = arc.generator.eval(&x).map_err(|e| ReplayError::ArcPoint { index, what: e.to_string() })?.norm();
        if r > WITNESS_RESIDUAL * scale {
            return Err(ReplayError::ArcPoint { index, what: format!("residual {r:e}") });
        }
        if !is_clean(p.value, arc.tol) {
            return Err(ReplayError::ArcPoint { index, what: "not on the unit circle".into() });
        }
        if index > 0 {
            let step = p.theta - arc.points[index - 1].theta;
            if (step.rem_euclid(TAU) - arc.spacing).abs() > 1e-9 {
                return Err(ReplayError::ArcPoint { index, what: "samples are not consecutive".into() });
            }
        }
    }
    Ok(())
}
