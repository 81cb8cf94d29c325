//! Following roots of a one-parameter family of polynomials across a θ grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::roots::{circle_classify, CircleClass, RootSet, DEFAULT_CIRCLE_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOptions {
    /// Largest accepted displacement of a root between neighbouring samples.
    pub max_step: f64,
    /// Circle-membership tolerance used to classify every fiber.
    pub tol: f64,
    /// The grid samples a full circle, so the last fiber neighbours the first.
    pub periodic: bool,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions { max_step: 0.5, tol: DEFAULT_CIRCLE_TOL, periodic: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    /// Index into [`BranchWitness::thetas`].
    pub index: usize,
    pub theta: f64,
    pub value: Complex64,
}

/// Roots matched across consecutive retained fibers. A branch holds at most
/// one point per fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
}

impl Branch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchWitness {
    pub thetas: Vec<f64>,
    pub fibers: Vec<CircleClass>,
    /// False for fibers dropped as ramified (fewer distinct roots than generic).
    pub retained: Vec<bool>,
    pub branches: Vec<Branch>,
    /// Number of distinct roots in a generic fiber.
    pub generic_count: usize,
    /// Dimension of the base being sampled.
    pub d: usize,
}

impl BranchWitness {
    pub fn dropped(&self) -> impl Iterator<Item = f64> + '_ {
        self.thetas.iter().zip(&self.retained).filter(|(_, &r)| !r).map(|(&t, _)| t)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("no fibers given")]
    Empty,
    #[error("every sampled fiber is ramified; the projection looks degenerate")]
    AllRamified,
}

pub fn track_branches(fibers: &[(f64, RootSet)]) -> Result<BranchWitness, TrackError> {
    track_branches_with(fibers, TrackOptions::default())
}

/// Greedy nearest-neighbour continuation.
///
/// Fibers whose distinct root count is below the maximum seen, or which contain
/// a multiple root, are dropped and break every branch. Between two retained
/// neighbours, candidate pairs are taken in order of increasing distance and
/// accepted when the step is below `max_step` and below half the distance from
/// the previous root to any other root of the new fiber. Unmatched roots start
/// new branches.
pub fn track_branches_with(fibers: &[(f64, RootSet)], opts: TrackOptions) -> Result<BranchWitness, TrackError> {
    if fibers.is_empty() {
        return Err(TrackError::Empty);
    }
    let generic_count = fibers.iter().map(|(_, rs)| rs.distinct()).max().unwrap_or(0);
    let retained: Vec<bool> = fibers
        .iter()
        .map(|(_, rs)| {
            generic_count > 0 && rs.distinct() == generic_count && rs.roots.iter().all(|r| r.multiplicity == 1)
        })
        .collect();
    if !retained.iter().any(|&r| r) {
        return Err(TrackError::AllRamified);
    }
    let thetas: Vec<f64> = fibers.iter().map(|(t, _)| *t).collect();
    let classes: Vec<CircleClass> = fibers.iter().map(|(_, rs)| circle_classify(rs, opts.tol)).collect();

    let mut branches: Vec<Branch> = Vec::new();
    // open[j] = branch currently ending at root j of the previous retained fiber
    let mut open: Vec<Option<usize>> = Vec::new();
    let mut prev: Option<usize> = None;
    for (k, (theta, rs)) in fibers.iter().enumerate() {
        if !retained[k] {
            prev = None;
            continue;
        }
        let values: Vec<Complex64> = rs.roots.iter().map(|r| r.value).collect();
        let assignment = match prev {
            Some(p) if p + 1 == k => {
                let old: Vec<Complex64> = fibers[p].1.roots.iter().map(|r| r.value).collect();
                match_roots(&old, &values, opts.max_step)
            }
            _ => vec![None; values.len()],
        };
        let mut next_open = vec![None; values.len()];
        for (j, &v) in values.iter().enumerate() {
            let point = BranchPoint { index: k, theta: *theta, value: v };
            let b = match assignment[j].and_then(|i| open[i]) {
                Some(b) => {
                    branches[b].points.push(point);
                    b
                }
                None => {
                    branches.push(Branch { points: vec![point] });
                    branches.len() - 1
                }
            };
            next_open[j] = Some(b);
        }
        open = next_open;
        prev = Some(k);
    }

    if opts.periodic && fibers.len() > 1 {
        branches = join_across_seam(branches, fibers, &retained, opts.max_step);
    }

    Ok(BranchWitness { thetas, fibers: classes, retained, branches, generic_count, d: 1 })
}

/// `result[j] = Some(i)` when new root `j` continues old root `i`.
fn match_roots(old: &[Complex64], new: &[Complex64], max_step: f64) -> Vec<Option<usize>> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(old.len() * new.len());
    for (i, a) in old.iter().enumerate() {
        for (j, b) in new.iter().enumerate() {
            pairs.push(((a - b).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_old = vec![false; old.len()];
    let mut result = vec![None; new.len()];
    for &(d, i, j) in &pairs {
        if used_old[i] || result[j].is_some() || d >= max_step {
            continue;
        }
        let rival = new
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != j)
            .map(|(_, b)| (old[i] - b).norm())
            .fold(f64::INFINITY, f64::min);
        if d < 0.5 * rival {
            used_old[i] = true;
            result[j] = Some(i);
        }
    }
    result
}

/// Appends a branch that starts at the first fiber to one that ends at the
/// last fiber, when the roots match across the seam and the θ ranges are disjoint.
fn join_across_seam(
    mut branches: Vec<Branch>,
    fibers: &[(f64, RootSet)],
    retained: &[bool],
    max_step: f64,
) -> Vec<Branch> {
    let last = fibers.len() - 1;
    if !retained[0] || !retained[last] {
        return branches;
    }
    let end_vals: Vec<Complex64> = fibers[last].1.roots.iter().map(|r| r.value).collect();
    let start_vals: Vec<Complex64> = fibers[0].1.roots.iter().map(|r| r.value).collect();
    let assignment = match_roots(&end_vals, &start_vals, max_step);
    let find = |branches: &[Branch], idx: usize, v: Complex64, at_end: bool| {
        branches.iter().position(|b| {
            let p = if at_end { b.points.last() } else { b.points.first() };
            p.is_some_and(|p| p.index == idx && p.value == v)
        })
    };
    let mut joins = Vec::new();
    for (j, m) in assignment.iter().enumerate() {
        let Some(i) = *m else { continue };
        let (Some(a), Some(b)) = (
            find(&branches, last, end_vals[i], true),
            find(&branches, 0, start_vals[j], false),
        ) else {
            continue;
        };
        if a != b && branches[a].points[0].index > branches[b].points.last().unwrap().index {
            joins.push((a, b));
        }
    }
    let mut removed = vec![false; branches.len()];
    for (a, b) in joins {
        let tail = std::mem::take(&mut branches[b].points);
        branches[a].points.extend(tail);
        removed[b] = true;
    }
    branches.into_iter().zip(removed).filter(|(_, r)| !r).map(|(b, _)| b).collect()
}
