//! Placement search: constraint checking, enumeration of valid walls,
//! optimisation by total seam width, and the staged strategy that adds
//! buildings until a wall exists.

mod oracle;
mod search;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::SolveError;
use crate::grid::{Assignment, WallProblem};
use crate::occupancy::{gap_seams, gap_totals, occupied_map};
use crate::reach::is_tight;

pub use oracle::{brute_force_oracle, ORACLE_BOUND};

/// Seam-width totals of a wall; lower is better.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Score {
    pub vertical_px: i64,
    pub horizontal_px: i64,
    pub combined_px: i64,
}

impl Score {
    pub fn new(vertical_px: i64, horizontal_px: i64) -> Self {
        Self {
            vertical_px,
            horizontal_px,
            combined_px: vertical_px + horizontal_px,
        }
    }

    /// Ranking key: combined first, then vertical, then horizontal.
    pub fn rank(&self) -> (i64, i64, i64) {
        (self.combined_px, self.vertical_px, self.horizontal_px)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub assignment: Assignment,
    pub score: Score,
    /// 1-based stage that produced the wall; 1 without stages.
    pub stage_index: usize,
}

/// Outcome of checking one assignment against the three wall constraints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub buildable_ok: bool,
    pub overlap_ok: bool,
    pub tight: bool,
    /// Present only when all three checks pass.
    pub score: Option<Score>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.score.is_some()
    }
}

/// Knobs for the search. Every combination returns the same solutions;
/// they only change how much of the space is visited.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    /// Branch on which remaining building blocks an open outside-to-inside path.
    pub path_branching: bool,
    /// Reject overlapping placements as soon as they are made.
    pub early_overlap: bool,
    /// Place buildings with fewer candidate positions first.
    pub order_by_candidates: bool,
    /// Branch-and-bound on seam width when optimising.
    pub bound: bool,
    /// Search the top-level branches on the rayon pool.
    pub parallel: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            path_branching: true,
            early_overlap: true,
            order_by_candidates: true,
            bound: true,
            parallel: true,
        }
    }
}

impl SearchOptions {
    /// Plain generate-and-test: no pruning beyond the constraints themselves.
    pub fn exhaustive() -> Self {
        Self {
            path_branching: false,
            early_overlap: false,
            order_by_candidates: false,
            bound: false,
            parallel: false,
        }
    }
}

/// Orders solutions by instance positions in declaration order, each `(y, x)`.
pub fn canonical_cmp(p: &WallProblem, a: &Solution, b: &Solution) -> Ordering {
    a.assignment
        .canonical_key(p)
        .cmp(&b.assignment.canonical_key(p))
}

/// Total order used to pick the best wall.
pub fn ranking_cmp(p: &WallProblem, a: &Solution, b: &Solution) -> Ordering {
    a.score
        .rank()
        .cmp(&b.score.rank())
        .then_with(|| canonical_cmp(p, a, b))
}

pub fn check_assignment(p: &WallProblem, assign: &Assignment) -> Result<Verdict, SolveError> {
    if let Some(name) = assign.placements.keys().find(|n| p.instance(n).is_none()) {
        return Err(SolveError::UnknownInstance(name.clone()));
    }
    if let Some(inst) = p.instances.iter().find(|i| assign.get(&i.name).is_none()) {
        return Err(SolveError::Unplaced(inst.name.clone()));
    }

    let buildable_ok = p.instances.iter().all(|i| {
        let at = assign.get(&i.name).expect("checked total");
        p.terrain
            .buildable
            .get(&i.type_name)
            .is_some_and(|s| s.contains(&at))
    });
    let (overlap_ok, tight, totals) = match occupied_map(assign, p) {
        Err(_) => (false, false, None),
        Ok(occ) => {
            let tight = is_tight(p, assign).expect("overlap already ruled out");
            (true, tight, Some(gap_totals(&gap_seams(&occ, p))))
        }
    };
    let score = match totals {
        Some((v, h)) if buildable_ok && tight => Some(Score::new(v, h)),
        _ => None,
    };
    Ok(Verdict {
        buildable_ok,
        overlap_ok,
        tight,
        score,
    })
}

/// All valid walls in canonical order, cut to `limit` when given.
pub fn enumerate_valid(p: &WallProblem, limit: Option<usize>) -> Vec<Solution> {
    enumerate_valid_with(p, limit, SearchOptions::default())
}

pub fn enumerate_valid_with(
    p: &WallProblem,
    limit: Option<usize>,
    opts: SearchOptions,
) -> Vec<Solution> {
    let mut all = search::enumerate(p, opts);
    all.sort_by(|a, b| canonical_cmp(p, a, b));
    if let Some(n) = limit {
        all.truncate(n);
    }
    all
}

/// The best valid wall under [`ranking_cmp`], if any exists.
pub fn solve_optimal(p: &WallProblem) -> Option<Solution> {
    solve_optimal_with(p, SearchOptions::default())
}

pub fn solve_optimal_with(p: &WallProblem, opts: SearchOptions) -> Option<Solution> {
    search::optimize(p, opts)
}

/// The first valid wall met by the (sequential, deterministic) search,
/// without optimising.
pub fn solve_first(p: &WallProblem) -> Option<Solution> {
    search::first(p, SearchOptions::default())
}

/// Checks that stages are numbered 1..=n, name known instances, are nested,
/// and that the last one holds every instance. Returns them in order.
pub fn checked_stages(p: &WallProblem) -> Result<Vec<Vec<String>>, SolveError> {
    let Some(stages) = &p.stages else {
        return Ok(vec![p.instances.iter().map(|i| i.name.clone()).collect()]);
    };
    let mut out = Vec::with_capacity(stages.len());
    let mut prev: Option<&BTreeSet<String>> = None;
    for (expected, (&k, members)) in (1u32..).zip(stages) {
        if k != expected {
            return Err(SolveError::Stage(format!("stage {expected} is missing")));
        }
        if let Some(name) = members.iter().find(|n| p.instance(n).is_none()) {
            return Err(SolveError::Stage(format!(
                "stage {k} names unknown instance `{name}`"
            )));
        }
        if let Some(prev) = prev {
            if !prev.is_subset(members) {
                return Err(SolveError::Stage(format!(
                    "stage {k} does not contain stage {}",
                    k - 1
                )));
            }
        }
        // keep declaration order inside a stage
        out.push(
            p.instances
                .iter()
                .filter(|i| members.contains(&i.name))
                .map(|i| i.name.clone())
                .collect(),
        );
        prev = Some(members);
    }
    if prev.map_or(0, |s| s.len()) != p.instances.len() {
        return Err(SolveError::Stage(
            "the last stage must contain every building".into(),
        ));
    }
    Ok(out)
}

/// Tries the stages in order and returns the first one that can wall in.
pub fn solve_incremental(p: &WallProblem) -> Result<Option<Solution>, SolveError> {
    solve_incremental_with(p, true, SearchOptions::default())
}

pub fn solve_incremental_with(
    p: &WallProblem,
    optimize: bool,
    opts: SearchOptions,
) -> Result<Option<Solution>, SolveError> {
    for (k, names) in checked_stages(p)?.iter().enumerate() {
        let stage = p.restricted(names.iter().map(String::as_str));
        let found = if optimize {
            search::optimize(&stage, opts)
        } else {
            search::first(&stage, opts)
        };
        if let Some(mut s) = found {
            s.stage_index = k + 1;
            return Ok(Some(s));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests;
