//! Exhaustive reference solver.
//!
//! Walks the full Cartesian product of candidate positions and evaluates each
//! assignment by grounding the occupancy, gap and reachability rules directly
//! over tile sets, iterating until nothing changes. It shares no code with the
//! search engine and exists to cross-check it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::SolveError;
use crate::grid::{Assignment, ReachMode, TileCoord, WallProblem};

use super::{canonical_cmp, Score, Solution};

/// Largest candidate product the oracle agrees to enumerate.
pub const ORACLE_BOUND: u128 = 1_000_000;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Axis {
    Horizontal,
    Vertical,
}

pub fn brute_force_oracle(p: &WallProblem) -> Result<Vec<Solution>, SolveError> {
    let candidates: Vec<Vec<TileCoord>> = p.instances.iter().map(|i| p.candidates_of(i)).collect();
    let product = candidates
        .iter()
        .fold(1u128, |acc, c| acc.saturating_mul(c.len() as u128));
    if product > ORACLE_BOUND {
        return Err(SolveError::TooLarge {
            product,
            bound: ORACLE_BOUND,
        });
    }
    if product == 0 {
        return Ok(Vec::new());
    }

    let mut out = Vec::new();
    let mut digits = vec![0usize; candidates.len()];
    loop {
        let positions: Vec<TileCoord> =
            digits.iter().zip(&candidates).map(|(&d, c)| c[d]).collect();
        if let Some(score) = evaluate(p, &positions) {
            let mut assignment = Assignment::new();
            for (inst, at) in p.instances.iter().zip(&positions) {
                assignment.place(&inst.name, *at);
            }
            out.push(Solution {
                assignment,
                score,
                stage_index: 1,
            });
        }
        // odometer, last instance fastest
        let mut k = digits.len();
        loop {
            if k == 0 {
                out.sort_by(|a, b| canonical_cmp(p, a, b));
                return Ok(out);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < candidates[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}

/// Score of a valid wall, or `None` when the placement overlaps or leaks.
fn evaluate(p: &WallProblem, positions: &[TileCoord]) -> Option<Score> {
    let walkable = &p.terrain.walkable;

    // occupiedBy(B,X,Y): footprint tiles that are walkable
    let mut occupied: BTreeMap<TileCoord, usize> = BTreeMap::new();
    for (b, (inst, at)) in p.instances.iter().zip(positions).enumerate() {
        let spec = &p.types[&inst.type_name];
        for y in at.y..at.y + spec.height as i32 {
            for x in at.x..at.x + spec.width as i32 {
                let t = TileCoord::new(x, y);
                if walkable.contains(&t) && occupied.insert(t, b).is_some() {
                    return None;
                }
            }
        }
    }

    // verticalGap / horizontalGap atoms, one per ordered tile pair
    let spec = |b: usize| &p.types[&p.instances[b].type_name];
    let mut gaps: BTreeSet<(Axis, TileCoord, TileCoord, i64)> = BTreeSet::new();
    for (&t1, &b1) in &occupied {
        for (&t2, &b2) in &occupied {
            if b1 == b2 {
                continue;
            }
            let (s1, s2) = (spec(b1), spec(b2));
            if t1.x == t2.x && t1.y == t2.y - 1 {
                gaps.insert((Axis::Vertical, t1, t2, (s1.bottom_gap + s2.top_gap) as i64));
            }
            if t1.x == t2.x && t1.y == t2.y + 1 {
                gaps.insert((Axis::Vertical, t1, t2, (s2.bottom_gap + s1.top_gap) as i64));
            }
            if t1.y == t2.y && t1.x == t2.x - 1 {
                gaps.insert((
                    Axis::Horizontal,
                    t1,
                    t2,
                    (s1.right_gap + s2.left_gap) as i64,
                ));
            }
            if t1.y == t2.y && t1.x == t2.x + 1 {
                gaps.insert((
                    Axis::Horizontal,
                    t1,
                    t2,
                    (s2.right_gap + s1.left_gap) as i64,
                ));
            }
        }
    }

    let mut wide: HashMap<TileCoord, Vec<Axis>> = HashMap::new();
    for &(axis, t1, _, g) in &gaps {
        let need = match axis {
            Axis::Horizontal => p.enemy_width_px,
            Axis::Vertical => p.enemy_height_px,
        } as i64;
        if g >= need {
            wide.entry(t1).or_default().push(axis);
        }
    }
    let has_wide = |t: TileCoord, axis: Axis| wide.get(&t).is_some_and(|v| v.contains(&axis));

    let blocked = |t: &TileCoord| occupied.contains_key(t);
    let open = |t: &TileCoord| walkable.contains(t) && !blocked(t);

    let mut universe: BTreeSet<TileCoord> = walkable.clone();
    universe.insert(p.terrain.outside_base);
    universe.insert(p.terrain.inside_base);

    let mut reach: BTreeSet<TileCoord> = BTreeSet::from([p.terrain.outside_base]);
    loop {
        let mut grew = false;
        for &t in &universe {
            if reach.contains(&t) {
                continue;
            }
            let by_step = open(&t)
                && (-1..=1).any(|dx| {
                    (-1..=1).any(|dy| {
                        let u = TileCoord::new(t.x + dx, t.y + dy);
                        (dx, dy) != (0, 0) && reach.contains(&u) && open(&u)
                    })
                });
            let by_squeeze = (has_wide(t, Axis::Horizontal)
                && (reach.contains(&TileCoord::new(t.x, t.y + 1))
                    || reach.contains(&TileCoord::new(t.x, t.y - 1))))
                || (has_wide(t, Axis::Vertical)
                    && (reach.contains(&TileCoord::new(t.x - 1, t.y))
                        || reach.contains(&TileCoord::new(t.x + 1, t.y))));
            let by_exit = p.reach_mode == ReachMode::Extended
                && open(&t)
                && ([(0, 1), (0, -1)].iter().any(|&(dx, dy)| {
                    let u = TileCoord::new(t.x + dx, t.y + dy);
                    reach.contains(&u) && blocked(&u) && has_wide(u, Axis::Horizontal)
                }) || [(1, 0), (-1, 0)].iter().any(|&(dx, dy)| {
                    let u = TileCoord::new(t.x + dx, t.y + dy);
                    reach.contains(&u) && blocked(&u) && has_wide(u, Axis::Vertical)
                }));
            if by_step || by_squeeze || by_exit {
                reach.insert(t);
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }
    if reach.contains(&p.terrain.inside_base) {
        return None;
    }

    let (mut vertical, mut horizontal) = (0, 0);
    for &(axis, _, _, g) in &gaps {
        match axis {
            Axis::Vertical => vertical += g,
            Axis::Horizontal => horizontal += g,
        }
    }
    Some(Score::new(vertical, horizontal))
}
