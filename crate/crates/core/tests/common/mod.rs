//! Shared test support: a seeded corpus of small random problems and a naive
//! rule-by-rule evaluator written against the coordinate model only.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wallin::{Assignment, BuildingTypeSpec, ReachMode, TerrainWindow, TileCoord, WallProblem};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture present")
}

/// A window of at most 12x12 tiles split by a wall column with a short
/// opening, 2-3 buildings with gaps in [-8, 24] and at most 15 candidate
/// origins per building around the opening. Anchors are never covered.
pub fn random_problem(seed: u64, mode: ReachMode) -> WallProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (rng.gen_range(5..=12), rng.gen_range(3..=12));
    let mid = rng.gen_range(2..w - 2);
    let open_len = rng.gen_range(1..=3.min(h));
    let open_lo = rng.gen_range(0..=h - open_len);
    let outside = TileCoord::new(0, rng.gen_range(0..h));
    let inside = TileCoord::new(w - 1, rng.gen_range(0..h));

    let mut terrain = TerrainWindow::new(inside, outside);
    for y in 0..h {
        for x in 0..w {
            let t = TileCoord::new(x, y);
            let in_wall = x == mid && !(open_lo..open_lo + open_len).contains(&y);
            let hole = rng.gen_bool(0.08) && t != inside && t != outside;
            if !in_wall && !hole {
                terrain.walkable.insert(t);
            }
        }
    }
    let mut p = WallProblem::new(terrain);
    p.reach_mode = mode;
    if rng.gen_bool(0.25) {
        p.enemy_width_px = rng.gen_range(8..=24);
        p.enemy_height_px = rng.gen_range(8..=24);
    }

    let count = rng.gen_range(2..=3);
    for k in 0..count {
        let type_name = if k > 0 && rng.gen_bool(0.3) {
            p.instances[0].type_name.clone()
        } else {
            let name = format!("t{k}Type");
            let gaps = [(); 4].map(|_| rng.gen_range(-8..=24));
            let spec = BuildingTypeSpec::with_gaps(
                &name,
                rng.gen_range(1..=3),
                rng.gen_range(1..=3),
                gaps,
            );
            let mut origins: Vec<TileCoord> = ((mid - 2).max(0)..=mid + 1)
                .flat_map(|x| (0..h).map(move |y| TileCoord::new(x, y)))
                .filter(|o| {
                    let fp = wallin::footprint(&spec, *o);
                    !fp.contains(&inside) && !fp.contains(&outside)
                })
                .collect();
            origins.shuffle(&mut rng);
            origins.truncate(15);
            for o in origins {
                p.terrain.add_buildable(&name, o);
            }
            p.add_type(spec);
            name
        };
        p.add_instance(&format!("b{k}"), &type_name);
    }
    p
}

/// `n` seeds, each in both reach modes.
pub fn corpus(n: u64) -> Vec<WallProblem> {
    (0..n)
        .flat_map(|seed| [ReachMode::Literal, ReachMode::Extended].map(|m| random_problem(seed, m)))
        .collect()
}

/// Every total assignment over the candidate positions.
pub fn all_assignments(p: &WallProblem) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for inst in &p.instances {
        let cands: Vec<TileCoord> = p
            .terrain
            .buildable
            .get(&inst.type_name)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        out = out
            .into_iter()
            .flat_map(|a| {
                cands
                    .iter()
                    .map(move |&c| a.clone().with(&inst.name, c))
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Walkable tile to the instance covering it, or `None` when two overlap.
pub fn naive_occupied(p: &WallProblem, a: &Assignment) -> Option<BTreeMap<TileCoord, String>> {
    let mut occ = BTreeMap::new();
    for inst in &p.instances {
        let spec = &p.types[&inst.type_name];
        let at = a.get(&inst.name)?;
        for dy in 0..spec.height as i32 {
            for dx in 0..spec.width as i32 {
                let t = TileCoord::new(at.x + dx, at.y + dy);
                if p.terrain.walkable.contains(&t) && occ.insert(t, inst.name.clone()).is_some() {
                    return None;
                }
            }
        }
    }
    Some(occ)
}

/// Gap atoms `(vertical?, from, width)`, one per ordered pair of adjacent
/// tiles of different buildings.
pub fn naive_gaps(
    p: &WallProblem,
    occ: &BTreeMap<TileCoord, String>,
) -> Vec<(bool, TileCoord, i64)> {
    let spec = |name: &str| &p.types[&p.instance(name).unwrap().type_name];
    let mut out = Vec::new();
    for (t1, b1) in occ {
        for (t2, b2) in occ {
            if b1 == b2 {
                continue;
            }
            let (s1, s2) = (spec(b1), spec(b2));
            let w = if t1.x == t2.x && t1.y + 1 == t2.y {
                Some((true, s1.bottom_gap + s2.top_gap))
            } else if t1.x == t2.x && t1.y == t2.y + 1 {
                Some((true, s2.bottom_gap + s1.top_gap))
            } else if t1.y == t2.y && t1.x + 1 == t2.x {
                Some((false, s1.right_gap + s2.left_gap))
            } else if t1.y == t2.y && t1.x == t2.x + 1 {
                Some((false, s2.right_gap + s1.left_gap))
            } else {
                None
            };
            if let Some((vertical, g)) = w {
                out.push((vertical, *t1, g as i64));
            }
        }
    }
    out
}

pub fn naive_totals(p: &WallProblem, a: &Assignment) -> Option<(i64, i64)> {
    let occ = naive_occupied(p, a)?;
    let gaps = naive_gaps(p, &occ);
    let sum = |v: bool| gaps.iter().filter(|g| g.0 == v).map(|g| g.2).sum();
    Some((sum(true), sum(false)))
}

/// Applies every rule to every tile until nothing changes. With
/// `gap_rules` off only the seed and the eight step rules remain.
pub fn naive_reach(p: &WallProblem, a: &Assignment, gap_rules: bool) -> BTreeSet<TileCoord> {
    let occ = naive_occupied(p, a).expect("no overlap");
    let gaps = naive_gaps(p, &occ);
    let walk = &p.terrain.walkable;
    let open = |t: &TileCoord| walk.contains(t) && !occ.contains_key(t);
    let wide = |t: TileCoord, vertical: bool| {
        let need = if vertical {
            p.enemy_height_px
        } else {
            p.enemy_width_px
        } as i64;
        gaps.iter()
            .any(|g| g.0 == vertical && g.1 == t && g.2 >= need)
    };
    let at = |t: TileCoord, dx: i32, dy: i32| TileCoord::new(t.x + dx, t.y + dy);

    let mut tiles: Vec<TileCoord> = walk.iter().copied().collect();
    tiles.push(p.terrain.outside_base);
    let mut reach = BTreeSet::from([p.terrain.outside_base]);
    loop {
        let before = reach.len();
        for &t in &tiles {
            if reach.contains(&t) {
                continue;
            }
            let mut hit = false;
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let u = at(t, dx, dy);
                    if (dx, dy) != (0, 0) && reach.contains(&u) && open(&u) && open(&t) {
                        hit = true;
                    }
                }
            }
            if gap_rules {
                if wide(t, false) && (reach.contains(&at(t, 0, 1)) || reach.contains(&at(t, 0, -1)))
                {
                    hit = true;
                }
                if wide(t, true) && (reach.contains(&at(t, 1, 0)) || reach.contains(&at(t, -1, 0)))
                {
                    hit = true;
                }
                if p.reach_mode == ReachMode::Extended && open(&t) {
                    for (dx, dy, vertical) in
                        [(0, 1, false), (0, -1, false), (1, 0, true), (-1, 0, true)]
                    {
                        let u = at(t, dx, dy);
                        if reach.contains(&u) && wide(u, vertical) {
                            hit = true;
                        }
                    }
                }
            }
            if hit {
                reach.insert(t);
            }
        }
        if reach.len() == before {
            return reach;
        }
    }
}

pub fn naive_tight(p: &WallProblem, a: &Assignment, gap_rules: bool) -> bool {
    !naive_reach(p, a, gap_rules).contains(&p.terrain.inside_base)
}
