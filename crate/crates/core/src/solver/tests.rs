use super::*;
use crate::grid::{BuildingTypeSpec, TerrainWindow, TileCoord};

fn t(x: i32, y: i32) -> TileCoord {
    TileCoord::new(x, y)
}

/// 5x3 open corridor, outside (0,1), inside (4,1).
fn corridor(height: u32) -> WallProblem {
    let mut terrain = TerrainWindow::new(t(4, 1), t(0, 1));
    terrain.add_walkable_rect(t(0, 0), 5, height);
    WallProblem::new(terrain)
}

fn corridor3() -> WallProblem {
    let mut p = corridor(3);
    p.add_type(BuildingTypeSpec::solid("blockType", 1, 3))
        .add_instance("block1", "blockType");
    p.terrain.add_buildable("blockType", t(2, 0));
    p
}

/// Every walkable tile except the anchors; a building on an anchor seals
/// trivially.
fn all_tiles(p: &mut WallProblem, type_name: &str) {
    let anchors = [p.terrain.inside_base, p.terrain.outside_base];
    let tiles: Vec<_> = p.terrain.walkable.iter().copied().collect();
    for tile in tiles.into_iter().filter(|t| !anchors.contains(t)) {
        p.terrain.add_buildable(type_name, tile);
    }
}

#[test]
fn check_valid_corridor_wall() {
    let p = corridor3();
    let v = check_assignment(&p, &Assignment::new().with("block1", t(2, 0))).unwrap();
    assert_eq!(
        v,
        Verdict {
            buildable_ok: true,
            overlap_ok: true,
            tight: true,
            score: Some(Score::new(0, 0))
        }
    );
}

#[test]
fn check_flags_unbuildable_position() {
    let p = corridor3();
    let v = check_assignment(&p, &Assignment::new().with("block1", t(0, 0))).unwrap();
    assert!(!v.buildable_ok);
    assert_eq!(v.score, None);
}

#[test]
fn check_flags_overlap_and_unknowns() {
    let mut p = corridor(3);
    p.add_type(BuildingTypeSpec::solid("unitType", 1, 1))
        .add_instance("a", "unitType")
        .add_instance("b", "unitType");
    all_tiles(&mut p, "unitType");
    let same = Assignment::new().with("a", t(1, 1)).with("b", t(1, 1));
    let v = check_assignment(&p, &same).unwrap();
    assert!(v.buildable_ok && !v.overlap_ok && v.score.is_none());

    let stray = same.clone().with("ghost", t(0, 0));
    assert_eq!(
        check_assignment(&p, &stray),
        Err(SolveError::UnknownInstance("ghost".into()))
    );
    let partial = Assignment::new().with("a", t(1, 1));
    assert_eq!(
        check_assignment(&p, &partial),
        Err(SolveError::Unplaced("b".into()))
    );
}

#[test]
fn corridor3_has_exactly_one_wall() {
    let p = corridor3();
    let all = enumerate_valid(&p, None);
    assert_eq!(all.len(), 1);
    assert_eq!(all[0].assignment, Assignment::new().with("block1", t(2, 0)));
    assert_eq!(all, brute_force_oracle(&p).unwrap());
    let best = solve_optimal(&p).unwrap();
    assert_eq!(best.score, Score::new(0, 0));
    assert_eq!(best.stage_index, 1);
}

#[test]
fn two_units_cannot_seal_three_rows() {
    let mut p = corridor(3);
    p.add_type(BuildingTypeSpec::solid("unitType", 1, 1))
        .add_instance("a", "unitType")
        .add_instance("b", "unitType");
    all_tiles(&mut p, "unitType");
    assert!(brute_force_oracle(&p).unwrap().is_empty());
    assert!(enumerate_valid(&p, None).is_empty());
    assert_eq!(solve_optimal(&p), None);
}

#[test]
fn covering_the_outside_anchor_seals() {
    let mut p = corridor(3);
    p.add_type(BuildingTypeSpec::solid("unitType", 1, 1))
        .add_instance("a", "unitType");
    p.terrain.add_buildable("unitType", t(0, 1));
    let v = check_assignment(&p, &Assignment::new().with("a", t(0, 1))).unwrap();
    assert!(v.is_valid());
    assert_eq!(enumerate_valid(&p, None), brute_force_oracle(&p).unwrap());
}

#[test]
fn instance_without_candidates_gives_nothing() {
    let mut p = corridor3();
    p.add_type(BuildingTypeSpec::solid("spareType", 1, 1))
        .add_instance("spare", "spareType");
    assert!(enumerate_valid(&p, None).is_empty());
    assert!(brute_force_oracle(&p).unwrap().is_empty());
}

/// A 1x2 `tall` piece and a 1x1 `unit` must stack to fill a column; which
/// one goes on top decides the seam width.
fn stacking_problem() -> WallProblem {
    let mut p = corridor(3);
    p.add_type(BuildingTypeSpec::with_gaps("tallType", 1, 2, [0, 0, 3, 5]))
        .add_type(BuildingTypeSpec::with_gaps("unitType", 1, 1, [0, 0, 1, 2]))
        .add_instance("tall", "tallType")
        .add_instance("unit", "unitType");
    for x in 1..=3 {
        for y in 0..=2 {
            p.terrain.add_buildable("unitType", t(x, y));
            if y <= 1 {
                p.terrain.add_buildable("tallType", t(x, y));
            }
        }
    }
    p
}

#[test]
fn cheaper_stacking_order_wins() {
    let p = stacking_problem();
    let oracle = brute_force_oracle(&p).unwrap();
    // three columns x two stacking orders
    assert_eq!(oracle.len(), 6);
    let min = oracle.iter().map(|s| s.score.combined_px).min().unwrap();
    // unit above tall: unit.bottom 2 + tall.top 3, counted in both directions
    assert_eq!(min, 10);

    let best = solve_optimal(&p).unwrap();
    assert_eq!(best.score, Score::new(10, 0));
    assert_eq!(
        best.assignment,
        Assignment::new()
            .with("tall", t(1, 1))
            .with("unit", t(1, 0))
    );
    assert_eq!(enumerate_valid(&p, None), oracle);
    assert_eq!(enumerate_valid(&p, Some(2)), oracle[..2].to_vec());
}

#[test]
fn first_solution_is_valid_and_stable() {
    let p = stacking_problem();
    let a = solve_first(&p).unwrap();
    assert!(check_assignment(&p, &a.assignment).unwrap().is_valid());
    assert_eq!(solve_first(&p), Some(a));
}

#[test]
fn every_option_combination_agrees() {
    let p = stacking_problem();
    let reference = enumerate_valid_with(&p, None, SearchOptions::exhaustive());
    let best = solve_optimal_with(&p, SearchOptions::exhaustive());
    for bits in 0..32u32 {
        let opts = SearchOptions {
            path_branching: bits & 1 != 0,
            early_overlap: bits & 2 != 0,
            order_by_candidates: bits & 4 != 0,
            bound: bits & 8 != 0,
            parallel: bits & 16 != 0,
        };
        assert_eq!(enumerate_valid_with(&p, None, opts), reference, "{opts:?}");
        assert_eq!(solve_optimal_with(&p, opts), best, "{opts:?}");
    }
}

fn two_row_stages() -> WallProblem {
    let mut p = corridor(2);
    p.terrain.inside_base = t(4, 0);
    p.terrain.outside_base = t(0, 0);
    p.add_type(BuildingTypeSpec::solid("unitType", 1, 1))
        .add_instance("blockA", "unitType")
        .add_instance("blockB", "unitType");
    all_tiles(&mut p, "unitType");
    p.stages = Some(
        [
            (1, ["blockA"].map(String::from).into()),
            (2, ["blockA", "blockB"].map(String::from).into()),
        ]
        .into(),
    );
    p
}

#[test]
fn incremental_adds_buildings_until_wall_exists() {
    let p = two_row_stages();
    assert!(brute_force_oracle(&p.restricted(["blockA"]))
        .unwrap()
        .is_empty());
    let s = solve_incremental(&p).unwrap().unwrap();
    assert_eq!(s.stage_index, 2);
    assert!(check_assignment(&p, &s.assignment).unwrap().is_valid());
}

#[test]
fn incremental_without_stages_is_single_stage() {
    let p = corridor3();
    let s = solve_incremental(&p).unwrap().unwrap();
    assert_eq!(s.stage_index, 1);
    assert_eq!(Some(s), solve_optimal(&p));
}

#[test]
fn incremental_reports_all_stages_failing() {
    let mut p = two_row_stages();
    p.terrain.add_walkable_rect(t(0, 2), 5, 1);
    assert_eq!(solve_incremental(&p), Ok(None));
}

#[test]
fn malformed_stages() {
    let base = two_row_stages();
    let set = |names: &[&str]| names.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let cases = [
        vec![
            (1, set(&["blockA", "ghost"])),
            (2, set(&["blockA", "blockB"])),
        ],
        vec![(1, set(&["blockB"])), (2, set(&["blockA"]))],
        vec![(1, set(&["blockA"])), (3, set(&["blockA", "blockB"]))],
        vec![(1, set(&["blockA"]))],
    ];
    for stages in cases {
        let mut p = base.clone();
        p.stages = Some(stages.into_iter().collect());
        assert!(
            matches!(solve_incremental(&p), Err(SolveError::Stage(_))),
            "{:?}",
            p.stages
        );
    }
}

#[test]
fn oracle_refuses_huge_products() {
    let mut p = corridor(3);
    let mut terrain = TerrainWindow::new(t(0, 0), t(1, 0));
    terrain.add_walkable_rect(t(0, 0), 40, 40);
    p.terrain = terrain;
    p.add_type(BuildingTypeSpec::solid("unitType", 1, 1));
    all_tiles(&mut p, "unitType");
    for name in ["a", "b"] {
        p.add_instance(name, "unitType");
    }
    // 1598 candidates each (anchors excluded)
    assert_eq!(
        brute_force_oracle(&p),
        Err(SolveError::TooLarge {
            product: 1598 * 1598,
            bound: ORACLE_BOUND
        })
    );
}
