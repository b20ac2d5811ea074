//! Tile coordinates, building specifications and the problem model.
//!
//! Coordinates are build-tile units with `y` growing southward, so the
//! `top_gap` of a building faces the smaller-`y` side.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Position of a build tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TileCoord {
    pub x: i32,
    pub y: i32,
}

impl TileCoord {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub const fn offset(self, dx: i32, dy: i32) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
        }
    }

    /// Sort key for the canonical `(y, x)` ordering.
    pub const fn row_major(self) -> (i32, i32) {
        (self.y, self.x)
    }
}

impl fmt::Display for TileCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// Tile size and the four pixel gaps a building leaves around its footprint.
///
/// Gaps are signed: a negative gap means the building blocks pixels outside
/// its own tiles.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BuildingTypeSpec {
    pub name: String,
    pub width: u32,
    pub height: u32,
    pub left_gap: i32,
    pub right_gap: i32,
    pub top_gap: i32,
    pub bottom_gap: i32,
}

impl BuildingTypeSpec {
    /// A type with all four gaps set to zero, e.g. a unit standing in the wall.
    pub fn solid(name: impl Into<String>, width: u32, height: u32) -> Self {
        Self::with_gaps(name, width, height, [0; 4])
    }

    /// `gaps` is `[left, right, top, bottom]`.
    pub fn with_gaps(name: impl Into<String>, width: u32, height: u32, gaps: [i32; 4]) -> Self {
        Self {
            name: name.into(),
            width,
            height,
            left_gap: gaps[0],
            right_gap: gaps[1],
            top_gap: gaps[2],
            bottom_gap: gaps[3],
        }
    }

    pub fn area(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BuildingInstance {
    pub name: String,
    pub type_name: String,
}

impl BuildingInstance {
    pub fn new(name: impl Into<String>, type_name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            type_name: type_name.into(),
        }
    }
}

/// The terrain around a chokepoint as seen by the placement search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TerrainWindow {
    pub walkable: BTreeSet<TileCoord>,
    /// Type name to the top-left positions where that type may be built.
    pub buildable: BTreeMap<String, BTreeSet<TileCoord>>,
    pub inside_base: TileCoord,
    pub outside_base: TileCoord,
}

impl TerrainWindow {
    pub fn new(inside_base: TileCoord, outside_base: TileCoord) -> Self {
        Self {
            walkable: BTreeSet::new(),
            buildable: BTreeMap::new(),
            inside_base,
            outside_base,
        }
    }

    pub fn is_walkable(&self, t: TileCoord) -> bool {
        self.walkable.contains(&t)
    }

    /// Buildable positions of a type; empty when the type has none.
    pub fn candidates(&self, type_name: &str) -> impl Iterator<Item = TileCoord> + '_ {
        self.buildable.get(type_name).into_iter().flatten().copied()
    }

    /// Marks every tile of the `width` x `height` rectangle at `origin` walkable.
    pub fn add_walkable_rect(&mut self, origin: TileCoord, width: u32, height: u32) {
        for dy in 0..height as i32 {
            for dx in 0..width as i32 {
                self.walkable.insert(origin.offset(dx, dy));
            }
        }
    }

    pub fn add_buildable(&mut self, type_name: &str, at: TileCoord) {
        self.buildable
            .entry(type_name.to_string())
            .or_default()
            .insert(at);
    }
}

/// Which reachability rule set decides tightness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ReachMode {
    /// Only the seed, adjacency and gap rules. Gap rules lead into occupied
    /// tiles but never back out.
    Literal,
    /// Literal rules plus exit rules that let a squeeze corridor reopen into
    /// free terrain.
    #[default]
    Extended,
}

impl std::str::FromStr for ReachMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(Self::Literal),
            "extended" => Ok(Self::Extended),
            other => Err(format!(
                "unknown reach mode `{other}` (expected literal|extended)"
            )),
        }
    }
}

pub const DEFAULT_ENEMY_PX: u32 = 16;

/// Everything the search needs: building catalogue, instances, terrain and
/// the size of the unit that must be kept out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallProblem {
    pub types: BTreeMap<String, BuildingTypeSpec>,
    /// Instances in declaration order.
    pub instances: Vec<BuildingInstance>,
    pub terrain: TerrainWindow,
    pub enemy_width_px: u32,
    pub enemy_height_px: u32,
    /// Stage number (1-based) to the instance names tried in that stage.
    pub stages: Option<BTreeMap<u32, BTreeSet<String>>>,
    pub reach_mode: ReachMode,
}

impl WallProblem {
    pub fn new(terrain: TerrainWindow) -> Self {
        Self {
            types: BTreeMap::new(),
            instances: Vec::new(),
            terrain,
            enemy_width_px: DEFAULT_ENEMY_PX,
            enemy_height_px: DEFAULT_ENEMY_PX,
            stages: None,
            reach_mode: ReachMode::default(),
        }
    }

    pub fn add_type(&mut self, spec: BuildingTypeSpec) -> &mut Self {
        self.types.insert(spec.name.clone(), spec);
        self
    }

    pub fn add_instance(&mut self, name: &str, type_name: &str) -> &mut Self {
        self.instances.push(BuildingInstance::new(name, type_name));
        self
    }

    pub fn instance(&self, name: &str) -> Option<&BuildingInstance> {
        self.instances.iter().find(|i| i.name == name)
    }

    pub fn instance_index(&self, name: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.name == name)
    }

    /// Spec of an instance's type.
    ///
    /// Panics if the instance refers to an undeclared type; parsed problems
    /// never do.
    pub fn spec_of(&self, inst: &BuildingInstance) -> &BuildingTypeSpec {
        &self.types[&inst.type_name]
    }

    /// Candidate positions of an instance in `(y, x)` order.
    pub fn candidates_of(&self, inst: &BuildingInstance) -> Vec<TileCoord> {
        let mut c: Vec<_> = self.terrain.candidates(&inst.type_name).collect();
        c.sort_by_key(|t| t.row_major());
        c
    }

    /// Copy of the problem keeping only the named instances (declaration
    /// order preserved). Stages are dropped.
    pub fn restricted<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> WallProblem {
        let keep: BTreeSet<&str> = names.into_iter().collect();
        WallProblem {
            instances: self
                .instances
                .iter()
                .filter(|i| keep.contains(i.name.as_str()))
                .cloned()
                .collect(),
            stages: None,
            ..self.clone()
        }
    }

    /// Copy with instances sorted by name, the order the program emitter uses.
    pub fn canonical(&self) -> WallProblem {
        let mut p = self.clone();
        p.instances.sort_by(|a, b| a.name.cmp(&b.name));
        p
    }
}

/// A placement of (some of) the problem's instances.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub placements: BTreeMap<String, TileCoord>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, at: TileCoord) -> Self {
        self.place(name, at);
        self
    }

    pub fn place(&mut self, name: &str, at: TileCoord) {
        self.placements.insert(name.to_string(), at);
    }

    pub fn get(&self, name: &str) -> Option<TileCoord> {
        self.placements.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    /// True when every instance of `p` is placed.
    pub fn is_total(&self, p: &WallProblem) -> bool {
        p.instances
            .iter()
            .all(|i| self.placements.contains_key(&i.name))
    }

    /// Positions in the problem's declaration order, `(y, x)` keyed; the
    /// canonical sort key for solutions.
    pub fn canonical_key(&self, p: &WallProblem) -> Vec<(i32, i32)> {
        p.instances
            .iter()
            .map(|i| {
                self.get(&i.name)
                    .map(TileCoord::row_major)
                    .unwrap_or((i32::MIN, i32::MIN))
            })
            .collect()
    }
}

/// Tiles covered by a building of type `spec` whose top-left tile is `origin`.
pub fn footprint(spec: &BuildingTypeSpec, origin: TileCoord) -> BTreeSet<TileCoord> {
    footprint_iter(spec, origin).collect()
}

pub(crate) fn footprint_iter(
    spec: &BuildingTypeSpec,
    origin: TileCoord,
) -> impl Iterator<Item = TileCoord> {
    let (w, h) = (spec.width as i32, spec.height as i32);
    (0..h).flat_map(move |dy| (0..w).map(move |dx| origin.offset(dx, dy)))
}

/// Non-fatal findings about a problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnostic {
    /// Some footprint tiles of a buildable position are not walkable.
    FootprintOutsideWindow {
        type_name: String,
        origin: TileCoord,
        missing: usize,
    },
    AnchorNotWalkable {
        anchor: &'static str,
        at: TileCoord,
    },
    AnchorIsolated {
        anchor: &'static str,
        at: TileCoord,
    },
    AnchorsCoincide {
        at: TileCoord,
    },
    /// A buildable position whose footprint covers an anchor tile.
    CoversAnchor {
        type_name: String,
        origin: TileCoord,
        anchor: &'static str,
    },
    /// The instance has no buildable position, so no wall can exist.
    InfeasibleInstance {
        instance: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::FootprintOutsideWindow {
                type_name,
                origin,
                missing,
            } => write!(
                f,
                "footprint outside window: {type_name} at {origin} has {missing} non-walkable tile(s)"
            ),
            Diagnostic::AnchorNotWalkable { anchor, at } => {
                write!(f, "{anchor} {at} is not a walkable tile")
            }
            Diagnostic::AnchorIsolated { anchor, at } => {
                write!(f, "{anchor} {at} has no walkable neighbour")
            }
            Diagnostic::AnchorsCoincide { at } => {
                write!(f, "insideBase and outsideBase are the same tile {at}")
            }
            Diagnostic::CoversAnchor {
                type_name,
                origin,
                anchor,
            } => write!(f, "{type_name} at {origin} would cover {anchor}"),
            Diagnostic::InfeasibleInstance { instance } => {
                write!(f, "infeasible instance: {instance} has no buildable position")
            }
        }
    }
}

pub(crate) const KING_MOVES: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Warnings about a parsed problem. Never fails.
pub fn validate_problem(p: &WallProblem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let terrain = &p.terrain;

    for (type_name, positions) in &terrain.buildable {
        let Some(spec) = p.types.get(type_name) else {
            continue;
        };
        for &origin in positions {
            for (anchor, at) in [
                ("insideBase", terrain.inside_base),
                ("outsideBase", terrain.outside_base),
            ] {
                if footprint_iter(spec, origin).any(|t| t == at) {
                    out.push(Diagnostic::CoversAnchor {
                        type_name: type_name.clone(),
                        origin,
                        anchor,
                    });
                }
            }
            let missing = footprint_iter(spec, origin)
                .filter(|t| !terrain.is_walkable(*t))
                .count();
            if missing > 0 {
                out.push(Diagnostic::FootprintOutsideWindow {
                    type_name: type_name.clone(),
                    origin,
                    missing,
                });
            }
        }
    }

    for (anchor, at) in [
        ("insideBase", terrain.inside_base),
        ("outsideBase", terrain.outside_base),
    ] {
        if !terrain.is_walkable(at) {
            out.push(Diagnostic::AnchorNotWalkable { anchor, at });
        } else if !KING_MOVES
            .iter()
            .any(|&(dx, dy)| terrain.is_walkable(at.offset(dx, dy)))
        {
            out.push(Diagnostic::AnchorIsolated { anchor, at });
        }
    }
    if terrain.inside_base == terrain.outside_base {
        out.push(Diagnostic::AnchorsCoincide {
            at: terrain.inside_base,
        });
    }

    for inst in &p.instances {
        if terrain.candidates(&inst.type_name).next().is_none() {
            out.push(Diagnostic::InfeasibleInstance {
                instance: inst.name.clone(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gateway() -> BuildingTypeSpec {
        BuildingTypeSpec::with_gaps("gatewayType", 4, 3, [16, 15, 16, 7])
    }

    #[test]
    fn gateway_footprint_at_caption_position() {
        let fp = footprint(&gateway(), TileCoord::new(118, 23));
        assert_eq!(fp.len(), 12);
        assert!(fp
            .iter()
            .all(|t| (118..=121).contains(&t.x) && (23..=25).contains(&t.y)));
        assert!(fp.contains(&TileCoord::new(118, 23)));
        assert!(fp.contains(&TileCoord::new(121, 25)));
    }

    #[test]
    fn unit_and_pylon_footprints() {
        let zealot = BuildingTypeSpec::solid("zealotsType", 1, 1);
        assert_eq!(
            footprint(&zealot, TileCoord::new(0, 0)),
            BTreeSet::from([TileCoord::new(0, 0)])
        );
        let pylon = BuildingTypeSpec::with_gaps("pylonType", 2, 2, [16, 15, 20, 11]);
        assert_eq!(
            footprint(&pylon, TileCoord::new(10, 7)),
            BTreeSet::from([
                TileCoord::new(10, 7),
                TileCoord::new(11, 7),
                TileCoord::new(10, 8),
                TileCoord::new(11, 8)
            ])
        );
    }

    fn corridor3() -> WallProblem {
        let mut t = TerrainWindow::new(TileCoord::new(4, 1), TileCoord::new(0, 1));
        t.add_walkable_rect(TileCoord::new(0, 0), 5, 3);
        t.add_buildable("blockType", TileCoord::new(2, 0));
        let mut p = WallProblem::new(t);
        p.add_type(BuildingTypeSpec::solid("blockType", 1, 3));
        p.add_instance("block1", "blockType");
        p
    }

    #[test]
    fn corridor3_has_no_diagnostics() {
        assert!(validate_problem(&corridor3()).is_empty());
    }

    #[test]
    fn instance_without_candidates_is_flagged() {
        let mut p = corridor3();
        p.add_type(BuildingTypeSpec::solid("spareType", 1, 1));
        p.add_instance("spare1", "spareType");
        assert_eq!(
            validate_problem(&p),
            vec![Diagnostic::InfeasibleInstance {
                instance: "spare1".into()
            }]
        );
    }

    #[test]
    fn footprint_leaving_window_is_flagged() {
        let mut p = corridor3();
        p.add_type(gateway());
        // 4x3 at (1,2) covers rows 2..=4; rows 3 and 4 are outside the 5x3 window.
        p.terrain.add_buildable("gatewayType", TileCoord::new(1, 2));
        let missing_by_enumeration = footprint(&gateway(), TileCoord::new(1, 2))
            .iter()
            .filter(|t| !p.terrain.walkable.contains(t))
            .count();
        assert_eq!(missing_by_enumeration, 8);
        assert_eq!(
            validate_problem(&p),
            vec![Diagnostic::FootprintOutsideWindow {
                type_name: "gatewayType".into(),
                origin: TileCoord::new(1, 2),
                missing: 8
            }]
        );
    }

    #[test]
    fn candidate_on_anchor_is_flagged() {
        let mut p = corridor3();
        p.terrain.add_buildable("blockType", TileCoord::new(0, 0));
        assert_eq!(
            validate_problem(&p),
            vec![Diagnostic::CoversAnchor {
                type_name: "blockType".into(),
                origin: TileCoord::new(0, 0),
                anchor: "outsideBase"
            }]
        );
    }

    #[test]
    fn restricted_keeps_declaration_order() {
        let mut p = corridor3();
        p.add_instance("block0", "blockType");
        let r = p.restricted(["block0", "block1"]);
        let names: Vec<_> = r.instances.iter().map(|i| i.name.as_str()).collect();
        assert_eq!(names, ["block1", "block0"]);
    }
}
