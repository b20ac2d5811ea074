//! Tile occupancy of a placement and the pixel seams between buildings.

use std::collections::BTreeMap;

use crate::error::OverlapError;
use crate::grid::{footprint_iter, Assignment, BuildingTypeSpec, TileCoord, WallProblem};

/// Walkable tiles covered by a building, keyed by tile.
///
/// Footprint tiles on non-walkable terrain are not recorded: they neither
/// collide nor form seams.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OccupancyMap {
    pub by_tile: BTreeMap<TileCoord, String>,
}

impl OccupancyMap {
    pub fn owner(&self, t: TileCoord) -> Option<&str> {
        self.by_tile.get(&t).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.by_tile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_tile.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Orientation {
    /// Between horizontally adjacent tiles (a crack running north-south).
    Horizontal,
    /// Between vertically adjacent tiles (a crack running east-west).
    Vertical,
}

/// Walkable pixel width between two adjacent tiles owned by different
/// buildings. Emitted once per ordering of the tile pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GapSeam {
    pub from: TileCoord,
    pub to: TileCoord,
    pub orientation: Orientation,
    pub width_px: i32,
}

/// Width of the seam between `upper` and the building directly below it.
pub fn vertical_seam_width(upper: &BuildingTypeSpec, lower: &BuildingTypeSpec) -> i32 {
    upper.bottom_gap + lower.top_gap
}

/// Width of the seam between `left` and the building directly right of it.
pub fn horizontal_seam_width(left: &BuildingTypeSpec, right: &BuildingTypeSpec) -> i32 {
    left.right_gap + right.left_gap
}

pub fn occupied_map(assign: &Assignment, p: &WallProblem) -> Result<OccupancyMap, OverlapError> {
    let mut claims: BTreeMap<TileCoord, Vec<&str>> = BTreeMap::new();
    for inst in &p.instances {
        let Some(origin) = assign.get(&inst.name) else {
            continue;
        };
        for t in footprint_iter(p.spec_of(inst), origin) {
            if p.terrain.is_walkable(t) {
                claims.entry(t).or_default().push(&inst.name);
            }
        }
    }

    let mut conflicts = Vec::new();
    for (&t, owners) in &claims {
        for (i, a) in owners.iter().enumerate() {
            for b in &owners[i + 1..] {
                conflicts.push((t, a.to_string(), b.to_string()));
            }
        }
    }
    if !conflicts.is_empty() {
        return Err(OverlapError { conflicts });
    }

    Ok(OccupancyMap {
        by_tile: claims
            .into_iter()
            .map(|(t, owners)| (t, owners[0].to_string()))
            .collect(),
    })
}

/// Every ordered pair of 4-adjacent tiles owned by different buildings.
pub fn gap_seams(occ: &OccupancyMap, p: &WallProblem) -> Vec<GapSeam> {
    let spec = |name: &str| {
        let inst = p
            .instance(name)
            .expect("occupancy names a problem instance");
        p.spec_of(inst)
    };
    let mut seams = Vec::new();
    for (&from, a) in &occ.by_tile {
        for (dx, dy) in [(0, -1), (-1, 0), (1, 0), (0, 1)] {
            let to = from.offset(dx, dy);
            let Some(b) = occ.owner(to) else { continue };
            if a == b {
                continue;
            }
            let (sa, sb) = (spec(a), spec(b));
            let (orientation, width_px) = match (dx, dy) {
                (0, 1) => (Orientation::Vertical, vertical_seam_width(sa, sb)),
                (0, _) => (Orientation::Vertical, vertical_seam_width(sb, sa)),
                (1, _) => (Orientation::Horizontal, horizontal_seam_width(sa, sb)),
                _ => (Orientation::Horizontal, horizontal_seam_width(sb, sa)),
            };
            seams.push(GapSeam {
                from,
                to,
                orientation,
                width_px,
            });
        }
    }
    seams
}

/// `(vertical, horizontal)` sums of seam widths.
pub fn gap_totals(seams: &[GapSeam]) -> (i64, i64) {
    seams.iter().fold((0, 0), |(v, h), s| match s.orientation {
        Orientation::Vertical => (v + s.width_px as i64, h),
        Orientation::Horizontal => (v, h + s.width_px as i64),
    })
}
