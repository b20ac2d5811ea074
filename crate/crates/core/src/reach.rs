//! Reachability from the outside anchor and the tightness test.
//!
//! Reachability is the least set closed under:
//!
//! * the outside anchor is reachable;
//! * a king move between two walkable, unblocked tiles carries reachability;
//! * an occupied tile with a horizontal seam at least as wide as the enemy is
//!   reachable when the tile directly above or below it is; likewise for
//!   vertical seams with the tiles to the left and right;
//! * in [`ReachMode::Extended`] only, a reachable occupied tile with such a
//!   seam passes reachability on to the free walkable tiles in the same
//!   perpendicular direction, so squeeze corridors can come out the far side.
//!
//! Diagonal moves need no corner clearance.

use std::collections::BTreeSet;

use crate::error::OverlapError;
use crate::grid::ReachMode;
use crate::grid::{Assignment, TileCoord, WallProblem, KING_MOVES};
use crate::occupancy::{gap_seams, occupied_map, GapSeam, OccupancyMap, Orientation};

/// Walkable tiles occupied by a building.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockedSet {
    pub tiles: BTreeSet<TileCoord>,
}

/// Tiles an enemy unit can reach from the outside anchor.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReachSet {
    pub tiles: BTreeSet<TileCoord>,
}

impl ReachSet {
    pub fn contains(&self, t: TileCoord) -> bool {
        self.tiles.contains(&t)
    }
}

pub fn blocked_set(occ: &OccupancyMap) -> BlockedSet {
    BlockedSet {
        tiles: occ.by_tile.keys().copied().collect(),
    }
}

const NONE: u32 = u32::MAX;
pub(crate) const UP: usize = 1;
pub(crate) const LEFT: usize = 3;
pub(crate) const RIGHT: usize = 4;
pub(crate) const DOWN: usize = 6;

/// Dense view of the terrain: the bounding box of walkable tiles and anchors.
#[derive(Clone, Debug)]
pub(crate) struct Window {
    min_x: i32,
    min_y: i32,
    width: i32,
    height: i32,
    pub walkable: Vec<bool>,
    /// King-move neighbours in [`KING_MOVES`] order, `NONE` off the window.
    nbr: Vec<[u32; 8]>,
    pub inside: usize,
    pub outside: usize,
}

impl Window {
    pub fn new(p: &WallProblem) -> Self {
        let terrain = &p.terrain;
        let tiles = terrain
            .walkable
            .iter()
            .chain([&terrain.inside_base, &terrain.outside_base]);
        let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for t in tiles {
            x0 = x0.min(t.x);
            y0 = y0.min(t.y);
            x1 = x1.max(t.x);
            y1 = y1.max(t.y);
        }
        let (width, height) = (x1 - x0 + 1, y1 - y0 + 1);
        let n = (width * height) as usize;
        let mut win = Window {
            min_x: x0,
            min_y: y0,
            width,
            height,
            walkable: vec![false; n],
            nbr: vec![[NONE; 8]; n],
            inside: 0,
            outside: 0,
        };
        for t in &terrain.walkable {
            let i = win.index(*t).expect("inside bounding box");
            win.walkable[i] = true;
        }
        for i in 0..n {
            let c = win.coord(i);
            for (k, (dx, dy)) in KING_MOVES.iter().enumerate() {
                if let Some(j) = win.index(c.offset(*dx, *dy)) {
                    win.nbr[i][k] = j as u32;
                }
            }
        }
        win.inside = win.index(terrain.inside_base).expect("anchor in window");
        win.outside = win.index(terrain.outside_base).expect("anchor in window");
        win
    }

    pub fn len(&self) -> usize {
        self.walkable.len()
    }

    pub fn index(&self, t: TileCoord) -> Option<usize> {
        let (dx, dy) = (t.x - self.min_x, t.y - self.min_y);
        (0..self.width).contains(&dx).then_some(())?;
        (0..self.height).contains(&dy).then_some(())?;
        Some((dy * self.width + dx) as usize)
    }

    pub fn coord(&self, i: usize) -> TileCoord {
        let i = i as i32;
        TileCoord::new(self.min_x + i % self.width, self.min_y + i / self.width)
    }

    #[inline]
    pub fn neighbour(&self, i: usize, dir: usize) -> Option<usize> {
        let j = self.nbr[i][dir];
        (j != NONE).then_some(j as usize)
    }

    #[inline]
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.nbr[i]
            .iter()
            .filter(|&&j| j != NONE)
            .map(|&j| j as usize)
    }
}

/// Per-tile state for one reachability evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Cells {
    pub occupied: Vec<bool>,
    /// Occupied tile with a horizontal seam wide enough for the enemy.
    pub squeeze_h: Vec<bool>,
    /// Occupied tile with a vertical seam tall enough for the enemy.
    pub squeeze_v: Vec<bool>,
}

impl Cells {
    pub fn new(n: usize) -> Self {
        Self {
            occupied: vec![false; n],
            squeeze_h: vec![false; n],
            squeeze_v: vec![false; n],
        }
    }
}

/// Precomputed parts of the fixpoint that no placement can change.
///
/// Walkable tiles that no candidate footprint covers are free in every
/// assignment. The component of such tiles around the outside anchor is
/// therefore always reachable, and touching the one around the inside
/// anchor means reaching the anchor.
#[derive(Clone, Debug)]
pub(crate) struct Shortcut {
    fixed: Vec<u32>,
    /// Fixed tiles next to a tile that is not fixed; the search starts here.
    frontier: Vec<u32>,
    goal: Vec<bool>,
    /// The two anchors share a component, so no placement can separate them.
    always: bool,
}

impl Shortcut {
    pub fn new(win: &Window, coverable: &[bool]) -> Self {
        let n = win.len();
        let open = |i: usize| win.walkable[i] && !coverable[i];
        let component = |start: usize| {
            let mut seen = vec![false; n];
            let mut stack = Vec::new();
            if open(start) {
                seen[start] = true;
                stack.push(start);
            }
            while let Some(u) = stack.pop() {
                for v in win.neighbours(u) {
                    if open(v) && !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
            seen
        };
        let outer = component(win.outside);
        let mut goal = component(win.inside);
        goal[win.inside] = true;
        let fixed: Vec<u32> = (0..n).filter(|&i| outer[i]).map(|i| i as u32).collect();
        let frontier = fixed
            .iter()
            .copied()
            .filter(|&i| {
                win.neighbours(i as usize)
                    .any(|j| win.walkable[j] && !outer[j])
            })
            .collect();
        let always = outer.iter().zip(&goal).any(|(a, b)| *a && *b) || win.outside == win.inside;
        Self {
            fixed,
            frontier,
            goal,
            always,
        }
    }
}

/// Stamp of tiles a [`Shortcut`] marks as always reached.
const FIXED: u32 = u32::MAX;

/// Worklist fixpoint with reusable scratch buffers.
#[derive(Clone, Debug, Default)]
pub(crate) struct Reacher {
    stamp: Vec<u32>,
    epoch: u32,
    queue: Vec<u32>,
}

impl Reacher {
    pub fn with_shortcut(win: &Window, sc: &Shortcut) -> Self {
        let mut stamp = vec![0; win.len()];
        for &i in &sc.fixed {
            stamp[i as usize] = FIXED;
        }
        Self {
            stamp,
            epoch: 0,
            queue: Vec::new(),
        }
    }

    fn begin(&mut self, n: usize) {
        if self.stamp.len() != n {
            self.stamp = vec![0; n];
            self.epoch = 0;
        }
        self.epoch += 1;
        if self.epoch == FIXED {
            for s in self.stamp.iter_mut().filter(|s| **s != FIXED) {
                *s = 0;
            }
            self.epoch = 1;
        }
        self.queue.clear();
    }

    #[inline]
    fn mark(&mut self, i: usize) -> bool {
        let s = self.stamp[i];
        if s == self.epoch || s == FIXED {
            false
        } else {
            self.stamp[i] = self.epoch;
            self.queue.push(i as u32);
            true
        }
    }

    pub fn reached(&self, i: usize) -> bool {
        self.stamp[i] == self.epoch || self.stamp[i] == FIXED
    }

    /// Whether the inside anchor is reached, starting from the precomputed
    /// outside component. The reacher must come from
    /// [`Reacher::with_shortcut`] with the same shortcut.
    pub fn run_shortcut(
        &mut self,
        win: &Window,
        cells: &Cells,
        mode: ReachMode,
        sc: &Shortcut,
    ) -> bool {
        if sc.always {
            return true;
        }
        self.begin(win.len());
        if sc.fixed.is_empty() {
            self.mark(win.outside);
        } else {
            self.queue.extend_from_slice(&sc.frontier);
        }
        self.fixpoint(win, cells, mode, |v| sc.goal[v])
    }

    /// Runs the fixpoint. Returns early with `true` once `stop_at` is
    /// reached; otherwise returns whether it was reached at all.
    pub fn run(
        &mut self,
        win: &Window,
        cells: &Cells,
        mode: ReachMode,
        stop_at: Option<usize>,
    ) -> bool {
        self.begin(win.len());
        self.mark(win.outside);
        let stop = stop_at.unwrap_or(usize::MAX);
        if win.outside == stop {
            return true;
        }
        self.fixpoint(win, cells, mode, |v| v == stop)
    }

    /// Drains the queue; returns true as soon as a goal tile is marked.
    fn fixpoint(
        &mut self,
        win: &Window,
        cells: &Cells,
        mode: ReachMode,
        goal: impl Fn(usize) -> bool,
    ) -> bool {
        let free = |j: usize| win.walkable[j] && !cells.occupied[j];
        let mut head = 0;
        while head < self.queue.len() {
            let u = self.queue[head] as usize;
            head += 1;
            if free(u) {
                for v in win.neighbours(u) {
                    if free(v) && self.mark(v) && goal(v) {
                        return true;
                    }
                }
            }
            // Squeeze into an occupied tile from the side of its seam.
            for (dir, squeeze) in [
                (UP, &cells.squeeze_h),
                (DOWN, &cells.squeeze_h),
                (LEFT, &cells.squeeze_v),
                (RIGHT, &cells.squeeze_v),
            ] {
                if let Some(v) = win.neighbour(u, dir) {
                    if squeeze[v] && self.mark(v) && goal(v) {
                        return true;
                    }
                }
            }
            if mode == ReachMode::Extended && cells.occupied[u] {
                for (dirs, squeeze) in [
                    ([UP, DOWN], &cells.squeeze_h),
                    ([LEFT, RIGHT], &cells.squeeze_v),
                ] {
                    if !squeeze[u] {
                        continue;
                    }
                    for dir in dirs {
                        if let Some(v) = win.neighbour(u, dir) {
                            if free(v) && self.mark(v) && goal(v) {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }
}

fn cells_from(win: &Window, p: &WallProblem, occ: &OccupancyMap, seams: &[GapSeam]) -> Cells {
    let mut cells = Cells::new(win.len());
    for t in occ.by_tile.keys() {
        if let Some(i) = win.index(*t) {
            cells.occupied[i] = true;
        }
    }
    for s in seams {
        let Some(i) = win.index(s.from) else { continue };
        match s.orientation {
            Orientation::Horizontal if s.width_px as i64 >= p.enemy_width_px as i64 => {
                cells.squeeze_h[i] = true
            }
            Orientation::Vertical if s.width_px as i64 >= p.enemy_height_px as i64 => {
                cells.squeeze_v[i] = true
            }
            _ => {}
        }
    }
    cells
}

/// Least set of tiles reachable from the outside anchor, under the problem's
/// reach mode.
pub fn reach_fixpoint(p: &WallProblem, occ: &OccupancyMap, seams: &[GapSeam]) -> ReachSet {
    let win = Window::new(p);
    let cells = cells_from(&win, p, occ, seams);
    let mut r = Reacher::default();
    r.run(&win, &cells, p.reach_mode, None);
    ReachSet {
        tiles: (0..win.len())
            .filter(|&i| r.reached(i))
            .map(|i| win.coord(i))
            .collect(),
    }
}

/// True when the inside anchor cannot be reached under `assign`.
pub fn is_tight(p: &WallProblem, assign: &Assignment) -> Result<bool, OverlapError> {
    let occ = occupied_map(assign, p)?;
    let seams = gap_seams(&occ, p);
    let win = Window::new(p);
    let cells = cells_from(&win, p, &occ, &seams);
    Ok(!Reacher::default().run(&win, &cells, p.reach_mode, Some(win.inside)))
}
