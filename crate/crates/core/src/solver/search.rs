//! Depth-first placement search over a dense tile window.
//!
//! Two exact reductions keep the tree small:
//!
//! * Path branching. If an outside-to-inside path of free walkable tiles
//!   exists, some remaining building must cover one of its tiles, or the path
//!   survives (seams only ever add reachability). Branch on the first
//!   remaining building, in list order, that covers the path; the ones before
//!   it are restricted to positions that miss it. The branches partition the
//!   tight assignments, so nothing is visited twice.
//! * Branch and bound. Seam width is a sum over building pairs, so a partial
//!   placement plus the cheapest possible contribution of every unfinished
//!   pair bounds any completion from below.
//!
//! Once a partial placement is sealed, adding buildings that create no seam
//! wide enough for the enemy keeps it sealed: more tiles are blocked and the
//! squeeze tiles are unchanged. Such leaves skip the reachability run.

use std::sync::atomic::{AtomicI64, Ordering as AtomicOrdering};

use rayon::prelude::*;

use crate::grid::{footprint_iter, Assignment, BuildingTypeSpec, TileCoord, WallProblem};
use crate::occupancy::{horizontal_seam_width, vertical_seam_width};
use crate::reach::{Cells, Reacher, Shortcut, Window, DOWN, LEFT, RIGHT, UP};

use super::{Score, SearchOptions, Solution};

const UNPLACED: u32 = u32::MAX;

struct Candidate {
    pos: TileCoord,
    /// Walkable footprint tiles as window indices.
    cells: Vec<u32>,
}

struct Inst {
    spec: BuildingTypeSpec,
    candidates: Vec<Candidate>,
}

/// Candidate lists still open for the unplaced buildings.
type Remaining = Vec<(usize, Vec<u32>)>;

/// Children of a search node that share the same remaining lists.
struct Group {
    inst: usize,
    candidates: Vec<u32>,
    rest: Remaining,
}

#[derive(Clone)]
struct State {
    cover: Vec<u8>,
    owner: Vec<u16>,
    cells: Cells,
    chosen: Vec<u32>,
    vertical: i64,
    horizontal: i64,
    /// Seams at least as wide as the enemy, counted from both sides.
    wide: u32,
    reacher: Reacher,
    bfs_seen: Vec<u32>,
    bfs_epoch: u32,
    bfs_parent: Vec<u32>,
    bfs_queue: Vec<u32>,
    squeezed: Vec<u32>,
}

#[derive(Clone, Debug)]
struct Leaf {
    rank: (i64, i64, i64),
    key: Vec<(i32, i32)>,
    chosen: Vec<u32>,
}

impl Leaf {
    fn better_than(&self, other: &Leaf) -> bool {
        (self.rank, &self.key) < (other.rank, &other.key)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    All,
    Best,
    First,
}

struct Sink<'s> {
    goal: Goal,
    found: Vec<Leaf>,
    best: Option<Leaf>,
    shared_best: &'s AtomicI64,
    done: bool,
}

impl Sink<'_> {
    fn offer(&mut self, leaf: Leaf) {
        match self.goal {
            Goal::All => self.found.push(leaf),
            Goal::First => {
                self.found.push(leaf);
                self.done = true;
            }
            Goal::Best => {
                if self.best.as_ref().is_none_or(|b| leaf.better_than(b)) {
                    self.shared_best
                        .fetch_min(leaf.rank.0, AtomicOrdering::Relaxed);
                    self.best = Some(leaf);
                }
            }
        }
    }
}

struct Engine<'a> {
    problem: &'a WallProblem,
    win: Window,
    shortcut: Shortcut,
    insts: Vec<Inst>,
    opts: SearchOptions,
    /// Per ordered pair `[u][v]`: cheapest (combined, vertical, horizontal)
    /// seam contribution over all candidate pairs.
    pair_min: Vec<Vec<[i64; 3]>>,
}

impl<'a> Engine<'a> {
    fn new(problem: &'a WallProblem, opts: SearchOptions) -> Self {
        let win = Window::new(problem);
        let insts: Vec<Inst> = problem
            .instances
            .iter()
            .map(|inst| {
                let spec = problem.spec_of(inst).clone();
                let candidates = problem
                    .candidates_of(inst)
                    .into_iter()
                    .map(|pos| Candidate {
                        pos,
                        cells: footprint_iter(&spec, pos)
                            .filter_map(|t| win.index(t))
                            .filter(|&i| win.walkable[i])
                            .map(|i| i as u32)
                            .collect(),
                    })
                    .collect();
                Inst { spec, candidates }
            })
            .collect();
        let mut coverable = vec![false; win.len()];
        for c in insts.iter().flat_map(|i| &i.candidates) {
            for &i in &c.cells {
                coverable[i as usize] = true;
            }
        }
        let shortcut = Shortcut::new(&win, &coverable);
        let mut engine = Engine {
            problem,
            win,
            shortcut,
            insts,
            opts,
            pair_min: Vec::new(),
        };
        if opts.bound && opts.early_overlap {
            engine.pair_min = engine.pair_minima();
        }
        engine
    }

    fn fresh_state(&self) -> State {
        let n = self.win.len();
        State {
            cover: vec![0; n],
            owner: vec![u16::MAX; n],
            cells: Cells::new(n),
            chosen: vec![UNPLACED; self.insts.len()],
            vertical: 0,
            horizontal: 0,
            wide: 0,
            reacher: Reacher::with_shortcut(&self.win, &self.shortcut),
            bfs_seen: vec![0; n],
            bfs_epoch: 0,
            bfs_parent: vec![0; n],
            bfs_queue: Vec::new(),
            squeezed: Vec::new(),
        }
    }

    fn root(&self) -> Remaining {
        let mut order: Vec<usize> = (0..self.insts.len()).collect();
        if self.opts.order_by_candidates {
            order.sort_by_key(|&i| (self.insts[i].candidates.len(), i));
        }
        order
            .into_iter()
            .map(|i| (i, (0..self.insts[i].candidates.len() as u32).collect()))
            .collect()
    }

    /// Seam width between tile `a` of building `ia` and its neighbour `b` of
    /// building `ib` in direction `dir`.
    fn seam(&self, ia: usize, ib: usize, dir: usize) -> i32 {
        let (sa, sb) = (&self.insts[ia].spec, &self.insts[ib].spec);
        match dir {
            RIGHT => horizontal_seam_width(sa, sb),
            LEFT => horizontal_seam_width(sb, sa),
            DOWN => vertical_seam_width(sa, sb),
            _ => vertical_seam_width(sb, sa),
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn pair_minima(&self) -> Vec<Vec<[i64; 3]>> {
        let k = self.insts.len();
        let mut out = vec![vec![[0i64; 3]; k]; k];
        let mut mark = vec![usize::MAX; self.win.len()];
        for u in 0..k {
            for v in u + 1..k {
                let mut best = [i64::MAX; 3];
                for (cb_idx, cb) in self.insts[v].candidates.iter().enumerate() {
                    let tag = cb_idx + v * 1_000_000;
                    for &i in &cb.cells {
                        mark[i as usize] = tag;
                    }
                    'ca: for ca in &self.insts[u].candidates {
                        let (mut vert, mut horiz) = (0i64, 0i64);
                        for &i in &ca.cells {
                            if mark[i as usize] == tag {
                                continue 'ca;
                            }
                            for dir in [UP, DOWN, LEFT, RIGHT] {
                                let Some(j) = self.win.neighbour(i as usize, dir) else {
                                    continue;
                                };
                                if mark[j] == tag {
                                    let w = 2 * self.seam(u, v, dir) as i64;
                                    if dir == LEFT || dir == RIGHT {
                                        horiz += w;
                                    } else {
                                        vert += w;
                                    }
                                }
                            }
                        }
                        best[0] = best[0].min(vert + horiz);
                        best[1] = best[1].min(vert);
                        best[2] = best[2].min(horiz);
                    }
                    for &i in &cb.cells {
                        mark[i as usize] = usize::MAX;
                    }
                }
                // No compatible pair: the pair can never complete, any bound holds.
                let best = best.map(|b| if b == i64::MAX { 0 } else { b });
                out[u][v] = best;
                out[v][u] = best;
            }
        }
        out
    }

    fn free(&self, st: &State, i: usize) -> bool {
        self.win.walkable[i] && st.cover[i] == 0
    }

    /// Tiles of some 8-connected path of free tiles from outside to inside.
    fn open_path(&self, st: &mut State) -> Option<Vec<u32>> {
        let (src, dst) = (self.win.outside, self.win.inside);
        if src == dst {
            return Some(vec![src as u32]);
        }
        if !self.free(st, src) || !self.free(st, dst) {
            return None;
        }
        st.bfs_epoch = st.bfs_epoch.wrapping_add(1);
        if st.bfs_epoch == 0 {
            st.bfs_seen.fill(0);
            st.bfs_epoch = 1;
        }
        let epoch = st.bfs_epoch;
        st.bfs_queue.clear();
        st.bfs_queue.push(src as u32);
        st.bfs_seen[src] = epoch;
        let mut head = 0;
        while head < st.bfs_queue.len() {
            let u = st.bfs_queue[head] as usize;
            head += 1;
            for v in self.win.neighbours(u) {
                if st.bfs_seen[v] == epoch || !self.free(st, v) {
                    continue;
                }
                st.bfs_seen[v] = epoch;
                st.bfs_parent[v] = u as u32;
                if v == dst {
                    let mut path = vec![v as u32];
                    let mut at = v;
                    while at != src {
                        at = st.bfs_parent[at] as usize;
                        path.push(at as u32);
                    }
                    return Some(path);
                }
                st.bfs_queue.push(v as u32);
            }
        }
        None
    }

    /// Child groups of a node, and whether a free outside-to-inside path
    /// is known to be absent.
    fn expand(&self, st: &mut State, remaining: &Remaining) -> (Vec<Group>, bool) {
        let path = if self.opts.path_branching {
            self.open_path(st)
        } else {
            None
        };
        let Some(path) = path else {
            let (inst, candidates) = remaining[0].clone();
            let group = Group {
                inst,
                candidates,
                rest: remaining[1..].to_vec(),
            };
            return (vec![group], self.opts.path_branching);
        };

        let mut on_path = vec![0u64; self.win.len().div_ceil(64)];
        for &i in &path {
            on_path[i as usize / 64] |= 1 << (i % 64);
        }
        let hits = |c: &Candidate| {
            c.cells
                .iter()
                .any(|&i| on_path[i as usize / 64] >> (i % 64) & 1 == 1)
        };

        let mut groups = Vec::new();
        let mut missed: Remaining = Vec::new();
        for (j, (inst, list)) in remaining.iter().enumerate() {
            let (hit, miss): (Vec<u32>, Vec<u32>) = list
                .iter()
                .partition(|&&c| hits(&self.insts[*inst].candidates[c as usize]));
            if !hit.is_empty() {
                let mut rest = missed.clone();
                rest.extend_from_slice(&remaining[j + 1..]);
                groups.push(Group {
                    inst: *inst,
                    candidates: hit,
                    rest,
                });
            }
            if miss.is_empty() {
                break;
            }
            missed.push((*inst, miss));
        }
        (groups, false)
    }

    fn squeezable(&self, w: i32, dir: usize) -> bool {
        let need = if dir == LEFT || dir == RIGHT {
            self.problem.enemy_width_px
        } else {
            self.problem.enemy_height_px
        };
        w as i64 >= need as i64
    }

    /// Seam totals between `cells` of `inst` and the tiles already covered:
    /// (vertical, horizontal, wide seam count), both sides counted.
    fn seams_against(&self, st: &State, inst: usize, cells: &[u32]) -> (i64, i64, u32) {
        let (mut vert, mut horiz, mut wide) = (0, 0, 0);
        for &i in cells {
            for dir in [UP, DOWN, LEFT, RIGHT] {
                let Some(j) = self.win.neighbour(i as usize, dir) else {
                    continue;
                };
                if st.cover[j] == 0 {
                    continue;
                }
                let w = self.seam(inst, st.owner[j] as usize, dir);
                if dir == LEFT || dir == RIGHT {
                    horiz += 2 * w as i64;
                } else {
                    vert += 2 * w as i64;
                }
                if self.squeezable(w, dir) {
                    wide += 2;
                }
            }
        }
        (vert, horiz, wide)
    }

    /// Places a candidate; returns false (leaving the state untouched) on
    /// an early overlap.
    fn place(&self, st: &mut State, inst: usize, cand: u32) -> bool {
        let cells = &self.insts[inst].candidates[cand as usize].cells;
        if self.opts.early_overlap {
            if cells.iter().any(|&i| st.cover[i as usize] != 0) {
                return false;
            }
            let (vert, horiz, wide) = self.seams_against(st, inst, cells);
            st.vertical += vert;
            st.horizontal += horiz;
            st.wide += wide;
        }
        for &i in cells {
            let i = i as usize;
            st.cover[i] += 1;
            st.owner[i] = inst as u16;
            st.cells.occupied[i] = true;
        }
        st.chosen[inst] = cand;
        true
    }

    fn unplace(&self, st: &mut State, inst: usize) {
        let cand = std::mem::replace(&mut st.chosen[inst], UNPLACED);
        let cells = &self.insts[inst].candidates[cand as usize].cells;
        for &i in cells {
            let i = i as usize;
            st.cover[i] -= 1;
            st.cells.occupied[i] = st.cover[i] != 0;
        }
        if self.opts.early_overlap {
            let (vert, horiz, wide) = self.seams_against(st, inst, cells);
            st.vertical -= vert;
            st.horizontal -= horiz;
            st.wide -= wide;
        }
    }

    fn key(&self, chosen: &[u32]) -> Vec<(i32, i32)> {
        chosen
            .iter()
            .zip(&self.insts)
            .map(|(&c, inst)| inst.candidates[c as usize].pos.row_major())
            .collect()
    }

    /// True when no completion of this node can beat the best wall so far.
    fn bounded_out(&self, st: &State, remaining: &Remaining, sink: &Sink) -> bool {
        if sink.goal != Goal::Best || !self.opts.bound || !self.opts.early_overlap {
            return false;
        }
        let k = self.insts.len();
        let mut rest = [0i64; 3];
        for u in 0..k {
            for v in u + 1..k {
                if st.chosen[u] == UNPLACED || st.chosen[v] == UNPLACED {
                    for (r, m) in rest.iter_mut().zip(self.pair_min[u][v]) {
                        *r += m;
                    }
                }
            }
        }
        let lower = st.vertical + st.horizontal + rest[0];
        let shared = sink.shared_best.load(AtomicOrdering::Relaxed);
        if lower > shared {
            return true;
        }
        let Some(best) = &sink.best else {
            return false;
        };
        if lower > best.rank.0 {
            return true;
        }
        if lower < best.rank.0 || rest != [0; 3] {
            return false;
        }
        // Every unfinished pair contributes >= 0 per axis, so a tie on the
        // combined width pins the final totals to the current ones.
        match (st.vertical, st.horizontal).cmp(&(best.rank.1, best.rank.2)) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                let mut key_floor: Vec<(i32, i32)> = Vec::with_capacity(k);
                for (i, inst) in self.insts.iter().enumerate() {
                    let pos = if st.chosen[i] != UNPLACED {
                        inst.candidates[st.chosen[i] as usize].pos.row_major()
                    } else {
                        remaining
                            .iter()
                            .find(|(r, _)| *r == i)
                            .and_then(|(_, list)| {
                                list.iter()
                                    .map(|&c| inst.candidates[c as usize].pos.row_major())
                                    .min()
                            })
                            .unwrap_or((i32::MAX, i32::MAX))
                    };
                    key_floor.push(pos);
                }
                key_floor >= best.key
            }
        }
    }

    /// Sets the squeeze flags of every placed building and returns the
    /// (vertical, horizontal) totals. Flags are undone by [`Self::clear_squeeze`].
    fn mark_squeeze(&self, st: &mut State) -> (i64, i64) {
        let (mut vert, mut horiz) = (0i64, 0i64);
        st.squeezed.clear();
        for (inst, &c) in st.chosen.iter().enumerate() {
            if c == UNPLACED {
                continue;
            }
            for &i in &self.insts[inst].candidates[c as usize].cells {
                let i = i as usize;
                for dir in [RIGHT, DOWN] {
                    let Some(j) = self.win.neighbour(i, dir) else {
                        continue;
                    };
                    if st.cover[j] == 0 || st.owner[j] as usize == inst {
                        continue;
                    }
                    let w = self.seam(inst, st.owner[j] as usize, dir);
                    if dir == RIGHT {
                        horiz += 2 * w as i64;
                    } else {
                        vert += 2 * w as i64;
                    }
                    if self.squeezable(w, dir) {
                        let flags = if dir == RIGHT {
                            &mut st.cells.squeeze_h
                        } else {
                            &mut st.cells.squeeze_v
                        };
                        flags[i] = true;
                        flags[j] = true;
                        st.squeezed.push(i as u32);
                        st.squeezed.push(j as u32);
                    }
                }
            }
        }
        (vert, horiz)
    }

    fn clear_squeeze(&self, st: &mut State) {
        for &i in &st.squeezed {
            st.cells.squeeze_h[i as usize] = false;
            st.cells.squeeze_v[i as usize] = false;
        }
    }

    fn inside_reached(&self, st: &mut State) -> bool {
        st.reacher.run_shortcut(
            &self.win,
            &st.cells,
            self.problem.reach_mode,
            &self.shortcut,
        )
    }

    /// `sealed_wide` is the wide-seam count of a sealed ancestor, if any.
    fn leaf(&self, st: &mut State, sealed_wide: Option<u32>, sink: &mut Sink) {
        if !self.opts.early_overlap {
            let overlapping = st.chosen.iter().zip(&self.insts).any(|(&c, inst)| {
                inst.candidates[c as usize]
                    .cells
                    .iter()
                    .any(|&i| st.cover[i as usize] > 1)
            });
            if overlapping {
                return;
            }
            for (inst, &c) in st.chosen.iter().enumerate() {
                for &i in &self.insts[inst].candidates[c as usize].cells {
                    st.owner[i as usize] = inst as u16;
                }
            }
        }

        let (vert, horiz) = if self.opts.early_overlap {
            (st.vertical, st.horizontal)
        } else {
            let totals = self.mark_squeeze(st);
            self.clear_squeeze(st);
            totals
        };
        let rank = Score::new(vert, horiz).rank();
        if let (Goal::Best, Some(best)) = (sink.goal, &sink.best) {
            if rank > best.rank || (rank == best.rank && self.key(&st.chosen) >= best.key) {
                return;
            }
        }
        let tight = if sealed_wide.is_some() && sealed_wide == Some(st.wide) {
            true
        } else {
            self.mark_squeeze(st);
            let reached = self.inside_reached(st);
            self.clear_squeeze(st);
            !reached
        };
        if tight {
            sink.offer(Leaf {
                rank,
                key: self.key(&st.chosen),
                chosen: st.chosen.clone(),
            });
        }
    }

    fn node(
        &self,
        st: &mut State,
        remaining: &Remaining,
        mut sealed_wide: Option<u32>,
        sink: &mut Sink,
    ) {
        if sink.done {
            return;
        }
        if remaining.is_empty() {
            self.leaf(st, sealed_wide, sink);
            return;
        }
        if self.bounded_out(st, remaining, sink) {
            return;
        }
        let (groups, path_closed) = self.expand(st, remaining);
        // the wide-seam count is only tracked with early overlap checks
        if path_closed && self.opts.early_overlap && sealed_wide != Some(st.wide) {
            self.mark_squeeze(st);
            if !self.inside_reached(st) {
                sealed_wide = Some(st.wide);
            }
            self.clear_squeeze(st);
        }
        for group in groups {
            for &cand in &group.candidates {
                if self.place(st, group.inst, cand) {
                    self.node(st, &group.rest, sealed_wide, sink);
                    self.unplace(st, group.inst);
                }
                if sink.done {
                    return;
                }
            }
        }
    }

    fn run(&self, goal: Goal) -> Vec<Leaf> {
        let shared_best = AtomicI64::new(i64::MAX);
        let new_sink = || Sink {
            goal,
            found: Vec::new(),
            best: None,
            shared_best: &shared_best,
            done: false,
        };
        let mut st = self.fresh_state();
        let remaining = self.root();
        if self.insts.iter().any(|i| i.candidates.is_empty()) {
            return Vec::new();
        }

        let parallel = self.opts.parallel && goal != Goal::First && !remaining.is_empty();
        let sinks: Vec<Sink> = if parallel {
            let (groups, _) = self.expand(&mut st, &remaining);
            let tasks: Vec<(&Group, u32)> = groups
                .iter()
                .flat_map(|g| g.candidates.iter().map(move |&c| (g, c)))
                .collect();
            tasks
                .par_iter()
                .map_init(
                    || st.clone(),
                    |local, &(group, cand)| {
                        let mut sink = new_sink();
                        if self.place(local, group.inst, cand) {
                            self.node(local, &group.rest, None, &mut sink);
                            self.unplace(local, group.inst);
                        }
                        sink
                    },
                )
                .collect()
        } else {
            let mut sink = new_sink();
            self.node(&mut st, &remaining, None, &mut sink);
            vec![sink]
        };

        match goal {
            Goal::Best => sinks
                .into_iter()
                .filter_map(|s| s.best)
                .reduce(|a, b| if b.better_than(&a) { b } else { a })
                .into_iter()
                .collect(),
            _ => sinks.into_iter().flat_map(|s| s.found).collect(),
        }
    }

    fn solution(&self, leaf: &Leaf) -> Solution {
        let mut assignment = Assignment::new();
        for ((inst, &c), decl) in self
            .insts
            .iter()
            .zip(&leaf.chosen)
            .zip(&self.problem.instances)
        {
            assignment.place(&decl.name, inst.candidates[c as usize].pos);
        }
        Solution {
            assignment,
            score: Score::new(leaf.rank.1, leaf.rank.2),
            stage_index: 1,
        }
    }
}

pub(super) fn enumerate(p: &WallProblem, opts: SearchOptions) -> Vec<Solution> {
    let engine = Engine::new(p, opts);
    engine
        .run(Goal::All)
        .iter()
        .map(|l| engine.solution(l))
        .collect()
}

pub(super) fn optimize(p: &WallProblem, opts: SearchOptions) -> Option<Solution> {
    let engine = Engine::new(p, opts);
    engine.run(Goal::Best).first().map(|l| engine.solution(l))
}

pub(super) fn first(p: &WallProblem, opts: SearchOptions) -> Option<Solution> {
    let engine = Engine::new(p, opts);
    engine.run(Goal::First).first().map(|l| engine.solution(l))
}
