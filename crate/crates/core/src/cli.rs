//! Command-line front end. [`run`] does all the work and returns the exit
//! code with both output streams, so the binary is a thin wrapper and the
//! contract can be tested without spawning processes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::asp::{emit_program, format_answer_line};
use crate::facts::parse_document;
use crate::grid::{footprint, validate_problem, Assignment, ReachMode, TileCoord, WallProblem};
use crate::solver::{
    brute_force_oracle, check_assignment, checked_stages, enumerate_valid, ranking_cmp,
    solve_first, solve_optimal, Solution,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Solve,
    Emit,
    Check,
    Oracle,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "solve" => Ok(Self::Solve),
            "emit" => Ok(Self::Emit),
            "check" => Ok(Self::Check),
            "oracle" => Ok(Self::Oracle),
            other => Err(format!(
                "unknown mode `{other}` (expected solve|emit|check|oracle)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub problem_path: PathBuf,
    pub mode: Mode,
    /// Print up to this many walls instead of one. Must be at least 1.
    pub all_solutions: Option<usize>,
    pub optimize: bool,
    pub reach_mode: ReachMode,
    pub render: bool,
    /// Enemy unit `(width, height)` in pixels, replacing the file's values.
    pub enemy_override: Option<(u32, u32)>,
}

impl RunConfig {
    pub fn new(problem_path: impl Into<PathBuf>) -> Self {
        Self {
            problem_path: problem_path.into(),
            mode: Mode::Solve,
            all_solutions: None,
            optimize: true,
            reach_mode: ReachMode::Extended,
            render: false,
            enemy_override: None,
        }
    }
}

/// Parses `WxH`, e.g. `16x16`.
pub fn parse_enemy(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    let dim = |v: &str| match v.trim().parse::<u32>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("bad enemy dimension `{v}` in `{s}`")),
    };
    Ok((dim(w)?, dim(h)?))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOutput {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn input_error(msg: impl std::fmt::Display) -> Self {
        Self {
            exit_code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

pub fn run(cfg: &RunConfig) -> RunOutput {
    if cfg.all_solutions == Some(0) {
        return RunOutput::input_error("--all needs a count of at least 1");
    }
    let text = match std::fs::read_to_string(&cfg.problem_path) {
        Ok(t) => t,
        Err(e) => {
            return RunOutput::input_error(format!(
                "cannot read {}: {e}",
                cfg.problem_path.display()
            ))
        }
    };
    let (mut p, placed) = match parse_document(&text) {
        Ok(parsed) => parsed,
        Err(e) => return RunOutput::input_error(format!("{}: {e}", cfg.problem_path.display())),
    };
    p.reach_mode = cfg.reach_mode;
    if let Some((w, h)) = cfg.enemy_override {
        p.enemy_width_px = w;
        p.enemy_height_px = h;
    }

    let mut out = RunOutput::default();
    for d in validate_problem(&p) {
        let _ = writeln!(out.stderr, "warning: {d}");
    }
    match cfg.mode {
        Mode::Emit => out.stdout = emit_program(&p, cfg.optimize),
        Mode::Check => check(&p, &placed, cfg, &mut out),
        Mode::Oracle => match brute_force_oracle(&p) {
            Ok(mut found) => {
                if cfg.optimize {
                    found.sort_by(|a, b| ranking_cmp(&p, a, b));
                }
                if let Some(n) = cfg.all_solutions {
                    found.truncate(n);
                }
                report(&p, &found, cfg, &mut out);
            }
            Err(e) => return RunOutput::input_error(e),
        },
        Mode::Solve => solve(&p, cfg, &mut out),
    }
    out
}

fn solve(p: &WallProblem, cfg: &RunConfig, out: &mut RunOutput) {
    let stages = match checked_stages(p) {
        Ok(s) => s,
        Err(e) => {
            *out = RunOutput::input_error(e);
            return;
        }
    };
    let staged = p.stages.is_some();
    for (k, names) in stages.iter().enumerate() {
        let stage = if staged {
            p.restricted(names.iter().map(String::as_str))
        } else {
            p.clone()
        };
        let found: Vec<Solution> = match cfg.all_solutions {
            Some(n) => {
                let mut all = enumerate_valid(&stage, None);
                if cfg.optimize {
                    all.sort_by(|a, b| ranking_cmp(&stage, a, b));
                }
                all.truncate(n);
                all
            }
            None if cfg.optimize => solve_optimal(&stage).into_iter().collect(),
            None => solve_first(&stage).into_iter().collect(),
        };
        if staged {
            let _ = writeln!(
                out.stderr,
                "stage {} of {}: {} building(s), {}",
                k + 1,
                stages.len(),
                names.len(),
                if found.is_empty() {
                    "no wall"
                } else {
                    "wall found"
                }
            );
        }
        if !found.is_empty() {
            report(&stage, &found, cfg, out);
            return;
        }
    }
    report(p, &[], cfg, out);
}

fn report(p: &WallProblem, found: &[Solution], cfg: &RunConfig, out: &mut RunOutput) {
    let w = &mut out.stdout;
    if found.is_empty() {
        w.push_str("UNSATISFIABLE\n");
        out.exit_code = 1;
        if cfg.render {
            w.push_str(&render_ascii(p, None));
        }
        return;
    }
    for s in found {
        let _ = writeln!(w, "{}", format_answer_line(p, &s.assignment));
        if cfg.optimize {
            let _ = writeln!(
                w,
                "Optimization: {} {}",
                s.score.vertical_px, s.score.horizontal_px
            );
        }
    }
    w.push_str(if cfg.optimize {
        "OPTIMUM FOUND\n"
    } else {
        "SATISFIABLE\n"
    });
    if cfg.render {
        w.push_str(&render_ascii(p, Some(&found[0].assignment)));
    }
    out.exit_code = 0;
}

fn check(p: &WallProblem, placed: &Assignment, cfg: &RunConfig, out: &mut RunOutput) {
    let verdict = match check_assignment(p, placed) {
        Ok(v) => v,
        Err(e) => {
            *out = RunOutput::input_error(e);
            return;
        }
    };
    let w = &mut out.stdout;
    let _ = writeln!(w, "buildableOk: {}", verdict.buildable_ok);
    let _ = writeln!(w, "overlapOk: {}", verdict.overlap_ok);
    let _ = writeln!(w, "tight: {}", verdict.tight);
    if let Some(s) = verdict.score {
        let _ = writeln!(w, "Optimization: {} {}", s.vertical_px, s.horizontal_px);
    }
    if cfg.render {
        w.push_str(&render_ascii(p, Some(placed)));
    }
    out.exit_code = if verdict.is_valid() { 0 } else { 1 };
}

/// One glyph per instance: its first letter, with a declaration-order digit
/// appended to the letter of every instance after the first that shares it.
fn glyphs(p: &WallProblem) -> Vec<String> {
    let mut seen: BTreeMap<char, usize> = BTreeMap::new();
    p.instances
        .iter()
        .map(|i| {
            let c = i.name.chars().next().unwrap_or('?');
            let n = seen.entry(c).or_insert(0);
            *n += 1;
            if *n == 1 {
                c.to_string()
            } else {
                format!("{c}{}", *n - 1)
            }
        })
        .collect()
}

/// ASCII map of the window: `.` walkable, `#` not, `O`/`I` the outside and
/// inside anchors, and the instance glyphs where the assignment puts them.
/// Cells are as wide as the longest glyph. A legend follows when any
/// building is drawn.
pub fn render_ascii(p: &WallProblem, assign: Option<&Assignment>) -> String {
    let t = &p.terrain;
    let tiles = t
        .walkable
        .iter()
        .copied()
        .chain(t.buildable.values().flatten().copied())
        .chain([t.inside_base, t.outside_base]);
    let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
    for c in tiles {
        x0 = x0.min(c.x);
        y0 = y0.min(c.y);
        x1 = x1.max(c.x);
        y1 = y1.max(c.y);
    }

    let names = glyphs(p);
    let mut drawn: BTreeMap<TileCoord, &str> = BTreeMap::new();
    let mut legend = String::new();
    if let Some(a) = assign {
        for (inst, glyph) in p.instances.iter().zip(&names) {
            let (Some(at), Some(spec)) = (a.get(&inst.name), p.types.get(&inst.type_name)) else {
                continue;
            };
            for c in footprint(spec, at) {
                drawn.insert(c, glyph);
            }
            let _ = writeln!(legend, "{glyph}: {} at {at}", inst.name);
        }
    }
    let cell = names.iter().map(String::len).max().unwrap_or(1).max(1);

    let mut out = String::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let c = TileCoord::new(x, y);
            let glyph = if c == t.outside_base {
                "O"
            } else if c == t.inside_base {
                "I"
            } else if let Some(g) = drawn.get(&c) {
                g
            } else if t.walkable.contains(&c) {
                "."
            } else {
                "#"
            };
            let _ = write!(out, "{glyph:<cell$}");
        }
        out.push('\n');
    }
    out.push_str(&legend);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facts::parse_problem;
    use crate::grid::BuildingTypeSpec;

    const CORRIDOR3: &str = "
        buildingType(blockType). width(blockType,1). height(blockType,3).
        building(block1). type(block1,blockType).
        walkableTile(0,0). walkableTile(1,0). walkableTile(2,0). walkableTile(3,0). walkableTile(4,0).
        walkableTile(0,1). walkableTile(1,1). walkableTile(2,1). walkableTile(3,1). walkableTile(4,1).
        walkableTile(0,2). walkableTile(1,2). walkableTile(2,2). walkableTile(3,2). walkableTile(4,2).
        buildable(blockType,2,0).
        insideBase(4,1). outsideBase(0,1).";

    #[test]
    fn renders_bare_corridor() {
        let p = parse_problem(CORRIDOR3).unwrap();
        assert_eq!(render_ascii(&p, None), ".....\nO...I\n.....\n");
    }

    #[test]
    fn renders_placed_wall() {
        let p = parse_problem(CORRIDOR3).unwrap();
        let a = Assignment::new().with("block1", TileCoord::new(2, 0));
        assert_eq!(
            render_ascii(&p, Some(&a)),
            "..b..\nO.b.I\n..b..\nb: block1 at (2,0)\n"
        );
    }

    #[test]
    fn glyph_collisions_get_digits() {
        let mut p = parse_problem(CORRIDOR3).unwrap();
        p.add_type(BuildingTypeSpec::solid("unitType", 1, 1))
            .add_instance("bunker", "unitType")
            .add_instance("barracks", "unitType")
            .add_instance("zealot", "unitType");
        assert_eq!(glyphs(&p), ["b", "b1", "b2", "z"]);
        let a = Assignment::new()
            .with("block1", TileCoord::new(2, 0))
            .with("bunker", TileCoord::new(1, 0));
        let grid = render_ascii(&p, Some(&a));
        assert!(grid.starts_with(". b1b . . \n"), "{grid}");
    }

    #[test]
    fn bounding_box_includes_non_walkable_tiles() {
        let mut p = parse_problem(CORRIDOR3).unwrap();
        p.terrain.walkable.remove(&TileCoord::new(4, 2));
        p.terrain.walkable.insert(TileCoord::new(6, 0));
        assert_eq!(render_ascii(&p, None), ".....#.\nO...I##\n....###\n");
    }

    #[test]
    fn enemy_sizes() {
        assert_eq!(parse_enemy("16x16"), Ok((16, 16)));
        assert_eq!(parse_enemy("24X20"), Ok((24, 20)));
        for bad in ["16", "0x16", "ax2", "16x"] {
            assert!(parse_enemy(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn modes_parse() {
        assert_eq!("oracle".parse(), Ok(Mode::Oracle));
        assert!("fast".parse::<Mode>().is_err());
    }
}
