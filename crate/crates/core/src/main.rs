use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use wallin::cli::{parse_enemy, run, Mode, RunConfig};
use wallin::ReachMode;

/// Find building placements that wall in a chokepoint.
#[derive(Parser, Debug)]
#[command(name = "wallin", version)]
struct Args {
    /// Fact file describing types, buildings and terrain.
    #[arg(long)]
    problem: PathBuf,
    /// solve | emit | check | oracle
    #[arg(long, default_value = "solve")]
    mode: Mode,
    /// Print up to N walls.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    all: Option<u64>,
    /// Stop at the first wall instead of the narrowest.
    #[arg(long)]
    no_optimize: bool,
    /// literal | extended
    #[arg(long, default_value = "extended")]
    reach: ReachMode,
    /// Append an ASCII map.
    #[arg(long)]
    render: bool,
    /// Enemy unit size in pixels, e.g. 16x16.
    #[arg(long, value_name = "WxH", value_parser = parse_enemy)]
    enemy: Option<(u32, u32)>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = RunConfig {
        problem_path: args.problem,
        mode: args.mode,
        all_solutions: args.all.map(|n| n as usize),
        optimize: !args.no_optimize,
        reach_mode: args.reach,
        render: args.render,
        enemy_override: args.enemy,
    };
    let out = run(&cfg);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.exit_code as u8)
}
