//! Logic-program export and solver-answer import.
//!
//! [`emit_program`] writes the problem as a generate-and-test answer-set
//! program in the old clingo/lparse syntax, so an external solver can be used
//! to cross-check the native search. [`parse_answer`] reads that solver's
//! competition-style output back into assignments.

use std::fmt::Write as _;

use crate::error::AnswerError;
use crate::facts::{Atom, Scanner, Term};
use crate::grid::{Assignment, ReachMode, TileCoord, WallProblem};

const OVERLAP_CONSTRAINT: &str = ":- occupiedBy(B1,X,Y), occupiedBy(B2,X,Y), B1!=B2.\n";

const OCCUPIED_BY_RULE: &str = "\
occupiedBy(B,X2,Y2) :- place(B,X1,Y1),
                       type(B,BT), width(BT,Z), height(BT,Q),
                       X2 >= X1, X2 < X1+Z, Y2 >= Y1, Y2 < Y1+Q,
                       walkableTile(X2,Y2).
";

const GAP_RULES: &str = "\
verticalGap(X1,Y1,X2,Y2,G) :-
        occupiedBy(B1,X1,Y1), occupiedBy(B2,X2,Y2),
        B1 != B2, X1=X2, Y1=Y2-1, G=S1+S2,
        type(B1,T1), type(B2,T2), bottomGap(T1,S1), topGap(T2,S2).
verticalGap(X1,Y1,X2,Y2,G) :-
        occupiedBy(B1,X1,Y1), occupiedBy(B2,X2,Y2),
        B1 != B2, X1=X2, Y1=Y2+1, G=S1+S2,
        type(B1,T1), type(B2,T2), bottomGap(T2,S2), topGap(T1,S1).
horizontalGap(X1,Y1,X2,Y2,G) :-
        occupiedBy(B1,X1,Y1), occupiedBy(B2,X2,Y2),
        B1 != B2, X1=X2-1, Y1=Y2, G=S1+S2,
        type(B1,T1), type(B2,T2), rightGap(T1,S1), leftGap(T2,S2).
horizontalGap(X1,Y1,X2,Y2,G) :-
        occupiedBy(B1,X1,Y1), occupiedBy(B2,X2,Y2),
        B1 != B2, X1=X2+1, Y1=Y2, G=S1+S2,
        type(B1,T1), type(B2,T2), rightGap(T2,S2), leftGap(T1,S1).
";

const REACH_CONSTRAINT: &str = ":- insideBase(X2,Y2), outsideBase(X1,Y1), canReach(X2,Y2).\n";

const STEP_RULES: &str = "\
blocked(X,Y) :- occupiedBy(B,X,Y), building(B), walkableTile(X,Y).
canReach(X,Y) :- outsideBase(X,Y).
canReach(X2,Y) :-
      canReach(X1,Y), X1=X2+1, walkableTile(X1,Y), walkableTile(X2,Y),
      not blocked(X1,Y), not blocked(X2,Y).
canReach(X2,Y) :-
      canReach(X1,Y), X1=X2-1, walkableTile(X1,Y), walkableTile(X2,Y),
      not blocked(X1,Y), not blocked(X2,Y).
canReach(X,Y2) :-
      canReach(X,Y1), Y1=Y2+1, walkableTile(X,Y1), walkableTile(X,Y2),
      not blocked(X,Y1), not blocked(X,Y2).
canReach(X,Y2) :-
      canReach(X,Y1), Y1=Y2-1, walkableTile(X,Y1), walkableTile(X,Y2),
      not blocked(X,Y1), not blocked(X,Y2).
canReach(X2,Y2) :-
      canReach(X1,Y1), X1=X2+1, Y1=Y2+1, walkableTile(X1,Y1), walkableTile(X2,Y2),
      not blocked(X1,Y1), not blocked(X2,Y2).
canReach(X2,Y2) :-
      canReach(X1,Y1), X1=X2-1, Y1=Y2+1, walkableTile(X1,Y1), walkableTile(X2,Y2),
      not blocked(X1,Y1), not blocked(X2,Y2).
canReach(X2,Y2) :-
      canReach(X1,Y1), X1=X2+1, Y1=Y2-1, walkableTile(X1,Y1), walkableTile(X2,Y2),
      not blocked(X1,Y1), not blocked(X2,Y2).
canReach(X2,Y2) :-
      canReach(X1,Y1), X1=X2-1, Y1=Y2-1, walkableTile(X1,Y1), walkableTile(X2,Y2),
      not blocked(X1,Y1), not blocked(X2,Y2).
";

const SQUEEZE_RULES: &str = "\
canReach(X1,Y1) :- horizontalGap(X1,Y1,X2,Y1,G), G >= S, X2=X1+1, canReach(X1,Y3), Y3=Y1+1, enemyUnitX(S).
canReach(X1,Y1) :- horizontalGap(X1,Y1,X2,Y1,G), G >= S, X2=X1-1, canReach(X1,Y3), Y3=Y1+1, enemyUnitX(S).
canReach(X1,Y1) :- horizontalGap(X1,Y1,X2,Y1,G), G >= S, X2=X1+1, canReach(X1,Y3), Y3=Y1-1, enemyUnitX(S).
canReach(X1,Y1) :- horizontalGap(X1,Y1,X2,Y1,G), G >= S, X2=X1-1, canReach(X1,Y3), Y3=Y1-1, enemyUnitX(S).
canReach(X1,Y1) :- verticalGap(X1,Y1,X1,Y2,G), G >= S, Y2=Y1+1, canReach(X3,Y1), X3=X1-1, enemyUnitY(S).
canReach(X1,Y1) :- verticalGap(X1,Y1,X1,Y2,G), G >= S, Y2=Y1-1, canReach(X3,Y1), X3=X1-1, enemyUnitY(S).
canReach(X1,Y1) :- verticalGap(X1,Y1,X1,Y2,G), G >= S, Y2=Y1+1, canReach(X3,Y1), X3=X1+1, enemyUnitY(S).
canReach(X1,Y1) :- verticalGap(X1,Y1,X1,Y2,G), G >= S, Y2=Y1-1, canReach(X3,Y1), X3=X1+1, enemyUnitY(S).
";

/// Lets a squeeze corridor come back out into free terrain.
const EXIT_RULES: &str = "\
canReach(X1,Y3) :- canReach(X1,Y1), horizontalGap(X1,Y1,X2,Y1,G), G >= S, enemyUnitX(S), Y3=Y1+1, walkableTile(X1,Y3), not blocked(X1,Y3).
canReach(X1,Y3) :- canReach(X1,Y1), horizontalGap(X1,Y1,X2,Y1,G), G >= S, enemyUnitX(S), Y3=Y1-1, walkableTile(X1,Y3), not blocked(X1,Y3).
canReach(X3,Y1) :- canReach(X1,Y1), verticalGap(X1,Y1,X1,Y2,G), G >= S, enemyUnitY(S), X3=X1+1, walkableTile(X3,Y1), not blocked(X3,Y1).
canReach(X3,Y1) :- canReach(X1,Y1), verticalGap(X1,Y1,X1,Y2,G), G >= S, enemyUnitY(S), X3=X1-1, walkableTile(X3,Y1), not blocked(X3,Y1).
";

const MINIMIZE: &str = "\
#minimize [verticalGap(X1,Y1,X2,Y2,G) = G ].
#minimize [horizontalGap(X1,Y1,X2,Y2,G) = G ].
";

/// The full logic program for `p`. Output depends only on the problem's
/// content, never on the order its facts were read in.
pub fn emit_program(p: &WallProblem, include_optimization: bool) -> String {
    let mut out = String::new();
    let w = &mut out;
    let canon = p.canonical();

    w.push_str("% building types\n");
    for name in canon.types.keys() {
        let _ = writeln!(w, "buildingType({name}).");
    }
    for (name, s) in &canon.types {
        let _ = writeln!(w, "width({name},{}).", s.width);
        let _ = writeln!(w, "height({name},{}).", s.height);
    }
    for (name, s) in &canon.types {
        let _ = writeln!(w, "leftGap({name},{}).", s.left_gap);
        let _ = writeln!(w, "rightGap({name},{}).", s.right_gap);
        let _ = writeln!(w, "topGap({name},{}).", s.top_gap);
        let _ = writeln!(w, "bottomGap({name},{}).", s.bottom_gap);
    }

    w.push_str("\n% building instances\n");
    for inst in &canon.instances {
        let _ = writeln!(w, "building({}).", inst.name);
        let _ = writeln!(w, "type({},{}).", inst.name, inst.type_name);
    }
    if let Some(stages) = &canon.stages {
        for (k, members) in stages {
            for name in members {
                let _ = writeln!(w, "stage({k},{name}).");
            }
        }
    }

    w.push_str("\n% no two buildings on one tile\n");
    w.push_str(OVERLAP_CONSTRAINT);
    w.push_str(OCCUPIED_BY_RULE);
    w.push_str("\n% seams between adjacent tiles of different buildings\n");
    w.push_str(GAP_RULES);

    w.push_str("\n% terrain\n");
    let mut walkable: Vec<TileCoord> = canon.terrain.walkable.iter().copied().collect();
    walkable.sort_by_key(|t| t.row_major());
    for t in walkable {
        let _ = writeln!(w, "walkableTile({},{}).", t.x, t.y);
    }
    let mut buildable: Vec<(TileCoord, &str)> = canon
        .terrain
        .buildable
        .iter()
        .flat_map(|(ty, set)| set.iter().map(move |t| (*t, ty.as_str())))
        .collect();
    buildable.sort_by_key(|(t, ty)| (t.row_major(), *ty));
    for (t, ty) in buildable {
        let _ = writeln!(w, "buildable({ty},{},{}).", t.x, t.y);
    }
    let (i, o) = (canon.terrain.inside_base, canon.terrain.outside_base);
    let _ = writeln!(w, "insideBase({},{}).", i.x, i.y);
    let _ = writeln!(w, "outsideBase({},{}).", o.x, o.y);

    w.push_str("\n% the inside anchor must be unreachable\n");
    w.push_str(REACH_CONSTRAINT);
    w.push_str(STEP_RULES);
    w.push_str(SQUEEZE_RULES);
    if canon.reach_mode == ReachMode::Extended {
        w.push_str(EXIT_RULES);
    }
    let _ = writeln!(w, "enemyUnitX({}).", canon.enemy_width_px);
    let _ = writeln!(w, "enemyUnitY({}).", canon.enemy_height_px);

    w.push_str("\n% one position per building\n");
    for inst in &canon.instances {
        let _ = writeln!(
            w,
            "1[place({},X,Y) : buildable({},X,Y)]1.",
            inst.name, inst.type_name
        );
    }

    if include_optimization {
        w.push_str("\n% narrowest seams first\n");
        w.push_str(MINIMIZE);
    }
    out
}

/// Only the fact lines of an emitted program, in their original order.
pub fn extract_facts(program: &str) -> String {
    program
        .lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_lowercase()) && !l.contains(":-"))
        .fold(String::new(), |mut acc, l| {
            acc.push_str(l);
            acc.push('\n');
            acc
        })
}

/// `place(name,x,y)` terms in the problem's declaration order; instances
/// the assignment does not place are left out.
pub fn format_answer_line(p: &WallProblem, assign: &Assignment) -> String {
    p.instances
        .iter()
        .filter_map(|i| {
            assign
                .get(&i.name)
                .map(|t| format!("place({},{},{})", i.name, t.x, t.y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnswerStatus {
    Optimum,
    Satisfiable,
    Unsatisfiable,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnswerParse {
    pub assignments: Vec<Assignment>,
    /// Values of the last `Optimization:` line, in the order printed.
    pub optimization_values: Vec<i64>,
    pub status: AnswerStatus,
}

fn status_of(line: &str) -> Option<AnswerStatus> {
    Some(match line {
        "OPTIMUM FOUND" => AnswerStatus::Optimum,
        "SATISFIABLE" => AnswerStatus::Satisfiable,
        "UNSATISFIABLE" => AnswerStatus::Unsatisfiable,
        "UNKNOWN" => AnswerStatus::Unknown,
        _ => return None,
    })
}

/// Atoms of a whitespace-separated atom line, or `None` when the line is
/// not one.
fn atoms(line: &str) -> Option<Result<Vec<Atom>, String>> {
    let mut sc = Scanner::new(line);
    let mut out = Vec::new();
    loop {
        sc.skip_trivia();
        if sc.at_end() {
            return Some(Ok(out));
        }
        match sc.atom() {
            Ok(a) => out.push(a),
            // solver banners and the like; only complain about broken place terms
            Err(e) if line.contains("place(") => return Some(Err(e)),
            Err(_) => return None,
        }
    }
}

fn placement(atom: &Atom) -> Result<(String, TileCoord), String> {
    let coord = |t: &Term| match t {
        Term::Int(v) if (0..=i32::MAX as i64).contains(v) => Ok(*v as i32),
        Term::Int(v) => Err(format!("coordinate {v} out of range")),
        Term::Id(s) => Err(format!("coordinate `{s}` is not an integer")),
    };
    match atom.args.as_slice() {
        [Term::Id(name), x, y] => Ok((name.clone(), TileCoord::new(coord(x)?, coord(y)?))),
        _ => Err("expected place(NAME,X,Y)".into()),
    }
}

/// Reads solver output: optional `Answer: N` headers, lines of atoms,
/// `Optimization:` lines and a final status line. Atoms other than
/// `place/3` are skipped.
pub fn parse_answer(text: &str) -> Result<AnswerParse, AnswerError> {
    let mut assignments = Vec::new();
    let mut optimization_values = Vec::new();
    let mut status = AnswerStatus::Unknown;
    let mut pending_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |msg: String| AnswerError { line: line_no, msg };
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("Answer:") {
            if pending_header {
                assignments.push(Assignment::new());
            }
            pending_header = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("Optimization:") {
            optimization_values = rest
                .split_whitespace()
                .map(|v| {
                    v.parse::<i64>()
                        .map_err(|_| err(format!("optimization value `{v}` is not an integer")))
                })
                .collect::<Result<_, _>>()?;
        } else if let Some(s) = status_of(line) {
            status = s;
        } else if line.starts_with(|c: char| c.is_ascii_lowercase()) {
            let Some(parsed) = atoms(line) else { continue };
            let parsed = parsed.map_err(err)?;
            let mut assign = Assignment::new();
            for atom in parsed.iter().filter(|a| a.name == "place") {
                let (name, at) = placement(atom).map_err(err)?;
                if assign.get(&name).is_some_and(|old| old != at) {
                    return Err(err(format!("`{name}` placed twice")));
                }
                assign.place(&name, at);
            }
            assignments.push(assign);
            pending_header = false;
            continue;
        }
        if pending_header {
            assignments.push(Assignment::new());
            pending_header = false;
        }
    }
    if pending_header {
        assignments.push(Assignment::new());
    }
    if status == AnswerStatus::Unsatisfiable && !assignments.is_empty() {
        return Err(AnswerError {
            line: text.lines().count(),
            msg: "answers reported for an unsatisfiable program".into(),
        });
    }
    Ok(AnswerParse {
        assignments,
        optimization_values,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facts::parse_problem;

    const FIG4: &str = "Answer: 1
place(zealot,126,23) place(pylon,122,22) place(gateway,118,23) place(forge,124,23)
Optimization: 42 0
OPTIMUM FOUND
";

    fn t(x: i32, y: i32) -> TileCoord {
        TileCoord::new(x, y)
    }

    #[test]
    fn reads_reference_answer() {
        let a = parse_answer(FIG4).unwrap();
        assert_eq!(a.status, AnswerStatus::Optimum);
        assert_eq!(a.optimization_values, vec![42, 0]);
        assert_eq!(
            a.assignments,
            vec![Assignment::new()
                .with("zealot", t(126, 23))
                .with("pylon", t(122, 22))
                .with("gateway", t(118, 23))
                .with("forge", t(124, 23))]
        );
    }

    #[test]
    fn unsatisfiable_and_multiple_answers() {
        let a = parse_answer("UNSATISFIABLE\n").unwrap();
        assert!(a.assignments.is_empty());
        assert_eq!(a.status, AnswerStatus::Unsatisfiable);

        let text = "Answer: 1\nplace(a,1,2)\nAnswer: 2\nplace(a,3,4) canReach(0,0)\nSATISFIABLE\n";
        let a = parse_answer(text).unwrap();
        assert_eq!(a.status, AnswerStatus::Satisfiable);
        assert_eq!(
            a.assignments,
            vec![
                Assignment::new().with("a", t(1, 2)),
                Assignment::new().with("a", t(3, 4))
            ]
        );
        assert!(a.optimization_values.is_empty());
    }

    #[test]
    fn skips_banners_and_empty_answers() {
        let text = "clingo version 3.0.5\nReading from stdin\nAnswer: 1\n\nSATISFIABLE\n\nModels      : 1\n";
        let a = parse_answer(text).unwrap();
        assert_eq!(a.assignments, vec![Assignment::new()]);
    }

    #[test]
    fn malformed_place_terms() {
        for bad in [
            "place(a,b,1)\n",
            "place(a,1)\n",
            "place(a,1,2\n",
            "place(a,-1,2)\n",
            "place(a,1,2) place(a,2,2)\n",
            "Optimization: 4x\n",
        ] {
            assert!(parse_answer(bad).is_err(), "{bad}");
        }
    }

    fn sample() -> WallProblem {
        parse_problem(
            "buildingType(blockType). width(blockType,1). height(blockType,3).
             building(block1). type(block1,blockType).
             walkableTile(0,0). walkableTile(1,0). walkableTile(0,1). walkableTile(1,1).
             buildable(blockType,1,0).
             insideBase(1,1). outsideBase(0,0).",
        )
        .unwrap()
    }

    #[test]
    fn program_layout() {
        let p = sample();
        let prog = emit_program(&p, true);
        assert!(prog.contains("1[place(block1,X,Y) : buildable(blockType,X,Y)]1."));
        assert!(prog.contains(":- occupiedBy(B1,X,Y), occupiedBy(B2,X,Y), B1!=B2."));
        assert_eq!(prog.matches("#minimize").count(), 2);
        assert!(!emit_program(&p, false).contains("#minimize"));
        assert!(prog.contains("walkableTile(0,0).\nwalkableTile(1,0).\nwalkableTile(0,1)."));
        assert!(prog.is_ascii());

        let rule_heads = |prog: &str| prog.lines().filter(|l| l.starts_with("canReach(")).count();
        let mut literal = p.clone();
        literal.reach_mode = ReachMode::Literal;
        assert_eq!(rule_heads(&emit_program(&literal, true)), 1 + 8 + 8);
        assert_eq!(rule_heads(&prog), 1 + 8 + 8 + 4);
    }

    #[test]
    fn fact_section_round_trips() {
        let p = sample();
        let back = parse_problem(&extract_facts(&emit_program(&p, true))).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn answer_line_round_trips() {
        let p = sample();
        let a = Assignment::new().with("block1", t(1, 0));
        let line = format_answer_line(&p, &a);
        assert_eq!(line, "place(block1,1,0)");
        assert_eq!(parse_answer(&line).unwrap().assignments, vec![a]);
    }
}
