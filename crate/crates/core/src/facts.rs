//! Reader for problem fact files.
//!
//! One fact per statement, terminated by `.`; `%` starts a comment running to
//! the end of the line. Facts may appear in any order.
//!
//! ```text
//! buildingType(ID). width(ID,INT). height(ID,INT).
//! leftGap(ID,INT). rightGap(ID,INT). topGap(ID,INT). bottomGap(ID,INT).
//! building(ID). type(ID,ID).
//! walkableTile(INT,INT). buildable(ID,INT,INT).
//! insideBase(INT,INT). outsideBase(INT,INT).
//! enemyUnitX(INT). enemyUnitY(INT).
//! stage(INT,ID).
//! place(ID,INT,INT).
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::error::ProblemError;
use crate::grid::{
    Assignment, BuildingInstance, BuildingTypeSpec, TerrainWindow, TileCoord, WallProblem,
    DEFAULT_ENEMY_PX,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Term {
    Id(String),
    Int(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Atom {
    pub name: String,
    pub args: Vec<Term>,
}

pub(crate) fn is_id_start(c: char) -> bool {
    c.is_ascii_lowercase()
}

pub(crate) fn is_id_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Cursor over fact text that tracks line numbers.
pub(crate) struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    pub line: usize,
}

impl<'a> Scanner<'a> {
    pub fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    /// Skips whitespace and `%` comments.
    pub fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c == '%' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c == ' ' || c == '\t') {
            self.bump();
        }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn ident(&mut self) -> Result<String, String> {
        match self.peek() {
            Some(c) if is_id_start(c) => {}
            Some(c) => return Err(format!("expected identifier, found `{c}`")),
            None => return Err("expected identifier, found end of input".into()),
        }
        let start = self.pos;
        while matches!(self.peek(), Some(c) if is_id_char(c)) {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn term(&mut self) -> Result<Term, String> {
        match self.peek() {
            Some(c) if is_id_start(c) => self.ident().map(Term::Id),
            Some(c) if c == '-' || c == '+' || c.is_ascii_digit() => {
                let start = self.pos;
                self.bump();
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
                let text = &self.src[start..self.pos];
                text.parse::<i64>()
                    .map(Term::Int)
                    .map_err(|_| format!("malformed integer `{text}`"))
            }
            Some(c) => Err(format!("expected identifier or integer, found `{c}`")),
            None => Err("expected identifier or integer, found end of input".into()),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), String> {
        match self.peek() {
            Some(c) if c == want => {
                self.bump();
                Ok(())
            }
            Some(c) => Err(format!("expected `{want}`, found `{c}`")),
            None => Err(format!("expected `{want}`, found end of input")),
        }
    }

    /// `name` or `name(t1,...,tn)`, with optional blanks around arguments.
    pub fn atom(&mut self) -> Result<Atom, String> {
        let name = self.ident()?;
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.bump();
            loop {
                self.skip_inline_ws();
                args.push(self.term()?);
                self.skip_inline_ws();
                match self.bump() {
                    Some(',') => continue,
                    Some(')') => break,
                    Some(c) => return Err(format!("expected `,` or `)`, found `{c}`")),
                    None => return Err("unterminated argument list".into()),
                }
            }
        }
        Ok(Atom { name, args })
    }

    /// An atom followed by the terminating `.`.
    pub fn fact(&mut self) -> Result<Atom, String> {
        let atom = self.atom()?;
        self.skip_inline_ws();
        self.expect('.')?;
        Ok(atom)
    }
}

struct Located {
    atom: Atom,
    line: usize,
}

fn syntax(line: usize, msg: impl Into<String>) -> ProblemError {
    ProblemError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn invalid(line: usize, msg: impl Into<String>) -> ProblemError {
    ProblemError::InvalidValue {
        line,
        msg: msg.into(),
    }
}

/// Expected argument kinds per fact name: `i` identifier, `n` integer.
fn signature(name: &str) -> Option<&'static str> {
    Some(match name {
        "buildingType" | "building" => "i",
        "width" | "height" | "leftGap" | "rightGap" | "topGap" | "bottomGap" => "in",
        "type" => "ii",
        "walkableTile" | "insideBase" | "outsideBase" => "nn",
        "buildable" | "place" => "inn",
        "enemyUnitX" | "enemyUnitY" => "n",
        "stage" => "ni",
        _ => return None,
    })
}

fn lex(text: &str) -> Result<Vec<Located>, ProblemError> {
    let mut sc = Scanner::new(text);
    let mut out = Vec::new();
    loop {
        sc.skip_trivia();
        if sc.at_end() {
            return Ok(out);
        }
        let line = sc.line;
        let atom = sc.fact().map_err(|m| syntax(sc.line, m))?;
        let Some(sig) = signature(&atom.name) else {
            return Err(syntax(line, format!("unknown fact `{}`", atom.name)));
        };
        let ok = sig.len() == atom.args.len()
            && sig
                .chars()
                .zip(&atom.args)
                .all(|(k, a)| matches!((k, a), ('i', Term::Id(_)) | ('n', Term::Int(_))));
        if !ok {
            return Err(syntax(
                line,
                format!("`{}` expects arguments ({})", atom.name, describe(sig)),
            ));
        }
        out.push(Located { atom, line });
    }
}

fn describe(sig: &str) -> String {
    sig.chars()
        .map(|c| if c == 'i' { "ID" } else { "INT" })
        .collect::<Vec<_>>()
        .join(",")
}

fn id(t: &Term) -> &str {
    match t {
        Term::Id(s) => s,
        Term::Int(_) => unreachable!("checked by signature"),
    }
}

fn int(t: &Term) -> i64 {
    match t {
        Term::Int(n) => *n,
        Term::Id(_) => unreachable!("checked by signature"),
    }
}

fn coord(line: usize, x: &Term, y: &Term) -> Result<TileCoord, ProblemError> {
    let (x, y) = (int(x), int(y));
    let ok = |v: i64| (0..=i32::MAX as i64).contains(&v);
    if !ok(x) || !ok(y) {
        return Err(invalid(
            line,
            format!("tile ({x},{y}) must have non-negative coordinates"),
        ));
    }
    Ok(TileCoord::new(x as i32, y as i32))
}

/// Stores `value` in `slot`, rejecting a conflicting earlier value.
fn set_once<T: PartialEq + std::fmt::Debug>(
    slot: &mut Option<T>,
    value: T,
    line: usize,
    what: impl FnOnce() -> String,
) -> Result<(), ProblemError> {
    match slot {
        Some(old) if *old != value => Err(ProblemError::Duplicate { line, what: what() }),
        _ => {
            *slot = Some(value);
            Ok(())
        }
    }
}

#[derive(Default)]
struct TypeDraft {
    line: usize,
    width: Option<i64>,
    height: Option<i64>,
    gaps: [Option<i64>; 4],
}

/// Parses a fact file. `place` facts are accepted and ignored; see
/// [`parse_document`] to read them.
pub fn parse_problem(text: &str) -> Result<WallProblem, ProblemError> {
    parse_document(text).map(|(p, _)| p)
}

/// Parses a fact file together with any `place(ID,X,Y)` facts it carries.
pub fn parse_document(text: &str) -> Result<(WallProblem, Assignment), ProblemError> {
    let facts = lex(text)?;

    // Pass 1: declarations.
    let mut drafts: BTreeMap<String, TypeDraft> = BTreeMap::new();
    let mut building_lines: BTreeMap<String, usize> = BTreeMap::new();
    let mut declared_order: Vec<String> = Vec::new();
    for f in &facts {
        let a = &f.atom;
        match a.name.as_str() {
            "buildingType" => {
                let name = id(&a.args[0]).to_string();
                if drafts.contains_key(&name) {
                    return Err(ProblemError::Duplicate {
                        line: f.line,
                        what: format!("building type `{name}`"),
                    });
                }
                drafts.insert(
                    name,
                    TypeDraft {
                        line: f.line,
                        ..Default::default()
                    },
                );
            }
            "building" => {
                let name = id(&a.args[0]).to_string();
                if building_lines.insert(name.clone(), f.line).is_some() {
                    return Err(ProblemError::Duplicate {
                        line: f.line,
                        what: format!("building `{name}`"),
                    });
                }
                declared_order.push(name);
            }
            _ => {}
        }
    }

    let mut instance_types: BTreeMap<String, Option<String>> =
        building_lines.keys().map(|k| (k.clone(), None)).collect();
    let mut terrain_walkable = BTreeSet::new();
    let mut buildable: BTreeMap<String, BTreeSet<TileCoord>> = BTreeMap::new();
    let mut inside = None;
    let mut outside = None;
    let mut enemy_x = None;
    let mut enemy_y = None;
    let mut stages: BTreeMap<u32, BTreeSet<String>> = BTreeMap::new();
    let mut places: BTreeMap<String, Option<TileCoord>> = BTreeMap::new();

    fn known_type(
        drafts: &BTreeMap<String, TypeDraft>,
        name: &str,
        line: usize,
    ) -> Result<(), ProblemError> {
        if drafts.contains_key(name) {
            Ok(())
        } else {
            Err(ProblemError::UnknownType {
                line,
                name: name.to_string(),
            })
        }
    }

    // Pass 2: everything that refers to a declaration.
    for f in &facts {
        let (a, line) = (&f.atom, f.line);
        match a.name.as_str() {
            "buildingType" | "building" => {}
            attr @ ("width" | "height" | "leftGap" | "rightGap" | "topGap" | "bottomGap") => {
                let ty = id(&a.args[0]);
                known_type(&drafts, ty, line)?;
                let v = int(&a.args[1]);
                let draft = drafts.get_mut(ty).expect("checked above");
                let slot = match attr {
                    "width" => &mut draft.width,
                    "height" => &mut draft.height,
                    "leftGap" => &mut draft.gaps[0],
                    "rightGap" => &mut draft.gaps[1],
                    "topGap" => &mut draft.gaps[2],
                    _ => &mut draft.gaps[3],
                };
                set_once(slot, v, line, || format!("conflicting {attr} for `{ty}`"))?;
            }
            "type" => {
                let (inst, ty) = (id(&a.args[0]), id(&a.args[1]));
                known_type(&drafts, ty, line)?;
                let Some(slot) = instance_types.get_mut(inst) else {
                    return Err(ProblemError::Incomplete(format!(
                        "line {line}: type given for undeclared building `{inst}`"
                    )));
                };
                set_once(slot, ty.to_string(), line, || {
                    format!("conflicting type for building `{inst}`")
                })?;
            }
            "walkableTile" => {
                terrain_walkable.insert(coord(line, &a.args[0], &a.args[1])?);
            }
            "buildable" => {
                let ty = id(&a.args[0]);
                known_type(&drafts, ty, line)?;
                let at = coord(line, &a.args[1], &a.args[2])?;
                buildable.entry(ty.to_string()).or_default().insert(at);
            }
            "insideBase" => {
                let at = coord(line, &a.args[0], &a.args[1])?;
                set_once(&mut inside, at, line, || "conflicting insideBase".into())?;
            }
            "outsideBase" => {
                let at = coord(line, &a.args[0], &a.args[1])?;
                set_once(&mut outside, at, line, || "conflicting outsideBase".into())?;
            }
            dim @ ("enemyUnitX" | "enemyUnitY") => {
                let v = int(&a.args[0]);
                if v <= 0 || v > u32::MAX as i64 {
                    return Err(invalid(line, format!("{dim} must be positive, got {v}")));
                }
                let slot = if dim == "enemyUnitX" {
                    &mut enemy_x
                } else {
                    &mut enemy_y
                };
                set_once(slot, v as u32, line, || format!("conflicting {dim}"))?;
            }
            "stage" => {
                let k = int(&a.args[0]);
                if k < 1 || k > u32::MAX as i64 {
                    return Err(invalid(line, format!("stage number must be >= 1, got {k}")));
                }
                stages
                    .entry(k as u32)
                    .or_default()
                    .insert(id(&a.args[1]).to_string());
            }
            "place" => {
                let inst = id(&a.args[0]).to_string();
                let at = coord(line, &a.args[1], &a.args[2])?;
                let slot = places.entry(inst.clone()).or_default();
                set_once(slot, at, line, || format!("conflicting place for `{inst}`"))?;
            }
            other => unreachable!("`{other}` passed the signature check"),
        }
    }

    let mut types = BTreeMap::new();
    for (name, d) in drafts {
        let dims = |v: Option<i64>, what: &str| -> Result<u32, ProblemError> {
            let v = v.ok_or_else(|| {
                ProblemError::Incomplete(format!("building type `{name}` has no {what}"))
            })?;
            if v < 1 || v > u32::MAX as i64 {
                return Err(invalid(
                    d.line,
                    format!("{what} of `{name}` must be >= 1, got {v}"),
                ));
            }
            Ok(v as u32)
        };
        let width = dims(d.width, "width")?;
        let height = dims(d.height, "height")?;
        let mut gaps = [0i32; 4];
        for (g, v) in gaps.iter_mut().zip(d.gaps) {
            let v = v.unwrap_or(0);
            *g = i32::try_from(v)
                .map_err(|_| invalid(d.line, format!("gap {v} of `{name}` out of range")))?;
        }
        types.insert(
            name.clone(),
            BuildingTypeSpec::with_gaps(name, width, height, gaps),
        );
    }

    let mut instances = Vec::with_capacity(declared_order.len());
    for name in declared_order {
        let ty = instance_types[&name]
            .clone()
            .ok_or_else(|| ProblemError::Incomplete(format!("building `{name}` has no type")))?;
        instances.push(BuildingInstance::new(name, ty));
    }

    let inside = inside.ok_or(ProblemError::MissingAnchor("insideBase"))?;
    let outside = outside.ok_or(ProblemError::MissingAnchor("outsideBase"))?;
    let terrain = TerrainWindow {
        walkable: terrain_walkable,
        buildable,
        inside_base: inside,
        outside_base: outside,
    };

    let mut assignment = Assignment::new();
    for (name, at) in places {
        assignment.place(&name, at.expect("set when inserted"));
    }

    let problem = WallProblem {
        types,
        instances,
        terrain,
        enemy_width_px: enemy_x.unwrap_or(DEFAULT_ENEMY_PX),
        enemy_height_px: enemy_y.unwrap_or(DEFAULT_ENEMY_PX),
        stages: (!stages.is_empty()).then_some(stages),
        reach_mode: Default::default(),
    };
    Ok((problem, assignment))
}
