//! Scene files: one statement per line, `#` starts a comment. See
//! `SCENE.md` for the grammar.

use polystrata::complex::PolysimplicialSet;
use polystrata::fibration::{corpus, Block, DescentDatum, KetPiece, Overlap, PolystableChart};
use polystrata::lambda::LambdaObject;
use polystrata::monoid::{AffineMonoid, Face, MonoidMap};
use polystrata::tempered::{self, ExtensionPresentation, GaloisAction, TemperedTower};
use polystrata::group::PermGroup;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum SceneError {
    Parse { line: usize, msg: String },
    Reference { line: usize, name: String, kind: &'static str },
    Invalid { line: usize, entity: String, msg: String },
    Io { path: PathBuf, msg: String },
}

impl fmt::Display for SceneError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneError::Parse { line, msg } => write!(f, "line {line}: {msg}"),
            SceneError::Reference { line, name, kind } => write!(f, "line {line}: unknown {kind} `{name}`"),
            SceneError::Invalid { line, entity, msg } => write!(f, "line {line}: `{entity}`: {msg}"),
            SceneError::Io { path, msg } => write!(f, "{}: {msg}", path.display()),
        }
    }
}

impl std::error::Error for SceneError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerKind {
    Tate,
    Good,
}

#[derive(Clone, Debug)]
pub struct NamedTower {
    pub kind: TowerKind,
    pub tower: TemperedTower,
}

/// Everything a scene defines, by name. Entities are built as they are
/// read, so each one is validated before the next line is parsed.
#[derive(Debug, Default)]
pub struct Scene {
    pub monoids: BTreeMap<String, AffineMonoid>,
    pub maps: BTreeMap<String, MonoidMap>,
    pub charts: BTreeMap<String, PolystableChart>,
    pub pieces: BTreeMap<String, KetPiece>,
    pub descents: BTreeMap<String, DescentDatum>,
    pub complexes: BTreeMap<String, PolysimplicialSet>,
    pub actions: BTreeMap<String, ExtensionPresentation>,
    pub towers: BTreeMap<String, NamedTower>,
    /// Line on which each name was defined.
    names: BTreeMap<String, usize>,
}

struct Tokens<'a> {
    line: usize,
    items: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn err(&self, msg: impl Into<String>) -> SceneError {
        SceneError::Parse { line: self.line, msg: msg.into() }
    }

    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).copied()
    }

    fn next(&mut self, what: &str) -> Result<&'a str, SceneError> {
        let t = self.peek().ok_or_else(|| self.err(format!("expected {what}")))?;
        self.pos += 1;
        Ok(t)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), SceneError> {
        match self.next(&format!("`{kw}`"))? {
            t if t == kw => Ok(()),
            t => Err(self.err(format!("expected `{kw}`, found `{t}`"))),
        }
    }

    fn eat(&mut self, kw: &str) -> bool {
        if self.peek() == Some(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn nat(&mut self, what: &str) -> Result<usize, SceneError> {
        let t = self.next(what)?;
        t.parse().map_err(|_| self.err(format!("expected {what}, found `{t}`")))
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, SceneError> {
        let t = self.next(what)?;
        if is_ident(t) {
            Ok(t)
        } else {
            Err(self.err(format!("`{t}` is not a valid {what}")))
        }
    }

    /// `[ int* ]`, where the brackets may touch the numbers.
    fn vector(&mut self) -> Result<Vec<i64>, SceneError> {
        let mut out = Vec::new();
        let first = self.next("`[`")?;
        let mut cur = first.strip_prefix('[').ok_or_else(|| self.err(format!("expected `[`, found `{first}`")))?;
        loop {
            let (body, done) = match cur.strip_suffix(']') {
                Some(b) => (b, true),
                None => (cur, false),
            };
            if !body.is_empty() {
                out.push(body.parse().map_err(|_| self.err(format!("bad integer `{body}`")))?);
            }
            if done {
                return Ok(out);
            }
            cur = self.next("`]`")?;
        }
    }

    fn vectors(&mut self) -> Result<Vec<Vec<i64>>, SceneError> {
        let mut out = Vec::new();
        while self.peek().is_some_and(|t| t.starts_with('[')) {
            out.push(self.vector()?);
        }
        Ok(out)
    }

    fn nats(&mut self) -> Result<Vec<usize>, SceneError> {
        let mut out = Vec::new();
        while self.peek().is_some_and(|t| t.parse::<usize>().is_ok()) {
            out.push(self.nat("number")?);
        }
        Ok(out)
    }

    fn end(&self) -> Result<(), SceneError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.err(format!("unexpected `{t}`"))),
        }
    }
}

pub fn is_ident(t: &str) -> bool {
    let mut cs = t.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a face given on the command line or in a scene: `top`, `bottom`,
/// or generator indices such as `0,2` or `[0 2]`.
pub fn parse_face(m: &AffineMonoid, text: &str) -> Result<Face, String> {
    match text.trim() {
        "top" => return Ok(m.top_face()),
        "bottom" => return Ok(m.bottom_face()),
        _ => {}
    }
    let inner = text.trim().trim_start_matches(['[', '{']).trim_end_matches([']', '}']);
    let idx = inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| format!("bad face `{text}`")))
        .collect::<Result<Vec<_>, _>>()?;
    m.face(&idx).map_err(|e| e.to_string())
}

impl Scene {
    pub fn load(path: &Path) -> Result<Scene, SceneError> {
        let text = std::fs::read_to_string(path).map_err(|e| SceneError::Io { path: path.into(), msg: e.to_string() })?;
        Scene::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// `dir` resolves relative paths in `complex ... file` statements.
    pub fn parse(text: &str, dir: &Path) -> Result<Scene, SceneError> {
        let mut scene = Scene::default();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or("");
            let items: Vec<&str> = body.split_whitespace().collect();
            if items.is_empty() {
                continue;
            }
            let mut t = Tokens { line: i + 1, items, pos: 0 };
            scene.statement(&mut t, dir)?;
        }
        Ok(scene)
    }

    fn define(&mut self, t: &Tokens<'_>, name: &str) -> Result<(), SceneError> {
        if let Some(prev) = self.names.insert(name.to_string(), t.line) {
            return Err(t.err(format!("`{name}` is already defined on line {prev}")));
        }
        Ok(())
    }

    fn statement(&mut self, t: &mut Tokens<'_>, dir: &Path) -> Result<(), SceneError> {
        let line = t.line;
        let kw = t.next("a statement")?;
        let name = t.ident("name")?.to_string();
        let invalid = |e: polystrata::Error| SceneError::Invalid { line, entity: name.clone(), msg: e.to_string() };
        match kw {
            "monoid" => {
                let m = match t.next("`free`, `group` or `in`")? {
                    "free" => AffineMonoid::free(t.nat("rank")?),
                    "group" => AffineMonoid::group(t.nat("rank")?),
                    "in" => {
                        let dim = t.nat("ambient dimension")?;
                        let gens = t.vectors()?;
                        AffineMonoid::new(dim, gens).map_err(invalid)?
                    }
                    other => return Err(t.err(format!("unknown monoid form `{other}`"))),
                };
                t.end()?;
                self.define(t, &name)?;
                self.monoids.insert(name, m);
            }
            "map" => {
                let src = self.monoid(t)?;
                t.keyword("->")?;
                let dst = self.monoid(t)?;
                let rows = t.vectors()?;
                t.end()?;
                let h = MonoidMap::new(src, dst, rows).map_err(invalid)?;
                self.define(t, &name)?;
                self.maps.insert(name, h);
            }
            "chart" => {
                t.keyword("base")?;
                let base = self.monoid(t)?;
                let mut blocks = Vec::new();
                while t.eat("block") {
                    let n = t.nat("block size")?;
                    let a = t.vector()?;
                    blocks.push(Block { n, a });
                }
                t.end()?;
                let c = PolystableChart::new(base, blocks).map_err(invalid)?;
                self.define(t, &name)?;
                self.charts.insert(name, c);
            }
            "piece" => {
                t.keyword("chart")?;
                let chart = self.lookup(t, "chart", |s| &s.charts)?;
                let covering = if t.eat("cover") { Some(self.lookup(t, "map", |s| &s.maps)?) } else { None };
                let primes = if t.eat("primes") { t.nats()?.into_iter().map(|p| p as u64).collect() } else { Vec::new() };
                t.end()?;
                let p = KetPiece::new(chart, covering, primes).map_err(invalid)?;
                self.define(t, &name)?;
                self.pieces.insert(name, p);
            }
            "descent" => {
                let d = match t.next("`corpus` or `pieces`")? {
                    "corpus" => match t.next("corpus entry")? {
                        "cycle" => corpus::cycle(positive(t)?),
                        "banana" => corpus::banana(positive(t)?),
                        "theta" => corpus::theta(),
                        "nodal_cubic" => corpus::nodal_cubic(),
                        "smooth" => corpus::smooth(),
                        other => return Err(t.err(format!("unknown corpus entry `{other}`"))),
                    },
                    "pieces" => {
                        let mut pieces = Vec::new();
                        while t.peek().is_some() {
                            pieces.push(self.lookup(t, "piece", |s| &s.pieces)?);
                        }
                        DescentDatum { pieces, overlaps: Vec::new() }
                    }
                    other => return Err(t.err(format!("unknown descent form `{other}`"))),
                };
                t.end()?;
                self.define(t, &name)?;
                self.descents.insert(name, d);
            }
            "overlap" => {
                // `name` is the descent datum the overlap belongs to
                let left = t.nat("left piece index")?;
                let right = t.nat("right piece index")?;
                t.keyword("piece")?;
                let piece = self.lookup(t, "piece", |s| &s.pieces)?;
                t.keyword("left")?;
                let left_map = pairs(t, "right")?;
                t.keyword("right")?;
                let right_map = pairs(t, "")?;
                t.end()?;
                let d = self.descents.get_mut(&name).ok_or(SceneError::Reference { line, name: name.clone(), kind: "descent" })?;
                if left >= d.pieces.len() || right >= d.pieces.len() {
                    return Err(SceneError::Invalid { line, entity: name, msg: format!("piece index out of range ({} pieces)", d.pieces.len()) });
                }
                d.overlaps.push(Overlap { left, right, piece, left_map, right_map });
            }
            "complex" => {
                let c = match t.next("complex form")? {
                    "point" => PolysimplicialSet::point(),
                    "representable" => {
                        let dims = t.nats()?;
                        PolysimplicialSet::representable(&LambdaObject::new(dims).map_err(invalid)?)
                    }
                    "closed" => {
                        let d = self.lookup(t, "descent", |s| &s.descents)?;
                        d.glue(&AffineMonoid::free(1).bottom_face()).map_err(invalid)?.complex
                    }
                    "fiber" => {
                        let chart = self.lookup(t, "chart", |s| &s.charts)?;
                        let face = parse_face(&chart.base, t.next("face")?).map_err(|m| t.err(m))?;
                        chart.cell_strata(&face).map_err(invalid)?.0
                    }
                    "box" => {
                        let a = self.lookup(t, "complex", |s| &s.complexes)?;
                        let b = self.lookup(t, "complex", |s| &s.complexes)?;
                        PolysimplicialSet::box_product(&a, &b)
                    }
                    "union" => {
                        let a = self.lookup(t, "complex", |s| &s.complexes)?;
                        let b = self.lookup(t, "complex", |s| &s.complexes)?;
                        PolysimplicialSet::disjoint_union(&[("a", &a), ("b", &b)]).0
                    }
                    "file" => {
                        let path = dir.join(t.next("path")?);
                        let text = std::fs::read_to_string(&path).map_err(|e| SceneError::Io { path: path.clone(), msg: e.to_string() })?;
                        PolysimplicialSet::from_text(&text).map_err(invalid)?
                    }
                    other => return Err(t.err(format!("unknown complex form `{other}`"))),
                };
                t.end()?;
                self.define(t, &name)?;
                self.complexes.insert(name, c);
            }
            "action" => {
                let e = match t.next("action form")? {
                    "tate" => tempered::tate_level(t.nat("level")?).map_err(invalid)?,
                    "good" => tempered::good_level(positive(t)?).map_err(invalid)?,
                    "trivial" => {
                        let c = self.lookup(t, "complex", |s| &s.complexes)?;
                        tempered::lift_extension(GaloisAction::trivial(c, PermGroup::trivial()), None).map_err(invalid)?
                    }
                    other => return Err(t.err(format!("unknown action form `{other}`"))),
                };
                t.end()?;
                self.define(t, &name)?;
                self.actions.insert(name, e);
            }
            "tower" => {
                let kind = match t.next("`tate` or `good`")? {
                    "tate" => TowerKind::Tate,
                    "good" => TowerKind::Good,
                    other => return Err(t.err(format!("unknown tower kind `{other}`"))),
                };
                let ids = t.nats()?;
                t.end()?;
                if ids.is_empty() {
                    return Err(t.err("a tower needs at least one level"));
                }
                let tower = match kind {
                    TowerKind::Tate => tempered::tate_tower(&ids),
                    TowerKind::Good => tempered::good_tower(&ids),
                }
                .map_err(invalid)?;
                self.define(t, &name)?;
                self.towers.insert(name, NamedTower { kind, tower });
            }
            other => return Err(SceneError::Parse { line, msg: format!("unknown statement `{other}`") }),
        }
        Ok(())
    }

    fn monoid(&self, t: &mut Tokens<'_>) -> Result<AffineMonoid, SceneError> {
        self.lookup(t, "monoid", |s| &s.monoids)
    }

    fn lookup<T: Clone>(
        &self,
        t: &mut Tokens<'_>,
        kind: &'static str,
        table: impl Fn(&Scene) -> &BTreeMap<String, T>,
    ) -> Result<T, SceneError> {
        let name = t.ident(kind)?;
        table(self).get(name).cloned().ok_or(SceneError::Reference { line: t.line, name: name.into(), kind })
    }
}

fn positive(t: &mut Tokens<'_>) -> Result<usize, SceneError> {
    match t.nat("positive number")? {
        0 => Err(t.err("expected a positive number")),
        n => Ok(n),
    }
}

/// `a=b` tokens up to `stop` or the end of the line.
fn pairs(t: &mut Tokens<'_>, stop: &str) -> Result<Vec<(String, String)>, SceneError> {
    let mut out = Vec::new();
    while let Some(tok) = t.peek() {
        if tok == stop {
            break;
        }
        t.pos += 1;
        let (a, b) = tok.split_once('=').ok_or_else(|| t.err(format!("expected `cell=cell`, found `{tok}`")))?;
        out.push((a.to_string(), b.to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scene, SceneError> {
        Scene::parse(text, Path::new("."))
    }

    #[test]
    fn monoids_and_maps() {
        let s = parse("monoid N free 1\nmonoid C in 2 [1 0] [1 1] [1 2]  # a cone\nmap x2N N -> N [2]\n").unwrap();
        assert_eq!(s.monoids["C"].generators().len(), 3);
        assert_eq!(s.maps["x2N"].matrix, vec![vec![2]]);
    }

    #[test]
    fn touching_brackets() {
        let s = parse("monoid N2 in 2 [1 0] [ 0 1 ]\n").unwrap();
        assert_eq!(s.monoids["N2"].generators(), &[vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn errors_carry_lines_and_names() {
        let e = parse("monoid N free 1\nmap h N -> M [1]\n").unwrap_err();
        assert_eq!(e.to_string(), "line 2: unknown monoid `M`");
        let e = parse("monoid N free 1\nmonoid N free 2\n").unwrap_err();
        assert!(e.to_string().contains("already defined on line 1"));
        let e = parse("monoid N free 1\nmap h N -> N [-1]\n").unwrap_err();
        assert!(matches!(e, SceneError::Invalid { line: 2, .. }));
        assert!(parse("monoid N free x\n").is_err());
        assert!(parse("frobnicate x\n").is_err());
    }

    #[test]
    fn hand_built_descent_matches_corpus() {
        let text = "\
monoid N free 1
chart node base N block 1 [1]
chart pt base N
piece n chart node
piece p chart pt
descent loop pieces n
overlap loop 0 0 piece p left pt=s1 right pt=s0
descent ref corpus nodal_cubic
complex a closed loop
complex b closed ref
";
        let s = parse(text).unwrap();
        assert_eq!(s.complexes["a"].to_text(), s.complexes["b"].to_text());
    }

    #[test]
    fn faces() {
        let m = AffineMonoid::free(2);
        assert_eq!(parse_face(&m, "bottom").unwrap(), m.bottom_face());
        assert_eq!(parse_face(&m, "0,1").unwrap(), m.top_face());
        assert_eq!(parse_face(&m, "[1]").unwrap().generators, vec![1]);
        assert!(parse_face(&m, "x").is_err());
    }
}
