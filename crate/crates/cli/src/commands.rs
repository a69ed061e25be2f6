use crate::scene::{parse_face, Scene, TowerKind};
use polystrata::complex::PolysimplicialSet;
use polystrata::fibration::cospecialize_c;
use polystrata::monoid::{fmt_vec, SearchBounds, Verdict};
use polystrata::pi1::{pi1_presentation, two_skeleton};
use polystrata::poset::FinitePoset;
use polystrata::strata::cospecialize_strata;
use polystrata::tempered::{self, cospecialize_tower};
use std::fmt::Write as _;

/// Key/value report plus named artifacts.
#[derive(Default)]
pub struct Output {
    pub stem: String,
    pub report: Vec<(String, String)>,
    pub artifacts: Vec<(String, String)>,
    pub undecided: bool,
}

impl Output {
    fn new(stem: String) -> Output {
        Output { stem, ..Output::default() }
    }

    fn put(&mut self, key: &str, value: impl ToString) {
        self.report.push((key.to_string(), value.to_string()));
    }

    fn artifact(&mut self, suffix: &str, body: String) {
        self.artifacts.push((format!("{}.{suffix}", self.stem), body));
    }

    fn verdict(&mut self, key: &str, v: &Verdict) {
        match v {
            Verdict::Holds { bound } => {
                self.put(key, true);
                if let Some(b) = bound {
                    self.put(&format!("{key}_checked_to_degree"), b);
                }
            }
            Verdict::Fails(w) => {
                self.put(key, false);
                self.put(&format!("{key}_witness"), w);
            }
            Verdict::Undecided { bound } => {
                self.undecided = true;
                self.put(key, "undecided");
                self.put(&format!("{key}_bound"), bound);
            }
        }
    }

    pub fn report_text(&self) -> String {
        self.report.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }
}

/// Validation failures: unknown names, bad arguments, library errors.
#[derive(Debug)]
pub struct Invalid(pub String);

impl From<polystrata::Error> for Invalid {
    fn from(e: polystrata::Error) -> Invalid {
        Invalid(e.to_string())
    }
}

fn get<'a, T>(table: &'a std::collections::BTreeMap<String, T>, kind: &str, name: &str) -> Result<&'a T, Invalid> {
    table.get(name).ok_or_else(|| Invalid(format!("unknown {kind} `{name}`")))
}

/// A complex by name, or the closed fiber of a descent datum.
fn complex(scene: &Scene, name: &str) -> Result<PolysimplicialSet, Invalid> {
    if let Some(c) = scene.complexes.get(name) {
        return Ok(c.clone());
    }
    if let Some(d) = scene.descents.get(name) {
        return Ok(d.glue(&polystrata::monoid::AffineMonoid::free(1).bottom_face())?.complex);
    }
    Err(Invalid(format!("unknown complex or descent datum `{name}`")))
}

fn poset_text(p: &FinitePoset) -> String {
    let mut s = String::new();
    for (i, l) in p.labels.iter().enumerate() {
        let _ = writeln!(s, "element {i} {l}");
    }
    for (i, j) in p.covers() {
        let _ = writeln!(s, "cover {i} {j}");
    }
    s
}

pub fn monoid_analyze(scene: &Scene, id: &str) -> Result<Output, Invalid> {
    let m = get(&scene.monoids, "monoid", id)?;
    let mut out = Output::new(format!("monoid_{id}"));
    out.put("monoid", id);
    out.put("ambient_dim", m.ambient_dim());
    out.put("generators", m.generators().iter().map(|g| fmt_vec(g)).collect::<Vec<_>>().join(" "));
    out.put("rank", m.rank());
    out.put("sharp", m.is_sharp());
    let saturated = m.is_saturated()?;
    out.put("saturated", saturated);
    if !saturated {
        let s = m.saturate()?;
        out.put("saturation", s.generators().iter().map(|g| fmt_vec(g)).collect::<Vec<_>>().join(" "));
    }
    let faces = m.face_poset();
    out.put("faces", faces.len());
    let labels: Vec<String> = faces
        .faces
        .iter()
        .map(|f| format!("{{{}}} r={}", f.generators.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(","), m.face_rank(f)))
        .collect();
    for (i, l) in labels.iter().enumerate() {
        out.put(&format!("face_{i}"), l);
    }
    let poset = FinitePoset::new(labels, faces.order.clone());
    out.artifact("faces.txt", poset_text(&poset));
    out.artifact("faces.dot", poset.to_dot(id));
    Ok(out)
}

pub fn map_classify(scene: &Scene, id: &str, bound: Option<usize>, primes: Vec<u64>) -> Result<Output, Invalid> {
    let h = get(&scene.maps, "map", id)?;
    let c = h.classify(&SearchBounds { degree: bound, primes: primes.clone() });
    let mut out = Output::new(format!("map_{id}"));
    out.put("map", id);
    out.put("source", &h.source);
    out.put("target", &h.target);
    out.put("bound", c.bound);
    out.put("local", c.local);
    out.verdict("exact", &c.exact);
    out.put("kummer", c.kummer);
    if let Some(v) = &c.l_kummer {
        out.put("primes", primes.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","));
        out.verdict("l_kummer", v);
    }
    // only integrality and saturation decide the exit status
    out.undecided = false;
    out.verdict("integral", &c.integral);
    out.verdict("saturated", &c.saturated);
    Ok(out)
}

pub fn poly_o_poset(scene: &Scene, id: &str) -> Result<Output, Invalid> {
    let c = complex(scene, id)?;
    let o = c.cell_poset();
    let mut out = Output::new(format!("o_poset_{id}"));
    out.put("complex", id);
    out.put("cells", c.len());
    out.put("classes", o.poset.len());
    out.put("minimal", o.poset.minimal_elements().len());
    out.put("maximal", o.poset.maximal_elements().len());
    out.put("hash", o.poset.canonical_hash());
    out.artifact("txt", poset_text(&o.poset));
    out.artifact("dot", o.poset.to_dot(id));
    Ok(out)
}

pub fn poly_interior_free(scene: &Scene, id: &str) -> Result<Output, Invalid> {
    let c = complex(scene, id)?;
    let mut out = Output::new(format!("interior_free_{id}"));
    out.put("complex", id);
    match c.interior_fixed_point() {
        None => out.put("interiorly_free", true),
        Some((x, sigma)) => {
            out.put("interiorly_free", false);
            out.put("fixed_cell", c.name(x));
            out.put("fixed_by", sigma);
        }
    }
    Ok(out)
}

pub fn poly_realize(scene: &Scene, id: &str) -> Result<Output, Invalid> {
    let c = complex(scene, id)?;
    let sk = two_skeleton(&c);
    let mut out = Output::new(format!("realize_{id}"));
    out.put("complex", id);
    out.put("cells", c.len());
    out.put("dimension", c.dimension());
    for d in 0..=c.dimension() {
        out.put(&format!("cells_dim_{d}"), c.count_of_dimension(d));
    }
    out.put("euler_characteristic", c.euler_characteristic());
    out.put("components", sk.components().len());
    out.put("h1_rank", sk.h1_rank());
    out.put("subdivision", format!("{} vertices, {} edges, {} triangles", sk.vertex_count(), sk.edges.len(), sk.triangles.len()));
    out.artifact("complex.txt", c.to_text());
    out.artifact("skeleton.dot", sk.to_dot(id));
    Ok(out)
}

pub fn fibration_c(scene: &Scene, id: &str, face: Option<&str>) -> Result<Output, Invalid> {
    let (c, base_face) = if let Some(chart) = scene.charts.get(id) {
        let f = parse_face(&chart.base, face.unwrap_or("bottom")).map_err(Invalid)?;
        (chart.cell_strata(&f)?.0, f)
    } else if let Some(d) = scene.descents.get(id) {
        let base = polystrata::monoid::AffineMonoid::free(1);
        let f = parse_face(&base, face.unwrap_or("bottom")).map_err(Invalid)?;
        (d.glue(&f)?.complex, f)
    } else {
        return Err(Invalid(format!("unknown chart or descent datum `{id}`")));
    };
    let o = c.cell_poset();
    let mut out = Output::new(format!("c_{id}"));
    out.put("family", id);
    out.put("base_face", format!("{:?}", base_face.generators));
    out.put("cells", c.len());
    out.put("dimension", c.dimension());
    out.put("o_poset_size", o.poset.len());
    out.put("euler_characteristic", c.euler_characteristic());
    out.put("interiorly_free", c.is_interiorly_free());
    out.artifact("complex.txt", c.to_text());
    out.artifact("dot", c.to_dot(id));
    Ok(out)
}

pub fn strata_cospec(scene: &Scene, family: &str, f1: &str, f2: &str) -> Result<Output, Invalid> {
    let chart = get(&scene.charts, "chart", family)?;
    let f1 = parse_face(&chart.base, f1).map_err(Invalid)?;
    let f2 = parse_face(&chart.base, f2).map_err(Invalid)?;
    let s = cospecialize_strata(&chart.fiber_datum()?, &f1, &f2)?;
    let c = cospecialize_c(chart, &f1, &f2)?;
    let mut out = Output::new(format!("cospec_{family}"));
    out.put("family", family);
    out.put("from_face", format!("{:?}", f1.generators));
    out.put("to_face", format!("{:?}", f2.generators));
    out.put("source_strata", s.source.len());
    out.put("target_strata", s.target.len());
    for (i, &j) in s.map.iter().enumerate() {
        out.put(&format!("stratum_{i}"), format!("{} -> {}", s.source.poset.labels[i], s.target.poset.labels[j]));
    }
    out.put("c_morphism_iso", c.morphism.is_iso());
    out.artifact("dot", s.to_dot(family));
    Ok(out)
}

pub fn pi1(scene: &Scene, id: &str) -> Result<Output, Invalid> {
    let c = complex(scene, id)?;
    let sk = two_skeleton(&c);
    let p = pi1_presentation(&sk, None)?;
    let mut out = Output::new(format!("pi1_{id}"));
    let ab = p.presentation.abelianization();
    out.put("complex", id);
    out.put("basepoint", &sk.vertex_labels[p.basepoint]);
    out.put("generators", p.presentation.rank());
    out.put("relators", p.presentation.relators.len());
    out.put("free_rank", p.free_rank().map_or("-".to_string(), |r| r.to_string()));
    out.put("abelianization", &ab);
    out.put("h1_rank", sk.h1_rank());
    out.put("hash", p.presentation.hash());
    out.artifact("presentation.txt", p.presentation.to_text());
    out.artifact("skeleton.dot", sk.to_dot(id));
    Ok(out)
}

pub fn tempered_lift(scene: &Scene, id: &str) -> Result<Output, Invalid> {
    let e = get(&scene.actions, "action", id)?;
    let mut out = Output::new(format!("lift_{id}"));
    out.put("action", id);
    out.put("group_order", e.group().order());
    out.put("generators", e.presentation.rank());
    out.put("kernel_rank", e.kernel_rank());
    out.put("abelian", e.is_abelian());
    out.put("abelianization", e.abelianization());
    out.put("coset_index", e.coset_index.map_or("-".to_string(), |i| i.to_string()));
    out.put("hash", e.hash());
    out.artifact("presentation.txt", e.to_text());
    out.artifact("graph.dot", e.graph.to_dot(id));
    Ok(out)
}

pub fn tempered_tower(scene: &Scene, id: &str) -> Result<Output, Invalid> {
    let t = &get(&scene.towers, "tower", id)?.tower;
    let mut out = Output::new(format!("tower_{id}"));
    out.put("tower", id);
    out.put("levels", t.levels.iter().map(|l| l.id.to_string()).collect::<Vec<_>>().join(","));
    for l in &t.levels {
        out.put(&format!("level_{}", l.id), format!("order {} abelianization {}", l.extension.group().order(), l.extension.abelianization()));
    }
    out.put("connecting_maps", t.connecting.len());
    out.artifact("txt", t.report());
    Ok(out)
}

pub fn tempered_cospec(scene: &Scene, from: &str, to: &str) -> Result<Output, Invalid> {
    let a = get(&scene.towers, "tower", from)?;
    let b = get(&scene.towers, "tower", to)?;
    let maps = match (a.kind, b.kind) {
        (TowerKind::Tate, TowerKind::Good) => tempered::tate_to_good_maps(&a.tower)?,
        (TowerKind::Good, TowerKind::Tate) => tempered::good_to_tate_maps(&a.tower, &b.tower)?,
        _ => tempered::identity_maps(&a.tower),
    };
    let maps: Vec<_> = maps.into_iter().filter(|m| b.tower.level(m.target_level).is_some()).collect();
    if maps.is_empty() {
        return Err(Invalid(format!("towers `{from}` and `{to}` share no levels")));
    }
    let c = cospecialize_tower(&a.tower, &b.tower, &maps)?;
    let mut out = Output::new(format!("cospec_{from}_{to}"));
    out.put("from", from);
    out.put("to", to);
    for (s, t, m) in &c.levels {
        out.put(&format!("level_{s}"), format!("-> {t} iso {}", m.is_isomorphism()));
    }
    out.put("levelwise_isomorphism", c.is_levelwise_isomorphism());
    Ok(out)
}
