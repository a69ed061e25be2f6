use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

fn run(scene: &Path, out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polystrata"))
        .arg(scene)
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .expect("binary runs")
}

fn report(o: &Output) -> BTreeMap<String, String> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .filter_map(|l| l.split_once(": ").map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

#[test]
fn multiplication_by_two_is_not_saturated() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&scene("curves.scene"), dir.path(), &["map", "classify", "x2N", "--bound", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!(r["saturated"], "false");
    assert_eq!(r["saturated_witness"], "a=(1) b=(1) p=2");
    assert_eq!(r["integral"], "true");
    let file = std::fs::read_to_string(dir.path().join("map_x2N.report.txt")).unwrap();
    assert_eq!(file, String::from_utf8_lossy(&o.stdout));
}

#[test]
fn nodal_cubic_fiber_is_a_loop() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&scene("curves.scene"), dir.path(), &["fibration", "c", "nodal_cubic"]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    assert_eq!((r["cells"].as_str(), r["o_poset_size"].as_str()), ("3", "2"));
    assert!(dir.path().join("c_nodal_cubic.dot").exists());
}

#[test]
fn point_has_trivial_pi1() {
    let dir = tempfile::tempdir().unwrap();
    let r = report(&run(&scene("curves.scene"), dir.path(), &["pi1", "point_complex"]));
    assert_eq!((r["generators"].as_str(), r["abelianization"].as_str()), ("0", "1"));
}

#[test]
fn theta_and_tate() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("curves.scene");
    assert_eq!(report(&run(&s, dir.path(), &["pi1", "theta"]))["free_rank"], "2");
    assert_eq!(report(&run(&s, dir.path(), &["tempered", "lift", "tate3"]))["abelianization"], "Z x Z/3");
    assert_eq!(report(&run(&s, dir.path(), &["tempered", "cospec", "tate", "tate"]))["levelwise_isomorphism"], "true");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let curves = scene("curves.scene");
    let o = run(&curves, dir.path(), &["tempered", "cospec", "good", "tate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-commuting"));
    assert_eq!(run(&curves, dir.path(), &["pi1", "nosuch"]).status.code(), Some(2));
    assert_eq!(run(&curves, dir.path(), &["strata", "cospec", "pair", "top", "bottom"]).status.code(), Some(2));
    assert_eq!(run(&curves, dir.path(), &["map", "classify", "x2N", "--bound", "0"]).status.code(), Some(2));
    let o = run(&scene("cone.scene"), dir.path(), &["map", "classify", "fold", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(report(&o)["integral"], "undecided");
}

#[test]
fn scene_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.scene");
    std::fs::write(&bad, "monoid N free 1\n\nmap h N -> M [1]\n").unwrap();
    let o = run(&bad, dir.path(), &["monoid", "analyze", "N"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3: unknown monoid `M`"));
}

fn listing(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn outputs_are_deterministic() {
    let commands: [&[&str]; 5] = [
        &["poly", "realize", "torus"],
        &["strata", "cospec", "pair", "bottom", "0"],
        &["tempered", "tower", "tate"],
        &["monoid", "analyze", "N2"],
        &["fibration", "c", "pair"],
    ];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        for c in commands {
            assert_eq!(run(&scene("curves.scene"), dir.path(), c).status.code(), Some(0), "{c:?}");
        }
    }
    let (la, lb) = (listing(a.path()), listing(b.path()));
    assert!(la.len() >= 10);
    assert_eq!(la, lb);
}

#[test]
fn emitted_complexes_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let curves = scene("curves.scene");
    for id in ["torus", "loop", "theta"] {
        let o = run(&curves, dir.path(), &["poly", "realize", id]);
        assert_eq!(o.status.code(), Some(0));
        let hash = report(&run(&curves, dir.path(), &["poly", "o-poset", id]))["hash"].clone();
        let again = dir.path().join(format!("{id}.scene"));
        std::fs::write(&again, format!("complex c file realize_{id}.complex.txt\n")).unwrap();
        let r = report(&run(&again, dir.path(), &["poly", "o-poset", "c"]));
        assert_eq!(r["hash"], hash, "{id}");
        let before = std::fs::read_to_string(dir.path().join(format!("realize_{id}.complex.txt"))).unwrap();
        run(&again, dir.path(), &["poly", "realize", "c"]);
        let after = std::fs::read_to_string(dir.path().join("realize_c.complex.txt")).unwrap();
        assert_eq!(before, after, "{id}");
    }
}

#[test]
fn version_flag() {
    let o = Command::new(env!("CARGO_BIN_EXE_polystrata")).arg("--version").output().unwrap();
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("polystrata "));
}
