use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use repack_core::geom::{validate_packing, Tolerance};
use repack_core::io::parse_instance;

fn dir(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn repack(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repack")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn corridor_needs_one_relocation() {
    let d = dir("corridor");
    let inst = d.join("c.json");
    let wit = d.join("w.json");
    let o = repack(&["gen", "corridor", "--length", "9", "--ys", "1,4.5,8", "--h", "0", "--k", "1", "--out", s(&inst)]);
    assert!(o.status.success(), "{o:?}");

    let no = repack(&["solve", "--instance", s(&inst)]);
    assert_eq!(no.status.code(), Some(2));
    assert_eq!(stdout(&no).trim(), "NO");

    let yes = repack(&["solve", "--instance", s(&inst), "--h", "1", "--out", s(&wit)]);
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout(&yes).trim(), "YES");

    // The witness relocates one disk, so it only verifies against the h=1 budget.
    let inst1 = d.join("c1.json");
    assert!(repack(&["gen", "corridor", "--length", "9", "--ys", "1,4.5,8", "--h", "1", "--k", "1", "--out", s(&inst1)]).status.success());
    let v = repack(&["verify", "--instance", s(&inst1), "--witness", s(&wit)]);
    assert_eq!(stdout(&v).trim(), "OK");
    let bad = repack(&["verify", "--instance", s(&inst), "--witness", s(&wit)]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn oracle_agrees_on_the_corridor() {
    let d = dir("oracle");
    let inst = d.join("c.json");
    assert!(repack(&["gen", "corridor", "--length", "9", "--ys", "1,4.5,8", "--h", "0", "--k", "1", "--out", s(&inst)]).status.success());
    assert_eq!(repack(&["oracle", "--instance", s(&inst), "--delta", "0.05"]).status.code(), Some(2));
    assert_eq!(repack(&["oracle", "--instance", s(&inst), "--h", "1", "--delta", "0.05"]).status.code(), Some(0));
}

#[test]
fn approx_output_verifies_and_ignores_jobs() {
    let d = dir("approx");
    let inst = d.join("g.json");
    let manifest = d.join("m.json");
    let o = repack(&["gen", "grid", "--a", "4", "--b", "3", "--holes", "0,0;2,1;3,2", "--out", s(&inst), "--manifest", s(&manifest)]);
    assert!(o.status.success(), "{o:?}");
    assert!(std::fs::read_to_string(&manifest).unwrap().contains("\"No\""));
    let mut outs = Vec::new();
    for jobs in ["1", "3"] {
        let w = d.join(format!("w{jobs}.json"));
        let a = repack(&["--jobs", jobs, "approx", "--instance", s(&inst), "--eps", "0.5", "--out", s(&w)]);
        assert!(a.status.success(), "{a:?}");
        let added: usize = stdout(&a).split_whitespace().next().unwrap().parse().unwrap();
        assert!((2..=3).contains(&added), "{}", stdout(&a));
        outs.push(std::fs::read(&w).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
}

#[test]
fn render_writes_svg() {
    let d = dir("render");
    let inst = d.join("g.json");
    let svg = d.join("g.svg");
    assert!(repack(&["gen", "grid", "--a", "2", "--b", "2", "--holes", "1,1", "--out", s(&inst)]).status.success());
    assert!(repack(&["render", "--instance", s(&inst), "--out", s(&svg)]).status.success());
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn bad_arguments_are_errors() {
    let d = dir("errors");
    let inst = d.join("g.json");
    assert!(repack(&["gen", "grid", "--a", "2", "--b", "2", "--out", s(&inst)]).status.success());
    for args in [
        vec!["approx", "--instance", s(&inst), "--eps", "1.5"],
        vec!["--jobs", "0", "solve", "--instance", s(&inst)],
        vec!["solve", "--instance", s(&inst), "--tau", "1e-3", "--sigma", "1e-6"],
        vec!["gen", "grid", "--a", "2", "--b", "2", "--holes", "5,5", "--out", s(&inst)],
        vec!["solve", "--instance", "/nonexistent/instance.json"],
    ] {
        let o = repack(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn gadget_for_k4() {
    let d = dir("gadget");
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data");
    let out = d.join("k4.json");
    let o = repack(&["gen", "gadget", "--graph", s(&data.join("k4.json")), "--emb", s(&data.join("k4_embedding.json")), "--k", "1", "--out", s(&out)]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("k' = 4207"), "{}", stdout(&o));
    let inst = parse_instance(&std::fs::read(&out).unwrap(), &Tolerance::default()).unwrap();
    assert_eq!((inst.h, inst.k), (0, 4207));
    assert!(validate_packing(&inst.packing(), &Tolerance::default()).is_ok());

    let line = d.join("line.json");
    std::fs::write(&line, "[[1],[0]]").unwrap();
    let bad = repack(&["gen", "gadget", "--graph", s(&line), "--emb", s(&data.join("k4_embedding.json")), "--k", "1", "--out", s(&out)]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("cubic"));
}
