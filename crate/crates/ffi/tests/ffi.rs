use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use argmine_ffi::*;

const GRAPH: &str = r#"{
  "nodes": [
    {"nodeID": "1", "text": "Schools should start later.", "type": "I"},
    {"nodeID": "2", "text": "Teenagers need more sleep.", "type": "I"},
    {"nodeID": "3", "text": "Buses would cost more.", "type": "I"},
    {"nodeID": "4", "text": "Default Inference", "type": "RA"},
    {"nodeID": "5", "text": "Default Conflict", "type": "CA"}
  ],
  "edges": [
    {"edgeID": "a", "fromID": "2", "toID": "4"},
    {"edgeID": "b", "fromID": "4", "toID": "1"},
    {"edgeID": "c", "fromID": "3", "toID": "5"},
    {"edgeID": "d", "fromID": "5", "toID": "1"}
  ],
  "major_claim": "1"
}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = argmine_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_string_lossy().into_owned();
    argmine_string_free(s);
    out
}

unsafe fn parse(json: &str) -> *mut ArgmineGraph {
    let mut g = ptr::null_mut();
    assert_eq!(argmine_graph_from_json(c(json).as_ptr(), &mut g), ArgmineStatus::Ok);
    g
}

#[test]
fn graph_round_trip_and_queries() {
    unsafe {
        let g = parse(GRAPH);
        let mut counts = ArgmineCounts::default();
        assert_eq!(argmine_graph_counts(g, &mut counts), ArgmineStatus::Ok);
        assert_eq!((counts.inodes, counts.snodes, counts.edges), (3, 2, 4));

        let mut depth = 0;
        assert_eq!(argmine_graph_depth(g, &mut depth), ArgmineStatus::Ok);
        assert_eq!(depth, 2);

        let mut problems = 99;
        assert_eq!(argmine_graph_validate(g, &mut problems), ArgmineStatus::Ok);
        assert_eq!(problems, 0);

        let mut json = ptr::null_mut();
        assert_eq!(argmine_graph_to_json(g, &mut json), ArgmineStatus::Ok);
        let json = take(json);
        let again = parse(&json);
        let mut report = ArgmineReport::default();
        assert_eq!(argmine_evaluate_pair(g, again, 0.25, &mut report), ArgmineStatus::Ok);
        assert_eq!((report.inode, report.major_claim, report.snode, report.edge), (1.0, 1, 1.0, 1.0));
        assert_eq!(report.time_s, 0.25);

        let mut dot = ptr::null_mut();
        assert_eq!(argmine_graph_to_dot(g, &mut dot), ArgmineStatus::Ok);
        assert!(take(dot).starts_with("digraph"));

        argmine_graph_free(again);
        argmine_graph_free(g);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(argmine_graph_from_json(ptr::null(), &mut g), ArgmineStatus::NullPointer);
        assert!(g.is_null());
        assert!(last_error().contains("json"));

        assert_eq!(argmine_graph_from_json(c("{ nope").as_ptr(), &mut g), ArgmineStatus::Parse);
        assert!(g.is_null());

        let bad = [0x66u8, 0xff, 0x00];
        assert_eq!(argmine_graph_from_json(bad.as_ptr().cast(), &mut g), ArgmineStatus::InvalidUtf8);

        // a cycle parses but is not a valid graph
        let cyclic = GRAPH.replace(r#""fromID": "3", "toID": "5""#, r#""fromID": "1", "toID": "5""#);
        let g = parse(&cyclic);
        let mut problems = 0;
        assert_eq!(argmine_graph_validate(g, &mut problems), ArgmineStatus::Ok);
        assert!(problems > 0);
        assert!(!last_error().is_empty());
        let mut depth = 0;
        assert_eq!(argmine_graph_depth(g, &mut depth), ArgmineStatus::InvalidGraph);
        argmine_graph_free(g);

        let mut counts = ArgmineCounts::default();
        assert_eq!(argmine_graph_counts(ptr::null(), &mut counts), ArgmineStatus::NullPointer);

        // success clears the previous message
        let mut d = 0;
        assert_eq!(argmine_levenshtein(c("a").as_ptr(), c("b").as_ptr(), &mut d), ArgmineStatus::Ok);
        assert!(argmine_last_error_message().is_null());

        argmine_graph_free(ptr::null_mut());
        argmine_string_free(ptr::null_mut());
    }
}

#[test]
fn string_metrics() {
    unsafe {
        let mut d = 0;
        assert_eq!(argmine_levenshtein(c("kitten").as_ptr(), c("sitting").as_ptr(), &mut d), ArgmineStatus::Ok);
        assert_eq!(d, 3);
        let mut s = 0.0;
        assert_eq!(argmine_node_similarity(c("kitten").as_ptr(), c("sitting").as_ptr(), &mut s), ArgmineStatus::Ok);
        assert!((s - (1.0 - 3.0 / 7.0)).abs() < 1e-12);
    }
}

#[test]
fn pipeline_mines_text() {
    let essay = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/sample/essay.txt")).unwrap();
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(argmine_pipeline_new(ptr::null(), &mut p), ArgmineStatus::Ok);

        let mut g = ptr::null_mut();
        let mut elapsed = -1.0;
        assert_eq!(argmine_pipeline_mine(p, c(&essay).as_ptr(), &mut g, &mut elapsed), ArgmineStatus::Ok);
        assert!(elapsed >= 0.0);
        let mut problems = 1;
        assert_eq!(argmine_graph_validate(g, &mut problems), ArgmineStatus::Ok);
        assert_eq!(problems, 0);
        argmine_graph_free(g);

        let mut none = ptr::null_mut();
        assert_eq!(argmine_pipeline_mine(p, c("").as_ptr(), &mut none, ptr::null_mut()), ArgmineStatus::NoArgument);
        assert!(none.is_null());
        argmine_pipeline_free(p);

        let mut q = ptr::null_mut();
        assert_eq!(argmine_pipeline_new(c("/nonexistent/run.conf").as_ptr(), &mut q), ArgmineStatus::Io);
        assert!(q.is_null());

        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.conf");
        std::fs::write(&cfg, "version = 1\nneutral_threshold = 3\n").unwrap();
        let cfg = c(cfg.to_str().unwrap());
        assert_eq!(argmine_pipeline_new(cfg.as_ptr(), &mut q), ArgmineStatus::Config);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(argmine_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let Some(cc) = ["cc", "gcc", "clang"]
        .into_iter()
        .find(|cc| Command::new(cc).arg("--version").output().is_ok())
    else {
        eprintln!("no C compiler found; header not checked");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"argmine.h\"\nint main(void) { ArgmineGraph *g = 0; size_t d; \
         return argmine_graph_depth(g, &d) == ARGMINE_STATUS_NULL_POINTER ? 0 : 1; }\n",
    )
    .unwrap();
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let out = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
