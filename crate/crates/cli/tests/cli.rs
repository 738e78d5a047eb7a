//! End-to-end runs of the `arrange` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn arrange(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrange"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn path_in(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn read_json(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn len(doc: &Value, key: &str) -> usize {
    doc[key].as_array().map_or(0, Vec::len)
}

const TWO_SQUARES: &str = r#"{"dim":2,"V":[[0,0],[2,0],[2,2],[0,2],[1,1],[3,1],[3,3],[1,3]],
"EV":[[0,1],[1,2],[2,3],[0,3],[4,5],[5,6],[6,7],[4,7]]}"#;

const CUBE_OBJ: &str = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nv 0 0 1\nv 1 0 1\nv 1 1 1\nv 0 1 1\n\
    f 1 4 3 2\nf 5 6 7 8\nf 1 2 6 5\nf 2 3 7 6\nf 3 4 8 7\nf 4 1 5 8\n";

#[test]
fn overlapping_squares_arrange_and_check() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "squares.json", TWO_SQUARES);
    let output = path_in(&dir, "out.json");
    let run = arrange(&[
        "arrange",
        "--dim",
        "2",
        "--input",
        &input,
        "--output",
        &output,
        "--check",
        "--report-euler",
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let doc = read_json(&output);
    assert_eq!(
        (len(&doc, "V"), len(&doc, "EV"), len(&doc, "FV")),
        (10, 12, 3)
    );
    assert_eq!(doc["boundary"]["d2"]["shape"], serde_json::json!([12, 3]));
    assert_eq!(
        doc["boundary"]["outer"]["shape"],
        serde_json::json!([12, 1])
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(
        stdout.contains("euler: 1 bounded, 2 with outer"),
        "{stdout}"
    );
    assert!(stdout.contains("boundary of boundary: ok"));
}

#[test]
fn obj_cube_arranges_with_zero_euler_characteristic() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "cube.obj", CUBE_OBJ);
    let run = arrange(&[
        "arrange",
        "--dim",
        "3",
        "--input",
        &input,
        "--check",
        "--report-euler",
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("cells: 1 (+1 outer)"), "{stdout}");
    assert!(
        stdout.contains("euler: 1 bounded, 0 with outer"),
        "{stdout}"
    );
}

#[test]
fn obj_converts_to_lar_json() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "cube.obj", CUBE_OBJ);
    let output = path_in(&dir, "cube.json");
    let run = arrange(&[
        "convert", "--input", &input, "--from", "obj", "--to", "lar-json", "--output", &output,
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let doc = read_json(&output);
    assert_eq!(
        (len(&doc, "V"), len(&doc, "EV"), len(&doc, "FV")),
        (8, 12, 6)
    );
    assert_eq!(doc["FV"][0], serde_json::json!([0, 3, 2, 1]));
}

#[test]
fn polygon_faces_are_kept_verbatim() {
    let dir = TempDir::new().unwrap();
    let obj = "v 0 0 0\nv 2 0 0\nv 3 1 0\nv 1 3 0\nv -1 1 0\nf 1 2 3 4 5\n";
    let input = write(&dir, "pentagon.obj", obj);
    let output = path_in(&dir, "pentagon.json");
    let run = arrange(&[
        "convert", "--input", &input, "--from", "obj", "--to", "lar-json", "--output", &output,
    ]);
    assert!(run.status.success());
    let doc = read_json(&output);
    assert_eq!(doc["FV"], serde_json::json!([[0, 1, 2, 3, 4]]));
    assert_eq!(len(&doc, "EV"), 5);
}

#[test]
fn matrix_market_export_matches_json_operators() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "squares.json", TWO_SQUARES);
    let output = path_in(&dir, "out.json");
    let mm = path_in(&dir, "mm");
    let run = arrange(&[
        "arrange",
        "--dim",
        "2",
        "--input",
        &input,
        "--output",
        &output,
        "--export-mm",
        &mm,
    ]);
    assert!(run.status.success());
    let doc = read_json(&output);
    for name in ["d1", "d2", "outer"] {
        let text = fs::read_to_string(Path::new(&mm).join(format!("{name}.mtx"))).unwrap();
        let mut lines = text.lines().filter(|l| !l.starts_with('%'));
        let header: Vec<usize> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|t| t.parse().unwrap())
            .collect();
        let shape = &doc["boundary"][name]["shape"];
        assert_eq!(header[0] as u64, shape[0].as_u64().unwrap());
        assert_eq!(header[1] as u64, shape[1].as_u64().unwrap());
        assert_eq!(
            header[2],
            doc["boundary"][name]["coo"].as_array().unwrap().len()
        );
        let mut entries: Vec<[i64; 3]> = lines
            .map(|l| {
                let t: Vec<i64> = l.split_whitespace().map(|x| x.parse().unwrap()).collect();
                [t[0] - 1, t[1] - 1, t[2]]
            })
            .collect();
        let mut coo: Vec<[i64; 3]> =
            serde_json::from_value(doc["boundary"][name]["coo"].clone()).unwrap();
        entries.sort_unstable();
        coo.sort_unstable();
        assert_eq!(entries, coo, "operator {name}");
    }
}

#[test]
fn lar_json_converts_to_matrix_market() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "cube.obj", CUBE_OBJ);
    let json = path_in(&dir, "cube.json");
    assert!(arrange(&[
        "convert", "--input", &input, "--from", "obj", "--to", "lar-json", "--output", &json
    ])
    .status
    .success());
    let mm = path_in(&dir, "mm");
    let run = arrange(&[
        "convert", "--input", &json, "--from", "lar-json", "--to", "mm", "--output", &mm,
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(Path::new(&mm).join("d1.mtx").exists());
    assert!(Path::new(&mm).join("d2.mtx").exists());
}

#[test]
fn malformed_input_exits_with_parse_status() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "bad.json", "{\"dim\": 2, \"V\": [");
    let run = arrange(&["arrange", "--dim", "2", "--input", &input]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn illegal_input_exits_with_validation_status() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "squares.json", TWO_SQUARES);
    assert_eq!(
        arrange(&["arrange", "--dim", "3", "--input", &input])
            .status
            .code(),
        Some(3)
    );
    let bad = write(
        &dir,
        "loop.json",
        r#"{"dim":2,"V":[[0,0],[1,0]],"EV":[[0,0]]}"#,
    );
    assert_eq!(
        arrange(&["arrange", "--dim", "2", "--input", &bad])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let scene = path_in(&dir, "scene.json");
    assert!(
        arrange(&["gen", "--kind", "cubes", "--seed", "4", "--output", &scene])
            .status
            .success()
    );
    let (a, b) = (path_in(&dir, "a.json"), path_in(&dir, "b.json"));
    for (out, threads) in [(&a, "1"), (&b, "4")] {
        let run = arrange(&[
            "--threads",
            threads,
            "arrange",
            "--dim",
            "3",
            "--input",
            &scene,
            "--output",
            out,
        ]);
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn generated_segments_arrange_with_sphere_characteristic() {
    let dir = TempDir::new().unwrap();
    let scene = path_in(&dir, "segs.json");
    assert!(arrange(&[
        "gen", "--kind", "segments", "--count", "60", "--seed", "1", "--output", &scene
    ])
    .status
    .success());
    let run = arrange(&[
        "arrange",
        "--dim",
        "2",
        "--input",
        &scene,
        "--check",
        "--report-euler",
        "--seed",
        "9",
    ]);
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert!(String::from_utf8_lossy(&run.stdout).contains("2 with outer"));
}
