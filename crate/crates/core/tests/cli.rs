use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tpwa::io::{dataset_from_json, model_from_json, model_to_json};
use tpwa::{max_residual, OutOfDomainPolicy};

fn tpwa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpwa"))
        .args(args)
        .env("TPWA_LOG", "quiet")
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_fit_eval_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let data_path = path(dir.path(), "fig1.json");
    let model_path = path(dir.path(), "model.json");
    let plot_path = path(dir.path(), "plot.csv");

    let out = tpwa(&["gen", "arctan", "--k", "11", "--out", &data_path]);
    assert_eq!(out.status.code(), Some(0));
    let data = dataset_from_json(&fs::read_to_string(&data_path).unwrap()).unwrap();
    assert_eq!(data.len(), 11);

    let out = tpwa(&[
        "fit",
        "--input",
        &data_path,
        "--epsilon",
        "0.1",
        "--template",
        "rect",
        "--output",
        &model_path,
        "--emit-plot",
        &plot_path,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("q = 3, iterations = "), "{summary}");

    let text = fs::read_to_string(&model_path).unwrap();
    let model = model_from_json(&text).unwrap();
    assert_eq!(model.q(), 3);
    assert!(max_residual(&model, &data, OutOfDomainPolicy::Error).unwrap() <= 0.1 + 1e-7);
    assert_eq!(model_to_json(&model), text);

    let csv = fs::read_to_string(&plot_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,y1,piece"));
    assert_eq!(lines.count(), 11);

    // Evaluating on the training inputs stays within the tolerance.
    let out = tpwa(&["eval", "--model", &model_path, "--input", &data_path]);
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<Vec<f64>>(l).unwrap()[0])
        .collect();
    assert_eq!(values.len(), 11);
    for (k, v) in values.iter().enumerate() {
        assert!((v - data.y(k + 1)[0]).abs() <= 0.1 + 1e-7);
    }
}

#[test]
fn model_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let data_path = path(dir.path(), "d.json");
    let model_path = path(dir.path(), "m.json");
    assert_eq!(
        tpwa(&["gen", "arctan", "--out", &data_path]).status.code(),
        Some(0)
    );
    let to_file = tpwa(&[
        "fit",
        "--input",
        &data_path,
        "--epsilon",
        "0.1",
        "--out",
        &model_path,
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    let to_stdout = tpwa(&["fit", "--input", &data_path, "--epsilon", "0.1"]);
    assert_eq!(to_stdout.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(to_stdout.stdout).unwrap(),
        fs::read_to_string(&model_path).unwrap()
    );
    assert!(String::from_utf8(to_stdout.stderr)
        .unwrap()
        .starts_with("q = 3"));
}

#[test]
fn fit_modes_agree() {
    let dir = tempfile::tempdir().unwrap();
    let data_path = path(dir.path(), "grid.json");
    let out = tpwa(&[
        "gen", "gridpwa", "--d", "2", "--cells", "2", "--seed", "3", "--out", &data_path,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let q = |mode: &str| {
        let m = path(dir.path(), &format!("{mode}.json"));
        let out = tpwa(&[
            "fit",
            "--input",
            &data_path,
            "--epsilon",
            "0",
            "--mode",
            mode,
            "--out",
            &m,
        ]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        model_from_json(&fs::read_to_string(m).unwrap())
            .unwrap()
            .q()
    };
    let optimal = q("optimal");
    assert_eq!(q("naive"), optimal);
    assert_eq!(q("maximal"), optimal);
    assert!(optimal <= 4);
}

#[test]
fn generators_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (path(dir.path(), "a.json"), path(dir.path(), "b.json"));
    for p in [&a, &b] {
        let args = [
            "gen", "gridpwa", "--d", "2", "--cells", "3", "--noise", "0.005", "--seed", "7",
            "--out", p,
        ];
        assert_eq!(tpwa(&args).status.code(), Some(0));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let uid = tpwa(&["gen", "uid", "--n", "10"]);
    assert_eq!(uid.status.code(), Some(0));
    let data = dataset_from_json(&String::from_utf8(uid.stdout).unwrap()).unwrap();
    assert_eq!((data.len(), data.d()), (100, 2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "missing.json");
    assert_eq!(
        tpwa(&["fit", "--input", &missing, "--epsilon", "0.1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(tpwa(&["fit", "--epsilon", "0.1"]).status.code(), Some(1));
    assert_eq!(tpwa(&["gen", "arctan", "--k", "1"]).status.code(), Some(1));
    assert_eq!(
        tpwa(&["gen", "uid", "--x2-range", "-300", "0"])
            .status
            .code(),
        Some(1)
    );

    let clash = path(dir.path(), "clash.json");
    fs::write(
        &clash,
        r#"{"d":1,"e":1,"points":[{"x":[0.0],"y":[0.0]},{"x":[0.0],"y":[1.0]}]}"#,
    )
    .unwrap();
    let out = tpwa(&["fit", "--input", &clash, "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("1, 2"));

    let data_path = path(dir.path(), "d.json");
    tpwa(&["gen", "arctan", "--out", &data_path]);
    assert_eq!(
        tpwa(&["fit", "--input", &data_path, "--epsilon", "-1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        tpwa(&[
            "fit",
            "--input",
            &data_path,
            "--epsilon",
            "0.1",
            "--template",
            "hexagon"
        ])
        .status
        .code(),
        Some(1)
    );

    // A 1-D model queried far outside its regions.
    let model_path = path(dir.path(), "m.json");
    tpwa(&[
        "fit",
        "--input",
        &data_path,
        "--epsilon",
        "0.1",
        "--out",
        &model_path,
    ]);
    let query = path(dir.path(), "q.json");
    fs::write(&query, "[[5.0]]").unwrap();
    assert_eq!(
        tpwa(&[
            "eval",
            "--model",
            &model_path,
            "--input",
            &query,
            "--oob",
            "error"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        tpwa(&["eval", "--model", &model_path, "--input", &query])
            .status
            .code(),
        Some(0)
    );
}
