//! Command-line behavior: exit codes, determinism, artifact shapes.

use std::path::Path;
use std::process::{Command, Output};

use actspace_core::{three_anchor_model, MixtureModel};

fn actspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_actspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn bundled_model_document_matches_builtin() {
    let text = include_str!("../assets/three_anchor_model.json");
    let model = MixtureModel::from_json(text).unwrap();
    assert_eq!(model, three_anchor_model());
    // And the built-in serializes back to the bundled document.
    assert_eq!(three_anchor_model().to_json(), text);
}

#[test]
fn simulate_writes_n_rows_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    for out in [&out1, &out2] {
        let r = actspace(&[
            "simulate",
            "--n",
            "250",
            "--seed",
            "7",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success());
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "same invocation must be byte-identical");
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 251); // header + 250 rows
    assert_eq!(text.lines().next(), Some("x,y"));
}

#[test]
fn simulate_rejects_zero_samples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let r = actspace(&["simulate", "--n", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn simulate_accepts_model_document() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("model.json");
    std::fs::write(&model_path, three_anchor_model().to_json()).unwrap();
    let out = dir.path().join("x.csv");
    let r = actspace(&[
        "simulate",
        "--model",
        model_path.to_str().unwrap(),
        "--n",
        "10",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"pi\": [2, 0, 0]}").unwrap();
    let r = actspace(&[
        "simulate",
        "--model",
        bad.to_str().unwrap(),
        "--n",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn analyze_points_csv_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    let out = dir.path().join("run");
    let r = actspace(&[
        "simulate",
        "--n",
        "400",
        "--seed",
        "11",
        "--out",
        pts.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let r = actspace(&[
        "analyze",
        "--input",
        pts.to_str().unwrap(),
        "--bandwidth",
        "0.5",
        "--gamma",
        "0.4,0.9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in [
        "manifest.json",
        "rank_field.asc",
        "mass_volume.csv",
        "betti.csv",
        "persistence.csv",
        "persistence_pairs.csv",
        "level_set_0.400.asc",
        "level_set_0.900.asc",
    ] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&read(&out, "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "analyze");
    assert_eq!(manifest["bandwidths"][0], 0.5);
    assert_eq!(manifest["cell_size"], 0.125);
    let mass_volume = read(&out, "mass_volume.csv");
    assert!(mass_volume.starts_with("level,value,log_volume\n"));
}

#[test]
fn analyze_rejects_empty_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "x,y\n").unwrap();
    let out = dir.path().join("run");
    let r = actspace(&[
        "analyze",
        "--input",
        empty.to_str().unwrap(),
        "--bandwidth",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));

    let odd = dir.path().join("odd.csv");
    std::fs::write(&odd, "foo,bar\n1,2\n").unwrap();
    let r = actspace(&[
        "analyze",
        "--input",
        odd.to_str().unwrap(),
        "--bandwidth",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));

    let missing = dir.path().join("nope.csv");
    let r = actspace(&[
        "analyze",
        "--input",
        missing.to_str().unwrap(),
        "--bandwidth",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn analyze_flag_validation_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    std::fs::write(&pts, "x,y\n0,0\n1,1\n").unwrap();
    let out = dir.path().join("run");
    let base = [
        "analyze",
        "--input",
        pts.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    let cases: Vec<Vec<&str>> = vec![
        ["--bandwidth", "0"].to_vec(),
        ["--bandwidth", "0.5", "--connectivity", "5"].to_vec(),
        ["--bandwidth", "0.5", "--step", "0.8"].to_vec(),
        ["--bandwidth", "0.5", "--gamma", "0.5,0.2"].to_vec(),
        ["--bandwidth", "0.5", "--bbox", "1,2,3"].to_vec(),
        ["--bandwidth", "0.5", "--cell-size", "-1"].to_vec(),
    ];
    for extra in cases {
        let mut args: Vec<&str> = base.to_vec();
        args.extend(&extra);
        let r = actspace(&args);
        assert_eq!(r.status.code(), Some(2), "args {extra:?}");
    }
}

#[test]
fn analyze_bbox_clips_points() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    // Two clusters; the bbox keeps only the one near the origin.
    let mut csv = String::from("x,y\n");
    for i in 0..50 {
        csv.push_str(&format!("0.{i:02},0.{i:02}\n"));
        csv.push_str(&format!("10.{i:02},10.{i:02}\n"));
    }
    std::fs::write(&pts, csv).unwrap();
    let out = dir.path().join("run");
    let r = actspace(&[
        "analyze",
        "--input",
        pts.to_str().unwrap(),
        "--bandwidth",
        "0.5",
        "--bbox",
        "-1,-1,2,2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success());
    let field = actspace_core::ScalarField::from_esri_ascii(&read(&out, "rank_field.asc")).unwrap();
    // The grid covers only the near-origin cluster padded by one bandwidth.
    assert!(field.grid().extent_xmax() < 5.0);
}

#[test]
fn analyze_gps_multi_device_writes_subdirectories() {
    let dir = tempfile::tempdir().unwrap();
    let gps = dir.path().join("gps.csv");
    let mut csv = String::from("id,timestamp,lat,lon\n");
    for i in 0..40 {
        csv.push_str(&format!(
            "a,2016-03-01T00:{i:02}:00Z,{},{}\n",
            -13.96 + 0.0001 * i as f64,
            33.77 + 0.0001 * i as f64
        ));
        csv.push_str(&format!(
            "b,2016-03-01T00:{i:02}:30Z,{},{}\n",
            -13.90 + 0.0001 * i as f64,
            33.70 - 0.0001 * i as f64
        ));
    }
    std::fs::write(&gps, csv).unwrap();
    let out = dir.path().join("run");
    let r = actspace(&[
        "analyze",
        "--input",
        gps.to_str().unwrap(),
        "--bandwidth",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(out.join("a").join("rank_field.asc").exists());
    assert!(out.join("b").join("rank_field.asc").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn bench_single_rep_reports_zero_standard_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench");
    let r = actspace(&[
        "bench",
        "--n",
        "300",
        "--reps",
        "1",
        "--seed",
        "5",
        "--gamma",
        "0.3,0.6,0.9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let csv = read(&out, "bench_errors.csv");
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "gamma,dr_anchors_mean,dr_anchors_se,dr_roads_mean,dr_roads_se,\
         kde_anchors_mean,kde_anchors_se,kde_roads_mean,kde_roads_se"
    );
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 9);
        for se_col in [2, 4, 6, 8] {
            assert_eq!(
                fields[se_col].parse::<f64>().unwrap(),
                0.0,
                "standard error with one repetition"
            );
        }
    }

    let r = actspace(&[
        "bench",
        "--n",
        "300",
        "--reps",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn sweep_requires_two_bandwidths_and_writes_per_h_fields() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("pts.csv");
    let r = actspace(&[
        "simulate",
        "--n",
        "500",
        "--seed",
        "2",
        "--out",
        pts.to_str().unwrap(),
    ]);
    assert!(r.status.success());

    let out = dir.path().join("sweep");
    let r = actspace(&[
        "sweep",
        "--input",
        pts.to_str().unwrap(),
        "--bandwidth",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        r.status.code(),
        Some(2),
        "a single bandwidth is not a sweep"
    );

    let r = actspace(&[
        "sweep",
        "--input",
        pts.to_str().unwrap(),
        "--bandwidth",
        "0.25,0.5,1.0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for name in [
        "rank_field_h0.25.asc",
        "rank_field_h0.5.asc",
        "rank_field_h1.asc",
        "sweep_summary.csv",
        "manifest.json",
    ] {
        assert!(out.join(name).exists(), "missing {name}");
    }
    let summary = read(&out, "sweep_summary.csv");
    let maxima: Vec<f64> = summary
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(maxima.len(), 3);
    // Under-smoothing fragments components: the peak component count cannot
    // grow as the bandwidth grows.
    assert!(
        maxima[0] >= maxima[1] && maxima[1] >= maxima[2],
        "{maxima:?}"
    );
}

#[test]
fn sweep_gps_meter_bandwidths() {
    let input = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/gps_synthetic.csv");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let r = actspace(&[
        "sweep",
        "--input",
        input,
        "--bandwidth",
        "50,100,200,300,500,1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let fields: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("rank_field_h"))
        .collect();
    assert_eq!(fields.len(), 6, "one ranking field per bandwidth: {fields:?}");
}
