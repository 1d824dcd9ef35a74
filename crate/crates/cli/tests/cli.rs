use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cultnov_cli::io::fmt_float;
use cultnov_cli::score::read_scores;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn cultnov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cultnov")).args(args).output().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Registry with IW coordinates plus linguistic and religious CSVs for the
/// five fixture countries.
fn write_distance_fixtures(dir: &Path) -> PathBuf {
    let iw = [("MA", -1.2, -0.6), ("IN", -0.4, -0.9), ("MX", -0.7, 0.3), ("IT", 0.3, 0.5), ("FR", 0.8, 0.9)];
    let text = fs::read_to_string(data("registry.json")).unwrap();
    let mut reg: serde_json::Value = serde_json::from_str(&text).unwrap();
    for rec in reg.as_array_mut().unwrap() {
        if let Some((_, a, b)) = iw.iter().find(|(iso, _, _)| rec["iso"] == *iso) {
            rec["iw"] = serde_json::json!([a, b]);
        }
    }
    let registry = dir.join("registry.json");
    fs::write(&registry, serde_json::to_string(&reg).unwrap()).unwrap();
    let mut ling = String::from("iso_a,iso_b,distance\n");
    let mut rel = ling.clone();
    for (i, (a, ..)) in iw.iter().enumerate() {
        for (j, (b, ..)) in iw.iter().enumerate().skip(i + 1) {
            ling.push_str(&format!("{a},{b},{}\n", fmt_float(0.1 * (i + j) as f64)));
            rel.push_str(&format!("{a},{b},{}\n", fmt_float(0.05 * (j - i) as f64)));
        }
    }
    fs::write(dir.join("linguistic.csv"), ling).unwrap();
    fs::write(dir.join("religious.csv"), rel).unwrap();
    registry
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(cultnov(&["--help"]).status.code(), Some(0));
    assert_eq!(cultnov(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cultnov(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cultnov(&["build", "--window", "many"]).status.code(), Some(1));
    // no corpus configured
    assert_eq!(cultnov(&["build"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = cultnov(&["score", "--corpus", path_str(&data("recipes_sample.jsonl")), "--lambda1", "1.5", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = cultnov(&[
        "build",
        "--corpus",
        "/nonexistent/recipes.jsonl",
        "--dishes",
        path_str(&data("dishes_sample.json")),
        "--registry",
        path_str(&data("registry.json")),
        "--out",
        path_str(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_dir.exists());

    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\": \"a\", \"title\": \"x\", \"text\": \"stir rice\"}\nnot json\n").unwrap();
    let out = cultnov(&[
        "build",
        "--corpus",
        path_str(&bad),
        "--dishes",
        path_str(&data("dishes_sample.json")),
        "--registry",
        path_str(&data("registry.json")),
        "--out",
        path_str(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.jsonl:2"));
}

#[test]
fn config_file_with_relative_paths_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    for f in ["recipes_sample.jsonl", "dishes_sample.json", "registry.json"] {
        fs::copy(data(f), dir.path().join(f)).unwrap();
    }
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"corpus": "recipes_sample.jsonl", "dish_specs": "dishes_sample.json",
            "registry": "registry.json", "output_dir": "out", "seed": 3, "pmi_window": 4}"#,
    )
    .unwrap();
    let out = cultnov(&["build", "--config", path_str(&config), "--seed", "9", "--lambda1", "0.6"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/run_manifest_build.json")).unwrap()).unwrap();
    let p = &manifest["parameters"];
    assert_eq!(p["seed"], 9);
    assert_eq!(p["pmi_window"], 4);
    assert_eq!(p["lambda1"], 0.6);
    assert!((p["lambda2"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    let inputs = manifest["inputs"].as_array().unwrap();
    assert!(inputs.iter().all(|i| !i["file"].as_str().unwrap().contains('/')));
    assert!(dir.path().join("out/manifests/tagine__MA.json").exists());

    fs::write(&config, r#"{"corpus": "recipes_sample.jsonl", "windw": 3}"#).unwrap();
    assert_eq!(cultnov(&["build", "--config", path_str(&config)]).status.code(), Some(2));
}

#[test]
fn empty_manifest_set_gives_header_only_scores() {
    let dir = tempfile::tempdir().unwrap();
    let manifests = dir.path().join("manifests");
    fs::create_dir_all(&manifests).unwrap();
    let out = cultnov(&[
        "score",
        "--corpus",
        path_str(&data("recipes_sample.jsonl")),
        "--manifests",
        path_str(&manifests),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let scores = fs::read_to_string(dir.path().join("scores.csv")).unwrap();
    assert_eq!(scores.lines().count(), 1);
    assert!(scores.starts_with("product,kb_culture,variation_id,variation_culture,appearance"));
}

#[test]
fn full_pipeline_with_all_distance_sources() {
    let dir = tempfile::tempdir().unwrap();
    let registry = write_distance_fixtures(dir.path());
    let out_dir = dir.path().join("out");
    let (corpus, dishes) = (data("recipes_sample.jsonl"), data("dishes_sample.json"));
    let common = [
        "--corpus",
        path_str(&corpus),
        "--dishes",
        path_str(&dishes),
        "--registry",
        path_str(&registry),
        "--out",
        path_str(&out_dir),
        "--boot",
        "50",
    ];
    let run = |cmd: &str, extra: &[&str]| {
        let mut args = vec![cmd];
        args.extend_from_slice(&common);
        args.extend_from_slice(extra);
        let out = cultnov(&args);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    };
    run("build", &[]);
    run("score", &[]);
    let ling = dir.path().join("linguistic.csv");
    let rel = dir.path().join("religious.csv");
    run("analyze", &["--linguistic-csv", path_str(&ling), "--religious-csv", path_str(&rel), "--robust"]);
    run("distances", &[]);
    run("report", &[]);

    let scores = read_scores(&out_dir.join("scores.csv")).unwrap();
    assert!(!scores.is_empty());
    for s in &scores {
        for v in [s.newness, s.uniqueness, s.difference, s.new_surprise, s.divergent_surprise] {
            assert!((0.0..=1.0).contains(&v), "{s:?}");
        }
        if s.variation_culture == s.kb_culture {
            let name = format!("{}__{}.json", s.product, s.kb_culture);
            let m: serde_json::Value =
                serde_json::from_str(&fs::read_to_string(out_dir.join("manifests").join(name)).unwrap()).unwrap();
            assert!(m["held_out"].as_array().unwrap().iter().any(|id| id == s.variation_id.as_str()), "{s:?}");
        }
    }
    let sorted = scores.windows(2).all(|w| {
        (&w[0].product, &w[0].kb_culture, &w[0].variation_id) < (&w[1].product, &w[1].kb_culture, &w[1].variation_id)
    });
    assert!(sorted);

    let dc = fs::read_to_string(out_dir.join("distance_correlations.csv")).unwrap();
    for kind in ["iw", "geo", "linguistic", "religious"] {
        assert_eq!(dc.lines().filter(|l| l.split(',').nth(1) == Some(kind)).count(), 5, "{kind}");
    }
    let reg = fs::read_to_string(out_dir.join("regressions.csv")).unwrap();
    assert!(reg.lines().any(|l| l.starts_with("full,religious,const,")));
    assert!(reg.lines().any(|l| l.starts_with("marginal:new_surprise,iw,new_surprise,")));
    let med = fs::read_to_string(out_dir.join("mediation.csv")).unwrap();
    assert_eq!(med.lines().count(), 1 + 5 * 3 * 4);
    assert_eq!(fs::read_to_string(out_dir.join("correlations.csv")).unwrap().lines().count(), 1 + 10);
    let iw = fs::read_to_string(out_dir.join("iw_distances.csv")).unwrap();
    assert_eq!(iw.lines().count(), 1 + 10);
    let report = fs::read_to_string(out_dir.join("report.md")).unwrap();
    assert!(report.contains("## Mediation") && report.contains("| metric | mediator |"));
    let manifest = fs::read_to_string(out_dir.join("run_manifest.json")).unwrap();
    assert!(manifest.contains("\"robust_se\": true") && manifest.contains("religious.csv"));
}

#[test]
fn analyze_without_distance_sources_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let registry = dir.path().join("registry.json");
    fs::write(&registry, r#"[{"iso": "FR", "name": "France"}, {"iso": "IT", "name": "Italy"}]"#).unwrap();
    let scores = dir.path().join("scores.csv");
    fs::write(&scores, "product,kb_culture,variation_id,variation_culture,appearance,disappearance,newness,uniqueness,difference,new_surprise,divergent_surprise,lexical_diversity,new_ingredient_ratio,length_ratio\n").unwrap();
    let out = cultnov(&["analyze", "--registry", path_str(&registry), "--scores", path_str(&scores), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
