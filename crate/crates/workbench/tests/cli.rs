mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

fn miner(args: &[&str]) -> std::process::Output {
    let out = Command::new(env!("CARGO_BIN_EXE_lulc-miner"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn inputs(dir: &Path) -> (String, String) {
    let (png, palette, _) = common::painted_png(40, 30, 13);
    let image = dir.join("in.png");
    let pal = dir.join("palette.json");
    fs::write(&image, png).unwrap();
    fs::write(&pal, lulc_workbench::formats::palette_json(&palette).unwrap()).unwrap();
    (image.to_str().unwrap().into(), pal.to_str().unwrap().into())
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn segment_writes_masks_colormaps_and_clustered_pair() {
    let tmp = tempfile::tempdir().unwrap();
    let (image, palette) = inputs(tmp.path());
    let out = tmp.path().join("seg");
    miner(&["segment", "--image", &image, "--palette", &palette, "--out", out.to_str().unwrap()]);
    let names = listing(&out);
    assert_eq!(names.len(), 16);
    assert!(names.contains(&"cluster_mask_7.png".to_string()));
    assert!(names.contains(&"individual_colormap_1.json".to_string()));
    assert!(names.contains(&"clustered.png".to_string()));
    assert!(names.contains(&"clustered_map.json".to_string()));
}

#[test]
fn stats_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let (image, palette) = inputs(tmp.path());
    let out = tmp.path().join("st");
    let o = out.to_str().unwrap();
    let printed = miner(&["stats", "--image", &image, "--palette", &palette, "--out", o, "--freeze-assignments"]);
    let report = miner(&["report", "--out", o]);
    assert_eq!(printed.stdout, report.stdout);
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.starts_with("Total image area= 1200 pixels\n"));
    assert!(text.contains("Cluster7 area= "));
}

#[test]
fn mesh_with_obj_and_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let (image, palette) = inputs(tmp.path());
    let out = tmp.path().join("m");
    miner(&[
        "mesh", "--image", &image, "--palette", &palette, "--out", out.to_str().unwrap(),
        "--refine-means", "--bins", "16", "--iso-frac", "0.2", "--sample-n", "5", "--seed", "3", "--obj",
    ]);
    let names = listing(&out);
    assert_eq!(names.iter().filter(|n| n.starts_with("mesh_") && n.ends_with(".json")).count(), 6);
    assert_eq!(names.iter().filter(|n| n.ends_with(".obj")).count(), 6);
    let samples: Vec<[f64; 3]> = serde_json::from_slice(&fs::read(out.join("samples_2.json")).unwrap()).unwrap();
    assert!(samples.len() <= 5);
}

#[test]
fn run_matches_session_layout_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (image, palette) = inputs(tmp.path());
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        miner(&["run", "--image", &image, "--palette", &palette, "--out", dir.to_str().unwrap(), "--seed", "9"]);
    }
    let names = listing(&a);
    assert_eq!(names.len(), 7 + 7 + 2 + 1 + 6);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn footprint_prints_both_methods() {
    let out = miner(&["footprint", "--width", "563", "--height", "613", "--k", "7"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2415854"));
    assert!(text.contains("345266"));
    assert!(text.contains("ratio: 6.997"));
}

#[test]
fn conflicting_refinement_flags_are_refused() {
    let status = Command::new(env!("CARGO_BIN_EXE_lulc-miner"))
        .args(["segment", "--image", "x", "--palette", "y", "--out", "z", "--refine-means", "--freeze-assignments"])
        .output()
        .unwrap()
        .status;
    assert!(!status.success());
}
