use std::path::PathBuf;
use std::process::{Command, Output};

use wavediff::formats::ReportDocument;
use wavediff::render::parse_pgm;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("wavediff-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn wavediff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavediff"))
        .args(args)
        .env_remove("WAVEDIFF_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> ReportDocument {
    ReportDocument::from_json(&String::from_utf8_lossy(&out.stdout)).expect("stdout is a report")
}

fn write(dir: &PathBuf, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn spherical_wave_autocorrelation_matches_bessel() {
    let dir = scratch("j0");
    let spec = write(&dir, "s.json", r#"{"dimension":2,"terms":[{"re":1,"im":0,"plane":[0,0],"radial":1}]}"#);
    let out = wavediff(&["autocorr", "--spec", &spec, "--radii", "50,100,200"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep.points.len(), 5);
    assert_eq!(rep.autocorrelation.as_ref().unwrap().len(), 1);
    for p in &rep.points {
        assert!(p.delta.unwrap() < 0.01, "{:?}", p);
    }
    // J0(π) at the shift (0.5, 0)
    let c = rep.points[1].closed.unwrap();
    assert!((c.re + 0.30424217764409386).abs() < 1e-12);
}

#[test]
fn empty_spec_has_zero_autocorrelation_and_diffraction() {
    let dir = scratch("empty");
    let spec = write(&dir, "e.json", r#"{"dimension":2,"terms":[]}"#);
    let out = wavediff(&["autocorr", "--spec", &spec, "--radii", "10,20"]);
    assert_eq!(out.status.code(), Some(0));
    for p in &report(&out).points {
        let c = p.closed.unwrap();
        assert_eq!((c.re, c.im), (0.0, 0.0));
        assert_eq!(p.numeric.as_ref().unwrap().extrapolated.re, 0.0);
    }
    let out = wavediff(&["diffract", "--spec", &spec]);
    let d = report(&out).diffraction.unwrap();
    assert!(d.components.is_empty());
    assert_eq!(d.total_mass, 0.0);
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = scratch("bad");
    let spec = write(&dir, "b.json", "{\"dimension\": 2,\n \"terms\": [");
    let out = wavediff(&["autocorr", "--spec", &spec]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn input_errors_exit_2() {
    let dir = scratch("inputs");
    let spec = write(&dir, "s.json", r#"{"dimension":2,"terms":[{"re":1,"im":0,"plane":[0],"radial":1}]}"#);
    assert_eq!(wavediff(&["diffract", "--spec", &spec]).status.code(), Some(2));
    assert_eq!(wavediff(&["autocorr", "--builtin", "olympic", "--radii", "50,20"]).status.code(), Some(2));
    assert_eq!(wavediff(&["diffract", "--builtin", "nope"]).status.code(), Some(2));
    assert_eq!(wavediff(&["diffract", "--spec", "/nonexistent/spec.json"]).status.code(), Some(2));
    assert_eq!(wavediff(&["--threads", "0", "diffract", "--builtin", "olympic"]).status.code(), Some(2));
    assert_eq!(wavediff(&["diffract"]).status.code(), Some(2));
    assert_eq!(wavediff(&["verify", "--only", "99"]).status.code(), Some(2));
}

#[test]
fn mixed_one_dimensional_spec_still_reports_numeric_values() {
    let dir = scratch("mixed");
    let spec = write(
        &dir,
        "m.json",
        r#"{"dimension":1,"terms":[{"re":1,"im":0,"plane":[0.5],"radial":0},{"re":1,"im":0,"plane":[0],"radial":1}]}"#,
    );
    let out = wavediff(&["autocorr", "--spec", &spec, "--radii", "20,40"]);
    assert_eq!(out.status.code(), Some(3));
    let rep = report(&out);
    assert!(rep.autocorrelation.is_none());
    assert!(!rep.warnings.is_empty());
    assert!(rep.points.iter().all(|p| p.closed.is_none() && p.numeric.is_some()));
}

#[test]
fn unsupported_requests_exit_3() {
    let dir = scratch("unsupported");
    let spec = write(&dir, "d3.json", r#"{"dimension":3,"terms":[{"re":1,"im":0,"plane":[0,0,0],"radial":1}]}"#);
    let png = dir.join("x.pgm");
    let out = wavediff(&["render", "--spec", &spec, "--out", png.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!png.exists());
    assert_eq!(wavediff(&["diffract", "--builtin", "pinwheel-none"]).status.code(), Some(3));
}

#[test]
fn undersampled_quadrature_exits_4() {
    let out = wavediff(&["autocorr", "--builtin", "olympic", "--qpr", "8", "--radii", "10"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn olympic_diffraction_has_five_rings() {
    let out = wavediff(&["diffract", "--builtin", "olympic"]);
    assert_eq!(out.status.code(), Some(0));
    let d = report(&out).diffraction.unwrap();
    assert_eq!(d.components.len(), 5);
    assert!(d.components.iter().all(|c| c.radius == 2.0 && c.mass == 1.0));
    assert_eq!(d.total_mass, 5.0);
    assert_eq!(d.radially_concentrated.len(), 1);
    assert_eq!(d.radially_dispersed.len(), 4);
}

#[test]
fn plane_wave_and_cancelling_terms() {
    let dir = scratch("plane");
    let spec = write(&dir, "p.json", r#"{"dimension":2,"terms":[{"re":0.6,"im":-0.8,"plane":[1,2],"radial":0}]}"#);
    let d = report(&wavediff(&["diffract", "--spec", &spec])).diffraction.unwrap();
    assert_eq!(d.components.len(), 1);
    assert_eq!(d.components[0].center, vec![1.0, 2.0]);
    assert!((d.components[0].mass - 1.0).abs() < 1e-15);
    let spec = write(
        &dir,
        "c.json",
        r#"{"dimension":2,"terms":[{"re":1,"im":2,"plane":[1,0],"radial":1},{"re":-1,"im":-2,"plane":[1,0],"radial":1}]}"#,
    );
    let d = report(&wavediff(&["diffract", "--spec", &spec])).diffraction.unwrap();
    assert!(d.components.is_empty());
}

#[test]
fn seminorm_of_a_spherical_wave() {
    let out = wavediff(&["seminorm", "--builtin", "surprised", "--radii", "50,100"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep.parseval_norm_sqr, Some(4.0));
    let s = rep.seminorm.unwrap();
    assert!((s.extrapolated.re - 2.0).abs() < 0.02, "{:?}", s);
}

#[test]
fn render_surprised_and_a_point_measure() {
    let dir = scratch("render");
    let img = dir.join("s.pgm");
    let out = wavediff(&["render", "--builtin", "surprised", "--out", img.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let summary = report(&out).image.unwrap();
    assert_eq!((summary.width, summary.height), (241, 241));
    let pgm = parse_pgm(&std::fs::read(&img).unwrap()).unwrap();
    assert_eq!(pgm.samples.len(), 241 * 241);
    // the spots at (±√2, √2) are the brightest pixels
    let pixel = |x: f64, y: f64| {
        let col = ((x + 4.0) / 8.0 * 240.0).round() as usize;
        let row = ((4.0 - y) / 8.0 * 240.0).round() as usize;
        pgm.samples[row * 241 + col]
    };
    let s = std::f64::consts::SQRT_2;
    assert_eq!(pixel(s, s), 255);
    assert_eq!(pixel(-s, s), 255);
    assert_eq!(pixel(0.0, 0.0), 0);
    assert!(pixel(3.0, 0.0) > 0 && pixel(0.0, -1.0) > 0);

    let measure = write(&dir, "delta.json", r#"{"dimension":2,"components":[{"center":[0,0],"radius":0,"mass":1}]}"#);
    let img = dir.join("d.pgm");
    let out = wavediff(&["render", "--measure", &measure, "--width", "31", "--plain", "--out", img.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let bytes = std::fs::read(&img).unwrap();
    assert!(bytes.starts_with(b"P2"));
    let pgm = parse_pgm(&bytes).unwrap();
    let max = *pgm.samples.iter().max().unwrap();
    assert_eq!(pgm.samples[15 * 31 + 15], max);
    assert_eq!(pgm.samples.iter().filter(|&&v| v == max).count(), 1);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = scratch("determinism");
    let a = dir.join("a.pgm");
    let b = dir.join("b.pgm");
    let ra = wavediff(&["render", "--builtin", "olympic", "--out", a.to_str().unwrap()]);
    let rb = wavediff(&["--threads", "3", "render", "--builtin", "olympic", "--out", b.to_str().unwrap()]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(report(&ra).image.unwrap().max_intensity, report(&rb).image.unwrap().max_intensity);

    let spec = write(
        &dir,
        "d3.json",
        r#"{"dimension":3,"terms":[{"re":1,"im":0,"plane":[0,0,0],"radial":1}]}"#,
    );
    let args = ["autocorr", "--spec", &spec, "--radii", "5,10", "--mc-samples", "20000", "--seed", "7"];
    let first = wavediff(&args);
    let second = wavediff(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let mut threaded = vec!["--threads", "2"];
    threaded.extend_from_slice(&args);
    let third = wavediff(&threaded);
    assert_eq!(report(&first).points, report(&third).points);
    assert!(report(&first).points[0].numeric.as_ref().unwrap().std_errors.is_some());
}

#[test]
fn reports_round_trip() {
    let out = wavediff(&["autocorr", "--builtin", "surprised", "--radii", "20,40"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rep = ReportDocument::from_json(&text).unwrap();
    assert_eq!(rep.to_json() + "\n", text);
}

#[test]
fn verify_list_and_exit_codes() {
    let out = wavediff(&["verify", "--list"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 13);

    let out = wavediff(&["verify", "--only", "11,13"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    assert_eq!(rep.passed, Some(true));
    assert_eq!(rep.checks.iter().map(|c| c.id).collect::<Vec<_>>(), vec![11, 13]);
    assert!(rep.checks.iter().all(|c| c.runtime_s.is_none() && c.margin >= 0.0));

    let out = wavediff(&["verify", "--only", "11,13", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    let rep = report(&out);
    assert_eq!(rep.passed, Some(false));
    let failed: Vec<u32> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.id).collect();
    assert_eq!(failed, vec![13]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("[FAIL] 13"));
}
