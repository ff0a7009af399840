use num_complex::Complex64;
use proptest::prelude::*;
use sckerr_cli::files::{GridFile, SeriesFile};
use sckerr_cli::plot::{emit_plot_script, PlotStyle};
use sckerr_cli::{run, CliError};
use std::path::{Path, PathBuf};

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sckerr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn sckerr(args: &[&str]) -> i32 {
    run(std::iter::once("sckerr").chain(args.iter().copied()))
}

fn arg(p: &Path) -> String {
    p.display().to_string()
}

#[test]
fn quantum_autocorrelation_starts_at_one() {
    let out = tmp("auto.csv");
    let code = sckerr(&["autocorr", "--method", "quantum", "--center", "5,0", "--tmax", "0.3927", "--nt", "400", "--out", &arg(&out)]);
    assert_eq!(code, 0);
    let s = SeriesFile::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(s.t.len(), 400);
    assert_eq!(s.t[0], 0.0);
    assert!((s.values[0] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    assert!(Path::new(&format!("{}.gp", arg(&out))).exists());
}

#[test]
fn propagator_grid_file_has_the_requested_shape() {
    let out = tmp("hk.grid");
    let code = sckerr(&["propagator", "--system", "kerr", "--method", "hk", "--t", "0.031", "--grid", "41", "--window", "9.4248", "--out", &arg(&out)]);
    assert_eq!(code, 0);
    let g = GridFile::parse(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!((g.nx, g.ny), (41, 41));
    assert_eq!(g.x_range, (-9.4248, 9.4248));
    assert_eq!(g.t, 0.031);
}

#[test]
fn outputs_are_deterministic_across_thread_counts() {
    let a = tmp("det1.grid");
    let b = tmp("det2.grid");
    for (p, threads) in [(&a, "1"), (&b, "2")] {
        let code = sckerr(&["--threads", threads, "propagator", "--method", "vvg", "--t", "0.05", "--grid", "31", "--out", &arg(p)]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(sckerr(&["teleport"]), 2);
    assert_eq!(sckerr(&["flow", "--center", "1"]), 2);
    assert_eq!(sckerr(&["propagator", "--method", "hk", "--t", "0.1", "--grid", "1"]), 2);
    assert_eq!(sckerr(&["stickiness", "--radii", "1:2"]), 2);
}

#[test]
fn numerical_guards_exit_with_three() {
    assert_eq!(sckerr(&["flow", "--center", "3,2", "--t", "0.3", "--steps", "3"]), 3);
    let e = CliError::Numerical(sckerr::Error::SamplingTooCoarse { tau: 0.1, zeros: 2 });
    assert_eq!(e.exit_code(), 3);
}

#[test]
fn flow_and_stickiness_run() {
    assert_eq!(sckerr(&["flow", "--center", "1,0.5", "--t", "0.2"]), 0);
    let out = tmp("stick.csv");
    assert_eq!(sckerr(&["stickiness", "--radii", "1:3:5", "--times", "0.117,0.205", "--n-phi", "720", "--out", &arg(&out)]), 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn verify_exit_code_follows_the_checks() {
    let all_pass = sckerr_validation::quick_checks().iter().all(|c| c.pass);
    assert_eq!(sckerr(&["verify"]), if all_pass { 0 } else { 1 });
}

#[test]
fn plot_scripts() {
    assert!(matches!(emit_plot_script(&[], PlotStyle::Modulus), Err(CliError::MissingFile(_))));
    assert!(matches!(
        emit_plot_script(&[tmp("does-not-exist.grid")], PlotStyle::Modulus),
        Err(CliError::MissingFile(_))
    ));
    let paths: Vec<PathBuf> = (0..3).map(|k| tmp(&format!("panel{k}.grid"))).collect();
    for (k, p) in paths.iter().enumerate() {
        let g = GridFile { nx: 2, ny: 2, x_range: (-1.0, 1.0), y_range: (-1.0, 1.0), t: k as f64, values: vec![Complex64::new(1.0, 0.0); 4] };
        std::fs::write(p, g.emit()).unwrap();
    }
    let one = emit_plot_script(&paths[..1], PlotStyle::Modulus).unwrap();
    assert!(one.contains("layout 1,1") && one.matches("with image").count() == 1);
    let three = emit_plot_script(&paths, PlotStyle::Real).unwrap();
    assert!(three.contains("layout 1,3") && three.matches("with image").count() == 3);
    assert_eq!(three, emit_plot_script(&paths, PlotStyle::Real).unwrap());
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6f64..1e6, -1e-8f64..1e-8, any::<f64>().prop_filter("finite", |x| x.is_finite())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn grid_file_round_trip(nx in 1usize..5, ny in 1usize..5, vals in prop::collection::vec((finite(), finite()), 16), t in finite()) {
        let values: Vec<Complex64> = vals.iter().take(nx * ny).map(|&(a, b)| Complex64::new(a, b)).collect();
        let g = GridFile { nx, ny, x_range: (-3.0, 2.5), y_range: (0.1, 0.7), t, values };
        let text = g.emit();
        let back = GridFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.emit(), text);
    }

    #[test]
    fn series_file_round_trip(vals in prop::collection::vec((finite(), finite()), 1..20)) {
        let t: Vec<f64> = (0..vals.len()).map(|k| 0.013 * k as f64).collect();
        let values = vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let s = SeriesFile { t, values };
        let text = s.emit();
        let back = SeriesFile::parse(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.emit(), text);
    }
}
