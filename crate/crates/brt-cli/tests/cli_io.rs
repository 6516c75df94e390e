//! Persistence format and command-line surface.

use std::path::Path;
use std::process::Command;

use brt_cli::field_file::{read, read_bytes, write_field, write_spectrum};
use brt_cli::CliError;
use brt_core::spectral::dft2;
use brt_core::{Field2D, Grid2D};

fn sample_field() -> Field2D {
    let g = Grid2D::new(-0.75, -1.0, 0.00375, 1.0 / 300.0, 24, 16).unwrap();
    Field2D::sample(g, |p| (7.3 * p.t - 2.1 * p.y).sin() * 0.37)
}

#[test]
fn field_file_roundtrip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.brt");
    let f = sample_field();
    write_field(&path, &f).unwrap();
    let back = read(&path).unwrap().into_real().unwrap();
    assert_eq!(f.grid, back.grid);
    for (a, b) in f.values().iter().zip(back.values()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }

    let spec = dft2(&f);
    let spath = dir.path().join("spec.brt");
    write_spectrum(&spath, &spec).unwrap();
    let back = read(&spath).unwrap().into_complex().unwrap();
    for (a, b) in spec.coeffs().iter().zip(back.coeffs()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
}

#[test]
fn corrupted_files_are_rejected_distinctly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.brt");
    write_field(&path, &sample_field()).unwrap();
    let bytes = std::fs::read(&path).unwrap();

    let mut bad_magic = bytes.clone();
    bad_magic[0] = b'X';
    assert!(matches!(read_bytes(&bad_magic), Err(CliError::BadMagic(_))));

    let truncated = &bytes[..bytes.len() - 9];
    assert!(matches!(
        read_bytes(truncated),
        Err(CliError::TruncatedPayload { .. })
    ));

    let mut bad_kind = bytes.clone();
    bad_kind[6] = 9;
    assert!(matches!(read_bytes(&bad_kind), Err(CliError::UnknownKind(9))));

    let mut bad_version = bytes;
    bad_version[4] = 99;
    assert!(matches!(
        read_bytes(&bad_version),
        Err(CliError::UnsupportedVersion(_))
    ));
}

fn brt_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_brt"))
}

fn run_ok(args: &[&str]) -> String {
    let out = brt_bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn cli_forward_on_empty_phantom_writes_zero_field() {
    let dir = tempfile::tempdir().unwrap();
    let phantom_path = dir.path().join("empty.txt");
    std::fs::write(&phantom_path, "# no ellipses\n").unwrap();
    let out = dir.path().join("zero.brt");
    run_ok(&[
        "forward",
        "--phantom",
        phantom_path.to_str().unwrap(),
        "--grid",
        "-1,1,16,-1,1,16",
        "--mode",
        "brt",
        "--xi-i",
        "pi",
        "--xi-j",
        "pi/11",
        "-o",
        out.to_str().unwrap(),
    ]);
    let f = read(&out).unwrap().into_real().unwrap();
    assert_eq!(f.grid.nt, 16);
    assert!(f.values().iter().all(|&v| v == 0.0));
}

#[test]
fn cli_noise_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let field_path = dir.path().join("f.brt");
    write_field(&field_path, &sample_field()).unwrap();
    let (a, b) = (dir.path().join("a.brt"), dir.path().join("b.brt"));
    for out in [&a, &b] {
        run_ok(&[
            "noise",
            "-i",
            field_path.to_str().unwrap(),
            "--std-factor",
            "1e-3",
            "--seed",
            "99",
            "-o",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn cli_metrics_reports_machine_readable_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = sample_field();
    let fp = dir.path().join("f.brt");
    write_field(&fp, &f).unwrap();
    let stdout = run_ok(&[
        "metrics",
        "--estimate",
        fp.to_str().unwrap(),
        "--reference",
        fp.to_str().unwrap(),
    ]);
    assert!(stdout.contains("peak_abs_err=0.000000e0"), "{stdout}");
    assert!(stdout.contains("rel_l2=0.000000e0"));
}

#[test]
fn cli_rejects_invalid_flags_with_error_line() {
    let out = brt_bin()
        .args(["forward", "--mode", "nope", "-o", "/tmp/x.brt"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.lines().any(|l| l.starts_with("error:")), "{err}");
}

#[test]
fn cli_roundtrip_pipeline_smoke() {
    // forward -> extend -> filter -> invert -> metrics runs end to end on a
    // small disk phantom
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    let phantom_path = d("disk.txt");
    std::fs::write(&phantom_path, "0 0 0.3 0.3 0 1.0\n").unwrap();
    run_ok(&[
        "forward",
        "--phantom",
        phantom_path.to_str().unwrap(),
        "--grid",
        "-1,1,128,-1,1,128",
        "--xi-j",
        "pi/7",
        "-o",
        d("g.brt").to_str().unwrap(),
    ]);
    run_ok(&[
        "extend",
        "-i",
        d("g.brt").to_str().unwrap(),
        "--xi-j",
        "pi/7",
        "--m-t",
        "48",
        "-o",
        d("ext.brt").to_str().unwrap(),
    ]);
    run_ok(&[
        "filter",
        "-i",
        d("ext.brt").to_str().unwrap(),
        "--xi-j",
        "pi/7",
        "--a-i",
        "0.125",
        "--a-j",
        "0.125",
        "-o",
        d("gm.brt").to_str().unwrap(),
    ]);
    run_ok(&[
        "invert",
        "-i",
        d("gm.brt").to_str().unwrap(),
        "--xi-j",
        "pi/7",
        "--eps",
        "1e-6",
        "-o",
        d("psi.brt").to_str().unwrap(),
    ]);
    let psi = read(&d("psi.brt")).unwrap().into_real().unwrap();
    assert!(psi.max_abs().is_finite());
    assert!(psi.max_abs() > 0.0);
}

#[test]
fn sidecar_directory_contents() {
    // repro fig3 writes panels and sidecars
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.txt");
    std::fs::write(&cfg, "nt = 60\nny = 90\n").unwrap();
    run_ok(&[
        "repro",
        "fig3",
        "--config",
        cfg.to_str().unwrap(),
        "--outdir",
        dir.path().to_str().unwrap(),
    ]);
    for name in ["fig3_reference.pgm", "fig3_brt_data1.pgm", "fig3_brt_data2.pgm"] {
        assert!(Path::new(&dir.path().join(name)).exists(), "{name} missing");
        assert!(dir.path().join(name).with_extension("pgm.txt").exists());
    }
}

#[test]
fn cli_spectrum_panel_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("k.brt");
    let pgm = dir.path().join("k.pgm");
    run_ok(&[
        "spectrum",
        "--grid",
        "-0.75,0.75,80,-1,1,120",
        "--xi-j",
        "pi/7",
        "--eps",
        "1e-5",
        "--kind",
        "k",
        "-o",
        field.to_str().unwrap(),
        "--pgm",
        pgm.to_str().unwrap(),
    ]);
    let f = read(&field).unwrap().into_real().unwrap();
    // stabilized reciprocal never exceeds its cap
    let cap = 1.0 / (2.0 * 1e-5f64.sqrt());
    assert!(f.max_abs() <= cap * (1.0 + 1e-9));
    assert!(f.max_abs() > 0.5 * cap);
    assert!(pgm.exists());
}
