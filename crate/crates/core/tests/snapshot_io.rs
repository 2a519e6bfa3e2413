use tumour_damage::config::RunConfig;
use tumour_damage::snapshot::{read_snapshot, render_snapshot, snapshot_paths, write_snapshot};
use tumour_damage::stepper::{advance, initialize};

fn small_config() -> RunConfig {
    RunConfig {
        nx: 12,
        ny: 10,
        lx: 6.0,
        ly: 5.0,
        ..RunConfig::default()
    }
}

#[test]
fn written_snapshot_reads_back_bit_for_bit() {
    let cfg = small_config();
    let p = cfg.effective_params();
    let mut s = initialize(&cfg.initial_data(), &p).unwrap();
    for _ in 0..3 {
        s = advance(&s, &p).unwrap().0;
    }
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("step_000003");
    write_snapshot(&s, p.tau, &base).unwrap();
    for path in snapshot_paths(&base) {
        assert!(path.exists(), "{}", path.display());
    }
    let (back, tau) = read_snapshot(&base).unwrap();
    assert_eq!(tau, p.tau);
    assert_eq!((back.k, back.t), (3, s.t));
    assert_eq!(back.phi, s.phi);
    assert_eq!(back.mu, s.mu);
    assert_eq!(back.sigma, s.sigma);
    assert_eq!(back.z, s.z);
    assert_eq!(back.u, s.u);
    assert_eq!(back.v, s.v);

    // Restarting from the file continues the run to round-off.
    let direct = advance(&s, &p).unwrap().0;
    let resumed = advance(&back, &p).unwrap().0;
    assert!(direct.phi.max_abs_diff(&resumed.phi) < 1e-12);
    assert!(direct.u.max_abs_diff(&resumed.u) < 1e-12);
}

#[test]
fn reruns_render_identical_bytes() {
    let cfg = small_config();
    let p = cfg.effective_params();
    let run = || {
        let mut s = initialize(&cfg.initial_data(), &p).unwrap();
        for _ in 0..4 {
            s = advance(&s, &p).unwrap().0;
        }
        render_snapshot(&s, p.tau)
    };
    assert_eq!(run(), run());
}

#[test]
fn missing_files_are_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let err = read_snapshot(&dir.path().join("nothing")).unwrap_err();
    assert!(matches!(err, tumour_damage::snapshot::SnapshotError::Io { .. }));
}
