use std::process::Command;

fn cqm(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cqm"))
        .args(args)
        .output()
        .expect("run cqm")
}

#[test]
fn figure_commands_are_byte_identical_across_runs() {
    let cases: [&[&str]; 6] = [
        &["potential", "--g", "1", "--alpha", "1", "--op", "S"],
        &["flow", "--alpha", "2", "--mirror"],
        &["phase-field", "--nq", "5", "--np", "5"],
        &["orbit", "--g", "1", "--alpha", "2", "--energy", "2"],
        &["dos", "--route", "digamma", "--format", "json"],
        &["propagator", "--kind", "K_R", "--t", "0.3,0.7"],
    ];
    for args in cases {
        let a = cqm(args);
        let b = cqm(args);
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn csv_headers_name_columns() {
    let out = String::from_utf8(cqm(&["orbit", "--alpha", "2"]).stdout).unwrap();
    let mut lines = out.lines().skip_while(|l| l.starts_with('#'));
    assert_eq!(lines.next(), Some("tau,q,p,energy"));
    let out = String::from_utf8(cqm(&["phase-field"]).stdout).unwrap();
    assert!(out.starts_with("# "));
    assert!(out.lines().any(|l| l == "q,p,dq,dp"));
    let out = String::from_utf8(cqm(&["flow"]).stdout).unwrap();
    assert!(out.lines().any(|l| l == "curve,s,t,r"));
}

#[test]
fn orbit_closes_after_one_period() {
    let out = String::from_utf8(cqm(&["orbit", "--g", "1", "--alpha", "2", "--energy", "2"]).stdout).unwrap();
    let rows: Vec<Vec<f64>> = out
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!((last[0] - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    assert!(
        (last[1] - first[1]).abs() < 1e-7 && (last[2] - first[2]).abs() < 1e-7,
        "{first:?} {last:?}"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(cqm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cqm(&["period", "--energy", "0.5"]).status.code(), Some(1));
    assert_eq!(cqm(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_quick_passes() {
    let out = cqm(&["verify", "--quick"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}
