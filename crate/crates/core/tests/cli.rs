use std::process::Command;

fn cinematic(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cinematic")).args(args).env("CINEMATIC_THREADS", "2").output().unwrap()
}

#[test]
fn wolff_writes_csv_and_passes() {
    let out = cinematic(&["wolff", "--delta-max", "2^-5", "--delta-min", "0.0078125", "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("# experiment=wolff\n"));
    assert!(csv.contains("# seed=3\n"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn concentric_stack_misses_the_threshold() {
    let out = cinematic(&["wolff", "--concentric", "--delta-min", "8"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dump_and_check_round_trip() {
    let dir = std::env::temp_dir().join(format!("cinematic-cli-{}", std::process::id()));
    let d = dir.to_str().unwrap();
    let out = cinematic(&["quasi", "--alpha", "0.5", "--zeta", "0.8", "--delta-min", "7", "--dump", d, "--out", &format!("{d}/q.csv")]);
    assert!(out.status.code().is_some_and(|c| c <= 1));
    for f in ["family.txt", "field.pgm", "product.txt", "q.csv"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let chk = cinematic(&["check", &format!("{d}/product.txt")]);
    assert!(chk.status.success());
    assert!(String::from_utf8(chk.stdout).unwrap().contains("worst rectangle ratio"));
    let chk = cinematic(&["check", &format!("{d}/family.txt")]);
    assert!(chk.status.success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_arguments_exit_with_two() {
    assert_eq!(cinematic(&["wolff", "--delta-min", "0.3"]).status.code(), Some(2));
    assert_eq!(cinematic(&["quasi", "--alpha", "0.9", "--zeta", "0.5", "--delta-min", "6"]).status.code(), Some(2));
    assert_eq!(cinematic(&["lens", "--n", "32"]).status.code(), Some(2));
}

#[test]
fn validate_subset() {
    let out = cinematic(&["validate", "8"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("[PASS]  8."));
}
