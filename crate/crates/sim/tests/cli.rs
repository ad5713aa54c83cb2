use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn clocksim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clocksim"))
        .args(args)
        .output()
        .expect("run clocksim")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("clocksim-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn render_matches_goldens() {
    let face = clocksim(&["render", "--time", "00:00:00"]);
    assert!(face.status.success());
    assert_eq!(stdout(&face), include_str!("golden/00_00_00.txt"));

    let demo = clocksim(&["render", "--demo-digits"]);
    assert!(demo.status.success());
    assert_eq!(stdout(&demo), include_str!("golden/ten_digits.txt"));
}

#[test]
fn run_with_script_and_snapshots() {
    let dir = scratch("run");
    let script = dir.join("hour.txt");
    fs::write(
        &script,
        "# SET, INC, then SET three times\n100 set down\n150 set up\n300 inc down\n350 inc up\n\
         500 set down\n550 set up\n700 set down\n750 set up\n900 set down\n950 set up\n",
    )
    .unwrap();
    let snaps = dir.join("snaps");
    for firmware in ["native", "basic"] {
        let out = clocksim(&[
            "run",
            "--firmware",
            firmware,
            "--script",
            script.to_str().unwrap(),
            "--duration-ms",
            "1000",
            "--snapshot-dir",
            snaps.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).starts_with("T=1000 01:00:00 mode=run\n"), "{firmware}");
    }
    let mut names: Vec<String> = fs::read_dir(&snaps)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.first().unwrap(), "000000000.txt");
    let first = fs::read_to_string(snaps.join("000000000.txt")).unwrap();
    assert_eq!(first, include_str!("golden/00_00_00.txt"));
}

#[test]
fn every_frame_writes_one_snapshot_per_ms() {
    let dir = scratch("every");
    let out = clocksim(&[
        "run",
        "--duration-ms",
        "49",
        "--every-frame",
        "--snapshot-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read_dir(&dir).unwrap().count(), 50);
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    let bad_script = dir.join("bad.txt");
    fs::write(&bad_script, "100 set up\n").unwrap();
    let out = clocksim(&["run", "--script", bad_script.to_str().unwrap(), "--duration-ms", "500"]);
    assert_eq!(out.status.code(), Some(2));

    let out = clocksim(&["run", "--scan-ms", "0", "--duration-ms", "10"]);
    assert_eq!(out.status.code(), Some(2));

    let bad_glyphs = dir.join("glyphs.txt");
    fs::write(&bad_glyphs, "digit 0\n").unwrap();
    let out = clocksim(&["run", "--glyphs", bad_glyphs.to_str().unwrap(), "--duration-ms", "10"]);
    assert_eq!(out.status.code(), Some(2));

    let bad_fw = dir.join("bad.bas");
    fs::write(&bad_fw, "Do\n  Incr Ss\n").unwrap();
    let out = clocksim(&["run", "--firmware", bad_fw.to_str().unwrap(), "--duration-ms", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("firmware"));

    let out = clocksim(&["run", "--duration-ms", "10"]);
    assert_eq!(out.status.code(), Some(0));
}
