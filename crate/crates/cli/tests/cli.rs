use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wiperbench"));
    c.env_remove("WIPERBENCH_TRACE_DIR");
    c
}

fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn assemble_firmware(dir: &Path) -> PathBuf {
    let hex = dir.join("wiper.hex");
    let out = bin()
        .args(["asm"])
        .arg(repo().join("firmware/wiper.a51"))
        .arg("-o")
        .arg(&hex)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    hex
}

const SHORT_LIGHT: &str = "name = short\nhorizon_ms = 1200\nschedule\n0 0.3\nend\n\
assert pulse_count from_ms=100 to_ms=1100 expected=50 tol=1\n";

#[test]
fn asm_writes_hex_and_listing() {
    let dir = tempfile::tempdir().unwrap();
    let hex = assemble_firmware(dir.path());
    let text = std::fs::read_to_string(&hex).unwrap();
    assert!(text.starts_with(':'));
    assert!(text.ends_with(":00000001FF\n"));
    let lst = dir.path().join("wiper.lst");
    let out = bin()
        .arg("asm")
        .arg(repo().join("firmware/wiper.a51"))
        .args([
            "-o".as_ref(),
            hex.as_os_str(),
            "--listing".as_ref(),
            lst.as_os_str(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(std::fs::read_to_string(lst).unwrap().contains("START"));
}

#[test]
fn asm_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("bad.a51");
    std::fs::write(&src, "        MOV A,#\n").unwrap();
    let out = bin()
        .arg("asm")
        .arg(&src)
        .arg("-o")
        .arg(dir.path().join("x.hex"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn disasm_prints_instructions() {
    let dir = tempfile::tempdir().unwrap();
    let hex = assemble_firmware(dir.path());
    let out = bin().arg("disasm").arg(&hex).output().unwrap();
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("LJMP 0x0030"), "{text}");
    assert!(text.contains("ORG 0x0030"));
}

#[test]
fn run_without_firmware_is_usage_error() {
    let out = bin()
        .arg("run")
        .arg(repo().join("scenarios/dry.scn"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn run_passing_scenario_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let hex = assemble_firmware(dir.path());
    let scn = dir.path().join("short.scn");
    std::fs::write(&scn, SHORT_LIGHT).unwrap();
    let out = bin()
        .arg("run")
        .arg(&scn)
        .arg("--firmware")
        .arg(&hex)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("scenario short: PASS"));
}

#[test]
fn failing_assertion_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.scn"),
        SHORT_LIGHT.replace("expected=50", "expected=10"),
    )
    .unwrap();
    let out = bin().arg("check").arg(dir.path()).output().unwrap();
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("1 scenarios, 0 passed, 1 failed"));
}

#[test]
fn invalid_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.scn"),
        "name = x\nhorizon_ms = 10\nschedule\n0 1.5\nend\n",
    )
    .unwrap();
    let out = bin().arg("check").arg(dir.path()).output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn trace_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let scn = dir.path().join("scn");
    std::fs::create_dir(&scn).unwrap();
    std::fs::write(scn.join("short.scn"), SHORT_LIGHT).unwrap();
    let traces = dir.path().join("traces");
    let out = bin()
        .env("WIPERBENCH_TRACE_DIR", &traces)
        .args([
            "check".as_ref(),
            scn.as_os_str(),
            "--format".as_ref(),
            "vcd".as_ref(),
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let vcd = std::fs::read_to_string(traces.join("short.vcd")).unwrap();
    assert!(vcd.starts_with("$version"));
    assert!(stdout(&out).contains("trace short.vcd"));
}

#[test]
fn shipped_scenarios_pass() {
    let out = bin()
        .arg("check")
        .arg(repo().join("scenarios"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).ends_with("5 scenarios, 5 passed, 0 failed\n"));
}
