use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use multisect::constructions::{bisection_from_heegaard, double_bisection, glue_bisections, lens_diagram, CapChoice, GluePlan};
use multisect::io::{parse_msd, write_hd, write_msd};
use multisect::render::render_svg;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multisect"))
}

fn run_in(dir: &Path, args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = bin()
        .current_dir(dir)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(s) = stdin {
            pipe.write_all(s.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn section<'a>(report: &'a str, title: &str) -> &'a str {
    let head = format!("== {title} ==\n");
    let start = report.find(&head).unwrap_or_else(|| panic!("no section {title} in\n{report}")) + head.len();
    let end = report[start..].find("\n== ").map_or(report.len(), |k| start + k + 1);
    &report[start..end]
}

#[test]
fn lens_then_bisect_pipeline_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let hd = run_in(dir.path(), &["construct", "lens", "--p", "2", "--q", "1"], None);
    assert!(hd.status.success());
    let h = lens_diagram(2, 1).unwrap();
    assert_eq!(stdout(&hd), write_hd(&h));

    let msd = run_in(dir.path(), &["construct", "bisect"], Some(&stdout(&hd)));
    assert!(msd.status.success());
    assert_eq!(stdout(&msd), write_msd(&bisection_from_heegaard(&h).unwrap()));
    assert_eq!(String::from_utf8_lossy(&msd.stderr).trim(), "genus 2 types 1 1");
}

#[test]
fn double_and_glue_are_closed() {
    let dir = tempfile::tempdir().unwrap();
    let h = lens_diagram(2, 1).unwrap();
    fs::write(dir.path().join("l21.hd"), write_hd(&h)).unwrap();
    let b = run_in(dir.path(), &["construct", "bisect", "--input", "l21.hd", "--output", "b.msd"], None);
    assert!(b.status.success());
    let d = run_in(dir.path(), &["construct", "double", "--input", "b.msd"], None);
    let doubled = parse_msd(&stdout(&d)).unwrap();
    assert!(doubled.is_closed());
    assert_eq!(doubled.system_count(), 4);
    assert_eq!(doubled, double_bisection(&bisection_from_heegaard(&h).unwrap()).unwrap());

    let g = run_in(dir.path(), &["construct", "glue", "--copies", "2", "--cap", "auto", "--input", "l21.hd"], None);
    assert!(g.status.success());
    let glued = parse_msd(&stdout(&g)).unwrap();
    assert!(glued.is_closed());
    assert_eq!(glued.system_count(), 6);
    assert_eq!(glued, glue_bisections(&GluePlan::new(h, 2, CapChoice::Auto)).unwrap());
}

#[test]
fn validate_exit_codes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let b = bisection_from_heegaard(&lens_diagram(2, 1).unwrap()).unwrap();
    let text = write_msd(&b);
    fs::write(dir.path().join("b.msd"), &text).unwrap();
    let ok = run_in(dir.path(), &["validate", "--input", "b.msd"], None);
    assert_eq!(ok.status.code(), Some(0));
    let report = stdout(&ok);
    assert_eq!(section(&report, "validation").trim_end(), b.validate(10_000).unwrap().to_string());
    assert!(report.contains("boundary: free_rank 0 torsion [2, 2]"));
    // byte-stable
    assert_eq!(stdout(&run_in(dir.path(), &["validate", "--input", "b.msd"], None)), report);

    let corrupted = text.replace("types 1 1", "types 2 1");
    fs::write(dir.path().join("bad.msd"), corrupted).unwrap();
    let bad = run_in(dir.path(), &["validate", "--input", "bad.msd"], None);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("RefutedByHomology"), "{}", stdout(&bad));
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.msd"), "MSD 1\ngenus 1\nclosed maybe\n").unwrap();
    let o = run_in(dir.path(), &["validate", "--input", "x.msd"], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn pi1_of_double_has_invariant_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = double_bisection(&bisection_from_heegaard(&lens_diagram(2, 1).unwrap()).unwrap()).unwrap();
    fs::write(dir.path().join("d.msd"), write_msd(&d)).unwrap();
    let o = run_in(dir.path(), &["pi1", "--input", "d.msd"], None);
    assert!(o.status.success());
    assert_eq!(section(&stdout(&o), "abelianization"), "free_rank 0 torsion [2]\n");
}

#[test]
fn distinguish_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("z5.pres"), "gens 2\ng1 g1 g1 g1 g1\ng2 g2 g2 g2 g2\ng1 g2 g1^-1 g2^-1\n").unwrap();
    let base = ["distinguish", "--presentation", "z5.pres", "--t1", "g1, g2"];
    let code = |t2: &str, extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend(["--t2", t2]);
        args.extend(extra);
        run_in(dir.path(), &args, None).status.code()
    };
    assert_eq!(code("g1 g1, g2", &[]), Some(0));
    assert_eq!(code("g1, g2", &[]), Some(10));
    assert_eq!(code("g1 g1, g2", &["--bound", "4"]), Some(20));
    assert_eq!(code("g1", &[]), Some(2));
}

#[test]
fn render_writes_library_svg() {
    let dir = tempfile::tempdir().unwrap();
    let b = bisection_from_heegaard(&lens_diagram(2, 1).unwrap()).unwrap();
    fs::write(dir.path().join("b.msd"), write_msd(&b)).unwrap();
    let o = run_in(dir.path(), &["render", "--input", "b.msd", "--svg", "b.svg"], None);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("b.svg")).unwrap(), render_svg(&b));
}
