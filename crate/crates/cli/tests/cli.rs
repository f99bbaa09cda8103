//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gcnf")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code_of(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn eight_cycle_gcnf(forced_arcs: bool) -> String {
    let mut text = String::new();
    let clause_count = if forced_arcs { 8 } else { 0 };
    text.push_str(&format!("p gcnf 8 {clause_count} 8\n"));
    for i in 1..=8 {
        text.push_str(&format!("g a {} {} {}\n", i, i % 8 + 1, i));
    }
    text.push_str("g c acyclic\n");
    if forced_arcs {
        for i in 1..=8 {
            text.push_str(&format!("{i} 0\n"));
        }
    }
    text
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

#[test]
fn encode_reports_expected_sizes_per_method() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "cycle.gcnf", &eight_cycle_gcnf(false));
    let stats = dir.path().join("stats.json");
    let cnf = dir.path().join("out.cnf");
    let map = dir.path().join("map.json");

    let out = run(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--method",
        "ve",
        "--out",
        cnf.to_str().unwrap(),
        "--map",
        map.to_str().unwrap(),
        "--stats",
        stats.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "{out:?}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["width"], 1);
    assert_eq!(doc["added_clauses"], 15);
    assert_eq!(doc["aux_vars"], 14);
    assert_eq!(doc["estar_arcs"], 14);
    assert_eq!(doc["triangles"], 6);

    let dimacs = fs::read_to_string(&cnf).unwrap();
    assert!(dimacs.starts_with("p cnf 22 15\n"), "{dimacs}");
    let aux: serde_json::Value = serde_json::from_str(&fs::read_to_string(&map).unwrap()).unwrap();
    assert!(aux["eprime"].as_object().unwrap().len() == 14);

    let out = run(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--method",
        "tc",
        "--stats",
        stats.to_str().unwrap(),
        "--out",
        cnf.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["added_clauses"], 72);
    assert_eq!(doc["aux_vars"], 64);
}

#[test]
fn unknown_method_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "cycle.gcnf", &eight_cycle_gcnf(false));
    let out = run(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--method",
        "topological",
    ]);
    assert_ne!(code_of(&out), 0);
}

#[test]
fn parse_errors_exit_nonzero_with_line_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "bad.gcnf", "p gcnf 2 0 2\ng a 1 2 1\ng a 1 2 1\n");
    let out = run(&["encode", "--in", input.to_str().unwrap()]);
    assert_eq!(code_of(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn solve_grid_parity_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sat_grid = dir.path().join("g22.gcnf");
    let out = run(&["gen", "grid-hc", "2", "2", "--out", sat_grid.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0);
    let out = run(&["solve", "--in", sat_grid.to_str().unwrap()]);
    assert_eq!(code_of(&out), 10, "{out:?}");
    let text = stdout_of(&out);
    assert!(text.starts_with("SAT\n"));
    assert!(text.contains("arc 1 2"));

    let unsat_grid = dir.path().join("g33.gcnf");
    run(&["gen", "grid-hc", "3", "3", "--out", unsat_grid.to_str().unwrap()]);
    let out = run(&["solve", "--in", unsat_grid.to_str().unwrap()]);
    assert_eq!(code_of(&out), 20);
    assert!(stdout_of(&out).starts_with("UNSAT"));
}

#[test]
fn solve_forced_cycle_is_unsat() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "forced.gcnf", &eight_cycle_gcnf(true));
    for method in ["ve", "tc", "tr"] {
        let out = run(&["solve", "--in", input.to_str().unwrap(), "--method", method]);
        assert_eq!(code_of(&out), 20, "method {method}");
    }
}

#[test]
fn verify_reads_models_and_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "cycle.gcnf", &eight_cycle_gcnf(false));

    let empty_model = write_file(dir.path(), "empty.model", "");
    let out = run(&[
        "verify",
        "--in",
        input.to_str().unwrap(),
        "--model",
        empty_model.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("acyclic: PASS"), "{text}");

    let full_model = write_file(dir.path(), "full.model", "v 1 2 3 4 5 6 7 8 0\n");
    let out = run(&[
        "verify",
        "--in",
        input.to_str().unwrap(),
        "--model",
        full_model.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 1);
    let text = stdout_of(&out);
    assert!(text.contains("acyclic: FAIL (cycle "), "{text}");
}

#[test]
fn solve_model_output_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g24.gcnf");
    run(&["gen", "grid-hc", "2", "4", "--out", grid.to_str().unwrap()]);
    let model = dir.path().join("g24.model");
    let out = run(&[
        "solve",
        "--in",
        grid.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 10);
    let out = run(&[
        "verify",
        "--in",
        grid.to_str().unwrap(),
        "--model",
        model.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "{out:?}");
}

#[test]
fn gen_then_stats_reports_grid_shape() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g520.gcnf");
    let out = run(&["gen", "grid-hc", "5", "20", "--out", grid.to_str().unwrap()]);
    assert_eq!(code_of(&out), 0);
    let out = run(&["stats", "--in", grid.to_str().unwrap(), "--order", "mindegree"]);
    assert_eq!(code_of(&out), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(doc["nodes"], 100);
    assert_eq!(doc["arcs"], 348);
    assert!(doc["width"].as_u64().unwrap() <= 6);
    assert_eq!(doc["order_heuristic"], "mindegree");
}

#[test]
fn stats_matches_encode_stats_document() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "cycle.gcnf", &eight_cycle_gcnf(false));
    let out = run(&["stats", "--in", input.to_str().unwrap()]);
    let standalone: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();

    let stats = dir.path().join("stats.json");
    run(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--method",
        "ve",
        "--out",
        dir.path().join("out.cnf").to_str().unwrap(),
        "--stats",
        stats.to_str().unwrap(),
    ]);
    let encoded: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    for field in ["nodes", "arcs", "width", "estar_arcs", "triangles"] {
        assert_eq!(standalone[field], encoded[field], "field {field}");
    }
}

#[test]
fn given_ordering_file_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(dir.path(), "cycle.gcnf", &eight_cycle_gcnf(false));
    let order = write_file(dir.path(), "order.txt", "2\n4\n6\n8\n1\n5\n3\n7\n");
    let stats = dir.path().join("stats.json");
    let out = run(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--method",
        "ve",
        "--order",
        &format!("given:{}", order.to_str().unwrap()),
        "--out",
        dir.path().join("out.cnf").to_str().unwrap(),
        "--stats",
        stats.to_str().unwrap(),
    ]);
    assert_eq!(code_of(&out), 0, "{out:?}");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(doc["added_clauses"], 15);
    assert_eq!(doc["order_heuristic"], "given");

    let bad_order = write_file(dir.path(), "bad.txt", "1\n2\n");
    let out = run(&[
        "encode",
        "--in",
        input.to_str().unwrap(),
        "--order",
        &format!("given:{}", bad_order.to_str().unwrap()),
    ]);
    assert_eq!(code_of(&out), 1);
}

#[test]
fn gen_random_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.gcnf");
    let b = dir.path().join("b.gcnf");
    run(&["gen", "random", "8", "12", "ereach", "42", "--out", a.to_str().unwrap()]);
    run(&["gen", "random", "8", "12", "ereach", "42", "--out", b.to_str().unwrap()]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.contains("g c ereach"), "{text}");

    let out = run(&["gen", "random", "3", "7", "acyclic", "0"]);
    assert_eq!(code_of(&out), 1); // m above n(n-1)
}

#[cfg(unix)]
mod external_solver {
    use super::*;
    use std::os::unix::fs::PermissionsExt;

    fn write_script(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, body).unwrap();
        let mut perm = fs::metadata(&path).unwrap().permissions();
        perm.set_mode(0o755);
        fs::set_permissions(&path, perm).unwrap();
        path
    }

    #[test]
    fn external_unsat_answer_is_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let grid = dir.path().join("g33.gcnf");
        run(&["gen", "grid-hc", "3", "3", "--out", grid.to_str().unwrap()]);
        let script = write_script(
            dir.path(),
            "unsat.sh",
            "#!/bin/sh\necho \"s UNSATISFIABLE\"\nexit 20\n",
        );
        let out = run(&[
            "solve",
            "--in",
            grid.to_str().unwrap(),
            "--solver",
            &format!("cmd:{} {{cnf}}", script.to_str().unwrap()),
        ]);
        assert_eq!(code_of(&out), 20, "{out:?}");
    }

    /// The encode path is deterministic, so a model captured from the
    /// internal solver doubles as a canned external solver answer for the
    /// same instance.
    #[test]
    fn external_sat_answer_verifies_and_agrees_with_internal() {
        let dir = tempfile::tempdir().unwrap();
        let grid = dir.path().join("g22.gcnf");
        run(&["gen", "grid-hc", "2", "2", "--out", grid.to_str().unwrap()]);
        let model = dir.path().join("internal.model");
        let internal = run(&[
            "solve",
            "--in",
            grid.to_str().unwrap(),
            "--out",
            model.to_str().unwrap(),
        ]);
        assert_eq!(code_of(&internal), 10);

        let script = write_script(
            dir.path(),
            "sat.sh",
            &format!(
                "#!/bin/sh\necho \"s SATISFIABLE\"\ncat {}\n",
                model.to_str().unwrap()
            ),
        );
        let external = run(&[
            "solve",
            "--in",
            grid.to_str().unwrap(),
            "--solver",
            &format!("cmd:{} {{cnf}}", script.to_str().unwrap()),
        ]);
        assert_eq!(code_of(&external), 10, "{external:?}");
        assert_eq!(stdout_of(&internal), stdout_of(&external));
    }

    #[test]
    fn external_failures_are_errors() {
        let dir = tempfile::tempdir().unwrap();
        let grid = dir.path().join("g22.gcnf");
        run(&["gen", "grid-hc", "2", "2", "--out", grid.to_str().unwrap()]);

        let out = run(&[
            "solve",
            "--in",
            grid.to_str().unwrap(),
            "--solver",
            "cmd:/nonexistent/solver {cnf}",
        ]);
        assert_eq!(code_of(&out), 1);

        let garbage = write_script(dir.path(), "garbage.sh", "#!/bin/sh\necho hello\nexit 3\n");
        let out = run(&[
            "solve",
            "--in",
            grid.to_str().unwrap(),
            "--solver",
            &format!("cmd:{} {{cnf}}", garbage.to_str().unwrap()),
        ]);
        assert_eq!(code_of(&out), 1);

        // A claimed-SAT answer whose model violates the constraints must be
        // rejected, not passed through.
        let wrong = write_script(
            dir.path(),
            "wrong.sh",
            "#!/bin/sh\necho \"s SATISFIABLE\"\necho \"v 0\"\n",
        );
        let out = run(&[
            "solve",
            "--in",
            grid.to_str().unwrap(),
            "--solver",
            &format!("cmd:{} {{cnf}}", wrong.to_str().unwrap()),
        ]);
        assert_eq!(code_of(&out), 1, "{out:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("verification"), "{err}");
    }
}

#[test]
fn conflict_budget_aborts_with_error_exit() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("g35.gcnf");
    run(&["gen", "grid-hc", "3", "5", "--out", grid.to_str().unwrap()]);
    let out = run(&[
        "solve",
        "--in",
        grid.to_str().unwrap(),
        "--conflict-budget",
        "0",
    ]);
    assert_eq!(code_of(&out), 1);
    assert!(stdout_of(&out).starts_with("UNKNOWN"));
}
