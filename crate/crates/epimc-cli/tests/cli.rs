//! End-to-end tests for the `epimc` binary.
//!
//! Every test spawns the compiled binary directly (no shell) so exit codes are
//! observed unmasked. Expected tokens and counts were pinned from verified runs.

use std::path::{Path, PathBuf};
use std::process::Command;

const MODEL_JSON: &str = r#"{
  "agents": 1,
  "base": { "state": ["p"], "bases": { "1": ["p"] } },
  "context": []
}"#;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Out {
    fn stdout_has(&self, token: &str) -> &Self {
        assert!(
            self.stdout.contains(token),
            "stdout missing {token:?}\nstdout: {}\nstderr: {}",
            self.stdout,
            self.stderr
        );
        self
    }

    fn stderr_has(&self, token: &str) -> &Self {
        assert!(
            self.stderr.contains(token),
            "stderr missing {token:?}\nstderr: {}",
            self.stderr
        );
        self
    }

    fn code_is(&self, code: i32) -> &Self {
        assert_eq!(
            self.code, code,
            "expected exit {code}\nstdout: {}\nstderr: {}",
            self.stdout, self.stderr
        );
        self
    }
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> Out {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_epimc"));
    // Isolate from any caps/timeouts set in the outer environment.
    for var in ["EPIMC_MAX_CONTEXT", "EPIMC_MAX_WORLDS", "EPIMC_TIMEOUT_MS"] {
        cmd.env_remove(var);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    let output = cmd.args(args).output().expect("spawn epimc");
    Out {
        code: output.status.code().expect("exit code"),
        stdout: String::from_utf8(output.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(output.stderr).expect("utf-8 stderr"),
    }
}

fn run(args: &[&str]) -> Out {
    run_with_env(args, &[])
}

/// Per-test scratch directory (unique so parallel tests never collide).
fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir()
        .join(format!("epimc-cli-tests-{}", std::process::id()))
        .join(test);
    std::fs::create_dir_all(&dir).expect("create scratch dir");
    dir
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).expect("write fixture");
    path.to_str().expect("utf-8 path").to_owned()
}

// ---------------------------------------------------------------- check

#[test]
fn check_pool_reports_verdict_true() {
    let dir = scratch("check_true");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run(&[
        "check", "--model", &model, "--alpha", "true", "--phi", "B[1] p", "--tri-depth", "1",
    ]);
    out.code_is(0)
        .stdout_has("command=check")
        .stdout_has("engine=pool")
        .stdout_has("pool_size=4")
        .stdout_has("tri_depth=1")
        .stdout_has("atoms={p}")
        .stdout_has("context_size=32")
        .stdout_has("verdict=true");
}

#[test]
fn check_false_verdict_exits_one() {
    let dir = scratch("check_false");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run(&["check", "--model", &model, "--phi", "B[1] ~p"]);
    out.code_is(1).stdout_has("verdict=false");
}

#[test]
fn check_json_is_single_object() {
    let dir = scratch("check_json");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run(&["check", "--model", &model, "--phi", "B[1] p", "--json"]);
    out.code_is(0);
    let value: serde_json::Value = serde_json::from_str(&out.stdout).expect("stdout is JSON");
    let obj = value.as_object().expect("single object");
    assert_eq!(obj["command"], "check");
    assert_eq!(obj["verdict"], "true");
    assert_eq!(obj["pool_size"], "4");
}

#[test]
fn check_timing_appends_elapsed() {
    let dir = scratch("check_timing");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run(&["check", "--model", &model, "--phi", "B[1] p", "--timing"]);
    out.code_is(0).stdout_has("elapsed_ms=");
}

#[test]
fn check_missing_model_file_exits_two() {
    let out = run(&["check", "--model", "/nonexistent/m.json", "--phi", "B[1] p"]);
    out.code_is(2).stderr_has("invalid input");
}

#[test]
fn check_agent_out_of_range_exits_two() {
    let dir = scratch("check_agent");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run(&["check", "--model", &model, "--phi", "B[2] p"]);
    out.code_is(2).stderr_has("out of range");
}

// ---------------------------------------------------------- translate chain

#[test]
fn translate_round_trip_preserves_verdict() {
    let dir = scratch("round_trip");
    let model = write_file(&dir, "m.json", MODEL_JSON);

    // mbm2k: the Kripke document goes to stdout.
    let fwd = run(&["translate", "--direction", "mbm2k", "--input", &model]);
    fwd.code_is(0);
    let kripke = write_file(&dir, "m.k.json", &fwd.stdout);

    let kc = run(&["kcheck", "--kripke", &kripke, "--phi", "B[1] p"]);
    kc.code_is(0).stdout_has("command=kcheck").stdout_has("verdict=true");

    // k2mbm scoped to the formula atoms, then re-check on the explicit context.
    let back = run(&[
        "translate", "--direction", "k2mbm", "--input", &kripke, "--guard-atoms", "p",
    ]);
    back.code_is(0);
    let model2 = write_file(&dir, "m.back.json", &back.stdout);
    let chk = run(&["check", "--model", &model2, "--phi", "B[1] p", "--engine", "explicit"]);
    chk.code_is(0).stdout_has("engine=explicit").stdout_has("verdict=true");
}

#[test]
fn translate_mbm2k_outputs_kripke_json() {
    let dir = scratch("mbm2k_json");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run(&["translate", "--direction", "mbm2k", "--input", &model]);
    out.code_is(0);
    let value: serde_json::Value = serde_json::from_str(&out.stdout).expect("Kripke JSON");
    assert_eq!(value["agents"], 1);
    assert_eq!(value["worlds"].as_array().expect("worlds").len(), 1);
    assert!(value["point"].is_string());
}

#[test]
fn translate_qbf2mc_reports_reduction() {
    let out = run(&["translate", "--direction", "qbf2mc", "--qbf", "A p. p"]);
    out.code_is(0)
        .stdout_has("command=translate")
        .stdout_has("qbf=\"A p. p\"")
        .stdout_has("s={}")
        .stdout_has("query=\"B[1] ~(true & ~p)\"")
        .stdout_has("depth=1")
        .stdout_has("base_model=");
}

// ------------------------------------------------------------- validity

#[test]
fn validity_distribution_axiom_is_valid() {
    let out = run(&["validity", "--phi", "B[1] (p -> q) -> (B[1] p -> B[1] q)"]);
    out.code_is(0).stdout_has("verdict=valid").stdout_has("atoms={p,q}");
}

#[test]
fn validity_truth_axiom_splits_on_correctness() {
    let unrestricted = run(&["validity", "--phi", "B[1] p -> p"]);
    unrestricted
        .code_is(1)
        .stdout_has("verdict=invalid")
        .stdout_has("countermodel=");

    let correct_only = run(&["validity", "--phi", "B[1] p -> p", "--bc"]);
    correct_only.code_is(0).stdout_has("bc=true").stdout_has("verdict=valid");
}

#[test]
fn validity_dump_produces_usable_countermodel() {
    let dir = scratch("validity_dump");
    let dump = dir.join("cm.json");
    let dump = dump.to_str().expect("utf-8 path");

    let out = run(&["validity", "--phi", "B[1] p -> p", "--dump", dump]);
    out.code_is(1).stdout_has("countermodel_file=");

    // The dumped world is coherent and satisfies the negated query.
    let coh = run(&["structure", "coherence", "--world", dump]);
    coh.code_is(0).stdout_has("coherent=true");
    let sat = run(&["structure", "sat", "--world", dump, "--phi", "B[1] p & ~p"]);
    sat.code_is(0).stdout_has("verdict=true");
}

// ------------------------------------------------------------- structure

#[test]
fn structure_enum_counts_are_exact() {
    let all = run(&[
        "structure", "enum", "--atoms", "p", "--agents", "1", "--depth", "1", "--filter", "all",
    ]);
    all.code_is(0).stdout_has("count=8");

    let coherent = run(&[
        "structure", "enum", "--atoms", "p", "--agents", "1", "--depth", "2", "--filter",
        "coherent",
    ]);
    coherent.code_is(0).stdout_has("count=512");
}

#[test]
fn structure_enum_over_cap_exits_three() {
    let out = run(&[
        "structure", "enum", "--atoms", "p,q,r", "--agents", "2", "--depth", "2", "--filter",
        "all",
    ]);
    out.code_is(3).stderr_has("resource cap exceeded");
}

#[test]
fn structure_tau_emits_world_document() {
    let dir = scratch("tau");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let fwd = run(&["translate", "--direction", "mbm2k", "--input", &model]);
    fwd.code_is(0);
    let kripke = write_file(&dir, "m.k.json", &fwd.stdout);

    let out = run(&["structure", "tau", "--kripke", &kripke, "--depth", "1"]);
    out.code_is(0);
    let value: serde_json::Value = serde_json::from_str(&out.stdout).expect("world JSON");
    assert_eq!(value["agents"], 1);
    assert!(value["levels"].is_array());
}

// ----------------------------------------------------------------- fuzz

#[test]
fn fuzz_translation_suite_passes() {
    let out = run(&["fuzz", "--suite", "thm1", "--seed", "7", "--count", "100"]);
    out.code_is(0)
        .stdout_has("cases=100")
        .stdout_has("checks=2000")
        .stdout_has("verdict=pass");
}

#[test]
fn fuzz_translation_mutation_is_caught() {
    let out = run(&["fuzz", "--suite", "thm1", "--seed", "7", "--count", "100", "--mutate"]);
    out.code_is(1)
        .stdout_has("mutate=true")
        .stdout_has("verdict=fail")
        .stdout_has("counterexample case=");
    // The offending model document is printed verbatim after the report.
    let doc_start = out.stdout.find('{').expect("counterexample document");
    let _: serde_json::Value =
        serde_json::from_str(&out.stdout[doc_start..]).expect("document is JSON");
}

#[test]
fn fuzz_pipeline_suite_passes_and_mutation_is_caught() {
    let ok = run(&["fuzz", "--suite", "thm2-pipeline", "--seed", "11", "--count", "100"]);
    ok.code_is(0).stdout_has("verdict=pass");

    let bad = run(&[
        "fuzz", "--suite", "thm2-pipeline", "--seed", "11", "--count", "100", "--mutate",
    ]);
    bad.code_is(1).stdout_has("verdict=fail");
}

#[test]
fn fuzz_depth_suite_reports_known_violation_by_default() {
    // Depth-restricted evaluation is NOT invariant for the complement modality;
    // the default run finds the C[1] p witness and honestly fails.
    let out = run(&["fuzz", "--suite", "prop-lemmuccio", "--seed", "5", "--count", "200"]);
    out.code_is(1)
        .stdout_has("verdict=fail")
        .stdout_has("phi=\"C[1] p\"")
        .stdout_has("verdict_full=false")
        .stdout_has("verdict_restricted=true");
}

#[test]
fn fuzz_depth_suite_box_fragment_passes() {
    let out = run(&[
        "fuzz", "--suite", "prop-lemmuccio", "--seed", "5", "--count", "200", "--el-only",
    ]);
    out.code_is(0).stdout_has("cases=200").stdout_has("verdict=pass");
}

#[test]
fn fuzz_depth_suite_exhaustive_modes() {
    // Exhaustive over the full language still finds the violation.
    let full = run(&["fuzz", "--suite", "prop-lemmuccio", "--seed", "5", "--exhaustive"]);
    full.code_is(1).stdout_has("verdict=fail");

    // Exhaustive over the box fragment sweeps all 520 coherent worlds and passes.
    let boxed = run(&[
        "fuzz", "--suite", "prop-lemmuccio", "--seed", "5", "--exhaustive", "--el-only",
    ]);
    boxed
        .code_is(0)
        .stdout_has("cases=520")
        .stdout_has("checks=5656")
        .stdout_has("verdict=pass");
}

#[test]
fn fuzz_validity_agreement_suite_passes() {
    let out = run(&["fuzz", "--suite", "thm-teoremiccolo", "--seed", "3", "--count", "50"]);
    out.code_is(0).stdout_has("cases=50").stdout_has("verdict=pass");
}

#[test]
fn fuzz_satisfiability_suite_passes() {
    let out = run(&["fuzz", "--suite", "prop-propone", "--seed", "9", "--count", "100"]);
    out.code_is(0).stdout_has("verdict=pass");
}

#[test]
fn fuzz_correctness_definitions_suite_passes() {
    let out = run(&["fuzz", "--suite", "bc-variants", "--seed", "13", "--count", "200"]);
    out.code_is(0).stdout_has("verdict=pass");
}

#[test]
fn fuzz_output_is_byte_deterministic() {
    let args = ["fuzz", "--suite", "thm1", "--seed", "42", "--count", "60"];
    let first = run(&args);
    let second = run(&args);
    first.code_is(0);
    assert_eq!(first.stdout, second.stdout, "reruns must be byte-identical");
}

#[test]
fn fuzz_seed_is_required() {
    let out = run(&["fuzz", "--suite", "thm1", "--count", "5"]);
    out.code_is(2).stderr_has("--seed");
}

#[test]
fn fuzz_flag_combinations_are_validated() {
    let mutate = run(&["fuzz", "--suite", "prop-propone", "--seed", "1", "--mutate"]);
    mutate.code_is(2).stderr_has("--mutate applies");

    let el_only = run(&["fuzz", "--suite", "thm1", "--seed", "1", "--count", "5", "--el-only"]);
    el_only.code_is(2).stderr_has("--el-only applies");
}

// ------------------------------------------------------------------ qbf

#[test]
fn qbf_single_row_format_is_stable() {
    let out = run(&["qbf", "--qbf", "A p. E q. (p -> q)"]);
    out.code_is(0);
    let first = out.stdout.lines().next().expect("row line");
    assert_eq!(first, "A p. E q. ~(p & ~q) {} oracle=true reduced=true");
    out.stdout_has("rows=1").stdout_has("disagreements=0").stdout_has("verdict=pass");
}

#[test]
fn qbf_sweep_two_vars_passes_on_both_engines() {
    for engine in ["pool", "structures"] {
        let out = run(&["qbf", "--sweep", "2", "--engine", engine]);
        out.code_is(0)
            .stdout_has("rows=528")
            .stdout_has("disagreements=0")
            .stdout_has("verdict=pass");
    }
}

#[test]
fn qbf_sweep_closure_standin_passes_at_one_var() {
    let out = run(&["qbf", "--sweep", "1", "--standin", "closure"]);
    out.code_is(0).stdout_has("rows=16").stdout_has("disagreements=0");
}

#[test]
fn qbf_mutation_is_caught() {
    let out = run(&["qbf", "--sweep", "1", "--mutate"]);
    out.code_is(1).stdout_has("disagreements=8").stdout_has("verdict=fail");
}

#[test]
fn qbf_random_mode_is_deterministic() {
    let args = ["qbf", "--random", "10", "--seed", "5"];
    let first = run(&args);
    let second = run(&args);
    first.code_is(0).stdout_has("rows=10").stdout_has("verdict=pass");
    assert_eq!(first.stdout, second.stdout);
}

// ----------------------------------------------------- env caps and deadline

#[test]
fn env_context_cap_exits_three() {
    let dir = scratch("env_cap");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run_with_env(
        &["check", "--model", &model, "--phi", "B[1] p"],
        &[("EPIMC_MAX_CONTEXT", "10")],
    );
    out.code_is(3).stderr_has("resource cap exceeded");
}

#[test]
fn env_invalid_value_exits_two() {
    let dir = scratch("env_bad");
    let model = write_file(&dir, "m.json", MODEL_JSON);
    let out = run_with_env(
        &["check", "--model", &model, "--phi", "B[1] p"],
        &[("EPIMC_MAX_CONTEXT", "abc")],
    );
    out.code_is(2).stderr_has("EPIMC_MAX_CONTEXT");
}

#[test]
fn env_timeout_exits_three() {
    let out = run_with_env(
        &["fuzz", "--suite", "thm-teoremiccolo", "--seed", "3", "--count", "10000"],
        &[("EPIMC_TIMEOUT_MS", "1")],
    );
    out.code_is(3).stderr_has("timed out");
}
