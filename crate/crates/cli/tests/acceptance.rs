//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//!
//! `cargo test --release --test acceptance -- 3 7` runs a subset.
//! Criteria listed in `KNOWN_FAILURES` still run at full strength and print
//! FAIL; they only stop failing the process.

use std::path::Path;
use std::time::{Duration, Instant};

use codesw::analysis::{self, ChainSpec};
use codesw::code::{certify_graphic, toric2d, toric4d, Direction, Graph, ParityCheckCode};
use codesw::dynamics::{ChainParams, KernelId};
use codesw::oracle::{self, Fault, Report, SuiteOptions};
use codesw::par::Execution;
use codesw::stabilizer::{self, DenseState, ExactChannel, GibbsRoute, JointState};
use codesw::worm;
use codesw::{BitMatrix, BitVector};

/// Criteria that fail at the stated thresholds; see the decisions ledger.
const KNOWN_FAILURES: &[usize] = &[8];

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion = fn() -> Outcome;

fn main() {
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let criteria: [(&str, Duration, Criterion); 10] = [
        ("stationarity", secs(60), stationarity),
        ("coupling suite", secs(60), coupling),
        ("operator identities and comparison", secs(120), appendix_a),
        ("graphic certification", secs(180), certification),
        ("subspace loss", secs(60), subspace_loss),
        ("canonical paths and congestion", secs(300), canonical_paths),
        ("quantum channel", secs(120), quantum),
        ("sampling fidelity", secs(300), sampling_fidelity),
        ("4D toric consistency", secs(300), toric4d_consistency),
        ("determinism", secs(600), determinism),
    ];
    let mut unexpected = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let passed = out.passed && elapsed <= *budget;
        let known = KNOWN_FAILURES.contains(&id);
        println!(
            "criterion {id:2} {:4} {name} [{:.1}s of {}s]: {}{}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            out.detail,
            if !passed && known { " (known failure, see ledger)" } else { "" }
        );
        if !passed && !known {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn summarize(reports: &[Report]) -> Outcome {
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.failures()
                .map(move |f| format!("{} / {} ({:e} > {:e})", r.instance, f.name, f.max_deviation, f.tolerance))
        })
        .collect();
    let worst = reports
        .iter()
        .flat_map(|r| &r.checks)
        .filter(|c| c.tolerance > 0.0)
        .map(|c| c.max_deviation)
        .fold(0.0, f64::max);
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checks} checks in {} reports, worst equality deviation {worst:.2e}", reports.len())
        } else {
            format!("{} of {checks} checks failed: {}", failures.len(), failures.join("; "))
        },
    }
}

fn ising(g: &Graph) -> ParityCheckCode {
    ParityCheckCode::ising(g).unwrap()
}

fn code_from_rows(rows: &[&str]) -> ParityCheckCode {
    ParityCheckCode::new(BitMatrix::from_bit_rows(rows).unwrap()).unwrap()
}

fn p_grid() -> Vec<f64> {
    let mut ps = vec![0.2, 0.5, 0.8];
    ps.extend([0.3, 1.0].map(|b| ChainParams::from_beta(b).unwrap().p()));
    ps
}

/// The four small instances with the graph carrying their worm chain.
fn small_instances() -> Vec<(&'static str, ParityCheckCode, Graph)> {
    let k3 = Graph::complete(3).unwrap();
    let c4 = Graph::cycle(4).unwrap();
    vec![
        ("K3 Ising", ising(&k3), k3),
        ("h = [[1,1]]", code_from_rows(&["11"]), Graph::path(2).unwrap()),
        ("C4 Ising", ising(&c4), c4.clone()),
        ("2D toric L=2 X-sector", toric2d(2).unwrap().hx, c4),
    ]
}

fn options(code: &ParityCheckCode, graph: &Graph, tol: f64) -> SuiteOptions {
    let cert = certify_graphic(code, graph, Direction::Primal).unwrap().expect("worm graph certifies");
    SuiteOptions {
        tolerance: tol,
        fault: Fault::None,
        couplings: vec![(graph.clone(), Direction::Primal, cert.delta)],
    }
}

fn stationarity() -> Outcome {
    let mut reports = Vec::new();
    for (name, code, graph) in small_instances() {
        let opts = options(&code, &graph, 1e-10);
        for p in p_grid() {
            let mut r = oracle::stationarity_suite(&code, p, &opts).unwrap();
            r.instance = format!("{name}: {}", r.instance);
            reports.push(r);
        }
    }
    summarize(&reports)
}

fn coupling() -> Outcome {
    let mut reports = Vec::new();
    for (name, code, graph) in small_instances() {
        let opts = options(&code, &graph, 1e-10);
        for p in p_grid() {
            let mut r = oracle::coupling_suite(&code, p, &opts).unwrap();
            r.instance = format!("{name}: {}", r.instance);
            reports.push(r);
        }
    }
    summarize(&reports)
}

fn appendix_a() -> Outcome {
    let code = ising(&Graph::complete(3).unwrap());
    let mut reports = Vec::new();
    for p in [0.3, 0.5, 0.9] {
        reports.push(oracle::appendix_a_operator_check(&code, p, 1e-12).unwrap());
        reports.push(oracle::comparison_check(&code, p, 1e-12).unwrap());
    }
    summarize(&reports)
}

fn certification() -> Outcome {
    let mut cases: Vec<(String, ParityCheckCode, Graph, Direction, usize)> = Vec::new();
    for l in [2, 3, 4] {
        let pair = toric2d(l).unwrap();
        let cycle = Graph::cycle(l * l).unwrap();
        cases.push((format!("2D toric L={l} X"), pair.hx, cycle.clone(), Direction::Primal, 0));
        cases.push((format!("2D toric L={l} Z"), pair.hz, cycle, Direction::Primal, 0));
    }
    cases.push((
        "independent checks".into(),
        code_from_rows(&["1100", "0110", "0011"]),
        Graph::path(4).unwrap(),
        Direction::Primal,
        0,
    ));
    for l in [2, 3] {
        let pair = toric4d(l).unwrap();
        cases.push((format!("4D toric L={l} X"), pair.hx, Graph::torus(4, l).unwrap(), Direction::Dual, 4));
        cases.push((format!("4D toric L={l} Z"), pair.hz, Graph::dual_torus4(l).unwrap(), Direction::Dual, 4));
    }
    let mut failures = Vec::new();
    for (name, code, graph, direction, want) in &cases {
        match certify_graphic(code, graph, *direction).unwrap() {
            Some(cert) if cert.delta <= *want => {}
            Some(cert) => failures.push(format!("{name}: delta {} > {want}", cert.delta)),
            None => failures.push(format!("{name}: not certified")),
        }
    }
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} certificates", cases.len())
        } else {
            failures.join("; ")
        },
    }
}

fn subspace_loss() -> Outcome {
    let cases = [
        ("2D toric L=2", toric2d(2).unwrap().hx, Graph::cycle(4).unwrap(), Direction::Primal),
        ("2D toric L=2", toric2d(2).unwrap().hx, Graph::theta(4).unwrap(), Direction::Dual),
        ("[[1,0],[1,0],[0,1]]", code_from_rows(&["10", "10", "01"]), Graph::theta(3).unwrap(), Direction::Primal),
        ("[[0],[1],[1]]", code_from_rows(&["0", "1", "1"]), Graph::theta(3).unwrap(), Direction::Dual),
    ];
    let mut failures = Vec::new();
    let mut deltas = Vec::new();
    let mut worst: f64 = 0.0;
    for (name, code, graph, direction) in &cases {
        let delta = certify_graphic(code, graph, *direction).unwrap().expect("instance certifies").delta;
        deltas.push(delta);
        let bound = f64::powi(2.0, delta as i32 + 1);
        for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let ratio = worm::subspace_loss_ratio(code, graph, *direction, p).unwrap();
            worst = worst.max(ratio / bound);
            if ratio > bound * (1.0 + 1e-12) {
                failures.push(format!("{name} {direction} p={p}: {ratio} > {bound}"));
            }
        }
    }
    if !deltas.contains(&1) {
        failures.push("no delta = 1 instance".into());
    }
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("deltas {deltas:?}, largest ratio/bound {worst:.3}")
        } else {
            failures.join("; ")
        },
    }
}

fn canonical_paths() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_congestion: f64 = 0.0;
    for (name, g) in [
        ("C4", Graph::cycle(4).unwrap()),
        ("C6", Graph::cycle(6).unwrap()),
        ("K4", Graph::complete(4).unwrap()),
    ] {
        let audit = worm::audit_paths(&g).unwrap();
        if !audit.passed() {
            failures.push(format!("{name}: path audit {audit:?}"));
        }
        let code = ising(&g);
        for p in [0.2, 0.5, 0.8] {
            let rep = worm::flow_congestion_exact(&code, &g, Direction::Primal, p, 0, Execution::best()).unwrap();
            worst_congestion = worst_congestion.max(rep.lifted_congestion / rep.congestion_bound);
            if rep.max_path_defects > 2
                || rep.worm_flow_ratio > 1.0
                || rep.worm_add_ratio > 1.0
                || rep.lifted_congestion > rep.congestion_bound
                || rep.validity_deviation.is_some_and(|d| d > 1e-10)
            {
                failures.push(format!("{name} p={p}: {rep:?}"));
            }
        }
    }
    let k3 = Graph::complete(3).unwrap();
    let code = ising(&k3);
    for p in [0.2, 0.5, 0.8] {
        let rep = worm::flow_congestion_exact(&code, &k3, Direction::Primal, p, 0, Execution::best()).unwrap();
        let (tau, bound) = worm::mixing_time_bound(&code, p, rep.lifted_congestion).unwrap();
        if tau as f64 > bound {
            failures.push(format!("K3 p={p}: tau {tau} > {bound}"));
        }
    }
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("largest congestion/bound {worst_congestion:.2e}")
        } else {
            failures.join("; ")
        },
    }
}

fn quantum() -> Outcome {
    let beta = 0.7;
    let model = stabilizer::bell_pair();
    let n = model.qubits();
    let params = ChainParams::from_beta(beta).unwrap();
    let q = oracle::build_transition_matrix(KernelId::Glauber, model.classical_code(), &params).unwrap();
    let pi = oracle::enumerate_gibbs(model.classical_code(), beta).unwrap();
    let target = stabilizer::exact_gibbs_state(&model, beta, GibbsRoute::Exponential).unwrap();
    let channel = ExactChannel::new(&model, &q).unwrap();
    let profile = oracle::distance_profile(&q, &pi, 200);
    let mut worst_excess = f64::NEG_INFINITY;
    let mut final_distance = f64::NAN;
    for init in 0..1usize << n {
        let mut joint =
            JointState::product(&BitVector::zeros(2 * n), &DenseState::basis_state(n, init).unwrap()).unwrap();
        for t in 1..=200 {
            joint = channel.step(&joint).unwrap();
            let d = joint.quantum_marginal().unwrap().trace_distance(&target);
            if t <= 100 {
                worst_excess = worst_excess.max(d - 0.5 * profile[t]);
            }
            if t == 200 {
                final_distance = if init == 0 { d } else { final_distance.max(d) };
            }
        }
    }
    Outcome {
        passed: final_distance <= 1e-8 && worst_excess <= 1e-12,
        detail: format!(
            "trace distance after 200 steps {final_distance:.2e}, max_t<=100 (distance - classical TV) {worst_excess:.2e}"
        ),
    }
}

fn sampling_fidelity() -> Outcome {
    let code = ising(&Graph::torus(2, 3).unwrap());
    let beta = 1.5;
    let params = ChainParams::from_beta(beta).unwrap();
    let exact = oracle::enumerate_gibbs(&code, beta).unwrap();
    let samples = 1_000_000;
    let sw = ChainSpec {
        code: &code,
        kernel: KernelId::Sw,
        params,
        worm: None,
    };
    let mut states = Vec::with_capacity(samples);
    let mut t = 0;
    let trace = sw
        .trace_with(2 * samples, 7, 0, |s| {
            if t >= samples {
                states.push(s.to_mask().unwrap());
            }
            t += 1;
        })
        .unwrap();
    let tv = analysis::empirical_tv(&states, &exact).unwrap();
    let tau_sw = analysis::autocorrelation_time(&trace.primary()[samples..], Execution::best())
        .unwrap()
        .tau;
    // Excitations are rare at this temperature, so the local chain needs a long run for a stable estimate.
    let glauber_steps = 50_000_000;
    let glauber = ChainSpec {
        kernel: KernelId::Glauber,
        ..sw
    };
    let trace = glauber.trace(glauber_steps, 7, 0).unwrap();
    let tau_glauber = analysis::autocorrelation_time(&trace.primary()[glauber_steps / 2..], Execution::best())
        .unwrap()
        .tau;
    let ratio = tau_glauber / tau_sw;
    Outcome {
        passed: tv <= 0.02 && ratio >= 10.0,
        detail: format!(
            "SW TV {tv:.5} (<= 0.02), energy tau SW {tau_sw:.2}, Glauber {tau_glauber:.2}, ratio {ratio:.2} (>= 10)"
        ),
    }
}

fn toric4d_consistency() -> Outcome {
    let code = toric4d(2).unwrap().hx;
    let steps = 10_000;
    let mut failures = Vec::new();
    let mut details = Vec::new();
    for beta in [0.2, 1.0] {
        let spec = ChainSpec {
            code: &code,
            kernel: KernelId::Sw,
            params: ChainParams::from_beta(beta).unwrap(),
            worm: None,
        };
        let (report, traces) =
            analysis::two_seed_consistency(&spec, steps, (11, 12), analysis::KS_ALPHA, Execution::best()).unwrap();
        for (i, tr) in traces.iter().enumerate() {
            let tail = &tr.primary()[steps / 2..];
            let ac = analysis::autocorrelation_time(tail, Execution::best()).unwrap();
            if 100.0 * ac.tau > tail.len() as f64 {
                failures.push(format!("beta={beta} seed {i}: tau {:.1} too long for the budget", ac.tau));
            }
        }
        if !report.passed {
            failures.push(format!("beta={beta}: KS p = {:?}", report.p_value));
        }
        details.push(format!("beta={beta}: D={:.4} p={:.3}", report.statistic, report.p_value.unwrap_or(f64::NAN)));
    }
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            details.join(", ")
        } else {
            failures.join("; ")
        },
    }
}

/// Runs `args` twice into fresh directories and compares stdout and every output file.
fn reproducible(args: &[&str]) -> Result<(), String> {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let full: Vec<String> = std::iter::once("codesw".to_string())
            .chain(args.iter().map(|a| a.replace("{dir}", dir.path().to_str().unwrap())))
            .collect();
        let mut stdout = Vec::new();
        let code = codesw_cli::run(&full, &mut stdout);
        let mut files = Vec::new();
        collect(dir.path(), dir.path(), &mut files);
        runs.push((code, stdout, files));
    }
    if runs[0] == runs[1] {
        Ok(())
    } else {
        Err(format!("{args:?} differs between runs"))
    }
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
    let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        if path.is_dir() {
            collect(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
            out.push((rel, std::fs::read(&path).unwrap()));
        }
    }
}

fn determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["gen", "--code", "toric4d:2", "--out", "{dir}"],
        &["verify", "--code", "ising-graph:complete:3", "--graph", "complete:3", "--out", "{dir}/v.json"],
        &["verify", "--code", "toric2d:2", "--graph", "cycle:4", "--suite", "stationarity,coupling", "--out", "{dir}/v.json"],
        &["certify", "--code", "toric4d:3", "--graph", "torus:4:3", "--direction", "dual", "--out", "{dir}/c.json"],
        &["quantum", "--code", "bell", "--chain", "glauber", "--out", "{dir}/q.json"],
        &["quantum", "--code", "bell", "--mode", "trajectory", "--steps", "20000", "--out", "{dir}/q.json"],
        &["sample", "--code", "ising-graph:torus:2:3", "--beta", "1.5", "--steps", "200000", "--replicas", "2", "--out", "{dir}/s"],
        &["sample", "--code", "toric4d:2", "--beta", "1.0", "--steps", "10000", "--replicas", "2", "--out", "{dir}/t"],
        &["sample", "--code", "ising-graph:complete:4", "--chain", "worm", "--graph", "complete:4", "--p", "0.5", "--steps", "50000", "--out", "{dir}/w"],
    ];
    let failures: Vec<String> = commands.iter().filter_map(|c| reproducible(c).err()).collect();
    // Outputs must not depend on the thread count either.
    let mut sequential = vec!["--sequential"];
    sequential.extend_from_slice(commands[2]);
    let cross = {
        let run = |args: &[&str]| {
            let dir = tempfile::tempdir().unwrap();
            let full: Vec<String> = std::iter::once("codesw".to_string())
                .chain(args.iter().map(|a| a.replace("{dir}", dir.path().to_str().unwrap())))
                .collect();
            let mut stdout = Vec::new();
            codesw_cli::run(&full, &mut stdout);
            (stdout, std::fs::read(dir.path().join("v.json")).unwrap())
        };
        run(commands[2]) == run(&sequential)
    };
    let mut all = failures.clone();
    if !cross {
        all.push("sequential and parallel verify outputs differ".into());
    }
    Outcome {
        passed: all.is_empty(),
        detail: if all.is_empty() {
            format!("{} commands byte-identical on rerun and across --sequential", commands.len())
        } else {
            all.join("; ")
        },
    }
}
