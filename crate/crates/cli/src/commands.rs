use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use codesw::analysis::{self, Autocorrelation, ChainSpec, MixingReport, Observable};
use codesw::code::{self, certify_graphic, Direction, Graph, ParityCheckCode};
use codesw::dynamics::{ChainParams, KernelId, LiftParams};
use codesw::gf2::{BitVector, Echelon};
use codesw::oracle::{self, CheckResult, ExactDistribution, Fault, Report, SuiteOptions};
use codesw::par::{self, Execution};
use codesw::stabilizer::{
    self, DenseState, ExactChannel, GibbsRoute, JointState, PauliFrameSampler, PauliLabel, StabilizerModel,
};
use codesw::worm::{self, FlowReport, PathAudit, WormSpace};
use codesw::rng_for;

use crate::spec::{self, CodeSpec, GraphSpec};
use crate::{to_json, write_file, CliError, CliResult, FaultArg, GenArgs, Outcome, QuantumArgs, QuantumMode, Suite};
use crate::{CertifyArgs, SampleArgs, VerifyArgs};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn gen(a: &GenArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let mut files: Vec<(String, String)> = Vec::new();
    match &a.code {
        CodeSpec::IsingGraph(g) => {
            let graph = g.build()?;
            files.push((format!("ising-{}.checks", g.slug()), ParityCheckCode::ising(&graph)?.to_check_list()));
            files.push((format!("{}.graph", g.slug()), graph.to_text()));
        }
        CodeSpec::Toric2d(l, _) | CodeSpec::Toric4d(l, _) => {
            let (name, pair) = match &a.code {
                CodeSpec::Toric2d(..) => (format!("toric2d-L{l}"), code::toric2d(*l)?),
                _ => (format!("toric4d-L{l}"), code::toric4d(*l)?),
            };
            let model = StabilizerModel::css(pair.hx.h(), pair.hz.h())?;
            files.push((format!("{name}-x.checks"), pair.hx.to_check_list()));
            files.push((format!("{name}-z.checks"), pair.hz.to_check_list()));
            files.push((format!("{name}.stab"), model.to_text()));
        }
        CodeSpec::Bell => files.push(("bell.stab".into(), stabilizer::bell_pair().to_text())),
        CodeSpec::File(path) => {
            let text = spec::read(path)?;
            let slug = a.code.slug();
            if path.extension().is_some_and(|e| e == "stab") {
                let model: StabilizerModel = text.parse()?;
                files.push((format!("{slug}.stab"), model.to_text()));
                files.push((format!("{slug}-h.checks"), model.classical_code().to_check_list()));
            } else {
                files.push((format!("{slug}.checks"), spec::parse_classical(&text, path)?.to_check_list()));
            }
        }
    }
    for (name, contents) in &files {
        write_file(&a.out.join(name), contents)?;
        let header = contents.lines().next().unwrap_or_default();
        writeln!(out, "wrote {name} ({header})")?;
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct ReplicaSummary {
    stream: u64,
    csv: String,
    /// Post-burn-in means, keyed by observable.
    means: Vec<(String, f64)>,
    autocorrelation: Option<Autocorrelation>,
    /// Post-burn-in length is at least 100 autocorrelation times.
    equilibrated: bool,
    tv_to_exact: Option<f64>,
    final_state: String,
}

#[derive(Serialize)]
struct SampleSummary {
    code: String,
    bits: usize,
    checks: usize,
    chain: KernelId,
    beta: f64,
    p: f64,
    seed: u64,
    steps: usize,
    burn_in: usize,
    replicas: Vec<ReplicaSummary>,
    consistency: Option<MixingReport>,
}

const EXACT_TABLE_BITS: usize = 20;

fn exact_table(spec: &ChainSpec<'_>) -> CliResult<Option<ExactDistribution>> {
    let (code, params) = (spec.code, &spec.params);
    Ok(match spec.kernel {
        KernelId::Sw | KernelId::Glauber if code.bits() <= EXACT_TABLE_BITS => {
            Some(oracle::enumerate_gibbs(code, params.beta())?)
        }
        KernelId::SwRc | KernelId::MetropolisRc | KernelId::SingleCheck if code.checks() <= 16 => {
            Some(oracle::enumerate_rc(code, params.p())?)
        }
        KernelId::Worm => match spec.worm {
            Some(space) if space.edges() <= EXACT_TABLE_BITS => Some(worm::enumerate_worm(space)?),
            _ => None,
        },
        _ => None,
    })
}

fn replica_csv(prefix: &Path, replicas: usize, r: usize) -> PathBuf {
    let stem = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = if replicas == 1 {
        format!("{stem}.csv")
    } else {
        format!("{stem}-r{r}.csv")
    };
    prefix.with_file_name(name)
}

pub fn sample(a: &SampleArgs, exec: Execution, out: &mut dyn Write) -> CliResult<Outcome> {
    if a.steps == 0 || a.replicas == 0 {
        return Err(usage("--steps and --replicas must be positive"));
    }
    let burn_in = a.burn_in.unwrap_or(a.steps / 2);
    if burn_in >= a.steps {
        return Err(usage("--burn-in must be smaller than --steps"));
    }
    let params = match (a.beta, a.p) {
        (_, Some(p)) => ChainParams::from_p(p)?,
        (beta, None) => ChainParams::from_beta(beta.unwrap_or(1.0))?,
    };
    let code = a.code.classical()?;
    let space = if a.chain == KernelId::Worm {
        let graph = a
            .graph
            .as_ref()
            .ok_or_else(|| usage("the worm chain needs --graph"))?
            .build()?;
        let lift = LiftParams::new(a.direction, params.p())?;
        Some(WormSpace::new(graph, lift.weight)?)
    } else {
        None
    };
    let spec = ChainSpec {
        code: &code,
        kernel: a.chain,
        params,
        worm: space.as_ref(),
    };
    let exact = exact_table(&spec)?;
    let runs: Vec<CliResult<(analysis::TraceSeries, Vec<u64>)>> = par::map_indices(exec, a.replicas, |r| {
        let mut states = Vec::new();
        let mut t = 0;
        let trace = spec.trace_with(a.steps, a.seed, r as u64, |s| {
            if exact.is_some() && t >= burn_in {
                states.push(s.to_mask().expect("enumerable states fit a mask"));
            }
            t += 1;
        })?;
        Ok((trace, states))
    });
    let runs: Vec<_> = runs.into_iter().collect::<CliResult<_>>()?;

    let mut summaries = Vec::with_capacity(runs.len());
    for (r, (trace, states)) in runs.iter().enumerate() {
        let csv = replica_csv(&a.out, a.replicas, r);
        write_file(&csv, &trace.to_csv())?;
        let tail = |k: usize| &trace.columns[k][burn_in..];
        let means = trace
            .observables
            .iter()
            .enumerate()
            .map(|(k, o)| (o.name().to_string(), tail(k).iter().sum::<f64>() / tail(k).len() as f64))
            .collect();
        let auto = analysis::autocorrelation_time(tail(0), exec).ok();
        let equilibrated = auto.is_some_and(|ac| 100.0 * ac.tau.max(1.0) <= tail(0).len() as f64);
        let tv = match &exact {
            Some(table) => Some(analysis::empirical_tv(states, table)?),
            None => None,
        };
        let primary: Observable = trace.observables[0];
        write!(
            out,
            "replica {r}: mean {} = {:.6}",
            primary.name(),
            tail(0).iter().sum::<f64>() / tail(0).len() as f64
        )?;
        if let Some(ac) = auto {
            write!(out, ", tau = {:.3}", ac.tau)?;
        }
        if let Some(tv) = tv {
            write!(out, ", TV to exact = {tv:.5}")?;
        }
        writeln!(out)?;
        summaries.push(ReplicaSummary {
            stream: r as u64,
            csv: csv.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            means,
            autocorrelation: auto,
            equilibrated,
            tv_to_exact: tv,
            final_state: trace.final_state.to_string(),
        });
    }
    let consistency = if runs.len() >= 2 {
        let instance = format!("{} {} replicas 0,1", a.code.slug(), a.chain);
        let rep = analysis::consistency_report(instance, runs[0].0.primary(), runs[1].0.primary(), a.alpha, exec)?;
        writeln!(
            out,
            "consistency (KS, replicas 0 and 1): D = {:.5}, p = {:.4}, {}",
            rep.statistic,
            rep.p_value.unwrap_or(f64::NAN),
            if rep.passed { "pass" } else { "FAIL" }
        )?;
        Some(rep)
    } else {
        None
    };
    let passed = consistency.as_ref().is_none_or(|c| c.passed);
    let summary = SampleSummary {
        code: a.code.slug(),
        bits: code.bits(),
        checks: code.checks(),
        chain: a.chain,
        beta: params.beta(),
        p: params.p(),
        seed: a.seed,
        steps: a.steps,
        burn_in,
        replicas: summaries,
        consistency,
    };
    let json = a.out.with_file_name(format!(
        "{}.json",
        a.out.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    ));
    write_file(&json, &to_json(&summary))?;
    Ok(Outcome::from_passed(passed))
}

#[derive(Serialize)]
struct VerifySummary {
    code: String,
    p_values: Vec<f64>,
    reports: Vec<Report>,
    flows: Vec<FlowReport>,
    path_audits: Vec<(String, PathAudit)>,
    skipped: Vec<String>,
    passed: bool,
}

const DEFAULT_P: [f64; 3] = [0.2, 0.5, 0.8];
const DEFAULT_BETA: [f64; 2] = [0.3, 1.0];

struct Coupling {
    graph: Graph,
    slug: String,
    direction: Direction,
    delta: usize,
}

pub fn verify(a: &VerifyArgs, exec: Execution, out: &mut dyn Write) -> CliResult<Outcome> {
    let code = a.code.classical()?;
    let (n, c) = (code.bits(), code.checks());
    let mut ps = a.p.clone();
    for &beta in &a.beta {
        ps.push(ChainParams::from_beta(beta)?.p());
    }
    if a.p.is_empty() && a.beta.is_empty() {
        ps.extend(DEFAULT_P);
        for beta in DEFAULT_BETA {
            ps.push(ChainParams::from_beta(beta)?.p());
        }
    }
    if let Some(bad) = ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(usage(format!("p must lie in [0, 1], got {bad}")));
    }
    let mut suites: Vec<Suite> = Vec::new();
    for s in &a.suite {
        let expanded: &[Suite] = match s {
            Suite::All => &[
                Suite::Stationarity,
                Suite::Coupling,
                Suite::AppendixA,
                Suite::Comparison,
                Suite::Flows,
            ],
            other => std::slice::from_ref(other),
        };
        for &e in expanded {
            if !suites.contains(&e) {
                suites.push(e);
            }
        }
    }
    let fault = match a.fault {
        FaultArg::None => Fault::None,
        FaultArg::InvertedMetropolis => Fault::InvertedMetropolis,
    };

    let mut reports = Vec::new();
    let mut skipped = Vec::new();
    let mut couplings = Vec::new();
    let requested: Vec<(&GraphSpec, Direction)> = a
        .graph
        .iter()
        .map(|g| (g, Direction::Primal))
        .chain(a.dual_graph.iter().map(|g| (g, Direction::Dual)))
        .collect();
    if !requested.is_empty() {
        let mut cert = Report::new("coupling graphs");
        for (g, direction) in requested {
            let graph = g.build()?;
            match certify_graphic(&code, &graph, direction)? {
                Some(cert_ok) => {
                    cert.push(CheckResult::equality(
                        format!("{} certifies {direction}, delta = {}", g.slug(), cert_ok.delta),
                        0.0,
                        0.0,
                    ));
                    couplings.push(Coupling {
                        graph,
                        slug: g.slug(),
                        direction,
                        delta: cert_ok.delta,
                    });
                }
                None => cert.push(CheckResult::equality(format!("{} certifies {direction}", g.slug()), 1.0, 0.0)),
            }
        }
        reports.push(cert);
    }
    let opts = SuiteOptions {
        tolerance: a.tol.unwrap_or(1e-10),
        fault,
        couplings: couplings.iter().map(|cp| (cp.graph.clone(), cp.direction, cp.delta)).collect(),
    };
    let fine_tol = a.tol.unwrap_or(1e-12);

    let mut flows = Vec::new();
    let mut audits = Vec::new();
    if suites.contains(&Suite::Flows) {
        if couplings.is_empty() {
            skipped.push("flows: no certified --graph or --dual-graph".to_string());
        }
        let mut audited: Vec<String> = Vec::new();
        for cp in &couplings {
            if audited.contains(&cp.slug) {
                continue;
            }
            audited.push(cp.slug.clone());
            match worm::audit_paths(&cp.graph) {
                Ok(audit) => {
                    let mut r = Report::new(format!("canonical paths on {}", cp.slug));
                    r.push(CheckResult::bound(
                        "path states have at most 2 defects",
                        audit.max_defects as f64 - 2.0,
                        0.0,
                    ));
                    r.push(CheckResult::equality("paths end at B", audit.wrong_endpoints as f64, 0.0));
                    r.push(CheckResult::equality("Phi injective per transition", audit.collisions as f64, 0.0));
                    r.push(CheckResult::equality("Phi decodes", audit.decode_failures as f64, 0.0));
                    reports.push(r);
                    audits.push((cp.slug.clone(), audit));
                }
                Err(e) => skipped.push(format!("path audit on {}: {e}", cp.slug)),
            }
        }
    }

    let guarded = |name: &str, ok: bool, p: f64, skipped: &mut Vec<String>| {
        if !ok {
            skipped.push(format!("{name}, p = {p}: instance too large (n = {n}, c = {c})"));
        }
        ok
    };
    for &p in &ps {
        for &suite in &suites {
            let result = match suite {
                Suite::Stationarity if guarded("stationarity", n <= 14 && c <= 14, p, &mut skipped) => {
                    Some(oracle::stationarity_suite(&code, p, &opts))
                }
                Suite::Coupling if guarded("coupling", n + c <= 24 && c <= 16, p, &mut skipped) => {
                    Some(oracle::coupling_suite(&code, p, &opts))
                }
                Suite::AppendixA if guarded("appendix-a", n + c <= 16, p, &mut skipped) => {
                    Some(oracle::appendix_a_operator_check(&code, p, fine_tol))
                }
                Suite::Comparison if guarded("comparison", n <= 14 && c <= 14, p, &mut skipped) => {
                    if p > 0.0 && p < 1.0 {
                        Some(oracle::comparison_check(&code, p, fine_tol))
                    } else {
                        skipped.push(format!("comparison, p = {p}: needs 0 < p < 1"));
                        None
                    }
                }
                Suite::Flows => {
                    for cp in &couplings {
                        if c > 14 || !(p > 0.0 && p < 1.0) {
                            skipped.push(format!("flows on {}, p = {p}: needs c <= 14 and 0 < p < 1", cp.slug));
                            continue;
                        }
                        let r = flow_checks(&code, cp, p, opts.tolerance, exec);
                        reports.push(match r {
                            Ok((report, flow)) => {
                                flows.push(flow);
                                report
                            }
                            Err(e) => failed_run(format!("flows on {}, p = {p}", cp.slug), &e),
                        });
                    }
                    None
                }
                _ => None,
            };
            if let Some(r) = result {
                reports.push(r.unwrap_or_else(|e| failed_run(format!("{suite:?}, p = {p}"), &e.into())));
            }
        }
    }

    let passed = reports.iter().all(Report::passed);
    for r in &reports {
        writeln!(
            out,
            "{} {} ({} checks)",
            if r.passed() { "PASS" } else { "FAIL" },
            r.instance,
            r.checks.len()
        )?;
        for f in r.failures() {
            writeln!(out, "  FAIL {}: deviation {:e} (tolerance {:e})", f.name, f.max_deviation, f.tolerance)?;
        }
    }
    for s in &skipped {
        writeln!(out, "SKIP {s}")?;
    }
    writeln!(out, "verdict: {}", if passed { "PASS" } else { "FAIL" })?;
    if let Some(path) = &a.out {
        let summary = VerifySummary {
            code: a.code.slug(),
            p_values: ps,
            reports,
            flows,
            path_audits: audits,
            skipped,
            passed,
        };
        write_file(path, &to_json(&summary))?;
    }
    Ok(Outcome::from_passed(passed))
}

fn failed_run(instance: String, e: &CliError) -> Report {
    let mut r = Report::new(instance);
    r.push(CheckResult::equality(format!("suite ran ({e})"), f64::INFINITY, 0.0));
    r
}

fn flow_checks(
    code: &ParityCheckCode,
    cp: &Coupling,
    p: f64,
    tol: f64,
    exec: Execution,
) -> CliResult<(Report, FlowReport)> {
    let rep = worm::flow_congestion_exact(code, &cp.graph, cp.direction, p, cp.delta, exec)?;
    let mut r = Report::new(format!(
        "flows, {} coupling to {}, delta = {}, p = {p}",
        cp.direction, cp.slug, cp.delta
    ));
    r.push(CheckResult::bound(
        "canonical path states have at most 2 defects",
        rep.max_path_defects as f64 - 2.0,
        0.0,
    ));
    r.push(CheckResult::bound(
        "worm flow per transition <= 2^(delta+1) m^4 omega(W)",
        rep.worm_flow_ratio - 1.0,
        0.0,
    ));
    r.push(CheckResult::bound(
        "worm flow per addition <= 2^(delta+1) m^4 omega(W) p'/(1-p')",
        rep.worm_add_ratio - 1.0,
        0.0,
    ));
    r.push(CheckResult::bound(
        "lifted congestion <= c^2 2^(2 delta+5) m^4",
        rep.lifted_congestion - rep.congestion_bound,
        0.0,
    ));
    if let Some(d) = rep.validity_deviation {
        r.push(CheckResult::equality("lifted flow routes phi(I) phi(F)", d, tol));
    }
    if cp.graph.edge_count() <= 20 {
        let loss = worm::subspace_loss_ratio(code, &cp.graph, cp.direction, p)?;
        r.push(CheckResult::bound(
            "lifted worm law <= 2^(delta+1) phi",
            loss - f64::powi(2.0, cp.delta as i32 + 1),
            1e-12,
        ));
    }
    let (tau, bound) = worm::mixing_time_bound(code, p, rep.lifted_congestion)?;
    r.push(CheckResult::bound(
        "tau(Metropolis RC) <= ln(2e / min phi) rho(F)",
        tau as f64 - bound,
        0.0,
    ));
    Ok((r, rep))
}

#[derive(Serialize)]
struct CertifySummary {
    code: String,
    graph: String,
    direction: Direction,
    vertices: usize,
    edges: usize,
    certified: bool,
    delta: Option<usize>,
    requested_delta: Option<usize>,
    passed: bool,
}

pub fn certify(a: &CertifyArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let code = a.code.classical()?;
    let graph = a.graph.build()?;
    let cert = certify_graphic(&code, &graph, a.direction)?;
    let delta = cert.as_ref().map(|c| c.delta);
    let passed = delta.is_some_and(|d| a.delta.is_none_or(|max| d <= max));
    match delta {
        Some(d) => writeln!(
            out,
            "{}: {} is {d}-{} with respect to {} ({} vertices)",
            if passed { "PASS" } else { "FAIL" },
            a.code.slug(),
            if a.direction == Direction::Primal { "graphic" } else { "cographic" },
            a.graph.slug(),
            graph.vertex_count()
        )?,
        None => writeln!(
            out,
            "FAIL: dependencies of {} do not embed in the cycle space of {} ({})",
            a.code.slug(),
            a.graph.slug(),
            a.direction
        )?,
    }
    let summary = CertifySummary {
        code: a.code.slug(),
        graph: a.graph.slug(),
        direction: a.direction,
        vertices: graph.vertex_count(),
        edges: graph.edge_count(),
        certified: delta.is_some(),
        delta,
        requested_delta: a.delta,
        passed,
    };
    if let Some(path) = &a.out {
        write_file(path, &to_json(&summary))?;
    }
    Ok(Outcome::from_passed(passed))
}

#[derive(Serialize)]
struct ExactRow {
    step: usize,
    trace_distance: f64,
    classical_tv: f64,
}

#[derive(Serialize)]
struct ExactSummary {
    code: String,
    qubits: usize,
    logical_qubits: usize,
    beta: f64,
    chain: KernelId,
    init: usize,
    steps: usize,
    /// Trace distance `½‖ρ_t − ρ_β‖₁` and worst-start classical TV per step.
    table: Vec<ExactRow>,
    /// First step with `‖ρ_t − ρ_β‖₁ ≤ e^{−1}` from this start.
    tau_quantum: Option<usize>,
    /// First step with `max_x ‖Q^t(x, ·) − π‖₁ ≤ e^{−1}`.
    tau_classical: Option<usize>,
    coupling_bound_holds: bool,
    final_trace_distance: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Serialize)]
struct TrajectorySummary {
    code: String,
    qubits: usize,
    beta: f64,
    chain: KernelId,
    seed: u64,
    steps: usize,
    burn_in: usize,
    /// Counts of post-burn-in syndrome weights `0..=c`.
    weight_counts: Vec<u64>,
    exact_weight_law: Option<Vec<f64>>,
    tv: Option<f64>,
    all_reachable: bool,
    tolerance: f64,
    passed: bool,
}

pub fn quantum(a: &QuantumArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let model = a.code.quantum()?;
    let params = ChainParams::from_beta(a.beta)?;
    if !a.chain.on_configurations() {
        return Err(usage(format!("--chain {} does not act on error configurations", a.chain)));
    }
    match a.mode {
        QuantumMode::Exact => quantum_exact(a, &model, params, out),
        QuantumMode::Trajectory => quantum_trajectory(a, &model, params, out),
    }
}

fn quantum_exact(a: &QuantumArgs, model: &StabilizerModel, params: ChainParams, out: &mut dyn Write) -> CliResult<Outcome> {
    let n = model.qubits();
    if n > stabilizer::JOINT_LIMIT {
        return Err(codesw::Error::SizeLimit {
            what: "qubits for the exact joint channel",
            limit: stabilizer::JOINT_LIMIT,
            actual: n,
        }
        .into());
    }
    let classical = model.classical_code();
    let q = oracle::build_transition_matrix(a.chain, classical, &params)?;
    let pi = oracle::enumerate_gibbs(classical, a.beta)?;
    let rho_beta = stabilizer::exact_gibbs_state(model, a.beta, GibbsRoute::Exponential)?;
    let channel = ExactChannel::new(model, &q)?;
    let mut joint = JointState::product(&BitVector::zeros(2 * n), &DenseState::basis_state(n, a.init)?)?;
    let profile = oracle::distance_profile(&q, &pi, a.steps);
    let threshold = (-1.0f64).exp();
    let mut table = Vec::with_capacity(a.steps + 1);
    table.push(ExactRow {
        step: 0,
        trace_distance: joint.quantum_marginal()?.trace_distance(&rho_beta),
        classical_tv: 0.5 * profile[0],
    });
    for t in 1..=a.steps {
        joint = channel.step(&joint)?;
        table.push(ExactRow {
            step: t,
            trace_distance: joint.quantum_marginal()?.trace_distance(&rho_beta),
            classical_tv: 0.5 * profile[t],
        });
    }
    let tau_quantum = table.iter().find(|r| 2.0 * r.trace_distance <= threshold).map(|r| r.step);
    let tau_classical = profile.iter().position(|&d| d <= threshold);
    let coupling_bound_holds = table.iter().all(|r| r.trace_distance <= r.classical_tv + 1e-12);
    let final_trace_distance = table.last().map_or(f64::NAN, |r| r.trace_distance);
    let tolerance = a.tol.unwrap_or(1e-8);
    let taus_ordered = match (tau_quantum, tau_classical) {
        (Some(tq), Some(tc)) => tq <= tc,
        (_, None) => true,
        (None, Some(_)) => false,
    };
    let passed = coupling_bound_holds && final_trace_distance <= tolerance && taus_ordered;
    writeln!(out, "step  trace_distance  classical_tv")?;
    for r in table.iter().filter(|r| r.step <= 10 || r.step % 50 == 0 || r.step == a.steps) {
        writeln!(out, "{:4}  {:.6e}  {:.6e}", r.step, r.trace_distance, r.classical_tv)?;
    }
    let show = |t: Option<usize>| t.map_or("not reached".to_string(), |t| t.to_string());
    writeln!(out, "tau_q = {}, tau(Q) = {}", show(tau_quantum), show(tau_classical))?;
    writeln!(
        out,
        "{}: coupling bound {}, final trace distance {:e} (tolerance {:e})",
        if passed { "PASS" } else { "FAIL" },
        if coupling_bound_holds { "holds" } else { "violated" },
        final_trace_distance,
        tolerance
    )?;
    if let Some(path) = &a.out {
        let summary = ExactSummary {
            code: a.code.slug(),
            qubits: n,
            logical_qubits: model.logical_qubits(),
            beta: a.beta,
            chain: a.chain,
            init: a.init,
            steps: a.steps,
            table,
            tau_quantum,
            tau_classical,
            coupling_bound_holds,
            final_trace_distance,
            tolerance,
            passed,
        };
        write_file(path, &to_json(&summary))?;
    }
    Ok(Outcome::from_passed(passed))
}

fn quantum_trajectory(
    a: &QuantumArgs,
    model: &StabilizerModel,
    params: ChainParams,
    out: &mut dyn Write,
) -> CliResult<Outcome> {
    if a.steps < 2 {
        return Err(usage("--steps must be at least 2 in trajectory mode"));
    }
    let n = model.qubits();
    let c = model.checks();
    let burn_in = a.steps / 2;
    let mut rng = rng_for(a.seed, 0);
    let mut sampler = PauliFrameSampler::new(
        model,
        a.chain,
        params,
        &PauliLabel::identity(n),
        &BitVector::zeros(2 * n),
    )?;
    let col = Echelon::new(&model.h().transpose());
    let mut counts = vec![0u64; c + 1];
    let mut all_reachable = true;
    for t in 0..a.steps {
        let s = sampler.step(&mut rng)?;
        all_reachable &= col.contains(&s);
        if t >= burn_in {
            counts[s.weight()] += 1;
        }
    }
    let exact = match oracle::enumerate_syndromes(model.h(), a.beta) {
        Ok(zeta) => {
            let mut law = vec![0.0; c + 1];
            for (&s, &q) in zeta.states().iter().zip(zeta.probs()) {
                law[s.count_ones() as usize] += q;
            }
            Some(law)
        }
        Err(codesw::Error::SizeLimit { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let total = (a.steps - burn_in) as f64;
    let tv = exact.as_ref().map(|law| {
        0.5 * counts
            .iter()
            .zip(law)
            .map(|(&k, &q)| (k as f64 / total - q).abs())
            .sum::<f64>()
    });
    let tolerance = a.tol.unwrap_or(0.02);
    let passed = all_reachable && tv.is_none_or(|tv| tv <= tolerance);
    writeln!(out, "weight  empirical  exact")?;
    for (w, &k) in counts.iter().enumerate() {
        let ex = exact.as_ref().map_or("-".to_string(), |l| format!("{:.6}", l[w]));
        writeln!(out, "{w:6}  {:.6}  {ex}", k as f64 / total)?;
    }
    writeln!(
        out,
        "{}: syndromes reachable = {all_reachable}, TV = {}",
        if passed { "PASS" } else { "FAIL" },
        tv.map_or("n/a".to_string(), |tv| format!("{tv:.5}"))
    )?;
    if let Some(path) = &a.out {
        let summary = TrajectorySummary {
            code: a.code.slug(),
            qubits: n,
            beta: a.beta,
            chain: a.chain,
            seed: a.seed,
            steps: a.steps,
            burn_in,
            weight_counts: counts,
            exact_weight_law: exact,
            tv,
            all_reachable,
            tolerance,
            passed,
        };
        write_file(path, &to_json(&summary))?;
    }
    Ok(Outcome::from_passed(passed))
}
