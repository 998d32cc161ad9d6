//! The eight named experiments.

use std::fmt::Write;

use serde::Serialize;

use hybrid_lab::config_space::{quadrature, to_madelung, GaussianPacket, GridSpec, ProductGaussian};
use hybrid_lab::dynamics::{
    classical_twin, evolve_gaussian, evolve_madelung_auto, evolve_wavefunction,
    gaussian_time_series, grid_moments, k_sensitivity, madelung_moments, GaussianMoments,
    InteractionParams, Tag,
};
use hybrid_lab::ensemble_algebra::{
    check_homomorphism, strong_separability, ClassicalPoly, LabeledState, ObservablePair, Operator,
};
use hybrid_lab::entanglement::{
    chsh_max, gaussian_mutual_information, negativity_qubits, reduce_to_qq_prime,
    von_neumann_entropy, VerdictRecord,
};
use hybrid_lab::protocol::{
    audit, fixtures, holevo_information, hr_qubit_protocol, witness_verdict, LocalFix, Outcome,
    ProtocolScript,
};
use hybrid_lab::sampling::{random_smooth_states, TransportedProduct};
use hybrid_lab::Error;

use crate::output::csv_table;
use crate::{CliError, ExperimentConfig, Recipe};

pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Named invariant with its measured value. Only enforced checks affect the exit status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
    pub enforced: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value < limit,
            enforced: true,
        }
    }

    fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value > limit,
            enforced: true,
        }
    }

    fn informational(self) -> Self {
        Self {
            enforced: false,
            ..self
        }
    }
}

pub struct RecipeOutput {
    pub files: Vec<OutputFile>,
    pub summary: String,
    pub checks: Vec<Check>,
}

impl RecipeOutput {
    fn new(recipe: Recipe, cfg: &ExperimentConfig) -> Self {
        Self {
            files: Vec::new(),
            summary: format!("hybridlab {} ({})\n", recipe.name(), cfg.experiment),
            checks: Vec::new(),
        }
    }

    fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push(OutputFile {
            name: name.into(),
            contents,
        });
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.summary.push_str(text.as_ref());
        self.summary.push('\n');
    }

    fn finish(mut self) -> Self {
        if !self.checks.is_empty() {
            self.summary.push_str("checks:\n");
            for c in &self.checks {
                let status = match (c.passed, c.enforced) {
                    (true, _) => "pass",
                    (false, true) => "FAIL",
                    (false, false) => "not met (reported)",
                };
                writeln!(self.summary, "  {}: {} (value {:e}, limit {:e})", c.name, status, c.value, c.limit)
                    .unwrap();
            }
        }
        self
    }
}

pub fn run(recipe: Recipe, cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let out = match recipe {
        Recipe::MediateGaussian => mediate_gaussian(cfg),
        Recipe::MediateGrid => mediate_grid(cfg),
        Recipe::BracketCheck => bracket_check(cfg),
        Recipe::SeparabilityScan => separability_scan(cfg),
        Recipe::KSensitivity => k_sensitivity_table(cfg),
        Recipe::ClassicalTwin => twin(cfg),
        Recipe::QubitProtocol => qubit_protocol(cfg),
        Recipe::Audit => audit_script(cfg),
    }?;
    Ok(out.finish())
}

fn grid(cfg: &ExperimentConfig) -> Result<GridSpec, CliError> {
    GridSpec::new(cfg.grid.half_width, cfg.grid.points).map_err(|e| CliError::config("grid", e))
}

fn initial_product(cfg: &ExperimentConfig) -> Result<ProductGaussian, CliError> {
    let i = &cfg.initial;
    let mut packets = [GaussianPacket::vacuum(); 3];
    for (a, slot) in packets.iter_mut().enumerate() {
        *slot = GaussianPacket::chirped(i.centers[a], i.widths[a], i.momenta[a], i.chirps[a])
            .map_err(|e| CliError::config("initial", e))?;
    }
    Ok(ProductGaussian { packets })
}

fn params(cfg: &ExperimentConfig, t: f64) -> Result<InteractionParams, CliError> {
    InteractionParams::new(cfg.coupling.g1, cfg.coupling.g2, t).map_err(|e| CliError::config("coupling", e))
}

fn moment_gap(a: &GaussianMoments, b: &GaussianMoments) -> f64 {
    (a.mean() - b.mean()).amax().max((a.cov() - b.cov()).amax())
}

fn mediate_gaussian(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::MediateGaussian, cfg);
    let init = GaussianMoments::from_product(&initial_product(cfg)?, Tag::Quantum);
    let series = gaussian_time_series(&init, cfg.coupling.g1, cfg.coupling.g2, &cfg.time.times)?;
    out.file("mediate-gaussian.csv", series.to_csv());
    out.line(format!("g1 = {}, g2 = {}", cfg.coupling.g1, cfg.coupling.g2));
    out.line("time  cov(q,q')  cov(p,p')  E_N  I(Q:Q')  verdict");
    for r in &series.records {
        let e = r.log_negativity.unwrap_or(0.0);
        let v = VerdictRecord::new("log_negativity", e);
        out.line(format!(
            "{}  {:.6}  {:.6}  {:.6e}  {:.6e}  {}",
            r.time,
            r.cov[2],
            r.cov[8],
            e,
            r.mutual_information,
            if v.entangled() { "entangled" } else { "not entangled" }
        ));
    }
    let first = &series.records[0];
    if first.time == 0.0 && init.covariance(0, 2) == 0.0 && init.covariance(1, 3) == 0.0 {
        out.checks.push(Check::below(
            "E_N(0) = 0 for a product start",
            first.log_negativity.unwrap_or(0.0),
            f64::MIN_POSITIVE,
        ));
    }
    let last = series.records.last().expect("nonempty times");
    out.checks.push(
        Check::above(
            format!("E_N({}) above 1e-3", last.time),
            last.log_negativity.unwrap_or(0.0),
            1e-3,
        )
        .informational(),
    );
    Ok(out)
}

#[derive(Serialize)]
struct GridRow {
    time: f64,
    norm_drift: f64,
    transport_vs_oracle: f64,
    madelung_vs_oracle: f64,
    transport_vs_madelung: f64,
    density_l2: f64,
}

fn mediate_grid(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::MediateGrid, cfg);
    let grid = grid(cfg)?;
    let form = initial_product(cfg)?;
    let psi = form.sample(&grid).map_err(|e| CliError::config("initial", e))?;
    let oracle0 = GaussianMoments::from_product(&form, Tag::Quantum);
    let mut madelung = to_madelung(&psi);
    let mut t_prev = 0.0;
    let mut rows = Vec::new();
    for &t in &cfg.time.grid_times {
        let p = params(cfg, t)?;
        let transported = evolve_wavefunction(&psi, &p, Some(&form))?;
        madelung = evolve_madelung_auto(&madelung, &params(cfg, t - t_prev)?)?;
        t_prev = t;
        let oracle = evolve_gaussian(&oracle0, &p);
        let mt = grid_moments(&transported);
        let mm = madelung_moments(&madelung);
        let diff: Vec<f64> = madelung
            .density()
            .iter()
            .zip(transported.density())
            .map(|(a, b)| (a - b).powi(2))
            .collect();
        rows.push(GridRow {
            time: t,
            norm_drift: (transported.norm_squared() - 1.0).abs(),
            transport_vs_oracle: moment_gap(&mt, &oracle),
            madelung_vs_oracle: moment_gap(&mm, &oracle),
            transport_vs_madelung: moment_gap(&mt, &mm),
            density_l2: quadrature(&diff, &grid)?.sqrt(),
        });
    }
    out.file("mediate-grid.csv", csv_table(&rows)?);
    out.line(format!("grid N = {}, L = {}", grid.points(), grid.half_width()));
    out.line("time  norm drift  transport-oracle  madelung-oracle  transport-madelung  L2(P)");
    for r in &rows {
        out.line(format!(
            "{}  {:.3e}  {:.3e}  {:.3e}  {:.3e}  {:.3e}",
            r.time, r.norm_drift, r.transport_vs_oracle, r.madelung_vs_oracle, r.transport_vs_madelung, r.density_l2
        ));
    }
    let worst = |f: fn(&GridRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let tol = &cfg.tolerances;
    out.checks.push(Check::below("norm drift", worst(|r| r.norm_drift), tol.norm_drift));
    out.checks.push(Check::below("transport vs oracle moments", worst(|r| r.transport_vs_oracle), tol.agreement));
    out.checks.push(Check::below("madelung vs oracle moments", worst(|r| r.madelung_vs_oracle), tol.agreement));
    out.checks.push(Check::below("transport vs madelung moments", worst(|r| r.transport_vs_madelung), tol.agreement));
    Ok(out)
}

fn labeled_random_states(cfg: &ExperimentConfig, grid: &GridSpec) -> Result<Vec<LabeledState>, CliError> {
    Ok(random_smooth_states(grid, cfg.seed, cfg.states.count)?
        .into_iter()
        .enumerate()
        .map(|(i, (_, psi))| LabeledState {
            id: format!("random-{i}"),
            state: to_madelung(&psi),
        })
        .collect())
}

fn bracket_check(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::BracketCheck, cfg);
    let grid = grid(cfg)?;
    let pairs = cfg
        .observables
        .pairs
        .iter()
        .map(|[a, b]| {
            let parse = |s: &str| s.parse().map_err(|e: Error| CliError::config("observables.pairs", e));
            ObservablePair::new(parse(a)?, parse(b)?).map_err(|e| CliError::config("observables.pairs", e))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let states = labeled_random_states(cfg, &grid)?;
    let report = check_homomorphism(&pairs, &states)?;
    out.file("bracket-check.csv", csv_table(&report.records)?);
    out.line(format!(
        "{} pairs x {} seeded states (seed {}), N = {}",
        pairs.len(),
        states.len(),
        cfg.seed,
        grid.points()
    ));
    for p in &pairs {
        let worst = report
            .records
            .iter()
            .filter(|r| r.left == p.left.to_string() && r.right == p.right.to_string())
            .map(|r| r.residual)
            .fold(0.0, f64::max);
        out.line(format!("  {{{}, {}}} -> {}: max residual {:.3e}", p.left, p.right, p.image(), worst));
    }
    out.line(format!("max residual {:.3e}", report.max_residual));
    out.checks.push(Check::below("homomorphism residual", report.max_residual, cfg.tolerances.bracket));
    Ok(out)
}

/// `{Q_{p²}, C_{k²}}` on the designated state below, from the closed-form Gaussian.
pub const DESIGNATED_VALUE: f64 = -1.0;

/// Unit-width product with a chirped `Q` packet (`b = 0.5`), carried to `t = 1` at unit
/// couplings.
pub fn designated_state() -> TransportedProduct {
    TransportedProduct::new(
        ProductGaussian {
            packets: [
                GaussianPacket::chirped(0.0, 1.0, 0.0, 0.5).expect("positive width"),
                GaussianPacket::vacuum(),
                GaussianPacket::vacuum(),
            ],
        },
        InteractionParams::new(1.0, 1.0, 1.0).expect("finite"),
    )
}

#[derive(Serialize)]
struct SeparabilityRow {
    probe: String,
    mediator: String,
    state: String,
    value: f64,
    structural_zero: bool,
}

fn separability_scan(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::SeparabilityScan, cfg);
    let grid = grid(cfg)?;
    let probes = cfg
        .observables
        .probes
        .iter()
        .map(|s| Operator::parse(s).map_err(|e| CliError::config("observables.probes", e)))
        .collect::<Result<Vec<_>, _>>()?;
    let mediators = cfg
        .observables
        .mediators
        .iter()
        .map(|s| ClassicalPoly::parse(s).map_err(|e| CliError::config("observables.mediators", e)))
        .collect::<Result<Vec<_>, _>>()?;
    let product = initial_product(cfg)?.sample(&grid).map_err(|e| CliError::config("initial", e))?;
    let states = [
        ("product", to_madelung(&product), true),
        ("entangled", to_madelung(&designated_state().sample(&grid)?), false),
    ];
    let mut rows = Vec::new();
    for (name, st, is_product) in &states {
        for (m, ms) in probes.iter().zip(&cfg.observables.probes) {
            for (f, fs) in mediators.iter().zip(&cfg.observables.mediators) {
                let value = strong_separability(m, f, st).map_err(|e| match e {
                    Error::SectorMixing(_) => CliError::config("observables.probes", e),
                    e => e.into(),
                })?;
                rows.push(SeparabilityRow {
                    probe: ms.clone(),
                    mediator: fs.clone(),
                    state: name.to_string(),
                    value,
                    structural_zero: *is_product || f.action_degree() <= 1,
                });
            }
        }
    }
    let designated = strong_separability(
        &Operator::parse("p^2")?,
        &ClassicalPoly::parse("k^2")?,
        &states[1].1,
    )?;
    out.file("separability-scan.csv", csv_table(&rows)?);
    out.line("probe  mediator  state  {Q_M, C_f}");
    for r in &rows {
        out.line(format!(
            "{}  {}  {}  {:.6e}{}",
            r.probe,
            r.mediator,
            r.state,
            r.value,
            if r.structural_zero { "  (structural zero)" } else { "" }
        ));
    }
    out.line(format!(
        "designated case {{Q_p^2, C_k^2}} on the entangled state: {designated:.6} (closed form {DESIGNATED_VALUE})"
    ));
    let worst_zero = rows
        .iter()
        .filter(|r| r.structural_zero)
        .map(|r| r.value.abs())
        .fold(0.0, f64::max);
    out.checks.push(Check::below("structural zeros", worst_zero, cfg.tolerances.structural_zero));
    out.checks.push(Check::below(
        "designated case vs closed form",
        (designated - DESIGNATED_VALUE).abs(),
        cfg.tolerances.designated,
    ));
    Ok(out)
}

fn k_sensitivity_table(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::KSensitivity, cfg);
    let p = params(cfg, cfg.time.sweep_time)?;
    let rows = k_sensitivity(&cfg.k_sensitivity.k_variances, cfg.k_sensitivity.x_variance, &p)
        .map_err(|e| match e {
            Error::UncertaintyViolation { .. } => CliError::config("k_sensitivity", e),
            e => e.into(),
        })?;
    out.file("k-sensitivity.csv", csv_table(&rows)?);
    out.line(format!("t = {}, g1 = {}, g2 = {}", p.t, p.g1, p.g2));
    out.line("Var k  Var x  E_N");
    for r in &rows {
        out.line(format!("{}  {}  {:.6e}", r.k_variance, r.x_variance, r.log_negativity));
    }
    let mut spread = f64::INFINITY;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            spread = spread.min((a.log_negativity - b.log_negativity).abs());
        }
    }
    if rows.len() > 1 {
        out.checks.push(Check::above("smallest pairwise E_N difference", spread, 1e-3).informational());
    }
    Ok(out)
}

#[derive(Serialize)]
struct TwinRow {
    time: f64,
    cov_q_qprime: f64,
    corr_q_qprime: f64,
    mutual_information: f64,
    identical_to_quantum: bool,
    entanglement_query: &'static str,
}

fn twin(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::ClassicalTwin, cfg);
    let form = initial_product(cfg)?;
    let quantum0 = GaussianMoments::from_product(&form, Tag::Quantum);
    let classical0 = quantum0.with_tag(Tag::Classical);
    let mut rows = Vec::new();
    let mut min_mi = f64::INFINITY;
    for &t in &cfg.time.times {
        let p = params(cfg, t)?;
        let c = classical_twin(&classical0, &p)?;
        let q = evolve_gaussian(&quantum0, &p);
        let mi = gaussian_mutual_information(&c)?;
        if t > 0.0 {
            min_mi = min_mi.min(mi);
        }
        rows.push(TwinRow {
            time: t,
            cov_q_qprime: c.covariance(0, 2),
            corr_q_qprime: c.correlation(0, 2),
            mutual_information: mi,
            identical_to_quantum: c.cov() == q.cov() && c.mean() == q.mean(),
            entanglement_query: match reduce_to_qq_prime(&c) {
                Err(Error::TagRefusal) => "refused",
                _ => "answered",
            },
        });
    }
    let wrong_tag = matches!(classical_twin(&quantum0, &params(cfg, 0.0)?), Err(Error::WrongTag { .. }));
    out.file("classical-twin.csv", csv_table(&rows)?);
    out.line("time  cov(q,q')  corr(q,q')  I(Q:Q')  same covariance  entanglement query");
    for r in &rows {
        out.line(format!(
            "{}  {:.6}  {:.6}  {:.6e}  {}  {}",
            r.time, r.cov_q_qprime, r.corr_q_qprime, r.mutual_information, r.identical_to_quantum, r.entanglement_query
        ));
    }
    out.line(format!("quantum-tagged input rejected by the twin: {wrong_tag}"));
    let count = |ok: bool| if ok { 0.0 } else { 1.0 };
    let not_identical = rows.iter().filter(|r| !r.identical_to_quantum).count() as f64;
    let answered = rows.iter().filter(|r| r.entanglement_query != "refused").count() as f64;
    out.checks.push(Check::below("rows with covariance differing from the quantum run", not_identical, 0.5));
    out.checks.push(Check::below("entanglement queries answered", answered, 0.5));
    out.checks.push(Check::below("quantum input accepted by the twin", count(wrong_tag), 0.5));
    if cfg.coupling.g1 != 0.0 && cfg.coupling.g2 != 0.0 && min_mi.is_finite() {
        out.checks.push(Check::above("mutual information for t > 0", min_mi, 0.0));
    }
    Ok(out)
}

#[derive(Serialize)]
struct QubitRow {
    stage: String,
    bit: String,
    probability: f64,
    negativity: f64,
    chsh: f64,
    entropy_bits: f64,
}

fn qubit_protocol(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::QubitProtocol, cfg);
    let q = &cfg.qubit;
    let fix = LocalFix::new(q.fix_target, q.fix_gate.matrix()).map_err(|e| CliError::config("qubit", e))?;
    let trace = hr_qubit_protocol(&q.rho0.state(), &q.rho1.state(), &fix).map_err(|e| match e {
        Error::NotOrthogonal(_) | Error::FixDoesNotMap(_) => CliError::config("qubit", e),
        e => e.into(),
    })?;
    let row = |stage: &str, bit: String, p: f64, s: &hybrid_lab::entanglement::TwoQubitState| QubitRow {
        stage: stage.to_string(),
        bit,
        probability: p,
        negativity: negativity_qubits(s),
        chsh: chsh_max(s),
        entropy_bits: von_neumann_entropy(s),
    };
    let mut rows = Vec::new();
    rows.push(row("mixture", "-".into(), 1.0, &trace.mixture));
    for step in &trace.steps {
        for (c, (p, s)) in step.state.branches().iter().enumerate() {
            rows.push(row(step.label, c.to_string(), *p, s));
        }
    }
    rows.push(row("final", "-".into(), 1.0, &trace.final_state));
    let holevo = holevo_information(&trace.steps[0].state);
    out.file("qubit-protocol.csv", csv_table(&rows)?);
    out.line(format!("rho0 = {:?}, rho1 = {:?}, fix {:?} on {:?}", q.rho0, q.rho1, q.fix_gate, q.fix_target));
    out.line(format!("Holevo information of the preparation: {holevo:.12} bit"));
    out.line(format!(
        "pre-measurement mixture: negativity {:.3e}, CHSH {:.12}",
        negativity_qubits(&trace.mixture),
        chsh_max(&trace.mixture)
    ));
    out.line(format!(
        "final state: negativity {:.12}, CHSH {:.12}",
        negativity_qubits(&trace.final_state),
        chsh_max(&trace.final_state)
    ));
    let rho0 = q.rho0.state();
    let branch_dev = trace.steps[2]
        .state
        .branches()
        .iter()
        .map(|(_, s)| s.distance(&rho0))
        .fold(0.0, f64::max);
    out.checks.push(Check::below("corrected branches equal rho0", branch_dev, 1e-12));
    Ok(out)
}

#[derive(Serialize)]
struct AuditDocument<'a> {
    report: &'a hybrid_lab::protocol::AuditReport,
    verdict: &'a hybrid_lab::protocol::WitnessVerdict,
}

fn audit_script(cfg: &ExperimentConfig) -> Result<RecipeOutput, CliError> {
    let mut out = RecipeOutput::new(Recipe::Audit, cfg);
    let script = match &cfg.protocol.script {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::config("protocol.script", format!("{}: {e}", path.display())))?;
            ProtocolScript::from_toml(&text).map_err(|e| CliError::config("protocol.script", e))?
        }
        None => fixtures::hr_post_selection(),
    };
    let report = audit(&script).map_err(|e| match e {
        Error::MalformedScript(_) => CliError::config("protocol.script", e),
        e => e.into(),
    })?;
    let verdict = witness_verdict(&report, cfg.protocol.entangled);
    let doc = AuditDocument {
        report: &report,
        verdict: &verdict,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    out.file("audit.json", json + "\n");
    out.line(format!("script: {}", report.script));
    let mut flags = String::new();
    for f in &report.flags {
        write!(flags, " {f}").unwrap();
    }
    out.line(format!("flags:{}", if flags.is_empty() { " none" } else { &flags }));
    out.line(format!("witness applicable: {}", report.witness_applicable));
    out.line(format!("Holevo information of the preparation: {:.12} bit", report.holevo_information));
    out.line(format!("entangled: {}", cfg.protocol.entangled));
    out.line(format!("verdict: {}", verdict.text));
    for n in &report.notes {
        out.line(format!("note: {n}"));
    }
    let unsafe_verdict = !report.flags.is_empty() && verdict.outcome == Outcome::RuledOut;
    out.checks.push(Check::below("flagged run ruled out", if unsafe_verdict { 1.0 } else { 0.0 }, 0.5));
    Ok(out)
}
