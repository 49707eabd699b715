//! Executes one experiment and collects its summary lines and output files.

use convdyn::convolution::eigen_residual;
use convdyn::dynamics::{
    lift_semi_irregular, non_cyclicity_certificate, orbit_trace_with, scrambled_family, semi_irregular_gap_witness,
    semi_irregularity_detector, subspace_orbit_certificate, verify_non_cyclicity, Certificate, Detection,
    DEFAULT_GRID_SAMPLES,
};
use convdyn::suite::full_suite;
use convdyn::{
    find_dichotomy_points, ConvolutionSymbol, CylinderIndex, DichotomySearch, Error, Execution, MultiIndex, Radius,
};
use serde::Serialize;

use crate::config::{Command, ConfigError, ExperimentConfig, Spec};
use crate::presets::{parse_function, parse_operator, FunctionPreset};

/// Outcome class, ordered by exit-code precedence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Io,
    ValidationFailure,
    NotFound,
    ConfigError,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Io => 1,
            Status::ValidationFailure => 2,
            Status::NotFound => 3,
            Status::ConfigError => 4,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Io => "io error",
            Status::ValidationFailure => "validation failure",
            Status::NotFound => "not found",
            Status::ConfigError => "config error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub title: String,
    pub status: Status,
    pub lines: Vec<String>,
    /// `(file name, contents)` to emit in the experiment's output directory.
    pub files: Vec<(String, String)>,
}

impl Report {
    fn new(title: String) -> Self {
        Self {
            title,
            status: Status::Ok,
            lines: Vec::new(),
            files: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    fn raise(&mut self, status: Status) {
        self.status = self.status.max(status);
    }

    /// Error certificates (search failures, mismatches) only change the exit
    /// status in strict mode.
    fn error_certificate(&mut self, strict: bool, status: Status, message: String) {
        self.line(format!("error certificate: {message}"));
        self.file(
            "error.json",
            pretty(&ErrorCertificate {
                kind: "error",
                error: message,
            }),
        );
        if strict {
            self.raise(status);
        }
    }

    pub fn summary(&self) -> String {
        let mut out = format!("== {} ==\n", self.title);
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out.push_str(&format!(
            "status: {} (exit {})\n",
            self.status.label(),
            self.status.code()
        ));
        out
    }
}

#[derive(Serialize)]
struct ErrorCertificate {
    kind: &'static str,
    error: String,
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn operator(cfg: &ExperimentConfig) -> Result<ConvolutionSymbol, ConfigError> {
    let spec = cfg
        .operator
        .as_ref()
        .ok_or_else(|| ConfigError::new("operator", "this command needs an operator"))?;
    parse_operator(&spec.as_text()).map_err(|e| ConfigError::new("operator", e))
}

fn function_from(spec: &Spec, field: &str) -> Result<FunctionPreset, ConfigError> {
    parse_function(&spec.as_text()).map_err(|e| ConfigError::new(field, e))
}

fn function(cfg: &ExperimentConfig) -> Result<FunctionPreset, ConfigError> {
    let spec = cfg
        .function
        .as_ref()
        .ok_or_else(|| ConfigError::new("function", "this command needs a function"))?;
    function_from(spec, "function")
}

fn fmt_radii(radii: &[Radius]) -> String {
    radii.iter().map(|r| r.get().to_string()).collect::<Vec<_>>().join(",")
}

pub fn run(cfg: &ExperimentConfig) -> Report {
    let title = cfg
        .name
        .clone()
        .or_else(|| cfg.command.map(|c| c.name().to_string()))
        .unwrap_or_else(|| "experiment".into());
    let mut report = Report::new(title);
    if let Err(e) = dispatch(cfg, &mut report) {
        report.line(e.to_string());
        report.files.clear();
        report.raise(Status::ConfigError);
    }
    report
}

fn dispatch(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let command = cfg.command()?;
    match command {
        Command::Orbit => orbit(cfg, report),
        Command::CertifyNoncyclic => noncyclic(cfg, report),
        Command::CertifyNonsupercyclic => nonsupercyclic(cfg, report),
        Command::Liyorke => liyorke(cfg, report),
        Command::Lemmas => lemmas(cfg, report),
        Command::EigenSearch => eigen_search(cfg, report),
        Command::DemoGap => demo_gap(cfg, report),
    }
}

fn orbit(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let l = operator(cfg)?;
    let f = function(cfg)?.function;
    let horizon = cfg.horizon(Command::Orbit)?;
    let radii = cfg.radii()?;
    let samples = cfg.samples.unwrap_or(DEFAULT_GRID_SAMPLES);
    let trace = orbit_trace_with(&l, &f, horizon, &radii, samples, Execution::default())
        .map_err(|e| ConfigError::new("radii", e.to_string()))?;
    let max_dim = trace.records.iter().map(|r| r.essential_dim).max().unwrap_or(0);
    let last = trace.records.last().expect("K + 1 records");
    report.line(format!(
        "orbit of {} on {} terms, K = {horizon}, radii {}",
        l.label(),
        f.len(),
        fmt_radii(&radii)
    ));
    report.line(format!(
        "max essential dimension along the orbit: {max_dim} (start {})",
        f.essential_dimension()
    ));
    report.line(format!("majorants at k = {horizon}: {:?}", last.majorant));
    report.file("trace.csv", trace.to_csv());
    Ok(())
}

fn noncyclic(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let l = operator(cfg)?;
    let f = function(cfg)?.function;
    let horizon = cfg.horizon(Command::CertifyNoncyclic)?;
    let cert = non_cyclicity_certificate(&l, &f, horizon);
    let verified = verify_non_cyclicity(&cert);
    report.line(format!(
        "orbit of {} stays in cylinder n = {}; functional at {} vanishes on all {} iterates (max |value| {})",
        l.label(),
        cert.n,
        cert.annihilator_index,
        horizon + 1,
        cert.max_abs_functional_on_orbit
    ));
    report.line(format!(
        "witness {} has functional value {}; independent check: {}",
        cert.witness,
        cert.witness_value,
        if verified { "passed" } else { "FAILED" }
    ));
    if !verified {
        report.raise(Status::ValidationFailure);
    }
    report.file(
        "noncyclicity.json",
        Certificate::NonCyclicity(cert).to_json_pretty() + "\n",
    );
    Ok(())
}

fn nonsupercyclic(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let l = operator(cfg)?;
    let generators = match (&cfg.generators, &cfg.function) {
        (Some(g), _) => g
            .iter()
            .map(|s| function_from(s, "generators").map(|p| p.function))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(Spec::Text(s))) => s
            .split(';')
            .map(|part| {
                parse_function(part)
                    .map(|p| p.function)
                    .map_err(|e| ConfigError::new("function", e))
            })
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(spec)) => vec![function_from(spec, "function")?.function],
        (None, None) => {
            return Err(ConfigError::new(
                "generators",
                "this command needs generators (or ';'-separated functions)",
            ))
        }
    };
    let horizon = cfg.horizon(Command::CertifyNonsupercyclic)?;
    match subspace_orbit_certificate(&l, &generators, horizon) {
        Ok(cert) => {
            let valid = cert.is_valid();
            report.line(format!(
                "orbit of a {}-dimensional subspace under {} stays in cylinder m = {} for k <= {horizon}; annihilator {}",
                cert.rank,
                l.label(),
                cert.m,
                cert.annihilator_index
            ));
            report.line(format!("certificate valid: {valid}"));
            if !valid {
                report.raise(Status::ValidationFailure);
            }
            report.file(
                "subspace.json",
                Certificate::SubspaceConfinement(cert).to_json_pretty() + "\n",
            );
        }
        Err(e @ Error::DependentGenerators { .. }) => {
            report.error_certificate(cfg.strict(), Status::ValidationFailure, e.to_string())
        }
        Err(e) => return Err(ConfigError::new("generators", e.to_string())),
    }
    Ok(())
}

fn liyorke(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let preset = match &cfg.function {
        Some(spec) => function_from(spec, "function")?,
        None => parse_function("gap:1").expect("default preset"),
    };
    let radii = cfg.radii()?;
    let (eps, delta) = cfg.thresholds()?;
    let Some((var, blocks)) = preset.gap.clone() else {
        return detector(cfg, report, &preset, &radii, eps, delta);
    };
    let mut witness = semi_irregular_gap_witness(var, &blocks, &radii, eps, delta)
        .map_err(|e| ConfigError::new("function", e.to_string()))?;
    if cfg.operator.is_some() {
        let l = operator(cfg)?;
        let n = CylinderIndex::new(var).expect("gap variables start at 1");
        match lift_semi_irregular(&witness, &l, n) {
            Ok(lifted) => {
                report.line(format!("witness lifted from d{var} on cylinder {var} to {}", l.label()));
                witness = lifted;
            }
            Err(e) => {
                report.error_certificate(cfg.strict(), Status::ValidationFailure, e.to_string());
                return Ok(());
            }
        }
    }
    let members = cfg.members.unwrap_or(10);
    let family = scrambled_family(&witness, members).map_err(|e| ConfigError::new("members", e.to_string()))?;
    let witness_ok = witness.validate().is_valid();
    let valid = family
        .validate_with(Execution::default())
        .into_iter()
        .filter(|&v| v)
        .count();
    report.line(format!(
        "semi-irregular witness for {}: small checkpoints {:?}, big checkpoints {:?}, valid: {witness_ok}",
        witness.operator.label(),
        witness.small_checkpoints.iter().map(|s| s.k).collect::<Vec<_>>(),
        witness.big_checkpoints.iter().map(|b| b.k).collect::<Vec<_>>()
    ));
    report.line(format!(
        "scrambled family of {members} scalars: {valid}/{} pair certificates valid, min |alpha - lambda| {}",
        family.pairs.len(),
        family.min_scale()
    ));
    report.line("evidence: finite checkpoints with closed-form bounds from the gap structure");
    if !witness_ok || valid != family.pairs.len() {
        report.raise(Status::ValidationFailure);
    }
    report.file(
        "witness.json",
        Certificate::SemiIrregularity(witness).to_json_pretty() + "\n",
    );
    report.file("scrambled.json", pretty(&family));
    Ok(())
}

fn detector(
    cfg: &ExperimentConfig,
    report: &mut Report,
    preset: &FunctionPreset,
    radii: &[Radius],
    eps: f64,
    delta: f64,
) -> Result<(), ConfigError> {
    let l = operator(cfg)?;
    let horizon = cfg.horizon(Command::Liyorke)?;
    let detection = semi_irregularity_detector(&l, &preset.function, horizon, radii, eps, delta)
        .map_err(|e| ConfigError::new("eps", e.to_string()))?;
    match &detection {
        Detection::Observed { small_ks, big_ks } => report.line(format!(
            "semi-irregular behaviour observed up to K = {horizon}: {} small iterates (first {}), {} later big iterates",
            small_ks.len(),
            small_ks[0],
            big_ks.len()
        )),
        Detection::NotObserved(d) => report.line(format!("not observed up to K = {horizon}: {}", d.reason)),
    }
    report.line("horizon-bounded heuristic, not a disproof");
    report.file("detection.json", pretty(&detection));
    Ok(())
}

fn lemmas(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let seed = cfg.seed.unwrap_or(0);
    let cases = cfg.cases.unwrap_or(1000);
    let suite = full_suite(seed, cases, Execution::default()).map_err(|e| ConfigError::new("cases", e.to_string()))?;
    for l in suite.summary().lines() {
        report.line(l);
    }
    if !suite.all_passed() {
        report.raise(Status::ValidationFailure);
    }
    report.file("lemmas.json", pretty(&suite));
    Ok(())
}

fn eigen_search(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let l = operator(cfg)?;
    let radii = cfg.radii()?;
    let nearly_trivial = !l.is_trivial()
        && l.coefficients()
            .iter()
            .filter(|(k, _)| !k.is_zero())
            .all(|(_, c)| c.norm() < 1e-12)
        && l.coefficient(&MultiIndex::zero()).norm() >= 1e-12;
    if nearly_trivial {
        report.line("note: every derivative coefficient is below 1e-12; the operator is numerically close to a multiple of the identity");
    }
    match find_dichotomy_points(&l, &DichotomySearch::default()) {
        Ok(points) => {
            report.line(format!(
                "dichotomy points for {}: |phi| = {} at {:?}, |phi| = {} at {:?}",
                l.label(),
                points.small_modulus,
                points.small.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>(),
                points.big_modulus,
                points.big.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>()
            ));
            for (name, lambda) in [("small", &points.small), ("big", &points.big)] {
                let a = eigen_residual(&l, lambda, 10, radii[0]);
                let b = eigen_residual(&l, lambda, 20, radii[0]);
                report.line(format!(
                    "eigen residual at the {name} point, r = {}: D=10 {:e} (bound {:e}), D=20 {:e} (bound {:e})",
                    radii[0].get(),
                    a.residual,
                    a.bound,
                    b.residual,
                    b.bound
                ));
            }
            report.line("residuals at the level of 1e-16 times the coefficient scale are floating-point rounding");
            report.file("dichotomy.json", pretty(&points));
        }
        Err(Error::NotFound(log)) => {
            report.file("search_log.json", pretty(&log));
            report.error_certificate(
                cfg.strict(),
                Status::NotFound,
                format!("no dichotomy points found for {}", l.label()),
            );
        }
        Err(e @ Error::TrivialOperator) => report.error_certificate(cfg.strict(), Status::NotFound, e.to_string()),
        Err(e) => return Err(ConfigError::new("operator", e.to_string())),
    }
    Ok(())
}

fn demo_gap(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), ConfigError> {
    let preset = match &cfg.function {
        Some(spec) => function_from(spec, "function")?,
        None => parse_function("gap:1").expect("default preset"),
    };
    let Some((var, blocks)) = preset.gap.clone() else {
        return Err(ConfigError::new("function", "demo-gap needs a gap:j[,blocks] function"));
    };
    let radii = cfg.radii()?;
    let (eps, delta) = cfg.thresholds()?;
    let horizon = cfg.horizon(Command::DemoGap)?;
    let witness = semi_irregular_gap_witness(var, &blocks, &radii, eps, delta)
        .map_err(|e| ConfigError::new("function", e.to_string()))?;
    let validation = witness.validate();
    report.line(format!(
        "gap series on z{var} with blocks {blocks:?}, L = d{var}, radii {}",
        fmt_radii(&radii)
    ));
    for s in &witness.small_checkpoints {
        report.line(format!("  small k = {:>3}: p_r bounds {:?}", s.k, s.upper_bounds));
    }
    for b in &witness.big_checkpoints {
        report.line(format!("  big   k = {:>3}: |value at 0| >= {}", b.k, b.lower_bound));
    }
    report.line(format!(
        "witness re-checked against the recomputed orbit: {}",
        if validation.is_valid() { "valid" } else { "INVALID" }
    ));
    report.line("evidence: finite checkpoints with closed-form bounds from the gap structure");
    if !validation.is_valid() {
        report.raise(Status::ValidationFailure);
    }
    let trace = orbit_trace_with(
        &witness.operator,
        &witness.function,
        horizon,
        &radii,
        cfg.samples.unwrap_or(DEFAULT_GRID_SAMPLES),
        Execution::default(),
    )
    .map_err(|e| ConfigError::new("radii", e.to_string()))?;
    report.file(
        "witness.json",
        Certificate::SemiIrregularity(witness).to_json_pretty() + "\n",
    );
    report.file("trace.csv", trace.to_csv());
    Ok(())
}
