//! Problem and report file formats plus the command implementations behind
//! the `simulift` binary. Problems and reports are JSON documents; reports
//! echo the instance and carry a digest over everything except the timing
//! field, so identical inputs produce byte-identical reports modulo timing.

use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use simulift_core::bochner::{
    global_objective, lift_pointwise, solve_global_from, BochnerFunction, LiftProblem,
    MeasureSpace,
};
use simulift_core::center::{solve_center, CenterProblem, SolverConfig};
use simulift_core::norms::NormSpec;
use simulift_core::subspace::Subspace;
use simulift_core::suites::{run_suite, SuiteKind, SuiteOptions};
use simulift_core::verification::{
    search_hilbert_counterexample, SearchConfig, SearchOutcome,
};

pub const REPORT_SCHEMA: &str = "simulift-report-v1";

/// Exit codes of the binary: 0 success/convergence, 1 input error,
/// 2 non-convergence or failed verification.
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for CliError {}

fn err(key: &str, message: impl fmt::Display) -> CliError {
    CliError(format!("{key}: {message}"))
}

// ---------------------------------------------------------------------
// problem files

/// On-disk problem description. `measure` may be omitted for pure center
/// problems (one atom of weight 1); `"inf"` is the supremum-norm token.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    pub norm: NormSection,
    pub subspace_basis: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Vec<f64>>,
    pub functions: Vec<Vec<Vec<f64>>>,
    pub p: f64,
    pub m: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NormSection {
    pub q: QValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// The norm exponent: a number, or the string `"inf"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum QValue {
    Number(f64),
    Token(String),
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
        let file: ProblemFile = serde_json::from_str(text)
            .map_err(|e| CliError(format!("problem file: {e}")))?;
        file.validate()?;
        Ok(file)
    }

    pub fn load(path: &std::path::Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError(format!("{}: {e}", path.display())))?;
        ProblemFile::parse(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.dimension == 0 {
            return Err(err("dimension", "must be a positive integer"));
        }
        self.norm_spec()?;
        if self.subspace_basis.is_empty() {
            return Err(err("subspace_basis", "must contain at least one vector"));
        }
        for (i, row) in self.subspace_basis.iter().enumerate() {
            if row.len() != self.dimension {
                return Err(err(
                    &format!("subspace_basis[{i}]"),
                    format!("expected {} numbers, got {}", self.dimension, row.len()),
                ));
            }
        }
        if let Some(measure) = &self.measure {
            if measure.is_empty() {
                return Err(err("measure", "must contain at least one atom weight"));
            }
            if let Some(j) = measure.iter().position(|w| !w.is_finite() || *w <= 0.0) {
                return Err(err(
                    &format!("measure[{j}]"),
                    "atom weights must be strictly positive",
                ));
            }
        }
        let atoms = self.atoms();
        if self.functions.is_empty() {
            return Err(err("functions", "must contain at least one function"));
        }
        for (i, f) in self.functions.iter().enumerate() {
            if f.len() != atoms {
                return Err(err(
                    &format!("functions[{i}]"),
                    format!("expected {atoms} rows (one per atom), got {}", f.len()),
                ));
            }
            for (j, row) in f.iter().enumerate() {
                if row.len() != self.dimension {
                    return Err(err(
                        &format!("functions[{i}][{j}]"),
                        format!("expected {} numbers, got {}", self.dimension, row.len()),
                    ));
                }
                if row.iter().any(|x| !x.is_finite()) {
                    return Err(err(&format!("functions[{i}][{j}]"), "non-finite value"));
                }
            }
        }
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(err("p", "must be a finite number >= 1"));
        }
        if !(self.m.is_finite() && self.m >= 1.0) {
            return Err(err("m", "must be a finite number >= 1"));
        }
        Ok(())
    }

    pub fn atoms(&self) -> usize {
        self.measure.as_ref().map_or(1, |m| m.len())
    }

    pub fn num_functions(&self) -> usize {
        self.functions.len()
    }

    pub fn norm_spec(&self) -> Result<NormSpec, CliError> {
        let spec = match &self.norm.q {
            QValue::Number(q) => NormSpec::lq(*q).map_err(|e| err("norm.q", e))?,
            QValue::Token(token) if token == "inf" => NormSpec::linf(),
            QValue::Token(token) => {
                return Err(err("norm.q", format!("unknown token {token:?}; use \"inf\"")))
            }
        };
        match &self.norm.weights {
            Some(w) => {
                if w.len() != self.dimension {
                    return Err(err(
                        "norm.weights",
                        format!("expected {} numbers, got {}", self.dimension, w.len()),
                    ));
                }
                spec.with_weights(w.clone()).map_err(|e| err("norm.weights", e))
            }
            None => Ok(spec),
        }
    }

    pub fn subspace(&self) -> Result<Subspace, CliError> {
        Subspace::new(self.dimension, self.subspace_basis.clone())
            .map_err(|e| err("subspace_basis", e))
    }

    pub fn measure_space(&self) -> Result<MeasureSpace, CliError> {
        let weights = self.measure.clone().unwrap_or_else(|| vec![1.0]);
        MeasureSpace::new(weights).map_err(|e| err("measure", e))
    }

    /// The full lift problem this file describes, with `m` optionally
    /// overridden from the command line.
    pub fn lift_problem(&self, m_override: Option<f64>) -> Result<LiftProblem, CliError> {
        let m = m_override.unwrap_or(self.m);
        LiftProblem::new(
            self.functions
                .iter()
                .map(|rows| BochnerFunction::new(rows.clone()))
                .collect::<Result<_, _>>()
                .map_err(|e| err("functions", e))?,
            self.measure_space()?,
            self.subspace()?,
            self.norm_spec()?,
            self.p,
            m,
        )
        .map_err(|e| err("problem file", e))
    }

    /// The pure center problem of a single-atom file.
    pub fn center_problem(&self, m_override: Option<f64>) -> Result<CenterProblem, CliError> {
        let m = m_override.unwrap_or(self.m);
        let points: Vec<Vec<f64>> = self.functions.iter().map(|f| f[0].clone()).collect();
        CenterProblem::new(points, m, self.norm_spec()?, self.subspace()?)
            .map_err(|e| err("problem file", e))
    }
}

// ---------------------------------------------------------------------
// report files

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub kind: String,
    pub digest: String,
    pub instance: InstanceEcho,
    pub per_atom_centers: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<GlobalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    pub timing_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceEcho {
    pub problem: ProblemFile,
    pub m_effective: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveSection {
    pub minimizer: Vec<f64>,
    pub objective: f64,
    pub certificate_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LiftSection {
    pub objective: f64,
    pub per_atom_residuals: Vec<f64>,
    pub worst_residual: f64,
    pub converged: bool,
    pub non_convergent_atoms: Vec<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GlobalSection {
    pub objective: f64,
    pub certificate_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub improvement_margin: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LiftOptimal,
    LiftSuboptimal,
    Inconclusive,
}

/// Digest over the instance echo; timing is deliberately excluded so that
/// reports are reproducible byte for byte.
pub fn instance_digest(echo: &InstanceEcho) -> String {
    let canonical = serde_json::to_string(echo).expect("echo serializes");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Solver flags shared by `solve` and `lift`.
#[derive(Clone, Copy, Debug)]
pub struct SolveFlags {
    pub m: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SolveFlags {
    fn default() -> Self {
        let cfg = SolverConfig::default();
        SolveFlags {
            m: None,
            tolerance: cfg.tolerance,
            max_iterations: cfg.max_iterations,
            seed: cfg.seed,
        }
    }
}

impl SolveFlags {
    fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default()
            .with_max_iterations(self.max_iterations)
            .with_tolerance(self.tolerance);
        cfg.seed = self.seed;
        cfg
    }

    fn echo(&self, problem: &ProblemFile) -> InstanceEcho {
        InstanceEcho {
            problem: problem.clone(),
            m_effective: self.m.unwrap_or(problem.m),
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            seed: self.seed,
        }
    }
}

/// `solve`: a pure center problem (single atom) or a single-function
/// atomwise best approximation. Returns the report and the exit code.
pub fn run_solve(problem: &ProblemFile, flags: &SolveFlags) -> Result<(ReportFile, i32), CliError> {
    let started = Instant::now();
    let cfg = flags.solver_config();
    let echo = flags.echo(problem);
    let digest = instance_digest(&echo);

    if problem.atoms() == 1 {
        let center = problem.center_problem(flags.m)?;
        let solution = solve_center(&center, &cfg);
        let exit = if solution.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
        let report = ReportFile {
            schema: REPORT_SCHEMA.into(),
            kind: "solve".into(),
            digest,
            instance: echo,
            per_atom_centers: vec![solution.minimizer.clone()],
            solve: Some(SolveSection {
                minimizer: solution.minimizer,
                objective: solution.objective,
                certificate_residual: solution.certificate_residual,
                iterations: solution.iterations,
                converged: solution.converged,
            }),
            lift: None,
            global: None,
            verdict: None,
            timing_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        return Ok((report, exit));
    }

    if problem.num_functions() == 1 {
        // atomwise best approximation of one function
        let lift_problem = problem.lift_problem(flags.m)?;
        let lift = lift_pointwise(&lift_problem, &cfg);
        let objective = global_objective(&lift_problem, &lift.function)
            .map_err(|e| CliError(e.to_string()))?;
        let exit = if lift.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
        let report = ReportFile {
            schema: REPORT_SCHEMA.into(),
            kind: "solve".into(),
            digest,
            instance: echo,
            per_atom_centers: lift.function.rows().to_vec(),
            solve: None,
            lift: Some(LiftSection {
                objective,
                per_atom_residuals: lift
                    .per_atom
                    .iter()
                    .map(|s| s.certificate_residual)
                    .collect(),
                worst_residual: lift.worst_residual,
                converged: lift.converged,
                non_convergent_atoms: lift.non_convergent_atoms,
            }),
            global: None,
            verdict: None,
            timing_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        return Ok((report, exit));
    }

    Err(CliError(
        "solve expects a pure center problem (single atom) or a single function; \
         use lift for the general case"
            .into(),
    ))
}

/// `lift`: pointwise lift plus direct global solve, with the optimality
/// verdict. The lift is suboptimal only when the global solve improves on
/// it by more than ten times the solver tolerance.
pub fn run_lift(problem: &ProblemFile, flags: &SolveFlags) -> Result<(ReportFile, i32), CliError> {
    let started = Instant::now();
    let cfg = flags.solver_config();
    let echo = flags.echo(problem);
    let digest = instance_digest(&echo);

    let lift_problem = problem.lift_problem(flags.m)?;
    let lift = lift_pointwise(&lift_problem, &cfg);
    let lift_objective = global_objective(&lift_problem, &lift.function)
        .map_err(|e| CliError(e.to_string()))?;
    let global = solve_global_from(&lift_problem, &cfg, &lift.function);
    let margin = (lift_objective - global.objective).max(0.0);

    let verdict = if margin > 10.0 * cfg.tolerance {
        Verdict::LiftSuboptimal
    } else if lift.converged && global.converged {
        Verdict::LiftOptimal
    } else {
        Verdict::Inconclusive
    };
    let exit = if lift.converged && global.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    };

    let report = ReportFile {
        schema: REPORT_SCHEMA.into(),
        kind: "lift".into(),
        digest,
        instance: echo,
        per_atom_centers: lift.function.rows().to_vec(),
        solve: None,
        lift: Some(LiftSection {
            objective: lift_objective,
            per_atom_residuals: lift
                .per_atom
                .iter()
                .map(|s| s.certificate_residual)
                .collect(),
            worst_residual: lift.worst_residual,
            converged: lift.converged,
            non_convergent_atoms: lift.non_convergent_atoms,
        }),
        global: Some(GlobalSection {
            objective: global.objective,
            certificate_residual: global.certificate_residual,
            iterations: global.iterations,
            converged: global.converged,
            improvement_margin: margin,
        }),
        verdict: Some(verdict),
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    Ok((report, exit))
}

/// `verify`: runs the named suites and prints one pass/fail line per
/// property. Exit 0 only when everything passes.
pub fn run_verify(suite: &str, instances: Option<usize>, seed: u64) -> (String, i32) {
    let Some(kinds) = SuiteKind::parse(suite) else {
        return (
            format!(
                "unknown suite {suite:?}; expected one of example33, lifting, hilbert, norms, \
                 hull, all\n"
            ),
            EXIT_INPUT_ERROR,
        );
    };
    let opts = SuiteOptions {
        instances,
        seed,
        ..SuiteOptions::default()
    };
    let mut out = String::new();
    let mut all_passed = true;
    for kind in kinds {
        let report = run_suite(kind, &opts);
        all_passed &= report.passed();
        out.push_str(&report.render());
    }
    out.push_str(if all_passed { "result: PASS\n" } else { "result: FAIL\n" });
    (out, if all_passed { EXIT_OK } else { EXIT_NOT_CONVERGED })
}

/// `counterexample search`: randomized seeded search, freezing the first
/// qualifying triple to `out`.
pub fn run_search(
    p: f64,
    atoms: usize,
    dim: usize,
    budget: usize,
    seed: u64,
    out: &std::path::Path,
) -> Result<(String, i32), CliError> {
    let space = MeasureSpace::uniform(atoms).map_err(|e| err("--atoms", e))?;
    let cfg = SearchConfig {
        seed,
        budget,
        ..SearchConfig::default()
    };
    let outcome = search_hilbert_counterexample(p, &space, dim, &cfg)
        .map_err(|e| err("--p", e))?;
    match outcome {
        SearchOutcome::Found(fixture) => {
            let json = serde_json::to_string_pretty(&*fixture)
                .map_err(|e| CliError(e.to_string()))?;
            std::fs::write(out, json)
                .map_err(|e| CliError(format!("{}: {e}", out.display())))?;
            Ok((
                format!(
                    "found counterexample at candidate {} (hull gap {:.6e}, improvement \
                     {:.6e}); frozen to {}\n",
                    fixture.candidate_index,
                    fixture.hull_gap,
                    fixture.improvement_margin,
                    out.display()
                ),
                EXIT_OK,
            ))
        }
        SearchOutcome::Exhausted { candidates, best_gap } => Ok((
            format!(
                "no qualifying triple among {candidates} candidates (best hull gap \
                 {best_gap:.6e}); nothing written\n"
            ),
            EXIT_NOT_CONVERGED,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom_file() -> ProblemFile {
        ProblemFile::parse(
            r#"{
                "dimension": 2,
                "norm": {"q": 2},
                "subspace_basis": [[1.0, 0.0]],
                "functions": [[[-1.0, 1.0]], [[2.0, 2.0]]],
                "p": 1,
                "m": 2
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_inf_token_and_rejects_unknown() {
        let file = ProblemFile::parse(
            r#"{
                "dimension": 1,
                "norm": {"q": "inf"},
                "subspace_basis": [[1.0]],
                "functions": [[[0.5]]],
                "p": 1,
                "m": 1
            }"#,
        )
        .unwrap();
        assert!(file.norm_spec().is_ok());

        let bad = ProblemFile::parse(
            r#"{
                "dimension": 1,
                "norm": {"q": "sup"},
                "subspace_basis": [[1.0]],
                "functions": [[[0.5]]],
                "p": 1,
                "m": 1
            }"#,
        );
        let msg = bad.err().map(|e| e.to_string()).unwrap_or_default();
        assert!(msg.contains("norm.q"), "diagnostic was {msg}");
    }

    #[test]
    fn shape_errors_name_the_key() {
        let bad = ProblemFile::parse(
            r#"{
                "dimension": 2,
                "norm": {"q": 2},
                "subspace_basis": [[1.0, 0.0]],
                "measure": [1.0, 1.0],
                "functions": [[[1.0, 2.0], [3.0, 4.0]], [[1.0, 2.0]]],
                "p": 1,
                "m": 2
            }"#,
        );
        let msg = bad.err().map(|e| e.to_string()).unwrap_or_default();
        assert!(msg.contains("functions[1]"), "diagnostic was {msg}");

        let bad = ProblemFile::parse(
            r#"{
                "dimension": 2,
                "norm": {"q": 2},
                "subspace_basis": [[1.0, 0.0]],
                "measure": [1.0, -1.0],
                "functions": [[[1.0, 2.0], [3.0, 4.0]]],
                "p": 1,
                "m": 2
            }"#,
        );
        let msg = bad.err().map(|e| e.to_string()).unwrap_or_default();
        assert!(msg.contains("measure[1]"), "diagnostic was {msg}");
    }

    #[test]
    fn solve_reports_the_atom_center() {
        let (report, exit) = run_solve(&atom_file(), &SolveFlags::default()).unwrap();
        assert_eq!(exit, EXIT_OK);
        let solve = report.solve.unwrap();
        assert!((solve.minimizer[0] - 0.5).abs() <= 1e-9);
        assert!((solve.minimizer[1]).abs() <= 1e-12);
        assert!((solve.objective - 9.5).abs() <= 1e-9);
        assert!(solve.converged);
    }

    #[test]
    fn report_objectives_reverify_against_the_library() {
        let file = ProblemFile::load(std::path::Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/example33.json"
        )))
        .unwrap();
        let (report, exit) = run_lift(&file, &SolveFlags::default()).unwrap();
        assert_eq!(exit, EXIT_OK);
        // round trip through JSON
        let text = serde_json::to_string_pretty(&report).unwrap();
        let parsed: ReportFile = serde_json::from_str(&text).unwrap();
        let problem = parsed.instance.problem.lift_problem(None).unwrap();
        let g = BochnerFunction::new(parsed.per_atom_centers.clone()).unwrap();
        let reevaluated = global_objective(&problem, &g).unwrap();
        let lift = parsed.lift.unwrap();
        assert!(
            (reevaluated - lift.objective).abs() <= 1e-12 * (1.0 + lift.objective.abs()),
            "report objective {} vs re-evaluated {reevaluated}",
            lift.objective
        );
        assert_eq!(parsed.digest, instance_digest(&parsed.instance));
    }

    #[test]
    fn verdict_flips_with_the_exponent() {
        let file = ProblemFile::load(std::path::Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/example33.json"
        )))
        .unwrap();
        let (report, _) = run_lift(&file, &SolveFlags::default()).unwrap();
        assert_eq!(report.verdict, Some(Verdict::LiftSuboptimal));
        let margin = report.global.unwrap().improvement_margin;
        assert!(margin >= 1.0, "margin {margin}");

        let flags = SolveFlags {
            m: Some(1.0),
            ..SolveFlags::default()
        };
        let (report, exit) = run_lift(&file, &flags).unwrap();
        assert_eq!(exit, EXIT_OK);
        assert_eq!(report.verdict, Some(Verdict::LiftOptimal));
    }

    #[test]
    fn unknown_suite_is_an_input_error() {
        let (_, code) = run_verify("bogus", None, 7);
        assert_eq!(code, EXIT_INPUT_ERROR);
    }
}
