//! Named verification suites behind the `verify` command and the
//! acceptance tests: per-property pass/fail lines with observed margins.
//! Instances are generated from per-index seeded streams, so results do not
//! depend on execution order or thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bochner::{
    check_growth_bound, global_objective, lift_pointwise_exec, solve_global_from,
    BochnerFunction, LiftProblem, MeasureSpace,
};
use crate::center::{
    hull_constrained_center_from, solve_center, CenterProblem, SolverConfig,
};
use crate::error::Error;
use crate::exec::{self, Exec};
use crate::hull;
use crate::norms::{Exponent, LpProductNorm, NormKernel, NormSpec};
use crate::subspace::Subspace;
use crate::verification::{
    embedded_fixture, replay_fixture, run_two_atom_example, search_hilbert_counterexample,
    SearchConfig, SearchOutcome,
};

/// One checked property with its observed margin.
#[derive(Clone, Debug)]
pub struct PropertyLine {
    pub label: String,
    pub passed: bool,
    pub observed: f64,
}

impl PropertyLine {
    fn new(label: impl Into<String>, passed: bool, observed: f64) -> Self {
        PropertyLine {
            label: label.into(),
            passed,
            observed,
        }
    }
}

/// Result of one suite run.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: String,
    pub lines: Vec<PropertyLine>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    /// Plain-text table, one line per property.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            let status = if line.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{status}  [{}] {} (observed {:.6e})\n",
                self.name, line.label, line.observed
            ));
        }
        out
    }
}

/// The named suites exposed by the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteKind {
    Example,
    Lifting,
    Hilbert,
    Norms,
    Hull,
}

impl SuiteKind {
    pub const ALL: [SuiteKind; 5] = [
        SuiteKind::Example,
        SuiteKind::Lifting,
        SuiteKind::Hilbert,
        SuiteKind::Norms,
        SuiteKind::Hull,
    ];

    /// Parses a command-line suite token; `all` selects every suite.
    pub fn parse(token: &str) -> Option<Vec<SuiteKind>> {
        match token {
            "example33" => Some(vec![SuiteKind::Example]),
            "lifting" => Some(vec![SuiteKind::Lifting]),
            "hilbert" => Some(vec![SuiteKind::Hilbert]),
            "norms" => Some(vec![SuiteKind::Norms]),
            "hull" => Some(vec![SuiteKind::Hull]),
            "all" => Some(SuiteKind::ALL.to_vec()),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Example => "example33",
            SuiteKind::Lifting => "lifting",
            SuiteKind::Hilbert => "hilbert",
            SuiteKind::Norms => "norms",
            SuiteKind::Hull => "hull",
        }
    }
}

/// Options shared by every suite. `instances` falls back to a per-suite
/// default when unset.
#[derive(Clone, Copy, Debug)]
pub struct SuiteOptions {
    pub instances: Option<usize>,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            instances: None,
            seed: 7,
            exec: Exec::Auto,
        }
    }
}

pub fn run_suite(kind: SuiteKind, opts: &SuiteOptions) -> SuiteReport {
    match kind {
        SuiteKind::Example => example_suite(),
        SuiteKind::Lifting => lifting_suite(opts),
        SuiteKind::Hilbert => hilbert_suite(opts),
        SuiteKind::Norms => norms_suite(opts),
        SuiteKind::Hull => hull_suite(opts),
    }
}

// ---------------------------------------------------------------------
// example33

fn example_suite() -> SuiteReport {
    let name = SuiteKind::Example.name().to_string();
    let report = match run_two_atom_example() {
        Ok(r) => r,
        Err(e) => {
            return SuiteReport {
                name,
                lines: vec![PropertyLine::new(format!("example check: {e}"), false, f64::NAN)],
            }
        }
    };
    let expected = 19.0 + 5.0 * 13.0f64.sqrt();
    let analytic_gap = 5.0 * 13.0f64.sqrt() - 17.0;
    let lift_diff = (report.pointwise_lift_objective - expected).abs();
    let worst_residual = report
        .lift_atom_residuals
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let lines = vec![
        PropertyLine::new(
            format!("lift objective equals 19 + 5 sqrt(13) = {expected:.8}"),
            lift_diff <= 1e-9,
            lift_diff,
        ),
        PropertyLine::new(
            "pointwise 2-center certificates accept at both atoms",
            worst_residual <= 1e-9,
            worst_residual,
        ),
        PropertyLine::new(
            "direct global solve reaches the zero-function score 36",
            report.alternative_objective <= 36.0 + 1e-6,
            report.alternative_objective,
        ),
        PropertyLine::new(
            "improvement margin is at least 5 sqrt(13) - 17",
            report.violation_margin >= analytic_gap - 1e-6,
            report.violation_margin,
        ),
    ];
    SuiteReport { name, lines }
}

// ---------------------------------------------------------------------
// lifting

struct LiftingInstanceResult {
    rel_diff: f64,
    competitor_violation: f64,
    growth_ok: bool,
    growth_margin: f64,
}

fn lifting_suite(opts: &SuiteOptions) -> SuiteReport {
    let name = SuiteKind::Lifting.name().to_string();
    let instances = opts.instances.unwrap_or(200);
    let seed = opts.seed;
    let results: Vec<LiftingInstanceResult> =
        exec::map_indexed(opts.exec, instances, move |index| {
            lifting_instance(seed, index)
        });
    let worst_rel = results.iter().map(|r| r.rel_diff).fold(0.0, f64::max);
    let worst_violation = results
        .iter()
        .map(|r| r.competitor_violation)
        .fold(f64::NEG_INFINITY, f64::max);
    let growth_failures = results.iter().filter(|r| !r.growth_ok).count();
    let tightest_growth = results
        .iter()
        .map(|r| r.growth_margin)
        .fold(f64::INFINITY, f64::min);
    let lines = vec![
        PropertyLine::new(
            format!(
                "pointwise lift matches the direct global optimum on {instances} instances \
                 (<= 1e-6 relative)"
            ),
            worst_rel <= 1e-6,
            worst_rel,
        ),
        PropertyLine::new(
            "lift beats 500 random feasible competitors per instance",
            worst_violation <= 0.0,
            worst_violation,
        ),
        PropertyLine::new(
            format!("growth bound holds on every lift ({growth_failures} failures)"),
            growth_failures == 0,
            tightest_growth,
        ),
    ];
    SuiteReport { name, lines }
}

fn lifting_solver() -> SolverConfig {
    SolverConfig::default().with_max_iterations(24_000)
}

fn random_subspace(rng: &mut ChaCha8Rng, dim: usize) -> Subspace {
    let rank = rng.gen_range(1..=dim);
    for _ in 0..16 {
        let basis: Vec<Vec<f64>> = (0..rank)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        if let Ok(sub) = Subspace::new(dim, basis) {
            return sub;
        }
    }
    Subspace::full_space(dim)
}

fn lifting_instance(seed: u64, index: usize) -> LiftingInstanceResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64 + 1);

    let d = rng.gen_range(1..=4);
    let n = rng.gen_range(1..=4);
    let k = rng.gen_range(1..=4);
    let q = [1.0, 2.0, f64::INFINITY][rng.gen_range(0..3)];
    let p = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
    let subspace = random_subspace(&mut rng, d);
    let space = MeasureSpace::new((0..k).map(|_| rng.gen_range(0.2..2.0)).collect())
        .expect("positive weights");
    let functions: Vec<BochnerFunction> = (0..n)
        .map(|_| {
            BochnerFunction::new(
                (0..k)
                    .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                    .collect(),
            )
            .expect("finite values")
        })
        .collect();
    let problem = LiftProblem::new(
        functions,
        space,
        subspace,
        NormSpec::lq(q).expect("grid exponent"),
        p,
        p,
    )
    .expect("consistent shapes");

    let cfg = lifting_solver();
    let lift = lift_pointwise_exec(&problem, &cfg, Exec::Sequential);
    let lift_obj = global_objective(&problem, &lift.function).expect("validated");
    let global = solve_global_from(&problem, &cfg, &lift.function);
    let rel_diff = (lift_obj - global.objective).abs() / (1.0 + global.objective.abs());

    // 500 random competitors with rows in the subspace
    let sub = problem.subspace();
    let r = sub.rank();
    let lift_coords: Vec<Vec<f64>> = lift
        .function
        .rows()
        .iter()
        .map(|row| sub.coords(row))
        .collect();
    let radius = problem
        .functions()
        .iter()
        .flat_map(|f| f.rows())
        .map(|row| crate::linalg::norm2(row))
        .fold(1.0, f64::max);
    let mut competitor_violation = f64::NEG_INFINITY;
    for t in 0..500 {
        let h = if t % 2 == 0 {
            // global draw
            BochnerFunction::new(
                (0..problem.atoms())
                    .map(|_| {
                        let coords: Vec<f64> =
                            (0..r).map(|_| rng.gen_range(-2.0 * radius..2.0 * radius)).collect();
                        sub.from_coords(&coords)
                    })
                    .collect(),
            )
        } else {
            // local perturbation of the lift
            let scale = [1.0, 0.1, 0.01, 1e-3][(t / 2) % 4];
            BochnerFunction::new(
                lift_coords
                    .iter()
                    .map(|c| {
                        let coords: Vec<f64> = c
                            .iter()
                            .map(|ci| ci + rng.gen_range(-scale..scale))
                            .collect();
                        sub.from_coords(&coords)
                    })
                    .collect(),
            )
        }
        .expect("finite competitor");
        let h_obj = global_objective(&problem, &h).expect("validated");
        let violation = lift_obj - h_obj - 1e-6 * (1.0 + h_obj.abs());
        if violation > competitor_violation {
            competitor_violation = violation;
        }
    }

    let growth = check_growth_bound(&problem, &lift.function).expect("validated");
    LiftingInstanceResult {
        rel_diff,
        competitor_violation,
        growth_ok: growth.holds,
        growth_margin: growth.tightest_margin,
    }
}

// ---------------------------------------------------------------------
// hilbert

fn hilbert_suite(opts: &SuiteOptions) -> SuiteReport {
    let name = SuiteKind::Hilbert.name().to_string();
    let mut lines = Vec::new();

    match embedded_fixture() {
        Err(e) => lines.push(PropertyLine::new(
            format!("frozen fixture loads: {e}"),
            false,
            f64::NAN,
        )),
        Ok(fixture) => match replay_fixture(&fixture) {
            Err(e) => lines.push(PropertyLine::new(
                format!("fixture replay: {e}"),
                false,
                f64::NAN,
            )),
            Ok(replay) => {
                let drift = [
                    (replay.hull_gap - fixture.hull_gap).abs(),
                    (replay.improvement_margin - fixture.improvement_margin).abs(),
                    (replay.center_objective - fixture.center_objective).abs(),
                    (replay.centroid_objective - fixture.centroid_objective).abs(),
                ]
                .into_iter()
                .fold(0.0, f64::max);
                let worst_residual = replay
                    .per_atom_residuals
                    .iter()
                    .copied()
                    .fold(0.0, f64::max);
                lines.push(PropertyLine::new(
                    "replay reproduces the frozen values (<= 1e-9)",
                    drift <= 1e-9,
                    drift,
                ));
                lines.push(PropertyLine::new(
                    "2-center set avoids the hull by >= 1e-3",
                    replay.hull_gap >= 1e-3,
                    replay.hull_gap,
                ));
                lines.push(PropertyLine::new(
                    "centroid is the certified 2-center at every atom (<= 1e-9)",
                    worst_residual <= 1e-9,
                    worst_residual,
                ));
                lines.push(PropertyLine::new(
                    "centroid is globally improvable by >= 1e-4",
                    replay.improvement_margin >= 1e-4,
                    replay.improvement_margin,
                ));
            }
        },
    }

    // p = 2 must be rejected up front
    let space = MeasureSpace::uniform(2).expect("two atoms");
    let rejected = matches!(
        search_hilbert_counterexample(2.0, &space, 2, &SearchConfig::default()),
        Err(Error::InvalidParameter(_))
    );
    lines.push(PropertyLine::new(
        "search rejects p = 2",
        rejected,
        if rejected { 0.0 } else { 1.0 },
    ));

    // total dimension 2: the planar guarantee forbids a find
    let degenerate_cfg = SearchConfig {
        seed: opts.seed,
        budget: 25,
        exec: opts.exec,
        ..SearchConfig::default()
    };
    let line = match search_hilbert_counterexample(1.0, &space, 1, &degenerate_cfg) {
        Ok(SearchOutcome::Exhausted { best_gap, .. }) => PropertyLine::new(
            "no counterexample reported when the fiber space is planar",
            best_gap < 1e-3,
            best_gap,
        ),
        Ok(SearchOutcome::Found(_)) => PropertyLine::new(
            "no counterexample reported when the fiber space is planar",
            false,
            1.0,
        ),
        Err(e) => PropertyLine::new(format!("degenerate search: {e}"), false, f64::NAN),
    };
    lines.push(line);

    SuiteReport { name, lines }
}

// ---------------------------------------------------------------------
// norms

fn norms_suite(opts: &SuiteOptions) -> SuiteReport {
    let name = SuiteKind::Norms.name().to_string();
    let trials = opts.instances.unwrap_or(1000);
    let kernels = norm_kernel_grid();
    let seed = opts.seed;
    let lines: Vec<PropertyLine> =
        exec::map_indexed(opts.exec, kernels.len(), move |index| {
            let (label, kernel, dim) = &norm_kernel_grid()[index];
            let violation = norm_axioms_worst_violation(kernel.as_ref(), *dim, trials, seed, index);
            PropertyLine::new(
                format!("axioms + subgradient inequality: {label} ({trials} trials)"),
                violation <= 0.0,
                violation,
            )
        });
    SuiteReport { name, lines }
}

type KernelEntry = (String, Box<dyn NormKernel + Send + Sync>, usize);

fn norm_kernel_grid() -> Vec<KernelEntry> {
    let mut out: Vec<KernelEntry> = Vec::new();
    for q in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        out.push((
            format!("l_q norm, q = {q}"),
            Box::new(NormSpec::lq(q).expect("grid exponent")),
            4,
        ));
    }
    for q in [1.0, 2.0, f64::INFINITY] {
        out.push((
            format!("weighted l_q norm, q = {q}"),
            Box::new(
                NormSpec::lq(q)
                    .expect("grid exponent")
                    .with_weights(vec![0.5, 1.0, 2.0, 3.5])
                    .expect("positive weights"),
            ),
            4,
        ));
    }
    for p in [1.0, 1.5, 2.0, 3.0] {
        out.push((
            format!("composite L_p kernel, p = {p}"),
            Box::new(
                LpProductNorm::new(
                    Exponent::Finite(p),
                    vec![0.5, 1.0, 2.0],
                    2,
                    NormSpec::euclidean(),
                )
                .expect("valid kernel"),
            ),
            6,
        ));
    }
    out.push((
        "composite L_1.5 kernel over a weighted fiber".into(),
        Box::new(
            LpProductNorm::new(
                Exponent::Finite(1.5),
                vec![1.0, 2.0],
                3,
                NormSpec::linf().with_weights(vec![0.7, 1.0, 1.3]).expect("weights"),
            )
            .expect("valid kernel"),
        ),
        6,
    ));
    out
}

/// Worst violation (positive = failure) of the norm axioms, the subgradient
/// support identity, the dual bound and the subgradient inequality over
/// seeded random trials, at tolerance 1e-12.
fn norm_axioms_worst_violation(
    kernel: &(dyn NormKernel + Send + Sync),
    dim: usize,
    trials: usize,
    seed: u64,
    stream: usize,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6f726d);
    rng.set_stream(stream as u64 + 1);
    let tol = 1e-12;
    let mut worst: f64 = f64::NEG_INFINITY;

    // the origin maps to zero exactly
    let zero = vec![0.0; dim];
    worst = worst.max(kernel.eval(&zero).expect("dim ok").abs());

    for _ in 0..trials {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let lambda: f64 = rng.gen_range(-3.0..3.0);
        let nx = kernel.eval(&x).expect("dim ok");
        let ny = kernel.eval(&y).expect("dim ok");
        let scale = 1.0 + nx + ny;

        // separation: sampled x is nonzero with probability one
        if x.iter().any(|v| v.abs() > 1e-8) && nx <= 0.0 {
            worst = worst.max(1.0);
        }

        let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
        let nsum = kernel.eval(&sum).expect("dim ok");
        worst = worst.max(nsum - (nx + ny) - tol * scale);

        let scaled: Vec<f64> = x.iter().map(|a| a * lambda).collect();
        let nscaled = kernel.eval(&scaled).expect("dim ok");
        worst = worst.max((nscaled - lambda.abs() * nx).abs() - tol * (1.0 + nscaled));

        let g = kernel.subgradient(&x).expect("dim ok");
        let support: f64 = x.iter().zip(&g).map(|(a, b)| a * b).sum();
        worst = worst.max((support - nx).abs() - tol * (1.0 + nx));
        worst = worst.max(kernel.dual_eval(&g).expect("dim ok") - 1.0 - tol);
        let inner: f64 = g
            .iter()
            .zip(y.iter().zip(&x))
            .map(|(gi, (yi, xi))| gi * (yi - xi))
            .sum();
        worst = worst.max(nx + inner - ny - tol * scale);
    }
    worst
}

// ---------------------------------------------------------------------
// hull

fn hull_suite(opts: &SuiteOptions) -> SuiteReport {
    let name = SuiteKind::Hull.name().to_string();
    let instances = opts.instances.unwrap_or(120);
    let seed = opts.seed;

    // two-point problems across the norm and exponent grid
    let combos: Vec<(f64, f64)> = [1.0, 2.0, f64::INFINITY]
        .iter()
        .flat_map(|&q| [1.0, 1.5, 2.0, 3.0].iter().map(move |&m| (q, m)))
        .collect();
    let pairs_per_combo = (instances / combos.len()).max(2);
    let two_point_gaps: Vec<f64> = exec::map_indexed(
        opts.exec,
        combos.len() * pairs_per_combo,
        move |index| {
            let (q, m) = combos_for_index(index, pairs_per_combo);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7477_6f70);
            rng.set_stream(index as u64 + 1);
            let d = rng.gen_range(1..=4);
            let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let problem = CenterProblem::new(
                vec![a.clone(), b.clone()],
                m,
                NormSpec::lq(q).expect("grid exponent"),
                Subspace::full_space(d),
            )
            .expect("consistent");
            let sol = solve_center(&problem, &SolverConfig::default());
            hull::hull_membership_gap(&[a, b], &sol.minimizer).unwrap_or(f64::INFINITY)
        },
    );
    let worst_two_point = two_point_gaps.into_iter().fold(0.0, f64::max);

    // planar full-space instances: some center lies in the hull
    let planar_count = (instances / 2).max(10);
    let planar_gaps: Vec<f64> = exec::map_indexed(opts.exec, planar_count, move |index| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6865_6c79);
        rng.set_stream(index as u64 + 1);
        let n = rng.gen_range(3..=6);
        let q = [1.0, 2.0, f64::INFINITY][rng.gen_range(0..3)];
        let m = [1.0, 1.5, 2.0, 3.0][rng.gen_range(0..4)];
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect())
            .collect();
        let problem = CenterProblem::new(
            points,
            m,
            NormSpec::lq(q).expect("grid exponent"),
            Subspace::full_space(2),
        )
        .expect("consistent");
        let cfg = SolverConfig::default();
        let base = solve_center(&problem, &cfg);
        hull_constrained_center_from(&problem, &cfg, 1e-9, &base).hull_gap
    });
    let worst_planar = planar_gaps.into_iter().fold(0.0, f64::max);

    let lines = vec![
        PropertyLine::new(
            format!(
                "two-point centers stay in the segment across the norm grid \
                 ({} instances)",
                combos.len() * pairs_per_combo
            ),
            worst_two_point <= 1e-6,
            worst_two_point,
        ),
        PropertyLine::new(
            format!(
                "planar full-space sets admit a center inside the hull \
                 ({planar_count} instances)"
            ),
            worst_planar <= 1e-6,
            worst_planar,
        ),
    ];
    SuiteReport { name, lines }
}

fn combos_for_index(index: usize, pairs_per_combo: usize) -> (f64, f64) {
    let combos: Vec<(f64, f64)> = [1.0, 2.0, f64::INFINITY]
        .iter()
        .flat_map(|&q| [1.0, 1.5, 2.0, 3.0].iter().map(move |&m| (q, m)))
        .collect();
    combos[index / pairs_per_combo]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_tokens_parse() {
        assert_eq!(SuiteKind::parse("example33"), Some(vec![SuiteKind::Example]));
        assert_eq!(SuiteKind::parse("all").map(|v| v.len()), Some(5));
        assert_eq!(SuiteKind::parse("bogus"), None);
    }

    #[test]
    fn example_suite_passes() {
        let report = example_suite();
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn norms_suite_small_run_passes() {
        let opts = SuiteOptions {
            instances: Some(100),
            ..SuiteOptions::default()
        };
        let report = run_suite(SuiteKind::Norms, &opts);
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn lifting_suite_small_run_passes() {
        let opts = SuiteOptions {
            instances: Some(12),
            ..SuiteOptions::default()
        };
        let report = run_suite(SuiteKind::Lifting, &opts);
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn hull_suite_small_run_passes() {
        let opts = SuiteOptions {
            instances: Some(24),
            ..SuiteOptions::default()
        };
        let report = run_suite(SuiteKind::Hull, &opts);
        assert!(report.passed(), "{}", report.render());
    }
}
