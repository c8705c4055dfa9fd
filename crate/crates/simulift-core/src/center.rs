//! Relative m-centers of finite point sets constrained to a linear
//! subspace: the objective sum_i w_i |a_i - y|^m minimized over y in Y,
//! with a closed form for the inner-product m = 2 case, the shared
//! iterative engine otherwise, and subgradient-based optimality
//! certificates throughout. Metric projection is the n = 1 case.

use crate::error::{Error, Result};
use crate::hull;
use crate::linalg;
use crate::norms::{pow_m, AmbientNorm};
use crate::solver::{self, ConvexProblem};
use crate::subspace::Subspace;

/// Step-size rule for the subgradient phase of the iterative solver.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StepRule {
    /// Normalized steps on a restarted geometric decay schedule.
    #[default]
    Diminishing,
    /// Polyak steps against a per-round estimated level.
    Polyak,
}

/// Solver knobs. `max_iterations` is the total budget, split evenly across
/// the multi-start initializations; `tolerance` is on the certificate
/// residual.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub step_rule: StepRule,
    pub seed: u64,
    /// Skip the closed-form dispatch, forcing the subgradient path.
    pub force_iterative: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 50_000,
            tolerance: 1e-9,
            step_rule: StepRule::default(),
            seed: 0,
            force_iterative: false,
        }
    }
}

impl SolverConfig {
    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }
}

/// The data of one relative-center problem: the point set, the exponent,
/// the ambient norm and the constraint subspace.
#[derive(Clone, Debug)]
pub struct CenterProblem {
    points: Vec<Vec<f64>>,
    m: f64,
    norm: AmbientNorm,
    constraint: Subspace,
    weights: Vec<f64>,
}

impl CenterProblem {
    pub fn new(
        points: Vec<Vec<f64>>,
        m: f64,
        norm: impl Into<AmbientNorm>,
        constraint: Subspace,
    ) -> Result<Self> {
        let norm = norm.into();
        if points.is_empty() {
            return Err(Error::EmptyInput("center problem point set"));
        }
        if !(m.is_finite() && m >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "center exponent must be a finite real >= 1, got {m}"
            )));
        }
        let d = constraint.ambient_dim();
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    context: "center problem point",
                    expected: d,
                    actual: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("center problem point"));
            }
        }
        if let Some(nd) = norm.known_dim() {
            if nd != d {
                return Err(Error::DimensionMismatch {
                    context: "center problem norm",
                    expected: d,
                    actual: nd,
                });
            }
        }
        let weights = vec![1.0; points.len()];
        Ok(CenterProblem {
            points,
            m,
            norm,
            constraint,
            weights,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                context: "center problem weights",
                expected: self.points.len(),
                actual: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "point weights must be strictly positive and finite".into(),
            ));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn exponent(&self) -> f64 {
        self.m
    }

    pub fn norm(&self) -> &AmbientNorm {
        &self.norm
    }

    pub fn constraint(&self) -> &Subspace {
        &self.constraint
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.constraint.ambient_dim()
    }

    /// Weighted mean of the points.
    fn weighted_centroid(&self) -> Vec<f64> {
        let d = self.dim();
        let mut acc = vec![0.0; d];
        let mut total = 0.0;
        for (w, p) in self.weights.iter().zip(&self.points) {
            linalg::axpy(&mut acc, *w, p);
            total += w;
        }
        for a in acc.iter_mut() {
            *a /= total;
        }
        acc
    }
}

/// One relative center together with its certificate.
#[derive(Clone, Debug)]
pub struct CenterSolution {
    pub minimizer: Vec<f64>,
    pub objective: f64,
    pub certificate_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Verdict of an optimality-certificate check.
#[derive(Clone, Copy, Debug)]
pub struct CertificateCheck {
    pub accepted: bool,
    pub residual: f64,
}

/// The center objective sum_i w_i |a_i - y|^m at an arbitrary point.
pub fn objective_eval(problem: &CenterProblem, y: &[f64]) -> Result<f64> {
    if y.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            context: "objective evaluation point",
            expected: problem.dim(),
            actual: y.len(),
        });
    }
    let mut acc = 0.0;
    for (w, p) in problem.weights.iter().zip(&problem.points) {
        let diff = linalg::sub(p, y);
        acc += w * pow_m(problem.norm.eval_raw(&diff), problem.m);
    }
    Ok(acc)
}

/// Oracle over the subspace coordinates, shared by the solver and the
/// certificate check.
struct CenterOracle<'a> {
    problem: &'a CenterProblem,
    kink_tols: Vec<f64>,
}

impl<'a> CenterOracle<'a> {
    fn new(problem: &'a CenterProblem) -> Self {
        let kink_tols = problem
            .points
            .iter()
            .map(|p| 1e-12 * (1.0 + linalg::norm2(p)))
            .collect();
        CenterOracle { problem, kink_tols }
    }

    fn ambient(&self, c: &[f64]) -> Vec<f64> {
        self.problem.constraint.from_coords(c)
    }

    /// Ambient subgradient of the objective at `y`, plus the kink radius
    /// from coinciding points when m = 1 (their term's subdifferential is
    /// the dual ball of radius w_i, folded into the certificate as a
    /// residual reduction).
    fn ambient_subgradient(&self, y: &[f64]) -> (Vec<f64>, f64) {
        let prob = self.problem;
        let d = prob.dim();
        let m = prob.m;
        let mut s = vec![0.0; d];
        let mut kink_radius = 0.0;
        for i in 0..prob.points.len() {
            let diff = linalg::sub(y, &prob.points[i]);
            let t = prob.norm.eval_raw(&diff);
            if t <= self.kink_tols[i] {
                if m == 1.0 {
                    kink_radius += prob.weights[i];
                }
                continue;
            }
            let coeff = if m == 1.0 {
                prob.weights[i]
            } else {
                prob.weights[i] * m * t.powf(m - 1.0)
            };
            if coeff == 0.0 {
                continue;
            }
            let g = prob.norm.subgradient_raw(&diff);
            linalg::axpy(&mut s, coeff, &g);
        }
        (s, kink_radius)
    }
}

impl ConvexProblem for CenterOracle<'_> {
    fn value(&self, c: &[f64]) -> f64 {
        let y = self.ambient(c);
        objective_eval(self.problem, &y).expect("validated problem")
    }

    fn subgradient(&self, c: &[f64]) -> Vec<f64> {
        let y = self.ambient(c);
        let (s, _) = self.ambient_subgradient(&y);
        self.problem.constraint.coords(&s)
    }

    fn residual(&self, c: &[f64]) -> f64 {
        let y = self.ambient(c);
        let (s, kink_radius) = self.ambient_subgradient(&y);
        let projected = self
            .problem
            .constraint
            .from_coords(&self.problem.constraint.coords(&s));
        let base = self.problem.norm.dual_eval_raw(&projected);
        (base - kink_radius).max(0.0)
    }
}

fn closed_form_quadratic(
    problem: &CenterProblem,
    diag: &[f64],
    cfg: &SolverConfig,
) -> Option<CenterSolution> {
    let q = problem.constraint.orthonormal_basis();
    let r = q.len();
    let centroid = problem.weighted_centroid();
    let mut matrix = vec![vec![0.0; r]; r];
    let mut rhs = vec![0.0; r];
    for a in 0..r {
        for b in 0..r {
            matrix[a][b] = (0..problem.dim()).map(|l| q[a][l] * diag[l] * q[b][l]).sum();
        }
        rhs[a] = (0..problem.dim())
            .map(|l| q[a][l] * diag[l] * centroid[l])
            .sum();
    }
    let coords = linalg::solve_dense(matrix, rhs)?;
    let minimizer = problem.constraint.from_coords(&coords);
    let objective = objective_eval(problem, &minimizer).ok()?;
    let oracle = CenterOracle::new(problem);
    let residual = oracle.residual(&coords);
    Some(CenterSolution {
        minimizer,
        objective,
        certificate_residual: residual,
        iterations: 0,
        converged: residual <= cfg.tolerance,
    })
}

fn multi_starts(problem: &CenterProblem) -> Vec<(Vec<f64>, f64)> {
    let sub = &problem.constraint;
    let point_coords: Vec<Vec<f64>> = problem.points.iter().map(|p| sub.coords(p)).collect();
    let mut starts: Vec<Vec<f64>> = Vec::with_capacity(problem.points.len() + 1);
    starts.push(sub.coords(&problem.weighted_centroid()));
    for c in &point_coords {
        let duplicate = starts
            .iter()
            .any(|s| linalg::dist2(s, c) <= 1e-13 * (1.0 + linalg::norm2(c)));
        if !duplicate {
            starts.push(c.clone());
        }
    }
    starts
        .into_iter()
        .map(|s| {
            let spread = point_coords
                .iter()
                .map(|c| linalg::dist2(&s, c))
                .fold(0.0, f64::max);
            let radius = spread.max(1e-9);
            (s, radius)
        })
        .collect()
}

/// Computes one relative m-center of the problem's point set in the
/// constraint subspace. Inner-product norms with m = 2 dispatch to the
/// projected-centroid closed form; everything else runs the multi-start
/// subgradient engine. Non-convergence is reported in the solution, never
/// silently.
pub fn solve_center(problem: &CenterProblem, cfg: &SolverConfig) -> CenterSolution {
    if !cfg.force_iterative && problem.m == 2.0 {
        if let Some(diag) = problem.norm.quadratic_diag(problem.dim()) {
            if let Some(solution) = closed_form_quadratic(problem, &diag, cfg) {
                return solution;
            }
        }
    }
    let oracle = CenterOracle::new(problem);
    let starts = multi_starts(problem);
    let outcome = solver::minimize(&oracle, &starts, cfg);
    let minimizer = problem.constraint.from_coords(&outcome.x);
    let objective = objective_eval(problem, &minimizer).expect("validated problem");
    CenterSolution {
        minimizer,
        objective,
        certificate_residual: outcome.residual,
        iterations: outcome.iterations,
        converged: outcome.converged,
    }
}

/// Checks whether `y0` is a relative m-center, via the certificate
/// residual: the dual norm of the objective subgradient projected onto the
/// subspace, reduced by the kink radii of coinciding points when m = 1.
/// `y0` must lie in the constraint subspace (tolerance 1e-8 relative).
pub fn is_relative_center(
    problem: &CenterProblem,
    y0: &[f64],
    tol: f64,
) -> Result<CertificateCheck> {
    if y0.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            context: "certificate point",
            expected: problem.dim(),
            actual: y0.len(),
        });
    }
    let distance = problem.constraint.distance_to(y0);
    if distance > 1e-8 * (1.0 + linalg::norm2(y0)) {
        return Err(Error::OutsideSubspace { distance });
    }
    let oracle = CenterOracle::new(problem);
    let coords = problem.constraint.coords(y0);
    let residual = oracle.residual(&coords);
    Ok(CertificateCheck {
        accepted: residual <= tol,
        residual,
    })
}

/// Nearest point of the subspace under the given norm: the n = 1, m = 1
/// relative-center problem. The metric projection is set-valued in general;
/// one representative is returned.
pub fn metric_projection(
    x: &[f64],
    constraint: &Subspace,
    norm: impl Into<AmbientNorm>,
    cfg: &SolverConfig,
) -> Result<CenterSolution> {
    let problem = CenterProblem::new(vec![x.to_vec()], 1.0, norm, constraint.clone())?;
    Ok(solve_center(&problem, cfg))
}

/// A point of the epsilon-optimal set with the smallest Euclidean distance
/// to the convex hull of the problem's points.
#[derive(Clone, Debug)]
pub struct HullRestrictedCenter {
    pub point: Vec<f64>,
    pub objective: f64,
    pub hull_gap: f64,
}

/// Searches the set { y in Y : objective(y) <= opt + slack } for a point
/// minimizing the distance to the convex hull of the points. Used where a
/// statement guarantees the optimal set meets the hull: the solver returns
/// one center, this looks for the hull-nearest one. Alternates Polyak
/// feasibility steps on the objective level set with decaying descent steps
/// on the hull distance.
pub fn hull_constrained_center(
    problem: &CenterProblem,
    cfg: &SolverConfig,
    slack: f64,
) -> HullRestrictedCenter {
    let base = solve_center(problem, cfg);
    hull_constrained_center_from(problem, cfg, slack, &base)
}

/// As [`hull_constrained_center`], reusing an already computed solution of
/// the unconstrained problem.
pub fn hull_constrained_center_from(
    problem: &CenterProblem,
    cfg: &SolverConfig,
    slack: f64,
    base: &CenterSolution,
) -> HullRestrictedCenter {
    let level = base.objective + slack;
    let oracle = CenterOracle::new(problem);
    let sub = &problem.constraint;

    let mut best_point = base.minimizer.clone();
    let mut best_gap = hull::hull_membership_gap(&problem.points, &base.minimizer)
        .unwrap_or(f64::INFINITY);

    if best_gap <= 1e-12 {
        return HullRestrictedCenter {
            point: best_point,
            objective: base.objective,
            hull_gap: best_gap,
        };
    }

    let starts = [
        sub.coords(&base.minimizer),
        sub.coords(&problem.weighted_centroid()),
    ];
    let spread = problem
        .points
        .iter()
        .map(|p| linalg::dist2(p, &base.minimizer))
        .fold(0.0, f64::max)
        .max(1e-9);
    let budget = (cfg.max_iterations / 16).clamp(400, 2500);

    for start in starts {
        let mut x = start;
        let mut step = spread;
        let decay = (1e-9f64).powf(1.0 / budget as f64);
        for _ in 0..budget {
            let y = sub.from_coords(&x);
            let f = oracle.value(&x);
            if f > level {
                // Polyak feasibility step back toward the level set
                let g = oracle.subgradient(&x);
                let gn2 = linalg::dot(&g, &g);
                if gn2 <= 1e-300 {
                    break;
                }
                linalg::axpy(&mut x, -(f - level) / gn2, &g);
            } else {
                let (closest, gap) =
                    match hull::hull_projection_capped(&problem.points, &y, 1500) {
                        Ok(pair) => pair,
                        Err(_) => break,
                    };
                if gap < best_gap {
                    best_gap = gap;
                    best_point = y.clone();
                    if best_gap <= 1e-12 {
                        return HullRestrictedCenter {
                            point: best_point.clone(),
                            objective: oracle.value(&sub.coords(&best_point)),
                            hull_gap: best_gap,
                        };
                    }
                }
                if gap <= 1e-14 {
                    break;
                }
                // descend the hull distance inside the level set
                let mut dir = linalg::sub(&y, &closest);
                for di in dir.iter_mut() {
                    *di /= gap;
                }
                let dir_coords = sub.coords(&dir);
                let dn = linalg::norm2(&dir_coords);
                if dn <= 1e-300 {
                    break;
                }
                linalg::axpy(&mut x, -step / dn, &dir_coords);
            }
            step *= decay;
        }
    }

    // settle the reported gap with the full-precision projection
    let hull_gap = hull::hull_membership_gap(&problem.points, &best_point).unwrap_or(best_gap);
    let objective = objective_eval(problem, &best_point).expect("validated problem");
    HullRestrictedCenter {
        point: best_point,
        objective,
        hull_gap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::NormSpec;
    use approx::assert_abs_diff_eq;

    fn euclid() -> NormSpec {
        NormSpec::euclidean()
    }

    #[test]
    fn objective_examples() {
        let sub = Subspace::full_space(2);
        let prob = CenterProblem::new(
            vec![vec![-1.0, 1.0], vec![2.0, 2.0]],
            2.0,
            euclid(),
            sub.clone(),
        )
        .unwrap();
        assert_abs_diff_eq!(
            objective_eval(&prob, &[0.5, 0.0]).unwrap(),
            9.5,
            epsilon = 1e-14
        );

        let single = CenterProblem::new(vec![vec![1.0, 2.0]], 3.0, euclid(), sub.clone()).unwrap();
        assert_eq!(objective_eval(&single, &[1.0, 2.0]).unwrap(), 0.0);

        let pair = CenterProblem::new(
            vec![vec![0.0, 0.0], vec![2.0, 0.0]],
            1.0,
            euclid(),
            sub,
        )
        .unwrap();
        assert_abs_diff_eq!(objective_eval(&pair, &[1.0, 0.0]).unwrap(), 2.0);
    }

    #[test]
    fn rejects_sub_one_exponent_and_empty_sets() {
        let sub = Subspace::full_space(2);
        assert!(CenterProblem::new(vec![vec![0.0, 0.0]], 0.5, euclid(), sub.clone()).is_err());
        assert!(CenterProblem::new(vec![], 2.0, euclid(), sub).is_err());
    }

    #[test]
    fn two_point_center_is_midpoint() {
        let sub = Subspace::full_space(3);
        let prob = CenterProblem::new(
            vec![vec![1.0, 2.0, 3.0], vec![3.0, 0.0, 1.0]],
            2.0,
            euclid(),
            sub,
        )
        .unwrap();
        let sol = solve_center(&prob, &SolverConfig::default());
        assert!(sol.converged);
        for (got, want) in sol.minimizer.iter().zip([2.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-10);
        }
    }

    #[test]
    fn constrained_quadratic_center_matches_projection_of_centroid() {
        // atom s1 of the packaged two-atom example
        let axis = Subspace::axis(2, 0).unwrap();
        let prob = CenterProblem::new(
            vec![vec![-1.0, 1.0], vec![2.0, 2.0]],
            2.0,
            euclid(),
            axis,
        )
        .unwrap();
        let sol = solve_center(&prob, &SolverConfig::default());
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.minimizer[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.minimizer[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, 9.5, epsilon = 1e-12);
    }

    // independent oracle: multilevel grid search over a square
    fn grid_min_2d(
        f: &dyn Fn(&[f64]) -> f64,
        mut lo: [f64; 2],
        mut hi: [f64; 2],
        steps: usize,
        refinements: usize,
    ) -> ([f64; 2], f64) {
        let mut best = ([0.0, 0.0], f64::INFINITY);
        for _ in 0..refinements {
            for i in 0..=steps {
                for j in 0..=steps {
                    let x = lo[0] + (hi[0] - lo[0]) * i as f64 / steps as f64;
                    let y = lo[1] + (hi[1] - lo[1]) * j as f64 / steps as f64;
                    let v = f(&[x, y]);
                    if v < best.1 {
                        best = ([x, y], v);
                    }
                }
            }
            let span = [(hi[0] - lo[0]) / steps as f64, (hi[1] - lo[1]) / steps as f64];
            lo = [best.0[0] - 2.0 * span[0], best.0[1] - 2.0 * span[1]];
            hi = [best.0[0] + 2.0 * span[0], best.0[1] + 2.0 * span[1]];
        }
        best
    }

    #[test]
    fn fermat_point_of_right_triangle() {
        let sub = Subspace::full_space(2);
        let prob = CenterProblem::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            1.0,
            euclid(),
            sub,
        )
        .unwrap();
        let sol = solve_center(&prob, &SolverConfig::default());
        // frozen from the grid oracle below; equals (3 - sqrt(3)) / 6 in
        // both coordinates
        let expected = 0.211_324_865_405_187;
        let obj = |y: &[f64]| objective_eval(&prob, y).unwrap();
        let (grid_point, _) = grid_min_2d(&obj, [-0.5, -0.5], [1.5, 1.5], 200, 4);
        assert_abs_diff_eq!(grid_point[0], expected, epsilon = 1e-6);
        assert_abs_diff_eq!(grid_point[1], expected, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.minimizer[0], expected, epsilon = 1e-6);
        assert_abs_diff_eq!(sol.minimizer[1], expected, epsilon = 1e-6);
    }

    #[test]
    fn metric_projection_examples() {
        let axis = Subspace::axis(2, 0).unwrap();
        let cfg = SolverConfig::default();
        let sol = metric_projection(&[1.0, 1.0], &axis, euclid(), &cfg).unwrap();
        assert_abs_diff_eq!(sol.minimizer[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(sol.minimizer[1], 0.0, epsilon = 1e-12);

        // point already in the subspace projects to itself
        let sol = metric_projection(&[3.5, 0.0], &axis, euclid(), &cfg).unwrap();
        assert_abs_diff_eq!(sol.minimizer[0], 3.5, epsilon = 1e-9);
        assert!(sol.objective <= 1e-12);

        // l1 distance from (1,1) to the axis: scan oracle over t
        let l1 = NormSpec::l1();
        let scan = (0..=4000)
            .map(|i| -1.0 + 4.0 * i as f64 / 4000.0)
            .map(|t| ((1.0f64 - t).abs() + 1.0, t))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        assert_abs_diff_eq!(scan.0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(scan.1, 1.0, epsilon = 1e-12);
        let sol = metric_projection(&[1.0, 1.0], &axis, l1, &cfg).unwrap();
        assert_abs_diff_eq!(sol.objective, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.minimizer[0], 1.0, epsilon = 1e-6);
    }

    #[test]
    fn certificate_accepts_known_center_and_rejects_off_center() {
        let axis = Subspace::axis(2, 0).unwrap();
        let prob = CenterProblem::new(
            vec![vec![-1.0, 1.0], vec![2.0, 2.0]],
            2.0,
            euclid(),
            axis,
        )
        .unwrap();
        let check = is_relative_center(&prob, &[0.5, 0.0], 1e-9).unwrap();
        assert!(check.accepted, "residual {}", check.residual);

        let full = Subspace::full_space(2);
        let single = CenterProblem::new(vec![vec![1.0, -2.0]], 2.0, euclid(), full.clone()).unwrap();
        let check = is_relative_center(&single, &[1.0, -2.0], 1e-9).unwrap();
        assert!(check.accepted);
        assert_eq!(check.residual, 0.0);

        let pair = CenterProblem::new(
            vec![vec![0.0, 0.0], vec![2.0, 0.0]],
            2.0,
            euclid(),
            full,
        )
        .unwrap();
        let check = is_relative_center(&pair, &[5.0, 0.0], 1e-9).unwrap();
        assert!(!check.accepted);
        assert_abs_diff_eq!(check.residual, 16.0, epsilon = 1e-10);
    }

    #[test]
    fn certificate_rejects_point_outside_subspace() {
        let axis = Subspace::axis(2, 0).unwrap();
        let prob =
            CenterProblem::new(vec![vec![1.0, 1.0]], 2.0, euclid(), axis).unwrap();
        let err = is_relative_center(&prob, &[0.5, 0.5], 1e-9).unwrap_err();
        assert!(matches!(err, Error::OutsideSubspace { .. }));
    }

    #[test]
    fn median_certifies_at_middle_point() {
        // collinear m = 1: the middle point is a median; the kink reduction
        // must certify it instead of reporting a spurious residual
        let full = Subspace::full_space(2);
        let prob = CenterProblem::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![4.0, 0.0]],
            1.0,
            euclid(),
            full,
        )
        .unwrap();
        let check = is_relative_center(&prob, &[1.0, 0.0], 1e-9).unwrap();
        assert!(check.accepted, "residual {}", check.residual);
        let sol = solve_center(&prob, &SolverConfig::default());
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.objective, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn forced_iterative_matches_closed_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..25 {
            let d = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=4);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect())
                .collect();
            let r = rng.gen_range(1..=d);
            let basis: Vec<Vec<f64>> = (0..r)
                .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let sub = match Subspace::new(d, basis) {
                Ok(s) => s,
                Err(_) => continue,
            };
            let prob = CenterProblem::new(points, 2.0, euclid(), sub).unwrap();
            let closed = solve_center(&prob, &SolverConfig::default());
            let mut cfg = SolverConfig::default();
            cfg.force_iterative = true;
            let iterative = solve_center(&prob, &cfg);
            assert!(
                linalg::dist2(&closed.minimizer, &iterative.minimizer) <= 1e-7,
                "closed {:?} vs iterative {:?}",
                closed.minimizer,
                iterative.minimizer
            );
        }
    }

    #[test]
    fn translation_and_scaling_equivariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let sub = Subspace::new(3, vec![vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        for m in [1.0, 1.5, 2.0, 3.0] {
            let points: Vec<Vec<f64>> = (0..3)
                .map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let prob =
                CenterProblem::new(points.clone(), m, euclid(), sub.clone()).unwrap();
            let cfg = SolverConfig::default();
            let sol = solve_center(&prob, &cfg);

            // translate along the subspace
            let shift = sub.from_coords(&[0.7, -0.3]);
            let shifted: Vec<Vec<f64>> = points
                .iter()
                .map(|p| p.iter().zip(&shift).map(|(a, b)| a + b).collect())
                .collect();
            let prob_t = CenterProblem::new(shifted, m, euclid(), sub.clone()).unwrap();
            let sol_t = solve_center(&prob_t, &cfg);
            let expected: Vec<f64> = sol.minimizer.iter().zip(&shift).map(|(a, b)| a + b).collect();
            assert!(
                linalg::dist2(&sol_t.minimizer, &expected) <= 1e-7,
                "translation equivariance failed for m={m}"
            );

            // positive scaling
            let lambda = 1.7;
            let scaled: Vec<Vec<f64>> = points
                .iter()
                .map(|p| p.iter().map(|a| a * lambda).collect())
                .collect();
            let prob_s = CenterProblem::new(scaled, m, euclid(), sub.clone()).unwrap();
            let sol_s = solve_center(&prob_s, &cfg);
            let expected: Vec<f64> = sol.minimizer.iter().map(|a| a * lambda).collect();
            assert!(
                linalg::dist2(&sol_s.minimizer, &expected) <= 1e-6,
                "scaling equivariance failed for m={m}"
            );
        }
    }

    #[test]
    fn diagonal_reformulation_is_bit_exact() {
        use crate::norms::TupleNorm;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for m in [1.0, 1.5, 2.0, 3.0] {
            let points: Vec<Vec<f64>> = (0..4)
                .map(|_| (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let sub = Subspace::full_space(3);
            let prob = CenterProblem::new(points.clone(), m, euclid(), sub).unwrap();
            let tuple = TupleNorm::new(euclid(), 4, m).unwrap();
            for _ in 0..20 {
                let y: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let diffs: Vec<Vec<f64>> =
                    points.iter().map(|p| linalg::sub(p, &y)).collect();
                let lhs = objective_eval(&prob, &y).unwrap();
                let rhs = tuple.power_sum(&diffs).unwrap();
                assert_eq!(lhs.to_bits(), rhs.to_bits());
            }
        }
    }

    #[test]
    fn solver_is_deterministic() {
        let sub = Subspace::full_space(2);
        let prob = CenterProblem::new(
            vec![vec![0.3, 1.2], vec![-0.7, 0.4], vec![2.0, -1.0]],
            1.5,
            NormSpec::linf(),
            sub,
        )
        .unwrap();
        let cfg = SolverConfig::default();
        let a = solve_center(&prob, &cfg);
        let b = solve_center(&prob, &cfg);
        assert_eq!(a.minimizer, b.minimizer);
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn non_convergence_is_flagged_not_hidden() {
        let sub = Subspace::full_space(2);
        let prob = CenterProblem::new(
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            1.0,
            euclid(),
            sub,
        )
        .unwrap();
        let cfg = SolverConfig::default().with_max_iterations(1);
        let sol = solve_center(&prob, &cfg);
        assert!(!sol.converged);
        assert!(sol.certificate_residual > cfg.tolerance);
    }

    #[test]
    fn certificate_acceptance_implies_near_optimality() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let norms: Vec<NormSpec> = vec![NormSpec::l1(), euclid(), NormSpec::linf()];
        let mut accepted_count = 0;
        for trial in 0..40 {
            let norm = norms[trial % norms.len()].clone();
            let m = [1.0, 1.5, 2.0, 3.0][trial % 4];
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=4);
            let points: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let sub = Subspace::full_space(d);
            let prob = CenterProblem::new(points, m, norm, sub.clone()).unwrap();
            let sol = solve_center(&prob, &SolverConfig::default());
            let check = is_relative_center(&prob, &sol.minimizer, 1e-9).unwrap();
            if !check.accepted {
                continue;
            }
            accepted_count += 1;
            for _ in 0..1000 {
                let y: Vec<f64> = sol
                    .minimizer
                    .iter()
                    .map(|c| c + rng.gen_range(-10.0..10.0))
                    .collect();
                let y = sub.project(&y);
                let other = objective_eval(&prob, &y).unwrap();
                assert!(
                    sol.objective <= other + 1e-5,
                    "accepted center beaten by {:.3e}",
                    sol.objective - other
                );
            }
        }
        assert!(accepted_count >= 20, "only {accepted_count} certified solves");
    }

    #[test]
    fn two_point_centers_stay_in_the_segment() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let norms: Vec<NormSpec> = vec![NormSpec::l1(), euclid(), NormSpec::linf()];
        for norm in &norms {
            for m in [1.0, 1.5, 2.0, 3.0] {
                for _ in 0..10 {
                    let d = rng.gen_range(1..=4);
                    let a: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
                    let b: Vec<f64> = (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect();
                    let sub = Subspace::full_space(d);
                    let prob = CenterProblem::new(
                        vec![a.clone(), b.clone()],
                        m,
                        norm.clone(),
                        sub,
                    )
                    .unwrap();
                    let sol = solve_center(&prob, &SolverConfig::default());
                    let gap =
                        hull::hull_membership_gap(&[a, b], &sol.minimizer).unwrap();
                    assert!(gap <= 1e-6, "two-point center left the segment: gap {gap}");
                }
            }
        }
    }
}
