//! Finite atomic models of the Bochner spaces L_p(mu, X): a measure space
//! is a list of positive atom weights, a function is one value per atom,
//! and the p-norm is a weighted sum of fiber norms. Hosts the pointwise
//! lift (solve the center problem atom by atom) and the direct global
//! solver over all atoms jointly, which is used to confirm or refute
//! optimality of lifts rather than assuming the decoupling.

use crate::center::{solve_center, CenterProblem, CenterSolution, SolverConfig};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::linalg;
use crate::norms::{pow_m, Exponent, LpProductNorm, NormSpec};
use crate::solver::{self, ConvexProblem};
use crate::subspace::Subspace;

/// A finite atomic measure space: atom j carries weight mu_j > 0. The total
/// mass is arbitrary, not normalized to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpace {
    weights: Vec<f64>,
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("measure space atoms"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::InvalidParameter(
                "atom weights must be strictly positive and finite".into(),
            ));
        }
        Ok(MeasureSpace { weights })
    }

    /// k unit atoms (counting measure).
    pub fn uniform(atoms: usize) -> Result<Self> {
        MeasureSpace::new(vec![1.0; atoms])
    }

    pub fn atoms(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// An element of L_p(mu, R^d) on a finite atomic space: row j is the value
/// at atom j.
#[derive(Clone, Debug, PartialEq)]
pub struct BochnerFunction {
    values: Vec<Vec<f64>>,
}

impl BochnerFunction {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("function values"));
        }
        let d = values[0].len();
        if d == 0 {
            return Err(Error::EmptyInput("function value dimension"));
        }
        for row in &values {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    context: "function value row",
                    expected: d,
                    actual: row.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("function value"));
            }
        }
        Ok(BochnerFunction { values })
    }

    pub fn zeros(atoms: usize, dim: usize) -> Self {
        BochnerFunction {
            values: vec![vec![0.0; dim]; atoms],
        }
    }

    pub fn constant(atoms: usize, value: &[f64]) -> Self {
        BochnerFunction {
            values: vec![value.to_vec(); atoms],
        }
    }

    pub fn atoms(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn sub(&self, other: &BochnerFunction) -> Result<BochnerFunction> {
        if self.atoms() != other.atoms() || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                context: "function subtraction",
                expected: self.atoms() * self.dim(),
                actual: other.atoms() * other.dim(),
            });
        }
        Ok(BochnerFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| linalg::sub(a, b))
                .collect(),
        })
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.values.iter().flatten().copied().collect()
    }

    pub fn from_flat(atoms: usize, dim: usize, flat: &[f64]) -> Result<BochnerFunction> {
        if flat.len() != atoms * dim {
            return Err(Error::DimensionMismatch {
                context: "flattened function values",
                expected: atoms * dim,
                actual: flat.len(),
            });
        }
        Ok(BochnerFunction {
            values: flat.chunks(dim).map(|c| c.to_vec()).collect(),
        })
    }
}

/// `sum_j mu_j |f(s_j)|^p`, the p-th power of the L_p norm, kept separate
/// to avoid the power round trip where the power itself is wanted.
pub fn lp_power_sum(
    f: &BochnerFunction,
    space: &MeasureSpace,
    p: f64,
    norm: &NormSpec,
) -> Result<f64> {
    if f.atoms() != space.atoms() {
        return Err(Error::DimensionMismatch {
            context: "function atoms",
            expected: space.atoms(),
            actual: f.atoms(),
        });
    }
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "integrability exponent must be a finite real >= 1, got {p}"
        )));
    }
    let mut acc = 0.0;
    for (w, row) in space.weights().iter().zip(f.rows()) {
        acc += w * pow_m(norm.eval_raw(row), p);
    }
    Ok(acc)
}

/// The L_p(mu, X) norm of `f`.
pub fn lp_norm(f: &BochnerFunction, space: &MeasureSpace, p: f64, norm: &NormSpec) -> Result<f64> {
    let sum = lp_power_sum(f, space, p, norm)?;
    Ok(if p == 1.0 { sum } else { sum.powf(1.0 / p) })
}

/// The simultaneous-approximation problem in L_p(mu, X): n functions, a
/// constraint subspace applied atomwise, the fiber norm, the integrability
/// exponent p and the center exponent m.
#[derive(Clone, Debug)]
pub struct LiftProblem {
    functions: Vec<BochnerFunction>,
    space: MeasureSpace,
    subspace: Subspace,
    norm: NormSpec,
    p: f64,
    m: f64,
}

impl LiftProblem {
    pub fn new(
        functions: Vec<BochnerFunction>,
        space: MeasureSpace,
        subspace: Subspace,
        norm: NormSpec,
        p: f64,
        m: f64,
    ) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::EmptyInput("lift problem functions"));
        }
        for check in [(p, "integrability exponent"), (m, "center exponent")] {
            if !(check.0.is_finite() && check.0 >= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "{} must be a finite real >= 1, got {}",
                    check.1, check.0
                )));
            }
        }
        let d = subspace.ambient_dim();
        for f in &functions {
            if f.atoms() != space.atoms() {
                return Err(Error::DimensionMismatch {
                    context: "lift problem function atoms",
                    expected: space.atoms(),
                    actual: f.atoms(),
                });
            }
            if f.dim() != d {
                return Err(Error::DimensionMismatch {
                    context: "lift problem function dimension",
                    expected: d,
                    actual: f.dim(),
                });
            }
        }
        if let Some(w) = norm.weights() {
            if w.len() != d {
                return Err(Error::DimensionMismatch {
                    context: "lift problem fiber norm",
                    expected: d,
                    actual: w.len(),
                });
            }
        }
        Ok(LiftProblem {
            functions,
            space,
            subspace,
            norm,
            p,
            m,
        })
    }

    pub fn functions(&self) -> &[BochnerFunction] {
        &self.functions
    }

    pub fn num_functions(&self) -> usize {
        self.functions.len()
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn atoms(&self) -> usize {
        self.space.atoms()
    }

    pub fn dim(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// The relative m-center problem at one atom (unit point weights).
    pub fn atom_problem(&self, atom: usize) -> CenterProblem {
        let points: Vec<Vec<f64>> = self
            .functions
            .iter()
            .map(|f| f.row(atom).to_vec())
            .collect();
        CenterProblem::new(points, self.m, self.norm.clone(), self.subspace.clone())
            .expect("atom problem inherits validated shapes")
    }
}

/// A pointwise lift together with the per-atom certificates.
#[derive(Clone, Debug)]
pub struct LiftOutcome {
    pub function: BochnerFunction,
    pub per_atom: Vec<CenterSolution>,
    pub worst_residual: f64,
    pub converged: bool,
    pub non_convergent_atoms: Vec<usize>,
}

/// Solves the relative m-center problem separately at every atom and
/// assembles the results into one function. On a finite atomic space this
/// is exactly the measurable pointwise selection; measurability is
/// automatic.
pub fn lift_pointwise(problem: &LiftProblem, cfg: &SolverConfig) -> LiftOutcome {
    lift_pointwise_exec(problem, cfg, Exec::Auto)
}

/// As [`lift_pointwise`], with explicit control over batch execution.
pub fn lift_pointwise_exec(problem: &LiftProblem, cfg: &SolverConfig, exec: Exec) -> LiftOutcome {
    let per_atom: Vec<CenterSolution> = exec::map_indexed(exec, problem.atoms(), |j| {
        solve_center(&problem.atom_problem(j), cfg)
    });
    let function = BochnerFunction {
        values: per_atom.iter().map(|s| s.minimizer.clone()).collect(),
    };
    let worst_residual = per_atom
        .iter()
        .map(|s| s.certificate_residual)
        .fold(0.0, f64::max);
    let non_convergent_atoms: Vec<usize> = per_atom
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.converged)
        .map(|(j, _)| j)
        .collect();
    LiftOutcome {
        function,
        worst_residual,
        converged: non_convergent_atoms.is_empty(),
        non_convergent_atoms,
        per_atom,
    }
}

/// The relative m-center objective in L_p(mu, X):
/// `sum_i lp_norm(f_i - g)^m`.
pub fn global_objective(problem: &LiftProblem, g: &BochnerFunction) -> Result<f64> {
    if g.atoms() != problem.atoms() || g.dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            context: "candidate function",
            expected: problem.atoms() * problem.dim(),
            actual: g.atoms() * g.dim(),
        });
    }
    let mut acc = 0.0;
    for f in &problem.functions {
        let diff = f.sub(g)?;
        acc += pow_m(
            lp_norm(&diff, &problem.space, problem.p, &problem.norm)?,
            problem.m,
        );
    }
    Ok(acc)
}

/// A direct global solution with its certificate.
#[derive(Clone, Debug)]
pub struct GlobalSolution {
    pub function: BochnerFunction,
    pub objective: f64,
    pub certificate_residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

struct GlobalOracle<'a> {
    problem: &'a LiftProblem,
    composite: LpProductNorm,
    kink_tols: Vec<f64>,
}

impl<'a> GlobalOracle<'a> {
    fn new(problem: &'a LiftProblem) -> Self {
        let composite = LpProductNorm::new(
            Exponent::Finite(problem.p),
            problem.space.weights().to_vec(),
            problem.dim(),
            problem.norm.clone(),
        )
        .expect("validated problem");
        let kink_tols = problem
            .functions
            .iter()
            .map(|f| {
                let scale = lp_norm(f, &problem.space, problem.p, &problem.norm)
                    .expect("validated problem");
                1e-12 * (1.0 + scale)
            })
            .collect();
        GlobalOracle {
            problem,
            composite,
            kink_tols,
        }
    }

    fn assemble(&self, c: &[f64]) -> BochnerFunction {
        let r = self.problem.subspace.rank();
        BochnerFunction {
            values: c
                .chunks(r)
                .map(|cj| self.problem.subspace.from_coords(cj))
                .collect(),
        }
    }

    /// Ambient subgradient rows of the global objective at `g`, plus the
    /// kink radius of coinciding functions when m = 1.
    fn ambient_subgradient(&self, g: &BochnerFunction) -> (Vec<Vec<f64>>, f64) {
        let prob = self.problem;
        let (k, d) = (prob.atoms(), prob.dim());
        let (p, m) = (prob.p, prob.m);
        let mut rows = vec![vec![0.0; d]; k];
        let mut kink_radius = 0.0;
        for (i, f) in prob.functions.iter().enumerate() {
            let t = {
                let diff = f.sub(g).expect("validated shapes");
                lp_norm(&diff, &prob.space, p, &prob.norm).expect("validated shapes")
            };
            if t <= self.kink_tols[i] {
                if m == 1.0 {
                    kink_radius += 1.0;
                }
                continue;
            }
            let outer = if m == 1.0 { 1.0 } else { m * t.powf(m - 1.0) };
            for j in 0..k {
                let diff = linalg::sub(g.row(j), f.row(j));
                let row_norm = prob.norm.eval_raw(&diff);
                let inner = if p == 1.0 {
                    prob.space.weights()[j]
                } else {
                    if row_norm == 0.0 {
                        continue;
                    }
                    prob.space.weights()[j] * (row_norm / t).powf(p - 1.0)
                };
                let fiber_g = prob.norm.subgradient_raw(&diff);
                linalg::axpy(&mut rows[j], outer * inner, &fiber_g);
            }
        }
        (rows, kink_radius)
    }
}

impl ConvexProblem for GlobalOracle<'_> {
    fn value(&self, c: &[f64]) -> f64 {
        let g = self.assemble(c);
        global_objective(self.problem, &g).expect("validated shapes")
    }

    fn subgradient(&self, c: &[f64]) -> Vec<f64> {
        let g = self.assemble(c);
        let (rows, _) = self.ambient_subgradient(&g);
        let mut out = Vec::with_capacity(c.len());
        for row in rows {
            out.extend(self.problem.subspace.coords(&row));
        }
        out
    }

    fn residual(&self, c: &[f64]) -> f64 {
        let g = self.assemble(c);
        let (rows, kink_radius) = self.ambient_subgradient(&g);
        let mut projected = Vec::with_capacity(self.composite.dim());
        for row in rows {
            projected.extend(self.problem.subspace.project(&row));
        }
        let base = self.composite.dual_eval_raw(&projected);
        (base - kink_radius).max(0.0)
    }
}

/// Minimizes the global objective over functions with every row in the
/// subspace, treating the rows jointly; no atomwise decoupling is assumed,
/// which is what makes the comparison with [`lift_pointwise`] meaningful.
/// Multi-starts from the pointwise lift and from zero.
pub fn solve_global(problem: &LiftProblem, cfg: &SolverConfig) -> GlobalSolution {
    let lift = lift_pointwise(problem, cfg);
    solve_global_from(problem, cfg, &lift.function)
}

/// As [`solve_global`], reusing an already computed pointwise lift as the
/// warm start.
pub fn solve_global_from(
    problem: &LiftProblem,
    cfg: &SolverConfig,
    lift: &BochnerFunction,
) -> GlobalSolution {
    let oracle = GlobalOracle::new(problem);
    let r = problem.subspace.rank();
    let k = problem.atoms();

    let mut lift_start = Vec::with_capacity(k * r);
    for j in 0..k {
        lift_start.extend(problem.subspace.coords(lift.row(j)));
    }
    let zero_start = vec![0.0; k * r];

    let data_coords: Vec<Vec<f64>> = problem
        .functions
        .iter()
        .map(|f| {
            let mut flat = Vec::with_capacity(k * r);
            for j in 0..k {
                flat.extend(problem.subspace.coords(f.row(j)));
            }
            flat
        })
        .collect();
    let radius_for = |start: &[f64]| -> f64 {
        data_coords
            .iter()
            .map(|c| linalg::dist2(start, c))
            .fold(0.0, f64::max)
            .max(1e-9)
    };

    let starts = vec![
        (lift_start.clone(), radius_for(&lift_start)),
        (zero_start.clone(), radius_for(&zero_start)),
    ];
    let outcome = solver::minimize(&oracle, &starts, cfg);
    let function = oracle.assemble(&outcome.x);
    let objective = global_objective(problem, &function).expect("validated shapes");
    GlobalSolution {
        function,
        objective,
        certificate_residual: outcome.residual,
        iterations: outcome.iterations,
        converged: outcome.converged,
    }
}

/// Result of the p-power growth bound check
/// `|g|_p^p <= 2^(p-1) sum_i |f_i|_p^p + 2^(p-1) |f_i0|_p^p` over all i0.
#[derive(Clone, Copy, Debug)]
pub struct GrowthBound {
    pub holds: bool,
    pub tightest_margin: f64,
}

/// Checks the growth bound satisfied by any pointwise relative p-center
/// lift, for every choice of the distinguished index.
pub fn check_growth_bound(problem: &LiftProblem, g: &BochnerFunction) -> Result<GrowthBound> {
    let lhs = lp_power_sum(g, &problem.space, problem.p, &problem.norm)?;
    let per_function: Vec<f64> = problem
        .functions
        .iter()
        .map(|f| lp_power_sum(f, &problem.space, problem.p, &problem.norm))
        .collect::<Result<_>>()?;
    let total: f64 = per_function.iter().sum();
    let factor = 2.0f64.powf(problem.p - 1.0);
    let tightest_margin = per_function
        .iter()
        .map(|fi| factor * (total + fi) - lhs)
        .fold(f64::INFINITY, f64::min);
    let scale = 1.0 + lhs.abs() + factor * total.abs();
    Ok(GrowthBound {
        holds: tightest_margin >= -1e-9 * scale,
        tightest_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn example_data() -> (LiftProblem, BochnerFunction) {
        let space = MeasureSpace::uniform(2).unwrap();
        let f1 = BochnerFunction::new(vec![vec![-1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let f2 = BochnerFunction::new(vec![vec![2.0, 2.0], vec![-1.0, 1.0]]).unwrap();
        let axis = Subspace::axis(2, 0).unwrap();
        let problem = LiftProblem::new(
            vec![f1, f2],
            space,
            axis,
            NormSpec::euclidean(),
            1.0,
            2.0,
        )
        .unwrap();
        let g = BochnerFunction::constant(2, &[0.5, 0.0]);
        (problem, g)
    }

    #[test]
    fn measure_space_rejects_non_positive_weights() {
        assert!(MeasureSpace::new(vec![1.0, 0.0]).is_err());
        assert!(MeasureSpace::new(vec![1.0, -2.0]).is_err());
        assert!(MeasureSpace::new(vec![]).is_err());
    }

    #[test]
    fn lp_norm_frozen_values() {
        let (problem, g) = example_data();
        let diff = problem.functions()[0].sub(&g).unwrap();
        let value = lp_norm(&diff, problem.space(), 1.0, problem.norm()).unwrap();
        assert_abs_diff_eq!(value, 13.0f64.sqrt() / 2.0 + 2.5, epsilon = 1e-12);

        let zero = BochnerFunction::zeros(2, 2);
        assert_eq!(
            lp_norm(&zero, problem.space(), 1.7, problem.norm()).unwrap(),
            0.0
        );

        let single_space = MeasureSpace::uniform(1).unwrap();
        let f = BochnerFunction::new(vec![vec![3.0, 4.0]]).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            assert_abs_diff_eq!(
                lp_norm(&f, &single_space, p, &NormSpec::euclidean()).unwrap(),
                5.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn global_objective_frozen_values() {
        let (problem, g) = example_data();
        assert_abs_diff_eq!(
            global_objective(&problem, &g).unwrap(),
            19.0 + 5.0 * 13.0f64.sqrt(),
            epsilon = 1e-12
        );
        let h = BochnerFunction::zeros(2, 2);
        assert_abs_diff_eq!(global_objective(&problem, &h).unwrap(), 36.0, epsilon = 1e-12);
    }

    #[test]
    fn lift_reproduces_atomwise_centers() {
        let (problem, _) = example_data();
        let lift = lift_pointwise(&problem, &SolverConfig::default());
        assert!(lift.converged);
        for j in 0..2 {
            assert_abs_diff_eq!(lift.function.row(j)[0], 0.5, epsilon = 1e-10);
            assert_abs_diff_eq!(lift.function.row(j)[1], 0.0, epsilon = 1e-12);
        }
        assert!(lift.worst_residual <= 1e-9);
    }

    #[test]
    fn lift_single_function_is_atomwise_projection() {
        let space = MeasureSpace::new(vec![1.0, 2.0, 0.5]).unwrap();
        let f = BochnerFunction::new(vec![
            vec![1.0, 1.0],
            vec![-2.0, 3.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        let axis = Subspace::axis(2, 0).unwrap();
        let problem = LiftProblem::new(
            vec![f.clone()],
            space,
            axis,
            NormSpec::euclidean(),
            2.0,
            2.0,
        )
        .unwrap();
        let lift = lift_pointwise(&problem, &SolverConfig::default());
        for j in 0..3 {
            assert_abs_diff_eq!(lift.function.row(j)[0], f.row(j)[0], epsilon = 1e-9);
            assert_abs_diff_eq!(lift.function.row(j)[1], 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lift_of_functions_already_in_subspace_is_identity_for_n1() {
        let space = MeasureSpace::uniform(2).unwrap();
        let f = BochnerFunction::new(vec![vec![3.0, 0.0], vec![-7.0, 0.0]]).unwrap();
        let axis = Subspace::axis(2, 0).unwrap();
        let problem =
            LiftProblem::new(vec![f.clone()], space, axis, NormSpec::euclidean(), 1.5, 1.5)
                .unwrap();
        let lift = lift_pointwise(&problem, &SolverConfig::default());
        for j in 0..2 {
            assert!(linalg::dist2(lift.function.row(j), f.row(j)) <= 1e-9);
        }
        assert!(global_objective(&problem, &lift.function).unwrap() <= 1e-12);
    }

    #[test]
    fn fubini_decoupling_for_matching_exponents() {
        use crate::center::objective_eval;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let k = rng.gen_range(1..=4);
            let d = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=4);
            let space = MeasureSpace::new(
                (0..k).map(|_| rng.gen_range(0.2..2.0)).collect(),
            )
            .unwrap();
            let functions: Vec<BochnerFunction> = (0..n)
                .map(|_| {
                    BochnerFunction::new(
                        (0..k)
                            .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            let sub = Subspace::full_space(d);
            let problem = LiftProblem::new(
                functions,
                space.clone(),
                sub,
                NormSpec::euclidean(),
                p,
                p,
            )
            .unwrap();
            let g = BochnerFunction::new(
                (0..k)
                    .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
                    .collect(),
            )
            .unwrap();
            let joint = global_objective(&problem, &g).unwrap();
            let mut decoupled = 0.0;
            for j in 0..k {
                let atom = problem.atom_problem(j);
                decoupled += space.weights()[j] * objective_eval(&atom, g.row(j)).unwrap();
            }
            assert!(
                (joint - decoupled).abs() <= 1e-12 * (1.0 + joint.abs()),
                "decoupling mismatch: joint {joint}, decoupled {decoupled}"
            );
        }
    }

    #[test]
    fn global_solver_beats_lift_on_the_packaged_example() {
        let (problem, g) = example_data();
        let lift_obj = global_objective(&problem, &g).unwrap();
        let global = solve_global(&problem, &SolverConfig::default());
        assert!(global.objective <= 36.0 + 1e-6, "objective {}", global.objective);
        assert!(lift_obj - global.objective >= 5.0 * 13.0f64.sqrt() - 17.0 - 1e-6);
    }

    #[test]
    fn global_solver_matches_lift_when_exponents_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for p in [1.0, 2.0, 3.0] {
            let space = MeasureSpace::new(vec![1.0, 0.5]).unwrap();
            let functions: Vec<BochnerFunction> = (0..3)
                .map(|_| {
                    BochnerFunction::new(
                        (0..2)
                            .map(|_| (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect())
                            .collect(),
                    )
                    .unwrap()
                })
                .collect();
            let axis = Subspace::axis(2, 0).unwrap();
            let problem =
                LiftProblem::new(functions, space, axis, NormSpec::euclidean(), p, p).unwrap();
            let cfg = SolverConfig::default();
            let lift = lift_pointwise(&problem, &cfg);
            let lift_obj = global_objective(&problem, &lift.function).unwrap();
            let global = solve_global_from(&problem, &cfg, &lift.function);
            assert!(
                (lift_obj - global.objective).abs() <= 1e-6 * (1.0 + lift_obj.abs()),
                "p={p}: lift {lift_obj} vs global {}",
                global.objective
            );
        }
    }

    #[test]
    fn degenerate_global_solve_is_metric_projection() {
        let space = MeasureSpace::uniform(1).unwrap();
        let f = BochnerFunction::new(vec![vec![1.0, 1.0]]).unwrap();
        let axis = Subspace::axis(2, 0).unwrap();
        let problem =
            LiftProblem::new(vec![f], space, axis, NormSpec::euclidean(), 2.0, 2.0).unwrap();
        let global = solve_global(&problem, &SolverConfig::default());
        assert_abs_diff_eq!(global.function.row(0)[0], 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(global.objective, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn growth_bound_trivial_cases() {
        let space = MeasureSpace::uniform(2).unwrap();
        let zero = BochnerFunction::zeros(2, 2);
        let axis = Subspace::axis(2, 0).unwrap();
        let problem = LiftProblem::new(
            vec![zero.clone(), zero.clone()],
            space.clone(),
            axis.clone(),
            NormSpec::euclidean(),
            2.0,
            2.0,
        )
        .unwrap();
        let bound = check_growth_bound(&problem, &zero).unwrap();
        assert!(bound.holds);
        assert_abs_diff_eq!(bound.tightest_margin, 0.0, epsilon = 1e-15);

        let f = BochnerFunction::new(vec![vec![2.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let problem =
            LiftProblem::new(vec![f.clone()], space, axis, NormSpec::euclidean(), 1.0, 1.0)
                .unwrap();
        let bound = check_growth_bound(&problem, &f).unwrap();
        assert!(bound.holds);
        // |g|_1 = 3 against 2 * |f|_1 = 6
        assert_abs_diff_eq!(bound.tightest_margin, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn splitting_an_atom_preserves_norms_and_objectives() {
        let space = MeasureSpace::new(vec![1.0, 2.0]).unwrap();
        let split = MeasureSpace::new(vec![1.0, 1.0, 1.0]).unwrap();
        let f = BochnerFunction::new(vec![vec![1.0, -1.0], vec![0.5, 2.0]]).unwrap();
        let f_split =
            BochnerFunction::new(vec![vec![1.0, -1.0], vec![0.5, 2.0], vec![0.5, 2.0]]).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let a = lp_norm(&f, &space, p, &NormSpec::euclidean()).unwrap();
            let b = lp_norm(&f_split, &split, p, &NormSpec::euclidean()).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a));
        }
        let g = BochnerFunction::new(vec![vec![0.2, 0.0], vec![-0.3, 0.0]]).unwrap();
        let g_split =
            BochnerFunction::new(vec![vec![0.2, 0.0], vec![-0.3, 0.0], vec![-0.3, 0.0]]).unwrap();
        let axis = Subspace::axis(2, 0).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let problem = LiftProblem::new(
                vec![f.clone()],
                space.clone(),
                axis.clone(),
                NormSpec::euclidean(),
                p,
                p,
            )
            .unwrap();
            let problem_split = LiftProblem::new(
                vec![f_split.clone()],
                split.clone(),
                axis.clone(),
                NormSpec::euclidean(),
                p,
                p,
            )
            .unwrap();
            let a = global_objective(&problem, &g).unwrap();
            let b = global_objective(&problem_split, &g_split).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a));
        }
    }
}
