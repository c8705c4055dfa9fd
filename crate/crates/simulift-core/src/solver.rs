//! Iterative engine shared by the center and global solvers: restarted
//! normalized subgradient descent with geometrically decaying steps (robust
//! on the nonsmooth l_1 / l_inf objectives), followed by an Armijo
//! backtracking polish that drives the certificate residual down on smooth
//! instances. All iterates live in the orthonormal coordinates of the
//! constraint subspace, so steps are unconstrained.

use crate::center::{SolverConfig, StepRule};
use crate::linalg;

pub(crate) trait ConvexProblem {
    fn value(&self, x: &[f64]) -> f64;
    fn subgradient(&self, x: &[f64]) -> Vec<f64>;
    /// Certified optimality residual at `x`: dual norm of the projected
    /// subgradient, reduced by the kink radii where the objective is not
    /// differentiable. Zero certifies optimality of the convex objective.
    fn residual(&self, x: &[f64]) -> f64;
}

#[derive(Clone, Debug)]
pub(crate) struct Incumbent {
    pub x: Vec<f64>,
    pub value: f64,
    pub residual: f64,
}

pub(crate) struct MinimizeOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn tie_margin(value: f64) -> f64 {
    1e-12 * (1.0 + value.abs())
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Tie-break used to merge multi-start results: lowest objective, then
/// lowest certificate residual, then lexicographically smallest point.
pub(crate) fn prefer(candidate: &Incumbent, incumbent: &Incumbent) -> bool {
    let margin = tie_margin(incumbent.value);
    if candidate.value < incumbent.value - margin {
        return true;
    }
    if candidate.value > incumbent.value + margin {
        return false;
    }
    if candidate.residual < incumbent.residual - 1e-15 {
        return true;
    }
    if candidate.residual > incumbent.residual + 1e-15 {
        return false;
    }
    lex_less(&candidate.x, &incumbent.x)
}

const ROUNDS: usize = 6;
const ROUND_DECAY_SPAN: f64 = 1e-7;

fn run_single(
    problem: &dyn ConvexProblem,
    x0: Vec<f64>,
    radius0: f64,
    budget: usize,
    cfg: &SolverConfig,
) -> (Incumbent, usize) {
    let v0 = problem.value(&x0);
    let r0 = problem.residual(&x0);
    let mut best = Incumbent {
        x: x0,
        value: v0,
        residual: r0,
    };
    if best.residual <= cfg.tolerance || budget == 0 {
        return (best, 0);
    }

    let mut used = 0usize;
    let polish_budget = budget / 4;
    let phase_a = budget - polish_budget;
    let per_round = (phase_a / ROUNDS).max(1);
    let mut radius = radius0.max(1e-12);
    let decay = ROUND_DECAY_SPAN.powf(1.0 / per_round as f64);

    let mut round = 0usize;
    while used < phase_a && round < ROUNDS {
        round += 1;
        let round_start = best.x.clone();
        let mut x = best.x.clone();
        let mut step = radius;
        // level estimate for the Polyak rule, tightened per round
        let delta = (0.05 * (1.0 + best.value.abs())) * 0.5f64.powi(round as i32);
        let target = best.value - delta;
        let mut improved = false;
        for _ in 0..per_round {
            if used >= phase_a {
                break;
            }
            used += 1;
            let g = problem.subgradient(&x);
            let gn = linalg::norm2(&g);
            if gn <= 1e-300 {
                // canonical subgradient vanished; nothing to follow
                let v = problem.value(&x);
                let r = problem.residual(&x);
                if v < best.value || (v <= best.value + tie_margin(best.value) && r < best.residual)
                {
                    best = Incumbent {
                        x: x.clone(),
                        value: v,
                        residual: r,
                    };
                }
                if best.residual <= cfg.tolerance {
                    return (best, used);
                }
                break;
            }
            let stride = match cfg.step_rule {
                StepRule::Diminishing => step / gn,
                StepRule::Polyak => {
                    let v = problem.value(&x);
                    (((v - target) / (gn * gn)).max(0.0)).min(radius / gn)
                }
            };
            linalg::axpy(&mut x, -stride, &g);
            step *= decay;
            let v = problem.value(&x);
            if v < best.value {
                best = Incumbent {
                    x: x.clone(),
                    value: v,
                    residual: f64::INFINITY,
                };
                improved = true;
            }
        }
        if improved {
            best.residual = problem.residual(&best.x);
            if best.residual <= cfg.tolerance {
                return (best, used);
            }
        }
        let traveled = linalg::dist2(&best.x, &round_start);
        radius = (4.0 * traveled).clamp(radius * 1e-4, radius);
        if radius <= 1e-15 * (1.0 + linalg::norm2(&best.x)) {
            break;
        }
    }

    // Armijo polish from the incumbent
    let mut x = best.x.clone();
    let mut v = best.value;
    let mut trial_step = 1.0f64;
    while used < budget {
        used += 1;
        let r = problem.residual(&x);
        if v <= best.value + tie_margin(best.value)
            && (v < best.value || r < best.residual)
        {
            best = Incumbent {
                x: x.clone(),
                value: v,
                residual: r,
            };
        }
        if best.residual <= cfg.tolerance {
            return (best, used);
        }
        let g = problem.subgradient(&x);
        let gn2 = linalg::dot(&g, &g);
        if gn2 <= 1e-300 {
            break;
        }
        let mut t = (trial_step * 4.0).min(1e6 / gn2.sqrt().max(1e-300));
        let mut accepted = false;
        for _ in 0..60 {
            let mut xn = x.clone();
            linalg::axpy(&mut xn, -t, &g);
            let vn = problem.value(&xn);
            if vn <= v - 1e-4 * t * gn2 {
                x = xn;
                v = vn;
                trial_step = t;
                accepted = true;
                break;
            }
            t *= 0.5;
            if t <= 1e-18 {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    let r = problem.residual(&x);
    if v <= best.value + tie_margin(best.value) && (v < best.value || r < best.residual) {
        best = Incumbent {
            x,
            value: v,
            residual: r,
        };
    }
    (best, used)
}

/// Minimizes `problem` from every start, merging results with the
/// deterministic tie-break. The iteration budget is split evenly across
/// starts; a start that certifies optimality short-circuits the rest.
pub(crate) fn minimize(
    problem: &dyn ConvexProblem,
    starts: &[(Vec<f64>, f64)],
    cfg: &SolverConfig,
) -> MinimizeOutcome {
    debug_assert!(!starts.is_empty());
    let per_start = (cfg.max_iterations / starts.len().max(1)).max(1);
    let mut total = 0usize;
    let mut best: Option<Incumbent> = None;
    for (x0, radius0) in starts {
        let (candidate, used) = run_single(problem, x0.clone(), *radius0, per_start, cfg);
        total += used;
        let take = match &best {
            None => true,
            Some(current) => prefer(&candidate, current),
        };
        if take {
            best = Some(candidate);
        }
        if let Some(current) = &best {
            if current.residual <= cfg.tolerance {
                break;
            }
        }
    }
    let best = best.expect("at least one start");
    let converged = best.residual <= cfg.tolerance;
    MinimizeOutcome {
        x: best.x,
        residual: best.residual,
        iterations: total,
        converged,
    }
}
