//! Euclidean distance from a point to the convex hull of finitely many
//! points, via projected gradient on the simplex-constrained least-squares
//! problem min_lambda |sum_i lambda_i a_i - y|_2 over the probability
//! simplex. No LP machinery; the point counts here are small.

use crate::error::{Error, Result};
use crate::linalg;

/// Euclidean projection of `v` onto the probability simplex.
pub(crate) fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    let mut support = 0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
            support = k + 1;
        }
    }
    debug_assert!(support > 0);
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Closest point of the convex hull of `points` to `y`, together with the
/// Euclidean distance. Accelerated projected gradient with restarts,
/// iterated until the projected-gradient residual is negligible.
pub fn hull_projection(points: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    hull_projection_capped(points, y, 200_000)
}

/// As [`hull_projection`] with an explicit iteration cap, for callers that
/// evaluate the gap inside their own iteration and can tolerate a slightly
/// looser answer.
pub fn hull_projection_capped(
    points: &[Vec<f64>],
    y: &[f64],
    max_iter: usize,
) -> Result<(Vec<f64>, f64)> {
    if points.is_empty() {
        return Err(Error::EmptyInput("hull point set"));
    }
    let d = y.len();
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch {
                context: "hull point",
                expected: d,
                actual: p.len(),
            });
        }
    }
    let n = points.len();
    if n == 1 {
        return Ok((points[0].clone(), linalg::dist2(&points[0], y)));
    }

    // gram matrix and linear term of 0.5 |A lambda - y|^2
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| linalg::dot(&points[i], &points[j])).collect())
        .collect();
    let lin: Vec<f64> = (0..n).map(|i| linalg::dot(&points[i], y)).collect();

    // Lipschitz bound for the gradient: Frobenius norm of the gram matrix
    let lipschitz = gram
        .iter()
        .flat_map(|row| row.iter().map(|g| g * g))
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    let step = 1.0 / lipschitz;

    let grad = |lambda: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| linalg::dot(&gram[i], lambda) - lin[i])
            .collect()
    };

    // start at the nearest vertex
    let start = (0..n)
        .min_by(|&i, &j| {
            linalg::dist2(&points[i], y).total_cmp(&linalg::dist2(&points[j], y))
        })
        .unwrap();
    let mut lambda = vec![0.0; n];
    lambda[start] = 1.0;

    let value = |lambda: &[f64]| -> f64 {
        let mut combo = vec![0.0; d];
        for (li, p) in lambda.iter().zip(points) {
            linalg::axpy(&mut combo, *li, p);
        }
        0.5 * linalg::dist2(&combo, y).powi(2)
    };

    // FISTA with function-value restarts
    let mut prev = lambda.clone();
    let mut t_prev = 1.0f64;
    let mut best = lambda.clone();
    let mut best_value = value(&lambda);
    let mut stalled = 0usize;
    for _ in 0..max_iter {
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt());
        let beta = (t_prev - 1.0) / t_next;
        let momentum: Vec<f64> = lambda
            .iter()
            .zip(&prev)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        let g = grad(&momentum);
        let next = project_to_simplex(
            &momentum
                .iter()
                .zip(&g)
                .map(|(l, gi)| l - step * gi)
                .collect::<Vec<f64>>(),
        );
        let next_value = value(&next);
        let moved = linalg::dist2(&next, &lambda);
        if next_value > best_value {
            // momentum overshot: restart from the incumbent
            prev = best.clone();
            lambda = best.clone();
            t_prev = 1.0;
            stalled += 1;
            if stalled > 50 {
                break;
            }
            continue;
        }
        prev = lambda;
        lambda = next;
        t_prev = t_next;
        if next_value < best_value - 1e-17 * (1.0 + best_value) {
            best_value = next_value;
            best = lambda.clone();
            stalled = 0;
        } else {
            stalled += 1;
        }
        if moved <= 1e-16 || stalled > 200 {
            break;
        }
    }

    let mut closest = vec![0.0; d];
    for (li, p) in best.iter().zip(points) {
        linalg::axpy(&mut closest, *li, p);
    }
    let gap = linalg::dist2(&closest, y);
    Ok((closest, gap))
}

/// Euclidean distance from `y` to the convex hull of `points`; zero (up to
/// the solver tolerance) exactly when `y` lies in the hull.
pub fn hull_membership_gap(points: &[Vec<f64>], y: &[f64]) -> Result<f64> {
    hull_projection(points, y).map(|(_, gap)| gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn simplex_projection_basics() {
        assert_eq!(project_to_simplex(&[2.0, 0.0]), vec![1.0, 0.0]);
        let p = project_to_simplex(&[0.3, 0.3]);
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        let q = project_to_simplex(&[-1.0, -2.0, -3.0]);
        assert_abs_diff_eq!(q.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        assert_eq!(q[2], 0.0);
    }

    #[test]
    fn vertex_has_zero_gap() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let gap = hull_membership_gap(&pts, &[0.0, 0.0]).unwrap();
        assert!(gap <= 1e-8, "gap {gap}");
    }

    #[test]
    fn segment_offset_gap() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0]];
        let gap = hull_membership_gap(&pts, &[0.5, 1.0]).unwrap();
        assert_abs_diff_eq!(gap, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn triangle_outer_corner_gap() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let gap = hull_membership_gap(&pts, &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(gap, 2.0f64.sqrt() / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn interior_points_have_zero_gap() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rng.gen_range(2..=6);
            let d = rng.gen_range(1..=4);
            let pts: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect())
                .collect();
            // random convex combination
            let mut lambda: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = lambda.iter().sum();
            for l in lambda.iter_mut() {
                *l /= total;
            }
            let mut y = vec![0.0; d];
            for (li, p) in lambda.iter().zip(&pts) {
                crate::linalg::axpy(&mut y, *li, p);
            }
            let gap = hull_membership_gap(&pts, &y).unwrap();
            assert!(gap <= 1e-8, "interior point has gap {gap}");
        }
    }

    #[test]
    fn duplicate_points_are_handled() {
        let pts = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]];
        let gap = hull_membership_gap(&pts, &[4.0, 5.0]).unwrap();
        assert_abs_diff_eq!(gap, 5.0, epsilon = 1e-9);
    }
}
