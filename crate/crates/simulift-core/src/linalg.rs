//! Small dense linear-algebra helpers. Everything here works on `Vec<f64>`
//! rows; the systems involved never exceed a few dozen unknowns.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
///
/// Returns the orthonormal rows spanning the same space, or the index of the
/// first input row that is linearly dependent on its predecessors (relative
/// tolerance `tol` on the surviving length).
pub(crate) fn orthonormalize(rows: &[Vec<f64>], tol: f64) -> Result<Vec<Vec<f64>>, usize> {
    let mut ortho: Vec<Vec<f64>> = Vec::with_capacity(rows.len());
    for (index, row) in rows.iter().enumerate() {
        let original = norm2(row);
        if original == 0.0 {
            return Err(index);
        }
        let mut v = row.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = dot(&v, q);
                axpy(&mut v, -c, q);
            }
        }
        let remaining = norm2(&v);
        if remaining <= tol * original {
            return Err(index);
        }
        for vi in v.iter_mut() {
            *vi /= remaining;
        }
        ortho.push(v);
    }
    Ok(ortho)
}

/// Gaussian elimination with partial pivoting. Returns `None` when the
/// matrix is numerically singular.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}
