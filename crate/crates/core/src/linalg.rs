//! Dense row-major helpers over `f64` slices.

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `out = row * mat` for a row vector and an `n x n` matrix.
#[inline]
pub(crate) fn row_times(row: &[f64], mat: &[f64], out: &mut [f64]) {
    let n = row.len();
    debug_assert_eq!(mat.len(), n * n);
    out.fill(0.0);
    for (i, &r) in row.iter().enumerate() {
        for (o, m) in out.iter_mut().zip(&mat[i * n..(i + 1) * n]) {
            *o += r * m;
        }
    }
}

/// `out = mat * col` for an `n x n` matrix and a column vector.
#[inline]
pub(crate) fn times_col(mat: &[f64], col: &[f64], out: &mut [f64]) {
    let n = col.len();
    debug_assert_eq!(mat.len(), n * n);
    for (i, o) in out.iter_mut().enumerate() {
        *o = dot(&mat[i * n..(i + 1) * n], col);
    }
}

#[inline]
pub(crate) fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Rescales `v` onto the ball of radius `radius` when it lies outside.
#[inline]
pub(crate) fn project_ball(v: &mut [f64], radius: f64) {
    let len = norm(v);
    if len > radius {
        let scale = radius / len;
        v.iter_mut().for_each(|x| *x *= scale);
    }
}

pub(crate) fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products() {
        // [1 2] * [[1 2],[3 4]] = [7 10]; [[1 2],[3 4]] * [1 2]^T = [5 11]
        let m = [1.0, 2.0, 3.0, 4.0];
        let mut out = [0.0; 2];
        row_times(&[1.0, 2.0], &m, &mut out);
        assert_eq!(out, [7.0, 10.0]);
        times_col(&m, &[1.0, 2.0], &mut out);
        assert_eq!(out, [5.0, 11.0]);
    }

    #[test]
    fn projection() {
        let mut v = [3.0, 4.0];
        project_ball(&mut v, 1.0);
        assert!((norm(&v) - 1.0).abs() < 1e-15);
        let mut w = [0.3, 0.4];
        project_ball(&mut w, 1.0);
        assert_eq!(w, [0.3, 0.4]);
    }
}
