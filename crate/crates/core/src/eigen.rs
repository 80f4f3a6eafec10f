//! Dense non-symmetric complex eigenvalues: Householder reduction to upper
//! Hessenberg form followed by single-shift QR with Wilkinson shifts and
//! Givens rotations.

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("QR iteration did not converge after {0} sweeps")]
    SolverFailure(usize),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix has non-finite entries")]
    NonFinite,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// All eigenvalues of a square matrix, with multiplicity, in deflation order.
pub fn eigenvalues(a: &Array2<Complex64>) -> Result<Vec<Complex64>, EigenError> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(EigenError::NotSquare(rows, cols));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

/// In-place reduction to upper Hessenberg form by Householder reflections.
pub fn hessenberg(a: &mut Array2<Complex64>) {
    let n = a.nrows();
    for k in 0..n.saturating_sub(2) {
        let norm = (k + 1..n).map(|i| a[[i, k]].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[[k + 1, k]];
        let phase = if x0 == ZERO { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[[i, k]]).collect();
        v[0] -= alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= vn);
        // A <- (I - 2vv*) A
        for j in 0..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += vi.conj() * a[[k + 1 + t, j]];
            }
            for (t, vi) in v.iter().enumerate() {
                a[[k + 1 + t, j]] -= 2.0 * vi * dot;
            }
        }
        // A <- A (I - 2vv*)
        for i in 0..n {
            let mut dot = ZERO;
            for (t, vi) in v.iter().enumerate() {
                dot += a[[i, k + 1 + t]] * vi;
            }
            for (t, vi) in v.iter().enumerate() {
                a[[i, k + 1 + t]] -= 2.0 * dot * vi.conj();
            }
        }
        for i in k + 2..n {
            a[[i, k]] = ZERO;
        }
    }
}

/// Rotation `[[c, s], [-conj(s), c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, b.conj() / b.norm());
    }
    let r = a.norm().hypot(b.norm());
    let c = a.norm() / r;
    let s = (a / a.norm()) * b.conj() / r;
    (c, s)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half_tr = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn hessenberg_qr(h: &mut Array2<Complex64>) -> Result<Vec<Complex64>, EigenError> {
    let n = h.nrows();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(out);
    }
    let max_iter = 30 * n.max(10);
    let mut total = 0;
    let mut iter = 0;
    let mut hi = n - 1;
    let mut rot = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            out.push(h[[0, 0]]);
            break;
        }
        // find the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = h[[lo, lo - 1]].norm();
            let scale = h[[lo, lo]].norm() + h[[lo - 1, lo - 1]].norm();
            if sub <= f64::EPSILON * scale || sub < f64::MIN_POSITIVE {
                h[[lo, lo - 1]] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            out.push(h[[hi, hi]]);
            hi -= 1;
            iter = 0;
            continue;
        }
        total += 1;
        iter += 1;
        if total > max_iter {
            return Err(EigenError::SolverFailure(total));
        }
        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            let s = h[[hi, hi - 1]].norm() + if hi >= 2 { h[[hi - 1, hi - 2]].norm() } else { 0.0 };
            h[[hi, hi]] + Complex64::new(0.75 * s, 0.4 * s)
        } else {
            wilkinson_shift(h[[hi - 1, hi - 1]], h[[hi - 1, hi]], h[[hi, hi - 1]], h[[hi, hi]])
        };
        for k in lo..=hi {
            h[[k, k]] -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let (c, s) = givens(h[[k, k]], h[[k + 1, k]]);
            for j in k..=hi {
                let (x, y) = (h[[k, j]], h[[k + 1, j]]);
                h[[k, j]] = c * x + s * y;
                h[[k + 1, j]] = -s.conj() * x + c * y;
            }
            h[[k + 1, k]] = ZERO;
            rot.push((c, s));
        }
        for (t, &(c, s)) in rot.iter().enumerate() {
            let k = lo + t;
            for i in lo..=(k + 2).min(hi) {
                let (x, y) = (h[[i, k]], h[[i, k + 1]]);
                h[[i, k]] = x * c + y * s.conj();
                h[[i, k + 1]] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[[k, k]] += shift;
        }
    }
    Ok(out)
}

/// Greedy nearest-pair matching; returns pairs `(i, j)` and the largest distance.
pub fn match_points(a: &[Complex64], b: &[Complex64]) -> (Vec<(usize, usize)>, f64) {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j));
            worst = worst.max(d);
        }
    }
    (out, worst)
}

/// Largest singular value by power iteration on `A* A`.
pub fn spectral_norm(a: &Array2<Complex64>, iters: usize) -> f64 {
    let n = a.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0, 0.1 * i as f64)).collect();
    let mut sigma = 0.0;
    for _ in 0..iters.max(1) {
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|z| *z /= norm);
        let y: Vec<Complex64> = (0..a.nrows()).map(|i| (0..n).map(|j| a[[i, j]] * x[j]).sum()).collect();
        sigma = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x = (0..n).map(|j| (0..a.nrows()).map(|i| a[[i, j]].conj() * y[i]).sum()).collect();
    }
    sigma
}
