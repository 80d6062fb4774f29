//! Dense complex linear algebra used throughout the crate.
//!
//! Everything is built on `nalgebra` dynamic matrices with `Complex64`
//! entries. Real-linear operators on complex spaces are handled by
//! realification: a complex vector `x + iy` of length `n` becomes the real
//! vector `(x, y)` of length `2n`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Default cap on the 1-norm of an exponent before `expm` refuses.
pub const EXP_NORM_CAP: f64 = 600.0;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn to_complex_vec(v: &RVec) -> CVec {
    v.map(|x| c(x, 0.0))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMat) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn one_norm(m: &CMat) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Real matrix of the real-linear map underlying a complex matrix, acting on
/// `(Re x, Im x)`.
pub fn realify(m: &CMat) -> RMat {
    let (r, k) = m.shape();
    let mut out = RMat::zeros(2 * r, 2 * k);
    for i in 0..r {
        for j in 0..k {
            let z = m[(i, j)];
            out[(i, j)] = z.re;
            out[(i, j + k)] = -z.im;
            out[(i + r, j)] = z.im;
            out[(i + r, j + k)] = z.re;
        }
    }
    out
}

pub fn realify_vec(v: &CVec) -> RVec {
    let n = v.len();
    RVec::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

pub fn complexify_vec(v: &RVec) -> CVec {
    assert!(v.len() % 2 == 0, "realified vector must have even length");
    let n = v.len() / 2;
    CVec::from_fn(n, |i, _| c(v[i], v[i + n]))
}

/// Matrix of multiplication by `i` on realified coordinates.
pub fn real_complex_structure(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i + n, i)] = 1.0;
        j[(i, i + n)] = -1.0;
    }
    j
}

/// Matrix exponential (Padé scaling and squaring, via `nalgebra`).
pub fn expm(m: &CMat) -> Result<CMat> {
    let norm = one_norm(m);
    if !norm.is_finite() || norm > EXP_NORM_CAP {
        return Err(Error::Overflow(format!(
            "matrix exponential argument has 1-norm {norm:.3e} (cap {EXP_NORM_CAP})"
        )));
    }
    Ok(m.clone().exp())
}

/// Principal matrix logarithm by inverse scaling and squaring.
///
/// Restricted to matrices whose spectrum avoids the closed negative real
/// axis; square roots are taken with the Denman–Beavers iteration until the
/// argument is within 0.25 of the identity, then the Gregory series
/// `log A = 2 artanh((A - I)(A + I)^-1)` is summed.
pub fn logm(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let id = CMat::identity(n, n);
    let mut a = m.clone();
    let mut squarings = 0u32;
    while max_abs(&(&a - &id)) > 0.25 {
        if squarings > 60 {
            return Err(Error::Numerical("logm: square-root iteration did not approach identity".into()));
        }
        a = sqrtm(&a)?;
        squarings += 1;
    }
    let num = &a - &id;
    let den = (&a + &id)
        .try_inverse()
        .ok_or_else(|| Error::Numerical("logm: singular (A + I)".into()))?;
    let y = num * den;
    let y2 = &y * &y;
    let mut term = y.clone();
    let mut sum = y.clone();
    for k in 1..60 {
        term = &term * &y2;
        let add = &term / c((2 * k + 1) as f64, 0.0);
        sum += &add;
        if max_abs(&add) < 1e-18 {
            break;
        }
    }
    Ok(sum * c(2.0 * f64::powi(2.0, squarings as i32), 0.0))
}

/// Principal square root via the Denman–Beavers iteration.
pub fn sqrtm(m: &CMat) -> Result<CMat> {
    let n = m.nrows();
    let mut y = m.clone();
    let mut z = CMat::identity(n, n);
    for _ in 0..100 {
        let yi = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("sqrtm: singular iterate".into()))?;
        let zi = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("sqrtm: singular iterate".into()))?;
        let y_next = (&y + &zi) * c(0.5, 0.0);
        let z_next = (&z + &yi) * c(0.5, 0.0);
        let delta = max_abs(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * max_abs(&y).max(1.0) {
            return Ok(y);
        }
    }
    Err(Error::Numerical("sqrtm: Denman–Beavers iteration did not converge".into()))
}

/// The pair `(cosh √A, sinh √A / √A)` as entire functions of `A`.
///
/// Both are even power series in `√A`, so no square root is ever formed and
/// singular `A` is fine. Taylor series on `A / 4^s` followed by `s` doubling
/// steps `C ← 2C² − I`, `S ← S·C`.
pub fn cosh_sinhc_sqrt(a: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let id = CMat::identity(n, n);
    let norm = one_norm(a);
    let mut s = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.25;
        s += 1;
    }
    let b = a * c(scale, 0.0);
    // term_k = B^k / (2k)!  for cosh,  B^k / (2k+1)!  for sinhc
    let mut cosh = id.clone();
    let mut sinhc = id.clone();
    let mut power = id.clone();
    let mut fact_even = 1.0f64;
    let mut fact_odd = 1.0f64;
    for k in 1..30 {
        power = &power * &b;
        fact_even *= ((2 * k - 1) * (2 * k)) as f64;
        fact_odd *= ((2 * k) * (2 * k + 1)) as f64;
        let tc = &power / c(fact_even, 0.0);
        let ts = &power / c(fact_odd, 0.0);
        cosh += &tc;
        sinhc += &ts;
        if max_abs(&tc) < 1e-20 {
            break;
        }
    }
    for _ in 0..s {
        let next_s = &sinhc * &cosh;
        cosh = (&cosh * &cosh) * c(2.0, 0.0) - &id;
        sinhc = next_s;
    }
    (cosh, sinhc)
}

/// Eigen-decomposition of a general complex matrix through the complex
/// Schur form: eigenvectors of the triangular factor by back substitution.
///
/// Columns of the returned matrix are unit-norm eigenvectors. No claim of
/// diagonalizability is made; callers check the condition of the result.
pub fn eig(m: &CMat) -> Result<(CVec, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((CVec::zeros(0), CMat::zeros(0, 0)));
    }
    let schur = m
        .clone()
        .try_schur(1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("complex Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let vals = CVec::from_fn(n, |i, _| t[(i, i)]);
    let scale = max_abs(&t).max(1e-300);
    let mut w = CMat::zeros(n, n);
    for k in 0..n {
        w[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for j in (i + 1)..=k {
                acc += t[(i, j)] * w[(j, k)];
            }
            let mut den = t[(i, i)] - t[(k, k)];
            let floor = (1e-14 * scale).max(1e-100);
            if den.norm() < floor {
                den = c(floor, 0.0);
            }
            w[(i, k)] = -acc / den;
        }
    }
    let mut v = q * w;
    for k in 0..n {
        let nrm = v.column(k).norm();
        if nrm > 0.0 {
            v.column_mut(k).unscale_mut(nrm);
        }
    }
    Ok((vals, v))
}

/// 2-norm condition number from singular values.
pub fn condition(m: &CMat) -> f64 {
    if m.iter().any(|z| !z.is_finite()) {
        return f64::INFINITY;
    }
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Moore–Penrose pseudo-inverse of a full-column-rank complex matrix.
pub fn left_inverse(m: &CMat) -> Result<CMat> {
    let mh = m.adjoint();
    let gram = &mh * m;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Numerical("left inverse of rank-deficient basis".into()))?;
    Ok(inv * mh)
}

pub fn left_inverse_real(m: &RMat) -> Result<RMat> {
    let mt = m.transpose();
    let gram = &mt * m;
    let inv = gram
        .try_inverse()
        .ok_or_else(|| Error::Numerical("left inverse of rank-deficient basis".into()))?;
    Ok(inv * mt)
}

/// Orthonormal basis (columns) of the column span of a real matrix, using
/// the SVD with relative rank tolerance.
pub fn column_span(m: &RMat, rel_tol: f64) -> RMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return RMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax.max(1e-300))
        .collect();
    let mut out = RMat::zeros(m.nrows(), cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Numerical rank with relative tolerance.
pub fn rank_real(m: &RMat, rel_tol: f64) -> usize {
    column_span(m, rel_tol).ncols()
}

/// Basis of the null space of a real matrix (columns).
pub fn null_space_real(m: &RMat, rel_tol: f64) -> RMat {
    let n = m.ncols();
    if m.nrows() == 0 {
        return RMat::identity(n, n);
    }
    // pad to a square system so that the SVD exposes all right singular vectors
    let rows = m.nrows().max(n);
    let mut padded = RMat::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let idx: Vec<usize> = (0..n)
        .filter(|&i| svd.singular_values[i] <= rel_tol * smax.max(1e-300))
        .collect();
    let mut out = RMat::zeros(n, idx.len());
    for (k, &i) in idx.iter().enumerate() {
        out.set_column(k, &vt.row(i).transpose());
    }
    out
}

/// Dimension of the kernel of a complex matrix at the given absolute
/// singular-value threshold.
pub fn kernel_dim(m: &CMat, abs_tol: f64) -> usize {
    m.clone()
        .singular_values()
        .iter()
        .filter(|&&s| s <= abs_tol)
        .count()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}
