//! Hermitian eigendecomposition.
//!
//! Householder reduction of the complex Hermitian matrix to real symmetric
//! tridiagonal form, then implicit-shift QL with eigenvector accumulation.
//! Dimensions in this crate stay small (at most 2^7), so a direct dense
//! solver is the right tool.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{C64, CMatrix};
use crate::error::{Error, Result};

/// Eigenvalues in ascending order; column `j` of `vectors` is the
/// eigenvector belonging to `values[j]`.
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Full eigendecomposition of a Hermitian matrix.
///
/// The input is taken as given; callers that need a Hermiticity check do it
/// beforehand (see `expi_hermitian`).
pub fn hermitian_eigen(a: &CMatrix) -> Result<Eigen> {
    let (mut d, mut e, q) = tridiagonalize(a, true);
    let mut vectors = q.expect("vectors requested");
    tql2(&mut d, &mut e, Some(&mut vectors))?;
    sort_ascending(&mut d, Some(&mut vectors));
    Ok(Eigen { values: d, vectors })
}

/// Eigenvalues only (ascending), skipping eigenvector accumulation.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let (mut d, mut e, _) = tridiagonalize(a, false);
    tql2(&mut d, &mut e, None)?;
    sort_ascending(&mut d, None);
    Ok(d)
}

/// Reduces Hermitian `a` to real symmetric tridiagonal form.
///
/// Returns the diagonal, the non-negative real subdiagonal (entry `i`
/// couples rows `i` and `i+1`; the last slot is a sentinel), and the
/// accumulated unitary when requested, so that `a = Q T Q†`.
fn tridiagonalize(a: &CMatrix, want_vectors: bool) -> (Vec<f64>, Vec<f64>, Option<CMatrix>) {
    let n = a.dim();
    let mut m = a.clone();
    let mut q = want_vectors.then(|| CMatrix::identity(n));
    let mut sub = vec![C64::new(0.0, 0.0); n]; // complex subdiagonal before phasing
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut w = vec![C64::new(0.0, 0.0); n];

    for k in 0..n.saturating_sub(2) {
        let mut xnorm2 = 0.0;
        for i in k + 1..n {
            xnorm2 += m[(i, k)].norm_sqr();
        }
        if xnorm2 == 0.0 {
            sub[k] = C64::new(0.0, 0.0);
            continue;
        }
        let xnorm = xnorm2.sqrt();
        let x0 = m[(k + 1, k)];
        // Reflector target chosen opposite to x0's phase to avoid cancellation.
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * xnorm
        } else {
            C64::new(-xnorm, 0.0)
        };
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = m[(i, k)];
        }
        let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
        sub[k] = alpha;
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // w = B v on the trailing block
        for i in k + 1..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in k + 1..n {
                acc += m[(i, j)] * v[j];
            }
            w[i] = acc;
        }
        let vw: f64 = (k + 1..n).map(|i| (v[i].conj() * w[i]).re).sum();
        // p = tau w - (tau^2/2) (v† B v) v, then B <- B - p v† - v p†
        for i in k + 1..n {
            w[i] = w[i] * tau - v[i] * (0.5 * tau * tau * vw);
        }
        for i in k + 1..n {
            for j in k + 1..=i {
                let val = m[(i, j)] - w[i] * v[j].conj() - v[i] * w[j].conj();
                m[(i, j)] = val;
                m[(j, i)] = val.conj();
            }
            let di = m[(i, i)];
            m[(i, i)] = C64::new(di.re, 0.0);
        }

        if let Some(q) = q.as_mut() {
            // Q <- Q (I - tau v v†)
            for r in 0..n {
                let mut t = C64::new(0.0, 0.0);
                for j in k + 1..n {
                    t += q[(r, j)] * v[j];
                }
                t *= tau;
                for j in k + 1..n {
                    let upd = t * v[j].conj();
                    q[(r, j)] -= upd;
                }
            }
        }
    }
    if n >= 2 {
        sub[n - 2] = m[(n - 1, n - 2)];
    }

    // Phase the subdiagonal real non-negative, folding the phases into Q.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for (i, di) in d.iter_mut().enumerate() {
        *di = m[(i, i)].re;
    }
    let mut phase = C64::new(1.0, 0.0);
    for i in 0..n.saturating_sub(1) {
        let ec = sub[i];
        let r = ec.norm();
        e[i] = r;
        let next = if r > 0.0 { ec * phase / r } else { phase };
        if let Some(q) = q.as_mut() {
            for row in 0..n {
                q[(row, i + 1)] *= next;
            }
        }
        phase = next;
    }
    (d, e, q)
}

/// Implicit-shift QL on a real symmetric tridiagonal matrix, rotating the
/// (complex) eigenvector columns alongside.
fn tql2(d: &mut [f64], e: &mut [f64], mut v: Option<&mut CMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::EigenNoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..v.dim() {
                        let fk = v[(k, i + 1)];
                        v[(k, i + 1)] = v[(k, i)] * s + fk * c;
                        v[(k, i)] = v[(k, i)] * c - fk * s;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn sort_ascending(d: &mut [f64], v: Option<&mut CMatrix>) {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    d.copy_from_slice(&sorted);
    if let Some(v) = v {
        let old = v.clone();
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                v[(row, new_col)] = old[(row, old_col)];
            }
        }
    }
}
