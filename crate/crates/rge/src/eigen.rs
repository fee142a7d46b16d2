//! Dense symmetric eigendecomposition: Householder tridiagonalization
//! followed by the implicitly shifted QL iteration, with eigenvector
//! accumulation. This is the classical tred2/tql2 pair; it is robust on
//! Laplacians with multiple (near-)zero eigenvalues.

use ndarray::Array2;

use crate::error::{Error, Result};

/// Full eigendecomposition of a symmetric matrix. Returns unsorted
/// eigenvalues and the matrix whose column `k` is the unit eigenvector of
/// eigenvalue `k`.
pub(crate) fn symmetric_eigen(matrix: &Array2<f64>) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = matrix.nrows();
    debug_assert_eq!(n, matrix.ncols());
    let mut z = matrix.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut z, &mut d, &mut e);
    tql2(&mut d, &mut e, &mut z)?;
    Ok((d, z))
}

/// Eigendecomposition of a symmetric tridiagonal matrix given its
/// diagonal and subdiagonal (`off.len() == diag.len() - 1`).
pub(crate) fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Array2<f64>)> {
    let n = diag.len();
    debug_assert!(n == 0 || off.len() == n - 1);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(&off[..n - 1]);
    let mut z = Array2::eye(n);
    // tql2 expects the subdiagonal in e[1..]; it shifts it down itself.
    tql2(&mut d, &mut e, &mut z)?;
    Ok((d, z))
}

/// Householder reduction to tridiagonal form with accumulation of the
/// orthogonal transform in `z`; on return `d` holds the diagonal and
/// `e[1..]` the subdiagonal.
fn tred2(z: &mut Array2<f64>, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| z[[i, k]].abs()).sum();
            if scale == 0.0 {
                e[i] = z[[i, l]];
            } else {
                for k in 0..=l {
                    z[[i, k]] /= scale;
                    h += z[[i, k]] * z[[i, k]];
                }
                let f = z[[i, l]];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                z[[i, l]] = f - g;
                let mut f_accum = 0.0;
                for j in 0..=l {
                    z[[j, i]] = z[[i, j]] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += z[[j, k]] * z[[i, k]];
                    }
                    for k in j + 1..=l {
                        g += z[[k, j]] * z[[i, k]];
                    }
                    e[j] = g / h;
                    f_accum += e[j] * z[[i, j]];
                }
                let hh = f_accum / (h + h);
                for j in 0..=l {
                    let f = z[[i, j]];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        z[[j, k]] -= f * e[k] + g * z[[i, k]];
                    }
                }
            }
        } else {
            e[i] = z[[i, l]];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        if d[i] != 0.0 {
            for j in 0..i {
                let mut g = 0.0;
                for k in 0..i {
                    g += z[[i, k]] * z[[k, j]];
                }
                for k in 0..i {
                    z[[k, j]] -= g * z[[k, i]];
                }
            }
        }
        d[i] = z[[i, i]];
        z[[i, i]] = 1.0;
        for j in 0..i {
            z[[j, i]] = 0.0;
            z[[i, j]] = 0.0;
        }
    }
}

fn hypot(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

/// Implicitly shifted QL iteration on a tridiagonal matrix, rotating the
/// columns of `z` along. `e[1..]` holds the subdiagonal on entry.
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut Array2<f64>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let eps = f64::EPSILON;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Numerical(
                    "QL iteration did not converge within 50 sweeps".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            let sign_r = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / (g + sign_r);
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
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
                for k in 0..n {
                    f = z[[k, i + 1]];
                    z[[k, i + 1]] = s * z[[k, i]] + c * f;
                    z[[k, i]] = c * z[[k, i]] - s * f;
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
