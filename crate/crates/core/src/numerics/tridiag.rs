//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    off_sq: Vec<f64>,
    pivmin: f64,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal needs n diagonal and n-1 off-diagonal entries, got {} and {}",
                diag.len(),
                off.len()
            )));
        }
        let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
        let max_sq = off_sq.iter().cloned().fold(1.0, f64::max);
        Ok(Self {
            diag,
            off,
            off_sq,
            pivmin: f64::MIN_POSITIVE * max_sq,
        })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < self.pivmin {
            q = -self.pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            q = self.diag[i] - x - self.off_sq[i - 1] / q;
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to `abs_tol`.
    pub fn eigenvalue(&self, k: usize, abs_tol: f64) -> Result<f64> {
        let (lo, hi) = self.gershgorin();
        self.eigenvalue_in(k, lo, hi, abs_tol)
    }

    /// Like [`eigenvalue`](Self::eigenvalue) but starting from a caller
    /// bracket; the bracket is widened if it does not contain eigenvalue `k`.
    pub fn eigenvalue_in(&self, k: usize, lo: f64, hi: f64, abs_tol: f64) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue index {k} for a {}x{} matrix",
                self.len(),
                self.len()
            )));
        }
        let (glo, ghi) = self.gershgorin();
        let (mut lo, mut hi) = (lo, hi);
        if self.count_below(lo) > k {
            lo = glo;
        }
        if self.count_below(hi) <= k {
            hi = ghi + abs_tol.max(f64::EPSILON * ghi.abs());
        }
        for _ in 0..300 {
            if hi - lo <= abs_tol {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Convergence(format!("bisection for eigenvalue {k}")))
    }

    /// Eigenvector for a (converged) eigenvalue by inverse iteration,
    /// normalized to unit Euclidean length.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.len();
        let shift = eigenvalue + 1e-12 * eigenvalue.abs().max(f64::MIN_POSITIVE);
        let mut x = vec![1.0; n];
        for _ in 0..6 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    // Thomas algorithm for (T - shift) y = rhs.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let tiny = 1e-300;
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut b = self.diag[0] - shift;
        if b.abs() < tiny {
            b = tiny;
        }
        if n > 1 {
            c[0] = self.off[0] / b;
        }
        d[0] = rhs[0] / b;
        for i in 1..n {
            let mut b = self.diag[i] - shift - self.off[i - 1] * c[i - 1];
            if b.abs() < tiny {
                b = tiny;
            }
            if i + 1 < n {
                c[i] = self.off[i] / b;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / b;
        }
        for i in (0..n - 1).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        d
    }
}

/// Symmetric-definite pencil `A x = E B x` with `A` tridiagonal and `B`
/// diagonal positive.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralizedTridiagonal {
    pub a_diag: Vec<f64>,
    pub a_off: Vec<f64>,
    pub b_diag: Vec<f64>,
}

impl GeneralizedTridiagonal {
    /// Reduce to the standard problem `B^{-1/2} A B^{-1/2}`.
    pub fn to_standard(&self) -> Result<SymTridiagonal> {
        if self.b_diag.len() != self.a_diag.len() {
            return Err(Error::InvalidParameter("weight length mismatch".into()));
        }
        if let Some(bad) = self.b_diag.iter().find(|b| !(**b > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight matrix must be positive, found {bad}"
            )));
        }
        let inv_sqrt: Vec<f64> = self.b_diag.iter().map(|b| 1.0 / b.sqrt()).collect();
        let diag = self
            .a_diag
            .iter()
            .zip(&self.b_diag)
            .map(|(a, b)| a / b)
            .collect();
        let off = self
            .a_off
            .iter()
            .enumerate()
            .map(|(i, e)| e * inv_sqrt[i] * inv_sqrt[i + 1])
            .collect();
        SymTridiagonal::new(diag, off)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // Dirichlet Laplacian tridiag(-1, 2, -1): eigenvalues 2 - 2 cos(kπ/(n+1)).
    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn laplacian_spectrum() {
        let t = laplacian(50);
        for k in [0usize, 1, 17, 49] {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 51.0).cos();
            let got = t.eigenvalue(k, 1e-14).unwrap();
            assert!((got - exact).abs() < 1e-13, "k={k}: {got} vs {exact}");
        }
        assert_eq!(t.count_below(-0.1), 0);
        assert_eq!(t.count_below(4.1), 50);
    }

    #[test]
    fn eigenvector_of_laplacian() {
        let n = 40;
        let t = laplacian(n);
        let ev = t.eigenvalue(2, 1e-14).unwrap();
        let v = t.eigenvector(ev);
        // residual of T v - ev v
        let mut res: f64 = 0.0;
        for i in 0..n {
            let mut tv = 2.0 * v[i];
            if i > 0 {
                tv -= v[i - 1];
            }
            if i + 1 < n {
                tv -= v[i + 1];
            }
            res = res.max((tv - ev * v[i]).abs());
        }
        assert!(res < 1e-10, "residual {res}");
    }

    #[test]
    fn generalized_with_constant_weight_scales() {
        let n = 30;
        let g = GeneralizedTridiagonal {
            a_diag: vec![2.0; n],
            a_off: vec![-1.0; n - 1],
            b_diag: vec![4.0; n],
        };
        let s = g.to_standard().unwrap();
        let exact = (2.0 - 2.0 * (PI / 31.0).cos()) / 4.0;
        assert!((s.eigenvalue(0, 1e-15).unwrap() - exact).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_positive_weight() {
        let g = GeneralizedTridiagonal {
            a_diag: vec![1.0, 1.0],
            a_off: vec![0.0],
            b_diag: vec![1.0, 0.0],
        };
        assert!(g.to_standard().is_err());
    }
}
