//! Small dense complex 4x4 matrices with LU-based inversion.
//!
//! The monodromy formulas only ever need 4x4 complex arithmetic, so a
//! fixed-size type with partial-pivot LU keeps the crate free of a general
//! linear-algebra dependency.

use crate::error::Error;
use crate::Result;
use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};

pub type C64 = Complex64;

pub const ZERO_DET_NORM: f64 = 1e-280;

/// ω = e^{iπ/2}; every power ω^x in the matrix formulas is computed as
/// e^{iπx/2} so there is no branch ambiguity.
pub fn omega_pow(x: f64) -> C64 {
    C64::from_polar(1.0, std::f64::consts::FRAC_PI_2 * x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    pub e: [[C64; 4]; 4],
}

impl Mat4 {
    pub fn zero() -> Self {
        Mat4 { e: [[C64::new(0.0, 0.0); 4]; 4] }
    }

    pub fn identity() -> Self {
        let mut m = Mat4::zero();
        for i in 0..4 {
            m.e[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> C64) -> Self {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for j in 0..4 {
                m.e[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: [[C64; 4]; 4]) -> Self {
        Mat4 { e: rows }
    }

    pub fn diag(d: [C64; 4]) -> Self {
        Mat4::from_fn(|i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn diag_re(d: [f64; 4]) -> Self {
        Mat4::diag([C64::new(d[0], 0.0), C64::new(d[1], 0.0), C64::new(d[2], 0.0), C64::new(d[3], 0.0)])
    }

    /// Elementary matrix with a single entry at (i, j).
    pub fn unit_entry(i: usize, j: usize, v: C64) -> Self {
        let mut m = Mat4::zero();
        m.e[i][j] = v;
        m
    }

    pub fn transpose(&self) -> Self {
        Mat4::from_fn(|i, j| self.e[j][i])
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Mat4::from_fn(|i, j| self.e[i][j].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat4::from_fn(|i, j| self.e[i][j] * s)
    }

    pub fn mul_vec(&self, v: [C64; 4]) -> [C64; 4] {
        let mut out = [C64::new(0.0, 0.0); 4];
        for i in 0..4 {
            for (j, vj) in v.iter().enumerate() {
                out[i] += self.e[i][j] * vj;
            }
        }
        out
    }

    pub fn col(&self, j: usize) -> [C64; 4] {
        [self.e[0][j], self.e[1][j], self.e[2][j], self.e[3][j]]
    }

    pub fn set_col(&mut self, j: usize, v: [C64; 4]) {
        for i in 0..4 {
            self.e[i][j] = v[i];
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.e.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.e.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// LU decomposition with partial pivoting; returns (LU, perm, sign).
    fn lu(&self) -> Result<([[C64; 4]; 4], [usize; 4], f64)> {
        let mut a = self.e;
        let mut piv = [0usize, 1, 2, 3];
        let mut sign = 1.0;
        for k in 0..4 {
            let mut p = k;
            let mut best = a[k][k].norm();
            for r in (k + 1)..4 {
                let v = a[r][k].norm();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best < ZERO_DET_NORM {
                return Err(Error::SingularMatrix(best));
            }
            if p != k {
                a.swap(p, k);
                piv.swap(p, k);
                sign = -sign;
            }
            let pivot = a[k][k];
            for r in (k + 1)..4 {
                let f = a[r][k] / pivot;
                a[r][k] = f;
                for c in (k + 1)..4 {
                    let sub = f * a[k][c];
                    a[r][c] -= sub;
                }
            }
        }
        Ok((a, piv, sign))
    }

    pub fn det(&self) -> C64 {
        match self.lu() {
            Ok((a, _, sign)) => {
                let mut d = C64::new(sign, 0.0);
                for k in 0..4 {
                    d *= a[k][k];
                }
                d
            }
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Solve A x = b.
    pub fn solve(&self, b: [C64; 4]) -> Result<[C64; 4]> {
        let (a, piv, _) = self.lu()?;
        let mut x = [C64::new(0.0, 0.0); 4];
        for i in 0..4 {
            x[i] = b[piv[i]];
        }
        // forward substitution (unit lower triangle)
        for i in 1..4 {
            for j in 0..i {
                let sub = a[i][j] * x[j];
                x[i] -= sub;
            }
        }
        // back substitution
        for i in (0..4).rev() {
            for j in (i + 1)..4 {
                let sub = a[i][j] * x[j];
                x[i] -= sub;
            }
            x[i] /= a[i][i];
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Mat4> {
        let mut inv = Mat4::zero();
        for j in 0..4 {
            let mut e = [C64::new(0.0, 0.0); 4];
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(e)?;
            inv.set_col(j, col);
        }
        Ok(inv)
    }

    /// A^{-T}.
    pub fn inv_transpose(&self) -> Result<Mat4> {
        Ok(self.inverse()?.transpose())
    }

    /// Frobenius condition estimate ‖A‖_F · ‖A⁻¹‖_F.
    pub fn cond_estimate(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.frobenius_norm() * inv.frobenius_norm(),
            Err(_) => f64::INFINITY,
        }
    }

    /// exp(s·A) for nilpotent A (A⁴ = 0): finite sum up to A³.
    pub fn exp_nilpotent(&self, s: C64) -> Mat4 {
        let a1 = self.scale(s);
        let a2 = a1 * a1;
        let a3 = a2 * a1;
        Mat4::identity() + a1 + a2.scale(C64::new(0.5, 0.0)) + a3.scale(C64::new(1.0 / 6.0, 0.0))
    }

    pub fn approx_eq(&self, other: &Mat4, tol: f64) -> bool {
        (*self - *other).frobenius_norm() <= tol
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.e[i][j] + rhs.e[i][j])
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(self, rhs: Mat4) -> Mat4 {
        Mat4::from_fn(|i, j| self.e[i][j] - rhs.e[i][j])
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        Mat4::from_fn(|i, j| -self.e[i][j])
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        let mut m = Mat4::zero();
        for i in 0..4 {
            for k in 0..4 {
                let aik = self.e[i][k];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..4 {
                    m.e[i][j] += aik * rhs.e[k][j];
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_round_trip() {
        let a = Mat4::from_rows([
            [c(1.0, 0.5), c(2.0, 0.0), c(0.0, -1.0), c(3.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 1.0), c(4.0, 0.0), c(0.0, 0.0)],
            [c(5.0, 0.0), c(6.0, -2.0), c(0.0, 0.0), c(1.0, 0.0)],
            [c(0.0, 2.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)],
        ]);
        let inv = a.inverse().unwrap();
        let err = (a * inv - Mat4::identity()).frobenius_norm();
        assert!(err < 1e-13, "round trip error {err}");
        let err = (inv * a - Mat4::identity()).frobenius_norm();
        assert!(err < 1e-13);
    }

    #[test]
    fn det_of_permutation_and_singular() {
        let mut p = Mat4::zero();
        p.e[0][1] = c(1.0, 0.0);
        p.e[1][0] = c(1.0, 0.0);
        p.e[2][2] = c(1.0, 0.0);
        p.e[3][3] = c(1.0, 0.0);
        assert!((p.det() - c(-1.0, 0.0)).norm() < 1e-15);

        let mut s = Mat4::identity();
        s.e[3][3] = c(0.0, 0.0);
        assert!(matches!(s.inverse(), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn nilpotent_exponential() {
        // strictly upper triangular is nilpotent
        let mut a = Mat4::zero();
        a.e[0][1] = c(1.0, 0.0);
        a.e[1][2] = c(2.0, 0.0);
        a.e[2][3] = c(-1.0, 0.5);
        let s = c(0.3, -0.2);
        let e = a.exp_nilpotent(s);
        // exp(sA)·exp(-sA) = I
        let em = a.exp_nilpotent(-s);
        assert!((e * em - Mat4::identity()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn omega_powers() {
        assert!((omega_pow(1.0) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((omega_pow(2.0) + c(1.0, 0.0)).norm() < 1e-15);
        assert!((omega_pow(4.0) - c(1.0, 0.0)).norm() < 1e-15);
        // ω^{7/2} = ω^{-1/2} as numbers
        assert!((omega_pow(3.5) - omega_pow(-0.5)).norm() < 1e-15);
    }
}
