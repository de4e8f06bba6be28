//! Resonant (boundary) connection matrices: the per-case structure data
//! (E, F, U, K̃, Ã, Ã♭, Δ₀, Δ₁), the z-free connection matrix D₁♭, and the
//! connection factor carrying the e/f parameters.
//!
//! All matrices are built for the cases E1, E3, V1, V2; the reflected cases
//! E2, V3 are handled upstream by reflecting the parameter point.
//!
//! Construction runs a batch of exact self-checks (two routes to the
//! nilpotent M, the conjugation law of K̃, the anticommutation of Δ₁ with Λ,
//! nilpotency) and fails with `StructureInconsistent` if any is violated,
//! so a transcription bug cannot propagate silently.

use super::{kappa0, p_matrix, structure};
use crate::correspondence::{resonant_connection_params, ConnectionParams};
use crate::data::{BoundaryCase, WeightData};
use crate::error::Error;
use crate::linalg::{omega_pow, C64, Mat4};
use crate::specfun::{digamma, gamma_fn, EULER_GAMMA, ZETA3};
use crate::Result;
use std::f64::consts::{LN_2, PI};

const TWO_PI_I: C64 = C64::new(0.0, 2.0 * PI);
/// log ω = iπ/2.
const ELL_OMEGA: C64 = C64::new(0.0, PI / 2.0);

/// Per-case resonant structure matrices.
#[derive(Debug, Clone)]
pub struct ResonantParts {
    pub case: BoundaryCase,
    /// Edge parameter a (0 at V1, 2 at V2).
    pub a: f64,
    /// Nilpotent coupling pattern E of the Frobenius basis.
    pub e_nilpotent: Mat4,
    /// Diagonal F with Fᵢ = (ĉᵢ/ĉ₀)·φᵢ(t).
    pub f_diag: Mat4,
    pub u: Mat4,
    /// M = F E F⁻¹ = -ĉ E ĉ⁻¹.
    pub m_nilpotent: Mat4,
    /// Λ = -(N/4) M.
    pub lambda: Mat4,
    pub k_tilde: Mat4,
    pub a_tilde: Mat4,
    pub a_tilde_flat: Mat4,
    pub delta0: Mat4,
    pub delta1: Mat4,
    /// Scalars Ã₀..Ã₃ (t-dependent).
    pub a_scalars: [C64; 4],
    /// Scalars with the ♭-substitution log(2⁻⁸t⁴) → log(c/N⁴).
    pub a_flat_scalars: [C64; 4],
    /// Weight data and evaluation time used to build the structure.
    pub w: WeightData,
    pub t: f64,
}

fn e_pattern(case: BoundaryCase) -> Mat4 {
    let one = C64::new(1.0, 0.0);
    let mut e = Mat4::zero();
    match case {
        BoundaryCase::E1 => e.e[1][2] = one,
        BoundaryCase::E3 => {
            e.e[0][1] = one;
            e.e[2][3] = one;
        }
        BoundaryCase::V1 => {
            e.e[0][1] = one;
            e.e[1][2] = one;
            e.e[2][3] = one;
        }
        BoundaryCase::V2 => {
            e.e[3][0] = one;
            e.e[1][2] = one;
        }
        _ => unreachable!(),
    }
    e
}

fn f_table(case: BoundaryCase, a: f64, t: f64) -> [f64; 4] {
    match case {
        BoundaryCase::E1 => {
            let th = t.powf(-a / 2.0);
            [1.0, 0.5 * a * th, -0.5 * a * th, 0.25 * a.powi(3) * t.powf(-a)]
        }
        BoundaryCase::E3 => {
            let ta = a * a * t.powf(-a);
            [1.0, -1.0, ta, -ta]
        }
        BoundaryCase::V1 => [1.0, -1.0, 1.0, -1.0],
        BoundaryCase::V2 => {
            let t2 = t.powi(-2);
            let t4 = t.powi(-4);
            [-16.0 * t4, 2.0 * t2, -2.0 * t2, 16.0 * t4]
        }
        _ => unreachable!(),
    }
}

fn u_matrix(case: BoundaryCase, a: f64) -> Mat4 {
    let mut u = Mat4::identity();
    match case {
        BoundaryCase::E1 => u.e[1][2] = C64::new(-2.0 / a, 0.0),
        BoundaryCase::E3 => u.e[2][3] = C64::new(-2.0 / a, 0.0),
        BoundaryCase::V1 => {}
        BoundaryCase::V2 => {
            u.e[1][2] = C64::new(-0.5, 0.0);
            u.e[3][0] = C64::new(-1.25, 0.0);
        }
        _ => unreachable!(),
    }
    u
}

fn k_tilde(case: BoundaryCase, m0: f64) -> Mat4 {
    let w = omega_pow;
    let l = ELL_OMEGA;
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    match case {
        BoundaryCase::E1 => Mat4::from_rows([
            [w(2.0 * m0), w(-3.0) * 2.0 * l, w(-3.0), w(-2.0 * m0 - 6.0)],
            [w(m0), w(-1.5) * l, w(-1.5), w(-m0 - 3.0)],
            [one, z, one, one],
            [w(-m0), -w(1.5) * l, w(1.5), w(m0 + 3.0)],
        ]),
        BoundaryCase::E3 => Mat4::from_rows([
            [w(2.0 * m0) * 2.0 * l, w(2.0 * m0), w(-2.0 * m0 - 6.0) * 2.0 * l, w(-2.0 * m0 - 6.0)],
            [w(m0) * l, w(m0), w(-m0 - 3.0) * l, w(-m0 - 3.0)],
            [z, one, z, one],
            [-w(-m0) * l, w(-m0), -w(m0 + 3.0) * l, w(m0 + 3.0)],
        ]),
        BoundaryCase::V1 => {
            let l2 = l * l;
            let l3 = l2 * l;
            Mat4::from_rows([
                [w(-3.0) * 8.0 * l3 / 6.0, w(-3.0) * 4.0 * l2 / 2.0, w(-3.0) * 2.0 * l, w(-3.0)],
                [w(-1.5) * l3 / 6.0, w(-1.5) * l2 / 2.0, w(-1.5) * l, w(-1.5)],
                [z, z, z, one],
                [-w(1.5) * l3 / 6.0, w(1.5) * l2 / 2.0, -w(1.5) * l, w(1.5)],
            ])
        }
        BoundaryCase::V2 => Mat4::from_rows([
            [w(1.0), w(-3.0) * 2.0 * l, w(-3.0), w(-7.0) * 2.0 * l],
            [w(0.5), w(-1.5) * l, w(-1.5), w(-3.5) * l],
            [one, z, one, z],
            [w(-0.5), -w(1.5) * l, w(1.5), -w(3.5) * l],
        ]),
        _ => unreachable!(),
    }
}

fn delta0(case: BoundaryCase) -> Mat4 {
    let one = C64::new(1.0, 0.0);
    match case {
        BoundaryCase::E1 => {
            let mut d = Mat4::zero();
            d.e[0][3] = one;
            d.e[1][1] = -one;
            d.e[2][2] = one;
            d.e[3][0] = one;
            d
        }
        BoundaryCase::E3 => {
            let mut d = Mat4::zero();
            d.e[0][2] = -one;
            d.e[1][3] = one;
            d.e[2][0] = -one;
            d.e[3][1] = one;
            d
        }
        // the sign pattern is fixed by the conjugation law of K̃
        BoundaryCase::V1 => Mat4::diag_re([-1.0, 1.0, -1.0, 1.0]),
        BoundaryCase::V2 => Mat4::diag_re([1.0, -1.0, 1.0, -1.0]),
        _ => unreachable!(),
    }
}

fn delta1(case: BoundaryCase, w: &WeightData) -> Mat4 {
    // Δ₁ = Aᵀ Δ A⁻ᵀ for the loop-twist A of the Iwasawa factorization
    match case {
        BoundaryCase::E1 => Mat4::from_rows([
            [c(0.0), c(0.0), c(0.0), c(1.0)],
            [c(0.0), c(1.0), c(1.0), c(0.0)],
            [c(0.0), c(0.0), c(-1.0), c(0.0)],
            [c(1.0), c(0.0), c(0.0), c(0.0)],
        ]),
        BoundaryCase::E3 => Mat4::from_rows([
            [c(0.0), c(0.0), c(1.0), c(1.0)],
            [c(0.0), c(0.0), c(0.0), c(-1.0)],
            [c(1.0), c(1.0), c(0.0), c(0.0)],
            [c(0.0), c(-1.0), c(0.0), c(0.0)],
        ]),
        BoundaryCase::V2 => Mat4::from_rows([
            [c(-1.0), c(0.0), c(0.0), c(0.0)],
            [c(0.0), c(1.0), c(1.0), c(0.0)],
            [c(0.0), c(0.0), c(-1.0), c(0.0)],
            [c(1.0), c(0.0), c(0.0), c(1.0)],
        ]),
        BoundaryCase::V1 => {
            // w/2 entries carry the ratio c₂/c₁ = ĉ₁³/ĉ₀
            let r = w.chat1.powi(3) / w.chat0;
            let t = Mat4::from_rows([
                [c(1.0), c(1.0), c(r / 2.0), c(1.0)],
                [c(0.0), c(1.0), c(r), c(r / 2.0)],
                [c(0.0), c(0.0), c(1.0), c(1.0)],
                [c(0.0), c(0.0), c(0.0), c(1.0)],
            ]);
            t * Mat4::diag_re([1.0, -1.0, 1.0, -1.0])
        }
        _ => unreachable!(),
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn a_scalars(case: BoundaryCase, a: f64, t: f64, ell0: f64) -> Result<([C64; 4], [C64; 4])> {
    let ell = (-8.0 * LN_2) + 4.0 * t.ln();
    let ge = EULER_GAMMA;
    match case {
        BoundaryCase::E1 => {
            let g0 = gamma_fn(a / 8.0)?.powi(2) * gamma_fn(a / 4.0)?;
            let f_a8 = gamma_fn(-a / 8.0)? * gamma_fn(a / 8.0)?;
            let h_a4 = gamma_fn(-a / 4.0)? * gamma_fn(-a / 8.0)?.powi(2);
            let d_f = -digamma(-a / 8.0)? - digamma(a / 8.0)?;
            let pre1 = c((2.0f64).powf(-a) * t.powf(a / 2.0) * f_a8);
            let a0 = TWO_PI_I * g0;
            let a1 = -TWO_PI_I * pre1 * (2.0 * ge + d_f + ell);
            let a2 = TWO_PI_I * pre1 * 4.0;
            let a3 = TWO_PI_I * (2.0f64).powf(-2.0 * a) * t.powf(a) * h_a4;
            let a1f = -TWO_PI_I * pre1 * (2.0 * ge + 8.0 / a + d_f + ell0);
            Ok(([a0, a1, a2, a3], [a0, a1f, a2, a3]))
        }
        BoundaryCase::E3 => {
            let p0 = gamma_fn(a / 4.0)?.powi(2);
            let qa = gamma_fn(-a / 4.0)?.powi(2);
            let d_p = -2.0 * digamma(a / 4.0)?;
            let d_q = -2.0 * digamma(-a / 4.0)?;
            let pre2 = c((2.0f64).powf(-2.0 * a) * t.powf(a) * qa);
            let a0 = -TWO_PI_I * p0 * (2.0 * ge + d_p + ell);
            let a1 = TWO_PI_I * 4.0 * p0;
            let a2 = -TWO_PI_I * pre2 * (2.0 * ge + d_q + ell);
            let a3 = TWO_PI_I * pre2 * 4.0;
            let a0f = -TWO_PI_I * p0 * (2.0 * ge + d_p + ell0);
            let a2f = -TWO_PI_I * pre2 * (2.0 * ge + 8.0 / a + d_q + ell0);
            Ok(([a0, a1, a2, a3], [a0f, a1, a2f, a3]))
        }
        BoundaryCase::V1 => {
            let l0c = 4.0 * ge;
            let m0c = 8.0 * ge * ge + PI * PI / 3.0;
            let n0c = 32.0 / 3.0 * ge.powi(3) + 4.0 / 3.0 * ge * PI * PI + 4.0 / 3.0 * ZETA3;
            let cubic = |x: f64| n0c + m0c * x + 0.5 * l0c * x * x + x.powi(3) / 6.0;
            let quad = |x: f64| 4.0 * m0c + 4.0 * l0c * x + 2.0 * x * x;
            let lin = |x: f64| 16.0 * l0c + 16.0 * x;
            let mk = |x: f64| -> [C64; 4] {
                [
                    -TWO_PI_I * cubic(x),
                    TWO_PI_I * quad(x),
                    -TWO_PI_I * lin(x),
                    TWO_PI_I * 64.0,
                ]
            };
            Ok((mk(ell), mk(ell0)))
        }
        BoundaryCase::V2 => {
            let s1 = gamma_fn(-0.5)?.powi(2);
            let th = -0.5 * s1; // T(1/2) = -t Γ(-t)² at t = 1/2
            let d_s = -2.0 * digamma(-0.5)?;
            let d_t = 2.0 - 2.0 * digamma(-0.5)?;
            let t2 = t * t;
            let t4 = t2 * t2;
            let a0 = -TWO_PI_I * (t4 / 64.0) * s1;
            let a1 = -TWO_PI_I * (t2 / 16.0) * th * (2.0 * ge + d_t + ell);
            let a2 = TWO_PI_I * (t2 / 4.0) * th;
            let a3 = TWO_PI_I * (t4 / 256.0) * s1 * (2.0 * ge - 1.0 + d_s + ell);
            let a1f = -TWO_PI_I * (t2 / 16.0) * th * (2.0 * ge + 2.0 + d_t + ell0);
            let a3f = TWO_PI_I * (t4 / 256.0) * s1 * (2.0 * ge + 4.0 + d_s + ell0);
            Ok(([a0, a1, a2, a3], [a0, a1f, a2, a3f]))
        }
        _ => unreachable!(),
    }
}

fn a_matrix(case: BoundaryCase, s: &[C64; 4]) -> Mat4 {
    let z = C64::new(0.0, 0.0);
    match case {
        BoundaryCase::E1 => Mat4::from_rows([
            [s[0], z, z, z],
            [z, s[2], z, z],
            [z, s[1], s[2], z],
            [z, z, z, s[3]],
        ]),
        BoundaryCase::E3 => Mat4::from_rows([
            [s[1], z, z, z],
            [s[0], s[1], z, z],
            [z, z, s[3], z],
            [z, z, s[2], s[3]],
        ]),
        BoundaryCase::V1 => Mat4::from_rows([
            [s[3], z, z, z],
            [s[2], s[3], z, z],
            [s[1], s[2], s[3], z],
            [s[0], s[1], s[2], s[3]],
        ]),
        BoundaryCase::V2 => Mat4::from_rows([
            [s[0], z, z, s[3]],
            [z, s[2], z, z],
            [z, s[1], s[2], z],
            [z, z, z, s[0]],
        ]),
        _ => unreachable!(),
    }
}

fn check(label: &str, residual: f64, scale: f64, tol: f64) -> Result<()> {
    if residual <= tol * scale.max(1.0) {
        Ok(())
    } else {
        Err(Error::StructureInconsistent(format!("{label}: residual {residual:.3e} (scale {scale:.3e})")))
    }
}

/// Build every resonant matrix for `case` at weight data `w` and
/// evaluation time `t`, verifying the internal identities.
pub fn resonant_structure(case: BoundaryCase, w: &WeightData, t: f64) -> Result<ResonantParts> {
    match case {
        BoundaryCase::E1 | BoundaryCase::E3 | BoundaryCase::V1 | BoundaryCase::V2 => {}
        BoundaryCase::Interior => return Err(Error::WrongCase("interior")),
        _ => return Err(Error::WrongCase("reflect E2/V3 onto E1/V1")),
    }
    let a = 2.0 * w.m[0] + 3.0;
    let e = e_pattern(case);
    let phi = f_table(case, a, t);
    let chat = w.chat();
    let f_diag = Mat4::diag_re([
        chat[0] / chat[0] * phi[0],
        chat[1] / chat[0] * phi[1],
        chat[2] / chat[0] * phi[2],
        chat[3] / chat[0] * phi[3],
    ]);
    let u = u_matrix(case, a);
    let m_route1 = f_diag * e * f_diag.inverse()?;
    let chat_diag = Mat4::diag_re(chat);
    let m_route2 = -(chat_diag * e * chat_diag.inverse()?);
    check("M = FEF^-1 vs -chat E chat^-1", (m_route1 - m_route2).frobenius_norm(), m_route1.frobenius_norm(), 1e-12)?;
    let m_nilpotent = m_route1;
    let lambda = m_nilpotent.scale(c(-w.n_gauge / 4.0));

    let k_tilde = k_tilde(case, w.m[0]);
    let d0 = delta0(case);
    let st = structure();
    check(
        "conj(Ktilde) = -d4 Ktilde Delta0",
        (k_tilde.conj() + st.d4 * k_tilde * d0).frobenius_norm(),
        k_tilde.frobenius_norm(),
        1e-12,
    )?;

    let d1m = delta1(case, w);
    check(
        "Delta1 Lambda = -Lambda Delta1",
        (d1m * lambda + lambda * d1m).frobenius_norm(),
        lambda.frobenius_norm(),
        1e-12,
    )?;

    // nilpotency: M³ = 0 except at V1 where M⁴ = 0, M³ ≠ 0
    let m2 = m_nilpotent * m_nilpotent;
    let m3 = m2 * m_nilpotent;
    if case == BoundaryCase::V1 {
        check("M^4 = 0", (m3 * m_nilpotent).frobenius_norm(), 1.0, 1e-12)?;
        if m3.frobenius_norm() < 1e-12 {
            return Err(Error::StructureInconsistent("V1 must have M^3 != 0".into()));
        }
    } else {
        check("M^3 = 0", m3.frobenius_norm(), 1.0, 1e-12)?;
    }

    let (a_scalars, a_flat_scalars) = a_scalars(case, a, t, w.ell0())?;
    let a_tilde = a_matrix(case, &a_scalars);
    let a_tilde_flat = a_matrix(case, &a_flat_scalars);

    // Ã♭ = Ã z^{(N/4)Eᵀ} Uᵀ at the z determined by t: a joint consistency
    // check of the scalar lists, the pattern E and the loop matrix U.
    let z = z_of_t(w, t);
    let zp = e.transpose().exp_nilpotent(c(w.n_gauge / 4.0 * z.ln()));
    let flat2 = a_tilde * zp * u.transpose();
    check(
        "Aflat = A z^{(N/4)E^T} U^T",
        (a_tilde_flat - flat2).frobenius_norm(),
        a_tilde_flat.frobenius_norm(),
        1e-9,
    )?;

    Ok(ResonantParts {
        case,
        a,
        e_nilpotent: e,
        f_diag,
        u,
        m_nilpotent,
        lambda,
        k_tilde,
        a_tilde,
        a_tilde_flat,
        delta0: d0,
        delta1: d1m,
        a_scalars,
        a_flat_scalars,
        w: *w,
        t,
    })
}

/// z with t = (4/N) c^{1/4} z^{N/4}.
pub fn z_of_t(w: &WeightData, t: f64) -> f64 {
    (w.n_gauge * t / (4.0 * w.c_gauge.powf(0.25))).powf(4.0 / w.n_gauge)
}

impl ResonantParts {
    /// D₁♭ = κ₀ ĉ₀⁻¹ (P K̃)^{-T} (Ã♭)^{-T} F⁻¹ (z-free form).
    pub fn d1_flat(&self, r1: f64) -> Result<Mat4> {
        let p = p_matrix(r1);
        let pk = p * self.k_tilde;
        let pre = kappa0(self.w.m[0]) / self.w.chat0;
        Ok((pk.inv_transpose()? * self.a_tilde_flat.inv_transpose()? * self.f_diag.inverse()?)
            .scale(pre))
    }

    /// D₁ = D₁♭ z^{-Λ} at the z corresponding to the stored t.
    pub fn d1(&self, r1: f64) -> Result<Mat4> {
        let z = z_of_t(&self.w, self.t);
        let zl = self.lambda.exp_nilpotent(c(-z.ln()));
        Ok(self.d1_flat(r1)? * zl)
    }

    /// ω^{s·M} for the stored nilpotent M.
    pub fn omega_pow_m(&self, s: f64) -> Mat4 {
        self.m_nilpotent.exp_nilpotent(ELL_OMEGA * s)
    }

    /// The matrix 𝓔𝓕 from the flat data:
    /// 𝓔𝓕 = -((Δ₀ Ã♭ F Δ₁ᵀ F⁻¹ (Ã♭)⁻¹)ᵀ).
    pub fn ef_from_matrices(&self) -> Result<Mat4> {
        let x = self.delta0
            * self.a_tilde_flat
            * self.f_diag
            * self.delta1.transpose()
            * self.f_diag.inverse()?
            * self.a_tilde_flat.inverse()?;
        Ok(-x.transpose())
    }

    /// The matrix 𝓔𝓕 assembled from the scalar e/f parameters.
    pub fn ef_from_params(&self) -> Result<(Mat4, ConnectionParams)> {
        let params = resonant_connection_params(self.case, &self.w)?;
        let one = c(1.0);
        let ef = match params {
            ConnectionParams::Edge { case: BoundaryCase::E1, e1, f1 } => {
                let e = Mat4::diag([c(e1), one, one, c(1.0 / e1)]);
                let mut f = Mat4::identity();
                f.e[1][2] = c(f1);
                e * f
            }
            ConnectionParams::Edge { case: BoundaryCase::E3, e1, f1 } => {
                let e = Mat4::diag([c(e1), c(e1), c(1.0 / e1), c(1.0 / e1)]);
                let mut f = Mat4::identity();
                f.e[0][1] = c(f1);
                f.e[2][3] = c(f1);
                e * f
            }
            ConnectionParams::Vertex { case: BoundaryCase::V1, f1, f2 } => {
                let mut f = Mat4::identity();
                for (i, j) in [(0, 1), (1, 2), (2, 3)] {
                    f.e[i][j] = c(f1);
                }
                for (i, j) in [(0, 2), (1, 3)] {
                    f.e[i][j] = c(0.5 * f1 * f1);
                }
                f.e[0][3] = c(f2);
                f
            }
            ConnectionParams::Vertex { case: BoundaryCase::V2, f1, f2 } => {
                let mut f = Mat4::identity();
                f.e[1][2] = c(f1);
                f.e[3][0] = c(f2);
                f
            }
            _ => return Err(Error::WrongCase("unsupported resonant case")),
        };
        Ok((ef, params))
    }
}

/// The z-free resonant connection matrix D₁♭ for a boundary case, built
/// from the Stokes scalar r₁ of the same point.
pub fn d1_resonant(case: BoundaryCase, w: &WeightData, r1: f64, t: f64) -> Result<Mat4> {
    resonant_structure(case, w, t)?.d1_flat(r1)
}

/// Resonant connection factor computed two ways plus the scalar parameters.
#[derive(Debug, Clone)]
pub struct ResonantE1Factor {
    /// (P K̃)^{-T} 𝓔𝓕 (P K̃)ᵀ with 𝓔𝓕 from Table-4 scalars.
    pub via_params: Mat4,
    /// D₁♭ Δ₁ (D̄₁♭)⁻¹ d₄⁻¹.
    pub via_d1: Mat4,
    pub ef_params: Mat4,
    pub ef_matrices: Mat4,
    pub params: ConnectionParams,
}

impl ResonantE1Factor {
    pub fn route_disagreement(&self) -> f64 {
        (self.ef_params - self.ef_matrices).frobenius_norm()
    }

    /// Residual of the global criterion D₁♭ = d₄ D̄₁♭ Δ₁, expressed through
    /// the factor.
    pub fn global_residual(&self) -> f64 {
        (self.via_d1 - Mat4::identity()).frobenius_norm()
    }
}

/// Resonant connection factor at a boundary point.
pub fn e1_factor_resonant(case: BoundaryCase, w: &WeightData, r1: f64, t: f64) -> Result<ResonantE1Factor> {
    let parts = resonant_structure(case, w, t)?;
    let (ef_params, params) = parts.ef_from_params()?;
    let ef_matrices = parts.ef_from_matrices()?;
    if (ef_params - ef_matrices).frobenius_norm() > 1e-9 * ef_params.frobenius_norm().max(1.0) {
        return Err(Error::StructureInconsistent(format!(
            "EF routes disagree by {:.3e}",
            (ef_params - ef_matrices).frobenius_norm()
        )));
    }
    let st = structure();
    let pk = p_matrix(r1) * parts.k_tilde;
    let via_params = pk.inv_transpose()? * ef_params * pk.transpose();
    let d1f = parts.d1_flat(r1)?;
    let via_d1 = d1f * parts.delta1 * d1f.conj().inverse()? * st.d4.inverse()?;
    Ok(ResonantE1Factor { via_params, via_d1, ef_params, ef_matrices, params })
}

/// Residuals of the resonant D₁ identities (cyclic and anti-symmetry) and
/// the eigenvalue statement for P₁P₁¼Π.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ResonantIdentityResiduals {
    pub cyclic: f64,
    pub anti_symmetry: f64,
    pub eigenvalues_ok: bool,
}

pub fn resonant_identities(parts: &ResonantParts, r1: f64, r2: f64) -> Result<ResonantIdentityResiduals> {
    use super::{char_poly, omega_pow_diag, quartic_roots_match, stokes_pair};
    let st = structure();
    let sm = stokes_pair(r1, r2);
    let d1 = parts.d1(r1)?;
    let m = &parts.w.m;
    // cyclic: D₁⁻¹ (P₁P₁¼Π) D₁ = d₄⁻¹ ω^m ω^M
    let lhs = d1.inverse()? * (sm.p1() * sm.p1q() * st.pi) * d1;
    let rhs = st.d4.inverse()? * omega_pow_diag(m, 1.0) * parts.omega_pow_m(1.0);
    let cyclic = (lhs - rhs).frobenius_norm();
    // anti-symmetry: D₁ = R₁ ¼ d₄ D₁^{-T} ω^{2Mᵀ} ω^{2m} Δ
    let rhs2 = (sm.r_at(4)
        * st.d4
        * d1.inv_transpose()?
        * parts.m_nilpotent.transpose().exp_nilpotent(ELL_OMEGA * 2.0)
        * omega_pow_diag(m, 2.0)
        * st.delta)
        .scale(c(0.25));
    let anti_symmetry = (d1 - rhs2).frobenius_norm();
    // eigenvalues of P₁P₁¼Π equal those of d₄⁻¹ω^m (M is invisible)
    let coeffs = char_poly(&(sm.p1() * sm.p1q() * st.pi));
    let vals = [
        omega_pow(m[0]),
        omega_pow(-1.0 + m[1]),
        omega_pow(-2.0 + m[2]),
        omega_pow(-3.0 + m[3]),
    ];
    let eigenvalues_ok = quartic_roots_match(coeffs, vals, 1e-10);
    Ok(ResonantIdentityResiduals { cyclic, anti_symmetry, eigenvalues_ok })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correspondence::{global_chat_resonant, holo_from_chat};
    use crate::data::{weights, GammaData};
    use crate::monodromy::r_from_m;

    fn boundary_setup(g: GammaData, case: BoundaryCase, ell0: f64) -> WeightData {
        // arbitrary (non-global) boundary holomorphic data with gauge ℓ₀
        let c_gauge = ell0.exp();
        let (chat0, chat1) = global_chat_resonant(&g, case, ell0).unwrap();
        // perturb away from the global values to exercise e != 1, f != 0
        let h = holo_from_chat(&g, chat0 * 1.3, chat1 * 0.8, 1.0, c_gauge).unwrap();
        weights(&g, &h).unwrap()
    }

    #[test]
    fn structure_invariants_all_cases() {
        for (g, case) in [
            (GammaData::new(1.0, 1.0), BoundaryCase::E1),
            (GammaData::new(0.5, -1.5), BoundaryCase::E3),
            (GammaData::new(3.0, 1.0), BoundaryCase::V1),
            (GammaData::new(-1.0, 1.0), BoundaryCase::V2),
        ] {
            let ell0 = if case == BoundaryCase::V1 { 0.0 } else { -12.0 };
            let w = boundary_setup(g, case, ell0);
            let parts = resonant_structure(case, &w, 1.0).unwrap();
            // E1-specific transcription examples
            if case == BoundaryCase::E1 {
                assert!((parts.u.e[1][2] - c(-2.0 / parts.a)).norm() < 1e-15);
                assert!((parts.e_nilpotent.e[1][2] - c(1.0)).norm() < 1e-15);
            }
            if case == BoundaryCase::V2 {
                assert!((parts.delta0 - Mat4::diag_re([1.0, -1.0, 1.0, -1.0])).frobenius_norm() < 1e-15);
            }
            if case == BoundaryCase::V1 {
                // Ã₃ = 2πi·64·R₀
                assert!((parts.a_scalars[3] - TWO_PI_I * 64.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn ef_routes_agree_off_global() {
        for (g, case) in [
            (GammaData::new(1.0, 1.0), BoundaryCase::E1),
            (GammaData::new(2.0, 1.0), BoundaryCase::E1),
            (GammaData::new(0.5, -1.5), BoundaryCase::E3),
            (GammaData::new(3.0, 1.0), BoundaryCase::V1),
            (GammaData::new(-1.0, 1.0), BoundaryCase::V2),
        ] {
            let ell0 = if case == BoundaryCase::V1 { 0.0 } else { -12.0 };
            let w = boundary_setup(g, case, ell0);
            let parts = resonant_structure(case, &w, 1.0).unwrap();
            let (ef1, _) = parts.ef_from_params().unwrap();
            let ef2 = parts.ef_from_matrices().unwrap();
            let r = (ef1 - ef2).frobenius_norm() / ef1.frobenius_norm();
            assert!(r < 1e-11, "{case:?}: EF route disagreement {r}");
        }
    }

    #[test]
    fn global_data_gives_identity_factor() {
        for (g, case) in [
            (GammaData::new(1.0, 1.0), BoundaryCase::E1),
            (GammaData::new(0.5, -1.5), BoundaryCase::E3),
            (GammaData::new(3.0, 1.0), BoundaryCase::V1),
            (GammaData::new(-1.0, 1.0), BoundaryCase::V2),
        ] {
            let ell0 = if case == BoundaryCase::V1 { 0.0 } else { -12.0 };
            let (chat0, chat1) = global_chat_resonant(&g, case, ell0).unwrap();
            let h = holo_from_chat(&g, chat0, chat1, 1.0, ell0.exp()).unwrap();
            let w = weights(&g, &h).unwrap();
            let r = r_from_m(w.m[0], w.m[1]);
            let f = e1_factor_resonant(case, &w, r.s1, 1.0).unwrap();
            assert!(f.global_residual() < 1e-9, "{case:?}: global residual {}", f.global_residual());
            assert!(f.params.global_defect() < 1e-10, "{case:?}: params {:?}", f.params);
        }
    }

    #[test]
    fn d1_flat_is_time_independent() {
        let g = GammaData::new(1.0, 1.0);
        let w = boundary_setup(g, BoundaryCase::E1, -12.0);
        let r = r_from_m(w.m[0], w.m[1]);
        let d_a = d1_resonant(BoundaryCase::E1, &w, r.s1, 1.0).unwrap();
        let d_b = d1_resonant(BoundaryCase::E1, &w, r.s1, 1.7).unwrap();
        let rel = (d_a - d_b).frobenius_norm() / d_a.frobenius_norm();
        assert!(rel < 1e-11, "D1flat moved with t: {rel}");
    }

    #[test]
    fn resonant_identities_hold() {
        for (g, case) in [
            (GammaData::new(2.0, 1.0), BoundaryCase::E1),
            (GammaData::new(0.5, -1.5), BoundaryCase::E3),
            (GammaData::new(3.0, 1.0), BoundaryCase::V1),
            (GammaData::new(-1.0, 1.0), BoundaryCase::V2),
        ] {
            let ell0 = if case == BoundaryCase::V1 { 0.0 } else { -12.0 };
            let w = boundary_setup(g, case, ell0);
            let r = r_from_m(w.m[0], w.m[1]);
            let parts = resonant_structure(case, &w, 1.0).unwrap();
            let ids = resonant_identities(&parts, r.s1, r.s2).unwrap();
            let scale = parts.d1(r.s1).unwrap().frobenius_norm();
            assert!(ids.cyclic < 1e-9 * scale.max(1.0), "{case:?} cyclic {}", ids.cyclic);
            assert!(ids.anti_symmetry < 1e-9 * scale.max(1.0), "{case:?} anti {}", ids.anti_symmetry);
            assert!(ids.eigenvalues_ok, "{case:?} eigenvalues");
        }
    }

    #[test]
    fn wrong_cases_rejected() {
        let g = GammaData::new(-1.0, 0.3);
        let w = boundary_setup(GammaData::new(1.0, 1.0), BoundaryCase::E1, -12.0);
        assert!(matches!(
            resonant_structure(BoundaryCase::E2, &w, 1.0),
            Err(Error::WrongCase(_))
        ));
        let _ = g;
    }
}
