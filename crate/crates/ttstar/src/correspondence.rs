//! Closed-form maps between asymptotic data, monodromy scalars, and
//! holomorphic data, in the generic and resonant cases, together with the
//! explicit data of global solutions.
//!
//! Conventions: the diagonal normalization ĉ satisfies ρᵢ = -2 log ĉᵢ, and
//! the connection scalars are
//!
//!   e₁ = ĉ₀⁻² 2^{6-2(a₁+a₂)} Γ((4-a₁)/4)Γ((4-a₂)/4)Γ((4-a₁-a₂)/4)
//!        / [Γ(a₁/4)Γ(a₂/4)Γ((a₁+a₂)/4)]
//!   e₂ = ĉ₁⁻² 2^{2+2a₁-2a₂} Γ(a₁/4)Γ((4-a₂)/4)Γ((4-a₂+a₁)/4)
//!        / [Γ((4-a₁)/4)Γ(a₂/4)Γ((a₂-a₁)/4)]
//!
//! which in γ-form carry the prefactors e^{ρ₀}2^{2γ₀} and e^{ρ₁}2^{2γ₁}.
//! Global solutions are exactly e₁ = e₂ = 1 (generic) or all e = 1, f = 0
//! (resonant).

use crate::data::{
    alpha_from_gamma, classify, reflect, AlphaData, BoundaryCase, GammaData, HoloData, WeightData,
};
use crate::error::Error;
use crate::specfun::{digamma, gamma_fn, ln_gamma_sign, EULER_GAMMA, ZETA3};
use crate::Result;
use serde::Serialize;
use std::f64::consts::{LN_2, PI};

/// Stokes scalars of the associated meromorphic system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StokesData {
    pub s1: f64,
    pub s2: f64,
}

/// Connection-matrix scalars. On the boundary the diagonal parameter set
/// degenerates and unipotent parameters f appear.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConnectionParams {
    Generic { e1: f64, e2: f64 },
    /// Edge cases E1, E3 (and E2 by reflection): one diagonal and one
    /// unipotent parameter.
    Edge { case: BoundaryCase, e1: f64, f1: f64 },
    /// Vertex cases V1, V2 (and V3 by reflection): two unipotent parameters.
    Vertex { case: BoundaryCase, f1: f64, f2: f64 },
}

impl ConnectionParams {
    /// Maximum deviation from the global-solution values (e = 1, f = 0).
    pub fn global_defect(&self) -> f64 {
        match self {
            ConnectionParams::Generic { e1, e2 } => (e1 - 1.0).abs().max((e2 - 1.0).abs()),
            ConnectionParams::Edge { e1, f1, .. } => (e1 - 1.0).abs().max(f1.abs()),
            ConnectionParams::Vertex { f1, f2, .. } => f1.abs().max(f2.abs()),
        }
    }
}

/// Product of gamma factors Π Γ(nᵢ) / Π Γ(dᵢ), accumulated in log space.
fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for &x in num {
        let (l, s) = ln_gamma_sign(x)?;
        ln += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = ln_gamma_sign(x)?;
        ln -= l;
        sign *= s;
    }
    Ok(sign * ln.exp())
}

/// Stokes data from asymptotic data (valid on the closed region).
pub fn stokes_from_gamma(g: &GammaData) -> Result<StokesData> {
    if !g.in_closed_region() {
        return Err(Error::OutsideRegion(g.gamma0, g.gamma1));
    }
    let ca = (PI * (g.gamma0 + 1.0) / 4.0).cos();
    let cb = (PI * (g.gamma1 + 3.0) / 4.0).cos();
    Ok(StokesData { s1: -2.0 * ca - 2.0 * cb, s2: -2.0 - 4.0 * ca * cb })
}

/// Stokes data from the exponent gauge; scale invariant in α.
pub fn stokes_from_alpha(a: &AlphaData) -> Result<StokesData> {
    let n = a.n_total;
    let c0 = (PI * a.alpha0 / n).cos();
    let c2 = (PI * a.alpha2 / n).cos();
    Ok(StokesData { s1: -2.0 * c0 + 2.0 * c2, s2: -2.0 + 4.0 * c0 * c2 })
}

/// ρᵢ = -2 log ĉᵢ.
pub fn rho_from_holo(w: &WeightData) -> (f64, f64) {
    (-2.0 * w.chat0.ln(), -2.0 * w.chat1.ln())
}

fn require_nonresonant(w: &WeightData) -> Result<GammaData> {
    let g = GammaData::new(-2.0 * w.m[0], -2.0 * w.m[1]);
    match classify(&g)? {
        BoundaryCase::Interior => Ok(g),
        _ => Err(Error::ResonantPoint),
    }
}

/// Generic connection scalars from weight data (holomorphic gauge).
pub fn connection_from_holo(w: &WeightData) -> Result<ConnectionParams> {
    require_nonresonant(w)?;
    let [a1, a2, _a3] = w.a;
    let r1 = gamma_ratio(
        &[(4.0 - a1) / 4.0, (4.0 - a2) / 4.0, (4.0 - a1 - a2) / 4.0],
        &[a1 / 4.0, a2 / 4.0, (a1 + a2) / 4.0],
    )?;
    let r2 = gamma_ratio(
        &[a1 / 4.0, (4.0 - a2) / 4.0, (4.0 - a2 + a1) / 4.0],
        &[(4.0 - a1) / 4.0, a2 / 4.0, (a2 - a1) / 4.0],
    )?;
    let e1 = w.chat0.powi(-2) * ((6.0 - 2.0 * (a1 + a2)) * LN_2).exp() * r1;
    let e2 = w.chat1.powi(-2) * ((2.0 + 2.0 * a1 - 2.0 * a2) * LN_2).exp() * r2;
    Ok(ConnectionParams::Generic { e1, e2 })
}

fn asymp_ratios(g0: f64, g1: f64) -> Result<(f64, f64)> {
    let r1 = gamma_ratio(
        &[g0 / 4.0 + 0.25, (g0 + g1) / 8.0 + 0.5, (g0 - g1) / 8.0 + 0.75],
        &[(g1 - g0) / 8.0 + 0.25, -(g0 + g1) / 8.0 + 0.5, -g0 / 4.0 + 0.75],
    )?;
    let r2 = gamma_ratio(
        &[(g1 - g0) / 8.0 + 0.25, (g0 + g1) / 8.0 + 0.5, g1 / 4.0 + 0.75],
        &[-g1 / 4.0 + 0.25, -(g0 + g1) / 8.0 + 0.5, (g0 - g1) / 8.0 + 0.75],
    )?;
    Ok((r1, r2))
}

/// Generic connection scalars from asymptotic data (γ, ρ).
pub fn connection_from_asymptotic(g: &GammaData) -> Result<ConnectionParams> {
    if !g.is_interior() {
        if !g.in_closed_region() {
            return Err(Error::OutsideRegion(g.gamma0, g.gamma1));
        }
        return Err(Error::ResonantPoint);
    }
    let (rho0, rho1) = match (g.rho0, g.rho1) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("asymptotic data requires rho0, rho1".into())),
    };
    let (r1, r2) = asymp_ratios(g.gamma0, g.gamma1)?;
    let e1 = rho0.exp() * (2.0 * g.gamma0 * LN_2).exp() * r1;
    let e2 = rho1.exp() * (2.0 * g.gamma1 * LN_2).exp() * r2;
    Ok(ConnectionParams::Generic { e1, e2 })
}

/// Asymptotic data of the global solution through an interior point.
pub fn global_rho(g: &GammaData) -> Result<(f64, f64)> {
    if !g.is_interior() {
        if !g.in_closed_region() {
            return Err(Error::OutsideRegion(g.gamma0, g.gamma1));
        }
        return Err(Error::ResonantPoint);
    }
    let (r1, r2) = asymp_ratios(g.gamma0, g.gamma1)?;
    Ok((
        -(2.0 * g.gamma0 * LN_2 + r1.ln()),
        -(2.0 * g.gamma1 * LN_2 + r2.ln()),
    ))
}

/// Holomorphic data of the global solution through `g`, in the gauge with
/// total weight `n` and coefficient product `c`.
pub fn global_holo(g: &GammaData, n: f64, c: f64) -> Result<HoloData> {
    match classify(g)? {
        BoundaryCase::Interior => {
            let al = alpha_from_gamma(g)?.rescaled(n);
            let (m0, m1) = (-g.gamma0 / 2.0, -g.gamma1 / 2.0);
            let c0 = n.powf(2.0 * m0)
                * c.powf((1.0 - 2.0 * m0) / 4.0)
                * gamma_ratio(
                    &[al.alpha1 / n, (al.alpha1 + al.alpha2) / n, (al.alpha1 + al.alpha2 + al.alpha3) / n],
                    &[al.alpha0 / n, (al.alpha0 + al.alpha1) / n, (al.alpha0 + al.alpha1 + al.alpha2) / n],
                )?;
            let c2 = n.powf(-2.0 * m1)
                * c.powf((1.0 + 2.0 * m1) / 4.0)
                * gamma_ratio(
                    &[al.alpha3 / n, (al.alpha3 + al.alpha0) / n, (al.alpha3 + al.alpha0 + al.alpha1) / n],
                    &[al.alpha2 / n, (al.alpha2 + al.alpha3) / n, (al.alpha2 + al.alpha3 + al.alpha0) / n],
                )?;
            let c1 = (c / (c0 * c2)).sqrt();
            HoloData::new(c0, c1, c2, c1)
        }
        case => {
            let (chat0, chat1) = global_chat_resonant(g, case, (c / n.powi(4)).ln())?;
            holo_from_chat(g, chat0, chat1, n, c)
        }
    }
}

/// Solve the log-linear system relating (ĉ₀, ĉ₁, product c) to (c₀, c₁, c₂)
/// at a fixed region point.
pub fn holo_from_chat(g: &GammaData, chat0: f64, chat1: f64, n: f64, c: f64) -> Result<HoloData> {
    let m0 = -g.gamma0 / 2.0;
    let m1 = -g.gamma1 / 2.0;
    // rows: ln chat0, ln chat1, ln c in terms of (ln c0, ln c1, ln c2);
    // equivalent to ĉ₀ = c₀^{-1/2} c^{(1-2m₀)/8} (N/4)^{m₀},
    //               ĉ₁ = c₂^{1/2} c^{(-1-2m₁)/8} (N/4)^{m₁}
    let a = [
        [(-3.0 - 2.0 * m0) / 8.0, (2.0 - 4.0 * m0) / 8.0, (1.0 - 2.0 * m0) / 8.0],
        [(-1.0 - 2.0 * m1) / 8.0, (-2.0 - 4.0 * m1) / 8.0, (3.0 - 2.0 * m1) / 8.0],
        [1.0, 2.0, 1.0],
    ];
    let b = [
        chat0.ln() - m0 * (n / 4.0).ln(),
        chat1.ln() - m1 * (n / 4.0).ln(),
        c.ln(),
    ];
    let x = solve3(a, b)?;
    let (c0, c1, c2) = (x[0].exp(), x[1].exp(), x[2].exp());
    HoloData::new(c0, c1, c2, c1)
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Result<[f64; 3]> {
    for k in 0..3 {
        let mut p = k;
        for r in (k + 1)..3 {
            if a[r][k].abs() > a[p][k].abs() {
                p = r;
            }
        }
        if a[p][k].abs() < 1e-14 {
            return Err(Error::InvalidInput("singular gauge system".into()));
        }
        a.swap(p, k);
        b.swap(p, k);
        for r in (k + 1)..3 {
            let f = a[r][k] / a[k][k];
            for cc in k..3 {
                a[r][cc] -= f * a[k][cc];
            }
            b[r] -= f * b[k];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = b[i];
        for j in (i + 1)..3 {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Ok(x)
}

/// Edge parameter a for the resonant cases (after reflecting E2/V3 onto
/// E1/V1): a = 3 - γ₀ on E1 and E3, a = 2 at V2, a = 0 at V1.
pub fn edge_parameter(g: &GammaData, case: BoundaryCase) -> f64 {
    match case {
        BoundaryCase::E1 | BoundaryCase::E3 => 3.0 - g.gamma0,
        BoundaryCase::V2 => 2.0,
        _ => 0.0,
    }
}

/// Diagonal normalization (ĉ₀, ĉ₁) of the global solution in the resonant
/// cases, for the gauge constant ℓ₀ = log(c/N⁴). E2 and V3 are handled by
/// reflecting onto E1/V1 and mapping ĉ back ((ĉ₀,ĉ₁) ↦ (ĉ₁⁻¹,ĉ₀⁻¹)).
pub fn global_chat_resonant(g: &GammaData, case: BoundaryCase, ell0: f64) -> Result<(f64, f64)> {
    match case {
        BoundaryCase::Interior => Err(Error::WrongCase("interior")),
        BoundaryCase::E2 | BoundaryCase::V3 => {
            let gr = reflect(g);
            let (c0, c1) = global_chat_resonant(&gr, case.reflected(), ell0)?;
            Ok((1.0 / c1, 1.0 / c0))
        }
        BoundaryCase::E1 => {
            let a = edge_parameter(g, case);
            // ĉ₀² = -2^{-2-2a} a³ H(a/4)/G(0), H(t)=Γ(-t)Γ(a/8-t)², G(t)=Γ(a/8-t)²Γ(a/4-t)
            let h = gamma_fn(-a / 4.0)? * gamma_fn(-a / 8.0)?.powi(2);
            let gg = gamma_fn(a / 8.0)?.powi(2) * gamma_fn(a / 4.0)?;
            let chat0_sq = -((-2.0 - 2.0 * a) * LN_2).exp() * a.powi(3) * h / gg;
            let chat1_inv_sq =
                -EULER_GAMMA - 4.0 / a - 0.5 * log_deriv_f(a)? - 0.5 * ell0;
            Ok((
                positive_chat(chat0_sq, "chat0^2 (E1)")?.sqrt(),
                positive_chat(chat1_inv_sq, "chat1^-2 (E1)")?.sqrt().recip(),
            ))
        }
        BoundaryCase::E3 => {
            let a = edge_parameter(g, case);
            let q = gamma_fn(-a / 4.0)?.powi(2);
            let p = gamma_fn(a / 4.0)?.powi(2);
            let prod = (-2.0 * a * LN_2).exp() * a * a * q / p; // ĉ₀ĉ₁
            let ratio = -EULER_GAMMA - 2.0 / a + 0.5 * digamma(a / 4.0)? + 0.5 * digamma(-a / 4.0)?
                - 0.5 * ell0; // ĉ₁/ĉ₀
            let prod = positive_chat(prod, "chat0*chat1 (E3)")?;
            let ratio = positive_chat(ratio, "chat1/chat0 (E3)")?;
            Ok(((prod / ratio).sqrt(), (prod * ratio).sqrt()))
        }
        BoundaryCase::V1 => {
            let g_eu = EULER_GAMMA;
            let ratio = 2.0 * g_eu + 0.5 * ell0; // ĉ₁/ĉ₀
            let chat0_inv_sq = 4.0 / 3.0 * g_eu.powi(3)
                + ZETA3 / 24.0
                + g_eu * g_eu * ell0
                + 0.25 * g_eu * ell0 * ell0
                + ell0.powi(3) / 48.0;
            let ratio = positive_chat(ratio, "chat1/chat0 (V1)")?;
            let c0 = positive_chat(chat0_inv_sq, "chat0^-2 (V1)")?.sqrt().recip();
            Ok((c0, c0 * ratio))
        }
        BoundaryCase::V2 => {
            // (log S)'(1) = -2ψ(-1/2), (log T)'(1/2) = 2 - 2ψ(-1/2)
            let psi_m_half = digamma(-0.5)?;
            let chat0_sq = -EULER_GAMMA - 2.0 + psi_m_half - 0.5 * ell0;
            let chat1_inv_sq = -EULER_GAMMA - 1.0 - 0.5 * (2.0 - 2.0 * psi_m_half) - 0.5 * ell0;
            Ok((
                positive_chat(chat0_sq, "chat0^2 (V2)")?.sqrt(),
                positive_chat(chat1_inv_sq, "chat1^-2 (V2)")?.sqrt().recip(),
            ))
        }
    }
}

fn positive_chat(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!(
            "{what} = {v:.6e} is not positive; pick a gauge with smaller log(c/N^4)"
        )))
    }
}

/// (log F)'(a/8) for F(t) = Γ(-t)Γ(a/4-t): -ψ(-a/8) - ψ(a/8).
fn log_deriv_f(a: f64) -> Result<f64> {
    Ok(-digamma(-a / 8.0)? - digamma(a / 8.0)?)
}

/// Connection scalars of a (not necessarily global) boundary solution with
/// diagonal normalization taken from `w`.
pub fn resonant_connection_params(case: BoundaryCase, w: &WeightData) -> Result<ConnectionParams> {
    let ell0 = w.ell0();
    let g = GammaData::new(-2.0 * w.m[0], -2.0 * w.m[1]);
    match case {
        BoundaryCase::Interior => Err(Error::WrongCase("interior")),
        BoundaryCase::E2 | BoundaryCase::V3 => {
            Err(Error::WrongCase("E2/V3 are handled by reflecting onto E1/V1"))
        }
        BoundaryCase::E1 => {
            let a = edge_parameter(&g, case);
            let h = gamma_fn(-a / 4.0)? * gamma_fn(-a / 8.0)?.powi(2);
            let gg = gamma_fn(a / 8.0)?.powi(2) * gamma_fn(a / 4.0)?;
            let e1 = -w.chat0.powi(-2) * ((-2.0 - 2.0 * a) * LN_2).exp() * a.powi(3) * h / gg;
            let f1 = w.chat1.powi(-2) + EULER_GAMMA + 4.0 / a + 0.5 * log_deriv_f(a)? + 0.5 * ell0;
            Ok(ConnectionParams::Edge { case, e1, f1 })
        }
        BoundaryCase::E3 => {
            let a = edge_parameter(&g, case);
            let q = gamma_fn(-a / 4.0)?.powi(2);
            let p = gamma_fn(a / 4.0)?.powi(2);
            let e1 = (2.0f64).powf(-2.0 * a) * a * a * (q / p) / (w.chat0 * w.chat1);
            let f1 = w.chat1 / w.chat0 + EULER_GAMMA + 2.0 / a
                - 0.5 * digamma(a / 4.0)?
                - 0.5 * digamma(-a / 4.0)?
                + 0.5 * ell0;
            Ok(ConnectionParams::Edge { case, e1, f1 })
        }
        BoundaryCase::V1 => {
            let g_eu = EULER_GAMMA;
            let l0c = 4.0 * g_eu;
            let m0c = 8.0 * g_eu * g_eu + PI * PI / 3.0;
            let n0c = 32.0 / 3.0 * g_eu.powi(3) + 4.0 / 3.0 * g_eu * PI * PI + 4.0 / 3.0 * ZETA3;
            let q = -(l0c + ell0) / 4.0; // Ã₂♭/Ã₃
            let a1_over_a3 = (4.0 * m0c + 4.0 * l0c * ell0 + 2.0 * ell0 * ell0) / 64.0;
            let a0_over_a3 = -(n0c + m0c * ell0 + 0.5 * l0c * ell0 * ell0 + ell0.powi(3) / 6.0) / 64.0;
            let p = -w.chat1 / w.chat0; // F₁/F₀
            let f1 = p - 2.0 * q;
            let f2 = -w.chat0.powi(-2) - p * p * q + 2.0 * p * q * q - 2.0 * q.powi(3)
                + 2.0 * a1_over_a3 * q
                - 2.0 * a0_over_a3;
            Ok(ConnectionParams::Vertex { case, f1, f2 })
        }
        BoundaryCase::V2 => {
            let psi_m_half = digamma(-0.5)?;
            let f1 = w.chat1.powi(-2) + EULER_GAMMA + 1.0 + 0.5 * (2.0 - 2.0 * psi_m_half) + 0.5 * ell0;
            let f2 = w.chat0.powi(2) + EULER_GAMMA + 2.0 - psi_m_half + 0.5 * ell0;
            Ok(ConnectionParams::Vertex { case, f1, f2 })
        }
    }
}

/// One channel of a resonant small-x profile:
/// 2(c₀·w₀ + c₁·w₁)(x) = γ_part·ln x + log_factor·ln(poly(L)), L = ln(x/4).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileChannel {
    pub label: String,
    pub coeff: (f64, f64),
    pub gamma_part: f64,
    pub log_factor: f64,
    /// Coefficients of the polynomial in L, ascending degree.
    pub poly: Vec<f64>,
}

impl ProfileChannel {
    pub fn poly_eval(&self, big_l: f64) -> f64 {
        self.poly.iter().rev().fold(0.0, |acc, &c| acc * big_l + c)
    }

    fn poly_deriv(&self, big_l: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.poly.iter().enumerate().skip(1).rev() {
            acc = acc * big_l + k as f64 * c;
        }
        acc
    }

    /// Value of 2(c₀w₀+c₁w₁) at x.
    pub fn value(&self, x: f64) -> f64 {
        let big_l = (x / 4.0).ln();
        self.gamma_part * x.ln() + self.log_factor * self.poly_eval(big_l).ln()
    }

    /// d/dx of 2(c₀w₀+c₁w₁) at x (exact differentiation).
    pub fn deriv(&self, x: f64) -> f64 {
        let big_l = (x / 4.0).ln();
        self.gamma_part / x + self.log_factor * self.poly_deriv(big_l) / (self.poly_eval(big_l) * x)
    }
}

/// Small-x expansion data of the global solution on a boundary component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResonantProfile {
    pub case: BoundaryCase,
    pub channels: Vec<ProfileChannel>,
    /// Error-term class of the expansion; the exponents are not pinned down.
    pub error_class: String,
}

impl ResonantProfile {
    /// (w0, w1, dw0, dw1) at x, solved from the stored channels.
    pub fn state_at(&self, x: f64) -> (f64, f64, f64, f64) {
        // Evaluate the two stored channels and solve the 2x2 system
        // [c00 c01; c10 c11]·(2w0, 2w1) = (val0, val1).
        let ch0 = &self.channels[0];
        let ch1 = &self.channels[1];
        let m = [[ch0.coeff.0, ch0.coeff.1], [ch1.coeff.0, ch1.coeff.1]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let v = [ch0.value(x), ch1.value(x)];
        let d = [ch0.deriv(x), ch1.deriv(x)];
        let w0 = (m[1][1] * v[0] - m[0][1] * v[1]) / (2.0 * det);
        let w1 = (m[0][0] * v[1] - m[1][0] * v[0]) / (2.0 * det);
        let dw0 = (m[1][1] * d[0] - m[0][1] * d[1]) / (2.0 * det);
        let dw1 = (m[0][0] * d[1] - m[1][0] * d[0]) / (2.0 * det);
        (w0, w1, dw0, dw1)
    }
}

/// Small-x profile of the global solution on a boundary component.
///
/// E2/V3 inputs are reflected onto E1/V1 and the resulting channels mapped
/// back through (w₀, w₁) ↦ (-w₁, -w₀), so there is one code path per
/// formula.
pub fn resonant_profile(g: &GammaData, case: BoundaryCase) -> Result<ResonantProfile> {
    let actual = classify(g)?;
    if actual != case {
        return Err(Error::WrongCase(case.name()));
    }
    match case {
        BoundaryCase::Interior => Err(Error::WrongCase("interior")),
        BoundaryCase::E2 | BoundaryCase::V3 => {
            let gr = reflect(g);
            let p = resonant_profile(&gr, case.reflected())?;
            let channels = p
                .channels
                .into_iter()
                .map(|ch| {
                    // 2(c0·w0' + c1·w1')(x) = rhs with w0' = -w1, w1' = -w0
                    let label = match ch.label.as_str() {
                        "w0" => "w1",
                        "w1" => "w0",
                        "w0+w1" => "w0+w1",
                        "w0-w1" => "w0-w1",
                        other => other,
                    };
                    let (sign, coeff) = match ch.label.as_str() {
                        // w0' = -w1: channel in old vars times -1, swap slots
                        "w0" => (-1.0, (0.0, 1.0)),
                        "w1" => (-1.0, (1.0, 0.0)),
                        "w0+w1" => (-1.0, (1.0, 1.0)),
                        "w0-w1" => (1.0, (1.0, -1.0)),
                        _ => (1.0, ch.coeff),
                    };
                    ProfileChannel {
                        label: label.into(),
                        coeff,
                        gamma_part: sign * ch.gamma_part,
                        log_factor: sign * ch.log_factor,
                        poly: ch.poly,
                    }
                })
                .collect();
            Ok(ResonantProfile { case, channels, error_class: p.error_class })
        }
        BoundaryCase::E1 => {
            let g0 = g.gamma0;
            let a = 3.0 - g0;
            // = -2^{2+2a} a^{-3} G(0)/H(a/4) written in elementary factors;
            // Γ((γ₀+5)/8) enters squared
            let const0 = (-2.0 * g0 * LN_2).exp()
                * gamma_ratio(
                    &[(3.0 - g0) / 4.0, (3.0 - g0) / 8.0, (3.0 - g0) / 8.0],
                    &[(g0 + 1.0) / 4.0, (g0 + 5.0) / 8.0, (g0 + 5.0) / 8.0],
                )?;
            let k1 = -EULER_GAMMA - 4.0 / a + 0.5 * digamma((g0 - 3.0) / 8.0)?
                + 0.5 * digamma((3.0 - g0) / 8.0)?;
            Ok(ResonantProfile {
                case,
                channels: vec![
                    ProfileChannel {
                        label: "w0".into(),
                        coeff: (1.0, 0.0),
                        gamma_part: g0,
                        log_factor: 1.0,
                        poly: vec![const0],
                    },
                    ProfileChannel {
                        label: "w1".into(),
                        coeff: (0.0, 1.0),
                        gamma_part: 1.0,
                        log_factor: 1.0,
                        poly: vec![k1, -2.0],
                    },
                ],
                error_class: err_class(),
            })
        }
        BoundaryCase::E3 => {
            let g0 = g.gamma0;
            let a = 3.0 - g0;
            let q = gamma_fn(-a / 4.0)?.powi(2);
            let p = gamma_fn(a / 4.0)?.powi(2);
            let u_inner = (-2.0 * a * LN_2).exp() * a * a * q / p;
            let kv = -EULER_GAMMA - 2.0 / a + 0.5 * digamma((3.0 - g0) / 4.0)?
                + 0.5 * digamma((g0 - 3.0) / 4.0)?;
            Ok(ResonantProfile {
                case,
                channels: vec![
                    ProfileChannel {
                        label: "w0+w1".into(),
                        coeff: (1.0, 1.0),
                        gamma_part: g.gamma0 + g.gamma1,
                        log_factor: -2.0,
                        poly: vec![u_inner],
                    },
                    ProfileChannel {
                        label: "w0-w1".into(),
                        coeff: (1.0, -1.0),
                        gamma_part: 2.0,
                        log_factor: 2.0,
                        poly: vec![kv, -2.0],
                    },
                ],
                error_class: err_class(),
            })
        }
        BoundaryCase::V1 => {
            let ge = EULER_GAMMA;
            Ok(ResonantProfile {
                case,
                channels: vec![
                    ProfileChannel {
                        label: "w0".into(),
                        coeff: (1.0, 0.0),
                        gamma_part: 3.0,
                        log_factor: 1.0,
                        poly: vec![
                            -ZETA3 / 24.0 - 4.0 / 3.0 * ge.powi(3),
                            -4.0 * ge * ge,
                            -4.0 * ge,
                            -4.0 / 3.0,
                        ],
                    },
                    ProfileChannel {
                        label: "w0+w1".into(),
                        coeff: (1.0, 1.0),
                        gamma_part: 4.0,
                        log_factor: 1.0,
                        poly: vec![
                            -ge * ZETA3 / 12.0 + 4.0 / 3.0 * ge.powi(4),
                            16.0 / 3.0 * ge.powi(3) - ZETA3 / 12.0,
                            8.0 * ge * ge,
                            16.0 / 3.0 * ge,
                            4.0 / 3.0,
                        ],
                    },
                ],
                error_class: err_class(),
            })
        }
        BoundaryCase::V2 => {
            // -2γ_eu + 2 log 2 - 2 log x = (-2γ_eu - 2 log 2) - 2L
            let p = vec![-2.0 * EULER_GAMMA - 2.0 * LN_2, -2.0];
            Ok(ResonantProfile {
                case,
                channels: vec![
                    ProfileChannel {
                        label: "w0".into(),
                        coeff: (1.0, 0.0),
                        gamma_part: -1.0,
                        log_factor: -1.0,
                        poly: p.clone(),
                    },
                    ProfileChannel {
                        label: "w1".into(),
                        coeff: (0.0, 1.0),
                        gamma_part: 1.0,
                        log_factor: 1.0,
                        poly: p,
                    },
                ],
                error_class: err_class(),
            })
        }
    }
}

fn err_class() -> String {
    "O(x^k log^l x), k,l > 0 unspecified".into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::weights;

    const SQRT_2: f64 = std::f64::consts::SQRT_2;

    fn interior_points(count: usize, seed: u64) -> Vec<GammaData> {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut pts = Vec::with_capacity(count);
        while pts.len() < count {
            let g0 = -1.0 + 4.0 * next();
            let g1 = (g0 - 2.0) + (3.0 - g0) * next();
            let g = GammaData::new(g0, g1);
            if g.is_interior() {
                pts.push(g);
            }
        }
        pts
    }

    #[test]
    fn stokes_examples() {
        let s = stokes_from_gamma(&GammaData::new(0.0, 0.0)).unwrap();
        assert!(s.s1.abs() < 1e-14 && s.s2.abs() < 1e-14);
        let s = stokes_from_gamma(&GammaData::new(3.0, 1.0)).unwrap();
        assert!((s.s1 - 4.0).abs() < 1e-13 && (s.s2 + 6.0).abs() < 1e-13);
        let s = stokes_from_gamma(&GammaData::new(1.0, 0.0)).unwrap();
        assert!((s.s1 - SQRT_2).abs() < 1e-14 && (s.s2 + 2.0).abs() < 1e-14);
    }

    #[test]
    fn stokes_alpha_examples_and_agreement() {
        let s = stokes_from_alpha(&AlphaData::new(0.25, 0.25, 0.25, 0.25).unwrap()).unwrap();
        assert!(s.s1.abs() < 1e-14 && s.s2.abs() < 1e-14);
        let s = stokes_from_alpha(&AlphaData::new(1.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!((s.s1 - 4.0).abs() < 1e-13 && (s.s2 + 6.0).abs() < 1e-13);

        for g in interior_points(1000, 7) {
            let sa = stokes_from_gamma(&g).unwrap();
            let sb = stokes_from_alpha(&alpha_from_gamma(&g).unwrap()).unwrap();
            assert!((sa.s1 - sb.s1).abs() < 1e-12);
            assert!((sa.s2 - sb.s2).abs() < 1e-12);
        }
    }

    #[test]
    fn stokes_bounds_on_region() {
        for g in interior_points(2000, 99) {
            let s = stokes_from_gamma(&g).unwrap();
            assert!(s.s1 > -4.0 - 1e-12 && s.s1 < 4.0 + 1e-12);
            assert!(s.s2 > -6.0 - 1e-12 && s.s2 < 2.0 + 1e-12);
        }
    }

    #[test]
    fn rho_from_holo_examples() {
        let w = weights(&GammaData::new(0.0, 0.0), &HoloData::unit()).unwrap();
        let (r0, r1) = rho_from_holo(&w);
        assert!(r0.abs() < 1e-14 && r1.abs() < 1e-14);

        // normalized gauge relation e^{ρ0} = c0·2^{-6α0+4α1+2α2}
        let g = GammaData::new(0.7, -0.3);
        let h = HoloData::new(1.3, 0.8, 1.1, 0.8).unwrap().rescaled(1.0);
        let w = weights(&g, &h).unwrap();
        let (r0, r1) = rho_from_holo(&w);
        let al = alpha_from_gamma(&g).unwrap();
        let expect0 = h.c0 * ((-6.0 * al.alpha0 + 4.0 * al.alpha1 + 2.0 * al.alpha2) * LN_2).exp();
        let expect1 = (1.0 / h.c2) * ((-2.0 * al.alpha0 - 4.0 * al.alpha1 + 6.0 * al.alpha2) * LN_2).exp();
        assert!((r0.exp() - expect0).abs() < 1e-12 * expect0.abs());
        assert!((r1.exp() - expect1).abs() < 1e-12 * expect1.abs());
    }

    #[test]
    fn connection_global_fixed_point() {
        for g in interior_points(200, 13) {
            let h = global_holo(&g, 1.0, 1.0).unwrap();
            let w = weights(&g, &h).unwrap();
            match connection_from_holo(&w).unwrap() {
                ConnectionParams::Generic { e1, e2 } => {
                    assert!((e1 - 1.0).abs() < 1e-10, "e1 = {e1} at {g:?}");
                    assert!((e2 - 1.0).abs() < 1e-10, "e2 = {e2} at {g:?}");
                }
                other => panic!("expected generic params, got {other:?}"),
            }
        }
    }

    #[test]
    fn connection_symmetric_point_and_scaling() {
        let g = GammaData::new(0.0, 0.0);
        let w = weights(&g, &HoloData::unit()).unwrap();
        let ConnectionParams::Generic { e1, e2 } = connection_from_holo(&w).unwrap() else {
            panic!()
        };
        assert!((e1 - 1.0).abs() < 1e-13 && (e2 - 1.0).abs() < 1e-13);

        // doubling c0 at fixed product gauge doubles e1 and leaves e2 alone
        let h = HoloData::new(2.0, 1.0 / SQRT_2, 1.0, 1.0 / SQRT_2).unwrap();
        assert!((h.c_prod - 1.0).abs() < 1e-14);
        let w2 = weights(&g, &h).unwrap();
        let ConnectionParams::Generic { e1: e1b, e2: e2b } = connection_from_holo(&w2).unwrap()
        else {
            panic!()
        };
        assert!((e1b - 2.0 * e1).abs() < 1e-12, "e1 doubled: {e1b}");
        assert!((e2b - e2).abs() < 1e-12, "e2 fixed: {e2b}");
    }

    #[test]
    fn composite_identity_holo_vs_asymptotic() {
        for g in interior_points(300, 2024) {
            if g.region_slacks().iter().any(|&s| s < 0.05) {
                continue;
            }
            let c1 = 0.9;
            let h = HoloData::new(1.2, c1, 0.8, c1).unwrap();
            let w = weights(&g, &h).unwrap();
            let (rho0, rho1) = rho_from_holo(&w);
            let ga = GammaData::with_rho(g.gamma0, g.gamma1, rho0, rho1);
            let ConnectionParams::Generic { e1: a1, e2: a2 } =
                connection_from_asymptotic(&ga).unwrap()
            else {
                panic!()
            };
            let ConnectionParams::Generic { e1: b1, e2: b2 } = connection_from_holo(&w).unwrap()
            else {
                panic!()
            };
            assert!((a1 - b1).abs() < 1e-10 * b1.abs().max(1.0), "e1 at {g:?}: {a1} vs {b1}");
            assert!((a2 - b2).abs() < 1e-10 * b2.abs().max(1.0), "e2 at {g:?}: {a2} vs {b2}");
        }
    }

    #[test]
    fn tracy_widom_rho_examples() {
        let (r0, r1) = global_rho(&GammaData::new(0.0, 0.0)).unwrap();
        assert!(r0.abs() < 1e-13 && r1.abs() < 1e-13);

        // frozen from the gamma-product oracle (statrs) below
        let (r0, _) = global_rho(&GammaData::new(1.0, 0.0)).unwrap();
        let sg = statrs::function::gamma::gamma;
        let expect = -(4.0 * sg(0.5) * sg(0.625) * sg(0.875) / (sg(0.125) * sg(0.375) * sg(0.5))).ln();
        assert!((r0 - expect).abs() < 1e-12, "{r0} vs {expect}");
        let frozen = 1.049_509_775_990_278_7; // 25-digit evaluation, frozen
        assert!((r0 - frozen).abs() < 1e-12);
    }

    #[test]
    fn global_rho_consistency_with_connection() {
        for g in interior_points(100, 5) {
            let (r0, r1) = global_rho(&g).unwrap();
            let ga = GammaData::with_rho(g.gamma0, g.gamma1, r0, r1);
            let p = connection_from_asymptotic(&ga).unwrap();
            assert!(p.global_defect() < 1e-10, "defect {} at {g:?}", p.global_defect());
        }
    }

    #[test]
    fn global_rho_reflection_equivariance() {
        for g in interior_points(200, 77) {
            let (r0, r1) = global_rho(&g).unwrap();
            let (s0, s1) = global_rho(&reflect(&g)).unwrap();
            assert!((s0 + r1).abs() < 1e-12, "at {g:?}");
            assert!((s1 + r0).abs() < 1e-12, "at {g:?}");
        }
    }

    #[test]
    fn stokes_reflection_equivariance() {
        for g in interior_points(200, 31) {
            let s = stokes_from_gamma(&g).unwrap();
            let sr = stokes_from_gamma(&reflect(&g)).unwrap();
            assert!((sr.s1 + s.s1).abs() < 1e-12);
            assert!((sr.s2 - s.s2).abs() < 1e-12);
        }
    }

    #[test]
    fn edge_limit_blowup_of_rho1() {
        // approaching the E1 edge γ₁ → 1⁻ the gamma pole makes |ρ₁| diverge,
        // monotonically beyond 1 - 1e-3
        let g0 = 0.5;
        let mut last = 0.0;
        for (i, eps) in [1e-3, 1e-4, 1e-5, 1e-6, 1e-7].iter().enumerate() {
            let (_, r1) = global_rho(&GammaData::new(g0, 1.0 - eps)).unwrap();
            if i > 0 {
                assert!(r1.abs() > last, "not monotone at eps={eps}");
            }
            last = r1.abs();
        }
        assert!(last > 10.0);
    }

    #[test]
    fn global_holo_examples() {
        let h = global_holo(&GammaData::new(0.0, 0.0), 1.0, 1.0).unwrap();
        assert!((h.c0 - 1.0).abs() < 1e-13 && (h.c2 - 1.0).abs() < 1e-13);

        // V1, gauge c = N⁴ so ℓ₀ = 0: ĉ₀⁻² = (4/3)γ³ + ζ(3)/24
        let g = GammaData::new(3.0, 1.0);
        let (chat0, _) = global_chat_resonant(&g, BoundaryCase::V1, 0.0).unwrap();
        let expect = (4.0 / 3.0 * EULER_GAMMA.powi(3) + ZETA3 / 24.0).powf(-0.5);
        assert!((chat0 - expect).abs() < 1e-13, "{chat0} vs {expect}");

        // E1 at a = 2 (γ₀ = 1): ĉ₀² = -2⁻⁶·8·H(1/2)/G(0)
        let g = GammaData::new(1.0, 1.0);
        let (chat0, _) = global_chat_resonant(&g, BoundaryCase::E1, -12.0).unwrap();
        let sg = statrs::function::gamma::gamma;
        let h_half = sg(-0.5) * sg(-0.25) * sg(-0.25);
        let g_zero = sg(0.25) * sg(0.25) * sg(0.5);
        let expect = (-8.0 / 64.0 * h_half / g_zero).sqrt();
        assert!((chat0 - expect).abs() < 1e-13, "{chat0} vs {expect}");
    }

    #[test]
    fn resonant_global_params_vanish() {
        // with ĉ from the global formulas the connection params are e=1, f=0
        for (g, case, ell0) in [
            (GammaData::new(1.0, 1.0), BoundaryCase::E1, -12.0),
            (GammaData::new(2.0, 1.0), BoundaryCase::E1, -12.0),
            (GammaData::new(0.5, -1.5), BoundaryCase::E3, -12.0),
            (GammaData::new(3.0, 1.0), BoundaryCase::V1, 0.0),
            (GammaData::new(-1.0, 1.0), BoundaryCase::V2, -12.0),
        ] {
            let (chat0, chat1) = global_chat_resonant(&g, case, ell0).unwrap();
            let n = 1.0f64;
            let c = (ell0).exp() * n.powi(4);
            let h = holo_from_chat(&g, chat0, chat1, n, c).unwrap();
            let w = weights(&g, &h).unwrap();
            assert!((w.chat0 - chat0).abs() < 1e-10 * chat0, "chat0 round trip at {case:?}");
            assert!((w.chat1 - chat1).abs() < 1e-10 * chat1, "chat1 round trip at {case:?}");
            let p = resonant_connection_params(case, &w).unwrap();
            assert!(p.global_defect() < 1e-10, "defect {} for {case:?}", p.global_defect());
        }
    }

    #[test]
    fn resonant_profile_examples() {
        // V1 cubic channel coefficients
        let p = resonant_profile(&GammaData::new(3.0, 1.0), BoundaryCase::V1).unwrap();
        let ch0 = &p.channels[0];
        assert_eq!(ch0.poly.len(), 4);
        assert!((ch0.poly[0] - (-ZETA3 / 24.0 - 4.0 / 3.0 * EULER_GAMMA.powi(3))).abs() < 1e-15);
        assert!((ch0.poly[3] + 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.channels[1].poly.len(), 5);

        // V2: 2w1 - log x = log(-2γ + 2log2 - 2logx)
        let p = resonant_profile(&GammaData::new(-1.0, 1.0), BoundaryCase::V2).unwrap();
        let x = 1e-3;
        let v = p.channels[1].value(x);
        let expect = x.ln() + (-2.0 * EULER_GAMMA + 2.0 * LN_2 - 2.0 * x.ln()).ln();
        assert!((v - expect).abs() < 1e-12);

        // E1 w0-channel constant: the elementary display (with the squared
        // Γ((γ₀+5)/8) factor) against the -2^{2+2a}a⁻³G(0)/H(a/4) form
        let g0 = 1.0;
        let p = resonant_profile(&GammaData::new(g0, 1.0), BoundaryCase::E1).unwrap();
        let sg = statrs::function::gamma::gamma;
        let expect = 0.25_f64
            * sg((3.0 - g0) / 4.0) * sg((3.0 - g0) / 8.0).powi(2)
            / (sg((g0 + 1.0) / 4.0) * sg((g0 + 5.0) / 8.0).powi(2));
        assert!((p.channels[0].poly[0] - expect).abs() < 1e-12 * expect);

        let a = 3.0 - g0;
        let alt = -(2.0f64).powf(2.0 + 2.0 * a) * a.powi(-3)
            * (sg(a / 8.0).powi(2) * sg(a / 4.0))
            / (sg(-a / 4.0) * sg(-a / 8.0).powi(2));
        assert!((p.channels[0].poly[0] - alt).abs() < 1e-12 * expect);

        // E3 u-channel inner value against its elementary rewrite
        // 2^{4-2a} Γ(1-a/4)²/Γ(a/4)²
        let g0 = 0.5;
        let a = 3.0 - g0;
        let p = resonant_profile(&GammaData::new(g0, g0 - 2.0), BoundaryCase::E3).unwrap();
        let alt = (2.0f64).powf(4.0 - 2.0 * a) * sg(1.0 - a / 4.0).powi(2) / sg(a / 4.0).powi(2);
        assert!((p.channels[0].poly[0] - alt).abs() < 1e-12 * alt.abs());
    }

    #[test]
    fn resonant_profile_degrees() {
        let deg = |g: GammaData, case: BoundaryCase| {
            resonant_profile(&g, case)
                .unwrap()
                .channels
                .iter()
                .map(|c| c.poly.len() - 1)
                .collect::<Vec<_>>()
        };
        assert_eq!(deg(GammaData::new(0.5, 1.0), BoundaryCase::E1), vec![0, 1]);
        assert_eq!(deg(GammaData::new(0.5, -1.5), BoundaryCase::E3), vec![0, 1]);
        assert_eq!(deg(GammaData::new(3.0, 1.0), BoundaryCase::V1), vec![3, 4]);
        assert_eq!(deg(GammaData::new(-1.0, 1.0), BoundaryCase::V2), vec![1, 1]);
    }

    #[test]
    fn resonant_profile_reflects() {
        // E2 = reflected E1: profiles related by (w0,w1) -> (-w1,-w0)
        let g = GammaData::new(-1.0, 0.4);
        let p2 = resonant_profile(&g, BoundaryCase::E2).unwrap();
        let p1 = resonant_profile(&reflect(&g), BoundaryCase::E1).unwrap();
        let x = 2e-4;
        let (a0, a1, da0, da1) = p2.state_at(x);
        let (b0, b1, db0, db1) = p1.state_at(x);
        assert!((a0 + b1).abs() < 1e-12);
        assert!((a1 + b0).abs() < 1e-12);
        assert!((da0 + db1).abs() < 1e-10);
        assert!((da1 + db0).abs() < 1e-10);
    }

    #[test]
    fn wrong_case_errors() {
        assert!(matches!(
            resonant_profile(&GammaData::new(0.0, 0.0), BoundaryCase::E1),
            Err(Error::WrongCase(_))
        ));
        let w = weights(&GammaData::new(0.3, 1.0), &HoloData::unit()).unwrap();
        assert!(matches!(connection_from_holo(&w), Err(Error::ResonantPoint)));
    }
}
