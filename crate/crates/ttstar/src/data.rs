//! The parameter space of radial solutions near t=0 in its three gauges,
//! the boundary classification, and the derived weight data.
//!
//! Solution points live in the closed triangle 0 ≤ γ₀+1 ≤ γ₁+3 ≤ 4. The
//! asymmetric gauge uses (γ₀, γ₁) and optionally (ρ₀, ρ₁); the exponent
//! gauge uses α₀..α₃ with α₁ = α₃ and N = Σαᵢ; the holomorphic gauge uses
//! positive coefficients c₀..c₃ with c₁ = c₃.

use crate::error::Error;
use crate::{Result, EPS_GEO, EPS_RES};
use serde::Serialize;

/// Asymptotic data: 2wᵢ ~ γᵢ log|t| + ρᵢ as t → 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaData {
    pub gamma0: f64,
    pub gamma1: f64,
    pub rho0: Option<f64>,
    pub rho1: Option<f64>,
}

impl GammaData {
    pub fn new(gamma0: f64, gamma1: f64) -> Self {
        Self { gamma0, gamma1, rho0: None, rho1: None }
    }

    pub fn with_rho(gamma0: f64, gamma1: f64, rho0: f64, rho1: f64) -> Self {
        Self { gamma0, gamma1, rho0: Some(rho0), rho1: Some(rho1) }
    }

    /// Signed slack of the three region inequalities; all must be ≥ -ε.
    pub fn region_slacks(&self) -> [f64; 3] {
        [self.gamma0 + 1.0, (self.gamma1 + 3.0) - (self.gamma0 + 1.0), 4.0 - (self.gamma1 + 3.0)]
    }

    pub fn in_closed_region(&self) -> bool {
        self.region_slacks().iter().all(|&s| s >= -EPS_GEO)
    }

    pub fn is_interior(&self) -> bool {
        self.region_slacks().iter().all(|&s| s > EPS_RES)
    }
}

/// Exponent gauge: αᵢ = kᵢ + 1 ≥ 0, α₁ = α₃, N = α₀ + α₁ + α₂ + α₃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaData {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// Total weight; the canonical gauge stores N = 1.
    pub n_total: f64,
}

impl AlphaData {
    pub fn new(alpha0: f64, alpha1: f64, alpha2: f64, alpha3: f64) -> Result<Self> {
        for &a in &[alpha0, alpha1, alpha2, alpha3] {
            if a < -EPS_GEO {
                return Err(Error::NegativeAlpha(a));
            }
        }
        if (alpha1 - alpha3).abs() > 1e-12 * (1.0 + alpha1.abs()) {
            return Err(Error::InvalidInput(format!(
                "anti-symmetry requires alpha1 = alpha3 (got {alpha1} vs {alpha3})"
            )));
        }
        let n_total = alpha0 + alpha1 + alpha2 + alpha3;
        if n_total <= 0.0 {
            return Err(Error::InvalidInput("total alpha weight must be positive".into()));
        }
        Ok(Self { alpha0, alpha1, alpha2, alpha3, n_total })
    }

    /// Same ray in a different gauge, scaled so the total weight is `n`.
    pub fn rescaled(&self, n: f64) -> Self {
        let k = n / self.n_total;
        Self {
            alpha0: self.alpha0 * k,
            alpha1: self.alpha1 * k,
            alpha2: self.alpha2 * k,
            alpha3: self.alpha3 * k,
            n_total: n,
        }
    }

    pub fn k_exponents(&self) -> [f64; 4] {
        [self.alpha0 - 1.0, self.alpha1 - 1.0, self.alpha2 - 1.0, self.alpha3 - 1.0]
    }
}

/// Holomorphic gauge: coefficients cᵢ > 0 of pᵢ(z) = cᵢ z^{αᵢ-1}, c₁ = c₃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HoloData {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    /// Product c₀c₁c₂c₃; the canonical gauge stores 1.
    pub c_prod: f64,
}

impl HoloData {
    pub fn new(c0: f64, c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for &c in &[c0, c1, c2, c3] {
            if c <= 0.0 {
                return Err(Error::InvalidInput(format!("holomorphic coefficients must be positive (got {c})")));
            }
        }
        if (c1 - c3).abs() > 1e-12 * c1 {
            return Err(Error::InvalidInput(format!(
                "anti-symmetry requires c1 = c3 (got {c1} vs {c3})"
            )));
        }
        Ok(Self { c0, c1, c2, c3, c_prod: c0 * c1 * c2 * c3 })
    }

    pub fn unit() -> Self {
        Self { c0: 1.0, c1: 1.0, c2: 1.0, c3: 1.0, c_prod: 1.0 }
    }

    /// Rescale all coefficients by the same factor so the product is `c`.
    pub fn rescaled(&self, c: f64) -> Self {
        let k = (c / self.c_prod).powf(0.25);
        Self { c0: self.c0 * k, c1: self.c1 * k, c2: self.c2 * k, c3: self.c3 * k, c_prod: c }
    }
}

/// Derived weight data consumed by every matrix formula: the exponents
/// m₀..m₃, the normalized exponents a₁..a₃ (a₀ = 0), and the diagonal
/// normalization ĉ₀, ĉ₁ (ĉ₂ = 1/ĉ₁, ĉ₃ = 1/ĉ₀). The gauge constants
/// (N, c) are carried along because several boundary formulas need
/// log(c/N⁴).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightData {
    pub m: [f64; 4],
    pub a: [f64; 3],
    pub chat0: f64,
    pub chat1: f64,
    pub n_gauge: f64,
    pub c_gauge: f64,
}

impl WeightData {
    pub fn a_full(&self) -> [f64; 4] {
        [0.0, self.a[0], self.a[1], self.a[2]]
    }

    pub fn chat(&self) -> [f64; 4] {
        [self.chat0, self.chat1, 1.0 / self.chat1, 1.0 / self.chat0]
    }

    /// log(c / N⁴), the gauge constant entering the boundary formulas.
    pub fn ell0(&self) -> f64 {
        (self.c_gauge / self.n_gauge.powi(4)).ln()
    }
}

/// The six boundary components of the parameter triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundaryCase {
    Interior,
    E1,
    E2,
    E3,
    V1,
    V2,
    V3,
}

impl BoundaryCase {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCase::Interior => "interior",
            BoundaryCase::E1 => "E1",
            BoundaryCase::E2 => "E2",
            BoundaryCase::E3 => "E3",
            BoundaryCase::V1 => "V1",
            BoundaryCase::V2 => "V2",
            BoundaryCase::V3 => "V3",
        }
    }

    /// Image under the reflection (γ₀,γ₁) ↦ (-γ₁,-γ₀).
    pub fn reflected(&self) -> Self {
        match self {
            BoundaryCase::E1 => BoundaryCase::E2,
            BoundaryCase::E2 => BoundaryCase::E1,
            BoundaryCase::V1 => BoundaryCase::V3,
            BoundaryCase::V3 => BoundaryCase::V1,
            other => *other,
        }
    }
}

/// Classify a region point into its boundary component, snapping to
/// edges/vertices within `EPS_RES`.
pub fn classify(g: &GammaData) -> Result<BoundaryCase> {
    if !g.in_closed_region() {
        return Err(Error::OutsideRegion(g.gamma0, g.gamma1));
    }
    let (g0, g1) = (g.gamma0, g.gamma1);
    // distances to the three boundary lines
    let d_top = (g1 - 1.0).abs(); // E1: γ₁ = 1
    let d_left = (g0 + 1.0).abs(); // E2: γ₀ = -1
    let d_diag = (g1 - (g0 - 2.0)).abs(); // E3: γ₁ = γ₀ - 2
    let on_top = d_top <= EPS_RES;
    let on_left = d_left <= EPS_RES;
    let on_diag = d_diag <= EPS_RES;
    Ok(match (on_top, on_left, on_diag) {
        (true, false, true) => BoundaryCase::V1,  // (3, 1)
        (true, true, false) => BoundaryCase::V2,  // (-1, 1)
        (false, true, true) => BoundaryCase::V3,  // (-1, -3)
        (true, false, false) => BoundaryCase::E1,
        (false, true, false) => BoundaryCase::E2,
        (false, false, true) => BoundaryCase::E3,
        (false, false, false) => BoundaryCase::Interior,
        (true, true, true) => unreachable!("the three lines have no common point"),
    })
}

/// γ ↦ α in the canonical gauge N = 1, by the closed-form inverse of the
/// linear system relating the two gauges.
pub fn alpha_from_gamma(g: &GammaData) -> Result<AlphaData> {
    if !g.in_closed_region() {
        return Err(Error::OutsideRegion(g.gamma0, g.gamma1));
    }
    let a0 = ((g.gamma0 + 1.0) / 4.0).max(0.0);
    let a2 = ((1.0 - g.gamma1) / 4.0).max(0.0);
    let a13 = ((g.gamma1 - g.gamma0 + 2.0) / 8.0).max(0.0);
    AlphaData::new(a0, a13, a2, a13)
}

/// α ↦ γ; scale invariant in α.
pub fn gamma_from_alpha(a: &AlphaData) -> Result<GammaData> {
    let n = a.n_total;
    let g0 = (3.0 * a.alpha0 - 2.0 * a.alpha1 - a.alpha2) / n;
    let g1 = (a.alpha0 + 2.0 * a.alpha1 - 3.0 * a.alpha2) / n;
    Ok(GammaData::new(g0, g1))
}

/// Weight data (m, a, ĉ) for a region point with holomorphic coefficients.
pub fn weights(g: &GammaData, h: &HoloData) -> Result<WeightData> {
    let alpha = alpha_from_gamma(g)?;
    let n = alpha.n_total;
    let m0 = -g.gamma0 / 2.0;
    let m1 = -g.gamma1 / 2.0;
    let m = [m0, m1, -m1, -m0];
    let a = [
        4.0 / n * alpha.alpha1,
        4.0 / n * (alpha.alpha1 + alpha.alpha2),
        4.0 / n * (alpha.alpha1 + alpha.alpha2 + alpha.alpha3),
    ];
    let c = h.c_prod;
    let chat0 = h.c0.powf(-0.5) * c.powf((1.0 - 2.0 * m0) / 8.0) * (n / 4.0).powf(m0);
    let chat1 = h.c2.powf(0.5) * c.powf((-1.0 - 2.0 * m1) / 8.0) * (n / 4.0).powf(m1);
    Ok(WeightData { m, a, chat0, chat1, n_gauge: n, c_gauge: c })
}

/// The solution symmetry w ↦ ΔwΔ on parameters: (γ₀,γ₁) ↦ (-γ₁,-γ₀),
/// (ρ₀,ρ₁) ↦ (-ρ₁,-ρ₀).
pub fn reflect(g: &GammaData) -> GammaData {
    GammaData {
        gamma0: -g.gamma1,
        gamma1: -g.gamma0,
        rho0: g.rho1.map(|r| -r),
        rho1: g.rho0.map(|r| -r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&GammaData::new(0.0, 0.0)).unwrap(), BoundaryCase::Interior);
        assert_eq!(classify(&GammaData::new(3.0, 1.0)).unwrap(), BoundaryCase::V1);
        assert_eq!(classify(&GammaData::new(0.5, -1.5)).unwrap(), BoundaryCase::E3);
        assert_eq!(classify(&GammaData::new(-1.0, 1.0)).unwrap(), BoundaryCase::V2);
        assert_eq!(classify(&GammaData::new(-1.0, -3.0)).unwrap(), BoundaryCase::V3);
        assert_eq!(classify(&GammaData::new(1.0, 1.0)).unwrap(), BoundaryCase::E1);
        assert_eq!(classify(&GammaData::new(-1.0, 0.0)).unwrap(), BoundaryCase::E2);
        assert!(matches!(
            classify(&GammaData::new(5.0, 0.0)),
            Err(Error::OutsideRegion(_, _))
        ));
    }

    #[test]
    fn classify_snaps_near_boundary() {
        assert_eq!(classify(&GammaData::new(0.7, 1.0 - 1e-9)).unwrap(), BoundaryCase::E1);
        assert_eq!(classify(&GammaData::new(0.7, 1.0 - 1e-6)).unwrap(), BoundaryCase::Interior);
    }

    #[test]
    fn alpha_from_gamma_examples() {
        let a = alpha_from_gamma(&GammaData::new(0.0, 0.0)).unwrap();
        assert!((a.alpha0 - 0.25).abs() < 1e-15);
        assert!((a.alpha1 - 0.25).abs() < 1e-15);
        assert!((a.alpha2 - 0.25).abs() < 1e-15);
        assert!((a.alpha3 - 0.25).abs() < 1e-15);

        let a = alpha_from_gamma(&GammaData::new(3.0, 1.0)).unwrap();
        assert!((a.alpha0 - 1.0).abs() < 1e-15);
        assert!(a.alpha1.abs() < 1e-15 && a.alpha2.abs() < 1e-15);

        let a = alpha_from_gamma(&GammaData::new(-1.0, 1.0)).unwrap();
        assert!(a.alpha0.abs() < 1e-15 && a.alpha2.abs() < 1e-15);
        assert!((a.alpha1 - 0.5).abs() < 1e-15 && (a.alpha3 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn gamma_from_alpha_examples_and_scale_invariance() {
        let g = gamma_from_alpha(&AlphaData::new(0.25, 0.25, 0.25, 0.25).unwrap()).unwrap();
        assert!(g.gamma0.abs() < 1e-15 && g.gamma1.abs() < 1e-15);

        let g = gamma_from_alpha(&AlphaData::new(1.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!((g.gamma0 - 3.0).abs() < 1e-15 && (g.gamma1 - 1.0).abs() < 1e-15);

        let a5 = AlphaData::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let a1 = a5.rescaled(1.0);
        let g5 = gamma_from_alpha(&a5).unwrap();
        let g1 = gamma_from_alpha(&a1).unwrap();
        assert!((g5.gamma0 - g1.gamma0).abs() < 1e-15);
        assert!((g5.gamma1 - g1.gamma1).abs() < 1e-15);
    }

    #[test]
    fn round_trip_on_region_grid() {
        for i in 0..=100 {
            for j in 0..=100 {
                let g0 = -1.0 + 4.0 * i as f64 / 100.0;
                let g1 = (g0 - 2.0) + (3.0 - g0) * j as f64 / 100.0;
                let g = GammaData::new(g0, g1);
                if !g.in_closed_region() {
                    continue;
                }
                let a = alpha_from_gamma(&g).unwrap();
                let back = gamma_from_alpha(&a).unwrap();
                assert!((back.gamma0 - g0).abs() < 1e-14, "g0 at ({g0},{g1})");
                assert!((back.gamma1 - g1).abs() < 1e-14, "g1 at ({g0},{g1})");
                // interior ⇔ all alpha strictly positive ⇔ strict inequalities
                let interior = g.region_slacks().iter().all(|&s| s > 1e-9);
                let alpha_pos = [a.alpha0, a.alpha1, a.alpha2, a.alpha3].iter().all(|&x| x > 1e-10);
                assert_eq!(interior, alpha_pos, "at ({g0},{g1})");
            }
        }
    }

    #[test]
    fn weights_examples() {
        let w = weights(&GammaData::new(0.0, 0.0), &HoloData::unit()).unwrap();
        assert!(w.m.iter().all(|&m| m.abs() < 1e-15));
        assert!((w.a[0] - 1.0).abs() < 1e-14);
        assert!((w.a[1] - 2.0).abs() < 1e-14);
        assert!((w.a[2] - 3.0).abs() < 1e-14);
        assert!((w.chat0 - 1.0).abs() < 1e-15);
        assert!((w.chat1 - 1.0).abs() < 1e-15);

        let w = weights(&GammaData::new(3.0, 1.0), &HoloData::unit()).unwrap();
        assert_eq!(w.m, [-1.5, -0.5, 0.5, 1.5]);
        assert!(w.a.iter().all(|&a| a.abs() < 1e-14));

        // interior of the top edge: a = (a/2, a/2, a) with a = 2m₀ + 3
        let w = weights(&GammaData::new(0.4, 1.0), &HoloData::unit()).unwrap();
        let a_edge = 2.0 * w.m[0] + 3.0;
        assert!((w.a[0] - a_edge / 2.0).abs() < 1e-14);
        assert!((w.a[1] - a_edge / 2.0).abs() < 1e-14);
        assert!((w.a[2] - a_edge).abs() < 1e-14);
    }

    #[test]
    fn weights_identities_random() {
        let mut state = 0x243f_6a88_85a3_08d3_u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..500 {
            let g0 = -1.0 + 4.0 * next();
            let g1 = (g0 - 2.0) + (3.0 - g0) * next();
            let g = GammaData::new(g0, g1);
            let c1 = 0.5 + next();
            let h = HoloData::new(0.5 + next(), c1, 0.5 + next(), c1).unwrap();
            let w = weights(&g, &h).unwrap();
            assert!((w.m[0] + w.m[3]).abs() < 1e-15);
            assert!((w.m[1] + w.m[2]).abs() < 1e-15);
            for i in 1..4 {
                let ai = w.m[0] - w.m[i] + i as f64;
                assert!((w.a[i - 1] - ai).abs() < 1e-13, "a_{i} identity");
            }
        }
    }

    #[test]
    fn reflect_examples() {
        let r = reflect(&GammaData::new(-1.0, -3.0));
        assert_eq!((r.gamma0, r.gamma1), (3.0, 1.0));
        let r = reflect(&GammaData::new(0.0, 0.0));
        assert_eq!((r.gamma0, r.gamma1), (0.0, 0.0));
        let r = reflect(&GammaData::new(-1.0, 0.3));
        assert_eq!(classify(&r).unwrap(), BoundaryCase::E1);
        // classify ∘ reflect = reflected ∘ classify on boundary points
        for &(g0, g1) in &[(-1.0, 0.2), (1.2, 1.0), (0.3, -1.7), (3.0, 1.0), (-1.0, 1.0), (-1.0, -3.0)] {
            let g = GammaData::new(g0, g1);
            let lhs = classify(&reflect(&g)).unwrap();
            let rhs = classify(&g).unwrap().reflected();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rho_reflects_with_swap_and_sign() {
        let g = GammaData::with_rho(0.5, -0.25, 1.5, -2.5);
        let r = reflect(&g);
        assert_eq!(r.rho0, Some(2.5));
        assert_eq!(r.rho1, Some(-1.5));
    }
}
