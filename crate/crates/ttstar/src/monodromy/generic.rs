//! Generic (interior, non-resonant) connection matrix D₁ and the
//! connection-matrix factor carrying (e₁, e₂).

use super::{k_matrix, kappa0, p_matrix, structure};
use crate::barnes::{taylor_coefficients, BarnesSpec};
use crate::correspondence::{connection_from_holo, ConnectionParams, StokesData};
use crate::data::{BoundaryCase, WeightData};
use crate::error::Error;
use crate::linalg::{C64, Mat4};
use crate::Result;

/// The pieces of the generic D₁ = κ₀ (PK)^{-T} Γ⁻¹ ĉ⁻¹.
#[derive(Debug, Clone)]
pub struct GenericD1Parts {
    pub kappa0: C64,
    pub p: Mat4,
    pub k: Mat4,
    pub gamma_diag: Mat4,
    pub chat_diag: Mat4,
    pub d1: Mat4,
}

fn require_interior(w: &WeightData) -> Result<()> {
    let g = crate::data::GammaData::new(-2.0 * w.m[0], -2.0 * w.m[1]);
    match crate::data::classify(&g)? {
        BoundaryCase::Interior => Ok(()),
        _ => Err(Error::ResonantPoint),
    }
}

/// Assemble the generic connection matrix and its factors.
pub fn d1_generic_parts(w: &WeightData, r: &StokesData) -> Result<GenericD1Parts> {
    require_interior(w)?;
    let spec = BarnesSpec::interior(w.a[0], w.a[1], w.a[2])?;
    let c = taylor_coefficients(&spec)?;
    let [a1, a2, a3] = w.a;
    let gamma_diag = Mat4::diag([
        c[0],
        c[1] * a1,
        c[2] * a2 * (a2 - a1),
        c[3] * a3 * (a3 - a1) * (a3 - a2),
    ]);
    let chat = w.chat();
    let chat_diag = Mat4::diag_re(chat);
    let p = p_matrix(r.s1);
    let k = k_matrix(&w.m);
    let kappa0 = kappa0(w.m[0]);
    let d1 = ((p * k).inv_transpose()? * gamma_diag.inverse()? * chat_diag.inverse()?).scale(kappa0);
    Ok(GenericD1Parts { kappa0, p, k, gamma_diag, chat_diag, d1 })
}

/// D₁ for an interior non-resonant point.
pub fn d1_generic(w: &WeightData, r: &StokesData) -> Result<Mat4> {
    Ok(d1_generic_parts(w, r)?.d1)
}

/// The connection-matrix factor E₁·(E₁^global)⁻¹, computed two ways:
/// from the scalar parameters, and from D₁ via D₁ Δ D̄₁⁻¹ d₄⁻¹. The global
/// normalization E₁^global itself involves data from outside this problem
/// and is kept opaque; all checks use the factor.
#[derive(Debug, Clone)]
pub struct E1Factor {
    /// (PK)^{-T} diag(e₁, e₂, 1/e₂, 1/e₁) (PK)^T.
    pub via_params: Mat4,
    /// D₁ Δ D̄₁⁻¹ d₄⁻¹.
    pub via_d1: Mat4,
    pub params: ConnectionParams,
}

impl E1Factor {
    /// Frobenius distance between the two routes.
    pub fn route_disagreement(&self) -> f64 {
        (self.via_params - self.via_d1).frobenius_norm()
    }

    /// Residual of the global criterion D₁ = d₄ D̄₁ Δ, expressed through the
    /// factor (the factor is the identity exactly for global data).
    pub fn global_residual(&self) -> f64 {
        (self.via_d1 - Mat4::identity()).frobenius_norm()
    }
}

/// Generic connection factor at an interior non-resonant point.
pub fn e1_factor_generic(w: &WeightData, r: &StokesData) -> Result<E1Factor> {
    let parts = d1_generic_parts(w, r)?;
    let st = structure();
    let params = connection_from_holo(w)?;
    let ConnectionParams::Generic { e1, e2 } = params else {
        return Err(Error::ResonantPoint);
    };
    let e_diag = Mat4::diag([
        C64::new(e1, 0.0),
        C64::new(e2, 0.0),
        C64::new(1.0 / e2, 0.0),
        C64::new(1.0 / e1, 0.0),
    ]);
    let pk = parts.p * parts.k;
    let via_params = pk.inv_transpose()? * e_diag * pk.transpose();
    let via_d1 = parts.d1 * st.delta * parts.d1.conj().inverse()? * st.d4.inverse()?;
    Ok(E1Factor { via_params, via_d1, params })
}
