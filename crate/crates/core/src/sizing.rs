//! Fair-coverage sizing: the smallest surface whose reflected path delivers at
//! least the power of an unblocked direct link, plus a gain margin.

use serde::{Deserialize, Serialize};

use crate::channel::{CarrierConfig, PlanarArray};
use crate::error::{domain, Result};
use crate::scalar::{db_to_linear, linear_to_db, Scalar};
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainBudget<T> {
    pub g_min_db: T,
    pub margin_db: T,
    pub g_req_db: T,
}

/// Square surface layout derived from a required element count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RisDimensions<T> {
    /// Element count demanded by the gain budget, before squaring off.
    pub n_total: usize,
    pub n_z: usize,
    pub n_y: usize,
    pub spacing_m: T,
    pub edge_m: T,
    /// `None` when the edge is shorter than one wavelength.
    pub beamwidth_deg: Option<T>,
}

impl<T: Scalar> RisDimensions<T> {
    pub fn from_side(n_total: usize, side: usize, carrier: &CarrierConfig<T>) -> Result<Self> {
        if side == 0 {
            return Err(domain("surface side must be at least one element"));
        }
        let spacing_m = carrier.element_spacing_m();
        Ok(Self {
            n_total,
            n_z: side,
            n_y: side,
            spacing_m,
            edge_m: T::from_count(side) * spacing_m,
            beamwidth_deg: beamwidth_deg(side, spacing_m, carrier.wavelength_m).ok(),
        })
    }

    /// A `side × side` surface that needs exactly `side²` elements.
    pub fn square(side: usize, carrier: &CarrierConfig<T>) -> Result<Self> {
        Self::from_side(side * side, side, carrier)
    }

    pub fn from_required(n_total: usize, carrier: &CarrierConfig<T>) -> Result<Self> {
        Self::from_side(n_total, square_side(n_total)?, carrier)
    }

    pub fn array(&self) -> PlanarArray {
        PlanarArray {
            rows: self.n_z,
            cols: self.n_y,
        }
    }

    /// Elements actually placed, `n_z · n_y`.
    pub fn placed(&self) -> usize {
        self.n_z * self.n_y
    }
}

/// Minimum RIS gain (linear) at which the reflected path matches the direct one.
pub fn min_ris_gain<T: Scalar>(g_direct: T, g_bs_ris: T, g_ris_ue: T) -> Result<T> {
    for (name, g) in [
        ("g_direct", g_direct),
        ("g_bs_ris", g_bs_ris),
        ("g_ris_ue", g_ris_ue),
    ] {
        if !(g > T::zero()) {
            return Err(domain(format!("{name} must be > 0, got {g}")));
        }
    }
    Ok(g_direct / (g_bs_ris * g_ris_ue))
}

pub fn required_gain_db<T: Scalar>(g_min_db: T, margin_db: T) -> T {
    g_min_db + margin_db
}

/// `ceil(sqrt(10^(g_req_db/10)))`: the array gain grows with the square of the element count.
pub fn required_elements<T: Scalar>(g_req_db: T) -> Result<usize> {
    if !g_req_db.is_finite() {
        return Err(domain(format!(
            "required gain must be finite, got {g_req_db}"
        )));
    }
    let n = db_to_linear(g_req_db.as_f64()).sqrt().ceil();
    if n > 1e15 {
        return Err(domain(format!(
            "required gain {g_req_db} dB needs an absurd element count"
        )));
    }
    Ok((n as usize).max(1))
}

/// Side of the square layout for `n_total` elements.
///
/// The smallest `s` with `s² ≥ n_total − slack`, where the slack is
/// `min(1e-4·n, sqrt(n))`. A requirement that overshoots a perfect square by a
/// hair (4799 or 4800 against 70² = 4900) keeps the smaller side; anything
/// larger rounds up.
pub fn square_side(n_total: usize) -> Result<usize> {
    if n_total == 0 {
        return Err(domain("element count must be at least 1"));
    }
    let n = n_total as f64;
    let target = n - (1e-4 * n).min(n.sqrt());
    let mut s = target.sqrt().ceil().max(1.0) as usize;
    while s > 1 && (((s - 1) * (s - 1)) as f64) >= target {
        s -= 1;
    }
    while ((s * s) as f64) < target {
        s += 1;
    }
    Ok(s)
}

/// Half-power beamwidth `arcsin(λ / (n_z·δ))` in degrees.
pub fn beamwidth_deg<T: Scalar>(n_z: usize, spacing_m: T, wavelength_m: T) -> Result<T> {
    let edge = T::from_count(n_z) * spacing_m;
    if !(edge >= wavelength_m) || !(wavelength_m > T::zero()) {
        return Err(domain(format!(
            "beamwidth needs an edge of at least one wavelength, got {edge} m against {wavelength_m} m"
        )));
    }
    Ok((wavelength_m / edge).min(T::one()).asin().to_degrees())
}

/// Full sizing chain for one margin.
pub fn size_for_deployment<T: Scalar>(
    scenario: &ScenarioConfig<T>,
    margin_db: T,
) -> Result<(GainBudget<T>, RisDimensions<T>)> {
    let gains = scenario.link_gains()?;
    let g_min_db = linear_to_db(min_ris_gain(
        gains.g_direct,
        gains.g_bs_ris,
        gains.g_ris_ue,
    )?);
    let budget = GainBudget {
        g_min_db,
        margin_db,
        g_req_db: required_gain_db(g_min_db, margin_db),
    };
    let n_total = required_elements(budget.g_req_db)?;
    let dims = RisDimensions::from_required(n_total, &scenario.carrier)?;
    Ok((budget, dims))
}
