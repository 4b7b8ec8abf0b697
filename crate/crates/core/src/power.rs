//! Panel power model, control-hardware counts and multi-configuration totals.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Scalar;
use crate::sizing::RisDimensions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerModelParams<T> {
    /// FPGA controller, 24 V at 0.2 A.
    pub p_control_w: T,
    /// One unit cell of three PIN diodes.
    pub p_unit_w: T,
    /// One 4-bit shift-register drive.
    pub p_drive_w: T,
    /// Update circuitry per dynamic reconfiguration.
    pub p_update_w: T,
    /// Control signals per drive.
    pub n_s: usize,
}

impl<T: Scalar> Default for PowerModelParams<T> {
    fn default() -> Self {
        Self {
            p_control_w: T::lit(4.8),
            p_unit_w: T::lit(0.015),
            p_drive_w: T::lit(0.075),
            p_update_w: T::lit(0.3),
            n_s: 1,
        }
    }
}

impl<T: Scalar> PowerModelParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("p_control_w", self.p_control_w),
            ("p_unit_w", self.p_unit_w),
            ("p_drive_w", self.p_drive_w),
            ("p_update_w", self.p_update_w),
        ] {
            if !(p >= T::zero()) || !p.is_finite() {
                return Err(domain(format!(
                    "{name} must be a non-negative power, got {p}"
                )));
            }
        }
        if self.n_s == 0 {
            return Err(domain("n_s must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DesignKind {
    /// Correlated elements share one control line per group.
    Connected,
    /// Fully controlled surface sized with the gain margin.
    FullMargin,
    /// Fully controlled surface sized to the bare fair-coverage gain.
    FullMin,
}

impl DesignKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Connected => "connected",
            Self::FullMargin => "full",
            Self::FullMin => "min",
        }
    }

    pub fn is_connected(&self) -> bool {
        matches!(self, Self::Connected)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown<T> {
    pub design_kind: DesignKind,
    pub n_units: usize,
    pub p_control_w: T,
    pub p_circuit_w: T,
    pub p_units_w: T,
    pub p_total_w: T,
}

/// Drive-circuit power `ceil(n_c / (n_divisor · n_s)) · p_drive`.
pub fn circuit_power<T: Scalar>(
    n_c: usize,
    n_divisor: usize,
    n_s: usize,
    p_drive_w: T,
) -> Result<T> {
    if n_divisor == 0 || n_s == 0 {
        return Err(domain(
            "circuit power needs a non-zero divisor and signal count",
        ));
    }
    Ok(T::from_count(n_c.div_ceil(n_divisor * n_s)) * p_drive_w)
}

/// Elements under independent control for a design of the given kind.
fn controlled_units<T>(kind: DesignKind, dims: &RisDimensions<T>) -> usize {
    if kind.is_connected() {
        dims.n_z
    } else {
        dims.n_z * dims.n_y
    }
}

/// Static plus unit-cell power of one panel.
pub fn panel_power<T: Scalar>(
    kind: DesignKind,
    dims: &RisDimensions<T>,
    params: &PowerModelParams<T>,
) -> Result<PowerBreakdown<T>> {
    params.validate()?;
    let n_units = controlled_units(kind, dims);
    if n_units == 0 {
        return Err(domain("panel has no controlled units"));
    }
    let p_circuit_w = circuit_power(n_units, n_units, params.n_s, params.p_drive_w)?;
    let p_units_w = T::from_count(n_units) * params.p_unit_w;
    Ok(PowerBreakdown {
        design_kind: kind,
        n_units,
        p_control_w: params.p_control_w,
        p_circuit_w,
        p_units_w,
        p_total_w: params.p_control_w + p_circuit_w + p_units_w,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlBudget {
    pub loads: usize,
    pub dc_lines: usize,
    pub independent_controls: usize,
    /// Square of the controlled count, the way control signals are sometimes tallied.
    pub paper_notation_count: usize,
}

pub fn control_counts<T>(kind: DesignKind, dims: &RisDimensions<T>) -> ControlBudget {
    let n = controlled_units(kind, dims);
    let paper_notation_count = if kind.is_connected() {
        dims.n_z * dims.n_z
    } else {
        n
    };
    ControlBudget {
        loads: n,
        dc_lines: n,
        independent_controls: n,
        paper_notation_count,
    }
}

/// Power of `n_conf` panels, plus the update circuitry when reconfigured dynamically.
pub fn multi_config_power<T: Scalar>(
    panel_w: T,
    n_conf: usize,
    dynamic: bool,
    params: &PowerModelParams<T>,
) -> Result<T> {
    if n_conf == 0 {
        return Err(domain("at least one configuration is required"));
    }
    let update = if dynamic {
        params.p_update_w
    } else {
        T::zero()
    };
    Ok(T::from_count(n_conf) * panel_w + update)
}

/// One panel reconfigured on the fly: a single panel plus the update circuitry.
///
/// A physically motivated alternative to [`multi_config_power`], which counts
/// every configuration as a separate panel.
pub fn single_panel_dynamic<T: Scalar>(panel_w: T, params: &PowerModelParams<T>) -> T {
    panel_w + params.p_update_w
}

/// `100 · (1 − new / baseline)`.
pub fn reduction_percent<T: Scalar>(new_w: T, baseline_w: T) -> Result<T> {
    if !(baseline_w > T::zero()) {
        return Err(domain(format!(
            "baseline power must be > 0, got {baseline_w}"
        )));
    }
    Ok(T::lit(100.0) * (T::one() - new_w / baseline_w))
}
