//! Noise floor, cascade SNR through the surface and Monte-Carlo rate curves.

use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    channel_rng, path_loss_db, planar_los_bs_ris, planar_los_ris_ue, realization_seed,
    sample_rician_with, ChannelVector,
};
use crate::error::{domain, Result, RisError};
use crate::scalar::{dbm_to_mw, Scalar};
use crate::scenario::ScenarioConfig;
use crate::steering::PhaseShiftMatrix;

pub const DEFAULT_REALIZATIONS: usize = 500;

/// Thermal noise `−174 + 10·log10(B)` dBm.
pub fn noise_power_dbm<T: Scalar>(bandwidth_hz: T) -> Result<T> {
    if !(bandwidth_hz > T::zero()) {
        return Err(domain(format!(
            "bandwidth must be > 0 Hz, got {bandwidth_hz}"
        )));
    }
    Ok(T::lit(-174.0) + T::lit(10.0) * bandwidth_hz.log10())
}

/// `|Σ_k h_k,UE · ψ_k · h_BS,k|²`.
pub fn cascade_power<T: Scalar>(
    h_bs_ris: &ChannelVector<T>,
    psi: &PhaseShiftMatrix<T>,
    h_ris_ue: &ChannelVector<T>,
) -> Result<T> {
    let n = psi.phases.len();
    for v in [h_bs_ris, h_ris_ue] {
        if v.len() != n {
            return Err(RisError::LengthMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    let sum = h_bs_ris
        .coefficients
        .iter()
        .zip(&h_ris_ue.coefficients)
        .zip(&psi.phases)
        .map(|((&a, &b), &p)| a * b * Complex::from_polar(T::one(), p))
        .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
    Ok(sum.norm_sqr())
}

/// Linear SNR of the reflected path.
pub fn cascade_snr<T: Scalar>(
    p_t_dbm: T,
    h_bs_ris: &ChannelVector<T>,
    psi: &PhaseShiftMatrix<T>,
    h_ris_ue: &ChannelVector<T>,
    n0_dbm: T,
) -> Result<T> {
    Ok(dbm_to_mw(p_t_dbm) * cascade_power(h_bs_ris, psi, h_ris_ue)? / dbm_to_mw(n0_dbm))
}

/// Shannon rate `B·log2(1 + snr)` in bits per second.
pub fn achievable_rate<T: Scalar>(snr: T, bandwidth_hz: T) -> Result<T> {
    if !(snr >= T::zero()) {
        return Err(domain(format!("snr must be >= 0, got {snr}")));
    }
    Ok(bandwidth_hz * snr.ln_1p() / T::LN_2())
}

/// A codeword under evaluation, labelled for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct RateDesign<T> {
    pub label: String,
    pub codeword: PhaseShiftMatrix<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCurve<T> {
    pub label: String,
    pub p_t_dbm: Vec<T>,
    pub rate_bps: Vec<T>,
    pub n_realizations: usize,
    pub seed: u64,
}

/// Transmit powers 0, 1, …, 40 dBm.
pub fn default_power_grid<T: Scalar>() -> Vec<T> {
    (0..=40).map(|p| T::lit(p as f64)).collect()
}

/// Mean achievable rate of each design over `n_realizations` Rician draws.
///
/// Realization `i` draws the BS–RIS link and then the RIS–UE link from one
/// stream seeded with `seed + i`, so designs of equal size see the same
/// channels. Path losses follow the street-canyon model at the scenario
/// distances; the direct link is taken as blocked.
pub fn rate_sweep<T>(
    scenario: &ScenarioConfig<T>,
    designs: &[RateDesign<T>],
    p_t_grid_dbm: &[T],
    n_realizations: usize,
    seed: u64,
) -> Result<Vec<RateCurve<T>>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
{
    if n_realizations == 0 {
        return Err(domain("at least one realization is required"));
    }
    scenario.validate()?;
    let geom = &scenario.geometry;
    let carrier = &scenario.carrier;
    let f = carrier.frequency_ghz;
    let pl_bs_ris = path_loss_db(geom.d_bs_ris_m, f)?;
    let pl_ris_ue = path_loss_db(geom.d_ris_ue_m, f)?;
    let n0_mw = dbm_to_mw(noise_power_dbm(carrier.bandwidth_hz)?);
    let p_t_mw: Vec<T> = p_t_grid_dbm.iter().map(|&p| dbm_to_mw(p)).collect();
    let bw = carrier.bandwidth_hz;

    designs
        .iter()
        .map(|design| {
            let array = design.codeword.array;
            let los_bs = planar_los_bs_ris(geom, carrier, array);
            let los_ue = planar_los_ris_ue(geom, carrier, array);
            let per_realization: Vec<Vec<T>> = (0..n_realizations)
                .into_par_iter()
                .map(|i| -> Result<Vec<T>> {
                    let mut rng = channel_rng(realization_seed(seed, i as u64));
                    let h_bs = sample_rician_with(
                        &los_bs,
                        scenario.rician.kappa_bs_ris_db,
                        pl_bs_ris,
                        &mut rng,
                    )?;
                    let h_ue = sample_rician_with(
                        &los_ue,
                        scenario.rician.kappa_ris_ue_db,
                        pl_ris_ue,
                        &mut rng,
                    )?;
                    let gain = cascade_power(&h_bs, &design.codeword, &h_ue)?;
                    p_t_mw
                        .iter()
                        .map(|&p| achievable_rate(p * gain / n0_mw, bw))
                        .collect()
                })
                .collect::<Result<_>>()?;
            let denom = T::from_count(n_realizations);
            let rate_bps = (0..p_t_grid_dbm.len())
                .map(|j| per_realization.iter().map(|r| r[j]).sum::<T>() / denom)
                .collect();
            Ok(RateCurve {
                label: design.label.clone(),
                p_t_dbm: p_t_grid_dbm.to_vec(),
                rate_bps,
                n_realizations,
                seed,
            })
        })
        .collect()
}
