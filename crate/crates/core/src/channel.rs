//! Path-loss models, deployment geometry, line-of-sight steering vectors and
//! seeded Rician channel realizations for the BS–RIS, RIS–UE and BS–UE links.
//!
//! Angles are accepted in degrees everywhere and converted to radians once,
//! at the point where a phase is formed.
//!
//! Two flavours of LoS vector are provided:
//!
//! * [`los_vector_bs_ris`] / [`los_vector_ris_ue`] use a single linear element
//!   index, `h_k = exp(j·2π·δ·(k-1)·ξ/λ)`, with the combined direction term
//!   `ξ = cos(Δθ)·sin(Δφ) + sin(Δθ)`.
//! * [`planar_los_bs_ris`] / [`planar_los_ris_ue`] place the same two terms on
//!   the two axes of the surface: the azimuth term `cos(Δθ)·sin(Δφ)` advances
//!   along the columns and the elevation term `sin(Δθ)` down the rows. These are
//!   the vectors the beam-steering and rate code works with.
//!
//! Planar vectors are stored column-major: element `(row, col)` lives at
//! `k = col·rows + row`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{db_to_linear, Scalar};

/// Speed of light divided by 1 GHz, in meters.
pub const LIGHT_METERS_PER_GHZ: f64 = 0.299_792_458;

/// Element spacing as a fraction of the carrier wavelength.
pub const SPACING_WAVELENGTHS: f64 = 0.125;

/// Seedable generator used for every channel realization.
pub type ChannelRng = ChaCha8Rng;

pub fn channel_rng(seed: u64) -> ChannelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of realization `index` in a Monte-Carlo batch started at `base`.
pub fn realization_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarrierConfig<T> {
    pub frequency_ghz: T,
    pub wavelength_m: T,
    pub bandwidth_hz: T,
}

impl<T: Scalar> CarrierConfig<T> {
    pub fn new(frequency_ghz: T, bandwidth_hz: T) -> Result<Self> {
        if !(frequency_ghz > T::zero()) || !frequency_ghz.is_finite() {
            return Err(domain(format!(
                "carrier frequency must be > 0 GHz, got {frequency_ghz}"
            )));
        }
        if !(bandwidth_hz > T::zero()) || !bandwidth_hz.is_finite() {
            return Err(domain(format!(
                "bandwidth must be > 0 Hz, got {bandwidth_hz}"
            )));
        }
        Ok(Self {
            frequency_ghz,
            wavelength_m: T::lit(LIGHT_METERS_PER_GHZ) / frequency_ghz,
            bandwidth_hz,
        })
    }

    /// Inter-element spacing δ = λ/8.
    pub fn element_spacing_m(&self) -> T {
        self.wavelength_m * T::lit(SPACING_WAVELENGTHS)
    }
}

/// Distances and angles of one BS / RIS / UE deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry<T> {
    pub d_bs_ue_m: T,
    pub d_bs_ris_m: T,
    pub d_ris_ue_m: T,
    /// Angle between the BS–RIS link and the direct BS–UE link.
    pub alpha_deg: T,
    pub phi_bs_deg: T,
    pub theta_bs_deg: T,
    pub theta_ue_deg: T,
    /// UE azimuth; the steering variable, kept within [-80°, 80°].
    pub phi_ue_deg: T,
}

pub const SECTOR_MIN_DEG: f64 = -80.0;
pub const SECTOR_MAX_DEG: f64 = 80.0;

impl<T: Scalar> LinkGeometry<T> {
    /// Builds the triangle from the two BS distances and α; every angle starts at zero.
    pub fn from_alpha(d_bs_ue_m: T, d_bs_ris_m: T, alpha_deg: T) -> Result<Self> {
        let d_ris_ue_m = ris_ue_distance(d_bs_ue_m, d_bs_ris_m, alpha_deg)?;
        let geom = Self {
            d_bs_ue_m,
            d_bs_ris_m,
            d_ris_ue_m,
            alpha_deg,
            phi_bs_deg: T::zero(),
            theta_bs_deg: T::zero(),
            theta_ue_deg: T::zero(),
            phi_ue_deg: T::zero(),
        };
        geom.validate()?;
        Ok(geom)
    }

    /// Uses a tabulated RIS–UE distance instead of the law-of-cosines value.
    pub fn with_ris_ue_distance(mut self, d_ris_ue_m: T) -> Result<Self> {
        self.d_ris_ue_m = d_ris_ue_m;
        self.validate()?;
        Ok(self)
    }

    pub fn with_angles(mut self, phi_bs_deg: T, theta_bs_deg: T, theta_ue_deg: T) -> Self {
        self.phi_bs_deg = phi_bs_deg;
        self.theta_bs_deg = theta_bs_deg;
        self.theta_ue_deg = theta_ue_deg;
        self
    }

    pub fn with_ue_azimuth(mut self, phi_ue_deg: T) -> Self {
        self.phi_ue_deg = phi_ue_deg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [
            ("d_bs_ue_m", self.d_bs_ue_m),
            ("d_bs_ris_m", self.d_bs_ris_m),
            ("d_ris_ue_m", self.d_ris_ue_m),
        ] {
            if !(d > T::zero()) || !d.is_finite() {
                return Err(domain(format!("{name} must be > 0, got {d}")));
            }
        }
        let lo = T::lit(SECTOR_MIN_DEG);
        let hi = T::lit(SECTOR_MAX_DEG);
        if self.phi_ue_deg < lo || self.phi_ue_deg > hi {
            return Err(domain(format!(
                "phi_ue_deg must lie in [-80, 80], got {}",
                self.phi_ue_deg
            )));
        }
        for (name, a) in [
            ("alpha_deg", self.alpha_deg),
            ("phi_bs_deg", self.phi_bs_deg),
            ("theta_bs_deg", self.theta_bs_deg),
            ("theta_ue_deg", self.theta_ue_deg),
        ] {
            if !a.is_finite() {
                return Err(domain(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// Rician K-factors of the three links, in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianParams<T> {
    pub kappa_bs_ris_db: T,
    pub kappa_ris_ue_db: T,
    pub kappa_bs_ue_db: T,
}

impl<T: Scalar> RicianParams<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, k) in [
            ("kappa_bs_ris_db", self.kappa_bs_ris_db),
            ("kappa_ris_ue_db", self.kappa_ris_ue_db),
            ("kappa_bs_ue_db", self.kappa_bs_ue_db),
        ] {
            if !k.is_finite() {
                return Err(domain(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    Los,
    Nlos,
    Mixed,
}

/// Per-element complex coefficients of one link realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelVector<T> {
    pub coefficients: Vec<Complex<T>>,
    pub kind: LinkKind,
}

impl<T: Scalar> ChannelVector<T> {
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Mean of `|h_k|²` over the elements.
    pub fn mean_power(&self) -> T {
        if self.is_empty() {
            return T::zero();
        }
        let sum: T = self.coefficients.iter().map(|c| c.norm_sqr()).sum();
        sum / T::from_count(self.len())
    }
}

/// 3GPP UMi street-canyon path loss in dB; `d_m` in meters, `f_ghz` normalized by 1 GHz.
pub fn path_loss_db<T: Scalar>(d_m: T, f_ghz: T) -> Result<T> {
    if !(d_m >= T::one()) {
        return Err(domain(format!("path loss needs d >= 1 m, got {d_m}")));
    }
    if !(f_ghz > T::zero()) {
        return Err(domain(format!("path loss needs f > 0 GHz, got {f_ghz}")));
    }
    Ok(T::lit(32.4) + T::lit(21.0) * d_m.log10() + T::lit(20.0) * f_ghz.log10())
}

/// Free-space path loss in dB; `d_km` in kilometers, `f_ghz` in GHz.
pub fn fspl_db<T: Scalar>(d_km: T, f_ghz: T) -> Result<T> {
    if !(d_km > T::zero()) || !(f_ghz > T::zero()) {
        return Err(domain(format!(
            "free-space path loss needs positive distance and frequency, got d = {d_km} km, f = {f_ghz} GHz"
        )));
    }
    Ok(T::lit(92.45) + T::lit(20.0) * d_km.log10() + T::lit(20.0) * f_ghz.log10())
}

/// Law of cosines for the RIS–UE leg.
pub fn ris_ue_distance<T: Scalar>(d_bs_ue: T, d_bs_ris: T, alpha_deg: T) -> Result<T> {
    if !(d_bs_ue > T::zero()) || !(d_bs_ris > T::zero()) {
        return Err(domain("distances must be > 0"));
    }
    if !(alpha_deg >= T::zero() && alpha_deg <= T::lit(180.0)) {
        return Err(domain(format!(
            "alpha must lie in [0, 180] deg, got {alpha_deg}"
        )));
    }
    let two = T::lit(2.0);
    let sq = d_bs_ue * d_bs_ue + d_bs_ris * d_bs_ris
        - two * d_bs_ue * d_bs_ris * alpha_deg.to_radians().cos();
    Ok(sq.max(T::zero()).sqrt())
}

/// Linear channel power gain `10^(-pl/10)`.
///
/// The Rician mixture weights `κ/(κ+1) + 1/(κ+1)` sum to one, so κ drops out.
pub fn expected_power_gain<T: Scalar>(pl_db: T) -> T {
    db_to_linear(-pl_db)
}

/// Direction term of a LoS link split over the two axes of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionCosines<T> {
    /// Advances along the columns (azimuth plane).
    pub azimuth: T,
    /// Advances down the rows (elevation plane).
    pub elevation: T,
}

impl<T: Scalar> DirectionCosines<T> {
    /// The scalar ξ used by the single-index LoS vectors.
    pub fn combined(&self) -> T {
        self.azimuth + self.elevation
    }
}

fn direction<T: Scalar>(d_theta_deg: T, d_phi_deg: T) -> DirectionCosines<T> {
    let dt = d_theta_deg.to_radians();
    let dp = d_phi_deg.to_radians();
    DirectionCosines {
        azimuth: dt.cos() * dp.sin(),
        elevation: dt.sin(),
    }
}

/// ξ₁ split: `cos(θ_UE−θ_BS)·sin(φ_UE−φ_BS)` and `sin(θ_UE−θ_BS)`.
pub fn bs_ris_direction<T: Scalar>(geom: &LinkGeometry<T>) -> DirectionCosines<T> {
    direction(
        geom.theta_ue_deg - geom.theta_bs_deg,
        geom.phi_ue_deg - geom.phi_bs_deg,
    )
}

/// ξ₂ split: `cos(θ_UE)·sin(φ_UE)` and `sin(θ_UE)`.
pub fn ris_ue_direction<T: Scalar>(geom: &LinkGeometry<T>) -> DirectionCosines<T> {
    direction(geom.theta_ue_deg, geom.phi_ue_deg)
}

/// Phase advance per element per unit of direction term: `2π·δ/λ`.
pub fn phase_per_element<T: Scalar>(carrier: &CarrierConfig<T>) -> T {
    T::TAU() * carrier.element_spacing_m() / carrier.wavelength_m
}

fn linear_los<T: Scalar>(xi: T, carrier: &CarrierConfig<T>, n_total: usize) -> ChannelVector<T> {
    let step = phase_per_element(carrier) * xi;
    let coefficients = (0..n_total)
        .map(|k| Complex::from_polar(T::one(), step * T::from_count(k)))
        .collect();
    ChannelVector {
        coefficients,
        kind: LinkKind::Los,
    }
}

/// Single-index BS–RIS LoS vector: `h_k = exp(j·2π·δ·(k−1)·ξ₁/λ)`.
pub fn los_vector_bs_ris<T: Scalar>(
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    n_total: usize,
) -> Result<ChannelVector<T>> {
    if n_total == 0 {
        return Err(domain("LoS vector needs at least one element"));
    }
    Ok(linear_los(
        bs_ris_direction(geom).combined(),
        carrier,
        n_total,
    ))
}

/// Single-index RIS–UE LoS vector with ξ₂ = cos θ_UE sin φ_UE + sin θ_UE.
pub fn los_vector_ris_ue<T: Scalar>(
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    n_total: usize,
) -> Result<ChannelVector<T>> {
    if n_total == 0 {
        return Err(domain("LoS vector needs at least one element"));
    }
    Ok(linear_los(
        ris_ue_direction(geom).combined(),
        carrier,
        n_total,
    ))
}

/// Rows × columns layout of a surface; `rows` is N_z, `cols` is N_y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanarArray {
    pub rows: usize,
    pub cols: usize,
}

impl PlanarArray {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(domain(format!(
                "array must be non-empty, got {rows}x{cols}"
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn square(side: usize) -> Result<Self> {
        Self::new(side, side)
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Column-major linear index of `(row, col)`.
    pub fn index(&self, row: usize, col: usize) -> usize {
        col * self.rows + row
    }

    pub fn position(&self, k: usize) -> (usize, usize) {
        (k % self.rows, k / self.rows)
    }
}

/// LoS vector of a planar surface for one direction term.
pub fn planar_los<T: Scalar>(
    dir: DirectionCosines<T>,
    array: PlanarArray,
    carrier: &CarrierConfig<T>,
) -> ChannelVector<T> {
    let step = phase_per_element(carrier);
    let col_step = step * dir.azimuth;
    let row_step = step * dir.elevation;
    let mut coefficients = Vec::with_capacity(array.len());
    for col in 0..array.cols {
        for row in 0..array.rows {
            let phase = col_step * T::from_count(col) + row_step * T::from_count(row);
            coefficients.push(Complex::from_polar(T::one(), phase));
        }
    }
    ChannelVector {
        coefficients,
        kind: LinkKind::Los,
    }
}

pub fn planar_los_bs_ris<T: Scalar>(
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    array: PlanarArray,
) -> ChannelVector<T> {
    planar_los(bs_ris_direction(geom), array, carrier)
}

pub fn planar_los_ris_ue<T: Scalar>(
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    array: PlanarArray,
) -> ChannelVector<T> {
    planar_los(ris_ue_direction(geom), array, carrier)
}

/// One Rician realization `sqrt(L)·(sqrt(κ/(κ+1))·los + sqrt(1/(κ+1))·g)` seeded from `seed`.
pub fn sample_rician<T>(
    los: &ChannelVector<T>,
    kappa_db: T,
    pl_db: T,
    seed: u64,
) -> Result<ChannelVector<T>>
where
    T: Scalar,
    StandardNormal: Distribution<T>,
{
    sample_rician_with(los, kappa_db, pl_db, &mut channel_rng(seed))
}

/// As [`sample_rician`], drawing the scattered part from a caller-owned stream.
///
/// `g` has independent circularly-symmetric entries whose real and imaginary
/// parts are each N(0, 1/2).
pub fn sample_rician_with<T, R>(
    los: &ChannelVector<T>,
    kappa_db: T,
    pl_db: T,
    rng: &mut R,
) -> Result<ChannelVector<T>>
where
    T: Scalar,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if los.kind != LinkKind::Los {
        return Err(domain("Rician sampling needs a LoS-kind vector"));
    }
    if !kappa_db.is_finite() || !pl_db.is_finite() {
        return Err(domain("Rician factor and path loss must be finite"));
    }
    let kappa = db_to_linear(kappa_db);
    // written so that kappa = inf stays finite
    let los_w = (T::one() + kappa.recip()).sqrt().recip();
    let nlos_w = (kappa + T::one()).sqrt().recip();
    let amp = expected_power_gain(pl_db).sqrt();
    let half = T::lit(0.5).sqrt();
    let coefficients = los
        .coefficients
        .iter()
        .map(|&h| {
            let re: T = StandardNormal.sample(rng);
            let im: T = StandardNormal.sample(rng);
            let g = Complex::new(re * half, im * half);
            (h * los_w + g * nlos_w) * amp
        })
        .collect();
    Ok(ChannelVector {
        coefficients,
        kind: LinkKind::Mixed,
    })
}
