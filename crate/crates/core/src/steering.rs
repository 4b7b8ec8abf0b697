//! Steering codewords, azimuth gain patterns, the coverage sweep and the
//! codeword-count walk.
//!
//! The RIS gain toward azimuth φ is the squared magnitude of the LoS array
//! factor with the applied phase profile,
//! `G(φ) = |Σ_k ψ_k · h_BS,k(φ) · h_k,UE(φ)|²`, so a codeword matched to φ
//! peaks at `N_total²`. Both LoS vectors are evaluated at the evaluation
//! azimuth with the fixed BS and UE elevations of the geometry.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channel::ris_ue_direction;
use crate::channel::{
    bs_ris_direction, phase_per_element, planar_los_bs_ris, planar_los_ris_ue, CarrierConfig,
    ChannelVector, LinkGeometry, PlanarArray, SECTOR_MAX_DEG, SECTOR_MIN_DEG,
};
use crate::error::{Result, RisError};
use crate::scalar::{linear_to_db, wrap_two_pi, Scalar};

/// Gains at exact nulls are clamped to this level.
pub const NULL_FLOOR_DB: f64 = -400.0;

/// Slack allowed when comparing the gain at the steering angle with a threshold.
pub const EQUALITY_TOL_DB: f64 = 0.01;

/// Upper bound on the codewords a sweep or count may emit.
pub const MAX_CODEWORDS: usize = 10_000;

/// One codeword: unit-modulus reflection phases stored column-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftMatrix<T> {
    pub array: PlanarArray,
    /// Radians in `[0, 2π)`, element `(row, col)` at `col·rows + row`.
    pub phases: Vec<T>,
    pub steering_angle_deg: T,
}

impl<T: Scalar> PhaseShiftMatrix<T> {
    pub fn new(array: PlanarArray, phases: Vec<T>, steering_angle_deg: T) -> Result<Self> {
        if phases.len() != array.len() {
            return Err(RisError::LengthMismatch {
                expected: array.len(),
                actual: phases.len(),
            });
        }
        Ok(Self {
            array,
            phases: phases.into_iter().map(wrap_two_pi).collect(),
            steering_angle_deg,
        })
    }

    pub fn rows(&self) -> usize {
        self.array.rows
    }

    pub fn cols(&self) -> usize {
        self.array.cols
    }

    pub fn phase(&self, row: usize, col: usize) -> T {
        self.phases[self.array.index(row, col)]
    }

    pub fn coefficient(&self, k: usize) -> Complex<T> {
        Complex::from_polar(T::one(), self.phases[k])
    }

    pub fn coefficients(&self) -> Vec<Complex<T>> {
        (0..self.phases.len())
            .map(|k| self.coefficient(k))
            .collect()
    }

    /// Adds `offset` radians to every element.
    pub fn rotated(&self, offset: T) -> Self {
        Self {
            array: self.array,
            phases: self
                .phases
                .iter()
                .map(|&p| wrap_two_pi(p + offset))
                .collect(),
            steering_angle_deg: self.steering_angle_deg,
        }
    }
}

/// Phase conjugation of the cascade: `ψ_k = −(∠h_BS,k + ∠h_k,UE)`.
pub fn phase_shift_matrix<T: Scalar>(
    h_bs_ris: &ChannelVector<T>,
    h_ris_ue: &ChannelVector<T>,
    array: PlanarArray,
    steering_angle_deg: T,
) -> Result<PhaseShiftMatrix<T>> {
    for v in [h_bs_ris, h_ris_ue] {
        if v.len() != array.len() {
            return Err(RisError::LengthMismatch {
                expected: array.len(),
                actual: v.len(),
            });
        }
    }
    let phases = h_bs_ris
        .coefficients
        .iter()
        .zip(&h_ris_ue.coefficients)
        .map(|(a, b)| -(a.arg() + b.arg()))
        .collect();
    PhaseShiftMatrix::new(array, phases, steering_angle_deg)
}

/// Codeword matched to the LoS channels of a UE at `steering_deg` azimuth.
pub fn matched_codeword<T: Scalar>(
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    array: PlanarArray,
    steering_deg: T,
) -> Result<PhaseShiftMatrix<T>> {
    let g = geom.with_ue_azimuth(steering_deg);
    phase_shift_matrix(
        &planar_los_bs_ris(&g, carrier, array),
        &planar_los_ris_ue(&g, carrier, array),
        array,
        steering_deg,
    )
}

/// Post-processing applied to every matched codeword, e.g. sharing phases within control groups.
pub trait CodewordShaper<T: Scalar> {
    fn shape(&self, psi: PhaseShiftMatrix<T>) -> PhaseShiftMatrix<T>;
}

/// Every element keeps its own phase.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullControl;

impl<T: Scalar> CodewordShaper<T> for FullControl {
    fn shape(&self, psi: PhaseShiftMatrix<T>) -> PhaseShiftMatrix<T> {
        psi
    }
}

/// Array factor of one codeword, pre-reduced over the rows.
///
/// The elevation terms of both links do not depend on the UE azimuth, so each
/// column collapses to one complex weight once per codeword.
struct PatternKernel<T> {
    column_weights: Vec<Complex<T>>,
    step: T,
    geom: LinkGeometry<T>,
}

impl<T: Scalar> PatternKernel<T> {
    fn new(psi: &PhaseShiftMatrix<T>, geom: &LinkGeometry<T>, carrier: &CarrierConfig<T>) -> Self {
        let step = phase_per_element(carrier);
        let row_step = step * (bs_ris_direction(geom).elevation + ris_ue_direction(geom).elevation);
        let column_weights = (0..psi.cols())
            .map(|col| {
                (0..psi.rows())
                    .map(|row| {
                        Complex::from_polar(
                            T::one(),
                            psi.phase(row, col) + row_step * T::from_count(row),
                        )
                    })
                    .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
            })
            .collect();
        Self {
            column_weights,
            step,
            geom: *geom,
        }
    }

    fn gain_linear(&self, phi_deg: T) -> T {
        let g = self.geom.with_ue_azimuth(phi_deg);
        let col_step = self.step * (bs_ris_direction(&g).azimuth + ris_ue_direction(&g).azimuth);
        self.column_weights
            .iter()
            .enumerate()
            .map(|(m, &w)| w * Complex::from_polar(T::one(), col_step * T::from_count(m)))
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
            .norm_sqr()
    }

    fn gain_db(&self, phi_deg: T) -> T {
        to_db(self.gain_linear(phi_deg))
    }
}

fn to_db<T: Scalar>(linear: T) -> T {
    let floor = T::lit(NULL_FLOOR_DB);
    if linear > T::zero() {
        linear_to_db(linear).max(floor)
    } else {
        floor
    }
}

/// The 161-point evaluation grid `-80:1:80` degrees.
pub fn sector_grid<T: Scalar>() -> Vec<T> {
    let lo = SECTOR_MIN_DEG as i32;
    let hi = SECTOR_MAX_DEG as i32;
    (lo..=hi).map(|a| T::lit(a as f64)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainPattern<T> {
    pub angles_deg: Vec<T>,
    pub gain_db: Vec<T>,
}

impl<T: Scalar> GainPattern<T> {
    /// Angle and value of the largest grid gain.
    pub fn peak(&self) -> (T, T) {
        self.angles_deg.iter().zip(&self.gain_db).fold(
            (T::nan(), T::neg_infinity()),
            |best, (&a, &g)| {
                if g > best.1 {
                    (a, g)
                } else {
                    best
                }
            },
        )
    }

    pub fn min_gain_db(&self) -> T {
        self.gain_db.iter().fold(T::infinity(), |m, &g| m.min(g))
    }
}

/// RIS gain of `psi` over the sector grid, in dB.
pub fn gain_pattern<T: Scalar>(
    psi: &PhaseShiftMatrix<T>,
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
) -> GainPattern<T> {
    let kernel = PatternKernel::new(psi, geom, carrier);
    let angles_deg = sector_grid();
    let gain_db = angles_deg.iter().map(|&a| kernel.gain_db(a)).collect();
    GainPattern {
        angles_deg,
        gain_db,
    }
}

/// RIS gain of `psi` toward one azimuth, in dB.
pub fn gain_db_at<T: Scalar>(
    psi: &PhaseShiftMatrix<T>,
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    phi_deg: T,
) -> T {
    PatternKernel::new(psi, geom, carrier).gain_db(phi_deg)
}

/// First angle above `from_deg` where the pattern falls to `floor_db`.
///
/// The pattern is sampled at `from_deg` and then on every grid angle above it;
/// the crossing is interpolated linearly between the two samples that bracket it.
fn first_crossing<T: Scalar>(
    kernel: &PatternKernel<T>,
    from_deg: T,
    floor_db: T,
) -> Result<Option<T>> {
    let g0 = kernel.gain_db(from_deg);
    if g0 < floor_db - T::lit(EQUALITY_TOL_DB) {
        return Err(RisError::ThresholdAbovePeak {
            threshold_db: floor_db.as_f64(),
            peak_db: g0.as_f64(),
        });
    }
    if g0 <= floor_db {
        return Ok(Some(from_deg));
    }
    let (mut x_prev, mut g_prev) = (from_deg, g0);
    for x in sector_grid::<T>().into_iter().filter(|&x| x > from_deg) {
        let g = kernel.gain_db(x);
        if g <= floor_db {
            let t = (g_prev - floor_db) / (g_prev - g);
            return Ok(Some(x_prev + t * (x - x_prev)));
        }
        x_prev = x;
        g_prev = g;
    }
    Ok(None)
}

/// Codewords of the coverage sweep together with the angle where each hands over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringPlan<T> {
    pub codewords: Vec<PhaseShiftMatrix<T>>,
    pub crossing_angles_deg: Vec<T>,
}

impl<T: Scalar> SteeringPlan<T> {
    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn steering_angles_deg(&self) -> Vec<T> {
        self.codewords
            .iter()
            .map(|c| c.steering_angle_deg)
            .collect()
    }

    pub fn array(&self) -> Option<PlanarArray> {
        self.codewords.first().map(|c| c.array)
    }
}

/// Coverage sweep: steer at −80°, find where the beam falls to `g_floor_db`,
/// and place the next beam half a crossing-spacing beyond it.
///
/// The first spacing is measured from −80°. The sweep ends once the next
/// steering angle leaves the sector; a later beam that stays above the floor
/// up to 80° hands over at 80°.
pub fn steering_sweep<T: Scalar>(
    array: PlanarArray,
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    g_floor_db: T,
) -> Result<SteeringPlan<T>> {
    let lo = T::lit(SECTOR_MIN_DEG);
    let hi = T::lit(SECTOR_MAX_DEG);
    let two = T::lit(2.0);
    let mut steer = lo;
    let mut prev = lo;
    let mut plan = SteeringPlan {
        codewords: Vec::new(),
        crossing_angles_deg: Vec::new(),
    };
    while steer <= hi {
        if plan.len() >= MAX_CODEWORDS {
            return Err(RisError::CapExceeded {
                what: "steering sweep codewords",
                requested: plan.len() + 1,
                cap: MAX_CODEWORDS,
            });
        }
        let psi = matched_codeword(geom, carrier, array, steer)?;
        let kernel = PatternKernel::new(&psi, geom, carrier);
        let crossing = match first_crossing(&kernel, steer, g_floor_db)? {
            Some(c) => c,
            None if plan.is_empty() => {
                return Err(RisError::NoCrossing {
                    steering_deg: steer.as_f64(),
                    floor_db: g_floor_db.as_f64(),
                })
            }
            None => hi,
        };
        let delta = crossing - prev;
        if delta <= T::zero() {
            return Err(RisError::Stalled {
                at_deg: crossing.as_f64(),
                level_db: g_floor_db.as_f64(),
            });
        }
        plan.codewords.push(psi);
        plan.crossing_angles_deg.push(crossing);
        steer = crossing + delta / two;
        prev = crossing;
    }
    Ok(plan)
}

/// Number of configurations needed so that consecutive beams hand over at
/// `g_th_db` or better across the sector.
///
/// Each beam is steered where the previous one fell to the threshold. The walk
/// counts beams, the first included, until one stays above the threshold up
/// to 80°. A threshold below the whole first pattern therefore needs one beam.
pub fn codeword_count<T: Scalar, S: CodewordShaper<T>>(
    array: PlanarArray,
    geom: &LinkGeometry<T>,
    carrier: &CarrierConfig<T>,
    g_th_db: T,
    shaper: &S,
) -> Result<usize> {
    let hi = T::lit(SECTOR_MAX_DEG);
    let mut steer = T::lit(SECTOR_MIN_DEG);
    let mut count = 0;
    loop {
        if count >= MAX_CODEWORDS {
            return Err(RisError::CapExceeded {
                what: "codeword count",
                requested: count + 1,
                cap: MAX_CODEWORDS,
            });
        }
        let psi = shaper.shape(matched_codeword(geom, carrier, array, steer)?);
        let kernel = PatternKernel::new(&psi, geom, carrier);
        count += 1;
        match first_crossing(&kernel, steer, g_th_db)? {
            None => return Ok(count),
            Some(c) if c >= hi => return Ok(count),
            Some(c) if c <= steer => {
                return Err(RisError::Stalled {
                    at_deg: steer.as_f64(),
                    level_db: g_th_db.as_f64(),
                })
            }
            Some(c) => steer = c,
        }
    }
}

/// Bits needed to store a codebook: controls × bits per control × codewords.
pub fn codeword_storage_bits(n_controls: u64, bits_per_control: u64, n_codewords: u64) -> u64 {
    n_controls
        .saturating_mul(bits_per_control)
        .saturating_mul(n_codewords)
}
