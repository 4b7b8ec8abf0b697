//! The single input record of every experiment, plus the three reference deployments.

use serde::{Deserialize, Serialize};

use crate::channel::{
    expected_power_gain, path_loss_db, CarrierConfig, LinkGeometry, RicianParams,
};
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// BS azimuth used by the reference deployments.
pub const DEFAULT_PHI_BS_DEG: f64 = -45.0;
/// BS elevation used by the reference deployments.
pub const DEFAULT_THETA_BS_DEG: f64 = 59.47;
/// UE elevation used by the reference deployments.
pub const DEFAULT_THETA_UE_DEG: f64 = 30.0;
/// UE azimuth used for single-direction evaluations such as the rate curves.
pub const DEFAULT_PHI_UE_DEG: f64 = 80.0;

pub const DEFAULT_FREQUENCY_GHZ: f64 = 5.0;
pub const DEFAULT_BANDWIDTH_HZ: f64 = 1e6;
pub const DEFAULT_PSI_TH_DEG: f64 = 30.0;
pub const DEFAULT_TRANSMIT_POWER_DBM: f64 = 30.0;
pub const DEFAULT_SEED: u64 = 2024;

/// Direct-link power gain shared by all reference deployments.
pub const REFERENCE_DIRECT_GAIN: f64 = 1.9596e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeploymentCase {
    One,
    Two,
    Three,
    Custom,
}

impl DeploymentCase {
    pub fn label(&self) -> &'static str {
        match self {
            Self::One => "1",
            Self::Two => "2",
            Self::Three => "3",
            Self::Custom => "custom",
        }
    }

    pub fn named() -> [DeploymentCase; 3] {
        [Self::One, Self::Two, Self::Three]
    }
}

/// Linear channel power gains (path loss times fading power) of the three links.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGains<T> {
    pub g_direct: T,
    pub g_bs_ris: T,
    pub g_ris_ue: T,
}

impl<T: Scalar> LinkGains<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, g) in [
            ("g_direct", self.g_direct),
            ("g_bs_ris", self.g_bs_ris),
            ("g_ris_ue", self.g_ris_ue),
        ] {
            if !(g > T::zero()) || !g.is_finite() {
                return Err(domain(format!(
                    "{name} must be a positive finite gain, got {g}"
                )));
            }
        }
        Ok(())
    }

    /// Gains of the reference deployments, back-solved so the sizing chain
    /// reproduces the tabulated minimum RIS gains.
    pub fn reference(case: DeploymentCase) -> Option<Self> {
        let (bs_ris, ris_ue) = match case {
            DeploymentCase::One => (5.7544e-8, 2.9512e-9),
            DeploymentCase::Two => (6.22620e-9, 9.20968e-9),
            DeploymentCase::Three => (3.07153e-9, 1.73478e-8),
            DeploymentCase::Custom => return None,
        };
        Some(Self {
            g_direct: T::lit(REFERENCE_DIRECT_GAIN),
            g_bs_ris: T::lit(bs_ris),
            g_ris_ue: T::lit(ris_ue),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig<T> {
    pub deployment_case: DeploymentCase,
    pub carrier: CarrierConfig<T>,
    pub geometry: LinkGeometry<T>,
    pub rician: RicianParams<T>,
    pub margin_db: T,
    pub psi_th_deg: T,
    pub transmit_power_dbm: T,
    pub seed: u64,
    pub fixture_gains: Option<LinkGains<T>>,
}

impl<T: Scalar> ScenarioConfig<T> {
    /// One of the three reference deployments with its tabulated distances,
    /// K-factors and fixture gains.
    pub fn named(case: DeploymentCase, margin_db: T) -> Result<Self> {
        let (d_bs_ris, d_ris_ue, alpha) = match case {
            DeploymentCase::One => (20.0, 81.5, 20.0),
            DeploymentCase::Two => (50.0, 55.7, 20.0),
            DeploymentCase::Three => (70.0, 47.0, 25.0),
            DeploymentCase::Custom => {
                return Err(domain("a custom deployment needs explicit geometry"))
            }
        };
        let geometry = LinkGeometry::from_alpha(T::lit(100.0), T::lit(d_bs_ris), T::lit(alpha))?
            .with_ris_ue_distance(T::lit(d_ris_ue))?
            .with_angles(
                T::lit(DEFAULT_PHI_BS_DEG),
                T::lit(DEFAULT_THETA_BS_DEG),
                T::lit(DEFAULT_THETA_UE_DEG),
            )
            .with_ue_azimuth(T::lit(DEFAULT_PHI_UE_DEG));
        let scenario = Self {
            deployment_case: case,
            carrier: CarrierConfig::new(
                T::lit(DEFAULT_FREQUENCY_GHZ),
                T::lit(DEFAULT_BANDWIDTH_HZ),
            )?,
            geometry,
            rician: RicianParams {
                kappa_bs_ris_db: T::lit(10.0),
                kappa_ris_ue_db: T::lit(10.0),
                kappa_bs_ue_db: T::lit(1.0),
            },
            margin_db,
            psi_th_deg: T::lit(DEFAULT_PSI_TH_DEG),
            transmit_power_dbm: T::lit(DEFAULT_TRANSMIT_POWER_DBM),
            seed: DEFAULT_SEED,
            fixture_gains: LinkGains::reference(case),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        self.rician.validate()?;
        if !self.margin_db.is_finite() {
            return Err(domain("margin_db must be finite"));
        }
        if self.deployment_case != DeploymentCase::Custom {
            let m = self.margin_db;
            if ![0.0, 3.0, 6.0].iter().any(|&x| m == T::lit(x)) {
                return Err(domain(format!(
                    "named deployments accept margin_db of 0, 3 or 6, got {m}"
                )));
            }
        }
        if !(self.psi_th_deg >= T::zero() && self.psi_th_deg <= T::lit(180.0)) {
            return Err(domain(format!(
                "psi_th_deg must lie in [0, 180], got {}",
                self.psi_th_deg
            )));
        }
        if !self.transmit_power_dbm.is_finite() {
            return Err(domain("transmit_power_dbm must be finite"));
        }
        if let Some(g) = &self.fixture_gains {
            g.validate()?;
        }
        Ok(())
    }

    /// Fixture gains when present, otherwise mean gains from the street-canyon path loss.
    pub fn link_gains(&self) -> Result<LinkGains<T>> {
        if let Some(g) = self.fixture_gains {
            return Ok(g);
        }
        let f = self.carrier.frequency_ghz;
        let geom = &self.geometry;
        Ok(LinkGains {
            g_direct: expected_power_gain(path_loss_db(geom.d_bs_ue_m, f)?),
            g_bs_ris: expected_power_gain(path_loss_db(geom.d_bs_ris_m, f)?),
            g_ris_ue: expected_power_gain(path_loss_db(geom.d_ris_ue_m, f)?),
        })
    }

    pub fn with_margin(mut self, margin_db: T) -> Result<Self> {
        self.margin_db = margin_db;
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_cases_expand_to_reference_distances() {
        let expect = [
            (DeploymentCase::One, 20.0, 81.5),
            (DeploymentCase::Two, 50.0, 55.7),
            (DeploymentCase::Three, 70.0, 47.0),
        ];
        for (case, d1, d2) in expect {
            let s = ScenarioConfig::<f64>::named(case, 6.0).unwrap();
            assert_eq!(s.geometry.d_bs_ue_m, 100.0);
            assert_eq!(s.geometry.d_bs_ris_m, d1);
            assert_eq!(s.geometry.d_ris_ue_m, d2);
            assert_eq!(s.rician.kappa_bs_ue_db, 1.0);
            assert!(s.fixture_gains.is_some());
        }
    }

    #[test]
    fn tabulated_distances_agree_with_alpha() {
        for case in DeploymentCase::named() {
            let s = ScenarioConfig::<f64>::named(case, 0.0).unwrap();
            let g = &s.geometry;
            let d =
                crate::channel::ris_ue_distance(g.d_bs_ue_m, g.d_bs_ris_m, g.alpha_deg).unwrap();
            assert!((d - g.d_ris_ue_m).abs() < 0.1, "{case:?}: {d}");
        }
    }

    #[test]
    fn named_cases_reject_odd_margins() {
        assert!(ScenarioConfig::<f64>::named(DeploymentCase::One, 4.0).is_err());
        assert!(ScenarioConfig::<f64>::named(DeploymentCase::Custom, 0.0).is_err());
    }

    #[test]
    fn custom_scenario_falls_back_to_path_loss() {
        let mut s = ScenarioConfig::<f64>::named(DeploymentCase::One, 0.0).unwrap();
        s.deployment_case = DeploymentCase::Custom;
        s.fixture_gains = None;
        let g = s.link_gains().unwrap();
        let want = expected_power_gain(path_loss_db(20.0, 5.0).unwrap());
        assert!((g.g_bs_ris / want - 1.0).abs() < 1e-12);
    }
}
