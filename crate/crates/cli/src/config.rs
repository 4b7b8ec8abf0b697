//! Scenario file parsing.
//!
//! The file is TOML. Top-level keys pick the deployment and the run
//! parameters; optional sections override the carrier, geometry, K-factors,
//! fixture gains and Monte-Carlo settings. Every problem found is reported,
//! each with the line it sits on when that can be located.
//!
//! ```toml
//! deployment_case = 1        # 1, 2, 3 or "custom"
//! margin_db = 6
//!
//! [geometry]
//! phi_ue_deg = 45
//! ```

use std::fmt;
use std::path::Path;

use riscorr_core::channel::{CarrierConfig, LinkGeometry, RicianParams};
use riscorr_core::scenario::{
    DEFAULT_PHI_BS_DEG, DEFAULT_PHI_UE_DEG, DEFAULT_PSI_TH_DEG, DEFAULT_SEED, DEFAULT_THETA_BS_DEG,
    DEFAULT_THETA_UE_DEG, DEFAULT_TRANSMIT_POWER_DBM,
};
use riscorr_core::{DeploymentCase, LinkGains, ScenarioConfig};
use serde::Serialize;
use toml::{Table, Value};

use crate::error::CliError;

pub const DEFAULT_REALIZATIONS: usize = riscorr_core::link::DEFAULT_REALIZATIONS;

/// Monte-Carlo settings of the rate experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSettings {
    pub n_realizations: usize,
    pub p_t_min_dbm: f64,
    pub p_t_max_dbm: f64,
    pub p_t_step_db: f64,
}

impl Default for RateSettings {
    fn default() -> Self {
        Self {
            n_realizations: DEFAULT_REALIZATIONS,
            p_t_min_dbm: 0.0,
            p_t_max_dbm: 40.0,
            p_t_step_db: 1.0,
        }
    }
}

impl RateSettings {
    pub fn grid(&self) -> Vec<f64> {
        let n = ((self.p_t_max_dbm - self.p_t_min_dbm) / self.p_t_step_db + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.p_t_min_dbm + i as f64 * self.p_t_step_db)
            .collect()
    }
}

/// A validated configuration file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: ScenarioConfig<f64>,
    pub rate: RateSettings,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

const TOP_KEYS: &[&str] = &[
    "deployment_case",
    "margin_db",
    "psi_th_deg",
    "transmit_power_dbm",
    "seed",
    "carrier",
    "geometry",
    "rician",
    "fixture_gains",
    "rate",
];
const CARRIER_KEYS: &[&str] = &["frequency_ghz", "bandwidth_hz"];
const GEOMETRY_KEYS: &[&str] = &[
    "d_bs_ue_m",
    "d_bs_ris_m",
    "d_ris_ue_m",
    "alpha_deg",
    "phi_bs_deg",
    "theta_bs_deg",
    "theta_ue_deg",
    "phi_ue_deg",
];
const RICIAN_KEYS: &[&str] = &["kappa_bs_ris_db", "kappa_ris_ue_db", "kappa_bs_ue_db"];
const GAIN_KEYS: &[&str] = &["g_direct", "g_bs_ris", "g_ris_ue"];
const RATE_KEYS: &[&str] = &[
    "n_realizations",
    "p_t_min_dbm",
    "p_t_max_dbm",
    "p_t_step_db",
];

/// Finds the 1-based line of `key` inside `[section]` (or at top level).
fn line_of(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.trim_end_matches(']').trim().to_string();
            if section.is_none() && name == key {
                return Some(i + 1);
            }
            current = Some(name);
            continue;
        }
        let Some((lhs, _)) = line.split_once('=') else {
            continue;
        };
        if current.as_deref() == section && lhs.trim().trim_matches('"') == key {
            return Some(i + 1);
        }
    }
    None
}

struct Reader<'a> {
    text: &'a str,
    issues: Vec<ConfigIssue>,
}

impl<'a> Reader<'a> {
    fn issue(&mut self, section: Option<&str>, key: &str, message: String) {
        let line = line_of(self.text, section, key);
        self.issues.push(ConfigIssue { line, message });
    }

    fn path(section: Option<&str>, key: &str) -> String {
        match section {
            Some(s) => format!("{s}.{key}"),
            None => key.to_string(),
        }
    }

    fn check_keys(&mut self, table: &Table, section: Option<&str>, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                let msg = format!(
                    "unknown key `{}`; expected one of: {}",
                    Self::path(section, key),
                    allowed.join(", ")
                );
                self.issue(section, key, msg);
            }
        }
    }

    fn section<'t>(&mut self, root: &'t Table, name: &str, allowed: &[&str]) -> Option<&'t Table> {
        match root.get(name) {
            None => None,
            Some(Value::Table(t)) => {
                self.check_keys(t, Some(name), allowed);
                Some(t)
            }
            Some(_) => {
                self.issue(None, name, format!("`{name}` must be a [{name}] section"));
                None
            }
        }
    }

    fn number(&mut self, table: Option<&Table>, section: Option<&str>, key: &str) -> Option<f64> {
        let v = table?.get(key)?;
        let x = match v {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            _ => {
                let msg = format!("`{}` must be a number", Self::path(section, key));
                self.issue(section, key, msg);
                return None;
            }
        };
        if !x.is_finite() {
            let msg = format!(
                "range violation: `{}` must be finite",
                Self::path(section, key)
            );
            self.issue(section, key, msg);
            return None;
        }
        Some(x)
    }

    /// Reads an optional number and checks it against `ok`, describing the range in `expect`.
    fn ranged(
        &mut self,
        table: Option<&Table>,
        section: Option<&str>,
        key: &str,
        ok: impl Fn(f64) -> bool,
        expect: &str,
    ) -> Option<f64> {
        let x = self.number(table, section, key)?;
        if !ok(x) {
            let msg = format!(
                "range violation: `{}` must be {expect}, got {x}",
                Self::path(section, key)
            );
            self.issue(section, key, msg);
            return None;
        }
        Some(x)
    }

    fn integer(
        &mut self,
        table: Option<&Table>,
        section: Option<&str>,
        key: &str,
        min: i64,
    ) -> Option<i64> {
        let v = table?.get(key)?;
        match v {
            Value::Integer(i) if *i >= min => Some(*i),
            Value::Integer(i) => {
                let msg = format!(
                    "range violation: `{}` must be >= {min}, got {i}",
                    Self::path(section, key)
                );
                self.issue(section, key, msg);
                None
            }
            _ => {
                let msg = format!("`{}` must be an integer", Self::path(section, key));
                self.issue(section, key, msg);
                None
            }
        }
    }
}

fn deployment_case(reader: &mut Reader, root: &Table) -> Option<DeploymentCase> {
    let Some(v) = root.get("deployment_case") else {
        reader.issues.push(ConfigIssue {
            line: None,
            message: "missing field `deployment_case` (1, 2, 3 or \"custom\")".into(),
        });
        return None;
    };
    let case = match v {
        Value::Integer(1) => Some(DeploymentCase::One),
        Value::Integer(2) => Some(DeploymentCase::Two),
        Value::Integer(3) => Some(DeploymentCase::Three),
        Value::String(s) if s == "custom" => Some(DeploymentCase::Custom),
        Value::String(s) if s == "1" || s == "2" || s == "3" => {
            Some(DeploymentCase::named()[s.parse::<usize>().unwrap() - 1])
        }
        _ => None,
    };
    if case.is_none() {
        reader.issue(
            None,
            "deployment_case",
            format!("range violation: `deployment_case` must be 1, 2, 3 or \"custom\", got {v}"),
        );
    }
    case
}

/// Parses and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(vec![ConfigIssue {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        }])
    })?;
    parse_config_str(&text)
}

/// Parses and validates configuration text.
pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        CliError::Config(vec![ConfigIssue {
            line,
            message: format!("malformed TOML: {}", e.message()),
        }])
    })?;

    let mut r = Reader {
        text,
        issues: Vec::new(),
    };
    r.check_keys(&root, None, TOP_KEYS);
    let case = deployment_case(&mut r, &root);
    let top = Some(&root);

    let margin_db = r.number(top, None, "margin_db");
    let psi_th_deg = r.ranged(
        top,
        None,
        "psi_th_deg",
        |x| (0.0..=180.0).contains(&x),
        "in [0, 180]",
    );
    let transmit_power_dbm = r.number(top, None, "transmit_power_dbm");
    let seed = r.integer(top, None, "seed", 0).map(|s| s as u64);

    let carrier_t = r.section(&root, "carrier", CARRIER_KEYS);
    let geometry_t = r.section(&root, "geometry", GEOMETRY_KEYS);
    let rician_t = r.section(&root, "rician", RICIAN_KEYS);
    let gains_t = r.section(&root, "fixture_gains", GAIN_KEYS);
    let rate_t = r.section(&root, "rate", RATE_KEYS);

    let positive = |x: f64| x > 0.0;
    let freq = r.ranged(carrier_t, Some("carrier"), "frequency_ghz", positive, "> 0");
    let bandwidth = r.ranged(carrier_t, Some("carrier"), "bandwidth_hz", positive, "> 0");

    let g = Some("geometry");
    let d_bs_ue = r.ranged(geometry_t, g, "d_bs_ue_m", |x| x >= 1.0, ">= 1 m");
    let d_bs_ris = r.ranged(geometry_t, g, "d_bs_ris_m", |x| x >= 1.0, ">= 1 m");
    let d_ris_ue = r.ranged(geometry_t, g, "d_ris_ue_m", |x| x >= 1.0, ">= 1 m");
    let alpha = r.ranged(
        geometry_t,
        g,
        "alpha_deg",
        |x| (0.0..=180.0).contains(&x),
        "in [0, 180]",
    );
    let phi_bs = r.number(geometry_t, g, "phi_bs_deg");
    let theta_bs = r.number(geometry_t, g, "theta_bs_deg");
    let theta_ue = r.number(geometry_t, g, "theta_ue_deg");
    let phi_ue = r.ranged(
        geometry_t,
        g,
        "phi_ue_deg",
        |x| (-80.0..=80.0).contains(&x),
        "in [-80, 80]",
    );

    let k = Some("rician");
    let kappa = [
        r.number(rician_t, k, "kappa_bs_ris_db"),
        r.number(rician_t, k, "kappa_ris_ue_db"),
        r.number(rician_t, k, "kappa_bs_ue_db"),
    ];

    let fg = Some("fixture_gains");
    let gains = [
        r.ranged(gains_t, fg, "g_direct", positive, "> 0"),
        r.ranged(gains_t, fg, "g_bs_ris", positive, "> 0"),
        r.ranged(gains_t, fg, "g_ris_ue", positive, "> 0"),
    ];
    if let Some(t) = gains_t {
        for key in GAIN_KEYS {
            if !t.contains_key(*key) {
                r.issue(
                    Some("fixture_gains"),
                    key,
                    format!("missing field `fixture_gains.{key}`"),
                );
            }
        }
    }

    let rs = Some("rate");
    let mut rate = RateSettings::default();
    if let Some(n) = r.integer(rate_t, rs, "n_realizations", 1) {
        rate.n_realizations = n as usize;
    }
    if let Some(x) = r.number(rate_t, rs, "p_t_min_dbm") {
        rate.p_t_min_dbm = x;
    }
    if let Some(x) = r.number(rate_t, rs, "p_t_max_dbm") {
        rate.p_t_max_dbm = x;
    }
    if let Some(x) = r.ranged(rate_t, rs, "p_t_step_db", positive, "> 0") {
        rate.p_t_step_db = x;
    }
    if rate.p_t_max_dbm < rate.p_t_min_dbm {
        r.issue(
            rs,
            "p_t_max_dbm",
            "range violation: `rate.p_t_max_dbm` must be >= `rate.p_t_min_dbm`".into(),
        );
    }

    let Some(case) = case else {
        return Err(CliError::Config(r.issues));
    };

    let mut scenario = match case {
        DeploymentCase::Custom => {
            for key in ["d_bs_ue_m", "d_bs_ris_m", "alpha_deg"] {
                if geometry_t.is_none_or(|t| !t.contains_key(key)) {
                    r.issues.push(ConfigIssue {
                        line: line_of(text, None, "geometry"),
                        message: format!(
                            "missing field `geometry.{key}` (required for a custom deployment)"
                        ),
                    });
                }
            }
            if margin_db.is_none() && !root.contains_key("margin_db") {
                r.issues.push(ConfigIssue {
                    line: None,
                    message: "missing field `margin_db`".into(),
                });
            }
            match (d_bs_ue, d_bs_ris, alpha) {
                (Some(a), Some(b), Some(c)) => match LinkGeometry::from_alpha(a, b, c) {
                    Ok(geom) => Some(ScenarioConfig {
                        deployment_case: case,
                        carrier: CarrierConfig::new(5.0, 1e6).expect("default carrier is valid"),
                        geometry: geom
                            .with_angles(
                                DEFAULT_PHI_BS_DEG,
                                DEFAULT_THETA_BS_DEG,
                                DEFAULT_THETA_UE_DEG,
                            )
                            .with_ue_azimuth(DEFAULT_PHI_UE_DEG),
                        rician: RicianParams {
                            kappa_bs_ris_db: 10.0,
                            kappa_ris_ue_db: 10.0,
                            kappa_bs_ue_db: 1.0,
                        },
                        margin_db: margin_db.unwrap_or(0.0),
                        psi_th_deg: DEFAULT_PSI_TH_DEG,
                        transmit_power_dbm: DEFAULT_TRANSMIT_POWER_DBM,
                        seed: DEFAULT_SEED,
                        fixture_gains: None,
                    }),
                    Err(e) => {
                        r.issue(g, "d_ris_ue_m", e.to_string());
                        None
                    }
                },
                _ => None,
            }
        }
        named => {
            if root.get("margin_db").is_none() {
                r.issues.push(ConfigIssue {
                    line: None,
                    message: "missing field `margin_db` (0, 3 or 6)".into(),
                });
                None
            } else if let Some(m) = margin_db {
                if ![0.0, 3.0, 6.0].contains(&m) {
                    r.issue(None, "margin_db", format!(
                        "range violation: `margin_db` must be 0, 3 or 6 for a named deployment, got {m}"
                    ));
                    None
                } else {
                    ScenarioConfig::named(named, m).ok()
                }
            } else {
                None
            }
        }
    };

    if let Some(s) = scenario.as_mut() {
        if let Some(x) = psi_th_deg {
            s.psi_th_deg = x;
        }
        if let Some(x) = transmit_power_dbm {
            s.transmit_power_dbm = x;
        }
        if let Some(x) = seed {
            s.seed = x;
        }
        if freq.is_some() || bandwidth.is_some() {
            let f = freq.unwrap_or(s.carrier.frequency_ghz);
            let b = bandwidth.unwrap_or(s.carrier.bandwidth_hz);
            match CarrierConfig::new(f, b) {
                Ok(c) => s.carrier = c,
                Err(e) => r.issues.push(ConfigIssue {
                    line: None,
                    message: e.to_string(),
                }),
            }
        }
        let geom = &mut s.geometry;
        if case != DeploymentCase::Custom {
            if let Some(x) = d_bs_ue {
                geom.d_bs_ue_m = x;
            }
            if let Some(x) = d_bs_ris {
                geom.d_bs_ris_m = x;
            }
            if let Some(x) = alpha {
                geom.alpha_deg = x;
            }
        }
        if let Some(x) = d_ris_ue {
            geom.d_ris_ue_m = x;
        }
        for (slot, v) in [
            (&mut geom.phi_bs_deg, phi_bs),
            (&mut geom.theta_bs_deg, theta_bs),
            (&mut geom.theta_ue_deg, theta_ue),
            (&mut geom.phi_ue_deg, phi_ue),
        ] {
            if let Some(x) = v {
                *slot = x;
            }
        }
        for (slot, v) in [
            (&mut s.rician.kappa_bs_ris_db, kappa[0]),
            (&mut s.rician.kappa_ris_ue_db, kappa[1]),
            (&mut s.rician.kappa_bs_ue_db, kappa[2]),
        ] {
            if let Some(x) = v {
                *slot = x;
            }
        }
        if let [Some(a), Some(b), Some(c)] = gains {
            s.fixture_gains = Some(LinkGains {
                g_direct: a,
                g_bs_ris: b,
                g_ris_ue: c,
            });
        }
        if r.issues.is_empty() {
            if let Err(e) = s.validate() {
                r.issues.push(ConfigIssue {
                    line: None,
                    message: e.to_string(),
                });
            }
        }
    }

    match scenario {
        Some(scenario) if r.issues.is_empty() => Ok(RunConfig { scenario, rate }),
        _ => Err(CliError::Config(r.issues)),
    }
}
