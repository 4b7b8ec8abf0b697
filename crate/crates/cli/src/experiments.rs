//! Experiment drivers. Each one writes its CSV files into the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use riscorr_core::correlation::{
    group_plan, threshold_sweep, ConnectedGroups, GroupingMode, PairMode,
};
use riscorr_core::link::rate_sweep;
use riscorr_core::power::{control_counts, multi_config_power, panel_power, single_panel_dynamic};
use riscorr_core::{
    codeword_count, codeword_storage_bits, gain_pattern, matched_codeword, size_for_deployment,
    steering_sweep, DeploymentCase, DesignKind, FullControl, GainBudget, PowerModelParams,
    RateDesign, RisDimensions, RisError, ScenarioConfig, SteeringPlan,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{config_hash, num, Header, Table};

/// Bits stored per control signal: one per PIN diode of a unit cell.
pub const BITS_PER_CONTROL: u64 = 3;

/// Margins tabulated for the named deployments.
pub const NAMED_MARGINS_DB: [f64; 3] = [0.0, 3.0, 6.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Size,
    Sweep,
    Correlate,
    Power,
    Rate,
    Codebook,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Size => "size",
            Self::Sweep => "sweep",
            Self::Correlate => "correlate",
            Self::Power => "power",
            Self::Rate => "rate",
            Self::Codebook => "codebook",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Connected,
    Full,
    Min,
}

impl From<Mode> for DesignKind {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Connected => DesignKind::Connected,
            Mode::Full => DesignKind::FullMargin,
            Mode::Min => DesignKind::FullMin,
        }
    }
}

/// Command-line overrides applied on top of the configuration file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub margin_db: Option<f64>,
    pub mode: Option<Mode>,
}

/// One surface design: its sizing and, for the connected kind, its control groups.
#[derive(Debug, Clone)]
pub struct Design {
    pub kind: DesignKind,
    pub budget: GainBudget<f64>,
    pub dims: RisDimensions<f64>,
    pub groups: Option<ConnectedGroups>,
}

impl Design {
    /// Sizes a design; the min-gain kind ignores `margin_db`.
    pub fn build(
        scenario: &ScenarioConfig<f64>,
        kind: DesignKind,
        margin_db: f64,
    ) -> Result<Self, CliError> {
        let margin = if kind == DesignKind::FullMin {
            0.0
        } else {
            margin_db
        };
        let (budget, dims) = size_for_deployment(scenario, margin)?;
        let groups = if kind.is_connected() {
            let plan = sweep_plan(scenario, &budget, &dims)?;
            Some(group_plan(
                &plan,
                PairMode::WithinColumns,
                scenario.psi_th_deg,
                GroupingMode::Exact,
            )?)
        } else {
            None
        };
        Ok(Self {
            kind,
            budget,
            dims,
            groups,
        })
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    /// Codeword steered toward `phi_deg`, phases shared within groups when connected.
    pub fn codeword(
        &self,
        scenario: &ScenarioConfig<f64>,
        phi_deg: f64,
    ) -> Result<riscorr_core::PhaseShiftMatrixF64, CliError> {
        let psi = matched_codeword(
            &scenario.geometry,
            &scenario.carrier,
            self.dims.array(),
            phi_deg,
        )?;
        Ok(match &self.groups {
            Some(g) => g.apply(&psi)?,
            None => psi,
        })
    }
}

/// Coverage sweep of a design. The floor is the bare fair-coverage gain; a
/// design sized without margin peaks right at that gain, so its sweep uses the
/// half-power level below it instead.
pub fn sweep_plan(
    scenario: &ScenarioConfig<f64>,
    budget: &GainBudget<f64>,
    dims: &RisDimensions<f64>,
) -> Result<SteeringPlan<f64>, CliError> {
    let floor = if budget.margin_db > 0.0 {
        budget.g_min_db
    } else {
        budget.g_min_db - 3.0
    };
    Ok(steering_sweep(
        dims.array(),
        &scenario.geometry,
        &scenario.carrier,
        floor,
    )?)
}

/// Applies the command-line overrides and validates the result.
pub fn resolve(config: &RunConfig, opts: &RunOptions) -> Result<RunConfig, CliError> {
    let mut c = config.clone();
    if let Some(seed) = opts.seed {
        c.scenario.seed = seed;
    }
    if let Some(m) = opts.margin_db {
        c.scenario = c.scenario.with_margin(m)?;
    }
    c.scenario.validate()?;
    Ok(c)
}

#[derive(Serialize)]
struct HashInput<'a> {
    experiment: Experiment,
    config: &'a RunConfig,
    mode: Option<Mode>,
    margin_filter: Option<f64>,
}

/// Runs one experiment and returns the files written, in writing order.
pub fn run_experiment(
    experiment: Experiment,
    config: &RunConfig,
    opts: &RunOptions,
    out_dir: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let config = resolve(config, opts)?;
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let header = Header {
        experiment: experiment.name().to_string(),
        seed: config.scenario.seed,
        config_hash: config_hash(&HashInput {
            experiment,
            config: &config,
            mode: opts.mode,
            margin_filter: opts.margin_db,
        }),
    };
    let ctx = Context {
        config: &config,
        opts,
        out_dir,
        header: &header,
    };
    match experiment {
        Experiment::Size => ctx.size(),
        Experiment::Sweep => ctx.sweep(),
        Experiment::Correlate => ctx.correlate(),
        Experiment::Power => ctx.power(),
        Experiment::Rate => ctx.rate(),
        Experiment::Codebook => ctx.codebook(),
    }
}

struct Context<'a> {
    config: &'a RunConfig,
    opts: &'a RunOptions,
    out_dir: &'a Path,
    header: &'a Header,
}

impl Context<'_> {
    fn scenario(&self) -> &ScenarioConfig<f64> {
        &self.config.scenario
    }

    fn case_label(&self) -> &'static str {
        self.scenario().deployment_case.label()
    }

    fn write(&self, table: &Table, name: &str) -> Result<PathBuf, CliError> {
        table.write(self.out_dir, name, self.header)
    }

    /// Margins reported by `size`: all tabulated ones unless one was requested.
    fn margins(&self) -> Vec<f64> {
        if let Some(m) = self.opts.margin_db {
            return vec![m];
        }
        let s = self.scenario();
        if s.deployment_case == DeploymentCase::Custom {
            let mut v = vec![0.0, s.margin_db];
            v.dedup();
            v
        } else {
            NAMED_MARGINS_DB.to_vec()
        }
    }

    /// (kind, margin) pairs in report order, filtered by `--mode`. With
    /// `all_margins` a named deployment reports both tabulated margins unless
    /// `--margin-db` picks one; otherwise the configured margin is used.
    fn design_list(&self, all_margins: bool) -> Vec<(DesignKind, f64)> {
        let s = self.scenario();
        let margins: Vec<f64> = match self.opts.margin_db {
            Some(m) => vec![m],
            None if all_margins && s.deployment_case != DeploymentCase::Custom => vec![3.0, 6.0],
            None => vec![s.margin_db],
        };
        let mut out = Vec::new();
        for kind in [DesignKind::Connected, DesignKind::FullMargin] {
            for &m in &margins {
                if m > 0.0 {
                    out.push((kind, m));
                }
            }
        }
        out.push((DesignKind::FullMin, 0.0));
        if let Some(mode) = self.opts.mode {
            let want = DesignKind::from(mode);
            out.retain(|(k, _)| *k == want);
        }
        out
    }

    fn size(&self) -> Result<Vec<PathBuf>, CliError> {
        let mut t = Table::new(&[
            "case",
            "margin_db",
            "g_min_db",
            "g_req_db",
            "n_total",
            "n_z",
            "n_y",
            "edge_m",
            "beamwidth_deg",
        ]);
        for m in self.margins() {
            let (b, d) = size_for_deployment(self.scenario(), m)?;
            t.push(vec![
                self.case_label().into(),
                num(m),
                num(b.g_min_db),
                num(b.g_req_db),
                d.n_total.to_string(),
                d.n_z.to_string(),
                d.n_y.to_string(),
                num(d.edge_m),
                d.beamwidth_deg.map(num).unwrap_or_else(|| "nan".into()),
            ]);
        }
        Ok(vec![self.write(&t, "size.csv")?])
    }

    fn sweep(&self) -> Result<Vec<PathBuf>, CliError> {
        let s = self.scenario();
        let kind = self
            .opts
            .mode
            .map(DesignKind::from)
            .unwrap_or(DesignKind::FullMargin);
        let design = Design::build(s, kind, s.margin_db)?;
        let plan = sweep_plan(s, &design.budget, &design.dims)?;
        let mut files = Vec::new();
        let mut summary = Table::new(&[
            "codeword",
            "steering_deg",
            "crossing_deg",
            "peak_gain_db",
            "peak_angle_deg",
        ]);
        for (i, (psi, &crossing)) in plan
            .codewords
            .iter()
            .zip(&plan.crossing_angles_deg)
            .enumerate()
        {
            let psi = match &design.groups {
                Some(g) => g.apply(psi)?,
                None => psi.clone(),
            };
            let pattern = gain_pattern(&psi, &s.geometry, &s.carrier);
            let (peak_angle, peak_gain) = pattern.peak();
            summary.push(vec![
                i.to_string(),
                num(psi.steering_angle_deg),
                num(crossing),
                num(peak_gain),
                num(peak_angle),
            ]);

            let mut cw = Table::new(&["row_index", "col_index", "phase_radians"]);
            for r in 0..psi.rows() {
                for c in 0..psi.cols() {
                    cw.push(vec![r.to_string(), c.to_string(), num(psi.phase(r, c))]);
                }
            }
            files.push(self.write(&cw, &format!("codeword_{i:03}.csv"))?);

            let mut pt = Table::new(&["angle_deg", "gain_db"]);
            for (a, g) in pattern.angles_deg.iter().zip(&pattern.gain_db) {
                pt.push(vec![num(*a), num(*g)]);
            }
            files.push(self.write(&pt, &format!("pattern_{i:03}.csv"))?);
        }
        files.insert(0, self.write(&summary, "sweep.csv")?);
        Ok(files)
    }

    fn correlate(&self) -> Result<Vec<PathBuf>, CliError> {
        let s = self.scenario();
        let (budget, dims) = size_for_deployment(s, s.margin_db)?;
        let plan = sweep_plan(s, &budget, &dims)?;
        let thresholds: Vec<f64> = (0..=180).map(f64::from).collect();
        let ts = threshold_sweep(&plan, &thresholds)?;
        let mut sweep = Table::new(&["threshold_deg", "correlated_columns"]);
        for (t, n) in ts.thresholds_deg.iter().zip(&ts.correlated_columns) {
            sweep.push(vec![num(*t), n.to_string()]);
        }
        let groups = group_plan(
            &plan,
            PairMode::WithinColumns,
            s.psi_th_deg,
            GroupingMode::Exact,
        )?;
        let mut map = Table::new(&["row", "col", "group_id"]);
        for r in 0..dims.n_z {
            for c in 0..dims.n_y {
                map.push(vec![
                    r.to_string(),
                    c.to_string(),
                    groups.group(r, c).to_string(),
                ]);
            }
        }
        Ok(vec![
            self.write(&sweep, "threshold_sweep.csv")?,
            self.write(&map, "group_map.csv")?,
        ])
    }

    fn power(&self) -> Result<Vec<PathBuf>, CliError> {
        let params = PowerModelParams::default();
        let mut t = Table::new(&[
            "case",
            "design",
            "margin_db",
            "p_control_w",
            "p_circuit_w",
            "p_units_w",
            "p_total_w",
        ]);
        for (kind, m) in self.design_list(true) {
            let (_, dims) = size_for_deployment(self.scenario(), m)?;
            let p = panel_power(kind, &dims, &params)?;
            t.push(vec![
                self.case_label().into(),
                kind.label().into(),
                num(m),
                num(p.p_control_w),
                num(p.p_circuit_w),
                num(p.p_units_w),
                num(p.p_total_w),
            ]);
        }
        Ok(vec![self.write(&t, "power.csv")?])
    }

    fn codebook(&self) -> Result<Vec<PathBuf>, CliError> {
        let s = self.scenario();
        let params = PowerModelParams::default();
        let mut t = Table::new(&[
            "design",
            "margin_db",
            "n_z",
            "n_y",
            "controls",
            "threshold_db",
            "n_codewords",
            "storage_bits",
            "panel_w",
            "multi_config_w",
            "multi_config_dynamic_w",
            "single_panel_dynamic_w",
            "status",
        ]);
        for (kind, m) in self.design_list(false) {
            let design = Design::build(s, kind, m)?;
            let d = &design.dims;
            let g_th = design.budget.g_min_db;
            let counted = match &design.groups {
                Some(groups) => codeword_count(d.array(), &s.geometry, &s.carrier, g_th, groups),
                None => codeword_count(d.array(), &s.geometry, &s.carrier, g_th, &FullControl),
            };
            // A design whose threshold cannot be held, or only with more beams
            // than the cap allows, gets a status and empty count columns.
            let (n, status) = match counted {
                Ok(n) => (Some(n), "ok"),
                Err(RisError::ThresholdAbovePeak { .. }) => (None, "threshold_above_peak"),
                Err(RisError::Stalled { .. }) => (None, "stalled"),
                Err(RisError::CapExceeded { .. }) => (None, "cap_exceeded"),
                Err(e) => return Err(e.into()),
            };
            let controls = control_counts(kind, d).independent_controls;
            let panel = panel_power(kind, d, &params)?.p_total_w;
            let counted_cells = match n {
                Some(n) => vec![
                    n.to_string(),
                    codeword_storage_bits(controls as u64, BITS_PER_CONTROL, n as u64).to_string(),
                    num(panel),
                    num(multi_config_power(panel, n, false, &params)?),
                    num(multi_config_power(panel, n, true, &params)?),
                ],
                None => vec![
                    String::new(),
                    String::new(),
                    num(panel),
                    String::new(),
                    String::new(),
                ],
            };
            let mut row = vec![
                design.label().into(),
                num(design.budget.margin_db),
                d.n_z.to_string(),
                d.n_y.to_string(),
                controls.to_string(),
                num(g_th),
            ];
            row.extend(counted_cells);
            row.push(num(single_panel_dynamic(panel, &params)));
            row.push(status.into());
            t.push(row);
        }
        Ok(vec![self.write(&t, "codebook.csv")?])
    }

    fn rate(&self) -> Result<Vec<PathBuf>, CliError> {
        let s = self.scenario();
        let phi = s.geometry.phi_ue_deg;
        let mut designs = Vec::new();
        for (kind, m) in self.design_list(false) {
            let d = Design::build(s, kind, m)?;
            designs.push(RateDesign {
                label: d.label().to_string(),
                codeword: d.codeword(s, phi)?,
            });
        }
        let rs = &self.config.rate;
        let grid = rs.grid();
        let curves = rate_sweep(s, &designs, &grid, rs.n_realizations, s.seed)?;
        let mut t = Table::new(&["p_t_dbm", "design", "mean_rate_bps"]);
        for (j, p) in grid.iter().enumerate() {
            for c in &curves {
                t.push(vec![num(*p), c.label.clone(), num(c.rate_bps[j])]);
            }
        }
        Ok(vec![self.write(&t, "rate.csv")?])
    }
}
