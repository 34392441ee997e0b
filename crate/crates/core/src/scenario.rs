//! Config-driven scenario execution: floorplan, netlist, DC and transient
//! solve, figure-of-merit report, and the full comparison matrix.

use crate::error::{Error, Result};
use crate::floorplan::{fd_count, place_dielets, Floorplan, TopologyConfig, TopologyKind};
use crate::metrics::{
    computing_performance, delivered_power, normalize_to_pt, rank_topologies, FomReport,
    RankWeights, RankedTopology,
};
use crate::netlist::{build_pdn, LoadModel, PdnNetlist};
use crate::parasitics::ExtractionParams;
use crate::platform::{
    builtin_application_by_name, ApplicationSpec, MaterialProperties, PlatformFeatures,
};
use crate::solver::{
    inductor_event_energy, power_balance, solve_dc, solve_dc_scaled, solve_transient,
    SolveResult, TransientResult,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Partial override set for the extraction counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionOverrides {
    pub twv_per_dielet: Option<u32>,
    pub pillar_pairs_per_dielet: Option<u32>,
    pub pins_total: Option<u32>,
    pub bga_per_tile: Option<u32>,
}

/// Solver knobs; unset values fall back to stimulus-derived defaults
/// (dt = rise_time / 50, horizon = 10 * rise_time).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub grid_granularity: Option<usize>,
}

/// Output file paths; unset outputs are skipped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<String>,
    pub netlist: Option<String>,
    pub waveforms: Option<String>,
}

/// One scenario: an application on a topology with optional overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Builtin name ("loihi", "epyc", "tpu") when `app_spec` is unset.
    pub app: Option<String>,
    /// Full inline application spec; wins over `app`.
    pub app_spec: Option<ApplicationSpec>,
    /// Topology name; required for `run`, ignored by the matrix.
    pub topology: Option<String>,
    /// Overrides applied onto the topology defaults (same JSON shape as
    /// `TopologyConfig` minus `kind`).
    pub topology_overrides: Option<Value>,
    /// Overrides applied onto `PlatformFeatures::default()`.
    pub platform: Option<Value>,
    /// Overrides applied onto `MaterialProperties::default()`.
    pub materials: Option<Value>,
    #[serde(default)]
    pub extraction: ExtractionOverrides,
    /// Interpolation point inside every decap catalog range, [0, 1].
    pub decap_density_point: Option<f64>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    /// Ranking weights for `compare`.
    pub weights: Option<RankWeights>,
}

/// Everything produced by one scenario run.
pub struct ScenarioOutput {
    pub app: ApplicationSpec,
    pub topology: TopologyConfig,
    pub floorplan: Floorplan,
    pub netlist: PdnNetlist,
    pub dc: SolveResult,
    pub transient: TransientResult,
    pub report: FomReport,
}

fn merge_overrides<T: Serialize + for<'de> Deserialize<'de>>(
    base: &T,
    overrides: &Value,
    what: &str,
) -> Result<T> {
    let mut v = serde_json::to_value(base).expect("serializable base");
    let obj = overrides
        .as_object()
        .ok_or_else(|| Error::Config(format!("{what} overrides must be a JSON object")))?;
    let target = v
        .as_object_mut()
        .expect("base serializes to an object");
    for (k, val) in obj {
        if !target.contains_key(k) {
            return Err(Error::Config(format!("unknown {what} field '{k}'")));
        }
        if let (Some(t), Some(o)) = (target[k].as_object(), val.as_object()) {
            // one level of nesting (converter classes)
            let mut merged = t.clone();
            for (kk, vv) in o {
                if !merged.contains_key(kk) {
                    return Err(Error::Config(format!("unknown {what} field '{k}.{kk}'")));
                }
                merged.insert(kk.clone(), vv.clone());
            }
            target.insert(k.clone(), Value::Object(merged));
        } else {
            target.insert(k.clone(), val.clone());
        }
    }
    serde_json::from_value(v).map_err(|e| Error::Config(format!("bad {what} overrides: {e}")))
}

/// Resolved inputs for one scenario.
pub struct ResolvedScenario {
    pub app: ApplicationSpec,
    pub topology: TopologyConfig,
    pub features: PlatformFeatures,
    pub materials: MaterialProperties,
    pub extraction_overrides: ExtractionOverrides,
    pub decap_density_point: f64,
    pub solver: SolverConfig,
}

pub fn resolve(config: &ScenarioConfig) -> Result<ResolvedScenario> {
    let app = match (&config.app_spec, &config.app) {
        (Some(spec), _) => spec.clone(),
        (None, Some(name)) => builtin_application_by_name(name)?,
        (None, None) => return Err(Error::Config("no application selected".to_string())),
    };
    app.validate()?;

    let kind = match &config.topology {
        Some(name) => TopologyKind::parse(name)?,
        None => return Err(Error::Config("no topology selected".to_string())),
    };
    let mut topology = TopologyConfig::new(kind);
    if let Some(overrides) = &config.topology_overrides {
        // `kind` is fixed by the `topology` field; reject attempts to change it
        if overrides.get("kind").is_some() {
            return Err(Error::Config(
                "set the topology through the 'topology' field, not overrides".to_string(),
            ));
        }
        topology = merge_overrides(&topology, overrides, "topology")?;
        topology.kind = kind;
    }
    topology.validate()?;

    let mut features = PlatformFeatures::default();
    if let Some(overrides) = &config.platform {
        features = merge_overrides(&features, overrides, "platform")?;
    }
    features.validate()?;

    let mut materials = MaterialProperties::default();
    if let Some(overrides) = &config.materials {
        materials = merge_overrides(&materials, overrides, "materials")?;
    }
    materials.validate()?;

    let decap_density_point = config.decap_density_point.unwrap_or(0.5);
    if !(0.0..=1.0).contains(&decap_density_point) {
        return Err(Error::Config(format!(
            "decap_density_point {decap_density_point} outside [0, 1]"
        )));
    }

    Ok(ResolvedScenario {
        app,
        topology,
        features,
        materials,
        extraction_overrides: config.extraction.clone(),
        decap_density_point,
        solver: config.solver.clone(),
    })
}

/// Runs one scenario end to end: floorplan, netlist, DC solve, transient
/// solve, report.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let resolved = resolve(config)?;
    run_resolved(&resolved)
}

pub fn run_resolved(r: &ResolvedScenario) -> Result<ScenarioOutput> {
    let plan = place_dielets(&r.features, &r.app, &r.topology)?;
    let mut ex = ExtractionParams::derive(&r.features, &r.materials, &r.app, &plan);
    if let Some(v) = r.extraction_overrides.twv_per_dielet {
        ex.twv_per_dielet = v;
    }
    if let Some(v) = r.extraction_overrides.pillar_pairs_per_dielet {
        ex.pillar_pairs_per_dielet = v;
    }
    if let Some(v) = r.extraction_overrides.pins_total {
        ex.pins_total = v;
    }
    if let Some(v) = r.extraction_overrides.bga_per_tile {
        ex.bga_per_tile = v;
    }
    ex.validate()?;

    let granularity = r.solver.grid_granularity.unwrap_or(32);
    let netlist = build_pdn(
        &r.topology,
        &r.app,
        &plan,
        &ex,
        granularity,
        r.decap_density_point,
    )?;

    let dc = solve_dc(&netlist)?;
    let loads = LoadModel::from_app(&r.app);
    let dt = r.solver.dt.unwrap_or(loads.rise_time / 50.0);
    let horizon = r.solver.horizon.unwrap_or(10.0 * loads.rise_time);
    let transient = solve_transient(&netlist, &loads, dt, horizon, None)?;

    let report = build_report(&r.app, &r.topology, &r.features, &plan, &netlist, &dc, &transient)?;

    Ok(ScenarioOutput {
        app: r.app.clone(),
        topology: r.topology.clone(),
        floorplan: plan,
        netlist,
        dc,
        transient,
        report,
    })
}

fn build_report(
    app: &ApplicationSpec,
    topology: &TopologyConfig,
    features: &PlatformFeatures,
    _plan: &Floorplan,
    netlist: &PdnNetlist,
    dc: &SolveResult,
    transient: &TransientResult,
) -> Result<FomReport> {
    let capacity = fd_count(topology.kind, app.dielet.area_mm2, features.wafer_area_mm2)?;
    let pol = app.dielet.supply_voltage_v;

    // worst DC drop over the supply nodes
    let mut dc_drop_worst: f64 = 0.0;
    for &n in &netlist.fd_nodes() {
        dc_drop_worst = dc_drop_worst.max(pol - dc.node_voltages[n]);
    }

    let pb = power_balance(dc, netlist);
    let inductive_loss =
        transient.ringing_energy_j * topology.converter_switching_frequency;

    let mut flags = Vec::new();
    if app.name == "epyc" {
        flags.push(
            "computing performance derived as fd_count x per-dielet throughput (0.61 TFLOPS); \
             aggregate performance figures published elsewhere for this product are not \
             reproducible from the per-dielet value"
                .to_string(),
        );
    }

    Ok(FomReport {
        topology: topology.kind,
        app: app.name.clone(),
        fd_count: capacity,
        delivered_power_w: delivered_power(capacity, app.dielet.effective_tdp_w()),
        computing_performance_pflops: computing_performance(
            capacity,
            app.dielet.throughput_tflops,
        ),
        dc_drop_worst_v: dc_drop_worst,
        inductive_droop_worst_v: transient.worst_droop,
        resistive_loss_w: pb.resistive_loss,
        inductive_loss_w: inductive_loss,
        normalized: None,
        flags,
    })
}

/// Comparison across topologies (and apps, for the full matrix).
pub struct Comparison {
    pub reports: Vec<FomReport>,
    pub rankings: Vec<(String, Vec<RankedTopology>)>,
}

/// Runs every (app, topology) pair of the builtin matrix, normalizes each
/// app's reports to its PT baseline, and ranks.
pub fn run_matrix(base: &ScenarioConfig, weights: RankWeights) -> Result<Comparison> {
    let apps = ["loihi", "epyc", "tpu"];
    let mut reports = Vec::new();
    let mut rankings = Vec::new();
    for app in apps {
        let mut app_reports = Vec::new();
        for kind in TopologyKind::ALL {
            let mut cfg = base.clone();
            cfg.app = Some(app.to_string());
            cfg.app_spec = None;
            cfg.topology = Some(kind.name().to_string());
            let out = run_scenario(&cfg)?;
            app_reports.push(out.report);
        }
        let normalized = normalize_to_pt(&app_reports)?;
        let ranked = rank_topologies(&normalized, weights)?;
        rankings.push((app.to_string(), ranked));
        reports.extend(normalized);
    }
    Ok(Comparison { reports, rankings })
}

/// Runs a set of same-app scenario configs and compares them.
pub fn run_compare(configs: &[ScenarioConfig], weights: RankWeights) -> Result<Comparison> {
    if configs.len() < 2 {
        return Err(Error::Config(
            "compare needs at least two scenarios".to_string(),
        ));
    }
    let mut reports = Vec::new();
    for cfg in configs {
        reports.push(run_scenario(cfg)?.report);
    }
    let app = reports[0].app.clone();
    if reports.iter().any(|r| r.app != app) {
        return Err(Error::Config(
            "compare requires scenarios for a single application".to_string(),
        ));
    }
    let normalized = normalize_to_pt(&reports)?;
    let ranked = rank_topologies(&normalized, weights)?;
    Ok(Comparison {
        reports: normalized,
        rankings: vec![(app, ranked)],
    })
}

impl Comparison {
    /// One CSV row per (app, topology), deterministic field order, no
    /// run metadata inside the payload.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "app,topology,fd_count,delivered_power_w,computing_performance_pflops,\
             dc_drop_worst_v,inductive_droop_worst_v,resistive_loss_w,inductive_loss_w,\
             normalized_drop,normalized_loss,rank\n",
        );
        for r in &self.reports {
            let rank = self
                .rankings
                .iter()
                .find(|(app, _)| *app == r.app)
                .and_then(|(_, ranked)| {
                    ranked
                        .iter()
                        .position(|x| x.topology == r.topology)
                        .map(|p| p + 1)
                })
                .map(|p| p.to_string())
                .unwrap_or_default();
            let n = r.normalized.expect("comparison reports are normalized");
            out.push_str(&format!(
                "{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{:.6e},{}\n",
                r.app,
                r.topology.name(),
                r.fd_count,
                r.delivered_power_w,
                r.computing_performance_pflops,
                r.dc_drop_worst_v,
                r.inductive_droop_worst_v,
                r.resistive_loss_w,
                r.inductive_loss_w,
                n.drop,
                n.loss,
                rank,
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "reports": self.reports,
            "rankings": self.rankings.iter().map(|(app, ranked)| {
                serde_json::json!({
                    "app": app,
                    "order": ranked.iter().map(|r| serde_json::json!({
                        "topology": r.topology.name(),
                        "score": r.score,
                    })).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
        })
    }
}

/// Waveform dump: `time_s,node_label,voltage_v` rows for every probed node.
pub fn waveforms_csv(transient: &TransientResult) -> String {
    let mut out = String::from("time_s,node_label,voltage_v\n");
    for w in &transient.waveforms {
        for (t, v) in transient.time_axis.iter().zip(&w.voltages) {
            out.push_str(&format!("{:.9e},{},{:.9e}\n", t, w.label, v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config(app: &str, topology: &str) -> ScenarioConfig {
        ScenarioConfig {
            app: Some(app.to_string()),
            topology: Some(topology.to_string()),
            ..Default::default()
        }
    }

    #[test]
    fn loihi_pt_report_has_the_capacity_count() {
        let out = run_scenario(&quick_config("loihi", "pt")).unwrap();
        assert_eq!(out.report.fd_count, 825);
        assert!((out.report.delivered_power_w - 70.125).abs() < 0.085);
        assert!(out.report.dc_drop_worst_v > 0.0);
    }

    #[test]
    fn unknown_fields_in_overrides_are_config_errors() {
        let mut cfg = quick_config("loihi", "pt");
        cfg.platform = Some(serde_json::json!({"wafer_diamter_mm": 200.0}));
        assert!(matches!(run_scenario(&cfg), Err(Error::Config(_))));
    }

    fn coarse(mut cfg: ScenarioConfig) -> ScenarioConfig {
        // a handful of transient steps is plenty for override checks
        cfg.solver.dt = Some(1.0 / 0.032e9 / 5.0);
        cfg
    }

    #[test]
    fn platform_overrides_apply() {
        let mut cfg = coarse(quick_config("loihi", "pt"));
        cfg.platform = Some(serde_json::json!({"interconnect_layers": 2}));
        let out = run_scenario(&cfg).unwrap();
        // halving the layers doubles the sheet resistance; drop rises
        let base = run_scenario(&coarse(quick_config("loihi", "pt"))).unwrap();
        assert!(out.report.dc_drop_worst_v > base.report.dc_drop_worst_v);
    }

    #[test]
    fn converter_class_overrides_apply() {
        let mut cfg = coarse(quick_config("loihi", "bt1"));
        cfg.topology_overrides = Some(serde_json::json!({
            "board_converter": {"output_resistance": 10e-3}
        }));
        let out = run_scenario(&cfg).unwrap();
        let base = run_scenario(&coarse(quick_config("loihi", "bt1"))).unwrap();
        assert!(out.report.dc_drop_worst_v > base.report.dc_drop_worst_v);
    }

    #[test]
    fn epyc_reports_carry_the_throughput_flag() {
        let out = run_scenario(&quick_config("epyc", "bt1")).unwrap();
        assert!(!out.report.flags.is_empty());
        let loihi = run_scenario(&quick_config("loihi", "bt1")).unwrap();
        assert!(loihi.report.flags.is_empty());
    }
}
