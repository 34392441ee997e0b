//! Catalog of platform geometry, decap stages, and application specs.
//!
//! Everything here is immutable reference data: the interposer feature
//! dimensions, the decoupling-capacitor stage parameters per topology, and
//! the per-application dielet electrical specs. User overrides go through
//! [`PlatformFeatures::validate`] before any downstream use.

use crate::error::{Error, Result, Violation};
use crate::floorplan::TopologyKind;
use serde::{Deserialize, Serialize};

/// Geometric feature dimensions of the wafer-scale interposer platform.
///
/// Lengths carry their unit in the field name. Defaults describe a 300 mm
/// wafer with 2 um interconnect on a 4 um pitch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlatformFeatures {
    pub wafer_diameter_mm: f64,
    pub wafer_thickness_mm: f64,
    pub wafer_area_mm2: f64,
    pub inter_dielet_pitch_um: f64,
    pub pillar_diameter_um: f64,
    pub pillar_height_um: f64,
    pub pillar_pitch_um: f64,
    pub pin_diameter_mm: f64,
    pub pin_height_mm: f64,
    pub pin_pitch_mm: f64,
    pub twv_diameter_um: f64,
    pub twv_height_um: f64,
    pub twv_pitch_um: f64,
    pub interconnect_width_um: f64,
    pub interconnect_thickness_um: f64,
    pub interconnect_pitch_um: f64,
    pub interconnect_layers: u32,
    pub pad_area_um2: f64,
    pub bga_diameter_um: f64,
    pub bga_height_um: f64,
}

impl Default for PlatformFeatures {
    fn default() -> Self {
        Self {
            wafer_diameter_mm: 300.0,
            wafer_thickness_mm: 0.5,
            wafer_area_mm2: 70_685.0,
            inter_dielet_pitch_um: 100.0,
            pillar_diameter_um: 5.0,
            pillar_height_um: 5.0,
            pillar_pitch_um: 10.0,
            pin_diameter_mm: 1.5,
            pin_height_mm: 20.0,
            pin_pitch_mm: 3.0,
            twv_diameter_um: 100.0,
            twv_height_um: 500.0,
            twv_pitch_um: 200.0,
            interconnect_width_um: 2.0,
            interconnect_thickness_um: 2.0,
            interconnect_pitch_um: 4.0,
            interconnect_layers: 4,
            pad_area_um2: 20.0,
            bga_diameter_um: 300.0,
            bga_height_um: 200.0,
        }
    }
}

impl PlatformFeatures {
    /// Checks every invariant and returns the full list of violations,
    /// not just the first one found.
    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) {
                violations.push(Violation {
                    field: name.to_string(),
                    message: format!("must be strictly positive, got {v}"),
                });
            }
        };
        positive("wafer_diameter_mm", self.wafer_diameter_mm);
        positive("wafer_thickness_mm", self.wafer_thickness_mm);
        positive("wafer_area_mm2", self.wafer_area_mm2);
        positive("inter_dielet_pitch_um", self.inter_dielet_pitch_um);
        positive("pillar_diameter_um", self.pillar_diameter_um);
        positive("pillar_height_um", self.pillar_height_um);
        positive("pillar_pitch_um", self.pillar_pitch_um);
        positive("pin_diameter_mm", self.pin_diameter_mm);
        positive("pin_height_mm", self.pin_height_mm);
        positive("pin_pitch_mm", self.pin_pitch_mm);
        positive("twv_diameter_um", self.twv_diameter_um);
        positive("twv_height_um", self.twv_height_um);
        positive("twv_pitch_um", self.twv_pitch_um);
        positive("interconnect_width_um", self.interconnect_width_um);
        positive("interconnect_thickness_um", self.interconnect_thickness_um);
        positive("interconnect_pitch_um", self.interconnect_pitch_um);
        positive("pad_area_um2", self.pad_area_um2);
        positive("bga_diameter_um", self.bga_diameter_um);
        positive("bga_height_um", self.bga_height_um);

        if !(2..=4).contains(&self.interconnect_layers) {
            violations.push(Violation {
                field: "interconnect_layers".to_string(),
                message: format!("must be in [2, 4], got {}", self.interconnect_layers),
            });
        }

        let disc_area = std::f64::consts::PI * (self.wafer_diameter_mm / 2.0).powi(2);
        if disc_area > 0.0 && ((self.wafer_area_mm2 - disc_area) / disc_area).abs() > 1e-3 {
            violations.push(Violation {
                field: "wafer_area_mm2".to_string(),
                message: format!(
                    "inconsistent with pi*(diameter/2)^2 = {disc_area:.1} mm2 (0.1% tolerance)"
                ),
            });
        }

        if self.twv_height_um > self.wafer_thickness_mm * 1000.0 {
            violations.push(Violation {
                field: "twv_height_um".to_string(),
                message: format!(
                    "exceeds wafer thickness {} um",
                    self.wafer_thickness_mm * 1000.0
                ),
            });
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }

    pub fn wafer_radius_mm(&self) -> f64 {
        self.wafer_diameter_mm / 2.0
    }
}

/// Conductor material constants used by the parasitic extraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MaterialProperties {
    /// Cu bulk resistivity at room temperature, ohm*m.
    pub cu_resistivity: f64,
    /// mu_0, H/m.
    pub vacuum_permeability: f64,
}

impl Default for MaterialProperties {
    fn default() -> Self {
        Self {
            cu_resistivity: 1.68e-8,
            vacuum_permeability: 4.0e-7 * std::f64::consts::PI,
        }
    }
}

impl MaterialProperties {
    pub fn validate(&self) -> Result<()> {
        if self.cu_resistivity > 0.0 && self.vacuum_permeability > 0.0 {
            Ok(())
        } else {
            Err(Error::Validation(vec![Violation {
                field: "cu_resistivity".to_string(),
                message: "material constants must be positive".to_string(),
            }]))
        }
    }
}

/// Where a decap bank physically sits in the delivery stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecapLocation {
    Pcb,
    WaferBackside,
    WaferTopside,
    UdInternal,
    FdInternal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecapKind {
    Electrolytic,
    Ceramic,
    Dtcap,
    Cmos,
}

/// Series loss spec of a decap bank: either an explicit ESR range or an
/// RC time-constant bound from which ESR is derived per bank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EsrSpec {
    /// ESR range in milliohm.
    ResistanceMohm { min: f64, max: f64 },
    /// RC time-constant bound in nanoseconds.
    RcBoundNs { min: f64, max: f64 },
}

/// One stage of the three-stage decap hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecapStage {
    pub location: DecapLocation,
    pub kind: DecapKind,
    /// Capacitance density range, nF/mm^2.
    pub density_nf_per_mm2: (f64, f64),
    /// ESL range, nH. (0, 0) means negligible and no inductor is inserted.
    pub esl_nh: (f64, f64),
    pub esr: EsrSpec,
}

impl DecapStage {
    fn new(
        location: DecapLocation,
        kind: DecapKind,
        density: (f64, f64),
        esl: (f64, f64),
        esr: EsrSpec,
    ) -> Self {
        Self {
            location,
            kind,
            density_nf_per_mm2: density,
            esl_nh: esl,
            esr,
        }
    }

    fn pcb_electrolytic() -> Self {
        Self::new(
            DecapLocation::Pcb,
            DecapKind::Electrolytic,
            (2_600.0, 4_800.0),
            (3_000.0, 6_000.0),
            EsrSpec::ResistanceMohm { min: 10.0, max: 20.0 },
        )
    }

    fn backside_ceramic() -> Self {
        Self::new(
            DecapLocation::WaferBackside,
            DecapKind::Ceramic,
            (8_800.0, 40_000.0),
            (300.0, 400.0),
            EsrSpec::ResistanceMohm { min: 10.0, max: 20.0 },
        )
    }

    fn topside_dtcap() -> Self {
        Self::new(
            DecapLocation::WaferTopside,
            DecapKind::Dtcap,
            (300.0, 1_500.0),
            (0.0, 0.0),
            EsrSpec::RcBoundNs { min: 2.0, max: 20.0 },
        )
    }

    fn ud_cmos() -> Self {
        Self::new(
            DecapLocation::UdInternal,
            DecapKind::Cmos,
            (1.0, 3.0),
            (0.0, 0.0),
            EsrSpec::RcBoundNs { min: 0.0, max: 250.0 },
        )
    }

    fn fd_cmos() -> Self {
        Self::new(
            DecapLocation::FdInternal,
            DecapKind::Cmos,
            (1.0, 3.0),
            (0.0, 0.0),
            EsrSpec::RcBoundNs { min: 0.0, max: 250.0 },
        )
    }
}

/// The decap hierarchy used by a topology, always three stages.
pub fn decap_stages_for(topology: TopologyKind) -> Vec<DecapStage> {
    match topology {
        TopologyKind::Pt => vec![
            DecapStage::topside_dtcap(),
            DecapStage::ud_cmos(),
            DecapStage::fd_cmos(),
        ],
        TopologyKind::Bt1 | TopologyKind::Bt3 => vec![
            DecapStage::pcb_electrolytic(),
            DecapStage::backside_ceramic(),
            DecapStage::topside_dtcap(),
        ],
        TopologyKind::Bt2_8 | TopologyKind::Bt2_24 => vec![
            DecapStage::pcb_electrolytic(),
            DecapStage::topside_dtcap(),
            DecapStage::ud_cmos(),
        ],
    }
}

/// Electrical and performance parameters of one dielet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DieletSpec {
    pub name: String,
    pub area_mm2: f64,
    pub tdp_w: f64,
    pub supply_voltage_v: f64,
    pub current_a: f64,
    pub frequency_ghz: f64,
    pub throughput_tflops: f64,
    /// Extra power budget for inter-dielet links, folded into the
    /// effective TDP when nonzero.
    #[serde(default)]
    pub comm_power_adder_w: f64,
}

impl DieletSpec {
    /// TDP plus the communication adder; the load model uses this.
    pub fn effective_tdp_w(&self) -> f64 {
        self.tdp_w + self.comm_power_adder_w
    }

    /// Per-dielet DC load current at the supply voltage.
    pub fn dc_current_a(&self) -> f64 {
        self.effective_tdp_w() / self.supply_voltage_v
    }

    pub fn validate(&self) -> Result<()> {
        let mut violations = Vec::new();
        let fields = [
            ("area_mm2", self.area_mm2),
            ("tdp_w", self.tdp_w),
            ("supply_voltage_v", self.supply_voltage_v),
            ("current_a", self.current_a),
            ("frequency_ghz", self.frequency_ghz),
            ("throughput_tflops", self.throughput_tflops),
        ];
        for (name, v) in fields {
            if !(v > 0.0) {
                violations.push(Violation {
                    field: name.to_string(),
                    message: format!("must be positive, got {v}"),
                });
            }
        }
        if self.comm_power_adder_w < 0.0 {
            violations.push(Violation {
                field: "comm_power_adder_w".to_string(),
                message: "must be non-negative".to_string(),
            });
        }
        if self.supply_voltage_v > 0.0 && self.current_a > 0.0 {
            let ratio = self.tdp_w / (self.supply_voltage_v * self.current_a);
            if !(0.9..=1.1).contains(&ratio) {
                violations.push(Violation {
                    field: "tdp_w".to_string(),
                    message: format!(
                        "tdp / (supply_voltage * current) = {ratio:.3}, outside [0.9, 1.1]"
                    ),
                });
            }
        }
        if !(1.0..=100.0).contains(&self.area_mm2) {
            violations.push(Violation {
                field: "area_mm2".to_string(),
                message: format!("outside the supported dielet range 1-100 mm2: {}", self.area_mm2),
            });
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(violations))
        }
    }
}

/// Built-in application identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinApp {
    Loihi,
    Epyc,
    Tpu,
}

impl BuiltinApp {
    pub const ALL: [BuiltinApp; 3] = [BuiltinApp::Loihi, BuiltinApp::Epyc, BuiltinApp::Tpu];

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "loihi" => Ok(BuiltinApp::Loihi),
            "epyc" => Ok(BuiltinApp::Epyc),
            "tpu" => Ok(BuiltinApp::Tpu),
            other => Err(Error::UnknownApplication(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinApp::Loihi => "loihi",
            BuiltinApp::Epyc => "epyc",
            BuiltinApp::Tpu => "tpu",
        }
    }
}

/// A full application description: the dielet plus the supply rails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicationSpec {
    pub name: String,
    pub dielet: DieletSpec,
    /// Board-level input rail, V.
    pub input_voltage_v: f64,
    /// Mid rail used by the two-stage hybrid topology only, V.
    pub intermediate_voltage_v: f64,
}

impl ApplicationSpec {
    pub fn validate(&self) -> Result<()> {
        self.dielet.validate()?;
        if self.input_voltage_v <= self.dielet.supply_voltage_v {
            return Err(Error::Validation(vec![Violation {
                field: "input_voltage_v".to_string(),
                message: format!(
                    "input voltage {} must exceed dielet supply {}",
                    self.input_voltage_v, self.dielet.supply_voltage_v
                ),
            }]));
        }
        if self.intermediate_voltage_v <= self.dielet.supply_voltage_v
            || self.intermediate_voltage_v >= self.input_voltage_v
        {
            return Err(Error::Validation(vec![Violation {
                field: "intermediate_voltage_v".to_string(),
                message: format!(
                    "intermediate voltage {} must sit between supply {} and input {}",
                    self.intermediate_voltage_v,
                    self.dielet.supply_voltage_v,
                    self.input_voltage_v
                ),
            }]));
        }
        Ok(())
    }
}

/// Returns the catalog entry for a built-in application.
pub fn builtin_application(app: BuiltinApp) -> ApplicationSpec {
    let dielet = match app {
        BuiltinApp::Loihi => DieletSpec {
            name: "loihi".to_string(),
            area_mm2: 60.0,
            tdp_w: 0.085,
            supply_voltage_v: 1.0,
            current_a: 0.085,
            frequency_ghz: 0.032,
            throughput_tflops: 1.26,
            comm_power_adder_w: 0.0,
        },
        BuiltinApp::Epyc => DieletSpec {
            name: "epyc".to_string(),
            area_mm2: 85.0,
            tdp_w: 25.0,
            supply_voltage_v: 1.0,
            current_a: 25.0,
            frequency_ghz: 3.0,
            throughput_tflops: 0.61,
            comm_power_adder_w: 0.0,
        },
        BuiltinApp::Tpu => DieletSpec {
            name: "tpu".to_string(),
            area_mm2: 82.0,
            tdp_w: 40.0,
            supply_voltage_v: 1.8,
            current_a: 22.22,
            frequency_ghz: 0.7,
            throughput_tflops: 6.0,
            comm_power_adder_w: 0.0,
        },
    };
    ApplicationSpec {
        name: app.name().to_string(),
        dielet,
        input_voltage_v: 48.0,
        intermediate_voltage_v: 12.0,
    }
}

/// Looks up a built-in application by name.
pub fn builtin_application_by_name(name: &str) -> Result<ApplicationSpec> {
    Ok(builtin_application(BuiltinApp::parse(name)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        PlatformFeatures::default().validate().unwrap();
        MaterialProperties::default().validate().unwrap();
    }

    #[test]
    fn builtin_catalog_matches_published_dielet_columns() {
        let loihi = builtin_application(BuiltinApp::Loihi);
        assert_eq!(loihi.dielet.area_mm2, 60.0);
        assert_eq!(loihi.dielet.tdp_w, 0.085);
        assert_eq!(loihi.dielet.supply_voltage_v, 1.0);
        assert_eq!(loihi.dielet.current_a, 0.085);
        assert_eq!(loihi.dielet.frequency_ghz, 0.032);
        assert_eq!(loihi.dielet.throughput_tflops, 1.26);

        let epyc = builtin_application(BuiltinApp::Epyc);
        assert_eq!(epyc.dielet.area_mm2, 85.0);
        assert_eq!(epyc.dielet.tdp_w, 25.0);
        assert_eq!(epyc.dielet.supply_voltage_v, 1.0);
        assert_eq!(epyc.dielet.current_a, 25.0);
        assert_eq!(epyc.dielet.frequency_ghz, 3.0);
        assert_eq!(epyc.dielet.throughput_tflops, 0.61);

        let tpu = builtin_application(BuiltinApp::Tpu);
        assert_eq!(tpu.dielet.area_mm2, 82.0);
        assert_eq!(tpu.dielet.tdp_w, 40.0);
        assert_eq!(tpu.dielet.supply_voltage_v, 1.8);
        assert_eq!(tpu.dielet.current_a, 22.22);
        assert_eq!(tpu.dielet.frequency_ghz, 0.7);
        assert_eq!(tpu.dielet.throughput_tflops, 6.0);
    }

    #[test]
    fn unknown_application_is_a_catalog_error() {
        assert!(matches!(
            builtin_application_by_name("cerebras"),
            Err(Error::UnknownApplication(_))
        ));
    }

    #[test]
    fn builtin_tdp_consistent_with_voltage_times_current() {
        for app in BuiltinApp::ALL {
            let spec = builtin_application(app);
            let d = &spec.dielet;
            let ratio = d.tdp_w / (d.supply_voltage_v * d.current_a);
            assert!(
                (0.9..=1.1).contains(&ratio),
                "{}: ratio {ratio}",
                spec.name
            );
            spec.validate().unwrap();
        }
    }

    #[test]
    fn decap_hierarchy_is_three_stages_everywhere() {
        for kind in TopologyKind::ALL {
            let stages = decap_stages_for(kind);
            assert_eq!(stages.len(), 3, "{kind:?}");
        }
    }

    #[test]
    fn decap_stage_membership_follows_the_catalog_rows() {
        let locs = |k: TopologyKind| -> Vec<DecapLocation> {
            decap_stages_for(k).iter().map(|s| s.location).collect()
        };
        assert_eq!(
            locs(TopologyKind::Pt),
            vec![
                DecapLocation::WaferTopside,
                DecapLocation::UdInternal,
                DecapLocation::FdInternal
            ]
        );
        for k in [TopologyKind::Bt1, TopologyKind::Bt3] {
            assert_eq!(
                locs(k),
                vec![
                    DecapLocation::Pcb,
                    DecapLocation::WaferBackside,
                    DecapLocation::WaferTopside
                ]
            );
        }
        for k in [TopologyKind::Bt2_8, TopologyKind::Bt2_24] {
            assert_eq!(
                locs(k),
                vec![
                    DecapLocation::Pcb,
                    DecapLocation::WaferTopside,
                    DecapLocation::UdInternal
                ]
            );
        }
        // backside ceramic stage carries the published density range
        let bt1 = decap_stages_for(TopologyKind::Bt1);
        let ceramic = bt1
            .iter()
            .find(|s| s.location == DecapLocation::WaferBackside)
            .unwrap();
        assert_eq!(ceramic.kind, DecapKind::Ceramic);
        assert_eq!(ceramic.density_nf_per_mm2, (8_800.0, 40_000.0));
        // no PCB stage for the peripheral topology
        assert!(decap_stages_for(TopologyKind::Pt)
            .iter()
            .all(|s| s.location != DecapLocation::Pcb));
    }

    #[test]
    fn validate_reports_every_violation() {
        let mut f = PlatformFeatures::default();
        f.interconnect_layers = 5;
        f.wafer_area_mm2 = 60_000.0;
        let err = f.validate().unwrap_err();
        match err {
            Error::Validation(v) => {
                assert!(v.iter().any(|x| x.field == "interconnect_layers"));
                assert!(v.iter().any(|x| x.field == "wafer_area_mm2"));
            }
            other => panic!("expected validation error, got {other}"),
        }
    }

    #[test]
    fn wafer_area_consistency_uses_disc_formula() {
        // pi * 150^2 = 70,686 mm2; the catalog value 70,685 is within 0.1%
        let f = PlatformFeatures::default();
        let disc = std::f64::consts::PI * 150.0_f64.powi(2);
        assert!((disc - 70_685.83).abs() < 0.01);
        f.validate().unwrap();
    }

    #[test]
    fn comm_power_adder_folds_into_tdp() {
        let mut d = builtin_application(BuiltinApp::Loihi).dielet;
        assert_eq!(d.effective_tdp_w(), 0.085);
        d.comm_power_adder_w = 0.01;
        assert!((d.effective_tdp_w() - 0.095).abs() < 1e-15);
        assert!((d.dc_current_a() - 0.095).abs() < 1e-15);
    }
}
