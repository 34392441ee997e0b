//! R, L, C element values from platform geometry.
//!
//! The element formulas here are standard reconstructions (DC resistance
//! of bars and cylinders, partial self-inductance of a rectangular bar,
//! metal-density-scaled sheet resistance); the platform source material
//! gives geometry but not an electrical model, so every formula is
//! documented at its definition and overridable through the extraction
//! parameters.

use crate::error::{Error, Result};
use crate::floorplan::Floorplan;
use crate::platform::{
    ApplicationSpec, DecapStage, EsrSpec, MaterialProperties, PlatformFeatures,
};
use serde::{Deserialize, Serialize};

/// Lumped element triple for one branch.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Parasitic {
    pub resistance: f64,
    pub inductance: f64,
    pub capacitance: f64,
}

/// Structure counts used when lumping vertical stacks and decap banks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionParams {
    pub features: PlatformFeatures,
    pub materials: MaterialProperties,
    /// Through-wafer vias per dielet (a 200 um pitch array fits at least
    /// this many under every catalog dielet).
    pub twv_per_dielet: u32,
    /// Power/ground pillar pairs per dielet: perimeter pads at the pillar
    /// pitch with a quarter of the budget allocated to power delivery.
    pub pillar_pairs_per_dielet: u32,
    /// Backside pins under the wafer (hex-packed at the pin pitch).
    pub pins_total: u32,
    /// Board attach balls per tile for the pin-less topologies.
    pub bga_per_tile: u32,
}

impl ExtractionParams {
    /// Derives default counts from the platform geometry and the placed plan.
    pub fn derive(
        features: &PlatformFeatures,
        materials: &MaterialProperties,
        app: &ApplicationSpec,
        _plan: &Floorplan,
    ) -> Self {
        let side_um = app.dielet.area_mm2.sqrt() * 1000.0;
        let perimeter_pads = 4.0 * side_um / features.pillar_pitch_um;
        let pillar_pairs = (0.25 * perimeter_pads).floor().max(1.0) as u32;
        Self {
            features: features.clone(),
            materials: materials.clone(),
            twv_per_dielet: 16,
            pillar_pairs_per_dielet: pillar_pairs,
            pins_total: hex_pin_count(features),
            bga_per_tile: 4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("twv_per_dielet", self.twv_per_dielet),
            ("pillar_pairs_per_dielet", self.pillar_pairs_per_dielet),
            ("pins_total", self.pins_total),
            ("bga_per_tile", self.bga_per_tile),
        ] {
            if v < 1 {
                return Err(Error::Domain {
                    context: "extraction".to_string(),
                    message: format!("{name} must be >= 1"),
                });
            }
        }
        Ok(())
    }
}

/// Hex-packed pin count under the wafer: rows at pitch*sqrt(3)/2 with
/// alternate-row offset, pin centers kept a pin radius from the edge.
pub fn hex_pin_count(features: &PlatformFeatures) -> u32 {
    let r_max = features.wafer_radius_mm() - features.pin_diameter_mm / 2.0;
    let pitch = features.pin_pitch_mm;
    let dy = pitch * 3.0_f64.sqrt() / 2.0;
    let rows = (features.wafer_radius_mm() / dy) as i64 + 2;
    let cols = (2.0 * features.wafer_radius_mm() / pitch) as i64 + 2;
    let mut count = 0u32;
    for k in -rows..=rows {
        let y = k as f64 * dy;
        let x_off = if k.rem_euclid(2) == 0 { 0.0 } else { pitch / 2.0 };
        for i in -cols..=cols {
            let x = i as f64 * pitch + x_off;
            if (x * x + y * y).sqrt() <= r_max {
                count += 1;
            }
        }
    }
    count
}

/// DC resistance of a rectangular trace: rho * l / (w * t).
pub fn trace_resistance(length_m: f64, width_m: f64, thickness_m: f64, resistivity: f64) -> Result<f64> {
    if length_m < 0.0 || !(width_m > 0.0) || !(thickness_m > 0.0) || !(resistivity > 0.0) {
        return Err(Error::Domain {
            context: "trace_resistance".to_string(),
            message: "length must be >= 0 and width/thickness/resistivity > 0".to_string(),
        });
    }
    Ok(resistivity * length_m / (width_m * thickness_m))
}

/// DC resistance of a cylindrical conductor: rho * h / (pi * (d/2)^2).
pub fn cylinder_resistance(diameter_m: f64, height_m: f64, resistivity: f64) -> Result<f64> {
    if !(diameter_m > 0.0) || !(height_m > 0.0) || !(resistivity > 0.0) {
        return Err(Error::Domain {
            context: "cylinder_resistance".to_string(),
            message: "diameter, height and resistivity must be positive".to_string(),
        });
    }
    let r = diameter_m / 2.0;
    Ok(resistivity * height_m / (std::f64::consts::PI * r * r))
}

/// Partial self-inductance of a rectangular bar:
/// (mu0 * l / 2pi) * [ln(2l/(w+t)) + 0.5 + 0.2235*(w+t)/l].
/// Valid for l >= w + t.
pub fn trace_inductance(length_m: f64, width_m: f64, thickness_m: f64) -> Result<f64> {
    if !(length_m > 0.0) || !(width_m > 0.0) || !(thickness_m > 0.0) {
        return Err(Error::Domain {
            context: "trace_inductance".to_string(),
            message: "dimensions must be positive".to_string(),
        });
    }
    let wt = width_m + thickness_m;
    if length_m < wt {
        return Err(Error::Domain {
            context: "trace_inductance".to_string(),
            message: format!("bar formula invalid for length {length_m} < width+thickness {wt}"),
        });
    }
    let mu0 = 4.0e-7 * std::f64::consts::PI;
    Ok(mu0 * length_m / (2.0 * std::f64::consts::PI)
        * ((2.0 * length_m / wt).ln() + 0.5 + 0.2235 * wt / length_m))
}

/// Self-inductance of a vertical cylinder, treated as a square bar of the
/// same diameter. Short stubs where the bar formula is invalid (height
/// below diameter * 2) contribute sub-picohenry values and return zero.
pub fn cylinder_inductance(diameter_m: f64, height_m: f64) -> f64 {
    trace_inductance(height_m, diameter_m, diameter_m).unwrap_or(0.0)
}

/// Effective sheet resistance of the topside power grid:
/// (rho / t) * (pitch / w) / (layers / 2). Half the layers carry power,
/// half carry the return.
pub fn grid_sheet_resistance(features: &PlatformFeatures, materials: &MaterialProperties) -> f64 {
    let rho = materials.cu_resistivity;
    let t = features.interconnect_thickness_um * 1e-6;
    let w = features.interconnect_width_um * 1e-6;
    let pitch = features.interconnect_pitch_um * 1e-6;
    let power_layers = features.interconnect_layers as f64 / 2.0;
    (rho / t) * (pitch / w) / power_layers
}

/// Parallel interconnect traces available to one dielet-wide strip:
/// (side / pitch) * (layers / 2).
pub fn strip_parallel_traces(features: &PlatformFeatures, strip_width_mm: f64) -> f64 {
    let lanes = strip_width_mm * 1000.0 / features.interconnect_pitch_um;
    lanes * features.interconnect_layers as f64 / 2.0
}

/// Lumped spreading resistance of a backside plane sector: sheet
/// resistance of a solid 35 um Cu plane times 0.5 squares.
pub fn plane_spreading_resistance(materials: &MaterialProperties) -> f64 {
    const PLANE_THICKNESS_M: f64 = 35e-6;
    const SPREADING_SQUARES: f64 = 0.5;
    materials.cu_resistivity / PLANE_THICKNESS_M * SPREADING_SQUARES
}

/// Builds a decap bank from a stage description and hosting area.
/// `density_point` in [0, 1] picks a point inside every published range
/// (0.5 = midpoint). Stages with an RC bound instead of an ESR range get
/// ESR = bound midpoint / C.
pub fn decap_bank(area_mm2: f64, stage: &DecapStage, density_point: f64) -> Result<Parasitic> {
    if !(area_mm2 > 0.0) {
        return Err(Error::Domain {
            context: "decap_bank".to_string(),
            message: format!("area must be positive, got {area_mm2}"),
        });
    }
    let t = density_point.clamp(0.0, 1.0);
    let lerp = |(lo, hi): (f64, f64)| lo + t * (hi - lo);

    let density = lerp(stage.density_nf_per_mm2);
    let capacitance = area_mm2 * density * 1e-9;
    let inductance = lerp(stage.esl_nh) * 1e-9;
    let resistance = match stage.esr {
        EsrSpec::ResistanceMohm { min, max } => lerp((min, max)) * 1e-3,
        EsrSpec::RcBoundNs { min, max } => {
            let rc = (min + max) / 2.0 * 1e-9;
            rc / capacitance
        }
    };
    Ok(Parasitic {
        resistance,
        inductance,
        capacitance,
    })
}
