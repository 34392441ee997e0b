//! PDN graph construction for the five topologies, plus the text
//! interchange format.
//!
//! Branch element values come from `parasitics`; the builders decide the
//! lumping. Converters are behavioral: an ideal voltage source at the
//! output voltage behind a bank output resistance (class resistance
//! divided by the parallel instance count), plus a bleed resistor across
//! the source that dissipates the per-instance quiescent overhead as
//! genuine in-network loss. Upstream rails see each bank as a constant
//! current draw of nominal output power / (efficiency * rail voltage).

use crate::error::{Error, Result};
use crate::floorplan::{Floorplan, TopologyConfig, TopologyKind};
use crate::parasitics::{
    cylinder_inductance, cylinder_resistance, decap_bank, grid_sheet_resistance,
    plane_spreading_resistance, strip_parallel_traces, trace_inductance, ExtractionParams,
};
use crate::platform::{decap_stages_for, ApplicationSpec, DecapLocation, DecapStage};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeRole {
    Ground,
    Source,
    Pcb,
    Backside,
    TopsideGrid,
    Ud,
    Fd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub label: String,
    pub role: NodeRole,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    Resistor,
    Inductor,
    Capacitor,
    VoltageSource,
    CurrentSource,
}

impl BranchKind {
    pub fn letter(&self) -> char {
        match self {
            BranchKind::Resistor => 'R',
            BranchKind::Inductor => 'L',
            BranchKind::Capacitor => 'C',
            BranchKind::VoltageSource => 'V',
            BranchKind::CurrentSource => 'I',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'R' => Some(BranchKind::Resistor),
            'L' => Some(BranchKind::Inductor),
            'C' => Some(BranchKind::Capacitor),
            'V' => Some(BranchKind::VoltageSource),
            'I' => Some(BranchKind::CurrentSource),
            _ => None,
        }
    }
}

/// A two-terminal element. Voltage sources impose `v(from) - v(to) =
/// value`; current sources push `value` amps from `from` to `to` through
/// themselves (a load is `from = supplied node, to = ground`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub kind: BranchKind,
    pub from: usize,
    pub to: usize,
    pub value: f64,
    pub label: String,
}

/// The PDN graph. Node 0 is always ground.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct PdnNetlist {
    pub nodes: Vec<Node>,
    pub branches: Vec<Branch>,
    /// Canonical decap attach nodes per location, chosen by the builder.
    /// Empty for netlists recovered from interchange text.
    #[serde(default)]
    pub decap_sites: BTreeMap<DecapLocation, Vec<usize>>,
}

impl PdnNetlist {
    pub fn new() -> Self {
        Self {
            nodes: vec![Node {
                label: "gnd".to_string(),
                role: NodeRole::Ground,
            }],
            branches: Vec::new(),
            decap_sites: BTreeMap::new(),
        }
    }

    pub const GROUND: usize = 0;

    pub fn add_node(&mut self, label: impl Into<String>, role: NodeRole) -> usize {
        self.nodes.push(Node {
            label: label.into(),
            role,
        });
        self.nodes.len() - 1
    }

    pub fn add_branch(
        &mut self,
        kind: BranchKind,
        from: usize,
        to: usize,
        value: f64,
        label: impl Into<String>,
    ) -> Result<()> {
        if from == to {
            return Err(Error::Build(format!(
                "branch with both ends on node {from}"
            )));
        }
        if from >= self.nodes.len() || to >= self.nodes.len() {
            return Err(Error::Build("branch references unknown node".to_string()));
        }
        if kind == BranchKind::Resistor && !(value > 0.0) {
            return Err(Error::Build(format!(
                "resistor value must be > 0, got {value}"
            )));
        }
        if (kind == BranchKind::Inductor || kind == BranchKind::Capacitor) && value < 0.0 {
            return Err(Error::Build(format!("negative {kind:?} value {value}")));
        }
        self.branches.push(Branch {
            kind,
            from,
            to,
            value,
            label: label.into(),
        });
        Ok(())
    }

    /// Indices of FD supply nodes.
    pub fn fd_nodes(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.role == NodeRole::Fd)
            .map(|(i, _)| i)
            .collect()
    }

    /// Load branches: the current sinks that follow the transient stimulus.
    /// By convention these carry labels starting with `load`.
    pub fn load_branches(&self) -> Vec<usize> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, b)| b.kind == BranchKind::CurrentSource && b.label.starts_with("load"))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn total_load_current(&self) -> f64 {
        self.load_branches()
            .iter()
            .map(|&i| self.branches[i].value)
            .sum()
    }

    pub fn node_index_by_label(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label == label)
    }

    /// Serializes to the interchange text format: one element per line,
    /// `<K><label> n<from> n<to> <value>` with ground printed as `0`,
    /// lines sorted by (kind, label), terminated by `.end`.
    pub fn export_interchange(&self) -> String {
        let mut lines: Vec<(u8, &str, String)> = self
            .branches
            .iter()
            .map(|b| {
                let kind_rank = match b.kind {
                    BranchKind::Resistor => 0,
                    BranchKind::Inductor => 1,
                    BranchKind::Capacitor => 2,
                    BranchKind::VoltageSource => 3,
                    BranchKind::CurrentSource => 4,
                };
                let node = |i: usize| {
                    if i == Self::GROUND {
                        "0".to_string()
                    } else {
                        format!("n{i}")
                    }
                };
                (
                    kind_rank,
                    b.label.as_str(),
                    format!(
                        "{}{} {} {} {:.10e}",
                        b.kind.letter(),
                        b.label,
                        node(b.from),
                        node(b.to),
                        b.value
                    ),
                )
            })
            .collect();
        lines.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut out = String::new();
        for (_, _, line) in lines {
            out.push_str(&line);
            out.push('\n');
        }
        out.push_str(".end\n");
        out
    }

    /// Parses interchange text back into a netlist. Node roles are
    /// inferred: voltage-source terminals become sources, current-source
    /// supply terminals become FDs, the rest become grid nodes.
    pub fn parse_interchange(text: &str) -> Result<Self> {
        let mut branches: Vec<Branch> = Vec::new();
        let mut max_node = 0usize;
        let mut saw_end = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineref = lineno + 1;
            if line.is_empty() {
                continue;
            }
            if saw_end {
                return Err(Error::Parse {
                    line: lineref,
                    message: "content after .end".to_string(),
                });
            }
            if line == ".end" {
                saw_end = true;
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().ok_or(Error::Parse {
                line: lineref,
                message: "empty element".to_string(),
            })?;
            let mut chars = head.chars();
            let kind = chars.next().and_then(BranchKind::from_letter).ok_or_else(|| {
                Error::Parse {
                    line: lineref,
                    message: format!("unknown element kind in '{head}'"),
                }
            })?;
            let label: String = chars.collect();
            let parse_node = |tok: Option<&str>| -> Result<usize> {
                let tok = tok.ok_or(Error::Parse {
                    line: lineref,
                    message: "missing node".to_string(),
                })?;
                if tok == "0" {
                    return Ok(0);
                }
                tok.strip_prefix('n')
                    .and_then(|s| s.parse::<usize>().ok())
                    .filter(|&i| i > 0)
                    .ok_or(Error::Parse {
                        line: lineref,
                        message: format!("bad node token '{tok}'"),
                    })
            };
            let from = parse_node(parts.next())?;
            let to = parse_node(parts.next())?;
            let value: f64 = parts
                .next()
                .ok_or(Error::Parse {
                    line: lineref,
                    message: "missing value".to_string(),
                })?
                .parse()
                .map_err(|_| Error::Parse {
                    line: lineref,
                    message: "bad value".to_string(),
                })?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: lineref,
                    message: "trailing tokens".to_string(),
                });
            }
            max_node = max_node.max(from).max(to);
            branches.push(Branch {
                kind,
                from,
                to,
                value,
                label,
            });
        }
        if !saw_end {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: "missing .end terminator".to_string(),
            });
        }

        let mut roles = vec![NodeRole::TopsideGrid; max_node + 1];
        roles[0] = NodeRole::Ground;
        for b in &branches {
            if b.kind == BranchKind::VoltageSource {
                for n in [b.from, b.to] {
                    if n != 0 {
                        roles[n] = NodeRole::Source;
                    }
                }
            }
        }
        for b in &branches {
            if b.kind == BranchKind::CurrentSource && b.from != 0 {
                roles[b.from] = NodeRole::Fd;
            }
        }
        let nodes = roles
            .into_iter()
            .enumerate()
            .map(|(i, role)| Node {
                label: if i == 0 { "gnd".to_string() } else { format!("n{i}") },
                role,
            })
            .collect();
        Ok(Self {
            nodes,
            branches,
            decap_sites: BTreeMap::new(),
        })
    }
}

/// Transient stimulus description for the FD loads: every load ramps from
/// `(1 - step_fraction) * dc_current` to `dc_current` over `rise_time`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadModel {
    pub dc_current: f64,
    pub step_fraction: f64,
    pub rise_time: f64,
}

impl LoadModel {
    pub fn from_app(app: &ApplicationSpec) -> Self {
        Self {
            dc_current: app.dielet.dc_current_a(),
            step_fraction: 0.8,
            rise_time: 1.0 / (app.dielet.frequency_ghz * 1e9),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dc_current > 0.0) {
            return Err(Error::Domain {
                context: "load_model".to_string(),
                message: "dc_current must be positive".to_string(),
            });
        }
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(Error::Domain {
                context: "load_model".to_string(),
                message: format!("step_fraction {} outside (0, 1]", self.step_fraction),
            });
        }
        if !(self.rise_time > 0.0) {
            return Err(Error::Domain {
                context: "load_model".to_string(),
                message: "rise_time must be positive".to_string(),
            });
        }
        Ok(())
    }
}

/// Default hosting areas for the decap hierarchy, mm^2 per location.
pub fn default_decap_areas(
    kind: TopologyKind,
    plan: &Floorplan,
    app: &ApplicationSpec,
    wafer_area_mm2: f64,
) -> BTreeMap<DecapLocation, f64> {
    let dielet_area = app.dielet.area_mm2;
    let mut areas = BTreeMap::new();
    for stage in decap_stages_for(kind) {
        let area = match stage.location {
            DecapLocation::Pcb => wafer_area_mm2,
            DecapLocation::WaferBackside => wafer_area_mm2,
            DecapLocation::WaferTopside => {
                if kind == TopologyKind::Pt {
                    0.30 * wafer_area_mm2
                } else {
                    plan.fd_count as f64 * dielet_area
                }
            }
            DecapLocation::UdInternal => {
                if kind == TopologyKind::Pt {
                    0.30 * wafer_area_mm2
                } else {
                    (plan.ud_count.max(1)) as f64 * dielet_area
                }
            }
            DecapLocation::FdInternal => plan.fd_count as f64 * dielet_area,
        };
        areas.insert(stage.location, area);
    }
    areas
}

/// Adds decap banks to a copy of the netlist: one series R(-L)-C chain per
/// attach site of the stage's location, with the location's hosting area
/// split evenly across its sites.
pub fn insert_decaps(
    netlist: &PdnNetlist,
    stages: &[DecapStage],
    areas: &BTreeMap<DecapLocation, f64>,
    density_point: f64,
) -> Result<PdnNetlist> {
    let mut out = netlist.clone();
    for stage in stages {
        let sites = netlist
            .decap_sites
            .get(&stage.location)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| {
                Error::Build(format!(
                    "no attach sites for decap location {:?}",
                    stage.location
                ))
            })?;
        let total_area = areas.get(&stage.location).copied().ok_or_else(|| {
            Error::Build(format!("no hosting area for decap location {:?}", stage.location))
        })?;
        let per_site = total_area / sites.len() as f64;
        for &site in sites {
            let bank = decap_bank(per_site, stage, density_point)?;
            let site_label = out.nodes[site].label.clone();
            // bank-internal nodes carry the generic grid role so role
            // queries (FD probing, decap siting) see only real structure
            let mid = out.add_node(format!("xdc_{site_label}"), NodeRole::TopsideGrid);
            out.add_branch(
                BranchKind::Resistor,
                site,
                mid,
                bank.resistance,
                format!("dcp_r_{site_label}"),
            )?;
            let cap_top = if bank.inductance > 0.0 {
                let mid2 = out.add_node(format!("xdl_{site_label}"), NodeRole::TopsideGrid);
                out.add_branch(
                    BranchKind::Inductor,
                    mid,
                    mid2,
                    bank.inductance,
                    format!("dcp_l_{site_label}"),
                )?;
                mid2
            } else {
                mid
            };
            out.add_branch(
                BranchKind::Capacitor,
                cap_top,
                PdnNetlist::GROUND,
                bank.capacitance,
                format!("dcp_c_{site_label}"),
            )?;
        }
    }
    Ok(out)
}

/// Angular sector of a position, `n_sectors` equal wedges.
fn sector_of(pos: (f64, f64), n_sectors: usize) -> usize {
    let angle = pos.1.atan2(pos.0); // [-pi, pi]
    let frac = (angle + std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
    ((frac * n_sectors as f64) as usize).min(n_sectors - 1)
}

struct BuildCtx<'a> {
    topo: &'a TopologyConfig,
    app: &'a ApplicationSpec,
    plan: &'a Floorplan,
    ex: &'a ExtractionParams,
    net: PdnNetlist,
}

impl BuildCtx<'_> {
    fn rho(&self) -> f64 {
        self.ex.materials.cu_resistivity
    }

    fn fd_current(&self) -> f64 {
        self.app.dielet.dc_current_a()
    }

    fn pol(&self) -> f64 {
        self.app.dielet.supply_voltage_v
    }

    /// Resistance of one dielet's pillar array.
    fn pillar_array_r(&self) -> f64 {
        let f = &self.ex.features;
        let one = cylinder_resistance(
            f.pillar_diameter_um * 1e-6,
            f.pillar_height_um * 1e-6,
            self.rho(),
        )
        .expect("validated geometry");
        one / self.ex.pillar_pairs_per_dielet as f64
    }

    /// R and L of one dielet's TWV array.
    fn twv_array(&self) -> (f64, f64) {
        let f = &self.ex.features;
        let d = f.twv_diameter_um * 1e-6;
        let h = f.twv_height_um * 1e-6;
        let n = self.ex.twv_per_dielet as f64;
        (
            cylinder_resistance(d, h, self.rho()).expect("validated geometry") / n,
            cylinder_inductance(d, h) / n,
        )
    }

    /// Converter bank: ideal source at `v_out` behind `class.r / n`
    /// with a quiescent-bleed resistor across the source. Returns the
    /// output rail node it feeds.
    fn add_converter_bank(
        &mut self,
        tag: &str,
        v_out: f64,
        bank_current: f64,
        class: crate::floorplan::ConverterClass,
        rail: usize,
    ) -> Result<()> {
        let n_inst = class.instances_for(bank_current) as f64;
        let cnode = self.net.add_node(format!("cnv_{tag}"), NodeRole::Source);
        self.net.add_branch(
            BranchKind::VoltageSource,
            cnode,
            PdnNetlist::GROUND,
            v_out,
            format!("cnv_{tag}"),
        )?;
        let r_out = (class.output_resistance / n_inst).max(1e-12);
        self.net.add_branch(
            BranchKind::Resistor,
            cnode,
            rail,
            r_out,
            format!("cnvr_{tag}"),
        )?;
        let p_q = class.quiescent_power * n_inst;
        if p_q > 0.0 {
            let r_bleed = v_out * v_out / p_q;
            self.net.add_branch(
                BranchKind::Resistor,
                cnode,
                PdnNetlist::GROUND,
                r_bleed,
                format!("cnvq_{tag}"),
            )?;
        }
        Ok(())
    }

    /// Constant upstream draw of a converter bank on its input rail.
    fn add_converter_input_draw(
        &mut self,
        tag: &str,
        node: usize,
        output_power: f64,
        input_voltage: f64,
    ) -> Result<()> {
        let eff = self.topo.converter_efficiency;
        let i_in = output_power / (eff * input_voltage);
        self.net.add_branch(
            BranchKind::CurrentSource,
            node,
            PdnNetlist::GROUND,
            i_in,
            format!("cin_{tag}"),
        )?;
        Ok(())
    }

    /// Vertical chain from a rail node down/up through spreading, the TWV
    /// array and the pillar array to a new FD node with its load.
    fn add_backside_fd_chain(&mut self, rail: usize, idx: usize) -> Result<usize> {
        let (twv_r, twv_l) = self.twv_array();
        let sprd = plane_spreading_resistance(&self.ex.materials);
        let s = self.net.add_node(format!("xbs_f{idx:04}"), NodeRole::Backside);
        self.net.add_branch(
            BranchKind::Resistor,
            rail,
            s,
            sprd,
            format!("sprd_f{idx:04}"),
        )?;
        let t = self.net.add_node(format!("top_f{idx:04}"), NodeRole::TopsideGrid);
        self.net.add_branch(
            BranchKind::Resistor,
            s,
            t,
            twv_r,
            format!("twv_r_f{idx:04}"),
        )?;
        let m = self.net.add_node(format!("xtw_f{idx:04}"), NodeRole::TopsideGrid);
        self.net.add_branch(
            BranchKind::Inductor,
            t,
            m,
            twv_l,
            format!("twv_l_f{idx:04}"),
        )?;
        let fd = self.net.add_node(format!("fd{idx:04}"), NodeRole::Fd);
        self.net.add_branch(
            BranchKind::Resistor,
            m,
            fd,
            self.pillar_array_r(),
            format!("pil_r_f{idx:04}"),
        )?;
        self.net.add_branch(
            BranchKind::CurrentSource,
            fd,
            PdnNetlist::GROUND,
            self.fd_current(),
            format!("load_f{idx:04}"),
        )?;
        self.net
            .decap_sites
            .entry(DecapLocation::WaferTopside)
            .or_default()
            .push(t);
        Ok(fd)
    }

    /// Lumped pin field: all pins in parallel between two rails.
    fn add_pin_field(&mut self, from: usize, to_label: &str) -> Result<usize> {
        let f = &self.ex.features;
        let n = self.ex.pins_total as f64;
        let pin_r =
            cylinder_resistance(f.pin_diameter_mm * 1e-3, f.pin_height_mm * 1e-3, self.rho())
                .expect("validated geometry")
                / n;
        let pin_l = cylinder_inductance(f.pin_diameter_mm * 1e-3, f.pin_height_mm * 1e-3) / n;
        let mid = self.net.add_node("xpin".to_string(), NodeRole::Backside);
        self.net
            .add_branch(BranchKind::Resistor, from, mid, pin_r, "pin_r")?;
        let plane = self.net.add_node(to_label.to_string(), NodeRole::Backside);
        self.net
            .add_branch(BranchKind::Inductor, mid, plane, pin_l, "pin_l")?;
        Ok(plane)
    }
}

/// Builds the complete PDN for a scenario, decap banks included.
///
/// `grid_granularity` sets the angular sector count used to lump the
/// peripheral ring and the backside converter banks (default 32).
pub fn build_pdn(
    topo: &TopologyConfig,
    app: &ApplicationSpec,
    plan: &Floorplan,
    ex: &ExtractionParams,
    grid_granularity: usize,
    decap_density_point: f64,
) -> Result<PdnNetlist> {
    if plan.topology.kind != topo.kind {
        return Err(Error::Build(format!(
            "floorplan was generated for {:?}, not {:?}",
            plan.topology.kind, topo.kind
        )));
    }
    topo.validate()?;
    app.validate()?;
    ex.validate()?;
    if grid_granularity == 0 {
        return Err(Error::Build("grid_granularity must be >= 1".to_string()));
    }

    let mut ctx = BuildCtx {
        topo,
        app,
        plan,
        ex,
        net: PdnNetlist::new(),
    };

    let src = ctx.net.add_node("src", NodeRole::Source);
    ctx.net.add_branch(
        BranchKind::VoltageSource,
        src,
        PdnNetlist::GROUND,
        app.input_voltage_v,
        "src48",
    )?;

    match topo.kind {
        TopologyKind::Pt => build_pt(&mut ctx, src, grid_granularity)?,
        TopologyKind::Bt1 => build_bt1(&mut ctx, src)?,
        TopologyKind::Bt2_8 | TopologyKind::Bt2_24 => build_bt2(&mut ctx, src)?,
        TopologyKind::Bt3 => build_bt3(&mut ctx, src, grid_granularity)?,
    }

    let netlist = ctx.net;
    let areas = default_decap_areas(topo.kind, plan, app, ex.features.wafer_area_mm2);
    insert_decaps(&netlist, &decap_stages_for(topo.kind), &areas, decap_density_point)
}

/// Peripheral ring: per-sector converter banks on the ring, each FD fed by
/// a radial strip of its own width (sheet resistance times squares from
/// its ring distance), then the pillar array.
fn build_pt(ctx: &mut BuildCtx, src: usize, n_sectors: usize) -> Result<()> {
    let plan = ctx.plan;
    let ring_r = plan
        .ring_inner_radius_mm
        .ok_or_else(|| Error::Build("peripheral plan lacks a ring radius".to_string()))?;
    let side = plan.dielet_side_mm;
    let sheet = grid_sheet_resistance(&ctx.ex.features, &ctx.ex.materials);
    let n_par = strip_parallel_traces(&ctx.ex.features, side);
    let w = ctx.ex.features.interconnect_width_um * 1e-6;
    let t = ctx.ex.features.interconnect_thickness_um * 1e-6;
    let i_fd = ctx.fd_current();
    let pol = ctx.pol();

    let mut by_sector: Vec<Vec<usize>> = vec![Vec::new(); n_sectors];
    for (i, &pos) in plan.fd_positions_mm.iter().enumerate() {
        by_sector[sector_of(pos, n_sectors)].push(i);
    }

    for (sec, members) in by_sector.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let bank_current = i_fd * members.len() as f64;
        let bank_power: f64 = ctx.app.dielet.effective_tdp_w() * members.len() as f64;
        let ring = ctx
            .net
            .add_node(format!("ring_s{sec:02}"), NodeRole::TopsideGrid);
        ctx.add_converter_bank(
            &format!("s{sec:02}"),
            pol,
            bank_current,
            ctx.topo.board_converter,
            ring,
        )?;
        ctx.add_converter_input_draw(
            &format!("s{sec:02}"),
            src,
            bank_power,
            ctx.app.input_voltage_v,
        )?;
        ctx.net
            .decap_sites
            .entry(DecapLocation::WaferTopside)
            .or_default()
            .push(ring);
        // ring area also hosts the utility-silicon capacitor stage
        ctx.net
            .decap_sites
            .entry(DecapLocation::UdInternal)
            .or_default()
            .push(ring);

        for &f in members {
            let d_mm = crate::floorplan::ring_distance(plan.fd_positions_mm[f], ring_r)?;
            let d_m = d_mm * 1e-3;
            let squares = d_mm / side;
            let feed_r = sheet * squares + ctx.pillar_array_r();
            let feed_l = if d_m >= w + t {
                trace_inductance(d_m, w, t)? / n_par
            } else {
                0.0
            };
            let fd = ctx.net.add_node(format!("fd{f:04}"), NodeRole::Fd);
            if feed_l > 0.0 {
                let m = ctx
                    .net
                    .add_node(format!("xfe_f{f:04}"), NodeRole::TopsideGrid);
                ctx.net.add_branch(
                    BranchKind::Resistor,
                    ring,
                    m,
                    feed_r,
                    format!("feed_r_f{f:04}"),
                )?;
                ctx.net.add_branch(
                    BranchKind::Inductor,
                    m,
                    fd,
                    feed_l,
                    format!("feed_l_f{f:04}"),
                )?;
            } else {
                ctx.net.add_branch(
                    BranchKind::Resistor,
                    ring,
                    fd,
                    feed_r,
                    format!("feed_r_f{f:04}"),
                )?;
            }
            ctx.net.add_branch(
                BranchKind::CurrentSource,
                fd,
                PdnNetlist::GROUND,
                i_fd,
                format!("load_f{f:04}"),
            )?;
            ctx.net
                .decap_sites
                .entry(DecapLocation::FdInternal)
                .or_default()
                .push(fd);
        }
    }
    Ok(())
}

/// Backside low-voltage: one board bank at POL, the pin field, the
/// backside plane, then per-FD spreading/TWV/pillar chains.
fn build_bt1(ctx: &mut BuildCtx, src: usize) -> Result<()> {
    let plan = ctx.plan;
    let n_fd = plan.fd_positions_mm.len();
    let total_power = ctx.app.dielet.effective_tdp_w() * n_fd as f64;
    let total_current = ctx.fd_current() * n_fd as f64;
    let pol = ctx.pol();

    ctx.add_converter_input_draw("p00", src, total_power, ctx.app.input_voltage_v)?;
    let pcb = ctx.net.add_node("pcb00", NodeRole::Pcb);
    ctx.add_converter_bank("p00", pol, total_current, ctx.topo.board_converter, pcb)?;
    ctx.net
        .decap_sites
        .entry(DecapLocation::Pcb)
        .or_default()
        .push(pcb);

    // per-dielet board-plane spreading, lumped as one parallel combination
    let sprd = plane_spreading_resistance(&ctx.ex.materials) / n_fd as f64;
    let p1 = ctx.net.add_node("xpcb", NodeRole::Pcb);
    ctx.net
        .add_branch(BranchKind::Resistor, pcb, p1, sprd, "sprd_p00")?;
    let plane = ctx.add_pin_field(p1, "bks00")?;
    ctx.net
        .decap_sites
        .entry(DecapLocation::WaferBackside)
        .or_default()
        .push(plane);

    for f in 0..n_fd {
        ctx.add_backside_fd_chain(plane, f)?;
    }
    Ok(())
}

/// Backside high-voltage: board rail through BGAs and TWVs into per-tile
/// integrated banks, short topside hops to the tile's FDs.
fn build_bt2(ctx: &mut BuildCtx, src: usize) -> Result<()> {
    let plan = ctx.plan;
    let f = &ctx.ex.features;
    let rho = ctx.rho();
    let pol = ctx.pol();
    let i_fd = ctx.fd_current();
    let side = plan.dielet_side_mm;
    let pitch_mm = f.inter_dielet_pitch_um / 1000.0;
    let sheet = grid_sheet_resistance(f, &ctx.ex.materials);
    let n_par = strip_parallel_traces(f, side);
    let w = f.interconnect_width_um * 1e-6;
    let t = f.interconnect_thickness_um * 1e-6;
    let sprd = plane_spreading_resistance(&ctx.ex.materials);

    let bga_r = cylinder_resistance(f.bga_diameter_um * 1e-6, f.bga_height_um * 1e-6, rho)?
        / ctx.ex.bga_per_tile as f64;
    let (twv_r, twv_l) = ctx.twv_array();
    let pil_r = ctx.pillar_array_r();

    // the 48 V rail crosses the board plane, one spreading share per tile
    let pcb = ctx.net.add_node("pcb00", NodeRole::Pcb);
    ctx.net.add_branch(
        BranchKind::Resistor,
        src,
        pcb,
        sprd / plan.tiles.len().max(1) as f64,
        "sprd_p00",
    )?;
    ctx.net
        .decap_sites
        .entry(DecapLocation::Pcb)
        .or_default()
        .push(pcb);

    for (ti, tile) in plan.tiles.iter().enumerate() {
        let n_members = tile.fd_indices.len() as f64;
        let bank_current = i_fd * n_members;
        let bank_power = ctx.app.dielet.effective_tdp_w() * n_members;

        // 48 V vertical: BGA cluster, then the UD's TWV array
        let v1 = ctx.net.add_node(format!("xbg_t{ti:03}"), NodeRole::Backside);
        ctx.net.add_branch(
            BranchKind::Resistor,
            pcb,
            v1,
            bga_r,
            format!("bga_r_t{ti:03}"),
        )?;
        let v2 = ctx.net.add_node(format!("xtw_t{ti:03}"), NodeRole::Backside);
        ctx.net.add_branch(
            BranchKind::Resistor,
            v1,
            v2,
            twv_r,
            format!("twv_r_t{ti:03}"),
        )?;
        let uin = ctx.net.add_node(format!("xui_t{ti:03}"), NodeRole::Backside);
        ctx.net.add_branch(
            BranchKind::Inductor,
            v2,
            uin,
            twv_l,
            format!("twv_l_t{ti:03}"),
        )?;
        ctx.add_converter_input_draw(&format!("t{ti:03}"), uin, bank_power, ctx.app.input_voltage_v)?;

        // POL side: integrated bank inside the UD, out through its pillars
        let ud = ctx.net.add_node(format!("ud{ti:03}"), NodeRole::Ud);
        ctx.add_converter_bank(
            &format!("t{ti:03}"),
            pol,
            bank_current,
            ctx.topo.integrated_converter,
            ud,
        )?;
        ctx.net
            .decap_sites
            .entry(DecapLocation::UdInternal)
            .or_default()
            .push(ud);
        let grid = ctx
            .net
            .add_node(format!("xgr_t{ti:03}"), NodeRole::TopsideGrid);
        ctx.net.add_branch(
            BranchKind::Resistor,
            ud,
            grid,
            pil_r,
            format!("pil_r_t{ti:03}"),
        )?;

        for &fi in &tile.fd_indices {
            let hops = plan.fd_hops[fi].max(1) as f64;
            let hop_len_mm = hops * (side + pitch_mm);
            let hop_r = sheet * (hop_len_mm / side);
            let hop_l = trace_inductance(hop_len_mm * 1e-3, w, t)? / n_par;
            let m = ctx
                .net
                .add_node(format!("xho_f{fi:04}"), NodeRole::TopsideGrid);
            ctx.net.add_branch(
                BranchKind::Resistor,
                grid,
                m,
                hop_r,
                format!("hop_r_f{fi:04}"),
            )?;
            let tnode = ctx
                .net
                .add_node(format!("top_f{fi:04}"), NodeRole::TopsideGrid);
            ctx.net.add_branch(
                BranchKind::Inductor,
                m,
                tnode,
                hop_l,
                format!("hop_l_f{fi:04}"),
            )?;
            let fd = ctx.net.add_node(format!("fd{fi:04}"), NodeRole::Fd);
            ctx.net.add_branch(
                BranchKind::Resistor,
                tnode,
                fd,
                pil_r,
                format!("pil_r_f{fi:04}"),
            )?;
            ctx.net.add_branch(
                BranchKind::CurrentSource,
                fd,
                PdnNetlist::GROUND,
                i_fd,
                format!("load_f{fi:04}"),
            )?;
            ctx.net
                .decap_sites
                .entry(DecapLocation::WaferTopside)
                .or_default()
                .push(tnode);
        }
    }
    Ok(())
}

/// Hybrid two-stage: board 48/12, pin field at 12 V, per-sector backside
/// banks at POL, then the BT1-style vertical chain per FD.
fn build_bt3(ctx: &mut BuildCtx, src: usize, n_sectors: usize) -> Result<()> {
    let plan = ctx.plan;
    let n_fd = plan.fd_positions_mm.len();
    let v_mid = ctx.app.intermediate_voltage_v;
    let pol = ctx.pol();
    let i_fd = ctx.fd_current();
    let total_power = ctx.app.dielet.effective_tdp_w() * n_fd as f64;
    // 12 V rail carries the POL stage's input power
    let mid_power = total_power / ctx.topo.converter_efficiency;
    let mid_current = mid_power / v_mid;

    ctx.add_converter_input_draw("p00", src, mid_power, ctx.app.input_voltage_v)?;
    let pcb = ctx.net.add_node("pcb00", NodeRole::Pcb);
    ctx.add_converter_bank("p00", v_mid, mid_current, ctx.topo.board_converter, pcb)?;
    ctx.net
        .decap_sites
        .entry(DecapLocation::Pcb)
        .or_default()
        .push(pcb);

    let sprd = plane_spreading_resistance(&ctx.ex.materials) / n_fd as f64;
    let p1 = ctx.net.add_node("xpcb", NodeRole::Pcb);
    ctx.net
        .add_branch(BranchKind::Resistor, pcb, p1, sprd, "sprd_p00")?;
    let plane = ctx.add_pin_field(p1, "bks00")?;

    let mut by_sector: Vec<Vec<usize>> = vec![Vec::new(); n_sectors];
    for (i, &pos) in plan.fd_positions_mm.iter().enumerate() {
        by_sector[sector_of(pos, n_sectors)].push(i);
    }

    for (sec, members) in by_sector.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let bank_current = i_fd * members.len() as f64;
        let bank_power = ctx.app.dielet.effective_tdp_w() * members.len() as f64;
        let bs = ctx
            .net
            .add_node(format!("bks_s{sec:02}"), NodeRole::Backside);
        ctx.net.add_branch(
            BranchKind::Resistor,
            plane,
            bs,
            sprd,
            format!("sprd_s{sec:02}"),
        )?;
        ctx.add_converter_input_draw(&format!("s{sec:02}"), bs, bank_power, v_mid)?;
        let rail = ctx
            .net
            .add_node(format!("bkp_s{sec:02}"), NodeRole::Backside);
        ctx.add_converter_bank(
            &format!("s{sec:02}"),
            pol,
            bank_current,
            ctx.topo.backside_converter,
            rail,
        )?;
        ctx.net
            .decap_sites
            .entry(DecapLocation::WaferBackside)
            .or_default()
            .push(bs);
        for &f in members {
            ctx.add_backside_fd_chain(rail, f)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{place_dielets, TopologyConfig};
    use crate::platform::{builtin_application, BuiltinApp, MaterialProperties, PlatformFeatures};

    fn build(app: BuiltinApp, kind: TopologyKind) -> PdnNetlist {
        let features = PlatformFeatures::default();
        let materials = MaterialProperties::default();
        let app = builtin_application(app);
        let topo = TopologyConfig::new(kind);
        let plan = place_dielets(&features, &app, &topo).unwrap();
        let ex = ExtractionParams::derive(&features, &materials, &app, &plan);
        build_pdn(&topo, &app, &plan, &ex, 32, 0.5).unwrap()
    }

    #[test]
    fn pt_has_no_vertical_backside_structures() {
        let net = build(BuiltinApp::Loihi, TopologyKind::Pt);
        assert!(net
            .branches
            .iter()
            .all(|b| !b.label.starts_with("twv") && !b.label.starts_with("pin")));
        assert!(!net.fd_nodes().is_empty());
    }

    #[test]
    fn bt1_has_pins_and_twvs() {
        let net = build(BuiltinApp::Tpu, TopologyKind::Bt1);
        assert!(net.branches.iter().any(|b| b.label.starts_with("twv")));
        assert!(net.branches.iter().any(|b| b.label.starts_with("pin")));
        assert!(net.branches.iter().all(|b| !b.label.starts_with("bga")));
    }

    #[test]
    fn bt2_converter_banks_match_ud_count() {
        let features = PlatformFeatures::default();
        let materials = MaterialProperties::default();
        let app = builtin_application(BuiltinApp::Epyc);
        let topo = TopologyConfig::new(TopologyKind::Bt2_8);
        let plan = place_dielets(&features, &app, &topo).unwrap();
        let ex = ExtractionParams::derive(&features, &materials, &app, &plan);
        let net = build_pdn(&topo, &app, &plan, &ex, 32, 0.5).unwrap();
        let ud_sources = net
            .branches
            .iter()
            .filter(|b| b.kind == BranchKind::VoltageSource && b.label.starts_with("cnv_t"))
            .count();
        assert_eq!(ud_sources as u64, plan.ud_count);
        // no pins in the BGA topology
        assert!(net.branches.iter().all(|b| !b.label.starts_with("pin")));
        assert!(net.branches.iter().any(|b| b.label.starts_with("bga")));
    }

    #[test]
    fn every_fd_has_exactly_one_load_and_totals_match() {
        for kind in TopologyKind::ALL {
            let net = build(BuiltinApp::Loihi, kind);
            let fd_nodes = net.fd_nodes();
            let loads = net.load_branches();
            assert_eq!(fd_nodes.len(), loads.len(), "{kind:?}");
            let i_fd = builtin_application(BuiltinApp::Loihi).dielet.dc_current_a();
            for &li in &loads {
                assert_eq!(net.branches[li].value, i_fd, "{kind:?}");
            }
            // node count stays linear in FD count
            assert!(
                net.nodes.len() < 20 * fd_nodes.len(),
                "{kind:?}: {} nodes for {} FDs",
                net.nodes.len(),
                fd_nodes.len()
            );
        }
    }

    #[test]
    fn mismatched_plan_is_a_build_error() {
        let features = PlatformFeatures::default();
        let materials = MaterialProperties::default();
        let app = builtin_application(BuiltinApp::Loihi);
        let pt = TopologyConfig::new(TopologyKind::Pt);
        let plan = place_dielets(&features, &app, &pt).unwrap();
        let ex = ExtractionParams::derive(&features, &materials, &app, &plan);
        let bt1 = TopologyConfig::new(TopologyKind::Bt1);
        assert!(build_pdn(&bt1, &app, &plan, &ex, 32, 0.5).is_err());
    }

    #[test]
    fn insert_decaps_leaves_input_unchanged_and_empty_stage_list_is_identity() {
        let net = build(BuiltinApp::Loihi, TopologyKind::Pt);
        let before = net.branches.len();
        let out = insert_decaps(&net, &[], &BTreeMap::new(), 0.5).unwrap();
        assert_eq!(out.branches.len(), before);
        assert_eq!(net.branches.len(), before);
    }

    #[test]
    fn insert_decaps_missing_location_errors() {
        let net = build(BuiltinApp::Loihi, TopologyKind::Pt);
        let stages = decap_stages_for(TopologyKind::Bt1);
        let pcb_stage = stages
            .iter()
            .find(|s| s.location == DecapLocation::Pcb)
            .unwrap()
            .clone();
        let mut areas = BTreeMap::new();
        areas.insert(DecapLocation::Pcb, 100.0);
        assert!(insert_decaps(&net, &[pcb_stage], &areas, 0.5).is_err());
    }

    #[test]
    fn bt1_backside_bank_values_follow_the_bank_oracle() {
        let features = PlatformFeatures::default();
        let materials = MaterialProperties::default();
        let app = builtin_application(BuiltinApp::Loihi);
        let topo = TopologyConfig::new(TopologyKind::Bt1);
        let plan = place_dielets(&features, &app, &topo).unwrap();
        let ex = ExtractionParams::derive(&features, &materials, &app, &plan);
        // base netlist without decaps, then a single 100 mm2 backside bank
        let mut ctx_net = {
            let mut c = BuildCtx {
                topo: &topo,
                app: &app,
                plan: &plan,
                ex: &ex,
                net: PdnNetlist::new(),
            };
            let src = c.net.add_node("src", NodeRole::Source);
            c.net
                .add_branch(
                    BranchKind::VoltageSource,
                    src,
                    PdnNetlist::GROUND,
                    48.0,
                    "src48",
                )
                .unwrap();
            build_bt1(&mut c, src).unwrap();
            c.net
        };
        ctx_net
            .decap_sites
            .entry(DecapLocation::WaferBackside)
            .or_default();
        let ceramic = decap_stages_for(TopologyKind::Bt1)
            .into_iter()
            .find(|s| s.location == DecapLocation::WaferBackside)
            .unwrap();
        let mut areas = BTreeMap::new();
        areas.insert(DecapLocation::WaferBackside, 100.0);
        let out = insert_decaps(&ctx_net, &[ceramic], &areas, 0.5).unwrap();
        let c_branch = out
            .branches
            .iter()
            .find(|b| b.kind == BranchKind::Capacitor && b.label.starts_with("dcp_c_bks"))
            .unwrap();
        assert!((c_branch.value - 2.44e-3).abs() < 1e-9);
        let l_branch = out
            .branches
            .iter()
            .find(|b| b.kind == BranchKind::Inductor && b.label.starts_with("dcp_l_bks"))
            .unwrap();
        assert!((l_branch.value - 350e-9).abs() < 1e-15);
    }

    #[test]
    fn pt_fd_internal_banks_sit_on_every_fd() {
        let net = build(BuiltinApp::Loihi, TopologyKind::Pt);
        let fd_count = net.fd_nodes().len();
        let fd_banks = net
            .branches
            .iter()
            .filter(|b| b.kind == BranchKind::Capacitor && b.label.starts_with("dcp_c_fd"))
            .count();
        assert_eq!(fd_banks, fd_count);
    }

    #[test]
    fn export_format_reference_line() {
        let mut net = PdnNetlist::new();
        let a = net.add_node("a", NodeRole::TopsideGrid);
        let b = net.add_node("b", NodeRole::Fd);
        net.add_branch(BranchKind::Resistor, a, b, 4.2, "t0").unwrap();
        let text = net.export_interchange();
        assert_eq!(text, "Rt0 n1 n2 4.2000000000e0\n.end\n");
    }

    #[test]
    fn export_parse_export_is_byte_identical() {
        for kind in [TopologyKind::Pt, TopologyKind::Bt2_8] {
            let net = build(BuiltinApp::Loihi, kind);
            let once = net.export_interchange();
            let parsed = PdnNetlist::parse_interchange(&once).unwrap();
            let twice = parsed.export_interchange();
            assert_eq!(once, twice, "{kind:?}");
        }
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = PdnNetlist::parse_interchange("Rt0 n1 nbad 4.2\n.end\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other}"),
        }
        let err = PdnNetlist::parse_interchange("Rt0 n1 n2 4.2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn load_model_defaults_follow_the_dielet() {
        let app = builtin_application(BuiltinApp::Epyc);
        let lm = LoadModel::from_app(&app);
        assert_eq!(lm.dc_current, 25.0);
        assert_eq!(lm.step_fraction, 0.8);
        assert!((lm.rise_time - 1.0 / 3e9).abs() < 1e-22);
        lm.validate().unwrap();
        let bad = LoadModel {
            step_fraction: 1.5,
            ..lm
        };
        assert!(bad.validate().is_err());
    }
}
