//! Modified nodal analysis: sparse DC operating point and fixed-step
//! trapezoidal transient integration.
//!
//! Unknown ordering: node voltages for nodes 1..N-1, then one auxiliary
//! branch current per voltage source and per inductor, in branch order.
//! The conductance matrix holds the resistive and incidence stamps; the
//! storage matrix holds C stamps at node positions and -L on the aux
//! diagonal, so the transient system is `G + (2/dt) * S`.

use crate::error::{Error, Result};
use crate::netlist::{BranchKind, LoadModel, PdnNetlist};
use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use serde::Serialize;
use std::time::Instant;

/// Assembled MNA system for one netlist.
pub struct MnaSystem<'a> {
    netlist: &'a PdnNetlist,
    pub dimension: usize,
    n_nodes: usize,
    /// conductance/incidence triplets (DC system matrix)
    g_triplets: Vec<Triplet<usize, usize, f64>>,
    /// storage triplets: C at node block, -L on the aux diagonal
    s_triplets: Vec<Triplet<usize, usize, f64>>,
    /// aux unknown index per branch (voltage sources and inductors)
    aux_of_branch: Vec<Option<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub dimension: usize,
    pub nonzeros: usize,
    pub factor_time_s: f64,
    pub iterations: usize,
}

/// DC operating point.
#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    /// Per-node voltages, index-aligned with the netlist nodes (ground = 0).
    pub node_voltages: Vec<f64>,
    /// Per-branch currents, index-aligned with the netlist branches,
    /// positive from `from` to `to`.
    pub branch_currents: Vec<f64>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodeWaveform {
    pub label: String,
    pub node: usize,
    pub voltages: Vec<f64>,
}

/// Load-step transient response.
#[derive(Debug, Clone, Serialize)]
pub struct TransientResult {
    pub time_axis: Vec<f64>,
    pub waveforms: Vec<NodeWaveform>,
    /// Deepest dip below the post-step DC level over all supply nodes, V.
    pub worst_droop: f64,
    pub worst_droop_node: String,
    /// First time after which the worst node stays inside its settle band.
    pub settle_time: f64,
    /// Extra energy dissipated in resistances during the event versus the
    /// quasi-static trajectory, J.
    pub ringing_energy_j: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PowerBalance {
    pub source_power: f64,
    pub load_power: f64,
    pub resistive_loss: f64,
}

/// Index of a node unknown, or None for ground.
fn node_unknown(node: usize) -> Option<usize> {
    (node > 0).then(|| node - 1)
}

pub fn assemble_mna<'a>(netlist: &'a PdnNetlist) -> Result<MnaSystem<'a>> {
    if netlist.nodes.is_empty() {
        return Err(Error::Build("empty netlist".to_string()));
    }
    check_dc_connectivity(netlist)?;

    let n_nodes = netlist.nodes.len();
    let mut dimension = n_nodes - 1;
    let mut aux_of_branch = vec![None; netlist.branches.len()];
    for (bi, b) in netlist.branches.iter().enumerate() {
        if matches!(b.kind, BranchKind::VoltageSource | BranchKind::Inductor) {
            aux_of_branch[bi] = Some(dimension);
            dimension += 1;
        }
    }

    let mut g_triplets = Vec::new();
    let mut s_triplets = Vec::new();
    for (bi, b) in netlist.branches.iter().enumerate() {
        let f = node_unknown(b.from);
        let t = node_unknown(b.to);
        match b.kind {
            BranchKind::Resistor => {
                let g = 1.0 / b.value;
                if let Some(f) = f {
                    g_triplets.push(Triplet::new(f, f, g));
                }
                if let Some(t) = t {
                    g_triplets.push(Triplet::new(t, t, g));
                }
                if let (Some(f), Some(t)) = (f, t) {
                    g_triplets.push(Triplet::new(f, t, -g));
                    g_triplets.push(Triplet::new(t, f, -g));
                }
            }
            BranchKind::Capacitor => {
                let c = b.value;
                if let Some(f) = f {
                    s_triplets.push(Triplet::new(f, f, c));
                }
                if let Some(t) = t {
                    s_triplets.push(Triplet::new(t, t, c));
                }
                if let (Some(f), Some(t)) = (f, t) {
                    s_triplets.push(Triplet::new(f, t, -c));
                    s_triplets.push(Triplet::new(t, f, -c));
                }
            }
            BranchKind::VoltageSource | BranchKind::Inductor => {
                let a = aux_of_branch[bi].expect("aux allocated");
                if let Some(f) = f {
                    g_triplets.push(Triplet::new(f, a, 1.0));
                    g_triplets.push(Triplet::new(a, f, 1.0));
                }
                if let Some(t) = t {
                    g_triplets.push(Triplet::new(t, a, -1.0));
                    g_triplets.push(Triplet::new(a, t, -1.0));
                }
                if b.kind == BranchKind::Inductor {
                    s_triplets.push(Triplet::new(a, a, -b.value));
                }
            }
            BranchKind::CurrentSource => {}
        }
    }

    Ok(MnaSystem {
        netlist,
        dimension,
        n_nodes,
        g_triplets,
        s_triplets,
        aux_of_branch,
    })
}

/// Every node must reach ground through resistors, inductors, or voltage
/// sources, otherwise its DC voltage is undefined.
fn check_dc_connectivity(netlist: &PdnNetlist) -> Result<()> {
    let n = netlist.nodes.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for b in &netlist.branches {
        if matches!(
            b.kind,
            BranchKind::Resistor | BranchKind::Inductor | BranchKind::VoltageSource
        ) {
            adj[b.from].push(b.to);
            adj[b.to].push(b.from);
        }
    }
    let mut seen = vec![false; n];
    let mut stack = vec![PdnNetlist::GROUND];
    seen[PdnNetlist::GROUND] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    if let Some(orphan) = (0..n).find(|&i| !seen[i]) {
        let has_load = netlist
            .branches
            .iter()
            .any(|b| b.kind == BranchKind::CurrentSource && !seen[b.from]);
        let label = &netlist.nodes[orphan].label;
        return Err(if has_load {
            Error::Build(format!(
                "disconnected component containing a load (floating node '{label}')"
            ))
        } else {
            Error::Singular(format!("floating node '{label}'"))
        });
    }
    Ok(())
}

impl MnaSystem<'_> {
    /// DC excitation with load current sources scaled by `load_scale`.
    fn dc_rhs(&self, load_scale: f64) -> Vec<f64> {
        let mut b = vec![0.0; self.dimension];
        for (bi, br) in self.netlist.branches.iter().enumerate() {
            match br.kind {
                BranchKind::CurrentSource => {
                    let value = if br.label.starts_with("load") {
                        br.value * load_scale
                    } else {
                        br.value
                    };
                    if let Some(f) = node_unknown(br.from) {
                        b[f] -= value;
                    }
                    if let Some(t) = node_unknown(br.to) {
                        b[t] += value;
                    }
                }
                BranchKind::VoltageSource => {
                    b[self.aux_of_branch[bi].expect("aux")] = br.value;
                }
                _ => {}
            }
        }
        b
    }

    fn factor(&self, triplets: &[Triplet<usize, usize, f64>]) -> Result<Factored> {
        let start = Instant::now();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(
            self.dimension,
            self.dimension,
            triplets,
        )
        .map_err(|e| Error::Numerical(format!("matrix assembly failed: {e:?}")))?;
        let nonzeros = mat.compute_nnz();
        let lu = mat.as_ref().sp_lu().map_err(|_| {
            Error::Singular(self.describe_suspect_node())
        })?;
        Ok(Factored {
            lu,
            nonzeros,
            factor_time_s: start.elapsed().as_secs_f64(),
        })
    }

    fn describe_suspect_node(&self) -> String {
        // the factorization failed; point at a likely culprit node
        "matrix factorization failed (check for floating nodes or zero-resistance loops)"
            .to_string()
    }

    fn solve_vec(&self, factored: &Factored, rhs: &[f64]) -> Vec<f64> {
        let mut m = faer::Mat::from_fn(self.dimension, 1, |i, _| rhs[i]);
        factored.lu.solve_in_place(m.as_mut());
        (0..self.dimension).map(|i| m[(i, 0)]).collect()
    }

    fn result_from_solution(&self, x: &[f64], load_scale: f64, stats: SolveStats) -> SolveResult {
        let volt = |node: usize| {
            if node == 0 {
                0.0
            } else {
                x[node - 1]
            }
        };
        let node_voltages: Vec<f64> = (0..self.n_nodes).map(volt).collect();
        let branch_currents = self
            .netlist
            .branches
            .iter()
            .enumerate()
            .map(|(bi, b)| match b.kind {
                BranchKind::Resistor => (volt(b.from) - volt(b.to)) / b.value,
                BranchKind::Capacitor => 0.0,
                BranchKind::VoltageSource | BranchKind::Inductor => {
                    x[self.aux_of_branch[bi].expect("aux")]
                }
                BranchKind::CurrentSource => {
                    if b.label.starts_with("load") {
                        b.value * load_scale
                    } else {
                        b.value
                    }
                }
            })
            .collect();
        SolveResult {
            node_voltages,
            branch_currents,
            stats,
        }
    }
}

struct Factored {
    lu: faer::sparse::linalg::solvers::Lu<usize, f64>,
    nonzeros: usize,
    factor_time_s: f64,
}

/// Solves the DC operating point with loads at their full current.
pub fn solve_dc(netlist: &PdnNetlist) -> Result<SolveResult> {
    solve_dc_scaled(netlist, 1.0)
}

/// DC operating point with load sinks scaled by `load_scale` (used for the
/// pre-step point of a transient and for superposition checks).
pub fn solve_dc_scaled(netlist: &PdnNetlist, load_scale: f64) -> Result<SolveResult> {
    let sys = assemble_mna(netlist)?;
    let factored = sys.factor(&sys.g_triplets)?;
    let x = sys.solve_vec(&factored, &sys.dc_rhs(load_scale));
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular(
            "non-finite DC solution (floating node or degenerate loop)".to_string(),
        ));
    }
    let stats = SolveStats {
        dimension: sys.dimension,
        nonzeros: factored.nonzeros,
        factor_time_s: factored.factor_time_s,
        iterations: 1,
    };
    Ok(sys.result_from_solution(&x, load_scale, stats))
}

/// DC power bookkeeping: sources deliver, current sinks absorb, resistors
/// dissipate. Exact for the linear network up to round-off.
pub fn power_balance(result: &SolveResult, netlist: &PdnNetlist) -> PowerBalance {
    let mut source_power = 0.0;
    let mut load_power = 0.0;
    let mut resistive_loss = 0.0;
    for (bi, b) in netlist.branches.iter().enumerate() {
        let dv = result.node_voltages[b.from] - result.node_voltages[b.to];
        let i = result.branch_currents[bi];
        match b.kind {
            BranchKind::VoltageSource => source_power += -b.value * i,
            BranchKind::CurrentSource => load_power += dv * i,
            BranchKind::Resistor => resistive_loss += dv * dv / b.value,
            _ => {}
        }
    }
    PowerBalance {
        source_power,
        load_power,
        resistive_loss,
    }
}

/// Fixed-step trapezoidal integration of the load-step response.
///
/// The stimulus ramps every `load`-labeled current sink from
/// `(1 - step_fraction) * value` to `value` over `rise_time`, starting
/// from the pre-step DC operating point. `probes = None` records every
/// FD node.
pub fn solve_transient(
    netlist: &PdnNetlist,
    loads: &LoadModel,
    dt: f64,
    horizon: f64,
    probes: Option<&[usize]>,
) -> Result<TransientResult> {
    if !(dt > 0.0) {
        return Err(Error::Numerical(format!("dt must be positive, got {dt}")));
    }
    if horizon < 10.0 * loads.rise_time {
        return Err(Error::Numerical(format!(
            "horizon {horizon} shorter than 10 rise times {}",
            10.0 * loads.rise_time
        )));
    }

    let sys = assemble_mna(netlist)?;
    let alpha0 = 1.0 - loads.step_fraction;

    // operating points: pre-step, post-step, and sources-only for the
    // quasi-static loss decomposition
    let g_fact = sys.factor(&sys.g_triplets)?;
    let x_pre = sys.solve_vec(&g_fact, &sys.dc_rhs(alpha0));
    let x_post = sys.solve_vec(&g_fact, &sys.dc_rhs(1.0));
    let x_src = sys.solve_vec(&g_fact, &sys.dc_rhs(0.0));

    let volt = |x: &[f64], node: usize| if node == 0 { 0.0 } else { x[node - 1] };

    // P_qs(alpha) = a + b*alpha + c*alpha^2 over resistor branches
    let (mut qs_a, mut qs_b, mut qs_c) = (0.0, 0.0, 0.0);
    for b in netlist.branches.iter().filter(|b| b.kind == BranchKind::Resistor) {
        let dv_src = volt(&x_src, b.from) - volt(&x_src, b.to);
        let dv_full = volt(&x_post, b.from) - volt(&x_post, b.to);
        let dv_load = dv_full - dv_src;
        qs_a += dv_src * dv_src / b.value;
        qs_b += 2.0 * dv_src * dv_load / b.value;
        qs_c += dv_load * dv_load / b.value;
    }
    let p_qs = |alpha: f64| qs_a + qs_b * alpha + qs_c * alpha * alpha;

    // transient matrix: G + (2/dt) S
    let mut tr_triplets = sys.g_triplets.clone();
    for t in &sys.s_triplets {
        tr_triplets.push(Triplet::new(t.row, t.col, 2.0 / dt * t.val));
    }
    let tr_fact = sys.factor(&tr_triplets)?;

    // element history state
    let mut x = x_pre.clone();
    let cap_indices: Vec<usize> = netlist
        .branches
        .iter()
        .enumerate()
        .filter(|(_, b)| b.kind == BranchKind::Capacitor)
        .map(|(i, _)| i)
        .collect();
    let mut cap_current = vec![0.0; cap_indices.len()];

    let probe_nodes: Vec<usize> = match probes {
        Some(p) => p.to_vec(),
        None => netlist.fd_nodes(),
    };
    if probe_nodes.is_empty() {
        return Err(Error::Numerical("no probe nodes".to_string()));
    }

    let n_steps = (horizon / dt).ceil() as usize;
    let mut time_axis = Vec::with_capacity(n_steps + 1);
    let mut waves: Vec<Vec<f64>> = vec![Vec::with_capacity(n_steps + 1); probe_nodes.len()];
    let alpha_at = |t: f64| alpha0 + loads.step_fraction * (t / loads.rise_time).clamp(0.0, 1.0);

    let p_r_of = |x: &[f64]| -> f64 {
        netlist
            .branches
            .iter()
            .filter(|b| b.kind == BranchKind::Resistor)
            .map(|b| {
                let dv = volt(x, b.from) - volt(x, b.to);
                dv * dv / b.value
            })
            .sum()
    };

    time_axis.push(0.0);
    for (wi, &pn) in probe_nodes.iter().enumerate() {
        waves[wi].push(volt(&x, pn));
    }
    let mut prev_extra = p_r_of(&x) - p_qs(alpha0);
    let mut ringing_energy = 0.0;

    let mut rhs = vec![0.0; sys.dimension];
    for k in 1..=n_steps {
        let t = k as f64 * dt;
        let alpha = alpha_at(t);

        rhs.iter_mut().for_each(|v| *v = 0.0);
        for (bi, b) in netlist.branches.iter().enumerate() {
            match b.kind {
                BranchKind::CurrentSource => {
                    let value = if b.label.starts_with("load") {
                        b.value * alpha
                    } else {
                        b.value
                    };
                    if let Some(f) = node_unknown(b.from) {
                        rhs[f] -= value;
                    }
                    if let Some(tn) = node_unknown(b.to) {
                        rhs[tn] += value;
                    }
                }
                BranchKind::VoltageSource => {
                    rhs[sys.aux_of_branch[bi].expect("aux")] = b.value;
                }
                BranchKind::Inductor => {
                    let a = sys.aux_of_branch[bi].expect("aux");
                    let dv_prev = volt(&x, b.from) - volt(&x, b.to);
                    let i_prev = x[a];
                    rhs[a] = -dv_prev - 2.0 * b.value / dt * i_prev;
                }
                _ => {}
            }
        }
        for (ci, &bi) in cap_indices.iter().enumerate() {
            let b = &netlist.branches[bi];
            let dv_prev = volt(&x, b.from) - volt(&x, b.to);
            let i_eq = 2.0 * b.value / dt * dv_prev + cap_current[ci];
            if let Some(f) = node_unknown(b.from) {
                rhs[f] += i_eq;
            }
            if let Some(tn) = node_unknown(b.to) {
                rhs[tn] -= i_eq;
            }
        }

        let x_new = sys.solve_vec(&tr_fact, &rhs);
        if x_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite transient solution at step {k} (t = {t:.3e} s)"
            )));
        }

        for (ci, &bi) in cap_indices.iter().enumerate() {
            let b = &netlist.branches[bi];
            let dv_prev = volt(&x, b.from) - volt(&x, b.to);
            let dv_new = volt(&x_new, b.from) - volt(&x_new, b.to);
            cap_current[ci] = 2.0 * b.value / dt * (dv_new - dv_prev) - cap_current[ci];
        }
        x = x_new;

        time_axis.push(t);
        for (wi, &pn) in probe_nodes.iter().enumerate() {
            waves[wi].push(volt(&x, pn));
        }
        let extra = p_r_of(&x) - p_qs(alpha);
        ringing_energy += 0.5 * (prev_extra + extra) * dt;
        prev_extra = extra;
    }

    // droop bookkeeping over the probed supply nodes
    let mut worst_droop = 0.0;
    let mut worst_idx = 0;
    for (wi, &pn) in probe_nodes.iter().enumerate() {
        let v_final = volt(&x_post, pn);
        let min_v = waves[wi].iter().copied().fold(f64::INFINITY, f64::min);
        let droop = (v_final - min_v).max(0.0);
        if droop > worst_droop {
            worst_droop = droop;
            worst_idx = wi;
        }
    }

    let worst_node = probe_nodes[worst_idx];
    let v_final = volt(&x_post, worst_node);
    let v_start = volt(&x_pre, worst_node);
    let band = (1e-3 * (v_final - v_start).abs()).max(1e-9);
    let mut settle_time = *time_axis.last().unwrap();
    for k in (0..time_axis.len()).rev() {
        if (waves[worst_idx][k] - v_final).abs() > band {
            settle_time = if k + 1 < time_axis.len() {
                time_axis[k + 1]
            } else {
                *time_axis.last().unwrap()
            };
            break;
        }
        settle_time = time_axis[k];
    }

    let waveforms = probe_nodes
        .iter()
        .zip(waves)
        .map(|(&pn, voltages)| NodeWaveform {
            label: netlist.nodes[pn].label.clone(),
            node: pn,
            voltages,
        })
        .collect();

    Ok(TransientResult {
        time_axis,
        waveforms,
        worst_droop,
        worst_droop_node: netlist.nodes[worst_node].label.clone(),
        settle_time,
        ringing_energy_j: ringing_energy.max(0.0),
    })
}

/// Magnetic energy re-stored by one load-step event: 1/2 sum over
/// inductors of L * (i_post - i_pre)^2. At one event per regulator
/// switching period this energy cycles through the parasitic resistances,
/// which is how the averaged inductive loss is defined here.
pub fn inductor_event_energy(
    netlist: &PdnNetlist,
    pre: &SolveResult,
    post: &SolveResult,
) -> f64 {
    netlist
        .branches
        .iter()
        .enumerate()
        .filter(|(_, b)| b.kind == BranchKind::Inductor)
        .map(|(bi, b)| {
            let di = post.branch_currents[bi] - pre.branch_currents[bi];
            0.5 * b.value * di * di
        })
        .sum()
}

/// Recomputes the KCL residual at every non-ground node from branch
/// constitutive relations; the independent conservation check.
pub fn kcl_residual(netlist: &PdnNetlist, result: &SolveResult) -> f64 {
    let mut net_current = vec![0.0; netlist.nodes.len()];
    for (bi, b) in netlist.branches.iter().enumerate() {
        let i = result.branch_currents[bi];
        net_current[b.from] -= i;
        net_current[b.to] += i;
    }
    net_current
        .iter()
        .skip(1)
        .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{BranchKind, NodeRole, PdnNetlist};

    fn divider() -> PdnNetlist {
        let mut net = PdnNetlist::new();
        let top = net.add_node("top", NodeRole::Source);
        let mid = net.add_node("mid", NodeRole::Fd);
        net.add_branch(BranchKind::VoltageSource, top, 0, 48.0, "v0")
            .unwrap();
        net.add_branch(BranchKind::Resistor, top, mid, 1000.0, "r1")
            .unwrap();
        net.add_branch(BranchKind::Resistor, mid, 0, 1000.0, "r2")
            .unwrap();
        net
    }

    #[test]
    fn divider_midpoint() {
        let net = divider();
        let sol = solve_dc(&net).unwrap();
        assert!((sol.node_voltages[2] - 24.0).abs() < 1e-12);
        assert!((sol.node_voltages[1] - 48.0).abs() < 1e-12);
        let pb = power_balance(&sol, &net);
        // loss = I^2 (R1 + R2) with I = 24 mA
        assert!((pb.resistive_loss - 0.024 * 0.024 * 2000.0).abs() < 1e-12);
        assert!((pb.source_power - pb.load_power - pb.resistive_loss).abs() < 1e-12);
        assert!(kcl_residual(&net, &sol) < 1e-12);
    }

    #[test]
    fn dimension_counts() {
        // 1 source + 1 resistor: 1 node unknown + 1 source current
        let mut net = PdnNetlist::new();
        let a = net.add_node("a", NodeRole::Source);
        net.add_branch(BranchKind::VoltageSource, a, 0, 1.0, "v0")
            .unwrap();
        net.add_branch(BranchKind::Resistor, a, 0, 2.0, "r0").unwrap();
        assert_eq!(assemble_mna(&net).unwrap().dimension, 2);

        // series V - R - L - ground: nodes a, b plus two aux currents
        let mut net = PdnNetlist::new();
        let a = net.add_node("a", NodeRole::Source);
        let b = net.add_node("b", NodeRole::Fd);
        net.add_branch(BranchKind::VoltageSource, a, 0, 1.0, "v0")
            .unwrap();
        net.add_branch(BranchKind::Resistor, a, b, 2.0, "r0").unwrap();
        net.add_branch(BranchKind::Inductor, b, 0, 1e-9, "l0").unwrap();
        assert_eq!(assemble_mna(&net).unwrap().dimension, 4);
    }

    #[test]
    fn load_scaling_is_linear() {
        let mut net = PdnNetlist::new();
        let a = net.add_node("a", NodeRole::Source);
        let b = net.add_node("b", NodeRole::Fd);
        net.add_branch(BranchKind::VoltageSource, a, 0, 1.0, "v0")
            .unwrap();
        net.add_branch(BranchKind::Resistor, a, b, 0.5, "r0").unwrap();
        net.add_branch(BranchKind::CurrentSource, b, 0, 2.0, "load0")
            .unwrap();
        let s1 = solve_dc_scaled(&net, 1.0).unwrap();
        let s2 = solve_dc_scaled(&net, 3.0).unwrap();
        let drop1 = s1.node_voltages[1] - s1.node_voltages[2];
        let drop2 = s2.node_voltages[1] - s2.node_voltages[2];
        assert!((drop2 - 3.0 * drop1).abs() < 1e-12);
    }

    #[test]
    fn floating_load_is_reported() {
        let mut net = PdnNetlist::new();
        let a = net.add_node("a", NodeRole::Source);
        let orphan = net.add_node("island", NodeRole::Fd);
        net.add_branch(BranchKind::VoltageSource, a, 0, 1.0, "v0")
            .unwrap();
        net.add_branch(BranchKind::CurrentSource, orphan, 0, 1.0, "load0")
            .unwrap();
        let err = solve_dc(&net).unwrap_err();
        assert!(err.to_string().contains("island"), "{err}");
    }

    #[test]
    fn flat_load_transient_stays_at_dc() {
        let mut net = PdnNetlist::new();
        let a = net.add_node("a", NodeRole::Source);
        let b = net.add_node("b", NodeRole::Fd);
        net.add_branch(BranchKind::VoltageSource, a, 0, 1.0, "v0")
            .unwrap();
        net.add_branch(BranchKind::Resistor, a, b, 0.5, "r0").unwrap();
        net.add_branch(BranchKind::Capacitor, b, 0, 1e-6, "c0").unwrap();
        net.add_branch(BranchKind::CurrentSource, b, 0, 1.0, "load0")
            .unwrap();
        let loads = LoadModel {
            dc_current: 1.0,
            step_fraction: 0.0,
            rise_time: 1e-6,
        };
        let res = solve_transient(&net, &loads, 1e-7, 1e-5, None).unwrap();
        let dc = solve_dc(&net).unwrap();
        for w in &res.waveforms {
            for &v in &w.voltages {
                assert!((v - dc.node_voltages[w.node]).abs() < 1e-12);
            }
        }
        assert!(res.worst_droop < 1e-12);
    }
}
