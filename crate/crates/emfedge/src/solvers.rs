//! The three per-slot subproblems and their solvers.
//!
//! Minimizing the per-slot drift-plus-penalty bound decouples into:
//!
//! 1. flow control — admit new bits when the uplink backlog is at most V
//!    (closed form, per device);
//! 2. uplink power — per device, minimize
//!    `-(Qu - Qm) tau B log2(1 + h p / (N0 B)) + c p` with
//!    `c = step_y Y + step_z (4 pi / lambda^2) sum_i Z_i h^i`;
//!    zero when `Qu <= Qm`, otherwise the KKT point
//!    `clip(sigma - N0 B / h, 0, p_max)` with
//!    `sigma = tau (Qu - Qm) B / (ln2 c)`, and `p_max` when `c = 0`
//!    (the objective is then strictly decreasing in p);
//! 3. CPU scheduling — for each candidate clock `f_s`, greedily hand the
//!    budget to the devices with the largest computation backlog (capped at
//!    what empties each queue), then pick the `f_s` minimizing
//!    `step_h H kappa f_s^3 - sum_k Qm_k tau J_k f_k`.
//!
//! Every solver is a pure function of its inputs. The `oracle_*` functions
//! re-solve the same subproblems by brute force (grid scan, exhaustive
//! vertex enumeration) and exist to validate the closed forms; they share
//! no logic with the solvers beyond the objective definitions.

use thiserror::Error;

use crate::channel::{power_density, rate_from_power, ChannelState};

pub mod battery;

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("invalid slot decision: {0}")]
    InvalidDecision(String),
    #[error("oracle instance too large: {devices} devices, {freq_levels} frequency levels (limits: 4 and 5)")]
    InstanceTooLarge { devices: usize, freq_levels: usize },
}

/// Scenario constants every per-slot subproblem needs.
#[derive(Debug, Clone)]
pub struct SolverParams {
    pub slot_duration_s: f64,
    pub lyapunov_v: f64,
    pub noise_psd_w_per_hz: f64,
    pub wavelength_m: f64,
    pub kappa: f64,
    pub step_y: f64,
    pub step_h: f64,
    pub step_z: f64,
    /// Per-device uplink bandwidth, Hz.
    pub bandwidth_hz: Vec<f64>,
    /// Per-device transmit power cap, W.
    pub max_tx_power_w: Vec<f64>,
    /// Per-device arrival cap per slot, bits.
    pub max_arrival_bits: Vec<f64>,
    /// Per-device bits per CPU cycle.
    pub bits_per_cycle: Vec<f64>,
    /// Selectable edge-host CPU frequencies, ascending, 0 first.
    pub freq_set_hz: Vec<f64>,
    pub device_power_threshold_w: f64,
    pub meh_power_threshold_w: f64,
    pub pixel_threshold_w_per_m2: Vec<f64>,
}

impl SolverParams {
    pub fn num_devices(&self) -> usize {
        self.bandwidth_hz.len()
    }

    pub fn num_pixels(&self) -> usize {
        self.pixel_threshold_w_per_m2.len()
    }
}

/// One slot's control vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotDecision {
    /// Admitted new bits per device.
    pub arrivals: Vec<f64>,
    /// Uplink transmit power per device, W.
    pub tx_power: Vec<f64>,
    /// Edge-host CPU frequency, Hz.
    pub meh_freq_hz: f64,
    /// CPU frequency share per device, Hz.
    pub device_freq_hz: Vec<f64>,
}

impl SlotDecision {
    /// Checks the feasibility invariants against the scenario bounds.
    pub fn validate(&self, params: &SolverParams) -> Result<(), SolverError> {
        let k = params.num_devices();
        if self.arrivals.len() != k
            || self.tx_power.len() != k
            || self.device_freq_hz.len() != k
        {
            return Err(SolverError::InvalidDecision(format!(
                "expected {k} devices, got arrivals={} tx_power={} device_freq={}",
                self.arrivals.len(),
                self.tx_power.len(),
                self.device_freq_hz.len()
            )));
        }
        let tol = 1e-9;
        for i in 0..k {
            let a = self.arrivals[i];
            let a_max = params.max_arrival_bits[i];
            if !(0.0..=a_max * (1.0 + tol) + tol).contains(&a) {
                return Err(SolverError::InvalidDecision(format!(
                    "arrivals[{i}] = {a} outside [0, {a_max}]"
                )));
            }
            let p = self.tx_power[i];
            let p_max = params.max_tx_power_w[i];
            if !(0.0..=p_max * (1.0 + tol)).contains(&p) {
                return Err(SolverError::InvalidDecision(format!(
                    "tx_power[{i}] = {p} outside [0, {p_max}]"
                )));
            }
            if self.device_freq_hz[i] < 0.0 {
                return Err(SolverError::InvalidDecision(format!(
                    "device_freq_hz[{i}] = {} is negative",
                    self.device_freq_hz[i]
                )));
            }
        }
        let fs = self.meh_freq_hz;
        if !params
            .freq_set_hz
            .iter()
            .any(|f| (f - fs).abs() <= tol * f.abs().max(1.0))
        {
            return Err(SolverError::InvalidDecision(format!(
                "meh_freq_hz = {fs} not in the frequency set"
            )));
        }
        let sum: f64 = self.device_freq_hz.iter().sum();
        if sum > fs * (1.0 + tol) + tol {
            return Err(SolverError::InvalidDecision(format!(
                "sum of device frequencies {sum} exceeds meh_freq_hz {fs}"
            )));
        }
        Ok(())
    }
}

/// Flow control: admit the full arrival cap while the uplink backlog is at
/// most V (inclusive), otherwise nothing.
pub fn solve_flow_control(params: &SolverParams, uplink_bits: &[f64]) -> Vec<f64> {
    uplink_bits
        .iter()
        .zip(&params.max_arrival_bits)
        .map(|(&q, &a_max)| if q <= params.lyapunov_v { a_max } else { 0.0 })
        .collect()
}

/// Per-device linear power price: `step_y Y + step_z (4 pi / lambda^2) sum_i Z_i h^i`.
fn power_price(
    params: &SolverParams,
    device: usize,
    vq_device_power: &[f64],
    vq_pixel_emf: &[f64],
    channel: &ChannelState,
    emf_active: bool,
) -> f64 {
    let mut c = params.step_y * vq_device_power[device];
    if emf_active {
        let np = channel.num_pixels;
        let row = &channel.pixel_gain[device * np..(device + 1) * np];
        let weighted: f64 = vq_pixel_emf.iter().zip(row).map(|(z, h)| z * h).sum();
        let coeff = 4.0 * std::f64::consts::PI / (params.wavelength_m * params.wavelength_m);
        c += params.step_z * coeff * weighted;
    }
    c
}

/// Uplink transmit power, per device, from the KKT conditions.
pub fn solve_uplink_power(
    params: &SolverParams,
    uplink_bits: &[f64],
    comp_bits: &[f64],
    vq_device_power: &[f64],
    vq_pixel_emf: &[f64],
    channel: &ChannelState,
) -> Vec<f64> {
    let emf_active = vq_pixel_emf.iter().any(|&z| z > 0.0);
    (0..params.num_devices())
        .map(|k| {
            let backlog_gap = uplink_bits[k] - comp_bits[k];
            if backlog_gap <= 0.0 {
                return 0.0;
            }
            let p_max = params.max_tx_power_w[k];
            let c = power_price(params, k, vq_device_power, vq_pixel_emf, channel, emf_active);
            if c <= 0.0 {
                // No power or exposure pressure: the objective is strictly
                // decreasing in p.
                return p_max;
            }
            let b = params.bandwidth_hz[k];
            let sigma =
                params.slot_duration_s * backlog_gap * b / (std::f64::consts::LN_2 * c);
            (sigma - params.noise_psd_w_per_hz * b / channel.uplink_gain[k]).clamp(0.0, p_max)
        })
        .collect()
}

/// Edge-host CPU schedule for one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct CpuSchedule {
    pub meh_freq_hz: f64,
    pub device_freq_hz: Vec<f64>,
}

/// Value of the CPU subproblem objective for a given clock and allocation.
fn cpu_objective(
    params: &SolverParams,
    comp_bits: &[f64],
    vq_meh_power: f64,
    meh_freq_hz: f64,
    device_freq_hz: &[f64],
) -> f64 {
    let served: f64 = comp_bits
        .iter()
        .zip(device_freq_hz)
        .zip(&params.bits_per_cycle)
        .map(|((&q, &f), &j)| q * params.slot_duration_s * j * f)
        .sum();
    params.step_h * vq_meh_power * params.kappa * meh_freq_hz.powi(3) - served
}

/// Greedy share of a clock budget: devices in descending backlog order
/// (ties by ascending index) get `min(remaining, Qm / (J tau))`.
fn greedy_cpu_allocation(params: &SolverParams, comp_bits: &[f64], budget_hz: f64) -> Vec<f64> {
    let k = params.num_devices();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        comp_bits[b]
            .partial_cmp(&comp_bits[a])
            .expect("finite backlog")
            .then(a.cmp(&b))
    });
    let mut alloc = vec![0.0; k];
    let mut remaining = budget_hz;
    for &dev in &order {
        if remaining <= 0.0 {
            break;
        }
        let cap = comp_bits[dev] / (params.bits_per_cycle[dev] * params.slot_duration_s);
        let f = cap.min(remaining);
        alloc[dev] = f;
        remaining -= f;
    }
    alloc
}

/// CPU scheduling: greedy inner allocation for each candidate clock, then
/// the clock with the smallest objective (ties resolved toward the smaller,
/// cheaper clock).
pub fn solve_cpu_scheduling(
    params: &SolverParams,
    comp_bits: &[f64],
    vq_meh_power: f64,
) -> CpuSchedule {
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for &fs in &params.freq_set_hz {
        let alloc = greedy_cpu_allocation(params, comp_bits, fs);
        let obj = cpu_objective(params, comp_bits, vq_meh_power, fs, &alloc);
        let better = match &best {
            None => true,
            Some((best_obj, _, _)) => obj < *best_obj,
        };
        if better {
            best = Some((obj, fs, alloc));
        }
    }
    let (_, meh_freq_hz, device_freq_hz) = best.expect("frequency set is non-empty");
    CpuSchedule {
        meh_freq_hz,
        device_freq_hz,
    }
}

/// The bracketed per-slot drift-plus-penalty expression:
///
/// ```text
/// sum_k [ Qu_k (A_k - tau R_k) + Qm_k (tau R_k - tau f_k J_k)
///         + step_y Y_k (p_k - p_th) ]
/// + sum_i step_z Z_i (Pd_i - Pd_th_i)
/// + step_h H (kappa f_s^3 - pc_th)
/// - V sum_k A_k
/// ```
///
/// Used by the oracles and regression tests; the hot path never evaluates it.
pub fn dpp_slot_objective(
    params: &SolverParams,
    state: &crate::queues::QueueState,
    decision: &SlotDecision,
    channel: &ChannelState,
) -> Result<f64, SolverError> {
    decision.validate(params)?;
    let tau = params.slot_duration_s;
    let mut obj = 0.0;
    for k in 0..params.num_devices() {
        let rate = rate_from_power(
            decision.tx_power[k],
            channel.uplink_gain[k],
            params.bandwidth_hz[k],
            params.noise_psd_w_per_hz,
        );
        let served = tau * rate;
        let computed = tau * decision.device_freq_hz[k] * params.bits_per_cycle[k];
        obj += state.uplink_bits[k] * (decision.arrivals[k] - served)
            + state.comp_bits[k] * (served - computed)
            + params.step_y
                * state.vq_device_power[k]
                * (decision.tx_power[k] - params.device_power_threshold_w);
        obj -= params.lyapunov_v * decision.arrivals[k];
    }
    let density = power_density(channel, &decision.tx_power, params.wavelength_m)
        .map_err(|e| SolverError::InvalidDecision(e.to_string()))?;
    for i in 0..params.num_pixels() {
        obj += params.step_z
            * state.vq_pixel_emf[i]
            * (density[i] - params.pixel_threshold_w_per_m2[i]);
    }
    obj += params.step_h
        * state.vq_meh_power
        * (params.kappa * decision.meh_freq_hz.powi(3) - params.meh_power_threshold_w);
    Ok(obj)
}

/// Per-device uplink objective, the quantity both the KKT solver and the
/// grid oracle minimize.
fn uplink_device_objective(
    params: &SolverParams,
    device: usize,
    backlog_gap_bits: f64,
    price: f64,
    gain: f64,
    p_w: f64,
) -> f64 {
    let rate = rate_from_power(
        p_w,
        gain,
        params.bandwidth_hz[device],
        params.noise_psd_w_per_hz,
    );
    -backlog_gap_bits * params.slot_duration_s * rate + price * p_w
}

/// Brute-force uplink solver: exhaustive scan of `p in [0, p_max]` at the
/// given resolution, independently per device.
pub fn oracle_uplink_grid(
    params: &SolverParams,
    uplink_bits: &[f64],
    comp_bits: &[f64],
    vq_device_power: &[f64],
    vq_pixel_emf: &[f64],
    channel: &ChannelState,
    resolution_w: f64,
) -> Vec<f64> {
    assert!(resolution_w > 0.0, "resolution must be positive");
    let emf_active = vq_pixel_emf.iter().any(|&z| z > 0.0);
    (0..params.num_devices())
        .map(|k| {
            let gap = uplink_bits[k] - comp_bits[k];
            let p_max = params.max_tx_power_w[k];
            let price =
                power_price(params, k, vq_device_power, vq_pixel_emf, channel, emf_active);
            let steps = (p_max / resolution_w).ceil() as usize;
            let mut best_p = 0.0;
            let mut best_obj = uplink_device_objective(
                params,
                k,
                gap,
                price,
                channel.uplink_gain[k],
                0.0,
            );
            for j in 1..=steps {
                let p = (j as f64 * resolution_w).min(p_max);
                let obj =
                    uplink_device_objective(params, k, gap, price, channel.uplink_gain[k], p);
                if obj < best_obj {
                    best_obj = obj;
                    best_p = p;
                }
            }
            best_p
        })
        .collect()
}

/// Brute-force CPU solver for small instances: for each candidate clock,
/// enumerates every greedy fill order (all vertices of the allocation
/// polytope) and keeps the global optimum.
pub fn oracle_cpu_exhaustive(
    params: &SolverParams,
    comp_bits: &[f64],
    vq_meh_power: f64,
) -> Result<CpuSchedule, SolverError> {
    let k = params.num_devices();
    let nf = params.freq_set_hz.len();
    if k > 4 || nf > 5 {
        return Err(SolverError::InstanceTooLarge {
            devices: k,
            freq_levels: nf,
        });
    }
    let orders = permutations(k);
    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for &fs in &params.freq_set_hz {
        for order in &orders {
            let mut alloc = vec![0.0; k];
            let mut remaining = fs;
            for &dev in order {
                let cap =
                    comp_bits[dev] / (params.bits_per_cycle[dev] * params.slot_duration_s);
                let f = cap.min(remaining);
                alloc[dev] = f;
                remaining -= f;
                if remaining <= 0.0 {
                    break;
                }
            }
            let obj = cpu_objective(params, comp_bits, vq_meh_power, fs, &alloc);
            let better = match &best {
                None => true,
                Some((best_obj, _, _)) => obj < *best_obj,
            };
            if better {
                best = Some((obj, fs, alloc));
            }
        }
    }
    let (_, meh_freq_hz, device_freq_hz) = best.expect("frequency set is non-empty");
    Ok(CpuSchedule {
        meh_freq_hz,
        device_freq_hz,
    })
}

/// All permutations of 0..n (n <= 4 in practice).
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn recurse(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            prefix.push(x);
            recurse(prefix, rest, out);
            prefix.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    recurse(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}
