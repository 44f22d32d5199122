//! Solver-vs-oracle comparison battery.
//!
//! Draws randomized problem instances and checks the closed-form /
//! greedy solvers against the brute-force oracles:
//!
//! - uplink power against the exhaustive grid scan,
//! - CPU scheduling against exhaustive vertex enumeration,
//! - the composed per-slot decision against a joint grid argmin of the
//!   drift-plus-penalty objective.
//!
//! Exposed through the CLI (`oracle` subcommand) and used verbatim by the
//! acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

use crate::channel::ChannelState;
use crate::queues::QueueState;
use crate::solvers::{
    dpp_slot_objective, oracle_cpu_exhaustive, oracle_uplink_grid, solve_cpu_scheduling,
    solve_flow_control, solve_uplink_power, SlotDecision, SolverParams,
};

#[derive(Debug, Clone)]
pub struct BatteryConfig {
    pub uplink_states: usize,
    pub uplink_resolution_w: f64,
    pub cpu_instances: usize,
    pub dpp_instances: usize,
    /// Grid points per power axis in the joint drift-plus-penalty scan.
    pub dpp_power_grid: usize,
    pub seed: u64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        Self {
            uplink_states: 1000,
            uplink_resolution_w: 1e-6,
            cpu_instances: 500,
            dpp_instances: 50,
            dpp_power_grid: 151,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct BatteryReport {
    pub uplink_states: usize,
    pub uplink_failures: usize,
    pub uplink_max_gap_w: f64,
    pub cpu_instances: usize,
    pub cpu_failures: usize,
    pub cpu_max_rel_dev: f64,
    pub dpp_instances: usize,
    pub dpp_failures: usize,
    pub dpp_max_power_gap_w: f64,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.uplink_failures == 0 && self.cpu_failures == 0 && self.dpp_failures == 0
    }
}

impl std::fmt::Display for BatteryReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "uplink power vs grid oracle:    {}/{} within resolution (max gap {:.3e} W)",
            self.uplink_states - self.uplink_failures,
            self.uplink_states,
            self.uplink_max_gap_w
        )?;
        writeln!(
            f,
            "cpu schedule vs exhaustive:     {}/{} objective values equal (max rel dev {:.3e})",
            self.cpu_instances - self.cpu_failures,
            self.cpu_instances,
            self.cpu_max_rel_dev
        )?;
        write!(
            f,
            "composed slot vs joint grid:    {}/{} argmins matched (max power gap {:.3e} W)",
            self.dpp_instances - self.dpp_failures,
            self.dpp_instances,
            self.dpp_max_power_gap_w
        )
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    (a + rng.gen::<f64>() * (b - a)).exp()
}

fn base_params(k: usize, pixels: usize) -> SolverParams {
    SolverParams {
        slot_duration_s: 5e-3,
        lyapunov_v: 1e5,
        noise_psd_w_per_hz: 3.981071705534986e-21,
        wavelength_m: 0.085654988,
        kappa: 1e-27,
        step_y: 1.0,
        step_h: 1.0,
        step_z: 1.0,
        bandwidth_hz: vec![2e5; k],
        max_tx_power_w: vec![0.1; k],
        max_arrival_bits: vec![2.5e4; k],
        bits_per_cycle: vec![0.1; k],
        freq_set_hz: vec![0.0, 2.25e9, 4.5e9],
        device_power_threshold_w: 0.05,
        meh_power_threshold_w: 45.0,
        pixel_threshold_w_per_m2: vec![0.04; pixels],
    }
}

fn random_channel(rng: &mut ChaCha8Rng, k: usize, pixels: usize) -> ChannelState {
    let uplink_gain = (0..k).map(|_| log_uniform(rng, 1e-9, 1e-5)).collect();
    let pixel_gain = (0..k * pixels)
        .map(|_| log_uniform(rng, 1e-8, 1e-4))
        .collect();
    ChannelState {
        uplink_gain,
        pixel_gain: Arc::new(pixel_gain),
        num_pixels: pixels,
        slot_index: 0,
    }
}

pub fn run_battery(cfg: &BatteryConfig) -> BatteryReport {
    let mut report = BatteryReport {
        uplink_states: cfg.uplink_states,
        cpu_instances: cfg.cpu_instances,
        dpp_instances: cfg.dpp_instances,
        ..BatteryReport::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // --- uplink power vs grid scan, one random device state per trial ---
    let pixels = 3;
    for _ in 0..cfg.uplink_states {
        let params = base_params(1, pixels);
        let channel = random_channel(&mut rng, 1, pixels);
        let mut q_u = log_uniform(&mut rng, 1e2, 3e5);
        let mut q_m = log_uniform(&mut rng, 1e2, 3e5);
        if rng.gen::<f64>() < 0.3 && q_u > q_m {
            std::mem::swap(&mut q_u, &mut q_m); // exercise the p = 0 branch
        }
        let y = if rng.gen::<f64>() < 0.3 {
            0.0
        } else {
            log_uniform(&mut rng, 1e2, 1e12)
        };
        let z: Vec<f64> = (0..pixels)
            .map(|_| {
                if rng.gen::<f64>() < 0.4 {
                    0.0
                } else {
                    log_uniform(&mut rng, 1e2, 1e12)
                }
            })
            .collect();
        let closed = solve_uplink_power(&params, &[q_u], &[q_m], &[y], &z, &channel)[0];
        let grid = oracle_uplink_grid(
            &params,
            &[q_u],
            &[q_m],
            &[y],
            &z,
            &channel,
            cfg.uplink_resolution_w,
        )[0];
        let gap = (closed - grid).abs();
        report.uplink_max_gap_w = report.uplink_max_gap_w.max(gap);
        if gap > cfg.uplink_resolution_w * 1.000001 + 1e-15 {
            report.uplink_failures += 1;
        }
    }

    // --- cpu scheduling vs exhaustive enumeration on small instances ---
    for _ in 0..cfg.cpu_instances {
        let k = 1 + rng.gen_range(0..4);
        let mut params = base_params(k, 1);
        // one conversion factor per instance, shared by all devices as in
        // the reference scenario
        let j = 0.01 + rng.gen::<f64>();
        params.bits_per_cycle = vec![j; k];
        let mut set = vec![0.0];
        for _ in 0..rng.gen_range(1..5) {
            set.push(log_uniform(&mut rng, 1e8, 5e9));
        }
        set.sort_by(|a, b| a.partial_cmp(b).unwrap());
        set.dedup();
        params.freq_set_hz = set;
        let q: Vec<f64> = (0..k)
            .map(|_| {
                if rng.gen::<f64>() < 0.2 {
                    0.0
                } else {
                    log_uniform(&mut rng, 1e3, 3e6)
                }
            })
            .collect();
        let h = if rng.gen::<f64>() < 0.3 {
            0.0
        } else {
            log_uniform(&mut rng, 1e0, 1e12)
        };
        let s = solve_cpu_scheduling(&params, &q, h);
        let o = oracle_cpu_exhaustive(&params, &q, h).expect("small instance");
        let obj = |sched: &crate::solvers::CpuSchedule| {
            let served: f64 = q
                .iter()
                .zip(&sched.device_freq_hz)
                .map(|(&qm, &f)| qm * params.slot_duration_s * j * f)
                .sum();
            params.step_h * h * params.kappa * sched.meh_freq_hz.powi(3) - served
        };
        let (obj_s, obj_o) = (obj(&s), obj(&o));
        let rel = (obj_s - obj_o).abs() / obj_o.abs().max(1.0);
        report.cpu_max_rel_dev = report.cpu_max_rel_dev.max(rel);
        if rel > 1e-12 {
            report.cpu_failures += 1;
        }
    }

    // --- composed solvers vs joint grid argmin of the slot objective ---
    for _ in 0..cfg.dpp_instances {
        let (k, pixels) = (2, 2);
        let mut params = base_params(k, pixels);
        params.lyapunov_v = log_uniform(&mut rng, 1e3, 1e5);
        params.max_arrival_bits = vec![log_uniform(&mut rng, 1e3, 3e4); k];
        let j = 0.05 + rng.gen::<f64>() * 0.5;
        params.bits_per_cycle = vec![j; k];
        let f1 = log_uniform(&mut rng, 1e8, 2e9);
        let f2 = f1 * (1.5 + rng.gen::<f64>());
        params.freq_set_hz = vec![0.0, f1, f2];
        let channel = random_channel(&mut rng, k, pixels);

        let mut state = QueueState::zeros(k, pixels);
        for i in 0..k {
            // keep the backlog away from the V knife edge so the flow-control
            // argmin is unique
            loop {
                let q = log_uniform(&mut rng, 1e2, 3e5);
                if (q - params.lyapunov_v).abs() > 0.02 * params.lyapunov_v {
                    state.uplink_bits[i] = q;
                    break;
                }
            }
            state.comp_bits[i] = log_uniform(&mut rng, 1e2, 3e5);
            state.vq_device_power[i] = if rng.gen::<f64>() < 0.3 {
                0.0
            } else {
                log_uniform(&mut rng, 1e4, 1e10)
            };
        }
        for z in state.vq_pixel_emf.iter_mut() {
            *z = if rng.gen::<f64>() < 0.3 {
                0.0
            } else {
                log_uniform(&mut rng, 1e4, 1e10)
            };
        }
        state.vq_meh_power = if rng.gen::<f64>() < 0.3 {
            0.0
        } else {
            log_uniform(&mut rng, 1e0, 1e10)
        };

        // composed closed-form decision
        let arrivals = solve_flow_control(&params, &state.uplink_bits);
        let tx_power = solve_uplink_power(
            &params,
            &state.uplink_bits,
            &state.comp_bits,
            &state.vq_device_power,
            &state.vq_pixel_emf,
            &channel,
        );
        let cpu = solve_cpu_scheduling(&params, &state.comp_bits, state.vq_meh_power);
        let composed = SlotDecision {
            arrivals,
            tx_power,
            meh_freq_hz: cpu.meh_freq_hz,
            device_freq_hz: cpu.device_freq_hz,
        };
        let composed_obj =
            dpp_slot_objective(&params, &state, &composed, &channel).expect("feasible");

        // joint grid argmin: arrivals at {0, a_max}, powers on a uniform
        // grid, every clock with its exhaustively-optimal inner allocation
        let n = cfg.dpp_power_grid.max(2);
        let step = params.max_tx_power_w[0] / (n - 1) as f64;
        let cpu_options: Vec<(f64, Vec<f64>)> = params
            .freq_set_hz
            .clone()
            .iter()
            .map(|&fs| {
                let mut sub = params.clone();
                sub.freq_set_hz = vec![fs];
                let o = oracle_cpu_exhaustive(&sub, &state.comp_bits, state.vq_meh_power)
                    .expect("small instance");
                (fs, o.device_freq_hz)
            })
            .collect();
        let mut best: Option<(f64, SlotDecision)> = None;
        for a_mask in 0..(1u32 << k) {
            let arrivals: Vec<f64> = (0..k)
                .map(|i| {
                    if a_mask & (1 << i) != 0 {
                        params.max_arrival_bits[i]
                    } else {
                        0.0
                    }
                })
                .collect();
            for p0 in 0..n {
                for p1 in 0..n {
                    let tx = vec![p0 as f64 * step, p1 as f64 * step];
                    for (fs, alloc) in &cpu_options {
                        let cand = SlotDecision {
                            arrivals: arrivals.clone(),
                            tx_power: tx.clone(),
                            meh_freq_hz: *fs,
                            device_freq_hz: alloc.clone(),
                        };
                        let obj = dpp_slot_objective(&params, &state, &cand, &channel)
                            .expect("grid point feasible");
                        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                            best = Some((obj, cand));
                        }
                    }
                }
            }
        }
        let (grid_obj, grid_dec) = best.expect("non-empty grid");

        let mut ok = composed.arrivals == grid_dec.arrivals
            && composed.meh_freq_hz == grid_dec.meh_freq_hz;
        let mut power_gap: f64 = 0.0;
        for i in 0..k {
            power_gap = power_gap.max((composed.tx_power[i] - grid_dec.tx_power[i]).abs());
        }
        ok &= power_gap <= step + 1e-12;
        // the closed form may only improve on the best grid point
        ok &= composed_obj <= grid_obj + 1e-9 * grid_obj.abs().max(1.0);
        report.dpp_max_power_gap_w = report.dpp_max_power_gap_w.max(power_gap);
        if !ok {
            report.dpp_failures += 1;
        }
    }

    report
}
