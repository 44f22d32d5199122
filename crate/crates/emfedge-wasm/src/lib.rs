//! WASM bindings for the browser demo (`www/index.html`).
//!
//! Three operations are exposed:
//! - [`DemoSim`]: an interactive realization stepped slot by slot, with the
//!   running exposure field and long-term metrics for live rendering;
//! - [`tradeoff_sweep`]: a small V sweep returning the trade-off table;
//! - [`full_power_field`]: the exposure field if every device transmitted
//!   at full power, the uncontrolled worst case.
//!
//! Configs cross the boundary as JSON with the same schema as the TOML
//! config files; results come back as JSON strings or flat `Float64Array`s.
//!
//! The fallible logic lives in plain methods returning `Result<_, String>`
//! so it stays testable on the host target; the `wasm_bindgen` wrappers
//! only translate errors into JS exceptions.

use wasm_bindgen::prelude::*;

use emfedge::channel::power_density;
use emfedge::engine::{run_sweep, Simulation};
use emfedge::SimConfig;

#[wasm_bindgen(start)]
pub fn start() {
    console_error_panic_hook::set_once();
}

fn parse_config(config_json: &str) -> Result<SimConfig, String> {
    let cfg: SimConfig = serde_json::from_str(config_json).map_err(|e| e.to_string())?;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// The reference scenario as JSON, the demo's starting point.
#[wasm_bindgen]
pub fn default_params() -> String {
    serde_json::to_string(&SimConfig::paper_baseline()).expect("baseline serializes")
}

/// One interactive realization.
#[wasm_bindgen]
pub struct DemoSim {
    sim: Simulation,
}

impl DemoSim {
    pub fn try_new(config_json: &str) -> Result<DemoSim, String> {
        let cfg = parse_config(config_json)?;
        let sim = Simulation::new(&cfg, cfg.rng_seed).map_err(|e| e.to_string())?;
        Ok(DemoSim { sim })
    }

    pub fn step_json(&mut self, n: u32) -> Result<String, String> {
        let mut last = None;
        for _ in 0..n.max(1) {
            last = Some(self.sim.step());
        }
        serde_json::to_string(&last.expect("at least one step")).map_err(|e| e.to_string())
    }

    pub fn metrics_json_str(&self) -> Result<String, String> {
        serde_json::to_string(&self.sim.metrics_so_far()).map_err(|e| e.to_string())
    }
}

#[wasm_bindgen]
impl DemoSim {
    #[wasm_bindgen(constructor)]
    pub fn new(config_json: &str) -> Result<DemoSim, JsError> {
        Self::try_new(config_json).map_err(|e| JsError::new(&e))
    }

    /// Advances `n` slots and returns the last slot's summary as JSON.
    pub fn step(&mut self, n: u32) -> Result<String, JsError> {
        self.step_json(n).map_err(|e| JsError::new(&e))
    }

    pub fn slot(&self) -> u32 {
        self.sim.slot_index() as u32
    }

    /// Pixels per side of the exposure grid.
    pub fn grid_side(&self) -> u32 {
        self.sim.scenario().pixel_grid.pixels_per_side as u32
    }

    pub fn area_side_m(&self) -> f64 {
        self.sim.scenario().config.area_side_m
    }

    /// Running time-averaged incident power density per pixel, W/m²,
    /// row-major over the grid.
    pub fn mean_density_field(&self) -> Vec<f64> {
        self.sim.mean_pixel_density()
    }

    /// Per-pixel exposure thresholds, W/m², same layout as the field.
    pub fn threshold_field(&self) -> Vec<f64> {
        self.sim.scenario().pixel_grid.per_pixel_threshold.clone()
    }

    /// Device positions as interleaved x,y meters.
    pub fn device_positions(&self) -> Vec<f64> {
        self.sim
            .scenario()
            .device_positions
            .iter()
            .flat_map(|p| [p[0], p[1]])
            .collect()
    }

    /// Per-device mean transmit power so far, W.
    pub fn device_mean_power(&self) -> Vec<f64> {
        self.sim.metrics_so_far().mean_tx_power_w
    }

    /// Long-term averages so far as JSON.
    pub fn metrics_json(&self) -> Result<String, JsError> {
        self.metrics_json_str().map_err(|e| JsError::new(&e))
    }
}

pub fn tradeoff_sweep_json(
    config_json: &str,
    v_list: &[f64],
    realizations: u32,
    num_slots: u32,
) -> Result<String, String> {
    let mut cfg = parse_config(config_json)?;
    cfg.num_slots = num_slots as usize;
    let points = run_sweep(&cfg, v_list, realizations as usize).map_err(|e| e.to_string())?;
    serde_json::to_string(&points).map_err(|e| e.to_string())
}

/// Runs a V sweep (`realizations` placements per point, `num_slots` slots
/// each) and returns the trade-off rows as JSON.
#[wasm_bindgen]
pub fn tradeoff_sweep(
    config_json: &str,
    v_list: Vec<f64>,
    realizations: u32,
    num_slots: u32,
) -> Result<String, JsError> {
    tradeoff_sweep_json(config_json, &v_list, realizations, num_slots)
        .map_err(|e| JsError::new(&e))
}

pub fn full_power_field_vec(config_json: &str) -> Result<Vec<f64>, String> {
    let cfg = parse_config(config_json)?;
    let sim = Simulation::new(&cfg, cfg.rng_seed).map_err(|e| e.to_string())?;
    let channel = sim.scenario().sampler.mean_state();
    let powers = vec![cfg.device.max_tx_power_w; cfg.num_devices];
    power_density(&channel, &powers, cfg.wavelength_m()).map_err(|e| e.to_string())
}

/// Exposure field with every device at its maximum transmit power over the
/// fading-free channel, W/m²: the uncontrolled worst case.
#[wasm_bindgen]
pub fn full_power_field(config_json: &str) -> Result<Vec<f64>, JsError> {
    full_power_field_vec(config_json).map_err(|e| JsError::new(&e))
}
