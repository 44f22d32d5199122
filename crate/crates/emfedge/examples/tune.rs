// Scratch harness for exploring step sizes / V. Not part of the deliverable.
use emfedge::config::ConstraintMode;
use emfedge::engine::{run_realizations, realization_seed};
use emfedge::SimConfig;

fn summarize(label: &str, cfg: &SimConfig, n: usize) {
    let seeds: Vec<u64> = (0..n).map(|i| realization_seed(cfg.rng_seed, i)).collect();
    let runs = run_realizations(cfg, &seeds).unwrap();
    let mean = |f: &dyn Fn(&emfedge::RunResult) -> f64| {
        runs.iter().map(f).sum::<f64>() / runs.len() as f64
    };
    let rate = mean(&|r| r.metrics.sum_rate_bps) / 1e6;
    let emf = mean(&|r| r.metrics.max_pixel_density_w_per_m2) * 1e3;
    let emf_max = runs
        .iter()
        .map(|r| r.metrics.max_pixel_density_w_per_m2)
        .fold(0.0f64, f64::max)
        * 1e3;
    let dev_p = mean(&|r| r.metrics.mean_device_power_w()) * 1e3;
    let dev_p_max = runs
        .iter()
        .map(|r| r.metrics.max_device_power_w())
        .fold(0.0f64, f64::max)
        * 1e3;
    let meh = mean(&|r| r.metrics.mean_meh_power_w);
    let meh_max = runs.iter().map(|r| r.metrics.mean_meh_power_w).fold(0.0f64, f64::max);
    let delay = mean(&|r| r.metrics.mean_delay_s.unwrap()) * 1e3;
    let cons = runs.iter().map(|r| r.bit_conservation_gap()).fold(0.0f64, f64::max);
    println!(
        "{label:<28} V={:>9.1e} rate={rate:7.1} Mb/s  emf={emf:6.2} (max {emf_max:6.2}) mW/m2  devP={dev_p:6.2} (maxdev {dev_p_max:6.2}) mW  meh={meh:6.2} (max {meh_max:6.2}) W  delay={delay:7.2} ms  cons={cons:.2e}",
        cfg.lyapunov_v
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(String::as_str).unwrap_or("all");
    let n: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);

    if which == "clamp" {
        for min_d in [0.5, 0.75, 1.0, 1.25] {
            println!("--- min_distance {min_d} ---");
            let mut cfg = SimConfig::paper_baseline();
            cfg.path_loss.min_distance_m = min_d;
            cfg.constraint_mode = ConstraintMode::Unconstrained;
            cfg.lyapunov_v = 2e5;
            summarize("unconstrained sat", &cfg, n);
            let mut cfg = SimConfig::paper_baseline();
            cfg.path_loss.min_distance_m = min_d;
            cfg.constraint_mode = ConstraintMode::Constrained;
            cfg.step_y = 1e5;
            cfg.step_h = 2e3;
            cfg.step_z = 1e5;
            cfg.lyapunov_v = 1e5;
            summarize("constrained", &cfg, n);
            let mut cfg = SimConfig::paper_baseline();
            cfg.path_loss.min_distance_m = min_d;
            cfg.constraint_mode = ConstraintMode::ConstrainedNoMeh;
            cfg.step_y = 1e5;
            cfg.step_z = 1e5;
            cfg.lyapunov_v = 1.6e5;
            summarize("no-meh", &cfg, n);
        }
        return;
    }

    if which == "vcon" {
        for min_d in [1.0, 1.25] {
            println!("--- clamp {min_d} ---");
            for v in [5e4, 6e4, 7e4, 8e4, 1e5, 1.3e5] {
                let mut cfg = SimConfig::paper_baseline();
                cfg.path_loss.min_distance_m = min_d;
                cfg.constraint_mode = ConstraintMode::Constrained;
                cfg.step_y = 1e5;
                cfg.step_h = 2e3;
                cfg.step_z = 1e5;
                cfg.lyapunov_v = v;
                summarize("constrained", &cfg, n);
            }
            for v in [1.2e5, 1.5e5] {
                let mut cfg = SimConfig::paper_baseline();
                cfg.path_loss.min_distance_m = min_d;
                cfg.constraint_mode = ConstraintMode::ConstrainedNoMeh;
                cfg.step_y = 1e5;
                cfg.step_z = 1e5;
                cfg.lyapunov_v = v;
                summarize("no-meh", &cfg, n);
            }
        }
        return;
    }

    if which == "all" || which == "unc" {
        println!("--- unconstrained V sweep ---");
        for v in [1e3, 3e3, 1e4, 3e4, 1e5, 3e5] {
            let mut cfg = SimConfig::paper_baseline();
            cfg.constraint_mode = ConstraintMode::Unconstrained;
            cfg.lyapunov_v = v;
            summarize("unconstrained", &cfg, n);
        }
    }
    if which == "all" || which == "con" {
        println!("--- constrained, tuned steps ---");
        for (sy, sh, sz, v) in [
            (2e4, 4e2, 2e4, 1e5),
            (2e4, 4e2, 2e4, 3e4),
            (5e4, 1e3, 5e4, 1e5),
            (1e5, 2e3, 1e5, 1e5),
            (1e4, 2e2, 1e4, 1e5),
        ] {
            let mut cfg = SimConfig::paper_baseline();
            cfg.constraint_mode = ConstraintMode::Constrained;
            cfg.step_y = sy;
            cfg.step_h = sh;
            cfg.step_z = sz;
            cfg.lyapunov_v = v;
            summarize(&format!("con y={sy:.0e} h={sh:.0e} z={sz:.0e}"), &cfg, n);
        }
    }
    if which == "all" || which == "nomeh" {
        println!("--- constrained no meh ---");
        for (sy, sz, v) in [(2e4, 2e4, 1e5), (5e4, 5e4, 1e5)] {
            let mut cfg = SimConfig::paper_baseline();
            cfg.constraint_mode = ConstraintMode::ConstrainedNoMeh;
            cfg.step_y = sy;
            cfg.step_z = sz;
            cfg.lyapunov_v = v;
            summarize(&format!("nomeh y={sy:.0e} z={sz:.0e}"), &cfg, n);
        }
    }
}
