//! Long-term average accumulation and derived run metrics.

use serde::Serialize;

use crate::queues::avg_e2e_delay;

/// Running sums over slots; means are `sum / T` at finalization.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    num_slots: usize,
    arrivals_bits: Vec<f64>,
    tx_power_w: Vec<f64>,
    computed_bits: Vec<f64>,
    meh_power_w: f64,
    pixel_density: Vec<f64>,
    q_u_bits: Vec<f64>,
    q_m_bits: Vec<f64>,
}

/// One slot's contribution to the long-term averages.
pub struct SlotSample<'a> {
    pub arrivals_bits: &'a [f64],
    pub tx_power_w: &'a [f64],
    pub computed_bits: &'a [f64],
    pub meh_power_w: f64,
    pub pixel_density_w_per_m2: &'a [f64],
    /// Queue states after the slot's update.
    pub uplink_bits: &'a [f64],
    pub comp_bits: &'a [f64],
}

impl MetricsAccumulator {
    pub fn new(num_devices: usize, num_pixels: usize) -> Self {
        Self {
            num_slots: 0,
            arrivals_bits: vec![0.0; num_devices],
            tx_power_w: vec![0.0; num_devices],
            computed_bits: vec![0.0; num_devices],
            meh_power_w: 0.0,
            pixel_density: vec![0.0; num_pixels],
            q_u_bits: vec![0.0; num_devices],
            q_m_bits: vec![0.0; num_devices],
        }
    }

    pub fn record(&mut self, sample: SlotSample<'_>) {
        self.num_slots += 1;
        for (acc, x) in self.arrivals_bits.iter_mut().zip(sample.arrivals_bits) {
            *acc += x;
        }
        for (acc, x) in self.tx_power_w.iter_mut().zip(sample.tx_power_w) {
            *acc += x;
        }
        for (acc, x) in self.computed_bits.iter_mut().zip(sample.computed_bits) {
            *acc += x;
        }
        self.meh_power_w += sample.meh_power_w;
        for (acc, x) in self
            .pixel_density
            .iter_mut()
            .zip(sample.pixel_density_w_per_m2)
        {
            *acc += x;
        }
        for (acc, x) in self.q_u_bits.iter_mut().zip(sample.uplink_bits) {
            *acc += x;
        }
        for (acc, x) in self.q_m_bits.iter_mut().zip(sample.comp_bits) {
            *acc += x;
        }
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    /// Total admitted bits per device so far (for conservation audits).
    pub fn total_arrivals_bits(&self) -> &[f64] {
        &self.arrivals_bits
    }

    /// Total computed bits per device so far.
    pub fn total_computed_bits(&self) -> &[f64] {
        &self.computed_bits
    }

    /// Running per-pixel mean density; usable before the run completes.
    pub fn mean_pixel_density(&self) -> Vec<f64> {
        let t = self.num_slots.max(1) as f64;
        self.pixel_density.iter().map(|x| x / t).collect()
    }

    pub fn finalize(&self, slot_duration_s: f64) -> RunMetrics {
        let t = self.num_slots as f64;
        let div = |v: &[f64]| -> Vec<f64> {
            if self.num_slots == 0 {
                vec![0.0; v.len()]
            } else {
                v.iter().map(|x| x / t).collect()
            }
        };
        let mean_arrival_bits_per_slot = div(&self.arrivals_bits);
        let mean_tx_power_w = div(&self.tx_power_w);
        let mean_computed_bits_per_slot = div(&self.computed_bits);
        let mean_pixel_density_w_per_m2 = div(&self.pixel_density);
        let mean_uplink_queue_bits = div(&self.q_u_bits);
        let mean_comp_queue_bits = div(&self.q_m_bits);
        let sum_rate_bps =
            mean_arrival_bits_per_slot.iter().sum::<f64>() / slot_duration_s;
        let delay_s: Vec<Option<f64>> = (0..mean_arrival_bits_per_slot.len())
            .map(|k| {
                if self.num_slots == 0 {
                    None
                } else {
                    avg_e2e_delay(
                        mean_uplink_queue_bits[k],
                        mean_comp_queue_bits[k],
                        mean_arrival_bits_per_slot[k],
                        slot_duration_s,
                    )
                }
            })
            .collect();
        let present: Vec<f64> = delay_s.iter().flatten().copied().collect();
        let mean_delay_s = if present.is_empty() {
            None
        } else {
            Some(present.iter().sum::<f64>() / present.len() as f64)
        };
        let max_pixel_density_w_per_m2 = mean_pixel_density_w_per_m2
            .iter()
            .copied()
            .fold(0.0, f64::max);
        RunMetrics {
            num_slots: self.num_slots,
            mean_arrival_bits_per_slot,
            sum_rate_bps,
            mean_tx_power_w,
            mean_meh_power_w: if self.num_slots == 0 {
                0.0
            } else {
                self.meh_power_w / t
            },
            mean_pixel_density_w_per_m2,
            max_pixel_density_w_per_m2,
            mean_uplink_queue_bits,
            mean_comp_queue_bits,
            mean_computed_bits_per_slot,
            delay_s,
            mean_delay_s,
        }
    }
}

/// Long-term averages of one realization.
#[derive(Debug, Clone, Serialize)]
pub struct RunMetrics {
    pub num_slots: usize,
    pub mean_arrival_bits_per_slot: Vec<f64>,
    /// Total admitted throughput, bits/s: sum_k mean(A_k) / tau.
    pub sum_rate_bps: f64,
    pub mean_tx_power_w: Vec<f64>,
    pub mean_meh_power_w: f64,
    pub mean_pixel_density_w_per_m2: Vec<f64>,
    pub max_pixel_density_w_per_m2: f64,
    pub mean_uplink_queue_bits: Vec<f64>,
    pub mean_comp_queue_bits: Vec<f64>,
    pub mean_computed_bits_per_slot: Vec<f64>,
    /// Little's-law end-to-end delay per device; absent where nothing was admitted.
    pub delay_s: Vec<Option<f64>>,
    pub mean_delay_s: Option<f64>,
}

impl RunMetrics {
    /// Mean over devices of the per-device mean transmit power.
    pub fn mean_device_power_w(&self) -> f64 {
        if self.mean_tx_power_w.is_empty() {
            0.0
        } else {
            self.mean_tx_power_w.iter().sum::<f64>() / self.mean_tx_power_w.len() as f64
        }
    }

    /// Largest per-device mean transmit power.
    pub fn max_device_power_w(&self) -> f64 {
        self.mean_tx_power_w.iter().copied().fold(0.0, f64::max)
    }
}

/// One row of a per-slot time series dump.
#[derive(Debug, Clone, Serialize)]
pub struct SlotRecord {
    pub slot: usize,
    pub admitted_bits: f64,
    pub served_uplink_bits: f64,
    pub computed_bits: f64,
    pub mean_tx_power_w: f64,
    pub max_tx_power_w: f64,
    pub meh_freq_hz: f64,
    pub meh_power_w: f64,
    pub max_pixel_density_w_per_m2: f64,
    pub total_uplink_queue_bits: f64,
    pub total_comp_queue_bits: f64,
    pub max_vq_device_power: f64,
    pub vq_meh_power: f64,
    pub max_vq_pixel_emf: f64,
}

/// Sample mean and standard deviation (n - 1 denominator).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub std: f64,
}

impl Stat {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return Self { mean: 0.0, std: 0.0 };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n < 2 {
            0.0
        } else {
            (samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self { mean, std }
    }
}

/// Aggregated trade-off numbers for one V value.
#[derive(Debug, Clone, Serialize)]
pub struct TradeoffPoint {
    pub lyapunov_v: f64,
    pub realizations: usize,
    pub sum_rate_bps: Stat,
    pub max_pixel_emf_w_per_m2: Stat,
    pub mean_device_power_w: Stat,
    pub max_device_power_w: Stat,
    pub meh_power_w: Stat,
    pub mean_delay_s: Stat,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn means_are_sums_over_t() {
        let mut acc = MetricsAccumulator::new(2, 1);
        for t in 0..4 {
            let x = t as f64;
            acc.record(SlotSample {
                arrivals_bits: &[x, 2.0 * x],
                tx_power_w: &[0.1, 0.0],
                computed_bits: &[x, 0.0],
                meh_power_w: 10.0,
                pixel_density_w_per_m2: &[0.01],
                uplink_bits: &[x, x],
                comp_bits: &[0.0, x],
            });
        }
        let m = acc.finalize(5e-3);
        assert_eq!(m.num_slots, 4);
        assert_eq!(m.mean_arrival_bits_per_slot, vec![1.5, 3.0]);
        assert_eq!(m.mean_meh_power_w, 10.0);
        // sum-rate = (1.5 + 3.0) / tau
        assert!((m.sum_rate_bps - 4.5 / 5e-3).abs() < 1e-9);
        assert_eq!(m.mean_uplink_queue_bits, vec![1.5, 1.5]);
    }

    #[test]
    fn empty_run_has_no_delay() {
        let acc = MetricsAccumulator::new(3, 2);
        let m = acc.finalize(5e-3);
        assert_eq!(m.num_slots, 0);
        assert_eq!(m.mean_delay_s, None);
        assert!(m.delay_s.iter().all(|d| d.is_none()));
        assert_eq!(m.sum_rate_bps, 0.0);
    }

    #[test]
    fn stat_sample_std() {
        let s = Stat::from_samples(&[1.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 2f64.sqrt()).abs() < 1e-12);
        let single = Stat::from_samples(&[5.0]);
        assert_eq!(single.std, 0.0);
    }
}
