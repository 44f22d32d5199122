//! Wireless channel models: path loss, per-slot fading, Shannon rate/power
//! maps and the incident power density over the pixel grid.
//!
//! Gains are linear power gains throughout. The uplink gain of device `k`
//! is `h_k = PL_lin(d_k) * g` with `g` an i.i.d. unit-mean exponential
//! (Rayleigh amplitude fading, redrawn every slot). Device-to-pixel links
//! use deterministic path loss by default; fading on them can be enabled
//! for sensitivity studies.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("distance must be non-negative, got {0} m")]
    NegativeDistance(f64),
    #[error("expected {expected} transmit powers, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Path-loss laws selectable from the config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "variant")]
pub enum PathLossVariant {
    /// 3GPP indoor-factory LOS form: PL = 31.84 + 21.5 log10(d) + 19 log10(f_GHz).
    #[serde(rename = "factory_3gpp")]
    Factory3gpp,
    /// Friis free-space loss: PL = 20 log10(4 pi d / lambda).
    FreeSpace,
    /// Generic log-distance law: PL = ref_loss_db + 10 n log10(d).
    LogDistance { exponent: f64, ref_loss_db: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    #[serde(flatten)]
    pub variant: PathLossVariant,
    /// Distances below this are clamped before evaluating the law; every
    /// law here diverges as d -> 0.
    pub min_distance_m: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            variant: PathLossVariant::Factory3gpp,
            min_distance_m: 0.5,
        }
    }
}

/// Path loss in dB at the given distance and carrier frequency.
pub fn path_loss_db(
    model: &PathLossModel,
    distance_m: f64,
    carrier_freq_hz: f64,
) -> Result<f64, ChannelError> {
    if distance_m < 0.0 {
        return Err(ChannelError::NegativeDistance(distance_m));
    }
    let d = distance_m.max(model.min_distance_m);
    Ok(match model.variant {
        PathLossVariant::Factory3gpp => {
            31.84 + 21.5 * d.log10() + 19.0 * (carrier_freq_hz / 1e9).log10()
        }
        PathLossVariant::FreeSpace => {
            let lambda = crate::units::SPEED_OF_LIGHT_M_PER_S / carrier_freq_hz;
            20.0 * (4.0 * std::f64::consts::PI * d / lambda).log10()
        }
        PathLossVariant::LogDistance {
            exponent,
            ref_loss_db,
        } => ref_loss_db + 10.0 * exponent * d.log10(),
    })
}

/// Linear power gain 10^(-PL/10) at the given distance.
pub fn path_loss_gain(
    model: &PathLossModel,
    distance_m: f64,
    carrier_freq_hz: f64,
) -> Result<f64, ChannelError> {
    Ok(10f64.powf(-path_loss_db(model, distance_m, carrier_freq_hz)? / 10.0))
}

/// One slot's channel realization.
#[derive(Debug, Clone)]
pub struct ChannelState {
    /// Device -> AP linear power gains, one per device.
    pub uplink_gain: Vec<f64>,
    /// Device x pixel linear power gains, row-major per device.
    pub pixel_gain: Arc<Vec<f64>>,
    pub num_pixels: usize,
    pub slot_index: usize,
}

impl ChannelState {
    pub fn num_devices(&self) -> usize {
        self.uplink_gain.len()
    }

    /// Gain between device `k` and pixel `i`.
    pub fn pixel_gain_at(&self, device: usize, pixel: usize) -> f64 {
        self.pixel_gain[device * self.num_pixels + pixel]
    }
}

/// Draws per-slot channel states from fixed geometry.
///
/// Base (path-loss-only) gains are computed once from device, AP and pixel
/// positions; per-slot sampling applies fading where enabled.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    base_uplink_gain: Vec<f64>,
    base_pixel_gain: Arc<Vec<f64>>,
    num_pixels: usize,
    uplink_fading: bool,
    pixel_fading: bool,
}

impl ChannelSampler {
    pub fn new(
        device_positions: &[[f64; 2]],
        ap_position: [f64; 2],
        pixel_centers: &[[f64; 2]],
        model: &PathLossModel,
        carrier_freq_hz: f64,
        uplink_fading: bool,
        pixel_fading: bool,
    ) -> Result<Self, ChannelError> {
        let mut base_uplink_gain = Vec::with_capacity(device_positions.len());
        let mut base_pixel_gain = Vec::with_capacity(device_positions.len() * pixel_centers.len());
        for pos in device_positions {
            base_uplink_gain.push(path_loss_gain(
                model,
                distance(*pos, ap_position),
                carrier_freq_hz,
            )?);
            for pixel in pixel_centers {
                base_pixel_gain.push(path_loss_gain(
                    model,
                    distance(*pos, *pixel),
                    carrier_freq_hz,
                )?);
            }
        }
        Ok(Self {
            base_uplink_gain,
            base_pixel_gain: Arc::new(base_pixel_gain),
            num_pixels: pixel_centers.len(),
            uplink_fading,
            pixel_fading,
        })
    }

    /// Path-loss-only uplink gains (fading averaged out); used to derive
    /// the per-device arrival cap.
    pub fn mean_uplink_gain(&self) -> &[f64] {
        &self.base_uplink_gain
    }

    /// The fading-free channel state (all gains at their path-loss values).
    pub fn mean_state(&self) -> ChannelState {
        ChannelState {
            uplink_gain: self.base_uplink_gain.clone(),
            pixel_gain: Arc::clone(&self.base_pixel_gain),
            num_pixels: self.num_pixels,
            slot_index: 0,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng, slot_index: usize) -> ChannelState {
        let uplink_gain = if self.uplink_fading {
            self.base_uplink_gain
                .iter()
                .map(|g| g * exp_unit_mean(rng))
                .collect()
        } else {
            self.base_uplink_gain.clone()
        };
        let pixel_gain = if self.pixel_fading {
            Arc::new(
                self.base_pixel_gain
                    .iter()
                    .map(|g| g * exp_unit_mean(rng))
                    .collect(),
            )
        } else {
            Arc::clone(&self.base_pixel_gain)
        };
        ChannelState {
            uplink_gain,
            pixel_gain,
            num_pixels: self.num_pixels,
            slot_index,
        }
    }
}

/// Unit-mean exponential draw (Rayleigh power fading).
fn exp_unit_mean(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen(); // in [0, 1)
    -(1.0 - u).ln()
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Shannon rate R = B log2(1 + h p / (N0 B)) in bits/s.
pub fn rate_from_power(p_w: f64, gain: f64, bandwidth_hz: f64, noise_psd: f64) -> f64 {
    bandwidth_hz * (1.0 + gain * p_w / (noise_psd * bandwidth_hz)).log2()
}

/// Inverse of [`rate_from_power`]: p = (N0 B / h) (exp(R ln2 / B) - 1).
pub fn power_from_rate(r_bps: f64, gain: f64, bandwidth_hz: f64, noise_psd: f64) -> f64 {
    noise_psd * bandwidth_hz / gain * (r_bps * std::f64::consts::LN_2 / bandwidth_hz).exp_m1()
}

/// Total instantaneous incident power density per pixel, W/m²:
/// `P_d^i = sum_k (4 pi / lambda^2) p_k h_k^i`.
pub fn power_density(
    channel: &ChannelState,
    tx_powers_w: &[f64],
    wavelength_m: f64,
) -> Result<Vec<f64>, ChannelError> {
    if tx_powers_w.len() != channel.num_devices() {
        return Err(ChannelError::DimensionMismatch {
            expected: channel.num_devices(),
            got: tx_powers_w.len(),
        });
    }
    let coeff = 4.0 * std::f64::consts::PI / (wavelength_m * wavelength_m);
    let np = channel.num_pixels;
    let mut density = vec![0.0; np];
    for (k, &p) in tx_powers_w.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let row = &channel.pixel_gain[k * np..(k + 1) * np];
        let scaled = coeff * p;
        for (d, h) in density.iter_mut().zip(row) {
            *d += scaled * h;
        }
    }
    Ok(density)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_device_state(uplink: f64, pixel: Vec<f64>) -> ChannelState {
        let num_pixels = pixel.len();
        ChannelState {
            uplink_gain: vec![uplink],
            pixel_gain: Arc::new(pixel),
            num_pixels,
            slot_index: 0,
        }
    }

    #[test]
    fn free_space_identity_distance() {
        let model = PathLossModel {
            variant: PathLossVariant::FreeSpace,
            min_distance_m: 1e-6,
        };
        let f = 3.5e9;
        let lambda = crate::units::SPEED_OF_LIGHT_M_PER_S / f;
        let d = lambda / (4.0 * std::f64::consts::PI);
        let pl = path_loss_db(&model, d, f).unwrap();
        assert!(pl.abs() < 1e-9, "got {pl} dB");
    }

    #[test]
    fn factory_loss_at_one_meter() {
        let model = PathLossModel {
            variant: PathLossVariant::Factory3gpp,
            min_distance_m: 0.5,
        };
        let pl = path_loss_db(&model, 1.0, 3.5e9).unwrap();
        assert!((pl - 42.177292842655234).abs() < 1e-9, "got {pl}");
    }

    #[test]
    fn path_loss_monotone_in_distance() {
        let models = [
            PathLossModel::default(),
            PathLossModel {
                variant: PathLossVariant::FreeSpace,
                min_distance_m: 0.5,
            },
            PathLossModel {
                variant: PathLossVariant::LogDistance {
                    exponent: 2.7,
                    ref_loss_db: 40.0,
                },
                min_distance_m: 0.5,
            },
        ];
        for model in &models {
            for step in 0..60 {
                let d = 0.1 + 0.25 * step as f64;
                let a = path_loss_db(model, d, 3.5e9).unwrap();
                let b = path_loss_db(model, 2.0 * d, 3.5e9).unwrap();
                assert!(b >= a, "{model:?}: PL({}) = {a} > PL({}) = {b}", d, 2.0 * d);
            }
        }
    }

    #[test]
    fn negative_distance_rejected() {
        let model = PathLossModel::default();
        assert_eq!(
            path_loss_db(&model, -1.0, 3.5e9),
            Err(ChannelError::NegativeDistance(-1.0))
        );
    }

    #[test]
    fn sampler_without_fading_is_deterministic_path_loss() {
        let model = PathLossModel::default();
        let sampler = ChannelSampler::new(
            &[[1.0, 0.0], [4.0, 3.0]],
            [0.0, 0.0],
            &[[2.0, 0.0]],
            &model,
            3.5e9,
            false,
            false,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let state = sampler.sample(&mut rng, 0);
        let expected0 = path_loss_gain(&model, 1.0, 3.5e9).unwrap();
        let expected1 = path_loss_gain(&model, 5.0, 3.5e9).unwrap();
        assert_eq!(state.uplink_gain, vec![expected0, expected1]);
        assert_eq!(state.pixel_gain_at(0, 0), expected0); // same 1 m distance
    }

    #[test]
    fn fading_power_has_unit_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mean: f64 = (0..n).map(|_| exp_unit_mean(&mut rng)).sum::<f64>() / n as f64;
        assert!((0.99..=1.01).contains(&mean), "mean {mean}");
    }

    #[test]
    fn same_seed_same_channel_sequence() {
        let sampler = ChannelSampler::new(
            &[[1.0, 2.0], [7.0, 7.0]],
            [7.5, 7.5],
            &[[0.5, 0.5], [1.5, 0.5]],
            &PathLossModel::default(),
            3.5e9,
            true,
            true,
        )
        .unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        for t in 0..20 {
            let sa = sampler.sample(&mut a, t);
            let sb = sampler.sample(&mut b, t);
            assert_eq!(sa.uplink_gain, sb.uplink_gain);
            assert_eq!(*sa.pixel_gain, *sb.pixel_gain);
        }
    }

    #[test]
    fn rate_zero_power() {
        assert_eq!(rate_from_power(0.0, 1e-10, 2e5, 3.981e-21), 0.0);
    }

    #[test]
    fn rate_known_value() {
        // B = 200 kHz, h = 1e-10, p = 0.1 W, N0 = 3.981e-21 W/Hz
        let r = rate_from_power(0.1, 1e-10, 2e5, 3.981e-21);
        assert!((r - 2_723_324.8931628154).abs() / r < 1e-12, "got {r}");
    }

    #[test]
    fn power_at_rate_equal_bandwidth() {
        // R = B means SNR = 1, i.e. p = N0 B / h.
        let (b, h, n0) = (2e5, 1e-10, 3.981e-21);
        let p = power_from_rate(b, h, b, n0);
        assert!((p - n0 * b / h).abs() / p < 1e-12);
        assert_eq!(power_from_rate(0.0, h, b, n0), 0.0);
    }

    #[test]
    fn rate_power_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p: f64 = rng.gen::<f64>() * 0.1;
            let h = 10f64.powf(-4.0 - 6.0 * rng.gen::<f64>());
            let b = 1e4 + rng.gen::<f64>() * 1e6;
            let r = rate_from_power(p, h, b, 3.981e-21);
            let back = power_from_rate(r, h, b, 3.981e-21);
            assert!((back - p).abs() <= 1e-9 * p.max(1e-30), "p={p} back={back}");
        }
    }

    #[test]
    fn rate_concave_in_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p1: f64 = rng.gen::<f64>() * 0.1;
            let p2: f64 = rng.gen::<f64>() * 0.1;
            let h = 10f64.powf(-4.0 - 6.0 * rng.gen::<f64>());
            let mid = rate_from_power(0.5 * (p1 + p2), h, 2e5, 3.981e-21);
            let avg = 0.5 * (rate_from_power(p1, h, 2e5, 3.981e-21)
                + rate_from_power(p2, h, 2e5, 3.981e-21));
            assert!(mid >= avg - 1e-9 * avg.abs().max(1.0));
        }
    }

    #[test]
    fn density_zero_and_known_value() {
        let state = single_device_state(1e-7, vec![1e-6]);
        let zero = power_density(&state, &[0.0], 0.08565).unwrap();
        assert_eq!(zero, vec![0.0]);
        let d = power_density(&state, &[0.1], 0.08565).unwrap();
        assert!((d[0] - 1.7129911901821716e-4).abs() / d[0] < 1e-12, "got {}", d[0]);
    }

    #[test]
    fn density_linear_and_additive() {
        let num_pixels = 3;
        let state = ChannelState {
            uplink_gain: vec![1e-7, 2e-7],
            pixel_gain: Arc::new(vec![1e-6, 2e-6, 3e-6, 4e-6, 5e-6, 6e-6]),
            num_pixels,
            slot_index: 0,
        };
        let p = [0.03, 0.07];
        let full = power_density(&state, &p, 0.0857).unwrap();
        let doubled = power_density(&state, &[0.06, 0.14], 0.0857).unwrap();
        for (f, d) in full.iter().zip(&doubled) {
            assert!((2.0 * f - d).abs() < 1e-18);
        }
        let only0 = power_density(&state, &[p[0], 0.0], 0.0857).unwrap();
        let only1 = power_density(&state, &[0.0, p[1]], 0.0857).unwrap();
        for i in 0..num_pixels {
            assert!((only0[i] + only1[i] - full[i]).abs() <= 1e-15 * full[i]);
        }
    }

    #[test]
    fn density_dimension_mismatch() {
        let state = single_device_state(1e-7, vec![1e-6]);
        assert!(matches!(
            power_density(&state, &[0.1, 0.2], 0.0857),
            Err(ChannelError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }
}
