//! Physical and virtual queue dynamics.
//!
//! Each device carries an uplink queue (bits buffered locally) and a
//! computation queue (bits buffered at the edge host). Long-term power and
//! exposure constraints are tracked by virtual queues that integrate the
//! running violation: device power (one per device), edge-host power (one)
//! and incident power density (one per pixel).

/// Full queue state of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct QueueState {
    /// Per-device uplink backlog, bits.
    pub uplink_bits: Vec<f64>,
    /// Per-device computation backlog at the edge host, bits.
    pub comp_bits: Vec<f64>,
    /// Per-device transmit-power virtual queue.
    pub vq_device_power: Vec<f64>,
    /// Edge-host power virtual queue.
    pub vq_meh_power: f64,
    /// Per-pixel exposure virtual queue.
    pub vq_pixel_emf: Vec<f64>,
}

impl QueueState {
    pub fn zeros(num_devices: usize, num_pixels: usize) -> Self {
        Self {
            uplink_bits: vec![0.0; num_devices],
            comp_bits: vec![0.0; num_devices],
            vq_device_power: vec![0.0; num_devices],
            vq_meh_power: 0.0,
            vq_pixel_emf: vec![0.0; num_pixels],
        }
    }

    pub fn num_devices(&self) -> usize {
        self.uplink_bits.len()
    }

    pub fn is_finite(&self) -> bool {
        self.uplink_bits.iter().all(|x| x.is_finite())
            && self.comp_bits.iter().all(|x| x.is_finite())
            && self.vq_device_power.iter().all(|x| x.is_finite())
            && self.vq_meh_power.is_finite()
            && self.vq_pixel_emf.iter().all(|x| x.is_finite())
    }
}

/// Result of one uplink-queue step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UplinkUpdate {
    pub next_bits: f64,
    /// Bits actually drained this slot, min(tau * rate, backlog); these are
    /// the arrivals of the computation queue.
    pub served_bits: f64,
}

/// Uplink queue step: `Q' = max(0, Q - tau R) + A`.
pub fn update_uplink_queue(
    q_u_bits: f64,
    rate_bps: f64,
    arrivals_bits: f64,
    slot_duration_s: f64,
) -> UplinkUpdate {
    let served_bits = (slot_duration_s * rate_bps).min(q_u_bits);
    UplinkUpdate {
        next_bits: (q_u_bits - served_bits) + arrivals_bits,
        served_bits,
    }
}

/// Result of one computation-queue step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompUpdate {
    pub next_bits: f64,
    /// Bits computed this slot, min(tau f J, backlog).
    pub computed_bits: f64,
}

/// Computation queue step: `Q' = max(0, Q - tau f J) + served_uplink`.
pub fn update_comp_queue(
    q_m_bits: f64,
    cpu_hz: f64,
    bits_per_cycle: f64,
    served_uplink_bits: f64,
    slot_duration_s: f64,
) -> CompUpdate {
    let computed_bits = (slot_duration_s * cpu_hz * bits_per_cycle).min(q_m_bits);
    CompUpdate {
        next_bits: (q_m_bits - computed_bits) + served_uplink_bits,
        computed_bits,
    }
}

/// Virtual queue step: `G' = max(0, G + step (actual - threshold))`.
pub fn update_virtual_queue(g: f64, step: f64, actual: f64, threshold: f64) -> f64 {
    (g + step * (actual - threshold)).max(0.0)
}

/// Quadratic congestion measure over all physical and virtual queues,
/// `1/2 [sum_k (Qu^2 + Qm^2 + Y^2) + H^2 + sum_i Z^2]`. Diagnostics only.
pub fn lyapunov_value(state: &QueueState) -> f64 {
    let mut sum = 0.0;
    for k in 0..state.num_devices() {
        sum += state.uplink_bits[k] * state.uplink_bits[k]
            + state.comp_bits[k] * state.comp_bits[k]
            + state.vq_device_power[k] * state.vq_device_power[k];
    }
    sum += state.vq_meh_power * state.vq_meh_power;
    for z in &state.vq_pixel_emf {
        sum += z * z;
    }
    0.5 * sum
}

/// Little's-law end-to-end delay estimate `D = tau (Qu + Qm) / A` in
/// seconds. `None` when the device admitted nothing on average.
pub fn avg_e2e_delay(
    mean_q_u_bits: f64,
    mean_q_m_bits: f64,
    mean_arrival_bits_per_slot: f64,
    slot_duration_s: f64,
) -> Option<f64> {
    if mean_arrival_bits_per_slot > 0.0 {
        Some(slot_duration_s * (mean_q_u_bits + mean_q_m_bits) / mean_arrival_bits_per_slot)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uplink_no_service() {
        let u = update_uplink_queue(1000.0, 0.0, 500.0, 5e-3);
        assert_eq!(u.next_bits, 1500.0);
        assert_eq!(u.served_bits, 0.0);
    }

    #[test]
    fn uplink_over_service_clamps() {
        // tau * R = 5000 bits of service against a 1000-bit backlog.
        let u = update_uplink_queue(1000.0, 1e6, 0.0, 5e-3);
        assert_eq!(u.next_bits, 0.0);
        assert_eq!(u.served_bits, 1000.0);
    }

    #[test]
    fn uplink_partial_service() {
        let u = update_uplink_queue(1e5, 8e6, 2e4, 5e-3); // tau R = 4e4
        assert_eq!(u.next_bits, 8e4);
        assert_eq!(u.served_bits, 4e4);
    }

    #[test]
    fn comp_empty_queue_stays_empty() {
        let c = update_comp_queue(0.0, 3e9, 0.1, 0.0, 5e-3);
        assert_eq!(c.next_bits, 0.0);
        assert_eq!(c.computed_bits, 0.0);
    }

    #[test]
    fn comp_exact_drain() {
        // tau f J = 5e-3 * 2e9 * 0.1 = 1e6 exactly drains the backlog.
        let c = update_comp_queue(1e6, 2e9, 0.1, 0.0, 5e-3);
        assert_eq!(c.next_bits, 0.0);
        assert_eq!(c.computed_bits, 1e6);
    }

    #[test]
    fn comp_no_service() {
        let c = update_comp_queue(1e6, 0.0, 0.1, 3e4, 5e-3);
        assert_eq!(c.next_bits, 1.03e6);
    }

    #[test]
    fn virtual_queue_cases() {
        assert_eq!(update_virtual_queue(0.0, 1.0, 3.0, 3.0), 0.0);
        assert_eq!(update_virtual_queue(5.0, 1.0, 2.0, 3.0), 4.0);
        let g = update_virtual_queue(0.0, 1.0, 0.06, 0.05);
        assert!((g - 0.01).abs() < 1e-12);
    }

    #[test]
    fn lyapunov_simple_values() {
        let mut state = QueueState::zeros(3, 4);
        assert_eq!(lyapunov_value(&state), 0.0);
        state.uplink_bits[1] = 2.0;
        assert_eq!(lyapunov_value(&state), 2.0);
    }

    #[test]
    fn lyapunov_matches_independent_sum() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut state = QueueState::zeros(5, 6);
        for x in state
            .uplink_bits
            .iter_mut()
            .chain(state.comp_bits.iter_mut())
            .chain(state.vq_device_power.iter_mut())
            .chain(state.vq_pixel_emf.iter_mut())
        {
            *x = rng.gen::<f64>() * 1e5;
        }
        state.vq_meh_power = rng.gen::<f64>() * 1e3;
        let direct: f64 = 0.5
            * (state
                .uplink_bits
                .iter()
                .chain(&state.comp_bits)
                .chain(&state.vq_device_power)
                .chain(&state.vq_pixel_emf)
                .chain(std::iter::once(&state.vq_meh_power))
                .map(|x| x * x)
                .sum::<f64>());
        let got = lyapunov_value(&state);
        assert!((got - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn delay_examples() {
        assert_eq!(avg_e2e_delay(0.0, 0.0, 1e4, 5e-3), Some(0.0));
        let d = avg_e2e_delay(6e4, 4e4, 1e4, 5e-3).unwrap();
        assert!((d - 0.05).abs() < 1e-15);
        let doubled = avg_e2e_delay(1.2e5, 8e4, 1e4, 5e-3).unwrap();
        assert!((doubled - 2.0 * d).abs() < 1e-15);
        assert_eq!(avg_e2e_delay(1e5, 1e5, 0.0, 5e-3), None);
    }

    proptest! {
        #[test]
        fn queues_never_negative(
            q in 0.0..1e9f64,
            rate in 0.0..1e9f64,
            arrivals in 0.0..1e7f64,
            cpu in 0.0..5e9f64,
            served in 0.0..1e7f64,
            g in 0.0..1e9f64,
            step in 1e-6..1e6f64,
            actual in 0.0..100.0f64,
            threshold in 0.0..100.0f64,
        ) {
            let u = update_uplink_queue(q, rate, arrivals, 5e-3);
            prop_assert!(u.next_bits >= 0.0 && u.served_bits >= 0.0);
            prop_assert!(u.served_bits <= q);
            let c = update_comp_queue(q, cpu, 0.1, served, 5e-3);
            prop_assert!(c.next_bits >= 0.0 && c.computed_bits >= 0.0);
            prop_assert!(update_virtual_queue(g, step, actual, threshold) >= 0.0);
        }
    }
}
