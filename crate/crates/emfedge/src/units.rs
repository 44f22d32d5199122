//! Physical constants and unit conversions.
//!
//! Everything past the configuration boundary is SI (W, Hz, bits, s, m).
//! dB, dBm and dBm/Hz values are accepted only when reading configs and
//! converted here, once.

use thiserror::Error;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("carrier frequency must be positive, got {0} Hz")]
    NonPositiveFrequency(f64),
}

/// Supported conversions at the config boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitConversion {
    DbmToWatts,
    WattsToDbm,
    DbmPerHzToWattsPerHz,
    DbToLinear,
}

/// Applies one of the boundary conversions. Total on finite inputs.
pub fn convert_units(value: f64, kind: UnitConversion) -> f64 {
    match kind {
        UnitConversion::DbmToWatts => dbm_to_watts(value),
        UnitConversion::WattsToDbm => watts_to_dbm(value),
        UnitConversion::DbmPerHzToWattsPerHz => dbm_to_watts(value),
        UnitConversion::DbToLinear => db_to_linear(value),
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Carrier wavelength λ = c / f₀ in meters.
pub fn wavelength_m(carrier_freq_hz: f64) -> Result<f64, UnitsError> {
    if carrier_freq_hz <= 0.0 {
        return Err(UnitsError::NonPositiveFrequency(carrier_freq_hz));
    }
    Ok(SPEED_OF_LIGHT_M_PER_S / carrier_freq_hz)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dbm_conversions() {
        assert!((dbm_to_watts(20.0) - 0.1).abs() < 1e-15);
        // -174 dBm/Hz is the usual thermal noise floor figure.
        let n0 = convert_units(-174.0, UnitConversion::DbmPerHzToWattsPerHz);
        assert!((n0 - 3.981071705534986e-21).abs() / n0 < 1e-12);
    }

    #[test]
    fn dbm_round_trip() {
        for x in [-50.0, 0.0, 20.0] {
            let back = watts_to_dbm(dbm_to_watts(x));
            assert!((back - x).abs() < 1e-12, "round trip of {x} gave {back}");
        }
    }

    #[test]
    fn db_linear_round_trip() {
        for x in [-30.0, -3.0, 0.0, 10.0] {
            let back = linear_to_db(db_to_linear(x));
            assert!((back - x).abs() < 1e-12);
        }
    }

    #[test]
    fn wavelength_values() {
        let lam = wavelength_m(3.5e9).unwrap();
        assert!((lam - 0.085654988).abs() < 1e-9);
        assert_eq!(wavelength_m(SPEED_OF_LIGHT_M_PER_S).unwrap(), 1.0);
        let half = wavelength_m(7.0e9).unwrap();
        assert!((half - lam / 2.0).abs() < 1e-15);
    }

    #[test]
    fn wavelength_rejects_nonpositive() {
        assert!(wavelength_m(0.0).is_err());
        assert!(wavelength_m(-1.0).is_err());
    }
}
