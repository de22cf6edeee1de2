//! First-order radio model.
//!
//! Transmitting `k` bits over `d` metres costs `E_elec·k + ε_amp·k·d²`,
//! receiving costs `E_elec·k`, and fusing `n` incoming signals at a cluster
//! head costs `E_DA·k·n`. The free-space `d²` term is used at every distance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EnergyError {
    #[error("negative or non-finite input: {0}")]
    NegativeInput(f64),
    #[error("radio parameter `{name}` must be strictly positive, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transceiver electronics, J/bit.
    pub e_elec: f64,
    /// Transmit amplifier, J/bit/m².
    pub e_amp: f64,
    /// Data aggregation, J/bit/signal.
    pub e_da: f64,
    pub packet_bits: u64,
    /// Initial battery of every node, J.
    pub initial_energy: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            e_amp: 100e-12,
            e_da: 5e-9,
            packet_bits: 4000,
            initial_energy: 0.5,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        let fields = [
            ("e_elec", self.e_elec),
            ("e_amp", self.e_amp),
            ("e_da", self.e_da),
            ("packet_bits", self.packet_bits as f64),
            ("initial_energy", self.initial_energy),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(EnergyError::NonPositiveParam { name, value });
            }
        }
        Ok(())
    }

    pub fn tx_cost(&self, bits: u64, d: f64) -> Result<f64, EnergyError> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(EnergyError::NegativeInput(d));
        }
        let k = bits as f64;
        Ok(self.e_elec * k + self.e_amp * k * d * d)
    }

    pub fn rx_cost(&self, bits: u64) -> f64 {
        self.e_elec * bits as f64
    }

    pub fn aggregation_cost(&self, bits: u64, signals: u64) -> f64 {
        self.e_da * bits as f64 * signals as f64
    }

    /// One packet of `packet_bits` sent over `d` metres.
    pub fn packet_tx(&self, d: f64) -> Result<f64, EnergyError> {
        self.tx_cost(self.packet_bits, d)
    }

    pub fn packet_rx(&self) -> f64 {
        self.rx_cost(self.packet_bits)
    }

    pub fn packet_aggregation(&self, signals: u64) -> f64 {
        self.aggregation_cost(self.packet_bits, signals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn default_costs() {
        let p = RadioParams::default();
        assert!(rel_close(p.tx_cost(4000, 50.0).unwrap(), 1.2e-3));
        assert!(rel_close(p.tx_cost(4000, 0.0).unwrap(), 2.0e-4));
        assert_eq!(p.tx_cost(0, 37.0).unwrap(), 0.0);
        assert!(rel_close(p.rx_cost(4000), 2.0e-4));
        assert_eq!(p.rx_cost(0), 0.0);
        assert!(rel_close(p.aggregation_cost(4000, 1), 2.0e-5));
        assert!(rel_close(p.aggregation_cost(4000, 10), 2.0e-4));
        assert_eq!(p.aggregation_cost(4000, 0), 0.0);
    }

    #[test]
    fn rejects_bad_distance() {
        let p = RadioParams::default();
        assert_eq!(p.tx_cost(4000, -1.0), Err(EnergyError::NegativeInput(-1.0)));
        assert!(p.tx_cost(4000, f64::NAN).is_err());
    }

    #[test]
    fn validate_params() {
        assert!(RadioParams::default().validate().is_ok());
        let bad = RadioParams {
            initial_energy: 0.0,
            ..RadioParams::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(EnergyError::NonPositiveParam {
                name: "initial_energy",
                ..
            })
        ));
        let bad = RadioParams {
            packet_bits: 0,
            ..RadioParams::default()
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn tx_is_quadratic_in_distance(bits in 1u64..100_000, d in 0.0f64..200.0) {
            let p = RadioParams::default();
            let base = p.tx_cost(bits, 0.0).unwrap();
            let lhs = p.tx_cost(bits, 2.0 * d).unwrap() - base;
            let rhs = 4.0 * (p.tx_cost(bits, d).unwrap() - base);
            // tolerance scales with the full cost, the subtraction cancels the electronics term
            let scale = p.tx_cost(bits, 2.0 * d).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
            prop_assert!(p.tx_cost(bits, d + 0.5).unwrap() > p.tx_cost(bits, d).unwrap());
        }

        #[test]
        fn tx_dominates_rx(bits in 0u64..100_000, d in 0.0f64..200.0) {
            let p = RadioParams::default();
            let tx = p.tx_cost(bits, d).unwrap();
            let rx = p.rx_cost(bits);
            prop_assert!(tx >= rx);
            if bits > 0 && d > 0.0 {
                prop_assert!(tx > rx);
            }
        }

        #[test]
        fn costs_are_linear_in_bits(bits in 0u64..50_000, d in 0.0f64..100.0, n in 0u64..20) {
            let p = RadioParams::default();
            let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-18);
            prop_assert!(close(p.tx_cost(2 * bits, d).unwrap(), 2.0 * p.tx_cost(bits, d).unwrap()));
            prop_assert!(close(p.rx_cost(3 * bits), 3.0 * p.rx_cost(bits)));
            prop_assert!(close(p.aggregation_cost(2 * bits, n), 2.0 * p.aggregation_cost(bits, n)));
        }
    }
}
