use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::scaling::NoiseModel;
use crate::state::StateVector;

/// Default Z bias for the SI channel.
pub const DEFAULT_ETA: f64 = 10.0;

/// Single-qubit Pauli channel.
///
/// With probability `1 − p` nothing happens. Otherwise SD picks `X`, `Y`, `Z`
/// with `p/3` each; SI picks `Z` with `p η/(η+1)` and `X`, `Y` with
/// `p/(2(η+1))` each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseChannel {
    pub model: NoiseModel,
    pub p: f64,
    pub bias_eta: f64,
}

impl NoiseChannel {
    pub fn new(model: NoiseModel, p: f64, bias_eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid("p", format!("must lie in [0, 1], got {p}")));
        }
        if !(bias_eta > 0.0) || !bias_eta.is_finite() {
            return Err(Error::invalid("eta", format!("must be finite and > 0, got {bias_eta}")));
        }
        Ok(Self { model, p, bias_eta })
    }

    /// Probabilities of `I, X, Y, Z`.
    pub fn probabilities(&self) -> [f64; 4] {
        let p = self.p;
        match self.model {
            NoiseModel::Sd => [1.0 - p, p / 3.0, p / 3.0, p / 3.0],
            NoiseModel::Si => {
                let e = self.bias_eta;
                let xy = p / (2.0 * (e + 1.0));
                [1.0 - p, xy, xy, p * e / (e + 1.0)]
            }
        }
    }

    /// Draws one letter from a single uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.random();
        if u >= self.p {
            return Pauli::I;
        }
        let probs = self.probabilities();
        let mut acc = 0.0;
        for (k, &w) in probs.iter().enumerate().skip(1) {
            acc += w;
            if u < acc {
                return Pauli::from_index(k);
            }
        }
        Pauli::Z
    }
}

/// Samples the channel on `qubit` and applies the drawn letter in place.
pub fn apply_channel<R: Rng + ?Sized>(
    state: &mut StateVector,
    channel: &NoiseChannel,
    qubit: usize,
    rng: &mut R,
) -> Result<Pauli> {
    let letter = channel.sample(rng);
    state.apply_pauli(qubit, letter)?;
    Ok(letter)
}
