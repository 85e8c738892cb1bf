use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::NoiseChannel;
use super::gate::{apply_gate, build_circuit, Gate, GateKind, NoisePlacement};
use crate::error::{Error, Result};
use crate::logical::{rotated_logical_state, EncodingMode, LogicalAmplitudes};
use crate::pauli::Pauli;
use crate::rotation::RotationParams;
use crate::scaling::NoiseModel;
use crate::state::StateVector;

/// A trial fails when its fidelity with the ideal output drops below this.
pub const FAILURE_FIDELITY: f64 = 0.5;
/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959964;
pub const MIN_TRIALS: u64 = 100;
/// Largest number of noise locations [`exact_failure_probability`] enumerates.
pub const MAX_EXACT_SITES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub failed: bool,
    pub fidelity: f64,
}

impl TrialOutcome {
    fn from_fidelity(fidelity: f64) -> Self {
        Self {
            failed: fidelity < FAILURE_FIDELITY,
            fidelity,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub placement: NoisePlacement,
    pub encoding: EncodingMode,
    pub amplitudes: LogicalAmplitudes,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            placement: NoisePlacement::Figure,
            encoding: EncodingMode::Ghz,
            amplitudes: LogicalAmplitudes::plus(),
        }
    }
}

/// A circuit, its input state and the ideal trajectory.
///
/// `snapshots[i]` is the noiseless state before gate `i`, so a trial whose
/// first error sits at gate `i` restarts from there.
#[derive(Debug, Clone)]
pub struct Simulator {
    circuit: Vec<Gate>,
    snapshots: Vec<StateVector>,
    sites: Vec<usize>,
    site_of_gate: Vec<Option<usize>>,
}

impl Simulator {
    /// The standard circuit with the rotated logical state as input.
    pub fn new(n: usize, rot: &RotationParams, opts: &SimOptions) -> Result<Self> {
        let circuit = build_circuit(n, rot, opts.placement)?;
        let input = rotated_logical_state(&opts.amplitudes, n, rot, opts.encoding)?;
        Self::from_circuit(circuit, input)
    }

    pub fn from_circuit(circuit: Vec<Gate>, input: StateVector) -> Result<Self> {
        let n = input.n();
        let mut snapshots = Vec::with_capacity(circuit.len() + 1);
        let mut sites = Vec::new();
        let mut site_of_gate = Vec::with_capacity(circuit.len());
        let mut state = input;
        for (i, g) in circuit.iter().enumerate() {
            g.validate(n)?;
            snapshots.push(state.clone());
            if g.kind == GateKind::Noise {
                site_of_gate.push(Some(sites.len()));
                sites.push(i);
            } else {
                site_of_gate.push(None);
                apply_gate(&mut state, g)?;
            }
        }
        snapshots.push(state);
        Ok(Self {
            circuit,
            snapshots,
            sites,
            site_of_gate,
        })
    }

    pub fn n(&self) -> usize {
        self.ideal().n()
    }

    pub fn circuit(&self) -> &[Gate] {
        &self.circuit
    }

    pub fn input(&self) -> &StateVector {
        &self.snapshots[0]
    }

    pub fn ideal(&self) -> &StateVector {
        self.snapshots.last().expect("snapshots are never empty")
    }

    pub fn noise_sites(&self) -> usize {
        self.sites.len()
    }

    /// Runs gates `from..to`, inserting `errors[site]` at noise markers.
    fn propagate(&self, state: &mut StateVector, from: usize, to: usize, errors: &[Pauli]) -> Result<()> {
        for i in from..to {
            let g = &self.circuit[i];
            match self.site_of_gate[i] {
                Some(k) => state.apply_pauli(g.targets[0], errors[k])?,
                None => apply_gate(state, g)?,
            }
        }
        Ok(())
    }

    /// Output state with one Pauli letter per noise site, in circuit order.
    pub fn run_with_errors(&self, errors: &[Pauli]) -> Result<StateVector> {
        if errors.len() != self.sites.len() {
            return Err(Error::DimensionMismatch {
                left: format!("{} noise sites", self.sites.len()),
                right: format!("{} error letters", errors.len()),
            });
        }
        match errors.iter().position(|&p| p != Pauli::I) {
            None => Ok(self.ideal().clone()),
            Some(k) => {
                let start = self.sites[k];
                let mut state = self.snapshots[start].clone();
                self.propagate(&mut state, start, self.circuit.len(), errors)?;
                Ok(state)
            }
        }
    }

    pub fn fidelity_with_errors(&self, errors: &[Pauli]) -> Result<f64> {
        self.ideal().fidelity(&self.run_with_errors(errors)?)
    }

    /// One Monte-Carlo trial. Every site draws exactly one variate, in circuit
    /// order, whether or not an error occurs.
    pub fn run_trial<R: Rng + ?Sized>(&self, channel: &NoiseChannel, rng: &mut R) -> Result<TrialOutcome> {
        let errors: Vec<Pauli> = self.sites.iter().map(|_| channel.sample(rng)).collect();
        if errors.iter().all(|&p| p == Pauli::I) {
            return Ok(TrialOutcome::from_fidelity(1.0));
        }
        Ok(TrialOutcome::from_fidelity(self.fidelity_with_errors(&errors)?))
    }
}

pub fn run_trial<R: Rng + ?Sized>(sim: &Simulator, channel: &NoiseChannel, rng: &mut R) -> Result<TrialOutcome> {
    sim.run_trial(channel, rng)
}

/// Generator for trial `trial`: the seed picks the key, the trial index the
/// stream, so trials are independent of scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Wilson score interval at 95%.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if failures == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if failures == trials {
        1.0
    } else {
        (center + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub p_hat: f64,
    pub ci95: [f64; 2],
    pub failures: u64,
    pub trials: u64,
}

/// Failure rate of `trials` seeded trials. Runs on the current rayon pool;
/// the failure count is a plain sum, so the result does not depend on the
/// number of threads.
pub fn estimate_with(sim: &Simulator, channel: &NoiseChannel, trials: u64, seed: u64) -> Result<Estimate> {
    if trials < MIN_TRIALS {
        return Err(Error::invalid(
            "trials",
            format!("need at least {MIN_TRIALS}, got {trials}"),
        ));
    }
    let failures = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            sim.run_trial(channel, &mut rng).map(|o| o.failed as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    let (lo, hi) = wilson_interval(failures, trials);
    Ok(Estimate {
        p_hat: failures as f64 / trials as f64,
        ci95: [lo, hi],
        failures,
        trials,
    })
}

/// [`estimate_with`] on the standard circuit with default options.
pub fn estimate_plog(
    n: usize,
    rot: &RotationParams,
    channel: &NoiseChannel,
    trials: u64,
    seed: u64,
) -> Result<Estimate> {
    estimate_with(&Simulator::new(n, rot, &SimOptions::default())?, channel, trials, seed)
}

/// Exact failure probability by summing over every Pauli pattern on the noise
/// sites, weighted by the channel probabilities.
pub fn exact_failure_probability(sim: &Simulator, channel: &NoiseChannel) -> Result<f64> {
    let k = sim.noise_sites();
    if k > MAX_EXACT_SITES {
        return Err(Error::EnumerationBound {
            n: k,
            max: MAX_EXACT_SITES,
        });
    }
    let probs = channel.probabilities();
    let mut errors = vec![Pauli::I; k];
    let start = sim.sites.first().copied().unwrap_or(sim.circuit.len());
    let mut total = 0.0;
    explore(
        sim,
        &probs,
        0,
        start,
        sim.snapshots[start].clone(),
        1.0,
        &mut errors,
        &mut total,
    )?;
    Ok(total)
}

/// `state` is the state just before gate `at`, which is noise site `site`
/// (or the end of the circuit once every site is fixed).
#[allow(clippy::too_many_arguments)]
fn explore(
    sim: &Simulator,
    probs: &[f64; 4],
    site: usize,
    at: usize,
    state: StateVector,
    weight: f64,
    errors: &mut Vec<Pauli>,
    total: &mut f64,
) -> Result<()> {
    if site == sim.sites.len() {
        if sim.ideal().fidelity(&state)? < FAILURE_FIDELITY {
            *total += weight;
        }
        return Ok(());
    }
    let q = sim.circuit[at].targets[0];
    let next = sim.sites.get(site + 1).copied().unwrap_or(sim.circuit.len());
    for (idx, &w) in probs.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let letter = Pauli::from_index(idx);
        errors[site] = letter;
        let mut s = state.clone();
        s.apply_pauli(q, letter)?;
        sim.propagate(&mut s, at + 1, next, errors)?;
        explore(sim, probs, site + 1, next, s, weight * w, errors, total)?;
    }
    errors[site] = Pauli::I;
    Ok(())
}

/// JSON record of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub model: NoiseModel,
    pub n: usize,
    pub theta: f64,
    pub phi: f64,
    pub p: f64,
    pub eta: f64,
    pub trials: u64,
    pub seed: u64,
    pub p_log_hat: f64,
    pub ci95: [f64; 2],
}

impl SimulationResult {
    pub fn new(n: usize, rot: &RotationParams, channel: &NoiseChannel, seed: u64, est: &Estimate) -> Self {
        Self {
            model: channel.model,
            n,
            theta: rot.theta,
            phi: rot.phi,
            p: channel.p,
            eta: channel.bias_eta,
            trials: est.trials,
            seed,
            p_log_hat: est.p_hat,
            ci95: est.ci95,
        }
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::noise::channel::DEFAULT_ETA;
    use crate::rotation::Convention;

    fn channel(model: NoiseModel, p: f64) -> NoiseChannel {
        NoiseChannel::new(model, p, DEFAULT_ETA).unwrap()
    }

    fn sim(n: usize, theta: f64, phi: f64) -> Simulator {
        Simulator::new(
            n,
            &RotationParams::angles(theta, phi, Convention::HalfAngle),
            &SimOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_trials_have_unit_fidelity() {
        let s = sim(5, 0.8, 1.9);
        let ch = channel(NoiseModel::Sd, 0.0);
        let mut rng = trial_rng(1, 0);
        let out = s.run_trial(&ch, &mut rng).unwrap();
        assert_eq!(
            out,
            TrialOutcome {
                failed: false,
                fidelity: 1.0
            }
        );
        let f = s.fidelity_with_errors(&vec![Pauli::I; s.noise_sites()]).unwrap();
        assert!((f - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ideal_run_preserves_norm_after_every_gate() {
        let s = sim(6, 0.4, 2.2);
        let mut state = s.input().clone();
        for g in s.circuit() {
            apply_gate(&mut state, g).unwrap();
            assert!((state.norm() - 1.0).abs() < 1e-10);
        }
        assert!(state.max_abs_diff(s.ideal()) < 1e-14);
    }

    #[test]
    fn single_z_on_ghz_is_orthogonal() {
        let ghz = StateVector::new(
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let circuit = vec![
            Gate::new(GateKind::Noise, vec![0], None).unwrap(),
            Gate::new(GateKind::Noise, vec![1], None).unwrap(),
        ];
        let s = Simulator::from_circuit(circuit, ghz).unwrap();
        assert!(s.fidelity_with_errors(&[Pauli::Z, Pauli::I]).unwrap() < 1e-15);
        assert!((s.fidelity_with_errors(&[Pauli::Z, Pauli::Z]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn heavy_noise_mostly_fails() {
        let est = estimate_plog(
            7,
            &RotationParams::angles(0.3, 0.2, Convention::HalfAngle),
            &channel(NoiseModel::Sd, 1.0),
            10_000,
            3,
        )
        .unwrap();
        assert!(est.p_hat > 0.5);
    }

    #[test]
    fn zero_noise_has_no_failures() {
        let est = estimate_plog(7, &RotationParams::zero(), &channel(NoiseModel::Si, 0.0), 1_000, 3).unwrap();
        assert_eq!(est.failures, 0);
        assert_eq!(est.ci95[0], 0.0);
        assert!(est.ci95[1] < 4e-3);
    }

    #[test]
    fn estimates_are_reproducible_and_thread_independent() {
        let s = sim(4, 0.5, 0.5);
        let ch = channel(NoiseModel::Sd, 0.05);
        let a = estimate_with(&s, &ch, 2_000, 17).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate_with(&s, &ch, 2_000, 17).unwrap());
        assert_eq!(a, b);
        assert_ne!(estimate_with(&s, &ch, 2_000, 18).unwrap().failures, 0);
    }

    #[test]
    fn too_few_trials_rejected() {
        assert!(estimate_with(&sim(2, 0.0, 0.0), &channel(NoiseModel::Sd, 0.1), 99, 0).is_err());
    }

    #[test]
    fn monte_carlo_agrees_with_enumeration() {
        let s = sim(3, 0.6, 0.3);
        for model in NoiseModel::ALL {
            let ch = channel(model, 0.05);
            let exact = exact_failure_probability(&s, &ch).unwrap();
            let est = estimate_with(&s, &ch, 40_000, 5).unwrap();
            assert!(
                est.ci95[0] <= exact && exact <= est.ci95[1],
                "{model}: {exact} vs {est:?}"
            );
        }
    }

    #[test]
    fn enumeration_limits() {
        let s = sim(3, 0.0, 0.0);
        assert_eq!(
            exact_failure_probability(&s, &channel(NoiseModel::Sd, 0.0)).unwrap(),
            0.0
        );
        let wide = Simulator::new(
            4,
            &RotationParams::zero(),
            &SimOptions {
                placement: NoisePlacement::PerGate,
                ..SimOptions::default()
            },
        )
        .unwrap();
        assert!(matches!(
            exact_failure_probability(&wide, &channel(NoiseModel::Sd, 0.1)),
            Err(Error::EnumerationBound { .. })
        ));
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 100_000);
        assert_eq!(lo, 0.0);
        assert!(hi < 4e-5);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!((lo - 0.4038).abs() < 1e-3);
        assert_eq!(wilson_interval(100, 100).1, 1.0);
    }

    #[test]
    fn result_json_layout() {
        let rot = RotationParams::angles(0.1, 0.2, Convention::HalfAngle);
        let ch = channel(NoiseModel::Si, 0.0);
        let est = Estimate {
            p_hat: 0.0,
            ci95: [0.0, 0.5],
            failures: 0,
            trials: 100,
        };
        let json = serde_json::to_string(&SimulationResult::new(7, &rot, &ch, 9, &est)).unwrap();
        assert_eq!(
            json,
            r#"{"model":"si","n":7,"theta":0.1,"phi":0.2,"p":0.0,"eta":10.0,"trials":100,"seed":9,"p_log_hat":0.0,"ci95":[0.0,0.5]}"#
        );
    }
}
