//! Seeded Monte Carlo generation of trial-by-trial outcomes for any Bell
//! state and setting policy, including the three-setting Mermin device.
//!
//! Reproducibility contract: per-trial randomness is derived from
//! (seed, trial index) via [`TrialRng`], so a run produces the identical
//! trial log for any partitioning of trial indices across workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell_states::{joint_distribution, BellKind, JointDistribution};
use crate::rng::TrialRng;
use crate::spin_algebra::Direction;

/// One of the three Mermin device detector settings.
///
/// Settings map to in-plane angles 0, 120 and 240 degrees, the three SG
/// magnet orientations of the device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeviceSetting {
    S1,
    S2,
    S3,
}

impl DeviceSetting {
    pub const ALL: [DeviceSetting; 3] = [DeviceSetting::S1, DeviceSetting::S2, DeviceSetting::S3];

    pub fn from_index(index: u64) -> Self {
        match index % 3 {
            0 => DeviceSetting::S1,
            1 => DeviceSetting::S2,
            _ => DeviceSetting::S3,
        }
    }

    pub fn number(&self) -> u8 {
        match self {
            DeviceSetting::S1 => 1,
            DeviceSetting::S2 => 2,
            DeviceSetting::S3 => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(DeviceSetting::S1),
            2 => Some(DeviceSetting::S2),
            3 => Some(DeviceSetting::S3),
            _ => None,
        }
    }

    /// In-plane angle in radians (0, 120 or 240 degrees).
    pub fn angle(&self) -> f64 {
        (self.number() - 1) as f64 * 2.0 * std::f64::consts::PI / 3.0
    }
}

/// A detector setting as recorded in a trial log: a device setting number
/// or a fixed angle in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SettingValue {
    Device(u8),
    AngleDeg(f64),
}

impl SettingValue {
    /// The in-plane angle in radians, whichever representation is stored.
    pub fn angle(&self) -> f64 {
        match self {
            SettingValue::Device(n) => DeviceSetting::from_number(*n)
                .map(|s| s.angle())
                .unwrap_or(f64::NAN),
            SettingValue::AngleDeg(deg) => deg.to_radians(),
        }
    }
}

/// One experimental trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub alice_setting: SettingValue,
    pub bob_setting: SettingValue,
    /// Exactly +1 or -1, never fractional.
    pub alice_outcome: i8,
    pub bob_outcome: i8,
}

impl TrialRecord {
    pub fn outcomes_are_binary(&self) -> bool {
        (self.alice_outcome == 1 || self.alice_outcome == -1)
            && (self.bob_outcome == 1 || self.bob_outcome == -1)
    }

    pub fn product(&self) -> f64 {
        (self.alice_outcome as i32 * self.bob_outcome as i32) as f64
    }
}

/// How Alice and Bob choose settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SettingPolicy {
    /// Both parties fixed at in-plane angles alpha, beta (radians).
    Fixed { alpha: f64, beta: f64 },
    /// Each party draws one of the three device settings independently and
    /// uniformly per trial.
    Device,
}

/// A complete, reproducible experiment description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub state: BellKind,
    pub policy: SettingPolicy,
    pub trials: u64,
    pub seed: u64,
}

/// Draws one outcome pair from a joint distribution by inverse CDF over the
/// four cells in the fixed order (uu, ud, du, dd).
pub fn sample_outcome(dist: &JointDistribution, rng: &mut TrialRng) -> (i8, i8) {
    let u = rng.next_f64();
    let cells = dist.cells();
    let mut cumulative = 0.0;
    let outcomes = [(1, 1), (1, -1), (-1, 1), (-1, -1)];
    for (p, pair) in cells.iter().zip(outcomes.iter()) {
        cumulative += p;
        if u < cumulative {
            return *pair;
        }
    }
    (-1, -1)
}

/// Samples one trial for arbitrary measurement directions.
pub fn sample_trial(kind: BellKind, a: &Direction, b: &Direction, rng: &mut TrialRng) -> (i8, i8) {
    sample_outcome(&joint_distribution(kind, a, b), rng)
}

/// Joint distributions for all nine device setting pairs, in the kind's
/// symmetry plane.
fn device_distributions(kind: BellKind) -> [[JointDistribution; 3]; 3] {
    let plane = kind.symmetry_plane();
    let directions = DeviceSetting::ALL.map(|s| plane.direction_at(s.angle()));
    directions.map(|a| directions.map(|b| joint_distribution(kind, &a, &b)))
}

fn run_one(spec: &ExperimentSpec, index: u64, dists: &RunDistributions) -> TrialRecord {
    let mut rng = TrialRng::substream(spec.seed, index);
    match (spec.policy, dists) {
        (SettingPolicy::Device, RunDistributions::Device(table)) => {
            let alice = DeviceSetting::from_index(rng.next_below(3));
            let bob = DeviceSetting::from_index(rng.next_below(3));
            let dist = &table[(alice.number() - 1) as usize][(bob.number() - 1) as usize];
            let (a, b) = sample_outcome(dist, &mut rng);
            TrialRecord {
                index,
                alice_setting: SettingValue::Device(alice.number()),
                bob_setting: SettingValue::Device(bob.number()),
                alice_outcome: a,
                bob_outcome: b,
            }
        }
        (SettingPolicy::Fixed { alpha, beta }, RunDistributions::Fixed(dist)) => {
            let (a, b) = sample_outcome(dist, &mut rng);
            TrialRecord {
                index,
                alice_setting: SettingValue::AngleDeg(alpha.to_degrees()),
                bob_setting: SettingValue::AngleDeg(beta.to_degrees()),
                alice_outcome: a,
                bob_outcome: b,
            }
        }
        _ => unreachable!("distribution table matches policy"),
    }
}

enum RunDistributions {
    Fixed(JointDistribution),
    Device(Box<[[JointDistribution; 3]; 3]>),
}

/// Runs the experiment, producing a deterministic trial log for the spec.
pub fn run_experiment(spec: &ExperimentSpec) -> Vec<TrialRecord> {
    let dists = match spec.policy {
        SettingPolicy::Fixed { alpha, beta } => {
            let plane = spec.state.symmetry_plane();
            RunDistributions::Fixed(joint_distribution(
                spec.state,
                &plane.direction_at(alpha),
                &plane.direction_at(beta),
            ))
        }
        SettingPolicy::Device => RunDistributions::Device(Box::new(device_distributions(spec.state))),
    };
    (0..spec.trials)
        .into_par_iter()
        .map(|index| run_one(spec, index, &dists))
        .collect()
}
