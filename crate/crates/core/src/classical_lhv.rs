//! The instruction-set (local-hidden-variable) model of the Mermin device.
//!
//! Exhaustive enumeration over the eight instruction sets, exact classical
//! correlation functions, the same-outcome Bell bound for case (b), and
//! raffle-style seeded sampling producing the same trial-log format as the
//! quantum sampler.
//!
//! Outcome encoding is R = +1, G = -1 throughout.

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::bell_states::JointDistribution;
use crate::quantum_sampler::{DeviceSetting, SettingValue, TrialRecord};
use crate::rng::TrialRng;
use crate::spin_algebra::ALGEBRA_TOL;

#[derive(Debug, Error, PartialEq)]
pub enum LhvError {
    #[error("distribution weights must be nonnegative and sum to 1 (sum {0})")]
    InvalidDistribution(f64),
    #[error("unknown instruction set label {0:?} (expected three of R/G)")]
    BadLabel(String),
}

/// A deterministic assignment of one outcome to each of the three settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstructionSet {
    outcomes: [i8; 3],
}

impl InstructionSet {
    pub fn new(o1: i8, o2: i8, o3: i8) -> Self {
        assert!([o1, o2, o3].iter().all(|o| *o == 1 || *o == -1));
        Self { outcomes: [o1, o2, o3] }
    }

    /// Parses labels like "RRG".
    pub fn parse(label: &str) -> Result<Self, LhvError> {
        let outcomes: Vec<i8> = label
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'R' => Ok(1),
                'G' => Ok(-1),
                _ => Err(LhvError::BadLabel(label.to_string())),
            })
            .collect::<Result<_, _>>()?;
        if outcomes.len() != 3 {
            return Err(LhvError::BadLabel(label.to_string()));
        }
        Ok(Self::new(outcomes[0], outcomes[1], outcomes[2]))
    }

    pub fn label(&self) -> String {
        self.outcomes.iter().map(|o| if *o == 1 { 'R' } else { 'G' }).collect()
    }

    pub fn outcome(&self, setting: DeviceSetting) -> i8 {
        self.outcomes[(setting.number() - 1) as usize]
    }

    /// True when the set has two of one color and one of the other.
    pub fn is_two_one(&self) -> bool {
        let sum: i8 = self.outcomes.iter().sum();
        sum.abs() == 1
    }
}

/// All 2^3 instruction sets, each exactly once, in lexicographic order with
/// R before G: RRR, RRG, RGR, RGG, GRR, GRG, GGR, GGG.
pub fn all_instruction_sets() -> [InstructionSet; 8] {
    let mut sets = [InstructionSet::new(1, 1, 1); 8];
    for (i, set) in sets.iter_mut().enumerate() {
        let bit = |k: usize| if (i >> (2 - k)) & 1 == 0 { 1 } else { -1 };
        *set = InstructionSet::new(bit(0), bit(1), bit(2));
    }
    sets
}

/// Whether Bob carries the same instruction set or the sign-flipped one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMode {
    /// Both particles carry the same set (triplet-style device).
    Correlated,
    /// Bob's R results represent Alice's G results (singlet-style reading).
    Anticorrelated,
}

/// Deterministic outcome lookup for one trial.
pub fn evaluate(
    set: &InstructionSet,
    alice: DeviceSetting,
    bob: DeviceSetting,
    mode: CorrelationMode,
) -> (i8, i8) {
    let a = set.outcome(alice);
    let b = set.outcome(bob);
    match mode {
        CorrelationMode::Correlated => (a, b),
        CorrelationMode::Anticorrelated => (a, -b),
    }
}

/// The six ordered unequal setting pairs of case (b).
pub fn case_b_pairs() -> [(DeviceSetting, DeviceSetting); 6] {
    let mut pairs = [(DeviceSetting::S1, DeviceSetting::S2); 6];
    let mut i = 0;
    for a in DeviceSetting::ALL {
        for b in DeviceSetting::ALL {
            if a != b {
                pairs[i] = (a, b);
                i += 1;
            }
        }
    }
    pairs
}

/// Exact fraction of the six case-(b) setting pairs on which the set yields
/// equal outcomes (correlated mode).
pub fn same_outcome_fraction_case_b(set: &InstructionSet) -> Ratio<i64> {
    let same = case_b_pairs()
        .iter()
        .filter(|(a, b)| set.outcome(*a) == set.outcome(*b))
        .count();
    Ratio::new(same as i64, 6)
}

/// A probability distribution over the eight instruction sets, in the
/// [`all_instruction_sets`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct SetDistribution {
    weights: [f64; 8],
}

impl SetDistribution {
    pub fn new(weights: [f64; 8]) -> Result<Self, LhvError> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| *w < 0.0) || (sum - 1.0).abs() > ALGEBRA_TOL {
            return Err(LhvError::InvalidDistribution(sum));
        }
        Ok(Self { weights })
    }

    /// Equal weight 1/8 on every set.
    pub fn uniform() -> Self {
        Self { weights: [0.125; 8] }
    }

    /// All mass on one set.
    pub fn point(set: &InstructionSet) -> Self {
        let mut weights = [0.0; 8];
        let position = all_instruction_sets()
            .iter()
            .position(|s| s == set)
            .expect("every instruction set is enumerated");
        weights[position] = 1.0;
        Self { weights }
    }

    /// Uniform over the six sets with two of one color and one of the other.
    pub fn two_one() -> Self {
        let mut weights = [0.0; 8];
        for (w, set) in weights.iter_mut().zip(all_instruction_sets().iter()) {
            if set.is_two_one() {
                *w = 1.0 / 6.0;
            }
        }
        Self { weights }
    }

    pub fn weights(&self) -> [f64; 8] {
        self.weights
    }
}

/// Exact classical correlation for one setting pair by enumeration
/// (correlated mode, no sampling).
pub fn classical_correlation(
    dist: &SetDistribution,
    alice: DeviceSetting,
    bob: DeviceSetting,
) -> f64 {
    dist.weights
        .iter()
        .zip(all_instruction_sets().iter())
        .map(|(w, set)| {
            let (a, b) = evaluate(set, alice, bob, CorrelationMode::Correlated);
            w * (a as i32 * b as i32) as f64
        })
        .sum()
}

/// Classical correlation averaged over the six case-(b) pairs.
pub fn case_b_correlation(dist: &SetDistribution) -> f64 {
    case_b_pairs()
        .iter()
        .map(|(a, b)| classical_correlation(dist, *a, *b))
        .sum::<f64>()
        / 6.0
}

/// Which setting-pair class a joint table averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SettingCase {
    Same,
    Different,
}

/// Exact outcome probabilities averaged over the case's setting pairs.
pub fn joint_table(dist: &SetDistribution, case: SettingCase) -> JointDistribution {
    let pairs: Vec<(DeviceSetting, DeviceSetting)> = match case {
        SettingCase::Same => DeviceSetting::ALL.map(|s| (s, s)).to_vec(),
        SettingCase::Different => case_b_pairs().to_vec(),
    };
    let mut cells = [0.0f64; 4];
    for (alice, bob) in &pairs {
        for (w, set) in dist.weights.iter().zip(all_instruction_sets().iter()) {
            let (a, b) = evaluate(set, *alice, *bob, CorrelationMode::Correlated);
            let cell = match (a, b) {
                (1, 1) => 0,
                (1, -1) => 1,
                (-1, 1) => 2,
                _ => 3,
            };
            cells[cell] += w;
        }
    }
    let n = pairs.len() as f64;
    JointDistribution {
        p_uu: cells[0] / n,
        p_ud: cells[1] / n,
        p_du: cells[2] / n,
        p_dd: cells[3] / n,
    }
}

/// Exact case-(b) same-outcome probability under the distribution, and
/// whether it satisfies the Bell bound (>= 1/3).
///
/// The bound is implemented as non-strict: the infimum 1/3 is attained by
/// admissible distributions (any two-one point mass).
pub fn bell_bound_check(dist: &SetDistribution) -> (f64, bool) {
    let fraction: f64 = dist
        .weights
        .iter()
        .zip(all_instruction_sets().iter())
        .map(|(w, set)| {
            let r = same_outcome_fraction_case_b(set);
            w * (*r.numer() as f64 / *r.denom() as f64)
        })
        .sum();
    (fraction, fraction >= 1.0 / 3.0 - ALGEBRA_TOL)
}

/// Setting policy for a raffle run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalPolicy {
    /// Both parties fixed at device settings.
    FixedPair(DeviceSetting, DeviceSetting),
    /// Each party draws one of the three settings uniformly per trial.
    Device,
}

/// A complete raffle description.
#[derive(Debug, Clone, PartialEq)]
pub struct RaffleSpec {
    pub dist: SetDistribution,
    pub mode: CorrelationMode,
    pub policy: ClassicalPolicy,
    pub trials: u64,
    pub seed: u64,
}

/// Draws one instruction set by inverse CDF over the eight weights in
/// enumeration order.
fn sample_set(dist: &SetDistribution, rng: &mut TrialRng) -> InstructionSet {
    let u = rng.next_f64();
    let sets = all_instruction_sets();
    let mut cumulative = 0.0;
    for (w, set) in dist.weights.iter().zip(sets.iter()) {
        cumulative += w;
        if u < cumulative {
            return *set;
        }
    }
    sets[7]
}

/// Runs the raffle: one set drawn per trial, evaluated deterministically.
/// Same per-trial substream contract as the quantum sampler.
pub fn sample_raffle(spec: &RaffleSpec) -> Vec<TrialRecord> {
    (0..spec.trials)
        .into_par_iter()
        .map(|index| {
            let mut rng = TrialRng::substream(spec.seed, index);
            let set = sample_set(&spec.dist, &mut rng);
            let (alice, bob) = match spec.policy {
                ClassicalPolicy::FixedPair(a, b) => (a, b),
                ClassicalPolicy::Device => (
                    DeviceSetting::from_index(rng.next_below(3)),
                    DeviceSetting::from_index(rng.next_below(3)),
                ),
            };
            let (a, b) = evaluate(&set, alice, bob, spec.mode);
            TrialRecord {
                index,
                alice_setting: SettingValue::Device(alice.number()),
                bob_setting: SettingValue::Device(bob.number()),
                alice_outcome: a,
                bob_outcome: b,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell_states::{joint_distribution, BellKind, SymmetryPlane};

    #[test]
    fn exactly_eight_distinct_sets() {
        let sets = all_instruction_sets();
        assert_eq!(sets.len(), 8);
        for i in 0..8 {
            for j in (i + 1)..8 {
                assert_ne!(sets[i], sets[j]);
            }
        }
        assert!(sets.contains(&InstructionSet::new(1, 1, -1)));
        assert!(sets.contains(&InstructionSet::new(1, 1, 1)));
        assert!(sets.contains(&InstructionSet::new(-1, -1, -1)));
        assert_eq!(sets[0].label(), "RRR");
        assert_eq!(sets[1].label(), "RRG");
        assert_eq!(sets[7].label(), "GGG");
    }

    #[test]
    fn evaluate_rrg() {
        let rrg = InstructionSet::parse("RRG").unwrap();
        assert_eq!(
            evaluate(&rrg, DeviceSetting::S1, DeviceSetting::S2, CorrelationMode::Correlated),
            (1, 1)
        );
        assert_eq!(
            evaluate(&rrg, DeviceSetting::S3, DeviceSetting::S3, CorrelationMode::Correlated),
            (-1, -1)
        );
        assert_eq!(
            evaluate(&rrg, DeviceSetting::S1, DeviceSetting::S1, CorrelationMode::Anticorrelated),
            (1, -1)
        );
    }

    #[test]
    fn case_b_fractions() {
        assert_eq!(
            same_outcome_fraction_case_b(&InstructionSet::parse("RRG").unwrap()),
            Ratio::new(1, 3)
        );
        assert_eq!(
            same_outcome_fraction_case_b(&InstructionSet::parse("RRR").unwrap()),
            Ratio::new(1, 1)
        );
        assert_eq!(
            same_outcome_fraction_case_b(&InstructionSet::parse("GGG").unwrap()),
            Ratio::new(1, 1)
        );
    }

    #[test]
    fn classical_correlation_values() {
        let rrg = SetDistribution::point(&InstructionSet::parse("RRG").unwrap());
        assert!((case_b_correlation(&rrg) + 1.0 / 3.0).abs() <= ALGEBRA_TOL);

        let uniform = SetDistribution::uniform();
        for (a, b) in case_b_pairs() {
            assert!(classical_correlation(&uniform, a, b).abs() <= ALGEBRA_TOL);
        }
        for s in DeviceSetting::ALL {
            assert!((classical_correlation(&uniform, s, s) - 1.0).abs() <= ALGEBRA_TOL);
            assert!((classical_correlation(&rrg, s, s) - 1.0).abs() <= ALGEBRA_TOL);
        }
    }

    #[test]
    fn joint_tables_match_table_2() {
        let uniform = SetDistribution::uniform();
        let different = joint_table(&uniform, SettingCase::Different);
        for p in different.cells() {
            assert!((p - 0.25).abs() <= ALGEBRA_TOL);
        }
        let same = joint_table(&uniform, SettingCase::Same);
        assert!((same.p_uu - 0.5).abs() <= ALGEBRA_TOL);
        assert!(same.p_ud.abs() <= ALGEBRA_TOL);
        assert!(same.p_du.abs() <= ALGEBRA_TOL);
        assert!((same.p_dd - 0.5).abs() <= ALGEBRA_TOL);

        let rrr = SetDistribution::point(&InstructionSet::parse("RRR").unwrap());
        let table = joint_table(&rrr, SettingCase::Different);
        assert!((table.p_uu - 1.0).abs() <= ALGEBRA_TOL);
    }

    #[test]
    fn bell_bound_values() {
        let (fraction, ok) = bell_bound_check(&SetDistribution::uniform());
        assert!((fraction - 0.5).abs() <= ALGEBRA_TOL);
        assert!(ok);

        let (fraction, ok) = bell_bound_check(&SetDistribution::two_one());
        assert!((fraction - 1.0 / 3.0).abs() <= ALGEBRA_TOL);
        assert!(ok);

        // the quantum value 1/4 sits below the classical floor
        let quantum = joint_distribution(
            BellKind::PhiPlus,
            &SymmetryPlane::Xz.direction_at(0.0),
            &SymmetryPlane::Xz.direction_at(120f64.to_radians()),
        )
        .same_outcome_probability();
        assert!(quantum < fraction - ALGEBRA_TOL);
    }

    #[test]
    fn minimum_over_point_masses_is_one_third() {
        let minimum = all_instruction_sets()
            .iter()
            .map(same_outcome_fraction_case_b)
            .min()
            .unwrap();
        assert_eq!(minimum, Ratio::new(1, 3));
    }

    #[test]
    fn fact_1_holds_for_every_set() {
        for set in all_instruction_sets() {
            for s in DeviceSetting::ALL {
                let (a, b) = evaluate(&set, s, s, CorrelationMode::Correlated);
                assert_eq!(a, b);
                let (a, b) = evaluate(&set, s, s, CorrelationMode::Anticorrelated);
                assert_eq!(a, -b);
            }
        }
    }

    #[test]
    fn point_mass_raffle_is_deterministic() {
        let spec = RaffleSpec {
            dist: SetDistribution::point(&InstructionSet::parse("RRG").unwrap()),
            mode: CorrelationMode::Correlated,
            policy: ClassicalPolicy::FixedPair(DeviceSetting::S1, DeviceSetting::S1),
            trials: 50,
            seed: 3,
        };
        for trial in sample_raffle(&spec) {
            assert_eq!((trial.alice_outcome, trial.bob_outcome), (1, 1));
        }
    }

    fn case_b_same_frequency(log: &[TrialRecord]) -> f64 {
        let case_b: Vec<_> = log
            .iter()
            .filter(|t| t.alice_setting != t.bob_setting)
            .collect();
        let same = case_b.iter().filter(|t| t.alice_outcome == t.bob_outcome).count();
        same as f64 / case_b.len() as f64
    }

    #[test]
    fn uniform_raffle_case_b_same_frequency_is_half() {
        let n = 1_000_000u64;
        let spec = RaffleSpec {
            dist: SetDistribution::uniform(),
            mode: CorrelationMode::Correlated,
            policy: ClassicalPolicy::Device,
            trials: n,
            seed: 11,
        };
        let freq = case_b_same_frequency(&sample_raffle(&spec));
        let n_b = n as f64 * 2.0 / 3.0;
        assert!((freq - 0.5).abs() < 4.5 * (0.25 / n_b).sqrt(), "freq {freq}");
    }

    #[test]
    fn two_one_raffle_case_b_same_frequency_is_one_third() {
        let n = 1_000_000u64;
        let spec = RaffleSpec {
            dist: SetDistribution::two_one(),
            mode: CorrelationMode::Correlated,
            policy: ClassicalPolicy::Device,
            trials: n,
            seed: 13,
        };
        let freq = case_b_same_frequency(&sample_raffle(&spec));
        let n_b = n as f64 * 2.0 / 3.0;
        let p = 1.0 / 3.0;
        assert!((freq - p).abs() < 4.5 * (p * (1.0 - p) / n_b).sqrt(), "freq {freq}");
    }

    #[test]
    fn sampled_tables_converge_to_enumeration() {
        let n = 200_000u64;
        let dist = SetDistribution::two_one();
        let spec = RaffleSpec {
            dist: dist.clone(),
            mode: CorrelationMode::Correlated,
            policy: ClassicalPolicy::Device,
            trials: n,
            seed: 17,
        };
        let log = sample_raffle(&spec);
        let case_b: Vec<_> = log.iter().filter(|t| t.alice_setting != t.bob_setting).collect();
        let expected = joint_table(&dist, SettingCase::Different);
        let total = case_b.len() as f64;
        let observed = [
            case_b.iter().filter(|t| (t.alice_outcome, t.bob_outcome) == (1, 1)).count(),
            case_b.iter().filter(|t| (t.alice_outcome, t.bob_outcome) == (1, -1)).count(),
            case_b.iter().filter(|t| (t.alice_outcome, t.bob_outcome) == (-1, 1)).count(),
            case_b.iter().filter(|t| (t.alice_outcome, t.bob_outcome) == (-1, -1)).count(),
        ];
        for (count, p) in observed.iter().zip(expected.cells()) {
            let freq = *count as f64 / total;
            assert!((freq - p).abs() < 4.5 * (p * (1.0 - p) / total).sqrt());
        }
    }

    #[test]
    fn invalid_distribution_rejected() {
        assert!(SetDistribution::new([0.5; 8]).is_err());
        let mut w = [0.0; 8];
        w[0] = 1.5;
        w[1] = -0.5;
        assert!(SetDistribution::new(w).is_err());
    }
}
