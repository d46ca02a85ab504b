//! Average-only conservation analysis.
//!
//! Partitions a trial log by one party's outcome, computes the other
//! party's conditional averages, checks them against the +-cos(theta)
//! targets, reconstructs the correlation function from the conditional
//! averages (an exact algebraic identity with empirical class
//! frequencies), builds illustrative ensembles, and tests elliptope
//! membership of correlation triples.

use thiserror::Error;

use crate::bell_states::BellKind;
use crate::quantum_sampler::TrialRecord;
use crate::spin_algebra::ALGEBRA_TOL;

/// Significance gate for every statistical verdict: false-failure
/// probability below 1e-5 per check.
pub const SIGMA_GATE: f64 = 4.5;

#[derive(Debug, Error, PartialEq)]
pub enum ConservationError {
    #[error("empty trial log")]
    EmptyLog,
    #[error("an outcome class is empty; conditional mean undefined")]
    EmptyClass,
    #[error("correlation component {0} outside [-1, 1]")]
    OutOfRange(f64),
    #[error("ensemble of size {size} cannot represent mean {target} exactly; nearest feasible sizes {below} and {above}")]
    InfeasibleEnsemble { size: u64, target: f64, below: u64, above: u64 },
    #[error("trial {0} has a non-binary outcome")]
    FractionalOutcome(u64),
}

/// Which party's outcomes define the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

/// Conditional statistics of one party's outcomes given the other's.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionReport {
    pub reference_party: Party,
    /// Trials in which the reference party measured +1 / -1.
    pub n_plus: u64,
    pub n_minus: u64,
    /// Conditional means of the other party's outcomes; `None` when the
    /// class is empty (undefined, not zero).
    pub ba_plus: Option<f64>,
    pub ba_minus: Option<f64>,
    /// Standard errors of the conditional means.
    pub se_plus: Option<f64>,
    pub se_minus: Option<f64>,
}

impl PartitionReport {
    pub fn total(&self) -> u64 {
        self.n_plus + self.n_minus
    }
}

fn conditional_stats(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    // outcomes are +-1 so the population variance given the mean is 1 - m^2
    let variance = (1.0 - mean * mean).max(0.0);
    (Some(mean), Some((variance / n).sqrt()))
}

/// Splits the log into the reference party's +1 and -1 equivalence classes
/// and reports the other party's conditional means.
///
/// The log must be nonempty and is expected to hold a single fixed setting
/// pair; the caller selects the pair when analyzing device-policy logs.
pub fn partition_by_outcome(
    trials: &[TrialRecord],
    reference: Party,
) -> Result<PartitionReport, ConservationError> {
    if trials.is_empty() {
        return Err(ConservationError::EmptyLog);
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for trial in trials {
        if !trial.outcomes_are_binary() {
            return Err(ConservationError::FractionalOutcome(trial.index));
        }
        let (own, other) = match reference {
            Party::Alice => (trial.alice_outcome, trial.bob_outcome),
            Party::Bob => (trial.bob_outcome, trial.alice_outcome),
        };
        if own == 1 {
            plus.push(other as f64);
        } else {
            minus.push(other as f64);
        }
    }
    let (ba_plus, se_plus) = conditional_stats(&plus);
    let (ba_minus, se_minus) = conditional_stats(&minus);
    Ok(PartitionReport {
        reference_party: reference,
        n_plus: plus.len() as u64,
        n_minus: minus.len() as u64,
        ba_plus,
        ba_minus,
        se_plus,
        se_minus,
    })
}

/// Reconstructs the correlation from conditional averages with empirical
/// class frequencies:
///
///   f+ * (+1) * BA+  +  f- * (-1) * BA-
///
/// This equals the direct sample mean of outcome products exactly on every
/// finite log. Both classes must be nonempty.
pub fn reconstruct_correlation(report: &PartitionReport) -> Result<f64, ConservationError> {
    let (ba_plus, ba_minus) = match (report.ba_plus, report.ba_minus) {
        (Some(p), Some(m)) => (p, m),
        _ => return Err(ConservationError::EmptyClass),
    };
    let total = report.total() as f64;
    let f_plus = report.n_plus as f64 / total;
    let f_minus = report.n_minus as f64 / total;
    Ok(f_plus * ba_plus - f_minus * ba_minus)
}

/// Direct sample correlation: mean of outcome products.
pub fn direct_correlation(trials: &[TrialRecord]) -> Result<f64, ConservationError> {
    if trials.is_empty() {
        return Err(ConservationError::EmptyLog);
    }
    Ok(trials.iter().map(|t| t.product()).sum::<f64>() / trials.len() as f64)
}

/// Outcome of a conservation test.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationVerdict {
    pub pass: bool,
    pub report: PartitionReport,
    /// Target conditional mean for the +1 class (+-cos theta per kind).
    pub target_plus: f64,
    pub target_minus: f64,
    /// |observed - target| in units of the standard error; `None` for an
    /// exact match with zero error.
    pub z_plus: Option<f64>,
    pub z_minus: Option<f64>,
}

fn z_score(observed: f64, target: f64, se: f64) -> (bool, Option<f64>) {
    let deviation = (observed - target).abs();
    if se == 0.0 {
        (deviation <= ALGEBRA_TOL, None)
    } else {
        (deviation <= SIGMA_GATE * se, Some(deviation / se))
    }
}

/// Tests average-only conservation on a fixed-setting log at relative
/// angle `theta` (radians) in the kind's symmetry plane.
///
/// The conditional means must satisfy BA+ = cos(theta), BA- = -cos(theta)
/// for the triplets and the opposite signs for the singlet, within the
/// 4.5-sigma gate. Every outcome must be exactly +-1.
pub fn conservation_test(
    trials: &[TrialRecord],
    kind: BellKind,
    theta: f64,
    reference: Party,
) -> Result<ConservationVerdict, ConservationError> {
    let report = partition_by_outcome(trials, reference)?;
    let sign = kind.plane_correlation_sign();
    let target_plus = sign * theta.cos();
    let target_minus = -sign * theta.cos();
    let (pass_plus, z_plus) = match (report.ba_plus, report.se_plus) {
        (Some(mean), Some(se)) => z_score(mean, target_plus, se),
        _ => return Err(ConservationError::EmptyClass),
    };
    let (pass_minus, z_minus) = match (report.ba_minus, report.se_minus) {
        (Some(mean), Some(se)) => z_score(mean, target_minus, se),
        _ => return Err(ConservationError::EmptyClass),
    };
    Ok(ConservationVerdict {
        pass: pass_plus && pass_minus,
        report,
        target_plus,
        target_minus,
        z_plus,
        z_minus,
    })
}

/// A minimal illustrative ensemble of +-1 outcomes with an exact mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    /// Relative measurement angle in radians.
    pub theta: f64,
    pub size: u64,
    /// True for the singlet target -cos(theta), false for +cos(theta).
    pub singlet: bool,
}

impl EnsembleSpec {
    pub fn target_mean(&self) -> f64 {
        if self.singlet { -self.theta.cos() } else { self.theta.cos() }
    }
}

fn plus_count(size: u64, target: f64) -> Option<u64> {
    // mean = (2k - size)/size  =>  k = size (1 + target) / 2
    let k = size as f64 * (1.0 + target) / 2.0;
    let rounded = k.round();
    if (k - rounded).abs() <= 1e-9 && (0.0..=size as f64).contains(&rounded) {
        Some(rounded as u64)
    } else {
        None
    }
}

/// Builds the ensemble: `k` outcomes of +1 followed by `size - k` of -1,
/// with mean exactly the target. Infeasible sizes are reported with the
/// nearest feasible ones.
pub fn make_ensemble(spec: &EnsembleSpec) -> Result<Vec<i8>, ConservationError> {
    let target = spec.target_mean();
    match plus_count(spec.size, target) {
        Some(k) => {
            let mut outcomes = vec![1i8; k as usize];
            outcomes.resize(spec.size as usize, -1);
            Ok(outcomes)
        }
        None => {
            let below = (1..spec.size)
                .rev()
                .find(|s| plus_count(*s, target).is_some())
                .unwrap_or(0);
            let above = (spec.size + 1..)
                .take(10_000)
                .find(|s| plus_count(*s, target).is_some())
                .unwrap_or(spec.size);
            Err(ConservationError::InfeasibleEnsemble {
                size: spec.size,
                target,
                below,
                above,
            })
        }
    }
}

/// Correlations for the three unequal setting pairs of the device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTriple {
    pub chi_12: f64,
    pub chi_13: f64,
    pub chi_23: f64,
}

impl CorrelationTriple {
    pub fn new(chi_12: f64, chi_13: f64, chi_23: f64) -> Result<Self, ConservationError> {
        for chi in [chi_12, chi_13, chi_23] {
            if !(-1.0..=1.0).contains(&chi) || !chi.is_finite() {
                return Err(ConservationError::OutOfRange(chi));
            }
        }
        Ok(Self { chi_12, chi_13, chi_23 })
    }
}

/// Elliptope membership test for a correlation triple.
///
/// Returns (value, inside) with
///
///   value = 1 + 2 chi12 chi13 chi23 - chi12^2 - chi13^2 - chi23^2
///
/// which is the determinant of the unit-diagonal 3x3 correlation matrix;
/// the triple is realizable iff that matrix is positive semidefinite,
/// i.e. value >= 0 (to tolerance).
pub fn elliptope_check(t: &CorrelationTriple) -> (f64, bool) {
    let (a, b, c) = (t.chi_12, t.chi_13, t.chi_23);
    let value = 1.0 + 2.0 * a * b * c - a * a - b * b - c * c;
    (value, value >= -ALGEBRA_TOL)
}
