//! One-shot verification suite behind `mermin check`.
//!
//! Each check exercises one invariant from the library modules: exact
//! algebraic identities at 1e-12 and sampled statistics at the 4.5-sigma
//! gate. The suite is deterministic (fixed seeds throughout).

use serde::Serialize;
use std::f64::consts::PI;

use crate::bell_states::{
    basis_change, bell_state, correlation_analytic, correlation_expectation, distribution_well_formed,
    invariance_residual, is_invariant_axis, joint_distribution, BellKind, SymmetryPlane,
};
use crate::classical_lhv::{
    all_instruction_sets, bell_bound_check, case_b_correlation, classical_correlation, joint_table,
    same_outcome_fraction_case_b, SetDistribution, SettingCase,
};
use crate::conservation::{
    conservation_test, direct_correlation, elliptope_check, make_ensemble, partition_by_outcome,
    reconstruct_correlation, CorrelationTriple, EnsembleSpec, Party, SIGMA_GATE,
};
use crate::quantum_sampler::{run_experiment, ExperimentSpec, SettingPolicy};
use crate::spin_algebra::{
    direction_operator, pauli, su2_rotation, Direction, Operator2, PauliAxis, ALGEBRA_TOL,
};

/// Result of one named invariant check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, result: Result<String, String>) -> CheckResult {
    match result {
        Ok(detail) => CheckResult { name: name.into(), passed: true, detail },
        Err(detail) => CheckResult { name: name.into(), passed: false, detail },
    }
}

fn rand_unit(state: &mut u64) -> f64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

fn random_direction(state: &mut u64) -> Direction {
    let z = 2.0 * rand_unit(state) - 1.0;
    let phi = 2.0 * PI * rand_unit(state);
    let r = (1.0 - z * z).sqrt();
    Direction::new(r * phi.cos(), r * phi.sin(), z).unwrap()
}

fn pauli_algebra() -> Result<String, String> {
    for axis in PauliAxis::ALL {
        let p = pauli(axis);
        if !(p.is_hermitian() && p.is_unitary() && p.trace().norm() <= ALGEBRA_TOL) {
            return Err(format!("pauli({axis:?}) fails hermitian/unitary/traceless"));
        }
        if !p.mul(&p).approx_eq(&Operator2::identity()) {
            return Err(format!("pauli({axis:?})^2 != I"));
        }
    }
    Ok("sigma_j hermitian, unitary, traceless, squares to I".into())
}

fn su2_properties() -> Result<String, String> {
    let mut s = 0x0123_4567_89ab_cdefu64;
    for _ in 0..50 {
        let t = 10.0 * (rand_unit(&mut s) - 0.5);
        for axis in PauliAxis::ALL {
            let u = su2_rotation(axis, t);
            if !u.is_unitary() || (u.determinant() - num_complex::Complex64::new(1.0, 0.0)).norm() > ALGEBRA_TOL {
                return Err(format!("su2({axis:?}, {t}) not in SU(2)"));
            }
        }
    }
    Ok("random SU(2) rotations unitary with unit determinant".into())
}

fn theta_two_theta_law() -> Result<String, String> {
    let mut s = 0xdead_beef_0000_1111u64;
    for _ in 0..100 {
        let t = 6.0 * (rand_unit(&mut s) - 0.5);
        let rotated = pauli(PauliAxis::Z).conjugate_by(&su2_rotation(PauliAxis::Y, t));
        let d = Direction::new((2.0 * t).sin(), 0.0, (2.0 * t).cos()).unwrap();
        if !rotated.approx_eq(&direction_operator(&d)) {
            return Err(format!("theta = 2T identity fails at T = {t}"));
        }
    }
    Ok("conjugated sigma_z equals direction operator at 2T".into())
}

fn closed_forms_vs_expectation() -> Result<String, String> {
    let mut s = 0x1357_9bdf_2468_ace0u64;
    for _ in 0..1000 {
        let a = random_direction(&mut s);
        let b = random_direction(&mut s);
        for kind in BellKind::ALL {
            let closed = correlation_analytic(kind, &a, &b);
            let matrix = correlation_expectation(kind, &a, &b).map_err(|e| e.to_string())?;
            if (closed - matrix).abs() > ALGEBRA_TOL {
                return Err(format!("{kind:?}: closed {closed} vs matrix {matrix}"));
            }
        }
    }
    Ok("1000 random direction pairs, all four states, 1e-12".into())
}

fn joint_distribution_invariants() -> Result<String, String> {
    let mut s = 0x8642_fdb9_7531_eca8u64;
    for _ in 0..200 {
        let a = random_direction(&mut s);
        let b = random_direction(&mut s);
        for kind in BellKind::ALL {
            let jd = joint_distribution(kind, &a, &b);
            if !distribution_well_formed(&jd) {
                return Err(format!("{kind:?}: malformed distribution {jd:?}"));
            }
            if (jd.correlation() - correlation_analytic(kind, &a, &b)).abs() > ALGEBRA_TOL {
                return Err(format!("{kind:?}: sum i*j*p disagrees with closed form"));
            }
        }
    }
    Ok("cells normalized, marginals 1/2, correlation consistent".into())
}

fn invariance_pattern() -> Result<String, String> {
    for kind in BellKind::ALL {
        for axis in PauliAxis::ALL {
            let residual = invariance_residual(kind, axis, 0.35);
            let invariant = is_invariant_axis(kind, axis);
            if invariant && residual > ALGEBRA_TOL {
                return Err(format!("{kind:?} should be invariant under {axis:?}, residual {residual}"));
            }
            if !invariant && residual < 0.01 {
                return Err(format!("{kind:?} unexpectedly invariant under {axis:?}"));
            }
        }
    }
    Ok("SU(2) invariance pattern matches the four states".into())
}

fn basis_change_phases() -> Result<String, String> {
    let to_x = basis_change(&bell_state(BellKind::PsiPlus), PauliAxis::X);
    let minus_phi_minus = bell_state(BellKind::PhiMinus).amplitudes().map(|a| -a);
    if to_x.distance(&minus_phi_minus) > ALGEBRA_TOL {
        return Err("psi+ does not map to -phi- in the x basis".into());
    }
    let to_y = basis_change(&bell_state(BellKind::PsiPlus), PauliAxis::Y);
    let i = num_complex::Complex64::new(0.0, 1.0);
    let i_phi_plus = bell_state(BellKind::PhiPlus).amplitudes().map(|a| i * a);
    if to_y.distance(&i_phi_plus) > ALGEBRA_TOL {
        return Err("psi+ does not map to i phi+ in the y basis".into());
    }
    Ok("psi+ -> -phi- (x basis), i phi+ (y basis)".into())
}

fn table_1_exact() -> Result<String, String> {
    let a = SymmetryPlane::Xz.direction_at(0.0);
    let b = SymmetryPlane::Xz.direction_at(2.0 * PI / 3.0);
    let aligned = joint_distribution(BellKind::PhiPlus, &a, &a);
    let apart = joint_distribution(BellKind::PhiPlus, &a, &b);
    let expect = |got: f64, want: f64, what: &str| {
        if (got - want).abs() > ALGEBRA_TOL {
            Err(format!("{what}: {got} != {want}"))
        } else {
            Ok(())
        }
    };
    expect(aligned.p_uu, 0.5, "aligned p_uu")?;
    expect(aligned.p_ud, 0.0, "aligned p_ud")?;
    expect(apart.p_uu, 0.125, "120deg p_uu")?;
    expect(apart.p_ud, 0.375, "120deg p_ud")?;
    Ok("(1/2,0,0,1/2) aligned and (1/8,3/8,3/8,1/8) at 120 degrees".into())
}

fn table_2_exact() -> Result<String, String> {
    let uniform = SetDistribution::uniform();
    let different = joint_table(&uniform, SettingCase::Different);
    if different.cells().iter().any(|p| (p - 0.25).abs() > ALGEBRA_TOL) {
        return Err(format!("uniform case (b) table {different:?}"));
    }
    if case_b_correlation(&uniform).abs() > ALGEBRA_TOL {
        return Err("uniform case (b) correlation not 0".into());
    }
    for set in all_instruction_sets() {
        let expected = if set.is_two_one() { 1.0 / 3.0 } else { 1.0 };
        let r = same_outcome_fraction_case_b(&set);
        let fraction = *r.numer() as f64 / *r.denom() as f64;
        if (fraction - expected).abs() > ALGEBRA_TOL {
            return Err(format!("{} case (b) same fraction {fraction}", set.label()));
        }
        let point = SetDistribution::point(&set);
        let corr = case_b_correlation(&point);
        let want = if set.is_two_one() { -1.0 / 3.0 } else { 1.0 };
        if (corr - want).abs() > ALGEBRA_TOL {
            return Err(format!("{} case (b) correlation {corr}", set.label()));
        }
    }
    Ok("uniform 1/4 cells; two-one -1/3; RRR/GGG +1, by enumeration".into())
}

fn fact_1_classical() -> Result<String, String> {
    for set in all_instruction_sets() {
        let point = SetDistribution::point(&set);
        for s in crate::quantum_sampler::DeviceSetting::ALL {
            if (classical_correlation(&point, s, s) - 1.0).abs() > ALGEBRA_TOL {
                return Err(format!("{}: equal settings not perfectly correlated", set.label()));
            }
        }
    }
    Ok("equal settings perfectly correlated for every set".into())
}

fn bell_bound() -> Result<String, String> {
    let minimum = all_instruction_sets()
        .iter()
        .map(same_outcome_fraction_case_b)
        .min()
        .ok_or("no sets")?;
    if minimum != num_rational::Ratio::new(1, 3) {
        return Err(format!("minimum point-mass fraction {minimum}"));
    }
    let (uniform_fraction, ok) = bell_bound_check(&SetDistribution::uniform());
    if !ok || (uniform_fraction - 0.5).abs() > ALGEBRA_TOL {
        return Err(format!("uniform fraction {uniform_fraction}"));
    }
    if 0.25 >= 1.0 / 3.0 {
        return Err("quantum value fails to violate the bound".into());
    }
    Ok("floor 1/3 over point masses; quantum 1/4 violates".into())
}

fn case_b_bounds_over_distributions() -> Result<String, String> {
    let mut s = 0xaaaa_bbbb_cccc_ddddu64;
    for _ in 0..200 {
        let mut w = [0.0f64; 8];
        for weight in &mut w {
            *weight = rand_unit(&mut s);
        }
        let total: f64 = w.iter().sum();
        for weight in &mut w {
            *weight /= total;
        }
        let dist = SetDistribution::new(w).map_err(|e| e.to_string())?;
        let corr = case_b_correlation(&dist);
        if !(-1.0 / 3.0 - ALGEBRA_TOL..=1.0 + ALGEBRA_TOL).contains(&corr) {
            return Err(format!("case (b) correlation {corr} outside [-1/3, 1]"));
        }
    }
    Ok("random distributions stay in [-1/3, 1] for averaged case (b)".into())
}

fn sampler_reproducibility() -> Result<String, String> {
    let spec = ExperimentSpec {
        state: BellKind::PhiPlus,
        policy: SettingPolicy::Device,
        trials: 20_000,
        seed: 2024,
    };
    if run_experiment(&spec) != run_experiment(&spec) {
        return Err("identical spec+seed produced different logs".into());
    }
    Ok("same spec + seed gives identical logs".into())
}

fn sampler_statistics() -> Result<String, String> {
    let theta = PI / 3.0;
    let n = 100_000u64;
    let spec = ExperimentSpec {
        state: BellKind::PhiPlus,
        policy: SettingPolicy::Fixed { alpha: 0.0, beta: theta },
        trials: n,
        seed: 90210,
    };
    let log = run_experiment(&spec);
    let mean = direct_correlation(&log).map_err(|e| e.to_string())?;
    if (mean - theta.cos()).abs() > SIGMA_GATE / (n as f64).sqrt() {
        return Err(format!("empirical correlation {mean} vs cos(60) = 0.5"));
    }
    let report = partition_by_outcome(&log, Party::Alice).map_err(|e| e.to_string())?;
    let plus_freq = report.n_plus as f64 / n as f64;
    if (plus_freq - 0.5).abs() > SIGMA_GATE * (0.25 / n as f64).sqrt() {
        return Err(format!("Alice +1 frequency {plus_freq}"));
    }
    Ok("empirical correlation and marginals within 4.5 sigma".into())
}

fn reconstruction_identity() -> Result<String, String> {
    let spec = ExperimentSpec {
        state: BellKind::PsiMinus,
        policy: SettingPolicy::Fixed { alpha: 0.2, beta: 1.1 },
        trials: 30_001,
        seed: 55,
    };
    let log = run_experiment(&spec);
    for party in [Party::Alice, Party::Bob] {
        let report = partition_by_outcome(&log, party).map_err(|e| e.to_string())?;
        let rebuilt = reconstruct_correlation(&report).map_err(|e| e.to_string())?;
        let direct = direct_correlation(&log).map_err(|e| e.to_string())?;
        if (rebuilt - direct).abs() > ALGEBRA_TOL {
            return Err(format!("{party:?}: {rebuilt} vs {direct}"));
        }
    }
    Ok("partition reconstruction equals direct correlation exactly".into())
}

fn average_only_conservation() -> Result<String, String> {
    let theta = PI / 3.0;
    let spec = ExperimentSpec {
        state: BellKind::PhiPlus,
        policy: SettingPolicy::Fixed { alpha: 0.0, beta: theta },
        trials: 200_000,
        seed: 777,
    };
    let log = run_experiment(&spec);
    for party in [Party::Alice, Party::Bob] {
        let verdict = conservation_test(&log, BellKind::PhiPlus, theta, party).map_err(|e| e.to_string())?;
        if !verdict.pass {
            return Err(format!("{party:?} partition fails +-cos(60) targets: {verdict:?}"));
        }
    }
    Ok("conditional means hit +-cos(theta) from either partition".into())
}

fn figure_7_ensemble() -> Result<String, String> {
    let outcomes = make_ensemble(&EnsembleSpec { theta: PI / 3.0, size: 8, singlet: false })
        .map_err(|e| e.to_string())?;
    let ups = outcomes.iter().filter(|o| **o == 1).count();
    if ups != 6 || outcomes.len() != 8 {
        return Err(format!("expected six +1 of 8, got {ups}"));
    }
    Ok("size-8 ensemble at 60 degrees is six up, two down".into())
}

fn elliptope_geometry() -> Result<String, String> {
    let landmarks = [
        ((0.0, 0.0, 0.0), 1.0, true),
        ((-0.5, -0.5, -0.5), 0.0, true),
        ((-1.0, -1.0, -1.0), -4.0, false),
    ];
    for ((a, b, c), want, inside_want) in landmarks {
        let triple = CorrelationTriple::new(a, b, c).map_err(|e| e.to_string())?;
        let (value, inside) = elliptope_check(&triple);
        if (value - want).abs() > ALGEBRA_TOL || inside != inside_want {
            return Err(format!("({a},{b},{c}) -> ({value}, {inside})"));
        }
    }
    let mut s = 0x9876_5432_10fe_dcbau64;
    for _ in 0..1000 {
        let (a, b, c) = (
            2.0 * rand_unit(&mut s) - 1.0,
            2.0 * rand_unit(&mut s) - 1.0,
            2.0 * rand_unit(&mut s) - 1.0,
        );
        let (value, _) = elliptope_check(&CorrelationTriple::new(a, b, c).map_err(|e| e.to_string())?);
        let det = 1.0 * (1.0 - c * c) - a * (a - b * c) + b * (a * c - b);
        if (value - det).abs() > ALGEBRA_TOL {
            return Err(format!("elliptope value {value} vs determinant {det}"));
        }
    }
    Ok("landmark points and determinant oracle agree".into())
}

fn binary_outcomes_everywhere() -> Result<String, String> {
    let quantum = run_experiment(&ExperimentSpec {
        state: BellKind::PsiPlus,
        policy: SettingPolicy::Device,
        trials: 5_000,
        seed: 1,
    });
    let classical = crate::classical_lhv::sample_raffle(&crate::classical_lhv::RaffleSpec {
        dist: SetDistribution::uniform(),
        mode: crate::classical_lhv::CorrelationMode::Correlated,
        policy: crate::classical_lhv::ClassicalPolicy::Device,
        trials: 5_000,
        seed: 1,
    });
    for trial in quantum.iter().chain(classical.iter()) {
        if !trial.outcomes_are_binary() {
            return Err(format!("trial {} has a fractional outcome", trial.index));
        }
    }
    Ok("every sampled outcome is exactly +1 or -1".into())
}

fn singlet_rotational_invariance() -> Result<String, String> {
    let mut s = 0x1122_3344_5566_7788u64;
    for _ in 0..200 {
        let a = random_direction(&mut s);
        let b = random_direction(&mut s);
        let value = correlation_analytic(BellKind::PsiMinus, &a, &b);
        if (value + a.dot(&b)).abs() > ALGEBRA_TOL {
            return Err(format!("singlet correlation {value} != -a.b"));
        }
    }
    Ok("singlet correlation is -a.b for random directions".into())
}

/// Runs every invariant check, in a fixed order.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        check("pauli-algebra", pauli_algebra()),
        check("su2-unitarity", su2_properties()),
        check("theta-two-theta-law", theta_two_theta_law()),
        check("eq6-closed-forms-vs-expectation", closed_forms_vs_expectation()),
        check("joint-distribution-invariants", joint_distribution_invariants()),
        check("su2-invariance-pattern", invariance_pattern()),
        check("basis-change-phases", basis_change_phases()),
        check("table-1-born-rule", table_1_exact()),
        check("table-2-enumeration", table_2_exact()),
        check("fact-1-instruction-sets", fact_1_classical()),
        check("bell-bound", bell_bound()),
        check("case-b-correlation-bounds", case_b_bounds_over_distributions()),
        check("sampler-reproducibility", sampler_reproducibility()),
        check("sampler-statistics", sampler_statistics()),
        check("reconstruction-identity", reconstruction_identity()),
        check("average-only-conservation", average_only_conservation()),
        check("figure-7-ensemble", figure_7_ensemble()),
        check("elliptope-geometry", elliptope_geometry()),
        check("binary-outcomes", binary_outcomes_everywhere()),
        check("singlet-rotational-invariance", singlet_rotational_invariance()),
    ]
}
