//! The four Bell spin states and their correlation statistics.
//!
//! Constructs psi-/psi+/phi-/phi+ in the (uu, ud, du, dd) ordering of the
//! sigma_z x sigma_z eigenbasis, evaluates the closed-form correlation
//! functions, Born-rule joint outcome distributions, SU(2) invariance
//! residuals, and eigenbasis changes.

use num_complex::Complex64;

use crate::spin_algebra::{
    direction_operator, direction_projectors, expectation, su2_rotation, tensor_op, Direction,
    Operator2, Operator4, PauliAxis, SpinError, StateVector4, ALGEBRA_TOL,
};

/// Which of the four Bell spin states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    /// The spin singlet (|ud> - |du>)/sqrt2, total spin 0.
    PsiMinus,
    /// (|ud> + |du>)/sqrt2, triplet symmetric in the xy-plane.
    PsiPlus,
    /// (|uu> - |dd>)/sqrt2, triplet symmetric in the yz-plane.
    PhiMinus,
    /// (|uu> + |dd>)/sqrt2, triplet symmetric in the xz-plane.
    PhiPlus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiMinus,
        BellKind::PsiPlus,
        BellKind::PhiMinus,
        BellKind::PhiPlus,
    ];

    /// The real-space plane in which aligned measurements give perfectly
    /// (anti-)correlated outcomes for every angle.
    pub fn symmetry_plane(&self) -> SymmetryPlane {
        match self {
            BellKind::PsiMinus => SymmetryPlane::All,
            BellKind::PsiPlus => SymmetryPlane::Xy,
            BellKind::PhiMinus => SymmetryPlane::Yz,
            BellKind::PhiPlus => SymmetryPlane::Xz,
        }
    }

    /// True for the singlet, whose aligned outcomes are always opposite.
    pub fn is_singlet(&self) -> bool {
        matches!(self, BellKind::PsiMinus)
    }

    /// Sign of the in-plane correlation: -1 for the singlet (-cos theta),
    /// +1 for the triplets (+cos theta).
    pub fn plane_correlation_sign(&self) -> f64 {
        if self.is_singlet() {
            -1.0
        } else {
            1.0
        }
    }
}

/// A plane of real space (or all of them, for the singlet).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymmetryPlane {
    Xy,
    Yz,
    Xz,
    All,
}

impl SymmetryPlane {
    /// Unit direction at `angle` (radians) within the plane, measured from
    /// the plane's "z-like" axis: z for the XZ and YZ planes, x for the XY
    /// plane. The singlet's `All` is implemented in the xz-plane.
    pub fn direction_at(&self, angle: f64) -> Direction {
        let (s, cos) = angle.sin_cos();
        let (x, y, z) = match self {
            SymmetryPlane::Xz | SymmetryPlane::All => (s, 0.0, cos),
            SymmetryPlane::Yz => (0.0, s, cos),
            SymmetryPlane::Xy => (cos, s, 0.0),
        };
        Direction::new(x, y, z).expect("in-plane direction is unit by construction")
    }
}

/// The four Born-rule outcome probabilities for one setting pair.
///
/// `p_uu` is the probability that Alice measures +1 and Bob measures +1,
/// and so on, in the fixed cell order (uu, ud, du, dd).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    pub p_uu: f64,
    pub p_ud: f64,
    pub p_du: f64,
    pub p_dd: f64,
}

impl JointDistribution {
    pub fn cells(&self) -> [f64; 4] {
        [self.p_uu, self.p_ud, self.p_du, self.p_dd]
    }

    /// Sum of (i*j) p(i,j): the correlation implied by the distribution.
    pub fn correlation(&self) -> f64 {
        self.p_uu - self.p_ud - self.p_du + self.p_dd
    }

    /// Probability that Alice's outcome is +1.
    pub fn alice_plus_marginal(&self) -> f64 {
        self.p_uu + self.p_ud
    }

    /// Probability that Bob's outcome is +1.
    pub fn bob_plus_marginal(&self) -> f64 {
        self.p_uu + self.p_du
    }

    pub fn same_outcome_probability(&self) -> f64 {
        self.p_uu + self.p_dd
    }
}

/// The normalized Bell state in the (uu, ud, du, dd) ordering.
pub fn bell_state(kind: BellKind) -> StateVector4 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let amplitudes = match kind {
        BellKind::PsiMinus => [zero, s, -s, zero],
        BellKind::PsiPlus => [zero, s, s, zero],
        BellKind::PhiMinus => [s, zero, zero, -s],
        BellKind::PhiPlus => [s, zero, zero, s],
    };
    StateVector4::new(amplitudes).expect("Bell states are normalized")
}

/// Closed-form correlation function ⟨sigma_1 sigma_2⟩ for arbitrary unit
/// directions a and b.
pub fn correlation_analytic(kind: BellKind, a: &Direction, b: &Direction) -> f64 {
    let (ax, ay, az) = a.components();
    let (bx, by, bz) = b.components();
    match kind {
        BellKind::PsiMinus => -ax * bx - ay * by - az * bz,
        BellKind::PsiPlus => ax * bx + ay * by - az * bz,
        BellKind::PhiMinus => -ax * bx + ay * by + az * bz,
        BellKind::PhiPlus => ax * bx - ay * by + az * bz,
    }
}

/// Born-rule joint distribution via projectors onto the a- and b-direction
/// eigenspaces. Valid for arbitrary directions, in or out of any symmetry
/// plane.
pub fn joint_distribution(kind: BellKind, a: &Direction, b: &Direction) -> JointDistribution {
    let state = bell_state(kind);
    let (pa_plus, pa_minus) = direction_projectors(a);
    let (pb_plus, pb_minus) = direction_projectors(b);
    let prob = |pa: &Operator2, pb: &Operator2| -> f64 {
        expectation(&state, &tensor_op(pa, pb))
            .expect("Bell states are normalized")
            .re
            .clamp(0.0, 1.0)
    };
    JointDistribution {
        p_uu: prob(&pa_plus, &pb_plus),
        p_ud: prob(&pa_plus, &pb_minus),
        p_du: prob(&pa_minus, &pb_plus),
        p_dd: prob(&pa_minus, &pb_minus),
    }
}

/// The norm of (U x U)|psi> - |psi> for U = su2_rotation(axis, T).
///
/// Zero (to 1e-12) exactly when the state is invariant under that axis:
/// the singlet under all three, phi+ under Y, phi- under X, psi+ under Z.
pub fn invariance_residual(kind: BellKind, axis: PauliAxis, theta_hilbert: f64) -> f64 {
    let u = su2_rotation(axis, theta_hilbert);
    let uu = tensor_op(&u, &u);
    let state = bell_state(kind);
    let transformed = uu.apply(&state);
    state.distance(&transformed)
}

/// Whether the SU(2) invariance holds for this (state, axis) pair at every
/// angle.
pub fn is_invariant_axis(kind: BellKind, axis: PauliAxis) -> bool {
    match kind {
        BellKind::PsiMinus => true,
        BellKind::PhiPlus => axis == PauliAxis::Y,
        BellKind::PhiMinus => axis == PauliAxis::X,
        BellKind::PsiPlus => axis == PauliAxis::Z,
    }
}

/// Re-expresses a state given in the sigma_z eigenbasis in the eigenbasis
/// of `to_axis`.
///
/// The single-qubit ket substitutions are the 45-degree SU(2) transforms:
/// u -> (u + d)/sqrt2, d -> (-u + d)/sqrt2 for X, and u -> (u + i d)/sqrt2,
/// d -> (i u + d)/sqrt2 for Y. On amplitude columns this is the transpose
/// of the ket-symbol matrix, applied per qubit.
pub fn basis_change(state: &StateVector4, to_axis: PauliAxis) -> StateVector4 {
    let t = match to_axis {
        PauliAxis::Z => Operator2::identity(),
        // transpose of cos I + i sin sigma_y at 45 degrees
        PauliAxis::X => su2_rotation(PauliAxis::Y, -std::f64::consts::FRAC_PI_4),
        // cos I + i sin sigma_x is symmetric
        PauliAxis::Y => su2_rotation(PauliAxis::X, std::f64::consts::FRAC_PI_4),
    };
    let changed = tensor_op(&t, &t).apply(state);
    StateVector4::new(changed).expect("basis change is unitary")
}

/// In-plane correlation at angles alpha, beta (radians) measured from the
/// plane's z-like axis: -cos(alpha - beta) for the singlet, +cos for the
/// triplets in their own symmetry plane.
pub fn correlation_in_plane(kind: BellKind, alpha: f64, beta: f64) -> f64 {
    let plane = kind.symmetry_plane();
    let a = plane.direction_at(alpha);
    let b = plane.direction_at(beta);
    correlation_analytic(kind, &a, &b)
}

/// The measurement operator sigma_1 sigma_2 for a pair of directions.
pub fn correlation_operator(a: &Direction, b: &Direction) -> Operator4 {
    tensor_op(&direction_operator(a), &direction_operator(b))
}

/// Checks the distribution-level invariants: cells in [0,1], total 1, and
/// both single-party marginals 1/2.
pub fn distribution_well_formed(d: &JointDistribution) -> bool {
    d.cells().iter().all(|p| (0.0..=1.0).contains(p))
        && (d.cells().iter().sum::<f64>() - 1.0).abs() <= ALGEBRA_TOL
        && (d.alice_plus_marginal() - 0.5).abs() <= ALGEBRA_TOL
        && (d.bob_plus_marginal() - 0.5).abs() <= ALGEBRA_TOL
}

/// Correlation via the 4x4 expectation value; the independent route
/// against which the closed forms are verified.
pub fn correlation_expectation(kind: BellKind, a: &Direction, b: &Direction) -> Result<f64, SpinError> {
    let value = expectation(&bell_state(kind), &correlation_operator(a, b))?;
    Ok(value.re)
}
