//! Exact complex linear algebra for one- and two-qubit spin operators.
//!
//! Everything here is closed-form 2x2 / 4x4 arithmetic: Pauli matrices,
//! direction-dependent spin operators a.sigma, SU(2) rotations
//! cos(T)I + i sin(T)sigma_j, tensor products, eigenbases, and expectation
//! values. All values are immutable after construction and every operation
//! is a pure function.
//!
//! Conventions:
//! - Angles are radians everywhere in the library; degrees appear only at
//!   the CLI boundary.
//! - Matrix/vector equality means entrywise absolute difference <= 1e-12.
//! - Eigenvector phases are fixed (see [`eigenbasis`]) so state-level
//!   equality tests are reproducible.

// Index loops mirror the written-out matrix formulas.
#![allow(clippy::needless_range_loop)]

use num_complex::Complex64;
use thiserror::Error;

/// Absolute tolerance for all closed-form algebra in this crate.
pub const ALGEBRA_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum SpinError {
    #[error("direction ({0}, {1}, {2}) is not a unit vector")]
    NonUnitDirection(f64, f64, f64),
    #[error("state vector is not normalized (norm {0})")]
    Unnormalized(f64),
    #[error("non-finite component in input")]
    NonFinite,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The three Pauli axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];
}

/// A unit vector in real space giving a Stern-Gerlach magnet orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    ax: f64,
    ay: f64,
    az: f64,
}

impl Direction {
    /// Builds a direction, rejecting non-finite or non-unit components.
    pub fn new(ax: f64, ay: f64, az: f64) -> Result<Self, SpinError> {
        if !(ax.is_finite() && ay.is_finite() && az.is_finite()) {
            return Err(SpinError::NonFinite);
        }
        let norm_sq = ax * ax + ay * ay + az * az;
        if (norm_sq - 1.0).abs() > ALGEBRA_TOL {
            return Err(SpinError::NonUnitDirection(ax, ay, az));
        }
        Ok(Self { ax, ay, az })
    }

    pub fn x_axis() -> Self {
        Self { ax: 1.0, ay: 0.0, az: 0.0 }
    }

    pub fn y_axis() -> Self {
        Self { ax: 0.0, ay: 1.0, az: 0.0 }
    }

    pub fn z_axis() -> Self {
        Self { ax: 0.0, ay: 0.0, az: 1.0 }
    }

    pub fn components(&self) -> (f64, f64, f64) {
        (self.ax, self.ay, self.az)
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.ax * other.ax + self.ay * other.ay + self.az * other.az
    }
}

/// A normalized single-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector2 {
    amplitudes: [Complex64; 2],
}

impl StateVector2 {
    /// Builds a state from amplitudes, normalizing them. Rejects the zero
    /// vector and non-finite components.
    pub fn new(a0: Complex64, a1: Complex64) -> Result<Self, SpinError> {
        if !(a0.re.is_finite() && a0.im.is_finite() && a1.re.is_finite() && a1.im.is_finite()) {
            return Err(SpinError::NonFinite);
        }
        let norm = (a0.norm_sqr() + a1.norm_sqr()).sqrt();
        if norm < ALGEBRA_TOL {
            return Err(SpinError::Unnormalized(norm));
        }
        Ok(Self {
            amplitudes: [a0 / norm, a1 / norm],
        })
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    pub fn inner(&self, other: &StateVector2) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn approx_eq(&self, other: &StateVector2) -> bool {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .all(|(a, b)| (a - b).norm() <= ALGEBRA_TOL)
    }
}

/// A normalized two-qubit state in the (uu, ud, du, dd) ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector4 {
    amplitudes: [Complex64; 4],
}

impl StateVector4 {
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self, SpinError> {
        for a in &amplitudes {
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(SpinError::NonFinite);
            }
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(SpinError::Unnormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Like [`StateVector4::new`] but rescales to unit norm (zero rejected).
    pub fn normalized(amplitudes: [Complex64; 4]) -> Result<Self, SpinError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < ALGEBRA_TOL {
            return Err(SpinError::Unnormalized(norm));
        }
        Self::new(amplitudes.map(|a| a / norm))
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amplitudes
    }

    pub fn inner(&self, other: &StateVector4) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn approx_eq(&self, other: &StateVector4) -> bool {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .all(|(a, b)| (a - b).norm() <= ALGEBRA_TOL)
    }

    /// Euclidean distance to another (not necessarily normalized) 4-vector.
    pub fn distance(&self, other: &[Complex64; 4]) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Dense complex 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator2 {
    entries: [[Complex64; 2]; 2],
}

impl Operator2 {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn identity() -> Self {
        Self::new([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    pub fn entries(&self) -> [[Complex64; 2]; 2] {
        self.entries
    }

    pub fn mul(&self, other: &Operator2) -> Operator2 {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                for k in 0..2 {
                    *e += self.entries[i][k] * other.entries[k][j];
                }
            }
        }
        Operator2::new(out)
    }

    pub fn add(&self, other: &Operator2) -> Operator2 {
        let mut out = self.entries;
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += other.entries[i][j];
            }
        }
        Operator2::new(out)
    }

    pub fn scale(&self, z: Complex64) -> Operator2 {
        Operator2::new(self.entries.map(|row| row.map(|e| e * z)))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Operator2 {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = self.entries[j][i].conj();
            }
        }
        Operator2::new(out)
    }

    pub fn apply(&self, v: &StateVector2) -> [Complex64; 2] {
        let a = v.amplitudes();
        [
            self.entries[0][0] * a[0] + self.entries[0][1] * a[1],
            self.entries[1][0] * a[0] + self.entries[1][1] * a[1],
        ]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn determinant(&self) -> Complex64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    pub fn is_hermitian(&self) -> bool {
        self.approx_eq(&self.adjoint())
    }

    pub fn is_unitary(&self) -> bool {
        self.adjoint().mul(self).approx_eq(&Operator2::identity())
    }

    pub fn approx_eq(&self, other: &Operator2) -> bool {
        (0..2).all(|i| (0..2).all(|j| (self.entries[i][j] - other.entries[i][j]).norm() <= ALGEBRA_TOL))
    }

    /// Basis change of an observable: U† A U.
    pub fn conjugate_by(&self, u: &Operator2) -> Operator2 {
        u.adjoint().mul(self).mul(u)
    }

    /// Outer product |v⟩⟨w| of two single-qubit vectors.
    pub fn outer(v: &StateVector2, w: &StateVector2) -> Operator2 {
        let a = v.amplitudes();
        let b = w.amplitudes();
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = a[i] * b[j].conj();
            }
        }
        Operator2::new(out)
    }
}

/// Dense complex 4x4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Operator4 {
    entries: [[Complex64; 4]; 4],
}

impl Operator4 {
    pub fn new(entries: [[Complex64; 4]; 4]) -> Self {
        Self { entries }
    }

    pub fn identity() -> Self {
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            row[i] = c(1.0, 0.0);
        }
        Self::new(out)
    }

    pub fn entries(&self) -> [[Complex64; 4]; 4] {
        self.entries
    }

    pub fn mul(&self, other: &Operator4) -> Operator4 {
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                for k in 0..4 {
                    *e += self.entries[i][k] * other.entries[k][j];
                }
            }
        }
        Operator4::new(out)
    }

    pub fn adjoint(&self) -> Operator4 {
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = self.entries[j][i].conj();
            }
        }
        Operator4::new(out)
    }

    pub fn apply(&self, v: &StateVector4) -> [Complex64; 4] {
        let a = v.amplitudes();
        let mut out = [c(0.0, 0.0); 4];
        for (i, e) in out.iter_mut().enumerate() {
            for (k, ak) in a.iter().enumerate() {
                *e += self.entries[i][k] * ak;
            }
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.approx_eq(&self.adjoint())
    }

    pub fn approx_eq(&self, other: &Operator4) -> bool {
        (0..4).all(|i| (0..4).all(|j| (self.entries[i][j] - other.entries[i][j]).norm() <= ALGEBRA_TOL))
    }
}

/// The exact Pauli matrix for an axis.
pub fn pauli(axis: PauliAxis) -> Operator2 {
    let z = c(0.0, 0.0);
    match axis {
        PauliAxis::X => Operator2::new([[z, c(1.0, 0.0)], [c(1.0, 0.0), z]]),
        PauliAxis::Y => Operator2::new([[z, c(0.0, -1.0)], [c(0.0, 1.0), z]]),
        PauliAxis::Z => Operator2::new([[c(1.0, 0.0), z], [z, c(-1.0, 0.0)]]),
    }
}

/// The spin operator a.sigma = ax sx + ay sy + az sz for a unit direction.
pub fn direction_operator(a: &Direction) -> Operator2 {
    let (ax, ay, az) = a.components();
    pauli(PauliAxis::X)
        .scale(c(ax, 0.0))
        .add(&pauli(PauliAxis::Y).scale(c(ay, 0.0)))
        .add(&pauli(PauliAxis::Z).scale(c(az, 0.0)))
}

/// The SU(2) rotation cos(T)I + i sin(T)sigma_j.
///
/// `theta_hilbert` is the Hilbert-space angle T; the corresponding rotation
/// of SG magnets in real space is through 2T (see the theta = 2T law tested
/// in this module).
pub fn su2_rotation(axis: PauliAxis, theta_hilbert: f64) -> Operator2 {
    let cos = c(theta_hilbert.cos(), 0.0);
    let i_sin = c(0.0, theta_hilbert.sin());
    Operator2::identity().scale(cos).add(&pauli(axis).scale(i_sin))
}

/// Kronecker product of two 2x2 operators (first factor acts on qubit 1).
pub fn tensor_op(a: &Operator2, b: &Operator2) -> Operator4 {
    let ae = a.entries();
    let be = b.entries();
    let mut out = [[c(0.0, 0.0); 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = ae[i][j] * be[k][l];
                }
            }
        }
    }
    Operator4::new(out)
}

/// Kronecker product of two single-qubit states, (uu, ud, du, dd) ordering.
pub fn tensor_state(a: &StateVector2, b: &StateVector2) -> StateVector4 {
    let av = a.amplitudes();
    let bv = b.amplitudes();
    StateVector4::new([av[0] * bv[0], av[0] * bv[1], av[1] * bv[0], av[1] * bv[1]])
        .expect("tensor product of normalized states is normalized")
}

/// The expectation value ⟨psi|O|psi⟩.
///
/// Rejects unnormalized states; real to 1e-12 whenever O is hermitian.
pub fn expectation(state: &StateVector4, op: &Operator4) -> Result<Complex64, SpinError> {
    let norm: f64 = state.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > ALGEBRA_TOL {
        return Err(SpinError::Unnormalized(norm));
    }
    let applied = op.apply(state);
    Ok(state
        .amplitudes()
        .iter()
        .zip(applied.iter())
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// The (up, down) eigenvectors of a Pauli matrix under fixed phase
/// conventions:
///
/// - Z: (1, 0) and (0, 1)
/// - X: (1, 1)/sqrt2 and (-1, 1)/sqrt2
/// - Y: first nonzero component real positive, i.e. (1, i)/sqrt2 and
///   (1, -i)/sqrt2
///
/// The X and Z vectors are the usual textbook columns; the Y phase (which
/// textbooks vary on) is fixed by this crate's convention.
pub fn eigenbasis(axis: PauliAxis) -> (StateVector2, StateVector2) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (up, down) = match axis {
        PauliAxis::Z => ([c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]),
        PauliAxis::X => ([c(s, 0.0), c(s, 0.0)], [c(-s, 0.0), c(s, 0.0)]),
        PauliAxis::Y => ([c(s, 0.0), c(0.0, s)], [c(s, 0.0), c(0.0, -s)]),
    };
    (
        StateVector2::new(up[0], up[1]).unwrap(),
        StateVector2::new(down[0], down[1]).unwrap(),
    )
}

/// Rank-1 projectors (P+, P-) onto the ±1 eigenspaces of a.sigma.
///
/// Built as (I ± a.sigma)/2, which equals the outer products |±a⟩⟨±a| of
/// the direction-operator eigenvectors without committing to a phase.
pub fn direction_projectors(a: &Direction) -> (Operator2, Operator2) {
    let op = direction_operator(a);
    let half = c(0.5, 0.0);
    let plus = Operator2::identity().add(&op).scale(half);
    let minus = Operator2::identity().add(&op.scale(c(-1.0, 0.0))).scale(half);
    (plus, minus)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: Complex64, b: Complex64) {
        assert!((a - b).norm() <= ALGEBRA_TOL, "{a} != {b}");
    }

    /// Independent brute-force Kronecker product, index-looped over the
    /// composite index directly rather than block structure.
    fn kron_oracle(a: &Operator2, b: &Operator2) -> [[Complex64; 4]; 4] {
        let mut out = [[c(0.0, 0.0); 4]; 4];
        for (r, row) in out.iter_mut().enumerate() {
            for (col, e) in row.iter_mut().enumerate() {
                *e = a.entries()[r / 2][col / 2] * b.entries()[r % 2][col % 2];
            }
        }
        out
    }

    /// Independent expectation value by explicit double loop.
    fn expectation_oracle(state: &StateVector4, op: &Operator4) -> Complex64 {
        let a = state.amplitudes();
        let mut total = c(0.0, 0.0);
        for i in 0..4 {
            for j in 0..4 {
                total += a[i].conj() * op.entries()[i][j] * a[j];
            }
        }
        total
    }

    #[test]
    fn pauli_z_is_diag_1_minus_1() {
        let sz = pauli(PauliAxis::Z);
        assert_close(sz.entries()[0][0], c(1.0, 0.0));
        assert_close(sz.entries()[1][1], c(-1.0, 0.0));
        assert_close(sz.entries()[0][1], c(0.0, 0.0));
        assert_close(sz.entries()[1][0], c(0.0, 0.0));
    }

    #[test]
    fn pauli_squares_to_identity() {
        for axis in PauliAxis::ALL {
            assert!(pauli(axis).mul(&pauli(axis)).approx_eq(&Operator2::identity()));
        }
    }

    #[test]
    fn pauli_x_times_y_is_i_z() {
        let product = pauli(PauliAxis::X).mul(&pauli(PauliAxis::Y));
        let expected = pauli(PauliAxis::Z).scale(c(0.0, 1.0));
        assert!(product.approx_eq(&expected));
    }

    #[test]
    fn paulis_are_hermitian_unitary_traceless() {
        for axis in PauliAxis::ALL {
            let p = pauli(axis);
            assert!(p.is_hermitian());
            assert!(p.is_unitary());
            assert!(p.trace().norm() <= ALGEBRA_TOL);
        }
    }

    #[test]
    fn direction_operator_axis_aligned() {
        assert!(direction_operator(&Direction::z_axis()).approx_eq(&pauli(PauliAxis::Z)));
        assert!(direction_operator(&Direction::x_axis()).approx_eq(&pauli(PauliAxis::X)));
    }

    #[test]
    fn direction_operator_in_xz_plane() {
        // cos(t) sz + sin(t) sx for (sin t, 0, cos t)
        let t = 0.73_f64;
        let d = Direction::new(t.sin(), 0.0, t.cos()).unwrap();
        let expected = pauli(PauliAxis::Z)
            .scale(c(t.cos(), 0.0))
            .add(&pauli(PauliAxis::X).scale(c(t.sin(), 0.0)));
        assert!(direction_operator(&d).approx_eq(&expected));
    }

    #[test]
    fn non_unit_direction_rejected() {
        assert!(matches!(
            Direction::new(1.0, 1.0, 0.0),
            Err(SpinError::NonUnitDirection(..))
        ));
        assert!(matches!(Direction::new(f64::NAN, 0.0, 0.0), Err(SpinError::NonFinite)));
    }

    #[test]
    fn su2_rotation_at_zero_is_identity() {
        assert!(su2_rotation(PauliAxis::Y, 0.0).approx_eq(&Operator2::identity()));
    }

    #[test]
    fn su2_rotation_y_has_real_rotation_coefficients() {
        let t = 0.42;
        let u = su2_rotation(PauliAxis::Y, t);
        let e = u.entries();
        assert_close(e[0][0], c(t.cos(), 0.0));
        assert_close(e[0][1], c(t.sin(), 0.0));
        assert_close(e[1][0], c(-t.sin(), 0.0));
        assert_close(e[1][1], c(t.cos(), 0.0));
    }

    #[test]
    fn su2_rotation_y_45_degrees_conjugates_z_to_x() {
        let u = su2_rotation(PauliAxis::Y, std::f64::consts::FRAC_PI_4);
        assert!(pauli(PauliAxis::Z).conjugate_by(&u).approx_eq(&pauli(PauliAxis::X)));
    }

    #[test]
    fn theta_equals_two_theta_hilbert() {
        // Conjugating sz by the y-axis SU(2) rotation at T reproduces the
        // direction operator at real-space angle 2T in the xz-plane.
        for k in 0..100 {
            let t = -3.0 + 0.06 * k as f64;
            let u = su2_rotation(PauliAxis::Y, t);
            let rotated = pauli(PauliAxis::Z).conjugate_by(&u);
            let d = Direction::new((2.0 * t).sin(), 0.0, (2.0 * t).cos()).unwrap();
            assert!(rotated.approx_eq(&direction_operator(&d)), "T = {t}");
        }
    }

    #[test]
    fn tensor_identity_is_identity4() {
        let i2 = Operator2::identity();
        assert!(tensor_op(&i2, &i2).approx_eq(&Operator4::identity()));
    }

    #[test]
    fn sigma_x_sigma_z_on_ud() {
        // sx sz |ud> = -|dd>
        let (u, d) = eigenbasis(PauliAxis::Z);
        let ud = tensor_state(&u, &d);
        let op = tensor_op(&pauli(PauliAxis::X), &pauli(PauliAxis::Z));
        let result = op.apply(&ud);
        let dd = tensor_state(&d, &d).amplitudes();
        for i in 0..4 {
            assert_close(result[i], -dd[i]);
        }
    }

    #[test]
    fn sigma_x_sigma_y_on_ud() {
        // sx sy |ud> = -i|du>
        let (u, d) = eigenbasis(PauliAxis::Z);
        let ud = tensor_state(&u, &d);
        let op = tensor_op(&pauli(PauliAxis::X), &pauli(PauliAxis::Y));
        let result = op.apply(&ud);
        let du = tensor_state(&d, &u).amplitudes();
        for i in 0..4 {
            assert_close(result[i], c(0.0, -1.0) * du[i]);
        }
    }

    #[test]
    fn expectation_of_identity_is_one() {
        let psi = StateVector4::normalized([c(1.0, 0.5), c(0.0, -1.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_close(expectation(&psi, &Operator4::identity()).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn expectation_rejects_unnormalized() {
        let bad = StateVector4 {
            amplitudes: [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        };
        assert!(matches!(expectation(&bad, &Operator4::identity()), Err(SpinError::Unnormalized(_))));
    }

    #[test]
    fn eigenbasis_satisfies_eigen_equations() {
        for axis in PauliAxis::ALL {
            let (up, down) = eigenbasis(axis);
            let p = pauli(axis);
            let pu = p.apply(&up);
            let pd = p.apply(&down);
            for i in 0..2 {
                assert_close(pu[i], up.amplitudes()[i]);
                assert_close(pd[i], -down.amplitudes()[i]);
            }
            assert!(up.inner(&down).norm() <= ALGEBRA_TOL);
        }
    }

    #[test]
    fn eigenbasis_x_matches_printed_vectors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (up, down) = eigenbasis(PauliAxis::X);
        assert_close(up.amplitudes()[0], c(s, 0.0));
        assert_close(up.amplitudes()[1], c(s, 0.0));
        assert_close(down.amplitudes()[0], c(-s, 0.0));
        assert_close(down.amplitudes()[1], c(s, 0.0));
    }

    #[test]
    fn direction_projectors_are_rank1_and_sum_to_identity() {
        let d = Direction::new(0.6, 0.0, 0.8).unwrap();
        let (p, m) = direction_projectors(&d);
        assert!(p.mul(&p).approx_eq(&p));
        assert!(m.mul(&m).approx_eq(&m));
        assert!(p.add(&m).approx_eq(&Operator2::identity()));
        assert!(p.mul(&m).approx_eq(&Operator2::identity().scale(c(0.0, 0.0))));
    }

    // xorshift-style generator local to the tests; keeps the unit tests
    // independent of the crate's sampling RNG.
    fn test_rand(state: &mut u64) -> f64 {
        *state ^= *state << 13;
        *state ^= *state >> 7;
        *state ^= *state << 17;
        (*state >> 11) as f64 / (1u64 << 53) as f64
    }

    fn random_direction(state: &mut u64) -> Direction {
        let z = 2.0 * test_rand(state) - 1.0;
        let phi = 2.0 * std::f64::consts::PI * test_rand(state);
        let r = (1.0 - z * z).sqrt();
        Direction::new(r * phi.cos(), r * phi.sin(), z).unwrap()
    }

    #[test]
    fn random_direction_operators_square_to_identity() {
        let mut s = 0x1234_5678_9abc_def0u64;
        for _ in 0..200 {
            let d = random_direction(&mut s);
            let op = direction_operator(&d);
            assert!(op.is_hermitian());
            assert!(op.mul(&op).approx_eq(&Operator2::identity()));
        }
    }

    #[test]
    fn random_su2_rotations_unitary_det_one_norm_preserving() {
        let mut s = 0xfeed_beef_cafe_1234u64;
        for _ in 0..200 {
            let t = 10.0 * (test_rand(&mut s) - 0.5);
            for axis in PauliAxis::ALL {
                let u = su2_rotation(axis, t);
                assert!(u.is_unitary());
                assert_close(u.determinant(), c(1.0, 0.0));
                let v = StateVector2::new(c(test_rand(&mut s), test_rand(&mut s)), c(test_rand(&mut s), 0.3)).unwrap();
                let uv = u.apply(&v);
                let norm: f64 = uv.iter().map(|a| a.norm_sqr()).sum();
                assert!((norm - 1.0).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn tensor_and_expectation_agree_with_oracles() {
        let mut s = 0x0dd0_b0b0_aaaa_5555u64;
        for _ in 0..100 {
            let mut r2 = || {
                Operator2::new([
                    [c(test_rand(&mut s), test_rand(&mut s)), c(test_rand(&mut s), test_rand(&mut s))],
                    [c(test_rand(&mut s), test_rand(&mut s)), c(test_rand(&mut s), test_rand(&mut s))],
                ])
            };
            let a = r2();
            let b = r2();
            let t = tensor_op(&a, &b);
            let oracle = kron_oracle(&a, &b);
            for i in 0..4 {
                for j in 0..4 {
                    assert_close(t.entries()[i][j], oracle[i][j]);
                }
            }
        }
        let mut s = 0x1111_2222_3333_4444u64;
        for _ in 0..100 {
            let raw = [
                c(test_rand(&mut s), test_rand(&mut s)),
                c(test_rand(&mut s), test_rand(&mut s)),
                c(test_rand(&mut s), test_rand(&mut s)),
                c(test_rand(&mut s), test_rand(&mut s)),
            ];
            let psi = StateVector4::normalized(raw).unwrap();
            let op = tensor_op(&pauli(PauliAxis::X), &pauli(PauliAxis::Y));
            assert_close(expectation(&psi, &op).unwrap(), expectation_oracle(&psi, &op));
        }
    }
}
