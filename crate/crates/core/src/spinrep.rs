//! Spin-j matrix representations of su(2)/SU(2), Hamiltonian assembly, and
//! matrix exponentials of Hermitian operators.
//!
//! Conventions (hbar = 1): `Sz = diag(j, j-1, ..., -j)` and the ladder
//! construction `<m+1|S+|m> = sqrt(j(j+1) - m(m+1))` give Hermitian
//! `Sx, Sy, Sz` with `[i S_j, i S_k] = -eps_{jkl} i S_l`. The group acts by
//! `exp(c . a) -> exp(i c . S)`, which for j = 1/2 is the defining 2x2
//! matrix itself; this sign choice fixes every downstream convention.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::su2::{self, GroupElement};

pub type C64 = Complex64;

/// A complex state vector; normalization is checked by the propagation entry
/// points, not by the type.
pub type StateVector = DVector<C64>;

/// Unitarity bound enforced on every [`UnitaryMatrix`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Spin quantum number j stored as `two_j = 2j`, so half-integer spins are
/// exact. Dimension of the representation is `two_j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinQuantumNumber {
    two_j: u32,
}

impl SpinQuantumNumber {
    pub fn new(two_j: u32) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::InvalidArgument("spin requires two_j >= 1".into()));
        }
        Ok(Self { two_j })
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dimension(&self) -> usize {
        self.two_j as usize + 1
    }
}

impl std::str::FromStr for SpinQuantumNumber {
    type Err = Error;

    /// Parses `"1/2"`, `"3/2"`, `"1"`, `"2"`, ... as the value of j.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("cannot parse spin {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            let den: u32 = den.trim().parse().map_err(|_| bad())?;
            if den != 2 || num.is_multiple_of(2) {
                return Err(Error::InvalidArgument(format!(
                    "spin fraction must be odd/2, got {s:?}"
                )));
            }
            Self::new(num)
        } else {
            let j: u32 = s.parse().map_err(|_| bad())?;
            Self::new(2 * j)
        }
    }
}

impl std::fmt::Display for SpinQuantumNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

/// The Hermitian matrices `Sx, Sy, Sz` of a spin-j representation.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    j: SpinQuantumNumber,
    sx: DMatrix<C64>,
    sy: DMatrix<C64>,
    sz: DMatrix<C64>,
}

/// Ladder-operator construction of the spin matrices.
pub fn build_spin_operators(j: SpinQuantumNumber) -> SpinOperators {
    let dim = j.dimension();
    let jv = j.j();
    let m_of = |row: usize| jv - row as f64;

    let mut sz = DMatrix::<C64>::zeros(dim, dim);
    for r in 0..dim {
        sz[(r, r)] = C64::new(m_of(r), 0.0);
    }

    // <m+1|S+|m> = sqrt(j(j+1) - m(m+1)); m+1 lives one row above m.
    let mut splus = DMatrix::<C64>::zeros(dim, dim);
    for r in 1..dim {
        let m = m_of(r);
        splus[(r - 1, r)] = C64::new((jv * (jv + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
    }
    let sminus = splus.adjoint();

    let sx = (&splus + &sminus).scale(0.5);
    let sy = (&splus - &sminus) * C64::new(0.0, -0.5);

    SpinOperators { j, sx, sy, sz }
}

impl SpinOperators {
    pub fn j(&self) -> SpinQuantumNumber {
        self.j
    }

    pub fn dimension(&self) -> usize {
        self.j.dimension()
    }

    pub fn sx(&self) -> &DMatrix<C64> {
        &self.sx
    }

    pub fn sy(&self) -> &DMatrix<C64> {
        &self.sy
    }

    pub fn sz(&self) -> &DMatrix<C64> {
        &self.sz
    }

    /// `c1 Sx + c2 Sy + c3 Sz`.
    pub fn linear_combination(&self, c: [f64; 3]) -> DMatrix<C64> {
        self.sx.scale(c[0]) + self.sy.scale(c[1]) + self.sz.scale(c[2])
    }

    /// `exp(-i theta Sz)`, exact because Sz is diagonal.
    pub fn exp_z(&self, theta: f64) -> UnitaryMatrix {
        let dim = self.dimension();
        let jv = self.j.j();
        let mut u = DMatrix::<C64>::zeros(dim, dim);
        for r in 0..dim {
            let m = jv - r as f64;
            u[(r, r)] = C64::new(0.0, -theta * m).exp();
        }
        UnitaryMatrix(u)
    }
}

/// The Hamiltonian `Bx(t) Sx + By(t) Sy + Bz(t) Sz` at time `t`.
pub fn hamiltonian_at(field: &FieldSpec, t: f64, ops: &SpinOperators) -> Result<DMatrix<C64>> {
    let b = field.eval_cartesian(t)?;
    Ok(ops.linear_combination(b))
}

/// A unitary matrix; the constructor enforces `||U+ U - I||_max < 1e-10`.
#[derive(Debug, Clone)]
pub struct UnitaryMatrix(DMatrix<C64>);

impl UnitaryMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        let defect = unitarity_defect(&m);
        if defect >= UNITARITY_TOL {
            return Err(Error::Internal(format!(
                "matrix is not unitary: defect {defect:.3e}"
            )));
        }
        Ok(Self(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        Self::new(&self.0 * &other.0)
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        &self.0 * psi
    }
}

/// Max-entry deviation of `U+ U` from the identity.
pub fn unitarity_defect(m: &DMatrix<C64>) -> f64 {
    let p = m.adjoint() * m;
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for k in 0..n {
            let expect = if i == k { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, k)] - C64::new(expect, 0.0)).norm());
        }
    }
    worst
}

/// Max-entry deviation of `H` from its adjoint.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let a = m.adjoint();
    m.iter()
        .zip(a.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `exp(-i s H)` for Hermitian `H`, via eigendecomposition.
///
/// The matrices here are tiny (dimension 2j+1), so the decomposition cost is
/// irrelevant and the result is unitary to rounding regardless of `s`.
pub fn exp_hermitian(h: &DMatrix<C64>, s: f64) -> Result<UnitaryMatrix> {
    if h.nrows() != h.ncols() {
        return Err(Error::InvalidArgument("matrix must be square".into()));
    }
    let tolerance = 1e-12 * max_abs(h).max(1.0);
    let defect = hermiticity_defect(h);
    if defect > tolerance {
        return Err(Error::NotHermitian { defect, tolerance });
    }
    if s == 0.0 {
        return Ok(UnitaryMatrix::identity(h.nrows()));
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(h.clone());
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|w| C64::new(0.0, -s * w).exp()));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    UnitaryMatrix::new(u)
}

/// The spin-j representation matrix of a group element:
/// `exp(i c . S)` with `c` the principal log of `g`.
///
/// For j = 1/2 this reproduces the defining matrix `[[a, b], [-b*, a*]]`
/// exactly. Fails at `g = -identity`, where the log branch is undefined; the
/// curve-lifted propagator path avoids that point.
pub fn represent(g: &GroupElement, ops: &SpinOperators) -> Result<UnitaryMatrix> {
    let c = su2::log_principal(g)?;
    exp_hermitian(&ops.linear_combination(c.to_array()), -1.0)
}

/// The defining (j = 1/2) matrix of a group element, `[[a, b], [-b*, a*]]`.
pub fn defining_matrix(g: &GroupElement) -> DMatrix<C64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(g.x1(), g.y1()),
            C64::new(g.x2(), g.y2()),
            C64::new(-g.x2(), g.y2()),
            C64::new(g.x1(), -g.y1()),
        ],
    )
}

/// A group element recovered from a 2x2 special-unitary matrix.
pub fn group_element_from_defining(u: &DMatrix<C64>) -> Result<GroupElement> {
    if u.nrows() != 2 || u.ncols() != 2 {
        return Err(Error::InvalidArgument(
            "defining matrix must be 2x2".into(),
        ));
    }
    GroupElement::from_coordinates(u[(0, 0)].re, u[(0, 1)].re, u[(0, 0)].im, u[(0, 1)].im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::{exp_algebra, log_principal, AlgebraVector};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_3, PI};

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn spin(two_j: u32) -> SpinOperators {
        build_spin_operators(SpinQuantumNumber::new(two_j).unwrap())
    }

    /// Max-entry residual of `[iS_j, iS_k] + eps_{jkl} iS_l` over all pairs.
    pub(crate) fn commutation_residual(ops: &SpinOperators) -> f64 {
        let i = C64::new(0.0, 1.0);
        let s = [ops.sx(), ops.sy(), ops.sz()];
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let comm = (s[a] * s[b] - s[b] * s[a]) * (i * i);
                let mut expect = DMatrix::<C64>::zeros(ops.dimension(), ops.dimension());
                for (c, item) in s.iter().enumerate() {
                    let eps = levi_civita(a, b, c);
                    if eps != 0.0 {
                        expect += (*item).scale(eps) * i;
                    }
                }
                worst = worst.max(max_diff(&comm, &(-expect)));
            }
        }
        worst
    }

    fn levi_civita(a: usize, b: usize, c: usize) -> f64 {
        match (a, b, c) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    }

    #[test]
    fn spin_half_is_half_pauli() {
        let ops = spin(1);
        let h = 0.5;
        assert!((ops.sx()[(0, 1)].re - h).abs() < 1e-15);
        assert!((ops.sx()[(1, 0)].re - h).abs() < 1e-15);
        assert!((ops.sy()[(0, 1)].im + h).abs() < 1e-15);
        assert!((ops.sy()[(1, 0)].im - h).abs() < 1e-15);
        assert!((ops.sz()[(0, 0)].re - h).abs() < 1e-15);
        assert!((ops.sz()[(1, 1)].re + h).abs() < 1e-15);
    }

    #[test]
    fn spin_one_sz_is_diagonal() {
        let ops = spin(2);
        for (r, want) in [1.0, 0.0, -1.0].iter().enumerate() {
            assert!((ops.sz()[(r, r)].re - want).abs() < 1e-15);
        }
        assert!(commutation_residual(&ops) < 1e-12);
    }

    #[test]
    fn casimir_and_hermiticity_for_several_j() {
        for two_j in [1u32, 2, 3, 4, 7] {
            let ops = spin(two_j);
            let jv = ops.j().j();
            let casimir = ops.sx() * ops.sx() + ops.sy() * ops.sy() + ops.sz() * ops.sz();
            let expect = DMatrix::<C64>::identity(ops.dimension(), ops.dimension())
                .scale(jv * (jv + 1.0));
            assert!(max_diff(&casimir, &expect) < 1e-12, "two_j = {two_j}");
            for s in [ops.sx(), ops.sy(), ops.sz()] {
                assert!(hermiticity_defect(s) < 1e-14);
            }
            assert!(commutation_residual(&ops) < 1e-12, "two_j = {two_j}");
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let ops = spin(1);
        let zero = FieldSpec::Constant {
            bx: 0.0,
            by: 0.0,
            bz: 0.0,
        };
        assert_eq!(max_abs(&hamiltonian_at(&zero, 1.0, &ops).unwrap()), 0.0);

        let z = FieldSpec::Constant {
            bx: 0.0,
            by: 0.0,
            bz: 0.8,
        };
        let h = hamiltonian_at(&z, 0.0, &ops).unwrap();
        assert!((h[(0, 0)].re - 0.4).abs() < 1e-15);
        assert!((h[(1, 1)].re + 0.4).abs() < 1e-15);

        let rot = FieldSpec::rotating_example();
        let h = hamiltonian_at(&rot, 0.0, &ops).unwrap();
        let expect = ops.sx().scale(FRAC_PI_3.sin()) + ops.sz().scale(FRAC_PI_3.cos());
        assert!(max_diff(&h, &expect) < 1e-15);
    }

    #[test]
    fn exp_hermitian_at_zero_is_identity() {
        let ops = spin(3);
        let u = exp_hermitian(ops.sx(), 0.0).unwrap();
        assert!(max_diff(u.matrix(), &DMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn exp_hermitian_diagonal_case() {
        let ops = spin(1);
        let theta = 1.1;
        let u = exp_hermitian(ops.sz(), theta).unwrap();
        assert!((u.matrix()[(0, 0)] - C64::new(0.0, -theta / 2.0).exp()).norm() < 1e-14);
        assert!((u.matrix()[(1, 1)] - C64::new(0.0, theta / 2.0).exp()).norm() < 1e-14);
        assert!(u.matrix()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exp_hermitian_matches_power_series() {
        // j = 1/2, axis formula exp(-i theta n.S) = cos(theta/2) I - i sin(theta/2) n.sigma;
        // checked against a truncated power series of exp(-i theta n.S).
        let ops = spin(1);
        let n = [0.48, -0.6, 0.64]; // unit
        let theta = 0.9;
        let h = ops.linear_combination(n);
        let u = exp_hermitian(&h, theta).unwrap();

        let a = h.scale(theta) * C64::new(0.0, -1.0);
        let mut series = DMatrix::<C64>::identity(2, 2);
        let mut term = DMatrix::<C64>::identity(2, 2);
        for k in 1..30 {
            term = &term * &a / C64::new(k as f64, 0.0);
            series += &term;
        }
        assert!(max_diff(u.matrix(), &series) < 1e-14);

        let expect = DMatrix::<C64>::identity(2, 2).scale((theta / 2.0).cos())
            + ops.linear_combination(n).scale(2.0) * C64::new(0.0, -(theta / 2.0).sin());
        assert!(max_diff(u.matrix(), &expect) < 1e-14);
    }

    #[test]
    fn exp_hermitian_rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            exp_hermitian(&m, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn represent_identity_and_defining() {
        let ops = spin(1);
        let u = represent(&GroupElement::IDENTITY, &ops).unwrap();
        assert!(max_diff(u.matrix(), &DMatrix::identity(2, 2)) < 1e-15);

        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let c = AlgebraVector::new(
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
                rng.gen_range(-3.0..3.0),
            )
            .unwrap();
            let g = exp_algebra(c).unwrap();
            let u = represent(&g, &ops).unwrap();
            assert!(max_diff(u.matrix(), &defining_matrix(&g)) < 1e-12);
        }
    }

    #[test]
    fn represent_spin_one_diagonal() {
        let ops = spin(2);
        let theta = 0.9;
        let g = exp_algebra(AlgebraVector::new(0.0, 0.0, theta).unwrap()).unwrap();
        let u = represent(&g, &ops).unwrap();
        let phases = [
            C64::new(0.0, theta).exp(),
            C64::new(1.0, 0.0),
            C64::new(0.0, -theta).exp(),
        ];
        for (r, want) in phases.iter().enumerate() {
            assert!((u.matrix()[(r, r)] - want).norm() < 1e-13);
        }
    }

    #[test]
    fn represent_near_homomorphism_inside_ball() {
        // represent(g1 g2) = represent(g1) represent(g2) whenever
        // |log g1| + |log g2| < 2 pi.
        let mut rng = StdRng::seed_from_u64(11);
        for two_j in [1u32, 2, 3] {
            let ops = spin(two_j);
            for _ in 0..30 {
                let c1 = AlgebraVector::new(
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                )
                .unwrap();
                let c2 = AlgebraVector::new(
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                )
                .unwrap();
                let (g1, g2) = (exp_algebra(c1).unwrap(), exp_algebra(c2).unwrap());
                if log_principal(&g1).unwrap().norm() + log_principal(&g2).unwrap().norm()
                    >= 2.0 * PI
                {
                    continue;
                }
                let lhs = represent(&g1.compose(&g2), &ops).unwrap();
                let rhs = represent(&g1, &ops)
                    .unwrap()
                    .compose(&represent(&g2, &ops).unwrap())
                    .unwrap();
                assert!(
                    max_diff(lhs.matrix(), rhs.matrix()) < 1e-10,
                    "two_j = {two_j}"
                );
            }
        }
    }

    #[test]
    fn flow_commutator_second_difference_converges() {
        // The composition Fl^{-B}_t Fl^{-A}_t Fl^{B}_t Fl^{A}_t of flows of
        // skew-Hermitian A, B has second derivative 2 [B, A] at t = 0; the
        // central second difference must converge at rate O(t^2).
        let mut rng = StdRng::seed_from_u64(3);
        for dim in [2usize, 3, 4] {
            let mut h_a = DMatrix::<C64>::zeros(dim, dim);
            let mut h_b = DMatrix::<C64>::zeros(dim, dim);
            for i in 0..dim {
                for k in 0..=i {
                    let (re, im) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    h_a[(i, k)] = C64::new(re, if i == k { 0.0 } else { im });
                    h_a[(k, i)] = h_a[(i, k)].conj();
                    let (re, im) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    h_b[(i, k)] = C64::new(re, if i == k { 0.0 } else { im });
                    h_b[(k, i)] = h_b[(i, k)].conj();
                }
            }
            // A = -i H_A, B = -i H_B; flows via exp_hermitian
            let commutator = {
                let i = C64::new(0.0, 1.0);
                let a = h_a.clone() * (-i);
                let b = h_b.clone() * (-i);
                (&b * &a - &a * &b).scale(2.0)
            };
            let second_diff = |t: f64| -> DMatrix<C64> {
                let f = |t: f64| {
                    let fa = exp_hermitian(&h_a, t).unwrap();
                    let fb = exp_hermitian(&h_b, t).unwrap();
                    let fam = exp_hermitian(&h_a, -t).unwrap();
                    let fbm = exp_hermitian(&h_b, -t).unwrap();
                    fbm.matrix() * fam.matrix() * fb.matrix() * fa.matrix()
                };
                (f(t) + f(-t) - DMatrix::<C64>::identity(dim, dim).scale(2.0))
                    / C64::new(t * t, 0.0)
            };
            let mut errors = Vec::new();
            let mut t = 0.05;
            for _ in 0..4 {
                errors.push(max_diff(&second_diff(t), &commutator));
                t /= 2.0;
            }
            for w in errors.windows(2) {
                let ratio = w[0] / w[1];
                assert!(
                    (2.5..6.5).contains(&ratio),
                    "dim {dim}: ratios {errors:?}"
                );
            }
        }
    }

    #[test]
    fn spin_parsing() {
        use std::str::FromStr;
        assert_eq!(SpinQuantumNumber::from_str("1/2").unwrap().two_j(), 1);
        assert_eq!(SpinQuantumNumber::from_str("3/2").unwrap().two_j(), 3);
        assert_eq!(SpinQuantumNumber::from_str("1").unwrap().two_j(), 2);
        assert_eq!(SpinQuantumNumber::from_str("2").unwrap().two_j(), 4);
        assert!(SpinQuantumNumber::from_str("2/2").is_err());
        assert!(SpinQuantumNumber::from_str("0").is_err());
        assert!(SpinQuantumNumber::from_str("j").is_err());
        assert_eq!(SpinQuantumNumber::new(3).unwrap().to_string(), "3/2");
        assert_eq!(SpinQuantumNumber::new(4).unwrap().to_string(), "2");
    }

    #[test]
    fn group_element_round_trip_through_defining_matrix() {
        let g = exp_algebra(AlgebraVector::new(0.7, -0.3, 1.9).unwrap()).unwrap();
        let back = group_element_from_defining(&defining_matrix(&g)).unwrap();
        for (a, b) in g.coordinates().iter().zip(back.coordinates().iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
