//! Exact arithmetic for the group SU(2) and its Lie algebra su(2).
//!
//! The algebra basis is
//!
//! ```text
//! a1 = (1/2) [[0, i], [i, 0]]     a2 = (1/2) [[0, 1], [-1, 0]]     a3 = (1/2) [[i, 0], [0, -i]]
//! ```
//!
//! i.e. `a_k = i sigma_k / 2`, with brackets `[a_j, a_k] = -eps_{jkl} a_l`.
//! Group elements `[[a, b], [-b*, a*]]` with `|a|^2 + |b|^2 = 1` are stored in
//! the real coordinates `(x1, x2, y1, y2)` where `a = x1 + i y1`,
//! `b = x2 + i y2`. The transformation system of the `liesys` module lives in
//! exactly these four coordinates, which is why they are the primary
//! representation rather than complex 2x2 matrices.

use crate::error::{Error, Result};

/// Norm deviation above which a coordinate quadruple is rejected instead of
/// renormalized.
const NORM_REJECT_TOL: f64 = 1e-6;

/// Principal-log exclusion window around -identity.
const LOG_BRANCH_TOL: f64 = 1e-12;

/// An element `c1 a1 + c2 a2 + c3 a3` of su(2), by its real coefficients.
///
/// When used as the generator of dynamics the coefficients carry
/// angular-frequency units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraVector {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl AlgebraVector {
    pub const ZERO: Self = Self {
        c1: 0.0,
        c2: 0.0,
        c3: 0.0,
    };

    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        if !(c1.is_finite() && c2.is_finite() && c3.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite algebra coefficients ({c1}, {c2}, {c3})"
            )));
        }
        Ok(Self { c1, c2, c3 })
    }

    pub fn from_array(c: [f64; 3]) -> Result<Self> {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// Euclidean norm of the coefficient vector; equals the rotation angle
    /// `delta` of `exp_algebra`.
    pub fn norm(self) -> f64 {
        (self.c1 * self.c1 + self.c2 * self.c2 + self.c3 * self.c3).sqrt()
    }

    pub fn scaled(self, k: f64) -> Self {
        Self {
            c1: k * self.c1,
            c2: k * self.c2,
            c3: k * self.c3,
        }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2 + self.c3 * other.c3
    }
}

impl std::ops::Add for AlgebraVector {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self {
            c1: self.c1 + other.c1,
            c2: self.c2 + other.c2,
            c3: self.c3 + other.c3,
        }
    }
}

impl std::ops::Sub for AlgebraVector {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        self + other.scaled(-1.0)
    }
}

impl std::ops::Neg for AlgebraVector {
    type Output = Self;

    fn neg(self) -> Self {
        self.scaled(-1.0)
    }
}

/// Lie bracket `[c, d] = -(c x d)` in the basis coefficients.
///
/// The minus sign is the structure constant `-eps_{jkl}` of the basis.
pub fn bracket(c: AlgebraVector, d: AlgebraVector) -> AlgebraVector {
    AlgebraVector {
        c1: -(c.c2 * d.c3 - c.c3 * d.c2),
        c2: -(c.c3 * d.c1 - c.c1 * d.c3),
        c3: -(c.c1 * d.c2 - c.c2 * d.c1),
    }
}

/// An SU(2) element `[[a, b], [-b*, a*]]` stored as `(x1, x2, y1, y2)` with
/// `a = x1 + i y1`, `b = x2 + i y2`.
///
/// Constructors renormalize, so `x1^2 + x2^2 + y1^2 + y2^2 = 1` holds to
/// rounding for every value of this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    x1: f64,
    x2: f64,
    y1: f64,
    y2: f64,
}

impl GroupElement {
    pub const IDENTITY: Self = Self {
        x1: 1.0,
        x2: 0.0,
        y1: 0.0,
        y2: 0.0,
    };

    /// Builds an element from raw coordinates. The quadruple must be finite
    /// and within `1e-6` of unit norm; it is renormalized exactly.
    pub fn from_coordinates(x1: f64, x2: f64, y1: f64, y2: f64) -> Result<Self> {
        if !(x1.is_finite() && x2.is_finite() && y1.is_finite() && y2.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite group coordinates".into(),
            ));
        }
        let n = (x1 * x1 + x2 * x2 + y1 * y1 + y2 * y2).sqrt();
        if (n - 1.0).abs() > NORM_REJECT_TOL {
            return Err(Error::InvalidArgument(format!(
                "coordinates have norm {n}, more than {NORM_REJECT_TOL} from 1"
            )));
        }
        Ok(Self::renormalized(x1, x2, y1, y2))
    }

    /// Internal constructor for results of group operations: the inputs are
    /// known to be near unit norm, a violation indicates a bug.
    pub(crate) fn renormalized(x1: f64, x2: f64, y1: f64, y2: f64) -> Self {
        let n = (x1 * x1 + x2 * x2 + y1 * y1 + y2 * y2).sqrt();
        debug_assert!(
            (n - 1.0).abs() <= NORM_REJECT_TOL,
            "group operation drifted off the unit sphere: norm {n}"
        );
        Self {
            x1: x1 / n,
            x2: x2 / n,
            y1: y1 / n,
            y2: y2 / n,
        }
    }

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn y2(&self) -> f64 {
        self.y2
    }

    /// Coordinates in the order `(x1, x2, y1, y2)` used by the transformation
    /// system.
    pub fn coordinates(&self) -> [f64; 4] {
        [self.x1, self.x2, self.y1, self.y2]
    }

    /// `x1^2 + x2^2 + y1^2 + y2^2`; the conserved quantity of the
    /// transformation system, identically 1 for this type up to rounding.
    pub fn first_integral(&self) -> f64 {
        self.x1 * self.x1 + self.x2 * self.x2 + self.y1 * self.y1 + self.y2 * self.y2
    }

    /// Matrix product, in coordinates.
    pub fn compose(&self, other: &Self) -> Self {
        let (p1, p2, q1, q2) = (self.x1, self.x2, self.y1, self.y2);
        let (r1, r2, s1, s2) = (other.x1, other.x2, other.y1, other.y2);
        // a = a1*a2 - b1*conj(b2), b = a1*b2 + b1*conj(a2)
        let x1 = p1 * r1 - q1 * s1 - p2 * r2 - q2 * s2;
        let y1 = p1 * s1 + q1 * r1 - q2 * r2 + p2 * s2;
        let x2 = p1 * r2 - q1 * s2 + p2 * r1 + q2 * s1;
        let y2 = p1 * s2 + q1 * r2 + q2 * r1 - p2 * s1;
        Self::renormalized(x1, x2, y1, y2)
    }

    /// Conjugate transpose, the group inverse.
    pub fn inverse(&self) -> Self {
        Self {
            x1: self.x1,
            x2: -self.x2,
            y1: -self.y1,
            y2: -self.y2,
        }
    }
}

/// Exponential of `c1 a1 + c2 a2 + c3 a3` in closed form.
///
/// With `delta = |c|` and unit axis `n = c/delta` the result is
/// `cos(delta/2) I + i sin(delta/2) (n . sigma)`, which in coordinates reads
/// `x1 = cos(delta/2)`, `(y2, x2, y1) = sin(delta/2) (n1, n2, n3)`.
pub fn exp_algebra(c: AlgebraVector) -> Result<GroupElement> {
    if !(c.c1.is_finite() && c.c2.is_finite() && c.c3.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite algebra coefficients in exp".into(),
        ));
    }
    let delta = c.norm();
    if delta == 0.0 {
        return Ok(GroupElement::IDENTITY);
    }
    let half = 0.5 * delta;
    // sin(delta/2)/delta, safe for small delta
    let s = if delta < 1e-8 {
        0.5 * (1.0 - half * half / 6.0)
    } else {
        half.sin() / delta
    };
    Ok(GroupElement::renormalized(
        half.cos(),
        s * c.c2,
        s * c.c3,
        s * c.c1,
    ))
}

/// Principal logarithm: the unique `c` with `|c| in [0, 2pi)` and
/// `exp_algebra(c) = g`.
///
/// Undefined at `-identity`, where every axis works; callers that need a
/// continuous log along a curve should lift increments instead (see
/// `liesys::GroupTrajectory`).
pub fn log_principal(g: &GroupElement) -> Result<AlgebraVector> {
    if g.x1 <= -1.0 + LOG_BRANCH_TOL {
        return Err(Error::BranchUndefined { x1: g.x1 });
    }
    // vector part in algebra order (1, 2, 3) = (y2, x2, y1)
    let (v1, v2, v3) = (g.y2, g.x2, g.y1);
    let m = (v1 * v1 + v2 * v2 + v3 * v3).sqrt();
    if m == 0.0 {
        return Ok(AlgebraVector::ZERO);
    }
    let delta = 2.0 * m.atan2(g.x1);
    let k = delta / m;
    Ok(AlgebraVector {
        c1: k * v1,
        c2: k * v2,
        c3: k * v3,
    })
}

/// Adjoint action: coefficients of `g (c . a) g^{-1}` in the `a` basis.
///
/// With scalar part `q0 = x1` and vector part `q = (y2, x2, y1)` this is
/// `(q0^2 - |q|^2) c - 2 q0 (q x c) + 2 (q . c) q`, an orthogonal map.
pub fn adjoint(g: &GroupElement, c: AlgebraVector) -> AlgebraVector {
    let q0 = g.x1;
    let (q1, q2, q3) = (g.y2, g.x2, g.y1);
    let qq = q1 * q1 + q2 * q2 + q3 * q3;
    let qdotc = q1 * c.c1 + q2 * c.c2 + q3 * c.c3;
    let cross = [
        q2 * c.c3 - q3 * c.c2,
        q3 * c.c1 - q1 * c.c3,
        q1 * c.c2 - q2 * c.c1,
    ];
    let k = q0 * q0 - qq;
    AlgebraVector {
        c1: k * c.c1 - 2.0 * q0 * cross[0] + 2.0 * qdotc * q1,
        c2: k * c.c2 - 2.0 * q0 * cross[1] + 2.0 * qdotc * q2,
        c3: k * c.c3 - 2.0 * q0 * cross[2] + 2.0 * qdotc * q3,
    }
}

/// A point of the one-parameter subset `A_gamma`: rotation angle `gamma`
/// fixed, equatorial phase `b` free.
///
/// Embeds into the group as `x1 = cos(gamma/2)`, `x2 = -sin(gamma/2) cos b`,
/// `y1 = 0`, `y2 = sin(gamma/2) sin b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AGammaElement {
    gamma: f64,
    b: f64,
}

impl AGammaElement {
    /// `gamma` must not be a multiple of `2 pi` (the subset collapses to
    /// `+/- identity` there); `b` is reduced into `[0, 2 pi)`.
    pub fn new(gamma: f64, b: f64) -> Result<Self> {
        if !gamma.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(
                "non-finite A_gamma parameters".into(),
            ));
        }
        if (gamma / 2.0).sin().abs() < 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "gamma = {gamma} is a multiple of 2*pi; A_gamma degenerates"
            )));
        }
        let tau = 2.0 * std::f64::consts::PI;
        let b = b.rem_euclid(tau);
        Ok(Self { gamma, b })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The group element this point represents.
    pub fn embed(&self) -> GroupElement {
        let half = 0.5 * self.gamma;
        GroupElement::renormalized(
            half.cos(),
            -half.sin() * self.b.cos(),
            0.0,
            half.sin() * self.b.sin(),
        )
    }

    /// Coefficients `(gamma sin b, -gamma cos b, 0)` whose exponential equals
    /// the embedding.
    pub fn log_coefficients(&self) -> AlgebraVector {
        AlgebraVector {
            c1: self.gamma * self.b.sin(),
            c2: -self.gamma * self.b.cos(),
            c3: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    fn max_coord_diff(g: &GroupElement, h: &GroupElement) -> f64 {
        g.coordinates()
            .iter()
            .zip(h.coordinates().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Multiplies the explicit 2x2 basis matrices; the independent oracle for
    /// `bracket`. Matrices as [[re00,im00,re01,im01],[re10,im10,re11,im11]].
    fn basis_matrix(k: usize) -> [[f64; 4]; 2] {
        match k {
            0 => [[0.0, 0.0, 0.0, 0.5], [0.0, 0.5, 0.0, 0.0]],
            1 => [[0.0, 0.0, 0.5, 0.0], [-0.5, 0.0, 0.0, 0.0]],
            2 => [[0.0, 0.5, 0.0, 0.0], [0.0, 0.0, 0.0, -0.5]],
            _ => unreachable!(),
        }
    }

    fn mat_combine(c: AlgebraVector) -> [[f64; 4]; 2] {
        let mut out = [[0.0; 4]; 2];
        for (k, w) in [c.c1, c.c2, c.c3].iter().enumerate() {
            let m = basis_matrix(k);
            for i in 0..2 {
                for j in 0..4 {
                    out[i][j] += w * m[i][j];
                }
            }
        }
        out
    }

    fn mat_mul(a: &[[f64; 4]; 2], b: &[[f64; 4]; 2]) -> [[f64; 4]; 2] {
        let mut out = [[0.0; 4]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let mut re = 0.0;
                let mut im = 0.0;
                for l in 0..2 {
                    let (ar, ai) = (a[i][2 * l], a[i][2 * l + 1]);
                    let (br, bi) = (b[l][2 * j], b[l][2 * j + 1]);
                    re += ar * br - ai * bi;
                    im += ar * bi + ai * br;
                }
                out[i][2 * j] = re;
                out[i][2 * j + 1] = im;
            }
        }
        out
    }

    fn mat_commutator_diff(c: AlgebraVector, d: AlgebraVector) -> f64 {
        let (mc, md) = (mat_combine(c), mat_combine(d));
        let comm_ab = mat_mul(&mc, &md);
        let comm_ba = mat_mul(&md, &mc);
        let expect = mat_combine(bracket(c, d));
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..4 {
                worst = worst.max((comm_ab[i][j] - comm_ba[i][j] - expect[i][j]).abs());
            }
        }
        worst
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let g = exp_algebra(AlgebraVector::ZERO).unwrap();
        assert_eq!(g.coordinates(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn exp_along_a3_gives_diagonal_phase() {
        // exp((0,0,theta)) = diag(e^{i theta/2}, e^{-i theta/2})
        let theta = 0.83;
        let g = exp_algebra(AlgebraVector::new(0.0, 0.0, theta).unwrap()).unwrap();
        assert_close(g.x1(), (theta / 2.0).cos(), 1e-15, "x1");
        assert_close(g.y1(), (theta / 2.0).sin(), 1e-15, "y1");
        assert_close(g.x2(), 0.0, 1e-15, "x2");
        assert_close(g.y2(), 0.0, 1e-15, "y2");
    }

    #[test]
    fn exp_matches_a_gamma_embedding() {
        for &gamma in &[0.3, 1.3, -0.9, 2.8] {
            for &b in &[0.0, 0.7, 2.0, 5.5] {
                let el = AGammaElement::new(gamma, b).unwrap();
                let g = exp_algebra(el.log_coefficients()).unwrap();
                assert!(
                    max_coord_diff(&g, &el.embed()) < 1e-14,
                    "gamma={gamma} b={b}"
                );
            }
        }
    }

    #[test]
    fn exp_rejects_non_finite() {
        let c = AlgebraVector {
            c1: f64::NAN,
            c2: 0.0,
            c3: 0.0,
        };
        assert!(exp_algebra(c).is_err());
    }

    #[test]
    fn log_of_identity_is_zero() {
        let c = log_principal(&GroupElement::IDENTITY).unwrap();
        assert_eq!(c.to_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn log_round_trip_on_axis() {
        let c = AlgebraVector::new(1.2, 0.0, 0.0).unwrap();
        let back = log_principal(&exp_algebra(c).unwrap()).unwrap();
        assert_close(back.c1, 1.2, 1e-14, "c1");
        assert_close(back.c2, 0.0, 1e-14, "c2");
        assert_close(back.c3, 0.0, 1e-14, "c3");
    }

    #[test]
    fn log_rejects_minus_identity() {
        let g = GroupElement::from_coordinates(-1.0, 0.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            log_principal(&g),
            Err(Error::BranchUndefined { .. })
        ));
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let g = exp_algebra(AlgebraVector::new(0.4, -1.0, 2.2).unwrap()).unwrap();
        let e = g.compose(&g.inverse());
        assert!(max_coord_diff(&e, &GroupElement::IDENTITY) < 1e-15);
        let e2 = GroupElement::IDENTITY.compose(&g);
        assert!(max_coord_diff(&e2, &g) < 1e-15);
    }

    #[test]
    fn one_parameter_subgroup_adds_angles() {
        let (t1, t2) = (0.9, -0.4);
        let g1 = exp_algebra(AlgebraVector::new(0.0, 0.0, t1).unwrap()).unwrap();
        let g2 = exp_algebra(AlgebraVector::new(0.0, 0.0, t2).unwrap()).unwrap();
        let sum = exp_algebra(AlgebraVector::new(0.0, 0.0, t1 + t2).unwrap()).unwrap();
        assert!(max_coord_diff(&g1.compose(&g2), &sum) < 1e-15);
    }

    #[test]
    fn bracket_table() {
        let e1 = AlgebraVector::new(1.0, 0.0, 0.0).unwrap();
        let e2 = AlgebraVector::new(0.0, 1.0, 0.0).unwrap();
        let e3 = AlgebraVector::new(0.0, 0.0, 1.0).unwrap();
        assert_eq!(bracket(e1, e2).to_array(), [0.0, 0.0, -1.0]);
        assert_eq!(bracket(e2, e3).to_array(), [-1.0, 0.0, 0.0]);
        assert_eq!(bracket(e3, e1).to_array(), [0.0, -1.0, 0.0]);
        let c = AlgebraVector::new(0.3, -0.2, 0.9).unwrap();
        assert_eq!(bracket(c, c).to_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn adjoint_of_identity_is_identity() {
        let c = AlgebraVector::new(0.3, 0.7, -0.1).unwrap();
        let out = adjoint(&GroupElement::IDENTITY, c);
        assert_eq!(out.to_array(), c.to_array());
    }

    #[test]
    fn adjoint_about_z_rotates_backwards() {
        // Ad(exp(theta a3)) e1 = cos(theta) e1 - sin(theta) e2, from explicit
        // conjugation of the 2x2 matrices.
        let theta = 0.77;
        let g = exp_algebra(AlgebraVector::new(0.0, 0.0, theta).unwrap()).unwrap();
        let out = adjoint(&g, AlgebraVector::new(1.0, 0.0, 0.0).unwrap());
        assert_close(out.c1, theta.cos(), 1e-14, "c1");
        assert_close(out.c2, -theta.sin(), 1e-14, "c2");
        assert_close(out.c3, 0.0, 1e-14, "c3");
    }

    #[test]
    fn a_gamma_rejects_multiples_of_two_pi() {
        assert!(AGammaElement::new(0.0, 1.0).is_err());
        assert!(AGammaElement::new(2.0 * PI, 1.0).is_err());
        assert!(AGammaElement::new(-4.0 * PI, 1.0).is_err());
        assert!(AGammaElement::new(PI, 1.0).is_ok());
    }

    #[test]
    fn a_gamma_embedding_formula() {
        let el = AGammaElement::new(1.1, 0.6).unwrap();
        let g = el.embed();
        assert_close(g.x1(), (1.1f64 / 2.0).cos(), 1e-15, "x1");
        assert_close(g.x2(), -(1.1f64 / 2.0).sin() * 0.6f64.cos(), 1e-15, "x2");
        assert_eq!(g.y1(), 0.0);
        assert_close(g.y2(), (1.1f64 / 2.0).sin() * 0.6f64.sin(), 1e-15, "y2");
    }

    #[test]
    fn from_coordinates_renormalizes_and_rejects() {
        let g = GroupElement::from_coordinates(1.0 + 3e-7, 0.0, 0.0, 0.0).unwrap();
        assert!((g.first_integral() - 1.0).abs() < 1e-15);
        assert!(GroupElement::from_coordinates(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(GroupElement::from_coordinates(f64::INFINITY, 0.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn prop_exp_log_round_trip(
            n1 in -1.0f64..1.0, n2 in -1.0f64..1.0, n3 in -1.0f64..1.0,
            delta in 0.0f64..(2.0 * PI - 1e-6),
        ) {
            let norm = (n1 * n1 + n2 * n2 + n3 * n3).sqrt();
            prop_assume!(norm > 1e-3);
            let c = AlgebraVector::new(delta * n1 / norm, delta * n2 / norm, delta * n3 / norm).unwrap();
            let back = log_principal(&exp_algebra(c).unwrap()).unwrap();
            prop_assert!((back.c1 - c.c1).abs() < 1e-10);
            prop_assert!((back.c2 - c.c2).abs() < 1e-10);
            prop_assert!((back.c3 - c.c3).abs() < 1e-10);
        }

        #[test]
        fn prop_unit_norm_preserved(
            a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
            d in -3.0f64..3.0, e in -3.0f64..3.0, f in -3.0f64..3.0,
        ) {
            let g1 = exp_algebra(AlgebraVector::new(a, b, c).unwrap()).unwrap();
            let g2 = exp_algebra(AlgebraVector::new(d, e, f).unwrap()).unwrap();
            let g = g1.compose(&g2);
            prop_assert!((g.first_integral() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn prop_adjoint_is_isometry_and_homomorphism(
            a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0,
            d in -3.0f64..3.0, e in -3.0f64..3.0, f in -3.0f64..3.0,
            v1 in -2.0f64..2.0, v2 in -2.0f64..2.0, v3 in -2.0f64..2.0,
        ) {
            let g1 = exp_algebra(AlgebraVector::new(a, b, c).unwrap()).unwrap();
            let g2 = exp_algebra(AlgebraVector::new(d, e, f).unwrap()).unwrap();
            let v = AlgebraVector::new(v1, v2, v3).unwrap();
            prop_assert!((adjoint(&g1, v).norm() - v.norm()).abs() < 1e-12);
            let lhs = adjoint(&g1.compose(&g2), v);
            let rhs = adjoint(&g1, adjoint(&g2, v));
            prop_assert!((lhs.c1 - rhs.c1).abs() < 1e-12);
            prop_assert!((lhs.c2 - rhs.c2).abs() < 1e-12);
            prop_assert!((lhs.c3 - rhs.c3).abs() < 1e-12);
        }

        #[test]
        fn prop_bracket_matches_matrix_commutator(
            a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0,
            d in -2.0f64..2.0, e in -2.0f64..2.0, f in -2.0f64..2.0,
        ) {
            let u = AlgebraVector::new(a, b, c).unwrap();
            let v = AlgebraVector::new(d, e, f).unwrap();
            prop_assert!(mat_commutator_diff(u, v) < 1e-15);
        }

        #[test]
        fn prop_jacobi_identity(
            a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0,
            d in -1.0f64..1.0, e in -1.0f64..1.0, f in -1.0f64..1.0,
            g in -1.0f64..1.0, h in -1.0f64..1.0, i in -1.0f64..1.0,
        ) {
            let x = AlgebraVector::new(a, b, c).unwrap();
            let y = AlgebraVector::new(d, e, f).unwrap();
            let z = AlgebraVector::new(g, h, i).unwrap();
            let total = bracket(x, bracket(y, z))
                + bracket(y, bracket(z, x))
                + bracket(z, bracket(x, y));
            prop_assert!(total.norm() < 1e-14);
        }

        #[test]
        fn prop_log_of_random_unit_vector(
            x1 in -0.99f64..1.0, x2 in -1.0f64..1.0, y1 in -1.0f64..1.0, y2 in -1.0f64..1.0,
        ) {
            let n = (x1 * x1 + x2 * x2 + y1 * y1 + y2 * y2).sqrt();
            prop_assume!(n > 1e-3);
            // normalize, avoiding the excluded -identity neighbourhood
            prop_assume!(x1 / n > -1.0 + 1e-6);
            let g = GroupElement::renormalized(x1 / n, x2 / n, y1 / n, y2 / n);
            let c = log_principal(&g).unwrap();
            prop_assert!(c.norm() < 2.0 * PI);
            let back = exp_algebra(c).unwrap();
            prop_assert!(max_coord_diff(&back, &g) < 1e-12);
        }
    }
}
