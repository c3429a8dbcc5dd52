//! The right-invariant equation on SU(2) and the 4-dimensional transformation
//! system connecting two such equations.
//!
//! A field `b(t)` defines the group equation `dg/dt g^{-1} = -sum b_k a_k`,
//! `g(0) = e`. A curve `gbar(t)` transforms that equation into the one
//! defined by `b'(t)` exactly when, in the coordinates `(x1, x2, y1, y2)`,
//!
//! ```text
//! dx/dt = (1/2) [ 0        b2'-b2    b3'-b3    b1'-b1 ]
//!               [ b2-b2'   0        -b1-b1'    b3+b3' ]  x
//!               [ b3-b3'   b1+b1'    0        -b2-b2' ]
//!               [ b1-b1'  -b3-b3'    b2+b2'    0      ]
//! ```
//!
//! The matrix is antisymmetric, so `I(x) = x1^2 + x2^2 + y1^2 + y2^2` is a
//! first integral; solutions with `I = 1` stay on SU(2). The coefficient
//! matrices of `b_k` and `b'_k` span two commuting copies of su(2): the
//! unprimed generators act by right group multiplication, the primed ones by
//! left multiplication, which is what the exponential-midpoint solver
//! exploits to stay on the group exactly.

use crate::error::{Error, Result};
use crate::fields::{FieldSpec, Program};
use crate::grid::TimeGrid;
use crate::su2::{self, AGammaElement, AlgebraVector, GroupElement};

/// A curve `t -> (b1, b2, b3)` of algebra coefficients, representing
/// `a(t) = -sum b_k a_k`.
#[derive(Debug, Clone)]
pub struct AlgebraCurve {
    repr: CurveRepr,
}

#[derive(Debug, Clone)]
enum CurveRepr {
    Field(FieldSpec),
    Programs(Box<[Program; 3]>),
}

impl AlgebraCurve {
    /// The curve of a spin Hamiltonian: `b_k = B_k`.
    pub fn from_field(field: FieldSpec) -> Self {
        Self {
            repr: CurveRepr::Field(field),
        }
    }

    /// Independent scalar programs per component.
    pub fn from_programs(programs: [Program; 3]) -> Self {
        Self {
            repr: CurveRepr::Programs(Box::new(programs)),
        }
    }

    /// The curve of a target form `b'(t) = D(t) c`.
    pub fn from_target(target: &TargetCurve) -> Self {
        let (d, dir) = match target {
            TargetCurve::AxisZ { d } => (d, [0.0, 0.0, 1.0]),
            TargetCurve::FixedDirection { direction, d } => (d, *direction),
        };
        Self::from_programs([d.scaled(dir[0]), d.scaled(dir[1]), d.scaled(dir[2])])
    }

    pub fn eval(&self, t: f64) -> Result<[f64; 3]> {
        match &self.repr {
            CurveRepr::Field(f) => f.eval_cartesian(t),
            CurveRepr::Programs(p) => Ok([p[0].value(t)?, p[1].value(t)?, p[2].value(t)?]),
        }
    }
}

/// The restricted target forms of the transformation system.
#[derive(Debug, Clone)]
pub enum TargetCurve {
    /// `a'(t) = -D(t) a3`.
    AxisZ { d: Program },
    /// `a'(t) = -D(t) (c1 a1 + c2 a2 + c3 a3)` for a fixed unit direction.
    FixedDirection { direction: [f64; 3], d: Program },
}

impl TargetCurve {
    pub fn validate(&self) -> Result<()> {
        match self {
            TargetCurve::AxisZ { d } => d.validate(),
            TargetCurve::FixedDirection { direction, d } => {
                d.validate()?;
                let n = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "target direction must be unit norm, got {n}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Components `b'(t) = D(t) c`.
    pub fn eval(&self, t: f64) -> Result<[f64; 3]> {
        match self {
            TargetCurve::AxisZ { d } => Ok([0.0, 0.0, d.value(t)?]),
            TargetCurve::FixedDirection { direction, d } => {
                let dv = d.value(t)?;
                Ok([dv * direction[0], dv * direction[1], dv * direction[2]])
            }
        }
    }
}

pub type Mat4 = [[f64; 4]; 4];

/// The coefficient matrix of the transformation system, global 1/2 included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FsysMatrix(Mat4);

impl FsysMatrix {
    pub fn entries(&self) -> &Mat4 {
        &self.0
    }

    pub fn apply(&self, x: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (i, row) in self.0.iter().enumerate() {
            out[i] = row.iter().zip(x.iter()).map(|(m, v)| m * v).sum();
        }
        out
    }

    /// Largest entry of `M + M^T`; identically zero by construction.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for k in 0..4 {
                worst = worst.max((self.0[i][k] + self.0[k][i]).abs());
            }
        }
        worst
    }
}

/// The coefficient matrix for field components `b` and target components `bp`,
/// acting on `(x1, x2, y1, y2)`.
pub fn fsys_matrix(b: [f64; 3], bp: [f64; 3]) -> FsysMatrix {
    let [b1, b2, b3] = b;
    let [p1, p2, p3] = bp;
    let h = 0.5;
    FsysMatrix([
        [0.0, h * (p2 - b2), h * (p3 - b3), h * (p1 - b1)],
        [h * (b2 - p2), 0.0, h * (-b1 - p1), h * (b3 + p3)],
        [h * (b3 - p3), h * (b1 + p1), 0.0, h * (-b2 - p2)],
        [h * (b1 - p1), h * (-b3 - p3), h * (b2 + p2), 0.0],
    ])
}

/// The six generator matrices: `n[k]` is the coefficient of `b_{k+1}`,
/// `n_primed[k]` of `b'_{k+1}`, each including the global 1/2.
#[derive(Debug, Clone, Copy)]
pub struct GeneratorSet {
    pub n: [Mat4; 3],
    pub n_primed: [Mat4; 3],
}

pub fn generator_set() -> GeneratorSet {
    let unit = |k: usize, primed: bool| -> Mat4 {
        let mut b = [0.0; 3];
        let mut bp = [0.0; 3];
        if primed {
            bp[k] = 1.0;
        } else {
            b[k] = 1.0;
        }
        *fsys_matrix(b, bp).entries()
    };
    GeneratorSet {
        n: [unit(0, false), unit(1, false), unit(2, false)],
        n_primed: [unit(0, true), unit(1, true), unit(2, true)],
    }
}

/// Bracket of the linear vector fields `x -> A x`, `x -> B x`, with the
/// Jacobian convention `[X_A, X_B] = B A - A B`.
pub fn vector_field_bracket(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            for l in 0..4 {
                out[i][k] += b[i][l] * a[l][k] - a[i][l] * b[l][k];
            }
        }
    }
    out
}

/// A sampled curve on SU(2), with geodesic interpolation between nodes.
#[derive(Debug, Clone)]
pub struct GroupTrajectory {
    times: Vec<f64>,
    elements: Vec<GroupElement>,
}

impl GroupTrajectory {
    pub fn new(times: Vec<f64>, elements: Vec<GroupElement>) -> Result<Self> {
        if times.len() != elements.len() || times.len() < 2 {
            return Err(Error::InvalidArgument(
                "trajectory needs matching times and elements, at least two".into(),
            ));
        }
        Ok(Self { times, elements })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_element(&self) -> &GroupElement {
        self.elements.last().unwrap()
    }

    /// Value at an arbitrary time, by piecewise geodesic interpolation:
    /// `g(t) = exp(s * log(g_{n+1} g_n^{-1})) g_n` on the containing segment.
    pub fn at_time(&self, t: f64) -> Result<GroupElement> {
        let (first, last) = (self.times[0], *self.times.last().unwrap());
        if t < first || t > last {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside trajectory range [{first}, {last}]"
            )));
        }
        let i = self
            .times
            .partition_point(|&x| x <= t)
            .clamp(1, self.times.len() - 1)
            - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let s = (t - t0) / (t1 - t0);
        let increment = self.elements[i + 1].compose(&self.elements[i].inverse());
        let c = su2::log_principal(&increment)?;
        Ok(su2::exp_algebra(c.scaled(s))?.compose(&self.elements[i]))
    }

    /// Worst deviation of the first integral from 1 over the samples.
    pub fn max_first_integral_error(&self) -> f64 {
        self.elements
            .iter()
            .map(|g| (g.first_integral() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Solves `dg/dt g^{-1} = -sum b_k a_k`, `g(0) = e`, with the second-order
/// exponential-midpoint scheme `g_{n+1} = exp(-h b(t_mid) . a) g_n`.
///
/// Every sample is exactly unit norm; the global error is O(h^2).
pub fn solve_group_equation(b: &AlgebraCurve, grid: &TimeGrid) -> Result<GroupTrajectory> {
    let h = grid.step();
    let mut g = GroupElement::IDENTITY;
    let mut elements = Vec::with_capacity(grid.len());
    elements.push(g);
    for i in 0..grid.steps() {
        let bm = b.eval(grid.midpoint(i))?;
        let step = su2::exp_algebra(AlgebraVector::new(-h * bm[0], -h * bm[1], -h * bm[2])?)?;
        g = step.compose(&g);
        elements.push(g);
    }
    GroupTrajectory::new(grid.nodes().collect(), elements)
}

/// Solves the transformation system for the pair `(b, target)` from `g0`.
///
/// One step is the exponential of the antisymmetric midpoint matrix. Because
/// the primed and unprimed parts commute, that exponential factors exactly
/// into a left and a right group translation,
/// `x_{n+1} = exp(-h b'(t_mid) . a)  x_n  exp(h b(t_mid) . a)`,
/// so the first integral is preserved structurally.
pub fn solve_fsys(
    b: &AlgebraCurve,
    target: &TargetCurve,
    g0: &GroupElement,
    grid: &TimeGrid,
) -> Result<GroupTrajectory> {
    target.validate()?;
    let h = grid.step();
    let mut x = *g0;
    let mut elements = Vec::with_capacity(grid.len());
    elements.push(x);
    for i in 0..grid.steps() {
        let tm = grid.midpoint(i);
        let bm = b.eval(tm)?;
        let pm = target.eval(tm)?;
        let left = su2::exp_algebra(AlgebraVector::new(-h * pm[0], -h * pm[1], -h * pm[2])?)?;
        let right = su2::exp_algebra(AlgebraVector::new(h * bm[0], h * bm[1], h * bm[2])?)?;
        x = left.compose(&x).compose(&right);
        elements.push(x);
    }
    GroupTrajectory::new(grid.nodes().collect(), elements)
}

/// An analytic curve `t -> A_gamma(phi(t))` in the one-parameter subset,
/// with derivative available in closed form from `phi` and `d(phi)/dt`.
#[derive(Debug, Clone)]
pub struct AGammaCurve {
    gamma: f64,
    phi: Program,
}

impl AGammaCurve {
    pub fn new(gamma: f64, phi: Program) -> Result<Self> {
        phi.validate()?;
        // constructing any element validates gamma
        AGammaElement::new(gamma, 0.0)?;
        Ok(Self { gamma, phi })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn phi(&self) -> &Program {
        &self.phi
    }

    pub fn phi_at(&self, t: f64) -> Result<f64> {
        self.phi.value(t)
    }

    pub fn element_at(&self, t: f64) -> Result<GroupElement> {
        Ok(AGammaElement::new(self.gamma, self.phi.value(t)?)?.embed())
    }

    /// Coefficients `w(t)` of `(d gbar/dt) gbar^{-1} = w . a`, in closed form:
    /// `w = phi_dot (sin g cos phi, sin g sin phi, cos g - 1)`.
    pub fn derivative_coefficients(&self, t: f64) -> Result<AlgebraVector> {
        let phi = self.phi.value(t)?;
        let rate = self.phi.derivative(t)?;
        AlgebraVector::new(
            rate * self.gamma.sin() * phi.cos(),
            rate * self.gamma.sin() * phi.sin(),
            rate * (self.gamma.cos() - 1.0),
        )
    }
}

/// The curve input of [`transform_curve`]: an analytic `A_gamma` curve or a
/// sampled trajectory.
#[derive(Debug, Clone, Copy)]
pub enum TransformInput<'a> {
    AGamma(&'a AGammaCurve),
    Trajectory(&'a GroupTrajectory),
}

/// The transformed coefficients `b'` sampled on a grid.
#[derive(Debug, Clone)]
pub struct TransformedCurve {
    times: Vec<f64>,
    coefficients: Vec<[f64; 3]>,
    /// Set when the derivative of the curve came from finite differences
    /// instead of a closed form (accuracy O(h^2)).
    numeric_derivative: bool,
}

impl TransformedCurve {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn coefficients(&self) -> &[[f64; 3]] {
        &self.coefficients
    }

    pub fn numeric_derivative(&self) -> bool {
        self.numeric_derivative
    }

    /// The result as an interpolating curve.
    pub fn to_algebra_curve(&self) -> AlgebraCurve {
        let component = |k: usize| Program::Table {
            times: self.times.clone(),
            values: self.coefficients.iter().map(|c| c[k]).collect(),
        };
        AlgebraCurve::from_programs([component(0), component(1), component(2)])
    }

    /// Componentwise maximum absolute value over the grid.
    pub fn max_abs(&self) -> [f64; 3] {
        let mut out = [0.0f64; 3];
        for c in &self.coefficients {
            for k in 0..3 {
                out[k] = out[k].max(c[k].abs());
            }
        }
        out
    }
}

/// Applies the transformation rule: the curve `gbar` maps the equation of
/// `b` to the equation of `b'` with
/// `-b' . a = Ad(gbar)(-b . a) + (d gbar/dt) gbar^{-1}`,
/// i.e. `b' = Ad(gbar) b - w`.
pub fn transform_curve(
    b: &AlgebraCurve,
    gbar: TransformInput<'_>,
    grid: &TimeGrid,
) -> Result<TransformedCurve> {
    match gbar {
        TransformInput::AGamma(curve) => {
            let mut times = Vec::with_capacity(grid.len());
            let mut coefficients = Vec::with_capacity(grid.len());
            for t in grid.nodes() {
                let g = curve.element_at(t)?;
                let w = curve.derivative_coefficients(t)?;
                let ad = su2::adjoint(&g, AlgebraVector::from_array(b.eval(t)?)?);
                coefficients.push((ad - w).to_array());
                times.push(t);
            }
            Ok(TransformedCurve {
                times,
                coefficients,
                numeric_derivative: false,
            })
        }
        TransformInput::Trajectory(traj) => {
            let times = traj.times().to_vec();
            let n = times.len();
            let mut coefficients = Vec::with_capacity(n);
            for i in 0..n {
                // symmetric differences in the interior, one-sided at the ends
                let (ia, ib) = if i == 0 {
                    (0, 1)
                } else if i == n - 1 {
                    (n - 2, n - 1)
                } else {
                    (i - 1, i + 1)
                };
                let dt = times[ib] - times[ia];
                let ca = traj.elements()[ia].coordinates();
                let cb = traj.elements()[ib].coordinates();
                let deriv = [
                    (cb[0] - ca[0]) / dt,
                    (cb[1] - ca[1]) / dt,
                    (cb[2] - ca[2]) / dt,
                    (cb[3] - ca[3]) / dt,
                ];
                let g = &traj.elements()[i];
                let w = right_translated_derivative(deriv, g);
                let ad = su2::adjoint(g, AlgebraVector::from_array(b.eval(times[i])?)?);
                coefficients.push((ad - w).to_array());
            }
            Ok(TransformedCurve {
                times,
                coefficients,
                numeric_derivative: true,
            })
        }
    }
}

/// Coefficients of `(dg/dt) g^{-1}` in the `a` basis, from the coordinate
/// derivative `(dx1, dx2, dy1, dy2)`.
///
/// Equivalent to the projection `w_k = -2 Tr(a_k X)` of the matrix product
/// (the basis satisfies `Tr(a_j a_k) = -delta_{jk}/2`).
fn right_translated_derivative(d: [f64; 4], g: &GroupElement) -> AlgebraVector {
    // M = [[da, db], [-conj(db), conj(da)]] * g^{-1}, with g^{-1} = [[a*, -b], [b*, a]]
    let (da_re, da_im) = (d[0], d[2]);
    let (db_re, db_im) = (d[1], d[3]);
    let (a_re, a_im) = (g.x1(), g.y1());
    let (b_re, b_im) = (g.x2(), g.y2());
    // m00 = da * conj(a) + db * conj(b)
    let m00_im = da_im * a_re - da_re * a_im + db_im * b_re - db_re * b_im;
    // m01 = -da * b + db * a
    let m01_re = -(da_re * b_re - da_im * b_im) + db_re * a_re - db_im * a_im;
    let m01_im = -(da_re * b_im + da_im * b_re) + db_re * a_im + db_im * a_re;
    // X = w . a  =>  X00 = i w3 / 2, X01 = (w2 + i w1) / 2
    AlgebraVector {
        c1: 2.0 * m01_im,
        c2: 2.0 * m01_re,
        c3: 2.0 * m00_im,
    }
}
