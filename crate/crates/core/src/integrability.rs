//! Integrability conditions for spin Hamiltonians, connecting curves, and
//! closed-form propagators.
//!
//! A field in polar form `(B, theta, phi)` is integrable through a curve in
//! `A_gamma` (gamma constant) exactly when, with the phase locked to the
//! azimuth (`b = phi`), the algebraic conditions
//!
//! ```text
//! 0 = -b2 x2 - b1 y2
//! 0 = (b3 - D) x1 + b1 x2 - b2 y2        =>   D = B cos(gamma/2 + theta) / cos(gamma/2)
//! ```
//!
//! and the differential condition
//!
//! ```text
//! d(phi)/dt = B sin(theta + gamma) / sin(gamma)
//! ```
//!
//! hold. Solving the last relation for `gamma`,
//! `tan(gamma) = sin(theta) / (phi_dot/B - cos(theta))`, fixes `gamma` up to
//! a multiple of pi; the condition itself is pi-periodic in gamma, so both
//! representatives in `(-pi, pi) \ {0}` satisfy it and differ only in the
//! target coefficient `D` they produce. The representative in `(0, pi)` is
//! reported, labelled as the positive root of the half-angle quadratic; the
//! shifted representative pairs with the other closed-form branch
//! `D = omega +/- sqrt(omega^2 - 2 omega B cos(theta) + B^2)` of the
//! rotating family.
//!
//! For an integrable pair the connecting curve is
//! `gbar(t) = exp(gamma sin(phi) a1 - gamma cos(phi) a2)` and the propagator
//! is `U(t) = W(t) exp(-i Theta(t) Sz) W(t0)^{-1}` with
//! `W(t) = represent(gbar(t)^{-1})` and `Theta = int D`. The `W(t0)^{-1}`
//! factor makes `U(t0) = I` hold exactly.

use crate::error::{Error, Result};
use crate::fields::{FieldSpec, PolarTrack, Program};
use crate::grid::TimeGrid;
use crate::liesys::AGammaCurve;
use crate::oracle::{Initial, PropagationResult, Scheme};
use crate::spinrep::{
    build_spin_operators, represent, SpinOperators, SpinQuantumNumber, UnitaryMatrix,
};

/// Minimum `|sin(gamma)|` for a usable gamma.
const SIN_GAMMA_MIN: f64 = 1e-9;

/// Exclusion window around the `D` pole at `|gamma| = pi`.
const GAMMA_POLE_MARGIN: f64 = 1e-9;

/// Default bound on `max |gamma(t) - mean|` for accepting a constant gamma.
pub const GAMMA_CONSTANCY_TOL: f64 = 1e-7;

/// Which root of the half-angle quadratic a gamma representative belongs to:
/// `Plus` for `gamma in (0, pi)`, `Minus` for `gamma in (-pi, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaBranch {
    Plus,
    Minus,
}

/// A constant gamma solving the differential integrability condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSolution {
    gamma: f64,
    branch: GammaBranch,
    constancy_residual: f64,
}

impl GammaSolution {
    pub fn new(gamma: f64, constancy_residual: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma.sin().abs() <= SIN_GAMMA_MIN {
            return Err(Error::InvalidArgument(format!(
                "gamma = {gamma} has |sin gamma| <= {SIN_GAMMA_MIN}"
            )));
        }
        if gamma.abs() >= std::f64::consts::PI {
            return Err(Error::InvalidArgument(format!(
                "gamma = {gamma} outside the representative range (-pi, pi)"
            )));
        }
        let branch = if gamma > 0.0 {
            GammaBranch::Plus
        } else {
            GammaBranch::Minus
        };
        Ok(Self {
            gamma,
            branch,
            constancy_residual,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn branch(&self) -> GammaBranch {
        self.branch
    }

    pub fn constancy_residual(&self) -> f64 {
        self.constancy_residual
    }
}

/// Outcome of the integrability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Integrable,
    NotIntegrable,
    Degenerate,
}

/// Residuals of the integrability conditions over a grid, and the verdict.
#[derive(Debug, Clone)]
pub struct IntegrabilityReport {
    pub gamma: Option<GammaSolution>,
    /// `max |-b2 x2 - b1 y2|` with the `A_gamma` substitution, `b = phi`.
    pub r_algebraic_1: f64,
    /// `max |(b3 - D) x1 + b1 x2 - b2 y2|`.
    pub r_algebraic_2: f64,
    /// `max |phi_dot - B sin(theta + gamma) / sin(gamma)|`.
    pub r_differential: f64,
    /// `D(t)` per sample of the grid (0 where the field vanishes).
    pub d_samples: Vec<f64>,
    pub verdict: Verdict,
    /// Residual tolerance the verdict used.
    pub tolerance: f64,
}

/// The default residual tolerance `1e-8 (max |B| + max |phi_dot|)`.
pub fn default_residual_tolerance(track: &PolarTrack) -> f64 {
    1e-8 * (track.max_b() + track.max_phi_dot())
}

/// Solves `tan(gamma) = sin(theta) / (phi_dot/B - cos(theta))` samplewise and
/// accepts the result when it is constant over the track.
///
/// Returns `Ok(None)` when no constant gamma exists (residual above
/// `constancy_tol`) or the mean lands within `1e-9` of a multiple of pi.
/// Both representatives `mean` and `mean - pi` satisfy the differential
/// condition equally in exact arithmetic; the principal one in `(0, pi)` is
/// returned unless the shifted one is strictly better beyond rounding.
pub fn solve_gamma(track: &PolarTrack, constancy_tol: f64) -> Result<Option<GammaSolution>> {
    if track.is_all_degenerate() {
        return Err(Error::DegenerateField(
            "gamma undefined on an all-degenerate track".into(),
        ));
    }
    let mut values = Vec::new();
    for s in track.non_degenerate() {
        if s.b <= 0.0 {
            return Err(Error::DegenerateField(format!(
                "zero field magnitude at t = {}",
                s.t
            )));
        }
        // atan2 of (sin theta >= 0, .) lands in [0, pi]
        values.push(s.theta.sin().atan2(s.phi_dot / s.b - s.theta.cos()));
    }
    // compensated sum: a naive mean over 1e5 samples carries ~1e-11 of
    // rounding, which would dominate the constancy residual
    let mean = kahan_sum(&values) / values.len() as f64;
    let residual = values
        .iter()
        .map(|g| (g - mean).abs())
        .fold(0.0, f64::max);
    if residual > constancy_tol || mean.sin().abs() <= SIN_GAMMA_MIN {
        return Ok(None);
    }
    let shifted = mean - std::f64::consts::PI;
    let pick = if shifted.abs() < std::f64::consts::PI - GAMMA_POLE_MARGIN {
        let r_mean = differential_residual(track, mean);
        let r_shifted = differential_residual(track, shifted);
        // the two residuals agree in exact arithmetic; only a difference
        // above the rounding floor justifies leaving the principal value
        let floor = 1e-13 * (track.max_b() + track.max_phi_dot());
        if r_shifted + floor < r_mean {
            shifted
        } else {
            mean
        }
    } else {
        mean
    };
    Ok(Some(GammaSolution::new(pick, residual)?))
}

fn kahan_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for &v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

fn differential_residual(track: &PolarTrack, gamma: f64) -> f64 {
    track
        .non_degenerate()
        .map(|s| (s.phi_dot - s.b * (s.theta + gamma).sin() / gamma.sin()).abs())
        .fold(0.0, f64::max)
}

/// The target coefficient `D = B cos(gamma/2 + theta) / cos(gamma/2)`.
pub fn compute_d(b: f64, theta: f64, gamma: f64) -> Result<f64> {
    if !(b.is_finite() && theta.is_finite() && gamma.is_finite()) {
        return Err(Error::InvalidArgument("non-finite D arguments".into()));
    }
    if gamma.abs() >= std::f64::consts::PI - GAMMA_POLE_MARGIN {
        return Err(Error::Pole(format!(
            "D diverges as |gamma| -> pi (gamma = {gamma})"
        )));
    }
    Ok(b * (0.5 * gamma + theta).cos() / (0.5 * gamma).cos())
}

/// Both closed-form values `D = omega +/- sqrt(omega^2 - 2 omega B cos th + B^2)`
/// of the rotating family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingDBranches {
    pub d_plus: f64,
    pub d_minus: f64,
}

impl RotatingDBranches {
    /// The closed-form value matching a gamma representative: the positive
    /// root of the half-angle quadratic (`gamma in (0, pi)`) produces the
    /// minus sign in `D`, and vice versa.
    pub fn for_gamma_branch(&self, branch: GammaBranch) -> f64 {
        match branch {
            GammaBranch::Plus => self.d_minus,
            GammaBranch::Minus => self.d_plus,
        }
    }
}

/// Closed-form `D` of a rotating field with constant `B`, `theta`, `omega`.
pub fn closed_form_d_rotating(b: f64, theta: f64, omega: f64) -> Result<RotatingDBranches> {
    if !(b.is_finite() && theta.is_finite() && omega.is_finite()) {
        return Err(Error::InvalidArgument(
            "non-finite rotating-field parameters".into(),
        ));
    }
    // equals (omega - B cos th)^2 + B^2 sin^2 th, nonnegative up to rounding
    let disc = omega * omega - 2.0 * omega * b * theta.cos() + b * b;
    if disc < -1e-12 {
        return Err(Error::Internal(format!(
            "rotating-field discriminant {disc} negative"
        )));
    }
    let root = disc.max(0.0).sqrt();
    Ok(RotatingDBranches {
        d_plus: omega + root,
        d_minus: omega - root,
    })
}

fn validate_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma.sin().abs() <= SIN_GAMMA_MIN {
        return Err(Error::InvalidArgument(format!(
            "gamma = {gamma} has |sin gamma| <= {SIN_GAMMA_MIN}"
        )));
    }
    if gamma.abs() >= std::f64::consts::PI - GAMMA_POLE_MARGIN {
        return Err(Error::Pole(format!(
            "gamma = {gamma} is inside the D pole margin at |gamma| = pi"
        )));
    }
    Ok(())
}

/// Evaluates the integrability residuals of `(field, gamma)` samplewise on
/// `grid`.
///
/// Degenerate samples are excluded from the residual statistics; when every
/// sample is degenerate the verdict is `Degenerate`. `tolerance` defaults to
/// `1e-8 (max |B| + max |phi_dot|)`.
pub fn check_integrability(
    field: &FieldSpec,
    gamma: f64,
    grid: &TimeGrid,
    tolerance: Option<f64>,
) -> Result<IntegrabilityReport> {
    validate_gamma(gamma)?;
    let track = field.to_polar_track(grid)?;
    let tolerance = tolerance.unwrap_or_else(|| default_residual_tolerance(&track));
    let solution = GammaSolution::new(gamma, 0.0).ok();

    let mut d_samples = Vec::with_capacity(track.samples().len());
    for s in track.samples() {
        d_samples.push(if s.b == 0.0 {
            0.0
        } else {
            compute_d(s.b, s.theta, gamma)?
        });
    }

    if track.is_all_degenerate() {
        return Ok(IntegrabilityReport {
            gamma: solution,
            r_algebraic_1: 0.0,
            r_algebraic_2: 0.0,
            r_differential: 0.0,
            d_samples,
            verdict: Verdict::Degenerate,
            tolerance,
        });
    }

    let half = 0.5 * gamma;
    let (x1, sin_half) = (half.cos(), half.sin());
    let mut r1 = 0.0f64;
    let mut r2 = 0.0f64;
    let mut r3 = 0.0f64;
    for (s, d) in track.samples().iter().zip(d_samples.iter()) {
        if s.degenerate {
            continue;
        }
        let [b1, b2, b3] = field.eval_cartesian(s.t)?;
        let x2 = -sin_half * s.phi.cos();
        let y2 = sin_half * s.phi.sin();
        r1 = r1.max((-b2 * x2 - b1 * y2).abs());
        r2 = r2.max(((b3 - d) * x1 + b1 * x2 - b2 * y2).abs());
        r3 = r3.max((s.phi_dot - s.b * (s.theta + gamma).sin() / gamma.sin()).abs());
    }

    let verdict = if r1 < tolerance && r2 < tolerance && r3 < tolerance {
        Verdict::Integrable
    } else {
        Verdict::NotIntegrable
    };
    Ok(IntegrabilityReport {
        gamma: solution,
        r_algebraic_1: r1,
        r_algebraic_2: r2,
        r_differential: r3,
        d_samples,
        verdict,
        tolerance,
    })
}

/// How gamma is chosen for an analysis run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaChoice {
    /// Solve for gamma from the track.
    Auto,
    /// Use the given value.
    Fixed(f64),
}

/// Runs the full integrability pipeline: polar track, gamma (solved or
/// given), residual check.
///
/// Never fails on non-integrable or degenerate inputs; those come back in
/// the verdict. When gamma cannot be solved the residual fields are infinite.
pub fn analyze(
    field: &FieldSpec,
    choice: GammaChoice,
    grid: &TimeGrid,
    tolerance: Option<f64>,
) -> Result<IntegrabilityReport> {
    field.validate()?;
    let (gamma, resolved_tol) = match choice {
        GammaChoice::Fixed(g) => {
            validate_gamma(g)?;
            (Some(GammaSolution::new(g, 0.0)?), tolerance)
        }
        GammaChoice::Auto => {
            let track = match field.to_polar_track(grid) {
                Ok(t) => t,
                Err(Error::DegenerateField(_)) => {
                    return Ok(IntegrabilityReport {
                        gamma: None,
                        r_algebraic_1: 0.0,
                        r_algebraic_2: 0.0,
                        r_differential: 0.0,
                        d_samples: Vec::new(),
                        verdict: Verdict::Degenerate,
                        tolerance: tolerance.unwrap_or(0.0),
                    })
                }
                Err(e) => return Err(e),
            };
            let resolved = tolerance.unwrap_or_else(|| default_residual_tolerance(&track));
            if track.is_all_degenerate() {
                return Ok(IntegrabilityReport {
                    gamma: None,
                    r_algebraic_1: 0.0,
                    r_algebraic_2: 0.0,
                    r_differential: 0.0,
                    d_samples: Vec::new(),
                    verdict: Verdict::Degenerate,
                    tolerance: resolved,
                });
            }
            (solve_gamma(&track, GAMMA_CONSTANCY_TOL)?, Some(resolved))
        }
    };
    match gamma {
        Some(sol) => {
            let mut report = check_integrability(field, sol.gamma(), grid, resolved_tol)?;
            report.gamma = Some(sol);
            Ok(report)
        }
        None => Ok(IntegrabilityReport {
            gamma: None,
            r_algebraic_1: f64::INFINITY,
            r_algebraic_2: f64::INFINITY,
            r_differential: f64::INFINITY,
            d_samples: Vec::new(),
            verdict: Verdict::NotIntegrable,
            tolerance: resolved_tol.unwrap_or(0.0),
        }),
    }
}

/// The azimuth of a field as a scalar program, continuous in `t`.
fn phi_program(field: &FieldSpec, grid: &TimeGrid) -> Result<Program> {
    match field {
        FieldSpec::Rotating { omega, phi0, .. } => Ok(Program::Linear {
            v0: *phi0,
            slope: *omega,
        }),
        FieldSpec::Polar { b, theta, phi } => {
            // the azimuth program is only the field azimuth while the polar
            // data stays canonical; outside that domain phi would be off by
            // pi wherever B < 0, silently breaking the frame curve
            for t in grid.nodes() {
                let bv = b.value(t)?;
                let th = theta.value(t)?;
                if bv < 0.0 || !(0.0..=std::f64::consts::PI).contains(&th) {
                    return Err(Error::InvalidArgument(format!(
                        "polar programs must keep B >= 0 and theta in [0, pi]; \
                         got B = {bv}, theta = {th} at t = {t}"
                    )));
                }
            }
            Ok(phi.clone())
        }
        FieldSpec::Constant { bx, by, .. } => Ok(Program::Const {
            value: by.atan2(*bx),
        }),
        FieldSpec::CartesianTable { .. } => {
            let track = field.to_polar_track(grid)?;
            Ok(Program::Table {
                times: track.samples().iter().map(|s| s.t).collect(),
                values: track.samples().iter().map(|s| s.phi).collect(),
            })
        }
    }
}

/// The connecting curve `t -> A_gamma(phi(t))` of an integrable pair,
/// i.e. `gbar(t) = exp(gamma sin(phi) a1 - gamma cos(phi) a2)`.
///
/// Fails with `NotIntegrable` when `(field, gamma)` does not pass
/// [`check_integrability`] on `grid`.
pub fn connecting_curve(
    field: &FieldSpec,
    gamma: f64,
    grid: &TimeGrid,
    tolerance: Option<f64>,
) -> Result<AGammaCurve> {
    let report = check_integrability(field, gamma, grid, tolerance)?;
    if report.verdict != Verdict::Integrable {
        return Err(Error::NotIntegrable(format!(
            "residuals (r1, r2, r_diff) = ({:.3e}, {:.3e}, {:.3e}) exceed tolerance {:.3e}",
            report.r_algebraic_1, report.r_algebraic_2, report.r_differential, report.tolerance
        )));
    }
    AGammaCurve::new(gamma, phi_program(field, grid)?)
}

/// How `Theta(t) = int D` is evaluated.
#[derive(Debug, Clone)]
enum ThetaIntegral {
    /// `D(t)` has a closed-form program; `Theta` is its exact antiderivative.
    Closed(Program),
    /// Composite-Simpson cumulative values at the grid nodes, with a local
    /// Simpson correction for off-node times.
    Simpson { times: Vec<f64>, cumulative: Vec<f64> },
}

/// The closed-form propagator `U(t) = W(t) exp(-i Theta(t) Sz) W(t0)^{-1}`
/// of an integrable pair, in the spin-j representation.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    field: FieldSpec,
    gamma: f64,
    ops: SpinOperators,
    curve: AGammaCurve,
    theta: ThetaIntegral,
    theta_origin: f64,
    t0: f64,
    w0_inv: UnitaryMatrix,
}

/// Builds the exact propagator after checking integrability of
/// `(field, gamma)` on `grid`.
pub fn exact_propagator(
    field: &FieldSpec,
    gamma: f64,
    j: SpinQuantumNumber,
    grid: &TimeGrid,
    tolerance: Option<f64>,
) -> Result<ExactPropagator> {
    let curve = connecting_curve(field, gamma, grid, tolerance)?;
    build_propagator(field, gamma, j, grid, curve)
}

/// Builds the propagator without the integrability check.
///
/// The closed form is only a solution of the Schroedinger equation when the
/// conditions hold; this entry point exists to let diagnostics demonstrate
/// the failure against the numerical oracle.
pub fn exact_propagator_unchecked(
    field: &FieldSpec,
    gamma: f64,
    j: SpinQuantumNumber,
    grid: &TimeGrid,
) -> Result<ExactPropagator> {
    validate_gamma(gamma)?;
    let curve = AGammaCurve::new(gamma, phi_program(field, grid)?)?;
    build_propagator(field, gamma, j, grid, curve)
}

fn build_propagator(
    field: &FieldSpec,
    gamma: f64,
    j: SpinQuantumNumber,
    grid: &TimeGrid,
    curve: AGammaCurve,
) -> Result<ExactPropagator> {
    let ops = build_spin_operators(j);
    let theta = build_theta_integral(field, gamma, grid)?;
    let theta_origin = match &theta {
        ThetaIntegral::Closed(d) => d.integral(grid.t0())?,
        ThetaIntegral::Simpson { .. } => 0.0,
    };
    let w0_inv = represent(&curve.element_at(grid.t0())?, &ops)?;
    Ok(ExactPropagator {
        field: field.clone(),
        gamma,
        ops,
        curve,
        theta,
        theta_origin,
        t0: grid.t0(),
        w0_inv,
    })
}

fn pointwise_d(field: &FieldSpec, gamma: f64, t: f64) -> Result<f64> {
    let [bx, by, bz] = field.eval_cartesian(t)?;
    let b = (bx * bx + by * by + bz * bz).sqrt();
    if b == 0.0 {
        return Ok(0.0);
    }
    let theta = (bz / b).clamp(-1.0, 1.0).acos();
    compute_d(b, theta, gamma)
}

fn build_theta_integral(field: &FieldSpec, gamma: f64, grid: &TimeGrid) -> Result<ThetaIntegral> {
    let half_cos = (0.5 * gamma).cos();
    match field {
        FieldSpec::Constant { .. } | FieldSpec::Rotating { .. } => {
            // constant modulus and inclination: D is a constant
            let d = pointwise_d(field, gamma, grid.t0())?;
            Ok(ThetaIntegral::Closed(Program::Const { value: d }))
        }
        FieldSpec::Polar { b, theta, .. } => match (b, theta) {
            (_, Program::Const { value: th0 }) if b.is_analytic() => {
                let k = (0.5 * gamma + th0).cos() / half_cos;
                Ok(ThetaIntegral::Closed(b.scaled(k)))
            }
            (Program::Const { value: b0 }, Program::Linear { v0, slope })
                if slope.abs() > 1e-300 =>
            {
                // D(t) = (B/cos(g/2)) cos(g/2 + th0 + s t), a sinusoid
                Ok(ThetaIntegral::Closed(Program::Sinusoid {
                    amp: b0 / half_cos,
                    freq: *slope,
                    phase: 0.5 * gamma + v0 + std::f64::consts::FRAC_PI_2,
                    offset: 0.0,
                }))
            }
            _ => simpson_theta(field, gamma, grid),
        },
        FieldSpec::CartesianTable { .. } => simpson_theta(field, gamma, grid),
    }
}

fn simpson_theta(field: &FieldSpec, gamma: f64, grid: &TimeGrid) -> Result<ThetaIntegral> {
    let mut cumulative = Vec::with_capacity(grid.len());
    cumulative.push(0.0);
    let h = grid.step();
    let mut acc = 0.0;
    let mut d_left = pointwise_d(field, gamma, grid.t0())?;
    for i in 0..grid.steps() {
        let d_mid = pointwise_d(field, gamma, grid.midpoint(i))?;
        let d_right = pointwise_d(field, gamma, grid.node(i + 1))?;
        acc += h / 6.0 * (d_left + 4.0 * d_mid + d_right);
        cumulative.push(acc);
        d_left = d_right;
    }
    Ok(ThetaIntegral::Simpson {
        times: grid.nodes().collect(),
        cumulative,
    })
}

impl ExactPropagator {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn spin(&self) -> SpinQuantumNumber {
        self.ops.j()
    }

    pub fn operators(&self) -> &SpinOperators {
        &self.ops
    }

    pub fn connecting_curve(&self) -> &AGammaCurve {
        &self.curve
    }

    /// `Theta(t) = int_{t0}^{t} D(s) ds`.
    pub fn theta_at(&self, t: f64) -> Result<f64> {
        match &self.theta {
            ThetaIntegral::Closed(d) => Ok(d.integral(t)? - self.theta_origin),
            ThetaIntegral::Simpson { times, cumulative } => {
                let (first, last) = (times[0], *times.last().unwrap());
                if t < first || t > last {
                    return Err(Error::OutOfRange(format!(
                        "Theta tabulated on [{first}, {last}], asked at {t}"
                    )));
                }
                let i = times.partition_point(|&x| x <= t).clamp(1, times.len() - 1) - 1;
                let t_i = times[i];
                if t == t_i {
                    return Ok(cumulative[i]);
                }
                let d0 = pointwise_d(&self.field, self.gamma, t_i)?;
                let dm = pointwise_d(&self.field, self.gamma, 0.5 * (t_i + t))?;
                let d1 = pointwise_d(&self.field, self.gamma, t)?;
                Ok(cumulative[i] + (t - t_i) / 6.0 * (d0 + 4.0 * dm + d1))
            }
        }
    }

    /// `D(t)`.
    pub fn d_at(&self, t: f64) -> Result<f64> {
        pointwise_d(&self.field, self.gamma, t)
    }

    /// The propagator matrix at time `t`; `U(t0) = I` to rounding.
    pub fn unitary_at(&self, t: f64) -> Result<UnitaryMatrix> {
        let gbar = self.curve.element_at(t)?;
        let w = represent(&gbar.inverse(), &self.ops)?;
        let rotation = self.ops.exp_z(self.theta_at(t)?);
        UnitaryMatrix::new(w.matrix() * rotation.matrix() * self.w0_inv.matrix())
    }

    /// Samples the propagator (applied to `init`) on a grid, producing a
    /// result comparable with the oracle schemes.
    pub fn propagate(&self, init: Initial, grid: &TimeGrid) -> Result<PropagationResult> {
        let dim = self.ops.dimension();
        let psi0 = match init {
            Initial::State(psi) => {
                if psi.len() != dim {
                    return Err(Error::InvalidArgument(format!(
                        "state dimension {} does not match spin dimension {dim}",
                        psi.len()
                    )));
                }
                let n = psi.norm();
                if (n - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidArgument(format!(
                        "initial state norm {n} is not 1"
                    )));
                }
                Some(psi)
            }
            Initial::Identity => None,
        };
        let mut samples = Vec::with_capacity(grid.len());
        for t in grid.nodes() {
            let u = self.unitary_at(t)?;
            samples.push(match &psi0 {
                Some(psi) => {
                    let col = u.matrix() * psi;
                    nalgebra::DMatrix::from_columns(&[col.column(0)])
                }
                None => u.into_inner(),
            });
        }
        Ok(PropagationResult::new(
            grid.nodes().collect(),
            samples,
            Scheme::ClosedForm,
            grid.step(),
        ))
    }

    /// Initial time of the propagator (where `U = I`).
    pub fn t0(&self) -> f64 {
        self.t0
    }
}
