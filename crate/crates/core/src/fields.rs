//! Time-dependent magnetic field specifications, evaluation, and polar
//! decomposition.
//!
//! Fields are given in Cartesian components `(Bx, By, Bz)` or in polar form
//! `B (sin th cos phi, sin th sin phi, cos th)` with `B >= 0`, `th in [0, pi]`
//! and an unwrapped azimuth `phi` on the whole real line. The azimuth is
//! never reduced mod 2*pi: the integrability analysis constrains `d(phi)/dt`
//! and needs a continuous branch.

use crate::error::{Error, Result};
use crate::grid::TimeGrid;

/// Relative threshold below which `B sin th` counts as degenerate (azimuth
/// undefined).
const DEGENERATE_REL: f64 = 1e-12;

/// A scalar function of time with closed-form value, derivative and
/// antiderivative where the shape allows it.
#[derive(Debug, Clone, PartialEq)]
pub enum Program {
    Const {
        value: f64,
    },
    Linear {
        v0: f64,
        slope: f64,
    },
    /// `amp * sin(freq * t + phase) + offset`
    Sinusoid {
        amp: f64,
        freq: f64,
        phase: f64,
        offset: f64,
    },
    /// Piecewise-linear interpolation of samples at strictly increasing times.
    Table {
        times: Vec<f64>,
        values: Vec<f64>,
    },
    /// Pointwise sum of sub-programs; closed forms compose term by term.
    Sum(Vec<Program>),
}

impl Program {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidArgument("non-finite program parameter".into()))
            }
        };
        match self {
            Program::Const { value } => finite(*value),
            Program::Linear { v0, slope } => {
                finite(*v0)?;
                finite(*slope)
            }
            Program::Sinusoid {
                amp,
                freq,
                phase,
                offset,
            } => {
                finite(*amp)?;
                finite(*freq)?;
                finite(*phase)?;
                finite(*offset)
            }
            Program::Table { times, values } => {
                if times.len() != values.len() {
                    return Err(Error::InvalidArgument(
                        "table times and values differ in length".into(),
                    ));
                }
                if times.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "table needs at least two samples".into(),
                    ));
                }
                for w in times.windows(2) {
                    if w[1] <= w[0] {
                        return Err(Error::InvalidArgument(
                            "table times must be strictly increasing".into(),
                        ));
                    }
                }
                for &v in times.iter().chain(values.iter()) {
                    finite(v)?;
                }
                Ok(())
            }
            Program::Sum(terms) => {
                if terms.is_empty() {
                    return Err(Error::InvalidArgument("empty program sum".into()));
                }
                terms.iter().try_for_each(Program::validate)
            }
        }
    }

    /// Index of the table segment containing `t`.
    fn segment(times: &[f64], t: f64) -> Result<usize> {
        let (first, last) = (times[0], *times.last().unwrap());
        if t < first || t > last {
            return Err(Error::OutOfRange(format!(
                "t = {t} outside table range [{first}, {last}]"
            )));
        }
        // partition_point returns the first index with times[i] > t
        let i = times.partition_point(|&x| x <= t);
        Ok(i.clamp(1, times.len() - 1) - 1)
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        match self {
            Program::Const { value } => Ok(*value),
            Program::Linear { v0, slope } => Ok(v0 + slope * t),
            Program::Sinusoid {
                amp,
                freq,
                phase,
                offset,
            } => Ok(amp * (freq * t + phase).sin() + offset),
            Program::Table { times, values } => {
                let i = Self::segment(times, t)?;
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                Ok(values[i] * (1.0 - w) + values[i + 1] * w)
            }
            Program::Sum(terms) => terms.iter().map(|p| p.value(t)).sum(),
        }
    }

    /// Time derivative. Analytic except for tables, which return the slope of
    /// the containing segment (first-order accurate).
    pub fn derivative(&self, t: f64) -> Result<f64> {
        match self {
            Program::Const { .. } => Ok(0.0),
            Program::Linear { slope, .. } => Ok(*slope),
            Program::Sinusoid {
                amp, freq, phase, ..
            } => Ok(amp * freq * (freq * t + phase).cos()),
            Program::Table { times, values } => {
                let i = Self::segment(times, t)?;
                Ok((values[i + 1] - values[i]) / (times[i + 1] - times[i]))
            }
            Program::Sum(terms) => terms.iter().map(|p| p.derivative(t)).sum(),
        }
    }

    /// Antiderivative `int_0^t`, exact for the analytic shapes and exact for
    /// the interpolant in the table case (which must cover both 0 and `t`).
    pub fn integral(&self, t: f64) -> Result<f64> {
        match self {
            Program::Const { value } => Ok(value * t),
            Program::Linear { v0, slope } => Ok(v0 * t + 0.5 * slope * t * t),
            Program::Sinusoid {
                amp,
                freq,
                phase,
                offset,
            } => {
                if freq.abs() < 1e-300 {
                    // constant amp*sin(phase) + offset
                    Ok((amp * phase.sin() + offset) * t)
                } else {
                    Ok(offset * t - amp / freq * ((freq * t + phase).cos() - phase.cos()))
                }
            }
            Program::Table { times, values } => {
                let trapezoid_to = |t: f64| -> Result<f64> {
                    let i = Self::segment(times, t)?;
                    let mut acc = 0.0;
                    for k in 0..i {
                        acc += 0.5 * (values[k] + values[k + 1]) * (times[k + 1] - times[k]);
                    }
                    let v_t = self.value(t)?;
                    acc += 0.5 * (values[i] + v_t) * (t - times[i]);
                    Ok(acc)
                };
                Ok(trapezoid_to(t)? - trapezoid_to(0.0)?)
            }
            Program::Sum(terms) => terms.iter().map(|p| p.integral(t)).sum(),
        }
    }

    /// The program multiplied by a constant.
    pub fn scaled(&self, k: f64) -> Program {
        match self {
            Program::Const { value } => Program::Const { value: k * value },
            Program::Linear { v0, slope } => Program::Linear {
                v0: k * v0,
                slope: k * slope,
            },
            Program::Sinusoid {
                amp,
                freq,
                phase,
                offset,
            } => Program::Sinusoid {
                amp: k * amp,
                freq: *freq,
                phase: *phase,
                offset: k * offset,
            },
            Program::Table { times, values } => Program::Table {
                times: times.clone(),
                values: values.iter().map(|v| k * v).collect(),
            },
            Program::Sum(terms) => Program::Sum(terms.iter().map(|p| p.scaled(k)).collect()),
        }
    }

    /// True when value/derivative/integral are closed-form (no tables).
    pub fn is_analytic(&self) -> bool {
        match self {
            Program::Const { .. } | Program::Linear { .. } | Program::Sinusoid { .. } => true,
            Program::Table { .. } => false,
            Program::Sum(terms) => terms.iter().all(Program::is_analytic),
        }
    }
}

/// A time-dependent magnetic field.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Constant {
        bx: f64,
        by: f64,
        bz: f64,
    },
    /// Constant modulus rotating about the z axis:
    /// `B (sin th cos(w t + phi0), sin th sin(w t + phi0), cos th)`.
    Rotating {
        b: f64,
        theta: f64,
        omega: f64,
        phi0: f64,
    },
    /// Polar components given by scalar programs.
    Polar {
        b: Program,
        theta: Program,
        phi: Program,
    },
    /// Cartesian components tabulated at strictly increasing times, linearly
    /// interpolated.
    CartesianTable {
        times: Vec<f64>,
        bx: Vec<f64>,
        by: Vec<f64>,
        bz: Vec<f64>,
    },
}

impl FieldSpec {
    /// The standard rotating-field example used throughout the tests:
    /// `B = 1, theta = pi/3, omega = 1/2, phi0 = 0`.
    pub fn rotating_example() -> Self {
        FieldSpec::Rotating {
            b: 1.0,
            theta: std::f64::consts::FRAC_PI_3,
            omega: 0.5,
            phi0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Constant { bx, by, bz } => {
                if [bx, by, bz].iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument("non-finite constant field".into()))
                }
            }
            FieldSpec::Rotating {
                b,
                theta,
                omega,
                phi0,
            } => {
                if ![b, theta, omega, phi0].iter().all(|v| v.is_finite()) {
                    return Err(Error::InvalidArgument(
                        "non-finite rotating-field parameter".into(),
                    ));
                }
                if *b < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "rotating field needs B >= 0, got {b}"
                    )));
                }
                if !(0.0..=std::f64::consts::PI).contains(theta) {
                    return Err(Error::InvalidArgument(format!(
                        "rotating field needs theta in [0, pi], got {theta}"
                    )));
                }
                Ok(())
            }
            FieldSpec::Polar { b, theta, phi } => {
                b.validate()?;
                theta.validate()?;
                phi.validate()
            }
            FieldSpec::CartesianTable { times, bx, by, bz } => {
                if times.len() < 2 {
                    return Err(Error::InvalidArgument(
                        "field table needs at least two samples".into(),
                    ));
                }
                if bx.len() != times.len() || by.len() != times.len() || bz.len() != times.len() {
                    return Err(Error::InvalidArgument(
                        "field table component lengths differ from times".into(),
                    ));
                }
                for w in times.windows(2) {
                    if w[1] <= w[0] {
                        return Err(Error::InvalidArgument(
                            "field table times must be strictly increasing".into(),
                        ));
                    }
                }
                for &v in times.iter().chain(bx).chain(by).chain(bz) {
                    if !v.is_finite() {
                        return Err(Error::InvalidArgument("non-finite table entry".into()));
                    }
                }
                Ok(())
            }
        }
    }

    /// Cartesian components at time `t`.
    pub fn eval_cartesian(&self, t: f64) -> Result<[f64; 3]> {
        match self {
            FieldSpec::Constant { bx, by, bz } => Ok([*bx, *by, *bz]),
            FieldSpec::Rotating {
                b,
                theta,
                omega,
                phi0,
            } => {
                let phi = omega * t + phi0;
                Ok([
                    b * theta.sin() * phi.cos(),
                    b * theta.sin() * phi.sin(),
                    b * theta.cos(),
                ])
            }
            FieldSpec::Polar { b, theta, phi } => {
                let (bv, th, ph) = (b.value(t)?, theta.value(t)?, phi.value(t)?);
                Ok([
                    bv * th.sin() * ph.cos(),
                    bv * th.sin() * ph.sin(),
                    bv * th.cos(),
                ])
            }
            FieldSpec::CartesianTable { times, bx, by, bz } => {
                let i = Program::segment(times, t)?;
                let w = (t - times[i]) / (times[i + 1] - times[i]);
                let lerp = |v: &[f64]| v[i] * (1.0 - w) + v[i + 1] * w;
                Ok([lerp(bx), lerp(by), lerp(bz)])
            }
        }
    }

    /// `|B(t)|`.
    pub fn magnitude(&self, t: f64) -> Result<f64> {
        let [bx, by, bz] = self.eval_cartesian(t)?;
        Ok((bx * bx + by * by + bz * bz).sqrt())
    }

    /// Azimuth rate `d(phi)/dt` at `t`. Analytic for the rotating and
    /// analytic-polar shapes, central finite differences with step
    /// `1e-6 * max(1, |t|)` otherwise. Fails where the azimuth is undefined.
    pub fn phi_dot(&self, t: f64) -> Result<f64> {
        self.require_azimuth(t)?;
        match self {
            FieldSpec::Constant { .. } => Ok(0.0),
            FieldSpec::Rotating { omega, .. } => Ok(*omega),
            FieldSpec::Polar { phi, .. } => phi.derivative(t),
            FieldSpec::CartesianTable { times, .. } => {
                let h = 1e-6 * t.abs().max(1.0);
                // stay inside the table, falling back to one-sided differences
                let (first, last) = (times[0], *times.last().unwrap());
                let (ta, tb) = if t - h < first {
                    (t, (t + h).min(last))
                } else if t + h > last {
                    ((t - h).max(first), t)
                } else {
                    (t - h, t + h)
                };
                if tb <= ta {
                    return Err(Error::OutOfRange(format!(
                        "cannot differentiate azimuth at t = {t}"
                    )));
                }
                let pa = self.azimuth_at(ta)?;
                let pb = self.azimuth_at(tb)?;
                let mut d = pb - pa;
                // nearest branch
                d -= (d / std::f64::consts::TAU).round() * std::f64::consts::TAU;
                Ok(d / (tb - ta))
            }
        }
    }

    fn azimuth_at(&self, t: f64) -> Result<f64> {
        let [bx, by, _] = self.eval_cartesian(t)?;
        Ok(by.atan2(bx))
    }

    /// Errors unless the transverse component `B sin th` is resolvably
    /// nonzero at `t`.
    fn require_azimuth(&self, t: f64) -> Result<()> {
        let [bx, by, _] = self.eval_cartesian(t)?;
        let rho = (bx * bx + by * by).sqrt();
        let scale = self.magnitude(t)?.max(1.0);
        if rho <= DEGENERATE_REL * scale {
            return Err(Error::DegenerateField(format!(
                "azimuth undefined near t = {t} (transverse component {rho:.3e})"
            )));
        }
        Ok(())
    }

    /// Polar decomposition of the field sampled on `grid`.
    ///
    /// The azimuth is unwrapped so consecutive samples differ by less than
    /// pi; where `B sin th` falls below `1e-12 * max |B|` the previous
    /// azimuth is carried forward and the sample is flagged degenerate.
    /// Fails only when the field magnitude vanishes on the whole grid.
    pub fn to_polar_track(&self, grid: &TimeGrid) -> Result<PolarTrack> {
        let times: Vec<f64> = grid.nodes().collect();
        let cart: Vec<[f64; 3]> = times
            .iter()
            .map(|&t| self.eval_cartesian(t))
            .collect::<Result<_>>()?;
        let max_b = cart
            .iter()
            .map(|b| (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt())
            .fold(0.0, f64::max);
        if max_b == 0.0 {
            return Err(Error::DegenerateField(
                "field magnitude vanishes on the whole grid".into(),
            ));
        }
        let eps = DEGENERATE_REL * max_b;

        let mut samples = Vec::with_capacity(times.len());
        let mut prev_phi: Option<f64> = None;
        for (&t, b) in times.iter().zip(cart.iter()) {
            let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
            let rho = (b[0] * b[0] + b[1] * b[1]).sqrt();
            let degenerate = rho < eps;
            let theta = if norm < eps {
                0.0
            } else {
                (b[2] / norm).clamp(-1.0, 1.0).acos()
            };
            let phi = if degenerate {
                prev_phi.unwrap_or(0.0)
            } else {
                let raw = b[1].atan2(b[0]);
                match prev_phi {
                    None => raw,
                    Some(p) => raw + ((p - raw) / std::f64::consts::TAU).round() * std::f64::consts::TAU,
                }
            };
            prev_phi = Some(phi);
            let phi_dot = if degenerate { 0.0 } else { self.phi_dot(t)? };
            samples.push(PolarSample {
                t,
                b: norm,
                theta,
                phi,
                phi_dot,
                degenerate,
            });
        }

        // carry the first defined azimuth backwards over a degenerate prefix
        if let Some(first) = samples.iter().position(|s| !s.degenerate) {
            let phi0 = samples[first].phi;
            for s in samples.iter_mut().take(first) {
                s.phi = phi0;
            }
        }

        Ok(PolarTrack { samples, max_b })
    }
}

/// One sample of a field in polar form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarSample {
    pub t: f64,
    /// Magnitude `|B| >= 0`.
    pub b: f64,
    /// Inclination in `[0, pi]`.
    pub theta: f64,
    /// Unwrapped azimuth (real line, continuous across samples).
    pub phi: f64,
    /// Azimuth rate; 0 at degenerate samples.
    pub phi_dot: f64,
    /// Azimuth undefined here; `phi` carried from the previous sample.
    pub degenerate: bool,
}

impl PolarSample {
    /// Cartesian components reconstructed from the polar data.
    pub fn to_cartesian(&self) -> [f64; 3] {
        [
            self.b * self.theta.sin() * self.phi.cos(),
            self.b * self.theta.sin() * self.phi.sin(),
            self.b * self.theta.cos(),
        ]
    }
}

/// A field decomposed into polar samples along a grid.
#[derive(Debug, Clone)]
pub struct PolarTrack {
    samples: Vec<PolarSample>,
    max_b: f64,
}

impl PolarTrack {
    pub fn samples(&self) -> &[PolarSample] {
        &self.samples
    }

    pub fn max_b(&self) -> f64 {
        self.max_b
    }

    pub fn non_degenerate(&self) -> impl Iterator<Item = &PolarSample> {
        self.samples.iter().filter(|s| !s.degenerate)
    }

    pub fn is_all_degenerate(&self) -> bool {
        self.samples.iter().all(|s| s.degenerate)
    }

    /// Largest `|phi_dot|` over the defined samples.
    pub fn max_phi_dot(&self) -> f64 {
        self.non_degenerate()
            .map(|s| s.phi_dot.abs())
            .fold(0.0, f64::max)
    }
}
