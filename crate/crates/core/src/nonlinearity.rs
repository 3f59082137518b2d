//! Scalar nonlinearities `f`, the increment map `ψ(t) = t − λ f(t)` and its inverse.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::solve_increasing;

/// Default tolerance of [`PsiMap::inverse`].
pub const DEFAULT_INVERSE_TOL: f64 = 1e-12;

const CLASS_SAMPLES: usize = 1000;
const CLASS_SEED: u64 = 0x5eed_f1f2;

/// Declared class of a nonlinearity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NonlinearityClass {
    /// Continuous, nonincreasing, `f(0) = 0`.
    F1,
    /// Lipschitz with a known constant, `f(0) = 0`.
    F2,
}

/// Named Lipschitz shapes `f(s) = L·shape(s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LipschitzShape {
    Sin,
    Tanh,
    Atan,
    /// `f(s) = L s`, linear growth.
    Linear,
}

impl LipschitzShape {
    fn eval(self, s: f64) -> f64 {
        match self {
            LipschitzShape::Sin => s.sin(),
            LipschitzShape::Tanh => s.tanh(),
            LipschitzShape::Atan => s.atan(),
            LipschitzShape::Linear => s,
        }
    }

    fn derivative(self, s: f64) -> f64 {
        match self {
            LipschitzShape::Sin => s.cos(),
            LipschitzShape::Tanh => 1.0 - s.tanh().powi(2),
            LipschitzShape::Atan => 1.0 / (1.0 + s * s),
            LipschitzShape::Linear => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LipschitzShape::Sin => "sin",
            LipschitzShape::Tanh => "tanh",
            LipschitzShape::Atan => "atan",
            LipschitzShape::Linear => "linear",
        }
    }
}

impl FromStr for LipschitzShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sin" => Ok(LipschitzShape::Sin),
            "tanh" => Ok(LipschitzShape::Tanh),
            "atan" => Ok(LipschitzShape::Atan),
            "linear" => Ok(LipschitzShape::Linear),
            other => Err(Error::InvalidParameter(format!("unknown Lipschitz shape `{other}`"))),
        }
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Zero,
    Linear,
    Power { q: f64 },
    Lipschitz { shape: LipschitzShape },
    User { name: String, f: ScalarFn, df: Option<ScalarFn> },
}

/// A scalar nonlinearity with its declared class.
#[derive(Clone)]
pub struct Nonlinearity {
    kind: Kind,
    class: NonlinearityClass,
    lipschitz: Option<f64>,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Nonlinearity")
            .field("kind", &self.to_string())
            .field("class", &self.class)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl Nonlinearity {
    /// `f ≡ 0`.
    pub fn zero() -> Self {
        Nonlinearity { kind: Kind::Zero, class: NonlinearityClass::F1, lipschitz: Some(0.0) }
    }

    /// `f(s) = −s`; class F1, also Lipschitz with `L = 1`.
    pub fn linear() -> Self {
        Nonlinearity { kind: Kind::Linear, class: NonlinearityClass::F1, lipschitz: Some(1.0) }
    }

    /// Power absorption `f(s) = −s|s|^{q−1}`, class F1 for every `q > 0`.
    pub fn power_absorption(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("power absorption needs q > 0, got {q}")));
        }
        let lipschitz = (q == 1.0).then_some(1.0);
        Ok(Nonlinearity { kind: Kind::Power { q }, class: NonlinearityClass::F1, lipschitz })
    }

    /// `f(s) = L·shape(s)`, class F2 with constant `L`.
    pub fn lipschitz(shape: LipschitzShape, l: f64) -> Result<Self> {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::InvalidParameter(format!("Lipschitz constant must be ≥ 0, got {l}")));
        }
        Ok(Nonlinearity { kind: Kind::Lipschitz { shape }, class: NonlinearityClass::F2, lipschitz: Some(l) })
    }

    /// A user-supplied nonlinearity. The declared class is spot-checked on
    /// 1000 seeded random pairs and `f(0) = 0` is required exactly.
    pub fn user(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        derivative: Option<ScalarFn>,
        class: NonlinearityClass,
        lipschitz: Option<f64>,
    ) -> Result<Self> {
        if class == NonlinearityClass::F2 && lipschitz.is_none() {
            return Err(Error::MissingLipschitz);
        }
        if let Some(l) = lipschitz {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidParameter(format!("Lipschitz constant must be ≥ 0, got {l}")));
            }
        }
        let nl = Nonlinearity {
            kind: Kind::User { name: name.into(), f: Arc::new(f), df: derivative },
            class,
            lipschitz,
        };
        nl.check_class()?;
        Ok(nl)
    }

    /// The same function redeclared as class F2 with constant `l`. Fails if the
    /// function is not known to be `l`-Lipschitz.
    pub fn as_lipschitz(&self, l: f64) -> Result<Self> {
        match self.lipschitz {
            Some(known) if known <= l => Ok(Nonlinearity { class: NonlinearityClass::F2, lipschitz: Some(l), ..self.clone() }),
            _ => {
                let nl = Nonlinearity { class: NonlinearityClass::F2, lipschitz: Some(l), ..self.clone() };
                nl.check_class()?;
                Ok(nl)
            }
        }
    }

    fn check_class(&self) -> Result<()> {
        let f0 = self.eval(0.0);
        if f0 != 0.0 {
            return Err(Error::ClassViolation(format!("f(0) = {f0}, expected 0")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(CLASS_SEED);
        let sample = |rng: &mut ChaCha8Rng| -> f64 {
            if rng.random_bool(0.5) {
                rng.random_range(-10.0..10.0)
            } else {
                let mag = 10f64.powf(rng.random_range(-6.0..6.0));
                if rng.random_bool(0.5) { mag } else { -mag }
            }
        };
        for _ in 0..CLASS_SAMPLES {
            let (a, b) = (sample(&mut rng), sample(&mut rng));
            let (s, t) = if a >= b { (a, b) } else { (b, a) };
            let (fs, ft) = (self.eval(s), self.eval(t));
            if !fs.is_finite() || !ft.is_finite() {
                return Err(Error::ClassViolation(format!("f is not finite at {s} or {t}")));
            }
            let slack = 1e-12 * (1.0 + fs.abs() + ft.abs());
            match self.class {
                NonlinearityClass::F1 => {
                    if fs - ft > slack {
                        return Err(Error::ClassViolation(format!(
                            "f increases between {t} and {s}: {ft} < {fs}"
                        )));
                    }
                }
                NonlinearityClass::F2 => {
                    let l = self.lipschitz.expect("F2 carries L");
                    if (fs - ft).abs() > l * (s - t) * (1.0 + 1e-9) + slack {
                        return Err(Error::ClassViolation(format!(
                            "|f({s}) − f({t})| exceeds L·|s−t| with L = {l}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: f64) -> f64 {
        match &self.kind {
            Kind::Zero => 0.0,
            Kind::Linear => -s,
            Kind::Power { q } => -crate::graph::signed_power(s, *q),
            Kind::Lipschitz { shape } => self.lipschitz.unwrap_or(0.0) * shape.eval(s),
            Kind::User { f, .. } => f(s),
        }
    }

    /// `f'(s)` when known. For power absorption with `q < 1` this is `−∞` at 0.
    pub fn derivative(&self, s: f64) -> Option<f64> {
        match &self.kind {
            Kind::Zero => Some(0.0),
            Kind::Linear => Some(-1.0),
            Kind::Power { q } => Some(if s == 0.0 {
                if *q < 1.0 {
                    f64::NEG_INFINITY
                } else if *q == 1.0 {
                    -1.0
                } else {
                    0.0
                }
            } else {
                -q * s.abs().powf(q - 1.0)
            }),
            Kind::Lipschitz { shape } => Some(self.lipschitz.unwrap_or(0.0) * shape.derivative(s)),
            Kind::User { df, .. } => df.as_ref().map(|d| d(s)),
        }
    }

    pub fn has_derivative(&self) -> bool {
        !matches!(&self.kind, Kind::User { df: None, .. })
    }

    pub fn class(&self) -> NonlinearityClass {
        self.class
    }

    /// Known Lipschitz constant (always present for class F2).
    pub fn lipschitz_constant(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, Kind::Linear) || matches!(self.kind, Kind::Power { q } if q == 1.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, Kind::Zero)
    }

    /// Exponent `q` when `f` is power absorption (linear counts as `q = 1`).
    pub fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            Kind::Power { q } => Some(q),
            Kind::Linear => Some(1.0),
            _ => None,
        }
    }

    /// Constant of the a-priori bound `‖u‖_p ≤ C‖g‖_p` at step `λ`.
    pub fn apriori_constant(&self, lambda: f64) -> Result<f64> {
        match self.class {
            NonlinearityClass::F1 => Ok(1.0),
            NonlinearityClass::F2 => {
                let l = self.lipschitz.ok_or(Error::MissingLipschitz)?;
                if lambda * l >= 1.0 {
                    return Err(Error::StepTooLarge { lambda, lipschitz: l });
                }
                Ok(1.0 / (1.0 - lambda * l))
            }
        }
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Zero => write!(f, "zero"),
            Kind::Linear => write!(f, "linear"),
            Kind::Power { q } => write!(f, "power:q={q}"),
            Kind::Lipschitz { shape } => write!(f, "lipschitz:{}:L={}", shape.name(), self.lipschitz.unwrap_or(0.0)),
            Kind::User { name, .. } => write!(f, "user:{name}"),
        }
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;

    /// `zero`, `linear`, `power:q=<real>` or `lipschitz:<name>:L=<real>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse nonlinearity `{s}`"));
        let number = |v: &str| v.trim().parse::<f64>().map_err(|_| bad());
        match s {
            "zero" => return Ok(Nonlinearity::zero()),
            "linear" => return Ok(Nonlinearity::linear()),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("power:") {
            let q = rest.strip_prefix("q=").ok_or_else(bad)?;
            return Nonlinearity::power_absorption(number(q)?);
        }
        if let Some(rest) = s.strip_prefix("lipschitz:") {
            let (name, l) = rest.split_once(':').ok_or(Error::MissingLipschitz)?;
            let l = l.strip_prefix("L=").ok_or(Error::MissingLipschitz)?;
            return Nonlinearity::lipschitz(name.parse()?, number(l)?);
        }
        Err(bad())
    }
}

/// The increment map `ψ(t) = t − λ f(t)` of a nonlinearity at step `λ`.
#[derive(Clone, Debug)]
pub struct PsiMap {
    nl: Nonlinearity,
    lambda: f64,
}

impl PsiMap {
    /// Fails if `λ < 0`, or if `λL ≥ 1` for class F2.
    pub fn new(nl: &Nonlinearity, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("step size must be ≥ 0, got {lambda}")));
        }
        if nl.class == NonlinearityClass::F2 {
            let l = nl.lipschitz.ok_or(Error::MissingLipschitz)?;
            if lambda * l >= 1.0 {
                return Err(Error::StepTooLarge { lambda, lipschitz: l });
            }
        }
        Ok(PsiMap { nl: nl.clone(), lambda })
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nl
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn psi(&self, s: f64) -> f64 {
        s - self.lambda * self.nl.eval(s)
    }

    pub fn derivative(&self, s: f64) -> Option<f64> {
        self.nl.derivative(s).map(|d| 1.0 - self.lambda * d)
    }

    /// Lower slope of `ψ`: `1` for F1 and `1 − λL` for F2.
    fn lower_slope(&self) -> f64 {
        match self.nl.class {
            NonlinearityClass::F1 => 1.0,
            NonlinearityClass::F2 => 1.0 - self.lambda * self.nl.lipschitz.unwrap_or(0.0),
        }
    }

    /// `s` with `|ψ(s) − y| ≤ tol·max(1,|y|)`.
    pub fn inverse(&self, y: f64, tol: f64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
        }
        self.solve_shifted(y, 0.0, tol * y.abs().max(1.0))
    }

    /// Solves `ψ(s) + c·s = y` for `c ≥ 0` to absolute residual `abs_tol`.
    pub fn solve_shifted(&self, y: f64, c: f64, abs_tol: f64) -> Result<f64> {
        let bound = y.abs() / (self.lower_slope() + c);
        let phi = |s: f64| self.psi(s) + c * s;
        if self.nl.has_derivative() {
            let d = |s: f64| self.derivative(s).unwrap_or(f64::NAN) + c;
            solve_increasing(phi, Some(d), y, bound, abs_tol)
        } else {
            solve_increasing(phi, None::<fn(f64) -> f64>, y, bound, abs_tol)
        }
    }
}

/// `ψ(s)` for the map of `nl` at step `λ`.
pub fn psi(nl: &Nonlinearity, lambda: f64, s: f64) -> Result<f64> {
    Ok(PsiMap::new(nl, lambda)?.psi(s))
}

/// `ψ⁻¹(y)` to tolerance `tol·max(1,|y|)`.
pub fn psi_inverse(nl: &Nonlinearity, lambda: f64, y: f64, tol: f64) -> Result<f64> {
    PsiMap::new(nl, lambda)?.inverse(y, tol)
}
