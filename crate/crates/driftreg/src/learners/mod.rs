//! Online learner interface and the stationary baselines plus CR-RLS.
//!
//! Every algorithm is a per-sample state machine behind [`OnlineLearner`]:
//! predict on `x_t`, then absorb `(x_t, y_t)`. The harness drives all of
//! them identically.

mod aar;
mod arowr;
mod nlms;
mod rls;

pub use aar::Aar;
pub use arowr::Arowr;
pub use nlms::Nlms;
pub use rls::{CrRls, Rls};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arcor::{Arcor, LambdaSchedule};
use crate::consts::NLMS_DEFAULT_EPS;
use crate::error::{Error, Result};
use crate::laser::Laser;
use crate::linalg::{all_finite, SymMat};

/// One stream element.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Sample {
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        let s = Sample { x, y };
        if !s.is_finite() {
            return Err(Error::NonFinite { step: None });
        }
        Ok(s)
    }

    pub fn is_finite(&self) -> bool {
        self.y.is_finite() && all_finite(&self.x)
    }
}

/// Uniform interface over all learners.
///
/// A learner instance is a single-threaded state machine; distinct instances
/// are independent and may run on different threads.
pub trait OnlineLearner: Send {
    fn dim(&self) -> usize;

    /// Prediction for `x` from the current state; does not mutate.
    fn predict(&self, x: &[f64]) -> Result<f64>;

    /// Absorbs one labeled sample.
    fn update(&mut self, sample: &Sample) -> Result<()>;

    /// Predict-then-update, returning the prediction made before the label
    /// was seen.
    fn step(&mut self, sample: &Sample) -> Result<f64> {
        let yhat = self.predict(&sample.x)?;
        self.update(sample)?;
        Ok(yhat)
    }

    /// Current weight vector (derived for learners that do not store it).
    fn weights(&self) -> Vec<f64>;

    /// Current covariance-like matrix, for learners that maintain one.
    fn sigma(&self) -> Option<SymMat>;

    /// Number of samples absorbed.
    fn steps(&self) -> u64;

    /// Step indices at which a covariance reset fired.
    fn resets(&self) -> &[u64] {
        &[]
    }
}

pub(crate) fn check_input(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    if !all_finite(x) {
        return Err(Error::NonFinite { step: None });
    }
    Ok(())
}

pub(crate) fn check_sample(dim: usize, sample: &Sample) -> Result<()> {
    check_input(dim, &sample.x)?;
    if !sample.y.is_finite() {
        return Err(Error::NonFinite { step: None });
    }
    Ok(())
}

fn default_nlms_mu() -> f64 {
    1.0
}

fn default_nlms_eps() -> f64 {
    NLMS_DEFAULT_EPS
}

fn default_one() -> f64 {
    1.0
}

/// Algorithm choice plus parameters; the JSON form of this enum is the
/// learner portion of experiment configs.
///
/// `None` for `c`, `t0` or `r_b` means infinite; infinite `c` and `t0` are
/// exact modes (LASER runs as AAR, CR-RLS as RLS), not large-float
/// approximations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "lowercase", deny_unknown_fields)]
pub enum LearnerSpec {
    Nlms {
        #[serde(default = "default_nlms_mu")]
        mu: f64,
        #[serde(default = "default_nlms_eps")]
        eps: f64,
    },
    Rls {
        #[serde(default = "default_one")]
        r: f64,
    },
    Crrls {
        #[serde(default = "default_one")]
        r: f64,
        #[serde(default)]
        t0: Option<u64>,
    },
    Arowr {
        #[serde(default = "default_one")]
        r: f64,
    },
    Aar {
        #[serde(default = "default_one")]
        b: f64,
    },
    Arcor {
        #[serde(default = "default_one")]
        r: f64,
        /// Projection radius; `None` disables the projection.
        #[serde(default = "default_arcor_radius")]
        r_b: Option<f64>,
        #[serde(default)]
        schedule: LambdaSchedule,
    },
    Laser {
        #[serde(default = "default_one")]
        b: f64,
        /// Drift-coupling constant; `None` is the exact `c = inf` mode.
        #[serde(default)]
        c: Option<f64>,
        /// Optional label bound: predictions are clipped to `[-y, y]`.
        #[serde(default)]
        y_bound: Option<f64>,
    },
}

fn default_arcor_radius() -> Option<f64> {
    Some(1.0)
}

pub const ALGO_TAGS: [&str; 7] = ["nlms", "rls", "crrls", "arowr", "aar", "arcor", "laser"];

impl LearnerSpec {
    pub fn algo_tag(&self) -> &'static str {
        match self {
            LearnerSpec::Nlms { .. } => "nlms",
            LearnerSpec::Rls { .. } => "rls",
            LearnerSpec::Crrls { .. } => "crrls",
            LearnerSpec::Arowr { .. } => "arowr",
            LearnerSpec::Aar { .. } => "aar",
            LearnerSpec::Arcor { .. } => "arcor",
            LearnerSpec::Laser { .. } => "laser",
        }
    }

    /// Human-readable label, e.g. `laser(b=0.5,c=100)`.
    pub fn label(&self) -> String {
        fn opt(v: &Option<f64>) -> String {
            v.map(|x| x.to_string()).unwrap_or_else(|| "inf".into())
        }
        match self {
            LearnerSpec::Nlms { mu, eps } => format!("nlms(mu={mu},eps={eps})"),
            LearnerSpec::Rls { r } => format!("rls(r={r})"),
            LearnerSpec::Crrls { r, t0 } => {
                let t0 = t0.map(|v| v.to_string()).unwrap_or_else(|| "inf".into());
                format!("crrls(r={r},t0={t0})")
            }
            LearnerSpec::Arowr { r } => format!("arowr(r={r})"),
            LearnerSpec::Aar { b } => format!("aar(b={b})"),
            LearnerSpec::Arcor { r, r_b, schedule } => {
                format!("arcor(r={r},rb={},{})", opt(r_b), schedule.label())
            }
            LearnerSpec::Laser { b, c, y_bound } => match y_bound {
                Some(y) => format!("laser(b={b},c={},y={y})", opt(c)),
                None => format!("laser(b={b},c={})", opt(c)),
            },
        }
    }

    /// Builds a learner of dimension `d`, validating parameters.
    pub fn build(&self, d: usize) -> Result<Box<dyn OnlineLearner>> {
        if d == 0 {
            return Err(Error::bad_param("d", "dimension must be at least 1"));
        }
        Ok(match self.clone() {
            LearnerSpec::Nlms { mu, eps } => Box::new(Nlms::new(d, mu, eps)?),
            LearnerSpec::Rls { r } => Box::new(Rls::new(d, r)?),
            LearnerSpec::Crrls { r, t0 } => Box::new(CrRls::new(d, r, t0)?),
            LearnerSpec::Arowr { r } => Box::new(Arowr::new(d, r)?),
            LearnerSpec::Aar { b } => Box::new(Aar::new(d, b)?),
            LearnerSpec::Arcor { r, r_b, schedule } => Box::new(Arcor::new(d, r, r_b, schedule)?),
            LearnerSpec::Laser { b, c, y_bound } => Box::new(Laser::new(d, b, c, y_bound)?),
        })
    }

    /// Parses `--params` key/value pairs into a spec. `inf` is accepted
    /// wherever an infinite sentinel makes sense, and `lambda=zero` selects
    /// the never-reset eigenvalue floor for ARCOR.
    pub fn from_params(algo: &str, params: &BTreeMap<String, String>) -> Result<LearnerSpec> {
        let mut spec = match algo {
            "nlms" => LearnerSpec::Nlms {
                mu: default_nlms_mu(),
                eps: default_nlms_eps(),
            },
            "rls" => LearnerSpec::Rls { r: 1.0 },
            "crrls" => LearnerSpec::Crrls { r: 1.0, t0: None },
            "arowr" => LearnerSpec::Arowr { r: 1.0 },
            "aar" => LearnerSpec::Aar { b: 1.0 },
            "arcor" => LearnerSpec::Arcor {
                r: 1.0,
                r_b: default_arcor_radius(),
                schedule: LambdaSchedule::default(),
            },
            "laser" => LearnerSpec::Laser {
                b: 1.0,
                c: None,
                y_bound: None,
            },
            other => {
                return Err(Error::Config(format!(
                    "unknown algorithm `{other}` (expected one of {})",
                    ALGO_TAGS.join(", ")
                )))
            }
        };
        for (key, value) in params {
            if key == "lambda" && value == "zero" {
                if let LearnerSpec::Arcor { schedule, .. } = &mut spec {
                    *schedule = LambdaSchedule::Zero;
                    continue;
                }
                return Err(Error::Config("`lambda=zero` only applies to arcor".into()));
            }
            let v = parse_param_value(value)
                .ok_or_else(|| Error::Config(format!("bad value for `{key}`: `{value}`")))?;
            spec.set_param(key, v)?;
        }
        Ok(spec)
    }

    /// Sets one named parameter; infinite values select the corresponding
    /// sentinel where one exists. Used by `from_params` and by grid tuning.
    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let unknown = |algo: &'static str| {
            Err(Error::Config(format!(
                "unknown parameter `{name}` for {algo}"
            )))
        };
        match self {
            LearnerSpec::Nlms { mu, eps } => match name {
                "mu" => *mu = value,
                "eps" => *eps = value,
                _ => return unknown("nlms"),
            },
            LearnerSpec::Rls { r } => match name {
                "r" => *r = value,
                _ => return unknown("rls"),
            },
            LearnerSpec::Crrls { r, t0 } => match name {
                "r" => *r = value,
                "t0" => {
                    *t0 = if value.is_infinite() {
                        None
                    } else if value >= 1.0 && value.fract() == 0.0 {
                        Some(value as u64)
                    } else {
                        return Err(Error::Config(format!(
                            "t0 must be a positive integer or inf, got {value}"
                        )));
                    }
                }
                _ => return unknown("crrls"),
            },
            LearnerSpec::Arowr { r } => match name {
                "r" => *r = value,
                _ => return unknown("arowr"),
            },
            LearnerSpec::Aar { b } => match name {
                "b" => *b = value,
                _ => return unknown("aar"),
            },
            LearnerSpec::Arcor { r, r_b, schedule } => match name {
                "r" => *r = value,
                "rb" => {
                    *r_b = if value.is_infinite() {
                        None
                    } else {
                        Some(value)
                    }
                }
                "q" => *schedule = LambdaSchedule::Polynomial { q: value },
                _ => return unknown("arcor"),
            },
            LearnerSpec::Laser { b, c, y_bound } => match name {
                "b" => *b = value,
                "c" => {
                    *c = if value.is_infinite() {
                        None
                    } else {
                        Some(value)
                    }
                }
                "y" => *y_bound = Some(value),
                _ => return unknown("laser"),
            },
        }
        Ok(())
    }
}

fn parse_param_value(s: &str) -> Option<f64> {
    match s {
        "inf" | "infinity" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Rng;

    pub(crate) fn random_stream(rng: &mut Rng, t: usize, d: usize) -> Vec<Sample> {
        (0..t)
            .map(|_| {
                let x: Vec<f64> = (0..d).map(|_| rng.next_gaussian()).collect();
                let y = rng.next_gaussian();
                Sample::new(x, y).unwrap()
            })
            .collect()
    }

    #[test]
    fn predict_linear_cases() {
        let rls = Rls::new(2, 1.0).unwrap();
        // zero weights predict zero
        assert_eq!(rls.predict(&[4.0, -3.0]).unwrap(), 0.0);

        let mut arowr = Arowr::new(2, 1.0).unwrap();
        arowr
            .update(&Sample::new(vec![1.0, 0.0], 2.0).unwrap())
            .unwrap();
        // orthogonal input sees nothing
        assert_eq!(arowr.predict(&[0.0, 1.0]).unwrap(), 0.0);

        assert!(matches!(
            rls.predict(&[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spec_round_trips_through_json() {
        let specs = vec![
            LearnerSpec::Nlms { mu: 0.5, eps: 1e-8 },
            LearnerSpec::Crrls {
                r: 0.9,
                t0: Some(50),
            },
            LearnerSpec::Laser {
                b: 0.5,
                c: None,
                y_bound: Some(2.0),
            },
            LearnerSpec::Arcor {
                r: 1.0,
                r_b: Some(2.0),
                schedule: LambdaSchedule::Polynomial { q: 2.0 },
            },
        ];
        for spec in specs {
            let json = serde_json::to_string(&spec).unwrap();
            let back: LearnerSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back);
        }
    }

    #[test]
    fn spec_rejects_unknown_json_keys() {
        let err = serde_json::from_str::<LearnerSpec>(r#"{"algo":"rls","r":1.0,"bogus":3}"#);
        assert!(err.is_err());
    }

    #[test]
    fn from_params_parses_sentinels() {
        let mut p = BTreeMap::new();
        p.insert("c".to_string(), "inf".to_string());
        p.insert("b".to_string(), "0.5".to_string());
        let spec = LearnerSpec::from_params("laser", &p).unwrap();
        assert_eq!(
            spec,
            LearnerSpec::Laser {
                b: 0.5,
                c: None,
                y_bound: None
            }
        );

        let mut p = BTreeMap::new();
        p.insert("lambda".to_string(), "zero".to_string());
        p.insert("rb".to_string(), "inf".to_string());
        let spec = LearnerSpec::from_params("arcor", &p).unwrap();
        assert_eq!(
            spec,
            LearnerSpec::Arcor {
                r: 1.0,
                r_b: None,
                schedule: LambdaSchedule::Zero
            }
        );

        assert!(LearnerSpec::from_params("nope", &BTreeMap::new()).is_err());
    }
}
