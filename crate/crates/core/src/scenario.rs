//! Experiment descriptions and their flat `key = value` config format.
//!
//! ```text
//! # transverse OU noise, fully correlated
//! geometry = transverse
//! state = phi_plus, psi_plus
//! omega = 40
//! gamma = 1
//! noise.kind = ou
//! noise.sigma = 4
//! noise.tc = 10
//! t_max = 5
//! n_points = 51
//! methods = qsba, montecarlo
//! trajectories = 10000
//! seed = 7
//! ```
//!
//! `noise.T` replaces `noise.sigma`/`noise.tc` for white noise.
//! `noise.sigma2` sets a different amplitude for qubit 2. `state = all`
//! selects the four Bell states. `dt` overrides the Monte Carlo step.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::noise::{Geometry, NoiseKind, NoiseSpec};
use crate::operators::BellState;

/// Smallest ensemble accepted for Monte Carlo runs.
pub const MIN_TRAJECTORIES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Analytic,
    Qsba,
    Cumulant2,
    MonteCarlo,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Analytic,
        Method::Qsba,
        Method::Cumulant2,
        Method::MonteCarlo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Qsba => "qsba",
            Method::Cumulant2 => "cumulant2",
            Method::MonteCarlo => "montecarlo",
        }
    }

    /// Whether the method reports a statistical error.
    pub fn is_stochastic(self) -> bool {
        self == Method::MonteCarlo
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub geometry: Geometry,
    pub states: Vec<BellState>,
    pub omega: f64,
    /// Carries the cross-correlation degree and the axes of `geometry`.
    pub noise: NoiseSpec,
    pub t_max: f64,
    pub n_points: usize,
    pub methods: Vec<Method>,
    pub trajectories: usize,
    pub seed: u64,
    /// Monte Carlo step override.
    pub dt: Option<f64>,
}

const KEYS: [&str; 15] = [
    "geometry",
    "state",
    "omega",
    "gamma",
    "noise.kind",
    "noise.T",
    "noise.sigma",
    "noise.sigma2",
    "noise.tc",
    "t_max",
    "n_points",
    "methods",
    "trajectories",
    "seed",
    "dt",
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, found `{line}`"),
            ));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        if map
            .insert(key.to_string(), value.trim().to_string())
            .is_some()
        {
            return Err(Error::config(key, "key given more than once"));
        }
    }
    Ok(map)
}

struct Fields(BTreeMap<String, String>);

impl Fields {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.raw(key)
            .ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn number<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::config(key, format!("cannot parse `{v}` as a number")))
            })
            .transpose()
    }

    fn required_number<T: FromStr>(&self, key: &str) -> Result<T> {
        self.number(key)?
            .ok_or_else(|| Error::config(key, "missing required key"))
    }
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(key, format!("must be positive, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<f64> {
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(key, format!("must be non-negative, got {v}")))
    }
}

fn list<T: FromStr<Err = Error>>(key: &str, value: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim) {
        if item.is_empty() {
            return Err(Error::config(key, "empty list entry"));
        }
        out.push(
            item.parse()
                .map_err(|e: Error| Error::config(key, e.to_string()))?,
        );
    }
    Ok(out)
}

impl Scenario {
    /// Parses and validates a config document. Method/geometry pairing is
    /// checked separately by [`Scenario::check_methods`].
    pub fn from_config_str(text: &str) -> Result<Self> {
        let f = Fields(parse_pairs(text)?);
        let geometry: Geometry = f
            .required("geometry")?
            .parse()
            .map_err(|e: Error| Error::config("geometry", e.to_string()))?;
        let state_text = f.required("state")?;
        let mut states = if state_text.trim() == "all" {
            BellState::ALL.to_vec()
        } else {
            list::<BellState>("state", state_text)?
        };
        dedup(&mut states);
        let omega = non_negative("omega", f.number("omega")?.unwrap_or(0.0))?;
        let gamma: f64 = f.number("gamma")?.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::config(
                "gamma",
                format!("must lie in [0, 1], got {gamma}"),
            ));
        }
        let kind = match f.required("noise.kind")? {
            "white" => {
                for k in ["noise.sigma", "noise.sigma2", "noise.tc"] {
                    if f.raw(k).is_some() {
                        return Err(Error::config(k, "not used by white noise"));
                    }
                }
                NoiseKind::White {
                    t_white: positive("noise.T", f.required_number("noise.T")?)?,
                }
            }
            "ou" => {
                if f.raw("noise.T").is_some() {
                    return Err(Error::config("noise.T", "not used by ou noise"));
                }
                let s1 = non_negative("noise.sigma", f.required_number("noise.sigma")?)?;
                let s2 = non_negative("noise.sigma2", f.number("noise.sigma2")?.unwrap_or(s1))?;
                NoiseKind::OrnsteinUhlenbeck {
                    sigma: [s1, s2],
                    tc: positive("noise.tc", f.required_number("noise.tc")?)?,
                }
            }
            other => {
                return Err(Error::config(
                    "noise.kind",
                    format!("expected `white` or `ou`, got `{other}`"),
                ))
            }
        };
        let noise = NoiseSpec::new(kind, geometry.axes(), gamma)
            .map_err(|e| Error::config("noise", e.to_string()))?;
        let t_max = positive("t_max", f.required_number("t_max")?)?;
        let n_points: usize = f.required_number("n_points")?;
        if n_points < 2 {
            return Err(Error::config(
                "n_points",
                format!("must be at least 2, got {n_points}"),
            ));
        }
        let mut methods = list::<Method>("methods", f.required("methods")?)?;
        dedup(&mut methods);
        let trajectories: usize = f.number("trajectories")?.unwrap_or(10_000);
        if methods.contains(&Method::MonteCarlo) && trajectories < MIN_TRAJECTORIES {
            return Err(Error::config(
                "trajectories",
                format!(
                    "montecarlo needs at least {MIN_TRAJECTORIES} trajectories, got {trajectories}"
                ),
            ));
        }
        let seed: u64 = f.number("seed")?.unwrap_or(0);
        let dt = f
            .number::<f64>("dt")?
            .map(|v| positive("dt", v))
            .transpose()?;
        Ok(Scenario {
            geometry,
            states,
            omega,
            noise,
            t_max,
            n_points,
            methods,
            trajectories,
            seed,
            dt,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }

    pub fn gamma(&self) -> f64 {
        self.noise.gamma
    }

    /// Output grid `t_k = k t_max/(n_points - 1)`.
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_points - 1;
        (0..=n).map(|k| self.t_max * k as f64 / n as f64).collect()
    }

    /// Monte Carlo step and the number of steps per output interval.
    ///
    /// The default step is `min(t_c/50, 2π/(40 max(Ω, σ)))` for OU noise
    /// and `min(T/200, 2π/40Ω)` for white noise. It is shrunk so that each
    /// output interval holds a whole number of steps.
    pub fn time_step(&self) -> (f64, usize) {
        let interval = self.t_max / (self.n_points - 1) as f64;
        let target = self.dt.unwrap_or_else(|| {
            let rotation = |rate: f64| {
                if rate > 0.0 {
                    2.0 * std::f64::consts::PI / (40.0 * rate)
                } else {
                    f64::INFINITY
                }
            };
            match self.noise.kind {
                NoiseKind::OrnsteinUhlenbeck { sigma, tc } => {
                    (tc / 50.0).min(rotation(self.omega.max(sigma[0]).max(sigma[1])))
                }
                NoiseKind::White { t_white } => (t_white / 200.0).min(rotation(self.omega)),
            }
        });
        let steps = (interval / target * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        (interval / steps as f64, steps)
    }

    /// Rejects methods that are not defined for this geometry and noise.
    pub fn check_methods(&self) -> Result<()> {
        for &m in &self.methods {
            check_method(m, self.geometry, &self.noise)?;
        }
        Ok(())
    }

    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let join = |items: Vec<&str>| items.join(", ");
        let _ = writeln!(s, "geometry = {}", self.geometry);
        let _ = writeln!(
            s,
            "state = {}",
            join(self.states.iter().map(|b| b.name()).collect())
        );
        let _ = writeln!(s, "omega = {}", self.omega);
        let _ = writeln!(s, "gamma = {}", self.noise.gamma);
        match self.noise.kind {
            NoiseKind::White { t_white } => {
                let _ = writeln!(s, "noise.kind = white");
                let _ = writeln!(s, "noise.T = {t_white}");
            }
            NoiseKind::OrnsteinUhlenbeck { sigma, tc } => {
                let _ = writeln!(s, "noise.kind = ou");
                let _ = writeln!(s, "noise.sigma = {}", sigma[0]);
                if sigma[1] != sigma[0] {
                    let _ = writeln!(s, "noise.sigma2 = {}", sigma[1]);
                }
                let _ = writeln!(s, "noise.tc = {tc}");
            }
        }
        let _ = writeln!(s, "t_max = {}", self.t_max);
        let _ = writeln!(s, "n_points = {}", self.n_points);
        let _ = writeln!(
            s,
            "methods = {}",
            join(self.methods.iter().map(|m| m.name()).collect())
        );
        let _ = writeln!(s, "trajectories = {}", self.trajectories);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(dt) = self.dt {
            let _ = writeln!(s, "dt = {dt}");
        }
        s
    }
}

fn dedup<T: PartialEq + Copy>(items: &mut Vec<T>) {
    let mut seen = Vec::with_capacity(items.len());
    items.retain(|x| {
        if seen.contains(x) {
            false
        } else {
            seen.push(*x);
            true
        }
    });
}

fn pairing_error(method: Method, reason: &str) -> Error {
    Error::MethodGeometry {
        method: method.name().into(),
        reason: reason.into(),
    }
}

pub fn check_method(method: Method, geometry: Geometry, noise: &NoiseSpec) -> Result<()> {
    let white = matches!(noise.kind, NoiseKind::White { .. });
    match method {
        Method::Analytic => match geometry {
            Geometry::Dephasing => Ok(()),
            _ if white => Ok(()),
            _ => Err(pairing_error(
                method,
                "closed forms for transverse noise components exist only for white noise",
            )),
        },
        Method::Qsba => {
            if geometry != Geometry::Transverse || white {
                return Err(pairing_error(method, "requires transverse OU noise"));
            }
            if noise.gamma != 0.0 && noise.gamma != 1.0 {
                return Err(pairing_error(method, "requires gamma = 0 or gamma = 1"));
            }
            Ok(())
        }
        Method::Cumulant2 | Method::MonteCarlo => Ok(()),
    }
}

/// Bundled scenarios, one per reference figure.
pub const PRESETS: [(&str, &str); 6] = [
    (
        "fig1",
        "# isotropic white noise, gamma = 0.8\n\
         geometry = isotropic\nstate = all\nomega = 1\ngamma = 0.8\n\
         noise.kind = white\nnoise.T = 1\nt_max = 2\nn_points = 201\n\
         methods = analytic\nseed = 1\n",
    ),
    (
        "fig2",
        "# transverse white noise, gamma = 0.8\n\
         geometry = transverse\nstate = all\nomega = 1\ngamma = 0.8\n\
         noise.kind = white\nnoise.T = 1\nt_max = 2\nn_points = 201\n\
         methods = analytic\nseed = 2\n",
    ),
    (
        "fig3",
        "# independent isotropic OU noise, all Bell states coincide\n\
         geometry = isotropic\nstate = psi_minus\nomega = 1\ngamma = 0\n\
         noise.kind = ou\nnoise.sigma = 5\nnoise.tc = 10\nt_max = 1\nn_points = 51\n\
         methods = cumulant2, montecarlo\ntrajectories = 10000\nseed = 3\n",
    ),
    (
        "fig4",
        "# independent transverse OU noise\n\
         geometry = transverse\nstate = all\nomega = 40\ngamma = 0\n\
         noise.kind = ou\nnoise.sigma = 4\nnoise.tc = 10\nt_max = 5\nn_points = 51\n\
         methods = qsba, cumulant2, montecarlo\ntrajectories = 10000\nseed = 4\n",
    ),
    (
        "fig5",
        "# fully correlated transverse OU noise, Phi states\n\
         geometry = transverse\nstate = phi_plus, phi_minus\nomega = 40\ngamma = 1\n\
         noise.kind = ou\nnoise.sigma = 4\nnoise.tc = 10\nt_max = 5\nn_points = 51\n\
         methods = qsba, cumulant2, montecarlo\ntrajectories = 10000\nseed = 5\n",
    ),
    (
        "fig6",
        "# fully correlated transverse OU noise, Psi+ state\n\
         geometry = transverse\nstate = psi_plus\nomega = 40\ngamma = 1\n\
         noise.kind = ou\nnoise.sigma = 4\nnoise.tc = 10\nt_max = 5\nn_points = 51\n\
         methods = qsba, cumulant2, montecarlo\ntrajectories = 10000\nseed = 6\n",
    ),
];

pub fn preset(name: &str) -> Option<Scenario> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::from_config_str(text).expect("bundled presets are valid"))
}

pub fn preset_text(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}
