//! Flat `key = value` configuration with dotted keys and `--key value` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dynbc::datum::{BoundaryDatum, NamedDatum, SampledDatum};
use dynbc::geometry::{BoundaryPoint, DomainSpec, Point};
use dynbc::montecarlo::{MCConfig, DEFAULT_TEMPERED_STEP};
use dynbc::spectral::BoundaryParams;
use dynbc::symbols::{BernsteinSymbol, TimeModel};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}:{line}: {msg}")]
    Syntax { path: String, line: usize, msg: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("duplicate key `{0}`")]
    Duplicate(String),
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("cannot read {0}: {1}")]
    Io(String, std::io::Error),
}

type Result<T> = std::result::Result<T, ConfigError>;

const KEYS: &[&str] = &[
    "domain.dim",
    "domain.radius",
    "bc.k",
    "bc.l",
    "bc.lambda",
    "time.model",
    "time.alpha",
    "time.theta",
    "datum.kind",
    "datum.name",
    "datum.path",
    "datum.n_max",
    "datum.constant",
    "datum.cos",
    "datum.sin",
    "datum.harmonic",
    "datum.from",
    "datum.to",
    "datum.inside",
    "datum.outside",
    "eval.times",
    "eval.points",
    "eval.subordination",
    "mc.paths",
    "mc.seed",
    "mc.shards",
    "mc.tempered_step",
    "output.dir",
    "output.format",
];

/// Raw key-value pairs after merging the file and the overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: origin.to_string(),
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = k.trim().to_string();
            check_key(&key)?;
            if map.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(ConfigError::Duplicate(key));
            }
        }
        Ok(Self(map))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Applies `--key value` or `--key=value` pairs; later ones win.
    pub fn apply_overrides(&mut self, args: &[String]) -> Result<()> {
        let mut it = args.iter();
        while let Some(a) = it.next() {
            let body = a.strip_prefix("--").ok_or_else(|| ConfigError::Invalid {
                key: a.clone(),
                msg: "overrides take the form --key value".into(),
            })?;
            let (key, value) = match body.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let v = it.next().ok_or_else(|| ConfigError::Invalid {
                        key: body.to_string(),
                        msg: "override without a value".into(),
                    })?;
                    (body.to_string(), v.clone())
                }
            };
            check_key(&key)?;
            self.0.insert(key, value);
        }
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn parse_with<V>(&self, key: &str, f: impl FnOnce(&str) -> std::result::Result<V, String>) -> Result<Option<V>> {
        self.get(key)
            .map(|s| f(s).map_err(|msg| ConfigError::Invalid { key: key.to_string(), msg }))
            .transpose()
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.parse_with(key, parse_f64)
    }

    fn u64(&self, key: &str) -> Result<Option<u64>> {
        self.parse_with(key, |s| s.parse::<u64>().map_err(|e| format!("`{s}`: {e}")))
    }

    fn require<V>(key: &str, v: Option<V>) -> Result<V> {
        v.ok_or_else(|| ConfigError::Missing(key.to_string()))
    }
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(ConfigError::UnknownKey(key.to_string()))
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v = s.parse::<f64>().map_err(|e| format!("`{s}`: {e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(parse_f64).collect()
}

/// `n:a` pairs separated by commas or spaces.
fn parse_fourier(s: &str) -> std::result::Result<Vec<(u32, f64)>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let (n, a) = t.split_once(':').ok_or_else(|| format!("`{t}`: expected n:amplitude"))?;
            Ok((n.parse::<u32>().map_err(|e| format!("`{n}`: {e}"))?, parse_f64(a)?))
        })
        .collect()
}

/// `l:m:c` triples separated by commas or spaces.
fn parse_harmonic(s: &str) -> std::result::Result<Vec<(u32, i32, f64)>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            let parts: Vec<&str> = t.split(':').collect();
            if parts.len() != 3 {
                return Err(format!("`{t}`: expected l:m:coefficient"));
            }
            Ok((
                parts[0].parse::<u32>().map_err(|e| format!("`{}`: {e}", parts[0]))?,
                parts[1].parse::<i32>().map_err(|e| format!("`{}`: {e}", parts[1]))?,
                parse_f64(parts[2])?,
            ))
        })
        .collect()
}

/// Boundary datum chosen by the configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Datum {
    Named(NamedDatum<f64>),
    Sampled(SampledDatum<f64>),
}

impl BoundaryDatum<f64> for Datum {
    fn value(&self, y: &BoundaryPoint<f64>) -> f64 {
        match self {
            Self::Named(d) => d.value(y),
            Self::Sampled(d) => d.value(y),
        }
    }

    fn bandwidth(&self) -> Option<usize> {
        match self {
            Self::Named(d) => d.bandwidth(),
            Self::Sampled(d) => d.bandwidth(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub dir: Option<PathBuf>,
    pub format: Format,
}

/// Validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSpec<f64>,
    pub bc: BoundaryParams<f64>,
    pub time: Option<TimeModel<f64>>,
    pub datum: Option<Datum>,
    pub n_max: usize,
    pub times: Vec<f64>,
    pub points: Vec<Point<f64>>,
    pub subordination: bool,
    pub mc: MCConfig<f64>,
    pub output: Output,
}

impl RunConfig {
    /// Validates every present key; keys needed only by some commands may be absent.
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let invalid = |key: &str, e: dynbc::Error| ConfigError::Invalid { key: key.to_string(), msg: e.to_string() };
        let dim = raw.u64("domain.dim")?.unwrap_or(2) as usize;
        let radius = raw.f64("domain.radius")?.unwrap_or(1.0);
        let domain = DomainSpec::new(dim, radius).map_err(|e| invalid("domain", e))?;

        let k = RawConfig::require("bc.k", raw.f64("bc.k")?)?;
        let l = RawConfig::require("bc.l", raw.f64("bc.l")?)?;
        let lambda = raw.f64("bc.lambda")?.unwrap_or(0.0);
        let bc = BoundaryParams::new(k, l, lambda).map_err(|e| invalid("bc", e))?;

        let time = match raw.get("time.model").unwrap_or("caputo") {
            "caputo" => raw
                .f64("time.alpha")?
                .map(|a| TimeModel::caputo(a).map_err(|e| invalid("time.alpha", e)))
                .transpose()?,
            "symbol" => {
                let a = RawConfig::require("time.alpha", raw.f64("time.alpha")?)?;
                let th = RawConfig::require("time.theta", raw.f64("time.theta")?)?;
                Some(TimeModel::Symbol(BernsteinSymbol::tempered(a, th).map_err(|e| invalid("time", e))?))
            }
            other => {
                return Err(ConfigError::Invalid { key: "time.model".into(), msg: format!("`{other}` is not caputo|symbol") })
            }
        };
        if raw.get("time.theta").is_some() && raw.get("time.model") != Some("symbol") {
            return Err(ConfigError::Invalid { key: "time.theta".into(), msg: "only used with time.model = symbol".into() });
        }

        let datum = Self::datum(raw, dim)?;
        let n_max = raw.u64("datum.n_max")?.unwrap_or(16) as usize;
        let times = raw.parse_with("eval.times", parse_list)?.unwrap_or_default();
        if let Some(t) = times.iter().find(|&&t| t < 0.0) {
            return Err(ConfigError::Invalid { key: "eval.times".into(), msg: format!("time {t} < 0") });
        }
        let points = match raw.get("eval.points") {
            None => Vec::new(),
            Some(s) => s
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    let c = parse_list(p).map_err(|msg| ConfigError::Invalid { key: "eval.points".into(), msg })?;
                    let pt = match (dim, c.as_slice()) {
                        (2, &[x, y]) => Point::planar(x, y),
                        (3, &[x, y, z]) => Point::new(x, y, z),
                        _ => {
                            return Err(ConfigError::Invalid {
                                key: "eval.points".into(),
                                msg: format!("`{}` needs {dim} coordinates", p.trim()),
                            })
                        }
                    };
                    domain.check_closure(&pt).map_err(|e| invalid("eval.points", e))?;
                    Ok(pt)
                })
                .collect::<Result<_>>()?,
        };
        let subordination = match raw.get("eval.subordination").unwrap_or("false") {
            "true" => true,
            "false" => false,
            s => return Err(ConfigError::Invalid { key: "eval.subordination".into(), msg: format!("`{s}` is not true|false") }),
        };

        let paths = raw.u64("mc.paths")?.unwrap_or(100_000);
        let seed = raw.u64("mc.seed")?.unwrap_or(0);
        let shards = raw.u64("mc.shards")?.unwrap_or(1) as usize;
        let step = raw.f64("mc.tempered_step")?.unwrap_or(DEFAULT_TEMPERED_STEP);
        let model = time.unwrap_or(TimeModel::caputo(1.0).expect("alpha = 1 is valid"));
        let mc = MCConfig::new(paths, seed, shards, model)
            .and_then(|c| c.with_tempered_step(step))
            .map_err(|e| invalid("mc", e))?;

        let format = match raw.get("output.format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            s => return Err(ConfigError::Invalid { key: "output.format".into(), msg: format!("`{s}` is not csv|json") }),
        };
        let output = Output { dir: raw.get("output.dir").map(PathBuf::from), format };
        Ok(Self { domain, bc, time, datum, n_max, times, points, subordination, mc, output })
    }

    fn datum(raw: &RawConfig, dim: usize) -> Result<Option<Datum>> {
        let named_keys = ["datum.name", "datum.constant", "datum.cos", "datum.sin", "datum.harmonic"];
        match raw.get("datum.kind").unwrap_or("named") {
            "csv" => {
                let path = RawConfig::require("datum.path", raw.get("datum.path"))?;
                let d = SampledDatum::from_csv_path(dim, Path::new(path))
                    .map_err(|e| ConfigError::Invalid { key: "datum.path".into(), msg: e.to_string() })?;
                Ok(Some(Datum::Sampled(d)))
            }
            "named" => {
                let Some(name) = raw.get("datum.name") else {
                    if let Some(k) = named_keys.iter().find(|k| raw.get(k).is_some()) {
                        return Err(ConfigError::Invalid { key: k.to_string(), msg: "datum.name is missing".into() });
                    }
                    return Ok(None);
                };
                let d = match name {
                    "constant" => NamedDatum::Constant(RawConfig::require("datum.constant", raw.f64("datum.constant")?)?),
                    "fourier" => NamedDatum::Fourier {
                        constant: raw.f64("datum.constant")?.unwrap_or(0.0),
                        cos: raw.parse_with("datum.cos", parse_fourier)?.unwrap_or_default(),
                        sin: raw.parse_with("datum.sin", parse_fourier)?.unwrap_or_default(),
                    },
                    "harmonic" => NamedDatum::Harmonic(RawConfig::require(
                        "datum.harmonic",
                        raw.parse_with("datum.harmonic", parse_harmonic)?,
                    )?),
                    "step" => NamedDatum::Step {
                        from: RawConfig::require("datum.from", raw.f64("datum.from")?)?,
                        to: RawConfig::require("datum.to", raw.f64("datum.to")?)?,
                        inside: raw.f64("datum.inside")?.unwrap_or(1.0),
                        outside: raw.f64("datum.outside")?.unwrap_or(0.0),
                    },
                    other => {
                        return Err(ConfigError::Invalid {
                            key: "datum.name".into(),
                            msg: format!("`{other}` is not constant|fourier|harmonic|step"),
                        })
                    }
                };
                d.validate().map_err(|e| ConfigError::Invalid { key: "datum".into(), msg: e.to_string() })?;
                Ok(Some(Datum::Named(d)))
            }
            other => Err(ConfigError::Invalid { key: "datum.kind".into(), msg: format!("`{other}` is not named|csv") }),
        }
    }

    pub fn require_time(&self) -> Result<TimeModel<f64>> {
        RawConfig::require("time.alpha", self.time)
    }

    pub fn require_datum(&self) -> Result<&Datum> {
        RawConfig::require("datum.name", self.datum.as_ref())
    }

    /// Evaluation grid in row order: times outer, points inner.
    pub fn eval_grid(&self) -> Result<Vec<(f64, Point<f64>)>> {
        if self.times.is_empty() {
            return Err(ConfigError::Missing("eval.times".into()));
        }
        if self.points.is_empty() {
            return Err(ConfigError::Missing("eval.points".into()));
        }
        Ok(self.times.iter().flat_map(|&t| self.points.iter().map(move |&x| (t, x))).collect())
    }
}
