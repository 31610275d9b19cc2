//! Flat `key = value` run configuration.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::maps::{ClassicalMapSpec, KickMode};
use crate::otoc::OperatorChoice;
use crate::phase_space::{PhaseVector, TorusSpace};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "OTOC_TORUS_OUTPUT";
pub const DEFAULT_OUTPUT_ROOT: &str = "otoc-runs";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Cat,
    Standard,
    Harper,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Cat => "cat",
            MapKind::Standard => "standard",
            MapKind::Harper => "harper",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cat" => Some(MapKind::Cat),
            "standard" => Some(MapKind::Standard),
            "harper" => Some(MapKind::Harper),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrylovSeedKind {
    Position,
    Random,
}

/// Operator pair as written in a config: `XP` or `F(xq,xp;cq,cp)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorSpec {
    XP,
    F { xi: (i64, i64), chi: (i64, i64) },
}

impl OperatorSpec {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("xp") {
            return Some(OperatorSpec::XP);
        }
        let inner = s.strip_prefix("F(").or_else(|| s.strip_prefix("f("))?.strip_suffix(')')?;
        let (a, b) = inner.split_once(';')?;
        let pair = |t: &str| -> Option<(i64, i64)> {
            let (x, y) = t.split_once(',')?;
            Some((x.trim().parse().ok()?, y.trim().parse().ok()?))
        };
        Some(OperatorSpec::F {
            xi: pair(a)?,
            chi: pair(b)?,
        })
    }

    pub fn resolve(&self, space: &TorusSpace) -> OperatorChoice {
        match *self {
            OperatorSpec::XP => OperatorChoice::XP,
            OperatorSpec::F { xi, chi } => OperatorChoice::F {
                xi: PhaseVector::new(space, xi.0, xi.1),
                chi: PhaseVector::new(space, chi.0, chi.1),
            },
        }
    }
}

impl std::fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorSpec::XP => write!(f, "XP"),
            OperatorSpec::F { xi, chi } => write!(f, "F({},{};{},{})", xi.0, xi.1, chi.0, chi.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub map: MapKind,
    pub n: usize,
    /// `k` for the cat map, `K` for the standard map, `K1` for Harper.
    pub map_param: f64,
    /// `K2` for Harper; defaults to `map_param`.
    pub map_param2: Option<f64>,
    pub epsilon: f64,
    pub t_max: usize,
    pub operators: OperatorSpec,
    pub seed: u64,
    pub kick_mode: KickMode,
    pub outputs: PathBuf,
    pub growth_window: Option<(usize, usize)>,
    pub tail_window: Option<(usize, usize)>,
    pub krylov_seed: KrylovSeedKind,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            map: MapKind::Cat,
            n: 1024,
            map_param: 0.0,
            map_param2: None,
            epsilon: 0.0,
            t_max: 20,
            operators: OperatorSpec::XP,
            seed: 0,
            kick_mode: KickMode::Correspondence,
            outputs: default_output_root(),
            growth_window: None,
            tail_window: None,
            krylov_seed: KrylovSeedKind::Position,
        }
    }
}

pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

fn parse_window(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn parse_kick_mode(s: &str) -> Option<KickMode> {
    match s {
        "correspondence" => Some(KickMode::Correspondence),
        "as_printed" | "as-printed" => Some(KickMode::AsPrinted),
        _ => None,
    }
}

impl RunConfig {
    pub fn spec(&self) -> ClassicalMapSpec {
        match self.map {
            MapKind::Cat => ClassicalMapSpec::cat(self.map_param),
            MapKind::Standard => ClassicalMapSpec::standard(self.map_param),
            MapKind::Harper => ClassicalMapSpec::Harper {
                k1: self.map_param,
                k2: self.map_param2.unwrap_or(self.map_param),
            },
        }
    }

    /// Set one field from its textual form. Unknown keys are errors.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let value = value.trim();
        let bad = |what: &str| format!("invalid {what} '{value}'");
        match key.trim() {
            "map" => self.map = MapKind::parse(value).ok_or_else(|| bad("map (cat, standard, harper)"))?,
            "N" | "n" => self.n = value.parse().map_err(|_| bad("N"))?,
            "map_param" | "k" | "K" => self.map_param = value.parse().map_err(|_| bad("map_param"))?,
            "map_param2" | "K2" => self.map_param2 = Some(value.parse().map_err(|_| bad("map_param2"))?),
            "epsilon" => self.epsilon = value.parse().map_err(|_| bad("epsilon"))?,
            "t_max" => self.t_max = value.parse().map_err(|_| bad("t_max"))?,
            "operators" => self.operators = OperatorSpec::parse(value).ok_or_else(|| bad("operators (XP or F(q,p;q,p))"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "kick_mode" => self.kick_mode = parse_kick_mode(value).ok_or_else(|| bad("kick_mode (correspondence, as_printed)"))?,
            "outputs" => self.outputs = PathBuf::from(value),
            "growth_window" => self.growth_window = Some(parse_window(value).ok_or_else(|| bad("growth_window (start,end)"))?),
            "tail_window" => self.tail_window = Some(parse_window(value).ok_or_else(|| bad("tail_window (start,end)"))?),
            "krylov_seed" => {
                self.krylov_seed = match value {
                    "x" | "X" | "position" => KrylovSeedKind::Position,
                    "random" => KrylovSeedKind::Random,
                    _ => return Err(bad("krylov_seed (x, random)")),
                }
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
                line: Some(i + 1),
                message: format!("expected key = value, got '{line}'"),
            })?;
            cfg.set(key, value).map_err(|message| Error::Config { line: Some(i + 1), message })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::Config { line: None, message: msg });
        if self.n < 2 {
            return invalid(format!("N must be >= 2, got {}", self.n));
        }
        if !self.map_param.is_finite() || !self.map_param2.unwrap_or(0.0).is_finite() {
            return invalid("map parameters must be finite".into());
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return invalid(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        if self.map_param2.is_some() && self.map != MapKind::Harper {
            return invalid("map_param2 only applies to the harper map".into());
        }
        for (name, w) in [("growth_window", self.growth_window), ("tail_window", self.tail_window)] {
            if let Some((a, b)) = w {
                if a >= b || b > self.t_max {
                    return invalid(format!("{name} [{a}, {b}] must satisfy start < end <= t_max = {}", self.t_max));
                }
            }
        }
        if let OperatorSpec::F { xi, chi } = self.operators {
            let space = TorusSpace::new(self.n)?;
            if PhaseVector::new(&space, xi.0, xi.1).is_origin() || PhaseVector::new(&space, chi.0, chi.1).is_origin() {
                return invalid("operator chords must be nonzero mod N".into());
            }
        }
        Ok(())
    }

    /// Canonical `key = value` text; [`RunConfig::parse`] reads it back.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let mut e = vec![
            ("map", self.map.name().to_string()),
            ("N", self.n.to_string()),
            ("map_param", format!("{:?}", self.map_param)),
        ];
        if let Some(k2) = self.map_param2 {
            e.push(("map_param2", format!("{k2:?}")));
        }
        e.extend([
            ("epsilon", format!("{:?}", self.epsilon)),
            ("t_max", self.t_max.to_string()),
            ("operators", self.operators.to_string()),
            ("seed", self.seed.to_string()),
            ("kick_mode", self.kick_mode.name().to_string()),
            ("outputs", self.outputs.display().to_string()),
        ]);
        if let Some((a, b)) = self.growth_window {
            e.push(("growth_window", format!("{a},{b}")));
        }
        if let Some((a, b)) = self.tail_window {
            e.push(("tail_window", format!("{a},{b}")));
        }
        e.push((
            "krylov_seed",
            match self.krylov_seed {
                KrylovSeedKind::Position => "x",
                KrylovSeedKind::Random => "random",
            }
            .to_string(),
        ));
        e
    }
}
