use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use wakimoto::fock::ModuleParams;
use wakimoto::{format_rat, int, parse_rat, Rat};

use crate::CliError;

/// Keys accepted in a config file and as flags (hyphens and underscores are
/// interchangeable).
pub const KEYS: &[&str] = &[
    "p", "pprime", "k", "m", "mprime", "l", "degree", "order", "format", "out", "jobs", "cache", "j", "source_m",
    "source_mprime",
];

const LEVEL_KEYS: &[&str] = &["p", "pprime", "k"];

pub const DEFAULT_DEGREE: u64 = 4;
pub const DEFAULT_ORDER: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(CliError::Usage(format!("unknown format {s:?} (json, csv or text)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "text",
        };
        write!(f, "{s}")
    }
}

/// Fully resolved run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModuleParams,
    pub m: Option<i64>,
    pub m_prime: i64,
    pub l: i64,
    pub degree: u64,
    pub order: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub cache: Option<PathBuf>,
    pub j: Option<Rat>,
    pub source_m: Option<i64>,
    pub source_m_prime: i64,
}

impl RunConfig {
    /// The fields that determine a result, as sorted `key → value` strings.
    /// Output plumbing (`format`, `out`, `jobs`, `cache`) is left out.
    pub fn canonical(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        match self.params.p_pair() {
            Some((p, pp)) => {
                out.insert("p".into(), p.to_string());
                out.insert("pprime".into(), pp.to_string());
            }
            None => {
                out.insert("k".into(), format_rat(&self.params.k()));
            }
        }
        if let Some(m) = self.m {
            out.insert("m".into(), m.to_string());
        }
        out.insert("mprime".into(), self.m_prime.to_string());
        out.insert("l".into(), self.l.to_string());
        out.insert("degree".into(), self.degree.to_string());
        out.insert("order".into(), self.order.to_string());
        if let Some(j) = &self.j {
            out.insert("j".into(), format_rat(j));
        }
        if let Some(m) = self.source_m {
            out.insert("source_m".into(), m.to_string());
        }
        out.insert("source_mprime".into(), self.source_m_prime.to_string());
        out
    }

    /// `(p, p')` after checking `1 ≤ m ≤ p-1`, `0 ≤ m' ≤ p'-1` for the `--m` label.
    pub fn degenerate_labels(&self) -> Result<(i64, i64), CliError> {
        let m = self.m.ok_or_else(|| CliError::Usage("--m is required".into()))?;
        let (p, pp) = self
            .params
            .p_pair()
            .ok_or_else(|| CliError::Usage("a level with k + 2 > 0 given as p/p' is required".into()))?;
        if m < 1 || m as u64 > p - 1 {
            return Err(CliError::Usage(format!("m = {m} outside 1..={}", p - 1)));
        }
        if self.m_prime < 0 || self.m_prime as u64 > pp - 1 {
            return Err(CliError::Usage(format!("m' = {} outside 0..={}", self.m_prime, pp - 1)));
        }
        Ok((m, self.m_prime))
    }
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses flat `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = normalize_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", n + 1)));
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

/// Merges the config file at `path` (ignored when absent) with flag
/// overrides and validates the result.
///
/// Flags win key by key, except that the level is one unit: if the flags
/// name any of `p`, `pprime`, `k`, the file's level keys are dropped.
pub fn load_config(path: Option<&Path>, overrides: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let mut file = match path {
        Some(p) if p.exists() => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
            parse_config_text(&text)?
        }
        _ => BTreeMap::new(),
    };
    check_level(&file, "config file")?;
    check_level(overrides, "flags")?;
    for key in overrides.keys() {
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("unknown key {key:?}")));
        }
    }
    if overrides.keys().any(|k| LEVEL_KEYS.contains(&k.as_str())) {
        file.retain(|k, _| !LEVEL_KEYS.contains(&k.as_str()));
    }
    file.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
    resolve(&file)
}

fn check_level(layer: &BTreeMap<String, String>, origin: &str) -> Result<(), CliError> {
    if layer.contains_key("k") && (layer.contains_key("p") || layer.contains_key("pprime")) {
        return Err(CliError::Usage(format!("{origin}: give either p and pprime or k, not both")));
    }
    Ok(())
}

fn int_field<T: std::str::FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError> {
    map.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("{key}: cannot parse {v:?}"))))
        .transpose()
}

fn rat_field(map: &BTreeMap<String, String>, key: &str) -> Result<Option<Rat>, CliError> {
    map.get(key)
        .map(|v| parse_rat(v).ok_or_else(|| CliError::Usage(format!("{key}: cannot parse {v:?} as a fraction"))))
        .transpose()
}

/// Levels with `k + 2 > 0` are stored as `p/p'`, others as a bare `k`.
pub fn params_from_k(k: &Rat) -> Result<ModuleParams, CliError> {
    let kp2 = k + int(2);
    let invalid = |e: wakimoto::Error| CliError::Usage(e.to_string());
    if kp2 > int(0) {
        let p: u64 = kp2.numer().try_into().map_err(|_| CliError::Usage("p too large".into()))?;
        let pp: u64 = kp2.denom().try_into().map_err(|_| CliError::Usage("p' too large".into()))?;
        ModuleParams::rational(p, pp).map_err(invalid)
    } else {
        ModuleParams::generic(k.clone()).map_err(invalid)
    }
}

fn resolve(map: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let params = match (int_field::<u64>(map, "p")?, int_field::<u64>(map, "pprime")?, rat_field(map, "k")?) {
        (Some(p), Some(pp), None) => ModuleParams::rational(p, pp).map_err(|e| CliError::Usage(e.to_string()))?,
        (None, None, Some(k)) => params_from_k(&k)?,
        (None, None, None) => return Err(CliError::Usage("a level is required: --p and --pprime, or --k".into())),
        _ => return Err(CliError::Usage("--p and --pprime must be given together".into())),
    };
    let jobs = int_field::<usize>(map, "jobs")?.unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::Usage("jobs must be at least 1".into()));
    }
    Ok(RunConfig {
        params,
        m: int_field(map, "m")?,
        m_prime: int_field(map, "mprime")?.unwrap_or(0),
        l: int_field(map, "l")?.unwrap_or(0),
        degree: int_field(map, "degree")?.unwrap_or(DEFAULT_DEGREE),
        order: int_field(map, "order")?.unwrap_or(DEFAULT_ORDER),
        format: map.get("format").map(|s| Format::parse(s)).transpose()?.unwrap_or(Format::Json),
        out: map.get("out").map(PathBuf::from),
        jobs,
        cache: map.get("cache").map(PathBuf::from),
        j: rat_field(map, "j")?,
        source_m: int_field(map, "source_m")?,
        source_m_prime: int_field(map, "source_mprime")?.unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn parses_comments_and_spacing() {
        let m = parse_config_text("# level\np = 3\npprime=1  # inline\n\norder = 20\n").unwrap();
        assert_eq!(m, flags(&[("p", "3"), ("pprime", "1"), ("order", "20")]));
        assert!(matches!(parse_config_text("colour = red"), Err(CliError::Usage(_))));
        assert!(matches!(parse_config_text("p 3"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "order = 20\np = 3\npprime = 1\n").unwrap();
        let c = load_config(Some(&path), &flags(&[("order", "10")])).unwrap();
        assert_eq!(c.order, 10);
        assert_eq!(c.params.p_pair(), Some((3, 1)));
        let c = load_config(Some(&path), &flags(&[("k", "1/3")])).unwrap();
        assert_eq!(c.params.p_pair(), Some((7, 3)));
    }

    #[test]
    fn rejects_bad_levels() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "k = 0/1\n").unwrap();
        assert!(matches!(load_config(Some(&path), &BTreeMap::new()), Err(CliError::Usage(_))));
        assert!(matches!(load_config(None, &flags(&[("k", "-2")])), Err(CliError::Usage(_))));
        assert!(matches!(
            load_config(None, &flags(&[("k", "1"), ("p", "3"), ("pprime", "1")])),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(load_config(None, &flags(&[("p", "4"), ("pprime", "2")])), Err(CliError::Usage(_))));
        assert!(matches!(load_config(None, &flags(&[("k", "1"), ("jobs", "0")])), Err(CliError::Usage(_))));
    }

    #[test]
    fn missing_file_with_full_flags() {
        let c = load_config(Some(Path::new("/nonexistent/run.cfg")), &flags(&[("k", "7/5"), ("degree", "2")])).unwrap();
        assert_eq!(c.params.k(), wakimoto::rat(7, 5));
        assert_eq!((c.degree, c.order, c.format, c.jobs), (2, DEFAULT_ORDER, Format::Json, 1));
    }

    #[test]
    fn negative_levels_stay_generic() {
        let c = load_config(None, &flags(&[("k", "-7/2")])).unwrap();
        assert_eq!(c.params.p_pair(), None);
        assert_eq!(c.canonical()["k"], "-7/2");
    }
}
