//! Flat `key = value` run configuration. Lines may carry `#` comments;
//! unknown keys, duplicate keys, and keys that do not apply to the chosen
//! system are all rejected, so a config never silently ignores a typo.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nrep_core::anneal::AnnealSchedule;
use nrep_core::models::LevelSpacing;
use nrep_core::pool::PoolKind;
use nrep_core::rdm::RdmKind;
use nrep_core::{Error, Result};

fn spacing_token(spacing: LevelSpacing) -> &'static str {
    match spacing {
        LevelSpacing::OverK => "over_k",
        LevelSpacing::Unit => "unit",
    }
}

/// Which model the run prepares targets from.
#[derive(Debug, Clone, PartialEq)]
pub enum SystemSpec {
    Molecular { fcidump: PathBuf },
    Bcs { k: usize, g: f64, spacing: LevelSpacing },
    Xxz { k: usize, delta: f64 },
}

impl SystemSpec {
    pub fn token(&self) -> &'static str {
        match self {
            SystemSpec::Molecular { .. } => "molecular",
            SystemSpec::Bcs { .. } => "bcs",
            SystemSpec::Xxz { .. } => "xxz",
        }
    }

    /// Human-readable description used in provenance strings.
    pub fn describe(&self) -> String {
        match self {
            SystemSpec::Molecular { fcidump } => format!("molecular ({})", fcidump.display()),
            SystemSpec::Bcs { k, g, spacing } => {
                format!("bcs (k = {k}, g = {g}, levels = {})", spacing_token(*spacing))
            }
            SystemSpec::Xxz { k, delta } => format!("xxz (k = {k}, delta = {delta})"),
        }
    }
}

/// Where the target matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSource {
    ExactGround,
    /// 0-based position in the ascending exact spectrum; 1 is the first
    /// state above the ground state.
    ExactExcited { level: usize },
    File { path: PathBuf },
}

/// A fully resolved run request.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub pool: PoolKind,
    pub target_source: TargetSource,
    pub target_kind: RdmKind,
    pub noise_epsilon: f64,
    pub noise_seed: u64,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub schedule: AnnealSchedule,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    parse_config_text(&text)
}

const KNOWN_KEYS: &[&str] = &[
    "system",
    "fcidump",
    "k",
    "g",
    "level_spacing",
    "delta",
    "pool",
    "target_source",
    "excited_level",
    "target_file",
    "target_kind",
    "noise_epsilon",
    "noise_seed",
    "seeds",
    "output_dir",
    "t_initial",
    "t_decay",
    "theta_max_initial",
    "theta_decay",
    "theta_growth",
    "stall_epsilon",
    "stall_window",
    "max_iterations",
];

pub fn parse_config_text(text: &str) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(line_no, format!("expected 'key = value', got '{line}'")));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::parse(line_no, format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(Error::parse(line_no, format!("key '{key}' has an empty value")));
        }
        if entries.insert(key.clone(), (line_no, value)).is_some() {
            return Err(Error::parse(line_no, format!("duplicate key '{key}'")));
        }
    }

    let mut take = |key: &str| entries.remove(key);
    let parse_f64 = |key: &str, (line, v): &(usize, String)| -> Result<f64> {
        let x: f64 = v
            .parse()
            .map_err(|_| Error::parse(*line, format!("bad number for '{key}': '{v}'")))?;
        if !x.is_finite() {
            return Err(Error::parse(*line, format!("'{key}' must be finite")));
        }
        Ok(x)
    };
    let parse_usize = |key: &str, (line, v): &(usize, String)| -> Result<usize> {
        v.parse()
            .map_err(|_| Error::parse(*line, format!("bad integer for '{key}': '{v}'")))
    };
    let parse_u64 = |key: &str, (line, v): &(usize, String)| -> Result<u64> {
        v.parse()
            .map_err(|_| Error::parse(*line, format!("bad integer for '{key}': '{v}'")))
    };

    // ---- system ----
    let (system_line, system_token) = take("system")
        .ok_or_else(|| Error::domain("config must set 'system'"))?;
    let fcidump = take("fcidump");
    let k = take("k");
    let g = take("g");
    let level_spacing = take("level_spacing");
    let delta = take("delta");
    let reject_inapplicable = |entry: &Option<(usize, String)>, key: &str, sys: &str| -> Result<()> {
        if let Some((line, _)) = entry {
            return Err(Error::parse(
                *line,
                format!("key '{key}' does not apply to system = {sys}"),
            ));
        }
        Ok(())
    };
    let system = match system_token.as_str() {
        "molecular" => {
            reject_inapplicable(&k, "k", "molecular")?;
            reject_inapplicable(&g, "g", "molecular")?;
            reject_inapplicable(&level_spacing, "level_spacing", "molecular")?;
            reject_inapplicable(&delta, "delta", "molecular")?;
            let (_, path) = fcidump
                .ok_or_else(|| Error::domain("system = molecular requires 'fcidump'"))?;
            SystemSpec::Molecular { fcidump: PathBuf::from(path) }
        }
        "bcs" => {
            reject_inapplicable(&fcidump, "fcidump", "bcs")?;
            reject_inapplicable(&delta, "delta", "bcs")?;
            let k_entry = k.ok_or_else(|| Error::domain("system = bcs requires 'k'"))?;
            let g_entry = g.ok_or_else(|| Error::domain("system = bcs requires 'g'"))?;
            let spacing = match &level_spacing {
                Some((line, token)) => match token.as_str() {
                    "over_k" => LevelSpacing::OverK,
                    "unit" => LevelSpacing::Unit,
                    other => {
                        return Err(Error::parse(
                            *line,
                            format!("unknown level_spacing '{other}' (expected over_k or unit)"),
                        ));
                    }
                },
                None => LevelSpacing::OverK,
            };
            SystemSpec::Bcs {
                k: parse_usize("k", &k_entry)?,
                g: parse_f64("g", &g_entry)?,
                spacing,
            }
        }
        "xxz" => {
            reject_inapplicable(&fcidump, "fcidump", "xxz")?;
            reject_inapplicable(&g, "g", "xxz")?;
            reject_inapplicable(&level_spacing, "level_spacing", "xxz")?;
            let k_entry = k.ok_or_else(|| Error::domain("system = xxz requires 'k'"))?;
            let d_entry = delta.ok_or_else(|| Error::domain("system = xxz requires 'delta'"))?;
            SystemSpec::Xxz {
                k: parse_usize("k", &k_entry)?,
                delta: parse_f64("delta", &d_entry)?,
            }
        }
        other => {
            return Err(Error::parse(
                system_line,
                format!("unknown system '{other}' (expected molecular, bcs, or xxz)"),
            ));
        }
    };

    // ---- pool ----
    let pool = match take("pool") {
        Some((line, token)) => {
            let pool = PoolKind::from_token(&token).ok_or_else(|| {
                Error::parse(line, format!("unknown pool '{token}'"))
            })?;
            let compatible = match system {
                SystemSpec::Molecular { .. } => pool != PoolKind::Pair,
                _ => pool == PoolKind::Pair,
            };
            if !compatible {
                return Err(Error::parse(
                    line,
                    format!("pool {} does not act on system = {}", pool.token(), system.token()),
                ));
            }
            pool
        }
        None => match system {
            SystemSpec::Molecular { .. } => PoolKind::GsdSpinFiltered,
            _ => PoolKind::Pair,
        },
    };

    // ---- target ----
    let (kind_line, kind_token) = take("target_kind")
        .ok_or_else(|| Error::domain("config must set 'target_kind'"))?;
    let target_kind = RdmKind::from_token(&kind_token)
        .ok_or_else(|| Error::parse(kind_line, format!("unknown target_kind '{kind_token}'")))?;
    let kind_ok = match system {
        SystemSpec::Molecular { .. } => target_kind != RdmKind::Doci,
        _ => target_kind == RdmKind::Doci,
    };
    if !kind_ok {
        return Err(Error::parse(
            kind_line,
            format!(
                "target_kind {} does not apply to system = {}",
                target_kind.token(),
                system.token()
            ),
        ));
    }

    let (source_line, source_token) = take("target_source")
        .ok_or_else(|| Error::domain("config must set 'target_source'"))?;
    let excited_level = take("excited_level");
    let target_file = take("target_file");
    let target_source = match source_token.as_str() {
        "exact_ground" => {
            reject_inapplicable(&excited_level, "excited_level", "target_source = exact_ground")?;
            reject_inapplicable(&target_file, "target_file", "target_source = exact_ground")?;
            TargetSource::ExactGround
        }
        "exact_excited" => {
            reject_inapplicable(&target_file, "target_file", "target_source = exact_excited")?;
            let level = match excited_level {
                Some(entry) => {
                    let level = parse_usize("excited_level", &entry)?;
                    if level == 0 {
                        return Err(Error::parse(
                            entry.0,
                            "excited_level 0 is the ground state; use target_source = exact_ground",
                        ));
                    }
                    level
                }
                None => 1,
            };
            TargetSource::ExactExcited { level }
        }
        "file" => {
            reject_inapplicable(&excited_level, "excited_level", "target_source = file")?;
            let (_, path) = target_file
                .ok_or_else(|| Error::domain("target_source = file requires 'target_file'"))?;
            TargetSource::File { path: PathBuf::from(path) }
        }
        other => {
            return Err(Error::parse(
                source_line,
                format!("unknown target_source '{other}'"),
            ));
        }
    };

    // ---- noise ----
    let noise_epsilon = match take("noise_epsilon") {
        Some(entry) => {
            let eps = parse_f64("noise_epsilon", &entry)?;
            if eps < 0.0 {
                return Err(Error::parse(entry.0, "noise_epsilon must be non-negative"));
            }
            eps
        }
        None => 0.0,
    };
    let noise_seed = match take("noise_seed") {
        Some(entry) => parse_u64("noise_seed", &entry)?,
        None => 1234,
    };

    // ---- seeds and output ----
    let seeds = match take("seeds") {
        Some((line, list)) => {
            let mut seeds = Vec::new();
            for piece in list.split(',') {
                let piece = piece.trim();
                let seed: u64 = piece.parse().map_err(|_| {
                    Error::parse(line, format!("bad seed '{piece}' in '{list}'"))
                })?;
                seeds.push(seed);
            }
            if seeds.is_empty() {
                return Err(Error::parse(line, "'seeds' must list at least one seed"));
            }
            seeds
        }
        None => vec![1],
    };
    let (_, output_dir) = take("output_dir")
        .ok_or_else(|| Error::domain("config must set 'output_dir'"))?;
    let output_dir = PathBuf::from(output_dir);

    // ---- schedule ----
    let mut schedule = AnnealSchedule::default();
    if let Some(entry) = take("t_initial") {
        schedule.t_initial = parse_f64("t_initial", &entry)?;
    }
    if let Some(entry) = take("t_decay") {
        schedule.t_decay = parse_f64("t_decay", &entry)?;
    }
    if let Some(entry) = take("theta_max_initial") {
        schedule.theta_max_initial = parse_f64("theta_max_initial", &entry)?;
    }
    if let Some(entry) = take("theta_decay") {
        schedule.theta_decay = parse_f64("theta_decay", &entry)?;
    }
    if let Some(entry) = take("theta_growth") {
        schedule.theta_growth = parse_f64("theta_growth", &entry)?;
    }
    if let Some(entry) = take("stall_epsilon") {
        schedule.stall_epsilon = parse_f64("stall_epsilon", &entry)?;
    }
    if let Some(entry) = take("stall_window") {
        schedule.stall_window = parse_usize("stall_window", &entry)?;
    }
    if let Some(entry) = take("max_iterations") {
        schedule.max_iterations = parse_usize("max_iterations", &entry)?;
    }
    schedule.validate()?;

    Ok(RunConfig {
        system,
        pool,
        target_source,
        target_kind,
        noise_epsilon,
        noise_seed,
        seeds,
        output_dir,
        schedule,
    })
}

/// Every effective setting, defaults included, as a sorted string map.
/// Rendering the map back to `key = value` lines parses to the same config.
pub fn resolved_map(cfg: &RunConfig) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        map.insert(k.to_string(), v);
    };
    put("system", cfg.system.token().to_string());
    match &cfg.system {
        SystemSpec::Molecular { fcidump } => put("fcidump", fcidump.display().to_string()),
        SystemSpec::Bcs { k, g, spacing } => {
            put("k", k.to_string());
            put("g", format!("{g:?}"));
            put("level_spacing", spacing_token(*spacing).to_string());
        }
        SystemSpec::Xxz { k, delta } => {
            put("k", k.to_string());
            put("delta", format!("{delta:?}"));
        }
    }
    put("pool", cfg.pool.token().to_string());
    match &cfg.target_source {
        TargetSource::ExactGround => put("target_source", "exact_ground".to_string()),
        TargetSource::ExactExcited { level } => {
            put("target_source", "exact_excited".to_string());
            put("excited_level", level.to_string());
        }
        TargetSource::File { path } => {
            put("target_source", "file".to_string());
            put("target_file", path.display().to_string());
        }
    }
    put("target_kind", cfg.target_kind.token().to_string());
    put("noise_epsilon", format!("{:?}", cfg.noise_epsilon));
    put("noise_seed", cfg.noise_seed.to_string());
    put(
        "seeds",
        cfg.seeds.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(","),
    );
    put("output_dir", cfg.output_dir.display().to_string());
    let s = &cfg.schedule;
    put("t_initial", format!("{:?}", s.t_initial));
    put("t_decay", format!("{:?}", s.t_decay));
    put("theta_max_initial", format!("{:?}", s.theta_max_initial));
    put("theta_decay", format!("{:?}", s.theta_decay));
    put("theta_growth", format!("{:?}", s.theta_growth));
    put("stall_epsilon", format!("{:?}", s.stall_epsilon));
    put("stall_window", s.stall_window.to_string());
    put("max_iterations", s.max_iterations.to_string());
    map
}

/// Renders a resolved map as config text.
pub fn map_to_config_text(map: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    for (k, v) in map {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}
