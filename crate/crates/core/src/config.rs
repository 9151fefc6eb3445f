//! Run configuration from a `key = value` file and command-line overrides.
//!
//! File lines are `key = value`; `#` starts a comment. Keys accept `-` or
//! `_` interchangeably. Flags override file entries.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::analysis::max_stable_sigma;
use crate::error::{Error, Result};
use crate::fct::LimiterMode;
use crate::problems::{IcKind, Length, ProblemSpec, COSINE8_RADIUS};
use crate::schemes::{scheme_coefficients, ProductOrder, SchemeName};
use crate::solver::RunSettings;
use crate::velocity::VelocityKind;

pub const MIN_CELLS: usize = 16;

/// Every key a config file or flag may set.
pub const KEYS: [&str; 12] = [
    "ic",
    "velocity",
    "dim",
    "scheme",
    "order",
    "sigma",
    "n",
    "t_final",
    "limiter",
    "output",
    "dump_every",
    "cosine_radius",
];

const REQUIRED: [&str; 4] = ["ic", "velocity", "scheme", "n"];

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub ic: IcKind,
    pub velocity: VelocityKind,
    pub dim: usize,
    pub scheme: SchemeName,
    pub order: ProductOrder,
    pub sigma: f64,
    pub n: usize,
    pub t_final: f64,
    pub limiter: LimiterMode,
    /// Directory receiving the run's CSV and metadata files.
    pub output: PathBuf,
    /// Write a snapshot every this many steps; 0 disables snapshots.
    pub dump_every: usize,
    pub cosine_radius: Length,
}

impl RunConfig {
    pub fn problem(&self) -> Result<ProblemSpec> {
        ProblemSpec::new(self.ic, self.velocity, self.dim)?.with_cosine_radius(self.cosine_radius)
    }

    pub fn settings(&self) -> RunSettings {
        RunSettings {
            order: self.order,
            ..RunSettings::new(self.scheme, self.sigma, self.limiter)
        }
    }

    /// Largest stable CFL number for the configured update.
    pub fn sigma_limit(&self) -> f64 {
        match self.limiter {
            LimiterMode::OffLow => 1.0,
            _ => max_stable_sigma(&scheme_coefficients(self.scheme), self.dim),
        }
    }

    /// `(key, value)` pairs in the config file format.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("ic", self.ic.to_string()),
            ("velocity", self.velocity.to_string()),
            ("dim", self.dim.to_string()),
            ("scheme", self.scheme.to_string()),
            ("order", self.order.as_usize().to_string()),
            ("sigma", self.sigma.to_string()),
            ("n", self.n.to_string()),
            ("t_final", self.t_final.to_string()),
            ("limiter", self.limiter.to_string()),
            ("output", self.output.display().to_string()),
            ("dump_every", self.dump_every.to_string()),
            ("cosine_radius", format_length(self.cosine_radius)),
        ]
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.entries() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn format_length(l: Length) -> String {
    match l {
        Length::Physical(v) => v.to_string(),
        Length::Cells(c) => format!("{c}h"),
    }
}

/// Raw key/value layers before validation.
#[derive(Clone, Debug, Default)]
pub struct ConfigSource {
    values: BTreeMap<String, String>,
}

fn normalize_key(key: &str) -> Result<String> {
    let k = key.trim().replace('-', "_").to_ascii_lowercase();
    if KEYS.contains(&k.as_str()) {
        Ok(k)
    } else {
        Err(Error::config(key.trim(), "unknown key"))
    }
}

impl ConfigSource {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key`, replacing any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        self.values
            .insert(normalize_key(key)?, value.into().trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Adds the entries of a config file's text.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    format!("expected 'key = value', found '{line}'"),
                ));
            };
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.merge_text(&text)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn parsed<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Option<T>) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => parse(v).ok_or_else(|| Error::config(key, format!("cannot parse '{v}'"))),
        }
    }

    /// Validates the merged entries.
    pub fn build(&self) -> Result<RunConfig> {
        for key in REQUIRED {
            self.required(key)?;
        }
        let ic: IcKind = self
            .required("ic")?
            .parse()
            .map_err(|e: Error| Error::config("ic", e.to_string()))?;
        let velocity: VelocityKind = self
            .required("velocity")?
            .parse()
            .map_err(|e: Error| Error::config("velocity", e.to_string()))?;
        let scheme: SchemeName = self
            .required("scheme")?
            .parse()
            .map_err(|e: Error| Error::config("scheme", e.to_string()))?;
        let default_dim = match velocity {
            VelocityKind::ConstantDiagonal => 1,
            VelocityKind::SolidBodyRotation => 2,
        };
        let dim = self.parsed("dim", default_dim, |v| v.parse().ok())?;
        if dim != 1 && dim != 2 {
            return Err(Error::config("dim", "dim must be 1 or 2"));
        }
        let order = match self.get("order") {
            None => scheme_coefficients(scheme).default_product_order(),
            Some(v) => v
                .parse::<usize>()
                .map_err(|_| Error::config("order", format!("cannot parse '{v}'")))
                .and_then(|o| {
                    ProductOrder::from_usize(o).map_err(|e| Error::config("order", e.to_string()))
                })?,
        };
        let sigma: f64 = self.parsed("sigma", 0.8, |v| v.parse().ok())?;
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::config("sigma", "sigma must be positive"));
        }
        let n: usize = self.parsed("n", 0, |v| v.parse().ok())?;
        if n < MIN_CELLS {
            return Err(Error::config(
                "n",
                format!("n must be at least {MIN_CELLS}"),
            ));
        }
        let t_final: f64 = self.parsed("t_final", 1.0, |v| v.parse().ok())?;
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::config("t_final", "t_final must be non-negative"));
        }
        let limiter = match self.get("limiter") {
            None => LimiterMode::On,
            Some(v) => v.parse()?,
        };
        let output = PathBuf::from(self.get("output").unwrap_or("out"));
        if output.as_os_str().is_empty() {
            return Err(Error::config("output", "output path is empty"));
        }
        let dump_every = self.parsed("dump_every", 0, |v| v.parse().ok())?;
        let cosine_radius = self.parsed(
            "cosine_radius",
            Length::Physical(COSINE8_RADIUS),
            parse_length,
        )?;
        let config = RunConfig {
            ic,
            velocity,
            dim,
            scheme,
            order,
            sigma,
            n,
            t_final,
            limiter,
            output,
            dump_every,
            cosine_radius,
        };
        config
            .problem()
            .map_err(|e| Error::config("ic", e.to_string()))?;
        Ok(config)
    }
}

/// A plain number is a physical length; a trailing `h` counts cells.
fn parse_length(v: &str) -> Option<Length> {
    let l = match v.strip_suffix('h') {
        Some(c) => Length::Cells(c.trim().parse().ok()?),
        None => Length::Physical(v.parse().ok()?),
    };
    let x = match l {
        Length::Physical(x) | Length::Cells(x) => x,
    };
    (x > 0.0 && x.is_finite()).then_some(l)
}

/// Merges an optional file with flag overrides and validates the result.
/// Returns the config and any warnings, such as a CFL number above the
/// stability limit.
pub fn parse_config(
    file: Option<&Path>,
    overrides: &[(&str, String)],
) -> Result<(RunConfig, Vec<String>)> {
    let mut source = ConfigSource::new();
    if let Some(path) = file {
        source.merge_file(path)?;
    }
    for (k, v) in overrides {
        source.set(k, v.clone())?;
    }
    let config = source.build()?;
    let mut warnings = Vec::new();
    let limit = config.sigma_limit();
    if config.sigma > limit {
        warnings.push(format!(
            "sigma = {} exceeds the stability limit {:.3} for {} in {}D; the run may blow up",
            config.sigma, limit, config.scheme, config.dim
        ));
    }
    Ok((config, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&'static str, &str)]) -> Vec<(&'static str, String)> {
        pairs.iter().map(|&(k, v)| (k, v.to_string())).collect()
    }

    fn base() -> Vec<(&'static str, String)> {
        flags(&[
            ("ic", "square"),
            ("velocity", "constant"),
            ("scheme", "u9"),
            ("n", "128"),
        ])
    }

    fn key_of(e: Error) -> String {
        match e {
            Error::Config { key, .. } => key,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn flags_alone_give_a_valid_config() {
        let mut f = base();
        f.extend(flags(&[("sigma", "0.8"), ("t-final", "1.0")]));
        let (c, warnings) = parse_config(None, &f).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(c.ic, IcKind::Square);
        assert_eq!(c.dim, 1);
        assert_eq!(c.scheme, SchemeName::U9);
        assert_eq!(c.order, ProductOrder::Sixth);
        assert_eq!(c.n, 128);
        assert_eq!(c.limiter, LimiterMode::On);
    }

    #[test]
    fn zero_sigma_is_rejected() {
        let mut f = base();
        f.push(("sigma", "0".into()));
        let e = parse_config(None, &f).unwrap_err();
        assert!(e.to_string().contains("sigma must be positive"));
        assert_eq!(key_of(e), "sigma");
    }

    #[test]
    fn flags_override_file() {
        let mut s = ConfigSource::new();
        s.merge_text(
            "# comment\nic = cosine8\nvelocity = constant # trailing\nscheme = u5\nn = 64\n\n",
        )
        .unwrap();
        s.set("n", "128").unwrap();
        assert_eq!(s.build().unwrap().n, 128);
    }

    #[test]
    fn errors_name_the_key() {
        let mut s = ConfigSource::new();
        assert_eq!(key_of(s.merge_text("bogus = 1").unwrap_err()), "bogus");
        s.merge_text("ic = square\nvelocity = constant\nscheme = u5")
            .unwrap();
        assert_eq!(key_of(s.build().unwrap_err()), "n");
        s.set("n", "abc").unwrap();
        assert_eq!(key_of(s.build().unwrap_err()), "n");
        s.set("n", "8").unwrap();
        assert_eq!(key_of(s.build().unwrap_err()), "n");
        s.set("n", "32").unwrap();
        s.set("scheme", "x3").unwrap();
        assert_eq!(key_of(s.build().unwrap_err()), "scheme");
        s.set("scheme", "u5").unwrap();
        s.set("limiter", "maybe").unwrap();
        assert_eq!(key_of(s.build().unwrap_err()), "limiter");
        s.set("limiter", "off-low").unwrap();
        s.set("order", "3").unwrap();
        assert_eq!(key_of(s.build().unwrap_err()), "order");
        assert_eq!(
            key_of(
                ConfigSource::new()
                    .merge_text("no equals sign")
                    .unwrap_err()
            ),
            "line 1"
        );
    }

    #[test]
    fn dimension_defaults_follow_velocity() {
        let f = flags(&[
            ("ic", "slotted-cylinder"),
            ("velocity", "rotation"),
            ("scheme", "u9"),
            ("n", "32"),
        ]);
        assert_eq!(parse_config(None, &f).unwrap().0.dim, 2);
        let mut bad = f.clone();
        bad.push(("dim", "1".into()));
        assert_eq!(key_of(parse_config(None, &bad).unwrap_err()), "ic");
    }

    #[test]
    fn large_sigma_warns() {
        let mut f = base();
        f.push(("sigma", "1.9".into()));
        let (_, warnings) = parse_config(None, &f).unwrap();
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn cosine_radius_units() {
        assert_eq!(parse_length("15h"), Some(Length::Cells(15.0)));
        assert_eq!(parse_length("0.25"), Some(Length::Physical(0.25)));
        assert_eq!(parse_length("-1"), None);
    }

    #[test]
    fn display_round_trips() {
        let mut f = base();
        f.extend(flags(&[
            ("cosine_radius", "15h"),
            ("dump_every", "10"),
            ("limiter", "off"),
        ]));
        let (c, _) = parse_config(None, &f).unwrap();
        let mut s = ConfigSource::new();
        s.merge_text(&c.to_string()).unwrap();
        assert_eq!(s.build().unwrap(), c);
    }
}
