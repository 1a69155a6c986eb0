//! Parameter files.
//!
//! ```text
//! theta = 4/7
//!
//! [section2]
//! R = 1.023
//! P1 = [-0.064, 0.112]
//! P2 = [1.305, -0.276, -0.025]
//!
//! [section3]
//! R = 1.104
//! delta = 0.869
//! P = [-0.274, -0.334, 0.005]
//! Q = [-0.609, -0.572, -4.895]
//! ```
//!
//! Keys may also be written fully qualified (`section3.delta = 0.869`) outside
//! any section. Missing keys keep the built-in reference values. Numbers are
//! read as exact rationals.

use std::collections::HashSet;
use std::fmt;

use num_traits::Signed;

use crate::meanvalue::{reference_params, theta_max, EtaSpec, MollifierPair};
use crate::optimize::{DegreeCaps, SearchSpace, Target};
use crate::polyalg::{
    format_rat, p_basis, parse_rat, q_basis, rat_from_f64, rat_to_f64, BasisKind, Rat,
    P_BASIS_MAX_LEN, Q_BASIS_MAX_LEN,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, field: Option<&str>, message: impl Into<String>) -> Self {
        ConfigError {
            line: Some(line),
            field: field.map(str::to_string),
            message: message.into(),
        }
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line: None,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(k) = &self.field {
            write!(f, "{k}: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Section2Params {
    pub r: Rat,
    pub p1: Vec<Rat>,
    pub p2: Vec<Rat>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section3Params {
    pub r: Rat,
    pub delta: Rat,
    pub p: Vec<Rat>,
    pub q: Vec<Rat>,
}

/// Parameter file contents: `θ` plus one block per mean value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub theta: Rat,
    pub section2: Section2Params,
    pub section3: Section3Params,
}

impl Default for RunConfig {
    fn default() -> Self {
        let rats = |v: &[&str]| v.iter().map(|s| parse_rat(s).unwrap()).collect::<Vec<_>>();
        RunConfig {
            theta: theta_max(),
            section2: Section2Params {
                r: parse_rat(reference_params::SECTION2_R).unwrap(),
                p1: rats(&reference_params::P1_COEFFS),
                p2: rats(&reference_params::P2_COEFFS),
            },
            section3: Section3Params {
                r: parse_rat(reference_params::SECTION3_R).unwrap(),
                delta: parse_rat(reference_params::SECTION3_DELTA).unwrap(),
                p: rats(&reference_params::P_COEFFS),
                q: rats(&reference_params::Q_COEFFS),
            },
        }
    }
}

const KEYS: [&str; 8] = [
    "theta",
    "section2.R",
    "section2.P1",
    "section2.P2",
    "section3.R",
    "section3.delta",
    "section3.P",
    "section3.Q",
];

fn is_array_key(key: &str) -> bool {
    matches!(key, "section2.P1" | "section2.P2" | "section3.P" | "section3.Q")
}

fn parse_number(line: usize, key: &str, s: &str) -> Result<Rat, ConfigError> {
    parse_rat(s).map_err(|e| ConfigError::at(line, Some(key), e.to_string()))
}

fn parse_array(line: usize, key: &str, s: &str) -> Result<Vec<Rat>, ConfigError> {
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| ConfigError::at(line, Some(key), format!("expected `[...]`, found `{s}`")))?;
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner
        .split(',')
        .enumerate()
        .map(|(i, item)| {
            parse_rat(item).map_err(|e| ConfigError::at(line, Some(&format!("{key}[{i}]")), e.to_string()))
        })
        .collect()
}

impl RunConfig {
    /// Parses a parameter file on top of the reference values.
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut cfg = RunConfig::default();
        let mut section: Option<String> = None;
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                if !content.contains('=') {
                    let name = rest
                        .strip_suffix(']')
                        .ok_or_else(|| ConfigError::at(line, None, format!("malformed section header `{content}`")))?
                        .trim();
                    if name != "section2" && name != "section3" {
                        return Err(ConfigError::at(line, None, format!("unknown section `{name}`")));
                    }
                    section = Some(name.to_string());
                    continue;
                }
            }
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, None, format!("expected `key = value`, found `{content}`")))?;
            let (k, v) = (k.trim(), v.trim());
            let key = match (&section, k.contains('.')) {
                (Some(s), false) => format!("{s}.{k}"),
                _ => k.to_string(),
            };
            if !KEYS.contains(&key.as_str()) {
                return Err(ConfigError::at(line, Some(&key), "unknown key"));
            }
            if !seen.insert(key.clone()) {
                return Err(ConfigError::at(line, Some(&key), "duplicate key"));
            }
            if is_array_key(&key) {
                let arr = parse_array(line, &key, v)?;
                match key.as_str() {
                    "section2.P1" => cfg.section2.p1 = arr,
                    "section2.P2" => cfg.section2.p2 = arr,
                    "section3.P" => cfg.section3.p = arr,
                    _ => cfg.section3.q = arr,
                }
            } else {
                let x = parse_number(line, &key, v)?;
                match key.as_str() {
                    "theta" => cfg.theta = x,
                    "section2.R" => cfg.section2.r = x,
                    "section3.R" => cfg.section3.r = x,
                    _ => cfg.section3.delta = x,
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range and length checks, then the mean-value invariants.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let max_len = [
            ("section2.P1", self.section2.p1.len(), P_BASIS_MAX_LEN),
            ("section2.P2", self.section2.p2.len(), P_BASIS_MAX_LEN + 1),
            ("section3.P", self.section3.p.len(), P_BASIS_MAX_LEN),
            ("section3.Q", self.section3.q.len(), Q_BASIS_MAX_LEN),
        ];
        for (key, len, max) in max_len {
            if len > max {
                return Err(ConfigError::field(key, format!("{len} coefficients, at most {max} allowed")));
            }
        }
        if !self.theta.is_positive() || self.theta > theta_max() {
            return Err(ConfigError::field("theta", "must lie in (0, 4/7]"));
        }
        for (key, r) in [("section2.R", &self.section2.r), ("section3.R", &self.section3.r)] {
            if !r.is_positive() {
                return Err(ConfigError::field(key, "must be positive"));
            }
        }
        let d = &self.section3.delta;
        if d.is_negative() || *d > Rat::from_integer(1.into()) {
            return Err(ConfigError::field("section3.delta", "must lie in [0, 1]"));
        }
        self.mollifier_pair()?;
        self.eta_spec()?;
        Ok(())
    }

    pub fn mollifier_pair(&self) -> Result<MollifierPair, ConfigError> {
        MollifierPair::new(
            self.theta.clone(),
            self.section2.r.clone(),
            p_basis(BasisKind::Section2P1, &self.section2.p1),
            p_basis(BasisKind::Section2P2, &self.section2.p2),
        )
        .map_err(|e| ConfigError::field("section2", e.to_string()))
    }

    pub fn eta_spec(&self) -> Result<EtaSpec, ConfigError> {
        EtaSpec::new(
            self.theta.clone(),
            self.section3.r.clone(),
            self.section3.delta.clone(),
            p_basis(BasisKind::Section3P, &self.section3.p),
            q_basis(&self.section3.q),
        )
        .map_err(|e| ConfigError::field("section3", e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let arr = |v: &[Rat]| {
            let items: Vec<String> = v.iter().map(format_rat).collect();
            format!("[{}]", items.join(", "))
        };
        format!(
            "theta = {}\n\n[section2]\nR = {}\nP1 = {}\nP2 = {}\n\n[section3]\nR = {}\ndelta = {}\nP = {}\nQ = {}\n",
            format_rat(&self.theta),
            format_rat(&self.section2.r),
            arr(&self.section2.p1),
            arr(&self.section2.p2),
            format_rat(&self.section3.r),
            format_rat(&self.section3.delta),
            arr(&self.section3.p),
            arr(&self.section3.q),
        )
    }

    /// Search space for `target` with caps widened to fit this file's arrays.
    pub fn search_space(&self, target: Target) -> SearchSpace {
        let d = DegreeCaps::default();
        let mut space = SearchSpace::new(target);
        space.theta = self.theta.clone();
        space.caps = DegreeCaps {
            p1: d.p1.max(self.section2.p1.len()),
            p2: d.p2.max(self.section2.p2.len()),
            p: d.p.max(self.section3.p.len()),
            q: d.q.max(self.section3.q.len()),
        };
        space
    }

    /// This file as a point of `space`, zero-padded to the caps.
    pub fn to_point(&self, space: &SearchSpace) -> Vec<f64> {
        let padded = |v: &[Rat], n: usize| -> Vec<f64> {
            (0..n).map(|i| v.get(i).map(rat_to_f64).unwrap_or(0.0)).collect()
        };
        let c = space.caps;
        let mut s2 = vec![rat_to_f64(&self.section2.r)];
        s2.extend(padded(&self.section2.p1, c.p1));
        s2.extend(padded(&self.section2.p2, c.p2));
        let mut s3 = vec![rat_to_f64(&self.section3.r), rat_to_f64(&self.section3.delta)];
        s3.extend(padded(&self.section3.p, c.p));
        s3.extend(padded(&self.section3.q, c.q));
        match space.target {
            Target::Section2 => s2,
            Target::Section3 => s3,
            Target::Combined => s2.into_iter().chain(s3).collect(),
        }
    }

    /// Replaces the blocks covered by `space` with the point `x`.
    /// Each value is stored as the shortest decimal that reads back to the same double.
    pub fn with_point(&self, space: &SearchSpace, x: &[f64]) -> RunConfig {
        let mut out = self.clone();
        let c = space.caps;
        let set2 = |out: &mut RunConfig, x: &[f64]| {
            out.section2.r = exact(x[0]);
            out.section2.p1 = x[1..1 + c.p1].iter().map(|&v| exact(v)).collect();
            out.section2.p2 = x[1 + c.p1..1 + c.p1 + c.p2].iter().map(|&v| exact(v)).collect();
        };
        let set3 = |out: &mut RunConfig, x: &[f64]| {
            out.section3.r = exact(x[0]);
            out.section3.delta = exact(x[1]);
            out.section3.p = x[2..2 + c.p].iter().map(|&v| exact(v)).collect();
            out.section3.q = x[2 + c.p..2 + c.p + c.q].iter().map(|&v| exact(v)).collect();
        };
        match space.target {
            Target::Section2 => set2(&mut out, x),
            Target::Section3 => set3(&mut out, x),
            Target::Combined => {
                let off = 1 + c.p1 + c.p2;
                set2(&mut out, &x[..off]);
                set3(&mut out, &x[off..]);
            }
        }
        out
    }
}

fn exact(v: f64) -> Rat {
    let short = format!("{v}");
    match parse_rat(&short) {
        Ok(r) if rat_to_f64(&r).to_bits() == v.to_bits() => r,
        _ => rat_from_f64(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rat;

    #[test]
    fn empty_file_is_reference() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
        assert_eq!(RunConfig::parse("# nothing\n\n").unwrap(), RunConfig::default());
    }

    #[test]
    fn reads_sections_and_dotted_keys() {
        let text = "theta = 1/2\n[section2]\nR = 0.9\nP1 = []\n\nsection3.delta = 0.5 # inline\n[section3]\nQ = [1, -2]\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.theta, rat(1, 2));
        assert_eq!(cfg.section2.r, rat(9, 10));
        assert!(cfg.section2.p1.is_empty());
        assert_eq!(cfg.section3.delta, rat(1, 2));
        assert_eq!(cfg.section3.q, vec![rat(1, 1), rat(-2, 1)]);
    }

    #[test]
    fn diagnostics_name_line_and_field() {
        let e = RunConfig::parse("[section2]\nR = 1\nP1 = [0.1, x]\n").unwrap_err();
        assert_eq!(e.line, Some(3));
        assert_eq!(e.field.as_deref(), Some("section2.P1[1]"));
        let e = RunConfig::parse("\n[section3]\ngamma = 2\n").unwrap_err();
        assert_eq!((e.line, e.field.as_deref()), (Some(3), Some("section3.gamma")));
        let e = RunConfig::parse("theta = 1\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("theta"));
        let e = RunConfig::parse("[section4]\n").unwrap_err();
        assert_eq!(e.line, Some(1));
        let e = RunConfig::parse("section3.R = 1\nsection3.R = 2\n").unwrap_err();
        assert!(e.message.contains("duplicate"));
        let e = RunConfig::parse("[section3]\nQ = [1, 2, 3, 4, 5]\n").unwrap_err();
        assert_eq!(e.field.as_deref(), Some("section3.Q"));
    }

    #[test]
    fn text_round_trip() {
        let cfg = RunConfig::default();
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn point_round_trip_is_bit_identical() {
        let cfg = RunConfig::default();
        let space = cfg.search_space(Target::Combined);
        let x: Vec<f64> = cfg
            .to_point(&space)
            .iter()
            .enumerate()
            .map(|(i, v)| v + (i as f64 + 1.0).sqrt() * 1e-3)
            .collect();
        let written = cfg.with_point(&space, &x).to_text();
        let back = RunConfig::parse(&written).unwrap();
        let y = back.to_point(&back.search_space(Target::Combined));
        assert_eq!(x.len(), y.len());
        for (a, b) in x.iter().zip(&y) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
