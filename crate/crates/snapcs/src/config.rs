//! Text description of an imaging system.
//!
//! One `key=value` per line; blank lines and `#` comments are ignored.
//!
//! ```text
//! mode=dcchi
//! dims=64,64,8
//! dispersion_step=1
//! response=1,1,1,1,1,1,1,1
//! mask=mask.hsp
//! seed=11
//! ```
//!
//! `response` and `pan_response` default to all ones, `dispersion_step` to 1.
//! A relative mask path is resolved against the configuration file.

use std::fmt;
use std::path::{Path, PathBuf};

use snapcs_core::imaging::linear_dispersion;
use snapcs_core::{Plane, SystemMode, SystemModel};

use crate::error::{Error, Result};
use crate::format::read_mask;

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub mode: SystemMode,
    pub dims: (usize, usize, usize),
    pub dispersion_step: usize,
    pub response: Option<Vec<f64>>,
    pub pan_response: Option<Vec<f64>>,
    pub mask: PathBuf,
    pub seed: Option<u64>,
}

pub fn mode_name(mode: SystemMode) -> &'static str {
    match mode {
        SystemMode::Cassi => "cassi",
        SystemMode::DualCamera => "dcchi",
    }
}

pub fn parse_mode(s: &str) -> Option<SystemMode> {
    match s {
        "cassi" => Some(SystemMode::Cassi),
        "dcchi" | "dual" => Some(SystemMode::DualCamera),
        _ => None,
    }
}

impl SystemConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut mode = None;
        let mut dims = None;
        let mut dispersion_step = 1;
        let mut response = None;
        let mut pan_response = None;
        let mut mask = None;
        let mut seed = None;
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |msg: String| Error::Config { line, msg };
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| err(format!("expected key=value, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "mode" => mode = Some(parse_mode(value).ok_or_else(|| err(format!("unknown mode {value:?}")))?),
                "dims" => {
                    let v: Vec<usize> = list(value).map_err(err)?;
                    match v[..] {
                        [i, j, l] => dims = Some((i, j, l)),
                        _ => return Err(err(format!("dims needs three values, got {}", v.len()))),
                    }
                }
                "dispersion_step" => dispersion_step = value.parse().map_err(|e| err(format!("dispersion_step: {e}")))?,
                "response" => response = Some(list(value).map_err(err)?),
                "pan_response" => pan_response = Some(list(value).map_err(err)?),
                "mask" => mask = Some(PathBuf::from(value)),
                "seed" => seed = Some(value.parse().map_err(|e| err(format!("seed: {e}")))?),
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        let missing = |k: &str| Error::Config { line: 0, msg: format!("missing key {k:?}") };
        Ok(SystemConfig {
            mode: mode.ok_or_else(|| missing("mode"))?,
            dims: dims.ok_or_else(|| missing("dims"))?,
            dispersion_step,
            response,
            pan_response,
            mask: mask.ok_or_else(|| missing("mask"))?,
            seed,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let mut cfg = Self::parse(&text)?;
        if cfg.mask.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.mask = dir.join(&cfg.mask);
            }
        }
        Ok(cfg)
    }

    /// Builds the model around an already loaded mask.
    pub fn build_with_mask(&self, mask: Plane) -> Result<SystemModel> {
        let (rows, cols, bands) = self.dims;
        if mask.dims() != (rows, cols) {
            return Err(Error::Usage(format!("mask is {:?} but dims say {rows}x{cols}", mask.dims())));
        }
        let ones = vec![1.0; bands];
        Ok(SystemModel::with_parts(
            mask,
            linear_dispersion(bands, self.dispersion_step),
            self.response.clone().unwrap_or_else(|| ones.clone()),
            self.pan_response.clone().unwrap_or(ones),
            self.mode,
        )?)
    }

    pub fn build(&self) -> Result<SystemModel> {
        self.build_with_mask(read_mask(&self.mask)?)
    }
}

fn list<T: std::str::FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value.split(',').map(|s| s.trim().parse::<T>().map_err(|e| format!("{s:?}: {e}"))).collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j, l) = self.dims;
        writeln!(f, "mode={}", mode_name(self.mode))?;
        writeln!(f, "dims={i},{j},{l}")?;
        writeln!(f, "dispersion_step={}", self.dispersion_step)?;
        if let Some(r) = &self.response {
            writeln!(f, "response={}", join(r))?;
        }
        if let Some(r) = &self.pan_response {
            writeln!(f, "pan_response={}", join(r))?;
        }
        writeln!(f, "mask={}", self.mask.display())?;
        if let Some(s) = self.seed {
            writeln!(f, "seed={s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cfg = SystemConfig {
            mode: SystemMode::DualCamera,
            dims: (4, 5, 3),
            dispersion_step: 2,
            response: Some(vec![1.0, 0.5, 0.25]),
            pan_response: None,
            mask: PathBuf::from("m.hsp"),
            seed: Some(9),
        };
        assert_eq!(SystemConfig::parse(&cfg.to_string()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = SystemConfig::parse("mode=cassi\n# note\ndims=1,2\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        assert!(SystemConfig::parse("mode=cassi\ndims=2,2,2\n").is_err());
        assert!(matches!(SystemConfig::parse("colour=red"), Err(Error::Config { line: 1, .. })));
    }

    #[test]
    fn builds_model() {
        let cfg = SystemConfig::parse("mode=cassi\ndims=2,3,2\nmask=x\n").unwrap();
        let sys = cfg.build_with_mask(Plane::filled(2, 3, 1.0)).unwrap();
        assert_eq!(sys.dispersion(), &[0, 1]);
        assert_eq!(sys.measurement_rows(), 3);
        assert!(cfg.build_with_mask(Plane::filled(3, 3, 1.0)).is_err());
    }
}
