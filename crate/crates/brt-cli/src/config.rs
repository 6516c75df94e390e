//! Run configuration: key=value text with per-figure defaults. Angles accept
//! exact pi fractions; all numeric fields are validated at parse time.

use std::path::Path;

use crate::angle::parse_angle;
use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// `shepp-logan` or a phantom text file path.
    pub phantom: String,
    pub tmin: f64,
    pub tmax: f64,
    pub nt: usize,
    pub ymin: f64,
    pub ymax: f64,
    pub ny: usize,
    pub xi_i: f64,
    pub xi_j: f64,
    /// Second scatter angle of the SBRT pair.
    pub xi_j2: f64,
    /// PSF shift lengths; non-positive means "8 sample spacings".
    pub a_i: f64,
    pub a_j: f64,
    pub epsilon: f64,
    pub noise_std_factor: f64,
    pub seed: u64,
    pub m_t: usize,
    pub m_y: usize,
    pub pad: usize,
    /// Cap on auto-sized extensions (shallow scatter angles stretch the
    /// support region far beyond what a lattice can hold).
    pub max_m_t: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            phantom: "shepp-logan".into(),
            tmin: -0.75,
            tmax: 0.75,
            nt: 400,
            ymin: -1.0,
            ymax: 1.0,
            ny: 600,
            xi_i: std::f64::consts::PI,
            xi_j: std::f64::consts::PI / 11.0,
            xi_j2: -std::f64::consts::PI / 5.0,
            a_i: 0.0,
            a_j: 0.0,
            epsilon: 1e-5,
            noise_std_factor: 1e-3,
            seed: 7,
            m_t: 64,
            m_y: 0,
            pad: 16,
            max_m_t: 4096,
        }
    }
}

impl RunConfig {
    pub fn dt(&self) -> f64 {
        (self.tmax - self.tmin) / self.nt as f64
    }

    pub fn dy(&self) -> f64 {
        (self.ymax - self.ymin) / self.ny as f64
    }

    /// Effective shift lengths: explicit values, or 8 sample spacings.
    pub fn shifts(&self) -> (f64, f64) {
        let default = 8.0 * self.dt();
        (
            if self.a_i > 0.0 { self.a_i } else { default },
            if self.a_j > 0.0 { self.a_j } else { default },
        )
    }

    pub fn grid(&self) -> Result<brt_core::Grid2D> {
        Ok(brt_core::Grid2D::from_extents(
            self.tmin, self.tmax, self.nt, self.ymin, self.ymax, self.ny,
        )?)
    }

    pub fn load_phantom(&self) -> Result<brt_core::Phantom> {
        load_phantom(&self.phantom)
    }

    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        RunConfig::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies `key = value` overrides; `#` starts a comment.
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Parse(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| CliError::Parse(format!("config line {}: {what}", lineno + 1));
            match key {
                "phantom" => self.phantom = value.to_string(),
                "tmin" => self.tmin = value.parse().map_err(|_| bad("bad tmin"))?,
                "tmax" => self.tmax = value.parse().map_err(|_| bad("bad tmax"))?,
                "nt" => self.nt = value.parse().map_err(|_| bad("bad nt"))?,
                "ymin" => self.ymin = value.parse().map_err(|_| bad("bad ymin"))?,
                "ymax" => self.ymax = value.parse().map_err(|_| bad("bad ymax"))?,
                "ny" => self.ny = value.parse().map_err(|_| bad("bad ny"))?,
                "xi_i" => self.xi_i = parse_angle(value)?,
                "xi_j" => self.xi_j = parse_angle(value)?,
                "xi_j2" => self.xi_j2 = parse_angle(value)?,
                "a_i" => self.a_i = value.parse().map_err(|_| bad("bad a_i"))?,
                "a_j" => self.a_j = value.parse().map_err(|_| bad("bad a_j"))?,
                "epsilon" => self.epsilon = value.parse().map_err(|_| bad("bad epsilon"))?,
                "noise_std_factor" => {
                    self.noise_std_factor =
                        value.parse().map_err(|_| bad("bad noise_std_factor"))?
                }
                "seed" => self.seed = value.parse().map_err(|_| bad("bad seed"))?,
                "m_t" => self.m_t = value.parse().map_err(|_| bad("bad m_t"))?,
                "m_y" => self.m_y = value.parse().map_err(|_| bad("bad m_y"))?,
                "pad" => self.pad = value.parse().map_err(|_| bad("bad pad"))?,
                "max_m_t" => self.max_m_t = value.parse().map_err(|_| bad("bad max_m_t"))?,
                other => return Err(bad(&format!("unknown key {other:?}"))),
            }
        }
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        let err = |m: &str| Err(CliError::Parse(m.into()));
        if !(self.tmax > self.tmin) || !(self.ymax > self.ymin) {
            return err("grid extents must be increasing");
        }
        if self.nt == 0 || self.ny == 0 {
            return err("grid must have samples on both axes");
        }
        if self.epsilon < 0.0 {
            return err("epsilon must be non-negative");
        }
        if self.noise_std_factor < 0.0 {
            return err("noise_std_factor must be non-negative");
        }
        Ok(())
    }
}

pub fn load_phantom(source: &str) -> Result<brt_core::Phantom> {
    if source == "shepp-logan" {
        Ok(brt_core::shepp_logan())
    } else {
        Ok(brt_core::Phantom::from_text(&std::fs::read_to_string(
            source,
        )?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides_and_rejects_unknown() {
        let cfg = RunConfig::parse("xi_j = pi/7\nseed = 42\n# comment\nepsilon = 1e-4\n").unwrap();
        assert_eq!(cfg.seed, 42);
        assert!((cfg.xi_j - std::f64::consts::PI / 7.0).abs() < 1e-15);
        assert_eq!(cfg.epsilon, 1e-4);
        assert!(RunConfig::parse("nope = 3").is_err());
        assert!(RunConfig::parse("epsilon = -1").is_err());
    }

    #[test]
    fn default_shifts_are_eight_spacings() {
        let cfg = RunConfig::default();
        let (ai, aj) = cfg.shifts();
        assert!((ai - 8.0 * cfg.dt()).abs() < 1e-15);
        assert_eq!(ai, aj);
    }
}
