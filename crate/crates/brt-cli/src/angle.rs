//! Angle parsing. Reproduction configs express angles as exact fractions of
//! pi (`pi/7`, `-pi/5`, `3pi/4`) so repeated runs agree to the last bit;
//! plain decimal radians are accepted too.

use crate::error::{CliError, Result};

pub fn parse_angle(text: &str) -> Result<f64> {
    let s = text.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, s.strip_prefix('+').unwrap_or(s).trim()),
    };
    if let Some(idx) = body.find("pi") {
        let (num_str, rest) = body.split_at(idx);
        let rest = &rest[2..];
        let numerator: f64 = if num_str.trim().is_empty() {
            1.0
        } else {
            num_str
                .trim()
                .trim_end_matches('*')
                .trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("bad angle {text:?}")))?
        };
        let denominator: f64 = match rest.trim() {
            "" => 1.0,
            d => {
                let d = d
                    .strip_prefix('/')
                    .ok_or_else(|| CliError::Parse(format!("bad angle {text:?}")))?;
                d.trim()
                    .parse()
                    .map_err(|_| CliError::Parse(format!("bad angle {text:?}")))?
            }
        };
        if denominator == 0.0 {
            return Err(CliError::Parse(format!("zero denominator in {text:?}")));
        }
        Ok(sign * numerator * std::f64::consts::PI / denominator)
    } else {
        body.parse::<f64>()
            .map(|v| sign * v)
            .map_err(|_| CliError::Parse(format!("bad angle {text:?}")))
    }
}
