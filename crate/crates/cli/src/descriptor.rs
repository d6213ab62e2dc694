//! Function descriptors: `const:<c>`, `sin:pi`, `cos:2pi`, `poly:c0,c1,...`,
//! `split:<desc>` in 1D and `const:<c>`, `xy:<descx>*<descy>` in 2D.

use cdlab_core::{Forcing, Forcing2D};

use crate::error::CliError;

/// A parsed 1D descriptor. `split` runs the mean-free part and the mean
/// separately and sums the two solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor1D {
    pub forcing: Forcing,
    pub split: bool,
}

fn bad(desc: &str, why: &str) -> CliError {
    CliError::Config(format!("bad function descriptor '{desc}': {why}"))
}

fn number(desc: &str, s: &str) -> Result<f64, CliError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(desc, &format!("'{s}' is not a finite number")))
}

/// `pi`, `2pi`, `0.5pi` → the multiple of π.
fn pi_multiple(desc: &str, s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let k = s
        .strip_suffix("pi")
        .ok_or_else(|| bad(desc, "frequency must be written as <k>pi"))?;
    if k.is_empty() {
        Ok(1.0)
    } else {
        number(desc, k)
    }
}

fn parse_plain(desc: &str) -> Result<Forcing, CliError> {
    let (kind, arg) = desc
        .split_once(':')
        .ok_or_else(|| bad(desc, "expected <kind>:<argument>"))?;
    match kind.trim() {
        "const" => Ok(Forcing::Constant(number(desc, arg)?)),
        "sin" => Ok(Forcing::SinPi(pi_multiple(desc, arg)?)),
        "cos" => Ok(Forcing::CosPi(pi_multiple(desc, arg)?)),
        "poly" => {
            let coeffs = arg
                .split(',')
                .map(|c| number(desc, c))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Forcing::Polynomial(coeffs))
        }
        other => Err(bad(desc, &format!("unknown kind '{other}'"))),
    }
}

pub fn parse_1d(desc: &str) -> Result<Descriptor1D, CliError> {
    let desc = desc.trim();
    match desc.strip_prefix("split:") {
        Some(inner) => Ok(Descriptor1D {
            forcing: parse_plain(inner)?,
            split: true,
        }),
        None => Ok(Descriptor1D {
            forcing: parse_plain(desc)?,
            split: false,
        }),
    }
}

pub fn parse_2d(desc: &str) -> Result<Forcing2D, CliError> {
    let desc = desc.trim();
    if let Some(rest) = desc.strip_prefix("xy:") {
        let (fx, fy) = rest
            .split_once('*')
            .ok_or_else(|| bad(desc, "expected xy:<descx>*<descy>"))?;
        return Ok(Forcing2D::Product(parse_plain(fx)?, parse_plain(fy)?));
    }
    match parse_plain(desc)? {
        Forcing::Constant(c) => Ok(Forcing2D::Constant(c)),
        _ => Err(bad(desc, "2D data must be const:<c> or xy:<descx>*<descy>")),
    }
}
