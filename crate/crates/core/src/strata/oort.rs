//! Codimension of Newton strata in `A_g` and the unlikely-intersection test.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::polygon::{NewtonPolygon, PolygonError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OortError {
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("t = {0} must lie in (0, 1]")]
    BadFraction(Rational),
}

/// Lattice points `(x, y)` with `0 <= x, y <= g` strictly below `ν`.
pub fn omega_count(nu: &NewtonPolygon) -> Result<u64, OortError> {
    let g = nu.genus()?;
    let cap = g as i64 + 1;
    Ok((0..=g)
        .map(|x| nu.value_at(x).ceil().to_integer().min(cap) as u64)
        .sum())
}

/// `dim M_g`, with the genus-one case set to 1.
pub fn dim_mg(g: u64) -> u64 {
    match g {
        0 => 0,
        1 => 1,
        _ => 3 * g - 3,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConditionU {
    pub genus: u64,
    pub dim_mg: u64,
    pub codim_ag: u64,
    pub holds: bool,
}

pub fn condition_u(nu: &NewtonPolygon) -> Result<ConditionU, OortError> {
    let genus = nu.genus()?;
    let codim_ag = omega_count(nu)?;
    let dim = dim_mg(genus);
    Ok(ConditionU {
        genus,
        dim_mg: dim,
        codim_ag,
        holds: dim < codim_ag,
    })
}

/// `g >= 12 / t^2` for a polygon of genus `g` whose slope 1/2 has
/// multiplicity at least `2 t g`.
pub fn half_slope_bound(t: Rational, g: u64) -> Result<bool, OortError> {
    if !t.is_positive() || t > Rational::from_integer(1) {
        return Err(OortError::BadFraction(t));
    }
    if g == 0 {
        return Err(OortError::NonPositive("g"));
    }
    Ok(Rational::from_integer(g as i64) * t * t >= Rational::from_integer(12))
}

/// The fraction `t` read off a polygon: `mult(1/2) / 2g`.
pub fn half_slope_fraction(nu: &NewtonPolygon) -> Result<Rational, OortError> {
    let g = nu.genus()?;
    if g == 0 {
        return Err(OortError::NonPositive("g"));
    }
    Ok(Rational::new(
        nu.multiplicity(Rational::new(1, 2)) as i64,
        2 * g as i64,
    ))
}

/// `n >= max(15 g / δ², 9 √h / δ)` for `ν1^n + ν2`, where `ν1` has genus `g`
/// and slope 1/2 of multiplicity `2δ`, and `ν2` has genus `h`.
pub fn power_bound(g: u64, delta: u64, h: u64, n: u64) -> Result<bool, OortError> {
    for (name, v) in [("g", g), ("delta", delta), ("n", n)] {
        if v.is_zero() {
            return Err(OortError::NonPositive(name));
        }
    }
    let (g, d, h, n) = (g as u128, delta as u128, h as u128, n as u128);
    Ok(n * d * d >= 15 * g && n * n * d * d >= 81 * h)
}

/// `n >= 34 / h` for `ss^{hn} + ord^{2h(n-1)}`.
pub fn cyclic_ss_bound(h: u64, n: u64) -> Result<bool, OortError> {
    if h == 0 {
        return Err(OortError::NonPositive("h"));
    }
    if n == 0 {
        return Err(OortError::NonPositive("n"));
    }
    Ok(n * h >= 34)
}

/// `n(n+1)/2 - ⌊n²/4⌋`, the count for `ss^n`.
pub fn ss_closed_form(n: u64) -> u64 {
    n * (n + 1) / 2 - n * n / 4
}
