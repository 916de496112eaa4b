//! μ-ordinary polygons, orbit by orbit.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::convex;
use crate::monodromy::{MonodromyDatum, Signature};
use crate::orbits::{OrbitDecomposition, OrbitError};
use crate::polygon::NewtonPolygon;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MuOrdError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// A convex polygon on one orbit with slopes in `[0, |o|]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalizedPolygon {
    bound: u64,
    segs: Vec<(Rational, u64)>,
}

impl NormalizedPolygon {
    pub fn new<I>(bound: u64, runs: I) -> Self
    where
        I: IntoIterator<Item = (Rational, u64)>,
    {
        let segs = convex::normalize(runs);
        let b = Rational::from_integer(bound as i64);
        assert!(
            segs.iter().all(|&(s, _)| s >= Rational::zero() && s <= b),
            "normalized slope outside [0, {bound}]"
        );
        Self { bound, segs }
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn segments(&self) -> &[(Rational, u64)] {
        &self.segs
    }

    pub fn height(&self) -> u64 {
        convex::width(&self.segs)
    }

    pub fn rise(&self) -> Rational {
        convex::rise(&self.segs)
    }

    pub fn vertices(&self) -> Vec<(u64, Rational)> {
        convex::vertices(&self.segs)
    }

    pub fn has_integral_breakpoints(&self) -> bool {
        convex::integral_vertices(&self.segs)
    }

    /// `λ' -> |o| - λ'`.
    pub fn dual(&self) -> Self {
        let b = Rational::from_integer(self.bound as i64);
        Self::new(self.bound, self.segs.iter().map(|&(s, k)| (b - s, k)))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.dual()
    }

    /// Pointwise comparison; `None` when the endpoints differ.
    pub fn lies_on_or_above(&self, other: &Self) -> Option<bool> {
        (self.height() == other.height() && self.rise() == other.rise())
            .then(|| convex::on_or_above(&self.segs, &other.segs))
    }

    /// Divide slopes by `|o|` and scale multiplicities by `|o|`.
    pub fn lambda_scale(&self) -> NewtonPolygon {
        let b = self.bound as i64;
        NewtonPolygon::from_slopes(
            self.segs
                .iter()
                .map(|&(s, k)| (s / Rational::from_integer(b), k * self.bound)),
        )
        .expect("normalized slopes fit in [0, 1] after scaling")
    }

    /// Expanded ascending slope sequence; used for deterministic ordering.
    pub fn slope_sequence(&self) -> Vec<Rational> {
        self.segs
            .iter()
            .flat_map(|&(s, k)| std::iter::repeat_n(s, k as usize))
            .collect()
    }
}

/// The μ-ordinary piece attached to one orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitComponent {
    pub orbit: usize,
    pub size: u64,
    /// `g(o)`.
    pub genus: u64,
    /// `sum_{τ in o} f(τ)`.
    pub rise: u64,
    pub normalized: NormalizedPolygon,
}

impl OrbitComponent {
    pub fn polygon(&self) -> NewtonPolygon {
        self.normalized.lambda_scale()
    }
}

/// μ-ordinary normalized polygon of orbit `i` for signature `f`.
pub fn orbit_component(
    dec: &OrbitDecomposition,
    i: usize,
    f: &Signature,
) -> Result<OrbitComponent, MuOrdError> {
    let g = dec.orbit_genus(i, f)?;
    let o = &dec.orbits[i];
    let vals: Vec<u64> = o.members.iter().map(|&n| f.get(n)).collect();
    let inner: BTreeSet<u64> = vals.iter().copied().filter(|&v| v >= 1 && v < g).collect();
    // E(0) = g > E(1) > ... > E(s) > E(s+1) = 0
    let mut e: Vec<u64> = vec![g];
    e.extend(inner.iter().rev());
    e.push(0);
    let mut runs = Vec::new();
    for t in 0..e.len() - 1 {
        let mult = e[t] - e[t + 1];
        if mult == 0 {
            continue;
        }
        let slope = vals.iter().filter(|&&v| v >= e[t]).count() as i64;
        runs.push((Rational::from_integer(slope), mult));
    }
    let normalized = NormalizedPolygon::new(o.size(), runs);
    let comp = OrbitComponent {
        orbit: i,
        size: o.size(),
        genus: g,
        rise: vals.iter().sum(),
        normalized,
    };
    debug_assert_eq!(comp.normalized.height(), g);
    debug_assert_eq!(
        comp.normalized.rise(),
        Rational::from_integer(comp.rise as i64)
    );
    Ok(comp)
}

/// All orbit components, in orbit order.
pub fn components(
    dec: &OrbitDecomposition,
    f: &Signature,
) -> Result<Vec<OrbitComponent>, MuOrdError> {
    (0..dec.orbits.len())
        .map(|i| orbit_component(dec, i, f))
        .collect()
}

pub fn mu_ordinary_of(
    dec: &OrbitDecomposition,
    f: &Signature,
) -> Result<NewtonPolygon, MuOrdError> {
    Ok(components(dec, f)?
        .iter()
        .fold(NewtonPolygon::empty(), |acc, c| {
            acc.amalgamate(&c.polygon())
        }))
}

pub fn mu_ordinary(d: &MonodromyDatum, p: u64) -> Result<NewtonPolygon, MuOrdError> {
    let dec = OrbitDecomposition::new(d.m(), p)?;
    mu_ordinary_of(&dec, &d.signature())
}

/// `sum |o| min_{τ in o} f(τ)`: upper bound for the p-rank.
pub fn p_rank_bound(d: &MonodromyDatum, p: u64) -> Result<u64, MuOrdError> {
    let dec = OrbitDecomposition::new(d.m(), p)?;
    let f = d.signature();
    Ok(dec
        .orbits
        .iter()
        .map(|o| o.size() * o.members.iter().map(|&n| f.get(n)).min().unwrap())
        .sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub members: Vec<u64>,
    pub genus: u64,
    pub polygon: NewtonPolygon,
}

pub fn component_report(d: &MonodromyDatum, p: u64) -> Result<Vec<ComponentReport>, MuOrdError> {
    let dec = OrbitDecomposition::new(d.m(), p)?;
    Ok(components(&dec, &d.signature())?
        .into_iter()
        .map(|c| ComponentReport {
            members: dec.orbits[c.orbit].members.clone(),
            genus: c.genus,
            polygon: c.polygon(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu(d: &str, p: u64) -> String {
        mu_ordinary(&d.parse().unwrap(), p).unwrap().to_string()
    }

    #[test]
    fn small_cases() {
        assert_eq!(mu("8:4:4,2,5,5", 7), "ord^2+ss^3");
        assert_eq!(mu("4:3:1,1,2", 3), "ss");
        assert_eq!(mu("4:3:1,1,2", 1), "ord");
        assert_eq!(mu("3:6:1,1,1,1,1,1", 1), "ord^4");
        assert_eq!(mu("7:4:2,4,4,4", 3), "(1/3,2/3)^2");
        assert_eq!(mu("7:4:2,4,4,4", 2), "ord^3+(1/3,2/3)");
    }

    #[test]
    fn p_rank_bound_matches_slope_zero() {
        let d: MonodromyDatum = "12:4:4,6,7,7".parse().unwrap();
        for p in [1, 5, 7, 11] {
            assert_eq!(
                p_rank_bound(&d, p).unwrap(),
                mu_ordinary(&d, p).unwrap().p_rank()
            );
        }
    }
}
