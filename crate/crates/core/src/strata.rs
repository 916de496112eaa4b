//! Kottwitz sets: the admissible Newton polygons of a datum at a prime class,
//! with their partial order and codimensions.
//!
//! Each orbit pair `{o, o*}` contributes a factor: every convex polygon with
//! integral breakpoints, normalized slopes in `[0, |o|]`, the same endpoints
//! as the μ-ordinary piece and lying on or above it (symmetric under
//! `λ' -> |o| - λ'` when `o = o*`). Elements are tuples of factor choices,
//! ordered componentwise.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::monodromy::{MonodromyDatum, Signature};
use crate::muord::{self, MuOrdError, NormalizedPolygon, OrbitComponent};
use crate::orbits::{OrbitDecomposition, OrbitError};
use crate::polygon::{NewtonPolygon, PolygonError};
use crate::Rational;

pub mod oort;

pub use oort::{condition_u, omega_count, ConditionU, OortError};

pub const DEFAULT_CAP: u64 = 1_000_000;
pub const CAP_ENV: &str = "NPCC_ENUM_CAP";

/// Enumeration cap from `NPCC_ENUM_CAP`, else [`DEFAULT_CAP`].
pub fn cap_from_env() -> u64 {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    MuOrd(#[from] MuOrdError),
    #[error(transparent)]
    Polygon(#[from] PolygonError),
    #[error("enumeration exceeded the cap of {0} candidates")]
    CapExceeded(u64),
    #[error("polygon {0} is not an element of the Kottwitz set")]
    NotAnElement(String),
}

/// Every admissible normalized polygon for one orbit, sorted by slope sequence.
pub fn enumerate_orbit(
    comp: &OrbitComponent,
    self_dual: bool,
    cap: u64,
) -> Result<Vec<NormalizedPolygon>, StrataError> {
    let g = comp.genus;
    let size = comp.size;
    if g == 0 {
        return Ok(vec![NormalizedPolygon::new(size, [])]);
    }
    let mu_vals: Vec<Rational> = (0..=g)
        .map(|x| crate::convex::value_at(comp.normalized.segments(), x))
        .collect();
    let mut search = Search {
        g: g as i64,
        size: size as i64,
        rise: comp.rise as i64,
        mu: mu_vals,
        cap,
        seen: 0,
        runs: Vec::new(),
        out: Vec::new(),
    };
    search.go(0, 0, None)?;
    let mut out: Vec<NormalizedPolygon> = search
        .out
        .into_iter()
        .map(|runs| NormalizedPolygon::new(size, runs))
        .filter(|q| !self_dual || q.is_symmetric())
        .collect();
    out.sort_by_key(|q| q.slope_sequence());
    out.dedup();
    assert!(
        out.contains(&comp.normalized),
        "μ-ordinary piece missing from its own enumeration"
    );
    Ok(out)
}

struct Search {
    g: i64,
    size: i64,
    rise: i64,
    mu: Vec<Rational>,
    cap: u64,
    seen: u64,
    runs: Vec<(Rational, u64)>,
    out: Vec<Vec<(Rational, u64)>>,
}

impl Search {
    fn go(&mut self, x: i64, y: i64, last: Option<Rational>) -> Result<(), StrataError> {
        if x == self.g {
            if y == self.rise {
                self.out.push(self.runs.clone());
            }
            return Ok(());
        }
        for nx in x + 1..=self.g {
            let dx = nx - x;
            let lo = match last {
                // strictly steeper than the previous run
                Some(s) => (s * Rational::from_integer(dx)).floor().to_integer() + 1,
                None => 0,
            };
            let hi = self.size * dx;
            for dy in lo..=hi {
                let ny = y + dy;
                let slope = Rational::new(dy, dx);
                if Rational::from_integer(ny) < self.mu[nx as usize] {
                    continue;
                }
                let rest = self.g - nx;
                let need = self.rise - ny;
                if rest == 0 {
                    if need != 0 {
                        continue;
                    }
                } else {
                    if Rational::from_integer(need) <= slope * Rational::from_integer(rest) {
                        break;
                    }
                    if need > self.size * rest {
                        continue;
                    }
                }
                self.seen += 1;
                if self.seen > self.cap {
                    return Err(StrataError::CapExceeded(self.cap));
                }
                self.runs.push((slope, dx as u64));
                self.go(nx, ny, Some(slope))?;
                self.runs.pop();
            }
        }
        Ok(())
    }
}

fn area(q: &NormalizedPolygon) -> Rational {
    let v = q.vertices();
    v.windows(2)
        .map(|w| {
            let dx = Rational::from_integer((w[1].0 - w[0].0) as i64);
            (w[0].1 + w[1].1) * dx / Rational::from_integer(2)
        })
        .fold(Rational::zero(), |a, b| a + b)
}

/// The polygons of one orbit pair with their order data.
#[derive(Debug, Clone)]
pub struct Factor {
    pub orbit: usize,
    pub self_dual: bool,
    pub options: Vec<NormalizedPolygon>,
    /// Index of the μ-ordinary option.
    pub top: usize,
    /// `below[i][j]`: option `i <= j`, i.e. `i` lies on or above `j`.
    below: Vec<Vec<bool>>,
    /// Longest chain from option `i` up to `top`.
    pub lengths: Vec<usize>,
    /// Covering pairs `(lower, upper)`.
    pub covers: Vec<(usize, usize)>,
}

impl Factor {
    fn new(comp: &OrbitComponent, self_dual: bool, cap: u64) -> Result<Self, StrataError> {
        let options = enumerate_orbit(comp, self_dual, cap)?;
        let n = options.len();
        let top = options.iter().position(|q| *q == comp.normalized).unwrap();
        let below: Vec<Vec<bool>> = options
            .iter()
            .map(|a| {
                options
                    .iter()
                    .map(|b| a.lies_on_or_above(b).expect("shared endpoints"))
                    .collect()
            })
            .collect();
        let mut by_area: Vec<usize> = (0..n).collect();
        let areas: Vec<Rational> = options.iter().map(area).collect();
        by_area.sort_by(|&i, &j| areas[i].cmp(&areas[j]));
        let mut lengths = vec![0usize; n];
        for &i in &by_area {
            lengths[i] = (0..n)
                .filter(|&j| j != i && below[i][j])
                .map(|j| lengths[j] + 1)
                .max()
                .unwrap_or(0);
        }
        let lt = |i: usize, j: usize| i != j && below[i][j];
        let mut covers = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) && !(0..n).any(|k| lt(i, k) && lt(k, j)) {
                    covers.push((i, j));
                }
            }
        }
        debug_assert_eq!(lengths[top], 0);
        Ok(Self {
            orbit: comp.orbit,
            self_dual,
            options,
            top,
            below,
            lengths,
            covers,
        })
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.below[i][j]
    }

    fn total(&self, i: usize) -> NewtonPolygon {
        let q = self.options[i].lambda_scale();
        if self.self_dual {
            q
        } else {
            q.amalgamate(&q.dual())
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Element {
    /// Option index per factor.
    pub choice: Vec<usize>,
    pub total: NewtonPolygon,
    /// Longest chain up to the μ-ordinary element.
    pub length: usize,
}

#[derive(Debug, Clone)]
pub struct KottwitzSet {
    pub decomposition: OrbitDecomposition,
    pub signature: Signature,
    pub factors: Vec<Factor>,
    pub elements: Vec<Element>,
    pub top: usize,
}

impl KottwitzSet {
    pub fn new(d: &MonodromyDatum, p: u64, cap: u64) -> Result<Self, StrataError> {
        let dec = OrbitDecomposition::new(d.m(), p)?;
        Self::from_signature(dec, d.signature(), cap)
    }

    pub fn from_signature(
        dec: OrbitDecomposition,
        f: Signature,
        cap: u64,
    ) -> Result<Self, StrataError> {
        let mut factors = Vec::new();
        for i in dec.representatives() {
            let comp = muord::orbit_component(&dec, i, &f)?;
            factors.push(Factor::new(&comp, dec.orbits[i].self_dual, cap)?);
        }
        let count = factors
            .iter()
            .try_fold(1u64, |acc, fa| acc.checked_mul(fa.options.len() as u64))
            .filter(|&c| c <= cap)
            .ok_or(StrataError::CapExceeded(cap))?;
        let mut elements = Vec::with_capacity(count as usize);
        let mut choice = vec![0usize; factors.len()];
        loop {
            let total = factors
                .iter()
                .zip(&choice)
                .fold(NewtonPolygon::empty(), |acc, (fa, &c)| {
                    acc.amalgamate(&fa.total(c))
                });
            let length = factors
                .iter()
                .zip(&choice)
                .map(|(fa, &c)| fa.lengths[c])
                .sum();
            elements.push(Element {
                choice: choice.clone(),
                total,
                length,
            });
            // odometer, last factor fastest
            let mut k = factors.len();
            let done = loop {
                if k == 0 {
                    break true;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < factors[k].options.len() {
                    break false;
                }
                choice[k] = 0;
            };
            if done {
                break;
            }
        }
        let top_choice: Vec<usize> = factors.iter().map(|fa| fa.top).collect();
        let top = elements
            .iter()
            .position(|e| e.choice == top_choice)
            .expect("μ-ordinary element present");
        let set = Self {
            decomposition: dec,
            signature: f,
            factors,
            elements,
            top,
        };
        debug_assert_eq!(
            set.elements[set.top].total,
            muord::mu_ordinary_of(&set.decomposition, &set.signature).unwrap()
        );
        Ok(set)
    }

    pub fn mu_ordinary(&self) -> &NewtonPolygon {
        &self.elements[self.top].total
    }

    /// `a <= b` componentwise.
    pub fn le(&self, a: usize, b: usize) -> bool {
        let (ea, eb) = (&self.elements[a], &self.elements[b]);
        self.factors
            .iter()
            .enumerate()
            .all(|(k, fa)| fa.le(ea.choice[k], eb.choice[k]))
    }

    /// Covering pairs `(lower, upper)`: differ in one factor, by a cover there.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, ea) in self.elements.iter().enumerate() {
            for (b, eb) in self.elements.iter().enumerate() {
                let diff: Vec<usize> = (0..self.factors.len())
                    .filter(|&k| ea.choice[k] != eb.choice[k])
                    .collect();
                if let [k] = diff[..] {
                    if self.factors[k]
                        .covers
                        .contains(&(ea.choice[k], eb.choice[k]))
                    {
                        out.push((a, b));
                    }
                }
            }
        }
        out
    }

    pub fn totals(&self) -> BTreeSet<NewtonPolygon> {
        self.elements.iter().map(|e| e.total.clone()).collect()
    }

    /// Minimum length over elements with total `nu`.
    pub fn codim(&self, nu: &NewtonPolygon) -> Result<usize, StrataError> {
        self.elements
            .iter()
            .filter(|e| e.total == *nu)
            .map(|e| e.length)
            .min()
            .ok_or_else(|| StrataError::NotAnElement(nu.to_string()))
    }

    /// Whether the μ-ordinary total is the only total of maximal p-rank.
    pub fn mu_ordinary_unique_max_p_rank(&self) -> bool {
        let totals = self.totals();
        let best = totals.iter().map(NewtonPolygon::p_rank).max().unwrap_or(0);
        totals.iter().filter(|q| q.p_rank() == best).count() == 1
            && self.mu_ordinary().p_rank() == best
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph kottwitz {\n  rankdir=BT;\n");
        for (i, e) in self.elements.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\\nlength {}\"];", e.total, e.length);
        }
        for (a, b) in self.covers() {
            let _ = writeln!(s, "  n{a} -> n{b};");
        }
        s.push_str("}\n");
        s
    }
}

pub fn kottwitz_set(d: &MonodromyDatum, p: u64) -> Result<KottwitzSet, StrataError> {
    KottwitzSet::new(d, p, cap_from_env())
}
