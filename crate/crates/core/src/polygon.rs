//! Symmetric Newton polygons with slopes in `[0, 1]`.
//!
//! A polygon is stored as a strictly ascending list of `(slope, multiplicity)`
//! runs. Text form is the familiar `ord^a+(s/t,u/t)^b+ss^c` notation; polygons
//! outside that grammar (asymmetric, or with fractional breakpoints) fall back
//! to a raw `{slope:mult,...}` form, which the parser also accepts.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::convex;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolygonError {
    #[error("slope {0} lies outside [0, 1]")]
    SlopeOutOfRange(Rational),
    #[error("polygons end at different points: ({0}, {1}) vs ({2}, {3})")]
    DistinctEndpoints(u64, Rational, u64, Rational),
    #[error("polygon is empty")]
    Empty,
    #[error("polygon {0} is not symmetric")]
    Asymmetric(String),
    #[error("polygon {0} has a non-integral breakpoint")]
    NonIntegral(String),
    #[error("cannot parse polygon at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NewtonPolygon {
    segs: Vec<(Rational, u64)>,
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

impl NewtonPolygon {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_slopes<I>(runs: I) -> Result<Self, PolygonError>
    where
        I: IntoIterator<Item = (Rational, u64)>,
    {
        let segs = convex::normalize(runs);
        if let Some(&(s, _)) = segs
            .iter()
            .find(|(s, _)| *s < Rational::zero() || *s > Rational::one())
        {
            return Err(PolygonError::SlopeOutOfRange(s));
        }
        Ok(Self { segs })
    }

    /// Slope 0 and slope 1, once each.
    pub fn ord() -> Self {
        Self {
            segs: vec![(Rational::zero(), 1), (Rational::one(), 1)],
        }
    }

    /// Slope 1/2 twice.
    pub fn ss() -> Self {
        Self {
            segs: vec![(r(1, 2), 2)],
        }
    }

    /// `(s/t, (t-s)/t)`: both slopes with multiplicity `t`. `2s = t` gives `ss`.
    pub fn pair(s: i64, t: i64) -> Result<Self, PolygonError> {
        if t <= 0 || s < 0 || 2 * s > t {
            return Err(PolygonError::SlopeOutOfRange(r(s.max(0), t.max(1))));
        }
        if 2 * s == t {
            return Ok(Self::ss());
        }
        let lo = r(s, t);
        let k = *lo.denom() as u64;
        let reps = t as u64 / k;
        Self::from_slopes([(lo, k * reps), (Rational::one() - lo, k * reps)])
    }

    pub fn segments(&self) -> &[(Rational, u64)] {
        &self.segs
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    /// Total multiplicity (the `2g` of an abelian variety).
    pub fn height(&self) -> u64 {
        convex::width(&self.segs)
    }

    pub fn rise(&self) -> Rational {
        convex::rise(&self.segs)
    }

    pub fn multiplicity(&self, slope: Rational) -> u64 {
        self.segs
            .iter()
            .find(|(s, _)| *s == slope)
            .map_or(0, |&(_, k)| k)
    }

    /// Multiplicity of slope 0.
    pub fn p_rank(&self) -> u64 {
        self.multiplicity(Rational::zero())
    }

    pub fn distinct_slopes(&self) -> Vec<Rational> {
        self.segs.iter().map(|&(s, _)| s).collect()
    }

    pub fn amalgamate(&self, other: &Self) -> Self {
        Self {
            segs: convex::normalize(self.segs.iter().chain(&other.segs).copied()),
        }
    }

    /// `k`-fold amalgamation with itself.
    pub fn power(&self, k: u64) -> Self {
        Self {
            segs: convex::normalize(self.segs.iter().map(|&(s, m)| (s, m * k))),
        }
    }

    /// Replace every slope `s` by `1 - s`.
    pub fn dual(&self) -> Self {
        Self {
            segs: convex::normalize(self.segs.iter().map(|&(s, m)| (Rational::one() - s, m))),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.dual()
    }

    pub fn has_integral_breakpoints(&self) -> bool {
        convex::integral_vertices(&self.segs)
    }

    pub fn vertices(&self) -> Vec<(u64, Rational)> {
        convex::vertices(&self.segs)
    }

    pub fn value_at(&self, x: u64) -> Rational {
        convex::value_at(&self.segs, x.min(self.height()))
    }

    /// Genus `g` of a symmetric polygon with integral breakpoints.
    pub fn genus(&self) -> Result<u64, PolygonError> {
        if !self.is_symmetric() {
            return Err(PolygonError::Asymmetric(self.to_string()));
        }
        if !self.has_integral_breakpoints() {
            return Err(PolygonError::NonIntegral(self.to_string()));
        }
        Ok(self.height() / 2)
    }

    /// Whether the graph of `self` lies on or above that of `other`, i.e.
    /// `self` is the more special of the two. Polygons with different
    /// endpoints are incomparable and reported as an error.
    pub fn lies_on_or_above(&self, other: &Self) -> Result<bool, PolygonError> {
        let (h1, h2) = (self.height(), other.height());
        let (y1, y2) = (self.rise(), other.rise());
        if h1 != h2 || y1 != y2 {
            return Err(PolygonError::DistinctEndpoints(h1, y1, h2, y2));
        }
        Ok(convex::on_or_above(&self.segs, &other.segs))
    }

    pub fn first_slope(&self) -> Option<Rational> {
        self.segs.first().map(|&(s, _)| s)
    }

    pub fn last_slope(&self) -> Option<Rational> {
        self.segs.last().map(|&(s, _)| s)
    }

    /// The `floor((q + 1) / 2)`-th of the `q` distinct slopes.
    pub fn middle_slope(&self) -> Option<Rational> {
        let q = self.segs.len();
        (q > 0).then(|| self.segs[q.div_ceil(2) - 1].0)
    }

    /// `(first, last, middle)` of a non-empty symmetric polygon.
    pub fn first_last_middle(&self) -> Result<(Rational, Rational, Rational), PolygonError> {
        if self.is_empty() {
            return Err(PolygonError::Empty);
        }
        if !self.is_symmetric() {
            return Err(PolygonError::Asymmetric(self.to_string()));
        }
        Ok((
            self.first_slope().unwrap(),
            self.last_slope().unwrap(),
            self.middle_slope().unwrap(),
        ))
    }

    /// Canonical terms `(lower slope, exponent)` when the polygon fits the
    /// `ord`/`ss`/pair grammar.
    fn canonical_terms(&self) -> Option<Vec<(Rational, u64)>> {
        if !self.is_symmetric() {
            return None;
        }
        let half = r(1, 2);
        let mut terms = Vec::new();
        for &(s, k) in &self.segs {
            if s > half {
                continue;
            }
            let weight = if s == half { 2 } else { *s.denom() as u64 };
            if k % weight != 0 {
                return None;
            }
            terms.push((s, k / weight));
        }
        Some(terms)
    }
}

fn fmt_ratio(q: Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl fmt::Display for NewtonPolygon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(terms) = self.canonical_terms().filter(|t| !t.is_empty()) else {
            let body: Vec<String> = self
                .segs
                .iter()
                .map(|&(s, k)| {
                    if s.is_integer() {
                        format!("{}:{}", s.numer(), k)
                    } else {
                        format!("{}:{}", fmt_ratio(s), k)
                    }
                })
                .collect();
            return write!(f, "{{{}}}", body.join(","));
        };
        let half = r(1, 2);
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(s, e)| {
                let base = if s.is_zero() {
                    "ord".to_string()
                } else if s == half {
                    "ss".to_string()
                } else {
                    let t = *s.denom();
                    format!("({}/{t},{}/{t})", s.numer(), t - s.numer())
                };
                if e == 1 {
                    base
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        f.write_str(&parts.join("+"))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolygonError> {
        Err(PolygonError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), PolygonError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64, PolygonError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<i64>()
            .or_else(|_| {
                self.pos = start;
                self.err("integer out of range")
            })
    }

    /// `INT` or `INT/INT`, returned unreduced.
    fn frac(&mut self) -> Result<(i64, i64), PolygonError> {
        let n = self.int()?;
        if self.eat(b'/') {
            let d = self.int()?;
            if d == 0 {
                return self.err("zero denominator");
            }
            Ok((n, d))
        } else {
            Ok((n, 1))
        }
    }

    fn exponent(&mut self) -> Result<u64, PolygonError> {
        if self.eat(b'^') {
            let e = self.int()?;
            if e == 0 {
                return self.err("exponent must be positive");
            }
            Ok(e as u64)
        } else {
            Ok(1)
        }
    }

    fn term(&mut self) -> Result<NewtonPolygon, PolygonError> {
        let base = if self.keyword("ord") {
            NewtonPolygon::ord()
        } else if self.keyword("ss") {
            NewtonPolygon::ss()
        } else if self.eat(b'(') {
            let at = self.pos;
            let (s, t) = self.frac()?;
            self.expect(b',')?;
            let (u, t2) = self.frac()?;
            self.expect(b')')?;
            let bad = |p: &mut Self, msg: &str| {
                p.pos = at;
                p.err(msg.to_string())
            };
            if t != t2 {
                return bad(self, "pair slopes need a common denominator");
            }
            if s + u != t {
                return bad(self, "pair slopes must sum to 1");
            }
            if s > u {
                return bad(self, "smaller slope must come first");
            }
            if s.gcd(&t) != 1 {
                return bad(self, "pair slope must be in lowest terms");
            }
            NewtonPolygon::pair(s, t)?
        } else {
            return self.err("expected 'ord', 'ss', '(' or '{'");
        };
        Ok(base.power(self.exponent()?))
    }

    fn raw(&mut self) -> Result<NewtonPolygon, PolygonError> {
        let mut runs = Vec::new();
        if !self.eat(b'}') {
            loop {
                let at = self.pos;
                let (n, d) = self.frac()?;
                self.expect(b':')?;
                let k = self.int()?;
                let q = r(n, d);
                if q > Rational::one() {
                    self.pos = at;
                    return self.err("slope exceeds 1");
                }
                runs.push((q, k as u64));
                if self.eat(b'}') {
                    break;
                }
                self.expect(b',')?;
            }
        }
        NewtonPolygon::from_slopes(runs)
    }

    fn polygon(&mut self) -> Result<NewtonPolygon, PolygonError> {
        let out = if self.eat(b'{') {
            self.raw()?
        } else {
            let mut acc = self.term()?;
            while self.eat(b'+') {
                acc = acc.amalgamate(&self.term()?);
            }
            acc
        };
        self.skip_ws();
        if self.pos != self.src.len() {
            return self.err("trailing input");
        }
        Ok(out)
    }
}

impl FromStr for NewtonPolygon {
    type Err = PolygonError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser {
            src: s.as_bytes(),
            pos: 0,
        }
        .polygon()
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRun {
    num: i64,
    den: i64,
    mult: u64,
}

impl Serialize for NewtonPolygon {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let runs: Vec<JsonRun> = self
            .segs
            .iter()
            .map(|&(s, k)| JsonRun {
                num: *s.numer(),
                den: *s.denom(),
                mult: k,
            })
            .collect();
        runs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for NewtonPolygon {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let runs = Vec::<JsonRun>::deserialize(de)?;
        if runs.iter().any(|j| j.den == 0) {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        NewtonPolygon::from_slopes(runs.into_iter().map(|j| (r(j.num, j.den), j.mult)))
            .map_err(serde::de::Error::custom)
    }
}
