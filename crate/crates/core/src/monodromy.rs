//! Monodromy data `(m, N, a)` of cyclic covers of the projective line.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DatumError {
    #[error("modulus must be at least 2, got {0}")]
    Modulus(u64),
    #[error("need at least 3 branch points, got {0}")]
    TooFewPoints(usize),
    #[error("inertia a({0}) is zero mod m (allowed only for generalized data)")]
    ZeroEntry(usize),
    #[error("gcd of m and all a(i) is {0}, not 1")]
    NotCoprime(u64),
    #[error("sum of inertia is {0} mod m, not 0")]
    SumNotZero(u64),
    #[error("ramification count gives a non-integral or negative genus")]
    BadGenus,
    #[error("cannot parse datum: {0}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MonodromyDatum {
    m: u64,
    a: Vec<u64>,
    generalized: bool,
}

/// Values `f(n)` for `n` in `Z/m`, with `f(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    values: Vec<u64>,
}

impl Signature {
    pub fn from_values(values: Vec<u64>) -> Self {
        assert!(!values.is_empty() && values[0] == 0, "f(0) must be 0");
        Self { values }
    }

    pub fn modulus(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn get(&self, n: u64) -> u64 {
        self.values[(n % self.modulus()) as usize]
    }

    /// `(f(1), ..., f(m - 1))`.
    pub fn nonzero(&self) -> &[u64] {
        &self.values[1..]
    }

    pub fn total(&self) -> u64 {
        self.values.iter().sum()
    }

    /// `f∘π` along the projection `Z/(km) -> Z/m`.
    pub fn pullback(&self, k: u64) -> Self {
        let m = self.modulus();
        Self {
            values: (0..k * m).map(|n| self.get(n)).collect(),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.nonzero().iter().map(u64::to_string).collect();
        write!(f, "({})", body.join(","))
    }
}

impl MonodromyDatum {
    pub fn new(m: u64, a: Vec<u64>) -> Result<Self, DatumError> {
        Self::build(m, a, false)
    }

    /// A datum whose inertia may vanish at some points.
    pub fn generalized(m: u64, a: Vec<u64>) -> Result<Self, DatumError> {
        Self::build(m, a, true)
    }

    fn build(m: u64, a: Vec<u64>, generalized: bool) -> Result<Self, DatumError> {
        if m < 2 {
            return Err(DatumError::Modulus(m));
        }
        if a.len() < 3 {
            return Err(DatumError::TooFewPoints(a.len()));
        }
        let a: Vec<u64> = a.into_iter().map(|x| x % m).collect();
        if !generalized {
            if let Some(i) = a.iter().position(|&x| x == 0) {
                return Err(DatumError::ZeroEntry(i + 1));
            }
        }
        let g = a.iter().fold(m, |acc, &x| acc.gcd(&x));
        if g != 1 {
            return Err(DatumError::NotCoprime(g));
        }
        let s = a.iter().sum::<u64>() % m;
        if s != 0 {
            return Err(DatumError::SumNotZero(s));
        }
        let d = Self { m, a, generalized };
        d.checked_genus().ok_or(DatumError::BadGenus)?;
        Ok(d)
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n_points(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn is_generalized(&self) -> bool {
        self.generalized
    }

    /// `gcd(m, a(1), ..., a(N))`; 1 unless the datum came from [`induce`](Self::induce).
    pub fn components(&self) -> u64 {
        self.a.iter().fold(self.m, |acc, &x| acc.gcd(&x))
    }

    fn checked_genus(&self) -> Option<u64> {
        let m = self.m as i64;
        let ram: i64 = self.a.iter().map(|&x| (x as i64).gcd(&m)).sum();
        let twice = 2 + (self.a.len() as i64 - 2) * m - ram;
        (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as u64)
    }

    /// Riemann–Hurwitz genus. For an induced datum this is the same formula
    /// applied to the disconnected cover.
    pub fn genus(&self) -> u64 {
        self.checked_genus()
            .expect("ramification count must give an integral genus")
    }

    /// `f(n) = -1 + sum <-n a(i) / m>`, and `f(n) = 0` where every `n a(i)`
    /// vanishes mod `m`.
    pub fn signature(&self) -> Signature {
        let m = self.m;
        let values = (0..m)
            .map(|n| {
                let parts: Vec<u64> = self.a.iter().map(|&x| (m - (n * x) % m) % m).collect();
                if parts.iter().all(|&x| x == 0) {
                    return 0;
                }
                let s: u64 = parts.iter().sum();
                debug_assert_eq!(s % m, 0);
                s / m - 1
            })
            .collect();
        Signature { values }
    }

    /// `(km, N, k a)`: the disconnected cover made of `k` copies.
    pub fn induce(&self, k: u64) -> Self {
        assert!(k >= 1);
        Self {
            m: k * self.m,
            a: self.a.iter().map(|&x| k * x).collect(),
            generalized: self.generalized,
        }
    }

    /// Canonical representative under units of `Z/m` and permutations.
    pub fn normalize(&self) -> Self {
        let best = (1..self.m)
            .filter(|u| u.gcd(&self.m) == 1)
            .map(|u| {
                let mut v: Vec<u64> = self.a.iter().map(|&x| (u * x) % self.m).collect();
                v.sort_unstable();
                v
            })
            .min()
            .expect("Z/m has at least one unit");
        Self {
            m: self.m,
            a: best,
            generalized: self.generalized,
        }
    }

    /// Append an unramified point.
    pub fn pad(&self) -> Self {
        let mut a = self.a.clone();
        a.push(0);
        Self {
            m: self.m,
            a,
            generalized: true,
        }
    }

    /// Prepend an unramified point.
    pub fn pad_front(&self) -> Self {
        let mut a = vec![0];
        a.extend_from_slice(&self.a);
        Self {
            m: self.m,
            a,
            generalized: true,
        }
    }

    /// Same entries reordered; `order` is a permutation of `0..N`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.a.len());
        Self {
            m: self.m,
            a: order.iter().map(|&i| self.a[i]).collect(),
            generalized: self.generalized,
        }
    }

    /// Move entry `i` to the front and entry `j` to the back.
    pub fn with_ends(&self, i: usize, j: usize) -> Self {
        assert_ne!(i, j);
        let mut order = vec![i];
        order.extend((0..self.a.len()).filter(|&k| k != i && k != j));
        order.push(j);
        self.permuted(&order)
    }

    /// `Z/m` with zero entries dropped, as a plain datum when possible.
    pub fn strip_zeros(&self) -> Result<Self, DatumError> {
        Self::new(self.m, self.a.iter().copied().filter(|&x| x != 0).collect())
    }
}

impl fmt::Display for MonodromyDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.a.iter().map(u64::to_string).collect();
        write!(f, "{}:{}:{}", self.m, self.a.len(), body.join(","))
    }
}

impl FromStr for MonodromyDatum {
    type Err = DatumError;

    /// `m:N:a1,...,aN`. Zero entries make the datum generalized.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |msg: &str| DatumError::Syntax(format!("{msg} in {s:?}"));
        let mut it = s.trim().splitn(3, ':');
        let (Some(m), Some(n), Some(a)) = (it.next(), it.next(), it.next()) else {
            return Err(bad("expected m:N:a1,...,aN"));
        };
        let m: u64 = m.trim().parse().map_err(|_| bad("bad modulus"))?;
        let n: usize = n.trim().parse().map_err(|_| bad("bad point count"))?;
        let a = a
            .split(',')
            .map(|x| x.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("bad inertia list"))?;
        if a.len() != n {
            return Err(bad("point count does not match inertia list"));
        }
        let generalized = m > 0 && a.iter().any(|&x| x % m == 0);
        Self::build(m, a, generalized)
    }
}

#[derive(Deserialize)]
struct DatumJson {
    m: u64,
    a: Vec<u64>,
    #[serde(default)]
    generalized: bool,
}

impl<'de> Deserialize<'de> for MonodromyDatum {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = DatumJson::deserialize(de)?;
        Self::build(j.m, j.a, j.generalized).map_err(serde::de::Error::custom)
    }
}
