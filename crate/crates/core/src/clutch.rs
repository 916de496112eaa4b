//! Clutching two monodromy data at a pair of branch points.
//!
//! `γ1` is glued along its last point to the first point of `γ2`.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::monodromy::{DatumError, MonodromyDatum, Signature};
use crate::muord::{self, MuOrdError};
use crate::orbits::{OrbitDecomposition, OrbitError};
use crate::polygon::NewtonPolygon;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClutchError {
    #[error("d1 a1(N1) + d2 a2(1) = {0} is not 0 mod m3")]
    NotAdmissible(u64),
    #[error("compatibility needs m1 | m2, got m1 = {0}, m2 = {1}")]
    NotDivisible(u64, u64),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    MuOrd(#[from] MuOrdError),
}

#[derive(Debug, Clone, Serialize)]
pub struct ClutchReport {
    pub gamma1: MonodromyDatum,
    pub gamma2: MonodromyDatum,
    pub gamma3: MonodromyDatum,
    pub m3: u64,
    pub d1: u64,
    pub d2: u64,
    pub r1: u64,
    pub r2: u64,
    pub r0: u64,
    pub epsilon: u64,
    pub g1: u64,
    pub g2: u64,
    pub g3: u64,
    /// `f1† + f2† + δ`.
    pub f3: Signature,
}

fn scales(g1: &MonodromyDatum, g2: &MonodromyDatum) -> (u64, u64, u64) {
    let m3 = g1.m().lcm(&g2.m());
    (m3, m3 / g1.m(), m3 / g2.m())
}

fn joint(g1: &MonodromyDatum, g2: &MonodromyDatum, i: usize, j: usize) -> u64 {
    let (m3, d1, d2) = scales(g1, g2);
    (d1 * g1.a()[i] + d2 * g2.a()[j]) % m3
}

/// Whether the last point of `γ1` and the first of `γ2` can be glued.
pub fn admissible(g1: &MonodromyDatum, g2: &MonodromyDatum) -> bool {
    joint(g1, g2, g1.n_points() - 1, 0) == 0
}

/// First pair of points `(i, j)` that can be glued, with `γ1` reordered to
/// end at `i` and `γ2` to start at `j`.
pub fn find_admissible(
    g1: &MonodromyDatum,
    g2: &MonodromyDatum,
) -> Option<(MonodromyDatum, MonodromyDatum)> {
    for i in 0..g1.n_points() {
        for j in 0..g2.n_points() {
            if joint(g1, g2, i, j) == 0 {
                return Some((move_to_end(g1, i), move_to_front(g2, j)));
            }
        }
    }
    None
}

pub fn move_to_end(d: &MonodromyDatum, i: usize) -> MonodromyDatum {
    let mut order: Vec<usize> = (0..d.n_points()).filter(|&k| k != i).collect();
    order.push(i);
    d.permuted(&order)
}

pub fn move_to_front(d: &MonodromyDatum, j: usize) -> MonodromyDatum {
    let mut order = vec![j];
    order.extend((0..d.n_points()).filter(|&k| k != j));
    d.permuted(&order)
}

/// `δ_{d, dR}(n)`: 1 when `dR n = 0` and `d n != 0` in `Z/m`.
fn delta_pair(m: u64, d: u64, dr: u64, n: u64) -> i64 {
    ((dr * n).is_multiple_of(m) && !(d * n).is_multiple_of(m)) as i64
}

pub fn clutch(g1: &MonodromyDatum, g2: &MonodromyDatum) -> Result<ClutchReport, ClutchError> {
    let (m3, d1, d2) = scales(g1, g2);
    let n1 = g1.n_points();
    if !admissible(g1, g2) {
        return Err(ClutchError::NotAdmissible(joint(g1, g2, n1 - 1, 0)));
    }
    let (a1, a2) = (g1.a(), g2.a());
    let r1 = g1.m().gcd(&a1[n1 - 1]);
    let r2 = g2.m().gcd(&a2[0]);
    let r0 = r1.gcd(&r2);
    assert_eq!(
        d1 * r1,
        d2 * r2,
        "glued points must have equal ramification"
    );
    assert_eq!(d1 * r1, d1 * d2 * r0);
    let epsilon = d1 * d2 * r0 + 1 - d1 - d2;

    let a3: Vec<u64> = a1[..n1 - 1]
        .iter()
        .map(|&x| d1 * x)
        .chain(a2[1..].iter().map(|&x| d2 * x))
        .collect();
    let generalized = a3.iter().any(|&x| x % m3 == 0);
    let gamma3 = if generalized {
        MonodromyDatum::generalized(m3, a3)?
    } else {
        MonodromyDatum::new(m3, a3)?
    };

    let (g1v, g2v) = (g1.genus(), g2.genus());
    let g3 = d1 * g1v + d2 * g2v + epsilon;
    assert_eq!(g3, gamma3.genus(), "genus of the clutched datum");

    let f1 = g1.signature().pullback(d1);
    let f2 = g2.signature().pullback(d2);
    let d = d1 * d2;
    let values: Vec<u64> = (0..m3)
        .map(|n| {
            if n == 0 {
                return 0;
            }
            let delta = delta_pair(m3, d, d * r0, n) + delta_pair(m3, d1, d1 * d2, n)
                - delta_pair(m3, 1, d2, n);
            let simple =
                ((d * r0 * n) % m3 == 0 && (d1 * n) % m3 != 0 && (d2 * n) % m3 != 0) as i64;
            assert_eq!(delta, simple, "δ({n})");
            f1.get(n) + f2.get(n) + delta as u64
        })
        .collect();
    let f3 = Signature::from_values(values);
    assert_eq!(f3, gamma3.signature(), "signature of the clutched datum");

    Ok(ClutchReport {
        gamma1: g1.clone(),
        gamma2: g2.clone(),
        gamma3,
        m3,
        d1,
        d2,
        r1,
        r2,
        r0,
        epsilon,
        g1: g1v,
        g2: g2v,
        g3,
        f3,
    })
}

impl ClutchReport {
    /// `δ(n)` from the clutched signature.
    pub fn delta(&self, n: u64) -> u64 {
        let f1 = self.gamma1.signature().pullback(self.d1);
        let f2 = self.gamma2.signature().pullback(self.d2);
        self.f3.get(n) - f1.get(n) - f2.get(n)
    }

    /// `ε_o` for every orbit of `Z/m3`; sums to `ε`.
    pub fn epsilon_orbits(&self, p: u64) -> Result<Vec<u64>, ClutchError> {
        let dec = OrbitDecomposition::new(self.m3, p)?;
        let big = self.d1 * self.d2 * self.r0;
        let out: Vec<u64> = dec
            .orbits
            .iter()
            .map(|o| {
                let e = o.order;
                let hit = big.is_multiple_of(e)
                    && !self.d1.is_multiple_of(e)
                    && !self.d2.is_multiple_of(e);
                let ds: Vec<u64> = o.members.iter().map(|&n| self.delta(n)).collect();
                assert!(ds.iter().all(|&x| x == ds[0]), "δ constant on orbits");
                assert_eq!(ds[0] == 1, hit);
                if hit {
                    o.size()
                } else {
                    0
                }
            })
            .collect();
        assert_eq!(out.iter().sum::<u64>(), self.epsilon);
        Ok(out)
    }

    /// Within each orbit, a strict rise of one induced signature forces a
    /// weak rise of the other, in both directions.
    pub fn balanced(&self, p: u64) -> Result<bool, ClutchError> {
        let dec = OrbitDecomposition::new(self.m3, p)?;
        let f1 = self.gamma1.signature().pullback(self.d1);
        let f2 = self.gamma2.signature().pullback(self.d2);
        Ok(dec.orbits.iter().all(|o| {
            o.members.iter().all(|&w| {
                o.members.iter().all(|&t| {
                    (f1.get(w) <= f1.get(t) || f2.get(w) >= f2.get(t))
                        && (f2.get(w) <= f2.get(t) || f1.get(w) >= f1.get(t))
                })
            })
        }))
    }

    /// `ν1^{d1} ⊕ ν2^{d2} ⊕ ord^ε`.
    pub fn polygon(&self, nu1: &NewtonPolygon, nu2: &NewtonPolygon) -> NewtonPolygon {
        nu1.power(self.d1)
            .amalgamate(&nu2.power(self.d2))
            .amalgamate(&NewtonPolygon::ord().power(self.epsilon))
    }

    /// μ-ordinary polygon of `γ3` against the clutched μ-ordinary polygons.
    pub fn mu_ordinary_product(
        &self,
        p: u64,
    ) -> Result<(NewtonPolygon, NewtonPolygon), ClutchError> {
        let lhs = muord::mu_ordinary(&self.gamma3, p)?;
        let u1 = muord::mu_ordinary(&self.gamma1, p)?;
        let u2 = muord::mu_ordinary(&self.gamma2, p)?;
        Ok((lhs, self.polygon(&u1, &u2)))
    }
}

/// Slopes of the induced `u1†(o)` avoid the open interval between the first
/// and last slope of `u2(o)`, for every orbit of `Z/m2`. Needs `m1 | m2`.
pub fn compatible(g1: &MonodromyDatum, g2: &MonodromyDatum, p: u64) -> Result<bool, ClutchError> {
    let (m1, m2) = (g1.m(), g2.m());
    if m2 % m1 != 0 {
        return Err(ClutchError::NotDivisible(m1, m2));
    }
    let dec = OrbitDecomposition::new(m2, p)?;
    let f1 = g1.signature().pullback(m2 / m1);
    let f2 = g2.signature();
    let mut ok = true;
    for i in 0..dec.orbits.len() {
        let u1 = muord::orbit_component(&dec, i, &f1)?.polygon();
        let u2 = muord::orbit_component(&dec, i, &f2)?.polygon();
        if u1.is_empty() || u2.is_empty() {
            continue;
        }
        let (lo, hi) = (u2.first_slope().unwrap(), u2.last_slope().unwrap());
        let here = u1.distinct_slopes().iter().all(|&s| s <= lo || s >= hi);
        if dec.orbits[i].self_dual {
            let mid = u1.middle_slope().unwrap();
            assert_eq!(
                here,
                mid <= lo,
                "middle-slope test disagrees on a self-dual orbit"
            );
        }
        ok &= here;
    }
    Ok(ok)
}

/// Every orbit's μ-ordinary piece has at most two distinct slopes.
pub fn self_compatible(d: &MonodromyDatum, p: u64) -> Result<bool, ClutchError> {
    let dec = OrbitDecomposition::new(d.m(), p)?;
    let direct = muord::components(&dec, &d.signature())?
        .iter()
        .all(|c| c.normalized.segments().len() <= 2);
    assert_eq!(
        direct,
        compatible(d, d, p)?,
        "self-compatibility criteria disagree"
    );
    Ok(direct)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> MonodromyDatum {
        s.parse().unwrap()
    }

    #[test]
    fn exceptional_pair() {
        let rep = clutch(&d("4:3:1,1,2"), &d("8:4:4,2,5,5")).unwrap();
        assert_eq!(rep.gamma3.to_string(), "8:5:2,2,2,5,5");
        assert_eq!((rep.d1, rep.d2, rep.r0, rep.epsilon), (2, 1, 2, 2));
        assert_eq!(rep.g3, 9);
        assert!(rep.balanced(7).unwrap());
        assert!(!compatible(&d("4:3:1,1,2"), &d("8:4:4,2,5,5"), 7).unwrap());
        assert!(rep.balanced(1).unwrap());
        assert_eq!(rep.epsilon_orbits(7).unwrap().iter().sum::<u64>(), 2);
        let (lhs, rhs) = rep.mu_ordinary_product(7).unwrap();
        assert_eq!(lhs.to_string(), "ord^4+ss^5");
        assert_eq!(rhs, lhs);
        assert_eq!(rep.f3.nonzero(), &[2, 2, 0, 0, 3, 1, 1]);
    }

    #[test]
    fn rejects_inadmissible() {
        assert!(matches!(
            clutch(&d("4:3:1,1,2"), &d("4:3:1,1,2")),
            Err(ClutchError::NotAdmissible(_))
        ));
        let (a, b) = find_admissible(&d("4:3:1,1,2"), &d("4:3:1,1,2")).unwrap();
        assert!(admissible(&a, &b));
    }

    #[test]
    fn compatibility_needs_divisibility() {
        assert_eq!(
            compatible(&d("4:3:1,1,2"), &d("6:4:1,1,1,3"), 1),
            Err(ClutchError::NotDivisible(4, 6))
        );
    }
}
