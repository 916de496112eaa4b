//! Frobenius orbits on `Z/m \ {0}`.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::monodromy::Signature;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrbitError {
    #[error("p = {p} is not a unit mod {m}")]
    BadPrime { m: u64, p: u64 },
    #[error("f(n) + f(-n) is not constant on the orbit of {0}")]
    InconsistentSignature(u64),
    #[error("signature has modulus {got}, expected {want}")]
    ModulusMismatch { got: u64, want: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    /// Sorted members.
    pub members: Vec<u64>,
    /// Common additive order of the members in `Z/m`.
    pub order: u64,
    /// Index of the orbit of `-n`.
    pub dual: usize,
    pub self_dual: bool,
}

impl Orbit {
    pub fn size(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn min(&self) -> u64 {
        self.members[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitDecomposition {
    pub m: u64,
    pub p_class: u64,
    pub orbits: Vec<Orbit>,
    #[serde(skip)]
    index: Vec<usize>,
}

impl OrbitDecomposition {
    /// Orbits of `n -> p n` on `Z/m \ {0}`, ordered by smallest member.
    pub fn new(m: u64, p: u64) -> Result<Self, OrbitError> {
        let pc = p % m;
        if pc.gcd(&m) != 1 {
            return Err(OrbitError::BadPrime { m, p });
        }
        let mut index = vec![usize::MAX; m as usize];
        let mut orbits = Vec::new();
        for n in 1..m {
            if index[n as usize] != usize::MAX {
                continue;
            }
            let mut members = Vec::new();
            let mut x = n;
            loop {
                index[x as usize] = orbits.len();
                members.push(x);
                x = x * pc % m;
                if x == n {
                    break;
                }
            }
            members.sort_unstable();
            orbits.push(Orbit {
                order: m / n.gcd(&m),
                members,
                dual: usize::MAX,
                self_dual: false,
            });
        }
        for i in 0..orbits.len() {
            let d = index[(m - orbits[i].min()) as usize];
            orbits[i].dual = d;
            orbits[i].self_dual = d == i;
        }
        Ok(Self {
            m,
            p_class: pc,
            orbits,
            index,
        })
    }

    pub fn orbit_of(&self, n: u64) -> usize {
        let n = n % self.m;
        assert!(n != 0, "0 lies in no orbit");
        self.index[n as usize]
    }

    /// One index per `{o, o*}` pair: the member with the smaller minimum.
    pub fn representatives(&self) -> Vec<usize> {
        (0..self.orbits.len())
            .filter(|&i| self.orbits[i].dual >= i)
            .collect()
    }

    /// `g(o) = f(n) + f(-n)`, checked constant over the orbit.
    pub fn orbit_genus(&self, i: usize, f: &Signature) -> Result<u64, OrbitError> {
        if f.modulus() != self.m {
            return Err(OrbitError::ModulusMismatch {
                got: f.modulus(),
                want: self.m,
            });
        }
        let o = &self.orbits[i];
        let g = f.get(o.min()) + f.get(self.m - o.min());
        for &n in &o.members {
            if f.get(n) + f.get(self.m - n) != g {
                return Err(OrbitError::InconsistentSignature(o.min()));
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_eight_class_seven() {
        let d = OrbitDecomposition::new(8, 7).unwrap();
        let mem: Vec<Vec<u64>> = d.orbits.iter().map(|o| o.members.clone()).collect();
        assert_eq!(mem, vec![vec![1, 7], vec![2, 6], vec![3, 5], vec![4]]);
        assert!(d.orbits.iter().all(|o| o.self_dual));
        assert_eq!(d.orbits[3].order, 2);
    }

    #[test]
    fn non_self_dual_pairs() {
        let d = OrbitDecomposition::new(12, 7).unwrap();
        let i = d.orbit_of(1);
        let j = d.orbit_of(5);
        assert_eq!(d.orbits[i].members, vec![1, 7]);
        assert_eq!(d.orbits[i].dual, j);
        assert!(d.representatives().contains(&i));
        assert!(!d.representatives().contains(&j));
    }

    #[test]
    fn bad_prime() {
        assert_eq!(
            OrbitDecomposition::new(6, 3),
            Err(OrbitError::BadPrime { m: 6, p: 3 })
        );
    }
}
