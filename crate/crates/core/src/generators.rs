//! Inductive constructions of certified families.
//!
//! Every clutch performed along the way re-checks admissibility and balance,
//! compatibility when a non-μ-ordinary payload rides along, and recomputes the
//! μ-ordinary polygon of the new datum from scratch. Existence of smooth
//! curves is never computed; it is carried as assumption tags.

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog;
use crate::clutch::{self, ClutchError};
use crate::monodromy::{DatumError, MonodromyDatum};
use crate::muord::{self, MuOrdError};
use crate::orbits::OrbitError;
use crate::polygon::NewtonPolygon;
use crate::strata::{self, StrataError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{0} is not a base case at this prime class")]
    NotBaseCase(String),
    #[error("{0} is not a Newton polygon of the Kottwitz set")]
    NotInKottwitzSet(String),
    #[error("no entries a(i) + a(j) = 0 mod m in {0}")]
    NoComplementaryPair(String),
    #[error("hypothesis ({which}) fails for {g1} and {g2}")]
    Hypothesis {
        which: &'static str,
        g1: String,
        g2: String,
    },
    #[error("{0}")]
    BadParameter(String),
    #[error("chain bookkeeping disagrees with recomputation: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Datum(#[from] DatumError),
    #[error(transparent)]
    Clutch(#[from] ClutchError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    MuOrd(#[from] MuOrdError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// Hypotheses checked at one clutch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub gamma1: String,
    pub gamma2: String,
    pub admissible: bool,
    pub balanced: bool,
    /// Present only when a non-μ-ordinary polygon is carried.
    pub compatible: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Base {
        datum: MonodromyDatum,
        p_class: u64,
    },
    Payload {
        polygon: NewtonPolygon,
    },
    ExtendOrd {
        c: u64,
    },
    SelfClutch {
        n: u64,
        auto_pad: bool,
    },
    PadAndClutch {
        t: u64,
        n: u64,
    },
    DoubleInduction {
        partner: Vec<Step>,
        n1: u64,
        n2: u64,
    },
    /// One clutch with the partner glued after `self`.
    ClutchWith {
        partner: Vec<Step>,
    },
    /// Replace the datum by the equivalent datum `u a` (`u` a unit mod m).
    Twist {
        unit: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    #[serde(flatten)]
    pub op: Op,
    #[serde(default)]
    pub checks: Vec<Checks>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertifiedFamily {
    pub datum: MonodromyDatum,
    pub p_class: u64,
    /// The claimed Newton polygon of a smooth member.
    pub polygon: NewtonPolygon,
    /// μ-ordinary polygon of the datum as tracked through the chain.
    pub mu_ordinary: NewtonPolygon,
    pub steps: Vec<Step>,
    pub assumptions: Vec<String>,
}

impl CertifiedFamily {
    pub fn is_mu_ordinary(&self) -> bool {
        self.polygon == self.mu_ordinary
    }

    pub fn genus(&self) -> u64 {
        self.datum.genus()
    }

    fn mu_view(&self) -> Self {
        Self {
            polygon: self.mu_ordinary.clone(),
            ..self.clone()
        }
    }

    fn with_datum(&self, datum: MonodromyDatum) -> Self {
        Self {
            datum,
            ..self.clone()
        }
    }

    fn push(mut self, op: Op, checks: Vec<Checks>) -> Self {
        self.steps.push(Step { op, checks });
        self
    }

    /// Basic sanity of the claim: symmetric, integral, of the right height.
    pub fn validate(&self) -> Result<(), GenError> {
        let g = self
            .polygon
            .genus()
            .map_err(|e| GenError::Inconsistent(e.to_string()))?;
        if g != self.genus() {
            return Err(GenError::Inconsistent(format!(
                "polygon {} has genus {g}, datum {} has genus {}",
                self.polygon,
                self.datum,
                self.genus()
            )));
        }
        for s in &self.steps {
            for c in &s.checks {
                if !c.admissible || !c.balanced || c.compatible == Some(false) {
                    return Err(GenError::Inconsistent(format!(
                        "failed check recorded at {} + {}",
                        c.gamma1, c.gamma2
                    )));
                }
            }
        }
        Ok(())
    }

    /// Re-run the recorded steps from scratch.
    pub fn replay(&self) -> Result<Self, GenError> {
        replay(&self.steps)
    }
}

fn add_assumption(list: &mut Vec<String>, tag: String) {
    if !list.contains(&tag) {
        list.push(tag);
    }
}

pub fn base_case(d: &MonodromyDatum, p: u64) -> Result<CertifiedFamily, GenError> {
    let pc = p % d.m();
    let u = muord::mu_ordinary(d, pc)?;
    let nonzero = d.a().iter().filter(|&&x| x != 0).count();
    let tag = if d.n_points() == 3 || nonzero <= 3 {
        "Z°(γ)[u] nonempty: N = 3".to_string()
    } else if let Some(fam) = d.strip_zeros().ok().and_then(|s| catalog::find_family(&s)) {
        format!("Z°(γ)[u] nonempty: Moonen family {}", fam.label)
    } else {
        let set = strata::kottwitz_set(d, pc)?;
        if !set.mu_ordinary_unique_max_p_rank() {
            return Err(GenError::NotBaseCase(d.to_string()));
        }
        let m = d.m();
        if nonzero == 4 {
            "Z°(γ)[u] nonempty: u unique of maximal p-rank, N = 4".to_string()
        } else if pc == 1 || pc == m - 1 {
            "Z°(γ)[u] nonempty: u unique of maximal p-rank, p = ±1 mod m".to_string()
        } else {
            format!(
                "Z°(γ)[u] nonempty: u unique of maximal p-rank, requires p >= {}",
                m * (nonzero as u64 - 3)
            )
        }
    };
    Ok(CertifiedFamily {
        datum: d.clone(),
        p_class: pc,
        polygon: u.clone(),
        mu_ordinary: u,
        steps: vec![Step {
            op: Op::Base {
                datum: d.clone(),
                p_class: pc,
            },
            checks: vec![],
        }],
        assumptions: vec![tag],
    })
}

/// Carry a non-μ-ordinary polygon of the base family.
pub fn with_payload(f: &CertifiedFamily, nu: &NewtonPolygon) -> Result<CertifiedFamily, GenError> {
    if f.steps.len() != 1 || !f.is_mu_ordinary() {
        return Err(GenError::BadParameter(
            "payloads attach to an unmodified base family".into(),
        ));
    }
    let set = strata::kottwitz_set(&f.datum, f.p_class)?;
    if !set.totals().contains(nu) {
        return Err(GenError::NotInKottwitzSet(nu.to_string()));
    }
    let mut out = f.clone();
    out.polygon = nu.clone();
    let mut tag = format!("Z°(γ)[{nu}] nonempty with matching codimension");
    if let Some(fam) = f
        .datum
        .strip_zeros()
        .ok()
        .and_then(|s| catalog::find_family(&s))
    {
        if fam.dagger(f.p_class, nu) {
            tag.push_str(", p ≫ 0");
        }
    }
    add_assumption(&mut out.assumptions, tag);
    Ok(out.push(
        Op::Payload {
            polygon: nu.clone(),
        },
        vec![],
    ))
}

/// Glue `f1` (last point) to `f2` (first point). `f1` must be μ-ordinary.
fn glue(f1: &CertifiedFamily, f2: &CertifiedFamily) -> Result<(CertifiedFamily, Checks), GenError> {
    if !f1.is_mu_ordinary() {
        return Err(GenError::BadParameter(
            "the first family of a clutch must carry its μ-ordinary polygon".into(),
        ));
    }
    let (m1, m2) = (f1.datum.m(), f2.datum.m());
    let pc = match (m2 % m1 == 0, m1 % m2 == 0) {
        (true, _) if f2.p_class % m1 == f1.p_class => f2.p_class,
        (_, true) if f1.p_class % m2 == f2.p_class => f1.p_class,
        _ => {
            return Err(GenError::BadParameter(format!(
                "prime classes {} mod {m1} and {} mod {m2} are not comparable",
                f1.p_class, f2.p_class
            )))
        }
    };
    let mk = |which| GenError::Hypothesis {
        which,
        g1: f1.datum.to_string(),
        g2: f2.datum.to_string(),
    };
    if !clutch::admissible(&f1.datum, &f2.datum) {
        return Err(mk("A"));
    }
    let rep = clutch::clutch(&f1.datum, &f2.datum)?;
    let balanced = rep.balanced(pc)?;
    if !balanced {
        return Err(mk("B"));
    }
    let compatible = if f2.is_mu_ordinary() {
        None
    } else {
        let ok = clutch::compatible(&f1.datum, &f2.datum, pc)?;
        if !ok {
            return Err(mk("C"));
        }
        Some(ok)
    };
    let mu = rep.polygon(&f1.mu_ordinary, &f2.mu_ordinary);
    let fresh = muord::mu_ordinary(&rep.gamma3, pc)?;
    if mu != fresh {
        return Err(GenError::Inconsistent(format!(
            "tracked μ-ordinary {mu} but {} has {fresh}",
            rep.gamma3
        )));
    }
    let polygon = rep.polygon(&f1.polygon, &f2.polygon);
    let mut assumptions = f1.assumptions.clone();
    for a in &f2.assumptions {
        add_assumption(&mut assumptions, a.clone());
    }
    let checks = Checks {
        gamma1: f1.datum.to_string(),
        gamma2: f2.datum.to_string(),
        admissible: true,
        balanced,
        compatible,
    };
    let out = CertifiedFamily {
        datum: rep.gamma3,
        p_class: pc,
        polygon,
        mu_ordinary: mu,
        steps: if m1 >= m2 {
            f1.steps.clone()
        } else {
            f2.steps.clone()
        },
        assumptions,
    };
    Ok((out, checks))
}

fn genus_zero_piece(m: u64, c: u64, p: u64) -> Result<CertifiedFamily, GenError> {
    let t = m.gcd(&c);
    let (mm, cc) = (m / t, c / t);
    let d = MonodromyDatum::generalized(mm, vec![cc, mm - cc, 0])?;
    base_case(&d, p % mm)
}

/// `(m, N, a) -> (m, N + 2, (c, m - c, a))`, adding `ord^{m - gcd(m, c)}`.
pub fn extend_ord(f: &CertifiedFamily, c: u64) -> Result<CertifiedFamily, GenError> {
    let m = f.datum.m();
    let c = c % m;
    if c == 0 {
        return Err(GenError::BadParameter("c must be nonzero mod m".into()));
    }
    let piece = genus_zero_piece(m, c, f.p_class)?;
    let (out, checks) = glue(&piece, &f.with_datum(f.datum.pad_front()))?;
    let t = m.gcd(&c);
    if out.genus() != f.genus() + m - t {
        return Err(GenError::Inconsistent("genus after extend_ord".into()));
    }
    let mut out = CertifiedFamily {
        steps: f.steps.clone(),
        assumptions: f.assumptions.clone(),
        ..out
    };
    out.steps.push(Step {
        op: Op::ExtendOrd { c },
        checks: vec![checks],
    });
    Ok(out)
}

fn complementary_pair(d: &MonodromyDatum) -> Option<(usize, usize)> {
    let (m, a) = (d.m(), d.a());
    (0..a.len())
        .flat_map(|i| (i + 1..a.len()).map(move |j| (i, j)))
        .find(|&(i, j)| (a[i] + a[j]) % m == 0)
}

/// `Z^{×n}` built on the pair of points `(i, j)` of `f`.
fn chain(
    f: &CertifiedFamily,
    i: usize,
    j: usize,
    n: u64,
) -> Result<(CertifiedFamily, Vec<Checks>), GenError> {
    if n == 0 {
        return Err(GenError::BadParameter("n must be at least 1".into()));
    }
    let beta = f.datum.with_ends(i, j);
    let base = f.with_datum(beta.clone());
    let unit = base.mu_view();
    let mut checks = Vec::new();
    let mu_steps = if base.is_mu_ordinary() { n } else { n - 1 };
    let mut acc: Option<CertifiedFamily> = None;
    for _ in 0..mu_steps {
        acc = Some(match acc {
            None => unit.clone(),
            Some(prev) => {
                let (next, c) = glue(&prev, &unit)?;
                checks.push(c);
                next
            }
        });
    }
    let out = if base.is_mu_ordinary() {
        acc.unwrap()
    } else {
        match acc {
            None => base,
            Some(prev) => {
                if !clutch::self_compatible(&beta, f.p_class)? {
                    return Err(GenError::Hypothesis {
                        which: "C",
                        g1: beta.to_string(),
                        g2: beta.to_string(),
                    });
                }
                let (next, c) = glue(&prev, &base)?;
                checks.push(c);
                next
            }
        }
    };
    let r = f.datum.m().gcd(&f.datum.a()[i]);
    let expect = f
        .mu_ordinary
        .power(n - 1)
        .amalgamate(&f.polygon)
        .amalgamate(&NewtonPolygon::ord().power((n - 1) * (r - 1)));
    if out.polygon != expect {
        return Err(GenError::Inconsistent(format!(
            "self-clutch gave {} instead of {expect}",
            out.polygon
        )));
    }
    Ok((out, checks))
}

fn finish(
    f: &CertifiedFamily,
    out: CertifiedFamily,
    op: Op,
    checks: Vec<Checks>,
) -> CertifiedFamily {
    let mut out = CertifiedFamily {
        steps: f.steps.clone(),
        assumptions: f.assumptions.clone(),
        ..out
    };
    out.steps.push(Step { op, checks });
    out
}

/// Iterated clutching at a pair `a(i) + a(j) = 0 mod m`:
/// `u^n ⊕ ord^{(n-1)(r-1)}`, or `u^{n-1} ⊕ ν ⊕ ord^{(n-1)(r-1)}` with a payload.
/// With `auto_pad`, two unramified points are added when no pair exists.
pub fn self_clutch(
    f: &CertifiedFamily,
    n: u64,
    auto_pad: bool,
) -> Result<CertifiedFamily, GenError> {
    let (g, i, j) = match complementary_pair(&f.datum) {
        Some((i, j)) => (f.clone(), i, j),
        None if auto_pad => {
            let k = f.datum.n_points();
            (f.with_datum(f.datum.pad().pad()), k, k + 1)
        }
        None => return Err(GenError::NoComplementaryPair(f.datum.to_string())),
    };
    let (out, checks) = chain(&g, i, j, n)?;
    Ok(finish(f, out, Op::SelfClutch { n, auto_pad }, checks))
}

/// `u^n ⊕ ord^{mn - n - t + 1}` for a divisor `t` of `m`.
pub fn pad_and_clutch(f: &CertifiedFamily, t: u64, n: u64) -> Result<CertifiedFamily, GenError> {
    let m = f.datum.m();
    if t == 0 || !m.is_multiple_of(t) {
        return Err(GenError::BadParameter(format!(
            "t = {t} does not divide m = {m}"
        )));
    }
    let (out, mut checks) = if t == m {
        let k = f.datum.n_points();
        chain(&f.with_datum(f.datum.pad().pad()), k, k + 1, n)?
    } else {
        let g = extend_ord(f, t)?;
        let pre = g.steps.last().unwrap().checks.clone();
        let (out, mut c) = chain(&g, 0, 1, n)?;
        let mut all = pre;
        all.append(&mut c);
        (out, all)
    };
    let expect = f
        .mu_ordinary
        .power(n - 1)
        .amalgamate(&f.polygon)
        .amalgamate(&NewtonPolygon::ord().power(m * n + 1 - n - t));
    if out.polygon != expect {
        return Err(GenError::Inconsistent("pad_and_clutch polygon".into()));
    }
    checks.shrink_to_fit();
    Ok(finish(f, out, Op::PadAndClutch { t, n }, checks))
}

/// Position of some entry equal to `value` (first match).
fn position_of(d: &MonodromyDatum, value: u64) -> usize {
    d.a()
        .iter()
        .position(|&x| x == value)
        .expect("entry present")
}

fn move_to(d: &MonodromyDatum, value: u64, end: bool) -> MonodromyDatum {
    let k = position_of(d, value);
    if end {
        clutch::move_to_end(d, k)
    } else {
        clutch::move_to_front(d, k)
    }
}

/// `u1^{n1} ⊕ u2^{n2} ⊕ ord^{(n1+n2-2)(m-1)+(r-1)}`. When `f2` carries a
/// payload `ν2`: `u1^{n1} ⊕ u2^{n2-1} ⊕ ν2 ⊕ ord^{...}` with the same exponent.
pub fn double_induction(
    f1: &CertifiedFamily,
    f2: &CertifiedFamily,
    n1: u64,
    n2: u64,
) -> Result<CertifiedFamily, GenError> {
    let m = f1.datum.m();
    if f2.datum.m() != m {
        return Err(GenError::BadParameter(
            "double induction needs m1 = m2".into(),
        ));
    }
    if n1 == 0 || n2 == 0 {
        return Err(GenError::BadParameter("n1, n2 must be at least 1".into()));
    }
    if !f1.is_mu_ordinary() {
        return Err(GenError::BadParameter(
            "the first family must be μ-ordinary".into(),
        ));
    }
    let (g1, g2) = clutch::find_admissible(&f1.datum, &f2.datum).ok_or(GenError::Hypothesis {
        which: "A",
        g1: f1.datum.to_string(),
        g2: f2.datum.to_string(),
    })?;
    let x1 = *g1.a().last().unwrap();
    let x2 = g2.a()[0];
    let r = m.gcd(&x1);
    let mut checks = Vec::new();

    let z1 = pad_and_clutch(&f1.with_datum(g1.clone()), m, n1)?;
    checks.extend(z1.steps.last().unwrap().checks.iter().cloned());
    let z1 = z1.with_datum(move_to(&z1.datum, x1, true));

    let out = if f2.is_mu_ordinary() || n2 == 1 {
        let z2 = if n2 == 1 {
            f2.with_datum(g2.clone())
        } else {
            let z = pad_and_clutch(&f2.with_datum(g2.clone()), m, n2)?;
            checks.extend(z.steps.last().unwrap().checks.iter().cloned());
            z
        };
        let z2 = z2.with_datum(move_to(&z2.datum, x2, false));
        let (out, c) = glue(&z1, &z2)?;
        checks.push(c);
        out
    } else {
        if !clutch::self_compatible(&f2.datum, f2.p_class)? {
            return Err(GenError::Hypothesis {
                which: "C",
                g1: f2.datum.to_string(),
                g2: f2.datum.to_string(),
            });
        }
        let z4 = double_induction(f1, &f2.mu_view(), n1, n2 - 1)?;
        checks.extend(z4.steps.last().unwrap().checks.iter().cloned());
        let z4 = z4.with_datum(move_to(&z4.datum, 0, true));
        let tail = f2.with_datum(f2.datum.pad_front());
        let (out, c) = glue(&z4, &tail)?;
        checks.push(c);
        out
    };
    let expect = f1
        .mu_ordinary
        .power(n1)
        .amalgamate(&f2.mu_ordinary.power(n2 - 1))
        .amalgamate(&f2.polygon)
        .amalgamate(&NewtonPolygon::ord().power((n1 + n2 - 2) * (m - 1) + (r - 1)));
    if out.polygon != expect {
        return Err(GenError::Inconsistent(format!(
            "double induction gave {} instead of {expect}",
            out.polygon
        )));
    }
    let mut out = finish(
        f1,
        out,
        Op::DoubleInduction {
            partner: f2.steps.clone(),
            n1,
            n2,
        },
        checks,
    );
    for a in &f2.assumptions {
        add_assumption(&mut out.assumptions, a.clone());
    }
    Ok(out)
}

/// A single clutch of `f1` (μ-ordinary) with `f2` at the first admissible
/// pair of points: `u1^{d1} ⊕ ν2^{d2} ⊕ ord^ε`.
pub fn clutch_with(
    f1: &CertifiedFamily,
    f2: &CertifiedFamily,
) -> Result<CertifiedFamily, GenError> {
    let (g1, g2) = clutch::find_admissible(&f1.datum, &f2.datum).ok_or(GenError::Hypothesis {
        which: "A",
        g1: f1.datum.to_string(),
        g2: f2.datum.to_string(),
    })?;
    let (out, c) = glue(&f1.with_datum(g1), &f2.with_datum(g2))?;
    let mut out = finish(
        f1,
        out,
        Op::ClutchWith {
            partner: f2.steps.clone(),
        },
        vec![c],
    );
    for a in &f2.assumptions {
        add_assumption(&mut out.assumptions, a.clone());
    }
    Ok(out)
}

/// Equivalent datum `(m, N, u a)`; only legal on an unmodified base.
pub fn twist(f: &CertifiedFamily, unit: u64) -> Result<CertifiedFamily, GenError> {
    let m = f.datum.m();
    if unit.gcd(&m) != 1 {
        return Err(GenError::BadParameter(format!(
            "{unit} is not a unit mod {m}"
        )));
    }
    if f.steps.len() != 1 {
        return Err(GenError::BadParameter(
            "twist applies to a base family".into(),
        ));
    }
    let a: Vec<u64> = f.datum.a().iter().map(|&x| x * unit % m).collect();
    let d = if f.datum.is_generalized() {
        MonodromyDatum::generalized(m, a)?
    } else {
        MonodromyDatum::new(m, a)?
    };
    let mu = muord::mu_ordinary(&d, f.p_class)?;
    if mu != f.mu_ordinary {
        // multiplication by a unit commutes with Frobenius, so orbits and
        // their signature values only get relabelled
        return Err(GenError::Inconsistent(format!(
            "twist by {unit} moved the μ-ordinary polygon from {} to {mu}",
            f.mu_ordinary
        )));
    }
    Ok(f.with_datum(d).push(Op::Twist { unit }, vec![]))
}

pub fn replay(steps: &[Step]) -> Result<CertifiedFamily, GenError> {
    let mut it = steps.iter();
    let Some(Step {
        op: Op::Base { datum, p_class },
        ..
    }) = it.next()
    else {
        return Err(GenError::BadParameter(
            "a derivation starts with a base step".into(),
        ));
    };
    let mut f = base_case(datum, *p_class)?;
    for s in it {
        f = match &s.op {
            Op::Base { .. } => {
                return Err(GenError::BadParameter(
                    "base step in the middle of a log".into(),
                ))
            }
            Op::Payload { polygon } => with_payload(&f, polygon)?,
            Op::ExtendOrd { c } => extend_ord(&f, *c)?,
            Op::SelfClutch { n, auto_pad } => self_clutch(&f, *n, *auto_pad)?,
            Op::PadAndClutch { t, n } => pad_and_clutch(&f, *t, *n)?,
            Op::DoubleInduction { partner, n1, n2 } => {
                double_induction(&f, &replay(partner)?, *n1, *n2)?
            }
            Op::ClutchWith { partner } => clutch_with(&f, &replay(partner)?)?,
            Op::Twist { unit } => twist(&f, *unit)?,
        };
    }
    Ok(f)
}
