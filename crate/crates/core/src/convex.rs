//! Piecewise-linear convex graphs given by ascending (slope, multiplicity) runs.
//!
//! Shared by [`crate::polygon::NewtonPolygon`] and the orbit-normalized
//! polygons, which differ only in the admissible slope range.

use num_traits::Zero;

use crate::Rational;

/// Vertices `(x, y)` of the graph, starting at the origin.
pub(crate) fn vertices(segs: &[(Rational, u64)]) -> Vec<(u64, Rational)> {
    let mut out = Vec::with_capacity(segs.len() + 1);
    let (mut x, mut y) = (0u64, Rational::zero());
    out.push((x, y));
    for &(s, k) in segs {
        x += k;
        y += s * Rational::from_integer(k as i64);
        out.push((x, y));
    }
    out
}

pub(crate) fn width(segs: &[(Rational, u64)]) -> u64 {
    segs.iter().map(|&(_, k)| k).sum()
}

pub(crate) fn rise(segs: &[(Rational, u64)]) -> Rational {
    segs.iter()
        .map(|&(s, k)| s * Rational::from_integer(k as i64))
        .fold(Rational::zero(), |a, b| a + b)
}

/// Height of the graph over an abscissa `x` in `[0, width]`.
pub(crate) fn value_at(segs: &[(Rational, u64)], x: u64) -> Rational {
    let mut left = x;
    let mut y = Rational::zero();
    for &(s, k) in segs {
        let step = left.min(k);
        y += s * Rational::from_integer(step as i64);
        left -= step;
        if left == 0 {
            break;
        }
    }
    y
}

/// `a(x) >= b(x)` at every abscissa; both graphs must share endpoints.
pub(crate) fn on_or_above(a: &[(Rational, u64)], b: &[(Rational, u64)]) -> bool {
    let mut xs: Vec<u64> = vertices(a)
        .into_iter()
        .chain(vertices(b))
        .map(|(x, _)| x)
        .collect();
    xs.sort_unstable();
    xs.dedup();
    xs.into_iter().all(|x| value_at(a, x) >= value_at(b, x))
}

pub(crate) fn integral_vertices(segs: &[(Rational, u64)]) -> bool {
    vertices(segs).iter().all(|(_, y)| y.is_integer())
}

/// Merge runs into strictly ascending order, dropping empty runs.
pub(crate) fn normalize<I: IntoIterator<Item = (Rational, u64)>>(it: I) -> Vec<(Rational, u64)> {
    let mut v: Vec<(Rational, u64)> = it.into_iter().filter(|&(_, k)| k > 0).collect();
    v.sort_by_key(|x| x.0);
    let mut out: Vec<(Rational, u64)> = Vec::with_capacity(v.len());
    for (s, k) in v {
        match out.last_mut() {
            Some(last) if last.0 == s => last.1 += k,
            _ => out.push((s, k)),
        }
    }
    out
}
