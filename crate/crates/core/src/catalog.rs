//! Moonen's twenty special families, their Newton polygon table, and
//! recipes reproducing the infinite families built from them.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_integer::Integer;
use serde::Serialize;

use crate::clutch;
use crate::generators::{self, CertifiedFamily, GenError};
use crate::monodromy::MonodromyDatum;
use crate::muord;
use crate::orbits::OrbitDecomposition;
use crate::polygon::NewtonPolygon;
use crate::strata::{self, KottwitzSet};

const FIXTURE: &str = include_str!("../data/moonen.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub class: u64,
    pub polygons: Vec<NewtonPolygon>,
    pub dagger: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MoonenFamily {
    pub label: String,
    pub index: usize,
    pub datum: MonodromyDatum,
    /// Signature as printed, `f(1), ..., f(m - 1)`.
    pub f: Vec<u64>,
    pub rows: Vec<ClassRow>,
}

impl MoonenFamily {
    pub fn row(&self, class: u64) -> Option<&ClassRow> {
        let c = class % self.datum.m();
        self.rows.iter().find(|r| r.class == c)
    }

    /// Whether `nu` at `class` carries the large-p caveat.
    pub fn dagger(&self, class: u64, nu: &NewtonPolygon) -> bool {
        self.row(class)
            .and_then(|r| r.polygons.iter().position(|q| q == nu).map(|i| r.dagger[i]))
            .unwrap_or(false)
    }

    pub fn genus(&self) -> u64 {
        self.datum.genus()
    }
}

fn parse_list(s: &str) -> Vec<u64> {
    s.split(',')
        .map(|x| x.trim().parse().expect("integer list in fixture"))
        .collect()
}

fn parse_fixture(src: &str) -> Vec<MoonenFamily> {
    let mut out: Vec<MoonenFamily> = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('|').map(str::trim).collect();
        assert_eq!(
            cols.len(),
            7,
            "fixture line {}: expected 7 columns",
            lineno + 1
        );
        let label = cols[0].to_string();
        let m: u64 = cols[1].parse().expect("modulus");
        let datum = MonodromyDatum::new(m, parse_list(cols[2])).expect("fixture datum");
        let f = parse_list(cols[3]);
        let polygons: Vec<NewtonPolygon> = cols[5]
            .split(';')
            .map(|p| p.trim().parse().expect("fixture polygon"))
            .collect();
        let dagger: Vec<bool> = parse_list(cols[6]).into_iter().map(|x| x == 1).collect();
        assert_eq!(polygons.len(), dagger.len(), "fixture line {}", lineno + 1);
        let rows: Vec<ClassRow> = parse_list(cols[4])
            .into_iter()
            .map(|class| ClassRow {
                class,
                polygons: polygons.clone(),
                dagger: dagger.clone(),
            })
            .collect();
        match out.iter_mut().find(|fam| fam.label == label) {
            Some(fam) => {
                assert_eq!(fam.datum, datum, "inconsistent datum for {label}");
                assert_eq!(fam.f, f, "inconsistent signature for {label}");
                fam.rows.extend(rows);
            }
            None => {
                let index = label
                    .trim_start_matches("M[")
                    .trim_end_matches(']')
                    .parse()
                    .expect("label M[k]");
                out.push(MoonenFamily {
                    label,
                    index,
                    datum,
                    f,
                    rows,
                });
            }
        }
    }
    for fam in &mut out {
        fam.rows.sort_by_key(|r| r.class);
    }
    out
}

pub fn families() -> &'static [MoonenFamily] {
    static CELL: OnceLock<Vec<MoonenFamily>> = OnceLock::new();
    CELL.get_or_init(|| parse_fixture(FIXTURE))
}

pub fn family(index: usize) -> Option<&'static MoonenFamily> {
    families().iter().find(|f| f.index == index)
}

/// The catalog family equivalent to `d`, if any.
pub fn find_family(d: &MonodromyDatum) -> Option<&'static MoonenFamily> {
    let key = d.normalize();
    families()
        .iter()
        .find(|f| f.datum.m() == d.m() && f.datum.normalize() == key)
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixRow {
    pub label: String,
    pub class: u64,
    pub expected: Vec<String>,
    pub computed: Vec<String>,
    pub signature_ok: bool,
    /// μ-ordinary polygon is listed and lies below every listed polygon.
    pub mu_ordinary_ok: bool,
    pub sets_equal: bool,
}

impl AppendixRow {
    pub fn ok(&self) -> bool {
        self.signature_ok && self.mu_ordinary_ok && self.sets_equal
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AppendixReport {
    pub rows: Vec<AppendixRow>,
}

impl AppendixReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(AppendixRow::ok)
    }

    pub fn mismatches(&self) -> Vec<&AppendixRow> {
        self.rows.iter().filter(|r| !r.ok()).collect()
    }
}

pub fn reproduce_row(
    fam: &MoonenFamily,
    row: &ClassRow,
) -> Result<AppendixRow, strata::StrataError> {
    let signature_ok = fam.datum.signature().nonzero() == fam.f.as_slice();
    let set = strata::kottwitz_set(&fam.datum, row.class)?;
    let computed: BTreeSet<NewtonPolygon> = set.totals();
    let expected: BTreeSet<NewtonPolygon> = row.polygons.iter().cloned().collect();
    let u = muord::mu_ordinary(&fam.datum, row.class)?;
    let mu_ordinary_ok = expected.contains(&u)
        && expected
            .iter()
            .all(|q| q.lies_on_or_above(&u).unwrap_or(false));
    Ok(AppendixRow {
        label: fam.label.clone(),
        class: row.class,
        expected: expected.iter().map(|q| q.to_string()).collect(),
        computed: computed.iter().map(|q| q.to_string()).collect(),
        signature_ok,
        mu_ordinary_ok,
        sets_equal: computed == expected,
    })
}

pub fn reproduce_appendix() -> AppendixReport {
    let rows = families()
        .iter()
        .flat_map(|fam| fam.rows.iter().map(move |row| (fam, row)))
        .map(|(fam, row)| reproduce_row(fam, row).expect("catalog sets are small"))
        .collect();
    AppendixReport { rows }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplicationRow {
    pub table: String,
    pub case: String,
    pub datum: Option<String>,
    pub expected_genus: u64,
    pub genus: Option<u64>,
    pub expected_polygon: String,
    pub polygon: Option<String>,
    /// μ-ordinary claims recomputed on the final datum.
    pub recomputed: Option<bool>,
    /// Codimension claims (non-μ-ordinary payloads).
    pub codim: Option<bool>,
    pub error: Option<String>,
}

impl ApplicationRow {
    pub fn ok(&self) -> bool {
        self.error.is_none()
            && self.genus == Some(self.expected_genus)
            && self.polygon.as_deref() == Some(self.expected_polygon.as_str())
            && self.recomputed != Some(false)
            && self.codim != Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ApplicationsReport {
    pub rows: Vec<ApplicationRow>,
}

impl ApplicationsReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(ApplicationRow::ok)
    }

    pub fn mismatches(&self) -> Vec<&ApplicationRow> {
        self.rows.iter().filter(|r| !r.ok()).collect()
    }
}

fn poly(s: &str) -> NewtonPolygon {
    s.parse().expect("recipe polygon")
}

fn ord(k: u64) -> NewtonPolygon {
    NewtonPolygon::ord().power(k)
}

fn ss(k: u64) -> NewtonPolygon {
    NewtonPolygon::ss().power(k)
}

fn datum(s: &str) -> MonodromyDatum {
    s.parse().expect("recipe datum")
}

fn moonen(k: usize) -> MonodromyDatum {
    family(k).expect("catalog family").datum.clone()
}

/// Residues whose order mod `m` is even with `p^{f/2} = -1`.
pub fn half_order_minus_one_classes(m: u64) -> Vec<u64> {
    (1..m)
        .filter(|c| c.gcd(&m) == 1)
        .filter(|&c| {
            let dec = OrbitDecomposition::new(m, c).unwrap();
            let f = dec.orbits[dec.orbit_of(1)].size();
            if f % 2 == 1 {
                return false;
            }
            let mut x = 1u64;
            for _ in 0..f / 2 {
                x = x * c % m;
            }
            x == m - 1
        })
        .collect()
}

struct Recipe {
    table: &'static str,
    case: String,
    expected_genus: u64,
    expected: NewtonPolygon,
    /// Kottwitz set codimension to confirm for a non-μ-ordinary claim.
    codim: Option<usize>,
    /// The normalized datum stated alongside the claim, zeros removed.
    stated_datum: Option<MonodromyDatum>,
    run: Box<dyn Fn() -> Result<CertifiedFamily, GenError>>,
}

fn evaluate(r: Recipe) -> ApplicationRow {
    let mut row = ApplicationRow {
        table: r.table.to_string(),
        case: r.case,
        datum: None,
        expected_genus: r.expected_genus,
        genus: None,
        expected_polygon: r.expected.to_string(),
        polygon: None,
        recomputed: None,
        codim: None,
        error: None,
    };
    let fam = match (r.run)() {
        Ok(f) => f,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    if let Err(e) = fam.validate() {
        row.error = Some(e.to_string());
    }
    row.datum = Some(fam.datum.to_string());
    row.genus = Some(fam.genus());
    row.polygon = Some(fam.polygon.to_string());
    if fam.is_mu_ordinary() {
        row.recomputed =
            Some(muord::mu_ordinary(&fam.datum, fam.p_class).ok().as_ref() == Some(&fam.polygon));
    }
    if let Some(stated) = r.stated_datum {
        let same = fam
            .datum
            .strip_zeros()
            .map(|d| d.normalize() == stated.normalize())
            .unwrap_or(false);
        if !same {
            row.error = Some(format!("datum {} differs from stated {stated}", fam.datum));
        }
    }
    if let Some(want) = r.codim {
        row.codim = Some(
            strata::kottwitz_set(&fam.datum, fam.p_class)
                .and_then(|k| k.codim(&fam.polygon))
                .map(|c| c == want)
                .unwrap_or(false),
        );
    }
    row
}

fn base(d: &MonodromyDatum, p: u64) -> Result<CertifiedFamily, GenError> {
    generators::base_case(d, p)
}

fn basic(d: &MonodromyDatum, p: u64) -> Result<CertifiedFamily, GenError> {
    let f = base(d, p)?;
    let set = strata::kottwitz_set(d, p)?;
    let nu = set
        .elements
        .iter()
        .max_by_key(|e| e.length)
        .map(|e| e.total.clone())
        .unwrap();
    generators::with_payload(&f, &nu)
}

fn recipes() -> Vec<Recipe> {
    let mut out = Vec::new();

    // ss^{hn} + ord^{2h(n-1)} from y^m = x^2 - 1
    for m in [3u64, 5, 7, 11] {
        let h = (m - 1) / 2;
        for c in half_order_minus_one_classes(m) {
            for n in 1..=10u64 {
                let d = MonodromyDatum::new(m, vec![1, 1, m - 2]).unwrap();
                out.push(Recipe {
                    table: "ss-growth",
                    case: format!("m={m} p={c} n={n}"),
                    expected_genus: h * (3 * n - 2),
                    expected: ss(h * n).amalgamate(&ord(2 * h * (n - 1))),
                    codim: None,
                    stated_datum: None,
                    run: Box::new(move || generators::pad_and_clutch(&base(&d, c)?, m, n)),
                });
            }
        }
    }

    for n in 1..=6u64 {
        out.push(Recipe {
            table: "M[16] tower",
            case: format!("p=4 mod 5 n={n}"),
            expected_genus: 10 * n - 4,
            expected: ss(4 * n).amalgamate(&ord(6 * n - 4)),
            codim: None,
            stated_datum: Some(MonodromyDatum::new(5, vec![2; 5 * n as usize]).unwrap()),
            run: Box::new(move || generators::pad_and_clutch(&base(&moonen(16), 4)?, 5, n)),
        });
    }

    let pairs: [(usize, usize, &str, u64, u64, &str); 5] = [
        (9, 9, "6:6:1,1,4,4,4,4", 8, 5, "ss^4+ord^4"),
        (9, 12, "6:6:1,1,1,1,4,4", 9, 5, "ss^5+ord^4"),
        (12, 12, "6:6:1,1,1,1,1,1", 10, 5, "ss^7+ord^3"),
        (18, 18, "10:6:3,3,6,6,6,6", 16, 9, "ss^10+ord^6"),
        (20, 20, "12:6:4,4,7,7,7,7", 19, 11, "ss^12+ord^7"),
    ];
    for (k1, k2, stated, g, p, nu) in pairs {
        out.push(Recipe {
            table: "codim-one pairs",
            case: format!("M[{k1}]+M[{k2}] p={p}"),
            expected_genus: g,
            expected: poly(nu),
            codim: Some(1),
            stated_datum: Some(datum(stated)),
            run: Box::new(move || {
                generators::clutch_with(&base(&moonen(k1), p)?, &basic(&moonen(k2), p)?)
            }),
        });
    }

    let third = poly("(1/3,2/3)");
    let quarter = poly("(1/4,3/4)");
    for n in 1..=6u64 {
        // slope 1/3
        for p in [2u64, 4] {
            let d = datum("7:3:1,1,5");
            out.push(Recipe {
                table: "slope 1/3",
                case: format!("(7,3,(1,1,5)) p={p} n={n}"),
                expected_genus: 3 * n + 6 * n - 6,
                expected: third.power(n).amalgamate(&ord(6 * n - 6)),
                codim: None,
                stated_datum: None,
                run: Box::new(move || generators::pad_and_clutch(&base(&d, p)?, 7, n)),
            });
        }
        let rows: [(usize, u64, u64, NewtonPolygon, NewtonPolygon, NewtonPolygon); 6] = [
            (
                17,
                7,
                3,
                third.power(2 * n).amalgamate(&ord(6 * n - 6)),
                third
                    .power(2 * n - 2)
                    .amalgamate(&ss(6))
                    .amalgamate(&ord(6 * n - 6)),
                ss(6),
            ),
            (
                17,
                7,
                5,
                third.power(2 * n).amalgamate(&ord(6 * n - 6)),
                third
                    .power(2 * n - 2)
                    .amalgamate(&ss(6))
                    .amalgamate(&ord(6 * n - 6)),
                ss(6),
            ),
            (
                19,
                9,
                2,
                third
                    .power(2 * n)
                    .amalgamate(&ss(n))
                    .amalgamate(&ord(8 * n - 8)),
                third
                    .power(2 * n - 2)
                    .amalgamate(&ss(n + 6))
                    .amalgamate(&ord(8 * n - 8)),
                ss(7),
            ),
            (
                19,
                9,
                5,
                third
                    .power(2 * n)
                    .amalgamate(&ss(n))
                    .amalgamate(&ord(8 * n - 8)),
                third
                    .power(2 * n - 2)
                    .amalgamate(&ss(n + 6))
                    .amalgamate(&ord(8 * n - 8)),
                ss(7),
            ),
            (
                19,
                9,
                4,
                third.power(2 * n).amalgamate(&ord(9 * n - 8)),
                third
                    .power(2 * n - 2)
                    .amalgamate(&ss(6))
                    .amalgamate(&ord(9 * n - 8)),
                ss(6).amalgamate(&ord(1)),
            ),
            (
                19,
                9,
                7,
                third.power(2 * n).amalgamate(&ord(9 * n - 8)),
                third
                    .power(2 * n - 2)
                    .amalgamate(&ss(6))
                    .amalgamate(&ord(9 * n - 8)),
                ss(6).amalgamate(&ord(1)),
            ),
        ];
        let quarter_rows: [(usize, u64, u64, NewtonPolygon, NewtonPolygon, NewtonPolygon); 4] = [
            (
                11,
                5,
                2,
                quarter.power(n).amalgamate(&ord(4 * n - 4)),
                quarter
                    .power(n - 1)
                    .amalgamate(&ss(4))
                    .amalgamate(&ord(4 * n - 4)),
                ss(4),
            ),
            (
                11,
                5,
                3,
                quarter.power(n).amalgamate(&ord(4 * n - 4)),
                quarter
                    .power(n - 1)
                    .amalgamate(&ss(4))
                    .amalgamate(&ord(4 * n - 4)),
                ss(4),
            ),
            (
                18,
                10,
                3,
                quarter
                    .power(n)
                    .amalgamate(&ss(2 * n))
                    .amalgamate(&ord(9 * n - 9)),
                quarter
                    .power(n - 1)
                    .amalgamate(&ss(2 * n + 4))
                    .amalgamate(&ord(9 * n - 9)),
                ss(6),
            ),
            (
                18,
                10,
                7,
                quarter
                    .power(n)
                    .amalgamate(&ss(2 * n))
                    .amalgamate(&ord(9 * n - 9)),
                quarter
                    .power(n - 1)
                    .amalgamate(&ss(2 * n + 4))
                    .amalgamate(&ord(9 * n - 9)),
                ss(6),
            ),
        ];
        for (table, group) in [
            ("slope 1/3", rows.to_vec()),
            ("slope 1/4", quarter_rows.to_vec()),
        ] {
            for (k, m, p, mu, non, nu) in group {
                let g = family(k).unwrap().genus();
                let genus = g * n + (m - 1) * (n - 1);
                out.push(Recipe {
                    table,
                    case: format!("M[{k}] p={p} n={n} μ-ordinary"),
                    expected_genus: genus,
                    expected: mu,
                    codim: None,
                    stated_datum: None,
                    run: Box::new(move || generators::pad_and_clutch(&base(&moonen(k), p)?, m, n)),
                });
                let payload = nu.clone();
                let own = strata::kottwitz_set(&moonen(k), p)
                    .ok()
                    .and_then(|s| s.codim(&nu).ok());
                out.push(Recipe {
                    table,
                    case: format!("M[{k}] p={p} n={n} payload {nu}"),
                    expected_genus: genus,
                    expected: non,
                    codim: if n <= 2 { own } else { None },
                    stated_datum: None,
                    run: Box::new(move || {
                        let f = generators::with_payload(&base(&moonen(k), p)?, &payload)?;
                        generators::pad_and_clutch(&f, m, n)
                    }),
                });
            }
        }
    }

    // two families mod 5; Z1 = (5,3,(2,2,1)) in its balanced representative 4·a
    for p in [2u64, 3] {
        for n1 in 1..=4u64 {
            for n2 in 1..=4u64 {
                out.push(Recipe {
                    table: "two families mod 5",
                    case: format!("p={p} n1={n1} n2={n2}"),
                    expected_genus: 6 * n1 + 8 * n2,
                    expected: quarter
                        .power(n2 + 1)
                        .amalgamate(&ss(2 * n1))
                        .amalgamate(&ord(4 * (n1 + n2 - 1))),
                    codim: None,
                    stated_datum: None,
                    run: Box::new(move || {
                        let z1 = generators::twist(&base(&datum("5:3:2,2,1"), p)?, 4)?;
                        let z2 = base(&moonen(11), p)?;
                        generators::double_induction(&z1, &z2, n1, n2 + 1)
                    }),
                });
            }
        }
    }

    let cases: [(u64, &[u64], &str, u64); 2] = [
        (11, &[3, 4, 5, 9], "(1/5,4/5)", 5),
        (29, &[7, 16, 20, 23, 24, 25], "(2/7,5/7)+(3/7,4/7)", 14),
    ];
    for (m, classes, nu1, g1) in cases {
        for &p in classes {
            for n in 1..=3u64 {
                let d = MonodromyDatum::new(m, vec![1, 1, m - 2]).unwrap();
                out.push(Recipe {
                    table: "prime m, odd order",
                    case: format!("m={m} p={p} n={n}"),
                    expected_genus: g1 * n + (m - 1) * (n - 1),
                    expected: poly(nu1).power(n).amalgamate(&ord((m - 1) * (n - 1))),
                    codim: None,
                    stated_datum: None,
                    run: Box::new(move || generators::pad_and_clutch(&base(&d, p)?, m, n)),
                });
            }
        }
    }
    out
}

pub fn reproduce_applications() -> ApplicationsReport {
    ApplicationsReport {
        rows: recipes().into_iter().map(evaluate).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenusNineReport {
    pub f2: Vec<u64>,
    pub u1: NewtonPolygon,
    pub u2: NewtonPolygon,
    pub nu2: NewtonPolygon,
    pub d: u64,
    pub r: u64,
    pub f1_dagger: Vec<u64>,
    pub admissible: bool,
    pub gamma3: MonodromyDatum,
    pub f3: Vec<u64>,
    pub epsilon: u64,
    pub g3: u64,
    pub balanced: bool,
    pub compatible: bool,
    pub u3: NewtonPolygon,
    pub totals: Vec<NewtonPolygon>,
    pub target: NewtonPolygon,
    /// Totals strictly more ordinary than `target`.
    pub strictly_above: Vec<NewtonPolygon>,
    pub codim: usize,
}

/// Replays the clutching of `(4,3,(1,1,2))` with M[15] at `p = 7 mod 8`.
pub fn exceptional_prop68() -> GenusNineReport {
    let p = 7;
    let g1 = datum("4:3:1,1,2");
    let g2 = datum("8:4:4,2,5,5");
    let u1 = muord::mu_ordinary(&g1, p).unwrap();
    let u2 = muord::mu_ordinary(&g2, p).unwrap();
    let b2 = strata::kottwitz_set(&g2, p).unwrap();
    let nu2 = b2
        .elements
        .iter()
        .max_by_key(|e| e.length)
        .unwrap()
        .total
        .clone();
    let rep = clutch::clutch(&g1, &g2).unwrap();
    let b3: KottwitzSet = strata::kottwitz_set(&rep.gamma3, p).unwrap();
    let target = rep.polygon(&u1, &nu2);
    let totals: Vec<NewtonPolygon> = b3.totals().into_iter().collect();
    let strictly_above = totals
        .iter()
        .filter(|q| **q != target && target.lies_on_or_above(q).unwrap())
        .cloned()
        .collect();
    GenusNineReport {
        f2: g2.signature().nonzero().to_vec(),
        u1,
        u2,
        nu2,
        d: rep.d1,
        r: rep.r1,
        f1_dagger: g1.induce(rep.d1).signature().nonzero().to_vec(),
        admissible: clutch::admissible(&g1, &g2),
        gamma3: rep.gamma3.clone(),
        f3: rep.f3.nonzero().to_vec(),
        epsilon: rep.epsilon,
        g3: rep.g3,
        balanced: rep.balanced(p).unwrap(),
        compatible: clutch::compatible(&g1, &g2, p).unwrap(),
        u3: muord::mu_ordinary(&rep.gamma3, p).unwrap(),
        codim: b3.codim(&target).unwrap(),
        totals,
        target,
        strictly_above,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_loads_twenty_families() {
        assert_eq!(families().len(), 20);
        assert_eq!(family(16).unwrap().genus(), 6);
        assert_eq!(family(15).unwrap().genus(), 5);
    }

    #[test]
    fn equivalent_data_are_found() {
        let d: MonodromyDatum = "8:4:4,2,5,5".parse().unwrap();
        assert_eq!(find_family(&d).unwrap().label, "M[15]");
        assert!(find_family(&"5:3:1,1,3".parse().unwrap()).is_none());
    }

    #[test]
    fn classes_with_minus_one() {
        assert_eq!(half_order_minus_one_classes(7), vec![3, 5, 6]);
        assert_eq!(half_order_minus_one_classes(11), vec![2, 6, 7, 8, 10]);
    }
}
