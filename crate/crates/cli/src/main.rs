use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use serde_json::{json, Value};

use npcc::catalog;
use npcc::clutch;
use npcc::generators::{self, CertifiedFamily, Step};
use npcc::monodromy::MonodromyDatum;
use npcc::muord;
use npcc::orbits::OrbitDecomposition;
use npcc::polygon::NewtonPolygon;
use npcc::strata::{self, oort, KottwitzSet};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "npcc",
    version,
    about = "Newton polygons of cyclic covers of the line"
)]
struct Cli {
    /// Emit versioned JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
#[group(required = true, multiple = false)]
struct Prime {
    /// A prime; reduced modulo m.
    #[arg(long)]
    p: Option<u64>,
    /// A residue class modulo m.
    #[arg(long)]
    p_class: Option<u64>,
}

#[derive(Args, Clone, Copy)]
#[group(required = false, multiple = false)]
struct OptPrime {
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    p_class: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Base,
    ExtendOrd,
    SelfClutch,
    PadAndClutch,
}

#[derive(Subcommand)]
enum Command {
    /// Signature f(1), ..., f(m-1).
    Signature {
        #[arg(long)]
        datum: MonodromyDatum,
    },
    Genus {
        #[arg(long)]
        datum: MonodromyDatum,
    },
    /// Frobenius orbits on Z/m.
    Orbits {
        #[arg(long)]
        m: u64,
        #[command(flatten)]
        prime: Prime,
    },
    /// μ-ordinary Newton polygon.
    Muord {
        #[arg(long)]
        datum: MonodromyDatum,
        #[command(flatten)]
        prime: Prime,
        /// Also list the per-orbit components.
        #[arg(long)]
        components: bool,
    },
    PrankBound {
        #[arg(long)]
        datum: MonodromyDatum,
        #[command(flatten)]
        prime: Prime,
    },
    /// Kottwitz set with lengths.
    Kottwitz {
        #[arg(long)]
        datum: MonodromyDatum,
        #[command(flatten)]
        prime: Prime,
        /// Print the Hasse diagram in DOT.
        #[arg(long)]
        dot: bool,
        /// Per-orbit candidate bound.
        #[arg(long, env = strata::CAP_ENV, default_value_t = strata::DEFAULT_CAP)]
        cap: u64,
    },
    /// Clutch two data at an admissible pair of points.
    Clutch {
        #[arg(long)]
        first: MonodromyDatum,
        #[arg(long)]
        second: MonodromyDatum,
        #[command(flatten)]
        prime: OptPrime,
    },
    /// Build a certified family.
    Generate {
        #[arg(long, required_unless_present = "replay")]
        datum: Option<MonodromyDatum>,
        #[command(flatten)]
        prime: OptPrime,
        #[arg(long, value_enum, default_value = "base")]
        construction: Construction,
        /// Non-μ-ordinary polygon carried by the base family.
        #[arg(long)]
        payload: Option<NewtonPolygon>,
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, default_value_t = 1)]
        c: u64,
        /// Pad when no complementary pair of points exists.
        #[arg(long)]
        auto_pad: bool,
        /// Replay a step log written by an earlier `--json` run.
        #[arg(long, conflicts_with = "datum")]
        replay: Option<PathBuf>,
    },
    /// Codimension of the Newton stratum in A_g.
    CodimAg {
        #[arg(long)]
        polygon: NewtonPolygon,
    },
    /// Compare dim M_g with the codimension in A_g.
    ConditionU {
        #[arg(long)]
        polygon: NewtonPolygon,
    },
    /// Moonen's families.
    Moonen {
        #[arg(long, required_unless_present = "verify_all")]
        family: Option<usize>,
        #[command(flatten)]
        prime: OptPrime,
        #[arg(long, conflicts_with = "family")]
        verify_all: bool,
    },
    /// Replay the genus 9 example built on M[15].
    Prop68,
}

enum Failure {
    Domain(String),
    /// A report ran but found mismatches; it is still printed.
    Report(String, Value),
}

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Out = Result<(String, Value), Failure>;

fn class_of(p: Option<u64>, p_class: Option<u64>, m: u64) -> Result<Option<u64>, Failure> {
    let c = match (p, p_class) {
        (Some(p), _) => {
            if p < 2 || !is_prime(p) {
                return Err(Failure::Domain(format!("--p {p} is not a prime")));
            }
            p % m
        }
        (None, Some(c)) => c % m,
        (None, None) => return Ok(None),
    };
    if c.gcd(&m) != 1 {
        return Err(Failure::Domain(format!("p is not prime to m = {m}")));
    }
    Ok(Some(c))
}

fn is_prime(p: u64) -> bool {
    (2..)
        .take_while(|d| d * d <= p)
        .all(|d| !p.is_multiple_of(d))
}

fn required(prime: Prime, m: u64) -> Result<u64, Failure> {
    Ok(class_of(prime.p, prime.p_class, m)?.expect("clap enforces one of --p, --p-class"))
}

fn optional(prime: OptPrime, m: u64) -> Result<Option<u64>, Failure> {
    class_of(prime.p, prime.p_class, m)
}

fn lines<I: IntoIterator<Item = String>>(it: I) -> String {
    it.into_iter().collect::<Vec<_>>().join("\n")
}

fn family_text(f: &CertifiedFamily) -> String {
    let mut out = vec![
        format!("datum      {}", f.datum),
        format!("p class    {}", f.p_class),
        format!("genus      {}", f.genus()),
        format!("polygon    {}", f.polygon),
        format!("μ-ordinary {}", f.mu_ordinary),
        format!("steps      {}", f.steps.len()),
    ];
    out.extend(f.assumptions.iter().map(|a| format!("assume     {a}")));
    lines(out)
}

fn kottwitz_text(ks: &KottwitzSet) -> String {
    lines(
        ks.elements
            .iter()
            .map(|e| format!("{}\tlength {}\t{:?}", e.total, e.length, e.choice)),
    )
}

fn run(cmd: Command) -> Out {
    match cmd {
        Command::Signature { datum } => {
            let f = datum.signature();
            Ok((
                f.to_string(),
                json!({ "datum": datum, "signature": f.nonzero() }),
            ))
        }
        Command::Genus { datum } => {
            let g = datum.genus();
            Ok((g.to_string(), json!({ "datum": datum, "genus": g })))
        }
        Command::Orbits { m, prime } => {
            let dec = OrbitDecomposition::new(m, required(prime, m)?)?;
            let text = lines(dec.orbits.iter().map(|o| {
                let mark = if o.self_dual { "  self-dual" } else { "" };
                format!("{:?}  order {}{mark}", o.members, o.order)
            }));
            Ok((text, serde_json::to_value(&dec)?))
        }
        Command::Muord {
            datum,
            prime,
            components,
        } => {
            let p = required(prime, datum.m())?;
            let u = muord::mu_ordinary(&datum, p)?;
            let comps = muord::component_report(&datum, p)?;
            let mut text = u.to_string();
            if components {
                for c in &comps {
                    text.push_str(&format!("\n{:?}  g={}  {}", c.members, c.genus, c.polygon));
                }
            }
            Ok((
                text,
                json!({ "datum": datum, "p_class": p, "polygon": u, "text": u.to_string(), "components": comps }),
            ))
        }
        Command::PrankBound { datum, prime } => {
            let p = required(prime, datum.m())?;
            let b = muord::p_rank_bound(&datum, p)?;
            Ok((
                b.to_string(),
                json!({ "datum": datum, "p_class": p, "p_rank_bound": b }),
            ))
        }
        Command::Kottwitz {
            datum,
            prime,
            dot,
            cap,
        } => {
            let p = required(prime, datum.m())?;
            let ks = KottwitzSet::new(&datum, p, cap)?;
            let text = if dot { ks.to_dot() } else { kottwitz_text(&ks) };
            let elements: Vec<Value> = ks
                .elements
                .iter()
                .map(|e| {
                    json!({ "choice": e.choice, "polygon": e.total, "text": e.total.to_string(), "length": e.length })
                })
                .collect();
            Ok((
                text,
                json!({ "datum": datum, "p_class": p, "elements": elements, "covers": ks.covers(), "dot": ks.to_dot() }),
            ))
        }
        Command::Clutch {
            first,
            second,
            prime,
        } => {
            let (g1, g2) = clutch::find_admissible(&first, &second).ok_or_else(|| {
                Failure::Domain(format!(
                    "no admissible pair of points for {first} and {second}"
                ))
            })?;
            let rep = clutch::clutch(&g1, &g2)?;
            let mut text = vec![
                format!("gamma1  {}", rep.gamma1),
                format!("gamma2  {}", rep.gamma2),
                format!("gamma3  {}", rep.gamma3),
                format!("f3      {}", rep.f3),
                format!("d1 d2   {} {}", rep.d1, rep.d2),
                format!("r0      {}", rep.r0),
                format!("epsilon {}", rep.epsilon),
                format!("genus   {}", rep.g3),
            ];
            let mut v = serde_json::to_value(&rep)?;
            if let Some(p) = optional(prime, rep.m3)? {
                let balanced = rep.balanced(p)?;
                let compatible = clutch::compatible(&g1, &g2, p)?;
                let u3 = muord::mu_ordinary(&rep.gamma3, p)?;
                text.push(format!("balanced {balanced}"));
                text.push(format!("compatible {compatible}"));
                text.push(format!("u3      {u3}"));
                v["p_class"] = json!(p);
                v["balanced"] = json!(balanced);
                v["compatible"] = json!(compatible);
                v["u3"] = json!(u3);
            }
            Ok((lines(text), v))
        }
        Command::Generate {
            datum,
            prime,
            construction,
            payload,
            n,
            t,
            c,
            auto_pad,
            replay,
        } => {
            let fam = if let Some(path) = replay {
                let raw = std::fs::read_to_string(&path)
                    .map_err(|e| Failure::Domain(format!("{}: {e}", path.display())))?;
                let v: Value = serde_json::from_str(&raw)?;
                let steps = v.pointer("/result/steps").cloned().unwrap_or(v);
                let steps: Vec<Step> = serde_json::from_value(steps)?;
                generators::replay(&steps)?
            } else {
                let datum = datum.expect("clap enforces --datum");
                let p = optional(prime, datum.m())?
                    .ok_or_else(|| Failure::Domain("generate needs --p or --p-class".into()))?;
                let mut f = generators::base_case(&datum, p)?;
                if let Some(nu) = &payload {
                    f = generators::with_payload(&f, nu)?;
                }
                match construction {
                    Construction::Base => f,
                    Construction::ExtendOrd => generators::extend_ord(&f, c)?,
                    Construction::SelfClutch => generators::self_clutch(&f, n, auto_pad)?,
                    Construction::PadAndClutch => {
                        generators::pad_and_clutch(&f, t.unwrap_or(datum.m()), n)?
                    }
                }
            };
            fam.validate()?;
            Ok((family_text(&fam), serde_json::to_value(&fam)?))
        }
        Command::CodimAg { polygon } => {
            let w = oort::omega_count(&polygon)?;
            Ok((w.to_string(), json!({ "polygon": polygon, "codim_ag": w })))
        }
        Command::ConditionU { polygon } => {
            let r = oort::condition_u(&polygon)?;
            let text = format!(
                "genus {}  dim M_g {}  codim {}  holds={}",
                r.genus, r.dim_mg, r.codim_ag, r.holds
            );
            Ok((text, json!({ "polygon": polygon, "report": r })))
        }
        Command::Moonen {
            family,
            prime,
            verify_all,
        } => {
            if verify_all {
                let rep = catalog::reproduce_appendix();
                let text = lines(rep.rows.iter().map(|r| {
                    let status = if r.ok() { "ok  " } else { "FAIL" };
                    let extra = if r.ok() {
                        String::new()
                    } else {
                        format!("  printed {:?} computed {:?}", r.expected, r.computed)
                    };
                    format!("{status} {} class {}{extra}", r.label, r.class)
                }));
                let v = serde_json::to_value(&rep)?;
                return if rep.all_match() {
                    Ok((text, v))
                } else {
                    Err(Failure::Report(text, v))
                };
            }
            let k = family.expect("clap enforces --family");
            let fam =
                catalog::family(k).ok_or_else(|| Failure::Domain(format!("no family M[{k}]")))?;
            let rows: Vec<_> = match optional(prime, fam.datum.m())? {
                Some(p) => vec![fam
                    .row(p)
                    .ok_or_else(|| Failure::Domain(format!("{} lists no class {p}", fam.label)))?],
                None => fam.rows.iter().collect(),
            };
            let mut text = vec![format!(
                "{}  {}  genus {}",
                fam.label,
                fam.datum,
                fam.genus()
            )];
            let mut out = Vec::new();
            for row in rows {
                let ks = strata::kottwitz_set(&fam.datum, row.class)?;
                let mut elems: Vec<_> = ks.elements.iter().collect();
                elems.sort_by_key(|e| e.length);
                for e in &elems {
                    let dagger = if fam.dagger(row.class, &e.total) {
                        " †"
                    } else {
                        ""
                    };
                    text.push(format!(
                        "{}\tclass {}\tcodim {}{dagger}",
                        e.total, row.class, e.length
                    ));
                }
                out.push(json!({
                    "class": row.class,
                    "computed": elems.iter().map(|e| json!({
                        "polygon": e.total, "text": e.total.to_string(), "codim": e.length,
                        "dagger": fam.dagger(row.class, &e.total)
                    })).collect::<Vec<_>>(),
                    "printed": row.polygons.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                }));
            }
            Ok((
                lines(text),
                json!({ "label": fam.label, "datum": fam.datum, "f": fam.f, "rows": out }),
            ))
        }
        Command::Prop68 => {
            let r = catalog::exceptional_prop68();
            let text = lines([
                format!("f2        {:?}", r.f2),
                format!("u1        {}", r.u1),
                format!("u2        {}", r.u2),
                format!("nu2       {}", r.nu2),
                format!("d r       {} {}", r.d, r.r),
                format!("f1†       {:?}", r.f1_dagger),
                format!("gamma3    {}", r.gamma3),
                format!("f3        {:?}", r.f3),
                format!("epsilon   {}", r.epsilon),
                format!("g3        {}", r.g3),
                format!("balanced  {}", r.balanced),
                format!("compatible {}", r.compatible),
                format!("u3        {}", r.u3),
                format!("target    {}", r.target),
                format!(
                    "above     {}",
                    lines(r.strictly_above.iter().map(|q| q.to_string()))
                ),
                format!("codim     {}", r.codim),
            ]);
            Ok((text, serde_json::to_value(&r)?))
        }
    }
}

fn envelope(v: Value) -> Value {
    json!({ "schema_version": SCHEMA_VERSION, "result": v })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let print = |text: String, v: Value| {
        if cli.json {
            println!("{}", envelope(v));
        } else {
            println!("{text}");
        }
    };
    match run(cli.command) {
        Ok((text, v)) => {
            print(text, v);
            ExitCode::SUCCESS
        }
        Err(Failure::Report(text, v)) => {
            print(text, v);
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            if cli.json {
                println!(
                    "{}",
                    json!({ "schema_version": SCHEMA_VERSION, "error": msg })
                );
            }
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
