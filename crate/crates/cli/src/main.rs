use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ordo::cohmaps::{construct_from_tau, default_basis, psi, psi_tilde, sikora_coordinate};
use ordo::convexity::{
    brute_convex, check_convex, parse_pin, structural_convexity, word_constraints, ExponentMatrix, WordExpr,
};
use ordo::dynamics::{circle_samples, dynamically_equivalent, euler_identity_suite, realize, EquivalenceMode};
use ordo::groups::ball;
use ordo::orderings::axioms_check;
use ordo::quasimorph::{rho, stable_approx};
use ordo::{emit_ordering, parse_element, parse_ordering, Cone, Element, Error, GroupRef, RealConstant, Result, RhoContext};

const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Parser)]
#[command(name = "ordo", version, about = "Exact computations with left orderings of Z^n and braid groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Dynamical,
    Semi,
}

#[derive(Subcommand)]
enum Command {
    /// Sampled check of the left-ordering axioms.
    Axioms {
        #[arg(long)]
        ordering: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bracketing exponent of an element against the anchor.
    Rho {
        #[arg(long)]
        ordering: String,
        #[arg(long)]
        x: String,
        element: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Stable value rho(h^N)/N with its certified enclosure.
    Stable {
        #[arg(long)]
        ordering: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 300)]
        n: u64,
        element: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Stable values of a homology basis reduced mod 1.
    Psi {
        #[arg(long)]
        ordering: String,
        #[arg(long)]
        x: String,
        #[arg(long, num_args = 1..)]
        basis: Vec<String>,
        #[arg(long, default_value_t = 600)]
        n: u64,
    },
    /// Unreduced stable values, or inf for a non-cofinal anchor.
    Psitilde {
        #[arg(long)]
        ordering: String,
        #[arg(long)]
        x: String,
        #[arg(long, num_args = 1..)]
        basis: Vec<String>,
        #[arg(long, default_value_t = 600)]
        n: u64,
    },
    /// Flag ordering of Z^n whose stable map is the given homomorphism.
    Construct {
        #[arg(long)]
        x: String,
        /// JSON array of constants, one per basis vector.
        #[arg(long)]
        tau: String,
        /// Ordering document breaking ties on the kernel.
        #[arg(long)]
        tiebreak: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Circle coordinate of a flag ordering of Z^2.
    Sikora {
        #[arg(long)]
        ordering: String,
    },
    /// Convexity verdict for a subgroup given by exponent rows.
    Convex {
        #[arg(long)]
        ordering: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        subgroup: String,
        /// Also search the exponent box of this radius for a violation.
        #[arg(long)]
        brute: Option<i64>,
    },
    /// Stable-value constraints from several expressions of one element.
    Obstruct {
        #[arg(long = "expr", required = true)]
        exprs: Vec<String>,
        /// Known stable value, `name=p/q`.
        #[arg(long = "pin")]
        pins: Vec<String>,
        /// Abelian ambient group: sums must vanish.
        #[arg(long)]
        tight: bool,
        /// Ordering whose group interprets `--assign`, to verify the expressions agree.
        #[arg(long)]
        ordering: Option<String>,
        /// Generator value, `name=ELEMENT`.
        #[arg(long = "assign")]
        assign: Vec<String>,
    },
    /// Inductive realization table on a ball or an explicit enumeration.
    Realize {
        #[arg(long)]
        ordering: String,
        #[arg(long, default_value_t = 2)]
        ball: usize,
        /// JSON array of element strings; the first must be the identity.
        #[arg(long)]
        enumeration: Option<String>,
    },
    /// Section cocycle of the circle action against the bracketing defect.
    Cocycle {
        #[arg(long)]
        ordering: String,
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 4)]
        ball: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dynamical or semi-dynamical equivalence of two orderings.
    Equiv {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        x: String,
        #[arg(long, value_enum, default_value_t = Mode::Dynamical)]
        mode: Mode,
        #[arg(long, default_value_t = 600)]
        n: u64,
    },
}

fn read_text(arg: &str) -> Result<String> {
    if arg.trim_start().starts_with('{') || arg.trim_start().starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(arg).map_err(|e| Error::InvalidInput(format!("cannot read {arg}: {e}")))
}

fn load_ordering(arg: &str) -> Result<Cone> {
    parse_ordering(&read_text(arg)?)
}

fn context(cone: Cone, x: &str, cap: u64) -> Result<RhoContext> {
    let x = parse_element(x, cone.group())?;
    RhoContext::whole_group(cone, x, cap)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn basis_or_default(ctx: &RhoContext, basis: &[String]) -> Result<Vec<Element>> {
    if basis.is_empty() {
        Ok(default_basis(ctx))
    } else {
        basis.iter().map(|b| parse_element(b, ctx.cone.group())).collect()
    }
}

fn run(cmd: Command) -> Result<Value> {
    match cmd {
        Command::Axioms { ordering, samples, seed } => {
            let cone = load_ordering(&ordering)?;
            Ok(to_value(&axioms_check(&cone, samples, seed)?))
        }
        Command::Rho { ordering, x, element, cap } => {
            let ctx = context(load_ordering(&ordering)?, &x, cap)?;
            let h = parse_element(&element, ctx.cone.group())?;
            Ok(json!({ "value": rho(&ctx, &h)? }))
        }
        Command::Stable { ordering, x, n, element, cap } => {
            let ctx = context(load_ordering(&ordering)?, &x, cap)?;
            let h = parse_element(&element, ctx.cone.group())?;
            Ok(to_value(&stable_approx(&ctx, &h, n)?))
        }
        Command::Psi { ordering, x, basis, n } => {
            let ctx = context(load_ordering(&ordering)?, &x, DEFAULT_CAP)?;
            let b = basis_or_default(&ctx, &basis)?;
            Ok(to_value(&psi(&ctx, &b, n)?))
        }
        Command::Psitilde { ordering, x, basis, n } => {
            let ctx = context(load_ordering(&ordering)?, &x, DEFAULT_CAP)?;
            let b = basis_or_default(&ctx, &basis)?;
            Ok(to_value(&psi_tilde(&ctx, &b, n)?))
        }
        Command::Construct { x, tau, tiebreak, out } => {
            let r: Vec<RealConstant> =
                serde_json::from_str(&tau).map_err(|e| Error::Parse(format!("tau must be a JSON array of constants: {e}")))?;
            let group = GroupRef::FreeAbelian { rank: r.len() };
            group.validate()?;
            let xe = parse_element(&x, group)?;
            let tb = tiebreak.as_deref().map(load_ordering).transpose()?;
            let tb_flag = match &tb {
                Some(c) => Some(c.as_flag().ok_or_else(|| Error::InvalidInput("tie-break must be a flag ordering".into()))?),
                None => None,
            };
            let flag = construct_from_tau(&r, xe.as_lattice().unwrap().coords(), tb_flag)?;
            let cone = Cone::Flag(flag);
            if let Some(path) = out {
                fs::write(&path, emit_ordering(&cone) + "\n").map_err(|e| Error::InvalidInput(format!("cannot write {path}: {e}")))?;
            }
            Ok(ordo::json::ordering_to_value(&cone))
        }
        Command::Sikora { ordering } => {
            let cone = load_ordering(&ordering)?;
            let flag = cone.as_flag().ok_or_else(|| Error::InvalidInput("sikora needs a flag ordering of Z^2".into()))?;
            let point = sikora_coordinate(flag)?;
            Ok(json!({ "point": to_value(&point), "slope": to_value(&point.slope()) }))
        }
        Command::Convex { ordering, x, subgroup, brute } => {
            let cone = load_ordering(&ordering)?;
            let flag = cone.as_flag().ok_or_else(|| Error::InvalidInput("convex needs a flag ordering".into()))?;
            let e = ExponentMatrix::parse(&subgroup)?;
            let xe = parse_element(&x, cone.group())?;
            let structural = structural_convexity(flag, &e)?;
            let mut out = match check_convex(flag, xe.as_lattice().unwrap().coords(), &e) {
                Ok(v) => to_value(&v),
                Err(Error::NotCofinal(_)) => json!({
                    "outcome": if structural.convex { "Convex" } else { "NotConvex" },
                    "method": "structural",
                    "note": "anchor is not cofinal",
                }),
                Err(err) => return Err(err),
            };
            out["structural"] = to_value(&structural);
            if let Some(r) = brute {
                out["brute"] = to_value(&brute_convex(&cone, &cone.group().generators(), &e, r)?);
            }
            Ok(out)
        }
        Command::Obstruct { exprs, pins, tight, ordering, assign } => {
            let exprs: Vec<WordExpr> = exprs.iter().map(|e| WordExpr::parse(e)).collect::<Result<_>>()?;
            let pins: BTreeMap<_, _> = pins.iter().map(|p| parse_pin(p)).collect::<Result<_>>()?;
            let mut out = to_value(&word_constraints(&exprs, &pins, tight)?);
            if let Some(o) = ordering {
                let cone = load_ordering(&o)?;
                let mut table = BTreeMap::new();
                for a in &assign {
                    let (name, word) = a
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("assignment {a:?} must look like name=ELEMENT")))?;
                    table.insert(name.trim().to_string(), parse_element(word, cone.group())?);
                }
                let values: Vec<Element> =
                    exprs.iter().map(|e| e.evaluate(&table, &cone.group().identity())).collect::<Result<_>>()?;
                let mut agree = true;
                for v in &values[1..] {
                    agree &= cone.compare(&values[0], v)?.is_eq();
                }
                out["relation_verified"] = json!(agree);
            }
            Ok(out)
        }
        Command::Realize { ordering, ball: radius, enumeration } => {
            let cone = load_ordering(&ordering)?;
            let elems = match enumeration {
                Some(path) => {
                    let words: Vec<String> = serde_json::from_str(&read_text(&path)?)
                        .map_err(|e| Error::Parse(format!("enumeration must be a JSON array of strings: {e}")))?;
                    words.iter().map(|w| parse_element(w, cone.group())).collect::<Result<Vec<_>>>()?
                }
                None => ordo::dynamics::distinct(&cone, &ball(cone.group(), radius))?,
            };
            let table = realize(&cone, &elems)?;
            Ok(json!({ "table": to_value(&table), "order_embedding": table.is_order_embedding()? }))
        }
        Command::Cocycle { ordering, x, samples, ball: radius, seed } => {
            let ctx = context(load_ordering(&ordering)?, &x, DEFAULT_CAP)?;
            let action = circle_samples(&ctx, radius)?;
            let suite = euler_identity_suite(&action, samples, seed)?;
            let mut out = to_value(&suite);
            out["passed"] = json!(suite.passed());
            out["unit_translation"] = json!(action.unit_translation_holds()?);
            Ok(out)
        }
        Command::Equiv { a, b, x, mode, n } => {
            let ca = context(load_ordering(&a)?, &x, DEFAULT_CAP)?;
            let cb = context(load_ordering(&b)?, &x, DEFAULT_CAP)?;
            let mode = match mode {
                Mode::Dynamical => EquivalenceMode::Dynamical,
                Mode::Semi => EquivalenceMode::SemiDynamical,
            };
            Ok(to_value(&dynamically_equivalent(&ca, &cb, mode, n)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(v) => {
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            let doc = json!({ "error": e.code(), "message": e.to_string() });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            ExitCode::from(if e.is_undecided() { 3 } else { 2 })
        }
    }
}
