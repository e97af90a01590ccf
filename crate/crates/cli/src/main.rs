use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use hsjet::diffmod::{tensor_example, Membership, Symbol};
use hsjet::jetring::{commute_check, d, gamma_sharp, JetIndex, JetRing, Series};
use hsjet::mderiv::{Derivation, DerivSpec, MDeriv, SeriesDeriv, SeriesDerivSpec};
use hsjet::phimap::{kernel_membership_m2, phi_apply, phi_section, tower, tower_compatibility_check, PhiDirect};
use hsjet::ratpoly::{parse, parse_monomial, Poly, VarStyle};
use hsjet::verify::{self, DEFAULT_SEED, SUITES};

/// Exact computations with Hasse-Schmidt jets and high-order derivations.
#[derive(Parser)]
#[command(name = "hsjet", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args)]
struct Common {
    /// Ring descriptor, e.g. "s=2 n=1" or "s=2 n=1 / rel x1*x2".
    #[arg(long)]
    ring: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Verb {
    /// The universal derivation d_j(f).
    Jet {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: String,
        #[arg(long, short = 'j', alias = "l")]
        j: u32,
    },
    /// gamma^#(f) = sum_j d_j(f) t^j.
    Gamma {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: String,
    },
    /// Evaluates a derivation of A_n on a polynomial.
    Apply {
        #[command(flatten)]
        common: Common,
        /// Derivation spec text, or @path to read it from a file.
        #[arg(long)]
        deriv: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        f: String,
    },
    /// phi_n(D), as a table on base monomials or evaluated at --f.
    Phi {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        deriv: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        f: Option<String>,
    },
    /// The explicit preimage of a series derivation under phi_n.
    Section {
        #[command(flatten)]
        common: Common,
        /// Series derivation spec (`sderiv m=...`), or @path.
        #[arg(long)]
        deriv: String,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Kernel membership for an order-2 derivation of A_n of K[x].
    Kernel {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        deriv: String,
        /// Accepted for uniformity; the verdict is always JSON.
        #[arg(long)]
        json: bool,
    },
    /// The tower derivation D_k and its compatibility with lower levels.
    Tower {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        json: bool,
    },
    /// Checks partial^alpha o d_l = d_(l - weight) o partial^(collapse) at f.
    Commute {
        #[command(flatten)]
        common: Common,
        /// Jet multi-index as a monomial, e.g. "x1^(1)*x2^(0)".
        #[arg(long)]
        alpha: String,
        #[arg(long, short = 'l', alias = "j")]
        l: u32,
        #[arg(long)]
        f: String,
    },
    /// The tensor-product example over K[x1,x2]/(x1 x2).
    Section3 {
        /// Coefficient degree bound of the membership search.
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Runs the seeded identity suites.
    Verify {
        /// Suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Outcome of a verb: printed text and whether the requested check held.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, ok: true }
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Library(hsjet::Error),
}

impl From<hsjet::Error> for Failure {
    fn from(err: hsjet::Error) -> Self {
        Failure::Library(err)
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.verb) {
        Ok(outcome) => {
            let mut out = io::stdout().lock();
            let _ = writeln!(out, "{}", outcome.text);
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Library(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn ring_of(common: &Common) -> Run<JetRing> {
    let text = common
        .ring
        .as_deref()
        .ok_or_else(|| Failure::Usage("--ring is required".into()))?;
    Ok(text.parse()?)
}

/// Spec text inline or from `@path`; ` / ` separates lines inline.
fn spec_text(arg: &str) -> Run<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn check_order(flag: Option<u32>, order: u32) -> Run<()> {
    match flag {
        Some(m) if m != order => Err(Failure::Usage(format!(
            "--m {m} disagrees with the spec header m={order}"
        ))),
        _ => Ok(()),
    }
}

fn build_deriv(arg: &str, m: Option<u32>, ring: JetRing, style: VarStyle) -> Run<MDeriv> {
    let spec = DerivSpec::parse(&spec_text(arg)?, style)?;
    check_order(m, spec.order)?;
    Ok(spec.build(ring)?)
}

fn poly_in(text: &str, ring: &JetRing) -> Run<Poly> {
    let f = parse(text)?;
    ring.check_member(&f)?;
    Ok(f)
}

fn series_json(s: &Series) -> Value {
    Value::Array(s.coeffs().iter().map(|c| Value::String(c.to_string())).collect())
}

fn series_table_text(e: &SeriesDeriv) -> String {
    let lines: Vec<String> = e.table().iter().map(|(k, v)| format!("{k} -> {v}")).collect();
    if lines.is_empty() {
        "0".into()
    } else {
        lines.join("\n")
    }
}

fn series_table_json(e: &SeriesDeriv) -> Value {
    Value::Object(e.table().iter().map(|(k, v)| (k.to_string(), series_json(v))).collect())
}

fn table_text(d: &MDeriv) -> String {
    let lines: Vec<String> = d.table().iter().map(|(k, v)| format!("value {k} {v}")).collect();
    std::iter::once(format!("deriv m={}", d.order())).chain(lines).collect::<Vec<_>>().join("\n")
}

fn table_json(d: &MDeriv) -> Value {
    Value::Object(d.table().iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect())
}

fn run(verb: Verb) -> Run<Outcome> {
    match verb {
        Verb::Jet { common, f, j } => {
            let ring = ring_of(&common)?;
            let f = poly_in(&f, &ring)?;
            ring.check_base(&f)?;
            let value = d(&f, j, &ring)?;
            Ok(Outcome::ok(if common.json {
                render(&json!({ "j": j, "value": value.to_string() }))
            } else {
                value.to_string()
            }))
        }
        Verb::Gamma { common, f } => {
            let ring = ring_of(&common)?;
            let f = poly_in(&f, &ring)?;
            let value = gamma_sharp(&f, &ring)?;
            Ok(Outcome::ok(if common.json {
                render(&json!({ "coefficients": series_json(&value) }))
            } else {
                value.to_string()
            }))
        }
        Verb::Apply { common, deriv, m, f } => {
            let ring = ring_of(&common)?;
            let d = build_deriv(&deriv, m, ring.clone(), VarStyle::Standard)?;
            let value = d.eval(&poly_in(&f, &ring)?)?;
            Ok(Outcome::ok(if common.json {
                render(&json!({ "value": value.to_string() }))
            } else {
                value.to_string()
            }))
        }
        Verb::Phi { common, deriv, m, f } => {
            let ring = ring_of(&common)?;
            let d = build_deriv(&deriv, m, ring.clone(), VarStyle::Standard)?;
            if let Some(f) = f {
                let f = poly_in(&f, &ring)?;
                ring.check_base(&f)?;
                let value = PhiDirect::new(&d, &ring)?.apply(&f)?;
                return Ok(Outcome::ok(if common.json {
                    render(&json!({ "coefficients": series_json(&value) }))
                } else {
                    value.to_string()
                }));
            }
            let e = phi_apply(&d, &ring)?;
            Ok(Outcome::ok(if common.json {
                render(&json!({ "zero": e.is_zero(), "table": series_table_json(&e) }))
            } else {
                series_table_text(&e)
            }))
        }
        Verb::Section { common, deriv, m } => {
            let ring = ring_of(&common)?;
            let spec = SeriesDerivSpec::parse(&spec_text(&deriv)?)?;
            check_order(m, spec.order)?;
            let section = phi_section(&spec.build(ring)?)?;
            Ok(Outcome::ok(if common.json {
                render(&json!({ "order": section.order(), "table": table_json(&section) }))
            } else {
                table_text(&section)
            }))
        }
        Verb::Kernel { n, deriv, .. } => {
            let d = build_deriv(&deriv, None, JetRing::new(1, n), VarStyle::UnivariateJets)?;
            let verdict = kernel_membership_m2(&d)?;
            let mut out = json!({ "member": verdict.member });
            if let Some(fail) = &verdict.failure {
                out["failure"] = json!({
                    "condition": format!("{:?}", fail.condition).to_lowercase(),
                    "j": fail.j,
                    "value": fail.value.to_string(),
                });
            }
            Ok(Outcome::ok(render(&out)))
        }
        Verb::Tower { k, json } => {
            let d = tower(k);
            let compat = tower_compatibility_check(k);
            let kernel = kernel_membership_m2(&d)?.member;
            let zero = phi_apply(&d, &JetRing::new(1, k))?.is_zero();
            let ok = compat.compatible && kernel && zero;
            let mismatch = compat.mismatch.as_ref().map(|mm| {
                json!({
                    "j": mm.j,
                    "monomial": mm.monomial.to_string(),
                    "upper": mm.upper.to_string(),
                    "lower": mm.lower.to_string(),
                })
            });
            let text = if json {
                render(&json!({
                    "k": k,
                    "table": table_json(&d),
                    "compatible": compat.compatible,
                    "mismatch": mismatch,
                    "kernel_member": kernel,
                    "phi_zero": zero,
                }))
            } else {
                let mut lines = vec![table_text(&d)];
                lines.push(format!("compatible: {}", compat.compatible));
                if let Some(mm) = &compat.mismatch {
                    lines.push(format!(
                        "mismatch: D_{k}({m}) = {} but D_{}({m}) = {}",
                        mm.upper,
                        mm.j,
                        mm.lower,
                        m = mm.monomial
                    ));
                }
                lines.push(format!("kernel member: {kernel}"));
                lines.push(format!("phi_{k}(D_{k}) = 0: {zero}"));
                lines.join("\n")
            };
            Ok(Outcome { text, ok })
        }
        Verb::Commute { common, alpha, l, f } => {
            let ring = ring_of(&common)?;
            let alpha = parse_monomial(&alpha, VarStyle::Standard)?;
            alpha.vars().try_for_each(|v| ring.check_var(v))?;
            let f = poly_in(&f, &ring)?;
            ring.check_base(&f)?;
            let (lhs, rhs) = commute_check(&JetIndex(alpha), l, &f, &ring)?;
            let ok = lhs == rhs;
            let text = if common.json {
                render(&json!({ "equal": ok, "lhs": lhs.to_string(), "rhs": rhs.to_string() }))
            } else {
                format!("lhs: {lhs}\nrhs: {rhs}\nequal: {ok}")
            };
            Ok(Outcome { text, ok })
        }
        Verb::Section3 { degree } => {
            let cert = tensor_example::verify_certificate()?;
            let search = tensor_example::nonmembership(degree)?;
            let multipliers: Vec<Value> = cert
                .ideal_multipliers
                .iter()
                .map(|(sym, h1, h2)| json!({ "symbol": Symbol(sym).to_string(), "h1": h1.to_string(), "h2": h2.to_string() }))
                .collect();
            let infeasible = search.relations_only == Membership::Infeasible;
            let out = json!({
                "certificate": cert.holds,
                "image": cert.image.to_string(),
                "combination": cert.combination.to_string(),
                "residual": cert.residual.to_string(),
                "ideal_multipliers": multipliers,
                "degree": degree,
                "infeasible": infeasible,
                "infeasible_with_coefficient_ideal": !search.with_coefficient_ideal.is_feasible(),
            });
            Ok(Outcome {
                text: render(&out),
                ok: cert.holds && infeasible,
            })
        }
        Verb::Verify { suite, seed } => {
            let reports = if suite == "all" {
                verify::run_all(seed)
            } else {
                let report = verify::run_suite(&suite, seed).ok_or_else(|| {
                    Failure::Usage(format!("unknown suite `{suite}`; expected all or one of {}", SUITES.join(", ")))
                })?;
                vec![report]
            };
            let ok = reports.iter().all(|r| r.ok());
            let out = json!({
                "seed": seed,
                "passed": ok,
                "suites": reports,
            });
            Ok(Outcome { text: render(&out), ok })
        }
    }
}

/// JSON with `": "` and `", "` separators on one line.
fn render(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Spaced);
    serde::Serialize::serialize(value, &mut ser).expect("serializing a JSON value");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

struct Spaced;

impl serde_json::ser::Formatter for Spaced {
    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            writer.write_all(b", ")
        }
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        writer.write_all(b": ")
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            writer.write_all(b", ")
        }
    }
}
