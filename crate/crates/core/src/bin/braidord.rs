use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use braidord::artin::{action, Convention, EndoFixture, FreeEndo};
use braidord::braid_core::{parse_braid, BraidWord};
use braidord::certify::{certify_braid, certify_endo, run_corpus_file, Budgets, EndoInput};
use braidord::explicit_orderings::{cover_embedding, induced_sign_with, CoverOrder};
use braidord::free_group::{parse_word, parse_word_infer, FreeWord};
use braidord::magnus_order::{MagnusOrder, OrderSign};
use braidord::refute::{
    finite_orbit_refute, saturate_refute, verify_certificate, NotOPCertificate,
};
use braidord::spectra::{abelianize, char_poly, eigen_certificate, IntMatrix};
use braidord::{Error, Result};

#[derive(Parser)]
#[command(name = "braidord", version, about = "Order-preserving braids and free-group automorphisms")]
struct Cli {
    /// Human-readable output instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    table: bool,
    /// JSON output (the default).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvArg {
    Boundary,
    Interior,
}

impl From<ConvArg> for Convention {
    fn from(c: ConvArg) -> Self {
        match c {
            ConvArg::Boundary => Convention::Boundary,
            ConvArg::Interior => Convention::Interior,
        }
    }
}

#[derive(Args)]
struct BraidArg {
    /// Braid word, e.g. `d_5 s1^2` or `gamma(1,1)`.
    #[arg(required_unless_present = "braid_flag")]
    braid: Option<String>,
    /// Braid word given as a flag.
    #[arg(long = "braid", id = "braid_flag", conflicts_with = "braid")]
    braid_flag: Option<String>,
    #[arg(long, short = 'n')]
    strands: usize,
}

impl BraidArg {
    fn parse(&self) -> Result<BraidWord> {
        let text = self.braid.as_deref().or(self.braid_flag.as_deref()).unwrap_or_default();
        parse_braid(text, self.strands)
    }
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long)]
    budget_twist_len: Option<usize>,
    #[arg(long)]
    budget_word_len: Option<usize>,
    #[arg(long)]
    budget_ledger: Option<usize>,
    #[arg(long)]
    budget_rounds: Option<usize>,
    #[arg(long)]
    budget_depth: Option<usize>,
    #[arg(long)]
    budget_branches: Option<usize>,
    #[arg(long)]
    budget_branch_facts: Option<usize>,
    #[arg(long)]
    budget_probe: Option<usize>,
    /// Skip the saturation refuter.
    #[arg(long)]
    no_saturation: bool,
}

impl BudgetArgs {
    fn budgets(&self) -> Budgets {
        let mut b = Budgets::default();
        if let Some(v) = self.budget_twist_len {
            b.twist_len = v;
        }
        b.max_word_len = self.budget_word_len;
        if let Some(v) = self.budget_ledger {
            b.max_ledger = v;
        }
        if let Some(v) = self.budget_rounds {
            b.max_rounds = v;
        }
        if let Some(v) = self.budget_depth {
            b.max_depth = v;
        }
        if let Some(v) = self.budget_branches {
            b.max_branches = v;
        }
        if let Some(v) = self.budget_branch_facts {
            b.branch_budget = v;
        }
        if let Some(v) = self.budget_probe {
            b.probe_budget = v;
        }
        b.saturation = !self.no_saturation;
        b
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide order-preservation of a braid, a matrix or an endomorphism.
    Certify {
        /// Braid word (requires --strands).
        braid: Option<String>,
        #[arg(long, short = 'n')]
        strands: Option<usize>,
        /// Integer matrix as JSON, e.g. `[[2,1],[1,1]]`.
        #[arg(long, conflicts_with_all = ["braid", "endo"])]
        matrix: Option<String>,
        /// Endomorphism fixture as JSON, e.g. `{"images": {"x1": "x1 x2", "x2": "x2"}}`.
        #[arg(long, conflicts_with = "braid")]
        endo: Option<String>,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Print the induced automorphism of the free group.
    Act {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value = "boundary")]
        convention: ConvArg,
    },
    /// Search for a non-order-preservation certificate.
    Refute {
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value = "interior")]
        convention: ConvArg,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// Replay a certificate file against a braid action.
    Verify {
        certificate: PathBuf,
        #[command(flatten)]
        braid: BraidArg,
        #[arg(long, value_enum, default_value = "interior")]
        convention: ConvArg,
    },
    /// Sign of a word in the Magnus order.
    Sign {
        word: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Compare two words in the Magnus order.
    Compare {
        u: String,
        v: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Lowest degree of a nonconstant Magnus term.
    MinDegree {
        word: String,
        #[arg(long)]
        rank: Option<usize>,
    },
    /// Characteristic polynomial of a matrix or of a braid's abelianized action.
    Charpoly {
        braid: Option<String>,
        #[arg(long, short = 'n')]
        strands: Option<usize>,
        #[arg(long, conflicts_with = "braid")]
        matrix: Option<String>,
    },
    /// Components and exponent data of the braided link.
    Linkinfo {
        #[command(flatten)]
        braid: BraidArg,
    },
    /// Certify every row of a fixture file; exits nonzero on a mismatch.
    Corpus {
        path: PathBuf,
        #[command(flatten)]
        budgets: BudgetArgs,
    },
    /// The cover-induced ordering invariant under `d_n s1`.
    ExplicitOrder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        swapped: bool,
        #[command(subcommand)]
        op: ExplicitOp,
    },
}

#[derive(Subcommand)]
enum ExplicitOp {
    Sign { word: String },
    Embed { word: String },
}

fn word(text: &str, rank: Option<usize>) -> Result<FreeWord> {
    match rank {
        Some(r) => parse_word(text, r),
        None => parse_word_infer(text),
    }
}

fn same_rank(u: FreeWord, v: FreeWord) -> Result<(FreeWord, FreeWord)> {
    let r = u.rank().max(v.rank());
    Ok((u.with_rank(r)?, v.with_rank(r)?))
}

fn sign_str(s: OrderSign) -> &'static str {
    match s {
        OrderSign::Negative => "negative",
        OrderSign::Zero => "identity",
        OrderSign::Positive => "positive",
    }
}

fn matrix(text: &str) -> Result<IntMatrix> {
    Ok(serde_json::from_str(text)?)
}

fn endo_json(phi: &FreeEndo) -> Value {
    serde_json::to_value(phi.to_fixture(None)).unwrap_or(Value::Null)
}

struct Out {
    value: Value,
    text: String,
    ok: bool,
}

impl Out {
    fn new(value: Value, text: impl Into<String>) -> Self {
        Out {
            value,
            text: text.into(),
            ok: true,
        }
    }
}

fn run(cmd: Cmd) -> Result<Out> {
    Ok(match cmd {
        Cmd::Certify {
            braid,
            strands,
            matrix: m,
            endo,
            budgets,
        } => {
            let b = budgets.budgets();
            let cert = if let Some(m) = m {
                certify_endo(&EndoInput::Matrix(matrix(&m)?), &b)?
            } else if let Some(e) = endo {
                let fixture: EndoFixture = serde_json::from_str(&e)?;
                certify_endo(&EndoInput::Endo(fixture.to_endo()?), &b)?
            } else {
                let text = braid.ok_or_else(|| Error::Schema("a braid, --matrix or --endo is required".into()))?;
                let n = strands.ok_or_else(|| Error::Schema("--strands is required for braids".into()))?;
                certify_braid(&parse_braid(&text, n)?, &b)?
            };
            Out::new(serde_json::to_value(&cert)?, cert.summary())
        }
        Cmd::Act { braid, convention } => {
            let phi = action(&braid.parse()?, convention.into())?;
            let text = phi
                .images()
                .iter()
                .enumerate()
                .map(|(i, w)| format!("x{} -> {}", i + 1, w))
                .collect::<Vec<_>>()
                .join("\n");
            Out::new(endo_json(&phi), text)
        }
        Cmd::Refute {
            braid,
            convention,
            budgets,
        } => {
            let beta = braid.parse()?;
            let b = budgets.budgets();
            let conv: Convention = convention.into();
            let phi = action(&beta, conv)?;
            if let Some(cert) = finite_orbit_refute(&phi, b.twist_len) {
                Out::new(serde_json::to_value(&cert)?, "refuted: finite orbit")
            } else if b.saturation {
                let inv = action(&beta.invert(), conv)?;
                let res = saturate_refute(&phi, &inv, &b.saturation_config(Some(&beta)))?;
                match res.certificate {
                    Some(cert) => Out::new(serde_json::to_value(&cert)?, "refuted: saturation"),
                    None => Out::new(
                        json!({ "certificate": null, "telemetry": res.telemetry }),
                        format!("not refuted: {:?}", res.telemetry),
                    ),
                }
            } else {
                Out::new(json!({ "certificate": null }), "not refuted")
            }
        }
        Cmd::Verify {
            certificate,
            braid,
            convention,
        } => {
            let cert = NotOPCertificate::from_json(&std::fs::read_to_string(certificate)?)?;
            let phi = action(&braid.parse()?, convention.into())?;
            let res = verify_certificate(&cert, &phi);
            let ok = res.is_ok();
            let msg = res.err().map(|e| e.to_string());
            let mut out = Out::new(
                json!({ "valid": ok, "error": msg }),
                if ok { "valid".to_string() } else { format!("invalid: {}", msg.unwrap_or_default()) },
            );
            out.ok = ok;
            out
        }
        Cmd::Sign { word: w, rank } => {
            let w = word(&w, rank)?;
            let s = MagnusOrder::standard(w.rank()).sign(&w)?;
            Out::new(json!({ "word": w.to_string(), "sign": sign_str(s) }), sign_str(s))
        }
        Cmd::Compare { u, v, rank } => {
            let (u, v) = same_rank(word(&u, rank)?, word(&v, rank)?)?;
            let ord = MagnusOrder::standard(u.rank()).compare(&u, &v)?;
            let rel = match ord {
                std::cmp::Ordering::Less => "<",
                std::cmp::Ordering::Equal => "=",
                std::cmp::Ordering::Greater => ">",
            };
            Out::new(json!({ "u": u.to_string(), "v": v.to_string(), "relation": rel }), format!("{u} {rel} {v}"))
        }
        Cmd::MinDegree { word: w, rank } => {
            let w = word(&w, rank)?;
            let d = MagnusOrder::standard(w.rank()).min_degree(&w)?;
            Out::new(
                json!({ "word": w.to_string(), "min_degree": d }),
                d.map(|d| d.to_string()).unwrap_or_else(|| "identity".into()),
            )
        }
        Cmd::Charpoly { braid, strands, matrix: m } => {
            let mat = match (m, braid) {
                (Some(m), _) => matrix(&m)?,
                (None, Some(text)) => {
                    let n = strands.ok_or_else(|| Error::Schema("--strands is required for braids".into()))?;
                    abelianize(&action(&parse_braid(&text, n)?, Convention::Boundary)?)
                }
                (None, None) => return Err(Error::Schema("a braid or --matrix is required".into())),
            };
            let p = char_poly(&mat);
            let verdict = eigen_certificate(&mat);
            Out::new(
                json!({ "char_poly": p.to_string(), "coefficients": p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(), "eigenvalues": verdict }),
                format!("{p}  ({verdict:?})"),
            )
        }
        Cmd::Linkinfo { braid } => {
            let info = braid.parse()?.braided_link_info();
            Out::new(
                serde_json::to_value(&info)?,
                format!(
                    "components {} (cycles {:?}), exponent sum {}",
                    info.component_count, info.cycle_lengths, info.exponent_sum
                ),
            )
        }
        Cmd::Corpus { path, budgets } => {
            let report = run_corpus_file(&path, &budgets.budgets())?;
            let mut out = Out::new(serde_json::to_value(&report)?, report.table());
            out.ok = report.all_ok();
            out
        }
        Cmd::ExplicitOrder { n, swapped, op } => {
            let order = if swapped { CoverOrder::Swapped } else { CoverOrder::Standard };
            match op {
                ExplicitOp::Sign { word: w } => {
                    let w = parse_word(&w, n)?;
                    let s = induced_sign_with(&w, n, order)?;
                    Out::new(json!({ "word": w.to_string(), "sign": sign_str(s) }), sign_str(s))
                }
                ExplicitOp::Embed { word: w } => {
                    let w = parse_word(&w, n)?;
                    let img = cover_embedding(n)?.embed(&w)?;
                    let names = braidord::explicit_orderings::cover_names();
                    let text = img.format_with(&names);
                    Out::new(json!({ "word": w.to_string(), "image": text }), text)
                }
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let table = cli.table;
    match run(cli.cmd) {
        Ok(out) => {
            let body = if table {
                out.text.trim_end().to_string()
            } else {
                serde_json::to_string_pretty(&out.value).unwrap_or_default()
            };
            let _ = writeln!(std::io::stdout(), "{body}");
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
