//! The decision pipeline: combines the structural criteria, the eigenvalue
//! criteria and the refuters into a [`Certificate`], and runs fixture corpora.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::artin::{action, Convention, EndoFixture, FreeEndo};
use crate::braid_core::{braid_equal, is_periodic, parse_braid, BraidWord, Periodicity};
use crate::error::{Error, Result};
use crate::refute::{
    finite_orbit_refute, saturate_refute, NotOPCertificate, SaturationConfig,
    SaturationTelemetry, DEFAULT_TWIST_LEN,
};
use crate::spectra::{abelianize, char_poly, eigen_certificate, EigenVerdict, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "OP")]
    Op,
    #[serde(rename = "NOT_OP")]
    NotOp,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Op => "OP",
            Verdict::NotOp => "NOT_OP",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "criterion", rename_all = "snake_case")]
pub enum Reason {
    PureBraid,
    /// `beta = rest * Delta^{2k}` syntactically.
    DeltaSquareReduction { k: i64, rest: BraidWord },
    TensorSplit {
        left: Box<Certificate>,
        right: Box<Certificate>,
    },
    PeriodicType1 { k: i64 },
    PeriodicType2 { k: i64 },
    /// `beta = (d_n s_1)^k`, whose action preserves the order pulled back
    /// from `F_2` through the cover embedding.
    ExplicitCoverOrder { n: usize, k: i64 },
    EigenAllPositive { char_poly: String },
    EigenNoPositive { char_poly: String },
    FiniteOrbit {
        convention: Convention,
        certificate: NotOPCertificate,
    },
    Saturation {
        convention: Convention,
        certificate: NotOPCertificate,
    },
    /// Every refuter ran out of budget.
    Exhausted {
        telemetry: Vec<(Convention, SaturationTelemetry)>,
    },
}

impl Reason {
    pub fn name(&self) -> &'static str {
        match self {
            Reason::PureBraid => "PureBraid",
            Reason::DeltaSquareReduction { .. } => "DeltaSquareReduction",
            Reason::TensorSplit { .. } => "TensorSplit",
            Reason::PeriodicType1 { .. } => "PeriodicType1",
            Reason::PeriodicType2 { .. } => "PeriodicType2",
            Reason::ExplicitCoverOrder { .. } => "ExplicitCoverOrder",
            Reason::EigenAllPositive { .. } => "EigenAllPositive",
            Reason::EigenNoPositive { .. } => "EigenNoPositive",
            Reason::FiniteOrbit { .. } => "FiniteOrbit",
            Reason::Saturation { .. } => "Saturation",
            Reason::Exhausted { .. } => "Exhausted",
        }
    }

    /// Short label with parameters, e.g. `PeriodicType2(1)`.
    pub fn label(&self) -> String {
        match self {
            Reason::DeltaSquareReduction { k, .. } => format!("DeltaSquareReduction({k})"),
            Reason::PeriodicType1 { k } => format!("PeriodicType1({k})"),
            Reason::PeriodicType2 { k } => format!("PeriodicType2({k})"),
            Reason::ExplicitCoverOrder { n, k } => format!("ExplicitCoverOrder(n={n},k={k})"),
            Reason::FiniteOrbit { convention, .. } => format!("FiniteOrbit({convention:?})"),
            Reason::Saturation { convention, .. } => format!("Saturation({convention:?})"),
            Reason::TensorSplit { left, right } => {
                format!("TensorSplit[{} | {}]", left.summary(), right.summary())
            }
            r => r.name().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budgets {
    pub twist_len: usize,
    /// `None` scales the word-length cap with the braid.
    pub max_word_len: Option<usize>,
    pub max_ledger: usize,
    pub max_rounds: usize,
    pub max_depth: usize,
    pub max_branches: usize,
    pub branch_budget: usize,
    pub probe_budget: usize,
    pub saturation: bool,
}

impl Default for Budgets {
    fn default() -> Self {
        let s = SaturationConfig::default();
        Budgets {
            twist_len: DEFAULT_TWIST_LEN,
            max_word_len: None,
            max_ledger: s.max_ledger,
            max_rounds: s.max_rounds,
            max_depth: s.max_depth,
            max_branches: s.max_branches,
            branch_budget: s.branch_budget,
            probe_budget: s.probe_budget,
            saturation: true,
        }
    }
}

impl Budgets {
    pub fn saturation_config(&self, beta: Option<&BraidWord>) -> SaturationConfig {
        let base = beta.map(SaturationConfig::for_braid).unwrap_or_default();
        SaturationConfig {
            max_word_len: self.max_word_len.unwrap_or(base.max_word_len),
            max_ledger: self.max_ledger,
            max_rounds: self.max_rounds,
            max_depth: self.max_depth,
            max_branches: self.max_branches,
            branch_budget: self.branch_budget,
            probe_budget: self.probe_budget,
            ..base
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub reasons: Vec<Reason>,
    /// Convention of the action that settled the verdict, if any.
    pub convention: Option<Convention>,
    pub budgets: Budgets,
}

impl Certificate {
    fn new(verdict: Verdict, reasons: Vec<Reason>, budgets: &Budgets) -> Self {
        Certificate {
            verdict,
            reasons,
            convention: None,
            budgets: budgets.clone(),
        }
    }

    pub fn summary(&self) -> String {
        let labels: Vec<String> = self.reasons.iter().map(Reason::label).collect();
        format!("{}({})", self.verdict, labels.join(", "))
    }

    /// Refutation certificates together with the action they refute.
    pub fn refutations(&self) -> Vec<(Convention, &NotOPCertificate)> {
        let mut out = Vec::new();
        for r in &self.reasons {
            match r {
                Reason::FiniteOrbit {
                    convention,
                    certificate,
                }
                | Reason::Saturation {
                    convention,
                    certificate,
                } => out.push((*convention, certificate)),
                Reason::TensorSplit { left, right } => {
                    out.extend(left.refutations());
                    out.extend(right.refutations());
                }
                _ => {}
            }
        }
        out
    }
}

fn merge(left: Verdict, right: Verdict) -> Verdict {
    match (left, right) {
        (Verdict::NotOp, _) | (_, Verdict::NotOp) => Verdict::NotOp,
        (Verdict::Unknown, _) | (_, Verdict::Unknown) => Verdict::Unknown,
        _ => Verdict::Op,
    }
}

const REFUTER_CONVENTIONS: [Convention; 2] = [Convention::Interior, Convention::Boundary];

/// Runs the refuters on `beta` for both basepoint conventions.
fn refute_braid(beta: &BraidWord, budgets: &Budgets) -> (Option<Reason>, Vec<(Convention, SaturationTelemetry)>) {
    let actions: Vec<(Convention, FreeEndo, FreeEndo)> = REFUTER_CONVENTIONS
        .iter()
        .map(|&c| {
            (
                c,
                action(beta, c).expect("braid convention"),
                action(&beta.invert(), c).expect("braid convention"),
            )
        })
        .collect();
    for (c, phi, _) in &actions {
        if let Some(certificate) = finite_orbit_refute(phi, budgets.twist_len) {
            return (
                Some(Reason::FiniteOrbit {
                    convention: *c,
                    certificate,
                }),
                Vec::new(),
            );
        }
    }
    let mut telemetry = Vec::new();
    if budgets.saturation {
        let cfg = budgets.saturation_config(Some(beta));
        for (c, phi, inv) in &actions {
            let res = saturate_refute(phi, inv, &cfg).expect("inverse actions");
            if let Some(certificate) = res.certificate {
                return (
                    Some(Reason::Saturation {
                        convention: *c,
                        certificate,
                    }),
                    telemetry,
                );
            }
            telemetry.push((*c, res.telemetry));
        }
    }
    (None, telemetry)
}

/// Decides (or refutes, or gives up on) order-preservation of `beta`.
pub fn certify_braid(beta: &BraidWord, budgets: &Budgets) -> Result<Certificate> {
    let n = beta.strands();
    if n < 1 {
        return Err(Error::Domain("braids need at least one strand".into()));
    }
    let mut reasons = Vec::new();
    let (rest, k) = beta.strip_full_twists();
    if k != 0 {
        reasons.push(Reason::DeltaSquareReduction {
            k,
            rest: rest.clone(),
        });
    }
    let beta = &rest;
    let finish = |verdict, mut reasons: Vec<Reason>, last: Reason| {
        reasons.push(last);
        Certificate::new(verdict, reasons, budgets)
    };

    if beta.is_pure() {
        return Ok(finish(Verdict::Op, reasons, Reason::PureBraid));
    }
    if let Some((l, r)) = beta.tensor_split() {
        let left = certify_braid(&l, budgets)?;
        let right = certify_braid(&r, budgets)?;
        let verdict = merge(left.verdict, right.verdict);
        return Ok(finish(
            verdict,
            reasons,
            Reason::TensorSplit {
                left: Box::new(left),
                right: Box::new(right),
            },
        ));
    }
    if n >= 3 {
        match is_periodic(beta)? {
            Periodicity::Type1(k) => {
                let mut cert = finish(Verdict::Op, reasons, Reason::PeriodicType1 { k });
                let root = BraidWord::delta(n)?.compose(&BraidWord::new(n, &[1])?)?;
                if braid_equal(beta, &root.power(k))? {
                    cert.reasons.push(Reason::ExplicitCoverOrder { n, k });
                }
                return Ok(cert);
            }
            Periodicity::Type2(k) => {
                let verdict = if k.rem_euclid(n as i64) == 0 {
                    Verdict::Op
                } else {
                    Verdict::NotOp
                };
                return Ok(finish(verdict, reasons, Reason::PeriodicType2 { k }));
            }
            Periodicity::NotPeriodic => {}
        }
    }
    let (found, telemetry) = refute_braid(beta, budgets);
    Ok(match found {
        Some(reason) => {
            let convention = match &reason {
                Reason::FiniteOrbit { convention, .. } | Reason::Saturation { convention, .. } => {
                    Some(*convention)
                }
                _ => None,
            };
            let mut cert = finish(Verdict::NotOp, reasons, reason);
            cert.convention = convention;
            cert
        }
        None => finish(Verdict::Unknown, reasons, Reason::Exhausted { telemetry }),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndoInput {
    Matrix(IntMatrix),
    Endo(FreeEndo),
}

/// Certificate for an automorphism of a free group, or for its action on
/// the abelianization alone.
pub fn certify_endo(input: &EndoInput, budgets: &Budgets) -> Result<Certificate> {
    let matrix = match input {
        EndoInput::Matrix(m) => m.clone(),
        EndoInput::Endo(phi) => abelianize(phi),
    };
    let det = matrix.determinant();
    if det != 1.into() && det != (-1).into() {
        return Err(Error::NotAutomorphism(format!("determinant {det} is not a unit")));
    }
    let poly = char_poly(&matrix).to_string();
    match eigen_certificate(&matrix) {
        EigenVerdict::AllRealPositive => {
            return Ok(Certificate::new(
                Verdict::Op,
                vec![Reason::EigenAllPositive { char_poly: poly }],
                budgets,
            ))
        }
        EigenVerdict::NoPositiveReal => {
            return Ok(Certificate::new(
                Verdict::NotOp,
                vec![Reason::EigenNoPositive { char_poly: poly }],
                budgets,
            ))
        }
        EigenVerdict::HasPositiveReal => {}
    }
    let EndoInput::Endo(phi) = input else {
        return Ok(Certificate::new(
            Verdict::Unknown,
            vec![Reason::Exhausted { telemetry: vec![] }],
            budgets,
        ));
    };
    let convention = phi.convention();
    if let Some(certificate) = finite_orbit_refute(phi, budgets.twist_len) {
        let mut cert = Certificate::new(
            Verdict::NotOp,
            vec![Reason::FiniteOrbit {
                convention,
                certificate,
            }],
            budgets,
        );
        cert.convention = Some(convention);
        return Ok(cert);
    }
    let mut telemetry = Vec::new();
    if budgets.saturation {
        let inv = phi.inverse()?;
        let res = saturate_refute(phi, &inv, &budgets.saturation_config(None))?;
        if let Some(certificate) = res.certificate {
            let mut cert = Certificate::new(
                Verdict::NotOp,
                vec![Reason::Saturation {
                    convention,
                    certificate,
                }],
                budgets,
            );
            cert.convention = Some(convention);
            return Ok(cert);
        }
        telemetry.push((convention, res.telemetry));
    }
    Ok(Certificate::new(
        Verdict::Unknown,
        vec![Reason::Exhausted { telemetry }],
        budgets,
    ))
}

// ---------------------------------------------------------------------------
// corpus

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expected {
    #[serde(rename = "OP")]
    Op,
    #[serde(rename = "NOT_OP")]
    NotOp,
    #[serde(rename = "UNKNOWN")]
    Unknown,
    #[serde(rename = "NOT_OP_or_UNKNOWN")]
    NotOpOrUnknown,
    #[serde(rename = "OP_or_UNKNOWN")]
    OpOrUnknown,
}

impl Expected {
    pub fn accepts(self, v: Verdict) -> bool {
        matches!(
            (self, v),
            (Expected::Op, Verdict::Op)
                | (Expected::NotOp, Verdict::NotOp)
                | (Expected::Unknown, Verdict::Unknown)
                | (Expected::NotOpOrUnknown, Verdict::NotOp | Verdict::Unknown)
                | (Expected::OpOrUnknown, Verdict::Op | Verdict::Unknown)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRow {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub braid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<IntMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endo: Option<EndoFixture>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strands: Option<usize>,
    pub expected: Expected,
    #[serde(default)]
    pub paper_ref: String,
}

impl CorpusRow {
    pub fn certify(&self, budgets: &Budgets) -> Result<Certificate> {
        match (&self.braid, &self.matrix, &self.endo) {
            (Some(text), None, None) => {
                let n = self.strands.ok_or_else(|| {
                    Error::Schema(format!("row {}: braid rows need strands", self.name))
                })?;
                certify_braid(&parse_braid(text, n)?, budgets)
            }
            (None, Some(m), None) => certify_endo(&EndoInput::Matrix(m.clone()), budgets),
            (None, None, Some(e)) => certify_endo(&EndoInput::Endo(e.to_endo()?), budgets),
            _ => Err(Error::Schema(format!(
                "row {}: exactly one of braid, matrix, endo is required",
                self.name
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowReport {
    pub name: String,
    pub verdict: Option<Verdict>,
    pub expected: Expected,
    pub ok: bool,
    pub reason: String,
    pub wall_ms: f64,
    #[serde(skip)]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub rows: Vec<RowReport>,
    pub mismatches: usize,
    pub wall_ms: f64,
}

impl CorpusReport {
    pub fn all_ok(&self) -> bool {
        self.mismatches == 0
    }

    pub fn table(&self) -> String {
        let w = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
        let mut out = format!(
            "{:<w$}  {:<8}  {:<18}  {:>10}  {}\n",
            "name", "verdict", "expected", "ms", "reason"
        );
        for r in &self.rows {
            let v = r.verdict.map(|v| v.to_string()).unwrap_or_else(|| "ERROR".into());
            let exp = serde_json::to_value(r.expected)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default();
            out.push_str(&format!(
                "{:<w$}  {:<8}  {:<18}  {:>10.1}  {}{}\n",
                r.name,
                v,
                exp,
                r.wall_ms,
                r.reason,
                if r.ok { "" } else { "  <-- MISMATCH" }
            ));
        }
        out.push_str(&format!(
            "{} rows, {} mismatches, {:.1} ms\n",
            self.rows.len(),
            self.mismatches,
            self.wall_ms
        ));
        out
    }
}

pub fn load_corpus(path: &Path) -> Result<Vec<CorpusRow>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(e.to_string()))
}

/// Certifies every row in parallel.
pub fn run_corpus(rows: &[CorpusRow], budgets: &Budgets) -> CorpusReport {
    let start = Instant::now();
    let reports: Vec<RowReport> = rows
        .par_iter()
        .map(|row| {
            let t = Instant::now();
            let res = row.certify(budgets);
            let wall_ms = t.elapsed().as_secs_f64() * 1e3;
            match res {
                Ok(cert) => RowReport {
                    name: row.name.clone(),
                    verdict: Some(cert.verdict),
                    expected: row.expected,
                    ok: row.expected.accepts(cert.verdict),
                    reason: cert.reasons.iter().map(Reason::label).collect::<Vec<_>>().join(", "),
                    wall_ms,
                    certificate: Some(cert),
                },
                Err(e) => RowReport {
                    name: row.name.clone(),
                    verdict: None,
                    expected: row.expected,
                    ok: false,
                    reason: format!("error: {e}"),
                    wall_ms,
                    certificate: None,
                },
            }
        })
        .collect();
    let mismatches = reports.iter().filter(|r| !r.ok).count();
    CorpusReport {
        rows: reports,
        mismatches,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

pub fn run_corpus_file(path: &Path, budgets: &Budgets) -> Result<CorpusReport> {
    Ok(run_corpus(&load_corpus(path)?, budgets))
}
