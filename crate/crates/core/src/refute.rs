//! Sound refutation of order-preservation.
//!
//! Two refuters are provided. [`finite_orbit_refute`] looks for an inner twist
//! of the automorphism with a nontrivial finite orbit on a generator.
//! [`saturate_refute`] case-splits on the signs of a few pivot elements and,
//! inside each branch, closes the set of positive conjugacy classes under
//! products, the automorphism and its inverse until some class meets its own
//! inverse. Every refutation comes with a [`NotOPCertificate`] that
//! [`check_certificate`] replays with plain word arithmetic.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::artin::FreeEndo;
use crate::braid_core::BraidWord;
use crate::error::{Error, Result};
use crate::free_group::{FreeWord, Letter};

// ---------------------------------------------------------------------------
// certificates

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    Seed,
    Product,
    Conjugate { by: FreeWord },
    Phi,
    PhiInverse,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub word: FreeWord,
    #[serde(flatten)]
    pub rule: Rule,
    #[serde(default)]
    pub parents: Vec<usize>,
}

/// Words asserted positive, each justified from earlier entries.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityLedger {
    pub entries: Vec<LedgerEntry>,
}

impl PositivityLedger {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Case analysis over pivot signs; every leaf derives some `g` and `g^-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum ProofTree {
    Leaf {
        ledger: PositivityLedger,
        contradiction: (usize, usize),
    },
    Split {
        pivot: FreeWord,
        positive: Box<ProofTree>,
        negative: Box<ProofTree>,
    },
}

impl ProofTree {
    pub fn leaves(&self) -> Vec<&ProofTree> {
        match self {
            ProofTree::Leaf { .. } => vec![self],
            ProofTree::Split {
                positive, negative, ..
            } => {
                let mut v = positive.leaves();
                v.extend(negative.leaves());
                v
            }
        }
    }

    pub fn leaves_mut(&mut self) -> Vec<&mut ProofTree> {
        match self {
            ProofTree::Leaf { .. } => vec![self],
            ProofTree::Split {
                positive, negative, ..
            } => {
                let mut v = positive.leaves_mut();
                v.extend(negative.leaves_mut());
                v
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            ProofTree::Leaf { .. } => 0,
            ProofTree::Split {
                positive, negative, ..
            } => 1 + positive.depth().max(negative.depth()),
        }
    }

    /// The same argument for the reversed ordering: every word inverted.
    pub fn mirror(&self) -> ProofTree {
        match self {
            ProofTree::Leaf {
                ledger,
                contradiction,
            } => ProofTree::Leaf {
                ledger: PositivityLedger {
                    entries: ledger
                        .entries
                        .iter()
                        .map(|e| LedgerEntry {
                            word: e.word.inv(),
                            rule: e.rule.clone(),
                            parents: match e.rule {
                                Rule::Product => e.parents.iter().rev().copied().collect(),
                                _ => e.parents.clone(),
                            },
                        })
                        .collect(),
                },
                contradiction: *contradiction,
            },
            ProofTree::Split {
                pivot,
                positive,
                negative,
            } => ProofTree::Split {
                pivot: pivot.clone(),
                positive: Box::new(negative.mirror()),
                negative: Box::new(positive.mirror()),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NotOPCertificate {
    /// `psi = (x -> twist * phi(x) * twist^-1)` satisfies `psi^period(x_g) = x_g`
    /// while `psi(x_g) != x_g`.
    FiniteOrbit {
        twist: FreeWord,
        generator: usize,
        period: usize,
    },
    Saturation { tree: ProofTree },
}

impl NotOPCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

// ---------------------------------------------------------------------------
// checking

fn bad(msg: impl Into<String>) -> Error {
    Error::MalformedCertificate(msg.into())
}

const ORBIT_CHECK_CAP: usize = 1 << 16;

/// Replays `cert` against `phi`, reporting the first failing step.
pub fn verify_certificate(cert: &NotOPCertificate, phi: &FreeEndo) -> Result<()> {
    match cert {
        NotOPCertificate::FiniteOrbit {
            twist,
            generator,
            period,
        } => {
            let r = phi.rank();
            if twist.rank() != r {
                return Err(bad("twist has the wrong rank"));
            }
            if *generator == 0 || *generator > r {
                return Err(bad("generator out of range"));
            }
            if *period < 2 {
                return Err(bad("period must be at least 2"));
            }
            let x = FreeWord::generator(r, *generator, false)?;
            let t_inv = twist.inv();
            let mut cur = x.clone();
            for step in 1..=*period {
                let img = phi.apply_capped(&cur, ORBIT_CHECK_CAP)?;
                cur = twist.mul(&img)?.mul(&t_inv)?;
                if step == 1 && cur == x {
                    return Err(bad("orbit is trivial"));
                }
            }
            if cur != x {
                return Err(bad("orbit does not close"));
            }
            Ok(())
        }
        NotOPCertificate::Saturation { tree } => verify_tree(tree, phi, &mut Vec::new()),
    }
}

pub fn check_certificate(cert: &NotOPCertificate, phi: &FreeEndo) -> bool {
    verify_certificate(cert, phi).is_ok()
}

fn verify_tree(tree: &ProofTree, phi: &FreeEndo, assumed: &mut Vec<FreeWord>) -> Result<()> {
    match tree {
        ProofTree::Split {
            pivot,
            positive,
            negative,
        } => {
            if pivot.rank() != phi.rank() || pivot.is_identity() {
                return Err(bad("pivot must be a nontrivial word of the right rank"));
            }
            assumed.push(pivot.clone());
            let r = verify_tree(positive, phi, assumed);
            assumed.pop();
            r?;
            assumed.push(pivot.inv());
            let r = verify_tree(negative, phi, assumed);
            assumed.pop();
            r
        }
        ProofTree::Leaf {
            ledger,
            contradiction,
        } => verify_leaf(ledger, *contradiction, phi, assumed),
    }
}

fn verify_leaf(
    ledger: &PositivityLedger,
    (i, j): (usize, usize),
    phi: &FreeEndo,
    assumed: &[FreeWord],
) -> Result<()> {
    let entries = &ledger.entries;
    let mut seen = HashSet::new();
    for (k, e) in entries.iter().enumerate() {
        if e.word.rank() != phi.rank() {
            return Err(bad(format!("entry {k} has the wrong rank")));
        }
        if e.word.is_identity() {
            return Err(bad(format!("entry {k} is the identity")));
        }
        if !seen.insert(&e.word) {
            return Err(bad(format!("entry {k} repeats an earlier word")));
        }
        if e.parents.iter().any(|&p| p >= k) {
            return Err(bad(format!("entry {k} cites a later entry")));
        }
        let arity = match e.rule {
            Rule::Seed => 0,
            Rule::Product => 2,
            _ => 1,
        };
        if e.parents.len() != arity {
            return Err(bad(format!("entry {k} has {} parents", e.parents.len())));
        }
        let p = |n: usize| &entries[e.parents[n]].word;
        let ok = match &e.rule {
            Rule::Seed => assumed.contains(&e.word),
            Rule::Product => p(0).mul(p(1))? == e.word,
            Rule::Conjugate { by } => FreeWord::conj(by, p(0))? == e.word,
            Rule::Phi => phi.apply(p(0))? == e.word,
            Rule::PhiInverse => phi.apply(&e.word)? == *p(0),
        };
        if !ok {
            return Err(bad(format!("entry {k} does not follow from its parents")));
        }
    }
    if i >= entries.len() || j >= entries.len() {
        return Err(bad("contradiction cites a missing entry"));
    }
    if entries[j].word != entries[i].word.inv() {
        return Err(bad("contradiction words are not mutually inverse"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// finite orbits

pub const DEFAULT_TWIST_LEN: usize = 2;
const ORBIT_SEARCH_CAP: usize = 256;

fn reduced_words_upto(rank: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let alphabet: Vec<Letter> = (1..=rank as Letter).rev().flat_map(|i| [-i, i]).collect();
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::<Letter>::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &a in &alphabet {
                if w.last() != Some(&-a) {
                    let mut v = w.clone();
                    v.push(a);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Searches inner twists `w` with `|w| <= twist_len` for a generator with a
/// nontrivial finite orbit.
pub fn finite_orbit_refute(phi: &FreeEndo, twist_len: usize) -> Option<NotOPCertificate> {
    let r = phi.rank();
    let max_period = 2 * r;
    for letters in reduced_words_upto(r, twist_len) {
        let w = FreeWord::from_trusted(r, letters);
        let psi = phi.inner_twist(&w).ok()?;
        for g in 1..=r {
            let x = FreeWord::generator(r, g, false).ok()?;
            let mut cur = x.clone();
            for m in 1..=max_period {
                cur = match psi.apply_capped(&cur, ORBIT_SEARCH_CAP) {
                    Ok(c) => c,
                    Err(_) => break,
                };
                if cur == x {
                    if m >= 2 {
                        return Some(NotOPCertificate::FiniteOrbit {
                            twist: w,
                            generator: g,
                            period: m,
                        });
                    }
                    break;
                }
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// saturation

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationConfig {
    /// Longest positive class kept.
    pub max_word_len: usize,
    /// Classes per branch.
    pub max_ledger: usize,
    /// Longest derivation chain.
    pub max_rounds: usize,
    /// Nested case splits, forced ones included.
    pub max_depth: usize,
    /// Total branch saturations, probes included.
    pub max_branches: usize,
    /// Classes processed per branch before splitting.
    pub branch_budget: usize,
    /// Classes processed when probing a pivot.
    pub probe_budget: usize,
    /// Root pivots tried before giving up.
    pub max_root_pivots: usize,
    /// Also multiply classes whose rotations do not cancel.
    pub plain_products: bool,
    /// Powers `k` of composite pivots `(x_i x_j)^k (x_j x_i)^-k`.
    pub composite_powers: Vec<usize>,
    #[serde(default)]
    pub extra_pivots: Vec<FreeWord>,
}

impl Default for SaturationConfig {
    fn default() -> Self {
        SaturationConfig {
            max_word_len: 12,
            max_ledger: 200_000,
            max_rounds: 12,
            max_depth: 4,
            max_branches: 64,
            branch_budget: 400,
            probe_budget: 48,
            max_root_pivots: 4,
            plain_products: false,
            composite_powers: Vec::new(),
            extra_pivots: Vec::new(),
        }
    }
}

impl SaturationConfig {
    /// Budgets scaled by the largest syllable exponent of `beta`.
    pub fn for_braid(beta: &BraidWord) -> Self {
        let e = beta.max_abs_exponent();
        let mut powers: Vec<usize> = sigma1_runs(beta)
            .into_iter()
            .filter(|r| *r >= 2)
            .map(|r| r / 2)
            .collect();
        powers.sort_unstable();
        powers.dedup();
        SaturationConfig {
            max_word_len: 4 * e + 8,
            composite_powers: powers,
            ..SaturationConfig::default()
        }
    }
}

/// Lengths of maximal syllables of `sigma_1^{+-1}`, cyclically.
fn sigma1_runs(beta: &BraidWord) -> Vec<usize> {
    let l = beta.letters();
    let mut out = Vec::new();
    let mut run = 0usize;
    let mut sign = 0;
    for &x in l {
        if x.abs() == 1 && (run == 0 || x.signum() == sign) {
            run += 1;
            sign = x.signum();
        } else {
            if run > 0 {
                out.push(run);
            }
            run = usize::from(x.abs() == 1);
            sign = x.signum();
        }
    }
    if run > 0 {
        out.push(run);
    }
    if out.len() > 1 && l.first() == l.last() && l[0].abs() == 1 {
        let first = out.remove(0);
        *out.last_mut().expect("nonempty") += first;
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationTelemetry {
    pub branches: usize,
    pub deepest_split: usize,
    pub largest_ledger: usize,
    pub root_pivots_tried: usize,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationResult {
    pub certificate: Option<NotOPCertificate>,
    pub telemetry: SaturationTelemetry,
}

/// Least rotation of a cyclically reduced letter sequence.
fn least_rotation(l: &[Letter]) -> usize {
    let n = l.len();
    let mut best = 0;
    for s in 1..n {
        for i in 0..n {
            let (x, y) = (l[(s + i) % n], l[(best + i) % n]);
            if x != y {
                if x < y {
                    best = s;
                }
                break;
            }
        }
    }
    best
}

/// Canonical letters of the conjugacy class of a reduced word.
fn class_of(l: &[Letter]) -> Vec<Letter> {
    let mut k = 0;
    while 2 * k + 1 < l.len() && l[k] == -l[l.len() - 1 - k] {
        k += 1;
    }
    let core = &l[k..l.len() - k];
    if core.is_empty() {
        return Vec::new();
    }
    let b = least_rotation(core);
    let mut out = Vec::with_capacity(core.len());
    out.extend_from_slice(&core[b..]);
    out.extend_from_slice(&core[..b]);
    out
}

fn inverse_letters(l: &[Letter]) -> Vec<Letter> {
    l.iter().rev().map(|x| -x).collect()
}

fn push_reduced(out: &mut Vec<Letter>, x: Letter) {
    if out.last() == Some(&-x) {
        out.pop();
    } else {
        out.push(x);
    }
}

#[derive(Clone, Debug)]
enum Deriv {
    Seed(FreeWord),
    Phi(usize),
    PhiInv(usize),
    /// `rot_ra(a) * rot_rb(b)`.
    Product {
        a: usize,
        ra: usize,
        b: usize,
        rb: usize,
    },
}

#[derive(Clone, Debug)]
struct Fact {
    word: Vec<Letter>,
    deriv: Deriv,
    depth: usize,
}

#[derive(Clone, Debug, Default)]
struct Branch {
    facts: Vec<Fact>,
    index: HashMap<Vec<Letter>, usize>,
    processed: Vec<usize>,
    queue: BinaryHeap<Reverse<(usize, usize, usize)>>,
}

enum Status {
    Contradiction(usize, usize),
    Open { exhausted: bool },
}

impl Branch {
    fn decided(&self, class: &[Letter]) -> bool {
        self.index.contains_key(class) || self.index.contains_key(&class_of(&inverse_letters(class)))
    }

    /// Adds a class; reports a contradiction with its inverse class.
    fn add(&mut self, word: Vec<Letter>, deriv: Deriv, depth: usize) -> Option<(usize, usize)> {
        if word.is_empty() || self.index.contains_key(&word) {
            return None;
        }
        let inv = class_of(&inverse_letters(&word));
        let id = self.facts.len();
        self.index.insert(word.clone(), id);
        self.queue.push(Reverse((word.len(), depth, id)));
        self.facts.push(Fact { word, deriv, depth });
        self.index.get(&inv).map(|&other| (other, id))
    }
}

struct Engine<'a> {
    phi: &'a FreeEndo,
    phi_inv: &'a FreeEndo,
    cfg: &'a SaturationConfig,
    pivots: Vec<FreeWord>,
    telemetry: SaturationTelemetry,
}

impl<'a> Engine<'a> {
    fn apply_class(&self, f: &FreeEndo, word: &[Letter]) -> Option<Vec<Letter>> {
        let w = FreeWord::from_trusted(f.rank(), word.to_vec());
        let img = f.apply_capped(&w, 8 * self.cfg.max_word_len + 64).ok()?;
        let c = class_of(img.letters());
        (c.len() <= self.cfg.max_word_len).then_some(c)
    }

    fn assume(&self, branch: &mut Branch, pivot: &FreeWord) -> Option<(usize, usize)> {
        let c = class_of(pivot.letters());
        branch.add(c, Deriv::Seed(pivot.clone()), 0)
    }

    /// Processes queued classes shortest first, up to `budget` of them.
    fn saturate(&mut self, branch: &mut Branch, budget: usize) -> Status {
        self.telemetry.branches += 1;
        let cap = self.cfg.max_word_len;
        let mut done = 0;
        while let Some(Reverse((_, depth, id))) = branch.queue.pop() {
            if depth >= self.cfg.max_rounds {
                continue;
            }
            if done >= budget || branch.facts.len() >= self.cfg.max_ledger {
                branch.queue.push(Reverse((branch.facts[id].word.len(), depth, id)));
                self.note_ledger(branch);
                return Status::Open { exhausted: true };
            }
            done += 1;
            let a = branch.facts[id].word.clone();
            for (f, inverse) in [(self.phi, false), (self.phi_inv, true)] {
                if let Some(c) = self.apply_class(f, &a) {
                    let d = if inverse { Deriv::PhiInv(id) } else { Deriv::Phi(id) };
                    if let Some((x, y)) = branch.add(c, d, depth + 1) {
                        self.note_ledger(branch);
                        return Status::Contradiction(x, y);
                    }
                }
            }
            branch.processed.push(id);
            let partners = branch.processed.clone();
            for pid in partners {
                let b = branch.facts[pid].word.clone();
                let d = depth.max(branch.facts[pid].depth) + 1;
                if let Some(hit) = self.products(branch, id, &a, pid, &b, cap, d) {
                    self.note_ledger(branch);
                    return Status::Contradiction(hit.0, hit.1);
                }
            }
        }
        self.note_ledger(branch);
        Status::Open { exhausted: false }
    }

    fn note_ledger(&mut self, branch: &Branch) {
        self.telemetry.largest_ledger = self.telemetry.largest_ledger.max(branch.facts.len());
    }

    #[allow(clippy::too_many_arguments)]
    fn products(
        &self,
        branch: &mut Branch,
        ia: usize,
        a: &[Letter],
        ib: usize,
        b: &[Letter],
        cap: usize,
        depth: usize,
    ) -> Option<(usize, usize)> {
        let (na, nb) = (a.len(), b.len());
        let plain = self.cfg.plain_products && na + nb <= cap;
        let mut buf = Vec::with_capacity(na + nb);
        for ra in 0..na {
            let last = a[(ra + na - 1) % na];
            for rb in 0..nb {
                let cancels = b[rb] == -last;
                if !cancels && !plain {
                    continue;
                }
                buf.clear();
                for k in 0..na {
                    push_reduced(&mut buf, a[(ra + k) % na]);
                }
                for k in 0..nb {
                    push_reduced(&mut buf, b[(rb + k) % nb]);
                }
                let c = class_of(&buf);
                if c.is_empty() || c.len() > cap {
                    continue;
                }
                let d = Deriv::Product {
                    a: ia,
                    ra,
                    b: ib,
                    rb,
                };
                if let Some(hit) = branch.add(c, d, depth) {
                    return Some(hit);
                }
            }
        }
        None
    }

    fn leaf(&self, branch: &Branch, (x, y): (usize, usize)) -> ProofTree {
        let mut ex = Extractor {
            engine: self,
            branch,
            entries: Vec::new(),
            by_word: HashMap::new(),
            realized: HashMap::new(),
        };
        let ex_idx = ex.realize(x);
        let ey = ex.realize(y);
        // fact y is the class of x^-1; conjugate it onto the exact inverse.
        let target = ex.entries[ex_idx].word.inv();
        let (_, w) = target.conjugacy_canonical();
        let ey = ex.conj_to(ey, &target, &w.inv());
        ProofTree::Leaf {
            ledger: PositivityLedger {
                entries: ex.entries,
            },
            contradiction: (ex_idx, ey),
        }
    }

    fn undecided_pivots(&self, branch: &Branch) -> Vec<FreeWord> {
        self.pivots
            .iter()
            .filter(|p| !branch.decided(&class_of(p.letters())))
            .cloned()
            .collect()
    }

    fn out_of_budget(&self) -> bool {
        self.telemetry.branches >= self.cfg.max_branches
    }

    /// Tries to close every extension of `branch`.
    fn close(&mut self, mut branch: Branch, depth: usize) -> Option<ProofTree> {
        self.telemetry.deepest_split = self.telemetry.deepest_split.max(depth);
        let mut candidates = Vec::new();
        for budget in [self.cfg.probe_budget, self.cfg.branch_budget] {
            match self.saturate(&mut branch, budget) {
                Status::Contradiction(x, y) => return Some(self.leaf(&branch, (x, y))),
                Status::Open { exhausted } => self.telemetry.budget_exhausted |= exhausted,
            }
            if depth >= self.cfg.max_depth || self.out_of_budget() {
                self.telemetry.budget_exhausted = true;
                return None;
            }
            candidates = self.undecided_pivots(&branch);
            if let Some(forced) = self.probe(&branch, &candidates, depth) {
                return forced;
            }
        }
        // Nothing forced: split on the first pivot.
        let p = candidates.first()?;
        let mut pos = branch.clone();
        let a = match self.assume(&mut pos, p) {
            Some(hit) => self.leaf(&pos, hit),
            None => self.close(pos, depth + 1)?,
        };
        let mut neg = branch;
        let b = match self.assume(&mut neg, &p.inv()) {
            Some(hit) => self.leaf(&neg, hit),
            None => self.close(neg, depth + 1)?,
        };
        Some(split(p, a, b))
    }

    /// A pivot one of whose signs dies quickly is forced. Returns the outcome
    /// of following the first forced pivot, if any.
    fn probe(
        &mut self,
        branch: &Branch,
        candidates: &[FreeWord],
        depth: usize,
    ) -> Option<Option<ProofTree>> {
        for p in candidates {
            if self.out_of_budget() {
                self.telemetry.budget_exhausted = true;
                return Some(None);
            }
            let mut closed: [Option<ProofTree>; 2] = [None, None];
            let mut open: [Option<Branch>; 2] = [None, None];
            for (s, q) in [p.clone(), p.inv()].iter().enumerate() {
                let mut child = branch.clone();
                if let Some(hit) = self.assume(&mut child, q) {
                    closed[s] = Some(self.leaf(&child, hit));
                    continue;
                }
                match self.saturate(&mut child, self.cfg.probe_budget) {
                    Status::Contradiction(x, y) => closed[s] = Some(self.leaf(&child, (x, y))),
                    Status::Open { .. } => open[s] = Some(child),
                }
            }
            match (closed, open) {
                ([Some(a), Some(b)], _) => return Some(Some(split(p, a, b))),
                ([Some(a), None], [_, Some(rest)]) => {
                    return Some(self.close(rest, depth + 1).map(|b| split(p, a, b)));
                }
                ([None, Some(b)], [Some(rest), _]) => {
                    return Some(self.close(rest, depth + 1).map(|a| split(p, a, b)));
                }
                _ => {}
            }
        }
        None
    }
}

fn split(p: &FreeWord, positive: ProofTree, negative: ProofTree) -> ProofTree {
    ProofTree::Split {
        pivot: p.clone(),
        positive: Box::new(positive),
        negative: Box::new(negative),
    }
}

struct Extractor<'e, 'a> {
    engine: &'e Engine<'a>,
    branch: &'e Branch,
    entries: Vec<LedgerEntry>,
    by_word: HashMap<FreeWord, usize>,
    realized: HashMap<usize, usize>,
}

impl Extractor<'_, '_> {
    fn rank(&self) -> usize {
        self.engine.phi.rank()
    }

    fn push(&mut self, word: FreeWord, rule: Rule, parents: Vec<usize>) -> usize {
        if let Some(&i) = self.by_word.get(&word) {
            return i;
        }
        let i = self.entries.len();
        self.by_word.insert(word.clone(), i);
        self.entries.push(LedgerEntry {
            word,
            rule,
            parents,
        });
        i
    }

    /// Entry for `target = by * entry * by^-1`.
    fn conj_to(&mut self, entry: usize, target: &FreeWord, by: &FreeWord) -> usize {
        if self.entries[entry].word == *target {
            return entry;
        }
        self.push(target.clone(), Rule::Conjugate { by: by.clone() }, vec![entry])
    }

    /// Entry holding the canonical class word of `word`, derived from `entry`.
    fn class_of(&mut self, entry: usize) -> usize {
        let word = self.entries[entry].word.clone();
        let (rep, w) = word.conjugacy_canonical();
        self.conj_to(entry, &rep, &w)
    }

    fn rotation(&mut self, entry: usize, r: usize) -> usize {
        if r == 0 {
            return entry;
        }
        let word = self.entries[entry].word.clone();
        let prefix = FreeWord::from_trusted(self.rank(), word.letters()[..r].to_vec());
        let by = prefix.inv();
        let target = FreeWord::conj(&by, &word).expect("same rank");
        self.conj_to(entry, &target, &by)
    }

    fn realize(&mut self, fact: usize) -> usize {
        if let Some(&e) = self.realized.get(&fact) {
            return e;
        }
        let rank = self.rank();
        let f = &self.branch.facts[fact];
        let e = match f.deriv.clone() {
            Deriv::Seed(s) => {
                let e = self.push(s, Rule::Seed, vec![]);
                self.class_of(e)
            }
            Deriv::Phi(p) => {
                let ep = self.realize(p);
                let img = self.engine.phi.apply(&self.entries[ep].word).expect("rank");
                let e = self.push(img, Rule::Phi, vec![ep]);
                self.class_of(e)
            }
            Deriv::PhiInv(p) => {
                let ep = self.realize(p);
                let img = self.engine.phi_inv.apply(&self.entries[ep].word).expect("rank");
                let e = self.push(img, Rule::PhiInverse, vec![ep]);
                self.class_of(e)
            }
            Deriv::Product { a, ra, b, rb } => {
                let ea = self.realize(a);
                let eb = self.realize(b);
                let ea = self.rotation(ea, ra);
                let eb = self.rotation(eb, rb);
                let word = self.entries[ea]
                    .word
                    .mul(&self.entries[eb].word)
                    .expect("rank");
                let e = self.push(word, Rule::Product, vec![ea, eb]);
                self.class_of(e)
            }
        };
        debug_assert_eq!(
            self.entries[e].word,
            FreeWord::from_trusted(rank, self.branch.facts[fact].word.clone())
        );
        self.realized.insert(fact, e);
        e
    }
}

fn default_pivots(phi: &FreeEndo, cfg: &SaturationConfig) -> Vec<FreeWord> {
    let r = phi.rank();
    let x = |i: usize| FreeWord::generator(r, i, false).expect("index in range");
    let mut cands: Vec<FreeWord> = Vec::new();
    for i in 1..=r {
        for j in i + 1..=r {
            cands.push(x(i).inv().mul(&x(j)).expect("rank"));
        }
    }
    for i in 1..=r {
        for j in 1..=r {
            cands.push(x(i).inv().mul(phi.image(j)).expect("rank"));
        }
    }
    for &k in &cfg.composite_powers {
        for i in 1..=r {
            for j in i + 1..=r {
                let xy = x(i).mul(&x(j)).expect("rank").pow(k as i64);
                let yx = x(j).mul(&x(i)).expect("rank").pow(-(k as i64));
                cands.push(xy.mul(&yx).expect("rank"));
            }
        }
    }
    cands.extend(cfg.extra_pivots.iter().cloned());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in cands {
        if c.is_identity() || c.rank() != r || c.len() > cfg.max_word_len + 2 {
            continue;
        }
        let k = class_of(c.letters());
        let ki = class_of(&inverse_letters(&k));
        if seen.contains(&k) || seen.contains(&ki) {
            continue;
        }
        seen.insert(k);
        out.push(c);
    }
    out
}

/// Bounded search for a proof that no bi-ordering is `phi`-invariant.
/// `phi_inv` must be the inverse automorphism.
pub fn saturate_refute(
    phi: &FreeEndo,
    phi_inv: &FreeEndo,
    config: &SaturationConfig,
) -> Result<SaturationResult> {
    if phi.rank() != phi_inv.rank() {
        return Err(Error::RankMismatch {
            left: phi.rank(),
            right: phi_inv.rank(),
        });
    }
    for i in 1..=phi.rank() {
        let x = FreeWord::generator(phi.rank(), i, false)?;
        if phi.apply(&phi_inv.apply(&x)?)? != x {
            return Err(Error::NotAutomorphism(
                "supplied inverse does not invert the map".into(),
            ));
        }
    }
    let mut engine = Engine {
        phi,
        phi_inv,
        cfg: config,
        pivots: default_pivots(phi, config),
        telemetry: SaturationTelemetry::default(),
    };
    // A reversed invariant order is again invariant, so the root split
    // needs only one side; the other is its mirror image.
    let found = |engine: Engine, p: &FreeWord, t: ProofTree| SaturationResult {
        certificate: Some(NotOPCertificate::Saturation {
            tree: split(p, t.clone(), t.mirror()),
        }),
        telemetry: engine.telemetry,
    };
    let pivots = engine.pivots.clone();
    for p in &pivots {
        let mut branch = Branch::default();
        if let Some(hit) = engine.assume(&mut branch, p) {
            let t = engine.leaf(&branch, hit);
            return Ok(found(engine, p, t));
        }
        if let Status::Contradiction(x, y) = engine.saturate(&mut branch, config.probe_budget) {
            let t = engine.leaf(&branch, (x, y));
            return Ok(found(engine, p, t));
        }
    }
    for p in pivots.iter().take(config.max_root_pivots) {
        if engine.out_of_budget() {
            break;
        }
        engine.telemetry.root_pivots_tried += 1;
        let mut branch = Branch::default();
        engine.assume(&mut branch, p);
        if let Some(t) = engine.close(branch, 1) {
            return Ok(found(engine, p, t));
        }
    }
    engine.telemetry.budget_exhausted = true;
    Ok(SaturationResult {
        certificate: None,
        telemetry: engine.telemetry,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::artin::{artin_action, interior_action, Convention};
    use crate::braid_core::parse_braid;

    fn pair(text: &str, n: usize, conv: Convention) -> (FreeEndo, FreeEndo) {
        let b = parse_braid(text, n).unwrap();
        (
            crate::artin::action(&b, conv).unwrap(),
            crate::artin::action(&b.invert(), conv).unwrap(),
        )
    }

    #[test]
    fn orbit_for_delta3() {
        let phi = interior_action(&parse_braid("d_3", 3).unwrap());
        let cert = finite_orbit_refute(&phi, 1).expect("certificate");
        match &cert {
            NotOPCertificate::FiniteOrbit { twist, period, .. } => {
                assert_eq!(twist.to_string(), "x3^-1");
                assert_eq!(*period, 3);
            }
            _ => panic!("wrong kind"),
        }
        assert!(check_certificate(&cert, &phi));
        assert!(finite_orbit_refute(&artin_action(&parse_braid("s1^2", 2).unwrap()), 2).is_none());
    }

    #[test]
    fn orbit_for_even_small_dilatation_braid() {
        let phi = interior_action(&parse_braid("d_6^2 s5^-1 s4^-1", 6).unwrap());
        let cert = finite_orbit_refute(&phi, 2).expect("certificate");
        assert!(check_certificate(&cert, &phi));
        let NotOPCertificate::FiniteOrbit { period, .. } = cert else {
            panic!("wrong kind")
        };
        assert_eq!(period, 2);
    }

    #[test]
    fn saturation_sigma1() {
        let (phi, inv) = pair("s1", 2, Convention::Boundary);
        let cfg = SaturationConfig {
            max_word_len: 6,
            ..SaturationConfig::default()
        };
        let res = saturate_refute(&phi, &inv, &cfg).unwrap();
        let cert = res.certificate.expect("refuted");
        assert!(check_certificate(&cert, &phi));
        let json = cert.to_json().unwrap();
        assert_eq!(NotOPCertificate::from_json(&json).unwrap(), cert);
    }

    #[test]
    fn saturation_sigma1_sigma2_inv() {
        let (phi, inv) = pair("s1 s2^-1", 3, Convention::Boundary);
        let cfg = SaturationConfig {
            max_word_len: 12,
            ..SaturationConfig::default()
        };
        let res = saturate_refute(&phi, &inv, &cfg).unwrap();
        let cert = res.certificate.expect("refuted");
        assert!(check_certificate(&cert, &phi));
    }

    #[test]
    fn identity_is_not_refuted() {
        let id = FreeEndo::identity(3, Convention::Explicit);
        let res = saturate_refute(&id, &id, &SaturationConfig::default()).unwrap();
        assert!(res.certificate.is_none());
    }

    #[test]
    fn tampering_is_detected() {
        let (phi, inv) = pair("s1", 2, Convention::Boundary);
        let res = saturate_refute(&phi, &inv, &SaturationConfig::default()).unwrap();
        let cert = res.certificate.unwrap();
        let NotOPCertificate::Saturation { mut tree } = cert else {
            panic!("wrong kind")
        };
        for leaf in tree.leaves_mut() {
            if let ProofTree::Leaf { ledger, .. } = leaf {
                let e = ledger
                    .entries
                    .iter_mut()
                    .find(|e| !e.parents.is_empty())
                    .unwrap();
                e.parents.pop();
            }
        }
        assert!(!check_certificate(
            &NotOPCertificate::Saturation { tree },
            &phi
        ));
    }

    #[test]
    fn mirrored_branch_is_explicit() {
        let (phi, inv) = pair("s1", 2, Convention::Boundary);
        let res = saturate_refute(&phi, &inv, &SaturationConfig::default()).unwrap();
        let Some(NotOPCertificate::Saturation { tree }) = res.certificate else {
            panic!("refuted")
        };
        let ProofTree::Split {
            positive, negative, ..
        } = &tree
        else {
            panic!("root split")
        };
        assert_eq!(negative.mirror(), **positive);
    }

    #[test]
    fn sigma1_runs() {
        let b = parse_braid("s1^2 s2 s1^-4 s1", 3).unwrap();
        assert_eq!(super::sigma1_runs(&b), vec![2, 3]);
        let b = parse_braid("s1 s2 s1", 3).unwrap();
        assert_eq!(super::sigma1_runs(&b), vec![2]);
    }
}
