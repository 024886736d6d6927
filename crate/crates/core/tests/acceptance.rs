mod common;

use std::cmp::Ordering;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use braidord::artin::{action, artin_action, sibling_matrix, fig8_matrix, whitehead_monodromy, Convention, FreeEndo};
use braidord::braid_core::{braid_equal, parse_braid, BraidWord};
use braidord::certify::{
    certify_endo, load_corpus, run_corpus, Budgets, CorpusRow, EndoInput, Expected, Reason,
    Verdict,
};
use braidord::explicit_orderings::{cover_embedding, induced_sign, type1_action};
use braidord::free_group::FreeWord;
use braidord::magnus_order::{compare, min_degree, sign, OrderSign};
use braidord::refute::{check_certificate, NotOPCertificate, ProofTree};
use braidord::spectra::{abelianize, char_poly, IntPolynomial};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    if failures.is_empty() {
        Outcome { ok: true, detail: summary }
    } else {
        let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
        Outcome {
            ok: false,
            detail: format!("{summary}; {} failure(s): {}", failures.len(), shown.join(" | ")),
        }
    }
}

fn corpus_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus.json")
}

/// Every refutation certificate emitted for the corpus, with the action it refutes.
type Emitted = Vec<(String, NotOPCertificate, FreeEndo)>;

fn verdict_table(emitted: &mut Emitted) -> Outcome {
    let mut rows = load_corpus(&corpus_path()).expect("corpus fixture");
    let mut g = common::rng(1);
    for i in 0..25 {
        let n = 3 + i % 3;
        let b = common::random_pure_braid(&mut g, n, 8);
        rows.push(CorpusRow {
            name: format!("random pure {i} in B{n}"),
            braid: Some(b.to_string()),
            matrix: None,
            endo: None,
            strands: Some(n),
            expected: Expected::Op,
            paper_ref: "pure braids are order-preserving".into(),
        });
    }
    let start = Instant::now();
    let report = run_corpus(&rows, &Budgets::default());
    let wall = start.elapsed();
    let mut failures: Vec<String> = report
        .rows
        .iter()
        .filter(|r| !r.ok)
        .map(|r| format!("{}: got {:?} ({})", r.name, r.verdict, r.reason))
        .collect();
    if wall > Duration::from_secs(300) {
        failures.push(format!("took {wall:?}"));
    }
    for (row, rep) in rows.iter().zip(&report.rows) {
        let Some(cert) = &rep.certificate else { continue };
        if cert.verdict != Verdict::NotOp {
            continue;
        }
        for reason in &cert.reasons {
            let (Reason::FiniteOrbit { convention, certificate } | Reason::Saturation { convention, certificate }) =
                reason
            else {
                continue;
            };
            let phi = match (&row.braid, &row.endo) {
                (Some(text), _) => {
                    let beta = parse_braid(text, row.strands.unwrap()).unwrap();
                    let refuted = cert
                        .reasons
                        .iter()
                        .find_map(|r| match r {
                            Reason::DeltaSquareReduction { rest, .. } => Some(rest.clone()),
                            _ => None,
                        })
                        .unwrap_or(beta);
                    action(&refuted, *convention).unwrap()
                }
                (None, Some(e)) => e.to_endo().unwrap(),
                _ => continue,
            };
            emitted.push((row.name.clone(), certificate.clone(), phi));
        }
        if cert.reasons.iter().any(|r| matches!(r, Reason::TensorSplit { .. })) {
            failures.push(format!("{}: refutation inside a tensor split is not replayed here", row.name));
        }
    }
    let counts = |v| report.rows.iter().filter(|r| r.verdict == Some(v)).count();
    outcome(
        &failures,
        format!(
            "{} rows ({} OP, {} NOT_OP, {} UNKNOWN) in {:.1}s",
            rows.len(),
            counts(Verdict::Op),
            counts(Verdict::NotOp),
            counts(Verdict::Unknown),
            wall.as_secs_f64()
        ),
    )
}

fn eigen_certificates() -> Outcome {
    let b = Budgets::default();
    let mut failures = Vec::new();
    let wh = whitehead_monodromy();
    let p = char_poly(&abelianize(&wh));
    if p != IntPolynomial::from_i64(&[-1, 3, -3, 1]) {
        failures.push(format!("whitehead char poly {p}"));
    }
    let cases = [
        ("whitehead", EndoInput::Endo(wh), Verdict::Op),
        ("fig8", EndoInput::Matrix(fig8_matrix()), Verdict::Op),
        ("sibling", EndoInput::Matrix(sibling_matrix()), Verdict::NotOp),
    ];
    for (name, input, want) in cases {
        let got = certify_endo(&input, &b).unwrap().verdict;
        if got != want {
            failures.push(format!("{name}: {got}"));
        }
    }
    outcome(&failures, format!("whitehead char poly {p}; fig8 OP; sibling NOT_OP"))
}

fn word_problem() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let eq = |a: &BraidWord, b: &BraidWord| braid_equal(a, b).unwrap();
    for n in 3..=7 {
        let full = BraidWord::full_twist(n).unwrap();
        let dn = BraidWord::delta(n).unwrap().power(n as i64);
        let root = BraidWord::delta(n).unwrap().compose(&BraidWord::new(n, &[1]).unwrap()).unwrap();
        if !eq(&full, &dn) || !eq(&dn, &root.power(n as i64 - 1)) {
            failures.push(format!("full twist identities fail for n={n}"));
        }
        for i in 1..n as i32 - 1 {
            let l = BraidWord::new(n, &[i, i + 1, i]).unwrap();
            let r = BraidWord::new(n, &[i + 1, i, i + 1]).unwrap();
            if !eq(&l, &r) {
                failures.push(format!("braid relation {i} in B{n}"));
            }
        }
        for i in 1..n as i32 {
            for j in i + 2..n as i32 {
                if !eq(&BraidWord::new(n, &[i, j]).unwrap(), &BraidWord::new(n, &[j, i]).unwrap()) {
                    failures.push(format!("far commutation {i},{j} in B{n}"));
                }
            }
        }
        if eq(&BraidWord::new(n, &[1, 2]).unwrap(), &BraidWord::new(n, &[2, 1]).unwrap()) {
            failures.push(format!("s1 s2 = s2 s1 claimed in B{n}"));
        }
    }
    let lhs = parse_braid("s1 s2 s1^-1", 3).unwrap();
    let rhs = parse_braid("s1 s2 s1 s1^-2", 3).unwrap();
    if !eq(&lhs, &rhs) {
        failures.push("s1 s2 s1^-1 decomposition".into());
    }
    let wall = start.elapsed();
    if wall > Duration::from_secs(10) {
        failures.push(format!("took {wall:?}"));
    }
    outcome(&failures, format!("n = 3..7 in {:.2}s", wall.as_secs_f64()))
}

fn positive(w: FreeWord) -> FreeWord {
    if sign(&w).unwrap() == OrderSign::Negative {
        w.inv()
    } else {
        w
    }
}

/// An iterated commutator of random words, lying in the `depth`-th lower central term.
fn deep_word<R: Rng>(g: &mut R, rank: usize, depth: usize) -> FreeWord {
    let mut w = common::random_nontrivial_word(g, rank, 3);
    for _ in 1..depth {
        let x = common::random_nontrivial_word(g, rank, 3);
        w = FreeWord::commutator(&w, &x).unwrap();
    }
    w
}

fn magnus_suite() -> Outcome {
    let mut g = common::rng(4);
    let mut failures = Vec::new();
    for _ in 0..1000 {
        let r = g.gen_range(1..=5);
        let u = common::random_word(&mut g, r, 30);
        let v = common::random_word(&mut g, r, 30);
        let w = common::random_word(&mut g, r, 30);
        let (su, sinv) = (sign(&u).unwrap(), sign(&u.inv()).unwrap());
        let count = [su == OrderSign::Zero, su == OrderSign::Positive, sinv == OrderSign::Positive]
            .iter()
            .filter(|b| **b)
            .count();
        if count != 1 {
            failures.push(format!("trichotomy {u}"));
        }
        let (pu, pv) = (positive(u.clone()), positive(v.clone()));
        if !pu.is_identity() && !pv.is_identity() && sign(&pu.mul(&pv).unwrap()).unwrap() != OrderSign::Positive {
            failures.push(format!("closure {pu} {pv}"));
        }
        if sign(&FreeWord::conj(&w, &u).unwrap()).unwrap() != su {
            failures.push(format!("conjugation {w} {u}"));
        }
    }
    for _ in 0..100 {
        let n = g.gen_range(2..=5);
        let beta = common::random_pure_braid(&mut g, n, 6);
        let phi = artin_action(&beta);
        let w = common::random_word(&mut g, n, 20);
        if sign(&phi.apply(&w).unwrap()).unwrap() != sign(&w).unwrap() {
            failures.push(format!("pure braid {beta} flips {w}"));
        }
    }
    for (text, n) in [("s1", 3), ("d_3", 3)] {
        let phi = artin_action(&parse_braid(text, n).unwrap());
        let mut witness = false;
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                let q = FreeWord::reduce(&[-(i as i32), j as i32], n).unwrap();
                if sign(&phi.apply(&q).unwrap()).unwrap() != sign(&q).unwrap() {
                    witness = true;
                }
            }
        }
        if !witness {
            failures.push(format!("no sign-flip witness for {text}"));
        }
    }
    let mut triples = 0;
    while triples < 100 {
        let r = g.gen_range(2..=3);
        let k = g.gen_range(2..=3);
        let w = positive(deep_word(&mut g, r, k));
        if w.is_identity() {
            continue;
        }
        let kw = min_degree(&w).unwrap().unwrap();
        let h = positive(deep_word(&mut g, r, kw + 1));
        let candidates = [
            w.mul(&h.inv()).unwrap(),
            common::random_word(&mut g, r, 10),
            positive(deep_word(&mut g, r, k)),
        ];
        for u in candidates {
            let id = FreeWord::identity(r);
            if compare(&id, &u).unwrap() == Ordering::Less && compare(&u, &w).unwrap() == Ordering::Less {
                triples += 1;
                let ku = min_degree(&u).unwrap().unwrap();
                if ku < kw {
                    failures.push(format!("convexity: 1 < {u} < {w} but degrees {ku} < {kw}"));
                }
            }
        }
    }
    outcome(
        &failures,
        format!("1000 words, 100 pure pairs, 2 witnesses, {triples} convexity triples"),
    )
}

fn intertwining() -> Outcome {
    let mut failures = Vec::new();
    let u = FreeWord::generator(2, 1, false).unwrap();
    for n in 3..=9 {
        let e = cover_embedding(n).unwrap();
        let phi = type1_action(n).unwrap();
        for i in 1..=n {
            let x = FreeWord::generator(n, i, false).unwrap();
            let lhs = e.embed(&phi.apply(&x).unwrap()).unwrap();
            let rhs = FreeWord::conj(&u, &e.embed(&x).unwrap()).unwrap();
            if lhs != rhs {
                failures.push(format!("n={n} x{i}"));
            }
        }
    }
    let mut g = common::rng(5);
    for n in 3..=6 {
        let phi = type1_action(n).unwrap();
        for _ in 0..100 {
            let w = common::random_word(&mut g, n, 20);
            if induced_sign(&phi.apply(&w).unwrap(), n).unwrap() != induced_sign(&w, n).unwrap() {
                failures.push(format!("n={n} {w}"));
            }
        }
    }
    outcome(&failures, "generators for n = 3..9, 100 words per n = 3..6".into())
}

/// Points one parent reference of a random derived entry at a different earlier entry.
fn corrupt<R: Rng>(g: &mut R, tree: &mut ProofTree) -> bool {
    let mut leaves = tree.leaves_mut();
    leaves.shuffle(g);
    for leaf in leaves {
        let ProofTree::Leaf { ledger, .. } = leaf else { continue };
        let mut spots: Vec<(usize, usize)> = ledger
            .entries
            .iter()
            .enumerate()
            .flat_map(|(i, e)| (0..e.parents.len()).map(move |p| (i, p)))
            .filter(|&(i, _)| i >= 2)
            .collect();
        spots.shuffle(g);
        if let Some(&(i, p)) = spots.first() {
            let old = ledger.entries[i].parents[p];
            let mut new = g.gen_range(0..i - 1);
            if new >= old {
                new += 1;
            }
            ledger.entries[i].parents[p] = new;
            return true;
        }
    }
    false
}

fn certificate_replay(emitted: &Emitted) -> Outcome {
    let mut failures = Vec::new();
    for (name, cert, phi) in emitted {
        if !check_certificate(cert, phi) {
            failures.push(format!("{name} does not replay"));
        }
    }
    let saturation: Vec<&(String, NotOPCertificate, FreeEndo)> = emitted
        .iter()
        .filter(|(_, c, _)| matches!(c, NotOPCertificate::Saturation { .. }))
        .collect();
    let mut g = common::rng(6);
    let mut rejected = 0;
    let mut mutated = 0;
    if saturation.is_empty() {
        failures.push("no saturation certificates to mutate".into());
    } else {
        while mutated < 50 {
            let (name, cert, phi) = saturation[mutated % saturation.len()];
            let NotOPCertificate::Saturation { tree } = cert else { unreachable!() };
            let mut tree = tree.clone();
            if !corrupt(&mut g, &mut tree) {
                failures.push(format!("{name}: nothing to corrupt"));
                break;
            }
            mutated += 1;
            if !check_certificate(&NotOPCertificate::Saturation { tree }, phi) {
                rejected += 1;
            } else {
                failures.push(format!("{name}: corrupted certificate accepted"));
            }
        }
    }
    outcome(
        &failures,
        format!(
            "{} certificates replayed ({} saturation), mutations rejected {rejected}/{mutated}",
            emitted.len(),
            saturation.len()
        ),
    )
}

fn product_of_generators(n: usize, convention: Convention) -> FreeWord {
    let mut l: Vec<i32> = (1..=n as i32).collect();
    if convention == Convention::Interior {
        l.reverse();
    }
    FreeWord::reduce(&l, n).unwrap()
}

fn artin_laws() -> Outcome {
    let mut failures = Vec::new();
    for c in [Convention::Boundary, Convention::Interior] {
        let mut g = common::rng(7);
        for _ in 0..1000 {
            let n = g.gen_range(2..=6);
            let a = common::random_braid(&mut g, n, 12);
            let b = common::random_braid(&mut g, n, 12);
            let fa = action(&a, c).unwrap();
            let fb = action(&b, c).unwrap();
            if action(&a.compose(&b).unwrap(), c).unwrap() != fa.compose(&fb).unwrap() {
                failures.push(format!("{c:?}: homomorphism {a} {b}"));
            }
            let p = product_of_generators(n, c);
            if fa.apply(&p).unwrap() != p {
                failures.push(format!("{c:?}: product moved by {a}"));
            }
            let round = fa.compose(&action(&a.invert(), c).unwrap()).unwrap();
            if round.images() != FreeEndo::identity(n, c).images() {
                failures.push(format!("{c:?}: inverse of {a}"));
            }
        }
    }
    outcome(&failures, "1000 braids per convention".into())
}

type Criterion<'a> = Box<dyn FnOnce() -> Outcome + 'a>;

fn main() -> ExitCode {
    let mut emitted = Vec::new();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("1 verdict table", Box::new(|| verdict_table(&mut emitted))),
        ("2 eigenvalue certificates", Box::new(eigen_certificates)),
        ("3 word-problem identities", Box::new(word_problem)),
        ("4 Magnus ordering properties", Box::new(magnus_suite)),
        ("5 cover-order intertwining", Box::new(intertwining)),
    ];
    let mut all_ok = true;
    let mut report = |name: &str, o: Outcome, t: Instant| {
        all_ok &= o.ok;
        println!(
            "{} criterion {name}: {} [{:.2}s]",
            if o.ok { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    };
    for (name, f) in criteria {
        let t = Instant::now();
        let o = f();
        report(name, o, t);
    }
    let t = Instant::now();
    report("6 certificate replay", certificate_replay(&emitted), t);
    let t = Instant::now();
    report("7 Artin representation laws", artin_laws(), t);
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
