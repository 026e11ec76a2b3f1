//! Acceptance suite. Every check compares the library against an independent
//! oracle or a hand-derived fixture and prints a single PASS/FAIL line.
//!
//! Run with `cargo test -p talkshare --test acceptance -- --nocapture`.
//! Set `UPDATE_GOLDEN=1` to rewrite the SVG golden files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use talkshare::dynamics::{make_windows_with_roles, window_count};
use talkshare::ingest::{parse_survey, parse_transcripts, TranscriptFormat};
use talkshare::stats::{
    bootstrap_ci, cohens_kappa, crosstab, fightin_words, interval_prf, mann_whitney_u,
    sign_test, wilcoxon_signed_rank, BootstrapStatistic, Tail,
};
use talkshare::viz::{render_corpus_grid, render_pie, render_strip, GridSort, StripStyle};
use talkshare::{
    analyze, count_flips, synthesize, AnalysisConfig, Blueprint, Conversation, DynamicsReport,
    MixedDynamics, Regime, RoleMap, Roles, Segment, SegmentRegime, Stereotype, Utterance,
    WindowConfig,
};

fn verdict(id: &str, what: &str, ok: bool, detail: impl std::fmt::Display) {
    println!("[{}] {id} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} {what}: {detail}");
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

const NAMES: [&str; 3] = ["A", "B", "C"];

/// A conversation on an integer-millisecond grid, so the oracle can work in
/// exact integer arithmetic.
struct MsConv {
    duration: i64,
    utts: Vec<(usize, i64, i64)>,
    speakers: usize,
}

impl MsConv {
    fn random(r: &mut ChaCha8Rng, speakers: usize, min_duration: i64, min_utts: usize) -> Self {
        let duration = r.gen_range(min_duration..=600_000);
        let n = r.gen_range(min_utts..=40);
        let utts = (0..n)
            .map(|_| {
                let s = r.gen_range(0..speakers);
                let start = r.gen_range(0..duration);
                let len = r.gen_range(1..=(duration - start).min(60_000));
                (s, start, start + len)
            })
            .collect();
        Self { duration, utts, speakers }
    }

    fn to_conversation(&self, id: &str, names: &[&str]) -> Conversation {
        let utts = self
            .utts
            .iter()
            .map(|&(s, a, b)| Utterance::new(names[s], a as f64 / 1000.0, b as f64 / 1000.0))
            .collect();
        let mut conv =
            Conversation::new(id, utts).with_duration(self.duration as f64 / 1000.0);
        for name in &names[..self.speakers] {
            conv = conv.with_party(*name);
        }
        conv
    }

    /// Talk milliseconds of speaker `s` inside `[lo, hi]`.
    fn talk_ms(&self, s: usize, lo: i64, hi: i64) -> i64 {
        self.utts
            .iter()
            .filter(|u| u.0 == s)
            .map(|&(_, a, b)| (b.min(hi) - a.max(lo)).max(0))
            .sum()
    }
}

#[test]
fn c01_window_engine_matches_interval_oracle() {
    let t0 = Instant::now();
    let mut r = rng(1, 0);
    let (mut max_err, mut bad_counts, mut windows_checked) = (0.0f64, 0usize, 0usize);
    for case in 0..1000 {
        let k_ms: i64 = r.gen_range(10_000..=150_000);
        let l_ms: i64 = r.gen_range(1_000..=k_ms);
        let speakers = r.gen_range(2..=3);
        let mc = MsConv::random(&mut r, speakers, k_ms, 0);
        let conv = mc.to_conversation(&format!("c{case}"), &NAMES);
        let cfg = WindowConfig::new(k_ms as f64 / 1000.0, l_ms as f64 / 1000.0, 0.6);
        let seq = make_windows_with_roles(&conv, &cfg, &Roles::new("A", "B")).unwrap();

        let expected = ((mc.duration - k_ms) / l_ms + 1) as usize;
        if seq.windows.len() != expected {
            bad_counts += 1;
            continue;
        }
        for (i, w) in seq.windows.iter().enumerate() {
            let lo = i as i64 * l_ms;
            max_err = max_err.max((w.start - lo as f64 / 1000.0).abs());
            for (s, name) in NAMES[..speakers].iter().enumerate() {
                let oracle = mc.talk_ms(s, lo, lo + k_ms) as f64 / 1000.0;
                max_err = max_err.max((w.talk_by_party[*name] - oracle).abs());
            }
            windows_checked += 1;
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let ok = bad_counts == 0 && max_err <= 1e-9 && secs < 10.0;
    verdict(
        "C1",
        "window engine vs interval oracle",
        ok,
        format!(
            "1000 conversations, {windows_checked} windows, count mismatches {bad_counts}, \
             max error {max_err:.2e}, {secs:.2}s"
        ),
    );
}

#[test]
fn c01b_window_count_on_decimal_strides() {
    // Decimal second values whose float quotient lands just off an integer.
    let mut bad = Vec::new();
    for d_ds in 1500..=3000i64 {
        for l_ds in 1..=40i64 {
            let k_ds = 1500;
            let expected = ((d_ds - k_ds) / l_ds + 1) as usize;
            let got = window_count(d_ds as f64 / 10.0, k_ds as f64 / 10.0, l_ds as f64 / 10.0);
            if got != expected {
                bad.push((d_ds, l_ds, got, expected));
            }
        }
    }
    verdict(
        "C1",
        "window count on decimal grids",
        bad.is_empty(),
        format!("{} mismatches {:?}", bad.len(), bad.iter().take(3).collect::<Vec<_>>()),
    );
}

fn seg(length: f64, regime: SegmentRegime) -> Segment {
    Segment::new(length, regime)
}

fn alternating(first_primary: bool, blocks: usize) -> Vec<Segment> {
    (0..blocks)
        .map(|i| {
            if (i % 2 == 0) == first_primary {
                seg(300.0, SegmentRegime::PrimaryLed(0.9))
            } else {
                seg(300.0, SegmentRegime::SecondaryLed(0.9))
            }
        })
        .collect()
}

fn planted(kind: Stereotype) -> Vec<Segment> {
    match kind {
        Stereotype::DominatingThroughout => vec![seg(900.0, SegmentRegime::PrimaryLed(0.85))],
        Stereotype::BackAndForth => vec![seg(900.0, SegmentRegime::Balanced)],
        Stereotype::AlternatingDominance => alternating(true, 4),
        Stereotype::Other => unreachable!(),
    }
}

#[test]
fn c02_stereotype_recovery() {
    let cfg = AnalysisConfig::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in [
        Stereotype::DominatingThroughout,
        Stereotype::BackAndForth,
        Stereotype::AlternatingDominance,
    ] {
        let hits = (0..200u64)
            .filter(|&seed| {
                let conv = synthesize(&Blueprint::new(planted(kind), 1000 + seed)).unwrap();
                analyze(&conv, &cfg, None).unwrap().stereotype == kind
            })
            .count();
        ok &= hits as f64 / 200.0 >= 0.95;
        parts.push(format!("{kind} {hits}/200"));
    }
    verdict("C2", "stereotype recovery (>= 95%)", ok, parts.join(", "));
}

fn label_from(c: u8) -> Regime {
    match c {
        0 => Regime::Blue,
        1 => Regime::Red,
        _ => Regime::Gray,
    }
}

/// Runs of the gray-free sequence, minus one.
fn flips_oracle(labels: &[Regime]) -> usize {
    let mut runs: Vec<Regime> = labels.iter().copied().filter(|l| *l != Regime::Gray).collect();
    runs.dedup();
    runs.len().saturating_sub(1)
}

#[test]
fn c03_flip_oracle() {
    let mut r = rng(3, 0);
    let mut mismatches = 0;
    for _ in 0..10_000 {
        let len = r.gen_range(0..=60);
        let labels: Vec<Regime> = (0..len).map(|_| label_from(r.gen_range(0..3))).collect();
        if count_flips(&labels) != flips_oracle(&labels) {
            mismatches += 1;
        }
    }
    let mut gray_breaks = 0;
    for _ in 0..1000 {
        let len = r.gen_range(0..=60);
        let mut labels: Vec<Regime> = (0..len).map(|_| label_from(r.gen_range(0..3))).collect();
        let before = count_flips(&labels);
        for _ in 0..r.gen_range(1..=10) {
            let at = r.gen_range(0..=labels.len());
            labels.insert(at, Regime::Gray);
        }
        if count_flips(&labels) != before {
            gray_breaks += 1;
        }
    }
    verdict(
        "C3",
        "flip count vs run-length oracle",
        mismatches == 0 && gray_breaks == 0,
        format!("10000 strings: {mismatches} mismatches; 1000 gray insertions: {gray_breaks} changes"),
    );
}

#[test]
fn c04_mixed_dynamics_detection() {
    let cfg = AnalysisConfig::default();
    // The secondary-led block sits next to the balanced stretch in both
    // directions, so the mirrored fixtures carry the same red share.
    let mut forward = vec![seg(1800.0, SegmentRegime::Balanced)];
    forward.extend(alternating(false, 4));
    let mut reverse = alternating(true, 4);
    reverse.push(seg(1800.0, SegmentRegime::Balanced));

    let run = |segments: &Vec<Segment>, expect: MixedDynamics| {
        (0..100u64)
            .filter(|&seed| {
                let conv = synthesize(&Blueprint::new(segments.clone(), 4000 + seed)).unwrap();
                analyze(&conv, &cfg, Some("A")).unwrap().mixed == Some(expect)
            })
            .count()
    };
    let fwd = run(
        &forward,
        MixedDynamics {
            first: Stereotype::BackAndForth,
            last: Stereotype::AlternatingDominance,
            transition: true,
        },
    );
    let rev = run(
        &reverse,
        MixedDynamics {
            first: Stereotype::AlternatingDominance,
            last: Stereotype::BackAndForth,
            transition: true,
        },
    );
    verdict(
        "C4",
        "mixed dynamics detection (>= 90%)",
        fwd >= 90 && rev >= 90,
        format!("balanced-then-alternating {fwd}/100, alternating-then-balanced {rev}/100"),
    );
}

/// Display form and clean token for the corpus generator.
const WORDS: [(&str, &str); 8] = [
    ("a", "a"),
    ("B", "b"),
    ("c", "c"),
    ("d,", "d"),
    ("don't", "dont"),
    ("I'm", "im"),
    ("e!", "e"),
    ("f2", "f2"),
];

fn random_corpus(r: &mut ChaCha8Rng) -> (Vec<String>, Vec<Vec<String>>) {
    let docs = r.gen_range(1..=4);
    let mut texts = Vec::new();
    let mut tokens = Vec::new();
    for _ in 0..docs {
        let len = r.gen_range(1..=8);
        let picks: Vec<usize> = (0..len).map(|_| r.gen_range(0..WORDS.len())).collect();
        texts.push(picks.iter().map(|&i| WORDS[i].0).collect::<Vec<_>>().join(" "));
        tokens.push(picks.iter().map(|&i| WORDS[i].1.to_string()).collect());
    }
    (texts, tokens)
}

fn ngram_counts(docs: &[Vec<String>], n_max: usize) -> BTreeMap<String, f64> {
    let mut counts = BTreeMap::new();
    for doc in docs {
        for n in 1..=n_max {
            for i in 0..doc.len().saturating_sub(n - 1) {
                *counts.entry(doc[i..i + n].join(" ")).or_insert(0.0) += 1.0;
            }
        }
    }
    counts
}

fn z_oracle(
    a: &[Vec<String>],
    b: &[Vec<String>],
    n_max: usize,
    alpha: f64,
) -> BTreeMap<String, f64> {
    let ca = ngram_counts(a, n_max);
    let cb = ngram_counts(b, n_max);
    let vocab: BTreeSet<&String> = ca.keys().chain(cb.keys()).collect();
    let a0 = alpha * vocab.len() as f64;
    let n1: f64 = ca.values().sum();
    let n2: f64 = cb.values().sum();
    vocab
        .into_iter()
        .map(|w| {
            let y1 = ca.get(w).copied().unwrap_or(0.0);
            let y2 = cb.get(w).copied().unwrap_or(0.0);
            let delta = ((y1 + alpha) / (n1 + a0 - y1 - alpha)).ln()
                - ((y2 + alpha) / (n2 + a0 - y2 - alpha)).ln();
            let var = 1.0 / (y1 + alpha) + 1.0 / (y2 + alpha);
            (w.clone(), delta / var.sqrt())
        })
        .collect()
}

#[test]
fn c05_fightin_words_oracle() {
    let mut r = rng(5, 0);
    let (mut max_err, mut vocab_mismatch, mut max_self, mut asym) = (0.0f64, 0, 0.0f64, 0);
    for _ in 0..100 {
        let (ta, ka) = random_corpus(&mut r);
        let (tb, kb) = random_corpus(&mut r);
        let n_max = r.gen_range(1..=3);
        let alpha = [0.01, 0.1, 0.5, 1.0][r.gen_range(0..4)];

        let got = fightin_words(&ta, &tb, n_max, alpha).unwrap();
        let oracle = z_oracle(&ka, &kb, n_max, alpha);
        if got.len() != oracle.len() {
            vocab_mismatch += 1;
        }
        for e in &got {
            match oracle.get(&e.ngram) {
                Some(z) => max_err = max_err.max((e.z - z).abs()),
                None => vocab_mismatch += 1,
            }
        }

        for e in fightin_words(&ta, &ta, n_max, alpha).unwrap() {
            max_self = max_self.max(e.z.abs());
        }

        // exact float equality (+0 and -0 compare equal)
        let swapped: BTreeMap<String, f64> = fightin_words(&tb, &ta, n_max, alpha)
            .unwrap()
            .into_iter()
            .map(|e| (e.ngram, e.z))
            .collect();
        asym += got
            .iter()
            .filter(|e| swapped.get(&e.ngram) != Some(&-e.z))
            .count();
    }
    verdict(
        "C5",
        "Fightin' Words vs direct formula",
        max_err <= 1e-9 && vocab_mismatch == 0 && max_self < 1e-12 && asym == 0,
        format!(
            "100 corpora: max |dz| {max_err:.2e}, vocabulary mismatches {vocab_mismatch}, \
             identical-corpus max |z| {max_self:.2e}, antisymmetry breaks {asym}"
        ),
    );
}

/// 1-based midranks by counting.
fn midranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|v| {
            let less = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn two_sided(stats: &[f64], observed: f64) -> f64 {
    let total = stats.len() as f64;
    let le = stats.iter().filter(|&&s| s <= observed + 1e-9).count() as f64;
    let ge = stats.iter().filter(|&&s| s >= observed - 1e-9).count() as f64;
    (2.0 * le.min(ge) / total).min(1.0)
}

#[test]
fn c06_statistical_kernels() {
    let mut r = rng(6, 0);

    // Mann–Whitney: enumerate every split of the pooled sample.
    let mut mw_err = 0.0f64;
    let mut mw_u_bad = 0;
    let mut pairs_seen = BTreeSet::new();
    for i in 0..200usize {
        let (na, nb) = (i % 7 + 1, (i / 7) % 7 + 1);
        pairs_seen.insert((na, nb));
        let hi = [3, 9][r.gen_range(0..2)];
        let a: Vec<f64> = (0..na).map(|_| r.gen_range(0..=hi) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| r.gen_range(0..=hi) as f64).collect();
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        let ranks = midranks(&pooled);
        let n = pooled.len();
        let u_of = |mask: u32| {
            let rs: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| ranks[j]).sum();
            rs - (na * (na + 1)) as f64 / 2.0
        };
        let stats: Vec<f64> = (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == na)
            .map(u_of)
            .collect();
        let observed = u_of((1u32 << na) - 1);
        let got = mann_whitney_u(&a, &b).unwrap();
        if (got.statistic - observed).abs() > 1e-9 {
            mw_u_bad += 1;
        }
        mw_err = mw_err.max((got.p_value - two_sided(&stats, observed)).abs());
    }

    // Wilcoxon: enumerate every sign pattern of the nonzero differences.
    let mut wx_err = 0.0f64;
    for i in 0..240usize {
        let n = i % 12 + 1;
        let diffs: Vec<i64> = loop {
            let d: Vec<i64> = (0..n).map(|_| r.gen_range(-4..=4)).collect();
            if d.iter().any(|x| *x != 0) {
                break d;
            }
        };
        let pairs: Vec<(f64, f64)> = diffs.iter().map(|&d| (10.0 + d as f64, 10.0)).collect();
        let nz: Vec<i64> = diffs.into_iter().filter(|d| *d != 0).collect();
        let ranks = midranks(&nz.iter().map(|d| d.abs() as f64).collect::<Vec<_>>());
        let m = nz.len();
        let w_of = |mask: u32| -> f64 { (0..m).filter(|j| mask >> j & 1 == 1).map(|j| ranks[j]).sum() };
        let stats: Vec<f64> = (0u32..1 << m).map(w_of).collect();
        let observed: f64 = (0..m).filter(|&j| nz[j] > 0).map(|j| ranks[j]).sum();
        let got = wilcoxon_signed_rank(&pairs).unwrap();
        wx_err = wx_err.max((got.p_value - two_sided(&stats, observed)).abs());
        wx_err = wx_err.max((got.statistic - observed).abs());
    }

    // Sign test: exact binomial tail sums from Pascal's triangle.
    let mut sign_bad = 0;
    let mut row: Vec<u128> = vec![1];
    for n in 1..=40u64 {
        let mut next = vec![1u128; n as usize + 1];
        for k in 1..n as usize {
            next[k] = row[k - 1] + row[k];
        }
        row = next;
        let denom = (1u128 << n) as f64;
        for s in 0..=n {
            let upper: u128 = row[s as usize..].iter().sum();
            let lower: u128 = row[..=s as usize].iter().sum();
            let one = upper as f64 / denom;
            let two = (2.0 * (upper.min(lower) as f64 / denom)).min(1.0);
            if sign_test(s, n, Tail::One).unwrap().p_value != one
                || sign_test(s, n, Tail::Two).unwrap().p_value != two
            {
                sign_bad += 1;
            }
        }
    }
    let eight_of_ten = sign_test(8, 10, Tail::One).unwrap().p_value;

    // Cohen's kappa against the contingency-table formula.
    let mut kappa_err = 0.0f64;
    let mut tables = vec![vec![vec![20usize, 5], vec![10, 15]]];
    while tables.len() < 20 {
        let k = r.gen_range(2..=4);
        let t: Vec<Vec<usize>> = (0..k).map(|_| (0..k).map(|_| r.gen_range(0..=12)).collect()).collect();
        if t.iter().flatten().sum::<usize>() > 0 {
            tables.push(t);
        }
    }
    let mut first_kappa = f64::NAN;
    for (ti, t) in tables.iter().enumerate() {
        let k = t.len();
        let total: usize = t.iter().flatten().sum();
        let (mut la, mut lb) = (Vec::new(), Vec::new());
        for i in 0..k {
            for j in 0..k {
                for _ in 0..t[i][j] {
                    la.push(i);
                    lb.push(j);
                }
            }
        }
        let nf = total as f64;
        let po = (0..k).map(|i| t[i][i]).sum::<usize>() as f64 / nf;
        let pe: f64 = (0..k)
            .map(|i| {
                let row: usize = t[i].iter().sum();
                let col: usize = t.iter().map(|rw| rw[i]).sum();
                row as f64 * col as f64
            })
            .sum::<f64>()
            / (nf * nf);
        match cohens_kappa(&la, &lb) {
            Ok(kappa) => {
                if ti == 0 {
                    first_kappa = kappa;
                }
                if pe < 1.0 {
                    kappa_err = kappa_err.max((kappa - (po - pe) / (1.0 - pe)).abs());
                }
            }
            Err(_) => kappa_err = f64::INFINITY,
        }
    }

    let ok = pairs_seen.len() == 49
        && mw_u_bad == 0
        && mw_err <= 0.03
        && wx_err <= 0.03
        && sign_bad == 0
        && eight_of_ten == 0.0546875
        && (first_kappa - 0.4).abs() < 1e-12
        && kappa_err < 1e-12;
    verdict(
        "C6",
        "statistical kernels vs exact oracles",
        ok,
        format!(
            "MWU {} size pairs max |dp| {mw_err:.2e}; Wilcoxon max |dp| {wx_err:.2e}; \
             sign test mismatches {sign_bad}, 8-of-10 = {eight_of_ten}; kappa max err {kappa_err:.2e}",
            pairs_seen.len()
        ),
    );
}

#[test]
fn c07_bootstrap() {
    let normal = Normal::new(10.0, 3.0).unwrap();
    let sample: Vec<f64> = {
        let mut r = rng(7, 0);
        (0..40).map(|_| normal.sample(&mut r)).collect()
    };
    let first = bootstrap_ci(&sample, BootstrapStatistic::Mean, 0.95, 2000, 42).unwrap();
    let second = bootstrap_ci(&sample, BootstrapStatistic::Mean, 0.95, 2000, 42).unwrap();
    let identical = first.0.to_bits() == second.0.to_bits() && first.1.to_bits() == second.1.to_bits();

    let trials = 1000;
    let covered = (0..trials)
        .filter(|&t| {
            let mut r = rng(70, t);
            let x: Vec<f64> = (0..50).map(|_| normal.sample(&mut r)).collect();
            let (lo, hi) = bootstrap_ci(&x, BootstrapStatistic::Mean, 0.95, 1000, t).unwrap();
            lo <= 10.0 && 10.0 <= hi
        })
        .count();
    let coverage = covered as f64 / trials as f64;
    verdict(
        "C7",
        "bootstrap determinism and coverage",
        identical && (coverage - 0.95).abs() <= 0.03,
        format!("reruns identical: {identical}; coverage {covered}/{trials} = {coverage:.3}"),
    );
}

fn random_intervals(r: &mut ChaCha8Rng, n: usize, span: f64) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| {
            let a = r.gen_range(0.0..span);
            (a, a + r.gen_range(0.01..span / 4.0))
        })
        .collect()
}

#[test]
fn c08_interval_prf() {
    let mut r = rng(8, 0);
    let mut identical_bad = 0;
    let mut duality_err = 0.0f64;
    for _ in 0..1000 {
        let n_ref = r.gen_range(1..=8);
        let n_hyp = r.gen_range(1..=8);
        let reference = random_intervals(&mut r, n_ref, 100.0);
        let hypothesis = random_intervals(&mut r, n_hyp, 100.0);
        let same = interval_prf(&reference, &reference);
        if [same.precision, same.recall, same.f1].iter().any(|v| (v - 1.0).abs() > 1e-12) {
            identical_bad += 1;
        }
        let fwd = interval_prf(&reference, &hypothesis);
        let back = interval_prf(&hypothesis, &reference);
        duality_err = duality_err
            .max((fwd.precision - back.recall).abs())
            .max((fwd.recall - back.precision).abs());
    }

    // Millisecond sweep over small, self-overlapping inputs.
    let mut sweep_err = 0.0f64;
    for _ in 0..300 {
        let gen = |r: &mut ChaCha8Rng| -> Vec<(i64, i64)> {
            (0..r.gen_range(1..=6))
                .map(|_| {
                    let a = r.gen_range(0..1900);
                    (a, a + r.gen_range(1..=400))
                })
                .collect()
        };
        let rf = gen(&mut r);
        let hy = gen(&mut r);
        let covered = |set: &[(i64, i64)], t: i64| set.iter().any(|&(a, b)| a <= t && t < b);
        let (mut both, mut in_r, mut in_h) = (0i64, 0i64, 0i64);
        for t in 0..2400 {
            let (cr, ch) = (covered(&rf, t), covered(&hy, t));
            in_r += cr as i64;
            in_h += ch as i64;
            both += (cr && ch) as i64;
        }
        let p = both as f64 / in_h as f64;
        let rc = both as f64 / in_r as f64;
        let f1 = if p + rc > 0.0 { 2.0 * p * rc / (p + rc) } else { 0.0 };
        let secs = |s: &[(i64, i64)]| -> Vec<(f64, f64)> {
            s.iter().map(|&(a, b)| (a as f64 / 1000.0, b as f64 / 1000.0)).collect()
        };
        let got = interval_prf(&secs(&rf), &secs(&hy));
        sweep_err = sweep_err
            .max((got.precision - p).abs())
            .max((got.recall - rc).abs())
            .max((got.f1 - f1).abs());
    }
    verdict(
        "C8",
        "interval precision/recall/F1",
        identical_bad == 0 && duality_err <= 1e-12 && sweep_err <= 1e-9,
        format!(
            "identical-set failures {identical_bad}; duality max err {duality_err:.2e}; \
             per-ms sweep max err {sweep_err:.2e}"
        ),
    );
}

#[test]
fn c09_swap_symmetry() {
    let cfg = AnalysisConfig::default();
    let mut r = rng(9, 0);
    let mut broken = Vec::new();
    let mut windows = 0;
    for case in 0..500 {
        let mc = MsConv::random(&mut r, 2, 150_000, 1);
        let id = format!("d{case}");
        let orig = mc.to_conversation(&id, &["A", "B"]);
        let swapped = mc.to_conversation(&id, &["B", "A"]);
        let a = analyze(&orig, &cfg, Some("A")).unwrap();
        let b = analyze(&swapped, &cfg, Some("A")).unwrap();

        let flip = |l: Regime| match l {
            Regime::Blue => Regime::Red,
            Regime::Red => Regime::Blue,
            Regime::Gray => Regime::Gray,
        };
        let labels_ok = a.regimes.labels().into_iter().map(flip).collect::<Vec<_>>() == b.regimes.labels();
        windows += a.regimes.windows.len();
        let ok = labels_ok
            && a.composition.gray_frac.to_bits() == b.composition.gray_frac.to_bits()
            && a.composition.blue_frac.to_bits() == b.composition.red_frac.to_bits()
            && a.flips == b.flips
            && a.imbalance.value.to_bits() == b.imbalance.value.to_bits();
        if !ok {
            broken.push(case);
        }
    }
    verdict(
        "C9",
        "party swap symmetry",
        broken.is_empty(),
        format!("500 dyads, {windows} windows, {} broken {:?}", broken.len(), broken.iter().take(5).collect::<Vec<_>>()),
    );
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn fixture_reports() -> Vec<DynamicsReport> {
    let fixtures = [
        ("fixture-dominating", vec![seg(600.0, SegmentRegime::PrimaryLed(0.85))], 1),
        ("fixture-balanced", vec![seg(600.0, SegmentRegime::Balanced)], 2),
        ("fixture-alternating", alternating(true, 4), 3),
    ];
    fixtures
        .into_iter()
        .map(|(id, segments, seed)| {
            let conv = synthesize(&Blueprint::new(segments, seed).with_id(id)).unwrap();
            analyze(&conv, &AnalysisConfig::default(), None).unwrap()
        })
        .collect()
}

#[test]
fn c10_rendering() {
    let style = StripStyle::default();
    let reports = fixture_reports();
    let mut outputs: Vec<(String, String)> = Vec::new();
    let mut problems = Vec::new();

    for rep in &reports {
        let strip = render_strip(rep, &style);
        match roxmltree::Document::parse(&strip) {
            Ok(doc) => {
                let rects = doc.descendants().filter(|n| n.has_tag_name("rect")).count();
                if rects != rep.regimes.windows.len() {
                    problems.push(format!("{}: {rects} rects for {} windows", rep.id, rep.regimes.windows.len()));
                }
            }
            Err(e) => problems.push(format!("{} strip: {e}", rep.id)),
        }
        if render_strip(rep, &style) != strip {
            problems.push(format!("{} strip not reproducible", rep.id));
        }
        let pie = render_pie(&rep.composition, &style);
        if let Err(e) = roxmltree::Document::parse(&pie) {
            problems.push(format!("{} pie: {e}", rep.id));
        }
        if render_pie(&rep.composition, &style) != pie {
            problems.push(format!("{} pie not reproducible", rep.id));
        }
        outputs.push((format!("strip_{}.svg", rep.id), strip));
        outputs.push((format!("pie_{}.svg", rep.id), pie));
    }
    let grid = render_corpus_grid(&reports, GridSort::ImbalanceDesc, &style);
    match roxmltree::Document::parse(&grid) {
        Ok(doc) => {
            let rects = doc.descendants().filter(|n| n.has_tag_name("rect")).count();
            let total: usize = reports.iter().map(|r| r.regimes.windows.len()).sum();
            if rects != total {
                problems.push(format!("grid: {rects} rects for {total} windows"));
            }
        }
        Err(e) => problems.push(format!("grid: {e}")),
    }
    outputs.push(("grid.svg".into(), grid));

    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let dir = golden_dir();
    if update {
        std::fs::create_dir_all(&dir).unwrap();
    }
    for (name, svg) in &outputs {
        let path = dir.join(name);
        if update {
            std::fs::write(&path, svg).unwrap();
        } else {
            match std::fs::read_to_string(&path) {
                Ok(golden) if golden == *svg => {}
                Ok(_) => problems.push(format!("{name} differs from golden")),
                Err(e) => problems.push(format!("{name}: {e}")),
            }
        }
    }
    verdict(
        "C10",
        "SVG rendering",
        problems.is_empty(),
        if problems.is_empty() {
            format!("{} files well-formed, reproducible, and equal to golden", outputs.len())
        } else {
            problems.join("; ")
        },
    );
}

const COURT_CONFIG: &str = r#"{
    "window": {"k_seconds": 120, "l_seconds": 30},
    "stereotypes": {"gray_min": 0.4, "red_min": 0.4, "blue_min": 0.7}
}"#;

const COURT_ROLES: &str = r#"{
    "parties": {"L1": "lawyers", "L2": "lawyers", "J1": "justices", "J2": "justices"},
    "thresholds": {"lawyers": 0.8, "justices": 0.4},
    "expected_primary": "lawyers"
}"#;

fn court_setup() -> (AnalysisConfig, RoleMap) {
    let mut cfg = AnalysisConfig::from_json_str(COURT_CONFIG).unwrap();
    let roles = RoleMap::from_json_str(COURT_ROLES).unwrap();
    roles.apply_thresholds(&mut cfg.window);
    (cfg, roles)
}

fn court_analyze(id: &str, utts: Vec<Utterance>, duration: f64) -> DynamicsReport {
    let (cfg, roles) = court_setup();
    let conv = roles.apply(Conversation::new(id, utts).with_duration(duration));
    analyze(&conv, &cfg, roles.expected_primary.as_deref()).unwrap()
}

/// 30-second blocks in which the lawyers hold the given fraction.
fn court_blocks(id: &str, lawyer_fracs: &[f64]) -> DynamicsReport {
    let mut utts = Vec::new();
    for (i, &f) in lawyer_fracs.iter().enumerate() {
        let t0 = 30.0 * i as f64;
        if f > 0.0 {
            utts.push(Utterance::new("L1", t0, t0 + 30.0 * f));
        }
        if f < 1.0 {
            utts.push(Utterance::new("J1", t0 + 30.0 * f, t0 + 30.0));
        }
    }
    court_analyze(id, utts, 30.0 * lawyer_fracs.len() as f64)
}

#[test]
fn c11_court_mode() {
    let mut problems = Vec::new();

    // Single 120 s windows: (speaker, seconds) laid out back to back.
    let single = |id: &str, parts: &[(&str, f64)]| {
        let mut t = 0.0;
        let utts = parts
            .iter()
            .map(|&(s, len)| {
                let u = Utterance::new(s, t, t + len);
                t += len;
                u
            })
            .collect();
        court_analyze(id, utts, 120.0)
    };
    let cases = [
        // lawyers 0.75 (not above 0.80), justices 0.25 (not above 0.40)
        ("w-gray", single("w-gray", &[("L1", 90.0), ("J1", 20.0), ("J2", 10.0)]), Regime::Gray, None, 0.75),
        // justices 0.45 clear their 0.40 bar; lawyers 0.55 do not clear 0.80
        ("w-red", single("w-red", &[("L1", 66.0), ("J1", 30.0), ("J2", 24.0)]), Regime::Red, Some("justices"), 0.45),
        // lawyers 0.90 across two speakers
        ("w-blue", single("w-blue", &[("L1", 60.0), ("J1", 12.0), ("L2", 48.0)]), Regime::Blue, Some("lawyers"), 0.9),
    ];
    for (id, rep, label, dominant, fraction) in &cases {
        let w = &rep.regimes.windows;
        if w.len() != 1
            || w[0].label != *label
            || w[0].dominant_party.as_deref() != *dominant
            || (w[0].dominance_fraction - fraction).abs() > 1e-12
        {
            problems.push(format!("{id}: got {:?}", w.first().map(|w| (w.label, &w.dominant_party, w.dominance_fraction))));
        }
    }

    // Window shares by hand: lawyers 1, 7/8, 3/4, 5/8, 1/2 → B B G G R,
    // i.e. blue 0.4, red 0.2, gray 0.4: no cut is strictly exceeded.
    let boundary = court_blocks("boundary", &[1.0, 1.0, 1.0, 1.0, 0.5, 0.5, 0.5, 0.5]);
    let letters: String = boundary.regimes.labels().iter().map(|l| l.letter()).collect();
    if letters != "BBGGR" || boundary.stereotype != Stereotype::Other {
        problems.push(format!("boundary: {letters} {}", boundary.stereotype));
    }
    for (id, frac, expect) in [
        ("all-blue", 0.9, Stereotype::DominatingThroughout),
        ("all-gray", 0.7, Stereotype::BackAndForth),
        ("all-red", 0.5, Stereotype::AlternatingDominance),
    ] {
        let rep = court_blocks(id, &[frac; 8]);
        if rep.stereotype != expect {
            problems.push(format!("{id}: {}", rep.stereotype));
        }
    }

    // 20 cases: shares below are computed by hand.
    let mut rows = Vec::new();
    let mut add = |s: Stereotype, wins: usize, losses: usize| {
        rows.extend(std::iter::repeat_n((s, Some("win".to_string())), wins));
        rows.extend(std::iter::repeat_n((s, Some("loss".to_string())), losses));
    };
    add(Stereotype::DominatingThroughout, 5, 3);
    add(Stereotype::AlternatingDominance, 2, 4);
    add(Stereotype::BackAndForth, 3, 1);
    add(Stereotype::Other, 0, 2);
    assert_eq!(rows.len(), 20);
    let expected = [
        (Stereotype::DominatingThroughout, 8, 0.625, false),
        (Stereotype::BackAndForth, 4, 0.75, true),
        (Stereotype::AlternatingDominance, 6, 1.0 / 3.0, false),
        (Stereotype::Other, 2, 0.0, true),
    ];
    let table = crosstab(&rows, 5);
    let table_ok = table.len() == 4
        && expected.iter().all(|(key, n, win, sparse)| {
            table.iter().any(|row| {
                row.key == *key
                    && row.n == *n
                    && row.sparse == *sparse
                    && (row.shares["win"] - win).abs() < 1e-12
                    && (row.shares["loss"] - (1.0 - win)).abs() < 1e-12
            })
        });
    if !table_ok {
        problems.push(format!("crosstab: {table:?}"));
    }

    verdict(
        "C11",
        "court-mode thresholds and outcome crosstab",
        problems.is_empty(),
        if problems.is_empty() {
            "3 window fixtures, 4 classification fixtures, 20-case crosstab match".to_string()
        } else {
            problems.join("; ")
        },
    );
}

/// Runs only when a local copy of the corpus is available:
/// `TALKSHARE_CORPUS_TRANSCRIPTS` (CSV/JSONL), optionally
/// `TALKSHARE_CORPUS_SURVEY` and `TALKSHARE_CORPUS_FIGURE_ID`.
#[test]
fn c12_corpus_numbers() {
    let Some(transcripts) = std::env::var_os("TALKSHARE_CORPUS_TRANSCRIPTS") else {
        println!("[SKIP] C12 corpus numbers: TALKSHARE_CORPUS_TRANSCRIPTS not set");
        return;
    };
    let path = PathBuf::from(transcripts);
    let convs = parse_transcripts(&path, TranscriptFormat::from_path(&path)).unwrap();
    let cfg = AnalysisConfig::default();
    let reports: Vec<DynamicsReport> = convs.iter().filter_map(|c| analyze(c, &cfg, None).ok()).collect();
    let values: Vec<f64> = reports.iter().map(|r| r.imbalance.value).collect();
    let q = |p: f64| talkshare::stats::quantile(&values, p).unwrap();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let (median, p25, p75) = (q(0.5), q(0.25), q(0.75));
    let mut problems = Vec::new();
    for (name, got, want) in [("mean", mean, 0.63), ("median", median, 0.62), ("p25", p25, 0.55), ("p75", p75, 0.69)] {
        if (got - want).abs() > 0.01 {
            problems.push(format!("{name} {got:.4} vs {want}"));
        }
    }

    if let Ok(fig) = std::env::var("TALKSHARE_CORPUS_FIGURE_ID") {
        match reports.iter().find(|r| r.id == fig) {
            Some(r) if (r.imbalance.value - 0.51).abs() <= 0.01 && r.flips == 8 => {}
            Some(r) => problems.push(format!("{fig}: imbalance {:.4}, flips {}", r.imbalance.value, r.flips)),
            None => problems.push(format!("{fig} not analyzed")),
        }
    }

    if let Some(survey) = std::env::var_os("TALKSHARE_CORPUS_SURVEY") {
        let records = parse_survey(PathBuf::from(survey), 9).unwrap();
        let by_id: BTreeMap<&str, f64> = reports.iter().map(|r| (r.id.as_str(), r.imbalance.value)).collect();
        let pct_max = |keep: &dyn Fn(f64) -> bool| {
            let group: Vec<u32> = records
                .iter()
                .filter(|rec| by_id.get(rec.conversation_id.as_str()).is_some_and(|v| keep(*v)))
                .map(|rec| rec.enjoyment)
                .collect();
            100.0 * group.iter().filter(|&&e| e == 9).count() as f64 / group.len() as f64
        };
        let balanced = pct_max(&|v| v <= p25);
        let imbalanced = pct_max(&|v| v >= p75);
        if (balanced - 31.8).abs() > 0.5 || (imbalanced - 25.3).abs() > 0.5 {
            problems.push(format!("pct-max {balanced:.2}% vs {imbalanced:.2}%"));
        }
    }

    verdict(
        "C12",
        "corpus numbers",
        problems.is_empty(),
        format!(
            "{} conversations: mean {mean:.3}, median {median:.3}, p25 {p25:.3}, p75 {p75:.3} {}",
            reports.len(),
            problems.join("; ")
        ),
    );
}
