//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed; exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{code_dimension, exhaustive_dmin, factorial, fixture, random_int_matrix, random_poly_matrix, random_weight_matrix};
use qcdist::bound::{bound_eq1, run_chunked, subset_term, subset_term_augmented, Form, SearchOptions, Status, WeightKernel};
use qcdist::combinatorics::{binomial, rank, unrank, SubsetCursor};
use qcdist::construct::{cramer_codeword, refined_bound};
use qcdist::permanent::{benchmark, means, perm_brute, Engine, IntMatrix};
use qcdist::qc::WeightMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn fixture_bound(name: &str) -> Option<u128> {
    bound_eq1(&fixture(name).0.weight_matrix(), &BTreeSet::new(), Form::Sum).unwrap().bound
}

fn show(v: Option<u128>) -> String {
    v.map_or_else(|| "none".into(), |b| b.to_string())
}

fn ieee802153c_bound() -> Outcome {
    let a = WeightMatrix::filled(1, 15, 3);
    let start = Instant::now();
    let r = bound_eq1(&a, &BTreeSet::new(), Form::Sum).unwrap();
    let spent = start.elapsed();
    let from_fixture = fixture_bound("802153c_r14_15.qcmat");
    outcome(
        r.bound == Some(6) && from_fixture == Some(6) && spent < Duration::from_secs(1),
        format!("bound {} (fixture {}) in {:.4}s; want 6 in < 1s", show(r.bound), show(from_fixture), spent.as_secs_f64()),
    )
}

fn ieee80211ad_bounds() -> Outcome {
    let cases = [("1/2", "80211ad_r1_2.qcmat", 19), ("5/8", "80211ad_r5_8.qcmat", 14), ("3/4", "80211ad_r3_4.qcmat", 13), ("13/16", "80211ad_r13_16.qcmat", 8)];
    let mut pass = true;
    let mut parts = Vec::new();
    for (rate, file, want) in cases {
        let got = fixture_bound(file);
        pass &= got == Some(want);
        parts.push(format!("{rate}: {} (want {want})", show(got)));
    }
    outcome(pass, parts.join(", "))
}

fn ieee80211n_bounds() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (rate, file, want) in [("3/4", "80211n_1944_r3_4.qcmat", 17), ("5/6", "80211n_1944_r5_6.qcmat", 14)] {
        let got = fixture_bound(file);
        pass &= got == Some(want);
        parts.push(format!("{rate}: {} (want {want})", show(got)));
    }
    // extended rates: a checkpointed prefix resumed across three invocations
    // must equal the same prefix run straight through
    let dir = tempfile::tempdir().unwrap();
    for (rate, file, prefix) in [("1/2", "80211n_1944_r1_2.qcmat", 3000), ("2/3", "80211n_1944_r2_3.qcmat", 30_000)] {
        let a = fixture(file).0.weight_matrix();
        let kernel = WeightKernel::new(&a, &BTreeSet::new(), Form::Augmented).unwrap();
        let straight = run_chunked(&kernel, &SearchOptions { budget: Some(prefix), workers: 4, ..Default::default() }).unwrap();
        let path = dir.path().join(format!("{}.json", file));
        let base = SearchOptions {
            budget: Some(prefix),
            workers: 4,
            chunk_size: 17,
            checkpoint: Some(path),
            halt_after: Some(prefix / 3),
            ..Default::default()
        };
        let mut r = run_chunked(&kernel, &base).unwrap();
        let mut invocations = 1;
        while r.subsets_evaluated < prefix {
            r = run_chunked(&kernel, &SearchOptions { resume: true, ..base.clone() }).unwrap();
            invocations += 1;
        }
        let same = r == straight && r.status == Status::Partial && invocations >= 3;
        pass &= same;
        parts.push(format!(
            "{rate}: resumed prefix of {prefix}/{} {} ({invocations} runs, running min {})",
            straight.total_subsets,
            if same { "matches" } else { "DIFFERS" },
            show(r.bound)
        ));
    }
    outcome(pass, parts.join(", "))
}

fn forms_agree() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE1);
    let (mut subsets, mut bad, mut raised) = (0u64, 0u64, 0u64);
    for _ in 0..1000 {
        let j = rng.random_range(1..=6);
        let l = rng.random_range(j + 1..=12);
        let a = random_weight_matrix(&mut rng, j, l, 3);
        let k = rng.random_range(1..=l);
        let punctured: BTreeSet<usize> = rand::seq::index::sample(&mut rng, l, k).into_iter().collect();
        let mut cursor = SubsetCursor::at(0, l, j + 1).unwrap();
        loop {
            let s = cursor.members();
            let plain = subset_term_augmented(&a, s, &BTreeSet::new()).unwrap();
            bad += (subset_term(&a, s).unwrap() != plain) as u64;
            raised += (subset_term_augmented(&a, s, &punctured).unwrap() > plain) as u64;
            subsets += 1;
            if !cursor.advance() {
                break;
            }
        }
    }
    outcome(
        bad == 0 && raised == 0,
        format!("1000 matrices, {subsets} subsets: {bad} form mismatches, {raised} punctured terms above unpunctured"),
    )
}

fn permanent_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xE2);
    let mut disagreements = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=10);
        let density = rng.random_range(0.2..1.0);
        let m = random_int_matrix(&mut rng, n, 3, density);
        let want = perm_brute(&m.view().unwrap()).unwrap();
        for e in Engine::IMPLEMENTED {
            disagreements += (e.compute(&mut m.view().unwrap()).unwrap() != want) as u32;
        }
    }
    let mut factorial_misses = 0;
    for n in 0..=12u32 {
        let m = IntMatrix::filled(n as usize, n as usize, 1);
        for e in [Engine::Recursive, Engine::Ryser, Engine::RyserGray, Engine::NijenhuisWilf] {
            factorial_misses += (e.compute(&mut m.view().unwrap()).unwrap().get() != factorial(n)) as u32;
        }
        if n <= 10 {
            factorial_misses += (perm_brute(&m.view().unwrap()).unwrap().get() != factorial(n)) as u32;
        }
    }
    let mut invariance = 0;
    for _ in 0..300 {
        let n = rng.random_range(1..=12);
        let m = random_int_matrix(&mut rng, n, 3, 0.4);
        let mut rp: Vec<usize> = (0..n).collect();
        let mut cp = rp.clone();
        rp.shuffle(&mut rng);
        cp.shuffle(&mut rng);
        let p = Engine::NijenhuisWilf.compute(&mut m.view().unwrap()).unwrap();
        let q = Engine::NijenhuisWilf.compute(&mut m.permuted(&rp, &cp).view().unwrap()).unwrap();
        let t = Engine::Recursive.compute(&mut m.transpose().view().unwrap()).unwrap();
        invariance += (p != q || p != t) as u32;
    }
    outcome(
        disagreements + factorial_misses + invariance == 0,
        format!(
            "{disagreements} engine disagreements on 1000 matrices, {factorial_misses} n! misses for n <= 12, {invariance} invariance violations on 300"
        ),
    )
}

fn soundness() -> Outcome {
    const MAX_DIM: usize = 24;
    let mut rng = ChaCha8Rng::seed_from_u64(0xE3);
    let (mut codes, mut violations, mut unverified, mut sandwiches) = (0, 0, 0, 0);
    while codes < 200 {
        let j = rng.random_range(1..=3);
        let l = rng.random_range(j + 1..=6);
        let n = rng.random_range(1..=6);
        let h = random_poly_matrix(&mut rng, j, l, n, 2);
        if code_dimension(&h) > MAX_DIM {
            continue;
        }
        codes += 1;
        let dmin = exhaustive_dmin(&h, MAX_DIM).map(|d| d as u128);
        let eq1 = bound_eq1(&h.weight_matrix(), &BTreeSet::new(), Form::Sum).unwrap().bound;
        let refined = refined_bound(&h, None, &SearchOptions::default()).unwrap().0.bound;
        let mut cursor = SubsetCursor::at(0, l, j + 1).unwrap();
        let expanded = h.expand();
        loop {
            if let Some(c) = cramer_codeword(&h, cursor.members()).unwrap() {
                unverified += (!c.verified || !c.verify_binary(&expanded).unwrap()) as u32;
            }
            if !cursor.advance() {
                break;
            }
        }
        let le = |a: Option<u128>, b: Option<u128>| match (a, b) {
            (Some(x), Some(y)) => x <= y,
            _ => true,
        };
        violations += (!le(dmin, refined) || !le(refined, eq1) || !le(dmin, eq1)) as u32;
        violations += (refined.is_some() && (dmin.is_none() || eq1.is_none())) as u32;
        sandwiches += (dmin.is_some() && refined.is_some() && eq1.is_some()) as u32;
    }
    outcome(
        violations == 0 && unverified == 0 && sandwiches > 0,
        format!("{codes} codes ({sandwiches} with all three defined): {violations} order violations, {unverified} unverified codewords"),
    )
}

fn rank_unrank() -> Outcome {
    let mut failures = 0u64;
    let mut pairs = 0u64;
    for l in 0..=12 {
        for k in 0..=l {
            let mut prev: Option<Vec<usize>> = None;
            for r in 0..binomial(l, k).unwrap() {
                let s = unrank(r, l, k).unwrap();
                failures += (rank(&s, l).unwrap() != r) as u64;
                failures += prev.as_ref().is_some_and(|p| p >= &s) as u64;
                prev = Some(s);
                pairs += 1;
            }
            failures += unrank(binomial(l, k).unwrap(), l, k).is_ok() as u64;
        }
    }
    let last = unrank(binomial(24, 13).unwrap() - 1, 24, 13).unwrap();
    let last_ok = last == (11..24).collect::<Vec<_>>();
    outcome(
        failures == 0 && last_ok,
        format!("{pairs} ranks for L <= 12 with {failures} failures; unrank(C(24,13)-1, 24, 13) = {last:?}"),
    )
}

fn determinism() -> Outcome {
    let a = fixture("80211ad_r1_2.qcmat").0.weight_matrix();
    let kernel = WeightKernel::new(&a, &BTreeSet::new(), Form::Sum).unwrap();
    let reference = run_chunked(&kernel, &SearchOptions::default()).unwrap();
    let mut pass = reference.bound == Some(19);
    for workers in [1, 4] {
        for chunk_size in [1, 1000] {
            pass &= run_chunked(&kernel, &SearchOptions { workers, chunk_size, ..Default::default() }).unwrap() == reference;
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ckpt.json");
    let first = SearchOptions { workers: 4, chunk_size: 250, checkpoint: Some(path), halt_after: Some(5000), ..Default::default() };
    let killed = run_chunked(&kernel, &first).unwrap();
    pass &= killed.status == Status::Partial;
    let resumed = run_chunked(&kernel, &SearchOptions { resume: true, halt_after: None, workers: 1, ..first }).unwrap();
    pass &= resumed == reference;
    outcome(
        pass,
        format!(
            "bound {} argmin {:?} across workers {{1,4}} x chunks {{1,1000}}; halted at {} and resumed to {}",
            show(reference.bound),
            reference.argmin_subset.unwrap_or_default(),
            killed.subsets_evaluated,
            show(resumed.bound)
        ),
    )
}

fn benchmark_weight_four() -> Outcome {
    let orders = [10, 14, 18, 22];
    let engines = [Engine::Recursive, Engine::Ryser, Engine::RyserGray, Engine::NijenhuisWilf];
    let records = benchmark(&engines, &orders, 4, 5, 2).unwrap();
    let mean = |e: Engine, o: usize| means(&records).into_iter().find(|m| m.0 == e && m.1 == o).unwrap().3;
    let top = *orders.last().unwrap();
    let fastest_ryser = [Engine::Ryser, Engine::RyserGray, Engine::NijenhuisWilf]
        .into_iter()
        .map(|e| mean(e, top))
        .fold(f64::INFINITY, f64::min);
    let rec = mean(Engine::Recursive, top);
    let series: Vec<String> = orders
        .iter()
        .map(|&o| format!("n={o} rec {:.2e}s nw {:.2e}s", mean(Engine::Recursive, o), mean(Engine::NijenhuisWilf, o)))
        .collect();
    outcome(
        rec > fastest_ryser,
        format!("at order {top}: recursive {rec:.3e}s vs fastest Ryser-family {fastest_ryser:.3e}s [{}]", series.join("; ")),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("802.15.3c rate 14/15 all-3s bound", ieee802153c_bound),
        ("802.11ad weight-matrix bounds", ieee80211ad_bounds),
        ("802.11n weight-matrix bounds and resumable extended rates", ieee80211n_bounds),
        ("sum and augmented forms agree; puncturing never raises", forms_agree),
        ("permanent oracle suite", permanent_oracles),
        ("soundness sandwich d_min <= refined <= weight bound", soundness),
        ("rank/unrank bijection", rank_unrank),
        ("scheduler determinism and kill/resume", determinism),
        ("weight-4 benchmark: recursive slower than Ryser family", benchmark_weight_four),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        println!(
            "{} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        failed += !o.pass as usize;
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
