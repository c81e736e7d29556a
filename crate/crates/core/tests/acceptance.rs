//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bigram_blocks::blockmodel::{
    adjusted_rand_index, block_inconsistency, brute_force, criterion, local_search,
    random_partition, BlockSpec, BlockType, Measure, Partition,
};
use bigram_blocks::ngram::{build_bigrams, BigramNetwork, WeightMode};
use bigram_blocks::pipeline::{scan_tree, Overrides, Pipeline, PipelineConfig};
use bigram_blocks::preprocess::{correct, edits1_raw, LanguageModel, MaxEdit};
use bigram_blocks::subnet::{default_keyword_sets, kcore_reduce, match_seeds, Subnetwork};
use bigram_blocks::SquareMatrix;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, max: u32) -> SquareMatrix {
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = f64::from(rng.gen_range(0..=max));
        }
    }
    m
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut matched, mut beaten) = (0, 0);
    let started = Instant::now();
    for instance in 0..100u64 {
        let n = rng.gen_range(5..=8);
        let k = rng.gen_range(2..=3);
        let m = random_matrix(&mut rng, n, 9);
        let spec = BlockSpec::null_complete(k).unwrap();
        let exact = brute_force(&m, &spec).unwrap().criterion;
        let found = local_search(&m, &spec, 100, instance).unwrap().criterion;
        if close(found, exact, 1e-9) {
            matched += 1;
        } else if found < exact {
            beaten += 1;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(
        matched >= 95 && beaten == 0,
        format!("{matched}/100 match brute force, {beaten} below it, {secs:.1}s"),
    )
}

/// Core, semiperiphery and periphery of sizes 8, 10, 12. Core-core cells are
/// drawn from 4..=6; blocks pairing the semiperiphery with itself or the core
/// from 1..=3; every other cell is 0. 5% of off-diagonal cells get ±1, clamped at 0.
fn planted(rng: &mut ChaCha8Rng) -> (SquareMatrix, Vec<usize>) {
    let sizes = [8, 10, 12];
    let mut truth: Vec<usize> = sizes.iter().enumerate().flat_map(|(c, &s)| vec![c; s]).collect();
    truth.shuffle(rng);
    let n = truth.len();
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            m[(i, j)] = match (truth[i], truth[j]) {
                (0, 0) => f64::from(rng.gen_range(4..=6)),
                (0, 1) | (1, 0) | (1, 1) => f64::from(rng.gen_range(1..=3)),
                _ => 0.0,
            };
            if rng.gen_bool(0.05) {
                let delta = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                m[(i, j)] = (m[(i, j)] + delta).max(0.0);
            }
        }
    }
    (m, truth)
}

fn planted_recovery() -> Outcome {
    let spec = BlockSpec::null_complete(3).unwrap();
    let started = Instant::now();
    let mut exact = 0;
    for run in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + run);
        let (m, truth) = planted(&mut rng);
        let found = local_search(&m, &spec, 50, run).unwrap();
        if adjusted_rand_index(found.partition.assignment(), &truth) == 1.0 {
            exact += 1;
        }
    }
    let secs = started.elapsed().as_secs_f64();
    outcome(exact >= 18, format!("{exact}/20 runs with ARI 1.0, {secs:.1}s"))
}

fn criterion_arithmetic() -> Outcome {
    let ss = Measure::SumOfSquares;
    let mut fails = Vec::new();
    if block_inconsistency(&[2.0, 2.0, 4.0, 4.0], BlockType::Complete, ss) != (4.0, 3.0) {
        fails.push("{2,2,4,4}");
    }
    if block_inconsistency(&[0.0, 0.0, 3.0], BlockType::Null, ss).0 != 9.0 {
        fails.push("{0,0,3}");
    }
    if block_inconsistency(&[], BlockType::Complete, ss).0 != 0.0 {
        fails.push("{}");
    }
    let m = SquareMatrix::from_rows(&[vec![0.0, 5.0], vec![5.0, 0.0]]).unwrap();
    let fit = criterion(
        &m,
        &Partition::new(vec![0, 1], 2).unwrap(),
        &BlockSpec::null_complete(2).unwrap(),
    )
    .unwrap();
    if fit.criterion != 0.0 || fit.block_types[0][1] != BlockType::Complete {
        fails.push("2x2");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut identity_fails = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(1..=40);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let m = len as f64;
        let sum: f64 = xs.iter().sum();
        let mean = sum / m;
        let definitional: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        let algebraic = xs.iter().map(|x| x * x).sum::<f64>() - sum * sum / m;
        let (score, _) = block_inconsistency(&xs, BlockType::Complete, ss);
        if !close(definitional, algebraic, 1e-9) || !close(score, definitional, 1e-9) {
            identity_fails += 1;
        }
    }
    outcome(
        fails.is_empty() && identity_fails == 0,
        format!("hand examples failing: {fails:?}; identity mismatches: {identity_fails}/1000"),
    )
}

fn bigram_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let alphabet = ["a", "b", "c", "d", "e"];
    let mut mismatches = 0;
    let sequence = |rng: &mut ChaCha8Rng| -> Vec<String> {
        let len = rng.gen_range(0..=50);
        (0..len).map(|_| alphabet[rng.gen_range(0..5)].to_owned()).collect()
    };
    for trial in 0..1000 {
        let docs = if trial % 2 == 0 { 1 } else { rng.gen_range(2..=4) };
        let corpus: Vec<(String, Vec<String>)> =
            (0..docs).map(|d| (format!("d{d}"), sequence(&mut rng))).collect();
        let mut expected: BTreeMap<(String, String), f64> = BTreeMap::new();
        let mut nodes = BTreeSet::new();
        for (_, tokens) in &corpus {
            nodes.extend(tokens.iter().cloned());
            for i in 1..tokens.len() {
                *expected.entry((tokens[i - 1].clone(), tokens[i].clone())).or_default() += 1.0;
            }
        }
        let net = build_bigrams(&corpus);
        if net.edges != expected || net.nodes != nodes {
            mismatches += 1;
        }
    }
    let boundary = build_bigrams(&[
        ("x".to_owned(), vec!["a", "b"]),
        ("y".to_owned(), vec!["c", "d"]),
    ]);
    let boundary_ok = boundary.weight("b", "c").is_none() && boundary.edge_count() == 2;
    let summed = build_bigrams(&[("x".to_owned(), vec!["a", "b"]), ("y".to_owned(), vec!["a", "b"])]);
    let summed_ok = summed.weight("a", "b") == Some(2.0);
    outcome(
        mismatches == 0 && boundary_ok && summed_ok,
        format!(
            "{mismatches}/1000 mismatches; no cross-boundary pair: {boundary_ok}; cross-document sum: {summed_ok}"
        ),
    )
}

/// Repeatedly deletes every node of degree below k; returns the survivors.
fn peel(adj: &[BTreeSet<usize>], k: usize) -> BTreeSet<usize> {
    let mut alive: BTreeSet<usize> = (0..adj.len()).collect();
    loop {
        let doomed: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&v| adj[v].iter().filter(|u| alive.contains(u)).count() < k)
            .collect();
        if doomed.is_empty() {
            return alive;
        }
        for v in doomed {
            alive.remove(&v);
        }
    }
}

fn kcore_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut mismatches, mut fallbacks) = (0, 0);
    for _ in 0..200 {
        let n = rng.gen_range(1..=300);
        let p = rng.gen_range(0.0..(8.0 / n as f64).min(1.0));
        let label = |i: usize| format!("w{i:03}");
        let mut net = BigramNetwork::empty(WeightMode::Count);
        let mut adj = vec![BTreeSet::new(); n];
        for i in 0..n {
            net.nodes.insert(label(i));
            for j in 0..n {
                if rng.gen_bool(p) {
                    net.edges.insert((label(i), label(j)), 1.0);
                    if i != j {
                        adj[i].insert(j);
                        adj[j].insert(i);
                    }
                }
            }
        }
        let min_nodes = rng.gen_range(1..=n.max(2));
        let mut chosen = None;
        for k in 1.. {
            let core = peel(&adj, k);
            if core.is_empty() {
                break;
            }
            if core.len() >= min_nodes {
                chosen = Some(core);
            }
        }
        let expected = chosen.unwrap_or_else(|| {
            fallbacks += 1;
            peel(&adj, 1)
        });
        let expected: BTreeSet<String> = expected.into_iter().map(label).collect();
        let sub = Subnetwork {
            network: net,
            seeds: BTreeSet::new(),
            steps: Vec::new(),
        };
        if kcore_reduce(&sub, min_nodes).network.nodes != expected {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0 && fallbacks > 0,
        format!("{mismatches}/200 mismatches, {fallbacks} instances used the 1-core fallback"),
    )
}

/// Every string one deletion, transposition, replacement or insertion away,
/// with repeats, built position by position.
fn enumerate_edits(word: &str, alphabet: &[char]) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let mut out = Vec::new();
    for skip in 0..n {
        out.push(chars.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, c)| c).collect());
    }
    for i in 0..n.saturating_sub(1) {
        let mut c = chars.clone();
        c.swap(i, i + 1);
        out.push(c.into_iter().collect());
    }
    for i in 0..n {
        for &a in alphabet {
            let mut c = chars.clone();
            c[i] = a;
            out.push(c.into_iter().collect());
        }
    }
    for i in 0..=n {
        for &a in alphabet {
            let mut c = chars.clone();
            c.insert(i, a);
            out.push(c.into_iter().collect());
        }
    }
    out
}

fn spell_contract() -> Outcome {
    let lm = |pairs: &[(&str, u64)]| {
        LanguageModel::from_counts(pairs.iter().map(|&(w, c)| (w.to_owned(), c)).collect())
    };
    let mut fails = Vec::new();

    let model = lm(&[("guerra", 50), ("guerre", 40), ("russia", 30), ("zar", 5)]);
    for word in ["guerra", "guerre", "russia", "zar"] {
        if correct(word, &model, MaxEdit::Two) != word {
            fails.push(format!("{word} not a fixed point"));
        }
    }
    if correct("gera", &lm(&[("gera", 1), ("guera", 1000)]), MaxEdit::Two) != "gera" {
        fails.push("distance 0 lost to distance 1".into());
    }
    if correct("guera", &lm(&[("guerra", 1), ("guerrra", 1000)]), MaxEdit::Two) != "guerra" {
        fails.push("distance 1 lost to distance 2".into());
    }
    if correct("gurea", &lm(&[("guerra", 1)]), MaxEdit::Two) != "guerra" {
        fails.push("distance 2 not reached".into());
    }
    if correct("gurea", &lm(&[("guerra", 1)]), MaxEdit::One) != "gurea" {
        fails.push("distance 2 used under max_edit 1".into());
    }

    let ascii: Vec<char> = ('a'..='z').collect();
    let got = edits1_raw("at", &ascii);
    let mut expected = enumerate_edits("at", &ascii);
    let mut sorted = got.clone();
    sorted.sort();
    expected.sort();
    if got.len() != 133 || sorted != expected {
        fails.push(format!("edits1(\"at\") has {} candidates", got.len()));
    }
    outcome(fails.is_empty(), format!("edits1(\"at\") = {} candidates; failures: {fails:?}", got.len()))
}

fn run_tree(config: &Path, out: &Path, threads: usize) -> BTreeMap<String, String> {
    let mut c = PipelineConfig::load(config).unwrap();
    c.apply(&Overrides {
        output: Some(out.to_path_buf()),
        ..Default::default()
    });
    let pipeline = Pipeline::new(c).unwrap();
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(|| pipeline.run())
        .unwrap();
    let mut files: BTreeMap<String, String> =
        scan_tree(out).unwrap().into_iter().map(|f| (f.path, f.sha256)).collect();
    let manifest = bigram_blocks::pipeline::sha256_file(&out.join("manifest.json")).unwrap().1;
    files.insert("manifest.json".into(), manifest);
    files
}

fn pipeline_determinism() -> Outcome {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/config.toml");
    let dir = tempfile::tempdir().unwrap();
    let a = run_tree(&config, &dir.path().join("a"), 4);
    let b = run_tree(&config, &dir.path().join("b"), 4);
    let c = run_tree(&config, &dir.path().join("c"), 1);
    let pass = a == b && b == c && a.len() > 10;
    outcome(pass, format!("{} files; 4 vs 4 threads equal: {}; 4 vs 1 thread equal: {}", a.len(), a == b, b == c))
}

fn keyword_fidelity() -> Outcome {
    let expected: BTreeMap<&str, Vec<&str>> = [
        ("Bulgaria", vec!["^bulg.*"]),
        ("Balkans", vec!["^balcan.*"]),
        ("Slav", vec!["^slav.*"]),
        ("Turkey", vec!["^ottoman.*", "^turchi*"]),
        ("Russia", vec!["^russ.*$", "^zar.*", "^romanov"]),
        ("Germany", vec!["^bismark*", "^prussi*", "^tedesc.*"]),
        ("Britain", vec!["^ingles*", "^britan*", "^londra"]),
        ("War", vec!["^guerr*", "^bellic*"]),
    ]
    .into_iter()
    .collect();
    let sets = default_keyword_sets();
    let shipped: BTreeMap<&str, Vec<&str>> = sets
        .iter()
        .map(|s| (s.name(), s.patterns().iter().map(String::as_str).collect()))
        .collect();
    let table_ok = shipped == expected;

    let mut probe = BigramNetwork::empty(WeightMode::Count);
    for lemma in ["russia", "russo", "prussia", "prussiano", "zar", "guerra"] {
        probe.nodes.insert(lemma.to_owned());
    }
    let seeds = |name: &str| -> BTreeSet<String> {
        match_seeds(&probe, sets.iter().find(|s| s.name() == name).unwrap())
    };
    let (russia, germany) = (seeds("Russia"), seeds("Germany"));
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
    let probe_ok = russia == set(&["russia", "russo", "zar"]) && germany == set(&["prussia", "prussiano"]);
    outcome(
        table_ok && probe_ok,
        format!("table matches: {table_ok}; Russia seeds {russia:?}; Germany seeds {germany:?}"),
    )
}

fn invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut relabel, mut permute, mut scale, mut argmin) = (0, 0, 0, 0);
    for _ in 0..50 {
        let n = rng.gen_range(5..=8);
        let k = rng.gen_range(2..=3);
        let spec = BlockSpec::null_complete(k).unwrap();
        let m = random_matrix(&mut rng, n, 9);
        let assignment = random_partition(n, k, &mut rng);
        let base = criterion(&m, &Partition::new(assignment.clone(), k).unwrap(), &spec)
            .unwrap()
            .criterion;

        let mut labels: Vec<usize> = (0..k).collect();
        labels.shuffle(&mut rng);
        let relabeled: Vec<usize> = assignment.iter().map(|&c| labels[c]).collect();
        let r = criterion(&m, &Partition::new(relabeled, k).unwrap(), &spec).unwrap().criterion;
        if close(r, base, 1e-9) {
            relabel += 1;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let pm = m.permuted(&order);
        let moved: Vec<usize> = order.iter().map(|&i| assignment[i]).collect();
        let p = criterion(&pm, &Partition::new(moved, k).unwrap(), &spec).unwrap().criterion;
        if close(p, base, 1e-9) {
            permute += 1;
        }

        let c: f64 = rng.gen_range(0.1..10.0);
        let sm = m.scaled(c);
        let s = criterion(&sm, &Partition::new(assignment.clone(), k).unwrap(), &spec)
            .unwrap()
            .criterion;
        if close(s, c * c * base, 1e-9) {
            scale += 1;
        }

        let best = brute_force(&m, &spec).unwrap();
        let best_scaled = brute_force(&sm, &spec).unwrap();
        let carried = criterion(&sm, &best.partition, &spec).unwrap().criterion;
        if close(carried, best_scaled.criterion, 1e-9) && close(best_scaled.criterion, c * c * best.criterion, 1e-9) {
            argmin += 1;
        }
    }
    outcome(
        relabel == 50 && permute == 50 && scale == 50 && argmin == 50,
        format!("relabel {relabel}/50, permutation {permute}/50, scaling {scale}/50, argmin kept {argmin}/50"),
    )
}

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let checks: [Check; 9] = [
        ("blockmodel oracle equivalence", oracle_equivalence),
        ("planted structure recovery", planted_recovery),
        ("criterion arithmetic", criterion_arithmetic),
        ("bigram oracle", bigram_oracle),
        ("k-core oracle", kcore_oracle),
        ("spellchecker contract", spell_contract),
        ("pipeline determinism", pipeline_determinism),
        ("default keyword sets", keyword_fidelity),
        ("invariance suite", invariance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if result.pass { "PASS" } else { "FAIL" },
            result.detail
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
