//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_UNREACHABLE` are run as stated and may
//! print FAIL without failing the target; every other FAIL exits nonzero.

use std::time::Instant;

use num::rational::Ratio;
use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exkit::combin::for_each_combination;
use exkit::compose::{
    compose_serial, iterated_compose_dp, merger_compose, ConcatMerger, FnPairMerger, Merger, PairMerger,
    RecursiveMerger,
};
use exkit::design::{greedy_weak_design, verify_design, DesignKind};
use exkit::dist::{dist_from_uniform, push_forward, Dist, Weight};
use exkit::ecc::{list_from_codebook, Code};
use exkit::extractor::TableExtractor;
use exkit::graph::{
    graph_of_function, verify_extractor, verify_prefix_graph, worst_flat_distance, VerifyConfig,
};
use exkit::hashext::{collision_prob, exhaustive_hash_sweep, ToeplitzFamily};
use exkit::muchnik::{
    adversarial_sets, chain_depth_bound, iterative_chain, verify_fortnow, Condition, EnumerableSet, Instance,
    MultiInstance, Rule,
};
use exkit::randgraph::{degree_bound, existence_trial, sample_graph_stream, ExistenceParams, Kind};
use exkit::rational::eps;
use exkit::trevisan::TrevisanExtractor;
use exkit::{BipartiteGraph, BitString, Eps, Error};

/// Criterion 3 asks for full enumeration at K = 16 and K = 32, which is
/// C(63, 15) ≈ 1.5e14 and C(63, 31) ≈ 9e17 sets even after fixing one
/// element by translation.
const EXPECTED_UNREACHABLE: &[u32] = &[3];

struct Run {
    unexpected: Vec<u32>,
}

impl Run {
    fn line(&mut self, id: u32, pass: bool, detail: String, started: Instant) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2}: {verdict} {detail} [{:.1}s]", started.elapsed().as_secs_f64());
        if !pass && !EXPECTED_UNREACHABLE.contains(&id) {
            self.unexpected.push(id);
        }
    }
}

fn main() {
    let mut run = Run { unexpected: Vec::new() };
    c1_verifier_oracle(&mut run);
    c2_existence(&mut run);
    c3_leftover_hash(&mut run);
    c4_collisions(&mut run);
    c5_weak_design(&mut run);
    c6_list_size(&mut run);
    c7_trevisan(&mut run);
    let graphs = verified_graphs();
    c8_fortnow(&mut run, &graphs);
    c9_muchnik(&mut run, &graphs);
    c10_composition(&mut run);
    if run.unexpected.is_empty() {
        println!("acceptance: all required criteria passed");
    } else {
        println!("acceptance: unexpected failures {:?}", run.unexpected);
        std::process::exit(1);
    }
}

/// Naive check: the flat source on every `K`-subset has distance `< ε`.
fn naive_is_extractor(g: &BipartiteGraph, k: usize, e: Eps) -> bool {
    let (m, d) = (g.right_size() as u128, g.degree() as u128);
    let (p, q) = (*e.numer() as u128, *e.denom() as u128);
    let kd = k as u128 * d;
    let mut ok = true;
    for_each_combination(g.left_size(), k, |set| {
        let mut count = vec![0u128; g.right_size()];
        for &a in set {
            for &z in g.neighbors(a) {
                count[z as usize] += 1;
            }
        }
        // dist = Σ|cnt/KD − 1/M| / 2 ≥ p/q
        let l1: u128 = count.iter().map(|&c| (m * c).abs_diff(kd)).sum();
        if q * l1 >= 2 * p * kd * m {
            ok = false;
        }
        ok
    });
    ok
}

fn c1_verifier_oracle(run: &mut Run) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let eps_choices = [eps(1, 8), eps(1, 5), eps(1, 4), eps(1, 3), eps(2, 5), eps(1, 2), eps(3, 4)];
    let cfg = VerifyConfig::default();
    let (mut disagree, mut passes, mut total) = (0, 0, 0);
    while total < 300 {
        let n = rng.gen_range(2..=16usize);
        let m = rng.gen_range(1..=8usize);
        let d = rng.gen_range(1..=6usize);
        let k = rng.gen_range(1..=3usize.min(n));
        let e = eps_choices[rng.gen_range(0..eps_choices.len())];
        let adj = (0..n * d).map(|_| rng.gen_range(0..m as u32)).collect();
        let g = BipartiteGraph::new(n, m, d, adj).unwrap();
        let fast = verify_extractor(&g, k, e, &cfg).unwrap().passed();
        if fast != naive_is_extractor(&g, k, e) {
            disagree += 1;
        }
        passes += fast as usize;
        total += 1;
    }
    run.line(
        1,
        disagree == 0 && t.elapsed().as_secs() < 60,
        format!("{total} graphs (N<=16, M<=8, K<=3), {passes} pass / {} fail, disagreements={disagree}", total - passes),
        t,
    );
}

fn c2_existence(run: &mut Run) {
    let t = Instant::now();
    let cfg = VerifyConfig::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, m, k, e) in [(16, 4, 4, eps(9, 20)), (64, 8, 8, eps(3, 10))] {
        let p = ExistenceParams::new(n, m, k, e, Kind::Extractor).unwrap();
        let r = existence_trial(&p, 50, 2024, &cfg).unwrap();
        ok &= r.passes() > 0;
        parts.push(format!("(N={n},M={m},K={k},eps={e},D={}) pass_fraction={}", r.degree, r.pass_fraction()));
    }
    run.line(2, ok && t.elapsed().as_secs() < 300, parts.join(" "), t);
}

fn c3_leftover_hash(run: &mut Run) {
    let t = Instant::now();
    let family = ToeplitzFamily::new(6, 2).unwrap();
    let cfg = VerifyConfig {
        max_subsets: 1 << 30,
        threads: 0,
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [8usize, 16, 32] {
        match exhaustive_hash_sweep(&family, k, &cfg) {
            Ok(s) => {
                let clean = s.violations == 0 && s.worst() <= s.bound() + 1e-9;
                ok &= clean;
                parts.push(format!(
                    "K={k}: {} sets, worst={:.5} bound={:.5} violations={}",
                    s.sets_checked,
                    s.worst(),
                    s.bound(),
                    s.violations
                ));
            }
            Err(Error::BudgetExceeded { required, .. }) => {
                ok = false;
                parts.push(format!("K={k}: not enumerable ({required} sets)"));
            }
            Err(e) => panic!("sweep failed: {e}"),
        }
    }
    // Smaller n, every K, as a complement.
    let mut small_violations = 0;
    for n in 1..=4usize {
        for l in 1..=2usize {
            let f = ToeplitzFamily::new(n, l).unwrap();
            for k in 1..=1usize << n {
                small_violations += exhaustive_hash_sweep(&f, k, &cfg).unwrap().violations;
            }
        }
    }
    parts.push(format!("n<=4 all K violations={small_violations}"));
    run.line(3, ok && small_violations == 0, format!("n=6 l=2 {}", parts.join("; ")), t);
}

/// Toeplitz matrix-vector product written out from the definition:
/// entry (r, c) is diagonal bit c − r + l − 1 of the index.
fn toeplitz_apply(n: usize, l: usize, h: u64, x: u64) -> u64 {
    let d = n + l - 1;
    let hbit = |i: usize| (h >> (d - 1 - i)) & 1;
    let xbit = |c: usize| (x >> (n - 1 - c)) & 1;
    let mut out = 0;
    for r in 0..l {
        let mut acc = 0;
        for c in 0..n {
            acc ^= hbit(c + l - 1 - r) & xbit(c);
        }
        out = (out << 1) | acc;
    }
    out
}

fn c4_collisions(run: &mut Run) {
    let t = Instant::now();
    let mut bad = 0u64;
    let (mut pairs, mut differences) = (0u64, 0u64);
    for d in 1..=12usize {
        for n in 1..=d {
            let l = d + 1 - n;
            let f = ToeplitzFamily::new(n, l).unwrap();
            let want = Ratio::new(1u64, 1 << l);
            // Collisions depend only on v = x1 ⊕ x2 since every member is linear;
            // every difference is counted from the definition.
            for v in 1..1u64 << n {
                let hits = (0..1u64 << d).filter(|&h| toeplitz_apply(n, l, h, v) == 0).count() as u64;
                if Ratio::new(hits, 1 << d) != want {
                    bad += 1;
                }
                differences += 1;
            }
            // Every distinct pair through the library where that stays small.
            if d <= 8 {
                for a in 0..1u64 << n {
                    for b in a + 1..1u64 << n {
                        let p = collision_prob(&f, &BitString::from_u64(a, n), &BitString::from_u64(b, n)).unwrap();
                        if p != want {
                            bad += 1;
                        }
                        pairs += 1;
                    }
                }
            } else {
                for v in 1..1u64 << n {
                    let p = collision_prob(&f, &BitString::zeros(n), &BitString::from_u64(v, n)).unwrap();
                    if p != want {
                        bad += 1;
                    }
                    pairs += 1;
                }
            }
        }
    }
    run.line(
        4,
        bad == 0,
        format!("n+l-1<=12: {differences} differences, {pairs} library pairs, mismatches={bad}"),
        t,
    );
}

fn c5_weak_design(run: &mut Run) {
    let t = Instant::now();
    let rho = Ratio::from_integer(1);
    let (mut failures, mut worst_ratio) = (Vec::new(), 0f64);
    for l in 1..=8usize {
        for m in 1..=64usize {
            let f = greedy_weak_design(l, m, rho).unwrap();
            let log = (usize::BITS - (m - 1).leading_zeros()).max(1) as usize;
            let cap = 4 * l * l * log;
            worst_ratio = worst_ratio.max(f.universe() as f64 / cap as f64);
            if !verify_design(&f, DesignKind::Weak, rho).passed() || f.universe() > cap || f.len() != m {
                failures.push((l, m));
            }
        }
    }
    run.line(
        5,
        failures.is_empty() && t.elapsed().as_secs() < 60,
        format!(
            "512 designs, failures={:?}, max d/(4 l^2 max(1,ceil log2 m))={worst_ratio:.3}",
            failures
        ),
        t,
    );
}

fn c6_list_size(run: &mut Run) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    let (mut worst, mut violations, mut centers) = (Vec::new(), 0, 0);
    for delta in [eps(1, 4), eps(1, 8)] {
        let bound = (*delta.denom() / *delta.numer()).pow(2) as usize;
        let mut max_list = 0;
        for n in 1..=10usize {
            let code = Code::build(n, delta).unwrap();
            let book = code.codebook().unwrap();
            let nbar = code.codeword_len();
            let mut check = |center: &BitString| {
                let size = list_from_codebook(&code, &book, center, delta).unwrap().len();
                max_list = max_list.max(size);
                if size > bound {
                    violations += 1;
                }
                centers += 1;
            };
            for _ in 0..100 {
                let bits: Vec<bool> = (0..nbar).map(|_| rng.gen()).collect();
                check(&BitString::from_bits(&bits));
            }
            // Centers close to codewords and majorities of three codewords.
            for _ in 0..20 {
                let w = &book[rng.gen_range(0..book.len())];
                let mut c = w.clone();
                let flips = nbar * (*delta.denom() as usize - 2 * *delta.numer() as usize) / (2 * *delta.denom() as usize);
                for _ in 0..flips {
                    let i = rng.gen_range(0..nbar);
                    c.set(i, !c.get(i));
                }
                check(&c);
                let (a, b, cc) = (
                    &book[rng.gen_range(0..book.len())],
                    &book[rng.gen_range(0..book.len())],
                    &book[rng.gen_range(0..book.len())],
                );
                let maj: Vec<bool> = (0..nbar)
                    .map(|i| (a.get(i) as u8 + b.get(i) as u8 + cc.get(i) as u8) >= 2)
                    .collect();
                check(&BitString::from_bits(&maj));
            }
        }
        worst.push(format!("delta={delta}: max list {max_list} <= {bound}"));
    }
    run.line(
        6,
        violations == 0 && t.elapsed().as_secs() < 300,
        format!("{centers} centers, n<=10, {}, violations={violations}", worst.join(", ")),
        t,
    );
}

fn c7_trevisan(run: &mut Run) {
    let t = Instant::now();
    let code = Code::with_exponent(4, 2).unwrap();
    let mut failures = Vec::new();
    let mut distances = Vec::new();
    for m in 1..=4usize {
        let design = greedy_weak_design(code.log_len(), m, Ratio::from_integer(1)).unwrap();
        let d = design.universe();
        assert!(d <= 16);
        let tr = TrevisanExtractor::new(code.clone(), design.clone()).unwrap();
        let shorter: Vec<TrevisanExtractor> = (1..=m).map(|j| tr.truncated(j)).collect();
        for x in 0..16u64 {
            let xs = BitString::from_u64(x, 4);
            for y in 0..1u64 << d {
                let ys = BitString::from_u64(y, d);
                let out = tr.eval(&xs, &ys).unwrap();
                for (j, s) in shorter.iter().enumerate() {
                    if s.eval(&xs, &ys).unwrap() != out.prefix(j + 1) {
                        failures.push(format!("prefix m={m} j={}", j + 1));
                    }
                }
                if x == 0 && out.count_ones() != 0 {
                    failures.push(format!("zero m={m} y={y}"));
                }
                for b in 0..d {
                    let mut flipped = ys.clone();
                    flipped.set(b, !flipped.get(b));
                    let other = tr.eval(&xs, &flipped).unwrap();
                    for (i, set) in design.sets().iter().enumerate() {
                        if !set.contains(&b) && other.get(i) != out.get(i) {
                            failures.push(format!("locality m={m} bit={b} out={i}"));
                        }
                    }
                }
            }
        }
        if m <= 3 {
            let g = graph_of_function(&tr).unwrap();
            let cfg = VerifyConfig::default();
            for k in [4usize, 8] {
                let w = worst_flat_distance(&g, k, &cfg).unwrap();
                distances.push(format!("m={m} d={d} K={k}: {:.4}", w.value()));
            }
        }
    }
    failures.truncate(5);
    run.line(
        7,
        failures.is_empty(),
        format!(
            "n=4 t=2 m<=4 exhaustive structure, failures={failures:?}; worst flat distance {}",
            distances.join(", ")
        ),
        t,
    );
}

struct VerifiedGraph {
    graph: BipartiteGraph,
    k_size: usize,
    eps: Eps,
    at_bound: bool,
    label: String,
}

/// Sampled graphs that pass the extractor check, at the existence degree
/// and at small degrees where bad sets are nonempty.
fn verified_graphs() -> Vec<VerifiedGraph> {
    let cfg = VerifyConfig::default();
    let mut out = Vec::new();
    let configs: [(usize, usize, usize, Eps, Option<usize>); 8] = [
        (64, 8, 8, eps(3, 10), None),
        (64, 16, 16, eps(1, 4), None),
        (256, 16, 16, eps(1, 8), None),
        (16, 4, 4, eps(3, 10), Some(6)),
        (16, 4, 4, eps(2, 5), Some(4)),
        (64, 8, 8, eps(2, 5), Some(6)),
        (64, 16, 16, eps(2, 5), Some(6)),
        (64, 16, 16, eps(1, 2), Some(4)),
    ];
    for (n, m, k, e, degree) in configs {
        let p = ExistenceParams::new(n, m, k, e, Kind::Extractor).unwrap();
        let d = degree.unwrap_or(degree_bound(&p) as usize);
        let mut found = 0;
        for stream in 0..40 {
            let g = sample_graph_stream(n, m, d, 0xF0, stream);
            if verify_extractor(&g, k, e, &cfg).unwrap().passed() {
                out.push(VerifiedGraph {
                    graph: g,
                    k_size: k,
                    eps: e,
                    at_bound: degree.is_none(),
                    label: format!("N={n} M={m} D={d} K={k} eps={e} stream={stream}"),
                });
                found += 1;
                if found == 2 {
                    break;
                }
            }
        }
    }
    out
}

fn c8_fortnow(run: &mut Run, graphs: &[VerifiedGraph]) {
    let t = Instant::now();
    let cfg = VerifyConfig::default();
    let (mut violations, mut sets) = (0, 0);
    let mut parts = Vec::new();
    for (i, v) in graphs.iter().enumerate() {
        let extra = adversarial_sets(&v.graph, v.k_size, 10).unwrap();
        let r = verify_fortnow(&v.graph, v.k_size, v.eps, 100, 0xF8 + i as u64, &extra, &cfg).unwrap();
        violations += r.violations_all() + r.violations_majority();
        sets += r.samples.len();
        parts.push(format!(
            "[{}: max all {} <= {}, max majority {} <= {}]",
            v.label,
            r.max_bad_all(),
            r.bound_all(),
            r.max_bad_majority(),
            r.bound_majority()
        ));
    }
    run.line(
        8,
        violations == 0 && !graphs.is_empty(),
        format!("{} graphs, {sets} sets, violations={violations} {}", graphs.len(), parts.join(" ")),
        t,
    );
}

fn c9_muchnik(run: &mut Run, graphs: &[VerifiedGraph]) {
    let t = Instant::now();
    let cfg = VerifyConfig::default();

    // Single condition, both rules.
    let (mut good, mut round_trips, mut over_index) = (0, 0, 0);
    for (i, v) in graphs.iter().enumerate() {
        let mut sets = adversarial_sets(&v.graph, v.k_size, 10).unwrap();
        for s in 0..20 {
            sets.push(EnumerableSet::random(v.graph.left_size(), v.k_size, 0x90 + i as u64, s).unwrap());
        }
        for s in &sets {
            for rule in [Rule::All, Rule::Majority] {
                let inst = Instance::new(&v.graph, s.clone(), v.k_size, rule).unwrap();
                for &a in s.members() {
                    if !inst.is_good(a) {
                        continue;
                    }
                    good += 1;
                    let code = inst.encode(a).unwrap();
                    let idx = inst.rank(a, code.x).unwrap();
                    if inst.decode(code.x, idx).unwrap() == a {
                        round_trips += 1;
                    }
                    if !inst.index_in_range(idx) {
                        over_index += 1;
                    }
                }
            }
        }
    }
    let single_ok = good > 0 && good == round_trips && over_index == 0;

    // Two conditions on verified prefix graphs: N = 16, m = k = 3, eps = 1/4.
    let e = eps(1, 4);
    let p = ExistenceParams::new(16, 8, 8, e, Kind::Prefix).unwrap();
    let d = degree_bound(&p) as usize;
    let mut prefix_graphs = Vec::new();
    for stream in 0..40 {
        let g = sample_graph_stream(16, 8, d, 0x99, stream);
        if verify_prefix_graph(&g, 3, e, &cfg).unwrap().passed() {
            prefix_graphs.push(g);
            if prefix_graphs.len() == 3 {
                break;
            }
        }
    }
    let (mut multi_good, mut multi_ok, mut no_common) = (0, 0, 0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x9A);
    for g in &prefix_graphs {
        for trial in 0..30u64 {
            let s1 = EnumerableSet::random(16, 8, 0x9B, trial).unwrap();
            let s2 = if trial % 2 == 0 {
                let mut sub: Vec<usize> = s1.members().to_vec();
                while sub.len() > 4 {
                    sub.remove(rng.gen_range(0..sub.len()));
                }
                EnumerableSet::exact(sub).unwrap()
            } else {
                EnumerableSet::random(16, 4, 0x9C, trial).unwrap()
            };
            let conds = vec![Condition { set: s1.clone(), k: 3 }, Condition { set: s2.clone(), k: 2 }];
            let mi = MultiInstance::new(g, conds).unwrap();
            for &a in s1.members() {
                if !s2.contains(a) || mi.bad(0).bad_left.contains(&a) || mi.bad(1).bad_left.contains(&a) {
                    continue;
                }
                multi_good += 1;
                match mi.encode(a) {
                    Ok(code) => {
                        if (0..2).all(|i| mi.decode(i, &code).unwrap() == a) {
                            multi_ok += 1;
                        }
                    }
                    Err(Error::NoGoodNeighbor(_)) => no_common += 1,
                    Err(other) => panic!("{other}"),
                }
            }
        }
    }
    let multi_pass = !prefix_graphs.is_empty() && multi_good > 0 && multi_good == multi_ok && no_common == 0;

    // Chain on verified level-0 graphs: N = 64 (n = 6), k = 4, then the
    // right part cut by 2·⌈log2 n⌉ bits per level.
    let bound = chain_depth_bound(4, 6);
    let step = 2 * 3;
    let (mut chains, mut deepest, mut uncovered, mut too_deep) = (0, 0, 0, 0);
    let (mut low_chains, mut low_deep) = (0, 0);
    for v in graphs.iter().filter(|v| v.graph.left_size() == 64 && v.graph.right_size() == 16) {
        let levels = vec![v.graph.clone(), v.graph.prefix_graph(step.min(4) as u32).unwrap()];
        let bounds = vec![16, (16usize >> step).max(1)];
        let mut starts = adversarial_sets(&v.graph, 16, 10).unwrap();
        for s in 0..20 {
            starts.push(EnumerableSet::random(64, 16, 0x9D, s).unwrap());
        }
        for s0 in &starts {
            let result = iterative_chain(&levels, &bounds, s0);
            if !v.at_bound {
                // Far from the regime of the depth bound; reported only.
                low_chains += 1;
                low_deep += result.map_or(true, |r| r.depth() > bound) as usize;
                continue;
            }
            chains += 1;
            match result {
                Ok(r) => {
                    deepest = deepest.max(r.depth());
                    too_deep += (r.depth() > bound) as usize;
                    uncovered += s0.len() - r.assignment.len();
                }
                Err(_) => uncovered += 1,
            }
        }
    }
    let chain_ok = chains > 0 && uncovered == 0 && too_deep == 0;

    run.line(
        9,
        single_ok && multi_pass && chain_ok,
        format!(
            "single: {round_trips}/{good} round trips, index>=2DK/M: {over_index}; \
             multi (p=2, {} prefix graphs D={d}): {multi_ok}/{multi_good}, no common neighbor: {no_common}; \
             chain: {chains} runs, max depth {deepest} <= {bound}, uncovered {uncovered} \
             (low-degree graphs, not gated: {low_deep}/{low_chains} deeper than {bound})",
            prefix_graphs.len()
        ),
        t,
    );
}

/// Deterministic mixing used as a pair merger for any block length.
fn mix(a: &BitString, b: &BitString, s: &BitString, out_len: usize) -> BitString {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for part in [a, b, s] {
        h = (h ^ part.len() as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ part.to_u64()).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    BitString::from_u64(if out_len == 0 { 0 } else { h >> (64 - out_len) }, out_len)
}

fn c10_composition(run: &mut Run) {
    let t = Instant::now();

    // (a) t = 2 dynamic program against the direct definition.
    let mut dp_mismatch = 0;
    let mut dp_cases = 0;
    for seed in 0..4u64 {
        let n = 3;
        let e1 = TableExtractor::random(n, 2, 2, seed * 10);
        let e2 = TableExtractor::random(n, 2, 2, seed * 10 + 1);
        let merger = ConcatMerger::new(TableExtractor::random(3 * 2, 2, 2, seed * 10 + 2), 3, 2).unwrap();
        for x in 0..8u64 {
            for y in 0..4u64 {
                for r2 in 0..4u64 {
                    let (xs, ys, rs) = (BitString::from_u64(x, 3), BitString::from_u64(y, 2), BitString::from_u64(r2, 2));
                    let direct = merger_compose(&e1, &e2, &merger, &xs, &ys, &rs).unwrap();
                    let dp = iterated_compose_dp(&[&e1, &e2], &[&merger as &dyn Merger], &xs, &ys, std::slice::from_ref(&rs))
                        .unwrap();
                    dp_cases += 1;
                    dp_mismatch += (dp.output() != &direct) as usize;
                }
            }
        }
    }

    // (b) recursive merger at l = 0, 1, 2 against hand-unrolled levels.
    let pm = FnPairMerger::new(1, 1, |a: &BitString, b: &BitString, s: &BitString| mix(a, b, s, a.len() - 1));
    let mut rec_mismatch = 0;
    let k = 3;
    for x in 0..1u64 << k {
        let x0 = BitString::from_u64(x, k);
        let m0 = RecursiveMerger::new(&pm, 0, k).unwrap();
        rec_mismatch += (m0.merge(std::slice::from_ref(&x0), &BitString::zeros(0)) != x0) as usize;
    }
    let m1 = RecursiveMerger::new(&pm, 1, k).unwrap();
    let m2 = RecursiveMerger::new(&pm, 2, k).unwrap();
    for v in 0..1u64 << (4 * k) {
        let blocks: Vec<BitString> = (0..4).map(|i| BitString::from_u64((v >> (3 * k - i * k)) & 7, k)).collect();
        for s in 0..4u64 {
            let (s1, s2) = (BitString::from_u64(s >> 1, 1), BitString::from_u64(s & 1, 1));
            if s < 2 {
                let only = BitString::from_u64(s, 1);
                let hand = pm.merge_pair(&blocks[0], &blocks[1], &only);
                rec_mismatch += (m1.merge(&blocks[..2], &only) != hand) as usize;
            }
            let left = pm.merge_pair(&blocks[0], &blocks[1], &s2);
            let right = pm.merge_pair(&blocks[2], &blocks[3], &s2);
            let hand = pm.merge_pair(&left, &right, &s1);
            rec_mismatch += (m2.merge(&blocks, &BitString::from_u64(s, 2)) != hand) as usize;
        }
    }

    // (c) serial composition on exact block sources.
    let cfg = VerifyConfig::default();
    let mut serial_worst = (0f64, 0f64);
    let mut serial_bad = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(0x10C);
    for pair in 0..4u64 {
        let f1 = TableExtractor::random(4, 2, 2, 0x1000 + pair);
        let f2 = TableExtractor::random(4, 2, 2, 0x2000 + pair);
        let eps1 = worst_flat_distance(&graph_of_function(&f1).unwrap(), 4, &cfg).unwrap();
        let eps2 = worst_flat_distance(&graph_of_function(&f2).unwrap(), 4, &cfg).unwrap();
        let budget = BigRational::ratio(eps1.numerator, eps1.denominator)
            .add(&BigRational::ratio(eps2.numerator, eps2.denominator));
        let c = compose_serial(&f1, &f2).unwrap();
        for _ in 0..25 {
            // X1 flat on 4 of 16 values; X2 | X1 = x1 flat on 4 values.
            let mut probs = vec![BigRational::ratio(0, 1); 256];
            let x1s = rand::seq::index::sample(&mut rng, 16, 4).into_vec();
            for &x1 in &x1s {
                for x2 in rand::seq::index::sample(&mut rng, 16, 4).into_vec() {
                    probs[x1 * 16 + x2] = BigRational::ratio(1, 16);
                }
            }
            let src = Dist::new(8, probs).unwrap();
            let out = push_forward(&c, &src).unwrap();
            let dist = dist_from_uniform(&out);
            if dist > budget && dist.to_f64() > budget.to_f64() + 1e-9 {
                serial_bad += 1;
            }
            if dist.to_f64() > serial_worst.0 {
                serial_worst = (dist.to_f64(), budget.to_f64());
            }
        }
    }

    run.line(
        10,
        dp_mismatch == 0 && rec_mismatch == 0 && serial_bad == 0,
        format!(
            "dp vs direct {dp_mismatch}/{dp_cases} mismatches; recursive l<=2 mismatches {rec_mismatch}; \
             serial worst {:.4} (eps1+eps2 {:.4}), violations {serial_bad}",
            serial_worst.0, serial_worst.1
        ),
        t,
    );
}
