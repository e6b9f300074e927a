use exkit::compose::{
    check_block_source, compose_serial, iterated_compose_dp, merger_compose_trace, two_block_merger,
    BlockSource, BlockVerdict, ConcatMerger, Merger, SomewhereRandomSource,
};
use exkit::dist::{min_entropy, push_forward, stat_dist};
use exkit::extractor::{FnExtractor, TableExtractor};
use exkit::graph::{graph_of_function, worst_flat_distance, VerifyConfig};
use exkit::{BitString, Dist, ExactDist, Extractor};
use num::{BigInt, BigRational, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn bits(v: u64, len: usize) -> BitString {
    BitString::from_u64(v, len)
}

fn q(p: i64, r: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(r))
}

// Composition by its definition, recursing on the number of extractors.
fn compose_by_definition(
    es: &[&dyn Extractor],
    ms: &[&dyn Merger],
    a: &BitString,
    y: &BitString,
    ys: &[BitString],
) -> BitString {
    let j = es.len() - 1;
    if j == 0 {
        return es[0].extract(a, y);
    }
    let n = a.len();
    let z: Vec<BitString> = (0..n)
        .map(|i| {
            let inner = compose_by_definition(&es[..j], &ms[..j - 1], &a.slice(i, n - i).pad_front(n), y, &ys[..j - 1]);
            es[j].extract(&a.slice(0, i).pad_front(n), &inner)
        })
        .collect();
    ms[j - 1].merge(&z, &ys[j - 1])
}

#[test]
fn dp_matches_recursive_definition_at_t3() {
    let e1 = TableExtractor::random(4, 3, 3, 1);
    let e2 = TableExtractor::random(4, 3, 3, 2);
    let e3 = TableExtractor::random(4, 3, 2, 3);
    let m1 = ConcatMerger::new(TableExtractor::random(12, 2, 3, 4), 4, 3).unwrap();
    let m2 = ConcatMerger::new(TableExtractor::random(8, 2, 2, 5), 4, 2).unwrap();
    let es: [&dyn Extractor; 3] = [&e1, &e2, &e3];
    let ms: [&dyn Merger; 2] = [&m1, &m2];
    for x in 0..16u64 {
        for y in 0..8u64 {
            for s in 0..16u64 {
                let xb = bits(x, 4);
                let yb = bits(y, 3);
                let ys = [bits(s >> 2, 2), bits(s & 3, 2)];
                let dp = iterated_compose_dp(&es, &ms, &xb, &yb, &ys).unwrap();
                let direct = compose_by_definition(&es, &ms, &xb, &yb, &ys);
                assert_eq!(dp.output(), &direct, "x={x} y={y} s={s}");
            }
        }
    }
}

#[test]
fn two_block_trace_matches_stepwise_recomputation() {
    let e1 = TableExtractor::random(2, 2, 3, 21);
    let e2 = TableExtractor::random(2, 3, 2, 22);
    let m = ConcatMerger::new(TableExtractor::random(4, 1, 2, 23), 2, 2).unwrap();
    for a in 0..4u64 {
        for r1 in 0..4u64 {
            for r2 in 0..2u64 {
                let t = merger_compose_trace(&e1, &e2, &m, &bits(a, 2), &bits(r1, 2), &bits(r2, 1)).unwrap();
                let (a1, a2) = (a >> 1, a & 1);
                let q1 = e1.extract_index(a, r1);
                let q2 = e1.extract_index(a2, r1);
                let z1 = e2.extract_index(0, q1);
                let z2 = e2.extract_index(a1, q2);
                let out = m.inner().extract_index((z1 << 2) | z2, r2);
                assert_eq!(t.q, vec![bits(q1, 3), bits(q2, 3)]);
                assert_eq!(t.z, vec![bits(z1, 2), bits(z2, 2)]);
                assert_eq!(t.output, bits(out, 2));
            }
        }
    }
}

fn random_joint(rng: &mut ChaCha8Rng, n: usize) -> ExactDist {
    let raw: Vec<i64> = (0..1 << n)
        .map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..6) })
        .collect();
    let total: i64 = raw.iter().sum::<i64>().max(1);
    let probs = if raw.iter().all(|&w| w == 0) {
        let mut p = vec![q(0, 1); 1 << n];
        p[0] = q(1, 1);
        p
    } else {
        raw.iter().map(|&w| q(w, total)).collect()
    };
    Dist::new(n, probs).unwrap()
}

// Both conditions recomputed from the joint table.
fn block_verdict_oracle(joint: &ExactDist, n2: usize, k1: u32, k2: u32) -> BlockVerdict {
    let rows: Vec<&[BigRational]> = joint.probs().chunks(1 << n2).collect();
    let masses: Vec<BigRational> = rows.iter().map(|r| r.iter().cloned().sum()).collect();
    let cap1 = q(1, 1 << k1);
    if masses.iter().any(|m| *m > cap1) {
        return BlockVerdict::Marginal;
    }
    for (x1, row) in rows.iter().enumerate() {
        if masses[x1].is_zero() {
            continue;
        }
        for p in row.iter() {
            if p / &masses[x1] > q(1, 1 << k2) {
                return BlockVerdict::Conditional { x1: x1 as u64 };
            }
        }
    }
    BlockVerdict::Pass
}

#[test]
fn block_source_verdicts_match_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut seen = [0usize; 3];
    for _ in 0..300 {
        let joint = random_joint(&mut rng, 6);
        let (k1, k2) = (rng.gen_range(0..=3u32), rng.gen_range(0..=3u32));
        let want = block_verdict_oracle(&joint, 3, k1, k2);
        let got = check_block_source(&BlockSource::new(3, 3, joint, k1, k2).unwrap()).unwrap();
        assert_eq!(got, want);
        seen[match got {
            BlockVerdict::Pass => 0,
            BlockVerdict::Marginal => 1,
            BlockVerdict::Conditional { .. } => 2,
        }] += 1;
    }
    // the uniform joint meets the full claims
    let uniform = ExactDist::uniform(6).unwrap();
    assert_eq!(check_block_source(&BlockSource::new(3, 3, uniform, 3, 3).unwrap()).unwrap(), BlockVerdict::Pass);
    assert!(seen[1] > 0 && seen[2] > 0, "{seen:?}");
}

// Y = 1: Z1 uniform, Z2 = g(Z1). Y = 2: Z2 uniform, Z1 = h(Z2).
fn explicit_somewhere_random(g: [u64; 4], h: [u64; 4], w1: i64) -> SomewhereRandomSource<BigRational> {
    let mut atoms = Vec::new();
    for v in 0..4u64 {
        atoms.push((1usize, (v << 2) | g[v as usize], q(w1, 16)));
        atoms.push((2usize, (h[v as usize] << 2) | v, q(4 - w1, 16)));
    }
    SomewhereRandomSource::new(2, 2, atoms).unwrap()
}

#[test]
fn somewhere_random_source_has_block_entropy() {
    let zero = BigRational::zero();
    for (g, h, w1) in [
        ([0, 0, 0, 0], [0, 0, 0, 0], 2),
        ([3, 1, 2, 0], [1, 1, 3, 3], 1),
        ([0, 1, 2, 3], [0, 1, 2, 3], 3),
        ([2, 2, 2, 2], [1, 2, 3, 0], 4),
    ] {
        let s = explicit_somewhere_random(g, h, w1);
        assert!(s.is_selector(&zero, &zero));
        let joint = s.blocks_dist();
        // H∞ ≥ 2: no joint value above 1/4
        assert!(joint.probs().iter().all(|p| *p <= q(1, 4)));
        assert!(min_entropy(&joint).unwrap() >= 2.0 - 1e-12);
    }
}

#[test]
fn two_block_merger_stays_within_verified_eps() {
    let k = 2;
    let e = TableExtractor::random(2 * k, 3, 2, 31);
    let graph = graph_of_function(&e).unwrap();
    let verified = worst_flat_distance(&graph, 1 << k, &VerifyConfig::default()).unwrap();
    let eps = q(verified.numerator as i64, verified.denominator as i64);
    let merger = two_block_merger(e.clone(), k).unwrap();
    let uniform = ExactDist::uniform(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..20 {
        let g: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..4));
        let h: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..4));
        let w1 = if trial < 5 { 4 } else { rng.gen_range(0..=4) };
        let s = explicit_somewhere_random(g, h, w1);
        let out = push_forward(&e, &s.blocks_dist()).unwrap();
        let d = stat_dist(&out, &uniform).unwrap();
        assert!(d <= eps, "trial {trial}: {d} > {eps}");
        for &(_, z, _) in s.atoms() {
            for y in 0..8u64 {
                let blocks = [bits(s.block(z, 1), 2), bits(s.block(z, 2), 2)];
                assert_eq!(merger.merge(&blocks, &bits(y, 3)).to_u64(), e.extract_index(z, y));
            }
        }
    }
}

fn exact_dist_of<E: Extractor>(f: &E, x: &ExactDist) -> BigRational {
    let out = push_forward(f, x).unwrap();
    stat_dist(&out, &ExactDist::uniform(f.output_len()).unwrap()).unwrap()
}

#[test]
fn serial_composition_on_uniform_conditionals() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..10 {
        // X1 on 3 bits, X2 | X1 uniform on 2 bits
        let marginal = random_joint(&mut rng, 3);
        let probs: Vec<BigRational> = marginal
            .probs()
            .iter()
            .flat_map(|p| std::iter::repeat_n(p / BigRational::from_integer(4.into()), 4))
            .collect();
        let joint = Dist::new(5, probs).unwrap();
        let f1 = TableExtractor::random(3, 2, 2, 100 + trial);
        let alone = exact_dist_of(&f1, &marginal);

        // x2 ⊕ y is exactly uniform whenever X2 is
        let xor = FnExtractor::new(2, 2, 2, |x, y| x ^ y);
        let c = compose_serial(f1.clone(), xor).unwrap();
        assert_eq!(exact_dist_of(&c, &joint), alone);

        // with a table inner extractor the composition bound ε1 + ε2 applies
        let f2 = TableExtractor::random(2, 1, 2, 200 + trial);
        let eps2 = exact_dist_of(&f2, &ExactDist::uniform(2).unwrap());
        let c = compose_serial(f1.clone(), f2).unwrap();
        assert!(exact_dist_of(&c, &joint) <= &alone + &eps2);
    }
}
