//! Seeded random bipartite graphs, the degree formulas of the probabilistic
//! existence theorem, and an empirical existence harness.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{
    verify_disperser, verify_extractor, verify_prefix_graph, BipartiteGraph, DisperserWitness,
    ExtractorWitness, PrefixWitness, Verdict, VerifyConfig,
};
use crate::rational::{check_eps, eps_f64, Eps};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Disperser,
    Extractor,
    Prefix,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Disperser => "disperser",
            Kind::Extractor => "extractor",
            Kind::Prefix => "prefix",
        })
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disperser" => Ok(Kind::Disperser),
            "extractor" => Ok(Kind::Extractor),
            "prefix" => Ok(Kind::Prefix),
            _ => Err(Error::Precondition(format!("unknown kind `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExistenceParams {
    pub n_left: usize,
    pub n_right: usize,
    pub k: usize,
    pub eps: Eps,
    pub kind: Kind,
}

impl ExistenceParams {
    pub fn new(n_left: usize, n_right: usize, k: usize, eps: Eps, kind: Kind) -> Result<Self> {
        let p = Self {
            n_left,
            n_right,
            k,
            eps,
            kind,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k <= 1 || self.k > self.n_left {
            return Err(Error::Precondition(format!(
                "need 1 < K <= N, got K = {}, N = {}",
                self.k, self.n_left
            )));
        }
        if self.n_right == 0 {
            return Err(Error::Precondition("need M > 0".into()));
        }
        check_eps(self.eps)?;
        if self.kind == Kind::Prefix
            && !(self.n_left.is_power_of_two()
                && self.n_right.is_power_of_two()
                && self.k.is_power_of_two())
        {
            return Err(Error::Precondition("prefix kind needs N, M, K powers of two".into()));
        }
        Ok(())
    }
}

/// Ceiling that never under-shoots: values within 1e-9 of an integer are
/// bumped to the next integer.
fn guarded_ceil(v: f64) -> u64 {
    let r = v.round();
    if (v - r).abs() < 1e-9 {
        r as u64 + 1
    } else {
        v.ceil() as u64
    }
}

/// The left degree `D` from the existence theorem for the given kind.
pub fn degree_bound(p: &ExistenceParams) -> u64 {
    let (n, m, k) = (p.n_left as f64, p.n_right as f64, p.k as f64);
    let e = eps_f64(p.eps);
    let ln2 = std::f64::consts::LN_2;
    match p.kind {
        Kind::Disperser => guarded_ceil((m / k) * ((1.0 / e).ln() + 1.0) + (1.0 / e) * ((n / k).ln() + 1.0)),
        Kind::Extractor => {
            guarded_ceil(f64::max((m / k) * ln2 / (e * e), ((n / k).ln() + 1.0) / (e * e)))
        }
        Kind::Prefix => {
            let v = f64::max((m / k) * ln2 / (e * e), (1.0 + ln2 + n.ln()) / (e * e));
            1u64 << guarded_ceil(v.log2())
        }
    }
}

/// Graph with every endpoint drawn uniformly from `[M]`, from
/// `ChaCha8Rng::seed_from_u64(seed)`.
pub fn sample_graph(n_left: usize, n_right: usize, degree: usize, seed: u64) -> BipartiteGraph {
    sample_with(n_left, n_right, degree, ChaCha8Rng::seed_from_u64(seed))
}

/// Like [`sample_graph`] on stream `stream` of the same seed; used for
/// per-trial graphs so that trials are independent of execution order.
pub fn sample_graph_stream(
    n_left: usize,
    n_right: usize,
    degree: usize,
    seed: u64,
    stream: u64,
) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    sample_with(n_left, n_right, degree, rng)
}

fn sample_with(n_left: usize, n_right: usize, degree: usize, mut rng: ChaCha8Rng) -> BipartiteGraph {
    assert!(n_right > 0 && n_right <= u32::MAX as usize, "bad right size");
    let adj = (0..n_left * degree)
        .map(|_| rng.gen_range(0..n_right as u32))
        .collect();
    BipartiteGraph::new(n_left, n_right, degree, adj).expect("sampled endpoints are in range")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrialWitness {
    Disperser(DisperserWitness),
    Extractor(ExtractorWitness),
    Prefix(PrefixWitness),
}

impl fmt::Display for TrialWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| {
            v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        };
        match self {
            TrialWitness::Disperser(w) => write!(f, "A={{{}}} Y={{{}}}", list(&w.left), list(&w.avoided)),
            TrialWitness::Extractor(w) => {
                write!(f, "B={{{}}} A={{{}}} E={}", list(&w.right), list(&w.left), w.edges)
            }
            TrialWitness::Prefix(w) => write!(
                f,
                "level={} B={{{}}} A={{{}}} E={}",
                w.level,
                list(&w.witness.right),
                list(&w.witness.left),
                w.witness.edges
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trial: u64,
    pub seed: u64,
    pub witness: Option<TrialWitness>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistenceReport {
    pub params: ExistenceParams,
    pub degree: u64,
    pub outcomes: Vec<TrialOutcome>,
}

impl ExistenceReport {
    pub fn passes(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed()).count()
    }

    pub fn pass_fraction(&self) -> f64 {
        if self.outcomes.is_empty() {
            0.0
        } else {
            self.passes() as f64 / self.outcomes.len() as f64
        }
    }
}

/// Runs the verifier matching `kind` on one graph.
pub fn check_graph(
    g: &BipartiteGraph,
    p: &ExistenceParams,
    cfg: &VerifyConfig,
) -> Result<Option<TrialWitness>> {
    Ok(match p.kind {
        Kind::Disperser => match verify_disperser(g, p.k, p.eps, cfg)? {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(TrialWitness::Disperser(w)),
        },
        Kind::Extractor => match verify_extractor(g, p.k, p.eps, cfg)? {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(TrialWitness::Extractor(w)),
        },
        Kind::Prefix => {
            let k = p.k.trailing_zeros() as usize;
            match verify_prefix_graph(g, k, p.eps, cfg)? {
                Verdict::Pass => None,
                Verdict::Fail(w) => Some(TrialWitness::Prefix(w)),
            }
        }
    })
}

/// Samples `trials` graphs with `D = degree_bound(p)` and verifies each.
pub fn existence_trial(
    p: &ExistenceParams,
    trials: u64,
    seed: u64,
    cfg: &VerifyConfig,
) -> Result<ExistenceReport> {
    existence_trial_at(p, degree_bound(p), trials, seed, cfg)
}

/// [`existence_trial`] with an explicit degree. Trial `t` uses stream `t`
/// of `seed`, so the report does not depend on the thread count.
pub fn existence_trial_at(
    p: &ExistenceParams,
    degree: u64,
    trials: u64,
    seed: u64,
    cfg: &VerifyConfig,
) -> Result<ExistenceReport> {
    p.validate()?;
    let inner = VerifyConfig { threads: 1, ..*cfg };
    let one = |t: u64| -> Result<TrialOutcome> {
        let g = sample_graph_stream(p.n_left, p.n_right, degree as usize, seed, t);
        Ok(TrialOutcome {
            trial: t,
            seed,
            witness: check_graph(&g, p, &inner)?,
        })
    };
    let outcomes: Result<Vec<TrialOutcome>> = if cfg.threads == 1 {
        (0..trials).map(one).collect()
    } else {
        cfg.run(|| (0..trials).into_par_iter().map(one).collect())
    };
    Ok(ExistenceReport {
        params: *p,
        degree,
        outcomes: outcomes?,
    })
}
