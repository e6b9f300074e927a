use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num::rational::Ratio;

use exkit::compose::{iterated_compose_dp, merger_compose_trace, ConcatMerger, Merger};
use exkit::design::{greedy_weak_design, verify_design, DesignKind, DesignVerdict};
use exkit::ecc::Code;
use exkit::extractor::{Extractor, TableExtractor};
use exkit::formats;
use exkit::graph::{verify_disperser, verify_extractor, verify_prefix_graph, Verdict, VerifyConfig};
use exkit::hashext::{HashExtractor, ToeplitzFamily};
use exkit::muchnik::{
    chain_depth_bound, iterative_chain, Condition, EnumerableSet, Instance, MultiInstance, Rule,
};
use exkit::randgraph::{degree_bound, existence_trial_at, sample_graph_stream, ExistenceParams, Kind, TrialWitness};
use exkit::trevisan::{trevisan_build, TrevisanExtractor};
use exkit::{BipartiteGraph, Eps};

use crate::{Cli, Cmd, GraphKind, Method, Report, RuleArg};

/// `# exkit <command> key=value ...` line.
struct Echo(String);

impl Echo {
    fn new(command: &str) -> Self {
        Echo(format!("# exkit {command}"))
    }

    fn kv(mut self, key: &str, value: impl std::fmt::Display) -> Self {
        let _ = write!(self.0, " {key}={value}");
        self
    }

    fn opt(self, key: &str, value: Option<impl std::fmt::Display>) -> Self {
        match value {
            Some(v) => self.kv(key, v),
            None => self,
        }
    }

    fn path(self, key: &str, p: &Path) -> Self {
        let shown = p.display().to_string();
        self.kv(key, shown)
    }

    fn line(self) -> String {
        self.0 + "\n"
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn in_file<T>(path: &Path, r: exkit::Result<T>) -> Result<T> {
    r.map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn kind_of(k: GraphKind) -> Kind {
    match k {
        GraphKind::Extractor => Kind::Extractor,
        GraphKind::Disperser => Kind::Disperser,
        GraphKind::Prefix => Kind::Prefix,
    }
}

pub fn run(cli: &Cli) -> Result<Report> {
    let cfg = VerifyConfig {
        max_subsets: cli.max_subsets,
        threads: cli.threads,
    };
    let budget = |e: Echo| e.kv("max_subsets", cli.max_subsets);
    match &cli.cmd {
        Cmd::Extract {
            method,
            n,
            l,
            k,
            m,
            eps,
            exponent,
            seed_file,
            source_file,
        } => {
            let seed = in_file(seed_file, formats::read_bits(&read(seed_file)?))?;
            let samples = in_file(source_file, formats::read_bits_lines(&read(source_file)?))?;
            let (echo, ext): (Echo, Box<dyn Extractor>) = match method {
                Method::Hash => {
                    let l = l.ok_or_else(|| anyhow!("--l is required for the hash method"))?;
                    let family = ToeplitzFamily::new(*n, l)?;
                    let echo = Echo::new("extract").kv("method", "hash").kv("n", n).kv("l", l).kv("d", n + l - 1);
                    (echo, Box::new(HashExtractor::new(family)))
                }
                Method::Trevisan => {
                    let m = m.ok_or_else(|| anyhow!("--m is required for the trevisan method"))?;
                    match exponent {
                        Some(t) => {
                            let code = Code::with_exponent(*n, *t)?;
                            let design = greedy_weak_design(code.log_len(), m, Ratio::from_integer(1))?;
                            let ext = TrevisanExtractor::new(code, design)?;
                            let echo = Echo::new("extract")
                                .kv("method", "trevisan")
                                .kv("n", n)
                                .kv("m", m)
                                .kv("t", t)
                                .kv("nbar", ext.code().codeword_len())
                                .kv("d", ext.seed_len())
                                .kv("rho", 1)
                                .kv("budget", "unchecked");
                            (echo, Box::new(ext))
                        }
                        None => {
                            let k = k.ok_or_else(|| anyhow!("--k is required for the trevisan method"))?;
                            let eps = eps.ok_or_else(|| anyhow!("--eps is required for the trevisan method"))?;
                            let p = trevisan_build(*n, k, m, eps)?;
                            let echo = Echo::new("extract")
                                .kv("method", "trevisan")
                                .kv("n", n)
                                .kv("k", k)
                                .kv("m", m)
                                .kv("eps", eps)
                                .kv("t", p.code.exponent())
                                .kv("nbar", p.code.codeword_len())
                                .kv("d", p.seed_len())
                                .kv("rho", 1)
                                .kv("rho_budget", p.rho_budget);
                            (echo, Box::new(p.extractor()))
                        }
                    }
                }
            };
            if seed.len() != ext.seed_len() {
                bail!("{}: seed has {} bits, expected {}", seed_file.display(), seed.len(), ext.seed_len());
            }
            let mut text = echo.path("seed_file", seed_file).path("source_file", source_file).line();
            for (i, x) in samples.iter().enumerate() {
                if x.len() != ext.input_len() {
                    bail!("{}: sample {i} has {} bits, expected {}", source_file.display(), x.len(), ext.input_len());
                }
                text.push_str(&formats::write_bits(&ext.extract(x, &seed)));
            }
            Ok(Report { text, ok: true })
        }

        Cmd::VerifyGraph {
            graph,
            kind,
            k,
            k_size,
            eps,
        } => {
            let g = in_file(graph, formats::read_graph(&read(graph)?))?;
            let mut echo = budget(Echo::new("verify-graph").path("graph", graph).kv("kind", kind_of(*kind)));
            let witness = match kind {
                GraphKind::Prefix => {
                    let k = k.ok_or_else(|| anyhow!("--k is required for the prefix check"))?;
                    echo = echo.kv("k", k).kv("eps", eps);
                    match verify_prefix_graph(&g, k, *eps, &cfg)? {
                        Verdict::Pass => None,
                        Verdict::Fail(w) => Some(TrialWitness::Prefix(w)),
                    }
                }
                GraphKind::Extractor | GraphKind::Disperser => {
                    let size = match (k_size, k) {
                        (Some(s), _) => *s,
                        (None, Some(k)) => 1usize
                            .checked_shl(*k as u32)
                            .ok_or_else(|| anyhow!("k = {k} is too large"))?,
                        (None, None) => bail!("one of --k or --k-size is required"),
                    };
                    echo = echo.kv("K", size).kv("eps", eps);
                    if *kind == GraphKind::Extractor {
                        match verify_extractor(&g, size, *eps, &cfg)? {
                            Verdict::Pass => None,
                            Verdict::Fail(w) => Some(TrialWitness::Extractor(w)),
                        }
                    } else {
                        match verify_disperser(&g, size, *eps, &cfg)? {
                            Verdict::Pass => None,
                            Verdict::Fail(w) => Some(TrialWitness::Disperser(w)),
                        }
                    }
                }
            };
            let mut text = echo.kv("N", g.left_size()).kv("M", g.right_size()).kv("D", g.degree()).line();
            match &witness {
                None => text.push_str("verdict=pass\n"),
                Some(w) => {
                    let _ = writeln!(text, "verdict=fail {w}");
                }
            }
            Ok(Report {
                text,
                ok: witness.is_none(),
            })
        }

        Cmd::GenDesign { l, m, rho } => {
            let family = greedy_weak_design(*l, *m, *rho)?;
            let verdict = verify_design(&family, DesignKind::Weak, *rho);
            let mut text = Echo::new("gen-design")
                .kv("l", l)
                .kv("m", m)
                .kv("rho", rho)
                .kv("d", family.universe())
                .line();
            text.push_str(&formats::write_design(&family));
            match verdict {
                DesignVerdict::Pass => text.push_str("# weak=pass\n"),
                DesignVerdict::Fail { j, value, .. } => {
                    let _ = writeln!(text, "# weak=fail j={j} sum={value}");
                }
            }
            Ok(Report {
                text,
                ok: verdict.passed(),
            })
        }

        Cmd::EncodeCode {
            n,
            delta,
            exponent,
            message_file,
        } => {
            let code = match (delta, exponent) {
                (_, Some(t)) => Code::with_exponent(*n, *t)?,
                (Some(d), None) => Code::build(*n, *d)?,
                (None, None) => bail!("one of --delta or --exponent is required"),
            };
            let messages = in_file(message_file, formats::read_bits_lines(&read(message_file)?))?;
            let mut text = Echo::new("encode-code")
                .kv("n", n)
                .opt("delta", *delta)
                .kv("t", code.exponent())
                .kv("coefficients", code.coefficients())
                .kv("nbar", code.codeword_len())
                .path("message_file", message_file)
                .line();
            for (i, x) in messages.iter().enumerate() {
                let c = code
                    .encode(x)
                    .map_err(|e| anyhow!("{}: message {i}: {e}", message_file.display()))?;
                text.push_str(&formats::write_bits(&c));
            }
            Ok(Report { text, ok: true })
        }

        Cmd::SampleGraph {
            left,
            right,
            degree,
            kind,
            k_size,
            eps,
            seed,
            stream,
        } => {
            let mut echo = Echo::new("sample-graph").kv("N", left).kv("M", right);
            let d = match degree {
                Some(d) => *d,
                None => {
                    let (Some(kind), Some(k_size), Some(eps)) = (kind, k_size, eps) else {
                        bail!("give --degree, or --kind, --k-size and --eps to use the existence degree");
                    };
                    let p = ExistenceParams::new(*left, *right, *k_size, *eps, kind_of(*kind))?;
                    echo = echo.kv("kind", p.kind).kv("K", k_size).kv("eps", eps);
                    usize::try_from(degree_bound(&p))?
                }
            };
            let g = sample_graph_stream(*left, *right, d, *seed, *stream);
            let mut text = echo.kv("D", d).kv("seed", seed).kv("stream", stream).line();
            text.push_str(&formats::write_graph(&g));
            Ok(Report { text, ok: true })
        }

        Cmd::ExistenceTrial {
            left,
            right,
            k_size,
            eps,
            kind,
            trials,
            seed,
            degree,
        } => {
            let p = ExistenceParams::new(*left, *right, *k_size, *eps, kind_of(*kind))?;
            let d = degree.unwrap_or_else(|| degree_bound(&p));
            let report = existence_trial_at(&p, d, *trials, *seed, &cfg)?;
            let mut text = budget(
                Echo::new("existence-trial")
                    .kv("kind", p.kind)
                    .kv("N", left)
                    .kv("M", right)
                    .kv("K", k_size)
                    .kv("eps", eps)
                    .kv("D", d)
                    .kv("trials", trials)
                    .kv("seed", seed),
            )
            .line();
            for o in &report.outcomes {
                match &o.witness {
                    None => {
                        let _ = writeln!(text, "{} {} pass", o.trial, o.seed);
                    }
                    Some(w) => {
                        let _ = writeln!(text, "{} {} fail {w}", o.trial, o.seed);
                    }
                }
            }
            let _ = writeln!(text, "pass_fraction={}", report.pass_fraction());
            Ok(Report {
                text,
                ok: report.passes() > 0,
            })
        }

        Cmd::ComposeDemo {
            n,
            d1,
            d2,
            m2,
            mu,
            m,
            seed,
            x,
            r1,
            r2,
        } => {
            if n * m2 + mu > 22 || n + d1.max(d2) > 22 {
                bail!("tables would exceed 2^22 entries; shrink n, m2, mu or the seeds");
            }
            let e1 = TableExtractor::random(*n, *d1, *d2, *seed);
            let e2 = TableExtractor::random(*n, *d2, *m2, seed.wrapping_add(1));
            let merger = ConcatMerger::new(TableExtractor::random(n * m2, *mu, *m, seed.wrapping_add(2)), *n, *m2)?;
            let trace = merger_compose_trace(&e1, &e2, &merger, x, r1, r2)?;
            let dp = iterated_compose_dp(&[&e1, &e2], &[&merger as &dyn Merger], x, r1, std::slice::from_ref(r2))?;
            let same = dp.output() == &trace.output;
            let mut text = Echo::new("compose-demo")
                .kv("n", n)
                .kv("d1", d1)
                .kv("d2", d2)
                .kv("m2", m2)
                .kv("mu", mu)
                .kv("m", m)
                .kv("seed", seed)
                .kv("x", x)
                .kv("r1", r1)
                .kv("r2", r2)
                .line();
            text.push_str("# i q_i z_i\n");
            for (i, (q, z)) in trace.q.iter().zip(&trace.z).enumerate() {
                let _ = writeln!(text, "{} {q} {z}", i + 1);
            }
            let _ = writeln!(text, "output={}", trace.output);
            let _ = writeln!(text, "dp_output={}", dp.output());
            let _ = writeln!(text, "dp_matches={same}");
            Ok(Report { text, ok: same })
        }

        Cmd::MuchnikDemo {
            graph,
            set,
            k,
            eps,
            rule,
            multi,
            k2,
        } => muchnik_demo(graph, set, *k, *eps, *rule, multi.as_deref(), *k2, &cfg, cli.max_subsets),
    }
}

#[allow(clippy::too_many_arguments)]
fn muchnik_demo(
    graph: &Path,
    set: &Path,
    k: usize,
    eps: Eps,
    rule: RuleArg,
    multi: Option<&Path>,
    k2: Option<usize>,
    cfg: &VerifyConfig,
    max_subsets: u64,
) -> Result<Report> {
    let g = in_file(graph, formats::read_graph(&read(graph)?))?;
    let s = in_file(set, formats::read_set(&read(set)?))?;
    let k_size = 1usize.checked_shl(k as u32).ok_or_else(|| anyhow!("k = {k} is too large"))?;
    let rule = match rule {
        RuleArg::All => Rule::All,
        RuleArg::Majority => Rule::Majority,
    };
    let mut echo = Echo::new("muchnik-demo")
        .path("graph", graph)
        .path("set", set)
        .kv("k", k)
        .kv("eps", eps)
        .kv("rule", rule)
        .kv("max_subsets", max_subsets);
    if let Some(p) = multi {
        echo = echo.path("multi", p).kv("k2", k2.unwrap_or(k));
    }
    let mut text = echo.line();
    let mut ok = true;

    let hypothesis = match verify_extractor(&g, k_size.min(g.left_size()), eps, cfg) {
        Ok(Verdict::Pass) => "pass".to_string(),
        Ok(Verdict::Fail(_)) => "fail".to_string(),
        Err(exkit::Error::BudgetExceeded { .. }) => "unchecked".to_string(),
        Err(e) => return Err(e.into()),
    };
    let all = Instance::new(&g, s.clone(), k_size, Rule::All)?;
    let maj = Instance::new(&g, s.clone(), k_size, Rule::Majority)?;
    let two = Ratio::from_integer(2 * k_size as u64);
    let bound_all = eps * two;
    let bound_maj = eps * two * Ratio::from_integer(2);
    let _ = writeln!(
        text,
        "extractor_check={hypothesis} set_size={} bad_right={} bad_left_all={} bound_all={} bad_left_majority={} bound_majority={}",
        s.len(),
        all.bad().bad_right.len(),
        all.bad().bad_left.len(),
        bound_all,
        maj.bad().bad_left.len(),
        bound_maj
    );
    if hypothesis == "pass"
        && (Ratio::from_integer(all.bad().bad_left.len() as u64) > bound_all
            || Ratio::from_integer(maj.bad().bad_left.len() as u64) > bound_maj)
    {
        ok = false;
        text.push_str("# bad-set bound violated on a verified graph\n");
    }

    let inst = if rule == Rule::All { &all } else { &maj };
    text.push_str("# A status X edge index decoded\n");
    for &a in s.members() {
        if !inst.is_good(a) {
            let _ = writeln!(text, "{a} bad - - - -");
            continue;
        }
        let code = inst.encode(a)?;
        let idx = inst.rank(a, code.x).ok_or_else(|| anyhow!("vertex {a} missing among its own neighbor's candidates"))?;
        let back = inst.decode(code.x, idx)?;
        let fine = back == a && inst.index_in_range(idx);
        ok &= fine;
        let _ = writeln!(text, "{a} good {} {} {idx} {back}{}", code.x, code.edge, if fine { "" } else { " MISMATCH" });
    }

    if let Some(p) = multi {
        let s2 = in_file(p, formats::read_set(&read(p)?))?;
        let k2 = k2.unwrap_or(k);
        let mut conds = vec![Condition { set: s.clone(), k }, Condition { set: s2, k: k2 }];
        conds.sort_by_key(|c| std::cmp::Reverse(c.k));
        let mi = MultiInstance::new(&g, conds.clone())?;
        text.push_str("# multi A X edge ranks decoded\n");
        for &a in conds[0].set.members() {
            match mi.encode(a) {
                Ok(code) => {
                    let back: Vec<usize> = (0..conds.len()).map(|i| mi.decode(i, &code)).collect::<exkit::Result<_>>()?;
                    let fine = back.iter().all(|&b| b == a);
                    ok &= fine;
                    let ranks: Vec<String> = code.ranks.iter().map(usize::to_string).collect();
                    let backs: Vec<String> = back.iter().map(usize::to_string).collect();
                    let _ = writeln!(text, "{a} {} {} {} {}", code.x, code.edge, ranks.join(","), backs.join(","));
                }
                Err(exkit::Error::Precondition(_)) => {
                    let _ = writeln!(text, "{a} skipped");
                }
                Err(exkit::Error::NoGoodNeighbor(_)) => {
                    ok = false;
                    let _ = writeln!(text, "{a} no-common-good-neighbor");
                }
                Err(e) => return Err(e.into()),
            }
        }
    }

    // Chain levels: right labels cut by 2·⌈log2 n⌉ more bits per level.
    if g.right_size().is_power_of_two() && g.left_size().is_power_of_two() {
        let m_bits = g.right_size().trailing_zeros() as usize;
        let n_bits = g.left_size().trailing_zeros() as usize;
        let step = 2 * exkit::combin::ceil_log2(n_bits.max(2) as u64) as usize;
        let mut graphs: Vec<BipartiteGraph> = Vec::new();
        let mut bounds = Vec::new();
        for i in 0.. {
            let shift = (i * step).min(m_bits);
            graphs.push(g.prefix_graph(shift as u32)?);
            bounds.push((k_size >> (i * step).min(usize::BITS as usize - 1)).max(1));
            if shift == m_bits {
                break;
            }
        }
        let _ = writeln!(text, "# chain step={step} depth_bound={}", chain_depth_bound(k, n_bits));
        match iterative_chain(&graphs, &bounds, &EnumerableSet::new(s.members().to_vec(), k_size)?) {
            Ok(report) => {
                for (i, lvl) in report.levels.iter().enumerate() {
                    let _ = writeln!(text, "level={i} K={} size={} good={} bad={}", bounds[i], lvl.size, lvl.good, lvl.bad);
                }
                let _ = writeln!(text, "chain_depth={} assigned={}", report.depth(), report.assignment.len());
            }
            Err(e) => {
                let _ = writeln!(text, "chain=incomplete ({e})");
            }
        }
    } else {
        text.push_str("# chain skipped: N and M must be powers of two\n");
    }
    Ok(Report { text, ok })
}
