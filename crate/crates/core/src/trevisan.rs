//! The Nisan–Wigderson generator and the Trevisan extractor
//! `TR(x, y) = NW_{x̂, S}(y)`, where `x̂` is the codeword of `x` read as a
//! truth table on `l = log2 n̄` bits.

use std::sync::OnceLock;

use num::rational::Ratio;

use crate::bits::BitString;
use crate::design::{greedy_weak_design, restrict, DesignFamily};
use crate::ecc::Code;
use crate::error::{check_len, Error, Result};
use crate::extractor::{Extractor, Strong};
use crate::rational::{check_eps, Eps};

/// `NW_{f,S}(y) = f(y|_{S_1}) … f(y|_{S_m})`, with `f` given as a truth
/// table of `2^l` bits indexed by the restricted string read as an integer.
pub fn nw_generate(f: &BitString, design: &DesignFamily, y: &BitString) -> Result<BitString> {
    let l = design.set_size();
    if l >= usize::BITS as usize || f.len() != 1 << l {
        return Err(Error::Dimension {
            what: "truth table length",
            expected: 1usize.checked_shl(l as u32).unwrap_or(0),
            found: f.len(),
        });
    }
    check_len("generator seed", design.universe(), y.len())?;
    let mut out = BitString::zeros(design.len());
    for (i, set) in design.sets().iter().enumerate() {
        if f.get(restrict(y, set).to_u64() as usize) {
            out.set(i, true);
        }
    }
    Ok(out)
}

/// `⌈log2 r⌉` of a positive rational, exact when `r` is a power of two.
pub fn ceil_log2_ratio(r: Ratio<u64>) -> i64 {
    let (p, q) = (*r.numer(), *r.denom());
    assert!(p > 0, "log of zero");
    // Least j with p ≤ 2^j·q.
    let mut j: i64 = p.ilog2() as i64 - q.ilog2() as i64 - 1;
    let fits = |j: i64| {
        if j >= 0 {
            (p as u128) <= (q as u128) << j
        } else {
            (p as u128) << (-j) <= q as u128
        }
    };
    while !fits(j) {
        j += 1;
    }
    while fits(j - 1) {
        j -= 1;
    }
    j
}

/// Parameters of a Trevisan extractor built for a `(k, ε)` guarantee.
#[derive(Clone, Debug)]
pub struct TrevisanParams {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub eps: Eps,
    /// `δ = ε/4m`.
    pub delta: Ratio<u64>,
    pub code: Code,
    pub design: DesignFamily,
    /// `log2(m/ε)`, ceiled unless exact.
    pub log_m_over_eps: i64,
    /// `ρ_budget = (k − 3·log2(m/ε) − d − 3)/m`.
    pub rho_budget: Ratio<i64>,
}

impl TrevisanParams {
    /// Seed length `d`.
    pub fn seed_len(&self) -> usize {
        self.design.universe()
    }

    pub fn extractor(&self) -> TrevisanExtractor {
        TrevisanExtractor::new(self.code.clone(), self.design.clone())
            .expect("design and code were built together")
    }
}

/// Builds the code with `δ = ε/4m` and a greedy weak design with `ρ = 1`,
/// then refuses unless `ρ_budget ≥ 1`.
pub fn trevisan_build(n: usize, k: usize, m: usize, eps: Eps) -> Result<TrevisanParams> {
    if m == 0 || m > k || k > n {
        return Err(Error::Precondition(format!(
            "need 1 <= m <= k <= n, got m = {m}, k = {k}, n = {n}"
        )));
    }
    check_eps(eps)?;
    let delta = eps / Ratio::from_integer(4 * m as u64);
    let code = Code::build(n, delta)?;
    let design = greedy_weak_design(code.log_len(), m, Ratio::from_integer(1))?;
    let d = design.universe() as i64;
    let log = ceil_log2_ratio(Ratio::from_integer(m as u64) / eps);
    let slack = k as i64 - 3 * log - d - 3;
    let rho_budget = Ratio::new(slack, m as i64);
    if slack < m as i64 {
        return Err(Error::Infeasible(format!(
            "rho budget (k - 3*log2(m/eps) - d - 3)/m = ({k} - 3*{log} - {d} - 3)/{m} = {rho_budget} is below 1"
        )));
    }
    Ok(TrevisanParams {
        n,
        k,
        m,
        eps,
        delta,
        code,
        design,
        log_m_over_eps: log,
        rho_budget,
    })
}

/// `TR(x, y) = NW_{x̂,S}(y)` for a given code and design.
#[derive(Debug)]
pub struct TrevisanExtractor {
    code: Code,
    design: DesignFamily,
    book: OnceLock<Vec<BitString>>,
}

impl Clone for TrevisanExtractor {
    fn clone(&self) -> Self {
        Self {
            code: self.code.clone(),
            design: self.design.clone(),
            book: OnceLock::new(),
        }
    }
}

/// Messages up to this length get their codewords cached on first use.
const CACHE_BITS: usize = 12;

impl TrevisanExtractor {
    pub fn new(code: Code, design: DesignFamily) -> Result<Self> {
        check_len("design set size", code.log_len(), design.set_size())?;
        Ok(Self {
            code,
            design,
            book: OnceLock::new(),
        })
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn design(&self) -> &DesignFamily {
        &self.design
    }

    /// Same code, first `m` sets of the design.
    pub fn truncated(&self, m: usize) -> Self {
        Self::new(self.code.clone(), self.design.prefix(m)).expect("same code")
    }

    /// `y ‖ TR(x, y)`.
    pub fn strong(self) -> Strong<Self> {
        Strong::new(self)
    }

    fn codeword(&self, x: &BitString) -> std::borrow::Cow<'_, BitString> {
        if self.code.message_len() <= CACHE_BITS {
            let book = self
                .book
                .get_or_init(|| self.code.codebook().expect("message length within cache size"));
            std::borrow::Cow::Borrowed(&book[x.to_u64() as usize])
        } else {
            std::borrow::Cow::Owned(self.code.encode(x).expect("length checked by caller"))
        }
    }

    pub fn eval(&self, x: &BitString, y: &BitString) -> Result<BitString> {
        check_len("trevisan source", self.code.message_len(), x.len())?;
        check_len("trevisan seed", self.design.universe(), y.len())?;
        nw_generate(&self.codeword(x), &self.design, y)
    }
}

impl Extractor for TrevisanExtractor {
    fn input_len(&self) -> usize {
        self.code.message_len()
    }
    fn seed_len(&self) -> usize {
        self.design.universe()
    }
    fn output_len(&self) -> usize {
        self.design.len()
    }
    fn extract(&self, x: &BitString, y: &BitString) -> BitString {
        self.eval(x, y).expect("trevisan argument lengths")
    }
}

/// `TR(x, y)` for built parameters.
pub fn trevisan_eval(p: &TrevisanParams, x: &BitString, y: &BitString) -> Result<BitString> {
    p.extractor().eval(x, y)
}
