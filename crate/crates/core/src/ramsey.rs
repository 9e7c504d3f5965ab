//! Opposite-Ramsey numbers by exhaustive enumeration, classical Ramsey bound
//! formulas, and the statements a colored graph implies about them.

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::action::ShiftSystem;
use crate::cliques::{max_clique, Adjacency, RamseyCertificate};
use crate::colorer::{graph_checksum, ColoredGraph};
use crate::error::{Error, Result};

/// Default cap on the number of colorings enumerated.
pub const DEFAULT_COLORING_CAP: u64 = 1 << 26;

/// Upper-triangular edge list of `K_q`, in `(i < j)` order.
fn edge_list(q: usize) -> Vec<(usize, usize)> {
    (0..q)
        .flat_map(|i| (i + 1..q).map(move |j| (i, j)))
        .collect()
}

/// Whether the graph given by bitmask rows has a clique of `need` vertices inside `cand`.
fn has_clique(rows: &[u64], cand: u64, need: u32) -> bool {
    if need == 0 {
        return true;
    }
    if cand.count_ones() < need {
        return false;
    }
    let mut rest = cand;
    while rest.count_ones() >= need {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if has_clique(rows, rest & rows[v], need - 1) {
            return true;
        }
    }
    false
}

/// Every `p`-coloring of `K_q`'s edges, as a mixed-radix counter whose most
/// significant digit is edge `(0, 1)`.
struct ColoringSpace {
    p: u32,
    q: usize,
    edges: Vec<(usize, usize)>,
}

impl ColoringSpace {
    fn new(p: u32, q: usize, cap: u64) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidParameter("need at least one color".into()));
        }
        if !(2..=64).contains(&q) {
            return Err(Error::InvalidParameter(format!("order {q} outside 2..=64")));
        }
        let edges = edge_list(q);
        let total = BigUint::from(p).pow(edges.len() as u32);
        if total > BigUint::from(cap) {
            return Err(Error::cap(&format!("{p}-colorings of K_{q}"), total, cap));
        }
        Ok(ColoringSpace { p, q, edges })
    }

    /// Number of leading digits fixed per parallel chunk.
    fn prefix_len(&self) -> usize {
        let mut len = 0;
        let mut chunks = 1u64;
        while len < self.edges.len() && chunks < 256 {
            chunks *= self.p as u64;
            len += 1;
        }
        len
    }

    fn chunk_count(&self) -> u64 {
        (self.p as u64).pow(self.prefix_len() as u32)
    }

    /// Visits the colorings of chunk `chunk` in order until `visit` returns `false`.
    fn for_each_in_chunk(&self, chunk: u64, mut visit: impl FnMut(&[u32], &[Vec<u64>]) -> bool) {
        let prefix = self.prefix_len();
        let e = self.edges.len();
        let mut digits = vec![0u32; e];
        let mut c = chunk;
        for d in (0..prefix).rev() {
            digits[d] = (c % self.p as u64) as u32;
            c /= self.p as u64;
        }
        let mut rows = vec![vec![0u64; self.q]; self.p as usize];
        loop {
            for r in rows.iter_mut() {
                r.iter_mut().for_each(|w| *w = 0);
            }
            for (&(i, j), &d) in self.edges.iter().zip(&digits) {
                rows[d as usize][i] |= 1 << j;
                rows[d as usize][j] |= 1 << i;
            }
            if !visit(&digits, &rows) {
                return;
            }
            // Increment the suffix; stop when it wraps into the prefix.
            let mut pos = e;
            loop {
                if pos == prefix {
                    return;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < self.p {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    fn all(&self) -> u64 {
        u64::MAX >> (64 - self.q)
    }

    fn has_mono_clique(&self, rows: &[Vec<u64>], k: u32) -> bool {
        let all = self.all();
        rows.iter().any(|r| has_clique(r, all, k))
    }

    fn max_mono_clique(&self, rows: &[Vec<u64>]) -> u32 {
        let mut m = 1;
        while m < self.q as u32 && self.has_mono_clique(rows, m + 1) {
            m += 1;
        }
        m
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OppositeRamseyResult {
    pub p: u32,
    pub q: usize,
    pub r: u32,
    /// Edge colors in `(i < j)` order; no monochromatic clique exceeds `r`.
    pub extremal_coloring: Vec<u32>,
}

pub fn opposite_ramsey_exact(p: u32, q: usize) -> Result<OppositeRamseyResult> {
    opposite_ramsey_exact_with_cap(p, q, DEFAULT_COLORING_CAP)
}

/// `r(p, q)`: the minimum over all `p`-colorings of `K_q` of the largest
/// monochromatic clique, with the first coloring (in counter order) attaining it.
pub fn opposite_ramsey_exact_with_cap(p: u32, q: usize, cap: u64) -> Result<OppositeRamseyResult> {
    let space = ColoringSpace::new(p, q, cap)?;
    // Any edge is a monochromatic K_2.
    let floor = 2;
    let chunk_best: Vec<Option<(u32, Vec<u32>)>> = (0..space.chunk_count())
        .into_par_iter()
        .map(|chunk| {
            let mut best: Option<(u32, Vec<u32>)> = None;
            space.for_each_in_chunk(chunk, |digits, rows| {
                let bound = best.as_ref().map_or(q as u32 + 1, |b| b.0);
                if bound <= q as u32 && space.has_mono_clique(rows, bound) {
                    return true;
                }
                let m = space.max_mono_clique(rows);
                best = Some((m, digits.to_vec()));
                m > floor
            });
            best
        })
        .collect();
    let (r, extremal_coloring) = chunk_best
        .into_iter()
        .flatten()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one coloring");
    Ok(OppositeRamseyResult {
        p,
        q,
        r,
        extremal_coloring,
    })
}

pub fn ramsey_holds(p: u32, k: u32, q: usize) -> Result<bool> {
    ramsey_holds_with_cap(p, k, q, DEFAULT_COLORING_CAP)
}

/// Whether every `p`-coloring of `K_q` has a monochromatic `K_k`.
pub fn ramsey_holds_with_cap(p: u32, k: u32, q: usize, cap: u64) -> Result<bool> {
    let space = ColoringSpace::new(p, q, cap)?;
    if k as usize > q {
        return Ok(false);
    }
    Ok((0..space.chunk_count()).into_par_iter().all(|chunk| {
        let mut holds = true;
        space.for_each_in_chunk(chunk, |_, rows| {
            holds = space.has_mono_clique(rows, k);
            holds
        });
        holds
    }))
}

/// Largest monochromatic clique of an explicit coloring, through the clique module.
pub fn coloring_max_mono_clique(p: u32, q: usize, coloring: &[u32]) -> Result<usize> {
    if coloring.len() != q * q.saturating_sub(1) / 2 {
        return Err(Error::InvalidParameter(
            "coloring length does not match K_q".into(),
        ));
    }
    if let Some(&c) = coloring.iter().find(|&&c| c >= p) {
        return Err(Error::UnknownColor(c));
    }
    let mut best = q.min(1);
    for c in 0..p {
        best = best.max(max_clique(&Adjacency::from_coloring(q, coloring, c))?.order);
    }
    Ok(best)
}

/// Greenwood–Gleason upper bound `R_g(k) <= g^(g k)`.
pub fn gg_upper(g: u32, k: u32) -> Result<BigUint> {
    if g == 0 || k == 0 {
        return Err(Error::InvalidParameter("g and k must be positive".into()));
    }
    Ok(BigUint::from(g).pow(g * k))
}

/// Lefmann–Rödl style lower bound `2^ceil(c g k)` with a caller-chosen constant.
pub fn lr_lower(g: u32, k: u32, c: Ratio<u64>) -> Result<BigUint> {
    if c.numer().is_zero() {
        return Err(Error::InvalidParameter(
            "constant c must be positive".into(),
        ));
    }
    let scaled = c * Ratio::from_integer(g as u64 * k as u64);
    let exponent = scaled.ceil().to_integer();
    let exponent = u32::try_from(exponent)
        .map_err(|_| Error::InvalidParameter(format!("exponent {exponent} too large")))?;
    Ok(BigUint::one() << exponent)
}

/// Rational bracket `[lower, upper]` around e from the first `terms` factorial terms.
fn e_bracket(terms: u32) -> (BigRational, BigRational) {
    let mut sum = BigRational::zero();
    let mut fact = BigInt::one();
    for j in 0..=terms {
        if j > 0 {
            fact *= j;
        }
        sum += BigRational::new(BigInt::one(), fact.clone());
    }
    // Tail after term J is below 1 / (J! J).
    let tail = BigRational::new(BigInt::one(), fact * terms.max(1));
    (sum.clone(), sum + tail)
}

/// Whether `e^m <= n`, decided exactly.
fn exp_at_most(m: u32, n: u64) -> bool {
    if m == 0 {
        return n >= 1;
    }
    let target = BigRational::from_integer(BigInt::from(n));
    let mut terms = 20;
    loop {
        let (lo, hi) = e_bracket(terms);
        let (lo, hi) = (
            num_traits::pow(lo, m as usize),
            num_traits::pow(hi, m as usize),
        );
        if hi < target {
            return true;
        }
        if lo > target {
            return false;
        }
        // e^m is irrational, so a finer bracket always separates it from n.
        terms += 10;
    }
}

/// `floor(ln n) + 1`, exactly.
pub fn floor_log_shift(n: u64) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "floor_log_shift needs n >= 1".into(),
        ));
    }
    let mut m = (n as f64).ln().floor().max(0.0) as u32;
    while m > 0 && !exp_at_most(m, n) {
        m -= 1;
    }
    while exp_at_most(m + 1, n) {
        m += 1;
    }
    Ok(m + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The certified lower bound does not exceed the illustrative `2^(c g k)`.
    WeakerThanLrLower,
    /// The certified lower bound exceeds the illustrative `2^(c g k)`.
    ExceedsLrLower,
    /// The certified upper bound improves on `g^(g k)`.
    TighterThanGgUpper,
    NoBetterThanGgUpper,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Statement {
    pub text: String,
    pub p: u64,
    pub k: u64,
    pub q: u64,
    pub lr_lower: String,
    pub gg_upper: String,
    pub verdict: Verdict,
    /// Set when an upper bound falls below the illustrative lower bound,
    /// i.e. the chosen constant is not a valid lower-bound constant here.
    pub conflicts_with_lr_lower: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub p: u64,
    pub q: u64,
    pub lr_constant: String,
    pub lr_constant_note: String,
    pub statements: Vec<Statement>,
}

/// What a sandwich report is derived from.
pub enum Evidence<'a> {
    /// A constructed coloring certifying `r(p, q) <= r_upper`.
    Coloring {
        r_upper: usize,
        certificate: &'a RamseyCertificate,
        graph: &'a ColoredGraph<ShiftSystem>,
    },
    /// An exact opposite-Ramsey value with its extremal coloring.
    Exact(&'a OppositeRamseyResult),
}

fn lower_statement(p: u64, k: u64, q: u64, c: Ratio<u64>) -> Result<Statement> {
    let (gk, kk) = (to_u32(p)?, to_u32(k)?);
    let lr = lr_lower(gk, kk, c)?;
    let gg = gg_upper(gk, kk)?;
    let certified = BigUint::from(q) + 1u32;
    Ok(Statement {
        text: format!("R_{p}({k}) > {q}"),
        p,
        k,
        q,
        verdict: if certified <= lr {
            Verdict::WeakerThanLrLower
        } else {
            Verdict::ExceedsLrLower
        },
        lr_lower: lr.to_string(),
        gg_upper: gg.to_string(),
        conflicts_with_lr_lower: false,
    })
}

fn upper_statement(p: u64, k: u64, q: u64, c: Ratio<u64>) -> Result<Statement> {
    let (gk, kk) = (to_u32(p)?, to_u32(k)?);
    let lr = lr_lower(gk, kk, c)?;
    let gg = gg_upper(gk, kk)?;
    let q_big = BigUint::from(q);
    Ok(Statement {
        text: format!("R_{p}({k}) <= {q}"),
        p,
        k,
        q,
        verdict: if q_big < gg {
            Verdict::TighterThanGgUpper
        } else {
            Verdict::NoBetterThanGgUpper
        },
        conflicts_with_lr_lower: q_big < lr,
        lr_lower: lr.to_string(),
        gg_upper: gg.to_string(),
    })
}

fn to_u32(x: u64) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::InvalidParameter(format!("{x} too large")))
}

/// The classical Ramsey statements implied by the evidence, compared with
/// `lr_lower(p, k, c)` and `gg_upper(p, k)`. The constant `c` is illustrative.
pub fn sandwich_report(
    p: u64,
    q: u64,
    evidence: Evidence<'_>,
    c: Ratio<u64>,
) -> Result<SandwichReport> {
    let statements = match evidence {
        Evidence::Coloring {
            r_upper,
            certificate,
            graph,
        } => {
            let checksum = graph_checksum(graph);
            let expected_k = r_upper as u64 + 1;
            let mismatch = if certificate.graph_checksum != checksum {
                Some(format!(
                    "checksum {} but graph hashes to {checksum}",
                    certificate.graph_checksum
                ))
            } else if (certificate.p, certificate.q) != (p, q) || graph.vertex_count() as u64 != q {
                Some(format!(
                    "certificate is for p = {}, q = {}",
                    certificate.p, certificate.q
                ))
            } else if graph.palette_size() as u64 != p {
                Some(format!(
                    "graph has {} colors, expected {p}",
                    graph.palette_size()
                ))
            } else if certificate.k != expected_k {
                Some(format!(
                    "certificate k = {} but r_upper + 1 = {expected_k}",
                    certificate.k
                ))
            } else if !certificate.verified {
                Some("certificate was not verified".into())
            } else {
                None
            };
            if let Some(m) = mismatch {
                return Err(Error::InconsistentCertificate(m));
            }
            vec![lower_statement(p, expected_k, q, c)?]
        }
        Evidence::Exact(result) => {
            if (result.p as u64, result.q as u64) != (p, q) {
                return Err(Error::InconsistentCertificate(format!(
                    "exact result is for r({}, {})",
                    result.p, result.q
                )));
            }
            let achieved = coloring_max_mono_clique(result.p, result.q, &result.extremal_coloring)?;
            if achieved != result.r as usize {
                return Err(Error::InconsistentCertificate(format!(
                    "extremal coloring has a monochromatic clique of order {achieved}, not {}",
                    result.r
                )));
            }
            let r = result.r as u64;
            vec![
                upper_statement(p, r, q, c)?,
                lower_statement(p, r + 1, q, c)?,
            ]
        }
    };
    Ok(SandwichReport {
        p,
        q,
        lr_constant: format!("{}/{}", c.numer(), c.denom()),
        lr_constant_note: "illustrative: the asymptotic lower-bound constant is unspecified".into(),
        statements,
    })
}
