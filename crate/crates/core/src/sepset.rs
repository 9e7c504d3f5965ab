//! Separated sets, separated counts of the full shift, and growth checks.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::action::Action;
use crate::error::{Error, Result};
use crate::ramsey::floor_log_shift;

/// What a separated set is maximal with respect to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Maximality {
    /// The input stream enumerated the whole space; no point can be added.
    Exhaustive,
    /// Maximal only among the points of the supplied stream.
    Stream,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedSet<P, D> {
    pub points: Vec<P>,
    pub epsilon: D,
    pub maximal_wrt: Maximality,
}

impl<P, D> SeparatedSet<P, D> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// First-fit greedy: keeps a point iff it is at distance `>= epsilon` from
/// every point kept so far. Every rejected point is within `epsilon` of a
/// kept one, so the result is maximal with respect to the stream.
pub fn greedy_separated<A, I>(
    system: &A,
    stream: I,
    epsilon: A::Dist,
    maximal_wrt: Maximality,
) -> Result<SeparatedSet<A::Point, A::Dist>>
where
    A: Action,
    I: IntoIterator<Item = A::Point>,
{
    let mut kept: Vec<A::Point> = Vec::new();
    'candidates: for p in stream {
        for q in &kept {
            if system.distance(&p, q)? < epsilon {
                continue 'candidates;
            }
        }
        kept.push(p);
    }
    Ok(SeparatedSet {
        points: kept,
        epsilon,
        maximal_wrt,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationCheck {
    pub separated: bool,
    /// First pair `(i, j)`, `i < j`, in row order closer than epsilon.
    pub violation: Option<(usize, usize)>,
}

/// Whether all distinct members are pairwise at distance `>= epsilon`.
pub fn separation_check<A: Action>(
    system: &A,
    points: &[A::Point],
    epsilon: A::Dist,
) -> Result<SeparationCheck> {
    let hit = (0..points.len())
        .into_par_iter()
        .map(|i| -> Result<Option<(usize, usize)>> {
            for j in i + 1..points.len() {
                if system.distance(&points[i], &points[j])? < epsilon {
                    return Ok(Some((i, j)));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    let violation = hit.transpose()?.flatten();
    Ok(SeparationCheck {
        separated: violation.is_none(),
        violation,
    })
}

/// `S(alpha^-n) = k^((2n+1)^2)` for the full shift over `k` symbols.
///
/// Distinct period-`(2n+1)` patterns differ somewhere in the radius-`n`
/// window, which is a fundamental domain; any larger family has two members
/// agreeing on that window, hence closer than `alpha^-n`.
pub fn s_count_shift_exact(k: u32, n: u32) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {k} < 2")));
    }
    let side = 2 * n + 1;
    Ok(BigUint::from(k).pow(side * side))
}

/// A positive count, exact or as a power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Count {
    Exact(BigUint),
    Power { base: u64, exponent: u64 },
}

impl Count {
    /// Natural logarithm.
    pub fn ln(&self) -> f64 {
        self.log2() * std::f64::consts::LN_2
    }

    pub fn log2(&self) -> f64 {
        match self {
            Count::Power { base, exponent } => *exponent as f64 * (*base as f64).log2(),
            Count::Exact(c) => {
                let bits = c.bits();
                if bits <= 1000 {
                    c.to_f64().expect("fits in f64").log2()
                } else {
                    let shift = bits - 64;
                    (c >> shift).to_f64().expect("64 bits").log2() + shift as f64
                }
            }
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Count::Exact(c) => c.clone(),
            Count::Power { base, exponent } => {
                let mut acc = BigUint::from(1u32);
                let b = BigUint::from(*base);
                for _ in 0..*exponent {
                    acc *= &b;
                }
                acc
            }
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Count::Exact(c) => !c.is_zero(),
            Count::Power { base, .. } => *base > 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthEntry {
    pub n: u32,
    pub count: Count,
}

/// Separated counts `q(n) = S(alpha^-n)` indexed by strictly increasing `n`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GrowthSequence {
    entries: Vec<GrowthEntry>,
}

impl GrowthSequence {
    pub fn new(entries: Vec<GrowthEntry>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].n >= w[1].n) {
            return Err(Error::InvalidParameter(
                "growth sequence n must increase strictly".into(),
            ));
        }
        if let Some(e) = entries.iter().find(|e| !e.count.is_positive()) {
            return Err(Error::InvalidParameter(format!(
                "count at n = {} is not positive",
                e.n
            )));
        }
        Ok(GrowthSequence { entries })
    }

    /// `q(n) = k^((2n+1)^2)` for `n` in `range`.
    pub fn shift_closed_form(k: u64, range: std::ops::RangeInclusive<u32>) -> Self {
        GrowthSequence {
            entries: range
                .map(|n| GrowthEntry {
                    n,
                    count: Count::Power {
                        base: k,
                        exponent: (2 * n as u64 + 1).pow(2),
                    },
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[GrowthEntry] {
        &self.entries
    }

    pub fn get(&self, n: u32) -> Option<&Count> {
        self.entries
            .binary_search_by_key(&n, |e| e.n)
            .ok()
            .map(|i| &self.entries[i].count)
    }

    /// CSV with header `n,count_log2,term`; `term` is the dimension term at base `alpha`.
    pub fn to_csv(&self, alpha: f64) -> Result<String> {
        let terms = dimension_sequence(self, alpha)?;
        let mut out = String::from("n,count_log2,term\n");
        for (e, t) in self.entries.iter().zip(terms) {
            writeln!(out, "{},{:.10},{:.10}", e.n, e.count.log2(), t).expect("write to String");
        }
        Ok(out)
    }
}

/// `log S(alpha^-n) / (n log alpha)` for each entry.
pub fn dimension_sequence(counts: &GrowthSequence, alpha: f64) -> Result<Vec<f64>> {
    if counts.entries.is_empty() {
        return Err(Error::InvalidParameter("empty growth sequence".into()));
    }
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must exceed 1, got {alpha}"
        )));
    }
    counts
        .entries
        .iter()
        .map(|e| {
            if e.n == 0 {
                return Err(Error::InvalidParameter(
                    "dimension term undefined at n = 0".into(),
                ));
            }
            Ok(e.count.ln() / (e.n as f64 * alpha.ln()))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SuperpolyMode {
    /// `log q(n) - n log A` strictly increasing and positive from `n0`.
    ExponentialRatio { base: f64 },
    /// `log q(floor(log m) + 1) - degree * log m` diverging over `m` up to `grid_max`.
    LogComposition { degree: u32, grid_max: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuperpolyReport {
    pub mode: SuperpolyMode,
    pub established: bool,
    /// `(argument, gap)` pairs, natural log units.
    pub samples: Vec<(u64, f64)>,
    /// Log-composition mode only: per `j = floor(log m)`, the infimum of the gap
    /// over `m` in `[e^j, e^(j+1))`, namely `log q(j + 1) - degree (j + 1)`.
    pub segment_floors: Vec<(u32, f64)>,
}

/// Geometric grid `ceil(10^(i/4))` for `i = 0, 1, ...` up to `max`, deduplicated.
fn geometric_grid(max: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = Vec::new();
    for i in 0.. {
        let m = 10f64.powf(i as f64 / 4.0).ceil() as u64;
        if m > max {
            break;
        }
        if grid.last() != Some(&m) {
            grid.push(m);
        }
    }
    if grid.last() != Some(&max) {
        grid.push(max);
    }
    grid
}

fn strictly_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] > w[0])
}

/// Checks super-polynomial growth of `q` numerically.
///
/// Exponential-ratio mode compares `q(n)` with `A^n` for `n >= n0`.
/// Log-composition mode evaluates `q(floor(log m) + 1)` against `m^degree` on a
/// geometric grid; since that gap is a step function that dips within each
/// step, divergence is judged on the per-step infimum, which must increase
/// strictly with strictly increasing increments.
pub fn superpoly_check(
    q: &GrowthSequence,
    mode: SuperpolyMode,
    n0: u32,
) -> Result<SuperpolyReport> {
    match mode {
        SuperpolyMode::ExponentialRatio { base } => {
            if base.is_nan() || base <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "base {base} must be positive"
                )));
            }
            let samples: Vec<(u64, f64)> = q
                .entries
                .iter()
                .filter(|e| e.n >= n0)
                .map(|e| (e.n as u64, e.count.ln() - e.n as f64 * base.ln()))
                .collect();
            if samples.len() < 3 {
                return Err(Error::RangeTooSmall(samples.len()));
            }
            let gaps: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let established = gaps[0] > 0.0 && strictly_increasing(&gaps);
            Ok(SuperpolyReport {
                mode,
                established,
                samples,
                segment_floors: Vec::new(),
            })
        }
        SuperpolyMode::LogComposition { degree, grid_max } => {
            let grid: Vec<u64> = geometric_grid(grid_max)
                .into_iter()
                .filter(|&m| m >= n0.max(1) as u64)
                .collect();
            if grid.len() < 3 {
                return Err(Error::RangeTooSmall(grid.len()));
            }
            let lookup = |arg: u32| {
                q.get(arg).ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "growth sequence lacks q({arg}) needed for the grid"
                    ))
                })
            };
            let samples = grid
                .iter()
                .map(|&m| {
                    Ok((
                        m,
                        lookup(floor_log_shift(m)?)?.ln() - degree as f64 * (m as f64).ln(),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let first = floor_log_shift(grid[0])? - 1;
            let last = floor_log_shift(grid_max)? - 1;
            let segment_floors = (first..=last)
                .map(|j| Ok((j, lookup(j + 1)?.ln() - degree as f64 * (j + 1) as f64)))
                .collect::<Result<Vec<_>>>()?;
            let floors: Vec<f64> = segment_floors.iter().map(|s| s.1).collect();
            let increments: Vec<f64> = floors.windows(2).map(|w| w[1] - w[0]).collect();
            let established = floors.len() >= 3
                && strictly_increasing(&floors)
                && strictly_increasing(&increments);
            Ok(SuperpolyReport {
                mode,
                established,
                samples,
                segment_floors,
            })
        }
    }
}
