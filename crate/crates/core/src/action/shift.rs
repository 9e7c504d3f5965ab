use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::lattice::{scan_ball, LatticeVector};
use super::Action;
use crate::error::{Error, Result};
use crate::rng::{below, mix64};

/// Largest pattern count `enumerate_periodic_points` will produce by default.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1 << 25;

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// The metric base `alpha = num / den > 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alpha {
    pub num: u64,
    pub den: u64,
}

impl Alpha {
    pub const TWO: Alpha = Alpha { num: 2, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num <= den {
            return Err(Error::InvalidParameter(format!(
                "alpha must be a rational > 1, got {num}/{den}"
            )));
        }
        Ok(Alpha { num, den })
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Largest `m` with `alpha^m <= 4 alpha`, so that exponent `<= m` is
    /// exactly "distance `>= 1/(4 alpha)`".
    pub fn separation_exponent(self) -> u32 {
        // alpha^m <= 4 alpha  <=>  num^m * den <= 4 * num * den^m
        let num = BigUint::from(self.num);
        let den = BigUint::from(self.den);
        let rhs_base = BigUint::from(4u32) * &num;
        let mut m = 1u32;
        let mut num_pow = num.clone();
        let mut den_pow = den.clone();
        loop {
            let next_num = &num_pow * &num;
            let next_den = &den_pow * &den;
            if &next_num * &den > &rhs_base * &next_den {
                return m;
            }
            num_pow = next_num;
            den_pow = next_den;
            m += 1;
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Alpha {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse alpha {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?),
            None => (s.parse().map_err(|_| bad())?, 1),
        };
        Alpha::new(num, den)
    }
}

/// Shift distance `alpha^-m`, kept as the exponent `m`.
///
/// Ordered by the distance it denotes: `Equal` (zero) is the smallest, and a
/// smaller exponent is a larger distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDistance {
    Exponent(u32),
    Equal,
}

impl ShiftDistance {
    pub fn exponent(self) -> Option<u32> {
        match self {
            ShiftDistance::Exponent(m) => Some(m),
            ShiftDistance::Equal => None,
        }
    }
}

impl Ord for ShiftDistance {
    fn cmp(&self, other: &Self) -> Ordering {
        use ShiftDistance::*;
        match (self, other) {
            (Equal, Equal) => Ordering::Equal,
            (Equal, Exponent(_)) => Ordering::Less,
            (Exponent(_), Equal) => Ordering::Greater,
            (Exponent(a), Exponent(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for ShiftDistance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ShiftDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShiftDistance::Exponent(m) => write!(f, "alpha^-{m}"),
            ShiftDistance::Equal => f.write_str("equal"),
        }
    }
}

/// A doubly periodic point of the full shift: `x(v) = pattern[v mod w]`.
///
/// Cell `(a, b)` with `0 <= a, b < w` is stored at `a * w + b`, so the text
/// encoding lists rows of constant first coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PeriodicConfiguration {
    k: u8,
    w: u32,
    cells: Vec<u8>,
}

impl PeriodicConfiguration {
    pub fn new(k: u8, w: u32, cells: Vec<u8>) -> Result<Self> {
        if !(2..=36).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "alphabet size {k} outside 2..=36"
            )));
        }
        if w == 0 {
            return Err(Error::InvalidParameter("period must be positive".into()));
        }
        if cells.len() != (w as usize) * (w as usize) {
            return Err(Error::InvalidParameter(format!(
                "period {w} needs {} cells, got {}",
                w as usize * w as usize,
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&c| c >= k) {
            return Err(Error::InvalidParameter(format!(
                "symbol {bad} outside alphabet of size {k}"
            )));
        }
        Ok(PeriodicConfiguration { k, w, cells })
    }

    /// The constant configuration.
    pub fn constant(k: u8, w: u32, symbol: u8) -> Result<Self> {
        Self::new(k, w, vec![symbol; (w as usize) * (w as usize)])
    }

    pub fn alphabet_size(&self) -> u8 {
        self.k
    }

    pub fn period(&self) -> u32 {
        self.w
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    fn index(&self, v: LatticeVector) -> usize {
        let w = self.w as i64;
        (v.x.rem_euclid(w) * w + v.y.rem_euclid(w)) as usize
    }

    /// `x(v)` for any `v` in Z².
    pub fn get(&self, v: LatticeVector) -> u8 {
        self.cells[self.index(v)]
    }

    /// Sets the whole coset `v + wZ²` to `symbol`.
    pub fn set(&mut self, v: LatticeVector, symbol: u8) -> Result<()> {
        if symbol >= self.k {
            return Err(Error::InvalidParameter(format!(
                "symbol {symbol} outside alphabet"
            )));
        }
        let i = self.index(v);
        self.cells[i] = symbol;
        Ok(())
    }

    /// `k<k>:w<w>:<cells in base 36>`.
    pub fn encode(&self) -> String {
        let mut s = format!("k{}:w{}:", self.k, self.w);
        s.extend(self.cells.iter().map(|&c| DIGITS[c as usize] as char));
        s
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.k != other.k || self.w != other.w {
            return Err(Error::MismatchedSystems(format!(
                "k{}:w{} vs k{}:w{}",
                self.k, self.w, other.k, other.w
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PeriodicConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl FromStr for PeriodicConfiguration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidParameter(format!("pattern {s:?}: {m}"));
        let mut parts = s.splitn(3, ':');
        let k = parts
            .next()
            .and_then(|p| p.strip_prefix('k'))
            .and_then(|p| p.parse::<u8>().ok())
            .ok_or_else(|| bad("missing k<k>"))?;
        let w = parts
            .next()
            .and_then(|p| p.strip_prefix('w'))
            .and_then(|p| p.parse::<u32>().ok())
            .ok_or_else(|| bad("missing w<w>"))?;
        let body = parts.next().ok_or_else(|| bad("missing cells"))?;
        let cells = body
            .bytes()
            .map(|b| match b {
                b'0'..=b'9' => Ok(b - b'0'),
                b'a'..=b'z' => Ok(b - b'a' + 10),
                _ => Err(bad("non base-36 digit")),
            })
            .collect::<Result<Vec<u8>>>()?;
        PeriodicConfiguration::new(k, w, cells)
    }
}

/// Minimum sup-norm of a coordinate where `x` and `y` differ, as a distance.
///
/// The differing set is `w`-periodic, so scanning `|v| <= w` finds it when nonempty.
pub fn shift_min_diff(
    x: &PeriodicConfiguration,
    y: &PeriodicConfiguration,
) -> Result<ShiftDistance> {
    Ok(match min_diff_vector(x, y)? {
        Some(v) => ShiftDistance::Exponent(v.norm() as u32),
        None => ShiftDistance::Equal,
    })
}

/// The first differing coordinate in scan order, or `None` for identical points.
pub(crate) fn min_diff_vector(
    x: &PeriodicConfiguration,
    y: &PeriodicConfiguration,
) -> Result<Option<LatticeVector>> {
    x.check_compatible(y)?;
    if x.cells == y.cells {
        return Ok(None);
    }
    Ok(scan_ball(x.w).find(|&v| x.get(v) != y.get(v)))
}

/// The full shift over `k` symbols with metric base `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftSystem {
    k: u8,
    alpha: Alpha,
    separation_exponent: u32,
}

impl ShiftSystem {
    pub fn new(k: u8, alpha: Alpha) -> Result<Self> {
        if !(2..=36).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "alphabet size {k} outside 2..=36"
            )));
        }
        Ok(ShiftSystem {
            k,
            alpha,
            separation_exponent: alpha.separation_exponent(),
        })
    }

    pub fn binary() -> Self {
        Self::new(2, Alpha::TWO).expect("k = 2, alpha = 2 is valid")
    }

    pub fn alphabet_size(&self) -> u8 {
        self.k
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// Exponent `t` with "distance `>= 1/(4 alpha)`" iff "exponent `<= t`". 3 for `alpha = 2`.
    pub fn separation_exponent(&self) -> u32 {
        self.separation_exponent
    }

    /// Whether `d >= 1/(4 alpha)`.
    pub fn is_separated(&self, d: ShiftDistance) -> bool {
        d >= self.separation_floor()
    }

    fn check_point(&self, x: &PeriodicConfiguration) -> Result<()> {
        if x.k != self.k {
            return Err(Error::MismatchedSystems(format!(
                "point over {} symbols, system over {}",
                x.k, self.k
            )));
        }
        Ok(())
    }
}

impl Action for ShiftSystem {
    type Point = PeriodicConfiguration;
    type Dist = ShiftDistance;

    /// Cyclic translation: the result satisfies `x'(u) = x(u + v)`.
    fn apply(&self, v: LatticeVector, x: &PeriodicConfiguration) -> Result<PeriodicConfiguration> {
        self.check_point(x)?;
        let w = x.w as i64;
        let mut cells = Vec::with_capacity(x.cells.len());
        for a in 0..w {
            for b in 0..w {
                cells.push(x.get(LatticeVector::new(a + v.x, b + v.y)));
            }
        }
        Ok(PeriodicConfiguration {
            k: x.k,
            w: x.w,
            cells,
        })
    }

    fn distance(
        &self,
        x: &PeriodicConfiguration,
        y: &PeriodicConfiguration,
    ) -> Result<ShiftDistance> {
        self.check_point(x)?;
        self.check_point(y)?;
        shift_min_diff(x, y)
    }

    fn shifted_distance(
        &self,
        v: LatticeVector,
        x: &PeriodicConfiguration,
        y: &PeriodicConfiguration,
    ) -> Result<ShiftDistance> {
        self.check_point(x)?;
        self.check_point(y)?;
        x.check_compatible(y)?;
        if x.cells == y.cells {
            return Ok(ShiftDistance::Equal);
        }
        let hit = scan_ball(x.w).find(|&u| x.get(u + v) != y.get(u + v));
        Ok(match hit {
            Some(u) => ShiftDistance::Exponent(u.norm() as u32),
            None => ShiftDistance::Equal,
        })
    }

    fn scale(&self, n: u32) -> ShiftDistance {
        ShiftDistance::Exponent(n)
    }

    fn separation_floor(&self) -> ShiftDistance {
        ShiftDistance::Exponent(self.separation_exponent)
    }

    fn diameter(&self) -> Option<ShiftDistance> {
        Some(ShiftDistance::Exponent(0))
    }
}

/// Total number of period-`w` patterns, `k^(w^2)`.
pub fn periodic_point_count(k: u8, w: u32) -> BigUint {
    BigUint::from(k).pow(w * w)
}

/// Every period-`w` pattern over `k` symbols, in lexicographic cell order.
pub struct PatternStream {
    k: u8,
    w: u32,
    next: Option<Vec<u8>>,
}

impl Iterator for PatternStream {
    type Item = PeriodicConfiguration;

    fn next(&mut self) -> Option<PeriodicConfiguration> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut carry = true;
        for cell in succ.iter_mut().rev() {
            if *cell + 1 < self.k {
                *cell += 1;
                carry = false;
                break;
            }
            *cell = 0;
        }
        if !carry {
            self.next = Some(succ);
        }
        Some(PeriodicConfiguration {
            k: self.k,
            w: self.w,
            cells: current,
        })
    }
}

/// Streams all `k^(w^2)` patterns, first all-zero and last all-`(k-1)`.
pub fn enumerate_periodic_points(k: u8, w: u32, cap: u64) -> Result<PatternStream> {
    PeriodicConfiguration::constant(k, w, 0)?;
    let total = periodic_point_count(k, w);
    if total > BigUint::from(cap) {
        return Err(Error::cap(
            &format!("enumeration of k={k}, w={w} patterns"),
            total,
            cap,
        ));
    }
    Ok(PatternStream {
        k,
        w,
        next: Some(vec![0; (w * w) as usize]),
    })
}

const SHUFFLE_LIMIT: u64 = 1 << 20;

/// `m` distinct period-`w` patterns chosen deterministically from `seed`.
///
/// When `m` is at least half of a universe of at most 2^20 patterns, the full
/// enumeration is Fisher-Yates shuffled (step `i` swaps position `i` with
/// `i + below(seed, i, len - i)`) and truncated. Otherwise candidate `i` has
/// per-item seed `s = mix64(seed, i)` and cell `j` equal to `below(s, j, k)`;
/// duplicates are skipped until `m` patterns are collected.
pub fn sample_periodic_points(
    k: u8,
    w: u32,
    m: u64,
    seed: u64,
) -> Result<Vec<PeriodicConfiguration>> {
    PeriodicConfiguration::constant(k, w, 0)?;
    let total = periodic_point_count(k, w);
    if BigUint::from(m) > total {
        return Err(Error::cap(
            &format!("sample of distinct k={k}, w={w} patterns"),
            m,
            total,
        ));
    }
    let small_total = total.to_u64().filter(|&t| t <= SHUFFLE_LIMIT);
    if let Some(t) = small_total {
        if 2 * m >= t {
            let mut all: Vec<_> = enumerate_periodic_points(k, w, t)?.collect();
            let len = all.len() as u64;
            for i in 0..len.saturating_sub(1) {
                let j = i + below(seed, i, len - i);
                all.swap(i as usize, j as usize);
            }
            all.truncate(m as usize);
            return Ok(all);
        }
    }
    let cells = (w as u64) * (w as u64);
    let mut seen = HashSet::with_capacity(m as usize);
    let mut out = Vec::with_capacity(m as usize);
    let mut i = 0u64;
    while (out.len() as u64) < m {
        let item_seed = mix64(seed, i);
        i += 1;
        let pattern: Vec<u8> = (0..cells)
            .map(|j| below(item_seed, j, k as u64) as u8)
            .collect();
        if seen.insert(pattern.clone()) {
            out.push(PeriodicConfiguration {
                k,
                w,
                cells: pattern,
            });
        }
    }
    Ok(out)
}
