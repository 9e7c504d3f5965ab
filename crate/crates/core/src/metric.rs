//! Witness vectors: given two points far enough apart, find a group element
//! of small norm that pushes them a fixed distance apart.

use std::borrow::Borrow;

use serde::Serialize;

use crate::action::{
    scan_ball, shift_min_diff, Action, LatticeVector, PeriodicConfiguration, ShiftDistance,
    ShiftSystem, TorusPoint, TorusSystem,
};
use crate::error::{Error, Result};
use crate::rng::unit_f64;

/// Default probe budget, in distance evaluations.
pub const DEFAULT_PROBE_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WitnessResult<D> {
    pub vector: LatticeVector,
    pub achieved: D,
}

/// Scans `|v| <= radius` in scan order for the largest `D(T^v x, T^v y)`;
/// the first maximizer wins ties.
fn best_vector<A: Action>(
    system: &A,
    x: &A::Point,
    y: &A::Point,
    radius: u32,
) -> Result<WitnessResult<A::Dist>> {
    let diameter = system.diameter();
    let mut best: Option<WitnessResult<A::Dist>> = None;
    for v in scan_ball(radius) {
        let d = system.shifted_distance(v, x, y)?;
        if best.is_none_or(|b| d > b.achieved) {
            best = Some(WitnessResult {
                vector: v,
                achieved: d,
            });
            if Some(d) == diameter {
                break;
            }
        }
    }
    Ok(best.expect("the ball always contains the origin"))
}

/// A vector `v` with `|v| <= n` and `D(T^v x, T^v y) >= 1/(4 alpha)`.
///
/// On the shift this is the first differing coordinate in scan order, reached
/// at distance 1. Fails with [`Error::NoWitness`] when nothing in the ball
/// reaches the floor, which includes `x == y`.
pub fn find_witness<A: Action>(
    system: &A,
    x: &A::Point,
    y: &A::Point,
    n: u32,
) -> Result<WitnessResult<A::Dist>> {
    let best = best_vector(system, x, y, n)?;
    if best.achieved >= system.separation_floor() {
        Ok(best)
    } else {
        Err(Error::NoWitness {
            pair: None,
            radius: n,
            best_vector: best.vector,
            achieved: best.achieved.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryFailure<P, D> {
    pub x: P,
    pub y: P,
    pub best: WitnessResult<D>,
}

/// Outcome of checking the recovery contract over a stream of pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecoveryReport<P, D> {
    pub radius: u32,
    /// Pairs with `D(x, y) >= alpha^-n`, on which the contract was tested.
    pub pairs_checked: u64,
    /// Pairs closer than `alpha^-n` (including identical pairs); not tested.
    pub pairs_skipped: u64,
    pub failures: Vec<RecoveryFailure<P, D>>,
}

impl<P, D> RecoveryReport<P, D> {
    pub fn empty(radius: u32) -> Self {
        RecoveryReport {
            radius,
            pairs_checked: 0,
            pairs_skipped: 0,
            failures: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    /// Combines reports from disjoint parts of a pair stream.
    pub fn merge(mut self, other: Self) -> Self {
        debug_assert_eq!(self.radius, other.radius);
        self.pairs_checked += other.pairs_checked;
        self.pairs_skipped += other.pairs_skipped;
        self.failures.extend(other.failures);
        self
    }
}

/// For every pair with `D(x, y) >= alpha^-n`, checks that some `|v| <= n`
/// gives `D(T^v x, T^v y) >= 1/(4 alpha)`. Failures are collected, not raised.
pub fn verify_recovery<A, I, Q>(
    system: &A,
    pairs: I,
    n: u32,
) -> Result<RecoveryReport<A::Point, A::Dist>>
where
    A: Action,
    I: IntoIterator<Item = (Q, Q)>,
    Q: Borrow<A::Point>,
{
    let scale = system.scale(n);
    let floor = system.separation_floor();
    let mut report = RecoveryReport::empty(n);
    for (x, y) in pairs {
        let (x, y) = (x.borrow(), y.borrow());
        if system.distance(x, y)? < scale || x == y {
            report.pairs_skipped += 1;
            continue;
        }
        report.pairs_checked += 1;
        let best = best_vector(system, x, y, n)?;
        if best.achieved < floor {
            report.failures.push(RecoveryFailure {
                x: x.clone(),
                y: y.clone(),
                best,
            });
        }
    }
    Ok(report)
}

/// A pair meeting the strengthened hypothesis `D(x, y) >= alpha^-(n^2)` whose
/// orbit segment `|v| <= n` never reaches `1/(4 alpha)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Counterexample<P, D> {
    pub n: u32,
    pub x: P,
    pub y: P,
    pub distance: D,
    /// `alpha^-(n^2)`.
    pub hypothesis_floor: D,
    /// `max_{|v| <= n} D(T^v x, T^v y)` and a vector attaining it.
    pub best: WitnessResult<D>,
    pub separation_floor: D,
    /// Distance evaluations spent, including the final re-verification.
    pub evaluations: u64,
}

/// Shift-specific detail of how a counterexample was built.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftEvidence {
    /// The pair differs exactly on the coset of `(offset, 0)`.
    pub offset: u32,
    pub period: u32,
    pub distance_exponent: u32,
    pub hypothesis_exponent: u32,
    /// Smallest exponent reached over `|v| <= n`.
    pub best_shifted_exponent: u32,
    pub separation_exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftCounterexample {
    pub witness: Counterexample<String, ShiftDistance>,
    pub evidence: ShiftEvidence,
}

/// Independent re-check on the shift: recomputes both inequalities by
/// translating whole patterns and rescanning them from scratch.
fn recheck_shift(
    system: &ShiftSystem,
    x: &PeriodicConfiguration,
    y: &PeriodicConfiguration,
    n: u32,
) -> Result<Option<(ShiftDistance, WitnessResult<ShiftDistance>)>> {
    let d = shift_min_diff(x, y)?;
    if d < ShiftDistance::Exponent(n * n) {
        return Ok(None);
    }
    let mut best: Option<WitnessResult<ShiftDistance>> = None;
    for v in scan_ball(n) {
        let dv = shift_min_diff(&system.apply(v, x)?, &system.apply(v, y)?)?;
        if best.is_none_or(|b| dv > b.achieved) {
            best = Some(WitnessResult {
                vector: v,
                achieved: dv,
            });
        }
    }
    let best = best.expect("nonempty ball");
    Ok((best.achieved < system.separation_floor()).then_some((d, best)))
}

/// Searches the shift for a counterexample to the strengthened recovery
/// property at radius `n`.
///
/// Candidates differ exactly on the coset of `(s, 0)` with period `2s + 1`,
/// for `s` from `n + t + 1` to `n^2` (`t` the separation exponent). Such a
/// pair sits at distance `alpha^-s`, and every shift by `|v| <= n` keeps the
/// difference at norm at least `s - n > t`. Returns `None` when the range is
/// empty or the budget runs out first.
pub fn probe_question_shift(
    system: &ShiftSystem,
    n: u32,
    budget: u64,
) -> Result<Option<ShiftCounterexample>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "probe radius must be at least 1".into(),
        ));
    }
    let t = system.separation_exponent();
    let per_candidate = 1 + (2 * n as u64 + 1).pow(2);
    let mut spent = 0u64;
    for s in (n + t + 1)..=(n * n) {
        if spent + 2 * per_candidate > budget {
            return Ok(None);
        }
        let w = 2 * s + 1;
        let x = PeriodicConfiguration::constant(system.alphabet_size(), w, 0)?;
        let mut y = x.clone();
        y.set(LatticeVector::new(s as i64, 0), 1)?;

        spent += 1;
        let d = system.distance(&x, &y)?;
        if d < system.scale(n * n) {
            spent += per_candidate - 1;
            continue;
        }
        let best = best_vector(system, &x, &y, n)?;
        spent += per_candidate - 1;
        if best.achieved >= system.separation_floor() {
            continue;
        }
        let Some((d_check, best_check)) = recheck_shift(system, &x, &y, n)? else {
            return Err(Error::Verification(format!(
                "candidate at offset {s} failed independent re-check"
            )));
        };
        spent += per_candidate;
        if d_check != d || best_check.achieved != best.achieved {
            return Err(Error::Verification(format!(
                "candidate at offset {s}: fast and full scans disagree"
            )));
        }
        let exp = |dist: ShiftDistance| dist.exponent().expect("distinct points");
        let evidence = ShiftEvidence {
            offset: s,
            period: w,
            distance_exponent: exp(d),
            hypothesis_exponent: n * n,
            best_shifted_exponent: exp(best.achieved),
            separation_exponent: t,
        };
        return Ok(Some(ShiftCounterexample {
            witness: Counterexample {
                n,
                x: x.encode(),
                y: y.encode(),
                distance: d,
                hypothesis_floor: system.scale(n * n),
                best,
                separation_floor: system.separation_floor(),
                evaluations: spent,
            },
            evidence,
        }));
    }
    Ok(None)
}

/// Seeded random search on the torus for a counterexample at radius `n`.
///
/// Each trial draws a base point and a direction, then bisects the step
/// length down toward the smallest separation still meeting
/// `D(x, y) >= alpha^-(n^2)`, testing the recovery property at each accepted
/// step. Fails with `CapExceeded` once `budget` distance evaluations are spent.
pub fn probe_question_torus(
    system: &TorusSystem,
    n: u32,
    budget: u64,
    seed: u64,
) -> Result<Counterexample<TorusPoint, f64>> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "probe radius must be at least 1".into(),
        ));
    }
    const BISECTION_STEPS: u32 = 40;
    let floor_hyp = system.scale(n * n);
    let floor_sep = system.separation_floor();
    let per_check = (2 * n as u64 + 1).pow(2);
    let mut spent = 0u64;
    let mut trial = 0u64;
    loop {
        let base = trial * 4;
        trial += 1;
        let x = TorusPoint::new(unit_f64(seed, base), unit_f64(seed, base + 1))?;
        let angle = std::f64::consts::TAU * unit_f64(seed, base + 2);
        let (dx, dy) = (angle.cos(), angle.sin());
        let at = |step: f64| {
            TorusPoint::new(
                (x.to_f64()[0] + step * dx).rem_euclid(1.0) % 1.0,
                (x.to_f64()[1] + step * dy).rem_euclid(1.0) % 1.0,
            )
        };
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        for _ in 0..BISECTION_STEPS {
            if spent + 1 + per_check > budget {
                return Err(Error::cap(
                    "torus probe distance evaluations",
                    spent + 1 + per_check,
                    budget,
                ));
            }
            let mid = 0.5 * (lo + hi);
            let y = at(mid)?;
            spent += 1;
            let d = system.distance(&x, &y)?;
            if d >= floor_hyp {
                hi = mid;
                spent += per_check;
                let best = best_vector(system, &x, &y, n)?;
                if best.achieved < floor_sep {
                    // Re-verify with a plain orbit scan before reporting.
                    let recheck = scan_ball(n)
                        .map(|v| system.distance(&system.apply(v, &x)?, &system.apply(v, &y)?))
                        .collect::<Result<Vec<f64>>>()?;
                    spent += 1 + per_check;
                    let d_check = system.distance(&x, &y)?;
                    if d_check >= floor_hyp && recheck.iter().all(|&e| e < floor_sep) {
                        return Ok(Counterexample {
                            n,
                            x,
                            y,
                            distance: d,
                            hypothesis_floor: floor_hyp,
                            best,
                            separation_floor: floor_sep,
                            evaluations: spent,
                        });
                    }
                }
            } else {
                lo = mid;
            }
        }
    }
}
