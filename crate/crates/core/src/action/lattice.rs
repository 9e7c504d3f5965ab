use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

/// An element of Z² with the sup-norm. Acts on points and doubles as an edge color.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct LatticeVector {
    pub x: i64,
    pub y: i64,
}

impl LatticeVector {
    pub const ZERO: LatticeVector = LatticeVector { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        LatticeVector { x, y }
    }

    /// `max(|x|, |y|)`.
    pub fn norm(self) -> u64 {
        self.x.unsigned_abs().max(self.y.unsigned_abs())
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: Self) -> Self {
        LatticeVector::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: Self) -> Self {
        LatticeVector::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> Self {
        LatticeVector::new(-self.x, -self.y)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Vectors of norm exactly `r`, lexicographic in `(x, y)`.
pub fn ring(r: u32) -> impl Iterator<Item = LatticeVector> {
    let r = r as i64;
    (-r..=r).flat_map(move |x| {
        let ys: Box<dyn Iterator<Item = i64>> = if x.abs() == r {
            Box::new(-r..=r)
        } else if r == 0 {
            Box::new(std::iter::once(0))
        } else {
            Box::new([-r, r].into_iter())
        };
        ys.map(move |y| LatticeVector::new(x, y))
    })
}

/// The ball `|v| <= radius` in the crate-wide scan order: increasing norm,
/// then lexicographic `(x, y)` within each ring.
pub fn scan_ball(radius: u32) -> impl Iterator<Item = LatticeVector> {
    (0..=radius).flat_map(ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_sup_norm() {
        assert_eq!(LatticeVector::new(-3, 2).norm(), 3);
        assert_eq!(LatticeVector::new(1, -5).norm(), 5);
        assert_eq!(LatticeVector::ZERO.norm(), 0);
        assert_ne!(LatticeVector::new(0, 1).norm(), 0);
    }

    #[test]
    fn rings_partition_the_ball() {
        for r in 0..6u32 {
            let ring: Vec<_> = ring(r).collect();
            let expected = if r == 0 { 1 } else { 8 * r as usize };
            assert_eq!(ring.len(), expected);
            assert!(ring.iter().all(|v| v.norm() == r as u64));
            assert!(ring.windows(2).all(|w| w[0] < w[1]));
        }
        let ball: Vec<_> = scan_ball(3).collect();
        assert_eq!(ball.len(), 49);
        let mut sorted = ball.clone();
        sorted.sort_by_key(|v| (v.norm(), v.x, v.y));
        assert_eq!(ball, sorted);
    }

    #[test]
    fn first_ring_order() {
        let r1: Vec<_> = ring(1).map(|v| (v.x, v.y)).collect();
        assert_eq!(
            r1,
            vec![
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1)
            ]
        );
    }
}
