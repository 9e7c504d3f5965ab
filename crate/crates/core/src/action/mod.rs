//! Concrete Z²-actions on compact metric spaces.
//!
//! Two systems are provided. [`ShiftSystem`] is the full shift over a finite
//! alphabet restricted to doubly periodic points, with an ultrametric stored
//! as an integer exponent so every comparison is exact. [`TorusSystem`] is a
//! hyperbolic toral action with a truncated adapted metric in `f64`; it is an
//! empirical probe only.

mod lattice;
mod shift;
mod torus;

use std::fmt;

pub use lattice::{ring, scan_ball, LatticeVector};
pub use shift::{
    enumerate_periodic_points, periodic_point_count, sample_periodic_points, shift_min_diff, Alpha,
    PatternStream, PeriodicConfiguration, ShiftDistance, ShiftSystem, DEFAULT_ENUMERATION_CAP,
};
pub use torus::{Mat2, TorusPoint, TorusSystem, DEFAULT_TORUS_RADIUS};

use crate::error::Result;

/// A continuous Z²-action together with the metric the constructions run on.
///
/// `Dist` orders by actual distance: `a > b` means `a` is the larger distance.
pub trait Action: Sync {
    type Point: Clone + PartialEq + fmt::Debug + Send + Sync;
    type Dist: Copy + PartialOrd + fmt::Debug + fmt::Display + Send + Sync;

    /// `T^v x`.
    fn apply(&self, v: LatticeVector, x: &Self::Point) -> Result<Self::Point>;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Result<Self::Dist>;

    /// `D(T^v x, T^v y)`.
    fn shifted_distance(
        &self,
        v: LatticeVector,
        x: &Self::Point,
        y: &Self::Point,
    ) -> Result<Self::Dist> {
        self.distance(&self.apply(v, x)?, &self.apply(v, y)?)
    }

    /// `alpha^-n`.
    fn scale(&self, n: u32) -> Self::Dist;

    /// `1 / (4 alpha)`, the separation every witness must reach.
    fn separation_floor(&self) -> Self::Dist;

    /// Largest attainable distance, when known. Searches stop early on reaching it.
    fn diameter(&self) -> Option<Self::Dist> {
        None
    }
}
