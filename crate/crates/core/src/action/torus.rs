use std::fmt;

use serde::{Deserialize, Serialize};

use super::lattice::{scan_ball, LatticeVector};
use super::Action;
use crate::error::{Error, Result};

/// Default truncation radius of the adapted metric.
pub const DEFAULT_TORUS_RADIUS: u32 = 8;

/// Points closer than this in the flat torus metric count as equal.
const EQUAL_TOLERANCE: f64 = 1e-12;

const FIXED_SCALE: f64 = 18_446_744_073_709_551_616.0; // 2^64

/// A 2×2 integer matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    /// No eigenvalue on the unit circle. For `det = 1` that is `|tr| > 2`;
    /// for `det = -1` the roots of `t^2 - tr t - 1` have modulus 1 only when `tr = 0`.
    pub fn is_hyperbolic(&self) -> bool {
        match self.det() {
            1 => self.trace().abs() > 2,
            -1 => self.trace() != 0,
            _ => false,
        }
    }

    fn checked_mul(&self, rhs: &Mat2) -> Option<Mat2> {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[i][0]
                    .checked_mul(rhs.0[0][j])?
                    .checked_add(self.0[i][1].checked_mul(rhs.0[1][j])?)?;
            }
        }
        Some(Mat2(out))
    }

    /// Product with entries reduced mod 2^64, which is all the fixed-point action needs.
    fn wrapping_mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.0[i][0]
                    .wrapping_mul(rhs.0[0][j])
                    .wrapping_add(self.0[i][1].wrapping_mul(rhs.0[1][j]));
            }
        }
        Mat2(out)
    }

    /// Inverse of a unimodular matrix.
    fn inverse(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let det = self.det();
        Mat2([[det * d, -det * b], [-det * c, det * a]])
    }

    fn wrapping_pow(&self, e: i64) -> Mat2 {
        let base = if e < 0 { self.inverse() } else { *self };
        let mut acc = Mat2::IDENTITY;
        let mut sq = base;
        let mut e = e.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.wrapping_mul(&sq);
            }
            sq = sq.wrapping_mul(&sq);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// A point of the 2-torus with coordinates in 64-bit fixed point:
/// `coord[i] / 2^64` in `[0, 1)`.
///
/// Integer matrices act on these exactly through wrapping arithmetic, so
/// large matrix powers never lose precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: [u64; 2],
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let conv = |t: f64| {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidParameter(format!(
                    "torus coordinate {t} outside [0, 1)"
                )));
            }
            // Exact: an f64 in [0,1) times 2^64 is an integer below 2^64.
            Ok((t * FIXED_SCALE) as u64)
        };
        Ok(TorusPoint {
            coords: [conv(x)?, conv(y)?],
        })
    }

    pub fn from_fixed(coords: [u64; 2]) -> Self {
        TorusPoint { coords }
    }

    pub fn fixed(&self) -> [u64; 2] {
        self.coords
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [
            self.coords[0] as f64 / FIXED_SCALE,
            self.coords[1] as f64 / FIXED_SCALE,
        ]
    }

    fn transform(&self, m: &Mat2) -> TorusPoint {
        let [x, y] = self.coords;
        let row = |r: [i64; 2]| {
            (r[0] as u64)
                .wrapping_mul(x)
                .wrapping_add((r[1] as u64).wrapping_mul(y))
        };
        TorusPoint {
            coords: [row(m.0[0]), row(m.0[1])],
        }
    }

    fn difference(&self, other: &TorusPoint) -> TorusPoint {
        TorusPoint {
            coords: [
                self.coords[0].wrapping_sub(other.coords[0]),
                self.coords[1].wrapping_sub(other.coords[1]),
            ],
        }
    }

    /// Sup-norm distance to the origin on R²/Z², at most 1/2.
    fn flat_norm(&self) -> f64 {
        self.coords
            .iter()
            .map(|&c| c.min(c.wrapping_neg()) as f64 / FIXED_SCALE)
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y] = self.to_f64();
        write!(f, "({x}, {y})")
    }
}

/// Z² acting on the 2-torus through two commuting hyperbolic automorphisms.
///
/// Empirical probe only. The metric is the truncated adapted metric
/// `D(x, y) = max_{|u| <= N} alpha^-|u| rho(T^u x, T^u y)`, with `rho` the
/// sup-norm flat metric capped at 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusSystem {
    a: Mat2,
    b: Mat2,
    alpha: f64,
    radius: u32,
}

impl TorusSystem {
    pub fn new(a: Mat2, b: Mat2, alpha: f64, radius: u32) -> Result<Self> {
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.det().abs() != 1 {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {m} is not unimodular"
                )));
            }
            if !m.is_hyperbolic() {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {m} has an eigenvalue of modulus 1"
                )));
            }
        }
        let commute = a
            .checked_mul(&b)
            .zip(b.checked_mul(&a))
            .map(|(ab, ba)| ab == ba);
        if commute != Some(true) {
            return Err(Error::InvalidParameter(format!(
                "{a} and {b} do not commute"
            )));
        }
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "alpha must exceed 1, got {alpha}"
            )));
        }
        Ok(TorusSystem {
            a,
            b,
            alpha,
            radius,
        })
    }

    /// `A = [[2,1],[1,1]]`, `B = A^2`, `alpha = 2`, radius 8.
    pub fn cat_map() -> Self {
        let a = Mat2([[2, 1], [1, 1]]);
        let b = a.wrapping_mul(&a);
        Self::new(a, b, 2.0, DEFAULT_TORUS_RADIUS).expect("cat map system is valid")
    }

    pub fn with_radius(mut self, radius: u32) -> Self {
        self.radius = radius;
        self
    }

    pub fn generators(&self) -> (Mat2, Mat2) {
        (self.a, self.b)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    /// `A^{v.x} B^{v.y}`, entries mod 2^64.
    pub fn action_matrix(&self, v: LatticeVector) -> Mat2 {
        self.a
            .wrapping_pow(v.x)
            .wrapping_mul(&self.b.wrapping_pow(v.y))
    }

    fn adapted(&self, offset: LatticeVector, delta: &TorusPoint) -> f64 {
        if delta.flat_norm() <= EQUAL_TOLERANCE {
            return 0.0;
        }
        scan_ball(self.radius)
            .map(|u| {
                let moved = delta.transform(&self.action_matrix(u + offset));
                self.alpha.powi(-(u.norm() as i32)) * moved.flat_norm().min(1.0)
            })
            .fold(0.0, f64::max)
    }
}

impl Action for TorusSystem {
    type Point = TorusPoint;
    type Dist = f64;

    fn apply(&self, v: LatticeVector, x: &TorusPoint) -> Result<TorusPoint> {
        Ok(x.transform(&self.action_matrix(v)))
    }

    fn distance(&self, x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
        Ok(self.adapted(LatticeVector::ZERO, &x.difference(y)))
    }

    fn shifted_distance(&self, v: LatticeVector, x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
        // The action is linear, so T^v x - T^v y = T^v (x - y).
        Ok(self.adapted(v, &x.difference(y)))
    }

    fn scale(&self, n: u32) -> f64 {
        self.alpha.powi(-(n as i32))
    }

    fn separation_floor(&self) -> f64 {
        1.0 / (4.0 * self.alpha)
    }
}
