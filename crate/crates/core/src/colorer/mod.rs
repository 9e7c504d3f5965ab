//! Edge-colorings of the complete graph on a separated set, colored by witness vectors.

mod decg;

use rayon::prelude::*;
use serde::Serialize;

pub use decg::{
    decode_decg, decode_decg_unverified, encode_decg, fnv1a64, graph_checksum, read_decg,
    write_decg, ChecksumStatus,
};

use crate::action::{
    enumerate_periodic_points, sample_periodic_points, Action, LatticeVector,
    PeriodicConfiguration, ShiftDistance, ShiftSystem,
};
use crate::error::{Error, Result};
use crate::metric::find_witness;
use crate::sepset::{greedy_separated, separation_check, Maximality, SeparatedSet};

/// All `v` with `|v| <= n`, row-major from `(-n, -n)` to `(n, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorSet {
    n: u32,
    vectors: Vec<LatticeVector>,
}

pub fn build_color_set(n: u32) -> ColorSet {
    let r = n as i64;
    let vectors = (-r..=r)
        .flat_map(|x| (-r..=r).map(move |y| LatticeVector::new(x, y)))
        .collect();
    ColorSet { n, vectors }
}

impl ColorSet {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[LatticeVector] {
        &self.vectors
    }

    pub fn vector(&self, index: u32) -> Option<LatticeVector> {
        self.vectors.get(index as usize).copied()
    }

    pub fn index_of(&self, v: LatticeVector) -> Option<u32> {
        color_index(self.n, v)
    }

    pub fn origin_index(&self) -> u32 {
        ((self.vectors.len() - 1) / 2) as u32
    }
}

fn color_index(n: u32, v: LatticeVector) -> Option<u32> {
    let side = 2 * n as i64 + 1;
    if v.norm() > n as u64 {
        return None;
    }
    Some(((v.x + n as i64) * side + (v.y + n as i64)) as u32)
}

/// Whether the vertex set is the whole separated set or a seeded sample of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Sampling {
    Full,
    Subsampled { seed: u64 },
}

/// Position of edge `{i, j}`, `i < j`, in the dense upper-triangular order.
pub fn edge_index(q: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < q);
    i * (2 * q - i - 1) / 2 + (j - i - 1)
}

/// A complete graph on a point list with every edge colored by a vector of `C_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColoredGraph<A: Action> {
    system: A,
    n: u32,
    vertices: Vec<A::Point>,
    sampling: Sampling,
    colors: Vec<u32>,
    achieved: Vec<A::Dist>,
}

impl<A: Action> ColoredGraph<A> {
    pub(crate) fn from_parts(
        system: A,
        n: u32,
        vertices: Vec<A::Point>,
        sampling: Sampling,
        colors: Vec<u32>,
        achieved: Vec<A::Dist>,
    ) -> Self {
        let q = vertices.len();
        debug_assert_eq!(colors.len(), q * q.saturating_sub(1) / 2);
        debug_assert_eq!(colors.len(), achieved.len());
        ColoredGraph {
            system,
            n,
            vertices,
            sampling,
            colors,
            achieved,
        }
    }

    pub fn system(&self) -> &A {
        &self.system
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn vertices(&self) -> &[A::Point] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    /// `(2n+1)^2`.
    pub fn palette_size(&self) -> u32 {
        (2 * self.n + 1).pow(2)
    }

    pub fn color_set(&self) -> ColorSet {
        build_color_set(self.n)
    }

    /// Edge colors in upper-triangular order.
    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, i: usize, j: usize) -> u32 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.colors[edge_index(self.vertices.len(), i, j)]
    }

    pub fn achieved(&self, i: usize, j: usize) -> A::Dist {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.achieved[edge_index(self.vertices.len(), i, j)]
    }

    /// Number of distinct colors actually used.
    pub fn colors_used(&self) -> usize {
        let mut seen = vec![false; self.palette_size() as usize];
        for &c in &self.colors {
            seen[c as usize] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// `(i, j)` pairs in upper-triangular order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let q = self.vertices.len();
        (0..q).flat_map(move |i| (i + 1..q).map(move |j| (i, j)))
    }

    #[cfg(test)]
    pub(crate) fn colors_mut(&mut self) -> &mut Vec<u32> {
        &mut self.colors
    }
}

/// Colors every edge `{x, y}` of the complete graph on `vertices` by the
/// witness vector `v` with `D(T^v x, T^v y) >= 1/(4 alpha)`.
///
/// The vertex set must be `alpha^-n`-separated. With `precheck` the
/// separation is verified first; otherwise a violation surfaces as
/// `NoWitness` on the offending edge. Output is identical for any thread count.
pub fn color_graph<A: Action + Clone>(
    system: &A,
    vertices: &SeparatedSet<A::Point, A::Dist>,
    n: u32,
    sampling: Sampling,
    precheck: bool,
) -> Result<ColoredGraph<A>> {
    if vertices.epsilon < system.scale(n) {
        return Err(Error::InvalidParameter(format!(
            "vertex set certified only at {}, below alpha^-{n}",
            vertices.epsilon
        )));
    }
    let points = &vertices.points;
    if precheck {
        let check = separation_check(system, points, system.scale(n))?;
        if let Some((i, j)) = check.violation {
            return Err(Error::Verification(format!(
                "vertices {i} and {j} are closer than alpha^-{n}"
            )));
        }
    }
    let q = points.len();
    let rows = (0..q)
        .into_par_iter()
        .map(|i| {
            (i + 1..q)
                .map(|j| match find_witness(system, &points[i], &points[j], n) {
                    Ok(w) => {
                        let c = color_index(n, w.vector).expect("witness lies in the ball");
                        Ok((c, w.achieved))
                    }
                    Err(Error::NoWitness {
                        radius,
                        best_vector,
                        achieved,
                        ..
                    }) => Err(Error::NoWitness {
                        pair: Some((i, j)),
                        radius,
                        best_vector,
                        achieved,
                    }),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let (colors, achieved): (Vec<u32>, Vec<A::Dist>) = rows.into_iter().flatten().unzip();
    Ok(ColoredGraph::from_parts(
        system.clone(),
        n,
        points.clone(),
        sampling,
        colors,
        achieved,
    ))
}

/// The vertex set `V_n` for the shift: every period-`(2n+1)` pattern when
/// `sample` is `None` (subject to `cap`), else `m` patterns drawn from `seed`.
///
/// Distinct period-`(2n+1)` patterns already differ inside the ball of radius
/// `n`, so the greedy pass keeps them all; it is run anyway as a check.
pub fn shift_vertex_set(
    system: &ShiftSystem,
    n: u32,
    sample: Option<(u64, u64)>,
    cap: u64,
) -> Result<(SeparatedSet<PeriodicConfiguration, ShiftDistance>, Sampling)> {
    let (k, w) = (system.alphabet_size(), 2 * n + 1);
    let eps = system.scale(n);
    match sample {
        None => {
            let stream = enumerate_periodic_points(k, w, cap)?;
            Ok((
                greedy_separated(system, stream, eps, Maximality::Exhaustive)?,
                Sampling::Full,
            ))
        }
        Some((m, seed)) => {
            if m > cap {
                return Err(Error::cap("sampled vertex count", m, cap));
            }
            let points = sample_periodic_points(k, w, m, seed)?;
            let set = greedy_separated(system, points, eps, Maximality::Stream)?;
            Ok((set, Sampling::Subsampled { seed }))
        }
    }
}

/// An edge whose stored color does not certify the separation it claims.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeViolation {
    pub i: usize,
    pub j: usize,
    pub color: u32,
    pub stored: String,
    pub recomputed: String,
}

/// Recomputes `D(T^v x, T^v y)` for every edge and its color `v`. Returns the
/// first edge (in upper-triangular order) that misses `1/(4 alpha)` or whose
/// stored achieved distance disagrees with the recomputation.
pub fn revalidate<A: Action>(graph: &ColoredGraph<A>) -> Result<Option<EdgeViolation>> {
    let q = graph.vertices.len();
    let palette = graph.color_set();
    let floor = graph.system.separation_floor();
    let found = (0..q)
        .into_par_iter()
        .map(|i| -> Result<Option<EdgeViolation>> {
            for j in i + 1..q {
                let e = edge_index(q, i, j);
                let color = graph.colors[e];
                let stored = graph.achieved[e];
                let Some(v) = palette.vector(color) else {
                    return Ok(Some(EdgeViolation {
                        i,
                        j,
                        color,
                        stored: stored.to_string(),
                        recomputed: "color outside palette".into(),
                    }));
                };
                let d = graph
                    .system
                    .shifted_distance(v, &graph.vertices[i], &graph.vertices[j])?;
                if d < floor || d != stored {
                    return Ok(Some(EdgeViolation {
                        i,
                        j,
                        color,
                        stored: stored.to_string(),
                        recomputed: d.to_string(),
                    }));
                }
            }
            Ok(None)
        })
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        });
    Ok(found.transpose()?.flatten())
}
