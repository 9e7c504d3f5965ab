//! Monochromatic clique analysis of colored complete graphs.

use rayon::prelude::*;
use serde::Serialize;

use crate::action::{Action, LatticeVector, ShiftSystem};
use crate::colorer::{edge_index, graph_checksum, revalidate, ColoredGraph};
use crate::error::{Error, Result};
use crate::sepset::separation_check;

/// Largest vertex count `max_clique` accepts by default.
pub const DEFAULT_CLIQUE_CAP: usize = 5000;

/// Symmetric, irreflexive adjacency as one bitset row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    vertices: usize,
    words: usize,
    rows: Vec<u64>,
}

impl Adjacency {
    pub fn new(vertices: usize) -> Self {
        let words = vertices.div_ceil(64).max(1);
        Adjacency {
            vertices,
            words,
            rows: vec![0; vertices * words],
        }
    }

    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = Adjacency::new(vertices);
        for (i, j) in edges {
            adj.add_edge(i, j);
        }
        adj
    }

    /// The class of `color` in an upper-triangular coloring of `K_q`.
    pub fn from_coloring(q: usize, colors: &[u32], color: u32) -> Self {
        let mut adj = Adjacency::new(q);
        for i in 0..q {
            for j in i + 1..q {
                if colors[edge_index(q, i, j)] == color {
                    adj.add_edge(i, j);
                }
            }
        }
        adj
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        assert!(i != j, "self-loops are not allowed");
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.rows[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(wi, &w)| {
            let mut bits = w;
            std::iter::from_fn(move || {
                (bits != 0).then(|| {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    wi * 64 + b
                })
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertices).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Whether `vertices` are pairwise adjacent.
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &i)| {
            vertices[a + 1..]
                .iter()
                .all(|&j| i != j && self.has_edge(i, j))
        })
    }
}

/// Repeatedly removes a vertex of minimum remaining degree (lowest index on ties).
fn degeneracy_order(adj: &Adjacency) -> Vec<usize> {
    let n = adj.vertex_count();
    let mut degree: Vec<usize> = (0..n).map(|i| adj.degree(i)).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); max_deg + 1];
    for (v, &d) in degree.iter().enumerate() {
        buckets[d].insert(v);
    }
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut low = 0;
    for _ in 0..n {
        low = low.min(max_deg);
        while buckets[low].is_empty() {
            low += 1;
        }
        let v = buckets[low].pop_first().expect("nonempty bucket");
        removed[v] = true;
        order.push(v);
        for u in adj.neighbors(v) {
            if !removed[u] {
                buckets[degree[u]].remove(&u);
                degree[u] -= 1;
                buckets[degree[u]].insert(u);
            }
        }
        low = low.saturating_sub(1);
    }
    order
}

/// Branch and bound over a small local candidate set with greedy-coloring bounds.
struct LocalSearch {
    words: usize,
    rows: Vec<u64>,
    best: usize,
    best_clique: Vec<usize>,
}

impl LocalSearch {
    fn new(adj: &Adjacency, cand: &[usize], best: usize) -> Self {
        let d = cand.len();
        let words = d.div_ceil(64).max(1);
        let mut rows = vec![0u64; d * words];
        for a in 0..d {
            for b in a + 1..d {
                if adj.has_edge(cand[a], cand[b]) {
                    rows[a * words + b / 64] |= 1 << (b % 64);
                    rows[b * words + a / 64] |= 1 << (a % 64);
                }
            }
        }
        LocalSearch {
            words,
            rows,
            best,
            best_clique: Vec::new(),
        }
    }

    fn bits(set: &[u64]) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in set.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(wi * 64 + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Vertices of `p` ordered by greedy color class, with each vertex's color number.
    fn color_sort(&self, p: &[u64]) -> Vec<(usize, usize)> {
        let mut uncolored = p.to_vec();
        let mut out = Vec::new();
        let mut color = 0;
        while uncolored.iter().any(|&w| w != 0) {
            color += 1;
            let mut q = uncolored.clone();
            while let Some(v) = Self::bits(&q).first().copied() {
                uncolored[v / 64] &= !(1 << (v % 64));
                q[v / 64] &= !(1 << (v % 64));
                let row = &self.rows[v * self.words..(v + 1) * self.words];
                for (qw, rw) in q.iter_mut().zip(row) {
                    *qw &= !rw;
                }
                out.push((v, color));
            }
        }
        out
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut p: Vec<u64>) {
        let order = self.color_sort(&p);
        for &(v, color) in order.iter().rev() {
            if clique.len() + color <= self.best {
                return;
            }
            clique.push(v);
            let row = &self.rows[v * self.words..(v + 1) * self.words];
            let np: Vec<u64> = p.iter().zip(row).map(|(a, b)| a & b).collect();
            if np.iter().all(|&w| w == 0) {
                if clique.len() > self.best {
                    self.best = clique.len();
                    self.best_clique = clique.clone();
                }
            } else {
                self.expand(clique, np);
            }
            clique.pop();
            p[v / 64] &= !(1 << (v % 64));
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueResult {
    pub order: usize,
    /// Sorted vertex indices of one maximum clique.
    pub witness: Vec<usize>,
}

pub fn max_clique(adj: &Adjacency) -> Result<CliqueResult> {
    max_clique_with_cap(adj, DEFAULT_CLIQUE_CAP)
}

/// Exact maximum clique.
///
/// Vertices are taken in degeneracy order; for each vertex `v` the search
/// covers cliques whose earliest member is `v`, branching over its later
/// neighbors with greedy-coloring bounds. The witness is the first maximum
/// clique found, sorted.
pub fn max_clique_with_cap(adj: &Adjacency, cap: usize) -> Result<CliqueResult> {
    let n = adj.vertex_count();
    if n > cap {
        return Err(Error::cap("clique search vertex count", n, cap));
    }
    if n == 0 {
        return Ok(CliqueResult {
            order: 0,
            witness: Vec::new(),
        });
    }
    let order = degeneracy_order(adj);
    let mut position = vec![0; n];
    for (p, &v) in order.iter().enumerate() {
        position[v] = p;
    }
    let mut best = CliqueResult {
        order: 1,
        witness: vec![order[0]],
    };
    for (p, &v) in order.iter().enumerate() {
        let later: Vec<usize> = adj.neighbors(v).filter(|&u| position[u] > p).collect();
        if later.len() < best.order {
            continue;
        }
        let mut search = LocalSearch::new(adj, &later, best.order - 1);
        let mut all = vec![0u64; search.words];
        for i in 0..later.len() {
            all[i / 64] |= 1 << (i % 64);
        }
        search.expand(&mut Vec::new(), all);
        if search.best + 1 > best.order {
            let mut witness: Vec<usize> = search.best_clique.iter().map(|&i| later[i]).collect();
            witness.push(v);
            witness.sort_unstable();
            best = CliqueResult {
                order: witness.len(),
                witness,
            };
        }
    }
    Ok(best)
}

/// The adjacency of one color class of `graph`.
pub fn color_class_adjacency<A: Action>(graph: &ColoredGraph<A>, color: u32) -> Result<Adjacency> {
    if color >= graph.palette_size() {
        return Err(Error::UnknownColor(color));
    }
    Ok(Adjacency::from_coloring(
        graph.vertex_count(),
        graph.colors(),
        color,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColorClique {
    pub index: u32,
    pub v: LatticeVector,
    pub order: usize,
    pub witness: Vec<usize>,
}

/// The winning clique pushed forward by its color vector, and its separation check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub color: u32,
    pub v: LatticeVector,
    pub threshold: String,
    pub separated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliqueReport {
    pub colors: Vec<ColorClique>,
    pub overall_max: usize,
    pub separation_certificate: Option<SeparationCertificate>,
}

/// Maximum monochromatic clique of every color class, plus a check that the
/// winning clique, moved by `T^v`, is `1/(4 alpha)`-separated.
pub fn mono_clique_report<A: Action>(graph: &ColoredGraph<A>) -> Result<CliqueReport> {
    mono_clique_report_with_cap(graph, DEFAULT_CLIQUE_CAP)
}

pub fn mono_clique_report_with_cap<A: Action>(
    graph: &ColoredGraph<A>,
    cap: usize,
) -> Result<CliqueReport> {
    let palette = graph.color_set();
    let colors = (0..graph.palette_size())
        .into_par_iter()
        .map(|c| {
            let adj = color_class_adjacency(graph, c)?;
            let found = max_clique_with_cap(&adj, cap)?;
            Ok(ColorClique {
                index: c,
                v: palette.vector(c).expect("index in palette"),
                order: found.order,
                witness: found.witness,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let overall_max = colors.iter().map(|c| c.order).max().unwrap_or(0);
    let separation_certificate = match colors
        .iter()
        .find(|c| c.order == overall_max && c.order > 0)
    {
        None => None,
        Some(win) => {
            let moved = win
                .witness
                .iter()
                .map(|&i| graph.system().apply(win.v, &graph.vertices()[i]))
                .collect::<Result<Vec<_>>>()?;
            let floor = graph.system().separation_floor();
            let check = separation_check(graph.system(), &moved, floor)?;
            if !check.separated {
                return Err(Error::Verification(format!(
                    "clique of color {} is not {floor}-separated after T^{}",
                    win.index, win.v
                )));
            }
            Some(SeparationCertificate {
                color: win.index,
                v: win.v,
                threshold: floor.to_string(),
                separated: true,
            })
        }
    };
    Ok(CliqueReport {
        colors,
        overall_max,
        separation_certificate,
    })
}

/// A colored `K_q` with `p` colors and no monochromatic `K_k` proves `R_p(k) > q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamseyCertificate {
    pub kind: String,
    pub statement: String,
    pub p: u64,
    pub k: u64,
    pub q: u64,
    pub graph_checksum: String,
    pub verified: bool,
}

impl RamseyCertificate {
    pub fn lower_bound(p: u64, k: u64, q: u64, graph_checksum: String, verified: bool) -> Self {
        RamseyCertificate {
            kind: "ramsey_lower_bound".into(),
            statement: format!("R_{p}({k}) > {q}"),
            p,
            k,
            q,
            graph_checksum,
            verified,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UpperBound {
    /// Upper bound on the opposite-Ramsey number `r(p, q)`.
    pub bound: usize,
    /// Absent for graphs with fewer than two vertices.
    pub certificate: Option<RamseyCertificate>,
}

/// `r((2n+1)^2, q) <= overall_max`, certified as `R_p(overall_max + 1) > q`.
///
/// `verified` is set when the graph revalidates and every reported witness
/// is a monochromatic clique of the stated order in this graph.
pub fn opposite_upper_bound(
    report: &CliqueReport,
    graph: &ColoredGraph<ShiftSystem>,
) -> Result<UpperBound> {
    let q = graph.vertex_count();
    if q < 2 {
        return Ok(UpperBound {
            bound: report.overall_max,
            certificate: None,
        });
    }
    let consistent = report.colors.len() == graph.palette_size() as usize
        && report.overall_max == report.colors.iter().map(|c| c.order).max().unwrap_or(0)
        && report.colors.iter().all(|c| {
            c.witness.len() == c.order
                && c.witness.iter().all(|&i| i < q)
                && c.witness.iter().enumerate().all(|(a, &i)| {
                    c.witness[a + 1..]
                        .iter()
                        .all(|&j| i != j && graph.color(i, j) == c.index)
                })
        });
    let verified = consistent && revalidate(graph)?.is_none();
    let certificate = RamseyCertificate::lower_bound(
        graph.palette_size() as u64,
        report.overall_max as u64 + 1,
        q as u64,
        graph_checksum(graph),
        verified,
    );
    Ok(UpperBound {
        bound: report.overall_max,
        certificate: Some(certificate),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force_clique(adj: &Adjacency) -> usize {
        let n = adj.vertex_count();
        (0u32..1 << n)
            .filter(|&mask| {
                let vs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                adj.is_clique(&vs)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn small_graphs() {
        let tri = Adjacency::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        assert_eq!(
            max_clique(&tri).unwrap(),
            CliqueResult {
                order: 3,
                witness: vec![0, 1, 2]
            }
        );
        let c5 = Adjacency::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(brute_force_clique(&c5), 2);
        assert_eq!(max_clique(&c5).unwrap().order, 2);
        let empty = Adjacency::new(5);
        assert_eq!(max_clique(&empty).unwrap().order, 1);
        assert_eq!(max_clique(&Adjacency::new(0)).unwrap().order, 0);
        assert!(matches!(
            max_clique_with_cap(&empty, 4),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn agrees_with_brute_force_on_random_graphs() {
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(1..=12);
            let density: f64 = rng.gen_range(0.1..0.9);
            let mut adj = Adjacency::new(n);
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(density) {
                        adj.add_edge(i, j);
                    }
                }
            }
            let found = max_clique(&adj).unwrap();
            assert_eq!(found.order, brute_force_clique(&adj), "seed {seed}");
            assert!(adj.is_clique(&found.witness));
            assert!(found.witness.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn large_dense_graph() {
        // Complement of a perfect matching on 200 vertices: max clique 100.
        let n = 200;
        let mut adj = Adjacency::new(n);
        for i in 0..n {
            for j in i + 1..n {
                if j != i + 1 || i % 2 == 1 {
                    adj.add_edge(i, j);
                }
            }
        }
        let found = max_clique(&adj).unwrap();
        assert_eq!(found.order, 100);
        assert!(adj.is_clique(&found.witness));
    }

    #[test]
    fn degeneracy_order_is_a_permutation() {
        let adj = Adjacency::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4)]);
        let mut order = degeneracy_order(&adj);
        assert_eq!(order[0], 5);
        order.sort_unstable();
        assert_eq!(order, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn coloring_adjacency() {
        // K_4 colored by (i + j) % 3.
        let q = 4;
        let colors: Vec<u32> = (0..q)
            .flat_map(|i| (i + 1..q).map(move |j| ((i + j) % 3) as u32))
            .collect();
        let a0 = Adjacency::from_coloring(q, &colors, 0);
        assert_eq!(a0.edge_count(), 2); // {0,3}, {1,2}
        assert!(a0.has_edge(0, 3) && a0.has_edge(1, 2));
        assert_eq!(Adjacency::from_coloring(q, &colors, 7).edge_count(), 0);
    }
}
