//! Brute-force ground truth.
//!
//! Builds `G_{q,a}` (vertices `R^n`, `x ~ y` iff `q(x - y) = a`) or its
//! reduced graph (vertices `v != 0` with `q(v) = a`, `x ~ y` iff
//! `b(x, y) = a`) and counts maximum cliques exactly with a branch-and-bound
//! search using a greedy colouring bound.

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Elem, FiniteRing};
use crate::error::{Error, Result};
use crate::qform::{self, QForm, VectorIter};

pub const DEFAULT_CAP: u64 = 1_000_000;
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

/// Adjacency matrices above this many bits are refused regardless of the cap.
const MAX_ADJACENCY_BITS: u128 = 1 << 35;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphMode {
    Full,
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitset {
    words: Vec<u64>,
}

impl Bitset {
    pub fn new(len: usize) -> Self {
        Bitset {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn intersect(&self, other: &Bitset) -> Bitset {
        Bitset {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn difference_with(&mut self, other: &Bitset) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + t)
            })
        })
    }
}

/// An explicit representation graph.
#[derive(Debug, Clone)]
pub struct RepGraph {
    pub ring: FiniteRing,
    pub n: usize,
    pub mode: GraphMode,
    /// Canonical vector indices of the vertices, increasing.
    pub vertices: Vec<u64>,
    pub adjacency: Vec<Bitset>,
}

pub fn build_graph(q: &QForm, a: Elem, mode: GraphMode, cap: u64) -> Result<RepGraph> {
    let ring = q.ring();
    let n = q.dim();
    let total = ring
        .order()
        .checked_pow(n as u32)
        .filter(|&t| t <= u32::MAX as u64)
        .ok_or(Error::CapExceeded {
            vertices: u64::MAX,
            cap,
        })?;
    if mode == GraphMode::Full && total > cap {
        return Err(Error::CapExceeded { vertices: total, cap });
    }
    let values: Vec<Elem> = VectorIter::new(ring, n).map(|x| q.eval(&x)).collect();
    let vertices: Vec<u64> = match mode {
        GraphMode::Full => (0..total).collect(),
        GraphMode::Reduced => (1..total).filter(|&i| values[i as usize] == a).collect(),
    };
    let nv = vertices.len() as u64;
    if nv > cap {
        return Err(Error::CapExceeded { vertices: nv, cap });
    }
    if (nv as u128) * (nv as u128) > MAX_ADJACENCY_BITS {
        return Err(Error::CapExceeded {
            vertices: nv,
            cap: 1 << 17,
        });
    }
    let rows: Vec<Bitset> = match mode {
        // x ~ y iff y - x lies in the sphere S = {v : q(v) = a, v != 0}
        GraphMode::Full => {
            let sphere: Vec<Vec<Elem>> = (1..total)
                .filter(|&i| values[i as usize] == a)
                .map(|i| qform::vector_at(ring, n, i))
                .collect();
            (0..total)
                .into_par_iter()
                .map(|i| {
                    let x = qform::vector_at(ring, n, i);
                    let mut row = Bitset::new(total as usize);
                    for s in &sphere {
                        row.insert(qform::vector_index(ring, &qform::add_vec(ring, &x, s)) as usize);
                    }
                    row
                })
                .collect()
        }
        GraphMode::Reduced => {
            let vecs: Vec<Vec<Elem>> = vertices.iter().map(|&i| qform::vector_at(ring, n, i)).collect();
            (0..vecs.len())
                .into_par_iter()
                .map(|i| {
                    let mut row = Bitset::new(vecs.len());
                    for j in (0..vecs.len()).filter(|&j| j != i) {
                        if q.polar(&vecs[i], &vecs[j]) == a {
                            row.insert(j);
                        }
                    }
                    row
                })
                .collect()
        }
    };
    Ok(RepGraph {
        ring: ring.clone(),
        n,
        mode,
        vertices,
        adjacency: rows,
    })
}

impl RepGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Bitset::count).sum::<usize>() / 2
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Bitset::count).collect()
    }

    pub fn is_regular(&self) -> bool {
        let d = self.degrees();
        d.windows(2).all(|w| w[0] == w[1])
    }

    pub fn vertex(&self, i: usize) -> Vec<Elem> {
        qform::vector_at(&self.ring, self.n, self.vertices[i])
    }

    /// Edges as `u v` lines of canonical vector indices, `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, row) in self.adjacency.iter().enumerate() {
            for j in row.iter().filter(|&j| j > i) {
                writeln!(out, "{} {}", self.vertices[i], self.vertices[j]).unwrap();
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph G {\n");
        for i in 0..self.vertex_count() {
            let label: Vec<String> = self.vertex(i).iter().map(|e| e.to_string()).collect();
            writeln!(out, "  {} [label=\"({})\"];", self.vertices[i], label.join(",")).unwrap();
        }
        for (i, row) in self.adjacency.iter().enumerate() {
            for j in row.iter().filter(|&j| j > i) {
                writeln!(out, "  {} -- {};", self.vertices[i], self.vertices[j]).unwrap();
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CliqueStats {
    pub omega: u64,
    /// Number of maximum cliques. The empty graph has one, the empty clique.
    pub count: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub budget: u64,
    pub workers: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_BUDGET,
            workers: 1,
        }
    }
}

struct Search<'a> {
    adj: &'a [Bitset],
    shared_best: &'a AtomicUsize,
    nodes: &'a AtomicU64,
    budget: u64,
    best: usize,
    count: u64,
    local_nodes: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<()> {
        self.local_nodes += 1;
        if self.local_nodes == 64 {
            self.flush()?;
        }
        Ok(())
    }

    fn flush(&mut self) -> Result<()> {
        let total = self.nodes.fetch_add(self.local_nodes, Ordering::Relaxed) + self.local_nodes;
        self.local_nodes = 0;
        if total > self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        Ok(())
    }

    fn bound(&self) -> usize {
        self.best.max(self.shared_best.load(Ordering::Relaxed))
    }

    fn record(&mut self, size: usize) {
        if size > self.best {
            self.best = size;
            self.count = 1;
            self.shared_best.fetch_max(size, Ordering::Relaxed);
        } else if size == self.best {
            self.count += 1;
        }
    }

    /// Greedy colouring of `p`; returns vertices in non-decreasing colour order.
    fn colour_sort(&self, p: &Bitset) -> (Vec<usize>, Vec<usize>) {
        let mut order = Vec::with_capacity(p.count());
        let mut colours = Vec::with_capacity(order.capacity());
        let mut uncoloured = p.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut q = uncoloured.clone();
            while let Some(v) = q.first() {
                q.remove(v);
                q.difference_with(&self.adj[v]);
                uncoloured.remove(v);
                order.push(v);
                colours.push(colour);
            }
        }
        (order, colours)
    }

    fn expand(&mut self, size: usize, mut p: Bitset) -> Result<()> {
        self.tick()?;
        if p.is_empty() {
            self.record(size);
            return Ok(());
        }
        let (order, colours) = self.colour_sort(&p);
        for i in (0..order.len()).rev() {
            if size + colours[i] < self.bound() {
                return Ok(());
            }
            let v = order[i];
            let next = p.intersect(&self.adj[v]);
            self.expand(size + 1, next)?;
            p.remove(v);
        }
        Ok(())
    }
}

/// Exact clique number and number of maximum cliques.
pub fn brute_clique_stats(g: &RepGraph, opts: SearchOptions) -> Result<CliqueStats> {
    clique_stats(&g.adjacency, opts)
}

pub fn clique_stats(adj: &[Bitset], opts: SearchOptions) -> Result<CliqueStats> {
    let nv = adj.len();
    if nv == 0 {
        return Ok(CliqueStats { omega: 0, count: 1 });
    }
    let shared_best = AtomicUsize::new(0);
    let nodes = AtomicU64::new(0);
    // Top-level branch i takes vertex i with candidates among later neighbours;
    // branches are independent, so they can run in any order.
    let branch = |i: usize| -> Result<(usize, u64)> {
        let mut p = Bitset::new(nv);
        for j in adj[i].iter().filter(|&j| j > i) {
            p.insert(j);
        }
        let mut s = Search {
            adj,
            shared_best: &shared_best,
            nodes: &nodes,
            budget: opts.budget,
            best: 0,
            count: 0,
            local_nodes: 0,
        };
        s.expand(1, p)?;
        s.flush()?;
        Ok((s.best, s.count))
    };
    let results: Vec<Result<(usize, u64)>> = if opts.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.workers)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?;
        pool.install(|| (0..nv).into_par_iter().map(branch).collect())
    } else {
        (0..nv).map(branch).collect()
    };
    let results = results.into_iter().collect::<Result<Vec<_>>>()?;
    let omega = results.iter().map(|r| r.0).max().unwrap_or(0);
    let count = results.iter().filter(|r| r.0 == omega).map(|r| r.1).sum();
    Ok(CliqueStats {
        omega: omega as u64,
        count,
    })
}

/// Oracle values for an instance, cross-checked between full and reduced graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub vertices: u64,
    pub omega: u64,
    pub count: u64,
    pub reduced_vertices: u64,
    pub reduced_omega: u64,
    pub reduced_count: u64,
    /// Whether the count was also obtained directly on the full graph.
    pub direct: bool,
    pub degree: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub cap: u64,
    pub search: SearchOptions,
    /// Largest full graph on which the count is computed directly as well.
    pub direct_limit: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_CAP,
            search: SearchOptions::default(),
            direct_limit: 1024,
        }
    }
}

/// `omega` and the number of maximum cliques of `G_{q,a}`.
///
/// Every maximum clique has exactly `omega` translates through 0, so the
/// count is `|V| * N_red / omega` with `N_red` counted on the reduced graph.
/// Up to `direct_limit` vertices the full graph is searched as well and the
/// two counts must agree.
pub fn oracle(q: &QForm, a: Elem, opts: OracleOptions) -> Result<OracleReport> {
    let ring = q.ring();
    let total = ring.order().checked_pow(q.dim() as u32).ok_or(Error::CapExceeded {
        vertices: u64::MAX,
        cap: opts.cap,
    })?;
    if total > opts.cap {
        return Err(Error::CapExceeded {
            vertices: total,
            cap: opts.cap,
        });
    }
    let red = build_graph(q, a, GraphMode::Reduced, opts.cap)?;
    let rs = brute_clique_stats(&red, opts.search)?;
    let omega = rs.omega + 1;
    let scaled = total as u128 * rs.count as u128;
    if !scaled.is_multiple_of(omega as u128) {
        return Err(Error::Internal(format!(
            "|V| * N_red = {scaled} is not divisible by omega = {omega}"
        )));
    }
    let count = u64::try_from(scaled / omega as u128).map_err(|_| Error::Internal("count overflow".into()))?;
    let direct = total <= opts.direct_limit;
    if direct {
        let full = build_graph(q, a, GraphMode::Full, opts.cap)?;
        if !full.is_regular() {
            return Err(Error::Internal("full representation graph is not regular".into()));
        }
        let fs = brute_clique_stats(&full, opts.search)?;
        if fs != (CliqueStats { omega, count }) {
            return Err(Error::Internal(format!(
                "full graph gives omega={} count={}, reduced graph gives omega={omega} count={count}",
                fs.omega, fs.count
            )));
        }
    }
    Ok(OracleReport {
        vertices: total,
        omega,
        count,
        reduced_vertices: red.vertex_count() as u64,
        reduced_omega: rs.omega,
        reduced_count: rs.count,
        direct,
        degree: red.vertex_count() as u64,
    })
}
