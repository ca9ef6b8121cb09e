//! Dynamic graphs assembled from independent edge paths.
//!
//! Edge paths are stored flat: one initial state per potential edge plus
//! a shared jump-time buffer indexed through offsets. The upper triangle
//! is enumerated column by column, `(0,0), (0,1), (1,1), (0,2), ...`
//! (or without the diagonal when self-loops are disabled), and edge
//! `(i, j)` of replicate `r` is drawn from the substream
//! `StreamKey { seed, replicate: r, i, j }`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use libm::sqrt;

use crate::edge::{sample_jumps_into, EdgeParams, EdgePath, EdgePathRef};
use crate::error::{domain, Result};
use crate::matrix::DenseMatrix;
use crate::rng::StreamKey;
use crate::theory::TheoryCurves;

/// Strictly increasing observation times inside `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>, horizon: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("time grid must not be empty"));
        }
        let mut prev = f64::NEG_INFINITY;
        for &t in &points {
            if !(t >= 0.0 && t <= horizon) {
                return Err(domain(format!("grid point {t} outside [0, {horizon}]")));
            }
            if t <= prev {
                return Err(domain(format!("grid must be strictly increasing ({prev} then {t})")));
            }
            prev = t;
        }
        Ok(Self { points })
    }

    /// `count` equally spaced points from 0 to `horizon` inclusive.
    pub fn uniform(horizon: f64, count: usize) -> Result<Self> {
        match count {
            0 => Err(domain("time grid must not be empty")),
            1 => Self::new(vec![0.0], horizon),
            _ => {
                let step = horizon / (count - 1) as f64;
                let mut pts: Vec<f64> = (0..count).map(|k| k as f64 * step).collect();
                pts[count - 1] = horizon;
                Self::new(pts, horizon)
            }
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `H(t)`: the adjacency matrix centered by `p(t)` and scaled to entry
/// variance `1/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredMatrixView {
    t: f64,
    p: f64,
    matrix: DenseMatrix,
}

impl CenteredMatrixView {
    /// Centers an arbitrary symmetric 0/1 snapshot taken when the
    /// presence probability was `p`.
    pub fn from_adjacency(adjacency: &DenseMatrix, p: f64, t: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain(format!("p(t) must lie in (0,1), got {p}")));
        }
        let n = adjacency.n();
        let scale = sqrt(n as f64 * p * (1.0 - p));
        let matrix = DenseMatrix::from_fn(n, |i, j| (adjacency.get(i, j) - p) / scale);
        Ok(Self { t, p, matrix })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// The presence probability used for centering.
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.p / (1.0 - self.p)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// `sqrt(N p (1-p))`, the factor between `A` and `A*`.
    pub fn scale(&self) -> f64 {
        sqrt(self.n() as f64 * self.p * (1.0 - self.p))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.matrix.as_slice().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean of the squared entries, an estimator of `1/N`.
    pub fn mean_square_entry(&self) -> f64 {
        let n = self.n() as f64;
        self.matrix.as_slice().iter().map(|v| v * v).sum::<f64>() / (n * n)
    }

    /// `A*(t) = H(t) + sqrt(N q(t)) E_N` where every entry of `E_N` is `1/N`.
    pub fn normalized_adjacency(&self) -> DenseMatrix {
        let n = self.n();
        let shift = sqrt(n as f64 * self.q()) / n as f64;
        DenseMatrix::from_fn(n, |i, j| self.matrix.get(i, j) + shift)
    }
}

/// Per-edge paths of a dynamic graph on `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphTrajectory {
    n: usize,
    params: EdgeParams,
    self_loops: bool,
    initial: Vec<u8>,
    offsets: Vec<usize>,
    jumps: Vec<f64>,
}

/// Number of potential edges on `n` vertices.
pub fn potential_edges(n: usize, self_loops: bool) -> usize {
    if self_loops {
        n * (n + 1) / 2
    } else {
        n * n.saturating_sub(1) / 2
    }
}

/// Samples every potential edge independently from its own substream.
pub fn sample_graph(
    n: usize,
    params: &EdgeParams,
    seed: u64,
    replicate: u32,
    self_loops: bool,
) -> Result<GraphTrajectory> {
    if n == 0 {
        return Err(domain("graph needs at least one vertex"));
    }
    if n > u32::MAX as usize {
        return Err(domain("vertex count exceeds the stream key range"));
    }
    let m = potential_edges(n, self_loops);
    let mut initial = Vec::with_capacity(m);
    let mut offsets = Vec::with_capacity(m + 1);
    // mean flips per edge is at most kappa * T; a little slack avoids regrowth
    let mean_jumps = params.kappa() * params.horizon();
    let mut jumps = Vec::with_capacity((m as f64 * (mean_jumps + 1.0)) as usize);
    offsets.push(0);
    for j in 0..n {
        let top = if self_loops { j + 1 } else { j };
        for i in 0..top {
            let mut stream = StreamKey::new(seed, replicate, i as u32, j as u32).stream();
            initial.push(sample_jumps_into(params, &mut stream, &mut jumps));
            offsets.push(jumps.len());
        }
    }
    Ok(GraphTrajectory { n, params: *params, self_loops, initial, offsets, jumps })
}

impl GraphTrajectory {
    /// Assembles a trajectory from explicit paths given in upper-triangle
    /// order (see the module docs).
    pub fn from_paths(
        n: usize,
        params: &EdgeParams,
        self_loops: bool,
        paths: &[EdgePath],
    ) -> Result<Self> {
        if n == 0 {
            return Err(domain("graph needs at least one vertex"));
        }
        let m = potential_edges(n, self_loops);
        if paths.len() != m {
            return Err(domain(format!("expected {m} edge paths, got {}", paths.len())));
        }
        let mut initial = Vec::with_capacity(m);
        let mut offsets = vec![0];
        let mut jumps = Vec::new();
        for p in paths {
            if p.horizon() != params.horizon() {
                return Err(domain("edge path horizon differs from the parameter horizon"));
            }
            initial.push(p.initial_state());
            jumps.extend_from_slice(p.jump_times());
            offsets.push(jumps.len());
        }
        Ok(Self { n, params: *params, self_loops, initial, offsets, jumps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &EdgeParams {
        &self.params
    }

    pub fn self_loops(&self) -> bool {
        self.self_loops
    }

    pub fn edge_count(&self) -> usize {
        self.initial.len()
    }

    pub fn total_jumps(&self) -> usize {
        self.jumps.len()
    }

    fn index_of(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        if j >= self.n || (i == j && !self.self_loops) {
            return None;
        }
        Some(if self.self_loops { j * (j + 1) / 2 + i } else { j * (j - 1) / 2 + i })
    }

    fn path(&self, k: usize) -> EdgePathRef<'_> {
        EdgePathRef::from_parts(
            self.initial[k],
            &self.jumps[self.offsets[k]..self.offsets[k + 1]],
            self.params.horizon(),
        )
    }

    /// The path of edge `{i, j}`; `None` for absent diagonal entries or
    /// out-of-range vertices.
    pub fn edge(&self, i: usize, j: usize) -> Option<EdgePathRef<'_>> {
        self.index_of(i, j).map(|k| self.path(k))
    }

    /// All edges in storage order with their `(i, j)`, `i <= j`.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), EdgePathRef<'_>)> + '_ {
        let loops = self.self_loops;
        (0..self.n)
            .flat_map(move |j| (0..if loops { j + 1 } else { j }).map(move |i| (i, j)))
            .enumerate()
            .map(move |(k, ij)| (ij, self.path(k)))
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let horizon = self.params.horizon();
        if t >= 0.0 && t <= horizon {
            Ok(())
        } else {
            Err(domain(format!("time {t} outside [0, {horizon}]")))
        }
    }

    /// Symmetric 0/1 adjacency matrix at time `t`.
    pub fn adjacency_at(&self, t: f64) -> Result<DenseMatrix> {
        self.check_time(t)?;
        let mut a = DenseMatrix::zeros(self.n);
        for ((i, j), path) in self.edges() {
            if path.state_at_unchecked(t) == 1 {
                a.set_sym(i, j, 1.0);
            }
        }
        Ok(a)
    }

    pub fn centered_matrix_at(&self, t: f64) -> Result<CenteredMatrixView> {
        let a = self.adjacency_at(t)?;
        let p = self.params.edge_prob_unchecked(t);
        CenteredMatrixView::from_adjacency(&a, p, t)
    }

    /// `(1/N) sum_{i,j} (a_ij(t) - p(t))` over all `N^2` ordered pairs.
    pub fn edge_sum_centered(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.edge_sums_sorted(&[t])[0])
    }

    /// [`edge_sum_centered`](Self::edge_sum_centered) at several times in
    /// one pass over the paths. `times` may be in any order.
    pub fn edge_sums_on(&self, times: &[f64]) -> Result<Vec<f64>> {
        for &t in times {
            self.check_time(t)?;
        }
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let sorted: Vec<f64> = order.iter().map(|&k| times[k]).collect();
        let sums = self.edge_sums_sorted(&sorted);
        let mut out = vec![0.0; times.len()];
        for (pos, &k) in order.iter().enumerate() {
            out[k] = sums[pos];
        }
        Ok(out)
    }

    fn edge_sums_sorted(&self, times: &[f64]) -> Vec<f64> {
        // weighted one-counts (2 off-diagonal, 1 diagonal): the initial
        // total plus a difference array indexed by the first time at or
        // after each jump
        let mut base = 0i64;
        let mut delta = vec![0i64; times.len() + 1];
        for ((i, j), path) in self.edges() {
            let w = if i == j { 1 } else { 2 };
            let mut state = path.initial_state();
            base += w * i64::from(state);
            for &tau in path.jump_times() {
                let k = times.partition_point(|&t| t < tau);
                delta[k] += if state == 0 { w } else { -w };
                state ^= 1;
            }
        }
        let n = self.n as f64;
        let mut count = base;
        times
            .iter()
            .zip(&delta)
            .map(|(&t, d)| {
                count += d;
                (count as f64 - n * n * self.params.edge_prob_unchecked(t)) / n
            })
            .collect()
    }

    /// Every jump as `(time, edge index)`, sorted by time then index.
    pub fn global_events(&self) -> Vec<(f64, usize)> {
        let mut ev = Vec::with_capacity(self.jumps.len());
        for k in 0..self.initial.len() {
            for &t in &self.jumps[self.offsets[k]..self.offsets[k + 1]] {
                ev.push((t, k));
            }
        }
        ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        ev
    }

    /// Smallest gap between two distinct jump times anywhere in the
    /// graph; `f64::INFINITY` when there are fewer than two.
    pub fn min_jump_spacing(&self) -> f64 {
        let mut times = self.jumps.clone();
        times.sort_by(f64::total_cmp);
        times
            .windows(2)
            .map(|w| w[1] - w[0])
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Theory curves for this trajectory's parameters.
    pub fn theory(&self) -> TheoryCurves {
        TheoryCurves::new(self.params)
    }
}
