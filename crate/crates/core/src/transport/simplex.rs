//! Exact transportation simplex.
//!
//! Solves `min <C, P>` over nonnegative `P` with row sums `supply` and column
//! sums `demand`. The basis is a spanning tree on the bipartite graph of rows
//! and columns with `m + n - 1` cells (degenerate zero cells included). The
//! start basis comes from the north-west corner rule, entering cells are chosen
//! by most negative reduced cost, and after a run of degenerate pivots the
//! rule switches to Bland's smallest-index rule so the method terminates.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// A transport plan between two finite marginals, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    rows: usize,
    cols: usize,
    mass: Vec<f64>,
}

impl Coupling {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mass[i * self.cols + j]
    }

    /// Cells with positive mass as `(row, col, mass)`.
    pub fn support(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0.0)
            .map(|(c, &x)| (c / self.cols, c % self.cols, x))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.mass.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for row in self.mass.chunks(self.cols) {
            out.iter_mut().zip(row).for_each(|(o, x)| *o += x);
        }
        out
    }

    /// Largest absolute deviation of the marginals from `a` and `b`.
    pub fn marginal_error(&self, a: &[f64], b: &[f64]) -> f64 {
        let r = self.row_sums().iter().zip(a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let c = self.col_sums().iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        r.max(c)
    }
}

/// Optimal plan with a certificate.
#[derive(Debug, Clone)]
pub struct TransportSolution {
    pub plan: Coupling,
    /// Primal objective `sum_ij P_ij C_ij`.
    pub cost: f64,
    /// `(cost - dual) / max(cost, max C)` for a dual-feasible potential pair.
    pub relative_gap: f64,
    pub pivots: usize,
}

struct Tree {
    rows: usize,
    cols: usize,
    // basic cells as (row, col)
    cells: Vec<(usize, usize)>,
    // node -> indices into `cells`; rows are nodes 0..m, columns m..m+n
    adj: Vec<Vec<usize>>,
}

impl Tree {
    fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: Vec::with_capacity(rows + cols), adj: vec![Vec::new(); rows + cols] }
    }

    fn push(&mut self, i: usize, j: usize) {
        let id = self.cells.len();
        self.cells.push((i, j));
        self.adj[i].push(id);
        self.adj[self.rows + j].push(id);
    }

    fn replace(&mut self, id: usize, i: usize, j: usize) {
        let (oi, oj) = self.cells[id];
        self.adj[oi].retain(|&c| c != id);
        self.adj[self.rows + oj].retain(|&c| c != id);
        self.cells[id] = (i, j);
        self.adj[i].push(id);
        self.adj[self.rows + j].push(id);
    }

    fn other_end(&self, id: usize, node: usize) -> usize {
        let (i, j) = self.cells[id];
        if node == i {
            self.rows + j
        } else {
            i
        }
    }

    /// Potentials with `u_i + v_j = c_ij` on every basic cell, `u_0 = 0`.
    fn potentials(&self, cost: &[f64], u: &mut [f64], v: &mut [f64]) {
        let mut seen = vec![false; self.rows + self.cols];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        u[0] = 0.0;
        while let Some(node) = queue.pop_front() {
            for &id in &self.adj[node] {
                let next = self.other_end(id, node);
                if seen[next] {
                    continue;
                }
                seen[next] = true;
                let (i, j) = self.cells[id];
                let c = cost[i * self.cols + j];
                if next >= self.rows {
                    v[j] = c - u[i];
                } else {
                    u[i] = c - v[j];
                }
                queue.push_back(next);
            }
        }
    }

    /// Basic cells on the tree path from column node `q` to row node `p`, in order.
    fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut via = vec![usize::MAX; self.rows + self.cols];
        let mut seen = vec![false; self.rows + self.cols];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(node) = queue.pop_front() {
            if node == to {
                break;
            }
            for &id in &self.adj[node] {
                let next = self.other_end(id, node);
                if !seen[next] {
                    seen[next] = true;
                    via[next] = id;
                    queue.push_back(next);
                }
            }
        }
        let mut out = Vec::new();
        let mut node = to;
        while node != from {
            let id = via[node];
            out.push(id);
            node = self.other_end(id, node);
        }
        out.reverse();
        out
    }
}

/// Solve the balanced transportation problem exactly.
///
/// `cost` is row-major `supply.len() x demand.len()`. Supplies and demands must
/// be nonnegative with equal totals up to rounding.
pub fn solve_transport(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<TransportSolution> {
    let (m, n) = (supply.len(), demand.len());
    if m == 0 || n == 0 {
        return Err(Error::Parameter("empty marginal".into()));
    }
    if cost.len() != m * n {
        return Err(Error::Parameter("cost matrix shape does not match marginals".into()));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::Parameter("non-finite transport cost".into()));
    }
    let max_cost = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
    let tol = 1e-11 * max_cost.max(f64::MIN_POSITIVE);

    let mut flow = vec![0.0f64; m * n];
    let mut tree = Tree::new(m, n);
    let mut basic = vec![false; m * n];

    // north-west corner
    {
        let (mut i, mut j) = (0usize, 0usize);
        let (mut ra, mut rb) = (supply[0], demand[0]);
        loop {
            let x = ra.min(rb).max(0.0);
            flow[i * n + j] = x;
            basic[i * n + j] = true;
            tree.push(i, j);
            ra -= x;
            rb -= x;
            if i == m - 1 && j == n - 1 {
                break;
            }
            if i == m - 1 || (j < n - 1 && rb < ra) {
                j += 1;
                rb = demand[j];
            } else {
                i += 1;
                ra = supply[i];
            }
        }
    }

    let mut u = vec![0.0; m];
    let mut v = vec![0.0; n];
    let mut pivots = 0usize;
    let mut degenerate_run = 0usize;
    let max_pivots = 50 * (m + n) * (m + n) + 1000;
    loop {
        tree.potentials(cost, &mut u, &mut v);
        let bland = degenerate_run > m + n;
        let mut entering: Option<(usize, usize)> = None;
        let mut best = -tol;
        'scan: for i in 0..m {
            let row = &cost[i * n..(i + 1) * n];
            for j in 0..n {
                if basic[i * n + j] {
                    continue;
                }
                let r = row[j] - u[i] - v[j];
                if r < best {
                    entering = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = r;
                }
            }
        }
        let Some((p, q)) = entering else { break };
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Numerical("transport simplex exceeded pivot limit".into()));
        }
        // Cycle: entering cell (+), then alternating -, + along the tree path from column q to row p.
        let path = tree.path(m + q, p);
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for (pos, &id) in path.iter().enumerate() {
            if pos % 2 == 0 {
                let (i, j) = tree.cells[id];
                let x = flow[i * n + j];
                let better = x < theta || (x == theta && bland && (i * n + j) < {
                    let (li, lj) = tree.cells[leave];
                    li * n + lj
                });
                if better {
                    theta = x;
                    leave = id;
                }
            }
        }
        let theta = theta.max(0.0);
        degenerate_run = if theta == 0.0 { degenerate_run + 1 } else { 0 };
        flow[p * n + q] = theta;
        for (pos, &id) in path.iter().enumerate() {
            let (i, j) = tree.cells[id];
            if pos % 2 == 0 {
                flow[i * n + j] = (flow[i * n + j] - theta).max(0.0);
            } else {
                flow[i * n + j] += theta;
            }
        }
        let (li, lj) = tree.cells[leave];
        flow[li * n + lj] = 0.0;
        basic[li * n + lj] = false;
        basic[p * n + q] = true;
        tree.replace(leave, p, q);
    }

    let primal: f64 = flow.iter().zip(cost).map(|(x, c)| x * c).sum();
    // shift column potentials so that (u, v) is exactly dual feasible
    for j in 0..n {
        let slack = (0..m).map(|i| cost[i * n + j] - u[i] - v[j]).fold(f64::INFINITY, f64::min);
        if slack < 0.0 {
            v[j] += slack;
        }
    }
    let dual: f64 =
        supply.iter().zip(&u).map(|(a, x)| a * x).sum::<f64>() + demand.iter().zip(&v).map(|(b, y)| b * y).sum::<f64>();
    let scale = primal.abs().max(max_cost).max(f64::MIN_POSITIVE);
    Ok(TransportSolution {
        plan: Coupling { rows: m, cols: n, mass: flow },
        cost: primal,
        relative_gap: (primal - dual).max(0.0) / scale,
        pivots,
    })
}
