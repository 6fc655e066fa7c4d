//! Classical centralities on an unweighted, undirected graph given as sorted
//! adjacency lists.

use std::collections::VecDeque;

use crate::error::{Error, Result};

pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const EIGEN_MAX_ITERATIONS: usize = 10_000;

pub fn degree(adj: &[Vec<usize>]) -> Vec<f64> {
    adj.iter().map(|n| n.len() as f64).collect()
}

/// Shortest-path betweenness (Brandes), normalized by the number of node
/// pairs not involving the node, `(n-1)(n-2)/2`.
pub fn betweenness(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut cb = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        stack.clear();
        for v in 0..n {
            preds[v].clear();
            sigma[v] = 0.0;
            dist[v] = usize::MAX;
            delta[v] = 0.0;
        }
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                cb[w] += delta[w];
            }
        }
    }
    // Each unordered pair was counted from both endpoints.
    let pairs = if n > 2 {
        ((n - 1) * (n - 2)) as f64
    } else {
        1.0
    };
    cb.iter().map(|c| c / pairs).collect()
}

/// Harmonic closeness: `Σ_{v≠u} 1/d(u,v) / (n-1)`, with unreachable nodes
/// contributing zero.
pub fn harmonic_closeness(adj: &[Vec<usize>]) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::with_capacity(n);
    let scale = if n > 1 { (n - 1) as f64 } else { 1.0 };
    (0..n)
        .map(|s| {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[s] = 0;
            queue.push_back(s);
            let mut total = 0.0;
            while let Some(v) = queue.pop_front() {
                if v != s {
                    total += 1.0 / dist[v] as f64;
                }
                for &w in &adj[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            total / scale
        })
        .collect()
}

/// Dominant eigenvector of the adjacency matrix by power iteration on `A + I`
/// (same eigenvectors, no oscillation on bipartite graphs), starting from the
/// uniform vector. Converged when the L1 change falls below `n · tolerance`.
pub fn eigenvector(adj: &[Vec<usize>]) -> Result<Vec<f64>> {
    let n = adj.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..EIGEN_MAX_ITERATIONS {
        for (v, nbrs) in adj.iter().enumerate() {
            next[v] = x[v] + nbrs.iter().map(|&w| x[w]).sum::<f64>();
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if change < n as f64 * EIGEN_TOLERANCE {
            return Ok(x);
        }
    }
    Err(Error::Convergence {
        iterations: EIGEN_MAX_ITERATIONS,
    })
}
