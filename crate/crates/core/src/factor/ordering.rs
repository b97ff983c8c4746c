use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseSym;

/// A symmetric permutation. Position `i` of the reordered matrix holds
/// original index `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering {
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
}

/// Which fill-reducing heuristic to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingMethod {
    Natural,
    /// Reverse Cuthill-McKee.
    #[default]
    Rcm,
    /// Greedy minimum degree on the explicit elimination graph.
    MinimumDegree,
}

impl std::str::FromStr for OrderingMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "natural" | "none" => Ok(Self::Natural),
            "rcm" => Ok(Self::Rcm),
            "md" | "mindeg" | "minimum-degree" | "amd" => Ok(Self::MinimumDegree),
            _ => Err(Error::InvalidArgument(format!("unknown ordering '{s}'"))),
        }
    }
}

impl Ordering {
    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            inv_perm: (0..n).collect(),
        }
    }

    pub fn from_perm(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut inv_perm = vec![usize::MAX; n];
        for (i, &p) in perm.iter().enumerate() {
            if p >= n || inv_perm[p] != usize::MAX {
                return Err(Error::InvalidArgument(
                    "permutation is not a bijection".into(),
                ));
            }
            inv_perm[p] = i;
        }
        Ok(Self { perm, inv_perm })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inv_perm(&self) -> &[usize] {
        &self.inv_perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// Fill-reducing ordering with the default heuristic (reverse Cuthill-McKee).
pub fn fill_reducing_order(s: &SparseSym) -> Result<Ordering> {
    order_with(s, OrderingMethod::default())
}

pub fn order_with(s: &SparseSym, method: OrderingMethod) -> Result<Ordering> {
    if !s.is_symmetric() {
        return Err(Error::InvalidArgument(
            "fill-reducing ordering needs a symmetric matrix".into(),
        ));
    }
    let perm = match method {
        OrderingMethod::Natural => (0..s.n()).collect(),
        OrderingMethod::Rcm => reverse_cuthill_mckee(&adjacency(s)),
        OrderingMethod::MinimumDegree => minimum_degree(&adjacency(s)),
    };
    Ordering::from_perm(perm)
}

/// Off-diagonal adjacency lists, sorted ascending.
fn adjacency(s: &SparseSym) -> Vec<Vec<usize>> {
    (0..s.n())
        .map(|i| s.row(i).0.iter().copied().filter(|&j| j != i).collect())
        .collect()
}

/// BFS from `root` over unvisited nodes; returns the level sets.
fn level_structure(adj: &[Vec<usize>], root: usize, visited: &[bool]) -> Vec<Vec<usize>> {
    let mut seen = visited.to_vec();
    seen[root] = true;
    let mut levels = vec![vec![root]];
    loop {
        let mut next = Vec::new();
        for &u in levels.last().unwrap() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    next.push(v);
                }
            }
        }
        if next.is_empty() {
            return levels;
        }
        levels.push(next);
    }
}

/// George-Liu pseudo-peripheral node search.
fn pseudo_peripheral(adj: &[Vec<usize>], start: usize, visited: &[bool]) -> usize {
    let mut root = start;
    let mut levels = level_structure(adj, root, visited);
    loop {
        let last = levels.last().unwrap();
        let candidate = *last
            .iter()
            .min_by_key(|&&v| (adj[v].len(), v))
            .expect("nonempty level");
        let cand_levels = level_structure(adj, candidate, visited);
        if cand_levels.len() > levels.len() {
            root = candidate;
            levels = cand_levels;
        } else {
            return root;
        }
    }
}

fn reverse_cuthill_mckee(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    // components are started in order of lowest (degree, index)
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&v| (adj[v].len(), v));
    let mut queue = VecDeque::new();
    let mut nbrs = Vec::new();
    for &s in &starts {
        if visited[s] {
            continue;
        }
        let root = pseudo_peripheral(adj, s, &visited);
        let first = order.len();
        visited[root] = true;
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            nbrs.clear();
            nbrs.extend(adj[u].iter().copied().filter(|&v| !visited[v]));
            nbrs.sort_by_key(|&v| (adj[v].len(), v));
            for &v in &nbrs {
                visited[v] = true;
                queue.push_back(v);
            }
        }
        order[first..].reverse();
    }
    order
}

fn minimum_degree(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut graph: Vec<BTreeSet<usize>> = adj.iter().map(|a| a.iter().copied().collect()).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (graph[v].len(), v)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, v)) = queue.pop_first() {
        order.push(v);
        let nbrs: Vec<usize> = std::mem::take(&mut graph[v]).into_iter().collect();
        for &u in &nbrs {
            queue.remove(&(graph[u].len(), u));
            graph[u].remove(&v);
            for &w in &nbrs {
                if w != u {
                    graph[u].insert(w);
                }
            }
            queue.insert((graph[u].len(), u));
        }
    }
    order
}
