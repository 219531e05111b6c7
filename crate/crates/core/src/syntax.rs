//! Dependency-tree distances and the attention mask derived from them.
//!
//! Attention in the syntactic module is restricted by distance in the
//! dependency tree rather than by positions in the word sequence: a pair of
//! nodes may attend each other iff their undirected tree distance is at most
//! `delta` (`None` = unlimited, which recovers full attention). For sentence
//! pairs a virtual `[CLS]` node is attached with one edge to the root of each
//! tree, so the only paths between the two sentences run through `[CLS]`.

use thiserror::Error;

use crate::conllu::DependencyTree;

#[derive(Debug, Error)]
pub enum SyntaxError {
    #[error("graph is not connected: node {0} unreachable")]
    Disconnected(usize),
    #[error("attach_cls takes one or two trees, got {0}")]
    BadTreeCount(usize),
    #[error("graph with {nodes} nodes has {edges} edges; a tree needs nodes - 1")]
    NotATree { nodes: usize, edges: usize },
}

/// Role of a graph node: the virtual classifier node or a token of one of
/// the input trees (`tree` is 0 or 1, `index` the 1-based token index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Cls,
    Token { tree: usize, index: usize },
}

/// Undirected tree over sentence tokens, optionally rooted under a `[CLS]`
/// virtual node. Node ids are 0-based and contiguous.
#[derive(Debug, Clone)]
pub struct SyntaxGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    roles: Vec<NodeRole>,
}

impl SyntaxGraph {
    pub fn from_edges(n: usize, edges: Vec<(usize, usize)>, roles: Vec<NodeRole>) -> Self {
        debug_assert_eq!(roles.len(), n);
        SyntaxGraph { n, edges, roles }
    }

    /// Graph of one bare tree: node `i` is token `i + 1`, no virtual nodes.
    pub fn from_tree(tree: &DependencyTree) -> Self {
        let n = tree.n();
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        for (i, &p) in tree.parent.iter().enumerate() {
            if p != 0 {
                edges.push((i, p - 1));
            }
        }
        let roles = (1..=n).map(|index| NodeRole::Token { tree: 0, index }).collect();
        SyntaxGraph { n, edges, roles }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn roles(&self) -> &[NodeRole] {
        &self.roles
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

/// Joins one or two dependency trees under a fresh `[CLS]` node (node 0) with
/// an edge to each tree's root. Token nodes are renumbered contiguously:
/// tree-0 tokens first, then tree-1 tokens.
pub fn attach_cls(trees: &[&DependencyTree]) -> Result<SyntaxGraph, SyntaxError> {
    if trees.is_empty() || trees.len() > 2 {
        return Err(SyntaxError::BadTreeCount(trees.len()));
    }
    let total: usize = trees.iter().map(|t| t.n()).sum();
    let n = total + 1;
    let mut edges = Vec::with_capacity(total + trees.len());
    let mut roles = Vec::with_capacity(n);
    roles.push(NodeRole::Cls);

    let mut offset = 1usize;
    for (ti, tree) in trees.iter().enumerate() {
        edges.push((0, offset + tree.root - 1));
        for (i, &p) in tree.parent.iter().enumerate() {
            if p != 0 {
                edges.push((offset + i, offset + p - 1));
            }
        }
        for index in 1..=tree.n() {
            roles.push(NodeRole::Token { tree: ti, index });
        }
        offset += tree.n();
    }
    Ok(SyntaxGraph { n, edges, roles })
}

/// All-pairs path lengths on the undirected tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDistanceMatrix {
    n: usize,
    d: Vec<u32>,
}

impl TreeDistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.d[i * self.n + j]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// BFS from every node; errors if the graph is disconnected.
pub fn tree_distances(g: &SyntaxGraph) -> Result<TreeDistanceMatrix, SyntaxError> {
    let n = g.n();
    if n > 0 && g.edges().len() != n - 1 {
        return Err(SyntaxError::NotATree {
            nodes: n,
            edges: g.edges().len(),
        });
    }
    let adj = g.adjacency();
    let mut d = vec![u32::MAX; n * n];
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n {
        let row = &mut d[start * n..(start + 1) * n];
        row[start] = 0;
        queue.clear();
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            let du = row[u];
            for &v in &adj[u] {
                if row[v] == u32::MAX {
                    row[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        if let Some(unreached) = row.iter().position(|&x| x == u32::MAX) {
            return Err(SyntaxError::Disconnected(unreached));
        }
    }
    Ok(TreeDistanceMatrix { n, d })
}

/// Which node pairs may attend each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttentionMask {
    n: usize,
    allowed: Vec<bool>,
}

impl AttentionMask {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn allowed(&self, i: usize, j: usize) -> bool {
        self.allowed[i * self.n + j]
    }

    pub fn all_true(n: usize) -> Self {
        AttentionMask {
            n,
            allowed: vec![true; n * n],
        }
    }

    pub fn count_allowed(&self) -> usize {
        self.allowed.iter().filter(|&&b| b).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<&str> = (0..self.n)
                .map(|j| if self.allowed(i, j) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `allowed(i, j) <=> d(i, j) <= delta`; `delta = None` allows everything.
pub fn build_mask(d: &TreeDistanceMatrix, delta: Option<u32>) -> AttentionMask {
    let n = d.n();
    let allowed = match delta {
        None => vec![true; n * n],
        Some(k) => d.d.iter().map(|&dist| dist <= k).collect(),
    };
    AttentionMask { n, allowed }
}
