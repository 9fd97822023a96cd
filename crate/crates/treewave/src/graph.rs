//! Tree topologies, their unique all-to-all routing, edge loads and the
//! conflict graph.
//!
//! Vertices are numbered breadth-first starting from the root (vertex 0),
//! children visited in ascending digit order.  The edge connecting a vertex
//! to its parent is identified by the child's vertex id, so edge ids run
//! over `1..n`.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Vertex = usize;
/// Edge id = vertex id of the child endpoint.
pub type EdgeId = usize;

/// Digit sequence addressing a vertex of a complete m-ary tree; the empty
/// sequence is the root.
pub type VertexAddress = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpiderShape {
    Path,
    Star,
    FullMaryIfApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Mary { m: usize, h: usize },
    Spider { k: usize, t: usize, shape: SpiderShape },
    Double { m: usize, h: usize },
    Explicit,
}

/// Rooted tree with deterministic breadth-first vertex numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    n: usize,
    parent: Vec<Option<Vertex>>,
    children: Vec<Vec<Vertex>>,
    depth: Vec<usize>,
    family: Family,
    labels: Option<Vec<VertexAddress>>,
}

impl Tree {
    fn from_parents(parent: Vec<Option<Vertex>>, family: Family) -> Self {
        let n = parent.len();
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0usize; n];
        for (v, p) in parent.iter().enumerate().skip(1) {
            let p = p.expect("non-root vertex must have a parent");
            children[p].push(v);
        }
        // ids are assigned breadth-first, so a simple pass fixes depths
        for v in 1..n {
            depth[v] = depth[parent[v].unwrap()] + 1;
        }
        Tree { n, parent, children, depth, family, labels: None }
    }

    /// Build an explicit tree from a parent array.  Vertex 0 must be the
    /// root and every vertex must have a smaller-numbered parent (the
    /// breadth-first numbering contract).
    pub fn explicit(parent: Vec<Option<Vertex>>) -> Result<Self> {
        if parent.is_empty() || parent[0].is_some() {
            return Err(Error::InvalidParameter("vertex 0 must be the root".into()));
        }
        for (v, p) in parent.iter().enumerate().skip(1) {
            match p {
                Some(p) if *p < v => {}
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "vertex {v} must have a parent with a smaller id"
                    )))
                }
            }
        }
        Ok(Tree::from_parents(parent, Family::Explicit))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn parent(&self, v: Vertex) -> Option<Vertex> {
        self.parent[v]
    }

    pub fn children(&self, v: Vertex) -> &[Vertex] {
        &self.children[v]
    }

    pub fn depth(&self, v: Vertex) -> usize {
        self.depth[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.children[v].len() + usize::from(self.parent[v].is_some())
    }

    pub fn label(&self, v: Vertex) -> Option<&VertexAddress> {
        self.labels.as_ref().map(|ls| &ls[v])
    }

    /// Vertices of the subtree rooted at `v`, in breadth-first order.
    pub fn subtree(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        queue.push_back(v);
        while let Some(u) = queue.pop_front() {
            out.push(u);
            for &c in &self.children[u] {
                queue.push_back(c);
            }
        }
        out
    }

    pub fn subtree_size(&self, v: Vertex) -> usize {
        // children have larger ids than their parent, so a reverse sweep works
        let mut size = vec![1usize; self.n];
        for u in (0..self.n).rev() {
            for &c in &self.children[u] {
                size[u] += size[c];
            }
        }
        size[v]
    }

    /// Sizes of all subtrees, indexed by root vertex.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.n];
        for u in (0..self.n).rev() {
            for &c in &self.children[u] {
                size[u] += size[c];
            }
        }
        size
    }

    pub fn to_json(&self) -> serde_json::Value {
        let parents: Vec<serde_json::Value> = self
            .parent
            .iter()
            .map(|p| match p {
                Some(v) => serde_json::json!(v),
                None => serde_json::Value::Null,
            })
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|ls| serde_json::json!(ls))
            .unwrap_or(serde_json::Value::Null);
        serde_json::json!({
            "family": self.family,
            "n": self.n,
            "parents": parents,
            "labels": labels,
        })
    }

    /// DOT export with stable vertex and edge ordering.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph tree {\n");
        for v in 0..self.n {
            match self.label(v) {
                Some(addr) if addr.is_empty() => {
                    let _ = writeln!(out, "  {} [label=\"r\"];", v);
                }
                Some(addr) => {
                    let digits: Vec<String> = addr.iter().map(|d| d.to_string()).collect();
                    let _ = writeln!(out, "  {} [label=\"r_{}\"];", v, digits.join(","));
                }
                None => {
                    let _ = writeln!(out, "  {};", v);
                }
            }
        }
        for v in 1..self.n {
            let _ = writeln!(out, "  {} -- {};", self.parent[v].unwrap(), v);
        }
        out.push_str("}\n");
        out
    }
}

/// Number of vertices of the complete m-ary tree of height `h`.
pub fn mary_vertex_count(m: usize, h: usize) -> usize {
    if m == 1 {
        h + 1
    } else {
        (m.pow(h as u32 + 1) - 1) / (m - 1)
    }
}

/// 1 + m + m^2 + ... + m^(h-1); the number of vertices of T_{m,h-1}.
pub fn geometric_sum(m: usize, h: usize) -> usize {
    if h == 0 {
        0
    } else {
        mary_vertex_count(m, h - 1)
    }
}

pub fn build_complete_mary_tree(m: usize, h: usize) -> Result<Tree> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let n = mary_vertex_count(m, h);
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    let mut labels: Vec<VertexAddress> = vec![Vec::new(); n];
    let mut next = 1usize;
    let mut frontier = vec![0usize];
    for _layer in 0..h {
        let mut next_frontier = Vec::with_capacity(frontier.len() * m);
        for &p in &frontier {
            for digit in 1..=m {
                parent[next] = Some(p);
                let mut addr = labels[p].clone();
                addr.push(digit as u32);
                labels[next] = addr;
                next_frontier.push(next);
                next += 1;
            }
        }
        frontier = next_frontier;
    }
    debug_assert_eq!(next, n);
    let mut tree = Tree::from_parents(parent, Family::Mary { m, h });
    tree.labels = Some(labels);
    Ok(tree)
}

/// Spider G^T_{k,t}: root of degree k whose removal leaves k components of
/// t vertices each.  The component topology is a generator flag.
pub fn build_spider(k: usize, t: usize, shape: SpiderShape) -> Result<Tree> {
    if k == 0 || t == 0 {
        return Err(Error::InvalidParameter("k and t must be at least 1".into()));
    }
    let n = 1 + k * t;
    match shape {
        SpiderShape::Path => {
            // layer d holds the d-th vertex of every component
            let mut parent: Vec<Option<Vertex>> = vec![None; n];
            for d in 1..=t {
                for c in 0..k {
                    let v = 1 + (d - 1) * k + c;
                    parent[v] = Some(if d == 1 { 0 } else { v - k });
                }
            }
            Ok(Tree::from_parents(parent, Family::Spider { k, t, shape }))
        }
        SpiderShape::Star => {
            let mut parent: Vec<Option<Vertex>> = vec![None; n];
            for c in 0..k {
                parent[1 + c] = Some(0);
            }
            for c in 0..k {
                for leaf in 0..t - 1 {
                    parent[1 + k + c * (t - 1) + leaf] = Some(1 + c);
                }
            }
            Ok(Tree::from_parents(parent, Family::Spider { k, t, shape }))
        }
        SpiderShape::FullMaryIfApplicable => {
            // need t = 1 + k + ... + k^(hc-1) so that each component is a
            // complete k-ary tree and the spider is isomorphic to T_{k,hc}
            let mut sum = 0usize;
            let mut term = 1usize;
            let mut hc = 0usize;
            while sum < t {
                sum += term;
                term = term.saturating_mul(k);
                hc += 1;
            }
            if sum != t {
                return Err(Error::InvalidParameter(format!(
                    "t = {t} is not 1 + {k} + ... + {k}^(h-1) for any h"
                )));
            }
            let mary = build_complete_mary_tree(k, hc)?;
            Ok(Tree::from_parents(
                (0..mary.n()).map(|v| mary.parent(v)).collect(),
                Family::Spider { k, t, shape },
            ))
        }
    }
}

/// Double tree D_{m,h}: two copies of T_{m,h-1} with their roots joined by
/// one bridge edge.  Vertex 0 is the A-side root, vertex 1 the B-side root,
/// and at each depth all A-side vertices precede the B-side ones.
pub fn build_double_tree(m: usize, h: usize) -> Result<Tree> {
    if m < 2 {
        return Err(Error::InvalidParameter("m must be at least 2".into()));
    }
    if h < 1 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    let side = mary_vertex_count(m, h - 1);
    let n = 2 * side;
    let mut parent: Vec<Option<Vertex>> = vec![None; n];
    parent[1] = Some(0);
    let mut next = 2usize;
    let mut frontier_a = vec![0usize];
    let mut frontier_b = vec![1usize];
    for _layer in 1..h {
        let mut next_a = Vec::new();
        let mut next_b = Vec::new();
        for &p in &frontier_a {
            for _ in 0..m {
                parent[next] = Some(p);
                next_a.push(next);
                next += 1;
            }
        }
        for &p in &frontier_b {
            for _ in 0..m {
                parent[next] = Some(p);
                next_b.push(next);
                next += 1;
            }
        }
        frontier_a = next_a;
        frontier_b = next_b;
    }
    debug_assert_eq!(next, n);
    Ok(Tree::from_parents(parent, Family::Double { m, h }))
}

/// The unique simple route between two vertices, held as terminal pair plus
/// the set of traversed edges (edge id = child endpoint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub u: Vertex,
    pub v: Vertex,
    pub edges: Vec<EdgeId>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }
}

pub fn tree_path(tree: &Tree, u: Vertex, v: Vertex) -> Result<Path> {
    if u >= tree.n() || v >= tree.n() {
        return Err(Error::InvalidParameter(format!(
            "vertex out of range (n = {})",
            tree.n()
        )));
    }
    if u == v {
        return Err(Error::InvalidParameter("path endpoints must differ".into()));
    }
    let (mut a, mut b) = (u, v);
    let mut edges = Vec::new();
    while tree.depth(a) > tree.depth(b) {
        edges.push(a);
        a = tree.parent(a).unwrap();
    }
    while tree.depth(b) > tree.depth(a) {
        edges.push(b);
        b = tree.parent(b).unwrap();
    }
    while a != b {
        edges.push(a);
        edges.push(b);
        a = tree.parent(a).unwrap();
        b = tree.parent(b).unwrap();
    }
    edges.sort_unstable();
    Ok(Path { u: u.min(v), v: u.max(v), edges })
}

/// The complete all-to-all routing: one path per unordered vertex pair, in
/// (u, v)-lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Routing {
    n: usize,
    paths: Vec<Path>,
}

impl Routing {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn paths(&self) -> &[Path] {
        &self.paths
    }

    pub fn path(&self, idx: usize) -> &Path {
        &self.paths[idx]
    }

    /// Index of the path with terminals `{u, v}` in canonical order.
    pub fn index_of(&self, u: Vertex, v: Vertex) -> usize {
        let (u, v) = (u.min(v), u.max(v));
        u * (2 * self.n - u - 1) / 2 + (v - u - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Path)> {
        self.paths.iter().enumerate()
    }
}

pub fn all_pairs_routing(tree: &Tree) -> Result<Routing> {
    let n = tree.n();
    if n < 2 {
        return Err(Error::InvalidParameter(
            "routing requires at least 2 vertices".into(),
        ));
    }
    let mut paths = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            paths.push(tree_path(tree, u, v)?);
        }
    }
    Ok(Routing { n, paths })
}

/// Per-edge path counts, indexed by edge id (entry 0 is unused).
pub fn edge_loads(routing: &Routing, tree: &Tree) -> Result<Vec<u64>> {
    if routing.n() != tree.n() {
        return Err(Error::InvalidParameter(
            "routing was not built from this tree".into(),
        ));
    }
    let mut loads = vec![0u64; tree.n()];
    for path in routing.paths() {
        for &e in &path.edges {
            loads[e] += 1;
        }
    }
    Ok(loads)
}

pub fn max_edge_load(routing: &Routing, tree: &Tree) -> Result<u64> {
    Ok(edge_loads(routing, tree)?.into_iter().max().unwrap_or(0))
}

/// Conflict graph Q(R): one vertex per path, adjacent iff the paths share
/// an edge.  Adjacency is held as a packed bit matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    order: usize,
    words: usize,
    rows: Vec<u64>,
}

impl ConflictGraph {
    pub fn new(order: usize) -> Self {
        let words = order.div_ceil(64);
        ConflictGraph { order, words, rows: vec![0; order * words] }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.rows[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.rows[i * self.words..(i + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.order).filter(move |&j| self.adjacent(i, j))
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn edge_count(&self) -> usize {
        (0..self.order).map(|i| self.degree(i)).sum::<usize>() / 2
    }
}

pub fn conflict_graph(routing: &Routing) -> ConflictGraph {
    let order = routing.len();
    let mut cg = ConflictGraph::new(order);
    // bucket paths by edge; paths sharing a bucket conflict
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); routing.n()];
    for (idx, path) in routing.iter() {
        for &e in &path.edges {
            buckets[e].push(idx);
        }
    }
    for bucket in &buckets {
        for (a, &i) in bucket.iter().enumerate() {
            for &j in &bucket[a + 1..] {
                cg.add_edge(i, j);
            }
        }
    }
    cg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mary_tree_sizes() {
        assert_eq!(build_complete_mary_tree(3, 3).unwrap().n(), 40);
        assert_eq!(build_complete_mary_tree(1, 4).unwrap().n(), 5);
        assert_eq!(build_complete_mary_tree(2, 2).unwrap().n(), 7);
        assert!(build_complete_mary_tree(0, 1).is_err());
    }

    #[test]
    fn mary_tree_labels_bfs() {
        let t = build_complete_mary_tree(2, 2).unwrap();
        assert_eq!(t.label(0).unwrap(), &Vec::<u32>::new());
        assert_eq!(t.label(1).unwrap(), &vec![1]);
        assert_eq!(t.label(2).unwrap(), &vec![2]);
        assert_eq!(t.label(3).unwrap(), &vec![1, 1]);
        assert_eq!(t.label(4).unwrap(), &vec![1, 2]);
        assert_eq!(t.label(5).unwrap(), &vec![2, 1]);
        assert_eq!(t.label(6).unwrap(), &vec![2, 2]);
        // leaves of T_{2,2}
        let leaves: Vec<usize> = (0..7).filter(|&v| t.children(v).is_empty()).collect();
        assert_eq!(leaves, vec![3, 4, 5, 6]);
    }

    #[test]
    fn path_collapse_for_unary() {
        let t = build_complete_mary_tree(1, 4).unwrap();
        for v in 1..5 {
            assert_eq!(t.parent(v), Some(v - 1));
        }
    }

    #[test]
    fn spider_shapes() {
        let s = build_spider(3, 4, SpiderShape::Path).unwrap();
        assert_eq!(s.n(), 13);
        assert_eq!(s.children(0).len(), 3);

        let s = build_spider(1, 5, SpiderShape::Path).unwrap();
        assert_eq!(s.n(), 6);
        for v in 1..6 {
            assert_eq!(s.parent(v), Some(v - 1));
        }

        let s = build_spider(3, 4, SpiderShape::FullMaryIfApplicable).unwrap();
        let t = build_complete_mary_tree(3, 2).unwrap();
        assert_eq!(s.n(), t.n());
        for v in 0..s.n() {
            assert_eq!(s.parent(v), t.parent(v));
        }

        assert!(build_spider(3, 5, SpiderShape::FullMaryIfApplicable).is_err());

        let s = build_spider(4, 3, SpiderShape::Star).unwrap();
        assert_eq!(s.n(), 13);
        assert_eq!(s.children(0).len(), 4);
        for c in 1..=4 {
            assert_eq!(s.children(c).len(), 2);
        }
    }

    #[test]
    fn double_tree_shape() {
        let d = build_double_tree(4, 2).unwrap();
        assert_eq!(d.n(), 10);
        assert_eq!(d.parent(1), Some(0)); // bridge
        assert_eq!(d.children(0), &[1, 2, 3, 4, 5]);
        assert_eq!(d.children(1), &[6, 7, 8, 9]);

        let d = build_double_tree(2, 1).unwrap();
        assert_eq!(d.n(), 2);

        let d = build_double_tree(3, 2).unwrap();
        assert_eq!(d.n(), 8);
        assert_eq!(d.children(0).len(), 4);
        assert_eq!(d.children(1).len(), 3);
    }

    #[test]
    fn tree_path_examples() {
        let t = build_complete_mary_tree(2, 2).unwrap();
        // leaf-to-leaf through the root: r_{1,1} to r_{2,2}
        let p = tree_path(&t, 3, 6).unwrap();
        assert_eq!(p.edges, vec![1, 2, 3, 6]);
        // root to first child
        let p = tree_path(&t, 0, 1).unwrap();
        assert_eq!(p.edges, vec![1]);
        assert!(tree_path(&t, 3, 3).is_err());
        assert!(tree_path(&t, 0, 99).is_err());

        let t = build_complete_mary_tree(1, 3).unwrap();
        assert_eq!(tree_path(&t, 0, 3).unwrap().len(), 3);
    }

    #[test]
    fn routing_sizes_and_index() {
        let t = build_complete_mary_tree(2, 1).unwrap();
        assert_eq!(all_pairs_routing(&t).unwrap().len(), 3);

        let t = build_complete_mary_tree(2, 2).unwrap();
        let r = all_pairs_routing(&t).unwrap();
        assert_eq!(r.len(), 21);
        for (idx, p) in r.iter() {
            assert_eq!(r.index_of(p.u, p.v), idx);
        }

        let t = build_complete_mary_tree(3, 3).unwrap();
        assert_eq!(all_pairs_routing(&t).unwrap().len(), 780);

        let single = build_complete_mary_tree(1, 0).unwrap();
        assert!(all_pairs_routing(&single).is_err());
    }

    #[test]
    fn edge_load_values() {
        let t = build_complete_mary_tree(2, 2).unwrap();
        let r = all_pairs_routing(&t).unwrap();
        let loads = edge_loads(&r, &t).unwrap();
        assert_eq!(loads[1], 12); // e_1 of T_{2,2}
        for load in &loads[3..7] {
            assert_eq!(*load, 6); // n - 1
        }

        let t = build_complete_mary_tree(2, 3).unwrap();
        let r = all_pairs_routing(&t).unwrap();
        assert_eq!(edge_loads(&r, &t).unwrap()[1], 56);
    }

    #[test]
    fn load_identity_a_times_n_minus_a() {
        for (m, h) in [(2, 3), (3, 2), (4, 2), (1, 5)] {
            let t = build_complete_mary_tree(m, h).unwrap();
            let r = all_pairs_routing(&t).unwrap();
            let loads = edge_loads(&r, &t).unwrap();
            let sizes = t.subtree_sizes();
            for e in 1..t.n() {
                let a = sizes[e] as u64;
                assert_eq!(loads[e], a * (t.n() as u64 - a));
            }
        }
    }

    #[test]
    fn conflict_graph_small_cases() {
        // T_{1,2}: three intervals on a 2-edge path
        let t = build_complete_mary_tree(1, 2).unwrap();
        let r = all_pairs_routing(&t).unwrap();
        let cg = conflict_graph(&r);
        assert_eq!(cg.order(), 3);
        assert_eq!(cg.edge_count(), 2);

        // T_{2,1}: P(r,r_1) and P(r,r_2) disjoint, P(r_1,r_2) hits both
        let t = build_complete_mary_tree(2, 1).unwrap();
        let r = all_pairs_routing(&t).unwrap();
        let cg = conflict_graph(&r);
        let p01 = r.index_of(0, 1);
        let p02 = r.index_of(0, 2);
        let p12 = r.index_of(1, 2);
        assert!(!cg.adjacent(p01, p02));
        assert!(cg.adjacent(p12, p01));
        assert!(cg.adjacent(p12, p02));
    }

    #[test]
    fn determinism_of_construction() {
        let a = build_complete_mary_tree(3, 2).unwrap();
        let b = build_complete_mary_tree(3, 2).unwrap();
        assert_eq!(a, b);
        let ra = all_pairs_routing(&a).unwrap();
        let rb = all_pairs_routing(&b).unwrap();
        assert_eq!(ra, rb);
    }

    #[test]
    fn tree_json_and_dot() {
        let t = build_complete_mary_tree(2, 1).unwrap();
        let json = t.to_json();
        assert_eq!(json["n"], 3);
        assert_eq!(json["parents"][0], serde_json::Value::Null);
        assert_eq!(json["parents"][1], 0);
        let dot = t.to_dot();
        assert!(dot.contains("0 -- 1;"));
        assert!(dot.contains("0 -- 2;"));
    }
}
