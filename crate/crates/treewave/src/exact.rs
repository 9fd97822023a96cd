//! Independent verification: exact chromatic number of conflict graphs,
//! max-clique search, small-tree enumeration, and optimality certificates.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::Instant;

use serde::Serialize;

use crate::bounds::{best_vertex_cut_bound, closed_form_w, edge_cut_bound_tree};
use crate::colorings::{color_mary, greedy_coloring, verify_assignment, GreedyOrder, Method, WavelengthAssignment};
use crate::graph::{all_pairs_routing, conflict_graph, max_edge_load, ConflictGraph, Tree};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CliqueResult {
    /// Lower bound on the clique number; exact when the budget sufficed.
    pub size: usize,
    pub exact: bool,
}

/// Branch-and-bound maximum clique with a wall-clock soft budget.
pub fn max_clique(cg: &ConflictGraph, budget_ms: u64) -> CliqueResult {
    let n = cg.order();
    if n == 0 {
        return CliqueResult { size: 0, exact: true };
    }
    let deadline = Instant::now() + std::time::Duration::from_millis(budget_ms);
    // degeneracy-style order: repeatedly take the smallest-degree vertex
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (cg.degree(v), v));
    let mut best = 1usize;
    let mut exact = true;

    fn expand(
        cg: &ConflictGraph,
        candidates: &[usize],
        size: usize,
        best: &mut usize,
        deadline: Instant,
        exact: &mut bool,
    ) {
        if candidates.is_empty() {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.len() <= *best {
            return;
        }
        if Instant::now() > deadline {
            *exact = false;
            return;
        }
        for (i, &v) in candidates.iter().enumerate() {
            if size + (candidates.len() - i) <= *best {
                return;
            }
            let rest: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&u| cg.adjacent(v, u))
                .collect();
            expand(cg, &rest, size + 1, best, deadline, exact);
        }
    }

    expand(cg, &order, 0, &mut best, deadline, &mut exact);
    CliqueResult { size: best, exact }
}

#[derive(Debug, Clone)]
pub struct ChromaticResult {
    pub lower: usize,
    pub upper: usize,
    pub exact: Option<usize>,
    pub witness: Option<WavelengthAssignment>,
    pub budget_exhausted: bool,
}

/// DSATUR-style branch and bound.  Seeded with the given bounds; returns
/// the exact chromatic number when the search closes the gap within the
/// wall-clock budget, and the best bounds found otherwise.
pub fn exact_chromatic(
    cg: &ConflictGraph,
    lb_hint: usize,
    ub_hint: usize,
    budget_ms: u64,
) -> Result<ChromaticResult> {
    if ub_hint != 0 && lb_hint > ub_hint {
        return Err(Error::InvalidParameter("lb hint exceeds ub hint".into()));
    }
    let n = cg.order();
    if n == 0 {
        return Ok(ChromaticResult {
            lower: 0,
            upper: 0,
            exact: Some(0),
            witness: None,
            budget_exhausted: false,
        });
    }
    let deadline = Instant::now() + std::time::Duration::from_millis(budget_ms);
    let clique = max_clique(cg, budget_ms / 4 + 1);
    let mut lower = lb_hint.max(clique.size).max(1);
    let greedy = greedy_coloring(cg, GreedyOrder::DegreeDesc);
    let mut upper = greedy.num_colors;
    if ub_hint != 0 {
        upper = upper.min(ub_hint);
    }
    let mut witness = greedy;
    let mut budget_exhausted = !clique.exact;

    // iteratively ask for one color fewer than the best known coloring
    while lower < upper {
        let target = upper - 1;
        match try_color(cg, target, deadline) {
            SearchOutcome::Colored(colors) => {
                witness = WavelengthAssignment {
                    num_colors: colors.iter().copied().max().map_or(0, |c| c + 1),
                    colors,
                    method: Method::Greedy,
                };
                upper = witness.num_colors;
            }
            SearchOutcome::Impossible => {
                lower = upper;
            }
            SearchOutcome::OutOfBudget => {
                budget_exhausted = true;
                break;
            }
        }
    }
    let exact = (lower == upper).then_some(lower);
    Ok(ChromaticResult { lower, upper, exact, witness: Some(witness), budget_exhausted })
}

enum SearchOutcome {
    Colored(Vec<usize>),
    Impossible,
    OutOfBudget,
}

/// Can the graph be properly colored with at most `k` colors?
fn try_color(cg: &ConflictGraph, k: usize, deadline: Instant) -> SearchOutcome {
    let n = cg.order();
    let mut colors = vec![usize::MAX; n];
    let mut out_of_budget = false;

    fn recurse(
        cg: &ConflictGraph,
        k: usize,
        colors: &mut Vec<usize>,
        colored: usize,
        max_used: usize,
        deadline: Instant,
        out_of_budget: &mut bool,
    ) -> bool {
        let n = cg.order();
        if colored == n {
            return true;
        }
        if *out_of_budget {
            return false;
        }
        if colored.is_multiple_of(8) && Instant::now() > deadline {
            *out_of_budget = true;
            return false;
        }
        // DSATUR vertex choice: highest saturation, then highest degree,
        // then lowest index
        let mut pick = usize::MAX;
        let mut pick_key = (0usize, 0usize);
        for v in 0..n {
            if colors[v] != usize::MAX {
                continue;
            }
            let sat: BTreeSet<usize> = cg
                .neighbors(v)
                .filter(|&u| colors[u] != usize::MAX)
                .map(|u| colors[u])
                .collect();
            let key = (sat.len(), cg.degree(v));
            if pick == usize::MAX || key > pick_key {
                pick = v;
                pick_key = key;
            }
        }
        let mut forbidden = vec![false; k];
        for u in cg.neighbors(pick) {
            if colors[u] != usize::MAX {
                forbidden[colors[u]] = true;
            }
        }
        // symmetry break: allow at most one brand-new color
        let limit = (max_used + 1).min(k);
        for (c, &blocked) in forbidden.iter().enumerate().take(limit) {
            if blocked {
                continue;
            }
            colors[pick] = c;
            if recurse(
                cg,
                k,
                colors,
                colored + 1,
                max_used.max(c + 1),
                deadline,
                out_of_budget,
            ) {
                return true;
            }
            colors[pick] = usize::MAX;
            if *out_of_budget {
                return false;
            }
        }
        false
    }

    if recurse(cg, k, &mut colors, 0, 0, deadline, &mut out_of_budget) {
        SearchOutcome::Colored(colors)
    } else if out_of_budget {
        SearchOutcome::OutOfBudget
    } else {
        SearchOutcome::Impossible
    }
}

/// All non-isomorphic trees on `n` vertices, each rooted at a canonical
/// centroid.  Built by leaf extension from the trees on n-1 vertices with
/// canonical-form deduplication.
pub fn enumerate_small_trees(n: usize) -> Result<Vec<Tree>> {
    if !(2..=10).contains(&n) {
        return Err(Error::InvalidParameter("n must be in 2..=10".into()));
    }
    // adjacency-list representation during generation
    let mut current: Vec<Vec<Vec<usize>>> = vec![vec![vec![1], vec![0]]];
    for size in 3..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for adj in &current {
            for attach in 0..size - 1 {
                let mut bigger = adj.clone();
                bigger.push(vec![attach]);
                bigger[attach].push(size - 1);
                let key = canonical_form(&bigger);
                if seen.insert(key) {
                    next.push(bigger);
                }
            }
        }
        current = next;
    }
    current.iter().map(|adj| root_at_centroid(adj)).collect()
}

/// Centroid(s) of a tree given by adjacency lists.
fn centroids(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut best = usize::MAX;
    let mut out = Vec::new();
    for root in 0..n {
        // max component size after removing `root`
        let mut worst = 0;
        let mut seen = vec![false; n];
        seen[root] = true;
        for &start in &adj[root] {
            if seen[start] {
                continue;
            }
            let mut size = 0;
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        queue.push_back(u);
                    }
                }
            }
            worst = worst.max(size);
        }
        if worst < best {
            best = worst;
            out = vec![root];
        } else if worst == best {
            out.push(root);
        }
    }
    out
}

/// AHU encoding of the tree rooted at `root`.
fn ahu(adj: &[Vec<usize>], root: usize, parent: usize) -> String {
    let mut parts: Vec<String> = adj[root]
        .iter()
        .filter(|&&c| c != parent)
        .map(|&c| ahu(adj, c, root))
        .collect();
    parts.sort();
    format!("({})", parts.concat())
}

/// Isomorphism-invariant encoding: AHU at the centroid, or at the centroid
/// pair joined canonically.
fn canonical_form(adj: &[Vec<usize>]) -> String {
    let cs = centroids(adj);
    match cs.as_slice() {
        [c] => ahu(adj, *c, usize::MAX),
        [c1, c2] => {
            let a = ahu(adj, *c1, *c2);
            let b = ahu(adj, *c2, *c1);
            if a <= b {
                format!("{a}{b}")
            } else {
                format!("{b}{a}")
            }
        }
        _ => unreachable!("a tree has one or two centroids"),
    }
}

/// Re-root at the canonical centroid and renumber breadth-first.
fn root_at_centroid(adj: &[Vec<usize>]) -> Result<Tree> {
    let cs = centroids(adj);
    let root = match cs.as_slice() {
        [c] => *c,
        [c1, c2] => {
            if ahu(adj, *c1, *c2) <= ahu(adj, *c2, *c1) {
                *c1
            } else {
                *c2
            }
        }
        _ => unreachable!(),
    };
    let n = adj.len();
    let mut old_to_new = vec![usize::MAX; n];
    let mut parent_new: Vec<Option<usize>> = vec![None; n];
    let mut queue = VecDeque::from([(root, usize::MAX)]);
    let mut next_id = 0;
    while let Some((v, par)) = queue.pop_front() {
        old_to_new[v] = next_id;
        if par != usize::MAX {
            parent_new[next_id] = Some(old_to_new[par]);
        }
        next_id += 1;
        let mut kids: Vec<usize> = adj[v].iter().copied().filter(|&u| u != par).collect();
        kids.sort_unstable();
        for k in kids {
            queue.push_back((k, v));
        }
    }
    Tree::explicit(parent_new)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerBoundSource {
    EdgeCut,
    VertexCut,
    Clique,
    ExactSearch,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimalityCertificate {
    pub m: usize,
    pub h: usize,
    pub lower_bound_source: LowerBoundSource,
    pub lower: u64,
    pub constructive: u64,
    pub optimal: bool,
    pub exact: Option<u64>,
}

impl OptimalityCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": self.m,
            "h": self.h,
            "lower": self.lower,
            "source": self.lower_bound_source,
            "constructive": self.constructive,
            "optimal": self.optimal,
            "exact": self.exact,
        })
    }
}

/// Size cap below which `certify` additionally runs the exact search.
pub const EXACT_SEARCH_CAP: usize = 100;

/// Certify optimality of the constructive coloring of T_{m,h}: the best
/// cut lower bound (plus an exact search on small instances) must meet the
/// constructive color count.
pub fn certify(m: usize, h: usize, budget_ms: u64) -> Result<OptimalityCertificate> {
    let instance = color_mary(m, h)?;
    let constructive = instance.assignment.num_colors as u64;
    debug_assert_eq!(constructive, closed_form_w(m, h)?);

    let edge = edge_cut_bound_tree(&instance.tree)?;
    let (mut lower, mut source) = (edge.bound, LowerBoundSource::EdgeCut);
    if instance.tree.n() > 2 {
        let vertex = best_vertex_cut_bound(&instance.tree, 1)?;
        if vertex.bound > lower {
            lower = vertex.bound;
            source = LowerBoundSource::VertexCut;
        }
    }

    let mut exact = None;
    if lower < constructive && instance.routing.len() <= EXACT_SEARCH_CAP {
        let cg = conflict_graph(&instance.routing);
        let load = max_edge_load(&instance.routing, &instance.tree)? as usize;
        let result = exact_chromatic(&cg, load, instance.assignment.num_colors, budget_ms)?;
        if let Some(chi) = result.exact {
            exact = Some(chi as u64);
            if chi as u64 > lower {
                lower = chi as u64;
                source = LowerBoundSource::ExactSearch;
            }
        }
    }

    Ok(OptimalityCertificate {
        m,
        h,
        lower_bound_source: source,
        lower,
        constructive,
        optimal: lower == constructive,
        exact,
    })
}

/// Exact chromatic number of the conflict graph of a tree instance, seeded
/// with the max-load clique bound.
pub fn exact_chromatic_of_tree(tree: &Tree, budget_ms: u64) -> Result<ChromaticResult> {
    let routing = all_pairs_routing(tree)?;
    let cg = conflict_graph(&routing);
    let load = max_edge_load(&routing, tree)? as usize;
    let result = exact_chromatic(&cg, load, 0, budget_ms)?;
    if let Some(witness) = &result.witness {
        let report = verify_assignment(&routing, witness)?;
        if !report.proper {
            return Err(Error::VerificationFailed(
                "search witness is not a proper coloring".into(),
            ));
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_complete_mary_tree;

    fn cg_of(m: usize, h: usize) -> ConflictGraph {
        let tree = build_complete_mary_tree(m, h).unwrap();
        let routing = all_pairs_routing(&tree).unwrap();
        conflict_graph(&routing)
    }

    #[test]
    fn clique_examples() {
        let r = max_clique(&cg_of(2, 2), 5000);
        assert!(r.exact);
        assert_eq!(r.size, 12);

        let empty = ConflictGraph::new(3);
        let r = max_clique(&empty, 1000);
        assert_eq!(r.size, 1);
        assert!(r.exact);
    }

    #[test]
    fn clique_on_spider() {
        let tree = crate::graph::build_spider(3, 4, crate::graph::SpiderShape::Path).unwrap();
        let routing = all_pairs_routing(&tree).unwrap();
        let cg = conflict_graph(&routing);
        // all 48 root-crossing paths pairwise share a root edge (claw clique)
        let r = max_clique(&cg, 30_000);
        assert!(r.exact);
        assert_eq!(r.size, 48);
    }

    #[test]
    fn exact_chromatic_small() {
        for (m, h, chi) in [(2usize, 1usize, 2usize), (3, 1, 3), (1, 5, 9), (2, 2, 12)] {
            let tree = build_complete_mary_tree(m, h).unwrap();
            let result = exact_chromatic_of_tree(&tree, 60_000).unwrap();
            assert_eq!(result.exact, Some(chi), "T_{{{m},{h}}}");
        }
    }

    #[test]
    fn chromatic_hint_validation() {
        let cg = cg_of(2, 1);
        assert!(exact_chromatic(&cg, 5, 3, 1000).is_err());
    }

    #[test]
    fn tree_counts() {
        let known = [1usize, 1, 2, 3, 6, 11, 23]; // n = 2..8
        for (i, &count) in known.iter().enumerate() {
            let trees = enumerate_small_trees(i + 2).unwrap();
            assert_eq!(trees.len(), count, "n = {}", i + 2);
        }
        assert!(enumerate_small_trees(1).is_err());
        assert!(enumerate_small_trees(11).is_err());
    }

    #[test]
    fn certify_examples() {
        let cert = certify(3, 2, 5000).unwrap();
        assert!(cert.optimal);
        assert_eq!(cert.lower, 48);
        assert!(matches!(cert.lower_bound_source, LowerBoundSource::VertexCut));

        let cert = certify(2, 3, 5000).unwrap();
        assert!(cert.optimal);
        assert_eq!(cert.lower, 57);

        let cert = certify(4, 2, 5000).unwrap();
        assert!(cert.optimal);
        assert_eq!(cert.lower, 80);
        assert!(matches!(cert.lower_bound_source, LowerBoundSource::EdgeCut));
    }
}
