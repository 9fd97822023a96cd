//! Wavelength assignments achieving the closed-form optical indices.
//!
//! Four constructions cover the tree families: interval coloring for unary
//! trees, the recursive canonical coloring for binary trees, the
//! total-coloring based scheme for odd spiders, and the double-tree
//! recursion for even arity.  Every construction re-validates its output
//! before returning.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::designs::{one_factorization, total_coloring_odd};
use crate::graph::{
    all_pairs_routing, build_complete_mary_tree, build_double_tree, conflict_graph,
    ConflictGraph, Family, Routing, Tree, Vertex,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Interval,
    BinaryCanonical,
    OddTotal,
    EvenRecursive,
    DoubleTree,
    Greedy,
    TableBase,
}

/// Mapping path index -> color, with colors contiguous from 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavelengthAssignment {
    pub colors: Vec<usize>,
    pub num_colors: usize,
    pub method: Method,
}

impl WavelengthAssignment {
    pub fn to_json(&self, routing: &Routing, family: &Family) -> serde_json::Value {
        let paths: Vec<serde_json::Value> = routing
            .iter()
            .map(|(idx, p)| serde_json::json!({"u": p.u, "v": p.v, "color": self.colors[idx]}))
            .collect();
        serde_json::json!({
            "family": family,
            "num_colors": self.num_colors,
            "method": self.method,
            "paths": paths,
        })
    }

    /// CSV projection: one `u,v,color` row per path.
    pub fn to_csv(&self, routing: &Routing) -> String {
        let mut out = String::from("u,v,color\n");
        for (idx, p) in routing.iter() {
            out.push_str(&format!("{},{},{}\n", p.u, p.v, self.colors[idx]));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub proper: bool,
    pub violations: Vec<(usize, usize)>,
    pub num_colors: usize,
}

/// Exhaustive properness check by per-edge buckets: two paths sharing an
/// edge must not share a color.
pub fn verify_assignment(routing: &Routing, wa: &WavelengthAssignment) -> Result<VerifyReport> {
    if wa.colors.len() != routing.len() {
        return Err(Error::InvalidParameter(format!(
            "assignment covers {} paths, routing has {}",
            wa.colors.len(),
            routing.len()
        )));
    }
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); routing.n()];
    for (idx, path) in routing.iter() {
        for &e in &path.edges {
            buckets[e].push(idx);
        }
    }
    let mut violations = BTreeSet::new();
    let mut by_color: HashMap<usize, Vec<usize>> = HashMap::new();
    for bucket in &buckets {
        by_color.clear();
        for &i in bucket {
            by_color.entry(wa.colors[i]).or_default().push(i);
        }
        for clash in by_color.values().filter(|c| c.len() > 1) {
            for (a, &i) in clash.iter().enumerate() {
                for &j in &clash[a + 1..] {
                    violations.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    let distinct: BTreeSet<usize> = wa.colors.iter().copied().collect();
    Ok(VerifyReport {
        proper: violations.is_empty(),
        violations: violations.into_iter().collect(),
        num_colors: distinct.len(),
    })
}

fn finish(
    routing: &Routing,
    colors: Vec<Option<usize>>,
    expected_colors: u64,
    method: Method,
) -> Result<WavelengthAssignment> {
    let mut resolved = Vec::with_capacity(colors.len());
    for (idx, c) in colors.into_iter().enumerate() {
        match c {
            Some(c) => resolved.push(c),
            None => {
                let p = routing.path(idx);
                return Err(Error::VerificationFailed(format!(
                    "path ({}, {}) was never colored",
                    p.u, p.v
                )));
            }
        }
    }
    let wa = WavelengthAssignment {
        num_colors: resolved.iter().copied().max().map_or(0, |c| c + 1),
        colors: resolved,
        method,
    };
    let report = verify_assignment(routing, &wa)?;
    if !report.proper {
        return Err(Error::VerificationFailed(format!(
            "{} conflicting same-colored pairs",
            report.violations.len()
        )));
    }
    if report.num_colors as u64 != expected_colors || wa.num_colors as u64 != expected_colors {
        return Err(Error::VerificationFailed(format!(
            "used {} colors, expected {}",
            report.num_colors, expected_colors
        )));
    }
    Ok(wa)
}

/// Interval coloring for T_{1,h}: first-fit in left-endpoint order meets
/// the clique number of the interval conflict graph.
pub fn color_path_tree(tree: &Tree, routing: &Routing) -> Result<WavelengthAssignment> {
    let h = match tree.family() {
        Family::Mary { m: 1, h } => h,
        _ => return Err(Error::InvalidParameter("tree is not T_{1,h}".into())),
    };
    // a path (u,v) on the path graph is the interval [u, v)
    let mut color_end: Vec<usize> = Vec::new(); // rightmost end per color
    let mut colors = vec![None; routing.len()];
    for (idx, p) in routing.iter() {
        let slot = color_end
            .iter()
            .position(|&end| end <= p.u)
            .unwrap_or_else(|| {
                color_end.push(0);
                color_end.len() - 1
            });
        color_end[slot] = p.v;
        colors[idx] = Some(slot);
    }
    let expected = (h as u64).div_ceil(2) * (h as u64 / 2 + 1);
    finish(routing, colors, expected, Method::Interval)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyOrder {
    Canonical,
    DegreeDesc,
}

/// First-fit proper coloring of an explicit conflict graph.
pub fn greedy_coloring(cg: &ConflictGraph, order: GreedyOrder) -> WavelengthAssignment {
    let n = cg.order();
    let mut perm: Vec<usize> = (0..n).collect();
    if let GreedyOrder::DegreeDesc = order {
        perm.sort_by_key(|&v| (std::cmp::Reverse(cg.degree(v)), v));
    }
    let mut colors = vec![usize::MAX; n];
    let mut num_colors = 0;
    for &v in &perm {
        let mut used = vec![false; num_colors + 1];
        for u in cg.neighbors(v) {
            if colors[u] != usize::MAX {
                used[colors[u]] = true;
            }
        }
        let c = used.iter().position(|&b| !b).unwrap();
        colors[v] = c;
        num_colors = num_colors.max(c + 1);
    }
    WavelengthAssignment { colors, num_colors, method: Method::Greedy }
}

/// Odd-degree spider coloring via a total coloring of K_k: within-component
/// families draw from the vertex-color block, cross-component families from
/// the edge-color block.  Yields kt^2 colors.
pub fn color_odd_spider(tree: &Tree, routing: &Routing) -> Result<WavelengthAssignment> {
    let comps = tree.children(0);
    let k = comps.len();
    if k.is_multiple_of(2) || k < 3 {
        return Err(Error::InvalidParameter(
            "odd spider coloring requires an odd root degree >= 3".into(),
        ));
    }
    let sizes = tree.subtree_sizes();
    let t = sizes[comps[0]];
    if comps.iter().any(|&c| sizes[c] != t) {
        return Err(Error::InvalidParameter(
            "all root components must have the same size".into(),
        ));
    }
    // component index of every non-root vertex
    let mut comp_of = vec![usize::MAX; tree.n()];
    for (i, &c) in comps.iter().enumerate() {
        for v in tree.subtree(c) {
            comp_of[v] = i;
        }
    }
    let f = total_coloring_odd(k)?;
    let t2 = t * t;
    let block = |color: usize| color * t2;
    // one positional counter per family; families sharing a block hold
    // pairwise edge-disjoint paths
    let mut within_counter = vec![0usize; k];
    let mut cross_counter = vec![0usize; k * k];
    let mut colors = vec![None; routing.len()];
    for (idx, p) in routing.iter() {
        let color = if p.u == 0 {
            let i = comp_of[p.v];
            let c = block(f.vertex(i)) + within_counter[i];
            within_counter[i] += 1;
            c
        } else {
            let (i, j) = (comp_of[p.u], comp_of[p.v]);
            if i == j {
                let c = block(f.vertex(i)) + within_counter[i];
                within_counter[i] += 1;
                c
            } else {
                let slot = i.min(j) * k + i.max(j);
                let c = block(f.edge(i, j)) + cross_counter[slot];
                cross_counter[slot] += 1;
                c
            }
        };
        colors[idx] = Some(color);
    }
    debug_assert!(within_counter.iter().all(|&c| c == t * (t + 1) / 2));
    finish(routing, colors, (k * t2) as u64, Method::OddTotal)
}

/// Group of same-side paths of a double tree that can share one block cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum SideGroup {
    Pair(usize, usize), // 0-based top-level subtree indices, i < j
    Internal(usize),
}

impl SideGroup {
    fn excludes(&self, idx: usize) -> bool {
        match *self {
            SideGroup::Pair(a, b) => idx == a || idx == b,
            SideGroup::Internal(a) => idx == a,
        }
    }
}

/// Assign each group a distinct cell index in 0..m whose coordinate avoids
/// the group's support.  Greedy by most-available coordinate first, with an
/// exhaustive matching fallback.
fn assign_cells(groups: &[SideGroup], m: usize, used: &mut [Vec<bool>]) -> Option<Vec<(usize, usize)>> {
    let mut result = Vec::with_capacity(groups.len());
    for g in groups {
        let mut best: Option<(usize, usize)> = None; // (row, free columns)
        for (row, row_used) in used.iter().enumerate().take(m) {
            if g.excludes(row) {
                continue;
            }
            let free = row_used.iter().filter(|&&u| !u).count();
            if free > 0 && best.is_none_or(|(_, bf)| free > bf) {
                best = Some((row, free));
            }
        }
        let (row, _) = best?;
        let col = used[row].iter().position(|&u| !u)?;
        used[row][col] = true;
        result.push((row, col));
    }
    Some(result)
}

/// Augmenting-path matching of groups to admissible cells; used if the
/// greedy pass fails.
fn match_cells(groups: &[SideGroup], m: usize) -> Option<Vec<(usize, usize)>> {
    let cells = m * m;
    let mut owner = vec![usize::MAX; cells];
    fn augment(
        g: usize,
        groups: &[SideGroup],
        m: usize,
        owner: &mut [usize],
        visited: &mut [bool],
    ) -> bool {
        for cell in 0..m * m {
            let row = cell / m;
            if groups[g].excludes(row) || visited[cell] {
                continue;
            }
            visited[cell] = true;
            if owner[cell] == usize::MAX
                || augment(owner[cell], groups, m, owner, visited)
            {
                owner[cell] = g;
                return true;
            }
        }
        false
    }
    for g in 0..groups.len() {
        let mut visited = vec![false; cells];
        if !augment(g, groups, m, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut result = vec![(usize::MAX, usize::MAX); groups.len()];
    for (cell, &g) in owner.iter().enumerate() {
        if g != usize::MAX {
            result[g] = (cell / m, cell % m);
        }
    }
    Some(result)
}

/// Coloring of the double tree D_{m,h} with t_h^2 colors: m^2 blocks of
/// t_{h-1}^2 colors for the bridge-crossing paths (with same-side groups
/// reusing cells whose row or column avoids their support) plus 2 t_h - 1
/// fresh colors for the paths touching a root.
pub fn color_double_tree(tree: &Tree, routing: &Routing) -> Result<WavelengthAssignment> {
    let m = match tree.family() {
        Family::Double { m, .. } => m,
        _ => return Err(Error::InvalidParameter("tree is not D_{m,h}".into())),
    };
    if m % 2 == 1 || m < 4 {
        return Err(Error::InvalidParameter(
            "double-tree coloring requires even m >= 4".into(),
        ));
    }
    let th = tree.n() / 2; // vertices per side = 1 + m + ... + m^(h-1)
    let s = (th - 1) / m; // vertices per top-level subtree
    let s2 = s * s;

    // side and top-level subtree index of every vertex
    let mut b_side = vec![false; tree.n()];
    for v in tree.subtree(1) {
        b_side[v] = true;
    }
    let mut top = vec![usize::MAX; tree.n()];
    let a_tops: Vec<Vertex> = tree.children(0).iter().copied().filter(|&c| c != 1).collect();
    let b_tops: Vec<Vertex> = tree.children(1).to_vec();
    for (i, &root) in a_tops.iter().chain(b_tops.iter()).enumerate() {
        for v in tree.subtree(root) {
            top[v] = i % m;
        }
    }

    let cell_base = |i: usize, j: usize| (i * m + j) * s2;
    let mut colors = vec![None; routing.len()];

    if s > 0 {
        // collect same-side groups in deterministic order: pairs then internals
        let mut a_groups: Vec<SideGroup> = Vec::new();
        let mut b_groups: Vec<SideGroup> = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                a_groups.push(SideGroup::Pair(i, j));
                b_groups.push(SideGroup::Pair(i, j));
            }
        }
        if s > 1 {
            for i in 0..m {
                a_groups.push(SideGroup::Internal(i));
                b_groups.push(SideGroup::Internal(i));
            }
        }
        // A-side groups need a row avoiding their support, B-side groups a
        // column; the two allocations are independent, so an A-group and a
        // B-group may share a cell.
        let mut used_a = vec![vec![false; m]; m];
        let a_cells = assign_cells(&a_groups, m, &mut used_a)
            .or_else(|| match_cells(&a_groups, m))
            .ok_or_else(|| {
                Error::VerificationFailed("no admissible cell assignment for A-side groups".into())
            })?;
        let mut used_b = vec![vec![false; m]; m];
        let b_cells_t = assign_cells(&b_groups, m, &mut used_b)
            .or_else(|| match_cells(&b_groups, m))
            .ok_or_else(|| {
                Error::VerificationFailed("no admissible cell assignment for B-side groups".into())
            })?;
        // for B the constrained coordinate is the column
        let b_cells: Vec<(usize, usize)> = b_cells_t.into_iter().map(|(c, r)| (r, c)).collect();

        let group_index = |groups: &[SideGroup], g: SideGroup| {
            groups.iter().position(|&x| x == g).unwrap()
        };
        let mut cross_counter = vec![0usize; m * m];
        let mut a_counter = vec![0usize; a_groups.len()];
        let mut b_counter = vec![0usize; b_groups.len()];
        for (idx, p) in routing.iter() {
            if p.u <= 1 {
                continue; // handled with the bridge families below
            }
            let color = match (b_side[p.u], b_side[p.v]) {
                (false, true) | (true, false) => {
                    let (a_end, b_end) = if b_side[p.u] { (p.v, p.u) } else { (p.u, p.v) };
                    let (i, j) = (top[a_end], top[b_end]);
                    let c = cell_base(i, j) + cross_counter[i * m + j];
                    cross_counter[i * m + j] += 1;
                    c
                }
                (false, false) => {
                    let (i, j) = (top[p.u].min(top[p.v]), top[p.u].max(top[p.v]));
                    let g = if i == j { SideGroup::Internal(i) } else { SideGroup::Pair(i, j) };
                    let gi = group_index(&a_groups, g);
                    let (row, col) = a_cells[gi];
                    let c = cell_base(row, col) + a_counter[gi];
                    a_counter[gi] += 1;
                    c
                }
                (true, true) => {
                    let (i, j) = (top[p.u].min(top[p.v]), top[p.u].max(top[p.v]));
                    let g = if i == j { SideGroup::Internal(i) } else { SideGroup::Pair(i, j) };
                    let gi = group_index(&b_groups, g);
                    let (row, col) = b_cells[gi];
                    let c = cell_base(row, col) + b_counter[gi];
                    b_counter[gi] += 1;
                    c
                }
            };
            colors[idx] = Some(color);
        }
        for (gi, &cnt) in a_counter.iter().enumerate() {
            if cnt > s2 {
                return Err(Error::VerificationFailed(format!(
                    "A-side group {gi} exceeded its cell capacity"
                )));
            }
        }
        for &cnt in &b_counter {
            if cnt > s2 {
                return Err(Error::VerificationFailed(
                    "B-side group exceeded its cell capacity".into(),
                ));
            }
        }
    }

    // paths touching a root: P(a, a_w) pairs with P(a, b_w) by the position
    // of w in the per-side vertex order, symmetrically for b
    let fresh = m * m * s2;
    let a_verts: Vec<Vertex> = (2..tree.n()).filter(|&v| !b_side[v]).collect();
    let b_verts: Vec<Vertex> = (2..tree.n()).filter(|&v| b_side[v]).collect();
    for (p, (&aw, &bw)) in a_verts.iter().zip(b_verts.iter()).enumerate() {
        colors[routing.index_of(0, aw)] = Some(fresh + p);
        colors[routing.index_of(0, bw)] = Some(fresh + p);
        colors[routing.index_of(1, aw)] = Some(fresh + (th - 1) + p);
        colors[routing.index_of(1, bw)] = Some(fresh + (th - 1) + p);
    }
    colors[routing.index_of(0, 1)] = Some(fresh + 2 * (th - 1));

    finish(routing, colors, (th * th) as u64, Method::DoubleTree)
}

/// Coloring of T_{m,h} for even m >= 4: one block per 1-factorization
/// class, the first class carrying embedded double-tree colorings, plus
/// t_h shared colors for the root paths.
pub fn color_even_mary(tree: &Tree, routing: &Routing) -> Result<WavelengthAssignment> {
    let (m, h) = match tree.family() {
        Family::Mary { m, h } => (m, h),
        _ => return Err(Error::InvalidParameter("tree is not T_{m,h}".into())),
    };
    if m % 2 == 1 || m < 4 {
        return Err(Error::InvalidParameter(
            "even-arity coloring requires even m >= 4".into(),
        ));
    }
    let f = one_factorization(m)?;
    let th = (tree.n() - 1) / m; // vertices per top-level subtree
    let expected = (m as u64).pow(h as u32) * th as u64;
    let mut colors = vec![None; routing.len()];

    if h == 1 {
        // star case: spokes share one color, leaf pairs follow the
        // 1-factorization
        for (idx, p) in routing.iter() {
            colors[idx] = Some(if p.u == 0 {
                m - 1
            } else {
                f.edge(p.u - 1, p.v - 1)
            });
        }
        return finish(routing, colors, expected, Method::EvenRecursive);
    }

    let th2 = th * th;
    let block_base = |class: usize| class * th2;
    let root_base = (m - 1) * th2;

    // per-subtree vertex lists in breadth-first order
    let subs: Vec<Vec<Vertex>> = (1..=m).map(|r| tree.subtree(r)).collect();
    let mut top = vec![usize::MAX; tree.n()];
    let mut pos = vec![usize::MAX; tree.n()];
    for (i, sub) in subs.iter().enumerate() {
        for (p, &v) in sub.iter().enumerate() {
            top[v] = i;
            pos[v] = p;
        }
    }

    // class-0 pairs carry an embedded double-tree coloring
    let dtree = build_double_tree(m, h)?;
    let drouting = all_pairs_routing(&dtree)?;
    let dwa = color_double_tree(&dtree, &drouting)?;
    let mut d_b_side = vec![false; dtree.n()];
    for v in dtree.subtree(1) {
        d_b_side[v] = true;
    }
    let d_a: Vec<Vertex> = (0..dtree.n()).filter(|&v| !d_b_side[v]).collect();
    let d_b: Vec<Vertex> = (0..dtree.n()).filter(|&v| d_b_side[v]).collect();
    let mut d_pos = vec![usize::MAX; dtree.n()];
    for (p, &v) in d_a.iter().enumerate() {
        d_pos[v] = p;
    }
    for (p, &v) in d_b.iter().enumerate() {
        d_pos[v] = p;
    }

    for i in 0..m {
        for j in i + 1..m {
            if f.edge(i, j) != 0 {
                continue;
            }
            // D side A maps onto H_{i+1}, side B onto H_{j+1}
            let map = |dv: Vertex| {
                if d_b_side[dv] {
                    subs[j][d_pos[dv]]
                } else {
                    subs[i][d_pos[dv]]
                }
            };
            for (didx, dp) in drouting.iter() {
                let idx = routing.index_of(map(dp.u), map(dp.v));
                colors[idx] = Some(block_base(0) + dwa.colors[didx]);
            }
        }
    }

    // remaining cross-subtree classes get plain positional blocks, and the
    // root paths share one color per within-subtree position
    let mut cross_counter = vec![0usize; m * m];
    for (idx, p) in routing.iter() {
        if colors[idx].is_some() {
            continue;
        }
        if p.u == 0 {
            colors[idx] = Some(root_base + pos[p.v]);
            continue;
        }
        let (i, j) = (top[p.u].min(top[p.v]), top[p.u].max(top[p.v]));
        debug_assert_ne!(i, j, "same-subtree paths are covered by class 0");
        let class = f.edge(i, j);
        let c = block_base(class) + cross_counter[i * m + j];
        cross_counter[i * m + j] += 1;
        colors[idx] = Some(c);
    }

    finish(routing, colors, expected, Method::EvenRecursive)
}

/// Base 12-coloring for T_{2,2}, with the duplicate last row of the
/// published table replaced by the missing path {r_{1,2}, r_{2,2}} so that
/// all 21 paths are covered.
fn binary_base_h2() -> Vec<(Vertex, Vertex, usize)> {
    vec![
        (0, 1, 0),
        (0, 2, 0),
        (0, 3, 1),
        (0, 5, 1),
        (0, 4, 2),
        (0, 6, 2),
        (1, 2, 3),
        (3, 4, 3),
        (5, 6, 3),
        (1, 5, 4),
        (1, 4, 4),
        (2, 6, 4),
        (1, 6, 5),
        (1, 3, 5),
        (2, 5, 5),
        (2, 3, 6),
        (3, 5, 7),
        (3, 6, 8),
        (2, 4, 9),
        (4, 5, 10),
        (4, 6, 11),
    ]
}

/// Canonical coloring for T_{2,h}.  Base tables handle h <= 2; for h >= 3
/// the e_1-crossing paths are split into nine families, their color sets
/// are reused on edge-disjoint path groups (the four corner families absorb
/// the full colorings of the depth-2 subtrees), and the leftover
/// sibling-pair paths share fresh colors across the two sides.
pub fn color_binary_tree(tree: &Tree, routing: &Routing) -> Result<WavelengthAssignment> {
    let h = match tree.family() {
        Family::Mary { m: 2, h } => h,
        _ => return Err(Error::InvalidParameter("tree is not T_{2,h}".into())),
    };
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    let expected = crate::bounds::closed_form_w(2, h)?;
    let mut colors = vec![None; routing.len()];

    if h == 1 {
        colors[routing.index_of(0, 1)] = Some(0);
        colors[routing.index_of(0, 2)] = Some(0);
        colors[routing.index_of(1, 2)] = Some(1);
        return finish(routing, colors, expected, Method::TableBase);
    }
    if h == 2 {
        for (u, v, c) in binary_base_h2() {
            colors[routing.index_of(u, v)] = Some(c);
        }
        return finish(routing, colors, expected, Method::TableBase);
    }

    // regions: grandchild subtrees H_{1,1}..H_{2,2} rooted at ids 3..6
    let mut region = vec![usize::MAX; tree.n()]; // 0..3 for S11, S12, S21, S22
    for (r, root) in (3..=6).enumerate() {
        for v in tree.subtree(root) {
            region[v] = r;
        }
    }

    // Step 1: a fresh color for every path crossing e_1, grouped into the
    // nine families
    let mut family_colors: Vec<Vec<usize>> = vec![Vec::new(); 9];
    let mut next_color = 0usize;
    for (idx, p) in routing.iter() {
        if !p.contains_edge(1) {
            continue;
        }
        let class = match (p.u, p.v) {
            (0, 1) => 0,
            (1, 2) => 1,
            (0, v) => {
                debug_assert!(matches!(region[v], 0 | 1));
                2
            }
            (1, _) => 3,
            (2, _) => 4,
            (u, v) => match (region[u], region[v]) {
                (0, 2) | (2, 0) => 5,
                (0, 3) | (3, 0) => 6,
                (1, 2) | (2, 1) => 7,
                (1, 3) | (3, 1) => 8,
                _ => unreachable!("path ({u},{v}) crosses e_1 but fits no family"),
            },
        };
        family_colors[class].push(next_color);
        colors[idx] = Some(next_color);
        next_color += 1;
    }
    debug_assert_eq!(next_color as u64, (1u64 << (2 * h)) - (1u64 << h));

    // sibling-pair path lists, canonical order
    let pair_paths = |ra: usize, rb: usize| -> Vec<usize> {
        routing
            .iter()
            .filter(|(_, p)| {
                p.u >= 3
                    && p.v >= 3
                    && ((region[p.u], region[p.v]) == (ra, rb)
                        || (region[p.u], region[p.v]) == (rb, ra))
            })
            .map(|(idx, _)| idx)
            .collect()
    };
    let p1: Vec<usize> = pair_paths(0, 1); // H_{1,1} x H_{1,2}
    let p2: Vec<usize> = pair_paths(2, 3); // H_{2,1} x H_{2,2}
    let mut p1_used = 0usize;
    let mut p2_used = 0usize;

    // Step 2, families 1 and 2: {r, r_2} plus one sibling-pair path per side
    colors[routing.index_of(0, 2)] = Some(family_colors[0][0]);
    colors[p1[p1_used]] = Some(family_colors[0][0]);
    colors[p2[p2_used]] = Some(family_colors[0][0]);
    p1_used += 1;
    p2_used += 1;
    colors[p1[p1_used]] = Some(family_colors[1][0]);
    colors[p2[p2_used]] = Some(family_colors[1][0]);
    p1_used += 1;
    p2_used += 1;

    // family 3: root-to-right-side spokes reuse the root-to-left colors
    let right_spokes: Vec<usize> = routing
        .iter()
        .filter(|(_, p)| p.u == 0 && p.v >= 3 && matches!(region[p.v], 2 | 3))
        .map(|(idx, _)| idx)
        .collect();
    debug_assert_eq!(right_spokes.len(), family_colors[2].len());
    for (q, idx) in right_spokes.into_iter().enumerate() {
        colors[idx] = Some(family_colors[2][q]);
    }

    // families 4 and 5: the next sibling-pair paths on each side
    for &c in &family_colors[3] {
        colors[p1[p1_used]] = Some(c);
        p1_used += 1;
    }
    for &c in &family_colors[4] {
        colors[p2[p2_used]] = Some(c);
        p2_used += 1;
    }

    // families 6..9 absorb the full colorings of r_x + H_{x,y}: a recursive
    // coloring of the depth-2 subtree followed by the spoke paths from the
    // child root
    let sub_tree = build_complete_mary_tree(2, h - 2)?;
    let sub_routing = all_pairs_routing(&sub_tree)?;
    let sub_wa = color_binary_tree(&sub_tree, &sub_routing)?;
    // (family index, subtree root id, spoke origin)
    for (fam, sub_root, origin) in [(5, 4, 1), (6, 5, 2), (7, 6, 2), (8, 3, 1)] {
        let verts = tree.subtree(sub_root);
        let palette = &family_colors[fam];
        if sub_wa.num_colors + verts.len() > palette.len() {
            return Err(Error::VerificationFailed(
                "corner family too small for the recursive coloring".into(),
            ));
        }
        for (sidx, sp) in sub_routing.iter() {
            let idx = routing.index_of(verts[sp.u], verts[sp.v]);
            colors[idx] = Some(palette[sub_wa.colors[sidx]]);
        }
        for (q, &v) in verts.iter().enumerate() {
            let idx = routing.index_of(origin, v);
            colors[idx] = Some(palette[sub_wa.num_colors + q]);
        }
    }

    // Step 3: remaining sibling-pair paths, one fresh color shared across
    // the two sides
    let rest1: Vec<usize> = p1[p1_used..].to_vec();
    let rest2: Vec<usize> = p2[p2_used..].to_vec();
    debug_assert_eq!(rest1.len(), rest2.len());
    for (&i1, &i2) in rest1.iter().zip(rest2.iter()) {
        colors[i1] = Some(next_color);
        colors[i2] = Some(next_color);
        next_color += 1;
    }

    finish(routing, colors, expected, Method::BinaryCanonical)
}

/// A colored instance: the tree, its routing, and the assignment.
#[derive(Debug, Clone)]
pub struct ColoredInstance {
    pub tree: Tree,
    pub routing: Routing,
    pub assignment: WavelengthAssignment,
}

/// Dispatch an already-built tree to the matching construction.
pub fn color_tree(tree: &Tree, routing: &Routing) -> Result<WavelengthAssignment> {
    match tree.family() {
        Family::Mary { m, .. } => match m {
            1 => color_path_tree(tree, routing),
            2 => color_binary_tree(tree, routing),
            m if m % 2 == 1 => color_odd_spider(tree, routing),
            _ => color_even_mary(tree, routing),
        },
        Family::Spider { .. } => color_odd_spider(tree, routing),
        Family::Double { .. } => color_double_tree(tree, routing),
        Family::Explicit => Err(Error::InvalidParameter(
            "no construction for explicit trees; use the greedy method".into(),
        )),
    }
}

/// Dispatch over the four constructions; the color count always equals the
/// closed form.
pub fn color_mary(m: usize, h: usize) -> Result<ColoredInstance> {
    if m < 1 || h < 1 {
        return Err(Error::InvalidParameter("m and h must be at least 1".into()));
    }
    let tree = build_complete_mary_tree(m, h)?;
    let routing = all_pairs_routing(&tree)?;
    let assignment = match m {
        1 => color_path_tree(&tree, &routing)?,
        2 => color_binary_tree(&tree, &routing)?,
        m if m % 2 == 1 => color_odd_spider(&tree, &routing)?,
        _ => color_even_mary(&tree, &routing)?,
    };
    Ok(ColoredInstance { tree, routing, assignment })
}

/// Greedy upper bound for an arbitrary instance of a family tree.
pub fn greedy_mary(m: usize, h: usize, order: GreedyOrder) -> Result<ColoredInstance> {
    let tree = build_complete_mary_tree(m, h)?;
    let routing = all_pairs_routing(&tree)?;
    let cg = conflict_graph(&routing);
    let assignment = greedy_coloring(&cg, order);
    Ok(ColoredInstance { tree, routing, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::closed_form_w;
    use crate::graph::build_spider;
    use crate::graph::SpiderShape;

    fn mary_instance(m: usize, h: usize) -> (Tree, Routing) {
        let tree = build_complete_mary_tree(m, h).unwrap();
        let routing = all_pairs_routing(&tree).unwrap();
        (tree, routing)
    }

    #[test]
    fn interval_coloring_counts() {
        for (h, want) in [(1, 1), (3, 4), (6, 12)] {
            let (tree, routing) = mary_instance(1, h);
            let wa = color_path_tree(&tree, &routing).unwrap();
            assert_eq!(wa.num_colors, want, "h = {h}");
        }
    }

    #[test]
    fn binary_base_tables() {
        let (tree, routing) = mary_instance(2, 1);
        let wa = color_binary_tree(&tree, &routing).unwrap();
        assert_eq!(wa.num_colors, 2);

        let (tree, routing) = mary_instance(2, 2);
        let wa = color_binary_tree(&tree, &routing).unwrap();
        assert_eq!(wa.num_colors, 12);
        assert!(verify_assignment(&routing, &wa).unwrap().proper);
    }

    #[test]
    fn binary_canonical_recursion() {
        for (h, want) in [(3usize, 57usize), (4, 273), (5, 1185)] {
            let (tree, routing) = mary_instance(2, h);
            let wa = color_binary_tree(&tree, &routing).unwrap();
            assert_eq!(wa.num_colors, want, "h = {h}");
            assert!(verify_assignment(&routing, &wa).unwrap().proper);
        }
    }

    #[test]
    fn binary_step1_color_count() {
        // the e_1-crossing bundle of T_{2,3} needs 2^6 - 2^3 = 56 colors
        let (tree, routing) = mary_instance(2, 3);
        let crossing = routing
            .paths()
            .iter()
            .filter(|p| p.contains_edge(1))
            .count();
        assert_eq!(crossing, 56);
        let _ = tree;
    }

    #[test]
    fn odd_spider_counts() {
        let (tree, routing) = mary_instance(3, 2);
        let wa = color_odd_spider(&tree, &routing).unwrap();
        assert_eq!(wa.num_colors, 48);

        let (tree, routing) = mary_instance(3, 1);
        let wa = color_odd_spider(&tree, &routing).unwrap();
        assert_eq!(wa.num_colors, 3);

        let tree = build_spider(5, 2, SpiderShape::Path).unwrap();
        let routing = all_pairs_routing(&tree).unwrap();
        let wa = color_odd_spider(&tree, &routing).unwrap();
        assert_eq!(wa.num_colors, 20);

        let tree = build_spider(4, 2, SpiderShape::Path).unwrap();
        let routing = all_pairs_routing(&tree).unwrap();
        assert!(color_odd_spider(&tree, &routing).is_err());
    }

    #[test]
    fn double_tree_counts() {
        for (m, h, want) in [(4usize, 2usize, 25usize), (4, 1, 1), (6, 2, 49), (4, 3, 441)] {
            let tree = build_double_tree(m, h).unwrap();
            let routing = all_pairs_routing(&tree).unwrap();
            let wa = color_double_tree(&tree, &routing).unwrap();
            assert_eq!(wa.num_colors, want, "D_{{{m},{h}}}");
        }
        let tree = build_double_tree(2, 2).unwrap();
        let routing = all_pairs_routing(&tree).unwrap();
        assert!(color_double_tree(&tree, &routing).is_err());
    }

    #[test]
    fn even_mary_counts() {
        for (m, h, want) in [(4usize, 1usize, 4usize), (4, 2, 80), (6, 2, 252)] {
            let (tree, routing) = mary_instance(m, h);
            let wa = color_even_mary(&tree, &routing).unwrap();
            assert_eq!(wa.num_colors, want, "T_{{{m},{h}}}");
        }
    }

    #[test]
    fn dispatcher_matches_closed_form() {
        for (m, h) in [(1, 4), (2, 2), (3, 3), (4, 3)] {
            let inst = color_mary(m, h).unwrap();
            assert_eq!(
                inst.assignment.num_colors as u64,
                closed_form_w(m, h).unwrap()
            );
        }
        assert!(color_mary(1, 0).is_err());
    }

    #[test]
    fn verify_flags_bad_assignment() {
        let (_, routing) = mary_instance(2, 1);
        let wa = WavelengthAssignment {
            colors: vec![0; routing.len()],
            num_colors: 1,
            method: Method::Greedy,
        };
        let report = verify_assignment(&routing, &wa).unwrap();
        assert!(!report.proper);
        assert_eq!(report.violations.len(), 2);

        let short = WavelengthAssignment {
            colors: vec![0],
            num_colors: 1,
            method: Method::Greedy,
        };
        assert!(verify_assignment(&routing, &short).is_err());
    }

    #[test]
    fn greedy_on_interval_graph_is_optimal() {
        for h in [3usize, 6, 11] {
            let (tree, routing) = mary_instance(1, h);
            let cg = conflict_graph(&routing);
            let wa = greedy_coloring(&cg, GreedyOrder::Canonical);
            assert!(verify_assignment(&routing, &wa).unwrap().proper);
            assert_eq!(wa.num_colors as u64, closed_form_w(1, h).unwrap());
            let _ = tree;
        }
    }

    #[test]
    fn greedy_degree_desc_is_proper() {
        let (_, routing) = mary_instance(2, 2);
        let cg = conflict_graph(&routing);
        let wa = greedy_coloring(&cg, GreedyOrder::DegreeDesc);
        assert!(verify_assignment(&routing, &wa).unwrap().proper);
        assert!(wa.num_colors >= 12 && wa.num_colors <= 21);
    }

    #[test]
    fn assignments_are_deterministic() {
        let a = color_mary(4, 2).unwrap();
        let b = color_mary(4, 2).unwrap();
        assert_eq!(a.assignment, b.assignment);
        // contiguity from 0
        let max = *a.assignment.colors.iter().max().unwrap();
        assert_eq!(a.assignment.num_colors, max + 1);
        let used: std::collections::BTreeSet<usize> =
            a.assignment.colors.iter().copied().collect();
        assert_eq!(used.len(), a.assignment.num_colors);
    }
}
