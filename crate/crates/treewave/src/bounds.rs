//! Cut-based lower bounds, the edge-forwarding index of trees, and the
//! closed-form optical indices with their exact w/pi ratios.

use num_rational::Ratio;
use serde::Serialize;

use crate::graph::{geometric_sum, EdgeId, Tree, Vertex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    EdgeCut,
    VertexCut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum CutWitness {
    Edge(EdgeId),
    Vertices(Vec<Vertex>),
}

/// A cut together with the lower bound it certifies.
///
/// For an edge cut the bound is ceil(|S||S̄| / |C|).  For a vertex cut it is
/// ceil(sum over unordered component pairs of |H_i||H_j| / floor(|[S,S̄]|/2)).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutCertificate {
    pub kind: CutKind,
    pub witness: CutWitness,
    pub crossing: usize,
    pub bound: u64,
    pub component_sizes: Vec<usize>,
}

impl CutCertificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "witness": self.witness,
            "crossing": self.crossing,
            "bound": self.bound,
            "components": self.component_sizes,
        })
    }
}

/// Single-edge cut maximizing a(n-a); ties broken by lowest edge id.
pub fn edge_cut_bound_tree(tree: &Tree) -> Result<CutCertificate> {
    if tree.n() < 2 {
        return Err(Error::InvalidParameter("tree has no edges".into()));
    }
    let n = tree.n() as u64;
    let sizes = tree.subtree_sizes();
    let mut best_edge = 1;
    let mut best = 0u64;
    for (e, &size) in sizes.iter().enumerate().skip(1) {
        let a = size as u64;
        let value = a * (n - a);
        if value > best {
            best = value;
            best_edge = e;
        }
    }
    Ok(CutCertificate {
        kind: CutKind::EdgeCut,
        witness: CutWitness::Edge(best_edge),
        crossing: 1,
        bound: best,
        component_sizes: vec![sizes[best_edge], tree.n() - sizes[best_edge]],
    })
}

/// Edge-cut bound for the cut [S, S̄] induced by an explicit vertex set S.
pub fn edge_cut_bound_at(tree: &Tree, s: &[Vertex]) -> Result<CutCertificate> {
    let n = tree.n();
    let mut in_s = vec![false; n];
    for &v in s {
        if v >= n {
            return Err(Error::InvalidParameter("vertex out of range".into()));
        }
        in_s[v] = true;
    }
    let size_s = in_s.iter().filter(|&&b| b).count();
    if size_s == 0 || size_s == n {
        return Err(Error::InvalidParameter(
            "S must be a nonempty proper subset".into(),
        ));
    }
    let crossing = (1..n)
        .filter(|&v| in_s[v] != in_s[tree.parent(v).unwrap()])
        .count();
    let bound = ((size_s * (n - size_s)) as u64).div_ceil(crossing as u64);
    let mut witness: Vec<Vertex> = (0..n).filter(|&v| in_s[v]).collect();
    witness.sort_unstable();
    Ok(CutCertificate {
        kind: CutKind::EdgeCut,
        witness: CutWitness::Vertices(witness),
        crossing,
        bound,
        component_sizes: vec![size_s, n - size_s],
    })
}

/// Component sizes of tree - S, in a deterministic order.
fn components_without(tree: &Tree, in_s: &[bool]) -> Vec<usize> {
    let n = tree.n();
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for v in 0..n {
        if in_s[v] {
            continue;
        }
        // vertices are BFS-numbered, so the parent is already classified
        match tree.parent(v) {
            Some(p) if !in_s[p] => {
                comp[v] = comp[p];
                sizes[comp[v]] += 1;
            }
            _ => {
                comp[v] = sizes.len();
                sizes.push(1);
            }
        }
    }
    sizes
}

pub fn vertex_cut_bound_at(tree: &Tree, s: &[Vertex]) -> Result<CutCertificate> {
    let n = tree.n();
    let mut in_s = vec![false; n];
    for &v in s {
        if v >= n {
            return Err(Error::InvalidParameter("vertex out of range".into()));
        }
        in_s[v] = true;
    }
    let sizes = components_without(tree, &in_s);
    if sizes.len() < 2 {
        return Err(Error::InvalidParameter(
            "S is not a vertex cut of the tree".into(),
        ));
    }
    let crossing = (1..n)
        .filter(|&v| in_s[v] != in_s[tree.parent(v).unwrap()])
        .count();
    let half = (crossing / 2) as u64;
    debug_assert!(half >= 1, "a genuine tree cut has crossing >= 2");
    let mut pair_sum = 0u64;
    for (i, &a) in sizes.iter().enumerate() {
        for &b in &sizes[i + 1..] {
            pair_sum += (a * b) as u64;
        }
    }
    let mut witness: Vec<Vertex> = s.to_vec();
    witness.sort_unstable();
    Ok(CutCertificate {
        kind: CutKind::VertexCut,
        witness: CutWitness::Vertices(witness),
        crossing,
        bound: pair_sum.div_ceil(half),
        component_sizes: sizes,
    })
}

/// Best vertex-cut bound over all cut sets of size at most `max_cut_size`.
/// Ties are broken by the lexicographically smallest witness.
pub fn best_vertex_cut_bound(tree: &Tree, max_cut_size: usize) -> Result<CutCertificate> {
    if max_cut_size == 0 {
        return Err(Error::InvalidParameter("max_cut_size must be >= 1".into()));
    }
    let n = tree.n();
    let mut best: Option<CutCertificate> = None;
    let mut subset: Vec<Vertex> = Vec::new();
    fn recurse(
        tree: &Tree,
        start: Vertex,
        cap: usize,
        subset: &mut Vec<Vertex>,
        best: &mut Option<CutCertificate>,
    ) {
        if !subset.is_empty() {
            if let Ok(cert) = vertex_cut_bound_at(tree, subset) {
                let better = match best {
                    None => true,
                    Some(b) => cert.bound > b.bound,
                };
                if better {
                    *best = Some(cert);
                }
            }
        }
        if subset.len() == cap {
            return;
        }
        for v in start..tree.n() {
            subset.push(v);
            recurse(tree, v + 1, cap, subset, best);
            subset.pop();
        }
    }
    recurse(tree, 0, max_cut_size.min(n), &mut subset, &mut best);
    best.ok_or_else(|| Error::InvalidParameter("tree has no vertex cut of that size".into()))
}

/// Edge-forwarding index of a tree: the unique routing makes it the maximum
/// of a(n-a) over edges.
pub fn forwarding_index_tree(tree: &Tree) -> Result<u64> {
    Ok(edge_cut_bound_tree(tree)?.bound)
}

/// The optical index w(T_{m,h}) in closed form.
pub fn closed_form_w(m: usize, h: usize) -> Result<u64> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    if h == 0 {
        return Ok(0); // empty routing
    }
    let t = geometric_sum(m, h) as u64; // 1 + m + ... + m^(h-1)
    Ok(match m {
        1 => {
            // floor((h+1)/2) * ceil((h+1)/2)
            (h as u64).div_ceil(2) * (h as u64 / 2 + 1)
        }
        2 => match h {
            1 => 2,
            2 => 12,
            _ => 5 * (1u64 << (2 * h - 2)) - 3 * (1u64 << h) + 1,
        },
        m if m % 2 == 1 => m as u64 * t * t,
        m => (m as u64).pow(h as u32) * t,
    })
}

/// pi(G^T_{k,t}) = (k-1)t^2 + t for k >= 2.
pub fn closed_form_pi_spider(k: usize, t: usize) -> Result<u64> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "spider forwarding index closed form requires k >= 2".into(),
        ));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let (k, t) = (k as u64, t as u64);
    Ok((k - 1) * t * t + t)
}

pub type Rational = Ratio<i128>;

/// w(G^T_{k,t}) / pi(G^T_{k,t}) = kt / ((k-1)t + 1), exact and reduced.
/// Only defined for odd k >= 3: no closed form for w is known for even k.
pub fn ratio_w_over_pi_spider(k: usize, t: usize) -> Result<Rational> {
    if k.is_multiple_of(2) || k < 3 {
        return Err(Error::InvalidParameter(
            "ratio is only known for odd k >= 3".into(),
        ));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let (k, t) = (k as i128, t as i128);
    Ok(Rational::new(k * t, (k - 1) * t + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeasibleFamily {
    /// delta = w(T_{2,h}) / pi(T_{2,h})
    Binary { h: usize },
    /// delta = w(G^T_{k,t}) / pi(G^T_{k,t}), odd k >= 3
    Spider { k: usize, t: usize },
}

/// A feasible ratio delta = w(G)/pi(G) together with its witnessing family.
pub fn feasible_delta_family(family: FeasibleFamily) -> Result<(Rational, FeasibleFamily)> {
    let delta = match family {
        FeasibleFamily::Binary { h } => {
            if h == 0 {
                return Err(Error::InvalidParameter("h must be at least 1".into()));
            }
            let w = closed_form_w(2, h)? as i128;
            let pi = closed_form_pi_spider(2, (1usize << h) - 1)? as i128;
            Rational::new(w, pi)
        }
        FeasibleFamily::Spider { k, t } => ratio_w_over_pi_spider(k, t)?,
    };
    Ok((delta, family))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_complete_mary_tree, build_spider, SpiderShape};

    #[test]
    fn edge_cut_examples() {
        let t = build_complete_mary_tree(2, 3).unwrap();
        let cert = edge_cut_bound_tree(&t).unwrap();
        assert_eq!(cert.bound, 56);
        assert_eq!(cert.witness, CutWitness::Edge(1));

        let s = build_spider(3, 4, SpiderShape::Path).unwrap();
        assert_eq!(edge_cut_bound_tree(&s).unwrap().bound, 36);

        let two = build_complete_mary_tree(1, 1).unwrap();
        assert_eq!(edge_cut_bound_tree(&two).unwrap().bound, 1);
    }

    #[test]
    fn edge_cut_at_subsets() {
        let t = build_complete_mary_tree(2, 2).unwrap();
        // subtree below e_1: {r_1, r_{1,1}, r_{1,2}} = {1, 3, 4}
        let cert = edge_cut_bound_at(&t, &[1, 3, 4]).unwrap();
        assert_eq!(cert.bound, 12);
        assert_eq!(cert.crossing, 1);

        let t = build_complete_mary_tree(2, 1).unwrap();
        assert_eq!(edge_cut_bound_at(&t, &[1]).unwrap().bound, 2);

        let t = build_complete_mary_tree(3, 1).unwrap();
        let cert = edge_cut_bound_at(&t, &[0]).unwrap();
        assert_eq!(cert.bound, 1);
        assert_eq!(cert.crossing, 3);

        assert!(edge_cut_bound_at(&t, &[]).is_err());
        assert!(edge_cut_bound_at(&t, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn vertex_cut_examples() {
        // T_{2,3}, S = {r_1}: components of sizes 3, 3, 8 -> 57
        let t = build_complete_mary_tree(2, 3).unwrap();
        let cert = vertex_cut_bound_at(&t, &[1]).unwrap();
        assert_eq!(cert.bound, 57);
        let mut sizes = cert.component_sizes.clone();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 8]);

        let s = build_spider(3, 4, SpiderShape::Path).unwrap();
        assert_eq!(vertex_cut_bound_at(&s, &[0]).unwrap().bound, 48);

        let p = build_complete_mary_tree(1, 2).unwrap();
        assert_eq!(vertex_cut_bound_at(&p, &[1]).unwrap().bound, 1);

        // a leaf is not a cut
        assert!(vertex_cut_bound_at(&p, &[2]).is_err());
    }

    #[test]
    fn best_vertex_cut_examples() {
        let t = build_complete_mary_tree(2, 3).unwrap();
        let cert = best_vertex_cut_bound(&t, 1).unwrap();
        assert_eq!(cert.bound, 57);
        assert_eq!(cert.witness, CutWitness::Vertices(vec![1]));

        let t = build_complete_mary_tree(3, 2).unwrap();
        let cert = best_vertex_cut_bound(&t, 1).unwrap();
        assert_eq!(cert.bound, 48);
        assert_eq!(cert.witness, CutWitness::Vertices(vec![0]));

        let t = build_complete_mary_tree(1, 3).unwrap();
        let cert = best_vertex_cut_bound(&t, 1).unwrap();
        assert_eq!(cert.bound, 2);

        let two = build_complete_mary_tree(1, 1).unwrap();
        assert!(best_vertex_cut_bound(&two, 1).is_err());
    }

    #[test]
    fn forwarding_index_examples() {
        let s = build_spider(3, 4, SpiderShape::Path).unwrap();
        assert_eq!(forwarding_index_tree(&s).unwrap(), 36);
        let t = build_complete_mary_tree(2, 2).unwrap();
        assert_eq!(forwarding_index_tree(&t).unwrap(), 12);
        let star = build_complete_mary_tree(4, 1).unwrap();
        assert_eq!(forwarding_index_tree(&star).unwrap(), 4);
    }

    #[test]
    fn closed_form_w_examples() {
        assert_eq!(closed_form_w(2, 3).unwrap(), 57);
        assert_eq!(closed_form_w(3, 2).unwrap(), 48);
        assert_eq!(closed_form_w(4, 2).unwrap(), 80);
        assert_eq!(closed_form_w(1, 5).unwrap(), 9);
        assert_eq!(closed_form_w(2, 1).unwrap(), 2);
        assert_eq!(closed_form_w(2, 2).unwrap(), 12);
        assert_eq!(closed_form_w(2, 4).unwrap(), 273);
        assert_eq!(closed_form_w(2, 5).unwrap(), 1185);
        assert_eq!(closed_form_w(3, 3).unwrap(), 507);
        assert_eq!(closed_form_w(4, 3).unwrap(), 1344);
        assert_eq!(closed_form_w(5, 1).unwrap(), 5);
        assert_eq!(closed_form_w(6, 2).unwrap(), 252);
        assert_eq!(closed_form_w(3, 0).unwrap(), 0);
        assert!(closed_form_w(0, 1).is_err());
    }

    #[test]
    fn pi_spider_examples() {
        assert_eq!(closed_form_pi_spider(3, 4).unwrap(), 36);
        for h in 1..=6u32 {
            let t = (1usize << h) - 1;
            assert_eq!(
                closed_form_pi_spider(2, t).unwrap(),
                (1u64 << (2 * h)) - (1u64 << h)
            );
        }
        assert_eq!(closed_form_pi_spider(2, 1).unwrap(), 2);
        assert!(closed_form_pi_spider(1, 3).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert_eq!(ratio_w_over_pi_spider(3, 4).unwrap(), Rational::new(4, 3));
        assert_eq!(ratio_w_over_pi_spider(3, 1).unwrap(), Rational::from_integer(1));
        let r = ratio_w_over_pi_spider(5, 1000).unwrap();
        assert_eq!(r, Rational::new(5000, 4001));
        let target = Rational::new(5, 4);
        let diff = target - r;
        assert!(diff > Rational::from_integer(0));
        assert!(diff < Rational::new(1, 1000));
        assert!(ratio_w_over_pi_spider(4, 2).is_err());
    }

    #[test]
    fn feasible_deltas() {
        let (d, _) = feasible_delta_family(FeasibleFamily::Binary { h: 3 }).unwrap();
        assert_eq!(d, Rational::new(57, 56));
        let (d, _) = feasible_delta_family(FeasibleFamily::Spider { k: 3, t: 4 }).unwrap();
        assert_eq!(d, Rational::new(4, 3));
        let (d, _) = feasible_delta_family(FeasibleFamily::Spider { k: 5, t: 1 }).unwrap();
        assert_eq!(d, Rational::from_integer(1));
    }

    #[test]
    fn tightness_and_sandwich_on_grid() {
        for m in 1..=6 {
            for h in 1..=3 {
                let t = build_complete_mary_tree(m, h).unwrap();
                let pi = forwarding_index_tree(&t).unwrap();
                let edge = edge_cut_bound_tree(&t).unwrap().bound;
                assert_eq!(pi, edge);
                let w = closed_form_w(m, h).unwrap();
                assert!(edge <= w);
                if t.n() > 2 {
                    let vc = best_vertex_cut_bound(&t, 1).unwrap().bound;
                    assert!(vc <= w, "m={m} h={h}: vertex cut {vc} > w {w}");
                }
            }
        }
    }
}
