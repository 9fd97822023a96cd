//! Combinatorial designs consumed by the colorings: total colorings of odd
//! complete graphs and 1-factorizations of even complete graphs.
//!
//! Colors are 0-based throughout; the JSON export notes the offset.

use crate::{Error, Result};

/// Total coloring of K_n: vertex and edge colors such that adjacent
/// vertices, incident edges, and each vertex with its incident edges all
/// receive distinct colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TotalColoring {
    pub n: usize,
    vertex_color: Vec<usize>,
    /// edge {i,j}, i < j, at the canonical pair index
    edge_color: Vec<usize>,
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl TotalColoring {
    pub fn vertex(&self, i: usize) -> usize {
        self.vertex_color[i]
    }

    pub fn edge(&self, i: usize, j: usize) -> usize {
        self.edge_color[pair_index(self.n, i, j)]
    }

    pub fn num_colors(&self) -> usize {
        let mut seen = vec![false; self.n.max(1)];
        for &c in self.vertex_color.iter().chain(self.edge_color.iter()) {
            seen[c] = true;
        }
        seen.iter().filter(|&&b| b).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| serde_json::json!({"u": i, "v": j, "color": self.edge(i, j)}))
            .collect();
        serde_json::json!({
            "n": self.n,
            "color_base": 0,
            "vertex_colors": self.vertex_color,
            "edge_colors": edges,
        })
    }
}

/// Cyclic n-total-coloring of K_n for odd n: vertex i -> 2i mod n,
/// edge {i,j} -> (i+j) mod n.
pub fn total_coloring_odd(n: usize) -> Result<TotalColoring> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "total coloring construction requires odd n".into(),
        ));
    }
    let vertex_color = (0..n).map(|i| 2 * i % n).collect();
    let mut edge_color = vec![0; n * (n - 1) / 2];
    for i in 0..n {
        for j in i + 1..n {
            edge_color[pair_index(n, i, j)] = (i + j) % n;
        }
    }
    let tc = TotalColoring { n, vertex_color, edge_color };
    if !validate_total_coloring(&tc) {
        return Err(Error::VerificationFailed(format!(
            "total coloring of K_{n} failed validation"
        )));
    }
    Ok(tc)
}

pub fn validate_total_coloring(tc: &TotalColoring) -> bool {
    let n = tc.n;
    for i in 0..n {
        for j in i + 1..n {
            if tc.vertex(i) == tc.vertex(j) {
                return false;
            }
            if tc.vertex(i) == tc.edge(i, j) || tc.vertex(j) == tc.edge(i, j) {
                return false;
            }
            for k in j + 1..n {
                // incident pairs among {i,j}, {i,k}, {j,k}
                if tc.edge(i, j) == tc.edge(i, k)
                    || tc.edge(i, j) == tc.edge(j, k)
                    || tc.edge(i, k) == tc.edge(j, k)
                {
                    return false;
                }
            }
        }
    }
    true
}

/// Proper edge coloring of K_m with m-1 colors, each color class a perfect
/// matching (m even).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoring {
    pub m: usize,
    edge_color: Vec<usize>,
}

impl EdgeColoring {
    pub fn edge(&self, i: usize, j: usize) -> usize {
        self.edge_color[pair_index(self.m, i, j)]
    }

    pub fn num_colors(&self) -> usize {
        self.edge_color.iter().copied().max().map_or(0, |c| c + 1)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = (0..self.m)
            .flat_map(|i| (i + 1..self.m).map(move |j| (i, j)))
            .map(|(i, j)| serde_json::json!({"u": i, "v": j, "color": self.edge(i, j)}))
            .collect();
        serde_json::json!({
            "m": self.m,
            "color_base": 0,
            "edge_colors": edges,
        })
    }
}

/// Round-robin 1-factorization of K_m for even m: for i,j < m-1 the edge
/// {i,j} gets (i+j) mod (m-1); the edge {i, m-1} gets 2i mod (m-1).
pub fn one_factorization(m: usize) -> Result<EdgeColoring> {
    if m % 2 == 1 {
        return Err(Error::InvalidParameter(
            "1-factorization requires even m".into(),
        ));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 2".into()));
    }
    let mut edge_color = vec![0; m * (m - 1) / 2];
    if m == 2 {
        edge_color[0] = 0;
    } else {
        for i in 0..m {
            for j in i + 1..m {
                edge_color[pair_index(m, i, j)] = if j == m - 1 {
                    2 * i % (m - 1)
                } else {
                    (i + j) % (m - 1)
                };
            }
        }
    }
    let ec = EdgeColoring { m, edge_color };
    if !validate_edge_coloring(&ec) {
        return Err(Error::VerificationFailed(format!(
            "1-factorization of K_{m} failed validation"
        )));
    }
    Ok(ec)
}

/// True iff the coloring is proper and every color class is a perfect
/// matching on the m vertices.
pub fn validate_edge_coloring(ec: &EdgeColoring) -> bool {
    let m = ec.m;
    if m % 2 == 1 {
        return false;
    }
    let num_colors = ec.num_colors();
    // each vertex must see each color at most once
    for i in 0..m {
        let mut seen = vec![false; num_colors];
        for j in 0..m {
            if i == j {
                continue;
            }
            let c = ec.edge(i, j);
            if seen[c] {
                return false;
            }
            seen[c] = true;
        }
    }
    // perfect matchings: each color covers all m vertices
    let mut class_size = vec![0usize; num_colors];
    for i in 0..m {
        for j in i + 1..m {
            class_size[ec.edge(i, j)] += 1;
        }
    }
    class_size.iter().all(|&s| s == m / 2)
}
