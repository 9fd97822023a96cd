//! Reproducible summary tables: one row per (m, h) with closed-form and
//! constructive color counts, bounds, forwarding index and the exact w/pi
//! ratio.

use serde::Serialize;

use crate::bounds::{
    best_vertex_cut_bound, closed_form_w, edge_cut_bound_tree, forwarding_index_tree, Rational,
};
use crate::colorings::color_mary;
use crate::graph::build_complete_mary_tree;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub m: usize,
    pub h: usize,
    pub n: usize,
    pub paths: usize,
    pub w_closed_form: u64,
    /// None when the instance exceeds the path cap.
    pub constructive: Option<u64>,
    pub proper: Option<bool>,
    pub edge_cut_bound: u64,
    pub vertex_cut_bound: Option<u64>,
    pub pi: u64,
    /// w/pi as a reduced fraction "p/q".
    pub ratio_w_over_pi: String,
}

/// Default path-count cap for running the constructive coloring per row.
pub const DEFAULT_PATH_CAP: usize = 50_000;

pub fn make_table(
    m_range: impl Iterator<Item = usize>,
    h_range: impl Iterator<Item = usize> + Clone,
    path_cap: usize,
) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for m in m_range {
        for h in h_range.clone() {
            rows.push(make_row(m, h, path_cap)?);
        }
    }
    Ok(rows)
}

pub fn make_row(m: usize, h: usize, path_cap: usize) -> Result<TableRow> {
    let tree = build_complete_mary_tree(m, h)?;
    let n = tree.n();
    let paths = n * (n - 1) / 2;
    let w = closed_form_w(m, h)?;
    let edge = edge_cut_bound_tree(&tree)?.bound;
    let vertex = if n > 2 {
        Some(best_vertex_cut_bound(&tree, 1)?.bound)
    } else {
        None
    };
    let pi = forwarding_index_tree(&tree)?;
    let ratio = Rational::new(w as i128, pi as i128);
    let (constructive, proper) = if paths <= path_cap {
        let instance = color_mary(m, h)?;
        (Some(instance.assignment.num_colors as u64), Some(true))
    } else {
        (None, None)
    };
    Ok(TableRow {
        m,
        h,
        n,
        paths,
        w_closed_form: w,
        constructive,
        proper,
        edge_cut_bound: edge,
        vertex_cut_bound: vertex,
        pi,
        ratio_w_over_pi: format!("{}/{}", ratio.numer(), ratio.denom()),
    })
}

pub fn table_to_json(rows: &[TableRow]) -> String {
    serde_json::to_string_pretty(&serde_json::json!({ "rows": rows })).unwrap()
}

pub fn table_to_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(
        "m,h,n,paths,w_closed_form,constructive,proper,edge_cut_bound,vertex_cut_bound,pi,ratio_w_over_pi\n",
    );
    for r in rows {
        let opt = |v: &Option<u64>| v.map_or(String::from("skipped"), |x| x.to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.m,
            r.h,
            r.n,
            r.paths,
            r.w_closed_form,
            opt(&r.constructive),
            r.proper.map_or(String::from("skipped"), |b| b.to_string()),
            r.edge_cut_bound,
            opt(&r.vertex_cut_bound),
            r.pi,
            r.ratio_w_over_pi,
        ));
    }
    out
}
