//! Vertex-weighted bipartite graphs and min-weight vertex cover by max-flow.
//!
//! The flow network is implicit: a source feeds every left vertex up to its
//! weight, every arc left→right has unbounded capacity, and every right
//! vertex drains to the sink up to its weight.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::splits::Split;

/// Default bottleneck floor below which augmenting paths count as exhausted.
pub const FLOW_FLOOR: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct IncompatGraph {
    left: Vec<f64>,
    right: Vec<f64>,
    arcs: Vec<(usize, usize)>,
    out_arcs: Vec<Vec<usize>>,
    in_arcs: Vec<Vec<usize>>,
}

impl IncompatGraph {
    /// Graph from explicit vertex weights and arcs `(left, right)`.
    ///
    /// Arcs are stored sorted by left index, then right index.
    pub fn new(left: Vec<f64>, right: Vec<f64>, mut arcs: Vec<(usize, usize)>) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::EmptySide);
        }
        if let Some(w) = left.iter().chain(&right).find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidGraph(format!("vertex weight {w} is not positive")));
        }
        arcs.sort_unstable();
        if arcs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph("duplicate arc".into()));
        }
        let mut out_arcs = vec![Vec::new(); left.len()];
        let mut in_arcs = vec![Vec::new(); right.len()];
        for (k, &(i, j)) in arcs.iter().enumerate() {
            if i >= left.len() || j >= right.len() {
                return Err(Error::InvalidGraph(format!("arc ({i},{j}) out of range")));
            }
            out_arcs[i].push(k);
            in_arcs[j].push(k);
        }
        Ok(IncompatGraph {
            left,
            right,
            arcs,
            out_arcs,
            in_arcs,
        })
    }

    pub fn left_weights(&self) -> &[f64] {
        &self.left
    }

    pub fn right_weights(&self) -> &[f64] {
        &self.right
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn vertex_count(&self) -> usize {
        self.left.len() + self.right.len()
    }
}

/// Incompatibility graph of two weighted split sets, weights `w² / ‖side‖²`.
///
/// Vertex order follows the input order; callers pass canonically sorted sets.
pub fn build_incompat_graph(a: &[(Split, f64)], b: &[(Split, f64)]) -> Result<IncompatGraph> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySide);
    }
    let norm2 = |s: &[(Split, f64)]| s.iter().map(|(_, w)| w * w).sum::<f64>();
    let (na, nb) = (norm2(a), norm2(b));
    let left = a.iter().map(|(_, w)| w * w / na).collect();
    let right = b.iter().map(|(_, w)| w * w / nb).collect();
    let mut arcs = Vec::new();
    for (i, (sa, _)) in a.iter().enumerate() {
        for (j, (sb, _)) in b.iter().enumerate() {
            if sa.n() != sb.n() {
                return Err(Error::SizeMismatch(sa.n(), sb.n()));
            }
            if !sa.compatible_with(sb) {
                arcs.push((i, j));
            }
        }
    }
    IncompatGraph::new(left, right, arcs)
}

/// Final state of a max-flow run.
#[derive(Clone, Debug)]
pub struct FlowState {
    /// Flow entering each left vertex from the source.
    pub left_flow: Vec<f64>,
    /// Flow leaving each right vertex to the sink.
    pub right_flow: Vec<f64>,
    /// Flow on each middle arc, indexed like [`IncompatGraph::arcs`].
    pub arc_flow: Vec<f64>,
    pub maxflow: f64,
    /// Left vertices reachable from the source in the final residual graph.
    pub reachable_left: Vec<bool>,
    pub reachable_right: Vec<bool>,
    pub saturation_steps: usize,
    pub augmentations: usize,
}

pub fn edmonds_karp(g: &IncompatGraph) -> FlowState {
    edmonds_karp_with(g, FLOW_FLOOR)
}

/// Saturation pass over the arcs, then shortest augmenting paths, then the
/// reachable side of a minimum cut.
pub fn edmonds_karp_with(g: &IncompatGraph, floor: f64) -> FlowState {
    let mut fl = vec![0.0; g.left.len()];
    let mut fr = vec![0.0; g.right.len()];
    let mut fa = vec![0.0; g.arcs.len()];

    for (k, &(i, j)) in g.arcs.iter().enumerate() {
        let ri = g.left[i] - fl[i];
        let rj = g.right[j] - fr[j];
        let d = ri.min(rj);
        if d > 0.0 {
            push(&mut fl[i], g.left[i], ri, d);
            push(&mut fr[j], g.right[j], rj, d);
            fa[k] += d;
        }
    }
    let saturation_steps = g.arcs.len();

    let mut augmentations = 0;
    loop {
        let (prev_l, prev_r, end) = bfs(g, &fl, &fr, &fa, floor);
        let Some(end) = end else {
            let reachable_left = prev_l.iter().map(|p| p.is_some()).collect();
            let reachable_right = prev_r.iter().map(|p| p.is_some()).collect();
            return FlowState {
                maxflow: fl.iter().sum(),
                left_flow: fl,
                right_flow: fr,
                arc_flow: fa,
                reachable_left,
                reachable_right,
                saturation_steps,
                augmentations,
            };
        };

        // Walk the path back to the source collecting the bottleneck.
        let mut bottleneck = g.right[end] - fr[end];
        let mut path = Vec::new();
        let mut j = end;
        let start = loop {
            let (i, k_in) = match prev_r[j] {
                Some(Pred::Arc(k)) => (g.arcs[k].0, k),
                _ => unreachable!("right vertex on a path has an arc predecessor"),
            };
            path.push((k_in, true));
            match prev_l[i] {
                Some(Pred::Source) => {
                    bottleneck = bottleneck.min(g.left[i] - fl[i]);
                    break i;
                }
                Some(Pred::Arc(k_back)) => {
                    bottleneck = bottleneck.min(fa[k_back]);
                    path.push((k_back, false));
                    j = g.arcs[k_back].1;
                }
                None => unreachable!("left vertex on a path is reachable"),
            }
        };

        let rs = g.left[start] - fl[start];
        push(&mut fl[start], g.left[start], rs, bottleneck);
        let re = g.right[end] - fr[end];
        push(&mut fr[end], g.right[end], re, bottleneck);
        for (k, forward) in path {
            if forward {
                fa[k] += bottleneck;
            } else if fa[k] == bottleneck {
                fa[k] = 0.0;
            } else {
                fa[k] -= bottleneck;
            }
        }
        augmentations += 1;
    }
}

/// Adds `d` to a vertex flow, snapping to the capacity when `d` saturates it.
#[inline]
fn push(flow: &mut f64, cap: f64, residual: f64, d: f64) {
    if d >= residual {
        *flow = cap;
    } else {
        *flow += d;
    }
}

#[derive(Clone, Copy, Debug)]
enum Pred {
    Source,
    Arc(usize),
}

/// Breadth-first search over the residual graph from the source.
///
/// Returns predecessor links and the first right vertex found with spare
/// sink capacity, if any.
fn bfs(
    g: &IncompatGraph,
    fl: &[f64],
    fr: &[f64],
    fa: &[f64],
    floor: f64,
) -> (Vec<Option<Pred>>, Vec<Option<Pred>>, Option<usize>) {
    let mut prev_l: Vec<Option<Pred>> = vec![None; g.left.len()];
    let mut prev_r: Vec<Option<Pred>> = vec![None; g.right.len()];
    let mut queue = VecDeque::new();
    for i in 0..g.left.len() {
        if g.left[i] - fl[i] > floor {
            prev_l[i] = Some(Pred::Source);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        for &k in &g.out_arcs[i] {
            let j = g.arcs[k].1;
            if prev_r[j].is_some() {
                continue;
            }
            prev_r[j] = Some(Pred::Arc(k));
            if g.right[j] - fr[j] > floor {
                return (prev_l, prev_r, Some(j));
            }
            for &kb in &g.in_arcs[j] {
                let ib = g.arcs[kb].0;
                if prev_l[ib].is_none() && fa[kb] > floor {
                    prev_l[ib] = Some(Pred::Arc(kb));
                    queue.push_back(ib);
                }
            }
        }
    }
    (prev_l, prev_r, None)
}

/// A vertex cover split by side, with its weight.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexCover {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub weight: f64,
}

pub fn min_weight_vertex_cover(g: &IncompatGraph) -> VertexCover {
    min_weight_vertex_cover_with(g, FLOW_FLOOR)
}

/// Cover read off the minimum cut: unreachable left plus reachable right.
pub fn min_weight_vertex_cover_with(g: &IncompatGraph, floor: f64) -> VertexCover {
    let st = edmonds_karp_with(g, floor);
    VertexCover {
        left: (0..g.left.len()).filter(|&i| !st.reachable_left[i]).collect(),
        right: (0..g.right.len()).filter(|&j| st.reachable_right[j]).collect(),
        weight: st.maxflow,
    }
}
