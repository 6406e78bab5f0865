//! Deliberately naive reference implementations.
//!
//! Nothing here calls the flow, geodesic or metric engines. Splits are
//! handled as plain sorted label lists with their own compatibility test.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::maxflow::IncompatGraph;
use crate::splits::SplitVector;
use crate::tree::Tree;

/// Exhaustive minimum-weight vertex cover; vertices are numbered left first.
///
/// Ties go to the lexicographically smallest vertex list.
pub fn brute_min_cover(g: &IncompatGraph) -> Result<(Vec<usize>, f64)> {
    let l = g.left_weights().len();
    let w: Vec<f64> = g.left_weights().iter().chain(g.right_weights()).copied().collect();
    if w.len() > 20 {
        return Err(Error::Size(format!("{} vertices exceed the oracle limit of 20", w.len())));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 0u32..(1 << w.len()) {
        let covers = g
            .arcs()
            .iter()
            .all(|&(i, j)| mask & (1 << i) != 0 || mask & (1 << (l + j)) != 0);
        if !covers {
            continue;
        }
        let set: Vec<usize> = (0..w.len()).filter(|&v| mask & (1 << v) != 0).collect();
        let weight: f64 = set.iter().map(|&v| w[v]).sum();
        let better = match &best {
            None => true,
            Some((bs, bw)) => weight < *bw || (weight == *bw && set < *bs),
        };
        if better {
            best = Some((set, weight));
        }
    }
    Ok(best.expect("the full vertex set is always a cover"))
}

/// Minimum s-t cut of the flow network, by enumerating the source side.
pub fn brute_min_cut(g: &IncompatGraph) -> Result<f64> {
    let (lw, rw) = (g.left_weights(), g.right_weights());
    let v = lw.len() + rw.len();
    if v > 20 {
        return Err(Error::Size(format!("{v} vertices exceed the oracle limit of 20")));
    }
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << v) {
        let src = |x: usize| mask & (1 << x) != 0;
        // An arc leaving the source side has infinite capacity.
        if g.arcs().iter().any(|&(i, j)| src(i) && !src(lw.len() + j)) {
            continue;
        }
        let cut: f64 = (0..lw.len()).filter(|&i| !src(i)).map(|i| lw[i]).sum::<f64>()
            + (0..rw.len()).filter(|&j| src(lw.len() + j)).map(|j| rw[j]).sum::<f64>();
        best = best.min(cut);
    }
    Ok(best)
}

/// Robinson-Foulds by an independent depth-first collection of clusters.
pub fn brute_rf(a: &Tree, b: &Tree) -> usize {
    let ca = dfs_clusters(a);
    let cb = dfs_clusters(b);
    ca.symmetric_difference(&cb).count()
}

fn dfs_clusters(t: &Tree) -> BTreeSet<Vec<usize>> {
    fn below(t: &Tree, v: usize, out: &mut BTreeSet<Vec<usize>>) -> Vec<usize> {
        if let Some(l) = t.label(v) {
            return vec![l];
        }
        let mut all = Vec::new();
        for &c in t.children(v) {
            all.extend(below(t, c, out));
        }
        all.sort_unstable();
        if v != t.root() {
            out.insert(all.clone());
        }
        all
    }
    let mut out = BTreeSet::new();
    below(t, t.root(), &mut out);
    out
}

/// Leaf-to-leaf path length by breadth-first search over the undirected tree.
pub fn brute_path_length(t: &Tree, a: usize, b: usize, weighted: bool) -> Result<f64> {
    let (src, dst) = (t.leaf_vertex(a)?, t.leaf_vertex(b)?);
    let nv = t.vertex_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    for v in 1..nv {
        let p = t.parent(v).unwrap();
        let w = if weighted { t.weight(v) } else { 1.0 };
        adj[v].push((p, w));
        adj[p].push((v, w));
    }
    let mut dist = vec![f64::NAN; nv];
    dist[src] = 0.0;
    let mut queue = std::collections::VecDeque::from([src]);
    while let Some(u) = queue.pop_front() {
        for &(x, w) in &adj[u] {
            if dist[x].is_nan() {
                dist[x] = dist[u] + w;
                queue.push_back(x);
            }
        }
    }
    Ok(dist[dst])
}

/// Maximum total of a square score matrix over all permutations (≤ 8 rows).
pub fn brute_assignment_max(m: &[Vec<f64>]) -> Result<f64> {
    let k = m.len();
    if k > 8 {
        return Err(Error::Size(format!("{k} rows exceed the oracle limit of 8")));
    }
    fn go(m: &[Vec<f64>], row: usize, used: &mut Vec<bool>) -> f64 {
        if row == m.len() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for c in 0..m.len() {
            if !used[c] {
                used[c] = true;
                best = best.max(m[row][c] + go(m, row + 1, used));
                used[c] = false;
            }
        }
        best
    }
    Ok(go(m, 0, &mut vec![false; k]))
}

// ---------------------------------------------------------------------------
// Geodesic by support enumeration

/// A split as its root-free block, sorted.
type RawSplit = (Vec<usize>, f64);

fn raw_splits(v: &SplitVector) -> Vec<RawSplit> {
    v.iter().map(|(s, w)| (s.clade().to_vec(), w)).collect()
}

fn raw_compatible(x: &[usize], y: &[usize]) -> bool {
    let xs: BTreeSet<_> = x.iter().collect();
    let ys: BTreeSet<_> = y.iter().collect();
    xs.is_disjoint(&ys) || xs.is_subset(&ys) || ys.is_subset(&xs)
}

fn norm(items: &[RawSplit], idx: &[usize]) -> f64 {
    idx.iter().map(|&i| items[i].1 * items[i].1).sum::<f64>().sqrt()
}

/// All ordered partitions of `0..m` into exactly `k` non-empty blocks.
fn ordered_partitions(m: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut assign = vec![0usize; m];
    loop {
        let mut blocks = vec![Vec::new(); k];
        for (item, &b) in assign.iter().enumerate() {
            blocks[b].push(item);
        }
        if blocks.iter().all(|b| !b.is_empty()) {
            out.push(blocks);
        }
        // Odometer over k^m assignments.
        let mut pos = 0;
        loop {
            if pos == m {
                return out;
            }
            assign[pos] += 1;
            if assign[pos] < k {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

/// Minimum of `sqrt(Σ (‖A_i‖+‖B_i‖)²)` over supports with cross-compatibility
/// and non-decreasing norm ratios.
///
/// Inputs must share no split and hold at most 5 splits each.
pub fn brute_geodesic(a: &SplitVector, b: &SplitVector) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    brute_disjoint(&raw_splits(a), &raw_splits(b))
}

fn brute_disjoint(xa: &[RawSplit], xb: &[RawSplit]) -> Result<f64> {
    if xa.len() > 5 || xb.len() > 5 {
        return Err(Error::Size("the support oracle handles at most 5 splits per side".into()));
    }
    if xa.iter().any(|x| xb.iter().any(|y| x.0 == y.0)) {
        return Err(Error::InvalidVector("oracle inputs must share no split".into()));
    }
    if xa.is_empty() || xb.is_empty() {
        return Ok(norm(xa, &(0..xa.len()).collect::<Vec<_>>()) + norm(xb, &(0..xb.len()).collect::<Vec<_>>()));
    }
    let mut best = f64::INFINITY;
    for k in 1..=xa.len().min(xb.len()) {
        let pa = ordered_partitions(xa.len(), k);
        let pb = ordered_partitions(xb.len(), k);
        for ba in &pa {
            let na: Vec<f64> = ba.iter().map(|blk| norm(xa, blk)).collect();
            for bb in &pb {
                let nb: Vec<f64> = bb.iter().map(|blk| norm(xb, blk)).collect();
                let ratios_ok = (1..k).all(|i| na[i - 1] * nb[i] <= na[i] * nb[i - 1] * (1.0 + 1e-12));
                if !ratios_ok {
                    continue;
                }
                let cross_ok = (0..k).all(|j| {
                    (j + 1..k).all(|i| {
                        ba[i]
                            .iter()
                            .all(|&x| bb[j].iter().all(|&y| raw_compatible(&xa[x].0, &xb[y].0)))
                    })
                });
                if !cross_ok {
                    continue;
                }
                let len = (0..k).map(|i| (na[i] + nb[i]).powi(2)).sum::<f64>().sqrt();
                best = best.min(len);
            }
        }
    }
    Ok(best)
}

/// Geodesic for arbitrary inputs by removing shared splits first.
///
/// A split counts as shared when the other side holds it too, or when it is
/// compatible with every split on the other side (then it sits in the other
/// tree at length 0). Shared splits add their squared weight difference;
/// the rest goes to [`brute_geodesic`] as one problem.
pub fn brute_geodesic_decomposed(a: &SplitVector, b: &SplitVector) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    let (xa, xb) = (raw_splits(a), raw_splits(b));
    let shared = |x: &RawSplit, other: &[RawSplit]| {
        other.iter().any(|y| y.0 == x.0) || other.iter().all(|y| raw_compatible(&x.0, &y.0))
    };
    let mut delta2 = 0.0;
    let mut rest_a = Vec::new();
    for x in &xa {
        if shared(x, &xb) {
            let other = xb.iter().find(|y| y.0 == x.0).map_or(0.0, |y| y.1);
            delta2 += (x.1 - other).powi(2);
        } else {
            rest_a.push(x.clone());
        }
    }
    let mut rest_b = Vec::new();
    for y in &xb {
        if xa.iter().any(|x| x.0 == y.0) {
            continue;
        }
        if shared(y, &xa) {
            delta2 += y.1 * y.1;
        } else {
            rest_b.push(y.clone());
        }
    }
    let d = brute_disjoint(&rest_a, &rest_b)?;
    Ok((d * d + delta2).sqrt())
}

/// True when some non-trivial repartition of the pair would shorten the path:
/// `A = C1 ∪ C2`, `B = D1 ∪ D2`, all blocks non-empty, `C2` compatible with
/// `D1`, and `‖C1‖/‖D1‖ < ‖C2‖/‖D2‖`.
pub fn brute_p3_violated(a: &[(Vec<usize>, f64)], b: &[(Vec<usize>, f64)]) -> bool {
    let (ma, mb) = (a.len(), b.len());
    if ma < 2 || mb < 2 || ma > 12 || mb > 12 {
        return false;
    }
    for sa in 1u32..(1 << ma) - 1 {
        let c1: Vec<usize> = (0..ma).filter(|&i| sa & (1 << i) != 0).collect();
        let c2: Vec<usize> = (0..ma).filter(|&i| sa & (1 << i) == 0).collect();
        for sb in 1u32..(1 << mb) - 1 {
            let d1: Vec<usize> = (0..mb).filter(|&j| sb & (1 << j) != 0).collect();
            let d2: Vec<usize> = (0..mb).filter(|&j| sb & (1 << j) == 0).collect();
            let compatible = c2
                .iter()
                .all(|&x| d1.iter().all(|&y| raw_compatible(&a[x].0, &b[y].0)));
            if !compatible {
                continue;
            }
            let (n1, n2) = (norm(a, &c1), norm(a, &c2));
            let (m1, m2) = (norm(b, &d1), norm(b, &d2));
            if n1 * m2 < n2 * m1 * (1.0 - 1e-9) {
                return true;
            }
        }
    }
    false
}
