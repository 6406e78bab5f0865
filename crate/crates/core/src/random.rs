//! Random trees, split vectors and graphs for tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bits::LabelBits;
use crate::maxflow::IncompatGraph;
use crate::splits::{encode, SplitVector};
use crate::tree::{RawNode, Tree};

/// Uniform draw from `(0, 1]`.
pub fn unit_weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Rooted binary tree on `n >= 2` leaves by uniform stepwise insertion, with
/// every edge weight drawn from `(0, 1]`.
pub fn random_binary_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Tree {
    assert!(n >= 2, "need at least two leaves");
    // children[v] for internal vertices; leaves are vertices without children.
    let mut children: Vec<Vec<usize>> = vec![Vec::new(), Vec::new(), vec![0, 1]];
    let mut parent: Vec<Option<usize>> = vec![Some(2), Some(2), None];
    let mut label: Vec<Option<usize>> = vec![Some(1), Some(2), None];
    let mut root = 2;
    for k in 3..=n {
        let u = rng.gen_range(0..children.len());
        let leaf = children.len();
        children.push(Vec::new());
        parent.push(None);
        label.push(Some(k));
        let mid = children.len();
        children.push(vec![u, leaf]);
        label.push(None);
        parent.push(parent[u]);
        match parent[u] {
            Some(p) => {
                let slot = children[p].iter().position(|&c| c == u).unwrap();
                children[p][slot] = mid;
            }
            None => root = mid,
        }
        parent[u] = Some(mid);
        parent[leaf] = Some(mid);
    }
    fn build<R: Rng + ?Sized>(v: usize, ch: &[Vec<usize>], lab: &[Option<usize>], rng: &mut R) -> RawNode {
        let w = unit_weight(rng);
        match lab[v] {
            Some(l) => RawNode::leaf(l, w),
            None => RawNode::internal(ch[v].iter().map(|&c| build(c, ch, lab, rng)).collect(), w),
        }
    }
    let mut raw = build(root, &children, &label, rng);
    raw.weight = None;
    Tree::from_raw(raw).expect("stepwise insertion yields a valid tree")
}

/// Random binary tree with each internal edge contracted with probability `p`.
pub fn random_tree<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Tree {
    let t = random_binary_tree(n, rng);
    let kept: Vec<(LabelBits, f64)> = t
        .internal_edges()
        .filter(|_| rng.gen::<f64>() >= p)
        .map(|e| (t.clade(e).clone(), t.weight(e)))
        .collect();
    let leaf_w: Vec<f64> = (0..=n)
        .map(|l| if l == 0 { 0.0 } else { t.weight(t.leaf_vertex(l).unwrap()) })
        .collect();
    Tree::from_clusters(n, &kept, &|l| leaf_w[l]).expect("subset of a laminar family is laminar")
}

/// Same topology as `t` with fresh weights on every edge.
pub fn reweight<R: Rng + ?Sized>(t: &Tree, rng: &mut R) -> Tree {
    let clusters: Vec<(LabelBits, f64)> = t
        .internal_edges()
        .map(|e| (t.clade(e).clone(), unit_weight(rng)))
        .collect();
    let leaf_w: Vec<f64> = (0..=t.n()).map(|_| unit_weight(rng)).collect();
    Tree::from_clusters(t.n(), &clusters, &|l| leaf_w[l]).expect("clades of a tree are laminar")
}

/// Split vector of a random tree whose internal edges survive with
/// probability `1 - p`.
pub fn random_split_vector<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> SplitVector {
    encode(&random_tree(n, p, rng))
}

/// Uniformly random permutation of `1..=n`, as a relabelling table.
pub fn random_relabelling<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut rest: Vec<usize> = (1..=n).collect();
    rest.shuffle(rng);
    std::iter::once(0).chain(rest).collect()
}

/// Random vertex-weighted bipartite graph with both sides non-empty.
pub fn random_bipartite<R: Rng + ?Sized>(max_vertices: usize, max_arcs: usize, rng: &mut R) -> IncompatGraph {
    let total = rng.gen_range(2..=max_vertices.max(2));
    let l = rng.gen_range(1..total);
    let r = total - l;
    let left: Vec<f64> = (0..l).map(|_| unit_weight(rng)).collect();
    let right: Vec<f64> = (0..r).map(|_| unit_weight(rng)).collect();
    let mut all: Vec<(usize, usize)> = (0..l).flat_map(|i| (0..r).map(move |j| (i, j))).collect();
    all.shuffle(rng);
    let m = rng.gen_range(0..=all.len().min(max_arcs));
    all.truncate(m);
    IncompatGraph::new(left, right, all).expect("generated graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn binary_trees_are_binary() {
        let mut rng = StdRng::seed_from_u64(7);
        for n in 2..30 {
            let t = random_binary_tree(n, &mut rng);
            assert_eq!(t.n(), n);
            assert!(t.is_binary());
            assert!(t.edges().all(|e| t.weight(e) > 0.0 && t.weight(e) <= 1.0));
        }
    }

    #[test]
    fn all_topologies_reachable() {
        let mut rng = StdRng::seed_from_u64(1);
        let seen: std::collections::BTreeSet<_> = (0..2000)
            .map(|_| crate::tree::clades(&random_binary_tree(4, &mut rng)))
            .collect();
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn contraction_and_reweight() {
        let mut rng = StdRng::seed_from_u64(3);
        let t = random_tree(10, 0.5, &mut rng);
        assert!(t.internal_edges().count() <= 8);
        let u = reweight(&t, &mut rng);
        assert!(u.same_topology(&t));
    }
}
