//! Rooted, leaf-labeled, edge-weighted trees.
//!
//! Labels are the integers `1..=n` on leaves; the root implicitly carries
//! label `0`. Vertices are stored in preorder with the root at index 0, and
//! every non-root vertex `v` owns the edge to its parent, so an edge is
//! identified by the id of its lower endpoint.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::bits::LabelBits;
use crate::error::{Error, Result};

pub type VertexId = usize;

/// An edge, named by its lower (child) endpoint.
pub type EdgeId = usize;

/// Set of clusters (leaf-label sets of clades), one per internal edge.
pub type ClusterSet = BTreeSet<LabelBits>;

#[derive(Clone, Debug)]
pub struct Tree {
    n: usize,
    parent: Vec<Option<VertexId>>,
    children: Vec<Vec<VertexId>>,
    weight: Vec<f64>,
    label: Vec<Option<usize>>,
    leaf_of: Vec<VertexId>,
    depth: Vec<usize>,
    clade: Vec<LabelBits>,
}

/// Nested intermediate form shared by the parser, generators and builders.
#[derive(Clone, Debug, Default)]
pub(crate) struct RawNode {
    pub label: Option<usize>,
    pub weight: Option<f64>,
    pub children: Vec<RawNode>,
}

impl RawNode {
    pub fn leaf(label: usize, weight: f64) -> Self {
        RawNode {
            label: Some(label),
            weight: Some(weight),
            children: Vec::new(),
        }
    }

    pub fn internal(children: Vec<RawNode>, weight: f64) -> Self {
        RawNode {
            label: None,
            weight: Some(weight),
            children,
        }
    }
}

impl Tree {
    pub(crate) fn from_raw(root: RawNode) -> Result<Tree> {
        if root.children.len() < 2 {
            return Err(Error::Shape(format!(
                "root must have at least two children, found {}",
                root.children.len()
            )));
        }
        let mut t = Tree {
            n: 0,
            parent: Vec::new(),
            children: Vec::new(),
            weight: Vec::new(),
            label: Vec::new(),
            leaf_of: Vec::new(),
            depth: Vec::new(),
            clade: Vec::new(),
        };
        // Iterative preorder so deep caterpillars do not blow the stack.
        let mut stack: Vec<(RawNode, Option<VertexId>)> = vec![(root, None)];
        let mut max_label = 0usize;
        while let Some((node, parent)) = stack.pop() {
            let id = t.parent.len();
            let w = match parent {
                None => 0.0,
                Some(_) => node.weight.unwrap_or(1.0),
            };
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Shape(format!("edge weight {w} is negative or not finite")));
            }
            t.parent.push(parent);
            t.children.push(Vec::new());
            t.weight.push(w);
            t.depth.push(parent.map_or(0, |p| t.depth[p] + 1));
            if let Some(p) = parent {
                t.children[p].push(id);
            }
            if node.children.is_empty() {
                let Some(l) = node.label else {
                    return Err(Error::Label("leaf without a label".into()));
                };
                if l == 0 {
                    return Err(Error::Label("label 0 is reserved for the root".into()));
                }
                max_label = max_label.max(l);
                t.label.push(Some(l));
            } else {
                if let Some(l) = node.label {
                    return Err(Error::Label(format!("internal vertex carries label {l}")));
                }
                if parent.is_some() && node.children.len() < 2 {
                    return Err(Error::Shape(
                        "internal vertex of degree 2 (single child)".into(),
                    ));
                }
                t.label.push(None);
            }
            for c in node.children.into_iter().rev() {
                stack.push((c, Some(id)));
            }
        }

        let leaf_count = t.label.iter().filter(|l| l.is_some()).count();
        if leaf_count < 2 {
            return Err(Error::Shape("a tree needs at least two leaves".into()));
        }
        let n = leaf_count;
        let mut leaf_of = vec![usize::MAX; n + 1];
        leaf_of[0] = 0;
        for (v, l) in t.label.iter().enumerate() {
            if let Some(l) = *l {
                if l > n {
                    return Err(Error::Label(format!(
                        "labels must be exactly 1..{n}; found {l} (max {max_label})"
                    )));
                }
                if leaf_of[l] != usize::MAX {
                    return Err(Error::Label(format!("duplicate label {l}")));
                }
                leaf_of[l] = v;
            }
        }
        t.n = n;
        t.leaf_of = leaf_of;

        let mut clade = vec![LabelBits::empty(n); t.parent.len()];
        for v in (0..t.parent.len()).rev() {
            if let Some(l) = t.label[v] {
                clade[v].insert(l);
            }
            if let Some(p) = t.parent[v] {
                let (lo, hi) = clade.split_at_mut(v);
                lo[p].union_with(&hi[0]);
            }
        }
        t.clade = clade;
        Ok(t)
    }

    pub(crate) fn to_raw(&self) -> RawNode {
        self.raw_below(0, &|_| false)
    }

    /// Nested form with the edges flagged by `collapse` merged into their parents.
    fn raw_below(&self, v: VertexId, collapse: &dyn Fn(VertexId) -> bool) -> RawNode {
        let mut node = RawNode {
            label: self.label[v],
            weight: if v == 0 { None } else { Some(self.weight[v]) },
            children: Vec::new(),
        };
        for &c in &self.children[v] {
            let child = self.raw_below(c, collapse);
            if collapse(c) {
                node.children.extend(child.children);
            } else {
                node.children.push(child);
            }
        }
        node
    }

    /// Builds the minimal tree with the given clusters as internal-edge clades.
    ///
    /// `clusters` must be a laminar family of subsets of `1..=n`, each with at
    /// least two and at most `n - 1` labels.
    pub(crate) fn from_clusters(
        n: usize,
        clusters: &[(LabelBits, f64)],
        leaf_weight: &dyn Fn(usize) -> f64,
    ) -> Result<Tree> {
        let mut order: Vec<usize> = (0..clusters.len()).collect();
        order.sort_by(|&a, &b| clusters[b].0.len().cmp(&clusters[a].0.len()).then(a.cmp(&b)));

        // parent_of[k] = index (into order) of the smallest enclosing cluster.
        let mut parent_of: Vec<Option<usize>> = vec![None; order.len()];
        for (pos, &ci) in order.iter().enumerate() {
            let c = &clusters[ci].0;
            for prev in (0..pos).rev() {
                if c.is_subset(&clusters[order[prev]].0) {
                    parent_of[pos] = Some(prev);
                    break;
                }
            }
        }
        let mut leaf_parent: Vec<Option<usize>> = vec![None; n + 1];
        for (pos, &ci) in order.iter().enumerate() {
            for l in clusters[ci].0.iter() {
                leaf_parent[l] = Some(pos);
            }
        }

        let mut kids: Vec<Vec<RawNode>> = vec![Vec::new(); order.len() + 1];
        let slot = |p: Option<usize>| p.map_or(0, |i| i + 1);
        for l in 1..=n {
            kids[slot(leaf_parent[l])].push(RawNode::leaf(l, leaf_weight(l)));
        }
        for pos in (0..order.len()).rev() {
            let children = std::mem::take(&mut kids[pos + 1]);
            let node = RawNode::internal(children, clusters[order[pos]].1);
            kids[slot(parent_of[pos])].push(node);
        }
        let root = RawNode {
            label: None,
            weight: None,
            children: std::mem::take(&mut kids[0]),
        };
        Tree::from_raw(root)
    }

    /// Number of leaves; labels are `1..=n`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    pub fn edge_count(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    /// Weight of the edge above `v` (0 for the root).
    pub fn weight(&self, v: VertexId) -> f64 {
        self.weight[v]
    }

    pub fn label(&self, v: VertexId) -> Option<usize> {
        self.label[v]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v].is_empty()
    }

    /// Leaf labels below `v`.
    pub fn clade(&self, v: VertexId) -> &LabelBits {
        &self.clade[v]
    }

    pub fn leaf_vertex(&self, label: usize) -> Result<VertexId> {
        if label == 0 || label > self.n {
            return Err(Error::UnknownLabel(label));
        }
        Ok(self.leaf_of[label])
    }

    /// All edges (every non-root vertex).
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        1..self.parent.len()
    }

    /// Edges whose lower endpoint is internal.
    pub fn internal_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (1..self.parent.len()).filter(|&v| !self.children[v].is_empty())
    }

    pub fn is_binary(&self) -> bool {
        self.internal_edges().count() == self.n - 2
    }

    pub fn total_length(&self) -> f64 {
        self.edges().map(|e| self.weight[e]).sum()
    }

    /// Same rooted topology (cluster sets agree).
    pub fn same_topology(&self, other: &Tree) -> bool {
        self.n == other.n && clades(self) == clades(other)
    }

    /// Same topology and the same weight on every edge, leaf edges included.
    pub fn weight_identical(&self, other: &Tree) -> bool {
        if self.n != other.n || self.vertex_count() != other.vertex_count() {
            return false;
        }
        let mut mine: Vec<(&LabelBits, f64)> = self.edges().map(|e| (&self.clade[e], self.weight[e])).collect();
        let mut theirs: Vec<(&LabelBits, f64)> =
            other.edges().map(|e| (&other.clade[e], other.weight[e])).collect();
        mine.sort_by(|a, b| a.0.cmp(b.0));
        theirs.sort_by(|a, b| a.0.cmp(b.0));
        mine == theirs
    }

    /// Same shape and weights with every leaf label `l` replaced by `perm[l]`.
    ///
    /// `perm` has length `n + 1`; `perm[0]` is ignored.
    pub fn relabel(&self, perm: &[usize]) -> Result<Tree> {
        if perm.len() != self.n + 1 {
            return Err(Error::Size(format!("permutation of length {} for n={}", perm.len(), self.n)));
        }
        let mut raw = self.to_raw();
        fn walk(node: &mut RawNode, perm: &[usize]) {
            if let Some(l) = node.label {
                node.label = Some(perm[l]);
            }
            for c in &mut node.children {
                walk(c, perm);
            }
        }
        walk(&mut raw, perm);
        Tree::from_raw(raw)
    }

    /// Lowest common ancestor of two vertices.
    pub fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }
}

/// One cluster per internal edge; leaf singletons and the root are excluded.
pub fn clades(t: &Tree) -> ClusterSet {
    t.internal_edges().map(|e| t.clade[e].clone()).collect()
}

/// Length of the path between two leaves: edge count, or summed weights.
pub fn leaf_path_length(t: &Tree, a: usize, b: usize, weighted: bool) -> Result<f64> {
    let mut u = t.leaf_vertex(a)?;
    let mut v = t.leaf_vertex(b)?;
    let mut total = 0.0;
    let step = |x: VertexId| if weighted { t.weight[x] } else { 1.0 };
    while t.depth[u] > t.depth[v] {
        total += step(u);
        u = t.parent[u].unwrap();
    }
    while t.depth[v] > t.depth[u] {
        total += step(v);
        v = t.parent[v].unwrap();
    }
    while u != v {
        total += step(u) + step(v);
        u = t.parent[u].unwrap();
        v = t.parent[v].unwrap();
    }
    Ok(total)
}

/// Collapses internal edge `e`, merging its lower endpoint into the upper one.
pub fn contract(t: &Tree, e: EdgeId) -> Result<Tree> {
    if e == 0 || e >= t.vertex_count() {
        return Err(Error::NoSuchEdge(e));
    }
    if t.is_leaf(e) {
        return Err(Error::LeafEdge(e));
    }
    Tree::from_raw(t.raw_below(0, &|v| v == e))
}

/// `(2n - 3)!!`, the number of rooted binary topologies on `n` labeled leaves.
pub fn count_binary_topologies(n: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::Size(format!("need at least 2 leaves, got {n}")));
    }
    let mut acc: u64 = 1;
    let mut k: u64 = 2 * n as u64 - 3;
    while k > 1 {
        acc = acc
            .checked_mul(k)
            .ok_or_else(|| Error::Overflow(format!("(2n-3)!! for n={n} exceeds u64")))?;
        k -= 2;
    }
    Ok(acc)
}

/// Every rooted binary topology on `n <= 8` leaves, all edges of weight 1.
pub fn enumerate_binary_topologies(n: usize) -> Result<Vec<Tree>> {
    if !(2..=8).contains(&n) {
        return Err(Error::Size(format!("enumeration supports 2..=8 leaves, got {n}")));
    }
    // Stepwise addition: leaf k is grafted onto every edge of every tree on
    // k - 1 leaves, including a new edge above the root.
    let mut shapes = vec![RawNode::internal(vec![RawNode::leaf(1, 1.0), RawNode::leaf(2, 1.0)], 1.0)];
    for k in 3..=n {
        let mut next = Vec::new();
        for s in &shapes {
            let positions = count_positions(s);
            for p in 0..positions {
                let mut counter = p;
                next.push(graft(s, k, &mut counter));
            }
        }
        shapes = next;
    }
    shapes
        .into_iter()
        .map(|mut s| {
            s.weight = None;
            Tree::from_raw(s)
        })
        .collect()
}

fn count_positions(node: &RawNode) -> usize {
    1 + node.children.iter().map(count_positions).sum::<usize>()
}

/// Grafts leaf `k` onto the edge above the `counter`-th node in preorder.
fn graft(node: &RawNode, k: usize, counter: &mut usize) -> RawNode {
    if *counter == 0 {
        *counter = usize::MAX;
        let mut moved = node.clone();
        moved.weight = Some(1.0);
        return RawNode::internal(vec![moved, RawNode::leaf(k, 1.0)], 1.0);
    }
    if *counter != usize::MAX {
        *counter -= 1;
    }
    RawNode {
        label: node.label,
        weight: node.weight,
        children: node.children.iter().map(|c| graft(c, k, counter)).collect(),
    }
}

// ---------------------------------------------------------------------------
// Newick

/// Parses a rooted Newick string with integer leaf labels `1..n`.
pub fn parse_newick(text: &str) -> Result<Tree> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let root = p.subtree()?;
    p.skip_ws();
    p.expect(b';')?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing characters after ';'"));
    }
    if root.children.is_empty() {
        return Err(Error::Shape("a tree needs a parenthesized root".into()));
    }
    Tree::from_raw(root)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn subtree(&mut self) -> Result<RawNode> {
        self.skip_ws();
        let mut node = RawNode::default();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                loop {
                    node.children.push(self.subtree()?);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(self.err("unbalanced parentheses")),
                        _ => return Err(self.err("expected ',' or ')'")),
                    }
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let label = digits
                    .parse::<usize>()
                    .map_err(|_| Error::Syntax {
                        pos: start,
                        msg: format!("label {digits} out of range"),
                    })?;
                node.label = Some(label);
            }
            None => return Err(self.err("unexpected end of input")),
            _ => return Err(self.err("expected '(' or an integer leaf label")),
        }
        self.skip_ws();
        if self.peek() == Some(b':') {
            self.pos += 1;
            self.skip_ws();
            node.weight = Some(self.number()?);
        }
        Ok(node)
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, b'.' | b'-' | b'+' | b'e' | b'E'))
        {
            self.pos += 1;
        }
        let tok = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        tok.parse::<f64>().map_err(|_| Error::Syntax {
            pos: start,
            msg: format!("bad branch length {tok:?}"),
        })
    }
}

/// Writes `t` as Newick; children are ordered by their smallest leaf label.
pub fn serialize_newick(t: &Tree) -> String {
    let mut out = String::new();
    write_vertex(t, 0, &mut out);
    out.push(';');
    out
}

fn write_vertex(t: &Tree, v: VertexId, out: &mut String) {
    if let Some(l) = t.label[v] {
        let _ = write!(out, "{l}");
    } else {
        let mut kids: Vec<VertexId> = t.children[v].clone();
        kids.sort_by_key(|&c| t.clade[c].min_label());
        out.push('(');
        for (i, c) in kids.into_iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_vertex(t, c, out);
        }
        out.push(')');
    }
    if v != 0 {
        let _ = write!(out, ":{}", t.weight[v]);
    }
}

impl std::fmt::Display for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&serialize_newick(self))
    }
}

impl std::str::FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Tree> {
        parse_newick(s)
    }
}
