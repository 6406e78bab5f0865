//! Classic tree comparison metrics.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bits::LabelBits;
use crate::error::{Error, Result};
use crate::tree::{clades, Tree, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    Ambiguous,
    NotSymmetricInput,
    Degenerate,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Ambiguous => "ambiguous",
            Flag::NotSymmetricInput => "not-symmetric-input",
            Flag::Degenerate => "degenerate",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceReport {
    pub metric: String,
    pub value: f64,
    pub flags: BTreeSet<Flag>,
    pub notes: Vec<String>,
}

impl DistanceReport {
    pub fn new(metric: &str, value: f64) -> Self {
        DistanceReport {
            metric: metric.to_string(),
            value,
            flags: BTreeSet::new(),
            notes: Vec::new(),
        }
    }

    fn flag(&mut self, f: Flag, note: String) {
        self.flags.insert(f);
        self.notes.push(note);
    }
}

fn same_labels(a: &Tree, b: &Tree) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::LabelSetMismatch(a.n(), b.n()));
    }
    Ok(())
}

/// Size of the symmetric difference of the cluster sets.
pub fn rf(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let (ca, cb) = (clades(a), clades(b));
    Ok(DistanceReport::new("rf", ca.symmetric_difference(&cb).count() as f64))
}

/// Minimal tree whose clusters are those shared by every input.
///
/// Edge weights, leaf edges included, come from the first tree.
pub fn strict_consensus(ts: &[Tree]) -> Result<Tree> {
    let first = ts.first().ok_or_else(|| Error::Size("consensus of no trees".into()))?;
    for t in &ts[1..] {
        same_labels(first, t)?;
    }
    let mut shared = clades(first);
    for t in &ts[1..] {
        let other = clades(t);
        shared.retain(|c| other.contains(c));
    }
    let clusters: Vec<(LabelBits, f64)> = first
        .internal_edges()
        .filter(|&e| shared.contains(first.clade(e)))
        .map(|e| (first.clade(e).clone(), first.weight(e)))
        .collect();
    Tree::from_clusters(first.n(), &clusters, &|l| {
        first.weight(first.leaf_vertex(l).expect("label in range"))
    })
}

/// Unordered bipartition of the leaf labels induced by the edge above `v`,
/// named by the block without label 1.
fn partition_key(t: &Tree, v: VertexId) -> LabelBits {
    let c = t.clade(v);
    if c.contains(1) {
        c.complement_in(&LabelBits::leaves(t.n()))
    } else {
        c.clone()
    }
}

/// Robinson-Foulds length over all edges, leaf edges included.
///
/// Edges are matched by equal clades. The report is flagged when matching by
/// leaf bipartition instead would be ambiguous.
pub fn rfl(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let by_clade = |t: &Tree| -> BTreeMap<LabelBits, f64> { t.edges().map(|e| (t.clade(e).clone(), t.weight(e))).collect() };
    let (ma, mb) = (by_clade(a), by_clade(b));
    // Summing over the sorted union keeps the value independent of argument order.
    let union: BTreeSet<&LabelBits> = ma.keys().chain(mb.keys()).collect();
    let value = union
        .into_iter()
        .map(|c| (ma.get(c).copied().unwrap_or(0.0) - mb.get(c).copied().unwrap_or(0.0)).abs())
        .sum();
    let mut r = DistanceReport::new("rfl", value);

    let count = |t: &Tree| -> BTreeMap<LabelBits, usize> {
        let mut m = BTreeMap::new();
        for e in t.edges() {
            *m.entry(partition_key(t, e)).or_insert(0) += 1;
        }
        m
    };
    let (pa, pb) = (count(a), count(b));
    let mut ambiguous = Vec::new();
    let mut one_sided = false;
    let mut keys: Vec<&LabelBits> = pa.keys().filter(|k| pb.contains_key(k)).collect();
    keys.sort();
    for k in keys {
        let (x, y) = (pa[k], pb[k]);
        if x > 1 || y > 1 {
            ambiguous.push(format!("{k} ({x} edge(s) vs {y})"));
            if x != y {
                one_sided = true;
            }
        }
    }
    if !ambiguous.is_empty() {
        r.flag(
            Flag::Ambiguous,
            format!(
                "bipartition matching is not unique for {}; value uses clade matching",
                ambiguous.join(", ")
            ),
        );
    }
    if one_sided {
        r.flag(
            Flag::NotSymmetricInput,
            "the two matching directions differ in multiplicity".into(),
        );
    }
    Ok(r)
}

// ---------------------------------------------------------------------------
// Quartets and triplets

/// All-pairs leaf distances indexed by label, via the ancestor walk.
fn leaf_distances(t: &Tree, weighted: bool) -> Vec<Vec<f64>> {
    let n = t.n();
    let mut up = vec![0.0; t.vertex_count()];
    for v in 1..t.vertex_count() {
        let p = t.parent(v).unwrap();
        up[v] = up[p] + if weighted { t.weight(v) } else { 1.0 };
    }
    let leaf: Vec<VertexId> = (0..=n).map(|l| if l == 0 { 0 } else { t.leaf_vertex(l).unwrap() }).collect();
    let mut d = vec![vec![0.0; n + 1]; n + 1];
    for i in 1..=n {
        for j in i + 1..=n {
            let m = t.lca(leaf[i], leaf[j]);
            let x = up[leaf[i]] + up[leaf[j]] - 2.0 * up[m];
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    d
}

/// Depth of `lca(i, j)` for all label pairs.
fn lca_depths(t: &Tree) -> Vec<Vec<usize>> {
    let n = t.n();
    let leaf: Vec<VertexId> = (0..=n).map(|l| if l == 0 { 0 } else { t.leaf_vertex(l).unwrap() }).collect();
    let mut d = vec![vec![0; n + 1]; n + 1];
    for i in 1..=n {
        for j in i + 1..=n {
            let x = t.depth(t.lca(leaf[i], leaf[j]));
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    d
}

/// Quartet class: 0 = ab|cd, 1 = ac|bd, 2 = ad|bc, 3 = star.
fn quartet_class(d: &[Vec<f64>], [a, b, c, e]: [usize; 4]) -> u8 {
    let s = [d[a][b] + d[c][e], d[a][c] + d[b][e], d[a][e] + d[b][c]];
    let min = s[0].min(s[1]).min(s[2]);
    let hits: Vec<usize> = (0..3).filter(|&i| s[i] == min).collect();
    if hits.len() == 1 {
        hits[0] as u8
    } else {
        3
    }
}

/// Triplet class: 0 = ab|c, 1 = ac|b, 2 = bc|a, 3 = unresolved.
fn triplet_class(d: &[Vec<usize>], [a, b, c]: [usize; 3]) -> u8 {
    let (ab, ac, bc) = (d[a][b], d[a][c], d[b][c]);
    if ab > ac && ab > bc {
        0
    } else if ac > ab && ac > bc {
        1
    } else if bc > ab && bc > ac {
        2
    } else {
        3
    }
}

/// Number of 4-label subsets whose unrooted restrictions differ.
pub fn quartet(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let n = a.n();
    if n < 4 {
        return Err(Error::Size(format!("quartets need n >= 4, got {n}")));
    }
    let (da, db) = (leaf_distances(a, false), leaf_distances(b, false));
    let mut diff = 0u64;
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                for l in k + 1..=n {
                    let q = [i, j, k, l];
                    if quartet_class(&da, q) != quartet_class(&db, q) {
                        diff += 1;
                    }
                }
            }
        }
    }
    Ok(DistanceReport::new("quartet", diff as f64))
}

/// Number of 3-label subsets whose rooted restrictions differ.
pub fn triplet(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let n = a.n();
    if n < 3 {
        return Err(Error::Size(format!("triplets need n >= 3, got {n}")));
    }
    let (da, db) = (lca_depths(a), lca_depths(b));
    let mut diff = 0u64;
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                if triplet_class(&da, [i, j, k]) != triplet_class(&db, [i, j, k]) {
                    diff += 1;
                }
            }
        }
    }
    Ok(DistanceReport::new("triplet", diff as f64))
}

/// Over triplets `i < j < k` with agreeing topology, the path-length
/// differences of `(i, j)` and `(i, k)`.
pub fn triplet_length(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let n = a.n();
    if n < 3 {
        return Err(Error::Size(format!("triplets need n >= 3, got {n}")));
    }
    let (da, db) = (lca_depths(a), lca_depths(b));
    let (wa, wb) = (leaf_distances(a, true), leaf_distances(b, true));
    let mut total = 0.0;
    for i in 1..=n {
        for j in i + 1..=n {
            for k in j + 1..=n {
                if triplet_class(&da, [i, j, k]) == triplet_class(&db, [i, j, k]) {
                    total += (wa[i][j] - wb[i][j]).abs() + (wa[i][k] - wb[i][k]).abs();
                }
            }
        }
    }
    Ok(DistanceReport::new("triplet-length", total))
}

// ---------------------------------------------------------------------------
// Agreement subtrees

/// Largest label count handled by [`mast`].
pub const MAST_MAX_N: usize = 16;

/// `n - t` where `t` is the size of a largest leaf set on which both trees
/// restrict to the same rooted topology. Exhaustive search.
pub fn mast(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let n = a.n();
    if n > MAST_MAX_N {
        return Err(Error::Size(format!("exhaustive agreement search is capped at n={MAST_MAX_N}")));
    }
    let masks = |t: &Tree| -> Vec<u32> {
        clades(t)
            .iter()
            .map(|c| c.iter().fold(0u32, |m, l| m | 1 << (l - 1)))
            .collect()
    };
    let (ma, mb) = (masks(a), masks(b));
    let restrict = |cs: &[u32], set: u32| -> Vec<u32> {
        let size = set.count_ones();
        let mut r: Vec<u32> = cs
            .iter()
            .map(|c| c & set)
            .filter(|x| x.count_ones() >= 2 && x.count_ones() < size)
            .collect();
        r.sort_unstable();
        r.dedup();
        r
    };
    let full: u32 = (1 << n) - 1;
    let mut by_size: Vec<Vec<u32>> = vec![Vec::new(); n + 1];
    for s in 0..=full {
        by_size[s.count_ones() as usize].push(s);
    }
    for t in (1..=n).rev() {
        if let Some(&best) = by_size[t].iter().find(|&&s| restrict(&ma, s) == restrict(&mb, s)) {
            let mut r = DistanceReport::new("mast", (n - t) as f64);
            let labels: Vec<usize> = (0..n).filter(|i| best & (1 << i) != 0).map(|i| i + 1).collect();
            r.notes.push(format!("agreement leaf set {labels:?}"));
            return Ok(r);
        }
    }
    unreachable!("single leaves always agree")
}

// ---------------------------------------------------------------------------
// Align

fn jaccard(x: &LabelBits, y: &LabelBits) -> f64 {
    let u = x.union(y).len();
    if u == 0 {
        0.0
    } else {
        x.intersection(y).len() as f64 / u as f64
    }
}

/// Score of aligning the edge above `u` in `a` with the edge above `v` in `b`.
pub fn align_pair_score(a: &Tree, u: VertexId, b: &Tree, v: VertexId) -> f64 {
    let all = LabelBits::leaves(a.n());
    let p = [a.clade(u).clone(), a.clade(u).complement_in(&all)];
    let q = [b.clade(v).clone(), b.clade(v).complement_in(&all)];
    let s = |r: usize, t: usize| jaccard(&p[r], &q[t]);
    (s(0, 0).min(s(1, 1))).max(s(0, 1).min(s(1, 0)))
}

/// Square score matrix between internal edges, padded with zero rows or
/// columns when the edge counts differ.
pub fn align_matrix(a: &Tree, b: &Tree) -> Vec<Vec<f64>> {
    let ea: Vec<VertexId> = a.internal_edges().collect();
    let eb: Vec<VertexId> = b.internal_edges().collect();
    let k = ea.len().max(eb.len());
    let mut m = vec![vec![0.0; k]; k];
    for (i, &u) in ea.iter().enumerate() {
        for (j, &v) in eb.iter().enumerate() {
            m[i][j] = align_pair_score(a, u, b, v);
        }
    }
    m
}

/// Best total score of a one-to-one pairing of internal edges.
///
/// This is a similarity: equal trees score their internal edge count.
pub fn align(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let m = align_matrix(a, b);
    let (_, total) = max_assignment(&m);
    let mut r = DistanceReport::new("align-score", total);
    let (ka, kb) = (a.internal_edges().count(), b.internal_edges().count());
    if ka != kb {
        r.flag(
            Flag::Degenerate,
            format!("internal edge counts differ ({ka} vs {kb}); padded with zero-score edges"),
        );
    }
    Ok(r)
}

/// Hungarian method on a square matrix, maximizing the total.
///
/// Returns the column assigned to each row and the total.
pub fn max_assignment(m: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let k = m.len();
    if k == 0 {
        return (Vec::new(), 0.0);
    }
    let top = m.iter().flatten().fold(f64::NEG_INFINITY, |x, &y| x.max(y));
    let cost = |i: usize, j: usize| top - m[i][j];
    // Potentials and matching, 1-based with column 0 as the virtual start.
    let mut u = vec![0.0; k + 1];
    let mut v = vec![0.0; k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=k {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut rows = vec![0usize; k];
    for j in 1..=k {
        rows[p[j] - 1] = j - 1;
    }
    let total = rows.iter().enumerate().map(|(i, &j)| m[i][j]).sum();
    (rows, total)
}

// ---------------------------------------------------------------------------
// Path-based metrics

/// Mean over label pairs of `|d_a - d_b|^k` on unweighted path lengths,
/// scaled by `2 / (n (n - 1))`.
pub fn node_dist(a: &Tree, b: &Tree, k: u32) -> Result<DistanceReport> {
    same_labels(a, b)?;
    if !(1..=2).contains(&k) {
        return Err(Error::Domain(format!("node distance exponent {k} (expected 1 or 2)")));
    }
    let n = a.n();
    let (da, db) = (leaf_distances(a, false), leaf_distances(b, false));
    let mut sum = 0.0;
    for i in 1..=n {
        for j in i + 1..=n {
            sum += (da[i][j] - db[i][j]).abs().powi(k as i32);
        }
    }
    let name = if k == 1 { "node" } else { "node2" };
    Ok(DistanceReport::new(name, 2.0 * sum / (n * (n - 1)) as f64))
}

/// Class values for the internal vertices of one tree, keyed by cluster.
///
/// Vertices without an explicit entry get `depth + 1`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClassAssignment {
    pub classes: BTreeMap<LabelBits, u32>,
}

impl ClassAssignment {
    pub fn new(classes: BTreeMap<LabelBits, u32>) -> Self {
        ClassAssignment { classes }
    }

    /// Class of every vertex of `t` (0 for leaves), after validation.
    pub fn resolve(&self, t: &Tree) -> Result<Vec<u32>> {
        let mut by_cluster: BTreeMap<&LabelBits, VertexId> = BTreeMap::new();
        for v in 0..t.vertex_count() {
            if !t.is_leaf(v) {
                by_cluster.insert(t.clade(v), v);
            }
        }
        let mut class: Vec<u32> = (0..t.vertex_count())
            .map(|v| if t.is_leaf(v) { 0 } else { t.depth(v) as u32 + 1 })
            .collect();
        for (c, &k) in &self.classes {
            let v = by_cluster.get(c).ok_or_else(|| Error::UnknownCluster(c.to_string()))?;
            if k == 0 {
                return Err(Error::NonMonotoneClasses(format!("class of {c} must be positive")));
            }
            class[*v] = k;
        }
        // Depth order must imply class order: group internal vertices by depth.
        let mut levels: BTreeMap<usize, (u32, u32, VertexId)> = BTreeMap::new();
        for v in (0..t.vertex_count()).filter(|&v| !t.is_leaf(v)) {
            let e = levels.entry(t.depth(v)).or_insert((u32::MAX, 0, v));
            e.0 = e.0.min(class[v]);
            e.1 = e.1.max(class[v]);
        }
        let mut prev_max: Option<(usize, u32)> = None;
        for (depth, (lo, hi, v)) in levels {
            if lo != hi {
                return Err(Error::NonMonotoneClasses(format!(
                    "vertices at depth {depth} carry classes {lo} and {hi}"
                )));
            }
            if let Some((d0, m)) = prev_max {
                if m > lo {
                    return Err(Error::NonMonotoneClasses(format!(
                        "depth {d0} has class {m} above depth {depth} class {lo} (at {})",
                        t.clade(v)
                    )));
                }
            }
            prev_max = Some((depth, hi));
        }
        Ok(class)
    }
}

fn cophenetic_values(t: &Tree, class: &[u32]) -> Vec<f64> {
    let n = t.n();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 1..=n {
        for j in i + 1..=n {
            let m = t.lca(t.leaf_vertex(i).unwrap(), t.leaf_vertex(j).unwrap());
            out.push(class[m] as f64);
        }
    }
    out
}

/// Pearson correlation of the two cophenetic matrices over pairs `i < j`.
///
/// A constant matrix gives `NaN` with the degenerate flag.
pub fn cophenetic(
    a: &Tree,
    b: &Tree,
    ca: Option<&ClassAssignment>,
    cb: Option<&ClassAssignment>,
) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let default = ClassAssignment::default();
    let xa = cophenetic_values(a, &ca.unwrap_or(&default).resolve(a)?);
    let xb = cophenetic_values(b, &cb.unwrap_or(&default).resolve(b)?);
    let len = xa.len() as f64;
    let (ma, mb) = (xa.iter().sum::<f64>() / len, xb.iter().sum::<f64>() / len);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in xa.iter().zip(&xb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        let mut r = DistanceReport::new("cophenetic", f64::NAN);
        r.flag(
            Flag::Degenerate,
            "a cophenetic matrix is constant; correlation undefined".into(),
        );
        return Ok(r);
    }
    Ok(DistanceReport::new("cophenetic", sab / (saa * sbb).sqrt()))
}

/// `1 - (S(a,b) + S(b,a)) / 2` with `S(x,y) = M_xy / M_xx`.
pub fn similarity_prob(a: &Tree, b: &Tree) -> Result<DistanceReport> {
    same_labels(a, b)?;
    let mass = |t: &Tree| -> Result<(BTreeMap<LabelBits, f64>, f64)> {
        let l = t.total_length();
        if l <= 0.0 {
            return Err(Error::ZeroLengthTree);
        }
        let mut m = BTreeMap::new();
        for e in t.edges() {
            *m.entry(partition_key(t, e)).or_insert(0.0) += t.weight(e);
        }
        Ok((m, l))
    };
    let ((wa, la), (wb, lb)) = (mass(a)?, mass(b)?);
    let m = |x: &BTreeMap<LabelBits, f64>, lx: f64, y: &BTreeMap<LabelBits, f64>, ly: f64| {
        x.iter().filter_map(|(k, w)| y.get(k).map(|v| w * v)).sum::<f64>() / (lx * ly)
    };
    let (mab, maa, mbb) = (m(&wa, la, &wb, lb), m(&wa, la, &wa, la), m(&wb, lb, &wb, lb));
    let value = 1.0 - (mab / maa + mab / mbb) / 2.0;
    Ok(DistanceReport::new("simprob", value))
}
