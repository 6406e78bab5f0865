//! Geodesic distance in tree space by the GTP algorithm.
//!
//! Shared splits are peeled off first, splitting the problem into two smaller
//! label sets. What remains is a pair of split sets with nothing in common,
//! where the geodesic support is grown from the cone path by repeatedly
//! solving the extension problem as a min-weight vertex cover.

use serde::Serialize;

use crate::bits::LabelBits;
use crate::error::{Error, Result};
use crate::maxflow::{build_incompat_graph, min_weight_vertex_cover_with, FLOW_FLOOR};
use crate::splits::{encode, split_index, Split, SplitVector, MAX_RANKED_N};
use crate::tree::Tree;

/// Numerical tolerances of the geodesic engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// A cover of weight at least `1 - cover_guard` means "no solution".
    pub cover_guard: f64,
    /// Relative slack when checking that norm ratios are non-decreasing.
    pub ratio: f64,
    /// Bottleneck floor handed to the max-flow engine.
    pub flow_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            cover_guard: 1e-12,
            ratio: 1e-9,
            flow_floor: FLOW_FLOOR,
        }
    }
}

pub type Block = Vec<(Split, f64)>;

fn block_norm(b: &[(Split, f64)]) -> f64 {
    b.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SupportPair {
    pub a: Block,
    pub b: Block,
}

impl SupportPair {
    pub fn norm_a(&self) -> f64 {
        block_norm(&self.a)
    }

    pub fn norm_b(&self) -> f64 {
        block_norm(&self.b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub pairs: Vec<SupportPair>,
}

impl Support {
    /// The single-pair support of the cone path.
    pub fn cone(a: Block, b: Block) -> Self {
        Support {
            pairs: vec![SupportPair { a, b }],
        }
    }
}

/// `‖a‖ + ‖b‖` over internal-edge weights.
pub fn cone_path_length(a: &SplitVector, b: &SplitVector) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    Ok(a.norm() + b.norm())
}

/// `sqrt(Σ (‖A_i‖ + ‖B_i‖)²)`.
pub fn support_length(s: &Support) -> f64 {
    s.pairs
        .iter()
        .map(|p| (p.norm_a() + p.norm_b()).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Blocks of a solved extension problem.
#[derive(Clone, Debug, PartialEq)]
pub struct Extension {
    pub c1: Block,
    pub c2: Block,
    pub d1: Block,
    pub d2: Block,
    pub cover_weight: f64,
}

pub fn extension_problem(p: &SupportPair) -> Result<Option<Extension>> {
    extension_problem_with(p, &Tolerances::default())
}

/// Solves the extension problem for one support pair.
///
/// Returns `None` when the minimum cover weighs at least 1 (within the guard).
pub fn extension_problem_with(p: &SupportPair, tol: &Tolerances) -> Result<Option<Extension>> {
    let g = build_incompat_graph(&p.a, &p.b)?;
    let cover = min_weight_vertex_cover_with(&g, tol.flow_floor);
    if cover.weight >= 1.0 - tol.cover_guard {
        return Ok(None);
    }
    let mut in_left = vec![false; p.a.len()];
    for &i in &cover.left {
        in_left[i] = true;
    }
    let mut in_right = vec![false; p.b.len()];
    for &j in &cover.right {
        in_right[j] = true;
    }
    let pick = |blk: &Block, mask: &[bool], keep: bool| -> Block {
        blk.iter()
            .zip(mask)
            .filter(|(_, &m)| m == keep)
            .map(|(e, _)| e.clone())
            .collect()
    };
    let ext = Extension {
        c1: pick(&p.a, &in_left, true),
        c2: pick(&p.a, &in_left, false),
        d1: pick(&p.b, &in_right, false),
        d2: pick(&p.b, &in_right, true),
        cover_weight: cover.weight,
    };
    if ext.c1.is_empty() {
        return Err(Error::DegenerateCover(ext.d1[0].0.to_string()));
    }
    if ext.d2.is_empty() {
        return Err(Error::DegenerateCover(ext.c2[0].0.to_string()));
    }
    Ok(Some(ext))
}

/// Replaces pair `i` by `(C1, D1), (C2, D2)` and re-checks the support.
pub fn refine_support(s: &Support, i: usize, ext: &Extension) -> Result<Support> {
    refine_support_with(s, i, ext, &Tolerances::default())
}

pub fn refine_support_with(s: &Support, i: usize, ext: &Extension, tol: &Tolerances) -> Result<Support> {
    if i >= s.pairs.len() {
        return Err(Error::InternalInvariant(format!("pair {i} out of range")));
    }
    let mut pairs = Vec::with_capacity(s.pairs.len() + 1);
    pairs.extend_from_slice(&s.pairs[..i]);
    pairs.push(SupportPair {
        a: ext.c1.clone(),
        b: ext.d1.clone(),
    });
    pairs.push(SupportPair {
        a: ext.c2.clone(),
        b: ext.d2.clone(),
    });
    pairs.extend_from_slice(&s.pairs[i + 1..]);
    let out = Support { pairs };
    check_p1(&out)?;
    check_p2(&out, tol.ratio)?;
    Ok(out)
}

/// Later `A` blocks must be compatible with earlier `B` blocks.
pub fn check_p1(s: &Support) -> Result<()> {
    for (j, pj) in s.pairs.iter().enumerate() {
        for pi in &s.pairs[j + 1..] {
            for (x, _) in &pi.a {
                for (y, _) in &pj.b {
                    if !x.compatible_with(y) {
                        return Err(Error::InternalInvariant(format!(
                            "cross-compatibility fails between {x} and {y}"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Ratios `‖A_i‖ / ‖B_i‖` must be non-decreasing.
pub fn check_p2(s: &Support, rel: f64) -> Result<()> {
    for w in s.pairs.windows(2) {
        // Cross-multiplied to avoid dividing by tiny norms.
        let lhs = w[0].norm_a() * w[1].norm_b();
        let rhs = w[1].norm_a() * w[0].norm_b();
        if lhs > rhs * (1.0 + rel) + f64::MIN_POSITIVE {
            return Err(Error::InternalInvariant(format!(
                "norm ratios decrease: {} > {}",
                w[0].norm_a() / w[0].norm_b(),
                w[1].norm_a() / w[1].norm_b()
            )));
        }
    }
    Ok(())
}

/// Runs the GTP loop on two non-empty split sets with no split in common.
pub fn gtp_support(a: Block, b: Block, tol: &Tolerances) -> Result<Support> {
    let cap = a.len().min(b.len());
    let mut support = Support::cone(a, b);
    let mut i = 0;
    while i < support.pairs.len() {
        match extension_problem_with(&support.pairs[i], tol)? {
            Some(ext) => {
                if support.pairs.len() + 1 > cap {
                    return Err(Error::IterationCap(format!(
                        "support would grow past {cap} pairs"
                    )));
                }
                support = refine_support_with(&support, i, &ext, tol)?;
            }
            None => i += 1,
        }
    }
    Ok(support)
}

/// Geodesic between two vectors with disjoint, non-empty split sets.
pub fn gtp_disjoint(a: &SplitVector, b: &SplitVector) -> Result<GeodesicResult> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch(a.n(), b.n()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySide);
    }
    if let Some((s, _)) = a.iter().find(|(s, _)| b.get(s).is_some()) {
        return Err(Error::InvalidVector(format!("split {s} is shared")));
    }
    let tol = Tolerances::default();
    let support = gtp_support(to_block(a), to_block(b), &tol)?;
    let term = support_length(&support).powi(2);
    Ok(GeodesicResult {
        distance: term.sqrt(),
        components: vec![Component {
            shared_split: None,
            support: support.pairs.iter().map(|p| pair_ref(p, &|s| s.clone())).collect(),
            term,
        }],
        notes: Vec::new(),
    })
}

fn to_block(v: &SplitVector) -> Block {
    v.iter().map(|(s, w)| (s.clone(), w)).collect()
}

// ---------------------------------------------------------------------------
// Results

/// How a split is named in a result: its canonical index when it fits in
/// `u128`, otherwise its canonical side.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SplitRef {
    Index(u128),
    Side(String),
}

impl SplitRef {
    pub fn of(s: &Split) -> Self {
        if s.n() <= MAX_RANKED_N {
            if let Ok(i) = split_index(s) {
                return SplitRef::Index(i);
            }
        }
        SplitRef::Side(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRef {
    #[serde(rename = "A")]
    pub a: Vec<SplitRef>,
    #[serde(rename = "B")]
    pub b: Vec<SplitRef>,
}

/// One term of the distance: either a shared split's weight difference or
/// a disjoint sub-problem with its final support.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Component {
    pub shared_split: Option<SplitRef>,
    pub support: Vec<PairRef>,
    /// Contribution to the squared distance.
    pub term: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeodesicResult {
    pub distance: f64,
    pub components: Vec<Component>,
    pub notes: Vec<String>,
}

fn pair_ref(p: &SupportPair, orig: &dyn Fn(&Split) -> Split) -> PairRef {
    PairRef {
        a: p.a.iter().map(|(s, _)| SplitRef::of(&orig(s))).collect(),
        b: p.b.iter().map(|(s, _)| SplitRef::of(&orig(s))).collect(),
    }
}

// ---------------------------------------------------------------------------
// Shared-split decomposition

/// A sub-problem over a relabelled label set `{0..n}`.
///
/// `origin[l]` is the set of original leaf labels that local label `l`
/// stands for; `origin[0]` is unused.
#[derive(Clone, Debug)]
pub struct SubProblem {
    pub n: usize,
    pub top_n: usize,
    pub a: Block,
    pub b: Block,
    pub origin: Vec<LabelBits>,
}

impl SubProblem {
    pub fn new(a: &SplitVector, b: &SplitVector) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::SizeMismatch(a.n(), b.n()));
        }
        let n = a.n();
        Ok(SubProblem {
            n,
            top_n: n,
            a: to_block(a),
            b: to_block(b),
            origin: (0..=n).map(|l| LabelBits::singleton(n, l)).collect(),
        })
    }

    /// Original split behind a local one.
    pub fn original(&self, s: &Split) -> Split {
        let mut clade = LabelBits::empty(self.top_n);
        for l in s.clade().iter() {
            clade.union_with(&self.origin[l]);
        }
        Split::from_clade(self.top_n, &clade).expect("local split maps to a valid split")
    }

    /// Cuts the problem at `s`, which must be compatible with every split.
    ///
    /// The inner problem keeps the labels of `s`'s clade and uses 0 for the
    /// cut point. The outer problem contracts the clade to its smallest label.
    pub fn split_at(&self, s: &Split) -> (SubProblem, SubProblem) {
        let d = s.clade();
        let inner_labels: Vec<usize> = d.iter().collect();
        let cut = inner_labels[0];
        let outer_labels: Vec<usize> = (1..=self.n).filter(|&l| l == cut || !d.contains(l)).collect();

        let relabel = |labels: &[usize], m: usize, set: &LabelBits| -> LabelBits {
            LabelBits::from_labels(
                m,
                labels.iter().enumerate().filter(|(_, &l)| set.contains(l)).map(|(k, _)| k + 1),
            )
        };
        let origin_of = |labels: &[usize], merged: Option<&LabelBits>| -> Vec<LabelBits> {
            let mut o = vec![LabelBits::empty(self.top_n)];
            for &l in labels {
                match merged {
                    Some(dset) if l == cut => {
                        let mut u = LabelBits::empty(self.top_n);
                        for x in dset.iter() {
                            u.union_with(&self.origin[x]);
                        }
                        o.push(u);
                    }
                    _ => o.push(self.origin[l].clone()),
                }
            }
            o
        };

        let n_in = inner_labels.len();
        let n_out = outer_labels.len();
        let mut inner = SubProblem {
            n: n_in,
            top_n: self.top_n,
            a: Vec::new(),
            b: Vec::new(),
            origin: origin_of(&inner_labels, None),
        };
        let mut outer = SubProblem {
            n: n_out,
            top_n: self.top_n,
            a: Vec::new(),
            b: Vec::new(),
            origin: origin_of(&outer_labels, Some(d)),
        };

        for (src, side) in [(&self.a, 0), (&self.b, 1)] {
            for (x, w) in src {
                if x == s {
                    continue;
                }
                let k = x.clade();
                let (target, clade) = if k.is_subset(d) {
                    (&mut inner, relabel(&inner_labels, n_in, k))
                } else if k.is_disjoint(d) {
                    (&mut outer, relabel(&outer_labels, n_out, k))
                } else {
                    let mut folded = k.difference(d);
                    folded.insert(cut);
                    (&mut outer, relabel(&outer_labels, n_out, &folded))
                };
                let local = Split::from_clade(target.n, &clade).expect("relabelled split is valid");
                if side == 0 {
                    target.a.push((local, *w));
                } else {
                    target.b.push((local, *w));
                }
            }
        }
        for p in [&mut inner, &mut outer] {
            p.a.sort_by(|x, y| x.0.cmp(&y.0));
            p.b.sort_by(|x, y| x.0.cmp(&y.0));
        }
        (inner, outer)
    }

    /// Lowest split that is in both sets, or in one set and compatible with
    /// the whole other set.
    fn shared_candidate(&self) -> Option<Split> {
        let shared_in = |s: &Split, other: &Block| {
            other.binary_search_by(|(o, _)| o.cmp(s)).is_ok()
                || other.iter().all(|(o, _)| o.compatible_with(s))
        };
        let from_a = self.a.iter().find(|(s, _)| shared_in(s, &self.b)).map(|(s, _)| s);
        let from_b = self.b.iter().find(|(s, _)| shared_in(s, &self.a)).map(|(s, _)| s);
        match (from_a, from_b) {
            (Some(x), Some(y)) => Some(x.min(y).clone()),
            (x, y) => x.or(y).cloned(),
        }
    }

    fn weight_in(block: &Block, s: &Split) -> f64 {
        block
            .binary_search_by(|(o, _)| o.cmp(s))
            .map_or(0.0, |i| block[i].1)
    }
}

/// Cuts both trees at a split they share.
pub fn common_edge_split(t1: &Tree, t2: &Tree, s: &Split) -> Result<(SubProblem, SubProblem)> {
    let (a, b) = (encode(t1), encode(t2));
    if a.get(s).is_none() || b.get(s).is_none() {
        return Err(Error::NotShared(s.to_string()));
    }
    Ok(SubProblem::new(&a, &b)?.split_at(s))
}

fn solve(p: SubProblem, tol: &Tolerances, out: &mut Vec<Component>) -> Result<()> {
    if p.a.is_empty() && p.b.is_empty() {
        return Ok(());
    }
    let orig = |s: &Split| p.original(s);
    if p.a.is_empty() || p.b.is_empty() {
        let pair = SupportPair {
            a: p.a.clone(),
            b: p.b.clone(),
        };
        out.push(Component {
            shared_split: None,
            term: (pair.norm_a() + pair.norm_b()).powi(2),
            support: vec![pair_ref(&pair, &orig)],
        });
        return Ok(());
    }
    match p.shared_candidate() {
        Some(s) => {
            let diff = SubProblem::weight_in(&p.a, &s) - SubProblem::weight_in(&p.b, &s);
            out.push(Component {
                shared_split: Some(SplitRef::of(&p.original(&s))),
                support: Vec::new(),
                term: diff * diff,
            });
            let (inner, outer) = p.split_at(&s);
            solve(inner, tol, out)?;
            solve(outer, tol, out)
        }
        None => {
            let support = gtp_support(p.a.clone(), p.b.clone(), tol)?;
            out.push(Component {
                shared_split: None,
                term: support_length(&support).powi(2),
                support: support.pairs.iter().map(|q| pair_ref(q, &orig)).collect(),
            });
            Ok(())
        }
    }
}

/// Geodesic between two split vectors over the same label set.
pub fn geodesic_vectors(a: &SplitVector, b: &SplitVector, tol: &Tolerances) -> Result<GeodesicResult> {
    let mut components = Vec::new();
    solve(SubProblem::new(a, b)?, tol, &mut components)?;
    let distance = components.iter().map(|c| c.term).sum::<f64>().sqrt();
    Ok(GeodesicResult {
        distance,
        components,
        notes: Vec::new(),
    })
}

pub fn geodesic_distance(t1: &Tree, t2: &Tree) -> Result<GeodesicResult> {
    geodesic_distance_with(t1, t2, &Tolerances::default())
}

/// Geodesic distance between two trees; leaf edges do not contribute.
pub fn geodesic_distance_with(t1: &Tree, t2: &Tree, tol: &Tolerances) -> Result<GeodesicResult> {
    if t1.n() != t2.n() {
        return Err(Error::LabelSetMismatch(t1.n(), t2.n()));
    }
    let mut r = geodesic_vectors(&encode(t1), &encode(t2), tol)?;
    let mut leaf2 = 0.0;
    for l in 1..=t1.n() {
        let d = t1.weight(t1.leaf_vertex(l)?) - t2.weight(t2.leaf_vertex(l)?);
        leaf2 += d * d;
    }
    if leaf2 > 0.0 {
        r.notes.push(format!(
            "leaf-edge weights differ (norm {}); not included in the distance",
            leaf2.sqrt()
        ));
    }
    Ok(r)
}
