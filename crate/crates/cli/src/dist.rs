//! The `dist` subcommand.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;

use treedist::batch::pairwise_matrix;
use treedist::geodesic::{cone_path_length, geodesic_distance_with, geodesic_vectors, Tolerances};
use treedist::metrics::{self, ClassAssignment, DistanceReport};
use treedist::splits::SplitVector;
use treedist::{LabelBits, Tree};

use crate::input::{self, Entry, Item};
use crate::output::{self, PairNote, Report};
use crate::{CliError, DistArgs, Format, Metric};

#[derive(Clone)]
struct Cell {
    value: f64,
    flags: Vec<String>,
    notes: Vec<String>,
}

impl From<DistanceReport> for Cell {
    fn from(r: DistanceReport) -> Self {
        Cell {
            value: r.value,
            flags: r.flags.iter().map(|f| f.as_str().to_string()).collect(),
            notes: r.notes,
        }
    }
}

enum Operand {
    Tree(Tree, ClassAssignment),
    Vector(SplitVector),
}

fn metric_name(m: Metric) -> &'static str {
    match m {
        Metric::Rf => "rf",
        Metric::Rfl => "rfl",
        Metric::Quartet => "quartet",
        Metric::Triplet => "triplet",
        Metric::TripletLength => "triplet-length",
        Metric::Mast => "mast",
        Metric::Align => "align",
        Metric::Node => "node",
        Metric::Node2 => "node2",
        Metric::Cophenetic => "cophenetic",
        Metric::Simprob => "simprob",
        Metric::Geodesic => "geodesic",
        Metric::Cone => "cone",
    }
}

fn tolerances(args: &DistArgs) -> Result<Tolerances, CliError> {
    let d = Tolerances::default();
    let pick = |flag: &str, v: Option<f64>, default: f64| match v {
        Some(x) if !(x.is_finite() && x >= 0.0) => Err(CliError::Input(format!("--{flag} must be finite and non-negative"))),
        Some(x) => Ok(x),
        None => Ok(default),
    };
    Ok(Tolerances {
        cover_guard: pick("tol-guard", args.tol_guard, d.cover_guard)?,
        ratio: pick("tol-ratio", args.tol_ratio, d.ratio)?,
        flow_floor: pick("tol-flow", args.tol_flow, d.flow_floor)?,
    })
}

/// Per-tree class assignments; each map line applies to every tree that has
/// the cluster as an internal vertex.
fn class_maps(path: &str, trees: &[Tree]) -> Result<Vec<ClassAssignment>, CliError> {
    let lines = input::parse_class_map(path, trees[0].n())?;
    let mut out = Vec::with_capacity(trees.len());
    let mut used = BTreeSet::new();
    for t in trees {
        let internal: BTreeSet<&LabelBits> = (0..t.vertex_count()).filter(|&v| !t.is_leaf(v)).map(|v| t.clade(v)).collect();
        let mut classes = BTreeMap::new();
        for (no, c, k) in &lines {
            if internal.contains(c) {
                classes.insert(c.clone(), *k);
                used.insert(*no);
            }
        }
        out.push(ClassAssignment::new(classes));
    }
    if let Some((no, c, _)) = lines.iter().find(|(no, _, _)| !used.contains(no)) {
        return Err(CliError::Input(format!("{path}:{no}: cluster {c} is not a vertex of any input tree")));
    }
    Ok(out)
}

fn operands(args: &DistArgs, metric: Metric, entries: &[Entry]) -> Result<Vec<Operand>, CliError> {
    let vectors = matches!(metric, Metric::Geodesic | Metric::Cone)
        && (metric == Metric::Cone || entries.iter().any(|e| matches!(e.item, Item::Vector(_))));
    if vectors {
        return Ok(entries.iter().map(|e| Operand::Vector(e.vector())).collect());
    }
    let trees: Vec<Tree> = entries.iter().map(Entry::tree).collect::<Result<_, _>>()?;
    let classes = match (&args.class_map, metric) {
        (Some(path), Metric::Cophenetic) => class_maps(path, &trees)?,
        (Some(_), _) => return Err(CliError::Input("--class-map only applies to --metric cophenetic".into())),
        (None, _) => vec![ClassAssignment::default(); trees.len()],
    };
    Ok(trees.into_iter().zip(classes).map(|(t, c)| Operand::Tree(t, c)).collect())
}

fn cell(metric: Metric, tol: &Tolerances, x: &Operand, y: &Operand) -> treedist::Result<Cell> {
    if let (Operand::Vector(a), Operand::Vector(b)) = (x, y) {
        return match metric {
            Metric::Cone => Ok(Cell::from(DistanceReport::new("cone", cone_path_length(a, b)?))),
            _ => {
                let r = geodesic_vectors(a, b, tol)?;
                Ok(Cell { value: r.distance, flags: Vec::new(), notes: r.notes })
            }
        };
    }
    let (Operand::Tree(a, ca), Operand::Tree(b, cb)) = (x, y) else {
        unreachable!("operands are all trees or all vectors")
    };
    let r = match metric {
        Metric::Rf => metrics::rf(a, b)?,
        Metric::Rfl => metrics::rfl(a, b)?,
        Metric::Quartet => metrics::quartet(a, b)?,
        Metric::Triplet => metrics::triplet(a, b)?,
        Metric::TripletLength => metrics::triplet_length(a, b)?,
        Metric::Mast => metrics::mast(a, b)?,
        Metric::Align => metrics::align(a, b)?,
        Metric::Node => metrics::node_dist(a, b, 1)?,
        Metric::Node2 => metrics::node_dist(a, b, 2)?,
        Metric::Cophenetic => metrics::cophenetic(a, b, Some(ca), Some(cb))?,
        Metric::Simprob => metrics::similarity_prob(a, b)?,
        Metric::Geodesic => {
            let r = geodesic_distance_with(a, b, tol)?;
            return Ok(Cell { value: r.distance, flags: Vec::new(), notes: r.notes });
        }
        Metric::Cone => unreachable!("cone runs on vectors"),
    };
    Ok(Cell::from(r))
}

pub fn run(args: &DistArgs) -> Result<(), CliError> {
    let metric = match (args.metric, args.k) {
        (Metric::Node, 2) => Metric::Node2,
        (m, _) => m,
    };
    let tol = tolerances(args)?;
    let entries = input::read_collection(&args.inputs)?;
    let origins: Vec<String> = entries.iter().map(|e| e.origin.clone()).collect();
    let ops = operands(args, metric, &entries)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Input(format!("--jobs {}: {e}", args.jobs)))?;
    let cells = pool
        .install(|| pairwise_matrix(&ops, |x, y| cell(metric, &tol, x, y)))
        .map_err(|e| {
            CliError::Engine(format!(
                "pair ({}, {}) [{} vs {}]: {}",
                e.i, e.j, origins[e.i], origins[e.j], e.error
            ))
        })?;

    let name = metric_name(metric);
    let values: Vec<Vec<f64>> = cells.iter().map(|row| row.iter().map(|c| c.value).collect()).collect();
    let text = match args.format {
        Format::Tsv => output::tsv(&values),
        Format::Json => output::json(name, &origins, &values),
    };
    let Some(out) = &args.out else {
        print!("{text}");
        return Ok(());
    };
    fs::write(out, text).map_err(|e| CliError::Input(format!("{out}: {e}")))?;

    let mut flag_counts = BTreeMap::new();
    let mut pairs = Vec::new();
    for (i, row) in cells.iter().enumerate() {
        for (j, c) in row.iter().enumerate().take(i + 1) {
            for f in &c.flags {
                *flag_counts.entry(f.clone()).or_insert(0) += 1;
            }
            if !c.flags.is_empty() || !c.notes.is_empty() {
                pairs.push(PairNote { i, j, flags: c.flags.clone(), notes: c.notes.clone() });
            }
        }
    }
    let report = Report { metric: name, inputs: &origins, flag_counts, pairs };
    let path = format!("{out}.report.json");
    fs::write(&path, report.to_json()).map_err(|e| CliError::Input(format!("{path}: {e}")))
}
