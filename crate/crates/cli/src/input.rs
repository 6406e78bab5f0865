//! Tree and split-vector collections, one item per line or block.

use std::collections::BTreeMap;
use std::fs;

use treedist::splits::{split_to_tree, Split, SplitVector};
use treedist::tree::parse_newick;
use treedist::{LabelBits, Tree};

use crate::CliError;

#[derive(Clone, Debug)]
pub enum Item {
    Tree(Tree),
    Vector(SplitVector),
}

/// A parsed item and where it came from, as `file:line`.
#[derive(Clone, Debug)]
pub struct Entry {
    pub item: Item,
    pub origin: String,
}

impl Entry {
    pub fn n(&self) -> usize {
        match &self.item {
            Item::Tree(t) => t.n(),
            Item::Vector(v) => v.n(),
        }
    }

    pub fn tree(&self) -> Result<Tree, CliError> {
        match &self.item {
            Item::Tree(t) => Ok(t.clone()),
            Item::Vector(v) => split_to_tree(v).map_err(|e| CliError::input(&self.origin, e)),
        }
    }

    pub fn vector(&self) -> SplitVector {
        match &self.item {
            Item::Tree(t) => treedist::splits::encode(t),
            Item::Vector(v) => v.clone(),
        }
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// True when the first content line opens a split-vector block.
pub fn is_vector_text(text: &str) -> bool {
    content_lines(text).next().is_some_and(|(_, l)| l.starts_with("n="))
}

pub fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
}

/// Every item of every file, in order. All items must share one label set.
pub fn read_collection(paths: &[String]) -> Result<Vec<Entry>, CliError> {
    let mut out: Vec<Entry> = Vec::new();
    for path in paths {
        let text = read(path)?;
        let items = if is_vector_text(&text) {
            parse_vectors(path, &text)?
        } else {
            parse_trees(path, &text)?
        };
        out.extend(items);
    }
    if out.is_empty() {
        return Err(CliError::Input("no trees in the input".into()));
    }
    let n = out[0].n();
    if let Some(e) = out.iter().find(|e| e.n() != n) {
        return Err(CliError::Input(format!(
            "{}: {} leaves, but the first item has {n}",
            e.origin,
            e.n()
        )));
    }
    Ok(out)
}

pub fn parse_trees(path: &str, text: &str) -> Result<Vec<Entry>, CliError> {
    content_lines(text)
        .map(|(no, line)| {
            let origin = format!("{path}:{no}");
            parse_newick(line)
                .map(|t| Entry { item: Item::Tree(t), origin: origin.clone() })
                .map_err(|e| CliError::input(&origin, e))
        })
        .collect()
}

/// Unparsed split-vector block: header line number, leaf count text, entries.
pub struct RawBlock {
    pub header: usize,
    pub n: String,
    pub lines: Vec<(usize, String)>,
}

pub fn raw_blocks(path: &str, text: &str) -> Result<Vec<RawBlock>, CliError> {
    let mut out: Vec<RawBlock> = Vec::new();
    for (no, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("n=") {
            out.push(RawBlock { header: no, n: rest.trim().to_string(), lines: Vec::new() });
        } else {
            match out.last_mut() {
                Some(b) => b.lines.push((no, line.to_string())),
                None => return Err(CliError::Input(format!("{path}:{no}: entry before any `n=` header"))),
            }
        }
    }
    Ok(out)
}

/// Blocks open with `n=<leaves>`; each following line is `<index> <weight>`,
/// `{a,b,...} <weight>` naming one side of the split, or `bits <0/1...>`
/// selecting splits of the canonical order at weight 1.
pub fn parse_block(path: &str, b: &RawBlock) -> Result<Entry, CliError> {
    let origin = format!("{path}:{}", b.header);
    let n = b
        .n
        .parse::<usize>()
        .map_err(|e| CliError::Input(format!("{origin}: bad leaf count `{}`: {e}", b.n)))?;
    let v = vector_block(path, &origin, n, &b.lines)?;
    Ok(Entry { item: Item::Vector(v), origin })
}

pub fn parse_vectors(path: &str, text: &str) -> Result<Vec<Entry>, CliError> {
    raw_blocks(path, text)?.iter().map(|b| parse_block(path, b)).collect()
}

fn vector_block(path: &str, header: &str, n: usize, lines: &[(usize, String)]) -> Result<SplitVector, CliError> {
    let mut entries: Vec<(Split, f64)> = Vec::new();
    for (no, line) in lines {
        let origin = format!("{path}:{no}");
        if let Some(bits) = line.strip_prefix("bits") {
            let bits: Vec<u8> = bits
                .chars()
                .filter(|c| !c.is_whitespace() && *c != ',')
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(CliError::Input(format!("{origin}: bit vectors hold only 0 and 1"))),
                })
                .collect::<Result<_, _>>()?;
            let v = SplitVector::from_binary(n, &bits).map_err(|e| CliError::input(&origin, e))?;
            entries.extend(v.iter().map(|(s, w)| (s.clone(), w)));
            continue;
        }
        let (key, weight) = line
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| CliError::Input(format!("{origin}: expected `<split> <weight>`")))?;
        let weight: f64 = weight
            .parse()
            .map_err(|e| CliError::Input(format!("{origin}: bad weight `{weight}`: {e}")))?;
        let key = key.trim();
        let split = if key.starts_with('{') {
            let labels = parse_label_set(key).map_err(|m| CliError::Input(format!("{origin}: {m}")))?;
            Split::from_labels(n, labels)
        } else {
            let index: u128 = key
                .parse()
                .map_err(|e| CliError::Input(format!("{origin}: bad split index `{key}`: {e}")))?;
            treedist::splits::split_at(n, index)
        }
        .map_err(|e| CliError::input(&origin, e))?;
        entries.push((split, weight));
    }
    SplitVector::new(n, entries).map_err(|e| CliError::input(header, e))
}

/// `{1,2,3}` or `1,2,3`.
pub fn parse_label_set(text: &str) -> Result<Vec<usize>, String> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    inner
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad label `{}`: {e}", t.trim())))
        .collect()
}

/// `cluster class` lines, e.g. `{1,2} 3`.
pub fn parse_class_map(path: &str, n: usize) -> Result<Vec<(usize, LabelBits, u32)>, CliError> {
    let text = read(path)?;
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for (no, line) in content_lines(&text) {
        let origin = format!("{path}:{no}");
        let (cluster, class) = line
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| CliError::Input(format!("{origin}: expected `<cluster> <class>`")))?;
        let class: u32 = class
            .parse()
            .map_err(|e| CliError::Input(format!("{origin}: bad class `{class}`: {e}")))?;
        let labels = parse_label_set(cluster).map_err(|m| CliError::Input(format!("{origin}: {m}")))?;
        if let Some(&l) = labels.iter().find(|&&l| l == 0 || l > n) {
            return Err(CliError::Input(format!("{origin}: label {l} outside 1..={n}")));
        }
        let bits = LabelBits::from_labels(n, labels);
        if seen.insert(bits.clone(), no).is_some() {
            return Err(CliError::Input(format!("{origin}: cluster {bits} listed twice")));
        }
        out.push((no, bits, class));
    }
    Ok(out)
}
