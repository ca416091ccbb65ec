//! Bipartite interaction graphs.
//!
//! An [`InteractionGraph`] stores the binary interaction matrix twice: once
//! row-major (user → sorted items) and once column-major (item → sorted
//! users), both in compressed sparse form. The graph is immutable after
//! construction and can be shared freely between threads.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One side of the bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Users,
    Items,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Users => Side::Items,
            Side::Items => Side::Users,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Users => "users",
            Side::Items => "items",
        })
    }
}

/// External identifiers for dense node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelMap {
    pub users: Vec<String>,
    pub items: Vec<String>,
}

impl LabelMap {
    pub fn labels(&self, side: Side) -> &[String] {
        match side {
            Side::Users => &self.users,
            Side::Items => &self.items,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    fn row(&self, idx: usize) -> &[u32] {
        &self.targets[self.offsets[idx]..self.offsets[idx + 1]]
    }

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }
}

/// Immutable bipartite user–item graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    users: Csr,
    items: Csr,
    labels: Option<LabelMap>,
}

impl InteractionGraph {
    /// Builds a graph from `(user, item)` pairs. Duplicates collapse to one edge.
    pub fn from_edges<I>(num_users: usize, num_items: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut edges: Vec<(u32, u32)> = edges.into_iter().collect();
        for &(user, item) in &edges {
            if user as usize >= num_users || item as usize >= num_items {
                return Err(Error::EdgeOutOfBounds {
                    user,
                    item,
                    num_users,
                    num_items,
                });
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_sorted_edges(num_users, num_items, &edges))
    }

    /// Builds a graph from per-user item lists. Rows may be unsorted; repeated
    /// items within a row collapse.
    pub fn from_rows(num_items: usize, rows: Vec<Vec<u32>>) -> Result<Self> {
        let num_users = rows.len();
        let mut offsets = Vec::with_capacity(num_users + 1);
        offsets.push(0);
        let mut targets = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for (user, mut row) in rows.into_iter().enumerate() {
            row.sort_unstable();
            row.dedup();
            if let Some(&item) = row.last() {
                if item as usize >= num_items {
                    return Err(Error::EdgeOutOfBounds {
                        user: user as u32,
                        item,
                        num_users,
                        num_items,
                    });
                }
            }
            targets.extend_from_slice(&row);
            offsets.push(targets.len());
        }
        let users = Csr { offsets, targets };
        let items = transpose(&users, num_items);
        Ok(Self {
            users,
            items,
            labels: None,
        })
    }

    fn from_sorted_edges(num_users: usize, num_items: usize, edges: &[(u32, u32)]) -> Self {
        let mut offsets = vec![0usize; num_users + 1];
        for &(user, _) in edges {
            offsets[user as usize + 1] += 1;
        }
        for u in 0..num_users {
            offsets[u + 1] += offsets[u];
        }
        let targets = edges.iter().map(|&(_, item)| item).collect();
        let users = Csr { offsets, targets };
        let items = transpose(&users, num_items);
        Self {
            users,
            items,
            labels: None,
        }
    }

    pub fn with_labels(mut self, labels: LabelMap) -> Self {
        self.labels = Some(labels);
        self
    }

    pub fn labels(&self) -> Option<&LabelMap> {
        self.labels.as_ref()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn num_nodes(&self, side: Side) -> usize {
        match side {
            Side::Users => self.num_users(),
            Side::Items => self.num_items(),
        }
    }

    pub fn num_edges(&self) -> usize {
        self.users.targets.len()
    }

    /// Fraction of the user × item matrix that is filled.
    pub fn density(&self) -> f64 {
        let cells = self.num_users() as f64 * self.num_items() as f64;
        if cells == 0.0 {
            0.0
        } else {
            self.num_edges() as f64 / cells
        }
    }

    /// Sorted items user `user` interacted with.
    pub fn items_of(&self, user: usize) -> &[u32] {
        self.users.row(user)
    }

    /// Sorted users that interacted with `item`.
    pub fn users_of(&self, item: usize) -> &[u32] {
        self.items.row(item)
    }

    pub fn neighbors(&self, side: Side, node: usize) -> &[u32] {
        match side {
            Side::Users => self.items_of(node),
            Side::Items => self.users_of(node),
        }
    }

    pub fn contains(&self, user: usize, item: u32) -> bool {
        self.items_of(user).binary_search(&item).is_ok()
    }

    /// Degree of every node on `side`.
    pub fn degrees(&self, side: Side) -> Vec<usize> {
        let csr = match side {
            Side::Users => &self.users,
            Side::Items => &self.items,
        };
        csr.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Edges in `(user, item)` order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.num_users())
            .flat_map(move |u| self.items_of(u).iter().map(move |&i| (u as u32, i)))
    }

    /// True when both graphs have the same node counts and edge set.
    pub fn same_edges(&self, other: &InteractionGraph) -> bool {
        self.users == other.users && self.num_items() == other.num_items()
    }

    /// Canonical edge list: a `# users=N items=M` header followed by one
    /// `user<TAB>item` line per edge sorted by (user, item).
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# users={} items={}", self.num_users(), self.num_items())?;
        for (u, i) in self.edges() {
            writeln!(out, "{u}\t{i}")?;
        }
        out.flush()
    }

    pub fn to_canonical_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.num_edges() * 12 + 32);
        self.write_edge_list(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }

    /// SHA-256 of the canonical edge list, hex encoded.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_bytes()))
    }

    /// Writes the canonical edge list to `path`, plus the label sidecar
    /// (see [`label_sidecar_path`]) when labels are present.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_edge_list(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))?;
        if let Some(labels) = &self.labels {
            let sidecar = label_sidecar_path(path);
            let file = File::create(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
            write_labels(labels, BufWriter::new(file)).map_err(|e| Error::io(&sidecar, e))?;
        }
        Ok(())
    }
}

fn transpose(rows: &Csr, num_cols: usize) -> Csr {
    let mut offsets = vec![0usize; num_cols + 1];
    for &col in &rows.targets {
        offsets[col as usize + 1] += 1;
    }
    for c in 0..num_cols {
        offsets[c + 1] += offsets[c];
    }
    let mut cursor = offsets.clone();
    let mut targets = vec![0u32; rows.targets.len()];
    for r in 0..rows.len() {
        for &col in rows.row(r) {
            targets[cursor[col as usize]] = r as u32;
            cursor[col as usize] += 1;
        }
    }
    Csr { offsets, targets }
}

/// `graph.tsv` → `graph.labels.tsv`.
pub fn label_sidecar_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.labels.tsv"))
}

fn write_labels<W: Write>(labels: &LabelMap, mut out: W) -> std::io::Result<()> {
    for (tag, side) in [("u", Side::Users), ("i", Side::Items)] {
        for (idx, label) in labels.labels(side).iter().enumerate() {
            writeln!(out, "{tag}\t{idx}\t{label}")?;
        }
    }
    out.flush()
}

/// Input dialects accepted by [`load_edge_list`]. Columns after the second
/// (ratings, timestamps) are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeListFormat {
    /// `user::item::rating::timestamp` as in the MovieLens `ratings.dat` files.
    MovieLens,
    Tsv,
    Csv,
}

impl EdgeListFormat {
    fn separator(self) -> &'static str {
        match self {
            EdgeListFormat::MovieLens => "::",
            EdgeListFormat::Tsv => "\t",
            EdgeListFormat::Csv => ",",
        }
    }
}

impl FromStr for EdgeListFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "movielens" => Ok(EdgeListFormat::MovieLens),
            "tsv" => Ok(EdgeListFormat::Tsv),
            "csv" => Ok(EdgeListFormat::Csv),
            other => Err(Error::InvalidParameter(format!(
                "unknown edge-list format `{other}` (expected movielens, tsv or csv)"
            ))),
        }
    }
}

/// Reads a line-oriented edge list with external ids, reindexing users and
/// items densely in first-seen order. Blank lines and `#` comments are skipped.
pub fn load_edge_list(path: &Path, format: EdgeListFormat) -> Result<InteractionGraph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), path, format)
}

pub fn parse_edge_list<R: BufRead>(
    reader: R,
    path: &Path,
    format: EdgeListFormat,
) -> Result<InteractionGraph> {
    let sep = format.separator();
    let mut user_ids: HashMap<String, u32> = HashMap::new();
    let mut item_ids: HashMap<String, u32> = HashMap::new();
    let mut labels = LabelMap::default();
    let mut edges = Vec::new();

    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(sep).map(str::trim);
        let (user, item) = match (fields.next(), fields.next()) {
            (Some(u), Some(i)) if !u.is_empty() && !i.is_empty() => (u, i),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: format!("expected at least two {sep:?}-separated fields"),
                })
            }
        };
        let u = intern(&mut user_ids, &mut labels.users, user);
        let i = intern(&mut item_ids, &mut labels.items, item);
        edges.push((u, i));
    }

    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let graph = InteractionGraph::from_edges(labels.users.len(), labels.items.len(), edges)?;
    Ok(graph.with_labels(labels))
}

fn intern(ids: &mut HashMap<String, u32>, labels: &mut Vec<String>, key: &str) -> u32 {
    if let Some(&idx) = ids.get(key) {
        return idx;
    }
    let idx = labels.len() as u32;
    ids.insert(key.to_owned(), idx);
    labels.push(key.to_owned());
    idx
}

/// Reads a canonical edge list written by [`InteractionGraph::save`],
/// together with its label sidecar when one exists.
pub fn read_canonical(path: &Path) -> Result<InteractionGraph> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut dims: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if let Some(header) = line.strip_prefix('#') {
            if dims.is_none() {
                dims = parse_header(header);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let (u, i) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(n + 1, "expected `user<TAB>item`".into()))?;
        let u: u32 = u
            .parse()
            .map_err(|_| parse_err(n + 1, format!("bad user index `{u}`")))?;
        let i: u32 = i
            .parse()
            .map_err(|_| parse_err(n + 1, format!("bad item index `{i}`")))?;
        edges.push((u, i));
    }

    let (num_users, num_items) = dims.unwrap_or_else(|| {
        let users = edges.iter().map(|e| e.0 as usize + 1).max().unwrap_or(0);
        let items = edges.iter().map(|e| e.1 as usize + 1).max().unwrap_or(0);
        (users, items)
    });
    let mut graph = InteractionGraph::from_edges(num_users, num_items, edges)?;

    let sidecar = label_sidecar_path(path);
    if sidecar.exists() {
        graph = graph.with_labels(read_labels(&sidecar)?);
    }
    Ok(graph)
}

fn parse_header(header: &str) -> Option<(usize, usize)> {
    let mut users = None;
    let mut items = None;
    for token in header.split_whitespace() {
        match token.split_once('=') {
            Some(("users", v)) => users = v.parse().ok(),
            Some(("items", v)) => items = v.parse().ok(),
            _ => {}
        }
    }
    Some((users?, items?))
}

fn read_labels(path: &Path) -> Result<LabelMap> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut labels = LabelMap::default();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let mut parts = line.splitn(3, '\t');
        let (tag, idx, label) = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(i), Some(l)) => (t, i, l),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: "expected `side<TAB>index<TAB>label`".into(),
                })
            }
        };
        let list = match tag {
            "u" => &mut labels.users,
            "i" => &mut labels.items,
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: format!("unknown side tag `{tag}`"),
                })
            }
        };
        if idx.parse::<usize>().ok() != Some(list.len()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: n + 1,
                message: format!("label index `{idx}` out of sequence"),
            });
        }
        list.push(label.to_owned());
    }
    Ok(labels)
}
