//! Cayley and Schreier graphs as regular multigraphs in CSR form.
//!
//! Multi-edges and self-loops are kept: the normalized adjacency operator
//! averages over the generator multiset, so collapsing parallel edges would
//! change its spectrum.

use std::collections::VecDeque;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gensets::GeneratingSet;
use crate::groups::{act_on_points, GroupError, GroupTable, Perm, PointDomain};

/// Largest vertex count representable with 32-bit indices.
pub const MAX_VERTICES: usize = (1 << 31) - 1;

const BINARY_MAGIC: &[u8; 4] = b"XFRG";
const BINARY_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("CapExceeded({0})")]
    CapExceeded(usize),
    #[error("graph has {n} vertices of degree {degree}, beyond the 32-bit CSR budget")]
    TooLarge { n: usize, degree: usize },
    #[error("generating set is empty")]
    EmptyGenerators,
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed graph file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, GraphError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    Cayley,
    Schreier,
}

impl GraphKind {
    fn as_str(self) -> &'static str {
        match self {
            GraphKind::Cayley => "Cayley",
            GraphKind::Schreier => "Schreier",
        }
    }

    fn code(self) -> u32 {
        match self {
            GraphKind::Cayley => 0,
            GraphKind::Schreier => 1,
        }
    }
}

/// Regular directed multigraph: every vertex has exactly `degree` outgoing
/// edges, slot `s` of vertex `v` carrying generator label `labels[v*deg+s]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseGraph {
    n: usize,
    degree: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    labels: Vec<u32>,
    kind: GraphKind,
}

impl SparseGraph {
    /// Builds a graph from per-vertex rows of `(target, label)`; every row
    /// must have the same length.
    pub fn from_rows(rows: Vec<Vec<(u32, u32)>>, degree: usize, kind: GraphKind) -> Result<Self> {
        let n = rows.len();
        if n > MAX_VERTICES || n.checked_mul(degree).is_none_or(|e| e > u32::MAX as usize) {
            return Err(GraphError::TooLarge { n, degree });
        }
        let mut targets = Vec::with_capacity(n * degree);
        let mut labels = Vec::with_capacity(n * degree);
        for (v, row) in rows.into_iter().enumerate() {
            if row.len() != degree {
                return Err(GraphError::Format(format!(
                    "vertex {v} has {} edges, expected {degree}",
                    row.len()
                )));
            }
            for (t, l) in row {
                if t as usize >= n {
                    return Err(GraphError::Format(format!("edge target {t} out of range")));
                }
                targets.push(t);
                labels.push(l);
            }
        }
        let offsets = (0..=n).map(|v| (v * degree) as u32).collect();
        Ok(SparseGraph {
            n,
            degree,
            offsets,
            targets,
            labels,
            kind,
        })
    }

    /// Schreier graph of a list of permutations of `{0..n}`: edge
    /// `(x, p_s(x))` with label `s` for every `s`.
    pub fn from_perms(perms: &[Perm], kind: GraphKind) -> Result<Self> {
        let first = perms.first().ok_or(GraphError::EmptyGenerators)?;
        let n = first.len();
        if perms.iter().any(|p| p.len() != n) {
            return Err(GroupError::AmbientMismatch.into());
        }
        let degree = perms.len();
        if n > MAX_VERTICES || n.checked_mul(degree).is_none_or(|e| e > u32::MAX as usize) {
            return Err(GraphError::TooLarge { n, degree });
        }
        let mut targets = vec![0u32; n * degree];
        let mut labels = vec![0u32; n * degree];
        targets
            .par_chunks_mut(degree)
            .zip(labels.par_chunks_mut(degree))
            .enumerate()
            .for_each(|(x, (t, l))| {
                for (s, p) in perms.iter().enumerate() {
                    t[s] = p.apply(x) as u32;
                    l[s] = s as u32;
                }
            });
        let offsets = (0..=n).map(|v| (v * degree) as u32).collect();
        Ok(SparseGraph {
            n,
            degree,
            offsets,
            targets,
            labels,
            kind,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn offsets(&self) -> &[u32] {
        &self.offsets
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    /// BFS distances from `source`; unreachable vertices get `u32::MAX`.
    pub fn bfs(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v];
            for &w in self.neighbors(v) {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dv + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.bfs(0).iter().all(|&d| d != u32::MAX)
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                for &w in self.neighbors(v) {
                    let w = w as usize;
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
                i += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// True when the edge multiset equals its reversal.
    pub fn is_symmetric(&self) -> bool {
        let mut fwd: Vec<(u32, u32)> = (0..self.n)
            .flat_map(|u| self.neighbors(u).iter().map(move |&v| (u as u32, v)))
            .collect();
        let mut rev: Vec<(u32, u32)> = fwd.iter().map(|&(u, v)| (v, u)).collect();
        fwd.par_sort_unstable();
        rev.par_sort_unstable();
        fwd == rev
    }

    pub fn has_self_loops(&self) -> bool {
        (0..self.n).any(|u| self.neighbors(u).iter().any(|&v| v as usize == u))
    }

    /// Writes the text edge list: a header line followed by one
    /// `u<TAB>v<TAB>label` line per directed edge.
    pub fn write_edges<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        writeln!(
            out,
            "# n={} degree={} kind={}",
            self.n,
            self.degree,
            self.kind.as_str()
        )?;
        for u in 0..self.n {
            let start = self.offsets[u] as usize;
            for s in 0..self.degree {
                writeln!(out, "{}\t{}\t{}", u, self.targets[start + s], self.labels[start + s])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_edges<R: Read>(input: R) -> Result<Self> {
        let mut lines = BufReader::new(input).lines();
        let header = lines
            .next()
            .ok_or_else(|| GraphError::Format("empty file".into()))??;
        let (n, degree, kind) = parse_header(&header)?;
        let mut rows: Vec<Vec<(u32, u32)>> = vec![Vec::with_capacity(degree); n];
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split('\t');
            let mut field = || -> Result<u32> {
                parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| GraphError::Format(format!("bad edge line {line:?}")))
            };
            let (u, v, l) = (field()?, field()?, field()?);
            rows.get_mut(u as usize)
                .ok_or_else(|| GraphError::Format(format!("vertex {u} out of range")))?
                .push((v, l));
        }
        SparseGraph::from_rows(rows, degree, kind)
    }

    /// Binary cache: magic, version, n, degree, kind, then the offset, target
    /// and label arrays, all little-endian 32-bit.
    pub fn write_binary<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        out.write_all(BINARY_MAGIC)?;
        for v in [BINARY_VERSION, self.n as u32, self.degree as u32, self.kind.code()] {
            out.write_all(&v.to_le_bytes())?;
        }
        for arr in [&self.offsets, &self.targets, &self.labels] {
            for v in arr.iter() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_binary<R: Read>(input: R) -> Result<Self> {
        let mut input = BufReader::new(input);
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != BINARY_MAGIC {
            return Err(GraphError::Format("bad magic".into()));
        }
        let mut word = || -> Result<u32> {
            let mut b = [0u8; 4];
            input.read_exact(&mut b)?;
            Ok(u32::from_le_bytes(b))
        };
        let version = word()?;
        if version != BINARY_VERSION {
            return Err(GraphError::Format(format!("unsupported version {version}")));
        }
        let n = word()? as usize;
        let degree = word()? as usize;
        let kind = match word()? {
            0 => GraphKind::Cayley,
            1 => GraphKind::Schreier,
            k => return Err(GraphError::Format(format!("unknown kind {k}"))),
        };
        let read_vec = |len: usize, word: &mut dyn FnMut() -> Result<u32>| -> Result<Vec<u32>> {
            (0..len).map(|_| word()).collect()
        };
        let offsets = read_vec(n + 1, &mut word)?;
        let targets = read_vec(n * degree, &mut word)?;
        let labels = read_vec(n * degree, &mut word)?;
        let g = SparseGraph {
            n,
            degree,
            offsets,
            targets,
            labels,
            kind,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<()> {
        let regular = self
            .offsets
            .iter()
            .enumerate()
            .all(|(v, &o)| o as usize == v * self.degree);
        if !regular || self.targets.iter().any(|&t| t as usize >= self.n) {
            return Err(GraphError::Format("inconsistent CSR arrays".into()));
        }
        Ok(())
    }
}

fn parse_header(line: &str) -> Result<(usize, usize, GraphKind)> {
    let bad = || GraphError::Format(format!("bad header {line:?}"));
    let body = line.strip_prefix("# ").ok_or_else(bad)?;
    let (mut n, mut degree, mut kind) = (None, None, None);
    for part in body.split_whitespace() {
        match part.split_once('=') {
            Some(("n", v)) => n = v.parse().ok(),
            Some(("degree", v)) => degree = v.parse().ok(),
            Some(("kind", "Cayley")) => kind = Some(GraphKind::Cayley),
            Some(("kind", "Schreier")) => kind = Some(GraphKind::Schreier),
            _ => return Err(bad()),
        }
    }
    Ok((n.ok_or_else(bad)?, degree.ok_or_else(bad)?, kind.ok_or_else(bad)?))
}

pub fn export_edges(g: &SparseGraph, path: impl AsRef<Path>) -> Result<()> {
    g.write_edges(File::create(path)?)
}

pub fn import_edges(path: impl AsRef<Path>) -> Result<SparseGraph> {
    SparseGraph::read_edges(File::open(path)?)
}

/// A Cayley graph together with the group table indexing its vertices.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    pub graph: SparseGraph,
    pub table: GroupTable,
    pub set: GeneratingSet,
}

/// `Cay(<S>, S)`: vertices are the BFS-enumerated elements of `<S>` (identity
/// first), with an edge `(v, s v)` for every generator `s`. A non-symmetric
/// set is closed under inverses first.
pub fn build_cayley(set: &GeneratingSet, cap: usize) -> Result<CayleyGraph> {
    if set.is_empty() {
        return Err(GraphError::EmptyGenerators);
    }
    let set = if set.is_symmetric() {
        set.clone()
    } else {
        set.clone().symmetrized()
    };
    let gens = set.group_elements();
    let table = crate::groups::enumerate_group(&gens, cap).map_err(|e| match e {
        GroupError::CapExceeded(c) => GraphError::CapExceeded(c),
        other => other.into(),
    })?;
    let degree = gens.len();
    let n = table.order();
    if n.checked_mul(degree).is_none_or(|e| e > u32::MAX as usize) {
        return Err(GraphError::TooLarge { n, degree });
    }
    let rows: Vec<Vec<(u32, u32)>> = table
        .elements()
        .par_iter()
        .map(|v| {
            gens.iter()
                .enumerate()
                .map(|(s, g)| {
                    let w = table
                        .index_of(&g.mul(v))
                        .expect("group table is closed under generators");
                    (w as u32, s as u32)
                })
                .collect()
        })
        .collect();
    let graph = SparseGraph::from_rows(rows, degree, GraphKind::Cayley)?;
    Ok(CayleyGraph { graph, table, set })
}

/// Schreier graph of the generators acting on `domain`: vertices are domain
/// points, with an edge `(x, s.x)` per generator.
pub fn build_schreier(set: &GeneratingSet, domain: &PointDomain) -> Result<SparseGraph> {
    if set.is_empty() {
        return Err(GraphError::EmptyGenerators);
    }
    let set = if set.is_symmetric() {
        set.clone()
    } else {
        set.clone().symmetrized()
    };
    let perms: Vec<Perm> = set
        .group_elements()
        .iter()
        .map(|g| act_on_points(g, domain))
        .collect::<std::result::Result<_, _>>()?;
    SparseGraph::from_perms(&perms, GraphKind::Schreier)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::Field;
    use crate::gensets::{self, GeneratingSet};
    use crate::groups::{GroupElement, GroupHandle, DEFAULT_CAP};

    fn perm_set(n: usize, cycles: &[&[&[u32]]], ambient: GroupHandle) -> GeneratingSet {
        let items = cycles
            .iter()
            .enumerate()
            .map(|(i, c)| {
                (
                    format!("g{i}"),
                    GroupElement::Perm(Perm::from_cycles(n, c).unwrap()),
                )
            })
            .collect();
        GeneratingSet::new(ambient, items).unwrap()
    }

    pub(crate) fn k3() -> CayleyGraph {
        let set = perm_set(3, &[&[&[0, 1, 2]], &[&[0, 2, 1]]], GroupHandle::alt(3));
        build_cayley(&set, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn triangle() {
        let g = k3().graph;
        assert_eq!((g.n(), g.degree()), (3, 2));
        for v in 0..3 {
            let mut nb: Vec<u32> = g.neighbors(v).to_vec();
            nb.sort();
            let expected: Vec<u32> = (0..3).filter(|&w| w != v as u32).collect();
            assert_eq!(nb, expected);
        }
        assert!(g.is_symmetric());
    }

    #[test]
    fn sym3_transpositions_give_k33() {
        let set = perm_set(
            3,
            &[&[&[0, 1]], &[&[1, 2]], &[&[0, 2]]],
            GroupHandle::sym(3),
        );
        let c = build_cayley(&set, DEFAULT_CAP).unwrap();
        let g = &c.graph;
        assert_eq!((g.n(), g.degree()), (6, 3));
        // bipartition by sign, every odd-even pair adjacent exactly once
        let even: Vec<bool> = c
            .table
            .elements()
            .iter()
            .map(|e| e.as_perm().unwrap().is_even())
            .collect();
        for u in 0..6 {
            let mut nb: Vec<u32> = g.neighbors(u).to_vec();
            nb.sort();
            let expected: Vec<u32> = (0..6u32).filter(|&w| even[w as usize] != even[u]).collect();
            assert_eq!(nb, expected);
        }
    }

    #[test]
    fn cayley_sl2_f3() {
        let f3 = Field::prime(3).unwrap();
        let c = build_cayley(&gensets::sl2_standard(&f3), DEFAULT_CAP).unwrap();
        assert_eq!((c.graph.n(), c.graph.degree()), (24, 4));
        assert!(c.table.element(0).is_identity());
        assert!(c.graph.is_symmetric());
        assert!(c.graph.is_connected());
        let mut buf = Vec::new();
        c.graph.write_edges(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("# n=24 degree=4 kind=Cayley"));
    }

    #[test]
    fn cap_is_enforced() {
        let f5 = Field::prime(5).unwrap();
        let err = build_cayley(&gensets::sl2_standard(&f5), 50).unwrap_err();
        assert!(matches!(err, GraphError::CapExceeded(50)));
    }

    #[test]
    fn edge_export_round_trip() {
        let g = k3().graph;
        let mut buf = Vec::new();
        g.write_edges(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 7);
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 6);
        let back = SparseGraph::read_edges(&buf[..]).unwrap();
        assert_eq!(back, g);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k3.tsv");
        export_edges(&g, &path).unwrap();
        assert_eq!(import_edges(&path).unwrap(), g);
    }

    #[test]
    fn binary_round_trip() {
        let f3 = Field::prime(3).unwrap();
        let g = build_cayley(&gensets::sl2_standard(&f3), DEFAULT_CAP).unwrap().graph;
        let mut buf = Vec::new();
        g.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"XFRG");
        assert_eq!(buf.len(), 4 + 16 + 4 * (25 + 2 * 96));
        assert_eq!(SparseGraph::read_binary(&buf[..]).unwrap(), g);
        buf[0] = b'Y';
        assert!(SparseGraph::read_binary(&buf[..]).is_err());
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(SparseGraph::read_edges("# n=2 degree=1 kind=Cayley\n0\t1\t0\n".as_bytes()).is_err());
        assert!(SparseGraph::read_edges("n=2\n".as_bytes()).is_err());
        assert!(SparseGraph::read_edges("# n=1 degree=1 kind=Cayley\n0\t5\t0\n".as_bytes()).is_err());
    }

    #[test]
    fn schreier_on_vectors() {
        let f2 = Field::prime(2).unwrap();
        let set = gensets::sl2_standard(&f2);
        let dom = PointDomain::NonzeroVectors { field: f2, d: 2 };
        let g = build_schreier(&set, &dom).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.degree(), set.len());
        assert!(g.is_connected());
        assert!(g.is_symmetric());
        assert_eq!(g.kind(), GraphKind::Schreier);
    }

    #[test]
    fn identity_generator_gives_self_loops() {
        let set = perm_set(4, &[&[]], GroupHandle::sym(4));
        let g = build_schreier(&set, &PointDomain::Points { n: 4 }).unwrap();
        assert!(g.has_self_loops());
        assert!(!g.is_connected());
        assert_eq!(g.components().len(), 4);
    }

    #[test]
    fn rows_must_be_regular() {
        let rows = vec![vec![(1, 0)], vec![]];
        assert!(SparseGraph::from_rows(rows, 1, GraphKind::Schreier).is_err());
    }
}
