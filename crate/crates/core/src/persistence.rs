//! Vietoris-Rips persistent homology of a finite metric space in
//! dimensions 0 and 1.
//!
//! Edges are ordered by (length, i, j) and triangles by (diameter, i, j, k).
//! Dimension 0 comes from a union-find sweep over the edges. Dimension 1
//! comes from reducing triangle boundary columns over GF(2): the lowest edge
//! of a reduced column is the edge that created the hole, the triangle is
//! the one that fills it, and the reduced column itself is the cycle handed
//! back as representative.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::model::PointCloud;

#[derive(Debug, Clone, PartialEq)]
pub enum PersistenceError {
    NotSquare { rows: usize, len: usize },
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize },
    NonzeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    BadThreshold(f64),
}

impl fmt::Display for PersistenceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PersistenceError::NotSquare { rows, len } => {
                write!(f, "distance matrix is not square ({rows} rows, row of length {len})")
            }
            PersistenceError::NonFinite { i, j } => write!(f, "distance ({i},{j}) is not finite"),
            PersistenceError::Negative { i, j } => write!(f, "distance ({i},{j}) is negative"),
            PersistenceError::NonzeroDiagonal { i } => write!(f, "diagonal entry {i} is not zero"),
            PersistenceError::Asymmetric { i, j } => {
                write!(f, "distance matrix is not symmetric at ({i},{j})")
            }
            PersistenceError::BadThreshold(t) => write!(f, "threshold must be positive, got {t}"),
        }
    }
}

impl core::error::Error for PersistenceError {}

/// Symmetric, nonnegative, zero-diagonal matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareDistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SquareDistanceMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, PersistenceError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(PersistenceError::NotSquare { rows: n, len: row.len() });
            }
            entries.extend_from_slice(row);
        }
        let m = SquareDistanceMatrix { n, entries };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<(), PersistenceError> {
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if !v.is_finite() {
                    return Err(PersistenceError::NonFinite { i, j });
                }
                if v < 0.0 {
                    return Err(PersistenceError::Negative { i, j });
                }
                if i == j && v != 0.0 {
                    return Err(PersistenceError::NonzeroDiagonal { i });
                }
                if v != self.get(j, i) {
                    return Err(PersistenceError::Asymmetric { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }
}

/// Euclidean distance matrix of plane points.
pub fn euclidean_distances(points: &[(f64, f64)]) -> SquareDistanceMatrix {
    let n = points.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let (dx, dy) = (points[i].0 - points[j].0, points[i].1 - points[j].1);
            let d = libm::sqrt(dx * dx + dy * dy);
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    SquareDistanceMatrix { n, entries }
}

pub fn pairwise_distances(cloud: &PointCloud) -> SquareDistanceMatrix {
    let points: Vec<(f64, f64)> = cloud.coordinates().collect();
    euclidean_distances(&points)
}

/// Smallest radius at which some point reaches every other point. Above it
/// the Rips complex is a cone, so no homology survives.
pub fn enclosing_radius(matrix: &SquareDistanceMatrix) -> f64 {
    if matrix.n == 0 {
        return 0.0;
    }
    (0..matrix.n)
        .map(|i| (0..matrix.n).map(|j| matrix.get(i, j)).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistencePair {
    pub dimension: u8,
    pub birth: f64,
    /// `f64::INFINITY` for classes still alive at the threshold.
    pub death: f64,
    /// Dimension-1 only: edges, as point-index pairs `(i, j)` with `i < j`,
    /// forming a cycle present at `birth`.
    pub representative: Option<Vec<(usize, usize)>>,
}

impl PersistencePair {
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
    pub provenance: String,
}

impl PersistenceDiagram {
    pub fn dimension(&self, dim: u8) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.pairs.iter().filter(move |p| p.dimension == dim)
    }

    pub fn dgm0(&self) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.dimension(0)
    }

    pub fn dgm1(&self) -> impl Iterator<Item = &PersistencePair> + '_ {
        self.dimension(1)
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    /// Drops essential classes, for callers that compare finite diagrams.
    pub fn without_essential(&self) -> PersistenceDiagram {
        PersistenceDiagram {
            pairs: self.pairs.iter().filter(|p| !p.is_essential()).cloned().collect(),
            provenance: self.provenance.clone(),
        }
    }

    fn sort(&mut self) {
        self.pairs.sort_by(|a, b| {
            a.dimension
                .cmp(&b.dimension)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
    }
}

/// Persistence of the cloud under Euclidean distance, tagged with the
/// cloud's provenance.
pub fn cloud_persistence(cloud: &PointCloud, threshold: Option<f64>) -> Result<PersistenceDiagram, PersistenceError> {
    let matrix = pairwise_distances(cloud);
    Ok(rips_persistence(&matrix, threshold)?.with_provenance(cloud.provenance()))
}

const NO_EDGE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy)]
struct Edge {
    len: f64,
    i: u32,
    j: u32,
}

struct Filtration {
    n: usize,
    edges: Vec<Edge>,
    /// Position of edge {i, j} in `edges`, or `NO_EDGE` above the threshold.
    index: Vec<u32>,
}

impl Filtration {
    fn new(matrix: &SquareDistanceMatrix, threshold: f64) -> Self {
        let n = matrix.n;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let len = matrix.get(i, j);
                if len <= threshold {
                    edges.push(Edge { len, i: i as u32, j: j as u32 });
                }
            }
        }
        edges.sort_by(|a, b| a.len.total_cmp(&b.len).then(a.i.cmp(&b.i)).then(a.j.cmp(&b.j)));
        let mut index = vec![NO_EDGE; n * n];
        for (e, edge) in edges.iter().enumerate() {
            index[edge.i as usize * n + edge.j as usize] = e as u32;
            index[edge.j as usize * n + edge.i as usize] = e as u32;
        }
        Filtration { n, edges, index }
    }

    #[inline]
    fn edge(&self, a: usize, b: usize) -> u32 {
        self.index[a * self.n + b]
    }

    fn endpoints(&self, e: u32) -> (usize, usize) {
        let edge = self.edges[e as usize];
        (edge.i as usize, edge.j as usize)
    }
}

/// Union-find whose root is always the smallest vertex of its component,
/// which makes that vertex the elder when two components merge.
struct Components {
    parent: Vec<usize>,
}

impl Components {
    fn new(n: usize) -> Self {
        Components { parent: (0..n).collect() }
    }

    fn find(&mut self, mut v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    /// Joins the components of `a` and `b`; false if already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (elder, younger) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[younger] = elder;
        true
    }
}

/// Rips persistence in dimensions 0 and 1.
///
/// `threshold` defaults to the enclosing radius. Classes alive at the
/// threshold are reported with infinite death. Zero-persistence pairs are
/// omitted.
pub fn rips_persistence(
    matrix: &SquareDistanceMatrix,
    threshold: Option<f64>,
) -> Result<PersistenceDiagram, PersistenceError> {
    matrix.check()?;
    let threshold = match threshold {
        Some(t) if t > 0.0 && !t.is_nan() => t,
        Some(t) => return Err(PersistenceError::BadThreshold(t)),
        None => enclosing_radius(matrix),
    };
    let filtration = Filtration::new(matrix, threshold);
    let mut pairs = Vec::new();

    // Dimension 0, plus the split of edges into merging and cycle-creating.
    let mut components = Components::new(matrix.n);
    let mut merges = vec![false; filtration.edges.len()];
    for (e, edge) in filtration.edges.iter().enumerate() {
        if components.union(edge.i as usize, edge.j as usize) {
            merges[e] = true;
            if edge.len > 0.0 {
                pairs.push(PersistencePair { dimension: 0, birth: 0.0, death: edge.len, representative: None });
            }
        }
    }
    for v in 0..matrix.n {
        if components.find(v) == v {
            pairs.push(PersistencePair { dimension: 0, birth: 0.0, death: f64::INFINITY, representative: None });
        }
    }

    let filled = reduce_triangles(&filtration, &merges, &mut pairs);

    // Cycle-creating edges never filled by a triangle stay open.
    for e in 0..filtration.edges.len() {
        if !merges[e] && !filled[e] {
            pairs.push(PersistencePair {
                dimension: 1,
                birth: filtration.edges[e].len,
                death: f64::INFINITY,
                representative: Some(tree_cycle(&filtration, &merges, e as u32)),
            });
        }
    }

    let mut diagram = PersistenceDiagram { pairs, provenance: String::new() };
    diagram.sort();
    Ok(diagram)
}

/// Column reduction of triangle boundaries. Returns, per edge, whether the
/// edge was paired as the lowest entry of a reduced column.
///
/// Merging edges are never the lowest entry of a nonzero column: the latest
/// edge of any cycle closes a path of earlier edges. So a triangle whose
/// latest edge precedes every unpaired cycle-creating edge reduces to zero
/// and is skipped, and the reduction stops once every such edge is paired.
fn reduce_triangles(filtration: &Filtration, merges: &[bool], pairs: &mut Vec<PersistencePair>) -> Vec<bool> {
    let m = filtration.edges.len();
    let mut filled = vec![false; m];
    let cycle_edges: Vec<u32> = (0..m as u32).filter(|&e| !merges[e as usize]).collect();
    // cycle_edges[next_open] is the earliest cycle-creating edge still unpaired.
    let mut next_open = 0usize;
    // owner[e]: index into `reduced` of the column whose lowest edge is e.
    let mut owner: Vec<u32> = vec![NO_EDGE; m];
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut group_start = 0usize;
    let mut batch: Vec<([u32; 3], [u32; 3])> = Vec::new();

    while group_start < m && next_open < cycle_edges.len() {
        let len = filtration.edges[group_start].len;
        let mut group_end = group_start + 1;
        while group_end < m && filtration.edges[group_end].len == len {
            group_end += 1;
        }

        // Triangles of diameter `len` are those whose latest edge lies in
        // this group; each is found once, from that edge.
        batch.clear();
        for e in group_start.max(cycle_edges[next_open] as usize)..group_end {
            let (i, j) = filtration.endpoints(e as u32);
            for k in 0..filtration.n {
                let (ik, jk) = (filtration.edge(i, k), filtration.edge(j, k));
                if k == i || k == j || ik == NO_EDGE || jk == NO_EDGE || ik > e as u32 || jk > e as u32 {
                    continue;
                }
                let mut verts = [i as u32, j as u32, k as u32];
                verts.sort_unstable();
                let mut boundary = [ik, jk, e as u32];
                boundary.sort_unstable();
                batch.push((verts, boundary));
            }
        }
        batch.sort_unstable_by_key(|t| t.0);

        for (_, boundary) in &batch {
            if next_open == cycle_edges.len() {
                break;
            }
            if boundary[2] < cycle_edges[next_open] {
                continue;
            }
            let mut column = boundary.to_vec();
            while let Some(&low) = column.last() {
                match owner[low as usize] {
                    NO_EDGE => break,
                    col => column = symmetric_difference(&column, &reduced[col as usize]),
                }
            }
            let Some(&low) = column.last() else { continue };
            let birth = filtration.edges[low as usize].len;
            if len > birth {
                pairs.push(PersistencePair {
                    dimension: 1,
                    birth,
                    death: len,
                    representative: Some(column.iter().map(|&e| filtration.endpoints(e)).collect()),
                });
            }
            owner[low as usize] = reduced.len() as u32;
            reduced.push(column);
            filled[low as usize] = true;
            while next_open < cycle_edges.len() && filled[cycle_edges[next_open] as usize] {
                next_open += 1;
            }
        }
        group_start = group_end;
    }
    filled
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            core::cmp::Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            core::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

/// The cycle closed by cycle-creating edge `e`: the edge plus the path
/// joining its endpoints in the spanning forest of earlier merging edges.
fn tree_cycle(filtration: &Filtration, merges: &[bool], e: u32) -> Vec<(usize, usize)> {
    let n = filtration.n;
    let mut adjacency: Vec<Vec<(usize, u32)>> = vec![Vec::new(); n];
    for f in 0..e {
        if merges[f as usize] {
            let (a, b) = filtration.endpoints(f);
            adjacency[a].push((b, f));
            adjacency[b].push((a, f));
        }
    }
    let (start, goal) = filtration.endpoints(e);
    let mut via: Vec<Option<u32>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        if v == goal {
            break;
        }
        for &(w, f) in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(f);
                queue.push_back(w);
            }
        }
    }
    let mut cycle = vec![e];
    let mut v = goal;
    while let Some(f) = via[v] {
        cycle.push(f);
        let (a, b) = filtration.endpoints(f);
        v = if a == v { b } else { a };
    }
    cycle.sort_unstable();
    cycle.into_iter().map(|f| filtration.endpoints(f)).collect()
}
