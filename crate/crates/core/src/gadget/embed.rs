use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::tile::Side;
use super::GadgetError;

/// Undirected simple graph as an adjacency list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub adjacency: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingEdge {
    pub u: usize,
    pub v: usize,
    /// Points from `u` to `v`; the endpoints may be omitted.
    pub polyline: Vec<[i64; 2]>,
}

/// Rectilinear drawing on the integer grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub vertices: Vec<[i64; 2]>,
    pub edges: Vec<EmbeddingEdge>,
}

impl Graph {
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (u, nb) in self.adjacency.iter().enumerate() {
            for &v in nb {
                out.insert((u.min(v), u.max(v)));
            }
        }
        out.into_iter().collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency.get(u).is_some_and(|nb| nb.contains(&v))
    }

    /// Simple, symmetric and 3-regular.
    pub fn check_cubic(&self) -> Result<(), GadgetError> {
        let n = self.n();
        for (u, nb) in self.adjacency.iter().enumerate() {
            let distinct: BTreeSet<usize> = nb.iter().copied().collect();
            if distinct.len() != nb.len() {
                return Err(GadgetError::Embedding(format!("vertex {u} has a repeated neighbour")));
            }
            for &v in nb {
                if v >= n {
                    return Err(GadgetError::Embedding(format!("vertex {u} lists unknown neighbour {v}")));
                }
                if v == u {
                    return Err(GadgetError::Embedding(format!("vertex {u} has a loop")));
                }
                if !self.adjacency[v].contains(&u) {
                    return Err(GadgetError::Embedding(format!("edge {u}-{v} is listed only on one side")));
                }
            }
            if nb.len() != 3 {
                return Err(GadgetError::Embedding(format!("graph is not cubic: vertex {u} has degree {}", nb.len())));
            }
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GraphJson {
    Plain(Vec<Vec<usize>>),
    Wrapped { adjacency: Vec<Vec<usize>> },
}

/// Accepts `[[1,2,3],[0,2,3],...]` or `{"adjacency": [...]}`.
pub fn parse_graph(bytes: &[u8]) -> Result<Graph, GadgetError> {
    let g: GraphJson = serde_json::from_slice(bytes).map_err(|e| GadgetError::Parse(e.to_string()))?;
    Ok(match g {
        GraphJson::Plain(adjacency) | GraphJson::Wrapped { adjacency } => Graph { adjacency },
    })
}

pub fn parse_embedding(bytes: &[u8]) -> Result<Embedding, GadgetError> {
    serde_json::from_slice(bytes).map_err(|e| GadgetError::Parse(e.to_string()))
}

const K4_GRAPH: &str = include_str!("../../data/k4.json");
const K4_EMBEDDING: &str = include_str!("../../data/k4_embedding.json");

/// The complete graph on four vertices with a bundled rectilinear drawing.
pub fn k4() -> (Graph, Embedding) {
    let g = parse_graph(K4_GRAPH.as_bytes()).expect("bundled graph parses");
    let e = parse_embedding(K4_EMBEDDING.as_bytes()).expect("bundled embedding parses");
    (g, e)
}

/// One edge routed through grid cells of the scaled drawing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct CellPath {
    pub u: usize,
    pub v: usize,
    /// All cells from `u`'s cell to `v`'s cell inclusive.
    pub cells: Vec<(i64, i64)>,
}

impl CellPath {
    /// Side of cell `i` facing cell `i + 1`.
    pub fn exit(&self, i: usize) -> Side {
        let (a, b) = (self.cells[i], self.cells[i + 1]);
        Side::from_step(b.0 - a.0, b.1 - a.1).expect("consecutive cells are adjacent")
    }

    pub fn is_bend(&self, i: usize) -> bool {
        i > 0 && i + 1 < self.cells.len() && self.exit(i - 1) != self.exit(i)
    }
}

/// The drawing scaled by three and shifted to the origin.
#[derive(Clone, Debug)]
pub(crate) struct CellLayout {
    pub a: usize,
    pub b: usize,
    pub vertex_cells: Vec<(i64, i64)>,
    pub paths: Vec<CellPath>,
}

/// Checks the drawing against the graph and rasterizes it.
pub(crate) fn layout(g: &Graph, e: &Embedding) -> Result<CellLayout, GadgetError> {
    g.check_cubic()?;
    if e.vertices.len() != g.n() {
        return Err(GadgetError::Embedding(format!("{} vertex positions for {} vertices", e.vertices.len(), g.n())));
    }
    let want: BTreeSet<(usize, usize)> = g.edges().into_iter().collect();
    let mut got = BTreeSet::new();
    for ed in &e.edges {
        if ed.u >= g.n() || ed.v >= g.n() {
            return Err(GadgetError::Embedding(format!("edge {}-{} names an unknown vertex", ed.u, ed.v)));
        }
        if !got.insert((ed.u.min(ed.v), ed.u.max(ed.v))) {
            return Err(GadgetError::Embedding(format!("edge {}-{} drawn twice", ed.u, ed.v)));
        }
    }
    if got != want {
        return Err(GadgetError::Embedding("drawn edges differ from the graph's edges".into()));
    }
    let x0 = e.vertices.iter().map(|p| p[0]).chain(e.edges.iter().flat_map(|ed| ed.polyline.iter().map(|p| p[0]))).min().unwrap_or(0);
    let y0 = e.vertices.iter().map(|p| p[1]).chain(e.edges.iter().flat_map(|ed| ed.polyline.iter().map(|p| p[1]))).min().unwrap_or(0);
    let scale = |p: [i64; 2]| (3 * (p[0] - x0), 3 * (p[1] - y0));
    let vertex_cells: Vec<(i64, i64)> = e.vertices.iter().map(|&p| scale(p)).collect();
    let mut owner: HashMap<(i64, i64), usize> = HashMap::new();
    for (i, &c) in vertex_cells.iter().enumerate() {
        if owner.insert(c, usize::MAX - i).is_some() {
            return Err(GadgetError::Embedding(format!("vertex {i} shares its position with another vertex")));
        }
    }
    let mut paths = Vec::new();
    for (ei, ed) in e.edges.iter().enumerate() {
        let mut pts: Vec<(i64, i64)> = ed.polyline.iter().map(|&p| scale(p)).collect();
        if pts.first() != Some(&vertex_cells[ed.u]) {
            pts.insert(0, vertex_cells[ed.u]);
        }
        if pts.last() != Some(&vertex_cells[ed.v]) {
            pts.push(vertex_cells[ed.v]);
        }
        let mut cells = vec![pts[0]];
        for w in pts.windows(2) {
            let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            if dx != 0 && dy != 0 {
                return Err(GadgetError::Embedding(format!("edge {}-{} has a segment that is not axis-parallel", ed.u, ed.v)));
            }
            let len = dx.abs() + dy.abs();
            if len < 3 {
                return Err(GadgetError::Embedding(format!("edge {}-{} has a segment shorter than one grid unit", ed.u, ed.v)));
            }
            for t in 1..=len {
                cells.push((w[0].0 + dx.signum() * t, w[0].1 + dy.signum() * t));
            }
        }
        for (i, &c) in cells.iter().enumerate() {
            let end = i == 0 || i + 1 == cells.len();
            match owner.get(&c) {
                Some(&o) if end && o > usize::MAX - g.n() => {}
                Some(_) => return Err(GadgetError::Embedding(format!("edge {}-{} crosses or touches another part of the drawing at {:?}", ed.u, ed.v, c))),
                None => {
                    owner.insert(c, ei);
                }
            }
        }
        if cells.len() < 4 {
            return Err(GadgetError::Embedding(format!("edge {}-{} is too short", ed.u, ed.v)));
        }
        paths.push(CellPath { u: ed.u, v: ed.v, cells });
    }
    // Bends next to a node or to another bend leave no room for alignment tiles.
    for p in &paths {
        let special: Vec<usize> = (0..p.cells.len()).filter(|&i| i == 0 || i + 1 == p.cells.len() || p.is_bend(i)).collect();
        for w in special.windows(2) {
            if w[1] - w[0] < 3 {
                return Err(GadgetError::Embedding(format!("edge {}-{} bends too close to a vertex or another bend", p.u, p.v)));
            }
        }
    }
    let a = owner.keys().map(|c| c.0).max().unwrap_or(0) as usize + 1;
    let b = owner.keys().map(|c| c.1).max().unwrap_or(0) as usize + 1;
    Ok(CellLayout { a, b, vertex_cells, paths })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_layout_counts() {
        let (g, e) = k4();
        let l = layout(&g, &e).unwrap();
        assert_eq!((l.a, l.b), (19, 13));
        let bends: usize = l.paths.iter().map(|p| (0..p.cells.len()).filter(|&i| p.is_bend(i)).count()).sum();
        let inner: usize = l.paths.iter().map(|p| p.cells.len() - 2).sum();
        assert_eq!(bends, 6);
        assert_eq!(inner, 84);
    }

    #[test]
    fn single_edge_is_not_cubic() {
        let g = parse_graph(b"[[1],[0]]").unwrap();
        let e = parse_embedding(br#"{"vertices":[[0,0],[1,0]],"edges":[{"u":0,"v":1,"polyline":[]}]}"#).unwrap();
        assert!(matches!(layout(&g, &e), Err(GadgetError::Embedding(m)) if m.contains("cubic")));
    }

    #[test]
    fn crossing_edges_are_rejected() {
        let (g, mut e) = k4();
        // Reroute 0-1 straight through vertex 3's column and the 3-2 edge.
        let i = e.edges.iter().position(|ed| (ed.u.min(ed.v), ed.u.max(ed.v)) == (0, 1)).unwrap();
        e.edges[i].polyline = vec![[1, 0], [1, 3], [5, 3], [5, 0]];
        assert!(matches!(layout(&g, &e), Err(GadgetError::Embedding(_))));
    }

    #[test]
    fn diagonal_segment_is_rejected() {
        let (g, mut e) = k4();
        e.edges[0].polyline = vec![];
        assert!(matches!(layout(&g, &e), Err(GadgetError::Embedding(_))));
    }
}
