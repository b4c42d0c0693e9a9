use std::collections::HashMap;
use std::sync::Arc;

use super::consts::{dyadic_pitch, round_up, TileConstants};
use super::embed::{layout, CellLayout, Embedding, Graph};
use super::tile::{build_tile, Side, Tile, TileKind, Transform};
use super::GadgetError;
use crate::geom::{Point, Rect};
use crate::io::Instance;
use crate::par_map;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TileCounts {
    pub n: usize,
    pub n_b: usize,
    pub n_p: usize,
    pub n_c: usize,
}

impl TileCounts {
    /// Disks the forward direction adds besides the node centers.
    pub fn base_budget(&self, c: usize) -> usize {
        3 * self.n * (c - 1) / 2 + (c - 2) * self.n_b + (c - 1) * self.n_p + c * self.n_c
    }
}

#[derive(Clone, Debug)]
pub struct PlacedTile {
    pub cell: (usize, usize),
    /// The tile in local coordinates, already rotated or mirrored.
    pub tile: Arc<Tile>,
    pub origin: Point,
    /// Edge index (into the embedding's edge list) and position along it.
    pub edge: Option<(usize, usize)>,
    pub vertex: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct GadgetLayout {
    pub consts: TileConstants,
    pub instance: Instance,
    pub tiles: Vec<PlacedTile>,
    pub counts: TileCounts,
    /// `(u, v)` per embedding edge, in cell order from `u` to `v`.
    pub edges: Vec<(usize, usize)>,
    /// Placed-tile indices along each edge, node tiles included.
    pub edge_tiles: Vec<Vec<usize>>,
    pub vertex_tiles: Vec<usize>,
}

/// Tile, edge position and vertex for one occupied cell.
type Slot = (Arc<Tile>, Option<(usize, usize)>, Option<usize>);

/// All symmetric images of the canonical tiles.
struct Library {
    variants: HashMap<TileKind, Vec<Arc<Tile>>>,
    filler: Arc<Tile>,
}

impl Library {
    fn new(k: &TileConstants) -> Result<Library, GadgetError> {
        let kinds = [TileKind::Filler, TileKind::StraightChannel, TileKind::TwistedChannel, TileKind::ParityChannel, TileKind::Bend, TileKind::Node];
        let built = par_map!(kinds, |&kind| build_tile(kind, k, None));
        let mut variants = HashMap::new();
        let mut filler = None;
        for t in built {
            let t = t?;
            if t.kind == TileKind::Filler {
                filler = Some(Arc::new(t));
                continue;
            }
            let v: Vec<Arc<Tile>> = Transform::all().map(|tr| Arc::new(t.transformed(tr, k.h_chan))).collect();
            variants.insert(t.kind, v);
        }
        Ok(Library { variants, filler: filler.expect("filler built") })
    }

    /// A variant of `kind` with ports exactly on `sides`, optionally with a
    /// given phase on `entry`.
    fn find(&self, kind: TileKind, sides: &[Side], entry: Option<(Side, u8)>) -> Option<Arc<Tile>> {
        self.variants[&kind]
            .iter()
            .find(|t| {
                t.ports.len() == sides.len()
                    && sides.iter().all(|&s| t.port(s).is_some())
                    && entry.is_none_or(|(s, p)| t.port(s).is_some_and(|q| q.phase == p))
            })
            .cloned()
    }
}

fn phase(t: &Tile, s: Side) -> u8 {
    t.port(s).expect("port present").phase
}

/// Chooses tiles along one edge. `first` and `last` are the node tiles.
fn route(lib: &Library, cells: &[(i64, i64)], exits: &[Side], first: &Tile, last: &Tile) -> Result<Vec<Arc<Tile>>, GadgetError> {
    let n = cells.len();
    let is_bend = |i: usize| i > 0 && i + 1 < n && exits[i - 1] != exits[i];
    let mut out: Vec<Arc<Tile>> = Vec::new();
    let mut p_in = phase(first, exits[0]);
    let mut i = 1;
    let mut first_run = true;
    while i + 1 < n {
        if is_bend(i) {
            let entry = exits[i - 1].opposite();
            let t = lib
                .find(TileKind::Bend, &[entry, exits[i]], Some((entry, p_in)))
                .ok_or_else(|| GadgetError::Constraint(format!("no bend fits phase {p_in} at cell {:?}", cells[i])))?;
            p_in = phase(&t, exits[i]);
            out.push(t);
            i += 1;
            continue;
        }
        // A straight run up to the next bend or node.
        let mut j = i;
        while j + 1 < n && !is_bend(j) {
            j += 1;
        }
        let run = i..j;
        let target_side = exits[j - 1];
        let wanted: Vec<u8> = if j + 1 == n {
            vec![phase(last, target_side.opposite())]
        } else {
            let bend_entry = target_side.opposite();
            (0..2u8).filter(|&p| lib.find(TileKind::Bend, &[bend_entry, exits[j]], Some((bend_entry, p))).is_some()).collect()
        };
        let parity = usize::from(first_run);
        let twist = if wanted.contains(&((p_in + parity as u8) % 2)) { 0 } else { 1 };
        if run.len() < parity + twist {
            return Err(GadgetError::Embedding(format!("straight run at {:?} is too short to align phases", cells[i])));
        }
        for (off, cell) in run.clone().enumerate() {
            let kind = if off < parity {
                TileKind::ParityChannel
            } else if off < parity + twist {
                TileKind::TwistedChannel
            } else {
                TileKind::StraightChannel
            };
            let ent = exits[cell - 1].opposite();
            let t = lib
                .find(kind, &[ent, exits[cell]], Some((ent, p_in)))
                .ok_or_else(|| GadgetError::Constraint(format!("no {kind:?} fits phase {p_in} at {:?}", cells[cell])))?;
            p_in = phase(&t, exits[cell]);
            out.push(t);
        }
        first_run = false;
        i = j;
    }
    if first_run {
        return Err(GadgetError::Embedding("edge has no straight cell for its parity tile".into()));
    }
    Ok(out)
}

/// Builds the full tiling and the instance. The node tiles are oriented so
/// that their missing arm faces the unused side of each vertex.
pub fn assemble_layout(graph: &Graph, emb: &Embedding, k: usize, consts: &TileConstants) -> Result<GadgetLayout, GadgetError> {
    let cl: CellLayout = layout(graph, emb)?;
    let lib = Library::new(consts)?;
    let c = consts.c;
    let side = 2.0 * c as f64;

    let mut used: Vec<Vec<Side>> = vec![Vec::new(); graph.n()];
    for p in &cl.paths {
        used[p.u].push(p.exit(0));
        used[p.v].push(p.exit(p.cells.len() - 2).opposite());
    }
    let mut node_tiles = Vec::new();
    for (v, sides) in used.iter().enumerate() {
        let t = lib
            .find(TileKind::Node, sides, None)
            .ok_or_else(|| GadgetError::Embedding(format!("vertex {v} uses sides {sides:?}, which no node orientation covers")))?;
        node_tiles.push(t);
    }

    let mut grid: HashMap<(i64, i64), Slot> = HashMap::new();
    for (v, &cell) in cl.vertex_cells.iter().enumerate() {
        grid.insert(cell, (node_tiles[v].clone(), None, Some(v)));
    }
    let mut counts = TileCounts { n: graph.n(), ..TileCounts::default() };
    for (e, p) in cl.paths.iter().enumerate() {
        let exits: Vec<Side> = (0..p.cells.len() - 1).map(|i| p.exit(i)).collect();
        let tiles = route(&lib, &p.cells, &exits, &node_tiles[p.u], &node_tiles[p.v])?;
        for (off, t) in tiles.into_iter().enumerate() {
            match t.kind {
                TileKind::Bend => counts.n_b += 1,
                TileKind::ParityChannel => counts.n_p += 1,
                _ => counts.n_c += 1,
            }
            grid.insert(p.cells[off + 1], (t, Some((e, off + 1)), None));
        }
    }

    let mut tiles = Vec::with_capacity(cl.a * cl.b);
    let mut index = HashMap::new();
    for i in 0..cl.a {
        for j in 0..cl.b {
            let key = (i as i64, j as i64);
            let (tile, edge, vertex) = grid.get(&key).cloned().unwrap_or((lib.filler.clone(), None, None));
            index.insert(key, tiles.len());
            tiles.push(PlacedTile { cell: (i, j), tile, origin: Point::new(side * i as f64, side * j as f64), edge, vertex });
        }
    }

    // Boundary disks on a left or bottom side belong to the neighbour.
    let pitch = if consts.round > 0.0 { dyadic_pitch(consts.round).min(2f64.powi(-32)) } else { 0.0 };
    let mut disks = Vec::new();
    for t in &tiles {
        for &p in &t.tile.disks {
            if (p.x.abs() < 1e-6 && t.cell.0 > 0) || (p.y.abs() < 1e-6 && t.cell.1 > 0) {
                continue;
            }
            let q = Point::new(t.origin.x + p.x, t.origin.y + p.y);
            disks.push(if pitch > 0.0 { Point::new(round_up(q.x, pitch), round_up(q.y, pitch)) } else { q });
        }
    }

    let edges: Vec<(usize, usize)> = cl.paths.iter().map(|p| (p.u, p.v)).collect();
    let edge_tiles = cl.paths.iter().map(|p| p.cells.iter().map(|&cell| index[&cell]).collect()).collect();
    let vertex_tiles = cl.vertex_cells.iter().map(|cell| index[cell]).collect();
    let k_total = k + counts.base_budget(c);
    let rect = Rect::new(side * cl.a as f64, side * cl.b as f64);
    let instance = Instance::new(rect, disks, 0, k_total);
    Ok(GadgetLayout { consts: *consts, instance, tiles, counts, edges, edge_tiles, vertex_tiles })
}

pub fn assemble_instance(graph: &Graph, emb: &Embedding, k: usize, consts: &TileConstants) -> Result<Instance, GadgetError> {
    Ok(assemble_layout(graph, emb, k, consts)?.instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::k4;
    use crate::geom::{validate_packing, Tolerance};

    #[test]
    fn k4_assembles_into_a_packing() {
        let (g, e) = k4();
        let l = assemble_layout(&g, &e, 1, &TileConstants::default()).unwrap();
        assert_eq!(l.counts, TileCounts { n: 4, n_b: 6, n_p: 6, n_c: 72 });
        assert_eq!(l.instance.k, 1 + 3 * 4 * 23 + 45 * 6 + 46 * 6 + 47 * 72);
        assert_eq!(l.instance.h, 0);
        assert_eq!((l.instance.rect.a, l.instance.rect.b), (19.0 * 94.0, 13.0 * 94.0));
        assert!(validate_packing(&l.instance.packing(), &Tolerance::default()).is_ok());
        let pitch = dyadic_pitch(1e-6).min(2f64.powi(-32));
        assert!(l.instance.disks.iter().all(|p| (p.x / pitch).fract() == 0.0 && (p.y / pitch).fract() == 0.0));
    }
}
