//! Square-grid lattices on a torus or a planar patch, with holes.
//!
//! Vertex `(r, c)` sits at `x = c, y = r`. Horizontal edge `h(r, c)` runs
//! `(r, c) -> (r, c+1)` and vertical edge `v(r, c)` runs `(r, c) -> (r+1, c)`.
//! Cell `(r, c)` is the unit square with lower-left corner `(r, c)`; its
//! counterclockwise cycle from that corner is `h(r,c)`, `v(r,c+1)`,
//! `h(r+1,c)^{-1}`, `v(r,c)^{-1}`.
//!
//! A patch always carries an outer rim, modelled as hole 0 whose region is
//! everything outside the grid.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{parse_subgroup, FiniteGroup, Subgroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Torus,
    Patch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    /// Removed cells as `[row, col]`.
    pub plaquettes: Vec<[usize; 2]>,
    /// Subgroup spec for the rim, e.g. `trivial`, `full`, `e,(12)`.
    pub boundary: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub topology: Topology,
    pub rows: usize,
    pub cols: usize,
    /// Boundary of the outer rim of a patch; `full` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<String>,
    #[serde(default)]
    pub holes: Vec<HoleSpec>,
}

impl LatticeSpec {
    pub fn torus(rows: usize, cols: usize) -> Self {
        LatticeSpec {
            topology: Topology::Torus,
            rows,
            cols,
            outer: None,
            holes: Vec::new(),
        }
    }

    pub fn disk(rows: usize, cols: usize, outer: &str) -> Self {
        LatticeSpec {
            topology: Topology::Patch,
            rows,
            cols,
            outer: Some(outer.to_string()),
            holes: Vec::new(),
        }
    }

    /// Patch with a single removed cell at the centre.
    pub fn annulus(rows: usize, cols: usize, outer: &str, inner: &str) -> Self {
        let mut spec = Self::disk(rows, cols, outer);
        spec.holes.push(HoleSpec {
            plaquettes: vec![[rows / 2, cols / 2]],
            boundary: inner.to_string(),
        });
        spec
    }

    /// Parses `torus:RxC`, `disk:RxC`, `annulus:RxC` or an inline JSON spec.
    /// `outer` and `inner` fill in the rim boundaries of the shorthands.
    pub fn parse(s: &str, outer: &str, inner: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| Error::Parse(format!("lattice JSON: {e}")));
        }
        let (kind, dims) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("unknown lattice `{s}`")))?;
        let (r, c) = dims
            .split_once('x')
            .ok_or_else(|| Error::Parse(format!("lattice size must be RxC, got `{dims}`")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad lattice size `{dims}`")))
        };
        let (rows, cols) = (parse(r)?, parse(c)?);
        match kind {
            "torus" => Ok(Self::torus(rows, cols)),
            "disk" => Ok(Self::disk(rows, cols, outer)),
            "annulus" => Ok(Self::annulus(rows, cols, outer, inner)),
            other => Err(Error::Parse(format!("unknown lattice kind `{other}`"))),
        }
    }
}

/// An adjacent region of an edge: a retained plaquette or a hole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Face {
    Plaquette(usize),
    Hole(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum End {
    Tail,
    Head,
}

#[derive(Debug, Clone, Serialize)]
pub struct Vertex {
    pub row: usize,
    pub col: usize,
    /// Hole whose rim this vertex lies on.
    pub rim: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub horizontal: bool,
    pub row: usize,
    pub col: usize,
    pub left: Face,
    pub right: Face,
    pub rim: Option<usize>,
}

impl Edge {
    pub fn label(&self) -> String {
        format!("{}({},{})", if self.horizontal { 'h' } else { 'v' }, self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleStep {
    pub edge: usize,
    /// Traversed tail to head; the plaquette is then on the left of the edge.
    pub forward: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Plaquette {
    pub row: usize,
    pub col: usize,
    pub base: usize,
    pub cycle: Vec<CycleStep>,
}

#[derive(Debug, Clone)]
pub struct Hole {
    pub index: usize,
    pub outer: bool,
    pub cells: Vec<(usize, usize)>,
    pub removed_vertices: Vec<(usize, usize)>,
    pub removed_edges: Vec<String>,
    pub rim_edges: Vec<usize>,
    pub rim_vertices: Vec<usize>,
    pub boundary: Subgroup,
    pub boundary_spec: String,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    spec: LatticeSpec,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    plaquettes: Vec<Plaquette>,
    holes: Vec<Hole>,
    stars: Vec<Vec<(usize, End)>>,
    vertex_at: HashMap<(usize, usize), usize>,
    edge_at: HashMap<(bool, usize, usize), usize>,
    cell_face: HashMap<(usize, usize), Face>,
}

/// Region of a geometric cell position before compaction.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Region {
    Cell(usize, usize),
    Hole(usize),
}

impl Lattice {
    pub fn build(spec: &LatticeSpec, g: &FiniteGroup) -> Result<Lattice> {
        let (rows, cols) = (spec.rows, spec.cols);
        if rows == 0 || cols == 0 {
            return Err(Error::Lattice("rows and cols must be positive".into()));
        }
        let torus = spec.topology == Topology::Torus;
        if torus && spec.outer.is_some() {
            return Err(Error::Lattice("a torus has no outer rim".into()));
        }
        let mut boundaries = Vec::new();
        if !torus {
            let outer = spec.outer.clone().unwrap_or_else(|| "full".to_string());
            boundaries.push((outer, true, Vec::new()));
        }
        for h in &spec.holes {
            let cells: Vec<(usize, usize)> = h.plaquettes.iter().map(|p| (p[0], p[1])).collect();
            boundaries.push((h.boundary.clone(), false, cells));
        }

        let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
        for (hi, (_, _, cells)) in boundaries.iter().enumerate() {
            for &(r, c) in cells {
                if r >= rows || c >= cols {
                    return Err(Error::Lattice(format!("hole cell ({r},{c}) outside the grid")));
                }
                if owner.insert((r, c), hi).is_some() {
                    return Err(Error::Lattice(format!("cell ({r},{c}) listed twice")));
                }
            }
        }
        for (hi, (_, outer, cells)) in boundaries.iter().enumerate() {
            if !outer {
                check_simply_connected(cells, rows, cols, torus)
                    .map_err(|e| Error::Lattice(format!("hole {hi}: {e}")))?;
            }
        }
        if owner.len() == rows * cols {
            return Err(Error::Lattice("holes remove every cell".into()));
        }

        let region = |r: i64, c: i64| -> Region {
            let (r, c) = if torus {
                (r.rem_euclid(rows as i64) as usize, c.rem_euclid(cols as i64) as usize)
            } else if r < 0 || c < 0 || r >= rows as i64 || c >= cols as i64 {
                return Region::Hole(0);
            } else {
                (r as usize, c as usize)
            };
            match owner.get(&(r, c)) {
                Some(&h) => Region::Hole(h),
                None => Region::Cell(r, c),
            }
        };

        // Vertices.
        let (vr, vc) = if torus { (rows, cols) } else { (rows + 1, cols + 1) };
        let mut vertices = Vec::new();
        let mut vertex_at = HashMap::new();
        let mut removed_vertices: Vec<Vec<(usize, usize)>> = vec![Vec::new(); boundaries.len()];
        for r in 0..vr {
            for c in 0..vc {
                let (ri, ci) = (r as i64, c as i64);
                let around = [
                    region(ri, ci),
                    region(ri - 1, ci),
                    region(ri, ci - 1),
                    region(ri - 1, ci - 1),
                ];
                let holes: BTreeSet<usize> = around
                    .iter()
                    .filter_map(|x| match x {
                        Region::Hole(h) => Some(*h),
                        Region::Cell(..) => None,
                    })
                    .collect();
                if holes.len() > 1 {
                    let hs: Vec<usize> = holes.into_iter().collect();
                    return Err(Error::Lattice(format!(
                        "vertex ({r},{c}) lies on the rims of holes {hs:?}; rims must be disjoint"
                    )));
                }
                let all_hole = around.iter().all(|x| matches!(x, Region::Hole(_)));
                if all_hole {
                    removed_vertices[*holes.iter().next().unwrap()].push((r, c));
                    continue;
                }
                vertex_at.insert((r, c), vertices.len());
                vertices.push(Vertex {
                    row: r,
                    col: c,
                    rim: holes.into_iter().next(),
                });
            }
        }
        let wrap_v = |r: usize, c: usize| -> (usize, usize) {
            if torus {
                (r % rows, c % cols)
            } else {
                (r, c)
            }
        };

        // Edges.
        let mut retained_cells: Vec<(usize, usize)> = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if !owner.contains_key(&(r, c)) {
                    retained_cells.push((r, c));
                }
            }
        }
        let mut cell_face: HashMap<(usize, usize), Face> = HashMap::new();
        for (p, &rc) in retained_cells.iter().enumerate() {
            cell_face.insert(rc, Face::Plaquette(p));
        }
        for (&rc, &h) in &owner {
            cell_face.insert(rc, Face::Hole(h));
        }
        let to_face = |x: Region| match x {
            Region::Cell(r, c) => cell_face[&(r, c)],
            Region::Hole(h) => Face::Hole(h),
        };

        let mut edges = Vec::new();
        let mut edge_at = HashMap::new();
        let mut removed_edges: Vec<Vec<String>> = vec![Vec::new(); boundaries.len()];
        let (hr, hc) = if torus { (rows, cols) } else { (rows + 1, cols) };
        let (wr, wc) = if torus { (rows, cols) } else { (rows, cols + 1) };
        let mut push_edge = |horizontal: bool, r: usize, c: usize| -> Result<()> {
            let (ri, ci) = (r as i64, c as i64);
            let (left, right, tail, head) = if horizontal {
                (region(ri, ci), region(ri - 1, ci), (r, c), wrap_v(r, c + 1))
            } else {
                (region(ri, ci - 1), region(ri, ci), (r, c), wrap_v(r + 1, c))
            };
            let label = format!("{}({r},{c})", if horizontal { 'h' } else { 'v' });
            if let (Region::Hole(a), Region::Hole(b)) = (left, right) {
                if a == b {
                    removed_edges[a].push(label);
                    return Ok(());
                }
                return Err(Error::Lattice(format!("edge {label} separates holes {a} and {b}")));
            }
            let rim = match (left, right) {
                (Region::Hole(h), _) | (_, Region::Hole(h)) => Some(h),
                _ => None,
            };
            edge_at.insert((horizontal, r, c), edges.len());
            edges.push(Edge {
                tail: vertex_at[&tail],
                head: vertex_at[&head],
                horizontal,
                row: r,
                col: c,
                left: to_face(left),
                right: to_face(right),
                rim,
            });
            Ok(())
        };
        for r in 0..hr {
            for c in 0..hc {
                push_edge(true, r, c)?;
            }
        }
        for r in 0..wr {
            for c in 0..wc {
                push_edge(false, r, c)?;
            }
        }

        // Plaquettes.
        let mut plaquettes = Vec::new();
        for &(r, c) in &retained_cells {
            let e = |horizontal: bool, r: usize, c: usize| -> usize {
                let (r, c) = if torus {
                    if horizontal {
                        (r % rows, c)
                    } else {
                        (r, c % cols)
                    }
                } else {
                    (r, c)
                };
                edge_at[&(horizontal, r, c)]
            };
            let cycle = vec![
                CycleStep { edge: e(true, r, c), forward: true },
                CycleStep { edge: e(false, r, c + 1), forward: true },
                CycleStep { edge: e(true, r + 1, c), forward: false },
                CycleStep { edge: e(false, r, c), forward: false },
            ];
            plaquettes.push(Plaquette {
                row: r,
                col: c,
                base: vertex_at[&(r, c)],
                cycle,
            });
        }

        let mut stars = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            stars[e.tail].push((i, End::Tail));
            stars[e.head].push((i, End::Head));
        }

        let mut holes = Vec::new();
        for (hi, (bspec, outer, cells)) in boundaries.into_iter().enumerate() {
            let boundary = parse_subgroup(g, &bspec)?;
            let rim_edges: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].rim == Some(hi)).collect();
            let rim_vertices: Vec<usize> =
                (0..vertices.len()).filter(|&i| vertices[i].rim == Some(hi)).collect();
            let mut cells = cells;
            cells.sort_unstable();
            holes.push(Hole {
                index: hi,
                outer,
                cells,
                removed_vertices: std::mem::take(&mut removed_vertices[hi]),
                removed_edges: std::mem::take(&mut removed_edges[hi]),
                rim_edges,
                rim_vertices,
                boundary,
                boundary_spec: bspec,
            });
        }

        let lattice = Lattice {
            spec: spec.clone(),
            vertices,
            edges,
            plaquettes,
            holes,
            stars,
            vertex_at,
            edge_at,
            cell_face,
        };
        lattice.check()?;
        Ok(lattice)
    }

    /// Closed plaquette cycles, consistent side flags and the Euler count.
    fn check(&self) -> Result<()> {
        for (pi, p) in self.plaquettes.iter().enumerate() {
            let mut at = p.base;
            for s in &p.cycle {
                let e = &self.edges[s.edge];
                let (from, to) = if s.forward { (e.tail, e.head) } else { (e.head, e.tail) };
                if from != at {
                    return Err(Error::Lattice(format!("plaquette {pi} cycle is broken")));
                }
                let side = if s.forward { e.left } else { e.right };
                if side != Face::Plaquette(pi) {
                    return Err(Error::Lattice(format!("plaquette {pi} side flag mismatch")));
                }
                at = to;
            }
            if at != p.base {
                return Err(Error::Lattice(format!("plaquette {pi} cycle is not closed")));
            }
        }
        let chi = self.euler_characteristic();
        let expect = match self.spec.topology {
            Topology::Torus => -(self.holes.len() as i64),
            Topology::Patch => 1 - self.inner_holes().count() as i64,
        };
        if chi != expect {
            return Err(Error::Lattice(format!("Euler count {chi}, expected {expect}")));
        }
        Ok(())
    }

    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }
    pub fn topology(&self) -> Topology {
        self.spec.topology
    }
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }
    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }
    pub fn hole(&self, i: usize) -> Result<&Hole> {
        self.holes
            .get(i)
            .ok_or_else(|| Error::Lattice(format!("no hole with index {i}")))
    }
    pub fn inner_holes(&self) -> impl Iterator<Item = &Hole> {
        self.holes.iter().filter(|h| !h.outer)
    }
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }
    /// Edges at a vertex with the end that touches it (a self-loop appears twice).
    pub fn star(&self, v: usize) -> &[(usize, End)] {
        &self.stars[v]
    }
    pub fn vertex_at(&self, row: usize, col: usize) -> Option<usize> {
        self.vertex_at.get(&(row, col)).copied()
    }
    pub fn h_edge(&self, row: usize, col: usize) -> Option<usize> {
        self.edge_at.get(&(true, row, col)).copied()
    }
    pub fn v_edge(&self, row: usize, col: usize) -> Option<usize> {
        self.edge_at.get(&(false, row, col)).copied()
    }
    /// Face occupying grid cell `(row, col)`; `None` outside the grid.
    pub fn cell(&self, row: usize, col: usize) -> Option<Face> {
        self.cell_face.get(&(row, col)).copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.plaquettes.len() as i64
    }

    /// Vertices whose whole star is retained and which lie on no rim.
    pub fn is_interior(&self, v: usize) -> bool {
        self.vertices[v].rim.is_none()
    }

    /// Plaquettes whose cycle contains the edge.
    pub fn edge_plaquettes(&self, e: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for f in [self.edges[e].left, self.edges[e].right] {
            if let Face::Plaquette(p) = f {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// Centre of a face in the `(x, y)` plane; `None` for the outer region.
    pub fn face_center(&self, f: Face) -> Option<(f64, f64)> {
        match f {
            Face::Plaquette(p) => {
                let p = &self.plaquettes[p];
                Some((p.col as f64 + 0.5, p.row as f64 + 0.5))
            }
            Face::Hole(h) => {
                let h = &self.holes[h];
                if h.outer {
                    return None;
                }
                let n = h.cells.len() as f64;
                let x = h.cells.iter().map(|c| c.1 as f64 + 0.5).sum::<f64>() / n;
                let y = h.cells.iter().map(|c| c.0 as f64 + 0.5).sum::<f64>() / n;
                Some((x, y))
            }
        }
    }
}

/// Connected (4-adjacency) with Euler characteristic 1 as a closed cell complex.
fn check_simply_connected(
    cells: &[(usize, usize)],
    rows: usize,
    cols: usize,
    torus: bool,
) -> std::result::Result<(), String> {
    if cells.is_empty() {
        return Err("no cells".into());
    }
    let set: BTreeSet<(usize, usize)> = cells.iter().copied().collect();
    let neighbours = |(r, c): (usize, usize)| -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let (ri, ci) = (r as i64, c as i64);
        for (dr, dc) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (nr, nc) = (ri + dr, ci + dc);
            if torus {
                out.push((nr.rem_euclid(rows as i64) as usize, nc.rem_euclid(cols as i64) as usize));
            } else if nr >= 0 && nc >= 0 && (nr as usize) < rows && (nc as usize) < cols {
                out.push((nr as usize, nc as usize));
            }
        }
        out
    };
    let start = cells[0];
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in neighbours(x) {
            if set.contains(&y) && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    if seen.len() != set.len() {
        return Err("cells are not connected".into());
    }
    let wrap = |r: usize, c: usize| {
        if torus {
            (r % rows, c % cols)
        } else {
            (r, c)
        }
    };
    let mut verts = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for &(r, c) in &set {
        for (dr, dc) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            verts.insert(wrap(r + dr, c + dc));
        }
        edges.insert((true, wrap(r, c)));
        edges.insert((true, wrap(r + 1, c)));
        edges.insert((false, wrap(r, c)));
        edges.insert((false, wrap(r, c + 1)));
    }
    let chi = verts.len() as i64 - edges.len() as i64 + set.len() as i64;
    if chi != 1 {
        return Err("cells are not simply connected".into());
    }
    Ok(())
}
