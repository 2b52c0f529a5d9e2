//! Voronoi adjacency between quad-tree generators.
//!
//! Interior leaves get true Voronoi cells restricted to the interior leaves'
//! union; boundary samples keep their unit pixel as their cell. Coefficients are
//! `â = |shared edge| / |generator distance|`.

use super::quadtree::{CellClass, CellComplex};
use super::{DiscretizedSubdomain, LocalPixel, DIRS};
use crate::document::Rgb;
use crate::geometry::{Point, TaggedPolygon};
use std::collections::{BTreeMap, BTreeSet};

/// Coefficients below this are treated as degenerate edges and dropped.
const MIN_COEFFICIENT: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// interior quad-tree leaf (index into `CellComplex::cells`)
    Interior(usize),
    /// boundary sample (index into `DiscretizedSubdomain::boundary_samples`)
    Boundary(usize),
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct VoronoiNode {
    pub center: Point,
    pub size: f64,
    pub kind: NodeKind,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EdgeClass {
    InteriorEdge,
    InnerBoundary,
    OuterBoundary,
}

/// Edge between two generator nodes, `i < j`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct GraphEdge {
    pub i: usize,
    pub j: usize,
    pub a: f64,
    pub class: EdgeClass,
}

/// Edge from a boundary node to the exterior unit cell across one of its sides.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct OuterEdge {
    pub node: usize,
    pub exterior: (i64, i64),
    pub a: f64,
}

impl OuterEdge {
    pub fn center(&self) -> Point {
        Point::new(self.exterior.0 as f64 + 0.5, self.exterior.1 as f64 + 0.5)
    }
}

/// Generators ordered interior first, then boundary samples.
#[derive(Clone, Debug, Default)]
pub struct AdjacencyGraph {
    pub nodes: Vec<VoronoiNode>,
    pub n_interior: usize,
    pub edges: Vec<GraphEdge>,
    pub outer: Vec<OuterEdge>,
    /// `∬ f` over each interior node's Voronoi cell
    pub source: Vec<Rgb>,
    /// area of each interior node's Voronoi cell
    pub voronoi_area: Vec<f64>,
}

impl AdjacencyGraph {
    pub fn n_boundary(&self) -> usize {
        self.nodes.len() - self.n_interior
    }

    pub fn is_interior(&self, node: usize) -> bool {
        node < self.n_interior
    }

    /// Neighbour lists `(node, â)` over interior and inner-boundary edges.
    pub fn neighbours(&self) -> Vec<Vec<(usize, f64)>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            out[e.i].push((e.j, e.a));
            out[e.j].push((e.i, e.a));
        }
        out
    }
}

/// Builds the generator graph of one subdomain.
pub fn build_adjacency(cells: &CellComplex, sub: &DiscretizedSubdomain) -> AdjacencyGraph {
    let mut nodes = Vec::new();
    let mut node_of_cell = vec![usize::MAX; cells.cells.len()];
    for (ci, c) in cells.cells.iter().enumerate() {
        if c.class == CellClass::Interior {
            node_of_cell[ci] = nodes.len();
            nodes.push(VoronoiNode {
                center: c.center(),
                size: c.size as f64,
                kind: NodeKind::Interior(ci),
            });
        }
    }
    let n_interior = nodes.len();
    for (si, s) in sub.boundary_samples.iter().enumerate() {
        nodes.push(VoronoiNode {
            center: Point::new(s.pixel.0 as f64 + 0.5, s.pixel.1 as f64 + 0.5),
            size: 1.0,
            kind: NodeKind::Boundary(si),
        });
    }
    let sample_node = |s: u32| n_interior + s as usize;

    // interior candidates per interior leaf: itself plus every interior leaf touching it
    let interior_nodes: Vec<usize> = (0..n_interior).collect();
    let candidates: Vec<Vec<usize>> = interior_nodes
        .iter()
        .map(|&k| {
            let NodeKind::Interior(ci) = nodes[k].kind else { unreachable!() };
            let c = &cells.cells[ci];
            let mut set = BTreeSet::new();
            set.insert(k);
            let ring = (c.x - 1..=c.x + c.size)
                .flat_map(|x| [(x, c.y - 1), (x, c.y + c.size)])
                .chain((c.y..c.y + c.size).flat_map(|y| [(c.x - 1, y), (c.x + c.size, y)]));
            for (x, y) in ring {
                if sub.pixel(x, y) == LocalPixel::Interior {
                    if let Some(l) = cells.leaf_at(x, y) {
                        set.insert(node_of_cell[l]);
                    }
                }
            }
            set.into_iter().collect()
        })
        .collect();

    let mut source = vec![[0.0; 3]; n_interior];
    let mut voronoi_area = vec![0.0; n_interior];
    let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut add = |i: usize, j: usize, v: f64| {
        if i != j {
            *acc.entry((i.min(j), i.max(j))).or_insert(0.0) += v;
        }
    };

    for k in 0..n_interior {
        let NodeKind::Interior(ci) = nodes[k].kind else { unreachable!() };
        let cell = cells.cells[ci];
        let cand = &candidates[k];
        let (x0, y0) = (cell.x as f64, cell.y as f64);
        let (x1, y1) = (x0 + cell.size as f64, y0 + cell.size as f64);

        // Voronoi edges strictly inside the leaf
        for &i in cand {
            let ci_ = nodes[i].center;
            let mut poly = TaggedPolygon::rect(x0, y0, x1, y1, [usize::MAX; 4]);
            for &j in cand {
                if j == i {
                    continue;
                }
                let cj = nodes[j].center;
                let n = cj - ci_;
                let c = 0.5 * (cj.norm2() - ci_.norm2());
                poly = poly.clip(n, c, j);
                if poly.is_empty() {
                    break;
                }
            }
            let area = poly.area().abs();
            voronoi_area[i] += area;
            for c in 0..3 {
                source[i][c] += area * cell.f[c];
            }
            for (a, b, tag) in poly.edges() {
                if tag != usize::MAX {
                    add(i, tag, 0.5 * a.dist(b) / ci_.dist(nodes[tag].center));
                }
            }
        }

        // leaf sides, one unit segment at a time
        for (d, (dx, dy)) in DIRS.iter().enumerate() {
            for step in 0..cell.size {
                // pixel inside the leaf on this side, and the one across it
                let (px, py) = match d {
                    0 => (cell.x + cell.size - 1, cell.y + step),
                    1 => (cell.x, cell.y + step),
                    2 => (cell.x + step, cell.y + cell.size - 1),
                    _ => (cell.x + step, cell.y),
                };
                let (qx, qy) = (px + dx, py + dy);
                let (a, b) = unit_side(px, py, d);
                let inward = Point::new(-*dx as f64, -*dy as f64);
                match sub.pixel(qx, qy) {
                    LocalPixel::Interior => {
                        let other = node_of_cell[cells.leaf_at(qx, qy).expect("interior pixel without leaf")];
                        if other < k {
                            continue;
                        }
                        let mine = envelope(a, b, cand, &nodes, inward);
                        let theirs = envelope(a, b, &candidates[other], &nodes, -inward);
                        for (t0, t1, o1, o2) in merge(&mine, &theirs) {
                            if o1 != o2 {
                                add(o1, o2, (t1 - t0) / nodes[o1].center.dist(nodes[o2].center));
                            }
                        }
                    }
                    LocalPixel::Boundary => {
                        let Some(s) = sub.face_sample((qx, qy), d ^ 1) else {
                            continue;
                        };
                        let sn = sample_node(s);
                        for (t0, t1, o) in envelope(a, b, cand, &nodes, inward) {
                            add(o, sn, (t1 - t0) / nodes[o].center.dist(nodes[sn].center));
                        }
                    }
                    LocalPixel::Outside => {}
                }
            }
        }
    }

    // boundary samples: unit cells linked to boundary neighbours or to exterior cells
    let mut outer = Vec::new();
    for p in sub.boundary_pixels() {
        let here = sub.samples_at(p);
        for (d, (dx, dy)) in DIRS.iter().enumerate() {
            let q = (p.0 + dx, p.1 + dy);
            for &s in &here {
                let sn = sample_node(s);
                let linked = match sub.pixel(q.0, q.1) {
                    LocalPixel::Interior => sub.face_sample(p, d) == Some(s),
                    LocalPixel::Boundary => {
                        let there = sub.samples_at(q);
                        let partners: Vec<u32> = if here.len() == 1 && there.len() == 1 {
                            there
                        } else {
                            let side = sub.boundary_samples[s as usize].side;
                            there.into_iter().filter(|&t| sub.boundary_samples[t as usize].side == side).collect()
                        };
                        for &t in &partners {
                            // each pair is visited from both ends; count it once
                            if t > s {
                                continue;
                            }
                            add(sn, sample_node(t), 1.0);
                        }
                        !partners.is_empty()
                    }
                    LocalPixel::Outside => false,
                };
                if !linked {
                    outer.push(OuterEdge { node: sn, exterior: q, a: 1.0 });
                }
            }
        }
    }

    let edges = acc
        .into_iter()
        .filter(|&(_, a)| a > MIN_COEFFICIENT)
        .map(|((i, j), a)| GraphEdge {
            i,
            j,
            a,
            class: if j < n_interior { EdgeClass::InteriorEdge } else { EdgeClass::InnerBoundary },
        })
        .collect();
    AdjacencyGraph {
        nodes,
        n_interior,
        edges,
        outer,
        source,
        voronoi_area,
    }
}

/// Endpoints of the side of pixel `(x, y)` facing direction `d`.
fn unit_side(x: i64, y: i64, d: usize) -> (Point, Point) {
    let (x, y) = (x as f64, y as f64);
    match d {
        0 => (Point::new(x + 1.0, y), Point::new(x + 1.0, y + 1.0)),
        1 => (Point::new(x, y), Point::new(x, y + 1.0)),
        2 => (Point::new(x, y + 1.0), Point::new(x + 1.0, y + 1.0)),
        _ => (Point::new(x, y), Point::new(x + 1.0, y)),
    }
}

/// Lower envelope of squared distances to candidate centers along `a → b`, as
/// `(t0, t1, owner)` intervals in arc length. Exact ties prefer the center lying
/// further along `inward`, then the lower node index.
fn envelope(a: Point, b: Point, cand: &[usize], nodes: &[VoronoiNode], inward: Point) -> Vec<(f64, f64, usize)> {
    let len = a.dist(b);
    let u = (b - a) * (1.0 / len);
    // dist²(t) = α + β t + t²
    let coef: Vec<(f64, f64, f64, usize)> = cand
        .iter()
        .map(|&i| {
            let w = a - nodes[i].center;
            (w.norm2(), 2.0 * u.dot(w), -inward.dot(nodes[i].center - a), i)
        })
        .collect();
    let better = |p: &(f64, f64, f64, usize), q: &(f64, f64, f64, usize), t: f64| {
        let (fp, fq) = (p.0 + p.1 * t, q.0 + q.1 * t);
        let tol = 1e-12 * (1.0 + fp.abs().max(fq.abs()));
        if (fp - fq).abs() > tol {
            return fp < fq;
        }
        if (p.1 - q.1).abs() > 1e-12 {
            return p.1 < q.1;
        }
        if (p.2 - q.2).abs() > 1e-12 {
            return p.2 < q.2;
        }
        p.3 < q.3
    };
    let mut cur = 0;
    for i in 1..coef.len() {
        if better(&coef[i], &coef[cur], 0.0) {
            cur = i;
        }
    }
    let mut out = Vec::new();
    let mut t = 0.0;
    loop {
        // earliest later crossing where another candidate takes over
        let mut next: Option<(f64, usize)> = None;
        for (i, c) in coef.iter().enumerate() {
            if i == cur {
                continue;
            }
            let dslope = c.1 - coef[cur].1;
            if dslope >= 0.0 {
                continue;
            }
            let tc = (c.0 - coef[cur].0) / -dslope;
            if tc <= t + 1e-12 || tc >= len {
                continue;
            }
            match next {
                Some((tn, n)) if tc > tn + 1e-12 || (tc > tn - 1e-12 && !better(c, &coef[n], tc + 1e-9)) => {}
                _ => next = Some((tc, i)),
            }
        }
        match next {
            Some((tc, i)) => {
                out.push((t, tc, coef[cur].3));
                t = tc;
                cur = i;
            }
            None => {
                out.push((t, len, coef[cur].3));
                break;
            }
        }
    }
    out
}

/// Overlays two interval partitions of the same segment.
fn merge(a: &[(f64, f64, usize)], b: &[(f64, f64, usize)]) -> Vec<(f64, f64, usize, usize)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi, a[i].2, b[j].2));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}
