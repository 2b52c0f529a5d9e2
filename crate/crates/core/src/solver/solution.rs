//! Control points and the precomputed evaluation sums of the harmonic B-spline.

use super::green::avg_greens;
use super::system::LinearSystem;
use crate::discretize::AdjacencyGraph;
use crate::document::Rgb;
use crate::geometry::Point;
use std::collections::BTreeMap;

/// `A_j f_j` of an interior cell with a nonzero Laplacian.
#[derive(Clone, Debug, PartialEq)]
pub struct SourceTerm {
    pub node: usize,
    pub weight: Rgb,
}

/// Net flux `Σ â_ij (λ_i − λ_j)` of a boundary cell over its non-exterior edges.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxTerm {
    pub node: usize,
    pub flux: Rgb,
}

/// A boundary cell's value and its edges to exterior unit cells (center, â).
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletTerm {
    pub node: usize,
    pub lambda: Rgb,
    pub outer: Vec<(Point, f64)>,
}

/// One cell-averaged kernel with its combined per-channel weight.
#[derive(Copy, Clone, Debug, PartialEq)]
struct PotentialTerm {
    center: Point,
    size: f64,
    weight: Rgb,
}

#[derive(Clone, Debug)]
pub struct SplineSolution {
    /// control points over all nodes: solved interior values then boundary values
    pub lambda: [Vec<f64>; 3],
    pub source_terms: Vec<SourceTerm>,
    pub flux_terms: Vec<FluxTerm>,
    pub dirichlet_terms: Vec<DirichletTerm>,
    /// constant added to every sum; the Dirichlet terms carry `λ − offset`
    pub offset: Rgb,
    cells: Vec<(Point, f64)>,
    fused: Vec<PotentialTerm>,
}

fn rgb(v: &[Vec<f64>; 3], i: usize) -> Rgb {
    [v[0][i], v[1][i], v[2][i]]
}

/// Precomputes the three evaluation sums from the solved control points.
pub fn build_solution(lambda_i: &[Vec<f64>; 3], sys: &LinearSystem, adj: &AdjacencyGraph) -> SplineSolution {
    let ni = adj.n_interior;
    let lambda: [Vec<f64>; 3] = std::array::from_fn(|c| lambda_i[c].iter().chain(&sys.lambda_b[c]).copied().collect());
    let cells: Vec<(Point, f64)> = adj.nodes.iter().map(|n| (n.center, n.size)).collect();
    let offset: Rgb = std::array::from_fn(|c| sys.reference(c));

    let source_terms: Vec<SourceTerm> = (0..ni)
        .filter_map(|k| {
            let w = [sys.b[0][k], sys.b[1][k], sys.b[2][k]];
            (w != [0.0; 3]).then_some(SourceTerm { node: k, weight: w })
        })
        .collect();

    let mut flux = vec![[0.0; 3]; adj.nodes.len()];
    for e in &adj.edges {
        for c in 0..3 {
            let d = e.a * (lambda[c][e.i] - lambda[c][e.j]);
            if e.j >= ni {
                flux[e.j][c] += d;
            }
            if e.i >= ni {
                flux[e.i][c] -= d;
            }
        }
    }
    let flux_terms: Vec<FluxTerm> = (ni..adj.nodes.len()).map(|j| FluxTerm { node: j, flux: flux[j] }).collect();

    let mut outer: BTreeMap<usize, Vec<(Point, f64)>> = BTreeMap::new();
    for o in &adj.outer {
        outer.entry(o.node).or_default().push((o.center(), o.a));
    }
    let dirichlet_terms: Vec<DirichletTerm> = outer
        .into_iter()
        .map(|(node, outer)| DirichletTerm {
            node,
            lambda: rgb(&lambda, node),
            outer,
        })
        .collect();

    // fuse all sums into one weight per distinct cell
    let key = |c: Point, s: f64| ((2.0 * c.x) as i64, (2.0 * c.y) as i64, s as i64);
    let mut acc: BTreeMap<(i64, i64, i64), PotentialTerm> = BTreeMap::new();
    let mut push = |c: Point, s: f64, w: Rgb| {
        let t = acc.entry(key(c, s)).or_insert(PotentialTerm {
            center: c,
            size: s,
            weight: [0.0; 3],
        });
        for k in 0..3 {
            t.weight[k] += w[k];
        }
    };
    for t in &source_terms {
        push(cells[t.node].0, cells[t.node].1, t.weight);
    }
    for t in &flux_terms {
        push(cells[t.node].0, cells[t.node].1, t.flux);
    }
    for t in &dirichlet_terms {
        let total: f64 = t.outer.iter().map(|o| o.1).sum();
        let l: Rgb = std::array::from_fn(|k| t.lambda[k] - offset[k]);
        push(cells[t.node].0, cells[t.node].1, l.map(|l| -l * total));
        for &(c, a) in &t.outer {
            push(c, 1.0, l.map(|l| l * a));
        }
    }
    let fused = acc.into_values().filter(|t| t.weight != [0.0; 3]).collect();

    SplineSolution {
        lambda,
        source_terms,
        flux_terms,
        dirichlet_terms,
        offset,
        cells,
        fused,
    }
}

impl SplineSolution {
    pub fn node_value(&self, node: usize) -> Rgb {
        rgb(&self.lambda, node)
    }

    /// `u(x)` in grid coordinates. Accumulation order is fixed, so the result does
    /// not depend on which thread evaluates it.
    pub fn eval_point(&self, x: Point) -> Rgb {
        let mut u = self.offset;
        for t in &self.fused {
            let g = avg_greens(x, t.center, t.size);
            u[0] += t.weight[0] * g;
            u[1] += t.weight[1] * g;
            u[2] += t.weight[2] * g;
        }
        u
    }

    /// Same value from the three separate sums.
    pub fn eval_terms(&self, x: Point) -> Rgb {
        let mut u = self.offset;
        let g = |n: usize| avg_greens(x, self.cells[n].0, self.cells[n].1);
        for t in &self.source_terms {
            let gj = g(t.node);
            for c in 0..3 {
                u[c] += t.weight[c] * gj;
            }
        }
        for t in &self.flux_terms {
            let gj = g(t.node);
            for c in 0..3 {
                u[c] += t.flux[c] * gj;
            }
        }
        for t in &self.dirichlet_terms {
            let gj = g(t.node);
            for &(e, a) in &t.outer {
                let d = a * (avg_greens(x, e, 1.0) - gj);
                for c in 0..3 {
                    u[c] += (t.lambda[c] - self.offset[c]) * d;
                }
            }
        }
        u
    }

    /// Number of kernel evaluations per point.
    pub fn term_count(&self) -> usize {
        self.fused.len()
    }
}

/// `ψ_j(x) = Σ_i â_ij (Ḡ_i(x) − Ḡ_j(x))` over every neighbour of node `j`,
/// exterior cells included.
pub fn basis_eval(j: usize, x: Point, adj: &AdjacencyGraph) -> f64 {
    let gj = avg_greens(x, adj.nodes[j].center, adj.nodes[j].size);
    let mut s = 0.0;
    for e in &adj.edges {
        let i = if e.i == j {
            e.j
        } else if e.j == j {
            e.i
        } else {
            continue;
        };
        s += e.a * (avg_greens(x, adj.nodes[i].center, adj.nodes[i].size) - gj);
    }
    for o in adj.outer.iter().filter(|o| o.node == j) {
        s += o.a * (avg_greens(x, o.center(), 1.0) - gj);
    }
    s
}

/// `offset + Σ_j (λ_j − offset) ψ_j(x)` evaluated basis by basis.
pub fn eval_direct(sol: &SplineSolution, adj: &AdjacencyGraph, x: Point) -> Rgb {
    let mut u = sol.offset;
    for j in 0..adj.nodes.len() {
        let p = basis_eval(j, x, adj);
        for c in 0..3 {
            u[c] += (sol.lambda[c][j] - sol.offset[c]) * p;
        }
    }
    u
}
