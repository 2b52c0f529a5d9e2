//! Assembly and sparse Cholesky solve of the control-point system.

use crate::discretize::{AdjacencyGraph, DiscretizedSubdomain, NodeKind};
use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use std::sync::atomic::{AtomicU64, Ordering};
use thiserror::Error;

static FACTORIZATIONS: AtomicU64 = AtomicU64::new(0);

/// Number of sparse factorizations performed by this process so far.
pub fn factorization_count() -> u64 {
    FACTORIZATIONS.load(Ordering::Relaxed)
}

/// Relative residual accepted after the solve.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("subdomain {subdomain}: {count} interior cells have no path to a boundary cell")]
    Singular { subdomain: usize, count: usize },
    #[error("subdomain {subdomain}: Cholesky factorization failed ({reason})")]
    Factorization { subdomain: usize, reason: String },
    #[error("subdomain {subdomain}: residual {residual:e} above tolerance")]
    Residual { subdomain: usize, residual: f64 },
}

/// `L^I λ^I = −b − L^B λ^B` per channel, with `L_ii = Σ â_ij`, `L_ij = −â_ij`
/// and `b_j` the integral of `f` over the Voronoi cell of node `j`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub subdomain: usize,
    pub n_interior: usize,
    pub n_boundary: usize,
    /// upper-and-lower triplets of `L^I` (row, col, value)
    pub l_i: Vec<(usize, usize, f64)>,
    /// `L^B` entries (interior row, boundary column, value)
    pub l_b: Vec<(usize, usize, f64)>,
    pub b: [Vec<f64>; 3],
    pub lambda_b: [Vec<f64>; 3],
}

impl LinearSystem {
    /// Dense copy of the interior block, for audits on small systems.
    pub fn dense_interior(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n_interior]; self.n_interior];
        for &(i, j, v) in &self.l_i {
            m[i][j] += v;
        }
        m
    }

    /// Right-hand side `−b − L^B λ^B` for one channel.
    pub fn rhs(&self, c: usize) -> Vec<f64> {
        let mut r: Vec<f64> = self.b[c].iter().map(|v| -v).collect();
        for &(i, j, v) in &self.l_b {
            r[i] -= v * self.lambda_b[c][j];
        }
        r
    }

    /// Midpoint of the boundary values of one channel. Solving for the offset
    /// from it keeps a constant boundary exact through the factorization.
    pub fn reference(&self, c: usize) -> f64 {
        let v = &self.lambda_b[c];
        if v.is_empty() {
            return 0.0;
        }
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        0.5 * (lo + hi)
    }

    /// Right-hand side for the offsets `λ^I − r`: `−b − L^B (λ^B − r)`.
    fn offset_rhs(&self, c: usize, r: f64) -> Vec<f64> {
        let mut out: Vec<f64> = self.b[c].iter().map(|v| -v).collect();
        for &(i, j, v) in &self.l_b {
            out[i] -= v * (self.lambda_b[c][j] - r);
        }
        out
    }

    /// `L^I x − rhs` infinity norm relative to the data scale.
    pub fn relative_residual(&self, c: usize, x: &[f64]) -> f64 {
        let rhs = self.rhs(c);
        let mut r: Vec<f64> = rhs.iter().map(|v| -v).collect();
        for &(i, j, v) in &self.l_i {
            r[i] += v * x[j];
        }
        let mut lb = vec![0.0; self.n_interior];
        for &(i, j, v) in &self.l_b {
            lb[i] += v * self.lambda_b[c][j];
        }
        let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        inf(&r) / (inf(&self.b[c]) + inf(&lb) + 1.0)
    }
}

/// Builds `L^I`, `L^B`, `b` and the boundary values of one subdomain.
pub fn assemble_system(adj: &AdjacencyGraph, sub: &DiscretizedSubdomain) -> Result<LinearSystem, SolveError> {
    let ni = adj.n_interior;
    let nb = adj.n_boundary();
    let mut diag = vec![0.0; ni];
    let mut l_i = Vec::new();
    let mut l_b = Vec::new();
    for e in &adj.edges {
        if e.i < ni {
            diag[e.i] += e.a;
        }
        if e.j < ni {
            diag[e.j] += e.a;
        }
        match (e.i < ni, e.j < ni) {
            (true, true) => {
                l_i.push((e.i, e.j, -e.a));
                l_i.push((e.j, e.i, -e.a));
            }
            (true, false) => l_b.push((e.i, e.j - ni, -e.a)),
            _ => {}
        }
    }
    for (i, d) in diag.into_iter().enumerate() {
        l_i.push((i, i, d));
    }
    let b: [Vec<f64>; 3] = std::array::from_fn(|c| adj.source.iter().map(|s| s[c]).collect());
    let mut lambda_b = [vec![0.0; nb], vec![0.0; nb], vec![0.0; nb]];
    for (k, node) in adj.nodes[ni..].iter().enumerate() {
        let NodeKind::Boundary(si) = node.kind else { unreachable!() };
        for c in 0..3 {
            lambda_b[c][k] = sub.boundary_samples[si].color[c];
        }
    }

    // every interior node must reach a boundary node
    let nbrs = adj.neighbours();
    let mut seen = vec![false; adj.nodes.len()];
    let mut stack: Vec<usize> = (ni..adj.nodes.len()).collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(n) = stack.pop() {
        for &(m, _) in &nbrs[n] {
            if !seen[m] {
                seen[m] = true;
                stack.push(m);
            }
        }
    }
    let unreached = seen[..ni].iter().filter(|s| !**s).count();
    if unreached > 0 {
        return Err(SolveError::Singular {
            subdomain: sub.id,
            count: unreached,
        });
    }
    Ok(LinearSystem {
        subdomain: sub.id,
        n_interior: ni,
        n_boundary: nb,
        l_i,
        l_b,
        b,
        lambda_b,
    })
}

/// Factorizes `L^I` once and solves the three channels.
pub fn solve_control_points(sys: &LinearSystem) -> Result<[Vec<f64>; 3], SolveError> {
    let n = sys.n_interior;
    if n == 0 {
        return Ok([Vec::new(), Vec::new(), Vec::new()]);
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = sys.l_i.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
    let fail = |reason: String| SolveError::Factorization {
        subdomain: sys.subdomain,
        reason,
    };
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets).map_err(|e| fail(format!("{e:?}")))?;
    let llt = mat.sp_cholesky(Side::Lower).map_err(|e| fail(format!("{e:?}")))?;
    FACTORIZATIONS.fetch_add(1, Ordering::Relaxed);
    let refs: [f64; 3] = std::array::from_fn(|c| sys.reference(c));
    let rhs: Vec<Vec<f64>> = (0..3).map(|c| sys.offset_rhs(c, refs[c])).collect();
    let rhs_mat = Mat::<f64>::from_fn(n, 3, |i, c| rhs[c][i]);
    let x = llt.solve(&rhs_mat);
    let out: [Vec<f64>; 3] = std::array::from_fn(|c| (0..n).map(|i| x[(i, c)] + refs[c]).collect());
    for (c, lam) in out.iter().enumerate() {
        let residual = sys.relative_residual(c, lam);
        if !(residual <= RESIDUAL_TOLERANCE) {
            return Err(SolveError::Residual {
                subdomain: sys.subdomain,
                residual,
            });
        }
    }
    Ok(out)
}
