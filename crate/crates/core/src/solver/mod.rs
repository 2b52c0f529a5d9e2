//! Closed-form Poisson solver on one subdomain: quad-tree cells, Voronoi
//! adjacency, the control-point system and the evaluation sums.

pub mod green;
mod solution;
mod system;

pub use green::{avg_greens, avg_greens_with, greens_kernel, GreenMethod, FAR_FIELD_RATIO};
pub use solution::{basis_eval, build_solution, eval_direct, DirichletTerm, FluxTerm, SourceTerm, SplineSolution};
pub use system::{assemble_system, factorization_count, solve_control_points, LinearSystem, SolveError, RESIDUAL_TOLERANCE};

use crate::discretize::{build_adjacency, build_quadtree, AdjacencyGraph, CellComplex, DiscretizedSubdomain};

/// Everything kept from one subdomain solve.
#[derive(Clone, Debug)]
pub struct SubdomainModel {
    pub cells: CellComplex,
    pub graph: AdjacencyGraph,
    pub system: LinearSystem,
    pub solution: SplineSolution,
}

/// Quad-tree and adjacency of a subdomain.
pub fn discretize_subdomain(sub: &DiscretizedSubdomain) -> (CellComplex, AdjacencyGraph) {
    let cells = build_quadtree(sub);
    let graph = build_adjacency(&cells, sub);
    (cells, graph)
}

/// Assembles, factorizes and solves a discretized subdomain.
pub fn solve_discretized(sub: &DiscretizedSubdomain, cells: CellComplex, graph: AdjacencyGraph) -> Result<SubdomainModel, SolveError> {
    let system = assemble_system(&graph, sub)?;
    let lambda = solve_control_points(&system)?;
    let solution = build_solution(&lambda, &system, &graph);
    Ok(SubdomainModel {
        cells,
        graph,
        system,
        solution,
    })
}

pub fn solve_subdomain(sub: &DiscretizedSubdomain) -> Result<SubdomainModel, SolveError> {
    let (cells, graph) = discretize_subdomain(sub);
    solve_discretized(sub, cells, graph)
}
