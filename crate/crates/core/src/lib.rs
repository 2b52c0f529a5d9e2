//! Poisson vector graphics: documents of diffusion curves, Poisson curves and
//! Poisson regions, solved in closed form with harmonic B-splines and rendered
//! at any resolution.

pub mod discretize;
pub mod document;
pub mod geometry;
pub mod oracle;
pub mod render;
pub mod solver;
pub mod spline;
