pub mod convergence;
pub mod evolve;
pub mod relax;
