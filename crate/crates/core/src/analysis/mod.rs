//! Reference solutions, error measurement and order fitting.

mod convergence;
mod orbit;
mod taylor;

pub use convergence::{
    assemble_reports, convergence_sweep, cost_scaled_step, fit_local_order, fit_order,
    global_error, interpolate_error, local_errors, run_cell, run_cells, snap_step, CellMeasurement,
    CellOutcome, ConvergencePoint, ConvergenceReport, CostWeights, ErrorNorm, FailedCell, OrderFit,
    SweepSpec,
};
pub use orbit::{circular_orbit_state, exact_circular_solution, CircularOrbitSpec};
pub use taylor::{reference_flow, taylor_exact_coeffs, TaylorCoefficients, REFERENCE_SUBSTEP};
