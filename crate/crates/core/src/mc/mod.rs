//! Monte-Carlo verification of the martingale construction.

mod brownian;
mod jump;
mod matrix;
mod modes;
mod path;
mod report;
mod stats;

pub use brownian::{brownian_pairing, gaussian_qv_gap, BrownianEstimate, GaussianProblem, BROWNIAN_SCALE, MIN_STEPS};
pub use jump::{
    burkholder_check, check_subordination, estimate_pairing, estimate_pairing_with, general_g, lp_isometry,
    martingale_check, parabolic_f, subordination_check, BurkholderCheck, Compensator, IsometryCheck, JumpEngine,
    JumpEvent, JumpProblem, MartingaleTrace, McOptions, PairingEstimate, Subordination, SubordinationSummary, Walk,
    XRule, DEFAULT_NODES, NODE_TOL,
};
pub use matrix::{pairing_matrix, Config};
pub use modes::{ModeSet, Propagator, SubGrid, MODE_CUTOFF};
pub use path::{path_rng, simulate_cpp, BrownianPath, CompoundPoisson, JumpPath};
pub use report::{Report, ReportRow};
pub use stats::{run_chunked, Accum, Stat, CHUNK};
