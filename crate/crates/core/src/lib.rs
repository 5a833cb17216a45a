//! Gittins indices for Bernoulli and Gaussian bandit arms, computed by
//! calibrating one-armed bandit dynamic programmes.
// negated comparisons double as NaN rejection
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bmab;
pub mod bounds;
pub mod calibration;
pub mod error;
mod gauss;
pub mod nmab;
pub mod sim;
pub mod state;
pub mod table;
pub mod whittle;

pub use bmab::{bmab_gi, bmab_value, max_remaining_reward, BmabDpConfig};
pub use bounds::{BoundsProvider, Bracket, DefaultBounds};
pub use calibration::{calibrate_index, required_iterations, CalibrationSpec, IndexResult};
pub use error::{Error, Result};
pub use nmab::{
    build_omega, nmab_gi, nmab_gi_direct, nmab_value, transition_row, Floor, MuGrid, NmabDpConfig,
    TransitionRow,
};
pub use sim::{
    covering_table, run_policy_comparison, ArmPrior, MabInstance, Policy, SimulationReport,
};
pub use state::{BernoulliArmState, DiscountFactor, NormalArmState};
pub use table::{
    bmab_table, gamma_bracket, nmab_sequence, BmabGridSpec, IndexTable, Interpolated,
    NmabSequenceSpec, TableMeta,
};
pub use whittle::{whittle_fh_index, whittle_fh_value, FiniteHorizonState};
