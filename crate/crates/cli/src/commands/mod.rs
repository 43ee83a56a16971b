pub mod curves;
pub mod dominance;
pub mod free_energy;
pub mod path;
pub mod phase_bracket;
pub mod shared;
pub mod tilt_audit;
