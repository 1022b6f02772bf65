//! Objectives and random problem instances.

mod instance;
pub mod io;
mod objective;

pub use instance::{
    proportional_count, rotate_to_canonical, sample_instance, ProblemInstance, Reflector,
    RotatedInstance, SampleOptions, ShapeConfig,
};
pub use objective::ObjectiveSpec;
