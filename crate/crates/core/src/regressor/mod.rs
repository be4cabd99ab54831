//! Small dense regressor, Adam, and the rotation-representation experiments.

mod adam;
mod experiment;
mod grid;
mod heads;
mod net;

pub use adam::{adam_step, AdamState};
pub use experiment::{
    rotated_samples, run_representation_experiment, template_points, FitReport, RegressorTrace,
    RotationRegressor, TrainConfig, CURVE_MAX_DEG, CURVE_STEPS,
};
pub use grid::{argmin_cells, fvr_grid_search, GridCell, GridSearch, GridSpec, Sweep};
pub use heads::{HeadConfig, HeadMode, Representation};
pub use net::{Activation, DenseNet, Gradients, InitRecord, LayerShape, Trace, LEAKY_SLOPE};
