//! Classical post-processing of Hadamard-test shots.

mod acdf;
mod config;
mod gse;
mod gsprop;
mod mom;

pub use acdf::{acdf, acdf_2d, acdf_fourier, acdf_o, cdf_2d, cdf_o, g2_estimator, g_estimator, sample_j, JSampler};
pub use config::{
    certify_batch_size, certify_batches, mom_group_size, mom_groups, EstimateReport, EstimationConfig, EvolutionBudget,
    Intermediates, ShotOverrides, StageReport, CERTIFY_C1, CERTIFY_C2, GROUP_SIZE_C,
};
pub use gse::{certify, estimate_gse, good_point, invert_cdf, max_inversion_iterations, Inversion, SamplePool};
pub use gsprop::{estimate_gsprop_block, estimate_gsprop_commutative, estimate_gsprop_general, estimate_overlap, Window};
pub use mom::{componentwise_median, median_of_means};

pub(crate) use gse::{effective_spectrum, stage_rng};
pub(crate) use gsprop::{run_mom_stage, MomStage};
