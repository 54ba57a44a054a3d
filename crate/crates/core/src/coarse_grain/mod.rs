//! Coarse-grained energy transfer: Gaussian filtering, subfilter stress,
//! resolved strain, the flux `Pi_K` and its dyadic band structure.

mod filter;
mod flux;
mod model;
mod tensor;

pub use filter::{filter, shell_projection, shell_projection_vector, FilterSpec};
pub use flux::{
    band_decompose, deformation_tensor, energy_flux, first_order_stress, flux_budget, scale_locality,
    sharp_band_decompose, stress_tensor, Bands, BudgetRow, EnergyFlux,
};
pub use model::{
    contract3, model_flow_report, model_flux, model_flux_expected, model_strain, model_stress, Mat3, ModelFlowReport,
    ModelRow,
};
pub use tensor::{EigenRange, TensorField2D};
