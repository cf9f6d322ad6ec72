//! Bony calculus on the lattice: paraproducts and remainder, the Gevrey
//! bilinear operator, analytic composition and measured product constants.

mod bilinear;
mod decompose;
mod laws;
mod series;

pub use bilinear::{bilinear_weight, gevrey_bilinear, gevrey_bilinear_with, BilinearRoute, PHYSICAL_ROUTE_LIMIT};
pub use decompose::{bony_decompose, bony_piece, BonyParts, BonyPiece};
pub use laws::{measure_product_constant, ConstantReport, Law, MeasureSettings, RatioSummary, LAW_IDS};
pub use series::{compose_analytic, compose_samples, Composition, PowerSeries, DEFAULT_TRUNCATION, SERIES_LEN};
