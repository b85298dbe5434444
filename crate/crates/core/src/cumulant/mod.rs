//! Cumulants of the state algebra: set partitions, amplitude polynomials,
//! raising and lowering operators, and the split test.

pub mod partition;
pub mod poly;
pub mod table;

pub use partition::{
    enumerate_partitions, separability_dimension_counts, splits_partition, DimensionCount,
    SetPartition,
};
pub use poly::{cumulant_poly, site_bit, APolynomial, Monomial};
pub use table::CumulantTable;
