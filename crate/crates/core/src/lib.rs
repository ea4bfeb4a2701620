//! Promotion operators on linear extensions of finite posets, the Markov
//! chains they drive, and the algebraic tools used to analyse them.

pub mod chain;
pub mod error;
pub mod exact;
pub mod families;
pub mod lattice;
pub mod linear_form;
pub mod mixing;
pub mod monoid;
pub mod poset;
pub mod promotion;
pub mod spectral;
pub mod subsets;
pub mod sweep;
pub mod weights;
pub mod word;

pub use error::{Error, Result};
pub use exact::{char_poly, Polynomial, RatMatrix};
pub use lattice::UpperSetLattice;
pub use linear_form::LinearForm;
pub use poset::{parse_poset, Classification, Limits, Poset};
pub use promotion::{Mode, PromotionGraph, PromotionSystem};
pub use weights::WeightVector;
pub use word::{LinearExtension, Word};
pub use chain::{
    partition_function, stationary_solve, stationary_weight, transition_matrix, verify_master_equation,
    PartitionMode, ProductWeight, TransitionMatrix,
};
pub use mixing::{check_convergence_bound, convergence_bound, mixing_time_upper, simulate_walk, total_variation};
pub use monoid::{generate_monoid, Monoid, MonoidElement, Product};
pub use spectral::{
    predicted_spectrum, probe_linear_spectrum, verify_spectrum, ProbeReport, SpectrumPrediction,
};
pub use subsets::{sorting_network_union, NetworkTarget, PermSubset};
pub use sweep::{run_sweep, Family, SweepConfig, SweepReport};
