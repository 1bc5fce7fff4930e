//! Energy-truncated effective Hamiltonians for finite quantum spin systems,
//! with numerical certificates for the spectral bounds they satisfy.

pub mod cache;
pub mod certify;
pub mod corpus;
pub mod error;
pub mod ising;
pub mod lattice;
pub mod linalg;
pub mod model_file;
pub mod operator;
pub mod product_state;
pub mod range;
pub mod runner;
pub mod spectral;
pub mod truncation;

pub use error::{Error, Result};
pub use lattice::{Interaction, InteractionConstants, Lattice, RegionSplit, Term};
pub use operator::HermitianOperator;
pub use spectral::{Interval, Projector, SpectralData};
