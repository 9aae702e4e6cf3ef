//! Central measures on the Gelfand-Tsetlin graph with q-deformed edge weights,
//! their atoms, and the ratio set of the tail equivalence relation.

pub mod chains;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod graph;
pub mod qweights;
pub mod ratio;
pub mod measure;
pub mod report;
pub mod theta;

pub use error::{Error, Result};
pub use graph::{PathPrefix, Signature};
pub use qweights::{QContext, QValue};
pub use theta::{ThetaSpec, ThetaType};
