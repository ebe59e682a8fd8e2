//! Simulator for relay-aided multi-user MIMO broadcast with delayed CSIT:
//! transmission schemes, delay/throughput metrics and an experiment harness.

pub mod harness;
pub mod metrics;
pub mod model;
pub mod numerics;
pub mod schemes;

pub use metrics::{closed_form_dod, closed_form_dof, complexity, event_dod, DodReport, DsfTable};
pub use model::{DataSetSpec, NetworkConfig};
pub use numerics::{ComplexMatrix, RngStream};
pub use schemes::{simulate, Scheme, SchemeTrace, SimOptions};
