//! Modeling and predicting authoritative DNS server load under TTL caching.
//!
//! * [`model`]: closed-form load of the uniform aggregate caching (UAC) model.
//! * [`estimation`]: fitting the model from one, two or three server-side
//!   measurements and predicting load at another TTL.
//! * [`sim`]: heterogeneous requestor populations and Poisson traffic through
//!   TTL caches.
//! * [`gsa`]: elementary effects, FAST and variance-based sensitivity analysis.
//! * [`experiments`]: end-to-end validation and sensitivity scenarios with
//!   CSV and manifest output.

pub mod estimation;
pub mod experiments;
pub mod gsa;
pub mod model;
pub mod seed;
pub mod sim;

pub use estimation::{
    EstimateSource, EstimationError, RequestorObservation, RequestorPartition, SourceId, UacEstimate,
};
pub use model::{MeasurementPoint, Rate, TtlSeconds};
