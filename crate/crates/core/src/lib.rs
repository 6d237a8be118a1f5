//! Outage analysis of precoded discrete constellations over block-fading
//! channels.

pub mod constellations;
pub mod error;
pub mod mutual_info;
pub mod optimizer;
pub mod outage;
pub mod precoders;
pub mod quadrature;
pub mod roots;

pub use constellations::{build_named, Constellation, Field, ProjectionSet};
pub use error::{Error, Result};
pub use mutual_info::{ChannelSample, Engine, MiConfig, MiEngine, MiEstimate};
pub use precoders::Precoder;
