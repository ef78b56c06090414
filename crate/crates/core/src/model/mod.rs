//! Chain geometry, impurity protocols and coupling matrices.

pub mod chain;
pub mod couplings;
pub mod profile;
pub mod validate;

pub use chain::{Boundary, ChainSpec, MomentumGrid};
pub use couplings::{
    build_site_couplings, build_site_couplings_at, from_momentum_couplings, to_momentum_couplings, xy_momentum_direct,
    CouplingMatrices, MomentumCouplings,
};
pub use profile::{Segment, SegmentKind, Side, TimeProfile};
pub use validate::{validate_hypotheses, HypothesisCheck, ValidationReport};
