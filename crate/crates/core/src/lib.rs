//! Parametric glyph design space with a hex-grid selection catalog.
//!
//! Eight corner masters span a unit cube; any point inside is a typeface
//! instance obtained by trilinear blending. The catalog engine lets a user
//! navigate that cube through zoomable hexagonal displays, sessions record
//! what they did, and the analytics module reads those records back as
//! decision-tree traversals.

pub mod analytics;
pub mod canonical;
pub mod catalog;
pub mod coords;
pub mod demo;
pub mod hex;
pub mod outline;
pub mod render;
pub mod scalar;
pub mod session;
pub mod space;
pub mod store;

use num_rational::Ratio;

pub use analytics::{classify, PatternLabel, PatternReport};
pub use catalog::{select_category, DisplayState, EngineError};
pub use coords::Corner;
pub use scalar::{FloatScalar, Scalar};
pub use session::{EventKind, SessionEvent, SessionTrace};
pub use space::SpaceError;
pub use store::SessionStore;

/// Exact rationals, for checks that should not round.
pub type Exact = Ratio<i64>;

pub type Coords = coords::DesignCoords<f64>;
pub type Outline = outline::GlyphOutline<f64>;
pub type Space = space::DesignSpace<f64>;
pub type Point = hex::HexPoint<f64>;

pub type Coords32 = coords::DesignCoords<f32>;
pub type Outline32 = outline::GlyphOutline<f32>;
pub type Space32 = space::DesignSpace<f32>;
pub type Point32 = hex::HexPoint<f32>;

pub type ExactCoords = coords::DesignCoords<Exact>;
pub type ExactOutline = outline::GlyphOutline<Exact>;
pub type ExactSpace = space::DesignSpace<Exact>;
