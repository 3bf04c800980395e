//! Polygonal sub-Finsler geometry on the Heisenberg group.
//!
//! A centrally symmetric convex polygon `Q` defines a norm on the horizontal
//! plane and hence a left-invariant length metric on the Heisenberg group.
//! This crate computes that metric exactly (through the explicit unit sphere),
//! its geodesics and Pansu derivatives, the catalogue of horofunctions with
//! the group action on it, and a numerical harness for blow-up limits.

pub mod blowup;
pub mod distance;
pub mod error;
pub mod format;
pub mod heisenberg;
pub mod horo;
pub mod mesh;
pub mod oracle;
pub mod plane;
pub mod polygon;
pub mod sphere;
pub mod verify;

pub use distance::{d_e, distance, geodesic, pansu_derivative, GeodesicKind, GeodesicPath};
pub use error::{Error, GeometryError, Result};
pub use heisenberg::HeisPoint;
pub use horo::{Family, Horofunction};
pub use plane::{omega, Covector, Vec2};
pub use polygon::Polygon;
pub use sphere::{PanelCoords, Side, SphereClass};
