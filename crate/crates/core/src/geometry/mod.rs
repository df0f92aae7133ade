//! Coordinate-level differential geometry.
//!
//! [`source`] turns a structure description into coordinate components,
//! [`tensor`] differentiates them generically over jets, and [`frame`] wraps
//! the result at a single point in `f64` matrices.

pub mod chart;
pub mod frame;
pub mod source;
pub mod tensor;

pub use chart::Chart;
pub use frame::{
    conformal_flatness, exterior_derivative_1, exterior_derivative_2, exterior_derivative_on_fields,
    frame_fields, lie_bracket, lie_derivative_11, sectional_curvature, Depth, OneFormField, PointFrame,
    TensorField11, VecField,
};
pub use source::{ComponentFn, Components, CoordinateTensors, EmbeddedHypersurface, FrameSpec, Source};
pub use tensor::{Connection, Curvature};
