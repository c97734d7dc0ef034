//! Polyhedral constant-mean-curvature surfaces for the hexagonal prism norm.

pub mod assembly;
pub mod construct;
pub mod delaunay;
pub mod hexnorm;
pub mod isoperimetry;
pub mod newton;
pub mod obj;
pub mod offset_surface;
pub mod par;
