//! The hexagonal norm on R³.
//!
//! The norm is the support function of its Wulff shape, a right prism of
//! height 2 over a regular hexagon of unit inradius. Lateral facet normals sit
//! at angles `60°·k` (index 0 along +x), so the hexagon vertices are at
//! `30° + 60°·k` with circumradius `2/√3`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use thiserror::Error;

/// Inradius-one hexagon side length, `2/√3`.
pub const HEX_SIDE: f64 = 1.154_700_538_379_251_5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Horizontal unit vector at `degrees` from +x.
    pub fn horizontal(degrees: f64) -> Self {
        let t = degrees.to_radians();
        Self::new(t.cos(), t.sin(), 0.0)
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        self / self.norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn max_abs(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Rotation about the vertical axis.
    pub fn rotate_z(self, degrees: f64) -> Vec3 {
        let (s, c) = degrees.to_radians().sin_cos();
        Vec3::new(c * self.x - s * self.y, s * self.x + c * self.y, self.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Vec3 {
    fn sub_assign(&mut self, o: Vec3) {
        *self = *self - o;
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        v * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("norm argument has a non-finite component: {0}")]
    NonFinite(Vec3),
}

/// One of the eight face directions of the Wulff prism.
///
/// Indices 0..=5 are the lateral normals at `60°·index`; 6 is +z and 7 is -z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetDir(u8);

impl FacetDir {
    pub const UP: FacetDir = FacetDir(6);
    pub const DOWN: FacetDir = FacetDir(7);

    pub fn lateral(k: i32) -> FacetDir {
        FacetDir(k.rem_euclid(6) as u8)
    }

    pub fn from_index(index: u8) -> Option<FacetDir> {
        (index < 8).then_some(FacetDir(index))
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn is_lateral(self) -> bool {
        self.0 < 6
    }

    pub fn normal(self) -> Vec3 {
        match self.0 {
            6 => Vec3::Z,
            7 => -Vec3::Z,
            k => lateral_normal(k),
        }
    }

    pub fn opposite(self) -> FacetDir {
        match self.0 {
            6 => FacetDir::DOWN,
            7 => FacetDir::UP,
            k => FacetDir((k + 3) % 6),
        }
    }

    /// Rotates a lateral direction by `steps·60°`; vertical directions are fixed.
    pub fn rotated(self, steps: i32) -> FacetDir {
        if self.is_lateral() {
            FacetDir::lateral(self.0 as i32 + steps)
        } else {
            self
        }
    }
}

// Exact values for the six lateral normals; trig would leave ~1e-16 residue
// in components that are structurally zero.
fn lateral_normal(k: u8) -> Vec3 {
    const H: f64 = 0.866_025_403_784_438_6;
    match k {
        0 => Vec3::new(1.0, 0.0, 0.0),
        1 => Vec3::new(0.5, H, 0.0),
        2 => Vec3::new(-0.5, H, 0.0),
        3 => Vec3::new(-1.0, 0.0, 0.0),
        4 => Vec3::new(-0.5, -H, 0.0),
        _ => Vec3::new(0.5, -H, 0.0),
    }
}

/// The hexagonal norm, stored as the vertex set of its Wulff prism.
#[derive(Debug, Clone)]
pub struct HexNorm {
    hex_vertices: [Vec3; 6],
    half_height: f64,
}

impl Default for HexNorm {
    fn default() -> Self {
        Self::new()
    }
}

impl HexNorm {
    pub fn new() -> Self {
        let hex_vertices = std::array::from_fn(|k| Vec3::horizontal(30.0 + 60.0 * k as f64) * HEX_SIDE);
        Self { hex_vertices, half_height: 1.0 }
    }

    pub fn half_height(&self) -> f64 {
        self.half_height
    }

    /// The 12 vertices of the Wulff prism.
    pub fn wulff_vertices(&self) -> impl Iterator<Item = Vec3> + '_ {
        [self.half_height, -self.half_height]
            .into_iter()
            .flat_map(move |z| self.hex_vertices.iter().map(move |v| Vec3::new(v.x, v.y, z)))
    }

    /// Support function of the Wulff prism.
    pub fn psi(&self, n: Vec3) -> Result<f64, NormError> {
        if !n.is_finite() {
            return Err(NormError::NonFinite(n));
        }
        let horizontal = self
            .hex_vertices
            .iter()
            .map(|v| v.x * n.x + v.y * n.y)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(horizontal + self.half_height * n.z.abs())
    }

    pub fn facet_normals(&self) -> Vec<FacetDir> {
        (0..8).map(FacetDir).collect()
    }
}
