//! Building blocks shared by the period and assembly builders: hexagonal
//! prisms whose lateral faces may be pierced, and the small hexagonal tubes
//! that connect a pierced face to the next prism.
//!
//! A tube is a hexagonal prism with local faces `0..6` around its axis, where
//! local face 0 is the end plane on the `+axis` side and local face 3 the end
//! plane on the `-axis` side. The ends are planes of the prisms being joined,
//! so a tube only owns its four walls and its top and bottom.

use crate::hexnorm::{FacetDir, Vec3};
use crate::offset_surface::{FaceRole, Orientation, SurfaceBuilder, SurfaceTopology, SymmetryClass};

pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Side widths of the equiangular hexagon with lateral offsets `h`.
pub fn hexagon_widths(h: &[f64; 6]) -> [f64; 6] {
    std::array::from_fn(|k| 2.0 / SQRT3 * (h[(k + 5) % 6] + h[(k + 1) % 6] - h[k]))
}

/// Area of the equiangular hexagon with lateral offsets `h`: `½ Σ h_k w_k`.
pub fn hexagon_area(h: &[f64; 6]) -> f64 {
    let w = hexagon_widths(h);
    0.5 * h.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
}

#[derive(Debug, Clone)]
pub struct PrismSpec {
    pub center: Vec3,
    /// Rotation about z in steps of 60°.
    pub rotation: i32,
    /// Offsets of the local lateral faces from `center`.
    pub lateral: [f64; 6],
    pub half_height: f64,
    pub orientation: Orientation,
    pub lateral_classes: [Option<SymmetryClass>; 6],
    pub top_class: Option<SymmetryClass>,
    pub bottom_class: Option<SymmetryClass>,
}

impl PrismSpec {
    /// The Wulff prism with one class per face.
    pub fn wulff() -> Self {
        Self {
            center: Vec3::ZERO,
            rotation: 0,
            lateral: [1.0; 6],
            half_height: 1.0,
            orientation: Orientation::Positive,
            lateral_classes: std::array::from_fn(|k| Some(SymmetryClass::new(format!("lateral{k}")))),
            top_class: Some("top".into()),
            bottom_class: Some("bottom".into()),
        }
    }

    /// A closed surface consisting of this prism alone.
    pub fn standalone(&self) -> SurfaceTopology {
        let mut b = SurfaceBuilder::new();
        let component = b.component("prism");
        add_prism(&mut b, self, component);
        b.finish(None, false)
    }
}

pub fn wulff_prism() -> SurfaceTopology {
    PrismSpec::wulff().standalone()
}

#[derive(Debug, Clone, Copy)]
pub struct PrismFaces {
    /// Face ids in local order.
    pub lateral: [usize; 6],
    pub top: usize,
    pub bottom: usize,
}

fn reoriented(mut ring: Vec<usize>, orientation: Orientation) -> Vec<usize> {
    if orientation == Orientation::Negative {
        ring.reverse();
    }
    ring
}

pub fn add_prism(b: &mut SurfaceBuilder, spec: &PrismSpec, component: usize) -> PrismFaces {
    let lateral = std::array::from_fn(|k| {
        let facet = FacetDir::lateral(k as i32 + spec.rotation);
        let offset = spec.lateral[k] + facet.normal().dot(spec.center);
        b.face(facet, offset, spec.orientation, spec.lateral_classes[k].clone(), FaceRole::Surface, component)
    });
    let top = b.face(
        FacetDir::UP,
        spec.half_height + spec.center.z,
        spec.orientation,
        spec.top_class.clone(),
        FaceRole::Surface,
        component,
    );
    let bottom = b.face(
        FacetDir::DOWN,
        spec.half_height - spec.center.z,
        spec.orientation,
        spec.bottom_class.clone(),
        FaceRole::Surface,
        component,
    );
    let faces = PrismFaces { lateral, top, bottom };
    let corner = |b: &mut SurfaceBuilder, k: usize, cap: usize| b.vertex(lateral[k], lateral[(k + 1) % 6], cap);
    let top_ring: Vec<usize> = (0..6).map(|k| corner(b, k, top)).collect();
    let bottom_ring: Vec<usize> = (0..6).rev().map(|k| corner(b, k, bottom)).collect();
    b.push_loop(top, reoriented(top_ring, spec.orientation));
    b.push_loop(bottom, reoriented(bottom_ring, spec.orientation));
    for k in 0..6 {
        let prev = (k + 5) % 6;
        let ring = vec![corner(b, prev, bottom), corner(b, k, bottom), corner(b, k, top), corner(b, prev, top)];
        b.push_loop(lateral[k], reoriented(ring, spec.orientation));
    }
    faces
}

#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub center: Vec3,
    /// Lateral facet index of the `+axis` direction.
    pub axis: i32,
    /// Offset of each wall from `center` along its own normal.
    pub wall_offset: f64,
    pub half_height: f64,
    pub orientation: Orientation,
    pub wall_class: Option<SymmetryClass>,
    pub cap_class: Option<SymmetryClass>,
    /// Plane of the `+axis` end.
    pub plus: usize,
    /// Plane of the `-axis` end.
    pub minus: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct TubeFaces {
    /// Walls at local indices 1, 2, 4, 5.
    pub walls: [usize; 4],
    pub top: usize,
    pub bottom: usize,
    pub plus: usize,
    pub minus: usize,
    pub axis: i32,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TubeEnd {
    Plus,
    Minus,
}

impl TubeFaces {
    /// Face id of local tube face `j`.
    pub fn ring(&self, j: usize) -> usize {
        match j % 6 {
            0 => self.plus,
            1 => self.walls[0],
            2 => self.walls[1],
            3 => self.minus,
            4 => self.walls[2],
            _ => self.walls[3],
        }
    }

    pub fn wall_facet(&self, j: usize) -> FacetDir {
        FacetDir::lateral(self.axis + j as i32)
    }

    fn corner(&self, b: &mut SurfaceBuilder, j: usize, cap: usize) -> usize {
        b.vertex(self.ring(j), self.ring(j + 1), cap)
    }
}

/// Adds the wall and cap faces of a tube. With `FaceRole::Support` the faces
/// only serve to define vertices (tubes of neighbouring periods).
pub fn add_tube(b: &mut SurfaceBuilder, spec: &TubeSpec, role: FaceRole, component: usize) -> TubeFaces {
    let walls = [1, 2, 4, 5].map(|j| {
        let facet = FacetDir::lateral(spec.axis + j);
        let offset = spec.wall_offset + facet.normal().dot(spec.center);
        b.face(facet, offset, spec.orientation, spec.wall_class.clone(), role, component)
    });
    let top = b.face(
        FacetDir::UP,
        spec.half_height + spec.center.z,
        spec.orientation,
        spec.cap_class.clone(),
        role,
        component,
    );
    let bottom = b.face(
        FacetDir::DOWN,
        spec.half_height - spec.center.z,
        spec.orientation,
        spec.cap_class.clone(),
        role,
        component,
    );
    TubeFaces { walls, top, bottom, plus: spec.plus, minus: spec.minus, axis: spec.axis, orientation: spec.orientation }
}

/// Polygons of the tube's walls, top and bottom.
pub fn tube_loops(b: &mut SurfaceBuilder, t: &TubeFaces) {
    let top_ring: Vec<usize> = (0..6).map(|j| t.corner(b, j, t.top)).collect();
    let bottom_ring: Vec<usize> = (0..6).rev().map(|j| t.corner(b, j, t.bottom)).collect();
    b.push_loop(t.top, reoriented(top_ring, t.orientation));
    b.push_loop(t.bottom, reoriented(bottom_ring, t.orientation));
    for (slot, j) in [1usize, 2, 4, 5].into_iter().enumerate() {
        let ring = vec![
            t.corner(b, j - 1, t.bottom),
            t.corner(b, j, t.bottom),
            t.corner(b, j, t.top),
            t.corner(b, j - 1, t.top),
        ];
        b.push_loop(t.walls[slot], reoriented(ring, t.orientation));
    }
}

/// Pushes the rectangle where the tube meets `face` at `end`: as a clockwise
/// hole when `hole` is set, otherwise as a counterclockwise boundary (a cap).
pub fn tube_rim(b: &mut SurfaceBuilder, t: &TubeFaces, end: TubeEnd, face: usize, hole: bool) {
    // (wall local index, corner local index) for the two walls at this end
    let walls = match end {
        TubeEnd::Plus => [(1, 0), (5, 5)],
        TubeEnd::Minus => [(2, 2), (4, 3)],
    };
    let outward = b.face_spec(face).outward();
    let right = Vec3::Z.cross(outward);
    let (left, right_side) = if t.wall_facet(walls[0].0).normal().dot(right) < 0.0 {
        (walls[0].1, walls[1].1)
    } else {
        (walls[1].1, walls[0].1)
    };
    let ring = [(left, t.bottom), (right_side, t.bottom), (right_side, t.top), (left, t.top)]
        .map(|(j, cap)| t.corner(b, j, cap));
    let ring = if hole { vec![ring[0], ring[3], ring[2], ring[1]] } else { ring.to_vec() };
    b.push_loop(face, ring);
}
