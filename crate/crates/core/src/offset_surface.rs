//! Polyhedral surfaces with fixed combinatorics whose faces lie on planes
//! `x·n = h` with `n` a facet direction of the hexagonal norm.
//!
//! Vertices are triple-plane intersections, so they are affine in the face
//! offsets and every face area is a quadratic polynomial in the offsets. The
//! first variation under a class translation is evaluated exactly from that
//! structure (vertex velocities solve the same 3×3 systems as the positions).
//!
//! Periodic surfaces carry a period vector. Planes of neighbouring periods
//! that are needed to pin down vertices enter as `Support` faces: they move
//! with their class but own no polygon.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::hexnorm::{FacetDir, HexNorm, NormError, Vec3};

/// Lagrange multiplier in `E - λV` for the unit-inradius hexagonal prism.
pub const LAGRANGE: f64 = 2.0;

const SINGULAR_DET: f64 = 1e-9;
const AREA_TOL: f64 = 1e-13;
const COLLAPSE_LEN: f64 = 1e-10;
const COLLAPSE_PROBE: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymmetryClass(pub String);

impl SymmetryClass {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SymmetryClass {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Outward sense of the sheet a face belongs to, relative to its facet normal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceRole {
    /// Part of the surface; counted in energy and volume.
    Surface,
    /// Closes the surface for volume bookkeeping only.
    Cap,
    /// Plane used to define vertices; owns no polygon.
    Support,
}

#[derive(Debug, Clone)]
pub struct FaceSpec {
    pub facet: FacetDir,
    /// Plane offset along the facet normal: the face lies on `x·n = offset`.
    pub offset: f64,
    pub orientation: Orientation,
    pub class: Option<SymmetryClass>,
    pub role: FaceRole,
    pub component: usize,
    /// First loop is the boundary (counterclockwise seen from outside), the
    /// rest are holes (clockwise).
    pub loops: Vec<Vec<usize>>,
}

impl FaceSpec {
    pub fn normal(&self) -> Vec3 {
        self.facet.normal()
    }

    pub fn outward(&self) -> Vec3 {
        self.facet.normal() * self.orientation.sign()
    }

    fn has_polygon(&self) -> bool {
        self.role != FaceRole::Support
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub faces: (usize, usize),
    pub vertices: (usize, usize),
}

#[derive(Debug, Clone, Default)]
pub struct SurfaceTopology {
    pub faces: Vec<FaceSpec>,
    /// Each vertex is the intersection of three face planes.
    pub vertices: Vec<[usize; 3]>,
    pub components: Vec<String>,
    pub period: Option<Vec3>,
    /// Allows zero-area faces (limits where tubes shrink to nothing).
    pub degenerate_ok: bool,
}

impl SurfaceTopology {
    pub fn classes(&self) -> BTreeSet<SymmetryClass> {
        self.faces
            .iter()
            .filter(|f| f.role == FaceRole::Surface)
            .filter_map(|f| f.class.clone())
            .collect()
    }

    /// Polygon edges with the two faces sharing them. Edges of a periodic
    /// surface that close up only across the period boundary are listed once
    /// per side.
    pub fn edges(&self) -> Vec<Edge> {
        let mut seen: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (fi, face) in self.faces.iter().enumerate().filter(|(_, f)| f.has_polygon()) {
            for lp in &face.loops {
                for (a, b) in cyclic_pairs(lp) {
                    seen.entry((a.min(b), a.max(b))).or_default().push(fi);
                }
            }
        }
        seen.into_iter()
            .map(|(vertices, faces)| Edge { faces: (faces[0], *faces.get(1).unwrap_or(&faces[0])), vertices })
            .collect()
    }

    /// Translates every face of `class` outward by `delta`.
    pub fn translated(&self, class: &SymmetryClass, delta: f64) -> SurfaceTopology {
        let mut out = self.clone();
        for f in out.faces.iter_mut().filter(|f| f.class.as_ref() == Some(class)) {
            f.offset += f.orientation.sign() * delta;
        }
        out
    }
}

fn cyclic_pairs(lp: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    lp.iter().copied().zip(lp.iter().copied().cycle().skip(1))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("vertex {vertex}: face planes {faces:?} are not independent")]
    SingularVertex { vertex: usize, faces: [usize; 3] },
    #[error("face {face} loop {ring} is not a simple positively oriented polygon")]
    SelfIntersectingLoop { face: usize, ring: usize },
    #[error("face {face} loop {ring} uses vertex {vertex} whose planes do not include it")]
    ForeignVertex { face: usize, ring: usize, vertex: usize },
    #[error("face {face} has a loop with fewer than three vertices")]
    ShortLoop { face: usize },
    #[error("edge {vertices:?} is used by {count} polygons")]
    NonManifoldEdge { vertices: (usize, usize), count: usize },
    #[error("translating class {class} collapses edge {vertices:?} of face {face}")]
    Collapse { class: SymmetryClass, face: usize, vertices: (usize, usize) },
    #[error("no surface face belongs to class {0}")]
    UnknownClass(SymmetryClass),
    #[error(transparent)]
    Norm(#[from] NormError),
}

/// A surface with realized vertex positions and measured energy and volume.
#[derive(Debug, Clone)]
pub struct RealizedSurface {
    pub topology: SurfaceTopology,
    pub positions: Vec<Vec3>,
    pub face_areas: Vec<f64>,
    pub energy: f64,
    pub volume: f64,
}

/// Solves the three plane equations meeting at a vertex.
fn plane_intersection(normals: [Vec3; 3], rhs: [f64; 3]) -> Option<Vec3> {
    let [n1, n2, n3] = normals;
    let c23 = n2.cross(n3);
    let det = n1.dot(c23);
    if det.abs() < SINGULAR_DET {
        return None;
    }
    Some((c23 * rhs[0] + n3.cross(n1) * rhs[1] + n1.cross(n2) * rhs[2]) / det)
}

/// Oriented area of a loop about the unit normal `axis`.
fn loop_area(axis: Vec3, pts: &[Vec3]) -> f64 {
    let p0 = pts[0];
    let mut acc = Vec3::ZERO;
    for w in pts[1..].windows(2) {
        acc += (w[0] - p0).cross(w[1] - p0);
    }
    0.5 * axis.dot(acc)
}

fn loop_area_rate(axis: Vec3, pts: &[Vec3], vel: &[Vec3]) -> f64 {
    let (p0, v0) = (pts[0], vel[0]);
    let mut acc = Vec3::ZERO;
    for j in 1..pts.len() - 1 {
        let (q1, q2) = (pts[j] - p0, pts[j + 1] - p0);
        let (d1, d2) = (vel[j] - v0, vel[j + 1] - v0);
        acc += d1.cross(q2) + q1.cross(d2);
    }
    0.5 * axis.dot(acc)
}

/// `∫ x·t dA` over a loop (signed by its orientation about `axis`), and its rate.
fn loop_moment(axis: Vec3, t: Vec3, pts: &[Vec3], vel: Option<&[Vec3]>) -> (f64, f64) {
    let p0 = pts[0];
    let mut m = 0.0;
    let mut dm = 0.0;
    for j in 1..pts.len() - 1 {
        let (q1, q2) = (pts[j] - p0, pts[j + 1] - p0);
        let tri = 0.5 * axis.dot(q1.cross(q2));
        let c = t.dot(p0 + pts[j] + pts[j + 1]) / 3.0;
        m += tri * c;
        if let Some(v) = vel {
            let (d1, d2) = (v[j] - v[0], v[j + 1] - v[0]);
            let dtri = 0.5 * axis.dot(d1.cross(q2) + q1.cross(d2));
            let dc = t.dot(v[0] + v[j] + v[j + 1]) / 3.0;
            dm += dtri * c + tri * dc;
        }
    }
    (m, dm)
}

fn orient2d(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn segments_cross(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64), tol: f64) -> bool {
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);
    ((o1 > tol && o2 < -tol) || (o1 < -tol && o2 > tol)) && ((o3 > tol && o4 < -tol) || (o3 < -tol && o4 > tol))
}

/// Orthonormal in-plane frame `(u, v)` that is counterclockwise about `axis`.
fn plane_frame(axis: Vec3) -> (Vec3, Vec3) {
    let helper = if axis.z.abs() < 0.9 { Vec3::Z } else { Vec3::X };
    let u = helper.cross(axis).normalized();
    (u, axis.cross(u))
}

pub fn realize(topology: &SurfaceTopology) -> Result<RealizedSurface, GeometryError> {
    let positions = solve_positions(topology, |fi| topology.faces[fi].offset)?;
    validate_loops(topology, &positions)?;
    validate_edges(topology, &positions)?;
    let norm = HexNorm::new();
    let face_areas: Vec<f64> = topology.faces.iter().map(|f| face_area(f, &positions)).collect();
    let mut energy = 0.0;
    for (face, area) in topology.faces.iter().zip(&face_areas) {
        if face.role == FaceRole::Surface {
            energy += norm.psi(face.normal())? * area;
        }
    }
    let volume = volume_and_rate(topology, &positions, &face_areas, None).0;
    Ok(RealizedSurface { topology: topology.clone(), positions, face_areas, energy, volume })
}

fn solve_positions(topology: &SurfaceTopology, rhs: impl Fn(usize) -> f64) -> Result<Vec<Vec3>, GeometryError> {
    topology
        .vertices
        .iter()
        .enumerate()
        .map(|(vi, tri)| {
            plane_intersection(tri.map(|f| topology.faces[f].normal()), tri.map(&rhs))
                .ok_or(GeometryError::SingularVertex { vertex: vi, faces: *tri })
        })
        .collect()
}

fn face_area(face: &FaceSpec, positions: &[Vec3]) -> f64 {
    if !face.has_polygon() {
        return 0.0;
    }
    let axis = face.outward();
    face.loops.iter().map(|lp| loop_area(axis, &gather(lp, positions))).sum()
}

fn gather(lp: &[usize], values: &[Vec3]) -> Vec<Vec3> {
    lp.iter().map(|&i| values[i]).collect()
}

fn validate_loops(topology: &SurfaceTopology, positions: &[Vec3]) -> Result<(), GeometryError> {
    for (fi, face) in topology.faces.iter().enumerate().filter(|(_, f)| f.has_polygon()) {
        for (ri, lp) in face.loops.iter().enumerate() {
            if lp.len() < 3 {
                return Err(GeometryError::ShortLoop { face: fi });
            }
            if let Some(&vertex) = lp.iter().find(|&&v| !topology.vertices[v].contains(&fi)) {
                return Err(GeometryError::ForeignVertex { face: fi, ring: ri, vertex });
            }
        }
        check_face_polygon(topology, fi, positions)?;
    }
    Ok(())
}

fn check_face_polygon(topology: &SurfaceTopology, fi: usize, positions: &[Vec3]) -> Result<(), GeometryError> {
    let face = &topology.faces[fi];
    let axis = face.outward();
    let (u, v) = plane_frame(axis);
    let scale = face
        .loops
        .iter()
        .flatten()
        .map(|&i| positions[i].max_abs())
        .fold(1.0, f64::max);
    let tol = AREA_TOL * scale * scale;
    let mut segments = Vec::new();
    for (ri, lp) in face.loops.iter().enumerate() {
        let area = loop_area(axis, &gather(lp, positions));
        let bad = if ri == 0 {
            if topology.degenerate_ok { area < -tol } else { area <= tol }
        } else {
            area > tol
        };
        if bad {
            return Err(GeometryError::SelfIntersectingLoop { face: fi, ring: ri });
        }
        for (a, b) in cyclic_pairs(lp) {
            segments.push((ri, a, b));
        }
    }
    let flat = |i: usize| (positions[i].dot(u), positions[i].dot(v));
    for (i, &(ri, a, b)) in segments.iter().enumerate() {
        for &(_, c, d) in &segments[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_cross(flat(a), flat(b), flat(c), flat(d), tol) {
                return Err(GeometryError::SelfIntersectingLoop { face: fi, ring: ri });
            }
        }
    }
    Ok(())
}

fn validate_edges(topology: &SurfaceTopology, positions: &[Vec3]) -> Result<(), GeometryError> {
    let mut uses: HashMap<(usize, usize), usize> = HashMap::new();
    for face in topology.faces.iter().filter(|f| f.has_polygon()) {
        for lp in &face.loops {
            for (a, b) in cyclic_pairs(lp) {
                *uses.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
    }
    let mut dangling = Vec::new();
    for (&key, &count) in &uses {
        match count {
            2 => {}
            1 if topology.period.is_some() => dangling.push(key),
            _ => return Err(GeometryError::NonManifoldEdge { vertices: key, count }),
        }
    }
    // Across the period boundary an edge must reappear translated by ±T.
    if let Some(t) = topology.period {
        let tol = 1e-9 * (1.0 + t.norm());
        let mut matched = vec![false; dangling.len()];
        for i in 0..dangling.len() {
            if matched[i] {
                continue;
            }
            let (a, b) = dangling[i];
            let (pa, pb) = (positions[a], positions[b]);
            let hit = (0..dangling.len()).find(|&j| {
                if j == i || matched[j] {
                    return false;
                }
                let (c, d) = dangling[j];
                let (pc, pd) = (positions[c], positions[d]);
                [t, -t].iter().any(|&s| {
                    let same = (pc - pa - s).norm() < tol && (pd - pb - s).norm() < tol;
                    let swapped = (pd - pa - s).norm() < tol && (pc - pb - s).norm() < tol;
                    same || swapped
                })
            });
            match hit {
                Some(j) => {
                    matched[i] = true;
                    matched[j] = true;
                }
                None => return Err(GeometryError::NonManifoldEdge { vertices: (a, b), count: 1 }),
            }
        }
    }
    Ok(())
}

/// Volume, and its rate when face offset rates and vertex velocities are given.
///
/// Closed surfaces use `V = (1/3) Σ sign·h·A`. Periodic surfaces integrate
/// the field that is the position with its component along the period removed,
/// which has divergence 2 and no flux through cuts transverse to the period.
fn volume_and_rate(
    topology: &SurfaceTopology,
    positions: &[Vec3],
    areas: &[f64],
    motion: Option<(&[f64], &[Vec3], &[f64])>,
) -> (f64, f64) {
    let mut vol = 0.0;
    let mut rate = 0.0;
    let t_hat = topology.period.map(|t| t.normalized());
    for (fi, face) in topology.faces.iter().enumerate().filter(|(_, f)| f.has_polygon()) {
        let sign = face.orientation.sign();
        let (dh, da) = motion.map_or((0.0, 0.0), |(dh, _, da)| (dh[fi], da[fi]));
        match t_hat {
            None => {
                vol += sign * face.offset * areas[fi] / 3.0;
                rate += sign * (dh * areas[fi] + face.offset * da) / 3.0;
            }
            Some(t) => {
                let axis = face.outward();
                let mut m = 0.0;
                let mut dm = 0.0;
                for lp in &face.loops {
                    let pts = gather(lp, positions);
                    let vel = motion.map(|(_, v, _)| gather(lp, v));
                    let (lm, ldm) = loop_moment(axis, t, &pts, vel.as_deref());
                    m += lm;
                    dm += ldm;
                }
                let nt = face.normal().dot(t);
                vol += 0.5 * sign * (face.offset * areas[fi] - nt * m);
                rate += 0.5 * sign * (dh * areas[fi] + face.offset * da - nt * dm);
            }
        }
    }
    (vol, rate)
}

impl RealizedSurface {
    /// `Σ sign·area·n`; vanishes for closed (or periodically closed) surfaces.
    pub fn closure_vector(&self) -> Vec3 {
        self.topology
            .faces
            .iter()
            .zip(&self.face_areas)
            .filter(|(f, _)| f.has_polygon())
            .fold(Vec3::ZERO, |acc, (f, a)| acc + f.outward() * *a)
    }

    /// Largest `|x·n - h|` over vertices and their three planes.
    pub fn plane_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (p, tri) in self.positions.iter().zip(&self.topology.vertices) {
            for &f in tri {
                let face = &self.topology.faces[f];
                worst = worst.max((p.dot(face.normal()) - face.offset).abs());
            }
        }
        worst
    }

    /// Volume from a fan decomposition of every polygon: tetrahedra to the
    /// origin for closed surfaces, wedges to the period axis otherwise.
    pub fn volume_by_decomposition(&self) -> f64 {
        let t_hat = self.topology.period.map(|t| t.normalized());
        let mut vol = 0.0;
        for face in self.topology.faces.iter().filter(|f| f.has_polygon()) {
            for lp in &face.loops {
                let p0 = self.positions[lp[0]];
                for w in lp[1..].windows(2) {
                    let (p1, p2) = (self.positions[w[0]], self.positions[w[1]]);
                    match t_hat {
                        None => vol += p0.dot(p1.cross(p2)) / 6.0,
                        Some(t) => {
                            let c = (p0 + p1 + p2) / 3.0;
                            let c_perp = c - t * c.dot(t);
                            let vector_area = (p1 - p0).cross(p2 - p0) * 0.5;
                            vol += 0.5 * c_perp.dot(vector_area);
                        }
                    }
                }
            }
        }
        vol
    }

    /// Areas of the faces of one component, keyed by face index.
    pub fn component_faces(&self, component: usize) -> impl Iterator<Item = usize> + '_ {
        self.topology
            .faces
            .iter()
            .enumerate()
            .filter(move |(_, f)| f.component == component && f.role == FaceRole::Surface)
            .map(|(i, _)| i)
    }

    /// Exact one-sided derivatives `(dE, dV)` for a unit-speed outward
    /// translation of every face in `class`.
    pub fn face_translation_derivative(&self, class: &SymmetryClass) -> Result<(f64, f64), GeometryError> {
        let topo = &self.topology;
        if !topo.faces.iter().any(|f| f.role == FaceRole::Surface && f.class.as_ref() == Some(class)) {
            return Err(GeometryError::UnknownClass(class.clone()));
        }
        let dh: Vec<f64> = topo
            .faces
            .iter()
            .map(|f| if f.class.as_ref() == Some(class) { f.orientation.sign() } else { 0.0 })
            .collect();
        let velocity = solve_positions(topo, |fi| dh[fi])?;
        if !topo.degenerate_ok {
            self.check_collapse(class, &velocity)?;
        }
        let norm = HexNorm::new();
        let mut d_area = vec![0.0; topo.faces.len()];
        let mut d_energy = 0.0;
        for (fi, face) in topo.faces.iter().enumerate().filter(|(_, f)| f.has_polygon()) {
            let axis = face.outward();
            d_area[fi] = face
                .loops
                .iter()
                .map(|lp| loop_area_rate(axis, &gather(lp, &self.positions), &gather(lp, &velocity)))
                .sum();
            if face.role == FaceRole::Surface {
                d_energy += norm.psi(face.normal())? * d_area[fi];
            }
        }
        let (_, d_volume) = volume_and_rate(topo, &self.positions, &self.face_areas, Some((&dh, &velocity, &d_area)));
        Ok((d_energy, d_volume))
    }

    fn check_collapse(&self, class: &SymmetryClass, velocity: &[Vec3]) -> Result<(), GeometryError> {
        let topo = &self.topology;
        let mut short = Vec::new();
        for (fi, face) in topo.faces.iter().enumerate().filter(|(_, f)| f.has_polygon()) {
            for lp in &face.loops {
                for (a, b) in cyclic_pairs(lp) {
                    if (self.positions[a] - self.positions[b]).norm() < COLLAPSE_LEN {
                        short.push((fi, (a, b)));
                    }
                }
            }
        }
        if short.is_empty() {
            return Ok(());
        }
        let probe: Vec<Vec3> = self.positions.iter().zip(velocity).map(|(p, v)| *p + *v * COLLAPSE_PROBE).collect();
        for &(fi, vertices) in &short {
            if check_face_polygon(topo, fi, &probe).is_err() {
                return Err(GeometryError::Collapse { class: class.clone(), face: fi, vertices });
            }
        }
        Ok(())
    }

    /// `dE - 2·dV` for every surface class; all zero certifies equilibrium
    /// under face translations.
    pub fn mean_curvature_residual(&self) -> Result<BTreeMap<SymmetryClass, f64>, GeometryError> {
        self.topology
            .classes()
            .into_iter()
            .map(|c| {
                let (de, dv) = self.face_translation_derivative(&c)?;
                Ok((c, de - LAGRANGE * dv))
            })
            .collect()
    }
}

/// Incremental construction of a [`SurfaceTopology`]; vertices are
/// deduplicated by their plane triple.
#[derive(Debug, Default)]
pub struct SurfaceBuilder {
    topology: SurfaceTopology,
    vertex_ids: HashMap<[usize; 3], usize>,
}

impl SurfaceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn component(&mut self, name: impl Into<String>) -> usize {
        self.topology.components.push(name.into());
        self.topology.components.len() - 1
    }

    #[allow(clippy::too_many_arguments)]
    pub fn face(
        &mut self,
        facet: FacetDir,
        offset: f64,
        orientation: Orientation,
        class: Option<SymmetryClass>,
        role: FaceRole,
        component: usize,
    ) -> usize {
        self.topology.faces.push(FaceSpec { facet, offset, orientation, class, role, component, loops: Vec::new() });
        self.topology.faces.len() - 1
    }

    pub fn face_spec(&self, face: usize) -> &FaceSpec {
        &self.topology.faces[face]
    }

    pub fn vertex(&mut self, a: usize, b: usize, c: usize) -> usize {
        let mut key = [a, b, c];
        key.sort_unstable();
        if let Some(&id) = self.vertex_ids.get(&key) {
            return id;
        }
        self.topology.vertices.push(key);
        let id = self.topology.vertices.len() - 1;
        self.vertex_ids.insert(key, id);
        id
    }

    pub fn push_loop(&mut self, face: usize, ring: Vec<usize>) {
        self.topology.faces[face].loops.push(ring);
    }

    pub fn finish(mut self, period: Option<Vec3>, degenerate_ok: bool) -> SurfaceTopology {
        self.topology.period = period;
        self.topology.degenerate_ok = degenerate_ok;
        self.topology
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{wulff_prism, PrismSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    /// Central differences on realized surfaces; independent of the
    /// velocity-based derivative.
    fn finite_difference(topo: &SurfaceTopology, class: &SymmetryClass, step: f64) -> (f64, f64) {
        let plus = realize(&topo.translated(class, step)).unwrap();
        let minus = realize(&topo.translated(class, -step)).unwrap();
        ((plus.energy - minus.energy) / (2.0 * step), (plus.volume - minus.volume) / (2.0 * step))
    }

    #[test]
    fn wulff_prism_measures() {
        let s = realize(&wulff_prism()).unwrap();
        assert!((s.volume - 4.0 * SQRT3).abs() < 1e-12);
        assert!((s.energy - 12.0 * SQRT3).abs() < 1e-12);
        assert!((s.energy - 3.0 * s.volume).abs() < 1e-12);
        assert!(s.closure_vector().norm() < 1e-12);
        assert!(s.plane_residual() < 1e-12);
        assert!((s.volume_by_decomposition() - s.volume).abs() < 1e-12);
        assert_eq!(s.positions.len(), 12);
    }

    #[test]
    fn wulff_prism_derivatives() {
        let s = realize(&wulff_prism()).unwrap();
        let (de, dv) = s.face_translation_derivative(&"top".into()).unwrap();
        assert!((de - 4.0 * SQRT3).abs() < 1e-12 && (dv - 2.0 * SQRT3).abs() < 1e-12);
        let (de, dv) = s.face_translation_derivative(&"lateral0".into()).unwrap();
        assert!((de - 8.0 / SQRT3).abs() < 1e-12 && (dv - 4.0 / SQRT3).abs() < 1e-12);
        for (_, r) in s.mean_curvature_residual().unwrap() {
            assert!(r.abs() < 1e-12);
        }
        let fd = finite_difference(&wulff_prism(), &"top".into(), 1e-6);
        assert!((fd.0 - 4.0 * SQRT3).abs() < 1e-8 && (fd.1 - 2.0 * SQRT3).abs() < 1e-8);
    }

    #[test]
    fn volume_rate_is_swept_area() {
        let s = realize(&wulff_prism()).unwrap();
        for class in s.topology.classes() {
            let area: f64 = s
                .topology
                .faces
                .iter()
                .zip(&s.face_areas)
                .filter(|(f, _)| f.class.as_ref() == Some(&class))
                .map(|(_, a)| a)
                .sum();
            let (_, dv) = s.face_translation_derivative(&class).unwrap();
            assert!((dv - area).abs() < 1e-12);
        }
    }

    #[test]
    fn derivatives_match_finite_differences_on_perturbed_prisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let mut spec = PrismSpec::wulff();
            for h in spec.lateral.iter_mut() {
                *h += rng.gen_range(-0.2..0.2);
            }
            spec.half_height += rng.gen_range(-0.3..0.3);
            let topo = spec.standalone();
            let s = realize(&topo).unwrap();
            for class in topo.classes() {
                let (de, dv) = s.face_translation_derivative(&class).unwrap();
                let (fe, fv) = finite_difference(&topo, &class, 1e-6);
                assert!((de - fe).abs() <= 1e-8 * de.abs().max(1.0), "{class}: {de} vs {fe}");
                assert!((dv - fv).abs() <= 1e-8 * dv.abs().max(1.0), "{class}: {dv} vs {fv}");
            }
        }
    }

    #[test]
    fn unknown_class_is_an_error() {
        let s = realize(&wulff_prism()).unwrap();
        assert!(matches!(s.face_translation_derivative(&"nope".into()), Err(GeometryError::UnknownClass(_))));
    }

    #[test]
    fn parallel_vertex_planes_are_rejected() {
        let mut topo = wulff_prism();
        topo.vertices[0] = [0, 3, 6];
        assert!(matches!(realize(&topo), Err(GeometryError::SingularVertex { .. })));
    }

    #[test]
    fn inverted_face_is_rejected() {
        // Pushing the top below the bottom turns every lateral face inside out.
        let mut spec = PrismSpec::wulff();
        spec.half_height = -0.5;
        assert!(matches!(realize(&spec.standalone()), Err(GeometryError::SelfIntersectingLoop { .. })));
    }

    #[test]
    fn open_surface_is_rejected() {
        let mut topo = wulff_prism();
        topo.faces[6].loops.clear();
        assert!(matches!(realize(&topo), Err(GeometryError::NonManifoldEdge { .. })));
    }

    #[test]
    fn edges_pair_faces() {
        let topo = wulff_prism();
        let edges = topo.edges();
        assert_eq!(edges.len(), 18);
        assert!(edges.iter().all(|e| e.faces.0 != e.faces.1));
    }
}
