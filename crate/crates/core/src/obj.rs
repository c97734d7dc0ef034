//! Wavefront OBJ export and re-measurement of realized surfaces.
//!
//! Only `o`, `v` and `f` records are written. Each component is its own
//! object with its own vertices, so overlapping sheets keep separate copies.
//! A face with a hole is written as four quads between its boundary and the
//! hole.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::hexnorm::{HexNorm, Vec3};
use crate::offset_surface::{FaceRole, RealizedSurface};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjError {
    #[error("face {face} has {loops} loops of sizes {sizes:?}; only plain polygons and quads with one quad hole are supported")]
    UnsupportedFace { face: usize, loops: usize, sizes: Vec<usize> },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObjMesh {
    pub objects: Vec<String>,
    pub vertices: Vec<Vec3>,
    /// Zero-based vertex indices.
    pub faces: Vec<Vec<usize>>,
    /// Object index of each face.
    pub face_object: Vec<usize>,
}

fn fmt_coord(out: &mut String, v: f64) {
    let _ = write!(out, " {v:.16e}");
}

/// Polygons of a face: its boundary alone, or four quads around one hole.
fn face_polygons(s: &RealizedSurface, fi: usize) -> Result<Vec<Vec<usize>>, ObjError> {
    let loops = &s.topology.faces[fi].loops;
    match loops.as_slice() {
        [outer] => Ok(vec![outer.clone()]),
        [outer, hole] if outer.len() == 4 && hole.len() == 4 => {
            // hole loops run clockwise; walk it counterclockwise and pair
            // each boundary corner with the nearest hole corner
            let inner: Vec<usize> = hole.iter().rev().copied().collect();
            let cost = |shift: usize| -> f64 {
                (0..4).map(|k| (s.positions[outer[k]] - s.positions[inner[(k + shift) % 4]]).norm()).sum()
            };
            let shift = (0..4).min_by(|&a, &b| cost(a).total_cmp(&cost(b))).unwrap_or(0);
            Ok((0..4)
                .map(|k| vec![outer[k], outer[(k + 1) % 4], inner[(k + 1 + shift) % 4], inner[(k + shift) % 4]])
                .collect())
        }
        _ => Err(ObjError::UnsupportedFace { face: fi, loops: loops.len(), sizes: loops.iter().map(Vec::len).collect() }),
    }
}

/// Writes the surface faces of every component; vertex order follows the
/// topology order, so equal surfaces give byte-identical files.
pub fn export_obj(s: &RealizedSurface) -> Result<String, ObjError> {
    let mut out = String::new();
    let mut next = 1usize;
    for (ci, name) in s.topology.components.iter().enumerate() {
        let faces: Vec<usize> = s.component_faces(ci).collect();
        if faces.is_empty() {
            continue;
        }
        let polygons: Vec<Vec<usize>> =
            faces.iter().map(|&f| face_polygons(s, f)).collect::<Result<Vec<_>, _>>()?.into_iter().flatten().collect();
        let mut local: HashMap<usize, usize> = HashMap::new();
        let mut order = Vec::new();
        for &v in polygons.iter().flatten() {
            local.entry(v).or_insert_with(|| {
                order.push(v);
                next + order.len() - 1
            });
        }
        let _ = writeln!(out, "o {name}");
        for &v in &order {
            let p = s.positions[v];
            out.push('v');
            fmt_coord(&mut out, p.x);
            fmt_coord(&mut out, p.y);
            fmt_coord(&mut out, p.z);
            out.push('\n');
        }
        for poly in &polygons {
            out.push('f');
            for v in poly {
                let _ = write!(out, " {}", local[v]);
            }
            out.push('\n');
        }
        next += order.len();
    }
    Ok(out)
}

/// Reads `o`, `v` and `f` records; `#` comments and blank lines are skipped.
pub fn parse_obj(text: &str) -> Result<ObjMesh, ObjError> {
    let mut mesh = ObjMesh::default();
    for (n, line) in text.lines().enumerate() {
        let err = |message: String| ObjError::Parse { line: n + 1, message };
        let mut parts = line.split_whitespace();
        match parts.next() {
            None => {}
            Some(t) if t.starts_with('#') => {}
            Some("o") => mesh.objects.push(parts.collect::<Vec<_>>().join(" ")),
            Some("v") => {
                let c: Vec<f64> = parts
                    .map(|p| p.parse::<f64>().map_err(|e| err(format!("bad coordinate {p}: {e}"))))
                    .collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(err(format!("expected 3 coordinates, got {}", c.len())));
                }
                mesh.vertices.push(Vec3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = parts
                    .map(|p| {
                        let head = p.split('/').next().unwrap_or(p);
                        match head.parse::<usize>() {
                            Ok(i) if i >= 1 && i <= mesh.vertices.len() => Ok(i - 1),
                            _ => Err(err(format!("bad vertex reference {p}"))),
                        }
                    })
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(err("face with fewer than 3 vertices".into()));
                }
                mesh.faces.push(idx);
                mesh.face_object.push(mesh.objects.len().saturating_sub(1));
            }
            Some(other) => return Err(err(format!("unsupported record {other}"))),
        }
    }
    Ok(mesh)
}

fn vector_area(pts: &[Vec3]) -> Vec3 {
    let p0 = pts[0];
    let mut acc = Vec3::ZERO;
    for w in pts[1..].windows(2) {
        acc += (w[0] - p0).cross(w[1] - p0);
    }
    acc * 0.5
}

/// Energy and enclosed volume of a parsed mesh. Closed meshes use
/// tetrahedra to the origin; periodic ones (period vector `period`) use
/// wedges to the period axis through the origin.
pub fn measure(mesh: &ObjMesh, period: Option<Vec3>) -> (f64, f64) {
    let norm = HexNorm::new();
    let axis = period.map(|t| t.normalized());
    let mut energy = 0.0;
    let mut volume = 0.0;
    for face in &mesh.faces {
        let pts: Vec<Vec3> = face.iter().map(|&i| mesh.vertices[i]).collect();
        let area = vector_area(&pts);
        if area.norm() > 0.0 {
            energy += norm.psi(area).unwrap_or(f64::NAN);
        }
        let p0 = pts[0];
        for w in pts[1..].windows(2) {
            let (p1, p2) = (w[0], w[1]);
            match axis {
                None => volume += p0.dot(p1.cross(p2)) / 6.0,
                Some(t) => {
                    let c = (p0 + p1 + p2) / 3.0;
                    let c_perp = c - t * c.dot(t);
                    volume += 0.5 * c_perp.dot((p1 - p0).cross(p2 - p0) * 0.5);
                }
            }
        }
    }
    (energy, volume)
}

/// Number of polygons `export_obj` writes for `s`.
pub fn exported_face_count(s: &RealizedSurface) -> usize {
    s.topology
        .faces
        .iter()
        .filter(|f| f.role == FaceRole::Surface)
        .map(|f| if f.loops.len() > 1 { 4 } else { 1 })
        .sum()
}
