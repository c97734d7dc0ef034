//! One period of the hexagonal unduloid and nodoid: a prism whose two faces
//! across the chain axis are pierced and joined to the next period by a small
//! hexagonal tube.
//!
//! The prism has lateral offsets `[a, b, b, a, b, b]` with `a = (√3/2)S` and
//! `b = (√3/4)(R + S)`, so the pierced faces (local 0 and 3) have width `R`
//! and the others width `S`. The tube has length `√3 s` along the axis and
//! cross-section widths `(r, s, s, r, s, s)`. The unduloid tube sits between
//! the prisms, giving period `√3(S + s)`; the nodoid tube runs backwards
//! inside the overlap of consecutive prisms, giving period `√3(S - s)`.

use std::fmt;

use thiserror::Error;

use crate::construct::{add_prism, add_tube, tube_loops, tube_rim, PrismSpec, TubeEnd, TubeFaces, TubeSpec, SQRT3};
use crate::hexnorm::{FacetDir, Vec3};
use crate::newton::{self, NewtonConfig, NewtonError};
use crate::offset_surface::{realize, FaceRole, GeometryError, Orientation, RealizedSurface, SurfaceBuilder, SymmetryClass};
use crate::par::Execution;

/// Width of a Wulff prism side.
pub const WULFF_SIDE: f64 = 2.0 / SQRT3;

/// Class names in residual order.
pub const CLASS_NAMES: [&str; 5] = ["Q", "R", "S", "q", "s"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DelaunayKind {
    Unduloid,
    Nodoid,
}

impl DelaunayKind {
    /// +1 when the tube lies between prisms, -1 when it runs back through them.
    pub fn sigma(self) -> f64 {
        match self {
            DelaunayKind::Unduloid => 1.0,
            DelaunayKind::Nodoid => -1.0,
        }
    }

    fn tube_orientation(self) -> Orientation {
        match self {
            DelaunayKind::Unduloid => Orientation::Positive,
            DelaunayKind::Nodoid => Orientation::Negative,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DelaunayKind::Unduloid => "unduloid",
            DelaunayKind::Nodoid => "nodoid",
        }
    }
}

impl fmt::Display for DelaunayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaunayParams {
    pub kind: DelaunayKind,
    pub r: f64,
    pub Q: f64,
    pub R: f64,
    pub S: f64,
    pub q: f64,
    pub s: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelaunayError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("r = {r} outside the solver range (0, {r_max}]")]
    OutOfRange { r: f64, r_max: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("solve failed at r = {r}: {source}")]
    Solver { r: f64, source: NewtonError },
}

impl DelaunayParams {
    /// The Wulff chain `Q = 2, R = S = 2/√3` with no tube.
    pub fn trivial(kind: DelaunayKind) -> Self {
        Self { kind, r: 0.0, Q: 2.0, R: WULFF_SIDE, S: WULFF_SIDE, q: 0.0, s: 0.0 }
    }

    /// Unknowns in residual order.
    pub fn unknowns(&self) -> [f64; 5] {
        [self.Q, self.R, self.S, self.q, self.s]
    }

    pub fn with_unknowns(&self, x: &[f64]) -> Self {
        Self { Q: x[0], R: x[1], S: x[2], q: x[3], s: x[4], ..*self }
    }

    /// Distance from the prism center to a pierced face.
    pub fn apothem_r(&self) -> f64 {
        0.5 * SQRT3 * self.S
    }

    /// Distance from the prism center to a plain face.
    pub fn apothem_s(&self) -> f64 {
        0.25 * SQRT3 * (self.R + self.S)
    }

    pub fn period_length(&self) -> f64 {
        SQRT3 * (self.S + self.kind.sigma() * self.s)
    }

    /// `2a - L`: how far consecutive prisms overlap (negative means a gap).
    pub fn overlap_depth(&self) -> f64 {
        2.0 * self.apothem_r() - self.period_length()
    }

    fn is_degenerate(&self) -> bool {
        self.r == 0.0 || self.q == 0.0 || self.s == 0.0
    }

    pub fn validate(&self) -> Result<(), DelaunayError> {
        let fail = |m: &str| Err(DelaunayError::Invalid(m.to_string()));
        if !self.unknowns().iter().chain([&self.r]).all(|v| v.is_finite()) {
            return fail("all parameters must be finite");
        }
        if self.r < 0.0 {
            return fail("r >= 0");
        }
        if self.q < 0.0 {
            return fail("q >= 0");
        }
        if self.s < 0.0 {
            return fail("s >= 0");
        }
        if self.Q <= 0.0 || self.R <= 0.0 || self.S <= 0.0 {
            return fail("Q, R, S > 0");
        }
        if self.r >= self.R {
            return fail("r < R");
        }
        if self.q >= self.Q {
            return fail("q < Q");
        }
        if self.kind == DelaunayKind::Nodoid && self.s >= self.S {
            return fail("s < S (positive nodoid period)");
        }
        let w = crate::construct::hexagon_widths(&self.lateral_offsets());
        let expect = [self.R, self.S, self.S, self.R, self.S, self.S];
        if w.iter().zip(&expect).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + b.abs())) {
            return fail("cross-section (R, S, S, R, S, S) does not close");
        }
        Ok(())
    }

    fn lateral_offsets(&self) -> [f64; 6] {
        let (a, b) = (self.apothem_r(), self.apothem_s());
        [a, b, b, a, b, b]
    }
}

fn class(name: &str) -> Option<SymmetryClass> {
    Some(SymmetryClass::new(name))
}

/// Builds and realizes one period, centered on the prism, repeating along +x.
pub fn build_period(p: &DelaunayParams) -> Result<RealizedSurface, DelaunayError> {
    p.validate()?;
    let sigma = p.kind.sigma();
    let a = p.apothem_r();
    let len = p.period_length();
    let tube_wall = 0.25 * SQRT3 * (p.r + p.s);

    let mut b = SurfaceBuilder::new();
    let prism_c = b.component("prism");
    let tube_c = b.component("tube");
    let prism = add_prism(
        &mut b,
        &PrismSpec {
            center: Vec3::ZERO,
            rotation: 0,
            lateral: p.lateral_offsets(),
            half_height: 0.5 * p.Q,
            orientation: Orientation::Positive,
            lateral_classes: ["R", "S", "S", "R", "S", "S"].map(class),
            top_class: class("Q"),
            bottom_class: class("Q"),
        },
        prism_c,
    );
    let (p0, p3) = (prism.lateral[0], prism.lateral[3]);
    // Pierced faces of the neighbouring periods, seen from this one.
    let next_p3 = b.face(FacetDir::lateral(3), a - len, Orientation::Positive, class("R"), FaceRole::Support, prism_c);
    let prev_p0 = b.face(FacetDir::lateral(0), a - len, Orientation::Positive, class("R"), FaceRole::Support, prism_c);

    let tube = |center: f64, toward_next: (usize, usize)| {
        let (plus, minus) = if sigma > 0.0 { toward_next } else { (toward_next.1, toward_next.0) };
        TubeSpec {
            center: Vec3::new(center, 0.0, 0.0),
            axis: 0,
            wall_offset: tube_wall,
            half_height: 0.5 * p.q,
            orientation: p.kind.tube_orientation(),
            wall_class: class("s"),
            cap_class: class("q"),
            plus,
            minus,
        }
    };
    // Tube 0 joins this prism to the next; tube -1 joins the previous prism to this one.
    let t0 = add_tube(&mut b, &tube(0.5 * len, (next_p3, p0)), FaceRole::Surface, tube_c);
    let t_prev = add_tube(&mut b, &tube(-0.5 * len, (p3, prev_p0)), FaceRole::Support, tube_c);
    tube_loops(&mut b, &t0);
    let end_at = |t: &TubeFaces, face: usize| if t.plus == face { TubeEnd::Plus } else { TubeEnd::Minus };
    tube_rim(&mut b, &t0, end_at(&t0, p0), p0, true);
    tube_rim(&mut b, &t_prev, end_at(&t_prev, p3), p3, true);

    let topo = b.finish(Some(Vec3::new(len, 0.0, 0.0)), p.is_degenerate());
    Ok(realize(&topo)?)
}

/// Equilibrium residual `dE - 2dV`, one entry per face class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualVector(pub [f64; 5]);

impl ResidualVector {
    pub fn max_abs(&self) -> f64 {
        newton::max_norm(&self.0)
    }
}

pub fn residual(p: &DelaunayParams) -> Result<ResidualVector, DelaunayError> {
    let surface = build_period(p)?;
    residual_of(&surface)
}

pub fn residual_of(surface: &RealizedSurface) -> Result<ResidualVector, DelaunayError> {
    let mut out = [0.0; 5];
    for (slot, name) in CLASS_NAMES.iter().enumerate() {
        let (de, dv) = surface.face_translation_derivative(&SymmetryClass::new(*name))?;
        out[slot] = de - crate::offset_surface::LAGRANGE * dv;
    }
    Ok(ResidualVector(out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub r_min: f64,
    pub r_max: f64,
    /// Largest continuation step in r.
    pub r_step: f64,
    pub newton: NewtonConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { r_min: 1e-3, r_max: 0.2, r_step: 0.01, newton: NewtonConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelaunaySolution {
    pub params: DelaunayParams,
    pub residual_norm: f64,
    /// Newton iterations of the final solve.
    pub iterations: usize,
}

/// Newton on the five unknowns with `r` held fixed.
pub fn solve_from(start: &DelaunayParams, cfg: &NewtonConfig) -> Result<DelaunaySolution, DelaunayError> {
    let f = |x: &[f64]| residual(&start.with_unknowns(x)).ok().map(|v| v.0.to_vec());
    let out = newton::solve(f, &start.unknowns(), cfg).map_err(|source| DelaunayError::Solver { r: start.r, source })?;
    Ok(DelaunaySolution { params: start.with_unknowns(&out.x), residual_norm: out.residual_norm, iterations: out.iterations })
}

/// Small-r seed from the leading-order tube shape `q ≈ (√3/2)r`, `s ≈ r/2`.
fn seed(kind: DelaunayKind, r: f64) -> DelaunayParams {
    DelaunayParams { r, q: 0.5 * SQRT3 * r, s: 0.5 * r, ..DelaunayParams::trivial(kind) }
}

/// Solves the branch at `r`, either from `guess` or by continuation from
/// `r_min` upward.
pub fn solve(
    kind: DelaunayKind,
    r: f64,
    guess: Option<&DelaunayParams>,
    cfg: &SolveConfig,
) -> Result<DelaunaySolution, DelaunayError> {
    if r == 0.0 {
        return Ok(DelaunaySolution { params: DelaunayParams::trivial(kind), residual_norm: 0.0, iterations: 0 });
    }
    if !(r > 0.0 && r <= cfg.r_max) {
        return Err(DelaunayError::OutOfRange { r, r_max: cfg.r_max });
    }
    if let Some(g) = guess {
        return solve_from(&DelaunayParams { kind, r, ..*g }, &cfg.newton);
    }
    let mut current = solve_from(&seed(kind, cfg.r_min.min(r)), &cfg.newton)?;
    while current.params.r < r {
        let next_r = (current.params.r + cfg.r_step).min(r);
        current = solve_from(&DelaunayParams { r: next_r, ..current.params }, &cfg.newton)?;
    }
    Ok(current)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    pub result: Result<DelaunaySolution, DelaunayError>,
}

/// Independent solves, one per `r`; failures are kept as rows.
pub fn sweep(kind: DelaunayKind, r_values: &[f64], cfg: &SolveConfig, exec: Execution) -> Vec<SweepRow> {
    exec.map(r_values, |&r| SweepRow { r, result: solve(kind, r, None, cfg) })
}

/// Extent of the prism component along the chain axis.
pub fn prism_slab(surface: &RealizedSurface) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for fi in surface.component_faces(0) {
        for lp in &surface.topology.faces[fi].loops {
            for &v in lp {
                lo = lo.min(surface.positions[v].x);
                hi = hi.max(surface.positions[v].x);
            }
        }
    }
    (lo, hi)
}

/// Whether the prism overlaps its translate by one period.
pub fn self_intersects(surface: &RealizedSurface) -> bool {
    let len = surface.topology.period.map_or(f64::INFINITY, |t| t.norm());
    let (lo, hi) = prism_slab(surface);
    hi - lo > len + 1e-12
}
