//! The compact immersed surface: six perturbed Wulff prisms at the vertices of
//! a big regular hexagon, unduloid chains along its sides and nodoid chains
//! along its three long diagonals.
//!
//! A vertex prism at angle `60°j` has local widths `(S, S, R1, R2, R1, S)`:
//! faces 2 and 4 meet the unduloids and face 3 the nodoid through the center.
//! Offsets are chosen so that all three holes are centered on the prism
//! center's axis lines: `h1 = h3 = h5 = (2R1 + R2)/(3k)`,
//! `h2 = h4 = (R1 + 2R2)/(3k)`, `h0 = 2h1 - S/k` with `k = 2/√3`.

use std::cell::RefCell;

use thiserror::Error;

use crate::construct::{add_prism, add_tube, tube_loops, tube_rim, PrismFaces, PrismSpec, TubeEnd, TubeSpec, SQRT3};
use crate::delaunay::{self, DelaunayError, DelaunayKind, DelaunayParams, SolveConfig, WULFF_SIDE};
use crate::hexnorm::{FacetDir, Vec3};
use crate::newton::{self, NewtonConfig, NewtonError};
use crate::offset_surface::{
    realize, FaceRole, GeometryError, Orientation, RealizedSurface, SurfaceBuilder, SymmetryClass, LAGRANGE,
};

/// Vertex-prism classes in residual order.
pub const VERTEX_CLASSES: [&str; 4] = ["vertex.Q0", "vertex.R1", "vertex.R2", "vertex.S"];

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyParams {
    pub r1: f64,
    pub r2: f64,
    pub Q0: f64,
    pub R1: f64,
    pub R2: f64,
    pub m_u: usize,
    pub m_n: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("r1 = {r1} outside the solver range (0, {r1_max}]")]
    OutOfRange { r1: f64, r1_max: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Chain(#[from] DelaunayError),
    #[error("assembly solve failed at r1 = {r1}: {source}")]
    Solver { r1: f64, source: NewtonError },
    #[error("no sign change of the length mismatch: {lo_mismatch:e} at r1 = {lo}, {hi_mismatch:e} at r1 = {hi}")]
    NoBracket { lo: f64, hi: f64, lo_mismatch: f64, hi_mismatch: f64 },
    #[error("bisection stalled at r1 = {r1} with mismatch {mismatch:e}")]
    FitStalled { r1: f64, mismatch: f64 },
    #[error("parameters are not closure-fitted (mismatch {0:e})")]
    Unfitted(f64),
}

impl AssemblyParams {
    pub fn trivial(m_u: usize, m_n: usize) -> Self {
        Self { r1: 0.0, r2: 0.0, Q0: 2.0, R1: WULFF_SIDE, R2: WULFF_SIDE, m_u, m_n }
    }

    /// Width of the three plain faces; closes the cross-section.
    #[allow(non_snake_case)]
    pub fn S(&self) -> f64 {
        0.5 * (self.R1 + self.R2)
    }

    pub fn unknowns(&self) -> [f64; 4] {
        [self.Q0, self.R1, self.R2, self.r2]
    }

    pub fn with_unknowns(&self, x: &[f64]) -> Self {
        Self { Q0: x[0], R1: x[1], R2: x[2], r2: x[3], ..*self }
    }

    /// Local lateral offsets `[h0, u, w, u, w, u]`.
    pub fn lateral_offsets(&self) -> [f64; 6] {
        let k = WULFF_SIDE;
        let u = (2.0 * self.R1 + self.R2) / (3.0 * k);
        let w = (self.R1 + 2.0 * self.R2) / (3.0 * k);
        [2.0 * u - self.S() / k, u, w, u, w, u]
    }

    /// Distance from the prism center to an R1 face.
    pub fn offset_r1(&self) -> f64 {
        self.lateral_offsets()[2]
    }

    /// Distance from the prism center to the R2 face.
    pub fn offset_r2(&self) -> f64 {
        self.lateral_offsets()[3]
    }

    fn validate(&self, u: &DelaunayParams, n: &DelaunayParams) -> Result<(), AssemblyError> {
        let fail = |m: &str| Err(AssemblyError::Invalid(m.to_string()));
        if !self.unknowns().iter().chain([&self.r1]).all(|v| v.is_finite()) {
            return fail("all parameters must be finite");
        }
        if self.r1 < 0.0 || self.r2 < 0.0 {
            return fail("r1, r2 >= 0");
        }
        if self.Q0 <= 0.0 || self.R1 <= 0.0 || self.R2 <= 0.0 {
            return fail("Q0, R1, R2 > 0");
        }
        if self.r1 >= self.R1 {
            return fail("r1 < R1");
        }
        if self.r2 >= self.R2 {
            return fail("r2 < R2");
        }
        if u.q >= self.Q0 || n.q >= self.Q0 {
            return fail("tube heights < Q0");
        }
        if self.m_u < 1 || self.m_n < 1 {
            return fail("m_u, m_n >= 1");
        }
        Ok(())
    }

    fn is_degenerate(&self, u: &DelaunayParams, n: &DelaunayParams) -> bool {
        [self.r1, self.r2, u.q, u.s, n.q, n.s].contains(&0.0)
    }
}

fn class(name: &str) -> Option<SymmetryClass> {
    Some(SymmetryClass::new(name))
}

fn vertex_prism_spec(p: &AssemblyParams, center: Vec3, rotation: i32) -> PrismSpec {
    PrismSpec {
        center,
        rotation,
        lateral: p.lateral_offsets(),
        half_height: 0.5 * p.Q0,
        orientation: Orientation::Positive,
        lateral_classes: ["vertex.S", "vertex.S", "vertex.R1", "vertex.R2", "vertex.R1", "vertex.S"].map(class),
        top_class: class("vertex.Q0"),
        bottom_class: class("vertex.Q0"),
    }
}

fn chain_prism_spec(c: &DelaunayParams, center: Vec3, rotation: i32) -> PrismSpec {
    let prefix = c.kind.name();
    let name = |n: &str| class(&format!("{prefix}.{n}"));
    let (a, b) = (c.apothem_r(), c.apothem_s());
    PrismSpec {
        center,
        rotation,
        lateral: [a, b, b, a, b, b],
        half_height: 0.5 * c.Q,
        orientation: Orientation::Positive,
        lateral_classes: ["R", "S", "S", "R", "S", "S"].map(name),
        top_class: name("Q"),
        bottom_class: name("Q"),
    }
}

/// A tube from `face_a` (facing `+axis`) to `face_b` (facing `-axis`).
/// `t_a` and `t_b` are the plane positions along the axis line through
/// `origin`. Unduloid tubes run forward (`t_b > t_a`), nodoid tubes backward.
struct Link {
    chain: DelaunayParams,
    axis: i32,
    origin: Vec3,
    t_a: f64,
    t_b: f64,
    classes: bool,
    component: usize,
}

fn add_link(b: &mut SurfaceBuilder, link: &Link, face_a: usize, face_b: usize, cap_b: bool) {
    let c = &link.chain;
    let dir = FacetDir::lateral(link.axis).normal();
    let (plus, minus, orientation) = match c.kind {
        DelaunayKind::Unduloid => (face_b, face_a, Orientation::Positive),
        DelaunayKind::Nodoid => (face_a, face_b, Orientation::Negative),
    };
    let prefix = c.kind.name();
    let name = |n: &str| if link.classes { class(&format!("{prefix}.{n}")) } else { None };
    let spec = TubeSpec {
        center: link.origin + dir * (0.5 * (link.t_a + link.t_b)),
        axis: link.axis,
        wall_offset: 0.25 * SQRT3 * (c.r + c.s),
        half_height: 0.5 * c.q,
        orientation,
        wall_class: name("s"),
        cap_class: name("q"),
        plus,
        minus,
    };
    let t = add_tube(b, &spec, FaceRole::Surface, link.component);
    tube_loops(b, &t);
    let end = |f: usize| if f == plus { TubeEnd::Plus } else { TubeEnd::Minus };
    tube_rim(b, &t, end(face_a), face_a, true);
    tube_rim(b, &t, end(face_b), face_b, !cap_b);
}

/// One vertex prism at the origin with its three tubes, each closed by a cap
/// on the plane of the neighbouring chain prism.
pub fn vertex_cell(
    p: &AssemblyParams,
    unduloid: &DelaunayParams,
    nodoid: &DelaunayParams,
) -> Result<RealizedSurface, AssemblyError> {
    p.validate(unduloid, nodoid)?;
    let mut b = SurfaceBuilder::new();
    let comp = b.component("vertex");
    let prism = add_prism(&mut b, &vertex_prism_spec(p, Vec3::ZERO, 0), comp);
    let (w, u) = (p.offset_r1(), p.offset_r2());
    let tube_u = SQRT3 * unduloid.s;
    let tube_n = SQRT3 * nodoid.s;
    let links = [(2, unduloid, w, w + tube_u), (4, unduloid, w, w + tube_u), (3, nodoid, u, u - tube_n)];
    for (k, chain, t_a, t_b) in links {
        let facet = FacetDir::lateral(k + 3);
        let cap = b.face(facet, -t_b, Orientation::Negative, None, FaceRole::Cap, comp);
        let link = Link { chain: *chain, axis: k, origin: Vec3::ZERO, t_a, t_b, classes: false, component: comp };
        add_link(&mut b, &link, prism.lateral[k as usize], cap, true);
    }
    let topo = b.finish(None, p.is_degenerate(unduloid, nodoid));
    Ok(realize(&topo)?)
}

/// `dE - 2dV` for the vertex top/bottom, R1, R2 and S classes.
pub fn residual4_with(
    p: &AssemblyParams,
    unduloid: &DelaunayParams,
    nodoid: &DelaunayParams,
) -> Result<[f64; 4], AssemblyError> {
    let cell = vertex_cell(p, unduloid, nodoid)?;
    let mut out = [0.0; 4];
    for (slot, name) in VERTEX_CLASSES.iter().enumerate() {
        let (de, dv) = cell.face_translation_derivative(&SymmetryClass::new(*name))?;
        out[slot] = de - LAGRANGE * dv;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyConfig {
    pub r1_min: f64,
    pub r1_max: f64,
    pub r1_step: f64,
    pub newton: NewtonConfig,
    /// Tolerance for the nodoid solves nested in the residual.
    pub inner: NewtonConfig,
    pub chain: SolveConfig,
}

impl Default for AssemblyConfig {
    fn default() -> Self {
        Self {
            r1_min: 1e-3,
            r1_max: 0.1,
            r1_step: 0.01,
            newton: NewtonConfig::default(),
            inner: NewtonConfig::inner(),
            chain: SolveConfig::default(),
        }
    }
}

/// Solves the chain at `r`, warm-started from `guess` when possible.
fn chain_at(kind: DelaunayKind, r: f64, guess: Option<&DelaunayParams>, cfg: &AssemblyConfig) -> Result<DelaunayParams, DelaunayError> {
    if r == 0.0 {
        return Ok(DelaunayParams::trivial(kind));
    }
    if let Some(g) = guess.filter(|g| g.r > 0.0) {
        if let Ok(s) = delaunay::solve_from(&DelaunayParams { r, ..*g }, &cfg.inner) {
            return Ok(s.params);
        }
    }
    let coarse = delaunay::solve(kind, r, None, &cfg.chain)?;
    Ok(delaunay::solve_from(&coarse.params, &cfg.inner)?.params)
}

/// Residual with the tube shapes taken from the chain solves at `r1` and `r2`.
pub fn residual4(p: &AssemblyParams) -> Result<[f64; 4], AssemblyError> {
    let cfg = AssemblyConfig::default();
    let u = chain_at(DelaunayKind::Unduloid, p.r1, None, &cfg)?;
    let n = chain_at(DelaunayKind::Nodoid, p.r2, None, &cfg)?;
    residual4_with(p, &u, &n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblySolution {
    pub params: AssemblyParams,
    pub unduloid: DelaunayParams,
    pub nodoid: DelaunayParams,
    pub residual_norm: f64,
}

impl AssemblySolution {
    /// Prism-center distance along a side: `m_u L_u - 2a_u + 2h_R1`.
    pub fn side_chord(&self) -> f64 {
        let u = &self.unduloid;
        self.params.m_u as f64 * u.period_length() - 2.0 * u.apothem_r() + 2.0 * self.params.offset_r1()
    }

    /// Prism-center distance along a diagonal: `m_n L_n - 2a_n + 2h_R2`.
    pub fn diagonal_chord(&self) -> f64 {
        let n = &self.nodoid;
        self.params.m_n as f64 * n.period_length() - 2.0 * n.apothem_r() + 2.0 * self.params.offset_r2()
    }

    /// Diagonal chord demanded by the sides minus the one the nodoids give.
    pub fn mismatch(&self) -> f64 {
        2.0 * self.side_chord() - self.diagonal_chord()
    }
}

fn newton_step(
    start: &AssemblyParams,
    unduloid: &DelaunayParams,
    nodoid: DelaunayParams,
    cfg: &AssemblyConfig,
) -> Result<AssemblySolution, AssemblyError> {
    let cache = RefCell::new(nodoid);
    let f = |x: &[f64]| {
        let p = start.with_unknowns(x);
        let warm = *cache.borrow();
        let n = chain_at(DelaunayKind::Nodoid, p.r2, Some(&warm), cfg).ok()?;
        *cache.borrow_mut() = n;
        residual4_with(&p, unduloid, &n).ok().map(|v| v.to_vec())
    };
    let out = newton::solve(f, &start.unknowns(), &cfg.newton)
        .map_err(|source| AssemblyError::Solver { r1: start.r1, source })?;
    let params = start.with_unknowns(&out.x);
    let nodoid = chain_at(DelaunayKind::Nodoid, params.r2, Some(&cache.borrow()), cfg)?;
    let residual_norm = newton::max_norm(&residual4_with(&params, unduloid, &nodoid)?);
    Ok(AssemblySolution { params, unduloid: *unduloid, nodoid, residual_norm })
}

/// Newton on `(Q0, R1, R2, r2)` at fixed `r1`, starting from `guess`.
pub fn solve_assembly_from(r1: f64, guess: &AssemblySolution, cfg: &AssemblyConfig) -> Result<AssemblySolution, AssemblyError> {
    let unduloid = chain_at(DelaunayKind::Unduloid, r1, Some(&guess.unduloid), cfg)?;
    let start = AssemblyParams { r1, ..guess.params };
    newton_step(&start, &unduloid, guess.nodoid, cfg)
}

/// Continuation from the trivial root up to `r1`.
pub fn solve_assembly(r1: f64, m_u: usize, m_n: usize, cfg: &AssemblyConfig) -> Result<AssemblySolution, AssemblyError> {
    let trivial = AssemblyParams::trivial(m_u, m_n);
    if r1 == 0.0 {
        return Ok(AssemblySolution {
            params: trivial,
            unduloid: DelaunayParams::trivial(DelaunayKind::Unduloid),
            nodoid: DelaunayParams::trivial(DelaunayKind::Nodoid),
            residual_norm: 0.0,
        });
    }
    if !(r1 > 0.0 && r1 <= cfg.r1_max) {
        return Err(AssemblyError::OutOfRange { r1, r1_max: cfg.r1_max });
    }
    let r_start = cfg.r1_min.min(r1);
    let unduloid = chain_at(DelaunayKind::Unduloid, r_start, None, cfg)?;
    let nodoid = chain_at(DelaunayKind::Nodoid, r_start, None, cfg)?;
    let seed = AssemblyParams { r1: r_start, r2: r_start, ..trivial };
    let mut current = newton_step(&seed, &unduloid, nodoid, cfg)?;
    while current.params.r1 < r1 {
        let next = (current.params.r1 + cfg.r1_step).min(r1);
        current = solve_assembly_from(next, &current, cfg)?;
    }
    Ok(current)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureFit {
    pub solution: AssemblySolution,
    pub mismatch: f64,
    pub iterations: usize,
}

pub const FIT_TOL: f64 = 1e-11;

/// Bisects on `r1 ∈ (0, r1_max]` for zero length mismatch between the sides
/// and the diagonals. `m_n` defaults to `2m_u + 1`.
pub fn fit_closure(m_u: usize, m_n: Option<usize>, cfg: &AssemblyConfig) -> Result<ClosureFit, AssemblyError> {
    let m_n = m_n.unwrap_or(2 * m_u + 1);
    let lo_sol = solve_assembly(0.0, m_u, m_n, cfg)?;
    let hi_sol = solve_assembly(cfg.r1_max, m_u, m_n, cfg)?;
    let (mut lo, mut hi) = ((0.0, lo_sol), (cfg.r1_max, hi_sol));
    let (f_lo, f_hi) = (lo.1.mismatch(), hi.1.mismatch());
    if f_lo == 0.0 {
        return Ok(ClosureFit { solution: lo.1, mismatch: 0.0, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(AssemblyError::NoBracket { lo: 0.0, hi: cfg.r1_max, lo_mismatch: f_lo, hi_mismatch: f_hi });
    }
    let mut best = if f_lo.abs() < f_hi.abs() { lo.1 } else { hi.1 };
    for iteration in 1..=200 {
        let mid = 0.5 * (lo.0 + hi.0);
        // warm start from the nearer solved end, avoiding the trivial one
        let guess = if lo.0 > 0.0 && mid - lo.0 <= hi.0 - mid { &lo.1 } else { &hi.1 };
        let sol = solve_assembly_from(mid, guess, cfg).or_else(|_| solve_assembly(mid, m_u, m_n, cfg))?;
        let f = sol.mismatch();
        if f.abs() < best.mismatch().abs() {
            best = sol;
        }
        if f.abs() < FIT_TOL {
            return Ok(ClosureFit { solution: sol, mismatch: f, iterations: iteration });
        }
        if f.signum() == f_lo.signum() {
            lo = (mid, sol);
        } else {
            hi = (mid, sol);
        }
        if hi.0 - lo.0 <= 4.0 * f64::EPSILON * hi.0 {
            break;
        }
    }
    let mismatch = best.mismatch();
    if mismatch.abs() < 1e-9 {
        return Ok(ClosureFit { solution: best, mismatch, iterations: 200 });
    }
    Err(AssemblyError::FitStalled { r1: best.params.r1, mismatch })
}

#[derive(Debug, Clone)]
pub struct AssemblySurface {
    pub surface: RealizedSurface,
    pub fit: AssemblySolution,
    /// Distance from the center of the big hexagon to each vertex prism.
    pub circumradius: f64,
}

pub const UNFITTED_TOL: f64 = 1e-6;

/// Builds the whole closed immersed surface from closure-fitted parameters.
pub fn build_assembly(fit: &AssemblySolution) -> Result<AssemblySurface, AssemblyError> {
    let mismatch = fit.mismatch();
    if mismatch.is_nan() || mismatch.abs() > UNFITTED_TOL {
        return Err(AssemblyError::Unfitted(mismatch));
    }
    let p = &fit.params;
    let (und, nod) = (&fit.unduloid, &fit.nodoid);
    p.validate(und, nod)?;
    let d = fit.side_chord();
    let mut b = SurfaceBuilder::new();
    let prism_comp: Vec<usize> = (0..6).map(|j| b.component(format!("prism{j}"))).collect();
    let side_comp: Vec<usize> = (0..6).map(|j| b.component(format!("unduloid{j}"))).collect();
    let diag_comp: Vec<usize> = (0..3).map(|j| b.component(format!("nodoid{j}"))).collect();
    let centers: Vec<Vec3> = (0..6).map(|j| FacetDir::lateral(j).normal() * d).collect();
    let vertex: Vec<PrismFaces> = (0..6)
        .map(|j| add_prism(&mut b, &vertex_prism_spec(p, centers[j], j as i32), prism_comp[j]))
        .collect();

    // Sides: vertex j, local face 2, to vertex j + 1, local face 4.
    let (w, a_u) = (p.offset_r1(), und.apothem_r());
    for j in 0..6 {
        let axis = j as i32 + 2;
        let dir = FacetDir::lateral(axis).normal();
        let origin = centers[j];
        let mut near = (vertex[j].lateral[2], w);
        for i in 0..p.m_u.saturating_sub(1) {
            let t = w + SQRT3 * und.s + a_u + i as f64 * und.period_length();
            let prism = add_prism(&mut b, &chain_prism_spec(und, origin + dir * t, axis), side_comp[j]);
            let link = Link { chain: *und, axis, origin, t_a: near.1, t_b: t - a_u, classes: true, component: side_comp[j] };
            add_link(&mut b, &link, near.0, prism.lateral[3], false);
            near = (prism.lateral[0], t + a_u);
        }
        let link = Link { chain: *und, axis, origin, t_a: near.1, t_b: d - w, classes: true, component: side_comp[j] };
        add_link(&mut b, &link, near.0, vertex[(j + 1) % 6].lateral[4], false);
    }

    // Diagonals: vertex j, local face 3, through the center to vertex j + 3.
    let (u, a_n, len_n) = (p.offset_r2(), nod.apothem_r(), nod.period_length());
    for j in 0..3 {
        let axis = j as i32 + 3;
        let dir = FacetDir::lateral(axis).normal();
        let origin = Vec3::ZERO;
        let mut near = (vertex[j].lateral[3], u - d);
        for i in 0..p.m_n.saturating_sub(1) {
            let t = (i as f64 - 0.5 * (p.m_n as f64 - 2.0)) * len_n;
            let prism = add_prism(&mut b, &chain_prism_spec(nod, dir * t, axis), diag_comp[j]);
            let link = Link { chain: *nod, axis, origin, t_a: near.1, t_b: t - a_n, classes: true, component: diag_comp[j] };
            add_link(&mut b, &link, near.0, prism.lateral[3], false);
            near = (prism.lateral[0], t + a_n);
        }
        let link = Link { chain: *nod, axis, origin, t_a: near.1, t_b: d - u, classes: true, component: diag_comp[j] };
        add_link(&mut b, &link, near.0, vertex[j + 3].lateral[3], false);
    }

    let topo = b.finish(None, p.is_degenerate(und, nod));
    Ok(AssemblySurface { surface: realize(&topo)?, fit: *fit, circumradius: d })
}

impl AssemblySurface {
    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.surface.topology.components.iter().position(|c| c == name)
    }

    /// Whether some edge of component `a` properly crosses a face of `b`.
    pub fn components_intersect(&self, a: usize, b: usize) -> bool {
        let s = &self.surface;
        let faces_b: Vec<usize> = s.component_faces(b).collect();
        s.component_faces(a).any(|fa| {
            s.topology.faces[fa].loops.iter().any(|lp| {
                (0..lp.len()).any(|i| {
                    let (p, q) = (s.positions[lp[i]], s.positions[lp[(i + 1) % lp.len()]]);
                    faces_b.iter().any(|&fb| segment_crosses_face(s, fb, p, q))
                })
            })
        })
    }

    /// Largest distance from a mapped vertex to the nearest vertex.
    pub fn symmetry_defect(&self, map: impl Fn(Vec3) -> Vec3) -> f64 {
        let pts = &self.surface.positions;
        pts.iter()
            .map(|&p| {
                let m = map(p);
                pts.iter().map(|&o| (m - o).norm()).fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }
}

fn segment_crosses_face(s: &RealizedSurface, face: usize, p: Vec3, q: Vec3) -> bool {
    const TOL: f64 = 1e-12;
    let f = &s.topology.faces[face];
    let n = f.normal();
    let (dp, dq) = (p.dot(n) - f.offset, q.dot(n) - f.offset);
    if !((dp > TOL && dq < -TOL) || (dp < -TOL && dq > TOL)) {
        return false;
    }
    let x = p + (q - p) * (dp / (dp - dq));
    let helper = if n.z.abs() < 0.9 { Vec3::Z } else { Vec3::X };
    let e1 = helper.cross(n).normalized();
    let e2 = n.cross(e1);
    let (x0, y0) = (x.dot(e1), x.dot(e2));
    // even-odd rule over the boundary and its holes
    let mut inside = false;
    for lp in &f.loops {
        for i in 0..lp.len() {
            let (a, c) = (s.positions[lp[i]], s.positions[lp[(i + 1) % lp.len()]]);
            let (ax, ay, cx, cy) = (a.dot(e1), a.dot(e2), c.dot(e1), c.dot(e2));
            if (ay > y0) != (cy > y0) && x0 < ax + (y0 - ay) * (cx - ax) / (cy - ay) {
                inside = !inside;
            }
        }
    }
    inside
}
