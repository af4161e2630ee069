//! Constrained Delaunay meshing with Ruppert refinement (backed by `spade`),
//! and the per-shape mesh family obtained by pushing a baseline mesh forward
//! through the shape transform.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use super::{signed_area, BoundaryEdge, Mesh, MeshError, Region};
use crate::geometry::{
    boundary_geometry, point_segment_distance, realize_shape, segments_cross, BoundaryGeometry,
    Disc, Rect, Shape, ShapeSpaceConfig,
};
use crate::{BoundaryTag, Vec2};

/// Curve carrying a boundary segment; Steiner points inserted on the segment
/// are projected back onto it.
#[derive(Clone, Copy)]
pub enum Curve<'a> {
    Straight,
    Circle {
        center: Vec2,
        radius: f64,
    },
    /// Star-shaped outline `center + r(theta) (cos theta, sin theta)`.
    Polar {
        center: Vec2,
        radius: &'a (dyn Fn(f64) -> f64 + Sync),
    },
}

impl std::fmt::Debug for Curve<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Curve::Straight => f.write_str("Straight"),
            Curve::Circle { center, radius } => write!(f, "Circle({center:?}, {radius})"),
            Curve::Polar { center, .. } => write!(f, "Polar({center:?})"),
        }
    }
}

impl Curve<'_> {
    fn project(&self, p: Vec2) -> Vec2 {
        match *self {
            Curve::Straight => p,
            Curve::Circle { center, radius } => {
                let d = p - center;
                center + d * (radius / d.norm())
            }
            Curve::Polar { center, radius } => {
                let d = p - center;
                let th = d.y.atan2(d.x);
                center + radius(th) * Vec2::new(th.cos(), th.sin())
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: usize,
    b: usize,
    tag: BoundaryTag,
    curve: usize,
}

/// Planar straight-line graph made of closed loops. The first loop bounds the
/// region, later loops are holes.
#[derive(Debug, Default)]
pub struct Pslg<'a> {
    points: Vec<Vec2>,
    segments: Vec<Segment>,
    loops: Vec<(usize, usize)>,
    curves: Vec<Curve<'a>>,
}

impl<'a> Pslg<'a> {
    pub fn new() -> Self {
        Self {
            curves: vec![Curve::Straight],
            ..Default::default()
        }
    }

    pub fn add_curve(&mut self, curve: Curve<'a>) -> usize {
        self.curves.push(curve);
        self.curves.len() - 1
    }

    /// Adds a closed loop; entry `i` gives vertex `i` together with the tag and
    /// curve of the segment from vertex `i` to vertex `i + 1`.
    pub fn add_loop(&mut self, vertices: &[(Vec2, BoundaryTag, usize)]) {
        let start = self.points.len();
        let n = vertices.len();
        for (i, &(p, tag, curve)) in vertices.iter().enumerate() {
            self.points.push(p);
            self.segments.push(Segment {
                a: start + i,
                b: start + (i + 1) % n,
                tag,
                curve,
            });
        }
        self.loops.push((start, n));
    }

    /// Splits every segment longer than `max_len` into equal pieces projected
    /// onto its curve.
    fn subdivided(&self, max_len: f64) -> Pslg<'a> {
        let mut out = Pslg {
            curves: self.curves.clone(),
            ..Default::default()
        };
        for &(start, n) in &self.loops {
            let mut verts = Vec::new();
            for s in &self.segments[start..start + n] {
                let (a, b) = (self.points[s.a], self.points[s.b]);
                let pieces = ((b - a).norm() / max_len).ceil().max(1.0) as usize;
                verts.push((a, s.tag, s.curve));
                for k in 1..pieces {
                    let p = a + (b - a) * (k as f64 / pieces as f64);
                    verts.push((self.curves[s.curve].project(p), s.tag, s.curve));
                }
            }
            out.add_loop(&verts);
        }
        out
    }

    fn check_simple(&self) -> Result<(), MeshError> {
        let n = self.segments.len();
        let scale = self
            .points
            .iter()
            .fold(0.0_f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
            .max(1.0);
        if self
            .points
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(MeshError::MeshFailure("non-finite boundary point".into()));
        }
        // sort-and-sweep for coincident points
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| self.points[a].x.total_cmp(&self.points[b].x));
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[i + 1..] {
                if self.points[b].x - self.points[a].x > 1e-12 * scale {
                    break;
                }
                if (self.points[b] - self.points[a]).norm() <= 1e-12 * scale {
                    return Err(MeshError::MeshFailure("boundary points coincide".into()));
                }
            }
        }
        let bbox: Vec<(f64, f64, f64, f64)> = self
            .segments
            .iter()
            .map(|s| {
                let (a, b) = (self.points[s.a], self.points[s.b]);
                (a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y))
            })
            .collect();
        for i in 0..n {
            let si = self.segments[i];
            for j in i + 1..n {
                let sj = self.segments[j];
                if si.a == sj.a || si.a == sj.b || si.b == sj.a || si.b == sj.b {
                    continue;
                }
                let (bi, bj) = (bbox[i], bbox[j]);
                if bi.1 < bj.0 || bj.1 < bi.0 || bi.3 < bj.2 || bj.3 < bi.2 {
                    continue;
                }
                if segments_cross(
                    self.points[si.a],
                    self.points[si.b],
                    self.points[sj.a],
                    self.points[sj.b],
                ) {
                    return Err(MeshError::MeshFailure(
                        "boundary loops intersect (geometry too thin or overlapping)".into(),
                    ));
                }
            }
        }
        // holes must sit inside the outer loop
        if let Some(&(outer_start, outer_n)) = self.loops.first() {
            let outer: Vec<Vec2> = (0..outer_n).map(|i| self.points[outer_start + i]).collect();
            for &(start, _) in &self.loops[1..] {
                if !point_in_polygon(self.points[start], &outer) {
                    return Err(MeshError::MeshFailure(
                        "hole lies outside the region".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn point_in_polygon(p: Vec2, poly: &[Vec2]) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Meshing knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshOptions {
    /// Round the four shroud corners with arcs of radius `2h`.
    pub round_corners: bool,
    /// Minimum angle requested from the refinement, degrees.
    pub min_angle_deg: f64,
    /// Fraction of `h` the generated `h_max` must stay below.
    pub size_safety: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            round_corners: true,
            min_angle_deg: 25.0,
            size_safety: 1.0,
        }
    }
}

const MAX_SIZE_ATTEMPTS: usize = 10;

/// Triangulates the region bounded by `pslg` with element diameter at most
/// `h * options.size_safety`.
pub fn triangulate(
    pslg: &Pslg,
    h: f64,
    region: Region,
    options: &MeshOptions,
) -> Result<Mesh, MeshError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(MeshError::MeshFailure(format!(
            "mesh size must be positive, got {h}"
        )));
    }
    if pslg.loops.is_empty() {
        return Err(MeshError::MeshFailure("no boundary loops".into()));
    }
    let target = h * options.size_safety;
    let pslg = pslg.subdivided(0.8 * target);
    pslg.check_simple()?;
    let mut area = 0.35 * target * target;
    let mut last_h = f64::NAN;
    for _ in 0..MAX_SIZE_ATTEMPTS {
        let mesh = triangulate_once(&pslg, area, region, options.min_angle_deg)?;
        if mesh.h_max <= target {
            return Ok(mesh);
        }
        last_h = mesh.h_max;
        area *= 0.6;
    }
    Err(MeshError::MeshFailure(format!(
        "could not reach element size {target} (last h_max {last_h})"
    )))
}

fn triangulate_once(
    pslg: &Pslg,
    max_area: f64,
    region: Region,
    min_angle: f64,
) -> Result<Mesh, MeshError> {
    let fail = |m: &str| MeshError::MeshFailure(m.to_string());
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let mut handles = Vec::with_capacity(pslg.points.len());
    for p in &pslg.points {
        handles.push(
            cdt.insert(Point2::new(p.x, p.y))
                .map_err(|e| MeshError::MeshFailure(format!("vertex insertion failed: {e:?}")))?,
        );
    }
    if cdt.num_vertices() != pslg.points.len() {
        return Err(fail("boundary points were merged during insertion"));
    }
    for s in &pslg.segments {
        if cdt
            .try_add_constraint(handles[s.a], handles[s.b])
            .is_empty()
        {
            return Err(fail("boundary segment conflicts with another segment"));
        }
    }
    let n_input = pslg.points.len();
    let budget = 200 * n_input + (4.0 * bbox_area(&pslg.points) / max_area) as usize;
    let result = cdt.refine(
        RefinementParameters::new()
            .exclude_outer_faces(true)
            .with_angle_limit(AngleLimit::from_deg(min_angle))
            .with_max_allowed_area(max_area)
            .with_max_additional_vertices(budget),
    );
    if !result.refinement_complete {
        return Err(fail("refinement did not complete"));
    }
    let excluded: HashSet<_> = result.excluded_faces.iter().copied().collect();

    let raw: Vec<Vec2> = cdt
        .vertices()
        .map(|v| Vec2::new(v.position().x, v.position().y))
        .collect();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let v = face.vertices();
        triangles.push([v[0].fix().index(), v[1].fix().index(), v[2].fix().index()]);
    }
    if triangles.is_empty() {
        return Err(fail("triangulation has no interior faces"));
    }

    // boundary edges are those used by exactly one kept triangle
    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for t in &triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_default() += 1;
        }
    }
    let mut boundary: Vec<(usize, usize)> = count
        .iter()
        .filter(|(_, &c)| c == 1)
        .map(|(&k, _)| k)
        .collect();
    boundary.sort_unstable();

    let nearest_segment = |p: Vec2| -> (usize, f64) {
        pslg.segments
            .iter()
            .enumerate()
            .map(|(i, s)| {
                (
                    i,
                    point_segment_distance(p, pslg.points[s.a], pslg.points[s.b]),
                )
            })
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("PSLG has segments")
    };
    let scale = (max_area).sqrt();
    let mut tagged = Vec::with_capacity(boundary.len());
    let mut boundary_nodes = HashSet::new();
    for &(a, b) in &boundary {
        let (seg, dist) = nearest_segment(0.5 * (raw[a] + raw[b]));
        if dist > 1e-6 * scale {
            return Err(fail(
                "mesh boundary edge does not lie on the input boundary",
            ));
        }
        tagged.push((a, b, pslg.segments[seg].tag));
        boundary_nodes.insert(a);
        boundary_nodes.insert(b);
    }

    // project boundary Steiner points onto their curves
    let mut nodes = raw.clone();
    for &v in &boundary_nodes {
        if v >= n_input {
            let (seg, _) = nearest_segment(raw[v]);
            nodes[v] = pslg.curves[pslg.segments[seg].curve].project(raw[v]);
        }
    }

    // compact to nodes used by kept triangles, in spade order
    let mut remap = vec![usize::MAX; nodes.len()];
    let mut compact = Vec::new();
    for t in &triangles {
        for &v in t {
            if remap[v] == usize::MAX {
                remap[v] = 0;
            }
        }
    }
    for (i, r) in remap.iter_mut().enumerate() {
        if *r == 0 {
            *r = compact.len();
            compact.push(nodes[i]);
        }
    }
    let triangles: Vec<[usize; 3]> = triangles
        .iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();
    for t in &triangles {
        if signed_area(compact[t[0]], compact[t[1]], compact[t[2]]) <= 0.0 {
            return Err(fail("boundary projection inverted an element"));
        }
    }
    let edges = tagged
        .into_iter()
        .map(|(a, b, tag)| BoundaryEdge {
            nodes: [remap[a], remap[b]],
            tag,
        })
        .collect();
    Mesh::new(compact, triangles, edges, region)
}

fn bbox_area(points: &[Vec2]) -> f64 {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    (x1 - x0) * (y1 - y0)
}

/// Number of leading wetted segments of a boundary sampling; the wetted arc
/// runs from vertex 0 to vertex `k`.
fn wetted_span(boundary: &BoundaryGeometry) -> Result<usize, MeshError> {
    let k = boundary
        .segment_tags
        .iter()
        .take_while(|&&t| t == BoundaryTag::Component)
        .count();
    if k == 0 || boundary.segment_tags[k..].contains(&BoundaryTag::Component) {
        return Err(MeshError::MeshFailure(
            "wetted boundary must be one contiguous arc starting at vertex 0".into(),
        ));
    }
    Ok(k)
}

/// Quarter arc of radius `r` about `center` starting at angle `t0`; pushes the
/// exact start point and the interior arc points.
fn push_arc(
    out: &mut Vec<(Vec2, BoundaryTag, usize)>,
    center: Vec2,
    r: f64,
    t0: f64,
    start: Vec2,
    h: f64,
    curve: usize,
) {
    let n = ((FRAC_PI_2 * r) / (0.8 * h)).ceil().max(2.0) as usize;
    out.push((start, BoundaryTag::Wall, curve));
    for k in 1..n {
        let t = t0 + FRAC_PI_2 * k as f64 / n as f64;
        out.push((
            center + r * Vec2::new(t.cos(), t.sin()),
            BoundaryTag::Wall,
            curve,
        ));
    }
}

/// Fluid region `D \ Omega` for a sampled component outline whose wetted arc
/// meets the lower shroud wall at vertices `0` and `k`. The flow enters
/// through the left side of the shroud and leaves through the right side.
pub fn mesh_fluid_region(
    boundary: &BoundaryGeometry,
    component: Curve,
    shroud: Rect,
    h: f64,
    options: &MeshOptions,
) -> Result<Mesh, MeshError> {
    let k = wetted_span(boundary)?;
    let (pa, pb) = (boundary.vertices[0], boundary.vertices[k]);
    if !(pb.x < pa.x) {
        return Err(MeshError::MeshFailure(
            "wetted arc must run from the downstream to the upstream wall crossing".into(),
        ));
    }
    let (x0, x1, y0, y1) = (shroud.x_min, shroud.x_max, shroud.y_min, shroud.y_max);
    let r = if options.round_corners { 2.0 * h } else { 0.0 };
    if pb.x - x0 <= r + 0.5 * h || x1 - pa.x <= r + 0.5 * h || y1 - y0 <= 2.0 * r + h {
        return Err(MeshError::MeshFailure(
            "component too close to the shroud ends for this mesh size".into(),
        ));
    }
    let mut pslg = Pslg::new();
    let comp = pslg.add_curve(component);
    let mut v = Vec::new();
    v.push((Vec2::new(x0 + r, y0), BoundaryTag::Wall, 0));
    for i in (1..=k).rev() {
        v.push((boundary.vertices[i], BoundaryTag::Component, comp));
    }
    v.push((pa, BoundaryTag::Wall, 0));
    if options.round_corners {
        let corners = [
            (
                Vec2::new(x1 - r, y0 + r),
                -FRAC_PI_2,
                Vec2::new(x1 - r, y0),
                Vec2::new(x1, y0 + r),
                BoundaryTag::Outlet,
            ),
            (
                Vec2::new(x1 - r, y1 - r),
                0.0,
                Vec2::new(x1, y1 - r),
                Vec2::new(x1 - r, y1),
                BoundaryTag::Wall,
            ),
            (
                Vec2::new(x0 + r, y1 - r),
                FRAC_PI_2,
                Vec2::new(x0 + r, y1),
                Vec2::new(x0, y1 - r),
                BoundaryTag::Inlet,
            ),
            (
                Vec2::new(x0 + r, y0 + r),
                PI,
                Vec2::new(x0, y0 + r),
                Vec2::new(x0 + r, y0),
                BoundaryTag::Wall,
            ),
        ];
        for (i, &(center, t0, start, end, next_tag)) in corners.iter().enumerate() {
            let arc = pslg.add_curve(Curve::Circle { center, radius: r });
            push_arc(&mut v, center, r, t0, start, h, arc);
            // the last arc closes onto the loop's first vertex
            if i + 1 < corners.len() {
                v.push((end, next_tag, 0));
            }
        }
    } else {
        v.push((Vec2::new(x1, y0), BoundaryTag::Outlet, 0));
        v.push((Vec2::new(x1, y1), BoundaryTag::Wall, 0));
        v.push((Vec2::new(x0, y1), BoundaryTag::Inlet, 0));
    }
    pslg.add_loop(&v);
    triangulate(&pslg, h, Region::Fluid, options)
}

/// Solid region `Omega \ B` for a sampled outline and the clamp disc.
pub fn mesh_solid_region(
    boundary: &BoundaryGeometry,
    component: Curve,
    clamp: Disc,
    h: f64,
    options: &MeshOptions,
) -> Result<Mesh, MeshError> {
    if !(clamp.radius > 0.0) {
        return Err(MeshError::MeshFailure(
            "clamp radius must be positive".into(),
        ));
    }
    let n_b = boundary.vertices.len();
    let gap = (0..n_b)
        .map(|i| {
            let (a, b) = boundary.segment(i);
            let ab = b - a;
            let t = ((clamp.center - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
            (clamp.center - (a + t * ab)).norm()
        })
        .fold(f64::INFINITY, f64::min);
    // even-odd rule for the center
    let mut inside = false;
    for i in 0..n_b {
        let (a, b) = boundary.segment(i);
        if (a.y > clamp.center.y) != (b.y > clamp.center.y)
            && clamp.center.x < a.x + (clamp.center.y - a.y) / (b.y - a.y) * (b.x - a.x)
        {
            inside = !inside;
        }
    }
    if !inside || gap <= clamp.radius {
        return Err(MeshError::MeshFailure(
            "clamp disc is not strictly inside the component outline".into(),
        ));
    }
    let mut pslg = Pslg::new();
    let comp = pslg.add_curve(component);
    let circle = pslg.add_curve(Curve::Circle {
        center: clamp.center,
        radius: clamp.radius,
    });
    let outer: Vec<_> = boundary
        .vertices
        .iter()
        .zip(&boundary.segment_tags)
        .map(|(&p, &t)| (p, t, comp))
        .collect();
    pslg.add_loop(&outer);
    let n = ((TAU * clamp.radius) / (0.8 * h)).ceil().max(12.0) as usize;
    let hole: Vec<_> = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            (
                clamp.center + clamp.radius * Vec2::new(t.cos(), t.sin()),
                BoundaryTag::Clamp,
                circle,
            )
        })
        .collect();
    pslg.add_loop(&hole);
    triangulate(&pslg, h, Region::Solid, options)
}

fn shape_radius(shape: &Shape) -> impl Fn(f64) -> f64 + Sync + '_ {
    move |th| shape.radius(th)
}

/// Triangulation of the fluid region `D \ Omega` for one shape. Component
/// boundary nodes include every vertex of the shape's boundary sampling at
/// the resolution matching `h`.
pub fn mesh_fluid(shape: &Shape, h: f64) -> Result<Mesh, MeshError> {
    mesh_fluid_with(shape, h, &MeshOptions::default())
}

pub fn mesh_fluid_with(shape: &Shape, h: f64, options: &MeshOptions) -> Result<Mesh, MeshError> {
    check_size(h)?;
    let cfg = shape.config();
    let bg = boundary_geometry(shape, cfg.resolution_for_spacing(h))?;
    let radius = shape_radius(shape);
    let curve = Curve::Polar {
        center: cfg.center(),
        radius: &radius,
    };
    mesh_fluid_region(&bg, curve, cfg.shroud(), h, options)
}

/// Triangulation of the solid region `Omega \ B` for one shape, with the
/// clamp circle tagged `clamp`.
pub fn mesh_solid(shape: &Shape, h: f64) -> Result<Mesh, MeshError> {
    mesh_solid_with(shape, h, &MeshOptions::default())
}

pub fn mesh_solid_with(shape: &Shape, h: f64, options: &MeshOptions) -> Result<Mesh, MeshError> {
    check_size(h)?;
    let cfg = shape.config();
    let bg = boundary_geometry(shape, cfg.resolution_for_spacing(h))?;
    let radius = shape_radius(shape);
    let curve = Curve::Polar {
        center: cfg.center(),
        radius: &radius,
    };
    mesh_solid_region(&bg, curve, cfg.clamp(), h, options)
}

fn check_size(h: f64) -> Result<(), MeshError> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(MeshError::MeshFailure(format!(
            "mesh size must be positive, got {h}"
        )))
    }
}

/// Where a mesh node sits relative to the component outline.
#[derive(Debug, Clone, Copy, PartialEq)]
enum NodeKind {
    Interior,
    /// On the outline at this polar angle.
    Outline(f64),
}

/// Baseline fluid and solid meshes of a shape space, reused for every shape
/// by pushing nodes through the shape transform `psi`. All shapes then share
/// one mesh topology, which keeps objective values continuous in the
/// coefficients. A shape whose pushed mesh violates the size or angle floor
/// is meshed from scratch instead.
#[derive(Debug, Clone)]
pub struct MeshFamily {
    config: Arc<ShapeSpaceConfig>,
    h: f64,
    options: MeshOptions,
    resolution: usize,
    fluid: Mesh,
    solid: Mesh,
    fluid_kind: Vec<NodeKind>,
    solid_kind: Vec<NodeKind>,
}

/// Minimum angle accepted for a pushed-forward mesh, degrees.
pub const MIN_ANGLE_FLOOR: f64 = 20.0;

impl MeshFamily {
    pub fn new(
        config: &Arc<ShapeSpaceConfig>,
        h: f64,
        options: MeshOptions,
    ) -> Result<Self, MeshError> {
        check_size(h)?;
        let baseline = realize_shape(config, &vec![0.0; config.n_modes()])?;
        // leave room for the stretching caused by admissible deformations
        let base_options = MeshOptions {
            size_safety: 0.85 * options.size_safety,
            ..options
        };
        let fluid = mesh_fluid_with(&baseline, h, &base_options)?;
        let solid = mesh_solid_with(&baseline, h, &base_options)?;
        let resolution = config.resolution_for_spacing(h);
        let bg = boundary_geometry(&baseline, resolution)?;
        let exact: HashMap<(u64, u64), f64> = bg
            .vertices
            .iter()
            .zip(&bg.angles)
            .map(|(p, &a)| ((p.x.to_bits(), p.y.to_bits()), a))
            .collect();
        let classify = |mesh: &Mesh| -> Vec<NodeKind> {
            let mut kind = vec![NodeKind::Interior; mesh.n_nodes()];
            let c = config.center();
            for e in &mesh.boundary_edges {
                if matches!(e.tag, BoundaryTag::Component | BoundaryTag::Root) {
                    for &v in &e.nodes {
                        let p = mesh.nodes[v];
                        let angle = exact
                            .get(&(p.x.to_bits(), p.y.to_bits()))
                            .copied()
                            .unwrap_or_else(|| (p.y - c.y).atan2(p.x - c.x));
                        kind[v] = NodeKind::Outline(angle);
                    }
                }
            }
            kind
        };
        let fluid_kind = classify(&fluid);
        let solid_kind = classify(&solid);
        Ok(Self {
            config: Arc::clone(config),
            h,
            options,
            resolution,
            fluid,
            solid,
            fluid_kind,
            solid_kind,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Boundary sampling resolution shared by every mesh of the family.
    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn baseline_fluid(&self) -> &Mesh {
        &self.fluid
    }

    pub fn baseline_solid(&self) -> &Mesh {
        &self.solid
    }

    fn push(&self, mesh: &Mesh, kind: &[NodeKind], shape: &Shape) -> Option<Mesh> {
        let pushed = mesh
            .mapped(|i, p| match kind[i] {
                NodeKind::Outline(angle) => shape.boundary_point(angle),
                NodeKind::Interior => shape.transform(p),
            })
            .ok()?;
        (pushed.h_max <= self.h * self.options.size_safety
            && pushed.min_angle_deg() >= MIN_ANGLE_FLOOR)
            .then_some(pushed)
    }

    /// Fluid and solid meshes of `shape`.
    pub fn meshes_for(&self, shape: &Shape) -> Result<(Mesh, Mesh), MeshError> {
        if !Arc::ptr_eq(shape.config(), &self.config)
            && shape.config().as_ref() != self.config.as_ref()
        {
            return Err(MeshError::MeshFailure(
                "shape belongs to a different shape space".into(),
            ));
        }
        let fluid = match self.push(&self.fluid, &self.fluid_kind, shape) {
            Some(m) => m,
            None => mesh_fluid_with(shape, self.h, &self.options)?,
        };
        let solid = match self.push(&self.solid, &self.solid_kind, shape) {
            Some(m) => m,
            None => mesh_solid_with(shape, self.h, &self.options)?,
        };
        Ok((fluid, solid))
    }
}
