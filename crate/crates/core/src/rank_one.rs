//! Compact symmetric spaces of rank one: round spheres, the projective
//! spaces over R, C, H, and the Cayley plane F II.
//!
//! Only the sphere carries a geodesic engine here. Real projective spaces
//! reuse it through the double cover (see [`crate::coverings`]); the others
//! are classified from the coincidence of the two points.

use std::f64::consts::PI;

use crate::blocking::{BlockingSet, Certificate, Provenance, SpacePoint};
use crate::coverings::{ProjectiveCover, ProjectiveFamily, ProjectivePoint};
use crate::error::{Error, Result};

/// Tolerance on unit norms and on point equality.
pub const POINT_TOL: f64 = 1e-9;
/// Minimum angular clearance of an escape arc from every obstacle.
pub const ESCAPE_MARGIN: f64 = 1e-6;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| alpha * a + b).collect()
}

fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

/// A unit vector of `R^{n+1}`, a point of `S^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint(Vec<f64>);

impl SpherePoint {
    /// Accepts vectors whose norm is within [`POINT_TOL`] of one.
    pub fn new(coordinates: Vec<f64>) -> Result<Self> {
        let n = norm(&coordinates);
        if !n.is_finite() || (n - 1.0).abs() > POINT_TOL || coordinates.len() < 2 {
            return Err(Error::NonUnit { norm: n });
        }
        Ok(Self(coordinates))
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalized(coordinates: Vec<f64>) -> Result<Self> {
        let n = norm(&coordinates);
        if !n.is_finite() || n < 1e-300 {
            return Err(Error::NonUnit { norm: n });
        }
        Self::new(scaled(1.0 / n, &coordinates))
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.0
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &SpherePoint) -> f64 {
        angle_between(&self.0, &other.0)
    }

    fn check_same_dim(&self, other: &SpherePoint) -> Result<()> {
        if self.0.len() != other.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                found: other.0.len(),
            });
        }
        Ok(())
    }
}

impl SpacePoint for SpherePoint {
    fn coincides(&self, other: &Self) -> bool {
        self.0.len() == other.0.len()
            && norm(&axpy(-1.0, &other.0, &self.0)) <= POINT_TOL
    }
}

/// Angle between two unit vectors, stable near 0 and π.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let diff = norm(&axpy(-1.0, b, a));
    let sum = norm(&axpy(1.0, b, a));
    2.0 * diff.atan2(sum)
}

pub fn antipode(x: &SpherePoint) -> SpherePoint {
    SpherePoint(scaled(-1.0, &x.0))
}

/// A unit-speed great-circle arc `s ↦ cos(s)·start + sin(s)·direction`,
/// `s ∈ [0, arclength]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreatArc {
    pub start: SpherePoint,
    pub end: SpherePoint,
    /// Orthonormal pair `(start, direction)` spanning the great circle.
    pub plane: (Vec<f64>, Vec<f64>),
    pub arclength: f64,
}

impl GreatArc {
    /// `direction` must be a unit vector orthogonal to `start`.
    pub fn new(start: &SpherePoint, direction: Vec<f64>, arclength: f64) -> Self {
        let end = point_on_circle(&start.0, &direction, arclength);
        Self {
            start: start.clone(),
            end: SpherePoint(end),
            plane: (start.0.clone(), direction),
            arclength,
        }
    }

    pub fn point_at(&self, s: f64) -> SpherePoint {
        SpherePoint(point_on_circle(&self.plane.0, &self.plane.1, s))
    }

    pub fn midpoint(&self) -> SpherePoint {
        self.point_at(self.arclength / 2.0)
    }

    /// Circle parameter of `p` in `[0, 2π)` when `p` lies on the circle.
    fn parameter_of(&self, p: &SpherePoint) -> Option<f64> {
        let (u, v) = &self.plane;
        let a = dot(&p.0, u);
        let b = dot(&p.0, v);
        let residual = norm(&axpy(-b, v, &axpy(-a, u, &p.0)));
        if residual > POINT_TOL {
            return None;
        }
        Some(b.atan2(a).rem_euclid(2.0 * PI))
    }

    /// Whether `p` lies in the open arc, within [`POINT_TOL`].
    pub fn passes_interior(&self, p: &SpherePoint) -> bool {
        match self.parameter_of(p) {
            Some(s) => {
                let s = if s > 2.0 * PI - POINT_TOL { s - 2.0 * PI } else { s };
                s > POINT_TOL && s < self.arclength - POINT_TOL
            }
            None => false,
        }
    }

    /// The same arc traversed from the other end.
    pub fn reversed(&self) -> GreatArc {
        let dir_at_end = {
            let (u, v) = &self.plane;
            let s = self.arclength;
            // tangent at the end, negated
            axpy(-s.cos(), v, &scaled(s.sin(), u))
        };
        GreatArc::new(&self.end, dir_at_end, self.arclength)
    }

    /// Image under `x ↦ -x`.
    pub fn antipodal_image(&self) -> GreatArc {
        GreatArc::new(&antipode(&self.start), scaled(-1.0, &self.plane.1), self.arclength)
    }

    /// Same geodesic segment as a point set with the same length, up to orientation.
    pub fn matches(&self, other: &GreatArc, tol: f64) -> bool {
        let same = |a: &GreatArc, b: &GreatArc| {
            (a.arclength - b.arclength).abs() <= tol
                && norm(&axpy(-1.0, &b.start.0, &a.start.0)) <= tol
                && norm(&axpy(-1.0, &b.end.0, &a.end.0)) <= tol
                && norm(&axpy(-1.0, &b.midpoint().0, &a.midpoint().0)) <= tol
        };
        same(self, other) || same(self, &other.reversed())
    }
}

fn point_on_circle(u: &[f64], v: &[f64], s: f64) -> Vec<f64> {
    axpy(s.sin(), v, &scaled(s.cos(), u))
}

/// Unit tangent at `x` pointing toward `y` (requires `y ≠ ±x`).
fn direction_toward(x: &[f64], y: &[f64]) -> Vec<f64> {
    let w = axpy(-dot(x, y), x, y);
    let n = norm(&w);
    scaled(1.0 / n, &w)
}

/// Description of the connecting geodesics between two sphere points.
#[derive(Clone, Debug, PartialEq)]
pub enum SphereArcs {
    /// `y ≠ ±x`: exactly the two arcs of the great circle through both.
    TwoArcs { short: GreatArc, long: GreatArc },
    /// `y = x`: every closed great circle through the point.
    PencilThrough(SpherePoint),
    /// `y = -x`: every half great circle from `x`.
    AntipodalPencil(SpherePoint),
}

pub fn sphere_arcs(x: &SpherePoint, y: &SpherePoint) -> Result<SphereArcs> {
    x.check_same_dim(y)?;
    if x.coincides(y) {
        return Ok(SphereArcs::PencilThrough(x.clone()));
    }
    if antipode(x).coincides(y) {
        return Ok(SphereArcs::AntipodalPencil(x.clone()));
    }
    let d = x.distance(y);
    let v = direction_toward(&x.0, &y.0);
    let short = GreatArc::new(x, v.clone(), d);
    let mut long = GreatArc::new(x, scaled(-1.0, &v), 2.0 * PI - d);
    long.end = y.clone();
    let mut short = short;
    short.end = y.clone();
    Ok(SphereArcs::TwoArcs { short, long })
}

/// A closed great circle through `x` in direction `w`, as a loop of length 2π.
pub fn closed_loop(x: &SpherePoint, w: Vec<f64>) -> GreatArc {
    let mut arc = GreatArc::new(x, w, 2.0 * PI);
    arc.end = x.clone();
    arc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankOneKind {
    Sphere,
    RealProjective,
    ComplexProjective,
    QuaternionicProjective,
    CayleyPlane,
}

/// A rank-one space with its dimension parameter `n` (for F II, `n = 16`
/// is the real dimension).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankOneSpace {
    kind: RankOneKind,
    n: usize,
}

impl RankOneSpace {
    pub fn new(kind: RankOneKind, n: usize) -> Result<Self> {
        if kind == RankOneKind::CayleyPlane {
            return Ok(Self { kind, n: 16 });
        }
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "rank-one spaces need n >= 2, got {n}"
            )));
        }
        Ok(Self { kind, n })
    }

    pub fn sphere(n: usize) -> Result<Self> {
        Self::new(RankOneKind::Sphere, n)
    }

    pub fn kind(&self) -> RankOneKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Points fixed by the whole isotropy group of a point: `{o, o'}` on
    /// spheres, `{o}` otherwise.
    pub fn center_size(&self) -> usize {
        match self.kind {
            RankOneKind::Sphere => 2,
            _ => 1,
        }
    }

    pub fn real_dimension(&self) -> usize {
        match self.kind {
            RankOneKind::Sphere | RankOneKind::RealProjective => self.n,
            RankOneKind::ComplexProjective => 2 * self.n,
            RankOneKind::QuaternionicProjective => 4 * self.n,
            RankOneKind::CayleyPlane => 16,
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            RankOneKind::Sphere => format!("S^{}", self.n),
            RankOneKind::RealProjective => format!("RP^{}", self.n),
            RankOneKind::ComplexProjective => format!("CP^{}", self.n),
            RankOneKind::QuaternionicProjective => format!("HP^{}", self.n),
            RankOneKind::CayleyPlane => "F II".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SecurityStatus {
    Secure,
    Insecure,
    Undetermined,
}

impl SecurityStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SecurityStatus::Secure => "secure",
            SecurityStatus::Insecure => "insecure",
            SecurityStatus::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictReason {
    Antipodal,
    SelfConfiguration,
    RegularPair,
    /// Decided from the known classification of the space, not constructed.
    ClassificationTable,
}

impl VerdictReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictReason::Antipodal => "antipodal",
            VerdictReason::SelfConfiguration => "self_configuration",
            VerdictReason::RegularPair => "regular_pair",
            VerdictReason::ClassificationTable => "classification_table",
        }
    }
}

/// A complete finite family of connecting geodesics and, for each, the
/// index of a blocking point on its interior.
#[derive(Clone, Debug)]
pub struct FiniteFamilyWitness {
    pub geodesics: Vec<GreatArc>,
    pub blockers: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SecurityVerdict<P> {
    pub status: SecurityStatus,
    pub reason: VerdictReason,
    pub blocking: Option<BlockingSet<P>>,
    pub witness: Option<FiniteFamilyWitness>,
    pub note: Option<String>,
}

impl<P> SecurityVerdict<P> {
    pub(crate) fn bare(status: SecurityStatus, reason: VerdictReason, note: Option<String>) -> Self {
        Self {
            status,
            reason,
            blocking: None,
            witness: None,
            note,
        }
    }
}

/// Certifies a sphere blocking set against the complete family of `{x, y}`.
///
/// Returns the set with a `Universal` certificate, or `None` when it fails
/// (always for antipodal pairs, whose family cannot be blocked).
pub fn certify_sphere_blocking(
    x: &SpherePoint,
    y: &SpherePoint,
    blocking: &BlockingSet<SpherePoint>,
) -> Result<Option<BlockingSet<SpherePoint>>> {
    let ok = match sphere_arcs(x, y)? {
        // every loop through x reaches -x at parameter π
        SphereArcs::PencilThrough(p) => blocking.contains(&antipode(&p)),
        SphereArcs::AntipodalPencil(_) => false,
        SphereArcs::TwoArcs { short, long } => [short, long]
            .iter()
            .all(|arc| blocking.points().iter().any(|p| arc.passes_interior(p))),
    };
    Ok(ok.then(|| blocking.clone().with_certificate(Certificate::Universal)))
}

fn check_model(space: &RankOneSpace, x: &SpherePoint, y: &SpherePoint) -> Result<()> {
    x.check_same_dim(y)?;
    if matches!(space.kind, RankOneKind::Sphere | RankOneKind::RealProjective)
        && x.ambient_dim() != space.n + 1
    {
        return Err(Error::DimensionMismatch {
            expected: space.n + 1,
            found: x.ambient_dim(),
        });
    }
    Ok(())
}

fn classify_sphere(x: &SpherePoint, y: &SpherePoint) -> Result<SecurityVerdict<SpherePoint>> {
    match sphere_arcs(x, y)? {
        SphereArcs::AntipodalPencil(_) => Ok(SecurityVerdict::bare(
            SecurityStatus::Insecure,
            VerdictReason::Antipodal,
            Some("every half great circle from x reaches -x; finitely many points leave one open".into()),
        )),
        SphereArcs::PencilThrough(p) => {
            let set = BlockingSet::new(vec![antipode(&p)], Provenance::CanonicalMidpoint);
            let set = certify_sphere_blocking(x, y, &set)?.expect("antipode blocks the pencil");
            Ok(SecurityVerdict {
                status: SecurityStatus::Secure,
                reason: VerdictReason::SelfConfiguration,
                blocking: Some(set),
                witness: None,
                note: None,
            })
        }
        SphereArcs::TwoArcs { short, long } => {
            let set = BlockingSet::new(
                vec![short.midpoint(), long.midpoint()],
                Provenance::CanonicalMidpoint,
            );
            let set = certify_sphere_blocking(x, y, &set)?.expect("midpoints block both arcs");
            Ok(SecurityVerdict {
                status: SecurityStatus::Secure,
                reason: VerdictReason::RegularPair,
                blocking: Some(set),
                witness: Some(FiniteFamilyWitness {
                    geodesics: vec![short, long],
                    blockers: vec![0, 1],
                }),
                note: None,
            })
        }
    }
}

fn classify_projective(
    space: &RankOneSpace,
    x: &SpherePoint,
    y: &SpherePoint,
) -> Result<SecurityVerdict<SpherePoint>> {
    let cover = ProjectiveCover::new(space.n)?;
    let (px, py) = (ProjectivePoint::new(x.clone()), ProjectivePoint::new(y.clone()));
    match cover.downstairs_family(&px, &py, None)? {
        ProjectiveFamily::Infinite => Ok(SecurityVerdict::bare(
            SecurityStatus::Insecure,
            VerdictReason::SelfConfiguration,
            Some("[x] = [y]: a continuum of closed geodesics with no common interior point".into()),
        )),
        ProjectiveFamily::Finite(arcs) => {
            let set = cover
                .certify_downstairs(&px, &py, &cover.blocking_from_fibers(&px, &py)?, None)?
                .expect("projected midpoints block the family");
            let set = set.map_points(|p| p.representative().clone());
            let blockers = arcs
                .iter()
                .map(|arc| {
                    set.points()
                        .iter()
                        .position(|p| arc.passes_interior(p) || arc.passes_interior(&antipode(p)))
                        .expect("projected midpoints block the family")
                })
                .collect();
            Ok(SecurityVerdict {
                status: SecurityStatus::Secure,
                reason: VerdictReason::RegularPair,
                blocking: Some(set),
                witness: Some(FiniteFamilyWitness {
                    geodesics: arcs,
                    blockers,
                }),
                note: Some("points are sphere representatives of projective classes".into()),
            })
        }
    }
}

/// Classifies `{x, y}`.
///
/// Spheres and real projective spaces use the unit-vector model (a
/// projective point is the class `{v, -v}`). For CP^n, HP^n and F II only
/// whether the two inputs coincide is used.
pub fn classify(
    space: &RankOneSpace,
    x: &SpherePoint,
    y: &SpherePoint,
) -> Result<SecurityVerdict<SpherePoint>> {
    check_model(space, x, y)?;
    match space.kind {
        RankOneKind::Sphere => classify_sphere(x, y),
        RankOneKind::RealProjective => classify_projective(space, x, y),
        _ => classify_by_coincidence(space, x.coincides(y)),
    }
}

/// Classification for spaces with trivial center from the predicate `x = y`.
pub fn classify_by_coincidence(
    space: &RankOneSpace,
    coincide: bool,
) -> Result<SecurityVerdict<SpherePoint>> {
    if space.center_size() != 1 {
        return Err(Error::InvalidInput(format!(
            "{} needs point coordinates, not just coincidence",
            space.name()
        )));
    }
    Ok(if coincide {
        SecurityVerdict::bare(
            SecurityStatus::Insecure,
            VerdictReason::SelfConfiguration,
            Some(format!("{{x, x}} is insecure on {}", space.name())),
        )
    } else {
        SecurityVerdict::bare(
            SecurityStatus::Secure,
            VerdictReason::ClassificationTable,
            Some(format!(
                "finitely many connecting geodesics for x != y on {}; no blocking set constructed",
                space.name()
            )),
        )
    })
}

/// Angular distance from `f` to the half great circle from `x` through `w`
/// to `-x`.
pub fn distance_to_half_circle(x: &[f64], w: &[f64], f: &[f64]) -> f64 {
    let a = dot(f, x);
    let b = dot(f, w);
    if b >= 0.0 {
        let off_plane = norm(&axpy(-b, w, &axpy(-a, x, f)));
        off_plane.atan2((a * a + b * b).sqrt())
    } else {
        let to_x = angle_between(f, x);
        to_x.min(PI - to_x)
    }
}

/// Deterministic orthonormal pair spanning part of `x^⊥`.
fn orthogonal_pair(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let dim = x.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(a.cmp(&b)));
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for &k in &order {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        let mut w = axpy(-dot(&e, x), x, &e);
        for b in &basis {
            w = axpy(-dot(&w, b), b, &w);
        }
        let n = norm(&w);
        if n > 1e-3 {
            basis.push(scaled(1.0 / n, &w));
        }
        if basis.len() == 2 {
            break;
        }
    }
    (basis[0].clone(), basis[1].clone())
}

/// Returns a half great circle from `x` to `-x` whose angular distance to
/// every point of `obstacles` exceeds [`ESCAPE_MARGIN`].
///
/// Each obstacle rules out at most one direction in `x^⊥`, so scanning a
/// fixed sequence of directions in a plane of `x^⊥` always succeeds; the
/// direction with the widest clearance among the first batch is returned.
pub fn antipodal_escape_witness(x: &SpherePoint, obstacles: &[SpherePoint]) -> Result<GreatArc> {
    for f in obstacles {
        x.check_same_dim(f)?;
        let d = x.distance(f);
        if d <= 2.0 * ESCAPE_MARGIN || PI - d <= 2.0 * ESCAPE_MARGIN {
            return Err(Error::InvalidInput(
                "obstacle coincides with x or its antipode".into(),
            ));
        }
    }
    let (b1, b2) = orthogonal_pair(x.coordinates());
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let clearance = |w: &[f64]| {
        obstacles
            .iter()
            .map(|f| distance_to_half_circle(x.coordinates(), w, f.coordinates()))
            .fold(f64::INFINITY, f64::min)
    };
    const BATCH: usize = 256;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for j in 0..BATCH * 256 {
        let psi = 2.0 * PI * (j as f64 * golden).fract();
        let w = axpy(psi.sin(), &b2, &scaled(psi.cos(), &b1));
        let c = clearance(&w);
        if best.as_ref().map_or(true, |(bc, _)| c > *bc) {
            best = Some((c, w));
        }
        if (j + 1) % BATCH == 0 && best.as_ref().is_some_and(|(bc, _)| *bc > ESCAPE_MARGIN) {
            break;
        }
    }
    let (c, w) = best.expect("at least one direction");
    if c <= ESCAPE_MARGIN {
        return Err(Error::InvalidInput("no escape direction found".into()));
    }
    let mut arc = GreatArc::new(x, w, PI);
    arc.end = antipode(x);
    Ok(arc)
}

/// Smallest angular distance from the arc to any obstacle.
pub fn arc_clearance(arc: &GreatArc, obstacles: &[SpherePoint]) -> f64 {
    obstacles
        .iter()
        .map(|f| distance_to_half_circle(&arc.plane.0, &arc.plane.1, f.coordinates()))
        .fold(f64::INFINITY, f64::min)
}

/// Uniformly distributed point of `S^{ambient_dim - 1}`.
pub fn random_point<R: rand::Rng + ?Sized>(ambient_dim: usize, rng: &mut R) -> SpherePoint {
    loop {
        let v: Vec<f64> = (0..ambient_dim)
            .map(|_| crate::compact_groups::standard_normal(rng))
            .collect();
        if let Ok(p) = SpherePoint::normalized(v) {
            return p;
        }
    }
}
