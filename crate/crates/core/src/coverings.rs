//! Finite riemannian coverings and the transfer of geodesic families and
//! blocking sets along them.
//!
//! Two coverings carry a geodesic engine on both levels: a torus
//! `R^n/Λ' → R^n/Λ` for a sublattice `Λ' ⊂ Λ`, and the double cover
//! `S^n → RP^n`. Flat manifolds with a nontrivial point group are also
//! finitely covered by tori, but no engine for them exists here.
//!
//! A segment upstairs is kept when its open interior avoids the whole fiber
//! of both endpoints. That is exactly the condition for its projection to be
//! a connecting geodesic downstairs, so the lifted family equals the union
//! of the upstairs families between fiber points.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::{One, ToPrimitive};

use crate::blocking::{BlockingSet, Certificate, Provenance, SpacePoint};
use crate::error::{Error, Result};
use crate::lattice::{reduce, same_lattice, Lattice, LengthBound, RationalVector, TorusPoint};
use crate::rank_one::{antipode, sphere_arcs, GreatArc, SphereArcs, SpherePoint, POINT_TOL};
use crate::torus::{
    certify_bounded, connecting_geodesics, segments_between, GeodesicFamily, TorusConfiguration,
    TorusGeodesic,
};

/// Tolerance for matching sphere arcs in the preimage identity.
pub const ARC_MATCH_TOL: f64 = 1e-9;

/// Which covering a transfer went through.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoveringMap {
    TorusSublattice { degree: usize },
    SphereToProjective { n: usize },
}

impl CoveringMap {
    pub fn degree(&self) -> usize {
        match self {
            CoveringMap::TorusSublattice { degree } => *degree,
            CoveringMap::SphereToProjective { .. } => 2,
        }
    }
}

pub trait Covering {
    type Upper: SpacePoint;
    type Lower: SpacePoint;

    fn descriptor(&self) -> CoveringMap;

    fn degree(&self) -> usize {
        self.descriptor().degree()
    }

    /// The `degree` distinct points over `p`.
    fn fiber(&self, p: &Self::Lower) -> Result<Vec<Self::Upper>>;

    fn project(&self, p: &Self::Upper) -> Result<Self::Lower>;

    /// Full preimage. The certificate is dropped: it must be re-established
    /// against the upstairs families.
    fn lift_blocking(&self, b: &BlockingSet<Self::Lower>) -> Result<BlockingSet<Self::Upper>> {
        let mut points = Vec::with_capacity(b.len() * self.degree());
        for p in b.points() {
            points.extend(self.fiber(p)?);
        }
        Ok(BlockingSet::new(points, Provenance::Transferred))
    }

    /// Image, with repeats removed; no certificate until re-verified.
    fn project_blocking(&self, b: &BlockingSet<Self::Upper>) -> Result<BlockingSet<Self::Lower>> {
        let points = b
            .points()
            .iter()
            .map(|p| self.project(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockingSet::new(points, Provenance::Transferred))
    }
}

/// Outcome of comparing the lift of a downstairs family with the union of
/// upstairs families between fiber points.
#[derive(Clone, Debug)]
pub struct PreimageReport<G> {
    pub degree: usize,
    pub downstairs: usize,
    pub lifted: usize,
    pub upstairs: usize,
    /// Lifted geodesics with no upstairs counterpart.
    pub missing_upstairs: Vec<G>,
    /// Upstairs geodesics that are no lift.
    pub extra_upstairs: Vec<G>,
}

impl<G> PreimageReport<G> {
    pub fn holds(&self) -> bool {
        self.missing_upstairs.is_empty()
            && self.extra_upstairs.is_empty()
            && self.lifted == self.degree * self.downstairs
    }
}

/// `R^n/Λ' → R^n/Λ` for a full-rank sublattice `Λ' ⊂ Λ` with the same metric.
#[derive(Clone, Debug)]
pub struct TorusCover {
    upper: Arc<Lattice>,
    lower: Arc<Lattice>,
    /// Representatives of `Λ/Λ'` as ambient vectors, sorted.
    cosets: Vec<RationalVector>,
}

const MAX_COSET_SCAN: usize = 1 << 20;

impl TorusCover {
    pub fn new(upper: Arc<Lattice>, lower: Arc<Lattice>) -> Result<Self> {
        let n = lower.dim();
        if upper.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: upper.dim(),
            });
        }
        if upper.gram() != lower.gram() {
            return Err(Error::InvalidInput(
                "covering tori must share the metric".into(),
            ));
        }
        for j in 0..n {
            if !lower.contains(&upper.basis().column(j)) {
                return Err(Error::InvalidInput(format!(
                    "generator {j} of the upper lattice is not in the lower lattice"
                )));
            }
        }
        let ratio = upper.covolume() / lower.covolume();
        if !ratio.is_integer() || ratio < One::one() {
            return Err(Error::InvalidInput("index is not a positive integer".into()));
        }
        let degree = ratio
            .to_integer()
            .to_usize()
            .ok_or_else(|| Error::InvalidInput("index too large".into()))?;
        let cosets = coset_representatives(&upper, &lower, degree)?;
        Ok(Self {
            upper,
            lower,
            cosets,
        })
    }

    /// The cover whose upper lattice is generated by the columns of
    /// `lower.basis · M` for an integer matrix `M` given by rows.
    pub fn sublattice(lower: Arc<Lattice>, m: &[Vec<i64>]) -> Result<Self> {
        let n = lower.dim();
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.len(),
            });
        }
        let rows: Vec<&[i64]> = m.iter().map(Vec::as_slice).collect();
        let m = crate::lattice::RationalMatrix::from_integer_rows(&rows)?;
        let basis = lower.basis().mul(&m);
        let upper = Lattice::new(basis, lower.gram().clone())?;
        Self::new(Arc::new(upper), lower)
    }

    /// `kZ^n` over `Z^n`, of degree `k^n`.
    pub fn scaled_standard(n: usize, k: i64) -> Result<Self> {
        let m: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { k } else { 0 }).collect())
            .collect();
        Self::sublattice(Arc::new(Lattice::standard(n)), &m)
    }

    pub fn upper(&self) -> &Arc<Lattice> {
        &self.upper
    }

    pub fn lower(&self) -> &Arc<Lattice> {
        &self.lower
    }

    pub fn coset_representatives(&self) -> &[RationalVector] {
        &self.cosets
    }

    /// Every configuration upstairs over `cfg`, as ordered pairs with the
    /// first point in the fiber of `cfg.x()`.
    pub fn fiber_pairs(&self, cfg: &TorusConfiguration) -> Result<Vec<(TorusPoint, TorusPoint)>> {
        let fx = self.fiber(cfg.x())?;
        let fy = self.fiber(cfg.y())?;
        Ok(fx
            .iter()
            .flat_map(|a| fy.iter().map(move |b| (a.clone(), b.clone())))
            .collect())
    }

    pub fn fiber_configurations(&self, cfg: &TorusConfiguration) -> Result<Vec<TorusConfiguration>> {
        self.fiber_pairs(cfg)?
            .into_iter()
            .map(|(a, b)| TorusConfiguration::new(a, b))
            .collect()
    }

    /// The `degree` lifts of a downstairs geodesic, one from each fiber point
    /// of its start.
    pub fn lift_geodesic(&self, g: &TorusGeodesic) -> Result<Vec<TorusGeodesic>> {
        let start = reduce(&g.base, &self.lower)?;
        self.fiber(&start)?
            .into_iter()
            .map(|s| {
                let end = &s.rep().clone() + &g.displacement;
                let end_point = reduce(&end, &self.upper)?;
                let z = self.upper.to_lattice_coords(&(&end - end_point.rep()));
                let translate = z
                    .iter()
                    .map(|c| c.to_integer().to_i64().expect("small translate"))
                    .collect();
                Ok(TorusGeodesic {
                    base: s.rep().clone(),
                    displacement: g.displacement.clone(),
                    length_sq: g.length_sq.clone(),
                    translate,
                })
            })
            .collect()
    }

    /// Union over fiber pairs of the upstairs segments of length at most
    /// `bound` whose interiors avoid both full fibers.
    pub fn upstairs_family(
        &self,
        cfg: &TorusConfiguration,
        bound: &LengthBound,
    ) -> Result<Vec<TorusGeodesic>> {
        self.check_lower(cfg)?;
        let mut avoid = self.fiber(cfg.x())?;
        avoid.extend(self.fiber(cfg.y())?);
        let mut out = Vec::new();
        for (a, b) in self.fiber_pairs(cfg)? {
            out.extend(segments_between(&a, &b, bound, &avoid)?);
        }
        Ok(out)
    }

    pub fn lifted_family(
        &self,
        family: &GeodesicFamily,
    ) -> Result<Vec<TorusGeodesic>> {
        let mut out = Vec::new();
        for g in &family.geodesics {
            out.extend(self.lift_geodesic(g)?);
        }
        Ok(out)
    }

    /// Exact comparison of `p⁻¹(Γ(x, y, L))` with the union of upstairs
    /// families; segments are identified by start point and displacement.
    pub fn verify_preimage_identity(
        &self,
        cfg: &TorusConfiguration,
        bound: &LengthBound,
    ) -> Result<PreimageReport<TorusGeodesic>> {
        self.check_lower(cfg)?;
        let family = connecting_geodesics(cfg, bound);
        let lifted = self.lifted_family(&family)?;
        let upstairs = self.upstairs_family(cfg, bound)?;
        let key = |g: &TorusGeodesic| (g.base.clone(), g.displacement.clone());
        let lifted_keys: BTreeSet<_> = lifted.iter().map(key).collect();
        let upstairs_keys: BTreeSet<_> = upstairs.iter().map(key).collect();
        let missing_upstairs = lifted
            .iter()
            .filter(|g| !upstairs_keys.contains(&key(g)))
            .cloned()
            .collect();
        let extra_upstairs = upstairs
            .iter()
            .filter(|g| !lifted_keys.contains(&key(g)))
            .cloned()
            .collect();
        Ok(PreimageReport {
            degree: self.degree(),
            downstairs: family.len(),
            lifted: lifted_keys.len(),
            upstairs: upstairs.len(),
            missing_upstairs,
            extra_upstairs,
        })
    }

    /// Certifies an upstairs set against the lifted family of `cfg`.
    pub fn certify_lifted(
        &self,
        cfg: &TorusConfiguration,
        b: &BlockingSet<TorusPoint>,
        bound: &LengthBound,
    ) -> Result<Option<BlockingSet<TorusPoint>>> {
        for g in self.upstairs_family(cfg, bound)? {
            let mut hit = false;
            for p in b.points() {
                if !crate::torus::interior_passes(&g, p)?.is_empty() {
                    hit = true;
                    break;
                }
            }
            if !hit {
                return Ok(None);
            }
        }
        Ok(Some(
            b.clone().with_certificate(Certificate::BoundedLength(bound.clone())),
        ))
    }

    /// Certifies a downstairs set against `Γ(x, y, L)`.
    pub fn certify_projected(
        &self,
        cfg: &TorusConfiguration,
        b: &BlockingSet<TorusPoint>,
        bound: &LengthBound,
    ) -> Result<Option<BlockingSet<TorusPoint>>> {
        self.check_lower(cfg)?;
        Ok(certify_bounded(cfg, b, bound)?.ok())
    }

    fn check_lower(&self, cfg: &TorusConfiguration) -> Result<()> {
        if same_lattice(cfg.lattice(), &self.lower) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }
}

fn coset_representatives(
    upper: &Arc<Lattice>,
    lower: &Arc<Lattice>,
    degree: usize,
) -> Result<Vec<RationalVector>> {
    let n = lower.dim();
    // degree·Λ ⊂ Λ', so the box [0, degree)^n meets every coset
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(degree));
    match total {
        Some(t) if t <= MAX_COSET_SCAN => {}
        _ => return Err(Error::InvalidInput("covering degree too large".into())),
    }
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    let mut k = vec![0i64; n];
    loop {
        let v = lower.lattice_vector(&k);
        let up = reduce(&v, upper)?;
        if seen.insert(up.rep().clone()) {
            reps.push(up.rep().clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                reps.sort();
                debug_assert_eq!(reps.len(), degree);
                return Ok(reps);
            }
            i -= 1;
            k[i] += 1;
            if (k[i] as usize) < degree {
                break;
            }
            k[i] = 0;
        }
    }
}

impl Covering for TorusCover {
    type Upper = TorusPoint;
    type Lower = TorusPoint;

    fn descriptor(&self) -> CoveringMap {
        CoveringMap::TorusSublattice {
            degree: self.cosets.len(),
        }
    }

    fn fiber(&self, p: &TorusPoint) -> Result<Vec<TorusPoint>> {
        if !same_lattice(p.lattice(), &self.lower) {
            return Err(Error::LatticeMismatch);
        }
        let mut out: Vec<TorusPoint> = self
            .cosets
            .iter()
            .map(|c| reduce(&(p.rep() + c), &self.upper))
            .collect::<Result<_>>()?;
        out.sort();
        Ok(out)
    }

    fn project(&self, p: &TorusPoint) -> Result<TorusPoint> {
        if !same_lattice(p.lattice(), &self.upper) {
            return Err(Error::LatticeMismatch);
        }
        reduce(p.rep(), &self.lower)
    }
}

/// A point of `RP^n` as the class `{v, -v}` of a unit vector; the stored
/// representative has its first significant coordinate positive.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectivePoint(SpherePoint);

impl ProjectivePoint {
    pub fn new(v: SpherePoint) -> Self {
        let lead = v
            .coordinates()
            .iter()
            .copied()
            .find(|c| c.abs() > POINT_TOL)
            .unwrap_or(0.0);
        if lead < 0.0 {
            Self(antipode(&v))
        } else {
            Self(v)
        }
    }

    pub fn representative(&self) -> &SpherePoint {
        &self.0
    }
}

impl SpacePoint for ProjectivePoint {
    fn coincides(&self, other: &Self) -> bool {
        self.0.coincides(&other.0) || self.0.coincides(&antipode(&other.0))
    }
}

/// Connecting geodesics of a pair in `RP^n`, each represented by its lift
/// starting at the representative of the first point.
#[derive(Clone, Debug)]
pub enum ProjectiveFamily {
    /// `[x] = [y]`: a continuum of closed geodesics.
    Infinite,
    Finite(Vec<GreatArc>),
}

/// `S^n → RP^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjectiveCover {
    n: usize,
}

impl ProjectiveCover {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput(format!("RP^n needs n >= 2, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check(&self, p: &ProjectivePoint) -> Result<()> {
        if p.0.ambient_dim() != self.n + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: p.0.ambient_dim(),
            });
        }
        Ok(())
    }

    /// For `[x] ≠ [y]` there are exactly two: the arc from `x` to the
    /// representative `y'` with `x·y' ≥ 0`, of length `d ≤ π/2`, and the arc
    /// leaving in the opposite direction to `-y'`, of length `π - d`.
    pub fn downstairs_family(
        &self,
        x: &ProjectivePoint,
        y: &ProjectivePoint,
        bound: Option<f64>,
    ) -> Result<ProjectiveFamily> {
        self.check(x)?;
        self.check(y)?;
        if x.coincides(y) {
            return Ok(ProjectiveFamily::Infinite);
        }
        let xs = &x.0;
        let ys = &y.0;
        let y_near = if crate::rank_one::dot(xs.coordinates(), ys.coordinates()) >= 0.0 {
            ys.clone()
        } else {
            antipode(ys)
        };
        let (short, far) = match (sphere_arcs(xs, &y_near)?, sphere_arcs(xs, &antipode(&y_near))?) {
            (SphereArcs::TwoArcs { short: a, .. }, SphereArcs::TwoArcs { short: b, .. }) => (a, b),
            _ => unreachable!("classes differ, so y' is not ±x"),
        };
        let arcs = [short, far]
            .into_iter()
            .filter(|a| bound.map_or(true, |l| a.arclength <= l))
            .collect();
        Ok(ProjectiveFamily::Finite(arcs))
    }

    /// Upstairs arcs between fiber points with length at most `bound`
    /// whose interiors avoid `±x` and `±y`.
    pub fn upstairs_family(
        &self,
        x: &ProjectivePoint,
        y: &ProjectivePoint,
        bound: Option<f64>,
    ) -> Result<Vec<GreatArc>> {
        let fx = self.fiber(x)?;
        let fy = self.fiber(y)?;
        let avoid: Vec<SpherePoint> = fx.iter().chain(&fy).cloned().collect();
        let mut out = Vec::new();
        for a in &fx {
            for b in &fy {
                if let SphereArcs::TwoArcs { short, long } = sphere_arcs(a, b)? {
                    for arc in [short, long] {
                        if bound.map_or(true, |l| arc.arclength <= l)
                            && !avoid.iter().any(|p| arc.passes_interior(p))
                        {
                            out.push(arc);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Compares the lifts of the downstairs family with the upstairs union,
    /// matching arcs within [`ARC_MATCH_TOL`].
    pub fn verify_preimage_identity(
        &self,
        x: &ProjectivePoint,
        y: &ProjectivePoint,
        bound: Option<f64>,
    ) -> Result<PreimageReport<GreatArc>> {
        let ProjectiveFamily::Finite(down) = self.downstairs_family(x, y, bound)? else {
            return Err(Error::InvalidInput(
                "[x] = [y] has a continuum of connecting geodesics".into(),
            ));
        };
        let lifted: Vec<GreatArc> = down
            .iter()
            .flat_map(|a| [a.clone(), a.antipodal_image()])
            .collect();
        let upstairs = self.upstairs_family(x, y, bound)?;
        let mut used = vec![false; upstairs.len()];
        let mut missing_upstairs = Vec::new();
        for a in &lifted {
            match (0..upstairs.len()).find(|&j| !used[j] && a.matches(&upstairs[j], ARC_MATCH_TOL)) {
                Some(j) => used[j] = true,
                None => missing_upstairs.push(a.clone()),
            }
        }
        let extra_upstairs = upstairs
            .iter()
            .zip(&used)
            .filter(|(_, &u)| !u)
            .map(|(a, _)| a.clone())
            .collect();
        Ok(PreimageReport {
            degree: 2,
            downstairs: down.len(),
            lifted: lifted.len(),
            upstairs: upstairs.len(),
            missing_upstairs,
            extra_upstairs,
        })
    }

    /// Projection of the arc-midpoint blocking sets of the lifted
    /// configurations `{x, y}` and `{x, -y}`.
    pub fn blocking_from_fibers(
        &self,
        x: &ProjectivePoint,
        y: &ProjectivePoint,
    ) -> Result<BlockingSet<ProjectivePoint>> {
        self.check(x)?;
        self.check(y)?;
        let mut upstairs = Vec::new();
        for target in [y.0.clone(), antipode(&y.0)] {
            if let SphereArcs::TwoArcs { short, long } = sphere_arcs(&x.0, &target)? {
                upstairs.push(short.midpoint());
                upstairs.push(long.midpoint());
            }
        }
        let up = BlockingSet::new(upstairs, Provenance::CanonicalMidpoint);
        self.project_blocking(&up)
    }

    /// Checks `b` against the downstairs family. With no bound the family is
    /// complete and the certificate is `Universal`.
    pub fn certify_downstairs(
        &self,
        x: &ProjectivePoint,
        y: &ProjectivePoint,
        b: &BlockingSet<ProjectivePoint>,
        bound: Option<f64>,
    ) -> Result<Option<BlockingSet<ProjectivePoint>>> {
        let ProjectiveFamily::Finite(arcs) = self.downstairs_family(x, y, bound)? else {
            return Ok(None);
        };
        let blocked = arcs.iter().all(|arc| {
            b.points().iter().any(|p| {
                arc.passes_interior(&p.0) || arc.passes_interior(&antipode(&p.0))
            })
        });
        if !blocked {
            return Ok(None);
        }
        let certificate = match bound {
            None => Certificate::Universal,
            Some(l) => Certificate::BoundedLength(LengthBound::from_f64(l)?),
        };
        Ok(Some(b.clone().with_certificate(certificate)))
    }

    /// Checks an upstairs set against every lifted arc.
    pub fn certify_lifted(
        &self,
        x: &ProjectivePoint,
        y: &ProjectivePoint,
        b: &BlockingSet<SpherePoint>,
        bound: Option<f64>,
    ) -> Result<bool> {
        Ok(self
            .upstairs_family(x, y, bound)?
            .iter()
            .all(|arc| b.points().iter().any(|p| arc.passes_interior(p))))
    }
}

impl Covering for ProjectiveCover {
    type Upper = SpherePoint;
    type Lower = ProjectivePoint;

    fn descriptor(&self) -> CoveringMap {
        CoveringMap::SphereToProjective { n: self.n }
    }

    fn fiber(&self, p: &ProjectivePoint) -> Result<Vec<SpherePoint>> {
        self.check(p)?;
        Ok(vec![p.0.clone(), antipode(&p.0)])
    }

    fn project(&self, p: &SpherePoint) -> Result<ProjectivePoint> {
        let q = ProjectivePoint::new(p.clone());
        self.check(&q)?;
        Ok(q)
    }
}
