//! Connecting geodesics on flat tori, the canonical midpoint blocking set
//! and its exact certificates.
//!
//! A geodesic from `x` to `y` on `R^n / Λ` is the image of a straight segment
//! from a lift of `x` to `y + z` for some `z ∈ Λ`. It is a connecting geodesic
//! when its open interior avoids both endpoints. Every such segment with
//! `z ≡ r (mod 2Λ)` has its midpoint at the same torus point
//! `x + (y - x)/2 + r/2`, which is what makes `2^n` points enough.

use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::blocking::{BlockingSet, Certificate, Provenance};
use crate::error::{Error, Result};
use crate::lattice::{
    int, lattice_ball, rat, reduce, same_lattice, squared_norm, Lattice, LengthBound, Rational,
    RationalVector, TorusPoint,
};

/// An unordered pair of torus points; stored with `x <= y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusConfiguration {
    x: TorusPoint,
    y: TorusPoint,
    lattice: Arc<Lattice>,
}

impl TorusConfiguration {
    pub fn new(a: TorusPoint, b: TorusPoint) -> Result<Self> {
        if !same_lattice(a.lattice(), b.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let lattice = Arc::clone(a.lattice());
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        Ok(Self { x, y, lattice })
    }

    pub fn from_vectors(
        a: &RationalVector,
        b: &RationalVector,
        lattice: &Arc<Lattice>,
    ) -> Result<Self> {
        Self::new(reduce(a, lattice)?, reduce(b, lattice)?)
    }

    pub fn x(&self) -> &TorusPoint {
        &self.x
    }

    pub fn y(&self) -> &TorusPoint {
        &self.y
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    /// `{x, x}`
    pub fn is_diagonal(&self) -> bool {
        self.x == self.y
    }

    fn check_point(&self, p: &TorusPoint) -> Result<()> {
        if same_lattice(p.lattice(), &self.lattice) {
            Ok(())
        } else {
            Err(Error::LatticeMismatch)
        }
    }
}

/// A geodesic segment `t ↦ base + t·displacement`, `t ∈ [0, 1]`, with
/// `displacement = y - x + z` for the lattice vector with coefficients
/// `translate`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TorusGeodesic {
    pub base: RationalVector,
    pub displacement: RationalVector,
    pub length_sq: Rational,
    pub translate: Vec<i64>,
}

impl TorusGeodesic {
    /// Class of `translate` in `Λ / 2Λ`.
    pub fn residue(&self) -> Vec<u8> {
        self.translate.iter().map(|k| k.rem_euclid(2) as u8).collect()
    }

    pub fn point_at(&self, t: &Rational) -> RationalVector {
        &self.base + &self.displacement.scale(t)
    }

    pub fn midpoint(&self) -> RationalVector {
        self.point_at(&rat(1, 2))
    }
}

/// The connecting geodesics of a configuration up to a length bound,
/// sorted by squared length and then by displacement.
#[derive(Clone, Debug)]
pub struct GeodesicFamily {
    pub config: TorusConfiguration,
    pub length_bound: LengthBound,
    pub geodesics: Vec<TorusGeodesic>,
}

impl GeodesicFamily {
    pub fn len(&self) -> usize {
        self.geodesics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geodesics.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &TorusGeodesic> {
        self.geodesics.iter()
    }
}

/// All `t ∈ (0, 1)` with `offset + t·direction ∈ Z^n`, ascending.
///
/// `offset` and `direction` are in lattice coordinates; `direction ≠ 0`.
pub(crate) fn interior_params(offset: &[Rational], direction: &[Rational]) -> Vec<Rational> {
    let mut pivot: Option<usize> = None;
    for (i, (a, e)) in offset.iter().zip(direction).enumerate() {
        if e.is_zero() {
            if !a.is_integer() {
                return Vec::new();
            }
        } else if pivot.map_or(true, |p| e.abs() < direction[p].abs()) {
            pivot = Some(i);
        }
    }
    let Some(p) = pivot else {
        return Vec::new();
    };
    let (a, e) = (&offset[p], &direction[p]);
    // t = (k - a) / e must lie strictly inside (0, 1)
    let (lo, hi) = if e.is_positive() {
        (a.clone(), a + e)
    } else {
        (a + e, a.clone())
    };
    let first: num_bigint::BigInt = lo.floor().to_integer() + 1;
    let last = hi.ceil().to_integer() - 1;
    let mut out = Vec::new();
    let mut k = first;
    while k <= last {
        let t = (Rational::from_integer(k.clone()) - a) / e;
        let ok = offset
            .iter()
            .zip(direction)
            .enumerate()
            .all(|(i, (ai, ei))| i == p || (ai + &t * ei).is_integer());
        if ok {
            out.push(t);
        }
        k += 1;
    }
    out.sort();
    out
}

pub(crate) fn has_interior_param(offset: &[Rational], direction: &[Rational]) -> bool {
    !interior_params(offset, direction).is_empty()
}

/// Parameters `t ∈ (0, 1)` where `g` passes through `p`.
pub fn interior_passes(g: &TorusGeodesic, p: &TorusPoint) -> Result<Vec<Rational>> {
    let lattice = p.lattice();
    lattice.check_dim(&g.base)?;
    lattice.check_dim(&g.displacement)?;
    if g.displacement.is_zero() {
        return Ok(Vec::new());
    }
    let offset = lattice.to_lattice_coords(&(&g.base - p.rep()));
    let direction = lattice.to_lattice_coords(&g.displacement);
    Ok(interior_params(&offset, &direction))
}

fn sort_geodesics(geodesics: &mut [TorusGeodesic]) {
    geodesics.sort_by(|a, b| {
        a.length_sq
            .cmp(&b.length_sq)
            .then_with(|| a.displacement.cmp(&b.displacement))
    });
}

/// Segments from the lift `start.rep()` to translates of `end` of length at
/// most `bound`, dropping the zero segment and any segment whose open
/// interior meets a point of `avoid`.
pub fn segments_between(
    start: &TorusPoint,
    end: &TorusPoint,
    bound: &LengthBound,
    avoid: &[TorusPoint],
) -> Result<Vec<TorusGeodesic>> {
    if !same_lattice(start.lattice(), end.lattice())
        || avoid.iter().any(|p| !same_lattice(p.lattice(), start.lattice()))
    {
        return Err(Error::LatticeMismatch);
    }
    let lattice = start.lattice();
    let offset = end.rep() - start.rep();
    let offset_coords = lattice.to_lattice_coords(&offset);
    let avoid_offsets: Vec<Vec<Rational>> = avoid
        .iter()
        .map(|p| lattice.to_lattice_coords(&(start.rep() - p.rep())))
        .collect();
    let mut out = Vec::new();
    for z in lattice_ball(lattice, &offset, bound)? {
        let direction: Vec<Rational> = offset_coords
            .iter()
            .zip(&z)
            .map(|(c, &k)| c + int(k))
            .collect();
        if direction.iter().all(Zero::is_zero) {
            continue;
        }
        if avoid_offsets
            .iter()
            .any(|a| has_interior_param(a, &direction))
        {
            continue;
        }
        let displacement = lattice.from_lattice_coords(&direction);
        let length_sq = squared_norm(&displacement, lattice)?;
        out.push(TorusGeodesic {
            base: start.rep().clone(),
            displacement,
            length_sq,
            translate: z,
        });
    }
    sort_geodesics(&mut out);
    Ok(out)
}

/// Connecting geodesics of `cfg` with length at most `bound`.
pub fn connecting_geodesics(cfg: &TorusConfiguration, bound: &LengthBound) -> GeodesicFamily {
    let avoid = [cfg.x.clone(), cfg.y.clone()];
    let geodesics = segments_between(&cfg.x, &cfg.y, bound, &avoid)
        .expect("configuration points share a lattice");
    GeodesicFamily {
        config: cfg.clone(),
        length_bound: bound.clone(),
        geodesics,
    }
}

/// `{0,1}^n` in lexicographic order.
pub fn residues(n: usize) -> Vec<Vec<u8>> {
    (0..1usize << n)
        .map(|mask| (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as u8).collect())
        .collect()
}

/// The common midpoint of all segments whose translate lies in class `residue`.
pub fn residue_midpoint(cfg: &TorusConfiguration, residue: &[u8]) -> Result<TorusPoint> {
    if residue.len() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: residue.len(),
        });
    }
    let half = rat(1, 2);
    let k: Vec<i64> = residue.iter().map(|&r| i64::from(r)).collect();
    let shift = &(cfg.y.rep() - cfg.x.rep()) + &cfg.lattice.lattice_vector(&k);
    reduce(&(cfg.x.rep() + &shift.scale(&half)), &cfg.lattice)
}

/// The canonical blocking set: one midpoint per class of `Λ / 2Λ`, without
/// the class that lands on the endpoint when `x = y`.
pub fn midpoint_set(cfg: &TorusConfiguration) -> BlockingSet<TorusPoint> {
    let diagonal = cfg.is_diagonal();
    let points = residues(cfg.dim())
        .into_iter()
        .filter(|r| !(diagonal && r.iter().all(|&b| b == 0)))
        .map(|r| residue_midpoint(cfg, &r).expect("residue has configuration dimension"));
    BlockingSet::new(points, Provenance::CanonicalMidpoint)
}

#[derive(Clone, Debug)]
pub enum UniversalCheck {
    Certified(BlockingSet<TorusPoint>),
    Violation {
        residue: Vec<u8>,
        midpoint: TorusPoint,
    },
}

/// Length-free check: `B` blocks every connecting geodesic iff it contains
/// the midpoint of every residue class that carries one.
pub fn verify_universal(
    cfg: &TorusConfiguration,
    blocking: &BlockingSet<TorusPoint>,
) -> Result<UniversalCheck> {
    for p in blocking.points() {
        cfg.check_point(p)?;
    }
    for r in residues(cfg.dim()) {
        if cfg.is_diagonal() && r.iter().all(|&b| b == 0) {
            // only z ∈ 2Λ, and those segments pass x at t = 1/2
            continue;
        }
        let m = residue_midpoint(cfg, &r)?;
        if !blocking.contains(&m) {
            return Ok(UniversalCheck::Violation {
                residue: r,
                midpoint: m,
            });
        }
    }
    Ok(UniversalCheck::Certified(
        blocking.clone().with_certificate(Certificate::Universal),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundedCheck {
    Blocked,
    Unblocked(TorusGeodesic),
}

fn passes_any(g: &TorusGeodesic, blocking: &[TorusPoint]) -> Result<bool> {
    for p in blocking {
        if !interior_passes(g, p)?.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Checks `B` against every connecting geodesic up to `bound`; reports the
/// shortest unblocked one otherwise.
pub fn verify_bounded(
    cfg: &TorusConfiguration,
    blocking: &BlockingSet<TorusPoint>,
    bound: &LengthBound,
) -> Result<BoundedCheck> {
    for p in blocking.points() {
        cfg.check_point(p)?;
    }
    let family = connecting_geodesics(cfg, bound);
    check_family(&family, blocking.points())
}

pub(crate) fn check_family(family: &GeodesicFamily, points: &[TorusPoint]) -> Result<BoundedCheck> {
    for g in &family.geodesics {
        if !passes_any(g, points)? {
            return Ok(BoundedCheck::Unblocked(g.clone()));
        }
    }
    Ok(BoundedCheck::Blocked)
}

/// `verify_bounded`, attaching a `BoundedLength` certificate on success.
pub fn certify_bounded(
    cfg: &TorusConfiguration,
    blocking: &BlockingSet<TorusPoint>,
    bound: &LengthBound,
) -> Result<std::result::Result<BlockingSet<TorusPoint>, TorusGeodesic>> {
    Ok(match verify_bounded(cfg, blocking, bound)? {
        BoundedCheck::Blocked => Ok(blocking
            .clone()
            .with_certificate(Certificate::BoundedLength(bound.clone()))),
        BoundedCheck::Unblocked(g) => Err(g),
    })
}

/// True when `t = 1/2` lies on the segment's interior passes through `p`.
pub fn passes_at_midpoint(g: &TorusGeodesic, p: &TorusPoint) -> Result<bool> {
    let half = rat(1, 2);
    Ok(interior_passes(g, p)?.contains(&half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::RationalMatrix;

    fn z(n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::standard(n))
    }

    fn cfg(a: &[(i64, i64)], b: &[(i64, i64)], l: &Arc<Lattice>) -> TorusConfiguration {
        TorusConfiguration::from_vectors(
            &RationalVector::from_ratios(a),
            &RationalVector::from_ratios(b),
            l,
        )
        .unwrap()
    }

    fn bound(p: i64, q: i64) -> LengthBound {
        LengthBound::new(rat(p, q)).unwrap()
    }

    fn displacements(f: &GeodesicFamily) -> Vec<RationalVector> {
        f.geodesics.iter().map(|g| g.displacement.clone()).collect()
    }

    #[test]
    fn configuration_is_unordered() {
        let l = z(2);
        let a = cfg(&[(1, 3), (1, 5)], &[(0, 1), (0, 1)], &l);
        let b = cfg(&[(0, 1), (0, 1)], &[(1, 3), (1, 5)], &l);
        assert_eq!(a, b);
        assert!(a.x().rep().is_zero());
    }

    #[test]
    fn mixed_lattices_are_rejected() {
        let p = TorusPoint::origin(&z(1));
        let l2 = Arc::new(Lattice::with_basis(RationalMatrix::from_integer_rows(&[&[2]]).unwrap()).unwrap());
        let q = TorusPoint::origin(&l2);
        assert_eq!(TorusConfiguration::new(p, q).unwrap_err(), Error::LatticeMismatch);
    }

    #[test]
    fn circle_third_keeps_two_arcs() {
        // oracle: scan z in [-4,4], keep |1/3+z| <= 3 and exact interior test
        let l = z(1);
        let c = cfg(&[(0, 1)], &[(1, 3)], &l);
        let mut expected = Vec::new();
        for k in -4i64..=4 {
            let d = rat(1, 3) + int(k);
            if &d * &d > int(9) {
                continue;
            }
            // a value of (target + Z) strictly between 0 and d
            let strictly_between = |target: Rational| {
                (-5i64..=5).any(|m| {
                    let v = &target + int(m);
                    let t = &v / &d;
                    t > int(0) && t < int(1)
                })
            };
            let passes_x = strictly_between(int(0));
            let passes_y = strictly_between(rat(1, 3));
            if !passes_x && !passes_y {
                expected.push(RationalVector::new(vec![d]));
            }
        }
        let family = connecting_geodesics(&c, &bound(3, 1));
        assert_eq!(family.len(), 2);
        let mut got = displacements(&family);
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
        assert_eq!(
            got,
            vec![RationalVector::from_ratios(&[(-2, 3)]), RationalVector::from_ratios(&[(1, 3)])]
        );
    }

    #[test]
    fn diagonal_circle_loops() {
        let l = z(1);
        let c = cfg(&[(0, 1)], &[(0, 1)], &l);
        let family = connecting_geodesics(&c, &bound(3, 2));
        assert_eq!(
            displacements(&family),
            vec![RationalVector::from_integers(&[-1]), RationalVector::from_integers(&[1])]
        );
        // z = ±2 pass the base point at t = 1/2
        let family = connecting_geodesics(&c, &bound(5, 1));
        assert_eq!(family.len(), 2);
    }

    #[test]
    fn plane_family_has_thirteen() {
        let l = z(2);
        let c = cfg(&[(0, 1), (0, 1)], &[(1, 3), (1, 5)], &l);
        let family = connecting_geodesics(&c, &bound(2, 1));
        assert_eq!(family.len(), 13);
        for w in family.geodesics.windows(2) {
            assert!(w[0].length_sq <= w[1].length_sq);
        }
    }

    #[test]
    fn interior_pass_examples() {
        let l = z(2);
        let g = TorusGeodesic {
            base: RationalVector::zeros(2),
            displacement: RationalVector::from_ratios(&[(1, 3), (1, 5)]),
            length_sq: rat(34, 225),
            translate: vec![0, 0],
        };
        let p = reduce(&RationalVector::from_ratios(&[(1, 6), (1, 10)]), &l).unwrap();
        assert_eq!(interior_passes(&g, &p).unwrap(), vec![rat(1, 2)]);

        let l1 = z(1);
        let half = reduce(&RationalVector::from_ratios(&[(1, 2)]), &l1).unwrap();
        let loop1 = TorusGeodesic {
            base: RationalVector::zeros(1),
            displacement: RationalVector::from_integers(&[1]),
            length_sq: int(1),
            translate: vec![1],
        };
        assert_eq!(interior_passes(&loop1, &half).unwrap(), vec![rat(1, 2)]);

        // t * 5/2 ≡ 1/2 (mod 1)  =>  t = (1 + 2k)/5
        let long = TorusGeodesic {
            base: RationalVector::zeros(1),
            displacement: RationalVector::from_ratios(&[(5, 2)]),
            length_sq: rat(25, 4),
            translate: vec![2],
        };
        assert_eq!(interior_passes(&long, &half).unwrap(), vec![rat(1, 5), rat(3, 5)]);
    }

    #[test]
    fn midpoint_sets() {
        let l = z(2);
        let c = cfg(&[(0, 1), (0, 1)], &[(1, 3), (1, 5)], &l);
        let m = midpoint_set(&c);
        let mut got: Vec<RationalVector> = m.points().iter().map(|p| p.rep().clone()).collect();
        got.sort();
        let mut expected = vec![
            RationalVector::from_ratios(&[(1, 6), (1, 10)]),
            RationalVector::from_ratios(&[(2, 3), (1, 10)]),
            RationalVector::from_ratios(&[(1, 6), (3, 5)]),
            RationalVector::from_ratios(&[(2, 3), (3, 5)]),
        ];
        expected.sort();
        assert_eq!(got, expected);

        let l1 = z(1);
        let d = midpoint_set(&cfg(&[(0, 1)], &[(0, 1)], &l1));
        assert_eq!(d.len(), 1);
        assert_eq!(d.points()[0].rep(), &RationalVector::from_ratios(&[(1, 2)]));

        let h = midpoint_set(&cfg(&[(0, 1)], &[(1, 2)], &l1));
        let got: Vec<_> = h.points().iter().map(|p| p.rep().clone()).collect();
        assert_eq!(
            got,
            vec![RationalVector::from_ratios(&[(1, 4)]), RationalVector::from_ratios(&[(3, 4)])]
        );
    }

    #[test]
    fn universal_certificates() {
        let l = z(2);
        let c = cfg(&[(0, 1), (0, 1)], &[(1, 3), (1, 5)], &l);
        let m = midpoint_set(&c);
        assert!(matches!(
            verify_universal(&c, &m).unwrap(),
            UniversalCheck::Certified(ref b) if *b.certificate() == Certificate::Universal
        ));

        let missing = reduce(&RationalVector::from_ratios(&[(2, 3), (3, 5)]), &l).unwrap();
        let idx = m.points().iter().position(|p| *p == missing).unwrap();
        match verify_universal(&c, &m.without(idx)).unwrap() {
            UniversalCheck::Violation { residue, midpoint } => {
                assert_eq!(residue, vec![1, 1]);
                assert_eq!(midpoint, missing);
            }
            other => panic!("expected violation, got {other:?}"),
        }

        let l1 = z(1);
        let d = cfg(&[(0, 1)], &[(0, 1)], &l1);
        let half = reduce(&RationalVector::from_ratios(&[(1, 2)]), &l1).unwrap();
        let b = BlockingSet::new(vec![half], Provenance::Manual);
        assert!(matches!(verify_universal(&d, &b).unwrap(), UniversalCheck::Certified(_)));
    }

    #[test]
    fn universal_rejects_foreign_points() {
        let c = cfg(&[(0, 1)], &[(1, 2)], &z(1));
        let foreign = TorusPoint::origin(&z(2));
        let b = BlockingSet::new(vec![foreign], Provenance::Manual);
        assert_eq!(verify_universal(&c, &b).unwrap_err(), Error::LatticeMismatch);
    }

    #[test]
    fn bounded_checks() {
        let l = z(1);
        let c = cfg(&[(0, 1)], &[(1, 2)], &l);
        let q = |p, q| reduce(&RationalVector::from_ratios(&[(p, q)]), &l).unwrap();
        let both = BlockingSet::new(vec![q(1, 4), q(3, 4)], Provenance::Manual);
        assert_eq!(verify_bounded(&c, &both, &bound(10, 1)).unwrap(), BoundedCheck::Blocked);

        let one = BlockingSet::new(vec![q(1, 4)], Provenance::Manual);
        match verify_bounded(&c, &one, &bound(1, 1)).unwrap() {
            BoundedCheck::Unblocked(g) => {
                assert_eq!(g.displacement, RationalVector::from_ratios(&[(-1, 2)]))
            }
            BoundedCheck::Blocked => panic!("1/4 cannot block the arc (1/2, 1)"),
        }

        let none = BlockingSet::empty(Provenance::Manual);
        match verify_bounded(&c, &none, &bound(1, 1)).unwrap() {
            BoundedCheck::Unblocked(g) => assert_eq!(g.length_sq, rat(1, 4)),
            BoundedCheck::Blocked => panic!(),
        }
    }

    #[test]
    fn skewed_lattice_midpoints_are_universal() {
        let basis = RationalMatrix::from_integer_rows(&[&[2, 1], &[0, 3]]).unwrap();
        let gram = RationalMatrix::from_integer_rows(&[&[2, 1], &[1, 2]]).unwrap();
        let l = Arc::new(Lattice::new(basis, gram).unwrap());
        let c = cfg(&[(1, 7), (0, 1)], &[(5, 4), (2, 3)], &l);
        let m = midpoint_set(&c);
        assert_eq!(m.len(), 4);
        assert!(matches!(verify_universal(&c, &m).unwrap(), UniversalCheck::Certified(_)));
        assert_eq!(verify_bounded(&c, &m, &bound(8, 1)).unwrap(), BoundedCheck::Blocked);
    }
}
