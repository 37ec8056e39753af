//! Configurations in SU(n) with the bi-invariant metric `-c·Re tr(XY)`.
//!
//! A regular configuration `{k1, k2}` (distinct eigenvalues of `k1⁻¹k2`) lies
//! in a unique maximal torus, so its connecting geodesics are those of a flat
//! `(n-1)`-torus. In the coordinates `s` with
//! `H(s) = 2πi·diag(s_1, …, s_{n-1}, -Σ s_j)` the kernel lattice of `exp` is
//! `Z^{n-1}` and the metric is `4π²c·(I + J)`, `J` the all-ones matrix.
//!
//! Eigenvalue angles are floating-point; they enter the torus as exact
//! dyadic rationals, so the torus certificates are exact for the rounded
//! element.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use rand::Rng;

use crate::blocking::{BlockingSet, Certificate, SpacePoint};
use crate::error::{Error, Result};
use crate::lattice::{
    rational_from_f64, reduce, Lattice, LengthBound, RationalMatrix, RationalVector,
};
use crate::rank_one::{classify, RankOneSpace, SecurityStatus, SecurityVerdict, SpherePoint, VerdictReason};
use crate::torus::{connecting_geodesics, midpoint_set, verify_universal, GeodesicFamily, TorusConfiguration, TorusGeodesic, UniversalCheck};

pub type C64 = Complex<f64>;

/// Tolerance on `U U* = I` and `det U = 1`.
pub const UNITARY_TOL: f64 = 1e-9;
/// Eigenvalues closer than this (chordal distance) are one cluster.
pub const CLUSTER_THRESHOLD: f64 = 1e-8;
/// Gaps within this factor of the threshold are rejected as ill-conditioned.
pub const GUARD_FACTOR: f64 = 10.0;
/// Largest supported `n`.
pub const MAX_N: usize = 6;

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A unitary matrix; group elements are additionally special.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(DMatrix<C64>);

impl UnitaryMatrix {
    pub fn unitary(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidInput("unitary matrix must be square".into()));
        }
        let n = m.nrows();
        let deviation = max_abs(&(&m * m.adjoint() - DMatrix::<C64>::identity(n, n)));
        if !(deviation <= UNITARY_TOL) {
            return Err(Error::NotSpecialUnitary { deviation });
        }
        Ok(Self(m))
    }

    /// Unitary with determinant one.
    pub fn special(m: DMatrix<C64>) -> Result<Self> {
        let u = Self::unitary(m)?;
        let deviation = (u.0.determinant() - C64::new(1.0, 0.0)).norm();
        if !(deviation <= UNITARY_TOL) {
            return Err(Error::NotSpecialUnitary { deviation });
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    /// `ω·I` for a scalar of modulus one.
    pub fn scalar(n: usize, omega: C64) -> Self {
        Self(DMatrix::from_diagonal_element(n, n, omega))
    }

    /// `diag(e^{iθ_1}, …, e^{iθ_n})`.
    pub fn diagonal(angles: &[f64]) -> Self {
        let d: Vec<C64> = angles.iter().map(|&t| C64::from_polar(1.0, t)).collect();
        Self(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn determinant(&self) -> C64 {
        self.0.determinant()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        max_abs(&(&self.0 - &other.0))
    }
}

impl SpacePoint for UnitaryMatrix {
    fn coincides(&self, other: &Self) -> bool {
        self.n() == other.n() && self.distance(other) <= UNITARY_TOL
    }
}

/// The centre `{ω^k I}` of SU(n), `ω = e^{2πi/n}`.
pub fn center(n: usize) -> Vec<UnitaryMatrix> {
    (0..n)
        .map(|k| UnitaryMatrix::scalar(n, C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)))
        .collect()
}

pub(crate) fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Haar-distributed element of U(n): QR of a complex Ginibre matrix with
/// the phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let g = DMatrix::<C64>::from_fn(n, n, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng)) / 2f64.sqrt()
    });
    let (mut q, r) = g.qr().unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix(q)
}

/// Haar-distributed element of SU(n).
pub fn random_special_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> UnitaryMatrix {
    let u = random_unitary(n, rng);
    let det = u.determinant();
    let root = C64::from_polar(1.0, -det.arg() / n as f64);
    UnitaryMatrix(u.0 * root)
}

/// The metric `⟨X, Y⟩ = -scale·Re tr(XY)` on the Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiInvariantMetric {
    scale: f64,
}

impl BiInvariantMetric {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidInput("metric scale must be positive".into()));
        }
        Ok(Self { scale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Group length of a unit torus length in `s` coordinates with Gram `I + J`.
    pub fn length_factor(&self) -> f64 {
        2.0 * PI * self.scale.sqrt()
    }
}

impl Default for BiInvariantMetric {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

/// An unordered pair `{k1, k2}` of elements of SU(n).
#[derive(Clone, Debug)]
pub struct GroupConfiguration {
    k1: UnitaryMatrix,
    k2: UnitaryMatrix,
    relative: UnitaryMatrix,
}

impl GroupConfiguration {
    pub fn new(k1: UnitaryMatrix, k2: UnitaryMatrix) -> Result<Self> {
        if k1.n() != k2.n() {
            return Err(Error::DimensionMismatch {
                expected: k1.n(),
                found: k2.n(),
            });
        }
        if k1.n() < 2 || k1.n() > MAX_N {
            return Err(Error::InvalidInput(format!(
                "SU(n) is supported for 2 <= n <= {MAX_N}"
            )));
        }
        let k1 = UnitaryMatrix::special(k1.0)?;
        let k2 = UnitaryMatrix::special(k2.0)?;
        let relative = k1.adjoint().mul(&k2);
        Ok(Self { k1, k2, relative })
    }

    pub fn k1(&self) -> &UnitaryMatrix {
        &self.k1
    }

    pub fn k2(&self) -> &UnitaryMatrix {
        &self.k2
    }

    /// `k1⁻¹·k2`
    pub fn relative(&self) -> &UnitaryMatrix {
        &self.relative
    }

    pub fn n(&self) -> usize {
        self.k1.n()
    }
}

/// Eigenvalues and orthonormal eigenvectors of a unitary matrix, eigenpairs
/// sorted by decreasing angle in `(-π, π]`.
fn eigen(u: &UnitaryMatrix) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = u.n();
    let schur = nalgebra::linalg::Schur::try_new(u.0.clone(), 1e-14, 100_000)
        .ok_or_else(|| Error::InvalidInput("eigendecomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut pairs: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let a = t[(j, j)].arg();
            (if a <= -PI { a + 2.0 * PI } else { a }, j)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let angles = pairs.iter().map(|p| p.0).collect();
    let mut frame = DMatrix::<C64>::zeros(n, n);
    for (col, &(_, j)) in pairs.iter().enumerate() {
        let v = q.column(j);
        let lead = v.iter().find(|z| z.norm() > 1e-8).copied().unwrap_or(C64::new(1.0, 0.0));
        let phase = lead.conj() / lead.norm();
        for i in 0..n {
            frame[(i, col)] = v[i] * phase;
        }
    }
    Ok((angles, frame))
}

/// Cluster sizes of the eigenvalues on the unit circle. Fails when a gap is
/// within the guard band around the threshold.
fn multiplicities(angles: &[f64]) -> Result<Vec<usize>> {
    let n = angles.len();
    let point = |a: f64| C64::from_polar(1.0, a);
    // angles are sorted, so neighbours on the circle are consecutive
    let gaps: Vec<f64> = (0..n)
        .map(|i| (point(angles[i]) - point(angles[(i + 1) % n])).norm())
        .collect();
    for &g in &gaps {
        if g >= CLUSTER_THRESHOLD / GUARD_FACTOR && g <= CLUSTER_THRESHOLD * GUARD_FACTOR {
            return Err(Error::IllConditioned { gap: g });
        }
    }
    let joined: Vec<bool> = gaps.iter().map(|&g| g < CLUSTER_THRESHOLD).collect();
    if joined.iter().all(|&j| j) {
        return Ok(vec![n]);
    }
    // start after a break so a cluster straddling the wrap is counted once
    let start = (0..n).find(|&i| !joined[i]).expect("some break") + 1;
    let mut sizes = Vec::new();
    let mut current = 0;
    for k in 0..n {
        let i = (start + k) % n;
        current += 1;
        if !joined[i] {
            sizes.push(current);
            current = 0;
        }
    }
    Ok(sizes)
}

/// `dim centralizer(k1⁻¹k2) − rank = Σ m_j² − 1 − (n − 1)`.
pub fn defect(cfg: &GroupConfiguration) -> Result<usize> {
    let (angles, _) = eigen(&cfg.relative)?;
    let m = multiplicities(&angles)?;
    let n = cfg.n();
    Ok(m.iter().map(|k| k * k).sum::<usize>() - 1 - (n - 1))
}

/// The maximal torus through a regular element.
#[derive(Clone, Debug)]
pub struct TorusCoordinates {
    pub frame: UnitaryMatrix,
    /// Decreasing, in `(-π, π]`.
    pub angles: Vec<f64>,
    /// `Z^{n-1}` with Gram `I + J`; multiply lengths by the metric's
    /// length factor.
    pub log_lattice: Arc<Lattice>,
}

impl TorusCoordinates {
    /// `frame·exp(H(s))·frame*`
    pub fn element(&self, s: &[f64]) -> UnitaryMatrix {
        let mut angles: Vec<f64> = s.iter().map(|v| 2.0 * PI * v).collect();
        angles.push(-angles.iter().sum::<f64>());
        let d = UnitaryMatrix::diagonal(&angles);
        self.frame.mul(&d).mul(&self.frame.adjoint())
    }

    /// `s_j = θ_j / 2π`, `j < n`, as exact rationals.
    pub fn s_coordinates(&self) -> Result<RationalVector> {
        let n = self.angles.len();
        Ok(RationalVector::new(
            self.angles[..n - 1]
                .iter()
                .map(|a| rational_from_f64(a / (2.0 * PI)))
                .collect::<Result<_>>()?,
        ))
    }
}

pub fn log_lattice(n: usize) -> Lattice {
    let m = n - 1;
    let gram: Vec<Vec<crate::lattice::Rational>> = (0..m)
        .map(|i| (0..m).map(|j| crate::lattice::int(if i == j { 2 } else { 1 })).collect())
        .collect();
    Lattice::new(
        RationalMatrix::identity(m),
        RationalMatrix::from_rows(gram).expect("square"),
    )
    .expect("I + J is positive definite")
}

pub fn torus_coordinates(k: &UnitaryMatrix) -> Result<TorusCoordinates> {
    let n = k.n();
    if n < 2 {
        return Err(Error::InvalidInput("need n >= 2".into()));
    }
    let (angles, frame) = eigen(k)?;
    if multiplicities(&angles)?.len() != n {
        return Err(Error::NotRegular);
    }
    Ok(TorusCoordinates {
        frame: UnitaryMatrix(frame),
        angles,
        log_lattice: Arc::new(log_lattice(n)),
    })
}

/// The flat torus carrying every connecting geodesic of a regular pair.
#[derive(Clone, Debug)]
pub struct GroupTorus {
    pub k1: UnitaryMatrix,
    pub coordinates: TorusCoordinates,
    /// `{0, s}` with `s` the torus coordinates of `k1⁻¹k2`.
    pub config: TorusConfiguration,
    pub metric: BiInvariantMetric,
}

impl GroupTorus {
    pub fn new(cfg: &GroupConfiguration, metric: BiInvariantMetric) -> Result<Self> {
        let d = defect(cfg)?;
        if d != 0 {
            return Err(Error::SingularConfiguration { defect: d });
        }
        let coordinates = torus_coordinates(&cfg.relative)?;
        let lattice = &coordinates.log_lattice;
        let s = coordinates.s_coordinates()?;
        let config = TorusConfiguration::new(
            reduce(&RationalVector::zeros(lattice.dim()), lattice)?,
            reduce(&s, lattice)?,
        )?;
        Ok(Self {
            k1: cfg.k1.clone(),
            coordinates,
            config,
            metric,
        })
    }

    pub fn element(&self, s: &[f64]) -> UnitaryMatrix {
        self.k1.mul(&self.coordinates.element(s))
    }

    pub fn length(&self, g: &TorusGeodesic) -> f64 {
        self.metric.length_factor() * crate::lattice::to_f64(&g.length_sq).sqrt()
    }
}

/// A group geodesic `t ↦ k1·frame·exp(t·H)·frame*`, `t ∈ [0, 1]`.
#[derive(Clone, Debug)]
pub struct GroupGeodesic {
    pub torus: TorusGeodesic,
    pub length: f64,
}

#[derive(Clone, Debug)]
pub struct GroupGeodesicFamily {
    pub reduction: GroupTorus,
    pub torus_family: GeodesicFamily,
    pub geodesics: Vec<GroupGeodesic>,
}

impl GroupGeodesicFamily {
    pub fn point_at(&self, g: &GroupGeodesic, t: f64) -> UnitaryMatrix {
        let s: Vec<f64> = g
            .torus
            .base
            .to_f64()
            .iter()
            .zip(g.torus.displacement.to_f64())
            .map(|(b, d)| b + t * d)
            .collect();
        self.reduction.element(&s)
    }

    pub fn len(&self) -> usize {
        self.geodesics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.geodesics.is_empty()
    }
}

/// Connecting geodesics of a regular pair with group length at most `bound`.
pub fn group_geodesics(
    cfg: &GroupConfiguration,
    bound: f64,
    metric: BiInvariantMetric,
) -> Result<GroupGeodesicFamily> {
    let reduction = GroupTorus::new(cfg, metric)?;
    let torus_bound = LengthBound::from_f64(bound / metric.length_factor())?;
    let torus_family = connecting_geodesics(&reduction.config, &torus_bound);
    let geodesics = torus_family
        .geodesics
        .iter()
        .map(|g| GroupGeodesic {
            torus: g.clone(),
            length: reduction.length(g),
        })
        .collect();
    Ok(GroupGeodesicFamily {
        reduction,
        torus_family,
        geodesics,
    })
}

/// The `2^{n-1}` torus midpoints carried into the group, i.e. `k1` times the
/// square roots of `k1⁻¹k2` in its maximal torus. The certificate is the
/// torus one.
pub fn group_blocking_set(cfg: &GroupConfiguration) -> Result<(GroupTorus, BlockingSet<UnitaryMatrix>)> {
    let reduction = GroupTorus::new(cfg, BiInvariantMetric::default())?;
    let torus_set = match verify_universal(&reduction.config, &midpoint_set(&reduction.config))? {
        UniversalCheck::Certified(b) => b,
        UniversalCheck::Violation { .. } => unreachable!("the midpoint set is universal"),
    };
    debug_assert_eq!(*torus_set.certificate(), Certificate::Universal);
    let set = torus_set.map_points(|p| reduction.element(&p.rep().to_f64()));
    Ok((reduction, set))
}

/// S³ coordinates of `[[a, -b̄], [b, ā]]`.
pub fn su2_to_s3(u: &UnitaryMatrix) -> Result<SpherePoint> {
    if u.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.n(),
        });
    }
    let a = u.0[(0, 0)];
    let b = u.0[(1, 0)];
    SpherePoint::normalized(vec![a.re, a.im, b.re, b.im])
}

pub fn s3_to_su2(p: &SpherePoint) -> Result<UnitaryMatrix> {
    let c = p.coordinates();
    if c.len() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: c.len(),
        });
    }
    let a = C64::new(c[0], c[1]);
    let b = C64::new(c[2], c[3]);
    UnitaryMatrix::special(DMatrix::from_row_slice(2, 2, &[a, -b.conj(), b, a.conj()]))
}

fn central_scalar(cfg: &GroupConfiguration) -> Option<C64> {
    let r = &cfg.relative.0;
    let omega = r[(0, 0)];
    let n = cfg.n();
    let is_scalar = (0..n).all(|i| {
        (0..n).all(|j| {
            let expect = if i == j { omega } else { C64::new(0.0, 0.0) };
            (r[(i, j)] - expect).norm() <= CLUSTER_THRESHOLD
        })
    });
    is_scalar.then_some(omega)
}

/// Security of `{k1, k2}`.
pub fn classify_group_config(cfg: &GroupConfiguration) -> Result<SecurityVerdict<UnitaryMatrix>> {
    let d = defect(cfg)?;
    if d == 0 {
        let (_, set) = group_blocking_set(cfg)?;
        return Ok(SecurityVerdict {
            status: SecurityStatus::Secure,
            reason: VerdictReason::RegularPair,
            blocking: Some(set),
            witness: None,
            note: None,
        });
    }
    if central_scalar(cfg).is_some() {
        if cfg.n() == 2 {
            let s3 = RankOneSpace::sphere(3)?;
            let v = classify(&s3, &su2_to_s3(&cfg.k1)?, &su2_to_s3(&cfg.k2)?)?;
            let blocking = match &v.blocking {
                Some(b) => {
                    let mapped: Result<Vec<UnitaryMatrix>> =
                        b.points().iter().map(s3_to_su2).collect();
                    mapped?;
                    Some(b.map_points(|p| s3_to_su2(p).expect("checked above")))
                }
                None => None,
            };
            return Ok(SecurityVerdict {
                status: v.status,
                reason: v.reason,
                blocking,
                witness: None,
                note: v.note,
            });
        }
        return Ok(SecurityVerdict::bare(
            SecurityStatus::Undetermined,
            VerdictReason::ClassificationTable,
            Some("some central translate {k, z·k} is insecure; which z is not determined".into()),
        ));
    }
    Ok(SecurityVerdict::bare(
        SecurityStatus::Undetermined,
        VerdictReason::ClassificationTable,
        Some(format!("singular configuration with defect {d}")),
    ))
}
