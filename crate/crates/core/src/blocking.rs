//! Blocking sets shared by every space model.

use crate::lattice::{LengthBound, TorusPoint};

/// Point types that can decide whether two values denote the same point.
pub trait SpacePoint: Clone {
    fn coincides(&self, other: &Self) -> bool;
}

impl SpacePoint for TorusPoint {
    fn coincides(&self, other: &Self) -> bool {
        self == other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    CanonicalMidpoint,
    OptimizerOutput,
    Manual,
    Transferred,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::CanonicalMidpoint => "canonical_midpoint",
            Provenance::OptimizerOutput => "optimizer_output",
            Provenance::Manual => "manual",
            Provenance::Transferred => "transferred",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// Blocks every connecting geodesic, with no length bound.
    Universal,
    /// Blocks every connecting geodesic of length at most the bound.
    BoundedLength(LengthBound),
    None,
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Universal => "universal",
            Certificate::BoundedLength(_) => "bounded_length",
            Certificate::None => "none",
        }
    }
}

/// A finite set of pairwise distinct points with its origin and the
/// strongest certificate established for it.
///
/// Certificates are only attached by the verifiers in this crate.
#[derive(Clone, Debug)]
pub struct BlockingSet<P> {
    points: Vec<P>,
    provenance: Provenance,
    certificate: Certificate,
}

impl<P: SpacePoint> BlockingSet<P> {
    /// Collects `points`, dropping repeats; the certificate starts as `None`.
    pub fn new(points: impl IntoIterator<Item = P>, provenance: Provenance) -> Self {
        let mut kept: Vec<P> = Vec::new();
        for p in points {
            if !kept.iter().any(|q| q.coincides(&p)) {
                kept.push(p);
            }
        }
        Self {
            points: kept,
            provenance,
            certificate: Certificate::None,
        }
    }

    pub fn empty(provenance: Provenance) -> Self {
        Self::new(Vec::new(), provenance)
    }

    pub fn contains(&self, p: &P) -> bool {
        self.points.iter().any(|q| q.coincides(p))
    }

    pub fn without(&self, index: usize) -> Self {
        let mut points = self.points.clone();
        points.remove(index);
        Self {
            points,
            provenance: self.provenance,
            certificate: Certificate::None,
        }
    }
}

impl<P> BlockingSet<P> {
    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    pub(crate) fn with_certificate(mut self, certificate: Certificate) -> Self {
        self.certificate = certificate;
        self
    }

    /// Maps points to another model, keeping the certificate. Only for
    /// maps that are isometries onto the image family.
    pub(crate) fn map_points<Q>(&self, f: impl FnMut(&P) -> Q) -> BlockingSet<Q> {
        BlockingSet {
            points: self.points.iter().map(f).collect(),
            provenance: self.provenance,
            certificate: self.certificate.clone(),
        }
    }
}
