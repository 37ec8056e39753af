//! Certified minimum blocking sets for length-bounded torus families.
//!
//! A blocker that meets two transversal geodesics sits at one of their
//! finitely many intersection points; one that meets a single geodesic can
//! be slid to that geodesic's midpoint. Geodesics running along a common
//! closed geodesic overlap in intervals, so for those the candidates are the
//! breakpoints and cells of the induced arrangement on the circle. The
//! resulting finite hitting-set instance is solved exactly by branch and
//! bound.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::blocking::{BlockingSet, Certificate, Provenance};
use crate::error::{Error, Result};
use crate::lattice::{frac, int, rat, LengthBound, Rational, TorusPoint};
use crate::torus::{
    check_family, connecting_geodesics, has_interior_param, midpoint_set, BoundedCheck,
    GeodesicFamily, TorusConfiguration,
};

pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateBlocker {
    pub point: TorusPoint,
    /// Indices into the family, ascending.
    pub covers: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct HittingInstance {
    pub family: GeodesicFamily,
    pub candidates: Vec<CandidateBlocker>,
}

impl HittingInstance {
    pub fn new(family: GeodesicFamily) -> Self {
        let candidates = candidate_blockers(&family);
        Self { family, candidates }
    }

    /// Adds further candidate points; their covers are computed exactly.
    pub fn with_extra_points(mut self, points: impl IntoIterator<Item = TorusPoint>) -> Self {
        let segs = segments(&self.family);
        for p in points {
            let q = p.lattice_coords();
            let covers = covers_of(&segs, &q);
            if !covers.is_empty() {
                self.candidates.push(CandidateBlocker { point: p, covers });
            }
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LowerBoundProof {
    /// The search tree was exhausted without finding a smaller set.
    ExhaustedSearch { nodes: u64 },
    /// Geodesics no single candidate meets twice; each needs its own blocker.
    DisjointGeodesics(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct OptimalityCertificate {
    pub optimum: usize,
    pub witness: BlockingSet<TorusPoint>,
    pub lower_bound_proof: LowerBoundProof,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub node_budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

/// A segment in lattice coordinates: `offset + t·direction`, with an `f64`
/// shadow used only to discard points that are clearly off the segment.
struct Seg {
    offset: Vec<Rational>,
    direction: Vec<Rational>,
    offset_f: Vec<f64>,
    direction_f: Vec<f64>,
    pivot: usize,
}

/// Slack for the floating-point rejection test; true hits have error
/// many orders of magnitude below this at desk-scale coordinates.
const REJECT_SLACK: f64 = 1e-7;

impl Seg {
    fn new(offset: Vec<Rational>, direction: Vec<Rational>) -> Self {
        let offset_f: Vec<f64> = offset.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        let direction_f: Vec<f64> = direction.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
        let pivot = (0..direction.len())
            .filter(|&i| !direction[i].is_zero())
            .min_by(|&a, &b| direction[a].abs().cmp(&direction[b].abs()))
            .expect("nonzero direction");
        Self {
            offset,
            direction,
            offset_f,
            direction_f,
            pivot,
        }
    }

    /// `false` only when no `t ∈ (0,1)` can put `q` on the segment.
    fn may_pass(&self, q: &[f64]) -> bool {
        let near_int = |v: f64| (v - v.round()).abs() < REJECT_SLACK;
        let p = self.pivot;
        let a = self.offset_f[p] - q[p];
        let e = self.direction_f[p];
        if !(a.is_finite() && e.is_finite()) || e.abs() > 1e6 {
            return true;
        }
        let (lo, hi) = if e > 0.0 { (a, a + e) } else { (a + e, a) };
        let mut k = (lo - REJECT_SLACK).floor();
        while k <= hi + REJECT_SLACK {
            let t = (k - a) / e;
            if t > -REJECT_SLACK && t < 1.0 + REJECT_SLACK {
                let fits = (0..q.len()).all(|i| {
                    i == p || near_int(self.offset_f[i] - q[i] + t * self.direction_f[i])
                });
                if fits {
                    return true;
                }
            }
            k += 1.0;
        }
        false
    }

    fn passes(&self, q: &[Rational], q_f: &[f64]) -> bool {
        if !self.may_pass(q_f) {
            return false;
        }
        let shifted: Vec<Rational> = self.offset.iter().zip(q).map(|(a, b)| a - b).collect();
        has_interior_param(&shifted, &self.direction)
    }
}

fn segments(family: &GeodesicFamily) -> Vec<Seg> {
    let lattice = family.config.lattice();
    family
        .geodesics
        .iter()
        .map(|g| {
            Seg::new(
                lattice.to_lattice_coords(&g.base),
                lattice.to_lattice_coords(&g.displacement),
            )
        })
        .collect()
}

fn covers_of(segs: &[Seg], q: &[Rational]) -> Vec<usize> {
    let q_f: Vec<f64> = q.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    segs.iter()
        .enumerate()
        .filter(|(_, s)| s.passes(q, &q_f))
        .map(|(i, _)| i)
        .collect()
}

fn reduced(v: &[Rational]) -> Vec<Rational> {
    v.iter().map(frac).collect()
}

fn point_on(seg: &Seg, t: &Rational) -> Vec<Rational> {
    seg.offset
        .iter()
        .zip(&seg.direction)
        .map(|(a, e)| a + t * e)
        .collect()
}

fn independent_rows(e1: &[Rational], e2: &[Rational]) -> Option<(usize, usize)> {
    let n = e1.len();
    for r in 0..n {
        for s in r + 1..n {
            if &e1[r] * &e2[s] != &e1[s] * &e2[r] {
                return Some((r, s));
            }
        }
    }
    None
}

fn int_range(lo: &Rational, hi: &Rational) -> std::ops::RangeInclusive<i64> {
    let l = lo.ceil().to_integer().to_i64().unwrap_or(i64::MIN);
    let h = hi.floor().to_integer().to_i64().unwrap_or(i64::MAX);
    l..=h
}

/// Interior crossing points of two transversal segments, reduced mod 1.
fn transversal_intersections(s1: &Seg, s2: &Seg, rows: (usize, usize)) -> Vec<Vec<Rational>> {
    let (r1, r2) = rows;
    let e1 = &s1.direction;
    let e2 = &s2.direction;
    let c: Vec<Rational> = s2.offset.iter().zip(&s1.offset).map(|(b, a)| b - a).collect();
    // t e1 - s e2 - c ∈ Z^n; range of each row over the closed unit square
    let range = |r: usize| {
        let zero = Rational::zero();
        let lo = (&e1[r]).min(&zero) - (&e2[r]).max(&zero) - &c[r];
        let hi = (&e1[r]).max(&zero) - (&e2[r]).min(&zero) - &c[r];
        int_range(&lo, &hi)
    };
    let det = &e2[r1] * &e1[r2] - &e1[r1] * &e2[r2];
    let one = Rational::one();
    let mut out = Vec::new();
    let f = |x: &Rational| x.to_f64().unwrap_or(f64::NAN);
    let (e1r1, e1r2, e2r1, e2r2) = (f(&e1[r1]), f(&e1[r2]), f(&e2[r1]), f(&e2[r2]));
    let (c1, c2, det_f) = (f(&c[r1]), f(&c[r2]), f(&det));
    let inside = |v: f64| v > -REJECT_SLACK && v < 1.0 + REJECT_SLACK;
    for k1 in range(r1) {
        let b1 = &c[r1] + int(k1);
        for k2 in range(r2) {
            let (b1f, b2f) = (c1 + k1 as f64, c2 + k2 as f64);
            let t_f = (e2r1 * b2f - e2r2 * b1f) / det_f;
            let s_f = (e1r1 * b2f - e1r2 * b1f) / det_f;
            if t_f.is_finite() && s_f.is_finite() && !(inside(t_f) && inside(s_f)) {
                continue;
            }
            let b2 = &c[r2] + int(k2);
            let t = (&e2[r1] * &b2 - &e2[r2] * &b1) / &det;
            if !t.is_positive() || t >= one {
                continue;
            }
            let s = (&e1[r1] * &b2 - &e1[r2] * &b1) / &det;
            if !s.is_positive() || s >= one {
                continue;
            }
            let consistent = (0..e1.len()).all(|r| {
                r == r1 || r == r2 || (&t * &e1[r] - &s * &e2[r] - &c[r]).is_integer()
            });
            if consistent {
                out.push(reduced(&point_on(s1, &t)));
            }
        }
    }
    out
}

fn primitive_direction(e: &[Rational]) -> Vec<BigInt> {
    let l = e
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let v: Vec<BigInt> = e.iter().map(|x| x.numer() * (&l / x.denom())).collect();
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut u: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    if u.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in &mut u {
            *x = -x.clone();
        }
    }
    u
}

/// Closed geodesic through a segment: its primitive direction, canonical
/// reference point, and the segment as an interval `(tau, tau + alpha)` in
/// the period-one parameter of that closed geodesic.
struct CircleArc {
    direction: Vec<BigInt>,
    reference: Vec<Rational>,
    tau: Rational,
    alpha: Rational,
}

fn circle_arc(seg: &Seg) -> CircleArc {
    let u = primitive_direction(&seg.direction);
    let i0 = u.iter().position(|x| !x.is_zero()).expect("nonzero direction");
    let u_q: Vec<Rational> = u.iter().map(|x| Rational::from_integer(x.clone())).collect();
    let width = u[i0].abs().to_i64().expect("small direction");
    let mut best: Option<(Vec<Rational>, Rational)> = None;
    for k in 0..width {
        let tau_k = (int(k) - &seg.offset[i0]) / &u_q[i0];
        let p: Vec<Rational> = seg
            .offset
            .iter()
            .zip(&u_q)
            .map(|(a, ui)| frac(&(a + &tau_k * ui)))
            .collect();
        if best.as_ref().map_or(true, |(b, _)| p < *b) {
            best = Some((p, tau_k));
        }
    }
    let (reference, tau_k) = best.expect("at least one crossing");
    let alpha = &seg.direction[i0] / &u_q[i0];
    CircleArc {
        direction: u,
        reference,
        tau: frac(&-tau_k),
        alpha,
    }
}

fn arrangement_points(members: &[&CircleArc]) -> Vec<Vec<Rational>> {
    let mut breaks: Vec<Rational> = members
        .iter()
        .flat_map(|a| [frac(&a.tau), frac(&(&a.tau + &a.alpha))])
        .collect();
    breaks.sort();
    breaks.dedup();
    let mut taus = breaks.clone();
    let half = rat(1, 2);
    for (i, b) in breaks.iter().enumerate() {
        let next = if i + 1 < breaks.len() {
            breaks[i + 1].clone()
        } else {
            &breaks[0] + int(1)
        };
        taus.push(frac(&((b + &next) * &half)));
    }
    let reference = &members[0].reference;
    let u: Vec<Rational> = members[0]
        .direction
        .iter()
        .map(|x| Rational::from_integer(x.clone()))
        .collect();
    taus.iter()
        .map(|t| {
            reference
                .iter()
                .zip(&u)
                .map(|(r, ui)| frac(&(r + t * ui)))
                .collect()
        })
        .collect()
}

/// Finite candidate set preserving the minimum blocking-set size.
///
/// Order: midpoints, then transversal intersections by pair, then
/// arrangement points; repeats of a cover set keep the first occurrence.
pub fn candidate_blockers(family: &GeodesicFamily) -> Vec<CandidateBlocker> {
    let segs = segments(family);
    let mut points: Vec<Vec<Rational>> = Vec::new();
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut push = |p: Vec<Rational>, points: &mut Vec<Vec<Rational>>| {
        if seen.insert(p.clone()) {
            points.push(p);
        }
    };

    let half = rat(1, 2);
    for s in &segs {
        push(reduced(&point_on(s, &half)), &mut points);
    }
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            if let Some(rows) = independent_rows(&segs[i].direction, &segs[j].direction) {
                for p in transversal_intersections(&segs[i], &segs[j], rows) {
                    push(p, &mut points);
                }
            }
        }
    }
    // overlapping geodesics on a common closed geodesic
    let arcs: Vec<CircleArc> = segs.iter().map(circle_arc).collect();
    let mut circles: BTreeMap<(Vec<BigInt>, Vec<Rational>), Vec<&CircleArc>> = BTreeMap::new();
    for a in &arcs {
        circles
            .entry((a.direction.clone(), a.reference.clone()))
            .or_default()
            .push(a);
    }
    for members in circles.values().filter(|m| m.len() > 1) {
        for p in arrangement_points(members) {
            push(p, &mut points);
        }
    }

    let lattice = family.config.lattice();
    let mut by_cover: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for q in points {
        let covers = covers_of(&segs, &q);
        if covers.is_empty() || !by_cover.insert(covers.clone()) {
            continue;
        }
        out.push(CandidateBlocker {
            point: TorusPoint::from_lattice_coords(&q, lattice),
            covers,
        });
    }
    out
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn zeros(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn ones(n: usize) -> Self {
        let mut b = Self::zeros(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
    fn count_and(&self, other: &Bits) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a & b).count_ones()).sum()
    }
    fn intersects(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }
    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn minus(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            (0..64).filter(move |b| word >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }
}

struct Solver {
    covers: Vec<Bits>,
    /// Candidates covering each geodesic, in preference order.
    cands_of: Vec<Vec<usize>>,
    conflict: Vec<Bits>,
    /// Geodesics ordered by conflict degree for the packing bound.
    packing_order: Vec<usize>,
    /// Rank of each candidate in lexicographic point order.
    point_rank: Vec<usize>,
    excluded: Vec<bool>,
    nodes: u64,
    budget: u64,
    best: Vec<usize>,
}

impl Solver {
    fn packing(&self, uncovered: &Bits) -> Vec<usize> {
        let mut picked = Bits::zeros(self.conflict.len());
        let mut out = Vec::new();
        for &g in &self.packing_order {
            if uncovered.get(g) && !self.conflict[g].intersects(&picked) {
                picked.set(g);
                out.push(g);
            }
        }
        out
    }

    fn greedy(&self, mut uncovered: Bits) -> Vec<usize> {
        let mut chosen = Vec::new();
        while !uncovered.is_empty() {
            let best = (0..self.covers.len())
                .filter(|&c| !self.excluded[c])
                .max_by(|&a, &b| {
                    self.covers[a]
                        .count_and(&uncovered)
                        .cmp(&self.covers[b].count_and(&uncovered))
                        .then(self.point_rank[b].cmp(&self.point_rank[a]))
                })
                .expect("every geodesic has a candidate");
            uncovered = uncovered.minus(&self.covers[best]);
            chosen.push(best);
        }
        chosen
    }

    fn search(&mut self, uncovered: &Bits, chosen: &mut Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExhausted {
                budget: self.budget,
            });
        }
        if uncovered.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return Ok(());
        }
        if chosen.len() + 1 >= self.best.len() {
            return Ok(());
        }
        if chosen.len() + self.packing(uncovered).len() >= self.best.len() {
            return Ok(());
        }
        // branch on the uncovered geodesic with the fewest live candidates
        let mut target: Option<(usize, usize)> = None;
        for g in uncovered.iter() {
            let live = self.cands_of[g].iter().filter(|&&c| !self.excluded[c]).count();
            if target.map_or(true, |(_, n)| live < n) {
                target = Some((g, live));
            }
        }
        let (g, live) = target.expect("nonempty");
        if live == 0 {
            return Ok(());
        }
        let mut options: Vec<usize> = self.cands_of[g]
            .iter()
            .copied()
            .filter(|&c| !self.excluded[c])
            .collect();
        options.sort_by(|&a, &b| {
            self.covers[b]
                .count_and(uncovered)
                .cmp(&self.covers[a].count_and(uncovered))
                .then(self.point_rank[a].cmp(&self.point_rank[b]))
        });
        let mut tried = Vec::new();
        let mut outcome = Ok(());
        for c in options {
            chosen.push(c);
            let rest = uncovered.minus(&self.covers[c]);
            outcome = self.search(&rest, chosen);
            chosen.pop();
            if outcome.is_err() {
                break;
            }
            self.excluded[c] = true;
            tried.push(c);
        }
        for c in tried {
            self.excluded[c] = false;
        }
        outcome
    }
}

struct Solved {
    best: Vec<usize>,
    root_packing: Vec<usize>,
    nodes: u64,
}

impl Solved {
    fn proof(self) -> LowerBoundProof {
        if self.root_packing.len() == self.best.len() {
            LowerBoundProof::DisjointGeodesics(self.root_packing)
        } else {
            LowerBoundProof::ExhaustedSearch { nodes: self.nodes }
        }
    }
}

/// Minimum cover of geodesics `0..m` by the given candidate cover lists.
/// Ties are broken by `point_rank`.
fn solve_covers(
    m: usize,
    cover_lists: &[Vec<usize>],
    point_rank: &[usize],
    budget: u64,
) -> Result<Solved> {
    let covers: Vec<Bits> = cover_lists
        .iter()
        .map(|list| {
            let mut b = Bits::zeros(m);
            for &g in list {
                b.set(g);
            }
            b
        })
        .collect();
    let mut cands_of: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (c, list) in cover_lists.iter().enumerate() {
        for &g in list {
            cands_of[g].push(c);
        }
    }
    if let Some(g) = cands_of.iter().position(Vec::is_empty) {
        return Err(Error::InvalidInput(format!(
            "geodesic {g} has no candidate blocker"
        )));
    }

    // drop candidates whose cover is contained in another's
    let mut excluded = vec![false; cover_lists.len()];
    for a in 0..cover_lists.len() {
        let first = cover_lists[a][0];
        excluded[a] = cands_of[first].iter().any(|&b| {
            b != a
                && !excluded[b]
                && covers[a].is_subset(&covers[b])
                && (!covers[b].is_subset(&covers[a]) || b < a)
        });
    }

    let mut conflict = vec![Bits::zeros(m); m];
    for (c, list) in cover_lists.iter().enumerate() {
        if excluded[c] {
            continue;
        }
        for &g in list {
            for &h in list {
                conflict[g].set(h);
            }
        }
    }
    let mut packing_order: Vec<usize> = (0..m).collect();
    packing_order.sort_by_key(|&g| (conflict[g].iter().count(), g));

    let mut solver = Solver {
        covers,
        cands_of,
        conflict,
        packing_order,
        point_rank: point_rank.to_vec(),
        excluded,
        nodes: 0,
        budget,
        best: Vec::new(),
    };
    let all = Bits::ones(m);
    solver.best = solver.greedy(all.clone());
    let root_packing = solver.packing(&all);
    if root_packing.len() < solver.best.len() {
        solver.search(&all, &mut Vec::new())?;
    }
    Ok(Solved {
        best: solver.best,
        root_packing,
        nodes: solver.nodes,
    })
}

/// Exact minimum hitting set of the family by the candidate covers.
pub fn min_hitting_set(
    instance: &HittingInstance,
    options: &SearchOptions,
) -> Result<OptimalityCertificate> {
    let family = &instance.family;
    let m = family.len();
    let cands = &instance.candidates;
    if m == 0 {
        let witness = BlockingSet::empty(Provenance::OptimizerOutput)
            .with_certificate(Certificate::BoundedLength(family.length_bound.clone()));
        return Ok(OptimalityCertificate {
            optimum: 0,
            witness,
            lower_bound_proof: LowerBoundProof::DisjointGeodesics(Vec::new()),
            nodes: 0,
        });
    }
    let mut rank: Vec<usize> = (0..cands.len()).collect();
    rank.sort_by(|&a, &b| cands[a].point.cmp(&cands[b].point));
    let mut point_rank = vec![0; cands.len()];
    for (r, &c) in rank.iter().enumerate() {
        point_rank[c] = r;
    }

    let cover_lists: Vec<Vec<usize>> = cands.iter().map(|c| c.covers.clone()).collect();
    let solved = solve_covers(m, &cover_lists, &point_rank, options.node_budget)?;
    let optimum = solved.best.len();
    let mut points: Vec<TorusPoint> = solved.best.iter().map(|&c| cands[c].point.clone()).collect();
    points.sort();
    let witness = BlockingSet::new(points, Provenance::OptimizerOutput);
    match check_family(family, witness.points())? {
        BoundedCheck::Blocked => {}
        BoundedCheck::Unblocked(_) => {
            return Err(Error::InvalidInput(
                "candidate covers do not match the family".into(),
            ))
        }
    }
    let witness = witness.with_certificate(Certificate::BoundedLength(family.length_bound.clone()));
    let nodes = solved.nodes;
    let lower_bound_proof = solved.proof();
    Ok(OptimalityCertificate {
        optimum,
        witness,
        lower_bound_proof,
        nodes,
    })
}

/// Builds the instance for one bound and solves it.
pub fn min_block(
    cfg: &TorusConfiguration,
    bound: &LengthBound,
    options: &SearchOptions,
) -> Result<OptimalityCertificate> {
    let instance = HittingInstance::new(connecting_geodesics(cfg, bound));
    min_hitting_set(&instance, options)
}

#[derive(Clone, Debug)]
pub struct ProfileEntry {
    pub bound: LengthBound,
    pub family_size: usize,
    pub result: Result<OptimalityCertificate>,
}

/// Minimum blocking-set sizes at increasing length bounds.
pub fn security_profile(
    cfg: &TorusConfiguration,
    bounds: &[LengthBound],
    options: &SearchOptions,
) -> Result<Vec<ProfileEntry>> {
    if bounds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("bounds must be increasing".into()));
    }
    let ceiling = midpoint_set(cfg).len();
    let mut out = Vec::with_capacity(bounds.len());
    for bound in bounds {
        let family = connecting_geodesics(cfg, bound);
        let family_size = family.len();
        let result = min_hitting_set(&HittingInstance::new(family), options);
        if let Ok(cert) = &result {
            debug_assert!(cert.optimum <= ceiling);
        }
        out.push(ProfileEntry {
            bound: bound.clone(),
            family_size,
            result,
        });
    }
    Ok(out)
}
