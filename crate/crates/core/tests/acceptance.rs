//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use geoblock::blocking::{BlockingSet, Provenance};
use geoblock::compact_groups::{
    center, classify_group_config, defect, group_blocking_set, group_geodesics,
    random_special_unitary, su2_to_s3, BiInvariantMetric, GroupConfiguration,
};
use geoblock::coverings::{Covering, ProjectiveCover, ProjectivePoint, TorusCover};
use geoblock::lattice::{int, rat, Lattice, LengthBound, Rational, RationalMatrix, RationalVector};
use geoblock::optimizer::{
    min_hitting_set, security_profile, HittingInstance, LowerBoundProof, SearchOptions,
};
use geoblock::rank_one::{
    antipodal_escape_witness, antipode, classify, closed_loop, random_point, RankOneSpace,
    SecurityStatus, SpherePoint, ESCAPE_MARGIN,
};
use geoblock::torus::{
    connecting_geodesics, midpoint_set, verify_bounded, verify_universal, BoundedCheck,
    TorusConfiguration, UniversalCheck,
};
use geoblock::Certificate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    let q = rng.gen_range(1..=30);
    rat(rng.gen_range(-60..=60), q)
}

fn random_lattice(n: usize, rng: &mut impl Rng) -> Arc<Lattice> {
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Equal => int(rng.gen_range(1..=3)),
                    std::cmp::Ordering::Less => rat(rng.gen_range(-3..=3), rng.gen_range(1..=3)),
                    std::cmp::Ordering::Greater => int(0),
                })
                .collect()
        })
        .collect();
    Arc::new(Lattice::with_basis(RationalMatrix::from_rows(rows).unwrap()).unwrap())
}

fn torus_universal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for n in 1..=3 {
        for i in 0..100 {
            let l = random_lattice(n, &mut rng);
            let x = RationalVector::new((0..n).map(|_| random_rational(&mut rng)).collect());
            // every tenth configuration is {x, x + λ}
            let y = if i % 10 == 0 {
                let k: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
                &x + &l.lattice_vector(&k)
            } else {
                RationalVector::new((0..n).map(|_| random_rational(&mut rng)).collect())
            };
            let cfg = TorusConfiguration::from_vectors(&x, &y, &l).map_err(|e| e.to_string())?;
            let diff = &y - &x;
            let expected = if l.contains(&diff) { (1 << n) - 1 } else { 1 << n };
            let set = midpoint_set(&cfg);
            ensure!(set.len() == expected, "T^{n} #{i}: {} midpoints, expected {expected}", set.len());
            match verify_universal(&cfg, &set).map_err(|e| e.to_string())? {
                UniversalCheck::Certified(b) => {
                    ensure!(*b.certificate() == Certificate::Universal, "T^{n} #{i}: wrong certificate")
                }
                UniversalCheck::Violation { residue, .. } => {
                    return Err(format!("T^{n} #{i}: residue {residue:?} unblocked"))
                }
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} configurations certified"))
}

fn brute_force(inst: &HittingInstance) -> usize {
    let m = inst.family.len();
    let k = inst.candidates.len();
    (0u64..1 << k)
        .filter(|mask| {
            let mut hit = vec![false; m];
            for (c, cand) in inst.candidates.iter().enumerate() {
                if mask >> c & 1 == 1 {
                    cand.covers.iter().for_each(|&g| hit[g] = true);
                }
            }
            hit.iter().all(|&h| h)
        })
        .map(|mask| mask.count_ones() as usize)
        .min()
        .unwrap_or(0)
}

fn circle(a: Rational, b: Rational) -> TorusConfiguration {
    let l = Arc::new(Lattice::standard(1));
    TorusConfiguration::from_vectors(&RationalVector::new(vec![a]), &RationalVector::new(vec![b]), &l).unwrap()
}

fn threshold_circle() -> Outcome {
    let cases = [
        (circle(int(0), rat(1, 2)), LengthBound::new(int(10)).unwrap(), 2),
        (circle(int(0), int(0)), LengthBound::new(rat(3, 2)).unwrap(), 1),
    ];
    let mut notes = vec![];
    for (cfg, bound, expected) in cases {
        let inst = HittingInstance::new(connecting_geodesics(&cfg, &bound));
        ensure!(inst.candidates.len() <= 20, "too many candidates for brute force");
        let c = min_hitting_set(&inst, &SearchOptions::default()).map_err(|e| e.to_string())?;
        ensure!(c.optimum == expected, "optimum {} != {expected}", c.optimum);
        ensure!(brute_force(&inst) == expected, "brute force disagrees");
        ensure!(
            verify_bounded(&cfg, &c.witness, &bound).map_err(|e| e.to_string())? == BoundedCheck::Blocked,
            "witness does not block"
        );
        ensure!(
            matches!(c.witness.certificate(), Certificate::BoundedLength(_)),
            "witness lacks its certificate"
        );
        notes.push(format!("{expected} ({})", proof_name(&c.lower_bound_proof)));
    }
    Ok(format!("optima {}", notes.join(", ")))
}

fn proof_name(p: &LowerBoundProof) -> &'static str {
    match p {
        LowerBoundProof::ExhaustedSearch { .. } => "exhausted search",
        LowerBoundProof::DisjointGeodesics(_) => "disjoint geodesics",
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn threshold_plane() -> Outcome {
    let l = Arc::new(Lattice::standard(2));
    let cfg = TorusConfiguration::from_vectors(
        &RationalVector::zeros(2),
        &RationalVector::from_ratios(&[(1, 3), (1, 5)]),
        &l,
    )
    .unwrap();
    let bounds: Vec<LengthBound> = [2, 4, 6].iter().map(|&b| LengthBound::new(int(b)).unwrap()).collect();
    let profile = security_profile(&cfg, &bounds, &SearchOptions::default()).map_err(|e| e.to_string())?;
    let mut last = 0;
    let mut optima = vec![];
    for e in &profile {
        let c = e.result.as_ref().map_err(|err| format!("L={}: {err}", e.bound))?;
        ensure!(c.optimum >= last, "profile decreases at L={}", e.bound);
        ensure!(c.optimum <= 4, "optimum {} exceeds 4", c.optimum);
        last = c.optimum;
        ensure!(
            verify_bounded(&cfg, &c.witness, &e.bound).map_err(|e| e.to_string())? == BoundedCheck::Blocked,
            "witness fails at L={}",
            e.bound
        );
        // no set of optimum−1 points blocks: every such subset of the witness
        // fails, and the lower-bound proof is checked on its own terms
        if c.optimum > 0 {
            for s in subsets(c.witness.len(), c.optimum - 1) {
                let pts: Vec<_> = s.iter().map(|&i| c.witness.points()[i].clone()).collect();
                let smaller = BlockingSet::new(pts, Provenance::Manual);
                ensure!(
                    matches!(verify_bounded(&cfg, &smaller, &e.bound).map_err(|e| e.to_string())?, BoundedCheck::Unblocked(_)),
                    "a subset of size {} blocks at L={}",
                    c.optimum - 1,
                    e.bound
                );
            }
        }
        let family = connecting_geodesics(&cfg, &e.bound);
        match &c.lower_bound_proof {
            LowerBoundProof::DisjointGeodesics(list) => {
                ensure!(list.len() == c.optimum, "packing size {} != optimum", list.len());
                // an exact pass test: no candidate point (intersections and midpoints)
                // lies on two of the listed geodesics
                let inst = HittingInstance::new(family.clone());
                for cand in &inst.candidates {
                    let on = list
                        .iter()
                        .filter(|&&g| {
                            !geoblock::torus::interior_passes(&family.geodesics[g], &cand.point).unwrap().is_empty()
                        })
                        .count();
                    ensure!(on <= 1, "packing geodesics share the point {}", cand.point);
                }
            }
            LowerBoundProof::ExhaustedSearch { nodes } => ensure!(*nodes > 0, "empty search claims exhaustion"),
        }
        optima.push(format!("L={}: {} ({})", e.bound, c.optimum, proof_name(&c.lower_bound_proof)));
    }
    Ok(optima.join(", "))
}

fn tangent(x: &SpherePoint, w: &SpherePoint) -> Vec<f64> {
    let d: f64 = x.coordinates().iter().zip(w.coordinates()).map(|(a, b)| a * b).sum();
    let t: Vec<f64> = x.coordinates().iter().zip(w.coordinates()).map(|(a, b)| b - d * a).collect();
    SpherePoint::normalized(t).unwrap().coordinates().to_vec()
}

fn sphere_pencil() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = random_point(3, &mut rng);
    let anti = antipode(&x);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let w = random_point(3, &mut rng);
        let lp = closed_loop(&x, tangent(&x, &w));
        worst = worst.max(lp.point_at(PI).distance(&anti));
    }
    ensure!(worst <= 1e-9, "a circle misses -x by {worst:e}");
    let s2 = RankOneSpace::sphere(2).unwrap();
    let v = classify(&s2, &x, &x).map_err(|e| e.to_string())?;
    let b = v.blocking.ok_or("no blocking set for {x, x}")?;
    ensure!(b.len() == 1 && b.points()[0].distance(&anti) <= 1e-12, "blocking set is not {{-x}}");
    Ok(format!("10000 circles, worst miss {worst:.1e}"))
}

/// Angular distance from `f` to the half circle `cos s·x + sin s·w`, `s ∈ [0, π]`.
fn half_circle_distance(x: &[f64], w: &[f64], f: &[f64]) -> f64 {
    let a: f64 = x.iter().zip(f).map(|(p, q)| p * q).sum();
    let b: f64 = w.iter().zip(f).map(|(p, q)| p * q).sum();
    if b >= 0.0 {
        (a * a + b * b).sqrt().clamp(-1.0, 1.0).acos()
    } else {
        a.clamp(-1.0, 1.0).acos().min((-a).clamp(-1.0, 1.0).acos())
    }
}

fn antipodal_escape() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for i in 0..100 {
        let dim = 3 + i % 3;
        let x = random_point(dim, &mut rng);
        let obstacles: Vec<SpherePoint> = (0..50).map(|_| random_point(dim, &mut rng)).collect();
        let arc = antipodal_escape_witness(&x, &obstacles).map_err(|e| e.to_string())?;
        ensure!(arc.start.distance(&x) <= 1e-12, "arc does not start at x");
        ensure!(arc.end.distance(&antipode(&x)) <= 1e-9, "arc does not end at -x");
        ensure!((arc.arclength - PI).abs() <= 1e-12, "arc is not a half circle");
        for f in &obstacles {
            let d = half_circle_distance(&arc.plane.0, &arc.plane.1, f.coordinates());
            worst = worst.min(d);
        }
    }
    ensure!(worst > ESCAPE_MARGIN, "clearance {worst:e} below the margin");
    Ok(format!("100 obstacle sets, minimum clearance {worst:.3e}"))
}

fn su2_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let s3 = RankOneSpace::sphere(3).unwrap();
    let (mut regular, mut central) = (0, 0);
    for i in 0..1000 {
        let k1 = random_special_unitary(2, &mut rng);
        let k2 = match i % 10 {
            0 => k1.clone(),
            1 => center(2)[1].mul(&k1),
            _ => random_special_unitary(2, &mut rng),
        };
        let cfg = GroupConfiguration::new(k1, k2).map_err(|e| e.to_string())?;
        let g = classify_group_config(&cfg).map_err(|e| e.to_string())?;
        let s = classify(&s3, &su2_to_s3(cfg.k1()).unwrap(), &su2_to_s3(cfg.k2()).unwrap())
            .map_err(|e| e.to_string())?;
        ensure!(g.status == s.status, "#{i}: group {:?} vs sphere {:?}", g.status, s.status);
        ensure!(g.status != SecurityStatus::Undetermined, "#{i}: undetermined");
        if defect(&cfg).map_err(|e| e.to_string())? == 0 {
            regular += 1;
            let b = g.blocking.ok_or(format!("#{i}: regular without blocking set"))?;
            ensure!(b.len() == 2, "#{i}: {} blockers", b.len());
            let (reduction, set) = group_blocking_set(&cfg).map_err(|e| e.to_string())?;
            ensure!(*set.certificate() == Certificate::Universal, "#{i}: not universal");
            let torus = verify_universal(&reduction.config, &midpoint_set(&reduction.config)).unwrap();
            ensure!(matches!(torus, UniversalCheck::Certified(_)), "#{i}: torus check failed");
        } else {
            central += 1;
        }
    }
    Ok(format!("{regular} regular and {central} central configurations agree"))
}

fn su3_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    let mut worst: f64 = 0.0;
    while done < 100 {
        let cfg = GroupConfiguration::new(random_special_unitary(3, &mut rng), random_special_unitary(3, &mut rng))
            .map_err(|e| e.to_string())?;
        if defect(&cfg).map_err(|e| e.to_string())? != 0 {
            continue;
        }
        let (_, set) = group_blocking_set(&cfg).map_err(|e| e.to_string())?;
        ensure!(set.len() == 4, "{} blockers", set.len());
        let mut bound = 30.0;
        let fam = loop {
            let fam = group_geodesics(&cfg, bound, BiInvariantMetric::default()).map_err(|e| e.to_string())?;
            if fam.len() >= 50 {
                break fam;
            }
            bound *= 1.5;
        };
        for g in fam.geodesics.iter().take(50) {
            let m = fam.point_at(g, 0.5);
            let d = set.points().iter().map(|b| b.distance(&m)).fold(f64::INFINITY, f64::min);
            ensure!(d <= 1e-8, "midpoint misses every blocker by {d:e}");
            worst = worst.max(d);
        }
        done += 1;
    }
    Ok(format!("100 configurations x 50 geodesics, worst deviation {worst:.1e}"))
}

fn covering_transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ten = LengthBound::new(int(10)).unwrap();
    let covers: [(usize, Vec<Vec<i64>>); 3] = [
        (1, vec![vec![2]]),
        (2, vec![vec![2, 0], vec![0, 2]]),
        (2, vec![vec![4, 0], vec![1, 1]]),
    ];
    let mut torus_cases = 0;
    for (n, m) in &covers {
        let lower = Arc::new(Lattice::standard(*n));
        let cover = TorusCover::sublattice(Arc::clone(&lower), m).map_err(|e| e.to_string())?;
        ensure!(cover.degree() == if *n == 1 { 2 } else { 4 }, "wrong degree");
        // the example configuration first, then random ones
        for i in 0..5 {
            let (x, y) = if i == 0 {
                (RationalVector::zeros(*n), RationalVector::from_ratios(&[(1, 3), (1, 5)][..*n]))
            } else {
                (
                    RationalVector::new((0..*n).map(|_| random_rational(&mut rng)).collect()),
                    RationalVector::new((0..*n).map(|_| random_rational(&mut rng)).collect()),
                )
            };
            let cfg = TorusConfiguration::from_vectors(&x, &y, &lower).unwrap();
            let r = cover.verify_preimage_identity(&cfg, &ten).map_err(|e| e.to_string())?;
            ensure!(r.holds(), "preimage identity fails on T^{n}: {r:?}");
            let up = cover.lift_blocking(&midpoint_set(&cfg)).map_err(|e| e.to_string())?;
            ensure!(cover.certify_lifted(&cfg, &up, &ten).unwrap().is_some(), "lifted set leaks");
            torus_cases += 1;
        }
    }
    let pc = ProjectiveCover::new(2).unwrap();
    let mut max_projected = 0;
    for _ in 0..50 {
        let x = ProjectivePoint::new(random_point(3, &mut rng));
        let y = ProjectivePoint::new(random_point(3, &mut rng));
        let r = pc.verify_preimage_identity(&x, &y, Some(2.0 * PI)).map_err(|e| e.to_string())?;
        ensure!(r.holds(), "RP^2 preimage identity fails: {r:?}");
        let b = pc.blocking_from_fibers(&x, &y).map_err(|e| e.to_string())?;
        max_projected = max_projected.max(b.len());
        ensure!(b.len() <= 4, "projected set has {} points", b.len());
        ensure!(pc.certify_downstairs(&x, &y, &b, None).unwrap().is_some(), "projected set leaks");
        let up = pc.lift_blocking(&b).map_err(|e| e.to_string())?;
        ensure!(pc.certify_lifted(&x, &y, &up, Some(2.0 * PI)).unwrap(), "lifted RP^2 set leaks");
    }
    Ok(format!("{torus_cases} torus covers and 50 RP^2 pairs, projected sets of at most {max_projected} points"))
}

fn determinism() -> Outcome {
    let extra: &[&[&str]] = &[
        &["cover", "check", "--kind", "torus", "--config", "0:1/3", "--sublattice", "2", "--length", "10"],
        &["cover", "check", "--kind", "torus", "--config", "0,0:1/3,1/5", "--sublattice", "2,0;0,2", "--length", "10"],
        &["cover", "check", "--kind", "projective", "--x", "1,0,0", "--y", "0.6,0,0.8", "--length", "2pi"],
        &["cover", "lift", "--kind", "projective", "--x", "1,0,0", "--y", "0.6,0,0.8"],
        &["torus", "min-block", "--config", "0:0", "--lengths", "3/2"],
        &["torus", "min-block", "--config", "0,0:1/3,1/5", "--lengths", "2,4,6"],
        &["group", "block", "--n", "2", "--k1", "I", "--k2", "diag(1,-1)", "--length", "20"],
        &["group", "block", "--n", "3", "--k1", "I", "--k2", "diag(0.3,0.5,-0.8)", "--length", "40"],
        &["sphere", "witness", "--x", "1,0,0,0", "--random", "50", "--seed", "11"],
    ];
    let mut count = 0;
    for cmd in common::COMMANDS.iter().chain(extra) {
        let a = common::go(cmd);
        let b = common::go(cmd);
        ensure!(a.code <= 1, "{cmd:?} exited {}: {}", a.code, a.stderr);
        ensure!(a.code == b.code, "{cmd:?}: exit codes differ");
        ensure!(common::without_timing(&a) == common::without_timing(&b), "{cmd:?}: reports differ");
        count += 1;
    }
    Ok(format!("{count} commands reproduced byte for byte"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("torus universal blocking", torus_universal, Duration::from_secs(5)),
        ("threshold oracle, dimension 1", threshold_circle, Duration::from_secs(1)),
        ("threshold oracle, dimension 2", threshold_plane, Duration::from_secs(60)),
        ("sphere continuum blocking", sphere_pencil, Duration::from_secs(1)),
        ("antipodal escape", antipodal_escape, Duration::from_secs(1)),
        ("SU(2) cross-model agreement", su2_agreement, Duration::from_secs(10)),
        ("SU(3) torus reduction", su3_reduction, Duration::from_secs(30)),
        ("covering transfer", covering_transfer, Duration::from_secs(10)),
        ("determinism", determinism, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:.2?}, limit {limit:?}")),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} ({:.2?}) {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
