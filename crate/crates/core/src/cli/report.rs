//! JSON encodings of the library's values, as used in run reports.
//!
//! Rationals are strings `p/q` so that they survive round trips exactly;
//! floating-point data are plain JSON numbers.

use serde_json::{json, Value};

use crate::blocking::{BlockingSet, Certificate};
use crate::compact_groups::UnitaryMatrix;
use crate::coverings::{PreimageReport, ProjectivePoint};
use crate::lattice::{format_rational, Lattice, LengthBound, Rational, RationalMatrix, RationalVector, TorusPoint};
use crate::optimizer::{LowerBoundProof, OptimalityCertificate};
use crate::rank_one::{FiniteFamilyWitness, GreatArc, SecurityVerdict, SphereArcs, SpherePoint};
use crate::torus::{GeodesicFamily, TorusGeodesic};

pub fn rational(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

pub fn vector(v: &RationalVector) -> Value {
    Value::Array(v.coordinates().iter().map(rational).collect())
}

pub fn matrix(m: &RationalMatrix) -> Value {
    let n = m.dim();
    Value::Array(
        (0..n)
            .map(|i| Value::Array((0..n).map(|j| rational(m.get(i, j))).collect()))
            .collect(),
    )
}

pub fn lattice(l: &Lattice) -> Value {
    json!({ "basis": matrix(l.basis()), "gram": matrix(l.gram()) })
}

pub fn torus_point(p: &TorusPoint) -> Value {
    vector(p.rep())
}

pub fn length_bound(l: &LengthBound) -> Value {
    rational(l.value())
}

pub fn certificate(c: &Certificate) -> Value {
    match c {
        Certificate::BoundedLength(l) => json!({ "kind": c.kind(), "length_bound": length_bound(l) }),
        _ => json!({ "kind": c.kind() }),
    }
}

pub fn blocking_with<P>(b: &BlockingSet<P>, point: impl Fn(&P) -> Value) -> Value {
    json!({
        "points": b.points().iter().map(point).collect::<Vec<_>>(),
        "size": b.len(),
        "provenance": b.provenance().as_str(),
        "certificate": certificate(b.certificate()),
    })
}

pub fn torus_blocking(b: &BlockingSet<TorusPoint>) -> Value {
    blocking_with(b, torus_point)
}

pub fn torus_geodesic(g: &TorusGeodesic) -> Value {
    json!({
        "base": vector(&g.base),
        "displacement": vector(&g.displacement),
        "translate": g.translate,
        "residue": g.residue(),
        "length_sq": rational(&g.length_sq),
        "length": crate::lattice::to_f64(&g.length_sq).sqrt(),
    })
}

pub fn torus_family(f: &GeodesicFamily) -> Value {
    json!({
        "length_bound": length_bound(&f.length_bound),
        "size": f.len(),
        "geodesics": f.geodesics.iter().map(torus_geodesic).collect::<Vec<_>>(),
    })
}

pub fn lower_bound_proof(p: &LowerBoundProof) -> Value {
    match p {
        LowerBoundProof::ExhaustedSearch { nodes } => json!({ "kind": "exhausted_search", "nodes": nodes }),
        LowerBoundProof::DisjointGeodesics(g) => json!({ "kind": "disjoint_geodesics", "geodesics": g }),
    }
}

pub fn optimality(c: &OptimalityCertificate) -> Value {
    json!({
        "optimum": c.optimum,
        "witness": torus_blocking(&c.witness),
        "lower_bound_proof": lower_bound_proof(&c.lower_bound_proof),
        "nodes": c.nodes,
    })
}

pub fn sphere_point(p: &SpherePoint) -> Value {
    json!(p.coordinates())
}

pub fn projective_point(p: &ProjectivePoint) -> Value {
    sphere_point(p.representative())
}

pub fn great_arc(a: &GreatArc) -> Value {
    json!({
        "start": sphere_point(&a.start),
        "end": sphere_point(&a.end),
        "plane": [a.plane.0, a.plane.1],
        "arclength": a.arclength,
    })
}

pub fn sphere_arcs(a: &SphereArcs) -> Value {
    match a {
        SphereArcs::TwoArcs { short, long } => json!({
            "kind": "two_arcs",
            "arcs": [great_arc(short), great_arc(long)],
        }),
        SphereArcs::PencilThrough(p) => json!({ "kind": "pencil_through", "point": sphere_point(p) }),
        SphereArcs::AntipodalPencil(p) => json!({ "kind": "antipodal_pencil", "point": sphere_point(p) }),
    }
}

fn witness(w: &FiniteFamilyWitness) -> Value {
    json!({
        "geodesics": w.geodesics.iter().map(great_arc).collect::<Vec<_>>(),
        "blockers": w.blockers,
    })
}

pub fn verdict<P>(v: &SecurityVerdict<P>, point: impl Fn(&P) -> Value) -> Value {
    json!({
        "status": v.status.as_str(),
        "reason": v.reason.as_str(),
        "note": v.note,
        "blocking": v.blocking.as_ref().map(|b| blocking_with(b, point)),
        "witness": v.witness.as_ref().map(witness),
    })
}

pub fn unitary(u: &UnitaryMatrix) -> Value {
    let m = u.matrix();
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect()))
            .collect(),
    )
}

pub fn preimage<G>(r: &PreimageReport<G>, item: impl Fn(&G) -> Value) -> Value {
    json!({
        "holds": r.holds(),
        "degree": r.degree,
        "downstairs": r.downstairs,
        "lifted": r.lifted,
        "upstairs": r.upstairs,
        "missing_upstairs": r.missing_upstairs.iter().map(&item).collect::<Vec<_>>(),
        "extra_upstairs": r.extra_upstairs.iter().map(&item).collect::<Vec<_>>(),
    })
}

/// Paths (JSON pointers) where `a` and `b` differ, skipping `ignore` keys at
/// the top level.
pub fn differences(a: &Value, b: &Value, ignore: &[&str]) -> Vec<String> {
    fn walk(a: &Value, b: &Value, path: String, out: &mut Vec<String>, ignore: &[&str]) {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                let keys: std::collections::BTreeSet<&String> = x.keys().chain(y.keys()).collect();
                for k in keys {
                    if path.is_empty() && ignore.contains(&k.as_str()) {
                        continue;
                    }
                    let p = format!("{path}/{k}");
                    match (x.get(k), y.get(k)) {
                        (Some(u), Some(v)) => walk(u, v, p, out, &[]),
                        _ => out.push(p),
                    }
                }
            }
            (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
                for (i, (u, v)) in x.iter().zip(y).enumerate() {
                    walk(u, v, format!("{path}/{i}"), out, &[]);
                }
            }
            _ if a == b => {}
            _ => out.push(if path.is_empty() { "/".into() } else { path }),
        }
    }
    let mut out = Vec::new();
    walk(a, b, String::new(), &mut out, ignore);
    out
}
