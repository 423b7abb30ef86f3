//! The full pipeline on one instance: validate, embed, tabulate curves,
//! verify the theorem, and audit every derived identity. The JSON form has
//! sorted keys and exact numbers, so it is byte-stable across runs.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::curves::{self, AdjacencyCheck, CurveClass, CurveError, CurveKind};
use crate::exactal::Scalar;
use crate::horo::{self, FanoEmbedding, HoroError, ReflexivityReport};
use crate::instance::InstanceFile;
use crate::theorem::{self, FactorOrigin, TheoremError, TheoremReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Valid instance; every check passed.
    Verified,
    /// The input does not describe a Q-factorial Fano embedding.
    Invalid,
    /// A derived identity failed on a valid instance.
    Inconsistent,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Verified => 0,
            Outcome::Invalid => 2,
            Outcome::Inconsistent => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Outcome::Verified => "verified",
            Outcome::Invalid => "invalid",
            Outcome::Inconsistent => "inconsistent",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis<S> {
    pub outcome: Outcome,
    /// Why the instance is invalid or inconsistent.
    pub failure: Option<String>,
    pub validation: Option<ReflexivityReport>,
    pub embedding: Option<FanoEmbedding<S>>,
    pub curves: Vec<CurveClass>,
    pub adjacency: Option<AdjacencyCheck>,
    pub report: Option<TheoremReport<S>>,
    /// Failed audit checks, by name.
    pub violations: Vec<String>,
    /// Observations that are not failures.
    pub notes: Vec<String>,
}

impl<S: Scalar> Analysis<S> {
    fn invalid(message: String, validation: Option<ReflexivityReport>) -> Self {
        Analysis {
            outcome: Outcome::Invalid,
            failure: Some(message),
            validation,
            embedding: None,
            curves: Vec::new(),
            adjacency: None,
            report: None,
            violations: Vec::new(),
            notes: Vec::new(),
        }
    }
}

pub fn analyze<S: Scalar>(instance: &InstanceFile) -> Analysis<S> {
    let space = match instance.space() {
        Ok(s) => s,
        Err(e) => return Analysis::invalid(e.to_string(), None),
    };
    let q = match instance.polytope::<S>() {
        Ok(Some(q)) => q,
        Ok(None) => return Analysis::invalid("a coordinate does not fit the scalar type".into(), None),
        Err(e) => return Analysis::invalid(e.to_string(), None),
    };
    let validation = match horo::validate_reflexive(&space, &q) {
        Ok(v) => v,
        Err(e) => return Analysis::invalid(e.to_string(), None),
    };
    if !validation.passed() {
        return Analysis::invalid(format!("not G/H-reflexive: {}", validation.summary()), Some(validation));
    }
    let emb = match horo::build_embedding(space, q) {
        Ok(e) => e,
        Err(HoroError::Overflow) => {
            return Analysis::invalid("a coordinate does not fit the scalar type".into(), Some(validation))
        }
        Err(e) => return Analysis::invalid(e.to_string(), Some(validation)),
    };
    let table = match curves::curve_table(&emb) {
        Ok(t) => t,
        Err(e @ CurveError::InvalidDegree { .. }) => return Analysis::invalid(e.to_string(), Some(validation)),
        Err(e) => return inconsistent(e.to_string(), validation, emb),
    };
    let report = match theorem::verify(&emb) {
        Ok(r) => r,
        Err(TheoremError::Curve(e @ CurveError::InvalidDegree { .. })) => {
            return Analysis::invalid(e.to_string(), Some(validation))
        }
        Err(e) => return inconsistent(e.to_string(), validation, emb),
    };
    let adjacency = curves::check_adjacency_lemma(&emb, &report.epsilon);
    let violations = audit(&emb, &table, &adjacency, &report);
    let outcome = if violations.is_empty() { Outcome::Verified } else { Outcome::Inconsistent };
    let mut notes = Vec::new();
    if !c2_implies_locally_factorial(&report) {
        notes.push("c2 holds but X is not locally factorial; c1′ fails, which the local factoriality argument needs".into());
    }
    Analysis {
        outcome,
        failure: (!violations.is_empty()).then(|| format!("failed checks: {}", violations.join(", "))),
        validation: Some(validation),
        embedding: Some(emb),
        curves: table,
        adjacency: Some(adjacency),
        report: Some(report),
        violations,
        notes,
    }
}

fn inconsistent<S: Scalar>(message: String, validation: ReflexivityReport, emb: FanoEmbedding<S>) -> Analysis<S> {
    Analysis {
        outcome: Outcome::Inconsistent,
        failure: Some(message),
        validation: Some(validation),
        embedding: Some(emb),
        curves: Vec::new(),
        adjacency: None,
        report: None,
        violations: Vec::new(),
        notes: Vec::new(),
    }
}

/// The bare implication `c2 ⇒ locally factorial`, without `c1′`. It fails on
/// some singular instances, e.g. the weighted projective plane `P(1,1,2)`.
pub fn c2_implies_locally_factorial<S: Scalar>(report: &TheoremReport<S>) -> bool {
    report.conditions.as_ref().is_none_or(|c| !c.c2 || c.locally_factorial)
}

/// Every identity that must hold on a valid instance.
fn audit<S: Scalar>(
    emb: &FanoEmbedding<S>,
    table: &[CurveClass],
    adjacency: &AdjacencyCheck,
    report: &TheoremReport<S>,
) -> Vec<String> {
    let mut bad = Vec::new();
    let mut check = |ok: bool, name: &str| {
        if !ok {
            bad.push(name.to_string());
        }
    };
    let cond = report.conditions.as_ref().expect("verify fills the conditions");
    check(report.inequality_holds, "inequality");
    check(report.chain.iota_le_epsilon, "iota_le_epsilon");
    check(report.chain.epsilon_vertex_bound, "epsilon_vertex_bound");
    check(report.chain.vertex_weight_identity, "vertex_weight_identity");
    check(report.chain.picard_bound, "picard_bound");
    check(report.chain.root_bound, "root_bound");
    check(table.iter().all(|c| c.degree > BigInt::zero()), "positive_degrees");
    check(adjacency.holds, "adjacency");
    check(report.picard_number <= 2 * report.dimension as i64, "picard_le_2d");
    check(report.picard_number >= 1, "picard_positive");
    check(!(cond.c1_prime && cond.c2) || cond.locally_factorial, "c1_prime_c2_imply_locally_factorial");
    check(report.equality == cond.all(), "equality_iff_conditions");
    if !cond.c4_prime_detail.pattern_skipped() {
        check(cond.c4 == cond.c4_prime, "c4_iff_c4_prime");
    }
    if report.equality {
        check(report.classification.is_some(), "classification");
    }

    let space = emb.space();
    for &alpha in space.marked().difference(emb.colors()) {
        let a = BigInt::from(space.a_alpha(alpha));
        let ok = match curves::min_alpha_degree(emb, alpha) {
            Ok(Some(d)) if space.coroot_restriction(alpha).is_zero() => d == a,
            Ok(Some(d)) => d < a,
            _ => false,
        };
        check(ok, &format!("non_color_bound[{alpha}]"));
    }
    bad
}

fn scalar_json<S: Scalar>(x: &S) -> Value {
    if x.is_integral() {
        int_json(&x.numer_big())
    } else {
        Value::String(x.to_string())
    }
}

fn vector_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

pub(crate) fn int_json(x: &BigInt) -> Value {
    match i64::try_from(x) {
        Ok(n) => json!(n),
        Err(_) => Value::String(x.to_string()),
    }
}

fn curve_json(c: &CurveClass) -> Value {
    match &c.kind {
        CurveKind::Mu { ridge } => json!({"kind": "mu", "ridge": ridge, "degree": int_json(&c.degree)}),
        CurveKind::AlphaV { alpha, facet } => {
            json!({"kind": "alpha_v", "root": alpha.to_string(), "facet": facet, "degree": int_json(&c.degree)})
        }
    }
}

impl<S: Scalar> Analysis<S> {
    pub fn to_json(&self) -> Value {
        let mut out = json!({
            "status": self.outcome.name(),
            "exit_code": self.outcome.exit_code(),
            "failure": self.failure,
            "violations": self.violations,
            "notes": self.notes,
        });
        if let Some(v) = &self.validation {
            out["validation"] = json!({
                "condition_1": v.condition1(),
                "condition_2": v.dual_integral,
                "condition_3": v.points_contained,
                "diagnostics": v.diagnostics,
            });
        }
        if let Some(emb) = &self.embedding {
            out["embedding"] = embedding_json(emb);
        }
        if !self.curves.is_empty() {
            out["curves"] = Value::Array(self.curves.iter().map(curve_json).collect());
        }
        if let Some(a) = &self.adjacency {
            out["adjacency"] = json!({"holds": a.holds, "counterexample": a.counterexample});
        }
        if let Some(r) = &self.report {
            out["theorem"] = theorem_json(r);
            let direct = self.embedding.as_ref().is_some_and(|e| e.space().is_direct() && !e.space().marked().is_empty());
            out["provenance"] = json!({
                "direct_mode_unverified": direct,
                "pseudo_index": "B-stable",
                "condition_2_convention": "B-stable",
                "projective_space_identification": if r.classification.is_some() { "trusted external result" } else { "not used" },
                "condition_4_prime_pattern_skipped": r.conditions.as_ref().is_some_and(|c| c.c4_prime_detail.pattern_skipped()),
            });
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self.outcome {
            Outcome::Verified => {}
            Outcome::Invalid => {
                let _ = writeln!(s, "invalid instance: {}", self.failure.as_deref().unwrap_or("?"));
                return s;
            }
            Outcome::Inconsistent => {
                let _ = writeln!(s, "INCONSISTENT: {}", self.failure.as_deref().unwrap_or("?"));
            }
        }
        let Some(emb) = &self.embedding else { return s };
        let _ = writeln!(
            s,
            "n = {}, r = {}, rho = {}, d = {}, colors = {}",
            emb.rank(),
            emb.r(),
            emb.picard_number(),
            emb.dimension(),
            join(emb.colors().iter())
        );
        let _ = writeln!(s, "a_u = [{}]", join(emb.vertex_weights().iter()));
        let _ = writeln!(s, "locally factorial: {}", emb.is_locally_factorial());
        let Some(r) = &self.report else { return s };
        let _ = writeln!(s, "epsilon_Q = {}", r.epsilon.value);
        let _ = writeln!(s, "B-stable pseudo-index = {} (witness {})", r.pseudo_index.value, r.pseudo_index.witness.kind);
        let verdict = if r.equality { "equality" } else { "strict" };
        let _ = writeln!(s, "(iota - 1) rho = {} <= d = {}: {verdict}", r.lhs, r.dimension);
        if let Some(c) = &r.conditions {
            let flag = |b: bool| if b { "yes" } else { "no" };
            let _ = writeln!(
                s,
                "conditions: c1' {}, c2 {}, c3 {}, c4 {}, c4' {}",
                flag(c.c1_prime),
                flag(c.c2),
                flag(c.c3),
                flag(c.c4),
                flag(c.c4_prime)
            );
        }
        if let Some(c) = &r.classification {
            let _ = writeln!(s, "{c}");
            if c.smooth_by_criterion {
                let _ = writeln!(s, "smooth by the smoothness criterion");
            }
        }
        s
    }
}

fn join<T: std::fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn embedding_json<S: Scalar>(emb: &FanoEmbedding<S>) -> Value {
    let q = emb.polytope();
    let facets: Vec<Value> = q
        .facets()
        .iter()
        .map(|f| json!({"normal": vector_json(&f.normal), "vertices": f.vertices}))
        .collect();
    let orbits: Vec<Value> = emb
        .closed_orbits()
        .iter()
        .map(|o| {
            json!({
                "facet": o.facet,
                "roots": o.roots.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "dimension": o.dimension,
            })
        })
        .collect();
    let ridges: Vec<Value> = emb.ridges().iter().map(|r| json!({"vertices": r.vertices, "facets": r.facets})).collect();
    json!({
        "n": emb.rank(),
        "r": emb.r(),
        "picard_number": emb.picard_number(),
        "dimension": emb.dimension(),
        "colors": emb.colors().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "vertices": q.vertices().iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
        "vertex_weights": emb.vertex_weights(),
        "vertex_roots": (0..q.vertices().len()).map(|u| emb.vertex_root(u).map(|r| r.to_string())).collect::<Vec<_>>(),
        "facets": facets,
        "ridges": ridges,
        "closed_orbits": orbits,
        "locally_factorial": emb.is_locally_factorial(),
    })
}

fn theorem_json<S: Scalar>(r: &TheoremReport<S>) -> Value {
    let mut out = json!({
        "epsilon": scalar_json(&r.epsilon.value),
        "epsilon_minimizers": r.epsilon.minimizers,
        "pseudo_index": int_json(&r.pseudo_index.value),
        "pseudo_index_witness": curve_json(&r.pseudo_index.witness),
        "picard_number": r.picard_number,
        "dimension": r.dimension,
        "n": r.rank,
        "r": r.r,
        "root_bound": r.root_bound,
        "lhs": int_json(&r.lhs),
        "inequality_holds": r.inequality_holds,
        "equality": r.equality,
        "chain": {
            "iota_le_epsilon": r.chain.iota_le_epsilon,
            "epsilon_vertex_bound": r.chain.epsilon_vertex_bound,
            "vertex_weight_identity": r.chain.vertex_weight_identity,
            "picard_bound": r.chain.picard_bound,
            "root_bound": r.chain.root_bound,
        },
    });
    if let Some(c) = &r.conditions {
        out["conditions"] = json!({
            "c1_prime": c.c1_prime,
            "c2": c.c2,
            "c3": c.c3,
            "c4": c.c4,
            "c4_prime": c.c4_prime,
            "c4_prime_components": c.c4_prime_detail.per_component,
            "locally_factorial": c.locally_factorial,
            "violated": c.violated(),
        });
    }
    if let Some(c) = &r.classification {
        let factors: Vec<Value> = c
            .factors
            .iter()
            .map(|f| match &f.origin {
                FactorOrigin::ZeroRestriction { root } => {
                    json!({"dim": f.dim, "origin": "zero_restriction", "root": root.to_string()})
                }
                FactorOrigin::Polytope { vertices, roots, sublattice } => json!({
                    "dim": f.dim,
                    "origin": "polytope",
                    "vertices": vertices,
                    "roots": roots.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "sublattice": sublattice.iter().map(|m| m.0.iter().map(int_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                }),
            })
            .collect();
        out["classification"] = json!({
            "label": c.to_string(),
            "factors": factors,
            "smooth_by_criterion": c.smooth_by_criterion,
        });
    }
    out
}

/// One-line verdict for `classify`: the product, or why there is none.
pub fn classification_line<S: Scalar>(r: &TheoremReport<S>) -> String {
    if let Some(c) = &r.classification {
        return c.to_string();
    }
    let mut line = format!("strict inequality: {} < {}", r.lhs, r.dimension);
    if let Some(c) = &r.conditions {
        let v = c.violated();
        if !v.is_empty() {
            let _ = write!(line, "; violated: {}", v.join(", "));
        }
    }
    line
}

/// `ι̂ − 1` factors count check used by tests: every factor is `P^{ι̂−1}`.
pub fn uniform_factors<S: Scalar>(r: &TheoremReport<S>) -> bool {
    r.classification.as_ref().is_some_and(|c| {
        c.factors.iter().all(|f| BigInt::from(f.dim) + BigInt::one() == r.pseudo_index.value)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::{BigRational, Ratio};

    const A1_STRICT: &str = r#"{
        "group": {"components": [{"type": "A", "rank": 1}]},
        "marked_roots": ["c1.n1"],
        "rank": 1,
        "lattice": {"mode": "direct", "coroot_restrictions": {"c1.n1": [1]}},
        "polytope": {"vertices": [[-1], [1]]}
    }"#;

    #[test]
    fn strict_a1_case() {
        let inst = InstanceFile::parse(A1_STRICT).unwrap();
        let a = analyze::<BigRational>(&inst);
        assert_eq!(a.outcome, Outcome::Verified, "{:?}", a.failure);
        let r = a.report.as_ref().unwrap();
        assert_eq!(classification_line(r), "strict inequality: 0 < 2; violated: c2, c3");
        let json = a.to_json();
        assert_eq!(json["theorem"]["pseudo_index"], json!(1));
        assert_eq!(json["provenance"]["direct_mode_unverified"], json!(true));
    }

    #[test]
    fn scaled_interval_is_invalid() {
        let inst = InstanceFile::parse(&A1_STRICT.replace("[[-1], [1]]", "[[-2], [2]]")).unwrap();
        let a = analyze::<BigRational>(&inst);
        assert_eq!(a.outcome.exit_code(), 2);
        assert!(a.failure.unwrap().contains("condition (2)"));
    }

    #[test]
    fn toric_p2_text() {
        let a = analyze::<BigRational>(&InstanceFile::toric(&[vec![1, 0], vec![0, 1], vec![-1, -1]]));
        assert_eq!(a.outcome, Outcome::Verified);
        assert!(a.to_text().contains("X ≅ P²"));
        assert!(uniform_factors(a.report.as_ref().unwrap()));
    }

    #[test]
    fn small_and_big_scalars_agree() {
        let inst = InstanceFile::toric(&[vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]]);
        let big = analyze::<BigRational>(&inst).to_json();
        let small = analyze::<Ratio<i64>>(&inst).to_json();
        assert_eq!(big, small);
    }
}
