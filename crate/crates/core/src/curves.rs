//! `B`-stable curves and their anticanonical degrees.
//!
//! Two families of curves generate the cone of effective 1-cycles: the
//! curves `C_μ` attached to ridges `μ` of `Q`, and the Schubert curves
//! `C_{α,v}` attached to a non-color marked root `α` and a dual vertex `v`
//! whose facet cone contains `α̌_M`. The minimum of their degrees, `ι̂`, is an
//! upper bound for the pseudo-index.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exactal::{dot, Scalar};
use crate::horo::FanoEmbedding;
use crate::polytope::{PolytopeError, Ridge};
use crate::rootsys::RootId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("no vertex/dual-vertex pair off a facet")]
    NoAdmissiblePair,
    #[error("degree {degree} of {curve} is not a positive integer; not a Fano embedding")]
    InvalidDegree { curve: String, degree: String },
    #[error("degree of C_mu for ridge {ridge:?} depends on the facet chosen ({first} vs {second})")]
    AsymmetricRidge { ridge: Vec<usize>, first: String, second: String },
    #[error("{0} is a color, so it has no Schubert curve")]
    IsColor(RootId),
    #[error("{0} is not a marked root")]
    NotMarked(RootId),
    #[error("coroot restriction of {alpha} is outside the cone over facet {facet}")]
    OutsideCone { alpha: RootId, facet: usize },
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveKind {
    /// `C_μ` for the ridge with this index in [`FanoEmbedding::ridges`].
    Mu { ridge: usize },
    /// `C_{α,v}` with `v` the normal of facet `facet`.
    AlphaV { alpha: RootId, facet: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    pub kind: CurveKind,
    pub degree: BigInt,
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveKind::Mu { ridge } => write!(f, "C_mu[{ridge}]"),
            CurveKind::AlphaV { alpha, facet } => write!(f, "C_{alpha},v[{facet}]"),
        }
    }
}

/// `ε_Q` together with every `(u, v)` (vertex index, facet index) attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonWitness<S> {
    pub value: S,
    pub minimizers: Vec<(usize, usize)>,
}

/// `a_u (1 + ⟨v, u⟩)`.
pub fn weighted_pairing<S: Scalar>(emb: &FanoEmbedding<S>, u: usize, facet: usize) -> S {
    let q = emb.polytope();
    let v = &q.facets()[facet].normal;
    S::from_i64(emb.vertex_weights()[u]) * (S::one() + dot(v, &q.vertices()[u]))
}

pub fn epsilon_q<S: Scalar>(emb: &FanoEmbedding<S>) -> Result<EpsilonWitness<S>, CurveError> {
    let q = emb.polytope();
    let mut best: Option<EpsilonWitness<S>> = None;
    for u in 0..q.vertices().len() {
        for (fi, f) in q.facets().iter().enumerate() {
            if f.contains_vertex(u) {
                continue;
            }
            let value = weighted_pairing(emb, u, fi);
            match &mut best {
                Some(w) if value > w.value => {}
                Some(w) if value == w.value => w.minimizers.push((u, fi)),
                _ => best = Some(EpsilonWitness { value, minimizers: vec![(u, fi)] }),
            }
        }
    }
    best.ok_or(CurveError::NoAdmissiblePair)
}

fn integral_degree<S: Scalar>(value: S, curve: impl FnOnce() -> String) -> Result<BigInt, CurveError> {
    if value.is_integral() && value.is_positive() {
        Ok(value.numer_big())
    } else {
        Err(CurveError::InvalidDegree { curve: curve(), degree: value.to_string() })
    }
}

/// `a_u(1 + ⟨v,u⟩) / ⟨χ_μ, a_u u⟩` with `v` the normal of `F_v ⊃ μ` and `u`
/// the vertex of the other facet through `μ` that is not on `μ`.
fn mu_degree_oriented<S: Scalar>(emb: &FanoEmbedding<S>, ridge: &Ridge, fv: usize, other: usize) -> Result<S, CurveError> {
    let q = emb.polytope();
    let u = *q.facets()[other]
        .vertices
        .iter()
        .find(|i| !ridge.vertices.contains(i))
        .expect("a facet has a vertex off each of its ridges");
    let chi = q.ridge_normal(ridge, u)?;
    let chi: Vec<S> = chi.to_scalars().expect("small enough for the scalar type");
    let a = S::from_i64(emb.vertex_weights()[u]);
    let numerator = weighted_pairing(emb, u, fv);
    let denominator = a * dot(&chi, &q.vertices()[u]);
    Ok(numerator / denominator)
}

/// `−K_X · C_μ`, checked to be the same from both facets through `μ`.
pub fn degree_mu<S: Scalar>(emb: &FanoEmbedding<S>, ridge: &Ridge) -> Result<BigInt, CurveError> {
    let [f0, f1] = ridge.facets;
    let first = mu_degree_oriented(emb, ridge, f0, f1)?;
    let second = mu_degree_oriented(emb, ridge, f1, f0)?;
    if first != second {
        return Err(CurveError::AsymmetricRidge {
            ridge: ridge.vertices.clone(),
            first: first.to_string(),
            second: second.to_string(),
        });
    }
    integral_degree(first, || format!("C_mu{:?}", ridge.vertices))
}

/// `−K_X · C_{α,v} = a_α + ⟨v, α̌_M⟩`.
pub fn degree_alpha_v<S: Scalar>(emb: &FanoEmbedding<S>, alpha: RootId, facet: usize) -> Result<BigInt, CurveError> {
    let space = emb.space();
    if !space.marked().contains(&alpha) {
        return Err(CurveError::NotMarked(alpha));
    }
    if emb.colors().contains(&alpha) {
        return Err(CurveError::IsColor(alpha));
    }
    let coroot: Vec<S> = space
        .coroot_restriction(alpha)
        .to_scalars()
        .expect("small enough for the scalar type");
    if emb.polytope().cone_membership(facet, &coroot)?.is_none() {
        return Err(CurveError::OutsideCone { alpha, facet });
    }
    let v = &emb.polytope().facets()[facet].normal;
    let degree = S::from_i64(space.a_alpha(alpha)) + dot(v, &coroot);
    integral_degree(degree, || format!("C_{alpha},v[{facet}]"))
}

/// Every `B`-stable curve class with its degree: ridges first, then the
/// admissible `(α, v)` pairs in lexicographic order.
pub fn curve_table<S: Scalar>(emb: &FanoEmbedding<S>) -> Result<Vec<CurveClass>, CurveError> {
    let mut table = Vec::new();
    for (i, ridge) in emb.ridges().iter().enumerate() {
        table.push(CurveClass { kind: CurveKind::Mu { ridge: i }, degree: degree_mu(emb, ridge)? });
    }
    for &alpha in emb.space().marked().difference(emb.colors()) {
        for facet in 0..emb.polytope().facets().len() {
            match degree_alpha_v(emb, alpha, facet) {
                Ok(degree) => table.push(CurveClass { kind: CurveKind::AlphaV { alpha, facet }, degree }),
                Err(CurveError::OutsideCone { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(table)
}

/// `ι̂`: the least degree of a `B`-stable curve, with the first class
/// attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoIndex {
    pub value: BigInt,
    pub witness: CurveClass,
}

pub fn pseudo_index_from_table(table: &[CurveClass]) -> Option<PseudoIndex> {
    let witness = table.iter().min_by(|a, b| a.degree.cmp(&b.degree))?.clone();
    Some(PseudoIndex { value: witness.degree.clone(), witness })
}

pub fn pseudo_index_estimate<S: Scalar>(emb: &FanoEmbedding<S>) -> Result<PseudoIndex, CurveError> {
    let table = curve_table(emb)?;
    Ok(pseudo_index_from_table(&table).expect("every polytope has at least one ridge"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyCheck {
    pub holds: bool,
    /// A minimizing `(u, facet)` pair with `u` not adjacent to the facet.
    pub counterexample: Option<(usize, usize)>,
}

/// Every `ε_Q`-minimizing vertex `u` lies on a facet meeting `F_v` in a ridge.
pub fn check_adjacency_lemma<S: Scalar>(emb: &FanoEmbedding<S>, eps: &EpsilonWitness<S>) -> AdjacencyCheck {
    let q = emb.polytope();
    let counterexample = eps.minimizers.iter().copied().find(|&(u, fv)| {
        !q.neighbours(fv)
            .into_iter()
            .any(|g| q.facets()[g].contains_vertex(u))
    });
    AdjacencyCheck { holds: counterexample.is_none(), counterexample }
}

/// `ε_Q · r ≤ Σ_u a_u`.
pub fn epsilon_vertex_bound<S: Scalar>(emb: &FanoEmbedding<S>, eps: &S) -> bool {
    let sum: i64 = emb.vertex_weights().iter().sum();
    eps.clone() * S::from_i64(emb.r() as i64) <= S::from_i64(sum)
}

pub(crate) fn bigint_to_scalar<S: Scalar>(x: &BigInt) -> S {
    S::from_bigint(x).expect("small enough for the scalar type")
}

/// Smallest `a_α + ⟨v, α̌_M⟩` over the admissible facets, for a non-color `α`.
pub fn min_alpha_degree<S: Scalar>(emb: &FanoEmbedding<S>, alpha: RootId) -> Result<Option<BigInt>, CurveError> {
    let mut best: Option<BigInt> = None;
    for facet in 0..emb.polytope().facets().len() {
        match degree_alpha_v(emb, alpha, facet) {
            Ok(d) => best = Some(best.map_or(d.clone(), |b| b.min(d))),
            Err(CurveError::OutsideCone { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(best)
}
