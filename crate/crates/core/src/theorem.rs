//! The pseudo-index inequality `(ι − 1) ρ ≤ d` and its equality case.
//!
//! All statements are phrased in terms of the `B`-stable estimate `ι̂ ≥ ι_X`
//! from [`crate::curves`], so `(ι̂ − 1)ρ ≤ d` implies the bound for `ι_X`.
//! When equality holds, [`classify_equality`] splits `X` into a product of
//! projective spaces `P^{ι̂−1}`: one factor per marked root with zero
//! restriction, and one factor per vertex of `Q` off a fixed facet.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::curves::{self, bigint_to_scalar, CurveError, EpsilonWitness, PseudoIndex};
use crate::exactal::{self, dot, LatticeVector, Scalar};
use crate::horo::FanoEmbedding;
use crate::rootsys::{Condition4Prime, RootId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("equality case could not be classified: {0}")]
    Classification(#[from] ClassifyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("not an equality case: {lhs} < {d}")]
    NotEquality { lhs: BigInt, d: usize },
    #[error("equality condition {0} fails")]
    ConditionFails(&'static str),
    #[error("marked root {0} has nonzero restriction but is not a color")]
    UncoloredRoot(RootId),
    #[error("zero-restriction root {root} has a_alpha = {a}, expected {expected}")]
    FlagFactor { root: RootId, a: i64, expected: BigInt },
    #[error("facet {facet}: its vertices are not a basis of N_R")]
    SingularFacet { facet: usize },
    #[error("facet {facet}: v differs from -(e_1* + ... + e_n*)")]
    DualBasisSum { facet: usize },
    #[error("facet {facet}: no unique facet across the ridge opposite e_{k}")]
    AmbiguousNeighbour { facet: usize, k: usize },
    #[error("facet {facet}: v_{k} differs from v + (eps/a_e) e_{k}*")]
    DualVertexFormula { facet: usize, k: usize },
    #[error("facet {facet}: vertex relation for f_{j} fails")]
    VertexRelation { facet: usize, j: usize },
    #[error("facet {facet}: the sublattices M_j do not split M")]
    NotDirectSum { facet: usize },
    #[error("factor {j} from facet {facet} has dimension {got}, expected {expected}")]
    FactorDimension { facet: usize, j: usize, got: usize, expected: BigInt },
    #[error("factors have total dimension {got}, expected d = {expected}")]
    TotalDimension { got: usize, expected: usize },
    #[error("{got} factors, expected rho = {expected}")]
    FactorCount { got: usize, expected: i64 },
    #[error("decompositions from facets {first} and {second} disagree")]
    Disagreement { first: usize, second: usize },
}

/// The intermediate inequalities of the proof, each evaluated exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InequalityChain {
    /// `ι̂ ≤ ε_Q`.
    pub iota_le_epsilon: bool,
    /// `ε_Q · r ≤ Σ_u a_u`.
    pub epsilon_vertex_bound: bool,
    /// `Σ_u a_u = Σ_{α∈D} a_α + ρ + n − #(S\I)`.
    pub vertex_weight_identity: bool,
    /// `ρ(ι̂ − 1) ≤ Σ_{α∈S\I}(a_α − 1) + n`.
    pub picard_bound: bool,
    /// `Σ_{α∈S\I}(a_α − 1) + n ≤ d`.
    pub root_bound: bool,
}

impl InequalityChain {
    pub fn all(&self) -> bool {
        self.iota_le_epsilon
            && self.epsilon_vertex_bound
            && self.vertex_weight_identity
            && self.picard_bound
            && self.root_bound
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityConditions {
    /// `a_u(1 + ⟨v,u⟩) ∈ {0, ε_Q}` for every vertex and dual vertex.
    pub c1_prime: bool,
    /// `ι̂ = ε_Q`.
    pub c2: bool,
    /// `ι̂ = a_α` for every non-color marked root.
    pub c3: bool,
    /// `Σ(a_α − 1) + n = d`.
    pub c4: bool,
    /// Dynkin pattern: at most one marked node per component, at a simple
    /// end of a type A or C component.
    pub c4_prime: bool,
    pub c4_prime_detail: Condition4Prime,
    pub locally_factorial: bool,
}

impl EqualityConditions {
    /// The four conditions equivalent to equality.
    pub fn all(&self) -> bool {
        self.c1_prime && self.c2 && self.c3 && self.c4
    }

    /// Names of the failing conditions among c1′, c2, c3, c4.
    pub fn violated(&self) -> Vec<&'static str> {
        [(self.c1_prime, "c1′"), (self.c2, "c2"), (self.c3, "c3"), (self.c4, "c4")]
            .into_iter()
            .filter(|(ok, _)| !ok)
            .map(|(_, name)| name)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOrigin {
    /// `G/P(ω_α)` split off for a marked root with `α̌_M = 0`.
    ZeroRestriction { root: RootId },
    /// The factor built on `f_j` and the `e_k` with `φ(k) = j`.
    Polytope { vertices: Vec<usize>, roots: Vec<RootId>, sublattice: Vec<LatticeVector> },
}

/// A projective-space factor `P^dim` of the equality case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductFactor {
    pub dim: usize,
    pub origin: FactorOrigin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub factors: Vec<ProductFactor>,
    /// Facet (dual vertex) the polytope factors were read from.
    pub base_facet: usize,
    /// Locally factorial and the Dynkin pattern holds.
    pub smooth_by_criterion: bool,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|x| projective_space(x.dim)).collect();
        write!(f, "X ≅ {}", parts.join(" × "))
    }
}

/// `P` with a superscript dimension, e.g. `P²`.
pub fn projective_space(dim: usize) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    let digits: String = dim.to_string().chars().map(|c| SUP[c.to_digit(10).unwrap() as usize]).collect();
    format!("P{digits}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport<S> {
    pub epsilon: EpsilonWitness<S>,
    pub pseudo_index: PseudoIndex,
    pub picard_number: i64,
    pub dimension: usize,
    pub rank: usize,
    pub r: usize,
    /// `Σ_{α∈S\I}(a_α − 1) + n`.
    pub root_bound: i64,
    /// `(ι̂ − 1) ρ`.
    pub lhs: BigInt,
    pub inequality_holds: bool,
    pub equality: bool,
    pub chain: InequalityChain,
    pub conditions: Option<EqualityConditions>,
    pub classification: Option<Classification>,
}

pub fn verify_inequality<S: Scalar>(emb: &FanoEmbedding<S>) -> Result<TheoremReport<S>, TheoremError> {
    let space = emb.space();
    let epsilon = curves::epsilon_q(emb)?;
    let pseudo_index = curves::pseudo_index_estimate(emb)?;
    let iota = &pseudo_index.value;
    let rho = emb.picard_number();
    let d = emb.dimension();
    let n = emb.rank();

    let root_bound: i64 = space.marked().iter().map(|&a| space.a_alpha(a) - 1).sum::<i64>() + n as i64;
    let lhs = (iota - BigInt::one()) * BigInt::from(rho);

    let sum_au: i64 = emb.vertex_weights().iter().sum();
    let colored_a: i64 = emb.colors().iter().map(|&a| space.a_alpha(a)).sum();
    let chain = InequalityChain {
        iota_le_epsilon: bigint_to_scalar::<S>(iota) <= epsilon.value,
        epsilon_vertex_bound: curves::epsilon_vertex_bound(emb, &epsilon.value),
        vertex_weight_identity: sum_au == colored_a + rho + n as i64 - space.marked().len() as i64,
        picard_bound: lhs <= BigInt::from(root_bound),
        root_bound: root_bound <= d as i64,
    };
    Ok(TheoremReport {
        inequality_holds: lhs <= BigInt::from(d),
        equality: lhs == BigInt::from(d),
        epsilon,
        pseudo_index,
        picard_number: rho,
        dimension: d,
        rank: n,
        r: emb.r(),
        root_bound,
        lhs,
        chain,
        conditions: None,
        classification: None,
    })
}

pub fn check_equality_conditions<S: Scalar>(emb: &FanoEmbedding<S>, report: &TheoremReport<S>) -> EqualityConditions {
    let space = emb.space();
    let q = emb.polytope();
    let eps = &report.epsilon.value;
    let iota = &report.pseudo_index.value;

    let c1_prime = (0..q.vertices().len()).all(|u| {
        (0..q.facets().len()).all(|f| {
            let x = curves::weighted_pairing(emb, u, f);
            x.is_zero() || x == *eps
        })
    });
    let c2 = bigint_to_scalar::<S>(iota) == *eps;
    let c3 = space
        .marked()
        .difference(emb.colors())
        .all(|&a| *iota == BigInt::from(space.a_alpha(a)));
    let c4 = report.root_bound == report.dimension as i64;
    let detail = space
        .roots()
        .check_condition4_prime(space.marked())
        .expect("marked roots belong to the root system");
    EqualityConditions {
        c1_prime,
        c2,
        c3,
        c4,
        c4_prime: detail.holds(),
        c4_prime_detail: detail,
        locally_factorial: emb.is_locally_factorial(),
    }
}

/// Decomposes an equality case into projective-space factors, verifying
/// every identity along the way.
pub fn classify_equality<S: Scalar>(
    emb: &FanoEmbedding<S>,
    report: &TheoremReport<S>,
) -> Result<Classification, ClassifyError> {
    if !report.equality {
        return Err(ClassifyError::NotEquality { lhs: report.lhs.clone(), d: report.dimension });
    }
    let conditions = match &report.conditions {
        Some(c) => c.clone(),
        None => check_equality_conditions(emb, report),
    };
    if let Some(&name) = conditions.violated().first() {
        return Err(ClassifyError::ConditionFails(name));
    }
    let space = emb.space();
    let iota = &report.pseudo_index.value;
    let expected_dim = iota - BigInt::one();

    let mut flag_factors = Vec::new();
    for &alpha in space.marked() {
        if space.coroot_restriction(alpha).is_zero() {
            let a = space.a_alpha(alpha);
            if BigInt::from(a) != *iota {
                return Err(ClassifyError::FlagFactor { root: alpha, a, expected: iota.clone() });
            }
            flag_factors.push(ProductFactor { dim: (a - 1) as usize, origin: FactorOrigin::ZeroRestriction { root: alpha } });
        } else if !emb.colors().contains(&alpha) {
            return Err(ClassifyError::UncoloredRoot(alpha));
        }
    }

    let mut base: Option<Vec<ProductFactor>> = None;
    for facet in 0..emb.polytope().facets().len() {
        let factors = split_at_facet(emb, &report.epsilon.value, facet, &expected_dim)?;
        match &base {
            None => base = Some(factors),
            Some(first) => {
                let dims = |fs: &[ProductFactor]| {
                    let mut d: Vec<usize> = fs.iter().map(|f| f.dim).collect();
                    d.sort();
                    d
                };
                if dims(first) != dims(&factors) {
                    return Err(ClassifyError::Disagreement { first: 0, second: facet });
                }
            }
        }
    }
    let mut factors = flag_factors;
    factors.extend(base.expect("a polytope has facets"));

    if factors.len() as i64 != report.picard_number {
        return Err(ClassifyError::FactorCount { got: factors.len(), expected: report.picard_number });
    }
    let total: usize = factors.iter().map(|f| f.dim).sum();
    if total != report.dimension {
        return Err(ClassifyError::TotalDimension { got: total, expected: report.dimension });
    }
    Ok(Classification {
        factors,
        base_facet: 0,
        smooth_by_criterion: conditions.locally_factorial && conditions.c4_prime,
    })
}

/// One run of the product decomposition from the dual vertex of `facet`.
fn split_at_facet<S: Scalar>(
    emb: &FanoEmbedding<S>,
    eps: &S,
    facet: usize,
    expected_dim: &BigInt,
) -> Result<Vec<ProductFactor>, ClassifyError> {
    let q = emb.polytope();
    let n = emb.rank();
    let fv = &q.facets()[facet];
    let v = &fv.normal;
    let e: Vec<usize> = fv.vertices.clone();
    let f: Vec<usize> = (0..q.vertices().len()).filter(|u| !fv.contains_vertex(*u)).collect();
    let point = |i: usize| &q.vertices()[i];
    let weight = |i: usize| S::from_i64(emb.vertex_weights()[i]);

    // dual basis: ⟨e_k*, e_i⟩ = δ_ki
    let rows: Vec<Vec<S>> = e.iter().map(|&i| point(i).clone()).collect();
    let dual_basis: Vec<Vec<S>> = (0..n)
        .map(|k| {
            let delta: Vec<S> = (0..n).map(|i| if i == k { S::one() } else { S::zero() }).collect();
            exactal::solve_linear(&rows, &delta).map_err(|_| ClassifyError::SingularFacet { facet })
        })
        .collect::<Result<_, _>>()?;
    let neg_sum: Vec<S> = (0..n)
        .map(|c| -dual_basis.iter().fold(S::zero(), |acc, d| acc + d[c].clone()))
        .collect();
    if neg_sum != *v {
        return Err(ClassifyError::DualBasisSum { facet });
    }

    // φ(k): the vertex f_j closing the ridge F_v \ {e_k} on the other side
    let mut phi = Vec::with_capacity(n);
    for (k, &ek) in e.iter().enumerate() {
        let across: Vec<usize> = q
            .facets()
            .iter()
            .enumerate()
            .filter(|&(g, other)| g != facet && e.iter().all(|&x| x == ek || other.contains_vertex(x)))
            .map(|(g, _)| g)
            .collect();
        let [g] = across.as_slice() else {
            return Err(ClassifyError::AmbiguousNeighbour { facet, k });
        };
        let other = &q.facets()[*g];
        let new: Vec<usize> = other.vertices.iter().copied().filter(|x| !fv.contains_vertex(*x)).collect();
        let [fj] = new.as_slice() else {
            return Err(ClassifyError::AmbiguousNeighbour { facet, k });
        };
        let j = f.iter().position(|x| x == fj).expect("vertex off F_v");
        let step = eps.clone() / weight(ek);
        let predicted: Vec<S> = v
            .iter()
            .zip(&dual_basis[k])
            .map(|(a, b)| a.clone() + step.clone() * b.clone())
            .collect();
        if predicted != other.normal {
            return Err(ClassifyError::DualVertexFormula { facet, k });
        }
        phi.push(j);
    }

    // a_{f_j} f_j + Σ_{φ(k)=j} a_{e_k} e_k = 0
    for (j, &fj) in f.iter().enumerate() {
        let mut sum = exactal::scale(point(fj), &weight(fj));
        for (k, &ek) in e.iter().enumerate() {
            if phi[k] == j {
                for (s, x) in sum.iter_mut().zip(point(ek)) {
                    *s = s.clone() + weight(ek) * x.clone();
                }
            }
        }
        if !sum.iter().all(Zero::is_zero) {
            return Err(ClassifyError::VertexRelation { facet, j });
        }
    }

    // M_j = {m : ⟨m, e_k⟩ = 0 for φ(k) ≠ j}
    let mut sublattices = Vec::with_capacity(f.len());
    for j in 0..f.len() {
        let constraints: Vec<LatticeVector> = e
            .iter()
            .enumerate()
            .filter(|&(k, _)| phi[k] != j)
            .map(|(_, &ek)| exactal::primitive(point(ek)).expect("vertices are nonzero"))
            .collect();
        sublattices.push(exactal::integer_kernel(&constraints, n));
    }
    if !exactal::sublattice_direct_sum(&sublattices, n) {
        return Err(ClassifyError::NotDirectSum { facet });
    }

    let roots = emb.space().roots();
    let mut factors = Vec::with_capacity(f.len());
    for (j, (&fj, sublattice)) in f.iter().zip(sublattices).enumerate() {
        let mut vertices = vec![fj];
        vertices.extend(e.iter().enumerate().filter(|&(k, _)| phi[k] == j).map(|(_, &ek)| ek));
        vertices.sort();
        let factor_roots: Vec<RootId> = vertices.iter().filter_map(|&u| emb.vertex_root(u)).collect();
        let flag_dim: usize = factor_roots
            .iter()
            .map(|&alpha| {
                let others: BTreeSet<RootId> = roots.complement(&[alpha].into());
                roots.dim_flag(&others).expect("known root")
            })
            .sum();
        let dim = vertices.len() - 1 + flag_dim;
        if BigInt::from(dim) != *expected_dim {
            return Err(ClassifyError::FactorDimension { facet, j, got: dim, expected: expected_dim.clone() });
        }
        factors.push(ProductFactor {
            dim,
            origin: FactorOrigin::Polytope { vertices, roots: factor_roots, sublattice },
        });
    }
    // not used beyond the check above, but keeps v in the dual basis frame
    debug_assert!(e.iter().all(|&i| dot(v, point(i)) == -S::one()));
    Ok(factors)
}

/// Inequality, equality conditions and (in the equality case) the
/// classification, in one report.
pub fn verify<S: Scalar>(emb: &FanoEmbedding<S>) -> Result<TheoremReport<S>, TheoremError> {
    let mut report = verify_inequality(emb)?;
    let conditions = check_equality_conditions(emb, &report);
    report.conditions = Some(conditions);
    if report.equality {
        report.classification = Some(classify_equality(emb, &report)?);
    }
    Ok(report)
}
