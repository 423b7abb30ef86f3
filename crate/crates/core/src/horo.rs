//! Horospherical homogeneous spaces and their Fano embeddings.
//!
//! A [`HoroSpace`] carries the combinatorics of `G/H`: the root system of
//! `G`, the marked simple roots `S \ I`, the rank `n` of the lattice `M` and
//! the restrictions `α̌_M ∈ N` of the marked coroots. Binding a polytope `Q`
//! to it yields a [`FanoEmbedding`] once `Q` is checked to be
//! `G/H`-reflexive and the embedding is Q-factorial.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exactal::{self, LatticeVector, Scalar};
use crate::polytope::{FacetedPolytope, Location, PolytopeError, RationalPolytope, Ridge};
use crate::rootsys::{RootId, RootSystemData, RootSystemError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoroError {
    #[error("rank 0 is the flag-variety case, which has no polytope description; use n >= 1")]
    ZeroRank,
    #[error("coroot restriction of {root} has length {got}, expected {expected}")]
    RestrictionLength { root: RootId, expected: usize, got: usize },
    #[error("missing coroot restriction for marked root {0}")]
    MissingRestriction(RootId),
    #[error("coroot restriction given for unmarked root {0}")]
    UnexpectedRestriction(RootId),
    #[error("weight basis vector {index} has length {got}, expected at least {expected}")]
    WeightLength { index: usize, expected: usize, got: usize },
    #[error("weight basis has {got} vectors, expected {expected}")]
    WeightCount { expected: usize, got: usize },
    #[error("weight basis vector {index} pairs nontrivially with the coroot of unmarked root {root}")]
    WeightNotTrivialOnI { index: usize, root: RootId },
    #[error("weight basis is linearly dependent")]
    WeightBasisDependent,
    #[error("supplied restriction {supplied} of {root} differs from the one computed from weights, {computed}")]
    RestrictionMismatch { root: RootId, supplied: LatticeVector, computed: LatticeVector },
    #[error("polytope lives in dimension {got}, lattice rank is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polytope is not G/H-reflexive: {}", .0.summary())]
    NotReflexive(Box<ReflexivityReport>),
    #[error("embedding is not Q-factorial: {0}")]
    NotQFactorial(String),
    #[error("point of {0} lies outside the polytope")]
    ColorOutside(RootId),
    #[error("coordinate does not fit the scalar type")]
    Overflow,
    #[error(transparent)]
    RootSystem(#[from] RootSystemError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeMode {
    /// `α̌_M` supplied directly.
    Direct,
    /// `M` given by a basis in fundamental-weight coordinates; coordinates
    /// past the semisimple rank are characters of a central torus.
    Weights { basis: Vec<LatticeVector> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoroSpace {
    roots: RootSystemData,
    marked: BTreeSet<RootId>,
    rank: usize,
    coroots: BTreeMap<RootId, LatticeVector>,
    a: BTreeMap<RootId, i64>,
    mode: LatticeMode,
}

impl HoroSpace {
    /// The torus `(C*)^n` acting on itself.
    pub fn toric(rank: usize) -> Result<Self, HoroError> {
        let roots = RootSystemData::build(&[])?;
        Self::direct(roots, BTreeSet::new(), rank, BTreeMap::new())
    }

    pub fn direct(
        roots: RootSystemData,
        marked: BTreeSet<RootId>,
        rank: usize,
        coroots: BTreeMap<RootId, LatticeVector>,
    ) -> Result<Self, HoroError> {
        Self::assemble(roots, marked, rank, coroots, LatticeMode::Direct)
    }

    /// Derives `α̌_M = (⟨m_1,α̌⟩, …, ⟨m_n,α̌⟩)` from a basis of `M`, checking
    /// that `M` pairs trivially with the coroots of `I`. Any `supplied`
    /// restrictions must agree with the derived ones.
    pub fn from_weights(
        roots: RootSystemData,
        marked: BTreeSet<RootId>,
        basis: Vec<LatticeVector>,
        supplied: Option<&BTreeMap<RootId, LatticeVector>>,
    ) -> Result<Self, HoroError> {
        let rank = basis.len();
        if rank == 0 {
            return Err(HoroError::ZeroRank);
        }
        let width = roots.rank();
        let len = basis[0].len();
        for (index, m) in basis.iter().enumerate() {
            if m.len() < width || m.len() != len {
                return Err(HoroError::WeightLength { index, expected: width.max(len), got: m.len() });
            }
        }
        for &id in &marked {
            roots.index_of(id)?;
        }
        for (i, &id) in roots.simple_root_ids().iter().enumerate() {
            if marked.contains(&id) {
                continue;
            }
            if let Some(index) = basis.iter().position(|m| !m.0[i].is_zero()) {
                return Err(HoroError::WeightNotTrivialOnI { index, root: id });
            }
        }
        let as_rational: Vec<Vec<num_rational::BigRational>> = basis
            .iter()
            .map(|m| m.to_scalars().expect("big rationals hold any integer"))
            .collect();
        if exactal::rank(&as_rational) != rank {
            return Err(HoroError::WeightBasisDependent);
        }
        let mut coroots = BTreeMap::new();
        for &id in &marked {
            let i = roots.index_of(id)?;
            let computed = LatticeVector(basis.iter().map(|m| m.0[i].clone()).collect());
            if let Some(given) = supplied.and_then(|s| s.get(&id)) {
                if *given != computed {
                    return Err(HoroError::RestrictionMismatch { root: id, supplied: given.clone(), computed });
                }
            }
            coroots.insert(id, computed);
        }
        if let Some(extra) = supplied.and_then(|s| s.keys().find(|k| !marked.contains(k))) {
            return Err(HoroError::UnexpectedRestriction(*extra));
        }
        Self::assemble(roots, marked, rank, coroots, LatticeMode::Weights { basis })
    }

    fn assemble(
        roots: RootSystemData,
        marked: BTreeSet<RootId>,
        rank: usize,
        coroots: BTreeMap<RootId, LatticeVector>,
        mode: LatticeMode,
    ) -> Result<Self, HoroError> {
        if rank == 0 {
            return Err(HoroError::ZeroRank);
        }
        for &id in &marked {
            roots.index_of(id)?;
            let c = coroots.get(&id).ok_or(HoroError::MissingRestriction(id))?;
            if c.len() != rank {
                return Err(HoroError::RestrictionLength { root: id, expected: rank, got: c.len() });
            }
        }
        if let Some(extra) = coroots.keys().find(|k| !marked.contains(k)) {
            return Err(HoroError::UnexpectedRestriction(*extra));
        }
        let a = marked
            .iter()
            .map(|&id| Ok((id, roots.a_alpha(&marked, id)?)))
            .collect::<Result<_, RootSystemError>>()?;
        Ok(HoroSpace { roots, marked, rank, coroots, a, mode })
    }

    pub fn roots(&self) -> &RootSystemData {
        &self.roots
    }

    /// `S \ I`.
    pub fn marked(&self) -> &BTreeSet<RootId> {
        &self.marked
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn mode(&self) -> &LatticeMode {
        &self.mode
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.mode, LatticeMode::Direct)
    }

    pub fn coroot_restriction(&self, alpha: RootId) -> &LatticeVector {
        &self.coroots[&alpha]
    }

    pub fn coroot_restrictions(&self) -> &BTreeMap<RootId, LatticeVector> {
        &self.coroots
    }

    pub fn a_alpha(&self, alpha: RootId) -> i64 {
        self.a[&alpha]
    }

    /// `α̌_M / a_α`.
    pub fn color_point<S: Scalar>(&self, alpha: RootId) -> Result<Vec<S>, HoroError> {
        let a = S::from_i64(self.a_alpha(alpha));
        self.coroot_restriction(alpha)
            .to_scalars::<S>()
            .map(|v| v.into_iter().map(|x| x / a.clone()).collect())
            .ok_or(HoroError::Overflow)
    }

    /// `d = dim G/P + n`.
    pub fn variety_dimension(&self) -> usize {
        let unmarked = self.roots.complement(&self.marked);
        self.roots.dim_flag(&unmarked).expect("ids come from the root system") + self.rank
    }

    fn check_dim<S: Scalar>(&self, q: &RationalPolytope<S>) -> Result<(), HoroError> {
        if q.dim() != self.rank {
            return Err(HoroError::DimensionMismatch { expected: self.rank, got: q.dim() });
        }
        Ok(())
    }
}

/// Outcome of the three reflexivity conditions on `Q`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReflexivityReport {
    /// Every vertex lies in `N` or is some `α̌_M/a_α`.
    pub vertices_admissible: bool,
    pub origin_interior: bool,
    /// `Q*` is a lattice polytope.
    pub dual_integral: bool,
    /// Every `α̌_M/a_α` lies in `Q`.
    pub points_contained: bool,
    pub diagnostics: Vec<String>,
}

impl ReflexivityReport {
    pub fn condition1(&self) -> bool {
        self.vertices_admissible && self.origin_interior
    }

    pub fn passed(&self) -> bool {
        self.condition1() && self.dual_integral && self.points_contained
    }

    /// First failing condition, numbered 1–3.
    pub fn first_failure(&self) -> Option<u8> {
        if !self.condition1() {
            Some(1)
        } else if !self.dual_integral {
            Some(2)
        } else if !self.points_contained {
            Some(3)
        } else {
            None
        }
    }

    pub fn summary(&self) -> String {
        match self.first_failure() {
            None => "all conditions hold".into(),
            Some(k) => format!("condition ({k}) fails: {}", self.diagnostics.join("; ")),
        }
    }
}

pub fn validate_reflexive<S: Scalar>(space: &HoroSpace, q: &RationalPolytope<S>) -> Result<ReflexivityReport, HoroError> {
    space.check_dim(q)?;
    let mut report = ReflexivityReport::default();
    let points: Vec<(RootId, Vec<S>)> = space
        .marked
        .iter()
        .map(|&id| Ok((id, space.color_point::<S>(id)?)))
        .collect::<Result<_, HoroError>>()?;

    report.vertices_admissible = true;
    for (i, v) in q.vertices().iter().enumerate() {
        if !exactal::is_integral_vector(v) && !points.iter().any(|(_, p)| p == v) {
            report.vertices_admissible = false;
            report.diagnostics.push(format!("vertex {i} is neither integral nor a coroot point"));
        }
    }

    let faceted = match q.clone().with_facets() {
        Ok(f) => f,
        Err(PolytopeError::OriginNotInterior) => {
            report.diagnostics.push("0 is not in the interior".into());
            return Ok(report);
        }
        Err(e) => return Err(e.into()),
    };
    report.origin_interior = true;

    report.dual_integral = true;
    for (i, f) in faceted.facets().iter().enumerate() {
        if !exactal::is_integral_vector(&f.normal) {
            report.dual_integral = false;
            let coords: Vec<String> = f.normal.iter().map(ToString::to_string).collect();
            report.diagnostics.push(format!("dual vertex {i} = ({}) is not integral", coords.join(", ")));
        }
    }

    report.points_contained = true;
    for (id, p) in &points {
        if faceted.contains(p) == Location::Outside {
            report.points_contained = false;
            report.diagnostics.push(format!("point of {id} lies outside Q"));
        }
    }
    Ok(report)
}

/// Marked roots whose point `α̌_M/a_α` lies on the boundary of `Q`.
pub fn compute_colors<S: Scalar>(space: &HoroSpace, q: &FacetedPolytope<S>) -> Result<BTreeSet<RootId>, HoroError> {
    let mut colors = BTreeSet::new();
    for &id in &space.marked {
        match q.contains(&space.color_point::<S>(id)?) {
            Location::Boundary => {
                colors.insert(id);
            }
            Location::Interior => {}
            Location::Outside => return Err(HoroError::ColorOutside(id)),
        }
    }
    Ok(colors)
}

/// Why the embedding fails to be Q-factorial, if it does.
pub fn q_factorial_obstruction<S: Scalar>(
    space: &HoroSpace,
    q: &FacetedPolytope<S>,
    colors: &BTreeSet<RootId>,
) -> Result<Option<String>, HoroError> {
    if !q.is_simplicial() {
        return Ok(Some("Q is not simplicial".into()));
    }
    let mut used = BTreeMap::new();
    for &id in colors {
        let p = space.color_point::<S>(id)?;
        let Some(v) = q.vertex_index(&p) else {
            return Ok(Some(format!("point of color {id} is not a vertex of Q")));
        };
        if let Some(other) = used.insert(v, id) {
            return Ok(Some(format!("colors {other} and {id} share vertex {v}")));
        }
    }
    Ok(None)
}

pub fn is_q_factorial<S: Scalar>(space: &HoroSpace, q: &FacetedPolytope<S>, colors: &BTreeSet<RootId>) -> bool {
    matches!(q_factorial_obstruction(space, q, colors), Ok(None))
}

/// A Q-factorial Fano `G/H`-embedding, described by its reflexive polytope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoEmbedding<S> {
    space: HoroSpace,
    q: FacetedPolytope<S>,
    dual: RationalPolytope<S>,
    ridges: Vec<Ridge>,
    colors: BTreeSet<RootId>,
    vertex_roots: Vec<Option<RootId>>,
    vertex_weights: Vec<i64>,
    r: usize,
    picard_number: i64,
    dimension: usize,
}

pub fn build_embedding<S: Scalar>(space: HoroSpace, q: RationalPolytope<S>) -> Result<FanoEmbedding<S>, HoroError> {
    let report = validate_reflexive(&space, &q)?;
    if !report.passed() {
        return Err(HoroError::NotReflexive(Box::new(report)));
    }
    let q = q.with_facets()?;
    let colors = compute_colors(&space, &q)?;
    if let Some(reason) = q_factorial_obstruction(&space, &q, &colors)? {
        return Err(HoroError::NotQFactorial(reason));
    }
    let dual = q.dual()?;
    let ridges = q.ridges()?;

    let mut vertex_roots = vec![None; q.vertices().len()];
    for &id in &space.marked {
        if let Some(v) = q.vertex_index(&space.color_point::<S>(id)?) {
            vertex_roots[v] = Some(id);
        }
    }
    let vertex_weights = vertex_roots
        .iter()
        .map(|r| r.map_or(1, |id| space.a_alpha(id)))
        .collect();
    let r = q.vertices().len() - space.rank;
    let picard_number = r as i64 + space.marked.len() as i64 - colors.len() as i64;
    let dimension = space.variety_dimension();
    Ok(FanoEmbedding {
        space,
        q,
        dual,
        ridges,
        colors,
        vertex_roots,
        vertex_weights,
        r,
        picard_number,
        dimension,
    })
}

/// The closed `G`-orbit `G/P_{I ∪ J_v}` attached to a dual vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedOrbit<S> {
    pub facet: usize,
    pub dual_vertex: Vec<S>,
    /// `J_v`: marked roots whose point lies on `F_v`.
    pub roots: BTreeSet<RootId>,
    pub dimension: usize,
}

/// A maximal colored cone `(C_F, D_F)` of the colored fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredCone {
    pub facet: usize,
    pub colors: BTreeSet<RootId>,
}

impl<S: Scalar> FanoEmbedding<S> {
    pub fn space(&self) -> &HoroSpace {
        &self.space
    }

    pub fn polytope(&self) -> &FacetedPolytope<S> {
        &self.q
    }

    pub fn dual(&self) -> &RationalPolytope<S> {
        &self.dual
    }

    pub fn ridges(&self) -> &[Ridge] {
        &self.ridges
    }

    pub fn colors(&self) -> &BTreeSet<RootId> {
        &self.colors
    }

    pub fn rank(&self) -> usize {
        self.space.rank
    }

    /// `a_u` for every vertex `u`, in vertex order.
    pub fn vertex_weights(&self) -> &[i64] {
        &self.vertex_weights
    }

    /// The marked root whose point is vertex `u`, if any.
    pub fn vertex_root(&self, u: usize) -> Option<RootId> {
        self.vertex_roots[u]
    }

    /// `#V(Q) − n`.
    pub fn r(&self) -> usize {
        self.r
    }

    /// `ρ_X = r + #(S\I) − #D_X`.
    pub fn picard_number(&self) -> i64 {
        self.picard_number
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn closed_orbits(&self) -> Vec<ClosedOrbit<S>> {
        let roots = self.space.roots();
        let unmarked = roots.complement(&self.space.marked);
        self.q
            .facets()
            .iter()
            .enumerate()
            .map(|(fi, f)| {
                let j: BTreeSet<RootId> = f
                    .vertices
                    .iter()
                    .filter_map(|&u| self.vertex_roots[u])
                    .collect();
                let parabolic: BTreeSet<RootId> = unmarked.union(&j).copied().collect();
                ClosedOrbit {
                    facet: fi,
                    dual_vertex: f.normal.clone(),
                    dimension: roots.dim_flag(&parabolic).expect("ids come from the root system"),
                    roots: j,
                }
            })
            .collect()
    }

    /// `a_u · u` as a lattice vector.
    pub fn weighted_vertex(&self, u: usize) -> LatticeVector {
        let a = S::from_i64(self.vertex_weights[u]);
        let scaled = exactal::scale(&self.q.vertices()[u], &a);
        exactal::to_lattice(&scaled).expect("a_u · u is integral on a reflexive polytope")
    }

    /// Every facet's weighted vertices `a_u u` form a basis of `N`.
    pub fn is_locally_factorial(&self) -> bool {
        self.q.facets().iter().all(|f| {
            let rows: Vec<LatticeVector> = f.vertices.iter().map(|&u| self.weighted_vertex(u)).collect();
            exactal::det_lattice(&rows).abs() == BigInt::from(1)
        })
    }

    pub fn colored_fan(&self) -> Result<Vec<ColoredCone>, HoroError> {
        (0..self.q.facets().len())
            .map(|fi| {
                let mut colors = BTreeSet::new();
                for &id in &self.colors {
                    let coroot = self
                        .space
                        .coroot_restriction(id)
                        .to_scalars::<S>()
                        .ok_or(HoroError::Overflow)?;
                    if self.q.cone_membership(fi, &coroot)?.is_some() {
                        colors.insert(id);
                    }
                }
                Ok(ColoredCone { facet: fi, colors })
            })
            .collect()
    }
}
