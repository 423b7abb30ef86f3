//! Exact convex geometry of full-dimensional rational polytopes.
//!
//! Facets are found by brute force over `n`-subsets of the vertices, which is
//! exact and plenty fast for the desk-scale polytopes this crate deals with
//! (a handful of vertices in dimension at most ~7).

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use thiserror::Error;

use crate::exactal::{self, dot, ExactError, LatticeVector, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("polytope has no vertices")]
    Empty,
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("vertex {index} has length {got}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("vertices do not affinely span the ambient space")]
    NotSpanning,
    #[error("the origin is not in the interior")]
    OriginNotInterior,
    #[error("listed point {0} is not a vertex")]
    NotAVertex(usize),
    #[error("polytope is not simplicial")]
    NotSimplicial,
    #[error("degenerate ridge")]
    DegenerateRidge,
    #[error("vertex {0} lies on the ridge")]
    VertexOnRidge(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Convex hull of finitely many points of `Q^n` that affinely span `Q^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalPolytope<S> {
    dim: usize,
    vertices: Vec<Vec<S>>,
}

impl<S: Scalar> RationalPolytope<S> {
    /// Duplicate points are dropped, keeping the first occurrence.
    pub fn new(dim: usize, points: Vec<Vec<S>>) -> Result<Self, PolytopeError> {
        if dim == 0 {
            return Err(PolytopeError::ZeroDimension);
        }
        if points.is_empty() {
            return Err(PolytopeError::Empty);
        }
        let mut seen = BTreeSet::new();
        let mut vertices = Vec::with_capacity(points.len());
        for (index, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return Err(PolytopeError::DimensionMismatch { index, expected: dim, got: p.len() });
            }
            if seen.insert(p.clone()) {
                vertices.push(p);
            }
        }
        if affine_rank(&vertices) != dim {
            return Err(PolytopeError::NotSpanning);
        }
        Ok(RationalPolytope { dim, vertices })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.vertices
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Computes the facets; requires `0` in the interior and every listed
    /// point to be a genuine vertex.
    pub fn facets(&self) -> Result<Vec<Facet<S>>, PolytopeError> {
        let mut facets = Vec::new();
        for f in affine_facets(&self.vertices, self.dim) {
            if !f.offset.is_negative() {
                return Err(PolytopeError::OriginNotInterior);
            }
            let level = -f.offset.clone();
            let normal = f.normal.iter().map(|x| x.clone() / level.clone()).collect();
            facets.push(Facet { normal, vertices: f.vertices });
        }
        facets.sort_by(|a, b| a.normal.cmp(&b.normal));
        for (i, _) in self.vertices.iter().enumerate() {
            let incident: Vec<Vec<S>> = facets
                .iter()
                .filter(|f| f.vertices.contains(&i))
                .map(|f| f.normal.clone())
                .collect();
            if exactal::rank(&incident) != self.dim {
                return Err(PolytopeError::NotAVertex(i));
            }
        }
        Ok(facets)
    }

    pub fn with_facets(self) -> Result<FacetedPolytope<S>, PolytopeError> {
        let facets = self.facets()?;
        Ok(FacetedPolytope { polytope: self, facets })
    }

    pub fn map_scalar<T: Scalar>(&self) -> Option<RationalPolytope<T>> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| T::from_big_rational(&x.to_big_rational())).collect())
            .collect::<Option<Vec<Vec<T>>>>()?;
        Some(RationalPolytope { dim: self.dim, vertices })
    }
}

/// A facet `F_v = {u : ⟨v,u⟩ = −1}` with its normal at level −1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Facet<S> {
    pub normal: Vec<S>,
    /// Sorted indices of the incident vertices.
    pub vertices: Vec<usize>,
}

impl<S> Facet<S> {
    pub fn contains_vertex(&self, index: usize) -> bool {
        self.vertices.binary_search(&index).is_ok()
    }
}

/// Supporting hyperplane `⟨normal, x⟩ ≥ offset` of a facet, in no particular
/// normalization besides being oriented inward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFacet<S> {
    pub normal: Vec<S>,
    pub offset: S,
    pub vertices: Vec<usize>,
}

/// Facets of `conv(points)`, assumed full-dimensional in `Q^dim`.
pub fn affine_facets<S: Scalar>(points: &[Vec<S>], dim: usize) -> Vec<AffineFacet<S>> {
    let mut found: BTreeMap<(Vec<S>, S), Vec<usize>> = BTreeMap::new();
    for subset in (0..points.len()).combinations(dim) {
        let rows: Vec<Vec<S>> = subset
            .iter()
            .map(|&i| {
                let mut r = points[i].clone();
                r.push(-S::one());
                r
            })
            .collect();
        let ker = exactal::kernel(&rows, dim + 1);
        if ker.len() != 1 {
            continue;
        }
        let mut h = ker.into_iter().next().unwrap();
        let offset = h.pop().unwrap();
        let mut normal = h;
        if normal.iter().all(|x| x.is_zero()) {
            continue;
        }
        let slack: Vec<S> = points.iter().map(|p| dot(&normal, p) - offset.clone()).collect();
        let has_pos = slack.iter().any(|s| s.is_positive());
        let has_neg = slack.iter().any(|s| s.is_negative());
        if has_pos && has_neg {
            continue;
        }
        let mut offset = offset;
        if has_neg {
            normal = normal.into_iter().map(|x| -x).collect();
            offset = -offset;
        }
        let unit = if offset.is_zero() {
            normal.iter().find(|x| !x.is_zero()).unwrap().abs()
        } else {
            offset.abs()
        };
        let normal: Vec<S> = normal.into_iter().map(|x| x / unit.clone()).collect();
        let offset = offset / unit;
        found.entry((normal, offset)).or_insert_with(|| {
            slack
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_zero())
                .map(|(i, _)| i)
                .collect()
        });
    }
    found
        .into_iter()
        .map(|((normal, offset), vertices)| AffineFacet { normal, offset, vertices })
        .collect()
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank<S: Scalar>(points: &[Vec<S>]) -> usize {
    let Some(base) = points.first() else {
        return 0;
    };
    let diffs: Vec<Vec<S>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a.clone() - b.clone()).collect())
        .collect();
    exactal::rank(&diffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Interior,
    Boundary,
    Outside,
}

/// A ridge of a simplicial polytope: `n − 1` vertices shared by two facets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ridge {
    pub vertices: Vec<usize>,
    pub facets: [usize; 2],
}

/// A polytope together with its facet list (sorted by normal).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacetedPolytope<S> {
    polytope: RationalPolytope<S>,
    facets: Vec<Facet<S>>,
}

impl<S: Scalar> FacetedPolytope<S> {
    pub fn polytope(&self) -> &RationalPolytope<S> {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim
    }

    pub fn vertices(&self) -> &[Vec<S>] {
        &self.polytope.vertices
    }

    pub fn facets(&self) -> &[Facet<S>] {
        &self.facets
    }

    /// `Q* = {v : ⟨v,u⟩ ≥ −1 ∀u ∈ Q}`; its vertices are the facet normals, in
    /// facet order.
    pub fn dual(&self) -> Result<RationalPolytope<S>, PolytopeError> {
        RationalPolytope::new(self.dim(), self.facets.iter().map(|f| f.normal.clone()).collect())
    }

    pub fn contains(&self, point: &[S]) -> Location {
        let slack = self
            .facets
            .iter()
            .map(|f| dot(&f.normal, point) + S::one())
            .min()
            .expect("polytope has facets");
        if slack.is_positive() {
            Location::Interior
        } else if slack.is_zero() {
            Location::Boundary
        } else {
            Location::Outside
        }
    }

    pub fn vertex_index(&self, point: &[S]) -> Option<usize> {
        self.vertices().iter().position(|v| v.as_slice() == point)
    }

    pub fn is_simplicial(&self) -> bool {
        self.facets.iter().all(|f| f.vertices.len() == self.dim())
    }

    pub fn ridges(&self) -> Result<Vec<Ridge>, PolytopeError> {
        if !self.is_simplicial() {
            return Err(PolytopeError::NotSimplicial);
        }
        if self.dim() == 1 {
            return Ok(vec![Ridge { vertices: Vec::new(), facets: [0, 1] }]);
        }
        let mut owners: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (fi, f) in self.facets.iter().enumerate() {
            for skip in 0..f.vertices.len() {
                let mut r = f.vertices.clone();
                r.remove(skip);
                owners.entry(r).or_default().push(fi);
            }
        }
        owners
            .into_iter()
            .map(|(vertices, fs)| match fs.as_slice() {
                &[a, b] => Ok(Ridge { vertices, facets: [a, b] }),
                _ => Err(PolytopeError::DegenerateRidge),
            })
            .collect()
    }

    /// The primitive `χ ∈ M` vanishing on the ridge and positive on vertex `u`.
    pub fn ridge_normal(&self, ridge: &Ridge, u: usize) -> Result<LatticeVector, PolytopeError> {
        if ridge.vertices.contains(&u) {
            return Err(PolytopeError::VertexOnRidge(u));
        }
        let rows: Vec<Vec<S>> = ridge.vertices.iter().map(|&i| self.vertices()[i].clone()).collect();
        let ker = exactal::kernel(&rows, self.dim());
        if ker.len() != 1 {
            return Err(PolytopeError::DegenerateRidge);
        }
        let mut chi = ker.into_iter().next().unwrap();
        let side = dot(&chi, &self.vertices()[u]);
        if side.is_zero() {
            return Err(PolytopeError::DegenerateRidge);
        }
        if side.is_negative() {
            chi = chi.into_iter().map(|x| -x).collect();
        }
        Ok(exactal::primitive(&chi)?)
    }

    /// Coefficients of `point` in the cone over facet `index`, or `None` when
    /// the point lies outside that cone.
    pub fn cone_membership(&self, index: usize, point: &[S]) -> Result<Option<Vec<S>>, PolytopeError> {
        let gens: Vec<Vec<S>> = self.facets[index]
            .vertices
            .iter()
            .map(|&i| self.vertices()[i].clone())
            .collect();
        if gens.len() != self.dim() {
            return Err(PolytopeError::NotSimplicial);
        }
        Ok(cone_membership(&gens, point)?)
    }

    /// Facet indices that share a ridge with facet `index`.
    pub fn neighbours(&self, index: usize) -> Vec<usize> {
        let target = &self.facets[index];
        self.facets
            .iter()
            .enumerate()
            .filter(|&(j, f)| {
                j != index && f.vertices.iter().filter(|v| target.contains_vertex(**v)).count() + 1 == self.dim()
            })
            .map(|(j, _)| j)
            .collect()
    }
}

/// Solves `point = Σ λ_i g_i` for `n` linearly independent generators; `None`
/// if some `λ_i < 0`.
pub fn cone_membership<S: Scalar>(generators: &[Vec<S>], point: &[S]) -> Result<Option<Vec<S>>, ExactError> {
    let n = point.len();
    let a: Vec<Vec<S>> = (0..n)
        .map(|row| generators.iter().map(|g| g[row].clone()).collect())
        .collect();
    let lambda = exactal::solve_linear(&a, point)?;
    if lambda.iter().any(|x| x.is_negative()) {
        Ok(None)
    } else {
        Ok(Some(lambda))
    }
}
