//! JSON instance files: a root datum, marked roots, the lattice `M` and the
//! vertices of `Q`. Rationals are written as `"p/q"` strings or integers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exactal::{LatticeVector, Scalar};
use crate::horo::{HoroError, HoroSpace};
use crate::polytope::{PolytopeError, RationalPolytope};
use crate::rootsys::{DynkinComponent, DynkinType, RootId, RootSystemData, RootSystemError};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {message} (line {line}, column {column})")]
    Parse { path: String, message: String, line: usize, column: usize },
    #[error("invalid root system: {0}")]
    RootSystem(#[from] RootSystemError),
    #[error("lattice mode {mode} requires `{field}`")]
    MissingField { mode: &'static str, field: &'static str },
    #[error("lattice mode direct does not accept `weight_basis`")]
    StrayWeightBasis,
    #[error("rank is {rank} but the weight basis has {basis} vectors")]
    RankMismatch { rank: usize, basis: usize },
    #[error("vertex {index} has {got} coordinates, expected {expected}")]
    VertexLength { index: usize, expected: usize, got: usize },
    #[error(transparent)]
    Horo(#[from] HoroError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// An exact rational that reads `3`, `"3"`, `"-1/2"` and writes integers
/// as JSON numbers when they fit, `"p/q"` otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate(pub BigRational);

impl FromStr for Coordinate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let bad = || format!("`{s}` is not a rational of the form p or p/q");
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        if q == BigInt::from(0) {
            return Err(format!("`{s}` has zero denominator"));
        }
        Ok(Coordinate(BigRational::new(p, q)))
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Coordinate {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.denom().is_one() {
            if let Ok(n) = i64::try_from(self.0.numer()) {
                return serializer.serialize_i64(n);
            }
        }
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Coordinate {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(deserializer)
            .map_err(|_| serde::de::Error::custom("expected an integer or a \"p/q\" string"))?
        {
            Raw::Int(n) => Ok(Coordinate(BigRational::from_integer(n.into()))),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    #[serde(rename = "type")]
    pub kind: DynkinType,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub components: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Direct,
    Weights,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub mode: ModeName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coroot_restrictions: Option<BTreeMap<RootId, Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_basis: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub vertices: Vec<Vec<Coordinate>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub group: GroupSpec,
    pub marked_roots: BTreeSet<RootId>,
    pub rank: usize,
    pub lattice: LatticeSpec,
    pub polytope: PolytopeSpec,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = match e.path().to_string() {
                p if p == "." => "<root>".to_string(),
                p => p,
            };
            let inner = e.into_inner();
            InstanceError::Parse {
                path,
                message: strip_position(&inner.to_string()),
                line: inner.line(),
                column: inner.column(),
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    /// A toric instance on `Q = conv(vertices)` in `N = Z^n`.
    pub fn toric(vertices: &[Vec<i64>]) -> Self {
        let rank = vertices.first().map_or(0, Vec::len);
        InstanceFile {
            group: GroupSpec { components: Vec::new() },
            marked_roots: BTreeSet::new(),
            rank,
            lattice: LatticeSpec { mode: ModeName::Direct, coroot_restrictions: Some(BTreeMap::new()), weight_basis: None },
            polytope: PolytopeSpec {
                vertices: vertices
                    .iter()
                    .map(|v| v.iter().map(|&x| Coordinate(BigRational::from_integer(x.into()))).collect())
                    .collect(),
            },
        }
    }

    pub fn root_system(&self) -> Result<RootSystemData, InstanceError> {
        let comps: Vec<DynkinComponent> = self
            .group
            .components
            .iter()
            .map(|c| DynkinComponent::new(c.kind, c.rank))
            .collect::<Result<_, _>>()?;
        Ok(RootSystemData::build(&comps)?)
    }

    pub fn space(&self) -> Result<HoroSpace, InstanceError> {
        let roots = self.root_system()?;
        let to_lattice = |m: &BTreeMap<RootId, Vec<i64>>| -> BTreeMap<RootId, LatticeVector> {
            m.iter().map(|(&k, v)| (k, LatticeVector::from_i64s(v))).collect()
        };
        let lat = &self.lattice;
        match lat.mode {
            ModeName::Direct => {
                if lat.weight_basis.is_some() {
                    return Err(InstanceError::StrayWeightBasis);
                }
                let coroots = match &lat.coroot_restrictions {
                    Some(m) => to_lattice(m),
                    None if self.marked_roots.is_empty() => BTreeMap::new(),
                    None => return Err(InstanceError::MissingField { mode: "direct", field: "coroot_restrictions" }),
                };
                Ok(HoroSpace::direct(roots, self.marked_roots.clone(), self.rank, coroots)?)
            }
            ModeName::Weights => {
                let basis = lat
                    .weight_basis
                    .as_ref()
                    .ok_or(InstanceError::MissingField { mode: "weights", field: "weight_basis" })?;
                if basis.len() != self.rank {
                    return Err(InstanceError::RankMismatch { rank: self.rank, basis: basis.len() });
                }
                let basis = basis.iter().map(|v| LatticeVector::from_i64s(v)).collect();
                let supplied = lat.coroot_restrictions.as_ref().map(to_lattice);
                Ok(HoroSpace::from_weights(roots, self.marked_roots.clone(), basis, supplied.as_ref())?)
            }
        }
    }

    /// The polytope in the requested scalar type; `None` if a coordinate
    /// does not fit.
    pub fn polytope<S: Scalar>(&self) -> Result<Option<RationalPolytope<S>>, InstanceError> {
        let mut points = Vec::with_capacity(self.polytope.vertices.len());
        for (index, v) in self.polytope.vertices.iter().enumerate() {
            if v.len() != self.rank {
                return Err(InstanceError::VertexLength { index, expected: self.rank, got: v.len() });
            }
            let Some(p) = v.iter().map(|c| S::from_big_rational(&c.0)).collect::<Option<Vec<S>>>() else {
                return Ok(None);
            };
            points.push(p);
        }
        Ok(Some(RationalPolytope::new(self.rank, points)?))
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}
