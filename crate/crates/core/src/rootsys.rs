//! Dynkin diagrams and their positive roots.
//!
//! Nodes follow the Bourbaki numbering (see `docs/format.md` for the
//! diagrams). A simple root is addressed by a [`RootId`] `c<i>.n<j>`, both
//! indices starting at 1. Roots are integer vectors in simple-root
//! coordinates over the whole (block diagonal) system.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RootSystemError {
    #[error("invalid Dynkin type {kind}{rank}")]
    InvalidComponent { kind: DynkinType, rank: usize },
    #[error("malformed root id {0:?} (expected c<i>.n<j>)")]
    MalformedId(String),
    #[error("unknown simple root {0}")]
    UnknownRoot(RootId),
    #[error("{0} is not a marked root")]
    NotMarked(RootId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DynkinType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for DynkinType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DynkinComponent {
    pub kind: DynkinType,
    pub rank: usize,
}

impl DynkinComponent {
    pub fn new(kind: DynkinType, rank: usize) -> Result<Self, RootSystemError> {
        let ok = match kind {
            DynkinType::A => rank >= 1,
            DynkinType::B | DynkinType::C => rank >= 2,
            DynkinType::D => rank >= 4,
            DynkinType::E => (6..=8).contains(&rank),
            DynkinType::F => rank == 4,
            DynkinType::G => rank == 2,
        };
        if ok {
            Ok(DynkinComponent { kind, rank })
        } else {
            Err(RootSystemError::InvalidComponent { kind, rank })
        }
    }

    /// Symmetric Gram matrix of the simple roots, scaled to be integral.
    fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut g = vec![vec![0i64; n]; n];
        let mut link = |i: usize, j: usize, v: i64| {
            g[i][j] = v;
            g[j][i] = v;
        };
        let mut lengths = vec![2i64; n];
        match self.kind {
            DynkinType::A => {
                for i in 0..n - 1 {
                    link(i, i + 1, -1);
                }
            }
            DynkinType::B => {
                // α_n short
                lengths = vec![4; n];
                lengths[n - 1] = 2;
                for i in 0..n - 1 {
                    link(i, i + 1, -2);
                }
            }
            DynkinType::C => {
                // α_n long
                lengths[n - 1] = 4;
                for i in 0..n - 2 {
                    link(i, i + 1, -1);
                }
                link(n - 2, n - 1, -2);
            }
            DynkinType::D => {
                for i in 0..n - 2 {
                    link(i, i + 1, -1);
                }
                link(n - 3, n - 1, -1);
            }
            DynkinType::E => {
                // 1-3-4-5-6(-7-8), 2 hangs off 4
                link(0, 2, -1);
                link(1, 3, -1);
                for i in 2..n - 1 {
                    link(i, i + 1, -1);
                }
            }
            DynkinType::F => {
                // 1-2=>3-4, α1 α2 long
                lengths = vec![4, 4, 2, 2];
                link(0, 1, -2);
                link(1, 2, -2);
                link(2, 3, -1);
            }
            DynkinType::G => {
                // α1 short, α2 long
                lengths = vec![2, 6];
                link(0, 1, -3);
            }
        }
        for (i, l) in lengths.into_iter().enumerate() {
            g[i][i] = l;
        }
        g
    }

    /// Cartan matrix with `cartan[i][j] = ⟨α_j, α̌_i⟩`.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        let g = self.gram();
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| 2 * g[i][j] / g[i][i]).collect())
            .collect()
    }

    /// Classical number of positive roots.
    pub fn positive_root_count(&self) -> usize {
        let m = self.rank;
        match self.kind {
            DynkinType::A => m * (m + 1) / 2,
            DynkinType::B | DynkinType::C => m * m,
            DynkinType::D => m * (m - 1),
            DynkinType::E => match m {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            DynkinType::F => 24,
            DynkinType::G => 6,
        }
    }

    /// Degree-one nodes of the diagram (1-based).
    fn ends(&self) -> Vec<usize> {
        let m = self.rank;
        match self.kind {
            DynkinType::A if m == 1 => vec![1],
            DynkinType::A | DynkinType::B | DynkinType::C | DynkinType::F | DynkinType::G => vec![1, m],
            DynkinType::D => vec![1, m - 1, m],
            DynkinType::E => vec![1, 2, m],
        }
    }
}

impl fmt::Display for DynkinComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.rank)
    }
}

/// A simple root, addressed by component and Bourbaki node (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RootId {
    pub component: usize,
    pub node: usize,
}

impl RootId {
    pub fn new(component: usize, node: usize) -> Self {
        RootId { component, node }
    }
}

impl fmt::Display for RootId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}.n{}", self.component, self.node)
    }
}

impl FromStr for RootId {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RootSystemError::MalformedId(s.to_string());
        let (c, n) = s.split_once('.').ok_or_else(bad)?;
        let c = c.strip_prefix('c').ok_or_else(bad)?;
        let n = n.strip_prefix('n').ok_or_else(bad)?;
        let parse = |t: &str| -> Result<usize, RootSystemError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        let id = RootId::new(parse(c)?, parse(n)?);
        if id.component == 0 || id.node == 0 {
            return Err(bad());
        }
        Ok(id)
    }
}

impl Serialize for RootId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The root datum of a reductive group: its Dynkin components, Cartan
/// matrix and positive roots. An empty component list is the toric case.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSystemData {
    components: Vec<DynkinComponent>,
    ids: Vec<RootId>,
    component_of: Vec<usize>,
    cartan: Vec<Vec<i64>>,
    positive_roots: Vec<Vec<i64>>,
}

impl RootSystemData {
    pub fn build(components: &[DynkinComponent]) -> Result<Self, RootSystemError> {
        for c in components {
            DynkinComponent::new(c.kind, c.rank)?;
        }
        let total: usize = components.iter().map(|c| c.rank).sum();
        let mut cartan = vec![vec![0i64; total]; total];
        let mut ids = Vec::with_capacity(total);
        let mut component_of = Vec::with_capacity(total);
        let mut offset = 0;
        for (ci, c) in components.iter().enumerate() {
            let block = c.cartan();
            for i in 0..c.rank {
                for j in 0..c.rank {
                    cartan[offset + i][offset + j] = block[i][j];
                }
                ids.push(RootId::new(ci + 1, i + 1));
                component_of.push(ci);
            }
            offset += c.rank;
        }
        let positive_roots = reflection_closure(&cartan);
        Ok(RootSystemData {
            components: components.to_vec(),
            ids,
            component_of,
            cartan,
            positive_roots,
        })
    }

    pub fn components(&self) -> &[DynkinComponent] {
        &self.components
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.positive_roots
    }

    pub fn simple_root_ids(&self) -> &[RootId] {
        &self.ids
    }

    pub fn rank(&self) -> usize {
        self.ids.len()
    }

    pub fn index_of(&self, id: RootId) -> Result<usize, RootSystemError> {
        self.ids
            .iter()
            .position(|&x| x == id)
            .ok_or(RootSystemError::UnknownRoot(id))
    }

    pub fn component_of(&self, id: RootId) -> Result<DynkinComponent, RootSystemError> {
        Ok(self.components[self.component_of[self.index_of(id)?]])
    }

    fn mask(&self, roots: &BTreeSet<RootId>) -> Result<Vec<bool>, RootSystemError> {
        let mut mask = vec![false; self.rank()];
        for &r in roots {
            mask[self.index_of(r)?] = true;
        }
        Ok(mask)
    }

    /// `2ρ^P` for `P = P_I` with `S \ I = marked`: the sum of the positive
    /// roots having a positive coefficient on some marked simple root.
    pub fn two_rho_p(&self, marked: &BTreeSet<RootId>) -> Result<Vec<i64>, RootSystemError> {
        let mask = self.mask(marked)?;
        let mut sum = vec![0i64; self.rank()];
        for root in &self.positive_roots {
            if root.iter().zip(&mask).any(|(&c, &m)| m && c > 0) {
                for (s, c) in sum.iter_mut().zip(root) {
                    *s += c;
                }
            }
        }
        Ok(sum)
    }

    /// `a_α = ⟨2ρ^P, α̌⟩`.
    pub fn a_alpha(&self, marked: &BTreeSet<RootId>, alpha: RootId) -> Result<i64, RootSystemError> {
        if !marked.contains(&alpha) {
            return Err(RootSystemError::NotMarked(alpha));
        }
        let i = self.index_of(alpha)?;
        let two_rho = self.two_rho_p(marked)?;
        Ok(self.cartan[i].iter().zip(&two_rho).map(|(a, c)| a * c).sum())
    }

    /// `dim G/P_J`: the positive roots with a nonzero coefficient outside `J`.
    pub fn dim_flag(&self, j: &BTreeSet<RootId>) -> Result<usize, RootSystemError> {
        let inside = self.mask(j)?;
        Ok(self
            .positive_roots
            .iter()
            .filter(|root| root.iter().zip(&inside).any(|(&c, &m)| !m && c != 0))
            .count())
    }

    /// The simple roots not in `roots`.
    pub fn complement(&self, roots: &BTreeSet<RootId>) -> BTreeSet<RootId> {
        self.ids.iter().filter(|r| !roots.contains(r)).copied().collect()
    }

    pub fn check_condition4_prime(&self, marked: &BTreeSet<RootId>) -> Result<Condition4Prime, RootSystemError> {
        self.mask(marked)?;
        let per_component = self
            .components
            .iter()
            .enumerate()
            .map(|(ci, comp)| {
                let here: Vec<RootId> = marked.iter().filter(|r| r.component == ci + 1).copied().collect();
                match here.as_slice() {
                    [] => Ok(ComponentVerdict::Unmarked),
                    [alpha] => self.single_marked_verdict(*comp, *alpha),
                    many => Ok(ComponentVerdict::SeveralMarked(many.len())),
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(Condition4Prime { per_component })
    }

    fn single_marked_verdict(&self, comp: DynkinComponent, alpha: RootId) -> Result<ComponentVerdict, RootSystemError> {
        use DynkinType::*;
        Ok(match (comp.kind, comp.rank) {
            (B | C, 2) => {
                // Both nodes touch the double edge; fall back to the numeric
                // identity a_α − 1 = dim G/P(ω_α).
                let only: BTreeSet<RootId> = [alpha].into();
                let a = self.a_alpha(&only, alpha)?;
                let dim = self.dim_flag(&self.complement(&only))? as i64;
                ComponentVerdict::ResolvedNumerically(a - 1 == dim)
            }
            (A, _) if comp.ends().contains(&alpha.node) => ComponentVerdict::SimpleEnd,
            (C, _) if alpha.node == 1 => ComponentVerdict::SimpleEnd,
            (A | C, _) => ComponentVerdict::NotSimpleEnd,
            _ => ComponentVerdict::WrongType,
        })
    }
}

fn reflection_closure(cartan: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = cartan.len();
    let simple: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut seen: HashSet<Vec<i64>> = simple.iter().cloned().collect();
    let mut roots = simple.clone();
    let mut queue: VecDeque<Vec<i64>> = simple.into();
    while let Some(beta) = queue.pop_front() {
        for i in 0..n {
            let pairing: i64 = cartan[i].iter().zip(&beta).map(|(a, c)| a * c).sum();
            if pairing == 0 {
                continue;
            }
            let mut image = beta.clone();
            image[i] -= pairing;
            if image.iter().all(|&c| c >= 0) && image.iter().any(|&c| c > 0) && seen.insert(image.clone()) {
                roots.push(image.clone());
                queue.push_back(image);
            }
        }
    }
    roots.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    roots
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentVerdict {
    Unmarked,
    SimpleEnd,
    /// Rank-2 B/C component decided by `a_α − 1 = dim G/P(ω_α)`.
    ResolvedNumerically(bool),
    SeveralMarked(usize),
    NotSimpleEnd,
    WrongType,
}

impl ComponentVerdict {
    pub fn holds(self) -> bool {
        matches!(
            self,
            ComponentVerdict::Unmarked | ComponentVerdict::SimpleEnd | ComponentVerdict::ResolvedNumerically(true)
        )
    }
}

/// Per-component diagnosis of the Dynkin-diagram pattern of the equality case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition4Prime {
    pub per_component: Vec<ComponentVerdict>,
}

impl Condition4Prime {
    pub fn holds(&self) -> bool {
        self.per_component.iter().all(|v| v.holds())
    }

    /// True when some component was decided numerically instead of by pattern.
    pub fn pattern_skipped(&self) -> bool {
        self.per_component
            .iter()
            .any(|v| matches!(v, ComponentVerdict::ResolvedNumerically(_)))
    }
}
