//! Simplicial reflexive polytopes with vertices in a box, up to `GL(n, Z)`.
//!
//! Polytopes are grown facet by facet. A facet is `n` primitive box points
//! on a hyperplane `⟨v, x⟩ = −1` with `v` integral; an open ridge is closed
//! by any box point giving another such hyperplane that keeps every known
//! vertex strictly inside. When no ridge is open the vertex set is recorded.
//! Each polytope is reached from every facet through its least vertex, so
//! the search is exhaustive; duplicates are merged by a canonical form.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use serde_json::{json, Value};

use crate::exactal::{self, LatticeVector};
use crate::instance::InstanceFile;
use crate::report::{analyze, int_json, Analysis, Outcome};

pub const MAX_DIM: usize = 3;
pub const MAX_BOX: i64 = 4;

/// One unimodular class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ToricClass {
    /// Representative with the least largest coordinate, then least
    /// lexicographically.
    pub vertices: Vec<Vec<i64>>,
    pub canonical: Vec<Vec<i64>>,
}

fn is_primitive(p: &[i64]) -> bool {
    p.iter().fold(0i64, |g, &x| g.gcd(&x)) == 1
}

/// Primitive points of `[−b, b]^dim` in lexicographic order.
pub fn box_points(dim: usize, b: i64) -> Vec<Vec<i64>> {
    (0..dim)
        .map(|_| -b..=b)
        .multi_cartesian_product()
        .filter(|p| is_primitive(p))
        .collect()
}

fn det(m: &[Vec<i128>]) -> i128 {
    // Bareiss, exact on integers.
    let n = m.len();
    let mut a = m.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| a[r][k] != 0) else { return 0 };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// The integral `v` with `⟨v, p⟩ = −1` for all `n` points, if any.
fn level_normal(points: &[&[i64]]) -> Option<Vec<i64>> {
    // c is normal to the affine hull; v = −c / ⟨c, p_1⟩
    let c: Vec<i64> = match points {
        [p] => vec![p[0].signum()],
        [p, q] => vec![q[1] - p[1], p[0] - q[0]],
        [p, q, r] => {
            let (a, b) = ([q[0] - p[0], q[1] - p[1], q[2] - p[2]], [r[0] - p[0], r[1] - p[1], r[2] - p[2]]);
            vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
        }
        _ => unreachable!("dimension at most 3"),
    };
    let level = pair(&c, points[0]);
    if level == 0 || c.iter().any(|x| x % level != 0) {
        return None;
    }
    Some(c.iter().map(|x| -x / level).collect())
}

fn pair(v: &[i64], p: &[i64]) -> i64 {
    v.iter().zip(p).map(|(a, b)| a * b).sum()
}

#[derive(Clone)]
struct State {
    vertices: BTreeSet<usize>,
    facets: Vec<(Vec<usize>, Vec<i64>)>,
    /// Ridge → the facets containing it so far.
    ridges: BTreeMap<Vec<usize>, Vec<usize>>,
    /// Points after the least vertex, strictly inside every facet so far.
    alive: Vec<usize>,
}

impl State {
    fn add_facet(&mut self, verts: Vec<usize>, normal: Vec<i64>, points: &[Vec<i64>]) {
        let fi = self.facets.len();
        for k in 0..verts.len() {
            let mut r = verts.clone();
            r.remove(k);
            self.ridges.entry(r).or_default().push(fi);
        }
        self.vertices.extend(verts.iter().copied());
        self.alive
            .retain(|&p| !self.vertices.contains(&p) && pair(&normal, &points[p]) > -1);
        self.facets.push((verts, normal));
    }
}

struct Search<'a> {
    points: &'a [Vec<i64>],
    found: Vec<BTreeSet<usize>>,
}

impl Search<'_> {
    fn grow(&mut self, state: State) {
        let Some((ridge, owners)) = state.ridges.iter().find(|(_, f)| f.len() == 1) else {
            self.found.push(state.vertices.clone());
            return;
        };
        let (fverts, _) = &state.facets[owners[0]];
        let candidates = state.vertices.iter().filter(|w| !fverts.contains(w)).chain(&state.alive);
        for &w in candidates {
            let mut gverts = ridge.clone();
            gverts.push(w);
            gverts.sort();
            let refs: Vec<&[i64]> = gverts.iter().map(|&i| self.points[i].as_slice()).collect();
            let Some(g) = level_normal(&refs) else { continue };
            let inside = state
                .vertices
                .iter()
                .all(|&x| gverts.contains(&x) || pair(&g, &self.points[x]) > -1);
            if !inside {
                continue;
            }
            let ridge_free = (0..gverts.len()).all(|k| {
                let mut r = gverts.clone();
                r.remove(k);
                state.ridges.get(&r).map_or(0, Vec::len) < 2
            });
            if !ridge_free || state.facets.iter().any(|(v, _)| *v == gverts) {
                continue;
            }
            let mut next = state.clone();
            next.add_facet(gverts, g, self.points);
            self.grow(next);
        }
    }
}

/// All vertex sets (as index sets into `points`) whose least vertex is `least`.
fn search_from(points: &[Vec<i64>], least: usize) -> Vec<BTreeSet<usize>> {
    let n = points[0].len();
    let mut search = Search { points, found: Vec::new() };
    for rest in (least + 1..points.len()).combinations(n - 1) {
        let mut verts = vec![least];
        verts.extend(rest);
        let refs: Vec<&[i64]> = verts.iter().map(|&i| points[i].as_slice()).collect();
        if let Some(normal) = level_normal(&refs) {
            let mut state = State {
                vertices: BTreeSet::new(),
                facets: Vec::new(),
                ridges: BTreeMap::new(),
                alive: (least + 1..points.len()).collect(),
            };
            state.add_facet(verts, normal, points);
            search.grow(state);
        }
    }
    search.found
}

/// Facets of a simplicial lattice polytope, as vertex index lists.
fn facet_sets(vertices: &[Vec<i64>]) -> Vec<Vec<usize>> {
    let n = vertices[0].len();
    (0..vertices.len())
        .combinations(n)
        .filter(|c| {
            let refs: Vec<&[i64]> = c.iter().map(|&i| vertices[i].as_slice()).collect();
            level_normal(&refs).is_some_and(|v| vertices.iter().all(|p| pair(&v, p) >= -1))
        })
        .collect()
}

fn adjugate(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    let mut adj = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i128>> = (0..n)
                .filter(|&r| r != i)
                .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect())
                .collect();
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            adj[j][i] = sign * det(&minor);
        }
    }
    adj
}

/// A `GL(n, Z)` invariant of a simplicial polytope: over every facet and
/// every ordering of its vertices as the columns of `B`, map by the
/// unimodular `U` making `U·B` Hermite, and keep the least
/// `(U·B, sorted U·rest)`.
pub fn canonical_form(vertices: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = vertices[0].len();
    let mut best: Option<Vec<Vec<i64>>> = None;
    for facet in facet_sets(vertices) {
        for order in facet.iter().copied().permutations(n) {
            let b: Vec<Vec<i128>> = (0..n).map(|r| order.iter().map(|&i| vertices[i][r] as i128).collect()).collect();
            let b_rows: Vec<LatticeVector> = b
                .iter()
                .map(|row| LatticeVector(row.iter().map(|&x| BigInt::from(x)).collect()))
                .collect();
            let h: Vec<Vec<i128>> = exactal::hermite_normal_form(&b_rows, n)
                .iter()
                .map(|row| row.0.iter().map(|x| x.to_i128().expect("small")).collect())
                .collect();
            // U = H · adj(B) / det(B)
            let d = det(&b);
            let adj = adjugate(&b);
            let u: Vec<Vec<i128>> = h
                .iter()
                .map(|hr| (0..n).map(|c| (0..n).map(|k| hr[k] * adj[k][c]).sum()).collect())
                .collect();
            let image = |p: &[i64]| -> Vec<i64> {
                u.iter()
                    .map(|ur| {
                        let s: i128 = ur.iter().zip(p).map(|(a, &x)| a * x as i128).sum();
                        debug_assert_eq!(s % d, 0, "unimodular image of a lattice point");
                        (s / d) as i64
                    })
                    .collect()
            };
            let mut key: Vec<Vec<i64>> = h.iter().map(|row| row.iter().map(|&x| x as i64).collect()).collect();
            let mut rest: Vec<Vec<i64>> = (0..vertices.len())
                .filter(|i| !order.contains(i))
                .map(|i| image(&vertices[i]))
                .collect();
            rest.sort();
            key.extend(rest);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    best.expect("a polytope has a facet")
}

/// The signed coordinate permutations, which map the box to itself.
fn box_symmetries(n: usize) -> Vec<(Vec<usize>, u32)> {
    (0..n)
        .permutations(n)
        .flat_map(|perm| (0..1u32 << n).map(move |signs| (perm.clone(), signs)))
        .collect()
}

fn apply(sym: &(Vec<usize>, u32), p: &[i64]) -> Vec<i64> {
    let (perm, signs) = sym;
    (0..p.len())
        .map(|i| if signs >> i & 1 == 1 { -p[perm[i]] } else { p[perm[i]] })
        .collect()
}

/// Least image of a vertex set under the box symmetries.
fn box_orbit_min(vertices: &[Vec<i64>], syms: &[(Vec<usize>, u32)]) -> Vec<Vec<i64>> {
    syms.iter()
        .map(|g| {
            let mut image: Vec<Vec<i64>> = vertices.iter().map(|p| apply(g, p)).collect();
            image.sort();
            image
        })
        .min()
        .expect("at least the identity")
}

/// Box points ordered by symmetry orbit (orbits keyed by their least
/// point), then lexicographically; and the positions of the orbit keys.
///
/// Some image of every polytope then has an orbit key as its least vertex,
/// so only those need to start a search.
fn ordered_points(dim: usize, b: i64, syms: &[(Vec<usize>, u32)]) -> (Vec<Vec<i64>>, Vec<usize>) {
    let mut keyed: Vec<(Vec<i64>, Vec<i64>)> = box_points(dim, b)
        .into_iter()
        .map(|p| (syms.iter().map(|g| apply(g, &p)).min().expect("identity"), p))
        .collect();
    keyed.sort();
    let starts = keyed.iter().positions(|(key, p)| key == p).collect();
    (keyed.into_iter().map(|(_, p)| p).collect(), starts)
}

fn spread(vertices: &[Vec<i64>]) -> i64 {
    vertices.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
}

/// Every simplicial reflexive polytope with vertices in `[−b, b]^dim`, one
/// per unimodular class, sorted by vertex count then canonical form.
pub fn enumerate_toric(dim: usize, b: i64) -> Vec<ToricClass> {
    assert!((1..=MAX_DIM).contains(&dim) && (1..=MAX_BOX).contains(&b), "dim 1..=3, box 1..=4");
    let syms = box_symmetries(dim);
    let (points, starts) = ordered_points(dim, b, &syms);
    let sets: BTreeSet<BTreeSet<usize>> = starts
        .into_par_iter()
        .flat_map_iter(|least| search_from(&points, least))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    let found: BTreeSet<Vec<Vec<i64>>> = sets
        .into_par_iter()
        .map(|s| box_orbit_min(&s.into_iter().map(|i| points[i].clone()).collect::<Vec<_>>(), &syms))
        .collect::<Vec<_>>()
        .into_iter()
        .collect();
    type Points = Vec<Vec<i64>>;
    let keyed: Vec<(Points, Points)> =
        found.into_par_iter().map(|v| (canonical_form(&v), v)).collect();
    let mut classes: BTreeMap<Vec<Vec<i64>>, Vec<Vec<i64>>> = BTreeMap::new();
    for (key, verts) in keyed {
        classes
            .entry(key)
            .and_modify(|best| {
                if (spread(&verts), &verts) < (spread(best), &*best) {
                    *best = verts.clone();
                }
            })
            .or_insert(verts);
    }
    let mut out: Vec<ToricClass> = classes
        .into_iter()
        .map(|(canonical, vertices)| ToricClass { vertices, canonical })
        .collect();
    out.sort_by(|a, b| (a.vertices.len(), &a.canonical).cmp(&(b.vertices.len(), &b.canonical)));
    out
}

/// A class together with its full analysis.
#[derive(Debug, Clone)]
pub struct SurveyEntry {
    pub class: ToricClass,
    pub analysis: Analysis<BigRational>,
}

pub fn survey(dim: usize, b: i64) -> Vec<SurveyEntry> {
    enumerate_toric(dim, b)
        .into_par_iter()
        .map(|class| {
            let analysis = analyze(&InstanceFile::toric(&class.vertices));
            SurveyEntry { class, analysis }
        })
        .collect()
}

/// Summary table plus one line per class; stable across runs.
pub fn survey_json(dim: usize, b: i64, entries: &[SurveyEntry]) -> Value {
    let mut distribution: BTreeMap<String, usize> = BTreeMap::new();
    let mut instances = Vec::with_capacity(entries.len());
    let mut equality = Vec::new();
    let mut failures = 0;
    for e in entries {
        if e.analysis.outcome != Outcome::Verified {
            failures += 1;
        }
        let mut item = json!({
            "vertices": e.class.vertices,
            "canonical": e.class.canonical,
            "status": e.analysis.outcome.name(),
        });
        if let Some(r) = &e.analysis.report {
            *distribution.entry(format!("({}, {})", r.pseudo_index.value, r.picard_number)).or_default() += 1;
            item["pseudo_index"] = int_json(&r.pseudo_index.value);
            item["picard_number"] = json!(r.picard_number);
            item["lhs"] = int_json(&r.lhs);
            item["equality"] = json!(r.equality);
            if let Some(c) = &r.classification {
                item["classification"] = json!(c.to_string());
                equality.push(c.to_string());
            }
        }
        instances.push(item);
    }
    json!({
        "dim": dim,
        "box": b,
        "classes": entries.len(),
        "equality_cases": equality.len(),
        "equality_classifications": equality,
        "not_verified": failures,
        "distribution": distribution,
        "instances": instances,
    })
}
