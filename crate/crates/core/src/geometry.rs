//! Exact lattice-polytope queries: hull vertices, barycentric coordinates,
//! lattice points of simplices and the cover sets Δ(β).

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use crate::lp::{self, in_convex_hull};
use crate::poly::{support_partition, Exponent, SparsePolynomial};
use crate::{Rational, SoncError};

/// Affinely independent lattice points (the vertex list of a simplex).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<Exponent>,
}

impl Simplex {
    pub fn new(vertices: Vec<Exponent>) -> Result<Self, SoncError> {
        let Some(first) = vertices.first() else {
            return Err(SoncError::InvalidSimplex("no vertices".into()));
        };
        let n = first.nvars();
        if vertices.iter().any(|v| v.nvars() != n) {
            return Err(SoncError::InvalidSimplex(
                "vertices differ in dimension".into(),
            ));
        }
        if !affinely_independent(&vertices) {
            return Err(SoncError::InvalidSimplex(format!(
                "vertices {} are affinely dependent",
                fmt_points(&vertices)
            )));
        }
        Ok(Simplex { vertices })
    }

    pub fn vertices(&self) -> &[Exponent] {
        &self.vertices
    }

    pub fn nvars(&self) -> usize {
        self.vertices[0].nvars()
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Every vertex lies in (2N)^n, i.e. the simplex is a trellis.
    pub fn is_even(&self) -> bool {
        self.vertices.iter().all(Exponent::is_even)
    }

    pub fn scaled(&self, k: u32) -> Simplex {
        Simplex {
            vertices: self.vertices.iter().map(|v| v.scaled(k)).collect(),
        }
    }

    /// Vertex list sorted lexicographically; used as a cache key.
    pub fn sorted_vertices(&self) -> Vec<Exponent> {
        let mut v = self.vertices.clone();
        v.sort();
        v
    }

    pub fn frame(&self) -> AffineFrame {
        AffineFrame::new(&self.vertices)
    }

    /// All lattice points of the closed simplex, lexicographically sorted.
    pub fn lattice_points(&self) -> Vec<Exponent> {
        let n = self.nvars();
        let frame = self.frame();
        let lo: Vec<u32> = (0..n)
            .map(|i| self.vertices.iter().map(|v| v.0[i]).min().unwrap())
            .collect();
        let hi: Vec<u32> = (0..n)
            .map(|i| self.vertices.iter().map(|v| v.0[i]).max().unwrap())
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let p = Exponent(cur.clone());
            if let Some(w) = frame.coordinates(&p) {
                if w.iter().all(|x| !x.is_negative()) {
                    out.push(p);
                }
            }
            // odometer increment
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = lo[i];
            }
        }
    }
}

/// Precomputed solver for affine coordinates with respect to a fixed,
/// affinely independent point list.
#[derive(Clone, Debug)]
pub struct AffineFrame {
    vertices: Vec<Vec<Rational>>,
    rows: Vec<usize>,
    inverse: Vec<Vec<Rational>>,
}

impl AffineFrame {
    pub fn new(vertices: &[Exponent]) -> Self {
        let k = vertices.len();
        let n = vertices[0].nvars();
        let verts: Vec<Vec<Rational>> = vertices.iter().map(Exponent::as_rationals).collect();
        // rows of the (n+1) x k system [V; 1]
        let full: Vec<Vec<Rational>> = (0..=n)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i < n {
                            verts[j][i].clone()
                        } else {
                            Rational::one()
                        }
                    })
                    .collect()
            })
            .collect();
        // greedily pick k independent rows, starting with the all-ones row
        let mut rows = vec![n];
        for i in 0..n {
            if rows.len() == k {
                break;
            }
            let mut trial: Vec<Vec<Rational>> = rows.iter().map(|&r| full[r].clone()).collect();
            trial.push(full[i].clone());
            if lp::rank(&trial) == trial.len() {
                rows.push(i);
            }
        }
        assert_eq!(rows.len(), k, "frame requires affinely independent points");
        let square: Vec<Vec<Rational>> = rows.iter().map(|&r| full[r].clone()).collect();
        let inverse = invert(&square);
        AffineFrame {
            vertices: verts,
            rows,
            inverse,
        }
    }

    /// Affine coordinates of `p`, or `None` if `p` is off the affine hull.
    pub fn coordinates(&self, p: &Exponent) -> Option<Vec<Rational>> {
        let n = p.nvars();
        let rhs: Vec<Rational> = self
            .rows
            .iter()
            .map(|&r| {
                if r == n {
                    Rational::one()
                } else {
                    Rational::from_integer(p.0[r].into())
                }
            })
            .collect();
        let w: Vec<Rational> = self
            .inverse
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&rhs)
                    .map(|(a, b)| a * b)
                    .fold(Rational::zero(), |s, t| s + t)
            })
            .collect();
        for i in 0..n {
            let s = w
                .iter()
                .zip(&self.vertices)
                .map(|(wi, v)| wi * &v[i])
                .fold(Rational::zero(), |a, b| a + b);
            if s != Rational::from_integer(p.0[i].into()) {
                return None;
            }
        }
        Some(w)
    }
}

fn invert(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let k = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..k {
        let piv = (col..k)
            .find(|&i| !aug[i][col].is_zero())
            .expect("singular frame");
        aug.swap(col, piv);
        let inv = aug[col][col].recip();
        for x in aug[col].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    *x -= &f * p;
                }
            }
        }
    }
    aug.into_iter().map(|r| r[k..].to_vec()).collect()
}

fn affinely_independent(points: &[Exponent]) -> bool {
    let base = points[0].as_rationals();
    let diffs: Vec<Vec<Rational>> = points[1..]
        .iter()
        .map(|p| {
            p.as_rationals()
                .iter()
                .zip(&base)
                .map(|(a, b)| a - b)
                .collect()
        })
        .collect();
    diffs.is_empty() || lp::rank(&diffs) == diffs.len()
}

pub(crate) fn fmt_points(points: &[Exponent]) -> String {
    let parts: Vec<String> = points.iter().map(ToString::to_string).collect();
    format!("{{{}}}", parts.join(","))
}

/// Strictly positive barycentric weights aligned to a simplex's vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Barycentrics {
    pub weights: Vec<Rational>,
}

impl Barycentrics {
    /// Least common denominator of the weights.
    pub fn common_denominator(&self) -> num_bigint::BigInt {
        self.weights
            .iter()
            .fold(num_bigint::BigInt::one(), |acc, w| {
                num_integer::lcm(acc, w.denom().clone())
            })
    }
}

/// Relative-interior barycentric coordinates of `beta`, or `None` when
/// `beta` is outside or on the relative boundary.
pub fn barycentric_coordinates(s: &Simplex, beta: &Exponent) -> Option<Barycentrics> {
    if beta.nvars() != s.nvars() {
        return None;
    }
    let w = s.frame().coordinates(beta)?;
    if w.iter().all(Signed::is_positive) {
        Some(Barycentrics { weights: w })
    } else {
        None
    }
}

/// Vertices of `conv(points)`: points not in the hull of the others.
pub fn vertices(points: &[Exponent]) -> Vec<Exponent> {
    let uniq: Vec<Exponent> = points
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let rats: Vec<Vec<Rational>> = uniq.iter().map(Exponent::as_rationals).collect();
    uniq.iter()
        .enumerate()
        .filter(|(i, _)| {
            let others: Vec<Vec<Rational>> = rats
                .iter()
                .enumerate()
                .filter(|(j, _)| j != i)
                .map(|(_, r)| r.clone())
                .collect();
            !in_convex_hull(&others, &rats[*i])
        })
        .map(|(_, p)| p.clone())
        .collect()
}

/// All simplices with vertices in Λ whose relative interior contains β.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSet {
    pub beta: Exponent,
    pub simplices: Vec<(Simplex, Barycentrics)>,
}

impl CoverSet {
    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }
}

/// Enumerates Δ(β) over subsets of `lambda_pts` of size 2..=n+1, in order of
/// size and then lexicographic order of the (sorted) vertex lists.
pub fn enumerate_covers(lambda_pts: &[Exponent], beta: &Exponent) -> CoverSet {
    let pts: Vec<Exponent> = lambda_pts
        .iter()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n = beta.nvars();
    let mut simplices = Vec::new();
    let max_size = (n + 1).min(pts.len());
    for size in 2..=max_size {
        for_each_combination(pts.len(), size, &mut |idx| {
            let verts: Vec<Exponent> = idx.iter().map(|&i| pts[i].clone()).collect();
            if !affinely_independent(&verts) {
                return;
            }
            let s = Simplex { vertices: verts };
            if let Some(b) = barycentric_coordinates(&s, beta) {
                simplices.push((s, b));
            }
        });
    }
    CoverSet {
        beta: beta.clone(),
        simplices,
    }
}

pub(crate) fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NecessaryConditions {
    Pass,
    Fail { vertex: Exponent, reason: String },
}

impl NecessaryConditions {
    pub fn passed(&self) -> bool {
        matches!(self, NecessaryConditions::Pass)
    }
}

/// Every vertex of the Newton polytope must be even with a positive
/// coefficient. Reports the lexicographically first violation.
pub fn necessary_conditions(f: &SparsePolynomial) -> Result<NecessaryConditions, SoncError> {
    support_partition(f)?;
    for v in vertices(&f.support()) {
        if !v.is_even() {
            return Ok(NecessaryConditions::Fail {
                vertex: v,
                reason: "vertex has an odd entry".into(),
            });
        }
        if f.coefficient(&v).is_negative() {
            return Ok(NecessaryConditions::Fail {
                vertex: v,
                reason: "vertex coefficient is negative".into(),
            });
        }
    }
    Ok(NecessaryConditions::Pass)
}
