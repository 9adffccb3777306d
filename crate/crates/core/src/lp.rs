//! Exact rational linear algebra: Gaussian elimination and a phase-one
//! simplex (Bland's rule) for convex-hull membership.

use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Rank of a list of rational vectors.
pub fn rank(vectors: &[Vec<Rational>]) -> usize {
    let mut rows: Vec<Vec<Rational>> = vectors.to_vec();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = rows[r][col].recip();
        for j in col..ncols {
            rows[r][j] = &rows[r][j] * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let factor = rows[i][col].clone();
                for j in col..ncols {
                    let t = &factor * &rows[r][j];
                    rows[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

/// Solves `A x = b` (A given row-major, `m x n`). Returns one solution if
/// the system is consistent; free variables are set to zero.
pub fn solve_linear(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(piv) = (r..m).find(|&i| !aug[i][col].is_zero()) else {
            continue;
        };
        aug.swap(r, piv);
        let inv = aug[r][col].recip();
        for j in col..=n {
            aug[r][j] = &aug[r][j] * &inv;
        }
        for i in 0..m {
            if i != r && !aug[i][col].is_zero() {
                let factor = aug[i][col].clone();
                for j in col..=n {
                    let t = &factor * &aug[r][j];
                    aug[i][j] -= t;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == m {
            break;
        }
    }
    if aug[r..].iter().any(|row| !row[n].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = aug[i][n].clone();
    }
    Some(x)
}

/// Affine coordinates of `point` with respect to `vertices`:
/// `Σ w_i v_i = point`, `Σ w_i = 1`. Unique when the vertices are affinely
/// independent; `None` when `point` is off their affine hull.
pub fn affine_coordinates(vertices: &[Vec<Rational>], point: &[Rational]) -> Option<Vec<Rational>> {
    let dim = point.len();
    let k = vertices.len();
    let mut a = vec![vec![Rational::zero(); k]; dim + 1];
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..dim {
            a[i][j] = v[i].clone();
        }
        a[dim][j] = Rational::one();
    }
    let mut b = point.to_vec();
    b.push(Rational::one());
    solve_linear(&a, &b)
}

/// Exact convex-hull membership: is there `μ >= 0`, `Σ μ = 1`,
/// `Σ μ_i p_i = target`? Decided by phase-one simplex with Bland's rule.
pub fn in_convex_hull(points: &[Vec<Rational>], target: &[Rational]) -> bool {
    if points.is_empty() {
        return false;
    }
    let dim = target.len();
    let rows = dim + 1;
    let ncols = points.len();
    // rows: coordinates, then the sum row; normalize to b >= 0
    let mut a: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    let mut b: Vec<Rational> = Vec::with_capacity(rows);
    for i in 0..dim {
        a.push(points.iter().map(|p| p[i].clone()).collect());
        b.push(target[i].clone());
    }
    a.push(vec![Rational::one(); ncols]);
    b.push(Rational::one());
    for i in 0..rows {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for x in a[i].iter_mut() {
                *x = -x.clone();
            }
        }
    }
    phase_one_feasible(a, b)
}

/// Feasibility of `A x = b, x >= 0` with `b >= 0`.
fn phase_one_feasible(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> bool {
    let m = a.len();
    let n = a[0].len();
    let total = n + m;
    // tableau rows: [A | I | b]
    let mut t: Vec<Vec<Rational>> = a
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..m).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row.push(b[i].clone());
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..total).collect();
    // objective: minimize sum of artificials; reduced costs z_j = -Σ rows
    let mut cost = vec![Rational::zero(); total + 1];
    for row in &t {
        for j in 0..=total {
            if j < n || j == total {
                cost[j] -= &row[j];
            }
        }
    }
    loop {
        let Some(enter) = (0..total).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][total] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // unbounded below cannot happen for phase one
            break;
        };
        let inv = t[r][enter].recip();
        for x in t[r].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        if !cost[enter].is_zero() {
            let f = cost[enter].clone();
            for (x, p) in cost.iter_mut().zip(&pivot_row) {
                *x -= &f * p;
            }
        }
        basis[r] = enter;
    }
    // optimum value is -cost[total]
    cost[total].is_zero()
}
