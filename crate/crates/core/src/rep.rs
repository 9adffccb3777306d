//! The relative entropy feasibility program on the support of `f`.
//!
//! Every inner term `β_j ∈ Γ(f)` is split across slots, one per simplex of
//! its cover set. Slot `(j,k)` owns a share `c_ijk` of each vertex
//! coefficient and a share `d_jk` of `|d_j|`; it is a nonnegative circuit
//! iff `d_jk <= Θ_jk(c_·jk)`. The entropy constraints of the program are
//! exactly this inequality, so the solver works with it directly:
//!
//! ```text
//! max σ  s.t.  Θ_s(c_s) >= d_s,  Σ_k d_jk = σ |d_j|,  Σ_s c_is <= c_i,  c, d > 0
//! ```
//!
//! `f` is SONC iff `σ* >= 1`; the reported slack is `t* = log σ*`, which is
//! the optimal value of `max t s.t. log Θ_s - log d_s >= t`. The concave
//! program is solved with a log-barrier Newton method.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};

use crate::certificate::SoncCertificate;
use crate::circuit::{circuit_number, log_rational, CircuitPolynomial};
use crate::geometry::{enumerate_covers, necessary_conditions, CoverSet, NecessaryConditions};
use crate::poly::{support_partition, Exponent, SparsePolynomial};
use crate::sosb::MonomialSquare;
use crate::{f64_to_rational, rational_to_f64, Rational, SoncError, DEFAULT_TOL};

/// One circuit slot `(j, k)`: cover simplex `k` of inner term `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub term: usize,
    pub cover: usize,
    /// Indices into [`RepInstance::lambda_points`], aligned with the simplex vertices.
    pub vertices: Vec<usize>,
    pub weights: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepInstance {
    pub f: SparsePolynomial,
    pub lambda_points: Vec<Exponent>,
    /// `c_i` for each Λ-point.
    pub c: Vec<Rational>,
    pub gamma_points: Vec<Exponent>,
    /// `d_j = -coefficient` of each Γ-point.
    pub d: Vec<Rational>,
    /// `|d_j|`.
    pub dtilde: Vec<Rational>,
    pub covers: Vec<CoverSet>,
    pub slots: Vec<Slot>,
}

impl RepInstance {
    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepStatus {
    Feasible,
    Infeasible,
    Inconclusive,
}

impl RepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RepStatus::Feasible => "FEASIBLE",
            RepStatus::Infeasible => "INFEASIBLE",
            RepStatus::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Whether the vertex shares must use the whole coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BudgetMode {
    /// `Σ_s c_is <= c_i`, the rest becomes monomial squares.
    #[default]
    AtMost,
    /// `Σ_s c_is = c_i`.
    Exact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlotValue {
    pub c: Vec<f64>,
    pub d: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RepSolution {
    pub status: RepStatus,
    /// `t* = log σ*`.
    pub slack: f64,
    /// Per slot `(c_ijk, d_jk)`, with `Σ_k d_jk = |d_j|`.
    pub assignment: Vec<SlotValue>,
    pub iterations: usize,
    pub tol: f64,
}

pub fn build_rep(f: &SparsePolynomial) -> Result<RepInstance, SoncError> {
    if let NecessaryConditions::Fail { vertex, reason } = necessary_conditions(f)? {
        return Err(SoncError::NecessaryConditions { vertex, reason });
    }
    let part = support_partition(f)?;
    if part.gamma.is_empty() {
        return Err(SoncError::TriviallyNonnegative);
    }
    let lambda_points: Vec<Exponent> = part.lambda.keys().cloned().collect();
    let c: Vec<Rational> = part.lambda.values().cloned().collect();
    let index: BTreeMap<&Exponent, usize> = lambda_points
        .iter()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let mut gamma_points = Vec::new();
    let mut d = Vec::new();
    let mut covers = Vec::new();
    let mut slots = Vec::new();
    for (j, (beta, dj)) in part.gamma.iter().enumerate() {
        let cover = enumerate_covers(&lambda_points, beta);
        if cover.is_empty() {
            return Err(SoncError::Uncovered { beta: beta.clone() });
        }
        for (k, (s, b)) in cover.simplices.iter().enumerate() {
            slots.push(Slot {
                term: j,
                cover: k,
                vertices: s.vertices().iter().map(|v| index[v]).collect(),
                weights: b.weights.clone(),
            });
        }
        gamma_points.push(beta.clone());
        d.push(dj.clone());
        covers.push(cover);
    }
    let dtilde = d.iter().map(Rational::abs).collect();
    Ok(RepInstance {
        f: f.clone(),
        lambda_points,
        c,
        gamma_points,
        d,
        dtilde,
        covers,
        slots,
    })
}

pub fn solve_rep(inst: &RepInstance, tol: f64) -> Result<RepSolution, SoncError> {
    solve_rep_with(inst, tol, BudgetMode::AtMost)
}

pub fn solve_rep_with(
    inst: &RepInstance,
    tol: f64,
    mode: BudgetMode,
) -> Result<RepSolution, SoncError> {
    if !(tol > 0.0) {
        return Err(SoncError::Internal("tolerance must be positive".into()));
    }
    let problem = Problem::new(inst, mode);
    if mode == BudgetMode::Exact && problem.users.iter().any(Vec::is_empty) {
        // a Λ-point in no slot cannot be spent at all
        return Ok(RepSolution {
            status: RepStatus::Infeasible,
            slack: f64::NEG_INFINITY,
            assignment: Vec::new(),
            iterations: 0,
            tol,
        });
    }
    let (x, iterations) = problem.solve()?;
    // the shares alone certify σ = min_j Σ_k Θ_jk / |d_j|
    let slack = problem.share_value(&x).ln();
    let assignment = problem.assignment(&x, inst);
    let status = if slack >= 0.0 {
        RepStatus::Feasible
    } else if slack < -tol {
        RepStatus::Infeasible
    } else {
        RepStatus::Inconclusive
    };
    let mut sol = RepSolution {
        status,
        slack,
        assignment,
        iterations,
        tol,
    };
    if status == RepStatus::Inconclusive {
        // the exact snap can settle boundary instances
        if let Ok(cert) = build_certificate(inst, &sol) {
            if cert.exact {
                sol.status = RepStatus::Feasible;
                sol.slack = 0.0;
            }
        }
    }
    Ok(sol)
}

struct SlotLayout {
    c: Vec<usize>,
    /// `Σ λ log λ`, so that `log Θ = Σ λ log c - Σ λ log λ`.
    lambda_entropy: f64,
    weights: Vec<f64>,
    term: usize,
}

/// The normalized barrier problem.
///
/// For fixed shares the best split of `|d_j|` is proportional to the slot
/// circuit numbers, so the inner shares are eliminated and the program
/// becomes `max σ s.t. Σ_k Θ_jk(c) >= σ |d_j|` over the shares `c` and `σ`.
/// Variables are `x = (c_s..., σ)`.
struct Problem {
    mode: BudgetMode,
    scale: f64,
    budgets: Vec<f64>,
    dtilde: Vec<f64>,
    layout: Vec<SlotLayout>,
    /// Slots per inner term.
    by_term: Vec<Vec<usize>>,
    /// Variable indices of `c_is` per Λ-point.
    users: Vec<Vec<usize>>,
    /// Index of `σ`; also the number of share variables.
    sigma: usize,
}

const NEWTON_CAP: usize = 10_000;
const CENTERING_CAP: usize = 100;

impl Problem {
    fn new(inst: &RepInstance, mode: BudgetMode) -> Self {
        let c: Vec<f64> = inst.c.iter().map(rational_to_f64).collect();
        let dt: Vec<f64> = inst.dtilde.iter().map(rational_to_f64).collect();
        let scale = c.iter().chain(&dt).fold(0.0f64, |a, &b| a.max(b));
        let budgets: Vec<f64> = c.iter().map(|v| v / scale).collect();
        let dtilde: Vec<f64> = dt.iter().map(|v| v / scale).collect();
        let mut layout = Vec::with_capacity(inst.slots.len());
        let mut users = vec![Vec::new(); budgets.len()];
        let mut by_term = vec![Vec::new(); dtilde.len()];
        let mut nvar = 0;
        for (k, s) in inst.slots.iter().enumerate() {
            let cvars: Vec<usize> = (nvar..nvar + s.vertices.len()).collect();
            for (&i, &v) in s.vertices.iter().zip(&cvars) {
                users[i].push(v);
            }
            nvar += s.vertices.len();
            let weights: Vec<f64> = s.weights.iter().map(rational_to_f64).collect();
            layout.push(SlotLayout {
                lambda_entropy: weights.iter().map(|l| l * l.ln()).sum(),
                weights,
                c: cvars,
                term: s.term,
            });
            by_term[s.term].push(k);
        }
        Problem {
            mode,
            scale,
            budgets,
            dtilde,
            layout,
            by_term,
            users,
            sigma: nvar,
        }
    }

    fn theta(&self, l: &SlotLayout, x: &[f64]) -> f64 {
        (l.c.iter()
            .zip(&l.weights)
            .map(|(&v, w)| w * x[v].ln())
            .sum::<f64>()
            - l.lambda_entropy)
            .exp()
    }

    fn term_theta(&self, j: usize, x: &[f64]) -> f64 {
        self.by_term[j]
            .iter()
            .map(|&s| self.theta(&self.layout[s], x))
            .sum()
    }

    fn share_value(&self, x: &[f64]) -> f64 {
        (0..self.dtilde.len())
            .map(|j| self.term_theta(j, x) / self.dtilde[j])
            .fold(f64::INFINITY, f64::min)
    }

    /// Unnormalized shares with `|d_j|` split in proportion to `Θ_jk`.
    fn assignment(&self, x: &[f64], inst: &RepInstance) -> Vec<SlotValue> {
        let totals: Vec<f64> = (0..self.dtilde.len())
            .map(|j| self.term_theta(j, x))
            .collect();
        self.layout
            .iter()
            .map(|l| SlotValue {
                c: l.c.iter().map(|&v| x[v] * self.scale).collect(),
                d: rational_to_f64(&inst.dtilde[l.term]) * self.theta(l, x) / totals[l.term],
            })
            .collect()
    }

    fn start(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.sigma + 1];
        for (i, u) in self.users.iter().enumerate() {
            let share = match self.mode {
                BudgetMode::AtMost => self.budgets[i] / (u.len() + 1) as f64,
                BudgetMode::Exact => self.budgets[i] / u.len().max(1) as f64,
            };
            for &v in u {
                x[v] = share;
            }
        }
        x[self.sigma] = 0.5 * self.share_value(&x);
        x
    }

    fn barrier_terms(&self) -> usize {
        let budget_terms = match self.mode {
            BudgetMode::AtMost => self.budgets.len(),
            BudgetMode::Exact => 0,
        };
        self.sigma + self.dtilde.len() + budget_terms
    }

    /// `-τσ - Σ log(barriers)`, or `None` outside the domain.
    fn objective(&self, x: &[f64], tau: f64) -> Option<f64> {
        let sigma = x[self.sigma];
        let mut val = -tau * sigma;
        for &v in &x[..self.sigma] {
            if v <= 0.0 {
                return None;
            }
            val -= v.ln();
        }
        for j in 0..self.dtilde.len() {
            let g = self.term_theta(j, x) - sigma * self.dtilde[j];
            if g <= 0.0 {
                return None;
            }
            val -= g.ln();
        }
        if self.mode == BudgetMode::AtMost {
            for (i, u) in self.users.iter().enumerate() {
                let b = self.budgets[i] - u.iter().map(|&v| x[v]).sum::<f64>();
                if b <= 0.0 {
                    return None;
                }
                val -= b.ln();
            }
        }
        Some(val)
    }

    /// Newton direction and decrement of the barrier objective.
    fn newton_step(&self, x: &[f64], tau: f64) -> Option<(Vec<f64>, f64)> {
        let n = self.sigma + 1;
        let mut g = vec![0.0; n];
        let mut hess = DMatrix::<f64>::zeros(n, n);
        g[self.sigma] = -tau;
        for v in 0..self.sigma {
            g[v] -= 1.0 / x[v];
            hess[(v, v)] += 1.0 / (x[v] * x[v]);
        }
        for (j, slots) in self.by_term.iter().enumerate() {
            let mut grad: Vec<(usize, f64)> = vec![(self.sigma, -self.dtilde[j])];
            let mut total = 0.0;
            let thetas: Vec<f64> = slots
                .iter()
                .map(|&s| self.theta(&self.layout[s], x))
                .collect();
            for (&s, &theta) in slots.iter().zip(&thetas) {
                let l = &self.layout[s];
                total += theta;
                for (&v, w) in l.c.iter().zip(&l.weights) {
                    grad.push((v, w * theta / x[v]));
                }
            }
            let gj = total - x[self.sigma] * self.dtilde[j];
            for &(v, a) in &grad {
                g[v] -= a / gj;
                for &(u, b) in &grad {
                    hess[(v, u)] += a * b / (gj * gj);
                }
            }
            // -∇²Θ / g_j, block diagonal per slot
            for (&s, &theta) in slots.iter().zip(&thetas) {
                let l = &self.layout[s];
                for (a, (&va, wa)) in l.c.iter().zip(&l.weights).enumerate() {
                    for (b, (&vb, wb)) in l.c.iter().zip(&l.weights).enumerate() {
                        let mut t = wa * wb * theta / (x[va] * x[vb]);
                        if a == b {
                            t -= wa * theta / (x[va] * x[va]);
                        }
                        hess[(va, vb)] -= t / gj;
                    }
                }
            }
        }
        let dx: Vec<f64> = match self.mode {
            BudgetMode::AtMost => {
                for (i, u) in self.users.iter().enumerate() {
                    let b = self.budgets[i] - u.iter().map(|&v| x[v]).sum::<f64>();
                    for &v in u {
                        g[v] += 1.0 / b;
                        for &w in u {
                            hess[(v, w)] += 1.0 / (b * b);
                        }
                    }
                }
                let rhs = DVector::from_iterator(n, g.iter().map(|v| -v));
                match hess.clone().cholesky() {
                    Some(ch) => ch.solve(&rhs).iter().copied().collect(),
                    None => hess.lu().solve(&rhs)?.iter().copied().collect(),
                }
            }
            BudgetMode::Exact => {
                let rows: Vec<&Vec<usize>> = self.users.iter().filter(|u| !u.is_empty()).collect();
                let k = rows.len();
                let mut kkt = DMatrix::<f64>::zeros(n + k, n + k);
                kkt.view_mut((0, 0), (n, n)).copy_from(&hess);
                for (r, u) in rows.iter().enumerate() {
                    for &v in u.iter() {
                        kkt[(n + r, v)] = 1.0;
                        kkt[(v, n + r)] = 1.0;
                    }
                }
                let mut rhs = DVector::zeros(n + k);
                for v in 0..n {
                    rhs[v] = -g[v];
                }
                kkt.lu().solve(&rhs)?.iter().take(n).copied().collect()
            }
        };
        let decrement = -g.iter().zip(&dx).map(|(a, b)| a * b).sum::<f64>();
        Some((dx, decrement))
    }

    fn solve(&self) -> Result<(Vec<f64>, usize), SoncError> {
        let mut x = self.start();
        let m = self.barrier_terms() as f64;
        let mut tau = 1.0;
        let mut iterations = 0;
        loop {
            for _ in 0..CENTERING_CAP {
                let Some((dx, dec)) = self.newton_step(&x, tau) else {
                    break;
                };
                if !(dec / 2.0 > 1e-10) {
                    break;
                }
                iterations += 1;
                if iterations > NEWTON_CAP {
                    return Err(SoncError::NonConvergence {
                        iterations,
                        slack: self.share_value(&x).ln(),
                    });
                }
                let f0 = self.objective(&x, tau).unwrap_or(f64::INFINITY);
                let mut alpha = 1.0;
                let mut moved = false;
                while alpha > 1e-14 {
                    let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + alpha * b).collect();
                    if let Some(f1) = self.objective(&trial, tau) {
                        if f1 <= f0 - 0.25 * alpha * dec {
                            x = trial;
                            moved = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            let sigma = x[self.sigma];
            if m / tau <= 1e-12 * sigma.max(1e-300) || tau > 1e16 {
                return Ok((x, iterations));
            }
            tau *= 10.0;
        }
    }
}

/// Relative threshold below which a slot is dropped before rounding.
const DROP: f64 = 1e-12;

/// Rounds a numeric assignment to an exact certificate.
///
/// Vertex shares of the kept slots are rounded and rescaled so that each
/// Λ-point's coefficient is spent exactly; then every inner coefficient is
/// split across its slots in proportion to a rational lower bound of each
/// slot's circuit number. The result is exact whenever those lower bounds
/// add up to at least `|d_j|`.
fn build_certificate(inst: &RepInstance, sol: &RepSolution) -> Result<SoncCertificate, SoncError> {
    if sol.assignment.len() != inst.slots.len() {
        return Err(SoncError::Internal(
            "assignment does not match the instance".into(),
        ));
    }
    let dt: Vec<f64> = inst.dtilde.iter().map(rational_to_f64).collect();
    let kept: Vec<usize> = (0..inst.slots.len())
        .filter(|&s| sol.assignment[s].d > DROP * dt[inst.slots[s].term])
        .collect();
    let mut shares: Vec<Vec<Rational>> = kept
        .iter()
        .map(|&s| vec![Rational::zero(); inst.slots[s].vertices.len()])
        .collect();
    let mut spent = vec![false; inst.c.len()];
    for (i, ci) in inst.c.iter().enumerate() {
        let mut owners = Vec::new();
        for (ks, &s) in kept.iter().enumerate() {
            for (a, &v) in inst.slots[s].vertices.iter().enumerate() {
                if v == i {
                    let raw = sol.assignment[s].c[a];
                    let mut r = f64_to_rational(raw, 1e-12);
                    if !r.is_positive() {
                        r = f64_to_rational(raw.max(f64::MIN_POSITIVE), 0.0);
                    }
                    owners.push((ks, a, r));
                }
            }
        }
        if owners.is_empty() {
            continue;
        }
        spent[i] = true;
        let total: Rational = owners.iter().map(|(_, _, r)| r.clone()).sum();
        for (ks, a, r) in owners {
            shares[ks][a] = ci * r / &total;
        }
    }
    let mut circuits = Vec::with_capacity(kept.len());
    for j in 0..inst.gamma_points.len() {
        let mut members = Vec::new();
        for (ks, &s) in kept
            .iter()
            .enumerate()
            .filter(|(_, &s)| inst.slots[s].term == j)
        {
            let slot = &inst.slots[s];
            let cover = &inst.covers[j].simplices[slot.cover].0;
            let c = CircuitPolynomial::new(
                cover.clone(),
                shares[ks].clone(),
                inst.gamma_points[j].clone(),
                Rational::one(),
            )?;
            let theta = circuit_number(&c, 64);
            let cap = theta.exact.unwrap_or(theta.lower);
            members.push((c, cap));
        }
        let total: Rational = members.iter().map(|(_, cap)| cap.clone()).sum();
        if !total.is_positive() {
            return Err(SoncError::Internal(format!(
                "no usable slot for {}",
                inst.gamma_points[j]
            )));
        }
        for (c, cap) in members {
            let dj = &inst.dtilde[j] * cap / &total;
            let signed = if inst.d[j].is_negative() { -dj } else { dj };
            circuits.push(c.with_d(signed));
        }
    }
    let monos: Vec<MonomialSquare> = inst
        .lambda_points
        .iter()
        .zip(&inst.c)
        .zip(&spent)
        .filter(|(_, &used)| !used)
        .map(|((p, c), _)| MonomialSquare {
            c: c.clone(),
            w: p.clone(),
        })
        .collect();
    SoncCertificate::assemble(&inst.f, circuits, monos)
}

/// Exact certificate from a feasible solution. `f` must be the polynomial
/// the instance was built from.
pub fn extract_certificate(
    inst: &RepInstance,
    sol: &RepSolution,
    f: &SparsePolynomial,
) -> Result<SoncCertificate, SoncError> {
    if *f != inst.f {
        return Err(SoncError::Internal(
            "instance was built from a different polynomial".into(),
        ));
    }
    if sol.status != RepStatus::Feasible {
        return Err(SoncError::Internal(format!(
            "cannot extract a certificate from a {} solution",
            sol.status.as_str()
        )));
    }
    build_certificate(inst, sol)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decision {
    Sonc {
        certificate: SoncCertificate,
        slack: Option<f64>,
    },
    NotSonc {
        reason: String,
        slack: Option<f64>,
    },
    Inconclusive {
        slack: f64,
        certificate: Option<SoncCertificate>,
    },
}

impl Decision {
    pub fn status(&self) -> &'static str {
        match self {
            Decision::Sonc { .. } => "SONC",
            Decision::NotSonc { .. } => "NOT_SONC",
            Decision::Inconclusive { .. } => "INCONCLUSIVE",
        }
    }

    pub fn slack(&self) -> Option<f64> {
        match self {
            Decision::Sonc { slack, .. } | Decision::NotSonc { slack, .. } => *slack,
            Decision::Inconclusive { slack, .. } => Some(*slack),
        }
    }

    pub fn certificate(&self) -> Option<&SoncCertificate> {
        match self {
            Decision::Sonc { certificate, .. } => Some(certificate),
            Decision::Inconclusive { certificate, .. } => certificate.as_ref(),
            Decision::NotSonc { .. } => None,
        }
    }

    pub fn is_sonc(&self) -> bool {
        matches!(self, Decision::Sonc { .. })
    }
}

pub fn decide_sonc(f: &SparsePolynomial, tol: f64) -> Result<Decision, SoncError> {
    decide_sonc_with(f, tol, BudgetMode::AtMost)
}

pub fn decide_sonc_with(
    f: &SparsePolynomial,
    tol: f64,
    mode: BudgetMode,
) -> Result<Decision, SoncError> {
    if f.is_zero() {
        return Err(SoncError::ZeroPolynomial);
    }
    let inst = match build_rep(f) {
        Ok(inst) => inst,
        Err(SoncError::TriviallyNonnegative) => {
            let monos = f
                .terms()
                .map(|(e, c)| MonomialSquare {
                    c: c.clone(),
                    w: e.clone(),
                })
                .collect();
            return Ok(Decision::Sonc {
                certificate: SoncCertificate::assemble(f, Vec::new(), monos)?,
                slack: None,
            });
        }
        Err(SoncError::NecessaryConditions { vertex, reason }) => {
            return Ok(Decision::NotSonc {
                reason: format!("necessary condition fails at vertex {vertex}: {reason}"),
                slack: None,
            })
        }
        Err(SoncError::Uncovered { beta }) => {
            return Ok(Decision::NotSonc {
                reason: format!("uncovered negative term {beta}"),
                slack: None,
            })
        }
        Err(e) => return Err(e),
    };
    let sol = solve_rep_with(&inst, tol, mode)?;
    Ok(match sol.status {
        RepStatus::Infeasible => Decision::NotSonc {
            reason: format!("REP infeasible (slack {:.6e})", sol.slack),
            slack: Some(sol.slack),
        },
        RepStatus::Feasible => {
            let cert = build_certificate(&inst, &sol)?;
            if cert.exact {
                Decision::Sonc {
                    certificate: cert,
                    slack: Some(sol.slack),
                }
            } else {
                Decision::Inconclusive {
                    slack: sol.slack,
                    certificate: Some(cert),
                }
            }
        }
        RepStatus::Inconclusive => Decision::Inconclusive {
            slack: sol.slack,
            certificate: None,
        },
    })
}

/// `decide_sonc` at the default tolerance.
pub fn decide(f: &SparsePolynomial) -> Result<Decision, SoncError> {
    decide_sonc(f, DEFAULT_TOL)
}

/// `log Θ` of a slot at the given shares, for diagnostics.
pub fn slot_log_theta(slot: &Slot, shares: &[Rational]) -> f64 {
    slot.weights
        .iter()
        .zip(shares)
        .map(|(l, c)| rational_to_f64(l) * (log_rational(c) - log_rational(l)))
        .sum()
}
