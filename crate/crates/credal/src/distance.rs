//! Normed distance between two previsions over the normal cone at a vertex.
//!
//! For vertices `E`, `P` with `D = P − E` and the centered cone basis
//! `f'_1..f'_k` at `E`, every cone gamble is `h = Σ α_i f'_i` (constants
//! dropped: they change neither the numerator nor the minimal norm). The
//! objective `(P(h) − E(h))/‖h‖` becomes
//!
//! ```text
//!   φ(α) = (α·λ)‖D‖² / sqrt(α Π αᵀ)
//! ```
//!
//! with `λ_i = f'_i·D/‖D‖²`, `u_i = f'_i − λ_i D`, and
//! `Π = ‖D‖² λλᵀ + UUᵀ` (the Gram matrix of the centered basis). Maximizing
//! φ is equivalent to minimizing `α Π αᵀ` subject to `(α·λ)‖D‖² = 1`,
//! `α ≥ 0`; the distance is `1/sqrt(objective)`.
//!
//! The QP is solved exactly by enumerating supports (zero patterns of α):
//! on the optimal support the equality-constrained KKT system yields the
//! constrained optimum, and basis sizes here are small.

use nalgebra::{DMatrix, DVector};

use crate::cone::NormalConeBasis;
use crate::error::{Error, Result};
use crate::gamble::{Gamble, LinearPrevision};
use crate::tol::EPS_VERTEX;

/// Non-negativity slack for QP candidates.
const EPS_ALPHA: f64 = 1e-9;
/// Residual tolerance for the equality constraint of a candidate.
const EPS_EQUALITY: f64 = 1e-7;
/// Largest basis solved by exhaustive support enumeration. Degenerate
/// vertices of lower-probability credal sets can be tight on far more rows
/// than the dimension; those fall through to the iterative active-set
/// solver.
const QP_ENUMERATION_LIMIT: usize = 12;

/// The per-pair decomposition feeding the QP.
#[derive(Clone, Debug)]
pub struct DecompositionData {
    /// `λ_i = f'_i·D / ‖D‖²`.
    pub lambda: Vec<f64>,
    /// Residuals `u_i = f'_i − λ_i D`, each orthogonal to `D`.
    pub u_rows: Vec<Gamble>,
    /// `Π = ‖D‖² λλᵀ + UUᵀ`, symmetric positive semi-definite.
    pub pi: DMatrix<f64>,
    /// `‖D‖ = ‖P − E‖`.
    pub d_norm: f64,
    /// `D = P − E`; kept so candidates can be evaluated on the
    /// reconstructed cone gamble instead of the (possibly ill-conditioned)
    /// quadratic form.
    d: Gamble,
}

impl DecompositionData {
    /// The cone gamble `h(α) = Σ α_i f'_i`, reconstructed as
    /// `(λ·α) D + Σ α_i u_i`.
    pub fn cone_gamble(&self, alpha: &[f64]) -> Gamble {
        let lam: f64 = alpha.iter().zip(&self.lambda).map(|(a, l)| a * l).sum();
        let mut h = self.d.scaled(lam);
        for (a, u) in alpha.iter().zip(&self.u_rows) {
            if *a != 0.0 {
                h = h.axpy(*a, u);
            }
        }
        h
    }
}

/// Rescales a non-negative candidate so the equality `D·h(α) = 1` holds
/// exactly on the reconstructed gamble, and evaluates the objective as
/// `‖h‖²`. Rejects candidates whose reach is (numerically) not positive.
/// Every accepted candidate is a feasible point of the QP, so minimizing
/// over them can never undercut the true optimum.
fn evaluate_candidate(data: &DecompositionData, mut alpha: Vec<f64>) -> Option<(f64, Vec<f64>)> {
    let h = data.cone_gamble(&alpha);
    let reach = h.dot(&data.d).expect("equal lengths");
    if reach <= EPS_EQUALITY {
        return None;
    }
    for a in alpha.iter_mut() {
        *a /= reach;
    }
    let norm = h.norm() / reach;
    Some((norm * norm, alpha))
}

/// Outcome of the constrained QP.
#[derive(Clone, Debug, PartialEq)]
pub enum QpSolution {
    /// Global minimizer of `α Π αᵀ` on the feasible set.
    Optimal { alpha: Vec<f64>, objective: f64 },
    /// No `α ≥ 0` meets the equality constraint (no cone gamble separates
    /// `P` above `E`).
    Infeasible,
}

/// Result of the normed-distance computation for one vertex pair.
#[derive(Clone, Debug)]
pub struct NormedDistanceResult {
    /// `max_h (P(h) − E(h))/‖h‖` over the cone; zero when the pair is
    /// degenerate or the QP is infeasible.
    pub distance: f64,
    /// Optimal QP weights over the cone basis (zeros when distance is 0).
    pub alpha: Vec<f64>,
    /// The maximizing gamble `Σ α_i f'_i`, unnormalized; the zero gamble
    /// when distance is 0.
    pub witness: Gamble,
}

/// Decomposes the centered basis against `D = P − E`.
pub fn decompose(
    basis: &NormalConeBasis,
    e: &LinearPrevision,
    p: &LinearPrevision,
) -> Result<DecompositionData> {
    if basis.is_empty() {
        return Err(Error::DegenerateAssessment);
    }
    let d = p.diff(e);
    let d_norm = d.norm();
    if d_norm <= EPS_VERTEX {
        return Err(Error::DegeneratePair);
    }
    let d_sq = d_norm * d_norm;
    let k = basis.centered.len();
    let mut lambda = Vec::with_capacity(k);
    let mut u_rows = Vec::with_capacity(k);
    for f in &basis.centered {
        let l = f.dot(&d).expect("equal lengths") / d_sq;
        lambda.push(l);
        u_rows.push(f.axpy(-l, &d));
    }
    let mut pi = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = d_sq * lambda[i] * lambda[j]
                + u_rows[i].dot(&u_rows[j]).expect("equal lengths");
            pi[(i, j)] = v;
            pi[(j, i)] = v;
        }
    }
    Ok(DecompositionData {
        lambda,
        u_rows,
        pi,
        d_norm,
        d,
    })
}

/// Solves `min α Π αᵀ s.t. (α·λ)‖D‖² = 1, α ≥ 0`.
///
/// Small bases are solved by exhaustive support enumeration; bases beyond
/// [`QP_ENUMERATION_LIMIT`] (degenerate vertices) by an iterative
/// active-set method. Both find the global optimum of this convex QP.
pub fn solve_qp(data: &DecompositionData) -> QpSolution {
    if data.lambda.len() <= QP_ENUMERATION_LIMIT {
        solve_qp_enumerate(data)
    } else {
        solve_qp_active_set(data)
    }
}

/// The linear coefficient of the equality constraint, `c = ‖D‖²·λ`.
fn equality_coefficients(data: &DecompositionData) -> Vec<f64> {
    let d_sq = data.d_norm * data.d_norm;
    data.lambda.iter().map(|l| l * d_sq).collect()
}

/// Equality-constrained KKT solve restricted to `support`:
///
/// ```text
///   [ 2Π_SS  −c_S ] [α]   [0]
///   [  c_Sᵀ    0  ] [μ] = [1]
/// ```
///
/// Returns the α-part (support order) and the multiplier μ, or `None` when
/// the system is numerically hopeless. Singular systems fall back to the
/// minimum-norm least-squares solution; they are consistent whenever
/// `c_S ≠ 0`.
fn kkt_solve(
    pi: &DMatrix<f64>,
    c: &[f64],
    support: &[usize],
) -> Option<(Vec<f64>, f64)> {
    let m = support.len();
    let mut kkt = DMatrix::<f64>::zeros(m + 1, m + 1);
    for (a, &i) in support.iter().enumerate() {
        for (b, &j) in support.iter().enumerate() {
            kkt[(a, b)] = 2.0 * pi[(i, j)];
        }
        kkt[(a, m)] = -c[i];
        kkt[(m, a)] = c[i];
    }
    let mut rhs = DVector::<f64>::zeros(m + 1);
    rhs[m] = 1.0;
    let accept = |s: &DVector<f64>| {
        s.iter().all(|v| v.is_finite()) && (&kkt * s - &rhs).norm() <= 1e-8
    };
    let sol = match kkt.clone().lu().solve(&rhs) {
        Some(s) if accept(&s) => s,
        _ => {
            let svd = kkt.clone().svd(true, true);
            match svd.solve(&rhs, 1e-12) {
                Ok(s) if accept(&s) => s,
                _ => return None,
            }
        }
    };
    let mu = sol[m];
    Some((sol.iter().take(m).copied().collect(), mu))
}

/// Exhaustive zero-pattern enumeration: on the optimal support the
/// equality-constrained minimizer is the constrained optimum, so the best
/// feasible candidate over all supports is the global minimum.
pub fn solve_qp_enumerate(data: &DecompositionData) -> QpSolution {
    let k = data.lambda.len();
    let c = equality_coefficients(data);
    if c.iter().all(|&ci| ci <= 0.0) {
        return QpSolution::Infeasible;
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u64..(1u64 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        if support.iter().all(|&i| c[i] <= 0.0) {
            continue; // equality unreachable with α ≥ 0 on this support
        }
        let Some((sol, _mu)) = kkt_solve(&data.pi, &c, &support) else {
            continue;
        };
        let mut alpha = vec![0.0; k];
        let mut ok = true;
        for (a, &i) in support.iter().enumerate() {
            if sol[a] < -EPS_ALPHA {
                ok = false;
                break;
            }
            alpha[i] = sol[a].max(0.0);
        }
        if !ok {
            continue;
        }
        let Some((objective, alpha)) = evaluate_candidate(data, alpha) else {
            continue;
        };
        match &best {
            Some((b, _)) if *b <= objective => {}
            _ => best = Some((objective, alpha)),
        }
    }
    match best {
        Some((objective, alpha)) if objective > 0.0 => QpSolution::Optimal { alpha, objective },
        _ => QpSolution::Infeasible,
    }
}

/// Iterative active-set solver for large (degenerate-vertex) bases.
///
/// Maintains a feasible point and a passive set `P`; alternates the
/// equality-constrained solve on `P` with clamping line steps (dropping
/// variables the step drives to zero) and optimality tests (bringing in
/// the most negative dual). The objective strictly decreases across outer
/// iterations, so termination is finite; an iteration cap guards against
/// degenerate cycling.
pub fn solve_qp_active_set(data: &DecompositionData) -> QpSolution {
    let k = data.lambda.len();
    let c = equality_coefficients(data);
    // Start from the best single positive coordinate.
    let start = (0..k)
        .filter(|&i| c[i] > 0.0)
        .min_by(|&a, &b| {
            let fa = data.pi[(a, a)] / (c[a] * c[a]);
            let fb = data.pi[(b, b)] / (c[b] * c[b]);
            fa.partial_cmp(&fb).unwrap()
        });
    let Some(start) = start else {
        return QpSolution::Infeasible;
    };
    let mut alpha = vec![0.0; k];
    alpha[start] = 1.0 / c[start];
    let mut passive = vec![false; k];
    passive[start] = true;

    let max_outer = 100 + 20 * k;
    let mut mu = 0.0;
    for _ in 0..max_outer {
        // Restricted minimization on the passive set, with clamping.
        loop {
            let support: Vec<usize> = (0..k).filter(|&i| passive[i]).collect();
            if support.is_empty() {
                break;
            }
            let Some((z_s, mu_s)) = kkt_solve(&data.pi, &c, &support) else {
                break;
            };
            mu = mu_s;
            let mut z = vec![0.0; k];
            for (a, &i) in support.iter().enumerate() {
                z[i] = z_s[a];
            }
            if support.iter().all(|&i| z[i] >= -EPS_ALPHA) {
                for &i in &support {
                    alpha[i] = z[i].max(0.0);
                }
                break;
            }
            // Step toward z until the first coordinate hits zero.
            let mut t = 1.0f64;
            for &i in &support {
                if z[i] < alpha[i] && z[i] < 0.0 {
                    t = t.min(alpha[i] / (alpha[i] - z[i]));
                }
            }
            for &i in &support {
                alpha[i] += t * (z[i] - alpha[i]);
                if alpha[i] <= EPS_ALPHA {
                    alpha[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
        // Dual feasibility of the inactive coordinates.
        let grad: Vec<f64> = (0..k)
            .map(|i| {
                2.0 * (0..k)
                    .filter(|&j| alpha[j] != 0.0)
                    .map(|j| data.pi[(i, j)] * alpha[j])
                    .sum::<f64>()
            })
            .collect();
        let scale = 1.0 + mu.abs() + grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let entering = (0..k)
            .filter(|&i| !passive[i])
            .map(|i| (i, grad[i] - mu * c[i]))
            .filter(|&(_, w)| w < -1e-10 * scale)
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        match entering {
            None => return finish_active_set(data, alpha),
            Some((i, _)) => passive[i] = true,
        }
    }
    // Cap reached (cycling on a degenerate face): the current point is
    // feasible and near-optimal; report it rather than nothing.
    finish_active_set(data, alpha)
}

/// Re-evaluates the final iterate on the reconstructed cone gamble and
/// packages the result.
fn finish_active_set(data: &DecompositionData, alpha: Vec<f64>) -> QpSolution {
    match evaluate_candidate(data, alpha) {
        Some((objective, alpha)) if objective > 0.0 => QpSolution::Optimal { alpha, objective },
        _ => QpSolution::Infeasible,
    }
}

fn quad_form(pi: &DMatrix<f64>, alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut acc = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            acc += alpha[i] * pi[(i, j)] * alpha[j];
        }
    }
    acc
}

/// Evaluates `φ(α)` directly; used by the Monte-Carlo oracle in tests and
/// kept here so the formula lives next to the QP it certifies.
pub fn phi(data: &DecompositionData, alpha: &[f64]) -> f64 {
    let d_sq = data.d_norm * data.d_norm;
    let num: f64 = alpha
        .iter()
        .zip(&data.lambda)
        .map(|(a, l)| a * l)
        .sum::<f64>()
        * d_sq;
    let den = quad_form(&data.pi, alpha).sqrt();
    if den <= 0.0 {
        0.0
    } else {
        num / den
    }
}

/// The normed distance `d_E(E, P)` over the cone at `E`, with the witness
/// gamble. Degenerate pairs (coincident points) and infeasible QPs yield
/// distance 0.
pub fn normed_distance(
    basis: &NormalConeBasis,
    e: &LinearPrevision,
    p: &LinearPrevision,
) -> NormedDistanceResult {
    let zero = || NormedDistanceResult {
        distance: 0.0,
        alpha: vec![0.0; basis.len()],
        witness: Gamble::from_vec(vec![0.0; e.len()]),
    };
    let data = match decompose(basis, e, p) {
        Ok(d) => d,
        Err(_) => return zero(),
    };
    match solve_qp(&data) {
        QpSolution::Infeasible => zero(),
        QpSolution::Optimal { alpha, objective } => {
            let mut witness = Gamble::from_vec(vec![0.0; e.len()]);
            for (a, f) in alpha.iter().zip(&basis.centered) {
                witness = witness.axpy(*a, f);
            }
            NormedDistanceResult {
                distance: 1.0 / objective.sqrt(),
                alpha,
                witness,
            }
        }
    }
}
