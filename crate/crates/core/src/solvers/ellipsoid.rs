//! Two-dimensional ellipsoid method for the dual of the
//! harvest-constrained rate maximization.
//!
//! The dual has exactly two variables, so every piece here is specialized
//! to dimension 2. Each iteration inspects the center: an infeasible
//! center (negative multiplier, or outside the cone `mu > lambda * g1`)
//! gets a feasibility cut, a feasible one gets an objective cut along the
//! dual subgradient `(q(S) - q_bar, power - tr(S))` where `S` maximizes the
//! Lagrangian at the center. The ellipsoid shrinks geometrically; iteration
//! stops once both semi-axes fall well below the requested tolerance so the
//! recovered primal point has residuals comfortably inside it.

use super::DualPoint;

/// Ellipsoid `{ x : (x - c)^T P^{-1} (x - c) <= 1 }` tracked through the
/// factor `B` with `P = B B^T`. The factored form keeps `d^T P d =
/// |B^T d|^2` nonnegative by construction, which the direct `P` update
/// loses to cancellation once the ellipsoid turns needle-shaped.
#[derive(Debug, Clone)]
struct Ellipsoid2 {
    center: [f64; 2],
    b: [[f64; 2]; 2],
}

impl Ellipsoid2 {
    fn ball(center: [f64; 2], radius: f64) -> Self {
        Self {
            center,
            b: [[radius, 0.0], [0.0, radius]],
        }
    }

    /// Cut away the halfspace `{ x : d . (x - center) > 0 }` and re-center.
    /// Returns false when the cut degenerates numerically (`B^T d = 0`).
    fn cut(&mut self, d: [f64; 2]) -> bool {
        let bt_d = [
            self.b[0][0] * d[0] + self.b[1][0] * d[1],
            self.b[0][1] * d[0] + self.b[1][1] * d[1],
        ];
        let norm = (bt_d[0] * bt_d[0] + bt_d[1] * bt_d[1]).sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return false;
        }
        let u = [bt_d[0] / norm, bt_d[1] / norm];
        let q = [
            self.b[0][0] * u[0] + self.b[0][1] * u[1],
            self.b[1][0] * u[0] + self.b[1][1] * u[1],
        ];
        // n = 2: center step (1/(n+1)) P d / sqrt(d^T P d) = q / 3, and
        // B <- (n/sqrt(n^2-1)) B (I - sigma u u^T) with
        // sigma = 1 - sqrt((n-1)/(n+1)).
        self.center[0] -= q[0] / 3.0;
        self.center[1] -= q[1] / 3.0;
        let grow = 2.0 / 3f64.sqrt();
        let sigma = 1.0 - 1.0 / 3f64.sqrt();
        for i in 0..2 {
            for j in 0..2 {
                self.b[i][j] = grow * (self.b[i][j] - sigma * q[i] * u[j]);
            }
        }
        true
    }

    /// Lengths of the two semi-axes (the singular values of B).
    fn semi_axes(&self) -> (f64, f64) {
        let fro_sq = self
            .b
            .iter()
            .flatten()
            .map(|&x| x * x)
            .sum::<f64>();
        let det = (self.b[0][0] * self.b[1][1] - self.b[0][1] * self.b[1][0]).abs();
        let disc = (fro_sq * fro_sq / 4.0 - det * det).max(0.0).sqrt();
        let s1 = (fro_sq / 2.0 + disc).max(0.0).sqrt();
        let s2 = (fro_sq / 2.0 - disc).max(0.0).sqrt();
        (s1, s2)
    }
}

/// One Lagrangian-maximizer evaluation at a feasible dual point.
#[derive(Debug, Clone, Copy)]
pub struct InnerEval {
    /// Harvested power `tr(G S G^H)` of the maximizer.
    pub q: f64,
    /// Transmit power `tr(S)` of the maximizer.
    pub trace: f64,
}

/// Outcome of a dual ellipsoid run.
#[derive(Debug, Clone, Copy)]
pub struct DualRun {
    /// Feasible dual point with the best primal residuals seen.
    pub best: DualPoint,
    pub iterations: usize,
    /// Both semi-axes at or below the tolerance and residuals within it.
    pub converged: bool,
}

/// Scaled residual of the candidate primal point produced at a dual point:
/// worst of harvest shortfall, budget excess, and the two complementary
/// slackness products, each normalized by its natural scale.
pub fn primal_residual(dual: DualPoint, eval: InnerEval, q_bar: f64, power: f64) -> f64 {
    let rq = (q_bar - eval.q).max(0.0) / q_bar.abs().max(1.0);
    let rp = (eval.trace - power).max(0.0) / power.max(1.0);
    let cq = (dual.lambda * (eval.q - q_bar)).abs() / (dual.lambda * q_bar.abs()).max(1.0);
    let cp = (dual.mu * (power - eval.trace)).abs() / (dual.mu * power).max(1.0);
    rq.max(rp).max(cq).max(cp)
}

/// Minimize the dual function over `lambda >= 0`, `mu > lambda * g1` by
/// ellipsoid cuts, starting from a ball around `center` that covers the
/// bounding box `[0, lambda_ub] x [0, mu_ub]`.
pub fn run_dual(
    g1: f64,
    q_bar: f64,
    power: f64,
    center: [f64; 2],
    lambda_ub: f64,
    mu_ub: f64,
    tol: f64,
    max_iter: usize,
    mut inner: impl FnMut(DualPoint) -> InnerEval,
) -> DualRun {
    let radius = {
        let dl = center[0].max(lambda_ub - center[0]).max(0.0);
        let dm = center[1].max(mu_ub - center[1]).max(0.0);
        1.01 * (dl * dl + dm * dm).sqrt().max(1e-6)
    };
    let mut ell = Ellipsoid2::ball(center, radius);
    // Drive the ellipsoid well past the requested tolerance; the extra
    // iterations are cheap and buy primal residual margin.
    let target = (tol * 1e-3).max(1e-13);
    let mut best: Option<(DualPoint, f64)> = None;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let dual = DualPoint::new(ell.center[0], ell.center[1]);
        let cut_dir = if dual.lambda < 0.0 {
            [-1.0, 0.0]
        } else if !dual.is_feasible(g1) {
            [g1, -1.0]
        } else {
            let eval = inner(dual);
            let residual = primal_residual(dual, eval, q_bar, power);
            if best.map_or(true, |(_, r)| residual < r) {
                best = Some((dual, residual));
            }
            let d = [eval.q - q_bar, power - eval.trace];
            if d[0] == 0.0 && d[1] == 0.0 {
                break; // exactly stationary: primal feasible and tight
            }
            d
        };
        if !ell.cut(cut_dir) {
            break;
        }
        let (a, b) = ell.semi_axes();
        if a.max(b) <= target && best.is_some() {
            break;
        }
    }
    let (a, b) = ell.semi_axes();
    match best {
        Some((dual, residual)) => DualRun {
            best: dual,
            iterations,
            converged: a.max(b) <= tol && residual <= tol,
        },
        // Never saw a feasible center: fall back to the (feasible by
        // construction) initial center so callers still get a flagged,
        // well-defined result.
        None => DualRun {
            best: DualPoint::new(center[0], center[1]),
            iterations,
            converged: false,
        },
    }
}
