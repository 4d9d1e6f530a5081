//! Adaptive Gauss–Legendre quadrature.
//!
//! Each panel is integrated with a 20-point rule and compared against the
//! same rule applied to its two halves; panels that disagree are split.

use std::sync::OnceLock;

const ORDER: usize = 20;
const MAX_DEPTH: u32 = 48;
const MAX_EVALUATIONS: usize = 2_000_000;

/// Nodes and weights of the Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_order(x) and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=order {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            if order == 1 {
                p0 = 1.0;
            }
            dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Result of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// `∫|f|` on the same nodes; the ratio to `|value|` measures cancellation.
    pub abs_value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    let mut abs = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        let v = f(mid + half * x);
        sum += w * v;
        abs += w * v.abs();
    }
    (sum * half, abs * half)
}

struct State {
    value: f64,
    comp: f64,
    abs_value: f64,
    error: f64,
    evaluations: usize,
}

impl State {
    fn add(&mut self, v: f64) {
        let t = self.value + v;
        if self.value.abs() >= v.abs() {
            self.comp += (self.value - t) + v;
        } else {
            self.comp += (v - t) + self.value;
        }
        self.value = t;
    }
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: (f64, f64),
    tol: f64,
    rel_tol: f64,
    depth: u32,
    state: &mut State,
) {
    let mid = 0.5 * (a + b);
    let left = panel(f, a, mid);
    let right = panel(f, mid, b);
    state.evaluations += 2 * ORDER;
    let split = left.0 + right.0;
    let err = (split - whole.0).abs();
    // no panel can be resolved below the roundoff of its own sum
    let roundoff = 16.0 * f64::EPSILON * (left.1 + right.1);
    let local_tol = tol.max(rel_tol * (left.1 + right.1)).max(roundoff);
    if err <= local_tol
        || depth >= MAX_DEPTH
        || state.evaluations >= MAX_EVALUATIONS
        || mid <= a
        || mid >= b
    {
        state.add(split);
        state.abs_value += left.1 + right.1;
        state.error += err;
        return;
    }
    refine(f, a, mid, left, 0.5 * tol, rel_tol, depth + 1, state);
    refine(f, mid, b, right, 0.5 * tol, rel_tol, depth + 1, state);
}

/// Integrates `f` over `[a, b]` until each panel meets
/// `max(abs_tol share, rel_tol * ∫_panel |f|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            abs_value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
        };
    }
    let mut state = State {
        value: 0.0,
        comp: 0.0,
        abs_value: 0.0,
        error: 0.0,
        evaluations: ORDER,
    };
    let whole = panel(&f, a, b);
    refine(&f, a, b, whole, abs_tol, rel_tol, 0, &mut state);
    Quadrature {
        value: state.value + state.comp,
        abs_value: state.abs_value,
        error_estimate: state.error,
        evaluations: state.evaluations,
    }
}
