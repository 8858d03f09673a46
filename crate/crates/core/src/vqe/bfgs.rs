//! Dense BFGS with a strong-Wolfe line search.
//!
//! The line search also accepts points satisfying the approximate Wolfe
//! conditions of Hager and Zhang once function differences approach rounding
//! level, which lets the iteration keep using gradient information near a
//! minimum where sufficient-decrease tests become unreliable.

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    /// Stop once `‖g‖_∞` drops below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Stop after this many consecutive iterations without relative decrease
    /// above machine precision.
    pub stall_iters: usize,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self { grad_tol: 1e-10, max_iters: 10_000, stall_iters: 10 }
    }
}

#[derive(Debug, Clone)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Objective after each accepted step, starting with the initial value.
    /// `f` is never above `trace[0]`.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// The line search could not make progress.
    pub stalled: bool,
}

const C1: f64 = 1e-4;
const C2: f64 = 0.9;
const APPROX_EPS: f64 = 1e-14;

#[derive(Clone)]
struct Trial {
    a: f64,
    f: f64,
    d: f64,
    g: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Minimizes `objective`, which returns value and gradient.
pub fn minimize<F>(mut objective: F, x0: &[f64], opts: &BfgsOptions) -> BfgsOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let (mut f, mut g) = objective(&x);
    let mut evaluations = 1;
    let mut trace = vec![f];
    if n == 0 {
        return BfgsOutcome {
            x,
            f,
            grad_norm: 0.0,
            iterations: 0,
            evaluations,
            trace,
            converged: true,
            stalled: false,
        };
    }

    let mut h = identity(n);
    let mut h_scaled = false;
    let mut iterations = 0;
    let mut flat = 0;
    let mut stalled = false;
    let mut converged = inf_norm(&g) < opts.grad_tol;
    let mut x_trial = vec![0.0; n];

    while !converged && iterations < opts.max_iters {
        let mut dir = mat_vec(&h, &g, n);
        dir.iter_mut().for_each(|v| *v = -*v);
        let mut d0 = dot(&dir, &g);
        if !(d0 < 0.0) {
            h = identity(n);
            h_scaled = false;
            dir = g.iter().map(|v| -v).collect();
            d0 = dot(&dir, &g);
        }
        let a_init = if h_scaled { 1.0 } else { (1.0 / inf_norm(&g)).min(1.0) };

        let mut eval = |a: f64| {
            x_trial.iter_mut().zip(&x).zip(&dir).for_each(|((t, xi), di)| *t = xi + a * di);
            let (ft, gt) = objective(&x_trial);
            evaluations += 1;
            let dt = dot(&gt, &dir);
            Trial { a, f: ft, d: dt, g: gt }
        };
        let found = line_search(f, d0, &g, a_init, &mut eval);
        let Some(step) = found else {
            if h_scaled {
                // retry once along steepest descent before giving up
                h = identity(n);
                h_scaled = false;
                continue;
            }
            stalled = true;
            break;
        };

        let s: Vec<f64> = dir.iter().map(|d| step.a * d).collect();
        let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        x.iter_mut().zip(&s).for_each(|(xi, si)| *xi += si);
        let decrease = f - step.f;
        f = step.f;
        g = step.g;
        iterations += 1;
        trace.push(f);

        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if !h_scaled {
                let yy = dot(&y, &y);
                let scale = sy / yy;
                h = identity(n);
                h.iter_mut().for_each(|v| *v *= scale);
                h_scaled = true;
            }
            bfgs_update(&mut h, &s, &y, sy, n);
        }

        converged = inf_norm(&g) < opts.grad_tol;
        if decrease <= f64::EPSILON * f.abs() {
            flat += 1;
            if flat >= opts.stall_iters {
                stalled = true;
                break;
            }
        } else {
            flat = 0;
        }
    }

    if f > trace[0] {
        // approximate-Wolfe steps may drift upward by rounding-level amounts
        x = x0.to_vec();
        f = trace[0];
    }
    BfgsOutcome { grad_norm: inf_norm(&g), x, f, iterations, evaluations, trace, converged, stalled }
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec(h: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| dot(&h[i * n..(i + 1) * n], v)).collect()
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64, n: usize) {
    let hy = mat_vec(h, y, n);
    let yhy = dot(y, &hy);
    let rho = 1.0 / sy;
    let c = (sy + yhy) * rho * rho;
    for i in 0..n {
        let row = &mut h[i * n..(i + 1) * n];
        for j in 0..n {
            row[j] += c * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

fn acceptable(t: &Trial, f0: f64, d0: f64) -> bool {
    let armijo = t.f <= f0 + C1 * t.a * d0;
    let curvature = t.d.abs() <= -C2 * d0;
    if armijo && curvature {
        return true;
    }
    // approximate Wolfe: (2δ − 1)φ'(0) ≥ φ'(a) ≥ σφ'(0) with δ = 0.1, σ = C2
    
    t.d >= C2 * d0 && t.d <= -0.8 * d0 && t.f <= f0 + APPROX_EPS * f0.abs()
}

fn line_search<E>(f0: f64, d0: f64, g0: &[f64], a_init: f64, eval: &mut E) -> Option<Trial>
where
    E: FnMut(f64) -> Trial,
{
    let origin = Trial { a: 0.0, f: f0, d: d0, g: g0.to_vec() };
    let mut prev = origin;
    let mut a = a_init;
    for i in 0..40 {
        let t = eval(a);
        if !t.f.is_finite() {
            a = 0.5 * (prev.a + a);
            continue;
        }
        if t.f > f0 + C1 * a * d0 || (i > 0 && t.f >= prev.f) {
            if acceptable(&t, f0, d0) {
                return Some(t);
            }
            return zoom(prev, t, f0, d0, eval);
        }
        if acceptable(&t, f0, d0) {
            return Some(t);
        }
        if t.d >= 0.0 {
            return zoom(t, prev, f0, d0, eval);
        }
        prev = t;
        a *= 2.0;
    }
    (prev.a > 0.0 && prev.f < f0).then_some(prev)
}

fn zoom<E>(mut lo: Trial, mut hi: Trial, f0: f64, d0: f64, eval: &mut E) -> Option<Trial>
where
    E: FnMut(f64) -> Trial,
{
    for _ in 0..40 {
        let width = hi.a - lo.a;
        if width.abs() <= 1e-14 * lo.a.abs().max(hi.a.abs()) {
            break;
        }
        let a = cubic_min(&lo, &hi)
            .filter(|a| {
                let (l, u) = if lo.a < hi.a { (lo.a, hi.a) } else { (hi.a, lo.a) };
                let margin = 0.1 * (u - l);
                *a > l + margin && *a < u - margin
            })
            .unwrap_or(lo.a + 0.5 * width);
        let t = eval(a);
        if acceptable(&t, f0, d0) {
            return Some(t);
        }
        if t.f > f0 + C1 * a * d0 || t.f >= lo.f {
            hi = t;
        } else {
            if t.d * (hi.a - lo.a) >= 0.0 {
                hi = lo;
            }
            lo = t;
        }
    }
    (lo.a > 0.0 && lo.f < f0).then_some(lo)
}

/// Minimizer of the cubic interpolating values and slopes at two points.
fn cubic_min(p: &Trial, q: &Trial) -> Option<f64> {
    let d1 = p.d + q.d - 3.0 * (p.f - q.f) / (p.a - q.a);
    let disc = d1 * d1 - p.d * q.d;
    if !(disc >= 0.0) {
        return None;
    }
    let d2 = (q.a - p.a).signum() * disc.sqrt();
    let denom = q.d - p.d + 2.0 * d2;
    if denom == 0.0 {
        return None;
    }
    let a = q.a - (q.a - p.a) * (q.d + d2 - d1) / denom;
    a.is_finite().then_some(a)
}
