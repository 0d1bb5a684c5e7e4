//! Adaptive numerical integration for complex-valued integrands.
//!
//! The basic rule is 15-point Gauss-Kronrod on a panel, refined by a
//! worst-panel-first subdivision queue. Helpers cover the nested triangle
//! integrals (`t > t'`) that appear in time-ordered kernels and a Chebyshev
//! interpolant used to cache smooth one-dimensional profiles.

use crate::C64;
use std::collections::BinaryHeap;

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights, with the
// embedded 7-point Gauss weights. Values from QUADPACK's dqk15.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// Tolerances and budget for the adaptive driver.
#[derive(Clone, Copy, Debug)]
pub struct QuadOpts {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts { rel_tol: 1e-9, abs_tol: 1e-12, max_panels: 4000 }
    }
}

impl QuadOpts {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadOpts { rel_tol, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: C64,
    pub err: f64,
    pub evals: usize,
}

fn gk15<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut fv1 = [C64::new(0.0, 0.0); 7];
    let mut fv2 = [C64::new(0.0, 0.0); 7];
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for (j, &x) in XGK.iter().enumerate().take(7) {
        let dx = h * x;
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let fsum = f1 + f2;
        kron += fsum * WGK[j];
        resabs += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss += fsum * WG[j / 2];
        }
    }
    // oscillation measure Σ w |f - mean|, used to sharpen the raw K-G error
    let mean = kron * 0.5;
    let mut resasc = WGK[7] * (fc - mean).norm();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }
    let resasc = resasc * h.abs();
    let resabs = resabs * h.abs();
    let raw = ((kron - gauss) * h).norm();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        let scale = (200.0 * raw / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (kron * h, err)
}

struct Panel {
    a: f64,
    b: f64,
    value: C64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Integrate `f` over `[a, b]` adaptively.
pub fn integrate<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, opts: &QuadOpts) -> QuadResult {
    if a == b {
        return QuadResult { value: C64::new(0.0, 0.0), err: 0.0, evals: 0 };
    }
    let mut evals = 15usize;
    let (v, e) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    let mut total = v;
    let mut total_err = e;
    heap.push(Panel { a, b, value: v, err: e });
    while total_err > opts.abs_tol.max(opts.rel_tol * total.norm()) && heap.len() < opts.max_panels
    {
        let worst = match heap.pop() {
            Some(p) if p.err > 0.0 => p,
            _ => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(Panel { err: 0.0, ..worst });
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2 });
    }
    QuadResult { value: total, err: total_err, evals }
}

/// Integrate a real-valued function over `[a, b]`.
pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: &QuadOpts) -> f64 {
    integrate(|x| C64::new(f(x), 0.0), a, b, opts).value.re
}

/// Nested integral over the ordered triangle `a <= t' <= t <= b`:
/// `∫_a^b dt ∫_a^t dt' f(t, t')`.
pub fn integrate_triangle<F>(mut f: F, a: f64, b: f64, opts: &QuadOpts) -> C64
where
    F: FnMut(f64, f64) -> C64,
{
    let inner_opts = QuadOpts {
        rel_tol: opts.rel_tol * 0.5,
        abs_tol: opts.abs_tol * 0.1,
        max_panels: opts.max_panels,
    };
    integrate(
        |t| integrate(|tp| f(t, tp), a, t, &inner_opts).value,
        a,
        b,
        opts,
    )
    .value
}

/// Nested integral over the full rectangle `[a, b] × [a2, b2]`.
pub fn integrate_rect<F>(mut f: F, a: f64, b: f64, a2: f64, b2: f64, opts: &QuadOpts) -> C64
where
    F: FnMut(f64, f64) -> C64,
{
    let inner_opts = QuadOpts {
        rel_tol: opts.rel_tol * 0.5,
        abs_tol: opts.abs_tol * 0.1,
        max_panels: opts.max_panels,
    };
    integrate(
        |t| integrate(|tp| f(t, tp), a2, b2, &inner_opts).value,
        a,
        b,
        opts,
    )
    .value
}

/// Two-point Richardson extrapolation in a regulator `eps`: combines `g(eps)`
/// and `g(eps/2)` assuming an O(eps) leading error.
pub fn richardson<F: FnMut(f64) -> C64>(mut g: F, eps: f64) -> C64 {
    let full = g(eps);
    let half = g(0.5 * eps);
    half * 2.0 - full
}

/// Chebyshev interpolant of a smooth complex function on `[a, b]`.
///
/// Fitting doubles the node count until the trailing coefficients fall below
/// the requested tolerance, so evaluating the interpolant is a cheap stand-in
/// for an expensive integrand factor.
#[derive(Clone, Debug)]
pub struct ChebFn {
    a: f64,
    b: f64,
    coeffs: Vec<C64>,
}

impl ChebFn {
    pub fn fit<F: FnMut(f64) -> C64>(mut f: F, a: f64, b: f64, tol: f64) -> ChebFn {
        let mut n = 16usize;
        loop {
            let coeffs = cheb_coeffs(&mut f, a, b, n);
            let scale = coeffs.iter().map(|c| c.norm()).fold(0.0f64, f64::max).max(1e-300);
            let tail: f64 = coeffs[n.saturating_sub(3)..].iter().map(|c| c.norm()).sum();
            if tail <= tol * scale || n >= 2048 {
                let mut trimmed = coeffs;
                while trimmed.len() > 4
                    && trimmed.last().map(|c| c.norm()).unwrap_or(0.0) < 1e-16 * scale
                {
                    trimmed.pop();
                }
                return ChebFn { a, b, coeffs: trimmed };
            }
            n *= 2;
        }
    }

    pub fn eval(&self, x: f64) -> C64 {
        // Clenshaw recurrence
        let u = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let u2 = 2.0 * u;
        let mut b1 = C64::new(0.0, 0.0);
        let mut b2 = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let tmp = b1;
            b1 = c + b1 * u2 - b2;
            b2 = tmp;
        }
        self.coeffs[0] + b1 * u - b2
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }
}

fn cheb_coeffs<F: FnMut(f64) -> C64>(f: &mut F, a: f64, b: f64, n: usize) -> Vec<C64> {
    let vals: Vec<C64> = (0..=n)
        .map(|j| {
            let theta = std::f64::consts::PI * j as f64 / n as f64;
            let u = theta.cos();
            f(0.5 * (a + b) + 0.5 * (b - a) * u)
        })
        .collect();
    (0..=n)
        .map(|k| {
            let mut acc = C64::new(0.0, 0.0);
            for (j, v) in vals.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                let theta = std::f64::consts::PI * (j as f64) * (k as f64) / n as f64;
                acc += v * w * theta.cos();
            }
            acc * (2.0 / n as f64) * if k == 0 { 0.5 } else { 1.0 }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_oscillatory_gaussian() {
        // ∫ e^{-t²/2} e^{iωt} dt over wide bounds = √(2π) e^{-ω²/2}
        let omega = 3.0;
        let opts = QuadOpts::default();
        let r = integrate(
            |t| C64::new((-0.5 * t * t).exp(), 0.0) * C64::new(0.0, omega * t).exp(),
            -12.0,
            12.0,
            &opts,
        );
        let exact = (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * omega * omega).exp();
        assert_abs_diff_eq!(r.value.re, exact, epsilon = 1e-10);
        assert_abs_diff_eq!(r.value.im, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn resolves_narrow_peak() {
        // Lorentzian of width 1e-5 integrates to ~π
        let eps = 1e-5;
        let opts = QuadOpts { max_panels: 20000, ..Default::default() };
        let r = integrate_real(|t| eps / (t * t + eps * eps), -1.0, 1.0, &opts);
        let exact = 2.0 * (1.0 / eps).atan();
        assert_abs_diff_eq!(r, exact, epsilon = 1e-8 * exact);
    }

    #[test]
    fn long_range_oscillatory_decay() {
        // reference value from an independent high-order integrator
        let a = 0.65;
        let opts = QuadOpts { rel_tol: 1e-12, abs_tol: 1e-15, max_panels: 500_000 };
        let r = integrate(
            |w| C64::new((a * w).sin().powi(2) / (w * w), 0.0),
            1.0,
            4000.0,
            &opts,
        );
        assert_abs_diff_eq!(r.value.re, 0.617_570_507_014_890_6, epsilon = 1e-10);
    }

    #[test]
    fn triangle_matches_closed_form() {
        // ∫_0^1 dt ∫_0^t dt' e^{t+t'} = (e-1)²/2... direct: ∫_0^1 e^t (e^t - 1) dt
        let got = integrate_triangle(
            |t, tp| C64::new((t + tp).exp(), 0.0),
            0.0,
            1.0,
            &QuadOpts::default(),
        );
        let e = std::f64::consts::E;
        let exact = 0.5 * (e * e - 1.0) - (e - 1.0);
        assert_abs_diff_eq!(got.re, exact, epsilon = 1e-10);
    }

    #[test]
    fn cheb_reproduces_function() {
        let f = |x: f64| C64::new((2.0 * x).sin(), (x * x).cos());
        let cheb = ChebFn::fit(f, -1.5, 2.5, 1e-13);
        for i in 0..50 {
            let x = -1.5 + 4.0 * i as f64 / 49.0;
            assert!((cheb.eval(x) - f(x)).norm() < 1e-11);
        }
    }
}
