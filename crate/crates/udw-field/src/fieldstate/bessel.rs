//! Bessel evaluations needed by the massive continuum two-point functions.
//!
//! `J0/Y0/J1/Y1` for real arguments use power series below x = 12 and the
//! standard asymptotic forms above; `K0/K1` for complex arguments in the
//! right half plane use the non-oscillatory integral representation
//! `K_ν(z) = ∫_0^∞ e^{−z cosh u} cosh(νu) du`.

use crate::quad::{self, QuadOpts};
use crate::C64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn harmonic(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

pub fn j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 14.0 {
        // Σ (-1)^k (x²/4)^k / (k!)²
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= -q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        let (p, q) = asymptotic_pq(ax, 0);
        let chi = ax - 0.25 * PI;
        (2.0 / (PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    }
}

pub fn y0(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 14.0 {
        let q = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= -q / ((k * k) as f64);
            let contrib = -term * harmonic(k);
            sum += contrib;
            if term.abs() * harmonic(k) < 1e-17 {
                break;
            }
        }
        (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0(x) + sum)
    } else {
        let (p, q) = asymptotic_pq(x, 0);
        let chi = x - 0.25 * PI;
        (2.0 / (PI * x)).sqrt() * (p * chi.sin() + q * chi.cos())
    }
}

pub fn j1(x: f64) -> f64 {
    let ax = x.abs();
    let val = if ax < 14.0 {
        let q = 0.25 * ax * ax;
        let mut term = 0.5 * ax;
        let mut sum = term;
        for k in 1..60 {
            term *= -q / ((k * (k + 1)) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1.0) {
                break;
            }
        }
        sum
    } else {
        let (p, q) = asymptotic_pq(ax, 1);
        let chi = ax - 0.75 * PI;
        (2.0 / (PI * ax)).sqrt() * (p * chi.cos() - q * chi.sin())
    };
    if x < 0.0 {
        -val
    } else {
        val
    }
}

pub fn y1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 14.0 {
        // Y1 = (2/π)[ln(x/2)+γ]J1 − (2/π)(1/x) − (1/π)Σ...
        let q = 0.25 * x * x;
        let term = 0.5 * x;
        let mut sum = term * (harmonic(1) + harmonic(0));
        let mut sign = -1.0;
        let mut pow = 0.5 * x;
        for k in 1..60 {
            pow *= q / ((k * (k + 1)) as f64);
            let contrib = sign * pow * (harmonic(k) + harmonic(k + 1));
            sum += contrib;
            sign = -sign;
            if pow.abs() * (harmonic(k) + harmonic(k + 1)) < 1e-17 {
                break;
            }
        }
        (2.0 / PI) * ((0.5 * x).ln() + EULER_GAMMA) * j1(x) - (2.0 / PI) / x - sum / PI
    } else {
        let (p, q) = asymptotic_pq(x, 1);
        let chi = x - 0.75 * PI;
        (2.0 / (PI * x)).sqrt() * (p * chi.sin() + q * chi.cos())
    }
}

/// Leading terms of the Hankel asymptotic expansion P_ν, Q_ν.
fn asymptotic_pq(x: f64, nu: usize) -> (f64, f64) {
    let mu = (4 * nu * nu) as f64;
    let ix = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = (mu - 1.0) * ix;
    // next corrections
    let f2 = (mu - 1.0) * (mu - 9.0) / 2.0;
    p -= f2 * ix * ix;
    let f3 = (mu - 1.0) * (mu - 9.0) * (mu - 25.0) / 6.0;
    q -= f3 * ix * ix * ix;
    let f4 = (mu - 1.0) * (mu - 9.0) * (mu - 25.0) * (mu - 49.0) / 24.0;
    p += f4 * ix * ix * ix * ix;
    (p, q)
}

/// `K_ν(z)` for complex `z` with `Re z > 0`, ν = 0 or 1, via the cosh
/// integral. Accuracy degrades as `arg z → ±π/2`; callers switch to the
/// Hankel continuation there.
pub fn k_complex(nu: usize, z: C64) -> C64 {
    assert!(z.re > 0.0, "k_complex requires Re z > 0");
    if z.re > 700.0 {
        return C64::new(0.0, 0.0);
    }
    // e^{-Re z cosh u} < 1e-320 beyond this
    let u_max = (750.0 / z.re + 2.0).ln() + 2.0;
    let opts = QuadOpts { rel_tol: 1e-13, abs_tol: 1e-300, max_panels: 20000 };
    quad::integrate(
        |u| {
            let c = u.cosh();
            let w = (-z * c).exp();
            if nu == 0 {
                w
            } else {
                w * c
            }
        },
        0.0,
        u_max,
        &opts,
    )
    .value
}
