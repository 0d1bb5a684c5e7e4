//! Vacuum two-point functions on the continuum backend.
//!
//! The massless 3+1 form is the familiar `1/(4π²) · 1/(r² − (Δt − iε)²)`.
//! Massive forms are expressed through `s = √(r² − (Δt − iε)²)`:
//! `K₀(ms)/2π` in 1+1, `e^{−ms}/(4πs)` in 2+1 and `m K₁(ms)/(4π² s)` in 3+1,
//! evaluated via the non-oscillatory K integrals on the spacelike side and
//! the Hankel continuation (real Bessel J/Y) on the timelike side.

use super::bessel;
use crate::spacetime::Event;
use crate::{cr, C64, IM};
use std::f64::consts::PI;

/// iε prescription controlling the distributional boundary values.
#[derive(Clone, Copy, Debug)]
pub struct Regulator {
    /// Relative scale of ε; the absolute ε used for a query is
    /// `eps_rel · max(separation scale, floor)`.
    pub eps_rel: f64,
    /// Richardson-extrapolate ε, ε/2 toward ε → 0⁺.
    pub richardson: bool,
}

impl Default for Regulator {
    fn default() -> Self {
        Regulator { eps_rel: 1e-3, richardson: true }
    }
}

impl Regulator {
    pub fn absolute(&self, scale: f64) -> f64 {
        self.eps_rel * scale.max(1e-6)
    }

    /// Evaluate `f(ε)` in the ε → 0⁺ limit per the configured prescription.
    pub fn limit<F: FnMut(f64) -> C64>(&self, scale: f64, mut f: F) -> C64 {
        let eps = self.absolute(scale);
        if self.richardson {
            let a = f(eps);
            let b = f(0.5 * eps);
            b * 2.0 - a
        } else {
            f(eps)
        }
    }
}

/// Massless 3+1 vacuum two-point function at explicit ε.
pub fn w2_massless_3d(dt: f64, r: f64, eps: f64) -> C64 {
    let dt_c = C64::new(dt, -eps);
    cr(1.0 / (4.0 * PI * PI)) / (cr(r * r) - dt_c * dt_c)
}

/// Massless 2+1 vacuum two-point function.
pub fn w2_massless_2d(dt: f64, r: f64, eps: f64) -> C64 {
    let s = sigma_root(dt, r, eps);
    cr(1.0 / (4.0 * PI)) / s
}

/// Massive vacuum two-point function in d spatial dimensions.
pub fn w2_massive(d: usize, mass: f64, dt: f64, r: f64, eps: f64) -> C64 {
    debug_assert!(mass > 0.0);
    let s = sigma_root(dt, r, eps);
    match d {
        2 => (-mass * s).exp() / (s * 4.0 * PI),
        1 | 3 => {
            let z = s * mass;
            // use the K integral while the argument stays safely off the
            // imaginary axis, otherwise the Hankel continuation
            let use_k = z.re > 0.2 * z.norm() + 1e-12;
            if d == 1 {
                if use_k {
                    bessel::k_complex(0, z) / (2.0 * PI)
                } else {
                    let tau = (dt * dt - r * r).max(0.0).sqrt();
                    let y = mass * tau;
                    // W = -(i/4) H0^{(2)}(mτ) for Δt > 0, conjugate for Δt < 0
                    let h2 = C64::new(bessel::j0(y), -bessel::y0(y));
                    let w = h2 * C64::new(0.0, -0.25);
                    if dt >= 0.0 {
                        w
                    } else {
                        w.conj()
                    }
                }
            } else if use_k {
                bessel::k_complex(1, z) * mass / (s * 4.0 * PI * PI)
            } else {
                let tau = (dt * dt - r * r).max(0.0).sqrt();
                let y = mass * tau;
                // s → +iτ for Δt > 0 and K1(iy) = -(π/2) H1^{(2)}(y), so
                // m K1(ms)/(4π²s) → (m/(8πτ)) (Y1(y) + i J1(y))
                let w = C64::new(bessel::y1(y), bessel::j1(y)) * (mass / (8.0 * PI * tau));
                if dt >= 0.0 {
                    w
                } else {
                    w.conj()
                }
            }
        }
        _ => unreachable!("spatial dimension must be 1..=3"),
    }
}

/// Principal root of `r² − (Δt − iε)²`; real part positive for ε > 0.
fn sigma_root(dt: f64, r: f64, eps: f64) -> C64 {
    let dt_c = C64::new(dt, -eps);
    (cr(r * r) - dt_c * dt_c).sqrt()
}

/// Damped radial k-integral for the massive vacuum two-point function; slow
/// reference path used in tests and as the fallback deep in the timelike
/// region where neither closed form applies cleanly.
pub fn w2_massive_quadrature(d: usize, mass: f64, dt: f64, r: f64, eps: f64) -> C64 {
    use crate::quad::{integrate, QuadOpts};
    let opts = QuadOpts { rel_tol: 1e-10, abs_tol: 1e-14, max_panels: 200_000 };
    let k_max = {
        // damping e^{-εω} worth ~ e^{-45}
        45.0 / eps
    };
    let phase = |omega: f64| (-IM * C64::new(dt, -eps) * omega).exp();
    match d {
        1 => {
            integrate(
                |k| {
                    let omega = (k * k + mass * mass).sqrt();
                    cr((k * r).cos() / omega) * phase(omega)
                },
                0.0,
                k_max,
                &opts,
            )
            .value
                / (2.0 * PI)
        }
        3 => {
            let rr = r.max(1e-12);
            integrate(
                |k| {
                    let omega = (k * k + mass * mass).sqrt();
                    cr(k * (k * rr).sin() / omega) * phase(omega)
                },
                0.0,
                k_max,
                &opts,
            )
            .value
                / (4.0 * PI * PI * rr)
        }
        _ => unimplemented!("quadrature fallback implemented for d = 1 and 3"),
    }
}

/// Mean field of an isotropic Gaussian coherent packet
/// `α(k) = amplitude · e^{−k²width²/2}` (real), in d spatial dimensions.
pub fn packet_mean(d: usize, mass: f64, amplitude: f64, width: f64, ev: &Event) -> f64 {
    use crate::quad::{integrate, QuadOpts};
    let opts = QuadOpts::with_rel_tol(1e-11);
    let t = ev.t;
    let r: f64 = ev.x().iter().map(|c| c * c).sum::<f64>().sqrt();
    let k_max = 12.0 / width;
    let alpha = |k: f64| amplitude * (-0.5 * k * k * width * width).exp();
    let val = match d {
        1 => {
            // 2 Re ∫ dk/√(2π·2ω) α(k) e^{-i(ωt - kx)}; α even ⇒ cos(kx)
            integrate(
                |k| {
                    let omega = (k * k + mass * mass).sqrt();
                    cr(alpha(k) / (2.0 * PI * 2.0 * omega).sqrt() * (k * r).cos())
                        * (-IM * omega * t).exp()
                },
                -k_max,
                k_max,
                &opts,
            )
            .value
        }
        3 => {
            let rr = r.max(1e-12);
            integrate(
                |k| {
                    let omega = (k * k + mass * mass).sqrt();
                    let sinc = if k * rr < 1e-8 { 1.0 - (k * rr).powi(2) / 6.0 } else { (k * rr).sin() / (k * rr) };
                    cr(4.0 * PI * k * k * alpha(k) / ((2.0 * PI).powi(3) * 2.0 * omega).sqrt() * sinc)
                        * (-IM * omega * t).exp()
                },
                0.0,
                k_max,
                &opts,
            )
            .value
        }
        _ => unimplemented!("packet mean implemented for d = 1 and 3"),
    };
    2.0 * val.re
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn massless_3d_equal_time() {
        let w = w2_massless_3d(0.0, 2.0, 1e-8);
        assert_abs_diff_eq!(w.re, 1.0 / (4.0 * PI * PI * 4.0), epsilon = 1e-12);
        assert!(w.im.abs() < 1e-9);
    }

    #[test]
    fn massless_3d_commutator_vanishes_spacelike() {
        // Im w2 → 0 in the symmetric δx → 0 limit at spacelike separation
        let reg = Regulator::default();
        for dx in [1.0, 0.5, 0.25] {
            let w = reg.limit(dx, |e| w2_massless_3d(0.3, 1.0 + dx, e));
            assert!(w.im.abs() < 1e-10, "im = {}", w.im);
        }
    }

    #[test]
    fn massive_1d_spacelike_matches_series_k0() {
        // independent oracle: K0 power series
        let k0_series = |x: f64| {
            let hsum = |k: usize| (1..=k).map(|j| 1.0 / j as f64).sum::<f64>();
            let q = 0.25 * x * x;
            let mut i0 = 1.0;
            let mut term = 1.0;
            let mut sum = 0.0;
            for k in 1..80 {
                term *= q / ((k * k) as f64);
                i0 += term;
                sum += term * hsum(k);
            }
            -((0.5 * x).ln() + 0.577_215_664_901_532_9) * i0 + sum
        };
        let m = 0.7;
        for (dt, r) in [(0.0, 1.0), (0.5, 2.0), (-1.0, 2.5)] {
            let w = w2_massive(1, m, dt, r, 1e-9);
            let s = (r * r - dt * dt).sqrt();
            assert_abs_diff_eq!(w.re, k0_series(m * s) / (2.0 * PI), epsilon = 1e-8);
            assert!(w.im.abs() < 1e-6);
        }
    }

    #[test]
    fn massive_timelike_matches_damped_integral() {
        let m = 1.1;
        for d in [1usize, 3] {
            let (dt, r) = (2.0, 0.5);
            let via_quad = {
                let a = w2_massive_quadrature(d, m, dt, r, 8e-3);
                let b = w2_massive_quadrature(d, m, dt, r, 4e-3);
                b * 2.0 - a
            };
            let closed = w2_massive(d, m, dt, r, 1e-9);
            assert!(
                (closed - via_quad).norm() < 1e-2 * via_quad.norm().max(0.05),
                "d={d}: closed {closed:?} vs quad {via_quad:?}"
            );
            // negative Δt is the conjugate
            let neg = w2_massive(d, m, -dt, r, 1e-9);
            assert!((neg - closed.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn massive_3d_massless_limit() {
        // m K1(ms)/(4π²s) → 1/(4π²s²) as m → 0
        let w_small = w2_massive(3, 1e-4, 0.2, 1.5, 1e-9);
        let w_zero = w2_massless_3d(0.2, 1.5, 1e-9);
        assert!((w_small - w_zero).norm() < 1e-6 * w_zero.norm());
    }

    #[test]
    fn massive_2d_spacelike_positive() {
        let w = w2_massive(2, 0.5, 0.1, 2.0, 1e-9);
        assert!(w.re > 0.0 && w.im.abs() < 1e-8);
    }

    #[test]
    fn packet_mean_solves_wave_like_dispersion() {
        // single sanity: amplitude decays in time, symmetric in r, real
        let ev0 = Event::d3(0.0, 0.0, 0.0, 0.0);
        let v0 = packet_mean(3, 0.0, 1.0, 1.0, &ev0);
        assert!(v0.abs() > 1e-3);
        let late = Event::d3(30.0, 0.0, 0.0, 0.0);
        assert!(packet_mean(3, 0.0, 1.0, 1.0, &late).abs() < v0.abs());
    }
}
