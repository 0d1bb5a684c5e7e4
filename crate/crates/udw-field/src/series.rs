//! Truncated power series in the coupling strength.
//!
//! Perturbative quantities are computed as coefficient triples
//! `c0 + c1·λ + c2·λ²`. Selective updates divide two such series; the
//! `shift` field tracks an overall factor λ^shift so that ratios whose
//! numerator and denominator both start at order λ² (the orthogonal-outcome
//! branch) reduce to an ordinary series.

use crate::{cr, C64, Error, Result};

pub const MAX_ORDER: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PertSeries {
    /// Coefficients of λ^(shift), λ^(shift+1), λ^(shift+2).
    pub c: [C64; 3],
    /// Common power of λ factored out of all coefficients.
    pub shift: i32,
    /// Orders above `known` (relative to `shift`) are not determined.
    pub known: usize,
}

impl PertSeries {
    pub fn zero() -> Self {
        PertSeries { c: [C64::new(0.0, 0.0); 3], shift: 0, known: MAX_ORDER }
    }

    pub fn constant(v: C64) -> Self {
        let mut s = Self::zero();
        s.c[0] = v;
        s
    }

    pub fn from_coeffs(c0: C64, c1: C64, c2: C64) -> Self {
        PertSeries { c: [c0, c1, c2], shift: 0, known: MAX_ORDER }
    }

    /// Evaluate keeping terms through absolute order `order` in λ.
    pub fn eval(&self, lambda: f64, order: usize) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &cj) in self.c.iter().enumerate().take(self.known + 1) {
            let abs_order = self.shift + j as i32;
            if abs_order < 0 {
                continue;
            }
            if abs_order as usize <= order {
                acc += cj * lambda.powi(abs_order);
            }
        }
        acc
    }

    /// Evaluate all known terms.
    pub fn eval_full(&self, lambda: f64) -> C64 {
        let top = self.shift + self.known as i32;
        self.eval(lambda, top.max(0) as usize)
    }

    pub fn add(&self, other: &PertSeries) -> PertSeries {
        assert_eq!(self.shift, other.shift, "series shift mismatch in add");
        let mut out = *self;
        for j in 0..3 {
            out.c[j] += other.c[j];
        }
        out.known = self.known.min(other.known);
        out
    }

    pub fn scale(&self, f: C64) -> PertSeries {
        let mut out = *self;
        for c in out.c.iter_mut() {
            *c *= f;
        }
        out
    }

    /// Cauchy product, truncated at relative order 2.
    pub fn mul(&self, other: &PertSeries) -> PertSeries {
        let mut c = [C64::new(0.0, 0.0); 3];
        for i in 0..3 {
            for j in 0..3 - i {
                c[i + j] += self.c[i] * other.c[j];
            }
        }
        PertSeries {
            c,
            shift: self.shift + other.shift,
            known: self.known.min(other.known),
        }
    }

    /// Series ratio `self / den`.
    ///
    /// Leading zero coefficients of the denominator are stripped (matching
    /// zeros are required of the numerator by the caller's algebra; the
    /// orthogonal-outcome branch strips λ² from both). Relative orders beyond
    /// what the kernel data determines are marked unknown rather than
    /// extrapolated.
    pub fn div(&self, den: &PertSeries, zero_tol: f64) -> Result<PertSeries> {
        let mut num = *self;
        let mut den = *den;
        // strip common leading zeros of the denominator
        let mut stripped = 0usize;
        while den.c[0].norm() <= zero_tol && stripped < 2 {
            den.c.rotate_left(1);
            den.c[2] = C64::new(0.0, 0.0);
            den.shift += 1;
            den.known = den.known.saturating_sub(1);
            num.c.rotate_left(1);
            num.c[2] = C64::new(0.0, 0.0);
            num.shift += 1;
            num.known = num.known.saturating_sub(1);
            stripped += 1;
        }
        if den.c[0].norm() <= zero_tol {
            return Err(Error::ZeroProbabilityOutcome(format!(
                "leading POVM coefficient {:.3e} below tolerance",
                den.c[0].norm()
            )));
        }
        let d0 = den.c[0];
        let r1 = den.c[1] / d0;
        let r2 = den.c[2] / d0;
        // 1/(1 + r1 λ + r2 λ²) = 1 - r1 λ + (r1² - r2) λ² + ...
        let inv = PertSeries {
            c: [cr(1.0) / d0, -r1 / d0, (r1 * r1 - r2) / d0],
            shift: -den.shift,
            known: den.known,
        };
        Ok(num.mul(&inv))
    }

    /// Largest coefficient magnitude (used by validity guards).
    pub fn max_coeff(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Complex conjugate of every coefficient.
    pub fn conj(&self) -> PertSeries {
        let mut out = *self;
        for c in out.c.iter_mut() {
            *c = c.conj();
        }
        out
    }
}
