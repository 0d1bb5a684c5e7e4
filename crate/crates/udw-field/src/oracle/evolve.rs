//! Adaptive Dormand–Prince 5(4) integration of `dY/dt = −i H(t) Y` for dense
//! complex column blocks.

use crate::{C64, Error, Result};
use nalgebra::DMatrix;

#[inline]
fn maxpy(y: &mut DMatrix<C64>, a: C64, x: &DMatrix<C64>) {
    y.zip_apply(x, |yi, xi| *yi += a * xi);
}

/// Right-hand-side provider: writes `−i H(t)·y` into `out`.
pub trait Rhs {
    fn apply(&self, t: f64, y: &DMatrix<C64>, out: &mut DMatrix<C64>);
}

impl<F: Fn(f64, &DMatrix<C64>, &mut DMatrix<C64>)> Rhs for F {
    fn apply(&self, t: f64, y: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        self(t, y, out)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepReport {
    pub steps: usize,
    pub rejected: usize,
    pub max_local_err: f64,
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate from `t0` to `t1` (either direction) with local tolerance `tol`.
pub fn propagate<R: Rhs>(
    rhs: &R,
    y0: DMatrix<C64>,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<(DMatrix<C64>, StepReport)> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok((y0, StepReport { steps: 0, rejected: 0, max_local_err: 0.0 }));
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h: f64 = dir * (span.abs() / 50.0).min(0.1);
    let mut k: Vec<DMatrix<C64>> = (0..7).map(|_| DMatrix::zeros(y.nrows(), y.ncols())).collect();
    let mut report = StepReport { steps: 0, rejected: 0, max_local_err: 0.0 };
    let scale = |y: &DMatrix<C64>| -> f64 { y.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0) };
    rhs.apply(t, &y, &mut k[0]);
    loop {
        if (t1 - t) * dir <= 0.0 {
            break;
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::Stiffness(format!(
                "step size underflow at t = {t} (h = {h:.3e}, {} steps, {} rejected)",
                report.steps, report.rejected
            )));
        }
        // stages
        let mut stage = y.clone();
        for s in 0..6 {
            stage.copy_from(&y);
            for (j, kj) in k.iter().take(s + 1).enumerate() {
                if A[s][j] != 0.0 {
                    maxpy(&mut stage, crate::cr(h * A[s][j]), kj);
                }
            }
            let ts = t + C[s] * h;
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            rhs.apply(ts, &stage, &mut tail[0]);
        }
        // 5th-order solution and embedded error
        let mut y5 = y.clone();
        let mut err = DMatrix::zeros(y.nrows(), y.ncols());
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                maxpy(&mut y5, crate::cr(h * B5[j]), kj);
            }
            let diff = B5[j] - B4[j];
            if diff != 0.0 {
                maxpy(&mut err, crate::cr(h * diff), kj);
            }
        }
        let err_norm = err.iter().map(|c| c.norm()).fold(0.0, f64::max) / (tol * scale(&y5));
        if err_norm <= 1.0 {
            t += h;
            y = y5;
            report.steps += 1;
            report.max_local_err = report.max_local_err.max(err_norm * tol);
            // FSAL: the last stage derivative is f at the accepted point
            let (head, tail) = k.split_at_mut(1);
            head[0].copy_from(&tail[5]);
        } else {
            report.rejected += 1;
        }
        let factor: f64 = if err_norm > 0.0 { 0.9 * err_norm.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok((y, report))
}
