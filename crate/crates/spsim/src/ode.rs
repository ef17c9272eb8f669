//! Adaptive Dormand–Prince 5(4) integrator for small complex-matrix ODEs.
//!
//! Steps are clamped so that every requested output time and every drive
//! breakpoint is hit exactly; discontinuities in piecewise-constant drives
//! are therefore never stepped across.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Counters reported with every solve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverDiagnostics {
    /// Accepted steps.
    pub steps: u64,
    /// Rejected (retried) steps.
    pub rejected: u64,
    /// Right-hand-side evaluations.
    pub rhs_evals: u64,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

/// 5th-order weights (identical to the last A row; first-same-as-last pair).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// Embedded 4th-order weights for the error estimate.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = rhs(t, y)` from `output_times[0]` to the last output
/// time, invoking `on_output(index, t, y)` at every output time (including
/// the first). `breakpoints` are additional times the stepper must land on.
pub fn integrate_adaptive<F, G>(
    rhs: F,
    y0: &Array2<C64>,
    output_times: &[f64],
    breakpoints: &[f64],
    abs_tol: f64,
    mut on_output: G,
) -> Result<SolverDiagnostics>
where
    F: Fn(f64, &Array2<C64>) -> Array2<C64>,
    G: FnMut(usize, f64, &Array2<C64>),
{
    if output_times.len() < 2 {
        return Err(Error::Integration("need at least two output times".into()));
    }
    if output_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Integration("output times must be increasing".into()));
    }
    let t0 = output_times[0];
    let t_end = *output_times.last().unwrap();
    let span = t_end - t0;

    // merge output times and interior breakpoints into one stop list,
    // remembering which stops need an output callback
    let mut stops: Vec<(f64, Option<usize>)> =
        output_times.iter().enumerate().map(|(i, &t)| (t, Some(i))).collect();
    for &b in breakpoints {
        if b > t0 && b < t_end && !output_times.iter().any(|&t| (t - b).abs() < 1e-12) {
            stops.push((b, None));
        }
    }
    stops.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut diag = SolverDiagnostics::default();
    let mut y = y0.clone();
    let mut t = t0;
    let mut h = (span / 100.0).min(stops[1].0 - t0).max(1e-9);
    on_output(0, t0, &y);

    let mut k: Vec<Array2<C64>> = Vec::with_capacity(7);
    for (stop_t, out_idx) in stops.into_iter().skip(1) {
        while t < stop_t - 1e-12 * span.max(1.0) {
            let h_try = h.min(stop_t - t);
            // stages
            k.clear();
            k.push(rhs(t, &y));
            diag.rhs_evals += 1;
            for s in 1..7 {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate() {
                    let a = A[s][j];
                    if a != 0.0 {
                        ys.zip_mut_with(kj, |yv, kv| *yv += kv * C64::new(a * h_try, 0.0));
                    }
                }
                k.push(rhs(t + C[s] * h_try, &ys));
                diag.rhs_evals += 1;
            }
            // 5th-order solution and embedded error
            let mut y5 = y.clone();
            let mut err = 0.0f64;
            {
                let mut e = Array2::<C64>::zeros(y.raw_dim());
                for (j, kj) in k.iter().enumerate() {
                    if B5[j] != 0.0 {
                        y5.zip_mut_with(kj, |yv, kv| *yv += kv * C64::new(B5[j] * h_try, 0.0));
                    }
                    let d = B5[j] - B4[j];
                    if d != 0.0 {
                        e.zip_mut_with(kj, |ev, kv| *ev += kv * C64::new(d * h_try, 0.0));
                    }
                }
                for v in e.iter() {
                    err = err.max(v.re.abs()).max(v.im.abs());
                }
            }
            if err <= abs_tol {
                t += h_try;
                y = y5;
                diag.steps += 1;
                let factor = if err < 1e-30 {
                    5.0
                } else {
                    (0.9 * (abs_tol / err).powf(0.2)).clamp(0.2, 5.0)
                };
                h = (h_try * factor).min(span);
            } else {
                diag.rejected += 1;
                let factor = (0.9 * (abs_tol / err).powf(0.2)).clamp(0.2, 0.9);
                h = h_try * factor;
                if h < 1e-12 * span.max(1.0) {
                    return Err(Error::Integration(format!(
                        "step size underflow at t = {t:.6} ps (err = {err:.3e}, \
                         {} steps, {} rejected)",
                        diag.steps, diag.rejected
                    )));
                }
            }
        }
        t = stop_t;
        if let Some(idx) = out_idx {
            on_output(idx, t, &y);
        }
    }
    Ok(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn exponential_decay_to_tolerance() {
        let lam = -0.35;
        let y0 = array![[C64::new(1.0, 0.0)]];
        let times: Vec<f64> = (0..=50).map(|i| i as f64 * 0.8).collect();
        let mut max_err = 0.0f64;
        integrate_adaptive(
            |_, y| y * C64::new(lam, 0.0),
            &y0,
            &times,
            &[],
            1e-11,
            |_, t, y| {
                let exact = (lam * t).exp();
                max_err = max_err.max((y[(0, 0)].re - exact).abs());
            },
        )
        .unwrap();
        assert!(max_err < 1e-8, "max_err = {max_err}");
    }

    #[test]
    fn oscillator_phase_accuracy() {
        // y'' = -w^2 y as a 2x1 complex system packed in a 2x2 corner
        let w = 2.3;
        let y0 = array![
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(0.0, 0.0)]
        ];
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let mut max_err = 0.0f64;
        integrate_adaptive(
            |_, y| {
                let mut d = Array2::zeros((2, 2));
                d[(0, 0)] = y[(1, 0)];
                d[(1, 0)] = y[(0, 0)] * C64::new(-w * w, 0.0);
                d
            },
            &y0,
            &times,
            &[],
            1e-11,
            |_, t, y| {
                max_err = max_err.max((y[(0, 0)].re - (w * t).cos()).abs());
            },
        )
        .unwrap();
        assert!(max_err < 1e-8, "max_err = {max_err}");
    }

    #[test]
    fn breakpoints_are_hit_exactly() {
        // piecewise rate: lands exactly on the discontinuity
        let times = vec![0.0, 1.0, 2.0];
        let brk = vec![0.7];
        let y0 = array![[C64::new(1.0, 0.0)]];
        let mut vals = Vec::new();
        integrate_adaptive(
            |t, y| {
                let r = if t < 0.7 { -1.0 } else { -3.0 };
                y * C64::new(r, 0.0)
            },
            &y0,
            &times,
            &brk,
            1e-12,
            |_, _, y| vals.push(y[(0, 0)].re),
        )
        .unwrap();
        let exact1 = (-0.7f64).exp() * (-3.0f64 * 0.3).exp();
        assert!((vals[1] - exact1).abs() < 1e-9, "got {} want {}", vals[1], exact1);
    }

    #[test]
    fn rejects_bad_grids() {
        let y0 = array![[C64::new(1.0, 0.0)]];
        assert!(integrate_adaptive(|_, y| y.clone(), &y0, &[0.0], &[], 1e-9, |_, _, _| {}).is_err());
        assert!(
            integrate_adaptive(|_, y| y.clone(), &y0, &[0.0, 0.0], &[], 1e-9, |_, _, _| {})
                .is_err()
        );
    }
}
