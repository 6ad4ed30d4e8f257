//! Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) over generic
//! dense states, with exact landing on requested output times.

use crate::{IonError, Result};

/// State vector abstraction for the integrator.
pub(crate) trait OdeState: Clone {
    /// self + sum_i (c_i * k_i)
    fn lin_comb(&self, terms: &[(f64, &Self)]) -> Self;
    /// max_j |err_j| / (atol + rtol * max(|y0_j|, |y1_j|))
    fn weighted_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;
}

impl OdeState for nalgebra::DVector<f64> {
    fn lin_comb(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = self.clone();
        for (c, k) in terms {
            out.axpy(*c, k, 1.0);
        }
        out
    }

    fn weighted_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..err.len() {
            let scale = atol + rtol * y0[j].abs().max(y1[j].abs());
            worst = worst.max(err[j].abs() / scale);
        }
        worst
    }
}

impl OdeState for crate::CMatrix {
    fn lin_comb(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = self.clone();
        for (c, k) in terms {
            out.zip_apply(k, |o, kv| *o += kv * crate::C64::new(*c, 0.0));
        }
        out
    }

    fn weighted_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let mut worst = 0.0f64;
        let (e, a, b) = (err.as_slice(), y0.as_slice(), y1.as_slice());
        for j in 0..e.len() {
            let scale = atol + rtol * a[j].norm().max(b[j].norm());
            worst = worst.max(e[j].norm() / scale);
        }
        worst
    }
}

// Dormand-Prince 5(4) coefficients.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

const E1: f64 = B1 - 5179.0 / 57600.0;
const E3: f64 = B3 - 7571.0 / 16695.0;
const E4: f64 = B4 - 393.0 / 640.0;
const E5: f64 = B5 + 92097.0 / 339200.0;
const E6: f64 = B6 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub dt_max: f64,
}

/// Integrate dy/dt = rhs(t, y) from `t0`, calling `on_output(k, t_k, y)`
/// at every requested output time (assumed sorted ascending, first >= t0).
/// `post_accept` runs after every accepted step (e.g. Hermitian
/// symmetrisation of a density matrix).
pub(crate) fn integrate<S: OdeState>(
    rhs: &mut dyn FnMut(f64, &S) -> S,
    t0: f64,
    y0: S,
    outputs: &[f64],
    opts: &OdeOptions,
    post_accept: &mut dyn FnMut(&mut S) -> Result<()>,
    on_output: &mut dyn FnMut(usize, f64, &S) -> Result<()>,
) -> Result<S> {
    let mut t = t0;
    let mut y = y0;
    let mut out_idx = 0;

    // initial output(s) coinciding with t0
    while out_idx < outputs.len() && outputs[out_idx] <= t0 {
        on_output(out_idx, t0, &y)?;
        out_idx += 1;
    }
    if out_idx >= outputs.len() {
        return Ok(y);
    }

    let t_end = *outputs.last().unwrap();
    let span = (t_end - t0).abs().max(f64::MIN_POSITIVE);
    let mut h = opts.dt_max.min(span / 100.0).max(span * 1e-12);
    let mut k1 = rhs(t, &y);

    while out_idx < outputs.len() {
        if h < span * 1e-14 {
            return Err(IonError::Numerical(format!(
                "step size underflow at t = {t} (h = {h})"
            )));
        }
        let h_free = h.min(opts.dt_max);
        let mut h_step = h_free;
        let mut landing = false;
        if t + h_step >= outputs[out_idx] {
            h_step = outputs[out_idx] - t;
            landing = true;
        }

        let hs = h_step;
        let y2 = y.lin_comb(&[(hs * A21, &k1)]);
        let k2 = rhs(t + C2 * hs, &y2);
        let y3 = y.lin_comb(&[(hs * A31, &k1), (hs * A32, &k2)]);
        let k3 = rhs(t + C3 * hs, &y3);
        let y4 = y.lin_comb(&[(hs * A41, &k1), (hs * A42, &k2), (hs * A43, &k3)]);
        let k4 = rhs(t + C4 * hs, &y4);
        let y5 = y.lin_comb(&[
            (hs * A51, &k1),
            (hs * A52, &k2),
            (hs * A53, &k3),
            (hs * A54, &k4),
        ]);
        let k5 = rhs(t + C5 * hs, &y5);
        let y6 = y.lin_comb(&[
            (hs * A61, &k1),
            (hs * A62, &k2),
            (hs * A63, &k3),
            (hs * A64, &k4),
            (hs * A65, &k5),
        ]);
        let k6 = rhs(t + hs, &y6);
        let mut y_next = y.lin_comb(&[
            (hs * B1, &k1),
            (hs * B3, &k3),
            (hs * B4, &k4),
            (hs * B5, &k5),
            (hs * B6, &k6),
        ]);
        let k7 = rhs(t + hs, &y_next);
        let err = y.lin_comb(&[
            (hs * E1, &k1),
            (hs * E3, &k3),
            (hs * E4, &k4),
            (hs * E5, &k5),
            (hs * E6, &k6),
            (hs * E7, &k7),
        ]);
        let err = err.lin_comb(&[(-1.0, &y)]); // err = sum of E-terms only
        let ratio = S::weighted_error(&err, &y, &y_next, opts.atol, opts.rtol);

        if ratio <= 1.0 {
            t += hs;
            post_accept(&mut y_next)?;
            y = y_next;
            // FSAL: k7 was evaluated at (t, y) before symmetrisation; the
            // perturbation is below the error tolerance, reuse it.
            k1 = k7;
            while out_idx < outputs.len() && outputs[out_idx] <= t + span * 1e-14 {
                on_output(out_idx, outputs[out_idx], &y)?;
                out_idx += 1;
            }
            let grow = if ratio > 0.0 { 0.9 * ratio.powf(-0.2) } else { 5.0 };
            h = (hs * grow.clamp(0.2, 5.0)).min(opts.dt_max);
            if landing {
                // a step truncated to land on an output must not shrink
                // the free step estimate
                h = h.max(h_free);
            }
        } else {
            let shrink = 0.9 * ratio.powf(-0.2);
            h = hs * shrink.clamp(0.1, 0.9);
        }
    }
    Ok(y)
}
