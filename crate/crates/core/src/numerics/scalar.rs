use crate::error::{Error, Result};

pub const DEFAULT_SCALAR_TOL: f64 = 1e-10;

/// Bracket expansion stops once the right end passes this bound.
const EXPANSION_CAP: f64 = (1u64 << 60) as f64;

const GOLDEN: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptResult {
    pub argopt: f64,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Maximizes a unimodal `f` on `[lo, ∞)`.
///
/// The right end starts at `hi_init` and doubles (measured from `lo`) until
/// `f` stops increasing; the resulting bracket is refined with Brent's
/// method (golden section with parabolic steps). Fails with
/// [`Error::UnboundedMaximum`] if `f` is still increasing past 2⁶⁰.
pub fn maximize_scalar<F>(mut f: F, lo: f64, hi_init: f64, tol: f64) -> Result<ScalarOptResult>
where
    F: FnMut(f64) -> f64,
{
    if !(tol > 0.0) || !(hi_init > lo) || !lo.is_finite() {
        return Err(Error::config(format!(
            "maximize_scalar needs tol > 0 and hi_init > lo (got lo={lo}, hi_init={hi_init}, tol={tol})"
        )));
    }
    let mut evals = 0usize;
    let mut eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };

    let f_lo = eval(lo, &mut evals);
    let mut left = lo;
    let mut mid = hi_init;
    let mut f_mid = eval(mid, &mut evals);
    let right;
    if f_mid <= f_lo {
        right = mid;
    } else {
        loop {
            let next = lo + 2.0 * (mid - lo);
            if next > EXPANSION_CAP {
                return Err(Error::UnboundedMaximum { last_arg: mid });
            }
            let f_next = eval(next, &mut evals);
            if f_next <= f_mid {
                right = next;
                break;
            }
            left = mid;
            mid = next;
            f_mid = f_next;
        }
    }

    let (x, fx, converged) = brent_max(|t| eval(t, &mut evals), left, right, tol);
    let (argopt, value) = if f_lo >= fx { (lo, f_lo) } else { (x, fx) };
    Ok(ScalarOptResult {
        argopt,
        value,
        evaluations: evals,
        converged,
    })
}

/// Brent's method on [a, b], maximizing. Returns (x, f(x), converged).
pub(crate) fn brent_max<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64, bool) {
    const MAX_ITER: usize = 500;
    // Work with g = -f so the textbook minimization form applies.
    let mut x = a + GOLDEN * (b - a);
    let mut w = x;
    let mut v = x;
    let mut gx = -f(x);
    let mut gw = gx;
    let mut gv = gx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;

    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        let tol1 = tol + 4.0 * f64::EPSILON * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            return (x, -gx, true);
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (gx - gv);
            let mut q = (x - v) * (gx - gw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let gu = -f(u);
        if gu <= gx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            gv = gw;
            w = x;
            gw = gx;
            x = u;
            gx = gu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if gu <= gw || w == x {
                v = w;
                gv = gw;
                w = u;
                gw = gu;
            } else if gu <= gv || v == x || v == w {
                v = u;
                gv = gu;
            }
        }
    }
    (x, -gx, false)
}
