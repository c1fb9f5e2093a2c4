//! Golden-section search for maxima of concave functions on an interval.

use crate::scalar::Real;

/// Maximizer and maximum of a concave `f` on `[lo, hi]`, to `tol` in the
/// argument. Endpoints are evaluated explicitly so boundary maxima are exact.
pub(crate) fn golden_max<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, tol: T) -> (T, T) {
    let ratio = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let mid = (a + b) / T::lit(2.0);
    [(lo, f(lo)), (hi, f(hi)), (mid, f(mid))]
        .into_iter()
        .fold((mid, T::neg_infinity()), |best, cand| if cand.1 > best.1 { cand } else { best })
}
