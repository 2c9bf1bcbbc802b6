use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex;

use super::NumericsError;
use crate::Real;

/// Tolerances for the adaptive quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
    /// Frequency above which `e^{-i w t}` integrands are integrated per half period.
    pub oscillation_split: T,
}

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::of(1e-13),
            rel_tol: T::of(1e-12),
            max_subdivisions: 4000,
            oscillation_split: T::of(20.0),
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > T::zero()) || !(self.rel_tol > T::zero()) {
            return Err(NumericsError::InvalidInput(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.max_subdivisions < 1 {
            return Err(NumericsError::InvalidInput(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        if !(self.oscillation_split >= T::zero()) {
            return Err(NumericsError::InvalidInput(
                "oscillation_split must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn target(&self, value: Complex<T>) -> T {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

/// Result of a quadrature: the value and its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: Complex<T>,
    pub abs_error: T,
    pub intervals: usize,
}

// 21-point Kronrod abscissae and weights with the embedded 10-point Gauss rule.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// How a segment's parameter maps onto the integration variable.
#[derive(Debug, Clone, Copy)]
enum Map<T> {
    Identity,
    /// `x = origin + u / (1 - u)` for `u` in `[0, 1)`.
    SemiInfinite { origin: T },
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    lo: T,
    hi: T,
    map: Map<T>,
    value: Complex<T>,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn eval<T: Real, F>(f: &mut F, map: Map<T>, u: T) -> Result<Complex<T>, NumericsError>
where
    F: FnMut(T) -> Complex<T>,
{
    let (x, jac) = match map {
        Map::Identity => (u, T::one()),
        Map::SemiInfinite { origin } => {
            let w = T::one() - u;
            (origin + u / w, T::one() / (w * w))
        }
    };
    let y = f(x) * jac;
    if !(y.re.is_finite() && y.im.is_finite()) {
        return Err(NumericsError::NonFinite { at: x.as_f64() });
    }
    Ok(y)
}

fn gauss_kronrod<T: Real, F>(
    f: &mut F,
    lo: T,
    hi: T,
    map: Map<T>,
) -> Result<Segment<T>, NumericsError>
where
    F: FnMut(T) -> Complex<T>,
{
    let half = T::of(0.5);
    let center = half * (lo + hi);
    let half_len = half * (hi - lo);
    let fc = eval(f, map, center)?;
    let mut kronrod = fc * T::of(WGK[10]);
    let mut gauss = Complex::new(T::zero(), T::zero());
    for j in 0..10 {
        let dx = half_len * T::of(XGK[j]);
        let sum = eval(f, map, center - dx)? + eval(f, map, center + dx)?;
        kronrod = kronrod + sum * T::of(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + sum * T::of(WG[j / 2]);
        }
    }
    let value = kronrod * half_len;
    let raw = ((kronrod - gauss) * half_len).norm();
    // Roundoff floor relative to the segment magnitude.
    let floor = T::of(50.0) * T::epsilon() * value.norm();
    Ok(Segment {
        lo,
        hi,
        map,
        value,
        error: raw.max(floor),
    })
}

fn adaptive<T: Real, F>(
    f: &mut F,
    pieces: Vec<(T, T, Map<T>)>,
    spec: &QuadratureSpec<T>,
) -> Result<Integral<T>, NumericsError>
where
    F: FnMut(T) -> Complex<T>,
{
    spec.validate()?;
    let mut heap = BinaryHeap::new();
    for (lo, hi, map) in pieces {
        if hi > lo {
            heap.push(gauss_kronrod(f, lo, hi, map)?);
        }
    }
    let totals = |heap: &BinaryHeap<Segment<T>>| {
        heap.iter().fold(
            (Complex::new(T::zero(), T::zero()), T::zero()),
            |(v, e), s| (v + s.value, e + s.error),
        )
    };
    let mut splits = 0usize;
    loop {
        let (value, error) = totals(&heap);
        if error <= spec.target(value) {
            return Ok(Integral {
                value,
                abs_error: error,
                intervals: heap.len(),
            });
        }
        let worst = match heap.pop() {
            Some(s) => s,
            None => {
                return Ok(Integral {
                    value,
                    abs_error: error,
                    intervals: 0,
                })
            }
        };
        let mid = T::of(0.5) * (worst.lo + worst.hi);
        let resolvable = mid > worst.lo && mid < worst.hi;
        if splits >= spec.max_subdivisions || !resolvable {
            return Err(NumericsError::NonConvergence {
                estimated_error: error.as_f64(),
                subdivisions: splits,
            });
        }
        heap.push(gauss_kronrod(f, worst.lo, mid, worst.map)?);
        heap.push(gauss_kronrod(f, mid, worst.hi, worst.map)?);
        splits += 1;
    }
}

fn pieces_for<T: Real>(points: &[T]) -> Result<Vec<(T, T, Map<T>)>, NumericsError> {
    if points.len() < 2 {
        return Err(NumericsError::InvalidInput(
            "need at least two integration points".into(),
        ));
    }
    let mut pieces = Vec::with_capacity(points.len() - 1);
    for (i, w) in points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if !a.is_finite() || a.is_nan() || b.is_nan() || b < a {
            return Err(NumericsError::InvalidInput(
                "integration points must be finite (except a final +inf) and non-decreasing"
                    .into(),
            ));
        }
        if b.is_infinite() {
            if i + 2 != points.len() {
                return Err(NumericsError::InvalidInput(
                    "+inf may only appear as the last integration point".into(),
                ));
            }
            pieces.push((T::zero(), T::one(), Map::SemiInfinite { origin: a }));
        } else {
            pieces.push((a, b, Map::Identity));
        }
    }
    Ok(pieces)
}

/// Adaptive Gauss–Kronrod integral of a complex-valued `f` over `[a, b]`.
///
/// `b` may be `+inf`; the semi-infinite range is mapped through
/// `x = a + u / (1 - u)`.
pub fn integrate<T: Real, F>(
    mut f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
) -> Result<Integral<T>, NumericsError>
where
    F: FnMut(T) -> Complex<T>,
{
    adaptive(&mut f, pieces_for(&[a, b])?, spec)
}

/// Like [`integrate`], with the range pre-split at `points`, which must start at
/// the lower limit and end at the upper one. Interior points outside the range
/// are ignored.
pub fn integrate_with_breakpoints<T: Real, F>(
    mut f: F,
    points: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<Integral<T>, NumericsError>
where
    F: FnMut(T) -> Complex<T>,
{
    let points = clean_points(points)?;
    adaptive(&mut f, pieces_for(&points)?, spec)
}

fn clean_points<T: Real>(points: &[T]) -> Result<Vec<T>, NumericsError> {
    let (a, b) = match (points.first(), points.last()) {
        (Some(&a), Some(&b)) if points.len() >= 2 => (a, b),
        _ => {
            return Err(NumericsError::InvalidInput(
                "need at least two integration points".into(),
            ))
        }
    };
    let mut inner: Vec<T> = points[1..points.len() - 1]
        .iter()
        .copied()
        .filter(|&p| p.is_finite() && p > a && p < b)
        .collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    inner.dedup();
    let mut out = Vec::with_capacity(inner.len() + 2);
    out.push(a);
    out.extend(inner);
    out.push(b);
    Ok(out)
}

/// Integral of `g(x) e^{-i x t}` over `[a, b]` (`b` may be `+inf`).
///
/// Below `spec.oscillation_split` in `|t|` this is a plain adaptive integral.
/// Above it the range is cut at the zeros of `sin(x t)`, each half period is
/// integrated separately and the pieces are summed. For an infinite upper limit
/// the panel sum stops once the envelope of `g` over several consecutive panels
/// falls below the tolerance.
pub fn integrate_oscillatory<T: Real, G>(
    g: G,
    a: T,
    b: T,
    t: T,
    breakpoints: &[T],
    spec: &QuadratureSpec<T>,
) -> Result<Integral<T>, NumericsError>
where
    G: Fn(T) -> Complex<T>,
{
    spec.validate()?;
    let mut f = |x: T| {
        let phase = -(x * t);
        g(x) * Complex::new(phase.cos(), phase.sin())
    };
    let mut points = vec![a];
    points.extend_from_slice(breakpoints);
    points.push(b);
    if t.abs() <= spec.oscillation_split {
        return integrate_with_breakpoints(f, &points, spec);
    }
    let points = clean_points(&points)?;
    let half_period = T::PI() / t.abs();
    let panel_tol = |width: T| -> QuadratureSpec<T> {
        let share = if b.is_finite() {
            width / (b - a)
        } else {
            T::of(1e-3)
        };
        QuadratureSpec {
            abs_tol: (spec.abs_tol * share).max(T::min_positive_value()),
            rel_tol: T::epsilon() * T::of(100.0),
            max_subdivisions: spec.max_subdivisions,
            oscillation_split: spec.oscillation_split,
        }
    };

    let mut total = Complex::new(T::zero(), T::zero());
    let mut error = T::zero();
    let mut intervals = 0usize;
    let mut quiet_panels = 0usize;
    let max_panels = 1_000_000usize;
    let mut k = (a / half_period).floor() + T::one();
    let mut lo = a;
    let mut next_break = 1usize;
    let mut panels = 0usize;
    loop {
        let zero = k * half_period;
        let mut hi = zero;
        if next_break < points.len() && points[next_break] <= hi {
            hi = points[next_break];
            next_break += 1;
        } else {
            k = k + T::one();
        }
        if b.is_finite() && hi >= b {
            hi = b;
        }
        if hi > lo {
            let piece = integrate(&mut f, lo, hi, &panel_tol(hi - lo))?;
            total = total + piece.value;
            error = error + piece.abs_error;
            intervals += piece.intervals;
            panels += 1;
            if b.is_infinite() {
                let envelope = g(lo).norm().max(g(hi).norm()) * (hi - lo);
                if envelope < spec.abs_tol * T::of(1e-3) {
                    quiet_panels += 1;
                } else {
                    quiet_panels = 0;
                }
                if quiet_panels >= 8 {
                    break;
                }
            }
        }
        if b.is_finite() && hi >= b {
            break;
        }
        if panels >= max_panels {
            return Err(NumericsError::NonConvergence {
                estimated_error: error.as_f64(),
                subdivisions: panels,
            });
        }
        lo = hi;
    }
    Ok(Integral {
        value: total,
        abs_error: error,
        intervals,
    })
}

/// Principal value of `∫_a^b f(x) dx` where `f` carries a simple pole at `c`.
///
/// The interval `[c - ε, c + ε]` is excised symmetrically and the result is
/// Richardson-extrapolated over `ε` and `ε/2`; the leading `O(ε)` term cancels.
/// `b` may be `+inf`.
pub fn principal_value<T: Real, F>(
    mut f: F,
    a: T,
    b: T,
    c: T,
    spec: &QuadratureSpec<T>,
) -> Result<Integral<T>, NumericsError>
where
    F: FnMut(T) -> T,
{
    if !(a < b) || !a.is_finite() {
        return Err(NumericsError::InvalidInput(
            "principal value needs a finite lower limit below the upper limit".into(),
        ));
    }
    let gap = (c - a).min(b - c);
    if !(gap > T::zero()) {
        return Err(NumericsError::PoleAtEndpoint {
            a: a.as_f64(),
            b: b.as_f64(),
            pole: c.as_f64(),
        });
    }
    let scale = T::one().max(c.abs());
    let eps = T::of(1e-3) * gap.min(scale);
    let mut g = |x: T| Complex::new(f(x), T::zero());
    let mut excised = |e: T| -> Result<Integral<T>, NumericsError> {
        let left = integrate(&mut g, a, c - e, spec)?;
        let right = integrate(&mut g, c + e, b, spec)?;
        Ok(Integral {
            value: left.value + right.value,
            abs_error: left.abs_error + right.abs_error,
            intervals: left.intervals + right.intervals,
        })
    };
    let coarse = excised(eps)?;
    let fine = excised(eps * T::of(0.5))?;
    let two = T::of(2.0);
    let value = fine.value * two - coarse.value;
    let extrapolation = (fine.value - coarse.value).norm() * T::of(0.25);
    Ok(Integral {
        value: Complex::new(value.re, T::zero()),
        abs_error: fine.abs_error * two + coarse.abs_error + extrapolation * T::epsilon().sqrt(),
        intervals: coarse.intervals + fine.intervals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec() -> QuadratureSpec<f64> {
        QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            ..Default::default()
        }
    }

    fn re(x: f64) -> Complex<f64> {
        Complex::new(x, 0.0)
    }

    #[test]
    fn constant_on_unit_interval() {
        let r = integrate(|_| re(1.0), 0.0, 1.0, &spec()).unwrap();
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.value.im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn exponential_on_half_line() {
        let r = integrate(|x: f64| re((-x).exp()), 0.0, f64::INFINITY, &spec()).unwrap();
        assert_abs_diff_eq!(r.value.re, 1.0, epsilon = 1e-11);
    }

    #[test]
    fn complex_pole_off_axis() {
        // Closed form ln((10-2-i)/(-2-i)), evaluated with mpmath.
        let expected = Complex::new(1.282_474_678_730_768_4, 2.553_590_050_042_225_7);
        let z0 = Complex::new(2.0, 1.0);
        let r = integrate(|x: f64| (re(x) - z0).inv(), 0.0, 10.0, &spec()).unwrap();
        assert_abs_diff_eq!(r.value.re, expected.re, epsilon = 1e-11);
        assert_abs_diff_eq!(r.value.im, expected.im, epsilon = 1e-11);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let err = integrate(|x: f64| re(1.0 / (x - 0.5)), 0.0, 1.0, &spec()).unwrap_err();
        assert!(matches!(err, NumericsError::NonFinite { .. }));
    }

    #[test]
    fn subdivision_budget_is_enforced() {
        let tight = QuadratureSpec {
            abs_tol: 1e-15,
            rel_tol: 1e-15,
            max_subdivisions: 2,
            ..Default::default()
        };
        let err = integrate(|x: f64| re(x.sqrt().sin() / x.sqrt()), 0.0, 100.0, &tight).unwrap_err();
        assert!(matches!(err, NumericsError::NonConvergence { .. }));
    }

    #[test]
    fn breakpoints_resolve_narrow_peak() {
        let w = 1e-3;
        let lorentz = |x: f64| re(w / std::f64::consts::PI / ((x - 3.3).powi(2) + w * w));
        let exact = ((10.0 - 3.3) / w).atan() / std::f64::consts::PI
            + (3.3 / w).atan() / std::f64::consts::PI;
        let r = integrate_with_breakpoints(lorentz, &[0.0, 3.3, 10.0], &spec()).unwrap();
        assert_abs_diff_eq!(r.value.re, exact, epsilon = 1e-11);
    }

    #[test]
    fn oscillatory_split_matches_closed_form() {
        // ∫_0^1 e^{-i x t} dx = (1 - e^{-i t}) / (i t)
        let t = 500.0;
        let r = integrate_oscillatory(|_| re(1.0), 0.0, 1.0, t, &[], &spec()).unwrap();
        let i = Complex::new(0.0, 1.0);
        let exact = (re(1.0) - (-i * t).exp()) / (i * t);
        assert_abs_diff_eq!(r.value.re, exact.re, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value.im, exact.im, epsilon = 1e-12);
    }

    #[test]
    fn oscillatory_half_line() {
        // ∫_0^∞ e^{-x} e^{-i x t} dx = 1 / (1 + i t)
        let t = 50.0;
        let r = integrate_oscillatory(
            |x: f64| re((-x).exp()),
            0.0,
            f64::INFINITY,
            t,
            &[],
            &spec(),
        )
        .unwrap();
        let exact = Complex::new(1.0, t).inv();
        assert_abs_diff_eq!(r.value.re, exact.re, epsilon = 1e-12);
        assert_abs_diff_eq!(r.value.im, exact.im, epsilon = 1e-12);
    }

    #[test]
    fn principal_values() {
        let s = spec();
        let r = principal_value(|x: f64| 1.0 / (x - 1.0), 0.0, 2.0, 1.0, &s).unwrap();
        assert_abs_diff_eq!(r.value.re, 0.0, epsilon = 1e-10);
        let r = principal_value(|x: f64| 1.0 / (x - 1.0), 0.0, 3.0, 1.0, &s).unwrap();
        assert_abs_diff_eq!(r.value.re, std::f64::consts::LN_2, epsilon = 1e-10);
        let r = principal_value(|x: f64| x / (x - 1.0), 0.0, 2.0, 1.0, &s).unwrap();
        assert_abs_diff_eq!(r.value.re, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn principal_value_smooth_numerator() {
        // PV ∫_0^2 e^x/(x-1) dx = e (Ei(1) - Ei(-1)); reference from mpmath.
        let expected = 2.0 * std::f64::consts::E * 1.057_250_875_375_728_5;
        let r = principal_value(|x: f64| x.exp() / (x - 1.0), 0.0, 2.0, 1.0, &spec()).unwrap();
        assert_abs_diff_eq!(r.value.re, expected, epsilon = 1e-8);
    }

    #[test]
    fn principal_value_rejects_endpoint_pole() {
        let err = principal_value(|x: f64| 1.0 / x, 0.0, 2.0, 0.0, &spec()).unwrap_err();
        assert!(matches!(err, NumericsError::PoleAtEndpoint { .. }));
    }

    #[test]
    fn single_precision_smoke() {
        let s = QuadratureSpec::<f32> {
            abs_tol: 1e-5,
            rel_tol: 1e-5,
            ..Default::default()
        };
        let r = integrate(|x: f32| Complex::new(x * x, 0.0), 0.0, 3.0, &s).unwrap();
        assert!((r.value.re - 9.0).abs() < 1e-4);
    }
}
