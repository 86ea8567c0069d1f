//! Shared numerical routines: adaptive quadrature, bisection, golden-section
//! search, interpolation, and trapezoidal integration.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Adaptive Simpson quadrature for a complex-valued integrand.
///
/// The interval is first split into `min_panels` equal panels; each panel is
/// then refined recursively until the standard |S2 - S1| <= 15 eps estimate
/// meets the panel's share of the tolerance. The tolerance is
/// `rel_tol * scale + abs_floor`, where `scale` is a caller-provided magnitude
/// estimate of the full integral.
pub fn adaptive_simpson_complex<F>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    scale: f64,
    min_panels: usize,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    const MAX_DEPTH: usize = 30;
    let panels = min_panels.max(1);
    let tol = rel_tol * scale.max(f64::MIN_POSITIVE);
    let panel_tol = tol / panels as f64;
    let h = (b - a) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let fm = f(0.5 * (x0 + x1));
        total += simpson_recurse(
            &f,
            x0,
            x1,
            f(x0),
            fm,
            f(x1),
            panel_tol,
            MAX_DEPTH,
            panels,
        )?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: Complex64,
    fm: Complex64,
    fb: Complex64,
    tol: f64,
    depth: usize,
    panels: usize,
) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let m = 0.5 * (a + b);
    let lm = f(0.5 * (a + m));
    let rm = f(0.5 * (m + b));
    let h = b - a;
    let whole = (fa + 4.0 * fm + fb) * (h / 6.0);
    let left = (fa + 4.0 * lm + fm) * (h / 12.0);
    let right = (fm + 4.0 * rm + fb) * (h / 12.0);
    let err = (left + right - whole).norm();
    if err <= 15.0 * tol || h < 1e-18 {
        // Richardson extrapolation term
        return Ok(left + right + (left + right - whole) / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureNonConvergent {
            panels,
            depth: 30,
            estimate: err,
        });
    }
    let half_tol = 0.5 * tol;
    Ok(
        simpson_recurse(f, a, m, fa, lm, fm, half_tol, depth - 1, panels)?
            + simpson_recurse(f, m, b, fm, rm, fb, half_tol, depth - 1, panels)?,
    )
}

/// Bisection on a monotone continuous function with a sign change on [a, b].
///
/// Runs until the residual |f(mid)| drops below `f_tol` or the bracket
/// shrinks below `x_tol`, whichever comes first.
pub fn bisect<F>(f: F, mut a: f64, mut b: f64, x_tol: f64, f_tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    let mut mid = 0.5 * (a + b);
    for _ in 0..200 {
        mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm.abs() < f_tol || (b - a).abs() < x_tol {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    mid
}

/// Golden-section search for the maximum of `f` on [a, b].
///
/// Returns `(x_max, f_max)`. The bracket is narrowed until its width falls
/// below `x_tol`.
pub fn golden_section_max<F>(f: F, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Trapezoidal integral of uniformly or non-uniformly sampled values.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    acc
}

/// Cubic (4-point Lagrange) interpolation of uniformly gridded samples at `x`.
///
/// Falls back to linear interpolation near the grid edges.
pub fn interp_cubic(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    debug_assert!(n >= 2);
    let step = xs[1] - xs[0];
    let pos = (x - xs[0]) / step;
    let i = pos.floor() as isize;
    let i = i.clamp(0, n as isize - 2) as usize;
    if i == 0 || i + 2 >= n {
        let t = (x - xs[i]) / step;
        return ys[i] * (1.0 - t) + ys[i + 1] * t;
    }
    // Lagrange through the four neighbors i-1 .. i+2
    let x0 = xs[i - 1];
    let t = (x - x0) / step;
    let (y0, y1, y2, y3) = (ys[i - 1], ys[i], ys[i + 1], ys[i + 2]);
    let c0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let c1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let c2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let c3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    y0 * c0 + y1 * c1 + y2 * c2 + y3 * c3
}

/// Least-squares slope of y against x.
pub fn linear_fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn simpson_oscillatory_gaussian() {
        // integral of exp(i a z - p z^2) over symmetric limits has a real
        // closed form sqrt(pi/p) exp(-a^2/(4p)) for full-line limits; over a
        // finite box compare against a dense trapezoid.
        let a = 8000.0;
        let p = 3e5;
        let f = |z: f64| Complex64::new((-p * z * z).exp(), 0.0) * Complex64::cis(a * z);
        let got = adaptive_simpson_complex(f, -1e-3, 1e-3, 1e-10, 2e-3, 64).unwrap();
        let n = 400_001;
        let h = 2e-3 / (n - 1) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let z = -1e-3 + i as f64 * h;
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            acc += w * f(z);
        }
        acc *= h;
        assert_relative_eq!(got.re, acc.re, max_relative = 1e-8);
        assert!((got.im - acc.im).abs() < 1e-12 * acc.norm().max(1.0));
    }

    #[test]
    fn simpson_plain_sinc() {
        // integral of exp(iaz) over [-L/2, L/2] = L sinc(aL/2)
        let a = 2500.0;
        let l = 2e-3;
        let got =
            adaptive_simpson_complex(|z| Complex64::cis(a * z), -l / 2.0, l / 2.0, 1e-10, l, 64)
                .unwrap();
        let expect = l * (a * l / 2.0).sin() / (a * l / 2.0);
        assert_relative_eq!(got.re, expect, max_relative = 1e-9);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 0.0);
        assert_relative_eq!(r, 2.0_f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn golden_finds_max() {
        let (x, fx) = golden_section_max(|x| -(x - 0.7) * (x - 0.7) + 3.0, 0.0, 2.0, 1e-6);
        assert_relative_eq!(x, 0.7, epsilon = 1e-5);
        assert_relative_eq!(fx, 3.0, epsilon = 1e-9);
    }

    #[test]
    fn cubic_interp_reproduces_cubic_polynomial() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
        let poly = |x: f64| 0.3 * x * x * x - x * x + 2.0 * x - 5.0;
        let ys: Vec<f64> = xs.iter().map(|&x| poly(x)).collect();
        for &x in &[1.13, 4.77, 7.21] {
            assert_relative_eq!(interp_cubic(&xs, &ys, x), poly(x), max_relative = 1e-12);
        }
    }

    #[test]
    fn trapezoid_sine() {
        let n = 10_001;
        let xs: Vec<f64> = (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        assert_relative_eq!(trapezoid(&xs, &ys), 2.0, max_relative = 1e-7);
    }

    #[test]
    fn slope_of_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [2.0, 4.0, 6.0, 8.0];
        assert_relative_eq!(linear_fit_slope(&x, &y), 2.0, max_relative = 1e-14);
    }
}
