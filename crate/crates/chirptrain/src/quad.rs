//! Fixed-panel composite Simpson quadrature.
//!
//! The integrands in this crate (pulse envelopes, envelope spectra) are smooth
//! on a bounded support with at most a few oscillations, so a deterministic
//! composite rule with a generous panel count reaches ~1e-12 relative error
//! without adaptivity. Determinism matters here: the same inputs must produce
//! byte-identical table output.

use num_complex::Complex64 as C64;

/// Number of Simpson panels used by default. Each panel adds two nodes, so
/// this evaluates the integrand 2*PANELS + 1 times.
pub(crate) const PANELS: usize = 8192;

pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    simpson_panels(f, a, b, PANELS)
}

pub(crate) fn simpson_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

pub(crate) fn simpson_complex<F: Fn(f64) -> C64>(f: F, a: f64, b: f64) -> C64 {
    let n = 2 * PANELS;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + i as f64 * h) * w;
    }
    acc * (h / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        // Simpson is exact for cubics.
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn integrates_oscillatory_cosine() {
        let v = simpson(|x| (10.0 * x).cos(), 0.0, 1.0);
        assert!((v - 10.0f64.sin() / 10.0).abs() < 1e-12);
    }

    #[test]
    fn complex_phase_integral() {
        // int_0^1 e^{-i w t} dt = (1 - e^{-i w}) / (i w)
        let w = 25.0;
        let v = simpson_complex(|t| C64::new(0.0, -w * t).exp(), 0.0, 1.0);
        let expect = (C64::new(1.0, 0.0) - C64::new(0.0, -w).exp()) / C64::new(0.0, w);
        assert!((v - expect).norm() < 1e-12);
    }
}
