//! Quadrature: adaptive Gauss–Kronrod (21 points) for complex integrands,
//! double-exponential rules for endpoint singularities and half-lines, and
//! Gauss–Legendre panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_2;
use std::num::NonZeroUsize;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689,
    0.973_906_528_517_171_720_077_964_012_084,
    0.930_157_491_355_708_226_001_207_180_060,
    0.865_063_366_688_984_510_732_096_688_423,
    0.780_817_726_586_416_897_063_717_578_345,
    0.679_409_568_299_024_406_234_327_365_115,
    0.562_757_134_668_604_683_339_000_099_273,
    0.433_395_394_129_247_190_799_265_943_166,
    0.294_392_862_701_460_198_131_126_603_104,
    0.148_874_338_981_631_210_884_826_001_130,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062,
    0.032_558_162_307_964_727_478_818_972_459,
    0.054_755_896_574_351_996_031_381_300_245,
    0.075_039_674_810_919_952_767_043_140_916,
    0.093_125_454_583_697_605_535_065_465_083,
    0.109_387_158_802_297_641_899_210_590_326,
    0.123_491_976_262_065_851_077_600_541_491,
    0.134_709_217_311_473_325_928_054_001_772,
    0.142_775_938_577_060_080_797_094_273_139,
    0.147_739_104_901_338_491_374_841_515_972,
    0.149_445_554_002_916_905_664_936_468_390,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893,
    0.149_451_349_150_580_593_145_776_339_658,
    0.219_086_362_515_982_043_995_534_934_228,
    0.269_266_719_309_996_355_091_226_921_569,
    0.295_524_224_714_752_870_173_892_994_651,
];

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances for [`gauss_kronrod`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for GkOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 2000 }
    }
}

fn gk21<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive 21-point Gauss–Kronrod quadrature on `[a, b]`.
pub fn gauss_kronrod<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, opts: GkOptions) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Integration(format!("infinite interval [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, evaluations: 0 });
    }
    let (v, e) = gk21(&mut f, a, b);
    let mut evaluations = 21;
    let mut total = v;
    let mut err = e;
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    while err > opts.abs_tol.max(opts.rel_tol * total.norm()) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::Integration(format!("error estimate {err:.3e} after {} intervals", heap.len())));
        }
        let seg = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval cannot be split further; accept what we have
            heap.push(seg);
            break;
        }
        let (v1, e1) = gk21(&mut f, seg.a, mid);
        let (v2, e2) = gk21(&mut f, mid, seg.b);
        evaluations += 42;
        total += v1 + v2 - seg.value;
        err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
    }
    if !(total.re.is_finite() && total.im.is_finite()) {
        return Err(Error::Integration("integrand produced non-finite values".into()));
    }
    // resum to shed accumulated rounding from the running updates
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(QuadResult { value, error, evaluations })
}

/// Real-valued convenience wrapper around [`gauss_kronrod`].
pub fn gauss_kronrod_real<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: GkOptions) -> Result<f64> {
    Ok(gauss_kronrod(|x| Complex64::new(f(x), 0.0), a, b, opts)?.value.re)
}

/// Exp-sinh rule for `int_a^inf f(x) dx`; tolerates integrable singularities at `a`.
pub fn exp_sinh<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, tol: f64) -> Result<QuadResult> {
    let t_max = 6.0;
    let term = |f: &mut F, t: f64| -> Complex64 {
        let u = FRAC_PI_2 * t.sinh();
        let x = u.exp();
        let w = FRAC_PI_2 * t.cosh() * x;
        if !w.is_finite() || x == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let fx = f(a + x);
        if fx == Complex64::new(0.0, 0.0) {
            return fx;
        }
        fx * w
    };
    let mut h = 0.5;
    let mut evaluations = 0;
    let mut sum = Complex64::new(0.0, 0.0);
    let n = (t_max / h) as i64;
    for k in -n..=n {
        sum += term(&mut f, k as f64 * h);
        evaluations += 1;
    }
    let mut estimate = sum * h;
    for _level in 0..12 {
        h *= 0.5;
        let n = (t_max / h) as i64;
        let mut k = -n + 1;
        if k % 2 == 0 {
            k += 1;
        }
        while k <= n {
            sum += term(&mut f, k as f64 * h);
            evaluations += 1;
            k += 2;
        }
        let next = sum * h;
        let diff = (next - estimate).norm();
        estimate = next;
        if diff <= tol * estimate.norm().max(1e-300) {
            return Ok(QuadResult { value: estimate, error: diff, evaluations });
        }
    }
    Err(Error::Integration("exp-sinh refinement did not converge".into()))
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let rule = gauss_quad::legendre::GaussLegendre::new(NonZeroUsize::new(n.max(1)).expect("n >= 1"));
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.as_node_weight_pairs().iter().map(|&(x, w)| (c + h * x, h * w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_and_oscillatory() {
        let r = gauss_kronrod(|x| Complex64::new(x.powi(5), 0.0), 0.0, 2.0, GkOptions::default()).unwrap();
        assert!((r.value.re - 64.0 / 6.0).abs() < 1e-13);
        let r = gauss_kronrod(|x| Complex64::new(0.0, x).exp(), 0.0, 50.0, GkOptions::default()).unwrap();
        let want = (Complex64::new(0.0, 50.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((r.value - want).norm() < 1e-12);
    }

    #[test]
    fn gk_endpoint_singularity() {
        let r = gauss_kronrod_real(|x| x.powf(-0.7), 0.0, 1.0, GkOptions { max_intervals: 5000, ..Default::default() });
        assert!((r.unwrap() - 1.0 / 0.3).abs() < 1e-9);
    }

    #[test]
    fn gk_reports_failure() {
        let opts = GkOptions { abs_tol: 0.0, rel_tol: 1e-15, max_intervals: 3 };
        assert!(gauss_kronrod_real(|x| (1.0 / x).sin(), 1e-4, 1.0, opts).is_err());
    }

    #[test]
    fn exp_sinh_half_line() {
        // int_0^inf x^{-1/2} e^{-x} dx = sqrt(pi)
        let r = exp_sinh(|x| Complex64::new(x.powf(-0.5) * (-x).exp(), 0.0), 0.0, 1e-14).unwrap();
        assert!((r.value.re - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn legendre_panel_exactness() {
        let nodes = gauss_legendre(8, 1.0, 3.0);
        let s: f64 = nodes.iter().map(|(x, w)| w * x.powi(15)).sum();
        let want = (3f64.powi(16) - 1.0) / 16.0;
        assert!(((s - want) / want).abs() < 1e-14);
    }
}
