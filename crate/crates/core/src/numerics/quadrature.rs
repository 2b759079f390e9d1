//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Adaptive quadrature settings.
///
/// The integral is accepted when the summed Kronrod–Gauss error estimate is
/// below `max(abs_tol, rel_tol * |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_subdivisions: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += w * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    if !value.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    let error = ((kronrod - gauss) * half).abs();
    Ok(Panel { a, b, value, error })
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    /// Integrate `f` over `[a, b]`; `a > b` flips the sign as usual.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::Quadrature(format!(
                "finite limits required, got [{a}, {b}]"
            )));
        }
        if a > b {
            return self.integrate(f, b, a).map(|v| -v);
        }

        let first = kronrod_panel(&f, a, b)?;
        let mut total = first.value;
        let mut total_error = first.error;
        let mut heap = BinaryHeap::new();
        heap.push(first);

        for _ in 0..self.max_subdivisions {
            if total_error <= self.abs_tol.max(self.rel_tol * total.abs()) {
                return Ok(total);
            }
            let worst = heap.pop().expect("heap never empties");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // panel can no longer be split in floating point
                heap.push(worst);
                break;
            }
            let left = kronrod_panel(&f, worst.a, mid)?;
            let right = kronrod_panel(&f, mid, worst.b)?;
            total += left.value + right.value - worst.value;
            total_error += left.error + right.error - worst.error;
            heap.push(left);
            heap.push(right);
        }

        // recompute from panels to shed accumulated cancellation
        let total: f64 = heap.iter().map(|p| p.value).sum();
        let total_error: f64 = heap.iter().map(|p| p.error).sum();
        if total_error <= self.abs_tol.max(self.rel_tol * total.abs()) {
            Ok(total)
        } else {
            Err(Error::Quadrature(format!(
                "error estimate {total_error:e} on [{a}, {b}] after {} panels",
                heap.len()
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        let q = Quadrature::default();
        let v = q.integrate(|x| x.powi(6) - 3.0 * x * x, -1.0, 2.0).unwrap();
        let exact = (128.0 + 1.0) / 7.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let q = Quadrature::default();
        let a = q.integrate(f64::exp, 0.0, 1.0).unwrap();
        let b = q.integrate(f64::exp, 1.0, 0.0).unwrap();
        assert_eq!(a, -b);
        assert!((a - (std::f64::consts::E - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let q = Quadrature::with_tolerance(1e-10);
        let v = q.integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let q = Quadrature::default();
        // the panel center lands on the pole
        assert!(matches!(
            q.integrate(|x| 1.0 / (x - 0.5), 0.0, 1.0),
            Err(Error::Quadrature(_))
        ));
        assert!(q.integrate(|x| x, 0.0, f64::INFINITY).is_err());
    }
}
