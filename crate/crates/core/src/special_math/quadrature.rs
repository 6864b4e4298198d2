//! Globally adaptive 15-point Gauss-Kronrod quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate falls under `max(absolute_tolerance, relative_tolerance * |I|)`.
//! Nodes never touch the endpoints, so integrable endpoint singularities are fine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and subdivision budget for [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            relative_tolerance: 1e-10,
            absolute_tolerance: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        relative_tolerance: f64,
        absolute_tolerance: f64,
        max_subdivisions: usize,
    ) -> Result<Self> {
        let spec = Self {
            relative_tolerance,
            absolute_tolerance,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        crate::error::check_positive("relative_tolerance", self.relative_tolerance)?;
        crate::error::check_positive("absolute_tolerance", self.absolute_tolerance)?;
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidArgument(
                "max_subdivisions must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub subdivisions: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

/// One Gauss-Kronrod (7, 15) panel with QUADPACK's error scaling.
fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]`.
///
/// Fails with [`Error::Convergence`] (carrying the best estimate and its error
/// bound) when the subdivision budget runs out or a panel shrinks to rounding
/// resolution without meeting the tolerance.
pub fn integrate_adaptive<F>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must be finite with a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            subdivisions: 0,
        });
    }

    let first = kronrod15(&mut f, a, b);
    let mut evaluations = 15;
    let mut total = first.value;
    let mut total_error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 0;

    loop {
        let tolerance = spec
            .absolute_tolerance
            .max(spec.relative_tolerance * total.abs());
        if !total.is_finite() {
            return Err(Error::Convergence {
                estimate: total,
                error_bound: total_error,
                subdivisions,
            });
        }
        if total_error <= tolerance {
            break;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::Convergence {
                estimate: total,
                error_bound: total_error,
                subdivisions,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(Error::Convergence {
                estimate: total,
                error_bound: total_error,
                subdivisions,
            });
        }
        let left = kronrod15(&mut f, worst.a, mid);
        let right = kronrod15(&mut f, mid, worst.b);
        evaluations += 30;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Re-sum occasionally so incremental updates do not drift.
        if subdivisions % 64 == 0 {
            total = heap.iter().map(|p| p.value).sum();
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }

    let value = heap.iter().map(|p| p.value).sum();
    let error_estimate = heap.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate,
        evaluations,
        subdivisions,
    })
}

/// Integrates over consecutive segments `points[i]..points[i+1]`, each adaptively.
pub(crate) fn integrate_segments<F>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    let mut acc = QuadratureResult {
        value: 0.0,
        error_estimate: 0.0,
        evaluations: 0,
        subdivisions: 0,
    };
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = integrate_adaptive(&mut f, w[0], w[1], spec)?;
        acc.value += r.value;
        acc.error_estimate += r.error_estimate;
        acc.evaluations += r.evaluations;
        acc.subdivisions += r.subdivisions;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_trig() {
        let spec = QuadratureSpec::default();
        let r = integrate_adaptive(|x| x, 0.0, 1.0, &spec).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        let r = integrate_adaptive(f64::sin, 0.0, PI, &spec).unwrap();
        assert!((r.value - 2.0).abs() < 1e-13);
        assert!(r.error_estimate <= 1e-10 * 2.0);
    }

    #[test]
    fn endpoint_singularity() {
        // int_0^1 x^{-1/2} dx = 2
        let spec = QuadratureSpec::default();
        let r = integrate_adaptive(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
        assert!((r.value - 2.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn empty_interval() {
        let r = integrate_adaptive(|_| 1.0, 3.0, 3.0, &QuadratureSpec::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let spec = QuadratureSpec::new(1e-14, 1e-300, 3).unwrap();
        let err = integrate_adaptive(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &spec).unwrap_err();
        match err {
            Error::Convergence {
                estimate,
                error_bound,
                subdivisions,
            } => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
                assert_eq!(subdivisions, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_spec_and_bounds() {
        assert!(QuadratureSpec::new(0.0, 1e-14, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-14, 0).is_err());
        assert!(integrate_adaptive(|x| x, 1.0, 0.0, &QuadratureSpec::default()).is_err());
    }
}
