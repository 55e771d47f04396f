//! Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Settings for [`Quadrature::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Widest panel allowed in the initial partition.
    pub max_panel: f64,
    /// Subdivision budget, counted in panels.
    pub max_panels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_panel: f64::INFINITY,
            max_panels: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Round-off floor of the estimate, `50 ε ∫|f|` over the panel.
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
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
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, hi) = (f(center - dx), f(center + dx));
        let sum = lo + hi;
        kronrod += WGK[j] * sum;
        abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        floor: 50.0 * f64::EPSILON * abs * half.abs(),
    }
}

impl Quadrature {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Quadrature {
            abs_tol,
            rel_tol,
            ..Quadrature::default()
        }
    }

    pub fn with_max_panel(mut self, width: f64) -> Self {
        self.max_panel = width;
        self
    }

    /// Integrates `f` over `[a, b]`, bisecting the worst panel until the
    /// summed error estimate drops below `max(abs_tol, rel_tol * |I|)` or
    /// every panel sits at its round-off floor.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain(
                "integrate",
                "integration limits must be finite",
            ));
        }
        if a == b {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
                panels: 0,
            });
        }
        if b < a {
            let r = self.integrate(f, b, a)?;
            return Ok(Integral {
                value: -r.value,
                ..r
            });
        }

        let n0 = if self.max_panel.is_finite() && self.max_panel > 0.0 {
            ((b - a) / self.max_panel).ceil().max(1.0) as usize
        } else {
            1
        };
        if n0 > self.max_panels {
            return Err(Error::NonConvergence {
                what: "adaptive quadrature",
                detail: format!(
                    "initial partition needs {n0} panels, budget is {}",
                    self.max_panels
                ),
            });
        }

        let width = (b - a) / n0 as f64;
        let mut heap = BinaryHeap::with_capacity(2 * n0);
        let mut total = 0.0;
        let mut err = 0.0;
        let mut floor = 0.0;
        for i in 0..n0 {
            let lo = a + width * i as f64;
            let hi = if i + 1 == n0 {
                b
            } else {
                a + width * (i + 1) as f64
            };
            let p = gauss_kronrod(&f, lo, hi);
            total += p.value;
            err += p.error;
            floor += p.floor;
            heap.push(p);
        }

        loop {
            if !total.is_finite() {
                return Err(Error::NonConvergence {
                    what: "adaptive quadrature",
                    detail: "integrand produced a non-finite value".into(),
                });
            }
            if err <= self.abs_tol.max(self.rel_tol * total.abs()).max(floor) {
                break;
            }
            if heap.len() >= self.max_panels {
                return Err(Error::NonConvergence {
                    what: "adaptive quadrature",
                    detail: format!(
                        "error estimate {err:.3e} above tolerance after {} panels on [{a}, {b}]",
                        heap.len()
                    ),
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                return Err(Error::NonConvergence {
                    what: "adaptive quadrature",
                    detail: format!("panel at {} cannot be bisected further", worst.a),
                });
            }
            let left = gauss_kronrod(&f, worst.a, mid);
            let right = gauss_kronrod(&f, mid, worst.b);
            total += left.value + right.value - worst.value;
            err += left.error + right.error - worst.error;
            floor += left.floor + right.floor - worst.floor;
            heap.push(left);
            heap.push(right);
        }

        // Resum in interval order to shed drift from the running totals.
        let mut panels = heap.into_vec();
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
        Ok(Integral {
            value: panels.iter().map(|p| p.value).sum(),
            error: panels.iter().map(|p| p.error).sum(),
            panels: panels.len(),
        })
    }
}
