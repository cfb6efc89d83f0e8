//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use crate::error::{Error, Result};
use crate::scalar::Real;

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
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7/K15 panel: `(kronrod estimate, |kronrod − gauss|)`.
fn panel<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = (a + b) * half;
    let radius = (b - a) * half;
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = radius * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + T::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + T::lit(WG[j / 2]) * pair;
        }
    }
    (kronrod * radius, ((kronrod - gauss) * radius).abs())
}

fn adapt<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T, depth: usize) -> Result<T> {
    let (value, err) = panel(f, a, b);
    if err <= tol {
        return Ok(value);
    }
    if depth == 0 {
        return Err(Error::Quadrature {
            a: a.as_f64(),
            b: b.as_f64(),
            tol: tol.as_f64(),
        });
    }
    let mid = (a + b) * T::lit(0.5);
    let half_tol = tol * T::lit(0.5);
    Ok(adapt(f, a, mid, half_tol, depth - 1)? + adapt(f, mid, b, half_tol, depth - 1)?)
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, tol: T) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    adapt(&f, a, b, tol, 40)
}
