use super::{curvature, RadiusVector};
use crate::complex::Triangulation;
use crate::conditions::WeightFunction;
use crate::error::{Error, Result};

/// Absolute tolerance of the adaptive quadrature used by [`phi`].
pub const PHI_TOL: f64 = 1e-11;

const MAX_INTERVALS: usize = 2000;

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (QUADPACK qk15).
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x)? + f(c + x)?;
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Ok((kronrod * h, ((kronrod - gauss) * h).abs()))
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over `[a, b]`.
pub(crate) fn integrate<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (v, e) = gk15(&mut f, a, b)?;
    let mut parts = vec![(a, b, v, e)];
    loop {
        let total: f64 = parts.iter().map(|p| p.2).sum();
        let err: f64 = parts.iter().map(|p| p.3).sum();
        if err <= tol {
            return Ok(total);
        }
        if parts.len() >= MAX_INTERVALS {
            return Err(Error::QuadratureNonConvergence { tol, estimate: err });
        }
        let worst = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("nonempty");
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            return Err(Error::QuadratureNonConvergence { tol, estimate: err });
        }
        let (v1, e1) = gk15(&mut f, lo, mid)?;
        let (v2, e2) = gk15(&mut f, mid, hi)?;
        parts.push((lo, mid, v1, e1));
        parts.push((mid, hi, v2, e2));
    }
}

/// `Phi(q) - Phi(q_ref)` for the concave functional whose gradient is `-k`,
/// integrated along the straight segment from `q_ref` to `q`.
pub fn phi(tri: &Triangulation, w: &WeightFunction, q: &RadiusVector, q_ref: &RadiusVector) -> Result<f64> {
    phi_with_tol(tri, w, q, q_ref, PHI_TOL)
}

pub fn phi_with_tol(tri: &Triangulation, w: &WeightFunction, q: &RadiusVector, q_ref: &RadiusVector, tol: f64) -> Result<f64> {
    if q.len() != q_ref.len() {
        return Err(Error::Domain(format!("radius vectors differ in length: {} vs {}", q.len(), q_ref.len())));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("quadrature tolerance must be positive, got {tol}")));
    }
    let delta: Vec<f64> = q.q().iter().zip(q_ref.q()).map(|(a, b)| a - b).collect();
    if delta.iter().all(|d| *d == 0.0) {
        return Ok(0.0);
    }
    let integrand = |t: f64| -> Result<f64> {
        let p: Vec<f64> = q_ref.q().iter().zip(&delta).map(|(r, d)| r + t * d).collect();
        let k = curvature(tri, w, &RadiusVector::new(p)?)?;
        Ok(-k.k.iter().zip(&delta).map(|(kv, d)| kv * d).sum::<f64>())
    };
    integrate(integrand, 0.0, 1.0, tol)
}
