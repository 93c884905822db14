//! Small dense linear-algebra routines: power iteration and a Padé
//! scaling-and-squaring matrix exponential.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const POWER_TOLERANCE: f64 = 1e-10;
pub const POWER_MAX_ITERATIONS: usize = 10_000;

/// Largest singular value of a linear operator `J` given `v ↦ Jv` and
/// `v ↦ J^T v`, by power iteration on `J^T J` from the all-ones vector.
pub fn spectral_norm<F, G>(dim: usize, apply: F, apply_t: G) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
    G: Fn(&[f64]) -> Vec<f64>,
{
    if dim == 0 {
        return Ok(0.0);
    }
    let mut v = vec![1.0 / (dim as f64).sqrt(); dim];
    let mut previous = f64::NAN;
    for _ in 0..POWER_MAX_ITERATIONS {
        let w = apply_t(&apply(&v));
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        if (rayleigh - previous).abs() <= POWER_TOLERANCE * rayleigh.abs().max(1e-300) {
            return Ok(rayleigh.max(0.0).sqrt());
        }
        previous = rayleigh;
        v = w.into_iter().map(|x| x / norm).collect();
    }
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERATIONS,
    })
}

/// `e^A` by scaling and squaring with a diagonal `[8/8]` Padé approximant.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let norm = a
        .row_iter()
        .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    if !norm.is_finite() {
        return Err(Error::NumericFailure("matrix exponential of a non-finite matrix".into()));
    }
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(s);
    const Q: usize = 8;
    // c_k = (2q-k)! q! / ((2q)! k! (q-k)!)
    let mut c = [1.0f64; Q + 1];
    for k in 1..=Q {
        c[k] = c[k - 1] * (Q + 1 - k) as f64 / (k as f64 * (2 * Q + 1 - k) as f64);
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut num = id.clone() * c[0];
    let mut den = id.clone() * c[0];
    let mut power = id;
    for (k, &ck) in c.iter().enumerate().skip(1) {
        power = &power * &scaled;
        num += &power * ck;
        if k % 2 == 0 {
            den += &power * ck;
        } else {
            den -= &power * ck;
        }
    }
    let lu = den.lu();
    let mut result = lu
        .solve(&num)
        .ok_or_else(|| Error::NumericFailure("singular Pade denominator".into()))?;
    for _ in 0..s {
        result = &result * &result;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_small_matrices() {
        let j = [[0.0, 0.5], [0.5, 0.0]];
        let apply = |v: &[f64]| (0..2).map(|i| j[i][0] * v[0] + j[i][1] * v[1]).collect();
        let apply_t = |v: &[f64]| (0..2).map(|i| j[0][i] * v[0] + j[1][i] * v[1]).collect();
        assert!((spectral_norm(2, apply, apply_t).unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(spectral_norm(3, |v| vec![0.0; v.len()], |v| vec![0.0; v.len()]).unwrap(), 0.0);
    }

    #[test]
    fn expm_two_state_generator() {
        let l = DMatrix::from_row_slice(2, 2, &[-0.5, 0.5, 0.5, -0.5]);
        for t in [0.0, 0.3, 1.0, 7.5] {
            let p = expm(&(&l * t)).unwrap();
            let d = 0.5 * (-t).exp();
            assert!((p[(0, 0)] - (0.5 + d)).abs() < 1e-13);
            assert!((p[(0, 1)] - (0.5 - d)).abs() < 1e-13);
        }
    }

    #[test]
    fn expm_diagonal() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-3.0, 0.0, 2.5]));
        let e = expm(&a).unwrap();
        for (i, x) in [-3.0f64, 0.0, 2.5].iter().enumerate() {
            assert!((e[(i, i)] - x.exp()).abs() < 1e-12 * x.exp().max(1.0));
        }
    }
}
