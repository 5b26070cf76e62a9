//! Regression helpers for comparing 1-norms across systems.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
}

fn check_lengths(nx: usize, ny: usize) -> Result<()> {
    if nx != ny {
        return Err(Error::Contract(format!("{nx} abscissae but {ny} ordinates")));
    }
    if nx == 0 {
        return Err(Error::Contract("no data points".into()));
    }
    Ok(())
}

/// Least squares through the origin, `y ≈ α x`, with the standard error of
/// `α` from the residual variance on `n - 1` degrees of freedom.
pub fn proportional_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    check_lengths(xs.len(), ys.len())?;
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae are zero".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let slope = sxy / sxx;
    let n = xs.len();
    let stderr = if n > 1 {
        let sse: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - slope * x).powi(2))
            .sum();
        (sse / (n - 1) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(FitResult {
        slope,
        stderr,
        intercept: None,
        r_squared: None,
    })
}

/// Ordinary least squares `y = α x + β`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<FitResult> {
    check_lengths(xs.len(), ys.len())?;
    let n = xs.len();
    if n < 2 {
        return Err(Error::Contract("a line needs at least two points".into()));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let sst: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if sst > 0.0 { 1.0 - sse / sst } else { 1.0 };
    let stderr = if n > 2 {
        (sse / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(FitResult {
        slope,
        stderr,
        intercept: Some(intercept),
        r_squared: Some(r_squared),
    })
}

/// `log10 λ = α log10 N + β`.
pub fn scaling_fit(sizes: &[usize], lambdas: &[f64]) -> Result<FitResult> {
    check_lengths(sizes.len(), lambdas.len())?;
    if let Some(l) = lambdas.iter().find(|l| l.is_nan() || **l <= 0.0) {
        return Err(Error::Domain(format!("1-norm {l} is not positive")));
    }
    if sizes.contains(&0) {
        return Err(Error::Domain("system size 0".into()));
    }
    let xs: Vec<f64> = sizes.iter().map(|&n| (n as f64).log10()).collect();
    let ys: Vec<f64> = lambdas.iter().map(|l| l.log10()).collect();
    linear_fit(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_data() {
        let xs = [1.0, 2.0, 5.0];
        let f = proportional_fit(&xs, &xs).unwrap();
        assert_eq!(f.slope, 1.0);
        assert_eq!(f.stderr, 0.0);
    }

    #[test]
    fn zero_abscissae() {
        assert!(matches!(
            proportional_fit(&[0.0, 0.0], &[1.0, 2.0]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(proportional_fit(&[1.0], &[]).is_err());
    }

    #[test]
    fn noisy_half_slope() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (1..=30).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 0.5 * x + 1e-3 * (rng.random::<f64>() - 0.5) * 12f64.sqrt())
            .collect();
        let f = proportional_fit(&xs, &ys).unwrap();
        assert!((f.slope - 0.5).abs() < 3.0 * f.stderr.max(1e-12));
    }

    #[test]
    fn quadratic_scaling() {
        let sizes = [2, 3, 4, 5, 6];
        let l: Vec<f64> = sizes.iter().map(|&n| (n * n) as f64).collect();
        let f = scaling_fit(&sizes, &l).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!(f.intercept.unwrap().abs() < 1e-12);
        assert!((f.r_squared.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scaling_domain() {
        assert!(matches!(scaling_fit(&[2, 3], &[1.0, -1.0]), Err(Error::Domain(_))));
        assert!(matches!(scaling_fit(&[2, 2], &[1.0, 2.0]), Err(Error::DegenerateFit(_))));
    }
}
