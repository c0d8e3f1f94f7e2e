//! Least squares through a Householder QR factorization.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, UrError};

/// Designs whose column-normalized singular value ratio falls below this are
/// treated as singular.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Result of an ordinary least squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub ssr: f64,
    pub n_obs: usize,
    pub n_params: usize,
    /// Diagonal of `(X'X)^{-1}`.
    pub cov_unscaled_diag: Vec<f64>,
}

impl OlsFit {
    /// Residual variance `SSR / (n - k)`.
    pub fn sigma2(&self) -> f64 {
        self.ssr / (self.n_obs - self.n_params) as f64
    }

    pub fn std_error(&self, i: usize) -> f64 {
        (self.sigma2() * self.cov_unscaled_diag[i]).sqrt()
    }

    pub fn t_stat(&self, i: usize) -> f64 {
        self.coefficients[i] / self.std_error(i)
    }
}

/// Builds a design matrix from equally long regressor columns.
pub fn design_from_columns(columns: &[&[f64]]) -> DMatrix<f64> {
    let rows = columns.first().map_or(0, |c| c.len());
    DMatrix::from_fn(rows, columns.len(), |r, c| columns[c][r])
}

/// Fits `response ~ design` by least squares.
pub fn ols(design: &DMatrix<f64>, response: &[f64]) -> Result<OlsFit> {
    let (n, k) = design.shape();
    if k == 0 || n != response.len() || n < k {
        return Err(UrError::InvalidArgument(format!(
            "ols needs rows == len(response) >= cols >= 1, got {n}x{k} and {}",
            response.len()
        )));
    }
    if n == k {
        // No residual degrees of freedom; the t-ratio machinery would divide by zero.
        return Err(UrError::InvalidArgument(
            "ols needs more observations than parameters".into(),
        ));
    }

    // Column scaling makes the rank check independent of regressor units.
    let scales: Vec<f64> = (0..k).map(|j| design.column(j).norm()).collect();
    if scales.iter().any(|s| *s == 0.0 || !s.is_finite()) {
        return Err(UrError::RankDeficient { ratio: 0.0 });
    }
    let mut scaled = design.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / s);
    }

    let qr = scaled.qr();
    let r = qr.r();
    let sv = r.singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if !(ratio >= RANK_TOLERANCE) {
        return Err(UrError::RankDeficient { ratio });
    }

    let y = DVector::from_column_slice(response);
    let qty = qr.q().transpose() * &y;
    let r_inv = r
        .clone()
        .try_inverse()
        .ok_or(UrError::RankDeficient { ratio })?;
    let beta_scaled = &r_inv * qty;

    let coefficients: Vec<f64> = beta_scaled
        .iter()
        .zip(&scales)
        .map(|(b, s)| b / s)
        .collect();
    let fitted = design * DVector::from_column_slice(&coefficients);
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(a, b)| a - b).collect();
    let ssr = residuals.iter().map(|e| e * e).sum();
    // (X'X)^{-1} = S^{-1} R^{-1} R^{-T} S^{-1}; diagonal is the squared row norms.
    let cov_unscaled_diag = (0..k)
        .map(|i| r_inv.row(i).norm_squared() / (scales[i] * scales[i]))
        .collect();

    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(UrError::NonFinite("ols coefficients"));
    }

    Ok(OlsFit {
        coefficients,
        residuals,
        ssr,
        n_obs: n,
        n_params: k,
        cov_unscaled_diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rows(data: &[&[f64]]) -> DMatrix<f64> {
        DMatrix::from_fn(data.len(), data[0].len(), |r, c| data[r][c])
    }

    #[test]
    fn mean_fit() {
        let fit = ols(&rows(&[&[1.0], &[1.0], &[1.0]]), &[2.0, 4.0, 6.0]).unwrap();
        assert_relative_eq!(fit.coefficients[0], 4.0, epsilon = 1e-12);
        assert_relative_eq!(fit.ssr, 8.0, epsilon = 1e-12);
        assert_eq!(fit.residuals.len(), 3);
    }

    #[test]
    fn exact_line() {
        let fit = ols(&rows(&[&[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]]), &[1.0, 2.0, 3.0]).unwrap();
        assert!(fit.coefficients[0].abs() < 1e-12);
        assert_relative_eq!(fit.coefficients[1], 1.0, epsilon = 1e-12);
        assert!(fit.ssr < 1e-24);
    }

    #[test]
    fn collinear_design_is_rank_deficient() {
        let err = ols(&rows(&[&[1.0, 2.0], &[2.0, 4.0], &[3.0, 6.0]]), &[1.0, 0.0, 5.0]);
        assert!(matches!(err, Err(UrError::RankDeficient { .. })));
    }

    #[test]
    fn zero_column_is_rank_deficient() {
        let err = ols(&rows(&[&[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0]]), &[1.0, 2.0, 3.0]);
        assert!(matches!(err, Err(UrError::RankDeficient { .. })));
    }

    #[test]
    fn standard_errors_match_closed_form() {
        // Simple regression y = a + b x: Var(b) = s^2 / Sxx.
        let x = [1.0, 2.0, 4.0, 7.0, 11.0];
        let y = [1.2, 1.9, 4.4, 6.8, 11.5];
        let fit = ols(&design_from_columns(&[&[1.0; 5], &x]), &y).unwrap();
        let xbar = x.iter().sum::<f64>() / 5.0;
        let sxx: f64 = x.iter().map(|v| (v - xbar).powi(2)).sum();
        assert_relative_eq!(fit.cov_unscaled_diag[1], 1.0 / sxx, max_relative = 1e-12);
        let se = (fit.ssr / 3.0 / sxx).sqrt();
        assert_relative_eq!(fit.std_error(1), se, max_relative = 1e-12);
    }

    proptest::proptest! {
        #[test]
        fn residuals_are_orthogonal_to_columns(
            data in proptest::collection::vec(-10.0f64..10.0, 40),
            resp in proptest::collection::vec(-10.0f64..10.0, 20),
        ) {
            let design = DMatrix::from_fn(20, 2, |r, c| data[r * 2 + c]);
            if let Ok(fit) = ols(&design, &resp) {
                let e = DVector::from_column_slice(&fit.residuals);
                let xe = design.transpose() * e;
                let scale = design.norm() * DVector::from_column_slice(&resp).norm();
                proptest::prop_assert!(xe.amax() <= 1e-8 * scale.max(1.0));
                let ssr: f64 = fit.residuals.iter().map(|v| v * v).sum();
                proptest::prop_assert!((ssr - fit.ssr).abs() <= 1e-10 * ssr.max(1e-300));
            }
        }
    }
}
