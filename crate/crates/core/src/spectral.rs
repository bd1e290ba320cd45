//! Mean replacement matrix of the two-color urn and the Gaussian covariance
//! kernels of the rescaled walk.
//!
//! Vectors are ordered `(red, blue)`. The replacement matrix has columns
//! indexed by the drawn color; its eigenvalues are `1` and `alpha`.

use nalgebra::{Matrix2, RowVector2, Vector2};

use crate::error::{Error, Result};
use crate::params::{ModelParams, Regime};
use crate::sequences::sigma_squared;
use crate::urn::UrnState;

const EIGEN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub a_matrix: Matrix2<f64>,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Right eigenvectors.
    pub v1: Vector2<f64>,
    pub v2: Vector2<f64>,
    /// Left eigenvectors, normalized so that `u_i v_i = 1`.
    pub u1: RowVector2<f64>,
    pub u2: RowVector2<f64>,
    /// Urn fluctuation covariance; only defined for `alpha < 1/2`.
    pub sigma_i: Option<Matrix2<f64>>,
    /// `I - v1 u1`.
    pub p_proj: Matrix2<f64>,
}

pub fn build_spectral(params: &ModelParams) -> Result<SpectralData> {
    let (q, p, alpha) = (params.q(), params.p(), params.alpha());
    let a_matrix = Matrix2::new(1.0 - q, 1.0 - p, q, p);
    let v1 = Vector2::new((1.0 - p) / (1.0 - alpha), q / (1.0 - alpha));
    let v2 = Vector2::new(-0.5, 0.5);
    let u1 = RowVector2::new(1.0, 1.0);
    // 2(p-1)/(alpha-1) * (q/(p-1), 1), with the (p-1) cancelled so that p = 1
    // stays finite.
    let u2 = RowVector2::new(2.0 * q / (alpha - 1.0), 2.0 * (p - 1.0) / (alpha - 1.0));
    let sigma_i = (params.regime() == Regime::Diffusive).then(|| {
        let c = q * (1.0 - p) / ((1.0 - 2.0 * alpha) * (1.0 - alpha).powi(2));
        Matrix2::new(c, -c, -c, c)
    });
    let p_proj = Matrix2::identity() - v1 * u1;
    let data = SpectralData {
        a_matrix,
        lambda1: 1.0,
        lambda2: alpha,
        v1,
        v2,
        u1,
        u2,
        sigma_i,
        p_proj,
    };
    data.validate()?;
    Ok(data)
}

impl SpectralData {
    /// Largest violation of the eigen relations and biorthonormality.
    pub fn max_residual(&self) -> f64 {
        let a = &self.a_matrix;
        [
            (a * self.v1 - self.lambda1 * self.v1).amax(),
            (a * self.v2 - self.lambda2 * self.v2).amax(),
            (self.u1 * a - self.lambda1 * self.u1).amax(),
            (self.u2 * a - self.lambda2 * self.u2).amax(),
            (self.u1.dot(&self.v1.transpose()) - 1.0).abs(),
            (self.u2.dot(&self.v2.transpose()) - 1.0).abs(),
            self.u1.dot(&self.v2.transpose()).abs(),
            self.u2.dot(&self.v1.transpose()).abs(),
            (a.row_sum() - RowVector2::new(1.0, 1.0)).amax(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn validate(&self) -> Result<()> {
        let residual = self.max_residual();
        if residual.is_nan() || residual > EIGEN_TOL {
            return Err(Error::InvalidParams(format!(
                "spectral invariants violated by {}",
                self.max_residual()
            )));
        }
        Ok(())
    }

    pub fn sigma_i(&self) -> Result<&Matrix2<f64>> {
        self.sigma_i
            .as_ref()
            .ok_or(Error::Undefined("Sigma_I (requires alpha < 1/2)"))
    }

    /// `E[V(s) V(t)^T] = s (t/s)^alpha Sigma_I` for `0 < s <= t`, the limit
    /// covariance of `n^{-1/2}(W_{nt} - n t v1)`.
    pub fn urn_covariance(&self, s: f64, t: f64) -> Result<Matrix2<f64>> {
        check_times(s, t)?;
        Ok(self.sigma_i()? * (s * (t / s).powf(self.lambda2)))
    }

    /// `W_n - n v1` for an urn composition with `n` balls.
    pub fn fluctuation(&self, state: UrnState) -> Vector2<f64> {
        let n = state.total() as f64;
        Vector2::new(state.red as f64, state.blue as f64) - n * self.v1
    }
}

fn check_times(s: f64, t: f64) -> Result<()> {
    if !(s > 0.0 && s <= t && t.is_finite()) {
        return Err(Error::arg(format!(
            "covariance needs 0 < s <= t, got s = {s}, t = {t}"
        )));
    }
    Ok(())
}

/// `sigma^2 / ((1 - 2 alpha) t) * (t/s)^alpha` for `0 < s <= t`.
pub fn theoretical_covariance_diffusive(params: &ModelParams, s: f64, t: f64) -> Result<f64> {
    params.require(Regime::Diffusive, "diffusive covariance kernel")?;
    check_times(s, t)?;
    let alpha = params.alpha();
    Ok(sigma_squared(params) / ((1.0 - 2.0 * alpha) * t) * (t / s).powf(alpha))
}

/// `4 q (1 - p) s` for `0 < s <= t`.
pub fn theoretical_covariance_critical(params: &ModelParams, s: f64, t: f64) -> Result<f64> {
    params.require(Regime::Critical, "critical covariance kernel")?;
    check_times(s, t)?;
    Ok(4.0 * params.q() * (1.0 - params.p()) * s)
}

/// Symmetric kernel for the regime of `params`, in either time order.
pub fn theoretical_covariance(params: &ModelParams, s: f64, t: f64) -> Result<f64> {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    match params.regime() {
        Regime::Diffusive => theoretical_covariance_diffusive(params, lo, hi),
        Regime::Critical => theoretical_covariance_critical(params, lo, hi),
        Regime::Superdiffusive => params
            .require(Regime::Diffusive, "covariance kernel")
            .map(|_| 0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: f64, p: f64) -> ModelParams {
        ModelParams::new(0.5, q, p).unwrap()
    }

    fn grid() -> Vec<ModelParams> {
        let mut out = Vec::new();
        for qi in 1..=10 {
            for pi in 0..=10 {
                if let Ok(prm) = ModelParams::new(0.5, qi as f64 / 10.0, pi as f64 / 10.0) {
                    out.push(prm);
                }
            }
        }
        out
    }

    #[test]
    fn eigen_relations_hold_on_grid() {
        for prm in grid() {
            let sp = build_spectral(&prm).unwrap();
            assert!(sp.max_residual() < 1e-12, "{prm:?}");
            // roots of x^2 - (1 + alpha) x + alpha
            let tr = sp.a_matrix.trace();
            let det = sp.a_matrix.determinant();
            let disc = (tr * tr - 4.0 * det).sqrt();
            assert!(((tr + disc) / 2.0 - sp.lambda1.max(sp.lambda2)).abs() < 1e-12);
            assert!(((tr - disc) / 2.0 - sp.lambda1.min(sp.lambda2)).abs() < 1e-12);
        }
    }

    #[test]
    fn alpha_zero_values() {
        let sp = build_spectral(&params(0.5, 0.5)).unwrap();
        assert!((sp.v1 - Vector2::new(0.5, 0.5)).amax() < 1e-15);
        assert!((sp.p_proj - Matrix2::new(0.5, -0.5, -0.5, 0.5)).amax() < 1e-15);
        assert_eq!((sp.lambda1, sp.lambda2), (1.0, 0.0));
    }

    #[test]
    fn projection_closed_form() {
        for prm in grid() {
            let sp = build_spectral(&prm).unwrap();
            let (q, p) = (prm.q(), prm.p());
            let expect = Matrix2::new(q, p - 1.0, -q, 1.0 - p) / (1.0 - prm.alpha());
            assert!((sp.p_proj - expect).amax() < 1e-12);
        }
    }

    #[test]
    fn u2_defined_at_p_one() {
        let sp = build_spectral(&params(0.3, 1.0)).unwrap();
        assert!(sp.u2.iter().all(|x| x.is_finite()));
        assert!(sp.max_residual() < 1e-12);
    }

    #[test]
    fn sigma_i_only_diffusive() {
        assert!(build_spectral(&params(0.25, 0.75))
            .unwrap()
            .sigma_i()
            .is_err());
        assert!(build_spectral(&params(0.1, 0.9))
            .unwrap()
            .sigma_i()
            .is_err());
        let prm = params(0.25, 0.5);
        let sp = build_spectral(&prm).unwrap();
        let k = theoretical_covariance_diffusive(&prm, 1.0, 1.0).unwrap();
        assert!((sp.sigma_i().unwrap()[(1, 1)] - k).abs() < 1e-15);
    }

    #[test]
    fn matrix_exponential_cross_check() {
        // s Sigma_I exp(log(t/s) A^T) = s (t/s)^alpha Sigma_I
        for prm in grid()
            .into_iter()
            .filter(|p| p.regime() == Regime::Diffusive)
        {
            let sp = build_spectral(&prm).unwrap();
            for &(s, t) in &[(0.25f64, 1.0f64), (0.5, 0.75), (1.0, 3.0)] {
                let expo = (sp.a_matrix.transpose() * (t / s).ln()).exp();
                let lhs = sp.sigma_i().unwrap() * expo * s;
                let rhs = sp.urn_covariance(s, t).unwrap();
                assert!(
                    (lhs - rhs).amax() < 1e-12 * rhs.amax().max(1.0),
                    "{prm:?} {s} {t}"
                );
            }
        }
    }

    #[test]
    fn urn_covariance_maps_to_walk_kernel() {
        // W_t = V_blue(t) / t
        let prm = params(0.2, 0.55);
        let sp = build_spectral(&prm).unwrap();
        let (s, t) = (0.3, 0.8);
        let urn = sp.urn_covariance(s, t).unwrap()[(1, 1)] / (s * t);
        let walk = theoretical_covariance_diffusive(&prm, s, t).unwrap();
        assert!((urn - walk).abs() < 1e-14);
    }

    #[test]
    fn diffusive_kernel_examples() {
        let prm = params(0.5, 0.5);
        assert!((theoretical_covariance_diffusive(&prm, 0.25, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((theoretical_covariance_diffusive(&prm, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((theoretical_covariance_diffusive(&prm, 0.1, 2.0).unwrap() - 0.125).abs() < 1e-15);
        assert!(theoretical_covariance_diffusive(&prm, 1.0, 0.5).is_err());
        assert!(theoretical_covariance_diffusive(&params(0.25, 0.75), 0.5, 1.0).is_err());
        assert_eq!(
            theoretical_covariance_diffusive(&params(0.7, 1.0), 0.5, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn critical_kernel_examples() {
        let prm = params(0.25, 0.75);
        assert!((theoretical_covariance_critical(&prm, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((theoretical_covariance_critical(&prm, 0.5, 0.75).unwrap() - 0.125).abs() < 1e-15);
        assert!(theoretical_covariance_critical(&prm, 1e-9, 1.0).unwrap() < 1e-9);
        assert!(theoretical_covariance_critical(&params(0.5, 0.5), 0.5, 1.0).is_err());
        assert!(theoretical_covariance(&params(0.1, 0.9), 0.5, 1.0).is_err());
        assert_eq!(
            theoretical_covariance(&prm, 0.75, 0.5).unwrap(),
            theoretical_covariance(&prm, 0.5, 0.75).unwrap()
        );
    }

    #[test]
    fn fluctuation_is_along_minus_one_one() {
        let sp = build_spectral(&params(0.1, 0.9)).unwrap();
        for (red, blue) in [(3, 97), (400, 600), (0, 1)] {
            let w = sp.fluctuation(UrnState { red, blue });
            assert!((w[0] + w[1]).abs() < 1e-9 * (red + blue) as f64);
        }
    }
}
