use crate::error::{Error, Result};

/// Pointwise errors of a population trace against a reference, and their
/// maxima.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorMetrics {
    pub times: Vec<f64>,
    /// `|P_ref(t) − P(t)|`
    pub eps_sol: Vec<f64>,
    /// `|1 − ⟨ψ(t)|ψ(t)⟩|`
    pub eps_norm: Vec<f64>,
    pub eps_sol_max: f64,
    pub eps_norm_max: f64,
}

/// `norm_sqr` holds `⟨ψ(t)|ψ(t)⟩` at the same times as the populations.
pub fn error_metrics(times: &[f64], population: &[f64], norm_sqr: &[f64], reference: &[f64]) -> Result<ErrorMetrics> {
    let n = times.len();
    for len in [population.len(), norm_sqr.len(), reference.len()] {
        if len != n {
            return Err(Error::Length { left: n, right: len });
        }
    }
    let eps_sol: Vec<f64> = reference.iter().zip(population).map(|(a, b)| (a - b).abs()).collect();
    let eps_norm: Vec<f64> = norm_sqr.iter().map(|v| (1.0 - v).abs()).collect();
    Ok(ErrorMetrics {
        times: times.to_vec(),
        eps_sol_max: eps_sol.iter().cloned().fold(0.0, f64::max),
        eps_norm_max: eps_norm.iter().cloned().fold(0.0, f64::max),
        eps_sol,
        eps_norm,
    })
}

/// `|R_ref − R| / R_ref`
pub fn relative_error(reference: f64, value: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(Error::DivisionByZero("reference value is zero"));
    }
    Ok(((reference - value) / reference).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_traces() {
        let t = [0.0, 1.0, 2.0];
        let p = [1.0, 0.7, 0.2];
        let m = error_metrics(&t, &p, &[1.0; 3], &p).unwrap();
        assert!(m.eps_sol.iter().all(|e| *e == 0.0));
        assert!(m.eps_norm.iter().all(|e| *e == 0.0));
        assert_eq!((m.eps_sol_max, m.eps_norm_max), (0.0, 0.0));
    }

    #[test]
    fn maxima_and_lengths() {
        let m = error_metrics(&[0.0, 1.0], &[0.5, 0.25], &[1.0 + 1e-12, 1.0], &[0.5, 0.25 + 3e-9]).unwrap();
        assert!((m.eps_sol_max - 3e-9).abs() < 1e-16);
        assert!((m.eps_norm_max - 1e-12).abs() < 1e-16);
        assert!(error_metrics(&[0.0], &[0.5, 0.1], &[1.0], &[0.5]).is_err());
        assert!(relative_error(0.0, 1.0).is_err());
        assert!((relative_error(4.0, 3.0).unwrap() - 0.25).abs() < 1e-16);
    }
}
