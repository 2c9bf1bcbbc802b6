use num_complex::Complex;

use super::arrowhead::arrowhead_eigen;
use super::{FriedrichsError, FriedrichsModel};
use crate::Real;

/// Threshold on `lambda^2 f^2(omega_max)` above which the truncated band is rejected.
const TRUNCATION_TOL: f64 = 1e-6;

/// Finite-dimensional Hamiltonian: the bare level `head` coupled through
/// `border` to a uniform midpoint grid `diag` of continuum energies.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowheadMatrix<T> {
    pub head: T,
    pub diag: Vec<T>,
    pub border: Vec<T>,
}

impl<T: Real> ArrowheadMatrix<T> {
    pub fn dim(&self) -> usize {
        self.diag.len() + 1
    }

    /// Dense row-major form; index 0 is the bare level.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut m = vec![vec![T::zero(); n]; n];
        m[0][0] = self.head;
        for (i, (&d, &b)) in self.diag.iter().zip(&self.border).enumerate() {
            m[i + 1][i + 1] = d;
            m[0][i + 1] = b;
            m[i + 1][0] = b;
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedSpectrum<T> {
    pub n_bins: usize,
    pub omega_max: T,
    /// Ascending eigenvalues of the truncated Hamiltonian.
    pub eigenvalues: Vec<T>,
    /// `|<level|E_k>|^2` for each eigenvalue.
    pub overlaps: Vec<T>,
}

impl<T: Real> DiscretizedSpectrum<T> {
    pub fn overlap_sum(&self) -> T {
        self.overlaps.iter().fold(T::zero(), |a, &w| a + w)
    }

    /// `Σ_k |<level|E_k>|^2 e^{-i E_k t}`.
    pub fn amplitude(&self, t: T) -> Complex<T> {
        self.eigenvalues
            .iter()
            .zip(&self.overlaps)
            .filter(|(_, &w)| w > T::zero())
            .fold(Complex::new(T::zero(), T::zero()), |acc, (&e, &w)| {
                let phase = -(e * t);
                acc + Complex::new(phase.cos(), phase.sin()) * w
            })
    }

    pub fn survival_probability(&self, t: T) -> T {
        self.amplitude(t).norm_sqr()
    }
}

/// Midpoint discretisation of the model on `[0, omega_max]` with `n_bins` bins.
pub fn discretized_hamiltonian<T: Real>(
    model: &FriedrichsModel<T>,
    n_bins: usize,
    omega_max: T,
) -> Result<ArrowheadMatrix<T>, FriedrichsError> {
    if n_bins < 100 {
        return Err(FriedrichsError::InvalidParameter {
            field: "n_bins",
            reason: format!("need at least 100 bins, got {n_bins}"),
        });
    }
    if !(omega_max > model.omega0()) || !omega_max.is_finite() {
        return Err(FriedrichsError::InvalidParameter {
            field: "omega_max",
            reason: "must be finite and above omega0".into(),
        });
    }
    let ff = model.form_factor();
    let tail = model.coupling2() * ff.f2(omega_max);
    if tail > T::of(TRUNCATION_TOL) {
        return Err(FriedrichsError::OmegaMaxTooSmall {
            omega_max: omega_max.as_f64(),
            tail: tail.as_f64(),
        });
    }
    let dw = omega_max / T::of(n_bins as f64);
    let root_dw = dw.sqrt();
    let diag: Vec<T> = (0..n_bins)
        .map(|i| (T::of(i as f64) + T::of(0.5)) * dw)
        .collect();
    let border = diag
        .iter()
        .map(|&w| model.lambda() * ff.f2(w).sqrt() * root_dw)
        .collect();
    Ok(ArrowheadMatrix {
        head: model.omega0(),
        diag,
        border,
    })
}

/// Brute-force spectrum of the discretised model, used as an oracle for the
/// continuum calculation.
pub fn discretize<T: Real>(
    model: &FriedrichsModel<T>,
    n_bins: usize,
    omega_max: T,
) -> Result<DiscretizedSpectrum<T>, FriedrichsError> {
    let h = discretized_hamiltonian(model, n_bins, omega_max)?;
    let eig = arrowhead_eigen(h.head, &h.diag, &h.border).map_err(FriedrichsError::Eigensolver)?;
    Ok(DiscretizedSpectrum {
        n_bins,
        omega_max,
        eigenvalues: eig.eigenvalues,
        overlaps: eig.head_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::friedrichs::FormFactor;

    fn flat(lambda: f64) -> FriedrichsModel<f64> {
        FriedrichsModel::new(1.0, lambda, FormFactor::flat_cutoff(10.0).unwrap()).unwrap()
    }

    #[test]
    fn free_model_is_diagonal() {
        let s = discretize(&flat(0.0), 120, 12.0).unwrap();
        assert_eq!(s.eigenvalues.len(), 121);
        let k = s.eigenvalues.iter().position(|&e| e == 1.0).unwrap();
        assert_eq!(s.overlaps[k], 1.0);
        assert_eq!(s.overlap_sum(), 1.0);
    }

    #[test]
    fn overlaps_are_complete() {
        let s = discretize(&flat(0.1), 2000, 12.0).unwrap();
        assert!(s.overlaps.iter().all(|&w| w >= 0.0));
        assert!((s.overlap_sum() - 1.0).abs() < 1e-10);
        assert!((s.survival_probability(0.0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn truncation_and_size_checks() {
        let err = discretize(&flat(0.1), 500, 10.0).unwrap_err();
        assert!(matches!(err, FriedrichsError::OmegaMaxTooSmall { .. }));
        let err = discretize(&flat(0.1), 50, 12.0).unwrap_err();
        assert!(matches!(err, FriedrichsError::InvalidParameter { field: "n_bins", .. }));
    }
}
