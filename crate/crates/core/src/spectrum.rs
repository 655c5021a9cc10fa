//! Eigenvalue distribution of the data covariance.
//!
//! The library ships the discrete-atom representation only: a continuous
//! ρ_C(λ) must be discretized by the caller into (eigenvalue, weight)
//! quadrature pairs before being handed over. Spectral averages are then
//! plain deterministic weighted sums.

use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Discrete spectral density of the covariance: atoms (λ_i, w_i) with
/// λ_i > 0, w_i > 0 and Σ w_i = 1 within 1e−12.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDensity<T> {
    atoms: Vec<(T, T)>,
}

impl<T: Real> SpectralDensity<T> {
    pub fn new(atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidSpectrum("no atoms".into()));
        }
        let mut weight_sum = T::zero();
        for &(lambda, w) in &atoms {
            if !(lambda > T::zero()) || !lambda.is_finite() {
                return Err(Error::InvalidSpectrum(format!(
                    "eigenvalue must be strictly positive and finite, got {lambda}"
                )));
            }
            if !(w > T::zero()) || !w.is_finite() {
                return Err(Error::InvalidSpectrum(format!(
                    "weight must be strictly positive and finite, got {w}"
                )));
            }
            weight_sum += w;
        }
        if (weight_sum - T::one()).abs() > lit(WEIGHT_SUM_TOL) {
            return Err(Error::InvalidSpectrum(format!(
                "weights sum to {weight_sum}, expected 1 within {WEIGHT_SUM_TOL:e}"
            )));
        }
        Ok(Self { atoms })
    }

    /// Unit covariance: a single atom at λ = 1.
    pub fn identity() -> Self {
        Self {
            atoms: vec![(T::one(), T::one())],
        }
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    /// Deterministic spectral average ⟨g(λ)⟩ = Σ w_i g(λ_i).
    pub fn average(&self, g: impl Fn(T) -> T) -> T {
        self.atoms.iter().map(|&(l, w)| w * g(l)).sum()
    }

    /// ⟨λ⟩
    pub fn mean_eigenvalue(&self) -> T {
        self.average(|l| l)
    }

    /// ⟨ln λ⟩
    pub fn mean_log_eigenvalue(&self) -> T {
        self.average(|l| l.ln())
    }

    pub fn max_eigenvalue(&self) -> T {
        self.atoms
            .iter()
            .map(|&(l, _)| l)
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Parse "λ weight" pairs, one per line. Blank lines and lines
    /// starting with '#' are skipped. Validation as in [`Self::new`].
    pub fn from_reader(reader: impl BufRead) -> Result<Self> {
        let mut atoms = Vec::new();
        for (line_no, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let parse = |field: Option<&str>, what: &str| -> Result<T> {
                let text = field.ok_or_else(|| {
                    Error::InvalidSpectrum(format!("line {}: missing {what}", line_no + 1))
                })?;
                let v: f64 = text.parse().map_err(|_| {
                    Error::InvalidSpectrum(format!("line {}: unreadable {what} {text:?}", line_no + 1))
                })?;
                Ok(lit(v))
            };
            let lambda = parse(fields.next(), "eigenvalue")?;
            let weight = parse(fields.next(), "weight")?;
            if fields.next().is_some() {
                return Err(Error::InvalidSpectrum(format!(
                    "line {}: expected exactly two fields",
                    line_no + 1
                )));
            }
            atoms.push((lambda, weight));
        }
        Self::new(atoms)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(std::io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_averages() {
        let s = SpectralDensity::<f64>::identity();
        assert_eq!(s.mean_eigenvalue(), 1.0);
        assert_eq!(s.mean_log_eigenvalue(), 0.0);
    }

    #[test]
    fn two_atom_average() {
        let s = SpectralDensity::new(vec![(0.5f64, 0.5), (1.5, 0.5)]).unwrap();
        assert!((s.mean_eigenvalue() - 1.0).abs() < 1e-15);
        assert!((s.average(|l| l * l) - 0.5 * (0.25 + 2.25)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_spectra() {
        assert!(SpectralDensity::<f64>::new(vec![]).is_err());
        assert!(SpectralDensity::new(vec![(0.0f64, 1.0)]).is_err());
        assert!(SpectralDensity::new(vec![(1.0f64, -1.0), (1.0, 2.0)]).is_err());
        assert!(SpectralDensity::new(vec![(1.0f64, 0.5), (2.0, 0.5 + 1e-9)]).is_err());
    }

    #[test]
    fn parses_text_format() {
        let text = "# covariance spectrum\n1.0 0.5\n\n2.0  0.5\n";
        let s = SpectralDensity::<f64>::from_reader(text.as_bytes()).unwrap();
        assert_eq!(s.atoms().len(), 2);
        assert!((s.mean_eigenvalue() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = SpectralDensity::<f64>::from_reader("1.0 0.5\nbogus 0.5\n".as_bytes())
            .unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err =
            SpectralDensity::<f64>::from_reader("1.0 0.5 9\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("two fields"), "{err}");
    }
}
