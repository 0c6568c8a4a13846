//! Gaussian sensing ensembles and the magnitude-only forward map.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::signal::{gaussian_scalar, SignalVector};

/// Documentation string recorded on generated ensembles.
pub const GAUSSIAN_VARIANCE_CONVENTION: &str =
    "real: N(0,1) entries; complex: N(0,1/2) + i*N(0,1/2) (unit second moment)";

/// An m-by-n sensing matrix over a declared field, with generation metadata.
///
/// Matrices built by [`gaussian_matrix`] regenerate bit-identically from
/// `(field, m, n, seed)`. Matrices loaded from files carry `seed = 0` and an
/// `"external"` convention string.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementEnsemble {
    field: Field,
    m: usize,
    n: usize,
    /// Row-major storage.
    entries: Vec<Complex64>,
    seed: u64,
    variance_convention: String,
}

impl MeasurementEnsemble {
    /// Wrap externally supplied entries (row-major, length `m * n`).
    pub fn from_entries(field: Field, m: usize, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::invalid("matrix dimensions must be >= 1"));
        }
        if entries.len() != m * n {
            return Err(Error::invalid(format!(
                "entry count {} does not match {m} x {n}",
                entries.len()
            )));
        }
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::invalid(format!("non-finite matrix entry at {i}")));
            }
            if field == Field::Real && z.im != 0.0 {
                return Err(Error::invalid(format!(
                    "entry {i} has nonzero imaginary part in a real matrix"
                )));
            }
        }
        Ok(MeasurementEnsemble {
            field,
            m,
            n,
            entries,
            seed: 0,
            variance_convention: "external".to_string(),
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn variance_convention(&self) -> &str {
        &self.variance_convention
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// `A z` for a raw coefficient slice of length `n`.
    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(z.len(), self.n);
        let mut out = Vec::with_capacity(self.m);
        for i in 0..self.m {
            let row = self.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(z.iter()) {
                acc += a * b;
            }
            out.push(acc);
        }
        out
    }

    /// `A^H r` for a raw slice of length `m`.
    pub fn apply_adjoint(&self, r: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(r.len(), self.m);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.m {
            let row = self.row(i);
            let ri = r[i];
            for (o, a) in out.iter_mut().zip(row.iter()) {
                *o += a.conj() * ri;
            }
        }
        out
    }

    /// Largest singular value, estimated by power iteration on `A^H A`.
    ///
    /// Deterministic: starts from the all-ones direction with a small index
    /// tilt so it cannot sit orthogonal to the top singular vector.
    pub fn op_norm_estimate(&self) -> f64 {
        let n = self.n;
        let mut v: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 + (j as f64) / (n as f64 + 1.0), 0.0))
            .collect();
        let mut norm = crate::signal::norm_q(&v, 2.0);
        for x in v.iter_mut() {
            *x /= norm;
        }
        let mut sigma_sq = 0.0;
        for _ in 0..40 {
            let av = self.apply(&v);
            let mut w = self.apply_adjoint(&av);
            norm = crate::signal::norm_q(&w, 2.0);
            if norm == 0.0 {
                return 0.0;
            }
            sigma_sq = norm;
            for x in w.iter_mut() {
                *x /= norm;
            }
            v = w;
        }
        sigma_sq.sqrt()
    }
}

/// Draw a standard Gaussian sensing matrix, deterministic per seed.
///
/// Real entries are N(0,1); complex entries have independent N(0,1/2) real
/// and imaginary parts, so every entry has unit second moment. Entries are
/// drawn row-major.
pub fn gaussian_matrix(field: Field, m: usize, n: usize, seed: u64) -> Result<MeasurementEnsemble> {
    if m == 0 || n == 0 {
        return Err(Error::invalid("matrix dimensions must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries: Vec<Complex64> = (0..m * n).map(|_| gaussian_scalar(field, &mut rng)).collect();
    Ok(MeasurementEnsemble {
        field,
        m,
        n,
        entries,
        seed,
        variance_convention: GAUSSIAN_VARIANCE_CONVENTION.to_string(),
    })
}

/// A length-m vector of magnitude measurements.
///
/// Exact observations are entrywise nonnegative. Observations with additive
/// noise may carry negative entries; they are never clamped, because clamping
/// would change the noise norm and break the noise-budget contract. The
/// `noisy` flag records which contract applies.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaselessObservation {
    values: Vec<f64>,
    noisy: bool,
}

impl PhaselessObservation {
    /// Exact (noiseless) observation; every entry must be >= 0 and finite.
    pub fn exact(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("observation must have length >= 1"));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::invalid(format!(
                    "exact observation entry {i} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(PhaselessObservation {
            values,
            noisy: false,
        })
    }

    /// Noisy observation; entries must be finite but may be negative.
    pub fn noisy(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("observation must have length >= 1"));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid(format!(
                    "observation entry {i} must be finite, got {v}"
                )));
            }
        }
        Ok(PhaselessObservation {
            values,
            noisy: true,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_noisy(&self) -> bool {
        self.noisy
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// An l2 noise budget, optionally with an explicit noise vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    eta: f64,
    e: Option<Vec<f64>>,
}

impl NoiseSpec {
    pub fn budget(eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta >= 0.0) {
            return Err(Error::invalid(format!(
                "noise budget must be finite and >= 0, got {eta}"
            )));
        }
        Ok(NoiseSpec { eta, e: None })
    }

    /// Budget plus an explicit noise vector with `||e||_2 <= eta`.
    pub fn with_vector(eta: f64, e: Vec<f64>) -> Result<Self> {
        let spec = Self::budget(eta)?;
        let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !e.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("noise vector entries must be finite"));
        }
        if norm > eta * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "noise vector norm {norm} exceeds budget {eta}"
            )));
        }
        Ok(NoiseSpec {
            eta: spec.eta,
            e: Some(e),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn vector(&self) -> Option<&[f64]> {
        self.e.as_deref()
    }
}

/// Elementwise `|A x|`, optionally with additive noise.
pub fn phaseless_measure(
    a: &MeasurementEnsemble,
    x: &SignalVector,
    noise: Option<&NoiseSpec>,
) -> Result<PhaselessObservation> {
    if a.field() != x.field() {
        return Err(Error::invalid(format!(
            "field mismatch: matrix {} vs signal {}",
            a.field(),
            x.field()
        )));
    }
    if a.cols() != x.len() {
        return Err(Error::invalid(format!(
            "dimension mismatch: matrix has {} columns, signal has length {}",
            a.cols(),
            x.len()
        )));
    }
    let mut values: Vec<f64> = a.apply(x.entries()).iter().map(|z| z.norm()).collect();
    match noise.and_then(|s| s.vector()) {
        None => PhaselessObservation::exact(values),
        Some(e) => {
            if e.len() != values.len() {
                return Err(Error::invalid(format!(
                    "noise vector length {} does not match m = {}",
                    e.len(),
                    values.len()
                )));
            }
            for (v, n) in values.iter_mut().zip(e.iter()) {
                *v += n;
            }
            PhaselessObservation::noisy(values)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_dimensions() {
        assert!(gaussian_matrix(Field::Real, 0, 3, 1).is_err());
        assert!(gaussian_matrix(Field::Real, 3, 0, 1).is_err());
    }

    #[test]
    fn regeneration_is_bit_identical() {
        for field in [Field::Real, Field::Complex] {
            let a = gaussian_matrix(field, 7, 5, 123).unwrap();
            let b = gaussian_matrix(field, 7, 5, 123).unwrap();
            assert_eq!(a, b);
            let c = gaussian_matrix(field, 7, 5, 124).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn identity_forward_map_takes_magnitudes() {
        let a = MeasurementEnsemble::from_entries(
            Field::Real,
            2,
            2,
            vec![
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
        .unwrap();
        let x = SignalVector::real(vec![-3.0, 4.0]).unwrap();
        let y = phaseless_measure(&a, &x, None).unwrap();
        assert_eq!(y.values(), &[3.0, 4.0]);
        assert!(!y.is_noisy());
    }

    #[test]
    fn zero_signal_measures_zero() {
        let a = gaussian_matrix(Field::Complex, 5, 3, 2).unwrap();
        let x = SignalVector::zero(Field::Complex, 3).unwrap();
        let y = phaseless_measure(&a, &x, None).unwrap();
        assert!(y.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn complex_row_measures_modulus() {
        let a = MeasurementEnsemble::from_entries(
            Field::Complex,
            1,
            2,
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
        )
        .unwrap();
        let x = SignalVector::complex(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)])
            .unwrap();
        let y = phaseless_measure(&a, &x, None).unwrap();
        assert!((y.values()[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mismatches_are_rejected() {
        let a = gaussian_matrix(Field::Real, 3, 2, 0).unwrap();
        let x = SignalVector::real(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(phaseless_measure(&a, &x, None).is_err());
        let z = SignalVector::complex(vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        assert!(phaseless_measure(&a, &z, None).is_err());
    }

    #[test]
    fn noise_budget_contract() {
        assert!(NoiseSpec::budget(-0.1).is_err());
        assert!(NoiseSpec::with_vector(0.1, vec![1.0, 0.0]).is_err());
        let s = NoiseSpec::with_vector(1.0, vec![0.6, 0.8]).unwrap();
        assert_eq!(s.eta(), 1.0);
    }

    #[test]
    fn noisy_observation_keeps_negative_entries() {
        let a = gaussian_matrix(Field::Real, 2, 2, 5).unwrap();
        let x = SignalVector::zero(Field::Real, 2).unwrap();
        let noise = NoiseSpec::with_vector(1.0, vec![-0.5, 0.5]).unwrap();
        let y = phaseless_measure(&a, &x, Some(&noise)).unwrap();
        assert!(y.is_noisy());
        assert_eq!(y.values(), &[-0.5, 0.5]);
    }

    #[test]
    fn exact_observation_rejects_negatives() {
        assert!(PhaselessObservation::exact(vec![1.0, -0.1]).is_err());
    }

    #[test]
    fn adjoint_is_consistent_with_apply() {
        // <A z, r> == <z, A^H r> for random complex data.
        let a = gaussian_matrix(Field::Complex, 6, 4, 9).unwrap();
        let z: Vec<Complex64> = (0..4).map(|i| Complex64::new(i as f64 + 0.5, -(i as f64))).collect();
        let r: Vec<Complex64> = (0..6).map(|i| Complex64::new(1.0 - i as f64, 0.25 * i as f64)).collect();
        let az = a.apply(&z);
        let ahr = a.apply_adjoint(&r);
        let lhs: Complex64 = az.iter().zip(r.iter()).map(|(u, v)| u.conj() * v).sum();
        let rhs: Complex64 = z.iter().zip(ahr.iter()).map(|(u, v)| u.conj() * v).sum();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn op_norm_estimate_matches_scaled_identity() {
        let a = MeasurementEnsemble::from_entries(
            Field::Real,
            2,
            2,
            vec![
                Complex64::new(3.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, 0.0),
            ],
        )
        .unwrap();
        assert!((a.op_norm_estimate() - 3.0).abs() < 1e-9);
    }
}
