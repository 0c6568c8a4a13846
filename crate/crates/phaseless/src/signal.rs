//! Signal vectors over a declared field, phase-invariant distances, and
//! best-k-term approximation errors.
//!
//! Distances identify `x` with `c·x` for every unimodular scalar `c`: both
//! vectors produce identical magnitude measurements, so all recovery errors
//! in this crate are measured modulo a global phase.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{phase, Field};

/// Phase grid resolution for the complex `dist_p` search when `p != 2`.
pub const DEFAULT_PHASE_GRID: usize = 1024;

/// Golden-section refinement stops when the bracketing interval is this wide.
const PHASE_REFINE_WIDTH: f64 = 1e-10;

/// A length-`n` vector over a declared field.
///
/// Entries are stored as complex scalars; real-field vectors carry exactly
/// zero imaginary parts, which IEEE arithmetic preserves through every
/// operation in this crate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SignalVectorRepr", into = "SignalVectorRepr")]
pub struct SignalVector {
    field: Field,
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SignalVectorRepr {
    field: Field,
    re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    im: Option<Vec<f64>>,
}

impl From<SignalVector> for SignalVectorRepr {
    fn from(v: SignalVector) -> Self {
        let re = v.entries.iter().map(|z| z.re).collect();
        let im = match v.field {
            Field::Real => None,
            Field::Complex => Some(v.entries.iter().map(|z| z.im).collect()),
        };
        SignalVectorRepr {
            field: v.field,
            re,
            im,
        }
    }
}

impl TryFrom<SignalVectorRepr> for SignalVector {
    type Error = Error;

    fn try_from(r: SignalVectorRepr) -> Result<Self> {
        match (r.field, r.im) {
            (Field::Real, None) => SignalVector::real(r.re),
            (Field::Real, Some(_)) => Err(Error::invalid(
                "real signal vector must not carry imaginary parts",
            )),
            (Field::Complex, im) => {
                let im = im.unwrap_or_else(|| vec![0.0; r.re.len()]);
                if im.len() != r.re.len() {
                    return Err(Error::invalid(
                        "re/im component lengths differ in signal vector",
                    ));
                }
                let entries = r
                    .re
                    .iter()
                    .zip(im.iter())
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect();
                SignalVector::complex(entries)
            }
        }
    }
}

impl SignalVector {
    /// Build a vector over the given field, checking the field/entry contract.
    pub fn new(field: Field, entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("signal vector must have length >= 1"));
        }
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::invalid(format!(
                    "non-finite entry at index {i} in signal vector"
                )));
            }
            if field == Field::Real && z.im != 0.0 {
                return Err(Error::invalid(format!(
                    "entry {i} has nonzero imaginary part in a real vector"
                )));
            }
        }
        Ok(SignalVector { field, entries })
    }

    /// Real vector from real components.
    pub fn real(entries: Vec<f64>) -> Result<Self> {
        Self::new(
            Field::Real,
            entries.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Complex vector from complex components.
    pub fn complex(entries: Vec<Complex64>) -> Result<Self> {
        Self::new(Field::Complex, entries)
    }

    /// All-zero vector.
    pub fn zero(field: Field, n: usize) -> Result<Self> {
        Self::new(field, vec![Complex64::new(0.0, 0.0); n.max(1)]).and_then(|v| {
            if n == 0 {
                Err(Error::invalid("signal vector must have length >= 1"))
            } else {
                Ok(v)
            }
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// lq (quasi-)norm, `q in (0, 2]`.
    pub fn norm_q(&self, q: f64) -> f64 {
        norm_q(&self.entries, q)
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Sum of `|x_i|^p`; the decoder objective.
    pub fn norm_p_pow(&self, p: f64) -> f64 {
        self.entries.iter().map(|z| z.norm().powf(p)).sum()
    }

    /// Number of entries with magnitude above `tol`.
    pub fn count_nonzero(&self, tol: f64) -> usize {
        self.entries.iter().filter(|z| z.norm() > tol).count()
    }

    /// Scale by a nonnegative real factor.
    pub fn scaled(&self, t: f64) -> SignalVector {
        SignalVector {
            field: self.field,
            entries: self.entries.iter().map(|z| z * t).collect(),
        }
    }

    /// Multiply by a unimodular scalar. Real vectors accept only `c = ±1`.
    pub fn rotated(&self, c: Complex64) -> Result<SignalVector> {
        if (c.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("rotation factor must be unimodular"));
        }
        if self.field == Field::Real && c.im != 0.0 {
            return Err(Error::invalid(
                "real vector can only be rotated by a real sign",
            ));
        }
        SignalVector::new(self.field, self.entries.iter().map(|z| z * c).collect())
    }
}

pub(crate) fn norm_q(entries: &[Complex64], q: f64) -> f64 {
    if q == 2.0 {
        entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    } else if q == 1.0 {
        entries.iter().map(|z| z.norm()).sum()
    } else {
        let s: f64 = entries.iter().map(|z| z.norm().powf(q)).sum();
        if s == 0.0 {
            0.0
        } else {
            s.powf(1.0 / q)
        }
    }
}

fn check_pair(x: &SignalVector, y: &SignalVector) -> Result<()> {
    if x.field != y.field {
        return Err(Error::invalid(format!(
            "field mismatch: {} vs {}",
            x.field, y.field
        )));
    }
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

fn check_p_range(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::invalid(format!("p must lie in (0, 2], got {p}")));
    }
    Ok(())
}

/// `sum_i |x_i - c*y_i|^q` without allocating the difference.
fn diff_pow_sum(x: &[Complex64], y: &[Complex64], c: Complex64, q: f64) -> f64 {
    if q == 2.0 {
        x.iter()
            .zip(y.iter())
            .map(|(a, b)| (a - c * b).norm_sqr())
            .sum()
    } else if q == 1.0 {
        x.iter()
            .zip(y.iter())
            .map(|(a, b)| (a - c * b).norm())
            .sum()
    } else {
        x.iter()
            .zip(y.iter())
            .map(|(a, b)| (a - c * b).norm().powf(q))
            .sum()
    }
}

fn pow_sum_to_norm(s: f64, q: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else if q == 2.0 {
        s.sqrt()
    } else if q == 1.0 {
        s
    } else {
        s.powf(1.0 / q)
    }
}

/// Distance between `x` and `y` modulo a global unimodular phase, in the
/// lp (quasi-)norm for `p in (0, 2]`.
///
/// Real field: exact minimum over `c in {+1, -1}`. Complex field with
/// `p = 2`: exact closed form via the optimal phase of `<y, x>`. Complex
/// field with `p != 2`: grid search over the phase angle plus golden-section
/// refinement; accurate to the grid-and-refinement tolerance.
pub fn dist_p(x: &SignalVector, y: &SignalVector, p: f64) -> Result<f64> {
    dist_p_grid(x, y, p, DEFAULT_PHASE_GRID)
}

/// Euclidean distance modulo global phase.
pub fn dist_2(x: &SignalVector, y: &SignalVector) -> Result<f64> {
    dist_p(x, y, 2.0)
}

/// `dist_p` with an explicit phase-grid resolution (complex, `p != 2` only).
pub fn dist_p_grid(x: &SignalVector, y: &SignalVector, p: f64, grid: usize) -> Result<f64> {
    check_pair(x, y)?;
    check_p_range(p)?;
    if grid < 4 {
        return Err(Error::invalid("phase grid must have at least 4 points"));
    }
    let (xe, ye) = (x.entries(), y.entries());
    match x.field {
        Field::Real => {
            let plus = diff_pow_sum(xe, ye, Complex64::new(1.0, 0.0), p);
            let minus = diff_pow_sum(xe, ye, Complex64::new(-1.0, 0.0), p);
            Ok(pow_sum_to_norm(plus.min(minus), p))
        }
        Field::Complex if p == 2.0 => {
            let inner: Complex64 = ye.iter().zip(xe.iter()).map(|(b, a)| b.conj() * a).sum();
            let c = phase(inner);
            Ok(pow_sum_to_norm(diff_pow_sum(xe, ye, c, 2.0), 2.0))
        }
        Field::Complex => {
            let eval = |theta: f64| {
                diff_pow_sum(xe, ye, Complex64::from_polar(1.0, theta), p)
            };
            let mut best_theta = 0.0;
            let mut best = f64::INFINITY;
            for j in 0..grid {
                let theta = TAU * (j as f64) / (grid as f64);
                let v = eval(theta);
                if v < best {
                    best = v;
                    best_theta = theta;
                }
            }
            // Refine inside the bracket around the best grid point.
            let step = TAU / (grid as f64);
            let (mut a, mut b) = (best_theta - step, best_theta + step);
            let invphi = (5f64.sqrt() - 1.0) / 2.0;
            let mut c = b - (b - a) * invphi;
            let mut d = a + (b - a) * invphi;
            let (mut fc, mut fd) = (eval(c), eval(d));
            while b - a > PHASE_REFINE_WIDTH {
                if fc < fd {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - (b - a) * invphi;
                    fc = eval(c);
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + (b - a) * invphi;
                    fd = eval(d);
                }
                best = best.min(fc.min(fd));
            }
            Ok(pow_sum_to_norm(best, p))
        }
    }
}

/// Best k-term approximation error of `x` in the lq (quasi-)norm: the norm of
/// `x` restricted to the complement of its `k` largest-magnitude entries.
///
/// Equal magnitudes are broken by lowest index so results are deterministic.
/// This equals the phase-invariant minimum over k-sparse vectors because the
/// unimodular factor can be absorbed into the approximant.
pub fn sigma_k(x: &SignalVector, k: usize, q: f64) -> Result<f64> {
    check_p_range(q)?;
    let n = x.len();
    if k > n {
        return Err(Error::invalid(format!(
            "sparsity k = {k} exceeds vector length {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    // Descending magnitude; ties keep the lower index first.
    order.sort_by(|&i, &j| {
        let (mi, mj) = (x.entries[i].norm(), x.entries[j].norm());
        mj.partial_cmp(&mi).unwrap().then(i.cmp(&j))
    });
    let tail: Vec<Complex64> = order[k..].iter().map(|&i| x.entries[i]).collect();
    Ok(norm_q(&tail, q))
}

/// Test-signal families for recovery experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalKind {
    /// Uniformly random size-k support with i.i.d. Gaussian values.
    ExactlySparse,
    /// Sorted magnitudes `j^(-alpha)` with random phases and positions.
    PowerDecay { alpha: f64 },
    /// k dominant entries (magnitude >= 1) plus a flat tail of magnitude
    /// `epsilon` on every remaining coordinate; requires `epsilon < 1`.
    FlatTail { epsilon: f64 },
}

pub(crate) fn gaussian_scalar<R: Rng>(field: Field, rng: &mut R) -> Complex64 {
    match field {
        Field::Real => Complex64::new(rng.sample(StandardNormal), 0.0),
        Field::Complex => {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        }
    }
}

fn unimodular_scalar<R: Rng>(field: Field, rng: &mut R) -> Complex64 {
    match field {
        Field::Real => {
            if rng.random::<bool>() {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        }
        Field::Complex => Complex64::from_polar(1.0, rng.random::<f64>() * TAU),
    }
}

/// Draw a deterministic test signal.
pub fn sample_signal(
    kind: SignalKind,
    n: usize,
    k: usize,
    field: Field,
    seed: u64,
) -> Result<SignalVector> {
    if n == 0 {
        return Err(Error::invalid("signal length must be >= 1"));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "sparsity k = {k} must satisfy 1 <= k <= n = {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = vec![Complex64::new(0.0, 0.0); n];
    match kind {
        SignalKind::ExactlySparse => {
            let support = rand::seq::index::sample(&mut rng, n, k);
            for idx in support.iter() {
                entries[idx] = gaussian_scalar(field, &mut rng);
            }
        }
        SignalKind::PowerDecay { alpha } => {
            if alpha <= 0.0 {
                return Err(Error::invalid(format!(
                    "power-decay exponent must be positive, got {alpha}"
                )));
            }
            let mut positions: Vec<usize> = (0..n).collect();
            use rand::seq::SliceRandom;
            positions.shuffle(&mut rng);
            for (j, &pos) in positions.iter().enumerate() {
                let mag = ((j + 1) as f64).powf(-alpha);
                entries[pos] = unimodular_scalar(field, &mut rng) * mag;
            }
        }
        SignalKind::FlatTail { epsilon } => {
            if !(0.0..1.0).contains(&epsilon) {
                return Err(Error::invalid(format!(
                    "flat-tail magnitude must satisfy 0 <= epsilon < 1, got {epsilon}"
                )));
            }
            let support: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_vec();
            for &idx in &support {
                let g: f64 = rng.sample(StandardNormal);
                let mag = 1.0 + g.abs();
                entries[idx] = unimodular_scalar(field, &mut rng) * mag;
            }
            for idx in 0..n {
                if !support.contains(&idx) {
                    entries[idx] = unimodular_scalar(field, &mut rng) * epsilon;
                }
            }
        }
    }
    SignalVector::new(field, entries)
}
