use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Scalar field a vector or matrix lives over.
///
/// Every value in this crate carries exactly one field tag; operations reject
/// mixed-field inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Unimodular phase of `v`, with `phase(0) := 1` so the map is total and
/// deterministic. For real-valued scalars this reduces to the sign.
pub(crate) fn phase(v: Complex64) -> Complex64 {
    let r = v.norm();
    if r == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        v / r
    }
}

/// SplitMix64 step; used to derive independent sub-seeds from a master seed.
///
/// Restarts, trials, and probe families each get `derive_seed(seed, stream)`
/// so parallel execution order cannot change any result.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15u64.wrapping_mul(stream.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
