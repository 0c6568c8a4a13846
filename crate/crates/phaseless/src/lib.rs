//! Compressive phase retrieval toolkit.
//!
//! Recovers (approximately) sparse signals from magnitude-only linear
//! measurements `y = |Ax|` and certifies the pieces the recovery guarantees
//! are made of:
//!
//! * [`signal`] / [`ensemble`] — field-tagged vectors, phase-invariant
//!   distances, best-k-term errors, Gaussian sensing ensembles, and the
//!   magnitude forward map;
//! * [`decode`] — restarted alternating-direction lp decoders plus an exact
//!   sign-enumeration oracle for tiny real instances;
//! * [`bilipschitz`] — Monte Carlo bounds on the magnitude map's lower/upper
//!   Lipschitz constants over sparse sets;
//! * [`bounds`] — closed-form instance-optimality constants and bound checks
//!   for decoder output;
//! * [`experiment`] — seeded, reproducible campaigns with JSON/CSV reports.
//!
//! Everything is deterministic given the seeds in the inputs; campaigns
//! parallelize across trials without affecting any output byte.

pub mod bilipschitz;
pub mod bounds;
pub mod container;
pub mod decode;
pub mod ensemble;
pub mod error;
pub mod experiment;
pub mod field;
pub mod signal;

pub use bilipschitz::{
    beta0, check_separation, estimate_bilipschitz, lipschitz_ratio, BiLipschitzEstimate,
    SeparationReport,
};
pub use bounds::{
    check_instance_bound, gaussian_r_margin, instance_constants, r_margin, BoundCheck,
    BoundConstants, NormPair,
};
pub use decode::{
    decode, decode_l1, decode_lp, multi_restart, oracle_decode_real, DecodeResult, DecoderConfig,
    DecoderKind,
};
pub use ensemble::{
    gaussian_matrix, phaseless_measure, MeasurementEnsemble, NoiseSpec, PhaselessObservation,
};
pub use error::{Error, Result};
pub use experiment::{
    load_report, persist_report, run_noise_sweep, run_nonuniform_campaign, run_nullspace_probe,
    run_uniform_campaign, BoundMode, CampaignPayload, CampaignReport, ExperimentConfig,
    NoiseSweepConfig, NonuniformConfig, NullspaceProbeConfig, TrialRecord,
};
pub use field::{derive_seed, Field};
pub use signal::{dist_2, dist_p, sample_signal, sigma_k, SignalKind, SignalVector};
