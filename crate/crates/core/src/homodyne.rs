//! Monte Carlo simulation of the homodyne verification experiment: draw
//! quadrature outcomes for an ensemble of identically prepared Gaussian
//! states, form the electronic linear combinations, estimate total variances
//! with standard errors, and issue statistical verdicts against the
//! separability bounds.
//!
//! Sampling is chunked: chunk `i` draws from an independent ChaCha12 stream
//! derived from the single seed (`set_stream(i)`), and the chunk size is a
//! fixed constant, so the result is a pure function of (state, config) —
//! identical across thread counts and with the `parallel` feature on or off.
//! Statistics are merged in chunk order for the same reason.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde_json::json;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::criteria::{
    fully_separable_bound, genuine_threshold, partition_bound, QuadCombination, MAX_CERTIFY_MODES,
};
use crate::gaussian::{p_index, x_index, CovarianceMatrix, PHYSICALITY_TOL};
use crate::linalg::{cholesky, Mat};
use crate::partition::{bipartitions, ModePartition};
use crate::Error;

/// Identifier of the sampling RNG, recorded in every report.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Samples per RNG stream. Fixed so that the chunk decomposition depends
/// only on `n_samples`, never on the worker count.
const CHUNK_SAMPLES: usize = 8192;

/// Half-width of the decision interval, in standard errors.
pub const SIGMA_RULE: f64 = 3.0;

/// Measurement-run configuration.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EnsembleConfig {
    n_samples: usize,
    seed: u64,
    detector_noise: f64,
}

impl EnsembleConfig {
    /// `n_samples ≥ 2`; `detector_noise` is an added variance per quadrature
    /// (0 = ideal detection).
    pub fn new(n_samples: usize, seed: u64, detector_noise: f64) -> Result<Self, Error> {
        if n_samples < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least 2 samples to form a variance, got {n_samples}"
            )));
        }
        if !detector_noise.is_finite() || detector_noise < 0.0 {
            return Err(Error::InvalidParams(format!(
                "detector noise must be finite and nonnegative, got {detector_noise}"
            )));
        }
        Ok(EnsembleConfig {
            n_samples,
            seed,
            detector_noise,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn detector_noise(&self) -> f64 {
        self.detector_noise
    }
}

/// Homodyne outcomes: one row of 2N quadrature values (x₁, p₁, …, x_N, p_N)
/// per ensemble member.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMatrix {
    n_samples: usize,
    n_modes: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = 2 * self.n_modes;
        &self.data[i * w..(i + 1) * w]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

fn sampling_factor(v: &CovarianceMatrix, cfg: &EnsembleConfig) -> Result<Mat, Error> {
    if !v.is_physical(PHYSICALITY_TOL) {
        let min = v.min_symplectic_eigenvalue().unwrap_or(f64::NAN);
        return Err(Error::Unphysical {
            min_symplectic_eigenvalue: min,
        });
    }
    cholesky(&v.matrix().add_scaled_identity(cfg.detector_noise()))
}

fn fill_chunk(chunk_index: usize, out: &mut [f64], factor: &Mat, seed: u64, scratch_len: usize) {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index as u64);
    let mut xi = vec![0.0; scratch_len];
    for row in out.chunks_exact_mut(scratch_len) {
        for x in xi.iter_mut() {
            *x = rng.sample(StandardNormal);
        }
        for (i, slot) in row.iter_mut().enumerate() {
            let lrow = factor.row(i);
            let mut z = 0.0;
            for j in 0..=i {
                z += lrow[j] * xi[j];
            }
            *slot = z;
        }
    }
}

/// Draw `cfg.n_samples` independent outcomes z = L·ξ with
/// L·Lᵀ = V + detector_noise·I and ξ standard normal. Deterministic given
/// the seed; chunks run in parallel with the `parallel` feature.
pub fn sample_quadratures(
    v: &CovarianceMatrix,
    cfg: &EnsembleConfig,
) -> Result<SampleMatrix, Error> {
    let factor = sampling_factor(v, cfg)?;
    let width = v.dim();
    let mut data = vec![0.0; cfg.n_samples() * width];
    let seed = cfg.seed();
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(CHUNK_SAMPLES * width)
        .enumerate()
        .for_each(|(i, chunk)| fill_chunk(i, chunk, &factor, seed, width));
    #[cfg(not(feature = "parallel"))]
    for (i, chunk) in data.chunks_mut(CHUNK_SAMPLES * width).enumerate() {
        fill_chunk(i, chunk, &factor, seed, width);
    }
    Ok(SampleMatrix {
        n_samples: cfg.n_samples(),
        n_modes: v.n_modes(),
        data,
    })
}

/// Single-threaded reference version of [`sample_quadratures`]; produces
/// bitwise-identical output.
pub fn sample_quadratures_seq(
    v: &CovarianceMatrix,
    cfg: &EnsembleConfig,
) -> Result<SampleMatrix, Error> {
    let factor = sampling_factor(v, cfg)?;
    let width = v.dim();
    let mut data = vec![0.0; cfg.n_samples() * width];
    for (i, chunk) in data.chunks_mut(CHUNK_SAMPLES * width).enumerate() {
        fill_chunk(i, chunk, &factor, cfg.seed(), width);
    }
    Ok(SampleMatrix {
        n_samples: cfg.n_samples(),
        n_modes: v.n_modes(),
        data,
    })
}

/// Outcome of comparing an estimated total variance against a bound under
/// the 3σ rule.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum StatVerdict {
    /// estimate + 3σ below the bound: the bound is violated.
    Violated,
    /// estimate − 3σ above the bound: consistent with the bound.
    Consistent,
    /// The interval straddles the bound: not enough data.
    Inconclusive,
}

impl StatVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            StatVerdict::Violated => "violated",
            StatVerdict::Consistent => "consistent",
            StatVerdict::Inconclusive => "inconclusive",
        }
    }

    fn decide(estimate: f64, std_error: f64, bound: f64) -> Self {
        if estimate + SIGMA_RULE * std_error < bound {
            StatVerdict::Violated
        } else if estimate - SIGMA_RULE * std_error > bound {
            StatVerdict::Consistent
        } else {
            StatVerdict::Inconclusive
        }
    }
}

/// An estimated total variance with its standard error and verdict.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct EstimatedVerdict {
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    pub sigmas_below_bound: f64,
    pub verdict: StatVerdict,
}

#[derive(Copy, Clone, Default)]
struct Accum {
    su: f64,
    sv: f64,
    suu: f64,
    svv: f64,
    suv: f64,
}

impl Accum {
    fn add(mut self, other: Accum) -> Accum {
        self.su += other.su;
        self.sv += other.sv;
        self.suu += other.suu;
        self.svv += other.svv;
        self.suv += other.suv;
        self
    }
}

/// Nonzero coefficients of a combination, as (column, weight) pairs into a
/// sample row.
type ColumnWeights = Vec<(usize, f64)>;

fn chunk_accum(
    rows: &[f64],
    width: usize,
    u_terms: &[(usize, f64)],
    v_terms: &[(usize, f64)],
) -> Accum {
    let mut acc = Accum::default();
    for row in rows.chunks_exact(width) {
        let u: f64 = u_terms.iter().map(|&(i, c)| c * row[i]).sum();
        let v: f64 = v_terms.iter().map(|&(i, c)| c * row[i]).sum();
        acc.su += u;
        acc.sv += v;
        acc.suu += u * u;
        acc.svv += v * v;
        acc.suv += u * v;
    }
    acc
}

fn combination_terms(c: &QuadCombination) -> (ColumnWeights, ColumnWeights) {
    let u_terms = c
        .h()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(m, &v)| (x_index(m + 1), v))
        .collect();
    let v_terms = c
        .g()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(m, &v)| (p_index(m + 1), v))
        .collect();
    (u_terms, v_terms)
}

fn finalize(acc: Accum, n: usize, bound: f64) -> EstimatedVerdict {
    let nf = n as f64;
    let mean_u = acc.su / nf;
    let mean_v = acc.sv / nf;
    let denom = nf - 1.0;
    let s2u = ((acc.suu - nf * mean_u * mean_u) / denom).max(0.0);
    let s2v = ((acc.svv - nf * mean_v * mean_v) / denom).max(0.0);
    let cuv = (acc.suv - nf * mean_u * mean_v) / denom;
    let estimate = s2u + s2v;
    // exact sampling variance of s²_u + s²_v for jointly Gaussian (u, v)
    let std_error = ((2.0 * s2u * s2u + 2.0 * s2v * s2v + 4.0 * cuv * cuv) / denom).sqrt();
    EstimatedVerdict {
        estimate,
        std_error,
        bound,
        sigmas_below_bound: (bound - estimate) / std_error,
        verdict: StatVerdict::decide(estimate, std_error, bound),
    }
}

fn accumulate(samples: &SampleMatrix, c: &QuadCombination) -> Result<Accum, Error> {
    if samples.n_modes() != c.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: samples.n_modes(),
            found: c.n_modes(),
        });
    }
    let width = 2 * samples.n_modes();
    let (u_terms, v_terms) = combination_terms(c);
    #[cfg(feature = "parallel")]
    let parts: Vec<Accum> = samples
        .data
        .par_chunks(CHUNK_SAMPLES * width)
        .map(|rows| chunk_accum(rows, width, &u_terms, &v_terms))
        .collect();
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Accum> = samples
        .data
        .chunks(CHUNK_SAMPLES * width)
        .map(|rows| chunk_accum(rows, width, &u_terms, &v_terms))
        .collect();
    // chunk-ordered merge keeps the result independent of the thread count
    Ok(parts.into_iter().fold(Accum::default(), Accum::add))
}

fn accumulate_seq(samples: &SampleMatrix, c: &QuadCombination) -> Result<Accum, Error> {
    if samples.n_modes() != c.n_modes() {
        return Err(Error::DimensionMismatch {
            expected: samples.n_modes(),
            found: c.n_modes(),
        });
    }
    let width = 2 * samples.n_modes();
    let (u_terms, v_terms) = combination_terms(c);
    Ok(samples
        .data
        .chunks(CHUNK_SAMPLES * width)
        .map(|rows| chunk_accum(rows, width, &u_terms, &v_terms))
        .fold(Accum::default(), Accum::add))
}

/// Estimate a condition's total variance from an existing sample set and
/// judge it against an explicit bound.
pub fn estimate_from_samples(
    samples: &SampleMatrix,
    c: &QuadCombination,
    bound: f64,
) -> Result<EstimatedVerdict, Error> {
    Ok(finalize(
        accumulate(samples, c)?,
        samples.n_samples(),
        bound,
    ))
}

/// Single-threaded reference version of [`estimate_from_samples`]; produces
/// bitwise-identical output.
pub fn estimate_from_samples_seq(
    samples: &SampleMatrix,
    c: &QuadCombination,
    bound: f64,
) -> Result<EstimatedVerdict, Error> {
    Ok(finalize(
        accumulate_seq(samples, c)?,
        samples.n_samples(),
        bound,
    ))
}

/// Sample the state and estimate one condition against its
/// [`genuine_threshold`].
pub fn estimate_condition(
    v: &CovarianceMatrix,
    c: &QuadCombination,
    cfg: &EnsembleConfig,
) -> Result<EstimatedVerdict, Error> {
    let bound = genuine_threshold(c)?;
    estimate_condition_with_bound(v, c, cfg, bound)
}

/// Sample the state and estimate one condition against an explicit bound.
pub fn estimate_condition_with_bound(
    v: &CovarianceMatrix,
    c: &QuadCombination,
    cfg: &EnsembleConfig,
    bound: f64,
) -> Result<EstimatedVerdict, Error> {
    let samples = sample_quadratures(v, cfg)?;
    estimate_from_samples(&samples, c, bound)
}

/// One condition's estimate inside a verification report. The reported bound
/// is the fully separable bound, the largest any partition can hold against
/// this condition.
#[derive(Clone, Debug)]
pub struct ConditionEstimate {
    pub combination: QuadCombination,
    pub verdict: EstimatedVerdict,
}

/// Statistical certification outcome for a condition set on one shared
/// sample ensemble.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub seed: u64,
    pub n_samples: usize,
    pub detector_noise: f64,
    pub rng_algorithm: &'static str,
    pub conditions: Vec<ConditionEstimate>,
    pub excluded: Vec<ModePartition>,
    pub surviving: Vec<ModePartition>,
    pub genuine: bool,
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "seed": self.seed,
            "n_samples": self.n_samples,
            "detector_noise": self.detector_noise,
            "rng": self.rng_algorithm,
            "conditions": self.conditions.iter().map(|c| json!({
                "h": c.combination.h(),
                "g": c.combination.g(),
                "estimate": c.verdict.estimate,
                "std_error": c.verdict.std_error,
                "bound": c.verdict.bound,
                "sigmas_below_bound": c.verdict.sigmas_below_bound,
                "verdict": c.verdict.verdict.as_str(),
            })).collect::<Vec<_>>(),
            "excluded": self.excluded.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "surviving": self.surviving.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "genuine": self.genuine,
        })
    }
}

/// Run the verification experiment: one shared sample ensemble, every
/// condition estimated from it, and a bipartition excluded only when some
/// condition's estimate is a statistically significant violation
/// (estimate + 3σ below that bipartition's own bound). Genuine multipartite
/// entanglement is claimed iff every bipartition is excluded.
pub fn run_verification(
    v: &CovarianceMatrix,
    conditions: &[QuadCombination],
    cfg: &EnsembleConfig,
) -> Result<VerificationReport, Error> {
    if conditions.is_empty() {
        return Err(Error::EmptyConditions);
    }
    let n = v.n_modes();
    if n > MAX_CERTIFY_MODES {
        return Err(Error::TooManyModes {
            n_modes: n,
            max: MAX_CERTIFY_MODES,
        });
    }
    if n < 2 {
        return Err(Error::InvalidCombination(
            "certification needs at least 2 modes".into(),
        ));
    }
    let samples = sample_quadratures(v, cfg)?;
    let estimates: Vec<ConditionEstimate> = conditions
        .iter()
        .map(|c| {
            estimate_from_samples(&samples, c, fully_separable_bound(c)).map(|verdict| {
                ConditionEstimate {
                    combination: c.clone(),
                    verdict,
                }
            })
        })
        .collect::<Result<_, _>>()?;

    let mut excluded = Vec::new();
    let mut surviving = Vec::new();
    for p in bipartitions(n) {
        let ruled_out = estimates.iter().any(|e| {
            let b = partition_bound(&e.combination, &p);
            e.verdict.estimate + SIGMA_RULE * e.verdict.std_error < b
        });
        if ruled_out {
            excluded.push(p);
        } else {
            surviving.push(p);
        }
    }
    let genuine = surviving.is_empty();
    Ok(VerificationReport {
        seed: cfg.seed(),
        n_samples: cfg.n_samples(),
        detector_noise: cfg.detector_noise(),
        rng_algorithm: RNG_ALGORITHM,
        conditions: estimates,
        excluded,
        surviving,
        genuine,
    })
}
