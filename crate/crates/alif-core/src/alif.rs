//! The decomposition engine: sifting inner loop and IMF extraction outer
//! loop.
//!
//! One sifting step subtracts the windowed moving average from the current
//! iterate, `g <- (I - K) g`; the inner loop repeats until the step stops
//! moving (an IMF has been isolated), and the outer loop peels IMFs off the
//! remainder until it is a trend (fewer than two strict extrema). The window
//! widths — and with them the matrix `K` — are rebuilt from the remainder at
//! every outer iteration.

use alloc::vec::Vec;
use core::fmt;

use crate::filters::{
    strict_extrema_indices, Filter, FilterError, LengthFunction, ValidationReport,
};
use crate::fmath;
use crate::matrices::{self, IterationMatrix, MatrixError};

#[derive(Clone, Debug)]
pub enum AlifError {
    /// Signals need at least 3 samples (extrema require interior points).
    SignalTooShort,
    /// Matrix size does not match the signal length.
    SizeMismatch,
    /// The filter failed structural validation (evenness, nonnegativity,
    /// support containment); the report carries the measured defects.
    InvalidFilter(ValidationReport),
    Length(FilterError),
    Matrix(MatrixError),
}

impl fmt::Display for AlifError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlifError::SignalTooShort => f.write_str("signal needs at least 3 samples"),
            AlifError::SizeMismatch => f.write_str("matrix size does not match signal length"),
            AlifError::InvalidFilter(r) => write!(
                f,
                "filter failed validation (even: {}, nonnegative: {}, supported: {})",
                r.even, r.nonnegative, r.supported
            ),
            AlifError::Length(e) => write!(f, "length strategy: {e}"),
            AlifError::Matrix(e) => write!(f, "matrix build: {e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for AlifError {}

impl From<FilterError> for AlifError {
    fn from(e: FilterError) -> Self {
        AlifError::Length(e)
    }
}

impl From<MatrixError> for AlifError {
    fn from(e: MatrixError) -> Self {
        AlifError::Matrix(e)
    }
}

/// A sampled signal on the implicit grid `x_i = i/(n-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
}

impl Signal {
    pub fn new(samples: Vec<f64>) -> Result<Signal, AlifError> {
        if samples.len() < 3 {
            return Err(AlifError::SignalTooShort);
        }
        Ok(Signal { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of strict interior extrema.
    pub fn count_extrema(&self) -> usize {
        strict_extrema_indices(&self.samples).len()
    }
}

/// Inner-loop configuration. Neither the stopping norm nor the caps are
/// pinned by the method; these defaults are configuration, not doctrine.
#[derive(Clone, Copy, Debug)]
pub struct SiftingConfig {
    /// Relative stopping tolerance: stop once
    /// `||g_{m+1} - g_m|| <= delta ||g_m||`.
    pub delta: f64,
    /// Inner-iteration cap.
    pub max_inner: usize,
    /// Declare divergence once `||g_m|| > divergence_factor ||g_1||`.
    pub divergence_factor: f64,
    /// Outer-loop cap on the number of extracted IMFs.
    pub max_imfs: usize,
}

impl Default for SiftingConfig {
    fn default() -> Self {
        SiftingConfig {
            delta: 1e-3,
            max_inner: 200,
            divergence_factor: 1e8,
            max_imfs: 32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiftStatus {
    Converged,
    IterationCap,
    Diverged,
}

#[derive(Clone, Copy, Debug)]
pub struct SiftTelemetry {
    /// Applications of `(I - K)` performed.
    pub iterations: usize,
    /// `||g_{m+1} - g_m|| / ||g_m||` at the final step.
    pub final_relative_change: f64,
    pub status: SiftStatus,
    pub initial_norm: f64,
    pub final_norm: f64,
}

fn norm2(v: &[f64]) -> f64 {
    fmath::sqrt(v.iter().map(|x| x * x).sum())
}

/// The windowed moving average `K s` (the zero extension of the signal is
/// already baked into the finite band of `K`).
pub fn moving_average(samples: &[f64], k: &IterationMatrix) -> Result<Vec<f64>, AlifError> {
    if samples.len() != k.n() {
        return Err(AlifError::SizeMismatch);
    }
    Ok(k.apply(samples).expect("sizes checked"))
}

/// One extracted IMF plus its convergence telemetry.
#[derive(Clone, Debug)]
pub struct Sift {
    pub imf: Vec<f64>,
    pub telemetry: SiftTelemetry,
}

/// Run the inner loop `g <- (I - K) g` to isolate one IMF.
///
/// Stops as converged when the relative change drops below `delta` (or the
/// iterate hits exactly zero — the fixed point reached in one step when
/// `K = I`), as diverged when the iterate norm exceeds
/// `divergence_factor` times the starting norm, and as capped at
/// `max_inner` applications. The last iterate is returned in all cases.
pub fn sift(samples: &[f64], k: &IterationMatrix, cfg: &SiftingConfig) -> Result<Sift, AlifError> {
    if samples.len() != k.n() {
        return Err(AlifError::SizeMismatch);
    }
    let initial_norm = norm2(samples);
    let mut g = samples.to_vec();
    let mut iterations = 0usize;
    let mut final_relative_change;
    let status;

    loop {
        let average = k.apply(&g).expect("sizes checked");
        let next: Vec<f64> = g.iter().zip(average.iter()).map(|(a, b)| a - b).collect();
        iterations += 1;

        let g_norm = norm2(&g);
        let change = norm2(&average); // ||g_{m+1} - g_m|| = ||K g_m||
        let next_norm = norm2(&next);
        final_relative_change = if g_norm > 0.0 { change / g_norm } else { 0.0 };

        if next_norm == 0.0 || change <= cfg.delta * g_norm {
            g = next;
            status = SiftStatus::Converged;
            break;
        }
        if next_norm > cfg.divergence_factor * initial_norm {
            g = next;
            status = SiftStatus::Diverged;
            break;
        }
        g = next;
        if iterations >= cfg.max_inner {
            status = SiftStatus::IterationCap;
            break;
        }
    }

    let final_norm = norm2(&g);
    Ok(Sift {
        imf: g,
        telemetry: SiftTelemetry {
            iterations,
            final_relative_change,
            status,
            initial_norm,
            final_norm,
        },
    })
}

/// How the window widths are chosen per outer iteration.
#[derive(Clone, Debug)]
pub enum LengthStrategy {
    /// The same length function for every IMF.
    Fixed(LengthFunction),
    /// Rebuild from the remainder's extrema spacing each outer iteration.
    ExtremaBased { multiplier: f64 },
}

impl LengthStrategy {
    fn length_for(&self, remainder: &[f64]) -> Result<LengthFunction, AlifError> {
        match self {
            LengthStrategy::Fixed(l) => Ok(l.clone()),
            LengthStrategy::ExtremaBased { multiplier } => {
                Ok(LengthFunction::from_signal_extrema(remainder, *multiplier)?)
            }
        }
    }
}

/// Why the outer loop stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionStatus {
    /// The remainder has fewer than two strict extrema.
    TrendReached,
    MaxImfs,
    /// A sift diverged; the diverged iterate is discarded and the result
    /// carries the partial output.
    Diverged,
    /// A sift produced a numerically-zero IMF, so the remainder can never
    /// change (the degenerate `K = I` picture); stopping is the only exit.
    Stagnant,
}

/// Decomposition output. The telescoping identity holds whatever the exit
/// path: extracted IMFs plus the trend reproduce the input.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub imfs: Vec<Vec<f64>>,
    pub trend: Vec<f64>,
    /// One entry per sift attempt, including a final diverged or stagnant
    /// attempt whose iterate was discarded.
    pub telemetry: Vec<SiftTelemetry>,
    pub status: DecompositionStatus,
}

/// Guard against the degenerate fixed-point case: an IMF this small (relative
/// to the remainder) cannot change the extrema count, ever.
const STAGNATION_RTOL: f64 = 1e-12;

/// Full outer loop: repeatedly build window widths from the remainder, build
/// `K`, sift one IMF, subtract, and stop when the remainder is a trend.
pub fn decompose(
    signal: &Signal,
    filter: &Filter,
    strategy: &LengthStrategy,
    cfg: &SiftingConfig,
) -> Result<DecompositionResult, AlifError> {
    let report = filter.validate(1e-9);
    if !report.is_structurally_valid() {
        return Err(AlifError::InvalidFilter(report));
    }

    let n = signal.len();
    let mut remainder = signal.samples().to_vec();
    let mut imfs: Vec<Vec<f64>> = Vec::new();
    let mut telemetry: Vec<SiftTelemetry> = Vec::new();

    let status = loop {
        if strict_extrema_indices(&remainder).len() < 2 {
            break DecompositionStatus::TrendReached;
        }
        if imfs.len() >= cfg.max_imfs {
            break DecompositionStatus::MaxImfs;
        }

        let length = strategy.length_for(&remainder)?;
        let k = matrices::build_k(filter, &length, n)?;
        let sifted = sift(&remainder, &k, cfg)?;
        telemetry.push(sifted.telemetry);

        if sifted.telemetry.status == SiftStatus::Diverged {
            break DecompositionStatus::Diverged;
        }
        if sifted.telemetry.final_norm <= STAGNATION_RTOL * norm2(&remainder) {
            break DecompositionStatus::Stagnant;
        }

        for (r, v) in remainder.iter_mut().zip(sifted.imf.iter()) {
            *r -= v;
        }
        imfs.push(sifted.imf);
    };

    Ok(DecompositionResult {
        imfs,
        trend: remainder,
        telemetry,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use alloc::vec;

    fn identity_k(n: usize) -> IterationMatrix {
        matrices::build_k(
            &Filter::uniform(),
            &LengthFunction::constant(1.0).unwrap(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn extrema_counting() {
        assert_eq!(Signal::new(vec![0.0, 1.0, 0.0]).unwrap().count_extrema(), 1);
        assert_eq!(
            Signal::new(vec![0.0, 1.0, 2.0, 3.0])
                .unwrap()
                .count_extrema(),
            0
        );
        // Plateaus fail the strict inequalities.
        assert_eq!(
            Signal::new(vec![0.0, 1.0, 1.0, 0.0])
                .unwrap()
                .count_extrema(),
            0
        );
        assert!(matches!(
            Signal::new(vec![0.0, 1.0]),
            Err(AlifError::SignalTooShort)
        ));
    }

    #[test]
    fn moving_average_identity_and_zero() {
        let k = identity_k(4);
        let s = [1.0, -2.0, 3.0, 0.5];
        assert_eq!(moving_average(&s, &k).unwrap(), s.to_vec());
        let z = [0.0; 4];
        assert_eq!(moving_average(&z, &k).unwrap(), z.to_vec());
        assert!(matches!(
            moving_average(&[1.0, 2.0], &k),
            Err(AlifError::SizeMismatch)
        ));
    }

    #[test]
    fn sift_with_identity_matrix_converges_in_one_step() {
        let k = identity_k(5);
        let s = [0.0, 1.0, -1.0, 1.0, 0.0];
        let out = sift(&s, &k, &SiftingConfig::default()).unwrap();
        assert_eq!(out.telemetry.status, SiftStatus::Converged);
        assert_eq!(out.telemetry.iterations, 1);
        assert!(out.imf.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_sift_step_is_exactly_linear() {
        let f = Filter::triangular();
        let l = LengthFunction::constant(3.0).unwrap();
        let k = matrices::build_k(&f, &l, 16).unwrap();
        let mut rng = SplitMix64::new(3);
        let s = rng.signal(16);
        let cfg = SiftingConfig {
            max_inner: 1,
            ..SiftingConfig::default()
        };
        let out = sift(&s, &k, &cfg).unwrap();
        let ks = k.mat.matvec(&s).unwrap();
        for i in 0..16 {
            let expect = s[i] - ks[i];
            assert!((out.imf[i] - expect).abs() <= 1e-15);
        }
    }

    #[test]
    fn decompose_monotone_signal_is_pure_trend() {
        let signal = Signal::new((0..32).map(|i| i as f64).collect()).unwrap();
        let out = decompose(
            &signal,
            &Filter::triangular(),
            &LengthStrategy::ExtremaBased { multiplier: 1.0 },
            &SiftingConfig::default(),
        )
        .unwrap();
        assert_eq!(out.status, DecompositionStatus::TrendReached);
        assert!(out.imfs.is_empty());
        assert_eq!(out.trend, signal.samples());
    }

    #[test]
    fn decompose_degenerate_identity_matrix_stagnates() {
        // Unit window: K = I, every sift returns the zero IMF and the
        // remainder (and its extrema count) can never change.
        let mut rng = SplitMix64::new(42);
        let signal = Signal::new(rng.signal(64)).unwrap();
        let out = decompose(
            &signal,
            &Filter::uniform(),
            &LengthStrategy::Fixed(LengthFunction::constant(1.0).unwrap()),
            &SiftingConfig::default(),
        )
        .unwrap();
        assert_eq!(out.status, DecompositionStatus::Stagnant);
        assert!(out.imfs.is_empty());
        assert_eq!(out.trend, signal.samples());
        assert_eq!(out.telemetry.len(), 1);
        assert_eq!(out.telemetry[0].status, SiftStatus::Converged);
    }

    #[test]
    fn decompose_reconstructs_input() {
        let mut rng = SplitMix64::new(321);
        for _ in 0..3 {
            let samples = rng.signal(128);
            let signal = Signal::new(samples.clone()).unwrap();
            let out = decompose(
                &signal,
                &Filter::triangular(),
                &LengthStrategy::ExtremaBased { multiplier: 2.0 },
                &SiftingConfig::default(),
            )
            .unwrap();
            let mut recon = out.trend.clone();
            for imf in &out.imfs {
                for (r, v) in recon.iter_mut().zip(imf.iter()) {
                    *r += v;
                }
            }
            let err: f64 = recon
                .iter()
                .zip(samples.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale = norm2(&samples);
            assert!(err <= 1e-8 * scale, "reconstruction error {err}");
            // At a trend exit the remainder has fewer than 2 extrema.
            if out.status == DecompositionStatus::TrendReached {
                assert!(strict_extrema_indices(&out.trend).len() < 2);
            }
        }
    }

    #[test]
    fn invalid_filter_is_rejected() {
        // An odd (hence invalid) custom kernel.
        let f = Filter::custom(alloc::sync::Arc::new(|y: f64| {
            if (0.0..1.0).contains(&y) {
                1.0
            } else {
                0.0
            }
        }))
        .unwrap();
        let signal = Signal::new(vec![0.0, 1.0, 0.0, 1.0, 0.0]).unwrap();
        let err = decompose(
            &signal,
            &f,
            &LengthStrategy::Fixed(LengthFunction::constant(2.0).unwrap()),
            &SiftingConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, AlifError::InvalidFilter(_)));
    }
}
