//! Singular-value gap criterion and numerical dominated splittings.
//!
//! A cocycle has a dominated splitting of index `k` iff
//! `σ_{k+1}(A^n(x)) / σ_k(A^n(x)) ≤ C τ^n` for some `C > 0`, `τ < 1` and
//! all `x`, `n`. [`domination_test`] gathers that ratio over a finite orbit
//! sample and fits `(C, τ)`; the result is empirical evidence, never a proof.
//! [`construct_splitting`] builds `E ⊕ F` from singular subspaces of long
//! forward and backward products.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::cocycle::{ExteriorTower, FiniteRangeCocycle};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::sample::{sample_orbits, SampleSpec};
use crate::sft::{ShiftSpace, SymbolSource};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominationOptions {
    /// Dominated requires the fitted `τ < 1 − margin`.
    pub margin: f64,
    /// Fitted `C` and `τ` are both inflated by this factor before the
    /// envelope check.
    pub inflation: f64,
    /// [`construct_splitting`] refuses when `σ_k/σ_{k+1}` is below this.
    pub min_gap: f64,
}

impl Default for DominationOptions {
    fn default() -> Self {
        Self { margin: 0.01, inflation: 1.05, min_gap: 10.0 }
    }
}

/// `g_n = σ_{k+1}(A^n)/σ_k(A^n)` for `n = 1..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSeries {
    pub k: usize,
    pub log_ratios: Vec<f64>,
}

impl GapSeries {
    pub fn ratios(&self) -> Vec<f64> {
        self.log_ratios.iter().map(|l| l.exp()).collect()
    }
}

/// Gap series along `source` starting at `start`, computed on log scale from
/// exterior powers: `log σ_k = log‖Λ^k A^n‖ − log‖Λ^{k−1} A^n‖`.
pub fn gap_series<S: SymbolSource + ?Sized>(
    tower: &ExteriorTower,
    source: &S,
    k: usize,
    steps: usize,
    start: isize,
) -> Result<GapSeries> {
    let d = tower.dimension();
    if k == 0 || k >= d {
        return Err(Error::InvalidParameter(format!("index k = {k} must satisfy 1 <= k < {d}")));
    }
    let upper = tower.log_volume_growth(source, k + 1, steps, start)?;
    let middle = tower.log_volume_growth(source, k, steps, start)?;
    let lower = if k > 1 {
        tower.log_volume_growth(source, k - 1, steps, start)?
    } else {
        vec![0.0; steps]
    };
    let log_ratios = (0..steps).map(|n| upper[n] - 2.0 * middle[n] + lower[n]).collect();
    Ok(GapSeries { k, log_ratios })
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 2 {
        return Err(Error::InsufficientSamples(format!(
            "a line fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientSamples("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LineFit { slope, intercept, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Dominated,
    NotDominated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub max_period: usize,
    pub periodic_orbits: usize,
    pub random_windows: usize,
    pub seed: u64,
    pub orbit_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominationCertificate {
    pub k: usize,
    pub depth: usize,
    pub verdict: Verdict,
    /// Fitted decay rate.
    pub tau: f64,
    /// Smallest `C` with `g_n ≤ C τ^n` for every observed `n`.
    pub c: f64,
    /// Intercept of the fit, `exp(intercept)`.
    pub c_fit: f64,
    pub fit_residual: f64,
    /// Inclusive range of `n` used by the fit.
    pub fit_range: (usize, usize),
    pub options: DominationOptions,
    /// Worst `log g_n` over the sample, `n = 1..=depth`.
    pub log_max_gap: Vec<f64>,
    /// Index into `samples.orbit_labels` of the orbit attaining each maximum.
    pub worst_orbit: Vec<usize>,
    pub samples: SampleSummary,
    /// Always true: a finite sample is evidence, not proof.
    pub empirical: bool,
}

impl DominationCertificate {
    pub fn max_gap(&self) -> Vec<f64> {
        self.log_max_gap.iter().map(|l| l.exp()).collect()
    }
}

/// Run the gap criterion for index `k` on the orbits of `sample`, with
/// products of length `1..=depth`.
pub fn domination_test(
    cocycle: &FiniteRangeCocycle,
    shift: &ShiftSpace,
    k: usize,
    depth: usize,
    sample: &SampleSpec,
    options: &DominationOptions,
) -> Result<DominationCertificate> {
    if depth < 2 {
        return Err(Error::InsufficientSamples(format!("depth {depth} is too short to fit a decay rate")));
    }
    let tower = ExteriorTower::new(cocycle)?;
    let margin = depth + cocycle.range();
    let orbits = sample_orbits(shift, sample, margin, margin)?;
    let series = orbits
        .par_iter()
        .map(|o| gap_series(&tower, o, k, depth, 0))
        .collect::<Result<Vec<_>>>()?;

    let mut log_max_gap = vec![f64::NEG_INFINITY; depth];
    let mut worst_orbit = vec![0; depth];
    for (idx, s) in series.iter().enumerate() {
        for (n, &v) in s.log_ratios.iter().enumerate() {
            if v > log_max_gap[n] {
                log_max_gap[n] = v;
                worst_orbit[n] = idx;
            }
        }
    }

    let first = depth.div_ceil(2).max(1);
    let points: Vec<(f64, f64)> = (first..=depth).map(|n| (n as f64, log_max_gap[n - 1])).collect();
    let fit = fit_line(&points)?;
    let tau = fit.slope.exp();
    let log_inflation = options.inflation.ln();
    let within_envelope = points
        .iter()
        .all(|&(n, v)| v <= fit.intercept + log_inflation + n * (fit.slope + log_inflation));
    let verdict = if tau < 1.0 - options.margin && within_envelope {
        Verdict::Dominated
    } else {
        Verdict::NotDominated
    };
    let log_c = (1..=depth)
        .map(|n| log_max_gap[n - 1] - n as f64 * fit.slope)
        .fold(f64::NEG_INFINITY, f64::max);

    let periodic = orbits.iter().filter(|o| matches!(o, crate::sample::Orbit::Periodic(_))).count();
    Ok(DominationCertificate {
        k,
        depth,
        verdict,
        tau,
        c: log_c.exp(),
        c_fit: fit.intercept.exp(),
        fit_residual: fit.residual,
        fit_range: (first, depth),
        options: *options,
        log_max_gap,
        worst_orbit,
        samples: SampleSummary {
            max_period: sample.max_period,
            periodic_orbits: periodic,
            random_windows: orbits.len() - periodic,
            seed: sample.seed,
            orbit_labels: orbits.iter().map(|o| o.label()).collect(),
        },
        empirical: true,
    })
}

fn serialize_rows<S: Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    linalg::to_rows(m).serialize(s)
}

/// Orthonormal frames for `E(x)` and `F(x)` at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingFrame {
    pub position: isize,
    /// Symbols at positions `position − depth ..= position + depth`, where
    /// available.
    pub window: String,
    /// `d × k`, columns orthonormal.
    #[serde(serialize_with = "serialize_rows")]
    pub e: Matrix,
    /// `d × (d − k)`, columns orthonormal.
    #[serde(serialize_with = "serialize_rows")]
    pub f: Matrix,
    pub depth: usize,
    /// Largest principal angle between `A(x)E(x)` and `E(σx)`, and between
    /// `A(x)F(x)` and `F(σx)`, the latter frames built at depth − 1.
    pub invariance_residual: f64,
    /// Smallest principal angle between `E(x)` and `F(x)`.
    pub transversality: f64,
    /// `log(σ_k/σ_{k+1})` of the forward and backward products.
    pub log_gap_forward: f64,
    pub log_gap_backward: f64,
}

struct RawFrames {
    e: Matrix,
    f: Matrix,
    log_gap_forward: f64,
    log_gap_backward: f64,
}

fn log_gap(values: &[f64], k: usize) -> f64 {
    values[k - 1].ln() - values[k].ln()
}

fn raw_frames<S: SymbolSource + ?Sized>(
    cocycle: &FiniteRangeCocycle,
    source: &S,
    position: isize,
    k: usize,
    depth: usize,
) -> Result<RawFrames> {
    let d = cocycle.dimension();
    let forward = cocycle.product(source, depth, position)?;
    let (fwd_values, fwd_v) = linalg::svd_right(&forward.mantissa)?;
    let f = fwd_v.columns(k, d - k).into_owned();

    let backward = cocycle.product(source, depth, position - depth as isize)?;
    let (bwd_values, bwd_v) = linalg::svd_right(&backward.mantissa)?;
    let pushed = &backward.mantissa * bwd_v.columns(0, k);
    let e = linalg::orthonormalize(&pushed);

    Ok(RawFrames {
        e,
        f,
        log_gap_forward: log_gap(&fwd_values, k),
        log_gap_backward: log_gap(&bwd_values, k),
    })
}

/// Build `E ⊕ F` at `position` from products of length `depth`:
/// `F` is the span of the `d − k` least expanded right singular vectors of
/// the forward product, `E` the image under the backward product of its `k`
/// most expanded right singular vectors.
pub fn construct_splitting<S: SymbolSource + ?Sized>(
    cocycle: &FiniteRangeCocycle,
    source: &S,
    position: isize,
    k: usize,
    depth: usize,
    options: &DominationOptions,
) -> Result<SplittingFrame> {
    let d = cocycle.dimension();
    if k == 0 || k >= d {
        return Err(Error::InvalidParameter(format!("index k = {k} must satisfy 1 <= k < {d}")));
    }
    if depth < 2 {
        return Err(Error::InvalidParameter("splitting depth must be at least 2".into()));
    }
    let here = raw_frames(cocycle, source, position, k, depth)?;
    let min_log_gap = options.min_gap.ln();
    for g in [here.log_gap_forward, here.log_gap_backward] {
        if !(g >= min_log_gap) {
            return Err(Error::GapTooSmall { k, ratio: g.exp(), threshold: options.min_gap });
        }
    }
    let next = raw_frames(cocycle, source, position + 1, k, depth - 1)?;
    let a = cocycle.evaluate(source, position)?;
    let ae = linalg::orthonormalize(&(a * &here.e));
    let af = linalg::orthonormalize(&(a * &here.f));
    let residual = linalg::max_principal_angle(&ae, &next.e)?.max(linalg::max_principal_angle(&af, &next.f)?);
    let transversality = linalg::min_principal_angle(&here.e, &here.f)?;

    let reach = depth as isize;
    let window: Vec<String> = (position - reach..=position + reach)
        .filter_map(|p| source.symbol_at(p))
        .map(|s| (s as usize + 1).to_string())
        .collect();
    Ok(SplittingFrame {
        position,
        window: window.join(","),
        e: here.e,
        f: here.f,
        depth,
        invariance_residual: residual,
        transversality,
        log_gap_forward: here.log_gap_forward,
        log_gap_backward: here.log_gap_backward,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    /// `max over frames of log(‖A^m|F‖ / m(A^m|E))`, `m = 1..=n`.
    pub log_ratios: Vec<f64>,
    pub tau: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Check `‖A^m(x)|F_x‖ < C τ^m m(A^m(x)|E_x)` on each frame, `m = 1..=n`.
/// PASS iff the fitted `τ < 1 − margin`.
pub fn verify_domination_inequality<S: SymbolSource + Sync + ?Sized>(
    cocycle: &FiniteRangeCocycle,
    source: &S,
    frames: &[SplittingFrame],
    n: usize,
    margin: f64,
) -> Result<InequalityReport> {
    let d = cocycle.dimension();
    let first = frames
        .first()
        .ok_or_else(|| Error::FrameMismatch("no frames given".into()))?;
    let k = first.e.ncols();
    for (i, fr) in frames.iter().enumerate() {
        if fr.e.nrows() != d || fr.f.nrows() != d || fr.e.ncols() + fr.f.ncols() != d {
            return Err(Error::FrameMismatch(format!(
                "frame {i} has shape E {:?}, F {:?} for dimension {d}",
                fr.e.shape(),
                fr.f.shape()
            )));
        }
        if fr.e.ncols() != k {
            return Err(Error::FrameMismatch(format!("frame {i} has index {} instead of {k}", fr.e.ncols())));
        }
        if fr.position != first.position + i as isize {
            return Err(Error::FrameMismatch(format!(
                "frame {i} sits at position {} instead of {}",
                fr.position,
                first.position + i as isize
            )));
        }
    }
    if n < 2 {
        return Err(Error::InvalidParameter("need at least 2 iterates to fit a rate".into()));
    }

    let per_frame = frames
        .par_iter()
        .map(|fr| {
            let mut acc = crate::linalg::ScaledMatrix::identity(d);
            let mut out = Vec::with_capacity(n);
            for m in 0..n as isize {
                acc.left_multiply(cocycle.evaluate(source, fr.position + m)?);
                let on_f = linalg::norm(&(&acc.mantissa * &fr.f))?;
                let on_e = linalg::singular_values_raw(&(&acc.mantissa * &fr.e))?;
                let conorm = *on_e.last().expect("k >= 1");
                out.push(on_f.ln() - conorm.ln());
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let log_ratios: Vec<f64> = (0..n)
        .map(|m| per_frame.iter().map(|r| r[m]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let points: Vec<(f64, f64)> = log_ratios
        .iter()
        .enumerate()
        .map(|(m, &v)| ((m + 1) as f64, v))
        .collect();
    let tau = fit_line(&points)?.slope.exp();
    Ok(InequalityReport { log_ratios, tau, margin, pass: tau < 1.0 - margin })
}
