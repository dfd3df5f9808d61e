//! Plant-parameter estimation from measured power alone.
//!
//! Each daylight period is scanned with a dynamic window: a seed window of
//! `l_min` samples slides forward until it passes the three clear-sky tests,
//! then grows one sample at a time while the tests keep passing. When growth
//! stops (a test fails or the day ends) the last passing extent is fed to a
//! recursive least-squares update with the clear-sky irradiance standing in
//! for the unmeasured true irradiance. Estimates carry over across days, so
//! the model sharpens as clear windows accumulate, which in turn tightens the
//! peak-level test.
//!
//! The RLS recursion runs on an internally rescaled regressor
//! `[I/1000, (I/1000)^2, (I/1000)*(T/25)]`. The raw regressor spans six
//! orders of magnitude, which wrecks the conditioning of the information
//! matrix; the fixed diagonal rescaling keeps all components O(1) without
//! changing the least-squares solution. Public interfaces speak plain model
//! coefficients throughout.

use chrono::{DateTime, Duration, NaiveDate, Utc};
use nalgebra::{Matrix3, Matrix4, Vector3};

use crate::clearsky::{self, SiteConfig};
use crate::csdetect::{self, Window};
use crate::error::Error;
use crate::pvusa::{EtaBox, PvusaParams};
use crate::series::{DaySlice, SampleSeries};
use crate::Result;

/// Fixed diagonal rescaling of the regressor components (see module docs).
const REGRESSOR_SCALE: [f64; 3] = [1e-3, 1e-6, 4e-5];

/// Tuning knobs of the detection-plus-estimation loop.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationConfig {
    /// Plant nominal power, kW.
    pub p_nom_kw: f64,
    /// Prior box for the normalized coefficients.
    pub eta: EtaBox,
    /// Seed window length in samples; windows never shrink below this.
    pub l_min: usize,
    /// Attenuation threshold separating "still clear" from "cloudy" days in
    /// the peak-level test.
    pub beta0: f64,
    /// Exponential forgetting factor of the RLS update, in (0, 1].
    pub forgetting: f64,
    /// Scale of the initial RLS covariance (diffuse prior), rescaled basis.
    pub init_cov_scale: f64,
    /// Fixed peak tolerance; when set it replaces the beta0-derived value.
    pub epsilon_override: Option<f64>,
    /// Clamp range applied to the beta0-derived peak tolerance.
    pub eps_min: f64,
    pub eps_max: f64,
}

impl EstimationConfig {
    pub fn new(p_nom_kw: f64) -> Self {
        EstimationConfig {
            p_nom_kw,
            eta: EtaBox::default(),
            l_min: 3,
            beta0: 0.9,
            forgetting: 0.995,
            init_cov_scale: 1e3,
            epsilon_override: None,
            eps_min: 0.01,
            eps_max: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_nom_kw > 0.0 && self.p_nom_kw.is_finite()) {
            return Err(Error::invalid(format!(
                "nominal power must be positive, got {}",
                self.p_nom_kw
            )));
        }
        if self.l_min < 2 {
            return Err(Error::invalid(format!(
                "l_min must be at least 2, got {}",
                self.l_min
            )));
        }
        if !(0.0 < self.beta0 && self.beta0 <= 1.0) {
            return Err(Error::invalid(format!(
                "beta0 must lie in (0, 1], got {}",
                self.beta0
            )));
        }
        if !(0.0 < self.forgetting && self.forgetting <= 1.0) {
            return Err(Error::invalid(format!(
                "forgetting factor must lie in (0, 1], got {}",
                self.forgetting
            )));
        }
        if !(self.init_cov_scale > 0.0 && self.init_cov_scale.is_finite()) {
            return Err(Error::invalid(format!(
                "initial covariance scale must be positive, got {}",
                self.init_cov_scale
            )));
        }
        if let Some(e) = self.epsilon_override {
            if !(0.0..1.0).contains(&e) {
                return Err(Error::invalid(format!(
                    "epsilon override must lie in [0, 1), got {e}"
                )));
            }
        }
        if !(0.0 <= self.eps_min && self.eps_min <= self.eps_max && self.eps_max < 1.0) {
            return Err(Error::invalid(format!(
                "bad epsilon clamp [{}, {}]",
                self.eps_min, self.eps_max
            )));
        }
        Ok(())
    }
}

/// Initial guess used before any clear-sky data has been accepted: the
/// linear coefficient is set to 75 percent of nominal-at-1000 W/m^2 and the
/// other two follow the centers of the eta prior.
pub fn initial_params(p_nom_kw: f64, eta: &EtaBox) -> PvusaParams {
    let mu1 = 0.75 * p_nom_kw / 1000.0;
    let (c2, c3) = eta.center();
    PvusaParams::new(mu1, c2 * mu1, c3 * mu1)
}

/// Index range of samples with positive clear-sky irradiance in one local
/// day, sampled at `step` from local midnight. `None` for fully dark days.
pub fn light_hours(
    site: &SiteConfig,
    date: NaiveDate,
    step: Duration,
) -> Result<Option<(usize, usize)>> {
    let profile = clearsky::clearsky_profile(site, date, step)?;
    let first = profile.iter().position(|p| p.1 > 0.0);
    let last = profile.iter().rposition(|p| p.1 > 0.0);
    Ok(first.zip(last))
}

/// Recursive least-squares state: parameter vector and covariance in the
/// rescaled regressor basis. The covariance is carried as a square-root
/// factor `P = S S'`; propagating the factor instead of `P` itself halves
/// the effective condition number of every update, which matters because
/// the `I` and `I^2` regressor columns are strongly correlated.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    theta: Vector3<f64>,
    sqrt_cov: Matrix3<f64>,
    cov: Matrix3<f64>,
}

impl EstimatorState {
    pub fn new(params: &PvusaParams, cov_scale: f64) -> Result<Self> {
        if !(cov_scale > 0.0 && cov_scale.is_finite()) {
            return Err(Error::invalid(format!(
                "covariance scale must be positive, got {cov_scale}"
            )));
        }
        Ok(EstimatorState {
            theta: Vector3::new(
                params.mu1 / REGRESSOR_SCALE[0],
                params.mu2 / REGRESSOR_SCALE[1],
                params.mu3 / REGRESSOR_SCALE[2],
            ),
            sqrt_cov: Matrix3::identity() * cov_scale.sqrt(),
            cov: Matrix3::identity() * cov_scale,
        })
    }

    /// Current estimate in plain model coefficients.
    pub fn params(&self) -> PvusaParams {
        PvusaParams::new(
            self.theta[0] * REGRESSOR_SCALE[0],
            self.theta[1] * REGRESSOR_SCALE[1],
            self.theta[2] * REGRESSOR_SCALE[2],
        )
    }

    /// Covariance in the rescaled basis; exposed for diagnostics and tests.
    pub fn covariance(&self) -> &Matrix3<f64> {
        &self.cov
    }

    pub fn is_positive_definite(&self) -> bool {
        nalgebra::linalg::Cholesky::new(self.cov).is_some()
    }

    fn scaled_regressor(i_wm2: f64, t_c: f64) -> Vector3<f64> {
        let phi = crate::pvusa::regressor(i_wm2, t_c);
        Vector3::new(
            phi[0] * REGRESSOR_SCALE[0],
            phi[1] * REGRESSOR_SCALE[1],
            phi[2] * REGRESSOR_SCALE[2],
        )
    }

    fn step(&mut self, phi: &Vector3<f64>, y: f64, lambda: f64) -> Result<()> {
        // Array form of the update: stack the pre-array
        //
        //   B = [ sqrt(lambda)  phi' S ]
        //       [ 0             S      ]
        //
        // and reduce it by an orthogonal transform to lower-triangular
        //
        //   L = [ alpha  0  ]        alpha^2 = lambda + phi' P phi,
        //       [ g      S~ ],       g = P phi / alpha,
        //
        // so the gain is g / alpha and the updated factor is S~ / sqrt(lambda).
        // This is algebraically the standard recursion on P = S S', but the
        // factor form avoids the squared condition number of carrying P.
        let sl = lambda.sqrt();
        let s = self.sqrt_cov;
        let sphi = s.transpose() * phi;
        let mut b = Matrix4::<f64>::zeros();
        b[(0, 0)] = sl;
        for j in 0..3 {
            b[(0, j + 1)] = sphi[j];
        }
        for r in 0..3 {
            for c in 0..3 {
                b[(r + 1, c + 1)] = s[(r, c)];
            }
        }
        // L = R' from the QR factorization of B'; per-column sign ambiguity
        // cancels in g / alpha and in S~ S~'.
        let rr = b.transpose().qr().unpack_r();
        let alpha = rr[(0, 0)];
        if !alpha.is_finite() || alpha == 0.0 {
            return Err(Error::numerical(format!(
                "singular RLS update, pivot {alpha}"
            )));
        }
        let g = Vector3::new(rr[(0, 1)], rr[(0, 2)], rr[(0, 3)]);
        let gain = g / alpha;
        let residual = y - phi.dot(&self.theta);
        self.theta += gain * residual;
        for r in 0..3 {
            for c in 0..3 {
                self.sqrt_cov[(r, c)] = rr[(c + 1, r + 1)] / sl;
            }
        }
        self.cov = self.sqrt_cov * self.sqrt_cov.transpose();
        self.cov = (self.cov + self.cov.transpose()) * 0.5;
        if !self.is_positive_definite() {
            return Err(Error::numerical(
                "RLS covariance lost positive definiteness",
            ));
        }
        Ok(())
    }

    /// Processes `(irradiance, temperature, power)` rows in order and returns
    /// the updated state. The input state is untouched; on any numerical
    /// failure the error is returned and nothing is applied.
    pub fn update_window(&self, rows: &[(f64, f64, f64)], lambda: f64) -> Result<EstimatorState> {
        if rows.is_empty() {
            return Err(Error::invalid("empty update window"));
        }
        let mut next = self.clone();
        for &(i, t, y) in rows {
            if !y.is_finite() {
                return Err(Error::invalid(format!("non-finite target {y}")));
            }
            let phi = Self::scaled_regressor(i, t);
            next.step(&phi, y, lambda)?;
        }
        Ok(next)
    }
}

/// Pass/fail state of one clear-sky test inside a detection record. `Skip`
/// marks tests not evaluated because an earlier one already failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skip => "skip",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "skip" => Ok(Verdict::Skip),
            other => Err(Error::invalid(format!("unknown verdict: {other}"))),
        }
    }
}

/// Whether a window's data ended up in the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdaptOutcome {
    /// Evaluation-only record, or the window was rejected by the tests.
    No,
    /// The window fed an applied RLS update.
    Yes,
    /// The update was computed but discarded (nonphysical or singular).
    RolledBack,
}

impl AdaptOutcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            AdaptOutcome::No => "no",
            AdaptOutcome::Yes => "yes",
            AdaptOutcome::RolledBack => "rolled_back",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "no" => Ok(AdaptOutcome::No),
            "yes" => Ok(AdaptOutcome::Yes),
            "rolled_back" => Ok(AdaptOutcome::RolledBack),
            other => Err(Error::invalid(format!("unknown adapt outcome: {other}"))),
        }
    }
}

/// One evaluated window in the detection log.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub day: NaiveDate,
    /// Series index of the window's first sample.
    pub start: usize,
    pub len: usize,
    pub test1: Verdict,
    pub test2: Verdict,
    pub test3: Verdict,
    pub adapted: AdaptOutcome,
    /// Estimate in effect after this record (updated on adapted windows).
    pub params_after: PvusaParams,
}

/// Piecewise-constant parameter estimate over time. Entries are strictly
/// increasing in time; entry `(t, p)` means `p` is the estimate available
/// from `t` (inclusive) until the next entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamTrajectory {
    entries: Vec<(DateTime<Utc>, PvusaParams)>,
}

impl ParamTrajectory {
    pub fn new(entries: Vec<(DateTime<Utc>, PvusaParams)>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invalid("empty parameter trajectory"));
        }
        for pair in entries.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::invalid(
                    "trajectory timestamps must strictly increase",
                ));
            }
        }
        Ok(ParamTrajectory { entries })
    }

    pub fn entries(&self) -> &[(DateTime<Utc>, PvusaParams)] {
        &self.entries
    }

    /// Latest entry at or before `t`: the estimate a forecast issued at `t`
    /// is allowed to use.
    pub fn latest_at(&self, t: DateTime<Utc>) -> Option<(DateTime<Utc>, PvusaParams)> {
        match self.entries.binary_search_by_key(&t, |e| e.0) {
            Ok(i) => Some(self.entries[i]),
            Err(0) => None,
            Err(i) => Some(self.entries[i - 1]),
        }
    }

    pub fn last(&self) -> (DateTime<Utc>, PvusaParams) {
        *self.entries.last().expect("trajectory is never empty")
    }
}

/// Output of a full estimation run.
#[derive(Debug, Clone)]
pub struct RunResult {
    /// One entry per input sample: the estimate after observing that sample.
    pub trajectory: ParamTrajectory,
    /// Every window evaluation, in order.
    pub records: Vec<DetectionRecord>,
    pub final_params: PvusaParams,
}

struct WindowVerdicts {
    test1: Verdict,
    test2: Verdict,
    test3: Verdict,
}

impl WindowVerdicts {
    fn all_pass(&self) -> bool {
        self.test1 == Verdict::Pass && self.test2 == Verdict::Pass && self.test3 == Verdict::Pass
    }
}

fn current_epsilon(cfg: &EstimationConfig, mu1_hat: f64) -> Result<f64> {
    match cfg.epsilon_override {
        Some(e) => Ok(e),
        None => {
            csdetect::epsilon_from_beta0(cfg.p_nom_kw, mu1_hat, cfg.beta0, cfg.eps_min, cfg.eps_max)
        }
    }
}

fn evaluate_window(
    samples: &[crate::series::Sample],
    state: &EstimatorState,
    cfg: &EstimationConfig,
) -> Result<WindowVerdicts> {
    let window = match Window::new(samples) {
        Ok(w) => w,
        // A window without positive clear-sky irradiance cannot be clear sky;
        // count it as a level-test failure instead of aborting the run.
        Err(_) => {
            return Ok(WindowVerdicts {
                test1: Verdict::Fail,
                test2: Verdict::Skip,
                test3: Verdict::Skip,
            })
        }
    };
    let t1 = csdetect::cs_test1(&window, &cfg.eta)?;
    if !t1.passed() {
        return Ok(WindowVerdicts {
            test1: Verdict::Fail,
            test2: Verdict::Skip,
            test3: Verdict::Skip,
        });
    }
    let t2 = csdetect::cs_test2(&window, &cfg.eta)?;
    if !t2.passed() {
        return Ok(WindowVerdicts {
            test1: Verdict::Pass,
            test2: Verdict::Fail,
            test3: Verdict::Skip,
        });
    }
    let params = state.params();
    let eps = current_epsilon(cfg, params.mu1)?;
    let t3 = csdetect::cs_test3(&window, &params, eps)?;
    Ok(WindowVerdicts {
        test1: Verdict::Pass,
        test2: Verdict::Pass,
        test3: if t3.passed() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
    })
}

enum AdaptResult {
    Applied(EstimatorState),
    Rejected,
}

/// Runs the RLS update for an accepted window and applies the physicality
/// guard: an estimate with a nonpositive linear coefficient is discarded.
fn try_adapt(
    state: &EstimatorState,
    samples: &[crate::series::Sample],
    lambda: f64,
) -> AdaptResult {
    let rows: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|s| (s.i_cs_wm2, s.t_c, s.p_m_kw))
        .collect();
    match state.update_window(&rows, lambda) {
        Ok(next) if next.params().mu1 > 0.0 => AdaptResult::Applied(next),
        Ok(_) | Err(_) => AdaptResult::Rejected,
    }
}

/// Scans one local day. Appends detection records, applies accepted updates
/// to `state` and pushes `(activation index, params)` pairs for every applied
/// adaptation.
fn run_day(
    state: &mut EstimatorState,
    series: &SampleSeries,
    day: &DaySlice,
    cfg: &EstimationConfig,
    records: &mut Vec<DetectionRecord>,
    adaptations: &mut Vec<(usize, PvusaParams)>,
) -> Result<()> {
    let Some((k_lo, k_hi)) = series.light_bounds(day.range.clone()) else {
        return Ok(());
    };
    let samples = series.samples();
    let mut anchor = k_lo;
    while anchor + cfg.l_min - 1 <= k_hi {
        let mut end = anchor + cfg.l_min - 1;
        let verdicts = evaluate_window(&samples[anchor..=end], state, cfg)?;
        let seed_passed = verdicts.all_pass();
        records.push(DetectionRecord {
            day: day.date,
            start: anchor,
            len: cfg.l_min,
            test1: verdicts.test1,
            test2: verdicts.test2,
            test3: verdicts.test3,
            adapted: AdaptOutcome::No,
            params_after: state.params(),
        });
        if !seed_passed {
            anchor += 1;
            continue;
        }
        let mut last_pass_record = records.len() - 1;
        let day_end_exit = loop {
            end += 1;
            if end > k_hi {
                break true;
            }
            let verdicts = evaluate_window(&samples[anchor..=end], state, cfg)?;
            let passed = verdicts.all_pass();
            records.push(DetectionRecord {
                day: day.date,
                start: anchor,
                len: end - anchor + 1,
                test1: verdicts.test1,
                test2: verdicts.test2,
                test3: verdicts.test3,
                adapted: AdaptOutcome::No,
                params_after: state.params(),
            });
            if !passed {
                break false;
            }
            last_pass_record = records.len() - 1;
        };
        // Adapt on the last passing extent: samples[anchor..=end-1].
        let adapt_slice = &samples[anchor..=end - 1];
        match try_adapt(state, adapt_slice, cfg.forgetting) {
            AdaptResult::Applied(next) => {
                *state = next;
                records[last_pass_record].adapted = AdaptOutcome::Yes;
                records[last_pass_record].params_after = state.params();
                let activation = if day_end_exit { k_hi } else { end };
                adaptations.push((activation, state.params()));
            }
            AdaptResult::Rejected => {
                records[last_pass_record].adapted = AdaptOutcome::RolledBack;
            }
        }
        anchor = end + 1;
    }
    Ok(())
}

/// Full estimation pass over a series: per-day dynamic-window detection with
/// carry-over of the estimate across days.
pub fn run(
    series: &SampleSeries,
    site: &SiteConfig,
    cfg: &EstimationConfig,
    initial: Option<PvusaParams>,
) -> Result<RunResult> {
    cfg.validate()?;
    site.validate()?;
    let start = initial.unwrap_or_else(|| initial_params(cfg.p_nom_kw, &cfg.eta));
    if start.mu1.is_nan() || start.mu1 <= 0.0 {
        return Err(Error::invalid(format!(
            "initial mu1 must be positive, got {}",
            start.mu1
        )));
    }
    let mut state = EstimatorState::new(&start, cfg.init_cov_scale)?;
    let mut records = Vec::new();
    let mut adaptations: Vec<(usize, PvusaParams)> = Vec::new();
    for day in series.days(site) {
        run_day(
            &mut state,
            series,
            &day,
            cfg,
            &mut records,
            &mut adaptations,
        )?;
    }
    // Piecewise-constant trajectory: adaptation at index i takes effect at
    // sample i (its data is fully observed by then).
    let mut entries = Vec::with_capacity(series.len());
    let mut current = start;
    let mut next_event = 0usize;
    for (i, s) in series.samples().iter().enumerate() {
        while next_event < adaptations.len() && adaptations[next_event].0 <= i {
            current = adaptations[next_event].1;
            next_event += 1;
        }
        entries.push((s.timestamp, current));
    }
    let trajectory = ParamTrajectory::new(entries)?;
    Ok(RunResult {
        final_params: state.params(),
        trajectory,
        records,
    })
}
