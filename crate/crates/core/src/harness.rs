//! Verification pipeline: compute orbits over a list of periods, extract the
//! empirical coefficients
//!
//! ```text
//! α̂ = q²(x_q^k − k/q)        β̂ = q²(q θ_q^k / μ(x_q^k) − 1)
//! ```
//!
//! compare them with the closed forms, and fit the decay order of the
//! residuals. Everything here is `f64`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{alpha, beta, beta_caustic};
use crate::error::{Error, Result};
use crate::geometry::EllipseParams;
use crate::lazutkin::lazutkin_weight;
use crate::orbits::{orbit_from_caustic, orbit_variational, CausticOrbit, Convention};

/// Which inversion convention to use for the caustic construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConventionChoice {
    #[serde(alias = "a")]
    A,
    #[serde(alias = "b")]
    B,
    #[serde(rename = "auto", alias = "Auto")]
    Auto,
}

impl ConventionChoice {
    fn candidates(self) -> &'static [Convention] {
        match self {
            ConventionChoice::A => &[Convention::A],
            ConventionChoice::B => &[Convention::B],
            ConventionChoice::Auto => &[Convention::A, Convention::B],
        }
    }
}

/// Which closed form the angle coefficient is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BetaForm {
    /// The expanded Jacobi form, [`crate::asymptotics::beta`].
    #[default]
    Closed,
    /// The caustic-identity form, [`crate::asymptotics::beta_caustic`].
    Caustic,
}

impl BetaForm {
    pub fn eval(self, t: f64, ellipse: &EllipseParams<f64>) -> f64 {
        match self {
            BetaForm::Closed => beta(t, ellipse),
            BetaForm::Caustic => beta_caustic(t, ellipse),
        }
    }

    pub fn other(self) -> Self {
        match self {
            BetaForm::Closed => BetaForm::Caustic,
            BetaForm::Caustic => BetaForm::Closed,
        }
    }
}

/// Thresholds behind every pass flag. Decay orders are positive numbers:
/// a residual `r(q) ~ q^{−p}` has fitted slope `−p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub alpha_order: f64,
    pub alpha_order_halfwidth: f64,
    pub beta_order: f64,
    pub beta_order_halfwidth: f64,
    /// Minimum α decay order for a convention to be accepted under `auto`.
    pub auto_alpha_order_min: f64,
    pub alpha_richardson: f64,
    pub beta_richardson: f64,
    pub oracle_agreement: f64,
    /// Periods whose closure residual exceeds this are left out of fits.
    pub closure_guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            alpha_order: 2.0,
            alpha_order_halfwidth: 0.3,
            beta_order: 2.0,
            beta_order_halfwidth: 0.3,
            auto_alpha_order_min: 1.7,
            alpha_richardson: 1e-5,
            beta_richardson: 1e-4,
            oracle_agreement: 1e-9,
            closure_guard: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            ("alpha_order", self.alpha_order),
            ("alpha_order_halfwidth", self.alpha_order_halfwidth),
            ("beta_order", self.beta_order),
            ("beta_order_halfwidth", self.beta_order_halfwidth),
            ("auto_alpha_order_min", self.auto_alpha_order_min),
            ("alpha_richardson", self.alpha_richardson),
            ("beta_richardson", self.beta_richardson),
            ("oracle_agreement", self.oracle_agreement),
            ("closure_guard", self.closure_guard),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance {name} = {v} must be positive"
                )));
            }
        }
        Ok(())
    }
}

pub const DEFAULT_Q_LIST: [usize; 5] = [16, 32, 64, 128, 256];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub e: f64,
    pub q_list: Vec<usize>,
    pub tolerances: Tolerances,
    pub convention: ConventionChoice,
    pub beta_form: BetaForm,
    /// Periods up to this value are also built variationally and compared.
    pub variational_max_q: usize,
    /// Multiplies the closed-form α before comparison; 1 in normal runs.
    pub alpha_scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            e: 0.5,
            q_list: DEFAULT_Q_LIST.to_vec(),
            tolerances: Tolerances::default(),
            convention: ConventionChoice::Auto,
            beta_form: BetaForm::Closed,
            variational_max_q: 64,
            alpha_scale: 1.0,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.e > 0.0 && self.e < 1.0) {
            return Err(Error::Config(format!(
                "eccentricity {} outside (0, 1)",
                self.e
            )));
        }
        validate_q_list(&self.q_list)?;
        if !self.alpha_scale.is_finite() {
            return Err(Error::Config("alpha_scale must be finite".into()));
        }
        self.tolerances.validate()
    }
}

pub fn validate_q_list(q_list: &[usize]) -> Result<()> {
    if q_list.len() < 3 {
        return Err(Error::Config(format!(
            "q_list needs at least 3 periods, got {}",
            q_list.len()
        )));
    }
    if let Some(&q) = q_list.iter().find(|&&q| q < 5) {
        return Err(Error::Config(format!("period {q} in q_list is below 5")));
    }
    if !q_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("q_list must be strictly ascending".into()));
    }
    Ok(())
}

/// `(k/q, q²(x_q^k − k/q))`, with the difference taken in `(−1/2, 1/2]`.
pub fn extract_alpha_emp(orbit: &CausticOrbit<f64>) -> Vec<(f64, f64)> {
    let q = orbit.q as f64;
    orbit
        .x
        .iter()
        .enumerate()
        .map(|(k, &x)| {
            let t = k as f64 / q;
            let d = x - t;
            let d = d - d.round();
            let d = if d == -0.5 { 0.5 } else { d };
            (t, q * q * d)
        })
        .collect()
}

/// `(k/q, q²(q θ_q^k / μ(x_q^k) − 1))`.
pub fn extract_beta_emp(orbit: &CausticOrbit<f64>) -> Vec<(f64, f64)> {
    let q = orbit.q as f64;
    orbit
        .theta
        .iter()
        .zip(&orbit.x)
        .enumerate()
        .map(|(k, (&theta, &x))| {
            let mu = lazutkin_weight(x, &orbit.ellipse);
            (k as f64 / q, q * q * (q * theta / mu - 1.0))
        })
        .collect()
}

/// Least-squares line through `(ln q, ln r)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub rms: f64,
    /// Abscissae of points dropped for a nonpositive or non-finite residual.
    pub dropped: Vec<f64>,
}

pub fn fit_decay_order(pairs: &[(f64, f64)]) -> Result<DecayFit> {
    let mut dropped = Vec::new();
    let mut pts = Vec::with_capacity(pairs.len());
    for &(q, r) in pairs {
        if r > 0.0 && r.is_finite() && q > 0.0 {
            pts.push((q.ln(), r.ln()));
        } else {
            dropped.push(q);
        }
    }
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "{} usable points after dropping {:?}; need at least 3",
            pts.len(),
            dropped
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (pts
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        slope,
        intercept,
        rms,
        dropped,
    })
}

/// One `(q, k)` row of raw data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub k: usize,
    pub t: f64,
    pub x: f64,
    pub theta: f64,
    pub alpha_emp: f64,
    pub alpha_closed: f64,
    pub beta_emp: f64,
    pub beta_closed: f64,
    /// The other closed form for the angle coefficient (diagnostic).
    pub beta_other: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub q: usize,
    pub lambda_q: f64,
    pub closure_residual: f64,
    /// False when the closure residual exceeds the guard; such periods are
    /// left out of fits and extrapolation.
    pub included: bool,
    /// `max_{k≠0} |α̂ − α|`
    pub r_alpha: f64,
    /// `max_{k≠0} |β̂ − β|`
    pub r_beta: f64,
    pub r_beta_other: f64,
    pub samples: Vec<SampleRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionTrial {
    pub convention: Convention,
    pub alpha_fit: Option<DecayFit>,
    pub error: Option<String>,
    pub accepted: bool,
}

/// Richardson extrapolation `(4·f(2q) − f(q))/3` on the coarse grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonCheck {
    pub q_coarse: usize,
    pub q_fine: usize,
    pub sup_error: f64,
    pub t: Vec<f64>,
    pub extrapolated: Vec<f64>,
    pub closed: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveCheck {
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
    pub richardson: Option<RichardsonCheck>,
    pub richardson_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub q: usize,
    pub max_vertex_discrepancy: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PassFlags {
    pub alpha_slope: bool,
    pub alpha_richardson: bool,
    pub beta_slope: bool,
    pub beta_richardson: bool,
    pub oracle_agreement: bool,
}

impl PassFlags {
    pub fn all(&self) -> bool {
        self.alpha_slope
            && self.alpha_richardson
            && self.beta_slope
            && self.beta_richardson
            && self.oracle_agreement
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub config: VerifyConfig,
    pub convention: Convention,
    pub convention_trials: Vec<ConventionTrial>,
    pub periods: Vec<PeriodRecord>,
    pub alpha: CurveCheck,
    pub beta: CurveCheck,
    /// Same checks against the other angle-coefficient form; not flagged.
    pub beta_other_form: BetaForm,
    pub beta_other: CurveCheck,
    pub oracle: Vec<OracleRecord>,
    pub flags: PassFlags,
    pub all_pass: bool,
}

fn sup_excluding_marked(values: impl Iterator<Item = (usize, f64)>) -> f64 {
    values.filter(|&(k, _)| k != 0).fold(
        0.0_f64,
        |acc, (_, v)| if v.is_nan() { v } else { acc.max(v.abs()) },
    )
}

fn period_record(
    q: usize,
    ellipse: &EllipseParams<f64>,
    convention: Convention,
    cfg: &VerifyConfig,
) -> Result<PeriodRecord> {
    let orbit = orbit_from_caustic(q, ellipse, convention)?;
    let alpha_emp = extract_alpha_emp(&orbit);
    let beta_emp = extract_beta_emp(&orbit);
    let samples: Vec<SampleRecord> = (0..q)
        .map(|k| {
            let t = alpha_emp[k].0;
            SampleRecord {
                k,
                t,
                x: orbit.x[k],
                theta: orbit.theta[k],
                alpha_emp: alpha_emp[k].1,
                alpha_closed: cfg.alpha_scale * alpha(t, ellipse),
                beta_emp: beta_emp[k].1,
                beta_closed: cfg.beta_form.eval(t, ellipse),
                beta_other: cfg.beta_form.other().eval(t, ellipse),
            }
        })
        .collect();
    let r_alpha = sup_excluding_marked(samples.iter().map(|s| (s.k, s.alpha_emp - s.alpha_closed)));
    let r_beta = sup_excluding_marked(samples.iter().map(|s| (s.k, s.beta_emp - s.beta_closed)));
    let r_beta_other =
        sup_excluding_marked(samples.iter().map(|s| (s.k, s.beta_emp - s.beta_other)));
    Ok(PeriodRecord {
        q,
        lambda_q: orbit.lambda_q,
        closure_residual: orbit.closure_residual,
        included: orbit.closure_residual <= cfg.tolerances.closure_guard,
        r_alpha,
        r_beta,
        r_beta_other,
        samples,
    })
}

fn fit_included(
    periods: &[PeriodRecord],
    residual: impl Fn(&PeriodRecord) -> f64,
) -> Result<DecayFit> {
    let pairs: Vec<(f64, f64)> = periods
        .iter()
        .filter(|p| p.included)
        .map(|p| (p.q as f64, residual(p)))
        .collect();
    fit_decay_order(&pairs)
}

fn richardson(
    periods: &[PeriodRecord],
    emp: impl Fn(&SampleRecord) -> f64,
    closed: impl Fn(&SampleRecord) -> f64,
) -> Result<RichardsonCheck> {
    let included: Vec<&PeriodRecord> = periods.iter().filter(|p| p.included).collect();
    let pair = included
        .iter()
        .rev()
        .find_map(|fine| {
            included
                .iter()
                .find(|c| c.q * 2 == fine.q)
                .map(|coarse| (*coarse, *fine))
        })
        .ok_or_else(|| {
            Error::Fit("no included pair of periods (q, 2q) for extrapolation".into())
        })?;
    let (coarse, fine) = pair;
    let mut check = RichardsonCheck {
        q_coarse: coarse.q,
        q_fine: fine.q,
        sup_error: 0.0,
        t: Vec::new(),
        extrapolated: Vec::new(),
        closed: Vec::new(),
    };
    for k in 1..coarse.q {
        let c = &coarse.samples[k];
        let f = &fine.samples[2 * k];
        let extrapolated = (4.0 * emp(f) - emp(c)) / 3.0;
        let reference = closed(c);
        let err = (extrapolated - reference).abs();
        check.sup_error = if err.is_nan() {
            err
        } else {
            check.sup_error.max(err)
        };
        check.t.push(c.t);
        check.extrapolated.push(extrapolated);
        check.closed.push(reference);
    }
    Ok(check)
}

fn curve_check(
    periods: &[PeriodRecord],
    residual: impl Fn(&PeriodRecord) -> f64,
    emp: impl Fn(&SampleRecord) -> f64,
    closed: impl Fn(&SampleRecord) -> f64,
) -> CurveCheck {
    let (fit, fit_error) = match fit_included(periods, residual) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let (richardson, richardson_error) = match richardson(periods, emp, closed) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    CurveCheck {
        fit,
        fit_error,
        richardson,
        richardson_error,
    }
}

fn order_ok(fit: &Option<DecayFit>, order: f64, halfwidth: f64) -> bool {
    fit.as_ref()
        .is_some_and(|f| (f.slope + order).abs() <= halfwidth)
}

fn build_periods(
    ellipse: &EllipseParams<f64>,
    convention: Convention,
    cfg: &VerifyConfig,
) -> Result<Vec<PeriodRecord>> {
    cfg.q_list
        .par_iter()
        .map(|&q| period_record(q, ellipse, convention, cfg))
        .collect()
}

/// Runs the full comparison described by `cfg`.
pub fn run_verification(cfg: &VerifyConfig) -> Result<ResidualReport> {
    cfg.validate()?;
    let ellipse = EllipseParams::new(cfg.e)?;
    let tol = &cfg.tolerances;

    let mut trials = Vec::new();
    let mut chosen: Option<(Convention, Vec<PeriodRecord>)> = None;
    let mut fallback: Option<(Convention, Vec<PeriodRecord>, f64)> = None;
    let candidates = cfg.convention.candidates();
    for &convention in candidates {
        let periods = match build_periods(&ellipse, convention, cfg) {
            Ok(p) => p,
            Err(e) if candidates.len() > 1 => {
                trials.push(ConventionTrial {
                    convention,
                    alpha_fit: None,
                    error: Some(e.to_string()),
                    accepted: false,
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let fit = fit_included(&periods, |p| p.r_alpha);
        let accepted = match &fit {
            Ok(f) => f.slope <= -tol.auto_alpha_order_min || candidates.len() == 1,
            Err(_) => candidates.len() == 1,
        };
        let slope = fit.as_ref().map(|f| f.slope).unwrap_or(f64::INFINITY);
        trials.push(ConventionTrial {
            convention,
            alpha_fit: fit.as_ref().ok().cloned(),
            error: fit.as_ref().err().map(|e| e.to_string()),
            accepted,
        });
        if accepted {
            chosen = Some((convention, periods));
            break;
        }
        if fallback.as_ref().is_none_or(|f| slope < f.2) {
            fallback = Some((convention, periods, slope));
        }
    }
    let (convention, periods) = match (chosen, fallback) {
        (Some(c), _) => c,
        (None, Some((c, p, _))) => (c, p),
        (None, None) => {
            return Err(Error::Fit(
                "no convention produced orbits for every period".into(),
            ))
        }
    };

    let alpha_check = curve_check(&periods, |p| p.r_alpha, |s| s.alpha_emp, |s| s.alpha_closed);
    let beta_check = curve_check(&periods, |p| p.r_beta, |s| s.beta_emp, |s| s.beta_closed);
    let beta_other = curve_check(
        &periods,
        |p| p.r_beta_other,
        |s| s.beta_emp,
        |s| s.beta_other,
    );

    let oracle: Vec<OracleRecord> = cfg
        .q_list
        .par_iter()
        .filter(|&&q| q <= cfg.variational_max_q)
        .map(|&q| match orbit_variational(q, &ellipse) {
            Ok(var) => {
                let phi_caustic = orbit_from_caustic(q, &ellipse, convention)
                    .map(|o| o.phi)
                    .unwrap_or_default();
                let d = phi_caustic
                    .iter()
                    .zip(&var.phi)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                OracleRecord {
                    q,
                    max_vertex_discrepancy: Some(d),
                    error: None,
                }
            }
            Err(e) => OracleRecord {
                q,
                max_vertex_discrepancy: None,
                error: Some(e.to_string()),
            },
        })
        .collect();

    let flags = PassFlags {
        alpha_slope: order_ok(&alpha_check.fit, tol.alpha_order, tol.alpha_order_halfwidth),
        alpha_richardson: alpha_check
            .richardson
            .as_ref()
            .is_some_and(|r| r.sup_error <= tol.alpha_richardson),
        beta_slope: order_ok(&beta_check.fit, tol.beta_order, tol.beta_order_halfwidth),
        beta_richardson: beta_check
            .richardson
            .as_ref()
            .is_some_and(|r| r.sup_error <= tol.beta_richardson),
        oracle_agreement: oracle.iter().all(|o| {
            o.max_vertex_discrepancy
                .is_some_and(|d| d <= tol.oracle_agreement)
        }),
    };
    Ok(ResidualReport {
        config: cfg.clone(),
        convention,
        convention_trials: trials,
        periods,
        alpha: alpha_check,
        beta: beta_check,
        beta_other_form: cfg.beta_form.other(),
        beta_other,
        oracle,
        all_pass: flags.all(),
        flags,
    })
}

pub const REPORT_CSV_HEADER: &str = "q,k,t,x,theta,alpha_emp,alpha_closed,beta_emp,beta_closed";

/// Shortest round-trip decimal form of a float.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

impl ResidualReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Flat per-`(q, k)` table.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(REPORT_CSV_HEADER);
        out.push('\n');
        for p in &self.periods {
            for s in &p.samples {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    p.q,
                    s.k,
                    fmt_f64(s.t),
                    fmt_f64(s.x),
                    fmt_f64(s.theta),
                    fmt_f64(s.alpha_emp),
                    fmt_f64(s.alpha_closed),
                    fmt_f64(s.beta_emp),
                    fmt_f64(s.beta_closed)
                );
            }
        }
        out
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    /// Recomputes the pass flags from the stored samples and thresholds.
    pub fn recompute_flags(&self) -> PassFlags {
        let tol = &self.config.tolerances;
        let alpha = curve_check(
            &self.periods,
            |p| {
                sup_excluding_marked(
                    p.samples
                        .iter()
                        .map(|s| (s.k, s.alpha_emp - s.alpha_closed)),
                )
            },
            |s| s.alpha_emp,
            |s| s.alpha_closed,
        );
        let beta = curve_check(
            &self.periods,
            |p| sup_excluding_marked(p.samples.iter().map(|s| (s.k, s.beta_emp - s.beta_closed))),
            |s| s.beta_emp,
            |s| s.beta_closed,
        );
        PassFlags {
            alpha_slope: order_ok(&alpha.fit, tol.alpha_order, tol.alpha_order_halfwidth),
            alpha_richardson: alpha
                .richardson
                .is_some_and(|r| r.sup_error <= tol.alpha_richardson),
            beta_slope: order_ok(&beta.fit, tol.beta_order, tol.beta_order_halfwidth),
            beta_richardson: beta
                .richardson
                .is_some_and(|r| r.sup_error <= tol.beta_richardson),
            oracle_agreement: self.oracle.iter().all(|o| {
                o.max_vertex_discrepancy
                    .is_some_and(|d| d <= tol.oracle_agreement)
            }),
        }
    }
}
