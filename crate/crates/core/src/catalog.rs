//! Assembles generalization-bound values from information quantities: the
//! per-kind coefficient rules, the leave-m-out CGF constant, scalar
//! lambda-optimization for CGF-form bounds, and the JS prediction-bound
//! inversion.

use crate::divergence::{d_js_inverse, JsWeight, Prob};
use crate::supersample::PartitionConfig;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CatalogError {
    #[error("{kind:?} expects {expected} per-term quantities, got {got}")]
    TermCount { kind: BoundKind, expected: usize, got: usize },
    #[error("{kind:?} requires parameter {0}", .name)]
    MissingParam { kind: BoundKind, name: &'static str },
    #[error("negative information value {0}")]
    NegativeInfo(f64),
    #[error("empty feasible range for lambda")]
    EmptyLambdaRange,
}

/// Bound families, each mapping to one coefficient rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Mi,
    Imi,
    Ipmi,
    CmiStd,
    Icimi,
    LooCmi,
    IpcimiBounded,
    LmoCmi,
    LofoCmi,
    MnIpcimi,
    Sipcimi,
    Sicimi,
    LooScmi,
    LmoScmi,
    GeneralCgf,
    VarIpcimi,
    JsPred,
    JsPredSingle,
}

/// Parameters a coefficient rule may need.
#[derive(Debug, Clone, Copy)]
pub struct BoundParams {
    pub n: u32,
    pub m: Option<u32>,
    pub k: Option<u32>,
    pub delta: Option<f64>,
}

impl BoundParams {
    pub fn of_n(n: u32) -> Self {
        BoundParams { n, m: None, k: None, delta: None }
    }
    pub fn with_m(mut self, m: u32) -> Self {
        self.m = Some(m);
        self
    }
    pub fn with_k(mut self, k: u32) -> Self {
        self.k = Some(k);
        self
    }
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }
}

/// An assembled bound value together with its coefficient decomposition:
/// value = outer_factor * sum_i sqrt(inner_coefficient * I_i).
#[derive(Debug, Clone)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub value: f64,
    pub outer_factor: f64,
    pub inner_coefficient: f64,
    pub per_term: Vec<f64>,
    /// Sum of the per-term information quantities, in nats.
    pub info_total: f64,
    /// Monte-Carlo standard error of `value`; 0 for closed forms.
    pub stderr: f64,
    pub params: BoundParams,
}

/// The CGF constant C^k_{n,m}: (n+m)/max(n,m) when min(n,m) = k, otherwise
/// (n+m)/(n+m-k) * nm/(nm - k*min(n,m)). Always at least 1.
pub fn coefficient_c(cfg: &PartitionConfig) -> f64 {
    let (n, m, k) = (cfg.n() as f64, cfg.m() as f64, cfg.k() as f64);
    let lo = n.min(m);
    if lo == k {
        (n + m) / n.max(m)
    } else {
        let denom = n * m - k * lo;
        debug_assert!(denom > 0.0, "block size >= 2 keeps nm - k*min positive");
        (n + m) / (n + m - k) * n * m / denom
    }
}

fn expected_terms(kind: BoundKind, p: &BoundParams) -> Result<usize, CatalogError> {
    let need_m = || p.m.ok_or(CatalogError::MissingParam { kind, name: "m" });
    let need_k = || p.k.ok_or(CatalogError::MissingParam { kind, name: "k" });
    Ok(match kind {
        BoundKind::Mi | BoundKind::CmiStd | BoundKind::LooCmi | BoundKind::LmoCmi => 1,
        BoundKind::Imi | BoundKind::Icimi | BoundKind::Sicimi | BoundKind::MnIpcimi => {
            p.n as usize
        }
        BoundKind::Ipmi | BoundKind::IpcimiBounded | BoundKind::VarIpcimi => {
            need_k()? as usize
        }
        BoundKind::LofoCmi => need_m()? as usize,
        BoundKind::Sipcimi | BoundKind::LmoScmi => (p.n + need_m()?) as usize,
        BoundKind::LooScmi => p.n as usize + 1,
        BoundKind::GeneralCgf | BoundKind::JsPred | BoundKind::JsPredSingle => 0,
    })
}

/// Coefficient pair (outer_factor, inner_coefficient) so the bound reads
/// outer * sum_i sqrt(inner * I_i). The square root always sits inside the
/// sum.
fn coefficients(kind: BoundKind, p: &BoundParams) -> Result<(f64, f64), CatalogError> {
    let n = p.n as f64;
    let get_m = || -> Result<f64, CatalogError> {
        Ok(p.m.ok_or(CatalogError::MissingParam { kind, name: "m" })? as f64)
    };
    let get_k = || -> Result<f64, CatalogError> {
        Ok(p.k.ok_or(CatalogError::MissingParam { kind, name: "k" })? as f64)
    };
    let cfg = |m: f64, k: f64| {
        PartitionConfig::new(p.n, m as u32, k as u32).expect("validated by caller")
    };
    Ok(match kind {
        BoundKind::Mi => (1.0, 1.0 / (2.0 * n)),
        BoundKind::Imi => (1.0 / n, 0.5),
        BoundKind::Ipmi => {
            let k = get_k()?;
            (1.0 / k, k / (2.0 * n))
        }
        BoundKind::CmiStd => (1.0, 2.0 / n),
        BoundKind::Icimi => (1.0 / n, 2.0),
        BoundKind::LooCmi => ((n + 1.0) / n, 0.5),
        BoundKind::IpcimiBounded => {
            let (m, k) = (get_m()?, get_k()?);
            let delta = p.delta.ok_or(CatalogError::MissingParam { kind, name: "delta" })?;
            let c = coefficient_c(&cfg(m, k));
            (1.0 / k, delta * delta * c * k * (n + m) / (2.0 * n * m))
        }
        BoundKind::LmoCmi => {
            let m = get_m()?;
            let delta = p.delta.unwrap_or(1.0);
            let c = coefficient_c(&cfg(m, 1.0));
            (1.0, delta * delta * c * (n + m) / (2.0 * n * m))
        }
        BoundKind::LofoCmi => {
            let m = get_m()?;
            ((n + m) / (n * m), 0.5)
        }
        BoundKind::MnIpcimi => {
            let m = get_m()?;
            ((n + m) / (n * m), 0.5)
        }
        BoundKind::Sipcimi | BoundKind::LmoScmi => {
            let m = get_m()?;
            (1.0, 1.0 / (2.0 * n * m))
        }
        BoundKind::Sicimi => (1.0 / n, 2.0),
        BoundKind::LooScmi => (1.0, 1.0 / (2.0 * n)),
        BoundKind::VarIpcimi => {
            let (m, k) = (get_m()?, get_k()?);
            (1.0 / k, k * (n + m) / (n * m))
        }
        BoundKind::GeneralCgf | BoundKind::JsPred | BoundKind::JsPredSingle => (1.0, 1.0),
    })
}

/// Assemble a bound from its per-term information quantities (nats).
pub fn assemble(
    kind: BoundKind,
    per_term: &[f64],
    params: BoundParams,
) -> Result<BoundValue, CatalogError> {
    let expected = expected_terms(kind, &params)?;
    if expected != 0 && per_term.len() != expected {
        return Err(CatalogError::TermCount { kind, expected, got: per_term.len() });
    }
    if let Some(&bad) = per_term.iter().find(|&&v| v < 0.0) {
        return Err(CatalogError::NegativeInfo(bad));
    }
    let (outer, inner) = coefficients(kind, &params)?;
    let value = outer * per_term.iter().map(|&i| (inner * i).sqrt()).sum::<f64>();
    Ok(BoundValue {
        kind,
        value,
        outer_factor: outer,
        inner_coefficient: inner,
        per_term: per_term.to_vec(),
        info_total: per_term.iter().sum(),
        stderr: 0.0,
        params,
    })
}

/// Assemble a bound whose per-term quantities are all equal, the common case
/// for exchangeable instances.
pub fn assemble_uniform(
    kind: BoundKind,
    info: f64,
    params: BoundParams,
) -> Result<BoundValue, CatalogError> {
    let count = expected_terms(kind, &params)?.max(1);
    assemble(kind, &vec![info; count], params)
}

/// Assemble the disintegrated form of an SCMI bound: each term is the
/// conditioning-distribution average of sqrt(inner * I^z), with the same
/// coefficient rule as the integrated kind.
pub fn assemble_disintegrated(
    kind: BoundKind,
    weighted_infos: &[(f64, f64)],
    params: BoundParams,
) -> Result<BoundValue, CatalogError> {
    match kind {
        BoundKind::Sicimi | BoundKind::LooScmi | BoundKind::LmoScmi | BoundKind::Sipcimi => {}
        other => {
            return Err(CatalogError::MissingParam {
                kind: other,
                name: "disintegrated form only defined for SCMI kinds",
            })
        }
    }
    let count = expected_terms(kind, &params)?;
    let (outer, inner) = coefficients(kind, &params)?;
    let mut term = 0.0;
    let mut info_mean = 0.0;
    for &(w, i) in weighted_infos {
        if i < 0.0 {
            return Err(CatalogError::NegativeInfo(i));
        }
        term += w * (inner * i).sqrt();
        info_mean += w * i;
    }
    let value = outer * count as f64 * term;
    Ok(BoundValue {
        kind,
        value,
        outer_factor: outer,
        inner_coefficient: inner,
        per_term: vec![info_mean; count],
        info_total: info_mean * count as f64,
        stderr: 0.0,
        params,
    })
}

/// Result of the scalar CGF optimization inf_{lambda>0} (info + psi(lambda))/lambda.
#[derive(Debug, Clone, Copy)]
pub struct LambdaOpt {
    pub lambda: f64,
    pub value: f64,
}

/// Minimize (info + psi(lambda))/lambda over lambda > 0 by a log-spaced grid
/// scan followed by golden-section refinement. Non-finite psi evaluations
/// shrink the feasible range.
pub fn lambda_optimize(
    info: f64,
    psi: impl Fn(f64) -> f64,
    lambda_range: (f64, f64),
) -> Result<LambdaOpt, CatalogError> {
    const GRID: usize = 400;
    let (lo, hi) = lambda_range;
    debug_assert!(lo > 0.0 && hi > lo);
    let objective = |lam: f64| -> f64 {
        let v = psi(lam);
        if v.is_finite() {
            (info + v) / lam
        } else {
            f64::INFINITY
        }
    };
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut best = f64::INFINITY;
    let mut best_i = usize::MAX;
    let mut grid = Vec::with_capacity(GRID);
    for i in 0..GRID {
        let lam = (llo + (lhi - llo) * i as f64 / (GRID - 1) as f64).exp();
        grid.push(lam);
        let v = objective(lam);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    if best_i == usize::MAX {
        return Err(CatalogError::EmptyLambdaRange);
    }
    let a = grid[best_i.saturating_sub(1)];
    let b = grid[(best_i + 1).min(GRID - 1)];
    let refined = golden_min(&objective, a, b, 1e-8, 200);
    Ok(LambdaOpt { lambda: refined.0, value: refined.1.min(best) })
}

fn golden_min(
    f: &impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    rel_tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() <= rel_tol * b.abs() {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    if fm <= fc && fm <= fd {
        (mid, fm)
    } else if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Mode of the JS prediction bound: one information term per block or one
/// per (block, position).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsMode {
    Blockwise,
    Single,
}

/// Upper bound on the population risk from the JS prediction bound:
/// d_JS^{-1}(n/(n+m), emp_risk, c) with c = 2/(n+m) * info_sum (blockwise
/// I(Lambda^(i); U^(i)) terms) or c = 1/(n+m) * info_sum (per-sample
/// I(Lambda^(i)_j; U^(i)) terms).
pub fn js_population_bound(
    emp_risk: Prob,
    info_sum: f64,
    cfg: &PartitionConfig,
    mode: JsMode,
) -> Prob {
    assert!(info_sum >= 0.0, "information must be non-negative");
    let t = (cfg.n() + cfg.m()) as f64;
    let c = match mode {
        JsMode::Blockwise => 2.0 / t * info_sum,
        JsMode::Single => 1.0 / t * info_sum,
    };
    let theta = JsWeight::new(cfg.n() as f64 / t).expect("n, m >= 1 keeps theta interior");
    d_js_inverse(theta, emp_risk, c)
}
