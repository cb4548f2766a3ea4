//! Single-bound evaluation by name, shared by the sweep presets and the
//! `bound` subcommand.

use crate::csv::ResultRow;
use lmo_bounds::bernoulli::{self, BernoulliInstance, InfoKind};
use lmo_bounds::catalog::{self, BoundKind, BoundParams, JsMode};
use lmo_bounds::divergence::Prob;
use lmo_bounds::gaussian::{
    self, FiniteWKind, GaussianInstance, GaussianLoss, GeneralKind, McConfig,
};
use lmo_bounds::oracle::{self, Algorithm, InfoQuery, LossKind, TinyInstance};
use lmo_bounds::supersample::PartitionConfig;

/// Scalar parameters a bound evaluation may consume.
#[derive(Debug, Clone, Copy)]
pub struct EvalParams {
    pub n: u32,
    pub m: u32,
    pub k: u32,
    pub p: f64,
    pub mu: f64,
    pub sigma: f64,
    pub delta: f64,
    pub seed: u64,
    pub mc: McConfig,
}

pub const BOUND_NAMES: &[&str] = &[
    "true-gen",
    "mi",
    "imi",
    "ipmi",
    "cmi-std",
    "icimi",
    "loo-cmi",
    "lmo-cmi",
    "lofo-cmi",
    "mn-ipcimi",
    "ipcimi",
    "var-ipcimi",
    "sicimi",
    "loo-scmi",
    "lmo-scmi",
    "sicimi-dis",
    "loo-scmi-dis",
    "lmo-scmi-dis",
    "js-pred",
    "js-pred-single",
    "true-gen-gaussian",
    "imi-gaussian",
    "icimi-general",
    "lofo-general",
    "imi-w",
    "icimi-w",
    "loo-cmi-w",
    "lofo-cmi-w",
];

fn bernoulli_row(
    name: &str,
    p: &EvalParams,
    value: f64,
    provenance: &'static str,
) -> ResultRow {
    ResultRow {
        bound: name.to_string(),
        n: p.n,
        m: p.m,
        k: p.k,
        param: format!("p={}", p.p),
        value,
        stderr: 0.0,
        provenance,
        seed: p.seed,
    }
}

fn gaussian_row(name: &str, p: &EvalParams, value: f64, stderr: f64, provenance: &'static str) -> ResultRow {
    ResultRow {
        bound: name.to_string(),
        n: p.n,
        m: p.m,
        k: p.k,
        param: format!("mu={};sigma={}", p.mu, p.sigma),
        value,
        stderr,
        provenance,
        seed: p.seed,
    }
}

fn closed(kind: InfoKind, p: &EvalParams) -> Result<f64, String> {
    let inst = BernoulliInstance::new(p.n, p.m.max(1), p.k.max(1), p.p)
        .map_err(|e| e.to_string())?;
    Ok(bernoulli::info_quantity(kind, &inst).map_err(|e| e.to_string())?.value)
}

fn dis_pair(kind: InfoKind, p: &EvalParams) -> Result<[(f64, f64); 2], String> {
    let inst = BernoulliInstance::new(p.n, p.m.max(1), p.k.max(1), p.p)
        .map_err(|e| e.to_string())?;
    let d0 = bernoulli::dis_info_quantity(kind, &inst, 0).map_err(|e| e.to_string())?.value;
    let d1 = bernoulli::dis_info_quantity(kind, &inst, 1).map_err(|e| e.to_string())?.value;
    Ok([(1.0 - p.p, d0), (p.p, d1)])
}

fn assemble_uniform(kind: BoundKind, info: f64, params: BoundParams) -> Result<f64, String> {
    Ok(catalog::assemble_uniform(kind, info, params).map_err(|e| e.to_string())?.value)
}

/// Per-block conditional information I(W; U^(i) | Zhat^(i)) at a general
/// (n, m, k). Closed forms exist for k = 1, k = m and k = n; any other k
/// falls back to exact enumeration on tiny instances.
fn block_cmi_info(p: &EvalParams) -> Result<(f64, &'static str), String> {
    let (n, m, k) = (p.n, p.m, p.k);
    if k == 1 {
        return Ok((closed(InfoKind::LmoCmi, p)?, "closed-form"));
    }
    if k == m && n % m == 0 {
        return Ok((closed(InfoKind::LofoCmi, p)?, "closed-form"));
    }
    if k == n && m % n == 0 {
        let kind = if m == n { InfoKind::Icimi } else { InfoKind::MnIpcimi };
        return Ok((closed(kind, p)?, "closed-form"));
    }
    let cfg = PartitionConfig::new(n, m, k).map_err(|e| e.to_string())?;
    let table = oracle::enumerate_joint(TinyInstance {
        cfg,
        p: p.p,
        algorithm: Algorithm::AverageErm,
        loss: LossKind::Quadratic,
    })
    .map_err(|e| format!("no closed form for this (n, m, k); oracle fallback failed: {e}"))?;
    let info = table
        .info_query(InfoQuery::HypVsBlockMembership { block: 0 })
        .map_err(|e| e.to_string())?;
    Ok((info, "oracle"))
}

/// Evaluate one bound by CLI name. Errors are descriptive strings suitable
/// for usage reporting.
pub fn evaluate(name: &str, p: &EvalParams) -> Result<ResultRow, String> {
    let bp = BoundParams::of_n(p.n);
    match name {
        "true-gen" => Ok(bernoulli_row(name, p, bernoulli::true_gen_error(p.n, p.p), "closed-form")),
        "true-gen-gaussian" => Ok(gaussian_row(
            name,
            p,
            2.0 * p.sigma * p.sigma / p.n as f64,
            0.0,
            "closed-form",
        )),
        "mi" => {
            let v = assemble_uniform(BoundKind::Mi, closed(InfoKind::MiFull, p)?, bp)?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "imi" => {
            let v = assemble_uniform(BoundKind::Imi, closed(InfoKind::Imi, p)?, bp)?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "ipmi" => {
            let v = assemble_uniform(
                BoundKind::Ipmi,
                closed(InfoKind::IpmiBlock, p)?,
                bp.with_k(p.k),
            )?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "cmi-std" => {
            // no closed form: exact enumeration of I(W; memberships | all
            // supersamples) on the paired geometry
            let cfg = PartitionConfig::new(p.n, p.n, p.n).map_err(|e| e.to_string())?;
            let table = oracle::enumerate_joint(TinyInstance {
                cfg,
                p: p.p,
                algorithm: Algorithm::AverageErm,
                loss: LossKind::Quadratic,
            })
            .map_err(|e| e.to_string())?;
            let info = table.info_query(InfoQuery::HypVsAllMembership).map_err(|e| e.to_string())?;
            let v = assemble_uniform(BoundKind::CmiStd, info, bp)?;
            Ok(bernoulli_row(name, p, v, "oracle"))
        }
        "icimi" => {
            let v = assemble_uniform(BoundKind::Icimi, closed(InfoKind::Icimi, p)?, bp)?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "loo-cmi" => {
            let v = assemble_uniform(BoundKind::LooCmi, closed(InfoKind::LooCmi, p)?, bp)?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "lmo-cmi" => {
            let v = assemble_uniform(
                BoundKind::LmoCmi,
                closed(InfoKind::LmoCmi, p)?,
                bp.with_m(p.m).with_delta(p.delta),
            )?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "lofo-cmi" => {
            let v = assemble_uniform(
                BoundKind::LofoCmi,
                closed(InfoKind::LofoCmi, p)?,
                bp.with_m(p.m),
            )?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "mn-ipcimi" => {
            let v = assemble_uniform(
                BoundKind::MnIpcimi,
                closed(InfoKind::MnIpcimi, p)?,
                bp.with_m(p.m),
            )?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "ipcimi" => {
            let (info, provenance) = block_cmi_info(p)?;
            let v = assemble_uniform(
                BoundKind::IpcimiBounded,
                info,
                bp.with_m(p.m).with_k(p.k).with_delta(p.delta),
            )?;
            Ok(bernoulli_row(name, p, v, provenance))
        }
        "var-ipcimi" => {
            let (info, provenance) = block_cmi_info(p)?;
            let v = assemble_uniform(BoundKind::VarIpcimi, info, bp.with_m(p.m).with_k(p.k))?;
            Ok(bernoulli_row(name, p, v, provenance))
        }
        "sicimi" => {
            let v = assemble_uniform(BoundKind::Sicimi, closed(InfoKind::Sicimi, p)?, bp)?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "loo-scmi" => {
            let v = assemble_uniform(BoundKind::LooScmi, closed(InfoKind::LooScmi, p)?, bp)?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "lmo-scmi" => {
            let v = assemble_uniform(
                BoundKind::LmoScmi,
                closed(InfoKind::LmoScmi, p)?,
                bp.with_m(p.m),
            )?;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "sicimi-dis" => {
            let pairs = dis_pair(InfoKind::Sicimi, p)?;
            let v = catalog::assemble_disintegrated(BoundKind::Sicimi, &pairs, bp)
                .map_err(|e| e.to_string())?
                .value;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "loo-scmi-dis" => {
            let pairs = dis_pair(InfoKind::LooScmi, p)?;
            let v = catalog::assemble_disintegrated(BoundKind::LooScmi, &pairs, bp)
                .map_err(|e| e.to_string())?
                .value;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "lmo-scmi-dis" => {
            let pairs = dis_pair(InfoKind::LmoScmi, p)?;
            let v =
                catalog::assemble_disintegrated(BoundKind::LmoScmi, &pairs, bp.with_m(p.m))
                    .map_err(|e| e.to_string())?
                    .value;
            Ok(bernoulli_row(name, p, v, "closed-form"))
        }
        "js-pred" | "js-pred-single" => {
            // population-risk bound for the 0-1-loss majority-vote learner,
            // with the loss information taken from exact enumeration
            let cfg = PartitionConfig::new(p.n, p.m, p.k).map_err(|e| e.to_string())?;
            let table = oracle::enumerate_joint(TinyInstance {
                cfg,
                p: p.p,
                algorithm: Algorithm::MajorityVote,
                loss: LossKind::ZeroOne,
            })
            .map_err(|e| e.to_string())?;
            let (lhat, _) = table.emp_pop_risk();
            let mut info = 0.0;
            let mode = if name == "js-pred" { JsMode::Blockwise } else { JsMode::Single };
            for i in 0..cfg.k() as usize {
                match mode {
                    JsMode::Blockwise => {
                        info += table
                            .info_query(InfoQuery::BlockLossesVsMembership { block: i })
                            .map_err(|e| e.to_string())?;
                    }
                    JsMode::Single => {
                        for j in 0..cfg.block_len() as usize {
                            info += table
                                .info_query(InfoQuery::SingleLossVsMembership {
                                    block: i,
                                    pos: j,
                                })
                                .map_err(|e| e.to_string())?;
                        }
                    }
                }
            }
            let v = catalog::js_population_bound(
                Prob::new(lhat).map_err(|e| e.to_string())?,
                info,
                &cfg,
                mode,
            )
            .value();
            Ok(bernoulli_row(name, p, v, "oracle"))
        }
        "imi-gaussian" => {
            let b = gaussian::gaussian_imi_closed(p.n, p.sigma).map_err(|e| e.to_string())?;
            Ok(gaussian_row(name, p, b.value, 0.0, "closed-form"))
        }
        "icimi-general" | "lofo-general" => {
            let inst = GaussianInstance::new(p.n, p.m, p.mu, p.sigma, GaussianLoss::Quadratic)
                .map_err(|e| e.to_string())?;
            let kind = if name == "icimi-general" {
                GeneralKind::IcimiGeneral
            } else {
                GeneralKind::LofoGeneral
            };
            let mc = McConfig { seed: p.seed, ..p.mc };
            let b = gaussian::general_bound_mc(kind, &inst, &mc).map_err(|e| e.to_string())?;
            Ok(gaussian_row(name, p, b.value, b.stderr, "monte-carlo"))
        }
        "imi-w" | "icimi-w" | "loo-cmi-w" | "lofo-cmi-w" => {
            let inst =
                GaussianInstance::new(p.n, p.m, p.mu, p.sigma, GaussianLoss::TruncatedQuadratic)
                    .map_err(|e| e.to_string())?;
            let kind = match name {
                "imi-w" => FiniteWKind::Imi,
                "icimi-w" => FiniteWKind::Icimi,
                "loo-cmi-w" => FiniteWKind::LooCmi,
                _ => FiniteWKind::LofoCmi,
            };
            let mc = McConfig { seed: p.seed, ..p.mc };
            let b = gaussian::finite_w_bound(kind, &inst, &mc).map_err(|e| e.to_string())?;
            // quadrature-only kinds carry no sampling error
            let provenance = if b.stderr == 0.0 { "closed-form" } else { "monte-carlo" };
            Ok(gaussian_row(name, p, b.value, b.stderr, provenance))
        }
        other => Err(format!(
            "unknown bound '{other}'; available: {}",
            BOUND_NAMES.join(", ")
        )),
    }
}
