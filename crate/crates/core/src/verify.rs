//! End-to-end verification: one check per acceptance criterion, each
//! returning the measured deviation against its pinned tolerance. The fast
//! set covers the exact and statistical identities; the full set adds the
//! figure-level sweep assertions.

use crate::bernoulli::{self, BernoulliInstance, InfoKind};
use crate::catalog::{self, BoundKind, BoundParams};
use crate::divergence::{
    binary_entropy, d_gamma_supremum, d_js, d_js_inverse, d_kl_binary, JsWeight, Prob,
};
use crate::gaussian::{
    self, FiniteWKind, GaussianInstance, GaussianLoss, GeneralKind, McConfig,
};
use crate::oracle::{self, Algorithm, InfoQuery, LossKind, TinyInstance};
use crate::supersample::{
    cv_error, derive_rng, divisor_set, sample_membership, LossTable, PartitionConfig,
};
use rand::Rng;
use rand_distr::StandardNormal;

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured deviation (check-specific units).
    pub measured: f64,
    pub tolerance: f64,
    pub details: String,
}

impl CheckResult {
    fn finish(
        name: &'static str,
        measured: f64,
        tolerance: f64,
        extra_pass: bool,
        details: String,
    ) -> Self {
        CheckResult {
            name,
            passed: measured <= tolerance && extra_pass,
            measured,
            tolerance,
            details,
        }
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{}: {} (measured {:.3e}, tolerance {:.3e}){}",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.measured,
            self.tolerance,
            if self.details.is_empty() { String::new() } else { format!(" - {}", self.details) },
        )
    }
}

fn prob(v: f64) -> Prob {
    Prob::new(v).expect("probability in range")
}

/// Criterion 1: every closed-form Bernoulli information quantity matches
/// exact enumeration within 1e-9 across the small-instance grid.
pub fn criterion_1_oracle_equivalence() -> CheckResult {
    let mut worst: f64 = 0.0;
    let mut cases = 0usize;
    let mut check = |closed: f64, exact: f64| {
        worst = worst.max((closed - exact).abs());
        cases += 1;
    };
    for n in 1..=3u32 {
        for m in 1..=3u32 {
            for k in divisor_set(n, m) {
                for p in [0.2, 0.5, 0.8] {
                    let cfg = PartitionConfig::new(n, m, k).unwrap();
                    let table = oracle::enumerate_joint(TinyInstance {
                        cfg,
                        p,
                        algorithm: Algorithm::AverageErm,
                        loss: LossKind::Quadratic,
                    })
                    .unwrap();
                    let inst = BernoulliInstance::new(n, m, k, p).unwrap();
                    let q = |kind| bernoulli::info_quantity(kind, &inst).unwrap().value;

                    check(q(InfoKind::MiFull), table.hypothesis_entropy());
                    check(
                        q(InfoKind::Imi),
                        table
                            .info_query(InfoQuery::HypVsTrainValue { block: 0, slot: 0 })
                            .unwrap(),
                    );
                    check(
                        q(InfoKind::IpmiBlock),
                        table.info_query(InfoQuery::HypVsTrainData { block: 0 }).unwrap(),
                    );
                    if k == 1 {
                        let all = table.info_query(InfoQuery::HypVsAllMembership).unwrap();
                        check(q(InfoKind::LmoCmi), all);
                        if m == 1 {
                            check(q(InfoKind::LooCmi), all);
                        }
                        let single = table
                            .info_query(InfoQuery::HypVsMembershipGivenSingle {
                                block: 0,
                                pos: 0,
                            })
                            .unwrap();
                        check(q(InfoKind::LmoScmi), single);
                        if m == 1 {
                            check(q(InfoKind::LooScmi), single);
                        }
                        for zv in 0..2u8 {
                            let dis = bernoulli::dis_info_quantity(InfoKind::LmoScmi, &inst, zv)
                                .unwrap()
                                .value;
                            check(dis, table.dis_membership_info(0, 0, zv));
                        }
                    }
                    if m == n && k == n {
                        check(
                            q(InfoKind::Icimi),
                            table
                                .info_query(InfoQuery::HypVsBlockMembership { block: 0 })
                                .unwrap(),
                        );
                        check(
                            q(InfoKind::Sicimi),
                            table
                                .info_query(InfoQuery::HypVsMembershipGivenSingle {
                                    block: 0,
                                    pos: 0,
                                })
                                .unwrap(),
                        );
                        for zv in 0..2u8 {
                            let dis = bernoulli::dis_info_quantity(InfoKind::Sicimi, &inst, zv)
                                .unwrap()
                                .value;
                            check(dis, table.dis_membership_info(0, 0, zv));
                        }
                    }
                    if k == m && n % m == 0 {
                        check(
                            q(InfoKind::LofoCmi),
                            table
                                .info_query(InfoQuery::HypVsBlockMembership { block: 0 })
                                .unwrap(),
                        );
                    }
                    if k == n && m % n == 0 && m >= n {
                        check(
                            q(InfoKind::MnIpcimi),
                            table
                                .info_query(InfoQuery::HypVsBlockMembership { block: 0 })
                                .unwrap(),
                        );
                    }
                }
            }
        }
    }
    CheckResult::finish(
        "C1 oracle equivalence of closed forms",
        worst,
        1e-9,
        true,
        format!("{cases} (kind, instance) comparisons"),
    )
}

/// Monte-Carlo mean and standard error of the cross-validation error for
/// Bernoulli data with the averaging learner and quadratic loss.
pub fn mc_cv_error_bernoulli(
    cfg: &PartitionConfig,
    p: f64,
    draws: usize,
    seed: u64,
) -> (f64, f64) {
    let total = (cfg.n() + cfg.m()) as usize;
    let mut rng = derive_rng(seed, 0);
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for _ in 0..draws {
        let z: Vec<f64> = (0..total).map(|_| f64::from(rng.gen_bool(p))).collect();
        let draw = sample_membership(cfg, &mut rng);
        let w = training_mean(cfg, &z, &draw);
        let losses: Vec<f64> = z.iter().map(|&zi| (w - zi) * (w - zi)).collect();
        let table = LossTable::new(cfg, losses).unwrap();
        let cv = cv_error(&table, &draw, cfg).unwrap().overall;
        acc += cv;
        acc2 += cv * cv;
    }
    finish_mean_se(acc, acc2, draws)
}

/// Same harness for Gaussian data.
pub fn mc_cv_error_gaussian(
    cfg: &PartitionConfig,
    mu: f64,
    sigma: f64,
    draws: usize,
    seed: u64,
) -> (f64, f64) {
    let total = (cfg.n() + cfg.m()) as usize;
    let mut rng = derive_rng(seed, 0);
    let mut acc = 0.0;
    let mut acc2 = 0.0;
    for _ in 0..draws {
        let z: Vec<f64> = (0..total)
            .map(|_| mu + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let draw = sample_membership(cfg, &mut rng);
        let w = training_mean(cfg, &z, &draw);
        let losses: Vec<f64> = z.iter().map(|&zi| (w - zi) * (w - zi)).collect();
        let table = LossTable::new(cfg, losses).unwrap();
        let cv = cv_error(&table, &draw, cfg).unwrap().overall;
        acc += cv;
        acc2 += cv * cv;
    }
    finish_mean_se(acc, acc2, draws)
}

fn training_mean(
    cfg: &PartitionConfig,
    z: &[f64],
    draw: &crate::supersample::MembershipDraw,
) -> f64 {
    let block_len = cfg.block_len() as usize;
    let mut sum = 0.0;
    for (i, subset) in draw.subsets().iter().enumerate() {
        for &j in subset {
            sum += z[i * block_len + j as usize];
        }
    }
    sum / cfg.n() as f64
}

fn finish_mean_se(acc: f64, acc2: f64, draws: usize) -> (f64, f64) {
    let n = draws as f64;
    let mean = acc / n;
    let var = (acc2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Criterion 2: the Monte-Carlo cross-validation error is an unbiased
/// estimate of the true generalization error for both examples.
pub fn criterion_2_unbiased_cv(seed: u64) -> CheckResult {
    let draws = 100_000;
    let cfg = PartitionConfig::new(10, 10, 2).unwrap();
    let p = 0.4;
    let (mean_b, se_b) = mc_cv_error_bernoulli(&cfg, p, draws, seed);
    let target_b = bernoulli::true_gen_error(10, p);
    let dev_b = (mean_b - target_b).abs() / se_b;

    let cfg = PartitionConfig::new(10, 5, 5).unwrap();
    let (mean_g, se_g) = mc_cv_error_gaussian(&cfg, 0.7, 1.0, draws, seed + 1);
    let target_g = 2.0 / 10.0;
    let dev_g = (mean_g - target_g).abs() / se_g;

    CheckResult::finish(
        "C2 cross-validation error unbiasedness",
        dev_b.max(dev_g),
        3.0,
        true,
        format!(
            "bernoulli {mean_b:.5} vs {target_b:.5} ({dev_b:.2} se), gaussian {mean_g:.5} vs {target_g:.5} ({dev_g:.2} se)"
        ),
    )
}

/// Criterion 3: the leave-one-out bound converges to sqrt(H(p)/2).
pub fn criterion_3_loo_constant() -> CheckResult {
    let p = 0.4;
    let target = (binary_entropy(prob(p)) / 2.0).sqrt();
    let mut worst: f64 = 0.0;
    for n in [1_000u32, 2_000, 5_000] {
        let inst = BernoulliInstance::new(n, 1, 1, p).unwrap();
        let info = bernoulli::info_quantity(InfoKind::LooCmi, &inst).unwrap().value;
        let bound =
            catalog::assemble_uniform(BoundKind::LooCmi, info, BoundParams::of_n(n)).unwrap();
        worst = worst.max((bound.value - target).abs());
    }
    CheckResult::finish(
        "C3 leave-one-out bound constant limit",
        worst,
        0.02,
        true,
        format!("target {target:.6}"),
    )
}

fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Criterion 4: the individual-MI and paired-CMI bounds decay like
/// 1/sqrt(n).
pub fn criterion_4_decay_slopes() -> CheckResult {
    let p = 0.4;
    let grid = [10u32, 20, 50, 100, 200, 500, 1_000];
    let mut imi = Vec::new();
    let mut icimi = Vec::new();
    for &n in &grid {
        let inst = BernoulliInstance::new(n, 1, 1, p).unwrap();
        let vi = bernoulli::info_quantity(InfoKind::Imi, &inst).unwrap().value;
        let vc = bernoulli::info_quantity(InfoKind::Icimi, &inst).unwrap().value;
        imi.push((
            n as f64,
            catalog::assemble_uniform(BoundKind::Imi, vi, BoundParams::of_n(n))
                .unwrap()
                .value,
        ));
        icimi.push((
            n as f64,
            catalog::assemble_uniform(BoundKind::Icimi, vc, BoundParams::of_n(n))
                .unwrap()
                .value,
        ));
    }
    let s_imi = log_log_slope(&imi);
    let s_icimi = log_log_slope(&icimi);
    let dev = (s_imi + 0.5).abs().max((s_icimi + 0.5).abs());
    CheckResult::finish(
        "C4 decay slopes of IMI and ICIMI bounds",
        dev,
        0.05,
        true,
        format!("IMI slope {s_imi:.4}, ICIMI slope {s_icimi:.4}"),
    )
}

/// Criterion 5: the leave-m-out bounds converge to their MI-family limits
/// and decrease in m.
pub fn criterion_5_lmo_convergence() -> CheckResult {
    let (n, p) = (10u32, 0.4);
    let mi_inst = BernoulliInstance::new(n, 1, 1, p).unwrap();
    let mi = catalog::assemble_uniform(
        BoundKind::Mi,
        bernoulli::info_quantity(InfoKind::MiFull, &mi_inst).unwrap().value,
        BoundParams::of_n(n),
    )
    .unwrap()
    .value;
    let imi = catalog::assemble_uniform(
        BoundKind::Imi,
        bernoulli::info_quantity(InfoKind::Imi, &mi_inst).unwrap().value,
        BoundParams::of_n(n),
    )
    .unwrap()
    .value;
    let mut lmo_col = Vec::new();
    let mut mn_col = Vec::new();
    for m in [100u32, 1_000, 10_000] {
        let inst = BernoulliInstance::new(n, m, 1, p).unwrap();
        let lmo_info = bernoulli::info_quantity(InfoKind::LmoCmi, &inst).unwrap().value;
        lmo_col.push(
            catalog::assemble_uniform(
                BoundKind::LmoCmi,
                lmo_info,
                BoundParams::of_n(n).with_m(m).with_delta(1.0),
            )
            .unwrap()
            .value,
        );
        let inst = BernoulliInstance::new(n, m, n, p).unwrap();
        let mn_info = bernoulli::info_quantity(InfoKind::MnIpcimi, &inst).unwrap().value;
        mn_col.push(
            catalog::assemble_uniform(
                BoundKind::MnIpcimi,
                mn_info,
                BoundParams::of_n(n).with_m(m),
            )
            .unwrap()
            .value,
        );
    }
    let monotone = lmo_col.windows(2).all(|w| w[1] <= w[0] + 1e-12)
        && mn_col.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let dev = (lmo_col[2] - mi).abs().max((mn_col[2] - imi).abs());
    CheckResult::finish(
        "C5 leave-m-out convergence to MI-family bounds",
        dev,
        0.02,
        monotone,
        format!(
            "lmo(1e4)={:.5} vs mi={mi:.5}; mn(1e4)={:.5} vs imi={imi:.5}; monotone={monotone}",
            lmo_col[2], mn_col[2]
        ),
    )
}

/// Criterion 6: Gaussian general-form comparison at m = n/2: the
/// leave-one-fold-out bound against the paired-block bound and the closed
/// form, with two-standard-error margins. Measured value is the worst
/// (most negative) margin.
pub fn criterion_6_gaussian_general(seed: u64) -> CheckResult {
    let mut worst_margin = f64::INFINITY;
    let mut details = String::new();
    for n in [10u32, 20, 40] {
        let m = n / 2;
        let inst = GaussianInstance::new(n, m, 0.0, 1.0, GaussianLoss::Quadratic).unwrap();
        let mc = McConfig { seed, ..Default::default() };
        let lofo = gaussian::general_bound_mc(GeneralKind::LofoGeneral, &inst, &mc).unwrap();
        let mc = McConfig { seed: seed + 1, ..Default::default() };
        let icimi = gaussian::general_bound_mc(GeneralKind::IcimiGeneral, &inst, &mc).unwrap();
        let imi = gaussian::gaussian_imi_closed(n, 1.0).unwrap();
        let margin_icimi = icimi.value
            - lofo.value
            - 2.0 * (icimi.stderr * icimi.stderr + lofo.stderr * lofo.stderr).sqrt();
        let margin_imi = imi.value - lofo.value - 2.0 * lofo.stderr;
        worst_margin = worst_margin.min(margin_icimi).min(margin_imi);
        details.push_str(&format!(
            "n={n}: lofo={:.4}({:.4}) icimi={:.4}({:.4}) imi={:.4} margins=({:+.4},{:+.4}); ",
            lofo.value, lofo.stderr, icimi.value, icimi.stderr, imi.value, margin_icimi,
            margin_imi
        ));
    }
    CheckResult::finish(
        "C6 Gaussian general-form ordering at m=n/2",
        -worst_margin,
        0.0,
        true,
        details,
    )
}

/// Criterion 7: finite-hypothesis Gaussian comparison at m = 2: the
/// leave-one-fold-out bound beats the other three with two-standard-error
/// margins.
pub fn criterion_7_finite_w(seed: u64) -> CheckResult {
    let mut worst_margin = f64::INFINITY;
    let mut details = String::new();
    for n in [10u32, 20, 40] {
        let inst =
            GaussianInstance::new(n, 2, 1.0, 0.5, GaussianLoss::TruncatedQuadratic).unwrap();
        let mc = McConfig { outer: 20_000, seed, ..Default::default() };
        let lofo = gaussian::finite_w_bound(FiniteWKind::LofoCmi, &inst, &mc).unwrap();
        let mc = McConfig { outer: 20_000, seed: seed + 1, ..Default::default() };
        let loo = gaussian::finite_w_bound(FiniteWKind::LooCmi, &inst, &mc).unwrap();
        let imi = gaussian::finite_w_bound(FiniteWKind::Imi, &inst, &mc).unwrap();
        let icimi = gaussian::finite_w_bound(FiniteWKind::Icimi, &inst, &mc).unwrap();
        let mut local = f64::INFINITY;
        for other in [&loo, &imi, &icimi] {
            let margin = other.value
                - lofo.value
                - 2.0 * (other.stderr * other.stderr + lofo.stderr * lofo.stderr).sqrt();
            local = local.min(margin);
        }
        worst_margin = worst_margin.min(local);
        details.push_str(&format!(
            "n={n}: lofo={:.3e} imi={:.3e} icimi={:.3e} loo={:.3e} margin={:+.2e}; ",
            lofo.value, imi.value, icimi.value, loo.value, local
        ));
    }
    CheckResult::finish(
        "C7 finite-hypothesis ordering at m=2",
        -worst_margin,
        0.0,
        true,
        details,
    )
}

/// Criterion 8: the disintegrated single-conditioning leave-m-out bound
/// improves with m and beats the paired-setting variant at m = 1e4.
pub fn criterion_8_disintegrated_scmi() -> CheckResult {
    let (n, p) = (10u32, 0.25);
    let sic_inst = BernoulliInstance::new(n, n, n, p).unwrap();
    let sic = catalog::assemble_disintegrated(
        BoundKind::Sicimi,
        &[
            (1.0 - p, bernoulli::dis_info_quantity(InfoKind::Sicimi, &sic_inst, 0).unwrap().value),
            (p, bernoulli::dis_info_quantity(InfoKind::Sicimi, &sic_inst, 1).unwrap().value),
        ],
        BoundParams::of_n(n),
    )
    .unwrap()
    .value;
    let mut col = Vec::new();
    for m in [100u32, 1_000, 10_000] {
        let inst = BernoulliInstance::new(n, m, 1, p).unwrap();
        let v = catalog::assemble_disintegrated(
            BoundKind::LmoScmi,
            &[
                (1.0 - p, bernoulli::dis_info_quantity(InfoKind::LmoScmi, &inst, 0).unwrap().value),
                (p, bernoulli::dis_info_quantity(InfoKind::LmoScmi, &inst, 1).unwrap().value),
            ],
            BoundParams::of_n(n).with_m(m),
        )
        .unwrap()
        .value;
        col.push(v);
    }
    let monotone = col.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let below = col[2] < sic;
    CheckResult::finish(
        "C8 disintegrated SCMI improves with m",
        if below { 0.0 } else { col[2] - sic },
        0.0,
        monotone && below,
        format!("column {col:?} vs paired-setting {sic:.6}; monotone={monotone}"),
    )
}

/// Criterion 9: the exact enumerated CGF respects the bounded-difference
/// bound lambda^2 Delta^2 C k (n+m) / (8 n m) on a lambda grid.
pub fn criterion_9_cgf_bound(seed: u64) -> CheckResult {
    let mut rng = derive_rng(seed, 0);
    let mut worst = f64::NEG_INFINITY;
    let mut tested = 0;
    while tested < 10 {
        let n = rng.gen_range(1..=4u32);
        let m = rng.gen_range(1..=4u32);
        let ks = divisor_set(n, m);
        let k = ks[rng.gen_range(0..ks.len())];
        let p = rng.gen_range(0.1..0.9);
        let cfg = PartitionConfig::new(n, m, k).unwrap();
        let table = oracle::enumerate_joint(TinyInstance {
            cfg,
            p,
            algorithm: Algorithm::AverageErm,
            loss: LossKind::Quadratic,
        })
        .unwrap();
        let delta = table.loss_delta();
        let c = catalog::coefficient_c(&cfg);
        let scale =
            delta * delta * c * k as f64 * (n + m) as f64 / (8.0 * n as f64 * m as f64);
        for i in 0..41 {
            let lam = -5.0 + 0.25 * i as f64;
            for block in 0..k as usize {
                let lhs = table.exact_cgf(block, lam);
                worst = worst.max(lhs - lam * lam * scale);
            }
        }
        tested += 1;
    }
    CheckResult::finish(
        "C9 exact CGF within the bounded-difference envelope",
        worst.max(0.0),
        1e-10,
        true,
        format!("{tested} randomized instances, 41-point lambda grid"),
    )
}

/// Criterion 10: the 0-1-loss JS equality, the processed/unprocessed
/// identity, the k-invariance of the disintegrated single-sample
/// information, and the dual inverse-JS representation.
pub fn criterion_10_zero_one_equalities() -> CheckResult {
    let mut worst: f64 = 0.0;
    for (n, m, p) in [(3, 1, 0.3), (2, 2, 0.3), (2, 2, 0.5), (3, 3, 0.4), (2, 4, 0.25)] {
        let report = oracle::zero_one_equality_report(n, m, p).unwrap();
        worst = worst
            .max((report.js_divergence - report.loss_info_sum).abs())
            .max((report.js_divergence - report.channel_info).abs())
            .max(report.processed_gap)
            .max(report.k_invariance_gap);
    }
    // dual representation: the leave-one-out and paired supersample
    // encodings invert to the same population risk
    let n = 3u32;
    let p = 0.3;
    let loo = oracle::enumerate_joint(TinyInstance {
        cfg: PartitionConfig::new(n, 1, 1).unwrap(),
        p,
        algorithm: Algorithm::MajorityVote,
        loss: LossKind::ZeroOne,
    })
    .unwrap();
    let std = oracle::enumerate_joint(TinyInstance {
        cfg: PartitionConfig::new(n, n, n).unwrap(),
        p,
        algorithm: Algorithm::MajorityVote,
        loss: LossKind::ZeroOne,
    })
    .unwrap();
    let (lhat, lmu) = loo.emp_pop_risk();
    let i_loo = loo
        .info_query(InfoQuery::SingleLossVsMembership { block: 0, pos: 0 })
        .unwrap();
    let i_std = std
        .info_query(InfoQuery::SingleLossVsMembership { block: 0, pos: 0 })
        .unwrap();
    assert!(lhat <= lmu, "dual check assumes the empirical risk is smaller");
    let inv_loo = d_js_inverse(
        JsWeight::new(n as f64 / (n as f64 + 1.0)).unwrap(),
        prob(lhat),
        i_loo,
    )
    .value();
    let inv_std = d_js_inverse(JsWeight::new(0.5).unwrap(), prob(lhat), i_std).value();
    worst = worst.max((inv_loo - lmu).abs()).max((inv_std - lmu).abs());
    CheckResult::finish(
        "C10 zero-one loss equalities and invariances",
        worst,
        1e-9,
        true,
        format!("dual inversions {inv_loo:.9} / {inv_std:.9} vs population risk {lmu:.9}"),
    )
}

/// Criterion 11: divergence toolkit properties.
pub fn criterion_11_divergence_toolkit(seed: u64) -> CheckResult {
    let mut rng = derive_rng(seed, 0);
    let mut worst_sup: f64 = 0.0;
    for _ in 0..100 {
        let p = rng.gen_range(0.05..0.95);
        let q = rng.gen_range(0.05..0.95);
        let sup = d_gamma_supremum(prob(p), prob(q));
        let kl = d_kl_binary(prob(p), prob(q)).unwrap();
        worst_sup = worst_sup.max((sup - kl).abs());
    }
    let mut worst_floor: f64 = 0.0;
    for _ in 0..10_000 {
        let theta = rng.gen_range(0.01..0.99);
        let p = rng.gen_range(0.0..=1.0);
        let q = rng.gen_range(0.0..=1.0);
        let js = d_js(JsWeight::new(theta).unwrap(), prob(p), prob(q));
        let floor = 2.0 * theta * (1.0 - theta) * (p - q) * (p - q);
        worst_floor = worst_floor.max(floor - js);
    }
    let mut worst_round: f64 = 0.0;
    for _ in 0..200 {
        let theta = JsWeight::new(rng.gen_range(0.05..0.95)).unwrap();
        let p = prob(rng.gen_range(0.0..0.95));
        let c = rng.gen_range(0.0..0.3);
        let q = d_js_inverse(theta, p, c);
        if q.value() < 1.0 {
            worst_round = worst_round.max((d_js(theta, p, q) - c).abs());
        }
    }
    // deviations normalized by their per-property tolerances
    let measured = (worst_sup / 1e-4).max(worst_floor / 1e-12).max(worst_round / 1e-9);
    CheckResult::finish(
        "C11 divergence toolkit properties",
        measured,
        1.0,
        true,
        format!(
            "sup gap {worst_sup:.2e} (tol 1e-4), floor violation {worst_floor:.2e} (tol 1e-12), round trip {worst_round:.2e} (tol 1e-9)"
        ),
    )
}

/// Criterion 12: the lambda-optimized general individual-MI bound with the
/// exact sub-Gaussian CGF proxy matches the Gaussian closed form.
pub fn criterion_12_gaussian_imi_crosscheck() -> CheckResult {
    let sigma = 1.0f64;
    let mut worst: f64 = 0.0;
    for n in [2u32, 10, 100] {
        let nf = n as f64;
        let info = 0.5 * (nf / (nf - 1.0)).ln();
        let s2 = sigma * sigma * (nf + 1.0) / nf;
        let proxy = 2.0 * s2 * s2;
        let opt =
            catalog::lambda_optimize(info, |l| l * l * proxy / 2.0, (1e-4, 1e4)).unwrap();
        let closed = gaussian::gaussian_imi_closed(n, sigma).unwrap().value;
        worst = worst.max((opt.value - closed).abs() / closed);
    }
    CheckResult::finish(
        "C12 lambda-optimized IMI matches the Gaussian closed form",
        worst,
        1e-3,
        true,
        String::new(),
    )
}

/// Coefficient-rule consistency and bound validity: the special-case
/// coefficient rules agree with the unified bounded-difference rule at
/// their (m, k) settings, and every assembled closed-form bound dominates
/// the true generalization error on a small Bernoulli grid.
pub fn coefficient_validity_check() -> CheckResult {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    // special cases of the unified rule
    let info = 0.23;
    let pairs: [(&str, BoundKind, BoundParams, BoundParams); 4] = [
        (
            "LooCmi",
            BoundKind::LooCmi,
            BoundParams::of_n(7),
            BoundParams::of_n(7).with_m(1).with_k(1).with_delta(1.0),
        ),
        (
            "Icimi",
            BoundKind::Icimi,
            BoundParams::of_n(7),
            BoundParams::of_n(7).with_m(7).with_k(7).with_delta(1.0),
        ),
        (
            "LofoCmi",
            BoundKind::LofoCmi,
            BoundParams::of_n(6).with_m(2),
            BoundParams::of_n(6).with_m(2).with_k(2).with_delta(1.0),
        ),
        (
            "MnIpcimi",
            BoundKind::MnIpcimi,
            BoundParams::of_n(3).with_m(6),
            BoundParams::of_n(3).with_m(6).with_k(3).with_delta(1.0),
        ),
    ];
    for (name, kind, params, unified) in pairs {
        let a = catalog::assemble_uniform(kind, info, params).unwrap().value;
        let b = catalog::assemble_uniform(BoundKind::IpcimiBounded, info, unified)
            .unwrap()
            .value;
        let dev = (a - b).abs();
        worst = worst.max(dev / 1e-12);
        if dev > 1e-12 {
            bad.push(format!("{name} vs unified rule: {a} != {b}"));
        }
    }
    // every assembled closed-form bound dominates the true error
    for n in [2u32, 4, 10, 30] {
        for p in [0.2, 0.5] {
            let target = bernoulli::true_gen_error(n, p);
            let mut check = |label: &str, value: f64| {
                if value < target - 1e-12 {
                    bad.push(format!("{label} at n={n}, p={p}: {value} < {target}"));
                    worst = worst.max(2.0);
                }
            };
            let inst = BernoulliInstance::new(n, n, n, p).unwrap();
            let q = |kind| bernoulli::info_quantity(kind, &inst).unwrap().value;
            let bp = BoundParams::of_n(n);
            check(
                "mi",
                catalog::assemble_uniform(BoundKind::Mi, q(InfoKind::MiFull), bp)
                    .unwrap()
                    .value,
            );
            check(
                "imi",
                catalog::assemble_uniform(BoundKind::Imi, q(InfoKind::Imi), bp)
                    .unwrap()
                    .value,
            );
            check(
                "icimi",
                catalog::assemble_uniform(BoundKind::Icimi, q(InfoKind::Icimi), bp)
                    .unwrap()
                    .value,
            );
            check(
                "loo-cmi",
                catalog::assemble_uniform(BoundKind::LooCmi, q(InfoKind::LooCmi), bp)
                    .unwrap()
                    .value,
            );
            check(
                "lmo-cmi",
                catalog::assemble_uniform(
                    BoundKind::LmoCmi,
                    q(InfoKind::LmoCmi),
                    bp.with_m(n).with_delta(1.0),
                )
                .unwrap()
                .value,
            );
            check(
                "lofo-cmi(m=n)",
                catalog::assemble_uniform(BoundKind::LofoCmi, q(InfoKind::LofoCmi), bp.with_m(n))
                    .unwrap()
                    .value,
            );
            check(
                "mn-ipcimi(m=n)",
                catalog::assemble_uniform(
                    BoundKind::MnIpcimi,
                    q(InfoKind::MnIpcimi),
                    bp.with_m(n),
                )
                .unwrap()
                .value,
            );
            check(
                "sicimi",
                catalog::assemble_uniform(BoundKind::Sicimi, q(InfoKind::Sicimi), bp)
                    .unwrap()
                    .value,
            );
            check(
                "loo-scmi",
                catalog::assemble_uniform(BoundKind::LooScmi, q(InfoKind::LooScmi), bp)
                    .unwrap()
                    .value,
            );
            check(
                "lmo-scmi",
                catalog::assemble_uniform(BoundKind::LmoScmi, q(InfoKind::LmoScmi), bp.with_m(n))
                    .unwrap()
                    .value,
            );
        }
    }
    CheckResult::finish(
        "X1 coefficient rules and bound validity",
        worst,
        1.0,
        bad.is_empty(),
        if bad.is_empty() { String::new() } else { bad.join("; ") },
    )
}

/// The exact and statistical identities; completes in well under a minute.
pub fn fast_checks(seed: u64) -> Vec<CheckResult> {
    vec![
        criterion_1_oracle_equivalence(),
        criterion_2_unbiased_cv(seed),
        criterion_3_loo_constant(),
        criterion_4_decay_slopes(),
        criterion_8_disintegrated_scmi(),
        criterion_9_cgf_bound(seed),
        criterion_10_zero_one_equalities(),
        criterion_11_divergence_toolkit(seed),
        criterion_12_gaussian_imi_crosscheck(),
        coefficient_validity_check(),
    ]
}

/// All checks, including the figure-level sweep assertions.
pub fn full_checks(seed: u64) -> Vec<CheckResult> {
    let mut out = fast_checks(seed);
    out.push(criterion_5_lmo_convergence());
    out.push(criterion_6_gaussian_general(seed));
    out.push(criterion_7_finite_w(seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cv_harness_is_unbiased_at_small_size() {
        let cfg = PartitionConfig::new(2, 2, 1).unwrap();
        let (mean, se) = mc_cv_error_bernoulli(&cfg, 0.5, 40_000, 9);
        let target = bernoulli::true_gen_error(2, 0.5);
        assert!((mean - target).abs() <= 3.0 * se, "{mean} vs {target} (se {se})");
    }

    #[test]
    fn slope_fit_recovers_power_laws() {
        let pts: Vec<(f64, f64)> = (1..20).map(|i| (i as f64, (i as f64).powf(-0.5))).collect();
        assert!((log_log_slope(&pts) + 0.5).abs() < 1e-12);
    }
}
