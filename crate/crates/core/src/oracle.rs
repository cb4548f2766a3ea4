//! Exact ground truth by exhaustive enumeration of the joint distribution
//! over (hypothesis, supersample, membership) for tiny binary-data
//! instances. Supports plug-in (conditional, disintegrated) mutual
//! information for arbitrary variable combinations, exact conditional CGFs,
//! and the 0-1-loss equality checks.

use crate::divergence::{binary_entropy, d_js, JsWeight, Prob};
use crate::supersample::PartitionConfig;
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("supersample size {0} exceeds the enumeration limit of 14")]
    TooLarge(u32),
    #[error("enumeration size {0} exceeds 1e8 states")]
    TooManyStates(f64),
    #[error("p={0} outside [0, 1]")]
    InvalidP(f64),
    #[error("query block {block} or position {pos} out of range")]
    BadQuery { block: usize, pos: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// W = mean of the n training samples (values x/n, x integer).
    AverageErm,
    /// W = majority bit of the training samples, ties broken toward 1.
    MajorityVote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossKind {
    /// (w - z)^2
    Quadratic,
    /// 1{w != z}
    ZeroOne,
}

#[derive(Debug, Clone, Copy)]
pub struct TinyInstance {
    pub cfg: PartitionConfig,
    pub p: f64,
    pub algorithm: Algorithm,
    pub loss: LossKind,
}

/// One enumerated state: data bits, membership bits (1 = training), the
/// induced hypothesis numerator, and the exact probability weight.
#[derive(Debug, Clone, Copy)]
struct Atom {
    z_bits: u32,
    u_bits: u32,
    w_num: i32,
    prob: f64,
}

pub struct JointTable {
    inst: TinyInstance,
    atoms: Vec<Atom>,
    /// Local training-subset masks of one block (shared by all blocks).
    subset_masks: Vec<u32>,
}

/// Enumerate every (data, membership) state with its exact weight.
pub fn enumerate_joint(inst: TinyInstance) -> Result<JointTable, OracleError> {
    let cfg = &inst.cfg;
    let total = cfg.n() + cfg.m();
    if total > 14 {
        return Err(OracleError::TooLarge(total));
    }
    if !(0.0..=1.0).contains(&inst.p) {
        return Err(OracleError::InvalidP(inst.p));
    }
    let block_len = cfg.block_len();
    let subset_masks = subsets_of(block_len, cfg.train_per_block());
    let states =
        2f64.powi(total as i32) * (subset_masks.len() as f64).powi(cfg.k() as i32);
    if states > 1e8 {
        return Err(OracleError::TooManyStates(states));
    }

    let k = cfg.k() as usize;
    let memb_prob = 1.0 / (subset_masks.len() as f64).powi(cfg.k() as i32);
    // data realizations are independent work items; per-item atom groups are
    // concatenated in index order so the table is deterministic
    let groups: Vec<Vec<Atom>> = (0u32..(1 << total))
        .into_par_iter()
        .map(|z_bits| {
            let ones = z_bits.count_ones();
            let pz = inst.p.powi(ones as i32) * (1.0 - inst.p).powi((total - ones) as i32);
            let mut group = Vec::with_capacity(subset_masks.len().pow(cfg.k()));
            let mut combo = vec![0usize; k];
            loop {
                let mut u_bits = 0u32;
                for (i, &ci) in combo.iter().enumerate() {
                    u_bits |= subset_masks[ci] << (i as u32 * block_len);
                }
                let train_ones = (z_bits & u_bits).count_ones() as i32;
                let w_num = match inst.algorithm {
                    Algorithm::AverageErm => train_ones,
                    Algorithm::MajorityVote => i32::from(2 * train_ones >= cfg.n() as i32),
                };
                group.push(Atom { z_bits, u_bits, w_num, prob: pz * memb_prob });
                // odometer over per-block subset choices
                let mut pos = 0;
                loop {
                    if pos == k {
                        break;
                    }
                    combo[pos] += 1;
                    if combo[pos] < subset_masks.len() {
                        break;
                    }
                    combo[pos] = 0;
                    pos += 1;
                }
                if pos == k {
                    break;
                }
            }
            group
        })
        .collect();
    let atoms: Vec<Atom> = groups.into_iter().flatten().collect();
    Ok(JointTable { inst, atoms, subset_masks })
}

fn subsets_of(len: u32, take: u32) -> Vec<u32> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << len) {
        if mask.count_ones() == take {
            out.push(mask);
        }
    }
    out
}

/// Variables derivable from a table state that can enter an information
/// query. Positions are 0-based within a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfoQuery {
    /// I(W; U_[n] | Zhat_[n+m])
    HypVsAllMembership,
    /// I(W; U^(i) | Zhat^(i))
    HypVsBlockMembership { block: usize },
    /// I(W; U^(i) | Zhat^(i)_j)
    HypVsMembershipGivenSingle { block: usize, pos: usize },
    /// I(W; T^(i)_j | Zhat^(i)_j)
    HypVsIndicatorGivenSingle { block: usize, pos: usize },
    /// I(W; value of the slot-th selected training sample of a block)
    HypVsTrainValue { block: usize, slot: usize },
    /// I(W; ordered tuple of block-i training values)
    HypVsTrainData { block: usize },
    /// I(W; Zhat^(i))
    HypVsBlockData { block: usize },
    /// I(Lambda^(i); U^(i)) over the block's joint loss vector
    BlockLossesVsMembership { block: usize },
    /// I(Lambda^(i)_j; U^(i))
    SingleLossVsMembership { block: usize, pos: usize },
    /// I(Lambda^(i)_j; T^(i)_j)
    SingleLossVsIndicator { block: usize, pos: usize },
}

impl JointTable {
    pub fn instance(&self) -> &TinyInstance {
        &self.inst
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.prob).sum()
    }

    /// Marginal distribution of the hypothesis, keyed by its exact integer
    /// numerator (denominator n for the averaging rule, 1 for majority).
    pub fn hypothesis_marginal(&self) -> Vec<(i32, f64)> {
        let mut acc: HashMap<i32, f64> = HashMap::new();
        for a in &self.atoms {
            *acc.entry(a.w_num).or_insert(0.0) += a.prob;
        }
        let mut out: Vec<(i32, f64)> = acc.into_iter().collect();
        out.sort_by_key(|&(w, _)| w);
        out
    }

    pub fn hypothesis_entropy(&self) -> f64 {
        self.hypothesis_marginal()
            .iter()
            .filter(|&&(_, pr)| pr > 0.0)
            .map(|&(_, pr)| -pr * pr.ln())
            .sum()
    }

    fn block_len(&self) -> u32 {
        self.inst.cfg.block_len()
    }

    fn block_mask(&self) -> u32 {
        (1 << self.block_len()) - 1
    }

    fn block_bits(&self, bits: u32, block: usize) -> u128 {
        ((bits >> (block as u32 * self.block_len())) & self.block_mask()) as u128
    }

    fn single_bit(&self, bits: u32, block: usize, pos: usize) -> u128 {
        ((bits >> (block as u32 * self.block_len() + pos as u32)) & 1) as u128
    }

    /// Exact loss value of the sample at (block, pos) for the atom's
    /// hypothesis, as an integer numerator (denominator n^2 for the
    /// averaging rule with quadratic loss, 1 otherwise).
    fn loss_num(&self, a: &Atom, block: usize, pos: usize) -> i64 {
        let z = self.single_bit(a.z_bits, block, pos) as i64;
        let n = self.inst.cfg.n() as i64;
        match (self.inst.algorithm, self.inst.loss) {
            (Algorithm::AverageErm, LossKind::Quadratic) => {
                let d = a.w_num as i64 - n * z;
                d * d
            }
            (Algorithm::AverageErm, LossKind::ZeroOne) => i64::from(a.w_num as i64 != n * z),
            (Algorithm::MajorityVote, LossKind::Quadratic)
            | (Algorithm::MajorityVote, LossKind::ZeroOne) => {
                i64::from(a.w_num as i64 != z)
            }
        }
    }

    fn loss_value(&self, a: &Atom, block: usize, pos: usize) -> f64 {
        let num = self.loss_num(a, block, pos) as f64;
        match (self.inst.algorithm, self.inst.loss) {
            (Algorithm::AverageErm, LossKind::Quadratic) => {
                let n = self.inst.cfg.n() as f64;
                num / (n * n)
            }
            _ => num,
        }
    }

    fn train_values_key(&self, a: &Atom, block: usize) -> u128 {
        // training bits of the block in ascending index order
        let memb = (a.u_bits >> (block as u32 * self.block_len())) & self.block_mask();
        let data = (a.z_bits >> (block as u32 * self.block_len())) & self.block_mask();
        let mut key = 1u128; // leading sentinel keeps lengths unambiguous
        for j in 0..self.block_len() {
            if memb & (1 << j) != 0 {
                key = key << 1 | ((data >> j) & 1) as u128;
            }
        }
        key
    }

    fn block_loss_key(&self, a: &Atom, block: usize) -> u128 {
        let mut key = 0u128;
        for j in 0..self.block_len() as usize {
            key = key << 9 | (self.loss_num(a, block, j) as u128 & 0x1ff);
        }
        key
    }

    /// Exact plug-in (conditional) mutual information in nats.
    pub fn info_query(&self, q: InfoQuery) -> Result<f64, OracleError> {
        self.check_query(q)?;
        let x = |a: &Atom| a.w_num as u128;
        let value = match q {
            InfoQuery::HypVsAllMembership => {
                self.cmi(x, |a| a.u_bits as u128, |a| a.z_bits as u128)
            }
            InfoQuery::HypVsBlockMembership { block } => self.cmi(
                x,
                |a| self.block_bits(a.u_bits, block),
                |a| self.block_bits(a.z_bits, block),
            ),
            InfoQuery::HypVsMembershipGivenSingle { block, pos } => self.cmi(
                x,
                |a| self.block_bits(a.u_bits, block),
                |a| self.single_bit(a.z_bits, block, pos),
            ),
            InfoQuery::HypVsIndicatorGivenSingle { block, pos } => self.cmi(
                x,
                |a| self.single_bit(a.u_bits, block, pos),
                |a| self.single_bit(a.z_bits, block, pos),
            ),
            InfoQuery::HypVsTrainValue { block, slot } => self.cmi(
                x,
                |a| {
                    let key = self.train_values_key(a, block);
                    let len = self.inst.cfg.train_per_block() as usize;
                    (key >> (len - 1 - slot)) & 1
                },
                |_| 0,
            ),
            InfoQuery::HypVsTrainData { block } => {
                self.cmi(x, |a| self.train_values_key(a, block), |_| 0)
            }
            InfoQuery::HypVsBlockData { block } => {
                self.cmi(x, |a| self.block_bits(a.z_bits, block), |_| 0)
            }
            InfoQuery::BlockLossesVsMembership { block } => self.cmi(
                |a| self.block_loss_key(a, block),
                |a| self.block_bits(a.u_bits, block),
                |_| 0,
            ),
            InfoQuery::SingleLossVsMembership { block, pos } => self.cmi(
                |a| self.loss_num(a, block, pos) as u128,
                |a| self.block_bits(a.u_bits, block),
                |_| 0,
            ),
            InfoQuery::SingleLossVsIndicator { block, pos } => self.cmi(
                |a| self.loss_num(a, block, pos) as u128,
                |a| self.single_bit(a.u_bits, block, pos),
                |_| 0,
            ),
        };
        Ok(value)
    }

    fn check_query(&self, q: InfoQuery) -> Result<(), OracleError> {
        let (block, pos) = match q {
            InfoQuery::HypVsAllMembership => (0, 0),
            InfoQuery::HypVsBlockMembership { block }
            | InfoQuery::HypVsTrainData { block }
            | InfoQuery::HypVsBlockData { block }
            | InfoQuery::BlockLossesVsMembership { block } => (block, 0),
            InfoQuery::HypVsMembershipGivenSingle { block, pos }
            | InfoQuery::HypVsIndicatorGivenSingle { block, pos }
            | InfoQuery::SingleLossVsMembership { block, pos }
            | InfoQuery::SingleLossVsIndicator { block, pos } => (block, pos),
            InfoQuery::HypVsTrainValue { block, slot } => (block, slot),
        };
        let pos_bound = match q {
            InfoQuery::HypVsTrainValue { .. } => self.inst.cfg.train_per_block() as usize,
            _ => self.block_len() as usize,
        };
        if block >= self.inst.cfg.k() as usize || pos >= pos_bound {
            return Err(OracleError::BadQuery { block, pos });
        }
        Ok(())
    }

    /// I(X; Y | Z) from exact enumeration.
    fn cmi(
        &self,
        fx: impl Fn(&Atom) -> u128,
        fy: impl Fn(&Atom) -> u128,
        fz: impl Fn(&Atom) -> u128,
    ) -> f64 {
        let mut pxyz: HashMap<(u128, u128, u128), f64> = HashMap::new();
        let mut pxz: HashMap<(u128, u128), f64> = HashMap::new();
        let mut pyz: HashMap<(u128, u128), f64> = HashMap::new();
        let mut pz: HashMap<u128, f64> = HashMap::new();
        for a in &self.atoms {
            let (x, y, z) = (fx(a), fy(a), fz(a));
            *pxyz.entry((x, y, z)).or_insert(0.0) += a.prob;
            *pxz.entry((x, z)).or_insert(0.0) += a.prob;
            *pyz.entry((y, z)).or_insert(0.0) += a.prob;
            *pz.entry(z).or_insert(0.0) += a.prob;
        }
        let mut out = 0.0;
        for (&(x, y, z), &pr) in &pxyz {
            if pr > 0.0 {
                out += pr * (pr * pz[&z] / (pxz[&(x, z)] * pyz[&(y, z)])).ln();
            }
        }
        out.max(0.0)
    }

    /// Disintegrated I^{Zhat^(i)_j = z}(W; U^(i)).
    pub fn dis_membership_info(&self, block: usize, pos: usize, zval: u8) -> f64 {
        self.dis_mi(
            |a| a.w_num as u128,
            |a| self.block_bits(a.u_bits, block),
            |a| self.single_bit(a.z_bits, block, pos) == zval as u128,
        )
    }

    /// Disintegrated I^{Zhat^(i)_j = z}(W; T^(i)_j).
    pub fn dis_indicator_info(&self, block: usize, pos: usize, zval: u8) -> f64 {
        self.dis_mi(
            |a| a.w_num as u128,
            |a| self.single_bit(a.u_bits, block, pos),
            |a| self.single_bit(a.z_bits, block, pos) == zval as u128,
        )
    }

    fn dis_mi(
        &self,
        fx: impl Fn(&Atom) -> u128,
        fy: impl Fn(&Atom) -> u128,
        keep: impl Fn(&Atom) -> bool,
    ) -> f64 {
        let mut pxy: HashMap<(u128, u128), f64> = HashMap::new();
        let mut px: HashMap<u128, f64> = HashMap::new();
        let mut py: HashMap<u128, f64> = HashMap::new();
        let mut tot = 0.0;
        for a in self.atoms.iter().filter(|a| keep(a)) {
            let (x, y) = (fx(a), fy(a));
            *pxy.entry((x, y)).or_insert(0.0) += a.prob;
            *px.entry(x).or_insert(0.0) += a.prob;
            *py.entry(y).or_insert(0.0) += a.prob;
            tot += a.prob;
        }
        let mut out = 0.0;
        for (&(x, y), &pr) in &pxy {
            if pr > 0.0 {
                out += pr * (pr * tot / (px[&x] * py[&y])).ln();
            }
        }
        (out / tot).max(0.0)
    }

    /// Expected empirical and population risks (L_hat, L_mu) over the table.
    pub fn emp_pop_risk(&self) -> (f64, f64) {
        let cfg = &self.inst.cfg;
        let (mut lhat, mut lmu) = (0.0, 0.0);
        for a in &self.atoms {
            let (mut train, mut test) = (0.0, 0.0);
            for i in 0..cfg.k() as usize {
                for j in 0..cfg.block_len() as usize {
                    let v = self.loss_value(a, i, j);
                    let in_train =
                        a.u_bits >> (i as u32 * cfg.block_len() + j as u32) & 1 == 1;
                    if in_train {
                        train += v;
                    } else {
                        test += v;
                    }
                }
            }
            lhat += a.prob * train / cfg.n() as f64;
            lmu += a.prob * test / cfg.m() as f64;
        }
        (lhat, lmu)
    }

    /// Exact expectation of the leave-m-out cross-validation error.
    pub fn exact_cv_expectation(&self) -> f64 {
        let (lhat, lmu) = self.emp_pop_risk();
        lmu - lhat
    }

    /// Largest loss difference sup |l(w, z) - l(w, z')| over the table's
    /// hypothesis support, used as Delta in the CGF bound.
    pub fn loss_delta(&self) -> f64 {
        let mut seen: Vec<i32> = self.atoms.iter().map(|a| a.w_num).collect();
        seen.sort_unstable();
        seen.dedup();
        let n = self.inst.cfg.n() as f64;
        let mut delta: f64 = 0.0;
        for &w_num in &seen {
            let w = match self.inst.algorithm {
                Algorithm::AverageErm => w_num as f64 / n,
                Algorithm::MajorityVote => w_num as f64,
            };
            let l = |z: f64| match self.inst.loss {
                LossKind::Quadratic => (w - z) * (w - z),
                LossKind::ZeroOne => f64::from(w != z),
            };
            delta = delta.max((l(0.0) - l(1.0)).abs());
        }
        delta
    }

    /// Exact conditional CGF of the decoupled pair for one block: the
    /// supremum over block realizations b of
    /// log sum_w P(w | b) E_U[exp(lambda * eps(w, b, U))].
    pub fn exact_cgf(&self, block: usize, lambda: f64) -> f64 {
        let cfg = &self.inst.cfg;
        let block_len = cfg.block_len() as usize;
        // P(w, b) over the block's data bits
        let mut pwb: HashMap<(i32, u32), f64> = HashMap::new();
        let mut pb: HashMap<u32, f64> = HashMap::new();
        for a in &self.atoms {
            let b = (a.z_bits >> (block as u32 * cfg.block_len())) & self.block_mask();
            *pwb.entry((a.w_num, b)).or_insert(0.0) += a.prob;
            *pb.entry(b).or_insert(0.0) += a.prob;
        }
        let kf = cfg.k() as f64;
        let (nf, mf) = (cfg.n() as f64, cfg.m() as f64);
        let n = cfg.n() as f64;
        let mut worst = f64::NEG_INFINITY;
        for (&b, &prb) in &pb {
            let mut acc = 0.0;
            for (&(w_num, bb), &pr) in &pwb {
                if bb != b {
                    continue;
                }
                let w = match self.inst.algorithm {
                    Algorithm::AverageErm => w_num as f64 / n,
                    Algorithm::MajorityVote => w_num as f64,
                };
                let losses: Vec<f64> = (0..block_len)
                    .map(|j| {
                        let z = ((b >> j) & 1) as f64;
                        match self.inst.loss {
                            LossKind::Quadratic => (w - z) * (w - z),
                            LossKind::ZeroOne => f64::from(w != z),
                        }
                    })
                    .collect();
                let total: f64 = losses.iter().sum();
                let mut e_exp = 0.0;
                for &mask in &self.subset_masks {
                    let train: f64 = losses
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| mask >> j & 1 == 1)
                        .map(|(_, &v)| v)
                        .sum();
                    let eps = kf / mf * (total - train) - kf / nf * train;
                    e_exp += (lambda * eps).exp();
                }
                acc += pr / prb * e_exp / self.subset_masks.len() as f64;
            }
            worst = worst.max(acc.ln());
        }
        worst
    }
}

/// Quantities and identity checks for the 0-1-loss equality theorem and the
/// permutation-invariance propositions.
#[derive(Debug, Clone)]
pub struct ZeroOneReport {
    pub emp_risk: f64,
    pub pop_risk: f64,
    /// Weighted binary JS divergence between the risks, theta = n/(n+m).
    pub js_divergence: f64,
    /// (1/(n+m)) * sum over (i, j) of I(Lambda^(i)_j; U^(i)).
    pub loss_info_sum: f64,
    /// Channel-matrix mutual information of the indicator-to-loss channel.
    pub channel_info: f64,
    /// Largest |I(W; T | Zhat_j) - I(W; U | Zhat_j)| over (i, j).
    pub processed_gap: f64,
    /// Largest spread of the disintegrated single-sample information across
    /// all valid partition counts k.
    pub k_invariance_gap: f64,
}

impl ZeroOneReport {
    pub fn violations(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        if (self.js_divergence - self.loss_info_sum).abs() > tol {
            out.push(format!(
                "JS equality violated: d_JS={} vs loss info sum={}",
                self.js_divergence, self.loss_info_sum
            ));
        }
        if (self.js_divergence - self.channel_info).abs() > tol {
            out.push(format!(
                "channel identity violated: d_JS={} vs channel MI={}",
                self.js_divergence, self.channel_info
            ));
        }
        if self.processed_gap > tol {
            out.push(format!("processed/unprocessed gap {}", self.processed_gap));
        }
        if self.k_invariance_gap > tol {
            out.push(format!("k-invariance gap {}", self.k_invariance_gap));
        }
        out
    }
}

/// Run the 0-1-loss equality and invariance checks for a permutation
/// invariant majority-vote learner on the (n, m) geometry, scanning every
/// valid k.
pub fn zero_one_equality_report(n: u32, m: u32, p: f64) -> Result<ZeroOneReport, OracleError> {
    let ks = crate::supersample::divisor_set(n, m);
    let mut js_divergence = 0.0;
    let mut loss_info_sum = 0.0;
    let mut channel_info = 0.0;
    let mut emp_risk = 0.0;
    let mut pop_risk = 0.0;
    let mut processed_gap: f64 = 0.0;
    let mut dis_ranges: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (ki, &k) in ks.iter().enumerate() {
        let cfg = PartitionConfig::new(n, m, k).expect("divisor set yields valid configs");
        let table = enumerate_joint(TinyInstance {
            cfg,
            p,
            algorithm: Algorithm::MajorityVote,
            loss: LossKind::ZeroOne,
        })?;
        let (lhat, lmu) = table.emp_pop_risk();
        let theta = JsWeight::new(n as f64 / (n + m) as f64).expect("theta interior");
        let js = d_js(
            theta,
            Prob::new(lhat).expect("risk in range"),
            Prob::new(lmu).expect("risk in range"),
        );
        let mut info = 0.0;
        for i in 0..k as usize {
            for j in 0..cfg.block_len() as usize {
                info += table
                    .info_query(InfoQuery::SingleLossVsMembership { block: i, pos: j })?;
                let a = table
                    .info_query(InfoQuery::HypVsIndicatorGivenSingle { block: i, pos: j })?;
                let b = table
                    .info_query(InfoQuery::HypVsMembershipGivenSingle { block: i, pos: j })?;
                processed_gap = processed_gap.max((a - b).abs());
                for zv in 0..2u8 {
                    dis_ranges[zv as usize].push(table.dis_membership_info(i, j, zv));
                }
            }
        }
        info /= (n + m) as f64;
        if ki == 0 {
            emp_risk = lhat;
            pop_risk = lmu;
            js_divergence = js;
            loss_info_sum = info;
            channel_info = bac_channel_info(lhat, lmu, theta.value());
        }
    }
    let mut k_invariance_gap: f64 = 0.0;
    for vals in &dis_ranges {
        if let (Some(lo), Some(hi)) = (
            vals.iter().cloned().reduce(f64::min),
            vals.iter().cloned().reduce(f64::max),
        ) {
            k_invariance_gap = k_invariance_gap.max(hi - lo);
        }
    }
    Ok(ZeroOneReport {
        emp_risk,
        pop_risk,
        js_divergence,
        loss_info_sum,
        channel_info,
        processed_gap,
        k_invariance_gap,
    })
}

/// Mutual information of the binary asymmetric channel from the training
/// indicator to the 0-1 loss, with transition rows (1-L_mu, L_mu) for T=0
/// and (1-L_hat, L_hat) for T=1 and input prior P(T=1) = theta.
pub fn bac_channel_info(emp_risk: f64, pop_risk: f64, theta: f64) -> f64 {
    let out1 = theta * emp_risk + (1.0 - theta) * pop_risk;
    let hb = |x: f64| binary_entropy(Prob::new(x).expect("probability in range"));
    (hb(out1) - theta * hb(emp_risk) - (1.0 - theta) * hb(pop_risk)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table(n: u32, m: u32, k: u32, p: f64) -> JointTable {
        enumerate_joint(TinyInstance {
            cfg: PartitionConfig::new(n, m, k).unwrap(),
            p,
            algorithm: Algorithm::AverageErm,
            loss: LossKind::Quadratic,
        })
        .unwrap()
    }

    #[test]
    fn uniform_case_atom_weights() {
        let t = table(1, 1, 1, 0.5);
        assert_eq!(t.atoms.len(), 8);
        for a in &t.atoms {
            assert_abs_diff_eq!(a.prob, 1.0 / 8.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn total_weight_is_one() {
        use crate::supersample::{derive_rng, divisor_set};
        use rand::Rng;
        let mut rng = derive_rng(17, 0);
        for _ in 0..20 {
            let n = rng.gen_range(1..=4u32);
            let m = rng.gen_range(1..=4u32);
            let ks = divisor_set(n, m);
            let k = ks[rng.gen_range(0..ks.len())];
            let p = rng.gen_range(0.05..0.95);
            let t = table(n, m, k, p);
            assert_abs_diff_eq!(t.total_weight(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn hypothesis_marginal_is_binomial() {
        // W marginal for average ERM equals the Binomial(n, p) pushforward
        let t = table(2, 2, 1, 0.3);
        let marg = t.hypothesis_marginal();
        let expect = [(0, 0.49), (1, 0.42), (2, 0.09)];
        for ((w, pr), (ew, epr)) in marg.iter().zip(expect) {
            assert_eq!(*w, ew);
            assert_abs_diff_eq!(*pr, epr, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_hypothesis_has_zero_information() {
        // p = 0 makes every sample zero, so W is constant
        let t = table(2, 1, 1, 0.0);
        assert_eq!(t.info_query(InfoQuery::HypVsAllMembership).unwrap(), 0.0);
    }

    #[test]
    fn loo_information_matches_hand_computation() {
        // frozen from a 30-digit evaluation of the n=2 closed form
        let t = table(2, 1, 1, 0.3);
        let got = t.info_query(InfoQuery::HypVsAllMembership).unwrap();
        assert_abs_diff_eq!(got, 0.401003926025732076, epsilon = 1e-12);
    }

    #[test]
    fn data_processing_inequality() {
        for (n, m, k) in [(2, 2, 1), (2, 2, 2), (3, 3, 3)] {
            let t = table(n, m, k, 0.3);
            let a = t
                .info_query(InfoQuery::HypVsIndicatorGivenSingle { block: 0, pos: 0 })
                .unwrap();
            let b = t
                .info_query(InfoQuery::HypVsMembershipGivenSingle { block: 0, pos: 0 })
                .unwrap();
            assert!(a <= b + 1e-12);
        }
    }

    #[test]
    fn cv_expectation_matches_true_gen_error() {
        for (n, m, k, p) in [(2, 2, 1, 0.3), (3, 3, 3, 0.6), (2, 4, 2, 0.5)] {
            let t = table(n, m, k, p);
            let expect = 2.0 * p * (1.0 - p) / n as f64;
            assert_abs_diff_eq!(t.exact_cv_expectation(), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn chain_rule_identity() {
        // I(W; U^(i) | Zhat^(i)) = I(W; Z^(i)) - I(W; Zhat^(i))
        for (n, m, k) in [(2, 2, 1), (2, 2, 2), (3, 3, 3), (2, 4, 2)] {
            let t = table(n, m, k, 0.3);
            let lhs = t.info_query(InfoQuery::HypVsBlockMembership { block: 0 }).unwrap();
            let train = t.info_query(InfoQuery::HypVsTrainData { block: 0 }).unwrap();
            let block = t.info_query(InfoQuery::HypVsBlockData { block: 0 }).unwrap();
            assert_abs_diff_eq!(lhs, train - block, epsilon = 1e-9);
        }
    }

    #[test]
    fn cgf_at_zero_and_for_constant_losses() {
        let t = table(2, 2, 1, 0.4);
        assert_abs_diff_eq!(t.exact_cgf(0, 0.0), 0.0, epsilon = 1e-12);
        // p = 1 forces all samples to 1 and all losses equal
        let t = table(2, 2, 1, 1.0);
        for lam in [-3.0, -0.5, 0.5, 3.0] {
            assert_abs_diff_eq!(t.exact_cgf(0, lam), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_one_degenerate_p() {
        let rep = zero_one_equality_report(3, 1, 0.0).unwrap();
        assert_eq!(rep.emp_risk, 0.0);
        assert_eq!(rep.pop_risk, 0.0);
        assert_eq!(rep.js_divergence, 0.0);
        assert!(rep.violations(1e-9).is_empty());
    }

    #[test]
    fn zero_one_equality_majority_vote() {
        let rep = zero_one_equality_report(3, 1, 0.3).unwrap();
        assert!(rep.violations(1e-9).is_empty(), "{:?}", rep.violations(1e-9));
        let rep = zero_one_equality_report(2, 2, 0.3).unwrap();
        assert!(rep.violations(1e-9).is_empty(), "{:?}", rep.violations(1e-9));
    }

    #[test]
    fn size_guard() {
        let cfg = PartitionConfig::new(10, 10, 1).unwrap();
        let err = enumerate_joint(TinyInstance {
            cfg,
            p: 0.5,
            algorithm: Algorithm::AverageErm,
            loss: LossKind::Quadratic,
        });
        assert!(matches!(err, Err(OracleError::TooLarge(20))));
    }
}
