//! Scalar divergences for Bernoulli-parameterized distributions: binary
//! entropy, binary KL, its gamma-relaxation, the weighted binary
//! Jensen-Shannon divergence and its numerical inverse.
//!
//! All quantities are in nats and use the convention 0 log 0 = 0.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DivergenceError {
    #[error("probability {0} outside [0, 1] or not finite")]
    InvalidProbability(f64),
    #[error("mixture weight {0} outside open interval (0, 1)")]
    InvalidWeight(f64),
    #[error("divergence infinite: q on the boundary while p is interior")]
    DivergenceInfinite,
}

/// A probability value in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Prob(f64);

impl Prob {
    pub fn new(value: f64) -> Result<Self, DivergenceError> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(DivergenceError::InvalidProbability(value));
        }
        Ok(Prob(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Weight of the first argument in the weighted JS divergence, in (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsWeight(f64);

impl JsWeight {
    pub fn new(theta: f64) -> Result<Self, DivergenceError> {
        if !theta.is_finite() || theta <= 0.0 || theta >= 1.0 {
            return Err(DivergenceError::InvalidWeight(theta));
        }
        Ok(JsWeight(theta))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Binary entropy H(p) = -p log p - (1-p) log (1-p), in [0, log 2].
pub fn binary_entropy(p: Prob) -> f64 {
    let p = p.value();
    -xlogx(p) - xlogx(1.0 - p)
}

/// Binary KL divergence d_KL(p || q) = p log(p/q) + (1-p) log((1-p)/(1-q)).
///
/// Returns `DivergenceInfinite` when q sits on the boundary while p does not.
pub fn d_kl_binary(p: Prob, q: Prob) -> Result<f64, DivergenceError> {
    let (p, q) = (p.value(), q.value());
    if (p > 0.0 && q == 0.0) || (p < 1.0 && q == 1.0) {
        return Err(DivergenceError::DivergenceInfinite);
    }
    let mut out = 0.0;
    if p > 0.0 {
        out += p * (p.ln() - q.ln());
    }
    if p < 1.0 {
        out += (1.0 - p) * ((1.0 - p).ln() - (1.0 - q).ln());
    }
    Ok(out.max(0.0))
}

/// Relaxed binary KL: d_gamma(p || q) = gamma*q - log(1 - p + p*e^gamma).
///
/// Evaluated in log-sum-exp form so large gamma never overflows.
pub fn d_gamma(gamma: f64, p: Prob, q: Prob) -> f64 {
    let (p, q) = (p.value(), q.value());
    if gamma <= 0.0 {
        gamma * q - (1.0 - p + p * gamma.exp()).ln()
    } else {
        // log(1 - p + p e^g) = g + log(p + (1-p) e^-g)
        gamma * (q - 1.0) - (p + (1.0 - p) * (-gamma).exp()).ln()
    }
}

/// Supremum of the gamma-relaxation that recovers d_KL(p || q).
///
/// Algebraically sup over gamma of gamma*a - log(1 - b + b e^gamma) equals
/// d_KL(a || b), so the arguments enter `d_gamma` swapped relative to the
/// recovered divergence. Grid scan over a symmetric log-spaced gamma grid
/// in [-30, 30] followed by golden-section refinement; the objective is
/// concave in gamma.
pub fn d_gamma_supremum(p: Prob, q: Prob) -> f64 {
    let (outer, inner) = (q, p);
    sup_gamma_of(outer, inner)
}

fn sup_gamma_of(p: Prob, q: Prob) -> f64 {
    let half = 1000usize;
    let mut grid = Vec::with_capacity(2 * half + 1);
    let (lo, hi) = (1e-6_f64.ln(), 30.0_f64.ln());
    for i in (0..half).rev() {
        let mag = (lo + (hi - lo) * i as f64 / (half - 1) as f64).exp();
        grid.push(-mag);
    }
    grid.push(0.0);
    for i in 0..half {
        let mag = (lo + (hi - lo) * i as f64 / (half - 1) as f64).exp();
        grid.push(mag);
    }
    let f = |g: f64| d_gamma(g, p, q);
    let mut best = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &g) in grid.iter().enumerate() {
        let v = f(g);
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(grid.len() - 1)];
    golden_max(f, a, b, 1e-12, 200).max(best_v)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if (b - a).abs() < tol {
            break;
        }
        if fc > fd {
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
    f(0.5 * (a + b)).max(fc.max(fd))
}

/// Weighted binary Jensen-Shannon divergence
/// d_JS^theta(p || q) = theta*d_KL(p || mix) + (1-theta)*d_KL(q || mix)
/// with mix = theta*p + (1-theta)*q. Always finite and non-negative.
pub fn d_js(theta: JsWeight, p: Prob, q: Prob) -> f64 {
    let th = theta.value();
    let (pv, qv) = (p.value(), q.value());
    if pv == qv {
        return 0.0;
    }
    let mix = th * pv + (1.0 - th) * qv;
    // p != q keeps mix strictly inside (0,1), so both KL terms are finite
    let mix = Prob::new(mix).expect("mixture in range");
    let a = d_kl_binary(p, mix).expect("finite by mixture interiority");
    let b = d_kl_binary(q, mix).expect("finite by mixture interiority");
    (th * a + (1.0 - th) * b).max(0.0)
}

/// Inverse of the weighted binary JS divergence:
/// sup { q in [0,1] : d_JS^theta(p || q) <= c }.
///
/// d_JS^theta(p, .) is convex with minimum 0 at q = p, so the supremum lies
/// on [p, 1] and bisection applies. Returns 1 when the budget c covers the
/// whole interval.
pub fn d_js_inverse(theta: JsWeight, p: Prob, c: f64) -> Prob {
    assert!(c >= 0.0, "divergence budget must be non-negative");
    if c == 0.0 {
        // the divergence vanishes only at q = p
        return p;
    }
    let one = Prob::new(1.0).unwrap();
    if d_js(theta, p, one) <= c {
        return one;
    }
    let (mut lo, mut hi) = (p.value(), 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if d_js(theta, p, Prob::new(mid).unwrap()) <= c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-10 {
            break;
        }
    }
    Prob::new(lo).unwrap()
}

/// Weighted JS divergence between two discrete distributions on a shared
/// support: theta*KL(a || mix) + (1-theta)*KL(b || mix).
pub fn d_js_discrete(theta: JsWeight, a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "supports must match");
    let th = theta.value();
    let mut kl_a = 0.0;
    let mut kl_b = 0.0;
    for (&ai, &bi) in a.iter().zip(b) {
        let mix = th * ai + (1.0 - th) * bi;
        if ai > 0.0 {
            kl_a += ai * (ai.ln() - mix.ln());
        }
        if bi > 0.0 {
            kl_b += bi * (bi.ln() - mix.ln());
        }
    }
    (th * kl_a + (1.0 - th) * kl_b).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(v: f64) -> Prob {
        Prob::new(v).unwrap()
    }
    fn th(v: f64) -> JsWeight {
        JsWeight::new(v).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(binary_entropy(p(0.5)), 2.0_f64.ln(), epsilon = 1e-15);
        assert_eq!(binary_entropy(p(0.0)), 0.0);
        assert_eq!(binary_entropy(p(1.0)), 0.0);
        // frozen from a 30-digit evaluation of the definition
        assert_abs_diff_eq!(binary_entropy(p(0.4)), 0.673011667009256436, epsilon = 1e-14);
    }

    #[test]
    fn kl_values() {
        assert_eq!(d_kl_binary(p(0.3), p(0.3)).unwrap(), 0.0);
        assert_abs_diff_eq!(d_kl_binary(p(0.0), p(0.5)).unwrap(), 2.0_f64.ln(), epsilon = 1e-15);
        // frozen from a 30-digit evaluation of the definition
        assert_abs_diff_eq!(
            d_kl_binary(p(0.25), p(0.5)).unwrap(),
            0.130812035941136959,
            epsilon = 1e-14
        );
        assert_eq!(
            d_kl_binary(p(0.5), p(0.0)),
            Err(DivergenceError::DivergenceInfinite)
        );
        assert_eq!(
            d_kl_binary(p(0.5), p(1.0)),
            Err(DivergenceError::DivergenceInfinite)
        );
    }

    #[test]
    fn gamma_relaxation() {
        assert_eq!(d_gamma(0.0, p(0.3), p(0.7)), 0.0);
        assert_abs_diff_eq!(d_gamma(2.0, p(0.0), p(0.3)), 0.6, epsilon = 1e-15);
        // no overflow at extreme gamma
        assert!(d_gamma(700.0, p(0.5), p(0.5)).is_finite());
        assert!(d_gamma(-700.0, p(0.5), p(0.5)).is_finite());
        let sup = d_gamma_supremum(p(0.25), p(0.5));
        assert_abs_diff_eq!(sup, 0.130812035941136959, epsilon = 1e-6);
    }

    #[test]
    fn js_values() {
        assert_eq!(d_js(th(0.7), p(0.2), p(0.2)), 0.0);
        assert_abs_diff_eq!(d_js(th(0.5), p(0.0), p(1.0)), 2.0_f64.ln(), epsilon = 1e-15);
        // frozen from a 30-digit evaluation of the two-term definition
        assert_abs_diff_eq!(
            d_js(th(0.6), p(0.1), p(0.4)),
            0.0626535105928088074,
            epsilon = 1e-12
        );
    }

    #[test]
    fn js_inverse_round_trip() {
        let theta = th(0.6);
        let base = p(0.2);
        assert_eq!(d_js_inverse(theta, base, 0.0).value(), 0.2);
        let big = d_js(theta, base, p(1.0)) + 1.0;
        assert_eq!(d_js_inverse(theta, base, big).value(), 1.0);
        let c = 0.05;
        let q = d_js_inverse(theta, base, c);
        assert_abs_diff_eq!(d_js(theta, base, q), c, epsilon = 1e-9);
    }

    #[test]
    fn js_inverse_monotone_in_budget() {
        let theta = th(0.75);
        let base = p(0.3);
        let mut prev = 0.0;
        for i in 0..50 {
            let c = i as f64 * 0.01;
            let q = d_js_inverse(theta, base, c).value();
            assert!(q + 1e-12 >= prev);
            prev = q;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Prob::new(-0.1).is_err());
        assert!(Prob::new(1.1).is_err());
        assert!(Prob::new(f64::NAN).is_err());
        assert!(JsWeight::new(0.0).is_err());
        assert!(JsWeight::new(1.0).is_err());
    }
}
