//! Fisher's exact test on a 2×2 table with fixed marginals.
//!
//! The hypergeometric weights are generated by walking the ratio
//! `p(k+1)/p(k)` outward from the mode and normalized by their own sum, so no
//! log-gamma evaluation (and none of its cancellation at large totals) is
//! involved. Terms more than [`CUTOFF_NATS`] below the largest term of a sum
//! are dropped; each sum is accumulated smallest term first.

/// Terms this far (in natural log units) below the largest term of a tail are
/// negligible at double precision.
const CUTOFF_NATS: f64 = 50.0;

/// The three tail probabilities of the observed `n11`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherTails {
    pub left: f64,
    pub right: f64,
    pub two_tailed: f64,
    /// Point probability of the observed table.
    pub point: f64,
}

#[derive(Debug, Clone, Copy)]
struct Hypergeometric {
    n1p: u64,
    np1: u64,
    // npp - n1p - np1, possibly negative
    offset: i128,
    lo: u64,
    hi: u64,
    mode: u64,
}

impl Hypergeometric {
    fn new(n1p: u64, np1: u64, npp: u64) -> Self {
        let lo = (n1p + np1).saturating_sub(npp);
        let hi = n1p.min(np1);
        let mode = ((n1p as u128 + 1) * (np1 as u128 + 1) / (npp as u128 + 2)) as u64;
        Hypergeometric {
            n1p,
            np1,
            offset: npp as i128 - n1p as i128 - np1 as i128,
            lo,
            hi,
            mode: mode.clamp(lo, hi),
        }
    }

    /// ln p(k+1) - ln p(k), for lo <= k < hi.
    fn ln_step_up(&self, k: u64) -> f64 {
        let num = (self.n1p - k) as f64 * (self.np1 - k) as f64;
        let den = (k + 1) as f64 * (self.offset + k as i128 + 1) as f64;
        (num / den).ln()
    }

    /// Unnormalized log weight at `to`, relative to the mode.
    fn ln_weight(&self, to: u64) -> f64 {
        let mut lw = 0.0;
        if to >= self.mode {
            for k in self.mode..to {
                lw += self.ln_step_up(k);
            }
        } else {
            for k in (to..self.mode).rev() {
                lw -= self.ln_step_up(k);
            }
        }
        lw
    }

    /// Log of the summed weights from `start` outward (upward or downward)
    /// to the end of the support.
    fn ln_tail(&self, start: u64, ln_start: f64, upward: bool) -> f64 {
        let mut terms = vec![ln_start];
        let mut max = ln_start;
        let mut k = start;
        let mut lw = ln_start;
        loop {
            if upward {
                if k >= self.hi {
                    break;
                }
                lw += self.ln_step_up(k);
                k += 1;
            } else {
                if k <= self.lo {
                    break;
                }
                lw -= self.ln_step_up(k - 1);
                k -= 1;
            }
            max = max.max(lw);
            if lw < max - CUTOFF_NATS {
                break;
            }
            terms.push(lw);
        }
        ln_sum_exp(terms, max)
    }
}

fn ln_sum_exp(mut terms: Vec<f64>, max: f64) -> f64 {
    terms.sort_by(f64::total_cmp);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    max + sum.ln()
}

fn ln_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Tail probabilities for `n11` given the marginals, or `None` when `n11`
/// lies outside `[max(0, n1p + np1 - npp), min(n1p, np1)]`.
///
/// The two-tailed value sums every outcome whose probability is at most
/// `p(n11) · (1 + tie_tolerance)`.
pub fn fisher_tails(n11: u64, n1p: u64, np1: u64, npp: u64, tie_tolerance: f64) -> Option<FisherTails> {
    if n1p > npp || np1 > npp {
        return None;
    }
    let h = Hypergeometric::new(n1p, np1, npp);
    if n11 < h.lo || n11 > h.hi {
        return None;
    }

    let ln_z = if h.mode < h.hi {
        ln_add(
            h.ln_tail(h.mode, 0.0, false),
            h.ln_tail(h.mode + 1, h.ln_step_up(h.mode), true),
        )
    } else {
        h.ln_tail(h.mode, 0.0, false)
    };
    let ln_obs = h.ln_weight(n11);
    let prob = |ln_w: f64| (ln_w - ln_z).exp().min(1.0);

    let left = prob(h.ln_tail(n11, ln_obs, false));
    let right = prob(h.ln_tail(n11, ln_obs, true));

    // Outcomes more probable than the observed one form an interval around
    // the mode; everything outside it counts toward the two-tailed value.
    let threshold = ln_obs + tie_tolerance.max(0.0).ln_1p();
    let two_tailed = if 0.0 <= threshold {
        1.0
    } else {
        let mut below = h.mode;
        let mut lw_below = 0.0;
        while below > h.lo && lw_below > threshold {
            lw_below -= h.ln_step_up(below - 1);
            below -= 1;
        }
        let mut above = h.mode;
        let mut lw_above = 0.0;
        while above < h.hi && lw_above > threshold {
            lw_above += h.ln_step_up(above);
            above += 1;
        }
        let mut ln_sum = f64::NEG_INFINITY;
        if lw_below <= threshold {
            ln_sum = h.ln_tail(below, lw_below, false);
        }
        if lw_above <= threshold {
            ln_sum = ln_add(ln_sum, h.ln_tail(above, lw_above, true));
        }
        prob(ln_sum)
    };

    Some(FisherTails {
        left,
        right,
        two_tailed,
        point: prob(ln_obs),
    })
}
