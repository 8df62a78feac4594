//! Exact search for the max-min selection ratio.

use crate::error::Result;
use crate::model::{Instance, Ratio, TargetVector};

/// Max-min selection ratio `α` with its crucial vector `δ*_u = ⌈α·|S_u|⌉`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrucialVector {
    pub alpha: Ratio,
    pub targets: TargetVector,
}

impl CrucialVector {
    pub fn new(instance: &Instance, alpha: Ratio) -> Self {
        CrucialVector {
            alpha,
            targets: TargetVector::at_ratio(instance, alpha),
        }
    }
}

/// `⌈α·n⌉` for every group size.
pub fn targets_at(sizes: &[usize], alpha: Ratio) -> Vec<usize> {
    sizes.iter().map(|&n| alpha.ceil_mul(n).min(n)).collect()
}

/// Largest candidate ratio `k/|S_u|` whose target vector passes `valid`.
///
/// `valid` must be monotone (valid at `δ` implies valid below `δ`). The
/// optimum is one of the candidates, so for each group a binary search over
/// `k` finds that group's best candidate; the answer is the largest of them.
pub fn max_min_ratio_with(
    sizes: &[usize],
    mut valid: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<Ratio> {
    let mut best = Ratio::zero();
    for &n in sizes {
        if n == 0 {
            continue;
        }
        let ratio = |k: usize| Ratio::new(k as i64, n as i64).expect("n > 0");
        let (mut lo, mut hi) = (best.floor_mul(n), n);
        if ratio(lo) < best {
            lo += 1;
        }
        if lo > hi {
            continue;
        }
        if !valid(&targets_at(sizes, ratio(lo)))? {
            continue;
        }
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if valid(&targets_at(sizes, ratio(mid)))? {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        best = best.max(ratio(lo));
    }
    if sizes.is_empty() {
        return Ok(Ratio::zero());
    }
    Ok(best)
}

/// [`max_min_ratio_with`] packaged with the crucial vector.
pub fn max_min_ratio(
    sizes: &[usize],
    valid: impl FnMut(&[usize]) -> Result<bool>,
) -> Result<CrucialVector> {
    let alpha = max_min_ratio_with(sizes, valid)?;
    Ok(CrucialVector {
        alpha,
        targets: TargetVector::from_raw(targets_at(sizes, alpha)),
    })
}
