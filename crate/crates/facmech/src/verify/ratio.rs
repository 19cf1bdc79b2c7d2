//! Empirical approximation ratios: optimum over mechanism benefit, and the
//! randomized search for the worst ratio over sampled instance pools.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instances::RandomProfileSpec;
use crate::mechanisms::Mechanism;
use crate::model::{expected_social_benefit, Objective, Profile};
use crate::oracle;

/// Benefits at or below this threshold are treated as zero when forming
/// ratios, so "optimum positive, mechanism zero" becomes +∞ instead of a
/// noise-dominated quotient.
pub const RATIO_ZERO_TOLERANCE: f64 = 1e-12;

/// Outcome of [`ratio_search`].
#[derive(Debug, Clone)]
pub struct RatioSearch {
    pub worst_ratio: f64,
    pub worst_instance: Profile,
    /// Index of the worst instance in the search pool: pinned instances
    /// occupy `0..pinned.len()`, sampled ones follow in sampling order.
    pub worst_index: u64,
    pub evaluated: u64,
}

/// Optimum social benefit divided by the mechanism's expected social
/// benefit on one profile.
///
/// A mechanism benefit within [`RATIO_ZERO_TOLERANCE`] of zero yields +∞
/// when the optimum is positive and 1 when the optimum is zero as well.
pub fn instance_ratio(
    mechanism: &Mechanism,
    profile: &Profile,
    objective: Objective,
) -> Result<f64> {
    let lottery = mechanism.apply(profile)?;
    let mechanism_value = expected_social_benefit(profile, &lottery, objective)?;
    let opt_value = oracle::opt(profile, objective)?.value;
    if mechanism_value <= RATIO_ZERO_TOLERANCE {
        if opt_value > RATIO_ZERO_TOLERANCE {
            return Ok(f64::INFINITY);
        }
        return Ok(1.0);
    }
    Ok(opt_value / mechanism_value)
}

/// Search a pool of `pinned` profiles plus `iterations` freshly sampled
/// ones for the largest optimum-to-mechanism ratio.
///
/// Each sampled instance is derived from `(seed, index)` alone and the
/// running maximum breaks ties toward the smaller pool index, so the result
/// is identical for any number of worker threads.
pub fn ratio_search(
    mechanism: &Mechanism,
    objective: Objective,
    sampler: &RandomProfileSpec,
    iterations: u64,
    seed: u64,
    pinned: &[Profile],
) -> Result<RatioSearch> {
    if iterations == 0 && pinned.is_empty() {
        return Err(Error::InvalidParameters {
            what: "ratio_search".into(),
            reason: "need at least one pinned instance or one sampling iteration".into(),
        });
    }
    let pinned_len = pinned.len() as u64;
    let total = pinned_len + iterations;
    let profile_at = |index: u64| -> Profile {
        if index < pinned_len {
            pinned[index as usize].clone()
        } else {
            sampler.sample(seed, index - pinned_len)
        }
    };

    let worst = (0..total)
        .into_par_iter()
        .map(|index| -> Result<(f64, u64)> {
            let ratio = instance_ratio(mechanism, &profile_at(index), objective)?;
            Ok((ratio, index))
        })
        .try_reduce(
            || (f64::NEG_INFINITY, u64::MAX),
            |a, b| {
                Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                })
            },
        )?;

    Ok(RatioSearch {
        worst_ratio: worst.0,
        worst_instance: profile_at(worst.1),
        worst_index: worst.1,
        evaluated: total,
    })
}
