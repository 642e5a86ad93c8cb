use std::collections::BTreeMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stratum {
    #[default]
    Rating,
}

/// Apportions `total` over groups of the given sizes proportionally, using
/// the largest-remainder rule. Ties go to the earlier group.
pub fn largest_remainder(total: usize, sizes: &[usize]) -> Vec<usize> {
    let pool: usize = sizes.iter().sum();
    if pool == 0 {
        return vec![0; sizes.len()];
    }
    let mut quotas: Vec<usize> = sizes.iter().map(|&n| total * n / pool).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    // stable sort keeps earlier groups first among equal remainders
    order.sort_by_key(|&i| std::cmp::Reverse(total * sizes[i] % pool));
    let assigned: usize = quotas.iter().sum();
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        quotas[i] += 1;
    }
    quotas
}

/// Draws `per_app` reviews from every app of `pool`, apportioning the draw
/// over the app's rating strata (5 stars first) by largest remainder and
/// sampling uniformly inside each stratum. Selected reviews keep pool order.
pub fn stratified_sample(pool: &Corpus, per_app: usize, stratum: Stratum, seed: u64) -> Result<Corpus> {
    let Stratum::Rating = stratum;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected = Vec::new();
    for app in pool.apps() {
        // rating -> pool positions, highest rating first
        let mut strata: BTreeMap<std::cmp::Reverse<u8>, Vec<usize>> = BTreeMap::new();
        for (i, r) in pool.reviews().iter().enumerate() {
            if r.app == app {
                strata.entry(std::cmp::Reverse(r.rating)).or_default().push(i);
            }
        }
        let available: usize = strata.values().map(Vec::len).sum();
        if per_app > available {
            return Err(Error::Config(format!(
                "cannot sample {per_app} reviews from app `{app}` with only {available}"
            )));
        }
        let sizes: Vec<usize> = strata.values().map(Vec::len).collect();
        let quotas = largest_remainder(per_app, &sizes);
        for (members, &k) in strata.values().zip(&quotas) {
            for j in index::sample(&mut rng, members.len(), k).into_iter() {
                selected.push(members[j]);
            }
        }
    }
    selected.sort_unstable();
    Ok(pool.select(&selected))
}
