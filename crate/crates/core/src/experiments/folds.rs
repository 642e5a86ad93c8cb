use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Procedure;
use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// One train/test split over review positions of the primary corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub id: usize,
    /// Held-out category (CCV) or the category being cross-validated (appCat).
    pub category: Option<String>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn members_by_category(corpus: &Corpus) -> Vec<(String, Vec<usize>)> {
    corpus
        .categories()
        .into_iter()
        .map(|c| {
            let members = corpus
                .reviews()
                .iter()
                .enumerate()
                .filter(|(_, r)| r.category == c)
                .map(|(i, _)| i)
                .collect();
            (c.to_string(), members)
        })
        .collect()
}

fn check_sizes(groups: &[(String, Vec<usize>)], k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Config(format!("k_folds must be at least 2, got {k}")));
    }
    for (c, members) in groups {
        if members.len() < k {
            return Err(Error::Config(format!(
                "category `{c}` has {} reviews, fewer than k_folds = {k}",
                members.len()
            )));
        }
    }
    Ok(())
}

fn complement(n: usize, test: &[usize]) -> Vec<usize> {
    let mut in_test = vec![false; n];
    for &i in test {
        in_test[i] = true;
    }
    (0..n).filter(|&i| !in_test[i]).collect()
}

/// Splits `members` into `k` consecutive chunks whose sizes differ by at most one,
/// the larger chunks first.
fn chunk(members: &[usize], k: usize) -> Vec<Vec<usize>> {
    let (base, extra) = (members.len() / k, members.len() % k);
    let mut out = Vec::with_capacity(k);
    let mut at = 0;
    for j in 0..k {
        let size = base + usize::from(j < extra);
        out.push(members[at..at + size].to_vec());
        at += size;
    }
    out
}

/// Hold out each category in turn.
pub fn ccv_folds(corpus: &Corpus) -> Result<Vec<Fold>> {
    let groups = members_by_category(corpus);
    if groups.len() < 2 {
        return Err(Error::Config(format!(
            "cross-category validation needs at least 2 categories, found {}",
            groups.len()
        )));
    }
    Ok(groups
        .into_iter()
        .enumerate()
        .map(|(id, (c, test))| Fold {
            id,
            category: Some(c),
            train: complement(corpus.len(), &test),
            test,
        })
        .collect())
}

/// Independent shuffled k-fold splits inside every category.
pub fn app_cat_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let groups = members_by_category(corpus);
    check_sizes(&groups, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = Vec::with_capacity(groups.len() * k);
    for (c, mut members) in groups {
        members.shuffle(&mut rng);
        let chunks = chunk(&members, k);
        for j in 0..k {
            let mut test = chunks[j].clone();
            test.sort_unstable();
            let mut train: Vec<usize> = chunks.iter().enumerate().filter(|&(i, _)| i != j).flat_map(|(_, ch)| ch.iter().copied()).collect();
            train.sort_unstable();
            folds.push(Fold {
                id: folds.len(),
                category: Some(c.clone()),
                train,
                test,
            });
        }
    }
    Ok(folds)
}

/// k folds over the whole corpus with every category spread as evenly as
/// possible: each fold receives ⌊n_c/k⌋ or ⌈n_c/k⌉ reviews of category c.
/// The folds receiving the extra review rotate from category to category
/// so overall fold sizes stay balanced.
pub fn stratified_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let groups = members_by_category(corpus);
    check_sizes(&groups, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tests: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut offset = 0;
    for (_, mut members) in groups {
        members.shuffle(&mut rng);
        let (base, extra) = (members.len() / k, members.len() % k);
        let mut at = 0;
        for j in 0..k {
            let gets_extra = (j + k - offset) % k < extra;
            let size = base + usize::from(gets_extra);
            tests[j].extend_from_slice(&members[at..at + size]);
            at += size;
        }
        offset = (offset + extra) % k;
    }
    Ok(tests
        .into_iter()
        .enumerate()
        .map(|(id, mut test)| {
            test.sort_unstable();
            Fold {
                id,
                category: None,
                train: complement(corpus.len(), &test),
                test,
            }
        })
        .collect())
}

/// Folds of `procedure` over `corpus`; external data never enters a fold.
pub fn plan_folds(corpus: &Corpus, procedure: Procedure, k: usize, seed: u64) -> Result<Vec<Fold>> {
    match procedure {
        Procedure::Ccv | Procedure::CcvExt => ccv_folds(corpus),
        Procedure::AppCat => app_cat_folds(corpus, k, seed),
        Procedure::Scv | Procedure::ScvExt => stratified_folds(corpus, k, seed),
    }
}
