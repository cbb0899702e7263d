use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{NodePackage, PackageId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStrategy {
    TopDownloads,
    UniformRandom,
    HalfHalf,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("sample size {n} exceeds corpus size {size}")]
    TooLarge { n: usize, size: usize },
    #[error("package {0} is not valid")]
    InvalidEntry(PackageId),
}

/// Descending downloads, absent counts last, ties by id.
fn by_popularity(corpus: &[(PackageId, Option<u64>)]) -> Vec<&PackageId> {
    let mut ranked: Vec<_> = corpus.iter().collect();
    ranked.sort_by(|(a, da), (b, db)| match (da, db) {
        (Some(x), Some(y)) => y.cmp(x).then_with(|| a.cmp(b)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.cmp(b),
    });
    ranked.into_iter().map(|(id, _)| id).collect()
}

/// Select `n` ids from `(id, weekly downloads)` pairs.
///
/// `HalfHalf` takes the `ceil(n/2)` most downloaded and `floor(n/2)` drawn
/// without replacement from the rest. Input order does not matter.
pub fn sample_ids(
    corpus: &[(PackageId, Option<u64>)],
    n: usize,
    strategy: SampleStrategy,
    seed: u64,
) -> Result<Vec<PackageId>, SampleError> {
    if n > corpus.len() {
        return Err(SampleError::TooLarge { n, size: corpus.len() });
    }
    let ranked = by_popularity(corpus);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = match strategy {
        SampleStrategy::TopDownloads => n,
        SampleStrategy::UniformRandom => 0,
        SampleStrategy::HalfHalf => n.div_ceil(2),
    };
    let mut picked: Vec<PackageId> = ranked[..top].iter().map(|id| (*id).clone()).collect();
    let mut rest: Vec<&PackageId> = ranked[top..].to_vec();
    rest.sort();
    picked.extend(rest.choose_multiple(&mut rng, n - top).map(|id| (*id).clone()));
    Ok(picked)
}

pub fn sample_packages(
    corpus: &[NodePackage],
    n: usize,
    strategy: SampleStrategy,
    seed: u64,
) -> Result<Vec<PackageId>, SampleError> {
    if let Some(bad) = corpus.iter().find(|p| !p.is_valid()) {
        return Err(SampleError::InvalidEntry(bad.id.clone()));
    }
    let pairs: Vec<_> = corpus.iter().map(|p| (p.id.clone(), p.weekly_downloads)).collect();
    sample_ids(&pairs, n, strategy, seed)
}
