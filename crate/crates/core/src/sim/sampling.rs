use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SimError;

/// Multinomial sample of `shots` outcomes; deterministic for a fixed seed.
pub fn sample_counts(
    dist: &[f64],
    shots: usize,
    seed: u64,
) -> Result<BTreeMap<usize, usize>, SimError> {
    let total: f64 = dist.iter().sum();
    if dist.is_empty() || dist.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-6 {
        return Err(SimError::BadDistribution);
    }
    let w = WeightedIndex::new(dist).map_err(|_| SimError::BadDistribution)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts.entry(w.sample(&mut rng)).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Render outcome indices as bitstrings with clbit 0 rightmost.
pub fn counts_to_bitstrings(
    counts: &BTreeMap<usize, usize>,
    num_clbits: usize,
) -> BTreeMap<String, usize> {
    counts
        .iter()
        .map(|(&k, &v)| (format!("{:0width$b}", k, width = num_clbits.max(1)), v))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_complete() {
        let a = sample_counts(&[0.5, 0.5], 4, 0).unwrap();
        assert_eq!(a, sample_counts(&[0.5, 0.5], 4, 0).unwrap());
        assert_eq!(a.values().sum::<usize>(), 4);
        let b = sample_counts(&[0.0, 1.0, 0.0], 100, 3).unwrap();
        assert_eq!(b.get(&1), Some(&100));
    }

    #[test]
    fn bitstrings_pad() {
        let mut c = BTreeMap::new();
        c.insert(2usize, 7usize);
        assert_eq!(counts_to_bitstrings(&c, 3).get("010"), Some(&7));
    }
}
