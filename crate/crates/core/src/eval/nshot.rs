use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// Draws `n` training and `n` validation items without replacement.
/// Both subsets keep the split's original order.
pub fn n_shot_subset<T: Clone>(split: &[T], n: usize, seed: u64) -> Result<(Vec<T>, Vec<T>), EvalError> {
    if split.len() < 2 * n {
        return Err(EvalError::InsufficientData { requested: 2 * n, available: split.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, split.len(), 2 * n).into_vec();
    let mut train_idx = picked[..n].to_vec();
    let mut val_idx = picked[n..].to_vec();
    train_idx.sort_unstable();
    val_idx.sort_unstable();
    Ok((train_idx.iter().map(|&i| split[i].clone()).collect(), val_idx.iter().map(|&i| split[i].clone()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn disjoint_members_of_the_split() {
        let split: Vec<u32> = (0..100).collect();
        let (train, val) = n_shot_subset(&split, 10, 1).unwrap();
        assert_eq!((train.len(), val.len()), (10, 10));
        let t: HashSet<_> = train.iter().collect();
        assert!(val.iter().all(|v| !t.contains(v)));
        assert_eq!(n_shot_subset(&split, 10, 1).unwrap(), (train, val));
    }

    #[test]
    fn half_split_is_a_partition() {
        let split: Vec<u32> = (0..20).collect();
        let (mut train, val) = n_shot_subset(&split, 10, 9).unwrap();
        train.extend(val);
        train.sort();
        assert_eq!(train, split);
        assert!(matches!(n_shot_subset(&split, 11, 0), Err(EvalError::InsufficientData { requested: 22, available: 20 })));
    }
}
