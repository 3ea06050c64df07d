use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::Rng;

use super::Individual;
use crate::fitness::Score;

/// Total ranking order: higher score first, then smaller tree, then the
/// lexicographically smaller canonical string.
pub fn rank_order(a: (&Individual, Score), b: (&Individual, Score)) -> Ordering {
    b.1 .0
        .total_cmp(&a.1 .0)
        .then_with(|| a.0.size().cmp(&b.0.size()))
        .then_with(|| a.0.canonical.cmp(&b.0.canonical))
}

/// Indices of `count` binary-tournament winners. Each round shuffles the
/// pool into disjoint pairs and keeps every pair's better member; rounds
/// repeat until enough winners exist, and the surplus is dropped.
pub fn tournament_indices<R: Rng + ?Sized>(
    pool: &[&Individual],
    scores: &[Score],
    count: usize,
    rng: &mut R,
) -> Vec<usize> {
    assert_eq!(pool.len(), scores.len());
    assert!(!pool.is_empty(), "tournament pool is empty");
    if pool.len() == 1 {
        return vec![0; count];
    }
    let mut winners = Vec::with_capacity(count + pool.len() / 2);
    let mut order: Vec<usize> = (0..pool.len()).collect();
    while winners.len() < count {
        order.shuffle(rng);
        for pair in order.chunks_exact(2) {
            let (i, j) = (pair[0], pair[1]);
            let w = match rank_order((pool[i], scores[i]), (pool[j], scores[j])) {
                Ordering::Greater => j,
                _ => i,
            };
            winners.push(w);
        }
    }
    winners.truncate(count);
    winners
}

/// Binary tournament over scored individuals.
pub fn binary_tournament<R: Rng + ?Sized>(
    pool: &[(Individual, Score)],
    count: usize,
    rng: &mut R,
) -> Vec<Individual> {
    let refs: Vec<&Individual> = pool.iter().map(|(i, _)| i).collect();
    let scores: Vec<Score> = pool.iter().map(|(_, s)| *s).collect();
    tournament_indices(&refs, &scores, count, rng)
        .into_iter()
        .map(|i| pool[i].0.clone())
        .collect()
}

/// Indices of the `count` best under [`rank_order`], best first.
pub fn truncation_indices(pool: &[&Individual], scores: &[Score], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&i, &j| rank_order((pool[i], scores[i]), (pool[j], scores[j])));
    order.truncate(count);
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::fitness::TauVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(text: &str) -> Individual {
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        Individual::new(parse(text, &names).unwrap(), &names, TauVector(vec![0.0]), 0)
    }

    #[test]
    fn higher_score_wins_pair() {
        let pool = vec![(ind("(neg a)"), Score(1.0)), (ind("(neg b)"), Score(2.0))];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let w = binary_tournament(&pool, 1, &mut rng);
        assert_eq!(w[0].canonical, "(neg b)");
    }

    #[test]
    fn four_pool_takes_two_rounds() {
        let pool: Vec<_> = ["(neg a)", "(neg b)", "(neg c)", "(log a)"]
            .iter()
            .enumerate()
            .map(|(k, t)| (ind(t), Score(k as f64)))
            .collect();
        let refs: Vec<&Individual> = pool.iter().map(|p| &p.0).collect();
        let scores: Vec<Score> = pool.iter().map(|p| p.1).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = tournament_indices(&refs, &scores, 4, &mut rng);
        assert_eq!(w.len(), 4);
        // the best can never lose and the worst can never win
        assert!(w.iter().filter(|&&i| i == 3).count() == 2);
        assert!(!w.contains(&0));
        assert_ne!(w[0], w[1]);
        assert_ne!(w[2], w[3]);
    }

    #[test]
    fn ties_prefer_smaller_then_lexicographic() {
        let small = ind("(neg a)");
        let big = ind("(add a (neg b))");
        assert_eq!(
            rank_order((&small, Score(1.0)), (&big, Score(1.0))),
            Ordering::Less
        );
        let pool = vec![(big, Score(1.0)), (small, Score(1.0))];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(binary_tournament(&pool, 1, &mut rng)[0].canonical, "(neg a)");

        let x = ind("(neg b)");
        let y = ind("(neg a)");
        assert_eq!(rank_order((&x, Score(1.0)), (&y, Score(1.0))), Ordering::Greater);
    }

    #[test]
    fn odd_pool_and_singletons() {
        let pool: Vec<_> = ["(neg a)", "(neg b)", "(neg c)"]
            .iter()
            .map(|t| (ind(t), Score(0.0)))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(binary_tournament(&pool, 5, &mut rng).len(), 5);
        let single = vec![(ind("(neg a)"), Score(0.0))];
        assert_eq!(binary_tournament(&single, 3, &mut rng).len(), 3);
    }

    #[test]
    fn truncation_keeps_best() {
        let a = ind("(neg a)");
        let b = ind("(neg b)");
        let c = ind("(neg c)");
        let refs = vec![&a, &b, &c];
        let scores = vec![Score(0.5), Score(2.0), Score(1.0)];
        assert_eq!(truncation_indices(&refs, &scores, 2), vec![1, 2]);
    }
}
