//! Generators of small metric spaces for sweeps and seeded property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::Dist;

use super::space::{is_isometric, MetricSpace};

/// The distance grid used by the standard sample suites.
pub fn standard_grid() -> Vec<Dist> {
    vec![Dist::ratio(1, 4), Dist::ratio(1, 2), Dist::ONE, Dist::int(2), Dist::INF]
}

fn point_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
}

/// Every metric space on `n` points whose off-diagonal distances lie in
/// `grid`, one representative per isometry class.
pub fn spaces_up_to_isometry(n: usize, grid: &[Dist]) -> Vec<MetricSpace> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let labels = point_labels(n);
    let mut reps: Vec<(Vec<Dist>, MetricSpace)> = Vec::new();
    let total = grid.len().pow(pairs.len() as u32);
    for code in 0..total {
        let mut c = code;
        let mut d = vec![Dist::ZERO; n * n];
        for &(i, j) in &pairs {
            let v = grid[c % grid.len()];
            c /= grid.len();
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
        let Ok(space) = MetricSpace::new(labels.clone(), d) else {
            continue;
        };
        let mut key: Vec<Dist> = pairs.iter().map(|&(i, j)| space.d(i, j)).collect();
        key.sort();
        if reps.iter().any(|(k, s)| *k == key && is_isometric(s, &space)) {
            continue;
        }
        reps.push((key, space));
    }
    reps.into_iter().map(|(_, s)| s).collect()
}

/// All spaces with `1..=max_points` points over `grid`, up to isometry.
pub fn all_small_spaces(max_points: usize, grid: &[Dist]) -> Vec<MetricSpace> {
    (1..=max_points).flat_map(|n| spaces_up_to_isometry(n, grid)).collect()
}

/// A seeded random metric space with between 1 and `max_points` points and
/// distances drawn from `grid` (rejection sampling on the triangle law).
pub fn random_space(rng: &mut impl Rng, max_points: usize, grid: &[Dist]) -> MetricSpace {
    let n = rng.gen_range(1..=max_points);
    let labels = point_labels(n);
    loop {
        let mut d = vec![Dist::ZERO; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *grid.choose(rng).expect("nonempty grid");
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        if let Ok(space) = MetricSpace::new(labels.clone(), d) {
            return space;
        }
    }
}

/// `count` seeded random spaces.
pub fn random_spaces(seed: u64, count: usize, max_points: usize, grid: &[Dist]) -> Vec<MetricSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_space(&mut rng, max_points, grid)).collect()
}
