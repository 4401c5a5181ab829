mod common;

use nalgebra::DMatrix;
use pe_excite::linalg::{numerical_rank, DEFAULT_RANK_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_integer_matrix(rng: &mut ChaCha8Rng, low_rank: bool) -> Vec<Vec<i128>> {
    let rows = rng.gen_range(1..=8usize);
    let cols = rng.gen_range(1..=8usize);
    if !low_rank {
        return (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-6..=6)).collect()).collect();
    }
    let k = rng.gen_range(1..=rows.min(cols));
    let f: Vec<Vec<i128>> = (0..rows).map(|_| (0..k).map(|_| rng.gen_range(-4..=4)).collect()).collect();
    let g: Vec<Vec<i128>> = (0..k).map(|_| (0..cols).map(|_| rng.gen_range(-4..=4)).collect()).collect();
    (0..rows)
        .map(|i| (0..cols).map(|j| (0..k).map(|p| f[i][p] * g[p][j]).sum()).collect())
        .collect()
}

fn to_matrix(ints: &[Vec<i128>], scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(ints.len(), ints[0].len(), |i, j| ints[i][j] as f64 * scale)
}

#[test]
fn numerical_rank_agrees_with_exact_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..500 {
        let ints = random_integer_matrix(&mut rng, trial % 2 == 1);
        let m = to_matrix(&ints, 1.0);
        assert_eq!(numerical_rank(&m, DEFAULT_RANK_TOL), common::bareiss_rank(ints), "trial {trial}\n{m}");
    }
}

#[test]
fn rank_is_scale_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let ints = random_integer_matrix(&mut rng, true);
        let exact = common::bareiss_rank(ints.clone());
        for scale in [1e-8, 1e8] {
            assert_eq!(numerical_rank(&to_matrix(&ints, scale), DEFAULT_RANK_TOL), exact);
        }
    }
}

#[test]
fn rank_of_transpose_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..100 {
        let ints = random_integer_matrix(&mut rng, true);
        let m = to_matrix(&ints, 1.0);
        assert_eq!(numerical_rank(&m, DEFAULT_RANK_TOL), numerical_rank(&m.transpose(), DEFAULT_RANK_TOL));
    }
}

#[test]
fn zero_and_empty_like_matrices() {
    assert_eq!(numerical_rank(&DMatrix::zeros(3, 5), DEFAULT_RANK_TOL), 0);
    assert_eq!(common::bareiss_rank(vec![vec![0; 4]; 2]), 0);
}
