//! Test-side oracles, written independently of the library code paths.
#![allow(dead_code)]

/// Exact rank by fraction-free Gaussian elimination (Bareiss).
pub fn bareiss_rank(mut a: Vec<Vec<i128>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    let mut prev = 1i128;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                a[r][k] = (a[r][k] * a[rank][c] - a[r][c] * a[rank][k]) / prev;
            }
            a[r][c] = 0;
        }
        prev = a[rank][c];
        rank += 1;
    }
    rank
}

/// Hankel matrix from the defining index formula: entry
/// `(i * eta + d, c)` is component `d` of sample `c + i`.
pub fn hankel_oracle(samples: &[Vec<f64>], depth: usize) -> Vec<Vec<f64>> {
    let eta = samples[0].len();
    let cols = samples.len() + 1 - depth;
    (0..depth * eta)
        .map(|row| {
            let (i, d) = (row / eta, row % eta);
            (0..cols).map(|c| samples[c + i][d]).collect()
        })
        .collect()
}

/// Plain-loop simulation of `x+ = A x + B u`, `y = C x + D u` for SISO
/// plants given as nested vectors.
pub fn lti_oracle(
    a: &[Vec<f64>],
    b: &[f64],
    c: &[f64],
    d: f64,
    x0: &[f64],
    u: &[f64],
) -> Vec<f64> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut y = Vec::with_capacity(u.len());
    for &uk in u {
        y.push((0..n).map(|i| c[i] * x[i]).sum::<f64>() + d * uk);
        let next: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] * x[j]).sum::<f64>() + b[i] * uk)
            .collect();
        x = next;
    }
    y
}

/// Synthetic input of the two-state example flat system.
pub fn example_v(x1: f64, x2: f64, u: f64) -> f64 {
    -x1.sin() + x1 * x2 * x2 - x1.powi(3) * x2 + u
}

/// Closed-loop or open-loop run of the example flat system under a
/// state-feedback law.
pub fn example_oracle(x0: [f64; 2], steps: usize, law: impl Fn([f64; 2]) -> f64) -> Vec<[f64; 2]> {
    let mut xs = vec![x0];
    let mut x = x0;
    for _ in 0..steps {
        let u = law(x);
        x = [x[1], example_v(x[0], x[1], u)];
        xs.push(x);
    }
    xs
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Distance from `v` to the span of `cols`, by modified Gram-Schmidt with
/// reorthogonalization. Columns whose remainder drops below `drop` are
/// treated as dependent.
pub fn span_residual(cols: &[Vec<f64>], v: &[f64], drop: f64) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        let mut w = c.clone();
        for _ in 0..2 {
            for q in &basis {
                let p = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm > drop {
            basis.push(w.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut r = v.to_vec();
    for _ in 0..2 {
        for q in &basis {
            let p = dot(q, &r);
            r.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
        }
    }
    dot(&r, &r).sqrt()
}

/// Observability matrix rows `c A^i`, `i < depth`, returned column-wise.
pub fn observability_columns(a: &[Vec<f64>], c: &[f64], depth: usize) -> Vec<Vec<f64>> {
    let n = c.len();
    let mut rows = vec![c.to_vec()];
    for _ in 1..depth {
        let last = rows.last().unwrap();
        let next: Vec<f64> = (0..n).map(|j| (0..n).map(|i| last[i] * a[i][j]).sum()).collect();
        rows.push(next);
    }
    (0..n).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// Krylov matrix `[b, A b, ..., A^(n-1) b]` column-wise.
pub fn controllability_columns(a: &[Vec<f64>], b: &[f64]) -> Vec<Vec<f64>> {
    let n = b.len();
    let mut cols = vec![b.to_vec()];
    for _ in 1..n {
        let last = cols.last().unwrap();
        let next: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a[i][j] * last[j]).sum()).collect();
        cols.push(next);
    }
    cols
}

/// Rank of a small column set from Gram-Schmidt with an absolute drop level.
pub fn column_rank(cols: &[Vec<f64>], drop: f64) -> usize {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for c in cols {
        if span_residual(&kept, c, drop) > drop {
            kept.push(c.clone());
        }
    }
    kept.len()
}

/// Random SISO plant `(A, b, c, d)` with `||A||_F <= 0.9`, controllable and
/// observable with margin.
pub fn random_siso<R: rand::Rng>(rng: &mut R, n: usize) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>, f64) {
    loop {
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let fro = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        if fro > 0.9 {
            a.iter_mut().flatten().for_each(|x| *x *= 0.9 / fro);
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d = rng.gen_range(-1.0..1.0);
        let ctrb = column_rank(&controllability_columns(&a, &b), 1e-3);
        let obsv = column_rank(&observability_columns(&a, &c, n), 1e-3);
        if ctrb == n && obsv == n {
            return (a, b, c, d);
        }
    }
}
