#![allow(dead_code)]

use halfstrip::drift::AsymptoticCoefficients;
use halfstrip::markov_core::StochasticMatrix;
use halfstrip::model::{
    make_crw, make_tabular, BoundaryRule, ChainKernel, ChainModel, TabularAtom, TabularRow,
    TabularSpec,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Closed-form coefficients of the correlated random walk, labels `[+1, -1]`.
pub fn crw_coefficients(q: f64, c_plus: f64, c_minus: f64) -> AsymptoticCoefficients<f64> {
    AsymptoticCoefficients::new(
        vec![1, -1],
        vec![2.0 * q - 1.0, 1.0 - 2.0 * q],
        vec![c_plus, c_minus],
        vec![1.0, 1.0],
        vec![vec![q, -(1.0 - q)], vec![1.0 - q, -q]],
        vec![
            vec![c_plus / 2.0, -c_plus / 2.0],
            vec![c_minus / 2.0, -c_minus / 2.0],
        ],
        StochasticMatrix::new(vec![vec![q, 1.0 - q], vec![1.0 - q, q]]).unwrap(),
    )
    .unwrap()
}

pub fn crw_model(q: f64, c: f64) -> ChainModel {
    ChainModel {
        kernel: ChainKernel::Crw(make_crw(q, c, c, 1.0, 0.0).unwrap()),
        description: format!("crw q={q} c={c}"),
    }
}

/// Simple symmetric walk on `Z+` reflected at 0.
pub fn reflected_walk() -> ChainModel {
    make_tabular(&TabularSpec {
        labels: vec![0],
        rows: vec![TabularRow {
            label: 0,
            atoms: vec![
                TabularAtom {
                    jump: 1.0,
                    to: None,
                    p: 0.5,
                    p_inv_x: 0.0,
                },
                TabularAtom {
                    jump: -1.0,
                    to: None,
                    p: 0.5,
                    p_inv_x: 0.0,
                },
            ],
        }],
        boundary: BoundaryRule::Reflect,
        floor: 1.0,
        description: Some("reflected simple symmetric walk".into()),
    })
    .unwrap()
}

/// Row-stochastic matrix with every entry at least `0.02 / n`.
pub fn random_stochastic(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| 0.02 + rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            raw.iter().map(|v| v / s).collect()
        })
        .collect()
}

/// Stationary law by power iteration on the lazy chain `(I + Q) / 2`,
/// independent of the library solver and safe for periodic `Q`.
pub fn power_iteration(q: &[Vec<f64>]) -> Vec<f64> {
    let n = q.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..1_000_000 {
        let next: Vec<f64> = (0..n)
            .map(|j| 0.5 * pi[j] + 0.5 * (0..n).map(|i| pi[i] * q[i][j]).sum::<f64>())
            .collect();
        let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        pi = next;
        if diff < 1e-15 {
            break;
        }
    }
    pi
}

pub fn centered(rng: &mut ChaCha8Rng, pi: &[f64]) -> Vec<f64> {
    let d: Vec<f64> = pi.iter().map(|_| rng.random_range(-1.0..1.0)).collect();
    let mean: f64 = d.iter().zip(pi).map(|(a, b)| a * b).sum();
    d.iter().map(|v| v - mean).collect()
}

/// Random generalized-Lamperti coefficients with `|S| = n`.
pub fn random_coefficients(rng: &mut ChaCha8Rng, n: usize) -> AsymptoticCoefficients<f64> {
    let q = random_stochastic(rng, n);
    let pi = power_iteration(&q);
    let d = centered(rng, &pi);
    let e: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let t2: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
    let mut d_cross = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|_| rng.random_range(-0.5..0.5)).collect();
        let excess: f64 = row.iter().sum::<f64>() - d[i];
        row[i] -= excess;
        d_cross.push(row);
        let mut g: Vec<f64> = (0..n).map(|_| rng.random_range(-0.2..0.2)).collect();
        let s: f64 = g.iter().sum();
        g[i] -= s;
        gamma.push(g);
    }
    let labels = (0..n as i64).collect();
    AsymptoticCoefficients::new(
        labels,
        d,
        e,
        t2,
        d_cross,
        gamma,
        StochasticMatrix::new(q).unwrap(),
    )
    .unwrap()
}
