#![allow(dead_code)]

use tropicore::algebra::{Matrix, Semiring, Vector};

pub const GOLDEN: f64 = 1e-3;

pub fn example1(sr: Semiring) -> Matrix {
    Matrix::from_rows(
        &[
            vec![0.1206, 0.0, 0.0, 0.0, 0.0],
            vec![0.5895, 0.2904, 1.0, 0.8797, 0.4253],
            vec![0.2262, 0.6171, 0.3439, 1.0, 0.3127],
            vec![0.3846, 0.2653, 0.5841, 0.2607, 1.0],
            vec![0.5830, 1.0, 0.1078, 0.5944, 0.1788],
        ],
        sr,
    )
    .unwrap()
}

pub fn example2(sr: Semiring) -> Matrix {
    Matrix::from_rows(
        &[
            vec![0.0, 1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.6718, 0.2240, 0.5805, 0.1868],
            vec![0.6951, 0.6678, 0.4753, 0.3735],
        ],
        sr,
    )
    .unwrap()
}

pub fn close(x: &[f64], y: &[f64], eps: f64) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| (a - b).abs() <= eps)
}

/// Both normalized to max entry one before comparing.
pub fn close_rays(x: &Vector, y: &[f64], eps: f64) -> bool {
    let m = y.iter().copied().fold(0.0, f64::max);
    let y: Vec<f64> = y.iter().map(|v| v / m).collect();
    match x.normalized() {
        Some(xn) => close(&xn, &y, eps),
        None => false,
    }
}

/// Every expected ray matched by exactly one computed vector.
pub fn same_rays(got: &[Vector], expected: &[&[f64]], eps: f64) -> bool {
    got.len() == expected.len()
        && expected
            .iter()
            .all(|e| got.iter().filter(|g| close_rays(g, e, eps)).count() == 1)
}
