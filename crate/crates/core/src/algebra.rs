//! Dense nonnegative matrices and vectors over the max-times, plus-times and
//! Boolean semirings, together with cone membership and extremal filtering.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The arithmetic a [`Matrix`] is interpreted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semiring {
    /// `a ⊕ b = max(a, b)`, `a ⊗ b = a·b` over the nonnegative reals.
    MaxTimes,
    /// Ordinary addition and multiplication over the nonnegative reals.
    PlusTimes,
    /// `{0, 1}` with disjunction and conjunction.
    Boolean,
}

impl Semiring {
    #[inline]
    pub fn add(self, a: f64, b: f64) -> f64 {
        match self {
            Semiring::MaxTimes | Semiring::Boolean => a.max(b),
            Semiring::PlusTimes => a + b,
        }
    }

    #[inline]
    pub fn mul(self, a: f64, b: f64) -> f64 {
        match self {
            Semiring::Boolean => {
                if a > 0.0 && b > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            _ => a * b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Semiring::MaxTimes => "max",
            Semiring::PlusTimes => "nonneg",
            Semiring::Boolean => "boolean",
        }
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Comparison policy for floating values: `x ≈ y` iff
/// `|x − y| ≤ abs_eps + rel_eps·max(|x|, |y|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub abs_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_eps: 1e-9,
            abs_eps: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64, abs_eps: f64) -> Result<Self> {
        if !(rel_eps > 0.0) || !rel_eps.is_finite() {
            return Err(Error::InvalidTolerance(format!(
                "rel_eps must be positive and finite, got {rel_eps}"
            )));
        }
        if !(abs_eps >= 0.0) || !abs_eps.is_finite() {
            return Err(Error::InvalidTolerance(format!(
                "abs_eps must be nonnegative and finite, got {abs_eps}"
            )));
        }
        Ok(Tolerance { rel_eps, abs_eps })
    }

    /// Tolerance with the given relative epsilon and the default absolute floor.
    pub fn with_rel(rel_eps: f64) -> Result<Self> {
        Self::new(rel_eps, Tolerance::default().abs_eps)
    }

    #[inline]
    pub fn eq(&self, x: f64, y: f64) -> bool {
        (x - y).abs() <= self.abs_eps + self.rel_eps * x.abs().max(y.abs())
    }

    #[inline]
    pub fn le(&self, x: f64, y: f64) -> bool {
        x <= y || self.eq(x, y)
    }

    #[inline]
    pub fn lt(&self, x: f64, y: f64) -> bool {
        x < y && !self.eq(x, y)
    }

    #[inline]
    pub fn is_zero(&self, x: f64) -> bool {
        x.abs() <= self.abs_eps
    }
}

/// A nonnegative vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(x) = entries.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidVector(format!(
                "entries must be finite and nonnegative, found {x}"
            )));
        }
        Ok(Vector(entries))
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn ones(n: usize) -> Self {
        Vector(vec![1.0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn max_entry(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Indices of entries above `tol.abs_eps`.
    pub fn support(&self, tol: &Tolerance) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, x)| **x > tol.abs_eps)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_zero(&self, tol: &Tolerance) -> bool {
        self.0.iter().all(|x| *x <= tol.abs_eps)
    }

    pub fn scaled(&self, c: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * c).collect())
    }

    /// Scales to max entry 1; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let m = self.max_entry();
        if m > 0.0 {
            Some(self.scaled(1.0 / m))
        } else {
            None
        }
    }

    pub fn approx_eq(&self, other: &Vector, tol: &Tolerance) -> bool {
        self.len() == other.len() && self.iter().zip(other.iter()).all(|(a, b)| tol.eq(*a, *b))
    }

    /// `self = c·other` for some `c > 0`: both are compared after max-normalization.
    pub fn proportional(&self, other: &Vector, tol: &Tolerance) -> bool {
        match (self.normalized(), other.normalized()) {
            (Some(a), Some(b)) => a.approx_eq(&b, tol),
            (None, None) => true,
            _ => false,
        }
    }

    /// Thresholds at one: entry 1 where `x_i ≥ 1 − rel_eps`, else 0.
    pub fn booleanize(&self, tol: &Tolerance) -> Result<Vector> {
        if self.0.iter().any(|x| *x > 1.0 + tol.rel_eps) {
            return Err(Error::NotSubUnitized);
        }
        Ok(Vector(
            self.0
                .iter()
                .map(|x| if *x >= 1.0 - tol.rel_eps { 1.0 } else { 0.0 })
                .collect(),
        ))
    }

    pub fn lex_cmp(&self, other: &Vector) -> Ordering {
        for (a, b) in self.iter().zip(other.iter()) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.len().cmp(&other.len())
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Dense square nonnegative matrix, row-major, tagged with its semiring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    entries: Vec<f64>,
    semiring: Semiring,
}

impl Matrix {
    pub fn new(n: usize, entries: Vec<f64>, semiring: Semiring) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("dimension must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {n}x{n} matrix, found {}",
                n * n,
                entries.len()
            )));
        }
        if let Some(x) = entries.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(Error::InvalidMatrix(format!(
                "entries must be finite and nonnegative, found {x}"
            )));
        }
        Ok(Matrix {
            n,
            entries,
            semiring,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], semiring: Semiring) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::InvalidMatrix(format!(
                "matrix is not square: {n} rows but a row of length {}",
                r.len()
            )));
        }
        Self::new(n, rows.iter().flatten().copied().collect(), semiring)
    }

    fn from_parts(n: usize, entries: Vec<f64>, semiring: Semiring) -> Self {
        Matrix {
            n,
            entries,
            semiring,
        }
    }

    pub fn zeros(n: usize, semiring: Semiring) -> Self {
        Self::from_parts(n, vec![0.0; n * n], semiring)
    }

    pub fn identity(n: usize, semiring: Semiring) -> Self {
        let mut m = Self::zeros(n, semiring);
        for i in 0..n {
            m.entries[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn with_semiring(&self, semiring: Semiring) -> Matrix {
        Matrix {
            semiring,
            ..self.clone()
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.n).map(|i| self.get(i, j)).collect())
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.n).map(|j| self.column(j)).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix::from_parts(
            self.n,
            self.entries.iter().map(|x| x * c).collect(),
            self.semiring,
        )
    }

    /// Matrix product in the semiring of `self`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let sr = self.semiring;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let row = &other.entries[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = sr.add(*d, sr.mul(a, *b));
                }
            }
        }
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::SpectralBlowUp);
        }
        Ok(Matrix::from_parts(n, out, sr))
    }

    /// `A^k` by repeated squaring.
    pub fn power(&self, k: usize) -> Result<Matrix> {
        if k == 0 {
            return Err(Error::ZeroPower);
        }
        let mut result: Option<Matrix> = None;
        let mut base = self.clone();
        let mut e = k;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(result.expect("k >= 1"))
    }

    /// `A ⊗ x` (or `A·x`) in the semiring of `self`.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        let sr = self.semiring;
        let out: Vec<f64> = (0..self.n)
            .map(|i| {
                self.entries[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x.iter())
                    .fold(0.0, |acc, (a, b)| sr.add(acc, sr.mul(*a, *b)))
            })
            .collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::SpectralBlowUp);
        }
        Ok(Vector(out))
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn submatrix(&self, idx: &[usize]) -> Matrix {
        let m = idx.len();
        let mut out = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                out.push(self.get(i, j));
            }
        }
        Matrix::from_parts(m, out, self.semiring)
    }

    /// Full-size copy that keeps only the `idx × idx` entries.
    pub fn restricted(&self, idx: &[usize]) -> Matrix {
        let mut keep = vec![false; self.n];
        for &i in idx {
            keep[i] = true;
        }
        let mut out = self.entries.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if !(keep[i] && keep[j]) {
                    out[i * self.n + j] = 0.0;
                }
            }
        }
        Matrix::from_parts(self.n, out, self.semiring)
    }

    /// `X^{-1} A X` with `X = diag(x)`, `x` positive.
    pub fn diagonal_similarity(&self, x: &Vector) -> Result<Matrix> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        if x.iter().any(|v| *v <= 0.0) {
            return Err(Error::InvalidVector("scaling vector must be positive".into()));
        }
        let n = self.n;
        let mut out = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] *= x[j] / x[i];
            }
        }
        Ok(Matrix::from_parts(n, out, self.semiring))
    }

    /// Simultaneous row/column permutation: entry `(p, q)` of the result is
    /// `a[perm[p]][perm[q]]`.
    pub fn permuted(&self, perm: &[usize]) -> Matrix {
        self.submatrix(perm)
    }

    /// Elementwise thresholding at one; see [`booleanize`].
    pub fn booleanize(&self, tol: &Tolerance) -> Result<Matrix> {
        booleanize(self, tol)
    }
}

/// Boolean matrix with ones where `a_ij ≥ 1 − rel_eps`.
pub fn booleanize(a: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    if a.entries.iter().any(|x| *x > 1.0 + tol.rel_eps) {
        return Err(Error::NotSubUnitized);
    }
    Ok(Matrix::from_parts(
        a.n,
        a.entries
            .iter()
            .map(|x| if *x >= 1.0 - tol.rel_eps { 1.0 } else { 0.0 })
            .collect(),
        Semiring::Boolean,
    ))
}

/// Result of a cone membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Outside,
}

impl Membership {
    pub fn is_inside(self) -> bool {
        self == Membership::Inside
    }
}

/// Decides whether `z` lies in the cone spanned by `gens` in the given semiring.
pub fn membership(gens: &[Vector], z: &Vector, sr: Semiring, tol: &Tolerance) -> Result<Membership> {
    let n = z.len();
    if let Some(g) = gens.iter().find(|g| g.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: g.len(),
        });
    }
    let Some(z) = z.normalized() else {
        return Ok(Membership::Inside);
    };
    let gens: Vec<Vector> = gens.iter().filter_map(|g| g.normalized()).collect();
    let inside = match sr {
        Semiring::MaxTimes | Semiring::Boolean => max_membership(&gens, &z, tol),
        Semiring::PlusTimes => plus_membership(&gens, &z, tol),
    };
    Ok(if inside {
        Membership::Inside
    } else {
        Membership::Outside
    })
}

/// Residuation: the greatest max combination below `z` is compared with `z`.
fn max_membership(gens: &[Vector], z: &Vector, tol: &Tolerance) -> bool {
    let n = z.len();
    let mut best = vec![0.0f64; n];
    for g in gens {
        let mut alpha = f64::INFINITY;
        for j in 0..n {
            if g[j] > tol.abs_eps {
                alpha = alpha.min(z[j] / g[j]);
            }
        }
        if !alpha.is_finite() || alpha <= 0.0 {
            continue;
        }
        for j in 0..n {
            best[j] = best[j].max(alpha * g[j]);
        }
    }
    best.iter().zip(z.iter()).all(|(b, z)| tol.eq(*b, *z))
}

fn plus_membership(gens: &[Vector], z: &Vector, tol: &Tolerance) -> bool {
    if gens.is_empty() {
        return false;
    }
    let n = z.len();
    let g = DMatrix::from_fn(n, gens.len(), |i, j| gens[j][i]);
    let zv = DVector::from_column_slice(z);
    let alpha = nnls(&g, &zv);
    let residual = (&g * &alpha - &zv).amax();
    residual <= tol.rel_eps.max(tol.abs_eps) * (1.0 + z.max_entry())
}

/// Lawson–Hanson nonnegative least squares: `argmin ‖G α − z‖₂` over `α ≥ 0`.
pub(crate) fn nnls(g: &DMatrix<f64>, z: &DVector<f64>) -> DVector<f64> {
    let m = g.ncols();
    let mut x = DVector::<f64>::zeros(m);
    let mut passive = vec![false; m];
    let scale = 1.0 + g.amax() * z.amax();
    let wtol = 1e-13 * scale * (m.max(1) as f64);

    // Householder QR; a passive set with a numerically dependent column yields zeros.
    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..m).filter(|&j| passive[j]).collect();
        let mut s = DVector::<f64>::zeros(m);
        if idx.is_empty() || idx.len() > g.nrows() {
            return s;
        }
        let qr = g.select_columns(idx.iter()).qr();
        let r = qr.r();
        let top = r.diagonal().amax();
        if r.diagonal().iter().any(|d| d.abs() <= 1e-13 * top) {
            return s;
        }
        let rhs = qr.q().transpose() * z;
        if let Some(sol) = r.solve_upper_triangular(&rhs) {
            for (k, &j) in idx.iter().enumerate() {
                s[j] = sol[k];
            }
        }
        s
    };

    let mut blocked = vec![false; m];
    for _outer in 0..(6 * m + 10) {
        let w = g.transpose() * (z - g * &x);
        let candidate = (0..m)
            .filter(|&j| !passive[j] && !blocked[j])
            .max_by(|&a, &b| w[a].total_cmp(&w[b]));
        let Some(j) = candidate else { break };
        if w[j] <= wtol {
            break;
        }
        passive[j] = true;
        let first = solve_passive(&passive);
        if first[j] <= 0.0 {
            // Ill-conditioned entry: the new column cannot enter at this point.
            passive[j] = false;
            blocked[j] = true;
            continue;
        }
        blocked.iter_mut().for_each(|b| *b = false);
        let mut s = first;
        for _inner in 0..(3 * m + 10) {
            if (0..m).filter(|&i| passive[i]).all(|i| s[i] > 0.0) {
                x = s;
                break;
            }
            let mut step = f64::INFINITY;
            for i in 0..m {
                if passive[i] && s[i] <= 0.0 {
                    let d = x[i] - s[i];
                    if d > 0.0 {
                        step = step.min(x[i] / d);
                    }
                }
            }
            if !step.is_finite() {
                step = 0.0;
            }
            x += (&s - &x) * step;
            for i in 0..m {
                if passive[i] && (x[i] <= 1e-15 * scale || s[i] <= 0.0 && step == 0.0) {
                    passive[i] = false;
                    x[i] = 0.0;
                }
            }
            s = solve_passive(&passive);
        }
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    x
}

/// Normalized extremal generators of the cone spanned by `gens`, in input order.
pub fn extremal_filter(gens: &[Vector], sr: Semiring, tol: &Tolerance) -> Vec<Vector> {
    let mut kept: Vec<Vector> = Vec::new();
    for g in gens.iter().filter_map(|g| g.normalized()) {
        if !kept.iter().any(|k| k.approx_eq(&g, tol)) {
            kept.push(g);
        }
    }
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<Vector> = kept
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| v.clone())
            .collect();
        let redundant = membership(&others, &kept[i], sr, tol)
            .map(Membership::is_inside)
            .unwrap_or(false);
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

/// Mutual membership of two generator sets.
pub fn same_cone(a: &[Vector], b: &[Vector], sr: Semiring, tol: &Tolerance) -> bool {
    cone_contains(a, b, sr, tol) && cone_contains(b, a, sr, tol)
}

/// Every vector of `inner` lies in the span of `outer`.
pub fn cone_contains(outer: &[Vector], inner: &[Vector], sr: Semiring, tol: &Tolerance) -> bool {
    inner.iter().all(|v| {
        membership(outer, v, sr, tol)
            .map(Membership::is_inside)
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn m(rows: &[&[f64]], sr: Semiring) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), sr).unwrap()
    }

    #[test]
    fn permutation_squares_to_identity() {
        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]], Semiring::MaxTimes);
        assert_eq!(a.power(2).unwrap(), Matrix::identity(2, Semiring::MaxTimes));
    }

    #[test]
    fn max_powers_of_unit_upper_triangle_are_constant() {
        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]], Semiring::MaxTimes);
        assert_eq!(a.power(7).unwrap(), a);
        // plus-times grows linearly in the corner
        let p = a.with_semiring(Semiring::PlusTimes).power(7).unwrap();
        assert_eq!(p.get(0, 1), 7.0);
    }

    #[test]
    fn power_overflow_is_reported() {
        let a = m(&[&[1e200]], Semiring::PlusTimes);
        assert_eq!(a.power(3).unwrap_err(), Error::SpectralBlowUp);
        assert_eq!(a.power(0).unwrap_err(), Error::ZeroPower);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Matrix::new(0, vec![], Semiring::MaxTimes).is_err());
        assert!(Matrix::new(2, vec![1.0; 3], Semiring::MaxTimes).is_err());
        assert!(Matrix::new(1, vec![-1.0], Semiring::MaxTimes).is_err());
        assert!(Matrix::new(1, vec![f64::NAN], Semiring::MaxTimes).is_err());
        assert!(Tolerance::new(0.0, 0.0).is_err());
        assert!(Tolerance::new(1e-9, -1.0).is_err());
    }

    #[test]
    fn max_membership_by_residuation() {
        let tol = Tolerance::default();
        let gens = [v(&[1.0, 0.0]), v(&[1.0, 1.0])];
        assert_eq!(
            membership(&gens, &v(&[1.0, 0.5]), Semiring::MaxTimes, &tol).unwrap(),
            Membership::Inside
        );
        assert_eq!(
            membership(&[v(&[1.0, 1.0])], &v(&[1.0, 0.5]), Semiring::MaxTimes, &tol).unwrap(),
            Membership::Outside
        );
    }

    #[test]
    fn zero_vector_is_in_every_cone() {
        let tol = Tolerance::default();
        let gens = [v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        for sr in [Semiring::MaxTimes, Semiring::PlusTimes] {
            assert!(membership(&gens, &v(&[0.0, 0.0]), sr, &tol).unwrap().is_inside());
            assert!(membership(&[], &v(&[0.0, 0.0]), sr, &tol).unwrap().is_inside());
        }
    }

    #[test]
    fn plus_membership_respects_signs() {
        let tol = Tolerance::default();
        assert_eq!(
            membership(&[v(&[1.0, 1.0])], &v(&[1.0, 0.0]), Semiring::PlusTimes, &tol).unwrap(),
            Membership::Outside
        );
        let gens = [v(&[1.0, 0.0, 0.0]), v(&[0.0, 1.0, 1.0])];
        assert!(membership(&gens, &v(&[0.3, 2.0, 2.0]), Semiring::PlusTimes, &tol)
            .unwrap()
            .is_inside());
        assert!(!membership(&gens, &v(&[0.3, 2.0, 1.0]), Semiring::PlusTimes, &tol)
            .unwrap()
            .is_inside());
    }

    #[test]
    fn membership_dimension_mismatch() {
        let tol = Tolerance::default();
        let err = membership(&[v(&[1.0])], &v(&[1.0, 0.0]), Semiring::MaxTimes, &tol).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 1 });
    }

    #[test]
    fn extremal_filter_drops_joins_and_sums() {
        let tol = Tolerance::default();
        let gens = [v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[1.0, 1.0])];
        let expect = vec![v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert_eq!(extremal_filter(&gens, Semiring::MaxTimes, &tol), expect);
        assert_eq!(extremal_filter(&gens, Semiring::PlusTimes, &tol), expect);
        let both = [v(&[1.0, 0.5]), v(&[1.0, 1.0])];
        assert_eq!(extremal_filter(&both, Semiring::MaxTimes, &tol).len(), 2);
        assert!(extremal_filter(&[], Semiring::MaxTimes, &tol).is_empty());
        // duplicates up to scaling collapse
        let dup = [v(&[2.0, 1.0]), v(&[1.0, 0.5])];
        assert_eq!(extremal_filter(&dup, Semiring::PlusTimes, &tol), vec![v(&[1.0, 0.5])]);
    }

    #[test]
    fn booleanize_thresholds_at_one() {
        let tol = Tolerance::default();
        let a = m(&[&[1.0, 0.9], &[0.3, 1.0]], Semiring::MaxTimes);
        let b = a.booleanize(&tol).unwrap();
        assert_eq!(b.entries(), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(b.semiring(), Semiring::Boolean);
        let i = Matrix::identity(3, Semiring::MaxTimes);
        assert_eq!(i.booleanize(&tol).unwrap().entries(), i.entries());
        let big = m(&[&[1.5]], Semiring::MaxTimes);
        assert_eq!(big.booleanize(&tol).unwrap_err(), Error::NotSubUnitized);
        assert_eq!(v(&[1.0, 0.2]).booleanize(&tol).unwrap(), v(&[1.0, 0.0]));
    }

    #[test]
    fn nnls_recovers_nonnegative_combination() {
        let g = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        let z = DVector::from_column_slice(&[2.0, 3.0, 5.0]);
        let a = nnls(&g, &z);
        assert!((a[0] - 2.0).abs() < 1e-12 && (a[1] - 3.0).abs() < 1e-12);
        // the unconstrained solution would be negative
        let z = DVector::from_column_slice(&[-1.0, 1.0, 0.0]);
        let a = nnls(&g, &z);
        assert!(a.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn similarity_and_restriction() {
        let a = m(&[&[1.0, 2.0], &[3.0, 4.0]], Semiring::PlusTimes);
        let b = a.diagonal_similarity(&v(&[1.0, 2.0])).unwrap();
        assert_eq!(b.entries(), &[1.0, 4.0, 1.5, 4.0]);
        let r = a.restricted(&[1]);
        assert_eq!(r.entries(), &[0.0, 0.0, 0.0, 4.0]);
        assert_eq!(a.submatrix(&[1, 0]).entries(), &[4.0, 3.0, 2.0, 1.0]);
    }
}
