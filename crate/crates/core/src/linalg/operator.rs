use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

/// Dense complex matrix, row-major. Square in almost every use; isometries
/// from purification are the rectangular exception.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Cx<T>>,
}

const PAR_MATMUL_DIM: usize = 96;

impl<T: Real> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        Self::zeros_rect(dim, dim)
    }

    pub fn zeros_rect(rows: usize, cols: usize) -> Self {
        DenseOperator {
            rows,
            cols,
            data: vec![Cx::zero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseOperator { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}×{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseOperator { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Cx<T>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    /// Square matrix from real `f64` rows; convenient for literal gates.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        Self::from_fn(d, rows[0].len(), |r, c| Cx::new(T::from_f64_lossy(rows[r][c]), T::zero()))
    }

    pub fn diag(entries: &[Cx<T>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    /// Rank-one outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Cx<T>], b: &[Cx<T>]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `log2(dim)` for square power-of-two matrices.
    pub fn num_qubits(&self) -> Option<usize> {
        (self.is_square() && self.rows.is_power_of_two()).then(|| self.rows.trailing_zeros() as usize)
    }

    pub fn data(&self) -> &[Cx<T>] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Cx<T>> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[Cx<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Cx<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_same(&self, other: &Self, what: &str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "{what}: {}×{} vs {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "matmul: {}×{} · {}×{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.mm(rhs))
    }

    /// Matrix product; panics on shape mismatch.
    pub fn mm(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let (n, m) = (self.rows, rhs.cols);
        let mut out = vec![Cx::zero(); n * m];
        let row_kernel = |(r, out_row): (usize, &mut [Cx<T>])| {
            let a_row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (k, &a) in a_row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let b_row = &rhs.data[k * m..(k + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        };
        if n >= PAR_MATMUL_DIM && m >= PAR_MATMUL_DIM {
            out.par_chunks_mut(m).enumerate().for_each(row_kernel);
        } else {
            out.chunks_mut(m).enumerate().for_each(row_kernel);
        }
        DenseOperator {
            rows: n,
            cols: m,
            data: out,
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs, "add")?;
        Ok(self.zip_with(rhs, |a, b| a + b))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs, "sub")?;
        Ok(self.zip_with(rhs, |a, b| a - b))
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Cx<T>, Cx<T>) -> Cx<T>) -> Self {
        DenseOperator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `self += s · rhs`; panics on shape mismatch.
    pub fn add_scaled(&mut self, s: Cx<T>, rhs: &Self) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += s * b;
        }
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn map(&self, f: impl Fn(Cx<T>) -> Cx<T>) -> Self {
        DenseOperator {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r2, c2) = (rhs.rows, rhs.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |r, c| {
            self[(r / r2, c / c2)] * rhs[(r % r2, c % c2)]
        })
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.rows.min(self.cols)).fold(Cx::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
    }

    /// Induced 1-norm (max column sum).
    pub fn one_norm(&self) -> T {
        (0..self.cols)
            .map(|c| (0..self.rows).fold(T::zero(), |acc, r| acc + self[(r, c)].norm()))
            .fold(T::zero(), T::max)
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Largest entrywise deviation; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.rows != other.rows || self.cols != other.cols {
            return T::infinity();
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// `max |(A†A − I)_{ij}|`.
    pub fn unitarity_residual(&self) -> T {
        self.adjoint()
            .mm(self)
            .max_abs_diff(&Self::identity(self.cols))
    }

    pub fn hermiticity_residual(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn apply(&self, v: &[Cx<T>]) -> Result<Vec<Cx<T>>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector length {} for {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Cx::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect())
    }

    /// Copies `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(r0 + r, c0 + c)] = block[(r, c)];
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |r, c| self[(r0 + r, c0 + c)])
    }

    /// `diag(a, b)` as a two-block operator.
    pub fn block_diag(a: &Self, b: &Self) -> Self {
        let mut m = Self::zeros_rect(a.rows + b.rows, a.cols + b.cols);
        m.set_block(0, 0, a);
        m.set_block(a.rows, a.cols, b);
        m
    }

    /// Integer power by repeated squaring (square matrices).
    pub fn powi(&self, mut k: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mm(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mm(&base);
            }
        }
        acc
    }

    pub fn cast<U: Real>(&self) -> DenseOperator<U> {
        DenseOperator {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Cx::new(U::from_f64_lossy(z.re.to_f64_lossy()), U::from_f64_lossy(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

impl<T: Real> Index<(usize, usize)> for DenseOperator<T> {
    type Output = Cx<T>;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Cx<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for DenseOperator<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Cx<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Euclidean inner product `⟨a|b⟩`.
pub fn inner<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Cx<T> {
    a.iter().zip(b).fold(Cx::zero(), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm<T: Real>(a: &[Cx<T>]) -> T {
    a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

/// Tensor product of state vectors.
pub fn kron_vec<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Computational basis vector `|index⟩` of dimension `dim`.
pub fn basis_state<T: Real>(dim: usize, index: usize) -> Vec<Cx<T>> {
    let mut v = vec![Cx::zero(); dim];
    v[index] = Cx::one();
    v
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve<T: Real>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> Result<DenseOperator<T>> {
    let n = a.rows();
    if !a.is_square() || b.rows() != n {
        return Err(Error::Shape("solve: incompatible shapes".into()));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = x.cols();
    for k in 0..n {
        let (p, pivot) = (k..n)
            .map(|r| (r, lu[(r, k)].norm()))
            .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot == T::zero() || !pivot.is_finite() {
            return Err(Error::Overflow("singular system in solve".into()));
        }
        if p != k {
            for c in 0..n {
                lu.data.swap(k * n + c, p * n + c);
            }
            for c in 0..m {
                x.data.swap(k * m + c, p * m + c);
            }
        }
        let inv = lu[(k, k)].inv();
        for r in k + 1..n {
            let f = lu[(r, k)] * inv;
            if f.is_zero() {
                continue;
            }
            for c in k..n {
                let v = lu[(k, c)];
                lu[(r, c)] -= f * v;
            }
            for c in 0..m {
                let v = x[(k, c)];
                x[(r, c)] -= f * v;
            }
        }
    }
    for k in (0..n).rev() {
        let inv = lu[(k, k)].inv();
        for c in 0..m {
            let mut s = x[(k, c)];
            for j in k + 1..n {
                s -= lu[(k, j)] * x[(j, c)];
            }
            x[(k, c)] = s * inv;
        }
    }
    Ok(x)
}

/// Lifts a `k`-qubit operator onto `targets` of an `n`-qubit register,
/// acting as the identity elsewhere. `targets[0]` is the most significant
/// qubit of `op`.
pub fn embed<T: Real>(op: &DenseOperator<T>, targets: &[usize], n: usize) -> Result<DenseOperator<T>> {
    let k = targets.len();
    if op.num_qubits() != Some(k) {
        return Err(Error::Shape(format!("{}x{} operator on {k} target qubits", op.rows(), op.cols())));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::IndexOutOfRange { index: t, size: n });
        }
        if targets[..i].contains(&t) {
            return Err(Error::InvalidArgument(format!("qubit {t} targeted twice")));
        }
    }
    let d = 1usize << n;
    let mask: usize = targets.iter().map(|&t| 1usize << (n - 1 - t)).sum();
    let sub = |x: usize| {
        targets
            .iter()
            .fold(0usize, |acc, &t| (acc << 1) | ((x >> (n - 1 - t)) & 1))
    };
    let mut out = DenseOperator::zeros(d);
    for r in 0..d {
        let sr = sub(r);
        let rest = r & !mask;
        for sc in 0..(1usize << k) {
            let mut c = rest;
            for (i, &t) in targets.iter().enumerate() {
                if (sc >> (k - 1 - i)) & 1 == 1 {
                    c |= 1 << (n - 1 - t);
                }
            }
            out[(r, c)] = op[(sr, sc)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    type Op = DenseOperator<f64>;

    #[test]
    fn kron_and_matmul() {
        let x = Op::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = Op::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let xz = x.kron(&z);
        assert_eq!(xz[(0, 2)], cx(1.0, 0.0));
        assert_eq!(xz[(1, 3)], cx(-1.0, 0.0));
        let sq = xz.mm(&xz);
        assert_eq!(sq.max_abs_diff(&Op::identity(4)), 0.0);
        assert!(x.matmul(&Op::identity(4)).is_err());
    }

    #[test]
    fn solve_recovers_rhs() {
        let a = Op::from_fn(5, 5, |r, c| cx((r * 7 + c * 3) as f64 % 5.0 + if r == c { 6.0 } else { 0.0 }, (r as f64 - c as f64) * 0.1));
        let x = Op::from_fn(5, 2, |r, c| cx(r as f64, c as f64 - 0.5));
        let b = a.mm(&x);
        let got = solve(&a, &b).unwrap();
        assert!(got.max_abs_diff(&x) < 1e-12);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let a = Op::from_fn(3, 3, |r, c| cx(0.1 * (r + 2 * c) as f64, 0.05 * r as f64));
        let mut want = Op::identity(3);
        for _ in 0..7 {
            want = want.mm(&a);
        }
        assert!(a.powi(7).max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn embed_matches_kron() {
        let x = DenseOperator::<f64>::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = DenseOperator::<f64>::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let i2 = DenseOperator::<f64>::identity(2);
        let want = x.kron(&i2).kron(&z);
        assert_eq!(embed(&x.kron(&z), &[0, 2], 3).unwrap(), want);
        assert_eq!(embed(&z.kron(&x), &[2, 0], 3).unwrap(), want);
        assert_eq!(embed(&x, &[1], 3).unwrap(), i2.kron(&x).kron(&i2));
        assert!(embed(&x, &[3], 3).is_err());
        assert!(embed(&x.kron(&z), &[1, 1], 3).is_err());
    }
}
