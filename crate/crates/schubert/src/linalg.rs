//! Dense exact linear algebra: row reduction, kernels, cokernels and
//! row-echelon subspace bookkeeping over any [`Field`].

use crate::scalar::Field;

/// A dense matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat<F> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<F>,
}

impl<F: Field> Mat<F> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::<F>::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].add(&a.mul(&other[(k, j)]));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc = acc.add(&self[(i, j)].mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat<F> {
        let mut out = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns the pivot columns
    /// (leftmost-preferred, so the output is deterministic).
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(pr) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, pr);
            let inv = self[(r, c)].inv().expect("pivot is nonzero");
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].mul(&inv);
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let s = self[(r, j)].mul(&f);
                        self[(i, j)] = self[(i, j)].sub(&s);
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == self.rows {
                break;
            }
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the null space `{x : Mx = 0}`, one column vector per entry.
    pub fn kernel_basis(&self) -> Vec<Vec<F>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let rank = pivots.len();
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![F::zero(); self.cols];
            v[free] = F::one();
            for (i, &pc) in pivots.iter().enumerate().take(rank) {
                v[pc] = m[(i, free)].neg();
            }
            basis.push(v);
        }
        basis
    }
}

impl<F> std::ops::Index<(usize, usize)> for Mat<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Mat<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

/// A subspace of `F^dim`, stored as a reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace<F> {
    pub ambient: usize,
    /// Row-echelon basis rows; empty for the zero subspace.
    pub basis: Mat<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Mat::zero(0, ambient),
            pivots: Vec::new(),
        }
    }

    pub fn span(ambient: usize, vectors: Vec<Vec<F>>) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let mut m = Mat::from_rows(vectors);
        let pivots = m.rref();
        let rank = pivots.len();
        let rows = (0..rank).map(|i| m.row(i).to_vec()).collect::<Vec<_>>();
        let basis = if rank == 0 {
            Mat::zero(0, ambient)
        } else {
            Mat::from_rows(rows)
        };
        Subspace {
            ambient,
            basis,
            pivots,
        }
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Residual of `v` after subtracting its projection onto the subspace.
    /// The result is zero exactly when `v` lies in the subspace.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (i, &p) in self.pivots.iter().enumerate() {
            if !v[p].is_zero() {
                let f = v[p].clone();
                for (j, slot) in v.iter_mut().enumerate() {
                    let s = self.basis[(i, j)].mul(&f);
                    *slot = slot.sub(&s);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(F::is_zero)
    }

    pub fn contains_subspace(&self, other: &Subspace<F>) -> bool {
        (0..other.dim()).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace<F>) -> Subspace<F> {
        let mut rows: Vec<Vec<F>> = (0..self.dim())
            .map(|i| self.basis.row(i).to_vec())
            .collect();
        rows.extend((0..other.dim()).map(|i| other.basis.row(i).to_vec()));
        if rows.is_empty() {
            return Subspace::zero(self.ambient);
        }
        Subspace::span(self.ambient, rows)
    }

    /// Image `M(self)` inside `F^{M.rows}`.
    pub fn image_under(&self, m: &Mat<F>) -> Subspace<F> {
        if self.dim() == 0 {
            return Subspace::zero(m.rows);
        }
        let rows = (0..self.dim())
            .map(|i| m.apply(self.basis.row(i)))
            .collect();
        Subspace::span(m.rows, rows)
    }

    /// Preimage `{x : Mx in self}`, where `M` maps `F^{M.cols}` to the
    /// ambient space of `self`.
    pub fn preimage_under(&self, m: &Mat<F>) -> Subspace<F> {
        assert_eq!(m.rows, self.ambient);
        // x is in the preimage iff the reduction of Mx by the basis vanishes,
        // i.e. iff x lies in the kernel of (reduce . M).
        let reduced_cols: Vec<Vec<F>> = (0..m.cols)
            .map(|j| {
                let col: Vec<F> = (0..m.rows).map(|i| m[(i, j)].clone()).collect();
                self.reduce(&col)
            })
            .collect();
        let mut residual = Mat::zero(m.rows, m.cols);
        for (j, col) in reduced_cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                residual[(i, j)] = x.clone();
            }
        }
        let kernel = residual.kernel_basis();
        if kernel.is_empty() {
            return Subspace::zero(m.cols);
        }
        Subspace::span(m.cols, kernel)
    }
}

fn unit<F: Field>(dim: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); dim];
    v[i] = F::one();
    v
}

impl<F: Field> Subspace<F> {
    pub fn whole(ambient: usize) -> Self {
        if ambient == 0 {
            return Self::zero(0);
        }
        Subspace::span(ambient, (0..ambient).map(|i| unit(ambient, i)).collect())
    }
}

/// Cokernel data for `M : F^c -> F^r`: a projection matrix `P` of shape
/// `(r - rank) x r` with `P . M = 0`, whose rows are dual to the non-pivot
/// coordinates of the column space.
pub fn cokernel_projection<F: Field>(m: &Mat<F>) -> Mat<F> {
    let image = {
        let rows = (0..m.cols)
            .map(|j| (0..m.rows).map(|i| m[(i, j)].clone()).collect())
            .collect();
        Subspace::span(m.rows, rows)
    };
    let complement: Vec<usize> = (0..m.rows).filter(|i| !image.pivots.contains(i)).collect();
    let mut p = Mat::zero(complement.len(), m.rows);
    // P(e_i) = coordinates of reduce(e_i) at the complement positions.
    for i in 0..m.rows {
        let reduced = image.reduce(&unit(m.rows, i));
        for (row, &c) in complement.iter().enumerate() {
            p[(row, i)] = reduced[c].clone();
        }
    }
    p
}

/// The Gaussian binomial coefficient `[n choose k]_q`, i.e. the number of
/// k-dimensional subspaces of `F_q^n`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let qi = |e: usize| -> u128 {
        // q^e - 1
        let mut acc = 1u128;
        for _ in 0..e {
            acc *= q as u128;
        }
        acc - 1
    };
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..k {
        num *= qi(n - i);
        den *= qi(i + 1);
    }
    num / den
}

/// Iterates over all `k`-dimensional subspaces of `F_q^n` (as subspaces with
/// row-echelon bases), one representative per subspace.
pub fn subspaces<const P: u64>(n: usize, k: usize) -> Vec<Subspace<crate::scalar::Fp<P>>> {
    use crate::scalar::Fp;
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    if k == 0 {
        out.push(Subspace::zero(n));
        return out;
    }
    let mut pivots: Vec<usize> = (0..k).collect();
    loop {
        // Free entries sit at (row i, column c) with c > pivots[i], c not a pivot.
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|i| {
                let pivots = &pivots;
                (pivots[i] + 1..n)
                    .filter(move |c| !pivots.contains(c))
                    .map(move |c| (i, c))
            })
            .collect();
        let mut counters = vec![0u64; free.len()];
        loop {
            let mut m = Mat::<Fp<P>>::zero(k, n);
            for (i, &p) in pivots.iter().enumerate() {
                m[(i, p)] = Fp::new(1);
            }
            for (slot, &(i, c)) in free.iter().enumerate() {
                m[(i, c)] = Fp::new(counters[slot]);
            }
            out.push(Subspace {
                ambient: n,
                basis: m,
                pivots: pivots.clone(),
            });
            // Odometer over the free entries.
            let mut slot = 0;
            loop {
                if slot == counters.len() {
                    break;
                }
                counters[slot] += 1;
                if counters[slot] < P {
                    break;
                }
                counters[slot] = 0;
                slot += 1;
            }
            if slot == counters.len() {
                break;
            }
        }
        // Next pivot combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pivots[i] < n - (k - i) {
                pivots[i] += 1;
                for j in i + 1..k {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Fp, Rat};

    #[test]
    fn rref_and_kernel() {
        let mut m = Mat::from_rows(vec![
            vec![Rat::int(1), Rat::int(2), Rat::int(3)],
            vec![Rat::int(2), Rat::int(4), Rat::int(6)],
        ]);
        let pivots = m.rref();
        assert_eq!(pivots, vec![0]);
        let kernel = Mat::from_rows(vec![
            vec![Rat::int(1), Rat::int(2), Rat::int(3)],
            vec![Rat::int(2), Rat::int(4), Rat::int(6)],
        ])
        .kernel_basis();
        assert_eq!(kernel.len(), 2);
    }

    #[test]
    fn preimage_and_image() {
        // M: F^2 -> F^2, (x, y) -> (x + y, 0)
        let m = Mat::from_rows(vec![
            vec![Rat::int(1), Rat::int(1)],
            vec![Rat::int(0), Rat::int(0)],
        ]);
        let w = Subspace::span(2, vec![vec![Rat::int(1), Rat::int(0)]]);
        let pre = w.preimage_under(&m);
        assert_eq!(pre.dim(), 2);
        let img = Subspace::whole(2).image_under(&m);
        assert_eq!(img.dim(), 1);
        assert!(img.contains(&[Rat::int(2), Rat::int(0)]));
    }

    #[test]
    fn cokernel_projection_annihilates_image() {
        let m = Mat::from_rows(vec![
            vec![Rat::int(1), Rat::int(0)],
            vec![Rat::int(1), Rat::int(0)],
            vec![Rat::int(0), Rat::int(0)],
        ]);
        let p = cokernel_projection(&m);
        assert_eq!(p.rows, 2);
        assert!(p.mul(&m).data.iter().all(Rat::is_zero));
    }

    #[test]
    fn subspace_counts_match_gaussian_binomials() {
        for n in 0..=4usize {
            for k in 0..=n {
                assert_eq!(
                    subspaces::<2>(n, k).len() as u128,
                    gaussian_binomial(n, k, 2),
                    "n={n} k={k}"
                );
            }
        }
        assert_eq!(
            subspaces::<3>(4, 2).len() as u128,
            gaussian_binomial(4, 2, 3)
        );
        let all = subspaces::<3>(3, 2);
        assert_eq!(all.len(), 13);
        for s in &all {
            assert_eq!(s.dim(), 2);
        }
    }

    #[test]
    fn fp_matrix_rank() {
        let m = Mat::from_rows(vec![
            vec![Fp::<2>::new(1), Fp::new(1)],
            vec![Fp::new(1), Fp::new(1)],
        ]);
        assert_eq!(m.rank(), 1);
    }
}
