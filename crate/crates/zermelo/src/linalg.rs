//! Small dense linear algebra.
//!
//! Two layers: a generic matrix [`SMat`] over any [`Real`] scalar so that
//! metric tensors, Christoffel symbols and linear solves can run inside
//! dual-number towers, and `f64`-level routines (generalized symmetric
//! eigenproblem, eigenvalue grouping, principal angles) backed by nalgebra.
//! Everything here lives at desk scale: dimensions stay in single digits.

use crate::dual::Real;
use crate::error::{GeomError, Result};
use nalgebra::{DMatrix, DVector};

/// Row-major dense matrix over a generic scalar.
#[derive(Clone, Debug)]
pub struct SMat<S> {
    pub rows: usize,
    pub cols: usize,
    data: Vec<S>,
}

impl<S: Real> SMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SMat {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        SMat { rows, cols, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    acc = acc + self[(i, j)].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn mul_mat(&self, rhs: &SMat<S>) -> SMat<S> {
        assert_eq!(self.cols, rhs.rows);
        SMat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * rhs[(k, j)].clone();
            }
            acc
        })
    }

    /// v^T M w bilinear form.
    pub fn bilinear(&self, v: &[S], w: &[S]) -> S {
        let mw = self.mul_vec(w);
        dot(v, &mw)
    }

    /// LU decomposition with partial pivoting; pivot choice uses the
    /// principal value so the routine stays valid inside dual towers.
    fn lu(&self) -> Option<(Vec<Vec<S>>, Vec<usize>, bool)> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<S>> = (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)].clone()).collect())
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd = false;
        for k in 0..n {
            let (piv, piv_abs) = (k..n)
                .map(|i| (i, a[i][k].value().abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))?;
            if piv_abs == 0.0 {
                return None;
            }
            if piv != k {
                a.swap(piv, k);
                perm.swap(piv, k);
                odd = !odd;
            }
            let inv = S::one() / a[k][k].clone();
            for i in (k + 1)..n {
                let factor = a[i][k].clone() * inv.clone();
                a[i][k] = factor.clone();
                for j in (k + 1)..n {
                    a[i][j] = a[i][j].clone() - factor.clone() * a[k][j].clone();
                }
            }
        }
        Some((a, perm, odd))
    }

    pub fn det(&self) -> S {
        match self.lu() {
            None => S::zero(),
            Some((lu, _, odd)) => {
                let mut d = if odd { -S::one() } else { S::one() };
                for i in 0..self.rows {
                    d = d * lu[i][i].clone();
                }
                d
            }
        }
    }

    pub fn solve_vec(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.rows;
        let (lu, perm, _) = self
            .lu()
            .ok_or_else(|| GeomError::SingularMatrix(format!("{}x{} solve", n, n)))?;
        let mut y: Vec<S> = perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] = y[i].clone() - lu[i][j].clone() * y[j].clone();
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                y[i] = y[i].clone() - lu[i][j].clone() * y[j].clone();
            }
            y[i] = y[i].clone() / lu[i][i].clone();
        }
        Ok(y)
    }

    pub fn inverse(&self) -> Result<SMat<S>> {
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![S::zero(); n];
            e[j] = S::one();
            cols.push(self.solve_vec(&e)?);
        }
        Ok(SMat::from_fn(n, n, |i, j| cols[j][i].clone()))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].value())
    }
}

impl<S> std::ops::Index<(usize, usize)> for SMat<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> std::ops::IndexMut<(usize, usize)> for SMat<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    assert_eq!(a.len(), b.len());
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

pub fn scale<S: Real>(a: &[S], c: S) -> Vec<S> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

pub fn add_vec<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub_vec<S: Real>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

/// Symmetric real matrix with a checkable positive-definiteness predicate.
#[derive(Clone, Debug)]
pub struct SymMatrix {
    mat: DMatrix<f64>,
}

impl SymMatrix {
    /// Symmetrizes the input; entries off by more than round-off are a
    /// caller bug, so only (A + A^T)/2 is kept.
    pub fn new(mat: DMatrix<f64>) -> Self {
        assert_eq!(mat.nrows(), mat.ncols());
        let sym = (&mat + mat.transpose()) * 0.5;
        SymMatrix { mat: sym }
    }

    pub fn from_smat(m: &SMat<f64>) -> Self {
        Self::new(m.to_f64())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// All eigenvalues strictly above `tol`.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        self.eigenvalues().into_iter().all(|l| l > tol)
    }
}

/// Solution of the generalized symmetric eigenproblem A v = lambda B v.
#[derive(Clone, Debug)]
pub struct GeigSolution {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Columns are B-orthonormal eigenvectors, ordered like `values`.
    pub vectors: DMatrix<f64>,
}

/// Generalized symmetric eigenproblem via Cholesky reduction: with
/// B = L L^T the problem becomes the ordinary symmetric eigenproblem for
/// L^{-1} A L^{-T}, and eigenvectors pull back through L^{-T}, which makes
/// them B-orthonormal.
pub fn solve_sym_geig(a: &SymMatrix, b: &SymMatrix) -> Result<GeigSolution> {
    assert_eq!(a.dim(), b.dim());
    let b_eigs = b.eigenvalues();
    if let Some(&bad) = b_eigs.iter().find(|&&l| l <= 0.0) {
        return Err(GeomError::NotPositiveDefinite(bad));
    }
    let chol = b
        .matrix()
        .clone()
        .cholesky()
        .ok_or(GeomError::NotPositiveDefinite(b_eigs[0]))?;
    let l = chol.l();
    // C = L^{-1} A L^{-T}
    let mut c = a.matrix().clone();
    c = l.solve_lower_triangular(&c).expect("nonsingular L");
    c = l
        .solve_lower_triangular(&c.transpose())
        .expect("nonsingular L");
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let u = eig.eigenvectors.column(i).clone_owned();
        let v = l
            .transpose()
            .solve_upper_triangular(&u)
            .expect("nonsingular L^T");
        vectors.set_column(col, &v);
    }
    Ok(GeigSolution { values, vectors })
}

impl GeigSolution {
    /// Max residual ||A v - lambda B v|| over all returned pairs.
    pub fn residual(&self, a: &SymMatrix, b: &SymMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, &l) in self.values.iter().enumerate() {
            let v = self.vectors.column(k);
            let r = a.matrix() * v - b.matrix() * v * l;
            worst = worst.max(r.norm());
        }
        worst
    }
}

/// One multiplicity class of a sorted spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenGroup {
    pub mean: f64,
    /// Index range [start, end) into the ascending eigenvalue list.
    pub start: usize,
    pub end: usize,
}

impl EigenGroup {
    pub fn multiplicity(&self) -> usize {
        self.end - self.start
    }
}

/// Splits an ascending spectrum into multiplicity classes: consecutive
/// values closer than `tol` share a class.
pub fn group_eigenvalues(sorted: &[f64], tol: f64) -> Vec<EigenGroup> {
    let mut groups = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || (sorted[i] - sorted[i - 1]).abs() > tol {
            let slice = &sorted[start..i];
            let mean = slice.iter().sum::<f64>() / slice.len() as f64;
            groups.push(EigenGroup {
                mean,
                start,
                end: i,
            });
            start = i;
        }
    }
    groups
}

/// Principal angles (radians, ascending) between the column spans of `u`
/// and `v`, measured in the inner product `metric`. A uniform rescaling of
/// the metric leaves the angles unchanged, which is what makes this the
/// right comparison between conformally related induced metrics.
pub fn principal_angles(u: &DMatrix<f64>, v: &DMatrix<f64>, metric: &DMatrix<f64>) -> Vec<f64> {
    let qu = metric_orthonormalize(u, metric);
    let qv = metric_orthonormalize(v, metric);
    let m = qu.transpose() * metric * qv;
    let svd = m.svd(false, false);
    let mut angles: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| s.clamp(-1.0, 1.0).acos())
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
}

fn metric_orthonormalize(basis: &DMatrix<f64>, metric: &DMatrix<f64>) -> DMatrix<f64> {
    // Gram-Schmidt in the given inner product.
    let n = basis.nrows();
    let k = basis.ncols();
    let mut q = DMatrix::zeros(n, k);
    let mut kept = 0;
    for j in 0..k {
        let mut v: DVector<f64> = basis.column(j).clone_owned();
        for i in 0..kept {
            let qi = q.column(i).clone_owned();
            let proj = (qi.transpose() * metric * &v)[(0, 0)];
            v -= qi * proj;
        }
        let norm2 = (v.transpose() * metric * &v)[(0, 0)];
        if norm2 > 1e-24 {
            q.set_column(kept, &(v / norm2.sqrt()));
            kept += 1;
        }
    }
    q.columns(0, kept).clone_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geig_identity_pair() {
        let a = SymMatrix::new(DMatrix::identity(3, 3));
        let b = SymMatrix::new(DMatrix::identity(3, 3));
        let sol = solve_sym_geig(&a, &b).unwrap();
        for l in &sol.values {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn geig_diagonal_pair() {
        let a = SymMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0])));
        let b = SymMatrix::new(DMatrix::identity(2, 2));
        let sol = solve_sym_geig(&a, &b).unwrap();
        assert!((sol.values[0] - 1.0).abs() < 1e-14);
        assert!((sol.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn geig_hand_solved_generalized_pair() {
        // A = diag(2,2), B = diag(2,1): eigenvalues of B^{-1} A are (1, 2).
        let a = SymMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0])));
        let b = SymMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])));
        let sol = solve_sym_geig(&a, &b).unwrap();
        assert!((sol.values[0] - 1.0).abs() < 1e-14);
        assert!((sol.values[1] - 2.0).abs() < 1e-14);
        assert!(sol.residual(&a, &b) < 1e-12);
        // B-orthonormality
        let g = sol.vectors.transpose() * b.matrix() * &sol.vectors;
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn geig_rejects_indefinite_b() {
        let a = SymMatrix::new(DMatrix::identity(2, 2));
        let b = SymMatrix::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -0.5])));
        match solve_sym_geig(&a, &b) {
            Err(GeomError::NotPositiveDefinite(l)) => assert!((l + 0.5).abs() < 1e-14),
            other => panic!("expected NotPositiveDefinite, got {:?}", other),
        }
    }

    #[test]
    fn generic_solve_and_det() {
        let m = SMat::from_fn(3, 3, |i, j| if i == j { 2.0 } else { 0.5 });
        let b = vec![1.0, 2.0, 3.0];
        let x = m.solve_vec(&b).unwrap();
        let back = m.mul_vec(&x);
        for (u, v) in back.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
        // det(1.5 I + 0.5 J) on 3x3 = 1.5^2 * (1.5 + 3*0.5)
        assert!((m.det() - 1.5f64 * 1.5 * 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_grouping() {
        let vals = [1.0, 1.0 + 1e-9, 2.0, 3.0, 3.0 + 5e-8];
        let groups = group_eigenvalues(&vals, 1e-7);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[0].multiplicity(), 2);
        assert_eq!(groups[1].multiplicity(), 1);
        assert_eq!(groups[2].multiplicity(), 2);
    }

    #[test]
    fn principal_angles_of_rotated_plane() {
        let u = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let th = 0.3f64;
        let v = DMatrix::from_column_slice(
            3,
            2,
            &[th.cos(), 0.0, th.sin(), 0.0, 1.0, 0.0],
        );
        let id = DMatrix::identity(3, 3);
        let angles = principal_angles(&u, &v, &id);
        assert!((angles[0] - 0.0).abs() < 1e-12);
        assert!((angles[1] - th).abs() < 1e-12);
    }
}
