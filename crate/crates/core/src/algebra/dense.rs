//! Tiny dense linear algebra for the cocycle solver: Householder QR with
//! column pivoting, numerical rank, null spaces and least squares.

use super::AlgebraError;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Dense {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn transpose(&self) -> Dense {
        let mut t = Dense::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `A P = Q R` with `Q` orthogonal (stored explicitly), `R` upper
/// trapezoidal with non-increasing diagonal magnitudes, `P` a permutation.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    q: Dense,
    r: Dense,
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &Dense) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut r = a.clone();
        let mut q = Dense::zeros(m, m);
        for i in 0..m {
            q.set(i, i, 1.0);
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..m.min(n) {
            // Pivot: remaining column of largest norm below row k.
            let col_norm = |r: &Dense, j: usize| (k..m).map(|i| r.get(i, j).powi(2)).sum::<f64>();
            let best = (k..n)
                .max_by(|&x, &y| col_norm(&r, x).total_cmp(&col_norm(&r, y)).then(y.cmp(&x)))
                .unwrap_or(k);
            if best != k {
                for i in 0..m {
                    let t = r.get(i, k);
                    r.set(i, k, r.get(i, best));
                    r.set(i, best, t);
                }
                perm.swap(k, best);
            }
            let x: Vec<f64> = (k..m).map(|i| r.get(i, k)).collect();
            let alpha = norm(&x);
            if alpha == 0.0 {
                continue;
            }
            let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
            let mut v = x;
            v[0] += sign * alpha;
            let vn = norm(&v);
            v.iter_mut().for_each(|e| *e /= vn);
            // R ← H R, Q ← Q H with H = I − 2 v vᵀ acting on rows k..m.
            for j in 0..n {
                let s: f64 = (k..m).map(|i| v[i - k] * r.get(i, j)).sum();
                for i in k..m {
                    r.set(i, j, r.get(i, j) - 2.0 * v[i - k] * s);
                }
            }
            for i in 0..m {
                let s: f64 = (k..m).map(|l| q.get(i, l) * v[l - k]).sum();
                for l in k..m {
                    q.set(i, l, q.get(i, l) - 2.0 * s * v[l - k]);
                }
            }
        }
        PivotedQr { q, r, perm }
    }

    /// Numerical rank with threshold `rel_tol · |R₀₀|`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let k = self.r.rows.min(self.r.cols);
        let top = if k == 0 { 0.0 } else { self.r.get(0, 0).abs() };
        if top == 0.0 {
            return 0;
        }
        (0..k).take_while(|&i| self.r.get(i, i).abs() > rel_tol * top).count()
    }

    pub fn q(&self) -> &Dense {
        &self.q
    }

    pub fn r(&self) -> &Dense {
        &self.r
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}

/// Orthonormal basis of `{x : A x = 0}` from the pivoted QR of `Aᵀ`: the
/// trailing columns of `Q` beyond the rank span the orthogonal complement of
/// the row space.
pub fn null_space(a: &Dense, rel_tol: f64) -> Vec<Vec<f64>> {
    let qr = PivotedQr::new(&a.transpose());
    let rank = qr.rank(rel_tol);
    (rank..a.cols).map(|j| qr.q.column(j)).collect()
}

/// Least-squares solution of `A x ≈ b` for a full-column-rank tall `A`,
/// returned with the residual norm `‖A x − b‖`.
pub fn least_squares(a: &Dense, b: &[f64], rel_tol: f64) -> Result<(Vec<f64>, f64), AlgebraError> {
    assert_eq!(b.len(), a.rows);
    let n = a.cols;
    let qr = PivotedQr::new(a);
    if qr.rank(rel_tol) < n {
        let diag = if n == 0 { 0.0 } else { qr.r.get(n - 1, n - 1) };
        return Err(AlgebraError::Singular(diag));
    }
    // Solve R y = Qᵀ b on the leading n×n block, then undo the pivoting.
    let qtb: Vec<f64> = (0..n)
        .map(|j| (0..a.rows).map(|i| qr.q.get(i, j) * b[i]).sum())
        .collect();
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| qr.r.get(i, j) * y[j]).sum();
        y[i] = (qtb[i] - s) / qr.r.get(i, i);
    }
    let mut x = vec![0.0; n];
    for (k, &p) in qr.perm.iter().enumerate() {
        x[p] = y[k];
    }
    let ax = a.mul_vec(&x);
    let res = norm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    Ok((x, res))
}
