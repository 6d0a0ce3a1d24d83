//! Least-squares linear regression through a column-pivoted Householder
//! QR, extended to a complete orthogonal decomposition when the design is
//! rank deficient so the minimum-norm solution is returned.

use alloc::{vec, vec::Vec};

use crate::{Dataset, Error, Matrix, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    /// `n × p` solution of `min ‖A·X − B‖`.
    pub solution: Matrix,
    pub rank: usize,
}

/// Householder reflector stored as `(v, tau)` with `H = I − tau·v·vᵀ`.
struct Reflector {
    v: Vec<f64>,
    tau: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto `alpha·e₀`; returns it with `alpha`.
    fn new(x: &[f64]) -> (Self, f64) {
        let norm = libm::sqrt(x.iter().map(|v| v * v).sum());
        if norm == 0.0 {
            return (
                Self {
                    v: vec![0.0; x.len()],
                    tau: 0.0,
                },
                0.0,
            );
        }
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|a| a * a).sum();
        (Self { v, tau: 2.0 / vv }, alpha)
    }

    /// Applies `H` to `y` in place.
    fn apply(&self, y: &mut [f64]) {
        if self.tau == 0.0 {
            return;
        }
        let dot: f64 = self.v.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let s = self.tau * dot;
        for (yi, vi) in y.iter_mut().zip(&self.v) {
            *yi -= s * vi;
        }
    }
}

fn column_segment(m: &Matrix, col: usize, from: usize) -> Vec<f64> {
    (from..m.rows()).map(|i| m[(i, col)]).collect()
}

fn set_column_segment(m: &mut Matrix, col: usize, from: usize, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        m[(from + i, col)] = *v;
    }
}

/// Minimum-norm least-squares solution of `A·X ≈ B`.
pub fn lstsq(a: &Matrix, b: &Matrix) -> Result<LeastSquares> {
    let (m, n) = (a.rows(), a.cols());
    if b.rows() != m {
        return Err(Error::DimensionMismatch {
            context: "least-squares right-hand side",
            expected: m,
            found: b.rows(),
        });
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite("least-squares input".into()));
    }
    let p = b.cols();
    let mut r = a.clone();
    let mut qtb = b.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let steps = m.min(n);

    for k in 0..steps {
        let (pivot, _) = (k..n)
            .map(|j| {
                (
                    j,
                    column_segment(&r, j, k).iter().map(|v| v * v).sum::<f64>(),
                )
            })
            .fold(
                (k, -1.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
        if pivot != k {
            for i in 0..m {
                let t = r[(i, k)];
                r[(i, k)] = r[(i, pivot)];
                r[(i, pivot)] = t;
            }
            perm.swap(k, pivot);
        }
        let (h, alpha) = Reflector::new(&column_segment(&r, k, k));
        for j in k + 1..n {
            let mut col = column_segment(&r, j, k);
            h.apply(&mut col);
            set_column_segment(&mut r, j, k, &col);
        }
        for j in 0..p {
            let mut col = column_segment(&qtb, j, k);
            h.apply(&mut col);
            set_column_segment(&mut qtb, j, k, &col);
        }
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)] = 0.0;
        }
    }

    let top = if steps > 0 { r[(0, 0)].abs() } else { 0.0 };
    let tol = f64::EPSILON * (m.max(n) as f64) * top;
    let rank = (0..steps).take_while(|&k| r[(k, k)].abs() > tol).count();

    let mut y = Matrix::zeros(n, p);
    if rank == n {
        for j in 0..p {
            for i in (0..n).rev() {
                let mut s = qtb[(i, j)];
                for c in i + 1..n {
                    s -= r[(i, c)] * y[(c, j)];
                }
                y[(i, j)] = s / r[(i, i)];
            }
        }
    } else if rank > 0 {
        // T = R[0..rank, 0..n]; factor Tᵀ = Z·[U; 0] so T = [Uᵀ 0]·Zᵀ and
        // the minimum-norm solution is y = Z·[U⁻ᵀ c; 0].
        let mut tt = Matrix::zeros(n, rank);
        for i in 0..rank {
            for c in 0..n {
                tt[(c, i)] = r[(i, c)];
            }
        }
        let mut reflectors = Vec::with_capacity(rank);
        for k in 0..rank {
            let (h, alpha) = Reflector::new(&column_segment(&tt, k, k));
            for j in k + 1..rank {
                let mut col = column_segment(&tt, j, k);
                h.apply(&mut col);
                set_column_segment(&mut tt, j, k, &col);
            }
            tt[(k, k)] = alpha;
            reflectors.push(h);
        }
        for j in 0..p {
            let mut w = vec![0.0; n];
            for i in 0..rank {
                let mut s = qtb[(i, j)];
                for c in 0..i {
                    s -= tt[(c, i)] * w[c];
                }
                w[i] = s / tt[(i, i)];
            }
            for (k, h) in reflectors.iter().enumerate().rev() {
                h.apply(&mut w[k..]);
            }
            for i in 0..n {
                y[(i, j)] = w[i];
            }
        }
    }

    let mut solution = Matrix::zeros(n, p);
    for (i, &dst) in perm.iter().enumerate() {
        solution.row_mut(dst).copy_from_slice(y.row(i));
    }
    Ok(LeastSquares { solution, rank })
}

/// First-order multiple regression on `[1, x₁ … x_v]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    /// `(1 + v) × outputs`
    pub coefficients: Matrix,
    pub rank: usize,
    pub rank_deficient: bool,
}

impl LinearFit {
    pub fn predict(&self, features: &Matrix) -> Result<Matrix> {
        features.matmul(&self.coefficients)
    }
}

pub fn fit_lr(train: &Dataset) -> Result<LinearFit> {
    if train.is_empty() {
        return Err(Error::Empty("regression data"));
    }
    let ls = lstsq(train.features(), train.targets())?;
    let cols = train.features().cols();
    Ok(LinearFit {
        coefficients: ls.solution,
        rank: ls.rank,
        rank_deficient: ls.rank < cols,
    })
}
