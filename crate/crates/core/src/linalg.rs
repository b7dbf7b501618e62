//! Small dense eigen-solvers used throughout the crate.
//!
//! Everything here works on fixed-size nalgebra matrices. Symmetric real
//! matrices are diagonalised by cyclic Jacobi rotations; Hermitian complex
//! matrices by the complex variant of the same sweep. Both are unconditionally
//! stable for the 3×3 and 4×4 sizes the models need.

use nalgebra::{Complex, SMatrix, SVector};

pub type Complex64 = Complex<f64>;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order together with a matrix whose
/// columns are the matching orthonormal eigenvectors. Only the upper triangle
/// is read.
pub fn jacobi_symmetric<const N: usize>(
    m: &SMatrix<f64, N, N>,
) -> (SVector<f64, N>, SMatrix<f64, N, N>) {
    let mut a = *m;
    for i in 0..N {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
        }
    }
    let mut v = SMatrix::<f64, N, N>::identity();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = off_diagonal_sq(&a);
        let diag: f64 = (0..N).map(|i| a[(i, i)] * a[(i, i)]).sum();
        if off == 0.0 || off <= f64::EPSILON * f64::EPSILON * 1e-4 * diag {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (c, s, t) = rotation(a[(p, p)], a[(q, q)], apq);
                for k in 0..N {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(p, k)] = a[(k, p)];
                    a[(k, q)] = s * akp + c * akq;
                    a[(q, k)] = a[(k, q)];
                }
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..N {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = SVector::<f64, N>::from_fn(|i, _| a[(order[i], order[i])]);
    let vectors = SMatrix::<f64, N, N>::from_fn(|r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues (ascending) of a Hermitian matrix by complex Jacobi rotations.
///
/// Each pivot is first made real by a diagonal phase, then annihilated with
/// an ordinary real rotation. Only the upper triangle is read.
pub fn hermitian_eigenvalues<const N: usize>(m: &SMatrix<Complex64, N, N>) -> SVector<f64, N> {
    let mut a = *m;
    for i in 0..N {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in 0..i {
            a[(i, j)] = a[(j, i)].conj();
        }
    }

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..N {
            diag += a[(i, i)].re * a[(i, i)].re;
            for j in (i + 1)..N {
                off += a[(i, j)].norm_sqr();
            }
        }
        if off == 0.0 || off <= f64::EPSILON * f64::EPSILON * 1e-4 * diag {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let g = a[(p, q)];
                let r = g.norm();
                if r == 0.0 {
                    continue;
                }
                let phase = (g / r).conj();
                let (c, s, t) = rotation(a[(p, p)].re, a[(q, q)].re, r);
                for k in 0..N {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)] * phase;
                    let new_kp = akp * c - akq * s;
                    let new_kq = akp * s + akq * c;
                    a[(k, p)] = new_kp;
                    a[(p, k)] = new_kp.conj();
                    a[(k, q)] = new_kq;
                    a[(q, k)] = new_kq.conj();
                }
                a[(p, p)] = Complex64::new(a[(p, p)].re - t * r, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re + t * r, 0.0);
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let mut vals: [f64; N] = std::array::from_fn(|i| a[(i, i)].re);
    vals.sort_by(f64::total_cmp);
    SVector::<f64, N>::from_column_slice(&vals)
}

/// Trace norm ‖H‖₁ = Σ|λᵢ| of a Hermitian matrix.
pub fn trace_norm_hermitian<const N: usize>(m: &SMatrix<Complex64, N, N>) -> f64 {
    hermitian_eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// Eigenvalues of a real symmetric 3×3 matrix from the trigonometric closed
/// form (m, p, q, φ), returned ascending.
///
/// `p³ − q²` is clamped at zero when roundoff drives it negative, and the
/// angle uses `atan2` so that negative `q` lands on the shifted branch. When
/// the matrix is a multiple of the identity (`p = 0`) all three eigenvalues
/// equal the mean of the diagonal.
pub fn symmetric3_closed_form(c: &SMatrix<f64, 3, 3>) -> [f64; 3] {
    let m = c.trace() / 3.0;
    let b = c - SMatrix::<f64, 3, 3>::identity() * m;
    let p = b.iter().map(|x| x * x).sum::<f64>() / 6.0;
    if p <= f64::MIN_POSITIVE {
        return [m, m, m];
    }
    let q = 0.5 * b.determinant();
    let disc = (p * p * p - q * q).max(0.0);
    let phi = disc.sqrt().atan2(q) / 3.0;
    let sp = p.sqrt();
    let (sin, cos) = phi.sin_cos();
    let sqrt3 = 3f64.sqrt();
    // φ ∈ [0, π/3] so these come out ordered low, middle, high.
    let low = m - sp * (cos + sqrt3 * sin);
    let mid = m - sp * (cos - sqrt3 * sin);
    let high = m + 2.0 * sp * cos;
    [low, mid, high]
}

fn off_diagonal_sq<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    let mut off = 0.0;
    for i in 0..N {
        for j in (i + 1)..N {
            off += a[(i, j)] * a[(i, j)];
        }
    }
    off
}

/// Jacobi rotation (c, s, t) zeroing the off-diagonal `apq` of the 2×2 block
/// [[app, apq], [apq, aqq]].
fn rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    (c, t * c, t)
}
