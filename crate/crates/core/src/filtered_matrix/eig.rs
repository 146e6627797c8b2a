//! Cyclic Jacobi eigendecomposition for dense Hermitian matrices.

use super::MatrixError;
use crate::{CMat, C64};

/// Relative self-adjointness tolerance accepted by [`hermitian_eig`].
pub const SELF_ADJOINT_TOL: f64 = 1e-12;

/// Sweeps stop once the off-diagonal Frobenius norm falls below this
/// multiple of the Frobenius norm of the input.
const OFF_DIAGONAL_STOP: f64 = 1e-13;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEig {
    /// Rebuilds `V diag(f(lambda)) V*`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let w = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= w;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// Columns of `V` whose eigenvalue satisfies `pred`, in ascending order.
    pub fn columns_where(&self, pred: impl Fn(f64) -> bool) -> Vec<usize> {
        (0..self.values.len()).filter(|&j| pred(self.values[j])).collect()
    }
}

/// Largest entrywise modulus of `H - H*`.
pub fn self_adjoint_defect(h: &CMat) -> f64 {
    let n = h.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn frobenius(h: &CMat) -> f64 {
    h.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian eigendecomposition `H = V diag(lambda) V*` by cyclic Jacobi
/// rotations. Eigenvectors are phase-normalized so that the first entry of
/// non-negligible modulus is real and positive.
pub fn hermitian_eig(h: &CMat) -> Result<HermitianEig, MatrixError> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(MatrixError::ShapeMismatch);
    }
    let scale = frobenius(h);
    let asym = self_adjoint_defect(h);
    if asym > SELF_ADJOINT_TOL * scale.max(f64::MIN_POSITIVE) && asym > 0.0 {
        return Err(MatrixError::NotSelfAdjoint(asym));
    }
    // symmetrize exactly before rotating
    let mut a =
        CMat::from_fn(
            n,
            n,
            |i, j| {
                if i == j {
                    C64::new(h[(i, i)].re, 0.0)
                } else {
                    (h[(i, j)] + h[(j, i)].conj()) * 0.5
                }
            },
        );
    let mut v = CMat::identity(n, n);
    let stop = OFF_DIAGONAL_STOP * scale;
    // entries this small are zeroed instead of rotated: a rotation built from
    // a subnormal entry has an inexact phase and would not be unitary
    let negligible = f64::EPSILON * 1e-3 * scale;

    for _sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|j| (0..n).filter(move |&i| i != j).map(move |i| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= stop || n < 2 {
            return Ok(finish(a, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q, negligible);
            }
        }
    }
    Err(MatrixError::NoConvergence)
}

/// Annihilates `a[p][q]` with a unitary plane rotation `J`, `A <- J* A J`,
/// `V <- V J`.
fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize, negligible: f64) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= negligible {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag; // e^{i phi}
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta == 0.0 { 1.0 } else { theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt()) };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = D R with D = diag(1, e^{-i phi}) on (p, q), R the real rotation
    // [[c, s], [-s, c]]; columns: Jp = c e_p - s e^{-i phi} e_q,
    // Jq = s e_p + c e^{-i phi} e_q.
    let w = phase.conj();
    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * w * s;
        a[(k, q)] = akp * s + akq * w * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * w.conj() * s;
        a[(q, k)] = apk * s + aqk * w.conj() * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * w * s;
        v[(k, q)] = vkp * s + vkq * w * c;
    }
}

fn finish(a: CMat, v: CMat) -> HermitianEig {
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let lead = (0..n).map(|i| v[(i, src)]).find(|z| z.norm() > 1e-8);
        let fix = lead.map_or(C64::new(1.0, 0.0), |z| z.conj() / z.norm());
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)] * fix;
        }
    }
    HermitianEig { values, vectors }
}
