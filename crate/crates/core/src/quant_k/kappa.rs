use super::{QuantError, QuasiProjection, GAP_BOUNDARY_TOL};
use crate::filtered_matrix::{hermitian_eig, FilteredMatrix};
use crate::{CMat, C64};

/// Spectral rounding of a quasi-projection.
#[derive(Debug, Clone)]
pub struct Kappa0 {
    /// Spectral projection onto the eigenvalues above 1/2.
    pub projection: FilteredMatrix,
    /// `sqrt(1/4 - defect)`: no eigenvalue is closer than this to 1/2.
    pub gap_halfwidth: f64,
    pub rank: usize,
    /// Eigenvalues of the input, ascending.
    pub eigenvalues: Vec<f64>,
    /// `|p - kappa0(p)|`, read off the spectrum.
    pub distance: f64,
}

/// Half-width of the interval around 1/2 that the spectrum of an
/// `eps`-projection avoids: `|x^2 - x| < eps` forces `|x - 1/2| > sqrt(1/4 - eps)`.
pub fn forbidden_halfwidth(eps: f64) -> f64 {
    (0.25 - eps).max(0.0).sqrt()
}

pub fn kappa0(p: &QuasiProjection) -> Result<Kappa0, QuantError> {
    let eig = hermitian_eig(p.matrix.entries())?;
    let halfwidth = forbidden_halfwidth(p.eps);
    for &x in &eig.values {
        if (x - 0.5).abs() <= halfwidth - GAP_BOUNDARY_TOL {
            return Err(QuantError::GapViolated { eigenvalue: x, halfwidth });
        }
    }
    let keep = eig.columns_where(|x| x > 0.5);
    let n = eig.values.len();
    let mut basis = CMat::zeros(n, keep.len());
    for (c, &j) in keep.iter().enumerate() {
        basis.set_column(c, &eig.vectors.column(j));
    }
    let proj = &basis * basis.adjoint();
    // exact Hermitian symmetrization keeps p = p* bit-for-bit
    let proj = CMat::from_fn(n, n, |i, j| (proj[(i, j)] + proj[(j, i)].conj()) * C64::new(0.5, 0.0));
    let distance = eig.values.iter().map(|&x| if x > 0.5 { (x - 1.0).abs() } else { x.abs() }).fold(0.0, f64::max);
    Ok(Kappa0 {
        projection: p.matrix.with_entries(proj)?,
        gap_halfwidth: forbidden_halfwidth(p.defect),
        rank: keep.len(),
        eigenvalues: eig.values,
        distance,
    })
}
