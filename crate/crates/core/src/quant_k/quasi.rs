use super::{check_eps, QuantError};
use crate::filtered_matrix::{hermitian_eig, operator_norm, FilteredMatrix, UnitizedMatrix};
use crate::{CMat, Rat, C64};

/// Entrywise tolerance on `p - p*`, relative to `max(1, max |p_ij|)`.
pub const SELF_ADJOINT_ABS_TOL: f64 = 1e-12;

/// A validated `eps`-`r`-projection with its measured defect and propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiProjection {
    pub matrix: FilteredMatrix,
    pub eps: f64,
    pub r: Rat,
    pub defect: f64,
    pub measured_propagation: Rat,
}

/// A validated `eps`-`r`-unitary over the unitization.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiUnitary {
    pub matrix: UnitizedMatrix,
    pub eps: f64,
    pub r: Rat,
    /// `(|u* u - 1|, |u u* - 1|)`.
    pub defects: (f64, f64),
    pub measured_propagation: Rat,
}

impl QuasiUnitary {
    pub fn full(&self) -> FilteredMatrix {
        self.matrix.to_matrix()
    }

    pub fn defect(&self) -> f64 {
        self.defects.0.max(self.defects.1)
    }
}

/// Norm of a (numerically) Hermitian matrix as its largest eigenvalue modulus.
pub fn hermitian_norm(h: &CMat) -> f64 {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    match hermitian_eig(&sym) {
        Ok(e) => e.values.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Err(_) => operator_norm(h),
    }
}

/// `|p^2 - p|`.
pub fn projection_defect(p: &CMat) -> f64 {
    hermitian_norm(&(p * p - p))
}

/// `(|u* u - 1|, |u u* - 1|)`.
pub fn unitary_defects(u: &CMat) -> (f64, f64) {
    let n = u.nrows();
    let id = CMat::identity(n, n);
    (hermitian_norm(&(u.adjoint() * u - &id)), hermitian_norm(&(u * u.adjoint() - &id)))
}

fn max_entry(m: &CMat) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub(crate) fn is_self_adjoint(t: &FilteredMatrix) -> Result<(), QuantError> {
    let asym = t.self_adjoint_defect();
    if asym > SELF_ADJOINT_ABS_TOL * max_entry(t.entries()).max(1.0) {
        return Err(QuantError::NotSelfAdjoint(asym));
    }
    Ok(())
}

pub fn check_quasi_projection(t: &FilteredMatrix, eps: f64, r: Rat) -> Result<QuasiProjection, QuantError> {
    check_eps(eps)?;
    is_self_adjoint(t)?;
    let defect = projection_defect(t.entries());
    if defect >= eps {
        return Err(QuantError::DefectTooLarge(defect));
    }
    let prop = t.propagation();
    if prop > r {
        return Err(QuantError::PropagationTooLarge(prop));
    }
    Ok(QuasiProjection { matrix: t.clone(), eps, r, defect, measured_propagation: prop })
}

pub fn check_quasi_unitary(u: &UnitizedMatrix, eps: f64, r: Rat) -> Result<QuasiUnitary, QuantError> {
    check_eps(eps)?;
    let defects = unitary_defects(u.to_matrix().entries());
    if defects.0 >= eps || defects.1 >= eps {
        return Err(QuantError::DefectTooLarge(defects.0.max(defects.1)));
    }
    let prop = u.propagation();
    if prop > r {
        return Err(QuantError::PropagationTooLarge(prop));
    }
    Ok(QuasiUnitary { matrix: u.clone(), eps, r, defects, measured_propagation: prop })
}
