use super::QuantError;

/// A control pair `(lambda, h)`: `lambda > 1` and a non-increasing
/// `h : (0, 1/(4 lambda)) -> (1, inf)`, stored as a piecewise-constant table.
///
/// Piece `i` covers `(upper[i-1], upper[i]]`; the last upper bound is the
/// (excluded) end of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPair {
    lambda: f64,
    pieces: Vec<(f64, f64)>,
}

impl ControlPair {
    /// Table given as `(upper_bound, value)` pieces; the final upper bound is
    /// replaced by the domain end `1/(4 lambda)`.
    pub fn new(lambda: f64, mut pieces: Vec<(f64, f64)>) -> Result<Self, QuantError> {
        let bad = |m: &str| QuantError::InvalidControlPair(m.to_string());
        if !(lambda > 1.0) || !lambda.is_finite() {
            return Err(bad("lambda must exceed 1"));
        }
        if pieces.is_empty() {
            return Err(bad("table is empty"));
        }
        let end = Self::domain_end_for(lambda);
        let last = pieces.len() - 1;
        pieces[last].0 = end;
        let mut prev_bound = 0.0;
        let mut prev_value = f64::INFINITY;
        for &(bound, value) in &pieces {
            if !(bound > prev_bound) || bound > end {
                return Err(bad("breakpoints must increase inside the domain"));
            }
            if !(value > 1.0) || !value.is_finite() {
                return Err(bad("h must take values above 1"));
            }
            if value > prev_value {
                return Err(bad("h must be non-increasing"));
            }
            prev_bound = bound;
            prev_value = value;
        }
        Ok(Self { lambda, pieces })
    }

    pub fn constant(lambda: f64, value: f64) -> Result<Self, QuantError> {
        Self::new(lambda, vec![(f64::INFINITY, value)])
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    fn domain_end_for(lambda: f64) -> f64 {
        1.0 / (4.0 * lambda)
    }

    pub fn domain_end(&self) -> f64 {
        Self::domain_end_for(self.lambda)
    }

    /// Upper bounds of all pieces, the last one being the domain end.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.0).collect()
    }

    /// `h(eps)`, or `None` outside `(0, 1/(4 lambda))`.
    pub fn eval(&self, eps: f64) -> Option<f64> {
        if !(eps > 0.0) || eps >= self.domain_end() {
            return None;
        }
        self.piece_value(eps)
    }

    /// Piece lookup on the closed-right domain `(0, end]`.
    fn piece_value(&self, eps: f64) -> Option<f64> {
        if !(eps > 0.0) {
            return None;
        }
        self.pieces.iter().find(|p| eps <= p.0).map(|p| p.1)
    }
}

/// `(lambda lambda', h * h')` with `(h * h')(eps) = h(lambda' eps) h'(eps)` on
/// `(0, 1/(4 lambda lambda'))`.
pub fn compose_control_pairs(first: &ControlPair, second: &ControlPair) -> Result<ControlPair, QuantError> {
    let lambda = first.lambda * second.lambda;
    let end = 1.0 / (4.0 * lambda);
    let scale = second.lambda;
    let mut bounds: Vec<f64> = second
        .pieces
        .iter()
        .map(|p| p.0)
        .chain(first.pieces.iter().map(|p| p.0 / scale))
        .filter(|&b| b > 0.0 && b < end * (1.0 - 1e-12))
        .collect();
    bounds.push(end);
    bounds.sort_by(f64::total_cmp);
    bounds.dedup();
    // each composed piece is constant on its interior; sample at the midpoint
    // so that rescaled breakpoints never round into the neighbouring piece
    let mut prev = 0.0;
    let pieces = bounds
        .into_iter()
        .map(|b| {
            let mid = 0.5 * (prev + b);
            prev = b;
            let h = first.piece_value(scale * mid).expect("inside domain");
            let h2 = second.piece_value(mid).expect("inside domain");
            (b, h * h2)
        })
        .collect();
    ControlPair::new(lambda, pieces)
}
