//! Scalar root finding on a sign-changing bracket.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootError {
    /// `f(lo)` and `f(hi)` have the same sign.
    NotBracketed,
    /// The evaluation budget ran out; carries the best point seen.
    Exhausted {
        best: Root,
    },
    NonFinite,
}

/// Bisection until the bracket is narrower than `switch_width`, then safeguarded secant.
///
/// Converged when `|f(x)| <= ftol`. `f(lo)` / `f(hi)` must already be known.
pub fn bisect_then_secant<F>(
    mut f: F,
    (mut lo, mut flo): (f64, f64),
    (mut hi, fhi): (f64, f64),
    ftol: f64,
    switch_width: f64,
    max_evaluations: usize,
) -> Result<Root, RootError>
where
    F: FnMut(f64) -> Option<f64>,
{
    if flo.abs() <= ftol {
        return Ok(Root { x: lo, fx: flo, evaluations: 0 });
    }
    if fhi.abs() <= ftol {
        return Ok(Root { x: hi, fx: fhi, evaluations: 0 });
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NotBracketed);
    }

    let mut best = if flo.abs() < fhi.abs() {
        Root { x: lo, fx: flo, evaluations: 0 }
    } else {
        Root { x: hi, fx: fhi, evaluations: 0 }
    };
    // previous iterate for the secant step
    let (mut x_prev, mut f_prev) = (lo, flo);
    let (mut x_cur, mut f_cur) = (hi, fhi);

    for n in 1..=max_evaluations {
        let mid = 0.5 * (lo + hi);
        let x_next = if (hi - lo).abs() > switch_width || f_cur == f_prev {
            mid
        } else {
            let secant = x_cur - f_cur * (x_cur - x_prev) / (f_cur - f_prev);
            let inside = secant > lo.min(hi) && secant < lo.max(hi);
            if inside {
                secant
            } else {
                mid
            }
        };

        let fx = f(x_next).ok_or(RootError::NonFinite)?;
        if !fx.is_finite() {
            return Err(RootError::NonFinite);
        }
        if fx.abs() < best.fx.abs() {
            best = Root { x: x_next, fx, evaluations: n };
        }
        if fx.abs() <= ftol {
            return Ok(Root { x: x_next, fx, evaluations: n });
        }

        if fx.signum() == flo.signum() {
            lo = x_next;
            flo = fx;
        } else {
            hi = x_next;
        }
        x_prev = x_cur;
        f_prev = f_cur;
        x_cur = x_next;
        f_cur = fx;

        if lo == hi || (hi - lo).abs() <= f64::EPSILON * lo.abs().max(hi.abs()) {
            best.evaluations = n;
            return Err(RootError::Exhausted { best });
        }
    }
    best.evaluations = max_evaluations;
    Err(RootError::Exhausted { best })
}
