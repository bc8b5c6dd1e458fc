//! Fixed-step classical Runge-Kutta on small fixed-size states.

pub type State<const N: usize> = [f64; N];

fn axpy<const N: usize>(y: &State<N>, h: f64, k: &State<N>) -> State<N> {
    let mut out = *y;
    for (o, ki) in out.iter_mut().zip(k) {
        *o += h * ki;
    }
    out
}

/// One RK4 step of size `h` (may be negative) from `(t, y)`.
pub fn rk4_step<const N: usize, E, F>(f: &mut F, t: f64, y: &State<N>, h: f64) -> Result<State<N>, E>
where
    F: FnMut(f64, &State<N>) -> Result<State<N>, E>,
{
    let k1 = f(t, y)?;
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1))?;
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2))?;
    let k4 = f(t + h, &axpy(y, h, &k3))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn exponential_decay_fourth_order() {
        let mut f = |_t: f64, y: &State<1>| -> Result<State<1>, Infallible> { Ok([-y[0]]) };
        let mut err = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0];
            for k in 0..n {
                y = rk4_step(&mut f, k as f64 * h, &y, h).unwrap();
            }
            (y[0] - (-1.0f64).exp()).abs()
        };
        let ratio = err(10) / err(20);
        assert!(ratio > 14.0 && ratio < 18.0, "order ratio {ratio}");
    }

    #[test]
    fn backward_steps_reverse_forward_steps() {
        let mut f = |t: f64, y: &State<2>| -> Result<State<2>, Infallible> { Ok([y[1], -y[0] + t]) };
        let y0 = [1.0, 0.0];
        let y1 = rk4_step(&mut f, 0.0, &y0, 1e-3).unwrap();
        let back = rk4_step(&mut f, 1e-3, &y1, -1e-3).unwrap();
        assert!((back[0] - y0[0]).abs() < 1e-12 && (back[1] - y0[1]).abs() < 1e-12);
    }
}
