use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// A linear right-hand side `dy/dt = f(y)`.
pub trait LinearMap {
    fn dim(&self) -> usize;
    /// Writes `f(y)` into `out`.
    fn apply(&self, y: &[C64], out: &mut [C64]);
}

impl<F> LinearMap for (usize, F)
where
    F: Fn(&[C64], &mut [C64]),
{
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, y: &[C64], out: &mut [C64]) {
        (self.1)(y, out)
    }
}

/// One classical fourth-order Runge–Kutta step of size `h`.
pub fn rk4_step<M: LinearMap + ?Sized>(f: &M, y: &[C64], h: f64) -> Result<Vec<C64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("step size must be positive, got {h}")));
    }
    let n = f.dim();
    if y.len() != n {
        return Err(Error::Dimension(format!("state of length {} for map of dim {n}", y.len())));
    }
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();

    f.apply(y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + k1[i] * (0.5 * h);
    }
    f.apply(&tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + k2[i] * (0.5 * h);
    }
    f.apply(&tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + k3[i] * h;
    }
    f.apply(&tmp, &mut k4);

    let out: Vec<C64> = (0..n).map(|i| y[i] + (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0)).collect();
    if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Integration("non-finite value in RK4 stage".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(lambda: f64) -> (usize, impl Fn(&[C64], &mut [C64])) {
        (1, move |y: &[C64], out: &mut [C64]| out[0] = y[0] * lambda)
    }

    fn integrate(lambda: f64, h: f64, t_end: f64) -> C64 {
        let f = decay(lambda);
        let steps = (t_end / h).round() as usize;
        let mut y = vec![C64::new(1.0, 0.0)];
        for _ in 0..steps {
            y = rk4_step(&f, &y, h).unwrap();
        }
        y[0]
    }

    #[test]
    fn zero_field_is_identity() {
        let f = (2usize, |_: &[C64], out: &mut [C64]| out.fill(C64::new(0.0, 0.0)));
        let y = vec![C64::new(1.0, 2.0), C64::new(-3.0, 0.5)];
        assert_eq!(rk4_step(&f, &y, 0.3).unwrap(), y);
    }

    #[test]
    fn exponential_decay() {
        let y = integrate(-1.0, 0.1, 1.0);
        assert!((y.re - (-1f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn fourth_order_slope() {
        let hs = [0.1, 0.05, 0.025, 0.0125];
        let errs: Vec<f64> = hs.iter().map(|&h| (integrate(-1.0, h, 1.0).re - (-1f64).exp()).abs()).collect();
        for w in errs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 4.0).abs() < 0.2, "slope {slope}");
        }
    }

    #[test]
    fn rejects_bad_step() {
        assert!(rk4_step(&decay(-1.0), &[C64::new(1.0, 0.0)], 0.0).is_err());
    }

    #[test]
    fn non_finite_is_reported() {
        assert!(matches!(rk4_step(&decay(f64::MAX), &[C64::new(f64::MAX, 0.0)], 1.0), Err(Error::Integration(_))));
    }
}
