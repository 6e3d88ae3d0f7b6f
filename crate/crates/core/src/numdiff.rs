//! Central finite differences.

/// Step used for first derivatives at coordinate `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-6 * (1.0 + x.abs())
}

/// Central-difference gradient of `f` at `x`.
pub fn gradient<F>(f: F, x: &[f64]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut work = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = fd_step(x[i]);
            work[i] = x[i] + h;
            let fp = f(&work);
            work[i] = x[i] - h;
            let fm = f(&work);
            work[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference derivative of a scalar function.
pub fn derivative<F>(f: F, x: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let h = fd_step(x);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central-difference Jacobian of a vector-valued map, as rows of outputs.
pub fn jacobian<F>(f: F, x: &[f64], step_scale: f64) -> Vec<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut work = x.to_vec();
    let mut cols = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let h = step_scale * (1.0 + x[i].abs());
        work[i] = x[i] + h;
        let fp = f(&work);
        work[i] = x[i] - h;
        let fm = f(&work);
        work[i] = x[i];
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<_>>());
    }
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect()
}

/// `|a - b| / max(1, |b|)`, the mixed absolute/relative error used throughout.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
