//! Gauss–Legendre quadrature on [0, 1].
//!
//! Nodes and weights come from Newton iteration on the Legendre polynomial
//! recurrence; for the node counts used here (tens) this is exact to machine
//! precision and saves a dependency.

/// Nodes and weights for `n`-point Gauss–Legendre quadrature on [0, 1].
pub fn gauss_legendre_unit(n: u32) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    (
        xs.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        ws.iter().map(|w| 0.5 * w).collect(),
    )
}

/// Classic nodes and weights on [-1, 1].
pub fn gauss_legendre(n: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let n = n as usize;
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess, then Newton
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        xs[n - 1 - i] = x;
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        xs[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        ws[n / 2] = 2.0 / (d * d);
    }
    (xs, ws)
}

/// Value and derivative of the degree-`n` Legendre polynomial at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let k = k as f64;
        let p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = p_next;
    }
    let d = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, d)
}
