//! Fixed-order quadrature rules.

/// Composite Simpson rule with `panels` (rounded up to even) subintervals.
/// Returns a signed integral, so `simpson(f, b, a) = -simpson(f, a, b)`.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let m = panels.max(2).next_multiple_of(2);
    let h = (b - a) / m as f64;
    let mut acc = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Trapezoid rule on `nodes` equally spaced points over `[a, b]`, for any
/// value type that supports addition and scaling by `f64`.
pub fn trapezoid<T>(f: impl Fn(f64) -> T, a: f64, b: f64, nodes: usize) -> T
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>,
{
    assert!(nodes >= 2, "trapezoid rule needs at least two nodes");
    let h = (b - a) / (nodes - 1) as f64;
    let mut acc = (f(a) + f(b)) * 0.5;
    for i in 1..nodes - 1 {
        acc = acc + f(a + i as f64 * h);
    }
    acc * h
}
