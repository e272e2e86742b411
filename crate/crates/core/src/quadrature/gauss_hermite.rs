use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use super::IntegralResult;
use crate::error::{Error, Result};

/// Gauss–Hermite rule normalized for the standard normal weight:
/// `E[f(Z)] ≈ Σ wᵢ f(zᵢ)`, `Z ~ N(0, 1)`, `Σ wᵢ = 1`.
#[derive(Debug, Clone)]
pub struct GaussHermiteRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermiteRule {
    /// Builds the `n`-point rule from the roots of the orthonormal Hermite
    /// polynomial (weight `e^{-x²}`), then rescales to the normal density.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > 200 {
            return Err(Error::Usage(format!("Gauss-Hermite rule size must be in [1, 200], got {n}")));
        }
        let pi_m4 = std::f64::consts::PI.powf(-0.25);
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let nf = n as f64;
        // Bracket the non-negative roots by sign changes on a grid finer than
        // the smallest root spacing, then polish each with Newton.
        let mut roots = Vec::with_capacity(n.div_ceil(2));
        if n % 2 == 1 {
            roots.push(0.0);
        }
        let h = 0.05 * std::f64::consts::PI / (2.0 * nf + 1.0).sqrt();
        let upper = (2.0 * nf + 1.0).sqrt() + 1.0;
        let mut lo = if n % 2 == 1 { 0.5 * h } else { 0.0 };
        let mut f_lo = hermite_orthonormal(n, lo, pi_m4).0;
        while roots.len() < n.div_ceil(2) && lo < upper {
            let hi = lo + h;
            let f_hi = hermite_orthonormal(n, hi, pi_m4).0;
            if f_lo.signum() != f_hi.signum() {
                roots.push(polish_root(n, lo, hi, f_lo, pi_m4)?);
            }
            lo = hi;
            f_lo = f_hi;
        }
        if roots.len() != n.div_ceil(2) {
            return Err(Error::numeric(
                format!("found {} of {} Gauss-Hermite roots", roots.len(), n.div_ceil(2)),
                roots.len() as f64,
                f64::NAN,
            ));
        }
        // Descending non-negative roots, mirrored.
        roots.reverse();
        for (i, &z) in roots.iter().enumerate() {
            let (_, p2) = hermite_orthonormal(n, z, pi_m4);
            let pp = (2.0 * nf).sqrt() * p2;
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        let sqrt_pi = std::f64::consts::PI.sqrt();
        let sqrt2 = std::f64::consts::SQRT_2;
        let mut nodes: Vec<f64> = x.iter().map(|v| v * sqrt2).collect();
        let mut weights: Vec<f64> = w.iter().map(|v| v / sqrt_pi).collect();
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        // Ascending order.
        nodes.reverse();
        weights.reverse();
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(point, weight)` pairs for a Normal(mean, sigma) average.
    pub fn points(&self, mean: f64, sigma: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(z, w)| (mean + sigma * z, *w))
    }

    /// `E[f(X)]`, `X ~ Normal(mean, sigma)`. `sigma = 0` evaluates `f(mean)`.
    pub fn expectation<F: Fn(f64) -> f64>(&self, f: F, mean: f64, sigma: f64) -> Result<f64> {
        if sigma == 0.0 {
            return finite(f(mean), mean);
        }
        let mut acc = 0.0;
        for (x, w) in self.points(mean, sigma) {
            acc += w * finite(f(x), x)?;
        }
        Ok(acc)
    }
}

fn finite(v: f64, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::numeric(format!("integrand is not finite at {at}"), v, f64::NAN))
    }
}

/// Bisection down to a small bracket, then Newton to full precision.
fn polish_root(n: usize, mut lo: f64, mut hi: f64, mut f_lo: f64, p0: f64) -> Result<f64> {
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        let f_mid = hermite_orthonormal(n, mid, p0).0;
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    let mut z = 0.5 * (lo + hi);
    let nf = n as f64;
    for _ in 0..20 {
        let (p1, p2) = hermite_orthonormal(n, z, p0);
        let dz = p1 / ((2.0 * nf).sqrt() * p2);
        z -= dz;
        if dz.abs() <= 1e-15 * z.abs().max(1.0) {
            return Ok(z);
        }
    }
    Err(Error::numeric("Gauss-Hermite node iteration did not converge", z, f64::NAN))
}

/// Returns `(p_n(z), p_{n-1}(z))` of the orthonormal Hermite family.
fn hermite_orthonormal(n: usize, z: f64, p0: f64) -> (f64, f64) {
    let mut p1 = p0;
    let mut p2 = 0.0;
    for j in 1..=n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
    }
    (p1, p2)
}

thread_local! {
    static RULES: RefCell<HashMap<usize, Rc<GaussHermiteRule>>> = RefCell::new(HashMap::new());
}

/// Runs `f` with a thread-local cached rule of size `n`.
pub fn with_rule<T>(n: usize, f: impl FnOnce(&GaussHermiteRule) -> T) -> Result<T> {
    let rule = RULES.with(|cache| -> Result<Rc<GaussHermiteRule>> {
        if let Some(r) = cache.borrow().get(&n) {
            return Ok(Rc::clone(r));
        }
        let r = Rc::new(GaussHermiteRule::new(n)?);
        cache.borrow_mut().insert(n, Rc::clone(&r));
        Ok(r)
    })?;
    Ok(f(&rule))
}

/// Gaussian-weighted average of `f` with an error estimate from the
/// half-size rule.
pub fn gauss_hermite_expectation<F: Fn(f64) -> f64>(
    f: F,
    mean: f64,
    sigma: f64,
    nodes: usize,
) -> Result<IntegralResult> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Domain(format!("sigma must be finite and >= 0, got {sigma}")));
    }
    if nodes < 2 {
        return Err(Error::Usage(format!("Gauss-Hermite needs at least 2 nodes, got {nodes}")));
    }
    if sigma == 0.0 {
        let v = finite(f(mean), mean)?;
        return Ok(IntegralResult {
            value: v,
            error_estimate: 0.0,
            evaluations: 1,
        });
    }
    let full = with_rule(nodes, |r| r.expectation(&f, mean, sigma))??;
    let half = with_rule(nodes / 2, |r| r.expectation(&f, mean, sigma))??;
    Ok(IntegralResult {
        value: full,
        error_estimate: (full - half).abs(),
        evaluations: (nodes + nodes / 2) as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for n in [1, 2, 3, 10, 64, 65, 120, 200] {
            let r = GaussHermiteRule::new(n).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-13, "n={n} sum={s}");
            assert!(r.nodes().windows(2).all(|p| p[0] < p[1]), "n={n} not ascending");
        }
    }

    #[test]
    fn constant_is_exact() {
        let r = gauss_hermite_expectation(|_| 1.0, 0.3, 2.0, 40).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn second_moment() {
        let r = gauss_hermite_expectation(|x| x * x, 0.0, 1.0, 40).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cos_damping_identity() {
        let (theta0, delta) = (0.4_f64, 0.7_f64);
        let r = gauss_hermite_expectation(|t| (2.0 * t).cos(), theta0, delta, 40).unwrap();
        let exact = (-2.0 * delta * delta).exp() * (2.0 * theta0).cos();
        assert!((r.value - exact).abs() < 1e-12);
        assert!(r.error_estimate < 1e-6);
    }

    #[test]
    fn zero_sigma_is_point_mass() {
        let r = gauss_hermite_expectation(|x| x.exp(), 1.5, 0.0, 64).unwrap();
        assert_eq!(r.value, 1.5_f64.exp());
        assert_eq!(r.error_estimate, 0.0);
    }

    #[test]
    fn non_finite_integrand_is_numeric_error() {
        let r = gauss_hermite_expectation(|x| if x > 0.0 { f64::NAN } else { 0.0 }, 0.0, 1.0, 8);
        assert!(matches!(r, Err(Error::Numeric { .. })));
    }
}
