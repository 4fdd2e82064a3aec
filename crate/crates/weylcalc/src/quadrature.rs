//! Gauss-Legendre rules and product-angle quadrature on spheres.

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial from the Chebyshev initial guess.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by the three-term recurrence.
            let mut p0 = 1.0f64;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = p1;
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// A quadrature node on the unit sphere `S^q` in `R^{q+1}`: Cartesian point
/// plus area weight.
#[derive(Clone, Debug)]
pub struct SphereNode {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Product-angle rule on `S^q`: Gauss-Legendre in the polar angles, uniform
/// in the azimuth. `level` doubles the node counts.
pub fn sphere_rule(q: usize, level: usize) -> Vec<SphereNode> {
    assert!(q >= 1);
    let n_phi = 32 << level;
    if q == 1 {
        // Circle: the uniform rule is exact for trigonometric polynomials.
        let w = 2.0 * std::f64::consts::PI / n_phi as f64;
        return (0..n_phi)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n_phi as f64;
                SphereNode {
                    point: vec![t.cos(), t.sin()],
                    weight: w,
                }
            })
            .collect();
    }
    let n_theta = 16 << level;
    let (gn, gw) = gauss_legendre(n_theta);
    // thetas[i] in [0, pi] with weight scaled by pi/2
    let thetas: Vec<(f64, f64)> = gn
        .iter()
        .zip(&gw)
        .map(|(&t, &w)| {
            (
                (t + 1.0) * std::f64::consts::FRAC_PI_2,
                w * std::f64::consts::FRAC_PI_2,
            )
        })
        .collect();

    let mut nodes = vec![SphereNode {
        point: vec![],
        weight: 1.0,
    }];
    // Build the product over polar angles theta_1..theta_{q-1}; the area
    // element contributes sin^{q-i}(theta_i).
    for i in 1..q {
        let mut next = Vec::with_capacity(nodes.len() * thetas.len());
        for node in &nodes {
            for &(theta, w) in &thetas {
                let mut angles = node.point.clone();
                angles.push(theta);
                next.push(SphereNode {
                    point: angles,
                    weight: node.weight * w * theta.sin().powi((q - i) as i32),
                });
            }
        }
        nodes = next;
    }
    // Azimuth and conversion to Cartesian coordinates.
    let wphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let mut out = Vec::with_capacity(nodes.len() * n_phi);
    for node in &nodes {
        for k in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            let mut angles = node.point.clone();
            angles.push(phi);
            out.push(SphereNode {
                point: angles_to_cartesian(&angles),
                weight: node.weight * wphi,
            });
        }
    }
    out
}

/// Hyperspherical angles `(theta_1..theta_{q-1}, phi)` to a point on `S^q`.
pub fn angles_to_cartesian(angles: &[f64]) -> Vec<f64> {
    let q = angles.len();
    let mut out = Vec::with_capacity(q + 1);
    let mut sin_prod = 1.0f64;
    for &a in angles.iter().take(q - 1) {
        out.push(sin_prod * a.cos());
        sin_prod *= a.sin();
    }
    let phi = angles[q - 1];
    out.push(sin_prod * phi.cos());
    out.push(sin_prod * phi.sin());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        // int_{-1}^{1} t^6 dt = 2/7
        let v: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(6)).sum();
        assert!((v - 2.0 / 7.0).abs() < 1e-14);
        // odd powers vanish
        let v: f64 = x.iter().zip(&w).map(|(t, w)| w * t.powi(3)).sum();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn sphere_areas() {
        // |S^1| = 2 pi, |S^3| = 2 pi^2, |S^5| = pi^3
        let pi = std::f64::consts::PI;
        for (q, expect) in [(1usize, 2.0 * pi), (3, 2.0 * pi * pi), (5, pi.powi(3))] {
            let rule = sphere_rule(q, 0);
            let area: f64 = rule.iter().map(|n| n.weight).sum();
            assert!(
                (area - expect).abs() < 1e-9 * expect,
                "q={q}: {area} vs {expect}"
            );
            for node in rule.iter().take(50) {
                let r2: f64 = node.point.iter().map(|c| c * c).sum();
                assert!((r2 - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sphere_moment() {
        // int_{S^3} u_1^2 dA = |S^3| / 4 by symmetry.
        let rule = sphere_rule(3, 0);
        let v: f64 = rule.iter().map(|n| n.weight * n.point[0] * n.point[0]).sum();
        let expect = 2.0 * std::f64::consts::PI.powi(2) / 4.0;
        assert!((v - expect).abs() < 1e-9);
    }
}
