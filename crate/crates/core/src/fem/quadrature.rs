//! Quadrature rules on the reference triangle (barycentric points, weights
//! summing to one) and on the unit segment.

/// Barycentric point and weight, weights normalised to sum to 1.
pub type TrianglePoint = ([f64; 3], f64);

/// Edge-midpoint rule, exact for quadratics.
pub const TRIANGLE_DEGREE_2: [TrianglePoint; 3] = [
    ([0.5, 0.5, 0.0], 1.0 / 3.0),
    ([0.0, 0.5, 0.5], 1.0 / 3.0),
    ([0.5, 0.0, 0.5], 1.0 / 3.0),
];

const A4: f64 = 0.445_948_490_915_965;
const W4A: f64 = 0.223_381_589_678_011;
const B4: f64 = 0.091_576_213_509_771;
const W4B: f64 = 0.109_951_743_655_322;

/// Six-point rule, exact for quartics.
pub const TRIANGLE_DEGREE_4: [TrianglePoint; 6] = [
    ([A4, A4, 1.0 - 2.0 * A4], W4A),
    ([A4, 1.0 - 2.0 * A4, A4], W4A),
    ([1.0 - 2.0 * A4, A4, A4], W4A),
    ([B4, B4, 1.0 - 2.0 * B4], W4B),
    ([B4, 1.0 - 2.0 * B4, B4], W4B),
    ([1.0 - 2.0 * B4, B4, B4], W4B),
];

const A5: f64 = 0.059_715_871_789_770;
const B5: f64 = 0.470_142_064_105_115;
const C5: f64 = 0.797_426_985_353_087;
const D5: f64 = 0.101_286_507_323_456;
const W5A: f64 = 0.132_394_152_788_506;
const W5B: f64 = 0.125_939_180_544_827;

/// Seven-point rule, exact for quintics.
pub const TRIANGLE_DEGREE_5: [TrianglePoint; 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    ([A5, B5, B5], W5A),
    ([B5, A5, B5], W5A),
    ([B5, B5, A5], W5A),
    ([C5, D5, D5], W5B),
    ([D5, C5, D5], W5B),
    ([D5, D5, C5], W5B),
];

/// Three-point Gauss–Legendre rule on `[0, 1]`: `(position, weight)`.
pub fn gauss3() -> [(f64, f64); 3] {
    let d = 0.5 * (0.6_f64).sqrt();
    [
        (0.5 - d, 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.5 + d, 5.0 / 18.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact integral of x^a y^b over the reference triangle (0,0),(1,0),(0,1).
    fn monomial(a: u32, b: u32) -> f64 {
        let f = |n: u32| (1..=n).map(f64::from).product::<f64>();
        f(a) * f(b) / f(a + b + 2)
    }

    fn check(rule: &[TrianglePoint], degree: u32) {
        for a in 0..=degree {
            for b in 0..=degree - a {
                let q: f64 = rule
                    .iter()
                    .map(|(l, w)| 0.5 * w * l[1].powi(a as i32) * l[2].powi(b as i32))
                    .sum();
                assert!((q - monomial(a, b)).abs() < 1e-14, "x^{a} y^{b}: {q}");
            }
        }
    }

    #[test]
    fn triangle_rules_reach_their_degree() {
        check(&TRIANGLE_DEGREE_2, 2);
        check(&TRIANGLE_DEGREE_4, 4);
        check(&TRIANGLE_DEGREE_5, 5);
    }

    #[test]
    fn gauss_is_exact_for_quintics() {
        for k in 0..=5 {
            let q: f64 = gauss3().iter().map(|(x, w)| w * x.powi(k)).sum();
            assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
        }
    }
}
