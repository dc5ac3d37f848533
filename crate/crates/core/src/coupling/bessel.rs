//! Integer-order Bessel functions of the first kind.

/// Largest |n| accepted by [`bessel_jn`].
pub const MAX_ORDER: i32 = 64;
/// Largest |z| accepted by [`bessel_jn`].
pub const MAX_ARGUMENT: f64 = 50.0;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// J_n(z) by Miller's downward recurrence, normalised with
/// J_0 + 2·ΣJ_2k = 1. Arguments outside |n| ≤ 64, |z| ≤ 50 are still
/// evaluated but carry no accuracy guarantee.
pub fn bessel_jn(n: i32, z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    let mut sign = 1.0;
    let order = n.unsigned_abs();
    if n < 0 && order % 2 == 1 {
        sign = -sign;
    }
    if z < 0.0 && order % 2 == 1 {
        sign = -sign;
    }
    let x = z.abs();
    if x == 0.0 {
        return if order == 0 { 1.0 } else { 0.0 };
    }
    sign * miller(order, x)
}

/// dJ_n/dz = (J_{n−1} − J_{n+1}) / 2.
pub fn bessel_jn_derivative(n: i32, z: f64) -> f64 {
    0.5 * (bessel_jn(n - 1, z) - bessel_jn(n + 1, z))
}

fn miller(n: u32, x: f64) -> f64 {
    let top = (n as f64).max(x.ceil());
    let mut start = (top + 30.0 + (40.0 * top).sqrt()) as u32;
    start += start % 2;

    let mut next = 0.0_f64; // j_{k+1}
    let mut current = 1e-300_f64; // j_k
    let mut norm = 0.0_f64;
    let mut wanted = 0.0_f64;
    let two_over_x = 2.0 / x;

    for k in (1..=start).rev() {
        let previous = k as f64 * two_over_x * current - next;
        next = current;
        current = previous;
        let index = k - 1;
        if index == n {
            wanted = current;
        }
        if index != 0 && index % 2 == 0 {
            norm += 2.0 * current;
        }
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            next *= RESCALE_BY;
            norm *= RESCALE_BY;
            wanted *= RESCALE_BY;
        }
    }
    norm += current;
    wanted / norm
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series Σ (−1)^k (z/2)^{2k+n} / (k!(k+n)!), summed until terms vanish.
    fn series(n: u32, z: f64) -> f64 {
        let half = z / 2.0;
        let mut term = (0..n).fold(1.0, |acc, i| acc * half / (i + 1) as f64);
        let mut sum = term;
        let mut k = 0u32;
        while k < 400 {
            k += 1;
            term *= -half * half / (k as f64 * (k + n) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs().max(1e-300) {
                break;
            }
        }
        sum
    }

    fn close(a: f64, b: f64) -> bool {
        let diff = (a - b).abs();
        diff < 1e-15 || diff < 1e-12 * b.abs()
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_jn(0, 0.0), 1.0);
        assert_eq!(bessel_jn(1, 0.0), 0.0);
        assert_eq!(bessel_jn(-3, 0.0), 0.0);
    }

    #[test]
    fn first_maximum_of_j1() {
        let v = bessel_jn(1, 1.8412);
        assert!((v - 0.5819).abs() < 1e-4, "{v}");
        assert!(close(v, series(1, 1.8412)));
    }

    #[test]
    fn matches_series_oracle() {
        for n in 0..=20u32 {
            for i in 1..=100 {
                let z = 0.05 * i as f64;
                let m = bessel_jn(n as i32, z);
                let s = series(n, z);
                assert!(close(m, s), "J_{n}({z}): miller {m} vs series {s}");
            }
        }
    }

    #[test]
    fn tabulated_large_argument_values() {
        // reference values from an independent library
        assert!((bessel_jn(0, 10.0) - (-0.245_935_764_451_348_3)).abs() < 1e-13);
        assert!((bessel_jn(1, 10.0) - 0.043_472_746_168_861_44).abs() < 1e-13);
        assert!((bessel_jn(2, 20.0) - (-0.160_341_351_922_998_2)).abs() < 1e-13);
        assert!((bessel_jn(10, 10.0) - 0.207_486_106_633_358_9).abs() < 1e-13);
    }

    #[test]
    fn reflection_identities() {
        for n in 0..10 {
            for &z in &[0.3, 1.7, 4.2, 12.0] {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert_eq!(bessel_jn(-n, z), sign * bessel_jn(n, z));
                assert_eq!(bessel_jn(n, -z), sign * bessel_jn(n, z));
            }
        }
    }

    #[test]
    fn tiny_and_extreme_arguments() {
        assert!(close(bessel_jn(1, 1e-8), 5e-9));
        assert!(bessel_jn(64, 1e-3) == 0.0 || bessel_jn(64, 1e-3).abs() < 1e-300);
        let v = bessel_jn(64, 50.0);
        assert!(v.is_finite() && v.abs() < 1.0);
        let v = bessel_jn(0, 50.0);
        assert!((v - 0.055_812_327_669_251_86).abs() < 1e-13);
    }

    proptest::proptest! {
        #[test]
        fn three_term_recurrence(n in -30i32..30, z in 0.1f64..5.0) {
            let lhs = bessel_jn(n - 1, z) + bessel_jn(n + 1, z);
            let rhs = 2.0 * n as f64 / z * bessel_jn(n, z);
            proptest::prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn squares_sum_to_one(z in 0.0f64..50.0) {
            let total: f64 = (-80..=80).map(|k| bessel_jn(k, z).powi(2)).sum();
            proptest::prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }
}
