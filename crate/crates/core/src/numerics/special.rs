use crate::scalar::Real;

use super::NumericsError;

/// Logistic function in the branch form that cannot overflow.
pub fn sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

/// `ln sigmoid(z)` without cancellation for large `|z|`.
pub fn log_sigmoid<T: Real>(z: T) -> T {
    if z >= T::zero() {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    if x < half {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::lit(c) / (x + T::from_count(i));
    }
    let t = x + T::lit(LANCZOS_G) + half;
    half * (T::lit(2.0) * T::PI()).ln() + (x + half) * t.ln() - t + acc.ln()
}

const CF_MAX_ITER: usize = 500;

/// Continued fraction for the incomplete beta function (modified Lentz).
fn beta_continued_fraction<T: Real>(a: T, b: T, x: T) -> T {
    let tiny = T::lit(1e-300).max(T::min_positive_value());
    let eps = T::lit(1e-15).max(T::epsilon() * T::lit(4.0));
    let one = T::one();
    let two = T::lit(2.0);
    let qab = a + b;
    let qap = a + one;
    let qam = a - one;
    let mut c = one;
    let mut d = one - qab * x / qap;
    if d.abs() < tiny {
        d = tiny;
    }
    d = one / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = T::from_count(m);
        let m2 = two * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one + aa * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = one + aa / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h = h * del;
        if (del - one).abs() < eps {
            return h;
        }
    }
    log::warn!("incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})");
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn regularized_incomplete_beta<T: Real>(x: T, a: T, b: T) -> Result<T, NumericsError> {
    if !(a > T::zero()) || !(b > T::zero()) || x.is_nan() || x < T::zero() || x > T::one() {
        return Err(NumericsError::InvalidArgument(format!(
            "incomplete beta needs 0 <= x <= 1, a > 0, b > 0 (x={x}, a={a}, b={b})"
        )));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x == T::one() {
        return Ok(T::one());
    }
    let one = T::one();
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (one - x).ln();
    let front = ln_front.exp();
    if x < (a + one) / (a + b + T::lit(2.0)) {
        Ok(front * beta_continued_fraction(a, b, x) / a)
    } else {
        Ok(one - front * beta_continued_fraction(b, a, one - x) / b)
    }
}

/// Two-tailed Student-t probability `P(|T| >= |t|)` with `df` degrees of freedom.
pub fn student_t_two_tailed_p<T: Real>(t: T, df: u64) -> Result<T, NumericsError> {
    if df == 0 {
        return Err(NumericsError::InvalidArgument("student t needs df >= 1".to_string()));
    }
    if t.is_nan() {
        return Err(NumericsError::InvalidArgument("t statistic is NaN".to_string()));
    }
    if t.is_infinite() {
        return Ok(T::zero());
    }
    let nu = T::from_u64(df).expect("df representable");
    let x = nu / (nu + t * t);
    let p = regularized_incomplete_beta(x, nu / T::lit(2.0), T::lit(0.5))?;
    Ok(p.min(T::one()).max(T::zero()))
}
