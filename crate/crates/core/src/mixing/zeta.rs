// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (a + k)^(−s) for s > 1, a > 0, via
// Euler–Maclaurin summation.

const DIRECT_TERMS: usize = 12;

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACTORIAL: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
];

pub(crate) fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    let mut sum = 0.0;
    for k in 0..DIRECT_TERMS {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + DIRECT_TERMS as f64;
    sum += x.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * x.powf(-s);
    // Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j−2) · x^(−s−2j+1)
    let mut rising = s;
    let mut power = x.powf(-s - 1.0);
    let inv_x2 = 1.0 / (x * x);
    for (j, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += coef * rising * power;
        let k = 2 * j as u32 + 1;
        rising *= (s + k as f64) * (s + k as f64 + 1.0);
        power *= inv_x2;
    }
    sum
}
