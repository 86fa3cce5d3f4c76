//! Floating-point Hurwitz zeta and digamma by Euler–Maclaurin summation, and
//! Dirichlet L-values of real characters built from them.

use crate::sequences::CharacterSpec;

/// Terms summed directly before switching to the asymptotic tail.
const SHIFT: usize = 24;

/// `B_{2j}` for `j = 1..=13`.
const BERNOULLI_EVEN: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

/// A value with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounded {
    pub value: f64,
    pub bound: f64,
}

fn rounding_slack(value: f64, terms: usize) -> f64 {
    4.0 * f64::EPSILON * (terms as f64) * value.abs().max(1.0)
}

/// `ζ(s, a) = Σ_{k≥0} (k + a)^{-s}` for real `s > 1`, `a > 0`.
pub fn hurwitz_zeta(s: f64, a: f64) -> Bounded {
    assert!(s > 1.0 && a > 0.0, "hurwitz_zeta needs s > 1 and a > 0");
    let mut sum = 0.0;
    for k in 0..SHIFT {
        sum += (k as f64 + a).powf(-s);
    }
    let w = SHIFT as f64 + a;
    sum += w.powf(1.0 - s) / (s - 1.0) + 0.5 * w.powf(-s);

    // Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j-2) · w^{-s-2j+1}
    let mut rising = s; // s(s+1)…(s+2j-2)
    let mut fact = 2.0; // (2j)!
    let mut wpow = w.powf(-s - 1.0);
    let mut last = 0.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = j + 1;
        let term = b / fact * rising * wpow;
        if j == BERNOULLI_EVEN.len() {
            last = term.abs();
            break;
        }
        sum += term;
        let sj = s + 2.0 * j as f64;
        rising *= (sj - 1.0) * sj;
        fact *= (2 * j + 1) as f64 * (2 * j + 2) as f64;
        wpow /= w * w;
    }
    Bounded {
        value: sum,
        bound: last + rounding_slack(sum, SHIFT + 16),
    }
}

/// Digamma `ψ(a)` for `a > 0`; `-ψ(a)` is the constant term of `ζ(s, a)` at `s = 1`.
pub fn digamma(a: f64) -> Bounded {
    assert!(a > 0.0, "digamma needs a > 0");
    let mut sum = 0.0;
    for k in 0..SHIFT {
        sum -= 1.0 / (k as f64 + a);
    }
    let w = SHIFT as f64 + a;
    sum += w.ln() - 0.5 / w;
    let mut wpow = 1.0 / (w * w);
    let mut last = 0.0;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let j = j + 1;
        let term = b / (2 * j) as f64 * wpow;
        if j == BERNOULLI_EVEN.len() {
            last = term.abs();
            break;
        }
        sum -= term;
        wpow /= w * w;
    }
    Bounded {
        value: sum,
        bound: last + rounding_slack(sum, SHIFT + 16),
    }
}

/// `L(s, χ)` for real `s > 1`, via `q^{-s} Σ_{r<q} χ(r) ζ(s, r/q)`.
/// The trivial character gives the Riemann zeta function.
pub fn l_value(chi: &CharacterSpec, s: f64) -> Bounded {
    let q = chi.modulus() as f64;
    let mut value = 0.0;
    let mut bound = 0.0;
    for r in 1..=chi.modulus() {
        let c = chi.value(r);
        if c == 0 {
            continue;
        }
        let z = hurwitz_zeta(s, r as f64 / q);
        value += c as f64 * z.value;
        bound += z.bound;
    }
    let scale = q.powf(-s);
    Bounded {
        value: value * scale,
        bound: bound * scale,
    }
}

/// `L(1, χ) = -q^{-1} Σ_{r<q} χ(r) ψ(r/q)` for a non-principal character.
pub fn l_value_at_one(chi: &CharacterSpec) -> Option<Bounded> {
    if chi.is_trivial() {
        return None;
    }
    let q = chi.modulus() as f64;
    let mut value = 0.0;
    let mut bound = 0.0;
    for r in 1..chi.modulus() {
        let c = chi.value(r);
        if c == 0 {
            continue;
        }
        let psi = digamma(r as f64 / q);
        value -= c as f64 * psi.value;
        bound += psi.bound;
    }
    Some(Bounded {
        value: value / q,
        bound: bound / q,
    })
}

/// `1/v` with the propagated bound `δ / (|v|(|v| - δ))`.
pub fn reciprocal(v: Bounded) -> Bounded {
    let m = v.value.abs();
    let bound = if v.bound < m {
        v.bound / (m * (m - v.bound))
    } else {
        f64::INFINITY
    };
    Bounded {
        value: 1.0 / v.value,
        bound: bound + f64::EPSILON / m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const CATALAN: f64 = 0.915_965_594_177_219_015_054_603_514_932_384_110_774;
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402_431;

    #[test]
    fn zeta_two() {
        let z = hurwitz_zeta(2.0, 1.0);
        assert!((z.value - PI * PI / 6.0).abs() < 1e-14);
        assert!(z.bound < 1e-12);
    }

    #[test]
    fn hurwitz_half_shift() {
        // ζ(2, 1/2) = 3ζ(2)
        let z = hurwitz_zeta(2.0, 0.5);
        assert!((z.value - PI * PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn digamma_known_values() {
        assert!((digamma(1.0).value + EULER_GAMMA).abs() < 1e-14);
        // ψ(1/2) = -γ - 2 ln 2
        assert!((digamma(0.5).value + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn character_l_values() {
        let chi4 = crate::sequences::kronecker_character(-4).unwrap();
        let l2 = l_value(&chi4, 2.0);
        assert!((l2.value - CATALAN).abs() < 1e-14, "{}", l2.value);
        let l1 = l_value_at_one(&chi4).unwrap();
        assert!((l1.value - PI / 4.0).abs() < 1e-14);

        let chi3 = crate::sequences::kronecker_character(-3).unwrap();
        let l1 = l_value_at_one(&chi3).unwrap();
        assert!((l1.value - PI / 27f64.sqrt()).abs() < 1e-14);

        let chi5 = crate::sequences::kronecker_character(5).unwrap();
        let l1 = l_value_at_one(&chi5).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((l1.value - 2.0 * phi.ln() / 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn reciprocal_bound() {
        let r = reciprocal(Bounded {
            value: 2.0,
            bound: 1e-10,
        });
        assert_eq!(r.value, 0.5);
        assert!(r.bound > 2.4e-11 && r.bound < 2.6e-11);
    }
}
