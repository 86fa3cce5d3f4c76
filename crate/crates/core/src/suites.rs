//! Identity families swept over a rational grid. Rows come back in grid
//! order; evaluation is parallel over the grid points.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::decomposition::{DecompositionCase, DecompositionKind, TrivialCharacterCheck};
use crate::error::Result;
use crate::exactnum::{ConstLinear, GaussianRational};
use crate::piecewise::{int, rat, PiecewiseLaurent, SideConvention, Weight};
use crate::report::{ReportRow, VerificationReport};
use crate::sequences::{floor_sum, summatory, summatory_via_floor_identity, ArithSequence};
use crate::volterra::{
    homogeneous_residual, jump_at, resolvent_solution, solution_from, ResidualChecker, VolterraCase,
};

fn sweep<F>(identity: &str, xs: &[BigRational], f: F) -> Result<VerificationReport>
where
    F: Fn(&BigRational) -> Result<ConstLinear> + Sync,
{
    let rows: Result<Vec<ReportRow>> = xs
        .par_iter()
        .map(|x| Ok(ReportRow::new(identity, x.clone(), f(x)?)))
        .collect();
    Ok(rows?.into_iter().collect())
}

fn positive(xs: &[BigRational]) -> Vec<BigRational> {
    xs.iter().filter(|x| !x.is_zero()).cloned().collect()
}

/// `F₁ = (f₁ + A)x` against `Er` for every `A`, right limits.
pub fn theorem(case: &VolterraCase, constants: &[GaussianRational], xs: &[BigRational]) -> Result<VerificationReport> {
    let f1 = case.build_f1()?;
    let e = case.build_error_term()?;
    let xs = positive(xs);
    let mut report = VerificationReport::new();
    for a in constants {
        let checker = ResidualChecker::new(solution_from(&f1, a)?, e.clone())?;
        report.extend(sweep(&format!("theorem[A={a}]"), &xs, |x| {
            checker.at(x, SideConvention::RightLimit)
        })?);
    }
    Ok(report)
}

/// `R(x) + ∫₀ˣ f₁`.
pub fn lemma1(case: &VolterraCase, xs: &[BigRational]) -> Result<VerificationReport> {
    let r = case.remainder()?;
    let integral = case.build_f1()?.antiderivative(Weight::One)?;
    sweep("lemma1", xs, |x| {
        Ok(&r.eval_at(x, SideConvention::RightLimit)? + &integral.eval_at(x, SideConvention::RightLimit)?)
    })
}

/// `f₁(N+0) - f₁(N-0) - b(N)/N` for `1 ≤ N ≤ min(n_max, X)`.
pub fn jumps(case: &VolterraCase, n_max: usize) -> Result<VerificationReport> {
    let f1 = case.build_f1()?;
    let top = n_max.min(crate::piecewise::piece_count(&case.end) - 1);
    let ns: Vec<BigRational> = (1..=top as i64).map(int).collect();
    sweep("jump", &ns, |x| {
        let n = x.to_integer().try_into().expect("small integer");
        let expected = case.b.value(n).scale(&rat(1, n as i64));
        Ok(&jump_at(&f1, n)? - &ConstLinear::constant(expected))
    })
}

/// `R(N+0) - R(N-0)` at the integers `1 ≤ N ≤ X`.
pub fn remainder_continuity(case: &VolterraCase) -> Result<VerificationReport> {
    let r = case.remainder()?;
    let top = crate::piecewise::piece_count(&case.end) - 1;
    let ns: Vec<BigRational> = (1..=top as i64).map(int).filter(|n| *n <= case.end).collect();
    sweep("remainder_continuity", &ns, |x| {
        Ok(&r.eval_at(x, SideConvention::RightLimit)? - &r.eval_at(x, SideConvention::LeftLimit)?)
    })
}

/// On each open interval the `t` coefficient of `f₁` is `-A2` and no other
/// non-constant term appears; rows at the interval midpoints.
pub fn f1_slope(case: &VolterraCase) -> Result<VerificationReport> {
    let f1 = case.build_f1()?;
    let mut report = VerificationReport::new();
    for (k, p) in f1.pieces().iter().enumerate() {
        let x = rat(2 * k as i64 + 1, 2);
        if x > case.end {
            break;
        }
        let stray = p.terms().find(|(e, c)| *e != 0 && *e != 1 && !c.is_zero());
        let residual = match stray {
            Some((_, c)) => c.clone(),
            None => &p.coeff(1) + &ConstLinear::a2(),
        };
        report.push(ReportRow::new("f1_slope", x, residual));
    }
    Ok(report)
}

/// `G(x) = Ax` against the homogeneous equation.
pub fn homogeneous(constants: &[GaussianRational], xs: &[BigRational]) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    for a in constants {
        report.extend(sweep(&format!("homogeneous[A={a}]"), xs, |x| {
            homogeneous_residual(a, x)
        })?);
    }
    Ok(report)
}

/// The resolvent solution of `Er` satisfies the equation, and differs from
/// `x·f₁(x)` by `c·x` with one constant `c` (taken at `x = 1`).
pub fn resolvent(case: &VolterraCase, xs: &[BigRational]) -> Result<VerificationReport> {
    let e = case.build_error_term()?;
    let f = resolvent_solution(&e, &GaussianRational::zero())?;
    let x_f1 = case.build_f1()?.shift_exponent(1)?;
    let diff = PiecewiseLaurent::combine(&f, &x_f1, &GaussianRational::one(), &-GaussianRational::one())?;
    let c = diff.eval_at(&BigRational::one(), SideConvention::RightLimit)?;
    let checker = ResidualChecker::new(f, e)?;
    let xs = positive(xs);
    let mut report = sweep("resolvent", &xs, |x| checker.at(x, SideConvention::RightLimit))?;
    report.extend(sweep("resolvent_uniqueness", &xs, |x| {
        let d = diff.eval_at(x, SideConvention::RightLimit)?;
        Ok(&d.scale_rational(&x.recip()) - &c)
    })?);
    Ok(report)
}

/// `E - E^AR - E^AN` on the valid part of the grid.
pub fn decomposition(case: &DecompositionCase, xs: &[BigRational]) -> Result<VerificationReport> {
    let name = match case.kind {
        DecompositionKind::Untwisted => "decomposition_untwisted",
        DecompositionKind::Twisted(_) => "decomposition_twisted",
        DecompositionKind::Generic => return Ok(VerificationReport::new()),
    };
    let lo = case.lower_limit();
    let xs: Vec<BigRational> = xs.iter().filter(|x| **x >= lo).cloned().collect();
    sweep(name, &xs, |x| {
        Ok(case.decompose(x)?.residual.expect("analytic part present"))
    })
}

/// Twisted case: `E^AR = x·f₁ + (A1/2)x`, and `(f(x, χ) + A)x` solves the
/// equation for `E₁`, all at the midpoint convention.
pub fn twisted_solution(
    case: &DecompositionCase,
    constants: &[GaussianRational],
    xs: &[BigRational],
) -> Result<VerificationReport> {
    if !matches!(case.kind, DecompositionKind::Twisted(_)) {
        return Ok(VerificationReport::new());
    }
    let mid = SideConvention::Midpoint;
    let vc = VolterraCase::new(case.a.clone(), case.end.clone(), GaussianRational::zero())?;
    let x_f1 = vc.build_f1()?.shift_exponent(1)?;
    let half_a1 = ConstLinear::a1().scale_rational(&rat(1, 2));
    let mut report = sweep("twisted_arithmetic_shift", xs, |x| {
        let shift = half_a1.scale_rational(x);
        Ok(&(&case.e_ar.eval_at(x, mid)? - &x_f1.eval_at(x, mid)?) - &shift)
    })?;
    let xs = positive(xs);
    for a in constants {
        let ac = ConstLinear::constant(a.clone());
        let f = case.e_ar.map_pieces(|_, p| {
            let mut q = p.clone();
            q.add_term(1, &ac);
            q
        })?;
        let checker = ResidualChecker::new(f, case.e.clone())?;
        report.extend(sweep(&format!("twisted_theorem[A={a}]"), &xs, |x| checker.at(x, mid))?);
    }
    Ok(report)
}

/// `f(x, χ₀) = f(x)`, `g(x, χ₀) = g(x) + 1` and `Σ μ(d)⌊x/d⌋ = 1` at the
/// non-integer grid points of `[1, X]`.
pub fn trivial_relations(end: &BigRational, xs: &[BigRational]) -> Result<VerificationReport> {
    let check = TrivialCharacterCheck::new(end)?;
    let xs: Vec<BigRational> = xs
        .iter()
        .filter(|x| **x >= BigRational::one() && !x.is_integer())
        .cloned()
        .collect();
    let mut report = sweep("trivial_f", &xs, |x| check.f_relation(x))?;
    report.extend(sweep("trivial_g", &xs, |x| check.g_relation(x))?);
    report.extend(sweep("trivial_mertens", &xs, |x| check.mertens_relation(x))?);
    Ok(report)
}

/// `Σ_{d≤x} a(d)·⌊x/d⌋`-based summation against the direct `Σ_{n≤x} b(n)`.
pub fn floor_identity(a: &ArithSequence, b: &ArithSequence, xs: &[BigRational]) -> Result<VerificationReport> {
    sweep("floor_identity", xs, |x| {
        let d = summatory_via_floor_identity(a, x)? - summatory(b, x)?;
        Ok(ConstLinear::constant(d))
    })
}

/// `Σ_{d≤x} μ(d)⌊x/d⌋ - 1` for `x ≥ 1`.
pub fn mertens(mu: &ArithSequence, xs: &[BigRational]) -> Result<VerificationReport> {
    let xs: Vec<BigRational> = xs.iter().filter(|x| **x >= BigRational::one()).cloned().collect();
    sweep("mertens", &xs, |x| {
        Ok(ConstLinear::constant(floor_sum(mu, x)? - GaussianRational::one()))
    })
}

/// `b(n) - Σ_{d|n} a(d)·n/d` for `n ≤ X`.
pub fn convolution(case: &VolterraCase) -> Result<VerificationReport> {
    let expected = crate::sequences::convolve_id(&case.a);
    let top = (crate::piecewise::piece_count(&case.end) - 1).min(case.a.len());
    let ns: Vec<BigRational> = (1..=top as i64).map(int).collect();
    sweep("convolution", &ns, |x| {
        let n: usize = x.to_integer().try_into().expect("small integer");
        Ok(ConstLinear::constant(&case.b.value(n) - &expected.value(n)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{kronecker_character, mobius_sieve};
    use crate::volterra::grid;

    fn constants() -> Vec<GaussianRational> {
        vec![
            GaussianRational::zero(),
            GaussianRational::one(),
            GaussianRational::new(rat(3, 2), rat(1, 2)),
        ]
    }

    #[test]
    fn untwisted_suites_small() {
        let end = int(20);
        let case = VolterraCase::new(mobius_sieve(21).unwrap(), end.clone(), GaussianRational::zero()).unwrap();
        let xs = grid(&BigRational::zero(), &end, 3);
        for r in [
            theorem(&case, &constants(), &xs).unwrap(),
            lemma1(&case, &xs).unwrap(),
            jumps(&case, 1000).unwrap(),
            remainder_continuity(&case).unwrap(),
            f1_slope(&case).unwrap(),
            homogeneous(&constants(), &xs).unwrap(),
            resolvent(&case, &xs).unwrap(),
            convolution(&case).unwrap(),
            floor_identity(&case.a, &case.b, &xs).unwrap(),
            mertens(&case.a, &xs).unwrap(),
            decomposition(&DecompositionCase::untwisted(end.clone()).unwrap(), &xs).unwrap(),
            trivial_relations(&end, &xs).unwrap(),
        ] {
            assert!(!r.is_empty());
            assert!(r.all_zero(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn twisted_suites_small() {
        let end = int(15);
        let xs = grid(&BigRational::zero(), &end, 3);
        for d in [-3, -4] {
            let case = DecompositionCase::twisted(&kronecker_character(d).unwrap(), end.clone()).unwrap();
            let r = decomposition(&case, &xs).unwrap();
            assert_eq!(r.len(), xs.len());
            assert!(r.all_zero());
            let r = twisted_solution(&case, &constants(), &xs).unwrap();
            assert!(r.all_zero(), "{:?}", r.first_failure());
        }
    }

    #[test]
    fn tampered_b_is_caught() {
        let mu = mobius_sieve(12).unwrap();
        let mut b = crate::sequences::convolve_id(&mu).to_exact_vec();
        b[6] = GaussianRational::from_int(5);
        let b = ArithSequence::from_exact("b", b).unwrap();
        let case = VolterraCase::with_b(mu, b, int(10), GaussianRational::zero()).unwrap();
        let conv = convolution(&case).unwrap();
        assert_eq!(conv.first_failure().unwrap().x, int(7));
        let xs = grid(&BigRational::zero(), &int(10), 3);
        let th = theorem(&case, &[GaussianRational::zero()], &xs).unwrap();
        assert_eq!(th.first_failure().unwrap().x, int(7));
    }
}
