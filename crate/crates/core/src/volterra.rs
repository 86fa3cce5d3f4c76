//! Error terms, solution families and resolvent for
//! `F(x) - ∫₀ˣ F(t) dt/t = Er(x)`, with exact residual checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{ConstLinear, GaussianRational};
use crate::piecewise::{int, piece_count, rat, Laurent, PiecewiseLaurent, SideConvention, Weight};
use crate::sequences::{convolve_id, ArithSequence};

/// Exact sums `Σ_{n≤k} a(n)·w(⌊k/n⌋)/n^p` for `p ∈ {0, 1, 2}`.
///
/// Integer sequences share the denominator `lcm(1..=K)^p`, so each sum is a
/// big-integer accumulation followed by one reduction.
pub(crate) struct FloorSums<'a> {
    a: &'a ArithSequence,
    lcm_pow: [BigInt; 3],
    quotients: [Vec<BigInt>; 3],
}

impl<'a> FloorSums<'a> {
    pub(crate) fn new(a: &'a ArithSequence, k_max: usize) -> Self {
        let k_max = k_max.min(a.len());
        let mut lcm = BigInt::one();
        if a.as_integers().is_some() {
            for n in 2..=k_max {
                lcm = lcm.lcm(&BigInt::from(n));
            }
        }
        let l2 = &lcm * &lcm;
        let mut q1 = vec![BigInt::zero(); k_max + 1];
        let mut q2 = vec![BigInt::zero(); k_max + 1];
        if a.as_integers().is_some() {
            for n in 1..=k_max {
                q1[n] = &lcm / n;
                q2[n] = &l2 / (n * n);
            }
        }
        let q0 = vec![BigInt::one(); k_max + 1];
        FloorSums {
            a,
            lcm_pow: [BigInt::one(), lcm, l2],
            quotients: [q0, q1, q2],
        }
    }

    pub(crate) fn sum(&self, k: usize, p: usize, w: impl Fn(i64) -> i128) -> GaussianRational {
        if let Some(ints) = self.a.as_integers() {
            let mut num = BigInt::zero();
            for n in 1..=k {
                let an = ints[n - 1];
                if an == 0 {
                    continue;
                }
                let f = an as i128 * w((k / n) as i64);
                if f != 0 {
                    num += &self.quotients[p][n] * BigInt::from(f);
                }
            }
            return GaussianRational::real(BigRational::new(num, self.lcm_pow[p].clone()));
        }
        let mut acc = GaussianRational::zero();
        for n in 1..=k {
            let an = self.a.value(n);
            if an.is_zero() {
                continue;
            }
            let f = w((k / n) as i64);
            if f != 0 {
                let scale = BigRational::new(BigInt::from(f), BigInt::from(n).pow(p as u32));
                acc += &an.scale(&scale);
            }
        }
        acc
    }
}

/// The data of one instance: `a`, `b = Id * a`, the domain end `X`, and the
/// free constant `A` of the solution family.
#[derive(Clone, Debug)]
pub struct VolterraCase {
    pub a: ArithSequence,
    pub b: ArithSequence,
    pub end: BigRational,
    pub free_constant: GaussianRational,
}

impl VolterraCase {
    pub fn new(a: ArithSequence, end: BigRational, free_constant: GaussianRational) -> Result<Self> {
        let b = convolve_id(&a);
        Self::with_b(a, b, end, free_constant)
    }

    /// Uses an externally supplied `b`; see [`convolution_mismatches`](Self::convolution_mismatches).
    pub fn with_b(
        a: ArithSequence,
        b: ArithSequence,
        end: BigRational,
        free_constant: GaussianRational,
    ) -> Result<Self> {
        if !end.is_positive() {
            return Err(Error::Domain(format!("domain end {end} must be positive")));
        }
        if end > int(a.len() as i64) || b.len() != a.len() {
            return Err(Error::RangeExceeded {
                x: end.to_string(),
                limit: a.len().to_string(),
            });
        }
        Ok(VolterraCase {
            a,
            b,
            end,
            free_constant,
        })
    }

    pub fn with_free_constant(&self, free_constant: GaussianRational) -> Self {
        VolterraCase {
            free_constant,
            ..self.clone()
        }
    }

    /// Indices `n ≤ ⌊X⌋` where `b(n) ≠ Σ_{d|n} a(d)·n/d`.
    pub fn convolution_mismatches(&self) -> Vec<usize> {
        let expect = convolve_id(&self.a);
        let top = piece_count(&self.end).min(self.a.len());
        (1..=top).filter(|&n| expect.value(n) != self.b.value(n)).collect()
    }

    fn pieces(&self) -> usize {
        piece_count(&self.end)
    }

    /// `Er(x) = Σ_{n≤x} b(n) - (A2/2)x²`, right-continuous.
    pub fn build_error_term(&self) -> Result<PiecewiseLaurent> {
        let main = ConstLinear::a2().scale_rational(&rat(-1, 2));
        let mut s = GaussianRational::zero();
        let mut pieces = Vec::with_capacity(self.pieces());
        for k in 0..self.pieces() {
            if k >= 1 {
                s += &self.b.value(k);
            }
            let mut p = Laurent::monomial(2, main.clone());
            p.add_term(0, &ConstLinear::constant(s.clone()));
            pieces.push(p);
        }
        PiecewiseLaurent::new(self.end.clone(), pieces)
    }

    /// `f₁(x) = -A2·x + Σ_{n≤x} (a(n)/n)⌊x/n⌋`, right-continuous.
    pub fn build_f1(&self) -> Result<PiecewiseLaurent> {
        let sums = FloorSums::new(&self.a, self.pieces());
        let slope = -ConstLinear::a2();
        let pieces = (0..self.pieces())
            .map(|k| {
                let mut p = Laurent::monomial(1, slope.clone());
                p.add_term(0, &ConstLinear::constant(sums.sum(k, 1, |q| q as i128)));
                p
            })
            .collect();
        PiecewiseLaurent::new(self.end.clone(), pieces)
    }

    /// `F₁(x) = (f₁(x) + A)·x`.
    pub fn solution_family(&self) -> Result<PiecewiseLaurent> {
        solution_from(&self.build_f1()?, &self.free_constant)
    }

    /// `R(x) = Er(x) - x·f₁(x)`.
    pub fn remainder(&self) -> Result<PiecewiseLaurent> {
        let x_f1 = self.build_f1()?.shift_exponent(1)?;
        PiecewiseLaurent::combine(
            &self.build_error_term()?,
            &x_f1,
            &GaussianRational::one(),
            &-GaussianRational::one(),
        )
    }

    /// `R(x) + ∫₀ˣ f₁(t) dt`; zero when `R(x) = -∫₀ˣ f₁`.
    pub fn lemma1_residual(&self, x: &BigRational) -> Result<ConstLinear> {
        if x.is_zero() {
            return Ok(ConstLinear::zero());
        }
        let r = self.remainder()?.eval_at(x, SideConvention::RightLimit)?;
        let integral = self.build_f1()?.integrate(x, Weight::One)?;
        Ok(&r + &integral)
    }
}

/// `(f + A)·t` for a piecewise `f`.
pub fn solution_from(f: &PiecewiseLaurent, free_constant: &GaussianRational) -> Result<PiecewiseLaurent> {
    let a = ConstLinear::constant(free_constant.clone());
    f.map_pieces(|_, p| {
        let mut q = p.clone();
        q.add_term(0, &a);
        q
    })?
    .shift_exponent(1)
}

/// `F(x) - ∫₀ˣ F(t) dt/t - E(x)`, right limits at the integers.
pub fn residual(f: &PiecewiseLaurent, e: &PiecewiseLaurent, x: &BigRational) -> Result<ConstLinear> {
    residual_with(f, e, x, SideConvention::RightLimit)
}

pub fn residual_with(
    f: &PiecewiseLaurent,
    e: &PiecewiseLaurent,
    x: &BigRational,
    side: SideConvention,
) -> Result<ConstLinear> {
    let fx = f.eval_at(x, side)?;
    let integral = f.integrate(x, Weight::InvT)?;
    let ex = e.eval_at(x, side)?;
    Ok(&(&fx - &integral) - &ex)
}

/// Residual evaluator that precomputes `∫₀ˣ F(t) dt/t` once for grid sweeps.
pub struct ResidualChecker {
    f: PiecewiseLaurent,
    kernel_integral: PiecewiseLaurent,
    e: PiecewiseLaurent,
}

impl ResidualChecker {
    pub fn new(f: PiecewiseLaurent, e: PiecewiseLaurent) -> Result<Self> {
        if f.end() != e.end() {
            return Err(Error::DomainMismatch(format!(
                "domain ends {} and {}",
                f.end(),
                e.end()
            )));
        }
        let kernel_integral = PiecewiseLaurent::new(f.end().clone(), f.antiderivative_pieces(Weight::InvT)?)?;
        Ok(ResidualChecker { f, kernel_integral, e })
    }

    pub fn at(&self, x: &BigRational, side: SideConvention) -> Result<ConstLinear> {
        let fx = self.f.eval_at(x, side)?;
        let integral = self.kernel_integral.eval_at(x, SideConvention::RightLimit)?;
        let ex = self.e.eval_at(x, side)?;
        Ok(&(&fx - &integral) - &ex)
    }
}

/// Residual of `G(x) = A·x` in `G(x) - ∫₀ˣ G(t) dt/t = 0`.
pub fn homogeneous_residual(free_constant: &GaussianRational, x: &BigRational) -> Result<ConstLinear> {
    if x.is_negative() {
        return Err(Error::OutOfDomain {
            x: x.to_string(),
            end: "inf".into(),
        });
    }
    let end = if x.is_zero() { BigRational::one() } else { x.clone() };
    let g = PiecewiseLaurent::monomial(end, 1, ConstLinear::constant(free_constant.clone()))?;
    residual(
        &g,
        &PiecewiseLaurent::monomial(g.end().clone(), 0, ConstLinear::zero())?,
        x,
    )
}

/// `F(x) = E(x) + x·∫₀ˣ E(t) dt/t² + A·x` as a piecewise function.
pub fn resolvent_solution(e: &PiecewiseLaurent, free_constant: &GaussianRational) -> Result<PiecewiseLaurent> {
    let inner = e.antiderivative_pieces(Weight::InvT2)?;
    let a = ConstLinear::constant(free_constant.clone());
    let pieces: Vec<Laurent> = e
        .pieces()
        .iter()
        .zip(&inner)
        .map(|(ep, ip)| {
            let mut p = ep.add(&ip.shift(1));
            p.add_term(1, &a);
            p
        })
        .collect();
    Ok(PiecewiseLaurent::new(e.end().clone(), pieces)?.with_normalization(e.normalization()))
}

/// Value of [`resolvent_solution`] at `x`, using `E`'s own normalization at integers.
pub fn resolvent_apply(e: &PiecewiseLaurent, x: &BigRational, free_constant: &GaussianRational) -> Result<ConstLinear> {
    let ex = e.eval_at(x, SideConvention::Point)?;
    let inner = e.integrate(x, Weight::InvT2)?;
    let ax = ConstLinear::constant(free_constant * &GaussianRational::real(x.clone()));
    Ok(&(&ex + &inner.scale_rational(x)) + &ax)
}

/// If `g` equals `c·t` on every piece for one constant `c`, returns `c`.
pub fn linear_coefficient(g: &PiecewiseLaurent) -> Option<ConstLinear> {
    let first = g.pieces().first()?.coeff(1);
    g.pieces()
        .iter()
        .all(|p| p.terms().all(|(e, c)| e == 1 && *c == first) && (p.coeff(1) == first))
        .then_some(first)
}

/// Jump `f(N+0) - f(N-0)` at a positive integer.
pub fn jump_at(f: &PiecewiseLaurent, n: usize) -> Result<ConstLinear> {
    let x = int(n as i64);
    Ok(&f.eval_at(&x, SideConvention::RightLimit)? - &f.eval_at(&x, SideConvention::LeftLimit)?)
}

/// The grid `{k/denom : 0 ≤ k ≤ X·denom}` restricted to `lo ≤ x`.
pub fn grid(lo: &BigRational, end: &BigRational, denom: u64) -> Vec<BigRational> {
    assert!(denom >= 1);
    let d = BigInt::from(denom);
    let top = (end * BigRational::from_integer(d.clone())).floor().to_integer();
    let start = (lo * BigRational::from_integer(d.clone())).ceil().to_integer();
    let top = top.to_i64().expect("grid size fits i64");
    let start = start.to_i64().expect("grid size fits i64").max(0);
    (start..=top)
        .map(|k| BigRational::new(BigInt::from(k), d.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{kronecker_character, mobius_sieve, twist};

    fn lin(c1: (i64, i64), a2: (i64, i64)) -> ConstLinear {
        ConstLinear::new(
            GaussianRational::ratio(c1.0, c1.1),
            GaussianRational::ratio(a2.0, a2.1),
            GaussianRational::zero(),
        )
    }

    fn mu_case(end: i64) -> VolterraCase {
        VolterraCase::new(
            mobius_sieve(end as usize + 1).unwrap(),
            int(end),
            GaussianRational::zero(),
        )
        .unwrap()
    }

    #[test]
    fn error_term_values() {
        let er = mu_case(4).build_error_term().unwrap();
        assert_eq!(
            er.eval_at(&int(1), SideConvention::RightLimit).unwrap(),
            lin((1, 1), (-1, 2))
        );
        assert_eq!(
            er.eval_at(&rat(1, 2), SideConvention::Point).unwrap(),
            lin((0, 1), (-1, 8))
        );
        assert_eq!(
            er.eval_at(&rat(3, 2), SideConvention::Point).unwrap(),
            lin((1, 1), (-9, 8))
        );
    }

    #[test]
    fn f1_values() {
        let f1 = mu_case(4).build_f1().unwrap();
        assert_eq!(
            f1.eval_at(&rat(1, 2), SideConvention::Point).unwrap(),
            lin((0, 1), (-1, 2))
        );
        assert_eq!(
            f1.eval_at(&int(1), SideConvention::RightLimit).unwrap(),
            lin((1, 1), (-1, 1))
        );
        assert_eq!(jump_at(&f1, 1).unwrap(), lin((1, 1), (0, 1)));
        // Σ_{n|2} μ(n)/n = 1 - 1/2
        assert_eq!(jump_at(&f1, 2).unwrap(), lin((1, 2), (0, 1)));
        assert_eq!(f1.integrate(&rat(3, 2), Weight::One).unwrap(), lin((1, 2), (-9, 8)));
    }

    /// Truncated series `-Σ_{n≤M} (a(n)/n){x/n}` evaluated exactly.
    fn f1_by_series(a: &ArithSequence, x: &BigRational, cutoff: usize) -> BigRational {
        let mut s = BigRational::zero();
        for n in 1..=cutoff {
            let y = x / int(n as i64);
            let frac = &y - y.floor();
            s -= a.value(n).re() / int(n as i64) * frac;
        }
        s
    }

    #[test]
    fn f1_matches_series_up_to_tail() {
        // f₁ and its truncation differ by x·(A2 - Σ_{n≤M} a(n)/n²) exactly.
        let a = mobius_sieve(60).unwrap();
        let case = VolterraCase::new(a.clone(), int(10), GaussianRational::zero()).unwrap();
        let f1 = case.build_f1().unwrap();
        let p2: BigRational = (1..=60).map(|n| a.value(n).re() / int((n * n) as i64)).sum();
        for k in 1..30 {
            let x = rat(k, 3);
            let exact = f1.eval_at(&x, SideConvention::RightLimit).unwrap();
            let series = f1_by_series(&a, &x, 60);
            let diff = &exact - &ConstLinear::constant(GaussianRational::real(series));
            let expect = ConstLinear::new(
                GaussianRational::real(&x * &p2),
                GaussianRational::real(-x.clone()),
                GaussianRational::zero(),
            );
            assert_eq!(diff, expect, "x = {x}");
        }
    }

    #[test]
    fn solution_family_values() {
        let case = mu_case(4);
        let f = case.solution_family().unwrap();
        assert_eq!(
            f.eval_at(&int(1), SideConvention::RightLimit).unwrap(),
            lin((1, 1), (-1, 1))
        );
        assert_eq!(f.eval_at(&int(0), SideConvention::Point).unwrap(), ConstLinear::zero());
        let g = case
            .with_free_constant(GaussianRational::one())
            .solution_family()
            .unwrap();
        assert_eq!(
            g.eval_at(&rat(1, 2), SideConvention::Point).unwrap(),
            lin((1, 2), (-1, 4))
        );
        assert_eq!(
            g.eval_at(&int(1), SideConvention::RightLimit).unwrap(),
            lin((2, 1), (-1, 1))
        );
    }

    #[test]
    fn residual_examples() {
        let case = mu_case(6);
        let er = case.build_error_term().unwrap();
        let f = case.solution_family().unwrap();
        assert!(residual(&f, &er, &int(1)).unwrap().is_zero());

        let a = "3/2+1/2*i".parse().unwrap();
        let f = case.with_free_constant(a).solution_family().unwrap();
        assert!(residual(&f, &er, &rat(17, 3)).unwrap().is_zero());

        let t2 = PiecewiseLaurent::monomial(int(6), 2, ConstLinear::from_int(1)).unwrap();
        assert!(!residual(&t2, &er, &int(1)).unwrap().is_zero());
    }

    #[test]
    fn checker_matches_direct_residual() {
        let chi = kronecker_character(-4).unwrap();
        let a = twist(&mobius_sieve(20).unwrap(), &chi);
        let case = VolterraCase::new(a, int(12), GaussianRational::from_int(-2)).unwrap();
        let er = case.build_error_term().unwrap();
        let f = case.solution_family().unwrap();
        let checker = ResidualChecker::new(f.clone(), er.clone()).unwrap();
        for x in grid(&BigRational::zero(), &int(12), 4) {
            let direct = residual(&f, &er, &x).unwrap();
            assert_eq!(checker.at(&x, SideConvention::RightLimit).unwrap(), direct);
            assert!(direct.is_zero());
        }
    }

    #[test]
    fn lemma1_examples() {
        let case = mu_case(4);
        assert!(case.lemma1_residual(&rat(3, 2)).unwrap().is_zero());
        assert!(case.lemma1_residual(&int(1)).unwrap().is_zero());
        assert!(case.lemma1_residual(&int(0)).unwrap().is_zero());
        // R(3/2) = 1 - (9/8)A2 - (3/2)(1 - (3/2)A2) = -1/2 + (9/8)A2
        let r = case
            .remainder()
            .unwrap()
            .eval_at(&rat(3, 2), SideConvention::Point)
            .unwrap();
        assert_eq!(r, lin((-1, 2), (9, 8)));
    }

    #[test]
    fn homogeneous_examples() {
        assert!(homogeneous_residual(&GaussianRational::one(), &int(5))
            .unwrap()
            .is_zero());
        assert!(homogeneous_residual(&GaussianRational::imag_unit(), &rat(1, 3))
            .unwrap()
            .is_zero());
        assert!(homogeneous_residual(&GaussianRational::zero(), &rat(7, 2))
            .unwrap()
            .is_zero());
        assert!(homogeneous_residual(&GaussianRational::one(), &int(0))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn resolvent_examples() {
        let t2 = PiecewiseLaurent::monomial(int(2), 2, ConstLinear::from_int(1)).unwrap();
        assert_eq!(
            resolvent_apply(&t2, &int(2), &GaussianRational::zero()).unwrap(),
            ConstLinear::from_int(8)
        );
        let t = PiecewiseLaurent::monomial(int(2), 1, ConstLinear::from_int(1)).unwrap();
        assert_eq!(
            resolvent_apply(&t, &int(1), &GaussianRational::zero()),
            Err(Error::LogCase { lo: 0, hi: 1 })
        );
        assert!(matches!(
            resolvent_solution(&t, &GaussianRational::zero()),
            Err(Error::LogCase { .. })
        ));

        let case = mu_case(8);
        let er = case.build_error_term().unwrap();
        let f = resolvent_solution(&er, &GaussianRational::zero()).unwrap();
        let x_f1 = case.build_f1().unwrap().shift_exponent(1).unwrap();
        let diff = PiecewiseLaurent::combine(&f, &x_f1, &GaussianRational::one(), &-GaussianRational::one()).unwrap();
        let c = linear_coefficient(&diff).expect("difference is c·x");
        for x in grid(&BigRational::zero(), &int(8), 3) {
            let v = resolvent_apply(&er, &x, &GaussianRational::zero()).unwrap();
            assert_eq!(v, f.eval_at(&x, SideConvention::RightLimit).unwrap());
            let fx1 = x_f1.eval_at(&x, SideConvention::RightLimit).unwrap();
            assert_eq!(&v - &fx1, c.scale_rational(&x));
            assert!(residual(&f, &er, &x).unwrap().is_zero());
        }
    }

    #[test]
    fn case_validation() {
        let mu = mobius_sieve(10).unwrap();
        assert!(VolterraCase::new(mu.clone(), int(11), GaussianRational::zero()).is_err());
        assert!(VolterraCase::new(mu.clone(), int(0), GaussianRational::zero()).is_err());
        let mut tampered = convolve_id(&mu).to_exact_vec();
        tampered[6] = GaussianRational::from_int(99);
        let b = ArithSequence::from_exact("b", tampered).unwrap();
        let case = VolterraCase::with_b(mu, b, int(10), GaussianRational::zero()).unwrap();
        assert_eq!(case.convolution_mismatches(), vec![7]);
    }

    #[test]
    fn grid_points() {
        let g = grid(&BigRational::zero(), &int(2), 3);
        assert_eq!(g.len(), 7);
        assert_eq!(g[1], rat(1, 3));
        let g = grid(&int(1), &rat(5, 2), 2);
        assert_eq!(g, vec![int(1), rat(3, 2), int(2), rat(5, 2)]);
    }
}
