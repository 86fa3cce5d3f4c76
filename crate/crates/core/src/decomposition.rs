//! Arithmetic/analytic splitting of the error term, for `μ` and for `μχ`.
//!
//! Untwisted (`a = μ`, `x ≥ 1`, right-continuous):
//! `E(x) = x·f(x) + (g(x) + 1)/2` with `g(x) = Σ μ(n){x/n}²`.
//!
//! Twisted (`a = μχ`, `x ≥ 0`, midpoint at the integers):
//! `E₁(x, χ) = x·f(x, χ) + g(x, χ)/2` with
//! `f(x, χ) = Σ (μχ(d)/d)·s(x/d)` and `g(x, χ) = Σ μχ(d){x/d}({x/d} - 1)`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{ConstLinear, GaussianRational};
use crate::piecewise::{int, piece_count, rat, Laurent, PiecewiseLaurent, SideConvention};
use crate::sequences::{mobius_sieve, twist, ArithSequence, CharacterSpec};
use crate::volterra::{FloorSums, VolterraCase};

/// Saw-tooth `s(x)`: 0 at integers, `1/2 - {x}` elsewhere.
pub fn sawtooth(x: &BigRational) -> BigRational {
    if x.is_integer() {
        BigRational::zero()
    } else {
        rat(1, 2) - (x - x.floor())
    }
}

/// Running partial sums `Σ_{n≤k} a(n)/n^p` for `k = 0..=K`.
fn partial_reciprocal_sums(a: &ArithSequence, k_max: usize, p: i32) -> Vec<GaussianRational> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut acc = GaussianRational::zero();
    out.push(acc.clone());
    for n in 1..=k_max {
        let v = a.value(n);
        if !v.is_zero() {
            acc += &v.scale(&int(n as i64).pow(-p));
        }
        out.push(acc.clone());
    }
    out
}

fn lin(c: GaussianRational) -> ConstLinear {
    ConstLinear::constant(c)
}

/// `g` for `a` on `[0, X]`, finite part over `n ≤ x` plus the tail folded into
/// `A2` (and `A1` when twisted).
pub fn build_g(a: &ArithSequence, end: &BigRational, twisted: bool) -> Result<PiecewiseLaurent> {
    let count = piece_count(end);
    if count > a.len() + 1 {
        return Err(Error::RangeExceeded {
            x: end.to_string(),
            limit: a.len().to_string(),
        });
    }
    let sums = FloorSums::new(a, count);
    let p1 = partial_reciprocal_sums(a, count - 1, 1);
    let p2 = partial_reciprocal_sums(a, count - 1, 2);
    let mut pieces = Vec::with_capacity(count);
    for k in 0..count {
        // finite part, u = t/n - q
        let s2 = sums.sum(k, 2, |_| 1);
        let mut p = Laurent::monomial(2, lin(s2));
        if twisted {
            // u(u - 1) = t²/n² - t(2q + 1)/n + q(q + 1)
            p.add_term(1, &lin(-sums.sum(k, 1, |q| 2 * q as i128 + 1)));
            p.add_term(0, &lin(sums.sum(k, 0, |q| q as i128 * (q as i128 + 1))));
        } else {
            // u² = t²/n² - 2tq/n + q²
            p.add_term(1, &lin(-sums.sum(k, 1, |q| 2 * q as i128)));
            p.add_term(0, &lin(sums.sum(k, 0, |q| q as i128 * q as i128)));
        }
        // tail n > x: {x/n} = x/n
        p.add_term(2, &(&ConstLinear::a2() - &lin(p2[k].clone())));
        if twisted {
            p.add_term(1, &(&lin(p1[k].clone()) - &ConstLinear::a1()));
        }
        pieces.push(p);
    }
    let g = PiecewiseLaurent::new(end.clone(), pieces)?;
    Ok(if twisted {
        g.with_normalization(SideConvention::Midpoint)
    } else {
        g
    })
}

/// `f(x, χ)` for `a = μχ` on `[0, X]`, normalized to the midpoint at the integers.
pub fn build_f_chi(chi: &CharacterSpec, end: &BigRational) -> Result<PiecewiseLaurent> {
    let mu = mobius_sieve(piece_count(end))?;
    build_f_chi_for(&twist(&mu, chi), end)
}

/// `Σ_{d≤x}(a(d)/d)s(x/d) + (A1 - Σ_{d≤x} a(d)/d)/2 - x(A2 - Σ_{d≤x} a(d)/d²)`.
pub fn build_f_chi_for(a: &ArithSequence, end: &BigRational) -> Result<PiecewiseLaurent> {
    let count = piece_count(end);
    if count > a.len() + 1 {
        return Err(Error::RangeExceeded {
            x: end.to_string(),
            limit: a.len().to_string(),
        });
    }
    let sums = FloorSums::new(a, count);
    let p1 = partial_reciprocal_sums(a, count - 1, 1);
    let p2 = partial_reciprocal_sums(a, count - 1, 2);
    let half = rat(1, 2);
    let mut pieces = Vec::with_capacity(count);
    for k in 0..count {
        // s(t/d) = 1/2 + q - t/d on (k, k+1)
        let mut p = Laurent::monomial(1, lin(-sums.sum(k, 2, |_| 1)));
        p.add_term(0, &lin(p1[k].scale(&half) + sums.sum(k, 1, |q| q as i128)));
        let tail_a1 = &ConstLinear::a1() - &lin(p1[k].clone());
        p.add_term(0, &tail_a1.scale_rational(&half));
        p.add_term(1, &(&lin(p2[k].clone()) - &ConstLinear::a2()));
        pieces.push(p);
    }
    Ok(PiecewiseLaurent::new(end.clone(), pieces)?.with_normalization(SideConvention::Midpoint))
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecompositionKind {
    /// `a = μ`.
    Untwisted,
    /// `a = μχ`.
    Twisted(CharacterSpec),
    /// Arbitrary `a`; only the arithmetic part `x·f₁(x)` is defined.
    Generic,
}

/// `E`, `E^AR`, `E^AN` for one instance on `[0, X]`.
#[derive(Clone, Debug)]
pub struct DecompositionCase {
    pub kind: DecompositionKind,
    pub end: BigRational,
    pub a: ArithSequence,
    pub e: PiecewiseLaurent,
    pub e_ar: PiecewiseLaurent,
    pub e_an: Option<PiecewiseLaurent>,
}

/// Values of the three parts at one point and `E - E^AR - E^AN`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub e: ConstLinear,
    pub e_ar: ConstLinear,
    pub e_an: Option<ConstLinear>,
    pub residual: Option<ConstLinear>,
}

impl DecompositionCase {
    pub fn untwisted(end: BigRational) -> Result<Self> {
        let mu = mobius_sieve(piece_count(&end))?;
        let case = VolterraCase::new(mu.clone(), end.clone(), GaussianRational::zero())?;
        let e = case.build_error_term()?;
        let e_ar = case.build_f1()?.shift_exponent(1)?;
        let half = GaussianRational::ratio(1, 2);
        let e_an = build_g(&mu, &end, false)?.map_pieces(|_, p| {
            let mut q = p.scale(&half);
            q.add_term(0, &lin(half.clone()));
            q
        })?;
        Ok(DecompositionCase {
            kind: DecompositionKind::Untwisted,
            end,
            a: mu,
            e,
            e_ar,
            e_an: Some(e_an),
        })
    }

    pub fn twisted(chi: &CharacterSpec, end: BigRational) -> Result<Self> {
        let a = twist(&mobius_sieve(piece_count(&end))?, chi);
        let case = VolterraCase::new(a.clone(), end.clone(), GaussianRational::zero())?;
        let e = case.build_error_term()?.with_normalization(SideConvention::Midpoint);
        let e_ar = build_f_chi_for(&a, &end)?.shift_exponent(1)?;
        let half = GaussianRational::ratio(1, 2);
        let e_an = build_g(&a, &end, true)?.map_pieces(|_, p| p.scale(&half))?;
        Ok(DecompositionCase {
            kind: DecompositionKind::Twisted(chi.clone()),
            end,
            a,
            e,
            e_ar,
            e_an: Some(e_an),
        })
    }

    pub fn generic(a: ArithSequence, end: BigRational) -> Result<Self> {
        let case = VolterraCase::new(a.clone(), end.clone(), GaussianRational::zero())?;
        Self::generic_from_case(&case)
    }

    pub fn generic_from_case(case: &VolterraCase) -> Result<Self> {
        Ok(DecompositionCase {
            kind: DecompositionKind::Generic,
            end: case.end.clone(),
            a: case.a.clone(),
            e: case.build_error_term()?,
            e_ar: case.build_f1()?.shift_exponent(1)?,
            e_an: None,
        })
    }

    /// Smallest `x` where the decomposition is claimed to hold.
    pub fn lower_limit(&self) -> BigRational {
        match self.kind {
            DecompositionKind::Untwisted => BigRational::one(),
            _ => BigRational::zero(),
        }
    }

    /// Evaluates the parts without checking the domain restriction.
    pub fn parts(&self, x: &BigRational) -> Result<Decomposition> {
        let side = SideConvention::Point;
        let e = self.e.eval_at(x, side)?;
        let e_ar = self.e_ar.eval_at(x, side)?;
        let e_an = self.e_an.as_ref().map(|g| g.eval_at(x, side)).transpose()?;
        let residual = e_an.as_ref().map(|an| &(&e - &e_ar) - an);
        Ok(Decomposition {
            e,
            e_ar,
            e_an,
            residual,
        })
    }

    /// The parts at `x` with `E - E^AR - E^AN`; `x ≥ 1` untwisted, `x ≥ 0` twisted.
    pub fn decompose(&self, x: &BigRational) -> Result<Decomposition> {
        if *x < self.lower_limit() {
            return Err(Error::Domain(format!(
                "decomposition is only valid for x >= {}, got {x}",
                self.lower_limit()
            )));
        }
        self.parts(x)
    }
}

/// Residuals of `f(x, χ₀) = f(x)`, `g(x, χ₀) = g(x) + 1` and
/// `Σ_{d≤x} μ(d)⌊x/d⌋ = 1` for the trivial character `χ₀`, with `A1(μ) = 0`.
#[derive(Clone, Debug)]
pub struct TrivialCharacterCheck {
    known_a1: GaussianRational,
    f: PiecewiseLaurent,
    f_chi: PiecewiseLaurent,
    g: PiecewiseLaurent,
    g_chi: PiecewiseLaurent,
    mu: ArithSequence,
}

impl TrivialCharacterCheck {
    pub fn new(end: &BigRational) -> Result<Self> {
        let mu = mobius_sieve(piece_count(end))?;
        let trivial = twist(&mu, &CharacterSpec::trivial());
        let known_a1 = trivial
            .known_a1()
            .cloned()
            .ok_or_else(|| Error::A1NotCertifiable(trivial.name().to_string()))?;
        let case = VolterraCase::new(mu.clone(), end.clone(), GaussianRational::zero())?;
        Ok(TrivialCharacterCheck {
            known_a1,
            f: case.build_f1()?,
            f_chi: build_f_chi_for(&trivial, end)?,
            g: build_g(&mu, end, false)?,
            g_chi: build_g(&trivial, end, true)?,
            mu,
        })
    }

    /// `f(x, χ₀) - f(x)`.
    pub fn f_relation(&self, x: &BigRational) -> Result<ConstLinear> {
        let fc = self
            .f_chi
            .eval_at(x, SideConvention::Point)?
            .substitute_a1(&self.known_a1);
        Ok(&fc - &self.f.eval_at(x, SideConvention::Point)?)
    }

    /// `g(x, χ₀) - g(x) - 1`.
    pub fn g_relation(&self, x: &BigRational) -> Result<ConstLinear> {
        let gc = self
            .g_chi
            .eval_at(x, SideConvention::Point)?
            .substitute_a1(&self.known_a1);
        Ok(&(&gc - &self.g.eval_at(x, SideConvention::Point)?) - &ConstLinear::from_int(1))
    }

    /// `Σ_{d≤x} μ(d)⌊x/d⌋ - 1`.
    pub fn mertens_relation(&self, x: &BigRational) -> Result<ConstLinear> {
        let s = crate::sequences::floor_sum(&self.mu, x)?;
        Ok(lin(s - GaussianRational::one()))
    }
}

/// `max |E(x)| / (x log x)` over the sample points, with the maximizing `x`.
pub fn growth_ratio_max(
    e: &PiecewiseLaurent,
    xs: &[BigRational],
    a2: Complex64,
    a1: Complex64,
) -> Result<(f64, BigRational)> {
    let mut best = (f64::NEG_INFINITY, BigRational::zero());
    for x in xs {
        let xf = x.to_f64().unwrap_or(f64::NAN);
        let v = e.eval_at(x, SideConvention::Point)?.numeric(a2, a1).norm();
        let ratio = v / (xf * xf.ln());
        if ratio > best.0 {
            best = (ratio, x.clone());
        }
    }
    Ok(best)
}
