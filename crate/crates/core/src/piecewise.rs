//! Piecewise Laurent polynomials on `[0, X]` with breakpoints at the integers.
//!
//! On each open interval `(k, k+1)` a function is `Σ_e c_e·t^e` with
//! `e ∈ {-2, …, 3}` and [`ConstLinear`] coefficients. Values at the integers
//! themselves are fixed by a [`SideConvention`] stored with the function.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{parse_rational, ConstLinear, GaussianRational};

pub const MIN_EXP: i32 = -2;
pub const MAX_EXP: i32 = 3;

/// Which value to take at a breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SideConvention {
    LeftLimit,
    RightLimit,
    /// The function's own value, as fixed by its normalization.
    Point,
    /// `(left + right) / 2`.
    Midpoint,
}

/// Integration weight `w(t)` in `∫ f(t)·w(t) dt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Weight {
    One,
    InvT,
    InvT2,
}

impl Weight {
    fn exponent(self) -> i32 {
        match self {
            Weight::One => 0,
            Weight::InvT => -1,
            Weight::InvT2 => -2,
        }
    }
}

pub(crate) fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rpow(x: &BigRational, e: i32) -> BigRational {
    match e {
        0 => BigRational::one(),
        1 => x.clone(),
        _ => Pow::pow(x, e),
    }
}

/// A finite Laurent polynomial `Σ_e c_e·t^e`; zero coefficients are not stored.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Laurent {
    terms: BTreeMap<i32, ConstLinear>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(e: i32, c: ConstLinear) -> Self {
        let mut l = Laurent::zero();
        l.add_term(e, &c);
        l
    }

    pub fn constant(c: ConstLinear) -> Self {
        Self::monomial(0, c)
    }

    pub fn add_term(&mut self, e: i32, c: &ConstLinear) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_default();
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: i32) -> ConstLinear {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &ConstLinear)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exponent(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// Multiplies by `t^by`.
    pub fn shift(&self, by: i32) -> Laurent {
        Laurent {
            terms: self.terms.iter().map(|(&e, c)| (e + by, c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &GaussianRational) -> Laurent {
        let mut out = Laurent::zero();
        for (&e, c) in &self.terms {
            out.add_term(e, &c.scale(s));
        }
        out
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            out.add_term(e, &-c);
        }
        out
    }

    pub fn eval(&self, t: &BigRational) -> Result<ConstLinear> {
        let mut acc = ConstLinear::zero();
        for (&e, c) in &self.terms {
            if t.is_zero() {
                if e < 0 {
                    return Err(Error::SingularAtZero);
                }
                if e > 0 {
                    continue;
                }
            }
            acc += &c.scale_rational(&rpow(t, e));
        }
        Ok(acc)
    }

    /// Power-rule antiderivative; `None` when a `t^-1` term is present.
    pub fn antiderivative(&self) -> Option<Laurent> {
        if self.terms.contains_key(&-1) {
            return None;
        }
        Some(Laurent {
            terms: self
                .terms
                .iter()
                .map(|(&e, c)| (e + 1, c.scale_rational(&int(e as i64 + 1).recip())))
                .collect(),
        })
    }

    pub fn derivative(&self) -> Laurent {
        let mut out = Laurent::zero();
        for (&e, c) in &self.terms {
            if e != 0 {
                out.add_term(e - 1, &c.scale_rational(&int(e as i64)));
            }
        }
        out
    }

    fn check_range(&self) -> Result<()> {
        match (self.min_exponent(), self.max_exponent()) {
            (Some(lo), _) if lo < MIN_EXP => Err(Error::ExponentOutOfRange(lo)),
            (_, Some(hi)) if hi > MAX_EXP => Err(Error::ExponentOutOfRange(hi)),
            _ => Ok(()),
        }
    }
}

/// A function on `[0, X]` given by one [`Laurent`] per unit interval.
///
/// Piece `k` describes the function on `(k, k+1)`. There are at least
/// `⌈X⌉` pieces; builders covering `[0, X]` with integer `X` add piece `X` so
/// that the right limit at `X` exists.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLaurent {
    end: BigRational,
    pieces: Vec<Laurent>,
    normalization: SideConvention,
    weighted: bool,
}

impl PiecewiseLaurent {
    /// Pieces for `(0,1), (1,2), …`; right-continuous at the integers.
    pub fn new(end: BigRational, pieces: Vec<Laurent>) -> Result<Self> {
        Self::build(end, pieces, false)
    }

    /// Like [`new`](Self::new) but allows negative exponents on `(0, 1)`,
    /// as produced by dividing a function by a weight.
    pub fn new_weighted_integrand(end: BigRational, pieces: Vec<Laurent>) -> Result<Self> {
        Self::build(end, pieces, true)
    }

    fn build(end: BigRational, pieces: Vec<Laurent>, weighted: bool) -> Result<Self> {
        if !end.is_positive() {
            return Err(Error::Domain(format!("domain end {end} must be positive")));
        }
        let needed = end.ceil().to_integer().to_usize().unwrap_or(usize::MAX);
        if pieces.len() < needed {
            return Err(Error::Domain(format!(
                "{} pieces do not cover [0, {end}]",
                pieces.len()
            )));
        }
        for p in &pieces {
            p.check_range()?;
        }
        if !weighted {
            if let Some(e) = pieces[0].min_exponent().filter(|&e| e < 0) {
                return Err(Error::Domain(format!(
                    "negative exponent {e} on (0, 1) for a function that must be finite at 0+"
                )));
            }
        }
        Ok(PiecewiseLaurent {
            end,
            pieces,
            normalization: SideConvention::RightLimit,
            weighted,
        })
    }

    /// Sets the value taken at the integers (left, right, or midpoint).
    pub fn with_normalization(mut self, side: SideConvention) -> Self {
        assert!(
            side != SideConvention::Point,
            "a normalization must name a concrete side"
        );
        self.normalization = side;
        self
    }

    /// `t^e` on `(0, X]`.
    pub fn monomial(end: BigRational, e: i32, c: ConstLinear) -> Result<Self> {
        let n = piece_count(&end);
        Self::new(end, vec![Laurent::monomial(e, c); n])
    }

    pub fn end(&self) -> &BigRational {
        &self.end
    }

    pub fn pieces(&self) -> &[Laurent] {
        &self.pieces
    }

    pub fn piece(&self, k: usize) -> Option<&Laurent> {
        self.pieces.get(k)
    }

    pub fn normalization(&self) -> SideConvention {
        self.normalization
    }

    fn check_domain(&self, x: &BigRational) -> Result<()> {
        if x.is_negative() || *x > self.end {
            return Err(Error::OutOfDomain {
                x: x.to_string(),
                end: self.end.to_string(),
            });
        }
        Ok(())
    }

    fn piece_at(&self, k: usize, x: &BigRational) -> Result<&Laurent> {
        self.pieces.get(k).ok_or_else(|| Error::OutOfDomain {
            x: x.to_string(),
            end: self.end.to_string(),
        })
    }

    pub fn eval_at(&self, x: &BigRational, side: SideConvention) -> Result<ConstLinear> {
        self.check_domain(x)?;
        if x.is_zero() {
            return self.pieces[0].eval(x);
        }
        if !x.is_integer() {
            let k = x.floor().to_integer().to_usize().expect("in domain");
            return self.pieces[k].eval(x);
        }
        let k = x.to_integer().to_usize().expect("in domain");
        if k == self.pieces.len() {
            // No piece starts at the end point; only the left limit exists.
            return self.piece_at(k - 1, x)?.eval(x);
        }
        let side = if side == SideConvention::Point {
            self.normalization
        } else {
            side
        };
        match side {
            SideConvention::LeftLimit => self.piece_at(k - 1, x)?.eval(x),
            SideConvention::RightLimit => self.piece_at(k, x)?.eval(x),
            SideConvention::Midpoint => {
                let l = self.piece_at(k - 1, x)?.eval(x)?;
                let r = self.piece_at(k, x)?.eval(x)?;
                Ok((&l + &r).scale_rational(&rat(1, 2)))
            }
            SideConvention::Point => unreachable!(),
        }
    }

    /// `∫₀ˣ f(t)·w(t) dt`, summed interval by interval.
    pub fn integrate(&self, x: &BigRational, weight: Weight) -> Result<ConstLinear> {
        self.check_domain(x)?;
        let mut acc = ConstLinear::zero();
        let last = x.ceil().to_integer().to_usize().expect("in domain");
        for k in 0..last {
            let lo = int(k as i64);
            let hi = if int(k as i64 + 1) < *x {
                int(k as i64 + 1)
            } else {
                x.clone()
            };
            let integrand = self.pieces[k].shift(weight.exponent());
            let anti = weighted_antiderivative(&integrand, k)?;
            acc += &(&anti.eval(&hi)? - &anti.eval(&lo)?);
        }
        Ok(acc)
    }

    /// The cumulative integral `x ↦ ∫₀ˣ f(t)·w(t) dt` over the whole domain.
    pub fn antiderivative(&self, weight: Weight) -> Result<PiecewiseLaurent> {
        let pieces = self.antiderivative_pieces(weight)?;
        PiecewiseLaurent::new(self.end.clone(), pieces)
    }

    /// Antiderivative pieces without the exponent-range check; continuous
    /// across breakpoints with value 0 at 0.
    pub(crate) fn antiderivative_pieces(&self, weight: Weight) -> Result<Vec<Laurent>> {
        let mut out = Vec::with_capacity(self.pieces.len());
        let mut running = ConstLinear::zero();
        for (k, piece) in self.pieces.iter().enumerate() {
            let integrand = piece.shift(weight.exponent());
            let anti = weighted_antiderivative(&integrand, k)?;
            let lo = int(k as i64);
            let mut g = anti.clone();
            g.add_term(0, &(&running - &anti.eval(&lo)?));
            running = g.eval(&int(k as i64 + 1))?;
            out.push(g);
        }
        Ok(out)
    }

    /// Per-piece derivative on the open intervals.
    pub fn derivative(&self) -> Result<PiecewiseLaurent> {
        let pieces = self.pieces.iter().map(Laurent::derivative).collect();
        Self::build(self.end.clone(), pieces, true).map(|f| f.with_normalization(self.normalization))
    }

    /// `s·f + t·g` on the common pieces; both must share the domain end.
    pub fn combine(
        f: &PiecewiseLaurent,
        g: &PiecewiseLaurent,
        s: &GaussianRational,
        t: &GaussianRational,
    ) -> Result<PiecewiseLaurent> {
        if f.end != g.end {
            return Err(Error::DomainMismatch(format!("domain ends {} and {}", f.end, g.end)));
        }
        let pieces = f
            .pieces
            .iter()
            .zip(&g.pieces)
            .map(|(a, b)| a.scale(s).add(&b.scale(t)))
            .collect();
        let out = Self::build(f.end.clone(), pieces, f.weighted || g.weighted)?;
        Ok(out.with_normalization(f.normalization))
    }

    /// Multiplies by `t^by`.
    pub fn shift_exponent(&self, by: i32) -> Result<PiecewiseLaurent> {
        let pieces = self.pieces.iter().map(|p| p.shift(by)).collect();
        Ok(Self::build(self.end.clone(), pieces, self.weighted || by < 0)?.with_normalization(self.normalization))
    }

    /// Applies `op` to every piece, keeping domain and normalization.
    pub fn map_pieces(&self, op: impl Fn(usize, &Laurent) -> Laurent) -> Result<PiecewiseLaurent> {
        let pieces = self.pieces.iter().enumerate().map(|(k, p)| op(k, p)).collect();
        Ok(Self::build(self.end.clone(), pieces, self.weighted)?.with_normalization(self.normalization))
    }

    /// Text form: optional `# X=` / `# normalization=` headers, then one
    /// `k: e0=<coeff>; e2=<coeff>` line per piece.
    pub fn to_dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# X={}/{}", self.end.numer(), self.end.denom());
        let norm = match self.normalization {
            SideConvention::LeftLimit => "left",
            SideConvention::Midpoint => "midpoint",
            _ => "right",
        };
        let _ = writeln!(s, "# normalization={norm}");
        for (k, p) in self.pieces.iter().enumerate() {
            let terms: Vec<String> = p.terms().map(|(e, c)| format!("e{e}={c}")).collect();
            if terms.is_empty() {
                let _ = writeln!(s, "{k}:");
            } else {
                let _ = writeln!(s, "{k}: {}", terms.join("; "));
            }
        }
        s
    }

    /// Parses [`to_dump`](Self::to_dump) output. Without an `X` header the
    /// domain end is the number of pieces.
    pub fn from_dump(text: &str) -> Result<PiecewiseLaurent> {
        let mut end = None;
        let mut normalization = SideConvention::RightLimit;
        let mut pieces = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let bad = |m: &str| Error::Parse(format!("line {}: {m}: '{raw}'", lineno + 1));
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(v) = comment.strip_prefix("X=") {
                    end = Some(parse_rational(v)?);
                } else if let Some(v) = comment.strip_prefix("normalization=") {
                    normalization = match v.trim() {
                        "right" => SideConvention::RightLimit,
                        "left" => SideConvention::LeftLimit,
                        "midpoint" => SideConvention::Midpoint,
                        _ => return Err(bad("unknown normalization")),
                    };
                }
                continue;
            }
            let (k, rest) = line.split_once(':').ok_or_else(|| bad("expected 'k: ...'"))?;
            let k: usize = k.trim().parse().map_err(|_| bad("bad piece index"))?;
            if k != pieces.len() {
                return Err(bad("pieces must be listed as 0, 1, 2, ..."));
            }
            let mut piece = Laurent::zero();
            for term in rest.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                let (e, c) = term.split_once('=').ok_or_else(|| bad("expected 'e<exp>=<coeff>'"))?;
                let e: i32 = e
                    .trim()
                    .strip_prefix('e')
                    .and_then(|e| e.parse().ok())
                    .ok_or_else(|| bad("bad exponent"))?;
                if !(MIN_EXP..=MAX_EXP).contains(&e) {
                    return Err(Error::ExponentOutOfRange(e));
                }
                piece.add_term(e, &c.parse::<ConstLinear>()?);
            }
            pieces.push(piece);
        }
        if pieces.is_empty() {
            return Err(Error::Parse("no pieces".into()));
        }
        let end = end.unwrap_or_else(|| int(pieces.len() as i64));
        Ok(PiecewiseLaurent::new(end, pieces)?.with_normalization(normalization))
    }
}

/// Number of pieces a builder uses for `[0, X]`: `⌊X⌋ + 1`.
pub fn piece_count(end: &BigRational) -> usize {
    end.floor().to_integer().to_usize().expect("domain end fits in usize") + 1
}

/// Antiderivative of an already weighted integrand on `(k, k+1)`.
fn weighted_antiderivative(integrand: &Laurent, k: usize) -> Result<Laurent> {
    if !integrand.coeff(-1).is_zero() {
        return Err(Error::LogCase {
            lo: k as i64,
            hi: k as i64 + 1,
        });
    }
    if k == 0 {
        if let Some(e) = integrand.min_exponent().filter(|&e| e < 0) {
            return Err(Error::DivergentAtZero { exponent: e });
        }
    }
    Ok(integrand.antiderivative().expect("no t^-1 term"))
}
