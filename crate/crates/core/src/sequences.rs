//! Arithmetical functions on `1..=N`: sieves, real Dirichlet characters,
//! twisting, Dirichlet convolution with `Id`, and summatory functions.

use std::path::Path;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::{rational_to_f64, GaussianRational};
use crate::lseries;

/// Largest sieve range accepted by the default constructors.
pub const DEFAULT_CAPACITY: usize = 50_000_000;

#[derive(Clone, Debug, PartialEq)]
enum Values {
    /// Real integer values, promoted to [`GaussianRational`] on access.
    Integer(Vec<i64>),
    Exact(Vec<GaussianRational>),
}

/// How the sequence was built; lets numeric code use L-function closed forms.
#[derive(Clone, Debug, PartialEq)]
pub enum Structure {
    Generic,
    /// `a(n) = μ(n)χ(n)`; the trivial character gives `μ` itself.
    MobiusTwist(CharacterSpec),
}

/// Exact values `a(1..=N)` with metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct ArithSequence {
    name: String,
    values: Values,
    magnitude_bound: Option<BigRational>,
    known_a1: Option<GaussianRational>,
    structure: Structure,
}

impl ArithSequence {
    pub fn from_integers(name: impl Into<String>, values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        Ok(ArithSequence {
            name: name.into(),
            values: Values::Integer(values),
            magnitude_bound: None,
            known_a1: None,
            structure: Structure::Generic,
        })
    }

    /// Exact values; collapses to the integer representation when possible.
    pub fn from_exact(name: impl Into<String>, values: Vec<GaussianRational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        let ints: Option<Vec<i64>> = values
            .iter()
            .map(|v| {
                if v.is_integer() {
                    v.re().to_integer().to_i64()
                } else {
                    None
                }
            })
            .collect();
        let values = match ints {
            Some(v) => Values::Integer(v),
            None => Values::Exact(values),
        };
        Ok(ArithSequence {
            name: name.into(),
            values,
            magnitude_bound: None,
            known_a1: None,
            structure: Structure::Generic,
        })
    }

    /// Declares `|a(n)| ≤ bound` for every `n`; checked against the stored values.
    pub fn with_magnitude_bound(mut self, bound: BigRational) -> Result<Self> {
        let b2 = &bound * &bound;
        for n in 1..=self.len() {
            if self.value(n).norm_sqr() > b2 {
                return Err(Error::InvalidSequence(format!(
                    "|a({n})| exceeds the declared bound {bound}"
                )));
            }
        }
        self.magnitude_bound = Some(bound);
        Ok(self)
    }

    pub fn with_known_a1(mut self, a1: GaussianRational) -> Self {
        self.known_a1 = Some(a1);
        self
    }

    pub fn with_structure(mut self, structure: Structure) -> Self {
        self.structure = structure;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The range `N`.
    pub fn len(&self) -> usize {
        match &self.values {
            Values::Integer(v) => v.len(),
            Values::Exact(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `a(n)` for `1 ≤ n ≤ N`; panics outside that range.
    pub fn value(&self, n: usize) -> GaussianRational {
        assert!(n >= 1 && n <= self.len(), "index {n} outside 1..={}", self.len());
        match &self.values {
            Values::Integer(v) => GaussianRational::from_int(v[n - 1]),
            Values::Exact(v) => v[n - 1].clone(),
        }
    }

    /// Values as machine integers when every value is a real integer.
    pub fn as_integers(&self) -> Option<&[i64]> {
        match &self.values {
            Values::Integer(v) => Some(v),
            Values::Exact(_) => None,
        }
    }

    pub fn magnitude_bound(&self) -> Option<&BigRational> {
        self.magnitude_bound.as_ref()
    }

    pub fn known_a1(&self) -> Option<&GaussianRational> {
        self.known_a1.as_ref()
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn to_exact_vec(&self) -> Vec<GaussianRational> {
        (1..=self.len()).map(|n| self.value(n)).collect()
    }

    /// Writes the `n,value` CSV form.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_sequence_csv(self, None, out)
    }

    fn csv_value(&self, n: usize) -> String {
        match &self.values {
            Values::Integer(v) => v[n - 1].to_string(),
            Values::Exact(v) => v[n - 1].to_string(),
        }
    }
}

/// Writes `n,value`, or `n,value,b` when `b` is given; `b` must cover `a`.
pub fn write_sequence_csv<W: std::io::Write>(a: &ArithSequence, b: Option<&ArithSequence>, out: W) -> Result<()> {
    if b.is_some_and(|b| b.len() < a.len()) {
        return Err(Error::InvalidSequence("b column shorter than the sequence".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    match b {
        Some(b) => {
            w.write_record(["n", "value", "b"])?;
            for n in 1..=a.len() {
                w.write_record([n.to_string(), a.csv_value(n), b.csv_value(n)])?;
            }
        }
        None => {
            w.write_record(["n", "value"])?;
            for n in 1..=a.len() {
                w.write_record([n.to_string(), a.csv_value(n)])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn check_capacity(n: usize, capacity: usize) -> Result<()> {
    if n > capacity {
        return Err(Error::CapacityExceeded {
            requested: n,
            limit: capacity,
        });
    }
    if n == 0 {
        return Err(Error::InvalidSequence("sieve range must be at least 1".into()));
    }
    Ok(())
}

/// Linear sieve returning the smallest prime factor of every `n ≤ limit`.
fn smallest_prime_factors(limit: usize) -> (Vec<u32>, Vec<u32>) {
    let mut spf = vec![0u32; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            if p > si || i * p as usize > limit {
                break;
            }
            spf[i * p as usize] = p;
        }
    }
    (spf, primes)
}

pub fn mobius_sieve(n: usize) -> Result<ArithSequence> {
    mobius_sieve_with_capacity(n, DEFAULT_CAPACITY)
}

/// `μ(1..=n)`, with `|μ| ≤ 1` and `Σ μ(d)/d = 0` recorded.
pub fn mobius_sieve_with_capacity(n: usize, capacity: usize) -> Result<ArithSequence> {
    check_capacity(n, capacity)?;
    let (spf, _) = smallest_prime_factors(n);
    let mut mu = vec![0i64; n + 1];
    mu[1] = 1;
    for i in 2..=n {
        let p = spf[i] as usize;
        let j = i / p;
        mu[i] = if j % p == 0 { 0 } else { -mu[j] };
    }
    mu.remove(0);
    Ok(ArithSequence::from_integers("mu", mu)?
        .with_magnitude_bound(BigRational::one())?
        .with_known_a1(GaussianRational::zero())
        .with_structure(Structure::MobiusTwist(CharacterSpec::trivial())))
}

pub fn totient_sieve(n: usize) -> Result<ArithSequence> {
    totient_sieve_with_capacity(n, DEFAULT_CAPACITY)
}

pub fn totient_sieve_with_capacity(n: usize, capacity: usize) -> Result<ArithSequence> {
    check_capacity(n, capacity)?;
    let (spf, _) = smallest_prime_factors(n);
    let mut phi = vec![0i64; n + 1];
    phi[1] = 1;
    for i in 2..=n {
        let p = spf[i] as usize;
        let j = i / p;
        phi[i] = if j % p == 0 {
            phi[j] * p as i64
        } else {
            phi[j] * (p as i64 - 1)
        };
    }
    phi.remove(0);
    ArithSequence::from_integers("phi", phi)
}

/// A real Dirichlet character given by its values on `0..q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSpec {
    modulus: u64,
    table: Vec<i8>,
}

impl CharacterSpec {
    /// Validates a period table of a non-principal real character with `q ≥ 3`.
    pub fn new(table: Vec<i8>) -> Result<Self> {
        let q = table.len();
        let bad = |m: String| Err(Error::InvalidCharacter(m));
        if q < 3 {
            return bad(format!("modulus {q} < 3"));
        }
        for (r, &v) in table.iter().enumerate() {
            if !(-1..=1).contains(&v) {
                return bad(format!("chi({r}) = {v} is not in {{-1, 0, 1}}"));
            }
            let coprime = r.gcd(&q) == 1;
            if coprime != (v != 0) {
                return bad(format!("chi({r}) = {v} but gcd({r}, {q}) = {}", r.gcd(&q)));
            }
        }
        for m in 0..q {
            for n in 0..q {
                if table[(m * n) % q] != table[m] * table[n] {
                    return bad(format!("not multiplicative at ({m}, {n})"));
                }
            }
        }
        if table.iter().map(|&v| v as i64).sum::<i64>() != 0 {
            return bad("principal character (values do not sum to zero)".into());
        }
        Ok(CharacterSpec {
            modulus: q as u64,
            table,
        })
    }

    /// The character that is 1 on every integer (modulus 1).
    pub fn trivial() -> Self {
        CharacterSpec {
            modulus: 1,
            table: vec![1],
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.modulus == 1
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    /// `χ(n)`, reading the table at `n mod q`.
    pub fn value(&self, n: u64) -> i8 {
        self.table[(n % self.modulus) as usize]
    }

    /// Reads a `residue,value` CSV covering `0..q` exactly once.
    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let headers = rdr.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["residue", "value"] {
            return Err(Error::Parse("character CSV header must be 'residue,value'".into()));
        }
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let r: usize = rec[0]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad residue '{}'", &rec[0])))?;
            let v: i8 = rec[1]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad value '{}'", &rec[1])))?;
            rows.push((r, v));
        }
        rows.sort_unstable();
        if rows.iter().enumerate().any(|(k, &(r, _))| k != r) {
            return Err(Error::Parse("residues must be exactly 0..q".into()));
        }
        CharacterSpec::new(rows.into_iter().map(|(_, v)| v).collect())
    }
}

fn is_squarefree(mut n: u64) -> bool {
    let mut p = 2;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        if n % p == 0 {
            n /= p;
        }
        p += 1;
    }
    true
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d.unsigned_abs() < 3 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// Jacobi symbol `(a|m)` for odd `m > 0`.
fn jacobi(a: i64, m: u64) -> i8 {
    debug_assert!(m % 2 == 1);
    let mut a = a.rem_euclid(m as i64) as u64;
    let mut m = m;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(d|n)` for `n ≥ 0`.
pub fn kronecker_symbol(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d.unsigned_abs() == 1 { 1 } else { 0 };
    }
    let v = n.trailing_zeros();
    let odd = n >> v;
    let mut sign = 1i8;
    if v > 0 {
        let chi2 = if d % 2 == 0 {
            0
        } else if matches!(d.rem_euclid(8), 1 | 7) {
            1
        } else {
            -1
        };
        if chi2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            sign = chi2;
        }
    }
    sign * jacobi(d, odd)
}

/// The real character `n ↦ (D|n)` modulo `|D|` for a fundamental discriminant `D`.
pub fn kronecker_character(d: i64) -> Result<CharacterSpec> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::NotFundamentalDiscriminant(d));
    }
    let q = d.unsigned_abs();
    let table = (0..q).map(|n| kronecker_symbol(d, n)).collect();
    CharacterSpec::new(table)
}

/// `n ↦ a(n)χ(n)`.
pub fn twist(a: &ArithSequence, chi: &CharacterSpec) -> ArithSequence {
    let name = format!("{}*chi{}", a.name, chi.modulus);
    let values = match &a.values {
        Values::Integer(v) => Values::Integer(
            v.iter()
                .enumerate()
                .map(|(k, &x)| x * chi.value(k as u64 + 1) as i64)
                .collect(),
        ),
        Values::Exact(v) => Values::Exact(
            v.iter()
                .enumerate()
                .map(|(k, x)| match chi.value(k as u64 + 1) {
                    0 => GaussianRational::zero(),
                    1 => x.clone(),
                    _ => -x,
                })
                .collect(),
        ),
    };
    let structure = match &a.structure {
        Structure::MobiusTwist(c) if c.is_trivial() => Structure::MobiusTwist(chi.clone()),
        _ => Structure::Generic,
    };
    // Twisting by the trivial character leaves the sequence, hence A1, unchanged.
    let known_a1 = if chi.is_trivial() { a.known_a1.clone() } else { None };
    ArithSequence {
        name,
        values,
        magnitude_bound: a.magnitude_bound.clone(),
        known_a1,
        structure,
    }
}

/// `b(n) = Σ_{d|n} a(d)·(n/d)` by divisor passes.
pub fn convolve_id(a: &ArithSequence) -> ArithSequence {
    let n = a.len();
    let name = format!("id*{}", a.name);
    if let Some(ints) = a.as_integers() {
        if let Some(b) = convolve_id_int(ints) {
            return ArithSequence::from_integers(name, b).expect("nonempty");
        }
    }
    let mut b = vec![GaussianRational::zero(); n];
    for d in 1..=n {
        let ad = a.value(d);
        if ad.is_zero() {
            continue;
        }
        for m in 1..=n / d {
            b[d * m - 1] += &ad.scale(&BigRational::from_integer(BigInt::from(m)));
        }
    }
    ArithSequence::from_exact(name, b).expect("nonempty")
}

fn convolve_id_int(a: &[i64]) -> Option<Vec<i64>> {
    let n = a.len();
    let mut b = vec![0i64; n];
    for d in 1..=n {
        let ad = a[d - 1];
        if ad == 0 {
            continue;
        }
        for m in 1..=n / d {
            let t = ad.checked_mul(m as i64)?;
            b[d * m - 1] = b[d * m - 1].checked_add(t)?;
        }
    }
    Some(b)
}

/// `⌊x⌋` for `0 ≤ x ≤ N`.
fn floor_in_range(x: &BigRational, n: usize) -> Result<usize> {
    if x.is_negative() || *x > BigRational::from_integer(BigInt::from(n)) {
        return Err(Error::RangeExceeded {
            x: x.to_string(),
            limit: n.to_string(),
        });
    }
    Ok(x.floor().to_integer().to_usize().expect("bounded by N"))
}

/// `Σ_{n≤x} b(n)`, including `n = x` at integers.
pub fn summatory(b: &ArithSequence, x: &BigRational) -> Result<GaussianRational> {
    let m = floor_in_range(x, b.len())?;
    Ok(summatory_upto(b, m))
}

pub(crate) fn summatory_upto(b: &ArithSequence, m: usize) -> GaussianRational {
    if let Some(ints) = b.as_integers() {
        let s: i128 = ints[..m].iter().map(|&v| v as i128).sum();
        return GaussianRational::from_bigint(BigInt::from(s));
    }
    let mut acc = GaussianRational::zero();
    for n in 1..=m {
        acc += &b.value(n);
    }
    acc
}

/// `Σ_{d≤x} a(d)·w(⌊x/d⌋)` with integer weight `w`.
fn floor_weighted_sum(a: &ArithSequence, m: usize, w: impl Fn(u64) -> i128) -> GaussianRational {
    if let Some(ints) = a.as_integers() {
        let mut acc: i128 = 0;
        for d in 1..=m {
            let v = ints[d - 1];
            if v != 0 {
                acc += v as i128 * w((m / d) as u64);
            }
        }
        return GaussianRational::from_bigint(BigInt::from(acc));
    }
    let mut acc = GaussianRational::zero();
    for d in 1..=m {
        let v = a.value(d);
        if !v.is_zero() {
            acc += &v.scale(&BigRational::from_integer(BigInt::from(w((m / d) as u64))));
        }
    }
    acc
}

/// `Σ_{d≤x} a(d)·q(q+1)/2` with `q = ⌊x/d⌋`; equals `Σ_{n≤x} (Id * a)(n)`.
pub fn summatory_via_floor_identity(a: &ArithSequence, x: &BigRational) -> Result<GaussianRational> {
    let m = floor_in_range(x, a.len())?;
    Ok(floor_weighted_sum(a, m, |q| (q as i128) * (q as i128 + 1) / 2))
}

/// `Σ_{d≤x} a(d)·⌊x/d⌋`.
pub fn floor_sum(a: &ArithSequence, x: &BigRational) -> Result<GaussianRational> {
    let m = floor_in_range(x, a.len())?;
    Ok(floor_weighted_sum(a, m, |q| q as i128))
}

/// Numeric values of the series constants with absolute error bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericConstants {
    pub a2: Complex64,
    pub a1: Complex64,
    pub a2_bound: f64,
    pub a1_bound: f64,
}

fn character_of<'a>(a: &'a ArithSequence, chi: Option<&'a CharacterSpec>) -> Option<&'a CharacterSpec> {
    chi.or(match &a.structure {
        Structure::MobiusTwist(c) => Some(c),
        Structure::Generic => None,
    })
}

/// Numeric `A2` and `A1`.
///
/// `A1` comes from the declared exact value when present, otherwise from
/// `1/L(1, χ)` for a twist of `μ` by a non-principal character.
pub fn numeric_constants(
    a: &ArithSequence,
    chi: Option<&CharacterSpec>,
    precision_target: f64,
) -> Result<NumericConstants> {
    let a2 = numeric_a2(a, chi, precision_target)?;
    let (a1, a1_bound) = if let Some(k) = &a.known_a1 {
        (k.to_complex(), 0.0)
    } else {
        let c = character_of(a, chi).ok_or_else(|| Error::A1NotCertifiable(a.name.clone()))?;
        let l1 = lseries::l_value_at_one(c).ok_or_else(|| Error::A1NotCertifiable(a.name.clone()))?;
        let r = lseries::reciprocal(l1);
        (Complex64::new(r.value, 0.0), r.bound)
    };
    if !(a1_bound <= precision_target) {
        return Err(Error::PrecisionUnattainable {
            target: precision_target,
            bound: a1_bound,
        });
    }
    Ok(NumericConstants {
        a2: a2.0,
        a1,
        a2_bound: a2.1,
        a1_bound,
    })
}

/// Numeric `A2 = Σ a(n)/n²` with its absolute error bound.
///
/// For `a = μχ` this is `1/L(2, χ)`; otherwise the partial sum over the
/// stored range with tail bound `B/N`.
pub fn numeric_a2(a: &ArithSequence, chi: Option<&CharacterSpec>, precision_target: f64) -> Result<(Complex64, f64)> {
    let (value, bound) = match character_of(a, chi) {
        Some(c) => {
            let r = lseries::reciprocal(lseries::l_value(c, 2.0));
            (Complex64::new(r.value, 0.0), r.bound)
        }
        None => {
            let b = a
                .magnitude_bound
                .as_ref()
                .ok_or_else(|| Error::MissingMagnitudeBound(a.name.clone()))?;
            let n = a.len();
            let mut sum = Complex64::new(0.0, 0.0);
            // Smallest terms first.
            for k in (1..=n).rev() {
                let kf = k as f64;
                sum += a.value(k).to_complex() / (kf * kf);
            }
            (sum, rational_to_f64(b) / n as f64 + 4.0 * f64::EPSILON * n as f64)
        }
    };
    if !(bound <= precision_target) {
        return Err(Error::PrecisionUnattainable {
            target: precision_target,
            bound,
        });
    }
    Ok((value, bound))
}

/// A sequence read from an `n,value[,b]` CSV, with the optional `b` column.
#[derive(Clone, Debug)]
pub struct SequenceFile {
    pub a: ArithSequence,
    pub b: Option<Vec<GaussianRational>>,
}

/// Reads `n,value` (optionally `n,value,b`) with contiguous indices `1..=N`.
///
/// The declared magnitude bound is the largest `|re| + |im|` among the stored
/// values.
pub fn read_sequence_csv(path: &Path) -> Result<SequenceFile> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let with_b = match headers.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["n", "value"] => false,
        ["n", "value", "b"] => true,
        _ => {
            return Err(Error::Parse(
                "sequence CSV header must be 'n,value' or 'n,value,b'".into(),
            ))
        }
    };
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let n: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad index '{}'", &rec[0])))?;
        if n != k + 1 {
            return Err(Error::Parse(format!(
                "indices must be 1..N contiguous; row {} has n = {n}",
                k + 1
            )));
        }
        a.push(rec[1].parse::<GaussianRational>()?);
        if with_b {
            b.push(rec[2].parse::<GaussianRational>()?);
        }
    }
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file").to_string();
    let bound = a
        .iter()
        .map(|v| v.re().abs() + v.im().abs())
        .fold(BigRational::zero(), |m, v| if v > m { v } else { m });
    let a = ArithSequence::from_exact(name, a)?.with_magnitude_bound(bound)?;
    Ok(SequenceFile {
        a,
        b: with_b.then_some(b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn gi(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    /// Trial-division oracle for μ.
    fn mobius_oracle(mut n: u64) -> i64 {
        let mut mu = 1;
        let mut p = 2;
        while p * p <= n {
            if n % p == 0 {
                n /= p;
                if n % p == 0 {
                    return 0;
                }
                mu = -mu;
            }
            p += 1;
        }
        if n > 1 {
            mu = -mu;
        }
        mu
    }

    fn gcd_count(n: u64) -> i64 {
        (1..=n).filter(|k| k.gcd(&n) == 1).count() as i64
    }

    #[test]
    fn mobius_values() {
        let mu = mobius_sieve(1000).unwrap();
        assert_eq!(mu.value(1), gi(1));
        assert_eq!(mu.value(6), gi(1));
        assert_eq!(mu.value(12), gi(0));
        for n in 1..=1000 {
            assert_eq!(mu.as_integers().unwrap()[n - 1], mobius_oracle(n as u64), "n = {n}");
        }
        assert_eq!(mu.known_a1(), Some(&GaussianRational::zero()));
        assert_eq!(mu.magnitude_bound(), Some(&BigRational::one()));
    }

    #[test]
    fn totient_values() {
        let phi = totient_sieve(500).unwrap();
        assert_eq!(phi.value(1), gi(1));
        assert_eq!(phi.value(10), gi(4));
        for n in 1..=500u64 {
            assert_eq!(phi.value(n as usize), gi(gcd_count(n)));
        }
        assert_eq!(summatory(&phi, &rat(10, 1)).unwrap(), gi(32));
        assert_eq!(summatory(&phi, &rat(7, 2)).unwrap(), gi(4));
        assert_eq!(summatory(&phi, &rat(1, 2)).unwrap(), gi(0));
    }

    #[test]
    fn capacity_and_range_errors() {
        assert!(matches!(
            mobius_sieve_with_capacity(101, 100),
            Err(Error::CapacityExceeded {
                requested: 101,
                limit: 100
            })
        ));
        assert!(mobius_sieve(0).is_err());
        let phi = totient_sieve(10).unwrap();
        assert!(matches!(summatory(&phi, &rat(21, 2)), Err(Error::RangeExceeded { .. })));
        assert!(summatory(&phi, &rat(-1, 2)).is_err());
    }

    /// Euler's criterion / residue enumeration oracle for an odd prime.
    fn legendre_by_enumeration(a: i64, p: u64) -> i8 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        let chi4 = kronecker_character(-4).unwrap();
        assert_eq!((chi4.value(1), chi4.value(3), chi4.value(2)), (1, -1, 0));
        let chi3 = kronecker_character(-3).unwrap();
        assert_eq!((chi3.value(2), chi3.value(3)), (-1, 0));
        // χ_{-3}(n) = (n | 3) by reciprocity; enumerate residues mod 3.
        for n in 0..30u64 {
            assert_eq!(chi3.value(n), legendre_by_enumeration(n as i64, 3));
        }
        // χ_{-4}(n) = (-1)^((n-1)/2) on odd n.
        for n in 0..40u64 {
            let expect = if n % 2 == 0 {
                0
            } else if n % 4 == 1 {
                1
            } else {
                -1
            };
            assert_eq!(chi4.value(n), expect);
        }
    }

    #[test]
    fn kronecker_matches_legendre_for_primes() {
        for d in [-3i64, 5, -7, -11, 13, 17, -19, -23, 29] {
            let p = d.unsigned_abs();
            let chi = kronecker_character(d).unwrap();
            // (d|n) = (n|p) for prime |d| by quadratic reciprocity.
            for n in 0..p {
                assert_eq!(chi.value(n), legendre_by_enumeration(n as i64, p), "D = {d}, n = {n}");
            }
        }
    }

    #[test]
    fn fundamental_discriminants() {
        for d in [-3, -4, 5, 8, -7, -8, 12, 13, -15, -20, 21, 24, -24, 28, -163] {
            let chi = kronecker_character(d).unwrap_or_else(|e| panic!("{d}: {e}"));
            assert_eq!(chi.table().iter().map(|&v| v as i64).sum::<i64>(), 0);
        }
        for d in [-1, 0, 1, 2, 3, 4, -12, 9, 16, 20, -16, 45] {
            assert!(
                matches!(kronecker_character(d), Err(Error::NotFundamentalDiscriminant(_))),
                "{d}"
            );
        }
    }

    #[test]
    fn character_validation() {
        assert!(CharacterSpec::new(vec![0, 1, 1]).is_err()); // principal
        assert!(CharacterSpec::new(vec![0, 1, 0]).is_err()); // zero at a unit
        assert!(CharacterSpec::new(vec![0, 1, -1, 1, -1]).is_err()); // not multiplicative mod 5
        assert!(CharacterSpec::new(vec![0, 1]).is_err());
        assert!(CharacterSpec::new(vec![0, 1, -1]).is_ok());
    }

    #[test]
    fn twist_examples() {
        let mu = mobius_sieve(30).unwrap();
        let chi = kronecker_character(-3).unwrap();
        let t = twist(&mu, &chi);
        assert_eq!(t.value(2), gi(1));
        assert_eq!(t.value(3), gi(0));
        assert_eq!(t.value(4), gi(0));
        assert_eq!(t.known_a1(), None);
        assert_eq!(t.magnitude_bound(), Some(&BigRational::one()));
        assert_eq!(t.structure(), &Structure::MobiusTwist(chi));
    }

    /// `n Π_{p|n} (1 - χ(p)/p)` by trial division.
    fn twisted_totient_oracle(n: u64, chi: &CharacterSpec) -> BigRational {
        let mut r = BigRational::from_integer(BigInt::from(n));
        let mut m = n;
        let mut p = 2;
        while m > 1 {
            if m % p == 0 {
                r *= BigRational::one() - rat(chi.value(p) as i64, p as i64);
                while m % p == 0 {
                    m /= p;
                }
            }
            p += 1;
        }
        r
    }

    #[test]
    fn convolution_examples() {
        let mu = mobius_sieve(2000).unwrap();
        let b = convolve_id(&mu);
        assert_eq!(b.value(6), gi(2));
        assert_eq!(
            b,
            ArithSequence {
                name: b.name.clone(),
                ..totient_sieve(2000).unwrap()
            }
        );

        let mut delta = vec![0i64; 50];
        delta[0] = 1;
        let id = convolve_id(&ArithSequence::from_integers("delta", delta).unwrap());
        for n in 1..=50 {
            assert_eq!(id.value(n), gi(n as i64));
        }

        for d in [-3, -4, 5] {
            let chi = kronecker_character(d).unwrap();
            let b = convolve_id(&twist(&mu, &chi));
            for n in 1..=300u64 {
                assert_eq!(b.value(n as usize).re(), &twisted_totient_oracle(n, &chi));
            }
        }
        let chi3 = kronecker_character(-3).unwrap();
        assert_eq!(convolve_id(&twist(&mu, &chi3)).value(5), gi(6));
    }

    #[test]
    fn exact_and_integer_paths_agree() {
        let vals: Vec<GaussianRational> = (1..=60)
            .map(|n| GaussianRational::new(rat(n % 7 - 3, 1 + n % 4), rat(n % 3, 2)))
            .collect();
        let a = ArithSequence::from_exact("z", vals).unwrap();
        assert!(a.as_integers().is_none());
        let b = convolve_id(&a);
        for x in [rat(1, 2), rat(7, 3), rat(20, 1), rat(119, 2)] {
            assert_eq!(
                summatory_via_floor_identity(&a, &x).unwrap(),
                summatory(&b, &x).unwrap()
            );
        }
    }

    #[test]
    fn floor_identity_examples() {
        let mu = mobius_sieve(100).unwrap();
        assert_eq!(summatory_via_floor_identity(&mu, &rat(3, 1)).unwrap(), gi(4));
        assert_eq!(summatory_via_floor_identity(&mu, &rat(10, 1)).unwrap(), gi(32));
        assert_eq!(summatory_via_floor_identity(&mu, &rat(1, 2)).unwrap(), gi(0));
        assert_eq!(floor_sum(&mu, &rat(7, 3)).unwrap(), gi(1));
        assert_eq!(floor_sum(&mu, &rat(1, 2)).unwrap(), gi(0));
    }

    #[test]
    fn numeric_constants_for_mobius() {
        let mu = mobius_sieve(100).unwrap();
        let c = numeric_constants(&mu, None, 1e-9).unwrap();
        let six_over_pi2 = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((c.a2.re - six_over_pi2).abs() < 1e-9);
        assert!(c.a2_bound <= 1e-9);
        assert_eq!(c.a1, Complex64::new(0.0, 0.0));
        assert_eq!(c.a1_bound, 0.0);
    }

    #[test]
    fn numeric_a2_for_twist_matches_brute_force() {
        const M: usize = 1_000_000;
        let mu = mobius_sieve(M).unwrap();
        let chi = kronecker_character(-4).unwrap();
        let t = twist(&mu, &chi);
        let brute: f64 = (1..=M)
            .rev()
            .map(|n| t.as_integers().unwrap()[n - 1] as f64 / (n as f64).powi(2))
            .sum();
        let c = numeric_constants(&t, None, 1e-9).unwrap();
        assert!((c.a2.re - brute).abs() <= 1.0 / M as f64);
        // 1/L(2, χ_{-4}) is the reciprocal of Catalan's constant.
        assert!((c.a2.re - 1.0 / 0.915_965_594_177_219).abs() < 1e-13);
        // A1 = 1/L(1, χ_{-4}) = 4/π
        assert!((c.a1.re - 4.0 / std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn numeric_constants_errors() {
        let a = ArithSequence::from_integers("raw", vec![1, 2, 3]).unwrap();
        assert!(matches!(
            numeric_constants(&a, None, 1e-9),
            Err(Error::MissingMagnitudeBound(_))
        ));
        let a = a.with_magnitude_bound(rat(3, 1)).unwrap();
        assert!(matches!(
            numeric_constants(&a, None, 10.0),
            Err(Error::A1NotCertifiable(_))
        ));
        assert!(matches!(
            numeric_constants(&a, None, 1e-9),
            Err(Error::PrecisionUnattainable { .. })
        ));
        assert!(ArithSequence::from_integers("x", vec![5])
            .unwrap()
            .with_magnitude_bound(rat(1, 1))
            .is_err());
    }

    #[test]
    fn csv_ingestion() {
        let dir = std::env::temp_dir().join(format!("seqcsv-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("s.csv");
        std::fs::write(&p, "n,value\n1,1/1\n2,-1/2+1/3*i\n3,0\n").unwrap();
        let f = read_sequence_csv(&p).unwrap();
        assert_eq!(f.a.len(), 3);
        assert_eq!(f.a.value(2), "-1/2+1/3*i".parse().unwrap());
        assert!(f.b.is_none());
        assert_eq!(f.a.magnitude_bound(), Some(&BigRational::one()));

        let mu = mobius_sieve(12).unwrap();
        let mut buf = Vec::new();
        write_sequence_csv(&mu, Some(&convolve_id(&mu)), &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone())
            .unwrap()
            .starts_with("n,value,b\n1,1,1\n2,-1,1\n"));
        std::fs::write(&p, &buf).unwrap();
        let f = read_sequence_csv(&p).unwrap();
        assert_eq!(f.a.to_exact_vec(), mu.to_exact_vec());
        assert_eq!(f.b.unwrap(), totient_sieve(12).unwrap().to_exact_vec());

        std::fs::write(&p, "n,value\n1,1\n3,2\n").unwrap();
        assert!(read_sequence_csv(&p).is_err());
        std::fs::write(&p, "k,value\n1,1\n").unwrap();
        assert!(read_sequence_csv(&p).is_err());

        let c = dir.join("c.csv");
        std::fs::write(&c, "residue,value\n0,0\n2,-1\n1,1\n").unwrap();
        assert_eq!(
            CharacterSpec::from_csv_path(&c).unwrap(),
            kronecker_character(-3).unwrap()
        );
        std::fs::write(&c, "residue,value\n0,0\n1,1\n2,1\n").unwrap();
        assert!(CharacterSpec::from_csv_path(&c).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }
}
