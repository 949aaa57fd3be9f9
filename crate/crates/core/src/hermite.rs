//! Hermite calculus: exact products, aliasing on the Gaussian nodes and the
//! weighing polynomial.
//!
//! `H_n` are the probabilists' Hermite polynomials, `H_{n+1} = x H_n − n H_{n−1}`,
//! orthogonal for the standard normal law with `E(H_n²) = n!`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::ortho::{eval_pi, eval_pi_upto, nodes, RecurrenceSystem, UniPoly};
use crate::snap::snap_rational;

const SNAP_DEN: i64 = 1_000_000;
const SNAP_TOL: f64 = 1e-9;

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Falling factorial `n (n−1) ⋯ (n−i+1)`, which equals `C(n, i) i!`.
fn falling(n: usize, i: usize) -> BigInt {
    if i > n {
        return BigInt::zero();
    }
    (0..i).fold(BigInt::one(), |acc, j| acc * BigInt::from(n - j))
}

/// Exact monomial coefficients of `H_n`, lowest degree first.
pub fn hermite_coeffs(n: usize) -> Vec<BigInt> {
    let mut prev: Vec<BigInt> = Vec::new();
    let mut cur = vec![BigInt::one()];
    for k in 0..n {
        let mut next = vec![BigInt::zero(); k + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * BigInt::from(k);
        }
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// `H_n` in the monomial basis.
pub fn hermite_poly(n: usize) -> UniPoly {
    UniPoly::monomial(hermite_coeffs(n).iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
}

/// Finite expansion `Σ_j c_j H_j` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HermiteExpansion {
    terms: BTreeMap<usize, BigRational>,
}

impl HermiteExpansion {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The single term `c H_j`.
    pub fn term(j: usize, c: BigRational) -> Self {
        let mut e = Self::zero();
        e.add_term(j, c);
        e
    }

    fn add_term(&mut self, j: usize, c: BigRational) {
        let slot = self.terms.entry(j).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&j);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &BigRational) {
        for (&j, c) in &other.terms {
            self.add_term(j, c * s);
        }
    }

    pub fn terms(&self) -> &BTreeMap<usize, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, j: usize) -> BigRational {
        self.terms.get(&j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    /// Dense `f64` coefficients over `H_0 … H_deg`.
    pub fn to_f64(&self) -> Vec<f64> {
        let Some(d) = self.degree() else { return Vec::new() };
        (0..=d).map(|j| self.coeff(j).to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Double-precision value. Relative accuracy suffers where the value is
    /// tiny next to the coefficients; use [`Self::eval_exact`] there.
    pub fn eval(&self, x: f64) -> f64 {
        let Some(d) = self.degree() else { return 0.0 };
        let h = eval_pi_upto(&RecurrenceSystem::hermite(), d, x).expect("Hermite coefficients never run out");
        self.to_f64().iter().zip(&h).map(|(c, v)| c * v).sum()
    }

    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let Some(d) = self.degree() else { return BigRational::zero() };
        let (mut prev, mut cur) = (BigRational::zero(), BigRational::one());
        let mut acc = self.coeff(0);
        for k in 0..d {
            let next = x * &cur - &prev * BigRational::from_integer(BigInt::from(k));
            prev = std::mem::replace(&mut cur, next);
            if let Some(c) = self.terms.get(&(k + 1)) {
                acc += c * &cur;
            }
        }
        acc
    }

    /// Exact monomial coefficients, lowest degree first.
    pub fn to_monomial_exact(&self) -> Vec<BigRational> {
        let Some(d) = self.degree() else { return Vec::new() };
        let mut out = vec![BigRational::zero(); d + 1];
        for (&j, c) in &self.terms {
            for (i, h) in hermite_coeffs(j).into_iter().enumerate() {
                out[i] += c * BigRational::from_integer(h);
            }
        }
        out
    }

    /// Inverse of [`Self::to_monomial_exact`].
    pub fn from_monomial_exact(coeffs: &[BigRational]) -> Self {
        let mut rem = coeffs.to_vec();
        let mut out = Self::zero();
        for j in (0..rem.len()).rev() {
            let c = rem[j].clone();
            if c.is_zero() {
                continue;
            }
            for (i, h) in hermite_coeffs(j).into_iter().enumerate() {
                rem[i] -= &c * BigRational::from_integer(h);
            }
            out.add_term(j, c);
        }
        out
    }
}

impl fmt::Display for HermiteExpansion {
    /// `5/12 H0 - 1/12 H2`, ascending degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (j, c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-{mag} H{j}")?,
                (0, false) => write!(f, "{mag} H{j}")?,
                (_, true) => write!(f, " - {mag} H{j}")?,
                (_, false) => write!(f, " + {mag} H{j}")?,
            }
        }
        Ok(())
    }
}

/// Fourier expansion of `H_k H_n`:
/// `H_{n+k} + Σ_{i=1}^{n∧k} C(n,i) C(k,i) i! H_{n+k−2i}`.
pub fn product_expand(k: usize, n: usize) -> HermiteExpansion {
    let mut out = HermiteExpansion::term(n + k, BigRational::one());
    for i in 1..=n.min(k) {
        out.add_term(n + k - 2 * i, BigRational::from_integer(binom(k, i) * falling(n, i)));
    }
    out
}

/// Normal form of `H_{n+k}` on the zeros of `H_n`, expanded over `H_0 … H_{n−1}`.
pub fn aliasing_nf(k: usize, n: usize) -> Result<HermiteExpansion> {
    if n == 0 {
        return Err(Error::InvalidDesign("the node set of H_0 is empty".into()));
    }
    // nf[o] is the normal form of H_{n+o}.
    let mut nf: Vec<HermiteExpansion> = vec![HermiteExpansion::zero()];
    for o in 1..=k {
        let mut acc = HermiteExpansion::zero();
        for i in 1..=n.min(o) {
            let mult = -BigRational::from_integer(binom(o, i) * falling(n, i));
            let m = n + o - 2 * i;
            if m < n {
                acc.add_term(m, mult);
            } else {
                acc.add_scaled(&nf[m - n], &mult);
            }
        }
        nf.push(acc);
    }
    Ok(nf.swap_remove(k))
}

/// Integer polynomial in the design degree `n`, lowest power first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NPoly(pub Vec<BigInt>);

impl NPoly {
    fn constant(c: BigInt) -> Self {
        Self(vec![c]).trimmed()
    }

    /// `n (n−1) ⋯ (n−i+1)`.
    pub fn falling(i: usize) -> Self {
        (0..i).fold(Self::constant(BigInt::one()), |acc, j| acc.mul(&Self(vec![-BigInt::from(j), BigInt::one()])))
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self::default();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self(out).trimmed()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let at = |p: &Self, i: usize| p.0.get(i).cloned().unwrap_or_default();
        Self((0..n).map(|i| at(self, i) + at(other, i)).collect()).trimmed()
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        Self(self.0.iter().map(|c| c * s).collect()).trimmed()
    }

    pub fn eval(&self, n: i64) -> BigInt {
        let n = BigInt::from(n);
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * &n + c)
    }
}

impl fmt::Display for NPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(usize, &BigInt)> = self.0.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (p, c)) in terms.into_iter().enumerate() {
            let mag = c.abs();
            let body = match (p, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "n".to_string(),
                (1, false) => format!("{mag}n"),
                (_, true) => format!("n^{p}"),
                (_, false) => format!("{mag}n^{p}"),
            };
            match (k, c.is_negative()) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Normal form of `H_{n+k}` for symbolic `n`: maps an offset `m` to the
/// coefficient of `H_{n−m}`, a polynomial in `n`.
///
/// Valid for every `n > k`, where all indices stay in range.
pub fn aliasing_row(k: usize) -> BTreeMap<usize, NPoly> {
    let mut rows: Vec<BTreeMap<usize, NPoly>> = vec![BTreeMap::new()];
    for o in 1..=k {
        let mut acc: BTreeMap<usize, NPoly> = BTreeMap::new();
        let mut add = |m: usize, p: NPoly| {
            let e = acc.entry(m).or_default();
            *e = e.add(&p);
        };
        for i in 1..=o {
            let mult = NPoly::falling(i).scale(&-binom(o, i));
            match (o as i64) - 2 * (i as i64) {
                below if below < 0 => add((-below) as usize, mult),
                0 => {}
                above => {
                    for (m, p) in &rows[above as usize] {
                        add(*m, p.mul(&mult));
                    }
                }
            }
        }
        acc.retain(|_, p| !p.0.is_empty());
        rows.push(acc);
    }
    rows.swap_remove(k)
}

/// The unique polynomial `λ` of degree `n − 1` with
/// `λ(z) = (n−1)!/n · H_{n−1}(z)⁻²` on the zeros of `H_n`; its values there
/// are the Gaussian weights.
///
/// The coefficients are obtained by interpolation at the numeric nodes and
/// snapped to rationals. The snapped polynomial is accepted only if
/// `λ H_{n−1}² ≡ (n−1)!/n` modulo `H_n` holds exactly; otherwise the
/// polynomial is computed exactly as a modular inverse.
pub fn weighing_polynomial(n: usize) -> Result<HermiteExpansion> {
    if n == 0 {
        return Err(Error::InvalidDesign("the node set of H_0 is empty".into()));
    }
    let target = BigRational::new(factorial(n - 1), BigInt::from(n));
    if let Some(snapped) = weighing_numeric(n, &target)? {
        if weighing_identity_holds(n, &snapped, &target) {
            return Ok(snapped);
        }
    }
    let exact = weighing_exact(n, &target)?;
    if !weighing_identity_holds(n, &exact, &target) {
        return Err(Error::Numeric(format!("weighing identity fails for n = {n}")));
    }
    Ok(exact)
}

fn weighing_numeric(n: usize, target: &BigRational) -> Result<Option<HermiteExpansion>> {
    let sys = RecurrenceSystem::hermite();
    let zs = nodes(&sys, n)?;
    let c = target.to_f64().unwrap_or(f64::NAN);
    let mut v = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (i, &z) in zs.iter().enumerate() {
        for (j, h) in eval_pi_upto(&sys, n - 1, z)?.into_iter().enumerate() {
            v[(i, j)] = h;
        }
        rhs[i] = c / eval_pi(&sys, n - 1, z)?.powi(2);
    }
    let a = linalg::solve_square(&v, &rhs)
        .ok_or_else(|| Error::Numeric(format!("weighing interpolation matrix is singular for n = {n}")))?;
    let mut out = HermiteExpansion::zero();
    for (j, &aj) in a.iter().enumerate() {
        match snap_rational(aj, SNAP_DEN, SNAP_TOL) {
            Some((p, q)) => out.add_term(j, BigRational::new(BigInt::from(p), BigInt::from(q))),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

type QPoly = Vec<BigRational>;

fn qtrim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn qmul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    qtrim(out)
}

fn qsub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let at = |p: &[BigRational], i: usize| p.get(i).cloned().unwrap_or_else(BigRational::zero);
    qtrim((0..n).map(|i| at(a, i) - at(b, i)).collect())
}

fn qdivrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let mut rem = qtrim(a.to_vec());
    let db = b.len() - 1;
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for k in (db..rem.len()).rev() {
        let c = &rem[k] / &b[db];
        for (j, bj) in b.iter().enumerate() {
            rem[k - db + j] -= &c * bj;
        }
        quot[k - db] = c;
    }
    rem.truncate(db);
    (qtrim(quot), qtrim(rem))
}

fn hermite_q(n: usize) -> QPoly {
    hermite_coeffs(n).into_iter().map(BigRational::from_integer).collect()
}

fn weighing_identity_holds(n: usize, lambda: &HermiteExpansion, target: &BigRational) -> bool {
    if lambda.degree().is_some_and(|d| d >= n) {
        return false;
    }
    let h = hermite_q(n - 1);
    let prod = qmul(&qmul(&lambda.to_monomial_exact(), &h), &h);
    let (_, rem) = qdivrem(&prod, &hermite_q(n));
    qtrim(rem) == qtrim(vec![target.clone()])
}

/// `target · (H_{n−1}²)⁻¹ mod H_n` by the extended Euclidean algorithm.
fn weighing_exact(n: usize, target: &BigRational) -> Result<HermiteExpansion> {
    let modulus = hermite_q(n);
    let h = hermite_q(n - 1);
    let (_, a) = qdivrem(&qmul(&h, &h), &modulus);
    // Invariant: r_i ≡ s_i · a (mod H_n).
    let (mut r0, mut r1) = (modulus.clone(), a);
    let (mut s0, mut s1): (QPoly, QPoly) = (Vec::new(), vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = qdivrem(&r0, &r1);
        let s = qsub(&s0, &qmul(&q, &s1));
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
    }
    if r0.len() != 1 {
        return Err(Error::Numeric(format!("H_{} and H_{n} are not coprime", n - 1)));
    }
    let scale = target / &r0[0];
    let inv: QPoly = s0.iter().map(|c| c * &scale).collect();
    let (_, lambda) = qdivrem(&inv, &modulus);
    Ok(HermiteExpansion::from_monomial_exact(&lambda))
}
