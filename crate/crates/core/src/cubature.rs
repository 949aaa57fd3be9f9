//! Expectations, cubature formulae, fractions of Gaussian node sets and the
//! degree of exactness of a formula.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ideal::{bm_ortho, weights_for, Design, OrthoGBasis, Tolerance};
use crate::ortho::{division_error, gauss_rule, nodes, norm_sq, to_ortho, RecurrenceSystem, UniPoly};
use crate::poly::{MonoPoly, MultiIndex, OrthoPoly, TermOrder};

/// Relative size under which an orthogonal coefficient counts as zero when
/// measuring s-orthogonality.
pub const ZERO_COEFF_REL: f64 = 1e-8;

/// `E(p(X))`, the coefficient of `π_0`.
pub fn exact_expectation(p: &OrthoPoly) -> f64 {
    p.coeff(&MultiIndex::zero(p.dim()))
}

/// `E(p(X))` for a monomial-basis polynomial under the product law of `systems`.
pub fn exact_expectation_mono(p: &MonoPoly, systems: &[RecurrenceSystem]) -> Result<f64> {
    Ok(exact_expectation(&p.to_ortho(systems)?))
}

/// `Σ_z f(z) λ_z`.
pub fn cubature_value(f: impl Fn(&[f64]) -> f64, design: &Design, weights: &[f64]) -> Result<f64> {
    if weights.len() != design.len() {
        return Err(Error::DimensionMismatch { expected: design.len(), found: weights.len() });
    }
    Ok(design.points().iter().zip(weights).map(|(z, w)| f(z) * w).sum())
}

/// `‖π_α‖²` for the product basis.
pub fn norm_sq_multi(systems: &[RecurrenceSystem], alpha: &MultiIndex) -> Result<f64> {
    if alpha.dim() != systems.len() {
        return Err(Error::DimensionMismatch { expected: systems.len(), found: alpha.dim() });
    }
    alpha.0.iter().zip(systems).try_fold(1.0, |acc, (&k, sys)| Ok(acc * norm_sq(sys, k)?))
}

/// `E(Σ_g q_g g)` through the coefficients that can contribute:
/// `Σ_g ‖π_α‖² c_α(q_g) − Σ_g Σ_β ‖π_β‖² c_β(q_g) b_β`, where `α` is the
/// leading exponent of `g` and `β` runs over its tail.
///
/// It vanishes exactly when the combination has zero mean.
pub fn zero_mean_check(basis: &OrthoGBasis, q: &[OrthoPoly]) -> Result<f64> {
    if q.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: q.len() });
    }
    let mut acc = 0.0;
    for (g, qg) in basis.elements.iter().zip(q) {
        if qg.dim() != basis.systems.len() {
            return Err(Error::DimensionMismatch { expected: basis.systems.len(), found: qg.dim() });
        }
        acc += norm_sq_multi(&basis.systems, &g.leading)? * qg.coeff(&g.leading);
        for (beta, b) in &g.tail {
            acc -= norm_sq_multi(&basis.systems, beta)? * qg.coeff(beta) * b;
        }
    }
    Ok(acc)
}

/// Largest `s` such that `E(f g) = 0` for every `f` with `deg(f g) ≤ s`.
///
/// With `m` the smallest total degree carrying a nonzero coefficient of `g`,
/// this is `deg g + m − 1`, capped at `2 deg g − 1`. A nonzero constant
/// gives `−1`.
pub fn s_orthogonality(g: &OrthoPoly) -> Result<i64> {
    let deg = g.total_degree().ok_or(Error::UndefinedDegree)? as i64;
    let scale = g.terms().values().fold(0.0f64, |m, c| m.max(c.abs()));
    let m = g
        .terms()
        .iter()
        .filter(|(_, c)| c.abs() > ZERO_COEFF_REL * scale)
        .map(|(e, _)| e.total_degree())
        .min()
        .ok_or(Error::UndefinedDegree)? as i64;
    Ok((deg + m - 1).min(2 * deg - 1))
}

/// Degree of exactness `min_g s(g)` of the formula defined by `basis`.
pub fn cubature_degree(basis: &OrthoGBasis) -> Result<i64> {
    let kind = basis.order.kind();
    if !kind.is_degree_compatible() {
        return Err(Error::NotDegreeCompatible(kind));
    }
    let mut best: Option<i64> = None;
    for g in basis.polys() {
        let s = s_orthogonality(&g)?;
        best = Some(best.map_or(s, |b| b.min(s)));
    }
    best.ok_or_else(|| Error::InconsistentStandardSet("the basis is empty".into()))
}

/// A design together with its weights and certified degree.
#[derive(Debug, Clone, PartialEq)]
pub struct CubatureFormula {
    pub design: Design,
    /// In design order.
    pub weights: Vec<f64>,
    pub order: TermOrder,
    pub degree: i64,
}

impl CubatureFormula {
    pub fn build(design: Design, order: &TermOrder, tol: Tolerance) -> Result<Self> {
        let basis = bm_ortho(&design, order, tol)?;
        let degree = cubature_degree(&basis)?;
        let weights = weights_for(&design, &basis.standard)?;
        Ok(Self { design, weights, order: order.clone(), degree })
    }

    pub fn value(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        cubature_value(f, &self.design, &self.weights).expect("weights match the design")
    }
}

/// Subset of the zeros of `π_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fraction {
    system: RecurrenceSystem,
    parent: Vec<f64>,
    subset: Vec<f64>,
    node_poly: UniPoly,
}

impl Fraction {
    /// Matches every requested point to a zero of `π_n`; the stored nodes
    /// are the parent's, so small input rounding is absorbed.
    pub fn new(system: RecurrenceSystem, n: usize, points: &[f64]) -> Result<Self> {
        let parent = nodes(&system, n)?;
        if points.is_empty() {
            return Err(Error::InvalidFraction("a fraction needs at least one point".into()));
        }
        let mut subset = Vec::with_capacity(points.len());
        for &p in points {
            let z = parent
                .iter()
                .copied()
                .find(|z| (z - p).abs() <= 1e-8 * z.abs().max(1.0))
                .ok_or_else(|| Error::InvalidFraction(format!("{p} is not a zero of {}_{n}", system.symbol())))?;
            if subset.contains(&z) {
                return Err(Error::InvalidFraction(format!("{p} listed twice")));
            }
            subset.push(z);
        }
        subset.sort_by(f64::total_cmp);
        let node_poly = UniPoly::from_roots(&subset);
        Ok(Self { system, parent, subset, node_poly })
    }

    pub fn system(&self) -> &RecurrenceSystem {
        &self.system
    }

    pub fn parent(&self) -> &[f64] {
        &self.parent
    }

    pub fn subset(&self) -> &[f64] {
        &self.subset
    }

    /// `ω_F = Π_{z∈F} (x − z)`.
    pub fn node_poly(&self) -> &UniPoly {
        &self.node_poly
    }
}

/// Monomial coefficients of the Lagrange polynomials of `points`.
fn lagrange_basis(points: &[f64]) -> Vec<UniPoly> {
    points
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let others: Vec<f64> = points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &w)| w).collect();
            let denom: f64 = others.iter().map(|w| z - w).product();
            UniPoly::from_roots(&others).scale(1.0 / denom)
        })
        .collect()
}

/// Weights `E(NF(l_z mod ω_F))` for `z ∈ F`, where `l_z` is the Lagrange
/// polynomial of `z` on the full node set. Ordered as [`Fraction::subset`].
pub fn fraction_weights(fr: &Fraction) -> Result<Vec<f64>> {
    let parent_lagrange = lagrange_basis(&fr.parent);
    let mut out = Vec::with_capacity(fr.subset.len());
    for &z in &fr.subset {
        let i = fr.parent.iter().position(|&p| p == z).expect("subset nodes come from the parent");
        let (_, nf) = parent_lagrange[i].div_rem(&fr.node_poly)?;
        out.push(to_ortho(&fr.system, &nf)?.coeff(0));
    }
    Ok(out)
}

/// Error `E(p(X)) − Σ_{z∈F} p(z) λ^F_z` from the division `p = q ω_F + r`:
/// `Σ_k b_k c_k ‖π_k‖²` with `b = c(q)` and `c = c(ω_F)`.
pub fn fraction_error(fr: &Fraction, p: &UniPoly) -> Result<f64> {
    division_error(&fr.system, p, &fr.node_poly)
}

/// Outcome of integrating a polynomial over a product grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridExpectation {
    /// `Σ_z f(z) Π_i λ_{z_i}`.
    pub value: f64,
    pub exact: f64,
    /// `exact − value`.
    pub error: f64,
    /// Contribution of each coordinate; they sum to `error`.
    pub error_terms: Vec<f64>,
}

/// Divides `f` by the monic univariate `g(x_k)`, treating the other
/// variables as coefficients.
fn divide_in(f: &MonoPoly, k: usize, g: &UniPoly) -> Result<(MonoPoly, MonoPoly)> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<MultiIndex, Vec<f64>> = BTreeMap::new();
    for (e, &c) in f.terms() {
        let mut rest = e.clone();
        let p = std::mem::replace(&mut rest.0[k], 0);
        let v = groups.entry(rest).or_default();
        if v.len() <= p {
            v.resize(p + 1, 0.0);
        }
        v[p] += c;
    }
    let (mut q, mut r) = (Vec::new(), Vec::new());
    for (rest, coeffs) in groups {
        let (qu, ru) = UniPoly::monomial(coeffs).div_rem(g)?;
        for (target, u) in [(&mut q, qu), (&mut r, ru)] {
            for (p, &c) in u.coeffs().iter().enumerate() {
                let mut e = rest.clone();
                e.0[k] = p;
                target.push((e, c));
            }
        }
    }
    Ok((MonoPoly::from_terms(f.dim(), q)?, MonoPoly::from_terms(f.dim(), r)?))
}

/// Integrates `f` with the tensor Gaussian rule on `counts` nodes per
/// coordinate and splits the error by coordinate: dividing successively by
/// `π_{n_k}(x_k)` leaves quotients `q_k`, and coordinate `k` contributes
/// `‖π_{n_k}‖² c_{n_k e_k}(q_k)`.
pub fn product_grid_expectation(
    f: &MonoPoly,
    counts: &[usize],
    systems: &[RecurrenceSystem],
) -> Result<GridExpectation> {
    let d = systems.len();
    if counts.len() != d || f.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: if counts.len() != d { counts.len() } else { f.dim() } });
    }
    let rules = counts.iter().zip(systems).map(|(&n, sys)| gauss_rule(sys, n)).collect::<Result<Vec<_>>>()?;

    let mut value = 0.0;
    let mut idx = vec![0usize; d];
    'grid: loop {
        let z: Vec<f64> = idx.iter().enumerate().map(|(i, &j)| rules[i].nodes[j]).collect();
        let w: f64 = idx.iter().enumerate().map(|(i, &j)| rules[i].weights[j]).product();
        value += f.eval(&z)? * w;
        for i in (0..d).rev() {
            idx[i] += 1;
            if idx[i] < counts[i] {
                continue 'grid;
            }
            idx[i] = 0;
        }
        break;
    }

    let exact = exact_expectation_mono(f, systems)?;
    let mut rem = f.clone();
    let mut error_terms = Vec::with_capacity(d);
    for (k, (&n, sys)) in counts.iter().zip(systems).enumerate() {
        let pi_n = pi_monomial(sys, n)?;
        let (q, r) = divide_in(&rem, k, &pi_n)?;
        let mut target = MultiIndex::zero(d);
        target.0[k] = n;
        error_terms.push(q.to_ortho(systems)?.coeff(&target) * norm_sq(sys, n)?);
        rem = r;
    }
    Ok(GridExpectation { value, exact, error: exact - value, error_terms })
}

fn pi_monomial(sys: &RecurrenceSystem, n: usize) -> Result<UniPoly> {
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    crate::ortho::ortho_to_monomial(sys, &UniPoly::ortho(coeffs))
}
