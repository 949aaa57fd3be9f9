//! Helpers shared by the integration tests: an exact Buchberger–Möller
//! oracle over monomials and random rational designs.

#![allow(dead_code)]

use cubalg_core::{MonoPoly, MultiIndex, OrthoPoly, RecurrenceSystem, TermOrder};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn q(p: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

/// Exact solution of `a x = b` when it exists; `a` is `n × m` with full
/// column rank.
fn solve_exact(cols: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = b.len();
    let m = cols.len();
    // Augmented row-major matrix [A | b].
    let mut rows: Vec<Vec<Q>> = (0..n)
        .map(|i| cols.iter().map(|c| c[i].clone()).chain(std::iter::once(b[i].clone())).collect())
        .collect();
    let mut r = 0;
    let mut pivots = Vec::new();
    for c in 0..m {
        let Some(p) = (r..n).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v = &*v / &lead;
        }
        for i in 0..n {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pivot_row = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    assert_eq!(pivots.len(), m, "oracle columns must be independent");
    if rows[r..].iter().any(|row| !row[m].is_zero()) {
        return None;
    }
    Some((0..m).map(|i| rows[i][m].clone()).collect())
}

fn monomial_column(points: &[Vec<Q>], e: &MultiIndex) -> Vec<Q> {
    points
        .iter()
        .map(|z| {
            z.iter().zip(e.exps()).fold(Q::one(), |acc, (x, &k)| {
                let mut v = acc;
                for _ in 0..k {
                    v *= x;
                }
                v
            })
        })
        .collect()
}

/// Reduced Gröbner basis of the vanishing ideal of `points` in the monomial
/// basis, by the classical border-driven Buchberger–Möller loop.
/// Returns `(leading, tail b_β)` pairs with `g = x^α − Σ b_β x^β`, and `L`.
/// `(leading exponent, tail coefficients)` of one basis element.
pub type OracleElement = (MultiIndex, Vec<(MultiIndex, Q)>);

pub fn monomial_bm(points: &[Vec<Q>], order: &TermOrder) -> (Vec<OracleElement>, Vec<MultiIndex>) {
    let d = points[0].len();
    let mut standard = vec![MultiIndex::zero(d)];
    let mut cols = vec![monomial_column(points, &standard[0])];
    let mut basis: Vec<OracleElement> = Vec::new();
    loop {
        let mut border: Vec<MultiIndex> = standard
            .iter()
            .flat_map(|t| (0..d).map(move |i| t.bump(i)))
            .filter(|c| !standard.contains(c))
            .filter(|c| !basis.iter().any(|(lt, _)| lt.divides(c)))
            .collect();
        border.sort_by(|a, b| order.cmp(a, b));
        border.dedup();
        let Some(next) = border.into_iter().next() else { break };
        let v = monomial_column(points, &next);
        match solve_exact(&cols, &v) {
            Some(b) => basis.push((next, standard.iter().cloned().zip(b).filter(|(_, c)| !c.is_zero()).collect())),
            None => {
                standard.push(next);
                cols.push(v);
            }
        }
    }
    basis.sort_by(|a, b| order.cmp(&a.0, &b.0));
    standard.sort_by(|a, b| order.cmp(a, b));
    (basis, standard)
}

/// Converts an oracle element to the orthogonal basis.
pub fn to_ortho(systems: &[RecurrenceSystem], leading: &MultiIndex, tail: &[(MultiIndex, Q)]) -> OrthoPoly {
    let d = systems.len();
    let terms = std::iter::once((leading.clone(), 1.0)).chain(tail.iter().map(|(e, c)| (e.clone(), -c.to_f64().unwrap())));
    MonoPoly::from_terms(d, terms).unwrap().to_ortho(systems).unwrap()
}

/// Distinct points with coordinates `p/q`, `|p| ≤ 3q`, `q ≤ 3`.
pub fn random_rational_design(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<Vec<Q>> {
    let mut pts: Vec<Vec<Q>> = Vec::new();
    while pts.len() < n {
        let p: Vec<Q> = (0..d)
            .map(|_| {
                let den = rng.random_range(1..=3i64);
                q(rng.random_range(-3 * den..=3 * den), den)
            })
            .collect();
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

pub fn to_f64_points(points: &[Vec<Q>]) -> Vec<Vec<f64>> {
    points.iter().map(|p| p.iter().map(|c| c.to_f64().unwrap()).collect()).collect()
}

/// `E(X^k)` by the moments of each built-in law, as an independent check
/// on the recurrence machinery.
pub fn moment(sys: &str, k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    match sys {
        "hermite" => (1..k).step_by(2).map(|i| i as f64).product(),
        "legendre" => 1.0 / (k as f64 + 1.0),
        _ => unreachable!(),
    }
}

pub fn mi(v: &[usize]) -> MultiIndex {
    MultiIndex::from(v.to_vec())
}

/// Random Fourier-coefficient polynomial with `nterms` terms of total degree
/// at most `max_deg`.
pub fn random_ortho(rng: &mut ChaCha8Rng, systems: &[RecurrenceSystem], max_deg: usize, nterms: usize) -> OrthoPoly {
    let d = systems.len();
    let terms: Vec<(MultiIndex, f64)> = (0..nterms)
        .map(|_| {
            let mut e = vec![0usize; d];
            for _ in 0..rng.random_range(0..=max_deg) {
                e[rng.random_range(0..d)] += 1;
            }
            (MultiIndex::from(e), rng.random_range(-2.0..2.0))
        })
        .collect();
    OrthoPoly::from_terms(systems.to_vec(), terms).unwrap()
}

/// Distinct random points on a half-integer grid in `[-3, 3]^d`.
pub fn random_grid_design(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = Vec::new();
    while pts.len() < n {
        let p: Vec<f64> = (0..d).map(|_| rng.random_range(-6..=6) as f64 / 2.0).collect();
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// Monomial coefficients of `π_n`, lowest degree first.
pub fn pi_monomial(sys: &RecurrenceSystem, n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let p = cubalg_core::ortho_to_monomial(sys, &cubalg_core::UniPoly::ortho(c)).unwrap();
    (0..=n).map(|k| p.coeff(k)).collect()
}

/// `E(p(X))` for a monomial-coefficient vector, via the moments.
pub fn expect_monomial(sys: &str, coeffs: &[f64]) -> f64 {
    coeffs.iter().enumerate().map(|(k, c)| c * moment(sys, k)).sum()
}
