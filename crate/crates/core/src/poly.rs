//! Sparse multivariate polynomials over monomials and product orthogonal
//! bases, multi-indices and term orders.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ortho::{eval_pi_upto, monomial_table, pi_table, RecurrenceSystem};
use crate::snap;

/// Coefficients below this magnitude are dropped after arithmetic.
pub const CLEANUP: f64 = 1e-12;

/// Exponent vector `α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// The `i`-th unit vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[usize] {
        &self.0
    }

    /// Componentwise `self ≤ other`, i.e. `x^self` divides `x^other`.
    pub fn divides(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self + e_i`.
    pub fn bump(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] += 1;
        Self(e)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<usize>> for MultiIndex {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    DegLex,
    DegRevLex,
}

impl OrderKind {
    pub fn is_degree_compatible(self) -> bool {
        !matches!(self, OrderKind::Lex)
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderKind::Lex => "lex",
            OrderKind::DegLex => "deglex",
            OrderKind::DegRevLex => "degrevlex",
        })
    }
}

impl std::str::FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lex" => Ok(OrderKind::Lex),
            "deglex" => Ok(OrderKind::DegLex),
            "degrevlex" | "drl" => Ok(OrderKind::DegRevLex),
            _ => Err(Error::Parse(format!("unknown term order `{s}`"))),
        }
    }
}

/// A term order on exponents of a fixed dimension.
///
/// `precedence[0]` is the most significant variable; the default is
/// `x1 ≻ x2 ≻ … ≻ xd`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermOrder {
    kind: OrderKind,
    precedence: Vec<usize>,
}

impl TermOrder {
    pub fn new(kind: OrderKind, dim: usize) -> Self {
        Self { kind, precedence: (0..dim).collect() }
    }

    pub fn deglex(dim: usize) -> Self {
        Self::new(OrderKind::DegLex, dim)
    }

    /// Order with an explicit variable precedence, which must be a
    /// permutation of `0..d`.
    pub fn with_precedence(kind: OrderKind, precedence: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; precedence.len()];
        for &v in &precedence {
            if v >= seen.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::Parse(format!("{precedence:?} is not a permutation")));
            }
        }
        Ok(Self { kind, precedence })
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.precedence.len()
    }

    pub fn precedence(&self) -> &[usize] {
        &self.precedence
    }

    /// Total order on exponents; panics on dimension mismatch, see [`compare`].
    pub fn cmp(&self, a: &MultiIndex, b: &MultiIndex) -> Ordering {
        compare(self, a, b).expect("exponent dimension does not match the term order")
    }

    /// Sorts exponents in descending order.
    pub fn sort_desc(&self, v: &mut [MultiIndex]) {
        v.sort_by(|a, b| self.cmp(b, a));
    }
}

/// Compares two exponents under `order`.
pub fn compare(order: &TermOrder, a: &MultiIndex, b: &MultiIndex) -> Result<Ordering> {
    let d = order.dim();
    for m in [a, b] {
        if m.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: m.dim() });
        }
    }
    let lex = || {
        order.precedence.iter().map(|&i| a.0[i].cmp(&b.0[i])).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
    };
    Ok(match order.kind {
        OrderKind::Lex => lex(),
        OrderKind::DegLex => a.total_degree().cmp(&b.total_degree()).then_with(lex),
        OrderKind::DegRevLex => a.total_degree().cmp(&b.total_degree()).then_with(|| {
            order
                .precedence
                .iter()
                .rev()
                .map(|&i| b.0[i].cmp(&a.0[i]))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        }),
    })
}

fn cleaned(terms: BTreeMap<MultiIndex, f64>) -> BTreeMap<MultiIndex, f64> {
    terms.into_iter().filter(|(_, c)| c.abs() > CLEANUP).collect()
}

fn check_dim(dim: usize, found: usize) -> Result<()> {
    if dim == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: dim, found })
    }
}

/// Polynomial `Σ a_α x^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoPoly {
    dim: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

/// Polynomial `Σ c_α π_α` with `π_α(x) = Π_i π^{(i)}_{α_i}(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoPoly {
    systems: Vec<RecurrenceSystem>,
    terms: BTreeMap<MultiIndex, f64>,
}

impl MonoPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_terms(dim, [(MultiIndex::zero(dim), c)]).expect("constant has the right dimension")
    }

    /// Builds a polynomial, summing repeated exponents and dropping
    /// negligible coefficients.
    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            check_dim(dim, e.dim())?;
            *map.entry(e).or_insert(0.0) += c;
        }
        Ok(Self { dim, terms: cleaned(map) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.terms
    }

    pub fn coeff(&self, e: &MultiIndex) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(MultiIndex::total_degree).max()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| c * e.0.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>())
            .sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        Self::from_terms(self.dim, self.terms.clone().into_iter().chain(other.terms.clone()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, terms: cleaned(self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect()) }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out: BTreeMap<MultiIndex, f64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *out.entry(a.add(b)).or_insert(0.0) += ca * cb;
            }
        }
        Ok(Self { dim: self.dim, terms: cleaned(out) })
    }

    /// Rewrites the polynomial in the product orthogonal basis of `systems`.
    pub fn to_ortho(&self, systems: &[RecurrenceSystem]) -> Result<OrthoPoly> {
        check_dim(self.dim, systems.len())?;
        let tables = per_coordinate_tables(systems, &self.terms, monomial_table)?;
        Ok(OrthoPoly { systems: systems.to_vec(), terms: tensor_apply(&self.terms, &tables) })
    }

    /// Terms in descending `order`.
    pub fn sorted_terms(&self, order: &TermOrder) -> Vec<(MultiIndex, f64)> {
        sorted(&self.terms, order)
    }
}

impl OrthoPoly {
    pub fn zero(systems: Vec<RecurrenceSystem>) -> Self {
        Self { systems, terms: BTreeMap::new() }
    }

    pub fn constant(systems: Vec<RecurrenceSystem>, c: f64) -> Self {
        let d = systems.len();
        Self::from_terms(systems, [(MultiIndex::zero(d), c)]).expect("constant has the right dimension")
    }

    pub fn from_terms(
        systems: Vec<RecurrenceSystem>,
        terms: impl IntoIterator<Item = (MultiIndex, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            check_dim(systems.len(), e.dim())?;
            *map.entry(e).or_insert(0.0) += c;
        }
        Ok(Self { systems, terms: cleaned(map) })
    }

    pub fn dim(&self) -> usize {
        self.systems.len()
    }

    pub fn systems(&self) -> &[RecurrenceSystem] {
        &self.systems
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, f64> {
        &self.terms
    }

    /// Fourier coefficient `c_α`.
    pub fn coeff(&self, e: &MultiIndex) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `|α|` in the support.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(MultiIndex::total_degree).max()
    }

    /// Largest exponent of the support under `order`.
    pub fn leading(&self, order: &TermOrder) -> Option<&MultiIndex> {
        self.terms.keys().max_by(|a, b| order.cmp(a, b))
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let Some(max) = self.max_exponents() else { return Ok(0.0) };
        let mut values = Vec::with_capacity(x.len());
        for ((sys, &xi), &m) in self.systems.iter().zip(x).zip(&max) {
            values.push(eval_pi_upto(sys, m, xi)?);
        }
        Ok(self
            .terms
            .iter()
            .map(|(e, c)| c * e.0.iter().enumerate().map(|(i, &k)| values[i][k]).product::<f64>())
            .sum())
    }

    fn max_exponents(&self) -> Option<Vec<usize>> {
        if self.terms.is_empty() {
            return None;
        }
        let mut max = vec![0; self.dim()];
        for e in self.terms.keys() {
            for (m, &k) in max.iter_mut().zip(&e.0) {
                *m = (*m).max(k);
            }
        }
        Some(max)
    }

    fn same_systems(&self, other: &Self) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        if self.systems != other.systems {
            return Err(Error::WrongBasis("orthogonal polynomials over different systems"));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_systems(other)?;
        Self::from_terms(self.systems.clone(), self.terms.clone().into_iter().chain(other.terms.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            systems: self.systems.clone(),
            terms: cleaned(self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect()),
        }
    }

    /// Product, formed through the monomial basis.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_systems(other)?;
        self.to_mono()?.mul(&other.to_mono()?)?.to_ortho(&self.systems)
    }

    pub fn to_mono(&self) -> Result<MonoPoly> {
        let tables = per_coordinate_tables(&self.systems, &self.terms, pi_table)?;
        Ok(MonoPoly { dim: self.dim(), terms: tensor_apply(&self.terms, &tables) })
    }

    /// Terms in descending `order`.
    pub fn sorted_terms(&self, order: &TermOrder) -> Vec<(MultiIndex, f64)> {
        sorted(&self.terms, order)
    }

    /// Human-readable rendering such as `H_2(y) - H_1(x) + 2 H_1(y) - 4`,
    /// terms in descending `order`.
    pub fn render(&self, order: &TermOrder) -> String {
        let names = variable_names(self.dim());
        let terms = self.sorted_terms(order);
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (e, c)) in terms.iter().enumerate() {
            let factors: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(i, &p)| format!("{}_{}({})", self.systems[i].symbol(), p, names[i]))
                .collect();
            let mag = snap::format_number(c.abs(), 1000, 1e-12 * c.abs().max(1.0));
            let body = match (factors.is_empty(), mag.as_str()) {
                (true, _) => mag.clone(),
                (false, "1") => factors.join(" "),
                (false, _) => format!("{mag} {}", factors.join(" ")),
            };
            match (k, *c < 0.0) {
                (0, true) => out.push_str(&format!("-{body}")),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {body}")),
                (_, false) => out.push_str(&format!(" + {body}")),
            }
        }
        out
    }
}

/// `x, y, z` up to three variables, `x1 … xd` beyond.
pub fn variable_names(dim: usize) -> Vec<String> {
    if dim <= 3 {
        ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

fn sorted(terms: &BTreeMap<MultiIndex, f64>, order: &TermOrder) -> Vec<(MultiIndex, f64)> {
    let mut v: Vec<(MultiIndex, f64)> = terms.iter().map(|(e, c)| (e.clone(), *c)).collect();
    v.sort_by(|a, b| order.cmp(&b.0, &a.0));
    v
}

type Table = Vec<Vec<f64>>;

fn per_coordinate_tables(
    systems: &[RecurrenceSystem],
    terms: &BTreeMap<MultiIndex, f64>,
    build: fn(&RecurrenceSystem, usize) -> Result<Table>,
) -> Result<Vec<Table>> {
    let mut out = Vec::with_capacity(systems.len());
    for (i, sys) in systems.iter().enumerate() {
        let m = terms.keys().map(|e| e.0[i]).max().unwrap_or(0);
        out.push(build(sys, m)?);
    }
    Ok(out)
}

/// Applies a per-coordinate triangular change of basis: `tables[i][k][j]` is
/// the coefficient of the `j`-th target function in the `k`-th source one.
fn tensor_apply(terms: &BTreeMap<MultiIndex, f64>, tables: &[Table]) -> BTreeMap<MultiIndex, f64> {
    let mut out: BTreeMap<MultiIndex, f64> = BTreeMap::new();
    for (e, c) in terms {
        let mut partial: Vec<(Vec<usize>, f64)> = vec![(Vec::with_capacity(e.dim()), *c)];
        for (i, &k) in e.0.iter().enumerate() {
            let row = &tables[i][k];
            partial = partial
                .into_iter()
                .flat_map(|(idx, v)| {
                    row.iter().enumerate().filter(|(_, w)| **w != 0.0).map(move |(j, w)| {
                        let mut idx = idx.clone();
                        idx.push(j);
                        (idx, v * w)
                    })
                })
                .collect();
        }
        for (idx, v) in partial {
            *out.entry(MultiIndex(idx)).or_insert(0.0) += v;
        }
    }
    cleaned(out)
}

/// Either kind of polynomial, as read from JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoly {
    Mono(MonoPoly),
    Ortho(OrthoPoly),
}

impl AnyPoly {
    pub fn dim(&self) -> usize {
        match self {
            AnyPoly::Mono(p) => p.dim(),
            AnyPoly::Ortho(p) => p.dim(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            AnyPoly::Mono(p) => p.eval(x),
            AnyPoly::Ortho(p) => p.eval(x),
        }
    }

    pub fn to_ortho(&self, systems: &[RecurrenceSystem]) -> Result<OrthoPoly> {
        match self {
            AnyPoly::Mono(p) => p.to_ortho(systems),
            AnyPoly::Ortho(p) => {
                if p.systems() != systems {
                    return Err(Error::WrongBasis("orthogonal polynomial over different systems"));
                }
                Ok(p.clone())
            }
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    exps: Vec<usize>,
    coeff: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct PolyJson {
    basis: String,
    #[serde(default)]
    systems: Vec<String>,
    #[serde(default)]
    dim: Option<usize>,
    terms: Vec<TermJson>,
}

/// A parsed polynomial document together with its coordinate systems.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyDoc {
    pub poly: AnyPoly,
    /// Empty for monomial documents that name no systems.
    pub systems: Vec<RecurrenceSystem>,
}

impl PolyDoc {
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: PolyJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let systems = raw.systems.iter().map(|n| RecurrenceSystem::by_name(n)).collect::<Result<Vec<_>>>()?;
        let dim = match (raw.dim, systems.len(), raw.terms.first()) {
            (Some(d), _, _) => d,
            (None, n, _) if n > 0 => n,
            (None, _, Some(t)) => t.exps.len(),
            (None, _, None) => return Err(Error::Parse("cannot infer the dimension of an empty polynomial".into())),
        };
        if !systems.is_empty() {
            check_dim(dim, systems.len())?;
        }
        let terms = raw.terms.into_iter().map(|t| (MultiIndex(t.exps), t.coeff));
        let poly = match raw.basis.as_str() {
            "monomial" => AnyPoly::Mono(MonoPoly::from_terms(dim, terms)?),
            "ortho" => {
                if systems.is_empty() {
                    return Err(Error::Parse("an ortho polynomial must name its systems".into()));
                }
                AnyPoly::Ortho(OrthoPoly::from_terms(systems.clone(), terms)?)
            }
            other => return Err(Error::Parse(format!("unknown basis `{other}`"))),
        };
        Ok(Self { poly, systems })
    }

    /// JSON with terms in descending `order`.
    pub fn to_json_value(&self, order: &TermOrder) -> serde_json::Value {
        let (basis, terms) = match &self.poly {
            AnyPoly::Mono(p) => ("monomial", p.sorted_terms(order)),
            AnyPoly::Ortho(p) => ("ortho", p.sorted_terms(order)),
        };
        let raw = PolyJson {
            basis: basis.into(),
            systems: self.systems.iter().map(|s| s.name().to_string()).collect(),
            dim: None,
            terms: terms.into_iter().map(|(e, coeff)| TermJson { exps: e.0, coeff }).collect(),
        };
        serde_json::to_value(raw).expect("polynomial serializes")
    }
}
