//! Vanishing ideals of finite point sets, computed directly over a product
//! orthogonal basis with a Buchberger–Möller style elimination.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::ortho::{eval_pi, exact_pi_values, nodes, RecurrenceSystem};
use crate::poly::{MultiIndex, OrderKind, OrthoPoly, TermOrder, CLEANUP};

/// Points closer than this in the max-norm are considered equal.
pub const DISTINCT_TOL: f64 = 1e-10;

/// Largest integer design routed to exact rational elimination.
const EXACT_MAX_POINTS: usize = 100;

/// A finite set of distinct points with one orthogonal system per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    systems: Vec<RecurrenceSystem>,
    points: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DesignJson {
    dim: usize,
    systems: Vec<String>,
    points: Vec<Vec<f64>>,
}

impl Design {
    pub fn new(systems: Vec<RecurrenceSystem>, points: Vec<Vec<f64>>) -> Result<Self> {
        let d = systems.len();
        if d == 0 {
            return Err(Error::InvalidDesign("dimension must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(Error::InvalidDesign("a design needs at least one point".into()));
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.len() });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDesign("non-finite coordinate".into()));
            }
        }
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                let dist = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                if dist <= DISTINCT_TOL {
                    return Err(Error::InvalidDesign(format!("duplicate point {a:?}")));
                }
            }
        }
        Ok(Self { systems, points })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: DesignJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.systems.len() != raw.dim {
            return Err(Error::DimensionMismatch { expected: raw.dim, found: raw.systems.len() });
        }
        let systems = raw.systems.iter().map(|n| RecurrenceSystem::by_name(n)).collect::<Result<Vec<_>>>()?;
        Self::new(systems, raw.points)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(DesignJson {
            dim: self.dim(),
            systems: self.systems.iter().map(|s| s.name().to_string()).collect(),
            points: self.points.clone(),
        })
        .expect("design serializes")
    }

    pub fn dim(&self) -> usize {
        self.systems.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn systems(&self) -> &[RecurrenceSystem] {
        &self.systems
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    fn is_integer(&self) -> bool {
        self.points.iter().flatten().all(|v| v.fract() == 0.0 && v.abs() < 2f64.powi(53))
    }

    /// `π_α(z)` at every point.
    pub fn eval_column(&self, alpha: &MultiIndex) -> Result<DVector<f64>> {
        let mut col = DVector::from_element(self.len(), 1.0);
        for (r, z) in self.points.iter().enumerate() {
            for (i, (&k, sys)) in alpha.0.iter().zip(&self.systems).enumerate() {
                if k > 0 {
                    col[r] *= eval_pi(sys, k, z[i])?;
                }
            }
        }
        Ok(col)
    }

    /// Evaluation matrix `[π_β(z)]`, one row per point and one column per exponent.
    pub fn eval_matrix(&self, exps: &[MultiIndex]) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(self.len(), exps.len());
        for (j, e) in exps.iter().enumerate() {
            m.set_column(j, &self.eval_column(e)?);
        }
        Ok(m)
    }
}

/// Tensor product of the zero sets of `π_{n_i}` in each coordinate.
pub fn product_design(counts: &[usize], systems: &[RecurrenceSystem]) -> Result<Design> {
    if counts.len() != systems.len() {
        return Err(Error::DimensionMismatch { expected: systems.len(), found: counts.len() });
    }
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for (&n, sys) in counts.iter().zip(systems) {
        let zs = nodes(sys, n)?;
        points = points
            .into_iter()
            .flat_map(|p| {
                zs.iter().map(move |&z| {
                    let mut q = p.clone();
                    q.push(z);
                    q
                })
            })
            .collect();
    }
    Design::new(systems.to_vec(), points)
}

/// The standard exponents `L`, ascending in the term order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardSet {
    exps: Vec<MultiIndex>,
}

impl StandardSet {
    pub fn new(exps: Vec<MultiIndex>) -> Self {
        Self { exps }
    }

    pub fn exps(&self) -> &[MultiIndex] {
        &self.exps
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn contains(&self, e: &MultiIndex) -> bool {
        self.exps.contains(e)
    }

    /// Closed under taking componentwise smaller exponents.
    pub fn is_down_set(&self) -> bool {
        self.exps.iter().all(|e| {
            (0..e.dim()).filter(|&i| e.0[i] > 0).all(|i| {
                let mut f = e.clone();
                f.0[i] -= 1;
                self.contains(&f)
            })
        })
    }
}

/// Residual thresholds of the elimination: a candidate is independent when
/// its least-squares residual exceeds `max(abs, rel · ‖[π_α(z)]‖₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-8, rel: 1e-10 }
    }
}

impl Tolerance {
    pub fn threshold(&self, norm: f64) -> f64 {
        self.abs.max(self.rel * norm)
    }

    fn validate(&self) -> Result<()> {
        if self.abs > 0.0 && self.rel > 0.0 && self.abs.is_finite() && self.rel.is_finite() {
            Ok(())
        } else {
            Err(Error::Parse("tolerances must be positive and finite".into()))
        }
    }
}

/// Basis element `g = π_α − Σ_β b_β π_β` with `β` standard and `β < α`.
#[derive(Debug, Clone, PartialEq)]
pub struct GElement {
    pub leading: MultiIndex,
    pub tail: BTreeMap<MultiIndex, f64>,
}

/// Reduced Gröbner basis of a vanishing ideal in orthogonal representation.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoGBasis {
    pub elements: Vec<GElement>,
    pub order: TermOrder,
    pub standard: StandardSet,
    pub systems: Vec<RecurrenceSystem>,
    /// Candidates whose residual fell close to the threshold.
    pub warnings: Vec<String>,
    /// Whether the basis came from exact rational elimination.
    pub exact: bool,
}

impl OrthoGBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The `i`-th element as a polynomial.
    pub fn poly(&self, i: usize) -> OrthoPoly {
        let g = &self.elements[i];
        let terms = std::iter::once((g.leading.clone(), 1.0)).chain(g.tail.iter().map(|(b, c)| (b.clone(), -c)));
        OrthoPoly::from_terms(self.systems.clone(), terms).expect("basis exponents match the dimension")
    }

    pub fn polys(&self) -> Vec<OrthoPoly> {
        (0..self.len()).map(|i| self.poly(i)).collect()
    }

    pub fn leading_exps(&self) -> Vec<MultiIndex> {
        self.elements.iter().map(|g| g.leading.clone()).collect()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = BasisJson {
            order: self.order.kind(),
            precedence: self.order.precedence().to_vec(),
            systems: self.systems.iter().map(|s| s.name().to_string()).collect(),
            standard: self.standard.exps().to_vec(),
            elements: self
                .elements
                .iter()
                .enumerate()
                .map(|(i, g)| ElementJson {
                    leading: g.leading.clone(),
                    tail: self
                        .poly(i)
                        .sorted_terms(&self.order)
                        .into_iter()
                        .filter(|(e, _)| *e != g.leading)
                        .map(|(e, c)| TermJson { exps: e, coeff: -c })
                        .collect(),
                    text: self.poly(i).render(&self.order),
                })
                .collect(),
            exact: self.exact,
            warnings: self.warnings.clone(),
        };
        serde_json::to_value(raw).expect("basis serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: BasisJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let systems = raw.systems.iter().map(|n| RecurrenceSystem::by_name(n)).collect::<Result<Vec<_>>>()?;
        let order = TermOrder::with_precedence(raw.order, raw.precedence)?;
        let d = systems.len();
        if order.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, found: order.dim() });
        }
        let check = |e: &MultiIndex| {
            if e.dim() == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: d, found: e.dim() })
            }
        };
        let mut elements = Vec::with_capacity(raw.elements.len());
        for el in raw.elements {
            check(&el.leading)?;
            let mut tail = BTreeMap::new();
            for t in el.tail {
                check(&t.exps)?;
                tail.insert(t.exps, t.coeff);
            }
            elements.push(GElement { leading: el.leading, tail });
        }
        for e in &raw.standard {
            check(e)?;
        }
        Ok(Self {
            elements,
            order,
            standard: StandardSet::new(raw.standard),
            systems,
            warnings: raw.warnings,
            exact: raw.exact,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct TermJson {
    exps: MultiIndex,
    coeff: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ElementJson {
    leading: MultiIndex,
    /// Coefficients `b_β`, so that `g = π_leading − Σ b_β π_β`.
    tail: Vec<TermJson>,
    #[serde(default)]
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct BasisJson {
    order: OrderKind,
    precedence: Vec<usize>,
    systems: Vec<String>,
    standard: Vec<MultiIndex>,
    elements: Vec<ElementJson>,
    #[serde(default)]
    exact: bool,
    #[serde(default)]
    warnings: Vec<String>,
}

/// Candidate bookkeeping shared by the numeric and exact eliminations.
struct Candidates {
    pending: Vec<MultiIndex>,
    dim: usize,
}

impl Candidates {
    fn new(dim: usize) -> Self {
        Self { pending: (0..dim).map(|i| MultiIndex::unit(dim, i)).collect(), dim }
    }

    fn pop_min(&mut self, order: &TermOrder) -> Option<MultiIndex> {
        let pos = (0..self.pending.len()).min_by(|&a, &b| order.cmp(&self.pending[a], &self.pending[b]))?;
        Some(self.pending.swap_remove(pos))
    }

    /// `x_i x^α` for each `i`, unless already covered by a pending candidate
    /// or a leading exponent.
    fn extend(&mut self, alpha: &MultiIndex, leading: &[MultiIndex]) {
        for i in 0..self.dim {
            let c = alpha.bump(i);
            if !self.pending.iter().chain(leading).any(|m| m.divides(&c)) {
                self.pending.push(c);
            }
        }
    }

    fn purge_multiples(&mut self, alpha: &MultiIndex) {
        self.pending.retain(|m| !alpha.divides(m));
    }
}

fn check_order(design: &Design, order: &TermOrder) -> Result<()> {
    if order.dim() != design.dim() {
        return Err(Error::DimensionMismatch { expected: design.dim(), found: order.dim() });
    }
    Ok(())
}

/// Reduced Gröbner basis of the vanishing ideal of `design` and its standard
/// set. Integer designs of moderate size use exact rational elimination,
/// everything else the floating-point least-squares variant.
pub fn bm_ortho(design: &Design, order: &TermOrder, tol: Tolerance) -> Result<OrthoGBasis> {
    if design.is_integer() && design.len() <= EXACT_MAX_POINTS {
        bm_ortho_exact(design, order)
    } else {
        bm_ortho_numeric(design, order, tol)
    }
}

/// Floating-point elimination: each candidate `π_α` is regressed on the
/// current standard columns by column-pivoted QR.
pub fn bm_ortho_numeric(design: &Design, order: &TermOrder, tol: Tolerance) -> Result<OrthoGBasis> {
    check_order(design, order)?;
    tol.validate()?;
    let d = design.dim();
    let n = design.len();
    let mut standard = vec![MultiIndex::zero(d)];
    let mut matrix = design.eval_matrix(&standard)?;
    let mut elements: Vec<GElement> = Vec::new();
    let mut leading: Vec<MultiIndex> = Vec::new();
    let mut warnings = Vec::new();
    let mut cand = Candidates::new(d);

    while let Some(alpha) = cand.pop_min(order) {
        let v = design.eval_column(&alpha)?;
        let (b, residual) = linalg::least_squares(&matrix, &v)
            .ok_or_else(|| Error::Numeric(format!("least-squares solve failed at {alpha}")))?;
        let tau = tol.threshold(v.norm());
        if residual >= tau / 10.0 && residual <= tau {
            warnings.push(format!("residual {residual:.3e} of {alpha} is within a factor 10 of the threshold {tau:.3e}"));
        }
        if residual > tau && standard.len() < n {
            let last = matrix.ncols();
            matrix = matrix.insert_column(last, 0.0);
            matrix.set_column(last, &v);
            standard.push(alpha.clone());
            cand.extend(&alpha, &leading);
        } else {
            let tail = standard
                .iter()
                .zip(b.iter())
                .filter(|(_, c)| c.abs() > CLEANUP)
                .map(|(e, &c)| (e.clone(), c))
                .collect();
            cand.purge_multiples(&alpha);
            leading.push(alpha.clone());
            elements.push(GElement { leading: alpha, tail });
        }
    }
    finish(design, order, standard, elements, warnings, false)
}

/// Exact elimination over the rationals; requires rational coordinates,
/// which integer designs always have.
pub fn bm_ortho_exact(design: &Design, order: &TermOrder) -> Result<OrthoGBasis> {
    check_order(design, order)?;
    let d = design.dim();
    let exact_points: Vec<Vec<BigRational>> = design
        .points()
        .iter()
        .map(|p| p.iter().map(|&v| BigRational::from_float(v).expect("finite coordinate")).collect())
        .collect();
    let column = |alpha: &MultiIndex| -> Result<Vec<BigRational>> {
        let mut col = Vec::with_capacity(exact_points.len());
        for z in &exact_points {
            let mut v = BigRational::from_integer(1.into());
            for (i, &k) in alpha.0.iter().enumerate() {
                if k > 0 {
                    v *= exact_pi_values(&design.systems()[i], k, &z[i])?.swap_remove(k);
                }
            }
            col.push(v);
        }
        Ok(col)
    };

    // Echelon rows: `vec = Σ_j comb[j] · column(L_j)` with a pivot entry.
    struct Row {
        pivot: usize,
        vec: Vec<BigRational>,
        comb: Vec<BigRational>,
    }
    let mut rows: Vec<Row> = Vec::new();
    let mut standard: Vec<MultiIndex> = Vec::new();
    let mut elements: Vec<GElement> = Vec::new();
    let mut leading: Vec<MultiIndex> = Vec::new();
    let mut cand = Candidates::new(d);

    let reduce = |rows: &[Row], v: Vec<BigRational>, slots: usize| {
        let mut w = v;
        let mut comb = vec![BigRational::zero(); slots];
        for row in rows {
            if w[row.pivot].is_zero() {
                continue;
            }
            let f = &w[row.pivot] / &row.vec[row.pivot];
            for (wi, ri) in w.iter_mut().zip(&row.vec) {
                *wi -= &f * ri;
            }
            for (ci, ri) in comb.iter_mut().zip(&row.comb) {
                *ci -= &f * ri;
            }
        }
        (w, comb)
    };

    let admit = |rows: &mut Vec<Row>, standard: &mut Vec<MultiIndex>, alpha: MultiIndex, w: Vec<BigRational>, mut comb: Vec<BigRational>| {
        let pivot = w.iter().position(|c| !c.is_zero()).expect("independent column has a nonzero entry");
        comb.push(BigRational::from_integer(1.into()));
        for row in rows.iter_mut() {
            row.comb.resize(comb.len(), BigRational::zero());
        }
        rows.push(Row { pivot, vec: w, comb });
        standard.push(alpha);
    };

    admit(&mut rows, &mut standard, MultiIndex::zero(d), column(&MultiIndex::zero(d))?, Vec::new());
    while let Some(alpha) = cand.pop_min(order) {
        let (w, comb) = reduce(&rows, column(&alpha)?, standard.len());
        if w.iter().any(|c| !c.is_zero()) {
            admit(&mut rows, &mut standard, alpha.clone(), w, comb);
            cand.extend(&alpha, &leading);
        } else {
            // 0 = π_α + Σ comb_j π_{L_j} on the design.
            let tail = standard
                .iter()
                .zip(&comb)
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e.clone(), -c.to_f64().unwrap_or(f64::NAN)))
                .collect();
            cand.purge_multiples(&alpha);
            leading.push(alpha.clone());
            elements.push(GElement { leading: alpha, tail });
        }
    }
    finish(design, order, standard, elements, Vec::new(), true)
}

fn finish(
    design: &Design,
    order: &TermOrder,
    standard: Vec<MultiIndex>,
    elements: Vec<GElement>,
    warnings: Vec<String>,
    exact: bool,
) -> Result<OrthoGBasis> {
    if standard.len() != design.len() {
        return Err(Error::InconsistentStandardSet(format!(
            "{} standard exponents for {} points",
            standard.len(),
            design.len()
        )));
    }
    Ok(OrthoGBasis {
        elements,
        order: order.clone(),
        standard: StandardSet::new(standard),
        systems: design.systems().to_vec(),
        warnings,
        exact,
    })
}

fn square_matrix(design: &Design, standard: &StandardSet) -> Result<DMatrix<f64>> {
    if standard.len() != design.len() {
        return Err(Error::InconsistentStandardSet(format!(
            "{} standard exponents for {} points",
            standard.len(),
            design.len()
        )));
    }
    design.eval_matrix(standard.exps())
}

/// The element of the span of `{π_β : β ∈ L}` taking `values` on the design.
pub fn interpolate(design: &Design, values: &[f64], standard: &StandardSet) -> Result<OrthoPoly> {
    if values.len() != design.len() {
        return Err(Error::DimensionMismatch { expected: design.len(), found: values.len() });
    }
    let m = square_matrix(design, standard)?;
    let a = linalg::solve_square(&m, &DVector::from_column_slice(values))
        .ok_or_else(|| Error::InconsistentStandardSet("evaluation matrix is singular".into()))?;
    OrthoPoly::from_terms(design.systems().to_vec(), standard.exps().iter().cloned().zip(a.iter().copied()))
}

/// Lagrange polynomials `l_z` of every design point, in design order.
pub fn indicator_polynomials(design: &Design, standard: &StandardSet) -> Result<Vec<OrthoPoly>> {
    let m = square_matrix(design, standard)?;
    let n = design.len();
    let inv = linalg::solve_square_matrix(&m, &DMatrix::identity(n, n))
        .ok_or_else(|| Error::InconsistentStandardSet("evaluation matrix is singular".into()))?;
    inv.column_iter()
        .map(|col| {
            OrthoPoly::from_terms(design.systems().to_vec(), standard.exps().iter().cloned().zip(col.iter().copied()))
        })
        .collect()
}

/// Cubature weights `λ_z = E(l_z(X))`, in design order.
pub fn weights(design: &Design, order: &TermOrder) -> Result<Vec<f64>> {
    let basis = bm_ortho(design, order, Tolerance::default())?;
    weights_for(design, &basis.standard)
}

/// Weights for a standard set computed earlier.
pub fn weights_for(design: &Design, standard: &StandardSet) -> Result<Vec<f64>> {
    let zero = MultiIndex::zero(design.dim());
    Ok(indicator_polynomials(design, standard)?.iter().map(|l| l.coeff(&zero)).collect())
}

/// 2-norm condition number of the evaluation matrix of `L` on the design.
pub fn condition_number(design: &Design, standard: &StandardSet) -> Result<f64> {
    Ok(linalg::condition_number(&square_matrix(design, standard)?))
}
