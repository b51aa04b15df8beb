//! Singular and cosingular vectors, the PBW-to-Fock matrix `C(N, j)` and its
//! determinant, and graded submodule closures.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::currents::Realization;
use crate::error::{Error, Result};
use crate::exact::{int, interpolate_poly, product_series, rat, to_i64, Factor, Matrix, Poly, Progression, Rat, Span};
use crate::fock::{FockVector, GradedBasis, ModuleParams, SectorLabel, WeightLabel};

/// Largest `N` for which the cosingular report also interpolates
/// `det C(N, j)` to certify that its zero is of first order.
pub const DET_POLY_MAX_DEGREE: u64 = 4;

/// `Π_{a≥1} 1/((1-x^a)(1-x^{2a-1}))`, the graded dimension of `U(n₋)`.
pub fn verma_factors() -> Vec<Factor> {
    vec![Factor::inverse(Progression::ALL), Factor::inverse(Progression::ODD)]
}

/// `g(N)` for `N = 0..=order`.
pub fn verma_dimensions(order: usize) -> Vec<usize> {
    product_series(&verma_factors(), order)
        .coeffs
        .iter()
        .map(|c| to_i64(c).expect("integer coefficient") as usize)
        .collect()
}

/// A PBW monomial `β_{-a_1}^{e_1} ⋯ x_{-b_1}^{f_1} ⋯` of the lowering
/// subalgebra, `β` modes odd. Parts are stored by mode ascending (largest
/// `a` first), and the operator product is read in that order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PbwMonomial {
    pub beta: Vec<(u64, u32)>,
    pub x: Vec<(u64, u32)>,
}

impl PbwMonomial {
    pub fn degree(&self) -> u64 {
        self.beta.iter().chain(&self.x).map(|(a, e)| a * *e as u64).sum()
    }

    pub fn x_count(&self) -> usize {
        self.x.iter().map(|(_, e)| *e as usize).sum()
    }

    /// Applies the monomial to `v`, rightmost factor first.
    pub fn apply(&self, r: &Realization, v: &FockVector, twist: bool) -> FockVector {
        let mut out = v.clone();
        for &(b, e) in self.x.iter().rev() {
            for _ in 0..e {
                out = r.act_x(-(b as i64), &out, twist);
            }
        }
        for &(a, e) in self.beta.iter().rev() {
            for _ in 0..e {
                out = r.act_beta(-(a as i64), &out).expect("odd beta mode");
            }
        }
        out
    }
}

impl fmt::Display for PbwMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s: Vec<String> = Vec::new();
        for (a, e) in &self.beta {
            s.push(format!("beta_-{a}^{e}"));
        }
        for (b, e) in &self.x {
            s.push(format!("x_-{b}^{e}"));
        }
        if s.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", s.join(" "))
        }
    }
}

/// Partitions of `n` with parts from `parts` (descending), as `(part, mult)`.
fn partitions(n: u64, parts: &[u64]) -> Vec<Vec<(u64, u32)>> {
    fn go(rest: u64, parts: &[u64], acc: &mut Vec<(u64, u32)>, out: &mut Vec<Vec<(u64, u32)>>) {
        if rest == 0 {
            out.push(acc.clone());
            return;
        }
        let Some((&p, tail)) = parts.split_first() else {
            return;
        };
        go(rest, tail, acc, out);
        let mut e = 1;
        while e * p <= rest {
            acc.push((p, e as u32));
            go(rest - e * p, tail, acc, out);
            acc.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    go(n, parts, &mut Vec::new(), &mut out);
    out
}

/// Degree-`n` PBW monomials, those with more `β` weight first; there are
/// `g(n)` of them.
pub fn enumerate_pbw(n: u64) -> Vec<PbwMonomial> {
    let odd: Vec<u64> = (1..=n).rev().filter(|a| a % 2 == 1).collect();
    let all: Vec<u64> = (1..=n).rev().collect();
    let mut out = Vec::new();
    for nb in (0..=n).rev() {
        for beta in partitions(nb, &odd) {
            for x in partitions(n - nb, &all) {
                out.push(PbwMonomial { beta: beta.clone(), x });
            }
        }
    }
    out
}

/// `C(N, j)`: rows are PBW monomials applied to `ν_j`, columns the Fock basis.
pub fn matrix_c(r: &Realization, n: u64, j: &Rat) -> Matrix {
    let sector = SectorLabel::new(r.params().clone(), j.clone());
    let basis = GradedBasis::new(n);
    let vac = FockVector::vacuum(sector);
    let rows = enumerate_pbw(n)
        .iter()
        .map(|pbw| pbw.apply(r, &vac, false).coords(&basis))
        .collect();
    Matrix::from_rows(rows)
}

pub fn det_c_at(r: &Realization, n: u64, j: &Rat) -> Rat {
    matrix_c(r, n, j).determinant()
}

/// `{ j_{r,s/2} : r ≥ 1, s odd, rs ≤ N }` with multiplicities `g(N - rs)`,
/// coinciding roots merged.
pub fn lemma_prediction(params: &ModuleParams, n: u64) -> Vec<(Rat, usize)> {
    let g = verma_dimensions(n as usize);
    let mut roots: BTreeMap<Rat, usize> = BTreeMap::new();
    for s in (1..=n).step_by(2) {
        for r in 1..=n / s {
            let j = params.j_label(&int(r as i64), &rat(s as i64, 2));
            *roots.entry(j).or_default() += g[(n - r * s) as usize];
        }
    }
    roots.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetCReport {
    pub n: u64,
    pub poly: Poly,
    pub monic: Poly,
    /// Leading coefficient; the determinant is `constant × monic`.
    pub constant: Rat,
    pub roots: Vec<(Rat, usize)>,
    pub total_degree: usize,
    pub predicted: Vec<(Rat, usize)>,
    pub predicted_degree: usize,
    /// Degree of the factor without rational roots (0 when the
    /// determinant splits completely).
    pub cofactor_degree: usize,
    pub lemma_match: bool,
}

/// `det C(N, j)` as a polynomial in `j`, recovered by interpolation at
/// `j = start, start + 1, …`, and compared with the predicted factorization.
pub fn det_c(r: &Realization, n: u64, start: &Rat) -> Result<DetCReport> {
    if n == 0 {
        return Err(Error::InvalidParams("det C needs N >= 1".into()));
    }
    let bound: usize = enumerate_pbw(n).iter().map(PbwMonomial::x_count).sum();
    let samples: Vec<(Rat, Rat)> = (0..=bound as i64)
        .into_par_iter()
        .map(|i| {
            let j = start + int(i);
            let d = det_c_at(r, n, &j);
            (j, d)
        })
        .collect();
    let poly = interpolate_poly(&samples, bound)?;
    let constant = poly
        .leading()
        .cloned()
        .ok_or_else(|| Error::InvalidParams("det C vanishes identically".into()))?;
    let monic = poly.monic();
    let (roots, cofactor) = monic.rational_roots()?;
    let total_degree = poly.degree().unwrap_or(0);
    let predicted = lemma_prediction(r.params(), n);
    let predicted_degree = predicted.iter().map(|(_, m)| m).sum();
    let lemma_match = roots == predicted && total_degree == predicted_degree && !constant.is_zero();
    Ok(DetCReport {
        n,
        poly,
        monic,
        constant,
        roots,
        total_degree,
        predicted,
        predicted_degree,
        cofactor_degree: cofactor.degree().unwrap_or(0),
        lemma_match,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenfunReport {
    pub order: usize,
    /// `Σ_k k f(N, k)`
    pub weighted: Vec<Rat>,
    /// `Σ_{a odd} x^a/(1-x^a) · Π 1/((1-x^b)(1-x^{2b-1}))`
    pub product_side: Vec<Rat>,
    /// `Σ_{r≥1, s odd, rs≤N} g(N - rs)`
    pub lemma_side: Vec<Rat>,
    pub equal: bool,
}

/// Expands `Π_a 1/((1-x^a)(1-y x^{2a-1}))` to `f(N, k)`, `N ≤ order`.
pub fn bivariate_counts(order: usize) -> Vec<Vec<Rat>> {
    let mut c = vec![vec![Rat::zero(); order + 1]; order + 1];
    c[0][0] = Rat::one();
    for a in 1..=order {
        for n in a..=order {
            for k in 0..=order {
                let prev = c[n - a][k].clone();
                c[n][k] += prev;
            }
        }
    }
    for e in (1..=order).step_by(2) {
        for n in e..=order {
            for k in 1..=order {
                let prev = c[n - e][k - 1].clone();
                c[n][k] += prev;
            }
        }
    }
    c
}

pub fn genfun_identity_check(order: usize) -> GenfunReport {
    let f = bivariate_counts(order);
    let weighted: Vec<Rat> = f
        .iter()
        .map(|row| row.iter().enumerate().map(|(k, c)| c * int(k as i64)).sum())
        .collect();
    let verma = product_series(&verma_factors(), order).coeffs;
    let mut lambert = vec![Rat::zero(); order + 1];
    for a in (1..=order).step_by(2) {
        for n in (a..=order).step_by(a) {
            lambert[n] += Rat::one();
        }
    }
    let product_side: Vec<Rat> = (0..=order)
        .map(|n| (0..=n).map(|i| &lambert[i] * &verma[n - i]).sum())
        .collect();
    let g = verma_dimensions(order);
    let lemma_side: Vec<Rat> = (0..=order)
        .map(|n| {
            let mut total = 0usize;
            for s in (1..=n).step_by(2) {
                for r in 1..=n / s {
                    total += g[n - r * s];
                }
            }
            int(total as i64)
        })
        .collect();
    let equal = weighted == product_side && product_side == lemma_side;
    GenfunReport { order, weighted, product_side, lemma_side, equal }
}

/// A vector annihilated by the raising subalgebra, with its `x_0` eigenvalue
/// (for the twisted action when requested).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVector {
    pub vector: FockVector,
    pub degree: u64,
    pub x0_eigenvalue: Rat,
}

/// Solves `Σ c_i basis_i = y`; `None` when `y` is outside the span.
fn coordinates_in(basis: &[Vec<Rat>], y: &[Rat]) -> Option<Vec<Rat>> {
    let n = basis.len();
    let dim = y.len();
    let rows: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rat> = basis.iter().map(|b| b[i].clone()).collect();
            row.push(y[i].clone());
            row
        })
        .collect();
    let mut m = Matrix::from_rows(rows);
    let pivots = m.rref();
    if pivots.contains(&n) {
        return None;
    }
    let mut c = vec![Rat::zero(); n];
    for (r, &p) in pivots.iter().enumerate() {
        c[p] = m.get(r, n).clone();
    }
    Some(c)
}

/// Diagonalizes an operator on the span of `basis` (which it must preserve).
/// Returns eigenvalue/eigenvector pairs, eigenvalues ascending.
fn diagonalize(basis: &[Vec<Rat>], apply: impl Fn(&[Rat]) -> Vec<Rat>) -> Result<Vec<(Rat, Vec<Rat>)>> {
    let d = basis.len();
    if d == 0 {
        return Ok(Vec::new());
    }
    let cols: Vec<Vec<Rat>> = basis
        .iter()
        .map(|b| coordinates_in(basis, &apply(b)).ok_or(Error::NotDiagonalizable))
        .collect::<Result<_>>()?;
    let a = Matrix::from_rows((0..d).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect());
    let shifted = |lambda: &Rat| {
        let mut m = a.clone();
        for i in 0..d {
            let v = m.get(i, i) - lambda;
            m.set(i, i, v);
        }
        m
    };
    let samples: Vec<(Rat, Rat)> = (0..=d as i64).map(|t| (int(t), shifted(&int(t)).determinant())).collect();
    let charpoly = interpolate_poly(&samples, d)?;
    let (roots, _) = charpoly.rational_roots()?;
    let mut out = Vec::new();
    for (lambda, _) in roots {
        for c in shifted(&lambda).nullspace() {
            let v = (0..basis[0].len())
                .map(|i| basis.iter().zip(&c).map(|(b, ci)| &b[i] * ci).sum())
                .collect();
            out.push((lambda.clone(), v));
        }
    }
    if out.len() != d {
        return Err(Error::NotDiagonalizable);
    }
    Ok(out)
}

/// Graded subspace with one echelon span per degree.
#[derive(Clone, Debug)]
pub struct Closure {
    sector: SectorLabel,
    bases: Vec<GradedBasis>,
    spans: Vec<Span>,
}

impl Closure {
    pub fn empty(sector: SectorLabel, top: u64) -> Self {
        let bases: Vec<GradedBasis> = (0..=top).map(GradedBasis::new).collect();
        let spans = bases.iter().map(|b| Span::new(b.len())).collect();
        Closure { sector, bases, spans }
    }

    pub fn top(&self) -> u64 {
        self.bases.len() as u64 - 1
    }

    pub fn dims(&self) -> Vec<usize> {
        self.spans.iter().map(Span::dim).collect()
    }

    pub fn span(&self, degree: u64) -> &Span {
        &self.spans[degree as usize]
    }

    pub fn contains(&self, v: &FockVector) -> bool {
        v.components().iter().all(|(d, c)| {
            *d <= self.top() && self.spans[*d as usize].contains(&c.coords(&self.bases[*d as usize]))
        })
    }

    fn vector(&self, degree: u64, coords: &[Rat]) -> FockVector {
        FockVector::from_coords(self.sector.clone(), &self.bases[degree as usize], coords)
    }

    fn insert(&mut self, v: &FockVector) -> Option<u64> {
        let d = v.homogeneous_degree()?;
        if d > self.top() {
            return None;
        }
        let coords = v.coords(&self.bases[d as usize]);
        self.spans[d as usize].insert(&coords).then_some(d)
    }
}

/// Submodule generated by homogeneous vectors, exact through degree `max_n`.
///
/// The enveloping algebra factors as `U(n₋) U(h) U(n₊)`, so the closure is
/// built in three passes: raising operators `x_1, β_1` (which generate
/// `n₊`), then `x_0`, then lowering operators `x_{-1}, β_{-1}`. Each pass
/// only moves degrees in one direction, so truncating at `max_n` is exact.
pub fn submodule_closure(r: &Realization, sector: &SectorLabel, generators: &[FockVector], max_n: u64) -> Closure {
    let gen_top = generators.iter().filter_map(FockVector::homogeneous_degree).max().unwrap_or(0);
    let mut closure = Closure::empty(sector.clone(), max_n.max(gen_top));
    let mut work: Vec<FockVector> = Vec::new();
    for g in generators {
        assert!(g.is_zero() || g.homogeneous_degree().is_some(), "generators must be homogeneous");
        if closure.insert(g).is_some() {
            work.push(g.clone());
        }
    }
    let pass = |closure: &mut Closure, ops: &[&dyn Fn(&FockVector) -> FockVector], seed: Vec<FockVector>| {
        let mut work = seed;
        while let Some(v) = work.pop() {
            for op in ops {
                let w = op(&v);
                if !w.is_zero() && closure.insert(&w).is_some() {
                    work.push(w);
                }
            }
        }
    };
    let raise_x = |v: &FockVector| r.act_x(1, v, false);
    let raise_b = |v: &FockVector| r.act_beta(1, v).expect("odd mode");
    pass(&mut closure, &[&raise_x, &raise_b], work);

    let all = |c: &Closure| -> Vec<FockVector> {
        (0..=c.top())
            .flat_map(|d| c.spans[d as usize].basis().iter().map(move |b| (d, b.clone())))
            .map(|(d, b)| c.vector(d, &b))
            .collect()
    };
    let zero_mode = |v: &FockVector| r.act_x(0, v, false);
    let seed = all(&closure);
    pass(&mut closure, &[&zero_mode], seed);

    let lower_x = |v: &FockVector| r.act_x(-1, v, false);
    let lower_b = |v: &FockVector| r.act_beta(-1, v).expect("odd mode");
    let seed = all(&closure);
    pass(&mut closure, &[&lower_x, &lower_b], seed);
    closure
}

/// Vectors of degree `n` whose images under `x_1` and `β_1` lie in `modulo`
/// (zero when `modulo` is `None`), taken modulo `modulo` itself, and
/// diagonalized under `x_0`.
fn singular_space(
    r: &Realization,
    sector: &SectorLabel,
    n: u64,
    twist: bool,
    modulo: Option<&Closure>,
) -> Result<Vec<KernelVector>> {
    let basis = GradedBasis::new(n);
    let reduce = |d: u64, v: &FockVector| -> Vec<Rat> {
        let b = GradedBasis::new(d);
        let c = v.coords(&b);
        match modulo {
            Some(cl) if d <= cl.top() => cl.span(d).reduce(&c),
            _ => c,
        }
    };
    let mut columns: Vec<Vec<Rat>> = Vec::with_capacity(basis.len());
    for m in basis.monomials() {
        let v = FockVector::monomial(sector.clone(), m.clone(), Rat::one());
        if n == 0 {
            columns.push(Vec::new());
            continue;
        }
        let mut col = reduce(n - 1, &r.act_x(1, &v, twist));
        col.extend(reduce(n - 1, &r.act_beta(1, &v)?));
        columns.push(col);
    }
    let kernel: Vec<Vec<Rat>> = if n == 0 {
        vec![vec![Rat::one()]]
    } else {
        let rows = columns[0].len();
        Matrix::from_rows((0..rows).map(|i| columns.iter().map(|c| c[i].clone()).collect()).collect()).nullspace()
    };
    // Representatives modulo the submodule.
    let mut reps = Span::new(basis.len());
    if let Some(cl) = modulo {
        for b in cl.span(n).basis() {
            reps.insert(b);
        }
    }
    let base_dim = reps.dim();
    let mut chosen: Vec<Vec<Rat>> = Vec::new();
    for k in kernel {
        if reps.insert(&k) {
            chosen.push(match modulo {
                Some(cl) => cl.span(n).reduce(&k),
                None => k,
            });
        }
    }
    debug_assert_eq!(reps.dim() - base_dim, chosen.len());
    let x0 = |c: &[Rat]| -> Vec<Rat> {
        let v = FockVector::from_coords(sector.clone(), &basis, c);
        reduce(n, &r.act_x(0, &v, twist))
    };
    Ok(diagonalize(&chosen, x0)?
        .into_iter()
        .map(|(lambda, c)| KernelVector {
            vector: FockVector::from_coords(sector.clone(), &basis, &c),
            degree: n,
            x0_eigenvalue: lambda,
        })
        .collect())
}

/// Basis of `{ v ∈ F_j[N] : x_1 v = β_1 v = 0 }`, each vector an `x_0`
/// eigenvector. Every returned vector is re-checked against all `x_n`, `β_n`
/// with `0 < n ≤ N`.
pub fn annihilator_kernel(r: &Realization, sector: &SectorLabel, n: u64, twist: bool) -> Result<Vec<KernelVector>> {
    let out = singular_space(r, sector, n, twist, None)?;
    for kv in &out {
        for m in 1..=n as i64 {
            assert!(r.act_x(m, &kv.vector, twist).is_zero(), "x_{m} does not annihilate {}", kv.vector);
            if m % 2 == 1 {
                assert!(r.act_beta(m, &kv.vector)?.is_zero(), "beta_{m} does not annihilate {}", kv.vector);
            }
        }
    }
    Ok(out)
}

/// Singular vectors of the quotient `F_j / closure` at degree `n`.
pub fn quotient_singular(r: &Realization, sector: &SectorLabel, n: u64, closure: &Closure) -> Result<Vec<KernelVector>> {
    singular_space(r, sector, n, false, Some(closure))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosingularVector {
    pub degree: u64,
    /// `j` of the weight `Λ_j` carried by the cosingular vector.
    pub weight_j: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosingularReport {
    pub sector: SectorLabel,
    pub max_n: u64,
    pub found: Vec<CosingularVector>,
    /// Smallest `N ≤ max_n` with `det C(N, j) = 0`.
    pub det_zero_degree: Option<u64>,
    /// Multiplicity of `j` as a root of `det C(N, j)` at that degree, when
    /// the polynomial was interpolated.
    pub det_root_multiplicity: Option<usize>,
    pub consistent: bool,
}

/// Cosingular vectors of `F_j` through degree `max_n`.
///
/// The contragredient of `F_j` is identified with `F_{-j}` carrying the
/// `σ`-twisted action, so singular vectors of that twisted module are the
/// duals of cosingular vectors of `F_j`, with the same weight. Their
/// twisted `x_0` eigenvalue is the `j` of that weight.
pub fn cosingular_report(r: &Realization, sector: &SectorLabel, max_n: u64) -> Result<CosingularReport> {
    let dual = sector.negated();
    let mut found = Vec::new();
    for n in 1..=max_n {
        for kv in annihilator_kernel(r, &dual, n, true)? {
            found.push(CosingularVector { degree: n, weight_j: kv.x0_eigenvalue });
        }
    }
    let det_zero_degree = (1..=max_n).find(|&n| det_c_at(r, n, &sector.j).is_zero());
    let det_root_multiplicity = match det_zero_degree {
        Some(n) if n <= DET_POLY_MAX_DEGREE => {
            let rep = det_c(r, n, &int(0))?;
            Some(rep.roots.iter().find(|(x, _)| x == &sector.j).map_or(0, |(_, m)| *m))
        }
        _ => None,
    };
    let first_found = found.first().map(|c| c.degree);
    let consistent = first_found == det_zero_degree && det_root_multiplicity.unwrap_or(1) == 1;
    Ok(CosingularReport { sector: sector.clone(), max_n, found, det_zero_degree, det_root_multiplicity, consistent })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VectorKind {
    /// Singular vectors `u_i` of the Fock module.
    U,
    /// Singular vectors `v_i` of the quotient by the `u`-submodule.
    V,
    /// Cosingular vectors `w_i`.
    W,
}

impl fmt::Display for VectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VectorKind::U => "u",
            VectorKind::V => "v",
            VectorKind::W => "w",
        };
        write!(f, "{s}")
    }
}

/// A predicted diagram vertex and whether it was seen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCheck {
    pub kind: VectorKind,
    pub index: i64,
    pub weight: WeightLabel,
    pub degree: u64,
    /// `None` when the degree lies beyond the search bound.
    pub found: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeFinding {
    pub kind: VectorKind,
    pub degree: u64,
    pub weight_j: Rat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureStatus {
    Pass,
    Fail,
    Inconclusive,
    /// Nothing singular or cosingular below the bound.
    Generic,
}

impl fmt::Display for StructureStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StructureStatus::Pass => "pass",
            StructureStatus::Fail => "fail",
            StructureStatus::Inconclusive => "inconclusive",
            StructureStatus::Generic => "generic",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub sector: SectorLabel,
    pub max_n: u64,
    /// Fock dimensions per degree.
    pub fock_dims: Vec<usize>,
    /// Dimensions of the annihilator kernel per degree (vacuum included).
    pub singular_dims: Vec<usize>,
    pub found: Vec<DegreeFinding>,
    pub predicted: Vec<VertexCheck>,
    /// Findings with no predicted vertex at that degree and weight.
    pub unexpected: Vec<DegreeFinding>,
    /// Graded dimensions of the submodule generated by `ν_j`.
    pub vacuum_closure_dims: Vec<usize>,
    /// Graded dimensions of the submodule generated by the `u_i`.
    pub singular_closure_dims: Vec<usize>,
    /// `u_1` lies in the submodule generated by the vacuum (`v_0 → u_1`),
    /// `None` if out of reach.
    pub arrow_v0_u1: Option<bool>,
    /// `w_0` is not generated by the vacuum, `None` if out of reach.
    pub w0_outside_vacuum_module: Option<bool>,
    pub status: StructureStatus,
}

impl StructureReport {
    /// `dim M_{v_0} - dim M_{u}` per degree.
    pub fn irreducible_quotient_dims(&self) -> Vec<usize> {
        self.vacuum_closure_dims
            .iter()
            .zip(&self.singular_closure_dims)
            .map(|(a, b)| a - b)
            .collect()
    }
}

/// Degree at which a vector of weight `target` sits inside `F_source`.
pub fn weight_gap(params: &ModuleParams, source: &Rat, target: &Rat) -> Result<u64> {
    let d = params.conformal_weight(target) - params.conformal_weight(source);
    match to_i64(&d) {
        Some(n) if n >= 0 => Ok(n as u64),
        _ => Err(Error::InvalidParams(format!(
            "weight gap {d} between j = {source} and j = {target} is not a nonnegative integer"
        ))),
    }
}

/// `(p, p')` after checking `1 ≤ m ≤ p-1` and `0 ≤ m' ≤ p'-1`.
pub fn degenerate_range(params: &ModuleParams, m: i64, m_prime: i64) -> Result<(u64, u64)> {
    let (p, pp) = params
        .p_pair()
        .ok_or_else(|| Error::NotDegenerate("a rational level k + 2 = p/p' is required".into()))?;
    if m < 1 || m as u64 > p - 1 || m_prime < 0 || m_prime as u64 > pp - 1 {
        return Err(Error::NotDegenerate(format!("(m, m') = ({m}, {m_prime}) with (p, p') = ({p}, {pp})")));
    }
    Ok((p, pp))
}

/// Predicted diagram vertices for `F_{m+lp, m'+1/2}` with degree `≤ max_n`.
pub fn predicted_vertices(params: &ModuleParams, m: i64, m_prime: i64, l: i64, max_n: u64) -> Result<Vec<VertexCheck>> {
    let (p, _) = degenerate_range(params, m, m_prime)?;
    let p = p as i64;
    let b = rat(2 * m_prime + 1, 2);
    let source = params.j_label(&int(m + l * p), &b);
    let mut out = Vec::new();
    let push = |kind: VectorKind, index: i64, label: i64, out: &mut Vec<VertexCheck>| -> Result<bool> {
        let w = WeightLabel::labeled(params, &int(label), &b);
        let degree = weight_gap(params, &source, &w.j)?;
        if degree > max_n {
            return Ok(false);
        }
        out.push(VertexCheck { kind, index, weight: w, degree, found: None });
        Ok(true)
    };
    // Degrees grow strictly with |i| along each family, so stop at the first
    // vertex beyond the bound.
    let mut i = 1;
    while push(VectorKind::U, i, -m + (l + 2 * i) * p, &mut out)? {
        i += 1;
    }
    let mut i = 0;
    while push(VectorKind::W, i, -m - (l + 2 * i) * p, &mut out)? {
        i += 1;
    }
    let mut i = 0;
    while push(VectorKind::V, i, m + (l + 2 * i) * p, &mut out)? {
        i += 1;
    }
    let mut i = 1;
    while push(VectorKind::V, -i, m - (l + 2 * i) * p, &mut out)? {
        i += 1;
    }
    Ok(out)
}

/// Scans `F_j` through degree `max_n` for singular vectors, cosingular
/// vectors, and singular vectors of the quotient by the singular submodule.
pub fn scan(r: &Realization, sector: &SectorLabel, max_n: u64) -> Result<(Vec<DegreeFinding>, Vec<usize>, Closure, Closure)> {
    let mut found = Vec::new();
    let mut singular_dims = Vec::new();
    let mut u_vectors = Vec::new();
    for n in 0..=max_n {
        let ker = annihilator_kernel(r, sector, n, false)?;
        singular_dims.push(ker.len());
        for kv in ker {
            if n > 0 {
                found.push(DegreeFinding { kind: VectorKind::U, degree: n, weight_j: kv.x0_eigenvalue.clone() });
                u_vectors.push(kv.vector);
            }
        }
    }
    for c in cosingular_report(r, sector, max_n)?.found {
        found.push(DegreeFinding { kind: VectorKind::W, degree: c.degree, weight_j: c.weight_j });
    }
    let sf = submodule_closure(r, sector, &u_vectors, max_n);
    for n in 0..=max_n {
        for kv in quotient_singular(r, sector, n, &sf)? {
            found.push(DegreeFinding { kind: VectorKind::V, degree: n, weight_j: kv.x0_eigenvalue });
        }
    }
    let vac = submodule_closure(r, sector, &[FockVector::vacuum(sector.clone())], max_n);
    Ok((found, singular_dims, vac, sf))
}

/// Compares the scan of `F_{m+lp, m'+1/2}` with the predicted diagram.
pub fn verify_structure(params: &ModuleParams, m: i64, m_prime: i64, l: i64, max_n: u64) -> Result<StructureReport> {
    if l < 0 {
        return Err(Error::NotDegenerate(format!("l = {l} must be nonnegative")));
    }
    let (p, _) = degenerate_range(params, m, m_prime)?;
    let r = Realization::new(params.clone());
    let sector = SectorLabel::labeled(params.clone(), &int(m + l * p as i64), &rat(2 * m_prime + 1, 2));
    let mut predicted = predicted_vertices(params, m, m_prime, l, max_n)?;
    let (found, singular_dims, vac, sf) = scan(&r, &sector, max_n)?;

    let matches = |v: &VertexCheck, f: &DegreeFinding| v.kind == f.kind && v.degree == f.degree && v.weight.j == f.weight_j;
    for v in predicted.iter_mut() {
        v.found = Some(found.iter().any(|f| matches(v, f)));
    }
    let unexpected: Vec<DegreeFinding> =
        found.iter().filter(|f| !predicted.iter().any(|v| matches(v, f))).cloned().collect();

    let u1 = predicted.iter().find(|v| v.kind == VectorKind::U && v.index == 1);
    let arrow_v0_u1 = u1.map(|u1| {
        let vectors = annihilator_kernel(&r, &sector, u1.degree, false).unwrap_or_default();
        vectors.iter().filter(|kv| kv.x0_eigenvalue == u1.weight.j).all(|kv| vac.contains(&kv.vector))
            && !vectors.is_empty()
    });
    let fock_dims: Vec<usize> = (0..=max_n).map(|n| GradedBasis::new(n).len()).collect();
    let w0 = predicted.iter().find(|v| v.kind == VectorKind::W && v.index == 0);
    let w0_outside_vacuum_module = w0.map(|w0| vac.dims()[w0.degree as usize] < fock_dims[w0.degree as usize]);

    let in_reach = predicted.iter().any(|v| v.kind != VectorKind::V || v.index != 0);
    let all_found = predicted.iter().all(|v| v.found == Some(true));
    let status = if !in_reach {
        StructureStatus::Inconclusive
    } else if all_found
        && unexpected.is_empty()
        && arrow_v0_u1.unwrap_or(true)
        && w0_outside_vacuum_module.unwrap_or(true)
    {
        StructureStatus::Pass
    } else {
        StructureStatus::Fail
    };
    Ok(StructureReport {
        sector,
        max_n,
        fock_dims,
        singular_dims,
        found,
        predicted,
        unexpected,
        vacuum_closure_dims: vac.dims()[..=max_n as usize].to_vec(),
        singular_closure_dims: sf.dims()[..=max_n as usize].to_vec(),
        arrow_v0_u1,
        w0_outside_vacuum_module,
        status,
    })
}

/// Scan of an arbitrary sector with no predictions: `Generic` when nothing
/// beyond the vacuum is singular, cosingular or quotient-singular.
pub fn scan_sector(params: &ModuleParams, j: &Rat, max_n: u64) -> Result<StructureReport> {
    let r = Realization::new(params.clone());
    let sector = SectorLabel::new(params.clone(), j.clone());
    let (found, singular_dims, vac, sf) = scan(&r, &sector, max_n)?;
    let unexpected: Vec<DegreeFinding> = found
        .iter()
        .filter(|f| !(f.kind == VectorKind::V && f.degree == 0))
        .cloned()
        .collect();
    let status = if unexpected.is_empty() { StructureStatus::Generic } else { StructureStatus::Inconclusive };
    Ok(StructureReport {
        sector,
        max_n,
        fock_dims: (0..=max_n).map(|n| GradedBasis::new(n).len()).collect(),
        singular_dims,
        found,
        predicted: Vec::new(),
        unexpected,
        vacuum_closure_dims: vac.dims()[..=max_n as usize].to_vec(),
        singular_closure_dims: sf.dims()[..=max_n as usize].to_vec(),
        arrow_v0_u1: None,
        w0_outside_vacuum_module: None,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k1() -> ModuleParams {
        ModuleParams::rational(3, 1).unwrap()
    }

    #[test]
    fn pbw_counts() {
        let g = verma_dimensions(8);
        for n in 0..=8u64 {
            assert_eq!(enumerate_pbw(n).len(), g[n as usize]);
            assert!(enumerate_pbw(n).iter().all(|m| m.degree() == n));
        }
    }

    #[test]
    fn matrix_c_degree_one() {
        // [[1/2, 0], [j/k, j/k + 1/2]]
        let k = rat(7, 5);
        let r = Realization::new(ModuleParams::generic(k.clone()).unwrap());
        let j = rat(2, 3);
        let c = matrix_c(&r, 1, &j);
        let expected = Matrix::from_rows(vec![
            vec![rat(1, 2), int(0)],
            vec![&j / &k, &j / &k + rat(1, 2)],
        ]);
        assert_eq!(c, expected);
        assert_eq!(det_c_at(&r, 1, &j), (int(2) * &j + &k) / (int(4) * &k));
    }

    #[test]
    fn det_c_degree_one_and_two() {
        let r = Realization::new(k1());
        let d1 = det_c(&r, 1, &int(0)).unwrap();
        assert_eq!(d1.roots, vec![(rat(-1, 2), 1)]);
        assert_eq!(d1.constant, rat(1, 2));
        assert!(d1.lemma_match);
        let d2 = det_c(&r, 2, &int(0)).unwrap();
        assert_eq!(d2.roots, vec![(rat(-1, 2), 2), (rat(1, 2), 1)]);
        assert_eq!(d2.total_degree, 3);
        assert!(d2.lemma_match);
        let shifted = det_c(&r, 2, &rat(-7, 3)).unwrap();
        assert_eq!(shifted.monic, d2.monic);
    }

    #[test]
    fn genfun_low_order() {
        let f = bivariate_counts(1);
        assert_eq!((f[1][0].clone(), f[1][1].clone()), (int(1), int(1)));
        let rep = genfun_identity_check(20);
        assert!(rep.equal);
        assert_eq!(rep.weighted[1], int(1));
    }

    #[test]
    fn kernel_instances() {
        let r = Realization::new(k1());
        let sector = SectorLabel::new(k1(), rat(1, 2));
        let k1v = annihilator_kernel(&r, &sector, 1, false).unwrap();
        assert_eq!(k1v.len(), 1);
        assert_eq!(k1v[0].x0_eigenvalue, rat(5, 2));
        assert_eq!(annihilator_kernel(&r, &sector, 0, false).unwrap().len(), 1);
        let generic = SectorLabel::new(k1(), int(0));
        assert!(annihilator_kernel(&r, &generic, 1, false).unwrap().is_empty());
    }

    #[test]
    fn cosingular_instance() {
        let r = Realization::new(k1());
        let sector = SectorLabel::new(k1(), rat(-1, 2));
        let rep = cosingular_report(&r, &sector, 2).unwrap();
        assert_eq!(rep.found.first(), Some(&CosingularVector { degree: 1, weight_j: rat(-5, 2) }));
        assert_eq!(rep.det_zero_degree, Some(1));
        assert_eq!(rep.det_root_multiplicity, Some(1));
        assert!(rep.consistent);
        let generic = cosingular_report(&r, &SectorLabel::new(k1(), rat(1, 3)), 3).unwrap();
        assert!(generic.found.is_empty() && generic.det_zero_degree.is_none() && generic.consistent);
    }

    #[test]
    fn closure_examples() {
        let r = Realization::new(k1());
        let generic = SectorLabel::new(k1(), rat(1, 3));
        let c = submodule_closure(&r, &generic, &[FockVector::vacuum(generic.clone())], 4);
        assert_eq!(c.dims(), vec![1, 2, 4, 8, 14]);
        let empty = submodule_closure(&r, &generic, &[], 3);
        assert_eq!(empty.dims(), vec![0, 0, 0, 0]);

        let sector = SectorLabel::new(k1(), rat(1, 2));
        let u1 = annihilator_kernel(&r, &sector, 1, false).unwrap().remove(0).vector;
        let c = submodule_closure(&r, &sector, &[u1], 3);
        assert_eq!(c.dims()[0..2], [0, 1]);
        let again = submodule_closure(&r, &sector, &c_vectors(&c, &sector), 3);
        assert_eq!(again.dims(), c.dims());
    }

    fn c_vectors(c: &Closure, sector: &SectorLabel) -> Vec<FockVector> {
        (0..=c.top())
            .flat_map(|d| {
                let b = GradedBasis::new(d);
                c.span(d).basis().iter().map(move |row| FockVector::from_coords(sector.clone(), &b, row)).collect::<Vec<_>>()
            })
            .collect()
    }

    #[test]
    fn weight_gaps() {
        let p = k1();
        // u_1 of F_{2,1/2}: Λ_{4,1/2}
        assert_eq!(weight_gap(&p, &rat(1, 2), &rat(5, 2)).unwrap(), 1);
        assert!(weight_gap(&p, &int(0), &rat(1, 2)).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]

        #[test]
        fn det_roots_ignore_samples(num in -40i64..40, den in 1i64..9) {
            let r = Realization::new(ModuleParams::rational(7, 3).unwrap());
            let base = det_c(&r, 2, &int(0)).unwrap();
            let moved = det_c(&r, 2, &rat(num, den)).unwrap();
            proptest::prop_assert_eq!(base.monic, moved.monic);
        }

        #[test]
        fn closure_is_monotone(mask in 0u8..16) {
            let r = Realization::new(k1());
            let sector = SectorLabel::new(k1(), rat(1, 2));
            let pool: Vec<FockVector> = GradedBasis::new(2)
                .monomials()
                .iter()
                .map(|m| FockVector::monomial(sector.clone(), m.clone(), Rat::one()))
                .collect();
            let subset: Vec<FockVector> = pool.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, v)| v.clone()).collect();
            let small = submodule_closure(&r, &sector, &subset, 3).dims();
            let large = submodule_closure(&r, &sector, &pool, 3).dims();
            proptest::prop_assert!(small.iter().zip(&large).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn out_of_range_labels() {
        assert!(matches!(verify_structure(&k1(), 3, 0, 0, 2), Err(Error::NotDegenerate(_))));
        assert!(matches!(verify_structure(&k1(), 1, 1, 0, 2), Err(Error::NotDegenerate(_))));
    }
}
