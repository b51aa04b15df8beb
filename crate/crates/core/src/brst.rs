//! Characters of Fock, Verma and irreducible modules, the Fock resolution
//! and its Euler characteristic, and the one-fold screening charge.

use std::fmt;

use num_traits::{One, Zero};

use crate::currents::Realization;
use crate::error::{Error, Result};
use crate::exact::{int, product_series, rat, to_i64, CharacterSeries, Rat};
use crate::fock::{fock_factors, FockVector, GradedBasis, ModuleParams, SectorLabel, WeightLabel};
use crate::structure::{annihilator_kernel, degenerate_range, submodule_closure, verma_factors};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    Fock,
    Verma,
}

/// `q^{h(w)} Σ_N dim_N q^N` through `q^{h + order}`.
pub fn module_character(kind: ModuleKind, w: &WeightLabel, order: usize) -> CharacterSeries {
    let factors = match kind {
        ModuleKind::Fock => fock_factors(),
        ModuleKind::Verma => verma_factors(),
    };
    product_series(&factors, order).with_offset(w.h.clone())
}

/// Labels `j = start + i * step`, `i ∈ ℤ`, with a sign per index.
#[derive(Clone, Debug)]
struct LabelFamily {
    start: Rat,
    step: Rat,
    sign: fn(i64) -> i64,
}

/// One signed term `sign · ch(weight)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedWeight {
    /// Position in the complex or index in the embedding diagram.
    pub index: i64,
    pub sign: i64,
    pub weight: WeightLabel,
}

/// All members of the families whose `h` lies within `order` of the
/// smallest `h` over the families.
///
/// `h` is increasing in `|j|` and each family is arithmetic in `i`, so
/// along each family `|j|` is monotone on either side of the index nearest
/// `j = 0`. Walking outward from there and stopping at the first label past
/// the bound therefore drops only labels that are further out still.
fn truncated_terms(
    params: &ModuleParams,
    families: &[(LabelFamily, fn(i64) -> i64)],
    order: usize,
) -> (Rat, Vec<SignedWeight>) {
    let h = |j: &Rat| params.conformal_weight(j);
    let vertex = |f: &LabelFamily| -> i64 {
        let t = -&f.start / &f.step;
        to_i64(&t.floor()).expect("vertex index fits in i64")
    };
    let label = |f: &LabelFamily, i: i64| &f.start + &f.step * int(i);
    let h_min = families
        .iter()
        .flat_map(|(f, _)| {
            let v = vertex(f);
            [h(&label(f, v)), h(&label(f, v + 1))]
        })
        .min()
        .expect("at least one family");
    let bound = &h_min + int(order as i64);
    let mut out = Vec::new();
    for (f, index) in families {
        let v = vertex(f);
        for dir in [-1i64, 1] {
            let mut i = if dir < 0 { v } else { v + 1 };
            loop {
                let j = label(f, i);
                if h(&j) > bound {
                    break;
                }
                out.push(SignedWeight { index: index(i), sign: (f.sign)(i), weight: WeightLabel::new(params, j) });
                i += dir;
            }
        }
    }
    out.sort_by(|a, b| a.weight.h.cmp(&b.weight.h).then(a.index.cmp(&b.index)));
    (h_min, out)
}

/// Signed sum of characters of one kind, aligned at `offset`.
fn signed_sum(kind: ModuleKind, offset: &Rat, terms: &[SignedWeight], order: usize) -> Result<CharacterSeries> {
    let mut acc = CharacterSeries::zero(offset.clone(), order);
    for t in terms {
        let gap = to_i64(&(&t.weight.h - offset))
            .filter(|g| *g >= 0)
            .ok_or_else(|| Error::IncommensurateGradings(offset.clone(), t.weight.h.clone()))? as usize;
        let term = module_character(kind, &t.weight, order - gap);
        acc = acc.add_scaled(&term, &int(t.sign))?;
    }
    Ok(acc)
}

/// Signed Verma weights of the embedding diagram of `V(Λ_{m, m'+1/2})`:
/// `+s_0`, `-s_{±1}`, `+s_{±2}`, ...
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BggWeightList {
    pub terms: Vec<SignedWeight>,
}

impl BggWeightList {
    /// Weight of `s_i` for the top module (`l = 0`).
    pub fn weight(params: &ModuleParams, m: i64, m_prime: i64, i: i64) -> Result<WeightLabel> {
        let (p, _) = degenerate_range(params, m, m_prime)?;
        let p = p as i64;
        let b = rat(2 * m_prime + 1, 2);
        let label = if i.rem_euclid(2) == 0 {
            // s_{2t}, t ∈ ℤ, sits at Λ_{m+2tp}
            m + i * p
        } else {
            // s_{2t+1}, t ∈ ℤ, sits at Λ_{-m-2tp}
            -m - (i - 1) * p
        };
        Ok(WeightLabel::labeled(params, &int(label), &b))
    }

    /// Every `s_i` with `h(s_i) - h(s_0) ≤ order`.
    pub fn new(params: &ModuleParams, m: i64, m_prime: i64, order: usize) -> Result<Self> {
        let (p, _) = degenerate_range(params, m, m_prime)?;
        let b = rat(2 * m_prime + 1, 2);
        let kp2 = params.k_plus_2();
        let base = |label: i64| params.j_label(&int(label), &b);
        let step = int(2 * p as i64);
        let families = [
            (LabelFamily { start: base(m), step: step.clone(), sign: |_| 1 }, (|t| 2 * t) as fn(i64) -> i64),
            (LabelFamily { start: base(-m), step: -step, sign: |_| -1 }, (|t| 2 * t + 1) as fn(i64) -> i64),
        ];
        let (h_min, terms) = truncated_terms(params, &families, order);
        debug_assert_eq!(h_min, params.conformal_weight(&(int(m) - b * kp2)));
        Ok(BggWeightList { terms })
    }
}

/// `ch L(Λ_{m, m'+1/2}) = Σ_i ± ch V(weight(s_i))` through `q^{h + order}`.
/// Fails when the sum has a negative coefficient.
pub fn bgg_character(params: &ModuleParams, m: i64, m_prime: i64, order: usize) -> Result<CharacterSeries> {
    let list = BggWeightList::new(params, m, m_prime, order)?;
    let top = BggWeightList::weight(params, m, m_prime, 0)?;
    let ch = signed_sum(ModuleKind::Verma, &top.h, &list.terms, order)?;
    if let Some((degree, c)) = ch.coeffs.iter().enumerate().find(|(_, c)| c < &&Rat::zero()) {
        return Err(Error::NegativeCharacter { degree, coefficient: c.clone() });
    }
    Ok(ch)
}

/// The two-sided Fock resolution built on `F_{m, m'+1/2}`: position `2i`
/// holds `F_{m-2ip, m'+1/2}` and position `2i+1` holds `F_{-m-2ip, m'+1/2}`.
/// The map leaving an even position is `Q^m`, the one leaving an odd
/// position is `Q^{p-m}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexDescriptor {
    pub params: ModuleParams,
    pub m: i64,
    pub m_prime: i64,
    p: i64,
}

impl ComplexDescriptor {
    pub fn new(params: ModuleParams, m: i64, m_prime: i64) -> Result<Self> {
        let (p, _) = degenerate_range(&params, m, m_prime)?;
        Ok(ComplexDescriptor { params, m, m_prime, p: p as i64 })
    }

    /// First label of the Fock module at `position`.
    pub fn label(&self, position: i64) -> i64 {
        let i = position.div_euclid(2);
        if position.rem_euclid(2) == 0 {
            self.m - 2 * i * self.p
        } else {
            -self.m - 2 * i * self.p
        }
    }

    pub fn sector(&self, position: i64) -> SectorLabel {
        SectorLabel::labeled(self.params.clone(), &int(self.label(position)), &rat(2 * self.m_prime + 1, 2))
    }

    /// Number of screening currents in the map `position → position + 1`.
    pub fn charge(&self, position: i64) -> i64 {
        if position.rem_euclid(2) == 0 {
            self.m
        } else {
            self.p - self.m
        }
    }

    /// Positions whose Fock character starts within `order` of the lowest one.
    pub fn positions(&self, order: usize) -> Vec<SignedWeight> {
        let b = rat(2 * self.m_prime + 1, 2);
        let base = |label: i64| self.params.j_label(&int(label), &b);
        let step = int(-2 * self.p);
        let families = [
            (LabelFamily { start: base(self.m), step: step.clone(), sign: |_| 1 }, (|i| 2 * i) as fn(i64) -> i64),
            (LabelFamily { start: base(-self.m), step, sign: |_| -1 }, (|i| 2 * i + 1) as fn(i64) -> i64),
        ];
        truncated_terms(&self.params, &families, order).1
    }
}

impl fmt::Display for ComplexDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = format!("{}/2", 2 * self.m_prime + 1);
        write!(
            f,
            "... -> F({}, {b}) -Q^{}-> [F({}, {b})] -Q^{}-> F({}, {b}) -> ...",
            self.label(-1),
            self.charge(-1),
            self.label(0),
            self.charge(0),
            self.label(1)
        )
    }
}

/// `Σ_i (-1)^i ch F(position i)` through `order` above the lowest offset.
pub fn euler_character(descriptor: &ComplexDescriptor, order: usize) -> Result<CharacterSeries> {
    let terms = descriptor.positions(order);
    let h_min = terms.iter().map(|t| t.weight.h.clone()).min().expect("position 0 always contributes");
    signed_sum(ModuleKind::Fock, &h_min, &terms, order)
}

/// `Q¹ v`, the `ζ^0` coefficient of `S(ζ) v`; lands in `F_{j-2}`.
pub fn screening_q1(r: &Realization, v: &FockVector) -> Result<FockVector> {
    let j = &v.sector().j;
    if !r.screening_defined(j) {
        return Err(Error::ScreeningUndefined(j.clone()));
    }
    r.screening_coefficient(&Rat::zero(), v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntertwiningFailure {
    pub generator: String,
    pub vector: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q1Report {
    pub source: SectorLabel,
    pub target: SectorLabel,
    /// `h(source) - h(target)` up to sign: `Q¹` maps degree `N` to degree
    /// `N + degree_shift`.
    pub degree_shift: i64,
    pub checks: usize,
    pub failures: Vec<IntertwiningFailure>,
    /// Degrees where `Q¹` failed to preserve the `d`-eigenvalue.
    pub grading_failures: Vec<u64>,
    /// `Q¹ ν = scalar · u` against the kernel vector `u` of matching degree
    /// and weight, when there is exactly one.
    pub vacuum_image_nonzero: bool,
    pub proportionality: Option<Rat>,
}

impl Q1Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.grading_failures.is_empty() && self.vacuum_image_nonzero && self.proportionality.is_some()
    }
}

/// Intertwining of `Q¹` with `x_n` and `β_n`, `|n| ≤ max_degree`, on every
/// basis vector of degree `≤ max_degree`, plus the image of the vacuum.
pub fn q1_checks(r: &Realization, source: &SectorLabel, max_degree: u64) -> Result<Q1Report> {
    if !r.screening_defined(&source.j) {
        return Err(Error::ScreeningUndefined(source.j.clone()));
    }
    let target = source.shifted(&r.screening_shift());
    let shift = to_i64(&(&source.h() - &target.h()))
        .ok_or_else(|| Error::InvalidParams("non-integer degree shift under Q1".into()))?;
    let q = |v: &FockVector| screening_q1(r, v).expect("Q1 defined on source");
    let mut failures = Vec::new();
    let mut grading_failures = Vec::new();
    let mut checks = 0;
    let d = max_degree as i64;
    for n in 0..=max_degree {
        let basis = GradedBasis::new(n);
        for m in basis.monomials() {
            let v = FockVector::monomial(source.clone(), m.clone(), Rat::one());
            let qv = q(&v);
            match qv.homogeneous_degree() {
                Some(e) if e as i64 != n as i64 + shift => grading_failures.push(n),
                None if !qv.is_zero() => grading_failures.push(n),
                _ => {}
            }
            for a in -d..=d {
                checks += 1;
                if q(&r.act_x(a, &v, false)) != r.act_x(a, &qv, false) {
                    failures.push(IntertwiningFailure { generator: format!("x_{a}"), vector: v.to_string() });
                }
                if a % 2 != 0 {
                    checks += 1;
                    if q(&r.act_beta(a, &v)?) != r.act_beta(a, &qv)? {
                        failures.push(IntertwiningFailure { generator: format!("beta_{a}"), vector: v.to_string() });
                    }
                }
            }
        }
    }
    grading_failures.dedup();

    let image = q(&FockVector::vacuum(source.clone()));
    let vacuum_image_nonzero = !image.is_zero();
    let proportionality = match (vacuum_image_nonzero, u64::try_from(shift)) {
        (true, Ok(n)) => {
            let ker: Vec<_> = annihilator_kernel(r, &target, n, false)?
                .into_iter()
                .filter(|kv| kv.x0_eigenvalue == source.j)
                .collect();
            match ker.as_slice() {
                [kv] => scalar_multiple(&image, &kv.vector),
                _ => None,
            }
        }
        _ => None,
    };
    Ok(Q1Report {
        source: source.clone(),
        target,
        degree_shift: shift,
        checks,
        failures,
        grading_failures,
        vacuum_image_nonzero,
        proportionality,
    })
}

/// `c` with `a = c · b`, if any.
fn scalar_multiple(a: &FockVector, b: &FockVector) -> Option<Rat> {
    let (m, bc) = b.terms().iter().next()?;
    let c = a.terms().get(m).cloned().unwrap_or_else(Rat::zero) / bc;
    (b.scale(&c) == *a).then_some(c)
}

/// Graded dimensions of two quotients of `F_{m, m'+1/2}` set against the
/// irreducible character: the vacuum submodule modulo the submodule of
/// singular vectors, and the whole Fock module modulo that same submodule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientComparison {
    pub bgg: Vec<Rat>,
    pub vacuum_quotient: Vec<usize>,
    pub fock_quotient: Vec<usize>,
}

impl QuotientComparison {
    pub fn vacuum_matches(&self) -> bool {
        self.bgg.iter().zip(&self.vacuum_quotient).all(|(a, b)| a == &int(*b as i64))
    }

    pub fn fock_matches(&self) -> bool {
        self.bgg.iter().zip(&self.fock_quotient).all(|(a, b)| a == &int(*b as i64))
    }
}

pub fn quotient_comparison(params: &ModuleParams, m: i64, m_prime: i64, max_n: u64) -> Result<QuotientComparison> {
    let bgg = bgg_character(params, m, m_prime, max_n as usize)?.coeffs;
    let r = Realization::new(params.clone());
    let sector = SectorLabel::labeled(params.clone(), &int(m), &rat(2 * m_prime + 1, 2));
    let mut singular = Vec::new();
    for n in 1..=max_n {
        singular.extend(annihilator_kernel(&r, &sector, n, false)?.into_iter().map(|kv| kv.vector));
    }
    let sf = submodule_closure(&r, &sector, &singular, max_n).dims();
    let vac = submodule_closure(&r, &sector, &[FockVector::vacuum(sector.clone())], max_n).dims();
    let fock: Vec<usize> = (0..=max_n).map(|n| GradedBasis::new(n).len()).collect();
    Ok(QuotientComparison {
        bgg,
        vacuum_quotient: (0..=max_n as usize).map(|n| vac[n] - sf[n]).collect(),
        fock_quotient: (0..=max_n as usize).map(|n| fock[n] - sf[n]).collect(),
    })
}
