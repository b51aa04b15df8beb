//! Free-boson Fock spaces of the principal gradation.
//!
//! Three families of oscillators: `φ_0` and `φ_2` carry odd modes, `φ_1`
//! carries even modes. The zero mode `φ_{1,0}` and the translation `q` never
//! appear in monomials; they are absorbed into the charge `j` of a sector.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, Factor, Progression, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    Zero,
    One,
    Two,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Zero, Family::One, Family::Two];

    pub fn index(self) -> u8 {
        match self {
            Family::Zero => 0,
            Family::One => 1,
            Family::Two => 2,
        }
    }

    /// Whether a nonzero mode `n` belongs to this family.
    pub fn carries(self, n: i64) -> bool {
        match self {
            Family::Zero | Family::Two => n.is_odd(),
            Family::One => n != 0 && n.is_even(),
        }
    }

    /// `c` in `[φ_{f,a}, φ_{f,-a}] = c·a` for admissible `a > 0`.
    pub fn bracket(self, k: &Rat) -> Rat {
        match self {
            Family::Zero => int(4) * k,
            Family::One => int(4) * (k + int(2)),
            Family::Two => int(-4) * k,
        }
    }

    /// Positive mode numbers `a` with `φ_{f,±a}` admissible, up to `bound`.
    pub fn positive_modes(self, bound: u64) -> impl Iterator<Item = u64> {
        let (start, step) = match self {
            Family::Zero | Family::Two => (1, 2),
            Family::One => (2, 2),
        };
        (start..=bound).step_by(step)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// An oscillator `φ_{family, n}` with `n ≠ 0` of the family's parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    family: Family,
    n: i64,
}

impl ModeIndex {
    pub fn new(family: Family, n: i64) -> Result<Self> {
        if !family.carries(n) {
            return Err(Error::IllegalMode { family: family.index(), n });
        }
        Ok(ModeIndex { family, n })
    }

    pub(crate) fn creation(family: Family, a: u64) -> Self {
        debug_assert!(family.carries(a as i64));
        ModeIndex { family, n: -(a as i64) }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> i64 {
        self.n
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi[{},{}]", self.family, self.n)
    }
}

/// A product of creation modes, kept as sorted `(mode, exponent)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockMonomial {
    parts: Vec<(ModeIndex, u32)>,
}

impl FockMonomial {
    pub fn empty() -> Self {
        FockMonomial::default()
    }

    /// Builds from creation modes in any order; repeated modes multiply.
    pub fn from_modes<I: IntoIterator<Item = ModeIndex>>(modes: I) -> Result<Self> {
        let mut m = FockMonomial::empty();
        for mode in modes {
            if mode.n >= 0 {
                return Err(Error::IllegalMode { family: mode.family.index(), n: mode.n });
            }
            m = m.times(mode);
        }
        Ok(m)
    }

    pub fn parts(&self) -> &[(ModeIndex, u32)] {
        &self.parts
    }

    pub fn degree(&self) -> u64 {
        self.parts.iter().map(|(m, e)| (-m.n) as u64 * *e as u64).sum()
    }

    pub fn exponent(&self, mode: ModeIndex) -> u32 {
        self.parts
            .binary_search_by(|(m, _)| m.cmp(&mode))
            .map_or(0, |i| self.parts[i].1)
    }

    pub(crate) fn times(&self, mode: ModeIndex) -> Self {
        self.times_pow(mode, 1)
    }

    pub(crate) fn times_pow(&self, mode: ModeIndex, e: u32) -> Self {
        let mut parts = self.parts.clone();
        if e == 0 {
            return FockMonomial { parts };
        }
        match parts.binary_search_by(|(m, _)| m.cmp(&mode)) {
            Ok(i) => parts[i].1 += e,
            Err(i) => parts.insert(i, (mode, e)),
        }
        FockMonomial { parts }
    }

    /// Product of two monomials.
    pub(crate) fn product(&self, other: &FockMonomial) -> Self {
        other.parts.iter().fold(self.clone(), |acc, &(m, e)| acc.times_pow(m, e))
    }

    /// Removes one power of `mode`; `None` when absent.
    pub(crate) fn without(&self, mode: ModeIndex) -> Option<(u32, Self)> {
        let i = self.parts.binary_search_by(|(m, _)| m.cmp(&mode)).ok()?;
        let mut parts = self.parts.clone();
        let e = parts[i].1;
        if e == 1 {
            parts.remove(i);
        } else {
            parts[i].1 -= 1;
        }
        Some((e, FockMonomial { parts }))
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "1");
        }
        let s: Vec<String> = self
            .parts
            .iter()
            .map(|(m, e)| if *e == 1 { m.to_string() } else { format!("{m}^{e}") })
            .collect();
        write!(f, "{}", s.join("*"))
    }
}

/// Level data: either `k + 2 = p/p'` with coprime positive `p, p'`, or a
/// bare rational level `k`. Equality compares levels only.
#[derive(Clone, Debug)]
pub enum ModuleParams {
    Rational { p: u64, p_prime: u64 },
    Generic { k: Rat },
}

impl ModuleParams {
    pub fn rational(p: u64, p_prime: u64) -> Result<Self> {
        if p == 0 || p_prime == 0 {
            return Err(Error::InvalidParams("p and p' must be positive".into()));
        }
        if p.gcd(&p_prime) != 1 {
            return Err(Error::InvalidParams(format!("gcd({p}, {p_prime}) != 1")));
        }
        if p == 2 * p_prime {
            return Err(Error::InvalidParams("level k = 0 is excluded".into()));
        }
        Ok(ModuleParams::Rational { p, p_prime })
    }

    pub fn generic(k: Rat) -> Result<Self> {
        if k.is_zero() || k == int(-2) {
            return Err(Error::InvalidParams(format!("level k = {k} is excluded")));
        }
        Ok(ModuleParams::Generic { k })
    }

    pub fn k(&self) -> Rat {
        self.k_plus_2() - int(2)
    }

    pub fn k_plus_2(&self) -> Rat {
        match self {
            ModuleParams::Rational { p, p_prime } => {
                Rat::new((*p).into(), (*p_prime).into())
            }
            ModuleParams::Generic { k } => k + int(2),
        }
    }

    /// `(p, p')` when known.
    pub fn p_pair(&self) -> Option<(u64, u64)> {
        match self {
            ModuleParams::Rational { p, p_prime } => Some((*p, *p_prime)),
            ModuleParams::Generic { .. } => None,
        }
    }

    /// `j_{m,m'} = m - m'(k+2)`.
    pub fn j_label(&self, m: &Rat, m_prime: &Rat) -> Rat {
        m - m_prime * self.k_plus_2()
    }

    /// `h(j) = (2j² + k) / (4(k+2))`, the grading eigenvalue of `ν_j`.
    pub fn conformal_weight(&self, j: &Rat) -> Rat {
        (int(2) * j * j + self.k()) / (int(4) * self.k_plus_2())
    }
}

impl PartialEq for ModuleParams {
    fn eq(&self, other: &Self) -> bool {
        self.k_plus_2() == other.k_plus_2()
    }
}

impl Eq for ModuleParams {}

impl std::hash::Hash for ModuleParams {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.k_plus_2().hash(state);
    }
}

/// The Fock module `F_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SectorLabel {
    pub j: Rat,
    pub params: ModuleParams,
}

impl SectorLabel {
    pub fn new(params: ModuleParams, j: Rat) -> Self {
        SectorLabel { j, params }
    }

    /// `F_{m,m'}` with `j = m - m'(k+2)`.
    pub fn labeled(params: ModuleParams, m: &Rat, m_prime: &Rat) -> Self {
        let j = params.j_label(m, m_prime);
        SectorLabel { j, params }
    }

    pub fn k(&self) -> Rat {
        self.params.k()
    }

    pub fn h(&self) -> Rat {
        self.params.conformal_weight(&self.j)
    }

    /// Eigenvalue of the zero mode `φ_{1,0}` on every vector of the sector.
    pub fn zero_mode(&self) -> Rat {
        int(2) * &self.j
    }

    pub fn shifted(&self, dj: &Rat) -> Self {
        SectorLabel { j: &self.j + dj, params: self.params.clone() }
    }

    pub fn negated(&self) -> Self {
        SectorLabel { j: -self.j.clone(), params: self.params.clone() }
    }

    pub fn weight(&self) -> WeightLabel {
        WeightLabel::new(&self.params, self.j.clone())
    }
}

/// Highest weight `Λ_j` recorded as `(k, j, h)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightLabel {
    pub k: Rat,
    pub j: Rat,
    pub h: Rat,
}

impl WeightLabel {
    pub fn new(params: &ModuleParams, j: Rat) -> Self {
        WeightLabel { k: params.k(), h: params.conformal_weight(&j), j }
    }

    /// `Λ_{m,m'}`.
    pub fn labeled(params: &ModuleParams, m: &Rat, m_prime: &Rat) -> Self {
        WeightLabel::new(params, params.j_label(m, m_prime))
    }

    /// Coordinates `(Λ_0, Λ_1, δ)` of `Λ_j`.
    pub fn fundamental_coordinates(&self) -> (Rat, Rat, Rat) {
        let half_k = &self.k / int(2);
        let kp2 = &self.k + int(2);
        let delta = -(int(2) * &self.j * (&self.j + &kp2) + &self.k * (&self.k + int(3)))
            / (int(8) * kp2);
        (&half_k - &self.j, half_k + &self.j, delta)
    }
}

/// A finite exact combination of monomials in one sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockVector {
    sector: SectorLabel,
    terms: BTreeMap<FockMonomial, Rat>,
}

impl FockVector {
    pub fn zero(sector: SectorLabel) -> Self {
        FockVector { sector, terms: BTreeMap::new() }
    }

    pub fn vacuum(sector: SectorLabel) -> Self {
        FockVector::monomial(sector, FockMonomial::empty(), Rat::one())
    }

    pub fn monomial(sector: SectorLabel, m: FockMonomial, c: Rat) -> Self {
        let mut v = FockVector::zero(sector);
        v.add_term(m, c);
        v
    }

    pub fn sector(&self) -> &SectorLabel {
        &self.sector
    }

    pub fn terms(&self) -> &BTreeMap<FockMonomial, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: FockMonomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c * other`; both vectors must live in the same sector.
    pub fn add_scaled(&mut self, other: &FockVector, c: &Rat) {
        assert_eq!(self.sector, other.sector, "adding vectors from different sectors");
        for (m, x) in &other.terms {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(other, &Rat::one());
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        out.add_scaled(other, &-Rat::one());
        out
    }

    pub fn scale(&self, c: &Rat) -> FockVector {
        let mut out = FockVector::zero(self.sector.clone());
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect();
        }
        out
    }

    /// Same coefficients, relabelled into another sector.
    pub fn with_sector(self, sector: SectorLabel) -> FockVector {
        FockVector { sector, terms: self.terms }
    }

    /// The common degree of all terms, `None` if inhomogeneous or zero.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        let mut it = self.terms.keys().map(FockMonomial::degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn components(&self) -> BTreeMap<u64, FockVector> {
        let mut out: BTreeMap<u64, FockVector> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| FockVector::zero(self.sector.clone()))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Degrees present with the number of monomials in each.
    pub fn inspect(&self) -> BTreeMap<u64, usize> {
        let mut out = BTreeMap::new();
        for m in self.terms.keys() {
            *out.entry(m.degree()).or_insert(0) += 1;
        }
        out
    }

    /// Coefficient of `m`, asserting that the query refers to this sector.
    pub fn coefficient(&self, sector: &SectorLabel, m: &FockMonomial) -> Result<Rat> {
        if sector != &self.sector {
            return Err(Error::SectorMismatch(format!(
                "queried j = {} on a vector of j = {}",
                sector.j, self.sector.j
            )));
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(Rat::zero))
    }

    /// Coordinates in a graded basis.
    pub fn coords(&self, basis: &GradedBasis) -> Vec<Rat> {
        let mut v = vec![Rat::zero(); basis.len()];
        for (m, c) in &self.terms {
            let i = basis.index_of(m).expect("monomial outside the basis degree");
            v[i] = c.clone();
        }
        v
    }

    pub fn from_coords(sector: SectorLabel, basis: &GradedBasis, coords: &[Rat]) -> FockVector {
        let mut v = FockVector::zero(sector);
        for (m, c) in basis.monomials().iter().zip(coords) {
            v.add_term(m.clone(), c.clone());
        }
        v
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let s: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{} |j={}>", s.join(" + "), self.sector.j)
    }
}

/// `φ_{family,n}` acting on `v`. `(Family::One, 0)` is the zero mode.
pub fn apply_mode(family: Family, n: i64, v: &FockVector) -> Result<FockVector> {
    if family == Family::One && n == 0 {
        return Ok(v.scale(&v.sector.zero_mode()));
    }
    let mode = ModeIndex::new(family, n)?;
    let mut out = FockVector::zero(v.sector.clone());
    if n < 0 {
        for (m, c) in &v.terms {
            out.add_term(m.times(mode), c.clone());
        }
    } else {
        let partner = ModeIndex { family, n: -n };
        let unit = family.bracket(&v.sector.k()) * int(n);
        for (m, c) in &v.terms {
            if let Some((e, rest)) = m.without(partner) {
                out.add_term(rest, c * &unit * int(e as i64));
            }
        }
    }
    Ok(out)
}

/// All creation modes `φ_{f,-a}` with `a ≤ bound`, in canonical order.
pub(crate) fn creation_modes(families: &[Family], bound: u64) -> Vec<ModeIndex> {
    let mut modes: Vec<ModeIndex> = families
        .iter()
        .flat_map(|&f| f.positive_modes(bound).map(move |a| ModeIndex::creation(f, a)))
        .collect();
    modes.sort();
    modes
}

/// Monomials of degree exactly `degree` built from the given families, sorted.
pub(crate) fn monomials_of_degree(families: &[Family], degree: u64) -> Vec<FockMonomial> {
    fn go(modes: &[ModeIndex], rest: u64, acc: FockMonomial, out: &mut Vec<FockMonomial>) {
        if rest == 0 {
            out.push(acc);
            return;
        }
        let Some((&mode, tail)) = modes.split_first() else {
            return;
        };
        let a = (-mode.n()) as u64;
        let mut e = 0;
        while e * a <= rest {
            go(tail, rest - e * a, acc.times_pow(mode, e as u32), out);
            e += 1;
        }
    }
    let modes = creation_modes(families, degree);
    let mut out = Vec::new();
    go(&modes, degree, FockMonomial::empty(), &mut out);
    out.sort();
    out
}

/// `Π_{a≥1} 1/((1-q^{2a})(1-q^{2a-1})^2)`, the graded dimension of a Fock space.
pub fn fock_factors() -> Vec<Factor> {
    vec![Factor::inverse(Progression::EVEN), Factor { progression: Progression::ODD, power: -2 }]
}

/// The degree-`n` monomial basis of `F_j` in canonical order.
///
/// The basis does not depend on the charge; `sector` is accepted to keep
/// call sites explicit about which module they enumerate.
pub fn enumerate_basis(_sector: &SectorLabel, n: u64) -> Vec<FockMonomial> {
    monomials_of_degree(&Family::ALL, n)
}

/// A degree-homogeneous basis with an index lookup.
#[derive(Clone, Debug)]
pub struct GradedBasis {
    degree: u64,
    monomials: Vec<FockMonomial>,
    index: HashMap<FockMonomial, usize>,
}

impl GradedBasis {
    pub fn new(degree: u64) -> Self {
        let monomials = monomials_of_degree(&Family::ALL, degree);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        GradedBasis { degree, monomials, index }
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[FockMonomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &FockMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}
