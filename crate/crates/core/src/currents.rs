//! Vertex-operator realization of the affine generators and the screening
//! current on the Fock modules.
//!
//! A current `scale · :P(ζ) exp(Σ_f λ_f φ_f(ζ)): · ζ^c` is expanded mode by
//! mode. Acting on a monomial, the annihilation half of the exponential is a
//! shift `φ_{f,-a} → φ_{f,-a} - λ_f κ_f ζ^{-a}` of the creation variables
//! (`κ_f` the bracket constant), the prefactor contributes one mode or the
//! zero-mode eigenvalue, and the creation half supplies whatever power of
//! `ζ` is still missing. All sums are finite.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, is_odd_integer, rat, to_i64, Rat};
use crate::fock::{monomials_of_degree, Family, FockMonomial, FockVector, ModeIndex, ModuleParams, SectorLabel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Beta(i64),
    X(i64),
    Central,
    Rho,
}

/// A generator of the algebra, optionally composed with the automorphism
/// `σ: x_n ↦ -x_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorAction {
    pub symbol: Generator,
    pub twist: bool,
}

impl GeneratorAction {
    pub fn new(symbol: Generator) -> Self {
        GeneratorAction { symbol, twist: false }
    }

    pub fn twisted(symbol: Generator) -> Self {
        GeneratorAction { symbol, twist: true }
    }
}

type Terms = Vec<(FockMonomial, Rat)>;

/// Mode expansion data of one normal-ordered current.
#[derive(Debug)]
pub(crate) struct VertexExpansion {
    k: Rat,
    scale: Rat,
    prefactor: Vec<(Family, Rat)>,
    zero_mode_weight: Rat,
    exponent: [Rat; 3],
    explicit_power: Rat,
    creation_cache: RwLock<HashMap<u64, Terms>>,
}

impl VertexExpansion {
    /// `x(ζ) = ½ :(ζ∂φ_1 + ζ∂φ_2) e^{(φ_2 + φ_0)/k}:`
    pub(crate) fn x_current(k: &Rat) -> Self {
        let inv_k = Rat::one() / k;
        VertexExpansion {
            k: k.clone(),
            scale: rat(1, 2),
            prefactor: vec![(Family::One, int(1)), (Family::Two, int(1))],
            zero_mode_weight: int(1),
            exponent: [inv_k.clone(), Rat::zero(), inv_k],
            explicit_power: Rat::zero(),
            creation_cache: RwLock::default(),
        }
    }

    /// `S(ζ) = ½ ζ^{2/(k+2)} :ζ∂φ_2 e^{-φ_1/(k+2)}:`
    pub(crate) fn screening_current(k: &Rat) -> Self {
        let kp2 = k + int(2);
        VertexExpansion {
            k: k.clone(),
            scale: rat(1, 2),
            prefactor: vec![(Family::Two, int(1))],
            zero_mode_weight: Rat::zero(),
            exponent: [Rat::zero(), -Rat::one() / &kp2, Rat::zero()],
            explicit_power: int(2) / kp2,
            creation_cache: RwLock::default(),
        }
    }

    fn lambda(&self, f: Family) -> &Rat {
        &self.exponent[f.index() as usize]
    }

    /// Non-integer part of every ζ-exponent on sector `j`: the explicit
    /// power plus `ζ^{λ_1 φ_{1,0}}` evaluated with the incoming charge.
    pub(crate) fn fractional_offset(&self, j: &Rat) -> Rat {
        &self.explicit_power + self.lambda(Family::One) * int(2) * j
    }

    /// Charge change from `e^{λ_1 q}`.
    pub(crate) fn sector_shift(&self) -> Rat {
        int(2) * (&self.k + int(2)) * self.lambda(Family::One)
    }

    /// ζ^t coefficient of the creation half of the exponential.
    fn creation(&self, t: u64) -> Terms {
        if let Some(hit) = self.creation_cache.read().unwrap().get(&t) {
            return hit.clone();
        }
        let families: Vec<Family> =
            Family::ALL.into_iter().filter(|f| !self.lambda(*f).is_zero()).collect();
        let terms: Terms = monomials_of_degree(&families, t)
            .into_iter()
            .map(|m| {
                let c = m.parts().iter().fold(Rat::one(), |acc, (mode, e)| {
                    let a = int(-mode.n());
                    let base = self.lambda(mode.family()) / a;
                    acc * pow(&base, *e) / factorial(*e)
                });
                (m, c)
            })
            .collect();
        self.creation_cache.write().unwrap().insert(t, terms.clone());
        terms
    }

    /// Annihilation half applied to `m`: `(s, monomial, coefficient)` with the
    /// term carrying `ζ^{-s}`.
    fn annihilate(&self, m: &FockMonomial) -> Vec<(u64, FockMonomial, Rat)> {
        let mut acc = vec![(0u64, FockMonomial::empty(), Rat::one())];
        for &(mode, e) in m.parts() {
            let f = mode.family();
            let lam = self.lambda(f);
            let a = (-mode.n()) as u64;
            let mut next = Vec::new();
            if lam.is_zero() {
                for (s, mono, c) in acc {
                    next.push((s, mono.times_pow(mode, e), c));
                }
            } else {
                let shift = -(lam * f.bracket(&self.k));
                for (s, mono, c) in &acc {
                    for r in 0..=e {
                        let coeff = c * Rat::from_integer(binomial(BigInt::from(e), BigInt::from(r)))
                            * pow(&shift, r);
                        next.push((s + a * r as u64, mono.times_pow(mode, e - r), coeff));
                    }
                }
            }
            acc = next;
        }
        acc
    }

    /// Coefficient of `ζ^{exponent + F}` applied to the monomial `m` of
    /// sector `sector`, with `F` the fractional offset.
    fn apply_monomial(&self, exponent: i64, sector: &SectorLabel, m: &FockMonomial) -> Terms {
        let mut out: BTreeMap<FockMonomial, Rat> = BTreeMap::new();
        let mut emit = |base: &FockMonomial, c: Rat, t: i64| {
            if t < 0 || c.is_zero() {
                return;
            }
            for (cm, cc) in self.creation(t as u64) {
                let key = base.product(&cm);
                let v = &c * cc;
                *out.entry(key).or_insert_with(Rat::zero) += v;
            }
        };
        let zero_mode = &self.zero_mode_weight * sector.zero_mode();
        for (s, ms, cs) in self.annihilate(m) {
            let s = s as i64;
            if !zero_mode.is_zero() {
                emit(&ms, &cs * &zero_mode, exponent + s);
            }
            let deg = ms.degree();
            for (f, w) in &self.prefactor {
                let wc = w * &cs;
                for b in f.positive_modes(deg) {
                    let partner = ModeIndex::new(*f, -(b as i64)).expect("admissible mode");
                    if let Some((e, rest)) = ms.without(partner) {
                        let c = &wc * f.bracket(&self.k) * int(b as i64) * int(e as i64);
                        emit(&rest, c, exponent + s + b as i64);
                    }
                }
                let top = exponent + s;
                if top >= 1 {
                    for b in f.positive_modes(top as u64) {
                        let mode = ModeIndex::new(*f, -(b as i64)).expect("admissible mode");
                        emit(&ms.times(mode), wc.clone(), top - b as i64);
                    }
                }
            }
        }
        out.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m, c * &self.scale)).collect()
    }
}

fn pow(x: &Rat, e: u32) -> Rat {
    (0..e).fold(Rat::one(), |acc, _| acc * x)
}

fn factorial(e: u32) -> Rat {
    (1..=e as i64).fold(Rat::one(), |acc, i| acc * int(i))
}

/// Images keyed by charge, then monomial, then mode.
type Memo = RwLock<HashMap<Rat, HashMap<FockMonomial, HashMap<i64, Arc<Terms>>>>>;

fn memoized(memo: &Memo, j: &Rat, n: i64, m: &FockMonomial, compute: impl FnOnce() -> Terms) -> Arc<Terms> {
    if let Some(hit) = memo.read().unwrap().get(j).and_then(|a| a.get(m)).and_then(|b| b.get(&n)) {
        return hit.clone();
    }
    let image = Arc::new(compute());
    memo.write()
        .unwrap()
        .entry(j.clone())
        .or_default()
        .entry(m.clone())
        .or_default()
        .insert(n, image.clone());
    image
}

/// The realization at a fixed level, with memoized mode actions.
///
/// Caches are keyed by `(charge, mode, monomial)` and are safe to share
/// between threads.
#[derive(Debug)]
pub struct Realization {
    params: ModuleParams,
    x: VertexExpansion,
    screening: VertexExpansion,
    x_memo: Memo,
    s_memo: Memo,
}

impl Realization {
    pub fn new(params: ModuleParams) -> Self {
        let k = params.k();
        Realization {
            x: VertexExpansion::x_current(&k),
            screening: VertexExpansion::screening_current(&k),
            params,
            x_memo: RwLock::default(),
            s_memo: RwLock::default(),
        }
    }

    pub fn params(&self) -> &ModuleParams {
        &self.params
    }

    pub fn k(&self) -> Rat {
        self.params.k()
    }

    fn check_sector(&self, v: &FockVector) {
        assert_eq!(&v.sector().params, &self.params, "vector from a different level");
    }

    /// `π(β_n) = ½ φ_{0,n}` for odd `n`; even `n` acts as zero.
    pub fn act_beta(&self, n: i64, v: &FockVector) -> Result<FockVector> {
        self.check_sector(v);
        if n == 0 {
            return Err(Error::NoBetaZeroMode);
        }
        if n % 2 == 0 {
            return Ok(FockVector::zero(v.sector().clone()));
        }
        Ok(crate::fock::apply_mode(Family::Zero, n, v)?.scale(&rat(1, 2)))
    }

    /// `π(x_n)`, negated under the twist.
    pub fn act_x(&self, n: i64, v: &FockVector, twist: bool) -> FockVector {
        self.check_sector(v);
        let sector = v.sector();
        let mut out = FockVector::zero(sector.clone());
        for (m, c) in v.terms() {
            let image = memoized(&self.x_memo, &sector.j, n, m, || self.x.apply_monomial(-n, sector, m));
            for (im, ic) in image.iter() {
                out.add_term(im.clone(), ic * c);
            }
        }
        if twist {
            out.scale(&-Rat::one())
        } else {
            out
        }
    }

    /// `d`-eigenvalue `h + N` applied term by term, negated: `π(ρ) = -d`.
    pub fn act_rho(&self, v: &FockVector) -> FockVector {
        let h = v.sector().h();
        let mut out = FockVector::zero(v.sector().clone());
        for (m, c) in v.terms() {
            out.add_term(m.clone(), -(c * (&h + int(m.degree() as i64))));
        }
        out
    }

    pub fn act_generator(&self, g: GeneratorAction, v: &FockVector) -> Result<FockVector> {
        match g.symbol {
            Generator::Beta(n) => self.act_beta(n, v),
            Generator::X(n) => Ok(self.act_x(n, v, g.twist)),
            Generator::Central => Ok(v.scale(&self.k())),
            Generator::Rho => Ok(self.act_rho(v)),
        }
    }

    /// Fractional part `F = 2(1 - j)/(k+2)` of the ζ-exponents of `S(ζ)` on `F_j`.
    pub fn screening_offset(&self, j: &Rat) -> Rat {
        self.screening.fractional_offset(j)
    }

    /// Exact coefficient of `ζ^r` in `S(ζ) v`, living in the sector `j - 2`.
    pub fn screening_coefficient(&self, r: &Rat, v: &FockVector) -> Result<FockVector> {
        self.check_sector(v);
        let sector = v.sector();
        let integral = r - self.screening.fractional_offset(&sector.j);
        if !is_odd_integer(&integral) {
            return Err(Error::UnreachableExponent(r.clone()));
        }
        let exponent = to_i64(&integral).expect("exponent fits in i64");
        let target = sector.shifted(&self.screening.sector_shift());
        let mut out = FockVector::zero(target);
        for (m, c) in v.terms() {
            let image =
                memoized(&self.s_memo, &sector.j, exponent, m, || self.screening.apply_monomial(exponent, sector, m));
            for (im, ic) in image.iter() {
                out.add_term(im.clone(), ic * c);
            }
        }
        Ok(out)
    }

    /// Whether `Q¹` (the `ζ^0` coefficient) is defined on `F_j`: the
    /// offset must be an odd integer so that the integrand is single-valued
    /// in `ζ²`.
    pub fn screening_defined(&self, j: &Rat) -> bool {
        is_odd_integer(&self.screening.fractional_offset(j))
    }

    /// Charge shift of the screening current.
    pub fn screening_shift(&self) -> Rat {
        self.screening.sector_shift()
    }
}

pub fn act_beta(n: i64, v: &FockVector) -> Result<FockVector> {
    Realization::new(v.sector().params.clone()).act_beta(n, v)
}

pub fn act_x(n: i64, v: &FockVector, twist: bool) -> FockVector {
    Realization::new(v.sector().params.clone()).act_x(n, v, twist)
}

pub fn act_generator(g: GeneratorAction, v: &FockVector) -> Result<FockVector> {
    Realization::new(v.sector().params.clone()).act_generator(g, v)
}

pub fn screening_coefficient(r: &Rat, v: &FockVector) -> Result<FockVector> {
    Realization::new(v.sector().params.clone()).screening_coefficient(r, v)
}

/// One failed identity in a relation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFailure {
    pub relation: String,
    pub j: Rat,
    pub vector: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationReport {
    pub checks: usize,
    pub failures: Vec<RelationFailure>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: RelationReport) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }
}

fn beta_or_zero(r: &Realization, n: i64, v: &FockVector) -> FockVector {
    if n % 2 == 0 {
        FockVector::zero(v.sector().clone())
    } else {
        r.act_beta(n, v).expect("odd beta mode")
    }
}

/// Defining relations of the algebra on every basis monomial of degree
/// `≤ max_degree` in `F_j`, for `|m|, |n| ≤ mode_bound`:
///
/// * `[β_m, β_n] = m k δ_{m+n,0}` (odd `m, n`)
/// * `[β_m, x_n] = 2 x_{m+n}` (odd `m`)
/// * `[x_m, x_n] = -2(-1)^m β_{m+n} + m k (-1)^m δ_{m+n,0}`, with `β` of even index zero
/// * `[ρ, β_n] = n β_n`, `[ρ, x_n] = n x_n`
///
/// `twist` runs the same suite for the action composed with `σ`.
pub fn relation_suite(r: &Realization, j: &Rat, max_degree: u64, mode_bound: i64, twist: bool) -> RelationReport {
    let sector = SectorLabel::new(r.params().clone(), j.clone());
    let k = r.k();
    let mut report = RelationReport::default();
    let check = |name: String, lhs: FockVector, rhs: FockVector, v: &FockVector, report: &mut RelationReport| {
        report.checks += 1;
        if lhs != rhs {
            report.failures.push(RelationFailure { relation: name, j: j.clone(), vector: v.to_string() });
        }
    };
    let x = |n: i64, v: &FockVector| r.act_x(n, v, twist);
    let modes: Vec<i64> = (-mode_bound..=mode_bound).collect();
    let reach: Vec<i64> = (-2 * mode_bound..=2 * mode_bound).collect();
    for d in 0..=max_degree {
        for m in crate::fock::enumerate_basis(&sector, d) {
            let v = FockVector::monomial(sector.clone(), m, Rat::one());
            let xv: BTreeMap<i64, FockVector> = reach.iter().map(|&n| (n, x(n, &v))).collect();
            let bv: BTreeMap<i64, FockVector> = reach.iter().map(|&n| (n, beta_or_zero(r, n, &v))).collect();
            // x_a x_b v, shared by [x_a, x_b] and [x_b, x_a]
            let xxv: BTreeMap<(i64, i64), FockVector> =
                modes.iter().flat_map(|&a| modes.iter().map(move |&b| (a, b))).map(|(a, b)| ((a, b), x(a, &xv[&b]))).collect();
            for &a in &modes {
                for &b in &modes {
                    let sign = if a % 2 == 0 { int(1) } else { int(-1) };
                    if a % 2 != 0 && b % 2 != 0 {
                        let lhs = beta_or_zero(r, a, &bv[&b]).sub(&beta_or_zero(r, b, &bv[&a]));
                        let rhs = if a + b == 0 { v.scale(&(int(a) * &k)) } else { FockVector::zero(sector.clone()) };
                        check(format!("[beta_{a}, beta_{b}]"), lhs, rhs, &v, &mut report);
                    }
                    if a % 2 != 0 {
                        let lhs = beta_or_zero(r, a, &xv[&b]).sub(&x(b, &bv[&a]));
                        let rhs = xv[&(a + b)].scale(&int(2));
                        check(format!("[beta_{a}, x_{b}]"), lhs, rhs, &v, &mut report);
                    }
                    let lhs = xxv[&(a, b)].sub(&xxv[&(b, a)]);
                    let rhs = if a + b == 0 {
                        v.scale(&(int(a) * &k * &sign))
                    } else {
                        bv[&(a + b)].scale(&(int(-2) * &sign))
                    };
                    check(format!("[x_{a}, x_{b}]"), lhs, rhs, &v, &mut report);
                }
                let rho = |w: &FockVector| r.act_rho(w);
                if a % 2 != 0 {
                    let lhs = rho(&bv[&a]).sub(&beta_or_zero(r, a, &rho(&v)));
                    check(format!("[rho, beta_{a}]"), lhs, bv[&a].scale(&int(a)), &v, &mut report);
                }
                let lhs = rho(&xv[&a]).sub(&x(a, &rho(&v)));
                check(format!("[rho, x_{a}]"), lhs, xv[&a].scale(&int(a)), &v, &mut report);
            }
        }
    }
    report
}

/// `β_n ν_j = x_n ν_j = 0` for `0 < n ≤ max_mode` and `x_0 ν_j = j ν_j`.
pub fn highest_weight_suite(r: &Realization, j: &Rat, max_mode: i64) -> RelationReport {
    let sector = SectorLabel::new(r.params().clone(), j.clone());
    let vac = FockVector::vacuum(sector.clone());
    let mut report = RelationReport::default();
    let mut check = |name: String, ok: bool| {
        report.checks += 1;
        if !ok {
            report.failures.push(RelationFailure { relation: name, j: j.clone(), vector: vac.to_string() });
        }
    };
    for n in 1..=max_mode {
        check(format!("x_{n} nu"), r.act_x(n, &vac, false).is_zero());
        check(format!("beta_{n} nu"), beta_or_zero(r, n, &vac).is_zero());
    }
    check("x_0 nu = j nu".into(), r.act_x(0, &vac, false) == vac.scale(j));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: Rat) -> ModuleParams {
        ModuleParams::generic(k).unwrap()
    }

    fn vac(k: Rat, j: Rat) -> FockVector {
        FockVector::vacuum(SectorLabel::new(params(k), j))
    }

    fn mono(modes: &[(Family, i64)]) -> FockMonomial {
        FockMonomial::from_modes(modes.iter().map(|&(f, n)| ModeIndex::new(f, n).unwrap())).unwrap()
    }

    #[test]
    fn beta_modes() {
        let v = vac(int(1), rat(1, 2));
        assert!(act_beta(1, &v).unwrap().is_zero());
        let b = act_beta(-1, &v).unwrap();
        assert_eq!(b, FockVector::monomial(v.sector().clone(), mono(&[(Family::Zero, -1)]), rat(1, 2)));
        assert_eq!(act_beta(1, &b).unwrap(), v.scale(&int(1)));
        assert!(act_beta(2, &b).unwrap().is_zero());
        assert_eq!(act_beta(0, &v), Err(Error::NoBetaZeroMode));
    }

    #[test]
    fn x_on_vacuum() {
        let k = rat(7, 5);
        let j = rat(1, 2);
        let v = vac(k.clone(), j.clone());
        assert_eq!(act_x(0, &v, false), v.scale(&j));
        let xm1 = act_x(-1, &v, false);
        let mut expected = FockVector::zero(v.sector().clone());
        expected.add_term(mono(&[(Family::Zero, -1)]), &j / &k);
        expected.add_term(mono(&[(Family::Two, -1)]), &j / &k + rat(1, 2));
        assert_eq!(xm1, expected);
        assert_eq!(act_x(1, &xm1, false), v.scale(&-k.clone()));
        assert_eq!(act_x(0, &v, true), v.scale(&-j));
    }

    #[test]
    fn x_minus_one_coefficient_at_level_one() {
        let v = vac(int(1), rat(1, 2));
        let xm1 = act_x(-1, &v, false);
        assert_eq!(xm1.coefficient(v.sector(), &mono(&[(Family::Two, -1)])).unwrap(), int(1));
    }

    #[test]
    fn central_and_rho() {
        let v = vac(int(1), rat(1, 2));
        let c = act_generator(GeneratorAction::new(Generator::Central), &v).unwrap();
        assert_eq!(c, v.scale(&int(1)));
        let rho = act_generator(GeneratorAction::new(Generator::Rho), &v).unwrap();
        assert_eq!(rho, v.scale(&rat(-1, 8)));
        let w = crate::fock::apply_mode(Family::Zero, -1, &v).unwrap();
        let rho_w = act_generator(GeneratorAction::new(Generator::Rho), &w).unwrap();
        assert_eq!(rho_w, w.scale(&rat(-9, 8)));
    }

    #[test]
    fn x_degree_bookkeeping() {
        let r = Realization::new(params(rat(1, 3)));
        let sector = SectorLabel::new(r.params().clone(), int(2));
        for d in 0..=4 {
            for m in crate::fock::enumerate_basis(&sector, d) {
                let v = FockVector::monomial(sector.clone(), m, int(1));
                for n in -3i64..=3 {
                    let img = r.act_x(n, &v, false);
                    if let Some(deg) = img.homogeneous_degree() {
                        assert_eq!(deg as i64, d as i64 - n);
                    } else {
                        assert!(img.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn screening_reachability() {
        let p = ModuleParams::rational(3, 1).unwrap();
        let r = Realization::new(p.clone());
        assert_eq!(r.screening_offset(&rat(5, 2)), int(-1));
        assert!(r.screening_defined(&rat(5, 2)));
        let v = FockVector::vacuum(SectorLabel::new(p.clone(), rat(5, 2)));
        let s = r.screening_coefficient(&int(0), &v).unwrap();
        assert_eq!(s.sector().j, rat(1, 2));
        assert_eq!(s.homogeneous_degree(), Some(1));
        assert_eq!(
            s,
            FockVector::monomial(s.sector().clone(), mono(&[(Family::Two, -1)]), rat(1, 2))
        );
        let w = FockVector::vacuum(SectorLabel::new(p, int(0)));
        assert_eq!(r.screening_offset(&int(0)), rat(2, 3));
        for e in -3..=3 {
            assert!(matches!(r.screening_coefficient(&int(e), &w), Err(Error::UnreachableExponent(_))));
        }
    }

    #[test]
    fn small_relation_suite() {
        let r = Realization::new(params(rat(7, 5)));
        for j in [int(0), rat(1, 2)] {
            let rep = relation_suite(&r, &j, 3, 2, false);
            assert!(rep.passed(), "{:?}", rep.failures.first());
            let rep = relation_suite(&r, &j, 2, 2, true);
            assert!(rep.passed(), "{:?}", rep.failures.first());
            assert!(highest_weight_suite(&r, &j, 5).passed());
        }
    }
}
