use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rat;
use crate::error::{Error, Result};

/// Dense univariate polynomial over the rationals, coefficients by ascending degree.
///
/// The highest stored coefficient is never zero; the zero polynomial has no
/// coefficients at all.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rat) -> Self {
        Poly::new(vec![c])
    }

    /// `j - root`
    pub fn linear(root: &Rat) -> Self {
        Poly::new(vec![-root.clone(), Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn monic(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lead) => Poly::new(self.coeffs.iter().map(|c| c / lead).collect()),
        }
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rat::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + other.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (k, b) in other.coeffs.iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, e: usize) -> Poly {
        (0..e).fold(Poly::constant(Rat::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dlead = divisor.leading().expect("division by the zero polynomial");
        let ddeg = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Rat::zero(); rem.len() - ddeg];
        for i in (ddeg..rem.len()).rev() {
            let c = &rem[i] / dlead;
            if c.is_zero() {
                continue;
            }
            for (k, d) in divisor.coeffs.iter().enumerate() {
                rem[i - ddeg + k] -= &c * d;
            }
            quot[i - ddeg] = c;
        }
        rem.truncate(ddeg);
        (Poly::new(quot), Poly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free decomposition: pairs `(P_i, i)` with `self = c * Π P_i^i`,
    /// each `P_i` monic, square-free, non-constant and pairwise coprime.
    pub fn square_free_decomposition(&self) -> Vec<(Poly, usize)> {
        // Yun's algorithm (characteristic zero).
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// All rational roots with multiplicities, ascending, plus the cofactor
    /// that has no rational roots.
    pub fn rational_roots(&self) -> Result<(Vec<(Rat, usize)>, Poly)> {
        let mut roots: BTreeMap<Rat, usize> = BTreeMap::new();
        let mut cofactor = Poly::constant(Rat::one());
        for (part, mult) in self.square_free_decomposition() {
            let mut rest = part;
            for r in square_free_rational_roots(&rest)? {
                rest = rest.div_rem(&Poly::linear(&r)).0;
                *roots.entry(r).or_default() += mult;
            }
            cofactor = cofactor.mul(&rest.pow(mult));
        }
        Ok((roots.into_iter().collect(), cofactor))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*j"),
                _ => format!("({c})*j^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// Rational roots of a square-free polynomial via the rational root theorem.
fn square_free_rational_roots(p: &Poly) -> Result<Vec<Rat>> {
    let mut ints = primitive_integer_coeffs(p);
    let mut roots = Vec::new();
    if ints.is_empty() {
        return Ok(roots);
    }
    if ints[0].is_zero() {
        roots.push(Rat::zero());
        ints.remove(0);
    }
    if ints.len() < 2 {
        return Ok(roots);
    }
    let num_divs = divisors(&ints[0].abs())?;
    let den_divs = divisors(&ints.last().unwrap().abs())?;
    let q = Poly::new(ints.iter().cloned().map(Rat::from_integer).collect());
    let mut found = Vec::new();
    for a in &num_divs {
        for b in &den_divs {
            if !a.gcd(b).is_one() {
                continue;
            }
            for sign in [1, -1] {
                let cand = Rat::new(a * sign, b.clone());
                if q.eval(&cand).is_zero() {
                    found.push(cand);
                }
            }
        }
    }
    found.sort();
    found.dedup();
    roots.extend(found);
    roots.sort();
    Ok(roots)
}

fn primitive_integer_coeffs(p: &Poly) -> Vec<BigInt> {
    let lcm = p
        .coeffs()
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if g.is_zero() {
        return Vec::new();
    }
    ints.into_iter().map(|c| c / &g).collect()
}

const MAX_TRIAL_DIVISION: u64 = 1 << 40;

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n
        .to_u64()
        .filter(|&n| n <= MAX_TRIAL_DIVISION)
        .ok_or_else(|| Error::RootSearch(format!("coefficient {n} too large to factor")))?;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(BigInt::from(d));
            if d * d != n {
                large.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

/// Unique polynomial of degree at most `degree_bound` through the samples,
/// by Newton divided differences on the first `degree_bound + 1` points.
/// Any further samples must lie on the same polynomial.
pub fn interpolate_poly(samples: &[(Rat, Rat)], degree_bound: usize) -> Result<Poly> {
    let needed = degree_bound + 1;
    if samples.len() < needed {
        return Err(Error::InsufficientSamples { needed, got: samples.len() });
    }
    let mut xs: Vec<&Rat> = samples.iter().map(|(x, _)| x).collect();
    xs.sort();
    if let Some(w) = xs.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DegenerateInterpolation(w[0].clone()));
    }
    let pts = &samples[..needed];
    let mut table: Vec<Rat> = pts.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..needed {
        for i in (level..needed).rev() {
            table[i] = (&table[i] - &table[i - 1]) / (&pts[i].0 - &pts[i - level].0);
        }
    }
    let mut result = Poly::constant(table[needed - 1].clone());
    for i in (0..needed - 1).rev() {
        result = result.mul(&Poly::linear(&pts[i].0)).add(&Poly::constant(table[i].clone()));
    }
    for (x, y) in &samples[needed..] {
        if &result.eval(x) != y {
            return Err(Error::InconsistentSamples(x.clone()));
        }
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use proptest::prelude::*;

    fn pts(v: &[(i64, i64)]) -> Vec<(Rat, Rat)> {
        v.iter().map(|&(x, y)| (int(x), int(y))).collect()
    }

    #[test]
    fn identity_line() {
        let p = interpolate_poly(&pts(&[(0, 0), (1, 1), (2, 2)]), 1).unwrap();
        assert_eq!(p, Poly::new(vec![int(0), int(1)]));
    }

    #[test]
    fn constant_case() {
        let p = interpolate_poly(&pts(&[(0, 1), (1, 1), (2, 1)]), 2).unwrap();
        assert_eq!(p, Poly::constant(int(1)));
    }

    #[test]
    fn closed_form_det_c1() {
        // (j + k/2)/(2k) at k = 1, evaluated by hand: 1/4, 3/4, 5/4.
        let samples = vec![(int(0), rat(1, 4)), (int(1), rat(3, 4)), (int(2), rat(5, 4))];
        let p = interpolate_poly(&samples, 2).unwrap();
        assert_eq!(p, Poly::new(vec![rat(1, 4), rat(1, 2)]));
    }

    #[test]
    fn interpolation_errors() {
        assert!(matches!(
            interpolate_poly(&pts(&[(0, 0), (0, 1)]), 1),
            Err(Error::DegenerateInterpolation(_))
        ));
        assert!(matches!(
            interpolate_poly(&pts(&[(0, 0)]), 1),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn roots_with_multiplicity() {
        // (j + 1/2)^2 (j - 1/2) (j^2 + 1)
        let p = Poly::linear(&rat(-1, 2))
            .pow(2)
            .mul(&Poly::linear(&rat(1, 2)))
            .mul(&Poly::new(vec![int(1), int(0), int(1)]))
            .scale(&rat(7, 3));
        let (roots, cof) = p.rational_roots().unwrap();
        assert_eq!(roots, vec![(rat(-1, 2), 2), (rat(1, 2), 1)]);
        assert_eq!(cof, Poly::new(vec![int(1), int(0), int(1)]));
    }

    #[test]
    fn root_at_zero() {
        let p = Poly::new(vec![int(0), int(0), int(3)]);
        assert_eq!(p.rational_roots().unwrap().0, vec![(int(0), 2)]);
    }

    proptest! {
        #[test]
        fn interpolation_round_trip(coeffs in prop::collection::vec((-20i64..20, 1i64..6), 0..7)) {
            let p = Poly::new(coeffs.iter().map(|&(n, d)| rat(n, d)).collect());
            let d = p.degree().unwrap_or(0);
            let samples: Vec<(Rat, Rat)> = (0..=d as i64)
                .map(|x| { let x = rat(2 * x - 3, 2); (x.clone(), p.eval(&x)) })
                .collect();
            prop_assert_eq!(interpolate_poly(&samples, d).unwrap(), p);
        }

        #[test]
        fn roots_of_products_are_recovered(rs in prop::collection::vec((-9i64..9, 1i64..4), 1..5)) {
            let p = rs.iter().fold(Poly::constant(int(1)), |acc, &(n, d)| acc.mul(&Poly::linear(&rat(n, d))));
            let (roots, cof) = p.rational_roots().unwrap();
            let total: usize = roots.iter().map(|(_, m)| m).sum();
            prop_assert_eq!(total, rs.len());
            prop_assert_eq!(cof.degree(), Some(0));
            for (r, _) in roots { prop_assert!(p.eval(&r).is_zero()); }
        }
    }
}
