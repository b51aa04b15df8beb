use num_traits::{One, Zero};

use super::{is_integer, to_i64, Rat};
use crate::error::{Error, Result};

/// Truncated q-series `q^offset * Σ_{n=0}^{order} c_n q^n`.
///
/// Coefficients past `order` are unknown, not zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSeries {
    pub offset: Rat,
    pub coeffs: Vec<Rat>,
}

impl CharacterSeries {
    pub fn new(offset: Rat, coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a series must be defined through order 0");
        CharacterSeries { offset, coeffs }
    }

    pub fn zero(offset: Rat, order: usize) -> Self {
        CharacterSeries::new(offset, vec![Rat::zero(); order + 1])
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scale(&self, c: &Rat) -> Self {
        CharacterSeries::new(self.offset.clone(), self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn with_offset(&self, offset: Rat) -> Self {
        CharacterSeries::new(offset, self.coeffs.clone())
    }

    /// Integer distance `other.offset - self.offset`.
    fn gap(&self, other: &CharacterSeries) -> Result<i64> {
        let d = &other.offset - &self.offset;
        if !is_integer(&d) {
            return Err(Error::IncommensurateGradings(self.offset.clone(), other.offset.clone()));
        }
        Ok(to_i64(&d).expect("offset gap fits in i64"))
    }

    /// `self + c * other`, defined on the overlap of both truncations and
    /// reported relative to the lower offset.
    pub fn add_scaled(&self, other: &CharacterSeries, c: &Rat) -> Result<Self> {
        let gap = self.gap(other)?;
        let (low, high, high_scale, low_scale, shift) = if gap >= 0 {
            (self, other, c.clone(), Rat::one(), gap as usize)
        } else {
            (other, self, Rat::one(), c.clone(), (-gap) as usize)
        };
        let order = low.order().min(shift + high.order());
        let coeffs = (0..=order)
            .map(|n| {
                let mut v = &low.coeffs[n] * &low_scale;
                if n >= shift {
                    v += &high.coeffs[n - shift] * &high_scale;
                }
                v
            })
            .collect();
        Ok(CharacterSeries::new(low.offset.clone(), coeffs))
    }

    pub fn add(&self, other: &CharacterSeries) -> Result<Self> {
        self.add_scaled(other, &Rat::one())
    }

    pub fn sub(&self, other: &CharacterSeries) -> Result<Self> {
        self.add_scaled(other, &-Rat::one())
    }

    pub fn truncate(&self, order: usize) -> Self {
        CharacterSeries::new(self.offset.clone(), self.coeffs[..=order.min(self.order())].to_vec())
    }
}

/// Exponents `start, start + step, …`, optionally only `count` of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Progression {
    pub start: u64,
    pub step: u64,
    pub count: Option<u64>,
}

impl Progression {
    /// 1, 2, 3, …
    pub const ALL: Progression = Progression { start: 1, step: 1, count: None };
    /// 1, 3, 5, …
    pub const ODD: Progression = Progression { start: 1, step: 2, count: None };
    /// 2, 4, 6, …
    pub const EVEN: Progression = Progression { start: 2, step: 2, count: None };

    fn exponents(&self, bound: u64) -> impl Iterator<Item = u64> + '_ {
        assert!(self.step > 0, "progression step must be positive");
        (0..self.count.unwrap_or(u64::MAX))
            .map(move |i| self.start + i * self.step)
            .take_while(move |&e| e <= bound)
    }
}

/// `Π_{e ∈ progression} (1 - x^e)^power`; negative powers are geometric series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub progression: Progression,
    pub power: i64,
}

impl Factor {
    pub fn inverse(progression: Progression) -> Self {
        Factor { progression, power: -1 }
    }
}

/// Expands a product of progression factors through degree `order`.
pub fn product_series(factors: &[Factor], order: usize) -> CharacterSeries {
    let mut c = vec![Rat::zero(); order + 1];
    c[0] = Rat::one();
    for f in factors {
        assert!(f.progression.start > 0, "exponent 0 makes (1 - x^0) vanish");
        for e in f.progression.exponents(order as u64) {
            let e = e as usize;
            for _ in 0..f.power.unsigned_abs() {
                if f.power < 0 {
                    for n in e..=order {
                        let prev = c[n - e].clone();
                        c[n] += prev;
                    }
                } else {
                    for n in (e..=order).rev() {
                        let prev = c[n - e].clone();
                        c[n] -= prev;
                    }
                }
            }
        }
    }
    CharacterSeries::new(Rat::zero(), c)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Discrepancy {
    /// Index counted from the lower of the two offsets.
    pub degree: usize,
    pub exponent: Rat,
    pub left: Rat,
    pub right: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub equal: bool,
    /// Number of aligned coefficients that were compared.
    pub compared: usize,
    pub first_discrepancy: Option<Discrepancy>,
}

/// Coefficient-exact comparison over the overlap of the two truncations.
pub fn series_compare(a: &CharacterSeries, b: &CharacterSeries) -> Result<Comparison> {
    let gap = a.gap(b)?;
    let base = if gap >= 0 { a.offset.clone() } else { b.offset.clone() };
    let (sa, sb) = if gap >= 0 { (0usize, gap as usize) } else { ((-gap) as usize, 0usize) };
    let top = (sa + a.order()).min(sb + b.order());
    let zero = Rat::zero();
    let at = |s: &CharacterSeries, shift: usize, n: usize| -> Rat {
        if n < shift { zero.clone() } else { s.coeffs[n - shift].clone() }
    };
    for n in 0..=top {
        let (l, r) = (at(a, sa, n), at(b, sb, n));
        if l != r {
            return Ok(Comparison {
                equal: false,
                compared: n + 1,
                first_discrepancy: Some(Discrepancy {
                    degree: n,
                    exponent: &base + Rat::from_integer(n.into()),
                    left: l,
                    right: r,
                }),
            });
        }
    }
    Ok(Comparison { equal: true, compared: top + 1, first_discrepancy: None })
}
