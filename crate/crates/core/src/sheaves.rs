//! Chern/Segre calculus for formal sheaf classes.
//!
//! A [`SheafClass`] is a pair (rank, total Chern class); nothing about local
//! freeness or positivity is represented. Rank 0 is allowed for torsion
//! classes, but such classes cannot be used to build projective bundles.

use crate::polyring::{Coeff, GradedPolynomial, PolyError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SheafError {
    #[error("total Chern class must have constant term 1, found {0}")]
    NonUnitChern(Coeff),
    #[error("quotient would have negative rank ({0} minus {1})")]
    RankUnderflow(u32, u32),
    #[error("twisting class is not homogeneous of weight 1")]
    InhomogeneousLine,
    #[error("Chern index {index} out of range for rank {rank}")]
    IndexRange { index: u32, rank: u32 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Integer-valued generalized binomial coefficient, defined for any integer
/// upper argument: binom(n, k) = n(n-1)...(n-k+1) / k!.
pub fn binomial(n: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    for t in 0..k as i64 {
        num *= BigInt::from(n - t);
    }
    let mut den = BigInt::one();
    for t in 1..=k as i64 {
        den *= BigInt::from(t);
    }
    // the product of k consecutive integers is divisible by k!
    num / den
}

/// Formal sheaf class: rank plus total Chern class with constant term 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafClass {
    rank: u32,
    chern: GradedPolynomial,
}

impl SheafClass {
    pub fn new(rank: u32, chern: GradedPolynomial) -> Result<Self, SheafError> {
        let c0 = chern.constant_term();
        if !c0.is_one() {
            return Err(SheafError::NonUnitChern(c0));
        }
        Ok(SheafClass { rank, chern })
    }

    /// Trivial bundle of the given rank: total Chern class 1.
    pub fn trivial(
        table: Arc<crate::polyring::VariableTable>,
        bound: u32,
        rank: u32,
    ) -> Self {
        SheafClass { rank, chern: GradedPolynomial::one(table, bound) }
    }

    /// Line-bundle class with first Chern class `c1` (homogeneous of weight 1).
    pub fn line(c1: GradedPolynomial) -> Result<Self, SheafError> {
        if !c1.is_homogeneous_of(1) {
            return Err(SheafError::InhomogeneousLine);
        }
        let chern = GradedPolynomial::one(c1.table().clone(), c1.bound()).add(&c1);
        Ok(SheafClass { rank: 1, chern })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn chern(&self) -> &GradedPolynomial {
        &self.chern
    }

    /// The component c_k of the total Chern class.
    pub fn chern_component(&self, k: u32) -> GradedPolynomial {
        self.chern.weight_component(k)
    }

    /// Dual class: same rank, c_i negated in odd weights.
    pub fn dual(&self) -> SheafClass {
        let mut chern = GradedPolynomial::zero(self.chern.table().clone(), self.chern.bound());
        for (m, c) in self.chern.terms() {
            let c = if m.weight() % 2 == 1 { -c.clone() } else { c.clone() };
            chern.insert_term(m.clone(), c);
        }
        SheafClass { rank: self.rank, chern }
    }

    /// Direct sum: ranks add, total Chern classes multiply (Whitney).
    pub fn direct_sum(&self, other: &SheafClass) -> SheafClass {
        SheafClass {
            rank: self.rank + other.rank,
            chern: self.chern.mul(&other.chern),
        }
    }

    /// Formal quotient class with c = c(self)/c(other).
    pub fn quotient(&self, other: &SheafClass) -> Result<SheafClass, SheafError> {
        if self.rank < other.rank {
            return Err(SheafError::RankUnderflow(self.rank, other.rank));
        }
        let chern = self.chern.mul(&other.chern.invert_unit_series()?);
        Ok(SheafClass { rank: self.rank - other.rank, chern })
    }

    /// Total Segre series: the inverse of the total Chern class.
    pub fn segre(&self) -> GradedPolynomial {
        self.chern
            .invert_unit_series()
            .expect("total Chern class starts with 1")
    }

    pub fn segre_component(&self, k: u32) -> GradedPolynomial {
        self.segre().weight_component(k)
    }

    /// Twist by a line-bundle class `l` (homogeneous of weight 1):
    /// c_k of the twist is sum_i binom(rank - i, k - i) c_i l^(k-i).
    pub fn tensor_line(&self, l: &GradedPolynomial) -> Result<SheafClass, SheafError> {
        if !l.is_homogeneous_of(1) {
            return Err(SheafError::InhomogeneousLine);
        }
        let table = self.chern.table().clone();
        let bound = self.chern.bound();
        let mut chern = GradedPolynomial::zero(table.clone(), bound);
        for k in 0..=bound {
            for i in 0..=k {
                let ci = self.chern_component(i);
                if ci.is_zero() {
                    continue;
                }
                let b = binomial(self.rank as i64 - i as i64, k - i);
                if b.is_zero() {
                    continue;
                }
                chern = chern.add(&ci.mul(&l.pow(k - i)).scale(&b));
            }
        }
        Ok(SheafClass { rank: self.rank, chern })
    }

    /// Remaps the Chern data into a larger table (tower embedding).
    pub fn remap(
        &self,
        table: Arc<crate::polyring::VariableTable>,
        bound: u32,
        var_map: &[usize],
    ) -> SheafClass {
        SheafClass { rank: self.rank, chern: self.chern.remap(table, bound, var_map) }
    }
}

/// c_k of the twisted relative cotangent bundle on a projective bundle:
/// sum_{i=0..k} (-1)^i zeta^i c_{k-i}(e), for 0 <= k <= rank(e) - 1.
pub fn cotangent_twist_chern(
    e: &SheafClass,
    k: u32,
    zeta: &GradedPolynomial,
) -> Result<GradedPolynomial, SheafError> {
    if e.rank() == 0 || k > e.rank() - 1 {
        return Err(SheafError::IndexRange { index: k, rank: e.rank() });
    }
    if !zeta.is_homogeneous_of(1) {
        return Err(SheafError::InhomogeneousLine);
    }
    let mut out = GradedPolynomial::zero(zeta.table().clone(), zeta.bound());
    for i in 0..=k {
        let sign = if i % 2 == 0 { Coeff::one() } else { -Coeff::one() };
        out = out.add(&zeta.pow(i).mul(&e.chern_component(k - i)).scale(&sign));
    }
    Ok(out)
}

/// Total Chern class of the twisted relative cotangent bundle, i.e. the sum
/// of [`cotangent_twist_chern`] over all k in range, as a rank r-1 class.
pub fn cotangent_twist_class(
    e: &SheafClass,
    zeta: &GradedPolynomial,
) -> Result<SheafClass, SheafError> {
    let mut chern = GradedPolynomial::zero(zeta.table().clone(), zeta.bound());
    for k in 0..e.rank() {
        chern = chern.add(&cotangent_twist_chern(e, k, zeta)?);
    }
    SheafClass::new(e.rank() - 1, chern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::{Monomial, VariableTable};

    fn table_c12() -> Arc<VariableTable> {
        Arc::new(VariableTable::new(vec![("c1".into(), 1), ("c2".into(), 2)]).unwrap())
    }

    fn generic_rank2(bound: u32) -> SheafClass {
        let t = table_c12();
        let chern = GradedPolynomial::one(t.clone(), bound)
            .add(&GradedPolynomial::variable(t.clone(), bound, 0))
            .add(&GradedPolynomial::variable(t.clone(), bound, 1));
        SheafClass::new(2, chern).unwrap()
    }

    #[test]
    fn binomial_generalized() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(0, 0), BigInt::from(1));
        assert_eq!(binomial(-1, 3), BigInt::from(-1));
        assert_eq!(binomial(-2, 2), BigInt::from(3));
    }

    #[test]
    fn dual_flips_odd_components() {
        let e = generic_rank2(4);
        let d = e.dual();
        assert_eq!(d.chern_component(1), e.chern_component(1).neg());
        assert_eq!(d.chern_component(2), e.chern_component(2));
        assert_eq!(d.dual(), e);
    }

    #[test]
    fn trivial_is_self_dual() {
        let t = table_c12();
        let e = SheafClass::trivial(t, 4, 3);
        assert_eq!(e.dual(), e);
    }

    #[test]
    fn quotient_by_trivial_is_identity() {
        let e = generic_rank2(4);
        let t = SheafClass::trivial(e.chern().table().clone(), 4, 0);
        let q = e.quotient(&t).unwrap();
        assert_eq!(q, e);
    }

    #[test]
    fn quotient_multiplies_back() {
        // e = (1, 1+a), f = (1, 1+b), oracle: c(q) * c(f) = c(e)
        let t = Arc::new(VariableTable::new(vec![("a".into(), 1), ("b".into(), 1)]).unwrap());
        let a = GradedPolynomial::variable(t.clone(), 4, 0);
        let b = GradedPolynomial::variable(t.clone(), 4, 1);
        let e = SheafClass::line(a).unwrap();
        let f = SheafClass::line(b).unwrap();
        let q = e.quotient(&f).unwrap();
        assert_eq!(q.rank(), 0);
        assert_eq!(q.chern().mul(f.chern()), *e.chern());
        // leading coefficients: 1 + (a - b) + (b^2 - ab) + ...
        assert_eq!(
            q.chern().weight_component(1),
            e.chern().weight_component(1).sub(&f.chern().weight_component(1))
        );
    }

    #[test]
    fn quotient_rejects_rank_underflow() {
        let t = table_c12();
        let small = SheafClass::trivial(t.clone(), 4, 1);
        let big = SheafClass::trivial(t, 4, 2);
        assert!(matches!(
            small.quotient(&big),
            Err(SheafError::RankUnderflow(1, 2))
        ));
    }

    #[test]
    fn segre_of_trivial_is_one() {
        let t = table_c12();
        let e = SheafClass::trivial(t.clone(), 4, 3);
        assert_eq!(e.segre(), GradedPolynomial::one(t, 4));
    }

    #[test]
    fn segre_times_chern_is_one() {
        let e = generic_rank2(5);
        let one = GradedPolynomial::one(e.chern().table().clone(), 5);
        assert_eq!(e.segre().mul(e.chern()), one);
    }

    #[test]
    fn tensor_line_rank_one_trivial() {
        let t = Arc::new(VariableTable::new(vec![("l".into(), 1)]).unwrap());
        let l = GradedPolynomial::variable(t.clone(), 3, 0);
        let e = SheafClass::trivial(t.clone(), 3, 1);
        let tw = e.tensor_line(&l).unwrap();
        assert_eq!(tw.chern_component(1), l);
        assert_eq!(tw.rank(), 1);
    }

    #[test]
    fn tensor_line_rank_two_top_class() {
        let t = Arc::new(VariableTable::new(vec![("l".into(), 1)]).unwrap());
        let l = GradedPolynomial::variable(t.clone(), 3, 0);
        let e = SheafClass::trivial(t.clone(), 3, 2);
        let tw = e.tensor_line(&l).unwrap();
        // c2 of rank-2 trivial twisted by l is l^2
        assert_eq!(tw.chern_component(2), l.pow(2));
    }

    #[test]
    fn tensor_line_round_trip() {
        let t = table_c12();
        let lt = Arc::new(
            VariableTable::new(vec![("c1".into(), 1), ("c2".into(), 2), ("l".into(), 1)]).unwrap(),
        );
        let e = generic_rank2(4).remap(lt.clone(), 4, &[0, 1]);
        let l = GradedPolynomial::variable(lt.clone(), 4, 2);
        let there = e.tensor_line(&l).unwrap();
        let back = there.tensor_line(&l.neg()).unwrap();
        assert_eq!(back, e);
        let zero = GradedPolynomial::zero(lt, 4);
        assert_eq!(e.tensor_line(&zero).unwrap(), e);
        drop(t);
    }

    #[test]
    fn cotangent_twist_small_cases() {
        let t = Arc::new(
            VariableTable::new(vec![("c1".into(), 1), ("c2".into(), 2), ("z".into(), 1)]).unwrap(),
        );
        let chern = GradedPolynomial::one(t.clone(), 4)
            .add(&GradedPolynomial::variable(t.clone(), 4, 0))
            .add(&GradedPolynomial::variable(t.clone(), 4, 1));
        let e = SheafClass::new(3, chern).unwrap();
        let z = GradedPolynomial::variable(t.clone(), 4, 2);
        // k = 0 -> 1
        assert_eq!(
            cotangent_twist_chern(&e, 0, &z).unwrap(),
            GradedPolynomial::one(t.clone(), 4)
        );
        // k = 1 -> c1 - zeta
        let expect = GradedPolynomial::variable(t.clone(), 4, 0).sub(&z);
        assert_eq!(cotangent_twist_chern(&e, 1, &z).unwrap(), expect);
        // k = r-1 = 2: leading zeta term has sign (-1)^(r-1)
        let top = cotangent_twist_chern(&e, 2, &z).unwrap();
        assert_eq!(
            top.coefficient(&Monomial::from_exps(&t, vec![0, 0, 2])),
            Coeff::from(1)
        );
        // out of range
        assert!(cotangent_twist_chern(&e, 3, &z).is_err());
    }
}
