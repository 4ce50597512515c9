//! Sparse multivariate polynomials over the integers, graded by per-variable
//! positive weights and truncated above a global weight bound.
//!
//! Every class and characteristic class in the engine is carried by a
//! [`GradedPolynomial`]. Coefficients are arbitrary-precision integers so that
//! long convolution products stay exact. Terms are keyed by exponent vector
//! and iterate in graded-lexicographic order (total weight, then exponents),
//! which makes printing and reports reproducible.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Integer coefficient type used throughout the engine.
pub type Coeff = BigInt;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` must have weight >= 1")]
    ZeroWeight(String),
    #[error("series has non-unit constant term {0}")]
    NonUnitConstant(Coeff),
    #[error("no image provided for variable `{0}`")]
    MissingImage(String),
    #[error("image of `{0}` is not homogeneous of weight {1}")]
    BadImage(String, u32),
}

/// Ordered table of weighted variables. The order is fixed at construction
/// and determines term order, printing and normal forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableTable {
    entries: Vec<(String, u32)>,
}

impl VariableTable {
    pub fn new(entries: Vec<(String, u32)>) -> Result<Self, PolyError> {
        for (i, (name, weight)) in entries.iter().enumerate() {
            if *weight == 0 {
                return Err(PolyError::ZeroWeight(name.clone()));
            }
            if entries[..i].iter().any(|(n, _)| n == name) {
                return Err(PolyError::DuplicateVariable(name.clone()));
            }
        }
        Ok(VariableTable { entries })
    }

    pub fn empty() -> Arc<Self> {
        Arc::new(VariableTable { entries: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.entries[idx].0
    }

    pub fn weight(&self, idx: usize) -> u32 {
        self.entries[idx].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|(n, _)| n == name)
    }

    pub fn entries(&self) -> &[(String, u32)] {
        &self.entries
    }

    /// New table with extra variables appended; existing indices are preserved.
    pub fn extended(&self, more: &[(String, u32)]) -> Result<Self, PolyError> {
        let mut entries = self.entries.clone();
        entries.extend_from_slice(more);
        VariableTable::new(entries)
    }

    /// Picks a name not yet present, starting from `base` and appending 2, 3, ...
    pub fn fresh_name(&self, base: &str) -> String {
        if self.index_of(base).is_none() {
            return base.to_string();
        }
        let mut k = 2usize;
        loop {
            let candidate = format!("{base}{k}");
            if self.index_of(&candidate).is_none() {
                return candidate;
            }
            k += 1;
        }
    }

    fn weight_of_exps(&self, exps: &[u32]) -> u32 {
        exps.iter()
            .zip(&self.entries)
            .map(|(e, (_, w))| e * w)
            .sum()
    }
}

/// Exponent vector with cached total weight. The derived `Ord` compares the
/// weight first, so `BTreeMap<Monomial, _>` iterates in graded-lex order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    weight: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial { weight: 0, exps: vec![0; nvars] }
    }

    pub fn from_exps(table: &VariableTable, exps: Vec<u32>) -> Self {
        assert_eq!(exps.len(), table.len(), "exponent vector length mismatch");
        let weight = table.weight_of_exps(&exps);
        Monomial { weight, exps }
    }

    pub fn variable(table: &VariableTable, idx: usize) -> Self {
        let mut exps = vec![0; table.len()];
        exps[idx] = 1;
        Monomial { weight: table.weight(idx), exps }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.exps[idx]
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn is_one(&self) -> bool {
        self.weight == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        let exps = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a + b)
            .collect();
        Monomial { weight: self.weight + other.weight, exps }
    }

    /// Lowers the exponent of `idx` by `k`; weight is recomputed from `w_per`.
    pub fn with_exp_lowered(&self, idx: usize, k: u32, var_weight: u32) -> Monomial {
        let mut exps = self.exps.clone();
        assert!(exps[idx] >= k);
        exps[idx] -= k;
        Monomial { weight: self.weight - k * var_weight, exps }
    }

    /// Splits off the part supported on `vars` (sorted indices); returns
    /// (part on vars, remaining part). Weights recomputed via `table`.
    pub fn split(&self, table: &VariableTable, vars: &[usize]) -> (Monomial, Monomial) {
        let mut on = vec![0; self.exps.len()];
        let mut off = self.exps.clone();
        for &v in vars {
            on[v] = self.exps[v];
            off[v] = 0;
        }
        (
            Monomial::from_exps(table, on),
            Monomial::from_exps(table, off),
        )
    }
}

/// Sparse integer polynomial on a [`VariableTable`], truncated at `bound`:
/// no stored term has zero coefficient or total weight above the bound.
#[derive(Debug, Clone)]
pub struct GradedPolynomial {
    table: Arc<VariableTable>,
    bound: u32,
    terms: BTreeMap<Monomial, Coeff>,
}

impl PartialEq for GradedPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound
            && self.terms == other.terms
            && (Arc::ptr_eq(&self.table, &other.table) || self.table == other.table)
    }
}

impl Eq for GradedPolynomial {}

impl GradedPolynomial {
    pub fn zero(table: Arc<VariableTable>, bound: u32) -> Self {
        GradedPolynomial { table, bound, terms: BTreeMap::new() }
    }

    pub fn constant(table: Arc<VariableTable>, bound: u32, c: impl Into<Coeff>) -> Self {
        let mut p = Self::zero(table, bound);
        let n = p.table.len();
        p.insert_term(Monomial::one(n), c.into());
        p
    }

    pub fn one(table: Arc<VariableTable>, bound: u32) -> Self {
        Self::constant(table, bound, 1)
    }

    pub fn variable(table: Arc<VariableTable>, bound: u32, idx: usize) -> Self {
        let mono = Monomial::variable(&table, idx);
        let mut p = Self::zero(table, bound);
        p.insert_term(mono, Coeff::one());
        p
    }

    pub fn from_terms(
        table: Arc<VariableTable>,
        bound: u32,
        terms: impl IntoIterator<Item = (Monomial, Coeff)>,
    ) -> Self {
        let mut p = Self::zero(table, bound);
        for (m, c) in terms {
            p.insert_term(m, c);
        }
        p
    }

    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() || m.weight() > self.bound {
            return;
        }
        debug_assert_eq!(m.exps().len(), self.table.len());
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    #[track_caller]
    fn assert_compatible(&self, other: &GradedPolynomial) {
        assert!(
            self.bound == other.bound
                && (Arc::ptr_eq(&self.table, &other.table) || self.table == other.table),
            "polynomial table/bound mismatch"
        );
    }

    #[track_caller]
    pub fn add(&self, other: &GradedPolynomial) -> GradedPolynomial {
        self.assert_compatible(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    #[track_caller]
    pub fn sub(&self, other: &GradedPolynomial) -> GradedPolynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), -c.clone()))
            .collect();
        GradedPolynomial { table: self.table.clone(), bound: self.bound, terms }
    }

    pub fn scale(&self, k: &Coeff) -> GradedPolynomial {
        if k.is_zero() {
            return Self::zero(self.table.clone(), self.bound);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), c * k))
            .collect();
        GradedPolynomial { table: self.table.clone(), bound: self.bound, terms }
    }

    #[track_caller]
    pub fn mul(&self, other: &GradedPolynomial) -> GradedPolynomial {
        self.assert_compatible(other);
        let mut out = Self::zero(self.table.clone(), self.bound);
        for (ma, ca) in &self.terms {
            if ma.weight() > self.bound {
                continue;
            }
            for (mb, cb) in &other.terms {
                if ma.weight() + mb.weight() > self.bound {
                    continue;
                }
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Coeff) -> GradedPolynomial {
        let mut out = Self::zero(self.table.clone(), self.bound);
        for (ma, ca) in &self.terms {
            out.insert_term(ma.mul(m), ca * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> GradedPolynomial {
        let mut out = Self::one(self.table.clone(), self.bound);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Drops terms of weight above `d` and lowers the carried bound to `d`.
    pub fn truncate(&self, d: u32) -> GradedPolynomial {
        let bound = d.min(self.bound);
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.weight() <= bound)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        GradedPolynomial { table: self.table.clone(), bound, terms }
    }

    /// Homogeneous part of weight `k`.
    pub fn weight_component(&self, k: u32) -> GradedPolynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m.weight() == k)
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        GradedPolynomial { table: self.table.clone(), bound: self.bound, terms }
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.weight()).max()
    }

    /// True when every term has weight `k`; the zero polynomial qualifies.
    pub fn is_homogeneous_of(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.weight() == k)
    }

    pub fn constant_term(&self) -> Coeff {
        let one = Monomial::one(self.table.len());
        self.terms.get(&one).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn coefficient(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Multiplicative inverse of a series with constant term ±1, computed
    /// degree by degree up to the bound.
    pub fn invert_unit_series(&self) -> Result<GradedPolynomial, PolyError> {
        let c0 = self.constant_term();
        if !(c0.clone().abs()).is_one() {
            return Err(PolyError::NonUnitConstant(c0));
        }
        // components[w] = weight-w part of the inverse
        let mut components: Vec<GradedPolynomial> = Vec::with_capacity(self.bound as usize + 1);
        components.push(Self::constant(self.table.clone(), self.bound, c0.clone()));
        for w in 1..=self.bound {
            let mut acc = Self::zero(self.table.clone(), self.bound);
            for j in 1..=w {
                let pj = self.weight_component(j);
                if pj.is_zero() {
                    continue;
                }
                acc = acc.add(&pj.mul(&components[(w - j) as usize]));
            }
            // q_w = -c0 * acc  (c0 is its own inverse)
            components.push(acc.scale(&-c0.clone()));
        }
        let mut out = Self::zero(self.table.clone(), self.bound);
        for comp in components {
            out = out.add(&comp);
        }
        Ok(out)
    }

    /// Substitution homomorphism into a target ring. `images[i]` is the image
    /// of variable `i`; every variable occurring in `self` must have a
    /// homogeneous image of its own weight.
    pub fn apply_map(
        &self,
        target: Arc<VariableTable>,
        target_bound: u32,
        images: &[GradedPolynomial],
    ) -> Result<GradedPolynomial, PolyError> {
        for (i, (name, w)) in self.table.entries().iter().enumerate() {
            if self.terms.keys().any(|m| m.exp(i) > 0) {
                let img = images
                    .get(i)
                    .ok_or_else(|| PolyError::MissingImage(name.clone()))?;
                if !img.is_homogeneous_of(*w) {
                    return Err(PolyError::BadImage(name.clone(), *w));
                }
            }
        }
        let mut out = Self::zero(target.clone(), target_bound);
        for (m, c) in &self.terms {
            let mut term = Self::constant(target.clone(), target_bound, c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&images[i].pow(e));
                }
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Injective variable renaming into a larger table: variable `i` becomes
    /// variable `var_map[i]` of the target, which must carry the same weight.
    pub fn remap(
        &self,
        target: Arc<VariableTable>,
        target_bound: u32,
        var_map: &[usize],
    ) -> GradedPolynomial {
        assert_eq!(var_map.len(), self.table.len());
        for (i, &v) in var_map.iter().enumerate() {
            assert_eq!(self.table.weight(i), target.weight(v), "weight-changing remap");
        }
        let mut out = Self::zero(target.clone(), target_bound);
        for (m, c) in &self.terms {
            let mut exps = vec![0; target.len()];
            for (i, &e) in m.exps().iter().enumerate() {
                exps[var_map[i]] = e;
            }
            out.insert_term(Monomial::from_exps(&target, exps), c.clone());
        }
        out
    }

    /// Renders a single monomial with the table's variable names.
    pub fn monomial_string(&self, m: &Monomial) -> String {
        monomial_string(&self.table, m)
    }
}

pub fn monomial_string(table: &VariableTable, m: &Monomial) -> String {
    if m.is_one() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    for (i, &e) in m.exps().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(table.name(i).to_string()),
            _ => parts.push(format!("{}^{}", table.name(i), e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let mag = c.abs();
            let negative = c.sign() == num_bigint::Sign::Minus;
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", monomial_string(&self.table, m))?;
            } else {
                write!(f, "{}*{}", mag, monomial_string(&self.table, m))?;
            }
        }
        Ok(())
    }
}
