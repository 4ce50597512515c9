//! Compositional spaces with finitely presented Chow rings.
//!
//! A [`Space`] is a tower built from a root (a point, or a formal base with
//! free Chern generators) by projective bundles, blowups along validated
//! embeddings, and total spaces of bundles. Each construction appends fresh
//! variables to the ring and contributes rewrite rules; normal forms are the
//! fixed points of those rules and give a canonical free-module basis.
//!
//! Conventions: for P(E) = Proj Sym E the hyperplane class zeta satisfies
//! zeta^r = sum_{i>=1} (-1)^(i+1) c_i(E) zeta^(r-i), so the top pushforward
//! sends zeta^(r-1+k) to the k-th Segre class of the dual of E. For a blowup
//! the exceptional divisor is P(N^v) with normal bundle O(-1), hence
//! j^* j_* = -zeta_E; the top exceptional power reduces through the key
//! formula pi^* i_* = j_*(c_(r-1)(V) cap p^*).

mod class;
mod embedding;

pub use class::{
    integrate, proj_project, pullback, pushforward, ChowClass, MapKind, StructuralMap,
};
pub use embedding::EmbeddingDatum;

use crate::polyring::{Coeff, GradedPolynomial, Monomial, VariableTable};
use crate::sheaves::SheafClass;
use num_traits::One;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpaceError {
    #[error("classes live on different spaces")]
    SpaceMismatch,
    #[error("bundle data is defined over a different ring")]
    TableMismatch,
    #[error("projective bundle needs rank >= 1")]
    RankZero,
    #[error("operation needs a projective-bundle tower level")]
    NotProjBundle,
    #[error("operation needs a blowup tower level")]
    NotBlowup,
    #[error("map is not proper; no pushforward")]
    NonProper,
    #[error("index {0} out of range {1}")]
    IndexRange(u32, u32),
    #[error("invalid embedding datum: {0}")]
    InvalidEmbedding(String),
    #[error("integration needs a proper tower over a point")]
    NotIntegrable,
    #[error("formal base needs dim_bound >= 1")]
    BadDimBound,
    #[error(transparent)]
    Sheaf(#[from] crate::sheaves::SheafError),
    #[error(transparent)]
    Poly(#[from] crate::polyring::PolyError),
}

/// Root of a tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootKind {
    Point,
    FormalBase { dim_bound: u32, bundles: Vec<FormalBundle> },
}

/// A bundle with freely generated Chern variables on a formal base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalBundle {
    pub name: String,
    pub rank: u32,
    pub vars: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelData {
    Root(RootKind),
    ProjBundle {
        /// Bundle on the base, in the base's ring.
        bundle: SheafClass,
        rank: u32,
        zeta: usize,
    },
    Blowup(Box<BlowupLevel>),
    TotalSpace { rank: u32 },
}

/// Construction data for a blowup level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupLevel {
    pub codim: u32,
    pub marker: usize,
    pub zeta_e: usize,
    /// center variable index -> merged table index
    pub center_map: Vec<usize>,
    /// the validated embedding that was blown up
    pub datum: EmbeddingDatum,
    /// the exceptional divisor P(N^v) as a standalone projective bundle
    pub exceptional: Arc<Space>,
}

impl BlowupLevel {
    pub fn center(&self) -> &Arc<Space> {
        self.datum.center()
    }
}

/// Rewrite rules that define normal forms. Rules are scanned in order and the
/// first applicable one is used, so reduction is deterministic.
#[derive(Debug, Clone)]
pub enum Rule {
    /// var^power -> rhs (one application divides out var^power once)
    Power { var: usize, power: u32, rhs: GradedPolynomial },
    /// marker^2 -> -marker * zeta_e
    MarkerSquare { marker: usize, zeta_e: usize },
    /// marker * (base monomial) -> marker * i^*(base monomial)
    MarkerPullback { marker: usize, source_vars: Vec<usize>, images: Vec<(usize, GradedPolynomial)> },
    /// marker * zeta_e^(r-1) * z -> i_*(z) - sum_i marker zeta_e^i c_(r-1-i)(N) z
    MarkerTop {
        marker: usize,
        zeta_e: usize,
        top: u32,
        center_vars: Vec<usize>,
        push: Vec<(Monomial, GradedPolynomial)>,
        chern: Vec<GradedPolynomial>,
    },
}

impl Rule {
    /// Transports the rule into another table along an injective variable map.
    pub fn remapped(&self, table: &Arc<VariableTable>, bound: u32, var_map: &[usize]) -> Rule {
        let remap_poly = |p: &GradedPolynomial| p.remap(table.clone(), bound, var_map);
        let remap_mono = |m: &Monomial| {
            let mut exps = vec![0u32; table.len()];
            for (i, &v) in var_map.iter().enumerate() {
                exps[v] = m.exp(i);
            }
            Monomial::from_exps(table, exps)
        };
        match self {
            Rule::Power { var, power, rhs } => Rule::Power {
                var: var_map[*var],
                power: *power,
                rhs: remap_poly(rhs),
            },
            Rule::MarkerSquare { marker, zeta_e } => Rule::MarkerSquare {
                marker: var_map[*marker],
                zeta_e: var_map[*zeta_e],
            },
            Rule::MarkerPullback { marker, source_vars, images } => Rule::MarkerPullback {
                marker: var_map[*marker],
                source_vars: source_vars.iter().map(|&v| var_map[v]).collect(),
                images: images
                    .iter()
                    .map(|(v, p)| (var_map[*v], remap_poly(p)))
                    .collect(),
            },
            Rule::MarkerTop { marker, zeta_e, top, center_vars, push, chern } => Rule::MarkerTop {
                marker: var_map[*marker],
                zeta_e: var_map[*zeta_e],
                top: *top,
                center_vars: center_vars.iter().map(|&v| var_map[v]).collect(),
                push: push
                    .iter()
                    .map(|(m, p)| (remap_mono(m), remap_poly(p)))
                    .collect(),
                chern: chern.iter().map(remap_poly).collect(),
            },
        }
    }
}

/// Re-expresses inherited rules on a larger table that extends the old one.
fn inherit_rules(rules: &[Rule], table: &Arc<VariableTable>, bound: u32, old_len: usize) -> Vec<Rule> {
    let id: Vec<usize> = (0..old_len).collect();
    rules.iter().map(|r| r.remapped(table, bound, &id)).collect()
}

/// A space in a compositional tower, carrying its full variable table, the
/// truncation bound, a dimension (exact over a point, a bound over a formal
/// base), and the rewrite rules of every level below it.
#[derive(Debug)]
pub struct Space {
    parent: Option<Arc<Space>>,
    level: LevelData,
    table: Arc<VariableTable>,
    bound: u32,
    dim: u32,
    formal: bool,
    rules: Vec<Rule>,
}

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table
            && self.bound == other.bound
            && self.dim == other.dim
            && self.level == other.level
            && match (&self.parent, &other.parent) {
                (None, None) => true,
                (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a == b,
                _ => false,
            }
    }
}

impl Eq for Space {}

impl Space {
    pub fn table(&self) -> &Arc<VariableTable> {
        &self.table
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    /// True when the tower is rooted in a formal base (no integration).
    pub fn is_formal(&self) -> bool {
        self.formal
    }

    pub fn parent(&self) -> Option<&Arc<Space>> {
        self.parent.as_ref()
    }

    pub fn level(&self) -> &LevelData {
        &self.level
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// The point.
    pub fn point() -> Arc<Space> {
        Arc::new(Space {
            parent: None,
            level: LevelData::Root(RootKind::Point),
            table: VariableTable::empty(),
            bound: 0,
            dim: 0,
            formal: false,
            rules: Vec::new(),
        })
    }

    /// Formal base of dimension bound `dim_bound` carrying bundles with free
    /// Chern generators c_i(name), 1 <= i <= min(rank, dim_bound).
    pub fn formal_base(
        dim_bound: u32,
        bundle_specs: &[(&str, u32)],
    ) -> Result<Arc<Space>, SpaceError> {
        if dim_bound < 1 {
            return Err(SpaceError::BadDimBound);
        }
        let mut entries = Vec::new();
        let mut bundles = Vec::new();
        for (name, rank) in bundle_specs {
            let mut vars = Vec::new();
            for i in 1..=(*rank).min(dim_bound) {
                vars.push(entries.len());
                entries.push((format!("c{i}({name})"), i));
            }
            bundles.push(FormalBundle { name: name.to_string(), rank: *rank, vars });
        }
        let table = Arc::new(VariableTable::new(entries)?);
        Ok(Arc::new(Space {
            parent: None,
            level: LevelData::Root(RootKind::FormalBase { dim_bound, bundles }),
            table,
            bound: dim_bound,
            dim: dim_bound,
            formal: true,
            rules: Vec::new(),
        }))
    }

    /// The bundle handle for a formal-base generator set.
    pub fn formal_bundle(&self, name: &str) -> Option<SheafClass> {
        let root = self.root();
        let LevelData::Root(RootKind::FormalBase { bundles, .. }) = &root.level else {
            return None;
        };
        let fb = bundles.iter().find(|b| b.name == name)?;
        let mut chern = GradedPolynomial::one(self.table.clone(), self.bound);
        for &v in &fb.vars {
            chern = chern.add(&GradedPolynomial::variable(self.table.clone(), self.bound, v));
        }
        Some(SheafClass::new(fb.rank, chern).expect("unit constant term"))
    }

    fn root(&self) -> &Space {
        let mut s = self;
        while let Some(p) = &s.parent {
            s = p;
        }
        s
    }

    /// P^n as the projectivization of the trivial rank n+1 bundle on a point,
    /// with hyperplane variable named `h`.
    pub fn projective_space(n: u32) -> Arc<Space> {
        let pt = Space::point();
        let triv = SheafClass::trivial(pt.table().clone(), 0, n + 1);
        Space::proj_bundle_named(&pt, &triv, "h").expect("trivial bundle has rank >= 1")
    }

    /// Projective bundle P(E) = Proj Sym E with a fresh weight-1 hyperplane
    /// variable (named `zeta` unless taken).
    pub fn proj_bundle(base: &Arc<Space>, bundle: &SheafClass) -> Result<Arc<Space>, SpaceError> {
        Space::proj_bundle_named(base, bundle, "zeta")
    }

    pub fn proj_bundle_named(
        base: &Arc<Space>,
        bundle: &SheafClass,
        zeta_name: &str,
    ) -> Result<Arc<Space>, SpaceError> {
        let r = bundle.rank();
        if r == 0 {
            return Err(SpaceError::RankZero);
        }
        if bundle.chern().table() != base.table() {
            return Err(SpaceError::TableMismatch);
        }
        let name = base.table.fresh_name(zeta_name);
        let table = Arc::new(base.table.extended(&[(name, 1)])?);
        let zeta = table.len() - 1;
        let dim = base.dim + r - 1;
        let bound = if base.formal { base.bound } else { dim };
        // zeta^r = sum_{i=1..r} (-1)^(i+1) c_i(E) zeta^(r-i)
        let id_map: Vec<usize> = (0..base.table.len()).collect();
        let chern_full = bundle.remap(table.clone(), bound, &id_map);
        let mut rhs = GradedPolynomial::zero(table.clone(), bound);
        let zeta_poly = GradedPolynomial::variable(table.clone(), bound, zeta);
        for i in 1..=r {
            let ci = chern_full.chern_component(i);
            if ci.is_zero() {
                continue;
            }
            let sign = if i % 2 == 1 { Coeff::one() } else { -Coeff::one() };
            rhs = rhs.add(&ci.mul(&zeta_poly.pow(r - i)).scale(&sign));
        }
        let mut rules = inherit_rules(&base.rules, &table, bound, base.table.len());
        rules.push(Rule::Power { var: zeta, power: r, rhs });
        Ok(Arc::new(Space {
            parent: Some(base.clone()),
            level: LevelData::ProjBundle { bundle: bundle.clone(), rank: r, zeta },
            table,
            bound,
            dim,
            formal: base.formal,
            rules,
        }))
    }

    /// Total space of a bundle: same ring, dimension shifted by the rank.
    pub fn total_space(base: &Arc<Space>, bundle: &SheafClass) -> Result<Arc<Space>, SpaceError> {
        if bundle.chern().table() != base.table() {
            return Err(SpaceError::TableMismatch);
        }
        Ok(Arc::new(Space {
            parent: Some(base.clone()),
            level: LevelData::TotalSpace { rank: bundle.rank() },
            table: base.table.clone(),
            bound: base.bound,
            dim: base.dim + bundle.rank(),
            formal: base.formal,
            rules: base.rules.clone(),
        }))
    }

    /// Blowup of `base` along a validated embedding datum.
    pub fn blowup(base: &Arc<Space>, datum: &EmbeddingDatum) -> Result<Arc<Space>, SpaceError> {
        embedding::build_blowup(base, datum)
    }

    /// The hyperplane variable of the top projective-bundle level.
    pub fn zeta_var(&self) -> Result<usize, SpaceError> {
        match &self.level {
            LevelData::ProjBundle { zeta, .. } => Ok(*zeta),
            _ => Err(SpaceError::NotProjBundle),
        }
    }

    pub fn top_rank(&self) -> Result<u32, SpaceError> {
        match &self.level {
            LevelData::ProjBundle { rank, .. } => Ok(*rank),
            _ => Err(SpaceError::NotProjBundle),
        }
    }

    /// Bundle of the top projective-bundle level, in the base ring.
    pub fn top_bundle(&self) -> Result<&SheafClass, SpaceError> {
        match &self.level {
            LevelData::ProjBundle { bundle, .. } => Ok(bundle),
            _ => Err(SpaceError::NotProjBundle),
        }
    }

    pub fn blowup_level(&self) -> Result<&BlowupLevel, SpaceError> {
        match &self.level {
            LevelData::Blowup(b) => Ok(b),
            _ => Err(SpaceError::NotBlowup),
        }
    }

    /// Reduces a polynomial to normal form under the tower's rewrite rules.
    pub fn normalize(&self, poly: &GradedPolynomial) -> GradedPolynomial {
        debug_assert!(poly.table() == &self.table);
        let mut out = GradedPolynomial::zero(self.table.clone(), self.bound);
        let mut work: Vec<(Monomial, Coeff)> =
            poly.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        while let Some((m, c)) = work.pop() {
            if m.weight() > self.bound {
                continue;
            }
            match self.rewrite_once(&m) {
                Some(repl) => {
                    for (m2, c2) in repl.terms() {
                        work.push((m2.clone(), &c * c2));
                    }
                }
                None => out.insert_term(m, c),
            }
        }
        out
    }

    /// Applies the first applicable rule to a monomial, if any.
    fn rewrite_once(&self, m: &Monomial) -> Option<GradedPolynomial> {
        for rule in &self.rules {
            match rule {
                Rule::Power { var, power, rhs } => {
                    if m.exp(*var) >= *power {
                        let rest = m.with_exp_lowered(*var, *power, self.table.weight(*var));
                        return Some(rhs.mul_monomial(&rest, &Coeff::one()));
                    }
                }
                Rule::MarkerSquare { marker, zeta_e } => {
                    if m.exp(*marker) >= 2 {
                        let rest = m.with_exp_lowered(*marker, 1, 1);
                        let zeta = Monomial::variable(&self.table, *zeta_e);
                        let mut out = GradedPolynomial::zero(self.table.clone(), self.bound);
                        out.insert_term(rest.mul(&zeta), -Coeff::one());
                        return Some(out);
                    }
                }
                Rule::MarkerPullback { marker, source_vars, images } => {
                    if m.exp(*marker) >= 1 && source_vars.iter().any(|&v| m.exp(v) > 0) {
                        let (xpart, rest) = m.split(&self.table, source_vars);
                        let mut out = GradedPolynomial::zero(self.table.clone(), self.bound);
                        out.insert_term(rest, Coeff::one());
                        for (v, image) in images {
                            let e = xpart.exp(*v);
                            if e > 0 {
                                out = out.mul(&image.pow(e));
                            }
                        }
                        return Some(out);
                    }
                }
                Rule::MarkerTop { marker, zeta_e, top, center_vars, push, chern } => {
                    if m.exp(*marker) == 1 && m.exp(*zeta_e) == *top {
                        let (zpart, rest0) = m.split(&self.table, center_vars);
                        let rest = rest0
                            .with_exp_lowered(*marker, 1, 1)
                            .with_exp_lowered(*zeta_e, *top, 1);
                        let pushed = push
                            .iter()
                            .find(|(z, _)| z == &zpart)
                            .map(|(_, img)| img.clone())
                            .unwrap_or_else(|| {
                                GradedPolynomial::zero(self.table.clone(), self.bound)
                            });
                        let mut out = pushed;
                        for i in 0..*top {
                            // subtract marker * zeta_e^i * c_(top-i)(N) * z
                            let ci = &chern[(*top - i - 1) as usize];
                            if ci.is_zero() {
                                continue;
                            }
                            let mut mono_exps = vec![0u32; self.table.len()];
                            mono_exps[*marker] = 1;
                            mono_exps[*zeta_e] = i;
                            let mono = Monomial::from_exps(&self.table, mono_exps).mul(&zpart);
                            out = out.sub(&ci.mul_monomial(&mono, &Coeff::one()));
                        }
                        return Some(out.mul_monomial(&rest, &Coeff::one()));
                    }
                }
            }
        }
        None
    }

    /// A monomial is in normal form when no rule applies.
    pub fn is_normal_monomial(&self, m: &Monomial) -> bool {
        self.rewrite_once(m).is_none()
    }

    /// Canonical free-module basis in codimension `k`, in tower order.
    pub fn basis(&self, k: u32) -> Vec<Monomial> {
        if k > self.bound {
            return Vec::new();
        }
        let pad = |mono: Monomial, table: &VariableTable| -> Monomial {
            let mut exps = mono.exps().to_vec();
            exps.resize(table.len(), 0);
            Monomial::from_exps(table, exps)
        };
        match &self.level {
            LevelData::Root(RootKind::Point) => {
                if k == 0 {
                    vec![Monomial::one(0)]
                } else {
                    Vec::new()
                }
            }
            LevelData::Root(RootKind::FormalBase { .. }) => {
                monomials_of_weight(&self.table, k)
            }
            LevelData::ProjBundle { rank, zeta, .. } => {
                let parent = self.parent.as_ref().unwrap();
                let mut out = Vec::new();
                for i in (0..*rank).rev() {
                    if i > k {
                        continue;
                    }
                    for pm in parent.basis(k - i) {
                        let mut exps = pm.exps().to_vec();
                        exps.resize(self.table.len(), 0);
                        exps[*zeta] = i;
                        out.push(Monomial::from_exps(&self.table, exps));
                    }
                }
                out
            }
            LevelData::Blowup(b) => {
                let parent = self.parent.as_ref().unwrap();
                let mut out: Vec<Monomial> = parent
                    .basis(k)
                    .into_iter()
                    .map(|m| pad(m, &self.table))
                    .collect();
                for i in 0..=(b.codim.saturating_sub(2)) {
                    if 1 + i > k {
                        continue;
                    }
                    for zm in b.center().basis(k - 1 - i) {
                        let mut exps = vec![0u32; self.table.len()];
                        for (ci, &mi) in b.center_map.iter().enumerate() {
                            exps[mi] = zm.exp(ci);
                        }
                        exps[b.marker] = 1;
                        exps[b.zeta_e] = i;
                        out.push(Monomial::from_exps(&self.table, exps));
                    }
                }
                out
            }
            LevelData::TotalSpace { .. } => self.parent.as_ref().unwrap().basis(k),
        }
    }

    /// Basis ranks indexed by codimension 0..=bound.
    pub fn basis_ranks_by_codim(&self) -> Vec<usize> {
        (0..=self.bound).map(|k| self.basis(k).len()).collect()
    }

    /// Basis ranks indexed by dimension 0..=dim (towers over a point only).
    pub fn basis_ranks_by_dim(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.dim as usize + 1];
        for k in 0..=self.bound {
            let n = self.basis(k).len();
            out[(self.dim - k) as usize] = n;
        }
        out
    }
}

/// All monomials of exact weight `k` on a table (free polynomial ring basis).
pub fn monomials_of_weight(table: &Arc<VariableTable>, k: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let nvars = table.len();
    let mut exps = vec![0u32; nvars];
    fn rec(
        table: &Arc<VariableTable>,
        idx: usize,
        remaining: u32,
        exps: &mut Vec<u32>,
        out: &mut Vec<Monomial>,
    ) {
        if idx == table.len() {
            if remaining == 0 {
                out.push(Monomial::from_exps(table, exps.clone()));
            }
            return;
        }
        let w = table.weight(idx);
        let max = remaining / w;
        for e in 0..=max {
            exps[idx] = e;
            rec(table, idx + 1, remaining - e * w, exps, out);
        }
        exps[idx] = 0;
    }
    rec(table, 0, k, &mut exps, &mut out);
    out.sort();
    out
}
