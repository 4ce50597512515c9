//! Embedding data for regular closed immersions and the blowup construction.
//!
//! An [`EmbeddingDatum`] packages a center Z, the Gysin pullback i^* on ring
//! generators, the pushforward i_* on the center basis, the normal bundle and
//! the fundamental class [Z]. Construction validates the projection formula,
//! i_* i^* = [Z] cap, the self-intersection formula, and the grading, all by
//! exact integer identities on basis pairs.

use super::{BlowupLevel, LevelData, Rule, Space, SpaceError};
use crate::polyring::{Coeff, GradedPolynomial, Monomial};
use crate::sheaves::SheafClass;
use num_traits::One;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingDatum {
    target: Arc<Space>,
    center: Arc<Space>,
    codim: u32,
    /// image of each target ring generator under i^*, on the center's table
    pullback_images: Vec<GradedPolynomial>,
    /// i_* of each center basis monomial, on the target's table
    push_images: Vec<(Monomial, GradedPolynomial)>,
    /// normal bundle of the center, rank = codim, on the center's table
    normal: SheafClass,
    /// [Z] on the target's table
    fundamental: GradedPolynomial,
}

impl EmbeddingDatum {
    /// Validates and constructs an embedding datum. `push_images` must cover
    /// every basis monomial of the center (any order).
    pub fn new(
        target: Arc<Space>,
        center: Arc<Space>,
        codim: u32,
        pullback_images: Vec<GradedPolynomial>,
        push_images: Vec<(Monomial, GradedPolynomial)>,
        normal: SheafClass,
        fundamental: GradedPolynomial,
    ) -> Result<Self, SpaceError> {
        let datum = EmbeddingDatum {
            target,
            center,
            codim,
            pullback_images,
            push_images,
            normal,
            fundamental,
        };
        datum.validate()?;
        Ok(datum)
    }

    pub fn target(&self) -> &Arc<Space> {
        &self.target
    }

    pub fn center(&self) -> &Arc<Space> {
        &self.center
    }

    pub fn codim(&self) -> u32 {
        self.codim
    }

    pub fn normal(&self) -> &SheafClass {
        &self.normal
    }

    pub fn fundamental(&self) -> &GradedPolynomial {
        &self.fundamental
    }

    /// i^*: ring homomorphism CH(X) -> CH(Z).
    pub fn pull(&self, value: &GradedPolynomial) -> Result<GradedPolynomial, SpaceError> {
        let raw = value.apply_map(
            self.center.table().clone(),
            self.center.bound(),
            &self.pullback_images,
        )?;
        Ok(self.center.normalize(&raw))
    }

    /// i_*: module map CH(Z) -> CH(X) given on the center basis.
    pub fn push(&self, value: &GradedPolynomial) -> Result<GradedPolynomial, SpaceError> {
        let mut out = GradedPolynomial::zero(self.target.table().clone(), self.target.bound());
        for (m, c) in value.terms() {
            let image = self
                .push_images
                .iter()
                .find(|(z, _)| z == m)
                .map(|(_, img)| img);
            match image {
                Some(img) => out = out.add(&img.scale(c)),
                None => {
                    // monomials above the center bound push to zero by grading
                    debug_assert!(m.weight() + self.codim > self.target.bound());
                }
            }
        }
        Ok(self.target.normalize(&out))
    }

    fn validate(&self) -> Result<(), SpaceError> {
        let err = |msg: &str| Err(SpaceError::InvalidEmbedding(msg.to_string()));
        if self.codim < 2 {
            return err("codimension must be >= 2");
        }
        if self.center.dim() + self.codim != self.target.dim() {
            return err("center dimension does not match codimension");
        }
        if self.center.bound() + self.codim != self.target.bound() {
            return err("center bound does not match codimension");
        }
        if self.normal.rank() != self.codim {
            return err("normal bundle rank must equal the codimension");
        }
        if self.normal.chern().table() != self.center.table() {
            return err("normal bundle lives on the wrong ring");
        }
        if !self.fundamental.is_homogeneous_of(self.codim) {
            return err("fundamental class must be homogeneous of weight = codim");
        }
        if self.pullback_images.len() != self.target.table().len() {
            return err("pullback images must cover every target generator");
        }
        for (i, img) in self.pullback_images.iter().enumerate() {
            if !img.is_homogeneous_of(self.target.table().weight(i)) {
                return err("pullback image has the wrong weight");
            }
        }
        // every center basis monomial needs a pushforward image of shifted weight
        for k in 0..=self.center.bound() {
            for z in self.center.basis(k) {
                let img = self.push_images.iter().find(|(m, _)| m == &z);
                let Some((_, img)) = img else {
                    return err("pushforward images must cover the center basis");
                };
                if !img.is_homogeneous_of(k + self.codim) {
                    return err("pushforward image has the wrong weight");
                }
            }
        }

        // exact identities on basis pairs
        let target_basis: Vec<Monomial> = (0..=self.target.bound())
            .flat_map(|k| self.target.basis(k))
            .collect();
        let center_basis: Vec<Monomial> = (0..=self.center.bound())
            .flat_map(|k| self.center.basis(k))
            .collect();
        let tpoly = |m: &Monomial| {
            GradedPolynomial::from_terms(
                self.target.table().clone(),
                self.target.bound(),
                [(m.clone(), Coeff::one())],
            )
        };
        let zpoly = |m: &Monomial| {
            GradedPolynomial::from_terms(
                self.center.table().clone(),
                self.center.bound(),
                [(m.clone(), Coeff::one())],
            )
        };
        let cr = self.normal.chern_component(self.codim);
        for alpha in &target_basis {
            let a = tpoly(alpha);
            // i_*(i^*(alpha)) = [Z] * alpha
            let lhs = self.push(&self.pull(&a)?)?;
            let rhs = self.target.normalize(&self.fundamental.mul(&a));
            if lhs != rhs {
                return err("i_* i^* differs from multiplication by [Z]");
            }
            for beta in &center_basis {
                let b = zpoly(beta);
                // projection formula: i_*(i^*(alpha) * beta) = alpha * i_*(beta)
                let lhs = self.push(&self.center.normalize(&self.pull(&a)?.mul(&b)))?;
                let rhs = self.target.normalize(&a.mul(&self.push(&b)?));
                if lhs != rhs {
                    return err("projection formula fails on a basis pair");
                }
            }
        }
        for beta in &center_basis {
            let b = zpoly(beta);
            // self-intersection: i^*(i_*(beta)) = c_r(N) * beta
            let lhs = self.pull(&self.push(&b)?)?;
            let rhs = self.center.normalize(&cr.mul(&b));
            if lhs != rhs {
                return err("self-intersection formula fails on a basis element");
            }
        }
        Ok(())
    }

    /// A point inside P^n (n >= 2): i^* h = 0, i_* 1 = h^n, trivial normal
    /// bundle of rank n.
    pub fn point_in_projective_space(n: u32) -> Result<EmbeddingDatum, SpaceError> {
        let pn = Space::projective_space(n);
        let pt = Space::point();
        let zero = GradedPolynomial::zero(pt.table().clone(), 0);
        let h = GradedPolynomial::variable(pn.table().clone(), n, 0);
        EmbeddingDatum::new(
            pn.clone(),
            pt.clone(),
            n,
            vec![zero],
            vec![(Monomial::one(0), h.pow(n))],
            SheafClass::trivial(pt.table().clone(), 0, n),
            h.pow(n),
        )
    }

    /// A linear P^k inside P^n (k < n): i^* h = h_Z, i_* h_Z^a = h^(n-k+a),
    /// normal bundle O(1)^(n-k).
    pub fn linear_in_projective_space(k: u32, n: u32) -> Result<EmbeddingDatum, SpaceError> {
        if k >= n {
            return Err(SpaceError::InvalidEmbedding(
                "linear center must have smaller dimension".into(),
            ));
        }
        let pn = Space::projective_space(n);
        let pk = Space::projective_space(k);
        let r = n - k;
        let hz = GradedPolynomial::variable(pk.table().clone(), k, 0);
        let h = GradedPolynomial::variable(pn.table().clone(), n, 0);
        let mut push = Vec::new();
        for a in 0..=k {
            let mono = Monomial::from_exps(pk.table(), vec![a]);
            push.push((mono, h.pow(r + a)));
        }
        let mut normal = SheafClass::trivial(pk.table().clone(), k, 0);
        for _ in 0..r {
            normal = normal.direct_sum(&SheafClass::line(hz.clone())?);
        }
        EmbeddingDatum::new(pn.clone(), pk.clone(), r, vec![hz], push, normal, h.pow(r))
    }
}

/// Builds the blowup space of `base` along `datum`, together with its
/// exceptional divisor P(N^v) and the rewrite rules that close the canonical
/// basis under products.
pub(super) fn build_blowup(
    base: &Arc<Space>,
    datum: &EmbeddingDatum,
) -> Result<Arc<Space>, SpaceError> {
    if datum.target() != base {
        return Err(SpaceError::TableMismatch);
    }
    let center = datum.center().clone();
    let r = datum.codim();
    let nx = base.table().len();
    let nz = center.table().len();

    // merged table: base vars, center vars (renamed), marker, zeta_E
    let mut extra: Vec<(String, u32)> = Vec::new();
    {
        let mut seen = base.table().entries().to_vec();
        let add = |base_name: String, weight: u32, seen: &mut Vec<(String, u32)>| {
            let mut name = base_name.clone();
            let mut k = 1usize;
            while seen.iter().any(|(n, _)| *n == name) {
                k += 1;
                name = format!("{base_name}{k}");
            }
            seen.push((name.clone(), weight));
            (name, weight)
        };
        for (n, w) in center.table().entries() {
            extra.push(add(format!("{n}@Z"), *w, &mut seen));
        }
        extra.push(add("e".to_string(), 1, &mut seen));
        extra.push(add("zetaE".to_string(), 1, &mut seen));
    }
    let table = Arc::new(base.table().extended(&extra)?);
    let bound = base.bound();
    let center_map: Vec<usize> = (0..nz).map(|i| nx + i).collect();
    let marker = nx + nz;
    let zeta_e = nx + nz + 1;

    let lift_center =
        |p: &GradedPolynomial| -> GradedPolynomial { p.remap(table.clone(), bound, &center_map) };
    let base_id: Vec<usize> = (0..nx).collect();
    let lift_base =
        |p: &GradedPolynomial| -> GradedPolynomial { p.remap(table.clone(), bound, &base_id) };

    // i^* images and i_* images in the merged table
    let pullback_images: Vec<GradedPolynomial> =
        datum.pullback_images.iter().map(&lift_center).collect();
    let push_images: Vec<(Monomial, GradedPolynomial)> = datum
        .push_images
        .iter()
        .map(|(m, img)| {
            let mut exps = vec![0u32; table.len()];
            for (ci, &mi) in center_map.iter().enumerate() {
                exps[mi] = m.exp(ci);
            }
            (Monomial::from_exps(&table, exps), lift_base(img))
        })
        .collect();
    let normal_chern: Vec<GradedPolynomial> = (1..=r)
        .map(|i| lift_center(&datum.normal.chern_component(i)))
        .collect();

    // rules: parent rules, marker closure, center rules, E-relation, top reduction
    let mut rules = super::inherit_rules(base.rules(), &table, bound, nx);
    rules.push(Rule::MarkerSquare { marker, zeta_e });
    rules.push(Rule::MarkerPullback {
        marker,
        source_vars: (0..nx).collect(),
        images: (0..nx).map(|v| (v, pullback_images[v].clone())).collect(),
    });
    for rule in center.rules() {
        rules.push(rule.remapped(&table, bound, &center_map));
    }
    // zeta_E^r = -sum_{i=1..r} c_i(N) zeta_E^(r-i)   (E = P(N^v))
    let zeta_poly = GradedPolynomial::variable(table.clone(), bound, zeta_e);
    let mut rhs = GradedPolynomial::zero(table.clone(), bound);
    for i in 1..=r {
        let ci = &normal_chern[(i - 1) as usize];
        if !ci.is_zero() {
            rhs = rhs.sub(&ci.mul(&zeta_poly.pow(r - i)));
        }
    }
    rules.push(Rule::Power { var: zeta_e, power: r, rhs });
    rules.push(Rule::MarkerTop {
        marker,
        zeta_e,
        top: r - 1,
        center_vars: center_map.clone(),
        push: push_images.clone(),
        chern: normal_chern.clone(),
    });

    // exceptional divisor as a standalone projective bundle over the center
    let exceptional = Space::proj_bundle_named(&center, &datum.normal.dual(), "zetaE")?;

    let level = BlowupLevel {
        codim: r,
        marker,
        zeta_e,
        center_map,
        datum: datum.clone(),
        exceptional,
    };
    Ok(Arc::new(Space {
        parent: Some(base.clone()),
        level: LevelData::Blowup(Box::new(level)),
        table,
        bound,
        dim: base.dim(),
        formal: base.is_formal(),
        rules,
    }))
}
