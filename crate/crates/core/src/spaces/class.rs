//! Normal-form cycle classes and the structural maps of a tower.

use super::{LevelData, RootKind, Space, SpaceError};
use crate::polyring::{Coeff, GradedPolynomial, Monomial};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

/// An element of a space's Chow ring, stored in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChowClass {
    space: Arc<Space>,
    value: GradedPolynomial,
}

impl ChowClass {
    /// Wraps a polynomial after reducing it to normal form.
    pub fn new(space: Arc<Space>, value: GradedPolynomial) -> ChowClass {
        let value = space.normalize(&value);
        ChowClass { space, value }
    }

    pub fn zero(space: Arc<Space>) -> ChowClass {
        let value = GradedPolynomial::zero(space.table().clone(), space.bound());
        ChowClass { space, value }
    }

    pub fn one(space: Arc<Space>) -> ChowClass {
        let value = GradedPolynomial::one(space.table().clone(), space.bound());
        ChowClass { space, value }
    }

    pub fn constant(space: Arc<Space>, c: impl Into<Coeff>) -> ChowClass {
        let value = GradedPolynomial::constant(space.table().clone(), space.bound(), c);
        ChowClass { space, value }
    }

    /// The hyperplane class of the top projective-bundle level.
    pub fn zeta(space: &Arc<Space>) -> Result<ChowClass, SpaceError> {
        let v = space.zeta_var()?;
        Ok(ChowClass {
            space: space.clone(),
            value: GradedPolynomial::variable(space.table().clone(), space.bound(), v),
        })
    }

    pub fn from_basis_monomial(space: &Arc<Space>, m: &Monomial) -> ChowClass {
        let value = GradedPolynomial::from_terms(
            space.table().clone(),
            space.bound(),
            [(m.clone(), Coeff::one())],
        );
        ChowClass::new(space.clone(), value)
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn value(&self) -> &GradedPolynomial {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn check_space(&self, other: &ChowClass) -> Result<(), SpaceError> {
        if Arc::ptr_eq(&self.space, &other.space) || self.space == other.space {
            Ok(())
        } else {
            Err(SpaceError::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &ChowClass) -> Result<ChowClass, SpaceError> {
        self.check_space(other)?;
        Ok(ChowClass {
            space: self.space.clone(),
            value: self.value.add(&other.value),
        })
    }

    pub fn sub(&self, other: &ChowClass) -> Result<ChowClass, SpaceError> {
        self.check_space(other)?;
        Ok(ChowClass {
            space: self.space.clone(),
            value: self.value.sub(&other.value),
        })
    }

    pub fn neg(&self) -> ChowClass {
        ChowClass { space: self.space.clone(), value: self.value.neg() }
    }

    pub fn scale(&self, k: impl Into<Coeff>) -> ChowClass {
        ChowClass { space: self.space.clone(), value: self.value.scale(&k.into()) }
    }

    /// Intersection product in normal form.
    pub fn mul(&self, other: &ChowClass) -> Result<ChowClass, SpaceError> {
        self.check_space(other)?;
        Ok(ChowClass::new(self.space.clone(), self.value.mul(&other.value)))
    }

    pub fn pow(&self, k: u32) -> ChowClass {
        ChowClass::new(self.space.clone(), self.value.pow(k))
    }

    /// Renders the class in basis coordinates: codimension ascending, basis
    /// order within each codimension. Values with terms outside the canonical
    /// basis (possible only for hand-built polynomials) print raw.
    pub fn basis_string(&self) -> String {
        if self.value.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<(Monomial, Coeff)> = Vec::new();
        for k in 0..=self.space.bound() {
            for m in self.space.basis(k) {
                let c = self.value.coefficient(&m);
                if !c.is_zero() {
                    parts.push((m, c));
                }
            }
        }
        if parts.len() != self.value.num_terms() {
            return self.value.to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in parts.iter().enumerate() {
            let mag = c.abs();
            let neg = c < &Coeff::zero();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = crate::polyring::monomial_string(self.space.table(), m);
            if m.is_one() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for ChowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.basis_string())
    }
}

/// The structural map kinds of the towers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapKind {
    /// projection of the top projective-bundle level
    ProjBundleProjection,
    /// projection of the top blowup level
    BlowupProjection,
    /// projection of the top total-space level (flat, not proper)
    TotalSpaceProjection,
    /// j: exceptional divisor into the blowup
    ExceptionalInclusion,
    /// i: center into the blown-up base
    CenterInclusion,
}

/// A structural map between two spaces of a tower. Maps tied to a blowup
/// carry the blowup space as context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralMap {
    pub kind: MapKind,
    pub source: Arc<Space>,
    pub target: Arc<Space>,
    context: Option<Arc<Space>>,
}

impl StructuralMap {
    /// The projection of the top tower level onto its base.
    pub fn projection(space: &Arc<Space>) -> Result<StructuralMap, SpaceError> {
        let parent = space.parent().ok_or(SpaceError::NotProjBundle)?.clone();
        let kind = match space.level() {
            LevelData::ProjBundle { .. } => MapKind::ProjBundleProjection,
            LevelData::Blowup(_) => MapKind::BlowupProjection,
            LevelData::TotalSpace { .. } => MapKind::TotalSpaceProjection,
            LevelData::Root(_) => return Err(SpaceError::NotProjBundle),
        };
        Ok(StructuralMap { kind, source: space.clone(), target: parent, context: None })
    }

    /// j: E -> Bl for a blowup space.
    pub fn exceptional_inclusion(blowup: &Arc<Space>) -> Result<StructuralMap, SpaceError> {
        let lvl = blowup.blowup_level()?;
        Ok(StructuralMap {
            kind: MapKind::ExceptionalInclusion,
            source: lvl.exceptional.clone(),
            target: blowup.clone(),
            context: Some(blowup.clone()),
        })
    }

    /// p: E -> Z, the bundle projection of the exceptional divisor.
    pub fn exceptional_projection(blowup: &Arc<Space>) -> Result<StructuralMap, SpaceError> {
        let lvl = blowup.blowup_level()?;
        StructuralMap::projection(&lvl.exceptional)
    }

    /// i: Z -> X, the center inclusion of a blowup space.
    pub fn center_inclusion(blowup: &Arc<Space>) -> Result<StructuralMap, SpaceError> {
        let lvl = blowup.blowup_level()?;
        let parent = blowup.parent().expect("blowup has a base").clone();
        Ok(StructuralMap {
            kind: MapKind::CenterInclusion,
            source: lvl.center().clone(),
            target: parent,
            context: Some(blowup.clone()),
        })
    }

    fn context_blowup(&self) -> Result<&Arc<Space>, SpaceError> {
        self.context.as_ref().ok_or(SpaceError::NotBlowup)
    }
}

/// Flat/Gysin pullback along a structural map: `class` lives on the target.
pub fn pullback(map: &StructuralMap, class: &ChowClass) -> Result<ChowClass, SpaceError> {
    if class.space() != &map.target {
        return Err(SpaceError::SpaceMismatch);
    }
    match map.kind {
        MapKind::ProjBundleProjection
        | MapKind::BlowupProjection
        | MapKind::TotalSpaceProjection => {
            let id: Vec<usize> = (0..map.target.table().len()).collect();
            let value =
                class.value().remap(map.source.table().clone(), map.source.bound(), &id);
            Ok(ChowClass::new(map.source.clone(), value))
        }
        MapKind::ExceptionalInclusion => {
            // j^*(pi^* alpha) = p^* i^* alpha and j^*(j_* x) = -zeta_E x
            let bl = map.context_blowup()?;
            let lvl = bl.blowup_level()?;
            let e_space = &map.source;
            let e_table = e_space.table().clone();
            let e_zeta = e_space.zeta_var()?;
            let center = lvl.center();
            let x_space = bl.parent().expect("blowup has a base");
            let nx = x_space.table().len();
            let center_pad: Vec<usize> = (0..center.table().len()).collect();
            let mut out = GradedPolynomial::zero(e_table.clone(), e_space.bound());
            for (m, c) in class.value().terms() {
                let marker_exp = m.exp(lvl.marker);
                if marker_exp == 0 {
                    // normal form: a pure base monomial
                    let mut base_exps = m.exps().to_vec();
                    base_exps.truncate(nx);
                    let base_mono = Monomial::from_exps(x_space.table(), base_exps);
                    let base_poly = GradedPolynomial::from_terms(
                        x_space.table().clone(),
                        x_space.bound(),
                        [(base_mono, c.clone())],
                    );
                    let on_center = lvl.datum.pull(&base_poly)?;
                    out = out.add(&on_center.remap(
                        e_table.clone(),
                        e_space.bound(),
                        &center_pad,
                    ));
                } else {
                    // marker_exp is 1 in normal form
                    let mut exps = vec![0u32; e_table.len()];
                    for (ci, &mi) in lvl.center_map.iter().enumerate() {
                        exps[ci] = m.exp(mi);
                    }
                    exps[e_zeta] = m.exp(lvl.zeta_e) + 1;
                    out.insert_term(
                        Monomial::from_exps(&e_table, exps),
                        -c.clone(),
                    );
                }
            }
            Ok(ChowClass::new(e_space.clone(), out))
        }
        MapKind::CenterInclusion => {
            let bl = map.context_blowup()?;
            let lvl = bl.blowup_level()?;
            let pulled = lvl.datum.pull(class.value())?;
            Ok(ChowClass::new(map.source.clone(), pulled))
        }
    }
}

/// Proper pushforward along a structural map: `class` lives on the source.
pub fn pushforward(map: &StructuralMap, class: &ChowClass) -> Result<ChowClass, SpaceError> {
    if class.space() != &map.source {
        return Err(SpaceError::SpaceMismatch);
    }
    match map.kind {
        MapKind::ProjBundleProjection => {
            let src = &map.source;
            let zeta = src.zeta_var()?;
            let rank = src.top_rank()?;
            let target = &map.target;
            let mut out = GradedPolynomial::zero(target.table().clone(), target.bound());
            for (m, c) in class.value().terms() {
                if m.exp(zeta) == rank - 1 {
                    let stripped = m.with_exp_lowered(zeta, rank - 1, 1);
                    let mut exps = stripped.exps().to_vec();
                    exps.truncate(target.table().len());
                    out.insert_term(Monomial::from_exps(target.table(), exps), c.clone());
                }
            }
            Ok(ChowClass::new(target.clone(), out))
        }
        MapKind::BlowupProjection => {
            let lvl = map.source.blowup_level()?;
            let target = &map.target;
            let mut out = GradedPolynomial::zero(target.table().clone(), target.bound());
            for (m, c) in class.value().terms() {
                if m.exp(lvl.marker) == 0 {
                    let mut exps = m.exps().to_vec();
                    exps.truncate(target.table().len());
                    out.insert_term(Monomial::from_exps(target.table(), exps), c.clone());
                }
            }
            Ok(ChowClass::new(target.clone(), out))
        }
        MapKind::TotalSpaceProjection => Err(SpaceError::NonProper),
        MapKind::ExceptionalInclusion => {
            // formal basis insertion: zeta_E^i p^* z -> marker zeta_E^i z
            let bl = map.context_blowup()?;
            let lvl = bl.blowup_level()?;
            let e_space = &map.source;
            let e_zeta = e_space.zeta_var()?;
            let mut out = GradedPolynomial::zero(bl.table().clone(), bl.bound());
            for (m, c) in class.value().terms() {
                let mut exps = vec![0u32; bl.table().len()];
                for (ci, &mi) in lvl.center_map.iter().enumerate() {
                    exps[mi] = m.exp(ci);
                }
                exps[lvl.zeta_e] = m.exp(e_zeta);
                exps[lvl.marker] = 1;
                out.insert_term(Monomial::from_exps(bl.table(), exps), c.clone());
            }
            Ok(ChowClass::new(bl.clone(), out))
        }
        MapKind::CenterInclusion => {
            let bl = map.context_blowup()?;
            let lvl = bl.blowup_level()?;
            let pushed = lvl.datum.push(class.value())?;
            Ok(ChowClass::new(map.target.clone(), pushed))
        }
    }
}

/// Integrates a class over a proper tower above the point: iterated proper
/// pushforward, then the coefficient of the dimension-0 basis class.
pub fn integrate(class: &ChowClass) -> Result<BigInt, SpaceError> {
    let mut current = class.clone();
    loop {
        let space = current.space().clone();
        match space.level() {
            LevelData::Root(RootKind::Point) => {
                return Ok(current.value().constant_term());
            }
            LevelData::Root(RootKind::FormalBase { .. }) => {
                return Err(SpaceError::NotIntegrable);
            }
            LevelData::TotalSpace { .. } => return Err(SpaceError::NotIntegrable),
            _ => {
                let pi = StructuralMap::projection(&space)?;
                current = pushforward(&pi, &current)?;
            }
        }
    }
}

/// Explicit basis projector of the projective bundle formula:
/// pi_i* beta = sum_{j=0}^{r-1-i} (-1)^j c_j(E) cap pi_*(zeta^(r-1-i-j) beta).
pub fn proj_project(class: &ChowClass, i: u32) -> Result<ChowClass, SpaceError> {
    let space = class.space().clone();
    let rank = space.top_rank()?;
    if i > rank - 1 {
        return Err(SpaceError::IndexRange(i, rank - 1));
    }
    let bundle = space.top_bundle()?.clone();
    let base = space.parent().expect("projective bundle has a base").clone();
    let pi = StructuralMap::projection(&space)?;
    let zeta = ChowClass::zeta(&space)?;
    let mut acc = ChowClass::zero(base.clone());
    for j in 0..=(rank - 1 - i) {
        let cj = bundle.chern_component(j);
        if cj.is_zero() {
            continue;
        }
        let pushed = pushforward(&pi, &zeta.pow(rank - 1 - i - j).mul(class)?)?;
        let cj_class = ChowClass::new(base.clone(), cj);
        let signed = if j % 2 == 0 {
            cj_class.mul(&pushed)?
        } else {
            cj_class.mul(&pushed)?.neg()
        };
        acc = acc.add(&signed)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheaves::SheafClass;

    #[test]
    fn integrate_top_power_on_projective_space() {
        for n in 0..=4u32 {
            let pn = Space::projective_space(n);
            let h = if n == 0 {
                ChowClass::one(pn.clone())
            } else {
                ChowClass::new(
                    pn.clone(),
                    GradedPolynomial::variable(pn.table().clone(), n, 0),
                )
            };
            assert_eq!(integrate(&h.pow(n)).unwrap(), BigInt::from(1));
        }
        // wrong dimension integrates to zero
        let p2 = Space::projective_space(2);
        let h = ChowClass::new(p2.clone(), GradedPolynomial::variable(p2.table().clone(), 2, 0));
        assert_eq!(integrate(&h).unwrap(), BigInt::from(0));
    }

    #[test]
    fn integrate_rejects_formal_towers() {
        let s = Space::formal_base(3, &[("E", 2)]).unwrap();
        let one = ChowClass::one(s.clone());
        assert!(matches!(integrate(&one), Err(SpaceError::NotIntegrable)));
    }

    #[test]
    fn pushforward_powers_of_zeta() {
        // pi_*(zeta^(r-2)) = 0, pi_*(zeta^(r-1)) = 1; higher powers give
        // Segre classes of the dual bundle after pre-reduction.
        let s = Space::formal_base(5, &[("E", 3)]).unwrap();
        let e = s.formal_bundle("E").unwrap();
        let pe = Space::proj_bundle(&s, &e).unwrap();
        let pi = StructuralMap::projection(&pe).unwrap();
        let zeta = ChowClass::zeta(&pe).unwrap();
        let r = 3u32;
        assert!(pushforward(&pi, &zeta.pow(r - 2)).unwrap().is_zero());
        assert_eq!(pushforward(&pi, &zeta.pow(r - 1)).unwrap(), ChowClass::one(s.clone()));
        let dual_segre = e.dual().segre();
        for k in 1..=2u32 {
            let got = pushforward(&pi, &zeta.pow(r - 1 + k)).unwrap();
            let want = ChowClass::new(s.clone(), dual_segre.weight_component(k));
            assert_eq!(got, want, "segre mismatch at k={k}");
        }
    }

    #[test]
    fn pushforward_after_prenormalization() {
        // pi_*(zeta^r * pi^* alpha) = c_1(E) * alpha
        let s = Space::formal_base(4, &[("E", 2)]).unwrap();
        let e = s.formal_bundle("E").unwrap();
        let pe = Space::proj_bundle(&s, &e).unwrap();
        let pi = StructuralMap::projection(&pe).unwrap();
        let alpha = ChowClass::new(
            s.clone(),
            GradedPolynomial::variable(s.table().clone(), 4, 0),
        );
        let up = pullback(&pi, &alpha).unwrap();
        let zeta = ChowClass::zeta(&pe).unwrap();
        let got = pushforward(&pi, &zeta.pow(2).mul(&up).unwrap()).unwrap();
        let c1 = ChowClass::new(s.clone(), e.chern_component(1));
        assert_eq!(got, c1.mul(&alpha).unwrap());
    }

    #[test]
    fn proj_project_extracts_coefficients() {
        let s = Space::formal_base(5, &[("E", 3)]).unwrap();
        let e = s.formal_bundle("E").unwrap();
        let pe = Space::proj_bundle(&s, &e).unwrap();
        let pi = StructuralMap::projection(&pe).unwrap();
        let zeta = ChowClass::zeta(&pe).unwrap();
        let alpha = ChowClass::new(
            s.clone(),
            GradedPolynomial::variable(s.table().clone(), 5, 0),
        );
        // beta = zeta^j pi^* alpha projects to alpha at index j and 0 elsewhere
        for j in 0..3u32 {
            let beta = zeta.pow(j).mul(&pullback(&pi, &alpha).unwrap()).unwrap();
            for i in 0..3u32 {
                let got = proj_project(&beta, i).unwrap();
                if i == j {
                    assert_eq!(got, alpha);
                } else {
                    assert!(got.is_zero(), "expected 0 at (i,j)=({i},{j})");
                }
            }
        }
    }

    #[test]
    fn proj_project_is_inverse_of_expansion() {
        // sum_i zeta^i pi^*(pi_i* x) = x for a sample class
        let p1 = Space::projective_space(1);
        let h = GradedPolynomial::variable(p1.table().clone(), 1, 0);
        let e = SheafClass::trivial(p1.table().clone(), 1, 1)
            .direct_sum(&SheafClass::line(h).unwrap());
        let pe = Space::proj_bundle(&p1, &e).unwrap();
        let pi = StructuralMap::projection(&pe).unwrap();
        let zeta = ChowClass::zeta(&pe).unwrap();
        let hh = ChowClass::new(pe.clone(), GradedPolynomial::variable(pe.table().clone(), 2, 0));
        let x = zeta.add(&hh.scale(3)).unwrap().add(&zeta.mul(&hh).unwrap()).unwrap();
        let mut rebuilt = ChowClass::zero(pe.clone());
        for i in 0..2u32 {
            let coeff = proj_project(&x, i).unwrap();
            rebuilt = rebuilt
                .add(&zeta.pow(i).mul(&pullback(&pi, &coeff).unwrap()).unwrap())
                .unwrap();
        }
        assert_eq!(rebuilt, x);
    }

    #[test]
    fn blowup_maps_follow_the_key_relations() {
        let emb = super::super::EmbeddingDatum::point_in_projective_space(2).unwrap();
        let p2 = Space::projective_space(2);
        let bl = Space::blowup(&p2, &emb).unwrap();
        let j = StructuralMap::exceptional_inclusion(&bl).unwrap();
        let e_space = j.source.clone();
        let one_e = ChowClass::one(e_space.clone());
        let j1 = pushforward(&j, &one_e).unwrap();
        // j^* j_* 1 = -zeta_E on the exceptional P^1
        let pulled = pullback(&j, &j1).unwrap();
        let zeta_e = ChowClass::zeta(&e_space).unwrap();
        assert_eq!(pulled, zeta_e.neg());
        // pi_* kills j_* 1 and pi_* pi^* = id
        let pi = StructuralMap::projection(&bl).unwrap();
        assert!(pushforward(&pi, &j1).unwrap().is_zero());
        let h = ChowClass::new(p2.clone(), GradedPolynomial::variable(p2.table().clone(), 2, 0));
        let up = pullback(&pi, &h).unwrap();
        assert_eq!(pushforward(&pi, &up).unwrap(), h);
        // i^*([Z]) = c_r(N) = 0 for a point center
        let i_map = StructuralMap::center_inclusion(&bl).unwrap();
        let z_class = ChowClass::new(p2.clone(), emb.fundamental().clone());
        assert!(pullback(&i_map, &z_class).unwrap().is_zero());
    }

    #[test]
    fn strict_transform_square_vanishes() {
        // (pi^* h - j_* 1)^2 = 0 on Bl_pt P^2
        let emb = super::super::EmbeddingDatum::point_in_projective_space(2).unwrap();
        let p2 = Space::projective_space(2);
        let bl = Space::blowup(&p2, &emb).unwrap();
        let pi = StructuralMap::projection(&bl).unwrap();
        let j = StructuralMap::exceptional_inclusion(&bl).unwrap();
        let h = ChowClass::new(p2.clone(), GradedPolynomial::variable(p2.table().clone(), 2, 0));
        let line = pullback(&pi, &h).unwrap();
        let excep = pushforward(&j, &ChowClass::one(j.source.clone())).unwrap();
        let strict = line.sub(&excep).unwrap();
        assert!(strict.pow(2).is_zero());
        // integrate((j_* 1)^2) = -1
        assert_eq!(integrate(&excep.pow(2)).unwrap(), BigInt::from(-1));
    }
}
