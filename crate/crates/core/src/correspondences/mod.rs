//! Fiber products of projective bundles over a common base, correspondences
//! and their convolution, and diagonal kernels.
//!
//! A relative product materializes all factor hyperplane variables at once as
//! a tower of projective bundles whose bundles are pulled back from the base,
//! so pushforward along any single factor is the Segre rule on that factor's
//! variable alone.

mod checks;
mod flips;
mod model;

pub use checks::{
    blowup_fidelity, blowup_key_formula, cayley_gamma, cotangent_twist, hom_space,
    projectivization_instance, projector_orthogonality,
};
pub use flips::{flip_convolution, flip_structure, flip_vanishing, virtual_flip, FlipSetup};
pub use model::{
    build_decomposition_model, polynomial_string, rank_generating_check, DecompositionModel,
    ModelKind, ModelSpec,
};

use crate::polyring::{GradedPolynomial, Monomial};
use crate::sheaves::{cotangent_twist_class, SheafClass};
use crate::spaces::{ChowClass, Space, SpaceError};
use std::sync::Arc;

/// A fiber product of projectivizations P(f_1) x_S ... x_S P(f_k), realized
/// as a tower with one hyperplane variable per factor.
#[derive(Debug, Clone)]
pub struct RelativeProduct {
    base: Arc<Space>,
    factors: Vec<SheafClass>,
    space: Arc<Space>,
    zetas: Vec<usize>,
}

impl RelativeProduct {
    /// Builds the product; `names[i]` seeds the i-th hyperplane variable name.
    pub fn new(
        base: &Arc<Space>,
        factors: &[SheafClass],
        names: &[&str],
    ) -> Result<RelativeProduct, SpaceError> {
        assert_eq!(factors.len(), names.len());
        let mut space = base.clone();
        let mut zetas = Vec::new();
        for (f, name) in factors.iter().zip(names) {
            // pull the bundle's Chern data up the tower built so far
            let id: Vec<usize> = (0..base.table().len()).collect();
            let lifted = f.remap(space.table().clone(), space.bound(), &id);
            space = Space::proj_bundle_named(&space, &lifted, name)?;
            zetas.push(space.zeta_var()?);
        }
        Ok(RelativeProduct { base: base.clone(), factors: factors.to_vec(), space, zetas })
    }

    pub fn base(&self) -> &Arc<Space> {
        &self.base
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor(&self, i: usize) -> &SheafClass {
        &self.factors[i]
    }

    pub fn factor_rank(&self, i: usize) -> u32 {
        self.factors[i].rank()
    }

    /// The i-th factor's hyperplane class.
    pub fn zeta(&self, i: usize) -> ChowClass {
        ChowClass::new(
            self.space.clone(),
            GradedPolynomial::variable(self.space.table().clone(), self.space.bound(), self.zetas[i]),
        )
    }

    /// Pullback from the base along the product projection.
    pub fn pull_base(&self, value: &GradedPolynomial) -> ChowClass {
        let id: Vec<usize> = (0..self.base.table().len()).collect();
        let lifted = value.remap(self.space.table().clone(), self.space.bound(), &id);
        ChowClass::new(self.space.clone(), lifted)
    }

    /// Lifts a sheaf class given on the base to the product ring.
    pub fn lift_sheaf(&self, f: &SheafClass) -> SheafClass {
        let id: Vec<usize> = (0..self.base.table().len()).collect();
        f.remap(self.space.table().clone(), self.space.bound(), &id)
    }

    /// The sub-product on a subset of factors, preserving order.
    pub fn sub_product(&self, which: &[usize]) -> Result<RelativeProduct, SpaceError> {
        let factors: Vec<SheafClass> = which.iter().map(|&i| self.factors[i].clone()).collect();
        let names: Vec<String> = which
            .iter()
            .map(|&i| self.space.table().name(self.zetas[i]).to_string())
            .collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        RelativeProduct::new(&self.base, &factors, &name_refs)
    }

    /// Embeds a class from a sub-product: `which[t]` says which factor of
    /// `self` the t-th factor of `sub` maps to.
    pub fn embed(
        &self,
        sub: &RelativeProduct,
        which: &[usize],
        class: &ChowClass,
    ) -> Result<ChowClass, SpaceError> {
        if class.space() != sub.space() {
            return Err(SpaceError::SpaceMismatch);
        }
        if sub.base != self.base {
            return Err(SpaceError::TableMismatch);
        }
        for (t, &i) in which.iter().enumerate() {
            if sub.factors[t] != self.factors[i] {
                return Err(SpaceError::TableMismatch);
            }
        }
        let mut var_map: Vec<usize> = (0..self.base.table().len()).collect();
        for &i in which {
            var_map.push(self.zetas[i]);
        }
        let value = class
            .value()
            .remap(self.space.table().clone(), self.space.bound(), &var_map);
        Ok(ChowClass::new(self.space.clone(), value))
    }

    /// Proper pushforward along factor `i` (integration over its fibers):
    /// in normal form this extracts the coefficient of zeta_i^(rank_i - 1).
    /// Returns the image and the product it lives on.
    pub fn push_factor(
        &self,
        class: &ChowClass,
        i: usize,
    ) -> Result<(RelativeProduct, ChowClass), SpaceError> {
        if class.space() != self.space() {
            return Err(SpaceError::SpaceMismatch);
        }
        let keep: Vec<usize> = (0..self.factors.len()).filter(|&t| t != i).collect();
        let target = self.sub_product(&keep)?;
        let rank = self.factor_rank(i);
        let zvar = self.zetas[i];
        // variable translation: base identity, kept zetas in order
        let mut dest_of: Vec<Option<usize>> = vec![None; self.space.table().len()];
        for v in 0..self.base.table().len() {
            dest_of[v] = Some(v);
        }
        for (t, &k) in keep.iter().enumerate() {
            dest_of[self.zetas[k]] = Some(target.zetas[t]);
        }
        let mut out = GradedPolynomial::zero(target.space().table().clone(), target.space().bound());
        for (m, c) in class.value().terms() {
            if m.exp(zvar) != rank - 1 {
                continue;
            }
            let mut exps = vec![0u32; target.space().table().len()];
            for (v, &e) in m.exps().iter().enumerate() {
                if v == zvar {
                    continue;
                }
                if e > 0 {
                    exps[dest_of[v].expect("variable survives contraction")] = e;
                }
            }
            out.insert_term(Monomial::from_exps(target.space().table(), exps), c.clone());
        }
        let image = ChowClass::new(target.space().clone(), out);
        Ok((target, image))
    }

    /// The projective-bundle projector pi_k* along factor `i`, with the
    /// Chern corrections of that factor's bundle.
    pub fn project_factor(
        &self,
        class: &ChowClass,
        i: usize,
        k: u32,
    ) -> Result<(RelativeProduct, ChowClass), SpaceError> {
        let rank = self.factor_rank(i);
        if k > rank - 1 {
            return Err(SpaceError::IndexRange(k, rank - 1));
        }
        let bundle = self.lift_sheaf(&self.factors[i]);
        let zeta = self.zeta(i);
        let mut acc: Option<(RelativeProduct, ChowClass)> = None;
        for j in 0..=(rank - 1 - k) {
            let cj = bundle.chern_component(j);
            if cj.is_zero() {
                continue;
            }
            let term = ChowClass::new(self.space.clone(), cj)
                .mul(&zeta.pow(rank - 1 - k - j))?
                .mul(class)?;
            let (target, mut pushed) = self.push_factor(&term, i)?;
            if j % 2 == 1 {
                pushed = pushed.neg();
            }
            acc = Some(match acc {
                None => (target, pushed),
                Some((t, prev)) => {
                    let sum = prev.add(&pushed)?;
                    (t, sum)
                }
            });
        }
        match acc {
            Some(pair) => Ok(pair),
            None => {
                let keep: Vec<usize> = (0..self.factors.len()).filter(|&t| t != i).collect();
                let target = self.sub_product(&keep)?;
                let zero = ChowClass::zero(target.space().clone());
                Ok((target, zero))
            }
        }
    }

    /// The relative cotangent bundle of factor `i`, twisted by its own O(1),
    /// as a sheaf class on the product.
    pub fn omega_twist(&self, i: usize) -> Result<SheafClass, SpaceError> {
        let bundle = self.lift_sheaf(&self.factors[i]);
        let zeta = self.zeta(i);
        Ok(cotangent_twist_class(&bundle, zeta.value())?)
    }
}

/// A correspondence between factor 0 (source) and factor 1 (target) of a
/// two-factor relative product, acting by pull-multiply-push.
#[derive(Debug, Clone)]
pub struct Correspondence {
    product: RelativeProduct,
    kernel: ChowClass,
}

impl Correspondence {
    pub fn new(product: RelativeProduct, kernel: ChowClass) -> Result<Self, SpaceError> {
        if kernel.space() != product.space() {
            return Err(SpaceError::SpaceMismatch);
        }
        assert_eq!(product.num_factors(), 2, "correspondences have two legs");
        Ok(Correspondence { product, kernel })
    }

    pub fn product(&self) -> &RelativeProduct {
        &self.product
    }

    pub fn kernel(&self) -> &ChowClass {
        &self.kernel
    }

    /// Applies the correspondence to a class on the source leg.
    pub fn apply(&self, class: &ChowClass) -> Result<ChowClass, SpaceError> {
        let src = self.product.sub_product(&[0])?;
        let lifted = self.product.embed(&src, &[0], class)?;
        let (_, out) = self.product.push_factor(&self.kernel.mul(&lifted)?, 0)?;
        Ok(out)
    }
}

/// Convolution of composable correspondences: the middle legs must carry the
/// same bundle over the same base. The result acts as `g2 after g1`.
pub fn convolve(g1: &Correspondence, g2: &Correspondence) -> Result<Correspondence, SpaceError> {
    if g1.product.base != g2.product.base || g1.product.factors[1] != g2.product.factors[0] {
        return Err(SpaceError::TableMismatch);
    }
    let base = g1.product.base.clone();
    let factors = [
        g1.product.factors[0].clone(),
        g1.product.factors[1].clone(),
        g2.product.factors[1].clone(),
    ];
    let names = ["zc1", "zc2", "zc3"];
    let triple = RelativeProduct::new(&base, &factors, &names)?;
    let k1 = triple.embed(&g1.product, &[0, 1], g1.kernel())?;
    let k2 = triple.embed(&g2.product, &[1, 2], g2.kernel())?;
    let (pair, kernel) = triple.push_factor(&k1.mul(&k2)?, 1)?;
    Correspondence::new(pair, kernel)
}

/// The diagonal correspondence of P(f) over the base: kernel
/// c_m(O_1(1) box T_2(-1)) on P(f) x_S P(f), m = rank - 1.
pub fn diagonal_correspondence(
    base: &Arc<Space>,
    f: &SheafClass,
) -> Result<Correspondence, SpaceError> {
    let square = RelativeProduct::new(base, &[f.clone(), f.clone()], &["zd1", "zd2"])?;
    let kernel = diagonal_kernel(&square)?;
    Correspondence::new(square, kernel)
}

/// Diagonal kernel on an existing square product of the same bundle.
pub fn diagonal_kernel(square: &RelativeProduct) -> Result<ChowClass, SpaceError> {
    assert_eq!(square.num_factors(), 2);
    let m = square.factor_rank(0) - 1;
    // T_(P2/S)(-1) = dual of Omega_(P2/S)(1); twist by O_1(1) and take c_top
    let t2 = square.omega_twist(1)?.dual();
    let twisted = t2.tensor_line(square.zeta(0).value())?;
    Ok(ChowClass::new(square.space().clone(), twisted.chern_component(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Coeff;
    use crate::spaces::integrate;

    fn point_square() -> RelativeProduct {
        // P^1 x P^1 as a relative product over the point
        let pt = Space::point();
        let f = SheafClass::trivial(pt.table().clone(), 0, 2);
        RelativeProduct::new(&pt, &[f.clone(), f], &["z1", "z2"]).unwrap()
    }

    #[test]
    fn product_of_lines_ring() {
        let prod = point_square();
        assert_eq!(prod.space().dim(), 2);
        let z1 = prod.zeta(0);
        let z2 = prod.zeta(1);
        assert!(z1.pow(2).is_zero());
        assert!(z2.pow(2).is_zero());
        assert_eq!(integrate(&z1.mul(&z2).unwrap()).unwrap(), Coeff::from(1));
    }

    #[test]
    fn push_factor_is_fiber_integration() {
        let prod = point_square();
        let z1 = prod.zeta(0);
        let z2 = prod.zeta(1);
        let (_, pushed) = prod.push_factor(&z1.mul(&z2).unwrap(), 0).unwrap();
        // p_2*(z1 z2) = z2 on the second factor
        assert_eq!(pushed.basis_string(), "z2");
        let (_, dropped) = prod.push_factor(&z2, 0).unwrap();
        assert!(dropped.is_zero());
    }

    #[test]
    fn product_dimension_bookkeeping() {
        let s = Space::formal_base(4, &[("F", 3), ("G", 2)]).unwrap();
        let f = s.formal_bundle("F").unwrap();
        let g = s.formal_bundle("G").unwrap();
        let prod = RelativeProduct::new(&s, &[f, g], &["zf", "zg"]).unwrap();
        assert_eq!(prod.space().dim(), 4 + 2 + 1);
        assert_eq!(prod.space().bound(), 4);
    }

    #[test]
    fn diagonal_of_p1_is_sum_of_hyperplanes() {
        let pt = Space::point();
        let f = SheafClass::trivial(pt.table().clone(), 0, 2);
        let diag = diagonal_correspondence(&pt, &f).unwrap();
        let z1 = diag.product().zeta(0);
        let z2 = diag.product().zeta(1);
        assert_eq!(*diag.kernel(), z1.add(&z2).unwrap());
    }

    #[test]
    fn diagonal_acts_as_identity_on_p1() {
        let pt = Space::point();
        let f = SheafClass::trivial(pt.table().clone(), 0, 2);
        let diag = diagonal_correspondence(&pt, &f).unwrap();
        let leg = diag.product().sub_product(&[0]).unwrap();
        let z = leg.zeta(0);
        for class in [ChowClass::one(leg.space().clone()), z.clone()] {
            let image = diag.apply(&class).unwrap();
            // the image lives on the other leg; compare basis coordinates
            assert_eq!(image.basis_string(), class.basis_string().replace("zd1", "zd2"));
        }
    }

    #[test]
    fn convolution_with_diagonal_is_identity_kernel() {
        let pt = Space::point();
        let f = SheafClass::trivial(pt.table().clone(), 0, 3);
        let diag = diagonal_correspondence(&pt, &f).unwrap();
        let again = convolve(&diag, &diag).unwrap();
        assert_eq!(
            again.kernel().value().to_string(),
            diag.kernel().value().to_string().replace("zd1", "zc1").replace("zd2", "zc3")
        );
    }
}
