//! Mixed-tower cross-checks against classical intersection numbers: bundles
//! over blowups, iterated blowups, and flips over geometric bases.

use chowcalc::correspondences::{convolve, diagonal_kernel, FlipSetup};
use chowcalc::polyring::GradedPolynomial;
use chowcalc::sheaves::SheafClass;
use chowcalc::spaces::{
    integrate, pullback, pushforward, ChowClass, EmbeddingDatum, Space, StructuralMap,
};
use num_bigint::BigInt;
use std::sync::Arc;

fn bl_pt_p2() -> (Arc<Space>, ChowClass, ChowClass) {
    let emb = EmbeddingDatum::point_in_projective_space(2).unwrap();
    let p2 = emb.target().clone();
    let bl = Space::blowup(&p2, &emb).unwrap();
    let pi = StructuralMap::projection(&bl).unwrap();
    let j = StructuralMap::exceptional_inclusion(&bl).unwrap();
    let h = ChowClass::new(p2.clone(), GradedPolynomial::variable(p2.table().clone(), 2, 0));
    let h_up = pullback(&pi, &h).unwrap();
    let e = pushforward(&j, &ChowClass::one(j.source.clone())).unwrap();
    (bl, h_up, e)
}

#[test]
fn proj_bundle_over_a_blowup() {
    // P(O + O(-e)) over Bl_pt P^2: the relation mixes exceptional classes
    let (bl, h, e) = bl_pt_p2();
    let line = SheafClass::line(e.neg().value().clone()).unwrap();
    let bundle = SheafClass::trivial(bl.table().clone(), bl.bound(), 1).direct_sum(&line);
    let tower = Space::proj_bundle(&bl, &bundle).unwrap();
    assert_eq!(tower.dim(), 3);
    let pi = StructuralMap::projection(&tower).unwrap();
    let zeta = ChowClass::zeta(&tower).unwrap();
    let h_t = pullback(&pi, &h).unwrap();
    let e_t = pullback(&pi, &e).unwrap();
    // fiber degree: integral of zeta against a point of the base
    assert_eq!(integrate(&zeta.mul(&h_t.pow(2)).unwrap()).unwrap(), BigInt::from(1));
    // pi_*(zeta^2) = s_1 of the dual = -c_1 of the dual... = c_1(bundle) = -e
    let pushed = pushforward(&pi, &zeta.pow(2)).unwrap();
    assert_eq!(pushed, e.neg());
    // hence integrate(zeta^2 . pi^* e) = integrate(-e^2) = 1
    assert_eq!(integrate(&zeta.pow(2).mul(&e_t).unwrap()).unwrap(), BigInt::from(1));
    // and zeta^2 pi^*h integrates to zero since e.h = 0
    assert_eq!(integrate(&zeta.pow(2).mul(&h_t).unwrap()).unwrap(), BigInt::from(0));
}

#[test]
fn two_point_blowup_is_a_degree_seven_del_pezzo() {
    // blow up Bl_pt P^2 at a second (disjoint) point: the embedding datum is
    // assembled by hand and revalidated exactly
    let (bl, h, e1) = bl_pt_p2();
    let pt = Space::point();
    let zero = GradedPolynomial::zero(pt.table().clone(), 0);
    let point_class = h.pow(2);
    let emb2 = EmbeddingDatum::new(
        bl.clone(),
        pt.clone(),
        2,
        vec![zero.clone(); bl.table().len()],
        vec![(chowcalc::polyring::Monomial::one(0), point_class.value().clone())],
        SheafClass::trivial(pt.table().clone(), 0, 2),
        point_class.value().clone(),
    )
    .expect("a point off the exceptional divisor embeds");
    let bl2 = Space::blowup(&bl, &emb2).unwrap();
    assert_eq!(bl2.basis_ranks_by_dim(), vec![1, 3, 1]);

    let pi2 = StructuralMap::projection(&bl2).unwrap();
    let j2 = StructuralMap::exceptional_inclusion(&bl2).unwrap();
    let h = pullback(&pi2, &h).unwrap();
    let e1 = pullback(&pi2, &e1).unwrap();
    let e2 = pushforward(&j2, &ChowClass::one(j2.source.clone())).unwrap();
    // pairwise intersections
    assert_eq!(integrate(&e1.mul(&e2).unwrap()).unwrap(), BigInt::from(0));
    assert_eq!(integrate(&e2.pow(2)).unwrap(), BigInt::from(-1));
    assert_eq!(integrate(&e1.pow(2)).unwrap(), BigInt::from(-1));
    assert_eq!(integrate(&h.mul(&e2).unwrap()).unwrap(), BigInt::from(0));
    // anticanonical degree 9 - 2 = 7
    let k = h.scale(-3).add(&e1).unwrap().add(&e2).unwrap();
    assert_eq!(integrate(&k.pow(2)).unwrap(), BigInt::from(7));
}

#[test]
fn flip_convolution_over_a_geometric_base() {
    // S = P^1 with F = O + O(1) (n = 1) and F' = O + O(-1) (m = 1):
    // the convolution identity holds with honest Chern classes in play
    let p1 = Space::projective_space(1);
    let h = GradedPolynomial::variable(p1.table().clone(), 1, 0);
    let f = SheafClass::trivial(p1.table().clone(), 1, 1)
        .direct_sum(&SheafClass::line(h.clone()).unwrap());
    let fp = SheafClass::trivial(p1.table().clone(), 1, 1)
        .direct_sum(&SheafClass::line(h.neg()).unwrap());
    let setup = FlipSetup::new(&p1, &f, &fp).unwrap();
    let conv = convolve(&setup.phi_pull, &setup.phi_push).unwrap();
    let delta = diagonal_kernel(conv.product()).unwrap();
    assert_eq!(conv.kernel(), &delta);

    // Phi_* Phi^* = Id on every basis class of P'
    let pp_leg = setup.phi_pull.product().sub_product(&[0]).unwrap();
    for k in 0..=pp_leg.space().bound() {
        for mono in pp_leg.space().basis(k) {
            let x = ChowClass::from_basis_monomial(pp_leg.space(), &mono);
            let roundtrip = setup.push(&setup.pull(&x).unwrap()).unwrap();
            assert_eq!(roundtrip.basis_string(), x.basis_string());
        }
    }
}

#[test]
fn blowup_with_a_blowup_center() {
    // Z = Bl_pt P^2 embedded as the zero section of P_Z(O + E) with
    // E = O + O(h): the section is cut out by the tautological composite,
    // a regular section of E^v(1), so the normal bundle is E^v and
    // [Z] = c_2(E^v(1)). The center's own rewrite rules (including its
    // exceptional reduction) get transported into the outer blowup.
    let (z, h, e1) = bl_pt_p2();
    let e_bundle = SheafClass::trivial(z.table().clone(), z.bound(), 1)
        .direct_sum(&SheafClass::line(h.value().clone()).unwrap());
    let normal = e_bundle.dual();
    let ambient = SheafClass::trivial(z.table().clone(), z.bound(), 1).direct_sum(&e_bundle);
    let p = Space::proj_bundle(&z, &ambient).unwrap();
    assert_eq!(p.dim(), 4);
    assert_eq!(p.basis_ranks_by_codim(), vec![1, 3, 4, 3, 1]);

    let zeta = ChowClass::zeta(&p).unwrap();
    let z_pad: Vec<usize> = (0..z.table().len()).collect();
    let lift = |c: &ChowClass| -> ChowClass {
        ChowClass::new(p.clone(), c.value().remap(p.table().clone(), p.bound(), &z_pad))
    };
    // [Z] = c_2(E^v tensor O(1)) on P
    let n_on_p = normal.remap(p.table().clone(), p.bound(), &z_pad);
    let fundamental = ChowClass::new(
        p.clone(),
        n_on_p.tensor_line(zeta.value()).unwrap().chern_component(2),
    );
    // i^*: base generators restrict to themselves, zeta to 0
    let mut pull_images = Vec::new();
    for v in 0..z.table().len() {
        pull_images.push(GradedPolynomial::variable(z.table().clone(), z.bound(), v));
    }
    pull_images.push(GradedPolynomial::zero(z.table().clone(), z.bound()));
    // i_*(z) = pi^*(z) . [Z]
    let mut push_images = Vec::new();
    for k in 0..=z.bound() {
        for mono in z.basis(k) {
            let zc = ChowClass::from_basis_monomial(&z, &mono);
            let image = lift(&zc).mul(&fundamental).unwrap();
            push_images.push((mono, image.value().clone()));
        }
    }
    let emb = EmbeddingDatum::new(
        p.clone(),
        z.clone(),
        2,
        pull_images,
        push_images,
        normal.clone(),
        fundamental.value().clone(),
    )
    .expect("zero-section datum validates");

    let bl = Space::blowup(&p, &emb).unwrap();
    assert_eq!(bl.basis_ranks_by_codim(), vec![1, 4, 6, 4, 1]);

    let pi = StructuralMap::projection(&bl).unwrap();
    let j = StructuralMap::exceptional_inclusion(&bl).unwrap();
    let p_map = StructuralMap::exceptional_projection(&bl).unwrap();
    let i_map = StructuralMap::center_inclusion(&bl).unwrap();

    // key formula with the nested center: pi^* i_*(z) = j_*(c_1(V) p^* z)
    let e_space = j.source.clone();
    let n_on_e = normal.remap(
        e_space.table().clone(),
        e_space.bound(),
        &(0..z.table().len()).collect::<Vec<_>>(),
    );
    let zeta_e = ChowClass::zeta(&e_space).unwrap();
    let excess = n_on_e
        .quotient(&SheafClass::line(zeta_e.neg().value().clone()).unwrap())
        .unwrap();
    let c_top = ChowClass::new(e_space.clone(), excess.chern_component(1));
    for k in 0..=z.bound() {
        for mono in z.basis(k) {
            let zc = ChowClass::from_basis_monomial(&z, &mono);
            let lhs = pullback(&pi, &pushforward(&i_map, &zc).unwrap()).unwrap();
            let rhs =
                pushforward(&j, &c_top.mul(&pullback(&p_map, &zc).unwrap()).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "key formula at center class {}", zc.basis_string());
        }
    }

    // products of exceptional insertions force the inner blowup's rules to
    // fire inside outer marker terms
    let je1 = pushforward(&j, &pullback(&p_map, &e1).unwrap()).unwrap();
    assert_eq!(integrate(&je1.pow(2)).unwrap(), BigInt::from(1));
    let e_out = pushforward(&j, &ChowClass::one(e_space.clone())).unwrap();
    let h2_up = pullback(&pi, &lift(&h.pow(2))).unwrap();
    assert_eq!(
        integrate(&e_out.pow(2).mul(&h2_up).unwrap()).unwrap(),
        BigInt::from(-1)
    );
    // pi_* pi^* = id on every base class
    for k in 0..=p.bound() {
        for mono in p.basis(k) {
            let a = ChowClass::from_basis_monomial(&p, &mono);
            assert_eq!(pushforward(&pi, &pullback(&pi, &a).unwrap()).unwrap(), a);
        }
    }
}

#[test]
fn blowup_formula_recovers_flip_type_n_zero() {
    // a type (n, 0) flip degenerates to the blowup formula: the convolution
    // identity holds and Phi_* has no vanishing columns beyond n
    for n in 1..=3u32 {
        let setup = FlipSetup::formal(n, 0, n + 3).unwrap();
        let conv = convolve(&setup.phi_pull, &setup.phi_push).unwrap();
        let delta = diagonal_kernel(conv.product()).unwrap();
        assert_eq!(conv.kernel(), &delta, "n = {n}");
    }
}
