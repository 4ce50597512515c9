//! Cross-module invariants: projection formulas on basis pairs, normal-form
//! uniqueness under random products, free-module bijections, and the
//! correspondence-algebra laws at small ranks.

use chowcalc::correspondences::{convolve, diagonal_correspondence, Correspondence, RelativeProduct};
use chowcalc::polyring::{Coeff, GradedPolynomial, Monomial};
use chowcalc::sheaves::SheafClass;
use chowcalc::spaces::{
    integrate, pullback, pushforward, ChowClass, EmbeddingDatum, Space, StructuralMap,
};
use num_bigint::BigInt;
use proptest::prelude::*;
use std::sync::Arc;

fn all_basis(space: &Arc<Space>) -> Vec<ChowClass> {
    (0..=space.bound())
        .flat_map(|k| space.basis(k))
        .map(|m| ChowClass::from_basis_monomial(space, &m))
        .collect()
}

fn assert_projection_formula(map: &StructuralMap, label: &str) {
    for alpha in all_basis(&map.target) {
        for beta in all_basis(&map.source) {
            let lhs = pushforward(map, &pullback(map, &alpha).unwrap().mul(&beta).unwrap()).unwrap();
            let rhs = alpha.mul(&pushforward(map, &beta).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "{label}: alpha={alpha}, beta={beta}");
        }
    }
}

#[test]
fn projection_formula_proj_bundle_over_p2() {
    let p2 = Space::projective_space(2);
    let h = GradedPolynomial::variable(p2.table().clone(), 2, 0);
    let e = SheafClass::trivial(p2.table().clone(), 2, 2)
        .direct_sum(&SheafClass::line(h).unwrap());
    let pe = Space::proj_bundle(&p2, &e).unwrap();
    assert_eq!(pe.dim(), 4);
    let pi = StructuralMap::projection(&pe).unwrap();
    assert_projection_formula(&pi, "pi: P(O+O+O(1)) over P^2");
}

#[test]
fn projection_formula_blowup_maps() {
    for (label, emb) in [
        ("Bl_pt P^3", EmbeddingDatum::point_in_projective_space(3).unwrap()),
        ("Bl_line P^3", EmbeddingDatum::linear_in_projective_space(1, 3).unwrap()),
    ] {
        let x = emb.target().clone();
        let bl = Space::blowup(&x, &emb).unwrap();
        let pi = StructuralMap::projection(&bl).unwrap();
        let j = StructuralMap::exceptional_inclusion(&bl).unwrap();
        let p = StructuralMap::exceptional_projection(&bl).unwrap();
        let i = StructuralMap::center_inclusion(&bl).unwrap();
        assert_projection_formula(&pi, &format!("{label}: pi"));
        assert_projection_formula(&j, &format!("{label}: j"));
        assert_projection_formula(&p, &format!("{label}: p"));
        assert_projection_formula(&i, &format!("{label}: i"));
    }
}

#[test]
fn grading_of_structural_maps() {
    let emb = EmbeddingDatum::linear_in_projective_space(1, 3).unwrap();
    let bl = Space::blowup(&emb.target().clone(), &emb).unwrap();
    let i = StructuralMap::center_inclusion(&bl).unwrap();
    let r = emb.codim();
    for k in 0..=emb.center().bound() {
        for z in emb.center().basis(k) {
            let zc = ChowClass::from_basis_monomial(emb.center(), &z);
            let pushed = pushforward(&i, &zc).unwrap();
            assert!(pushed.value().is_homogeneous_of(k + r), "i_* must raise codim by {r}");
        }
    }
    for k in 0..=emb.target().bound() {
        for a in emb.target().basis(k) {
            let ac = ChowClass::from_basis_monomial(emb.target(), &a);
            let pulled = pullback(&i, &ac).unwrap();
            assert!(pulled.value().is_homogeneous_of(k), "i^* must preserve codim");
        }
    }
}

/// The free-module bijection of the projective bundle formula as integer
/// matrix invertibility: expanding zeta^i pi^* alpha over the tower basis in
/// each codimension gives a square matrix with determinant +-1 (here a
/// permutation, so the check also pins the basis enumeration).
#[test]
fn proj_bundle_basis_change_is_unimodular() {
    let p1 = Space::projective_space(1);
    let h = GradedPolynomial::variable(p1.table().clone(), 1, 0);
    let e = SheafClass::trivial(p1.table().clone(), 1, 2)
        .direct_sum(&SheafClass::line(h).unwrap());
    let pe = Space::proj_bundle(&p1, &e).unwrap();
    let pi = StructuralMap::projection(&pe).unwrap();
    let zeta = ChowClass::zeta(&pe).unwrap();
    let r = 3u32;
    for codim in 0..=pe.bound() {
        let tower_basis = pe.basis(codim);
        if tower_basis.is_empty() {
            continue;
        }
        let mut columns: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..r {
            if i > codim {
                continue;
            }
            for alpha in p1.basis(codim - i) {
                let a = ChowClass::from_basis_monomial(&p1, &alpha);
                let image = zeta.pow(i).mul(&pullback(&pi, &a).unwrap()).unwrap();
                columns.push(
                    tower_basis.iter().map(|m| image.value().coefficient(m)).collect(),
                );
            }
        }
        assert_eq!(columns.len(), tower_basis.len(), "square in codim {codim}");
        let rows: Vec<Vec<BigInt>> = (0..tower_basis.len())
            .map(|ridx| columns.iter().map(|c| c[ridx].clone()).collect())
            .collect();
        let m = chowcalc::linalg::IntMatrix::from_rows(rows);
        assert!(m.kernel_is_trivial(), "columns dependent in codim {codim}");
    }
}

#[test]
fn convolution_is_associative_on_basis_kernels() {
    // legs of ranks 2 and 3 over the point; all composable basis kernels
    let pt = Space::point();
    let f2 = SheafClass::trivial(pt.table().clone(), 0, 2);
    let f3 = SheafClass::trivial(pt.table().clone(), 0, 3);
    let products = [
        RelativeProduct::new(&pt, &[f2.clone(), f3.clone()], &["za", "zb"]).unwrap(),
        RelativeProduct::new(&pt, &[f3.clone(), f2.clone()], &["za", "zb"]).unwrap(),
        RelativeProduct::new(&pt, &[f2.clone(), f3.clone()], &["za", "zb"]).unwrap(),
    ];
    let kernels = |prod: &RelativeProduct| -> Vec<ChowClass> {
        (0..=prod.space().bound())
            .flat_map(|k| prod.space().basis(k))
            .map(|m| ChowClass::from_basis_monomial(prod.space(), &m))
            .collect()
    };
    for ka in kernels(&products[0]) {
        let ga = Correspondence::new(products[0].clone(), ka).unwrap();
        for kb in kernels(&products[1]) {
            let gb = Correspondence::new(products[1].clone(), kb).unwrap();
            let ab = convolve(&ga, &gb).unwrap();
            for kc in kernels(&products[2]) {
                let gc = Correspondence::new(products[2].clone(), kc).unwrap();
                let left = convolve(&ab, &gc).unwrap();
                let bc = convolve(&gb, &gc).unwrap();
                let right = convolve(&ga, &bc).unwrap();
                assert_eq!(
                    left.kernel().value(),
                    right.kernel().value(),
                    "associativity fails"
                );
            }
        }
    }
}

#[test]
fn diagonal_is_a_two_sided_convolution_unit() {
    let pt = Space::point();
    for n in 1..=3u32 {
        for m in 1..=3u32 {
            let fn_ = SheafClass::trivial(pt.table().clone(), 0, n + 1);
            let fm = SheafClass::trivial(pt.table().clone(), 0, m + 1);
            let prod = RelativeProduct::new(&pt, &[fn_.clone(), fm.clone()], &["za", "zb"]).unwrap();
            let diag_left = diagonal_correspondence(&pt, &fn_).unwrap();
            let diag_right = diagonal_correspondence(&pt, &fm).unwrap();
            for k in 0..=prod.space().bound() {
                for mono in prod.space().basis(k) {
                    let kern = ChowClass::from_basis_monomial(prod.space(), &mono);
                    let g = Correspondence::new(prod.clone(), kern.clone()).unwrap();
                    let left = convolve(&diag_left, &g).unwrap();
                    let right = convolve(&g, &diag_right).unwrap();
                    // compare coefficients against the original kernel
                    assert_eq!(
                        left.kernel().value().terms().count(),
                        kern.value().terms().count()
                    );
                    assert_eq!(
                        coeff_signature(left.kernel()),
                        coeff_signature(&kern),
                        "left unit fails at (n,m)=({n},{m})"
                    );
                    assert_eq!(
                        coeff_signature(right.kernel()),
                        coeff_signature(&kern),
                        "right unit fails at (n,m)=({n},{m})"
                    );
                }
            }
        }
    }
}

/// Exponent/coefficient multiset, independent of the variable naming.
fn coeff_signature(c: &ChowClass) -> Vec<(Vec<u32>, BigInt)> {
    let mut sig: Vec<(Vec<u32>, BigInt)> = c
        .value()
        .terms()
        .map(|(m, coeff)| {
            let exps: Vec<u32> = m.exps().iter().copied().filter(|&e| e > 0).collect();
            (exps, coeff.clone())
        })
        .collect();
    sig.sort();
    sig
}

#[test]
fn values_are_shareable_between_workers() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Arc<Space>>();
    assert_send_sync::<ChowClass>();
    assert_send_sync::<GradedPolynomial>();
    assert_send_sync::<SheafClass>();
    assert_send_sync::<EmbeddingDatum>();
}

#[test]
fn nontrivial_self_intersection_validates() {
    // a plane in P^4: c_2(N) = h_Z^2 does not vanish, so validation checks
    // the self-intersection formula with real content
    let emb = EmbeddingDatum::linear_in_projective_space(2, 4).unwrap();
    assert_eq!(emb.codim(), 2);
    let i_top = emb.normal().chern_component(2);
    assert!(!i_top.is_zero());
    let bl = Space::blowup(&emb.target().clone(), &emb).unwrap();
    assert_eq!(bl.basis_ranks_by_dim(), vec![1, 2, 2, 2, 1]);
}

#[test]
fn pullback_is_injective_on_the_base_basis() {
    let emb = EmbeddingDatum::point_in_projective_space(2).unwrap();
    let p2 = emb.target().clone();
    let bl = Space::blowup(&p2, &emb).unwrap();
    let pi = StructuralMap::projection(&bl).unwrap();
    for k in 0..=p2.bound() {
        for m in p2.basis(k) {
            let a = ChowClass::from_basis_monomial(&p2, &m);
            assert!(!pullback(&pi, &a).unwrap().is_zero(), "pi^* killed a basis class");
            // pi^* is a ring map on basis pairs
            for m2 in p2.basis(p2.bound() - k) {
                let b = ChowClass::from_basis_monomial(&p2, &m2);
                let lhs = pullback(&pi, &a.mul(&b).unwrap()).unwrap();
                let rhs = pullback(&pi, &a).unwrap().mul(&pullback(&pi, &b).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn twisted_normal_top_class_leading_term() {
    // c_(m+1)(F' tensor O_P(-1)) = (-1)^(m+1) zeta^(m+1) + lower order
    let m = 2u32;
    let s = Space::formal_base(5, &[("Fp", m + 1)]).unwrap();
    let fp = s.formal_bundle("Fp").unwrap();
    let p = RelativeProduct::new(&s, &[SheafClass::trivial(s.table().clone(), 5, 4)], &["zeta"])
        .unwrap();
    let zeta = p.zeta(0);
    let twisted = p.lift_sheaf(&fp).tensor_line(zeta.neg().value()).unwrap();
    let top = twisted.chern_component(m + 1);
    let lead = top.coefficient(&Monomial::from_exps(p.space().table(), {
        let mut v = vec![0u32; p.space().table().len()];
        v[p.space().zeta_var().unwrap()] = m + 1;
        v
    }));
    assert_eq!(lead, BigInt::from(if (m + 1).is_multiple_of(2) { 1 } else { -1 }));
}

#[test]
fn integration_matches_bezout_on_p2() {
    // deg(C_a . C_b) = a*b for curves of degree a, b
    let p2 = Space::projective_space(2);
    let h = ChowClass::new(p2.clone(), GradedPolynomial::variable(p2.table().clone(), 2, 0));
    for a in 1..=3i64 {
        for b in 1..=3i64 {
            let ca = h.scale(a);
            let cb = h.scale(b);
            assert_eq!(integrate(&ca.mul(&cb).unwrap()).unwrap(), BigInt::from(a * b));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blowup_ring_axioms_and_idempotence(
        ta in prop_terms(),
        tb in prop_terms(),
        tc in prop_terms(),
    ) {
        let emb = EmbeddingDatum::point_in_projective_space(2).unwrap();
        let bl = Space::blowup(&emb.target().clone(), &emb).unwrap();
        let of = |spec: &[(usize, i64)]| -> ChowClass {
            let table = bl.table().clone();
            let poly = GradedPolynomial::from_terms(
                table.clone(),
                bl.bound(),
                spec.iter().map(|&(idx, c)| {
                    // exponent patterns over the variables (h, e, zetaE)
                    let pats: [[u32; 3]; 6] = [
                        [0, 0, 0],
                        [1, 0, 0],
                        [2, 0, 0],
                        [0, 1, 0],
                        [0, 1, 1],
                        [1, 1, 0],
                    ];
                    let exps = pats[idx % pats.len()];
                    (Monomial::from_exps(&table, exps.to_vec()), Coeff::from(c))
                }),
            );
            ChowClass::new(bl.clone(), poly)
        };
        let a = of(&ta);
        let b = of(&tb);
        let c = of(&tc);
        // normalize is idempotent: re-wrapping a normal value changes nothing
        let renorm = ChowClass::new(bl.clone(), a.value().clone());
        prop_assert_eq!(&renorm, &a);
        // commutativity and associativity through the rewrite system
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        // distributivity
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
    }

    #[test]
    fn sheaf_calculus_random_roundtrips(c1 in -4i64..=4, c2 in -4i64..=4, l in -3i64..=3) {
        let s = Space::formal_base(4, &[("E", 2), ("L", 1)]).unwrap();
        let t = s.table().clone();
        let chern = GradedPolynomial::one(t.clone(), 4)
            .add(&GradedPolynomial::variable(t.clone(), 4, 0).scale(&Coeff::from(c1)))
            .add(&GradedPolynomial::variable(t.clone(), 4, 1).scale(&Coeff::from(c2)));
        let e = SheafClass::new(2, chern).unwrap();
        // dual is an involution
        prop_assert_eq!(e.dual().dual(), e.clone());
        // segre * chern = 1
        let one = GradedPolynomial::one(t.clone(), 4);
        prop_assert_eq!(e.segre().mul(e.chern()), one);
        // tensor_line round trip
        let lc = GradedPolynomial::variable(t.clone(), 4, 2).scale(&Coeff::from(l));
        let back = e.tensor_line(&lc).unwrap().tensor_line(&lc.neg()).unwrap();
        prop_assert_eq!(back, e);
    }
}

fn prop_terms() -> impl Strategy<Value = Vec<(usize, i64)>> {
    proptest::collection::vec((0usize..6, -3i64..=3), 0..5)
}
