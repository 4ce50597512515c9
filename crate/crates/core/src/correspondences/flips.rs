//! Standard and virtual flips: the excess-bundle kernels, the convolution
//! identity with the diagonal, and the structure of the induced maps.
//!
//! For a type (n, m) flip over S, P = P_sub(F) and P' = P_sub(F') with F, F'
//! of ranks n+1 and m+1. The kernels are top Chern classes of the excess
//! bundles V = O_P(-1) box T_(P'/S)(-1) and V' = T_(P/S)(-1) box O_(P')(-1).

use super::{convolve, diagonal_kernel, Correspondence, RelativeProduct};
use crate::linalg::IntMatrix;
use crate::polyring::{Coeff, GradedPolynomial, Monomial};
use crate::report::CheckOutcome;
use crate::sheaves::SheafClass;
use crate::spaces::{ChowClass, Space, SpaceError};
use num_bigint::BigInt;
use num_traits::Zero;
use std::sync::Arc;

/// The spaces and kernels of a standard flip of type (n, m) over a base.
pub struct FlipSetup {
    pub base: Arc<Space>,
    pub n: u32,
    pub m: u32,
    /// P as a one-factor product (bundle F^v)
    pub p: RelativeProduct,
    /// P' as a one-factor product (bundle F'^v)
    pub pp: RelativeProduct,
    /// Phi_* correspondence: kernel c_m(V) on P x_S P'
    pub phi_push: Correspondence,
    /// Phi^* correspondence: kernel c_n(V') on P' x_S P
    pub phi_pull: Correspondence,
}

impl FlipSetup {
    /// Builds the flip data over a formal base of weight bound `d` with
    /// generic bundles F (rank n+1) and F' (rank m+1).
    pub fn formal(n: u32, m: u32, d: u32) -> Result<FlipSetup, SpaceError> {
        let s = Space::formal_base(d, &[("F", n + 1), ("Fp", m + 1)])?;
        let f = s.formal_bundle("F").expect("declared");
        let fp = s.formal_bundle("Fp").expect("declared");
        FlipSetup::new(&s, &f, &fp)
    }

    /// Builds the flip data for arbitrary bundles F (rank n+1), F' (rank m+1)
    /// over a common base.
    pub fn new(base: &Arc<Space>, f: &SheafClass, fp: &SheafClass) -> Result<FlipSetup, SpaceError> {
        let n = f.rank() - 1;
        let m = fp.rank() - 1;
        let fv = f.dual();
        let fpv = fp.dual();
        let p = RelativeProduct::new(base, std::slice::from_ref(&fv), &["zP"])?;
        let pp = RelativeProduct::new(base, std::slice::from_ref(&fpv), &["zQ"])?;

        // c_m(V) on P x P': V = O_P(-1) box T_(P'/S)(-1)
        let p_x_pp = RelativeProduct::new(base, &[fv.clone(), fpv.clone()], &["zP", "zQ"])?;
        let t_pp = p_x_pp.omega_twist(1)?.dual();
        let v = t_pp.tensor_line(p_x_pp.zeta(0).neg().value())?;
        let phi_push = Correspondence::new(
            p_x_pp.clone(),
            ChowClass::new(p_x_pp.space().clone(), v.chern_component(m)),
        )?;

        // c_n(V') on P' x P: V' = T_(P/S)(-1) box O_(P')(-1)
        let pp_x_p = RelativeProduct::new(base, &[fpv, fv], &["zQ", "zP"])?;
        let t_p = pp_x_p.omega_twist(1)?.dual();
        let vp = t_p.tensor_line(pp_x_p.zeta(0).neg().value())?;
        let phi_pull = Correspondence::new(
            pp_x_p.clone(),
            ChowClass::new(pp_x_p.space().clone(), vp.chern_component(n)),
        )?;

        Ok(FlipSetup { base: base.clone(), n, m, p, pp, phi_push, phi_pull })
    }

    /// Phi_*(gamma) for a class on P.
    pub fn push(&self, gamma: &ChowClass) -> Result<ChowClass, SpaceError> {
        self.phi_push.apply(gamma)
    }

    /// Phi^*(gamma') for a class on P'.
    pub fn pull(&self, gamma: &ChowClass) -> Result<ChowClass, SpaceError> {
        self.phi_pull.apply(gamma)
    }
}

/// Convolution identity of the flip: c_m(V) * c_n(V') = [Delta_(P')],
/// checked as an exact kernel equality over a formal base.
pub fn flip_convolution(n: u32, m: u32, d: u32) -> Result<Vec<CheckOutcome>, SpaceError> {
    let name = format!("flip_convolution(n={n}, m={m}, d={d})");
    let setup = FlipSetup::formal(n, m, d)?;
    let conv = convolve(&setup.phi_pull, &setup.phi_push)?;
    let delta = diagonal_kernel(conv.product())?;
    let mut out = Vec::new();
    if conv.kernel() == &delta {
        out.push(CheckOutcome::pass(name));
    } else {
        let diff = conv.kernel().sub(&delta)?;
        let witness = first_term_witness(&diff);
        out.push(CheckOutcome::fail(name, witness));
    }
    Ok(out)
}

/// Matrix structure of Phi_* on the zeta-basis: zero on columns
/// 0..n-m-1 and (-1)^(m-i) zeta'^i plus lower-order terms on column n-m+i,
/// with the degree-zero integer matrix unimodular diagonal. Also checks the
/// CH(S)-module property on basis pairs.
pub fn flip_structure(n: u32, m: u32, d: u32) -> Result<Vec<CheckOutcome>, SpaceError> {
    let setup = FlipSetup::formal(n, m, d)?;
    let p_leg = setup.phi_push.product().sub_product(&[0])?;
    let pp_space = {
        let conv_target = setup.phi_push.product().sub_product(&[1])?;
        conv_target
    };
    let zeta = p_leg.zeta(0);
    let zeta_p_var = pp_space.space().zeta_var()?;
    let mut out = Vec::new();

    // vanishing columns
    let mut witness = None;
    for k in 0..n.saturating_sub(m) {
        let img = setup.push(&zeta.pow(k))?;
        if !img.is_zero() {
            witness = Some(format!("Phi_*(zeta^{k}) = {img}, expected 0"));
            break;
        }
    }
    out.push(match witness {
        None => CheckOutcome::pass(format!("flip_structure(n={n}, m={m}): Phi_* kills zeta^0..zeta^{}", n.saturating_sub(m).saturating_sub(1))),
        Some(w) => CheckOutcome::fail(format!("flip_structure(n={n}, m={m}): vanishing columns"), w),
    });

    // leading terms and triangular structure
    let mut lead_ok = true;
    let mut lead_witness = None;
    let mut int_matrix = vec![vec![BigInt::zero(); (m + 1) as usize]; (m + 1) as usize];
    for i in 0..=m {
        let img = setup.push(&zeta.pow(n - m + i))?;
        let sign = if (m - i).is_multiple_of(2) { 1i64 } else { -1i64 };
        // record degree-zero coefficients of zeta'^j
        for j in 0..=m {
            let mut exps = vec![0u32; pp_space.space().table().len()];
            exps[zeta_p_var] = j;
            let mono = Monomial::from_exps(pp_space.space().table(), exps);
            int_matrix[j as usize][i as usize] = img.value().coefficient(&mono);
        }
        let expect = pp_space.zeta(0).pow(i).scale(sign);
        let diff = img.sub(&expect)?;
        // remaining terms must be lower order in zeta'
        if diff.value().terms().any(|(t, _)| t.exp(zeta_p_var) >= i) {
            lead_ok = false;
            lead_witness = Some(format!(
                "Phi_*(zeta^{}) - ({sign})*zeta'^{i} has a term of zeta'-degree >= {i}: {}",
                n - m + i,
                diff
            ));
            break;
        }
    }
    if lead_ok {
        // degree-zero matrix must be diagonal with entries (-1)^(m-i)
        for i in 0..=m as usize {
            for j in 0..=m as usize {
                let want = if i == j {
                    BigInt::from(if (m as usize - i).is_multiple_of(2) { 1 } else { -1 })
                } else {
                    BigInt::zero()
                };
                if int_matrix[j][i] != want {
                    lead_ok = false;
                    lead_witness = Some(format!(
                        "integer matrix entry ({j},{i}) = {}, want {want}",
                        int_matrix[j][i]
                    ));
                }
            }
        }
    }
    if lead_ok {
        let rows: Vec<Vec<BigInt>> = int_matrix.to_vec();
        let rank = IntMatrix::from_rows(rows).rank();
        if rank != (m + 1) as usize {
            lead_ok = false;
            lead_witness = Some(format!("integer matrix rank {rank} < {}", m + 1));
        }
    }
    out.push(if lead_ok {
        CheckOutcome::pass(format!(
            "flip_structure(n={n}, m={m}): unimodular triangular block with signs (-1)^(m-i)"
        ))
    } else {
        CheckOutcome::fail(
            format!("flip_structure(n={n}, m={m}): triangular block"),
            lead_witness.unwrap(),
        )
    });

    // CH(S)-module property on basis pairs within the truncation guard
    let mut module_ok = true;
    let mut module_witness = None;
    'outer: for i in 0..=m {
        let col = n - m + i;
        for w in 0..=d.saturating_sub(n.max(col + m)) {
            for theta in setup.base.basis(w) {
                let theta_p = GradedPolynomial::from_terms(
                    setup.base.table().clone(),
                    setup.base.bound(),
                    [(theta.clone(), Coeff::from(1))],
                );
                let up = p_leg.pull_base(&theta_p);
                let lhs = setup.push(&zeta.pow(col).mul(&up)?)?;
                let rhs = pp_space
                    .pull_base(&theta_p)
                    .mul(&setup.push(&zeta.pow(col))?)?;
                if lhs != rhs {
                    module_ok = false;
                    module_witness = Some(format!(
                        "Phi_*(psi^*theta . zeta^{col}) != psi'^*theta . Phi_*(zeta^{col}) at theta = {}",
                        theta_p
                    ));
                    break 'outer;
                }
            }
        }
    }
    out.push(if module_ok {
        CheckOutcome::pass(format!("flip_structure(n={n}, m={m}): CH(S)-module map"))
    } else {
        CheckOutcome::fail(
            format!("flip_structure(n={n}, m={m}): CH(S)-module map"),
            module_witness.unwrap(),
        )
    });
    Ok(out)
}

/// Joint-kernel vanishing: a symbolic gamma = sum zeta^i psi^* theta_i with
/// Phi_*(gamma) = 0 and c_(m+1)(F' tensor O_P(-1)) . gamma = 0 must vanish.
/// Checked by exact integer linear algebra, one codimension at a time.
pub fn flip_vanishing(n: u32, m: u32, d: u32) -> Result<Vec<CheckOutcome>, SpaceError> {
    let setup = FlipSetup::formal(n, m, d)?;
    let s = &setup.base;
    let p_leg = setup.phi_push.product().sub_product(&[0])?;
    let p_space = p_leg.space().clone();
    let pp_leg = setup.phi_push.product().sub_product(&[1])?;
    let zeta = p_leg.zeta(0);

    // c_(m+1) of N_(P/X) = F' tensor O_P(-1)
    let fp = s.formal_bundle("Fp").expect("declared");
    let fp_on_p = p_leg.lift_sheaf(&fp);
    let normal_top = ChowClass::new(
        p_space.clone(),
        fp_on_p
            .tensor_line(zeta.neg().value())?
            .chern_component(m + 1),
    );

    let mut out = Vec::new();
    let max_codim = d.saturating_sub(m + 1);
    for codim in 0..=max_codim {
        // unknowns: coordinates of theta_i in CH^(codim - i)(S)
        let mut columns: Vec<ChowClass> = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        for i in 0..=n.min(codim) {
            for theta in s.basis(codim - i) {
                let theta_p = GradedPolynomial::from_terms(
                    s.table().clone(),
                    s.bound(),
                    [(theta, Coeff::from(1))],
                );
                let unit = zeta.pow(i).mul(&p_leg.pull_base(&theta_p))?;
                labels.push(format!("zeta^{i} * {theta_p}"));
                columns.push(unit);
            }
        }
        if columns.is_empty() {
            continue;
        }
        // rows: coordinates of Phi_*(unit) on P' and of normal_top * unit on P
        let phi_rows: Vec<Monomial> = if codim + m >= n {
            basis_of_product(&pp_leg, codim + m - n)
        } else {
            Vec::new()
        };
        let mul_rows: Vec<Monomial> = basis_of_product(&p_leg, codim + m + 1);
        let mut matrix = IntMatrix::zero(phi_rows.len() + mul_rows.len(), columns.len());
        for (cidx, unit) in columns.iter().enumerate() {
            let phi_img = setup.push(unit)?;
            for (ridx, row) in phi_rows.iter().enumerate() {
                matrix.set(ridx, cidx, phi_img.value().coefficient(row));
            }
            let mul_img = normal_top.mul(unit)?;
            for (ridx, row) in mul_rows.iter().enumerate() {
                matrix.set(phi_rows.len() + ridx, cidx, mul_img.value().coefficient(row));
            }
        }
        let name =
            format!("flip_vanishing(n={n}, m={m}, d={d}): codim {codim}, {} unknowns", columns.len());
        if matrix.kernel_is_trivial() {
            out.push(CheckOutcome::pass(name));
        } else {
            out.push(CheckOutcome::fail(
                name,
                format!("joint kernel is nontrivial on {} unknowns ({} rows)", columns.len(), matrix.rows),
            ));
        }
    }
    Ok(out)
}

/// Virtual flip: over a formal base Z with G of rank r+i+1 and K of rank i+1,
/// the convolution of the stratum kernels equals (-1)^r times the diagonal.
pub fn virtual_flip(r: u32, i: u32, d: u32) -> Result<Vec<CheckOutcome>, SpaceError> {
    let n = r + i;
    let m = i;
    let z = Space::formal_base(d, &[("G", r + i + 1), ("K", i + 1)])?;
    let g = z.formal_bundle("G").expect("declared");
    let k = z.formal_bundle("K").expect("declared");

    // Psi_*: kernel c_n(W') on P(G) x P(K), W' = Omega_(P(G))(1) box O_(P(K))(1)
    let gk = RelativeProduct::new(&z, &[g.clone(), k.clone()], &["zg", "zk"])?;
    let wp = gk.omega_twist(0)?.tensor_line(gk.zeta(1).value())?;
    let psi_push = Correspondence::new(
        gk.clone(),
        ChowClass::new(gk.space().clone(), wp.chern_component(n)),
    )?;

    // Psi^*: kernel c_m(V') on P(K) x P(G), V' = O_(P(G))(1) box Omega_(P(K))(1)
    let kg = RelativeProduct::new(&z, &[k, g], &["zk", "zg"])?;
    let vp = kg.omega_twist(0)?.tensor_line(kg.zeta(1).value())?;
    let psi_pull = Correspondence::new(
        kg.clone(),
        ChowClass::new(kg.space().clone(), vp.chern_component(m)),
    )?;

    let conv = convolve(&psi_pull, &psi_push)?;
    let sign = if r.is_multiple_of(2) { 1i64 } else { -1i64 };
    let delta = diagonal_kernel(conv.product())?.scale(sign);
    let name = format!("virtual_flip(r={r}, i={i}): Psi_* Psi^* = ({sign})*[Delta]");
    let outcome = if conv.kernel() == &delta {
        CheckOutcome::pass(name).with_sign(sign)
    } else {
        let diff = conv.kernel().sub(&delta)?;
        CheckOutcome::fail(name, first_term_witness(&diff)).with_sign(sign)
    };
    Ok(vec![outcome])
}

fn basis_of_product(prod: &RelativeProduct, codim: u32) -> Vec<Monomial> {
    if codim > prod.space().bound() {
        return Vec::new();
    }
    prod.space().basis(codim)
}

fn first_term_witness(diff: &ChowClass) -> String {
    match diff.value().terms().next() {
        Some((m, c)) => format!(
            "first differing coefficient at {}: off by {}",
            crate::polyring::monomial_string(diff.space().table(), m),
            c
        ),
        None => "no difference".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_flop_convolution_matches_hand_expansion() {
        // (n, m) = (1, 1) over the point: kernels (zeta - zeta'_1)(zeta'_2 - zeta)
        // push to zeta'_1 + zeta'_2, the diagonal of P^1 x P^1.
        let pt = Space::point();
        let f = SheafClass::trivial(pt.table().clone(), 0, 2);
        let setup = FlipSetup::new(&pt, &f, &f).unwrap();
        let conv = convolve(&setup.phi_pull, &setup.phi_push).unwrap();
        let delta = diagonal_kernel(conv.product()).unwrap();
        let z1 = conv.product().zeta(0);
        let z2 = conv.product().zeta(1);
        assert_eq!(delta, z1.add(&z2).unwrap());
        assert_eq!(conv.kernel(), &delta);
    }

    #[test]
    fn flip_phi_leading_terms_over_point() {
        // (n, m) = (1, 1), S = point: Phi_*(1) = -1 and Phi_*(zeta) = zeta'
        let pt = Space::point();
        let f = SheafClass::trivial(pt.table().clone(), 0, 2);
        let setup = FlipSetup::new(&pt, &f, &f).unwrap();
        let p_leg = setup.phi_push.product().sub_product(&[0]).unwrap();
        let zeta = p_leg.zeta(0);
        let one = ChowClass::one(p_leg.space().clone());
        let img0 = setup.push(&one).unwrap();
        assert_eq!(img0, ChowClass::one(img0.space().clone()).neg());
        let img1 = setup.push(&zeta).unwrap();
        assert_eq!(img1.basis_string(), "zQ");
    }

    #[test]
    fn small_formal_convolutions() {
        for (n, m) in [(1, 0), (1, 1), (2, 1)] {
            let out = flip_convolution(n, m, n + m + 2).unwrap();
            assert!(out.iter().all(|o| o.passed), "failed at (n,m)=({n},{m}): {out:?}");
        }
    }

    #[test]
    fn phi_composes_to_identity_on_basis() {
        // Phi_* Phi^* = Id on CH(P') for a small formal case
        let (n, m, d) = (2u32, 1u32, 5u32);
        let setup = FlipSetup::formal(n, m, d).unwrap();
        let pp_leg = setup.phi_pull.product().sub_product(&[0]).unwrap();
        let guard = d - n;
        for w in 0..=guard {
            for mono in pp_leg.space().basis(w) {
                let x = ChowClass::from_basis_monomial(pp_leg.space(), &mono);
                let roundtrip = setup.push(&setup.pull(&x).unwrap()).unwrap();
                assert_eq!(
                    roundtrip.basis_string(),
                    x.basis_string(),
                    "basis class {mono:?}"
                );
            }
        }
    }

    #[test]
    fn vanishing_kernel_small_cases() {
        let out = flip_vanishing(1, 0, 4).unwrap();
        assert!(out.iter().all(|o| o.passed), "{out:?}");
    }
}
