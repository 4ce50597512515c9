//! Decomposition models: formal direct sums of twisted summands with named
//! map recipes, checked against reference spaces through exact rank
//! generating functions per dimension.

use crate::report::CheckOutcome;
use crate::spaces::Space;
use std::fmt::Write as _;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    ProjBundle,
    Cayley,
    Blowup,
    Flip,
    Projectivization,
}

/// Parameters for the decomposition models of the main statements.
pub enum ModelSpec {
    /// P(E) over X, rank r: summands (X, 0..r-1)
    ProjBundle { x: Arc<Space>, rank: u32 },
    /// H_s in P(E) with center Z, rank r: summands (X, 0..r-2), (Z, r-1)
    Cayley { x: Arc<Space>, z: Arc<Space>, rank: u32 },
    /// Bl_Z X of codim r: summands (X, 0), (Z, 1..r-1)
    Blowup { x: Arc<Space>, z: Arc<Space>, codim: u32 },
    /// standard flip of type (n, m): summands (X', 0), (S, m+1..n)
    Flip { xp: Arc<Space>, s: Arc<Space>, n: u32, m: u32 },
    /// projectivization of a rank-r sheaf: summands (X, 0..r-1), (P(K), r)
    Projectivization { x: Arc<Space>, pk: Arc<Space>, rank: u32 },
}

/// A formal direct sum of (space, Tate twist) summands with map recipes kept
/// by name so failed checks can print the recipe in question.
#[derive(Debug, Clone)]
pub struct DecompositionModel {
    pub kind: ModelKind,
    pub name: String,
    pub summands: Vec<(String, Arc<Space>, u32)>,
    /// (map name, composition recipe)
    pub maps: Vec<(String, String)>,
}

impl ModelSpec {
    pub fn build(self) -> DecompositionModel {
        match self {
            ModelSpec::ProjBundle { x, rank } => {
                let mut summands = Vec::new();
                let mut maps = Vec::new();
                for i in 0..rank {
                    summands.push((format!("X({i})"), x.clone(), i));
                    maps.push((format!("forward[{i}]"), format!("zeta^{i} . pi^*")));
                    maps.push((format!("project[{i}]"), format!("pi_{i}*")));
                }
                DecompositionModel {
                    kind: ModelKind::ProjBundle,
                    name: format!("proj_bundle(r={rank})"),
                    summands,
                    maps,
                }
            }
            ModelSpec::Cayley { x, z, rank } => {
                let mut summands = Vec::new();
                let mut maps = Vec::new();
                for i in 0..rank.saturating_sub(1) {
                    summands.push((format!("X({i})"), x.clone(), i));
                    maps.push((format!("forward[{i}]"), format!("zeta^{i} . pi^*")));
                    maps.push((format!("project[{i}]"), format!("pi_{i}* = q_(i+1)* . iota_*")));
                }
                summands.push((format!("Z({})", rank - 1), z, rank - 1));
                maps.push(("forward[Z]".into(), "j_* . p^*".into()));
                maps.push(("project[Z]".into(), format!("(-1)^{} p_* . j^*", rank - 1)));
                DecompositionModel {
                    kind: ModelKind::Cayley,
                    name: format!("cayley(r={rank})"),
                    summands,
                    maps,
                }
            }
            ModelSpec::Blowup { x, z, codim } => {
                let mut summands = vec![("X(0)".to_string(), x, 0)];
                let mut maps = vec![("forward[X]".to_string(), "pi^*".to_string())];
                for i in 1..codim {
                    summands.push((format!("Z({i})"), z.clone(), i));
                    maps.push((
                        format!("forward[Z,{i}]"),
                        format!("j_*(zeta_E^{} . p^*)", i - 1),
                    ));
                }
                DecompositionModel {
                    kind: ModelKind::Blowup,
                    name: format!("blowup(r={codim})"),
                    summands,
                    maps,
                }
            }
            ModelSpec::Flip { xp, s, n, m } => {
                let mut summands = vec![("X'(0)".to_string(), xp, 0)];
                let mut maps = vec![
                    ("forward[X']".to_string(), "Gamma^* = pi_* . pi'^*".to_string()),
                    ("project[X']".to_string(), "Gamma_*".to_string()),
                ];
                for i in (m + 1)..=n {
                    summands.push((format!("S({i})"), s.clone(), i));
                    maps.push((
                        format!("forward[S,{i}]"),
                        format!("i_*(zeta^{} . Phi^* -)", i - m - 1),
                    ));
                }
                DecompositionModel {
                    kind: ModelKind::Flip,
                    name: format!("flip(n={n}, m={m})"),
                    summands,
                    maps,
                }
            }
            ModelSpec::Projectivization { x, pk, rank } => {
                let mut summands = Vec::new();
                let mut maps = Vec::new();
                for i in 0..rank {
                    summands.push((format!("X({i})"), x.clone(), i));
                    maps.push((format!("forward[{i}]"), format!("zeta^{i} . pi^*")));
                    maps.push((format!("project[{i}]"), format!("pi_{i}*")));
                }
                summands.push((format!("PK({rank})"), pk, rank));
                maps.push(("forward[PK]".into(), "Gamma^* = r_+* . r_-^*".into()));
                maps.push(("project[PK]".into(), format!("(-1)^{rank} Gamma_*")));
                DecompositionModel {
                    kind: ModelKind::Projectivization,
                    name: format!("projectivization(r={rank})"),
                    summands,
                    maps,
                }
            }
        }
    }
}

pub fn build_decomposition_model(spec: ModelSpec) -> DecompositionModel {
    spec.build()
}

impl DecompositionModel {
    /// Rank generating function per dimension: sum over summands of
    /// t^twist * (rank polynomial of the summand).
    pub fn rank_polynomial(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for (_, space, twist) in &self.summands {
            let ranks = space.basis_ranks_by_dim();
            for (d, r) in ranks.iter().enumerate() {
                let slot = d + *twist as usize;
                if out.len() <= slot {
                    out.resize(slot + 1, 0);
                }
                out[slot] += r;
            }
        }
        out
    }
}

pub fn polynomial_string(ranks: &[usize]) -> String {
    let mut s = String::new();
    let mut first = true;
    for (d, r) in ranks.iter().enumerate() {
        if *r == 0 {
            continue;
        }
        if !first {
            s.push_str(" + ");
        }
        first = false;
        match (d, r) {
            (0, r) => {
                let _ = write!(s, "{r}");
            }
            (1, 1) => s.push('t'),
            (1, r) => {
                let _ = write!(s, "{r}*t");
            }
            (d, 1) => {
                let _ = write!(s, "t^{d}");
            }
            (d, r) => {
                let _ = write!(s, "{r}*t^{d}");
            }
        }
    }
    if first {
        s.push('0');
    }
    s
}

/// Exact comparison of the model's rank generating function with that of a
/// reference space, dimension by dimension.
pub fn rank_generating_check(model: &DecompositionModel, reference: &Arc<Space>) -> CheckOutcome {
    let mut got = model.rank_polynomial();
    let mut want = reference.basis_ranks_by_dim();
    while got.last() == Some(&0) {
        got.pop();
    }
    while want.last() == Some(&0) {
        want.pop();
    }
    let name = format!(
        "rank_generating({}): {}",
        model.name,
        polynomial_string(&want)
    );
    if got == want {
        CheckOutcome::pass(name)
    } else {
        let dim = got
            .iter()
            .zip(want.iter())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| got.len().min(want.len()));
        CheckOutcome::fail(
            name,
            format!(
                "first differing dimension {dim}: model {} vs reference {}",
                polynomial_string(&got),
                polynomial_string(&want)
            ),
        )
    }
}
