//! Statement execution: spaces, bundles and classes are bound in order;
//! print/assert_eq/verify produce report items. Runtime errors become items
//! with status error; caught panics are flagged as internal violations.

use crate::ast::*;
use crate::report::{Report, ReportItem, Status};
use chowcalc::polyring::GradedPolynomial;
use chowcalc::sheaves::SheafClass;
use chowcalc::spaces::{
    integrate, pullback, pushforward, ChowClass, EmbeddingDatum, LevelData, Space, StructuralMap,
};
use chowcalc::suites;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::Instant;

/// Default cap on formal-base dimension bounds, overridable by the
/// CHOWCALC_MAX_DIM environment variable.
pub const DEFAULT_MAX_DIM: u32 = 12;

pub fn max_dim_cap() -> u32 {
    std::env::var("CHOWCALC_MAX_DIM")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DIM)
}

#[derive(Debug, Clone)]
enum Value {
    Scalar(BigInt),
    Class(ChowClass),
}

#[derive(Debug, Clone)]
enum Binding {
    Space(Arc<Space>),
    Bundle { space: Arc<Space>, sheaf: SheafClass },
    ClassVal(Value),
}

#[derive(Debug)]
pub struct RunError(pub String);

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

type RunResult<T> = Result<T, RunError>;

fn engine<T, E: std::fmt::Display>(r: Result<T, E>) -> RunResult<T> {
    r.map_err(|e| RunError(e.to_string()))
}

struct Env {
    bindings: HashMap<String, Binding>,
    spaces_in_order: Vec<Arc<Space>>,
}

impl Env {
    fn space(&self, name: &str) -> RunResult<Arc<Space>> {
        match self.bindings.get(name) {
            Some(Binding::Space(s)) => Ok(s.clone()),
            _ => Err(RunError(format!("`{name}` is not a space"))),
        }
    }

    fn bundle(&self, name: &str) -> RunResult<(Arc<Space>, SheafClass)> {
        match self.bindings.get(name) {
            Some(Binding::Bundle { space, sheaf }) => Ok((space.clone(), sheaf.clone())),
            _ => Err(RunError(format!("`{name}` is not a bundle"))),
        }
    }

    fn class(&self, name: &str) -> RunResult<Value> {
        match self.bindings.get(name) {
            Some(Binding::ClassVal(v)) => Ok(v.clone()),
            _ => Err(RunError(format!("`{name}` is not a class"))),
        }
    }
}

/// Executes a parsed program. Definition failures stop execution (later
/// statements would dangle) but the report survives; assertion failures and
/// expression errors are recorded and execution continues.
pub fn run_program(program: &Program) -> Report {
    let mut report = Report::default();
    let mut env = Env { bindings: HashMap::new(), spaces_in_order: Vec::new() };
    for stmt in &program.statements {
        let start = Instant::now();
        let halt = catch_unwind(AssertUnwindSafe(|| exec_stmt(stmt, &mut env, &mut report)));
        match halt {
            Ok(Ok(())) => {}
            Ok(Err(fatal)) => {
                let mut item =
                    ReportItem::new(format!("definition:L{}", stmt.line), Status::Error);
                item.witness = Some(fatal.0);
                item.millis = start.elapsed().as_millis();
                report.items.push(item);
                break;
            }
            Err(panic) => {
                let text = panic
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| panic.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "panic".to_string());
                let mut item =
                    ReportItem::new(format!("internal:L{}", stmt.line), Status::Error);
                item.witness = Some(format!("internal invariant violation: {text}"));
                item.millis = start.elapsed().as_millis();
                report.items.push(item);
                break;
            }
        }
    }
    report
}

/// Outer Err halts the program (definition failure); expression-level errors
/// inside print/assert/verify are reported and do not halt.
fn exec_stmt(stmt: &Stmt, env: &mut Env, report: &mut Report) -> RunResult<()> {
    let start = Instant::now();
    match &stmt.kind {
        StmtKind::Space { name, expr } => {
            let space = eval_space(expr, env)?;
            env.spaces_in_order.push(space.clone());
            if let Ok(lvl) = space.blowup_level() {
                env.bindings.insert(
                    format!("{name}_E"),
                    Binding::Space(lvl.exceptional.clone()),
                );
                env.bindings
                    .insert(format!("{name}_Z"), Binding::Space(lvl.center().clone()));
            }
            env.bindings.insert(name.clone(), Binding::Space(space));
            Ok(())
        }
        StmtKind::Bundle { name, on, expr } => {
            let space = env.space(on)?;
            let sheaf = eval_bundle(name, expr, &space, env)?;
            env.bindings.insert(name.clone(), Binding::Bundle { space, sheaf });
            Ok(())
        }
        StmtKind::Class { name, expr } => {
            let value = eval_cexpr(expr, env)?;
            env.bindings.insert(name.clone(), Binding::ClassVal(value));
            Ok(())
        }
        StmtKind::Print(expr) => {
            let mut item = ReportItem::new(format!("print:L{}", stmt.line), Status::Pass);
            item.is_print = true;
            match eval_cexpr(expr, env) {
                Ok(Value::Scalar(n)) => item.witness = Some(n.to_string()),
                Ok(Value::Class(c)) => item.witness = Some(c.basis_string()),
                Err(e) => {
                    item.status = Status::Error;
                    item.is_print = false;
                    item.witness = Some(e.0);
                }
            }
            item.millis = start.elapsed().as_millis();
            report.items.push(item);
            Ok(())
        }
        StmtKind::AssertEq(a, b) => {
            let mut item = ReportItem::new(format!("assert_eq:L{}", stmt.line), Status::Pass);
            match assert_eq_values(a, b, env) {
                Ok(None) => {}
                Ok(Some(witness)) => {
                    item.status = Status::Fail;
                    item.witness = Some(witness);
                }
                Err(e) => {
                    item.status = Status::Error;
                    item.witness = Some(e.0);
                }
            }
            item.millis = start.elapsed().as_millis();
            report.items.push(item);
            Ok(())
        }
        StmtKind::Verify { suite, params } => {
            let params: suites::Params =
                params.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            if let Some(d) = params.get("d").and_then(|v| v.parse::<u32>().ok()) {
                if d > max_dim_cap() {
                    let mut item =
                        ReportItem::new(format!("verify:{suite}"), Status::Error);
                    item.witness = Some(format!(
                        "d = {d} exceeds CHOWCALC_MAX_DIM = {}",
                        max_dim_cap()
                    ));
                    report.items.push(item);
                    return Ok(());
                }
            }
            match suites::run_suite(suite, &params) {
                Ok(items) => {
                    for it in items {
                        report.items.push(ReportItem::from_outcome(it.outcome, it.millis));
                    }
                }
                Err(e) => {
                    let mut item = ReportItem::new(format!("verify:{suite}"), Status::Error);
                    item.witness = Some(e.to_string());
                    item.millis = start.elapsed().as_millis();
                    report.items.push(item);
                }
            }
            Ok(())
        }
    }
}

fn eval_space(expr: &SExpr, env: &Env) -> RunResult<Arc<Space>> {
    match expr {
        SExpr::Point => Ok(Space::point()),
        SExpr::Proj(n) => Ok(Space::projective_space(*n)),
        SExpr::ProjBundle { base, bundle } => {
            let b = env.space(base)?;
            let (bspace, sheaf) = env.bundle(bundle)?;
            if bspace != b {
                return Err(RunError(format!("bundle `{bundle}` does not live on `{base}`")));
            }
            engine(Space::proj_bundle(&b, &sheaf))
        }
        SExpr::Blowup { base, center } => {
            let b = env.space(base)?;
            let n = plain_projective_dim(&b).ok_or_else(|| {
                RunError("blowup centers are built in only for plain projective spaces".into())
            })?;
            let emb = match center {
                EmbSpec::Point => engine(EmbeddingDatum::point_in_projective_space(n))?,
                EmbSpec::Linear(k) => engine(EmbeddingDatum::linear_in_projective_space(*k, n))?,
            };
            engine(Space::blowup(&b, &emb))
        }
        SExpr::Total { base, bundle } => {
            let b = env.space(base)?;
            let (bspace, sheaf) = env.bundle(bundle)?;
            if bspace != b {
                return Err(RunError(format!("bundle `{bundle}` does not live on `{base}`")));
            }
            engine(Space::total_space(&b, &sheaf))
        }
        SExpr::Formal { dim, bundles } => {
            let cap = max_dim_cap();
            if *dim > cap {
                return Err(RunError(format!(
                    "formal dim = {dim} exceeds CHOWCALC_MAX_DIM = {cap}"
                )));
            }
            let specs: Vec<(&str, u32)> =
                bundles.iter().map(|(n, r)| (n.as_str(), *r)).collect();
            engine(Space::formal_base(*dim, &specs))
        }
    }
}

/// A plain P^n: a projective bundle of a trivial sheaf over the point.
fn plain_projective_dim(space: &Arc<Space>) -> Option<u32> {
    match space.level() {
        LevelData::ProjBundle { bundle, rank, .. } => {
            let parent = space.parent()?;
            let is_point = matches!(
                parent.level(),
                LevelData::Root(chowcalc::spaces::RootKind::Point)
            );
            if is_point && bundle.chern().num_terms() == 1 && *rank >= 1 {
                Some(rank - 1)
            } else {
                None
            }
        }
        _ => None,
    }
}

fn eval_bundle(
    name: &str,
    expr: &BExpr,
    space: &Arc<Space>,
    env: &Env,
) -> RunResult<SheafClass> {
    match expr {
        BExpr::Sum(factors) => {
            let mut acc = SheafClass::trivial(space.table().clone(), space.bound(), 0);
            for f in factors {
                let c1 = match eval_cexpr(f, env)? {
                    Value::Scalar(n) if n.is_zero() => {
                        GradedPolynomial::zero(space.table().clone(), space.bound())
                    }
                    Value::Scalar(n) => {
                        return Err(RunError(format!(
                            "line-bundle factor must have weight 1, found constant {n}"
                        )))
                    }
                    Value::Class(c) => {
                        if c.space() != space {
                            return Err(RunError(
                                "line-bundle factor lives on the wrong space".into(),
                            ));
                        }
                        c.value().clone()
                    }
                };
                let line = engine(SheafClass::line(c1))?;
                acc = acc.direct_sum(&line);
            }
            Ok(acc)
        }
        BExpr::Dual(b) => {
            let (bspace, sheaf) = env.bundle(b)?;
            check_host(&bspace, space, b)?;
            Ok(sheaf.dual())
        }
        BExpr::Quot(a, b) => {
            let (aspace, e) = env.bundle(a)?;
            let (bspace, f) = env.bundle(b)?;
            check_host(&aspace, space, a)?;
            check_host(&bspace, space, b)?;
            engine(e.quotient(&f))
        }
        BExpr::TensorLine(b, c) => {
            let (bspace, sheaf) = env.bundle(b)?;
            check_host(&bspace, space, b)?;
            let l = match eval_cexpr(c, env)? {
                Value::Class(c) if c.space() == space => c.value().clone(),
                Value::Scalar(n) if n.is_zero() => {
                    GradedPolynomial::zero(space.table().clone(), space.bound())
                }
                _ => return Err(RunError("tensorline twist must be a class on the host space".into())),
            };
            engine(sheaf.tensor_line(&l))
        }
        BExpr::Formal { rank } => match space.formal_bundle(name) {
            Some(sheaf) if sheaf.rank() == *rank => Ok(sheaf),
            Some(sheaf) => Err(RunError(format!(
                "formal bundle `{name}` was declared with rank {}, not {rank}",
                sheaf.rank()
            ))),
            None => Err(RunError(format!(
                "`{name}` is not a declared bundle of the formal base"
            ))),
        },
    }
}

fn check_host(got: &Arc<Space>, want: &Arc<Space>, name: &str) -> RunResult<()> {
    if got == want {
        Ok(())
    } else {
        Err(RunError(format!("bundle `{name}` does not live on the host space")))
    }
}

fn eval_cexpr(expr: &CExpr, env: &Env) -> RunResult<Value> {
    match expr {
        CExpr::Int(n) => Ok(Value::Scalar(BigInt::from(*n))),
        CExpr::Ident(name) => env.class(name),
        CExpr::Zeta(sp) => {
            let space = env.space(sp)?;
            engine(ChowClass::zeta(&space)).map(Value::Class)
        }
        CExpr::Chern(i, b) => {
            let (space, sheaf) = env.bundle(b)?;
            Ok(Value::Class(ChowClass::new(space, sheaf.chern_component(*i))))
        }
        CExpr::Segre(i, b) => {
            let (space, sheaf) = env.bundle(b)?;
            Ok(Value::Class(ChowClass::new(space, sheaf.segre_component(*i))))
        }
        CExpr::Pullback(from, to, e) => {
            let from = env.space(from)?;
            let to = env.space(to)?;
            let v = eval_cexpr(e, env)?;
            let class = as_class_on(v, &from)?;
            apply_pullback(&from, &to, &class, env).map(Value::Class)
        }
        CExpr::Pushforward(from, to, e) => {
            let from = env.space(from)?;
            let to = env.space(to)?;
            let v = eval_cexpr(e, env)?;
            let class = as_class_on(v, &from)?;
            apply_pushforward(&from, &to, &class, env).map(Value::Class)
        }
        CExpr::Integrate(e) => match eval_cexpr(e, env)? {
            Value::Class(c) => engine(integrate(&c)).map(Value::Scalar),
            Value::Scalar(_) => Err(RunError("integrate needs a class, found a scalar".into())),
        },
        CExpr::Neg(e) => match eval_cexpr(e, env)? {
            Value::Scalar(n) => Ok(Value::Scalar(-n)),
            Value::Class(c) => Ok(Value::Class(c.neg())),
        },
        CExpr::Add(a, b) => value_add(eval_cexpr(a, env)?, eval_cexpr(b, env)?, false),
        CExpr::Sub(a, b) => value_add(eval_cexpr(a, env)?, eval_cexpr(b, env)?, true),
        CExpr::Mul(a, b) => value_mul(eval_cexpr(a, env)?, eval_cexpr(b, env)?),
        CExpr::Pow(a, k) => match eval_cexpr(a, env)? {
            Value::Scalar(n) => Ok(Value::Scalar(n.pow(*k))),
            Value::Class(c) => Ok(Value::Class(c.pow(*k))),
        },
    }
}

fn as_class_on(v: Value, space: &Arc<Space>) -> RunResult<ChowClass> {
    match v {
        Value::Class(c) => {
            if c.space() == space {
                Ok(c)
            } else {
                Err(RunError("class lives on a different space than stated".into()))
            }
        }
        Value::Scalar(n) => Ok(ChowClass::constant(space.clone(), n)),
    }
}

fn value_add(a: Value, b: Value, subtract: bool) -> RunResult<Value> {
    let flip = |v: Value| -> Value {
        if !subtract {
            return v;
        }
        match v {
            Value::Scalar(n) => Value::Scalar(-n),
            Value::Class(c) => Value::Class(c.neg()),
        }
    };
    match (a, flip(b)) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
        (Value::Class(x), Value::Class(y)) => engine(x.add(&y)).map(Value::Class),
        (Value::Scalar(x), Value::Class(y)) => {
            let c = ChowClass::constant(y.space().clone(), x);
            engine(c.add(&y)).map(Value::Class)
        }
        (Value::Class(x), Value::Scalar(y)) => {
            let c = ChowClass::constant(x.space().clone(), y);
            engine(x.add(&c)).map(Value::Class)
        }
    }
}

fn value_mul(a: Value, b: Value) -> RunResult<Value> {
    match (a, b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x * y)),
        (Value::Scalar(x), Value::Class(y)) => Ok(Value::Class(y.scale(x))),
        (Value::Class(x), Value::Scalar(y)) => Ok(Value::Class(x.scale(y))),
        (Value::Class(x), Value::Class(y)) => engine(x.mul(&y)).map(Value::Class),
    }
}

/// Resolves pullback along the structural relationship between two bound
/// spaces: a tower projection chain, the exceptional inclusion, or a center
/// inclusion of a defined blowup.
fn apply_pullback(
    from: &Arc<Space>,
    to: &Arc<Space>,
    class: &ChowClass,
    env: &Env,
) -> RunResult<ChowClass> {
    // composite flat pullback along a projection chain
    if is_ancestor(from, to) {
        let id: Vec<usize> = (0..from.table().len()).collect();
        let value = class.value().remap(to.table().clone(), to.bound(), &id);
        return Ok(ChowClass::new(to.clone(), value));
    }
    // j^*: from a blowup to its exceptional divisor
    if let Ok(lvl) = from.blowup_level() {
        if &lvl.exceptional == to {
            let j = engine(StructuralMap::exceptional_inclusion(from))?;
            return engine(pullback(&j, class));
        }
    }
    // i^*: from a blowup's base to its center
    for bl in &env.spaces_in_order {
        if let Ok(lvl) = bl.blowup_level() {
            if bl.parent() == Some(from) && lvl.center() == to {
                let i = engine(StructuralMap::center_inclusion(bl))?;
                return engine(pullback(&i, class));
            }
        }
    }
    Err(RunError("no structural map supports this pullback".into()))
}

fn apply_pushforward(
    from: &Arc<Space>,
    to: &Arc<Space>,
    class: &ChowClass,
    env: &Env,
) -> RunResult<ChowClass> {
    // iterated proper pushforward along the projection chain
    if is_ancestor(to, from) {
        let mut current = class.clone();
        let mut space = from.clone();
        while &space != to {
            let pi = engine(StructuralMap::projection(&space))?;
            current = engine(pushforward(&pi, &current))?;
            space = pi.target.clone();
        }
        return Ok(current);
    }
    // j_*: from the exceptional divisor into its blowup
    if let Ok(lvl) = to.blowup_level() {
        if &lvl.exceptional == from {
            let j = engine(StructuralMap::exceptional_inclusion(to))?;
            return engine(pushforward(&j, class));
        }
    }
    // i_*: from a center into the blown-up base
    for bl in &env.spaces_in_order {
        if let Ok(lvl) = bl.blowup_level() {
            if bl.parent() == Some(to) && lvl.center() == from {
                let i = engine(StructuralMap::center_inclusion(bl))?;
                return engine(pushforward(&i, class));
            }
        }
    }
    Err(RunError("no structural map supports this pushforward".into()))
}

fn is_ancestor(candidate: &Arc<Space>, of: &Arc<Space>) -> bool {
    let mut walk = Some(of.clone());
    while let Some(s) = walk {
        if &s == candidate {
            return true;
        }
        walk = s.parent().cloned();
    }
    false
}

fn assert_eq_values(a: &CExpr, b: &CExpr, env: &Env) -> RunResult<Option<String>> {
    let va = eval_cexpr(a, env)?;
    let vb = eval_cexpr(b, env)?;
    match (va, vb) {
        (Value::Scalar(x), Value::Scalar(y)) => {
            if x == y {
                Ok(None)
            } else {
                Ok(Some(format!("left = {x}, right = {y}")))
            }
        }
        (Value::Class(x), Value::Class(y)) => {
            if x.space() != y.space() {
                return Err(RunError("assert_eq classes live on different spaces".into()));
            }
            Ok(class_witness(&x, &y))
        }
        (Value::Scalar(x), Value::Class(y)) => {
            let xc = ChowClass::constant(y.space().clone(), x);
            Ok(class_witness(&xc, &y))
        }
        (Value::Class(x), Value::Scalar(y)) => {
            let yc = ChowClass::constant(x.space().clone(), y);
            Ok(class_witness(&x, &yc))
        }
    }
}

/// First differing basis coefficient of two normal-form classes.
fn class_witness(x: &ChowClass, y: &ChowClass) -> Option<String> {
    if x == y {
        return None;
    }
    let space = x.space();
    for k in 0..=space.bound() {
        for m in space.basis(k) {
            let cx = x.value().coefficient(&m);
            let cy = y.value().coefficient(&m);
            if cx != cy {
                return Some(format!(
                    "coefficient of {}: left = {cx}, right = {cy}",
                    chowcalc::polyring::monomial_string(space.table(), &m)
                ));
            }
        }
    }
    Some("classes differ outside the canonical basis".to_string())
}
