//! Abstract syntax of .chow programs and the canonical printer.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub line: usize,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Space { name: String, expr: SExpr },
    Bundle { name: String, on: String, expr: BExpr },
    Class { name: String, expr: CExpr },
    Print(CExpr),
    AssertEq(CExpr, CExpr),
    Verify { suite: String, params: Vec<(String, String)> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Point,
    Proj(u32),
    ProjBundle { base: String, bundle: String },
    Blowup { base: String, center: EmbSpec },
    Total { base: String, bundle: String },
    Formal { dim: u32, bundles: Vec<(String, u32)> },
}

/// Built-in cellular centers for blowups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbSpec {
    Point,
    Linear(u32),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BExpr {
    Sum(Vec<CExpr>),
    Dual(String),
    Quot(String, String),
    TensorLine(String, CExpr),
    Formal { rank: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CExpr {
    Int(i64),
    Ident(String),
    Zeta(String),
    Chern(u32, String),
    Segre(u32, String),
    Pullback(String, String, Box<CExpr>),
    Pushforward(String, String, Box<CExpr>),
    Integrate(Box<CExpr>),
    Neg(Box<CExpr>),
    Add(Box<CExpr>, Box<CExpr>),
    Sub(Box<CExpr>, Box<CExpr>),
    Mul(Box<CExpr>, Box<CExpr>),
    Pow(Box<CExpr>, u32),
}

impl CExpr {
    fn is_sum(&self) -> bool {
        matches!(self, CExpr::Add(..) | CExpr::Sub(..))
    }

    fn is_atom(&self) -> bool {
        !matches!(
            self,
            CExpr::Add(..) | CExpr::Sub(..) | CExpr::Mul(..) | CExpr::Pow(..)
        )
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_sum() {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for CExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CExpr::Int(n) => write!(f, "{n}"),
            CExpr::Ident(s) => write!(f, "{s}"),
            CExpr::Zeta(s) => write!(f, "zeta({s})"),
            CExpr::Chern(i, b) => write!(f, "chern({i}, {b})"),
            CExpr::Segre(i, b) => write!(f, "segre({i}, {b})"),
            CExpr::Pullback(a, b, e) => write!(f, "pullback({a} -> {b}, {e})"),
            CExpr::Pushforward(a, b, e) => write!(f, "pushforward({a} -> {b}, {e})"),
            CExpr::Integrate(e) => write!(f, "integrate({e})"),
            CExpr::Neg(e) => {
                if e.is_atom() {
                    write!(f, "-{e}")
                } else {
                    write!(f, "-({e})")
                }
            }
            CExpr::Add(a, b) => {
                write!(f, "{a} + ")?;
                b.fmt_factor(f)
            }
            CExpr::Sub(a, b) => {
                write!(f, "{a} - ")?;
                b.fmt_factor(f)
            }
            CExpr::Mul(a, b) => {
                a.fmt_factor(f)?;
                write!(f, " * ")?;
                b.fmt_factor(f)
            }
            CExpr::Pow(a, k) => {
                if a.is_atom() {
                    write!(f, "{a}^{k}")
                } else {
                    write!(f, "({a})^{k}")
                }
            }
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Point => write!(f, "point"),
            SExpr::Proj(n) => write!(f, "proj {n}"),
            SExpr::ProjBundle { base, bundle } => write!(f, "projbundle({base}, {bundle})"),
            SExpr::Blowup { base, center: EmbSpec::Point } => write!(f, "blowup({base}, point)"),
            SExpr::Blowup { base, center: EmbSpec::Linear(k) } => {
                write!(f, "blowup({base}, linear {k})")
            }
            SExpr::Total { base, bundle } => write!(f, "total({base}, {bundle})"),
            SExpr::Formal { dim, bundles } => {
                write!(f, "formal(dim = {dim}")?;
                for (name, rank) in bundles {
                    write!(f, ", {name} = {rank}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for BExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BExpr::Sum(factors) => {
                write!(f, "sum {{ ")?;
                for (i, c) in factors.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, " }}")
            }
            BExpr::Dual(b) => write!(f, "dual({b})"),
            BExpr::Quot(a, b) => write!(f, "quot({a}, {b})"),
            BExpr::TensorLine(b, c) => write!(f, "tensorline({b}, {c})"),
            BExpr::Formal { rank } => write!(f, "formal(rank = {rank})"),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StmtKind::Space { name, expr } => write!(f, "space {name} = {expr}"),
            StmtKind::Bundle { name, on, expr } => write!(f, "bundle {name} on {on} = {expr}"),
            StmtKind::Class { name, expr } => write!(f, "class {name} = {expr}"),
            StmtKind::Print(e) => write!(f, "print {e}"),
            StmtKind::AssertEq(a, b) => write!(f, "assert_eq {a}, {b}"),
            StmtKind::Verify { suite, params } => {
                write!(f, "verify {suite}")?;
                if !params.is_empty() {
                    write!(f, "(")?;
                    for (i, (k, v)) in params.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{k} = {v}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for stmt in &self.statements {
            writeln!(f, "{stmt}")?;
        }
        Ok(())
    }
}
