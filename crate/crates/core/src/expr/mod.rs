//! Expression trees over named variables.
//!
//! An [`Expr`] is an immutable, reference-counted tree of rational constants,
//! π, variables, n-ary sums and products, rational powers and the elementary
//! functions. Division is a product with a `−1` power. Every node caches a
//! structural hash, so equality tests and hash-consing stay cheap even for
//! the large Hessian expressions.
//!
//! The constructors ([`Expr::add`], [`Expr::mul`], [`Expr::pow`], …) apply a
//! few local simplifications — flattening, constant folding, dropping
//! neutral elements — so that trees built by the parser, by differentiation
//! and by hand all share one shape. Heavier rewriting lives in
//! [`normalize()`] and [`expand()`].

mod diff;
mod eval;
mod normalize;
mod parse;

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::interval::IntervalError;

pub use diff::differentiate;
pub use eval::{eval_interval, Evaluation, Program, VarBox};
pub use normalize::{expand, normalize};
pub use parse::parse;

/// Errors from parsing or evaluating expressions.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    /// The text is not in the expression grammar.
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },
    /// A variable has no value in the evaluation box.
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    /// An interval operation failed (for example a negative radicand).
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

/// The elementary functions available in expressions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Cot,
    Arcsin,
    Arccos,
    Arctan,
    Arccot,
    Exp,
    Ln,
}

impl Func {
    /// Name used by the parser and the renderer.
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Cot => "cot",
            Func::Arcsin => "arcsin",
            Func::Arccos => "arccos",
            Func::Arctan => "arctan",
            Func::Arccot => "arccot",
            Func::Exp => "exp",
            Func::Ln => "ln",
        }
    }

    /// Looks a function up by name (a few common aliases are accepted).
    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "cot" => Func::Cot,
            "arcsin" | "asin" => Func::Arcsin,
            "arccos" | "acos" => Func::Arccos,
            "arctan" | "atan" => Func::Arctan,
            "arccot" | "acot" => Func::Arccot,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            _ => return None,
        })
    }

    /// Exact value at a real argument, in `f64` (test oracles only).
    pub fn apply_f64(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Cot => 1.0 / x.tan(),
            Func::Arcsin => x.asin(),
            Func::Arccos => x.acos(),
            Func::Arctan => x.atan(),
            Func::Arccot => std::f64::consts::FRAC_PI_2 - x.atan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
        }
    }
}

/// One node of an expression tree.
#[derive(Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(BigRational),
    Pi,
    Var(Arc<str>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, BigRational),
    Apply(Func, Expr),
}

#[derive(Debug)]
struct Inner {
    hash: u64,
    node: Node,
}

/// An immutable, shareable expression.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.node == other.0.node)
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Expr {
    fn make(node: Node) -> Expr {
        let mut h = DefaultHasher::new();
        node.hash(&mut h);
        Expr(Arc::new(Inner { hash: h.finish(), node }))
    }

    /// The root node.
    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// A rational constant.
    pub fn num(q: BigRational) -> Expr {
        Expr::make(Node::Const(q))
    }

    /// An integer constant.
    pub fn int(n: i64) -> Expr {
        Expr::num(big(n))
    }

    /// The constant `n/d`.
    pub fn ratio(n: i64, d: i64) -> Expr {
        Expr::num(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// The constant π.
    pub fn pi() -> Expr {
        Expr::make(Node::Pi)
    }

    /// A named variable.
    pub fn var(name: &str) -> Expr {
        Expr::make(Node::Var(Arc::from(name)))
    }

    /// The constant value, if this is a constant node.
    pub fn as_const(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_one())
    }

    /// n-ary sum: flattens nested sums, folds constants (placed first) and
    /// drops zeros.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut c = BigRational::zero();
        let mut out = Vec::with_capacity(terms.len() + 1);
        for t in terms {
            match t.node() {
                Node::Const(q) => c += q,
                Node::Add(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(q) => c += q,
                            _ => out.push(u.clone()),
                        }
                    }
                }
                _ => out.push(t),
            }
        }
        if !c.is_zero() {
            out.insert(0, Expr::num(c));
        }
        match out.len() {
            0 => Expr::int(0),
            1 => out.pop().unwrap(),
            _ => Expr::make(Node::Add(out)),
        }
    }

    /// n-ary product: flattens nested products, folds constants (placed
    /// first), drops ones and collapses to zero on a zero factor.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut c = BigRational::one();
        let mut out = Vec::with_capacity(factors.len() + 1);
        for f in factors {
            match f.node() {
                Node::Const(q) => c *= q,
                Node::Mul(inner) => {
                    for u in inner {
                        match u.node() {
                            Node::Const(q) => c *= q,
                            _ => out.push(u.clone()),
                        }
                    }
                }
                _ => out.push(f),
            }
        }
        if c.is_zero() {
            return Expr::int(0);
        }
        if !c.is_one() || out.is_empty() {
            out.insert(0, Expr::num(c));
        }
        match out.len() {
            1 => out.pop().unwrap(),
            _ => Expr::make(Node::Mul(out)),
        }
    }

    /// `base^q`: folds integer powers of constants, `x^0 = 1`, `x^1 = x`,
    /// and `(x^a)^k = x^(a·k)` for integer `k`.
    pub fn pow(base: Expr, q: BigRational) -> Expr {
        if q.is_zero() {
            return Expr::int(1);
        }
        if q.is_one() {
            return base;
        }
        match base.node() {
            Node::Const(c) if q.is_integer() && !(c.is_zero() && q.is_negative()) => {
                let k = q.to_integer().to_i32().expect("small integer exponent");
                return Expr::num(num_traits::pow::Pow::pow(c, k));
            }
            Node::Pow(inner, a) if q.is_integer() => return Expr::pow(inner.clone(), a * &q),
            _ => {}
        }
        Expr::make(Node::Pow(base, q))
    }

    /// Function application.
    pub fn apply(f: Func, arg: Expr) -> Expr {
        Expr::make(Node::Apply(f, arg))
    }

    /// `−e`.
    pub fn neg(e: Expr) -> Expr {
        Expr::mul(vec![Expr::int(-1), e])
    }

    /// `a − b`.
    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::add(vec![a, Expr::neg(b)])
    }

    /// `a / b` as `a · b^(−1)`.
    pub fn div(a: Expr, b: Expr) -> Expr {
        Expr::mul(vec![a, Expr::pow(b, big(-1))])
    }

    /// `√e` as `e^(1/2)`.
    pub fn sqrt(e: Expr) -> Expr {
        Expr::pow(e, BigRational::new(1.into(), 2.into()))
    }

    pub fn sin(e: Expr) -> Expr {
        Expr::apply(Func::Sin, e)
    }

    pub fn cos(e: Expr) -> Expr {
        Expr::apply(Func::Cos, e)
    }

    /// Names of the free variables, sorted and deduplicated.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        self.visit(&mut |e| {
            if let Node::Var(v) = e.node() {
                if seen.insert(v.to_string()) {
                    out.push(v.to_string());
                }
            }
        });
        out.sort();
        out
    }

    /// Pre-order traversal over unique subtrees.
    pub fn visit(&self, f: &mut impl FnMut(&Expr)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.clone()) {
                continue;
            }
            f(&e);
            match e.node() {
                Node::Add(xs) | Node::Mul(xs) => stack.extend(xs.iter().rev().cloned()),
                Node::Pow(b, _) => stack.push(b.clone()),
                Node::Apply(_, a) => stack.push(a.clone()),
                _ => {}
            }
        }
    }

    /// Number of distinct subtrees (a size measure of the shared DAG).
    pub fn dag_size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    /// Replaces variables by expressions.
    pub fn substitute(&self, map: &dyn Fn(&str) -> Option<Expr>) -> Expr {
        let mut memo = std::collections::HashMap::new();
        self.subst_rec(map, &mut memo)
    }

    fn subst_rec(&self, map: &dyn Fn(&str) -> Option<Expr>, memo: &mut std::collections::HashMap<Expr, Expr>) -> Expr {
        if let Some(r) = memo.get(self) {
            return r.clone();
        }
        let r = match self.node() {
            Node::Var(v) => map(v).unwrap_or_else(|| self.clone()),
            Node::Const(_) | Node::Pi => self.clone(),
            Node::Add(xs) => Expr::add(xs.iter().map(|x| x.subst_rec(map, memo)).collect()),
            Node::Mul(xs) => Expr::mul(xs.iter().map(|x| x.subst_rec(map, memo)).collect()),
            Node::Pow(b, q) => Expr::pow(b.subst_rec(map, memo), q.clone()),
            Node::Apply(f, a) => Expr::apply(*f, a.subst_rec(map, memo)),
        };
        memo.insert(self.clone(), r.clone());
        r
    }

    /// Approximate value in `f64` at a point (test oracle only; never used
    /// for certified results).
    pub fn eval_f64(&self, env: &dyn Fn(&str) -> f64) -> f64 {
        match self.node() {
            Node::Const(q) => q.to_f64().unwrap_or(f64::NAN),
            Node::Pi => std::f64::consts::PI,
            Node::Var(v) => env(v),
            Node::Add(xs) => xs.iter().map(|x| x.eval_f64(env)).sum(),
            Node::Mul(xs) => xs.iter().map(|x| x.eval_f64(env)).product(),
            Node::Pow(b, q) => {
                let x = b.eval_f64(env);
                let n = q.numer().to_i64().unwrap();
                let d = q.denom().to_i64().unwrap();
                if d == 1 {
                    x.powi(n as i32)
                } else if d % 2 == 1 && x < 0.0 {
                    let r = (-x).powf(1.0 / d as f64).powi(n as i32);
                    if n % 2 == 0 {
                        r
                    } else {
                        -r
                    }
                } else {
                    x.powf(n as f64 / d as f64)
                }
            }
            Node::Apply(f, a) => f.apply_f64(a.eval_f64(env)),
        }
    }

    fn kind_rank(&self) -> u8 {
        match self.node() {
            Node::Const(_) => 0,
            Node::Pi => 1,
            Node::Var(_) => 2,
            Node::Apply(..) => 3,
            Node::Pow(..) => 4,
            Node::Mul(_) => 5,
            Node::Add(_) => 6,
        }
    }
}

/// A total structural order (constants first, then π, variables, function
/// applications, powers, products, sums), used for canonical orderings.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let r = self.kind_rank().cmp(&other.kind_rank());
        if r != Ordering::Equal {
            return r;
        }
        match (self.node(), other.node()) {
            (Node::Const(a), Node::Const(b)) => a.cmp(b),
            (Node::Var(a), Node::Var(b)) => a.cmp(b),
            (Node::Apply(f, a), Node::Apply(g, b)) => f.cmp(g).then_with(|| a.cmp(b)),
            (Node::Pow(a, p), Node::Pow(b, q)) => a.cmp(b).then_with(|| p.cmp(q)),
            (Node::Mul(a), Node::Mul(b)) | (Node::Add(a), Node::Add(b)) => a.cmp(b),
            _ => Ordering::Equal,
        }
    }
}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.is_integer() {
        if q.is_negative() {
            write!(f, "({})", q.numer())
        } else {
            write!(f, "{}", q.numer())
        }
    } else {
        write!(f, "({}/{})", q.numer(), q.denom())
    }
}

/// Renders in the parser's grammar; `parse(e.to_string())` reproduces `e`
/// for every tree built through the constructors.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(q) => fmt_rational(q, f),
            Node::Pi => write!(f, "pi"),
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    if matches!(x.node(), Node::Add(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            Node::Mul(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    if matches!(x.node(), Node::Add(_) | Node::Mul(_)) {
                        write!(f, "({x})")?;
                    } else {
                        write!(f, "{x}")?;
                    }
                }
                Ok(())
            }
            Node::Pow(b, q) => {
                let atom = match b.node() {
                    Node::Var(_) | Node::Pi | Node::Apply(..) => true,
                    Node::Const(c) => c.is_integer() && !c.is_negative(),
                    _ => false,
                };
                if atom {
                    write!(f, "{b}^")?;
                } else {
                    write!(f, "({b})^")?;
                }
                fmt_rational(q, f)
            }
            Node::Apply(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests;
