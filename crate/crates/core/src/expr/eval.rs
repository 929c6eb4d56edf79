//! Interval evaluation of expressions.
//!
//! [`eval_interval`] walks a single tree. [`Program`] compiles many
//! expressions into one hash-consed DAG so that an [`Evaluation`] over a box
//! computes every shared subexpression (the sines and cosines of the
//! coordinates, the distance radicands, …) exactly once, on demand. Both
//! paths apply the same interval operation to each node, so their results
//! are identical.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;

use super::{Expr, ExprError, Func, Node};
use crate::interval::{self, Interval, PiEnclosure, RoundingPolicy};
use crate::rational::Rational;

/// Ordered assignment of intervals to variable names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarBox {
    names: Vec<Arc<str>>,
    values: Vec<Interval>,
}

impl VarBox {
    /// A box from `(name, interval)` pairs, in order.
    pub fn new<S: AsRef<str>>(pairs: impl IntoIterator<Item = (S, Interval)>) -> Self {
        let (names, values) = pairs.into_iter().map(|(n, v)| (Arc::from(n.as_ref()), v)).unzip();
        VarBox { names, values }
    }

    /// A box over the given names.
    pub fn from_parts(names: &[&str], values: Vec<Interval>) -> Self {
        assert_eq!(names.len(), values.len(), "one interval per variable");
        VarBox { names: names.iter().map(|n| Arc::from(*n)).collect(), values }
    }

    /// The interval bound to `name`.
    pub fn get(&self, name: &str) -> Option<&Interval> {
        self.names.iter().position(|n| &**n == name).map(|i| &self.values[i])
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|n| &**n)
    }

    pub fn values(&self) -> &[Interval] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn apply_func(f: Func, x: &Interval, p: &RoundingPolicy) -> Result<Interval, ExprError> {
    Ok(match f {
        Func::Sin => interval::sin(x, p),
        Func::Cos => interval::cos(x, p),
        Func::Tan => interval::tan(x, p),
        Func::Cot => interval::cot(x, p),
        Func::Arcsin => interval::arcsin(x, p)?,
        Func::Arccos => interval::arccos(x, p)?,
        Func::Arctan => interval::arctan(x, p),
        Func::Arccot => interval::arccot(x, p),
        Func::Exp => interval::exp(x, p),
        Func::Ln => interval::ln(x, p)?,
    })
}

fn const_interval(q: &BigRational, p: &RoundingPolicy) -> Interval {
    interval::round_out(&Interval::point(Rational::from_big(q.clone())), p)
}

/// Encloses the range of `e` over the box `b`.
pub fn eval_interval(e: &Expr, b: &VarBox, p: &RoundingPolicy) -> Result<Interval, ExprError> {
    let pi = PiEnclosure::new(p.digits).interval();
    eval_rec(e, b, p, &pi)
}

fn eval_rec(e: &Expr, b: &VarBox, p: &RoundingPolicy, pi: &Interval) -> Result<Interval, ExprError> {
    Ok(match e.node() {
        Node::Const(q) => const_interval(q, p),
        Node::Pi => pi.clone(),
        Node::Var(v) => b.get(v).cloned().ok_or_else(|| ExprError::UnboundVariable(v.to_string()))?,
        Node::Add(xs) => {
            let vals = xs.iter().map(|x| eval_rec(x, b, p, pi)).collect::<Result<Vec<_>, _>>()?;
            interval::add(&vals, p)
        }
        Node::Mul(xs) => {
            let vals = xs.iter().map(|x| eval_rec(x, b, p, pi)).collect::<Result<Vec<_>, _>>()?;
            interval::mul(&vals, p)
        }
        Node::Pow(x, q) => interval::pow_rat(&eval_rec(x, b, p, pi)?, q, p)?,
        Node::Apply(f, x) => apply_func(*f, &eval_rec(x, b, p, pi)?, p)?,
    })
}

#[derive(Debug, Clone)]
enum Op {
    Const(BigRational),
    Pi,
    Var(usize),
    Add(Vec<usize>),
    Mul(Vec<usize>),
    Pow(usize, BigRational),
    Apply(Func, usize),
}

/// Several expressions compiled into one shared DAG over a fixed variable
/// list.
#[derive(Debug, Clone)]
pub struct Program {
    ops: Vec<Op>,
    roots: Vec<usize>,
    vars: Vec<String>,
}

impl Program {
    /// Compiles `exprs` over the variables `vars` (slot order of the boxes
    /// later passed to [`Program::evaluate`]). Fails on a free variable not in
    /// `vars`.
    pub fn compile(exprs: &[Expr], vars: &[&str]) -> Result<Program, ExprError> {
        let mut prog =
            Program { ops: Vec::new(), roots: Vec::new(), vars: vars.iter().map(|s| s.to_string()).collect() };
        let mut ids: HashMap<Expr, usize> = HashMap::new();
        for e in exprs {
            let id = prog.intern(e, &mut ids)?;
            prog.roots.push(id);
        }
        Ok(prog)
    }

    fn intern(&mut self, e: &Expr, ids: &mut HashMap<Expr, usize>) -> Result<usize, ExprError> {
        if let Some(&i) = ids.get(e) {
            return Ok(i);
        }
        let op = match e.node() {
            Node::Const(q) => Op::Const(q.clone()),
            Node::Pi => Op::Pi,
            Node::Var(v) => Op::Var(
                self.vars.iter().position(|n| n == &**v).ok_or_else(|| ExprError::UnboundVariable(v.to_string()))?,
            ),
            Node::Add(xs) => Op::Add(xs.iter().map(|x| self.intern(x, ids)).collect::<Result<_, _>>()?),
            Node::Mul(xs) => Op::Mul(xs.iter().map(|x| self.intern(x, ids)).collect::<Result<_, _>>()?),
            Node::Pow(x, q) => Op::Pow(self.intern(x, ids)?, q.clone()),
            Node::Apply(f, x) => Op::Apply(*f, self.intern(x, ids)?),
        };
        self.ops.push(op);
        let id = self.ops.len() - 1;
        ids.insert(e.clone(), id);
        Ok(id)
    }

    /// Number of distinct nodes.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Number of compiled root expressions.
    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// Starts a lazy evaluation over the box `values` (one interval per
    /// variable slot).
    pub fn evaluate<'a>(&'a self, values: &'a [Interval], policy: RoundingPolicy) -> Evaluation<'a> {
        assert_eq!(values.len(), self.vars.len(), "one interval per variable slot");
        Evaluation { prog: self, values, policy, memo: vec![None; self.ops.len()], pi: None }
    }
}

/// A lazy, memoized evaluation of a [`Program`] over one box.
pub struct Evaluation<'a> {
    prog: &'a Program,
    values: &'a [Interval],
    policy: RoundingPolicy,
    memo: Vec<Option<Result<Interval, ExprError>>>,
    pi: Option<Interval>,
}

impl Evaluation<'_> {
    /// The box being evaluated.
    pub fn values(&self) -> &[Interval] {
        self.values
    }

    /// Enclosure of root expression number `k`.
    pub fn root(&mut self, k: usize) -> Result<Interval, ExprError> {
        let id = self.prog.roots[k];
        self.node(id)
    }

    fn node(&mut self, id: usize) -> Result<Interval, ExprError> {
        if let Some(r) = &self.memo[id] {
            return r.clone();
        }
        let prog = self.prog;
        let p = self.policy;
        let r = match &prog.ops[id] {
            Op::Const(q) => Ok(const_interval(q, &p)),
            Op::Pi => {
                let pi = self.pi.get_or_insert_with(|| PiEnclosure::new(p.digits).interval());
                Ok(pi.clone())
            }
            Op::Var(i) => Ok(self.values[*i].clone()),
            Op::Add(xs) => self.children(xs).map(|v| interval::add(&v, &p)),
            Op::Mul(xs) => self.children(xs).map(|v| interval::mul(&v, &p)),
            Op::Pow(x, q) => self.node(*x).and_then(|v| Ok(interval::pow_rat(&v, q, &p)?)),
            Op::Apply(f, x) => self.node(*x).and_then(|v| apply_func(*f, &v, &p)),
        };
        self.memo[id] = Some(r.clone());
        r
    }

    fn children(&mut self, xs: &[usize]) -> Result<Vec<Interval>, ExprError> {
        xs.iter().map(|&x| self.node(x)).collect()
    }
}
