//! Symbolic differentiation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{Expr, Func, Node};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// The exact derivative `∂e/∂v` under the standard rules. Shared subtrees
/// are differentiated once.
pub fn differentiate(e: &Expr, v: &str) -> Expr {
    let mut memo = HashMap::new();
    d(e, v, &mut memo)
}

fn d(e: &Expr, v: &str, memo: &mut HashMap<Expr, Expr>) -> Expr {
    if let Some(r) = memo.get(e) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Const(_) | Node::Pi => Expr::int(0),
        Node::Var(name) => Expr::int(if &**name == v { 1 } else { 0 }),
        Node::Add(xs) => Expr::add(xs.iter().map(|x| d(x, v, memo)).collect()),
        Node::Mul(xs) => {
            let mut terms = Vec::new();
            for (i, x) in xs.iter().enumerate() {
                let dx = d(x, v, memo);
                if dx.is_zero() {
                    continue;
                }
                let mut fs: Vec<Expr> = xs.clone();
                fs[i] = dx;
                terms.push(Expr::mul(fs));
            }
            Expr::add(terms)
        }
        Node::Pow(b, n) => {
            let db = d(b, v, memo);
            if db.is_zero() {
                Expr::int(0)
            } else {
                Expr::mul(vec![Expr::num(n.clone()), Expr::pow(b.clone(), n - BigRational::one()), db])
            }
        }
        Node::Apply(f, a) => {
            let da = d(a, v, memo);
            if da.is_zero() {
                Expr::int(0)
            } else {
                let a = a.clone();
                let outer = match f {
                    Func::Sin => Expr::cos(a),
                    Func::Cos => Expr::neg(Expr::sin(a)),
                    Func::Tan => Expr::pow(Expr::cos(a), q(-2, 1)),
                    Func::Cot => Expr::neg(Expr::pow(Expr::sin(a), q(-2, 1))),
                    Func::Arcsin => Expr::pow(one_minus_sq(a), q(-1, 2)),
                    Func::Arccos => Expr::neg(Expr::pow(one_minus_sq(a), q(-1, 2))),
                    Func::Arctan => Expr::pow(one_plus_sq(a), q(-1, 1)),
                    Func::Arccot => Expr::neg(Expr::pow(one_plus_sq(a), q(-1, 1))),
                    Func::Exp => Expr::apply(Func::Exp, a),
                    Func::Ln => Expr::pow(a, q(-1, 1)),
                };
                Expr::mul(vec![outer, da])
            }
        }
    };
    memo.insert(e.clone(), r.clone());
    r
}

fn one_minus_sq(a: Expr) -> Expr {
    Expr::sub(Expr::int(1), Expr::pow(a, q(2, 1)))
}

fn one_plus_sq(a: Expr) -> Expr {
    Expr::add(vec![Expr::int(1), Expr::pow(a, q(2, 1))])
}
