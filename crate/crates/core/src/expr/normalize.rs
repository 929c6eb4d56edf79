//! Algebraic normalization and expansion.
//!
//! [`normalize`] rewrites a tree into a canonical, semantically equal form:
//! sums and products are flattened and sorted, constants merged, like terms
//! (`x + x → 2·x`) and like factors (`x·x → x²`, `u^(1/2)·u^(−1) → u^(−1/2)`)
//! collected, and terms sharing an identical denominator combined
//! (`a/s + b/s → (a + b)/s`). [`expand`] additionally distributes products
//! over sums outside of radicands and function arguments, so that
//! cancellations between monomials become visible to `normalize`.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Expr, Node};

/// Canonical, semantically equal form of `e` (see the module docs).
pub fn normalize(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    norm(e, &mut memo)
}

fn norm(e: &Expr, memo: &mut HashMap<Expr, Expr>) -> Expr {
    if let Some(r) = memo.get(e) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Const(_) | Node::Pi | Node::Var(_) => e.clone(),
        Node::Apply(f, a) => Expr::apply(*f, norm(a, memo)),
        Node::Pow(b, q) => Expr::pow(norm(b, memo), q.clone()),
        Node::Mul(xs) => {
            let xs: Vec<Expr> = xs.iter().map(|x| norm(x, memo)).collect();
            collect_factors(Expr::mul(xs))
        }
        Node::Add(xs) => {
            let xs: Vec<Expr> = xs.iter().map(|x| norm(x, memo)).collect();
            collect_terms(Expr::add(xs), memo)
        }
    };
    memo.insert(e.clone(), r.clone());
    r
}

/// Splits a factor into `(base, exponent)`.
fn base_exp(f: &Expr) -> (Expr, BigRational) {
    match f.node() {
        Node::Pow(b, q) => (b.clone(), q.clone()),
        _ => (f.clone(), BigRational::one()),
    }
}

/// Merges powers of equal bases in a (flattened) product and sorts factors.
fn collect_factors(e: Expr) -> Expr {
    let Node::Mul(xs) = e.node() else {
        return e;
    };
    let mut c = BigRational::one();
    let mut order: Vec<Expr> = Vec::new();
    let mut exps: HashMap<Expr, BigRational> = HashMap::new();
    for x in xs {
        if let Some(k) = x.as_const() {
            c *= k;
            continue;
        }
        let (b, q) = base_exp(x);
        match exps.get_mut(&b) {
            Some(s) => *s += q,
            None => {
                order.push(b.clone());
                exps.insert(b, q);
            }
        }
    }
    let mut factors: Vec<Expr> = order
        .into_iter()
        .filter_map(|b| {
            let q = exps.remove(&b).unwrap();
            if q.is_zero() {
                None
            } else {
                Some(Expr::pow(b, q))
            }
        })
        .collect();
    factors.sort();
    factors.insert(0, Expr::num(c));
    Expr::mul(factors)
}

/// Splits a term into `(coefficient, rest)`; `rest` is `1` for constants.
fn coef_rest(t: &Expr) -> (BigRational, Expr) {
    match t.node() {
        Node::Const(q) => (q.clone(), Expr::int(1)),
        Node::Mul(xs) => match xs[0].as_const() {
            Some(q) => (q.clone(), Expr::mul(xs[1..].to_vec())),
            None => (BigRational::one(), t.clone()),
        },
        _ => (BigRational::one(), t.clone()),
    }
}

/// Splits a term into numerator factors and sorted denominator factors
/// (powers with negative exponent).
fn num_den(t: &Expr) -> (Vec<Expr>, Vec<Expr>) {
    let factors: Vec<Expr> = match t.node() {
        Node::Mul(xs) => xs.clone(),
        _ => vec![t.clone()],
    };
    let mut num = Vec::new();
    let mut den = Vec::new();
    for f in factors {
        match f.node() {
            Node::Pow(_, q) if q.is_negative() => den.push(f.clone()),
            _ => num.push(f.clone()),
        }
    }
    den.sort();
    (num, den)
}

/// Collects like terms of a flattened sum, then combines terms over
/// identical denominators.
fn collect_terms(e: Expr, memo: &mut HashMap<Expr, Expr>) -> Expr {
    let Node::Add(xs) = e.node() else {
        return e;
    };
    let mut order: Vec<Expr> = Vec::new();
    let mut coefs: HashMap<Expr, BigRational> = HashMap::new();
    for x in xs {
        let (c, rest) = coef_rest(x);
        match coefs.get_mut(&rest) {
            Some(s) => *s += c,
            None => {
                order.push(rest.clone());
                coefs.insert(rest, c);
            }
        }
    }
    let terms: Vec<Expr> = order
        .into_iter()
        .filter_map(|rest| {
            let c = coefs.remove(&rest).unwrap();
            if c.is_zero() {
                None
            } else {
                Some(collect_factors(Expr::mul(vec![Expr::num(c), rest])))
            }
        })
        .collect();

    // Group by denominator.
    let mut groups: Vec<(Vec<Expr>, Vec<Vec<Expr>>)> = Vec::new();
    let mut plain: Vec<Expr> = Vec::new();
    for t in terms {
        let (num, den) = num_den(&t);
        if den.is_empty() {
            plain.push(t);
            continue;
        }
        match groups.iter_mut().find(|(d, _)| *d == den) {
            Some((_, nums)) => nums.push(num),
            None => groups.push((den, vec![num])),
        }
    }
    let mut out = plain;
    for (den, nums) in groups {
        if nums.len() == 1 {
            let mut fs = nums.into_iter().next().unwrap();
            fs.extend(den);
            out.push(collect_factors(Expr::mul(fs)));
        } else {
            let numerator = Expr::add(nums.into_iter().map(Expr::mul).collect());
            let numerator = norm(&numerator, memo);
            if numerator.is_zero() {
                continue;
            }
            let mut fs = vec![numerator];
            fs.extend(den);
            out.push(collect_factors(Expr::mul(fs)));
        }
    }
    out.sort();
    Expr::add(out)
}

/// Distributes products (and small positive integer powers) over sums,
/// except inside function arguments and fractional or negative powers, then
/// normalizes.
pub fn expand(e: &Expr) -> Expr {
    let mut memo = HashMap::new();
    normalize(&exp_rec(e, &mut memo))
}

fn exp_rec(e: &Expr, memo: &mut HashMap<Expr, Expr>) -> Expr {
    if let Some(r) = memo.get(e) {
        return r.clone();
    }
    let r = match e.node() {
        Node::Const(_) | Node::Pi | Node::Var(_) | Node::Apply(..) => e.clone(),
        Node::Add(xs) => Expr::add(xs.iter().map(|x| exp_rec(x, memo)).collect()),
        Node::Mul(xs) => {
            let fs: Vec<Expr> = xs.iter().map(|x| exp_rec(x, memo)).collect();
            distribute(&fs)
        }
        Node::Pow(b, q) => {
            let small_int = q.is_integer() && q.is_positive() && q.to_integer().to_u32().is_some_and(|k| k <= 4);
            if small_int && matches!(b.node(), Node::Add(_)) {
                let k = q.to_integer().to_u32().unwrap();
                let b = exp_rec(b, memo);
                distribute(&vec![b; k as usize])
            } else {
                e.clone()
            }
        }
    };
    memo.insert(e.clone(), r.clone());
    r
}

fn distribute(factors: &[Expr]) -> Expr {
    let mut terms: Vec<Vec<Expr>> = vec![Vec::new()];
    for f in factors {
        match f.node() {
            Node::Add(xs) => {
                let mut next = Vec::with_capacity(terms.len() * xs.len());
                for t in &terms {
                    for x in xs {
                        let mut u = t.clone();
                        u.push(x.clone());
                        next.push(u);
                    }
                }
                terms = next;
            }
            _ => {
                for t in terms.iter_mut() {
                    t.push(f.clone());
                }
            }
        }
    }
    Expr::add(terms.into_iter().map(Expr::mul).collect())
}
