//! Named constants, configurations and domains of the problem.

use std::fmt;

use crate::expr::{eval_interval, parse, Expr, Func, VarBox};
use crate::interval::{Interval, RoundingPolicy};
use crate::rational::Rational;

use super::{model_policy, VARS};

fn p(s: &str) -> Expr {
    parse(s).expect("constant expression parses")
}

/// Enclosure of a closed-form constant at the default precision.
pub fn enclose(e: &Expr) -> Interval {
    enclose_with(e, &RoundingPolicy::default())
}

/// Enclosure of a closed-form constant under `policy`.
pub fn enclose_with(e: &Expr, policy: &RoundingPolicy) -> Interval {
    eval_interval(e, &VarBox::new(Vec::<(&str, Interval)>::new()), policy).expect("constant expressions evaluate")
}

fn lower(e: &Expr) -> Rational {
    enclose(e).finite_bounds().expect("finite constant").0.clone()
}

fn upper(e: &Expr) -> Rational {
    enclose(e).finite_bounds().expect("finite constant").1.clone()
}

/// The named constants and configurations.
#[derive(Clone, Debug)]
pub struct Constants {
    /// `3√3 + 6√2 + 2`, the conjectured maximum.
    pub fmax_expr: Expr,
    /// Enclosure of `fmax`.
    pub fmax: Interval,
    /// Rational lower bound of `fmax` (lower endpoint of its enclosure).
    pub fmax_lo: Rational,
    /// The bipyramid coordinates `(−π/3, π/3, π, 0, −π/2, 0, π/2)`.
    pub theta_bp: [Expr; 7],
    /// `s = −3/4 + √2/2 + √(41 − 28√2)/4`, the sine of `ω₁`.
    pub s: Expr,
    /// `ω₁ = arcsin s`, `ω₂ = −arcsin(s√(1 − s²))`,
    /// `ω₃ = arccot(s²/√(1 − s²))`.
    pub omega: [Expr; 3],
    /// The pyramid coordinates `(−2ω₁, π/2 − ω₁, π, ω₂, −ω₃, ω₂, ω₃)`.
    pub theta_p: [Expr; 7],
    /// Enclosure of `f(Θ_p)`.
    pub pyfmax: Interval,
    theta_bp_box: Vec<Interval>,
    theta_p_box: Vec<Interval>,
    /// Radius of the bipyramid exclusion box, `η = ξ = π/377`.
    pub eta: Expr,
    /// Radius of the pyramid exclusion box, `ζ = χ = π/791`.
    pub zeta: Expr,
    /// Smallest possible mutual distance in a maximal configuration, `2/15`.
    pub min_dist: Rational,
    /// Lower bound of the second largest distance of any configuration
    /// beating `fmax`: `(fmax − 2)/9 = √3/3 + 2√2/3`.
    pub second_dist_threshold: Expr,
    /// Largest distance sum of five coplanar points (regular pentagon),
    /// `5·cot(π/10)`.
    pub pentagon_bound: Expr,
    /// Lower bound of `φ₁`: `−2·arccos((fmax − 2)/18)`.
    pub phi1_lower: Expr,
}

impl Constants {
    pub(super) fn build(f: &Expr) -> Constants {
        let fmax_expr = p("3*sqrt(3)+6*sqrt(2)+2");
        let fmax = enclose(&fmax_expr);
        let fmax_lo = fmax.finite_bounds().unwrap().0.clone();
        let theta_bp = ["-pi/3", "pi/3", "pi", "0", "-pi/2", "0", "pi/2"].map(p);
        let s = p("-3/4+sqrt(2)/2+sqrt(41-28*sqrt(2))/4");
        let cosine = Expr::sqrt(Expr::sub(Expr::int(1), Expr::pow(s.clone(), two())));
        let omega = [
            Expr::apply(Func::Arcsin, s.clone()),
            Expr::neg(Expr::apply(Func::Arcsin, Expr::mul(vec![s.clone(), cosine.clone()]))),
            Expr::apply(Func::Arccot, Expr::div(Expr::pow(s.clone(), two()), cosine)),
        ];
        let [o1, o2, o3] = omega.clone();
        let theta_p = [
            Expr::mul(vec![Expr::int(-2), o1.clone()]),
            Expr::sub(p("pi/2"), o1),
            Expr::pi(),
            o2.clone(),
            Expr::neg(o3.clone()),
            o2,
            o3,
        ];
        let theta_bp_box = point_box(&theta_bp);
        let theta_p_box = point_box(&theta_p);
        let pyfmax = eval_interval(f, &VarBox::from_parts(&VARS, theta_p_box.clone()), &model_policy())
            .expect("f evaluates at the pyramid configuration");
        Constants {
            fmax_expr,
            fmax,
            fmax_lo,
            theta_bp,
            s,
            omega,
            theta_p,
            pyfmax,
            theta_bp_box,
            theta_p_box,
            eta: p("pi/377"),
            zeta: p("pi/791"),
            min_dist: Rational::ratio(2, 15),
            second_dist_threshold: p("sqrt(3)/3+2*sqrt(2)/3"),
            pentagon_bound: p("5*cot(pi/10)"),
            phi1_lower: p("-2*arccos((3*sqrt(3)+6*sqrt(2)+2-2)/18)"),
        }
    }

    /// Enclosures of the bipyramid coordinates.
    pub fn theta_bp_box(&self) -> &[Interval] {
        &self.theta_bp_box
    }

    /// Enclosures of the pyramid coordinates.
    pub fn theta_p_box(&self) -> &[Interval] {
        &self.theta_p_box
    }
}

/// Enclosures of a list of closed-form coordinates.
pub fn point_box(xs: &[Expr]) -> Vec<Interval> {
    xs.iter().map(enclose).collect()
}

/// The two search regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionId {
    /// `C` on the upper half sphere; contains the bipyramid and pyramid
    /// configurations.
    One,
    /// `D` on the upper, `C` and `E` on the lower half sphere.
    Two,
}

impl RegionId {
    pub fn number(self) -> u8 {
        match self {
            RegionId::One => 1,
            RegionId::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<RegionId> {
        match n {
            1 => Some(RegionId::One),
            2 => Some(RegionId::Two),
            _ => None,
        }
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Search domains and exclusion boxes, with rational endpoints enclosing the
/// closed-form ones.
#[derive(Clone, Debug)]
pub struct Domains {
    /// The full parameter domain `𝒟`.
    pub full: Vec<Interval>,
    /// Search region 1.
    pub region1: Vec<Interval>,
    /// Search region 2.
    pub region2: Vec<Interval>,
    /// `𝒟_bp`: `Θ_bp ± η`, outward rounded.
    pub bipyramid: Vec<Interval>,
    /// `𝒟_p`: `Θ_p ± ζ`, outward rounded.
    pub pyramid: Vec<Interval>,
}

fn closed_form_box(ends: &[(&Expr, &Expr)]) -> Vec<Interval> {
    ends.iter().map(|(a, b)| Interval::closed(lower(a), upper(b))).collect()
}

fn disturbed(center: &[Expr], radius: &Expr) -> Vec<Interval> {
    center
        .iter()
        .map(|c| {
            let lo = Expr::sub(c.clone(), radius.clone());
            let hi = Expr::add(vec![c.clone(), radius.clone()]);
            Interval::closed(lower(&lo), upper(&hi))
        })
        .collect()
}

impl Domains {
    pub(super) fn build(c: &Constants) -> Domains {
        let half = p("pi/2");
        let nhalf = p("-pi/2");
        let pi = p("pi");
        let npi = p("-pi");
        let zero = Expr::int(0);
        let full = closed_form_box(&[
            (&nhalf, &half),
            (&nhalf, &half),
            (&npi, &pi),
            (&nhalf, &half),
            (&npi, &pi),
            (&nhalf, &half),
            (&npi, &pi),
        ]);
        let region1 = closed_form_box(&[
            (&c.phi1_lower, &zero),
            (&zero, &half),
            (&zero, &pi),
            (&nhalf, &half),
            (&npi, &zero),
            (&nhalf, &half),
            (&zero, &pi),
        ]);
        let region2 = closed_form_box(&[
            (&c.phi1_lower, &zero),
            (&nhalf, &zero),
            (&zero, &pi),
            (&zero, &half),
            (&npi, &zero),
            (&nhalf, &zero),
            (&zero, &pi),
        ]);
        Domains {
            full,
            region1,
            region2,
            bipyramid: disturbed(&c.theta_bp, &c.eta),
            pyramid: disturbed(&c.theta_p, &c.zeta),
        }
    }

    /// The box of a search region.
    pub fn region(&self, r: RegionId) -> &[Interval] {
        match r {
            RegionId::One => &self.region1,
            RegionId::Two => &self.region2,
        }
    }
}

fn two() -> num_rational::BigRational {
    num_rational::BigRational::from_integer(2.into())
}
