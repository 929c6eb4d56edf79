use super::*;

fn r(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn iv(a: i64, b: i64) -> Interval {
    Interval::ints(a, b)
}

const D: u32 = 10;

fn tol() -> BigRational {
    tolerance(D)
}

#[test]
fn vertex_matrix_counts_and_formula() {
    let m = SymIntervalMatrix::from_fn(7, |_, _| iv(0, 1));
    assert_eq!(m.vertex_matrices().unwrap().len(), 64);

    let one = SymIntervalMatrix::from_fn(1, |_, _| iv(2, 5));
    let vs = one.vertex_matrices().unwrap();
    assert_eq!(vs.len(), 1);
    assert_eq!(vs[0].get(0, 0), &r(2));

    let p = RatMatrix::from_ints(&[&[1, 2, 3], &[2, 4, 5], &[3, 5, 6]]).unwrap();
    for v in SymIntervalMatrix::point(&p).vertex_matrices().unwrap() {
        assert_eq!(v, p);
    }

    // k = 1 flips row/column 1: off-diagonal entries of row 1 take the
    // upper bound, everything else the lower bound.
    let m = SymIntervalMatrix::from_fn(3, |i, j| iv(10 * i as i64 + j as i64, 100));
    let v = m.vertex_matrix(1).unwrap();
    assert_eq!(v.get(0, 0), &r(0));
    assert_eq!(v.get(0, 1), &r(100));
    assert_eq!(v.get(0, 2), &r(100));
    assert_eq!(v.get(1, 2), &r(12));
    assert_eq!(v.get(2, 2), &r(22));
}

#[test]
fn vertex_matrices_reject_infinite_entries() {
    let m = SymIntervalMatrix::from_fn(2, |i, j| if i == j { iv(1, 1) } else { Interval::entire() });
    assert_eq!(m.vertex_matrices(), Err(LinalgError::NonFinite));
    let q = DefinitenessQuery::new(DefKind::Posdef, DefMethod::Vertex);
    assert_eq!(m.is_definite(q, D), Ok(false));
}

#[test]
fn exact_definiteness_of_rational_matrices() {
    let pd = RatMatrix::from_ints(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]).unwrap();
    assert!(pd.is_posdef() && pd.is_possemidef());
    let psd = RatMatrix::from_ints(&[&[1, 1], &[1, 1]]).unwrap();
    assert!(!psd.is_posdef() && psd.is_possemidef());
    let zero_pivot = RatMatrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
    assert!(!zero_pivot.is_possemidef());
    let zeros = RatMatrix::from_ints(&[&[0, 0], &[0, 0]]).unwrap();
    assert!(zeros.is_possemidef() && !zeros.is_posdef());
    let late_zero = RatMatrix::from_ints(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, 3]]).unwrap();
    assert!(late_zero.is_possemidef() && !late_zero.is_posdef());
}

#[test]
fn charpoly_of_small_matrices() {
    let a = RatMatrix::from_ints(&[&[2, 1], &[1, 2]]).unwrap();
    // x² − 4x + 3
    assert_eq!(a.charpoly(), Poly::new(vec![r(3), r(-4), r(1)]));
    let i3 = RatMatrix::identity(3);
    assert_eq!(i3.charpoly(), Poly::new(vec![r(-1), r(3), r(-3), r(1)]));
}

#[test]
fn extreme_eigenvalue_bounds() {
    let i3 = RatMatrix::identity(3);
    let lo = min_eig_lower(&i3, D);
    assert!(lo >= r(1) - tol() && lo <= r(1));

    let d = RatMatrix::diag(&[r(1), r(-2)]);
    let e = d.eigenvalue_enclosures(D);
    assert!(min_eig_lower(&d, D) <= r(-2));
    assert!(r(-2) <= e[0].1);
    assert!(max_eig_upper(&d, D) >= r(1));
}

#[test]
fn spectral_radius_examples() {
    let z = RatMatrix::from_ints(&[&[0, 0], &[0, 0]]).unwrap();
    assert!(spectral_radius_upper(&z, D) <= tol());
    let ones = RatMatrix::from_ints(&[&[1, 1], &[1, 1]]).unwrap();
    let b = spectral_radius_upper(&ones, D);
    assert!(b >= r(2) && b <= r(2) + tol());
}

#[test]
fn identity_is_posdef_by_both_methods() {
    let m = SymIntervalMatrix::point(&RatMatrix::identity(2));
    for method in [DefMethod::Vertex, DefMethod::Eigenvalue] {
        assert_eq!(m.is_definite(DefinitenessQuery::new(DefKind::Posdef, method), D), Ok(true));
        assert_eq!(m.is_definite(DefinitenessQuery::new(DefKind::Negdef, method), D), Ok(false));
    }
    assert_eq!(
        m.is_definite(DefinitenessQuery::new(DefKind::Nondef, DefMethod::Vertex), D),
        Err(LinalgError::MethodNotApplicable(DefKind::Nondef))
    );
}

#[test]
fn eigenvalue_kinds_on_simple_matrices() {
    let q = |k| DefinitenessQuery::new(k, DefMethod::Eigenvalue);
    let indefinite = SymIntervalMatrix::point(&RatMatrix::diag(&[r(-1), r(1)]));
    assert_eq!(indefinite.is_definite(q(DefKind::Nondef), D), Ok(true));
    assert_eq!(indefinite.is_definite(q(DefKind::Posdef), D), Ok(false));
    assert_eq!(indefinite.is_definite(q(DefKind::Nonnegsemidef), D), Ok(true));
    assert_eq!(indefinite.is_definite(q(DefKind::Nonpossemidef), D), Ok(true));

    let wide = SymIntervalMatrix::from_fn(2, |i, j| if i == j { iv(2, 4) } else { iv(-1, 1) });
    // A_c = 3I and ϱ(A_δ) = 2.
    assert_eq!(wide.is_definite(q(DefKind::Posdef), D), Ok(true));
    assert_eq!(wide.is_definite(q(DefKind::Nonnegdef), D), Ok(true));
    assert_eq!(wide.is_definite(q(DefKind::Nonposdef), D), Ok(false));
    assert_eq!(wide.is_definite(q(DefKind::Nondef), D), Ok(false));

    // A_c = 2I and ϱ(A_δ) = 2: the exact tie λ − ϱ = 0 cannot be certified
    // with outward bounds.
    let tie = SymIntervalMatrix::from_fn(2, |i, j| if i == j { iv(1, 3) } else { iv(-1, 1) });
    assert_eq!(tie.is_definite(q(DefKind::Possemidef), D), Ok(false));
}

#[test]
fn eig_interval_bounds_examples() {
    let m = SymIntervalMatrix::from_fn(1, |_, _| iv(0, 2));
    let b = m.eig_interval_bounds(0, D).unwrap();
    let (lo, hi) = b.finite_bounds().unwrap();
    assert!(lo.to_big() <= r(0) && lo.to_big() >= -tol());
    assert!(hi.to_big() >= r(2) && hi.to_big() <= r(2) + tol());

    let p = SymIntervalMatrix::point(&RatMatrix::from_ints(&[&[2, 1], &[1, 2]]).unwrap());
    for (i, ev) in [1, 3].into_iter().enumerate() {
        let b = p.eig_interval_bounds(i, D).unwrap();
        let (lo, hi) = b.finite_bounds().unwrap();
        assert!(lo.to_big() <= r(ev) && hi.to_big() >= r(ev));
        assert!(hi.to_big() - lo.to_big() <= tol() * r(2));
    }
    assert!(p.eig_interval_bounds(2, D).is_err());
}

#[test]
fn fixture_round_trip() {
    let m = SymIntervalMatrix::from_fn(3, |i, j| iv(i as i64 - 3, j as i64 + 1));
    let text = m.to_fixture();
    assert!(text.starts_with("3\n"));
    assert_eq!(SymIntervalMatrix::from_fixture(&text).unwrap(), m);
    assert!(SymIntervalMatrix::from_fixture("2\n[0, 1] [0, 2]\n[0, 1] [0, 1]\n").is_err());
    assert!(SymIntervalMatrix::from_fixture("2\n[0, 1] [0, 2]\n").is_err());
}

#[test]
fn negation_duality() {
    let m = SymIntervalMatrix::from_fn(3, |i, j| if i == j { iv(-9, -7) } else { iv(-1, 1) });
    for method in [DefMethod::Vertex, DefMethod::Eigenvalue] {
        let neg = m.is_definite(DefinitenessQuery::new(DefKind::Negdef, method), D).unwrap();
        let pos = m.neg().is_definite(DefinitenessQuery::new(DefKind::Posdef, method), D).unwrap();
        assert!(neg && pos);
    }
}
