//! Short Weierstrass curves `y^2 = x^3 + ax + b` over prime fields `F_p`, `p > 3`.
//!
//! Point counts are naive: one quadratic character per `x`. That is plenty
//! for the field sizes this crate targets.

use serde::Serialize;
use thiserror::Error;

/// Largest characteristic accepted by [`count_points`].
pub const MAX_COUNT_PRIME: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("characteristic {0} is not supported (need p > 3)")]
    SmallCharacteristic(i64),
    #[error("y^2 = x^3 + {a}x + {b} is singular over F_{p}")]
    SingularCurve { p: u64, a: u64, b: u64 },
    #[error("p = {0} exceeds the point-counting limit {MAX_COUNT_PRIME}")]
    FieldTooLarge(u64),
    #[error("curves live over different fields (F_{0} and F_{1})")]
    MixedCharacteristic(u64, u64),
    #[error("empty list of curves")]
    EmptyList,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Quadratic character of `v` modulo the odd prime `p` (Euler's criterion).
pub fn legendre(v: u64, p: u64) -> i64 {
    let v = v % p;
    if v == 0 {
        return 0;
    }
    if pow_mod(v, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

fn reduce(v: i64, p: u64) -> u64 {
    v.rem_euclid(p as i64) as u64
}

/// A nonsingular curve `y^2 = x^3 + ax + b` over `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CurveSpec {
    p: u64,
    a: u64,
    b: u64,
}

impl CurveSpec {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u64 {
        self.a
    }

    pub fn b(&self) -> u64 {
        self.b
    }

    /// `x^3 + ax + b` evaluated in `F_p`.
    pub fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        let x2 = mul_mod(x, x, p);
        (mul_mod(x2, x, p) + mul_mod(self.a, x, p) + self.b) % p
    }

    /// `4a^3 + 27b^2` in `F_p`.
    pub fn discriminant_part(&self) -> u64 {
        discriminant_part(self.p, self.a, self.b)
    }

    /// The curve `y^2 = x^3 + ac^2 x + bc^3`; a quadratic twist when `c` is a non-square.
    pub fn scaled(&self, c: u64) -> Result<CurveSpec, CurveError> {
        let p = self.p;
        let c2 = mul_mod(c, c, p);
        let c3 = mul_mod(c2, c, p);
        parse_curve(p as i64, mul_mod(self.a, c2, p) as i64, mul_mod(self.b, c3, p) as i64)
    }
}

fn discriminant_part(p: u64, a: u64, b: u64) -> u64 {
    let a3 = mul_mod(mul_mod(a, a, p), a, p);
    (mul_mod(4, a3, p) + mul_mod(27, mul_mod(b, b, p), p)) % p
}

pub fn parse_curve(p: i64, a: i64, b: i64) -> Result<CurveSpec, CurveError> {
    if p <= 3 {
        return Err(if p >= 2 && is_prime(p as u64) {
            CurveError::SmallCharacteristic(p)
        } else {
            CurveError::NotPrime(p)
        });
    }
    let pu = p as u64;
    if !is_prime(pu) {
        return Err(CurveError::NotPrime(p));
    }
    let (a, b) = (reduce(a, pu), reduce(b, pu));
    if discriminant_part(pu, a, b) == 0 {
        return Err(CurveError::SingularCurve { p: pu, a, b });
    }
    Ok(CurveSpec { p: pu, a, b })
}

/// `#E(F_p)`, including the point at infinity.
pub fn count_points(curve: &CurveSpec) -> Result<u64, CurveError> {
    let p = curve.p;
    if p > MAX_COUNT_PRIME {
        return Err(CurveError::FieldTooLarge(p));
    }
    let affine: i64 = (0..p).map(|x| 1 + legendre(curve.rhs(x), p)).sum();
    Ok(1 + affine as u64)
}

/// `j = 1728 · 4a^3 / (4a^3 + 27b^2)` in `F_p`.
pub fn j_invariant(curve: &CurveSpec) -> u64 {
    let p = curve.p;
    let four_a3 = mul_mod(4, mul_mod(mul_mod(curve.a, curve.a, p), curve.a, p), p);
    mul_mod(mul_mod(1728 % p, four_a3, p), inv_mod(curve.discriminant_part(), p), p)
}

/// Order of `Aut(E)` over the algebraic closure, `p > 3`.
pub fn aut_order_geometric(j: u64, p: u64) -> u64 {
    if j == 0 {
        6
    } else if j == 1728 % p {
        4
    } else {
        2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveAnalysis {
    pub point_count: u64,
    pub trace: i64,
    pub p_rank: u8,
    pub ordinary: bool,
    pub j: u64,
    pub aut_order_geometric: u64,
    /// Automorphisms defined over `F_p` itself: `gcd(aut_order_geometric, p - 1)`.
    pub aut_order_rational: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn analyze(curve: &CurveSpec) -> Result<CurveAnalysis, CurveError> {
    let p = curve.p;
    let point_count = count_points(curve)?;
    let trace = p as i64 + 1 - point_count as i64;
    let ordinary = trace.rem_euclid(p as i64) != 0;
    let j = j_invariant(curve);
    let aut = aut_order_geometric(j, p);
    Ok(CurveAnalysis {
        point_count,
        trace,
        p_rank: ordinary as u8,
        ordinary,
        j,
        aut_order_geometric: aut,
        aut_order_rational: gcd(aut, p - 1),
    })
}

/// Derived equivalence of `E` and `F`, decided by isomorphism over the
/// algebraic closure, i.e. equality of j-invariants. Twists over `F_p` are
/// not told apart.
pub fn derived_equivalent(e: &CurveSpec, f: &CurveSpec) -> Result<bool, CurveError> {
    if e.p != f.p {
        return Err(CurveError::MixedCharacteristic(e.p, f.p));
    }
    Ok(j_invariant(e) == j_invariant(f))
}

/// Isomorphism over `F_p` itself: some `u ∈ F_p^*` has `a' = u^4 a` and
/// `b' = u^6 b`. Curves over different fields are never isomorphic.
pub fn isomorphic_over_base_field(e: &CurveSpec, f: &CurveSpec) -> bool {
    let p = e.p;
    if p != f.p {
        return false;
    }
    (1..p).any(|u| {
        let u2 = mul_mod(u, u, p);
        let u4 = mul_mod(u2, u2, p);
        let u6 = mul_mod(u4, u2, p);
        mul_mod(u4, e.a, p) == f.a && mul_mod(u6, e.b, p) == f.b
    })
}

/// p-rank of `E_1 × ... × E_n`, the sum of the factors' p-ranks.
pub fn product_p_rank(curves: &[CurveSpec]) -> Result<u32, CurveError> {
    let first = curves.first().ok_or(CurveError::EmptyList)?;
    if let Some(other) = curves.iter().find(|c| c.p != first.p) {
        return Err(CurveError::MixedCharacteristic(first.p, other.p));
    }
    curves.iter().map(|c| analyze(c).map(|a| a.p_rank as u32)).sum()
}

/// `|t| <= 2 sqrt(p)`, checked in integers as `t^2 <= 4p`.
pub fn within_hasse_bound(trace: i64, p: u64) -> bool {
    (trace as i128).pow(2) <= 4 * p as i128
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(p: i64, a: i64, b: i64) -> CurveSpec {
        parse_curve(p, a, b).unwrap()
    }

    #[test]
    fn parse_errors() {
        assert!(parse_curve(5, 1, 0).is_ok());
        assert_eq!(
            parse_curve(5, 0, 0),
            Err(CurveError::SingularCurve { p: 5, a: 0, b: 0 })
        );
        assert_eq!(parse_curve(2, 1, 1), Err(CurveError::SmallCharacteristic(2)));
        assert_eq!(parse_curve(3, 1, 1), Err(CurveError::SmallCharacteristic(3)));
        assert_eq!(parse_curve(9, 1, 1), Err(CurveError::NotPrime(9)));
        assert_eq!(parse_curve(1, 1, 1), Err(CurveError::NotPrime(1)));
        assert_eq!(parse_curve(-7, 1, 1), Err(CurveError::NotPrime(-7)));
        // a = -3, b = 2: 4(-27) + 27*4 = 0
        assert!(matches!(parse_curve(7, -3, 2), Err(CurveError::SingularCurve { .. })));
    }

    #[test]
    fn coefficients_are_reduced() {
        let c = curve(7, -1, 15);
        assert_eq!((c.a(), c.b()), (6, 1));
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_points(&curve(5, 1, 0)), Ok(4));
        assert_eq!(count_points(&curve(7, 1, 0)), Ok(8));
    }

    #[test]
    fn field_cap() {
        let big = curve(1_000_003, 1, 1);
        assert_eq!(count_points(&big), Err(CurveError::FieldTooLarge(1_000_003)));
    }

    #[test]
    fn analysis_examples() {
        let a5 = analyze(&curve(5, 1, 0)).unwrap();
        assert_eq!(
            (a5.trace, a5.ordinary, a5.p_rank, a5.j, a5.aut_order_geometric),
            (2, true, 1, 1728 % 5, 4)
        );
        assert_eq!(a5.aut_order_rational, 4);
        let a7 = analyze(&curve(7, 1, 0)).unwrap();
        assert_eq!((a7.trace, a7.ordinary, a7.p_rank, a7.j), (0, false, 0, 1728 % 7));
        assert_eq!(a7.aut_order_rational, 2);
        let j0 = analyze(&curve(7, 0, 1)).unwrap();
        assert_eq!((j0.j, j0.aut_order_geometric, j0.aut_order_rational), (0, 6, 6));
    }

    #[test]
    fn b_zero_gives_1728() {
        for (p, a) in [(11, 1), (13, 5), (101, 7)] {
            assert_eq!(j_invariant(&curve(p, a, 0)), 1728 % p as u64);
        }
    }

    #[test]
    fn derived_equivalence_examples() {
        let e = curve(5, 1, 0);
        assert_eq!(derived_equivalent(&e, &curve(5, 4, 0)), Ok(true));
        assert_eq!(derived_equivalent(&e, &e), Ok(true));
        assert_eq!(derived_equivalent(&e, &curve(5, 0, 1)), Ok(false));
        assert_eq!(
            derived_equivalent(&e, &curve(7, 1, 0)),
            Err(CurveError::MixedCharacteristic(5, 7))
        );
    }

    #[test]
    fn twists_are_not_isomorphic_over_the_base() {
        // 2 is a non-square mod 5, so y^2 = x^3 + 4x is the quadratic twist of y^2 = x^3 + x
        let e = curve(5, 1, 0);
        let twist = e.scaled(2).unwrap();
        assert_eq!(twist.a(), 4);
        assert!(derived_equivalent(&e, &twist).unwrap());
        assert!(!isomorphic_over_base_field(&e, &twist));
        assert!(isomorphic_over_base_field(&e, &e));
    }

    #[test]
    fn product_rank() {
        let ord = curve(5, 1, 0);
        let ss = curve(5, 0, 1);
        assert_eq!(analyze(&ss).unwrap().p_rank, 0);
        assert_eq!(product_p_rank(&[ord, ss]), Ok(1));
        assert_eq!(product_p_rank(&[]), Err(CurveError::EmptyList));
        assert_eq!(product_p_rank(&[ord]), Ok(1));
        assert_eq!(
            product_p_rank(&[ord, curve(7, 1, 0)]),
            Err(CurveError::MixedCharacteristic(5, 7))
        );
    }

    #[test]
    fn legendre_matches_squares() {
        let p = 23;
        let squares: Vec<u64> = (1..p).map(|y| y * y % p).collect();
        for v in 1..p {
            assert_eq!(legendre(v, p) == 1, squares.contains(&v));
        }
    }
}
