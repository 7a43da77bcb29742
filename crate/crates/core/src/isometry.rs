//! Block matrices of endomorphisms of `A × Â` and the isometry condition.
//!
//! `End(A)` is modeled by `Z` or an imaginary quadratic order `Z[ω]`, with
//! complex conjugation standing in for the dual isogeny `φ ↦ φ̂`. A morphism
//! of `A × Â` is a matrix `(a b; c d)`; it is isometric when
//! `f̃ = (d̂ -b̂; -ĉ â)` is its inverse.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ec_arith::{count_points, CurveError, CurveSpec};

/// Largest number of matrices [`enumerate_isometric`] will visit.
pub const ENUMERATION_LIMIT: u128 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsometryError {
    #[error("order Z[w] with w^2 + {b}w + {c} = 0 is not imaginary (discriminant {disc} >= 0)")]
    NotImaginary { b: i64, c: i64, disc: i128 },
    #[error("matrices over different rings ({0} and {1})")]
    RingMismatch(EndRing, EndRing),
    #[error("element has a nonzero w-coordinate but the ring is Z")]
    NotAnInteger,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("enumeration would visit {size} matrices (limit {limit})")]
    SearchSpaceTooLarge { size: u128, limit: u128 },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EndRing {
    Integers,
    /// `Z[ω]` with `ω^2 + bω + c = 0`.
    QuadraticOrder {
        b: i64,
        c: i64,
    },
}

impl EndRing {
    pub fn quadratic(b: i64, c: i64) -> Result<Self, IsometryError> {
        let disc = (b as i128).pow(2) - 4 * c as i128;
        if disc >= 0 {
            return Err(IsometryError::NotImaginary { b, c, disc });
        }
        Ok(EndRing::QuadraticOrder { b, c })
    }

    /// `Z[i]`.
    pub fn gaussian() -> Self {
        EndRing::QuadraticOrder { b: 0, c: 1 }
    }

    /// Integer coordinates per element: 1 for `Z`, 2 for an order.
    pub fn coords(self) -> u32 {
        match self {
            EndRing::Integers => 1,
            EndRing::QuadraticOrder { .. } => 2,
        }
    }

    fn params(self) -> (i128, i128) {
        match self {
            EndRing::Integers => (0, 0),
            EndRing::QuadraticOrder { b, c } => (b as i128, c as i128),
        }
    }

    pub fn element(self, u: i64, v: i64) -> Result<OrderElement, IsometryError> {
        if self == EndRing::Integers && v != 0 {
            return Err(IsometryError::NotAnInteger);
        }
        Ok(OrderElement { u, v })
    }

    /// `ū = u - bv`, `v̄ = -v`, from `ω̄ = -b - ω`.
    ///
    /// Panics if `u - bv` does not fit in an `i64`.
    pub fn conj(self, x: OrderElement) -> OrderElement {
        let (b, _) = self.params();
        OrderElement {
            u: narrow(x.u as i128 - b * x.v as i128).expect("conjugate out of range"),
            v: -x.v,
        }
    }

    pub fn add(self, x: OrderElement, y: OrderElement) -> Result<OrderElement, IsometryError> {
        Ok(OrderElement {
            u: x.u.checked_add(y.u).ok_or(IsometryError::Overflow)?,
            v: x.v.checked_add(y.v).ok_or(IsometryError::Overflow)?,
        })
    }

    /// `(u1 + v1ω)(u2 + v2ω) = (u1u2 - c v1v2) + (u1v2 + v1u2 - b v1v2)ω`.
    pub fn mul(self, x: OrderElement, y: OrderElement) -> Result<OrderElement, IsometryError> {
        let (b, c) = self.params();
        let (u1, v1, u2, v2) = (x.u as i128, x.v as i128, y.u as i128, y.v as i128);
        let vv = v1.checked_mul(v2).ok_or(IsometryError::Overflow)?;
        let u = u1 * u2 - c.checked_mul(vv).ok_or(IsometryError::Overflow)?;
        let v = (u1 * v2 + v1 * u2).checked_sub(b.checked_mul(vv).ok_or(IsometryError::Overflow)?);
        Ok(OrderElement {
            u: narrow(u).ok_or(IsometryError::Overflow)?,
            v: v.and_then(narrow).ok_or(IsometryError::Overflow)?,
        })
    }

    /// `x · x̄ = u^2 - b uv + c v^2`.
    pub fn norm(self, x: OrderElement) -> i128 {
        let (b, c) = self.params();
        let (u, v) = (x.u as i128, x.v as i128);
        u * u - b * u * v + c * v * v
    }
}

impl fmt::Display for EndRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndRing::Integers => f.write_str("Z"),
            EndRing::QuadraticOrder { b, c } => write!(f, "Z[w], w^2 + {b}w + {c} = 0"),
        }
    }
}

fn narrow(x: i128) -> Option<i64> {
    i64::try_from(x).ok()
}

/// `u + vω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct OrderElement {
    pub u: i64,
    pub v: i64,
}

impl OrderElement {
    pub const ZERO: OrderElement = OrderElement { u: 0, v: 0 };
    pub const ONE: OrderElement = OrderElement { u: 1, v: 0 };

    pub fn int(u: i64) -> Self {
        OrderElement { u, v: 0 }
    }

    fn neg(self) -> Self {
        OrderElement { u: -self.u, v: -self.v }
    }

    fn height(self) -> u64 {
        self.u.unsigned_abs().max(self.v.unsigned_abs())
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |v: i64| match v.unsigned_abs() {
            1 => "w".to_string(),
            n => format!("{n}w"),
        };
        match (self.u, self.v) {
            (u, 0) => write!(f, "{u}"),
            (0, v) if v < 0 => write!(f, "-{}", w(v)),
            (0, v) => write!(f, "{}", w(v)),
            (u, v) if v < 0 => write!(f, "{u}-{}", w(v)),
            (u, v) => write!(f, "{u}+{}", w(v)),
        }
    }
}

/// `(a b; c d)` with `a: A → A`, `b: Â → A`, `c: A → Â`, `d: Â → Â`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct EndMatrix {
    pub ring: EndRing,
    pub a: OrderElement,
    pub b: OrderElement,
    pub c: OrderElement,
    pub d: OrderElement,
}

impl EndMatrix {
    pub fn new(ring: EndRing, entries: [OrderElement; 4]) -> Result<Self, IsometryError> {
        if ring == EndRing::Integers && entries.iter().any(|e| e.v != 0) {
            return Err(IsometryError::NotAnInteger);
        }
        let [a, b, c, d] = entries;
        Ok(EndMatrix { ring, a, b, c, d })
    }

    pub fn integer(a: i64, b: i64, c: i64, d: i64) -> Self {
        EndMatrix {
            ring: EndRing::Integers,
            a: OrderElement::int(a),
            b: OrderElement::int(b),
            c: OrderElement::int(c),
            d: OrderElement::int(d),
        }
    }

    pub fn identity(ring: EndRing) -> Self {
        let (o, z) = (OrderElement::ONE, OrderElement::ZERO);
        EndMatrix {
            ring,
            a: o,
            b: z,
            c: z,
            d: o,
        }
    }

    pub fn entries(&self) -> [OrderElement; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Largest absolute value among all integer coordinates.
    pub fn height(&self) -> u64 {
        self.entries().iter().map(|e| e.height()).max().unwrap_or(0)
    }

    /// `ad - bc`; only meaningful as the determinant over a commutative ring.
    pub fn det(&self) -> Result<OrderElement, IsometryError> {
        let r = self.ring;
        let ad = r.mul(self.a, self.d)?;
        let bc = r.mul(self.b, self.c)?;
        r.add(ad, bc.neg())
    }
}

impl fmt::Display for EndMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// `f̂ = (d̂ b̂; ĉ â)`.
pub fn hat(f: &EndMatrix) -> EndMatrix {
    let r = f.ring;
    EndMatrix {
        ring: r,
        a: r.conj(f.d),
        b: r.conj(f.b),
        c: r.conj(f.c),
        d: r.conj(f.a),
    }
}

/// `f̃ = (d̂ -b̂; -ĉ â)`.
pub fn tilde(f: &EndMatrix) -> EndMatrix {
    let r = f.ring;
    EndMatrix {
        ring: r,
        a: r.conj(f.d),
        b: r.conj(f.b).neg(),
        c: r.conj(f.c).neg(),
        d: r.conj(f.a),
    }
}

pub fn multiply(f: &EndMatrix, g: &EndMatrix) -> Result<EndMatrix, IsometryError> {
    if f.ring != g.ring {
        return Err(IsometryError::RingMismatch(f.ring, g.ring));
    }
    let r = f.ring;
    let dot = |x1, y1, x2, y2| -> Result<OrderElement, IsometryError> { r.add(r.mul(x1, y1)?, r.mul(x2, y2)?) };
    Ok(EndMatrix {
        ring: r,
        a: dot(f.a, g.a, f.b, g.c)?,
        b: dot(f.a, g.b, f.b, g.d)?,
        c: dot(f.c, g.a, f.d, g.c)?,
        d: dot(f.c, g.b, f.d, g.d)?,
    })
}

/// `f̃ · f = 1` and `f · f̃ = 1`. A product that overflows `i64` is not the
/// identity, so overflow counts as "not isometric".
pub fn is_isometric(f: &EndMatrix) -> bool {
    let t = tilde(f);
    let id = EndMatrix::identity(f.ring);
    matches!(multiply(&t, f), Ok(m) if m == id) && matches!(multiply(f, &t), Ok(m) if m == id)
}

/// Number of matrices with all coordinates in `[-height, height]`.
pub fn enumeration_size(ring: EndRing, height: u32) -> u128 {
    (2 * height as u128 + 1).saturating_pow(4 * ring.coords())
}

/// Every isometric matrix of height at most `height`, in lexicographic order
/// of the coordinate tuple `(a.u, a.v, b.u, b.v, c.u, c.v, d.u, d.v)`.
pub fn enumerate_isometric(ring: EndRing, height: u32) -> Result<Vec<EndMatrix>, IsometryError> {
    let size = enumeration_size(ring, height);
    if size > ENUMERATION_LIMIT {
        return Err(IsometryError::SearchSpaceTooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    let h = height as i64;
    let values: Vec<OrderElement> = match ring {
        EndRing::Integers => (-h..=h).map(OrderElement::int).collect(),
        EndRing::QuadraticOrder { .. } => (-h..=h)
            .flat_map(|u| (-h..=h).map(move |v| OrderElement { u, v }))
            .collect(),
    };
    let mut out = Vec::new();
    for &a in &values {
        for &b in &values {
            for &c in &values {
                for &d in &values {
                    let f = EndMatrix { ring, a, b, c, d };
                    if is_isometric(&f) {
                        out.push(f);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Counting data for the kernel `Z ⊕ (A × Â)(k)` of `Aut D^b(A) → U(A × Â)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AutoequivKernelReport {
    /// Shifts.
    pub free_rank: u32,
    /// `#E(F_p) · #Ê(F_p)`; `Ê ≅ E` for an elliptic curve.
    pub finite_order: u128,
    pub point_count: u64,
}

pub fn kernel_report(curve: &CurveSpec) -> Result<AutoequivKernelReport, IsometryError> {
    let n = count_points(curve)?;
    Ok(AutoequivKernelReport {
        free_rank: 1,
        finite_order: (n as u128).pow(2),
        point_count: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec_arith::parse_curve;

    fn gi(u: i64, v: i64) -> OrderElement {
        OrderElement { u, v }
    }

    fn diag(ring: EndRing, x: OrderElement) -> EndMatrix {
        EndMatrix {
            ring,
            a: x,
            b: OrderElement::ZERO,
            c: OrderElement::ZERO,
            d: x,
        }
    }

    #[test]
    fn ring_validation() {
        assert!(EndRing::quadratic(0, 1).is_ok());
        assert!(EndRing::quadratic(1, 1).is_ok());
        assert!(matches!(
            EndRing::quadratic(2, 1),
            Err(IsometryError::NotImaginary { disc: 0, .. })
        ));
        assert!(matches!(
            EndRing::quadratic(0, -2),
            Err(IsometryError::NotImaginary { .. })
        ));
        assert_eq!(EndRing::Integers.element(1, 1), Err(IsometryError::NotAnInteger));
    }

    #[test]
    fn gaussian_arithmetic() {
        let r = EndRing::gaussian();
        assert_eq!(r.mul(gi(0, 1), gi(0, 1)), Ok(gi(-1, 0)));
        assert_eq!(r.conj(gi(2, 3)), gi(2, -3));
        assert_eq!(r.norm(gi(2, 3)), 13);
    }

    #[test]
    fn eisenstein_arithmetic() {
        // ω^2 + ω + 1 = 0, a primitive cube root of unity
        let r = EndRing::quadratic(1, 1).unwrap();
        let w = gi(0, 1);
        let w2 = r.mul(w, w).unwrap();
        assert_eq!(w2, gi(-1, -1));
        assert_eq!(r.mul(w2, w), Ok(OrderElement::ONE));
        assert_eq!(r.conj(w), w2);
        assert_eq!(r.norm(w), 1);
        assert_eq!(r.conj(r.conj(gi(5, -7))), gi(5, -7));
    }

    #[test]
    fn hat_examples() {
        let z = EndRing::Integers;
        assert_eq!(hat(&EndMatrix::identity(z)), EndMatrix::identity(z));
        assert_eq!(hat(&EndMatrix::integer(1, 2, 3, 4)), EndMatrix::integer(4, 2, 3, 1));
        let r = EndRing::gaussian();
        assert_eq!(hat(&diag(r, gi(0, 1))), diag(r, gi(0, -1)));
    }

    #[test]
    fn tilde_examples() {
        let z = EndRing::Integers;
        assert_eq!(tilde(&EndMatrix::identity(z)), EndMatrix::identity(z));
        assert_eq!(tilde(&EndMatrix::integer(1, 1, 0, 1)), EndMatrix::integer(1, -1, 0, 1));
        assert_eq!(tilde(&EndMatrix::integer(2, 0, 0, 1)), EndMatrix::integer(1, 0, 0, 2));
    }

    #[test]
    fn multiply_examples() {
        let f = EndMatrix::integer(3, -1, 4, 2);
        assert_eq!(multiply(&f, &EndMatrix::identity(EndRing::Integers)), Ok(f));
        assert_eq!(
            multiply(&EndMatrix::integer(1, 1, 0, 1), &EndMatrix::integer(1, 0, 1, 1)),
            Ok(EndMatrix::integer(2, 1, 1, 1))
        );
        let r = EndRing::gaussian();
        assert_eq!(multiply(&diag(r, gi(0, 1)), &diag(r, gi(0, 1))), Ok(diag(r, gi(-1, 0))));
        assert!(matches!(
            multiply(&f, &EndMatrix::identity(r)),
            Err(IsometryError::RingMismatch(EndRing::Integers, _))
        ));
    }

    #[test]
    fn multiply_overflow_is_reported() {
        let big = EndMatrix::integer(i64::MAX, 0, 0, 1);
        assert_eq!(multiply(&big, &big), Err(IsometryError::Overflow));
        assert!(!is_isometric(&big));
    }

    #[test]
    fn isometric_examples() {
        assert!(is_isometric(&EndMatrix::identity(EndRing::Integers)));
        assert!(is_isometric(&EndMatrix::integer(1, 1, 0, 1)));
        assert!(!is_isometric(&EndMatrix::integer(2, 0, 0, 1)));
        assert!(is_isometric(&diag(EndRing::gaussian(), gi(0, 1))));
    }

    #[test]
    fn enumeration_edges() {
        assert!(enumerate_isometric(EndRing::Integers, 0).unwrap().is_empty());
        assert!(matches!(
            enumerate_isometric(EndRing::gaussian(), 5),
            Err(IsometryError::SearchSpaceTooLarge { .. })
        ));
        let list = enumerate_isometric(EndRing::Integers, 1).unwrap();
        assert!(list.windows(2).all(|w| {
            let key = |m: &EndMatrix| m.entries().map(|e| (e.u, e.v));
            key(&w[0]) < key(&w[1])
        }));
    }

    #[test]
    fn kernel_examples() {
        let r5 = kernel_report(&parse_curve(5, 1, 0).unwrap()).unwrap();
        assert_eq!((r5.free_rank, r5.finite_order), (1, 16));
        let r7 = kernel_report(&parse_curve(7, 1, 0).unwrap()).unwrap();
        assert_eq!(r7.finite_order, 64);
        let big = parse_curve(1_000_003, 1, 1).unwrap();
        assert!(matches!(
            kernel_report(&big),
            Err(IsometryError::Curve(CurveError::FieldTooLarge(_)))
        ));
    }
}
