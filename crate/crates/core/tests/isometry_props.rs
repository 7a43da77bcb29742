use avlift::isometry::{enumerate_isometric, hat, is_isometric, multiply, tilde, EndMatrix, EndRing, OrderElement};
use proptest::prelude::*;

fn rings() -> Vec<EndRing> {
    vec![
        EndRing::Integers,
        EndRing::gaussian(),
        EndRing::quadratic(1, 1).unwrap(),
        EndRing::quadratic(1, 2).unwrap(),
        EndRing::quadratic(0, 5).unwrap(),
    ]
}

fn arb_matrix(ring: EndRing, h: i64) -> impl Strategy<Value = EndMatrix> {
    let coords = 4 * ring.coords() as usize;
    prop::collection::vec(-h..=h, coords).prop_map(move |c| {
        let e: Vec<OrderElement> = match ring {
            EndRing::Integers => c.iter().map(|&u| OrderElement::int(u)).collect(),
            _ => c.chunks(2).map(|x| OrderElement { u: x[0], v: x[1] }).collect(),
        };
        EndMatrix::new(ring, [e[0], e[1], e[2], e[3]]).unwrap()
    })
}

fn arb_ring_pair() -> impl Strategy<Value = (EndMatrix, EndMatrix)> {
    prop::sample::select(rings()).prop_flat_map(|r| (arb_matrix(r, 5), arb_matrix(r, 5)))
}

proptest! {
    #[test]
    fn tilde_and_hat_are_involutions((f, _) in arb_ring_pair()) {
        prop_assert_eq!(tilde(&tilde(&f)), f);
        prop_assert_eq!(hat(&hat(&f)), f);
    }

    #[test]
    fn tilde_reverses_products((f, g) in arb_ring_pair()) {
        let fg = multiply(&f, &g).unwrap();
        prop_assert_eq!(tilde(&fg), multiply(&tilde(&g), &tilde(&f)).unwrap());
    }

    #[test]
    fn hat_reverses_products((f, g) in arb_ring_pair()) {
        // hat is tilde up to the sign change on the off-diagonal
        let fg = multiply(&f, &g).unwrap();
        prop_assert_eq!(hat(&fg), multiply(&hat(&g), &hat(&f)).unwrap());
    }

    #[test]
    fn integer_isometry_is_det_one(f in arb_matrix(EndRing::Integers, 5)) {
        let det = f.a.u * f.d.u - f.b.u * f.c.u;
        prop_assert_eq!(is_isometric(&f), det == 1);
    }
}

#[test]
fn integer_isometry_is_det_one_exhaustive() {
    for h in 0..=2i64 {
        let mut count = 0;
        for a in -h..=h {
            for b in -h..=h {
                for c in -h..=h {
                    for d in -h..=h {
                        let f = EndMatrix::integer(a, b, c, d);
                        assert_eq!(is_isometric(&f), a * d - b * c == 1, "{f}");
                        count += (a * d - b * c == 1) as usize;
                    }
                }
            }
        }
        assert_eq!(enumerate_isometric(EndRing::Integers, h as u32).unwrap().len(), count);
    }
}

#[test]
fn enumerated_sets_are_closed() {
    for ring in [
        EndRing::Integers,
        EndRing::gaussian(),
        EndRing::quadratic(1, 1).unwrap(),
    ] {
        let list = enumerate_isometric(ring, 1).unwrap();
        assert!(!list.is_empty());
        for f in &list {
            assert!(f.height() <= 1);
            let t = tilde(f);
            assert!(is_isometric(&t));
            assert_eq!(multiply(f, &t).unwrap(), EndMatrix::identity(ring));
            assert!(list.contains(&t));
            for g in &list {
                assert!(is_isometric(&multiply(f, g).unwrap()), "{f} * {g}");
            }
        }
    }
}

#[test]
fn gaussian_enumeration_is_exactly_the_isometric_matrices() {
    // independent membership check over all 3^8 candidates
    let ring = EndRing::gaussian();
    let list = enumerate_isometric(ring, 1).unwrap();
    let mut expected = Vec::new();
    for code in 0..3usize.pow(8) {
        let c: Vec<i64> = (0..8).map(|i| (code / 3usize.pow(7 - i) % 3) as i64 - 1).collect();
        let e: Vec<OrderElement> = c.chunks(2).map(|x| OrderElement { u: x[0], v: x[1] }).collect();
        let f = EndMatrix::new(ring, [e[0], e[1], e[2], e[3]]).unwrap();
        // over Z[i]: tilde(f) f = 1 with tilde built by hand
        let conj = |x: OrderElement| OrderElement { u: x.u, v: -x.v };
        let neg = |x: OrderElement| OrderElement { u: -x.u, v: -x.v };
        let t = EndMatrix::new(ring, [conj(f.d), neg(conj(f.b)), neg(conj(f.c)), conj(f.a)]).unwrap();
        if multiply(&t, &f).unwrap() == EndMatrix::identity(ring)
            && multiply(&f, &t).unwrap() == EndMatrix::identity(ring)
        {
            expected.push(f);
        }
    }
    assert_eq!(list, expected);
}
