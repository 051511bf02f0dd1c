//! Builders and proptest strategies shared by unit tests.

use proptest::prelude::*;

use crate::halfint::HalfInt;
use crate::model::{MultiSegment, RhoClass, Segment, SelfDuality};

pub fn triv() -> RhoClass {
    RhoClass::trivial()
}

pub fn sigma() -> RhoClass {
    RhoClass::non_self_dual("sigma", "sigma_dual", 1).unwrap()
}

pub fn symp2() -> RhoClass {
    RhoClass::self_dual("tau", 2, SelfDuality::Symplectic).unwrap()
}

/// `[b, e]` with integer endpoints.
pub fn seg(rho: &RhoClass, b: i64, e: i64) -> Segment {
    Segment::new(rho.clone(), HalfInt::from_int(b), HalfInt::from_int(e)).unwrap()
}

/// `[b2/2, e2/2]`.
pub fn seg2(rho: &RhoClass, b2: i64, e2: i64) -> Segment {
    Segment::from_twice(rho, b2, e2).unwrap()
}

pub fn ms(segs: &[Segment]) -> MultiSegment {
    segs.iter().cloned().collect()
}

/// `{[0,1],[-1,0],[0,0]x2}` over the trivial class.
pub fn phi_upper_1() -> MultiSegment {
    let t = triv();
    ms(&[seg(&t, 0, 1), seg(&t, -1, 0), seg(&t, 0, 0), seg(&t, 0, 0)])
}

/// `{[1,1],[-1,-1],[0,0]x4}` over the trivial class.
pub fn phi_upper_4() -> MultiSegment {
    let t = triv();
    let mut m = ms(&[seg(&t, 1, 1), seg(&t, -1, -1)]);
    m.insert(seg(&t, 0, 0), 4);
    m
}

pub fn arb_rho() -> impl Strategy<Value = RhoClass> {
    prop_oneof![Just(triv()), Just(sigma()), Just(sigma().dual()), Just(symp2())]
}

pub fn arb_segment() -> impl Strategy<Value = Segment> {
    (arb_rho(), -6i64..6, 0i64..4).prop_map(|(r, b2, len)| seg2(&r, b2, b2 + 2 * len))
}

pub fn arb_multisegment(max: usize) -> impl Strategy<Value = MultiSegment> {
    proptest::collection::vec(arb_segment(), 0..=max).prop_map(|v| v.into_iter().collect())
}

/// Single trivial-class line on the integer grid.
pub fn arb_line(max: usize) -> impl Strategy<Value = MultiSegment> {
    proptest::collection::vec((-3i64..3, 0i64..3), 1..=max)
        .prop_map(|v| v.into_iter().map(|(b, l)| seg(&triv(), b, b + l)).collect())
}
