//! Small infinitesimal parameters, with mixed line types, used by the
//! self-test and the acceptance suite.

use crate::halfint::HalfInt;
use crate::model::{GroupType, InfinitesimalParameter, MultiSegment, RhoClass, Segment, SelfDuality};

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub name: String,
    /// Line types present: "gl", "good", "bad", "nonselfdual".
    pub tags: Vec<&'static str>,
    pub group: GroupType,
    pub lambda: InfinitesimalParameter,
}

fn sigma() -> RhoClass {
    RhoClass::non_self_dual("sigma", "sigma_dual", 1).expect("distinct labels")
}

fn tau() -> RhoClass {
    RhoClass::self_dual("tau", 2, SelfDuality::Symplectic).expect("valid class")
}

/// Segments `[b2/2, e2/2]`, each with multiplicity one.
fn segs(rho: &RhoClass, twice: &[(i64, i64)]) -> MultiSegment {
    twice.iter().map(|&(b, e)| Segment::from_twice(rho, b, e).expect("b ≤ e")).collect()
}

fn entry(name: &str, tags: &[&'static str], group: GroupType, parts: &[MultiSegment]) -> CatalogEntry {
    let mut m = MultiSegment::new();
    for p in parts {
        m.extend_from(p);
    }
    CatalogEntry { name: name.to_string(), tags: tags.to_vec(), group, lambda: m.infinitesimal() }
}

/// `m_0 = ∪_{i=0}^{r} {[d−i], [i−d]}` on the trivial class.
pub fn bad_open_m0(d: HalfInt, r: usize) -> MultiSegment {
    let t = RhoClass::trivial();
    let mut m = MultiSegment::new();
    for i in 0..=r as i64 {
        for a in [d.shift(-i), -d.shift(-i)] {
            m.insert(Segment::new(t.clone(), a, a).expect("point"), 1);
        }
    }
    m
}

/// Group on whose bad-parity trivial line `m_0` lives: `SO_{2r+3}` for integral
/// `d`, `O_{2r+2}` otherwise.
pub fn bad_open_group(d: HalfInt, r: usize) -> GroupType {
    if d.is_integer() {
        GroupType::so_odd(r as u32 + 1)
    } else {
        GroupType::o_even(r as u32 + 1)
    }
}

/// `(d, r)` with `2d ∈ {1,2,3,4}` and `0 ≤ r ≤ 2d`.
pub fn bad_open_grid() -> Vec<(HalfInt, usize)> {
    (1..=4).flat_map(|d2| (0..=d2 as usize).map(move |r| (HalfInt::from_twice(d2), r))).collect()
}

pub fn catalog() -> Vec<CatalogEntry> {
    let t = RhoClass::trivial();
    let s = sigma();
    let sd = s.dual();
    let tau = tau();
    let phi1 = segs(&t, &[(0, 2), (-2, 0), (0, 0), (0, 0)]);
    let mut out = vec![
        entry("gl6-five-orbits", &["gl"], GroupType::gl(6), std::slice::from_ref(&phi1)),
        entry("gl3-string", &["gl"], GroupType::gl(3), &[segs(&t, &[(0, 4)])]),
        entry("gl4-half", &["gl"], GroupType::gl(4), &[segs(&t, &[(-3, 3)])]),
        entry("gl4-doubled", &["gl"], GroupType::gl(4), &[segs(&t, &[(0, 2), (0, 2)])]),
        entry("gl5-mixed", &["gl"], GroupType::gl(5), &[segs(&t, &[(-2, 4), (0, 0)])]),
        entry("gl3-two-classes", &["gl"], GroupType::gl(3), &[segs(&s, &[(0, 2)]), segs(&t, &[(0, 0)])]),
        entry("gl6-two-grids", &["gl"], GroupType::gl(6), &[segs(&t, &[(0, 4), (-1, 3)])]),
        entry("so7-bad-example", &["bad"], GroupType::so_odd(3), std::slice::from_ref(&phi1)),
        entry("so5-good-half", &["good"], GroupType::so_odd(2), &[segs(&t, &[(-3, 3)])]),
        entry("so5-good-half-doubled", &["good"], GroupType::so_odd(2), &[segs(&t, &[(-1, 1), (-1, 1)])]),
        entry("so7-good-and-bad", &["good", "bad"], GroupType::so_odd(3), &[segs(&t, &[(-1, 1), (-2, 2), (0, 0)])]),
        entry("so5-nonselfdual", &["nonselfdual"], GroupType::so_odd(2), &[segs(&s, &[(0, 2)]), segs(&sd, &[(-2, 0)])]),
        entry("so9-bad-and-good", &["good", "bad"], GroupType::so_odd(4), &[phi1.clone(), segs(&t, &[(-1, 1)])]),
        entry("so7-bad-wide", &["bad"], GroupType::so_odd(3), &[segs(&t, &[(-4, -2), (2, 4), (0, 0), (0, 0)])]),
        entry("sp4-good", &["good"], GroupType::sp(2), &[segs(&t, &[(-4, 4)])]),
        entry("sp4-good-and-bad", &["good", "bad"], GroupType::sp(2), &[segs(&t, &[(0, 0), (-1, 1), (-1, 1)])]),
        entry("sp6-good-and-bad", &["good", "bad"], GroupType::sp(3), &[segs(&t, &[(-2, 2), (-1, 1), (-1, 1)])]),
        entry("sp4-symplectic-class", &["good"], GroupType::sp(2), &[segs(&t, &[(0, 0)]), segs(&tau, &[(-1, 1)])]),
        entry("sp8-good-long", &["good"], GroupType::sp(4), &[segs(&t, &[(-4, 4), (-2, 2), (0, 0)])]),
        entry("sp6-nonselfdual", &["good", "nonselfdual"], GroupType::sp(3), &[segs(&t, &[(-2, 2)]), segs(&s, &[(0, 2)]), segs(&sd, &[(-2, 0)])]),
        entry("o4-good", &["good"], GroupType::o_even(2), &[segs(&t, &[(-2, 2), (0, 0)])]),
        entry("o4-nonselfdual", &["nonselfdual"], GroupType::o_even(2), &[segs(&s, &[(0, 2)]), segs(&sd, &[(-2, 0)])]),
        entry("o6-nonselfdual-and-good", &["good", "nonselfdual"], GroupType::o_even(3), &[segs(&s, &[(0, 0)]), segs(&sd, &[(0, 0)]), segs(&t, &[(-2, 2), (0, 0)])]),
        entry("o6-symplectic-bad", &["good", "bad"], GroupType::o_even(3), &[segs(&tau, &[(0, 0), (0, 0)]), segs(&t, &[(-2, -2), (2, 2)])]),
        entry("o8-bad-and-good", &["good", "bad"], GroupType::o_even(4), &[segs(&t, &[(-3, 3), (-1, 1), (0, 0), (0, 0)])]),
        entry("o6-bad-half", &["bad"], GroupType::o_even(3), &[segs(&t, &[(-3, -1), (1, 3), (-1, -1), (1, 1)])]),
    ];
    for (d, r) in bad_open_grid() {
        out.push(CatalogEntry {
            name: format!("bad-open-d{d}-r{r}"),
            tags: vec!["bad"],
            group: bad_open_group(d, r),
            lambda: bad_open_m0(d, r).infinitesimal(),
        });
    }
    out
}
