//! Exhaustive enumeration of the parameters sharing an infinitesimal parameter,
//! their closure poset, and the involution-on-a-poset lemma.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::duality::pyasetskii_dual;
use crate::error::{CoreError, Result};
use crate::halfint::HalfInt;
use crate::model::{GroupType, InfinitesimalParameter, LParameter, MultiSegment, RhoClass, Segment, Violation};
use crate::rankmat::closure_leq;

pub const DEFAULT_CAP: usize = 12;

/// Exponent multiset of one line.
pub type Support = BTreeMap<HalfInt, usize>;

type Memo = HashMap<(Vec<(HalfInt, usize)>, Option<HalfInt>), Vec<Vec<(HalfInt, HalfInt)>>>;

/// All lists of segments `(b, e)` covering `support` exactly, in canonical order:
/// ends non-increasing, and for equal ends begins non-increasing. `max_b` bounds
/// the begin of the next segment when it ends at the current maximum.
fn cover(support: &Support, max_b: Option<HalfInt>, memo: &mut Memo) -> Vec<Vec<(HalfInt, HalfInt)>> {
    let Some((&d, _)) = support.iter().next_back() else {
        return vec![Vec::new()];
    };
    let key = (support.iter().map(|(&a, &k)| (a, k)).collect(), max_b);
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let mut out = Vec::new();
    // longest segments first
    let mut begins = Vec::new();
    let mut b = d;
    while support.contains_key(&b) {
        begins.push(b);
        b = b.shift(-1);
    }
    for &b in begins.iter().rev() {
        if max_b.is_none_or(|mb| b <= mb) {
            let mut rest = support.clone();
            let mut a = b;
            while a <= d {
                let k = rest.get_mut(&a).expect("present");
                *k -= 1;
                if *k == 0 {
                    rest.remove(&a);
                }
                a = a.shift(1);
            }
            // the next segment ends at d again only if d is still present
            let next_bound = rest.contains_key(&d).then_some(b);
            for mut tail in cover(&rest, next_bound, memo) {
                tail.insert(0, (b, d));
                out.push(tail);
            }
        }
    }
    memo.insert(key, out.clone());
    out
}

fn check_cap(support: &Support, cap: Option<usize>) -> Result<()> {
    let size: usize = support.values().sum();
    match cap {
        Some(cap) if size > cap => Err(CoreError::SupportTooLarge { size, cap }),
        _ => Ok(()),
    }
}

/// Every multi-segment over `rho` whose exponents are exactly `support`.
/// `cap = None` lifts the size limit.
pub fn enum_line(rho: &RhoClass, support: &Support, cap: Option<usize>) -> Result<Vec<MultiSegment>> {
    if support.is_empty() {
        return Err(CoreError::Empty);
    }
    let offset = support.keys().next().expect("nonempty").grid_offset();
    if support.keys().any(|a| a.grid_offset() != offset) {
        return Err(CoreError::MixedLine);
    }
    check_cap(support, cap)?;
    let mut memo = Memo::new();
    Ok(cover(support, None, &mut memo)
        .into_iter()
        .map(|segs| {
            segs.into_iter().map(|(b, e)| Segment::new(rho.clone(), b, e).expect("b ≤ e")).collect()
        })
        .collect())
}

fn product(factors: Vec<Vec<MultiSegment>>) -> Vec<MultiSegment> {
    factors.into_iter().fold(vec![MultiSegment::new()], |acc, options| {
        acc.iter().flat_map(|m| options.iter().map(move |o| m.union(o))).collect()
    })
}

/// `Φ_λ(G)`: every valid parameter for `group` with infinitesimal parameter `lambda`.
pub fn enum_parameters(lambda: &InfinitesimalParameter, group: GroupType, cap: Option<usize>) -> Result<Vec<LParameter>> {
    let found = lambda.total_dim();
    let expected = group.std_dim();
    if found != expected {
        return Err(CoreError::Validation(vec![Violation::DimensionMismatch { expected, found }]));
    }
    if group.is_classical() && lambda.dual() != *lambda {
        return Err(CoreError::InfinitesimalNotSelfDual);
    }
    let mut factors = Vec::new();
    for (key, support) in lambda.gl_lines() {
        let rho = &key.rho;
        if !group.is_classical() || rho.is_self_dual() {
            let mut opts = enum_line(rho, &support, cap)?;
            if group.is_classical() {
                opts.retain(MultiSegment::is_self_dual);
            }
            factors.push(opts);
        } else if *rho == rho.pair_representative() {
            // the dual class is determined by this half
            let opts = enum_line(rho, &support, cap)?;
            factors.push(opts.iter().map(|m| m.union(&m.dual())).collect());
        }
    }
    Ok(product(factors)
        .into_iter()
        .map(|m| LParameter::new(group, m))
        .filter(|p| p.violations().is_empty())
        .collect())
}

pub fn enum_classical(lambda: &InfinitesimalParameter, group: GroupType, cap: Option<usize>) -> Result<Vec<LParameter>> {
    if !group.is_classical() {
        return Err(CoreError::NotClassical(group.to_string()));
    }
    enum_parameters(lambda, group, cap)
}

#[derive(Clone, Debug)]
pub struct ParameterPoset {
    pub nodes: Vec<LParameter>,
    /// `leq[i][j]`: node `i ≤_C` node `j`.
    pub leq: Vec<Vec<bool>>,
    /// Covering relations `(smaller, larger)`.
    pub hasse: Vec<(usize, usize)>,
}

pub fn build_poset(params: Vec<LParameter>) -> Result<ParameterPoset> {
    let n = params.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            leq[i][j] = closure_leq(&params[i], &params[j])?;
        }
    }
    for i in 0..n {
        for j in 0..i {
            if leq[i][j] && leq[j][i] {
                return Err(CoreError::Invariant(format!("distinct nodes {} and {} are equivalent", params[i], params[j])));
            }
        }
    }
    let mut hasse = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && leq[i][j] && !(0..n).any(|k| k != i && k != j && leq[i][k] && leq[k][j]) {
                hasse.push((i, j));
            }
        }
    }
    Ok(ParameterPoset { nodes: params, leq, hasse })
}

impl ParameterPoset {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The node above all others (the open orbit), if any.
    pub fn maximum(&self) -> Option<usize> {
        (0..self.len()).find(|&j| (0..self.len()).all(|i| self.leq[i][j]))
    }

    /// The node below all others (the closed orbit), if any.
    pub fn minimum(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq[i][j]))
    }

    pub fn index_of(&self, p: &LParameter) -> Option<usize> {
        self.nodes.iter().position(|q| q == p)
    }

    /// The dual as a map on node indices.
    pub fn dual_map(&self) -> Result<Vec<usize>> {
        self.nodes
            .iter()
            .map(|p| {
                let d = pyasetskii_dual(p)?;
                self.index_of(&d).ok_or_else(|| CoreError::Invariant(format!("dual {d} of {p} is not a node")))
            })
            .collect()
    }

    /// Graphviz digraph; edges point from the smaller node to the larger.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph poset {\n  rankdir=BT;\n");
        for (i, p) in self.nodes.iter().enumerate() {
            let label = p.mseg.to_string().replace('"', "\\\"");
            writeln!(s, "  n{i} [label=\"{label}\"];").expect("string write");
        }
        for &(a, b) in &self.hasse {
            writeln!(s, "  n{a} -> n{b};").expect("string write");
        }
        s.push_str("}\n");
        s
    }
}

fn check_involution(p: &ParameterPoset, iota: &[usize]) -> Result<()> {
    let n = p.len();
    if iota.len() != n || iota.iter().any(|&k| k >= n) || (0..n).any(|s| iota[iota[s]] != s) {
        return Err(CoreError::NotInvolution);
    }
    Ok(())
}

/// Whether `ι1 = ι2`. If `ι1(s) ≥ ι2(s)` for every node the two must agree;
/// a pair that dominates yet differs is reported as an invariant violation.
pub fn check_dominating_involutions(p: &ParameterPoset, iota1: &[usize], iota2: &[usize]) -> Result<bool> {
    check_involution(p, iota1)?;
    check_involution(p, iota2)?;
    let equal = iota1 == iota2;
    let dominates = (0..p.len()).all(|s| p.leq[iota2[s]][iota1[s]]);
    if dominates && !equal {
        return Err(CoreError::Invariant("dominating involutions differ".into()));
    }
    Ok(equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use proptest::prelude::*;

    fn support(xs: &[i64]) -> Support {
        let mut s = Support::new();
        for &x in xs {
            *s.entry(HalfInt::from_int(x)).or_insert(0) += 1;
        }
        s
    }

    fn lambda_of(m: &MultiSegment) -> InfinitesimalParameter {
        m.infinitesimal()
    }

    #[test]
    fn enum_line_examples() {
        let t = triv();
        let out = enum_line(&t, &support(&[0, 1]), Some(DEFAULT_CAP)).unwrap();
        assert_eq!(out, vec![ms(&[seg(&t, 0, 1)]), ms(&[seg(&t, 1, 1), seg(&t, 0, 0)])]);
        assert_eq!(enum_line(&t, &support(&[1, 0, 0, 0, 0, -1]), Some(DEFAULT_CAP)).unwrap().len(), 5);
        assert_eq!(enum_line(&t, &support(&[0]), None).unwrap(), vec![ms(&[seg(&t, 0, 0)])]);
        assert_eq!(
            enum_line(&t, &support(&[0; 13]), Some(DEFAULT_CAP)),
            Err(CoreError::SupportTooLarge { size: 13, cap: 12 })
        );
        assert_eq!(enum_line(&t, &support(&[0; 13]), None).unwrap().len(), 1);
        let mut mixed = support(&[0]);
        mixed.insert(HalfInt::HALF, 1);
        assert_eq!(enum_line(&t, &mixed, None), Err(CoreError::MixedLine));
    }

    #[test]
    fn enum_parameters_examples() {
        let lambda = lambda_of(&phi_upper_1());
        let so7 = enum_classical(&lambda, GroupType::so_odd(3), Some(DEFAULT_CAP)).unwrap();
        let ms_only: Vec<_> = so7.iter().map(|p| p.mseg.clone()).collect();
        assert_eq!(ms_only.len(), 2);
        assert!(ms_only.contains(&phi_upper_1()) && ms_only.contains(&phi_upper_4()));
        assert_eq!(enum_parameters(&lambda, GroupType::gl(6), Some(DEFAULT_CAP)).unwrap().len(), 5);

        let t = triv();
        let o2 = enum_classical(&lambda_of(&ms(&[seg2(&t, -1, 1)])), GroupType::o_even(1), None).unwrap();
        assert_eq!(o2.len(), 1);
        assert_eq!(o2[0].mseg, ms(&[seg2(&t, -1, -1), seg2(&t, 1, 1)]));

        assert!(matches!(
            enum_classical(&lambda, GroupType::so_odd(2), None),
            Err(CoreError::Validation(_))
        ));
        assert_eq!(
            enum_classical(&lambda_of(&ms(&[seg(&t, 0, 1)])), GroupType::o_even(1), None),
            Err(CoreError::InfinitesimalNotSelfDual)
        );
        assert!(matches!(enum_classical(&lambda, GroupType::gl(6), None), Err(CoreError::NotClassical(_))));
    }

    #[test]
    fn nonselfdual_pairs_enumerate_one_half() {
        let s = sigma();
        let lambda = lambda_of(&ms(&[seg(&s, 0, 1), seg(&s.dual(), -1, 0)]));
        let out = enum_classical(&lambda, GroupType::o_even(2), None).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|p| p.mseg.is_self_dual()));
    }

    #[test]
    fn poset_examples() {
        let lambda = lambda_of(&phi_upper_1());
        let so7 = build_poset(enum_classical(&lambda, GroupType::so_odd(3), None).unwrap()).unwrap();
        assert_eq!(so7.len(), 2);
        assert_eq!(so7.hasse.len(), 1);
        let (lo, hi) = so7.hasse[0];
        assert_eq!((so7.nodes[lo].mseg.clone(), so7.nodes[hi].mseg.clone()), (phi_upper_4(), phi_upper_1()));
        assert_eq!(so7.to_dot().matches("->").count(), 1);

        let gl = build_poset(enum_parameters(&lambda, GroupType::gl(6), None).unwrap()).unwrap();
        assert_eq!(gl.len(), 5);
        assert_eq!(gl.hasse.len(), 5);
        let t = triv();
        let node = |m: MultiSegment| gl.index_of(&LParameter::new(GroupType::gl(6), m)).unwrap();
        let mut phi0 = ms(&[seg(&t, -1, 1)]);
        phi0.insert(seg(&t, 0, 0), 3);
        let mut phi2 = ms(&[seg(&t, 0, 1), seg(&t, -1, -1)]);
        phi2.insert(seg(&t, 0, 0), 3);
        let mut phi3 = ms(&[seg(&t, -1, 0), seg(&t, 1, 1)]);
        phi3.insert(seg(&t, 0, 0), 3);
        let (n0, n1, n2, n3, n4) = (node(phi0), node(phi_upper_1()), node(phi2), node(phi3), node(phi_upper_4()));
        let mut want = vec![(n4, n2), (n4, n3), (n2, n1), (n3, n1), (n1, n0)];
        want.sort();
        let mut got = gl.hasse.clone();
        got.sort();
        assert_eq!(got, want);
        assert_eq!((gl.minimum(), gl.maximum()), (Some(n4), Some(n0)));
        let dot = gl.to_dot();
        assert_eq!((dot.matches("->").count(), dot.matches("label=").count()), (5, 5));

        let single = build_poset(vec![LParameter::new(GroupType::gl(1), ms(&[seg(&t, 0, 0)]))]).unwrap();
        assert!(single.hasse.is_empty());
        assert_eq!(single.to_dot().matches("label=").count(), 1);
    }

    #[test]
    fn mixed_poset_rejected() {
        let a = LParameter::new(GroupType::gl(6), phi_upper_1());
        let b = LParameter::new(GroupType::so_odd(3), phi_upper_1());
        assert!(matches!(build_poset(vec![a, b]), Err(CoreError::GroupMismatch(..))));
    }

    #[test]
    fn dominating_involutions() {
        let lambda = lambda_of(&phi_upper_1());
        let p = build_poset(enum_classical(&lambda, GroupType::so_odd(3), None).unwrap()).unwrap();
        let d = p.dual_map().unwrap();
        assert!(check_dominating_involutions(&p, &d, &d).unwrap());
        let id = vec![0, 1];
        let swap = vec![1, 0];
        assert_eq!(swap, d);
        assert!(!check_dominating_involutions(&p, &id, &swap).unwrap());
        assert_eq!(check_dominating_involutions(&p, &[0, 0], &id), Err(CoreError::NotInvolution));
    }

    proptest! {
        #[test]
        fn enum_line_is_exhaustive_and_distinct(m in arb_line(5)) {
            let lambda = m.infinitesimal();
            let (_, sup) = lambda.gl_lines().into_iter().next().unwrap();
            let all = enum_line(&triv(), &sup, None).unwrap();
            prop_assert!(all.contains(&m));
            let set: std::collections::BTreeSet<String> = all.iter().map(|x| x.to_string()).collect();
            prop_assert_eq!(set.len(), all.len());
            prop_assert!(all.iter().all(|x| x.infinitesimal() == lambda));
        }
    }
}
