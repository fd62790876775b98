//! The inductive separated-element pass.
//!
//! Starting from `f(id) = {id}`, the pass extends a map `f` from elements to
//! sets of elements up the length order: a descent `s` of `x` (on either
//! side) qualifies when `f` is already defined on the child `sx` and `s`
//! raises every element of `f(sx)`; then `x` gets the intersection, over all
//! qualifying descents, of the unions of KL product supports
//! `supp(h_s h_w)`, `w` in `f(sx)`. Elements with no qualifying descent stay
//! Undefined — that is a value of the table, not an error.
//!
//! An element is *separated* when `f(x) = {x}`; the set of separated
//! elements is written `sigma(W)`. The pass consumes only the W-graph (plus
//! multiplication tables): every product support is read off mu-edges and
//! descent labels.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterSpec, Elt, Family, GroupTable, Side};
use crate::hecke::{expand_in_kl, HeckeElt, KlTable};
use crate::wgraph::WGraph;

/// Expansion support of a Hecke element in the KL basis, plus the flag for
/// "all coordinates are nonnegative constants".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KlSupport {
    pub elements: Vec<Elt>,
    pub supported_deg0: bool,
}

/// Expand `h` in the KL basis and record its support.
pub fn supp_kl(g: &GroupTable, t: &KlTable, h: &HeckeElt) -> KlSupport {
    let expansion = expand_in_kl(g, t, h);
    let supported_deg0 = expansion.iter().all(|(_, p)| p.is_deg0_nonneg());
    let mut elements: Vec<Elt> = expansion.into_iter().map(|(x, _)| x).collect();
    elements.sort_unstable();
    KlSupport { elements, supported_deg0 }
}

/// The subset of `z` raised by `s` on the given side.
pub fn restrict_set(g: &GroupTable, z: &[Elt], s: usize, side: Side) -> Vec<Elt> {
    z.iter().copied().filter(|&x| !g.is_descent(x, s, side)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FwState {
    Undefined,
    /// Sorted element indices.
    Defined(Vec<Elt>),
}

/// The table `x -> f(x)`, indexed in group-table order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FwTable {
    pub spec: CoxeterSpec,
    pub states: Vec<FwState>,
}

impl FwTable {
    pub fn get(&self, x: Elt) -> &FwState {
        &self.states[x as usize]
    }

    pub fn is_defined(&self, x: Elt) -> bool {
        matches!(self.states[x as usize], FwState::Defined(_))
    }

    pub fn defined_set(&self, x: Elt) -> Option<&[Elt]> {
        match &self.states[x as usize] {
            FwState::Defined(s) => Some(s),
            FwState::Undefined => None,
        }
    }

    pub fn is_separated(&self, x: Elt) -> bool {
        matches!(&self.states[x as usize], FwState::Defined(s) if s.as_slice() == [x])
    }

    pub fn sigma(&self) -> Vec<Elt> {
        (0..self.states.len() as Elt).filter(|&x| self.is_separated(x)).collect()
    }
}

fn intersect_sorted(a: &[Elt], b: &[Elt]) -> Vec<Elt> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// One candidate side of the defining condition at `x`: the descent `s`
/// qualifies iff the child's set is defined and entirely raised by `s`.
/// Returns the union of product supports if so.
fn side_union(
    g: &GroupTable,
    wg: &WGraph,
    states: &[FwState],
    x: Elt,
    s: usize,
    side: Side,
) -> Option<Vec<Elt>> {
    let child = g.mult_gen(x, s, side);
    let FwState::Defined(fy) = &states[child as usize] else {
        return None;
    };
    if fy.iter().any(|&w| wg.is_descent(w, s, side)) {
        return None;
    }
    let mut union = Vec::new();
    for &w in fy {
        union.extend_from_slice(&wg.product_support(g, w, s, side));
    }
    union.sort_unstable();
    union.dedup();
    Some(union)
}

fn state_for(g: &GroupTable, wg: &WGraph, states: &[FwState], x: Elt) -> FwState {
    let mut acc: Option<Vec<Elt>> = None;
    for side in [Side::Left, Side::Right] {
        for s in g.descents(x, side) {
            if let Some(union) = side_union(g, wg, states, x, s, side) {
                acc = Some(match acc {
                    None => union,
                    Some(prev) => intersect_sorted(&prev, &union),
                });
            }
        }
    }
    match acc {
        Some(set) => FwState::Defined(set),
        None => FwState::Undefined,
    }
}

/// Run the inductive pass over the whole group.
///
/// Elements are processed in length order; within a length stratum they are
/// independent and handled in parallel. The result does not depend on the
/// thread count.
pub fn compute_fw(g: &GroupTable, wg: &WGraph) -> FwTable {
    assert_eq!(wg.size(), g.size(), "W-graph does not match the group");
    let mut states = vec![FwState::Undefined; g.size()];
    states[0] = FwState::Defined(vec![0]);
    let mut lo = 1usize;
    while lo < g.size() {
        let len = g.length(lo as Elt);
        let mut hi = lo;
        while hi < g.size() && g.length(hi as Elt) == len {
            hi += 1;
        }
        let stratum: Vec<FwState> = (lo..hi)
            .into_par_iter()
            .map(|x| state_for(g, wg, &states, x as Elt))
            .collect();
        states[lo..hi].clone_from_slice(&stratum);
        lo = hi;
    }
    FwTable { spec: g.spec, states }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDoc {
    pub family: String,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl SpecDoc {
    pub fn of(spec: CoxeterSpec) -> Self {
        SpecDoc {
            family: match spec.family {
                Family::A => "A",
                Family::B => "B",
                Family::D => "D",
                Family::F4 => "F4",
                Family::G2 => "G2",
                Family::I2 => "I2",
            }
            .to_string(),
            rank: spec.rank,
            m: spec.m,
        }
    }
}

/// The versioned report document ("SIGMA1"). Element lists use letter
/// aliases and run in (length, lex) order; `fw` is the optional full dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SigmaReport {
    pub format: String,
    pub spec: SpecDoc,
    pub order: usize,
    pub undefined: Vec<String>,
    pub non_separated: Vec<String>,
    pub sigma_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fw: Option<BTreeMap<String, Vec<String>>>,
}

/// Summarize an `FwTable`. Table order is (length, lex), so the report lists
/// inherit that order directly.
pub fn sigma_report(g: &GroupTable, f: &FwTable, include_fw: bool) -> SigmaReport {
    let mut undefined = Vec::new();
    let mut non_separated = Vec::new();
    let mut sigma_size = 0usize;
    for x in g.elements() {
        match &f.states[x as usize] {
            FwState::Undefined => undefined.push(g.letters(x)),
            FwState::Defined(set) => {
                if set.as_slice() == [x] {
                    sigma_size += 1;
                } else {
                    non_separated.push(g.letters(x));
                }
            }
        }
    }
    let fw = include_fw.then(|| {
        g.elements()
            .filter_map(|x| {
                f.defined_set(x).map(|set| {
                    (g.letters(x), set.iter().map(|&y| g.letters(y)).collect())
                })
            })
            .collect()
    });
    SigmaReport {
        format: "SIGMA1".to_string(),
        spec: SpecDoc::of(g.spec),
        order: g.size(),
        undefined,
        non_separated,
        sigma_size,
        fw,
    }
}

/// Character status tracked by `propagate`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CharStatus {
    CharEq,
    CharNeq,
    Unknown,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum PropagateError {
    #[error("inconsistent marks at {0}: derived both CharEq and CharNeq")]
    Inconsistent(String),
}

/// Propagate character knowledge along the W-graph.
///
/// Separated elements start CharEq; the `assumptions` override adds external
/// knowledge. The closure rule is: an implication `y => x` (CharEq at `y`
/// forces CharEq at `x`) is recorded whenever there is a non-descent `s` of
/// `y` (either side) with `S = supp(h_s h_y)` satisfying `x in S`,
/// `f(x)` defined and `S \cap f(x) = {x}`, provided `x` genuinely occurs in
/// the corresponding translate: either `x = sy` (the top term, which always
/// occurs) or `sy` is itself marked CharEq and `x` is Bruhat-maximal in
/// `S \ {sy}` (so its degree-0 multiplicity cannot be absorbed by other
/// summands). FORWARD applies implications whose source is CharEq; BACKWARD
/// applies the contrapositive when the target is CharNeq. Both run to a
/// joint fixpoint; a derivation clashing with an existing mark is reported
/// as an inconsistency, never silently resolved.
pub fn propagate(
    g: &GroupTable,
    wg: &WGraph,
    f: &FwTable,
    assumptions: &BTreeMap<Elt, CharStatus>,
) -> Result<Vec<CharStatus>, PropagateError> {
    let mut marks = vec![CharStatus::Unknown; g.size()];
    for x in g.elements() {
        if f.is_separated(x) {
            marks[x as usize] = CharStatus::CharEq;
        }
    }
    for (&x, &st) in assumptions {
        if st == CharStatus::Unknown {
            continue;
        }
        if marks[x as usize] != CharStatus::Unknown && marks[x as usize] != st {
            return Err(PropagateError::Inconsistent(g.letters(x)));
        }
        marks[x as usize] = st;
    }

    let set = |marks: &mut Vec<CharStatus>, x: Elt, st: CharStatus| -> Result<bool, PropagateError> {
        match marks[x as usize] {
            CharStatus::Unknown => {
                marks[x as usize] = st;
                Ok(true)
            }
            cur if cur == st => Ok(false),
            _ => Err(PropagateError::Inconsistent(g.letters(x))),
        }
    };

    loop {
        let mut changed = false;
        for y in g.elements() {
            for side in [Side::Left, Side::Right] {
                for s in 0..g.n {
                    if wg.is_descent(y, s, side) {
                        continue;
                    }
                    let supp = wg.product_support(g, y, s, side);
                    let top = g.mult_gen(y, s, side);
                    for &x in &supp {
                        if x != top {
                            // Occurrence certificate for mu-part targets.
                            if marks[top as usize] != CharStatus::CharEq {
                                continue;
                            }
                            let maximal = supp.iter().all(|&z| {
                                z == top || z == x || !g.bruhat_leq(x, z)
                            });
                            if !maximal {
                                continue;
                            }
                        }
                        let Some(fx) = f.defined_set(x) else { continue };
                        if intersect_sorted(&supp, fx) != [x] {
                            continue;
                        }
                        // Implication y => x established.
                        match (marks[y as usize], marks[x as usize]) {
                            (CharStatus::CharEq, _) => {
                                changed |= set(&mut marks, x, CharStatus::CharEq)?;
                            }
                            (_, CharStatus::CharNeq) => {
                                changed |= set(&mut marks, y, CharStatus::CharNeq)?;
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(marks);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coxeter::build_group;
    use crate::hecke::kl_basis;
    use crate::wgraph::build_wgraph;

    fn pass(spec: CoxeterSpec) -> (GroupTable, WGraph, FwTable) {
        let g = build_group(spec).unwrap();
        let t = kl_basis(&g);
        let wg = build_wgraph(&g, &t);
        let f = compute_fw(&g, &wg);
        (g, wg, f)
    }

    fn letters(g: &GroupTable, xs: &[Elt]) -> Vec<String> {
        xs.iter().map(|&x| g.letters(x)).collect()
    }

    #[test]
    fn dihedral_closed_form() {
        // f((st)^k) = {(st)^k, ..., st} and mirrored; length-1 and longest
        // elements separated; sigma = {e, s, t, st, ts, w0}.
        for m in 3..=8 {
            let (g, _, f) = pass(CoxeterSpec::i2(m));
            assert_eq!(f.get(g.id()), &FwState::Defined(vec![g.id()]));
            for x in g.elements() {
                let l = g.length(x);
                let set = f.defined_set(x).expect("dihedral f is total");
                if l <= 1 || l == m {
                    assert_eq!(set, [x], "length {} element separated", l);
                } else {
                    // Alternating words shrink two letters at a time:
                    // f(x) = {x, x", ...} down to length 1 or 2, keeping the
                    // length parity and the first letter.
                    let mut expect: Vec<Elt> = (1..=l)
                        .filter(|k| k % 2 == l % 2)
                        .map(|k| {
                            let w = g.word(x);
                            g.word_to_element(&w[..k])
                        })
                        .collect();
                    expect.sort_unstable();
                    assert_eq!(set, expect, "m={} x={}", m, g.letters(x));
                }
            }
            let sigma = f.sigma();
            assert_eq!(sigma.len(), 6);
            let mut names = letters(&g, &sigma);
            names.sort();
            let mut want = vec!["e", "s", "t", "st", "ts", g.letters(g.longest()).as_str()]
                .into_iter()
                .map(String::from)
                .collect::<Vec<_>>();
            want.sort();
            assert_eq!(names, want);
        }
    }

    #[test]
    fn rank2_classification() {
        // sigma(W) = W exactly for A2 (= I2(3)) and A1 x A1 (= I2(2)).
        for m in 2..=8 {
            let (g, _, f) = pass(CoxeterSpec::i2(m));
            let total = f.sigma().len() == g.size();
            assert_eq!(total, m <= 3, "I2({})", m);
        }
    }

    fn elts(g: &GroupTable, words: &[&str]) -> Vec<Elt> {
        let mut v: Vec<Elt> =
            words.iter().map(|w| g.parse_letters(w).unwrap()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    #[test]
    fn b3_exact_lists() {
        let (g, _, f) = pass(CoxeterSpec::b(3));
        let undefined: Vec<Elt> =
            g.elements().filter(|&x| !f.is_defined(x)).collect();
        assert_eq!(undefined, elts(&g, &["stsuts"]));
        let non_sep: Vec<Elt> = g
            .elements()
            .filter(|&x| f.is_defined(x) && !f.is_separated(x))
            .collect();
        let expected = elts(
            &g,
            &[
                "utu", "tut", "utsu", "tuts", "utsut", "tsuts", "sutu",
                "tsutu", "utsutu", "tsutsu", "tutsutu", "stut", "stsut",
                "sutsut", "sutsutu", "tsutsut", "tsutsutu", "stuts",
                "stutsutu", "stsutsut",
            ],
        );
        assert_eq!(expected.len(), 20);
        assert_eq!(non_sep, expected);
        assert_eq!(f.sigma().len(), 48 - 20 - 1);
    }

    #[test]
    fn d4_exact_seven() {
        let (g, _, f) = pass(CoxeterSpec::d(4));
        assert!(g.elements().all(|x| f.is_defined(x)), "f total on D4");
        let non_sep: Vec<Elt> =
            g.elements().filter(|&x| !f.is_separated(x)).collect();
        // tau: s -> u -> v -> s, t fixed.
        let tau = |w: &str| -> String {
            w.chars()
                .map(|c| match c {
                    's' => 'u',
                    'u' => 'v',
                    'v' => 's',
                    other => other,
                })
                .collect()
        };
        let w1 = "tvtsutv".to_string();
        let w2 = "suvtvsu".to_string();
        let expected = elts(
            &g,
            &[
                &w1,
                &tau(&w1),
                &tau(&tau(&w1)),
                &w2,
                &format!("t{}", w2),
                &format!("{}t", w2),
                &format!("t{}t", w2),
            ],
        );
        assert_eq!(expected.len(), 7);
        assert_eq!(non_sep, expected);
    }

    #[test]
    fn a4_fully_separated() {
        let (g, _, f) = pass(CoxeterSpec::a(4));
        assert_eq!(f.sigma().len(), g.size());
        assert_eq!(g.size(), 120);
    }

    #[test]
    fn a5_fully_separated() {
        let (g, _, f) = pass(CoxeterSpec::a(5));
        assert_eq!(f.sigma().len(), g.size());
        assert_eq!(g.size(), 720);
    }

    #[test]
    fn inverse_equivariance() {
        for spec in [CoxeterSpec::b(3), CoxeterSpec::i2(5), CoxeterSpec::a(3)] {
            let (g, _, f) = pass(spec);
            for x in g.elements() {
                let xi = g.inverse(x);
                match (f.defined_set(x), f.defined_set(xi)) {
                    (Some(set), Some(seti)) => {
                        let mut mapped: Vec<Elt> =
                            set.iter().map(|&y| g.inverse(y)).collect();
                        mapped.sort_unstable();
                        assert_eq!(mapped, seti);
                    }
                    (None, None) => {}
                    _ => panic!("definedness not inverse-invariant at {}", g.letters(x)),
                }
            }
        }
    }

    #[test]
    fn fw_contains_x_and_stays_below() {
        for spec in [CoxeterSpec::b(3), CoxeterSpec::d(4), CoxeterSpec::i2(7)] {
            let (g, _, f) = pass(spec);
            for x in g.elements() {
                if let Some(set) = f.defined_set(x) {
                    assert!(set.contains(&x));
                    for &y in set {
                        assert!(g.bruhat_leq(y, x));
                    }
                }
            }
        }
    }

    #[test]
    fn supp_kl_and_restrict_examples() {
        let g = build_group(CoxeterSpec::a(2)).unwrap();
        let t = kl_basis(&g);
        let s = g.parse_letters("s").unwrap();
        let st = g.parse_letters("st").unwrap();
        let ts = g.parse_letters("ts").unwrap();

        let hs = t.h(s);
        assert_eq!(supp_kl(&g, &t, &hs), KlSupport { elements: vec![s], supported_deg0: true });

        // (v + v^-1) h_s has a v-coefficient: same support, deg0 flag off.
        let mut round = crate::laurent::LaurentPoly::monomial(1, 1);
        round.add_scaled(&crate::laurent::LaurentPoly::monomial(-1, 1), 1, 0);
        let ks = supp_kl(&g, &t, &hs.scale(&round));
        assert_eq!(ks.elements, vec![s]);
        assert!(!ks.supported_deg0);

        // restrict({st, ts}, s, Left): s lowers st, raises ts.
        assert_eq!(restrict_set(&g, &[st, ts], 0, Side::Left), vec![ts]);
        assert_eq!(restrict_set(&g, &[g.id()], 0, Side::Left), vec![g.id()]);
        assert_eq!(restrict_set(&g, &[s], 0, Side::Left), Vec::<Elt>::new());
    }

    #[test]
    fn sigma_report_counts_add_up() {
        let (g, _, f) = pass(CoxeterSpec::b(3));
        let r = sigma_report(&g, &f, true);
        assert_eq!(r.format, "SIGMA1");
        assert_eq!(
            r.sigma_size + r.non_separated.len() + r.undefined.len(),
            r.order
        );
        let fw = r.fw.as_ref().unwrap();
        assert_eq!(fw.len(), r.order - r.undefined.len());
        // Round trip through JSON.
        let json = serde_json::to_string_pretty(&r).unwrap();
        let back: SigmaReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn propagate_d4_no_assumptions() {
        let (g, wg, f) = pass(CoxeterSpec::d(4));
        let marks = propagate(&g, &wg, &f, &BTreeMap::new()).unwrap();
        for x in g.elements() {
            if f.is_separated(x) {
                assert_eq!(marks[x as usize], CharStatus::CharEq);
            }
        }
        // The w1 family is recovered even though it is not separated.
        let tau = |w: Elt| -> Elt {
            let word: Vec<u8> = g
                .word(w)
                .iter()
                .map(|&c| match c {
                    0 => 2,
                    2 => 3,
                    3 => 0,
                    other => other,
                })
                .collect();
            g.word_to_element(&word)
        };
        let w1 = g.parse_letters("tvtsutv").unwrap();
        for x in [w1, tau(w1), tau(tau(w1))] {
            assert!(!f.is_separated(x));
            assert_eq!(marks[x as usize], CharStatus::CharEq, "{}", g.letters(x));
        }
        // The w2 family stays unknown without geometric input.
        let w2 = g.parse_letters("suvtvsu").unwrap();
        let tw2 = g.parse_letters("tsuvtvsu").unwrap();
        let w2t = g.parse_letters("suvtvsut").unwrap();
        let tw2t = g.parse_letters("tsuvtvsut").unwrap();
        for x in [w2, tw2, w2t, tw2t] {
            assert_eq!(marks[x as usize], CharStatus::Unknown, "{}", g.letters(x));
        }
    }

    #[test]
    fn propagate_d4_char2_assumption() {
        let (g, wg, f) = pass(CoxeterSpec::d(4));
        let w2 = g.parse_letters("suvtvsu").unwrap();
        let mut assume = BTreeMap::new();
        assume.insert(w2, CharStatus::CharNeq);
        let marks = propagate(&g, &wg, &f, &assume).unwrap();
        for w in ["tsuvtvsu", "suvtvsut", "tsuvtvsut"] {
            let x = g.parse_letters(w).unwrap();
            assert_eq!(marks[x as usize], CharStatus::CharNeq, "{}", w);
        }
    }

    #[test]
    fn propagate_rejects_contradictory_assumptions() {
        let (g, wg, f) = pass(CoxeterSpec::a(2));
        let mut assume = BTreeMap::new();
        assume.insert(g.parse_letters("st").unwrap(), CharStatus::CharNeq);
        // st is separated in A2, so CharNeq contradicts the base marking.
        assert!(matches!(
            propagate(&g, &wg, &f, &assume),
            Err(PropagateError::Inconsistent(_))
        ));
    }
}
