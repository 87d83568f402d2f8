//! Brute-force k-noncrossing τ-canonical structures, their loops and shapes.
//!
//! Everything here works directly on arc lists and is deliberately independent
//! of the generating-function code; it is the oracle the closed forms are
//! checked against.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Error, Result};
use crate::limits::EnumLimits;
use crate::loopgf::{LoopKind, ShapeGfTable};
use crate::matchings::{crossing_number_of, MAX_K, MIN_K};
use crate::series::{ExactRational, UPoly};

/// Arc diagram on the vertices `1..=n`. Serializes as `{"n": .., "arcs": [[i, j], ..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Diagram {
    pub n: usize,
    /// Arcs `(i, j)` with `i < j`, sorted by left endpoint.
    pub arcs: Vec<(usize, usize)>,
}

impl Diagram {
    /// Validates endpoints and sorts the arcs.
    pub fn new(n: usize, mut arcs: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for &(i, j) in &arcs {
            if !(1 <= i && i < j && j <= n) {
                return Err(Error::InvalidArgument(format!(
                    "arc ({i}, {j}) is not inside 1..={n} with i < j"
                )));
            }
            for v in [i, j] {
                if std::mem::replace(&mut seen[v], true) {
                    return Err(Error::InvalidArgument(format!(
                        "vertex {v} is an endpoint of more than one arc"
                    )));
                }
            }
        }
        arcs.sort_unstable();
        Ok(Diagram { n, arcs })
    }

    pub fn empty(n: usize) -> Self {
        Diagram { n, arcs: Vec::new() }
    }

    /// `partners()[v]` is the other end of the arc at `v`, if any.
    pub fn partners(&self) -> Vec<Option<usize>> {
        let mut p = vec![None; self.n + 2];
        for &(i, j) in &self.arcs {
            p[i] = Some(j);
            p[j] = Some(i);
        }
        p
    }

    /// Mirror image under `v -> n + 1 - v`.
    pub fn reflect(&self) -> Diagram {
        let m = self.n + 1;
        let mut arcs: Vec<_> = self.arcs.iter().map(|&(i, j)| (m - j, m - i)).collect();
        arcs.sort_unstable();
        Diagram { n: self.n, arcs }
    }

    pub fn has_one_arc(&self) -> bool {
        self.arcs.iter().any(|&(i, j)| j == i + 1)
    }

    pub fn crossing_number(&self) -> usize {
        crossing_number_of(&self.arcs)
    }

    /// Lengths of the maximal stacks, keyed by their outermost arc.
    pub fn maximal_stacks(&self) -> Vec<((usize, usize), usize)> {
        let p = self.partners();
        let is_arc = |i: usize, j: usize| i >= 1 && j <= self.n && p[i] == Some(j);
        self.arcs
            .iter()
            .filter(|&&(i, j)| !is_arc(i.wrapping_sub(1), j + 1))
            .map(|&(i, j)| {
                let mut len = 1;
                while i + len < j - len && is_arc(i + len, j - len) {
                    len += 1;
                }
                ((i, j), len)
            })
            .collect()
    }

    /// Every maximal stack has at least `tau` arcs.
    pub fn min_stack_at_least(&self, tau: usize) -> bool {
        self.maximal_stacks().iter().all(|&(_, len)| len >= tau)
    }
}

/// A diagram certified to be a k-noncrossing τ-canonical structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CanonicalStructure {
    pub diagram: Diagram,
    pub k: usize,
    pub tau: usize,
}

impl CanonicalStructure {
    pub fn new(diagram: Diagram, k: usize, tau: usize) -> Result<Self> {
        if diagram.has_one_arc() {
            return Err(Error::InvalidArgument("structures may not contain 1-arcs".into()));
        }
        if diagram.crossing_number() >= k {
            return Err(Error::InvalidArgument(format!(
                "diagram contains a {k}-crossing"
            )));
        }
        if !diagram.min_stack_at_least(tau) {
            return Err(Error::InvalidArgument(format!(
                "diagram has a stack shorter than {tau}"
            )));
        }
        Ok(CanonicalStructure { diagram, k, tau })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LoopProfile {
    pub hairpins: usize,
    pub interiors: usize,
    pub bulges: usize,
    pub stems: usize,
    pub stacks: usize,
}

impl LoopProfile {
    pub fn count(&self, kind: LoopKind) -> usize {
        match kind {
            LoopKind::Hairpin => self.hairpins,
            LoopKind::Interior => self.interiors,
            LoopKind::Bulge => self.bulges,
        }
    }
}

/// Stack-free k-noncrossing matching, the image of a structure after removing
/// isolated vertices and collapsing stacks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Shape {
    pub diagram: Diagram,
}

impl Shape {
    /// Number of arcs `s`.
    pub fn arcs(&self) -> usize {
        self.diagram.arcs.len()
    }

    pub fn one_arcs(&self) -> usize {
        self.diagram.arcs.iter().filter(|&&(i, j)| j == i + 1).count()
    }

    pub fn is_stack_free(&self) -> bool {
        let p = self.diagram.partners();
        self.diagram
            .arcs
            .iter()
            .all(|&(i, j)| !(i + 1 < j - 1 && p[i + 1] == Some(j - 1)))
    }
}

fn check_k_tau(k: usize, tau: usize) -> Result<()> {
    check_range("k", k, MIN_K, MAX_K)?;
    check_range("tau", tau, 1, 10)
}

/// Left-to-right search state. At vertex `v` the vertex is either already
/// closed by an earlier arc, left isolated, or opens an arc to some free
/// `w >= v + 2`. Only the crossing constraint is checked on the way down; it
/// is monotone under adding arcs. Stack sizes are checked on completion since
/// a stack can still grow.
struct Search<'a, F: FnMut(&Diagram)> {
    n: usize,
    k: usize,
    tau: usize,
    partner: Vec<usize>,
    arcs: Vec<(usize, usize)>,
    visit: &'a mut F,
}

impl<F: FnMut(&Diagram)> Search<'_, F> {
    fn run(&mut self, v: usize) {
        if v > self.n {
            let d = Diagram {
                n: self.n,
                arcs: self.arcs.clone(),
            };
            if d.min_stack_at_least(self.tau) {
                (self.visit)(&d);
            }
            return;
        }
        if self.partner[v] != 0 {
            self.run(v + 1);
            return;
        }
        self.run(v + 1);
        for w in v + 2..=self.n {
            if self.partner[w] != 0 || !self.admits(v, w) {
                continue;
            }
            self.partner[v] = w;
            self.partner[w] = v;
            self.arcs.push((v, w));
            self.run(v + 1);
            self.arcs.pop();
            self.partner[v] = 0;
            self.partner[w] = 0;
        }
    }

    /// Adding `(v, w)` keeps the diagram k-noncrossing. Since `v` is the
    /// largest left end so far, a new k-crossing would consist of `(v, w)` and
    /// a (k-1)-crossing among the arcs that `(v, w)` crosses from the right.
    fn admits(&self, v: usize, w: usize) -> bool {
        let crossed: Vec<(usize, usize)> = self
            .arcs
            .iter()
            .copied()
            .filter(|&(i, j)| i < v && v < j && j < w)
            .collect();
        crossed.len() + 1 < self.k || crossing_number_of(&crossed) + 1 < self.k
    }
}

fn search_from<F: FnMut(&Diagram)>(
    k: usize,
    tau: usize,
    n: usize,
    first: Option<usize>,
    visit: &mut F,
) {
    let mut s = Search {
        n,
        k,
        tau,
        partner: vec![0; n + 2],
        arcs: Vec::new(),
        visit,
    };
    match first {
        None => s.run(2),
        Some(w) => {
            s.partner[1] = w;
            s.partner[w] = 1;
            s.arcs.push((1, w));
            s.run(2);
        }
    }
}

/// The branches of the search for vertex 1: isolated, or paired with `w`.
fn first_choices(n: usize) -> Vec<Option<usize>> {
    std::iter::once(None).chain((3..=n).map(Some)).collect()
}

/// Visits every structure of length `n` exactly once (search order).
pub fn for_each_structure<F: FnMut(&Diagram)>(k: usize, tau: usize, n: usize, mut visit: F) -> Result<()> {
    check_k_tau(k, tau)?;
    EnumLimits::from_env().check_structure_len(n)?;
    if n == 0 {
        visit(&Diagram::empty(0));
        return Ok(());
    }
    for first in first_choices(n) {
        search_from(k, tau, n, first, &mut visit);
    }
    Ok(())
}

/// All structures of length `n`, in lexicographic order of their arc lists.
pub fn enumerate_structures(k: usize, tau: usize, n: usize) -> Result<Vec<CanonicalStructure>> {
    let mut out = Vec::new();
    for_each_structure(k, tau, n, |d| out.push(d.clone()))?;
    out.sort_unstable_by(|a, b| a.arcs.cmp(&b.arcs));
    Ok(out
        .into_iter()
        .map(|diagram| CanonicalStructure { diagram, k, tau })
        .collect())
}

/// Loop statistics of a structure.
///
/// An arc whose interior is nonempty and entirely isolated closes a
/// hairpin-loop. For every arc `(i1, j1)`, let `a` be the first and `b` the
/// last arc endpoint strictly inside it; if `(a, b)` is itself an arc, the two
/// arcs are directly nested with isolated gaps `[i1+1, a-1]` and `[b+1, j1-1]`.
/// Two empty gaps make a stacked pair, exactly one nonempty gap a bulge, and
/// two nonempty gaps an interior-loop. Arcs passing over a gap without an
/// endpoint in it are irrelevant. Stems are maximal chains of stacks linked by
/// bulges and interior-loops.
pub fn classify_loops(s: &CanonicalStructure) -> LoopProfile {
    classify_diagram(&s.diagram)
}

pub fn classify_diagram(d: &Diagram) -> LoopProfile {
    let p = d.partners();
    let mut profile = LoopProfile::default();
    // inner[outer arc left end] = true when this stack continues a stem inward
    let mut linked_inner = vec![false; d.n + 2];
    for &(i1, j1) in &d.arcs {
        let a = (i1 + 1..j1).find(|&v| p[v].is_some());
        let Some(a) = a else {
            if j1 > i1 + 1 {
                profile.hairpins += 1;
            }
            continue;
        };
        let b = (i1 + 1..j1).rev().find(|&v| p[v].is_some()).expect("a exists");
        if p[a] != Some(b) {
            continue;
        }
        let left_gap = a - i1 - 1;
        let right_gap = j1 - b - 1;
        match (left_gap > 0, right_gap > 0) {
            (false, false) => {}
            (true, true) => {
                profile.interiors += 1;
                linked_inner[a] = true;
            }
            _ => {
                profile.bulges += 1;
                linked_inner[a] = true;
            }
        }
    }
    let stacks = d.maximal_stacks();
    profile.stacks = stacks.len();
    profile.stems = stacks.iter().filter(|&&((i, _), _)| !linked_inner[i]).count();
    profile
}

/// Removes isolated vertices, then repeatedly merges parallel arcs
/// `(i, j), (i+1, j-1)` until none remain.
pub fn project_shape(s: &CanonicalStructure) -> Shape {
    project_diagram(&s.diagram)
}

pub fn project_diagram(d: &Diagram) -> Shape {
    let mut current = compress(d.n, &d.arcs, |_| true);
    loop {
        let p = current.partners();
        let inner = current
            .arcs
            .iter()
            .find(|&&(i, j)| i + 1 < j - 1 && p[i + 1] == Some(j - 1))
            .map(|&(i, j)| (i + 1, j - 1));
        let Some((a, b)) = inner else {
            return Shape { diagram: current };
        };
        current = compress(current.n, &current.arcs, |arc| arc != (a, b));
    }
}

/// Keeps the arcs selected by `keep` and relabels their endpoints `1..=2s`.
fn compress(n: usize, arcs: &[(usize, usize)], keep: impl Fn((usize, usize)) -> bool) -> Diagram {
    let kept: Vec<(usize, usize)> = arcs.iter().copied().filter(|&a| keep(a)).collect();
    let mut label = vec![0usize; n + 2];
    let mut used = vec![false; n + 2];
    for &(i, j) in &kept {
        used[i] = true;
        used[j] = true;
    }
    let mut next = 0;
    for v in 1..=n {
        if used[v] {
            next += 1;
            label[v] = next;
        }
    }
    let mut relabeled: Vec<_> = kept.iter().map(|&(i, j)| (label[i], label[j])).collect();
    relabeled.sort_unstable();
    Diagram {
        n: next,
        arcs: relabeled,
    }
}

/// Histograms of hairpin, interior and bulge counts over all structures of
/// length `n`, aggregated in parallel over the choice made at vertex 1.
pub fn histograms(k: usize, tau: usize, n: usize) -> Result<[UPoly; 3]> {
    check_k_tau(k, tau)?;
    EnumLimits::from_env().check_structure_len(n)?;
    if n == 0 {
        return Ok([UPoly::one(), UPoly::one(), UPoly::one()]);
    }
    let partials: Vec<[BTreeMap<usize, u64>; 3]> = first_choices(n)
        .into_par_iter()
        .map(|first| {
            let mut acc: [BTreeMap<usize, u64>; 3] = Default::default();
            search_from(k, tau, n, first, &mut |d: &Diagram| {
                let prof = classify_diagram(d);
                for (slot, kind) in LoopKind::ALL.iter().enumerate() {
                    *acc[slot].entry(prof.count(*kind)).or_default() += 1;
                }
            });
            acc
        })
        .collect();
    let mut total: [BTreeMap<usize, u64>; 3] = Default::default();
    for part in partials {
        for (slot, map) in part.into_iter().enumerate() {
            for (t, c) in map {
                *total[slot].entry(t).or_default() += c;
            }
        }
    }
    Ok(total.map(|m| counts_to_poly(&m)))
}

fn counts_to_poly(m: &BTreeMap<usize, u64>) -> UPoly {
    let deg = m.keys().next_back().copied().unwrap_or(0);
    let mut coeffs = vec![ExactRational::from_integer(BigInt::from(0)); deg + 1];
    for (&t, &c) in m {
        coeffs[t] = ExactRational::from_integer(BigInt::from(c));
    }
    UPoly::from_coeffs(coeffs)
}

/// `sum_t count(n, t) u^t` where `count(n, t)` is the number of structures of
/// length `n` with `t` loops of the given kind.
pub fn histogram(k: usize, tau: usize, n: usize, kind: LoopKind) -> Result<UPoly> {
    let [h, i, b] = histograms(k, tau, n)?;
    Ok(match kind {
        LoopKind::Hairpin => h,
        LoopKind::Interior => i,
        LoopKind::Bulge => b,
    })
}

/// Brute-force count of stack-free k-noncrossing matchings on `[2s]` by
/// number of 1-arcs, for `s <= s_max`.
pub fn enumerate_shapes(k: usize, s_max: usize) -> Result<ShapeGfTable> {
    check_range("k", k, MIN_K, MAX_K)?;
    EnumLimits::from_env().check_shape_len(2 * s_max)?;
    let mut table = ShapeGfTable::zeros(k, s_max);
    for s in 0..=s_max {
        for shape in shapes_of_size(k, s) {
            table.add(s, shape.one_arcs(), 1);
        }
    }
    Ok(table)
}

/// All shapes with exactly `s` arcs, in lexicographic order.
pub fn shapes_of_size(k: usize, s: usize) -> Vec<Shape> {
    let mut out = Vec::new();
    let mut used = vec![false; 2 * s + 1];
    let mut arcs = Vec::new();
    matchings_rec(k, 2 * s, &mut used, &mut arcs, &mut |arcs| {
        let shape = Shape {
            diagram: Diagram {
                n: 2 * s,
                arcs: arcs.to_vec(),
            },
        };
        if shape.is_stack_free() {
            out.push(shape);
        }
    });
    out.sort_unstable();
    out
}

fn matchings_rec(
    k: usize,
    len: usize,
    used: &mut [bool],
    arcs: &mut Vec<(usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize)]),
) {
    let Some(first) = (1..=len).find(|&v| !used[v]) else {
        visit(arcs);
        return;
    };
    used[first] = true;
    for w in first + 1..=len {
        if used[w] {
            continue;
        }
        arcs.push((first, w));
        if crossing_number_of(arcs) < k {
            used[w] = true;
            matchings_rec(k, len, used, arcs, visit);
            used[w] = false;
        }
        arcs.pop();
    }
    used[first] = false;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diagram(n: usize, arcs: &[(usize, usize)]) -> Diagram {
        Diagram::new(n, arcs.to_vec()).unwrap()
    }

    fn structure(n: usize, arcs: &[(usize, usize)], tau: usize) -> CanonicalStructure {
        CanonicalStructure::new(diagram(n, arcs), 3, tau).unwrap()
    }

    #[test]
    fn counts_for_secondary_structures() {
        let counts: Vec<usize> = (0..=7)
            .map(|n| enumerate_structures(2, 1, n).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 4, 8, 17, 37]);
    }

    #[test]
    fn two_canonical_length_five() {
        let all = enumerate_structures(2, 2, 5).unwrap();
        let arcs: Vec<_> = all.iter().map(|s| s.diagram.arcs.clone()).collect();
        assert_eq!(arcs, vec![vec![], vec![(1, 5), (2, 4)]]);
    }

    #[test]
    fn length_two_has_only_the_empty_structure() {
        for (k, tau) in [(2, 1), (3, 2), (5, 3)] {
            let all = enumerate_structures(k, tau, 2).unwrap();
            assert_eq!(all.len(), 1);
            assert!(all[0].diagram.arcs.is_empty());
        }
    }

    #[test]
    fn lexicographic_order() {
        let all = enumerate_structures(3, 1, 8).unwrap();
        assert!(all.windows(2).all(|w| w[0].diagram.arcs < w[1].diagram.arcs));
    }

    #[test]
    fn classification_examples() {
        let p = classify_loops(&structure(7, &[(1, 7), (2, 6), (3, 5)], 1));
        assert_eq!(
            p,
            LoopProfile {
                hairpins: 1,
                interiors: 0,
                bulges: 0,
                stems: 1,
                stacks: 1
            }
        );
        let p = classify_loops(&structure(7, &[(1, 7), (3, 6)], 1));
        assert_eq!(
            p,
            LoopProfile {
                hairpins: 1,
                interiors: 0,
                bulges: 1,
                stems: 1,
                stacks: 2
            }
        );
        let p = classify_loops(&structure(8, &[(1, 8), (3, 6)], 1));
        assert_eq!((p.hairpins, p.interiors, p.bulges), (1, 1, 0));
        assert_eq!((p.stacks, p.stems), (2, 1));
    }

    #[test]
    fn crossing_arc_over_a_gap_does_not_break_a_loop() {
        // (1,10) directly encloses (3,8) with gaps [2] and [9]; (4,12) passes
        // over the right gap without an endpoint in it.
        let d = diagram(12, &[(1, 10), (3, 8), (4, 12), (5, 7)]);
        assert_eq!(classify_diagram(&d).interiors, 1);
        let d = diagram(11, &[(2, 9), (4, 7), (3, 11)]);
        let p = classify_diagram(&d);
        // (2,9) encloses endpoints 3,4,7: first is 3, last is 7, not an arc
        assert_eq!(p.interiors + p.bulges, 0);
        let d = diagram(12, &[(1, 12), (3, 10), (4, 8), (6, 11)]);
        // (1,12): first inner endpoint 3, last 11 -> (3,11) is not an arc
        assert_eq!(classify_diagram(&d).interiors, 0);
    }

    #[test]
    fn shape_projection() {
        let s = structure(7, &[(1, 7), (2, 6), (3, 5)], 1);
        let shape = project_shape(&s);
        assert_eq!(shape.diagram, diagram(2, &[(1, 2)]));
        assert_eq!((shape.arcs(), shape.one_arcs()), (1, 1));

        let empty = structure(5, &[], 1);
        assert_eq!(project_shape(&empty).diagram, Diagram::empty(0));

        // two stems side by side, one with an interior loop
        let s = structure(16, &[(1, 8), (3, 6), (9, 16), (10, 15), (11, 14)], 1);
        assert_eq!(project_shape(&s).diagram, diagram(4, &[(1, 2), (3, 4)]));
    }

    #[test]
    fn histogram_examples() {
        assert_eq!(histogram(2, 1, 3, LoopKind::Hairpin).unwrap(), UPoly::from_ints(&[1, 1]));
        assert_eq!(histogram(2, 1, 4, LoopKind::Hairpin).unwrap(), UPoly::from_ints(&[1, 3]));
        for kind in LoopKind::ALL {
            assert_eq!(histogram(3, 2, 0, kind).unwrap(), UPoly::one());
        }
    }

    #[test]
    fn shape_examples() {
        let t2 = enumerate_shapes(2, 2).unwrap();
        assert_eq!(t2.get_u64(0, 0), 1);
        assert_eq!((t2.get_u64(1, 0), t2.get_u64(1, 1)), (0, 1));
        assert_eq!((t2.get_u64(2, 0), t2.get_u64(2, 1), t2.get_u64(2, 2)), (0, 0, 1));
        let t3 = enumerate_shapes(3, 2).unwrap();
        assert_eq!((t3.get_u64(2, 0), t3.get_u64(2, 1), t3.get_u64(2, 2)), (1, 0, 1));
        for k in 2..=5 {
            assert_eq!(enumerate_shapes(k, 1).unwrap().get_u64(1, 1), 1);
        }
    }

    #[test]
    fn invalid_diagrams() {
        assert!(Diagram::new(4, vec![(1, 3), (3, 4)]).is_err());
        assert!(Diagram::new(4, vec![(2, 5)]).is_err());
        assert!(Diagram::new(4, vec![(3, 2)]).is_err());
        let one_arc = diagram(4, &[(2, 3)]);
        assert!(CanonicalStructure::new(one_arc, 2, 1).is_err());
        let short = diagram(6, &[(1, 6), (2, 5)]);
        assert!(CanonicalStructure::new(short.clone(), 2, 3).is_err());
        assert!(CanonicalStructure::new(short, 2, 2).is_ok());
        let crossing = diagram(6, &[(1, 4), (2, 5), (3, 6)]);
        assert!(CanonicalStructure::new(crossing.clone(), 3, 1).is_err());
        assert!(CanonicalStructure::new(crossing, 4, 1).is_ok());
    }

    #[test]
    fn json_round_trip() {
        let d = diagram(7, &[(1, 7), (3, 6)]);
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"n":7,"arcs":[[1,7],[3,6]]}"#);
        let back: Diagram = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
    }
}
