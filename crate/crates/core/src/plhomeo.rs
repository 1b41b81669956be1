//! Exact-rational piecewise-linear homeomorphisms of `[0,1]`: the
//! independent realization of fast bump sets.
//!
//! [`realize`] splits `[0,1]` into equal-width canonical-partition letters
//! and builds each bump as a three-piece linear map that stretches its
//! source letter over source-plus-gap and compresses gap-plus-destination
//! onto its destination letter.  All arithmetic is exact, so identity
//! testing decides the word problem soundly; this is the oracle the strand
//! machinery is checked against.
//!
//! The module also implements the conjugation move on dynamical diagrams
//! (`b_i ↦ b_i^{b_j^s}`): the conjugated set is tested for geometric
//! fastness by an exact marker-feasibility procedure, and the induced
//! diagram is read off the new feet order.  Orbit search under these moves
//! groups diagrams generating isomorphic groups.

use std::collections::BTreeSet;

use num::{BigRational, One, Signed, Zero};

use crate::dynamical::{DiagramGroup, DynamicalDiagram, GroupWord};

/// Exact rational scalar; always kept in canonical reduced form.
pub type Rational = BigRational;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// An orientation-preserving piecewise-linear homeomorphism of `[0,1]`,
/// stored as its breakpoints `(x, y)` including `(0,0)` and `(1,1)`, both
/// coordinates strictly increasing.  Collinear interior breakpoints are
/// removed, making the representation canonical: two maps are equal as
/// functions iff their breakpoint lists are equal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PLMap {
    points: Vec<(Rational, Rational)>,
}

impl PLMap {
    pub fn identity() -> PLMap {
        PLMap {
            points: vec![
                (Rational::zero(), Rational::zero()),
                (Rational::one(), Rational::one()),
            ],
        }
    }

    /// Builds a map from breakpoints, normalizing away duplicate and
    /// collinear points.  Panics if the points do not describe an
    /// orientation-preserving homeomorphism of `[0,1]`.
    pub fn new(points: Vec<(Rational, Rational)>) -> PLMap {
        assert!(points.len() >= 2, "need at least the two endpoints");
        let mut cleaned: Vec<(Rational, Rational)> = Vec::with_capacity(points.len());
        for p in points {
            match cleaned.last() {
                Some(last) if *last == p => continue,
                Some(last) => {
                    assert!(last.0 < p.0 && last.1 < p.1, "breakpoints must strictly increase");
                }
                None => {}
            }
            cleaned.push(p);
        }
        assert!(cleaned.first().unwrap().0.is_zero() && cleaned.first().unwrap().1.is_zero());
        assert!(cleaned.last().unwrap().0.is_one() && cleaned.last().unwrap().1.is_one());
        // drop collinear interior points
        let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(cleaned.len());
        for p in cleaned {
            while out.len() >= 2 {
                let a = &out[out.len() - 2];
                let b = &out[out.len() - 1];
                let cross = (&b.0 - &a.0) * (&p.1 - &b.1) - (&b.1 - &a.1) * (&p.0 - &b.0);
                if cross.is_zero() {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        PLMap { points: out }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn is_identity(&self) -> bool {
        self.points.iter().all(|(x, y)| x == y)
    }

    /// Evaluates the map at `x ∈ [0,1]`.
    pub fn eval(&self, x: &Rational) -> Rational {
        assert!(!x.is_negative() && *x <= Rational::one(), "point outside [0,1]");
        let i = match self.points.binary_search_by(|(px, _)| px.cmp(x)) {
            Ok(i) => return self.points[i].1.clone(),
            Err(i) => i,
        };
        let (x0, y0) = &self.points[i - 1];
        let (x1, y1) = &self.points[i];
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }

    /// Evaluates the inverse map at `y ∈ [0,1]`.
    pub fn eval_inv(&self, y: &Rational) -> Rational {
        assert!(!y.is_negative() && *y <= Rational::one(), "point outside [0,1]");
        let i = match self.points.binary_search_by(|(_, py)| py.cmp(y)) {
            Ok(i) => return self.points[i].0.clone(),
            Err(i) => i,
        };
        let (x0, y0) = &self.points[i - 1];
        let (x1, y1) = &self.points[i];
        x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    }

    /// The inverse homeomorphism: breakpoints with coordinates swapped.
    pub fn inverse(&self) -> PLMap {
        PLMap { points: self.points.iter().map(|(x, y)| (y.clone(), x.clone())).collect() }
    }

    /// The composition `x ↦ g(f(x))` where `f` is `self` (apply `self`
    /// first).  Breakpoint count is at most the sum of the inputs' counts.
    pub fn then(&self, g: &PLMap) -> PLMap {
        let mut xs: Vec<Rational> = self.points.iter().map(|(x, _)| x.clone()).collect();
        for (u, _) in &g.points {
            xs.push(self.eval_inv(u));
        }
        xs.sort();
        xs.dedup();
        PLMap::new(
            xs.into_iter()
                .map(|x| {
                    let y = g.eval(&self.eval(&x));
                    (x, y)
                })
                .collect(),
        )
    }

    /// `self` composed with itself `|power|` times, inverted when `power`
    /// is negative.
    pub fn power(&self, power: i32) -> PLMap {
        let base = if power < 0 { self.inverse() } else { self.clone() };
        let mut acc = PLMap::identity();
        for _ in 0..power.unsigned_abs() {
            acc = acc.then(&base);
        }
        acc
    }

    /// Renders breakpoints as `(x,y)` pairs separated by spaces.
    pub fn dump(&self) -> String {
        self.points.iter().map(|(x, y)| format!("({x},{y})")).collect::<Vec<_>>().join(" ")
    }
}

/// An exact realization of a dynamical diagram: one PL bump per edge, the
/// canonical marking, and the partition breakpoints.
#[derive(Clone, Debug)]
pub struct Realization {
    bumps: Vec<PLMap>,
    markers: Vec<Rational>,
    partition_breaks: Vec<Rational>,
    src_letter: Vec<usize>,
    dst_letter: Vec<usize>,
    letter_count: usize,
}

/// Realizes a dynamical diagram on equal-width partition letters: a bump
/// with source letter `p` and destination letter `q` maps `[p·h, (p+1)·h]`
/// linearly onto `[p·h, q·h]` and `[(p+1)·h, (q+1)·h]` linearly onto
/// `[q·h, (q+1)·h]`, fixing everything else, where `h = 1/(2n+k)`.  Its
/// marker is `(p+1)·h`, so its feet are exactly its source and destination
/// letters.
pub fn realize(dd: &DynamicalDiagram) -> Realization {
    let partition = dd.canonical_partition();
    let m = partition.len();
    let n = dd.bump_count();
    let h = |i: usize| rat(i as i64, m as i64);

    let mut bumps = Vec::with_capacity(n);
    let mut markers = Vec::with_capacity(n);
    let mut src_letter = Vec::with_capacity(n);
    let mut dst_letter = Vec::with_capacity(n);
    for b in 0..n {
        let p = partition.source_index(b);
        let q = partition.destination_index(b);
        bumps.push(PLMap::new(vec![
            (Rational::zero(), Rational::zero()),
            (h(p), h(p)),
            (h(p + 1), h(q)),
            (h(q + 1), h(q + 1)),
            (Rational::one(), Rational::one()),
        ]));
        markers.push(h(p + 1));
        src_letter.push(p);
        dst_letter.push(q);
    }
    Realization {
        bumps,
        markers,
        partition_breaks: (0..=m).map(h).collect(),
        src_letter,
        dst_letter,
        letter_count: m,
    }
}

/// Convenience: the realization of a compiled diagram group.
pub fn realize_group(group: &DiagramGroup) -> Realization {
    realize(group.diagram())
}

impl Realization {
    pub fn bump_count(&self) -> usize {
        self.bumps.len()
    }

    pub fn bump(&self, i: usize) -> &PLMap {
        &self.bumps[i]
    }

    pub fn bumps(&self) -> &[PLMap] {
        &self.bumps
    }

    pub fn markers(&self) -> &[Rational] {
        &self.markers
    }

    pub fn partition_breaks(&self) -> &[Rational] {
        &self.partition_breaks
    }

    /// Support interval of bump `i` as (left, right) endpoints.
    pub fn support(&self, i: usize) -> (Rational, Rational) {
        let m = self.letter_count as i64;
        (rat(self.src_letter[i] as i64, m), rat(self.dst_letter[i] as i64 + 1, m))
    }

    /// The feet of bump `i` under the canonical marking: the source
    /// interval `(a, x)` and the destination interval `[x·b, c)`.
    pub fn feet(&self, i: usize) -> ((Rational, Rational), (Rational, Rational)) {
        let (a, c) = self.support(i);
        let x = self.markers[i].clone();
        let xb = self.bumps[i].eval(&x);
        ((a, x), (xb, c))
    }

    /// Applies a group word to a point, bumps acting left to right.
    pub fn apply_word(&self, word: &GroupWord, x: &Rational) -> Rational {
        let mut t = x.clone();
        for &(b, s) in &word.0 {
            t = if s >= 0 { self.bumps[b].eval(&t) } else { self.bumps[b].eval_inv(&t) };
        }
        t
    }

    /// Exact composite of the word as a PL map.
    pub fn word_map(&self, word: &GroupWord) -> PLMap {
        let mut acc = PLMap::identity();
        for &(b, s) in &word.0 {
            let step = if s >= 0 { self.bumps[b].clone() } else { self.bumps[b].inverse() };
            acc = acc.then(&step);
        }
        acc
    }

    /// Decides whether the word acts as the identity, by exact composition.
    pub fn is_identity(&self, word: &GroupWord) -> bool {
        self.word_map(word).is_identity()
    }

    /// The simply local reduction of `word` at `x`: deletes each letter
    /// that fixes the running image of `x`.
    pub fn simply_local_reduction(&self, word: &GroupWord, x: &Rational) -> GroupWord {
        let mut t = x.clone();
        let mut kept = Vec::new();
        for &(b, s) in &word.0 {
            let t2 = if s >= 0 { self.bumps[b].eval(&t) } else { self.bumps[b].eval_inv(&t) };
            if t2 != t {
                kept.push((b, s));
                t = t2;
            }
        }
        GroupWord(kept)
    }

    /// The set of simply local reductions of `word` taken over the interior
    /// of the support partition: the brute-force counterpart of the maximal
    /// path labels of the word's reduced strand diagram.
    ///
    /// The reduction is piecewise constant in the starting point, with cuts
    /// among the preimages of partition breakpoints under the word's
    /// prefixes, so sampling one point strictly inside each complementary
    /// interval captures every value attained on a part of the partition.
    /// The cut points themselves are not sampled: they include points fixed
    /// by every bump (the interval ends and the boundaries between support
    /// components), whose reductions belong to no part.
    pub fn local_reduction_set(&self, word: &GroupWord) -> BTreeSet<GroupWord> {
        let mut cuts: BTreeSet<Rational> = BTreeSet::new();
        for len in 0..=word.len() {
            let back = GroupWord(word.0[..len].to_vec()).inverse();
            for p in &self.partition_breaks {
                cuts.insert(self.apply_word(&back, p));
            }
        }
        let cuts: Vec<Rational> = cuts.into_iter().collect();
        let samples: Vec<Rational> =
            cuts.windows(2).map(|pair| (&pair[0] + &pair[1]) / rat(2, 1)).collect();
        samples.iter().map(|x| self.simply_local_reduction(word, x)).collect()
    }

    /// Text dump: one line per bump listing its breakpoints.
    pub fn dump(&self) -> String {
        self.bumps
            .iter()
            .enumerate()
            .map(|(i, b)| format!("bump {i}: {}", b.dump()))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// A foot interval during fastness checking.  Source feet are open
/// `(lo, hi)`, destination feet half-open `[lo, hi)`; both exclude the
/// upper endpoint, so feet sorted by lower endpoint are pairwise disjoint
/// exactly when each ends no later than the next begins (and no two share
/// a lower endpoint).
#[derive(Clone, Debug)]
struct Foot {
    lo: Rational,
    hi: Rational,
    bump: usize,
    is_source: bool,
}

fn feet_of(
    orbitals: &[(Rational, Rational)],
    maps: &[PLMap],
    markers: &[Rational],
) -> Vec<Foot> {
    let mut feet = Vec::with_capacity(2 * orbitals.len());
    for k in 0..orbitals.len() {
        let (a, c) = &orbitals[k];
        let x = &markers[k];
        feet.push(Foot { lo: a.clone(), hi: x.clone(), bump: k, is_source: true });
        feet.push(Foot { lo: maps[k].eval(x), hi: c.clone(), bump: k, is_source: false });
    }
    feet.sort_by(|a, b| a.lo.cmp(&b.lo));
    feet
}

/// Decides geometric fastness of a set of positive one-orbital maps and
/// returns a witnessing marking.
///
/// Every feet-disjointness constraint is monotone: raising one marker only
/// loosens the constraints it imposes on the others.  Assigning each marker
/// its maximum admissible value in ascending order of left orbital
/// endpoints is therefore optimal, and the set is fast iff the resulting
/// feet are pairwise disjoint, which is verified exactly afterwards.
fn fast_marking(orbitals: &[(Rational, Rational)], maps: &[PLMap]) -> Option<Vec<Rational>> {
    let n = orbitals.len();
    let overlap = |i: usize, j: usize| -> bool {
        let lo = orbitals[i].0.clone().max(orbitals[j].0.clone());
        let hi = orbitals[i].1.clone().min(orbitals[j].1.clone());
        lo < hi
    };
    // Equal endpoints among overlapping orbitals already force feet to
    // intersect.
    for i in 0..n {
        for j in i + 1..n {
            if overlap(i, j) && (orbitals[i].0 == orbitals[j].0 || orbitals[i].1 == orbitals[j].1)
            {
                return None;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| orbitals[i].0.cmp(&orbitals[j].0));

    let mut markers: Vec<Option<Rational>> = vec![None; n];
    for &k in &order {
        let (a_k, c_k) = &orbitals[k];
        let mut upper: Option<Rational> = None;
        let mut tighten = |v: Rational| {
            upper = Some(match upper.take() {
                None => v,
                Some(u) => u.min(v),
            });
        };
        for l in 0..n {
            if l == k || !overlap(k, l) {
                continue;
            }
            let (a_l, c_l) = &orbitals[l];
            if a_l > a_k {
                // source feet must not collide: x_k <= a_l
                tighten(a_l.clone());
            } else if c_l < c_k {
                // crossing with l on the left: x_k <= f_l(x_l)
                let x_l = markers[l].clone().expect("processed in ascending order");
                tighten(maps[l].eval(&x_l));
            }
        }
        let x_k = match upper {
            Some(u) => {
                if u <= *a_k {
                    return None;
                }
                u
            }
            None => (a_k + c_k) / rat(2, 1),
        };
        debug_assert!(x_k < *c_k);
        markers[k] = Some(x_k);
    }
    let markers: Vec<Rational> = markers.into_iter().map(Option::unwrap).collect();

    let feet = feet_of(orbitals, maps, &markers);
    for pair in feet.windows(2) {
        if pair[0].hi > pair[1].lo || pair[0].lo == pair[1].lo {
            return None;
        }
    }
    Some(markers)
}

/// Extracts the dynamical diagram from verified-disjoint feet: positions
/// follow the left-to-right order of the feet, bumps reindexed in source
/// order.
fn diagram_from_feet(
    orbitals: &[(Rational, Rational)],
    maps: &[PLMap],
    markers: &[Rational],
) -> DynamicalDiagram {
    let n = orbitals.len();
    let feet = feet_of(orbitals, maps, markers);
    let mut edges = vec![(0usize, 0usize); n];
    for (pos, foot) in feet.iter().enumerate() {
        if foot.is_source {
            edges[foot.bump].0 = pos + 1;
        } else {
            edges[foot.bump].1 = pos + 1;
        }
    }
    edges.sort();
    DynamicalDiagram::new(edges).expect("disjoint feet order a valid diagram")
}

/// Replaces bump `i` by its conjugate under bump `j` to the signed power
/// `power` and re-extracts the dynamical diagram if the new set is still
/// geometrically fast.  Returns `None` when no marking makes it fast.
pub fn conjugate_diagram(
    dd: &DynamicalDiagram,
    i: usize,
    j: usize,
    power: i32,
) -> Option<DynamicalDiagram> {
    assert!(i != j, "conjugating a bump by itself is the identity move");
    assert!(power != 0, "conjugator power must be nonzero");
    let r = realize(dd);
    let conjugator = r.bump(j).power(power);
    let conjugated = conjugator.inverse().then(r.bump(i)).then(&conjugator);

    let mut maps: Vec<PLMap> = r.bumps().to_vec();
    let mut orbitals: Vec<(Rational, Rational)> =
        (0..r.bump_count()).map(|k| r.support(k)).collect();
    let (a_i, c_i) = orbitals[i].clone();
    orbitals[i] = (conjugator.eval(&a_i), conjugator.eval(&c_i));
    maps[i] = conjugated;

    let markers = fast_marking(&orbitals, &maps)?;
    Some(diagram_from_feet(&orbitals, &maps, &markers))
}

/// The set of conjugation moves used by orbit search: conjugation of one
/// bump by another to powers `±1 ..= ±max_power`.
#[derive(Clone, Copy, Debug)]
pub struct MoveSet {
    pub max_power: u32,
}

impl Default for MoveSet {
    fn default() -> MoveSet {
        MoveSet { max_power: 1 }
    }
}

impl MoveSet {
    pub fn describe(&self) -> String {
        format!("single-bump conjugations by generator powers up to ±{}", self.max_power)
    }
}

/// Partitions `diagrams` into classes connected by conjugation moves whose
/// results stay inside the input set.  Diagrams are compared with bumps
/// reindexed in source order.  Classes are returned as sorted index lists,
/// ordered by smallest member.
pub fn orbit_partition(diagrams: &[DynamicalDiagram], moves: &MoveSet) -> Vec<Vec<usize>> {
    let canonical: Vec<DynamicalDiagram> = diagrams.iter().map(|d| d.sorted()).collect();
    let index_of = |d: &DynamicalDiagram| canonical.iter().position(|c| c == d);

    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..diagrams.len()).collect();

    for (idx, dd) in canonical.iter().enumerate() {
        let n = dd.bump_count();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                for power in 1..=moves.max_power as i32 {
                    for signed in [power, -power] {
                        if let Some(result) = conjugate_diagram(dd, i, j, signed) {
                            if let Some(other) = index_of(&result) {
                                let a = find(&mut parent, idx);
                                let b = find(&mut parent, other);
                                if a != b {
                                    parent[a] = b;
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class: Vec<Option<usize>> = vec![None; diagrams.len()];
    for idx in 0..diagrams.len() {
        let root = find(&mut parent, idx);
        match root_class[root] {
            Some(c) => classes[c].push(idx),
            None => {
                root_class[root] = Some(classes.len());
                classes.push(vec![idx]);
            }
        }
    }
    classes.sort_by_key(|c| c[0]);
    classes
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamical::preset;

    fn real(name: &str) -> Realization {
        realize(&preset(name).unwrap().diagram)
    }

    #[test]
    fn identity_map_detection() {
        assert!(PLMap::identity().is_identity());
        let f = PLMap::new(vec![
            (rat(0, 1), rat(0, 1)),
            (rat(1, 4), rat(1, 2)),
            (rat(1, 1), rat(1, 1)),
        ]);
        assert!(!f.is_identity());
        assert!(f.then(&f.inverse()).is_identity());
    }

    #[test]
    fn crossing_realization_has_expected_breakpoints() {
        let r = real("f");
        // bump 0 maps [0,1/4] onto [0,1/2] and [1/4,3/4] onto [1/2,3/4]
        assert_eq!(
            r.bump(0).breakpoints(),
            &[
                (rat(0, 1), rat(0, 1)),
                (rat(1, 4), rat(1, 2)),
                (rat(3, 4), rat(3, 4)),
                (rat(1, 1), rat(1, 1)),
            ]
        );
        assert_eq!(r.bump(0).eval(&rat(1, 4)), rat(1, 2));
        assert_eq!(r.bump(0).eval(&rat(1, 2)), rat(5, 8));
        assert_eq!(r.bump(0).eval(&rat(3, 4)), rat(3, 4));
    }

    #[test]
    fn disjoint_supports_in_zxz_realization() {
        let r = real("zxz");
        let (_, c0) = r.support(0);
        let (a1, _) = r.support(1);
        assert!(c0 <= a1);
    }

    #[test]
    fn feet_are_disjoint_and_tile_letters() {
        for n in 1..=4 {
            for dd in DynamicalDiagram::enumerate(n).unwrap() {
                let r = realize(&dd);
                let mut feet = Vec::new();
                for b in 0..r.bump_count() {
                    let (src, dst) = r.feet(b);
                    feet.push(src);
                    feet.push(dst);
                }
                feet.sort_by(|a, b| a.0.cmp(&b.0));
                for pair in feet.windows(2) {
                    assert!(pair[0].1 <= pair[1].0, "feet overlap in {dd}");
                }
                let width = rat(1, r.partition_breaks().len() as i64 - 1);
                for (lo, hi) in &feet {
                    assert_eq!(hi - lo, width);
                }
            }
        }
    }

    #[test]
    fn apply_word_left_to_right() {
        let r = real("f");
        assert_eq!(r.apply_word(&GroupWord::empty(), &rat(1, 3)), rat(1, 3));
        assert_eq!(r.apply_word(&GroupWord(vec![(0, 1)]), &rat(1, 4)), rat(1, 2));
        let w = GroupWord(vec![(0, 1), (1, 1), (0, -1)]);
        let x = rat(1, 5);
        let y = r.apply_word(&w, &x);
        assert_eq!(r.apply_word(&w.inverse(), &y), x);
    }

    #[test]
    fn identity_oracle_on_two_bump_groups() {
        let zxz = real("zxz");
        let f = real("f");
        let commutator = GroupWord(vec![(0, -1), (1, -1), (0, 1), (1, 1)]);
        assert!(zxz.is_identity(&commutator));
        assert!(!f.is_identity(&commutator));
        assert!(zxz.is_identity(&GroupWord::empty()));
    }

    #[test]
    fn wreath_relation_holds() {
        let r = real("wreath");
        // Outer bump 0 carries inner bump 1 off its own support, so the
        // inner bump commutes with its conjugate.
        let (f, g) = (0usize, 1usize);
        let conj: Vec<(usize, i8)> = vec![(f, -1), (g, 1), (f, 1)];
        let mut word = vec![(g, -1)];
        word.extend(conj.iter().rev().map(|&(b, s)| (b, -s)));
        word.push((g, 1));
        word.extend(conj.iter().copied());
        assert!(r.is_identity(&GroupWord(word)));
        let noncomm = GroupWord(vec![(g, -1), (f, -1), (g, 1), (f, 1)]);
        assert!(!r.is_identity(&noncomm));
    }

    #[test]
    fn simply_local_reduction_examples() {
        let r = real("f");
        let empty = GroupWord::empty();
        assert_eq!(r.simply_local_reduction(&empty, &rat(1, 2)), empty);
        // a point outside the support of bump 0 deletes it
        let w = GroupWord(vec![(0, 1)]);
        assert_eq!(r.simply_local_reduction(&w, &rat(7, 8)), empty);
        assert_eq!(r.simply_local_reduction(&w, &rat(1, 8)), w);
        // idempotent at the same point
        let long = GroupWord(vec![(0, 1), (1, -1), (0, 1), (1, 1)]);
        let x = rat(3, 16);
        let once = r.simply_local_reduction(&long, &x);
        assert_eq!(r.simply_local_reduction(&once, &x), once);
    }

    #[test]
    fn local_reduction_set_of_single_letter() {
        let r = real("f");
        let w = GroupWord(vec![(0, 1)]);
        let expected: BTreeSet<GroupWord> = [GroupWord::empty(), w.clone()].into_iter().collect();
        assert_eq!(r.local_reduction_set(&w), expected);
        assert_eq!(r.local_reduction_set(&GroupWord::empty()).len(), 1);
    }

    #[test]
    fn word_map_breakpoint_count_is_bounded() {
        let r = real("pf4");
        let w = GroupWord(vec![(0, 1), (1, 1), (2, -1), (3, 1), (0, -1)]);
        let mut bound = 2;
        for &(b, _) in &w.0 {
            bound += r.bump(b).breakpoints().len();
        }
        assert!(r.word_map(&w).breakpoints().len() <= bound);
    }

    #[test]
    fn composition_is_associative() {
        let r = real("chain3");
        let (a, b, c) = (r.bump(0), r.bump(1), r.bump(2));
        assert_eq!(a.then(b).then(c), a.then(&b.then(c)));
    }

    #[test]
    fn conjugating_disjoint_bump_keeps_the_diagram() {
        let dd = preset("zxz").unwrap().diagram;
        let out = conjugate_diagram(&dd, 0, 1, 1).expect("disjoint conjugation stays fast");
        assert_eq!(out, dd);
    }

    #[test]
    fn conjugating_crossing_bump_gives_crossing_diagram() {
        let dd = preset("f").unwrap().diagram;
        let out = conjugate_diagram(&dd, 0, 1, 1).expect("conjugate stays fast");
        assert_eq!(out, dd);
    }

    #[test]
    fn orbit_of_two_bump_diagrams_is_discrete() {
        let all = DynamicalDiagram::enumerate(2).unwrap();
        let classes = orbit_partition(&all, &MoveSet::default());
        assert_eq!(classes.len(), 3);
    }

    #[test]
    fn orbit_of_singleton_is_one_class() {
        let one = vec![preset("pf4").unwrap().diagram];
        assert_eq!(orbit_partition(&one, &MoveSet::default()), vec![vec![0]]);
    }
}
