//! Dynamical diagrams of geometrically fast bump sets and the diagram-group
//! model they compile to.
//!
//! A dynamical diagram records `n` bumps as a perfect matching of `2n`
//! ordered foot positions, each bump an edge from its source foot to its
//! destination foot.  The canonical partition lists one letter per foot in
//! position order, with a fundamental-domain gap letter inserted between the
//! feet of each isolated bump.  Each bump with source letter `A`,
//! destination letter `B` and gap word `G` between them contributes the
//! relations `A = A·G` and `B = G·B`; the base word is the product of all
//! letters.  [`DiagramGroup`] bundles the compiled presentation with the
//! two-cell generator diagrams, the evaluation map from group words to
//! reduced strand diagrams, and its inverse factorization.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::presentation::{GenId, Presentation, Word};
use crate::strand::{
    CellVertex, Edge, EdgeOrigin, EdgeTarget, Orientation, PathLabeling, StrandDiagram,
    StrandError,
};

/// Practical bound on the bump count for enumeration and brute-force tools.
pub const MAX_BUMPS: usize = 6;

/// `n` bumps as a perfect matching of the positions `1..=2n`, each edge
/// running from its source position to its destination position.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DynamicalDiagram {
    edges: Vec<(usize, usize)>,
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum DiagramError {
    #[error("position {position} out of range 1..={max}")]
    PositionOutOfRange { position: usize, max: usize },
    #[error("position {position} repeated")]
    RepeatedPosition { position: usize },
    #[error("bump {bump} has source {src} >= destination {dst}")]
    NegativeBump { bump: usize, src: usize, dst: usize },
    #[error("bump count {n} out of range 1..={max}")]
    BumpCountOutOfRange { n: usize, max: usize },
    #[error("bump index {bump} out of range")]
    BadBumpIndex { bump: usize },
    #[error("invalid dynamical diagram spec: {0}")]
    BadSpec(String),
    #[error("diagram is not over this group's presentation")]
    ForeignDiagram,
    #[error("expected a ({word}, {word})-diagram")]
    WrongBoundary { word: String },
    #[error("factorization got stuck; the diagram violates the compiled shape")]
    FactorizationStuck,
    #[error(transparent)]
    Strand(#[from] StrandError),
}

impl DynamicalDiagram {
    /// Validates the matching and positivity invariants.
    pub fn new(edges: Vec<(usize, usize)>) -> Result<DynamicalDiagram, DiagramError> {
        let n = edges.len();
        let mut seen = vec![false; 2 * n + 1];
        for (i, &(src, dst)) in edges.iter().enumerate() {
            for pos in [src, dst] {
                if pos < 1 || pos > 2 * n {
                    return Err(DiagramError::PositionOutOfRange { position: pos, max: 2 * n });
                }
                if seen[pos] {
                    return Err(DiagramError::RepeatedPosition { position: pos });
                }
                seen[pos] = true;
            }
            if src >= dst {
                return Err(DiagramError::NegativeBump { bump: i, src, dst });
            }
        }
        Ok(DynamicalDiagram { edges })
    }

    pub fn bump_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// A bump is isolated when its feet sit at adjacent positions, so no
    /// other foot lies inside its support.
    pub fn is_isolated(&self, bump: usize) -> bool {
        let (src, dst) = self.edges[bump];
        dst == src + 1
    }

    /// The same matching with bumps reindexed in source order.
    pub fn sorted(&self) -> DynamicalDiagram {
        let mut edges = self.edges.clone();
        edges.sort();
        DynamicalDiagram { edges }
    }

    /// Parses the text form `dd <n>: <s1>-<d1> <s2>-<d2> ...`.
    pub fn parse(spec: &str) -> Result<DynamicalDiagram, DiagramError> {
        let bad = |msg: &str| DiagramError::BadSpec(msg.to_string());
        let rest = spec.trim().strip_prefix("dd").ok_or_else(|| bad("missing `dd` prefix"))?;
        let (count, pairs) = rest.split_once(':').ok_or_else(|| bad("missing `:`"))?;
        let n: usize = count.trim().parse().map_err(|_| bad("bump count is not a number"))?;
        let mut edges = Vec::new();
        for pair in pairs.split_whitespace() {
            let (s, d) = pair.split_once('-').ok_or_else(|| bad("expected `src-dst` pair"))?;
            let src = s.parse().map_err(|_| bad("bad source position"))?;
            let dst = d.parse().map_err(|_| bad("bad destination position"))?;
            edges.push((src, dst));
        }
        if edges.len() != n {
            return Err(bad("bump count does not match edge list"));
        }
        DynamicalDiagram::new(edges)
    }

    /// Crossing graph connectivity: an edge joins two bumps whose supports
    /// overlap without containment.  Reducible diagrams decompose into
    /// products of smaller ones.
    pub fn is_irreducible(&self) -> bool {
        let n = self.bump_count();
        if n == 0 {
            return false;
        }
        let crosses = |a: (usize, usize), b: (usize, usize)| -> bool {
            (a.0 < b.0 && b.0 < a.1 && a.1 < b.1) || (b.0 < a.0 && a.0 < b.1 && b.1 < a.1)
        };
        let mut reached = vec![false; n];
        let mut stack = vec![0usize];
        reached[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if !reached[j] && crosses(self.edges[i], self.edges[j]) {
                    reached[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == n
    }

    /// All dynamical diagrams with `n` bumps, in lexicographic order of
    /// their edge lists.  There are `(2n-1)!!` of them.
    pub fn enumerate(n: usize) -> Result<Vec<DynamicalDiagram>, DiagramError> {
        if n < 1 || n > MAX_BUMPS {
            return Err(DiagramError::BumpCountOutOfRange { n, max: MAX_BUMPS });
        }
        fn rec(
            used: &mut Vec<bool>,
            edges: &mut Vec<(usize, usize)>,
            result: &mut Vec<DynamicalDiagram>,
        ) {
            let src = match (1..used.len()).find(|&p| !used[p]) {
                Some(p) => p,
                None => {
                    result.push(DynamicalDiagram { edges: edges.clone() });
                    return;
                }
            };
            used[src] = true;
            for dst in src + 1..used.len() {
                if !used[dst] {
                    used[dst] = true;
                    edges.push((src, dst));
                    rec(used, edges, result);
                    edges.pop();
                    used[dst] = false;
                }
            }
            used[src] = false;
        }
        let mut result = Vec::new();
        rec(&mut vec![false; 2 * n + 1], &mut Vec::with_capacity(n), &mut result);
        Ok(result)
    }

    /// The unique partition of the bumps into maximal stretched transition
    /// chains.  Consecutive chain members interleave
    /// (`s_i < s_j < d_i < d_j`) with no other foot inside the overlap
    /// `(s_j, d_i)`.
    pub fn stretched_chains(&self) -> TransitionChainPartition {
        let n = self.bump_count();
        let linked = |i: usize, j: usize| -> bool {
            let (si, di) = self.edges[i];
            let (sj, dj) = self.edges[j];
            si < sj
                && sj < di
                && di < dj
                && !self.edges.iter().flat_map(|&(s, d)| [s, d]).any(|p| sj < p && p < di)
        };
        let mut successor = vec![None; n];
        let mut has_pred = vec![false; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && linked(i, j) {
                    debug_assert!(successor[i].is_none(), "stretched successor not unique");
                    successor[i] = Some(j);
                    has_pred[j] = true;
                }
            }
        }
        let mut heads: Vec<usize> = (0..n).filter(|&i| !has_pred[i]).collect();
        heads.sort_by_key(|&i| self.edges[i].0);
        let chains = heads
            .into_iter()
            .map(|head| {
                let mut chain = vec![head];
                let mut cur = head;
                while let Some(next) = successor[cur] {
                    chain.push(next);
                    cur = next;
                }
                chain
            })
            .collect();
        TransitionChainPartition { chains }
    }

    /// One letter per foot in position order, with a gap letter inserted
    /// between the feet of each isolated bump.
    pub fn canonical_partition(&self) -> CanonicalPartition {
        let n = self.bump_count();
        let mut role_at = vec![None; 2 * n + 1];
        for (i, &(src, dst)) in self.edges.iter().enumerate() {
            role_at[src] = Some(PartitionLetter::Source(i));
            role_at[dst] = Some(PartitionLetter::Destination(i));
        }
        let mut letters = Vec::new();
        for pos in 1..=2 * n {
            let role = role_at[pos].expect("perfect matching covers all positions");
            letters.push(role);
            if let PartitionLetter::Source(bump) = role {
                if self.is_isolated(bump) {
                    letters.push(PartitionLetter::Gap(bump));
                }
            }
        }
        CanonicalPartition { letters }
    }
}

impl fmt::Display for DynamicalDiagram {
    /// Formats as `dd <n>: <s1>-<d1> ...`, the parseable text form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dd {}:", self.bump_count())?;
        for (src, dst) in &self.edges {
            write!(f, " {src}-{dst}")?;
        }
        Ok(())
    }
}

/// One letter of the canonical partition, tagged with its role.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PartitionLetter {
    Source(usize),
    Destination(usize),
    Gap(usize),
}

/// The canonical partition of a dynamical diagram: `2n + k` letters where
/// `k` is the number of isolated bumps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CanonicalPartition {
    pub letters: Vec<PartitionLetter>,
}

impl CanonicalPartition {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Index of the source letter of `bump`.
    pub fn source_index(&self, bump: usize) -> usize {
        self.letters
            .iter()
            .position(|&l| l == PartitionLetter::Source(bump))
            .expect("bump has a source letter")
    }

    /// Index of the destination letter of `bump`.
    pub fn destination_index(&self, bump: usize) -> usize {
        self.letters
            .iter()
            .position(|&l| l == PartitionLetter::Destination(bump))
            .expect("bump has a destination letter")
    }

    /// Default letter names: feet take `A`, `B`, `C`, ... in position order;
    /// gaps take `G` when there is a single gap and no foot named `G`, and
    /// `G1`, `G2`, ... otherwise.
    pub fn default_names(&self) -> Vec<String> {
        let feet = self.letters.iter().filter(|l| !matches!(l, PartitionLetter::Gap(_))).count();
        let gaps = self.letters.len() - feet;
        let plain_gap = gaps == 1 && feet < 7;
        let mut foot = 0usize;
        let mut gap = 0usize;
        self.letters
            .iter()
            .map(|l| match l {
                PartitionLetter::Gap(_) => {
                    gap += 1;
                    if plain_gap {
                        "G".to_string()
                    } else {
                        format!("G{gap}")
                    }
                }
                _ => {
                    let name = char::from(b'A' + foot as u8).to_string();
                    foot += 1;
                    name
                }
            })
            .collect()
    }
}

/// The partition of the bump set into maximal stretched transition chains,
/// each chain listed in ascending source order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TransitionChainPartition {
    pub chains: Vec<Vec<usize>>,
}

/// A word in the bumps: letters are `(bump index, ±1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct GroupWord(pub Vec<(usize, i8)>);

impl GroupWord {
    pub fn empty() -> GroupWord {
        GroupWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|&(b, s)| (b, -s)).collect())
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        GroupWord(letters)
    }

    /// Cancels adjacent mutually inverse letters until none remain.
    pub fn free_reduce(&self) -> GroupWord {
        free_reduce(&self.0)
    }
}

/// Free reduction of a signed-letter sequence.
pub fn free_reduce(letters: &[(usize, i8)]) -> GroupWord {
    let mut out: Vec<(usize, i8)> = Vec::with_capacity(letters.len());
    for &(b, s) in letters {
        match out.last() {
            Some(&(lb, ls)) if lb == b && ls == -s => {
                out.pop();
            }
            _ => out.push((b, s)),
        }
    }
    GroupWord(out)
}

/// A named built-in dynamical diagram, optionally with bespoke letter names
/// for its canonical partition.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub diagram: DynamicalDiagram,
    pub letter_names: Option<Vec<&'static str>>,
}

pub const PRESET_NAMES: [&str; 6] = ["zxz", "wreath", "f", "chain3", "chain4", "pf4"];

/// Looks up a built-in configuration by name.
pub fn preset(name: &str) -> Option<Preset> {
    let dd = |edges: &[(usize, usize)]| {
        DynamicalDiagram::new(edges.to_vec()).expect("valid preset diagram")
    };
    let p = match name {
        "zxz" => Preset { name: "zxz", diagram: dd(&[(1, 2), (3, 4)]), letter_names: None },
        "wreath" => Preset { name: "wreath", diagram: dd(&[(1, 4), (2, 3)]), letter_names: None },
        "f" => Preset { name: "f", diagram: dd(&[(1, 3), (2, 4)]), letter_names: None },
        "chain3" => {
            Preset { name: "chain3", diagram: dd(&[(1, 3), (2, 5), (4, 6)]), letter_names: None }
        }
        "chain4" => Preset {
            name: "chain4",
            diagram: dd(&[(1, 3), (2, 5), (4, 7), (6, 8)]),
            letter_names: None,
        },
        "pf4" => Preset {
            name: "pf4",
            diagram: dd(&[(1, 5), (2, 7), (3, 6), (4, 8)]),
            letter_names: Some(vec!["A", "B", "C", "D", "Db", "Cb", "Bb", "Ab"]),
        },
        _ => return None,
    };
    Some(p)
}

/// Parses either a preset name or a `dd n: ...` spec, returning the diagram
/// and the preset's letter names when it has bespoke ones.
pub fn parse_diagram_spec(
    spec: &str,
) -> Result<(DynamicalDiagram, Option<Vec<String>>), DiagramError> {
    if let Some(p) = preset(spec.trim()) {
        let names = p.letter_names.map(|ns| ns.iter().map(|s| s.to_string()).collect());
        return Ok((p.diagram, names));
    }
    Ok((DynamicalDiagram::parse(spec)?, None))
}

/// The compiled diagram-group model of a dynamical diagram: the semigroup
/// presentation, the base word, generator diagrams, evaluation of group
/// words, and factorization of diagrams back into group words.
///
/// Relation ids are laid out as all source relations in bump order followed
/// by all destination relations in bump order.
#[derive(Clone, Debug)]
pub struct DiagramGroup {
    diagram: DynamicalDiagram,
    partition: CanonicalPartition,
    pres: Arc<Presentation>,
    src_letter: Vec<usize>,
    dst_letter: Vec<usize>,
}

impl DiagramGroup {
    pub fn new(diagram: DynamicalDiagram) -> DiagramGroup {
        Self::with_names(diagram, None)
    }

    /// Compiles `diagram`, naming the partition letters `names` when given
    /// (one name per letter) and with the default scheme otherwise.
    pub fn with_names(diagram: DynamicalDiagram, names: Option<Vec<String>>) -> DiagramGroup {
        let partition = diagram.canonical_partition();
        let names = names.unwrap_or_else(|| partition.default_names());
        assert_eq!(names.len(), partition.len(), "one name per partition letter");

        let n = diagram.bump_count();
        let src_letter: Vec<usize> = (0..n).map(|b| partition.source_index(b)).collect();
        let dst_letter: Vec<usize> = (0..n).map(|b| partition.destination_index(b)).collect();

        let letter = |i: usize| GenId(i as u32);
        let gap_word =
            |b: usize| -> Word { (src_letter[b] + 1..dst_letter[b]).map(letter).collect() };
        let mut relations: Vec<(Word, Word)> = Vec::with_capacity(2 * n);
        for b in 0..n {
            // source relation: A = A G
            let mut rhs: Word = vec![letter(src_letter[b])];
            rhs.extend(gap_word(b));
            relations.push((vec![letter(src_letter[b])], rhs));
        }
        for b in 0..n {
            // destination relation: B = G B
            let mut rhs: Word = gap_word(b);
            rhs.push(letter(dst_letter[b]));
            relations.push((vec![letter(dst_letter[b])], rhs));
        }
        let base: Word = (0..partition.len()).map(letter).collect();
        let pres = Presentation::new(names, relations, Some(base))
            .expect("compiled presentation is well formed");
        debug_assert!(pres.is_tree_like());

        DiagramGroup { diagram, partition, pres: pres.into_arc(), src_letter, dst_letter }
    }

    pub fn from_preset(p: &Preset) -> DiagramGroup {
        let names = p.letter_names.as_ref().map(|ns| ns.iter().map(|s| s.to_string()).collect());
        DiagramGroup::with_names(p.diagram.clone(), names)
    }

    pub fn diagram(&self) -> &DynamicalDiagram {
        &self.diagram
    }

    pub fn partition(&self) -> &CanonicalPartition {
        &self.partition
    }

    pub fn presentation(&self) -> &Arc<Presentation> {
        &self.pres
    }

    pub fn bump_count(&self) -> usize {
        self.diagram.bump_count()
    }

    pub fn base(&self) -> &Word {
        self.pres.base().expect("compiled presentation has a base word")
    }

    /// Letter index of the source of `bump` in the canonical partition.
    pub fn source_letter(&self, bump: usize) -> usize {
        self.src_letter[bump]
    }

    /// Letter index of the destination of `bump`.
    pub fn destination_letter(&self, bump: usize) -> usize {
        self.dst_letter[bump]
    }

    fn src_relation(&self, bump: usize) -> usize {
        bump
    }

    fn dst_relation(&self, bump: usize) -> usize {
        self.bump_count() + bump
    }

    /// Tagging of interior vertices by bumps: the forward source cell and
    /// the backward destination cell of bump `b` both carry `+b`, their
    /// mirror images `-b`.
    pub fn labeling(&self) -> PathLabeling {
        let n = self.bump_count();
        let mut roles = Vec::with_capacity(2 * n);
        for b in 0..n {
            roles.push((b, Orientation::Forward));
        }
        for b in 0..n {
            roles.push((b, Orientation::Backward));
        }
        PathLabeling::new(roles)
    }

    /// The trivial diagram on the base word.
    pub fn identity(&self) -> StrandDiagram {
        StrandDiagram::trivial(self.pres.clone(), self.base()).expect("base word is never empty")
    }

    /// The two-cell diagram representing `bump` (sign `-1` for its inverse):
    /// a split on the source letter and a merge onto the destination letter,
    /// with trivial strands elsewhere.  Top and bottom labels both equal the
    /// base word.
    pub fn generator_diagram(&self, bump: usize, sign: i8) -> Result<StrandDiagram, DiagramError> {
        if bump >= self.bump_count() {
            return Err(DiagramError::BadBumpIndex { bump });
        }
        let p = self.src_letter[bump];
        let q = self.dst_letter[bump];
        let letter = |i: usize| GenId(i as u32);
        let prefix: Word = (0..p).map(letter).collect();
        let suffix: Word = (q + 1..self.partition.len()).map(letter).collect();

        let split = StrandDiagram::atom(
            self.pres.clone(),
            &prefix,
            self.src_relation(bump),
            Orientation::Forward,
            &[],
        )?;
        let merge = StrandDiagram::atom(
            self.pres.clone(),
            &[],
            self.dst_relation(bump),
            Orientation::Backward,
            &suffix,
        )?;
        let beta = split.sum(&merge)?;
        debug_assert_eq!(beta.top_word(), *self.base());
        debug_assert_eq!(beta.bottom_word(), *self.base());
        Ok(if sign < 0 { beta.invert() } else { beta })
    }

    /// Evaluates a group word to the product of generator diagrams without
    /// reducing, composing left to right.
    pub fn word_diagram_unreduced(&self, word: &GroupWord) -> Result<StrandDiagram, DiagramError> {
        let mut acc = self.identity();
        for &(bump, sign) in &word.0 {
            acc = acc.compose(&self.generator_diagram(bump, sign)?)?;
        }
        Ok(acc)
    }

    /// Evaluates a group word to its reduced strand diagram.  The empty word
    /// maps to the trivial diagram.
    pub fn delta(&self, word: &GroupWord) -> Result<StrandDiagram, DiagramError> {
        let mut acc = self.identity();
        for &(bump, sign) in &word.0 {
            acc = acc.compose(&self.generator_diagram(bump, sign)?)?.reduce();
        }
        Ok(acc)
    }

    /// Writes a `(base, base)`-diagram as a group word by peeling generator
    /// diagrams off the bottom boundary.  An embedded generator diagram or
    /// inverse peels directly and removes two cells.  When only unpaired
    /// backward bottom cells remain, one of them gets a dipole inserted
    /// along the bottom path, which nets to replacing the cell by its
    /// partner one level up; since that conversion keeps the cell count, the
    /// choice of cell is explored depth-first with a visited set until a
    /// cell-removing peel becomes available.  The result satisfies
    /// `delta(factorize(d)) == reduce(d)` on canonical keys.
    pub fn factorize(&self, d: &StrandDiagram) -> Result<GroupWord, DiagramError> {
        if **d.presentation() != *self.pres {
            return Err(DiagramError::ForeignDiagram);
        }
        if d.top_word() != *self.base() || d.bottom_word() != *self.base() {
            return Err(DiagramError::WrongBoundary {
                word: self.pres.word_string(self.base()),
            });
        }
        let mut current = d.reduce();
        let mut reversed: Vec<(usize, i8)> = Vec::new();
        while current.vertex_count() > 0 {
            if let Some((letter, next)) = self.find_embedded_peel(&current)? {
                reversed.push(letter);
                current = next;
                continue;
            }
            let (letters, next) = self.conversion_search(&current)?;
            reversed.extend(letters);
            current = next;
        }
        reversed.reverse();
        Ok(GroupWord(reversed))
    }

    /// Producer vertex of a bottom slot when it is a bottom cell, i.e. all
    /// of its out-edges reach the bottom boundary.
    fn bottom_cell_at(&self, d: &StrandDiagram, slot: usize) -> Option<usize> {
        match d.edges()[d.sink_edges()[slot]].from {
            EdgeOrigin::Vertex(v) => d.vertices()[v]
                .out_edges
                .iter()
                .all(|&e| matches!(d.edges()[e].to, EdgeTarget::Sink(_)))
                .then_some(v),
            EdgeOrigin::Source(_) => None,
        }
    }

    /// Peels one embedded generator diagram (or inverse) off the bottom, if
    /// any is present.
    fn find_embedded_peel(
        &self,
        d: &StrandDiagram,
    ) -> Result<Option<((usize, i8), StrandDiagram)>, DiagramError> {
        let vertex_is = |v: usize, relation: usize, orientation: Orientation| -> bool {
            let cell = &d.vertices()[v];
            cell.relation == relation && cell.orientation == orientation
        };
        for b in 0..self.bump_count() {
            let (p, q) = (self.src_letter[b], self.dst_letter[b]);
            if let (Some(left), Some(right)) =
                (self.bottom_cell_at(d, p), self.bottom_cell_at(d, q))
            {
                // Embedded generator diagram: forward source cell over slots
                // p..q-1 plus backward destination cell at slot q.
                if vertex_is(left, self.src_relation(b), Orientation::Forward)
                    && vertex_is(right, self.dst_relation(b), Orientation::Backward)
                {
                    return Ok(Some(((b, 1), self.peel_pair(d, b, left, right)?)));
                }
                // Embedded inverse: backward source cell at slot p plus
                // forward destination cell over slots p+1..q.
                if vertex_is(left, self.src_relation(b), Orientation::Backward)
                    && vertex_is(right, self.dst_relation(b), Orientation::Forward)
                {
                    return Ok(Some(((b, -1), self.peel_pair(d, b, left, right)?)));
                }
            }
        }
        Ok(None)
    }

    /// All dipole-insertion conversions applicable to `d`: one per backward
    /// bottom cell.  Cells whose relation has a forward counterpart
    /// somewhere in the diagram come first; those are the ones whose
    /// conversion the surjectivity argument sanctions.
    fn conversion_candidates(&self, d: &StrandDiagram) -> Vec<(usize, usize, bool)> {
        let n = self.bump_count();
        let has_forward = |relation: usize| {
            d.vertices()
                .iter()
                .any(|c| c.relation == relation && c.orientation == Orientation::Forward)
        };
        let mut preferred = Vec::new();
        let mut fallback = Vec::new();
        for slot in 0..self.partition.len() {
            let Some(v) = self.bottom_cell_at(d, slot) else { continue };
            let cell = &d.vertices()[v];
            if cell.orientation != Orientation::Backward {
                continue;
            }
            let b = cell.relation % n;
            let at_source = cell.relation == self.src_relation(b);
            // a merge appears once per bump block; key the candidate on its
            // defining slot to avoid duplicates
            let defining = if at_source { self.src_letter[b] } else { self.dst_letter[b] };
            if slot != defining {
                continue;
            }
            if has_forward(cell.relation) {
                preferred.push((b, v, at_source));
            } else {
                fallback.push((b, v, at_source));
            }
        }
        preferred.extend(fallback);
        preferred
    }

    /// Depth-first search over conversion choices until some state admits a
    /// cell-removing step (an embedded peel, a dipole created by the
    /// conversion, or no cells at all).  Conversions preserve the element
    /// represented, so any path found is a correct factorization prefix.
    fn conversion_search(
        &self,
        start: &StrandDiagram,
    ) -> Result<(Vec<(usize, i8)>, StrandDiagram), DiagramError> {
        let start_cells = start.vertex_count();
        let mut visited: BTreeSet<Vec<u8>> = BTreeSet::new();
        visited.insert(start.canonical_key()?);
        let mut stack: Vec<(StrandDiagram, Vec<(usize, i8)>)> = vec![(start.clone(), Vec::new())];
        while let Some((state, path)) = stack.pop() {
            for (b, v, at_source) in self.conversion_candidates(&state) {
                let sign = if at_source { -1 } else { 1 };
                let next = self.convert_unpaired(&state, b, v, at_source)?.reduce();
                let mut next_path = path.clone();
                next_path.push((b, sign));
                if next.vertex_count() < start_cells
                    || next.vertex_count() == 0
                    || self.find_embedded_peel(&next)?.is_some()
                {
                    return Ok((next_path, next));
                }
                let key = next.canonical_key()?;
                if visited.insert(key) {
                    stack.push((next, next_path));
                }
            }
        }
        Err(DiagramError::FactorizationStuck)
    }

    /// Removes the two cells of an embedded generator diagram (or inverse).
    /// `first` produces the left block of bottom slots, `second` the right;
    /// their in-edges become the new bottom boundary over slots `p..=q`.
    fn peel_pair(
        &self,
        d: &StrandDiagram,
        bump: usize,
        first: usize,
        second: usize,
    ) -> Result<StrandDiagram, DiagramError> {
        let (p, q) = (self.src_letter[bump], self.dst_letter[bump]);
        let mut edges: Vec<Edge> = d.edges().to_vec();
        let mut new_sinks = d.sink_edges().to_vec();

        let mut replacement = Vec::with_capacity(q - p + 1);
        replacement.extend(d.vertices()[first].in_edges.iter().copied());
        replacement.extend(d.vertices()[second].in_edges.iter().copied());
        debug_assert_eq!(replacement.len(), q - p + 1);
        for (offset, &e) in replacement.iter().enumerate() {
            edges[e].to = EdgeTarget::Sink(p + offset);
            new_sinks[p + offset] = e;
        }

        let dead_edges: BTreeSet<usize> = d.vertices()[first]
            .out_edges
            .iter()
            .chain(d.vertices()[second].out_edges.iter())
            .copied()
            .collect();
        self.rebuild(d, edges, new_sinks, &dead_edges, &[first, second], &[])
    }

    /// Handles an unpaired backward bottom cell `v` of `bump`.  Inserting a
    /// dipole along the rest of the bump's bottom block and peeling nets to:
    /// remove `v`, reroute the adjacent bottom block into a fresh backward
    /// partner cell one level up, and expose `v`'s in-edges as new bottom
    /// edges.
    fn convert_unpaired(
        &self,
        d: &StrandDiagram,
        bump: usize,
        v: usize,
        at_source: bool,
    ) -> Result<StrandDiagram, DiagramError> {
        let (p, q) = (self.src_letter[bump], self.dst_letter[bump]);
        let mut edges: Vec<Edge> = d.edges().to_vec();
        let mut new_sinks = d.sink_edges().to_vec();
        let new_vertex_id = d.vertex_count();

        // Block of bottom slots the fresh partner cell absorbs, the slot
        // where its output letter surfaces, and where v's in-edges surface.
        let (absorbed, partner_rel, fresh_label, fresh_slot, exposed_at) = if at_source {
            // v is a backward source cell at slot p; the partner is a
            // backward destination cell over slots p+1..q.
            ((p + 1..=q).collect::<Vec<_>>(), self.dst_relation(bump), q, q, p)
        } else {
            // v is a backward destination cell at slot q; the partner is a
            // backward source cell over slots p..q-1.
            ((p..q).collect::<Vec<_>>(), self.src_relation(bump), p, p, p + 1)
        };

        let absorbed_edges: Vec<usize> = absorbed.iter().map(|&s| d.sink_edges()[s]).collect();
        for &e in &absorbed_edges {
            edges[e].to = EdgeTarget::Vertex(new_vertex_id);
        }
        let fresh_edge_id = edges.len();
        edges.push(Edge {
            label: GenId(fresh_label as u32),
            from: EdgeOrigin::Vertex(new_vertex_id),
            to: EdgeTarget::Sink(fresh_slot),
        });
        new_sinks[fresh_slot] = fresh_edge_id;
        let partner = CellVertex {
            relation: partner_rel,
            orientation: Orientation::Backward,
            in_edges: absorbed_edges,
            out_edges: vec![fresh_edge_id],
        };

        let exposed: Vec<usize> = d.vertices()[v].in_edges.clone();
        for (offset, &e) in exposed.iter().enumerate() {
            edges[e].to = EdgeTarget::Sink(exposed_at + offset);
            new_sinks[exposed_at + offset] = e;
        }

        let dead_edges: BTreeSet<usize> = d.vertices()[v].out_edges.iter().copied().collect();
        self.rebuild(d, edges, new_sinks, &dead_edges, &[v], std::slice::from_ref(&partner))
    }

    /// Compacts a surgered edge/vertex arena back into a valid diagram.
    fn rebuild(
        &self,
        d: &StrandDiagram,
        edges: Vec<Edge>,
        sinks: Vec<usize>,
        dead_edges: &BTreeSet<usize>,
        dead_vertices: &[usize],
        appended: &[CellVertex],
    ) -> Result<StrandDiagram, DiagramError> {
        let mut edge_rank = vec![usize::MAX; edges.len()];
        let mut kept_edges = Vec::with_capacity(edges.len());
        for (e, edge) in edges.iter().enumerate() {
            if !dead_edges.contains(&e) {
                edge_rank[e] = kept_edges.len();
                kept_edges.push(edge.clone());
            }
        }
        let total_vertices = d.vertex_count() + appended.len();
        let mut vertex_rank = vec![usize::MAX; total_vertices];
        let mut kept_vertices = Vec::new();
        for v in 0..total_vertices {
            if dead_vertices.contains(&v) {
                continue;
            }
            vertex_rank[v] = kept_vertices.len();
            let cell = if v < d.vertex_count() {
                d.vertices()[v].clone()
            } else {
                appended[v - d.vertex_count()].clone()
            };
            kept_vertices.push(cell);
        }
        for edge in &mut kept_edges {
            if let EdgeOrigin::Vertex(v) = edge.from {
                edge.from = EdgeOrigin::Vertex(vertex_rank[v]);
            }
            if let EdgeTarget::Vertex(v) = edge.to {
                edge.to = EdgeTarget::Vertex(vertex_rank[v]);
            }
        }
        for cell in &mut kept_vertices {
            for e in cell.in_edges.iter_mut().chain(cell.out_edges.iter_mut()) {
                *e = edge_rank[*e];
            }
        }
        let sources = d.source_edges().iter().map(|&e| edge_rank[e]).collect();
        let sinks: Vec<usize> = sinks.into_iter().map(|e| edge_rank[e]).collect();
        Ok(StrandDiagram::from_parts(
            self.pres.clone(),
            sources,
            sinks,
            kept_vertices,
            kept_edges,
        )?)
    }
}
