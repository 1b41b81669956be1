//! Semigroup presentations, words over generator alphabets, and elementary
//! word rewriting.
//!
//! A presentation is an ordered alphabet of named generators, an ordered list
//! of relations (pairs of non-empty words, semantically unordered), and an
//! optional base word.  Words store generators as indices into the owning
//! presentation's alphabet.
//!
//! The text format is line oriented, with `#` starting a comment:
//!
//! ```text
//! gens: A B C D
//! rel: A = A B
//! rel: B = B C
//! base: A B C D
//! ```

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Index of a generator in the owning presentation's alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GenId(pub u32);

impl GenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word over a presentation's alphabet.
pub type Word = Vec<GenId>;

/// One relation `lhs = rhs`.  The two sides are stored as given in the input
/// to keep derivation scripts readable, but the relation is unordered: both
/// rewriting directions are accepted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    pub lhs: Word,
    pub rhs: Word,
}

/// Which side of a relation a rewrite consumes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    /// Replace an occurrence of `lhs` by `rhs`.
    LhsToRhs,
    /// Replace an occurrence of `rhs` by `lhs`.
    RhsToLhs,
}

impl Direction {
    pub fn flipped(self) -> Direction {
        match self {
            Direction::LhsToRhs => Direction::RhsToLhs,
            Direction::RhsToLhs => Direction::LhsToRhs,
        }
    }
}

impl Relation {
    /// Source and target sides for a rewrite in the given direction.
    pub fn oriented(&self, dir: Direction) -> (&Word, &Word) {
        match dir {
            Direction::LhsToRhs => (&self.lhs, &self.rhs),
            Direction::RhsToLhs => (&self.rhs, &self.lhs),
        }
    }

    /// Replaces the one occurrence of the source side starting at letter
    /// index `position` in `word` by the target side.
    pub fn rewrite(
        &self,
        word: &[GenId],
        dir: Direction,
        position: usize,
    ) -> Result<Word, PresentationError> {
        let (src, dst) = self.oriented(dir);
        if position + src.len() > word.len() || word[position..position + src.len()] != src[..] {
            return Err(PresentationError::NoMatchAtPosition { position });
        }
        let mut out = Vec::with_capacity(word.len() - src.len() + dst.len());
        out.extend_from_slice(&word[..position]);
        out.extend_from_slice(dst);
        out.extend_from_slice(&word[position + src.len()..]);
        Ok(out)
    }
}

/// A finite semigroup presentation with an optional base word.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presentation {
    gens: Vec<String>,
    relations: Vec<Relation>,
    base: Option<Word>,
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum PresentationError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown generator `{token}`")]
    UnknownGenerator { line: usize, token: String },
    #[error("line {line}: duplicate generator `{name}`")]
    DuplicateGenerator { line: usize, name: String },
    #[error("invalid generator name `{name}`")]
    InvalidGeneratorName { name: String },
    #[error("no rewrite match at position {position}")]
    NoMatchAtPosition { position: usize },
    #[error("relation id {id} out of range")]
    BadRelationId { id: usize },
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.contains('=') && !name.chars().any(char::is_whitespace)
}

impl Presentation {
    /// Builds a presentation from parts, validating names and letters.
    pub fn new(
        gens: Vec<String>,
        relations: Vec<(Word, Word)>,
        base: Option<Word>,
    ) -> Result<Presentation, PresentationError> {
        for (i, name) in gens.iter().enumerate() {
            if !valid_name(name) {
                return Err(PresentationError::InvalidGeneratorName { name: name.clone() });
            }
            if gens[..i].contains(name) {
                return Err(PresentationError::DuplicateGenerator {
                    line: 0,
                    name: name.clone(),
                });
            }
        }
        let check = |w: &Word| w.iter().all(|g| g.index() < gens.len());
        for (lhs, rhs) in &relations {
            assert!(!lhs.is_empty() && !rhs.is_empty(), "empty relation side");
            assert!(check(lhs) && check(rhs), "relation letter out of range");
        }
        if let Some(b) = &base {
            assert!(check(b), "base letter out of range");
        }
        Ok(Presentation {
            gens,
            relations: relations
                .into_iter()
                .map(|(lhs, rhs)| Relation { lhs, rhs })
                .collect(),
            base,
        })
    }

    /// Convenience constructor from string names and words given as name
    /// lists.  Intended for tests and built-in presentations.
    pub fn from_names(
        gens: &[&str],
        relations: &[(&[&str], &[&str])],
        base: Option<&[&str]>,
    ) -> Presentation {
        let gens: Vec<String> = gens.iter().map(|s| s.to_string()).collect();
        let lookup = |name: &str| -> GenId {
            GenId(
                gens.iter()
                    .position(|g| g == name)
                    .unwrap_or_else(|| panic!("unknown generator `{name}`")) as u32,
            )
        };
        let word = |names: &[&str]| names.iter().map(|n| lookup(n)).collect::<Word>();
        Presentation::new(
            gens.clone(),
            relations.iter().map(|(l, r)| (word(l), word(r))).collect(),
            base.map(word),
        )
        .expect("invalid built-in presentation")
    }

    pub fn gen_count(&self) -> usize {
        self.gens.len()
    }

    pub fn gen_name(&self, g: GenId) -> &str {
        &self.gens[g.index()]
    }

    pub fn gen_names(&self) -> &[String] {
        &self.gens
    }

    pub fn find_gen(&self, name: &str) -> Option<GenId> {
        self.gens.iter().position(|g| g == name).map(|i| GenId(i as u32))
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn relation(&self, id: usize) -> Result<&Relation, PresentationError> {
        self.relations.get(id).ok_or(PresentationError::BadRelationId { id })
    }

    pub fn base(&self) -> Option<&Word> {
        self.base.as_ref()
    }

    /// Renders a word as space-separated generator names.
    pub fn word_string(&self, word: &[GenId]) -> String {
        word.iter()
            .map(|g| self.gen_name(*g))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Rewrites one occurrence in `word` using relation `id`.
    pub fn rewrite_word(
        &self,
        word: &[GenId],
        id: usize,
        dir: Direction,
        position: usize,
    ) -> Result<Word, PresentationError> {
        self.relation(id)?.rewrite(word, dir, position)
    }

    /// True when every relation has exactly one side of length one and no
    /// generator is the short side of two relations.  Over such a
    /// presentation every interior vertex of a strand diagram is either a
    /// split or a merge.
    pub fn is_tree_like(&self) -> bool {
        let mut short_side_seen = vec![false; self.gens.len()];
        for rel in &self.relations {
            let short = match (rel.lhs.len(), rel.rhs.len()) {
                (1, n) if n >= 2 => rel.lhs[0],
                (n, 1) if n >= 2 => rel.rhs[0],
                _ => return false,
            };
            if short_side_seen[short.index()] {
                return false;
            }
            short_side_seen[short.index()] = true;
        }
        true
    }

    /// Serializes to the line-oriented text format.  `parse` of the result
    /// returns an equal presentation.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("gens:");
        for g in &self.gens {
            out.push(' ');
            out.push_str(g);
        }
        out.push('\n');
        for rel in &self.relations {
            out.push_str("rel: ");
            out.push_str(&self.word_string(&rel.lhs));
            out.push_str(" = ");
            out.push_str(&self.word_string(&rel.rhs));
            out.push('\n');
        }
        if let Some(base) = &self.base {
            out.push_str("base: ");
            out.push_str(&self.word_string(base));
            out.push('\n');
        }
        out
    }

    /// Parses the line-oriented text format.
    pub fn parse(text: &str) -> Result<Presentation, PresentationError> {
        let mut gens: Option<(usize, Vec<String>)> = None;
        let mut rel_lines: Vec<(usize, String)> = Vec::new();
        let mut base_line: Option<(usize, String)> = None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("gens:") {
                if gens.is_some() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        msg: "repeated `gens:` line".into(),
                    });
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if names.is_empty() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        msg: "empty generator list".into(),
                    });
                }
                for (i, name) in names.iter().enumerate() {
                    if !valid_name(name) {
                        return Err(PresentationError::Syntax {
                            line: line_no,
                            msg: format!("invalid generator name `{name}`"),
                        });
                    }
                    if names[..i].contains(name) {
                        return Err(PresentationError::DuplicateGenerator {
                            line: line_no,
                            name: name.clone(),
                        });
                    }
                }
                gens = Some((line_no, names));
            } else if let Some(rest) = line.strip_prefix("rel:") {
                rel_lines.push((line_no, rest.to_string()));
            } else if let Some(rest) = line.strip_prefix("base:") {
                if base_line.is_some() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        msg: "repeated `base:` line".into(),
                    });
                }
                base_line = Some((line_no, rest.to_string()));
            } else {
                return Err(PresentationError::Syntax {
                    line: line_no,
                    msg: format!("expected `gens:`, `rel:` or `base:`, got `{line}`"),
                });
            }
        }

        let (_, gens) = gens.ok_or(PresentationError::Syntax {
            line: text.lines().count() + 1,
            msg: "missing `gens:` line".into(),
        })?;
        let lookup = |line: usize, token: &str| -> Result<GenId, PresentationError> {
            gens.iter()
                .position(|g| g == token)
                .map(|i| GenId(i as u32))
                .ok_or_else(|| PresentationError::UnknownGenerator {
                    line,
                    token: token.to_string(),
                })
        };

        let mut relations = Vec::new();
        for (line_no, body) in rel_lines {
            let tokens: Vec<&str> = body.split_whitespace().collect();
            let eq_positions: Vec<usize> =
                tokens.iter().enumerate().filter(|(_, t)| **t == "=").map(|(i, _)| i).collect();
            let eq = match eq_positions.as_slice() {
                [one] => *one,
                _ => {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        msg: "relation must contain exactly one `=`".into(),
                    })
                }
            };
            let (lhs_toks, rhs_toks) = (&tokens[..eq], &tokens[eq + 1..]);
            if lhs_toks.is_empty() || rhs_toks.is_empty() {
                return Err(PresentationError::Syntax {
                    line: line_no,
                    msg: "relation side may not be empty".into(),
                });
            }
            let mut lhs = Word::new();
            for t in lhs_toks {
                lhs.push(lookup(line_no, t)?);
            }
            let mut rhs = Word::new();
            for t in rhs_toks {
                rhs.push(lookup(line_no, t)?);
            }
            relations.push(Relation { lhs, rhs });
        }

        let base = match base_line {
            None => None,
            Some((line_no, body)) => {
                let mut word = Word::new();
                for t in body.split_whitespace() {
                    word.push(lookup(line_no, t)?);
                }
                if word.is_empty() {
                    return Err(PresentationError::Syntax {
                        line: line_no,
                        msg: "empty base word".into(),
                    });
                }
                Some(word)
            }
        };

        Ok(Presentation { gens, relations, base })
    }

    /// Structural equality that ignores relation order and the orientation of
    /// each relation, comparing generators by name.  Used to compare
    /// presentations built through different routes.
    pub fn equivalent(&self, other: &Presentation) -> bool {
        let mut a: Vec<&String> = self.gens.iter().collect();
        let mut b: Vec<&String> = other.gens.iter().collect();
        a.sort();
        b.sort();
        if a != b {
            return false;
        }
        let names = |p: &Presentation, w: &Word| -> Vec<String> {
            w.iter().map(|g| p.gen_name(*g).to_string()).collect()
        };
        let normalize = |p: &Presentation| -> Vec<(Vec<String>, Vec<String>)> {
            let mut rels: Vec<(Vec<String>, Vec<String>)> = p
                .relations
                .iter()
                .map(|r| {
                    let l = names(p, &r.lhs);
                    let r = names(p, &r.rhs);
                    if l <= r {
                        (l, r)
                    } else {
                        (r, l)
                    }
                })
                .collect();
            rels.sort();
            rels
        };
        if normalize(self) != normalize(other) {
            return false;
        }
        match (&self.base, &other.base) {
            (None, None) => true,
            (Some(x), Some(y)) => names(self, x) == names(other, y),
            _ => false,
        }
    }

    pub fn into_arc(self) -> Arc<Presentation> {
        Arc::new(self)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono_f4() -> Presentation {
        Presentation::parse("gens: x\nrel: x = x x x x\nbase: x\n").unwrap()
    }

    #[test]
    fn parses_single_generator_presentation() {
        let p = mono_f4();
        assert_eq!(p.gen_count(), 1);
        assert_eq!(p.relations().len(), 1);
        assert_eq!(p.relations()[0].lhs, vec![GenId(0)]);
        assert_eq!(p.relations()[0].rhs, vec![GenId(0); 4]);
        assert_eq!(p.base(), Some(&vec![GenId(0)]));
    }

    #[test]
    fn parses_presentation_without_relations() {
        let p = Presentation::parse("gens: A\nbase: A\n").unwrap();
        assert!(p.relations().is_empty());
        assert!(p.is_tree_like());
    }

    #[test]
    fn rejects_unknown_generator_in_relation() {
        let err = Presentation::parse("gens: A B\nrel: A = C\n").unwrap_err();
        assert_eq!(
            err,
            PresentationError::UnknownGenerator { line: 2, token: "C".into() }
        );
    }

    #[test]
    fn rejects_duplicate_generator() {
        let err = Presentation::parse("gens: A B A\n").unwrap_err();
        assert!(matches!(err, PresentationError::DuplicateGenerator { line: 1, .. }));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = Presentation::parse("gens: A\nrel: A A\n").unwrap_err();
        assert!(matches!(err, PresentationError::Syntax { line: 2, .. }));
        let err = Presentation::parse("gens: A\nnope\n").unwrap_err();
        assert!(matches!(err, PresentationError::Syntax { line: 2, .. }));
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let p = Presentation::parse("# header\n\ngens: A B # alphabet\nrel: A = A B\n").unwrap();
        assert_eq!(p.gen_count(), 2);
        assert_eq!(p.relations().len(), 1);
    }

    #[test]
    fn serialize_then_parse_round_trips() {
        let p = mono_f4();
        assert_eq!(Presentation::parse(&p.serialize()).unwrap(), p);
    }

    #[test]
    fn tree_like_accepts_mono_f4() {
        assert!(mono_f4().is_tree_like());
    }

    #[test]
    fn tree_like_rejects_commuting_relation() {
        let p = Presentation::from_names(&["a", "b"], &[(&["a", "b"], &["b", "a"])], None);
        assert!(!p.is_tree_like());
    }

    #[test]
    fn tree_like_rejects_repeated_short_side() {
        let p = Presentation::from_names(
            &["x", "y"],
            &[(&["x"], &["x", "y"]), (&["x"], &["y", "x"])],
            None,
        );
        assert!(!p.is_tree_like());
    }

    #[test]
    fn tree_like_rejects_length_one_both_sides() {
        let p = Presentation::from_names(&["x", "y"], &[(&["x"], &["y"])], None);
        assert!(!p.is_tree_like());
    }

    #[test]
    fn rewrite_commuting_example() {
        // aabb -> abab by ab = ba applied right-to-left at position 1.
        let p = Presentation::from_names(&["a", "b"], &[(&["a", "b"], &["b", "a"])], None);
        let a = GenId(0);
        let b = GenId(1);
        let w = vec![a, a, b, b];
        let w2 = p.rewrite_word(&w, 0, Direction::RhsToLhs, 1).unwrap_err();
        // position 1 of aabb is "ab", which is the lhs, not the rhs
        assert_eq!(w2, PresentationError::NoMatchAtPosition { position: 1 });
        let w2 = p.rewrite_word(&w, 0, Direction::LhsToRhs, 1).unwrap();
        assert_eq!(w2, vec![a, b, a, b]);
    }

    #[test]
    fn rewrite_identity_relation_is_identity() {
        let p = Presentation::from_names(&["x"], &[(&["x"], &["x"])], None);
        let w = vec![GenId(0)];
        assert_eq!(p.rewrite_word(&w, 0, Direction::LhsToRhs, 0).unwrap(), w);
        assert_eq!(p.rewrite_word(&w, 0, Direction::RhsToLhs, 0).unwrap(), w);
    }

    #[test]
    fn rewrite_then_inverse_restores_word() {
        let p = Presentation::from_names(
            &["A", "B", "C", "D", "Ab"],
            &[(&["B"], &["B", "C", "D", "B"])],
            None,
        );
        let name = |n: &str| p.find_gen(n).unwrap();
        let w: Word = ["A", "B", "C", "D", "B", "C", "D", "B", "C", "D", "Ab"]
            .iter()
            .map(|n| name(n))
            .collect();
        let shrunk = p.rewrite_word(&w, 0, Direction::RhsToLhs, 1).unwrap();
        let shrunk = p.rewrite_word(&shrunk, 0, Direction::RhsToLhs, 1).unwrap();
        assert_eq!(p.word_string(&shrunk), "A B C D Ab");
        let grown = p.rewrite_word(&shrunk, 0, Direction::LhsToRhs, 1).unwrap();
        let grown = p.rewrite_word(&grown, 0, Direction::LhsToRhs, 1).unwrap();
        assert_eq!(grown, w);
    }

    #[test]
    fn equivalent_ignores_relation_order_and_orientation() {
        let p = Presentation::from_names(
            &["A", "B"],
            &[(&["A"], &["A", "B"]), (&["B"], &["A", "B"])],
            Some(&["A", "B"]),
        );
        let q = Presentation::from_names(
            &["B", "A"],
            &[(&["A", "B"], &["B"]), (&["A"], &["A", "B"])],
            Some(&["A", "B"]),
        );
        assert!(p.equivalent(&q));
        let r = Presentation::from_names(
            &["A", "B"],
            &[(&["A"], &["A", "B"]), (&["B"], &["A", "B"])],
            Some(&["B", "A"]),
        );
        assert!(!p.equivalent(&r));
    }
}
