//! Presentation transformations that preserve the diagram group, and
//! scripted derivations built from them.
//!
//! Two moves do the real work.  Substituting one side of a relation for an
//! occurrence of it inside a *different* relation, or inside the base word,
//! leaves the diagram group unchanged; so does removing a generator `x`
//! that occurs in exactly one relation `x = w` with `x` absent from `w` and
//! from the base word.  Adding a fresh generator with a defining word is
//! the inverse of removal, and renaming generators is a bijection on the
//! alphabet.  A [`DerivationScript`] chains such steps from a start
//! presentation to an expected result and [`verify_script`] replays it,
//! checking every precondition.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::presentation::{Direction, GenId, Presentation, PresentationError, Word};

/// Which side of the target relation a substitution rewrites.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Lhs,
    Rhs,
}

/// One presentation-transformation step.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Step {
    /// Rewrites one occurrence inside relation `target`, using relation
    /// `using` in the given direction.
    SubstInRelation { target: usize, side: Side, position: usize, using: usize, direction: Direction },
    /// Rewrites one occurrence inside the base word.
    SubstInBase { position: usize, using: usize, direction: Direction },
    /// Appends a fresh generator together with its defining relation
    /// `name = definition`.
    AddGenerator { name: String, definition: Vec<String> },
    /// Removes a generator occurring only as the short side of its own
    /// defining relation, along with that relation.
    RemoveGenerator { name: String },
    /// Renames generators; unmentioned ones keep their names.
    Rename { pairs: Vec<(String, String)> },
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = |d: &Direction| match d {
            Direction::LhsToRhs => "lr",
            Direction::RhsToLhs => "rl",
        };
        match self {
            Step::SubstInRelation { target, side, position, using, direction } => {
                let side = match side {
                    Side::Lhs => "lhs",
                    Side::Rhs => "rhs",
                };
                write!(f, "subst rel {target} {side} at {position} use {using} {}", dir(direction))
            }
            Step::SubstInBase { position, using, direction } => {
                write!(f, "subst base at {position} use {using} {}", dir(direction))
            }
            Step::AddGenerator { name, definition } => {
                write!(f, "addgen {name} = {}", definition.join(" "))
            }
            Step::RemoveGenerator { name } => write!(f, "rmgen {name}"),
            Step::Rename { pairs } => {
                write!(f, "rename")?;
                for (old, new) in pairs {
                    write!(f, " {old}={new}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Error, Clone, PartialEq, Eq, Debug)]
pub enum MoveError {
    #[error("relation id {id} out of range")]
    BadRelationId { id: usize },
    #[error("a relation may not be rewritten by itself")]
    SelfApplication,
    #[error("source side of the using relation does not occur at position {position}")]
    NoMatch { position: usize },
    #[error("presentation has no base word")]
    NoBaseWord,
    #[error("generator `{name}` already exists")]
    DuplicateGenerator { name: String },
    #[error("unknown generator `{name}`")]
    UnknownGenerator { name: String },
    #[error("generator `{name}` occurs in {count} relation sides; removal needs exactly one")]
    NotSingleOccurrence { name: String, count: usize },
    #[error("the occurrence of `{name}` is not the short side of a defining relation")]
    NotDefining { name: String },
    #[error("generator `{name}` occurs in the base word")]
    InBaseWord { name: String },
    #[error("empty defining word for `{name}`")]
    EmptyDefinition { name: String },
    #[error("rename is not a bijection: `{name}` collides")]
    RenameCollision { name: String },
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// Applies one step, checking its preconditions.  Returns the transformed
/// presentation; the input is untouched.
pub fn apply_step(p: &Presentation, step: &Step) -> Result<Presentation, MoveError> {
    match step {
        Step::SubstInRelation { target, side, position, using, direction } => {
            if target == using {
                return Err(MoveError::SelfApplication);
            }
            let using_rel =
                p.relation(*using).map_err(|_| MoveError::BadRelationId { id: *using })?.clone();
            let target_rel =
                p.relation(*target).map_err(|_| MoveError::BadRelationId { id: *target })?;
            let word = match side {
                Side::Lhs => &target_rel.lhs,
                Side::Rhs => &target_rel.rhs,
            };
            let rewritten = using_rel
                .rewrite(word, *direction, *position)
                .map_err(|_| MoveError::NoMatch { position: *position })?;
            let mut relations: Vec<(Word, Word)> =
                p.relations().iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect();
            match side {
                Side::Lhs => relations[*target].0 = rewritten,
                Side::Rhs => relations[*target].1 = rewritten,
            }
            Ok(rebuild(p, p.gen_names().to_vec(), relations, p.base().cloned()))
        }
        Step::SubstInBase { position, using, direction } => {
            let using_rel =
                p.relation(*using).map_err(|_| MoveError::BadRelationId { id: *using })?;
            let base = p.base().ok_or(MoveError::NoBaseWord)?;
            let rewritten = using_rel
                .rewrite(base, *direction, *position)
                .map_err(|_| MoveError::NoMatch { position: *position })?;
            let relations = p.relations().iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect();
            Ok(rebuild(p, p.gen_names().to_vec(), relations, Some(rewritten)))
        }
        Step::AddGenerator { name, definition } => {
            if p.find_gen(name).is_some() {
                return Err(MoveError::DuplicateGenerator { name: name.clone() });
            }
            if definition.is_empty() {
                return Err(MoveError::EmptyDefinition { name: name.clone() });
            }
            let mut defining = Word::new();
            for token in definition {
                let g = p
                    .find_gen(token)
                    .ok_or_else(|| MoveError::UnknownGenerator { name: token.clone() })?;
                defining.push(g);
            }
            let mut gens = p.gen_names().to_vec();
            gens.push(name.clone());
            let fresh = GenId(gens.len() as u32 - 1);
            let mut relations: Vec<(Word, Word)> =
                p.relations().iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect();
            relations.push((vec![fresh], defining));
            Ok(rebuild(p, gens, relations, p.base().cloned()))
        }
        Step::RemoveGenerator { name } => {
            let gen =
                p.find_gen(name).ok_or_else(|| MoveError::UnknownGenerator { name: name.clone() })?;
            let mut occurrences = 0usize;
            let mut defining: Option<usize> = None;
            for (id, rel) in p.relations().iter().enumerate() {
                let in_lhs = rel.lhs.iter().filter(|&&g| g == gen).count();
                let in_rhs = rel.rhs.iter().filter(|&&g| g == gen).count();
                occurrences += in_lhs + in_rhs;
                let lhs_defines = rel.lhs == vec![gen] && !rel.rhs.contains(&gen);
                let rhs_defines = rel.rhs == vec![gen] && !rel.lhs.contains(&gen);
                if lhs_defines || rhs_defines {
                    defining = Some(id);
                }
            }
            if occurrences != 1 {
                return Err(MoveError::NotSingleOccurrence { name: name.clone(), count: occurrences });
            }
            let defining = defining.ok_or_else(|| MoveError::NotDefining { name: name.clone() })?;
            if p.base().is_some_and(|b| b.contains(&gen)) {
                return Err(MoveError::InBaseWord { name: name.clone() });
            }
            // drop the generator and its relation, shifting letter indices
            let remap = |w: &Word| -> Word {
                w.iter()
                    .map(|g| if g.0 > gen.0 { GenId(g.0 - 1) } else { *g })
                    .collect()
            };
            let mut gens = p.gen_names().to_vec();
            gens.remove(gen.index());
            let relations: Vec<(Word, Word)> = p
                .relations()
                .iter()
                .enumerate()
                .filter(|(id, _)| *id != defining)
                .map(|(_, r)| (remap(&r.lhs), remap(&r.rhs)))
                .collect();
            Ok(rebuild(p, gens, relations, p.base().map(|b| remap(b))))
        }
        Step::Rename { pairs } => {
            let mut gens = p.gen_names().to_vec();
            let mut renamed = vec![false; gens.len()];
            for (old, new) in pairs {
                let gen = p
                    .find_gen(old)
                    .ok_or_else(|| MoveError::UnknownGenerator { name: old.clone() })?;
                if renamed[gen.index()] {
                    return Err(MoveError::RenameCollision { name: old.clone() });
                }
                renamed[gen.index()] = true;
                gens[gen.index()] = new.clone();
            }
            for (i, name) in gens.iter().enumerate() {
                if gens[..i].contains(name) {
                    return Err(MoveError::RenameCollision { name: name.clone() });
                }
            }
            let relations = p.relations().iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect();
            Ok(rebuild(p, gens, relations, p.base().cloned()))
        }
    }
}

fn rebuild(
    old: &Presentation,
    gens: Vec<String>,
    relations: Vec<(Word, Word)>,
    base: Option<Word>,
) -> Presentation {
    let _ = old;
    Presentation::new(gens, relations, base).expect("step preserves well-formedness")
}

/// A derivation: a start presentation, transformation steps, and the
/// expected final presentation.
#[derive(Clone, Debug)]
pub struct DerivationScript {
    pub start: Presentation,
    pub steps: Vec<Step>,
    pub expect: Presentation,
}

/// Outcome of one attempted step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub step: Step,
    pub result: Result<Presentation, MoveError>,
}

/// Replay record of a script.
#[derive(Clone, Debug)]
pub struct StepReport {
    pub outcomes: Vec<StepOutcome>,
    /// The presentation after the last successful step.
    pub last: Presentation,
    /// Whether every step applied cleanly.
    pub all_steps_ok: bool,
    /// Whether the final presentation matches the expectation (alphabet as
    /// a set, relations as an unordered multiset, equal base words).
    pub matches_expect: bool,
}

impl StepReport {
    pub fn ok(&self) -> bool {
        self.all_steps_ok && self.matches_expect
    }
}

/// Applies the script's steps in order, halting at the first failure, and
/// compares the final presentation against the expectation.
pub fn verify_script(script: &DerivationScript) -> StepReport {
    let mut current = script.start.clone();
    let mut outcomes = Vec::new();
    let mut all_steps_ok = true;
    for step in &script.steps {
        let result = apply_step(&current, step);
        match &result {
            Ok(next) => {
                current = next.clone();
                outcomes.push(StepOutcome { step: step.clone(), result });
            }
            Err(_) => {
                outcomes.push(StepOutcome { step: step.clone(), result });
                all_steps_ok = false;
                break;
            }
        }
    }
    let matches_expect = all_steps_ok && current.equivalent(&script.expect);
    StepReport { outcomes, last: current, all_steps_ok, matches_expect }
}

/// Searches for a generator bijection carrying one presentation onto the
/// other: relation multiset to relation multiset (sides unordered) and base
/// word to base word.  Returns a witness as `(name in p1, name in p2)`
/// pairs in `p1`'s alphabet order, or `None`.
pub fn equal_up_to_renaming(p1: &Presentation, p2: &Presentation) -> Option<Vec<(String, String)>> {
    if p1.gen_count() != p2.gen_count()
        || p1.relations().len() != p2.relations().len()
        || p1.base().is_some() != p2.base().is_some()
    {
        return None;
    }
    // occurrence profile of each generator, a renaming invariant
    let profile = |p: &Presentation, g: GenId| -> (usize, usize, usize) {
        let mut in_sides = 0;
        let mut short_sides = 0;
        for rel in p.relations() {
            in_sides += rel.lhs.iter().filter(|&&x| x == g).count();
            in_sides += rel.rhs.iter().filter(|&&x| x == g).count();
            if rel.lhs == vec![g] || rel.rhs == vec![g] {
                short_sides += 1;
            }
        }
        let in_base = p.base().map_or(0, |b| b.iter().filter(|&&x| x == g).count());
        (in_sides, short_sides, in_base)
    };
    let n = p1.gen_count();
    let mut assignment: Vec<Option<GenId>> = vec![None; n];
    let mut used = vec![false; n];

    fn matches(
        p1: &Presentation,
        p2: &Presentation,
        assignment: &[Option<GenId>],
    ) -> bool {
        let map_word = |w: &Word| -> Option<Vec<GenId>> {
            w.iter().map(|g| assignment[g.index()]).collect()
        };
        if let (Some(b1), Some(b2)) = (p1.base(), p2.base()) {
            if let Some(mapped) = map_word(b1) {
                if mapped != *b2 {
                    return false;
                }
            }
        }
        let normalize = |sides: (Vec<GenId>, Vec<GenId>)| {
            let (a, b) = sides;
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        };
        let mut mapped: Vec<(Vec<GenId>, Vec<GenId>)> = Vec::new();
        for rel in p1.relations() {
            match (map_word(&rel.lhs), map_word(&rel.rhs)) {
                (Some(l), Some(r)) => mapped.push(normalize((l, r))),
                // an unassigned letter leaves this relation unconstrained
                _ => continue,
            }
        }
        let mut theirs: Vec<(Vec<GenId>, Vec<GenId>)> =
            p2.relations().iter().map(|r| normalize((r.lhs.clone(), r.rhs.clone()))).collect();
        mapped.sort();
        theirs.sort();
        // every fully mapped relation must occur in p2 with multiplicity
        let mut used = vec![false; theirs.len()];
        for m in &mapped {
            match theirs.iter().enumerate().find(|(i, t)| !used[*i] && *t == m) {
                Some((i, _)) => used[i] = true,
                None => return false,
            }
        }
        true
    }

    fn search(
        p1: &Presentation,
        p2: &Presentation,
        profiles1: &[(usize, usize, usize)],
        profiles2: &[(usize, usize, usize)],
        assignment: &mut Vec<Option<GenId>>,
        used: &mut Vec<bool>,
        next: usize,
    ) -> bool {
        if next == assignment.len() {
            return matches(p1, p2, assignment);
        }
        for candidate in 0..used.len() {
            if used[candidate] || profiles1[next] != profiles2[candidate] {
                continue;
            }
            assignment[next] = Some(GenId(candidate as u32));
            used[candidate] = true;
            if matches(p1, p2, assignment)
                && search(p1, p2, profiles1, profiles2, assignment, used, next + 1)
            {
                return true;
            }
            assignment[next] = None;
            used[candidate] = false;
        }
        false
    }

    let profiles1: Vec<_> = (0..n).map(|i| profile(p1, GenId(i as u32))).collect();
    let profiles2: Vec<_> = (0..n).map(|i| profile(p2, GenId(i as u32))).collect();
    if search(p1, p2, &profiles1, &profiles2, &mut assignment, &mut used, 0) {
        Some(
            assignment
                .iter()
                .enumerate()
                .map(|(i, target)| {
                    (
                        p1.gen_name(GenId(i as u32)).to_string(),
                        p2.gen_name(target.unwrap()).to_string(),
                    )
                })
                .collect(),
        )
    } else {
        None
    }
}

/// Applies the involution `pairing` to every letter and reverses every
/// relation side and the base word.  Every alphabet letter must appear in
/// the pairing (fixed letters as `x = x` pairs).
pub fn bar_reverse_symmetry(
    p: &Presentation,
    pairing: &[(String, String)],
) -> Result<Presentation, MoveError> {
    let mut swap: BTreeMap<GenId, GenId> = BTreeMap::new();
    for (a, b) in pairing {
        let ga = p.find_gen(a).ok_or_else(|| MoveError::UnknownGenerator { name: a.clone() })?;
        let gb = p.find_gen(b).ok_or_else(|| MoveError::UnknownGenerator { name: b.clone() })?;
        swap.insert(ga, gb);
        swap.insert(gb, ga);
    }
    for i in 0..p.gen_count() {
        let g = GenId(i as u32);
        if !swap.contains_key(&g) {
            return Err(MoveError::UnknownGenerator { name: p.gen_name(g).to_string() });
        }
    }
    let transform = |w: &Word| -> Word { w.iter().rev().map(|g| swap[g]).collect() };
    let relations =
        p.relations().iter().map(|r| (transform(&r.lhs), transform(&r.rhs))).collect();
    Ok(rebuild(p, p.gen_names().to_vec(), relations, p.base().map(|b| transform(b))))
}

/// The one-generator presentation with `x = x^4` and base `x`.
pub fn f4_mono() -> Presentation {
    Presentation::from_names(&["x"], &[(&["x"], &["x", "x", "x", "x"])], Some(&["x"]))
}

/// The three-generator typed presentation with base `x0`.
pub fn f4_typed() -> Presentation {
    Presentation::from_names(
        &["x0", "x1", "x2"],
        &[
            (&["x0"], &["x0", "x1", "x2", "x0"]),
            (&["x1"], &["x1", "x2", "x0", "x1"]),
            (&["x2"], &["x2", "x0", "x1", "x2"]),
        ],
        Some(&["x0"]),
    )
}

/// The six-generator presentation distinguishing the interval orbits that
/// touch the ends of `[0,1]`, with base `u0`.
pub fn f4_six() -> Presentation {
    Presentation::from_names(
        &["u0", "v0", "w0", "x0", "x1", "x2"],
        &[
            (&["u0"], &["v0", "x1", "x2", "w0"]),
            (&["v0"], &["v0", "x1", "x2", "x0"]),
            (&["w0"], &["x0", "x1", "x2", "w0"]),
            (&["x0"], &["x0", "x1", "x2", "x0"]),
            (&["x1"], &["x1", "x2", "x0", "x1"]),
            (&["x2"], &["x2", "x0", "x1", "x2"]),
        ],
        Some(&["u0"]),
    )
}

/// All built-in presentations by preset name.
pub fn f4_presets() -> Vec<(&'static str, Presentation)> {
    vec![("f4-mono", f4_mono()), ("f4-typed", f4_typed()), ("f4-six", f4_six())]
}

/// `f4_six` with the base replaced by `v0 x1 x2 w0` and the generator `u0`
/// removed: the form a derivation from an eight-letter presentation lands
/// on, up to renaming.
pub fn f4_six_without_u0() -> Presentation {
    let p = f4_six();
    let p = apply_step(
        &p,
        &Step::SubstInBase { position: 0, using: 0, direction: Direction::LhsToRhs },
    )
    .expect("base substitution applies");
    apply_step(&p, &Step::RemoveGenerator { name: "u0".into() }).expect("u0 is removable")
}

mod script_text;
pub use script_text::{parse_script, parse_script_file, ScriptError};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamical::{preset, DiagramGroup};

    fn pf4() -> Presentation {
        (**DiagramGroup::from_preset(&preset("pf4").unwrap()).presentation()).clone()
    }

    fn words(p: &Presentation, id: usize) -> (String, String) {
        let rel = &p.relations()[id];
        (p.word_string(&rel.lhs), p.word_string(&rel.rhs))
    }

    #[test]
    fn subst_in_relation_shortens_a_side() {
        // replace B C D Db inside B = B C D Db Cb by Db, using Db = B C D Db
        let p = pf4();
        let step = Step::SubstInRelation {
            target: 1,
            side: Side::Rhs,
            position: 0,
            using: 4,
            direction: Direction::RhsToLhs,
        };
        let q = apply_step(&p, &step).unwrap();
        assert_eq!(words(&q, 1), ("B".into(), "Db Cb".into()));
        // other relations untouched
        assert_eq!(words(&q, 0), words(&p, 0));
    }

    #[test]
    fn subst_rejects_self_application() {
        let p = pf4();
        let step = Step::SubstInRelation {
            target: 4,
            side: Side::Rhs,
            position: 0,
            using: 4,
            direction: Direction::RhsToLhs,
        };
        assert_eq!(apply_step(&p, &step), Err(MoveError::SelfApplication));
    }

    #[test]
    fn subst_rejects_wrong_position() {
        let p = pf4();
        let step = Step::SubstInRelation {
            target: 1,
            side: Side::Rhs,
            position: 1,
            using: 4,
            direction: Direction::RhsToLhs,
        };
        assert_eq!(apply_step(&p, &step), Err(MoveError::NoMatch { position: 1 }));
    }

    #[test]
    fn add_then_remove_generator_is_identity() {
        let p = pf4();
        let added = apply_step(
            &p,
            &Step::AddGenerator { name: "E".into(), definition: vec!["D".into(), "Ab".into()] },
        )
        .unwrap();
        assert_eq!(added.gen_count(), 9);
        assert_eq!(words(&added, 8), ("E".into(), "D Ab".into()));
        let removed = apply_step(&added, &Step::RemoveGenerator { name: "E".into() }).unwrap();
        assert_eq!(removed, p);
    }

    #[test]
    fn remove_generator_requires_single_defining_occurrence() {
        let p = pf4();
        // every original letter occurs several times
        let err = apply_step(&p, &Step::RemoveGenerator { name: "B".into() }).unwrap_err();
        assert!(matches!(err, MoveError::NotSingleOccurrence { .. }));
    }

    #[test]
    fn remove_generator_rejects_base_occurrences() {
        let p = Presentation::from_names(
            &["A", "E"],
            &[(&["E"], &["A", "A"])],
            Some(&["E"]),
        );
        let err = apply_step(&p, &Step::RemoveGenerator { name: "E".into() }).unwrap_err();
        assert_eq!(err, MoveError::InBaseWord { name: "E".into() });
    }

    #[test]
    fn substitution_steps_are_reversible() {
        let p = pf4();
        let forward = Step::SubstInRelation {
            target: 1,
            side: Side::Rhs,
            position: 0,
            using: 4,
            direction: Direction::RhsToLhs,
        };
        let backward = Step::SubstInRelation {
            target: 1,
            side: Side::Rhs,
            position: 0,
            using: 4,
            direction: Direction::LhsToRhs,
        };
        let there = apply_step(&p, &forward).unwrap();
        let back = apply_step(&there, &backward).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn empty_script_with_matching_expectation_passes() {
        let p = pf4();
        let script = DerivationScript { start: p.clone(), steps: vec![], expect: p };
        assert!(verify_script(&script).ok());
    }

    #[test]
    fn script_halts_at_first_failing_step() {
        let p = pf4();
        let script = DerivationScript {
            start: p.clone(),
            steps: vec![
                Step::SubstInRelation {
                    target: 1,
                    side: Side::Rhs,
                    position: 0,
                    using: 4,
                    direction: Direction::RhsToLhs,
                },
                Step::RemoveGenerator { name: "A".into() },
                Step::RemoveGenerator { name: "B".into() },
            ],
            expect: p,
        };
        let report = verify_script(&script);
        assert!(!report.ok());
        assert_eq!(report.outcomes.len(), 2);
        assert!(report.outcomes[1].result.is_err());
    }

    #[test]
    fn renaming_detects_identity() {
        let p = pf4();
        let witness = equal_up_to_renaming(&p, &p).unwrap();
        assert!(witness.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn renaming_rejects_different_relation_lengths() {
        let a = Presentation::from_names(&["x"], &[(&["x"], &["x", "x", "x", "x"])], Some(&["x"]));
        let b = Presentation::from_names(&["x"], &[(&["x"], &["x", "x", "x"])], Some(&["x"]));
        assert!(equal_up_to_renaming(&a, &b).is_none());
    }

    #[test]
    fn renaming_finds_nontrivial_witness() {
        let a = f4_typed();
        let renamed = apply_step(
            &a,
            &Step::Rename {
                pairs: vec![
                    ("x0".into(), "p".into()),
                    ("x1".into(), "q".into()),
                    ("x2".into(), "r".into()),
                ],
            },
        )
        .unwrap();
        let witness = equal_up_to_renaming(&a, &renamed).unwrap();
        assert_eq!(
            witness,
            vec![
                ("x0".to_string(), "p".to_string()),
                ("x1".to_string(), "q".to_string()),
                ("x2".to_string(), "r".to_string()),
            ]
        );
    }

    #[test]
    fn bar_reverse_fixes_the_eight_letter_presentation() {
        let p = pf4();
        let pairing = vec![
            ("A".to_string(), "Ab".to_string()),
            ("B".to_string(), "Bb".to_string()),
            ("C".to_string(), "Cb".to_string()),
            ("D".to_string(), "Db".to_string()),
        ];
        let q = bar_reverse_symmetry(&p, &pairing).unwrap();
        assert!(p.equivalent(&q));
        let again = bar_reverse_symmetry(&q, &pairing).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn bar_reverse_fixes_the_crossing_presentation() {
        let p = (**DiagramGroup::from_preset(&preset("f").unwrap()).presentation()).clone();
        let pairing =
            vec![("A".to_string(), "D".to_string()), ("B".to_string(), "C".to_string())];
        let q = bar_reverse_symmetry(&p, &pairing).unwrap();
        assert!(p.equivalent(&q));
    }

    #[test]
    fn bar_reverse_rejects_unpaired_letters() {
        let p = pf4();
        let err =
            bar_reverse_symmetry(&p, &[("A".to_string(), "Ab".to_string())]).unwrap_err();
        assert!(matches!(err, MoveError::UnknownGenerator { .. }));
    }

    #[test]
    fn f4_presets_are_tree_like_with_bases() {
        for (name, p) in f4_presets() {
            assert!(p.is_tree_like(), "{name}");
            assert!(p.base().is_some(), "{name}");
        }
        assert_eq!(f4_mono().gen_count(), 1);
        assert_eq!(f4_typed().gen_count(), 3);
        assert_eq!(f4_six().gen_count(), 6);
    }

    #[test]
    fn f4_six_without_u0_has_five_relations() {
        let p = f4_six_without_u0();
        assert_eq!(p.gen_count(), 5);
        assert_eq!(p.relations().len(), 5);
        assert_eq!(p.word_string(p.base().unwrap()), "v0 x1 x2 w0");
    }
}
