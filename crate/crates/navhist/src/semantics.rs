//! Navigation and traversal semantics, parameterized by a set of four
//! independent patches over the standard-aligned behaviour.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::history::{Basis, DocumentId, History, SessionId, UnknownDocument};

/// Which of the four corrections are applied.
///
/// * patch 1 `traverse_intermediaries`: a traversal by `n` activates each of
///   the `n` traversed entries instead of jumping to the last one.
/// * patch 2 `active_basis`: the joint session future/past collects entries
///   of every active document, not only of the fully active ones.
/// * patch 3 `symmetric_back_traversal`: backward steps traverse *from* the
///   latest active document that can go back, to its immediate predecessor.
/// * patch 4 `delete_joint_future`: navigation deletes the whole joint
///   session future instead of only the navigating session's future.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PatchSet {
    pub traverse_intermediaries: bool,
    pub active_basis: bool,
    pub symmetric_back_traversal: bool,
    pub delete_joint_future: bool,
}

impl PatchSet {
    /// Standard-aligned behaviour: no patches.
    pub const SPEC: PatchSet = PatchSet::new(false, false, false, false);
    pub const P1: PatchSet = PatchSet::new(true, false, false, false);
    pub const P1P2: PatchSet = PatchSet::new(true, true, false, false);
    pub const P1P2P3: PatchSet = PatchSet::new(true, true, true, false);
    /// All four patches: the semantics with the composition property.
    pub const PATCHED: PatchSet = PatchSet::new(true, true, true, true);

    const fn new(p1: bool, p2: bool, p3: bool, p4: bool) -> Self {
        PatchSet {
            traverse_intermediaries: p1,
            active_basis: p2,
            symmetric_back_traversal: p3,
            delete_joint_future: p4,
        }
    }

    /// The joint-history basis selected by patch 2.
    pub fn basis(&self) -> Basis {
        if self.active_basis {
            Basis::Active
        } else {
            Basis::FullyActive
        }
    }
}

impl fmt::Display for PatchSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut numbers = Vec::new();
        if self.traverse_intermediaries {
            numbers.push("1");
        }
        if self.active_basis {
            numbers.push("2");
        }
        if self.symmetric_back_traversal {
            numbers.push("3");
        }
        if self.delete_joint_future {
            numbers.push("4");
        }
        if numbers.is_empty() {
            f.write_str("patches=none")
        } else {
            write!(f, "patches={}", numbers.join(","))
        }
    }
}

/// A signed traversal distance; the sign is the direction and zero is the
/// identity traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Delta(pub i64);

impl Delta {
    pub fn magnitude(self) -> usize {
        self.0.unsigned_abs() as usize
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

/// Why a traversal refused to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbortReason {
    InsufficientFuture,
    InsufficientPast,
}

impl fmt::Display for AbortReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbortReason::InsufficientFuture => f.write_str("insufficient joint session future"),
            AbortReason::InsufficientPast => f.write_str("insufficient joint session past"),
        }
    }
}

/// Result of a delta traversal: a successor history, or an explicit abort.
/// Aborts are atomic; the input history is untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraversalOutcome {
    Changed(History),
    Aborted(AbortReason),
}

impl TraversalOutcome {
    pub fn changed(&self) -> Option<&History> {
        match self {
            TraversalOutcome::Changed(h) => Some(h),
            TraversalOutcome::Aborted(_) => None,
        }
    }
}

/// The entry-sequence classification of the rewritten standard algorithm:
/// which entries become active, stay active, and end up fully active.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActivationClassification {
    pub entry_sequence: Vec<DocumentId>,
    pub become_active: BTreeSet<DocumentId>,
    pub stay_active: BTreeSet<DocumentId>,
    pub activating: BTreeSet<DocumentId>,
    pub fully_activating: BTreeSet<DocumentId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    UnknownDocument(#[from] UnknownDocument),
    #[error("unknown session id `{0}`")]
    UnknownSession(SessionId),
    #[error("document id `{0}` already exists")]
    DocumentExists(DocumentId),
    #[error("session id `{0}` already exists")]
    SessionExists(SessionId),
    #[error("document `{0}` is not fully active")]
    NotFullyActive(DocumentId),
    #[error("document `{0}` is not in the joint session future")]
    NotInJointFuture(DocumentId),
    #[error("document `{0}` has an empty session past")]
    EmptySessionPast(DocumentId),
    #[error("traversal aborted: {0}")]
    TraversalAborted(AbortReason),
    #[error("no traversal target at step {step} of {total}; the input history is not well-formed")]
    NonWellFormedStuck { step: usize, total: usize },
}

fn subtree_positions(h: &History, root: usize) -> Vec<bool> {
    let docs = h.docs();
    let mut doomed = vec![false; docs.len()];
    doomed[root] = true;
    for i in root + 1..docs.len() {
        if let Some(parent) = &docs[i].parent {
            if let Some(pi) = h.position(parent) {
                if doomed[pi] {
                    doomed[i] = true;
                }
            }
        }
    }
    doomed
}

/// Removes `d` and its forest descendants without checking membership in the
/// joint future. Navigation uses this after snapshotting the doomed set.
fn remove_subtree(h: &History, d: &DocumentId) -> Result<History, SemanticsError> {
    let pos = h.position(d).ok_or_else(|| UnknownDocument(d.clone()))?;
    let doomed = subtree_positions(h, pos);
    let docs = h
        .docs()
        .iter()
        .enumerate()
        .filter(|(i, _)| !doomed[*i])
        .map(|(_, rec)| rec.clone())
        .collect();
    Ok(History::from_op(docs))
}

/// Deletes `d` (which must be a joint-session-future entry under `basis`)
/// together with all documents nested below it.
pub fn delete_entry(h: &History, d: &DocumentId, basis: Basis) -> Result<History, SemanticsError> {
    if !h.contains(d) {
        return Err(UnknownDocument(d.clone()).into());
    }
    if !h.joint_session_future(basis).contains(d) {
        return Err(SemanticsError::NotInJointFuture(d.clone()));
    }
    remove_subtree(h, d)
}

/// Replaces the fully active document `d` by the fresh document `fresh`:
/// `fresh` is appended chronologically last with `d`'s session and parent and
/// becomes active; `d` is deactivated. Children of `d` keep their parent.
pub fn replace_document(
    h: &History,
    d: &DocumentId,
    fresh: &DocumentId,
) -> Result<History, SemanticsError> {
    let pos = h.position(d).ok_or_else(|| UnknownDocument(d.clone()))?;
    if !h.is_fully_active(d) {
        return Err(SemanticsError::NotFullyActive(d.clone()));
    }
    if h.contains(fresh) {
        return Err(SemanticsError::DocumentExists(fresh.clone()));
    }
    let mut docs = h.docs().to_vec();
    docs[pos].active = false;
    docs.push(crate::history::DocumentRecord {
        id: fresh.clone(),
        parent: docs[pos].parent.clone(),
        session: docs[pos].session.clone(),
        active: true,
    });
    Ok(History::from_op(docs))
}

/// Navigates session `s` to the fresh document `fresh`: deletes the session
/// future of `s`'s active document (or, under patch 4, the whole joint
/// session future), then replaces that document by `fresh`.
pub fn navigate(
    h: &History,
    s: &SessionId,
    fresh: &DocumentId,
    patches: PatchSet,
) -> Result<History, SemanticsError> {
    let d = h
        .docs()
        .iter()
        .find(|rec| &rec.session == s && rec.active)
        .map(|rec| rec.id.clone())
        .ok_or_else(|| SemanticsError::UnknownSession(s.clone()))?;
    if !h.is_fully_active(&d) {
        return Err(SemanticsError::NotFullyActive(d));
    }
    if h.contains(fresh) {
        return Err(SemanticsError::DocumentExists(fresh.clone()));
    }
    // Snapshot the doomed set first: removals do not disturb the remaining
    // members, and a fixed descending order keeps runs reproducible.
    let doomed = if patches.delete_joint_future {
        h.joint_session_future(patches.basis())
    } else {
        h.session_future(&d)?
    };
    let mut current = h.clone();
    for victim in doomed.iter().rev() {
        if current.contains(victim) {
            current = remove_subtree(&current, victim)?;
        }
    }
    replace_document(&current, &d, fresh)
}

/// Loads a child document: `fresh` becomes the sole (hence active) member of
/// the new session `s`, nested under the fully active document `parent`.
pub fn load_child(
    h: &History,
    parent: &DocumentId,
    s: &SessionId,
    fresh: &DocumentId,
) -> Result<History, SemanticsError> {
    if !h.contains(parent) {
        return Err(UnknownDocument(parent.clone()).into());
    }
    if !h.is_fully_active(parent) {
        return Err(SemanticsError::NotFullyActive(parent.clone()));
    }
    if h.docs().iter().any(|rec| &rec.session == s) {
        return Err(SemanticsError::SessionExists(s.clone()));
    }
    if h.contains(fresh) {
        return Err(SemanticsError::DocumentExists(fresh.clone()));
    }
    let mut docs = h.docs().to_vec();
    docs.push(crate::history::DocumentRecord {
        id: fresh.clone(),
        parent: Some(parent.clone()),
        session: s.clone(),
        active: true,
    });
    Ok(History::from_op(docs))
}

/// Makes `d` the active document of its session; nothing else changes.
pub fn traverse_to(h: &History, d: &DocumentId) -> Result<History, SemanticsError> {
    let pos = h.position(d).ok_or_else(|| UnknownDocument(d.clone()))?;
    let session = h.docs()[pos].session.clone();
    let docs = h
        .docs()
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let mut rec = rec.clone();
            if rec.session == session {
                rec.active = i == pos;
            }
            rec
        })
        .collect();
    Ok(History::from_op(docs))
}

/// Traverses the history from `d`: activates `d`'s immediate session
/// predecessor.
pub fn traverse_from(h: &History, d: &DocumentId) -> Result<History, SemanticsError> {
    let past = h.session_past(d)?;
    let target = past
        .first()
        .ok_or_else(|| SemanticsError::EmptySessionPast(d.clone()))?;
    traverse_to(h, target)
}

/// Iterated forward form: `steps` unit steps, each activating the earliest
/// joint-future entry of the *current* intermediate history.
pub fn iterated_forward(
    h: &History,
    steps: usize,
    basis: Basis,
) -> Result<History, SemanticsError> {
    let mut current = h.clone();
    for step in 0..steps {
        let target = current
            .forward_target_with(basis)
            .ok_or(SemanticsError::NonWellFormedStuck {
                step: step + 1,
                total: steps,
            })?;
        current = traverse_to(&current, &target)?;
    }
    Ok(current)
}

/// Upfront forward form: activates the first `steps` entries of the joint
/// session future of the initial history, in order.
pub fn upfront_forward(h: &History, steps: usize, basis: Basis) -> Result<History, SemanticsError> {
    let future = h.joint_session_future(basis);
    if future.len() < steps {
        return Err(SemanticsError::NonWellFormedStuck {
            step: future.len() + 1,
            total: steps,
        });
    }
    let mut current = h.clone();
    for target in &future[..steps] {
        current = traverse_to(&current, target)?;
    }
    Ok(current)
}

/// Iterated backward form: `steps` unit steps, each traversing from the back
/// target of the current intermediate history.
pub fn iterated_backward(h: &History, steps: usize) -> Result<History, SemanticsError> {
    let mut current = h.clone();
    for step in 0..steps {
        let target = current
            .back_target()
            .ok_or(SemanticsError::NonWellFormedStuck {
                step: step + 1,
                total: steps,
            })?;
        current = traverse_from(&current, &target)?;
    }
    Ok(current)
}

/// Upfront backward form without symmetry: activates the first `steps`
/// entries of the joint session past of the initial history, in order.
pub fn upfront_backward(
    h: &History,
    steps: usize,
    basis: Basis,
) -> Result<History, SemanticsError> {
    let past = h.joint_session_past(basis);
    if past.len() < steps {
        return Err(SemanticsError::NonWellFormedStuck {
            step: past.len() + 1,
            total: steps,
        });
    }
    let mut current = h.clone();
    for target in &past[..steps] {
        current = traverse_to(&current, target)?;
    }
    Ok(current)
}

/// Upfront symmetric backward form: merges the active documents with the
/// joint session past, descending, keeps the entries that can go back, and
/// traverses from the first `steps` of them.
///
/// Entries that cannot go back are skipped when building the list; keeping
/// them would strand the fold on histories like `0.T(-)* 1.A(0) 2.A(0)*
/// 3.B(0)*`, where the latest active document has no predecessor. The
/// filtered list always has exactly as many entries as the joint session
/// past.
pub fn merged_backward(h: &History, steps: usize) -> Result<History, SemanticsError> {
    let past = h.joint_session_past(Basis::Active);
    let merged: Vec<DocumentId> = h
        .docs()
        .iter()
        .rev()
        .filter(|rec| rec.active || past.contains(&rec.id))
        .filter(|rec| {
            h.docs()[..h.position(&rec.id).expect("member")]
                .iter()
                .any(|other| other.session == rec.session)
        })
        .map(|rec| rec.id.clone())
        .collect();
    debug_assert_eq!(merged.len(), past.len());
    if merged.len() < steps {
        return Err(SemanticsError::NonWellFormedStuck {
            step: merged.len() + 1,
            total: steps,
        });
    }
    let mut current = h.clone();
    for doc in &merged[..steps] {
        current = traverse_from(&current, doc)?;
    }
    Ok(current)
}

/// Traverses the history by `delta` under the given patches.
///
/// The length pre-check runs against the joint session list selected by the
/// patch basis before any state changes, so an abort is atomic. With the
/// intermediaries patch alone, forward traversal is the upfront fold over
/// the initial joint future (the fully-active basis makes the recomputed and
/// upfront forms disagree; the upfront one is the patch as written). With
/// the active basis the two coincide on all inputs, and the iterated form is
/// used as the primary path.
pub fn traverse_by(
    h: &History,
    delta: Delta,
    patches: PatchSet,
) -> Result<TraversalOutcome, SemanticsError> {
    let n = delta.magnitude();
    if n == 0 {
        return Ok(TraversalOutcome::Changed(h.clone()));
    }
    let basis = patches.basis();
    if delta.0 > 0 {
        let future = h.joint_session_future(basis);
        if future.len() < n {
            return Ok(TraversalOutcome::Aborted(AbortReason::InsufficientFuture));
        }
        let result = if !patches.traverse_intermediaries {
            traverse_to(h, &future[n - 1])?
        } else if patches.active_basis {
            iterated_forward(h, n, basis)?
        } else {
            upfront_forward(h, n, basis)?
        };
        Ok(TraversalOutcome::Changed(result))
    } else {
        let past = h.joint_session_past(basis);
        if past.len() < n {
            return Ok(TraversalOutcome::Aborted(AbortReason::InsufficientPast));
        }
        let result = if patches.symmetric_back_traversal {
            iterated_backward(h, n)?
        } else if patches.traverse_intermediaries {
            upfront_backward(h, n, basis)?
        } else {
            traverse_to(h, &past[n - 1])?
        };
        Ok(TraversalOutcome::Changed(result))
    }
}

fn entry_sequence(
    h: &History,
    delta: Delta,
    basis: Basis,
) -> Result<Vec<DocumentId>, SemanticsError> {
    let n = delta.magnitude();
    if n == 0 {
        return Ok(Vec::new());
    }
    let entries = if delta.0 > 0 {
        h.joint_session_future(basis)
    } else {
        h.joint_session_past(basis)
    };
    if entries.len() < n {
        let reason = if delta.0 > 0 {
            AbortReason::InsufficientFuture
        } else {
            AbortReason::InsufficientPast
        };
        return Err(SemanticsError::TraversalAborted(reason));
    }
    Ok(entries[..n].to_vec())
}

fn classify_sequence(h: &History, sequence: Vec<DocumentId>) -> ActivationClassification {
    let touched: BTreeSet<&SessionId> = sequence
        .iter()
        .map(|id| h.session_of(id).expect("sequence member"))
        .collect();

    // Become active: no later same-session member in the sequence.
    let mut become_active: BTreeSet<DocumentId> = BTreeSet::new();
    for (i, id) in sequence.iter().enumerate() {
        let session = h.session_of(id).expect("sequence member");
        let superseded = sequence[i + 1..]
            .iter()
            .any(|later| h.session_of(later) == Some(session));
        if !superseded {
            become_active.insert(id.clone());
        }
    }

    let stay_active: BTreeSet<DocumentId> = h
        .docs()
        .iter()
        .filter(|rec| rec.active && !touched.contains(&rec.session))
        .map(|rec| rec.id.clone())
        .collect();

    let activating: BTreeSet<DocumentId> =
        become_active.union(&stay_active).cloned().collect();

    // Fully activating: every ancestor entry is itself fully activating.
    // Parents precede children chronologically, so one pass suffices.
    let mut fully_activating: BTreeSet<DocumentId> = BTreeSet::new();
    for rec in h.docs() {
        if !activating.contains(&rec.id) {
            continue;
        }
        let parent_ok = match &rec.parent {
            None => true,
            Some(p) => fully_activating.contains(p),
        };
        if parent_ok {
            fully_activating.insert(rec.id.clone());
        }
    }

    ActivationClassification {
        entry_sequence: sequence,
        become_active,
        stay_active,
        activating,
        fully_activating,
    }
}

/// Classifies the documents touched by a delta traversal: the entry sequence
/// (first `|delta|` joint future or past entries under the patch basis), the
/// entries that become or stay active, and of those the fully activating
/// ones. Errors mirror the traversal abort.
pub fn classify_activation(
    h: &History,
    delta: Delta,
    patches: PatchSet,
) -> Result<ActivationClassification, SemanticsError> {
    let sequence = entry_sequence(h, delta, patches.basis())?;
    Ok(classify_sequence(h, sequence))
}

/// The rewritten standard traversal: take the first `|delta|` entries of the
/// joint session future or past over all browsing contexts, activate each in
/// order, and report the activation classification alongside.
pub fn spec_traverse_by(h: &History, delta: Delta) -> (TraversalOutcome, ActivationClassification) {
    let sequence = match entry_sequence(h, delta, Basis::Active) {
        Ok(seq) => seq,
        Err(SemanticsError::TraversalAborted(reason)) => {
            return (
                TraversalOutcome::Aborted(reason),
                ActivationClassification::default(),
            )
        }
        Err(_) => unreachable!("entry_sequence only aborts"),
    };
    let classification = classify_sequence(h, sequence.clone());
    let mut current = h.clone();
    for entry in &sequence {
        current = traverse_to(&current, entry).expect("sequence entries are members");
    }
    (TraversalOutcome::Changed(current), classification)
}

/// Semantics selection: a patch combination, or the rewritten standard
/// algorithm (which navigates like the fully patched model and traverses via
/// [`spec_traverse_by`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemanticsMode {
    Patches(PatchSet),
    SpecAlgorithm,
}

impl SemanticsMode {
    /// The patches governing navigation and deletion under this mode.
    pub fn patches(&self) -> PatchSet {
        match self {
            SemanticsMode::Patches(p) => *p,
            SemanticsMode::SpecAlgorithm => PatchSet::PATCHED,
        }
    }

    /// The basis used for joint-history queries under this mode.
    pub fn basis(&self) -> Basis {
        match self {
            SemanticsMode::Patches(p) => p.basis(),
            SemanticsMode::SpecAlgorithm => Basis::Active,
        }
    }

    pub fn traverse_by(
        &self,
        h: &History,
        delta: Delta,
    ) -> Result<TraversalOutcome, SemanticsError> {
        match self {
            SemanticsMode::Patches(p) => traverse_by(h, delta, *p),
            SemanticsMode::SpecAlgorithm => Ok(spec_traverse_by(h, delta).0),
        }
    }

    pub fn navigate(
        &self,
        h: &History,
        s: &SessionId,
        fresh: &DocumentId,
    ) -> Result<History, SemanticsError> {
        navigate(h, s, fresh, self.patches())
    }
}

impl fmt::Display for SemanticsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemanticsMode::SpecAlgorithm => f.write_str("spec-algorithm"),
            SemanticsMode::Patches(p) => {
                for preset in Preset::ALL {
                    if let SemanticsMode::Patches(q) = preset.mode() {
                        if q == *p {
                            return f.write_str(preset.name());
                        }
                    }
                }
                write!(f, "{p}")
            }
        }
    }
}

/// The named semantics variants exposed on the command line. The patch
/// presets are cumulative, mirroring the order the corrections build on each
/// other; `spec-algorithm` selects the rewritten standard traversal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Spec,
    P1,
    P1P2,
    P1P2P3,
    Patched,
    SpecAlgorithm,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Spec,
        Preset::P1,
        Preset::P1P2,
        Preset::P1P2P3,
        Preset::Patched,
        Preset::SpecAlgorithm,
    ];

    pub fn mode(self) -> SemanticsMode {
        match self {
            Preset::Spec => SemanticsMode::Patches(PatchSet::SPEC),
            Preset::P1 => SemanticsMode::Patches(PatchSet::P1),
            Preset::P1P2 => SemanticsMode::Patches(PatchSet::P1P2),
            Preset::P1P2P3 => SemanticsMode::Patches(PatchSet::P1P2P3),
            Preset::Patched => SemanticsMode::Patches(PatchSet::PATCHED),
            Preset::SpecAlgorithm => SemanticsMode::SpecAlgorithm,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Spec => "spec",
            Preset::P1 => "p1",
            Preset::P1P2 => "p1p2",
            Preset::P1P2P3 => "p1p2p3",
            Preset::Patched => "patched",
            Preset::SpecAlgorithm => "spec-algorithm",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown preset `{0}`; expected spec|p1|p1p2|p1p2p3|patched|spec-algorithm")]
pub struct UnknownPreset(pub String);

impl FromStr for Preset {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownPreset(s.to_string()))
    }
}
