//! Navigation-history state: documents in chronological order, the parent
//! forest, same-session grouping, and the derived sets the traversal
//! semantics is built from.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifies one document.
///
/// Ids are opaque tokens. Chronological comparison of two ids is only
/// meaningful through the [`History`] that owns them; the derived `Ord` is
/// lexicographic and exists so ids can live in ordered sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DocumentId(String);

impl DocumentId {
    pub fn new(id: impl Into<String>) -> Self {
        DocumentId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for DocumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for DocumentId {
    fn from(s: &str) -> Self {
        DocumentId::new(s)
    }
}

/// Names one browsing context: the equivalence class of documents that share
/// a session history.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionId(String);

impl SessionId {
    pub fn new(id: impl Into<String>) -> Self {
        SessionId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SessionId {
    fn from(s: &str) -> Self {
        SessionId::new(s)
    }
}

/// One document: identity, parent (absent for a root), owning session, and
/// whether it currently is its session's active entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DocumentRecord {
    pub id: DocumentId,
    pub parent: Option<DocumentId>,
    pub session: SessionId,
    pub active: bool,
}

impl DocumentRecord {
    pub fn root(id: impl Into<String>, session: impl Into<String>, active: bool) -> Self {
        DocumentRecord {
            id: DocumentId::new(id),
            parent: None,
            session: SessionId::new(session),
            active,
        }
    }

    pub fn child(
        id: impl Into<String>,
        parent: impl Into<String>,
        session: impl Into<String>,
        active: bool,
    ) -> Self {
        DocumentRecord {
            id: DocumentId::new(id),
            parent: Some(DocumentId::new(parent)),
            session: SessionId::new(session),
            active,
        }
    }
}

/// Which active set seeds the joint session future and past: only the fully
/// active documents, or every active document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    FullyActive,
    Active,
}

/// The structural invariants a document sequence must satisfy to be a
/// navigation history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    /// I1: all document ids are distinct.
    UniqueIds,
    /// I2: a parent occurs strictly earlier in the chronological sequence.
    ParentPrecedesChild,
    /// I3: documents of one session all have the same parent.
    SessionParentAgreement,
    /// I4: every session has exactly one active document.
    OneActivePerSession,
    /// I5: all parentless documents belong to one (top-level) session.
    SingleRootSession,
    /// I6: a history contains at least one document.
    NonEmpty,
}

impl Invariant {
    pub fn code(self) -> &'static str {
        match self {
            Invariant::UniqueIds => "I1",
            Invariant::ParentPrecedesChild => "I2",
            Invariant::SessionParentAgreement => "I3",
            Invariant::OneActivePerSession => "I4",
            Invariant::SingleRootSession => "I5",
            Invariant::NonEmpty => "I6",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Invariant::UniqueIds => "unique document ids",
            Invariant::ParentPrecedesChild => "parent precedes child",
            Invariant::SessionParentAgreement => "session members share a parent",
            Invariant::OneActivePerSession => "one active document per session",
            Invariant::SingleRootSession => "single top-level session",
            Invariant::NonEmpty => "non-empty history",
        };
        write!(f, "{} ({})", self.code(), name)
    }
}

/// A single invariant breach, naming the documents involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantViolation {
    pub invariant: Invariant,
    pub docs: Vec<DocumentId>,
    pub message: String,
}

impl fmt::Display for InvariantViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.message)
    }
}

/// Validation failure: every violated invariant, with the offending documents.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationError {
    pub violations: Vec<InvariantViolation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid history:")?;
        for v in &self.violations {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

/// Lookup of a document id that is not part of the history.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown document id `{0}`")]
pub struct UnknownDocument(pub DocumentId);

/// A complete navigation history.
///
/// The sequence order of `docs` is the chronological order; every query and
/// operation is relative to it. Values are immutable: operations build new
/// histories.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct History {
    docs: Vec<DocumentRecord>,
}

impl History {
    /// Checks I1-I6 and wraps the sequence into a `History`. On failure every
    /// violated invariant is reported.
    pub fn validate(docs: Vec<DocumentRecord>) -> Result<History, ValidationError> {
        let violations = violations_of(&docs);
        if violations.is_empty() {
            Ok(History { docs })
        } else {
            Err(ValidationError { violations })
        }
    }

    /// The one-document history every browsing session starts from.
    pub fn initial(root: impl Into<String>, session: impl Into<String>) -> History {
        History {
            docs: vec![DocumentRecord::root(root, session, true)],
        }
    }

    /// Internal constructor for operation results. The semantics operations
    /// preserve validity; debug builds re-check.
    pub(crate) fn from_op(docs: Vec<DocumentRecord>) -> History {
        debug_assert!(
            violations_of(&docs).is_empty(),
            "operation produced an invalid history: {:?}",
            violations_of(&docs)
        );
        History { docs }
    }

    pub fn docs(&self) -> &[DocumentRecord] {
        &self.docs
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn contains(&self, id: &DocumentId) -> bool {
        self.position(id).is_some()
    }

    /// Chronological position of a document (0 = oldest).
    pub fn position(&self, id: &DocumentId) -> Option<usize> {
        self.docs.iter().position(|d| &d.id == id)
    }

    pub fn record(&self, id: &DocumentId) -> Option<&DocumentRecord> {
        self.docs.iter().find(|d| &d.id == id)
    }

    pub fn session_of(&self, id: &DocumentId) -> Option<&SessionId> {
        self.record(id).map(|d| &d.session)
    }

    /// All active documents, chronologically.
    pub fn active(&self) -> Vec<DocumentId> {
        self.docs
            .iter()
            .filter(|d| d.active)
            .map(|d| d.id.clone())
            .collect()
    }

    /// The active documents as a set, for order-insensitive comparison.
    pub fn active_set(&self) -> BTreeSet<DocumentId> {
        self.docs
            .iter()
            .filter(|d| d.active)
            .map(|d| d.id.clone())
            .collect()
    }

    /// The active document of the top-level session. Unique by I4 + I5.
    pub fn active_root(&self) -> DocumentId {
        self.docs
            .iter()
            .find(|d| d.parent.is_none() && d.active)
            .map(|d| d.id.clone())
            .expect("validated history has an active root")
    }

    /// Per-position fully-active flags: a document is fully active when it is
    /// active and reachable from the active root through active children.
    /// Parents precede children, so one chronological pass suffices.
    fn fully_active_flags(&self) -> Vec<bool> {
        let mut fa = vec![false; self.docs.len()];
        for (i, d) in self.docs.iter().enumerate() {
            if !d.active {
                continue;
            }
            fa[i] = match &d.parent {
                None => true,
                Some(p) => self.position(p).map(|pi| fa[pi]).unwrap_or(false),
            };
        }
        fa
    }

    /// The documents the user actually sees: active with every ancestor
    /// active. Returned chronologically.
    pub fn fully_active(&self) -> Vec<DocumentId> {
        let fa = self.fully_active_flags();
        self.docs
            .iter()
            .enumerate()
            .filter(|(i, _)| fa[*i])
            .map(|(_, d)| d.id.clone())
            .collect()
    }

    pub fn fully_active_set(&self) -> BTreeSet<DocumentId> {
        self.fully_active().into_iter().collect()
    }

    pub fn is_fully_active(&self, id: &DocumentId) -> bool {
        match self.position(id) {
            Some(i) => self.fully_active_flags()[i],
            None => false,
        }
    }

    /// Same-session documents strictly later than `id`, oldest first.
    pub fn session_future(&self, id: &DocumentId) -> Result<Vec<DocumentId>, UnknownDocument> {
        let pos = self.position(id).ok_or_else(|| UnknownDocument(id.clone()))?;
        let session = &self.docs[pos].session;
        Ok(self.docs[pos + 1..]
            .iter()
            .filter(|d| &d.session == session)
            .map(|d| d.id.clone())
            .collect())
    }

    /// Same-session documents strictly earlier than `id`, latest first.
    pub fn session_past(&self, id: &DocumentId) -> Result<Vec<DocumentId>, UnknownDocument> {
        let pos = self.position(id).ok_or_else(|| UnknownDocument(id.clone()))?;
        let session = &self.docs[pos].session;
        Ok(self.docs[..pos]
            .iter()
            .rev()
            .filter(|d| &d.session == session)
            .map(|d| d.id.clone())
            .collect())
    }

    fn basis_positions(&self, basis: Basis) -> Vec<usize> {
        match basis {
            Basis::Active => self
                .docs
                .iter()
                .enumerate()
                .filter(|(_, d)| d.active)
                .map(|(i, _)| i)
                .collect(),
            Basis::FullyActive => {
                let fa = self.fully_active_flags();
                (0..self.docs.len()).filter(|&i| fa[i]).collect()
            }
        }
    }

    fn joint_future_positions(&self, basis: Basis) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for seed in self.basis_positions(basis) {
            let session = &self.docs[seed].session;
            for (i, d) in self.docs.iter().enumerate().skip(seed + 1) {
                if &d.session == session {
                    out.push(i);
                }
            }
        }
        // Sessions are disjoint and carry one seed each, so no duplicates.
        out.sort_unstable();
        out
    }

    fn joint_past_positions(&self, basis: Basis) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for seed in self.basis_positions(basis) {
            let session = &self.docs[seed].session;
            for (i, d) in self.docs.iter().enumerate().take(seed) {
                if &d.session == session {
                    out.push(i);
                }
            }
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Union of the session futures of the basis documents, ascending.
    pub fn joint_session_future(&self, basis: Basis) -> Vec<DocumentId> {
        self.joint_future_positions(basis)
            .into_iter()
            .map(|i| self.docs[i].id.clone())
            .collect()
    }

    /// Union of the session pasts of the basis documents, descending.
    pub fn joint_session_past(&self, basis: Basis) -> Vec<DocumentId> {
        self.joint_past_positions(basis)
            .into_iter()
            .map(|i| self.docs[i].id.clone())
            .collect()
    }

    pub(crate) fn forward_target_with(&self, basis: Basis) -> Option<DocumentId> {
        self.joint_future_positions(basis)
            .first()
            .map(|&i| self.docs[i].id.clone())
    }

    /// The chronologically earliest joint-session-future entry (over all
    /// active documents), if any: the document a unit forward step activates.
    pub fn forward_target(&self) -> Option<DocumentId> {
        self.forward_target_with(Basis::Active)
    }

    /// The chronologically latest active document with a non-empty session
    /// past: the document a unit backward step traverses from.
    pub fn back_target(&self) -> Option<DocumentId> {
        self.docs
            .iter()
            .enumerate()
            .rev()
            .find(|(i, d)| d.active && self.session_has_past(*i, &d.session))
            .map(|(_, d)| d.id.clone())
    }

    fn session_has_past(&self, pos: usize, session: &SessionId) -> bool {
        self.docs[..pos].iter().any(|d| &d.session == session)
    }

    /// A history is well formed when no active document lies chronologically
    /// later than some other active document's future entry. Equivalently:
    /// the back target precedes the forward target.
    pub fn is_well_formed(&self) -> bool {
        let earliest_future = self.joint_future_positions(Basis::Active).first().copied();
        let latest_back = self
            .docs
            .iter()
            .enumerate()
            .rev()
            .find(|(i, d)| d.active && self.session_has_past(*i, &d.session))
            .map(|(i, _)| i);
        match (latest_back, earliest_future) {
            (Some(b), Some(f)) => b < f,
            _ => true,
        }
    }

    /// Identity-free key: ids become chronological ranks, sessions are
    /// numbered by first appearance. Two histories that differ only in naming
    /// share a canonical form.
    pub fn canonical(&self) -> CanonicalHistory {
        let mut session_ranks: Vec<&SessionId> = Vec::new();
        let mut docs = Vec::with_capacity(self.docs.len());
        for d in &self.docs {
            let session = match session_ranks.iter().position(|s| *s == &d.session) {
                Some(i) => i as u32,
                None => {
                    session_ranks.push(&d.session);
                    (session_ranks.len() - 1) as u32
                }
            };
            let parent = d
                .parent
                .as_ref()
                .map(|p| self.position(p).expect("parent exists") as u32);
            docs.push(CanonicalDoc {
                parent,
                session,
                active: d.active,
            });
        }
        CanonicalHistory { docs }
    }
}

/// Compact one-line notation: `id.SESSION(parent)` per document in
/// chronological order, `*` marking active entries, `-` for a root parent.
impl fmt::Display for History {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.docs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            let parent = d.parent.as_ref().map(|p| p.as_str()).unwrap_or("-");
            write!(f, "{}.{}({})", d.id, d.session, parent)?;
            if d.active {
                f.write_str("*")?;
            }
        }
        Ok(())
    }
}

/// Error parsing the compact one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompactParseError {
    #[error("malformed document `{0}`: expected id.SESSION(parent)[*]")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

impl FromStr for History {
    type Err = CompactParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut docs = Vec::new();
        for token in s.split_whitespace() {
            let (body, active) = match token.strip_suffix('*') {
                Some(body) => (body, true),
                None => (token, false),
            };
            let bad = || CompactParseError::Malformed(token.to_string());
            let (id, rest) = body.split_once('.').ok_or_else(bad)?;
            let (session, rest) = rest.split_once('(').ok_or_else(bad)?;
            let parent = rest.strip_suffix(')').ok_or_else(bad)?;
            if id.is_empty() || session.is_empty() || parent.is_empty() {
                return Err(bad());
            }
            docs.push(DocumentRecord {
                id: DocumentId::new(id),
                parent: (parent != "-").then(|| DocumentId::new(parent)),
                session: SessionId::new(session),
                active,
            });
        }
        Ok(History::validate(docs)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalDoc {
    pub parent: Option<u32>,
    pub session: u32,
    pub active: bool,
}

/// Canonical form of a history; orderable and hashable for deduplication.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalHistory {
    docs: Vec<CanonicalDoc>,
}

impl CanonicalHistory {
    pub fn docs(&self) -> &[CanonicalDoc] {
        &self.docs
    }

    /// Rebuilds a concrete history with rank ids `0..n` and sessions named
    /// `s0, s1, ...` in first-appearance order.
    pub fn materialize(&self) -> History {
        let docs = self
            .docs
            .iter()
            .enumerate()
            .map(|(i, d)| DocumentRecord {
                id: DocumentId::new(i.to_string()),
                parent: d.parent.map(|p| DocumentId::new(p.to_string())),
                session: SessionId::new(format!("s{}", d.session)),
                active: d.active,
            })
            .collect();
        History::from_op(docs)
    }
}

fn violations_of(docs: &[DocumentRecord]) -> Vec<InvariantViolation> {
    let mut violations = Vec::new();

    if docs.is_empty() {
        violations.push(InvariantViolation {
            invariant: Invariant::NonEmpty,
            docs: vec![],
            message: "a history must contain at least one document".into(),
        });
        return violations;
    }

    // I1: unique ids.
    let mut seen: BTreeSet<&DocumentId> = BTreeSet::new();
    for d in docs {
        if !seen.insert(&d.id) {
            violations.push(InvariantViolation {
                invariant: Invariant::UniqueIds,
                docs: vec![d.id.clone()],
                message: format!("document id `{}` occurs more than once", d.id),
            });
        }
    }

    // I2: parents exist and occur strictly earlier.
    for (i, d) in docs.iter().enumerate() {
        if let Some(parent) = &d.parent {
            let earlier = docs[..i].iter().any(|e| &e.id == parent);
            if !earlier {
                violations.push(InvariantViolation {
                    invariant: Invariant::ParentPrecedesChild,
                    docs: vec![d.id.clone()],
                    message: format!(
                        "document `{}` has parent `{}` which does not occur earlier",
                        d.id, parent
                    ),
                });
            }
        }
    }

    // I3: all documents of a session carry the same parent.
    let mut session_parent: Vec<(&SessionId, &Option<DocumentId>)> = Vec::new();
    for d in docs {
        match session_parent.iter().find(|(s, _)| *s == &d.session) {
            None => session_parent.push((&d.session, &d.parent)),
            Some((_, first_parent)) => {
                if *first_parent != &d.parent {
                    violations.push(InvariantViolation {
                        invariant: Invariant::SessionParentAgreement,
                        docs: vec![d.id.clone()],
                        message: format!(
                            "document `{}` disagrees with its session `{}` about the parent",
                            d.id, d.session
                        ),
                    });
                }
            }
        }
    }

    // I4: exactly one active document per session.
    let mut sessions: Vec<&SessionId> = Vec::new();
    for d in docs {
        if !sessions.contains(&&d.session) {
            sessions.push(&d.session);
        }
    }
    for session in sessions {
        let actives: Vec<DocumentId> = docs
            .iter()
            .filter(|d| &d.session == session && d.active)
            .map(|d| d.id.clone())
            .collect();
        if actives.len() != 1 {
            violations.push(InvariantViolation {
                invariant: Invariant::OneActivePerSession,
                message: format!(
                    "session `{}` has {} active documents, expected exactly 1",
                    session,
                    actives.len()
                ),
                docs: actives,
            });
        }
    }

    // I5: all roots share one session.
    let roots: Vec<&DocumentRecord> = docs.iter().filter(|d| d.parent.is_none()).collect();
    if let Some(first) = roots.first() {
        let strays: Vec<DocumentId> = roots
            .iter()
            .filter(|d| d.session != first.session)
            .map(|d| d.id.clone())
            .collect();
        if !strays.is_empty() {
            violations.push(InvariantViolation {
                invariant: Invariant::SingleRootSession,
                message: format!(
                    "parentless documents must share session `{}`",
                    first.session
                ),
                docs: strays,
            });
        }
    }

    violations
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> History {
        s.parse().expect("test history parses")
    }

    fn ids(v: &[&str]) -> Vec<DocumentId> {
        v.iter().map(|s| DocumentId::new(*s)).collect()
    }

    // The initial state of catalog case 1.
    const CE1: &str = "0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)";
    // The running example: two nested frames, session A = {1,5}, B = {2,4}.
    const NESTED: &str = "0.T(-)* 1.A(0)* 2.B(1) 3.C(0)* 4.B(1)* 5.A(0)";
    // NESTED after navigating session A to 6 (5 deleted, 1 replaced).
    const NESTED_NAV: &str = "0.T(-)* 1.A(0) 2.B(1) 3.C(0)* 4.B(1)* 6.A(0)*";
    // The backward-asymmetry witness.
    const W: &str = "0.T(-)* 1.A(0) 2.B(0) 3.B(0)* 4.A(0)*";

    #[test]
    fn validate_accepts_catalog_case_1() {
        let history = h(CE1);
        assert_eq!(history.len(), 5);
        assert_eq!(history.active(), ids(&["0", "1", "2"]));
    }

    #[test]
    fn validate_rejects_two_active_in_one_session() {
        let err = "0.T(-)* 1.A(0)* 2.A(0)*".parse::<History>().unwrap_err();
        let CompactParseError::Invalid(err) = err else {
            panic!("expected validation failure, got {err:?}");
        };
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].invariant, Invariant::OneActivePerSession);
    }

    #[test]
    fn validate_rejects_later_parent() {
        let err = "0.T(-)* 1.A(2)* 2.B(0)*".parse::<History>().unwrap_err();
        let CompactParseError::Invalid(err) = err else {
            panic!("expected validation failure, got {err:?}");
        };
        assert_eq!(err.violations.len(), 1);
        assert_eq!(err.violations[0].invariant, Invariant::ParentPrecedesChild);
        assert_eq!(err.violations[0].docs, ids(&["1"]));
    }

    #[test]
    fn validate_reports_each_breached_invariant_exactly() {
        // Single-field mutations of CE1, each breaching exactly one invariant.
        let cases: Vec<(&str, Invariant)> = vec![
            ("0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 3.B(0)", Invariant::UniqueIds),
            (
                "0.T(-)* 1.A(2)* 2.B(0)* 3.A(2) 4.B(0)",
                Invariant::ParentPrecedesChild,
            ),
            (
                "0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(1)",
                Invariant::SessionParentAgreement,
            ),
            (
                "0.T(-)* 1.A(0)* 2.B(0)* 3.A(0)* 4.B(0)",
                Invariant::OneActivePerSession,
            ),
            // Flipping the parent of a sole-member session to `-` breaches
            // only the single-root-session invariant.
            ("0.T(-)* 1.A(-)*", Invariant::SingleRootSession),
            ("", Invariant::NonEmpty),
        ];
        for (text, expected) in cases {
            let err = text.parse::<History>().unwrap_err();
            let CompactParseError::Invalid(err) = err else {
                panic!("expected validation failure for {text:?}");
            };
            assert_eq!(err.violations.len(), 1, "{text:?} -> {err}");
            assert_eq!(err.violations[0].invariant, expected, "{text:?}");
        }
    }

    #[test]
    fn active_root_of_catalog_case_1() {
        assert_eq!(h(CE1).active_root(), DocumentId::new("0"));
        assert_eq!(h("0.T(-)*").active_root(), DocumentId::new("0"));
    }

    #[test]
    fn fully_active_excludes_children_of_inactive_parents() {
        // Active {0,3,4,5} but 4's parent 1 is inactive.
        let history = h("0.T(-)* 1.A(0) 2.B(1) 3.C(0)* 4.B(1)* 5.A(0)*");
        assert_eq!(history.fully_active(), ids(&["0", "3", "5"]));

        // 3 is active but its parent 2 is not.
        let ce2 = h("0.T(-)* 1.A(0)* 2.A(0) 3.B(2)* 4.B(2) 5.T(-)");
        assert_eq!(ce2.fully_active(), ids(&["0", "1"]));

        assert_eq!(h("0.T(-)*").fully_active(), ids(&["0"]));
    }

    #[test]
    fn session_future_and_past() {
        let nested = h(NESTED);
        assert_eq!(
            nested.session_future(&DocumentId::new("1")).unwrap(),
            ids(&["5"])
        );
        assert_eq!(nested.session_future(&DocumentId::new("5")).unwrap(), ids(&[]));

        // Session {1,4} with 4 active: the past of 4 is (1).
        let p3 = h("0.T(-)* 1.A(0) 2.B(0)* 3.B(0) 4.A(0)*");
        assert_eq!(p3.session_past(&DocumentId::new("4")).unwrap(), ids(&["1"]));
        assert_eq!(p3.session_past(&DocumentId::new("1")).unwrap(), ids(&[]));

        assert_eq!(h(W).session_past(&DocumentId::new("3")).unwrap(), ids(&["2"]));

        let missing = nested.session_future(&DocumentId::new("9")).unwrap_err();
        assert_eq!(missing, UnknownDocument(DocumentId::new("9")));
    }

    #[test]
    fn session_future_of_deleted_entry_under_either_basis() {
        // Counterexample-5 initial state: the joint future under the active
        // basis is session A's stale entry 3.
        let ce5 = h("0.T(-)* 1.A(0)* 2.B(1)* 3.A(0)");
        assert_eq!(ce5.joint_session_future(Basis::Active), ids(&["3"]));
        assert_eq!(ce5.joint_session_future(Basis::FullyActive), ids(&["3"]));
    }

    #[test]
    fn joint_session_future_depends_on_basis() {
        let ce1 = h(CE1);
        assert_eq!(ce1.joint_session_future(Basis::FullyActive), ids(&["3", "4"]));
        assert_eq!(ce1.joint_session_future(Basis::Active), ids(&["3", "4"]));

        let ce2 = h("0.T(-)* 1.A(0)* 2.A(0) 3.B(2)* 4.B(2) 5.T(-)");
        assert_eq!(ce2.joint_session_future(Basis::FullyActive), ids(&["2", "5"]));
        assert_eq!(ce2.joint_session_future(Basis::Active), ids(&["2", "4", "5"]));

        // All active documents are their session's maximum.
        assert_eq!(h(W).joint_session_future(Basis::Active), ids(&[]));
    }

    #[test]
    fn joint_session_past_depends_on_basis() {
        let nav = h(NESTED_NAV);
        assert_eq!(nav.joint_session_past(Basis::Active), ids(&["2", "1"]));
        assert_eq!(nav.joint_session_past(Basis::FullyActive), ids(&["1"]));
        assert_eq!(h("0.T(-)*").joint_session_past(Basis::Active), ids(&[]));
    }

    #[test]
    fn forward_target_is_earliest_joint_future_entry() {
        assert_eq!(h(CE1).forward_target(), Some(DocumentId::new("3")));
        assert_eq!(h("0.T(-)*").forward_target(), None);
        // After traversing CE1 to 3 the next forward target is 4.
        let mid = h("0.T(-)* 1.A(0) 2.B(0)* 3.A(0)* 4.B(0)");
        assert_eq!(mid.forward_target(), Some(DocumentId::new("4")));
    }

    #[test]
    fn back_target_is_latest_active_that_can_go_back() {
        let p3 = h("0.T(-)* 1.A(0) 2.B(0)* 3.B(0) 4.A(0)*");
        assert_eq!(p3.back_target(), Some(DocumentId::new("4")));
        assert_eq!(h("0.T(-)*").back_target(), None);
        // 6 and 4 can both go back; 6 is chronologically later.
        assert_eq!(h(NESTED_NAV).back_target(), Some(DocumentId::new("6")));
    }

    #[test]
    fn well_formedness_of_catalog_states() {
        assert!(!h("0.T(-)* 1.A(0)* 2.B(1) 3.A(0) 4.B(1)*").is_well_formed());
        assert!(h(CE1).is_well_formed());
        assert!(h("0.T(-)*").is_well_formed());
        assert!(!h("0.T(-)* 1.A(0) 2.B(0)* 3.B(0) 4.A(0)*").is_well_formed());
        assert!(h(W).is_well_formed());
        assert!(h(NESTED).is_well_formed());
    }

    /// Brute-force transcription of the well-formedness definition, used as
    /// an oracle for the optimized check.
    pub(crate) fn well_formed_brute_force(history: &History) -> bool {
        let docs = history.docs();
        let n = docs.len();
        let later_same_session = |i: usize, j: usize| docs[i].session == docs[j].session && i < j;
        for a in 0..n {
            for b in 0..n {
                if !(docs[a].active && later_same_session(a, b)) {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        if !(docs[d].active && later_same_session(c, d)) {
                            continue;
                        }
                        if d > b {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn well_formedness_matches_brute_force_on_fixtures() {
        for text in [
            CE1,
            NESTED,
            NESTED_NAV,
            W,
            "0.T(-)*",
            "0.T(-)* 1.A(0)* 2.A(0) 3.B(2)* 4.B(2) 5.T(-)",
            "0.T(-)* 1.A(0) 2.B(0)* 3.B(0) 4.A(0)*",
            "0.T(-)* 1.A(0)* 2.B(1) 3.A(0) 4.B(1)*",
            "0.T(-)* 1.A(0)* 2.B(1)* 3.A(0)",
            "0.T(-)* 1.A(0)* 2.B(0) 3.A(0) 4.B(0)*",
        ] {
            let history = h(text);
            assert_eq!(
                history.is_well_formed(),
                well_formed_brute_force(&history),
                "{text}"
            );
        }
    }

    #[test]
    fn compact_notation_round_trips() {
        for text in [CE1, NESTED, W, "0.T(-)*"] {
            let history = h(text);
            assert_eq!(history.to_string(), text);
            assert_eq!(h(&history.to_string()), history);
        }
    }

    #[test]
    fn canonical_form_forgets_names_only() {
        let a = h(CE1);
        let b = h("10.top(-)* 20.left(10)* 30.right(10)* 40.left(10) 50.right(10)");
        assert_eq!(a.canonical(), b.canonical());
        assert_ne!(a.canonical(), h(W).canonical());
        let materialized = a.canonical().materialize();
        assert_eq!(materialized.to_string(), "0.s0(-)* 1.s1(0)* 2.s2(0)* 3.s1(0) 4.s2(0)");
        assert_eq!(materialized.canonical(), a.canonical());
    }
}
