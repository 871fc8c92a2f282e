//! The verification harness: delta-composition checking, the unit-step lemma
//! suite, seeded random traces, bounded exhaustive enumeration of reachable
//! states, and differential trace replay.

use std::collections::BTreeSet;
use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::history::{Basis, CanonicalHistory, DocumentId, History, SessionId};
use crate::semantics::{
    self, iterated_backward, iterated_forward, merged_backward, upfront_forward, Delta,
    SemanticsError, SemanticsMode, TraversalOutcome,
};
use crate::trace::{Action, Trace};

/// Bounds for trace generation and reachable-state enumeration. Any finite
/// bounds make the enumeration terminate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameSchema {
    /// How many child sessions one document may spawn.
    pub max_child_sessions_per_document: u32,
    /// Maximum nesting depth; the root sits at depth 0.
    pub max_depth: u32,
    /// How many navigations one session may absorb.
    pub max_navigations_per_session: u32,
    /// Length bound on the action sequence.
    pub max_total_actions: u32,
}

impl FrameSchema {
    pub const fn new(children: u32, depth: u32, navigations: u32, actions: u32) -> Self {
        FrameSchema {
            max_child_sessions_per_document: children,
            max_depth: depth,
            max_navigations_per_session: navigations,
            max_total_actions: actions,
        }
    }
}

/// Desk-scale default: enough to cover every catalog shape while keeping
/// exhaustive sweeps fast.
impl Default for FrameSchema {
    fn default() -> Self {
        FrameSchema::new(2, 2, 2, 6)
    }
}

impl fmt::Display for FrameSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            self.max_child_sessions_per_document,
            self.max_depth,
            self.max_navigations_per_session,
            self.max_total_actions
        )
    }
}

/// A traversal result flattened for reporting: a successor history, an
/// abort, or a mid-iteration fault.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepOutcome {
    Changed(History),
    Aborted(semantics::AbortReason),
    Fault(String),
}

impl StepOutcome {
    fn from_result(result: Result<TraversalOutcome, SemanticsError>) -> Self {
        match result {
            Ok(TraversalOutcome::Changed(h)) => StepOutcome::Changed(h),
            Ok(TraversalOutcome::Aborted(r)) => StepOutcome::Aborted(r),
            Err(e) => StepOutcome::Fault(e.to_string()),
        }
    }

    pub fn changed(&self) -> Option<&History> {
        match self {
            StepOutcome::Changed(h) => Some(h),
            _ => None,
        }
    }
}

impl fmt::Display for StepOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepOutcome::Changed(h) => write!(f, "{h}"),
            StepOutcome::Aborted(r) => write!(f, "aborted ({r})"),
            StepOutcome::Fault(e) => write!(f, "fault ({e})"),
        }
    }
}

/// A concrete break of the composition property on one history: the delta
/// pair, both stepwise outcomes, and the diverging composite outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalWitness {
    pub history: History,
    pub delta: Delta,
    pub delta_prime: Delta,
    pub first: StepOutcome,
    pub second: StepOutcome,
    pub composite: StepOutcome,
}

impl FundamentalWitness {
    /// A replayable trace of the stepwise route, asserting its final state.
    pub fn stepwise_trace(&self) -> Trace {
        let mut actions = vec![
            Action::TraverseBy { delta: self.delta },
            Action::TraverseBy { delta: self.delta_prime },
        ];
        if let StepOutcome::Changed(h) = &self.second {
            actions.push(Action::ExpectActive { ids: h.active() });
        }
        Trace {
            initial: self.history.clone(),
            actions,
        }
    }

    /// A replayable trace of the composite route, asserting the stepwise
    /// final state; replaying it under the same semantics demonstrates the
    /// divergence.
    pub fn composite_trace(&self) -> Trace {
        let mut actions = vec![Action::TraverseBy {
            delta: Delta(self.delta.0 + self.delta_prime.0),
        }];
        if let StepOutcome::Changed(h) = &self.second {
            actions.push(Action::ExpectActive { ids: h.active() });
        }
        Trace {
            initial: self.history.clone(),
            actions,
        }
    }
}

impl fmt::Display for FundamentalWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "history:            {}", self.history)?;
        writeln!(f, "traverse {}:        {}", self.delta, self.first)?;
        writeln!(f, "then {}:            {}", self.delta_prime, self.second)?;
        write!(
            f,
            "traverse {} directly: {}",
            Delta(self.delta.0 + self.delta_prime.0),
            self.composite
        )
    }
}

/// Outcome of a composition check; `holds == false` carries a replayable
/// witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyVerdict {
    pub holds: bool,
    pub witness: Option<FundamentalWitness>,
}

/// Checks the composition property on `h`: for every pair of deltas up to
/// `bound`, traversing by the first and then the second (when both succeed)
/// must equal traversing by their sum, structurally. A composite abort after
/// two successful steps also counts as a violation. Deltas are enumerated in
/// ascending order and the first failure becomes the witness.
pub fn check_fundamental(h: &History, bound: u32, mode: &SemanticsMode) -> PropertyVerdict {
    let bound = bound as i64;
    for delta in -bound..=bound {
        let first = mode.traverse_by(h, Delta(delta));
        let Ok(TraversalOutcome::Changed(h1)) = first else {
            continue;
        };
        for delta_prime in -bound..=bound {
            let second = mode.traverse_by(&h1, Delta(delta_prime));
            let Ok(TraversalOutcome::Changed(h2)) = second else {
                continue;
            };
            let composite = mode.traverse_by(h, Delta(delta + delta_prime));
            let agrees = matches!(&composite, Ok(TraversalOutcome::Changed(hc)) if hc == &h2);
            if !agrees {
                return PropertyVerdict {
                    holds: false,
                    witness: Some(FundamentalWitness {
                        history: h.clone(),
                        delta: Delta(delta),
                        delta_prime: Delta(delta_prime),
                        first: StepOutcome::Changed(h1),
                        second: StepOutcome::Changed(h2),
                        composite: StepOutcome::from_result(composite),
                    }),
                };
            }
        }
    }
    PropertyVerdict {
        holds: true,
        witness: None,
    }
}

/// The unit-step properties behind the composition proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma {
    /// Iterated forward traversal equals the upfront fold over the initial
    /// joint session future (active basis).
    ForwardUnfolding,
    /// Iterated backward traversal equals the merged-list fold.
    BackwardUnfolding,
    /// Traversing to the forward target makes it the back target, and
    /// traversing back from it restores the original history.
    ForwardBackInverse,
    /// Traversing from the back target makes it the forward target, and
    /// traversing to it restores the original history.
    BackForwardInverse,
    /// A unit forward step preserves well-formedness.
    ForwardPreservesWellFormed,
    /// A unit backward step preserves well-formedness.
    BackwardPreservesWellFormed,
}

impl Lemma {
    pub const ALL: [Lemma; 6] = [
        Lemma::ForwardUnfolding,
        Lemma::BackwardUnfolding,
        Lemma::ForwardBackInverse,
        Lemma::BackForwardInverse,
        Lemma::ForwardPreservesWellFormed,
        Lemma::BackwardPreservesWellFormed,
    ];

    pub fn index(self) -> usize {
        Lemma::ALL.iter().position(|l| *l == self).expect("member")
    }

    pub fn describe(self) -> &'static str {
        match self {
            Lemma::ForwardUnfolding => "iterated forward == upfront forward fold",
            Lemma::BackwardUnfolding => "iterated backward == merged backward fold",
            Lemma::ForwardBackInverse => "forward step then back step is the identity",
            Lemma::BackForwardInverse => "back step then forward step is the identity",
            Lemma::ForwardPreservesWellFormed => "forward step preserves well-formedness",
            Lemma::BackwardPreservesWellFormed => "backward step preserves well-formedness",
        }
    }
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lemma {}", self.index() + 1)
    }
}

/// Per-lemma result on one history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LemmaVerdict {
    Holds,
    /// The antecedent was unmet (no target, or the history is not
    /// well-formed where the lemma requires it).
    Vacuous(&'static str),
    Failed(String),
}

impl LemmaVerdict {
    pub fn ok(&self) -> bool {
        !matches!(self, LemmaVerdict::Failed(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub verdicts: [LemmaVerdict; 6],
}

impl LemmaReport {
    pub fn all_ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok())
    }

    pub fn verdict(&self, lemma: Lemma) -> &LemmaVerdict {
        &self.verdicts[lemma.index()]
    }
}

/// Instantiates the six unit-step lemmas on one history. The unfolding
/// lemmas run on any valid history; the inverse and preservation lemmas
/// require a well-formed input and report `Vacuous` otherwise.
pub fn check_lemmas(h: &History) -> LemmaReport {
    let forward_unfolding = {
        let len = h.joint_session_future(Basis::Active).len();
        if len == 0 {
            LemmaVerdict::Vacuous("empty joint session future")
        } else {
            (1..=len)
                .find_map(|n| {
                    let iterated = iterated_forward(h, n, Basis::Active);
                    let upfront = upfront_forward(h, n, Basis::Active);
                    (iterated != upfront).then(|| {
                        LemmaVerdict::Failed(format!(
                            "forward {n} steps: iterated {:?} vs upfront {:?}",
                            iterated, upfront
                        ))
                    })
                })
                .unwrap_or(LemmaVerdict::Holds)
        }
    };

    let backward_unfolding = {
        let len = h.joint_session_past(Basis::Active).len();
        if len == 0 {
            LemmaVerdict::Vacuous("empty joint session past")
        } else {
            (1..=len)
                .find_map(|n| {
                    let iterated = iterated_backward(h, n);
                    let merged = merged_backward(h, n);
                    (iterated != merged).then(|| {
                        LemmaVerdict::Failed(format!(
                            "backward {n} steps: iterated {:?} vs merged {:?}",
                            iterated, merged
                        ))
                    })
                })
                .unwrap_or(LemmaVerdict::Holds)
        }
    };

    let well_formed = h.is_well_formed();
    let not_wf = LemmaVerdict::Vacuous("history is not well-formed");

    let forward_back_inverse = if !well_formed {
        not_wf.clone()
    } else if let Some(f) = h.forward_target() {
        check_inverse_forward(h, &f)
    } else {
        LemmaVerdict::Vacuous("no forward target")
    };

    let back_forward_inverse = if !well_formed {
        not_wf.clone()
    } else if let Some(b) = h.back_target() {
        check_inverse_backward(h, &b)
    } else {
        LemmaVerdict::Vacuous("no back target")
    };

    let forward_preserves = if !well_formed {
        not_wf.clone()
    } else if let Some(f) = h.forward_target() {
        match semantics::traverse_to(h, &f) {
            Ok(next) if next.is_well_formed() => LemmaVerdict::Holds,
            Ok(next) => LemmaVerdict::Failed(format!("forward step reaches non-well-formed {next}")),
            Err(e) => LemmaVerdict::Failed(e.to_string()),
        }
    } else {
        LemmaVerdict::Vacuous("no forward target")
    };

    let backward_preserves = if !well_formed {
        not_wf
    } else if let Some(b) = h.back_target() {
        match semantics::traverse_from(h, &b) {
            Ok(next) if next.is_well_formed() => LemmaVerdict::Holds,
            Ok(next) => LemmaVerdict::Failed(format!("backward step reaches non-well-formed {next}")),
            Err(e) => LemmaVerdict::Failed(e.to_string()),
        }
    } else {
        LemmaVerdict::Vacuous("no back target")
    };

    LemmaReport {
        verdicts: [
            forward_unfolding,
            backward_unfolding,
            forward_back_inverse,
            back_forward_inverse,
            forward_preserves,
            backward_preserves,
        ],
    }
}

fn check_inverse_forward(h: &History, f: &DocumentId) -> LemmaVerdict {
    let next = match semantics::traverse_to(h, f) {
        Ok(next) => next,
        Err(e) => return LemmaVerdict::Failed(e.to_string()),
    };
    if next.back_target().as_ref() != Some(f) {
        return LemmaVerdict::Failed(format!(
            "after traversing to {f}, the back target is {:?}, not {f}",
            next.back_target()
        ));
    }
    match semantics::traverse_from(&next, f) {
        Ok(back) if &back == h => LemmaVerdict::Holds,
        Ok(back) => LemmaVerdict::Failed(format!("round trip reached {back}, not the original")),
        Err(e) => LemmaVerdict::Failed(e.to_string()),
    }
}

fn check_inverse_backward(h: &History, b: &DocumentId) -> LemmaVerdict {
    let next = match semantics::traverse_from(h, b) {
        Ok(next) => next,
        Err(e) => return LemmaVerdict::Failed(e.to_string()),
    };
    if next.forward_target().as_ref() != Some(b) {
        return LemmaVerdict::Failed(format!(
            "after traversing from {b}, the forward target is {:?}, not {b}",
            next.forward_target()
        ));
    }
    match semantics::traverse_to(&next, b) {
        Ok(forward) if &forward == h => LemmaVerdict::Holds,
        Ok(forward) => {
            LemmaVerdict::Failed(format!("round trip reached {forward}, not the original"))
        }
        Err(e) => LemmaVerdict::Failed(e.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Reachable-state machinery
// ---------------------------------------------------------------------------

fn depth_of(h: &History, id: &DocumentId) -> u32 {
    let mut depth = 0;
    let mut current = h.record(id).expect("member").parent.clone();
    while let Some(p) = current {
        depth += 1;
        current = h.record(&p).expect("parent exists").parent.clone();
    }
    depth
}

fn child_session_count(h: &History, id: &DocumentId) -> u32 {
    let mut sessions: BTreeSet<&SessionId> = BTreeSet::new();
    for d in h.docs() {
        if d.parent.as_ref() == Some(id) {
            sessions.insert(&d.session);
        }
    }
    sessions.len() as u32
}

fn session_sizes(h: &History) -> Vec<(SessionId, usize)> {
    let mut sizes: Vec<(SessionId, usize)> = Vec::new();
    for d in h.docs() {
        match sizes.iter_mut().find(|(s, _)| s == &d.session) {
            Some((_, n)) => *n += 1,
            None => sizes.push((d.session.clone(), 1)),
        }
    }
    sizes
}

/// The schema-admissible mutating actions in `h`, in a fixed deterministic
/// order: loads (by parent position), navigations (by session appearance),
/// then in-range traversal deltas.
fn admissible_actions(h: &History, schema: &FrameSchema, mode: &SemanticsMode) -> Vec<Action> {
    let mut actions = Vec::new();
    let next_doc = DocumentId::new(h.len().to_string());
    let next_session = SessionId::new(format!("s{}", session_sizes(h).len()));

    for parent in h.fully_active() {
        if depth_of(h, &parent) + 1 <= schema.max_depth
            && child_session_count(h, &parent) < schema.max_child_sessions_per_document
        {
            actions.push(Action::LoadChild {
                parent,
                session: next_session.clone(),
                id: next_doc.clone(),
            });
        }
    }

    for (session, size) in session_sizes(h) {
        let active = h
            .docs()
            .iter()
            .find(|d| d.session == session && d.active)
            .expect("one active per session");
        if h.is_fully_active(&active.id) && (size as u32 - 1) < schema.max_navigations_per_session
        {
            actions.push(Action::Navigate {
                session,
                id: next_doc.clone(),
            });
        }
    }

    let future = h.joint_session_future(mode.basis()).len() as i64;
    let past = h.joint_session_past(mode.basis()).len() as i64;
    for delta in 1..=future {
        actions.push(Action::TraverseBy { delta: Delta(delta) });
    }
    for delta in 1..=past {
        actions.push(Action::TraverseBy { delta: Delta(-delta) });
    }

    actions
}

fn apply_mutating(h: &History, action: &Action, mode: &SemanticsMode) -> Option<History> {
    match action {
        Action::LoadChild { parent, session, id } => {
            semantics::load_child(h, parent, session, id).ok()
        }
        Action::Navigate { session, id } => mode.navigate(h, session, id).ok(),
        Action::TraverseBy { delta } => match mode.traverse_by(h, *delta) {
            Ok(TraversalOutcome::Changed(next)) => Some(next),
            _ => None,
        },
        Action::TraverseTo { id } => semantics::traverse_to(h, id).ok(),
        _ => None,
    }
}

/// Breadth-first closure of the singleton root history under all
/// schema-admissible actions, keyed by canonical form. Returns one
/// materialized representative per state, sorted by canonical form.
pub fn enumerate_reachable(schema: &FrameSchema, mode: &SemanticsMode) -> Vec<History> {
    let root = History::initial("0", "s0");
    let mut visited: BTreeSet<CanonicalHistory> = BTreeSet::new();
    let mut queue: VecDeque<(CanonicalHistory, u32)> = VecDeque::new();
    let canonical_root = root.canonical();
    visited.insert(canonical_root.clone());
    queue.push_back((canonical_root, 0));

    while let Some((canonical, depth)) = queue.pop_front() {
        if depth == schema.max_total_actions {
            continue;
        }
        let h = canonical.materialize();
        for action in admissible_actions(&h, schema, mode) {
            if let Some(next) = apply_mutating(&h, &action, mode) {
                let key = next.canonical();
                if visited.insert(key.clone()) {
                    queue.push_back((key, depth + 1));
                }
            }
        }
    }

    visited.into_iter().map(|c| c.materialize()).collect()
}

// ---------------------------------------------------------------------------
// Random traces
// ---------------------------------------------------------------------------

fn generated_session_name(index: usize) -> String {
    // Letters except the root's T; numbered names afterwards.
    const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSUVWXYZ";
    if index < LETTERS.len() {
        (LETTERS[index] as char).to_string()
    } else {
        format!("S{index}")
    }
}

/// Generates a schema-respecting trace from the singleton root history,
/// deterministically in the seed. Actions draw uniformly among the
/// admissible loads, navigations, and one traversal slot whose delta is then
/// drawn from the in-range deltas; intermediate states follow the fully
/// patched semantics.
pub fn random_trace(seed: u64, schema: &FrameSchema) -> Trace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = SemanticsMode::Patches(crate::semantics::PatchSet::PATCHED);
    let initial = History::initial("0", "T");
    let mut state = initial.clone();
    let mut actions = Vec::new();
    let mut next_doc = 1u64;
    let mut next_session = 0usize;

    for _ in 0..schema.max_total_actions {
        let fresh_doc = DocumentId::new(next_doc.to_string());
        let fresh_session = SessionId::new(generated_session_name(next_session));

        #[derive(Clone)]
        enum Choice {
            Load(DocumentId),
            Nav(SessionId),
            Traverse,
        }

        let mut choices = Vec::new();
        for parent in state.fully_active() {
            if depth_of(&state, &parent) + 1 <= schema.max_depth
                && child_session_count(&state, &parent) < schema.max_child_sessions_per_document
            {
                choices.push(Choice::Load(parent));
            }
        }
        for (session, size) in session_sizes(&state) {
            let active = state
                .docs()
                .iter()
                .find(|d| d.session == session && d.active)
                .expect("one active per session");
            if state.is_fully_active(&active.id)
                && (size as u32 - 1) < schema.max_navigations_per_session
            {
                choices.push(Choice::Nav(session));
            }
        }
        let future = state.joint_session_future(Basis::Active).len() as i64;
        let past = state.joint_session_past(Basis::Active).len() as i64;
        if future + past > 0 {
            choices.push(Choice::Traverse);
        }
        if choices.is_empty() {
            break;
        }

        let action = match &choices[rng.gen_range(0..choices.len())] {
            Choice::Load(parent) => {
                let action = Action::LoadChild {
                    parent: parent.clone(),
                    session: fresh_session,
                    id: fresh_doc,
                };
                next_doc += 1;
                next_session += 1;
                action
            }
            Choice::Nav(session) => {
                let action = Action::Navigate {
                    session: session.clone(),
                    id: fresh_doc,
                };
                next_doc += 1;
                action
            }
            Choice::Traverse => {
                let pick = rng.gen_range(1..=(future + past));
                let delta = if pick <= future { pick } else { -(pick - future) };
                Action::TraverseBy { delta: Delta(delta) }
            }
        };

        state = apply_mutating(&state, &action, &mode).expect("admissible action applies");
        actions.push(action);
    }

    Trace { initial, actions }
}

// ---------------------------------------------------------------------------
// Differential replay
// ---------------------------------------------------------------------------

/// First point where two semantics disagree on a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivergenceReport {
    pub action_index: usize,
    pub action: Action,
    pub left: StepOutcome,
    pub right: StepOutcome,
}

impl fmt::Display for DivergenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "divergence at action {} `{}`:",
            self.action_index, self.action
        )?;
        writeln!(f, "  left:  {}", self.left)?;
        write!(f, "  right: {}", self.right)
    }
}

fn differential_step(h: &History, action: &Action, mode: &SemanticsMode) -> StepOutcome {
    match action {
        Action::LoadChild { parent, session, id } => {
            match semantics::load_child(h, parent, session, id) {
                Ok(next) => StepOutcome::Changed(next),
                Err(e) => StepOutcome::Fault(e.to_string()),
            }
        }
        Action::Navigate { session, id } => match mode.navigate(h, session, id) {
            Ok(next) => StepOutcome::Changed(next),
            Err(e) => StepOutcome::Fault(e.to_string()),
        },
        Action::TraverseBy { delta } => StepOutcome::from_result(mode.traverse_by(h, *delta)),
        Action::TraverseTo { id } => match semantics::traverse_to(h, id) {
            Ok(next) => StepOutcome::Changed(next),
            Err(e) => StepOutcome::Fault(e.to_string()),
        },
        _ => unreachable!("assertions are skipped"),
    }
}

/// Replays a trace under two semantics in lockstep and reports the first
/// action whose outcomes differ. Assertions are skipped: only the states
/// are compared. Returns `None` when the runs agree throughout (including
/// agreeing on a precondition failure, after which neither run continues).
pub fn differential_run(
    trace: &Trace,
    left: &SemanticsMode,
    right: &SemanticsMode,
) -> Option<DivergenceReport> {
    let mut left_state = trace.initial.clone();
    let mut right_state = trace.initial.clone();
    for (index, action) in trace.actions.iter().enumerate() {
        if action.is_assertion() {
            continue;
        }
        let left_outcome = differential_step(&left_state, action, left);
        let right_outcome = differential_step(&right_state, action, right);
        if left_outcome != right_outcome {
            return Some(DivergenceReport {
                action_index: index,
                action: action.clone(),
                left: left_outcome,
                right: right_outcome,
            });
        }
        match (&left_outcome, &right_outcome) {
            (StepOutcome::Changed(l), StepOutcome::Changed(r)) => {
                left_state = l.clone();
                right_state = r.clone();
            }
            // Identical aborts leave both states unchanged; identical
            // faults end the comparison.
            (StepOutcome::Aborted(_), StepOutcome::Aborted(_)) => {}
            _ => return None,
        }
    }
    None
}
