//! Text formats and replay: history files (`doc` lines), action scripts,
//! combined trace files, a structured JSON mirror of each, and the replay
//! engine that runs a trace under a chosen semantics.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::history::{
    DocumentId, DocumentRecord, History, InvariantViolation, SessionId, ValidationError,
};
use crate::semantics::{
    AbortReason, Delta, SemanticsError, SemanticsMode, TraversalOutcome,
};

/// One step of a trace: a mutating operation or a non-mutating assertion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Action {
    #[serde(rename = "loadchild")]
    LoadChild {
        parent: DocumentId,
        session: SessionId,
        id: DocumentId,
    },
    Navigate {
        session: SessionId,
        id: DocumentId,
    },
    #[serde(rename = "traverse")]
    TraverseBy { delta: Delta },
    TraverseTo {
        id: DocumentId,
    },
    /// Asserts the full active set, order-insensitive.
    ExpectActive { ids: Vec<DocumentId> },
    #[serde(rename = "expect-wf")]
    ExpectWellFormed { value: bool },
    /// Asserts that the immediately preceding traversal aborted.
    ExpectAbort,
}

impl Action {
    pub fn is_assertion(&self) -> bool {
        matches!(
            self,
            Action::ExpectActive { .. } | Action::ExpectWellFormed { .. } | Action::ExpectAbort
        )
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::LoadChild { parent, session, id } => {
                write!(f, "loadchild {parent} {session} {id}")
            }
            Action::Navigate { session, id } => write!(f, "navigate {session} {id}"),
            Action::TraverseBy { delta } => write!(f, "traverse {delta}"),
            Action::TraverseTo { id } => write!(f, "traverse-to {id}"),
            Action::ExpectActive { ids } => {
                f.write_str("expect-active")?;
                for id in ids {
                    write!(f, " {id}")?;
                }
                Ok(())
            }
            Action::ExpectWellFormed { value } => write!(f, "expect-wf {value}"),
            Action::ExpectAbort => f.write_str("expect-abort"),
        }
    }
}

/// An initial history plus a sequence of actions. Replay under a fixed
/// semantics is deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: History,
    pub actions: Vec<Action>,
}

/// Parse failure, with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}", render_invariant_errors(.violations))]
    Invariants {
        violations: Vec<(usize, InvariantViolation)>,
    },
}

fn render_invariant_errors(violations: &[(usize, InvariantViolation)]) -> String {
    let mut out = String::from("invalid history:");
    for (line, v) in violations {
        out.push_str(&format!("\n  line {line}: {v}"));
    }
    out
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Strips a `#` comment and surrounding whitespace.
fn significant(line: &str) -> &str {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    body.trim()
}

fn column_of(line: &str, token: &str) -> usize {
    line.find(token).map(|i| i + 1).unwrap_or(1)
}

fn parse_doc_line(line_no: usize, line: &str) -> Result<DocumentRecord, ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    // tokens[0] == "doc" checked by the caller.
    if tokens.len() < 3 {
        return Err(syntax(
            line_no,
            1,
            "expected `doc <id> session=<name> parent=<id|-> [active]`",
        ));
    }
    let id = tokens[1];
    let session = tokens[2].strip_prefix("session=").ok_or_else(|| {
        syntax(line_no, column_of(line, tokens[2]), "expected `session=<name>`")
    })?;
    if session.is_empty() {
        return Err(syntax(line_no, column_of(line, tokens[2]), "empty session name"));
    }
    let parent_tok = tokens.get(3).ok_or_else(|| {
        syntax(line_no, line.len() + 1, "missing `parent=<id|->` field")
    })?;
    let parent = parent_tok.strip_prefix("parent=").ok_or_else(|| {
        syntax(line_no, column_of(line, parent_tok), "expected `parent=<id|->`")
    })?;
    if parent.is_empty() {
        return Err(syntax(line_no, column_of(line, parent_tok), "empty parent id"));
    }
    let active = match tokens.get(4) {
        None => false,
        Some(&"active") => true,
        Some(other) => {
            return Err(syntax(
                line_no,
                column_of(line, other),
                format!("unexpected token `{other}` (only `active` may follow the parent)"),
            ))
        }
    };
    if tokens.len() > 5 {
        return Err(syntax(
            line_no,
            column_of(line, tokens[5]),
            format!("unexpected trailing token `{}`", tokens[5]),
        ));
    }
    Ok(DocumentRecord {
        id: DocumentId::new(id),
        parent: (parent != "-").then(|| DocumentId::new(parent)),
        session: SessionId::new(session),
        active,
    })
}

fn parse_action_line(line_no: usize, line: &str) -> Result<Action, ParseError> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    let arity = |n: usize, usage: &str| -> Result<(), ParseError> {
        if tokens.len() != n + 1 {
            Err(syntax(line_no, 1, format!("usage: {usage}")))
        } else {
            Ok(())
        }
    };
    match tokens[0] {
        "loadchild" => {
            arity(3, "loadchild <parent> <session> <id>")?;
            Ok(Action::LoadChild {
                parent: DocumentId::new(tokens[1]),
                session: SessionId::new(tokens[2]),
                id: DocumentId::new(tokens[3]),
            })
        }
        "navigate" => {
            arity(2, "navigate <session> <id>")?;
            Ok(Action::Navigate {
                session: SessionId::new(tokens[1]),
                id: DocumentId::new(tokens[2]),
            })
        }
        "traverse" => {
            arity(1, "traverse <±n>")?;
            let delta: i64 = tokens[1].parse().map_err(|_| {
                syntax(
                    line_no,
                    column_of(line, tokens[1]),
                    format!("invalid delta `{}`", tokens[1]),
                )
            })?;
            Ok(Action::TraverseBy { delta: Delta(delta) })
        }
        "traverse-to" => {
            arity(1, "traverse-to <id>")?;
            Ok(Action::TraverseTo {
                id: DocumentId::new(tokens[1]),
            })
        }
        "expect-active" => {
            if tokens.len() < 2 {
                return Err(syntax(line_no, 1, "usage: expect-active <id>..."));
            }
            Ok(Action::ExpectActive {
                ids: tokens[1..].iter().map(|t| DocumentId::new(*t)).collect(),
            })
        }
        "expect-wf" => {
            arity(1, "expect-wf true|false")?;
            let value = match tokens[1] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(syntax(
                        line_no,
                        column_of(line, other),
                        format!("expected `true` or `false`, found `{other}`"),
                    ))
                }
            };
            Ok(Action::ExpectWellFormed { value })
        }
        "expect-abort" => {
            arity(0, "expect-abort")?;
            Ok(Action::ExpectAbort)
        }
        other => Err(syntax(
            line_no,
            column_of(line, other),
            format!("unknown keyword `{other}`"),
        )),
    }
}

fn validate_with_lines(
    docs: Vec<DocumentRecord>,
    lines: &[(usize, DocumentId)],
) -> Result<History, ParseError> {
    History::validate(docs).map_err(|ValidationError { violations }| {
        let located = violations
            .into_iter()
            .map(|v| {
                // Attribute the violation to the last-parsed offending doc;
                // for duplicate ids that is the repeated occurrence.
                let line = v
                    .docs
                    .iter()
                    .filter_map(|id| {
                        lines
                            .iter()
                            .rev()
                            .find(|(_, lid)| lid == id)
                            .map(|(line, _)| *line)
                    })
                    .max()
                    .unwrap_or(0);
                (line, v)
            })
            .collect();
        ParseError::Invariants { violations: located }
    })
}

/// Parses a history file: `doc` lines in chronological order, `#` comments
/// permitted. The result is validated; invariant violations carry the line
/// of the offending document.
pub fn parse_history(text: &str) -> Result<History, ParseError> {
    let mut docs = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = significant(raw);
        if line.is_empty() {
            continue;
        }
        if !line.starts_with("doc") {
            return Err(syntax(
                line_no,
                1,
                format!(
                    "expected a `doc` line, found `{}`",
                    line.split_whitespace().next().unwrap_or("")
                ),
            ));
        }
        let doc = parse_doc_line(line_no, line)?;
        lines.push((line_no, doc.id.clone()));
        docs.push(doc);
    }
    validate_with_lines(docs, &lines)
}

/// Serializes a history as `doc` lines, newline-terminated.
pub fn serialize_history(h: &History) -> String {
    let mut out = String::new();
    for d in h.docs() {
        let parent = d.parent.as_ref().map(|p| p.as_str()).unwrap_or("-");
        out.push_str(&format!("doc {} session={} parent={}", d.id, d.session, parent));
        if d.active {
            out.push_str(" active");
        }
        out.push('\n');
    }
    out
}

/// Parses an action script: one action per line, `#` comments permitted.
pub fn parse_script(text: &str) -> Result<Vec<Action>, ParseError> {
    let mut actions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = significant(raw);
        if line.is_empty() {
            continue;
        }
        actions.push(parse_action_line(i + 1, line)?);
    }
    Ok(actions)
}

/// Serializes a script, one action per line, newline-terminated.
pub fn serialize_script(actions: &[Action]) -> String {
    let mut out = String::new();
    for action in actions {
        out.push_str(&action.to_string());
        out.push('\n');
    }
    out
}

/// Parses a trace file: the initial history's `doc` lines followed by action
/// lines.
pub fn parse_trace(text: &str) -> Result<Trace, ParseError> {
    let mut docs = Vec::new();
    let mut lines = Vec::new();
    let mut actions = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = significant(raw);
        if line.is_empty() {
            continue;
        }
        if line == "doc" || line.starts_with("doc ") {
            if !actions.is_empty() {
                return Err(syntax(line_no, 1, "`doc` line after the first action"));
            }
            let doc = parse_doc_line(line_no, line)?;
            lines.push((line_no, doc.id.clone()));
            docs.push(doc);
        } else {
            actions.push(parse_action_line(line_no, line)?);
        }
    }
    let initial = validate_with_lines(docs, &lines)?;
    Ok(Trace { initial, actions })
}

/// Serializes a trace: `doc` lines, then one action per line.
pub fn serialize_trace(trace: &Trace) -> String {
    let mut out = serialize_history(&trace.initial);
    out.push_str(&serialize_script(&trace.actions));
    out
}

// ---------------------------------------------------------------------------
// Structured (JSON) mirror
// ---------------------------------------------------------------------------

/// Structured-format failure: malformed JSON or an invalid history.
#[derive(Debug, Error)]
pub enum StructuredError {
    #[error("schema violation: {0}")]
    Schema(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocJson {
    id: String,
    session: String,
    parent: Option<String>,
    active: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryJson {
    docs: Vec<DocJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceJson {
    initial: HistoryJson,
    actions: Vec<Action>,
}

fn history_json(h: &History) -> HistoryJson {
    HistoryJson {
        docs: h
            .docs()
            .iter()
            .map(|d| DocJson {
                id: d.id.to_string(),
                session: d.session.to_string(),
                parent: d.parent.as_ref().map(|p| p.to_string()),
                active: d.active,
            })
            .collect(),
    }
}

fn history_from_json_value(value: HistoryJson) -> Result<History, StructuredError> {
    let docs = value
        .docs
        .into_iter()
        .map(|d| DocumentRecord {
            id: DocumentId::new(d.id),
            parent: d.parent.map(DocumentId::new),
            session: SessionId::new(d.session),
            active: d.active,
        })
        .collect();
    Ok(History::validate(docs)?)
}

/// Lossless JSON mirror of a history, with stable key order.
pub fn history_to_json(h: &History) -> String {
    serde_json::to_string(&history_json(h)).expect("history serializes")
}

pub fn history_from_json(text: &str) -> Result<History, StructuredError> {
    history_from_json_value(serde_json::from_str(text)?)
}

/// Lossless JSON mirror of a trace.
pub fn trace_to_json(trace: &Trace) -> String {
    serde_json::to_string(&TraceJson {
        initial: history_json(&trace.initial),
        actions: trace.actions.clone(),
    })
    .expect("trace serializes")
}

pub fn trace_from_json(text: &str) -> Result<Trace, StructuredError> {
    let value: TraceJson = serde_json::from_str(text)?;
    Ok(Trace {
        initial: history_from_json_value(value.initial)?,
        actions: value.actions,
    })
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

/// One executed trace step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayStep {
    pub index: usize,
    pub action: Action,
    /// Abort reason when the step was a traversal that refused to run.
    pub aborted: Option<AbortReason>,
    pub state_after: History,
}

/// A failed `expect-*` assertion: which action, what was expected, and what
/// the state actually was (rendered in compact notation).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssertionFailure {
    pub action_index: usize,
    pub action: Action,
    pub expected: String,
    pub actual: String,
}

impl fmt::Display for AssertionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "action {} `{}`: expected {}, actual {}",
            self.action_index, self.action, self.expected, self.actual
        )
    }
}

/// Everything a replay produced: per-step states and assertion outcomes.
#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub semantics: SemanticsMode,
    pub steps: Vec<ReplayStep>,
    pub final_state: History,
    pub failures: Vec<AssertionFailure>,
}

impl ReplayReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A mutating action whose precondition failed; the trace cannot continue.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("action {index} `{action}`: {source}")]
pub struct ReplayError {
    pub index: usize,
    pub action: Action,
    pub source: SemanticsError,
}

/// Replays a trace under the given semantics. Assertion failures are
/// collected, not fatal; precondition failures abort the replay.
pub fn replay(trace: &Trace, mode: &SemanticsMode) -> Result<ReplayReport, ReplayError> {
    let mut state = trace.initial.clone();
    let mut steps = Vec::with_capacity(trace.actions.len());
    let mut failures: Vec<AssertionFailure> = Vec::new();
    let mut last_traverse_aborted: Option<bool> = None;

    for (index, action) in trace.actions.iter().enumerate() {
        let mut aborted = None;
        let mut failure = |expected: String, actual: String| AssertionFailure {
            action_index: index,
            action: action.clone(),
            expected,
            actual,
        };
        match action {
            Action::LoadChild { parent, session, id } => {
                state = crate::semantics::load_child(&state, parent, session, id)
                    .map_err(|source| ReplayError { index, action: action.clone(), source })?;
                last_traverse_aborted = None;
            }
            Action::Navigate { session, id } => {
                state = mode
                    .navigate(&state, session, id)
                    .map_err(|source| ReplayError { index, action: action.clone(), source })?;
                last_traverse_aborted = None;
            }
            Action::TraverseBy { delta } => {
                let outcome = mode
                    .traverse_by(&state, *delta)
                    .map_err(|source| ReplayError { index, action: action.clone(), source })?;
                match outcome {
                    TraversalOutcome::Changed(next) => {
                        state = next;
                        last_traverse_aborted = Some(false);
                    }
                    TraversalOutcome::Aborted(reason) => {
                        aborted = Some(reason);
                        last_traverse_aborted = Some(true);
                    }
                }
            }
            Action::TraverseTo { id } => {
                state = crate::semantics::traverse_to(&state, id)
                    .map_err(|source| ReplayError { index, action: action.clone(), source })?;
                last_traverse_aborted = None;
            }
            Action::ExpectActive { ids } => {
                let expected: std::collections::BTreeSet<DocumentId> =
                    ids.iter().cloned().collect();
                let actual = state.active_set();
                if expected != actual {
                    failures.push(failure(
                        format!("active {{{}}}", join_ids(&expected)),
                        format!("active {{{}}} in {}", join_ids(&actual), state),
                    ));
                }
            }
            Action::ExpectWellFormed { value } => {
                let actual = state.is_well_formed();
                if actual != *value {
                    failures.push(failure(
                        format!("well-formed = {value}"),
                        format!("well-formed = {actual} in {state}"),
                    ));
                }
            }
            Action::ExpectAbort => match last_traverse_aborted {
                Some(true) => {}
                Some(false) => {
                    failures.push(failure(
                        "preceding traversal aborts".into(),
                        format!("it changed the history to {state}"),
                    ));
                }
                None => {
                    failures.push(failure(
                        "a preceding traversal".into(),
                        "no traversal precedes this assertion".into(),
                    ));
                }
            },
        }
        steps.push(ReplayStep {
            index,
            action: action.clone(),
            aborted,
            state_after: state.clone(),
        });
    }

    Ok(ReplayReport {
        semantics: *mode,
        final_state: state,
        steps,
        failures,
    })
}

fn join_ids(ids: &std::collections::BTreeSet<DocumentId>) -> String {
    ids.iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Preset;

    fn h(s: &str) -> History {
        s.parse().expect("test history parses")
    }

    #[test]
    fn parses_a_singleton_doc_line() {
        let history = parse_history("doc 0 session=T parent=- active\n").unwrap();
        assert_eq!(history, History::initial("0", "T"));
    }

    #[test]
    fn doc_line_round_trip_is_byte_identical() {
        let ce1 = h("0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)");
        let text = serialize_history(&ce1);
        assert_eq!(
            text,
            "doc 0 session=T parent=- active\n\
             doc 1 session=A parent=0 active\n\
             doc 2 session=B parent=0 active\n\
             doc 3 session=A parent=0\n\
             doc 4 session=B parent=0\n"
        );
        let parsed = parse_history(&text).unwrap();
        assert_eq!(parsed, ce1);
        assert_eq!(serialize_history(&parsed), text);
    }

    #[test]
    fn duplicate_id_reports_i1_at_second_occurrence() {
        let err = parse_history(
            "doc 0 session=T parent=- active\n# comment\ndoc 0 session=T parent=-\n",
        )
        .unwrap_err();
        let ParseError::Invariants { violations } = err else {
            panic!("expected invariant error, got {err:?}");
        };
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].0, 3);
        assert_eq!(violations[0].1.invariant, crate::history::Invariant::UniqueIds);
    }

    #[test]
    fn syntax_errors_carry_locations() {
        let err = parse_history("doc 0 session=T parent=- active\nfnord 1\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }), "{err:?}");

        let err = parse_script("traverse +1\nwobble\n").unwrap_err();
        assert!(
            matches!(err, ParseError::Syntax { line: 2, column: 1, .. }),
            "{err:?}"
        );

        let err = parse_script("traverse fast\n").unwrap_err();
        assert!(
            matches!(err, ParseError::Syntax { line: 1, column: 10, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn script_round_trip() {
        let text = "loadchild 0 A 1\nnavigate A 3\ntraverse -2\ntraverse +2\n\
                    traverse-to 3\nexpect-active 3 4 0\nexpect-wf true\nexpect-abort\n";
        let actions = parse_script(text).unwrap();
        assert_eq!(actions.len(), 8);
        assert_eq!(actions[2], Action::TraverseBy { delta: Delta(-2) });
        assert_eq!(serialize_script(&actions), text);
    }

    #[test]
    fn trace_round_trip_and_doc_after_action() {
        let text = "doc 0 session=T parent=- active\ntraverse +1\n";
        let trace = parse_trace(text).unwrap();
        assert_eq!(serialize_trace(&trace), text);

        let err = parse_trace(
            "doc 0 session=T parent=- active\ntraverse +1\ndoc 1 session=A parent=0\n",
        )
        .unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn structured_mirror_matches_the_documented_shape() {
        let single = History::initial("0", "T");
        assert_eq!(
            history_to_json(&single),
            r#"{"docs":[{"id":"0","session":"T","parent":null,"active":true}]}"#
        );
        let back = history_from_json(&history_to_json(&single)).unwrap();
        assert_eq!(back, single);

        let err = history_from_json(r#"{"docs":[{"id":"0"}]}"#).unwrap_err();
        assert!(matches!(err, StructuredError::Schema(_)));
        let err = history_from_json(r#"{"docs":[]}"#).unwrap_err();
        assert!(matches!(err, StructuredError::Invalid(_)));
    }

    #[test]
    fn structured_trace_round_trip() {
        let trace = Trace {
            initial: h("0.T(-)* 1.A(0)*"),
            actions: vec![
                Action::Navigate {
                    session: SessionId::new("A"),
                    id: DocumentId::new("2"),
                },
                Action::TraverseBy { delta: Delta(-1) },
                Action::ExpectActive {
                    ids: vec![DocumentId::new("0"), DocumentId::new("1")],
                },
            ],
        };
        let json = trace_to_json(&trace);
        assert_eq!(trace_from_json(&json).unwrap(), trace);
    }

    #[test]
    fn replay_reports_assertion_failures_without_stopping() {
        // The two-frame scenario: navigate both frames, go back twice,
        // forward by two.
        let text = "\
doc 0 session=T parent=- active
doc 1 session=A parent=0 active
doc 2 session=B parent=0 active
navigate A 3
navigate B 4
traverse -2
traverse +2
expect-active 3 4 0
";
        let trace = parse_trace(text).unwrap();

        let patched = replay(&trace, &Preset::Patched.mode()).unwrap();
        assert!(patched.passed());
        assert_eq!(
            patched.final_state.active_set(),
            h("0.T(-)* 1.A(0) 2.B(0) 3.A(0)* 4.B(0)*").active_set()
        );

        let spec = replay(&trace, &Preset::Spec.mode()).unwrap();
        assert_eq!(spec.failures.len(), 1);
        // Under the unpatched semantics -2 lands on {0,1,4} and +2 aborts.
        assert!(spec.steps[3].aborted.is_some());
        assert_eq!(
            spec.final_state.active_set(),
            h("0.T(-)* 1.A(0)* 2.B(0) 3.A(0) 4.B(0)*").active_set()
        );
        assert!(spec.failures[0].actual.contains("0 1 4"));
    }

    #[test]
    fn replay_expect_abort() {
        let text = "doc 0 session=T parent=- active\ntraverse -9\nexpect-abort\n";
        let trace = parse_trace(text).unwrap();
        for preset in Preset::ALL {
            let report = replay(&trace, &preset.mode()).unwrap();
            assert!(report.passed(), "{preset}");
        }
    }

    #[test]
    fn replay_precondition_failure_is_an_error() {
        let text = "doc 0 session=T parent=- active\nnavigate X 1\n";
        let trace = parse_trace(text).unwrap();
        let err = replay(&trace, &Preset::Patched.mode()).unwrap_err();
        assert_eq!(err.index, 0);
        assert!(matches!(err.source, SemanticsError::UnknownSession(_)));
    }
}
