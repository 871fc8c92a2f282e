//! An executable model of browser navigation history: top-level pages and
//! nested frames, each with its own session history, joined by the global
//! back/forward traversal.
//!
//! The crate implements two families of semantics side by side:
//!
//! * the behaviour written down in the HTML standard's history-traversal
//!   algorithm (the `spec` preset), and
//! * a corrected semantics assembled from four independent patches
//!   (the `patched` preset), under which traversing by `d` and then by `d'`
//!   is always the same as traversing by `d + d'` on well-formed states.
//!
//! [`verify`] contains the harness that demonstrates the difference: a
//! counterexample catalog, a bounded exhaustive state enumerator, a
//! fundamental-property checker, and differential trace replay.

pub mod catalog;
pub mod history;
pub mod render;
pub mod semantics;
pub mod trace;
pub mod verify;

pub use history::{Basis, DocumentId, DocumentRecord, History, SessionId};
pub use semantics::{Delta, PatchSet, Preset, SemanticsMode, TraversalOutcome};
