//! Acceptance criteria live in `tests/acceptance.rs`.
