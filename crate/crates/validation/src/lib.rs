//! End-to-end acceptance checks for `maxlr`; see `tests/acceptance.rs`.
