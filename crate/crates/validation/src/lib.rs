//! Acceptance checks for the RIS toolkit; see `tests/acceptance.rs`.
