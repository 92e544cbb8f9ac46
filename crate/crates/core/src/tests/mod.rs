//! Cross-module tests: property suites and end-to-end scenarios checked
//! against the reference implementations in `oracles`.

use crate::SetSystem;

mod scenarios;
