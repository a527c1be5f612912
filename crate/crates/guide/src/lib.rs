//! The book chapters, compiled so that their listings run as doc-tests.

#[doc = include_str!("../../../book/src/overview.md")]
pub mod overview {}

#[doc = include_str!("../../../book/src/signal-model.md")]
pub mod signal_model {}

#[doc = include_str!("../../../book/src/detectors.md")]
pub mod detectors {}

#[doc = include_str!("../../../book/src/roc-curves.md")]
pub mod roc_curves {}

#[doc = include_str!("../../../book/src/sizing.md")]
pub mod sizing {}

#[doc = include_str!("../../../book/src/monte-carlo.md")]
pub mod monte_carlo {}

#[doc = include_str!("../../../book/src/command-line.md")]
pub mod command_line {}
