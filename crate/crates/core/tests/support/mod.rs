//! Test-only helpers shared by the integration tests and the acceptance
//! suite. Nothing here calls into the code paths it checks.
#![allow(dead_code)]

pub mod gen;
pub mod model;
pub mod oracle;
