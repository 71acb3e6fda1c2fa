//! Helpers shared by the integration tests and the acceptance run.

#![allow(dead_code)]

pub mod theta;
