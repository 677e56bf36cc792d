//! Shared fixtures and independent reference implementations for the
//! integration tests.

#![allow(dead_code)]

pub mod fixtures;
pub mod oracles;
