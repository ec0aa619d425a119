//! Host package for the `acceptance` test target, which checks the library
//! end to end against published tables and independent oracles.
//!
//! It is a separate package so that it sorts after the other workspace
//! members and a red criterion does not hide their test results.
