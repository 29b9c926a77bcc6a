//! The chapters of the book, compiled so that `cargo test --doc` runs their snippets.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/clifford.md")]
pub mod clifford {}
#[doc = include_str!("../../../book/src/geometry.md")]
pub mod geometry {}
#[doc = include_str!("../../../book/src/fields.md")]
pub mod fields {}
#[doc = include_str!("../../../book/src/action.md")]
pub mod action {}
#[doc = include_str!("../../../book/src/euler_lagrange.md")]
pub mod euler_lagrange {}
#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}
#[doc = include_str!("../../../book/src/morrey.md")]
pub mod morrey {}
#[doc = include_str!("../../../book/src/formats.md")]
pub mod formats {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
