//! Hidden information flows in Node-RED node packages.

pub mod catalog;
pub mod cli;
pub mod conformance;
pub mod diag;
pub mod js;
pub mod package;
pub mod report;
pub mod risk;
pub mod spec;
pub mod taint;
