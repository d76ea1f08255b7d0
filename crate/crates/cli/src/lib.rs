//! JSON formats, verb implementations and packaged demos behind the
//! `groupcast` binary.

pub mod commands;
pub mod demos;
pub mod instances;
pub mod io;
