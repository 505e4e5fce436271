pub mod cd_render;
pub mod cli;
pub mod config;
pub mod emit;
pub mod error;
pub mod grid;
pub mod io;
pub mod prep;
