pub mod analysis;
pub mod config;
pub mod error;
pub mod fct;
pub mod grid;
pub mod highorder;
pub mod loworder;
pub mod problems;
pub mod runner;
pub mod schemes;
pub mod solver;
pub mod velocity;
