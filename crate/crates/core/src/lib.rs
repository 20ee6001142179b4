pub mod cli;
pub mod logic;
pub mod metric;
pub mod poly;
pub mod rational;
pub mod residue;
pub mod structures;
