pub mod cli;
pub mod discretize;
pub mod grids;
pub mod oracles;
pub mod problems;
pub mod spectra;
