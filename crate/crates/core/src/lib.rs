pub mod barhopf;
pub mod cdgacore;
pub mod cellconn;
pub mod dslcli;
pub mod exactla;
pub mod minmodel;
pub mod repsemi;
