pub mod cli;
pub mod expform;
pub mod kernel_table;
pub mod meanvalue;
pub mod numverify;
pub mod optimize;
pub mod polyalg;
pub mod proportions;
