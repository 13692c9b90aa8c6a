pub mod calibrate;
pub mod cluster;
pub mod coupling;
pub mod mtc;
pub mod tails;
pub mod validate;
