pub mod arith;
pub mod certify;
pub mod jacobsthal;
pub mod construct;
pub mod analysis;
