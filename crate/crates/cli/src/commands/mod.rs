pub mod codec;
pub mod compare;
pub mod eval;
pub mod factory;
pub mod param;
