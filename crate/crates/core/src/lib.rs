pub mod analysis;
pub mod blossom;
pub mod builder;
pub mod circuit;
pub mod decoder;
pub mod dem;
pub mod error;
pub mod flow;
pub mod gf2;
pub mod lattice;
pub mod logical;
pub mod noise;
pub mod pauli;
pub mod sim;
