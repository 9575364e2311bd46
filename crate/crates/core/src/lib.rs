pub mod analysis;
pub mod config;
pub mod construct;
pub mod ratpoly;
pub mod verify;
pub mod corpus;
pub mod portrait;
