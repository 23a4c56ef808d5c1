pub mod catalog;
pub mod construction;
pub mod exec;
pub mod geometry;
pub mod io;
pub mod octahedron;
pub mod verification;

pub use exec::Exec;
