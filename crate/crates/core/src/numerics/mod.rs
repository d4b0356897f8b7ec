pub mod hypergeo;
pub mod quad;
pub mod special;
