pub mod algebra;
pub mod bakry_emery;
pub mod cli;
pub mod curvature;
pub mod exact;
pub mod products;
pub mod qe_solver;
pub mod riccati;
pub mod scalar;
pub mod tensor;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/milnor-frames.md")]
    mod milnor_frames {}
    #[doc = include_str!("../../../book/src/bakry-emery.md")]
    mod bakry_emery {}
    #[doc = include_str!("../../../book/src/solving.md")]
    mod solving {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/riccati.md")]
    mod riccati {}
    #[doc = include_str!("../../../book/src/products.md")]
    mod products {}
    #[doc = include_str!("../../../book/src/table.md")]
    mod table {}
}
