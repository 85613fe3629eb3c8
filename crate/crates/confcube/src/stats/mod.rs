//! Scalar special functions, probability densities, and quadrature
//! primitives shared by every other module. Everything here is a pure
//! function of its inputs and safe to call from any number of threads.

pub mod chi;
pub mod normal;
pub mod quad;
pub mod root;
pub mod special;

pub use chi::{Dof, ScaledChi};
pub use normal::{normal_cdf, normal_interval, normal_pdf, normal_quantile};
pub use quad::{composite_gauss_legendre, gauss_legendre, legendre_reference, QuadratureRule};
pub use root::{find_root, golden_section_min};
