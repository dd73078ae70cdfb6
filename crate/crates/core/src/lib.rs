pub mod error;
pub mod exponent;
pub mod hardy;
pub mod hermite;
pub mod lebesgue;
pub mod quadrature;
pub mod semigroups;
pub mod smoothness;
pub mod stable;
pub mod suites;

pub use error::{Error, Result};
pub use exponent::{ClassConstants, ClassTags, ExponentDescriptor, ExponentFunction};
pub use hermite::{HermiteExpansion, MultiIndex};
