//! Numerics for the Liouville action and renormalized volume of
//! orbifold quotients of the Riemann sphere.

pub mod specfun;
pub mod moebius;
pub mod quad;
pub mod liouville;
pub mod holography;
pub mod tzpotential;
