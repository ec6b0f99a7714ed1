//! Arithmetic, orbit counting, duality and explicit character construction
//! for the norm-one group `SL_1(D)` of a central division algebra `D` of
//! prime degree `ell` over `F_q((pi))`, together with its representation
//! zeta function.

pub mod gf;
pub mod params;
pub mod algebra;
pub mod groups;
pub mod orbits;
pub mod zeta;
pub mod duality;
pub mod cyclo;
pub mod construction;
pub mod verify;
