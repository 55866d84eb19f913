//! Domains, signed-distance jets, boundary frames, mollification, and
//! quadrature schemes.

pub mod domain;
pub mod frame;
pub mod jet;
pub mod mollify;
pub mod quad;

pub use domain::{AnnulusSpec, DomainKind, DomainSpec, ImplicitFn};
pub use frame::{cr_frame, cr_frame_tol, differentiated_relation_defect, CrFrame};
pub use jet::{Jet2, Jet3};
pub use mollify::{mollify, mollify_with};
pub use quad::{boundary_scheme, volume_scheme, BoundaryScheme, QuadOrder, Region, VolumeScheme};
