//! Automorphisms of finite abelian p-groups and of central extensions.
//!
//! [`abelian`] models `Z/p^e1 x ... x Z/p^en`, [`endomat`] its endomorphism
//! matrices and the restricted congruence class, and [`extension`] the lifting
//! of restricted automorphisms through a central extension.

pub mod abelian;
pub mod acceptance;
pub mod config;
pub mod endomat;
pub mod error;
pub mod extension;
pub mod oracle;
pub mod table;

pub use abelian::{AbelianElement, AbelianPGroup, GroupDescriptor, IndexProfile};
pub use config::Bounds;
pub use endomat::{
    aut_order, canonicalize, count_abc, count_abc_log, enumerate_autos, enumerate_endos, in_rp,
    residue_class_count, theorem_lower_bound, EndoMatrix, MatrixJson, RestrictedSpace,
};
pub use error::{Error, Result};
pub use extension::{CentralExtensionGroup, CocycleTable, ExtensionJson, GAutomorphism, GElement};
pub use table::{TableGroup, TableJson};
