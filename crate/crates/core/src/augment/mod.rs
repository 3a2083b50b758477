//! Augmentation kernels, their parameterization, and policy execution.

mod color_space;
mod filter;
mod kernels;
mod kind;
mod params;
mod policy;

pub use kind::{AugKind, Family, UnknownKind};
pub use params::{base_params, scale_params, InvalidStrength, Params};
pub use policy::{
    apply_kernel, apply_one, apply_policy, parse_policy, serialize_policy, AugInstance, ParseError, Policy,
    PolicyError, Step, Strategy, UnknownStrategy, MAX_STRENGTH,
};
