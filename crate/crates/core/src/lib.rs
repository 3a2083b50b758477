//! Multi-objective genetic search for image augmentation policies that move
//! synthetic images toward a real image domain in feature space.

pub mod augment;
pub mod dataset;
pub mod evolve;
pub mod features;
pub mod image;
pub mod metrics;
pub mod rng;

pub use image::{Image, ImageError};
