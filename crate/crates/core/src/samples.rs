//! Meshes shipped with the crate.

use crate::document::MeshDocument;

pub const GENUS2_24: &str = include_str!("../data/genus2_24.json");
pub const GENUS2_24_ZERO: &str = include_str!("../data/genus2_24_zero.json");
pub const GENUS2_24_HALF_PI: &str = include_str!("../data/genus2_24_half_pi.json");
pub const GENUS2_24_MIXED: &str = include_str!("../data/genus2_24_mixed.json");
pub const OCTAGON_GENUS2: &str = include_str!("../data/octagon_genus2.json");

/// Weight presets for the 24-face genus-2 triangulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// All angles zero: a circle packing.
    Zero,
    /// All angles pi/2.
    HalfPi,
    /// pi/5 everywhere except six edges at 3pi/4, at most one per face.
    Mixed,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Zero, Preset::HalfPi, Preset::Mixed];
}

fn parse(text: &str) -> MeshDocument {
    MeshDocument::parse(text).expect("shipped documents are valid")
}

/// Ten vertices, 36 edges, 24 faces, genus 2, without weights.
pub fn genus2_mesh() -> MeshDocument {
    parse(GENUS2_24)
}

pub fn genus2(preset: Preset) -> MeshDocument {
    parse(match preset {
        Preset::Zero => GENUS2_24_ZERO,
        Preset::HalfPi => GENUS2_24_HALF_PI,
        Preset::Mixed => GENUS2_24_MIXED,
    })
}

/// One vertex, four loops and one octagonal cell glued as `a b a' b' c d c' d'`,
/// with every angle 3pi/4.
pub fn octagon() -> MeshDocument {
    parse(OCTAGON_GENUS2)
}
