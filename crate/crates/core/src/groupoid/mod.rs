//! Local isometries of the tower: the rotations `R^n_{j,i}`, their products,
//! and the covering maps they define.

mod covering;
mod generator;
mod isometry;
mod reduce;

pub use covering::{covering_branches, covering_map, ramification_points};
pub use generator::{
    format_word, generator, parse_word, upper_cell, GeneratorKind, GeneratorSymbol,
};
pub use isometry::{LocalIsometry, Rotation};
pub use reduce::{
    descend, morphism_between, morphism_word, morphisms_within, normal_form, word_isometry,
};
