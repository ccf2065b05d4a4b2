//! Exact analysis of the Berkovich fixed point locus of rational maps with
//! (potential) good reduction over p-adic fields.
//!
//! The crate builds a finite tower inside C_p (a [`field::FieldContext`]),
//! performs exact arithmetic on tower elements and residue fields, models
//! type-1 and type-2 points of the Berkovich projective line, and decides
//! connectedness and finiteness of the fixed point locus of a rational map,
//! together with a census of its connected components. A sampling oracle
//! re-derives the verdicts from brute-force image computations at desk
//! scale.
//!
//! The `book/` directory of the repository walks through the concepts with
//! runnable examples; its code blocks are compiled as doc-tests below.

pub mod berk;
pub mod error;
pub mod ffpoly;
pub mod field;
pub mod fixtures;
pub mod locus;
pub mod newton;
pub mod padic;
pub mod parse;
pub mod ppoly;
pub mod ratmap;
pub mod rational;
pub mod report;
pub mod roots;
pub mod val;

pub use berk::{Arc, BerkPoint, Direction};
pub use error::{Error, Result};
pub use field::{Ctx, FFElem, FieldContext, ResPoint};
pub use locus::{analyze, AnalysisOptions, GridParams, LocusReport};
pub use padic::PadicElem;
pub use ratmap::{FixedClass, MobiusMap, RationalMap, ResidualMap};
pub use report::{run_subcommand, Command, MapSpec, ReportDocument};
pub use val::{Val, ValOrInf};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(padic_arithmetic, "../../../book/src/padic-arithmetic.md");
    chapter!(residue_fields, "../../../book/src/residue-fields.md");
    chapter!(berkovich_points, "../../../book/src/berkovich-points.md");
    chapter!(maps_and_reduction, "../../../book/src/maps-and-reduction.md");
    chapter!(fixed_locus, "../../../book/src/fixed-locus.md");
    chapter!(command_line, "../../../book/src/command-line.md");
}
