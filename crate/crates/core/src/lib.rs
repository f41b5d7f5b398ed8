//! Natural language inference between key/value tables and English
//! sentences with numerical comparatives, by model checking.
//!
//! A table becomes a finite first-order model ([`table`]), a hypothesis
//! becomes a formula through a small categorial grammar ([`grammar`]), and
//! the formula is checked against the model ([`fol`], [`checker`]). True
//! means entailment, false contradiction, and anything else neutral.
//! [`engine`] runs the whole pipeline; [`dataset`] builds labeled problem
//! sets from base hypotheses.
//!
//! ```
//! use tablefol::engine::Engine;
//! use tablefol::table::{Row, Table};
//!
//! let t = Table::new(
//!     "Karachi".into(),
//!     vec![Row { key: "Districts".into(), values: (1..=6).map(|i| format!("District {i}")).collect() }],
//! )
//! .unwrap();
//! let v = Engine::new(Default::default(), Default::default()).infer(&t, "Karachi has more than five districts.");
//! assert_eq!(v.label.letter(), 'E');
//! ```
//!
//! The `examples/` directory has one program per stage.

pub mod checker;
pub mod dataset;
pub mod engine;
pub mod fixtures;
pub mod fol;
pub mod grammar;
pub mod knowledge;
pub mod table;
pub mod text;
