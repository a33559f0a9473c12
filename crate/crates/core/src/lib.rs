//! Finite-automata toolbox for constrained synchronization with polycyclic
//! constraint languages.
//!
//! The crate is organised bottom-up:
//!
//! * [`automaton`], [`format`], [`scc`] and [`ops`] hold the automaton type,
//!   its text format and the standard regular-language constructions;
//! * [`sync`] decides classical synchronizability through the pair automaton;
//! * [`polycyclic`] recognises polycyclic automata and implements the closure
//!   constructions for polycyclic languages;
//! * [`solver`] decides whether an input automaton has a synchronizing word
//!   inside the language of a polycyclic constraint automaton;
//! * [`reductions`] covers set transport problems and the hardness gadgets.

pub mod alphabet;
pub mod automaton;
pub mod error;
pub mod format;
pub mod ops;
pub mod polycyclic;
pub mod reductions;
pub mod scc;
pub mod solver;
pub mod stateset;
pub mod sync;

pub use alphabet::{Alphabet, Symbol, Word};
pub use automaton::{Automaton, Kind, StateId};
pub use error::{Error, Result};
pub use stateset::StateSet;
