//! Cooperative-game tools for teacher-student curriculum learning.
//!
//! Units of experience (classes, opponents, tasks) are the players of a
//! cooperative game whose worth is a learner's metric after training on a
//! coalition of units. The crate covers the full loop:
//!
//! - [`game`]: unit sets, coalitions and tabulated characteristic functions,
//! - [`solution`]: Shapley, Nowak & Radzik and pairwise interaction values,
//! - [`learners`]: learner environments driven one interaction at a time,
//! - [`prospect`]: coalition-formation simulations that fill the tables,
//! - [`teacher`]: the teacher-student loop with bandit and fixed teachers,
//! - [`curriculum`]: value-proportional policies and ordered schedules,
//! - [`format`]: file formats for tables, values, matrices and run logs.

pub mod curriculum;
pub mod error;
pub mod format;
pub mod game;
pub mod learners;
pub mod par;
pub mod prospect;
pub mod seed;
pub mod solution;
pub mod teacher;

pub use error::{Error, Result};
pub use game::{CharTable, Coalition, OrderedCharTable, OrderedCoalition, UnitSet, Worth};
pub use par::Exec;
pub use solution::{InteractionMatrix, ValueMethod, ValueVector};
