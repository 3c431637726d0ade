//! Range reporting over points that move along known piecewise-linear
//! trajectories on an integer grid.
//!
//! Every point's coordinate in each axis is a piecewise-linear function of
//! time with integer breakpoints, slopes, and offsets. Because the motions
//! are known in advance, the combinatorial state of the point set — the
//! left-to-right and bottom-to-top orders — changes only at discrete,
//! predictable moments: when two points exchange ranks in one axis, or when
//! a trajectory switches to its next linear piece. Everything in this crate
//! is organised around that observation: structures are maintained under a
//! stream of such events rather than recomputed per query time.
//!
//! The crate is split into layers, each usable on its own:
//!
//! - [`model`] — trajectories, exact rational time arithmetic, the point
//!   store, and grid validation.
//! - [`oracle`] — deliberately naive reference implementations of every
//!   query the fast structures answer. They scan, they never share code
//!   with the maintained structures, and they exist so the fast paths can
//!   be checked against them wholesale.
//! - [`engine`] — the event core: rank orders, the certificate queue that
//!   predicts the next order change, and the sweep/slab predecessor
//!   structures that answer "who is left of x at time t" style questions.
//! - [`boundary`] — an approximate staircase over the point set that keeps,
//!   for a tunable parameter `d`, a small set of segments whose dominator
//!   sets stay between `d` and `2d` points. It absorbs rank swaps with
//!   constant-size set updates and local repairs.
//! - [`dominance`] — dominance reporting for one maintained subset: the
//!   staircase-backed fast path plus an exact max-structure fallback.
//! - [`decomp`] — partitions of the point set into geometrically sized
//!   bands (by x, and nested by y then x) that route updates to small
//!   member structures and keep rebuild work proportional to band size.
//! - [`range`] — three-sided and four-sided (axis-aligned rectangle)
//!   reporting built from trees of dominance structures.
//!
//! Coordinates presented to queries are exact rationals; all comparisons
//! are performed with integer cross-multiplication, so there is no floating
//! point anywhere in the crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod decomp;
pub mod dominance;
pub mod engine;
pub mod model;
pub mod oracle;
pub mod range;

pub use model::{GridParams, MovingPoint, PointId, PointStore, Rational, Trajectory};
