//! Exact rational time arithmetic, piecewise-linear trajectories, and the
//! shared vocabulary types (grids, query shapes, coordinate frames) used by
//! every structure in this crate.
//!
//! All geometry is exact: times and positions are [`Rational`] values with
//! `i64` numerator/denominator and `i128` intermediate arithmetic, so
//! comparisons never suffer rounding. Trajectory coefficients are integers,
//! which keeps every crossing time representable with a small denominator.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Identifier of a point; always equal to its index in the [`PointStore`].
pub type PointId = u32;

/// The two coordinate axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => f.write_str("x"),
            Axis::Y => f.write_str("y"),
        }
    }
}

// ---------------------------------------------------------------------------
// Rational
// ---------------------------------------------------------------------------

/// An exact rational number with normalized `i64` numerator and positive
/// `i64` denominator.
///
/// All arithmetic goes through `i128` intermediates and panics on (entirely
/// unexpected at this crate's value ranges) overflow rather than silently
/// wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

const fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("rational overflow")
}

impl Rational {
    /// Builds `num/den`, normalizing sign and common factors. Panics if
    /// `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return Rational { num: 0, den: 1 };
        }
        let g = gcd_u64(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Rational { num: num / g, den: den / g }
    }

    fn new_i128(num: i128, den: i128) -> Self {
        assert!(den != 0, "rational with zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return Rational { num: 0, den: 1 };
        }
        let g = gcd_u64(
            num.unsigned_abs() as u64,
            den.unsigned_abs() as u64,
        ) as i128;
        // gcd fits u64 only if the operands do; divide first in i128, then narrow.
        let g = if g == 0 {
            // One operand exceeded u64; fall back to a full i128 gcd.
            let mut a = num.unsigned_abs();
            let mut b = den.unsigned_abs();
            while b != 0 {
                let t = a % b;
                a = b;
                b = t;
            }
            a as i128
        } else {
            g
        };
        Rational { num: narrow(num / g), den: narrow(den / g) }
    }

    pub const fn from_int(v: i64) -> Self {
        Rational { num: v, den: 1 }
    }

    pub const fn zero() -> Self {
        Rational { num: 0, den: 1 }
    }

    pub const fn num(&self) -> i64 {
        self.num
    }

    pub const fn den(&self) -> i64 {
        self.den
    }

    pub const fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    pub fn ceil(&self) -> i64 {
        -((-self.num).div_euclid(self.den))
    }

    pub fn is_negative(&self) -> bool {
        self.num < 0
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl core::ops::Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        Rational::new_i128(
            self.num as i128 * rhs.den as i128 + rhs.num as i128 * self.den as i128,
            self.den as i128 * rhs.den as i128,
        )
    }
}

impl core::ops::Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        Rational::new_i128(
            self.num as i128 * rhs.den as i128 - rhs.num as i128 * self.den as i128,
            self.den as i128 * rhs.den as i128,
        )
    }
}

impl core::ops::Mul for Rational {
    type Output = Rational;
    fn mul(self, rhs: Rational) -> Rational {
        Rational::new_i128(
            self.num as i128 * rhs.num as i128,
            self.den as i128 * rhs.den as i128,
        )
    }
}

impl core::ops::Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -self.num, den: self.den }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

/// One linear piece `value(t) = a*t + b`, active from `t_start` until the
/// next piece's start (the last piece is unbounded).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrajectoryPiece {
    pub t_start: i64,
    pub a: i64,
    pub b: i64,
}

impl TrajectoryPiece {
    pub fn eval(&self, t: Rational) -> Rational {
        Rational::from_int(self.a) * t + Rational::from_int(self.b)
    }

    pub fn eval_int(&self, t: i64) -> i64 {
        self.a * t + self.b
    }
}

/// Validation failures for trajectories and grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelError {
    /// A trajectory needs at least one piece.
    EmptyTrajectory,
    /// The first piece must start at t = 0.
    FirstPieceNotAtZero,
    /// Piece start times must be strictly increasing.
    NonIncreasingPieces,
    /// Consecutive pieces disagree on the value at the boundary time.
    Discontinuous { t: i64 },
    /// Grid side length out of range (needs 2 ≤ u ≤ 2^31).
    BadGridSide,
    /// Horizon out of range (needs 1 ≤ t_max ≤ 2^31).
    BadHorizon,
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::EmptyTrajectory => f.write_str("trajectory has no pieces"),
            ModelError::FirstPieceNotAtZero => f.write_str("first piece must start at t=0"),
            ModelError::NonIncreasingPieces => {
                f.write_str("piece start times must be strictly increasing")
            }
            ModelError::Discontinuous { t } => {
                write!(f, "pieces disagree on the value at t={t}")
            }
            ModelError::BadGridSide => f.write_str("grid side must be in [2, 2^31]"),
            ModelError::BadHorizon => f.write_str("horizon must be in [1, 2^31]"),
        }
    }
}

/// A piecewise-linear coordinate function of time.
///
/// Pieces are continuous: each piece evaluated at its successor's start time
/// agrees with the successor. At a breakpoint the new piece is the active one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory {
    pieces: Vec<TrajectoryPiece>,
}

impl Trajectory {
    pub fn new(pieces: Vec<TrajectoryPiece>) -> Result<Self, ModelError> {
        if pieces.is_empty() {
            return Err(ModelError::EmptyTrajectory);
        }
        if pieces[0].t_start != 0 {
            return Err(ModelError::FirstPieceNotAtZero);
        }
        for w in pieces.windows(2) {
            if w[1].t_start <= w[0].t_start {
                return Err(ModelError::NonIncreasingPieces);
            }
            if w[0].eval_int(w[1].t_start) != w[1].eval_int(w[1].t_start) {
                return Err(ModelError::Discontinuous { t: w[1].t_start });
            }
        }
        Ok(Trajectory { pieces })
    }

    /// Single-piece trajectory `a*t + b`.
    pub fn linear(a: i64, b: i64) -> Self {
        Trajectory { pieces: alloc::vec![TrajectoryPiece { t_start: 0, a, b }] }
    }

    pub fn constant(b: i64) -> Self {
        Trajectory::linear(0, b)
    }

    pub fn pieces(&self) -> &[TrajectoryPiece] {
        &self.pieces
    }

    /// Index of the piece active at time `t` (the new piece at a breakpoint).
    pub fn piece_index_at(&self, t: Rational) -> usize {
        debug_assert!(!t.is_negative(), "trajectory queried at negative time");
        // Last piece whose start is <= t.
        self.pieces
            .partition_point(|p| Rational::from_int(p.t_start) <= t)
            .saturating_sub(1)
    }

    /// Exact position at time `t >= 0`.
    pub fn eval(&self, t: Rational) -> Rational {
        self.pieces[self.piece_index_at(t)].eval(t)
    }

    /// Breakpoint times (every piece start after the first).
    pub fn breakpoints(&self) -> impl Iterator<Item = i64> + '_ {
        self.pieces.iter().skip(1).map(|p| p.t_start)
    }
}

/// Exact position of a trajectory at time `t`.
pub fn position_at(tr: &Trajectory, t: Rational) -> Rational {
    tr.eval(t)
}

// ---------------------------------------------------------------------------
// Crossings
// ---------------------------------------------------------------------------

/// Earliest time strictly after `after` (and at most `t_max`) at which the two
/// trajectories have equal values.
///
/// Stretches where the trajectories are identical (parallel overlapping
/// pieces) yield no crossing: nothing changes order there.
pub fn swap_time(
    tr1: &Trajectory,
    tr2: &Trajectory,
    after: Rational,
    t_max: i64,
) -> Option<Rational> {
    let horizon = Rational::from_int(t_max);
    if after >= horizon {
        return None;
    }
    let mut boundaries: Vec<i64> = tr1
        .breakpoints()
        .chain(tr2.breakpoints())
        .filter(|&t| t <= t_max)
        .collect();
    boundaries.sort_unstable();
    boundaries.dedup();

    let mut lo = Rational::zero();
    let mut idx = 0usize;
    loop {
        let hi: Option<Rational> = boundaries.get(idx).map(|&b| Rational::from_int(b));
        let p1 = tr1.pieces()[tr1.piece_index_at(lo)];
        let p2 = tr2.pieces()[tr2.piece_index_at(lo)];
        let alpha = p1.a - p2.a;
        let beta = p1.b - p2.b;
        if alpha != 0 {
            let root = Rational::new(-beta, alpha);
            let in_interval = root >= lo && hi.map_or(true, |h| root < h);
            if in_interval && root > after && root <= horizon {
                return Some(root);
            }
        }
        match hi {
            Some(h) => {
                if h > horizon {
                    return None;
                }
                lo = h;
                idx += 1;
            }
            None => return None,
        }
    }
}

// ---------------------------------------------------------------------------
// Points, stores, grids
// ---------------------------------------------------------------------------

/// A point moving along one trajectory per axis.
#[derive(Clone, Debug)]
pub struct MovingPoint {
    pub id: PointId,
    pub x: Trajectory,
    pub y: Trajectory,
}

impl MovingPoint {
    pub fn traj(&self, axis: Axis) -> &Trajectory {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
        }
    }

    /// Static point at integer coordinates.
    pub fn fixed(id: PointId, x: i64, y: i64) -> Self {
        MovingPoint { id, x: Trajectory::constant(x), y: Trajectory::constant(y) }
    }
}

/// Dense, id-indexed collection of moving points.
#[derive(Clone, Debug, Default)]
pub struct PointStore {
    points: Vec<MovingPoint>,
}

impl PointStore {
    pub fn new(points: Vec<MovingPoint>) -> Self {
        for (i, p) in points.iter().enumerate() {
            assert!(p.id as usize == i, "point ids must be dense and in order");
        }
        PointStore { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, id: PointId) -> &MovingPoint {
        &self.points[id as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &MovingPoint> {
        self.points.iter()
    }

    pub fn coord(&self, axis: Axis, id: PointId, t: Rational) -> Rational {
        self.get(id).traj(axis).eval(t)
    }
}

/// Grid geometry: coordinates live on [0, u) and times on [0, t_max].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridParams {
    pub u: i64,
    pub t_max: i64,
}

impl GridParams {
    pub fn new(u: i64, t_max: i64) -> Result<Self, ModelError> {
        if !(2..=1 << 31).contains(&u) {
            return Err(ModelError::BadGridSide);
        }
        if !(1..=1 << 31).contains(&t_max) {
            return Err(ModelError::BadHorizon);
        }
        Ok(GridParams { u, t_max })
    }
}

/// First moment a point leaves the grid: which axis, when, and the offending
/// value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridViolation {
    pub axis: Axis,
    pub t: i64,
    pub value: i64,
}

fn ceil_div(p: i64, q: i64) -> i64 {
    debug_assert!(q > 0);
    p.div_euclid(q) + i64::from(p.rem_euclid(q) != 0)
}

fn first_violation_on_axis(tr: &Trajectory, grid: &GridParams) -> Option<(i64, i64)> {
    let pieces = tr.pieces();
    for (i, p) in pieces.iter().enumerate() {
        let lo = p.t_start.max(0);
        let hi = match pieces.get(i + 1) {
            Some(next) => (next.t_start - 1).min(grid.t_max),
            None => grid.t_max,
        };
        if lo > hi {
            continue;
        }
        let v_lo = p.eval_int(lo);
        if v_lo < 0 || v_lo >= grid.u {
            return Some((lo, v_lo));
        }
        if p.a > 0 {
            let exit = ceil_div(grid.u - p.b, p.a);
            if exit <= hi {
                return Some((exit, p.eval_int(exit)));
            }
        } else if p.a < 0 {
            let exit = ceil_div(p.b + 1, -p.a);
            if exit <= hi {
                return Some((exit, p.eval_int(exit)));
            }
        }
    }
    None
}

/// Checks that the point stays on the grid at every integer time in
/// `[0, t_max]`; reports the earliest violation (x before y on a time tie).
///
/// With integer coefficients a violation at any real time implies one at an
/// integer time on the same piece, so integer-time checking is exact.
pub fn validate_point(p: &MovingPoint, grid: &GridParams) -> Result<(), GridViolation> {
    let vx = first_violation_on_axis(&p.x, grid);
    let vy = first_violation_on_axis(&p.y, grid);
    match (vx, vy) {
        (None, None) => Ok(()),
        (Some((t, value)), None) => Err(GridViolation { axis: Axis::X, t, value }),
        (None, Some((t, value))) => Err(GridViolation { axis: Axis::Y, t, value }),
        (Some((tx, valx)), Some((ty, valy))) => {
            if tx <= ty {
                Err(GridViolation { axis: Axis::X, t: tx, value: valx })
            } else {
                Err(GridViolation { axis: Axis::Y, t: ty, value: valy })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Frames and ordering
// ---------------------------------------------------------------------------

/// Axis reflection applied by a structure that reuses dominance machinery for
/// a different quadrant orientation. A reflected axis negates both the
/// coordinate and the id tiebreak, so a frame order is the exact reverse of
/// the unreflected order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Frame {
    pub neg_x: bool,
    pub neg_y: bool,
}

impl Frame {
    pub const IDENTITY: Frame = Frame { neg_x: false, neg_y: false };
    pub const NEG_X: Frame = Frame { neg_x: true, neg_y: false };
    pub const NEG_Y: Frame = Frame { neg_x: false, neg_y: true };
    pub const NEG_XY: Frame = Frame { neg_x: true, neg_y: true };

    /// Applies `other` on top of `self` (reflections compose by xor).
    pub fn compose(self, other: Frame) -> Frame {
        Frame { neg_x: self.neg_x ^ other.neg_x, neg_y: self.neg_y ^ other.neg_y }
    }

    pub fn negates(self, axis: Axis) -> bool {
        match axis {
            Axis::X => self.neg_x,
            Axis::Y => self.neg_y,
        }
    }
}

/// Total order on (coordinate, id) pairs; the id tiebreak makes every
/// maintained order a strict total order even through coordinate ties.
pub fn cmp_coord_id(ca: Rational, ia: PointId, cb: Rational, ib: PointId) -> Ordering {
    ca.cmp(&cb).then(ia.cmp(&ib))
}

/// Evaluation context: a point store frozen at one instant.
#[derive(Clone, Copy)]
pub struct EvalCtx<'a> {
    pub store: &'a PointStore,
    pub t: Rational,
}

impl<'a> EvalCtx<'a> {
    pub fn new(store: &'a PointStore, t: Rational) -> Self {
        EvalCtx { store, t }
    }

    pub fn x(&self, id: PointId) -> Rational {
        self.store.get(id).x.eval(self.t)
    }

    pub fn y(&self, id: PointId) -> Rational {
        self.store.get(id).y.eval(self.t)
    }

    pub fn coord(&self, axis: Axis, id: PointId) -> Rational {
        self.store.coord(axis, id, self.t)
    }

    pub fn with_frame(self, frame: Frame) -> FrameCtx<'a> {
        FrameCtx { ctx: self, frame }
    }
}

/// Evaluation context seen through a [`Frame`]: coordinates are negated on
/// reflected axes and comparisons reverse their tiebreak accordingly.
#[derive(Clone, Copy)]
pub struct FrameCtx<'a> {
    pub ctx: EvalCtx<'a>,
    pub frame: Frame,
}

impl<'a> FrameCtx<'a> {
    pub fn fx(&self, id: PointId) -> Rational {
        let v = self.ctx.x(id);
        if self.frame.neg_x {
            -v
        } else {
            v
        }
    }

    pub fn fy(&self, id: PointId) -> Rational {
        let v = self.ctx.y(id);
        if self.frame.neg_y {
            -v
        } else {
            v
        }
    }

    pub fn fcoord(&self, axis: Axis, id: PointId) -> Rational {
        match axis {
            Axis::X => self.fx(id),
            Axis::Y => self.fy(id),
        }
    }

    /// Frame order on the x axis: (x, id), fully reversed when reflected.
    pub fn cmp_x(&self, a: PointId, b: PointId) -> Ordering {
        let o = cmp_coord_id(self.ctx.x(a), a, self.ctx.x(b), b);
        if self.frame.neg_x {
            o.reverse()
        } else {
            o
        }
    }

    /// Frame order on the y axis: (y, id), fully reversed when reflected.
    pub fn cmp_y(&self, a: PointId, b: PointId) -> Ordering {
        let o = cmp_coord_id(self.ctx.y(a), a, self.ctx.y(b), b);
        if self.frame.neg_y {
            o.reverse()
        } else {
            o
        }
    }

    pub fn cmp_axis(&self, axis: Axis, a: PointId, b: PointId) -> Ordering {
        match axis {
            Axis::X => self.cmp_x(a, b),
            Axis::Y => self.cmp_y(a, b),
        }
    }
}

// ---------------------------------------------------------------------------
// Query shapes
// ---------------------------------------------------------------------------

/// The three closed query shapes. All comparisons against point positions are
/// true-coordinate and closed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryShape {
    /// Points with x >= qx and y >= qy.
    Dominance { qx: Rational, qy: Rational },
    /// Points with a <= x <= b and y <= c.
    ThreeSided { a: Rational, b: Rational, c: Rational },
    /// Points with x1 <= x <= x2 and y1 <= y <= y2.
    Rect { x1: Rational, x2: Rational, y1: Rational, y2: Rational },
}

impl QueryShape {
    /// Interval bounds must be ordered; returns false for degenerate shapes.
    pub fn is_valid(&self) -> bool {
        match self {
            QueryShape::Dominance { .. } => true,
            QueryShape::ThreeSided { a, b, .. } => a <= b,
            QueryShape::Rect { x1, x2, y1, y2 } => x1 <= x2 && y1 <= y2,
        }
    }

    /// True-coordinate membership test at the context's time.
    pub fn contains(&self, ctx: &EvalCtx<'_>, id: PointId) -> bool {
        let x = ctx.x(id);
        let y = ctx.y(id);
        match self {
            QueryShape::Dominance { qx, qy } => x >= *qx && y >= *qy,
            QueryShape::ThreeSided { a, b, c } => x >= *a && x <= *b && y <= *c,
            QueryShape::Rect { x1, x2, y1, y2 } => {
                x >= *x1 && x <= *x2 && y >= *y1 && y <= *y2
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn rational_normalizes() {
        assert_eq!(r(2, 4), r(1, 2));
        assert_eq!(r(-2, -4), r(1, 2));
        assert_eq!(r(2, -4), r(-1, 2));
        assert_eq!(r(0, -7), Rational::zero());
        assert_eq!(r(6, 3).num(), 2);
        assert_eq!(r(6, 3).den(), 1);
    }

    #[test]
    fn rational_arithmetic() {
        assert_eq!(r(1, 2) + r(1, 3), r(5, 6));
        assert_eq!(r(1, 2) - r(1, 3), r(1, 6));
        assert_eq!(r(2, 3) * r(3, 4), r(1, 2));
        assert_eq!(-r(1, 2), r(-1, 2));
        assert!(r(1, 3) < r(1, 2));
        assert!(r(-1, 2) < r(-1, 3));
    }

    #[test]
    fn rational_floor_ceil() {
        assert_eq!(r(7, 2).floor(), 3);
        assert_eq!(r(7, 2).ceil(), 4);
        assert_eq!(r(-7, 2).floor(), -4);
        assert_eq!(r(-7, 2).ceil(), -3);
        assert_eq!(r(4, 1).floor(), 4);
        assert_eq!(r(4, 1).ceil(), 4);
    }

    #[test]
    fn rational_display() {
        use alloc::string::ToString;
        assert_eq!(r(3, 1).to_string(), "3");
        assert_eq!(r(7, 2).to_string(), "7/2");
        assert_eq!(r(-7, 2).to_string(), "-7/2");
    }

    #[test]
    fn position_at_linear() {
        let tr = Trajectory::linear(2, 1);
        assert_eq!(position_at(&tr, Rational::from_int(4)), Rational::from_int(9));
        let tr = Trajectory::constant(3);
        assert_eq!(position_at(&tr, Rational::from_int(11)), Rational::from_int(3));
    }

    #[test]
    fn position_at_second_piece() {
        let tr = Trajectory::new(vec![
            TrajectoryPiece { t_start: 0, a: 1, b: 0 },
            TrajectoryPiece { t_start: 5, a: -1, b: 10 },
        ])
        .unwrap();
        assert_eq!(position_at(&tr, Rational::from_int(7)), Rational::from_int(3));
        // The new piece is the active one exactly at the breakpoint.
        assert_eq!(tr.piece_index_at(Rational::from_int(5)), 1);
        assert_eq!(position_at(&tr, Rational::from_int(5)), Rational::from_int(5));
    }

    #[test]
    fn trajectory_validation() {
        assert_eq!(Trajectory::new(vec![]), Err(ModelError::EmptyTrajectory));
        assert_eq!(
            Trajectory::new(vec![TrajectoryPiece { t_start: 1, a: 0, b: 0 }]),
            Err(ModelError::FirstPieceNotAtZero)
        );
        assert_eq!(
            Trajectory::new(vec![
                TrajectoryPiece { t_start: 0, a: 1, b: 0 },
                TrajectoryPiece { t_start: 0, a: 1, b: 0 },
            ]),
            Err(ModelError::NonIncreasingPieces)
        );
        assert_eq!(
            Trajectory::new(vec![
                TrajectoryPiece { t_start: 0, a: 1, b: 0 },
                TrajectoryPiece { t_start: 5, a: 1, b: 1 },
            ]),
            Err(ModelError::Discontinuous { t: 5 })
        );
    }

    #[test]
    fn swap_time_basic() {
        let a = Trajectory::linear(2, 1);
        let b = Trajectory::linear(1, 5);
        assert_eq!(
            swap_time(&a, &b, Rational::zero(), 10),
            Some(Rational::from_int(4))
        );
        // Crossing exactly at `after` is excluded, and there is no later one.
        assert_eq!(swap_time(&a, &b, Rational::from_int(4), 10), None);
    }

    #[test]
    fn swap_time_parallel() {
        let a = Trajectory::linear(1, 1);
        let b = Trajectory::linear(1, 5);
        assert_eq!(swap_time(&a, &b, Rational::zero(), 100), None);
        // Identical trajectories: tangency everywhere, no order change.
        let c = Trajectory::linear(1, 1);
        assert_eq!(swap_time(&a, &c, Rational::zero(), 100), None);
    }

    #[test]
    fn swap_time_beyond_horizon() {
        let a = Trajectory::linear(1, 0);
        let b = Trajectory::constant(50);
        assert_eq!(swap_time(&a, &b, Rational::zero(), 49), None);
        assert_eq!(
            swap_time(&a, &b, Rational::zero(), 50),
            Some(Rational::from_int(50))
        );
    }

    #[test]
    fn swap_time_rational_root() {
        let a = Trajectory::linear(3, 0);
        let b = Trajectory::linear(0, 7);
        assert_eq!(swap_time(&a, &b, Rational::zero(), 10), Some(r(7, 3)));
    }

    #[test]
    fn swap_time_multi_piece() {
        // Rises to x=5 at t=5, then returns; the constant line at 3 is hit
        // going up (t=3) and coming down (t=7).
        let zig = Trajectory::new(vec![
            TrajectoryPiece { t_start: 0, a: 1, b: 0 },
            TrajectoryPiece { t_start: 5, a: -1, b: 10 },
        ])
        .unwrap();
        let flat = Trajectory::constant(3);
        assert_eq!(
            swap_time(&zig, &flat, Rational::zero(), 10),
            Some(Rational::from_int(3))
        );
        assert_eq!(
            swap_time(&zig, &flat, Rational::from_int(3), 10),
            Some(Rational::from_int(7))
        );
    }

    #[test]
    fn swap_time_tangent_kink() {
        // Touches the constant line exactly at its kink without crossing.
        // swap_time reports equality times, so the touch is reported; whether
        // an order change follows is the event layer's business.
        let bump = Trajectory::new(vec![
            TrajectoryPiece { t_start: 0, a: 1, b: 0 },
            TrajectoryPiece { t_start: 5, a: -1, b: 10 },
        ])
        .unwrap();
        let flat = Trajectory::constant(5);
        assert_eq!(
            swap_time(&bump, &flat, Rational::zero(), 10),
            Some(Rational::from_int(5))
        );
        // And it is not repeated once passed.
        assert_eq!(swap_time(&bump, &flat, Rational::from_int(5), 10), None);
    }

    #[test]
    fn validate_point_examples() {
        let grid = GridParams::new(16, 10).unwrap();
        let ok = MovingPoint {
            id: 0,
            x: Trajectory::linear(1, 0),
            y: Trajectory::constant(3),
        };
        assert_eq!(validate_point(&ok, &grid), Ok(()));

        let fast = MovingPoint {
            id: 0,
            x: Trajectory::linear(2, 0),
            y: Trajectory::constant(3),
        };
        assert_eq!(
            validate_point(&fast, &grid),
            Err(GridViolation { axis: Axis::X, t: 8, value: 16 })
        );

        let sinking = MovingPoint {
            id: 0,
            x: Trajectory::constant(3),
            y: Trajectory::linear(-1, 3),
        };
        assert_eq!(
            validate_point(&sinking, &grid),
            Err(GridViolation { axis: Axis::Y, t: 4, value: -1 })
        );
    }

    #[test]
    fn validate_point_tie_prefers_x() {
        let grid = GridParams::new(16, 10).unwrap();
        let p = MovingPoint {
            id: 0,
            x: Trajectory::linear(-1, 3),
            y: Trajectory::linear(-1, 3),
        };
        assert_eq!(
            validate_point(&p, &grid),
            Err(GridViolation { axis: Axis::X, t: 4, value: -1 })
        );
    }

    #[test]
    fn grid_params_validation() {
        assert!(GridParams::new(2, 1).is_ok());
        assert_eq!(GridParams::new(1, 1), Err(ModelError::BadGridSide));
        assert_eq!(GridParams::new(16, 0), Err(ModelError::BadHorizon));
    }

    #[test]
    fn frame_composition() {
        assert_eq!(Frame::NEG_Y.compose(Frame::NEG_Y), Frame::IDENTITY);
        assert_eq!(Frame::NEG_X.compose(Frame::NEG_Y), Frame::NEG_XY);
        assert!(Frame::NEG_XY.negates(Axis::X));
        assert!(Frame::NEG_XY.negates(Axis::Y));
    }

    #[test]
    fn frame_ctx_reverses_orders() {
        let store = PointStore::new(vec![
            MovingPoint::fixed(0, 1, 5),
            MovingPoint::fixed(1, 3, 5),
        ]);
        let ctx = EvalCtx::new(&store, Rational::zero());
        let fwd = ctx.with_frame(Frame::IDENTITY);
        let rev = ctx.with_frame(Frame::NEG_XY);
        assert_eq!(fwd.cmp_x(0, 1), Ordering::Less);
        assert_eq!(rev.cmp_x(0, 1), Ordering::Greater);
        // Equal y coordinates: the id tiebreak also reverses.
        assert_eq!(fwd.cmp_y(0, 1), Ordering::Less);
        assert_eq!(rev.cmp_y(0, 1), Ordering::Greater);
        assert_eq!(rev.fx(1), Rational::from_int(-3));
    }

    #[test]
    fn query_shapes() {
        let store = PointStore::new(vec![MovingPoint::fixed(0, 3, 4)]);
        let ctx = EvalCtx::new(&store, Rational::zero());
        let dom = QueryShape::Dominance { qx: r(5, 2), qy: r(5, 2) };
        assert!(dom.contains(&ctx, 0));
        let ts = QueryShape::ThreeSided {
            a: Rational::from_int(2),
            b: Rational::from_int(5),
            c: Rational::from_int(3),
        };
        assert!(!ts.contains(&ctx, 0));
        let rect = QueryShape::Rect {
            x1: Rational::from_int(2),
            x2: Rational::from_int(5),
            y1: Rational::from_int(2),
            y2: Rational::from_int(4),
        };
        assert!(rect.contains(&ctx, 0));
        assert!(!QueryShape::ThreeSided {
            a: Rational::from_int(5),
            b: Rational::from_int(2),
            c: Rational::zero()
        }
        .is_valid());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_piecewise() -> impl Strategy<Value = Trajectory> {
            // Start value plus a few slope changes; continuity by construction.
            (
                -50i64..50,
                proptest::collection::vec((-8i64..=8, 1i64..20), 1..4),
            )
                .prop_map(|(b0, segs)| {
                    let mut pieces = Vec::new();
                    let mut t = 0i64;
                    let mut v = b0;
                    for (a, dur) in segs {
                        pieces.push(TrajectoryPiece { t_start: t, a, b: v - a * t });
                        t += dur;
                        v += a * dur;
                    }
                    Trajectory::new(pieces).unwrap()
                })
        }

        proptest! {
            #[test]
            fn single_piece_crossing_matches_formula(
                a1 in -8i64..=8, b1 in -100i64..100,
                a2 in -8i64..=8, b2 in -100i64..100,
            ) {
                let t1 = Trajectory::linear(a1, b1);
                let t2 = Trajectory::linear(a2, b2);
                let got = swap_time(&t1, &t2, Rational::zero(), 1000);
                if a1 == a2 {
                    prop_assert_eq!(got, None);
                } else {
                    let root = Rational::new(b2 - b1, a1 - a2);
                    let expected = if root > Rational::zero()
                        && root <= Rational::from_int(1000)
                    {
                        Some(root)
                    } else {
                        None
                    };
                    prop_assert_eq!(got, expected);
                }
            }

            #[test]
            fn sign_constant_between_crossings(
                tr1 in arb_piecewise(),
                tr2 in arb_piecewise(),
            ) {
                let t_max = 60i64;
                // Collect all crossings, then check the difference keeps one
                // sign strictly between consecutive ones.
                let mut cuts = alloc::vec![Rational::zero()];
                let mut after = Rational::zero();
                for _ in 0..1000 {
                    match swap_time(&tr1, &tr2, after, t_max) {
                        Some(t) => {
                            cuts.push(t);
                            after = t;
                        }
                        None => break,
                    }
                }
                cuts.push(Rational::from_int(t_max));
                for w in cuts.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    if lo >= hi {
                        continue;
                    }
                    // Sample the midpoint and both near-edges.
                    let half = Rational::new(1, 2);
                    let mid = (lo + hi) * half;
                    let q1 = (lo + mid) * half;
                    let q3 = (mid + hi) * half;
                    let sgn = |t: Rational| {
                        let d = tr1.eval(t) - tr2.eval(t);
                        if d < Rational::zero() { -1 } else if d > Rational::zero() { 1 } else { 0 }
                    };
                    let s_mid = sgn(mid);
                    // Strictly between crossings the difference never changes
                    // sign; it may only be zero on an identical stretch, where
                    // it is zero across the whole window.
                    for q in [q1, q3] {
                        let s = sgn(q);
                        prop_assert!(s == s_mid || s == 0 || s_mid == 0,
                            "sign changed without a reported crossing");
                    }
                }
            }

            #[test]
            fn validate_point_agrees_with_scan(
                x in arb_piecewise(),
                y in arb_piecewise(),
            ) {
                let grid = GridParams::new(64, 40).unwrap();
                let p = MovingPoint { id: 0, x, y };
                // Brute force: first violating integer time, x before y.
                let mut expected = None;
                'outer: for t in 0..=grid.t_max {
                    for axis in [Axis::X, Axis::Y] {
                        let v = p.traj(axis).eval(Rational::from_int(t));
                        debug_assert!(v.is_integer());
                        let v = v.num();
                        if v < 0 || v >= grid.u {
                            expected = Some(GridViolation { axis, t, value: v });
                            break 'outer;
                        }
                    }
                }
                let got = validate_point(&p, &grid).err();
                prop_assert_eq!(got, expected);
            }
        }
    }
}
