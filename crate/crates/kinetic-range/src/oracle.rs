//! Brute-force reference implementations: position-scan queries, pairwise
//! crossing enumeration, and total-order snapshots.
//!
//! Everything here recomputes from the trajectories alone — no state, no
//! sharing with the maintained structures — so differential suites can treat
//! these answers as ground truth. Costs are quadratic and irrelevant.

use alloc::vec::Vec;

use crate::model::{cmp_coord_id, Axis, EvalCtx, PointId, PointStore, QueryShape, Rational};

/// Ids sorted by (coordinate at `t`, id) on the given axis.
///
/// At a crossing instant this is the canonical tie-run order, which may differ
/// from a maintained order inside equal-coordinate runs; callers comparing
/// orders must treat tie runs as unordered sets.
pub fn oracle_order(store: &PointStore, axis: Axis, t: Rational) -> Vec<PointId> {
    let mut ids: Vec<PointId> = (0..store.len() as PointId).collect();
    ids.sort_by(|&a, &b| {
        cmp_coord_id(
            store.coord(axis, a, t),
            a,
            store.coord(axis, b, t),
            b,
        )
    });
    ids
}

/// All points inside the shape at time `t`, ascending by id.
pub fn oracle_query(store: &PointStore, t: Rational, shape: &QueryShape) -> Vec<PointId> {
    let ctx = EvalCtx::new(store, t);
    (0..store.len() as PointId)
        .filter(|&id| shape.contains(&ctx, id))
        .collect()
}

/// Number of points dominating `(qx, qy)` at time `t` (closed comparisons).
pub fn oracle_dominator_count(
    store: &PointStore,
    t: Rational,
    qx: Rational,
    qy: Rational,
) -> usize {
    oracle_query(store, t, &QueryShape::Dominance { qx, qy }).len()
}

/// One order-change event: the instant at which the strict (coordinate, id)
/// order of the two ids flips on the axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleEvent {
    pub t: Rational,
    pub axis: Axis,
    pub lo_id: PointId,
    pub hi_id: PointId,
}

fn relation_at(store: &PointStore, axis: Axis, p: PointId, q: PointId, probe: Rational) -> i8 {
    let cp = store.coord(axis, p, probe);
    let cq = store.coord(axis, q, probe);
    match cp.cmp(&cq) {
        core::cmp::Ordering::Less => -1,
        core::cmp::Ordering::Greater => 1,
        // Identical stretch: the id tiebreak decides for the whole interval.
        core::cmp::Ordering::Equal => {
            if p < q {
                -1
            } else {
                1
            }
        }
    }
}

fn pair_flips(
    store: &PointStore,
    axis: Axis,
    p: PointId,
    q: PointId,
    t_max: i64,
    out: &mut Vec<OracleEvent>,
) {
    let trp = store.get(p).traj(axis);
    let trq = store.get(q).traj(axis);

    // All critical times of the pair, unclamped: piece boundaries of either
    // trajectory and every within-interval root of the difference. The
    // relation is constant on each open interval between consecutive ones.
    let mut boundaries: Vec<i64> = trp.breakpoints().chain(trq.breakpoints()).collect();
    boundaries.sort_unstable();
    boundaries.dedup();
    let mut crit: Vec<Rational> = boundaries.iter().map(|&b| Rational::from_int(b)).collect();
    let mut lo = Rational::zero();
    for idx in 0..=boundaries.len() {
        let hi = boundaries.get(idx).map(|&b| Rational::from_int(b));
        let pp = trp.pieces()[trp.piece_index_at(lo)];
        let pq = trq.pieces()[trq.piece_index_at(lo)];
        let alpha = pp.a - pq.a;
        let beta = pp.b - pq.b;
        if alpha != 0 {
            let root = Rational::new(-beta, alpha);
            if root >= lo && hi.map_or(true, |h| root < h) {
                crit.push(root);
            }
        }
        match hi {
            Some(h) => lo = h,
            None => break,
        }
    }
    crit.retain(|&c| c >= Rational::zero());
    crit.sort();
    crit.dedup();

    // The state before everything is the (coordinate, id) order at t = 0,
    // which is how maintained orders are initialized. A flip at time c means
    // the relation on the open interval just after c differs from the one
    // before; sample inside that interval (never beyond the next critical
    // time). Flips after the horizon are not events.
    let horizon = Rational::from_int(t_max);
    let mut state: i8 = {
        let z = Rational::zero();
        match cmp_coord_id(store.coord(axis, p, z), p, store.coord(axis, q, z), q) {
            core::cmp::Ordering::Less => -1,
            _ => 1,
        }
    };
    for (i, &c) in crit.iter().enumerate() {
        if c > horizon {
            break;
        }
        let probe = match crit.get(i + 1) {
            Some(&nxt) => (c + nxt) * Rational::new(1, 2),
            None => c + Rational::from_int(1),
        };
        let next = relation_at(store, axis, p, q, probe);
        if next != state {
            out.push(OracleEvent {
                t: c,
                axis,
                lo_id: p.min(q),
                hi_id: p.max(q),
            });
            state = next;
        }
    }
}

/// Every pairwise order flip on both axes in `[0, t_max]`, sorted by
/// (time, axis with y before x, id pair). Trajectory breakpoints are not
/// events in themselves and are not reported.
pub fn oracle_events(store: &PointStore, t_max: i64) -> Vec<OracleEvent> {
    let n = store.len() as PointId;
    let mut out = Vec::new();
    for p in 0..n {
        for q in (p + 1)..n {
            for axis in [Axis::X, Axis::Y] {
                pair_flips(store, axis, p, q, t_max, &mut out);
            }
        }
    }
    out.sort_by(|a, b| {
        a.t.cmp(&b.t)
            .then_with(|| axis_rank(a.axis).cmp(&axis_rank(b.axis)))
            .then_with(|| (a.lo_id, a.hi_id).cmp(&(b.lo_id, b.hi_id)))
    });
    out
}

fn axis_rank(axis: Axis) -> u8 {
    match axis {
        Axis::Y => 0,
        Axis::X => 1,
    }
}
