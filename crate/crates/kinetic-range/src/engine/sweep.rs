//! Lazy single-axis sweep over trajectory segments in the (time, coordinate)
//! plane, and the slab subdivision it induces.
//!
//! The sweep maintains the coordinate order of one axis and pops pairwise
//! crossing events in time order, extending its frontier on demand. Each
//! crossing cuts a new time slab; within one slab no two trajectories cross,
//! so vertical ray shooting (predecessor at a probe time) is two binary
//! searches: slab by time, then position by exact coordinate evaluation.
//! Trajectory kinks never cut slabs — certificates already account for every
//! piece, and in-slab evaluation is exact.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{first_flip, OrderVec};
use crate::model::{cmp_coord_id, Axis, PointId, PointStore, Rational};

/// Sweep key: (time, smaller id, larger id) of a pending adjacent crossing.
type SweepKey = (Rational, PointId, PointId);

/// A lazily advanced single-axis crossing sweep.
pub struct SweepState {
    store: PointStore,
    axis: Axis,
    t_max: i64,
    now: Rational,
    order: OrderVec,
    certs: Vec<Option<SweepKey>>,
    queue: BTreeSet<SweepKey>,
}

impl SweepState {
    /// Sorts the axis order at t = 0 and certifies every adjacent pair.
    pub fn new(store: PointStore, axis: Axis, t_max: i64) -> Self {
        let zero = Rational::zero();
        let mut ids: Vec<PointId> = (0..store.len() as PointId).collect();
        ids.sort_by(|&a, &b| {
            cmp_coord_id(store.coord(axis, a, zero), a, store.coord(axis, b, zero), b)
        });
        let n = store.len();
        let mut s = SweepState {
            store,
            axis,
            t_max,
            now: zero,
            order: OrderVec::from_sorted(ids),
            certs: alloc::vec![None; n.saturating_sub(1)],
            queue: BTreeSet::new(),
        };
        for g in 0..n.saturating_sub(1) {
            s.recompute_gap(g);
        }
        s
    }

    pub fn store(&self) -> &PointStore {
        &self.store
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn t_max(&self) -> i64 {
        self.t_max
    }

    /// Current order snapshot (valid at the frontier).
    pub fn order(&self) -> &[PointId] {
        self.order.seq()
    }

    /// Time of the next pending crossing; exhausted sweeps return none, and
    /// then the current order stands through the whole horizon.
    pub fn horizon(&self) -> Option<Rational> {
        self.queue.first().map(|&(t, _, _)| t)
    }

    fn recompute_gap(&mut self, g: usize) {
        if let Some(old) = self.certs[g].take() {
            self.queue.remove(&old);
        }
        let p = self.order.seq()[g];
        let q = self.order.seq()[g + 1];
        if let Some(t) = first_flip(&self.store, self.axis, p, q, self.now, self.t_max) {
            let key = (t, p.min(q), p.max(q));
            self.queue.insert(key);
            self.certs[g] = Some(key);
        }
    }

    /// Pops up to `batch` crossings in (time, id pair) order, applying each
    /// swap; returns them as (time, smaller id, larger id). Fewer come back
    /// only when the sweep is exhausted through the horizon.
    pub fn next_intersections(&mut self, batch: usize) -> Vec<(Rational, PointId, PointId)> {
        let mut out = Vec::new();
        while out.len() < batch {
            let Some(&(t, a, b)) = self.queue.first() else { break };
            self.now = t;
            let coord = {
                let store = &self.store;
                let axis = self.axis;
                move |id: PointId| store.coord(axis, id, t)
            };
            let pos_a = self.order.position_of(a, &coord);
            let seq = self.order.seq();
            let g = if pos_a + 1 < seq.len() && seq[pos_a + 1] == b {
                pos_a
            } else {
                debug_assert!(pos_a > 0 && seq[pos_a - 1] == b, "crossing pair not adjacent");
                pos_a - 1
            };
            if let Some(old) = self.certs[g].take() {
                self.queue.remove(&old);
            }
            self.order.swap_gap(g);
            if g > 0 {
                self.recompute_gap(g - 1);
            }
            self.recompute_gap(g);
            if g + 2 < self.order.len() {
                self.recompute_gap(g + 1);
            }
            out.push((t, a, b));
        }
        out
    }
}

/// Slab-search failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlabError {
    /// The probe time is at or beyond the built frontier; extend the sweep.
    ExtendFirst { t: Rational },
}

impl core::fmt::Display for SlabError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SlabError::ExtendFirst { t } => {
                write!(f, "probe at t={} is beyond the built slab frontier", t)
            }
        }
    }
}

struct Slab {
    t_start: Rational,
    order: Vec<PointId>,
}

/// The time-slab subdivision induced by a sweep: one slab per maximal
/// crossing-free time range, each holding the axis order valid throughout it.
pub struct SlabSubdivision {
    axis: Axis,
    t_max: i64,
    slabs: Vec<Slab>,
    pos_of: Vec<u32>,
    /// Exclusive safe-query bound; none once the sweep is exhausted (then
    /// every probe through t_max is answerable).
    horizon: Option<Rational>,
}

impl SlabSubdivision {
    /// Starts with the single slab at t = 0; `horizon` is the sweep's next
    /// pending crossing time, if any.
    pub fn new(axis: Axis, order: Vec<PointId>, t_max: i64, horizon: Option<Rational>) -> Self {
        let mut pos_of = alloc::vec![0u32; order.len()];
        for (pos, &id) in order.iter().enumerate() {
            pos_of[id as usize] = pos as u32;
        }
        SlabSubdivision {
            axis,
            t_max,
            slabs: alloc::vec![Slab { t_start: Rational::zero(), order }],
            pos_of,
            horizon,
        }
    }

    pub fn slab_count(&self) -> usize {
        self.slabs.len()
    }

    /// True when a probe at `t` is answerable without extending the sweep.
    pub fn covers(&self, t: Rational) -> bool {
        match self.horizon {
            Some(h) => t < h,
            None => t <= Rational::from_int(self.t_max),
        }
    }

    /// Folds a batch of crossings (in sweep order) into new slabs and adopts
    /// the sweep's new horizon. Same-time crossings collapse into one slab.
    pub fn absorb(&mut self, events: &[(Rational, PointId, PointId)], horizon: Option<Rational>) {
        for &(t, a, b) in events {
            let pa = self.pos_of[a as usize] as usize;
            let pb = self.pos_of[b as usize] as usize;
            debug_assert!(pa.abs_diff(pb) == 1, "crossing pair not adjacent in slab order");
            let g = pa.min(pb);
            let last = self.slabs.last_mut().expect("subdivision always has a slab");
            if last.t_start == t {
                last.order.swap(g, g + 1);
            } else {
                debug_assert!(last.t_start < t);
                let mut order = last.order.clone();
                order.swap(g, g + 1);
                self.slabs.push(Slab { t_start: t, order });
            }
            self.pos_of[a as usize] = pb as u32;
            self.pos_of[b as usize] = pa as u32;
        }
        self.horizon = horizon;
    }

    /// Vertical ray shooting: the point whose coordinate at time `t` is the
    /// largest one <= `x`, via slab search then in-slab binary search.
    pub fn locate(
        &self,
        store: &PointStore,
        t: Rational,
        x: Rational,
    ) -> Result<Option<PointId>, SlabError> {
        if !self.covers(t) {
            return Err(SlabError::ExtendFirst { t });
        }
        if t < Rational::zero() {
            return Ok(None);
        }
        let si = self.slabs.partition_point(|s| s.t_start <= t) - 1;
        let order = &self.slabs[si].order;
        let ub = order.partition_point(|&id| store.coord(self.axis, id, t) <= x);
        Ok(ub.checked_sub(1).map(|p| order[p]))
    }
}

/// The slab-backed predecessor oracle: a sweep extended lazily in batches
/// plus the subdivision it has built so far.
pub struct SlabPredecessor {
    sweep: SweepState,
    sub: SlabSubdivision,
    batch: usize,
}

impl SlabPredecessor {
    pub fn new(store: PointStore, axis: Axis, t_max: i64) -> Self {
        let batch = store.len().max(1);
        let sweep = SweepState::new(store, axis, t_max);
        let sub = SlabSubdivision::new(axis, sweep.order().to_vec(), t_max, sweep.horizon());
        SlabPredecessor { sweep, sub, batch }
    }

    pub fn subdivision(&self) -> &SlabSubdivision {
        &self.sub
    }

    /// Extends the sweep until probes at `t` are answerable (or it is
    /// exhausted), then locates the predecessor.
    pub fn predecessor(&mut self, t: Rational, x: Rational) -> Result<Option<PointId>, SlabError> {
        while !self.sub.covers(t) {
            let events = self.sweep.next_intersections(self.batch);
            let horizon = self.sweep.horizon();
            let done = events.is_empty() && horizon.is_none();
            self.sub.absorb(&events, horizon);
            if done {
                break;
            }
        }
        self.sub.locate(self.sweep.store(), t, x)
    }
}
