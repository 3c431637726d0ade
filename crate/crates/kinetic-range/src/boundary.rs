//! The approximate dominance boundary: a staircase of horizontal segments
//! over the current point set, maintained under adjacent-rank swaps and
//! extreme-end insertions/deletions.
//!
//! Every segment `s` carries two anchors: `level` (the point u(s) whose y
//! sits just above the segment) and `first` (the point whose x sits just
//! right of the segment's start; the leftmost segment starts at -infinity
//! and stores no anchor). All geometry is rank-space: a point is "above"
//! s exactly when its y-rank is at least u(s)'s, and "right of start"
//! exactly when its x-rank is at least first(s)'s. Anchors are ids, so
//! their ranks move with the maintained orders and nothing here stores a
//! coordinate.
//!
//! Dom(s) is the set of points dominating s's left endpoint. The structure
//! maintains three running guarantees: consecutive segment pairs span more
//! than half the threshold `d` in x-ranks, every Dom stays below `2d`, and
//! every right endpoint keeps at least `d` dominators. Swap handlers apply
//! the minimal re-anchoring that keeps right-endpoint counts exactly
//! unchanged; violations of the other two guarantees are queued and settled
//! by local repairs (raise/split/shift for a crowded left endpoint,
//! extend/extend/rebuild for a thin pair) before the mutating call returns.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::engine::RankCounter;
use crate::model::PointId;

/// Read-only view of the maintained member orders, in rank space.
///
/// Mutating calls state their view convention: insertions are reported with
/// the view already containing the new member; deletions are reported with
/// the view already without it (the handler receives the stale rank it
/// needs). Swap handlers always see the post-swap view.
pub trait RankView {
    fn len(&self) -> usize;
    /// Position of the member in the ascending x order.
    fn rank_x(&self, id: PointId) -> usize;
    /// Position of the member in the ascending y order.
    fn rank_y(&self, id: PointId) -> usize;
    fn at_x(&self, rank: usize) -> PointId;
    fn at_y(&self, rank: usize) -> PointId;
}

/// Canonical [`RankView`] implementation: the two orders as vectors plus
/// constant-time id-to-rank maps. Ids index the maps directly, so the view
/// is built with a fixed id capacity.
#[derive(Clone, Debug)]
pub struct MemberOrders {
    xorder: Vec<PointId>,
    yorder: Vec<PointId>,
    xpos: Vec<u32>,
    ypos: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl MemberOrders {
    pub fn new(xorder: Vec<PointId>, yorder: Vec<PointId>, capacity: usize) -> Self {
        assert_eq!(xorder.len(), yorder.len());
        let mut m = MemberOrders {
            xorder: Vec::new(),
            yorder: Vec::new(),
            xpos: alloc::vec![ABSENT; capacity],
            ypos: alloc::vec![ABSENT; capacity],
        };
        for (pos, &id) in xorder.iter().enumerate() {
            m.xpos[id as usize] = pos as u32;
        }
        for (pos, &id) in yorder.iter().enumerate() {
            m.ypos[id as usize] = pos as u32;
        }
        m.xorder = xorder;
        m.yorder = yorder;
        m
    }

    pub fn x_slice(&self) -> &[PointId] {
        &self.xorder
    }

    pub fn y_slice(&self) -> &[PointId] {
        &self.yorder
    }

    pub fn contains(&self, id: PointId) -> bool {
        (id as usize) < self.xpos.len() && self.xpos[id as usize] != ABSENT
    }

    /// Swaps adjacent x positions `pos` and `pos + 1`.
    pub fn swap_x(&mut self, pos: usize) {
        self.xorder.swap(pos, pos + 1);
        self.xpos[self.xorder[pos] as usize] = pos as u32;
        self.xpos[self.xorder[pos + 1] as usize] = (pos + 1) as u32;
    }

    pub fn swap_y(&mut self, pos: usize) {
        self.yorder.swap(pos, pos + 1);
        self.ypos[self.yorder[pos] as usize] = pos as u32;
        self.ypos[self.yorder[pos + 1] as usize] = (pos + 1) as u32;
    }

    pub fn insert_x_at(&mut self, pos: usize, id: PointId) {
        self.xorder.insert(pos, id);
        for p in pos..self.xorder.len() {
            self.xpos[self.xorder[p] as usize] = p as u32;
        }
    }

    pub fn remove_x_at(&mut self, pos: usize) -> PointId {
        let id = self.xorder.remove(pos);
        self.xpos[id as usize] = ABSENT;
        for p in pos..self.xorder.len() {
            self.xpos[self.xorder[p] as usize] = p as u32;
        }
        id
    }

    pub fn insert_y_at(&mut self, pos: usize, id: PointId) {
        self.yorder.insert(pos, id);
        for p in pos..self.yorder.len() {
            self.ypos[self.yorder[p] as usize] = p as u32;
        }
    }

    pub fn remove_y_at(&mut self, pos: usize) -> PointId {
        let id = self.yorder.remove(pos);
        self.ypos[id as usize] = ABSENT;
        for p in pos..self.yorder.len() {
            self.ypos[self.yorder[p] as usize] = p as u32;
        }
    }
}

impl RankView for MemberOrders {
    fn len(&self) -> usize {
        self.xorder.len()
    }

    fn rank_x(&self, id: PointId) -> usize {
        let p = self.xpos[id as usize];
        debug_assert!(p != ABSENT, "id not a member");
        p as usize
    }

    fn rank_y(&self, id: PointId) -> usize {
        let p = self.ypos[id as usize];
        debug_assert!(p != ABSENT, "id not a member");
        p as usize
    }

    fn at_x(&self, rank: usize) -> PointId {
        self.xorder[rank]
    }

    fn at_y(&self, rank: usize) -> PointId {
        self.yorder[rank]
    }
}

#[derive(Clone, Debug)]
struct Seg {
    /// u(s): the point just above the segment's y level.
    level: PointId,
    /// first(s): the point just right of the segment's start; none for the
    /// leftmost segment, whose start is -infinity.
    first: Option<PointId>,
    /// Dominators of the left endpoint.
    dom: Vec<PointId>,
}

/// Pending local checks, keyed by the current `level` anchor of the segment
/// they concern (re-validated at pop; a stale key is skipped and the
/// mutation that invalidated it queued its own follow-ups).
#[derive(Clone, Copy, Debug)]
enum Task {
    /// Left endpoint may have reached the 2d dominator bound.
    CheckLeft(PointId),
    /// The pair starting at this segment may span too few ranks.
    CheckGap(PointId),
    /// Right endpoint may have lost a dominator (forced corner cases).
    RestoreRight(PointId),
}

/// Maintenance counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundaryStats {
    pub left_repairs: u64,
    pub gap_repairs: u64,
    pub restores: u64,
    pub raises: u64,
    pub splits: u64,
    pub connector_shifts: u64,
    pub segment_deletes: u64,
    pub segment_inserts: u64,
}

/// One audit finding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AuditIssue {
    /// Index of the offending segment (left segment for pair findings).
    pub segment: usize,
    pub kind: AuditKind,
    pub expected: usize,
    pub actual: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditKind {
    /// |Dom| differs from the rank-region dominator count.
    DomCount,
    /// A Dom member lies outside the segment's dominator region.
    DomMember,
    /// Duplicate id inside a Dom set.
    DomDuplicate,
    /// Left endpoint dominated by more than 2d points.
    LeftCount,
    /// Right endpoint dominated by fewer than d points.
    RightCount,
    /// Consecutive pair spans too few x ranks.
    PairSpan,
    /// Segment levels not strictly decreasing left to right.
    LevelOrder,
    /// Segment starts not strictly increasing left to right.
    StartOrder,
    /// Leftmost segment must be the only one without a start anchor.
    AnchorShape,
    /// More segments than the size bound allows.
    SegmentCount,
}

#[derive(Clone, Debug, Default)]
pub struct AuditReport {
    pub issues: Vec<AuditIssue>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

/// The boundary: segments in left-to-right order plus the repair worklist.
#[derive(Clone, Debug)]
pub struct Boundary {
    d: usize,
    t_l: usize,
    segs: Vec<Seg>,
    worklist: VecDeque<Task>,
    stats: BoundaryStats,
}

impl Boundary {
    /// Builds the boundary over the viewed members; empty when the member
    /// count is at most `2d` (queries then fall back to exact structures).
    ///
    /// Construction walks the y order downward maintaining the set of
    /// points above the current level in a rank counter over x ranks. Each
    /// round picks the next start anchor as the d-th x-largest point above
    /// the level (making the right endpoint's dominator count exactly d)
    /// and then lowers the level until the new left endpoint has exactly
    /// `t_l` dominators; running out of points ends the staircase.
    pub fn build(view: &impl RankView, d: usize) -> Self {
        assert!(d >= 2, "threshold below the supported range");
        let t_l = (3 * d + 1) / 2;
        let n = view.len();
        let mut b = Boundary {
            d,
            t_l,
            segs: Vec::new(),
            worklist: VecDeque::new(),
            stats: BoundaryStats::default(),
        };
        if n <= 2 * d {
            return b;
        }
        let mut above = RankCounter::new(n);
        let mut dom1 = Vec::with_capacity(t_l);
        for yr in (n - t_l)..n {
            let id = view.at_y(yr);
            above.add(view.rank_x(id), 1);
            dom1.push(id);
        }
        b.segs.push(Seg { level: view.at_y(n - t_l), first: None, dom: dom1 });
        let mut ywalk = (n - t_l) as isize - 1;
        loop {
            // The d x-largest points above the level; the d-th is the next
            // start anchor.
            let mut old_top = Vec::with_capacity(d);
            for k in 1..=d as u32 {
                old_top.push(view.at_x(above.select_from_right(k)));
            }
            let w = *old_top.last().expect("d >= 2");
            let w_rank = view.rank_x(w);
            let mut walked_qual = Vec::new();
            let mut next_level = None;
            while ywalk >= 0 {
                let p = view.at_y(ywalk as usize);
                ywalk -= 1;
                above.add(view.rank_x(p), 1);
                if view.rank_x(p) >= w_rank {
                    walked_qual.push(p);
                    if walked_qual.len() == t_l - d {
                        next_level = Some(p);
                        break;
                    }
                }
            }
            let Some(u_next) = next_level else { break };
            let mut dom = old_top;
            dom.extend_from_slice(&walked_qual);
            debug_assert_eq!(dom.len(), t_l);
            b.segs.push(Seg { level: u_next, first: Some(w), dom });
        }
        b.stats.segment_inserts = b.segs.len() as u64;
        b
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.segs.len()
    }

    pub fn stats(&self) -> BoundaryStats {
        self.stats
    }

    pub fn level_of(&self, seg: usize) -> PointId {
        self.segs[seg].level
    }

    pub fn first_of(&self, seg: usize) -> Option<PointId> {
        self.segs[seg].first
    }

    pub fn dom_of(&self, seg: usize) -> &[PointId] {
        &self.segs[seg].dom
    }

    /// The segment covering an x rank: the last one starting at or before
    /// it. Total for every rank because the leftmost start is -infinity.
    pub fn cover_rank(&self, view: &impl RankView, xrank: usize) -> Option<usize> {
        if self.segs.is_empty() {
            return None;
        }
        let after = self
            .segs
            .partition_point(|s| s.first.map_or(0, |id| view.rank_x(id)) <= xrank);
        Some(after.saturating_sub(1).min(self.segs.len() - 1))
    }

    fn srank(&self, view: &impl RankView, seg: usize) -> usize {
        self.segs[seg].first.map_or(0, |id| view.rank_x(id))
    }

    /// Rank threshold of the segment's right endpoint; none for the last.
    fn erank(&self, view: &impl RankView, seg: usize) -> Option<usize> {
        self.segs.get(seg + 1).map(|s| {
            view.rank_x(s.first.expect("only the leftmost segment lacks a start anchor"))
        })
    }

    /// Pair span of (seg, seg+1): x ranks from seg's start to the pair's
    /// right end (member count of the closed window in the plane).
    fn pair_span(&self, view: &impl RankView, seg: usize) -> usize {
        let hi = self.erank(view, seg + 1).unwrap_or(view.len());
        let lo = self.srank(view, seg);
        debug_assert!(hi >= lo);
        hi - lo
    }

    fn gap_threshold(&self) -> usize {
        self.d.div_ceil(2)
    }

    fn right_count(&self, view: &impl RankView, seg: usize) -> Option<usize> {
        let er = self.erank(view, seg)?;
        Some(self.segs[seg].dom.iter().filter(|&&p| view.rank_x(p) >= er).count())
    }

    fn find_by_level(&self, id: PointId) -> Option<usize> {
        self.segs.iter().position(|s| s.level == id)
    }

    fn find_by_first(&self, id: PointId) -> Option<usize> {
        self.segs.iter().position(|s| s.first == Some(id))
    }

    /// Adds `id` to Dom(seg) when it lies in the segment's dominator
    /// region, queueing the left-endpoint check at the bound.
    fn dom_insert_if(&mut self, view: &impl RankView, seg: usize, id: PointId) {
        let s = &self.segs[seg];
        let x_ok = s.first.map_or(true, |f| view.rank_x(id) >= view.rank_x(f));
        let y_ok = view.rank_y(id) >= view.rank_y(s.level);
        if x_ok && y_ok {
            debug_assert!(!s.dom.contains(&id), "dominator inserted twice");
            self.segs[seg].dom.push(id);
            if self.segs[seg].dom.len() >= 2 * self.d {
                self.worklist.push_back(Task::CheckLeft(self.segs[seg].level));
            }
        }
    }

    fn dom_remove_if_present(&mut self, seg: usize, id: PointId) {
        let dom = &mut self.segs[seg].dom;
        if let Some(pos) = dom.iter().position(|&p| p == id) {
            dom.swap_remove(pos);
        }
    }

    /// Removes the segment, handing its span to the left neighbor (or
    /// promoting the next segment to leftmost, expanding its Dom over the
    /// uncovered ranks). Queues the checks the merged pair may now need.
    fn delete_segment(&mut self, view: &impl RankView, seg: usize) {
        self.stats.segment_deletes += 1;
        let removed = self.segs.remove(seg);
        drop(removed);
        if self.segs.is_empty() {
            return;
        }
        if seg == 0 {
            // Promote: the new leftmost segment starts at -infinity and its
            // Dom absorbs every qualifying point left of its old start.
            let old_start = self.srank(view, 0);
            self.segs[0].first = None;
            for r in 0..old_start {
                self.dom_insert_if(view, 0, view.at_x(r));
            }
            self.worklist.push_back(Task::CheckGap(self.segs[0].level));
        } else {
            self.worklist.push_back(Task::CheckGap(self.segs[seg - 1].level));
            if seg < self.segs.len() {
                self.worklist.push_back(Task::CheckGap(self.segs[seg].level));
            }
        }
    }

    /// Handles an adjacent y swap (post-swap view): `riser` now sits one y
    /// rank above `faller`. Only level anchors react: a segment anchored at
    /// the faller keeps its right-endpoint count exactly unchanged, and a
    /// segment anchored at the riser re-anchors to the faller to keep its
    /// above-set identical.
    pub fn on_y_swap(&mut self, view: &impl RankView, riser: PointId, faller: PointId) {
        if self.segs.is_empty() {
            return;
        }
        debug_assert_eq!(view.rank_y(faller) + 1, view.rank_y(riser), "swap pair not adjacent");
        let s2 = self.find_by_level(faller);
        let s1 = self.find_by_level(riser);
        // Set-preserving re-anchor of the riser's segment: the faller is now
        // the lowest point above its level.
        if let Some(i1) = s1 {
            debug_assert!(
                s2.is_none() || s2 == Some(i1.wrapping_sub(1)),
                "adjacent level anchors must belong to consecutive segments"
            );
            self.segs[i1].level = faller;
        }
        if let Some(i2) = s2 {
            let (riser_right, faller_right) = match self.erank(view, i2) {
                Some(er) => (view.rank_x(riser) >= er, view.rank_x(faller) >= er),
                None => (false, false),
            };
            if riser_right && faller_right {
                // Both beyond the right end: the anchors trade places and so
                // does the one Dom slot.
                self.segs[i2].level = riser;
                self.dom_remove_if_present(i2, faller);
                self.dom_insert_if(view, i2, riser);
            } else if riser_right {
                // The faller leaves the above-set; the level re-anchors to
                // the next point up so the right count stays put.
                let fi = view.rank_y(faller);
                assert!(fi + 2 < view.len(), "re-anchor target above a live level must exist");
                let q = view.at_y(fi + 2);
                self.dom_remove_if_present(i2, faller);
                if i2 > 0 && self.segs[i2 - 1].level == q {
                    self.delete_segment(view, i2);
                } else {
                    self.segs[i2].level = q;
                }
            } else if s1.is_some() {
                // Corner: the riser anchors the next segment, whose level
                // just took the faller; the only level left for this
                // segment is the riser. If the faller counted toward the
                // right endpoint the count dropped by one — restore it.
                self.segs[i2].level = riser;
                self.dom_remove_if_present(i2, faller);
                self.dom_insert_if(view, i2, riser);
                if faller_right {
                    self.worklist.push_back(Task::RestoreRight(riser));
                }
            } else {
                // Level follows the faller down; the riser joins its
                // above-set and possibly its Dom.
                self.dom_insert_if(view, i2, riser);
            }
        }
        self.settle(view);
    }

    /// Handles an adjacent x swap (post-swap view): `riser` now sits one x
    /// rank right of `faller`. Only start anchors react, mirroring
    /// [`Boundary::on_y_swap`] with the roles of the axes exchanged.
    pub fn on_x_swap(&mut self, view: &impl RankView, riser: PointId, faller: PointId) {
        if self.segs.is_empty() {
            return;
        }
        debug_assert_eq!(view.rank_x(faller) + 1, view.rank_x(riser), "swap pair not adjacent");
        let h = self.find_by_first(faller);
        let g1 = self.find_by_first(riser);
        if let Some(i1) = g1 {
            debug_assert!(
                h.is_none() || h == Some(i1 + 1),
                "adjacent start anchors must belong to consecutive segments"
            );
            self.segs[i1].first = Some(faller);
        }
        if let Some(ih) = h {
            assert!(ih > 0, "the leftmost segment has no start anchor");
            let is = ih - 1;
            let level_s = view.rank_y(self.segs[is].level);
            let riser_tall = view.rank_y(riser) >= level_s;
            let faller_tall = view.rank_y(faller) >= level_s;
            if riser_tall && faller_tall {
                self.segs[ih].first = Some(riser);
                self.dom_remove_if_present(ih, faller);
                self.dom_insert_if(view, ih, riser);
            } else if riser_tall {
                // The faller leaves the right-endpoint region; the start
                // re-anchors one rank right so the count stays put.
                let fj = view.rank_x(faller);
                assert!(fj + 2 < view.len(), "re-anchor target right of a live start must exist");
                let q = view.at_x(fj + 2);
                self.dom_remove_if_present(ih, faller);
                if ih + 1 < self.segs.len() && self.segs[ih + 1].first == Some(q) {
                    self.delete_segment(view, ih);
                } else {
                    self.segs[ih].first = Some(q);
                    // The pair starting here narrowed by one rank.
                    self.worklist.push_back(Task::CheckGap(self.segs[ih].level));
                }
            } else if g1.is_some() {
                // Corner: the riser anchored the previous segment's start,
                // which just took the faller; this start takes the riser.
                self.segs[ih].first = Some(riser);
                self.dom_remove_if_present(ih, faller);
                self.dom_insert_if(view, ih, riser);
                if faller_tall {
                    self.worklist.push_back(Task::RestoreRight(self.segs[is].level));
                }
            } else {
                // Start follows the faller left; the riser joins the
                // segment's region and possibly its Dom. The pair ending at
                // the left neighbor narrowed by one rank.
                self.dom_insert_if(view, ih, riser);
                if is > 0 {
                    self.worklist.push_back(Task::CheckGap(self.segs[is - 1].level));
                }
            }
        }
        self.settle(view);
    }

    /// A new member entered at x rank 0 (view already contains it). Only
    /// the leftmost segment's region can gain it.
    pub fn on_insert_min_x(&mut self, view: &impl RankView, id: PointId) {
        if self.segs.is_empty() {
            return;
        }
        debug_assert_eq!(view.rank_x(id), 0);
        self.dom_insert_if(view, 0, id);
        self.settle(view);
    }

    /// A new member entered below every y rank (view already contains it).
    /// It sits under every level, so no region changes and pair spans only
    /// grow.
    pub fn on_insert_min_y(&mut self, view: &impl RankView, id: PointId) {
        if self.segs.is_empty() {
            return;
        }
        debug_assert_eq!(view.rank_y(id), 0);
    }

    /// The member at x rank 0 left (view already without it; `old_ry` is
    /// its former y rank). Anchors referencing it re-anchor to the point
    /// that slid into its rank, and the leftmost pair narrowed by one.
    pub fn on_delete_min_x(&mut self, view: &impl RankView, id: PointId, old_ry: usize) {
        if self.segs.is_empty() {
            return;
        }
        if let Some(k) = self.find_by_first(id) {
            // Degenerate but legal: a start anchor at x rank 0. Re-anchor to
            // the next occupant of rank 0, collapsing the segment if the
            // anchor meets the next start.
            self.dom_remove_if_present(k, id);
            let w = view.at_x(0);
            if self.segs.get(k + 1).map_or(false, |s| s.first == Some(w)) {
                self.delete_segment(view, k);
            } else {
                self.segs[k].first = Some(w);
            }
        }
        if let Some(k) = self.find_by_level(id) {
            self.dom_remove_if_present(k, id);
            assert!(old_ry < view.len(), "a level anchor is never the y maximum");
            let q = view.at_y(old_ry);
            if k > 0 && self.segs[k - 1].level == q {
                self.delete_segment(view, k);
            } else {
                self.segs[k].level = q;
            }
        }
        if !self.segs.is_empty() {
            self.dom_remove_if_present(0, id);
            self.worklist.push_back(Task::CheckGap(self.segs[0].level));
        }
        self.settle(view);
    }

    /// The y-minimum member left (view already without it; `old_rx` is its
    /// former x rank). Only the lowest level can be anchored at it; pair
    /// spans containing its old rank narrowed by one.
    pub fn on_delete_min_y(&mut self, view: &impl RankView, id: PointId, old_rx: usize) {
        if self.segs.is_empty() {
            return;
        }
        if let Some(k) = self.find_by_first(id) {
            self.dom_remove_if_present(k, id);
            assert!(old_rx < view.len(), "a start anchor is never the x maximum");
            let w = view.at_x(old_rx);
            if self.segs.get(k + 1).map_or(false, |s| s.first == Some(w)) {
                self.delete_segment(view, k);
            } else {
                self.segs[k].first = Some(w);
            }
        }
        if let Some(k) = self.find_by_level(id) {
            debug_assert_eq!(k + 1, self.segs.len(), "only the lowest level can touch y rank 0");
            self.dom_remove_if_present(k, id);
            let q = view.at_y(0);
            if k > 0 && self.segs[k - 1].level == q {
                self.delete_segment(view, k);
            } else {
                self.segs[k].level = q;
            }
        }
        // Pairs straddling the vanished rank narrowed by one.
        if !self.segs.is_empty() {
            let covering = self
                .segs
                .partition_point(|s| s.first.map_or(0, |f| view.rank_x(f)) <= old_rx)
                .saturating_sub(1);
            if covering > 0 {
                self.worklist.push_back(Task::CheckGap(self.segs[covering - 1].level));
            }
            self.worklist.push_back(Task::CheckGap(self.segs[covering].level));
        }
        self.settle(view);
    }

    /// Drains the repair worklist; every entry re-validates its trigger
    /// against the current state before acting.
    fn settle(&mut self, view: &impl RankView) {
        let cap = 64 * (self.segs.len() + self.worklist.len() + 8);
        let mut iters = 0usize;
        while let Some(task) = self.worklist.pop_front() {
            iters += 1;
            assert!(iters <= cap, "boundary repair worklist failed to settle");
            match task {
                Task::CheckLeft(id) => {
                    if let Some(i) = self.find_by_level(id) {
                        if self.segs[i].dom.len() >= 2 * self.d {
                            self.repair_left(view, i);
                        }
                    }
                }
                Task::CheckGap(id) => {
                    if let Some(i) = self.find_by_level(id) {
                        if i + 1 < self.segs.len()
                            && self.pair_span(view, i) <= self.gap_threshold()
                        {
                            self.repair_gap(view, i);
                        }
                    }
                }
                Task::RestoreRight(id) => {
                    if let Some(i) = self.find_by_level(id) {
                        if self.right_count(view, i).is_some_and(|rc| rc < self.d) {
                            self.restore_right(view, i);
                        }
                    }
                }
            }
        }
    }

    /// Left endpoint of `seg` reached the 2d dominator bound. Raise the
    /// level when the raised right endpoint keeps d dominators, split into
    /// two segments when it would not, and when raising is blocked by the
    /// previous segment's level, shift the shared start right until that
    /// neighbor's right endpoint holds exactly d dominators (possibly
    /// deleting this segment).
    fn repair_left(&mut self, view: &impl RankView, seg: usize) {
        self.stats.left_repairs += 1;
        let d = self.d;
        let t_l = self.t_l;
        let len = self.segs[seg].dom.len();
        debug_assert!(len >= 2 * d);
        let mut by_y: Vec<PointId> = self.segs[seg].dom.clone();
        by_y.sort_unstable_by_key(|&p| view.rank_y(p));
        let m_k = by_y[len - t_l];
        let blocked = seg > 0 && view.rank_y(m_k) >= view.rank_y(self.segs[seg - 1].level);
        if !blocked {
            let w_set = &by_y[len - t_l..];
            debug_assert_eq!(w_set.len(), t_l);
            let er = self.erank(view, seg);
            let beyond = match er {
                Some(er) => w_set.iter().filter(|&&p| view.rank_x(p) >= er).count(),
                None => t_l,
            };
            if beyond >= d {
                // Raise: the lifted left endpoint has t_l dominators and
                // the lifted right endpoint keeps at least d.
                self.stats.raises += 1;
                let dom = w_set.to_vec();
                self.segs[seg].level = m_k;
                self.segs[seg].dom = dom;
            } else {
                // Split: the raised part keeps the old start; the remnant
                // keeps the old level and starts at the d-th x-largest of
                // the raised Dom, so the raised right endpoint has exactly
                // d dominators.
                self.stats.splits += 1;
                let mut by_x: Vec<PointId> = w_set.to_vec();
                by_x.sort_unstable_by_key(|&p| view.rank_x(p));
                let w = by_x[t_l - d];
                assert!(
                    view.rank_x(w) > self.srank(view, seg),
                    "split start must be interior"
                );
                let remnant_dom: Vec<PointId> = self.segs[seg]
                    .dom
                    .iter()
                    .copied()
                    .filter(|&p| view.rank_x(p) >= view.rank_x(w))
                    .collect();
                debug_assert!(remnant_dom.len() >= d && remnant_dom.len() <= t_l);
                let remnant = Seg {
                    level: self.segs[seg].level,
                    first: Some(w),
                    dom: remnant_dom,
                };
                self.segs[seg].level = m_k;
                self.segs[seg].dom = w_set.to_vec();
                self.segs.insert(seg + 1, remnant);
                self.stats.segment_inserts += 1;
                // The new pair and both adjacent pairs need span checks;
                // the split may transiently violate the pair bound, and the
                // follow-up gap repair settles it.
                if seg > 0 {
                    self.worklist.push_back(Task::CheckGap(self.segs[seg - 1].level));
                }
                self.worklist.push_back(Task::CheckGap(self.segs[seg].level));
                self.worklist.push_back(Task::CheckGap(self.segs[seg + 1].level));
            }
        } else {
            // Shift: raising would collide with the previous level. Move
            // the shared start right until the previous segment's right
            // endpoint holds exactly d dominators; past the own right end,
            // the segment vanishes instead.
            assert!(seg > 0, "the leftmost segment always has room to raise");
            self.stats.connector_shifts += 1;
            let prev_level = view.rank_y(self.segs[seg - 1].level);
            let mut c: Vec<PointId> = self.segs[seg]
                .dom
                .iter()
                .copied()
                .filter(|&p| view.rank_y(p) >= prev_level)
                .collect();
            assert!(c.len() >= t_l, "blocked raise implies a crowded previous level");
            c.sort_unstable_by_key(|&p| view.rank_x(p));
            let v_star = c[c.len() - d];
            let vr = view.rank_x(v_star);
            let keep_right = self.erank(view, seg).map_or(true, |er| vr < er);
            if keep_right {
                debug_assert!(vr > self.srank(view, seg));
                self.segs[seg].first = Some(v_star);
                self.segs[seg].dom.retain(|&p| view.rank_x(p) >= vr);
                if self.segs[seg].dom.len() >= 2 * self.d {
                    self.worklist.push_back(Task::CheckLeft(self.segs[seg].level));
                }
                // The pair starting here narrowed.
                self.worklist.push_back(Task::CheckGap(self.segs[seg].level));
            } else {
                self.delete_segment(view, seg);
            }
        }
    }

    /// The pair (seg, seg+1) spans at most half the threshold. Merge it:
    /// extend the left segment right when its Dom is already crowded,
    /// extend the right one left when the widened left endpoint stays
    /// uncrowded, and otherwise rebuild both as one segment at the unique
    /// level giving the merged left endpoint exactly `t_l` dominators.
    fn repair_gap(&mut self, view: &impl RankView, seg: usize) {
        self.stats.gap_repairs += 1;
        let d = self.d;
        let t_l = self.t_l;
        let (ih, is) = (seg, seg + 1);
        if self.segs[ih].dom.len() >= t_l {
            // Extend left segment over the pair: its right endpoint moves to
            // the pair's end and keeps at least t_l - span >= d dominators.
            let survivor_level = self.segs[ih].level;
            self.delete_segment(view, is);
            let i = self.find_by_level(survivor_level).expect("survivor stays");
            debug_assert!(self.right_count(view, i).map_or(true, |rc| rc >= d));
            return;
        }
        // Points in the left segment's start window that dominate the
        // widened left endpoint of the right segment.
        let lo = self.srank(view, ih);
        let hi = self.srank(view, is);
        let level_s = view.rank_y(self.segs[is].level);
        let mut found = Vec::new();
        for r in lo..hi {
            let p = view.at_x(r);
            if view.rank_y(p) >= level_s {
                found.push(p);
            }
        }
        let l_count = self.segs[is].dom.len() + found.len();
        if l_count <= t_l {
            // Extend right segment over the pair.
            let first = self.segs[ih].first;
            self.segs[is].first = first;
            let mut dom = core::mem::take(&mut self.segs[is].dom);
            dom.extend_from_slice(&found);
            self.segs[is].dom = dom;
            let survivor_level = self.segs[is].level;
            self.stats.segment_deletes += 1;
            self.segs.remove(ih);
            let i = self.find_by_level(survivor_level).expect("survivor stays");
            if i > 0 {
                self.worklist.push_back(Task::CheckGap(self.segs[i - 1].level));
            }
            self.worklist.push_back(Task::CheckGap(self.segs[i].level));
        } else {
            // Rebuild: one segment over the merged span, leveled so the new
            // left endpoint has exactly t_l dominators. Its level lands
            // strictly between the two old ones, and the right endpoint
            // keeps at least t_l - span >= d dominators.
            let mut l_set = self.segs[is].dom.clone();
            l_set.extend_from_slice(&found);
            l_set.sort_unstable_by_key(|&p| view.rank_y(p));
            let mu = l_set[l_count - t_l];
            debug_assert!(view.rank_y(mu) < view.rank_y(self.segs[ih].level));
            let dom: Vec<PointId> = l_set[l_count - t_l..].to_vec();
            let g = Seg { level: mu, first: self.segs[ih].first, dom };
            self.segs[ih] = g;
            self.stats.segment_deletes += 1;
            self.segs.remove(is);
            debug_assert!(self.right_count(view, ih).map_or(true, |rc| rc >= d));
            if ih > 0 {
                self.worklist.push_back(Task::CheckGap(self.segs[ih - 1].level));
            }
            self.worklist.push_back(Task::CheckGap(self.segs[ih].level));
        }
    }

    /// Right endpoint of `seg` lost a dominator to a forced corner. Walk
    /// the shared start leftward, pulling members into the region, until
    /// the count is back at d; exhausting the segment's own span deletes
    /// it and hands the deficit to the left neighbor.
    fn restore_right(&mut self, view: &impl RankView, seg: usize) {
        self.stats.restores += 1;
        let d = self.d;
        let mut i = seg;
        let mut steps = 0usize;
        loop {
            steps += 1;
            assert!(steps <= view.len() + 2, "right-count restore failed to settle");
            let Some(rc) = self.right_count(view, i) else { return };
            if rc >= d {
                return;
            }
            let er = self.erank(view, i).expect("checked above");
            if er == 0 {
                // The shared start cannot move further left; the segment's
                // span is exhausted.
                self.delete_segment(view, i);
                return;
            }
            let w = view.at_x(er - 1);
            if self.segs[i].first == Some(w) {
                // The start anchor itself is the only member left of the
                // shared start: the segment vanishes and the left neighbor
                // inherits the deficit check.
                let prev_level = i.checked_sub(1).map(|p| self.segs[p].level);
                self.delete_segment(view, i);
                if let Some(pl) = prev_level {
                    self.worklist.push_back(Task::RestoreRight(pl));
                }
                return;
            }
            self.segs[i + 1].first = Some(w);
            self.dom_insert_if(view, i + 1, w);
            // The pair ending at this segment narrowed.
            if i > 0 {
                self.worklist.push_back(Task::CheckGap(self.segs[i - 1].level));
            }
            let _ = i;
            i = self.find_by_level(self.segs[i].level).expect("unchanged");
        }
    }

    /// Checks every maintained guarantee against the viewed orders:
    /// anchor shape and monotonicity, Dom set equality with the rank-region
    /// dominator sets, the 2d/d endpoint bounds, pair spans, and the
    /// segment-count bound. One descending-x sweep supplies all region
    /// counts.
    pub fn audit(&self, view: &impl RankView) -> AuditReport {
        let mut report = AuditReport::default();
        if self.segs.is_empty() {
            return report;
        }
        let n = view.len();
        let d = self.d;
        let m = self.segs.len();
        for (i, s) in self.segs.iter().enumerate() {
            if (i == 0) != s.first.is_none() {
                report.issues.push(AuditIssue {
                    segment: i,
                    kind: AuditKind::AnchorShape,
                    expected: usize::from(i == 0),
                    actual: usize::from(s.first.is_none()),
                });
            }
        }
        for i in 1..m {
            let prev = self.effective_start(view, i - 1);
            let cur = self.effective_start(view, i);
            if cur <= prev {
                report.issues.push(AuditIssue {
                    segment: i - 1,
                    kind: AuditKind::StartOrder,
                    expected: (prev + 1) as usize,
                    actual: cur as usize,
                });
            }
            let lv_prev = view.rank_y(self.segs[i - 1].level);
            let lv_cur = view.rank_y(self.segs[i].level);
            if lv_cur >= lv_prev {
                report.issues.push(AuditIssue {
                    segment: i - 1,
                    kind: AuditKind::LevelOrder,
                    expected: lv_prev,
                    actual: lv_cur,
                });
            }
        }
        if m >= 8 * n / d {
            report.issues.push(AuditIssue {
                segment: 0,
                kind: AuditKind::SegmentCount,
                expected: 8 * n / d,
                actual: m,
            });
        }
        // Descending-x sweep: when the sweep has marked ranks >= r, the
        // counter holds the y ranks of exactly the members right of any
        // start threshold at r.
        let mut marks = RankCounter::new(n);
        let mut x = n;
        for i in (0..m).rev() {
            let sr = self.srank(view, i);
            while x > sr {
                x -= 1;
                marks.add(view.rank_y(view.at_x(x)), 1);
            }
            let left = marks.count_from(view.rank_y(self.segs[i].level)) as usize;
            if left > 2 * d {
                report.issues.push(AuditIssue {
                    segment: i,
                    kind: AuditKind::LeftCount,
                    expected: 2 * d,
                    actual: left,
                });
            }
            let s = &self.segs[i];
            if s.dom.len() != left {
                report.issues.push(AuditIssue {
                    segment: i,
                    kind: AuditKind::DomCount,
                    expected: left,
                    actual: s.dom.len(),
                });
            }
            let mut seen: Vec<PointId> = s.dom.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                report.issues.push(AuditIssue {
                    segment: i,
                    kind: AuditKind::DomDuplicate,
                    expected: 0,
                    actual: 1,
                });
            }
            let lv = view.rank_y(s.level);
            for &p in &s.dom {
                if view.rank_x(p) < sr || view.rank_y(p) < lv {
                    report.issues.push(AuditIssue {
                        segment: i,
                        kind: AuditKind::DomMember,
                        expected: sr,
                        actual: view.rank_x(p),
                    });
                    break;
                }
            }
            if i + 1 < m {
                // At this checkpoint the marks cover exactly the ranks at
                // or beyond this segment's start, which equals the next
                // segment's... no: the right endpoint of segment i sits at
                // the start of segment i+1, already swept in the previous
                // round. Recompute directly instead.
                let er = self.erank(view, i).expect("not last");
                let right = s.dom.iter().filter(|&&p| view.rank_x(p) >= er).count();
                if right < d {
                    report.issues.push(AuditIssue {
                        segment: i,
                        kind: AuditKind::RightCount,
                        expected: d,
                        actual: right,
                    });
                }
            }
        }
        for i in 0..m.saturating_sub(1) {
            let span = self.pair_span(view, i);
            if span <= self.gap_threshold() {
                report.issues.push(AuditIssue {
                    segment: i,
                    kind: AuditKind::PairSpan,
                    expected: self.gap_threshold() + 1,
                    actual: span,
                });
            }
        }
        report
    }

    /// Start rank with the leftmost segment at a symbolic -1, so audits can
    /// demand strict anchor ordering even when a start anchor reaches
    /// rank 0.
    fn effective_start(&self, view: &impl RankView, seg: usize) -> i64 {
        match self.segs[seg].first {
            None => -1,
            Some(id) => view.rank_x(id) as i64,
        }
    }

    #[cfg(test)]
    fn corrupt_dom_for_test(&mut self, seg: usize, replace_with: PointId) {
        let dom = &mut self.segs[seg].dom;
        dom[0] = replace_with;
    }
}
