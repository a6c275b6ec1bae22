//! Embedded curves and proper arcs on handle surfaces.
//!
//! A curve is a cyclically reduced cyclic word of signed 1-handle traversals;
//! an arc is a linearly reduced word with endpoints pinned to the boundary.
//! All geometry is recomputed canonically from the words:
//!
//! * strand order inside each attachment slot comes from a divergence-order
//!   comparator (strands are ordered by where their forward itineraries first
//!   split, with one order reversal per disk-chord or band transit — parallel
//!   chords in a disk nest, and an untwisted band reverses boundary order);
//! * on-surface crossings are exactly the interleaved chord pairs in the
//!   cyclic boundary order refined by strand ranks;
//! * rotation numbers are exact quarter-turn counts: a chord's turning
//!   contribution is isotopy-invariant rel endpoints (all embedded arcs in a
//!   disk rel endpoints are isotopic), so it is computed along a
//!   boundary-following representative; handle traversals preserve the
//!   tangent direction and contribute nothing.

use std::collections::HashMap;
use std::sync::Arc as StdArc;

use crate::surface::{BItem, End, HandleSpec, HandleSurface, Style};
use crate::word::{self, Lit};

/// Global sign convention for on-surface crossings, fixed by Q(α1, β) = +1 on
/// the standard three-holed torus model (see tests).
const CROSS_SIGN: i64 = -1;

/// Global sign convention for the wrap crossing of a vertical-handle strand
/// with a horizontal-handle strand (the two bands cross once "around the
/// back"); fixed by the linking-data checkpoints of the T-block fibration.
pub const WRAP_SIGN: i64 = -1;

/// How a curve was built; used for the independent rotation-number recursion.
#[derive(Clone, Debug)]
pub enum Derivation {
    Base,
    Twist { about: StdArc<Curve>, of: StdArc<Curve>, sign: i8 },
    RMod { of: StdArc<Curve>, delta: i8 },
    BandSum { a: StdArc<Curve>, b: StdArc<Curve> },
}

/// An oriented simple closed curve carried as a cyclically reduced traversal
/// word. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Curve {
    pub surface: StdArc<HandleSurface>,
    pub word: Vec<Lit>,
    pub name: Option<String>,
    pub derivation: Derivation,
}

/// One end of a proper arc, pinned to the boundary immediately before or
/// after a slot (enough for cocore push-off arcs, which is all the filling
/// machinery needs). `sub` separates multiple ends anchored at the same spot.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ArcEnd {
    pub handle: usize,
    pub end: End,
    pub before: bool,
    pub sub: i32,
}

/// An embedded proper arc with endpoints pinned to the boundary.
#[derive(Clone, Debug)]
pub struct ProperArc {
    pub surface: StdArc<HandleSurface>,
    pub word: Vec<Lit>,
    pub start: ArcEnd,
    pub finish: ArcEnd,
    pub name: Option<String>,
}

impl Curve {
    pub fn base(surface: StdArc<HandleSurface>, word: Vec<Lit>, name: &str) -> Curve {
        let w = word::cyclic_reduce(&word);
        assert!(!w.is_empty(), "a curve word must be essential");
        Curve { surface, word: w, name: Some(name.to_string()), derivation: Derivation::Base }
    }

    /// Signed traversal counts per 1-handle: entry k equals Q(curve, τ_k).
    pub fn homology(&self) -> Vec<i64> {
        let mut h = vec![0i64; self.surface.handles.len()];
        for l in &self.word {
            h[l.handle] += l.sign as i64;
        }
        h
    }

    pub fn reversed(&self) -> Curve {
        Curve {
            surface: self.surface.clone(),
            word: word::inverse_word(&self.word),
            name: self.name.as_ref().map(|n| format!("-{n}")),
            derivation: Derivation::Base,
        }
    }

    /// Reinterpret on an extended surface (old handle ids are stable).
    pub fn on(&self, surface: StdArc<HandleSurface>) -> Curve {
        assert!(surface.handles.len() >= self.surface.handles.len());
        Curve { surface, ..self.clone() }
    }
}

impl ProperArc {
    pub fn homology(&self) -> Vec<i64> {
        let mut h = vec![0i64; self.surface.handles.len()];
        for l in &self.word {
            h[l.handle] += l.sign as i64;
        }
        h
    }

    /// Net winding count around the anchor handles, derived from the word
    /// (how often the reduced word crosses the cocore the arc starts at).
    pub fn boundary_winding(&self) -> (i64, i64) {
        let at = |e: &ArcEnd| {
            self.word.iter().filter(|l| l.handle == e.handle).map(|l| l.sign as i64).sum()
        };
        (at(&self.start), at(&self.finish))
    }

    pub fn on(&self, surface: StdArc<HandleSurface>) -> ProperArc {
        assert!(surface.handles.len() >= self.surface.handles.len());
        ProperArc { surface, ..self.clone() }
    }
}

/// Oriented isotopy: same free homotopy class (simple closed curves in one
/// free homotopy class are isotopic).
pub fn is_isotopic(c: &Curve, d: &Curve) -> bool {
    debug_assert!(c.surface.handles.len() == d.surface.handles.len());
    word::cyclic_eq(&c.word, &d.word)
}

pub fn is_isotopic_unoriented(c: &Curve, d: &Curve) -> bool {
    word::cyclic_eq_unoriented(&c.word, &d.word)
}

pub fn arcs_equal(a: &ProperArc, b: &ProperArc) -> bool {
    a.start == b.start && a.finish == b.finish && a.word == b.word
}

// ---------------------------------------------------------------------------
// Diagram: canonical strand order and crossing enumeration
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
enum Role {
    In,
    Out,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
enum WDir {
    Fwd,
    Bwd,
}

/// A strand germ: occurrence `t` of object `obj` occupying a slot in the
/// given role (In = entering the disk, Out = leaving it).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
struct Germ {
    obj: usize,
    t: usize,
    role: Role,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
struct GermState {
    obj: usize,
    t: usize,
    role: Role,
    dir: WDir,
}

/// Cyclic boundary position: slot items sit at odd stations 2i+1, the gap
/// after item i at station (2i+2) mod 2n; `rank` refines within a station.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Pos {
    station: i64,
    rank: i64,
}

enum StepTarget {
    Slot(usize),
    EndPt(Pos),
}

/// Result of a joint two-strand walk: either a divergence (with the
/// chord-transit distance, the order verdict transported back to the start
/// slot, and a slot-independent identifier of the divergence event) or a
/// closed-up parallel pair with its anchor-tie verdict.
enum WalkOutcome {
    Diverged {
        weighted: u64,
        verdict: bool,
        key: ((GermState, Pos), (GermState, Pos)),
    },
    Periodic {
        verdict: bool,
    },
}

/// One reference object in a diagram.
pub enum Obj<'a> {
    Closed(&'a Curve),
    Open(&'a ProperArc),
}

impl<'a> Obj<'a> {
    fn word(&self) -> &[Lit] {
        match self {
            Obj::Closed(c) => &c.word,
            Obj::Open(a) => &a.word,
        }
    }
    fn is_arc(&self) -> bool {
        matches!(self, Obj::Open(_))
    }
}

/// An on-surface crossing between chord `ta` of object `a` and chord `tb` of
/// object `b`, with its orientation sign (a first).
#[derive(Clone, Copy, Debug)]
pub struct SurfCrossing {
    pub a: usize,
    pub ta: usize,
    pub b: usize,
    pub tb: usize,
    pub sign: i64,
}

/// A wrap crossing between a vertical-handle strand and a horizontal-handle
/// strand ("around the back" of the diagram); `va`/`hb` are letter indices.
#[derive(Clone, Copy, Debug)]
pub struct WrapCrossing {
    pub a: usize,
    pub va: usize,
    pub b: usize,
    pub hb: usize,
    pub sign: i64,
}

struct ObjData {
    word: Vec<Lit>,
    is_arc: bool,
    /// Per letter: (out slot item, in slot item).
    slots: Vec<(usize, usize)>,
    start_pos: Option<Pos>,
    end_pos: Option<Pos>,
}

/// Canonical minimal-position layout of a family of curves/arcs: strand ranks
/// in every slot plus chord endpoint positions.
pub struct Diagram {
    n_items: usize,
    objs: Vec<ObjData>,
    rank: HashMap<Germ, i64>,
}

fn arc_end_pos(s: &HandleSurface, e: &ArcEnd) -> Pos {
    let n = s.boundary().len() as i64;
    let idx = s.slot_index(e.handle, e.end) as i64;
    if e.before {
        // In the gap before the slot item; larger rank = closer to the slot.
        Pos { station: (2 * idx).rem_euclid(2 * n), rank: i64::MAX / 2 - e.sub as i64 }
    } else {
        Pos { station: (2 * idx + 2).rem_euclid(2 * n), rank: i64::MIN / 2 + e.sub as i64 }
    }
}

impl Diagram {
    pub fn new(surface: &HandleSurface, objs: &[Obj]) -> Diagram {
        let n_items = surface.boundary().len();
        let data: Vec<ObjData> = objs
            .iter()
            .map(|o| {
                let w = o.word().to_vec();
                let slots = w
                    .iter()
                    .map(|l| {
                        let (a, b) =
                            (surface.slot_index(l.handle, End::A), surface.slot_index(l.handle, End::B));
                        if l.sign > 0 {
                            (a, b) // positive traversal: exit at A, enter at B
                        } else {
                            (b, a)
                        }
                    })
                    .collect();
                let (sp, ep) = match o {
                    Obj::Closed(_) => (None, None),
                    Obj::Open(a) => (
                        Some(arc_end_pos(surface, &a.start)),
                        Some(arc_end_pos(surface, &a.finish)),
                    ),
                };
                ObjData { word: w, is_arc: o.is_arc(), slots, start_pos: sp, end_pos: ep }
            })
            .collect();

        let mut d = Diagram { n_items, objs: data, rank: HashMap::new() };
        d.sort_slots();
        d
    }

    fn out_item(&self, obj: usize, t: usize) -> usize {
        self.objs[obj].slots[t].0
    }

    fn in_item(&self, obj: usize, t: usize) -> usize {
        self.objs[obj].slots[t].1
    }

    fn germ_item(&self, g: Germ) -> usize {
        match g.role {
            Role::Out => self.out_item(g.obj, g.t),
            Role::In => self.in_item(g.obj, g.t),
        }
    }

    /// Walk one contact further into the disk. Returns the contacted target
    /// and the successor state (None when an arc end is reached).
    fn step(&self, s: GermState) -> (StepTarget, Option<GermState>) {
        let o = &self.objs[s.obj];
        let l = o.word.len();
        match (s.role, s.dir) {
            (Role::In, WDir::Fwd) => {
                // chord forward: in_slot(t) -> out_slot(t+1)
                if o.is_arc && s.t + 1 == l {
                    (StepTarget::EndPt(o.end_pos.unwrap()), None)
                } else {
                    let t2 = (s.t + 1) % l;
                    (
                        StepTarget::Slot(self.out_item(s.obj, t2)),
                        Some(GermState { t: t2, role: Role::Out, ..s }),
                    )
                }
            }
            (Role::Out, WDir::Fwd) => {
                // band forward: out_slot(t) -> in_slot(t)
                (
                    StepTarget::Slot(self.in_item(s.obj, s.t)),
                    Some(GermState { role: Role::In, ..s }),
                )
            }
            (Role::Out, WDir::Bwd) => {
                // chord backward: out_slot(t) -> in_slot(t-1)
                if o.is_arc && s.t == 0 {
                    (StepTarget::EndPt(o.start_pos.unwrap()), None)
                } else {
                    let t2 = (s.t + l - 1) % l;
                    (
                        StepTarget::Slot(self.in_item(s.obj, t2)),
                        Some(GermState { t: t2, role: Role::In, ..s }),
                    )
                }
            }
            (Role::In, WDir::Bwd) => {
                // band backward: in_slot(t) -> out_slot(t)
                (
                    StepTarget::Slot(self.out_item(s.obj, s.t)),
                    Some(GermState { role: Role::Out, ..s }),
                )
            }
        }
    }

    fn target_pos(&self, t: &StepTarget) -> Pos {
        match t {
            StepTarget::Slot(i) => Pos { station: 2 * *i as i64 + 1, rank: 0 },
            StepTarget::EndPt(p) => *p,
        }
    }

    /// Counterclockwise distance key of `x` from slot item `p` (never zero
    /// station-wise for valid chord targets, except same-slot continuations
    /// which are filtered out by the caller).
    fn ccw_key(&self, p: usize, x: Pos) -> (i64, i64) {
        let m = 2 * self.n_items as i64;
        let d = (x.station - (2 * p as i64 + 1)).rem_euclid(m);
        (d, x.rank)
    }

    /// Joint walk of two strand germs starting at a common slot. Steps both
    /// through shared contacts until they diverge (or the joint walk closes
    /// up, for fully parallel closed strands). The divergence verdict is
    /// transported back to the start slot with one order reversal per shared
    /// contact (parallel strands reverse order through every disk chord and
    /// every band).
    fn walk_compare(&self, a0: GermState, b0: GermState, start: usize) -> WalkOutcome {
        let mut s1 = Some(a0);
        let mut s2 = Some(b0);
        let mut cur = start;
        let mut flips: u64 = 0;
        // Chord transits only; distances measured this way agree at the two
        // ends of a band, which pins forced crossings inside disk chords.
        let mut weighted: u64 = 0;
        let mut trail: Vec<(GermState, GermState)> = vec![(a0, b0)];
        let mut seen: HashMap<(GermState, GermState), usize> = HashMap::new();
        seen.insert((a0, b0), 0);
        loop {
            let st1 = s1.unwrap();
            let st2 = s2.unwrap();
            let (t1, n1) = self.step(st1);
            let (t2, n2) = self.step(st2);
            let same_slot = matches!((&t1, &t2), (StepTarget::Slot(i), StepTarget::Slot(j)) if i == j);
            if !same_slot {
                // Divergence. The germ whose target is ccw-nearer from the
                // current slot sits ccw-later there (non-crossing chords from
                // nearby points to two targets must nest).
                let p1 = self.target_pos(&t1);
                let p2 = self.target_pos(&t2);
                let k1 = self.ccw_key(cur, p1);
                let k2 = self.ccw_key(cur, p2);
                debug_assert_ne!(k1, k2, "distinct germs must diverge to distinct targets");
                let later_here = k1 < k2;
                let e1 = (st1, p1);
                let e2 = (st2, p2);
                return WalkOutcome::Diverged {
                    weighted,
                    verdict: later_here ^ (flips % 2 == 1),
                    key: (e1.min(e2), e1.max(e2)),
                };
            }
            let is_chord = matches!(
                (st1.role, st1.dir),
                (Role::In, WDir::Fwd) | (Role::Out, WDir::Bwd)
            );
            if is_chord {
                weighted += 1;
            }
            // Advance both through the shared contact.
            cur = match t1 {
                StepTarget::Slot(i) => i,
                _ => unreachable!(),
            };
            s1 = n1;
            s2 = n2;
            flips += 1;
            let js = (s1.unwrap(), s2.unwrap());
            if let Some(&first) = seen.get(&js) {
                // Closed up with no divergence: parallel strands. Anchor the
                // tie at the minimal contact of the cycle and transport the
                // verdict back with one flip per step so parallel strands
                // nest instead of crossing.
                debug_assert_eq!(first, 0, "curve walks are purely periodic");
                let sym = |p: &(GermState, GermState)| {
                    let x = (p.0.obj, p.0.t, p.0.role, p.0.dir);
                    let y = (p.1.obj, p.1.t, p.1.role, p.1.dir);
                    (x.min(y), x.max(y))
                };
                let anchor = (0..trail.len()).min_by_key(|&k| sym(&trail[k])).unwrap();
                let (g1, g2) = trail[anchor];
                let v = (g1.obj, g1.t, g1.role, g1.dir) > (g2.obj, g2.t, g2.role, g2.dir);
                return WalkOutcome::Periodic { verdict: v ^ (anchor % 2 == 1) };
            }
            seen.insert(js, trail.len());
            trail.push(js);
        }
    }

    /// Divergence-order comparator for two distinct germs in the same slot.
    /// Returns true when `a` sits counterclockwise-later than `b` along the
    /// slot interval.
    ///
    /// Both strands are followed into the disk and out through the band;
    /// whichever direction diverges after fewer chord transits decides the
    /// order (nearest-divergence rule). When the distances tie, the verdict
    /// of the lexicographically smaller divergence event is adopted — a
    /// slot-independent choice, so all slots along a shared sub-path agree
    /// and each forced crossing materializes in exactly one disk chord.
    fn germ_later(&self, a: Germ, b: Germ) -> bool {
        let inward = |g: Germ| GermState {
            obj: g.obj,
            t: g.t,
            role: g.role,
            dir: if g.role == Role::In { WDir::Fwd } else { WDir::Bwd },
        };
        let outward = |g: Germ| GermState {
            obj: g.obj,
            t: g.t,
            role: g.role,
            dir: if g.role == Role::In { WDir::Bwd } else { WDir::Fwd },
        };
        let item = self.germ_item(a);
        debug_assert_eq!(item, self.germ_item(b));
        match self.walk_compare(inward(a), inward(b), item) {
            WalkOutcome::Periodic { verdict } => verdict,
            WalkOutcome::Diverged { weighted: wi, verdict: vi, key: ki } => {
                match self.walk_compare(outward(a), outward(b), item) {
                    WalkOutcome::Periodic { .. } => vi,
                    WalkOutcome::Diverged { weighted: wo, verdict: vo, key: ko } => {
                        if wi < wo {
                            vi
                        } else if wo < wi {
                            vo
                        } else if ki <= ko {
                            vi
                        } else {
                            vo
                        }
                    }
                }
            }
        }
    }

    fn sort_slots(&mut self) {
        // Group strands by handle. Only the order at the handle's A-side
        // slot is decided by the comparator; the B-side order is its exact
        // reverse, which is what an untwisted planar band forces. Deriving
        // one side from the other keeps the two slot orders consistent even
        // where the heuristic comparator fails to be transitive, so the
        // layout always describes a genuine planar diagram with no hidden
        // crossings inside a band.
        let mut per_handle: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
        for (oi, o) in self.objs.iter().enumerate() {
            for (t, _) in o.word.iter().enumerate() {
                per_handle.entry(o.word[t].handle).or_default().push((oi, t));
            }
        }
        // A positive traversal exits at the A-side slot, a negative one
        // enters there.
        let role_at_a = |objs: &[ObjData], (oi, t): (usize, usize)| {
            if objs[oi].word[t].sign > 0 {
                Role::Out
            } else {
                Role::In
            }
        };
        let mut orders: Vec<Vec<(usize, usize)>> = Vec::new();
        for (_, strands) in per_handle.iter() {
            // Insertion sort with the divergence comparator (strict order).
            let mut sorted: Vec<(usize, usize)> = Vec::with_capacity(strands.len());
            for &s in strands {
                let g = Germ { obj: s.0, t: s.1, role: role_at_a(&self.objs, s) };
                let mut i = sorted.len();
                while i > 0 {
                    let p = sorted[i - 1];
                    let gp = Germ { obj: p.0, t: p.1, role: role_at_a(&self.objs, p) };
                    if self.germ_later(gp, g) {
                        i -= 1;
                    } else {
                        break;
                    }
                }
                sorted.insert(i, s);
            }
            orders.push(sorted);
        }
        for sorted in orders {
            let n = sorted.len();
            for (r, &(oi, t)) in sorted.iter().enumerate() {
                let (ra, rb) = if self.objs[oi].word[t].sign > 0 {
                    (Role::Out, Role::In)
                } else {
                    (Role::In, Role::Out)
                };
                self.rank.insert(Germ { obj: oi, t, role: ra }, r as i64);
                self.rank.insert(Germ { obj: oi, t, role: rb }, (n - 1 - r) as i64);
            }
        }
    }

    fn germ_pos(&self, g: Germ) -> Pos {
        let item = self.germ_item(g);
        Pos { station: 2 * item as i64 + 1, rank: *self.rank.get(&g).unwrap() }
    }

    /// Endpoint positions of chord `t` of object `obj` (oriented from..to)
    /// together with the word gap the chord feeds for twist insertions.
    fn chord(&self, obj: usize, t: usize) -> (Pos, Pos, usize) {
        let o = &self.objs[obj];
        let l = o.word.len();
        if o.is_arc {
            // chords 0..=l: 0 = start..out(0), j = in(j-1)..out(j), l = in(l-1)..end
            let from = if t == 0 {
                o.start_pos.unwrap()
            } else {
                self.germ_pos(Germ { obj, t: t - 1, role: Role::In })
            };
            let to = if t == l {
                o.end_pos.unwrap()
            } else {
                self.germ_pos(Germ { obj, t, role: Role::Out })
            };
            (from, to, t)
        } else {
            // chord t: in(t) .. out(t+1), feeding gap (t+1) mod l
            let from = self.germ_pos(Germ { obj, t, role: Role::In });
            let to = self.germ_pos(Germ { obj, t: (t + 1) % l, role: Role::Out });
            (from, to, (t + 1) % l)
        }
    }

    fn chord_count(&self, obj: usize) -> usize {
        let l = self.objs[obj].word.len();
        if self.objs[obj].is_arc {
            l + 1
        } else {
            l
        }
    }

    /// Offset of `x` counterclockwise after reference position `a` (both on
    /// the cyclic boundary); used for interleaving tests.
    fn offset_from(&self, a: Pos, x: Pos) -> (i64, i64) {
        let m = 2 * self.n_items as i64;
        if x.station == a.station {
            if x.rank > a.rank {
                (0, x.rank)
            } else {
                (m, x.rank)
            }
        } else {
            ((x.station - a.station).rem_euclid(m), x.rank)
        }
    }

    /// All on-surface crossings between objects `a` and `b` (a == b gives
    /// self-crossings, which vanish for embedded curves). Signs use `a` as
    /// the first factor of the orientation frame.
    pub fn surface_crossings(&self, a: usize, b: usize) -> Vec<SurfCrossing> {
        let mut out = Vec::new();
        for ta in 0..self.chord_count(a) {
            let (a1, a2, _) = self.chord(a, ta);
            let tb_range: Box<dyn Iterator<Item = usize>> = if a == b {
                Box::new(ta + 1..self.chord_count(b))
            } else {
                Box::new(0..self.chord_count(b))
            };
            for tb in tb_range {
                let (b1, b2, _) = self.chord(b, tb);
                let oa2 = self.offset_from(a1, a2);
                let ob1 = self.offset_from(a1, b1);
                let ob2 = self.offset_from(a1, b2);
                let in1 = ob1 < oa2;
                let in2 = ob2 < oa2;
                if in1 != in2 {
                    // pattern (a1, b1, a2, b2) -> +CROSS_SIGN, else reversed
                    let sign = if in1 { CROSS_SIGN } else { -CROSS_SIGN };
                    out.push(SurfCrossing { a, ta, b, tb, sign });
                }
            }
        }
        out
    }

    /// Wrap crossings between the handle-band strands of `a` and `b`. Band
    /// strands run outside the 0-handle disk; two strands cross exactly when
    /// their endpoint pairs interleave on the disk boundary circle, which for
    /// the diagonal chain layout happens precisely for a vertical and a
    /// horizontal handle on the same rectangle (strands of the same handle
    /// nest, and any cross-rectangle pair has both endpoints of one strand
    /// inside the same complementary interval of the other). The crossing
    /// sign follows the band layering — vertical bands pass over horizontal
    /// ones — so it depends only on the traversal directions. For a == b
    /// each unordered pair is listed once.
    pub fn wrap_crossings(&self, surface: &HandleSurface, a: usize, b: usize) -> Vec<WrapCrossing> {
        let mut out = Vec::new();
        let spec = |l: &Lit| surface.handles[l.handle];
        let wa = &self.objs[a].word;
        let wb = &self.objs[b].word;
        for (ia, la) in wa.iter().enumerate() {
            for (ib, lb) in wb.iter().enumerate() {
                if a == b && ia >= ib {
                    continue;
                }
                if spec(la).rect != spec(lb).rect {
                    continue;
                }
                let (v, h, vi, hi, swapped) = match (spec(la).style, spec(lb).style) {
                    (Style::Vertical, Style::Horizontal) => (la, lb, ia, ib, false),
                    (Style::Horizontal, Style::Vertical) => (lb, la, ib, ia, true),
                    _ => continue,
                };
                let sign = WRAP_SIGN * v.sign as i64 * h.sign as i64;
                if swapped {
                    out.push(WrapCrossing { a: b, va: vi, b: a, hb: hi, sign });
                } else {
                    out.push(WrapCrossing { a, va: vi, b, hb: hi, sign });
                }
            }
        }
        out
    }

    /// Strand orders at the two slots of handle `h`'s band: the strands
    /// (object, letter) sorted by rank at the exit slot and at the entry
    /// slot. A planar band layout requires one order to be the reverse of
    /// the other.
    pub fn band_orders(
        &self,
        surface: &HandleSurface,
        h: usize,
    ) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let slot_a = surface.slot_index(h, End::A);
        let mut side_a: Vec<(i64, (usize, usize))> = Vec::new();
        let mut side_b: Vec<(i64, (usize, usize))> = Vec::new();
        for (oi, o) in self.objs.iter().enumerate() {
            for (t, l) in o.word.iter().enumerate() {
                if l.handle != h {
                    continue;
                }
                // A positive traversal exits at slot A; a negative one
                // enters there.
                let role_at_a = if l.sign > 0 { Role::Out } else { Role::In };
                let role_at_b = if l.sign > 0 { Role::In } else { Role::Out };
                let ga = Germ { obj: oi, t, role: role_at_a };
                let gb = Germ { obj: oi, t, role: role_at_b };
                debug_assert_eq!(self.germ_item(ga), slot_a);
                side_a.push((*self.rank.get(&ga).unwrap(), (oi, t)));
                side_b.push((*self.rank.get(&gb).unwrap(), (oi, t)));
            }
        }
        side_a.sort();
        side_b.sort();
        (
            side_a.into_iter().map(|p| p.1).collect(),
            side_b.into_iter().map(|p| p.1).collect(),
        )
    }

    /// Geometric intersection number (minimal position on-surface crossings).
    pub fn geometric_intersection(&self, a: usize, b: usize) -> usize {
        self.surface_crossings(a, b).len()
    }

    /// Signed sum of on-surface crossings (equals the homological pairing).
    pub fn algebraic_intersection(&self, a: usize, b: usize) -> i64 {
        self.surface_crossings(a, b).iter().map(|c| c.sign).sum()
    }
}

// ---------------------------------------------------------------------------
// Intersection pairing
// ---------------------------------------------------------------------------

/// Geometric algebraic intersection number Q(c, d).
pub fn algebraic_intersection(c: &Curve, d: &Curve) -> i64 {
    let dg = Diagram::new(&c.surface, &[Obj::Closed(c), Obj::Closed(d)]);
    dg.algebraic_intersection(0, 1)
}

/// Geometric intersection number i(c, d) in minimal position.
pub fn geometric_intersection(c: &Curve, d: &Curve) -> usize {
    let dg = Diagram::new(&c.surface, &[Obj::Closed(c), Obj::Closed(d)]);
    dg.geometric_intersection(0, 1)
}

/// H1 intersection pairing matrix: J[k][l] = Q(core_k, core_l).
pub fn pairing_matrix(s: &StdArc<HandleSurface>) -> Vec<Vec<i64>> {
    let n = s.handles.len();
    let cores: Vec<Curve> = (0..n)
        .map(|k| Curve::base(s.clone(), vec![Lit::new(k, 1)], &format!("core{k}")))
        .collect();
    let mut j = vec![vec![0i64; n]; n];
    for k in 0..n {
        for l in 0..n {
            if k != l {
                j[k][l] = algebraic_intersection(&cores[k], &cores[l]);
            }
        }
    }
    j
}

/// Q via the homological pairing (bilinear oracle for the geometric count).
pub fn pairing_q(j: &[Vec<i64>], hc: &[i64], hd: &[i64]) -> i64 {
    let mut q = 0;
    for (k, row) in j.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            q += hc[k] * v * hd[l];
        }
    }
    q
}

// ---------------------------------------------------------------------------
// Rotation numbers
// ---------------------------------------------------------------------------

/// Rotation number from the canonical layout: sum over chords of
/// (corner turns along the boundary-following representative − 2), divided
/// by four quarter-turns.
pub fn rotation_by_layout(s: &HandleSurface, w: &[Lit]) -> i64 {
    if w.is_empty() {
        return 0;
    }
    let b = s.boundary();
    let n = b.len();
    let l = w.len();
    let mut total: i64 = 0;
    for t in 0..l {
        let lt = w[t];
        let ln = w[(t + 1) % l];
        let p = if lt.sign > 0 {
            s.slot_index(lt.handle, End::B)
        } else {
            s.slot_index(lt.handle, End::A)
        };
        let q = if ln.sign > 0 {
            s.slot_index(ln.handle, End::A)
        } else {
            s.slot_index(ln.handle, End::B)
        };
        debug_assert_ne!(p, q);
        let mut k = (p + 1) % n;
        let mut corners = 0i64;
        while k != q {
            if let BItem::Corner(c) = b[k] {
                corners += c;
            }
            k = (k + 1) % n;
        }
        total += corners - 2;
    }
    assert!(total % 4 == 0, "turning count must be a whole number of turns");
    total / 4
}

/// Rotation number by the derivation-tree recursion
/// r(t_C^±(D)) = r(D) ± Q(C, D)·r(C); base curves use the layout value.
pub fn rotation_by_derivation(c: &Curve) -> i64 {
    match &c.derivation {
        Derivation::Base | Derivation::BandSum { .. } => rotation_by_layout(&c.surface, &c.word),
        Derivation::Twist { about, of, sign } => {
            rotation_by_derivation(of)
                + (*sign as i64) * algebraic_intersection(about, of) * rotation_by_derivation(about)
        }
        Derivation::RMod { of, delta } => rotation_by_derivation(of) + *delta as i64,
    }
}

/// Rotation number; the layout turning number and the derivation recursion
/// must agree (disagreement is a hard internal-consistency error).
pub fn rotation_number(c: &Curve) -> i64 {
    let by_layout = rotation_by_layout(&c.surface, &c.word);
    let by_rec = rotation_by_derivation(c);
    assert_eq!(
        by_layout, by_rec,
        "rotation mismatch for {:?}: layout {} vs recursion {}",
        c.name, by_layout, by_rec
    );
    by_layout
}

// ---------------------------------------------------------------------------
// Dehn twist surgery
// ---------------------------------------------------------------------------

/// Word of `about` rotated to start just after chord `i`, raised to `power`
/// (±1): the detour a twisted strand makes at a crossing on that chord.
fn detour(about: &[Lit], i: usize, power: i64) -> Vec<Lit> {
    let l = about.len();
    let fwd: Vec<Lit> = (0..l).map(|k| about[(i + 1 + k) % l]).collect();
    if power > 0 {
        fwd
    } else {
        word::inverse_word(&fwd)
    }
}

/// Crossings on one target chord, ordered from the chord's start endpoint
/// (disjoint chords of the twisting curve cut the target chord in nesting
/// order).
fn order_crossings_on_chord(
    dg: &Diagram,
    about_obj: usize,
    target_from: Pos,
    xs: &mut Vec<(usize, i64)>, // (about-chord index, sign)
) {
    xs.sort_by(|&(e1, _), &(e2, _)| {
        if e1 == e2 {
            return std::cmp::Ordering::Equal;
        }
        let (f1, t1, _) = dg.chord(about_obj, e1);
        let (f2, _, _) = dg.chord(about_obj, e2);
        // e1 comes first iff the target start and e2 lie on opposite sides
        // of chord e1.
        let oa = dg.offset_from(f1, t1);
        let side = |p: Pos| dg.offset_from(f1, p) < oa;
        let first = side(target_from) != side(f2);
        if first {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    });
}

fn twisted_word(
    dg: &Diagram,
    about: &Curve,
    target_word: &[Lit],
    target_is_arc: bool,
    sign: i8,
) -> Vec<Lit> {
    // Objects in dg: 0 = about, 1 = target.
    let crossings = dg.surface_crossings(0, 1);
    let n_gaps = if target_is_arc { target_word.len() + 1 } else { target_word.len() };
    let mut per_gap: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n_gaps.max(1)];
    let mut gap_from: Vec<Option<Pos>> = vec![None; n_gaps.max(1)];
    for x in &crossings {
        let (from, _, gap) = dg.chord(1, x.tb);
        per_gap[gap].push((x.ta, x.sign));
        gap_from[gap] = Some(from);
    }
    for (gap, xs) in per_gap.iter_mut().enumerate() {
        if xs.len() > 1 {
            order_crossings_on_chord(dg, 0, gap_from[gap].unwrap(), xs);
        }
    }
    let mut out: Vec<Lit> = Vec::new();
    for g in 0..n_gaps {
        for &(about_chord, s) in &per_gap[g] {
            out.extend(detour(&about.word, about_chord, sign as i64 * s));
        }
        if g < target_word.len() {
            out.push(target_word[g]);
        }
    }
    if target_is_arc {
        word::reduce(&out)
    } else {
        word::cyclic_reduce(&out)
    }
}

/// Dehn twist t_about^sign applied to a curve. Right-handed for sign = +1.
pub fn dehn_twist(about: &Curve, of: &Curve, sign: i8) -> Curve {
    assert!(sign == 1 || sign == -1);
    let dg = Diagram::new(&about.surface, &[Obj::Closed(about), Obj::Closed(of)]);
    let w = twisted_word(&dg, about, &of.word, false, sign);
    let c = Curve {
        surface: of.surface.clone(),
        word: w,
        name: None,
        derivation: Derivation::Twist {
            about: StdArc::new(about.clone()),
            of: StdArc::new(of.clone()),
            sign,
        },
    };
    // Homology transvection invariant [t_c^±(d)] = [d] ± Q(c,d)[c].
    let q = dg.algebraic_intersection(0, 1);
    let hc = about.homology();
    let hd = of.homology();
    let hn = c.homology();
    for k in 0..hn.len() {
        let want = hd.get(k).copied().unwrap_or(0) + sign as i64 * q * hc.get(k).copied().unwrap_or(0);
        assert_eq!(hn[k], want, "twist broke the homology transvection law");
    }
    c
}

/// Dehn twist applied to a proper arc (endpoints stay pinned).
pub fn dehn_twist_arc(about: &Curve, of: &ProperArc, sign: i8) -> ProperArc {
    assert!(sign == 1 || sign == -1);
    let dg = Diagram::new(&about.surface, &[Obj::Closed(about), Obj::Open(of)]);
    let w = twisted_word(&dg, about, &of.word, true, sign);
    ProperArc {
        surface: of.surface.clone(),
        word: w,
        start: of.start,
        finish: of.finish,
        name: None,
    }
}

// ---------------------------------------------------------------------------
// R-modifications
// ---------------------------------------------------------------------------

/// Requested rotation effect of an R-modification.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RVariant {
    Plus,
    Minus,
    Generic,
}

pub struct RModResult {
    pub surface: StdArc<HandleSurface>,
    pub curve: Curve,
    pub auxiliary: Curve,
    pub new_handle: usize,
}

/// Apply an R-modification to `c`: attach a fresh rectangle (boundary-summed
/// to the 0-handle) carrying one new vertical 1-handle, let E be its core,
/// and band-sum `c` with a parallel copy of E. The fresh rectangle keeps E
/// disjoint from every pre-existing curve, so any protected-curve list is
/// satisfied automatically. For the ± variants the insertion gap and sign are
/// searched so that r(C') = r(C) ± 1 exactly.
pub fn r_modification(
    c: &Curve,
    variant: RVariant,
    protected: &[&Curve],
) -> Result<RModResult, String> {
    let h = c.homology();
    if variant != RVariant::Generic && h.iter().all(|&x| x == 0) {
        return Err("R±-modification needs a homologically non-trivial curve".to_string());
    }
    let base = &c.surface;
    let r0 = rotation_by_layout(base, &c.word);
    let want: &[i64] = match variant {
        RVariant::Plus => &[1],
        RVariant::Minus => &[-1],
        RVariant::Generic => &[1, -1],
    };
    // The fresh rectangle can join either end of the 0-handle chain; the two
    // positions flip the sense of the detour's turning, which is what makes
    // both rotation changes reachable.
    for chain_pos in [base.rect_count, 0] {
        let s2 = base
            .with_rect_inserted(chain_pos)
            .and_then(|s| {
                s.extended(HandleSpec { style: Style::Vertical, rect: chain_pos, pos: 500 })
            })
            .map_err(|e| e.to_string())?;
        let s2 = StdArc::new(s2);
        let k = s2.handles.len() - 1;
        let aux = Curve::base(s2.clone(), vec![Lit::new(k, 1)], &format!("E{k}"));
        for gap in 0..c.word.len() {
            for sgn in [1i8, -1i8] {
                let mut w = c.word.clone();
                w.insert(gap, Lit::new(k, sgn));
                let w = word::cyclic_reduce(&w);
                let r1 = rotation_by_layout(&s2, &w);
                let delta = r1 - r0;
                if want.contains(&delta) {
                    let cc = Curve {
                        surface: s2.clone(),
                        word: w,
                        name: None,
                        derivation: Derivation::RMod {
                            of: StdArc::new(c.clone()),
                            delta: delta as i8,
                        },
                    };
                    // E must stay disjoint from the modified curve's parent
                    // and any protected curves; the fresh rectangle
                    // guarantees it, checked here exactly.
                    for p in protected.iter() {
                        let pp = p.on(s2.clone());
                        assert_eq!(geometric_intersection(&aux, &pp), 0);
                    }
                    assert_eq!(geometric_intersection(&aux, &c.on(s2.clone())), 0);
                    assert!(aux.homology().iter().any(|&x| x != 0));
                    assert!(cc.homology().iter().any(|&x| x != 0) || h.iter().all(|&x| x == 0));
                    return Ok(RModResult {
                        surface: s2,
                        curve: cc,
                        auxiliary: aux,
                        new_handle: k,
                    });
                }
            }
        }
    }
    Err("no insertion realizes the requested rotation change".to_string())
}

/// Band sum of two curves on the same surface (words concatenated at the
/// canonical gap); homology is additive.
pub fn band_sum(a: &Curve, b: &Curve) -> Curve {
    let mut w = a.word.clone();
    w.extend_from_slice(&b.word);
    Curve {
        surface: a.surface.clone(),
        word: word::cyclic_reduce(&w),
        name: None,
        derivation: Derivation::BandSum {
            a: StdArc::new(a.clone()),
            b: StdArc::new(b.clone()),
        },
    }
}
