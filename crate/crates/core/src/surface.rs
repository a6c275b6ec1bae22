//! Handle-decomposed oriented surfaces with boundary.
//!
//! A surface is a planar 0-handle (a chain of axis-aligned rectangles joined
//! into a disk by planar bands) plus 1-handles attached either vertically or
//! horizontally:
//!
//! * a vertical handle joins a TOP-edge slot to a BOTTOM-edge slot at the same
//!   x-coordinate; traversing it preserves the tangent direction (north);
//! * a horizontal handle joins a RIGHT-edge slot to a LEFT-edge slot at the
//!   same y-coordinate; traversal direction east.
//!
//! Rectangles are placed on a NE diagonal with disjoint x- and y-ranges, so a
//! handle's "wrap" path never passes over another rectangle. The boundary of
//! the 0-handle disk is kept as a cyclic item list (slots and ±90° corners);
//! all curve combinatorics and rotation numbers are computed from it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::word::Lit;

/// Compass direction. The plane orientation is the standard one; `left` is a
/// +90° (counterclockwise) turn.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    pub fn left(self) -> Dir {
        match self {
            Dir::N => Dir::W,
            Dir::W => Dir::S,
            Dir::S => Dir::E,
            Dir::E => Dir::N,
        }
    }

    pub fn right(self) -> Dir {
        self.left().left().left()
    }

    pub fn opposite(self) -> Dir {
        self.left().left()
    }

    /// Signed quarter turns from `self` to `to`: 0 (same) or ±1.
    /// U-turns never occur in valid layouts and are a hard error.
    pub fn quarter_turn_to(self, to: Dir) -> i64 {
        if self == to {
            0
        } else if self.left() == to {
            1
        } else if self.right() == to {
            -1
        } else {
            panic!("degenerate U-turn in layout: {:?} -> {:?}", self, to);
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Style {
    Vertical,
    Horizontal,
}

/// The two ends of a 1-handle. Positive traversal exits the disk at the A slot
/// and re-enters at the B slot (vertical: A on top, B on bottom, direction
/// north; horizontal: A on right, B on left, direction east).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum End {
    A,
    B,
}

/// One 1-handle: style, carrying rectangle, and the shared coordinate of its
/// two feet (x for vertical, y for horizontal), relative to the rectangle.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HandleSpec {
    pub style: Style,
    pub rect: usize,
    pub pos: i64,
}

/// Boundary item on the 0-handle disk, in counterclockwise cyclic order.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BItem {
    /// ±1 quarter turn of the disk boundary.
    Corner(i64),
    /// Attachment interval of one end of a 1-handle. `edge_dir` is the ccw
    /// direction of the disk boundary along the slot's edge.
    Slot { handle: usize, end: End, edge_dir: Dir },
}

/// Allowed relative coordinate ranges for slots. The excluded margins keep
/// slots clear of the rectangle-joining bands, so handle wrap paths never hit
/// the 0-handle (see module docs).
pub const VSLOT_MIN: i64 = 150;
pub const VSLOT_MAX: i64 = 950;
pub const HSLOT_MIN: i64 = 50;
pub const HSLOT_MAX: i64 = 850;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("surface must have at least one rectangle")]
    NoRectangles,
    #[error("handle {0} refers to rectangle {1}, but only {2} exist")]
    BadRect(usize, usize, usize),
    #[error("handle {0} position {1} outside the allowed slot range")]
    BadPosition(usize, i64),
    #[error("handles {0} and {1} have colliding attachment intervals")]
    SlotCollision(usize, usize),
}

/// A compact oriented surface with boundary, as a 0-handle disk plus
/// 1-handles. Immutable after construction.
#[derive(Clone, Debug)]
pub struct HandleSurface {
    pub rect_count: usize,
    pub handles: Vec<HandleSpec>,
    boundary: Vec<BItem>,
    /// Per handle: boundary indices of its A and B slots.
    slot_idx: Vec<(usize, usize)>,
    /// Boundary components of the surface, each as the traversal word of its
    /// parallel push-off (a boundary-parallel curve word).
    comps: Vec<Vec<Lit>>,
    /// For each boundary gap (between items i and i+1), the index of the
    /// boundary component it lies on.
    gap_comp: Vec<usize>,
    genus: usize,
}

impl HandleSurface {
    pub fn new(rect_count: usize, handles: Vec<HandleSpec>) -> Result<Self, SurfaceError> {
        if rect_count == 0 {
            return Err(SurfaceError::NoRectangles);
        }
        for (i, h) in handles.iter().enumerate() {
            if h.rect >= rect_count {
                return Err(SurfaceError::BadRect(i, h.rect, rect_count));
            }
            let (lo, hi) = match h.style {
                Style::Vertical => (VSLOT_MIN, VSLOT_MAX),
                Style::Horizontal => (HSLOT_MIN, HSLOT_MAX),
            };
            if h.pos < lo || h.pos > hi {
                return Err(SurfaceError::BadPosition(i, h.pos));
            }
            for (j, g) in handles.iter().enumerate().take(i) {
                // Slot intervals have small width; require distinct coordinates
                // for same-style handles on the same rectangle.
                if g.rect == h.rect && g.style == h.style && g.pos == h.pos {
                    return Err(SurfaceError::SlotCollision(j, i));
                }
            }
        }
        let boundary = derive_boundary(rect_count, &handles);
        let mut slot_idx = vec![(usize::MAX, usize::MAX); handles.len()];
        for (i, item) in boundary.iter().enumerate() {
            if let BItem::Slot { handle, end, .. } = item {
                match end {
                    End::A => slot_idx[*handle].0 = i,
                    End::B => slot_idx[*handle].1 = i,
                }
            }
        }
        let (comps, gap_comp) = trace_components(&boundary, &slot_idx);
        let chi = 1i64 - handles.len() as i64;
        let b = comps.len() as i64;
        let two_g = 2 - b - chi;
        assert!(two_g >= 0 && two_g % 2 == 0, "inconsistent boundary trace");
        Ok(HandleSurface {
            rect_count,
            handles,
            boundary,
            slot_idx,
            comps,
            gap_comp,
            genus: (two_g / 2) as usize,
        })
    }

    pub fn boundary(&self) -> &[BItem] {
        &self.boundary
    }

    pub fn slot_index(&self, handle: usize, end: End) -> usize {
        let (a, b) = self.slot_idx[handle];
        match end {
            End::A => a,
            End::B => b,
        }
    }

    pub fn edge_dir(&self, item: usize) -> Dir {
        match self.boundary[item] {
            BItem::Slot { edge_dir, .. } => edge_dir,
            BItem::Corner(_) => panic!("not a slot"),
        }
    }

    /// Euler characteristic.
    pub fn chi(&self) -> i64 {
        1 - self.handles.len() as i64
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary_count(&self) -> usize {
        self.comps.len()
    }

    /// Push-off words of the boundary components (boundary-parallel curves).
    pub fn boundary_words(&self) -> &[Vec<Lit>] {
        &self.comps
    }

    /// Boundary component on which the gap after boundary item `i` lies.
    pub fn gap_component(&self, i: usize) -> usize {
        self.gap_comp[i]
    }

    /// New surface with one more 1-handle (old handle ids are preserved,
    /// the new handle gets the next id).
    pub fn extended(&self, spec: HandleSpec) -> Result<Self, SurfaceError> {
        let mut handles = self.handles.clone();
        handles.push(spec);
        Self::new(self.rect_count, handles)
    }

    /// New surface with one more rectangle appended to the diagonal chain.
    pub fn with_extra_rect(&self) -> Result<Self, SurfaceError> {
        Self::new(self.rect_count + 1, self.handles.clone())
    }

    /// New surface with an extra rectangle inserted at chain position `pos`
    /// (0 = SW end). Handle ids are preserved; rectangle indices at or after
    /// `pos` shift up by one.
    pub fn with_rect_inserted(&self, pos: usize) -> Result<Self, SurfaceError> {
        assert!(pos <= self.rect_count);
        let handles = self
            .handles
            .iter()
            .map(|h| HandleSpec { rect: h.rect + (h.rect >= pos) as usize, ..*h })
            .collect();
        Self::new(self.rect_count + 1, handles)
    }
}

/// Build the cyclic ccw boundary item list of the 0-handle disk.
///
/// Rectangle i+1 sits NE of rectangle i, joined by an L-shaped band from the
/// top part of i's right edge to the west part of i+1's bottom edge. Band
/// attachments are reflex corners (−1); the band has one convex outer elbow
/// (+1) on its outgoing side and one reflex inner elbow (−1) on the return.
fn derive_boundary(rect_count: usize, handles: &[HandleSpec]) -> Vec<BItem> {
    let mut out = Vec::new();
    emit_chain(0, rect_count, handles, &mut out);
    debug_assert_eq!(
        out.iter()
            .map(|it| if let BItem::Corner(t) = it { *t } else { 0 })
            .sum::<i64>(),
        4,
        "disk boundary must make one full ccw turn"
    );
    out
}

fn emit_chain(i: usize, rect_count: usize, handles: &[HandleSpec], out: &mut Vec<BItem>) {
    let mut vert: Vec<(i64, usize)> = handles
        .iter()
        .enumerate()
        .filter(|(_, h)| h.rect == i && h.style == Style::Vertical)
        .map(|(k, h)| (h.pos, k))
        .collect();
    vert.sort();
    let mut horiz: Vec<(i64, usize)> = handles
        .iter()
        .enumerate()
        .filter(|(_, h)| h.rect == i && h.style == Style::Horizontal)
        .map(|(k, h)| (h.pos, k))
        .collect();
    horiz.sort();

    // Bottom edge, heading E: B slots of vertical handles, x ascending.
    for &(_, k) in &vert {
        out.push(BItem::Slot { handle: k, end: End::B, edge_dir: Dir::E });
    }
    out.push(BItem::Corner(1)); // SE
    // Right edge, heading N: A slots of horizontal handles, y ascending.
    for &(_, k) in &horiz {
        out.push(BItem::Slot { handle: k, end: End::A, edge_dir: Dir::N });
    }
    if i + 1 < rect_count {
        out.push(BItem::Corner(-1)); // right edge -> band south side
        out.push(BItem::Corner(1)); // band outer elbow (E -> N)
        out.push(BItem::Corner(-1)); // band -> next rect's bottom edge
        emit_chain(i + 1, rect_count, handles, out);
        out.push(BItem::Corner(-1)); // next rect's bottom edge -> band west side
        out.push(BItem::Corner(-1)); // band inner elbow (S -> W)
        out.push(BItem::Corner(-1)); // band north side -> right edge
    }
    out.push(BItem::Corner(1)); // NE
    // Top edge, heading W: A slots of vertical handles, x descending.
    for &(_, k) in vert.iter().rev() {
        out.push(BItem::Slot { handle: k, end: End::A, edge_dir: Dir::W });
    }
    out.push(BItem::Corner(1)); // NW
    // Left edge, heading S: B slots of horizontal handles, y descending.
    for &(_, k) in horiz.iter().rev() {
        out.push(BItem::Slot { handle: k, end: End::B, edge_dir: Dir::S });
    }
    out.push(BItem::Corner(1)); // SW
}

/// Walk the surface boundary. Returns the boundary components (as push-off
/// traversal words) and the component index of every boundary gap.
fn trace_components(
    boundary: &[BItem],
    slot_idx: &[(usize, usize)],
) -> (Vec<Vec<Lit>>, Vec<usize>) {
    let n = boundary.len();
    let mut gap_comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<Lit>> = Vec::new();

    let slot_items: Vec<usize> = (0..n)
        .filter(|&i| matches!(boundary[i], BItem::Slot { .. }))
        .collect();
    if slot_items.is_empty() {
        // Disk: a single boundary component with an empty word.
        return (vec![vec![]], vec![0; n]);
    }

    let mut entered = vec![false; n];
    for &start in &slot_items {
        if entered[start] {
            continue;
        }
        let comp = comps.len();
        let mut word = Vec::new();
        let mut at = start; // a slot item we are about to enter (walking ccw)
        loop {
            entered[at] = true;
            let (handle, end) = match boundary[at] {
                BItem::Slot { handle, end, .. } => (handle, end),
                _ => unreachable!(),
            };
            // Jump through the band: the push-off crosses the cocore.
            word.push(Lit::new(handle, if end == End::A { 1 } else { -1 }));
            let partner = match end {
                End::A => slot_idx[handle].1,
                End::B => slot_idx[handle].0,
            };
            // Resume walking ccw just after the partner slot.
            let mut j = partner;
            loop {
                gap_comp[j] = comp;
                j = (j + 1) % n;
                if matches!(boundary[j], BItem::Slot { .. }) {
                    break;
                }
            }
            at = j;
            if at == start {
                break;
            }
        }
        comps.push(word);
    }
    // Corner-to-corner gaps in slotless stretches belong to the component
    // that walks over them; all gaps are covered by the loops above except
    // when a component has no slots, which cannot happen here.
    debug_assert!(gap_comp.iter().all(|&c| c != usize::MAX));
    (comps, gap_comp)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn s_hat_like() -> HandleSurface {
        HandleSurface::new(
            1,
            vec![
                HandleSpec { style: Style::Vertical, rect: 0, pos: 300 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 500 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 700 },
                HandleSpec { style: Style::Horizontal, rect: 0, pos: 400 },
            ],
        )
        .unwrap()
    }

    #[test]
    fn disk_is_a_disk() {
        let d = HandleSurface::new(1, vec![]).unwrap();
        assert_eq!(d.genus(), 0);
        assert_eq!(d.boundary_count(), 1);
        assert_eq!(d.chi(), 1);
    }

    #[test]
    fn genus_one_three_holes() {
        let s = s_hat_like();
        assert_eq!(s.chi(), -3);
        assert_eq!(s.genus(), 1);
        assert_eq!(s.boundary_count(), 3);
    }

    #[test]
    fn annulus_from_one_vertical_handle() {
        let s = HandleSurface::new(
            1,
            vec![HandleSpec { style: Style::Vertical, rect: 0, pos: 500 }],
        )
        .unwrap();
        assert_eq!(s.genus(), 0);
        assert_eq!(s.boundary_count(), 2);
    }

    #[test]
    fn torus_with_hole() {
        let s = HandleSurface::new(
            1,
            vec![
                HandleSpec { style: Style::Vertical, rect: 0, pos: 500 },
                HandleSpec { style: Style::Horizontal, rect: 0, pos: 400 },
            ],
        )
        .unwrap();
        assert_eq!(s.genus(), 1);
        assert_eq!(s.boundary_count(), 1);
    }

    #[test]
    fn boundary_words_sum_to_zero_homology() {
        let s = s_hat_like();
        let mut h = vec![0i64; s.handles.len()];
        for w in s.boundary_words() {
            for l in w {
                h[l.handle] += l.sign as i64;
            }
        }
        assert!(h.iter().all(|&x| x == 0));
    }

    #[test]
    fn extension_changes_b_or_g_by_one() {
        let s = s_hat_like();
        let e = s
            .extended(HandleSpec { style: Style::Vertical, rect: 0, pos: 400 })
            .unwrap();
        let same_b = e.boundary_count() == s.boundary_count() + 1 && e.genus() == s.genus();
        let same_g = e.boundary_count() + 1 == s.boundary_count() && e.genus() == s.genus() + 1;
        assert!(same_b || same_g);
    }

    #[test]
    fn collision_rejected() {
        let r = HandleSurface::new(
            1,
            vec![
                HandleSpec { style: Style::Vertical, rect: 0, pos: 500 },
                HandleSpec { style: Style::Vertical, rect: 0, pos: 500 },
            ],
        );
        assert!(matches!(r, Err(SurfaceError::SlotCollision(0, 1))));
    }

    #[test]
    fn two_rect_disk() {
        let d = HandleSurface::new(2, vec![]).unwrap();
        assert_eq!(d.genus(), 0);
        assert_eq!(d.boundary_count(), 1);
    }
}
