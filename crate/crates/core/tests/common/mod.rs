//! Shared helpers for the integration tests.
#![allow(dead_code)]

use cycleframe::graphs::{Cycle, Decomposition, PartialFactor, Vertex};
use rand::Rng;

/// Single edits that must turn a valid decomposition into an invalid one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit {
    /// Swap two neighbouring vertices of a cycle, moving its edges.
    SwapNeighbours,
    /// Replace one vertex of a cycle by a different vertex.
    Retarget,
    /// Delete a cycle.
    DeleteCycle,
    /// Copy a cycle into another factor.
    DuplicateCycle,
    /// Move a cycle into another factor.
    MoveCycle,
    /// Change the hole of a factor.
    RelabelHole,
}

pub const EDITS: [Edit; 6] =
    [Edit::SwapNeighbours, Edit::Retarget, Edit::DeleteCycle, Edit::DuplicateCycle, Edit::MoveCycle, Edit::RelabelHole];

/// Applies `edit` at random positions. `None` when the edit cannot even be
/// represented (a cycle with a repeated vertex), which counts as detected.
pub fn mutate(d: &Decomposition, edit: Edit, u: u32, g: u32, rng: &mut impl Rng) -> Option<Decomposition> {
    let mut out = d.clone();
    let fi = rng.gen_range(0..out.factors.len());
    let ci = rng.gen_range(0..out.factors[fi].cycles.len());
    let other = (fi + rng.gen_range(1..out.factors.len())) % out.factors.len();
    let factor = out.factors[fi].clone();
    let mut cycles = factor.cycles.clone();
    match edit {
        Edit::SwapNeighbours => {
            let mut vs = cycles[ci].vertices().to_vec();
            let i = rng.gen_range(0..vs.len());
            let j = (i + 1) % vs.len();
            vs.swap(i, j);
            cycles[ci] = Cycle::new(vs).ok()?;
        }
        Edit::Retarget => {
            let mut vs = cycles[ci].vertices().to_vec();
            let i = rng.gen_range(0..vs.len());
            let old = vs[i];
            let mut new = old;
            while new == old {
                new = Vertex::new(rng.gen_range(0..u), rng.gen_range(0..g));
            }
            vs[i] = new;
            cycles[ci] = Cycle::new(vs).ok()?;
        }
        Edit::DeleteCycle => {
            cycles.remove(ci);
        }
        Edit::DuplicateCycle | Edit::MoveCycle => {
            let c = if edit == Edit::MoveCycle { cycles.remove(ci) } else { cycles[ci].clone() };
            let target = &out.factors[other];
            let mut moved = target.cycles.clone();
            moved.push(c);
            out.factors[other] = PartialFactor::new(target.hole, target.cycle_length, moved);
        }
        Edit::RelabelHole => {
            let hole = factor.hole.expect("built factors have holes");
            let new = (hole + rng.gen_range(1..u)) % u;
            out.factors[fi] = PartialFactor::new(Some(new), factor.cycle_length, cycles);
            return Some(out);
        }
    }
    out.factors[fi] = PartialFactor::new(factor.hole, factor.cycle_length, cycles);
    Some(out)
}
