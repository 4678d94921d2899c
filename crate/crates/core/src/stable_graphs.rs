//! One-edge stable graphs and forgetful stabilization.
//!
//! A one-edge graph indexes a boundary divisor of the moduli space of
//! stable curves: either a nonseparating node (one vertex of genus g-1
//! with n legs and a loop) or a separating node (two vertices with
//! genera summing to g and legs partitioning the markings). Factor
//! labels follow the gluing maps: factor 1 carries its legs in ascending
//! marking order with the node last, factor 2 carries the node first
//! followed by its legs in ascending order.

use std::fmt;

use crate::error::{Error, Result};
use crate::topft::{is_stable, require_stable};

/// Nonseparating boundary divisor of the space of genus-g curves with n
/// markings: the vertex has genus g-1, n legs and two half-edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct IrrGraph {
    pub g: usize,
    pub n: usize,
}

/// Separating boundary divisor: vertices (g1, s1) and (g2, s2) with
/// g1+g2 = g and s1 ⊔ s2 = {1..n}. Leg sets are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SepGraph {
    pub g: usize,
    pub n: usize,
    pub g1: usize,
    pub s1: Vec<usize>,
    pub g2: usize,
    pub s2: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum OneEdgeGraph {
    Irr(IrrGraph),
    Sep(SepGraph),
}

impl fmt::Display for IrrGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "irr(g={}, n={})", self.g, self.n)
    }
}

impl fmt::Display for SepGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sep(g1={}, s1={:?} | g2={}, s2={:?})",
            self.g1, self.s1, self.g2, self.s2
        )
    }
}

impl fmt::Display for OneEdgeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OneEdgeGraph::Irr(g) => g.fmt(f),
            OneEdgeGraph::Sep(g) => g.fmt(f),
        }
    }
}

impl SepGraph {
    pub fn new(g1: usize, s1: Vec<usize>, g2: usize, s2: Vec<usize>, n: usize) -> Result<SepGraph> {
        let mut s1 = s1;
        let mut s2 = s2;
        s1.sort_unstable();
        s2.sort_unstable();
        let mut all: Vec<usize> = s1.iter().chain(s2.iter()).copied().collect();
        all.sort_unstable();
        if all != (1..=n).collect::<Vec<_>>() {
            return Err(Error::BadGraph {
                reason: format!("legs {s1:?} | {s2:?} do not partition 1..={n}"),
            });
        }
        let graph = SepGraph {
            g: g1 + g2,
            n,
            g1,
            s1,
            g2,
            s2,
        };
        if !graph.vertices_stable() {
            return Err(Error::BadGraph {
                reason: format!("vertex of {graph} is unstable"),
            });
        }
        Ok(graph)
    }

    pub fn vertices_stable(&self) -> bool {
        is_stable(self.g1, self.s1.len() + 1) && is_stable(self.g2, self.s2.len() + 1)
    }

    /// Number of markings of the factor-i moduli space (legs plus node).
    pub fn factor_size(&self, factor: usize) -> usize {
        match factor {
            1 => self.s1.len() + 1,
            _ => self.s2.len() + 1,
        }
    }

    /// Swap the two vertices; the result indexes the same divisor.
    pub fn swapped(&self) -> SepGraph {
        SepGraph {
            g: self.g,
            n: self.n,
            g1: self.g2,
            s1: self.s2.clone(),
            g2: self.g1,
            s2: self.s1.clone(),
        }
    }

    /// Label of the node marking on the given factor.
    pub fn node_label(&self, factor: usize) -> usize {
        match factor {
            1 => self.s1.len() + 1,
            _ => 1,
        }
    }

    /// Label of an ambient marking inside the factor that carries it.
    /// Factor 1 lists its legs first (ascending), factor 2 lists the node
    /// first and then its legs (ascending).
    pub fn local_label(&self, factor: usize, marking: usize) -> Option<usize> {
        let legs = if factor == 1 { &self.s1 } else { &self.s2 };
        let rank = legs.iter().position(|&x| x == marking)?;
        Some(match factor {
            1 => rank + 1,
            _ => rank + 2,
        })
    }

    fn orient(self) -> SepGraph {
        let keep = match self.g1.cmp(&self.g2) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => {
                // Tie: the side holding the smallest marking goes first.
                match (self.s1.first(), self.s2.first()) {
                    (Some(&x), Some(&y)) => x < y,
                    (Some(_), None) => true,
                    (None, Some(_)) => false,
                    (None, None) => true,
                }
            }
        };
        if keep {
            self
        } else {
            self.swapped()
        }
    }
}

/// All one-edge graphs into the space of genus-g curves with n markings:
/// the nonseparating graph (when g >= 1) and every separating graph up
/// to the vertex swap, oriented smaller genus first with ties broken by
/// the side holding the smallest marking.
pub fn enumerate_one_edge_graphs(g: usize, n: usize) -> Result<Vec<OneEdgeGraph>> {
    require_stable(g, n)?;
    let mut out = Vec::new();
    if g >= 1 {
        out.push(OneEdgeGraph::Irr(IrrGraph { g, n }));
    }
    let mut seps = Vec::new();
    for g1 in 0..=g / 2 {
        let g2 = g - g1;
        for bits in 0..(1usize << n) {
            let s1: Vec<usize> = (1..=n).filter(|&k| bits & (1 << (k - 1)) != 0).collect();
            let s2: Vec<usize> = (1..=n).filter(|&k| bits & (1 << (k - 1)) == 0).collect();
            if !is_stable(g1, s1.len() + 1) || !is_stable(g2, s2.len() + 1) {
                continue;
            }
            let graph = SepGraph {
                g,
                n,
                g1,
                s1,
                g2,
                s2,
            }
            .orient();
            if !seps.contains(&graph) {
                seps.push(graph);
            }
        }
    }
    seps.sort();
    out.extend(seps.into_iter().map(OneEdgeGraph::Sep));
    Ok(out)
}

/// Outcome of composing a separating gluing map with a forgetful map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContractionResult {
    /// Exactly one vertex was contracted and the survivor maps
    /// isomorphically onto the target. `retained` lists the survivor's
    /// local marking labels in the order of the input keep list; a kept
    /// leg on the contracted vertex lands at the survivor's node label.
    Onto { factor: usize, retained: Vec<usize> },
    /// The image stays inside the boundary.
    Boundary,
}

/// Forget the markings outside `keep` and stabilize. A vertex is
/// contracted when it has genus 0 and at most one retained leg (so at
/// most two special points). The image covers the whole target exactly
/// when one vertex contracts and the other has genus h with the m kept
/// markings surviving.
pub fn stabilize_after_forgetting(
    graph: &SepGraph,
    keep: &[usize],
    h: usize,
    m: usize,
) -> Result<ContractionResult> {
    if keep.len() != m {
        return Err(Error::KeepSize { got: keep.len(), m });
    }
    let mut seen = vec![false; graph.n];
    for &marking in keep {
        if marking == 0 || marking > graph.n {
            return Err(Error::InvalidMarking {
                marking,
                n: graph.n,
            });
        }
        if seen[marking - 1] {
            return Err(Error::DuplicateMarking { marking });
        }
        seen[marking - 1] = true;
    }

    let kept_on = |legs: &[usize]| legs.iter().filter(|&&x| keep.contains(&x)).count();
    let contracts_1 = graph.g1 == 0 && kept_on(&graph.s1) <= 1;
    let contracts_2 = graph.g2 == 0 && kept_on(&graph.s2) <= 1;

    let survivor = match (contracts_1, contracts_2) {
        (true, false) => 2,
        (false, true) => 1,
        _ => return Ok(ContractionResult::Boundary),
    };
    let survivor_genus = if survivor == 1 { graph.g1 } else { graph.g2 };
    if survivor_genus != h || !is_stable(h, m) {
        return Ok(ContractionResult::Boundary);
    }

    let retained = keep
        .iter()
        .map(|&marking| {
            graph
                .local_label(survivor, marking)
                .unwrap_or_else(|| graph.node_label(survivor))
        })
        .collect();
    Ok(ContractionResult::Onto {
        factor: survivor,
        retained,
    })
}

/// Composing the nonseparating gluing map with any forgetful map lands
/// in the boundary: a nonseparating node never stabilizes away. Named so
/// the minimality-vanishing rule is explicit and testable.
pub fn q_image_is_boundary(g: usize, n: usize, _h: usize, _keep: &[usize]) -> bool {
    debug_assert!(g >= 1 && is_stable(g, n));
    true
}
