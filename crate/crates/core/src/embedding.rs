//! Partial injective maps from tree vertices to host vertices, and the
//! validity report certifying containment.

use serde::Serialize;

use crate::bits::VertexSet;
use crate::graph::Graph;
use crate::tree::RootedTree;

#[derive(Clone)]
pub struct PartialEmbedding {
    image: Vec<Option<usize>>,
    used: VertexSet,
}

impl PartialEmbedding {
    pub fn new(tree_vertices: usize, host_vertices: usize) -> Self {
        PartialEmbedding {
            image: vec![None; tree_vertices],
            used: VertexSet::empty(host_vertices),
        }
    }

    /// Maps `tv -> hv`. Panics if either side is already taken; engine phases
    /// rely on this to keep injectivity incremental.
    pub fn place(&mut self, tv: usize, hv: usize) {
        assert!(self.image[tv].is_none(), "tree vertex {tv} placed twice");
        assert!(self.used.insert(hv), "host vertex {hv} used twice");
        self.image[tv] = Some(hv);
    }

    pub fn unplace(&mut self, tv: usize) {
        if let Some(hv) = self.image[tv].take() {
            self.used.remove(hv);
        }
    }

    /// Test-only constructor that accepts arbitrary (possibly invalid) maps.
    pub fn from_images(image: Vec<Option<usize>>, host_vertices: usize) -> Self {
        let mut used = VertexSet::empty(host_vertices);
        for hv in image.iter().flatten() {
            used.insert(*hv);
        }
        PartialEmbedding { image, used }
    }

    #[inline]
    pub fn image_of(&self, tv: usize) -> Option<usize> {
        self.image[tv]
    }

    #[inline]
    pub fn used(&self) -> &VertexSet {
        &self.used
    }

    pub fn placed_count(&self) -> usize {
        self.image.iter().filter(|i| i.is_some()).count()
    }

    pub fn is_total(&self) -> bool {
        self.image.iter().all(|i| i.is_some())
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.image
    }

    /// Total image as a plain vector; panics when not total.
    pub fn to_total_vec(&self) -> Vec<usize> {
        self.image
            .iter()
            .map(|i| i.expect("total embedding"))
            .collect()
    }
}

impl std::fmt::Debug for PartialEmbedding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map()
            .entries(
                self.image
                    .iter()
                    .enumerate()
                    .filter_map(|(tv, hv)| hv.map(|h| (tv, h))),
            )
            .finish()
    }
}

/// Everything wrong with an embedding. An empty report on a total embedding
/// certifies containment of the tree in the host.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    /// Pairs of tree vertices sharing a host image.
    pub duplicate_images: Vec<(usize, usize)>,
    /// Tree edges whose mapped endpoints are not adjacent in the host.
    pub missing_edges: Vec<(usize, usize)>,
    /// Tree vertices without an image.
    pub unmapped: Vec<usize>,
}

impl ValidationReport {
    /// No violations among the mapped part.
    pub fn is_valid(&self) -> bool {
        self.duplicate_images.is_empty() && self.missing_edges.is_empty()
    }

    /// Valid and total: certifies `T ⊆ G`.
    pub fn certifies_containment(&self) -> bool {
        self.is_valid() && self.unmapped.is_empty()
    }
}

pub fn validate_embedding(g: &Graph, t: &RootedTree, e: &PartialEmbedding) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut owner: Vec<Option<usize>> = vec![None; g.vertex_count()];
    for tv in 0..t.vertex_count() {
        match e.image_of(tv) {
            None => report.unmapped.push(tv),
            Some(hv) => {
                if hv >= g.vertex_count() {
                    // Out-of-range images cannot certify anything; flag as a
                    // missing edge target via duplicates channel is wrong, so
                    // treat them as unmapped.
                    report.unmapped.push(tv);
                    continue;
                }
                if let Some(prev) = owner[hv] {
                    report.duplicate_images.push((prev, tv));
                } else {
                    owner[hv] = Some(tv);
                }
            }
        }
    }
    for (u, v) in t.edges() {
        if let (Some(hu), Some(hv)) = (e.image_of(u), e.image_of(v)) {
            if hu < g.vertex_count() && hv < g.vertex_count() && hu != hv && !g.has_edge(hu, hv) {
                report.missing_edges.push((u, v));
            }
        }
    }
    report
}
