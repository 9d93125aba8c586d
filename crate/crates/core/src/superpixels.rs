//! SLIC superpixels on a three-channel false-color image.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::cube::PixelMatrix;
use crate::grid::Geometry;
use crate::math::{round, sqrt};
use crate::{Error, Result};

const UNASSIGNED: usize = usize::MAX;

/// Partition of the pixels into spatially connected segments `1..=E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationMap {
    assignments: Vec<u32>,
    sizes: Vec<usize>,
}

impl SegmentationMap {
    /// Validates labels in `1..=E` where every segment id is used.
    pub fn from_labels(assignments: Vec<u32>) -> Result<Self> {
        let e = assignments.iter().copied().max().unwrap_or(0) as usize;
        let mut sizes = vec![0usize; e];
        for &a in &assignments {
            if a == 0 {
                return Err(Error::param("segment ids start at 1"));
            }
            sizes[a as usize - 1] += 1;
        }
        if sizes.contains(&0) {
            return Err(Error::EmptySegment);
        }
        Ok(Self { assignments, sizes })
    }

    /// Everything in one segment.
    pub fn single(n: usize) -> Self {
        Self {
            assignments: vec![1; n],
            sizes: vec![n],
        }
    }

    pub fn assignments(&self) -> &[u32] {
        &self.assignments
    }

    pub fn segments(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Ascending pixel indices of segment `e` (1-based id).
    pub fn segment_indices(&self, e: usize) -> Result<Vec<usize>> {
        if e == 0 || e > self.segments() {
            return Err(Error::UnknownSegment(e));
        }
        let mut idx = Vec::with_capacity(self.sizes[e - 1]);
        idx.extend(
            self.assignments
                .iter()
                .enumerate()
                .filter(|(_, &a)| a as usize == e)
                .map(|(j, _)| j),
        );
        Ok(idx)
    }

    /// Index lists of all segments in ascending id order, in one pass.
    pub fn all_segment_indices(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (j, &a) in self.assignments.iter().enumerate() {
            out[a as usize - 1].push(j);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicParams {
    pub segments: usize,
    pub compactness: f64,
    pub iterations: usize,
}

impl SlicParams {
    pub fn new(segments: usize) -> Self {
        Self {
            segments,
            compactness: 10.0,
            iterations: 10,
        }
    }
}

#[derive(Clone, Copy)]
struct Center {
    color: [f64; 3],
    y: f64,
    x: f64,
}

/// Segments a `3 × N` image (channels in `[0, 1]`) into roughly
/// `params.segments` compact, 4-connected superpixels.
pub fn slic(image: &PixelMatrix, params: &SlicParams) -> Result<SegmentationMap> {
    if image.dim() != 3 {
        return Err(Error::dim("SLIC expects a three-channel image"));
    }
    let g = image.geometry();
    let n = g.len();
    let e = params.segments;
    if e == 0 || e > n {
        return Err(Error::param(alloc::format!(
            "cannot make {e} segments from {n} pixels"
        )));
    }
    if !(params.compactness > 0.0) || !params.compactness.is_finite() {
        return Err(Error::param("compactness must be positive"));
    }
    if let Some(i) = image.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let step = sqrt(n as f64 / e as f64);
    let mut centers = seed_centers(image, g, step);

    let spatial_weight = (params.compactness / step) * (params.compactness / step);
    let radius = step.ceil_usize();
    let mut labels = vec![UNASSIGNED; n];
    let mut dist = vec![f64::INFINITY; n];
    for _ in 0..params.iterations {
        labels.iter_mut().for_each(|l| *l = UNASSIGNED);
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        for (k, c) in centers.iter().enumerate() {
            let cy = round(c.y) as isize;
            let cx = round(c.x) as isize;
            let r0 = (cy - radius as isize).max(0) as usize;
            let r1 = ((cy + radius as isize) as usize).min(g.rows - 1);
            let c0 = (cx - radius as isize).max(0) as usize;
            let c1 = ((cx + radius as isize) as usize).min(g.cols - 1);
            for col in c0..=c1 {
                for row in r0..=r1 {
                    let j = g.index(row, col);
                    let px = image.column(j);
                    let dc: f64 = (0..3)
                        .map(|i| (px[i] - c.color[i]) * (px[i] - c.color[i]))
                        .sum();
                    let dy = row as f64 - c.y;
                    let dx = col as f64 - c.x;
                    let d = dc + (dy * dy + dx * dx) * spatial_weight;
                    if d < dist[j] {
                        dist[j] = d;
                        labels[j] = k;
                    }
                }
            }
        }
        let mut sums = vec![[0.0f64; 6]; centers.len()];
        for j in 0..n {
            if labels[j] == UNASSIGNED {
                continue;
            }
            let (row, col) = g.unindex(j);
            let px = image.column(j);
            let s = &mut sums[labels[j]];
            s[0] += px[0];
            s[1] += px[1];
            s[2] += px[2];
            s[3] += row as f64;
            s[4] += col as f64;
            s[5] += 1.0;
        }
        for (c, s) in centers.iter_mut().zip(&sums) {
            if s[5] > 0.0 {
                *c = Center {
                    color: [s[0] / s[5], s[1] / s[5], s[2] / s[5]],
                    y: s[3] / s[5],
                    x: s[4] / s[5],
                };
            }
        }
    }
    let min_size = step * step / 4.0;
    Ok(enforce_connectivity(&labels, g, min_size))
}

trait CeilUsize {
    fn ceil_usize(self) -> usize;
}

impl CeilUsize for f64 {
    fn ceil_usize(self) -> usize {
        libm::ceil(self) as usize
    }
}

fn seed_centers(image: &PixelMatrix, g: Geometry, step: f64) -> Vec<Center> {
    let ny = (round(g.rows as f64 / step) as usize).clamp(1, g.rows);
    let nx = (round(g.cols as f64 / step) as usize).clamp(1, g.cols);
    let sy = g.rows as f64 / ny as f64;
    let sx = g.cols as f64 / nx as f64;
    let grad = |r: usize, c: usize| -> f64 {
        let at = |rr: usize, cc: usize| image.column(g.index(rr, cc));
        let (up, down) = (at(r.saturating_sub(1), c), at((r + 1).min(g.rows - 1), c));
        let (left, right) = (at(r, c.saturating_sub(1)), at(r, (c + 1).min(g.cols - 1)));
        crate::math::sq_dist(up, down) + crate::math::sq_dist(left, right)
    };
    let mut centers = Vec::with_capacity(nx * ny);
    for ix in 0..nx {
        for iy in 0..ny {
            let r = (libm::floor((iy as f64 + 0.5) * sy) as usize).min(g.rows - 1);
            let c = (libm::floor((ix as f64 + 0.5) * sx) as usize).min(g.cols - 1);
            let (mut br, mut bc, mut bg) = (r, c, grad(r, c));
            for dc in [-1isize, 0, 1] {
                for dr in [-1isize, 0, 1] {
                    let rr = r as isize + dr;
                    let cc = c as isize + dc;
                    if rr < 0 || cc < 0 || rr >= g.rows as isize || cc >= g.cols as isize {
                        continue;
                    }
                    let gv = grad(rr as usize, cc as usize);
                    if gv < bg {
                        (br, bc, bg) = (rr as usize, cc as usize, gv);
                    }
                }
            }
            let px = image.column(g.index(br, bc));
            centers.push(Center {
                color: [px[0], px[1], px[2]],
                y: br as f64,
                x: bc as f64,
            });
        }
    }
    centers
}

fn neighbors(g: Geometry, j: usize) -> impl Iterator<Item = usize> {
    let (r, c) = g.unindex(j);
    let up = (r > 0).then(|| g.index(r - 1, c));
    let down = (r + 1 < g.rows).then(|| g.index(r + 1, c));
    let left = (c > 0).then(|| g.index(r, c - 1));
    let right = (c + 1 < g.cols).then(|| g.index(r, c + 1));
    [up, down, left, right].into_iter().flatten()
}

/// Labels 4-connected components of equal `labels` values in scan order.
fn components(labels: &[usize], g: Geometry) -> (Vec<usize>, usize) {
    let n = labels.len();
    let mut comp = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = count;
        stack.push(start);
        while let Some(j) = stack.pop() {
            for nb in neighbors(g, j) {
                if comp[nb] == usize::MAX && labels[nb] == labels[start] {
                    comp[nb] = count;
                    stack.push(nb);
                }
            }
        }
        count += 1;
    }
    (comp, count)
}

/// Splits disconnected clusters into separate segments and merges components
/// smaller than `min_size` (and unassigned pixels) into their largest neighbor.
fn enforce_connectivity(labels: &[usize], g: Geometry, min_size: f64) -> SegmentationMap {
    let (comp, count) = components(labels, g);
    let mut size = vec![0usize; count];
    let mut orphan = vec![false; count];
    for (j, &c) in comp.iter().enumerate() {
        size[c] += 1;
        if labels[j] == UNASSIGNED {
            orphan[c] = true;
        }
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); count];
    for j in 0..comp.len() {
        for nb in neighbors(g, j) {
            if comp[nb] != comp[j] {
                adj[comp[j]].insert(comp[nb]);
            }
        }
    }
    let is_small = |s: usize, o: bool| o || (s as f64) < min_size;
    let key = |s: usize, o: bool| if o { 0 } else { s };
    let mut parent: Vec<usize> = (0..count).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..count)
        .filter(|&c| is_small(size[c], orphan[c]))
        .map(|c| (key(size[c], orphan[c]), c))
        .collect();
    let mut alive = count;
    while alive > 1 {
        let Some((_, c)) = queue.pop_first() else {
            break;
        };
        let target = adj[c]
            .iter()
            .copied()
            .max_by(|&a, &b| size[a].cmp(&size[b]).then(b.cmp(&a)));
        let Some(t) = target else { continue };
        let was_small = is_small(size[t], orphan[t]);
        if was_small {
            queue.remove(&(key(size[t], orphan[t]), t));
        }
        size[t] += size[c];
        orphan[t] = orphan[t] && orphan[c];
        parent[c] = t;
        let moved = core::mem::take(&mut adj[c]);
        for &o in &moved {
            adj[o].remove(&c);
            if o != t {
                adj[o].insert(t);
                adj[t].insert(o);
            }
        }
        adj[t].remove(&c);
        adj[t].remove(&t);
        alive -= 1;
        if is_small(size[t], orphan[t]) {
            queue.insert((key(size[t], orphan[t]), t));
        }
    }
    let root = |mut c: usize| {
        while parent[c] != c {
            c = parent[c];
        }
        c
    };
    let mut ids = vec![0u32; count];
    let mut next = 0u32;
    let mut assignments = Vec::with_capacity(comp.len());
    for &c in &comp {
        let r = root(c);
        if ids[r] == 0 {
            next += 1;
            ids[r] = next;
        }
        assignments.push(ids[r]);
    }
    SegmentationMap::from_labels(assignments).expect("connectivity pass yields a valid partition")
}
