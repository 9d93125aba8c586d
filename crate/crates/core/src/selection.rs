//! Similarity-constrained exemplar selection inside each superpixel.
//!
//! Each segment contributes `max(1, floor(ρ·N_e))` exemplars, chosen greedily:
//! start from the segment medoid, then repeatedly add the member that the
//! current exemplars represent worst (largest self-representation cost).
//! Because the cost can only drop as the dictionary grows, costs from earlier
//! rounds are upper bounds and most candidates never need re-solving.

use alloc::vec::Vec;

use crate::cube::PixelMatrix;
use crate::exec::Executor;
use crate::lasso::{self_rep_cost, Dictionary, LassoParams};
use crate::math::{floor, sq_dist};
use crate::superpixels::SegmentationMap;
use crate::{Error, Result};

/// Stacked exemplars of all segments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarDictionary {
    /// Global pixel indices, grouped by ascending segment id, in selection order.
    pub indices: Vec<usize>,
    /// Exemplar count per segment.
    pub per_segment: Vec<usize>,
    /// `dim × M` column-major exemplar features.
    pub features: Vec<f64>,
    pub dim: usize,
    pub rho: f64,
}

impl ExemplarDictionary {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn atom(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_dictionary(&self) -> Result<Dictionary<'_>> {
        Dictionary::new(&self.features, self.dim)
    }

    /// `(segment id, pixel index, selection round)` for every exemplar.
    pub fn records(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::with_capacity(self.len());
        let mut pos = 0;
        for (e, &m) in self.per_segment.iter().enumerate() {
            for round in 0..m {
                out.push((e + 1, self.indices[pos], round));
                pos += 1;
            }
        }
        out
    }
}

/// `max(1, floor(ρ·n))`.
pub fn exemplar_count(n: usize, rho: f64) -> usize {
    (floor(rho * n as f64) as usize).max(1).min(n)
}

/// Member of `p_e` closest to the segment mean; ties go to the lowest index.
pub fn medoid(x: &PixelMatrix, p_e: &[usize]) -> Result<usize> {
    let first = *p_e.first().ok_or(Error::EmptySegment)?;
    let dim = x.dim();
    let mut mean = alloc::vec![0.0; dim];
    for &j in p_e {
        for (m, v) in mean.iter_mut().zip(x.column(j)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= p_e.len() as f64);
    let mut best = (sq_dist(x.column(first), &mean), first);
    for &j in &p_e[1..] {
        let d = sq_dist(x.column(j), &mean);
        if d < best.0 || (d == best.0 && j < best.1) {
            best = (d, j);
        }
    }
    Ok(best.1)
}

fn validate_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param(alloc::format!(
            "rho must lie in (0, 1), got {rho}"
        )));
    }
    Ok(())
}

/// Lazy greedy selection of the exemplars of one segment.
///
/// Returns `exemplar_count(p_e.len(), rho)` global pixel indices in selection
/// order, starting with the medoid.
pub fn select_exemplars(
    x: &PixelMatrix,
    p_e: &[usize],
    rho: f64,
    lasso: &LassoParams,
) -> Result<Vec<usize>> {
    validate_rho(rho)?;
    lasso.validate()?;
    let m_e = exemplar_count(p_e.len(), rho);
    let first = medoid(x, p_e)?;
    let mut chosen = alloc::vec![first];
    let mut atoms: Vec<f64> = x.column(first).to_vec();
    let mut is_chosen: Vec<bool> = p_e.iter().map(|&j| j == first).collect();
    let cost = |k: usize, atoms: &[f64]| -> Result<f64> {
        let dict = Dictionary::new(atoms, x.dim())?;
        self_rep_cost(x.column(p_e[k]), &dict, lasso).map_err(|e| e.at_pixel(p_e[k]))
    };
    let mut bound = Vec::with_capacity(p_e.len());
    for k in 0..p_e.len() {
        bound.push(cost(k, &atoms)?);
    }
    for _ in 1..m_e {
        let mut order: Vec<usize> = (0..p_e.len()).filter(|&k| !is_chosen[k]).collect();
        order.sort_by(|&a, &b| bound[b].total_cmp(&bound[a]).then(p_e[a].cmp(&p_e[b])));
        let mut best: Option<(f64, usize)> = None;
        for (pos, &k) in order.iter().enumerate() {
            bound[k] = cost(k, &atoms)?;
            let better = match best {
                None => true,
                Some((c, b)) => bound[k] > c || (bound[k] == c && p_e[k] < p_e[b]),
            };
            if better {
                best = Some((bound[k], k));
            }
            let Some(&next) = order.get(pos + 1) else {
                break;
            };
            let (c, b) = best.expect("set above");
            // Stale bounds dominate fresh costs, so nothing later can win.
            if c > bound[next] || (c == bound[next] && p_e[b] < p_e[next]) {
                break;
            }
        }
        let (_, k) = best.expect("at least one candidate remains while fewer than N_e are chosen");
        is_chosen[k] = true;
        chosen.push(p_e[k]);
        atoms.extend_from_slice(x.column(p_e[k]));
    }
    Ok(chosen)
}

/// Runs selection on every segment and stacks the exemplars in segment order.
pub fn build_dictionary<E: Executor>(
    x: &PixelMatrix,
    map: &SegmentationMap,
    rho: f64,
    lasso: &LassoParams,
    exec: &E,
) -> Result<ExemplarDictionary> {
    validate_rho(rho)?;
    if map.assignments().len() != x.n() {
        return Err(Error::dim(
            "segmentation map does not match the pixel count",
        ));
    }
    let segments = map.all_segment_indices();
    let picks = exec.map(segments.len(), |e| {
        select_exemplars(x, &segments[e], rho, lasso)
    });
    let mut indices = Vec::new();
    let mut per_segment = Vec::with_capacity(picks.len());
    for p in picks {
        let p = p?;
        per_segment.push(p.len());
        indices.extend(p);
    }
    let features = x.gather(&indices);
    Ok(ExemplarDictionary {
        indices,
        per_segment,
        features,
        dim: x.dim(),
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::grid::Geometry;

    fn matrix(dim: usize, cols: Vec<Vec<f64>>) -> PixelMatrix {
        let g = Geometry::new(1, cols.len()).unwrap();
        PixelMatrix::new(dim, g, cols.concat()).unwrap()
    }

    #[test]
    fn medoid_cases() {
        let x = matrix(
            1,
            alloc::vec![alloc::vec![0.0], alloc::vec![1.0], alloc::vec![2.0]],
        );
        assert_eq!(medoid(&x, &[0, 1, 2]).unwrap(), 1);
        assert_eq!(medoid(&x, &[2]).unwrap(), 2);
        assert_eq!(medoid(&x, &[]), Err(Error::EmptySegment));
        // equidistant: lowest index wins
        assert_eq!(medoid(&x, &[0, 2]).unwrap(), 0);
    }

    #[test]
    fn count_rule() {
        assert_eq!(exemplar_count(1, 0.3), 1);
        assert_eq!(exemplar_count(3, 0.3), 1);
        assert_eq!(exemplar_count(10, 0.35), 3);
        assert_eq!(exemplar_count(49, 0.3), 14);
    }

    #[test]
    fn single_pixel_segment() {
        let x = matrix(2, alloc::vec![alloc::vec![1.0, 0.0]]);
        assert_eq!(
            select_exemplars(&x, &[0], 0.9, &LassoParams::new(10.0)).unwrap(),
            [0]
        );
    }

    #[test]
    fn orthogonal_pair_selects_both() {
        let x = matrix(
            3,
            alloc::vec![
                alloc::vec![1.0, 0.0, 0.0],
                alloc::vec![0.0, 1.0, 0.0],
                alloc::vec![0.0, 0.0, 1.0]
            ],
        );
        // the mean is equidistant from all three, so the medoid is pixel 0;
        // pixels 1 and 2 then tie and the lower index wins
        let sel = select_exemplars(&x, &[0, 1, 2], 0.7, &LassoParams::new(10.0)).unwrap();
        assert_eq!(sel, [0, 1]);
    }

    #[test]
    fn rejects_bad_rho() {
        let x = matrix(2, alloc::vec![alloc::vec![1.0, 0.0]]);
        assert!(select_exemplars(&x, &[0], 1.0, &LassoParams::new(10.0)).is_err());
        assert!(select_exemplars(&x, &[0], 0.0, &LassoParams::new(10.0)).is_err());
    }

    #[test]
    fn singleton_segments_use_every_pixel() {
        let cols: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                let a = i as f64 * 0.4;
                alloc::vec![libm::cos(a), libm::sin(a)]
            })
            .collect();
        let x = matrix(2, cols);
        let map = SegmentationMap::from_labels(alloc::vec![1, 2, 3, 4]).unwrap();
        let dict = build_dictionary(&x, &map, 0.5, &LassoParams::new(10.0), &Sequential).unwrap();
        assert_eq!(dict.indices, [0, 1, 2, 3]);
        assert_eq!(dict.per_segment, [1, 1, 1, 1]);
        assert_eq!(dict.records()[2], (3, 2, 0));
    }
}
