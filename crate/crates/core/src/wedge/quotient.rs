//! The quotient of the non-diagonal wedge graph by equality of angle pairs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{outgoing_edges, PortraitWedge, WedgeError, WedgeVertex};
use crate::entropy::ArcPair;
use crate::linalg::SparseMatrix;
use crate::portrait::CriticalPortrait;

/// Vertices are the non-degenerate pairs of postcritical angles in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientGraph {
    pub vertices: Vec<ArcPair>,
    pub matrix: SparseMatrix,
}

impl QuotientGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Builds the quotient from representatives of height `<= bound` and width
/// `<= 2 bound`, checking that all representatives of a class agree.
pub fn quotient_graph(xi: &CriticalPortrait, bound: usize) -> Result<QuotientGraph, WedgeError> {
    if bound == 0 {
        return Err(WedgeError::ZeroBound);
    }
    let pw = PortraitWedge::new(xi);
    let angles = pw.postcritical().angles();
    let p = angles.len();
    let class_index = |a: usize, b: usize| -> Option<usize> {
        let (a, b) = (a.min(b), a.max(b));
        (a != b).then(|| a * p - a * (a + 1) / 2 + (b - a - 1))
    };
    let n = p * p.saturating_sub(1) / 2;
    let mut rows: Vec<Option<(WedgeVertex, BTreeMap<usize, u64>)>> = vec![None; n];

    let labeling = pw.labeling(bound);
    for (v, label) in labeling.iter() {
        let Some(c) = class_index(pw.point_id(v.k, v.i), pw.point_id(v.l, v.j)) else {
            continue;
        };
        let mut row = BTreeMap::new();
        for (t, _) in outgoing_edges(&v, label) {
            if let Some(tc) = class_index(pw.point_id(t.k, t.i), pw.point_id(t.l, t.j)) {
                *row.entry(tc).or_insert(0u64) += 1;
            }
        }
        match &rows[c] {
            None => rows[c] = Some((v, row)),
            Some((_, first)) if *first == row => {}
            Some(_) => return Err(WedgeError::Incompatible { vertex: v }),
        }
    }

    let mut vertices = Vec::with_capacity(n);
    let mut matrix_rows = Vec::with_capacity(n);
    for a in 0..p {
        for b in a + 1..p {
            let pair = ArcPair::new(angles[a].clone(), angles[b].clone());
            let c = class_index(a, b).expect("distinct ids");
            match &rows[c] {
                Some((_, row)) => matrix_rows.push(row.iter().map(|(&k, &v)| (k, v)).collect()),
                None => {
                    return Err(WedgeError::TruncationTooSmall {
                        bound,
                        pair: pair.to_string(),
                    })
                }
            }
            vertices.push(pair);
        }
    }
    Ok(QuotientGraph {
        vertices,
        matrix: SparseMatrix::from_rows(matrix_rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::transition_matrix;
    use crate::portrait::portrait_from_strs;

    #[test]
    fn worked_example_matches_transition_matrix() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        let q = quotient_graph(&xi, 6).unwrap();
        let sys = transition_matrix(&xi);
        assert_eq!(q.vertices, sys.basis.pairs());
        assert_eq!(q.matrix, sys.matrix);
        assert_eq!(q.len(), 10);
    }

    #[test]
    fn quadratic_double_loop() {
        let xi = portrait_from_strs(2, &[&["1/4", "3/4"]]).unwrap();
        let q = quotient_graph(&xi, 3).unwrap();
        assert_eq!(q.vertices.len(), 1);
        assert_eq!(q.vertices[0].to_string(), "{0, 1/2}");
        assert_eq!(q.matrix.get(0, 0), 2);
    }

    #[test]
    fn small_truncation_is_reported() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        assert!(matches!(
            quotient_graph(&xi, 1),
            Err(WedgeError::TruncationTooSmall { .. })
        ));
    }
}
