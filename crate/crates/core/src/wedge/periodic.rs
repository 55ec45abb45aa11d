//! Checker for labelings that are weakly periodic with respect to a portrait.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{PortraitWedge, WedgeError, WedgeLabel, WedgeLabeling, WedgeVertex};
use crate::portrait::CriticalPortrait;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Clause {
    /// The label is `β ++ α ++ γ` with `α` the separation vector.
    SeparationSandwich,
    /// Pairs sharing the first point and the angle of the second share `β`.
    FormerCoherence,
    /// Pairs sharing the second point and the angle of the first share `γ`.
    LatterCoherence,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::SeparationSandwich => "separation-sandwich",
            Clause::FormerCoherence => "former-coherence",
            Clause::LatterCoherence => "latter-coherence",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum PeriodicityReport {
    Passed { checked: usize },
    Violation {
        vertex: WedgeVertex,
        clause: Clause,
        detail: String,
    },
}

impl PeriodicityReport {
    pub fn passed(&self) -> bool {
        matches!(self, PeriodicityReport::Passed { .. })
    }
}

struct Ordered {
    k: usize,
    i: usize,
    l: usize,
    j: usize,
    label: WedgeLabel,
    /// Admissible lengths of the former block.
    splits: Vec<usize>,
    /// Length of the separation vector.
    essential: usize,
}

impl Ordered {
    fn former(&self, t: usize) -> &[usize] {
        &self.label.leaves()[..t]
    }

    fn latter(&self, t: usize) -> &[usize] {
        &self.label.leaves()[t + self.essential..]
    }

    fn vertex(&self) -> WedgeVertex {
        WedgeVertex::new(self.k, self.i, self.l, self.j)
    }
}

fn splits(
    pw: &PortraitWedge,
    label: &WedgeLabel,
    k: usize,
    i: usize,
    l: usize,
    j: usize,
) -> (Vec<usize>, usize) {
    let xi = pw.portrait();
    let essential = pw.ordered_label(k, i, l, j);
    let (x, y) = (pw.point(k, i), pw.point(l, j));
    let a = essential.leaves();
    let lab = label.leaves();
    let r = a.len();
    if lab.len() < r {
        return (Vec::new(), r);
    }
    let valid = (0..=lab.len() - r)
        .filter(|&t| {
            lab[t..t + r] == *a
                && lab[..t].iter().all(|&b| xi.leaf(b).contains(x))
                && lab[t + r..].iter().all(|&c| xi.leaf(c).contains(y))
        })
        .collect();
    (valid, r)
}

/// Checks every vertex of the truncation. The coherence clauses are checked on
/// non-diagonal ordered pairs.
pub fn check_weakly_periodic(
    labeling: &WedgeLabeling,
    xi: &CriticalPortrait,
) -> Result<PeriodicityReport, WedgeError> {
    if labeling.space().leaves != xi.size() {
        return Err(WedgeError::SizeMismatch {
            expected: xi.size(),
            found: labeling.space().leaves,
        });
    }
    let pw = PortraitWedge::new(xi);
    let mut ordered: Vec<Ordered> = Vec::new();
    let mut checked = 0;
    for (v, label) in labeling.iter() {
        checked += 1;
        let (valid, essential) = splits(&pw, label, v.k, v.i, v.l, v.j);
        if valid.is_empty() {
            let sep = pw.label(&v);
            return Ok(PeriodicityReport::Violation {
                vertex: v,
                clause: Clause::SeparationSandwich,
                detail: format!("label {label} does not frame separation vector {sep}"),
            });
        }
        if pw.is_diagonal(&v) {
            continue;
        }
        let t_rev: Vec<usize> = valid
            .iter()
            .map(|&t| label.len() - essential - t)
            .collect();
        if (v.k, v.i) != (v.l, v.j) {
            ordered.push(Ordered {
                k: v.l,
                i: v.j,
                l: v.k,
                j: v.i,
                label: label.reversed(),
                splits: t_rev,
                essential,
            });
        }
        ordered.push(Ordered {
            k: v.k,
            i: v.i,
            l: v.l,
            j: v.j,
            label: label.clone(),
            splits: valid,
            essential,
        });
    }

    let mut former: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut latter: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for (idx, o) in ordered.iter().enumerate() {
        let first = *former.entry((o.k, o.i, pw.point_id(o.l, o.j))).or_insert(idx);
        let f = &ordered[first];
        if !f
            .splits
            .iter()
            .any(|&t| o.splits.iter().any(|&u| f.former(t) == o.former(u)))
        {
            return Ok(PeriodicityReport::Violation {
                vertex: o.vertex(),
                clause: Clause::FormerCoherence,
                detail: format!(
                    "label {} of ({},{}),({},{}) and label {} of ({},{}),({},{}) have different former blocks",
                    o.label, o.k + 1, o.i, o.l + 1, o.j, f.label, f.k + 1, f.i, f.l + 1, f.j
                ),
            });
        }
        let first = *latter.entry((pw.point_id(o.k, o.i), o.l, o.j)).or_insert(idx);
        let f = &ordered[first];
        if !f
            .splits
            .iter()
            .any(|&t| o.splits.iter().any(|&u| f.latter(t) == o.latter(u)))
        {
            return Ok(PeriodicityReport::Violation {
                vertex: o.vertex(),
                clause: Clause::LatterCoherence,
                detail: format!(
                    "label {} of ({},{}),({},{}) and label {} of ({},{}),({},{}) have different latter blocks",
                    o.label, o.k + 1, o.i, o.l + 1, o.j, f.label, f.k + 1, f.i, f.l + 1, f.j
                ),
            });
        }
    }
    Ok(PeriodicityReport::Passed { checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::portrait::portrait_from_strs;

    #[test]
    fn induced_wedge_passes() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        let labeling = PortraitWedge::new(&xi).labeling(5);
        assert!(check_weakly_periodic(&labeling, &xi).unwrap().passed());
    }

    #[test]
    fn swapped_label_fails_sandwich() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        let mut labeling = PortraitWedge::new(&xi).labeling(5);
        let v = WedgeVertex::new(1, 2, 1, 3);
        assert!(labeling.set(&v, WedgeLabel::new(vec![1, 0])));
        match check_weakly_periodic(&labeling, &xi).unwrap() {
            PeriodicityReport::Violation { vertex, clause, .. } => {
                assert_eq!(vertex, v);
                assert_eq!(clause, Clause::SeparationSandwich);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn size_mismatch() {
        let xi = portrait_from_strs(3, &[&["0", "1/3"], &["7/15", "4/5"]]).unwrap();
        let q = portrait_from_strs(2, &[&["1/4", "3/4"]]).unwrap();
        let labeling = PortraitWedge::new(&q).labeling(3);
        assert!(check_weakly_periodic(&labeling, &xi).is_err());
    }
}
