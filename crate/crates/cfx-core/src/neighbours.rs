//! Nearest unlike neighbour retrieval.
//!
//! Unlike-ness is judged by the classifier's prediction on each case, not
//! its stored label: the substitution loop's fallback guarantee (copying the
//! whole NUN flips the class) only holds under that reading. Retrieval is a
//! linear scan; the mixed overlap/Euclidean metric defeats the usual index
//! structures and case bases here are desk scale.

use alloc::vec::Vec;
use core::fmt;

use crate::classifier::Classifier;
use crate::dataset::Dataset;
use crate::schema::{distance, Instance};

/// A retrieved unlike neighbour.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NunResult {
    pub nun: Instance,
    /// Model-predicted class of the neighbour.
    pub nun_class: usize,
    /// Mixed distance from the query.
    pub distance: f64,
    /// Row position in the case base.
    pub case_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NeighbourError {
    /// No case satisfies the class constraint.
    NoUnlikeNeighbour,
}

impl fmt::Display for NeighbourError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeighbourError::NoUnlikeNeighbour => {
                write!(f, "case base holds no instance of a different class")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for NeighbourError {}

/// Nearest case whose predicted class differs from `query_class` (and equals
/// `desired_class` when given). Exact ties go to the lowest case index.
pub fn find_nun<M: Classifier + ?Sized>(
    case_base: &Dataset,
    model: &M,
    query: &Instance,
    query_class: usize,
    desired_class: Option<usize>,
) -> Result<NunResult, NeighbourError> {
    let predictions: Vec<usize> =
        case_base.instances.iter().map(|x| model.predict(x)).collect();
    find_nun_with_predictions(case_base, &predictions, query, query_class, desired_class)
}

/// [`find_nun`] against precomputed case predictions. The experiment runner
/// predicts the case base once and reuses it for every query and cell.
pub fn find_nun_with_predictions(
    case_base: &Dataset,
    predictions: &[usize],
    query: &Instance,
    query_class: usize,
    desired_class: Option<usize>,
) -> Result<NunResult, NeighbourError> {
    debug_assert_eq!(case_base.len(), predictions.len());
    let mut best: Option<(f64, usize)> = None;
    for (i, case) in case_base.instances.iter().enumerate() {
        if !class_ok(predictions[i], query_class, desired_class) {
            continue;
        }
        let d = distance(query, case, &case_base.schema);
        // Strict less-than keeps the earliest case on exact ties.
        if best.map_or(true, |(bd, _)| d < bd) {
            best = Some((d, i));
        }
    }
    let (d, i) = best.ok_or(NeighbourError::NoUnlikeNeighbour)?;
    Ok(NunResult {
        nun: case_base.instances[i].clone(),
        nun_class: predictions[i],
        distance: d,
        case_index: i,
    })
}

/// The `k` nearest unlike neighbours in ascending distance (ties by case
/// index); fewer when fewer exist, an error when none do. The first element
/// always equals [`find_nun`]'s result.
pub fn find_k_nuns<M: Classifier + ?Sized>(
    case_base: &Dataset,
    model: &M,
    query: &Instance,
    query_class: usize,
    k: usize,
    desired_class: Option<usize>,
) -> Result<Vec<NunResult>, NeighbourError> {
    let predictions: Vec<usize> =
        case_base.instances.iter().map(|x| model.predict(x)).collect();
    find_k_nuns_with_predictions(case_base, &predictions, query, query_class, k, desired_class)
}

/// [`find_k_nuns`] against precomputed case predictions.
pub fn find_k_nuns_with_predictions(
    case_base: &Dataset,
    predictions: &[usize],
    query: &Instance,
    query_class: usize,
    k: usize,
    desired_class: Option<usize>,
) -> Result<Vec<NunResult>, NeighbourError> {
    assert!(k >= 1, "k must be at least 1");
    let mut candidates: Vec<(f64, usize)> = case_base
        .instances
        .iter()
        .enumerate()
        .filter(|(i, _)| class_ok(predictions[*i], query_class, desired_class))
        .map(|(i, case)| (distance(query, case, &case_base.schema), i))
        .collect();
    if candidates.is_empty() {
        return Err(NeighbourError::NoUnlikeNeighbour);
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    candidates.truncate(k);
    Ok(candidates
        .into_iter()
        .map(|(d, i)| NunResult {
            nun: case_base.instances[i].clone(),
            nun_class: predictions[i],
            distance: d,
            case_index: i,
        })
        .collect())
}

fn class_ok(predicted: usize, query_class: usize, desired_class: Option<usize>) -> bool {
    match desired_class {
        Some(d) => predicted == d && predicted != query_class,
        None => predicted != query_class,
    }
}
