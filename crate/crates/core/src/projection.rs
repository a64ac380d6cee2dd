//! Selecting sub-type vectors for a 2-D projection.

use alloc::string::String;
use alloc::vec::Vec;

use crate::embedder::TypeEmbeddingModel;
use crate::error::{Error, Result};
use crate::ontology::OntologyIndex;
use crate::tsne::{self, TsneConfig, TsneOutput};

/// Minimum number of rows a projection accepts.
pub const MIN_ROWS: usize = 5;

/// Type vectors of the direct sub-types of some root types, each labelled by
/// the root(s) it sits under.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionJob {
    pub dim: usize,
    pub types: Vec<String>,
    pub labels: Vec<Vec<String>>,
    pub matrix: Vec<f64>,
    pub config: TsneConfig,
}

impl ProjectionJob {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Rows carrying more than one root label.
    pub fn multi_labeled(&self) -> usize {
        self.labels.iter().filter(|l| l.len() > 1).count()
    }

    pub fn run(&self) -> Result<TsneOutput> {
        tsne::tsne(&self.matrix, self.len(), self.dim, &self.config)
    }
}

/// Rows follow `roots` order, then sub-type IRI order. A sub-type under
/// several roots appears once, at its first position, with every root label.
pub fn select_subtype_matrix(
    model: &TypeEmbeddingModel,
    index: &OntologyIndex,
    roots: &[&str],
    config: TsneConfig,
) -> Result<ProjectionJob> {
    let mut types: Vec<String> = Vec::new();
    let mut labels: Vec<Vec<String>> = Vec::new();
    let mut matrix = Vec::new();
    for root in roots {
        for sub in index.direct_subtypes(root) {
            let Some(v) = model.get_vector(&sub) else {
                continue;
            };
            match types.iter().position(|t| *t == sub) {
                Some(i) => {
                    if !labels[i].iter().any(|l| l == root) {
                        labels[i].push(String::from(*root));
                    }
                }
                None => {
                    matrix.extend_from_slice(v);
                    types.push(sub);
                    labels.push(alloc::vec![String::from(*root)]);
                }
            }
        }
    }
    if types.len() < MIN_ROWS {
        return Err(Error::TooFewPoints {
            found: types.len(),
            required: MIN_ROWS,
        });
    }
    let job = ProjectionJob {
        dim: model.dim(),
        types,
        labels,
        matrix,
        config,
    };
    if job.multi_labeled() > 0 {
        log::info!("{} sub-types sit under more than one root", job.multi_labeled());
    }
    Ok(job)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn unit(dim: usize, axis: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        v
    }

    #[test]
    fn two_rows_is_too_few() {
        let model = TypeEmbeddingModel::from_records(
            2,
            vec![
                (String::from("A"), 1, vec![1.0, 0.0]),
                (String::from("B"), 1, vec![0.0, 1.0]),
            ],
        )
        .unwrap();
        let mut idx = OntologyIndex::new();
        idx.add_subclass("A", "R1");
        idx.add_subclass("B", "R2");
        let err = select_subtype_matrix(&model, &idx, &["R1", "R2"], TsneConfig::default());
        assert_eq!(err, Err(Error::TooFewPoints { found: 2, required: 5 }));
        let err = select_subtype_matrix(&model, &idx, &["Nothing"], TsneConfig::default());
        assert_eq!(err, Err(Error::TooFewPoints { found: 0, required: 5 }));
    }

    #[test]
    fn five_roots_by_ten_subtypes() {
        let dim = 50;
        let mut records = Vec::new();
        let mut idx = OntologyIndex::new();
        for r in 0..5 {
            for s in 0..10 {
                let name = format!("R{r}S{s}");
                idx.add_subclass(&name, &format!("R{r}"));
                records.push((name, 1, unit(dim, r * 10 + s)));
            }
        }
        let model = TypeEmbeddingModel::from_records(dim, records).unwrap();
        let roots = ["R0", "R1", "R2", "R3", "R4"];
        let job = select_subtype_matrix(&model, &idx, &roots, TsneConfig::default()).unwrap();
        assert_eq!(job.len(), 50);
        assert_eq!(job.matrix.len(), 50 * dim);
        assert_eq!(job.labels[0], ["R0"]);
        assert_eq!(job.labels[49], ["R4"]);
    }

    #[test]
    fn shared_subtype_gets_both_labels() {
        let dim = 6;
        let mut idx = OntologyIndex::new();
        let mut records = Vec::new();
        for s in 0..6 {
            let name = format!("S{s}");
            idx.add_subclass(&name, if s < 3 { "R1" } else { "R2" });
            records.push((name, 1, unit(dim, s)));
        }
        idx.add_subclass("S0", "R2");
        let model = TypeEmbeddingModel::from_records(dim, records).unwrap();
        let job = select_subtype_matrix(&model, &idx, &["R1", "R2"], TsneConfig::default()).unwrap();
        assert_eq!(job.len(), 6);
        assert_eq!(job.labels[0], ["R1", "R2"]);
        assert_eq!(job.multi_labeled(), 1);
    }
}
