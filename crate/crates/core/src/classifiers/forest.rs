//! Random forest: CART trees on bootstrap replicates with per-node column sampling.

use rayon::prelude::*;

use super::cart::FeatureSampler;
use super::{majority, CartModel, CartParams, Classifier, Dataset};
use crate::error::{Error, Result};
use crate::model::{ClassLabel, Task};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestParams {
    pub n_trees: usize,
    /// Columns examined per split; `None` means `floor(sqrt(d))`.
    pub max_features: Option<usize>,
    pub tree: CartParams,
    pub seed: u64,
    /// When false every tree sees the training rows as given (test hook).
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_features: None,
            tree: CartParams::default(),
            seed: 0,
            bootstrap: true,
        }
    }
}

impl ForestParams {
    pub fn features_per_split(&self, n_features: usize) -> usize {
        self.max_features
            .unwrap_or_else(|| (n_features as f64).sqrt().floor() as usize)
            .clamp(1, n_features)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub(crate) task: Task,
    pub(crate) n_features: usize,
    pub(crate) params: ForestParams,
    pub(crate) trees: Vec<CartModel>,
    /// Key of the stream each tree drew its bootstrap and column subsets from.
    pub(crate) tree_seeds: Vec<u64>,
}

impl ForestModel {
    pub fn train(data: &Dataset, params: ForestParams) -> Result<Self> {
        let rows: Vec<usize> = (0..data.n_rows()).collect();
        Self::train_rows(data, &rows, params)
    }

    /// Tree `t` uses stream `derive(seed, [t])`: its child 0 draws the
    /// bootstrap replicate, child 1 the per-node column subsets.
    pub fn train_rows(data: &Dataset, rows: &[usize], params: ForestParams) -> Result<Self> {
        if params.n_trees == 0 {
            return Err(Error::validation("forest needs at least one tree"));
        }
        if rows.is_empty() {
            return Err(Error::validation("cannot grow a forest on zero rows"));
        }
        let m = params.features_per_split(data.n_features());
        let grown: Vec<(u64, CartModel)> = (0..params.n_trees)
            .into_par_iter()
            .map(|t| {
                let stream = Stream::derive(params.seed, &[t as u64]);
                let sample: Vec<usize> = if params.bootstrap {
                    stream
                        .child(0)
                        .bootstrap(rows.len(), rows.len())
                        .into_iter()
                        .map(|i| rows[i])
                        .collect()
                } else {
                    rows.to_vec()
                };
                let mut cols = stream.child(1);
                let sampler = FeatureSampler {
                    count: m,
                    stream: &mut cols,
                };
                CartModel::train_with(data, &sample, params.tree, Some(sampler))
                    .map(|tree| (stream.key(), tree))
            })
            .collect::<Result<_>>()?;
        let (tree_seeds, trees) = grown.into_iter().unzip();
        Ok(ForestModel {
            task: data.task(),
            n_features: data.n_features(),
            params,
            trees,
            tree_seeds,
        })
    }

    pub fn trees(&self) -> &[CartModel] {
        &self.trees
    }

    pub fn tree_seeds(&self) -> &[u64] {
        &self.tree_seeds
    }

    pub fn params(&self) -> ForestParams {
        self.params
    }

    pub fn predict(&self, row: &[f64]) -> Result<ClassLabel> {
        Classifier::predict(self, row)
    }
}

impl Classifier for ForestModel {
    fn task(&self) -> Task {
        self.task
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_ordinal(&self, row: &[f64]) -> usize {
        let mut votes = [0usize; 4];
        for t in &self.trees {
            votes[t.predict_ordinal(row)] += 1;
        }
        majority(&votes[..self.task.n_classes()])
    }
}
