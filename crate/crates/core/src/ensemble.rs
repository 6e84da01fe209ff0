//! Bagging ensemble of KNN, random forest and CART combined by majority vote.
//!
//! Each member trains on its own bootstrap replicate (size `n_train`, drawn
//! with replacement). Replicate `m` for member index `m` (0 KNN, 1 RF, 2 CART)
//! is `Stream::derive(seed, [m]).bootstrap(n, n)`; the forest's internal seed
//! is `Stream::derive(seed, [1, 1]).next_u64()`.
//!
//! Vote rule: a label with at least two of three votes wins. Three different
//! votes (possible only with four classes) fall back to the CART vote.
//!
//! Saved ensembles use the model envelope (kind 4) with payload
//! `task u8, tie_break u8 (0 = CART fallback), bootstrap seeds u64 x 3,
//! forest seed u64`, then the KNN, RF and CART envelopes each prefixed by a u64 length.

use rayon::prelude::*;
use serde::Serialize;

use crate::classifiers::codec::{self, ModelKind, Reader, Writer};
use crate::classifiers::{
    CartModel, CartParams, Classifier, Dataset, ForestModel, ForestParams, KnnModel,
};
use crate::error::{Error, Result};
use crate::model::{ClassLabel, Task};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleConfig {
    pub knn_k: usize,
    pub forest: ForestParams,
    pub cart: CartParams,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            knn_k: crate::classifiers::knn::DEFAULT_K,
            forest: ForestParams::default(),
            cart: CartParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Three-way split resolves to the CART member's vote.
    CartFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Majority,
    Fallback,
}

/// Per-member votes behind one ensemble prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct VoteTrace {
    pub knn: ClassLabel,
    pub forest: ClassLabel,
    pub cart: ClassLabel,
    pub decision: Decision,
}

impl VoteTrace {
    pub fn votes(&self) -> [ClassLabel; 3] {
        [self.knn, self.forest, self.cart]
    }
}

/// Majority of three votes in member order (KNN, RF, CART).
pub fn combine_votes(
    knn: ClassLabel,
    forest: ClassLabel,
    cart: ClassLabel,
) -> (ClassLabel, Decision) {
    if knn == forest || knn == cart {
        (knn, Decision::Majority)
    } else if forest == cart {
        (forest, Decision::Majority)
    } else {
        (cart, Decision::Fallback)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedEnsemble {
    pub(crate) task: Task,
    pub(crate) knn: KnnModel,
    pub(crate) forest: ForestModel,
    pub(crate) cart: CartModel,
    pub(crate) bootstrap_seeds: [u64; 3],
    pub(crate) tie_break: TieBreak,
}

/// Row indices of the bootstrap replicate for member `member` (0 KNN, 1 RF, 2 CART).
pub fn bootstrap_replicate(seed: u64, member: usize, n_train: usize) -> Vec<usize> {
    Stream::derive(seed, &[member as u64]).bootstrap(n_train, n_train)
}

impl TrainedEnsemble {
    pub fn train(data: &Dataset, config: &EnsembleConfig, seed: u64) -> Result<Self> {
        if data.distinct_classes() < 2 {
            return Err(Error::validation(
                "ensemble training needs at least two classes",
            ));
        }
        let n = data.n_rows();
        let replicates: Vec<Vec<usize>> = (0..3).map(|m| bootstrap_replicate(seed, m, n)).collect();
        let forest_params = ForestParams {
            seed: Stream::derive(seed, &[1, 1]).next_u64(),
            ..config.forest
        };
        let (knn, (forest, cart)) = rayon::join(
            || KnnModel::train_rows(data, &replicates[0], config.knn_k),
            || {
                rayon::join(
                    || ForestModel::train_rows(data, &replicates[1], forest_params),
                    || CartModel::train_rows(data, &replicates[2], config.cart),
                )
            },
        );
        Ok(TrainedEnsemble {
            task: data.task(),
            knn: knn?,
            forest: forest?,
            cart: cart?,
            bootstrap_seeds: [0, 1, 2].map(|m| Stream::derive(seed, &[m]).key()),
            tie_break: TieBreak::CartFallback,
        })
    }

    pub fn knn(&self) -> &KnnModel {
        &self.knn
    }

    pub fn forest(&self) -> &ForestModel {
        &self.forest
    }

    pub fn cart(&self) -> &CartModel {
        &self.cart
    }

    pub fn bootstrap_seeds(&self) -> [u64; 3] {
        self.bootstrap_seeds
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    pub fn predict_traced(&self, row: &[f64]) -> Result<(ClassLabel, VoteTrace)> {
        let knn = self.knn.predict(row)?;
        let forest = self.forest.predict(row)?;
        let cart = self.cart.predict(row)?;
        let (label, decision) = combine_votes(knn, forest, cart);
        Ok((
            label,
            VoteTrace {
                knn,
                forest,
                cart,
                decision,
            },
        ))
    }

    pub fn predict(&self, row: &[f64]) -> Result<ClassLabel> {
        self.predict_traced(row).map(|(l, _)| l)
    }

    /// Predictions for many rows, computed in parallel, in row order.
    pub fn predict_rows(&self, rows: &[Vec<f64>]) -> Result<Vec<(ClassLabel, VoteTrace)>> {
        rows.par_iter().map(|r| self.predict_traced(r)).collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = Writer::new();
        w.task(self.task);
        w.u8(0);
        self.bootstrap_seeds.iter().for_each(|&s| w.u64(s));
        w.u64(self.forest.params().seed);
        w.nested(&self.knn.to_bytes()?);
        w.nested(&self.forest.to_bytes()?);
        w.nested(&self.cart.to_bytes()?);
        Ok(codec::wrap(ModelKind::Ensemble, &w.into_inner()))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(codec::unwrap(bytes, ModelKind::Ensemble)?);
        let task = r.task()?;
        let tie_break = match r.u8()? {
            0 => TieBreak::CartFallback,
            t => {
                return Err(Error::format(
                    "<model>",
                    format!("unknown tie-break policy {t}"),
                ))
            }
        };
        let bootstrap_seeds = [r.u64()?, r.u64()?, r.u64()?];
        let forest_seed = r.u64()?;
        let knn = KnnModel::from_bytes(r.nested()?)?;
        let forest = ForestModel::from_bytes(r.nested()?)?;
        let cart = CartModel::from_bytes(r.nested()?)?;
        r.finish()?;
        let dims = [knn.n_features(), forest.n_features(), cart.n_features()];
        if [knn.task(), forest.task(), cart.task()]
            .iter()
            .any(|&t| t != task)
            || dims.iter().any(|&d| d != dims[0])
            || forest.params().seed != forest_seed
        {
            return Err(Error::format(
                "<model>",
                "ensemble members disagree with the header",
            ));
        }
        Ok(TrainedEnsemble {
            task,
            knn,
            forest,
            cart,
            bootstrap_seeds,
            tie_break,
        })
    }
}

impl Classifier for TrainedEnsemble {
    fn task(&self) -> Task {
        self.task
    }

    fn n_features(&self) -> usize {
        self.cart.n_features()
    }

    fn predict_ordinal(&self, row: &[f64]) -> usize {
        let t = self.task;
        let label = |o| ClassLabel::from_ordinal(t, o).expect("member ordinal in range");
        combine_votes(
            label(self.knn.predict_ordinal(row)),
            label(self.forest.predict_ordinal(row)),
            label(self.cart.predict_ordinal(row)),
        )
        .0
        .ordinal()
    }
}
