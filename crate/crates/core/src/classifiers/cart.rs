//! CART decision tree grown by exhaustive Gini split search.
//!
//! At every node each candidate column is sorted and every midpoint between
//! consecutive distinct values is scored. The split with the lowest weighted
//! Gini impurity wins; exact ties go to the lower column, then the lower
//! threshold. Rows with `value <= threshold` go left.

use ndarray::Array2;

use super::{majority, Classifier, Dataset};
use crate::error::{Error, Result};
use crate::model::{ClassLabel, Task};
use crate::rng::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CartParams {
    pub min_samples_split: usize,
    /// `None` grows until leaves are pure.
    pub max_depth: Option<usize>,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams {
            min_samples_split: 2,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Leaf {
        counts: Vec<u32>,
    },
    Split {
        column: usize,
        threshold: f64,
        /// Weighted Gini impurity of the two children.
        impurity: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartModel {
    pub(crate) task: Task,
    pub(crate) n_features: usize,
    pub(crate) params: CartParams,
    /// Arena; index 0 is the root.
    pub(crate) nodes: Vec<Node>,
}

/// Gini impurity `1 - sum p_c^2` of a count vector.
pub fn gini(counts: &[u32]) -> f64 {
    let n: u32 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    column: usize,
    threshold: f64,
    n_left: u64,
    n_right: u64,
    /// sum of squared class counts on each side
    sq_left: u64,
    sq_right: u64,
}

impl Candidate {
    /// `sq_l / n_l + sq_r / n_r` as an exact fraction; larger means purer.
    fn purity(&self) -> (u128, u128) {
        let num = self.sq_left as u128 * self.n_right as u128
            + self.sq_right as u128 * self.n_left as u128;
        (num, self.n_left as u128 * self.n_right as u128)
    }

    fn better_than(&self, other: &Candidate) -> bool {
        let (a, b) = self.purity();
        let (c, d) = other.purity();
        a * d > c * b
    }

    fn impurity(&self) -> f64 {
        let (num, den) = self.purity();
        let n = (self.n_left + self.n_right) as f64;
        1.0 - (num as f64 / den as f64) / n
    }
}

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a / 2.0 + b / 2.0;
    if m < b {
        m
    } else {
        a
    }
}

/// Per-node column sampling used by random forests.
pub(crate) struct FeatureSampler<'a> {
    pub count: usize,
    pub stream: &'a mut Stream,
}

pub(crate) struct Grower<'a> {
    x: &'a Array2<f64>,
    y: &'a [u8],
    n_classes: usize,
    params: CartParams,
    sampler: Option<FeatureSampler<'a>>,
    nodes: Vec<Node>,
}

impl<'a> Grower<'a> {
    pub(crate) fn new(
        data: &'a Dataset,
        params: CartParams,
        sampler: Option<FeatureSampler<'a>>,
    ) -> Self {
        Grower {
            x: data.features(),
            y: data.ordinals(),
            n_classes: data.n_classes(),
            params,
            sampler,
            nodes: Vec::new(),
        }
    }

    fn counts(&self, rows: &[usize]) -> Vec<u32> {
        let mut c = vec![0u32; self.n_classes];
        for &r in rows {
            c[self.y[r] as usize] += 1;
        }
        c
    }

    fn best_split(&mut self, rows: &[usize]) -> Option<Candidate> {
        let d = self.x.ncols();
        let columns: Vec<usize> = match self.sampler.as_mut() {
            Some(s) if s.count < d => {
                let mut cols = s.stream.sample_without_replacement(d, s.count);
                cols.sort_unstable();
                cols
            }
            _ => (0..d).collect(),
        };
        let total = self.counts(rows);
        let mut best: Option<Candidate> = None;
        let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(rows.len());
        for column in columns {
            pairs.clear();
            pairs.extend(rows.iter().map(|&r| (self.x[[r, column]], self.y[r])));
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = vec![0u64; self.n_classes];
            for i in 0..pairs.len() - 1 {
                left[pairs[i].1 as usize] += 1;
                if pairs[i].0 == pairs[i + 1].0 {
                    continue;
                }
                let n_left = (i + 1) as u64;
                let n_right = (pairs.len() - i - 1) as u64;
                let mut sq_left = 0u64;
                let mut sq_right = 0u64;
                for (c, &l) in left.iter().enumerate() {
                    let r = total[c] as u64 - l;
                    sq_left += l * l;
                    sq_right += r * r;
                }
                let cand = Candidate {
                    column,
                    threshold: midpoint(pairs[i].0, pairs[i + 1].0),
                    n_left,
                    n_right,
                    sq_left,
                    sq_right,
                };
                if best.as_ref().is_none_or(|b| cand.better_than(b)) {
                    best = Some(cand);
                }
            }
        }
        best
    }

    pub(crate) fn grow(mut self, rows: Vec<usize>) -> Vec<Node> {
        // Work stack of (node slot, rows, depth). Children are pushed right
        // first so the left subtree is numbered before the right.
        self.nodes.push(Node::Leaf { counts: Vec::new() });
        let mut stack = vec![(0usize, rows, 0usize)];
        while let Some((slot, rows, depth)) = stack.pop() {
            let counts = self.counts(&rows);
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_capped = self.params.max_depth.is_some_and(|m| depth >= m);
            if pure || rows.len() < self.params.min_samples_split || depth_capped {
                self.nodes[slot] = Node::Leaf { counts };
                continue;
            }
            let Some(split) = self.best_split(&rows) else {
                self.nodes[slot] = Node::Leaf { counts };
                continue;
            };
            let (l, r): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&row| self.x[[row, split.column]] <= split.threshold);
            let left = self.nodes.len();
            let right = left + 1;
            self.nodes.push(Node::Leaf { counts: Vec::new() });
            self.nodes.push(Node::Leaf { counts: Vec::new() });
            self.nodes[slot] = Node::Split {
                column: split.column,
                threshold: split.threshold,
                impurity: split.impurity(),
                left,
                right,
            };
            stack.push((right, r, depth + 1));
            stack.push((left, l, depth + 1));
        }
        self.nodes
    }
}

impl CartModel {
    pub fn train(data: &Dataset, params: CartParams) -> Result<Self> {
        let rows: Vec<usize> = (0..data.n_rows()).collect();
        Self::train_rows(data, &rows, params)
    }

    pub fn train_rows(data: &Dataset, rows: &[usize], params: CartParams) -> Result<Self> {
        Self::train_with(data, rows, params, None)
    }

    pub(crate) fn train_with(
        data: &Dataset,
        rows: &[usize],
        params: CartParams,
        sampler: Option<FeatureSampler<'_>>,
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("cannot grow a tree on zero rows"));
        }
        if params.min_samples_split < 2 {
            return Err(Error::validation("min_samples_split must be >= 2"));
        }
        let nodes = Grower::new(data, params, sampler).grow(rows.to_vec());
        Ok(CartModel {
            task: data.task(),
            n_features: data.n_features(),
            params,
            nodes,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn params(&self) -> CartParams {
        self.params
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match &nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
            }
        }
        go(&self.nodes, 0)
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, Node::Leaf { .. }))
            .count()
    }

    fn leaf_for(&self, row: &[f64]) -> &[u32] {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf { counts } => return counts,
                Node::Split {
                    column,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    i = if row[*column] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> Result<ClassLabel> {
        Classifier::predict(self, row)
    }
}

impl Classifier for CartModel {
    fn task(&self) -> Task {
        self.task
    }

    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_ordinal(&self, row: &[f64]) -> usize {
        majority(self.leaf_for(row))
    }
}
