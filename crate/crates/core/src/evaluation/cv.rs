//! Fold assignment.
//!
//! Stratified folds: each class's indices are shuffled with its own stream
//! (`derive(seed, [class])`) and dealt round-robin into folds; the dealing
//! position carries over from one class to the next so fold sizes stay within
//! one sample of each other. Per fold, each class count is the floor or ceiling
//! of `class_size / k`.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::Stream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

fn folds_from_assignment(assign: &[usize], k: usize) -> Vec<Fold> {
    (0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..assign.len()).partition(|&i| assign[i] == f);
            Fold { train, test }
        })
        .collect()
}

/// `labels` are class ordinals.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::validation(format!("k = {k}; need at least 2 folds")));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        by_class[c].push(i);
    }
    for (c, members) in by_class.iter().enumerate() {
        if !members.is_empty() && members.len() < k {
            return Err(Error::validation(format!(
                "class {c} has {} members, fewer than k = {k}",
                members.len()
            )));
        }
    }
    let mut assign = vec![0usize; labels.len()];
    let mut pos = 0usize;
    for (c, members) in by_class.iter_mut().enumerate() {
        Stream::derive(seed, &[c as u64]).shuffle(members);
        for &i in members.iter() {
            assign[i] = pos % k;
            pos += 1;
        }
    }
    Ok(folds_from_assignment(&assign, k))
}

/// Subject-independent folds: whole subjects are dealt into folds after a
/// seeded shuffle of the distinct subject ids.
pub fn subject_kfold(subjects: &[u16], k: usize, seed: u64) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::validation(format!("k = {k}; need at least 2 folds")));
    }
    let mut ids: Vec<u16> = subjects.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < k {
        return Err(Error::validation(format!(
            "{} subjects, fewer than k = {k}",
            ids.len()
        )));
    }
    Stream::derive(seed, &[0x5B]).shuffle(&mut ids);
    let fold_of = |s: u16| ids.iter().position(|&x| x == s).unwrap() % k;
    let assign: Vec<usize> = subjects.iter().map(|&s| fold_of(s)).collect();
    Ok(folds_from_assignment(&assign, k))
}

/// SHA-256 over the test index lists, hex encoded.
pub fn fold_hash(folds: &[Fold]) -> String {
    let mut h = Sha256::new();
    for (f, fold) in folds.iter().enumerate() {
        h.update((f as u64).to_le_bytes());
        h.update((fold.test.len() as u64).to_le_bytes());
        for &i in &fold.test {
            h.update((i as u64).to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}
