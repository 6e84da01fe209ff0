//! Versioned binary envelope for trained models.
//!
//! All integers and floats are little-endian, as in the PSR1 recording format.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "PSM1"
//! 4       2     envelope version (u16, = 1)
//! 6       1     model kind (1 knn, 2 cart, 3 forest, 4 ensemble)
//! 7       1     reserved (0)
//! 8       8     payload length in bytes (u64)
//! 16      ...   payload
//! ```
//!
//! Payloads:
//!
//! * task byte: 0 arousal2, 1 valence2, 2 quadrant4
//! * knn: task u8, k u32, n_rows u32, n_cols u32, means f64 x n_cols,
//!   inv_std f64 x n_cols, rows f64 x (n_rows * n_cols) row-major, labels u8 x n_rows
//! * cart: task u8, n_features u32, min_samples_split u32, max_depth u32
//!   (u32::MAX = unlimited), n_nodes u32, then per node either
//!   `0u8, counts u32 x n_classes` (leaf) or
//!   `1u8, column u32, threshold f64, impurity f64, left u32, right u32` (split)
//! * forest: task u8, n_features u32, n_trees u32, max_features u32
//!   (u32::MAX = sqrt rule), seed u64, bootstrap u8, the tree growth fields of
//!   cart, then per tree: stream key u64 and a nested cart envelope
//!   (length-prefixed with u64)
//! * ensemble: see [`crate::ensemble`]

use std::path::Path;

use ndarray::Array2;

use super::{CartModel, CartParams, ForestModel, ForestParams, KnnModel, Node};
use crate::error::{Error, Result};
use crate::model::Task;

pub const MAGIC: &[u8; 4] = b"PSM1";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum ModelKind {
    Knn = 1,
    Cart = 2,
    Forest = 3,
    Ensemble = 4,
}

impl ModelKind {
    fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(ModelKind::Knn),
            2 => Some(ModelKind::Cart),
            3 => Some(ModelKind::Forest),
            4 => Some(ModelKind::Ensemble),
            _ => None,
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::format("<model>", msg)
}

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }

    pub fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn f64(&mut self, v: f64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    pub fn usize32(&mut self, v: usize) -> Result<()> {
        let v =
            u32::try_from(v).map_err(|_| Error::validation(format!("{v} does not fit in u32")))?;
        self.u32(v);
        Ok(())
    }

    pub fn nested(&mut self, bytes: &[u8]) {
        self.u64(bytes.len() as u64);
        self.buf.extend_from_slice(bytes);
    }

    pub fn task(&mut self, task: Task) {
        self.u8(match task {
            Task::TwoClassArousal => 0,
            Task::TwoClassValence => 1,
            Task::FourClassQuadrant => 2,
        });
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.buf
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| bad(format!("payload truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn usize32(&mut self) -> Result<usize> {
        Ok(self.u32()? as usize)
    }

    pub fn nested(&mut self) -> Result<&'a [u8]> {
        let len = usize::try_from(self.u64()?).map_err(|_| bad("nested length overflow"))?;
        self.take(len)
    }

    pub fn task(&mut self) -> Result<Task> {
        match self.u8()? {
            0 => Ok(Task::TwoClassArousal),
            1 => Ok(Task::TwoClassValence),
            2 => Ok(Task::FourClassQuadrant),
            t => Err(bad(format!("unknown task byte {t}"))),
        }
    }

    pub fn finish(&self) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(bad(format!(
                "{} trailing payload bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

pub fn wrap(kind: ModelKind, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind as u8);
    out.push(0);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(payload);
    out
}

/// Validates the header and returns the payload.
pub fn unwrap(bytes: &[u8], expected: ModelKind) -> Result<&[u8]> {
    if bytes.len() < HEADER_LEN {
        return Err(bad(format!(
            "{} bytes is shorter than the envelope header",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(bad("bad magic, not a model envelope"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(bad(format!("unsupported envelope version {version}")));
    }
    let kind = ModelKind::from_u8(bytes[6])
        .ok_or_else(|| bad(format!("unknown model kind {}", bytes[6])))?;
    if kind != expected {
        return Err(bad(format!(
            "envelope holds {kind:?}, expected {expected:?}"
        )));
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if len != (bytes.len() - HEADER_LEN) as u64 {
        return Err(bad(format!(
            "payload length {len} does not match {} bytes present",
            bytes.len() - HEADER_LEN
        )));
    }
    Ok(&bytes[HEADER_LEN..])
}

pub fn save(bytes: &[u8], path: &Path) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

fn put_tree_params(w: &mut Writer, p: &CartParams) -> Result<()> {
    w.usize32(p.min_samples_split)?;
    w.u32(match p.max_depth {
        None => u32::MAX,
        Some(d) => u32::try_from(d).unwrap_or(u32::MAX - 1),
    });
    Ok(())
}

fn get_tree_params(r: &mut Reader<'_>) -> Result<CartParams> {
    let min_samples_split = r.usize32()?;
    let max_depth = match r.u32()? {
        u32::MAX => None,
        d => Some(d as usize),
    };
    Ok(CartParams {
        min_samples_split,
        max_depth,
    })
}

impl KnnModel {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = Writer::new();
        w.task(self.task);
        w.usize32(self.k)?;
        w.usize32(self.rows.nrows())?;
        w.usize32(self.rows.ncols())?;
        self.means.iter().for_each(|&v| w.f64(v));
        self.inv_std.iter().for_each(|&v| w.f64(v));
        self.rows.iter().for_each(|&v| w.f64(v));
        self.labels.iter().for_each(|&v| w.u8(v));
        Ok(wrap(ModelKind::Knn, &w.into_inner()))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(unwrap(bytes, ModelKind::Knn)?);
        let task = r.task()?;
        let k = r.usize32()?;
        let n = r.usize32()?;
        let d = r.usize32()?;
        let means = (0..d).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let inv_std = (0..d).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let flat = (0..n * d).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        let labels = (0..n).map(|_| r.u8()).collect::<Result<Vec<_>>>()?;
        r.finish()?;
        if k == 0 || k > n || labels.iter().any(|&l| l as usize >= task.n_classes()) {
            return Err(bad("inconsistent knn payload"));
        }
        let rows = Array2::from_shape_vec((n, d), flat).map_err(|e| bad(e.to_string()))?;
        Ok(KnnModel {
            k,
            task,
            means,
            inv_std,
            rows,
            labels,
        })
    }
}

impl CartModel {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = Writer::new();
        w.task(self.task);
        w.usize32(self.n_features)?;
        put_tree_params(&mut w, &self.params)?;
        w.usize32(self.nodes.len())?;
        for node in &self.nodes {
            match node {
                Node::Leaf { counts } => {
                    w.u8(0);
                    counts.iter().for_each(|&c| w.u32(c));
                }
                Node::Split {
                    column,
                    threshold,
                    impurity,
                    left,
                    right,
                } => {
                    w.u8(1);
                    w.usize32(*column)?;
                    w.f64(*threshold);
                    w.f64(*impurity);
                    w.usize32(*left)?;
                    w.usize32(*right)?;
                }
            }
        }
        Ok(wrap(ModelKind::Cart, &w.into_inner()))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(unwrap(bytes, ModelKind::Cart)?);
        let task = r.task()?;
        let n_features = r.usize32()?;
        let params = get_tree_params(&mut r)?;
        let n_nodes = r.usize32()?;
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 20));
        for _ in 0..n_nodes {
            nodes.push(match r.u8()? {
                0 => Node::Leaf {
                    counts: (0..task.n_classes())
                        .map(|_| r.u32())
                        .collect::<Result<_>>()?,
                },
                1 => Node::Split {
                    column: r.usize32()?,
                    threshold: r.f64()?,
                    impurity: r.f64()?,
                    left: r.usize32()?,
                    right: r.usize32()?,
                },
                t => return Err(bad(format!("unknown node tag {t}"))),
            });
        }
        r.finish()?;
        // Children must point forward so prediction always terminates.
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Split {
                column,
                left,
                right,
                ..
            } = n
            {
                if *column >= n_features
                    || *left <= i
                    || *right <= i
                    || *left >= n_nodes
                    || *right >= n_nodes
                {
                    return Err(bad(format!("malformed split node {i}")));
                }
            }
        }
        if nodes.is_empty() {
            return Err(bad("tree without nodes"));
        }
        Ok(CartModel {
            task,
            n_features,
            params,
            nodes,
        })
    }
}

impl ForestModel {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = Writer::new();
        w.task(self.task);
        w.usize32(self.n_features)?;
        w.usize32(self.params.n_trees)?;
        match self.params.max_features {
            None => w.u32(u32::MAX),
            Some(m) => w.usize32(m)?,
        }
        w.u64(self.params.seed);
        w.u8(self.params.bootstrap as u8);
        put_tree_params(&mut w, &self.params.tree)?;
        for (seed, tree) in self.tree_seeds.iter().zip(&self.trees) {
            w.u64(*seed);
            w.nested(&tree.to_bytes()?);
        }
        Ok(wrap(ModelKind::Forest, &w.into_inner()))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(unwrap(bytes, ModelKind::Forest)?);
        let task = r.task()?;
        let n_features = r.usize32()?;
        let n_trees = r.usize32()?;
        let max_features = match r.u32()? {
            u32::MAX => None,
            m => Some(m as usize),
        };
        let seed = r.u64()?;
        let bootstrap = r.u8()? != 0;
        let tree = get_tree_params(&mut r)?;
        let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
        let mut tree_seeds = Vec::with_capacity(n_trees.min(1 << 16));
        for _ in 0..n_trees {
            tree_seeds.push(r.u64()?);
            let t = CartModel::from_bytes(r.nested()?)?;
            if t.task != task || t.n_features != n_features {
                return Err(bad("forest member does not match forest header"));
            }
            trees.push(t);
        }
        r.finish()?;
        if trees.is_empty() {
            return Err(bad("forest without trees"));
        }
        Ok(ForestModel {
            task,
            n_features,
            params: ForestParams {
                n_trees,
                max_features,
                tree,
                seed,
                bootstrap,
            },
            trees,
            tree_seeds,
        })
    }
}
