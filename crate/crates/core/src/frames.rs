//! Finite frames of ℝⁿ.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::ops::Deref;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::{sample_matrix, DistributionSpec, SampleMatrix};
use crate::error::check_dim;
use crate::linalg::{dot, symmetric_eigen, SquareMatrix};
use crate::{Error, Real, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowLabel {
    Random,
    Identity,
}

impl RowLabel {
    fn as_str(self) -> &'static str {
        match self {
            RowLabel::Random => "random",
            RowLabel::Identity => "identity",
        }
    }
}

/// `N` measurement vectors in ℝⁿ, stored row-major and already scaled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame<T> {
    n: usize,
    vectors: Vec<T>,
    labels: Vec<RowLabel>,
    /// Scale applied to each row when it was built.
    scales: Vec<T>,
    /// Number of random rows.
    m: usize,
}

/// `(⟨x, φⱼ⟩)ⱼ` in row order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector<T> {
    pub values: Vec<T>,
}

impl<T> Deref for MeasurementVector<T> {
    type Target = [T];

    fn deref(&self) -> &[T] {
        &self.values
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameBounds<T> {
    pub lower: T,
    pub upper: T,
    /// Fewer rows than dimensions, or a numerically singular frame operator.
    pub rank_deficient: bool,
}

impl<T: Real> Frame<T> {
    /// Frame from explicit rows (taken as-is, scale 1).
    pub fn from_rows(n: usize, rows: Vec<Vec<T>>, label: RowLabel) -> Result<Self> {
        let count = rows.len();
        let mut vectors = Vec::with_capacity(count * n);
        for r in rows {
            check_dim(n, r.len())?;
            vectors.extend(r);
        }
        let m = if label == RowLabel::Random { count } else { 0 };
        Ok(Self {
            n,
            vectors,
            labels: vec![label; count],
            scales: vec![T::one(); count],
            m,
        })
    }

    /// The standard basis `e₁, …, eₙ` scaled by `scale`.
    pub fn identity_scaled(n: usize, scale: T) -> Self {
        let mut vectors = vec![T::zero(); n * n];
        for i in 0..n {
            vectors[i * n + i] = scale;
        }
        Self {
            n,
            vectors,
            labels: vec![RowLabel::Identity; n],
            scales: vec![scale; n],
            m: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::identity_scaled(n, T::one())
    }

    /// Rows of `samples` scaled by `scale`.
    pub fn from_samples(samples: &SampleMatrix<T>, scale: T) -> Self {
        let vectors = samples.data().iter().map(|&x| x * scale).collect();
        let m = samples.rows();
        Self {
            n: samples.cols(),
            vectors,
            labels: vec![RowLabel::Random; m],
            scales: vec![scale; m],
            m,
        }
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn union(&self, other: &Frame<T>) -> Result<Self> {
        check_dim(self.n, other.n)?;
        let mut out = self.clone();
        out.vectors.extend_from_slice(&other.vectors);
        out.labels.extend_from_slice(&other.labels);
        out.scales.extend_from_slice(&other.scales);
        out.m += other.m;
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `N`, the number of frame vectors.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn random_rows(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> &[RowLabel] {
        &self.labels
    }

    pub fn scales(&self) -> &[T] {
        &self.scales
    }

    pub fn matrix(&self) -> &[T] {
        &self.vectors
    }

    #[inline]
    pub fn row(&self, j: usize) -> &[T] {
        &self.vectors[j * self.n..(j + 1) * self.n]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        self.vectors.chunks_exact(self.n.max(1))
    }

    /// Sub-frame of the rows carrying `label`.
    pub fn block(&self, label: RowLabel) -> Self {
        let mut out = Self {
            n: self.n,
            vectors: Vec::new(),
            labels: Vec::new(),
            scales: Vec::new(),
            m: 0,
        };
        for (j, &l) in self.labels.iter().enumerate() {
            if l == label {
                out.vectors.extend_from_slice(self.row(j));
                out.labels.push(l);
                out.scales.push(self.scales[j]);
                if l == RowLabel::Random {
                    out.m += 1;
                }
            }
        }
        out
    }

    pub fn analysis(&self, x: &[T]) -> Result<MeasurementVector<T>> {
        check_dim(self.n, x.len())?;
        Ok(MeasurementVector {
            values: self.iter_rows().map(|r| dot(r, x)).collect(),
        })
    }

    /// `ΦᵀΦ`.
    pub fn frame_operator(&self) -> SquareMatrix<T> {
        SquareMatrix::gram(self.len(), self.n, &self.vectors)
    }

    /// Extreme squared singular values of the `N × n` frame matrix.
    pub fn frame_bounds(&self) -> Result<FrameBounds<T>> {
        if self.is_empty() {
            return Err(Error::Domain(
                "frame bounds need at least one vector".into(),
            ));
        }
        let eig = symmetric_eigen(&self.frame_operator());
        let upper = eig
            .values
            .last()
            .copied()
            .unwrap_or(T::zero())
            .max(T::zero());
        let mut lower = eig
            .values
            .first()
            .copied()
            .unwrap_or(T::zero())
            .max(T::zero());
        let singular = lower <= T::of(1e-12) * upper;
        let rank_deficient = self.len() < self.n || singular;
        if rank_deficient {
            lower = T::zero();
        }
        Ok(FrameBounds {
            lower,
            upper,
            rank_deficient,
        })
    }

    /// Header `label,scale,c1,…,cn`, one row per frame vector.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let cols: Vec<String> = (1..=self.n).map(|i| format!("c{i}")).collect();
        writeln!(out, "label,scale,{}", cols.join(","))?;
        for (j, row) in self.iter_rows().enumerate() {
            let vals: Vec<String> = row.iter().map(|x| x.f64().to_string()).collect();
            writeln!(
                out,
                "{},{},{}",
                self.labels[j].as_str(),
                self.scales[j].f64(),
                vals.join(",")
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("empty frame file".into()))?
            .map_err(|e| Error::Parse(e.to_string()))?;
        let n = head
            .strip_prefix("label,scale,")
            .ok_or_else(|| Error::Parse("frame header must start with `label,scale,`".into()))?
            .split(',')
            .count();
        let mut frame = Self {
            n,
            vectors: Vec::new(),
            labels: Vec::new(),
            scales: Vec::new(),
            m: 0,
        };
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut cells = line.split(',');
            let label = match cells.next().map(str::trim) {
                Some("random") => RowLabel::Random,
                Some("identity") => RowLabel::Identity,
                other => return Err(Error::Parse(format!("row {}: bad label {other:?}", i + 1))),
            };
            let nums: Vec<f64> = cells
                .map(|c| {
                    c.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("row {}: {e}", i + 1)))
                })
                .collect::<Result<_>>()?;
            check_dim(n + 1, nums.len())?;
            frame.labels.push(label);
            frame.scales.push(T::of(nums[0]));
            frame.vectors.extend(nums[1..].iter().map(|&v| T::of(v)));
            if label == RowLabel::Random {
                frame.m += 1;
            }
        }
        Ok(frame)
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
        self.write_csv(BufWriter::new(file))
            .map_err(|source| Error::Io {
                path: path.into(),
                source,
            })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|source| Error::Io {
            path: path.into(),
            source,
        })?;
        Self::read_csv(BufReader::new(file))
    }
}

/// `(m^{-1/2} vⱼ)ⱼ₌₁..ₘ ∪ (eᵢ)ᵢ₌₁..ₙ`.
pub fn build_augmented_frame<T: Real>(
    spec: &DistributionSpec,
    m: usize,
    n: usize,
    seed: u64,
) -> Result<Frame<T>> {
    let samples = sample_matrix::<T>(spec, m, n, seed)?;
    Ok(augmented_from_samples(&samples))
}

/// The augmented frame over an existing sample matrix.
pub fn augmented_from_samples<T: Real>(samples: &SampleMatrix<T>) -> Frame<T> {
    let scale = T::one() / T::of_usize(samples.rows()).sqrt();
    Frame::from_samples(samples, scale)
        .union(&Frame::identity(samples.cols()))
        .expect("same dimension")
}

/// Discretized continuous Parseval frame: `M` sample rows scaled by
/// `(2M)^{-1/2}` followed by the basis scaled by `2^{-1/2}`.
pub fn build_discretized_parseval<T: Real>(
    spec: &DistributionSpec,
    points: usize,
    n: usize,
    seed: u64,
) -> Result<Frame<T>> {
    if points < n {
        return Err(Error::Domain(format!(
            "discretized Parseval frame needs M ≥ n, got M = {points}, n = {n}"
        )));
    }
    let samples = sample_matrix::<T>(spec, points, n, seed)?;
    let scale = T::one() / (T::of(2.0) * T::of_usize(points)).sqrt();
    Frame::from_samples(&samples, scale).union(&Frame::identity_scaled(n, T::of(0.5).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_bounds() {
        let b = Frame::<f64>::identity(5).frame_bounds().unwrap();
        assert_eq!((b.lower, b.upper, b.rank_deficient), (1.0, 1.0, false));
        let doubled = Frame::<f64>::identity(3)
            .union(&Frame::identity(3))
            .unwrap();
        let b = doubled.frame_bounds().unwrap();
        assert_eq!((b.lower, b.upper), (2.0, 2.0));
    }

    #[test]
    fn rank_deficient_frames_report_zero() {
        let f = Frame::<f64>::from_rows(
            3,
            vec![vec![1.0, 2.0, 0.0], vec![0.0, 1.0, 1.0]],
            RowLabel::Random,
        )
        .unwrap();
        let b = f.frame_bounds().unwrap();
        assert!(b.rank_deficient);
        assert_eq!(b.lower, 0.0);
        assert!(b.upper > 0.0);
        let g = Frame::<f64>::from_rows(
            2,
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![-1.0, -1.0]],
            RowLabel::Random,
        )
        .unwrap();
        assert!(g.frame_bounds().unwrap().rank_deficient);
    }

    #[test]
    fn augmented_layout() {
        let f = build_augmented_frame::<f64>(&DistributionSpec::rademacher(), 1, 1, 4).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.row(0)[0].abs(), 1.0);
        assert_eq!(f.row(1), &[1.0]);
        let f = build_augmented_frame::<f64>(&DistributionSpec::gaussian(), 7, 4, 4).unwrap();
        assert_eq!(f.len(), 11);
        assert_eq!(f.block(RowLabel::Identity), Frame::identity(4));
        assert_eq!(f.random_rows(), 7);
        assert!(build_augmented_frame::<f64>(&DistributionSpec::gaussian(), 0, 4, 4).is_err());
    }

    #[test]
    fn analysis_of_identity_and_zero() {
        let id = Frame::<f64>::identity(3);
        assert_eq!(
            id.analysis(&[1.0, -2.0, 3.0]).unwrap().values,
            vec![1.0, -2.0, 3.0]
        );
        let f = build_augmented_frame::<f64>(&DistributionSpec::gaussian(), 5, 3, 1).unwrap();
        assert!(f.analysis(&[0.0; 3]).unwrap().iter().all(|&v| v == 0.0));
        assert!(matches!(
            f.analysis(&[0.0; 2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn parseval_one_dimensional() {
        let f =
            build_discretized_parseval::<f64>(&DistributionSpec::gaussian(), 4000, 1, 2).unwrap();
        let b = f.frame_bounds().unwrap();
        let var: f64 = f
            .block(RowLabel::Random)
            .iter_rows()
            .map(|r| r[0] * r[0])
            .sum::<f64>()
            * 2.0;
        assert!((b.lower - (0.5 * var + 0.5)).abs() < 1e-12);
        assert_eq!(b.lower, b.upper);
        assert!(build_discretized_parseval::<f64>(&DistributionSpec::gaussian(), 2, 3, 2).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = build_augmented_frame::<f64>(&DistributionSpec::gaussian(), 4, 2, 9).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let back = Frame::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }
}
