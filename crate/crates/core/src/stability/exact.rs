//! Exact phase-retrieval check by sign-pattern enumeration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::frames::Frame;
use crate::linalg::null_space;
use crate::{Error, Real, Result};

/// Largest frame the enumeration accepts (`2^{N−1}` patterns).
pub const MAX_EXACT_FRAME: usize = 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRetrievalCheck<T> {
    pub does_pr: bool,
    /// `(f, g)` with `|Tf| = |Tg|` and `f ≠ ±g`.
    pub witness: Option<(Vec<T>, Vec<T>)>,
    /// Rows on which `⟨φᵢ, f⟩ = ⟨φᵢ, g⟩` in the witnessing pattern.
    pub pattern: Option<Vec<bool>>,
    pub patterns_checked: u64,
}

fn null_of_rows<T: Real>(frame: &Frame<T>, rows: &[usize], tol: T) -> Vec<Vec<T>> {
    let n = frame.dim();
    if rows.is_empty() {
        return (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| if k == i { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
    }
    let data: Vec<T> = rows
        .iter()
        .flat_map(|&r| frame.row(r).iter().copied())
        .collect();
    null_space(rows.len(), n, &data, tol)
}

/// Decides real phase retrieval for a finite frame.
///
/// A sign pattern `σ` splits the rows into `S = {σᵢ = +1}` and its
/// complement; the solutions of `⟨φᵢ, f⟩ = σᵢ⟨φᵢ, g⟩` are exactly
/// `f − g ⊥ φ_S`, `f + g ⊥ φ_{Sᶜ}`. Phase retrieval fails iff both
/// orthogonal complements are nonzero for some `S`, and then
/// `f = u + w`, `g = w − u` is a witness. Row 0 is kept in `S` since
/// `σ` and `−σ` give the same solutions up to `g ↦ −g`.
pub fn check_phase_retrieval_exact<T: Real>(frame: &Frame<T>) -> Result<PhaseRetrievalCheck<T>> {
    let big_n = frame.len();
    if big_n == 0 {
        return Err(Error::Domain("empty frame".into()));
    }
    if big_n > MAX_EXACT_FRAME {
        return Err(Error::Refused(format!(
            "sign enumeration is limited to N ≤ {MAX_EXACT_FRAME}, got N = {big_n}"
        )));
    }
    let tol = T::epsilon().sqrt();
    let patterns = 1u64 << (big_n - 1);
    let found = (0..patterns).into_par_iter().find_map_first(|mask| {
        let in_s: Vec<bool> = (0..big_n)
            .map(|i| i == 0 || (mask >> (i - 1)) & 1 == 1)
            .collect();
        let s: Vec<usize> = (0..big_n).filter(|&i| in_s[i]).collect();
        let u = null_of_rows(frame, &s, tol);
        if u.is_empty() {
            return None;
        }
        let sc: Vec<usize> = (0..big_n).filter(|&i| !in_s[i]).collect();
        let w = null_of_rows(frame, &sc, tol);
        let (u, w) = (u.into_iter().next()?, w.into_iter().next()?);
        let f: Vec<T> = u.iter().zip(&w).map(|(&a, &b)| b + a).collect();
        let g: Vec<T> = u.iter().zip(&w).map(|(&a, &b)| b - a).collect();
        Some((f, g, in_s))
    });
    Ok(match found {
        Some((f, g, pattern)) => PhaseRetrievalCheck {
            does_pr: false,
            witness: Some((f, g)),
            pattern: Some(pattern),
            patterns_checked: patterns,
        },
        None => PhaseRetrievalCheck {
            does_pr: true,
            witness: None,
            pattern: None,
            patterns_checked: patterns,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::RowLabel;
    use crate::linalg::min_sign_distance;

    #[test]
    fn identity_fails_with_witness() {
        let frame = Frame::<f64>::identity(2);
        let res = check_phase_retrieval_exact(&frame).unwrap();
        assert!(!res.does_pr);
        let (f, g) = res.witness.unwrap();
        let tf = frame.analysis(&f).unwrap();
        let tg = frame.analysis(&g).unwrap();
        for (a, b) in tf.iter().zip(tg.iter()) {
            assert!((a.abs() - b.abs()).abs() < 1e-12);
        }
        assert!(min_sign_distance(&f, &g) > 0.5);
    }

    #[test]
    fn scalar_frame_does_pr() {
        let frame = Frame::<f64>::from_rows(1, vec![vec![1.0]], RowLabel::Random).unwrap();
        assert!(check_phase_retrieval_exact(&frame).unwrap().does_pr);
    }

    #[test]
    fn oversized_frames_are_refused() {
        let frame = Frame::<f64>::identity(23);
        assert!(matches!(
            check_phase_retrieval_exact(&frame),
            Err(Error::Refused(_))
        ));
    }
}
