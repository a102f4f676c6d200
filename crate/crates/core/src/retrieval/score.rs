use super::{MultiVector, RetrievalError};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(q: &MultiVector, v: &MultiVector) -> Result<(), RetrievalError> {
    if q.dim() != v.dim() {
        return Err(RetrievalError::DimMismatch {
            left: q.dim(),
            right: v.dim(),
        });
    }
    Ok(())
}

/// Mean over query tokens of the best dot product against any document token.
///
/// No normalization is assumed; with unit rows the result lies in `[-1, 1]`.
pub fn late_interaction_score(q: &MultiVector, v: &MultiVector) -> Result<f64, RetrievalError> {
    check_dims(q, v)?;
    let total: f64 = q
        .rows()
        .map(|qi| {
            v.rows()
                .map(|vl| dot(qi, vl))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(total / q.token_count() as f64)
}

fn mean_row(m: &MultiVector) -> Vec<f64> {
    let mut acc = vec![0.0; m.dim()];
    for row in m.rows() {
        for (a, x) in acc.iter_mut().zip(row) {
            *a += x;
        }
    }
    let n = m.token_count() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// Cosine similarity of the mean-pooled rows (single-vector baseline).
pub fn dense_score(q: &MultiVector, v: &MultiVector) -> Result<f64, RetrievalError> {
    check_dims(q, v)?;
    let (a, b) = (mean_row(q), mean_row(v));
    let denom = dot(&a, &a).sqrt() * dot(&b, &b).sqrt();
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(dot(&a, &b) / denom)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Scorer {
    #[default]
    LateInteraction,
    Dense,
}

impl Scorer {
    pub fn score(self, q: &MultiVector, v: &MultiVector) -> Result<f64, RetrievalError> {
        match self {
            Scorer::LateInteraction => late_interaction_score(q, v),
            Scorer::Dense => dense_score(q, v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(rows: &[&[f64]]) -> MultiVector {
        MultiVector::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn exact_token_match() {
        let q = mv(&[&[1.0, 0.0]]);
        let v = mv(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(late_interaction_score(&q, &v).unwrap(), 1.0);
    }

    #[test]
    fn one_matched_one_orthogonal() {
        let q = mv(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let v = mv(&[&[1.0, 0.0]]);
        assert_eq!(late_interaction_score(&q, &v).unwrap(), 0.5);
    }

    #[test]
    fn dim_mismatch() {
        let q = mv(&[&[1.0, 0.0]]);
        let v = mv(&[&[1.0, 0.0, 0.0]]);
        assert!(matches!(
            late_interaction_score(&q, &v),
            Err(RetrievalError::DimMismatch { left: 2, right: 3 })
        ));
        assert!(dense_score(&q, &v).is_err());
    }

    #[test]
    fn negative_best_match_kept() {
        let q = mv(&[&[1.0, 0.0]]);
        let v = mv(&[&[-1.0, 0.0], &[-0.5, 0.0]]);
        assert_eq!(late_interaction_score(&q, &v).unwrap(), -0.5);
    }

    #[test]
    fn dense_is_cosine_of_means() {
        let q = mv(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let v = mv(&[&[2.0, 2.0]]);
        assert!((dense_score(&q, &v).unwrap() - 1.0).abs() < 1e-12);
        let zero = mv(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(dense_score(&zero, &v).unwrap(), 0.0);
    }
}
