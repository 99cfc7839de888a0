//! Vertex valuations in one and several dimensions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real value per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding1D {
    pub x: Vec<f64>,
}

impl Embedding1D {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if let Some(v) = x.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite coordinate at vertex {v}")));
        }
        Ok(Embedding1D { x })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn to_kd(&self) -> EmbeddingKD {
        EmbeddingKD { k: 1, y: self.x.iter().map(|&c| vec![c]).collect() }
    }
}

/// A point of `R^k` per vertex; row `v` holds the coordinates of vertex `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingKD {
    pub k: usize,
    pub y: Vec<Vec<f64>>,
}

impl EmbeddingKD {
    pub fn new(k: usize, y: Vec<Vec<f64>>) -> Result<Self> {
        for (v, row) in y.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: row.len() });
            }
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument(format!("non-finite coordinate at vertex {v}")));
            }
        }
        Ok(EmbeddingKD { k, y })
    }

    pub fn zeros(n: usize, k: usize) -> Self {
        EmbeddingKD { k, y: vec![vec![0.0; k]; n] }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.y[v]
    }

    pub fn dist2(&self, u: usize, v: usize) -> f64 {
        self.y[u].iter().zip(&self.y[v]).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        EmbeddingKD { k: self.k, y: self.y.iter().map(|r| r.iter().map(|c| c * factor).collect()).collect() }
    }

    pub fn to_json(&self) -> EmbeddingJson {
        EmbeddingJson { n: self.n(), k: self.k, vectors: self.y.clone(), pi: None, edges: None }
    }
}

/// On-disk form of an embedding or a Gram factorization.
///
/// `pi` and `edges` are optional extras that let a lift file be rounded
/// without the original graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub n: usize,
    pub k: usize,
    pub vectors: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
}

impl EmbeddingJson {
    pub fn parse(text: &str) -> Result<Self> {
        let parsed: EmbeddingJson = serde_json::from_str(text)?;
        if parsed.vectors.len() != parsed.n {
            return Err(Error::DimensionMismatch { expected: parsed.n, got: parsed.vectors.len() });
        }
        Ok(parsed)
    }

    pub fn into_embedding(self) -> Result<EmbeddingKD> {
        EmbeddingKD::new(self.k, self.vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let e = EmbeddingKD::new(2, vec![vec![0.0, 1.0], vec![0.5, -0.25]]).unwrap();
        let text = serde_json::to_string(&e.to_json()).unwrap();
        assert_eq!(text, r#"{"n":2,"k":2,"vectors":[[0.0,1.0],[0.5,-0.25]]}"#);
        let back = EmbeddingJson::parse(&text).unwrap().into_embedding().unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(EmbeddingKD::new(2, vec![vec![0.0]]).is_err());
        assert!(EmbeddingJson::parse(r#"{"n":2,"k":1,"vectors":[[0.0]]}"#).is_err());
        assert!(Embedding1D::new(vec![f64::NAN]).is_err());
    }
}
