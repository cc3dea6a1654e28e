use std::io::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::factorize::FactorizationResult;
use super::matrices::FrameRow;
use crate::vocab::Vocabulary;

/// Non-negative unit × frame-row associations, `W_commands · W_framesᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationMap {
    pub vocabulary: Vocabulary,
    pub columns: Vec<FrameRow>,
    pub matrix: Array2<f64>,
}

impl AssociationMap {
    pub fn from_factorization(
        result: &FactorizationResult,
        vocabulary: Vocabulary,
        columns: Vec<FrameRow>,
    ) -> Self {
        let matrix = association_matrix(&result.w_commands, &result.w_frames);
        assert_eq!(matrix.dim(), (vocabulary.len(), columns.len()));
        AssociationMap {
            vocabulary,
            columns,
            matrix,
        }
    }

    pub fn column_index(&self, row: &FrameRow) -> Option<usize> {
        self.columns.iter().position(|c| c == row)
    }

    /// Tab-separated dump: header of column labels, one line per unit.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "unit")?;
        for c in &self.columns {
            write!(out, "\t{c}")?;
        }
        writeln!(out)?;
        for (i, unit) in self.vocabulary.units().iter().enumerate() {
            write!(out, "{unit}")?;
            for x in self.matrix.row(i) {
                write!(out, "\t{x:.6e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// `w_commands · w_framesᵀ`.
pub fn association_matrix(w_commands: &Array2<f64>, w_frames: &Array2<f64>) -> Array2<f64> {
    w_commands.dot(&w_frames.t())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Axis};
    use proptest::prelude::*;

    #[test]
    fn identities() {
        let i = Array2::<f64>::eye(2);
        assert_eq!(association_matrix(&i, &i), i);
    }

    #[test]
    fn shapes_and_signs() {
        let wc = Array2::from_shape_fn((3, 2), |(i, j)| (i + j) as f64 * 0.5);
        let wf = Array2::from_shape_fn((4, 2), |(i, j)| (i * j) as f64 + 0.1);
        let m = association_matrix(&wc, &wf);
        assert_eq!(m.dim(), (3, 4));
        assert!(m.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn by_hand_outer_product() {
        let m = association_matrix(&array![[1.0], [2.0]], &array![[3.0], [4.0]]);
        assert_eq!(m, array![[3.0, 4.0], [6.0, 8.0]]);
    }

    #[test]
    fn tsv_layout() {
        let map = AssociationMap {
            vocabulary: ["dri", "Op"].into_iter().collect(),
            columns: vec![FrameRow::Filler],
            matrix: array![[1.0], [0.5]],
        };
        let mut buf = Vec::new();
        map.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "unit\t<filler>");
        assert!(lines[2].starts_with("Op\t5.0"));
    }

    proptest! {
        #[test]
        fn latent_permutation_invariance(
            wc in proptest::collection::vec(0.0f64..2.0, 12),
            wf in proptest::collection::vec(0.0f64..2.0, 8),
            perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        ) {
            let wc = Array2::from_shape_vec((3, 4), wc).unwrap();
            let wf = Array2::from_shape_vec((2, 4), wf).unwrap();
            let pc = wc.select(Axis(1), &perm);
            let pf = wf.select(Axis(1), &perm);
            let a = association_matrix(&wc, &wf);
            let b = association_matrix(&pc, &pf);
            for (x, y) in a.iter().zip(b.iter()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()));
            }
        }
    }
}
