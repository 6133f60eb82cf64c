use std::path::Path;

use nalgebra::DMatrix;

use crate::embed::EmbeddingTable;
use crate::error::{Error, Result};

/// Two-dimensional principal-component coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection2D {
    pub tokens: Vec<String>,
    pub coords: Vec<[f64; 2]>,
    /// Share of the total variance carried by each component.
    pub explained: [f64; 2],
}

impl Projection2D {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["token", "x", "y"])?;
        for (t, [x, y]) in self.tokens.iter().zip(&self.coords) {
            w.write_record([t.clone(), x.to_string(), y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Singular values below this fraction of the data's magnitude count as zero,
/// so identical points project to the origin despite rounding in the mean.
const RANK_TOL: f64 = 1e-10;

/// Projects `subset` onto the top two principal components of its centred
/// vectors. Each component is signed so that its first nonzero loading is
/// positive.
pub fn pca2(table: &EmbeddingTable, subset: &[String]) -> Result<Projection2D> {
    if subset.len() < 3 {
        return Err(Error::invalid("PCA needs at least three tokens"));
    }
    let rows = table.lookup_all(subset)?;
    let (n, d) = (rows.len(), table.dim());
    let mut m = DMatrix::from_fn(n, d, |i, j| rows[i][j]);
    for j in 0..d {
        let mean = m.column(j).mean();
        m.column_mut(j).add_scalar_mut(-mean);
    }

    // Eigendecompose the smaller of the Gram and covariance matrices; this is
    // more stable than an iterative SVD for the leading directions.
    let use_gram = n <= d;
    let gram = if use_gram { &m * m.transpose() } else { m.transpose() * &m };
    let eig = gram.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambda = |c: usize| eig.eigenvalues[order[c]].max(0.0);
    let total: f64 = (0..order.len()).map(lambda).sum();
    let magnitude = rows.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())) * (n as f64).sqrt();

    let mut coords = vec![[0.0; 2]; n];
    let mut explained = [0.0; 2];
    for c in 0..2.min(order.len()) {
        let (l, s) = (lambda(c), lambda(c).sqrt());
        if s <= RANK_TOL * magnitude || total == 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(order[c]);
        let mut axis: Vec<f64> =
            if use_gram { (m.transpose() * v / s).iter().copied().collect() } else { v.iter().copied().collect() };
        let scale = axis.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if let Some(first) = axis.iter().find(|x| x.abs() > 1e-9 * scale) {
            if *first < 0.0 {
                axis.iter_mut().for_each(|x| *x = -*x);
            }
        }
        explained[c] = l / total;
        for (i, row) in m.row_iter().enumerate() {
            coords[i][c] = row.iter().zip(&axis).map(|(a, b)| a * b).sum();
        }
    }
    Ok(Projection2D { tokens: subset.to_vec(), coords, explained })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::embed::Provenance;

    fn table(rows: &[Vec<f64>]) -> (EmbeddingTable, Vec<String>) {
        let mut t = EmbeddingTable::new(rows[0].len(), Provenance::File);
        let names: Vec<String> = (0..rows.len()).map(|i| format!("t{i:03}")).collect();
        for (n, r) in names.iter().zip(rows) {
            t.insert(n.clone(), r.clone()).unwrap();
        }
        (t, names)
    }

    #[test]
    fn plane_in_high_dimension_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let basis: Vec<Vec<f64>> = (0..2).map(|_| (0..50).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        // Orthonormalize so plane coordinates map isometrically.
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let e1: Vec<f64> = basis[0].iter().map(|x| x / norm(&basis[0])).collect();
        let dot: f64 = basis[1].iter().zip(&e1).map(|(a, b)| a * b).sum();
        let r: Vec<f64> = basis[1].iter().zip(&e1).map(|(a, b)| a - dot * b).collect();
        let e2: Vec<f64> = r.iter().map(|x| x / norm(&r)).collect();
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| {
                let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-1.0..1.0));
                (0..50).map(|j| 7.0 + a * e1[j] + b * e2[j]).collect()
            })
            .collect();
        let (t, names) = table(&rows);
        let p = pca2(&t, &names).unwrap();
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                let orig = rows[i].iter().zip(&rows[j]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let proj =
                    ((p.coords[i][0] - p.coords[j][0]).powi(2) + (p.coords[i][1] - p.coords[j][1]).powi(2)).sqrt();
                assert!((orig - proj).abs() < 1e-9, "{orig} {proj}");
            }
        }
        assert!((p.explained[0] + p.explained[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn identical_points_project_to_origin() {
        for v in [vec![1.5, -2.0, 3.0], vec![0.1, 0.7, -1e6]] {
            let (t, names) = table(&vec![v; 7]);
            let p = pca2(&t, &names).unwrap();
            assert!(p.coords.iter().all(|c| *c == [0.0, 0.0]));
            assert_eq!(p.explained, [0.0, 0.0]);
        }
    }

    #[test]
    fn explained_variance_ordered_and_centred() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rows: Vec<Vec<f64>> = (0..30).map(|_| (0..6).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let (t, names) = table(&rows);
        let p = pca2(&t, &names).unwrap();
        assert!(p.explained[0] >= p.explained[1] && p.explained[1] >= 0.0 && p.explained[0] <= 1.0);
        for axis in 0..2 {
            assert!(p.coords.iter().map(|c| c[axis]).sum::<f64>().abs() < 1e-9);
        }
        assert!(pca2(&t, &names[..2]).is_err());
    }
}
