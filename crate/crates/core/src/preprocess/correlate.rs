//! Pairwise-complete Pearson correlation.

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::Matrix;
use crate::table::{ColumnKind, Table};
use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

/// Pearson correlation matrix over the named numeric columns.
///
/// Each pair is computed over the rows where both cells are present. The
/// result is symmetric with a unit diagonal; a pair with fewer than two
/// co-present rows or zero variance in its co-present subsample is an
/// undefined-correlation error.
pub fn correlation_matrix(table: &Table, columns: &[&str]) -> Result<Matrix> {
    let mut cells: Vec<&[Option<f64>]> = Vec::with_capacity(columns.len());
    for &name in columns {
        let col = table.column(name)?;
        if col.kind() != ColumnKind::Numeric {
            return Err(Error::Kind {
                column: name.to_string(),
                expected: "numeric",
            });
        }
        cells.push(col.numeric_values()?);
    }

    let p = columns.len();
    let mut out = Matrix::zeros(p, p);
    for i in 0..p {
        out.set(i, i, 1.0);
        for j in (i + 1)..p {
            let r = pairwise_pearson(cells[i], cells[j], columns[i], columns[j])?;
            out.set(i, j, r);
            out.set(j, i, r);
        }
    }
    Ok(out)
}

fn pairwise_pearson(
    a: &[Option<f64>],
    b: &[Option<f64>],
    name_a: &str,
    name_b: &str,
) -> Result<f64> {
    let pairs: Vec<(f64, f64)> = a
        .iter()
        .zip(b.iter())
        .filter_map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => Some((*x, *y)),
            _ => None,
        })
        .collect();
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "columns {name_a} and {name_b} share only {} co-present rows",
            pairs.len()
        )));
    }
    let mx = math::mean(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let my = math::mean(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in &pairs {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            name_a.to_string(),
            name_b.to_string(),
        ));
    }
    // clamp to [-1, 1] against rounding at the boundary
    Ok((sxy / math::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::{Column, Role};
    use alloc::vec;

    fn table2(x: Vec<Option<f64>>, y: Vec<Option<f64>>) -> Table {
        Table::new(vec![
            Column::numeric("x", Role::Independent, x).unwrap(),
            Column::numeric("y", Role::Independent, y).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn exact_linear_relation() {
        let t = table2(
            vec![Some(1.0), Some(2.0), Some(3.0)],
            vec![Some(2.0), Some(4.0), Some(6.0)],
        );
        let m = correlation_matrix(&t, &["x", "y"]).unwrap();
        assert_eq!(m.get(0, 1), 1.0);
        assert_eq!(m.get(0, 0), 1.0);
    }

    #[test]
    fn exact_inverse_relation() {
        let t = table2(
            vec![Some(1.0), Some(2.0), Some(3.0)],
            vec![Some(3.0), Some(2.0), Some(1.0)],
        );
        let m = correlation_matrix(&t, &["x", "y"]).unwrap();
        assert_eq!(m.get(0, 1), -1.0);
    }

    #[test]
    fn half_correlation() {
        let t = table2(
            vec![Some(1.0), Some(2.0), Some(3.0)],
            vec![Some(1.0), Some(3.0), Some(2.0)],
        );
        let m = correlation_matrix(&t, &["x", "y"]).unwrap();
        assert!((m.get(0, 1) - 0.5).abs() < 1e-12);
        assert_eq!(m.get(0, 1), m.get(1, 0));
    }

    #[test]
    fn pairwise_deletion() {
        let t = table2(
            vec![Some(1.0), Some(2.0), None, Some(4.0)],
            vec![Some(2.0), Some(4.0), Some(77.0), Some(8.0)],
        );
        let m = correlation_matrix(&t, &["x", "y"]).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_pair_undefined() {
        let t = table2(
            vec![Some(1.0), Some(1.0), Some(1.0)],
            vec![Some(1.0), Some(2.0), Some(3.0)],
        );
        assert!(matches!(
            correlation_matrix(&t, &["x", "y"]),
            Err(Error::UndefinedCorrelation(_, _))
        ));
    }

    #[test]
    fn affine_rescaling_invariance() {
        let mut rng = crate::rng::SplitMix64::new(4);
        let x: Vec<Option<f64>> = (0..100).map(|_| Some(rng.next_normal())).collect();
        let y: Vec<Option<f64>> = x
            .iter()
            .map(|v| Some(v.unwrap() * 0.5 + rng.next_normal()))
            .collect();
        let scaled: Vec<Option<f64>> = x.iter().map(|v| Some(v.unwrap() * 3.5 + 11.0)).collect();
        let t1 = table2(x, y.clone());
        let t2 = table2(scaled, y);
        let m1 = correlation_matrix(&t1, &["x", "y"]).unwrap();
        let m2 = correlation_matrix(&t2, &["x", "y"]).unwrap();
        assert!((m1.get(0, 1) - m2.get(0, 1)).abs() < 1e-9);
    }
}
