//! Bundled data: sepal length and width (cm) of Anderson's iris flowers, 50
//! plants per species.

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::io::parse_csv;

pub const IRIS_SETOSA_SEPAL: &str = include_str!("../data/iris_setosa_sepal.csv");
pub const IRIS_VERSICOLOR_SEPAL: &str = include_str!("../data/iris_versicolor_sepal.csv");
pub const IRIS_VIRGINICA_SEPAL: &str = include_str!("../data/iris_virginica_sepal.csv");

pub const IRIS_SPECIES: [&str; 3] = ["setosa", "versicolor", "virginica"];

/// Sepal measurements of one species, with column labels.
pub fn iris_sepal(species: &str) -> Result<DataMatrix> {
    let text = match species {
        "setosa" => IRIS_SETOSA_SEPAL,
        "versicolor" => IRIS_VERSICOLOR_SEPAL,
        "virginica" => IRIS_VIRGINICA_SEPAL,
        _ => return Err(Error::Parameter(format!("no iris species '{species}'"))),
    };
    parse_csv(text, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::column_mean;

    #[test]
    fn species_means() {
        for (name, mean) in
            IRIS_SPECIES
                .iter()
                .zip([[5.006, 3.428], [5.936, 2.770], [6.588, 2.974]])
        {
            let x = iris_sepal(name).unwrap();
            assert_eq!((x.nrows(), x.ncols()), (50, 2));
            let m = column_mean(&x);
            assert!(
                (m[0] - mean[0]).abs() < 1e-9 && (m[1] - mean[1]).abs() < 1e-9,
                "{name}"
            );
        }
    }
}
