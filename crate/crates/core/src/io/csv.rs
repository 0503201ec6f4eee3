//! Self-describing CSV grid files.
//!
//! ```text
//! # model=axisym coords=rho,z dims=3x2 origin=1,0 spacing=0.5,0.5
//! # columns=rho,z,f,omega
//! 1.0000000000000000e0,0.0000000000000000e0,...
//! ```
//!
//! One row per grid point in row-major order, every number with 17
//! significant digits.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct GridData {
    pub model: String,
    pub grid: GridSpec,
    pub names: Vec<String>,
    pub fields: Vec<Array2<f64>>,
}

impl GridData {
    pub fn new(model: &str, grid: GridSpec, named: Vec<(&str, Array2<f64>)>) -> Result<Self> {
        for (name, f) in &named {
            if f.dim() != (grid.dims[0], grid.dims[1]) {
                return Err(Error::InvalidGrid(format!("column {name} has shape {:?}", f.dim())));
            }
        }
        let (names, fields) = named.into_iter().map(|(n, f)| (n.to_string(), f)).unzip();
        Ok(GridData { model: model.to_string(), grid, names, fields })
    }

    pub fn field(&self, name: &str) -> Option<&Array2<f64>> {
        self.names.iter().position(|n| n == name).map(|i| &self.fields[i])
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_string(data: &GridData) -> String {
    let g = &data.grid;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# model={} coords={},{} dims={}x{} origin={},{} spacing={},{}",
        data.model,
        g.coord_names[0],
        g.coord_names[1],
        g.dims[0],
        g.dims[1],
        num(g.origin[0]),
        num(g.origin[1]),
        num(g.spacing[0]),
        num(g.spacing[1]),
    );
    let mut cols = g.coord_names.to_vec();
    cols.extend(data.names.iter().cloned());
    let _ = writeln!(out, "# columns={}", cols.join(","));
    for i in 0..g.dims[0] {
        for j in 0..g.dims[1] {
            let [x0, x1] = g.point(i, j);
            out.push_str(&num(x0));
            out.push(',');
            out.push_str(&num(x1));
            for f in &data.fields {
                out.push(',');
                out.push_str(&num(f[[i, j]]));
            }
            out.push('\n');
        }
    }
    out
}

pub fn write(path: &Path, data: &GridData) -> Result<()> {
    std::fs::write(path, to_string(data))?;
    Ok(())
}

fn pair<T: std::str::FromStr>(s: &str, sep: char, what: &str) -> Result<[T; 2]> {
    let bad = || Error::Parse(format!("bad {what}: {s:?}"));
    let (a, b) = s.split_once(sep).ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

/// Parses a grid file. Periodicity is not recorded in the format, so both
/// axes come back non-periodic.
pub fn parse(text: &str) -> Result<GridData> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| Error::Parse("missing '#' header line".into()))?;
    let mut model = None;
    let mut coords = None;
    let mut dims = None;
    let mut origin = None;
    let mut spacing = None;
    for kv in header.split_whitespace() {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad header entry {kv:?}")))?;
        match k {
            "model" => model = Some(v.to_string()),
            "coords" => coords = Some(pair::<String>(v, ',', "coords")?),
            "dims" => dims = Some(pair::<usize>(v, 'x', "dims")?),
            "origin" => origin = Some(pair::<f64>(v, ',', "origin")?),
            "spacing" => spacing = Some(pair::<f64>(v, ',', "spacing")?),
            _ => return Err(Error::Parse(format!("unknown header key {k:?}"))),
        }
    }
    let missing = |k: &str| Error::Parse(format!("header lacks {k}"));
    let model = model.ok_or_else(|| missing("model"))?;
    let coords = coords.ok_or_else(|| missing("coords"))?;
    let dims = dims.ok_or_else(|| missing("dims"))?;
    let grid = GridSpec::new(
        [coords[0].as_str(), coords[1].as_str()],
        origin.ok_or_else(|| missing("origin"))?,
        spacing.ok_or_else(|| missing("spacing"))?,
        dims,
        [false; 2],
    )?;

    let mut rows = lines.filter(|l| !l.trim().is_empty()).peekable();
    let names: Vec<String> = match rows.peek().and_then(|l| l.strip_prefix("# columns=")) {
        Some(cols) => {
            let cols: Vec<String> = cols.split(',').map(|s| s.trim().to_string()).collect();
            rows.next();
            if cols.len() < 2 || cols[..2] != coords {
                return Err(Error::Parse("columns line must start with the coordinate names".into()));
            }
            cols[2..].to_vec()
        }
        None => Vec::new(),
    };

    let mut values: Vec<Vec<f64>> = Vec::with_capacity(dims[0] * dims[1]);
    for (r, line) in rows.enumerate() {
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("row {r}: {e}")))?;
        values.push(vals);
    }
    if values.len() != dims[0] * dims[1] {
        return Err(Error::Parse(format!("expected {} rows, found {}", dims[0] * dims[1], values.len())));
    }
    let width = values[0].len();
    if width < 2 || values.iter().any(|v| v.len() != width) {
        return Err(Error::Parse("rows have inconsistent column counts".into()));
    }
    let names = if names.is_empty() { (0..width - 2).map(|c| format!("field{}", c + 1)).collect() } else { names };
    if names.len() != width - 2 {
        return Err(Error::Parse(format!("{} column names for {} fields", names.len(), width - 2)));
    }
    let fields = (0..width - 2)
        .map(|c| Array2::from_shape_fn((dims[0], dims[1]), |(i, j)| values[i * dims[1] + j][c + 2]))
        .collect();
    Ok(GridData { model, grid, names, fields })
}

pub fn read(path: &Path) -> Result<GridData> {
    parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_lossless() {
        let grid = GridSpec::from_extents(["rho", "z"], [1.0, -1.0], [3.0, 1.0], [6, 7], [false; 2]).unwrap();
        let f = grid.sample(|[r, z]| (r * z).sin() / 3.0);
        let data = GridData::new("axisym", grid, vec![("f", f)]).unwrap();
        let text = to_string(&data);
        assert!(text.starts_with("# model=axisym coords=rho,z dims=6x7 origin="));
        let back = parse(&text).unwrap();
        assert_eq!(back, data);
        assert_eq!(to_string(&back), text);
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse("1,2,3"), Err(Error::Parse(_))));
        assert!(matches!(
            parse("# model=a coords=x,y dims=5x5 origin=0,0 spacing=1,1\n1,2\n"),
            Err(Error::Parse(_))
        ));
    }
}
