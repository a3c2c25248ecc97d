//! Shape file format.
//!
//! ```json
//! { "d": 2, "components": [ { "center": [0.0, 0.0],
//!   "grid": { "kind": "uniform-angle", "n": 64 }, "radial": [ ... ] } ] }
//! ```

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{GridKind, SphereGrid};
use super::shape::{Configuration, StarShape};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub kind: GridKind,
    pub n: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentRecord {
    pub center: Vec<f64>,
    pub grid: GridSpec,
    pub radial: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeFile {
    pub d: usize,
    pub components: Vec<ComponentRecord>,
}

impl ShapeFile {
    pub fn from_configuration(config: &Configuration) -> Self {
        let d = config.dim().unwrap_or(2);
        let components = config
            .components()
            .iter()
            .map(|s| ComponentRecord {
                center: s.center().to_vec(),
                grid: GridSpec {
                    kind: s.grid().kind(),
                    n: s.grid().resolution(),
                },
                radial: s.radii().to_vec(),
            })
            .collect();
        ShapeFile { d, components }
    }

    /// Validates every invariant and builds the configuration. Components
    /// with equal grid specs share one grid.
    pub fn to_configuration(&self) -> Result<Configuration> {
        if self.d != 2 && self.d != 3 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        let mut grids: HashMap<(GridKind, usize), Arc<SphereGrid>> = HashMap::new();
        let mut shapes = Vec::with_capacity(self.components.len());
        for (i, rec) in self.components.iter().enumerate() {
            if rec.grid.kind.dimension() != self.d {
                return Err(Error::ShapeFile(format!(
                    "component {i}: grid kind {:?} does not match d = {}",
                    rec.grid.kind, self.d
                )));
            }
            let grid = match grids.get(&(rec.grid.kind, rec.grid.n)) {
                Some(g) => Arc::clone(g),
                None => {
                    let g = Arc::new(SphereGrid::new(rec.grid.kind, rec.grid.n)?);
                    grids.insert((rec.grid.kind, rec.grid.n), Arc::clone(&g));
                    g
                }
            };
            let shape = StarShape::new(grid, &rec.center, rec.radial.clone())
                .map_err(|e| Error::ShapeFile(format!("component {i}: {e}")))?;
            shapes.push(shape);
        }
        Configuration::new(shapes)
    }
}

pub fn to_json(config: &Configuration) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ShapeFile::from_configuration(
        config,
    ))?)
}

pub fn from_json(text: &str) -> Result<Configuration> {
    let file: ShapeFile = serde_json::from_str(text)?;
    file.to_configuration()
}

pub fn write_shape_file(path: &Path, config: &Configuration) -> Result<()> {
    std::fs::write(path, to_json(config)?)?;
    Ok(())
}

pub fn read_shape_file(path: &Path) -> Result<Configuration> {
    from_json(&std::fs::read_to_string(path)?)
}
