use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const MAX_POINTS: usize = 1_000_000;

/// A list of abscissas, written either as `start:stop:step` (stop included when
/// it lies on the lattice), as a comma list, or as a single number.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    fn checked(values: Vec<f64>) -> Result<Self, String> {
        if values.is_empty() {
            return Err("empty grid".into());
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(format!("non-finite grid value {v}"));
        }
        Ok(Grid(values))
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", t.trim()))
        };
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            let [start, stop, step] = parts[..] else {
                return Err(format!("range `{s}` must have the form start:stop:step"));
            };
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if !(step > 0.0) || !(stop >= start) {
                return Err(format!("range `{s}` needs step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() + 1.0;
            if !(count <= MAX_POINTS as f64) {
                return Err(format!("range `{s}` has more than {MAX_POINTS} points"));
            }
            return Grid::checked(
                (0..count as usize)
                    .map(|i| start + i as f64 * step)
                    .collect(),
            );
        }
        Grid::checked(s.split(',').map(num).collect::<Result<_, _>>()?)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            One(f64),
            Many(Vec<f64>),
            Text(String),
        }
        let grid = match Raw::deserialize(d)? {
            Raw::One(v) => Grid::checked(vec![v]),
            Raw::Many(v) => Grid::checked(v),
            Raw::Text(s) => s.parse(),
        };
        grid.map_err(serde::de::Error::custom)
    }
}
