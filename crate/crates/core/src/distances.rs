//! Country registry and the four country-pair cultural distances.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius in kilometres.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// One registry entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryRecord {
    pub iso: String,
    pub name: String,
    #[serde(default)]
    pub demonyms: Vec<String>,
    /// Capital `[lat, lon]` in degrees.
    #[serde(default)]
    pub capital: Option<[f64; 2]>,
    /// Inglehart–Welzel `[traditional/secular, survival/self-expression]`.
    #[serde(default)]
    pub iw: Option<[f64; 2]>,
}

impl CountryRecord {
    pub fn new(iso: &str, name: &str) -> Self {
        Self { iso: iso.to_string(), name: name.to_string(), demonyms: vec![], capital: None, iw: None }
    }

    pub fn with_capital(mut self, lat: f64, lon: f64) -> Self {
        self.capital = Some([lat, lon]);
        self
    }

    pub fn with_iw(mut self, traditional: f64, survival: f64) -> Self {
        self.iw = Some([traditional, survival]);
        self
    }

    pub fn with_demonyms(mut self, demonyms: &[&str]) -> Self {
        self.demonyms = demonyms.iter().map(|d| d.to_string()).collect();
        self
    }
}

/// Countries keyed by upper-case ISO alpha-2 code.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    countries: BTreeMap<String, CountryRecord>,
}

impl Registry {
    pub fn new(records: Vec<CountryRecord>) -> Result<Self> {
        let mut countries = BTreeMap::new();
        for mut rec in records {
            rec.iso = rec.iso.trim().to_ascii_uppercase();
            if rec.iso.len() != 2 || !rec.iso.bytes().all(|b| b.is_ascii_uppercase()) {
                return Err(Error::Parse { context: "registry".into(), message: format!("invalid ISO code {:?}", rec.iso) });
            }
            if let Some([lat, lon]) = rec.capital {
                if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                    return Err(Error::Parse {
                        context: "registry".into(),
                        message: format!("{}: capital ({lat}, {lon}) out of range", rec.iso),
                    });
                }
            }
            if countries.contains_key(&rec.iso) {
                return Err(Error::Parse { context: "registry".into(), message: format!("duplicate ISO code {}", rec.iso) });
            }
            countries.insert(rec.iso.clone(), rec);
        }
        Ok(Self { countries })
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let records: Vec<CountryRecord> = serde_json::from_str(s)
            .map_err(|e| Error::Parse { context: "registry".into(), message: e.to_string() })?;
        Self::new(records)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse { context: path.display().to_string(), message },
            other => other,
        })
    }

    pub fn get(&self, iso: &str) -> Option<&CountryRecord> {
        self.countries.get(iso)
    }

    pub fn contains(&self, iso: &str) -> bool {
        self.countries.contains_key(iso)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CountryRecord> {
        self.countries.values()
    }

    pub fn len(&self) -> usize {
        self.countries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.countries.is_empty()
    }

    fn require(&self, iso: &str) -> Result<&CountryRecord> {
        self.get(iso).ok_or_else(|| Error::UnknownCountry(iso.to_string()))
    }
}

/// Euclidean distance on the Inglehart–Welzel map.
pub fn iw_distance(a: &CountryRecord, b: &CountryRecord) -> Result<f64> {
    let pa = a.iw.ok_or_else(|| Error::MissingCoordinates(a.iso.clone()))?;
    let pb = b.iw.ok_or_else(|| Error::MissingCoordinates(b.iso.clone()))?;
    Ok((pa[0] - pb[0]).hypot(pa[1] - pb[1]))
}

/// Haversine great-circle distance between capitals, in kilometres.
pub fn geo_distance(a: &CountryRecord, b: &CountryRecord) -> Result<f64> {
    let [lat1, lon1] = a.capital.ok_or_else(|| Error::MissingCoordinates(a.iso.clone()))?;
    let [lat2, lon2] = b.capital.ok_or_else(|| Error::MissingCoordinates(b.iso.clone()))?;
    Ok(haversine_km(lat1, lon1, lat2, lon2))
}

pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceKind {
    Iw,
    Geo,
    Linguistic,
    Religious,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 4] = [Self::Iw, Self::Geo, Self::Linguistic, Self::Religious];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Iw => "iw",
            Self::Geo => "geo",
            Self::Linguistic => "linguistic",
            Self::Religious => "religious",
        }
    }
}

impl fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DistanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iw" => Ok(Self::Iw),
            "geo" => Ok(Self::Geo),
            "linguistic" => Ok(Self::Linguistic),
            "religious" => Ok(Self::Religious),
            other => Err(Error::InvalidParameter(format!("unknown distance kind {other:?}"))),
        }
    }
}

fn pair_key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

/// Symmetric country-pair distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    kind: DistanceKind,
    entries: BTreeMap<(String, String), f64>,
}

#[derive(Debug, Deserialize)]
struct DistanceRow {
    iso_a: String,
    iso_b: String,
    distance: f64,
}

impl DistanceMatrix {
    pub fn new(kind: DistanceKind) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }

    /// Insert a pair; re-inserting the same unordered pair with another value
    /// is a `ConflictingEntry`.
    pub fn insert(&mut self, a: &str, b: &str, distance: f64) -> Result<()> {
        if !(distance >= 0.0 && distance.is_finite()) {
            return Err(Error::InvalidParameter(format!("distance {distance} for ({a}, {b})")));
        }
        if a == b && distance != 0.0 {
            return Err(Error::ConflictingEntry(a.to_string(), b.to_string()));
        }
        let key = pair_key(a, b);
        match self.entries.get(&key) {
            Some(existing) if *existing != distance => Err(Error::ConflictingEntry(key.0, key.1)),
            _ => {
                self.entries.insert(key, distance);
                Ok(())
            }
        }
    }

    /// Distance for an unordered pair. A country is at distance 0 from
    /// itself; any other pair not on file is `MissingPair`.
    pub fn get(&self, a: &str, b: &str) -> Result<f64> {
        if a == b {
            return Ok(0.0);
        }
        self.entries
            .get(&pair_key(a, b))
            .copied()
            .ok_or_else(|| Error::MissingPair(a.to_string(), b.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.entries.iter().map(|((a, b), d)| (a.as_str(), b.as_str(), *d))
    }

    /// Read `iso_a,iso_b,distance` CSV, validating codes against the registry.
    pub fn from_csv_reader<R: Read>(reader: R, kind: DistanceKind, registry: &Registry, context: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut matrix = Self::new(kind);
        for (i, row) in rdr.deserialize::<DistanceRow>().enumerate() {
            let row = row.map_err(|e| {
                if matches!(e.kind(), csv::ErrorKind::Io(_)) {
                    Error::Io(e.to_string())
                } else {
                    Error::Parse { context: format!("{context}:{}", i + 2), message: e.to_string() }
                }
            })?;
            let a = row.iso_a.to_ascii_uppercase();
            let b = row.iso_b.to_ascii_uppercase();
            registry.require(&a)?;
            registry.require(&b)?;
            matrix.insert(&a, &b, row.distance)?;
        }
        Ok(matrix)
    }

    /// Load a linguistic or religious distance file.
    pub fn load(path: &Path, kind: DistanceKind, registry: &Registry) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file, kind, registry, &path.display().to_string())
    }

    /// IW or geographic distances for every registry pair with coordinates.
    pub fn from_registry(registry: &Registry, kind: DistanceKind) -> Result<Self> {
        let f: fn(&CountryRecord, &CountryRecord) -> Result<f64> = match kind {
            DistanceKind::Iw => iw_distance,
            DistanceKind::Geo => geo_distance,
            other => return Err(Error::InvalidParameter(format!("{other} distances are load-only"))),
        };
        let mut matrix = Self::new(kind);
        let records: Vec<&CountryRecord> = registry.iter().collect();
        for (i, a) in records.iter().enumerate() {
            for b in &records[i + 1..] {
                match f(a, b) {
                    Ok(d) => matrix.insert(&a.iso, &b.iso, d)?,
                    Err(Error::MissingCoordinates(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(matrix)
    }

    /// Countries appearing in at least one pair.
    pub fn countries(&self) -> BTreeSet<&str> {
        self.entries.keys().flat_map(|(a, b)| [a.as_str(), b.as_str()]).collect()
    }
}
