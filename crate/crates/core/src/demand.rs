//! Origin–destination demand and the block-structured trips format.
//!
//! Trips files look like:
//!
//! ```text
//! <NUMBER OF ZONES> 3
//! Origin 1
//!   2 : 0.2;  3 : 0.1;
//! Origin 2
//!   1 : 0.2;
//! ```
//!
//! `#` starts a comment; entries are `destination : demand;` and may share lines.

use crate::error::{Error, Result};
use crate::network::{parse_scalar, ZoneId};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DemandTable<S = f64> {
    zones: u32,
    /// Row-major `zones x zones` matrix, origins by row.
    q: Vec<S>,
}

impl<S: Scalar> DemandTable<S> {
    /// Builds a table from a dense row-major matrix. Entries must be
    /// non-negative and finite, and the diagonal must be zero.
    pub fn new(zones: u32, q: Vec<S>) -> Result<Self> {
        let n = zones as usize;
        if q.len() != n * n {
            return Err(Error::invalid(format!(
                "demand matrix has {} entries, expected {n}x{n}",
                q.len()
            )));
        }
        for (i, &v) in q.iter().enumerate() {
            if !(v >= S::zero()) || !v.is_finite() {
                return Err(Error::invalid(format!(
                    "demand from zone {} to zone {} is not a finite non-negative number",
                    i / n + 1,
                    i % n + 1
                )));
            }
        }
        for r in 0..n {
            if q[r * n + r] != S::zero() {
                return Err(Error::invalid(format!("demand diagonal must be zero (zone {})", r + 1)));
            }
        }
        Ok(DemandTable { zones, q })
    }

    pub fn empty(zones: u32) -> Self {
        DemandTable { zones, q: vec![S::zero(); zones as usize * zones as usize] }
    }

    pub fn zones(&self) -> u32 {
        self.zones
    }

    pub fn get(&self, origin: ZoneId, destination: ZoneId) -> S {
        self.q[(origin.0 as usize - 1) * self.zones as usize + (destination.0 as usize - 1)]
    }

    pub fn set(&mut self, origin: ZoneId, destination: ZoneId, demand: S) -> Result<()> {
        if origin == destination && demand != S::zero() {
            return Err(Error::invalid("demand diagonal must be zero"));
        }
        if !(demand >= S::zero()) || !demand.is_finite() {
            return Err(Error::invalid("demand must be a finite non-negative number"));
        }
        self.q[(origin.0 as usize - 1) * self.zones as usize + (destination.0 as usize - 1)] = demand;
        Ok(())
    }

    pub fn total(&self) -> S {
        self.q.iter().copied().sum()
    }

    /// Ordered (origin, destination, demand) triples with positive demand.
    pub fn positive_pairs(&self) -> impl Iterator<Item = (ZoneId, ZoneId, S)> + '_ {
        let n = self.zones as usize;
        self.q.iter().enumerate().filter_map(move |(i, &v)| {
            (v > S::zero()).then(|| (ZoneId((i / n) as u32 + 1), ZoneId((i % n) as u32 + 1), v))
        })
    }

    /// Destinations with positive demand from one origin.
    pub(crate) fn destinations_from(&self, origin_index: usize) -> impl Iterator<Item = (usize, S)> + '_ {
        let n = self.zones as usize;
        self.q[origin_index * n..(origin_index + 1) * n]
            .iter()
            .enumerate()
            .filter_map(|(s, &v)| (v > S::zero()).then_some((s, v)))
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.zones as usize;
        (0..n).all(|r| (0..n).all(|s| self.q[r * n + s] == self.q[s * n + r]))
    }
}

/// Parses the trips format described in the module docs.
pub fn parse_trips<S: Scalar>(text: &str) -> Result<DemandTable<S>> {
    let mut declared_zones: Option<u32> = None;
    let mut entries: Vec<(usize, u32, u32, S)> = Vec::new();
    let mut origin: Option<u32> = None;
    let mut max_zone = 0u32;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('<') {
            if line.to_ascii_uppercase().starts_with("<NUMBER OF ZONES>") {
                let after = line.rfind('>').map(|p| line[p + 1..].trim()).unwrap_or("");
                declared_zones = Some(
                    after
                        .parse::<u32>()
                        .map_err(|_| Error::parse(lineno, format!("bad zone count in `{line}`")))?,
                );
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("Origin").or_else(|| line.strip_prefix("ORIGIN")) {
            let id: u32 = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad origin id in `{line}`")))?;
            if id == 0 {
                return Err(Error::parse(lineno, "origin id must be positive"));
            }
            origin = Some(id);
            max_zone = max_zone.max(id);
            continue;
        }
        let r = origin.ok_or_else(|| Error::parse(lineno, "demand entry before any `Origin` header"))?;
        for part in line.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (dest, value) = part
                .split_once(':')
                .ok_or_else(|| Error::parse(lineno, format!("expected `destination : demand;`, found `{part}`")))?;
            let s: u32 = dest
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("destination `{}` is not a zone id", dest.trim())))?;
            if s == 0 {
                return Err(Error::parse(lineno, "destination id must be positive"));
            }
            let q: S = parse_scalar(value.trim(), lineno, "demand")?;
            if q < S::zero() {
                return Err(Error::parse(lineno, "demand must be non-negative"));
            }
            max_zone = max_zone.max(s);
            entries.push((lineno, r, s, q));
        }
    }

    let zones = match declared_zones {
        Some(z) if z < max_zone => {
            return Err(Error::invalid(format!(
                "metadata declares {z} zones but zone {max_zone} appears in a trip entry"
            )))
        }
        Some(z) => z,
        None => max_zone,
    };
    if zones == 0 {
        return Err(Error::invalid("trips file declares no zones"));
    }
    let mut table = DemandTable::empty(zones);
    for (lineno, r, s, q) in entries {
        if r == s {
            if q != S::zero() {
                return Err(Error::parse(lineno, format!("self-demand at zone {r} must be zero")));
            }
            continue;
        }
        table.set(ZoneId(r), ZoneId(s), q).map_err(|e| Error::parse(lineno, e.to_string()))?;
    }
    Ok(table)
}

/// Writes a table in the same format `parse_trips` reads.
pub fn serialize_trips<S: Scalar>(table: &DemandTable<S>) -> String {
    let mut out = String::new();
    out.push_str(&format!("<NUMBER OF ZONES> {}\n", table.zones()));
    for r in 1..=table.zones() {
        let row: Vec<String> = (1..=table.zones())
            .filter_map(|s| {
                let q = table.get(ZoneId(r), ZoneId(s));
                (q > S::zero()).then(|| format!("{s} : {q};"))
            })
            .collect();
        if !row.is_empty() {
            out.push_str(&format!("Origin {r}\n  {}\n", row.join("  ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIPS: &str = "\
<NUMBER OF ZONES> 3
# weekday demand
Origin 1
  2 : 0.25;  3 : 0.5;
Origin 3
  1 : 0.5;
";

    #[test]
    fn parses_origin_blocks() {
        let t: DemandTable = parse_trips(TRIPS).unwrap();
        assert_eq!(t.zones(), 3);
        assert_eq!(t.get(ZoneId(1), ZoneId(2)), 0.25);
        assert_eq!(t.get(ZoneId(1), ZoneId(3)), 0.5);
        assert_eq!(t.get(ZoneId(3), ZoneId(1)), 0.5);
        assert_eq!(t.get(ZoneId(2), ZoneId(1)), 0.0);
        assert_eq!(t.total(), 1.25);
    }

    #[test]
    fn round_trips_through_serialize() {
        let t: DemandTable = parse_trips(TRIPS).unwrap();
        let again: DemandTable = parse_trips(&serialize_trips(&t)).unwrap();
        assert_eq!(t, again);
    }

    #[test]
    fn rejects_malformed_entries() {
        assert!(parse_trips::<f64>("2 : 1.0;\n").is_err(), "entry before Origin");
        assert!(parse_trips::<f64>("Origin 1\n2 ; 1.0\n").is_err(), "missing colon");
        assert!(parse_trips::<f64>("Origin 1\n2 : -1.0;\n").is_err(), "negative demand");
        assert!(parse_trips::<f64>("Origin 1\n1 : 1.0;\n").is_err(), "self demand");
        assert!(parse_trips::<f64>("<NUMBER OF ZONES> 1\nOrigin 1\n2 : 1.0;\n").is_err(), "zone overflow");
    }

    #[test]
    fn positive_pairs_iterates_in_row_order() {
        let t: DemandTable = parse_trips(TRIPS).unwrap();
        let pairs: Vec<_> = t.positive_pairs().collect();
        assert_eq!(
            pairs,
            vec![
                (ZoneId(1), ZoneId(2), 0.25),
                (ZoneId(1), ZoneId(3), 0.5),
                (ZoneId(3), ZoneId(1), 0.5),
            ]
        );
    }
}
