//! Directed road network: zones, links, and the text format they ship in.
//!
//! The on-disk format is whitespace-delimited rows `from to capacity
//! free_flow_time`, one link per row, with `#` comments and optional
//! `<NUMBER OF ZONES>` / `<NUMBER OF LINKS>` metadata headers. Link ids are
//! assigned by row order, starting at 1.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// 1-based link identifier; equals the link's row position in the network file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkId(pub u32);

/// 1-based zone identifier. Every node is a zone (centroid).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ZoneId(pub u32);

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for ZoneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Link<S = f64> {
    pub id: LinkId,
    pub from: ZoneId,
    pub to: ZoneId,
    /// Pre-disaster capacity, in the same unit family as demand (10^3 veh/h).
    pub capacity: S,
    /// Free-flow travel time in minutes.
    pub free_flow_time: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network<S = f64> {
    zones: u32,
    links: Vec<Link<S>>,
    /// Outgoing link indices per zone, ascending link id.
    out: Vec<Vec<u32>>,
}

/// Options honored while reading a network file.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Permit multiple links with the same (from, to) pair.
    pub allow_parallel_links: bool,
}

impl<S: Scalar> Network<S> {
    /// Builds a network from explicit links. Ids must be contiguous from 1 in
    /// order; endpoints must lie in `1..=zones`; capacities and free-flow
    /// times must be positive. Parallel links are allowed here — the file
    /// parser enforces the `allow_parallel_links` flag.
    pub fn new(zones: u32, links: Vec<Link<S>>) -> Result<Self> {
        if zones == 0 {
            return Err(Error::invalid("network must have at least one zone"));
        }
        for (i, link) in links.iter().enumerate() {
            if link.id.0 as usize != i + 1 {
                return Err(Error::invalid(format!(
                    "link ids must be contiguous from 1: position {} holds id {}",
                    i + 1,
                    link.id
                )));
            }
            for zone in [link.from, link.to] {
                if zone.0 == 0 || zone.0 > zones {
                    return Err(Error::UnknownZone(zone));
                }
            }
            if link.from == link.to {
                return Err(Error::invalid(format!("link {} is a self-loop at zone {}", link.id, link.from)));
            }
            if link.capacity <= S::zero() {
                return Err(Error::invalid(format!("link {} has non-positive capacity", link.id)));
            }
            if link.free_flow_time <= S::zero() {
                return Err(Error::invalid(format!("link {} has non-positive free-flow time", link.id)));
            }
        }
        let mut out = vec![Vec::new(); zones as usize];
        for (i, link) in links.iter().enumerate() {
            out[(link.from.0 - 1) as usize].push(i as u32);
        }
        Ok(Network { zones, links, out })
    }

    pub fn zones(&self) -> u32 {
        self.zones
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link<S>] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> Result<&Link<S>> {
        self.links
            .get(self.index_of(id).ok_or(Error::UnknownLink(id))?)
            .ok_or(Error::UnknownLink(id))
    }

    /// 0-based position of a link id, if it exists.
    pub fn index_of(&self, id: LinkId) -> Option<usize> {
        if id.0 == 0 || id.0 as usize > self.links.len() {
            None
        } else {
            Some((id.0 - 1) as usize)
        }
    }

    /// Outgoing link indices (0-based) of a zone index (0-based), ascending link id.
    pub(crate) fn out_links(&self, zone_index: usize) -> &[u32] {
        &self.out[zone_index]
    }
}

/// Parses the delimited network format described in the module docs.
pub fn parse_network<S: Scalar>(text: &str, options: &ParseOptions) -> Result<Network<S>> {
    let mut declared_zones: Option<u32> = None;
    let mut declared_links: Option<usize> = None;
    let mut rows: Vec<(usize, ZoneId, ZoneId, S, S)> = Vec::new();
    let mut max_zone = 0u32;

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('<') {
            let upper = line.to_ascii_uppercase();
            if upper.starts_with("<NUMBER OF ZONES>") {
                declared_zones = Some(parse_metadata_count(line, lineno)? as u32);
            } else if upper.starts_with("<NUMBER OF LINKS>") {
                declared_links = Some(parse_metadata_count(line, lineno)?);
            }
            // Other metadata tags (e.g. <END OF METADATA>) are ignored.
            continue;
        }
        let fields: Vec<&str> = line.trim_end_matches(';').split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                lineno,
                format!("expected 4 fields `from to capacity free_flow_time`, found {}", fields.len()),
            ));
        }
        let from = ZoneId(parse_field(fields[0], lineno, "from zone")?);
        let to = ZoneId(parse_field(fields[1], lineno, "to zone")?);
        let capacity = parse_scalar(fields[2], lineno, "capacity")?;
        let fft = parse_scalar(fields[3], lineno, "free_flow_time")?;
        max_zone = max_zone.max(from.0).max(to.0);
        rows.push((lineno, from, to, capacity, fft));
    }

    if rows.is_empty() {
        return Err(Error::invalid("network file declares no links"));
    }
    if let Some(declared) = declared_links {
        if declared != rows.len() {
            return Err(Error::invalid(format!(
                "metadata declares {declared} links but {} rows are present",
                rows.len()
            )));
        }
    }
    let zones = match declared_zones {
        Some(z) if z < max_zone => {
            return Err(Error::invalid(format!(
                "metadata declares {z} zones but zone {max_zone} appears in a link row"
            )))
        }
        Some(z) => z,
        None => max_zone,
    };

    if !options.allow_parallel_links {
        let mut seen = std::collections::HashSet::new();
        for (lineno, from, to, _, _) in &rows {
            if !seen.insert((from.0, to.0)) {
                return Err(Error::parse(
                    *lineno,
                    format!("duplicate link {from}->{to}; pass allow_parallel_links to accept it"),
                ));
            }
        }
    }

    let links = rows
        .into_iter()
        .enumerate()
        .map(|(i, (_, from, to, capacity, free_flow_time))| Link {
            id: LinkId(i as u32 + 1),
            from,
            to,
            capacity,
            free_flow_time,
        })
        .collect();
    Network::new(zones, links)
}

/// Writes a network in the same format `parse_network` reads.
pub fn serialize_network<S: Scalar>(net: &Network<S>) -> String {
    let mut out = String::new();
    out.push_str(&format!("<NUMBER OF ZONES> {}\n", net.zones()));
    out.push_str(&format!("<NUMBER OF LINKS> {}\n", net.num_links()));
    out.push_str("<END OF METADATA>\n");
    out.push_str("# from to capacity free_flow_time\n");
    for link in net.links() {
        out.push_str(&format!("{} {} {} {}\n", link.from, link.to, link.capacity, link.free_flow_time));
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
}

fn parse_metadata_count(line: &str, lineno: usize) -> Result<usize> {
    let after = line
        .rfind('>')
        .map(|p| line[p + 1..].trim())
        .unwrap_or("");
    after
        .parse::<usize>()
        .map_err(|_| Error::parse(lineno, format!("metadata tag has no numeric value: `{line}`")))
}

fn parse_field(field: &str, lineno: usize, what: &str) -> Result<u32> {
    field
        .parse::<u32>()
        .map_err(|_| Error::parse(lineno, format!("{what} `{field}` is not a positive integer")))
}

pub(crate) fn parse_scalar<S: Scalar>(field: &str, lineno: usize, what: &str) -> Result<S> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::parse(lineno, format!("{what} `{field}` is not a number")))?;
    if !value.is_finite() {
        return Err(Error::parse(lineno, format!("{what} `{field}` is not finite")));
    }
    S::from_f64(value).ok_or_else(|| Error::parse(lineno, format!("{what} `{field}` not representable")))
}

/// Pre-disaster capacity total; handy as a sanity check on datasets.
pub fn total_capacity<S: Scalar>(net: &Network<S>) -> S {
    net.links().iter().map(|l| l.capacity).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
<NUMBER OF ZONES> 3
<NUMBER OF LINKS> 3
<END OF METADATA>
# corridor
1 2 10.0 2.0
2 3 8.5 1.5
3 1 4.0 1.0
";

    #[test]
    fn parses_rows_comments_and_metadata() {
        let net: Network = parse_network(SMALL, &ParseOptions::default()).unwrap();
        assert_eq!(net.zones(), 3);
        assert_eq!(net.num_links(), 3);
        let l2 = net.link(LinkId(2)).unwrap();
        assert_eq!(l2.from, ZoneId(2));
        assert_eq!(l2.to, ZoneId(3));
        assert_eq!(l2.capacity, 8.5);
        assert_eq!(l2.free_flow_time, 1.5);
    }

    #[test]
    fn round_trips_through_serialize() {
        let net: Network = parse_network(SMALL, &ParseOptions::default()).unwrap();
        let text = serialize_network(&net);
        let again: Network = parse_network(&text, &ParseOptions::default()).unwrap();
        assert_eq!(net, again);
    }

    #[test]
    fn rejects_duplicate_links_unless_flagged() {
        let text = "1 2 5 1\n1 2 6 1\n";
        let err = parse_network::<f64>(text, &ParseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let net = parse_network::<f64>(text, &ParseOptions { allow_parallel_links: true }).unwrap();
        assert_eq!(net.num_links(), 2);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(parse_network::<f64>("1 2 5\n", &ParseOptions::default()).is_err());
        assert!(parse_network::<f64>("1 2 -5 1\n", &ParseOptions::default()).is_err());
        assert!(parse_network::<f64>("1 2 5 0\n", &ParseOptions::default()).is_err());
        assert!(parse_network::<f64>("1 1 5 1\n", &ParseOptions::default()).is_err());
        assert!(parse_network::<f64>("<NUMBER OF ZONES> 1\n1 2 5 1\n", &ParseOptions::default()).is_err());
    }

    #[test]
    fn parses_f32_networks_too() {
        let net: Network<f32> = parse_network(SMALL, &ParseOptions::default()).unwrap();
        assert_eq!(net.link(LinkId(1)).unwrap().capacity, 10.0f32);
    }
}
