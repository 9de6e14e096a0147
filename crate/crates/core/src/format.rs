//! JSON encoding of separation certificates.
//!
//! Group elements are written as `group:value` tokens, rationals as `p/q`
//! strings and finite-set members by element name, so a certificate can be
//! read and checked without this library. Field order is fixed, so equal
//! certificates encode to identical bytes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freeprod::{FreeProduct, Letter, ReducedWord, Word};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::separator::{Provenance, SeparationCertificate, CERTIFICATE_VERSION};
use crate::topogroups::{GroupKind, Groups, Neighborhood, Shape};
use crate::x0topology::{IdentityScales, XNeighborhood};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateRecord {
    version: u32,
    config_digest: String,
    scales: ScalesRecord,
    word: Vec<String>,
    forbidden: Vec<Vec<String>>,
    neighborhoods: Vec<XRecord>,
    provenance: Vec<Vec<ProvenanceRecord>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScalesRecord {
    euclidean_radius: String,
    padic_level: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum XRecord {
    AwayFromIdentity { set: SetRecord },
    AroundIdentity { components: Vec<SetRecord> },
}

#[derive(Serialize, Deserialize)]
struct SetRecord {
    group: String,
    #[serde(flatten)]
    shape: ShapeRecord,
    punctured: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
enum ShapeRecord {
    FiniteSet { members: Vec<String> },
    Interval { center: String, radius: String },
    PadicBall { center: String, level: i64 },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProvenanceRecord {
    forbidden_index: usize,
    group: String,
    positions: Vec<usize>,
    value: String,
}

pub fn certificate_to_json(fp: &FreeProduct, c: &SeparationCertificate) -> String {
    let groups = fp.groups();
    let record = CertificateRecord {
        version: c.version,
        config_digest: c.config_digest.clone(),
        scales: ScalesRecord {
            euclidean_radius: format_rational(&c.scales.euclidean_radius),
            padic_level: c.scales.padic_level,
        },
        word: c.word.letters.iter().map(|l| fp.format_letter(l)).collect(),
        forbidden: c
            .forbidden
            .iter()
            .map(|f| f.letters().iter().map(|g| groups.format_element(g)).collect())
            .collect(),
        neighborhoods: c.neighborhoods.iter().map(|w| x_record(groups, w)).collect(),
        provenance: c
            .provenance
            .iter()
            .map(|ps| {
                ps.iter()
                    .map(|p| ProvenanceRecord {
                        forbidden_index: p.forbidden_index,
                        group: groups.name(p.group).to_string(),
                        positions: p.positions.clone(),
                        value: groups.format_value(&p.value),
                    })
                    .collect()
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&record).expect("records always serialize");
    text.push('\n');
    text
}

/// Decodes a certificate. Only the encoding is checked here; use
/// `Separator::validate_certificate` for the structural rules.
pub fn certificate_from_json(fp: &FreeProduct, text: &str) -> Result<SeparationCertificate> {
    let raw: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    match raw.get("version").and_then(|v| v.as_u64()) {
        Some(v) if v == u64::from(CERTIFICATE_VERSION) => {}
        Some(v) => return Err(Error::Format(format!("unsupported certificate version {v}"))),
        None => return Err(Error::Format("missing certificate version".into())),
    }
    let record: CertificateRecord = serde_json::from_value(raw).map_err(|e| Error::Format(e.to_string()))?;
    let groups = fp.groups();
    let word = Word::new(
        record
            .word
            .iter()
            .map(|t| parse_letter(fp, t))
            .collect::<Result<_>>()?,
    );
    let forbidden = record
        .forbidden
        .iter()
        .map(|tokens| {
            let letters = tokens.iter().map(|t| parse_letter(fp, t)).collect::<Result<Vec<_>>>()?;
            let reduced = fp.normal_form(&letters);
            if reduced.len() != letters.len() {
                return Err(Error::Format(format!("forbidden value {tokens:?} is not reduced")));
            }
            Ok(reduced)
        })
        .collect::<Result<Vec<ReducedWord>>>()?;
    let neighborhoods = record
        .neighborhoods
        .iter()
        .map(|r| parse_x(groups, r))
        .collect::<Result<_>>()?;
    let provenance = record
        .provenance
        .iter()
        .map(|ps| {
            ps.iter()
                .map(|p| {
                    let group = groups.lookup(&p.group)?;
                    Ok(Provenance {
                        forbidden_index: p.forbidden_index,
                        group,
                        positions: p.positions.clone(),
                        value: groups.parse_value(group, &p.value)?,
                    })
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    Ok(SeparationCertificate {
        version: record.version,
        config_digest: record.config_digest,
        word,
        forbidden,
        neighborhoods,
        provenance,
        scales: IdentityScales {
            euclidean_radius: rational(&record.scales.euclidean_radius)?,
            padic_level: record.scales.padic_level,
        },
    })
}

fn parse_letter(fp: &FreeProduct, token: &str) -> Result<Letter> {
    let w = fp.parse_word(token)?;
    match <[Letter; 1]>::try_from(w.letters) {
        Ok([l]) => Ok(l),
        Err(_) => Err(Error::Format(format!("`{token}` is not a single letter"))),
    }
}

fn rational(text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| Error::Format(format!("`{text}` is not a rational")))
}

fn x_record(groups: &Groups, w: &XNeighborhood) -> XRecord {
    match w {
        XNeighborhood::AwayFromIdentity(n) => XRecord::AwayFromIdentity {
            set: set_record(groups, n),
        },
        XNeighborhood::AroundIdentity(ns) => XRecord::AroundIdentity {
            components: ns.iter().map(|n| set_record(groups, n)).collect(),
        },
    }
}

fn set_record(groups: &Groups, n: &Neighborhood) -> SetRecord {
    let shape = match (&n.shape, groups.kind(n.group)) {
        (Shape::FiniteSet(members), GroupKind::FiniteTable(t)) => ShapeRecord::FiniteSet {
            members: members.iter().map(|&i| t.name(i).to_string()).collect(),
        },
        (Shape::FiniteSet(members), _) => ShapeRecord::FiniteSet {
            members: members.iter().map(|i| i.to_string()).collect(),
        },
        (Shape::Interval { center, radius }, _) => ShapeRecord::Interval {
            center: format_rational(center),
            radius: format_rational(radius),
        },
        (Shape::PadicBall { center, level }, _) => ShapeRecord::PadicBall {
            center: format_rational(center),
            level: *level,
        },
    };
    SetRecord {
        group: groups.name(n.group).to_string(),
        shape,
        punctured: n.punctured,
    }
}

fn parse_x(groups: &Groups, r: &XRecord) -> Result<XNeighborhood> {
    Ok(match r {
        XRecord::AwayFromIdentity { set } => XNeighborhood::AwayFromIdentity(parse_set(groups, set)?),
        XRecord::AroundIdentity { components } => XNeighborhood::AroundIdentity(
            components.iter().map(|s| parse_set(groups, s)).collect::<Result<_>>()?,
        ),
    })
}

fn parse_set(groups: &Groups, r: &SetRecord) -> Result<Neighborhood> {
    let group = groups.lookup(&r.group)?;
    let shape = match &r.shape {
        ShapeRecord::FiniteSet { members } => {
            let GroupKind::FiniteTable(t) = groups.kind(group) else {
                return Err(Error::Format(format!("group {} is not finite", r.group)));
            };
            let indices = members
                .iter()
                .map(|m| {
                    t.index_of(m)
                        .ok_or_else(|| Error::Format(format!("`{m}` is not an element of {}", r.group)))
                })
                .collect::<Result<_>>()?;
            Shape::FiniteSet(indices)
        }
        ShapeRecord::Interval { center, radius } => Shape::Interval {
            center: rational(center)?,
            radius: rational(radius)?,
        },
        ShapeRecord::PadicBall { center, level } => Shape::PadicBall {
            center: rational(center)?,
            level: *level,
        },
    };
    Ok(Neighborhood {
        group,
        shape,
        punctured: r.punctured,
    })
}
