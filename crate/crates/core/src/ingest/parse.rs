//! Readers and writers for the delimited interchange files.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::{Read, Write};

use chrono::NaiveDate;

use super::{Issue, Parsed};
use crate::error::{Error, Result};
use crate::org::{ListMetadata, OriginEvent};
use crate::roles::{GroupEvent, GroupEventKind, RoleInterval, RoleKind};
use crate::store::EdgeEvent;

pub const EDGES_HEADER: [&str; 5] = ["sender", "receiver", "date", "list", "message_id"];
pub const ORIGINS_HEADER: [&str; 4] = ["sender", "list", "date", "message_id"];
pub const ROLES_HEADER: [&str; 5] = ["person", "role_kind", "group", "start", "end"];
pub const GROUP_EVENTS_HEADER: [&str; 4] = ["group", "person", "event_kind", "date"];
pub const LISTS_HEADER: [&str; 2] = ["list", "is_wg_list"];
pub const AD_LISTINGS_HEADER: [&str; 2] = ["person", "meeting_date"];

/// Strict `YYYY-MM-DD`.
pub fn parse_date(s: &str) -> std::result::Result<NaiveDate, String> {
    let s = s.trim();
    let ok_shape = s.len() == 10
        && s.bytes()
            .enumerate()
            .all(|(i, b)| if i == 4 || i == 7 { b == b'-' } else { b.is_ascii_digit() });
    if !ok_shape {
        return Err(format!("malformed date {s:?} (expected YYYY-MM-DD)"));
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("invalid date {s:?}"))
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    header: &'a [&'a str],
}

impl Row<'_> {
    fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| *h == name).expect("known column")
    }

    fn req(&self, name: &str) -> std::result::Result<&str, String> {
        let v = self.record.get(self.col(name)).unwrap_or("").trim();
        if v.is_empty() {
            Err(format!("missing {name}"))
        } else {
            Ok(v)
        }
    }

    fn opt(&self, name: &str) -> Option<String> {
        let v = self.record.get(self.col(name)).unwrap_or("").trim();
        (!v.is_empty()).then(|| v.to_owned())
    }

    fn date(&self, name: &str) -> std::result::Result<NaiveDate, String> {
        parse_date(self.req(name)?).map_err(|e| format!("{name}: {e}"))
    }

    fn opt_date(&self, name: &str) -> std::result::Result<Option<NaiveDate>, String> {
        self.opt(name)
            .map(|s| parse_date(&s).map_err(|e| format!("{name}: {e}")))
            .transpose()
    }
}

/// Reads a headed table, calling `row` with each record and its 0-based data
/// row index. Row errors become issues; header problems abort.
fn read_table<R: Read, T>(
    input: R,
    source: &str,
    header: &[&str],
    mut row: impl FnMut(&Row<'_>, u64) -> std::result::Result<T, String>,
) -> Result<Parsed<T>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let found: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_owned()).collect();
    if found.iter().map(String::as_str).ne(header.iter().copied()) {
        let message = if found.iter().all(String::is_empty) {
            format!("missing header row (expected {})", header.join(","))
        } else {
            format!("header {:?} does not match expected {}", found.join(","), header.join(","))
        };
        return Err(Error::Invalid {
            source_name: source.to_owned(),
            issues: vec![Issue::error(source, 1, message)],
        });
    }
    let mut out = Parsed::default();
    let mut record = csv::StringRecord::new();
    let mut index = 0u64;
    while rdr.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != header.len() {
            out.issues.push(Issue::error(
                source,
                line,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        } else {
            match row(&Row { record: &record, header }, index) {
                Ok(v) => out.rows.push(v),
                Err(m) => out.issues.push(Issue::error(source, line, m)),
            }
        }
        index += 1;
    }
    Ok(out)
}

/// `seq` is the data row index, so rows dropped in lenient mode leave gaps.
pub fn parse_edge_events<R: Read>(input: R, source: &str) -> Result<Parsed<EdgeEvent>> {
    read_table(input, source, &EDGES_HEADER, |r, seq| {
        let sender = r.req("sender")?.to_owned();
        let receiver = r.req("receiver")?.to_owned();
        if sender == receiver {
            return Err(format!("self-loop {sender} -> {receiver}"));
        }
        Ok(EdgeEvent {
            sender,
            receiver,
            date: r.date("date")?,
            list: r.opt("list"),
            message_id: r.opt("message_id"),
            seq,
        })
    })
}

pub fn parse_origin_events<R: Read>(input: R, source: &str) -> Result<Parsed<OriginEvent>> {
    read_table(input, source, &ORIGINS_HEADER, |r, seq| {
        Ok(OriginEvent {
            sender: r.req("sender")?.to_owned(),
            list: r.opt("list"),
            date: r.date("date")?,
            message_id: r.opt("message_id"),
            seq,
        })
    })
}

/// Overlapping intervals with the same person, kind and group are merged
/// into the first such row, with a warning.
pub fn parse_role_intervals<R: Read>(input: R, source: &str) -> Result<Parsed<RoleInterval>> {
    let parsed = read_table(input, source, &ROLES_HEADER, |r, _| {
        let kind: RoleKind = r.req("role_kind")?.parse()?;
        let group = r.opt("group");
        if kind == RoleKind::Wgc && group.is_none() {
            return Err("WGC interval without a group".into());
        }
        let start = r.date("start")?;
        let end = r.opt_date("end")?;
        if end.is_some_and(|e| e <= start) {
            return Err(format!("end {} is not after start {start}", end.unwrap()));
        }
        let line = r.record.position().map_or(0, |p| p.line());
        Ok((
            line,
            RoleInterval {
                person: r.req("person")?.to_owned(),
                kind,
                group,
                start,
                end,
            },
        ))
    })?;
    let mut out = Parsed {
        rows: Vec::with_capacity(parsed.rows.len()),
        issues: parsed.issues,
    };
    for (line, iv) in parsed.rows {
        let dup = out.rows.iter_mut().find(|o: &&mut RoleInterval| {
            o.person == iv.person
                && o.kind == iv.kind
                && o.group == iv.group
                && iv.start < o.end.unwrap_or(NaiveDate::MAX)
                && o.start < iv.end.unwrap_or(NaiveDate::MAX)
        });
        match dup {
            Some(o) => {
                o.start = o.start.min(iv.start);
                o.end = match (o.end, iv.end) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    _ => None,
                };
                out.issues.push(Issue::warning(
                    source,
                    line,
                    format!("overlapping duplicate interval for {} merged", iv.person),
                ));
            }
            None => out.rows.push(iv),
        }
    }
    Ok(out)
}

pub fn parse_group_events<R: Read>(input: R, source: &str) -> Result<Parsed<GroupEvent>> {
    read_table(input, source, &GROUP_EVENTS_HEADER, |r, _| {
        let kind: GroupEventKind = r.req("event_kind")?.parse()?;
        let person = r.opt("person");
        if kind.needs_person() && person.is_none() {
            return Err(format!("{} without a person", kind.as_str()));
        }
        Ok(GroupEvent {
            group: r.req("group")?.to_owned(),
            person,
            kind,
            date: r.date("date")?,
        })
    })
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(format!("is_wg_list: expected true/false, found {other:?}")),
    }
}

pub fn parse_list_metadata<R: Read>(input: R, source: &str) -> Result<(ListMetadata, Vec<Issue>)> {
    let parsed = read_table(input, source, &LISTS_HEADER, |r, _| {
        let line = r.record.position().map_or(0, |p| p.line());
        Ok((line, r.req("list")?.to_owned(), parse_bool(r.req("is_wg_list")?)?))
    })?;
    let mut meta = BTreeMap::new();
    let mut issues = parsed.issues;
    for (line, list, wg) in parsed.rows {
        match meta.entry(list) {
            Entry::Occupied(e) => {
                issues.push(Issue::error(source, line, format!("duplicate list {}", e.key())))
            }
            Entry::Vacant(e) => {
                e.insert(wg);
            }
        }
    }
    Ok((meta, issues))
}

/// Meeting-granularity AD listings, `(person, meeting date)`.
pub fn parse_ad_listings<R: Read>(input: R, source: &str) -> Result<Parsed<(String, NaiveDate)>> {
    read_table(input, source, &AD_LISTINGS_HEADER, |r, _| {
        Ok((r.req("person")?.to_owned(), r.date("meeting_date")?))
    })
}

fn opt_str(v: &Option<String>) -> &str {
    v.as_deref().unwrap_or("")
}

fn date_str(d: NaiveDate) -> String {
    d.format("%Y-%m-%d").to_string()
}

fn writer<W: Write>(out: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

/// Rows are written in `seq` order so re-parsing reproduces the sequence.
pub fn write_edge_events<W: Write>(out: W, events: &[EdgeEvent]) -> Result<()> {
    let mut w = writer(out, &EDGES_HEADER)?;
    let mut sorted: Vec<&EdgeEvent> = events.iter().collect();
    sorted.sort_by_key(|e| e.seq);
    for e in sorted {
        w.write_record([
            e.sender.as_str(),
            e.receiver.as_str(),
            &date_str(e.date),
            opt_str(&e.list),
            opt_str(&e.message_id),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_origin_events<W: Write>(out: W, origins: &[OriginEvent]) -> Result<()> {
    let mut w = writer(out, &ORIGINS_HEADER)?;
    let mut sorted: Vec<&OriginEvent> = origins.iter().collect();
    sorted.sort_by_key(|o| o.seq);
    for o in sorted {
        w.write_record([
            o.sender.as_str(),
            opt_str(&o.list),
            &date_str(o.date),
            opt_str(&o.message_id),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_role_intervals<W: Write>(out: W, roles: &[RoleInterval]) -> Result<()> {
    let mut w = writer(out, &ROLES_HEADER)?;
    for r in roles {
        w.write_record([
            r.person.as_str(),
            &r.kind.to_string(),
            opt_str(&r.group),
            &date_str(r.start),
            &r.end.map(date_str).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_group_events<W: Write>(out: W, events: &[GroupEvent]) -> Result<()> {
    let mut w = writer(out, &GROUP_EVENTS_HEADER)?;
    for e in events {
        w.write_record([
            e.group.as_str(),
            opt_str(&e.person),
            e.kind.as_str(),
            &date_str(e.date),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_list_metadata<W: Write>(out: W, meta: &ListMetadata) -> Result<()> {
    let mut w = writer(out, &LISTS_HEADER)?;
    for (list, wg) in meta {
        w.write_record([list.as_str(), if *wg { "true" } else { "false" }])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ad_listings<W: Write>(out: W, listings: &[(String, NaiveDate)]) -> Result<()> {
    let mut w = writer(out, &AD_LISTINGS_HEADER)?;
    for (p, d) in listings {
        w.write_record([p.as_str(), &date_str(*d)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Severity;

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn two_valid_edges() {
        let text = "sender,receiver,date,list,message_id\na,b,2014-01-02,ietf,<m1>\nb,a,2014-01-03,,\n";
        let p = parse_edge_events(text.as_bytes(), "edges.csv").unwrap();
        assert!(p.issues.is_empty());
        assert_eq!(p.rows.len(), 2);
        assert_eq!((p.rows[0].seq, p.rows[1].seq), (0, 1));
        assert_eq!(p.rows[0].list.as_deref(), Some("ietf"));
        assert_eq!(p.rows[1].list, None);
    }

    #[test]
    fn self_loop_names_the_row() {
        let text = "sender,receiver,date,list,message_id\na,b,2014-01-02,,\nc,c,2014-01-03,,\n";
        let p = parse_edge_events(text.as_bytes(), "edges.csv").unwrap();
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.issues.len(), 1);
        assert_eq!(p.issues[0].line, 3);
        assert!(p.issues[0].message.contains("self-loop"));
    }

    #[test]
    fn header_only_is_empty() {
        let p = parse_edge_events("sender,receiver,date,list,message_id\n".as_bytes(), "e").unwrap();
        assert!(p.rows.is_empty() && p.issues.is_empty());
    }

    #[test]
    fn wrong_header_is_fatal() {
        assert!(parse_edge_events("from,to,date\n".as_bytes(), "e").is_err());
        assert!(parse_edge_events("".as_bytes(), "e").is_err());
    }

    #[test]
    fn bad_dates_and_short_rows() {
        let text = "sender,receiver,date,list,message_id\na,b,2014-1-2,,\na,b,2014-02-30,,\na,b\n";
        let p = parse_edge_events(text.as_bytes(), "e").unwrap();
        assert!(p.rows.is_empty());
        assert_eq!(p.issues.iter().map(|i| i.line).collect::<Vec<_>>(), vec![2, 3, 4]);
    }

    #[test]
    fn role_validation() {
        let text = "person,role_kind,group,start,end\n\
                    p,WGC,g,2014-01-01,2013-01-01\n\
                    q,WGC,,2014-01-01,\n\
                    r,AD,,2014-01-01,\n\
                    s,XX,,2014-01-01,\n";
        let p = parse_role_intervals(text.as_bytes(), "roles.csv").unwrap();
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.rows[0].person, "r");
        assert_eq!(p.rows[0].end, None);
        assert_eq!(p.errors().count(), 3);
    }

    #[test]
    fn overlapping_duplicates_merge() {
        let text = "person,role_kind,group,start,end\n\
                    p,WGC,g,2014-01-01,2015-01-01\n\
                    p,WGC,g,2014-06-01,2016-01-01\n\
                    p,WGC,h,2014-06-01,2016-01-01\n";
        let p = parse_role_intervals(text.as_bytes(), "roles.csv").unwrap();
        assert_eq!(p.rows.len(), 2);
        assert_eq!(p.rows[0].end, Some(d("2016-01-01")));
        assert_eq!(p.issues.len(), 1);
        assert_eq!(p.issues[0].severity, Severity::Warning);
    }

    #[test]
    fn group_events_need_person_for_chairs() {
        let text = "group,person,event_kind,date\n\
                    g,,group_created,2014-01-01\n\
                    g,p,chair_added,2014-01-02\n\
                    g,,chair_added,2014-01-03\n\
                    g,,group_concluded,2015-01-01\n";
        let p = parse_group_events(text.as_bytes(), "ge").unwrap();
        assert_eq!(p.rows.len(), 3);
        assert_eq!(p.issues.len(), 1);
        assert_eq!(p.issues[0].line, 4);
    }

    #[test]
    fn list_metadata() {
        let (m, issues) = parse_list_metadata("list,is_wg_list\nquic,true\nietf,false\nquic,0\n".as_bytes(), "l").unwrap();
        assert_eq!(m.get("quic"), Some(&true));
        assert_eq!(m.get("ietf"), Some(&false));
        assert_eq!(issues.len(), 1);
    }

    #[test]
    fn edges_round_trip() {
        let text = "sender,receiver,date,list,message_id\na,b,2014-01-02,ietf,<m1>\nb,\"x, y\",2014-01-03,,\n";
        let p = parse_edge_events(text.as_bytes(), "e").unwrap();
        let mut buf = Vec::new();
        write_edge_events(&mut buf, &p.rows).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), text);
    }
}
