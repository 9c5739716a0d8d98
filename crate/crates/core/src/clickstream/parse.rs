use std::io::{BufRead, Read};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// One normalized request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    /// Seconds since the epoch.
    pub timestamp: f64,
    pub client: String,
    pub ontology: String,
    pub concept: String,
    pub referrer: Option<String>,
    pub action: Option<String>,
}

/// Column (or JSON key) names of the normalized log fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldMap {
    pub timestamp: String,
    pub client: String,
    pub ontology: String,
    pub concept: String,
    pub referrer: String,
    /// Optional; a log without this column yields records without action tags.
    pub action: String,
}

impl Default for FieldMap {
    fn default() -> Self {
        FieldMap {
            timestamp: "ts".into(),
            client: "client".into(),
            ontology: "ontology".into(),
            concept: "concept".into(),
            referrer: "referrer".into(),
            action: "action".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogFormat {
    /// Delimited text with a header row.
    Delimited { delimiter: u8 },
    /// One JSON object per line.
    JsonLines,
}

impl Default for LogFormat {
    fn default() -> Self {
        LogFormat::Delimited { delimiter: b'\t' }
    }
}

#[derive(Debug, Clone, Default)]
pub struct LogSchema {
    pub format: LogFormat,
    pub fields: FieldMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct ParsedLog {
    pub records: Vec<RequestRecord>,
    pub skipped: Vec<SkippedLine>,
}

struct Columns {
    timestamp: usize,
    client: usize,
    ontology: usize,
    concept: usize,
    referrer: usize,
    action: Option<usize>,
}

enum Source<R: Read> {
    Delimited {
        reader: csv::Reader<R>,
        columns: Columns,
        record: csv::StringRecord,
    },
    Json {
        reader: std::io::BufReader<R>,
        line: usize,
        buf: String,
    },
}

/// Lazily parses a request log. Unparseable lines are recorded in
/// [`RecordStream::skipped`] unless strict mode is on, in which case the first
/// bad line ends the stream with an error.
pub struct RecordStream<R: Read> {
    source: Source<R>,
    fields: FieldMap,
    strict: bool,
    skipped: Vec<SkippedLine>,
    done: bool,
}

impl<R: Read> RecordStream<R> {
    pub fn new(reader: R, schema: &LogSchema, strict: bool) -> Result<Self> {
        let source = match schema.format {
            LogFormat::Delimited { delimiter } => {
                let mut reader = csv::ReaderBuilder::new()
                    .delimiter(delimiter)
                    .has_headers(true)
                    .flexible(true)
                    .from_reader(reader);
                let headers = reader
                    .headers()
                    .map_err(|e| Error::parse(1, format!("header: {e}")))?
                    .clone();
                let find = |name: &str| headers.iter().position(|h| h.trim() == name);
                let need = |name: &str| find(name).ok_or_else(|| Error::MissingColumn(name.into()));
                let f = &schema.fields;
                let columns = Columns {
                    timestamp: need(&f.timestamp)?,
                    client: need(&f.client)?,
                    ontology: need(&f.ontology)?,
                    concept: need(&f.concept)?,
                    referrer: need(&f.referrer)?,
                    action: find(&f.action),
                };
                Source::Delimited {
                    reader,
                    columns,
                    record: csv::StringRecord::new(),
                }
            }
            LogFormat::JsonLines => Source::Json {
                reader: std::io::BufReader::new(reader),
                line: 0,
                buf: String::new(),
            },
        };
        Ok(RecordStream {
            source,
            fields: schema.fields.clone(),
            strict,
            skipped: Vec::new(),
            done: false,
        })
    }

    pub fn skipped(&self) -> &[SkippedLine] {
        &self.skipped
    }

    pub fn into_skipped(self) -> Vec<SkippedLine> {
        self.skipped
    }

    /// Next raw outcome: `None` at end of input, otherwise the line number and
    /// either a record or a reason for rejecting the line.
    fn next_line(&mut self) -> Option<Result<(usize, Result<RequestRecord, String>)>> {
        match &mut self.source {
            Source::Delimited {
                reader,
                columns,
                record,
            } => match reader.read_record(record) {
                Ok(false) => None,
                Ok(true) => {
                    let line = record.position().map_or(0, |p| p.line() as usize);
                    Some(Ok((line, delimited_record(record, columns))))
                }
                Err(e) => {
                    let line = e.position().map_or(0, |p| p.line() as usize);
                    if let csv::ErrorKind::Io(_) = e.kind() {
                        return Some(Err(Error::Io(std::io::Error::other(e.to_string()))));
                    }
                    Some(Ok((line, Err(e.to_string()))))
                }
            },
            Source::Json { reader, line, buf } => loop {
                buf.clear();
                *line += 1;
                match reader.read_line(buf) {
                    Ok(0) => return None,
                    Ok(_) => {
                        if buf.trim().is_empty() {
                            continue;
                        }
                        return Some(Ok((*line, json_record(buf, &self.fields))));
                    }
                    Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                        // skip the rest of the undecodable line
                        let mut junk = Vec::new();
                        if let Err(e) = reader.read_until(b'\n', &mut junk) {
                            return Some(Err(e.into()));
                        }
                        return Some(Ok((*line, Err("invalid UTF-8".into()))));
                    }
                    Err(e) => return Some(Err(e.into())),
                }
            },
        }
    }
}

impl<R: Read> Iterator for RecordStream<R> {
    type Item = Result<RequestRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            match self.next_line() {
                None => {
                    self.done = true;
                    return None;
                }
                Some(Err(e)) => {
                    self.done = true;
                    return Some(Err(e));
                }
                Some(Ok((_, Ok(rec)))) => return Some(Ok(rec)),
                Some(Ok((line, Err(reason)))) => {
                    if self.strict {
                        self.done = true;
                        return Some(Err(Error::parse(line, reason)));
                    }
                    self.skipped.push(SkippedLine { line, reason });
                }
            }
        }
    }
}

/// Parses a whole log into memory.
pub fn parse_log<R: Read>(reader: R, schema: &LogSchema, strict: bool) -> Result<ParsedLog> {
    let mut stream = RecordStream::new(reader, schema, strict)?;
    let records = stream.by_ref().collect::<Result<Vec<_>>>()?;
    Ok(ParsedLog {
        records,
        skipped: stream.into_skipped(),
    })
}

fn optional(value: &str) -> Option<String> {
    let v = value.trim();
    if v.is_empty() || v == "-" {
        None
    } else {
        Some(v.to_owned())
    }
}

fn required(value: Option<&str>, name: &str) -> Result<String, String> {
    match value.map(str::trim) {
        Some(v) if !v.is_empty() => Ok(v.to_owned()),
        _ => Err(format!("missing {name}")),
    }
}

fn parse_timestamp(raw: &str) -> Result<f64, String> {
    let ts: f64 = raw
        .trim()
        .parse()
        .map_err(|_| format!("timestamp {raw:?} is not a number"))?;
    if ts.is_finite() {
        Ok(ts)
    } else {
        Err(format!("timestamp {raw:?} is not finite"))
    }
}

fn delimited_record(rec: &csv::StringRecord, c: &Columns) -> Result<RequestRecord, String> {
    let timestamp = parse_timestamp(&required(rec.get(c.timestamp), "timestamp")?)?;
    Ok(RequestRecord {
        timestamp,
        client: required(rec.get(c.client), "client")?,
        ontology: required(rec.get(c.ontology), "ontology")?,
        concept: required(rec.get(c.concept), "concept")?,
        referrer: rec.get(c.referrer).and_then(optional),
        action: c.action.and_then(|i| rec.get(i)).and_then(optional),
    })
}

fn json_scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        _ => None,
    }
}

fn json_record(line: &str, f: &FieldMap) -> Result<RequestRecord, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("line is not a JSON object")?;
    let get = |name: &str| obj.get(name).and_then(json_scalar);
    let timestamp = match obj.get(&f.timestamp) {
        Some(Value::Number(n)) => {
            let ts = n.as_f64().ok_or("timestamp out of range")?;
            if !ts.is_finite() {
                return Err("timestamp is not finite".into());
            }
            ts
        }
        Some(Value::String(s)) => parse_timestamp(s)?,
        _ => return Err("missing timestamp".into()),
    };
    Ok(RequestRecord {
        timestamp,
        client: required(get(&f.client).as_deref(), "client")?,
        ontology: required(get(&f.ontology).as_deref(), "ontology")?,
        concept: required(get(&f.concept).as_deref(), "concept")?,
        referrer: get(&f.referrer).as_deref().and_then(optional),
        action: get(&f.action).as_deref().and_then(optional),
    })
}
