//! Runs the checked-in fuzz seeds through the same entry points as the fuzz
//! targets so that a stable toolchain exercises them too.

use std::fs;
use std::path::PathBuf;

use hoprank::clickstream::{read_transitions, ClassificationRules, LogFormat, LogSchema, RecordStream};
use hoprank::graph::{load_edge_list, Delimiter, EdgeListFormat};
use hoprank::khop::ProfileCache;
use hoprank::models::{read_model_json, ModelContext};
use hoprank::simulator::SynthSpec;
use hoprank::Graph;

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

fn toy() -> Graph {
    Graph::from_labeled_edges([("a", "b"), ("a", "c"), ("b", "d"), ("b", "e"), ("c", "f"), ("c", "g")])
}

#[test]
fn edge_list_seeds() {
    let mut parsed = 0;
    for (_, data) in seeds("edge_list") {
        let (&flags, text) = data.split_first().unwrap();
        let format = EdgeListFormat {
            delimiter: if flags & 1 == 0 { Delimiter::Whitespace } else { Delimiter::Char(',') },
            header: flags & 2 != 0,
        };
        parsed += load_edge_list(text, format).is_ok() as usize;
    }
    assert_eq!(parsed, 4);
}

#[test]
fn log_seeds() {
    for (name, data) in seeds("log_delimited") {
        let (&flags, text) = data.split_first().unwrap();
        let schema = LogSchema {
            format: LogFormat::Delimited {
                delimiter: if flags & 1 == 0 { b'\t' } else { b',' },
            },
            ..LogSchema::default()
        };
        match RecordStream::new(text, &schema, flags & 2 != 0) {
            Ok(stream) => assert!(stream.count() > 0, "{name}"),
            Err(_) => assert_eq!(name, "strict_missing_columns"),
        }
    }
    let schema = LogSchema {
        format: LogFormat::JsonLines,
        ..LogSchema::default()
    };
    for (_, data) in seeds("log_jsonl") {
        let mut stream = RecordStream::new(data.as_slice(), &schema, false).unwrap();
        let good = stream.by_ref().filter_map(Result::ok).count();
        assert_eq!((good, stream.skipped().len()), (2, 2));
    }
}

#[test]
fn rules_and_spec_seeds() {
    for (name, data) in seeds("rules_toml") {
        let text = String::from_utf8(data).unwrap();
        assert_eq!(ClassificationRules::from_toml_str(&text).is_ok(), name != "bare_url", "{name}");
    }
    for (name, data) in seeds("synth_spec") {
        SynthSpec::from_toml_str(&String::from_utf8(data).unwrap()).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn decoder_seeds_match_toy_graph() {
    let g = toy();
    for (name, data) in seeds("transitions_tsv") {
        assert_eq!(read_transitions(data.as_slice(), &g).is_ok(), name == "toy", "{name}");
    }
    for (name, data) in seeds("profile_cache") {
        ProfileCache::read_from(data.as_slice(), &g, 1 << 20).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    let ctx = ModelContext::new(&g, 4).unwrap();
    for (name, data) in seeds("model_json") {
        let record = read_model_json(data.as_slice()).unwrap();
        record.to_model(&ctx).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}
