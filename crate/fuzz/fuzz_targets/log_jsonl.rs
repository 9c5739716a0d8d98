#![no_main]

use hoprank::clickstream::{classify, ClassificationRules, LogFormat, LogSchema, RecordStream};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let schema = LogSchema {
        format: LogFormat::JsonLines,
        ..LogSchema::default()
    };
    let rules = ClassificationRules::default();
    let Ok(stream) = RecordStream::new(data, &schema, false) else {
        return;
    };
    for rec in stream.flatten() {
        assert!(rec.timestamp.is_finite());
        let _ = classify(&rec, &rules);
    }
});
