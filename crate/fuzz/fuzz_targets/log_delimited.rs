#![no_main]

use hoprank::clickstream::{sessionize, ClassificationRules, LogFormat, LogSchema, RecordStream, SessionConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&flags, text)) = data.split_first() else {
        return;
    };
    let schema = LogSchema {
        format: LogFormat::Delimited {
            delimiter: if flags & 1 == 0 { b'\t' } else { b',' },
        },
        ..LogSchema::default()
    };
    let Ok(stream) = RecordStream::new(text, &schema, flags & 2 != 0) else {
        return;
    };
    let records: Vec<_> = stream.filter_map(Result::ok).collect();
    let sessions = sessionize(records, &ClassificationRules::default(), &SessionConfig::default());
    for s in &sessions {
        assert!(s.steps.len() >= 2);
        assert!(s.steps.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    }
});
