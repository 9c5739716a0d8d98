#![no_main]

use hoprank::clickstream::{classify, referrer_host, ClassificationRules, RequestRecord};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = referrer_host(text);
    let Ok(rules) = ClassificationRules::from_toml_str(text) else {
        return;
    };
    let record = RequestRecord {
        timestamp: 0.0,
        client: "c".into(),
        ontology: "o".into(),
        concept: "x".into(),
        referrer: Some(text.into()),
        action: Some(text.into()),
    };
    let _ = classify(&record, &rules);
});
