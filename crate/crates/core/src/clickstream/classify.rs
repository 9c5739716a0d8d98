use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use url::Url;

use super::{NavType, RequestRecord};
use crate::error::{Error, Result};

/// Rules mapping a request's referrer and action tag to a navigation type.
///
/// Precedence: a mapped action tag wins; otherwise no referrer is `DU`, a
/// search-engine referrer is `ES`, any other non-local referrer is `EL`, and a
/// local referrer without an action tag is `DC`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassificationRules {
    /// Hosts (and their subdomains) counted as external search engines.
    pub search_engines: Vec<String>,
    /// Hosts (and their subdomains) belonging to the site itself.
    pub local_hosts: Vec<String>,
    /// Action tag → navigation type, matched case-insensitively.
    pub action_map: BTreeMap<String, NavType>,
}

impl Default for ClassificationRules {
    fn default() -> Self {
        let search_engines = [
            "google.com",
            "bing.com",
            "yahoo.com",
            "baidu.com",
            "yandex.ru",
            "duckduckgo.com",
            "ask.com",
            "aol.com",
            "ecosia.org",
            "naver.com",
        ]
        .map(String::from)
        .to_vec();
        let action_map = [
            ("expand", NavType::EX),
            ("details", NavType::DE),
            ("click", NavType::DC),
            ("search", NavType::LS),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect();
        ClassificationRules {
            search_engines,
            local_hosts: Vec::new(),
            action_map,
        }
    }
}

impl ClassificationRules {
    /// Parses a TOML rules file. Keys not given keep their defaults.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let mut rules: ClassificationRules =
            toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        rules.normalize();
        Ok(rules)
    }

    fn normalize(&mut self) {
        for h in self.search_engines.iter_mut().chain(self.local_hosts.iter_mut()) {
            *h = h.trim().trim_end_matches('.').to_ascii_lowercase();
        }
        self.action_map = std::mem::take(&mut self.action_map)
            .into_iter()
            .map(|(k, v)| (k.trim().to_ascii_lowercase(), v))
            .collect();
    }

    fn action(&self, tag: &str) -> Option<NavType> {
        self.action_map.get(&tag.trim().to_ascii_lowercase()).copied()
    }
}

fn host_matches(host: &str, patterns: &[String]) -> bool {
    patterns.iter().any(|p| {
        !p.is_empty()
            && (host == p
                || (host.len() > p.len()
                    && host.ends_with(p.as_str())
                    && host.as_bytes()[host.len() - p.len() - 1] == b'.'))
    })
}

/// Lowercased host of a referrer URL. Scheme-less referrers are read as
/// `http://<referrer>`.
pub fn referrer_host(referrer: &str) -> Option<String> {
    let referrer = referrer.trim();
    let parsed = Url::parse(referrer)
        .ok()
        .filter(|u| u.has_host())
        .or_else(|| Url::parse(&format!("http://{referrer}")).ok())?;
    parsed
        .host_str()
        .map(|h| h.trim_end_matches('.').to_ascii_lowercase())
        .filter(|h| !h.is_empty())
}

pub fn classify(record: &RequestRecord, rules: &ClassificationRules) -> NavType {
    if let Some(t) = record.action.as_deref().and_then(|a| rules.action(a)) {
        return t;
    }
    let Some(referrer) = record.referrer.as_deref() else {
        return NavType::DU;
    };
    let host = referrer_host(referrer).unwrap_or_else(|| referrer.to_ascii_lowercase());
    if host_matches(&host, &rules.search_engines) {
        NavType::ES
    } else if host_matches(&host, &rules.local_hosts) {
        NavType::DC
    } else {
        NavType::EL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(referrer: Option<&str>, action: Option<&str>) -> RequestRecord {
        RequestRecord {
            timestamp: 0.0,
            client: "c".into(),
            ontology: "O".into(),
            concept: "x".into(),
            referrer: referrer.map(String::from),
            action: action.map(String::from),
        }
    }

    fn rules() -> ClassificationRules {
        ClassificationRules::from_toml_str(
            r#"
            search_engines = ["google.example", "bing.com"]
            local_hosts = ["bioportal.example.org"]
            [action_map]
            expand = "EX"
            details = "DE"
            search = "LS"
            "#,
        )
        .unwrap()
    }

    #[test]
    fn no_referrer_is_direct_url() {
        assert_eq!(classify(&rec(None, None), &rules()), NavType::DU);
    }

    #[test]
    fn search_engine_referrer() {
        let r = rules();
        assert_eq!(classify(&rec(Some("https://google.example/search?q=x"), None), &r), NavType::ES);
        assert_eq!(classify(&rec(Some("http://www.bing.com/"), None), &r), NavType::ES);
        // suffix match only on label boundaries
        assert_eq!(classify(&rec(Some("http://notbing.com/"), None), &r), NavType::EL);
    }

    #[test]
    fn action_tag_wins() {
        let r = rules();
        assert_eq!(classify(&rec(Some("https://google.example/"), Some("expand")), &r), NavType::EX);
        assert_eq!(classify(&rec(None, Some("EXPAND")), &r), NavType::EX);
        assert_eq!(classify(&rec(Some("http://bioportal.example.org/a"), Some("search")), &r), NavType::LS);
        // unmapped tags fall through
        assert_eq!(classify(&rec(None, Some("zoom")), &r), NavType::DU);
    }

    #[test]
    fn local_and_external_referrers() {
        let r = rules();
        assert_eq!(classify(&rec(Some("http://bioportal.example.org/ontologies/X"), None), &r), NavType::DC);
        assert_eq!(classify(&rec(Some("bioportal.example.org/ontologies/X"), None), &r), NavType::DC);
        assert_eq!(classify(&rec(Some("https://en.wikipedia.org/wiki/Y"), None), &r), NavType::EL);
    }

    #[test]
    fn unknown_rule_keys_are_rejected() {
        assert!(ClassificationRules::from_toml_str("engines = []").is_err());
        assert!(ClassificationRules::from_toml_str("[action_map]\nx = \"QQ\"").is_err());
    }

    #[test]
    fn defaults_cover_common_engines() {
        let r = ClassificationRules::default();
        assert_eq!(classify(&rec(Some("https://www.google.com/"), None), &r), NavType::ES);
        assert_eq!(classify(&rec(Some("x"), Some("details")), &r), NavType::DE);
    }
}
