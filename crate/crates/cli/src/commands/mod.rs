pub mod fit;
pub mod ingest;
pub mod rank;
pub mod report;
pub mod synth;

use hoprank::clickstream::NavSelector;
use hoprank::models::ModelId;

use crate::error::{CliError, CliResult};

/// Parses a comma-separated list, rejecting duplicates and empty lists.
fn parse_list<T: std::str::FromStr + PartialEq>(flag: &str, items: &[String]) -> CliResult<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let mut out = Vec::new();
    for raw in items.iter().flat_map(|s| s.split(',')) {
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let v: T = raw.parse().map_err(|e| CliError::Usage(format!("{flag}: {e}")))?;
        if out.contains(&v) {
            return Err(CliError::Usage(format!("{flag}: {raw:?} listed twice")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("{flag}: empty list")));
    }
    Ok(out)
}

pub(crate) fn parse_models(items: &[String]) -> CliResult<Vec<ModelId>> {
    parse_list("--models", items)
}

pub(crate) fn parse_navtypes(items: &[String]) -> CliResult<Vec<NavSelector>> {
    parse_list("--navtypes", items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hoprank::clickstream::NavType;

    fn strings(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn lists_split_on_commas_and_keep_order() {
        let models = parse_models(&strings(&["mc,hoprank", " rw-0.85 "])).unwrap();
        assert_eq!(models, vec![ModelId::MarkovChain, ModelId::HopRank, ModelId::PageRank]);
        let navtypes = parse_navtypes(&strings(&["all,ex"])).unwrap();
        assert_eq!(navtypes, vec![NavSelector::All, NavSelector::Only(NavType::EX)]);
    }

    #[test]
    fn bad_lists_are_usage_errors() {
        for items in [vec![], vec![""], vec!["hoprank,hoprank"], vec!["pagerank"]] {
            let err = parse_models(&strings(&items)).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{items:?}");
        }
    }
}
