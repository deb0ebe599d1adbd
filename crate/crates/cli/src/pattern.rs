use std::fs;

use anyhow::{bail, Context, Result};
use cayminor::Graph;

/// Parses `k:N`, `k:A,B`, `c:N`, `p:N`, `petersen` or `file:PATH`.
pub fn parse_pattern(spec: &str) -> Result<Graph> {
    let spec = spec.trim();
    if spec == "petersen" {
        return Ok(Graph::petersen());
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = fs::read_to_string(path).with_context(|| format!("reading pattern {path}"))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        return Ok(Graph::from_json_value(&value)?);
    }
    let Some((kind, rest)) = spec.split_once(':') else {
        bail!("unknown pattern `{spec}`");
    };
    let nums = rest
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad pattern size in `{spec}`"))?;
    match (kind, nums.as_slice()) {
        ("k", &[n]) => Ok(Graph::complete(n)),
        ("k", &[a, b]) => Ok(Graph::complete_bipartite(a, b)),
        ("c", &[n]) if n >= 3 => Ok(Graph::cycle(n)),
        ("p", &[n]) => Ok(Graph::path(n)),
        _ => bail!("unknown pattern `{spec}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_patterns() {
        assert_eq!(parse_pattern("k:5").unwrap(), Graph::complete(5));
        assert_eq!(
            parse_pattern("k:3,3").unwrap(),
            Graph::complete_bipartite(3, 3)
        );
        assert_eq!(parse_pattern("c:6").unwrap().edge_count(), 6);
        assert_eq!(parse_pattern("p:4").unwrap().edge_count(), 3);
        assert_eq!(parse_pattern("petersen").unwrap().edge_count(), 15);
        assert!(parse_pattern("c:2").is_err());
        assert!(parse_pattern("q:3").is_err());
        assert!(parse_pattern("k:x").is_err());
    }
}
