//! Homogenization request files.
//!
//! One `key value` pair per line, `#` starts a comment. Paths are relative
//! to the request file; `index` and `b` also accept the tree shorthand.
//!
//! ```text
//! index 2^<=3@L0
//! b 2^<=1@L0
//! pattern pair.txt
//! coloring random 2
//! max_len 2
//! ```
//!
//! Instead of `pattern`/`coloring` a request can name a `target` structure,
//! an optional `family` file (line i lists the target tuple of index
//! element i) and a `delta` formula file. `types` lists tuples of `b`
//! separated by `;`.

use ramseykit::{Elem, Error, ParseError, Result};

pub enum FamilySpec {
    /// A seeded random coloring of the copies of `pattern`, encoded as a
    /// structure on the index.
    Coloring {
        pattern: String,
        k: usize,
    },
    Explicit {
        target: String,
        family: Option<String>,
        delta: String,
    },
}

pub struct Request {
    pub index: String,
    pub b: String,
    pub family: FamilySpec,
    pub types: Option<Vec<Vec<String>>>,
    pub max_len: usize,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse(ParseError { line, column: 1, message: message.into() })
}

impl Request {
    pub fn parse(text: &str) -> Result<Request> {
        let mut get = std::collections::HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once(char::is_whitespace).ok_or_else(|| err(i + 1, "expected `key value`"))?;
            let known = ["index", "b", "pattern", "coloring", "target", "family", "delta", "types", "max_len"];
            if !known.contains(&key) {
                return Err(err(i + 1, format!("unknown key `{key}`")));
            }
            if get.insert(key, (i + 1, value.trim().to_string())).is_some() {
                return Err(err(i + 1, format!("duplicate key `{key}`")));
            }
        }
        let line_of = |key: &str| get.get(key).map_or(1, |&(l, _)| l);
        let (max_len_line, coloring_line) = (line_of("max_len"), line_of("coloring"));
        let mut take = |key: &str| get.remove(key).map(|(_, v)| v);
        let index = take("index").ok_or_else(|| err(1, "missing `index`"))?;
        let b = take("b").ok_or_else(|| err(1, "missing `b`"))?;
        let max_len = match take("max_len") {
            None => 3,
            Some(v) => v.parse().map_err(|_| err(max_len_line, "`max_len` must be a number"))?,
        };
        let types =
            take("types").map(|v| v.split(';').map(|t| t.split_whitespace().map(str::to_string).collect()).collect());
        let family = match (take("pattern"), take("coloring"), take("target"), take("delta")) {
            (Some(pattern), Some(c), None, None) => {
                let k = c
                    .strip_prefix("random")
                    .and_then(|k| k.trim().parse().ok())
                    .filter(|&k: &usize| k > 0)
                    .ok_or_else(|| err(coloring_line, "expected `coloring random K` with K > 0"))?;
                if take("family").is_some() {
                    return Err(err(1, "`family` does not go with a generated coloring"));
                }
                FamilySpec::Coloring { pattern, k }
            }
            (None, None, Some(target), Some(delta)) => FamilySpec::Explicit { target, family: take("family"), delta },
            _ => return Err(err(1, "give either `pattern` and `coloring`, or `target` and `delta`")),
        };
        Ok(Request { index, b, family, types, max_len })
    }
}

/// Line i lists the target tuple of index element i.
pub fn parse_family(text: &str) -> Result<Vec<Vec<Elem>>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.split('#').next().unwrap_or_default().trim()))
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            l.split_whitespace().map(|x| x.parse().map_err(|_| err(i + 1, format!("bad element `{x}`")))).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coloring_request() {
        let r =
            Request::parse("index 2^<=3@L0\nb 2^<=1@L0 # host pattern\npattern p.txt\ncoloring random 3\n").unwrap();
        assert_eq!(r.max_len, 3);
        assert!(matches!(r.family, FamilySpec::Coloring { k: 3, .. }));
    }

    #[test]
    fn mixed_request_is_rejected() {
        assert!(Request::parse("index a\nb b\npattern p\ncoloring random 2\ndelta d\n").is_err());
        assert!(Request::parse("index a\nb b\nbogus 1\n").is_err());
    }

    #[test]
    fn bad_values_point_at_their_line() {
        match Request::parse("index a\nb b\npattern p\ncoloring fixed 2\n") {
            Err(Error::Parse(e)) => assert_eq!(e.line, 4),
            _ => panic!("expected a parse error"),
        }
    }

    #[test]
    fn family_lines() {
        assert_eq!(parse_family("0 1\n\n# skip\n2 3\n").unwrap(), vec![vec![0, 1], vec![2, 3]]);
    }
}
