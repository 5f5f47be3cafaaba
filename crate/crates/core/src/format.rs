//! Plain-text file formats.
//!
//! * Matrix: a line with `n`, then `n` rows of `n` reals.
//! * Network: a matrix followed by one line of `n` thresholds.
//! * Patterns: one `+`/`-` string per line, all the same length.
//! * Graph: a line `n m`, then `m` lines `i j w` with 0-based vertices.
//!
//! Blank lines and lines starting with `#` are ignored everywhere.

use std::fmt::Write as _;

use crate::core::{SpinVector, SquareMatrix, ThresholdVector};
use crate::dynamics::HopfieldNetwork;
use crate::error::{Error, Result};
use crate::mincut::WeightedGraph;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_reals(line: usize, text: &str, expected: usize, what: &str) -> Result<Vec<f64>> {
    let values = text
        .split_whitespace()
        .enumerate()
        .map(|(col, tok)| {
            tok.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("{what} element {col}: {tok:?} is not a finite real")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != expected {
        return Err(parse_err(
            line,
            format!("{what} has {} values, expected {expected}", values.len()),
        ));
    }
    Ok(values)
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("{what} {tok:?} is not a non-negative integer")))
}

/// Matrix plus an optional trailing line of `n` reals.
pub fn parse_matrix_with_vector(text: &str) -> Result<(SquareMatrix, Option<Vec<f64>>)> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected dimension"))?;
    let n = parse_usize(line, header, "dimension")?;
    if n == 0 {
        return Err(parse_err(line, "dimension must be positive"));
    }
    let mut data = Vec::with_capacity(n * n);
    let mut last_line = line;
    for r in 0..n {
        let (line, row) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("missing matrix row {r} of {n}")))?;
        data.extend(parse_reals(line, row, n, &format!("row {r}"))?);
        last_line = line;
    }
    let tail = match lines.next() {
        Some((line, text)) => Some(parse_reals(line, text, n, "vector")?),
        None => None,
    };
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "unexpected content after the matrix"));
    }
    let m = SquareMatrix::from_row_major(n, data)?;
    Ok((m, tail))
}

pub fn parse_matrix(text: &str) -> Result<SquareMatrix> {
    match parse_matrix_with_vector(text)? {
        (m, None) => Ok(m),
        (m, Some(_)) => Err(parse_err(
            content_lines(text).nth(m.n() + 1).map_or(0, |(l, _)| l),
            "unexpected content after the matrix",
        )),
    }
}

/// Network file; a missing threshold line means `T = 0`.
pub fn parse_network(text: &str) -> Result<HopfieldNetwork> {
    let (s, t) = parse_matrix_with_vector(text)?;
    let n = s.n();
    let t = ThresholdVector::new(t.unwrap_or_else(|| vec![0.0; n]))?;
    HopfieldNetwork::new(s, t)
}

pub fn write_matrix(m: &SquareMatrix) -> String {
    let mut out = format!("{}\n", m.n());
    for row in m.rows() {
        out.push_str(&join_reals(row));
        out.push('\n');
    }
    out
}

pub fn write_network(net: &HopfieldNetwork) -> String {
    let mut out = write_matrix(net.weights());
    out.push_str(&join_reals(net.thresholds().values()));
    out.push('\n');
    out
}

pub(crate) fn join_reals(values: &[f64]) -> String {
    let mut s = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        write!(s, "{v}").expect("writing to a String");
    }
    s
}

pub fn parse_patterns(text: &str) -> Result<Vec<SpinVector>> {
    let mut out: Vec<SpinVector> = Vec::new();
    for (line, l) in content_lines(text) {
        let p: SpinVector = l.parse().map_err(|e: Error| parse_err(line, e.to_string()))?;
        if let Some(first) = out.first() {
            if first.len() != p.len() {
                return Err(parse_err(
                    line,
                    format!("pattern has length {}, expected {}", p.len(), first.len()),
                ));
            }
        }
        out.push(p);
    }
    if out.is_empty() {
        return Err(parse_err(1, "no patterns found"));
    }
    Ok(out)
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = content_lines(text);
    let (line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty input, expected `n m`"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    let [n_tok, m_tok] = toks[..] else {
        return Err(parse_err(line, "header must be `n m`"));
    };
    let n = parse_usize(line, n_tok, "vertex count")?;
    let m = parse_usize(line, m_tok, "edge count")?;
    let mut edges = Vec::with_capacity(m);
    let mut last_line = line;
    for k in 0..m {
        let (line, text) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("missing edge {k} of {m}")))?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        let [i, j, w] = toks[..] else {
            return Err(parse_err(line, format!("edge {k} must be `i j w`")));
        };
        let (i, j) = (parse_usize(line, i, "vertex")?, parse_usize(line, j, "vertex")?);
        let w = w
            .parse::<f64>()
            .ok()
            .filter(|w| w.is_finite())
            .ok_or_else(|| parse_err(line, format!("edge {k} weight {w:?} is not a finite real")))?;
        edges.push((i, j, w));
        last_line = line;
    }
    if let Some((line, _)) = lines.next() {
        return Err(parse_err(line, "unexpected content after the edge list"));
    }
    WeightedGraph::new(n, edges).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edges().len());
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.i, e.j, e.w).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matrix_with_comments() {
        let text = "# pair\n2\n0 2\n\n# second row\n2 0\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m, SquareMatrix::from_rows(&[[0.0, 2.0], [2.0, 0.0]]).unwrap());
    }

    #[test]
    fn matrix_errors_name_the_line() {
        assert_eq!(
            parse_matrix("2\n0 1\n1 x\n"),
            Err(Error::Parse {
                line: 3,
                message: "row 1 element 1: \"x\" is not a finite real".into()
            })
        );
        assert!(matches!(parse_matrix("2\n0 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(
            parse_matrix("2\n0 1 2\n1 0\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_matrix("0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_matrix("2\n0 1\n1 0\n3 3\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(parse_matrix("1\nnan\n").is_err());
    }

    #[test]
    fn network_thresholds_optional() {
        let net = parse_network("2\n0 1\n1 0\n0.5 -1\n").unwrap();
        assert_eq!(net.thresholds().values(), &[0.5, -1.0]);
        assert!(parse_network("2\n0 1\n1 0\n").unwrap().thresholds().is_zero());
        assert!(matches!(
            parse_network("2\n0 1\n0 0\n"),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn pattern_file() {
        let p = parse_patterns("++++\n+-+-\n").unwrap();
        assert_eq!(p.len(), 2);
        assert!(matches!(parse_patterns("++\n+-+\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_patterns("+*\n").is_err());
        assert!(parse_patterns("# nothing\n").is_err());
    }

    #[test]
    fn graph_file() {
        let g = parse_graph("3 3\n0 1 1\n1 2 1\n0 2 1\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.total_weight(), 3.0);
        assert!(matches!(parse_graph("3 2\n0 1 1\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_graph("3 1\n0 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(parse_graph("3 1\n0 0 1\n").is_err());
        assert!(parse_graph("3\n").is_err());
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
    }

    proptest! {
        #[test]
        fn matrix_text_round_trips(n in 1usize..6, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let m = SquareMatrix::from_fn(n, |_, _| rng.gen_range(-1e3..1e3)).unwrap();
            prop_assert_eq!(parse_matrix(&write_matrix(&m)).unwrap(), m);
        }

        #[test]
        fn spin_strings_round_trip(mask in any::<u32>(), n in 1usize..32) {
            let x = SpinVector::from_mask(n, u64::from(mask));
            prop_assert_eq!(x.to_string().parse::<SpinVector>().unwrap(), x);
        }
    }
}
