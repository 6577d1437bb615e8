//! CSV readers and writers for datasets (`l,r[,weight]`) and query
//! workloads (`l,r[,s]`). Parse failures carry the file path and
//! 1-based line number. A header line is tolerated; column arity must
//! be consistent across the file.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::model::{Coord, Dataset, Error, QueryInterval, Result};

/// One workload entry; `s` overrides the CLI-level sample size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuerySpec<C: Coord> {
    pub q: QueryInterval<C>,
    pub s: Option<usize>,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

struct Rows {
    lines: std::io::Lines<BufReader<File>>,
    lineno: usize,
    header_checked: bool,
}

fn open_rows(path: &Path) -> Result<Rows> {
    let file = File::open(path)?;
    Ok(Rows {
        lines: BufReader::new(file).lines(),
        lineno: 0,
        header_checked: false,
    })
}

impl Rows {
    /// Next non-empty data row, split on commas. The first row is
    /// treated as a header when its first field is not numeric at all
    /// (a non-finite value like `nan` still counts as a data row so it
    /// fails with a line number instead of being skipped).
    fn next_row<C: Coord>(&mut self) -> Result<Option<(usize, Vec<String>)>> {
        loop {
            let line = match self.lines.next() {
                None => return Ok(None),
                Some(l) => l?,
            };
            self.lineno += 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let fields: Vec<String> = trimmed.split(',').map(|f| f.trim().to_string()).collect();
            if !self.header_checked {
                self.header_checked = true;
                if fields[0].parse::<f64>().is_err() {
                    continue; // header line
                }
            }
            return Ok(Some((self.lineno, fields)));
        }
    }
}

pub fn load_dataset<C: Coord>(path: &Path) -> Result<Dataset<C>> {
    let mut rows = open_rows(path)?;
    let mut spans: Vec<(C, C, f64)> = Vec::new();
    let mut arity: Option<usize> = None;
    while let Some((lineno, fields)) = rows.next_row::<C>()? {
        match arity {
            None => {
                if fields.len() != 2 && fields.len() != 3 {
                    return Err(parse_err(
                        path,
                        lineno,
                        format!("expected 2 or 3 columns, got {}", fields.len()),
                    ));
                }
                arity = Some(fields.len());
            }
            Some(a) if fields.len() != a => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("inconsistent column count: expected {a}, got {}", fields.len()),
                ));
            }
            _ => {}
        }
        let l = C::parse(&fields[0]).map_err(|e| parse_err(path, lineno, format!("bad l: {e}")))?;
        let r = C::parse(&fields[1]).map_err(|e| parse_err(path, lineno, format!("bad r: {e}")))?;
        if l > r {
            return Err(parse_err(path, lineno, format!("inverted interval [{l}, {r}]")));
        }
        let w = if fields.len() == 3 {
            let w: f64 = fields[2]
                .parse()
                .map_err(|e| parse_err(path, lineno, format!("bad weight: {e}")))?;
            if !(w > 0.0) || !w.is_finite() {
                return Err(parse_err(path, lineno, format!("weight must be positive, got {w}")));
            }
            w
        } else {
            1.0
        };
        spans.push((l, r, w));
    }
    let weighted = arity == Some(3);
    Dataset::from_spans(spans, weighted)
}

pub fn load_queries<C: Coord>(path: &Path) -> Result<Vec<QuerySpec<C>>> {
    let mut rows = open_rows(path)?;
    let mut out = Vec::new();
    while let Some((lineno, fields)) = rows.next_row::<C>()? {
        if fields.len() != 2 && fields.len() != 3 {
            return Err(parse_err(
                path,
                lineno,
                format!("expected 2 or 3 columns, got {}", fields.len()),
            ));
        }
        let l = C::parse(&fields[0]).map_err(|e| parse_err(path, lineno, format!("bad l: {e}")))?;
        let r = C::parse(&fields[1]).map_err(|e| parse_err(path, lineno, format!("bad r: {e}")))?;
        if l > r {
            return Err(parse_err(path, lineno, format!("inverted query [{l}, {r}]")));
        }
        let s = if fields.len() == 3 {
            Some(
                fields[2]
                    .parse::<usize>()
                    .map_err(|e| parse_err(path, lineno, format!("bad sample size: {e}")))?,
            )
        } else {
            None
        };
        out.push(QuerySpec {
            q: QueryInterval::new(l, r),
            s,
        });
    }
    Ok(out)
}

pub fn write_dataset<C: Coord>(path: &Path, data: &Dataset<C>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for x in &data.intervals {
        if data.weighted {
            writeln!(w, "{},{},{}", x.l, x.r, x.weight)?;
        } else {
            writeln!(w, "{},{}", x.l, x.r)?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_queries<C: Coord>(path: &Path, queries: &[QuerySpec<C>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for spec in queries {
        match spec.s {
            Some(s) => writeln!(w, "{},{},{}", spec.q.l, spec.q.r, s)?,
            None => writeln!(w, "{},{}", spec.q.l, spec.q.r)?,
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::NamedTempFile;

    fn tmp(content: &str) -> NamedTempFile {
        let mut f = NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_unweighted() {
        let f = tmp("1,5\n2,2\n-3,10\n");
        let d: Dataset<i64> = load_dataset(f.path()).unwrap();
        assert_eq!(d.len(), 3);
        assert!(!d.weighted);
        assert_eq!(d.intervals[2].l, -3);
        assert_eq!(d.domain_min, Some(-3));
        assert_eq!(d.domain_max, Some(10));
    }

    #[test]
    fn loads_weighted_with_header() {
        let f = tmp("l,r,weight\n1,5,2.5\n2,9,7\n");
        let d: Dataset<i64> = load_dataset(f.path()).unwrap();
        assert!(d.weighted);
        assert_eq!(d.intervals[0].weight, 2.5);
        assert_eq!(d.intervals[1].id, 1);
    }

    #[test]
    fn rejects_inverted_with_line_number() {
        let f = tmp("1,5\n9,3\n");
        let err = load_dataset::<i64>(f.path()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_mixed_arity() {
        let f = tmp("1,5\n2,9,3\n");
        assert!(matches!(
            load_dataset::<i64>(f.path()).unwrap_err(),
            Error::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn rejects_bad_weight() {
        let f = tmp("1,5,0\n");
        assert!(matches!(
            load_dataset::<i64>(f.path()).unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn float_coordinates() {
        let f = tmp("0.5,2.75\n-1.25,0.0\n");
        let d: Dataset<f64> = load_dataset(f.path()).unwrap();
        assert_eq!(d.intervals[0].r, 2.75);
        let g = tmp("nan,1\n");
        assert!(load_dataset::<f64>(g.path()).is_err());
    }

    #[test]
    fn queries_with_optional_s() {
        let f = tmp("l,r,s\n0,10,100\n5,6\n");
        let qs: Vec<QuerySpec<i64>> = load_queries(f.path()).unwrap();
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].s, Some(100));
        assert_eq!(qs[1].s, None);
        assert_eq!(qs[1].q, QueryInterval::new(5, 6));
    }

    #[test]
    fn round_trip() {
        let d = Dataset::from_spans(vec![(1i64, 5, 2.0), (0, 9, 7.0)], true).unwrap();
        let f = NamedTempFile::new().unwrap();
        write_dataset(f.path(), &d).unwrap();
        let back: Dataset<i64> = load_dataset(f.path()).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back.weighted);
        assert_eq!(back.intervals[1].weight, 7.0);

        let qs = vec![
            QuerySpec { q: QueryInterval::new(0i64, 4), s: Some(10) },
            QuerySpec { q: QueryInterval::new(2, 2), s: None },
        ];
        let g = NamedTempFile::new().unwrap();
        write_queries(g.path(), &qs).unwrap();
        let back: Vec<QuerySpec<i64>> = load_queries(g.path()).unwrap();
        assert_eq!(back, qs);
    }

    #[test]
    fn empty_file_is_empty_dataset() {
        let f = tmp("");
        let d: Dataset<i64> = load_dataset(f.path()).unwrap();
        assert!(d.is_empty());
        assert!(!d.weighted);
    }
}
