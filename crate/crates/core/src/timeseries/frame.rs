use std::collections::HashSet;

use super::quarter::QuarterIndex;
use super::series::{union_range, QuarterlySeries};
use crate::error::{Error, Result};

/// Named columns sharing one quarterly index.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    start: QuarterIndex,
    len: usize,
    columns: Vec<QuarterlySeries>,
}

/// Aligns series onto the union of their ranges.
pub fn align(columns: impl IntoIterator<Item = QuarterlySeries>) -> Result<Frame> {
    let columns: Vec<QuarterlySeries> = columns.into_iter().collect();
    if columns.is_empty() {
        return Err(Error::InvalidArgument("align needs at least one column".into()));
    }
    let mut seen = HashSet::new();
    for c in &columns {
        if !seen.insert(c.name()) {
            return Err(Error::DuplicateColumn(c.name().to_string()));
        }
    }
    let (start, len) = union_range(&columns).unwrap_or((columns[0].start(), 0));
    let columns = columns.iter().map(|c| c.reindex(start, len)).collect();
    Ok(Frame {
        start,
        len,
        columns,
    })
}

impl Frame {
    pub fn start(&self) -> QuarterIndex {
        self.start
    }

    pub fn end(&self) -> Option<QuarterIndex> {
        (self.len > 0).then(|| self.start.offset(self.len as i64 - 1))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn quarters(&self) -> impl Iterator<Item = QuarterIndex> + '_ {
        (0..self.len).map(|i| self.start.offset(i as i64))
    }

    pub fn columns(&self) -> &[QuarterlySeries] {
        &self.columns
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name())
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|c| c.name() == name)
    }

    pub fn column(&self, name: &str) -> Result<&QuarterlySeries> {
        self.columns
            .iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    /// Adds a column, reindexed onto the frame's range. Values outside the
    /// range are dropped.
    pub fn insert(&mut self, column: QuarterlySeries) -> Result<()> {
        if self.has_column(column.name()) {
            return Err(Error::DuplicateColumn(column.name().to_string()));
        }
        self.columns.push(column.reindex(self.start, self.len));
        Ok(())
    }

    /// Inserts or replaces a column in place.
    pub fn upsert(&mut self, column: QuarterlySeries) {
        let column = column.reindex(self.start, self.len);
        match self.columns.iter_mut().find(|c| c.name() == column.name()) {
            Some(slot) => *slot = column,
            None => self.columns.push(column),
        }
    }

    /// New frame holding only the named columns, in the given order.
    pub fn select<S: AsRef<str>>(&self, names: &[S]) -> Result<Frame> {
        let columns = names
            .iter()
            .map(|n| self.column(n.as_ref()).cloned())
            .collect::<Result<Vec<_>>>()?;
        Ok(Frame {
            start: self.start,
            len: self.len,
            columns,
        })
    }

    /// Longest run of consecutive quarters in which every column is present.
    /// Ties resolve to the earliest run.
    pub fn complete_range(&self) -> Option<(QuarterIndex, QuarterIndex)> {
        let mut best: Option<(usize, usize)> = None;
        let mut run_start = None;
        for t in 0..=self.len {
            let complete = t < self.len && self.columns.iter().all(|c| c.values()[t].is_some());
            match (complete, run_start) {
                (true, None) => run_start = Some(t),
                (false, Some(s)) => {
                    if best.is_none_or(|(bs, be)| t - s > be - bs) {
                        best = Some((s, t));
                    }
                    run_start = None;
                }
                _ => {}
            }
        }
        best.map(|(s, e)| (self.start.offset(s as i64), self.start.offset(e as i64 - 1)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeseries::Unit;

    fn q(y: i32, n: u8) -> QuarterIndex {
        QuarterIndex::new(y, n).unwrap()
    }

    #[test]
    fn align_takes_union_and_marks_gaps() {
        let a = QuarterlySeries::from_values("a", Unit::Euros, q(2000, 1), [1.0, 2.0, 3.0]);
        let b = QuarterlySeries::from_values("b", Unit::Euros, q(2000, 3), [10.0, 20.0, 30.0]);
        let f = align([a, b]).unwrap();
        assert_eq!(f.start(), q(2000, 1));
        assert_eq!(f.end(), Some(q(2001, 1)));
        assert_eq!(f.column("a").unwrap().values()[3], None);
        assert_eq!(f.column("b").unwrap().values()[0], None);
        assert_eq!(f.complete_range(), Some((q(2000, 3), q(2000, 3))));
    }

    #[test]
    fn align_rejects_duplicates_and_empty() {
        let a = QuarterlySeries::from_values("a", Unit::Euros, q(2000, 1), [1.0]);
        assert!(matches!(align([a.clone(), a]), Err(Error::DuplicateColumn(n)) if n == "a"));
        assert!(align(Vec::new()).is_err());
    }

    #[test]
    fn complete_range_picks_longest_run() {
        let a = QuarterlySeries::new(
            "a",
            Unit::Ratio,
            q(2000, 1),
            vec![Some(1.0), None, Some(1.0), Some(1.0), Some(1.0), None, Some(1.0)],
        );
        let f = align([a]).unwrap();
        assert_eq!(f.complete_range(), Some((q(2000, 3), q(2001, 1))));
    }

    #[test]
    fn align_never_fabricates_values() {
        let a = QuarterlySeries::new("a", Unit::Ratio, q(2000, 2), vec![Some(1.0), None, Some(3.0)]);
        let b = QuarterlySeries::new("b", Unit::Ratio, q(1999, 3), vec![None, Some(5.0)]);
        let f = align([a.clone(), b.clone()]).unwrap();
        for (src, col) in [(&a, "a"), (&b, "b")] {
            for (quarter, v) in f.column(col).unwrap().iter() {
                if let Some(v) = v {
                    assert_eq!(src.get(quarter), Some(v));
                }
            }
            assert_eq!(f.column(col).unwrap().present_count(), src.present_count());
        }
    }
}
