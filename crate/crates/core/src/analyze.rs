//! Gaps between successive NIs in the viable stream, and the repeated runs
//! inside them.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::descriptor::Descriptor;
use crate::enumerate::{EnumerateError, Enumeration, EnumerationMode, EnumerationRecord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapSequence {
    pub descriptor: String,
    pub mode: EnumerationMode,
    /// Viable index of the first NI, if there is one.
    pub first_index: Option<u64>,
    pub gaps: Vec<u64>,
}

impl GapSequence {
    pub fn from_records(d: &Descriptor, mode: EnumerationMode, records: &[EnumerationRecord]) -> GapSequence {
        GapSequence {
            descriptor: d.to_string(),
            mode,
            first_index: records.first().map(|r| r.viable_index),
            gaps: records.windows(2).map(|w| w[1].viable_index - w[0].viable_index).collect(),
        }
    }

    /// Viable index of every NI, rebuilt from the first index and the gaps.
    pub fn indexes(&self) -> Vec<u64> {
        let Some(first) = self.first_index else {
            return Vec::new();
        };
        std::iter::once(first)
            .chain(self.gaps.iter().scan(first, |at, g| {
                *at += g;
                Some(*at)
            }))
            .collect()
    }
}

pub fn gap_sequence(d: &Descriptor, m: EnumerationMode) -> Result<GapSequence, EnumerateError> {
    let e = Enumeration::new(d, m)?;
    let records = e.collect_nontransitive(rayon::current_num_threads());
    Ok(GapSequence::from_records(d, m, &records))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PartialKind {
    Prefix,
    Suffix,
}

/// A truncated occurrence: a prefix or suffix of the pattern standing alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartialOccurrence {
    pub position: usize,
    pub len: usize,
    pub kind: PartialKind,
}

/// An occurrence where one pattern element is replaced by several gaps
/// that add up to it, like 41 showing up as 18, 2, 21.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitOccurrence {
    pub position: usize,
    /// Index into the pattern of the replaced element.
    pub element: usize,
    pub parts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepeatReport {
    pub pattern: Vec<u64>,
    /// Start of every full occurrence; they never overlap.
    pub occurrences: Vec<usize>,
    pub repetitions: usize,
    /// How often each value sits directly before a full occurrence.
    pub preceded_by: BTreeMap<u64, usize>,
    pub partials: Vec<PartialOccurrence>,
    pub splits: Vec<SplitOccurrence>,
}

impl RepeatReport {
    pub fn preceded_by(&self, value: u64) -> usize {
        self.preceded_by.get(&value).copied().unwrap_or(0)
    }
}

/// Longest run of pattern elements a split may be spread over.
const MAX_SPLIT_PARTS: usize = 6;

/// Greedy motif mining. Repeatedly takes the window that occurs most often
/// (longest on ties) among positions not yet claimed, claims its
/// non-overlapping occurrences plus the element just before each, and
/// stops when nothing of length `min_len` repeats `min_reps` times. Leftover
/// positions are then searched for partial and split occurrences of the
/// patterns found.
pub fn find_repeats(g: &GapSequence, min_len: usize, min_reps: usize) -> Vec<RepeatReport> {
    let gaps = &g.gaps;
    let min_len = min_len.max(2);
    let min_reps = min_reps.max(2);
    let mut free = vec![true; gaps.len()];
    let mut reports = Vec::new();

    while let Some((pattern, occurrences)) = best_window(gaps, &free, min_len, min_reps) {
        let mut preceded_by = BTreeMap::new();
        for &at in &occurrences {
            free[at..at + pattern.len()].iter_mut().for_each(|f| *f = false);
            if at > 0 {
                *preceded_by.entry(gaps[at - 1]).or_insert(0) += 1;
            }
        }
        for &at in &occurrences {
            if at > 0 {
                free[at - 1] = false;
            }
        }
        reports.push(RepeatReport {
            repetitions: occurrences.len(),
            pattern,
            occurrences,
            preceded_by,
            partials: Vec::new(),
            splits: Vec::new(),
        });
    }

    for r in &mut reports {
        r.splits = find_splits(gaps, &mut free, &r.pattern);
    }
    for r in &mut reports {
        r.partials = find_partials(gaps, &mut free, &r.pattern);
    }
    reports
}

/// Non-overlapping starts of every free window of length `len`.
fn windows<'a>(gaps: &'a [u64], free: &[bool], len: usize) -> HashMap<&'a [u64], Vec<usize>> {
    let mut found: HashMap<&[u64], Vec<usize>> = HashMap::new();
    let mut run = 0;
    for end in 0..gaps.len() {
        run = if free[end] { run + 1 } else { 0 };
        if run >= len {
            let start = end + 1 - len;
            let starts = found.entry(&gaps[start..=end]).or_default();
            if starts.last().is_none_or(|&s| s + len <= start) {
                starts.push(start);
            }
        }
    }
    found
}

/// Ranking key (repetitions, length, earliness), window, starts.
type Candidate = ((usize, usize, usize), Vec<u64>, Vec<usize>);

fn best_window(gaps: &[u64], free: &[bool], min_len: usize, min_reps: usize) -> Option<(Vec<u64>, Vec<usize>)> {
    let mut best: Option<Candidate> = None;
    let mut len = min_len;
    loop {
        let mut any = false;
        for (w, starts) in windows(gaps, free, len) {
            if starts.len() < min_reps {
                continue;
            }
            any = true;
            // more repetitions, then longer, then earlier
            let key = (starts.len(), len, usize::MAX - starts[0]);
            if best.as_ref().is_none_or(|b| key > b.0) {
                best = Some((key, w.to_vec(), starts));
            }
        }
        if !any {
            break;
        }
        len += 1;
    }
    best.map(|(_, w, s)| (w, s))
}

fn find_splits(gaps: &[u64], free: &mut [bool], pattern: &[u64]) -> Vec<SplitOccurrence> {
    let mut out = Vec::new();
    let mut at = 0;
    'scan: while at < gaps.len() {
        for element in 0..pattern.len() {
            for parts in 2..=MAX_SPLIT_PARTS {
                let total = pattern.len() - 1 + parts;
                if at + total > gaps.len() || !free[at..at + total].iter().all(|&f| f) {
                    continue;
                }
                let window = &gaps[at..at + total];
                let split = &window[element..element + parts];
                let matches = window[..element] == pattern[..element]
                    && window[element + parts..] == pattern[element + 1..]
                    && split.iter().sum::<u64>() == pattern[element];
                if matches {
                    free[at..at + total].iter_mut().for_each(|f| *f = false);
                    out.push(SplitOccurrence { position: at, element, parts: split.to_vec() });
                    at += total;
                    continue 'scan;
                }
            }
        }
        at += 1;
    }
    out
}

/// Longest prefixes and suffixes first, left to right, at least two long.
fn find_partials(gaps: &[u64], free: &mut [bool], pattern: &[u64]) -> Vec<PartialOccurrence> {
    let mut out = Vec::new();
    for len in (2..pattern.len()).rev() {
        for (kind, piece) in
            [(PartialKind::Prefix, &pattern[..len]), (PartialKind::Suffix, &pattern[pattern.len() - len..])]
        {
            let mut at = 0;
            while at + len <= gaps.len() {
                if free[at..at + len].iter().all(|&f| f) && &gaps[at..at + len] == piece {
                    free[at..at + len].iter_mut().for_each(|f| *f = false);
                    out.push(PartialOccurrence { position: at, len, kind });
                    at += len;
                } else {
                    at += 1;
                }
            }
        }
    }
    out.sort_by_key(|p| p.position);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(gaps: &[u64]) -> GapSequence {
        GapSequence {
            descriptor: "[3D3S]".into(),
            mode: EnumerationMode::Irreducible,
            first_index: Some(0),
            gaps: gaps.to_vec(),
        }
    }

    #[test]
    fn constant_sequence() {
        let r = find_repeats(&seq(&[5, 5, 5, 5]), 2, 2);
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].pattern.clone(), r[0].repetitions), (vec![5, 5], 2));
    }

    #[test]
    fn reconstructs_indexes() {
        let mut s = seq(&[3, 1, 4]);
        s.first_index = Some(10);
        assert_eq!(s.indexes(), vec![10, 13, 14, 18]);
        assert!(GapSequence { first_index: None, gaps: vec![], ..s }.indexes().is_empty());
    }

    #[test]
    fn reports_partials_and_preceding_values() {
        let gaps = [42, 10, 7, 7, 1282, 10, 7, 7, 35, 505, 7, 7, 7, 45, 67, 42, 10, 7, 7, 211, 42, 10, 7, 7];
        let r = find_repeats(&seq(&gaps), 4, 3);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].pattern, vec![42, 10, 7, 7]);
        assert_eq!(r[0].occurrences, vec![0, 15, 20]);
        assert_eq!(r[0].partials.len(), 2);
        assert_eq!(r[0].preceded_by(211), 1);
    }

    #[test]
    fn finds_sum_preserving_splits() {
        let gaps = [2, 4, 1, 41, 2, 1, 2, 900, 2, 4, 1, 41, 2, 1, 2, 77, 2, 4, 1, 18, 2, 21, 2, 1, 2, 5];
        let r = find_repeats(&seq(&gaps), 4, 2);
        assert_eq!(r[0].pattern, vec![2, 4, 1, 41, 2, 1, 2]);
        assert_eq!(r[0].splits, vec![SplitOccurrence { position: 16, element: 3, parts: vec![18, 2, 21] }]);
        for s in &r[0].splits {
            assert_eq!(s.parts.iter().sum::<u64>(), r[0].pattern[s.element]);
        }
    }

    #[test]
    fn nothing_repeats() {
        assert!(find_repeats(&seq(&[1, 2, 3, 4, 5, 6]), 2, 2).is_empty());
        assert!(find_repeats(&seq(&[]), 2, 2).is_empty());
    }
}
