//! Ordered enumeration of viable identities and nontransitive identities.
//!
//! Identities are generated directly in encoding order: a depth-first walk
//! over digits `0..2k` that only places a die while it still has faces
//! left, so every leaf is viable. The NI search additionally carries partial
//! win counts and cuts a prefix as soon as some required win can no longer
//! happen. Cut subtrees are counted, not walked, so viable indexes stay
//! exact.
//!
//! The walk stops at the first encoding made of `n` copies of the top digit
//! (`55500000` for three three-sided dice): from there on the last die has
//! all its faces directly above A's lowest face and loses to A.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::CanonicalLevel;
use crate::descriptor::{Descriptor, DescriptorError};
use crate::encoding::{self, EncodedIdentity};
use crate::notation::{parse_identity, Die, Identity, Operator};
use crate::pattern::{pattern_from_descriptor, WinPattern};

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error("unknown enumeration mode {0:?} (expected irreducible, alphabetical-dupe or duplicative)")]
    UnknownMode(String),
    #[error("checkpoint {path}: {source}")]
    Checkpoint { path: String, source: io::Error },
    #[error("corrupt checkpoint {path}: {reason}")]
    CorruptCheckpoint { path: String, reason: String },
}

/// Which identities count as distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationMode {
    /// Alphabetical `=` runs and no `N<N` adjacency: the published lists.
    Irreducible,
    /// Alphabetical `=` runs; `N<N` duplicates allowed.
    AlphabeticalDupe,
    /// Every viable identity, in any run order.
    Duplicative,
}

impl EnumerationMode {
    pub fn name(self) -> &'static str {
        match self {
            EnumerationMode::Irreducible => "irreducible",
            EnumerationMode::AlphabeticalDupe => "alphabetical-dupe",
            EnumerationMode::Duplicative => "duplicative",
        }
    }

    /// Whether die `die` may follow die `prev` across `op`.
    pub fn allows(self, prev: usize, op: Operator, die: usize) -> bool {
        match (self, op) {
            (EnumerationMode::Duplicative, _) => true,
            (_, Operator::Equal) => die >= prev,
            (EnumerationMode::Irreducible, Operator::Less) => die != prev,
            (EnumerationMode::AlphabeticalDupe, Operator::Less) => true,
        }
    }

    /// Whether a whole identity passes this mode's filter.
    pub fn admits(self, id: &Identity) -> bool {
        match self {
            EnumerationMode::Irreducible => crate::canonical::is_irreducible(id),
            EnumerationMode::AlphabeticalDupe => crate::canonical::is_alphabetical(id),
            EnumerationMode::Duplicative => true,
        }
    }

    /// Canonical level whose outputs this mode lists.
    pub fn canonical_level(self) -> Option<CanonicalLevel> {
        match self {
            EnumerationMode::Irreducible => Some(CanonicalLevel::Irreducible),
            EnumerationMode::AlphabeticalDupe => Some(CanonicalLevel::AlphabeticalDupe),
            EnumerationMode::Duplicative => None,
        }
    }
}

impl fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnumerationMode {
    type Err = EnumerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "irreducible" => Ok(EnumerationMode::Irreducible),
            "alphabetical-dupe" | "dupe" => Ok(EnumerationMode::AlphabeticalDupe),
            "duplicative" => Ok(EnumerationMode::Duplicative),
            other => Err(EnumerateError::UnknownMode(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationRecord {
    pub identity: Identity,
    pub viable_index: u64,
    pub encoding: EncodedIdentity,
}

/// Enumeration of one descriptor's identities under one mode.
#[derive(Clone, Debug)]
pub struct Enumeration {
    k: usize,
    n: usize,
    mode: EnumerationMode,
    /// `(i, j)` for every pair where the target pattern has `i` beat `j`.
    required: Vec<(usize, usize)>,
    cutoff: bool,
}

impl Enumeration {
    pub fn new(d: &Descriptor, mode: EnumerationMode) -> Result<Enumeration, EnumerateError> {
        let n = d.require_sides()?;
        let pattern = pattern_from_descriptor(d)?;
        Ok(Enumeration::from_pattern(&pattern, n, mode))
    }

    pub fn from_pattern(pattern: &WinPattern, n: usize, mode: EnumerationMode) -> Enumeration {
        let k = pattern.dice();
        let required = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).filter(|&(i, j)| pattern.beats(i, j)).collect();
        // the last die must beat A for the stop rule to be sound
        let cutoff = n >= 2 && pattern.beats(k - 1, 0);
        Enumeration { k, n, mode, required, cutoff }
    }

    pub fn dice(&self) -> usize {
        self.k
    }

    pub fn sides(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> EnumerationMode {
        self.mode
    }

    /// Digits per encoding.
    pub fn length(&self) -> usize {
        self.k * self.n - 1
    }

    /// The first encoding not visited, if the stop rule applies.
    pub fn stop_encoding(&self) -> Option<EncodedIdentity> {
        self.cutoff.then(|| {
            let top = (2 * self.k - 1) as u8;
            let mut digits = vec![top; self.n];
            digits.resize(self.length(), 0);
            EncodedIdentity::new(self.k, digits).expect("digits in range")
        })
    }

    /// Viable identities in encoding order.
    pub fn viable(&self) -> impl Iterator<Item = EnumerationRecord> {
        let k = self.k;
        Walker::new(self, &[], 0, false).expect("empty prefix is valid").map(move |leaf| record(k, leaf))
    }

    /// Number of viable identities the walk visits.
    pub fn viable_count(&self) -> u128 {
        let mut counter = Counter::new(self);
        counter.before_cutoff(self, &[])
    }

    /// Nontransitive identities in encoding order, lazily.
    pub fn nontransitive(&self) -> impl Iterator<Item = EnumerationRecord> {
        let k = self.k;
        Walker::new(self, &[], 0, true).expect("empty prefix is valid").map(move |leaf| record(k, leaf))
    }

    /// Nontransitive identities whose every digit prefix passes `filter`.
    /// The filter sees prefixes from one digit up to the full encoding.
    pub(crate) fn nontransitive_filtered(&self, filter: Arc<PrefixFilter>) -> impl Iterator<Item = Identity> {
        let k = self.k;
        Walker::new(self, &[], 0, true)
            .expect("empty prefix is valid")
            .with_filter(filter)
            .map(move |leaf| record(k, leaf).identity)
    }

    /// Nontransitive identities, searched in parallel over prefix work units
    /// and merged back into encoding order.
    pub fn collect_nontransitive(&self, jobs: usize) -> Vec<EnumerationRecord> {
        self.run_units(jobs, |_| Ok(None), |_, records| Ok(records)).expect("in-memory run cannot fail")
    }

    /// Like [`collect_nontransitive`](Self::collect_nontransitive), but each
    /// finished work unit is written to `dir` and reused on the next run.
    pub fn collect_nontransitive_checkpointed(
        &self,
        jobs: usize,
        dir: &Path,
    ) -> Result<Vec<EnumerationRecord>, EnumerateError> {
        let io_err = |path: &Path| {
            let path = path.display().to_string();
            move |source| EnumerateError::Checkpoint { path, source }
        };
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let tag = format!("{}d{}s-{}", self.k, self.n, self.mode.name());
        let unit_path = |unit: &[u8]| {
            let name: Vec<String> = unit.iter().map(|d| d.to_string()).collect();
            dir.join(format!("{tag}-unit-{}.txt", name.join("-")))
        };
        self.run_units(
            jobs,
            |unit| {
                let path = unit_path(unit);
                match fs::read_to_string(&path) {
                    Ok(text) => self.load_unit(&path, &text).map(Some),
                    Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
                    Err(e) => Err(io_err(&path)(e)),
                }
            },
            |unit, records| {
                let path = unit_path(unit);
                let mut text = String::from("done\n");
                for r in &records {
                    text.push_str(&format!("{} {}\n", r.viable_index, r.identity));
                }
                let tmp = path.with_extension("tmp");
                fs::write(&tmp, text).and_then(|_| fs::rename(&tmp, &path)).map_err(io_err(&path))?;
                Ok(records)
            },
        )
    }

    fn load_unit(&self, path: &Path, text: &str) -> Result<Vec<EnumerationRecord>, EnumerateError> {
        let corrupt = |reason: String| EnumerateError::CorruptCheckpoint { path: path.display().to_string(), reason };
        let mut lines = text.lines();
        if lines.next() != Some("done") {
            return Err(corrupt("missing completion marker".into()));
        }
        lines
            .map(|line| {
                let (index, id) = line.split_once(' ').ok_or_else(|| corrupt(format!("bad line {line:?}")))?;
                let viable_index = index.parse().map_err(|_| corrupt(format!("bad index {index:?}")))?;
                let identity = parse_identity(id).map_err(|e| corrupt(e.to_string()))?;
                let encoding = encoding::encode_identity(&identity, self.k).map_err(|e| corrupt(e.to_string()))?;
                Ok(EnumerationRecord { identity, viable_index, encoding })
            })
            .collect()
    }

    fn run_units<L, F>(&self, jobs: usize, load: L, finish: F) -> Result<Vec<EnumerationRecord>, EnumerateError>
    where
        L: Fn(&[u8]) -> Result<Option<Vec<EnumerationRecord>>, EnumerateError> + Sync,
        F: Fn(&[u8], Vec<EnumerationRecord>) -> Result<Vec<EnumerationRecord>, EnumerateError> + Sync,
    {
        let units = self.work_units(jobs);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
        let parts: Vec<Result<Vec<EnumerationRecord>, EnumerateError>> = pool.install(|| {
            units
                .par_iter()
                .map(|(prefix, base)| {
                    if let Some(done) = load(prefix)? {
                        return Ok(done);
                    }
                    let records: Vec<EnumerationRecord> = Walker::new(self, prefix, *base, true)
                        .expect("work unit prefixes are valid")
                        .map(|leaf| record(self.k, leaf))
                        .collect();
                    finish(prefix, records)
                })
                .collect()
        });
        let mut out = Vec::new();
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }

    /// Valid digit prefixes in encoding order, each with the viable index of
    /// its first leaf.
    fn work_units(&self, jobs: usize) -> Vec<(Vec<u8>, u64)> {
        let target = (jobs.max(1) * 8) as u128;
        let mut depth = 0;
        let mut prefixes = vec![Vec::new()];
        while depth < self.length().min(6) && (prefixes.len() as u128) < target {
            prefixes = prefixes
                .iter()
                .flat_map(|p| {
                    (0..2 * self.k as u8).map(move |d| {
                        let mut q = p.clone();
                        q.push(d);
                        q
                    })
                })
                .filter(|q| self.prefix_state(q).is_some())
                .collect();
            depth += 1;
        }
        let mut counter = Counter::new(self);
        let mut base = 0u128;
        let mut units = Vec::with_capacity(prefixes.len());
        for p in prefixes {
            let count = counter.before_cutoff(self, &p);
            if count > 0 {
                units.push((p, base as u64));
            }
            base += count;
        }
        units
    }

    /// Replays a prefix, returning `None` if it breaks the face counts or
    /// the mode filter.
    fn prefix_state(&self, prefix: &[u8]) -> Option<State> {
        let mut s = State::root(self);
        for &digit in prefix {
            let (op, die) = encoding::split_digit(digit, self.k);
            if s.rem[die] == 0 || !self.mode.allows(s.prev, op, die) {
                return None;
            }
            s.place(op, die, self.k);
        }
        Some(s)
    }

    fn top_digit(&self) -> u8 {
        (2 * self.k - 1) as u8
    }
}

/// Per-prefix search state.
#[derive(Clone, Debug)]
struct State {
    rem: Vec<usize>,
    placed: Vec<usize>,
    at_level: Vec<usize>,
    /// `wins[i * k + j]`: settled wins of die `i` over die `j`.
    wins: Vec<u32>,
    prev: usize,
    /// Length of the run of top digits at the start of the prefix.
    leading_top: usize,
    len: usize,
}

impl State {
    fn root(e: &Enumeration) -> State {
        let k = e.k;
        let mut rem = vec![e.n; k];
        rem[0] -= 1;
        let mut placed = vec![0; k];
        placed[0] = 1;
        State { rem, at_level: placed.clone(), placed, wins: vec![0; k * k], prev: 0, leading_top: 0, len: 0 }
    }

    fn place(&mut self, op: Operator, die: usize, k: usize) {
        if op == Operator::Less {
            self.at_level.iter_mut().for_each(|c| *c = 0);
        }
        for e in 0..k {
            if e != die {
                // every face of e below the current level loses to the new face
                self.wins[die * k + e] += (self.placed[e] - self.at_level[e]) as u32;
            }
        }
        self.placed[die] += 1;
        self.at_level[die] += 1;
        self.rem[die] -= 1;
        self.prev = die;
        let top = op == Operator::Less && die == k - 1;
        if top && self.leading_top == self.len {
            self.leading_top += 1;
        }
        self.len += 1;
    }

    /// Upper bound on every required margin is still positive.
    fn feasible(&self, e: &Enumeration) -> bool {
        let k = e.k;
        e.required.iter().all(|&(i, j)| {
            let best_i = self.wins[i * k + j] as usize + self.rem[i] * e.n;
            let worst_j = self.wins[j * k + i] as usize + self.rem[j] * (self.placed[i] - self.at_level[i]);
            best_i > worst_j
        })
    }

    fn all_top(&self) -> bool {
        self.leading_top == self.len
    }
}

/// Memoised count of viable completions of a prefix under a mode.
struct Counter {
    k: usize,
    n: usize,
    mode: EnumerationMode,
    memo: HashMap<(Vec<u8>, u8), u128>,
}

impl Counter {
    fn new(e: &Enumeration) -> Counter {
        Counter { k: e.k, n: e.n, mode: e.mode, memo: HashMap::new() }
    }

    fn completions(&mut self, rem: &[usize], prev: usize) -> u128 {
        if rem.iter().all(|&r| r == 0) {
            return 1;
        }
        let key = (rem.iter().map(|&r| r as u8).collect::<Vec<_>>(), prev as u8);
        if let Some(&c) = self.memo.get(&key) {
            return c;
        }
        let mut total = 0;
        let mut next = rem.to_vec();
        for die in 0..self.k {
            if rem[die] == 0 {
                continue;
            }
            for op in [Operator::Equal, Operator::Less] {
                if self.mode.allows(prev, op, die) {
                    next[die] -= 1;
                    total += self.completions(&next, die);
                    next[die] += 1;
                }
            }
        }
        self.memo.insert(key, total);
        total
    }

    /// Viable leaves under `prefix` that come before the stop encoding.
    fn before_cutoff(&mut self, e: &Enumeration, prefix: &[u8]) -> u128 {
        let Some(state) = e.prefix_state(prefix) else {
            return 0;
        };
        self.state_before_cutoff(e, &state, prefix.to_vec())
    }

    fn state_before_cutoff(&mut self, e: &Enumeration, state: &State, prefix: Vec<u8>) -> u128 {
        if !e.cutoff || !state.all_top() {
            return self.completions(&state.rem, state.prev);
        }
        if state.len >= self.n {
            return 0;
        }
        if state.len == e.length() {
            return 1;
        }
        let mut total = 0;
        for digit in 0..2 * self.k as u8 {
            let mut p = prefix.clone();
            p.push(digit);
            total += self.before_cutoff(e, &p);
        }
        total
    }
}

fn record(k: usize, leaf: Leaf) -> EnumerationRecord {
    let encoding = EncodedIdentity::new(k, leaf.digits).expect("digits in range");
    EnumerationRecord { identity: encoding::decode_identity(&encoding), viable_index: leaf.index, encoding }
}

/// Extra prefix test for constrained searches.
pub(crate) type PrefixFilter = dyn Fn(&[u8]) -> bool + Send + Sync;

struct Leaf {
    digits: Vec<u8>,
    index: u64,
}

/// Explicit-stack depth-first walk below a fixed prefix.
struct Walker {
    e: Enumeration,
    prune: bool,
    filter: Option<Arc<PrefixFilter>>,
    root: usize,
    states: Vec<State>,
    digits: Vec<u8>,
    cursor: Vec<u8>,
    depth: usize,
    index: u64,
    counter: Counter,
    done: bool,
    root_leaf_pending: bool,
}

impl Walker {
    fn new(e: &Enumeration, prefix: &[u8], start: u64, prune: bool) -> Option<Walker> {
        let root_state = e.prefix_state(prefix)?;
        let len = e.length();
        let root = prefix.len();
        let mut states = vec![root_state.clone(); len + 1];
        states[root] = root_state;
        let mut digits = vec![0; len];
        digits[..root].copy_from_slice(prefix);
        let stopped = e.cutoff && states[root].all_top() && root >= e.n;
        Some(Walker {
            e: e.clone(),
            prune,
            filter: None,
            root,
            states,
            digits,
            cursor: vec![0; len + 1],
            depth: root,
            index: start,
            counter: Counter::new(e),
            done: stopped,
            root_leaf_pending: root == len && !stopped,
        })
    }

    fn with_filter(mut self, filter: Arc<PrefixFilter>) -> Walker {
        self.filter = Some(filter);
        self
    }

    fn accept_leaf(&self, state: &State, digits: &[u8]) -> bool {
        (!self.prune || state.feasible(&self.e)) && self.filter.as_ref().is_none_or(|f| f(digits))
    }
}

impl Iterator for Walker {
    type Item = Leaf;

    fn next(&mut self) -> Option<Leaf> {
        let k = self.e.k;
        let len = self.e.length();
        if self.root_leaf_pending {
            self.root_leaf_pending = false;
            self.done = true;
            let index = self.index;
            self.index += 1;
            return self
                .accept_leaf(&self.states[self.root], &self.digits)
                .then(|| Leaf { digits: self.digits.clone(), index });
        }
        while !self.done {
            let e = &self.e;
            let d = self.depth;
            if self.cursor[d] as usize >= 2 * k {
                if d == self.root {
                    self.done = true;
                    break;
                }
                self.depth -= 1;
                continue;
            }
            let digit = self.cursor[d];
            self.cursor[d] += 1;
            let (op, die) = encoding::split_digit(digit, k);
            let parent = &self.states[d];
            if parent.rem[die] == 0 || !e.mode.allows(parent.prev, op, die) {
                continue;
            }
            if e.cutoff && digit == e.top_digit() && parent.all_top() && d + 1 == e.n {
                self.done = true;
                break;
            }
            let mut child = parent.clone();
            child.place(op, die, k);
            self.digits[d] = digit;
            if d + 1 == len {
                let index = self.index;
                self.index += 1;
                if self.accept_leaf(&child, &self.digits) {
                    return Some(Leaf { digits: self.digits.clone(), index });
                }
                continue;
            }
            if self.prune && !(e.cutoff && child.all_top()) && !child.feasible(e) {
                self.index += self.counter.completions(&child.rem, child.prev) as u64;
                continue;
            }
            // filtered walks do not report indexes, so nothing to count here
            if self.filter.as_ref().is_some_and(|f| !f(&self.digits[..=d])) {
                continue;
            }
            self.states[d + 1] = child;
            self.cursor[d + 1] = 0;
            self.depth = d + 1;
        }
        None
    }
}

pub fn enumerate_viable(
    d: &Descriptor,
    mode: EnumerationMode,
) -> Result<impl Iterator<Item = Identity>, EnumerateError> {
    Ok(Enumeration::new(d, mode)?.viable().map(|r| r.identity))
}

/// Every NI of the descriptor under `mode`, in encoding order.
pub fn enumerate_ni(d: &Descriptor, mode: EnumerationMode) -> Result<Vec<EnumerationRecord>, EnumerateError> {
    let e = Enumeration::new(d, mode)?;
    Ok(e.collect_nontransitive(rayon::current_num_threads()))
}

/// Writes an NI list: a `# <descriptor> <mode>` header, then one identity
/// per line.
pub fn write_ni_list(d: &Descriptor, mode: EnumerationMode, ids: impl IntoIterator<Item = Identity>) -> String {
    let mut out = format!("# {} {}\n", d, mode);
    for id in ids {
        out.push_str(&id.to_string());
        out.push('\n');
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("identity list line {line}: {source}")]
pub struct ListError {
    pub line: usize,
    pub source: crate::notation::NotationError,
}

/// A parsed NI list file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NiList {
    /// Descriptor and mode from a well-formed header, if any.
    pub header: Option<(Descriptor, EnumerationMode)>,
    pub identities: Vec<Identity>,
}

/// Reads an identity list: one identity per line, `#` comments and blank
/// lines ignored. A first-line header `# [3D3S] irreducible` is recognised.
pub fn parse_ni_list(text: &str) -> Result<NiList, ListError> {
    let mut list = NiList::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if list.header.is_none() && list.identities.is_empty() {
                list.header = parse_header(comment);
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let id = parse_identity(line).map_err(|source| ListError { line: i + 1, source })?;
        list.identities.push(id);
    }
    Ok(list)
}

fn parse_header(comment: &str) -> Option<(Descriptor, EnumerationMode)> {
    let comment = comment.trim();
    let close = comment.find(']')?;
    let (desc, rest) = comment.split_at(close + 1);
    let mut words = rest.split_whitespace();
    let first = words.next()?;
    // a primary-order suffix sits between the bracket and the mode
    let (desc_text, mode_text) = match first.parse::<EnumerationMode>() {
        Ok(_) => (desc.to_string(), first),
        Err(_) => (format!("{desc} {first}"), words.next()?),
    };
    Some((desc_text.parse().ok()?, mode_text.parse().ok()?))
}

/// Identities whose first slot is not A cannot be enumerated.
pub fn is_anchored(id: &Identity) -> bool {
    id.first() == Die::A
}
