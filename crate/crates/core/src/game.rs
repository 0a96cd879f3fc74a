//! Units, coalitions and tabulated characteristic functions.
//!
//! A [`CharTable`] stores one worth per subset of a [`UnitSet`] (dense, indexed
//! by bitmask); an [`OrderedCharTable`] stores one worth per duplicate-free
//! sequence of units. Both carry the label of the evaluation target they were
//! measured against and a free-form metadata map used for provenance.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest unit set for which subsets are enumerated exactly.
pub const MAX_UNITS: usize = 16;
/// Largest unit set for which ordered coalitions are enumerated exactly.
pub const MAX_ORDERED_UNITS: usize = 8;

/// Metadata key flagging how the empty coalition's worth was obtained.
pub const META_EMPTY_WORTH: &str = "empty_worth";

/// Ordered list of distinct unit names. Index order is the bit order of
/// every [`Coalition`] built over this set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct UnitSet {
    names: Vec<String>,
}

impl UnitSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_UNITS {
            return Err(Error::TooManyUnits {
                size: names.len(),
                bound: MAX_UNITS,
            });
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateUnit(name.clone()));
            }
        }
        Ok(UnitSet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownUnit(name.to_string()))
    }

    pub fn full(&self) -> Coalition {
        Coalition::full(self.len())
    }

    /// Unit set made of the members of `c`, in index order.
    pub fn subset(&self, c: Coalition) -> UnitSet {
        UnitSet {
            names: c.members().map(|i| self.names[i].clone()).collect(),
        }
    }

    pub fn coalition_of<S: AsRef<str>>(&self, names: &[S]) -> Result<Coalition> {
        let mut c = Coalition::EMPTY;
        for name in names {
            let i = self.index(name.as_ref())?;
            if c.contains(i) {
                return Err(Error::InvalidCoalition(format!(
                    "unit `{}` listed twice",
                    name.as_ref()
                )));
            }
            c = c.with(i);
        }
        Ok(c)
    }

    pub fn ordered_of<S: AsRef<str>>(&self, names: &[S]) -> Result<OrderedCoalition> {
        let seq = names
            .iter()
            .map(|n| self.index(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        OrderedCoalition::new(seq, self.len())
    }

    pub fn names_of(&self, c: Coalition) -> Vec<String> {
        c.members().map(|i| self.names[i].clone()).collect()
    }

    pub fn names_of_seq(&self, seq: &[usize]) -> Vec<String> {
        seq.iter().map(|&i| self.names[i].clone()).collect()
    }

    /// `{a,b}` style rendering of a coalition.
    pub fn describe(&self, c: Coalition) -> String {
        format!("{{{}}}", self.names_of(c).join(","))
    }

    pub fn describe_seq(&self, seq: &[usize]) -> String {
        format!("[{}]", self.names_of_seq(seq).join(","))
    }
}

impl TryFrom<Vec<String>> for UnitSet {
    type Error = Error;

    fn try_from(names: Vec<String>) -> Result<Self> {
        UnitSet::new(names)
    }
}

impl From<UnitSet> for Vec<String> {
    fn from(units: UnitSet) -> Self {
        units.names
    }
}

/// Unordered coalition encoded as a bitmask over unit indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_mask(mask: u32) -> Self {
        Coalition(mask)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(Coalition::EMPTY, |c, i| c.with(i))
    }

    pub fn full(n: usize) -> Self {
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        Coalition(1 << i)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn with(self, i: usize) -> Self {
        Coalition(self.0 | (1 << i))
    }

    pub fn without(self, i: usize) -> Self {
        Coalition(self.0 & !(1 << i))
    }

    pub fn union(self, other: Coalition) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_valid_for(self, n: usize) -> bool {
        (self.0 as u64) < (1u64 << n)
    }

    pub fn members(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i)
            }
        })
    }

    /// All subsets of `self`, including the empty one and `self`.
    pub fn subsets(self) -> impl Iterator<Item = Coalition> {
        let full = self.0;
        let mut next = Some(0u32);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full {
                None
            } else {
                Some((cur.wrapping_sub(full)) & full)
            };
            Some(Coalition(cur))
        })
    }

    /// Spreads the low bits of `self` onto the member positions of `within`.
    /// Maps a coalition of a restricted unit set back to the parent set.
    pub fn deposit(self, within: Coalition) -> Coalition {
        let mut out = 0u32;
        for (bit, pos) in within.members().enumerate() {
            if self.0 & (1 << bit) != 0 {
                out |= 1 << pos;
            }
        }
        Coalition(out)
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Duplicate-free sequence of unit indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OrderedCoalition(Vec<u8>);

impl OrderedCoalition {
    pub fn new(seq: Vec<usize>, n: usize) -> Result<Self> {
        let mut seen = Coalition::EMPTY;
        for &i in &seq {
            if i >= n {
                return Err(Error::UnitIndex { index: i, size: n });
            }
            if seen.contains(i) {
                return Err(Error::InvalidCoalition(format!(
                    "unit index {i} repeated in ordered coalition"
                )));
            }
            seen = seen.with(i);
        }
        Ok(OrderedCoalition(seq.into_iter().map(|i| i as u8).collect()))
    }

    pub fn empty() -> Self {
        OrderedCoalition(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().map(|&i| i as usize).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn support(&self) -> Coalition {
        Coalition::from_indices(self.iter())
    }

    pub fn key(&self) -> u64 {
        seq_key(self.iter())
    }

    fn from_key(key: u64) -> Self {
        let mut seq = Vec::new();
        let mut k = key;
        while k != 0 {
            seq.push(((k & 0xF) - 1) as u8);
            k >>= 4;
        }
        OrderedCoalition(seq)
    }
}

impl PartialOrd for OrderedCoalition {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Length first, then lexicographic on indices.
impl Ord for OrderedCoalition {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Packs a sequence of indices < 15 into a u64, four bits per position.
pub(crate) fn seq_key<I: IntoIterator<Item = usize>>(seq: I) -> u64 {
    seq.into_iter()
        .enumerate()
        .fold(0u64, |acc, (pos, i)| acc | ((i as u64 + 1) << (4 * pos)))
}

/// All 2ⁿ coalitions in increasing mask order.
pub fn enumerate_coalitions(units: &UnitSet) -> Result<Vec<Coalition>> {
    check_size(units.len(), MAX_UNITS)?;
    Ok((0..(1u32 << units.len())).map(Coalition).collect())
}

/// Number of ordered coalitions: Σₖ n!/(n−k)!.
pub fn ordered_coalition_count(n: usize) -> usize {
    let mut total = 1;
    let mut falling = 1;
    for k in 0..n {
        falling *= n - k;
        total += falling;
    }
    total
}

/// All permutations of all subsets, ordered by length then lexicographically.
pub fn enumerate_ordered_coalitions(units: &UnitSet) -> Result<Vec<OrderedCoalition>> {
    let n = units.len();
    check_size(n, MAX_ORDERED_UNITS)?;
    let mut out = Vec::with_capacity(ordered_coalition_count(n));
    for len in 0..=n {
        let mut prefix = Vec::with_capacity(len);
        permutations_of_len(n, len, &mut prefix, Coalition::EMPTY, &mut out);
    }
    Ok(out)
}

fn permutations_of_len(
    n: usize,
    len: usize,
    prefix: &mut Vec<u8>,
    used: Coalition,
    out: &mut Vec<OrderedCoalition>,
) {
    if prefix.len() == len {
        out.push(OrderedCoalition(prefix.clone()));
        return;
    }
    for i in 0..n {
        if !used.contains(i) {
            prefix.push(i as u8);
            permutations_of_len(n, len, prefix, used.with(i), out);
            prefix.pop();
        }
    }
}

/// Calls `f` on every permutation of `items` (Heap's algorithm, in place).
pub(crate) fn for_each_permutation<F: FnMut(&[usize])>(items: &mut [usize], mut f: F) {
    let n = items.len();
    let mut c = vec![0usize; n];
    f(items);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(c[i], i);
            }
            f(items);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

fn check_size(n: usize, bound: usize) -> Result<()> {
    if n > bound {
        Err(Error::TooManyUnits { size: n, bound })
    } else {
        Ok(())
    }
}

/// A tabulated worth with optional replicate statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Worth {
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u32>,
}

impl Worth {
    pub fn exact(value: f64) -> Self {
        Worth {
            value,
            std: None,
            count: None,
        }
    }

    pub fn with_stats(value: f64, std: f64, count: u32) -> Self {
        Worth {
            value,
            std: Some(std),
            count: Some(count),
        }
    }
}

impl From<f64> for Worth {
    fn from(value: f64) -> Self {
        Worth::exact(value)
    }
}

/// Worth oracle over unordered coalitions.
pub trait Game: Sync {
    fn units(&self) -> &UnitSet;
    fn worth(&self, c: Coalition) -> Result<f64>;

    fn eval_target(&self) -> &str {
        "all"
    }
}

/// Worth oracle over ordered coalitions.
pub trait OrderedGame: Sync {
    fn units(&self) -> &UnitSet;
    fn worth(&self, seq: &[usize]) -> Result<f64>;

    fn eval_target(&self) -> &str {
        "all"
    }
}

/// Characteristic function tabulated over subsets of a unit set.
#[derive(Debug, Clone, PartialEq)]
pub struct CharTable {
    units: UnitSet,
    entries: Vec<Option<Worth>>,
    eval_target: String,
    meta: BTreeMap<String, String>,
}

impl CharTable {
    /// Empty (incomplete) table.
    pub fn new(units: UnitSet, eval_target: impl Into<String>) -> Self {
        let size = 1usize << units.len();
        CharTable {
            units,
            entries: vec![None; size],
            eval_target: eval_target.into(),
            meta: BTreeMap::new(),
        }
    }

    /// Complete table from a worth function.
    pub fn from_fn<F>(units: UnitSet, eval_target: impl Into<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(Coalition) -> f64,
    {
        let mut table = CharTable::new(units, eval_target);
        for mask in 0..table.entries.len() as u32 {
            let c = Coalition(mask);
            table.set(c, f(c))?;
        }
        Ok(table)
    }

    pub fn units(&self) -> &UnitSet {
        &self.units
    }

    pub fn n(&self) -> usize {
        self.units.len()
    }

    pub fn eval_target(&self) -> &str {
        &self.eval_target
    }

    pub fn set_eval_target(&mut self, label: impl Into<String>) {
        self.eval_target = label.into();
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.meta
    }

    pub fn set(&mut self, c: Coalition, worth: impl Into<Worth>) -> Result<()> {
        let worth = worth.into();
        if !c.is_valid_for(self.n()) {
            return Err(Error::InvalidCoalition(format!(
                "mask {:#b} out of range for {} units",
                c.mask(),
                self.n()
            )));
        }
        if !worth.value.is_finite() {
            return Err(Error::NonFinite {
                coalition: self.units.describe(c),
                value: worth.value,
            });
        }
        self.entries[c.mask() as usize] = Some(worth);
        Ok(())
    }

    pub fn get(&self, c: Coalition) -> Option<&Worth> {
        self.entries.get(c.mask() as usize).and_then(Option::as_ref)
    }

    pub fn worth(&self, c: Coalition) -> Result<f64> {
        self.get(c)
            .map(|w| w.value)
            .ok_or_else(|| Error::MissingEntry(self.units.describe(c)))
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    pub fn require_complete(&self) -> Result<()> {
        match self.entries.iter().position(Option::is_none) {
            None => Ok(()),
            Some(mask) => Err(Error::MissingEntry(
                self.units.describe(Coalition(mask as u32)),
            )),
        }
    }

    /// Dense worth vector indexed by mask. Fails on an incomplete table.
    pub fn values(&self) -> Result<Vec<f64>> {
        self.require_complete()?;
        Ok(self.entries.iter().map(|w| w.unwrap().value).collect())
    }

    /// Present entries in increasing mask order.
    pub fn iter(&self) -> impl Iterator<Item = (Coalition, &Worth)> {
        self.entries
            .iter()
            .enumerate()
            .filter_map(|(m, w)| w.as_ref().map(|w| (Coalition(m as u32), w)))
    }

    /// Applies `f` to every worth value (stats are dropped).
    pub fn map_values<F: Fn(Coalition, f64) -> f64>(&self, f: F) -> Result<CharTable> {
        let mut out = CharTable::new(self.units.clone(), self.eval_target.clone());
        out.meta = self.meta.clone();
        for (c, w) in self.iter() {
            out.set(c, f(c, w.value))?;
        }
        Ok(out)
    }

    /// Subgame on the members of `c`. Worths (and stats) of subsets of `c`
    /// are copied; the new unit set keeps index order.
    pub fn restrict(&self, c: Coalition) -> Result<CharTable> {
        if !c.is_valid_for(self.n()) {
            return Err(Error::InvalidCoalition(format!(
                "mask {:#b} out of range for {} units",
                c.mask(),
                self.n()
            )));
        }
        let units = self.units.subset(c);
        let mut out = CharTable::new(units, self.eval_target.clone());
        out.meta = self.meta.clone();
        for local in 0..(1u32 << c.len()) {
            let parent = Coalition(local).deposit(c);
            let worth = self
                .get(parent)
                .ok_or_else(|| Error::MissingEntry(self.units.describe(parent)))?;
            out.entries[local as usize] = Some(*worth);
        }
        Ok(out)
    }
}

impl Game for CharTable {
    fn units(&self) -> &UnitSet {
        &self.units
    }

    fn worth(&self, c: Coalition) -> Result<f64> {
        CharTable::worth(self, c)
    }

    fn eval_target(&self) -> &str {
        &self.eval_target
    }
}

/// Characteristic function tabulated over ordered coalitions.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedCharTable {
    units: UnitSet,
    entries: HashMap<u64, Worth>,
    eval_target: String,
    meta: BTreeMap<String, String>,
}

impl OrderedCharTable {
    pub fn new(units: UnitSet, eval_target: impl Into<String>) -> Result<Self> {
        check_size(units.len(), MAX_ORDERED_UNITS)?;
        Ok(OrderedCharTable {
            units,
            entries: HashMap::new(),
            eval_target: eval_target.into(),
            meta: BTreeMap::new(),
        })
    }

    pub fn from_fn<F>(units: UnitSet, eval_target: impl Into<String>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> f64,
    {
        let mut table = OrderedCharTable::new(units, eval_target)?;
        for oc in enumerate_ordered_coalitions(&table.units)? {
            let seq = oc.indices();
            let value = f(&seq);
            table.set(&oc, value)?;
        }
        Ok(table)
    }

    /// Ordered table whose worth depends only on the member set.
    pub fn from_unordered(table: &CharTable) -> Result<Self> {
        table.require_complete()?;
        let mut out = OrderedCharTable::new(table.units().clone(), table.eval_target())?;
        out.meta = table.meta().clone();
        for oc in enumerate_ordered_coalitions(table.units())? {
            let w = *table.get(oc.support()).unwrap();
            out.set(&oc, w)?;
        }
        Ok(out)
    }

    pub fn units(&self) -> &UnitSet {
        &self.units
    }

    pub fn n(&self) -> usize {
        self.units.len()
    }

    pub fn eval_target(&self) -> &str {
        &self.eval_target
    }

    pub fn set_eval_target(&mut self, label: impl Into<String>) {
        self.eval_target = label.into();
    }

    pub fn meta(&self) -> &BTreeMap<String, String> {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut BTreeMap<String, String> {
        &mut self.meta
    }

    pub fn set(&mut self, oc: &OrderedCoalition, worth: impl Into<Worth>) -> Result<()> {
        let worth = worth.into();
        if let Some(bad) = oc.iter().find(|&i| i >= self.n()) {
            return Err(Error::UnitIndex {
                index: bad,
                size: self.n(),
            });
        }
        if !worth.value.is_finite() {
            return Err(Error::NonFinite {
                coalition: self.units.describe_seq(&oc.indices()),
                value: worth.value,
            });
        }
        self.entries.insert(oc.key(), worth);
        Ok(())
    }

    pub fn get(&self, seq: &[usize]) -> Option<&Worth> {
        self.entries.get(&seq_key(seq.iter().copied()))
    }

    pub fn worth(&self, seq: &[usize]) -> Result<f64> {
        self.get(seq)
            .map(|w| w.value)
            .ok_or_else(|| Error::MissingEntry(self.units.describe_seq(seq)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.entries.len() == ordered_coalition_count(self.n())
    }

    pub fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            return Ok(());
        }
        for oc in enumerate_ordered_coalitions(&self.units)? {
            if !self.entries.contains_key(&oc.key()) {
                return Err(Error::MissingEntry(self.units.describe_seq(&oc.indices())));
            }
        }
        Ok(())
    }

    /// Entries ordered by length, then lexicographically.
    pub fn iter(&self) -> Vec<(OrderedCoalition, Worth)> {
        let mut out: Vec<_> = self
            .entries
            .iter()
            .map(|(&k, &w)| (OrderedCoalition::from_key(k), w))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn map_values<F: Fn(&[usize], f64) -> f64>(&self, f: F) -> Result<OrderedCharTable> {
        let mut out = OrderedCharTable::new(self.units.clone(), self.eval_target.clone())?;
        out.meta = self.meta.clone();
        for (oc, w) in self.iter() {
            out.set(&oc, f(&oc.indices(), w.value))?;
        }
        Ok(out)
    }

    /// True when every ordering of each member set has the same worth.
    pub fn is_order_independent(&self, tol: f64) -> bool {
        let mut by_support: HashMap<Coalition, f64> = HashMap::new();
        for (oc, w) in self.iter() {
            let first = *by_support.entry(oc.support()).or_insert(w.value);
            if (first - w.value).abs() > tol {
                return false;
            }
        }
        true
    }

    /// Unordered table taking, for each member set, the worth of its
    /// index-sorted ordering. Meaningful for order-independent tables.
    pub fn induced_unordered(&self) -> Result<CharTable> {
        let mut out = CharTable::new(self.units.clone(), self.eval_target.clone());
        out.meta = self.meta.clone();
        for mask in 0..(1u32 << self.n()) {
            let c = Coalition(mask);
            let seq: Vec<usize> = c.members().collect();
            let w = *self
                .get(&seq)
                .ok_or_else(|| Error::MissingEntry(self.units.describe_seq(&seq)))?;
            out.set(c, w)?;
        }
        Ok(out)
    }

    /// Subgame on the members of `c`, with indices renumbered in member order.
    pub fn restrict(&self, c: Coalition) -> Result<OrderedCharTable> {
        if !c.is_valid_for(self.n()) {
            return Err(Error::InvalidCoalition(format!(
                "mask {:#b} out of range for {} units",
                c.mask(),
                self.n()
            )));
        }
        let members: Vec<usize> = c.members().collect();
        let units = self.units.subset(c);
        let mut out = OrderedCharTable::new(units, self.eval_target.clone())?;
        out.meta = self.meta.clone();
        for oc in enumerate_ordered_coalitions(&out.units)? {
            let parent: Vec<usize> = oc.iter().map(|i| members[i]).collect();
            let w = *self
                .get(&parent)
                .ok_or_else(|| Error::MissingEntry(self.units.describe_seq(&parent)))?;
            out.entries.insert(oc.key(), w);
        }
        Ok(out)
    }
}

impl OrderedGame for OrderedCharTable {
    fn units(&self) -> &UnitSet {
        &self.units
    }

    fn worth(&self, seq: &[usize]) -> Result<f64> {
        OrderedCharTable::worth(self, seq)
    }

    fn eval_target(&self) -> &str {
        &self.eval_target
    }
}

/// Adapts a closure into a [`Game`].
pub struct FnGame<F> {
    units: UnitSet,
    f: F,
}

impl<F: Fn(Coalition) -> f64 + Sync> FnGame<F> {
    pub fn new(units: UnitSet, f: F) -> Self {
        FnGame { units, f }
    }
}

impl<F: Fn(Coalition) -> f64 + Sync> Game for FnGame<F> {
    fn units(&self) -> &UnitSet {
        &self.units
    }

    fn worth(&self, c: Coalition) -> Result<f64> {
        Ok((self.f)(c))
    }
}

/// Adapts a closure into an [`OrderedGame`].
pub struct FnOrderedGame<F> {
    units: UnitSet,
    f: F,
}

impl<F: Fn(&[usize]) -> f64 + Sync> FnOrderedGame<F> {
    pub fn new(units: UnitSet, f: F) -> Self {
        FnOrderedGame { units, f }
    }
}

impl<F: Fn(&[usize]) -> f64 + Sync> OrderedGame for FnOrderedGame<F> {
    fn units(&self) -> &UnitSet {
        &self.units
    }

    fn worth(&self, seq: &[usize]) -> Result<f64> {
        Ok((self.f)(seq))
    }
}
